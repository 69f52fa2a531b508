use anyhow::{bail, Result};
use clap::Args;
use freebound::exact::export::{sample_grid_csv, triangulate_obj};

use crate::output::{write_atomic, Object, RunManifest};
use crate::spec::SurfaceSpec;
use crate::OutArgs;

#[derive(Args, Debug)]
pub struct ExportArgs {
    /// Surface, as for `verify`.
    #[arg(long)]
    surface: SurfaceSpec,
    /// Nodes per parameter axis.
    #[arg(long, default_value_t = 64)]
    res: usize,
    #[command(flatten)]
    out: OutArgs,
}

pub fn run(args: ExportArgs) -> Result<u8> {
    if args.res < 2 {
        bail!("--res must be at least 2");
    }
    let surf = args.surface.build()?;
    let stem = format!("export-{}", surf.id());
    let csv = args.out.out.join(format!("{stem}.csv"));
    write_atomic(&csv, sample_grid_csv(&surf, args.res).as_bytes())?;
    let mut outputs = vec![csv];
    // Triangulations only make sense for surfaces in R³.
    if surf.dim() == 2 {
        let obj = args.out.out.join(format!("{stem}.obj"));
        write_atomic(&obj, triangulate_obj(&surf, args.res)?.as_bytes())?;
        outputs.push(obj);
    }
    for p in &outputs {
        println!("{}", p.display());
    }
    let params = Object::default().val("res", &args.res);
    let mut manifest = RunManifest::new("export", Some(args.surface.to_string()), params);
    manifest.outputs = outputs;
    manifest.write(&args.out.out.join(format!("{stem}.manifest.json")), 0)?;
    Ok(0)
}
