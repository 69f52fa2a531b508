//! Sampled point grids (CSV) and triangulations (OBJ) of parametric surfaces.

use std::fmt::Write;

use crate::geom::{ChartDiff, GeomError, ParametricHypersurface};

/// Nodes along one axis: endpoints included on closed axes, the periodic
/// seam counted once.
fn axis_nodes(lo: f64, hi: f64, periodic: bool, count: usize) -> Vec<f64> {
    let count = count.max(2);
    if periodic {
        (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / count as f64)
            .collect()
    } else {
        (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect()
    }
}

/// CSV with one row per tensor-grid node: parameters, position and unit
/// normal (empty where the chart degenerates). `per_axis` nodes per axis.
pub fn sample_grid_csv(surf: &ParametricHypersurface, per_axis: usize) -> String {
    let n = surf.dim();
    let axes: Vec<Vec<f64>> = surf
        .domain()
        .axes
        .iter()
        .map(|a| axis_nodes(a.lo, a.hi, a.periodic, per_axis))
        .collect();
    let mut out = String::new();
    let mut header: Vec<String> = (1..=n).map(|i| format!("p{i}")).collect();
    header.extend((1..=n + 1).map(|i| format!("x{i}")));
    header.extend((1..=n + 1).map(|i| format!("nu{i}")));
    out.push_str(&header.join(","));
    out.push('\n');
    let total: usize = axes.iter().map(Vec::len).product();
    for mut idx in 0..total {
        let p: Vec<f64> = axes
            .iter()
            .map(|nodes| {
                let v = nodes[idx % nodes.len()];
                idx /= nodes.len();
                v
            })
            .collect();
        let mut row: Vec<String> = p.iter().map(|v| format!("{v:.16e}")).collect();
        match surf.local(&p, 1, ChartDiff::Exact) {
            Ok(geo) => {
                row.extend((0..=n).map(|i| format!("{:.16e}", geo.point[i])));
                row.extend((0..=n).map(|i| format!("{:.16e}", geo.normal[i])));
            }
            Err(_) => {
                let x = surf.point(&p).expect("grid node inside domain");
                row.extend((0..=n).map(|i| format!("{:.16e}", x[i])));
                row.extend((0..=n).map(|_| String::new()));
            }
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Triangulated OBJ of a two-dimensional surface in R³ on a `res × res`
/// parameter grid, faces ordered along the chart orientation.
pub fn triangulate_obj(surf: &ParametricHypersurface, res: usize) -> Result<String, GeomError> {
    assert_eq!(surf.dim(), 2, "OBJ export needs a surface in R³");
    let [a0, a1] = [surf.domain().axes[0], surf.domain().axes[1]];
    let u = axis_nodes(a0.lo, a0.hi, a0.periodic, res);
    let v = axis_nodes(a1.lo, a1.hi, a1.periodic, res);
    let mut out = String::new();
    writeln!(out, "# {}", surf.id()).unwrap();
    for &y in &v {
        for &x in &u {
            let p = surf.point(&[x, y])?;
            writeln!(out, "v {:.16e} {:.16e} {:.16e}", p[0], p[1], p[2]).unwrap();
        }
    }
    let (nu, nv) = (u.len(), v.len());
    let cells_u = if a0.periodic { nu } else { nu - 1 };
    let cells_v = if a1.periodic { nv } else { nv - 1 };
    let id = |i: usize, j: usize| (j % nv) * nu + (i % nu) + 1;
    // Triangles (i,j) → (i+1,j) → (i+1,j+1) follow ∂_u then ∂_v, matching
    // the tangent order; the orientation sign decides the winding.
    let flip = surf.orientation() < 0.0;
    for j in 0..cells_v {
        for i in 0..cells_u {
            let quad = [id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)];
            for tri in [[quad[0], quad[1], quad[2]], [quad[0], quad[2], quad[3]]] {
                if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                    continue;
                }
                let [a, b, c] = if flip { [tri[0], tri[2], tri[1]] } else { tri };
                writeln!(out, "f {a} {b} {c}").unwrap();
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::critical_catenoid;

    #[test]
    fn obj_counts() {
        let s = critical_catenoid();
        let obj = triangulate_obj(&s, 8).unwrap();
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 64);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 2 * 8 * 7);
        let csv = sample_grid_csv(&s, 4);
        assert_eq!(csv.lines().count(), 17);
        assert!(csv.starts_with("p1,p2,x1,x2,x3,nu1,nu2,nu3\n"));
    }
}
