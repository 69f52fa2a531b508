//! Surface and Killing-field arguments.
//!
//! Surfaces: `disk`, `catenoid`, `rotational`, `cap`, optionally followed by
//! `:key=value,...` with keys `n` (intrinsic dimension) and `height` (cap
//! only). Killing fields: a basis name (`tx`, `rz`, `r12`, ...) or
//! `matrix=<upper triangle>;vector=<translation>`, comma-separated entries.

use std::fmt;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use freebound::exact;
use freebound::geom::{KillingField, ParametricHypersurface};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Disk,
    Catenoid,
    Rotational,
    Cap,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceSpec {
    pub family: Family,
    pub n: usize,
    pub height: f64,
}

impl SurfaceSpec {
    pub fn build(&self) -> Result<ParametricHypersurface> {
        Ok(match self.family {
            Family::Disk => exact::equatorial_disk(self.n)?,
            Family::Catenoid => exact::critical_catenoid(),
            Family::Rotational => exact::rotational_minimal(self.n)?,
            Family::Cap => exact::spherical_cap(self.n, self.height)?,
        })
    }
}

impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Disk => write!(f, "disk:n={}", self.n),
            Family::Catenoid => write!(f, "catenoid"),
            Family::Rotational => write!(f, "rotational:n={}", self.n),
            Family::Cap => write!(f, "cap:n={},height={}", self.n, self.height),
        }
    }
}

impl FromStr for SurfaceSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = s.split_once(':').unwrap_or((s, ""));
        let (family, n) = match name {
            "disk" => (Family::Disk, 2),
            "catenoid" => (Family::Catenoid, 2),
            "rotational" => (Family::Rotational, 3),
            "cap" => (Family::Cap, 2),
            _ => bail!("unknown surface `{name}` (expected disk, catenoid, rotational or cap)"),
        };
        let mut spec = SurfaceSpec {
            family,
            n,
            height: 0.5,
        };
        for kv in params.split(',').filter(|p| !p.is_empty()) {
            let (key, value) = kv
                .split_once('=')
                .with_context(|| format!("surface parameter `{kv}` is not key=value"))?;
            match (key, family) {
                ("n", Family::Catenoid) => bail!("the catenoid is only available for n = 2"),
                ("n", _) => spec.n = value.parse().with_context(|| format!("bad n `{value}`"))?,
                ("height", Family::Cap) => {
                    spec.height = value.parse().with_context(|| format!("bad height `{value}`"))?
                }
                _ => bail!("surface `{name}` takes no parameter `{key}`"),
            }
        }
        Ok(spec)
    }
}

fn floats(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().with_context(|| format!("bad number `{t}`")))
        .collect()
}

pub fn parse_killing(spec: &str, ambient: usize) -> Result<KillingField> {
    if !spec.contains('=') {
        return Ok(KillingField::from_name(spec, ambient)?);
    }
    let mut upper = vec![0.0; ambient * (ambient - 1) / 2];
    let mut vector = vec![0.0; ambient];
    for part in spec.split(';').filter(|p| !p.trim().is_empty()) {
        let (key, value) = part
            .split_once('=')
            .with_context(|| format!("`{part}` is not key=value"))?;
        match key.trim() {
            "matrix" => upper = floats(value)?,
            "vector" => vector = floats(value)?,
            other => bail!("unknown Killing field component `{other}` (expected matrix or vector)"),
        }
    }
    Ok(KillingField::from_upper(ambient, &upper, &vector)?)
}
