//! Sample grids in parameter space.

use super::report::GridSpec;
use crate::geom::{Axis, Face, ParametricHypersurface};

/// Cell centres of `count` equal cells on `[lo, hi]`.
fn centres(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / count as f64)
        .collect()
}

fn tensor(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let total: usize = axes.iter().map(Vec::len).product();
    (0..total)
        .map(|mut idx| {
            axes.iter()
                .map(|nodes| {
                    let v = nodes[idx % nodes.len()];
                    idx /= nodes.len();
                    v
                })
                .collect()
        })
        .collect()
}

/// Interior sample points: cell centres of a tensor grid, so no point lies
/// on a face (boundary or coordinate pole).
#[derive(Clone, Debug, PartialEq)]
pub struct SampleGrid {
    pub points: Vec<Vec<f64>>,
    pub spec: GridSpec,
}

impl SampleGrid {
    /// `count` cells per axis over the whole domain.
    pub fn interior(surf: &ParametricHypersurface, count: usize) -> Self {
        Self::over(
            &surf.domain().axes,
            count,
            "cell centres over the parameter domain",
        )
    }

    /// `count` cells per axis, with `axis` restricted to `[lo, hi]`.
    pub fn band(surf: &ParametricHypersurface, count: usize, axis: usize, lo: f64, hi: f64) -> Self {
        let mut axes = surf.domain().axes.clone();
        axes[axis] = Axis::closed(lo, hi);
        Self::over(
            &axes,
            count,
            &format!("cell centres with p{} in [{lo}, {hi}]", axis + 1),
        )
    }

    fn over(axes: &[Axis], count: usize, description: &str) -> Self {
        let nodes: Vec<Vec<f64>> = axes.iter().map(|a| centres(a.lo, a.hi, count)).collect();
        let points = tensor(&nodes);
        Self {
            spec: GridSpec {
                kind: "interior".into(),
                counts: vec![count; axes.len()],
                points: points.len(),
                description: description.into(),
            },
            points,
        }
    }

    /// Keeps the points satisfying `keep`, noting the filter.
    pub fn filtered(mut self, keep: impl Fn(&[f64]) -> bool, what: &str) -> Self {
        self.points.retain(|p| keep(p));
        self.spec.points = self.points.len();
        self.spec.description = format!("{}, {what}", self.spec.description);
        self
    }
}

/// Sample points on the boundary faces, each tagged with its face.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryGrid {
    pub points: Vec<(Face, Vec<f64>)>,
    pub spec: GridSpec,
}

impl BoundaryGrid {
    /// About `per_face` cell-centred samples on every boundary face; faces of
    /// dimension `d` get `round(per_face^(1/d))` samples per axis.
    pub fn new(surf: &ParametricHypersurface, per_face: usize) -> Self {
        let domain = surf.domain();
        let mut points = Vec::new();
        let mut per_axis = 0;
        for &face in surf.boundary_faces() {
            let others: Vec<&Axis> = domain
                .axes
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != face.axis)
                .map(|(_, a)| a)
                .collect();
            let d = others.len().max(1) as f64;
            per_axis = ((per_face as f64).powf(1.0 / d).round() as usize).max(1);
            let nodes: Vec<Vec<f64>> = others.iter().map(|a| centres(a.lo, a.hi, per_axis)).collect();
            let c = face.coordinate(domain);
            for q in tensor(&nodes) {
                let mut p = q.clone();
                p.insert(face.axis, c);
                points.push((face, p));
            }
        }
        let faces = surf.boundary_faces().len();
        Self {
            spec: GridSpec {
                kind: "boundary".into(),
                counts: vec![per_axis; domain.dim().saturating_sub(1)],
                points: points.len(),
                description: format!("cell centres on {faces} boundary face(s)"),
            },
            points,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{critical_catenoid, equatorial_disk};

    #[test]
    fn interior_avoids_faces() {
        let s = critical_catenoid();
        let g = SampleGrid::interior(&s, 24);
        assert_eq!(g.points.len(), 576);
        let d = s.domain();
        assert!(g.points.iter().all(|p| d.distance_to_faces(p) > 0.04));
    }

    #[test]
    fn boundary_counts() {
        let s = critical_catenoid();
        let b = BoundaryGrid::new(&s, 64);
        assert_eq!(b.points.len(), 128);
        let d3 = equatorial_disk(3).unwrap();
        let b3 = BoundaryGrid::new(&d3, 64);
        assert_eq!(b3.points.len(), 64);
        assert!(b3.points.iter().all(|(f, p)| p[f.axis] == 1.0));
    }
}
