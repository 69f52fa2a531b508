use nalgebra::{DMatrix, DVector};

use super::chart::AVec;

/// Ambient Killing field `V(x) = B x + b` with `B` skew-symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct KillingField {
    skew: DMatrix<f64>,
    translation: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KillingError {
    #[error("expected {expected} upper-triangle entries, got {got}")]
    UpperTriangleLength { expected: usize, got: usize },
    #[error("translation has length {got}, expected {expected}")]
    TranslationLength { expected: usize, got: usize },
    #[error("unknown Killing field `{0}`")]
    UnknownName(String),
}

impl KillingField {
    /// Builds `B` from its strict upper triangle, row by row, so `B + Bᵀ = 0`
    /// holds exactly.
    pub fn from_upper(ambient: usize, upper: &[f64], translation: &[f64]) -> Result<Self, KillingError> {
        let expected = ambient * (ambient - 1) / 2;
        if upper.len() != expected {
            return Err(KillingError::UpperTriangleLength {
                expected,
                got: upper.len(),
            });
        }
        if translation.len() != ambient {
            return Err(KillingError::TranslationLength {
                expected: ambient,
                got: translation.len(),
            });
        }
        let mut skew = DMatrix::zeros(ambient, ambient);
        let mut k = 0;
        for i in 0..ambient {
            for j in i + 1..ambient {
                skew[(i, j)] = upper[k];
                skew[(j, i)] = -upper[k];
                k += 1;
            }
        }
        Ok(Self {
            skew,
            translation: DVector::from_column_slice(translation),
        })
    }

    pub fn translation(dir: &[f64]) -> Self {
        let n = dir.len();
        Self {
            skew: DMatrix::zeros(n, n),
            translation: DVector::from_column_slice(dir),
        }
    }

    /// Unit translation along axis `k`.
    pub fn axis_translation(ambient: usize, k: usize) -> Self {
        let mut b = vec![0.0; ambient];
        b[k] = 1.0;
        Self::translation(&b)
    }

    /// Rotation in the `(i, j)` plane: `V = x_i e_j - x_j e_i`.
    pub fn plane_rotation(ambient: usize, i: usize, j: usize) -> Self {
        assert!(i != j && i < ambient && j < ambient);
        let mut skew = DMatrix::zeros(ambient, ambient);
        skew[(j, i)] = 1.0;
        skew[(i, j)] = -1.0;
        Self {
            skew,
            translation: DVector::zeros(ambient),
        }
    }

    /// Translations along every axis followed by every plane rotation;
    /// `(n+1)(n+2)/2` fields in total.
    pub fn basis(ambient: usize) -> Vec<(String, Self)> {
        let mut out: Vec<_> = (0..ambient)
            .map(|k| (translation_name(ambient, k), Self::axis_translation(ambient, k)))
            .collect();
        if ambient == 3 {
            // Right-handed rotations about the axes.
            for (name, (i, j)) in [("rx", (1, 2)), ("ry", (2, 0)), ("rz", (0, 1))] {
                out.push((name.to_string(), Self::plane_rotation(3, i, j)));
            }
            return out;
        }
        for i in 0..ambient {
            for j in i + 1..ambient {
                out.push((
                    format!("r{}{}", i + 1, j + 1),
                    Self::plane_rotation(ambient, i, j),
                ));
            }
        }
        out
    }

    /// Parses `tx|ty|tz|tw`, `t<k>`, `rx|ry|rz` (rotation about that axis in
    /// R³) and `r<i><j>` (1-based plane indices).
    pub fn from_name(name: &str, ambient: usize) -> Result<Self, KillingError> {
        let unknown = || KillingError::UnknownName(name.to_string());
        let axis = |c: char| -> Option<usize> {
            match c {
                'x' => Some(0),
                'y' => Some(1),
                'z' => Some(2),
                'w' => Some(3),
                _ => c.to_digit(10).and_then(|d| (d as usize).checked_sub(1)),
            }
        };
        let chars: Vec<char> = name.chars().collect();
        match chars.as_slice() {
            ['t', c] => {
                let k = axis(*c).filter(|&k| k < ambient).ok_or_else(unknown)?;
                Ok(Self::axis_translation(ambient, k))
            }
            ['r', c] if ambient == 3 && c.is_alphabetic() => {
                let (i, j) = match c {
                    'x' => (1, 2),
                    'y' => (2, 0),
                    'z' => (0, 1),
                    _ => return Err(unknown()),
                };
                Ok(Self::plane_rotation(ambient, i, j))
            }
            ['r', a, b] => {
                let i = a.to_digit(10).and_then(|d| (d as usize).checked_sub(1));
                let j = b.to_digit(10).and_then(|d| (d as usize).checked_sub(1));
                match (i, j) {
                    (Some(i), Some(j)) if i != j && i < ambient && j < ambient => {
                        Ok(Self::plane_rotation(ambient, i, j))
                    }
                    _ => Err(unknown()),
                }
            }
            _ => Err(unknown()),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.translation.len()
    }

    pub fn skew(&self) -> &DMatrix<f64> {
        &self.skew
    }

    pub fn translation_part(&self) -> &DVector<f64> {
        &self.translation
    }

    pub fn is_translation(&self) -> bool {
        self.skew.iter().all(|&x| x == 0.0)
    }

    pub fn is_rotation(&self) -> bool {
        self.translation.iter().all(|&x| x == 0.0)
    }

    pub fn eval(&self, x: &AVec) -> AVec {
        let n = self.ambient_dim();
        let mut out = AVec::zeros();
        for i in 0..n {
            out[i] = self.translation[i] + (0..n).map(|j| self.skew[(i, j)] * x[j]).sum::<f64>();
        }
        out
    }

    /// The field pushed forward by the rotation `r`: `V'(x) = R V(Rᵀx)`.
    pub fn conjugated(&self, r: &DMatrix<f64>) -> Self {
        let b = r * &self.skew * r.transpose();
        // Re-skew so the stored matrix stays exactly antisymmetric.
        let skew = (&b - b.transpose()) * 0.5;
        Self {
            skew,
            translation: r * &self.translation,
        }
    }
}

fn translation_name(ambient: usize, k: usize) -> String {
    if ambient <= 4 {
        format!("t{}", ['x', 'y', 'z', 'w'][k])
    } else {
        format!("t{}", k + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skew_is_exact() {
        let v = KillingField::from_upper(3, &[0.3, -1.2, 2.5], &[1.0, 0.0, 0.0]).unwrap();
        let s = v.skew();
        assert_eq!(s + s.transpose(), DMatrix::zeros(3, 3));
        assert!(!v.is_translation() && !v.is_rotation());
        assert!(KillingField::from_upper(3, &[0.0; 2], &[0.0; 3]).is_err());
    }

    #[test]
    fn names() {
        let rz = KillingField::from_name("rz", 3).unwrap();
        let x = AVec::from_column_slice(&[1.0, 0.0, 0.0, 0.0, 0.0]);
        let v = rz.eval(&x);
        assert_eq!((v[0], v[1], v[2]), (0.0, 1.0, 0.0));
        assert_eq!(
            KillingField::from_name("t4", 4).unwrap(),
            KillingField::from_name("tw", 4).unwrap()
        );
        assert!(KillingField::from_name("tw", 3).is_err());
        assert!(KillingField::from_name("r11", 3).is_err());
        let basis = KillingField::basis(3);
        assert_eq!(basis.len(), 6);
        let names: Vec<_> = basis.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["tx", "ty", "tz", "rx", "ry", "rz"]);
        for m in [3, 4, 5] {
            for (name, field) in KillingField::basis(m) {
                assert_eq!(KillingField::from_name(&name, m).unwrap(), field, "{name}");
            }
        }
    }
}
