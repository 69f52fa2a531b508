//! Adaptive Dormand–Prince 4(5) integration with a terminal event.

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-12,
        }
    }
}

/// Where the event function first crossed zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EventHit<const D: usize> {
    pub t: f64,
    pub y: [f64; D],
    pub steps: usize,
}

fn step<const D: usize, F>(f: &F, t: f64, y: &[f64; D], h: f64) -> ([f64; D], [f64; D])
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let mut k = [[0.0; D]; 7];
    for s in 0..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for d in 0..D {
                ys[d] += h * A[s][j] * kj[d];
            }
        }
        k[s] = f(t + C[s] * h, &ys);
    }
    let mut y5 = *y;
    let mut err = [0.0; D];
    for s in 0..7 {
        for d in 0..D {
            y5[d] += h * B5[s] * k[s][d];
            err[d] += h * (B5[s] - B4[s]) * k[s][d];
        }
    }
    (y5, err)
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` until `event(t, y)` changes sign
/// from negative to non-negative, localizing the crossing by bisection on the
/// final step length. Returns `None` if `t_max` is reached first.
pub fn integrate_to_event<const D: usize, F, E>(
    f: &F,
    event: &E,
    t0: f64,
    y0: [f64; D],
    t_max: f64,
    tol: Tolerance,
) -> Option<EventHit<D>>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
    E: Fn(f64, &[f64; D]) -> f64,
{
    let mut t = t0;
    let mut y = y0;
    let mut h: f64 = 1e-3;
    let mut steps = 0;
    while t < t_max && steps < 1_000_000 {
        h = h.min(t_max - t);
        let (y_new, err) = step(f, t, &y, h);
        let mut norm = 0.0_f64;
        for d in 0..D {
            let sc = tol.atol + tol.rtol * y[d].abs().max(y_new[d].abs());
            norm = norm.max((err[d] / sc).abs());
        }
        if norm <= 1.0 {
            steps += 1;
            if event(t + h, &y_new) >= 0.0 {
                let (mut lo, mut hi) = (0.0, h);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let (ym, _) = step(f, t, &y, mid);
                    if event(t + mid, &ym) >= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let (yh, _) = step(f, t, &y, hi);
                return Some(EventHit {
                    t: t + hi,
                    y: yh,
                    steps,
                });
            }
            t += h;
            y = y_new;
        }
        let factor = if norm == 0.0 {
            5.0
        } else {
            (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    None
}
