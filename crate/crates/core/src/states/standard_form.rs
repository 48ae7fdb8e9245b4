use serde::{Deserialize, Serialize};

use super::CovarianceMatrix;
use crate::linalg::det2;
use crate::{StateError, Tolerances};

/// `[[n, 0, c, 0], [0, n, 0, c'], [c, 0, m, 0], [0, c', 0, m]]`, the shape
/// every two-mode covariance matrix reaches under local symplectic maps.
/// Canonical representative: `c ≥ 0` and `|c| ≥ |c'|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardFormI {
    pub n: f64,
    pub m: f64,
    pub c: f64,
    pub cp: f64,
}

impl StandardFormI {
    pub fn covariance(&self) -> CovarianceMatrix {
        CovarianceMatrix::from_entries(
            [self.n, self.n, self.m, self.m],
            [0.0, self.c, 0.0, 0.0, self.cp, 0.0],
        )
    }

    pub fn det(&self) -> f64 {
        let nm = self.n * self.m;
        (nm - self.c * self.c) * (nm - self.cp * self.cp)
    }
}

/// Result of squeezing mode 1 by `r1` and mode 2 by `r2` until the two
/// proportionality conditions of the variance criterion hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardFormII {
    pub n1: f64,
    pub n2: f64,
    pub m1: f64,
    pub m2: f64,
    pub c1: f64,
    pub c2: f64,
    pub a0: f64,
    pub r1: f64,
    pub r2: f64,
}

impl StandardFormII {
    fn from_squeezes(f1: &StandardFormI, r1: f64, r2: f64) -> Self {
        let q = (r1 * r2).sqrt();
        let (n1, n2, m1, m2) = (r1 * f1.n, f1.n / r1, r2 * f1.m, f1.m / r2);
        let degenerate = n1 - 1.0 <= DEGENERATE_GAP || m1 - 1.0 <= DEGENERATE_GAP;
        let a0_sq = if degenerate {
            1.0
        } else {
            ((m1 - 1.0) / (n1 - 1.0)).sqrt()
        };
        Self {
            n1,
            n2,
            m1,
            m2,
            c1: f1.c * q,
            c2: f1.cp / q,
            a0: a0_sq.sqrt(),
            r1,
            r2,
        }
    }

    /// Scaled residuals of the two defining equations at `(r1, r2)`.
    pub fn residuals(&self, f1: &StandardFormI) -> [f64; 2] {
        System::new(f1)
            .residual(self.r1.ln(), self.r2.ln())
            .unwrap_or([f64::NAN; 2])
    }
}

const DEGENERATE_GAP: f64 = 1e-12;

/// Reduces `m` to standard form I through its local symplectic invariants
/// `det A`, `det B`, `det C` and `det M`.
pub fn to_standard_form_one(
    m: &CovarianceMatrix,
    tol: &Tolerances,
) -> Result<StandardFormI, StateError> {
    let det_a = det2(&m.block_a());
    let det_b = det2(&m.block_b());
    let det_c = det2(&m.block_c());
    let det_m = m.det();
    if !(det_a > 0.0 && det_b > 0.0) {
        return Err(StateError::ComplexRoot {
            discriminant: f64::NAN,
        });
    }
    let (n, mm) = (det_a.sqrt(), det_b.sqrt());
    let nm = n * mm;
    // c² and c'² are the roots of t² - S t + (det C)² = 0.
    let sum = (nm * nm + det_c * det_c - det_m) / nm;
    let disc = sum * sum - 4.0 * det_c * det_c;
    if sum < 0.0 || disc < -tol.discriminant * sum * sum {
        return Err(StateError::ComplexRoot { discriminant: disc });
    }
    let large = 0.5 * (sum + disc.max(0.0).sqrt());
    let small = if large > 0.0 {
        det_c * det_c / large
    } else {
        0.0
    };
    Ok(StandardFormI {
        n,
        m: mm,
        c: large.sqrt(),
        cp: det_c.signum() * small.sqrt(),
    })
}

/// Solves for the local squeezes `(r1, r2)` that bring standard form I to
/// standard form II, by damped Newton iteration on `(ln r1, ln r2)`
/// starting from the origin.
pub fn to_standard_form_two(
    f1: &StandardFormI,
    tol: &Tolerances,
) -> Result<StandardFormII, StateError> {
    if f1.n < 1.0 || f1.m < 1.0 {
        return Err(StateError::LocalDeterminant { n: f1.n, m: f1.m });
    }
    if f1.n - 1.0 <= DEGENERATE_GAP || f1.m - 1.0 <= DEGENERATE_GAP {
        // A pure local mode admits no correlations; only the product state
        // has a well-defined form here.
        return if f1.c == 0.0 && f1.cp == 0.0 {
            Ok(StandardFormII::from_squeezes(f1, 1.0, 1.0))
        } else {
            Err(StateError::Degenerate)
        };
    }
    let system = System::new(f1);
    let (u, w) = system.solve(tol).or_else(|e| system.solve_on_curve(tol).ok_or(e))?;
    Ok(StandardFormII::from_squeezes(f1, u.exp(), w.exp()))
}

/// The two standard-form-II equations in log coordinates, scaled to O(1).
struct System {
    n: f64,
    m: f64,
    c: f64,
    cp: f64,
    scale1: f64,
    scale2: f64,
    u_max: f64,
    w_max: f64,
}

impl System {
    fn new(f1: &StandardFormI) -> Self {
        let nm = f1.n * f1.m;
        Self {
            n: f1.n,
            m: f1.m,
            c: f1.c.abs(),
            cp: f1.cp.abs(),
            scale1: nm,
            scale2: nm.sqrt(),
            u_max: f1.n.ln(),
            w_max: f1.m.ln(),
        }
    }

    fn entries(&self, u: f64, w: f64) -> (f64, f64, f64, f64) {
        let (s, t) = (u.exp(), w.exp());
        (s * self.n, self.n / s, t * self.m, self.m / t)
    }

    /// `None` outside the box where all four squeezed variances are ≥ 1.
    fn residual(&self, u: f64, w: f64) -> Option<[f64; 2]> {
        if u.abs() > self.u_max || w.abs() > self.w_max {
            return None;
        }
        let (n1, n2, m1, m2) = self.entries(u, w);
        let p = ((n1 - 1.0) * (m1 - 1.0)).max(0.0);
        let q = ((n2 - 1.0) * (m2 - 1.0)).max(0.0);
        let g = (0.5 * (u + w)).exp();
        let r1 = ((n1 - 1.0) * (m2 - 1.0) - (n2 - 1.0) * (m1 - 1.0)) / self.scale1;
        let r2 = (self.c * g - self.cp / g - p.sqrt() + q.sqrt()) / self.scale2;
        Some([r1, r2])
    }

    fn jacobian(&self, u: f64, w: f64) -> [[f64; 2]; 2] {
        let (n1, n2, m1, m2) = self.entries(u, w);
        let sp = ((n1 - 1.0) * (m1 - 1.0)).max(f64::MIN_POSITIVE).sqrt();
        let sq = ((n2 - 1.0) * (m2 - 1.0)).max(f64::MIN_POSITIVE).sqrt();
        let g = (0.5 * (u + w)).exp();
        let corr = 0.5 * (self.c * g + self.cp / g);
        [
            [
                (n1 * (m2 - 1.0) + n2 * (m1 - 1.0)) / self.scale1,
                (-(n1 - 1.0) * m2 - (n2 - 1.0) * m1) / self.scale1,
            ],
            [
                (corr - n1 * (m1 - 1.0) / (2.0 * sp) - n2 * (m2 - 1.0) / (2.0 * sq)) / self.scale2,
                (corr - (n1 - 1.0) * m1 / (2.0 * sp) - (n2 - 1.0) * m2 / (2.0 * sq)) / self.scale2,
            ],
        ]
    }

    /// Largest `λ ≤ 1` keeping `z + λδ` inside the feasible box.
    fn feasible_step(&self, z: [f64; 2], d: [f64; 2]) -> f64 {
        let mut lam: f64 = 1.0;
        for (zi, di, hi) in [(z[0], d[0], self.u_max), (z[1], d[1], self.w_max)] {
            if di > 0.0 {
                lam = lam.min((hi - zi) / di);
            } else if di < 0.0 {
                lam = lam.min((-hi - zi) / di);
            }
        }
        lam.max(0.0)
    }

    /// `w` solving the first equation at `u`: with `s = eᵘ`, `t = eʷ` it
    /// reads `(n - s) m t² + (s(sn - 1) - (n - s)) t - s m (sn - 1) = 0`,
    /// which has exactly one positive root inside the box.
    fn curve(&self, u: f64) -> Option<f64> {
        let s = u.exp();
        let a = (self.n - s) * self.m;
        let b = s * (s * self.n - 1.0) - (self.n - s);
        let c = -s * self.m * (s * self.n - 1.0);
        let t = if a.abs() <= f64::EPSILON * (b.abs() + c.abs()) {
            -c / b
        } else {
            let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
            // stable root choice
            if b >= 0.0 {
                2.0 * c / (-b - disc)
            } else {
                (-b + disc) / (2.0 * a)
            }
        };
        let w = t.ln();
        (t > 0.0 && w.abs() <= self.w_max).then_some(w)
    }

    /// Fallback for roots close to the box edge, where the square roots
    /// make Newton crawl: follow the curve of the first equation and
    /// bisect the sign change of the second nearest to the origin.
    fn solve_on_curve(&self, tol: &Tolerances) -> Option<(f64, f64)> {
        const SCAN: usize = 128;
        let phi = |u: f64| {
            let w = self.curve(u)?;
            Some((w, self.residual(u, w)?[1]))
        };
        // Chebyshev spacing crowds the scan toward the box edges
        let grid: Vec<f64> = (0..=SCAN)
            .map(|i| -self.u_max * (std::f64::consts::PI * i as f64 / SCAN as f64).cos())
            .collect();
        let mut points: Vec<(f64, f64)> = grid.iter().filter_map(|&u| phi(u).map(|(_, r)| (u, r))).collect();
        // the curve can leave the box before u does; add the exit points
        for pair in grid.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let (fa, fb) = (phi(a).is_some(), phi(b).is_some());
            if fa != fb {
                let (mut inside, mut outside) = if fa { (a, b) } else { (b, a) };
                for _ in 0..100 {
                    let mid = 0.5 * (inside + outside);
                    if mid == inside || mid == outside {
                        break;
                    }
                    if phi(mid).is_some() {
                        inside = mid;
                    } else {
                        outside = mid;
                    }
                }
                if let Some((_, r)) = phi(inside) {
                    points.push((inside, r));
                }
            }
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (mut lo, mut hi) = points
            .windows(2)
            .filter(|p| p[0].1.signum() != p[1].1.signum())
            .min_by(|a, b| a[0].0.abs().min(a[1].0.abs()).total_cmp(&b[0].0.abs().min(b[1].0.abs())))
            .map(|p| (p[0], p[1]))?;
        for _ in 0..200 {
            let mid = 0.5 * (lo.0 + hi.0);
            if mid <= lo.0 || mid >= hi.0 {
                break;
            }
            let (_, r) = phi(mid)?;
            if r.signum() == lo.1.signum() {
                lo = (mid, r);
            } else {
                hi = (mid, r);
            }
        }
        let u = if lo.1.abs() <= hi.1.abs() { lo.0 } else { hi.0 };
        let w = self.curve(u)?;
        let res = self.residual(u, w)?;
        (res[0].abs().max(res[1].abs()) < tol.newton_residual).then_some((u, w))
    }

    fn solve(&self, tol: &Tolerances) -> Result<(f64, f64), StateError> {
        let mut z = [0.0, 0.0];
        let mut f = self.residual(0.0, 0.0).expect("origin is feasible");
        for it in 0..tol.newton_max_iterations {
            let norm = f[0].abs().max(f[1].abs());
            if norm < tol.newton_residual {
                return Ok((z[0], z[1]));
            }
            let j = self.jacobian(z[0], z[1]);
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if !det.is_finite() || det == 0.0 {
                return Err(StateError::NoConvergence {
                    iterations: it,
                    residual: norm,
                });
            }
            let d = [
                -(j[1][1] * f[0] - j[0][1] * f[1]) / det,
                -(-j[1][0] * f[0] + j[0][0] * f[1]) / det,
            ];
            let f_norm = f[0].hypot(f[1]);
            let mut lam = self.feasible_step(z, d);
            let mut accepted = None;
            for _ in 0..60 {
                if lam == 0.0 {
                    break;
                }
                let trial = [z[0] + lam * d[0], z[1] + lam * d[1]];
                if let Some(ft) = self.residual(trial[0], trial[1]) {
                    if ft[0].hypot(ft[1]) <= (1.0 - 1e-4 * lam) * f_norm {
                        accepted = Some((trial, ft));
                        break;
                    }
                }
                lam *= 0.5;
            }
            match accepted {
                Some((zt, ft)) => {
                    z = zt;
                    f = ft;
                }
                None => {
                    return Err(StateError::NoConvergence {
                        iterations: it,
                        residual: norm,
                    })
                }
            }
        }
        let residual = f[0].abs().max(f[1].abs());
        if residual < tol.newton_residual {
            Ok((z[0], z[1]))
        } else {
            Err(StateError::NoConvergence {
                iterations: tol.newton_max_iterations,
                residual,
            })
        }
    }
}
