//! Shift and skew-shift dynamics on the 2-torus.
//!
//! Orbit points are always produced by the closed-form expressions
//! `x + n·ω` (shift) and `(x₁ + n·x₂ + n(n−1)/2·ω, x₂ + n·ω)` (skew-shift)
//! evaluated with error-free products, so the position of `T^n x` is
//! accurate to a few ulps even for `n` in the billions.

use serde::{Deserialize, Serialize};

/// Reduces `t` into `[0, 1)` using floor semantics.
#[inline]
pub fn wrap(t: f64) -> f64 {
    let r = t - t.floor();
    // t = -tiny gives r == 1.0 after rounding
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// A point of `T² = [0,1)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    pub x1: f64,
    pub x2: f64,
}

impl TorusPoint {
    pub fn new(x1: f64, x2: f64) -> Self {
        Self {
            x1: wrap(x1),
            x2: wrap(x2),
        }
    }

    pub const ORIGIN: TorusPoint = TorusPoint { x1: 0.0, x2: 0.0 };

    /// Euclidean distance on the torus (each coordinate difference taken mod 1).
    pub fn distance(&self, other: &TorusPoint) -> f64 {
        let d1 = crate::diophantine::torus_norm(self.x1 - other.x1);
        let d2 = crate::diophantine::torus_norm(self.x2 - other.x2);
        d1.hypot(d2)
    }
}

/// The ergodic driver of the potential sequence `V(Tⁿx)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Dynamics {
    /// `T(x₁, x₂) = (x₁ + ω₁, x₂ + ω₂)`
    Shift { omega: [f64; 2] },
    /// `T(x₁, x₂) = (x₁ + x₂, x₂ + ω)`
    SkewShift { omega: f64 },
}

impl Dynamics {
    pub fn shift(omega1: f64, omega2: f64) -> Self {
        Dynamics::Shift {
            omega: [wrap(omega1), wrap(omega2)],
        }
    }

    pub fn skew_shift(omega: f64) -> Self {
        Dynamics::SkewShift { omega: wrap(omega) }
    }

    /// One application of the map, in plain floating point.
    pub fn step(&self, x: TorusPoint) -> TorusPoint {
        match *self {
            Dynamics::Shift { omega } => TorusPoint::new(x.x1 + omega[0], x.x2 + omega[1]),
            Dynamics::SkewShift { omega } => TorusPoint::new(x.x1 + x.x2, x.x2 + omega),
        }
    }

    /// `T^n x` for `n ≥ 0`.
    pub fn iterate(&self, x: TorusPoint, n: u64) -> TorusPoint {
        self.orbit_point(x, n as i64)
    }

    /// `T^n x` for any integer `n`; both maps are invertible and the closed
    /// forms are polynomial in `n`, so negative times use the same formulas.
    pub fn orbit_point(&self, x: TorusPoint, n: i64) -> TorusPoint {
        match *self {
            Dynamics::Shift { omega } => {
                let n = n as i128;
                TorusPoint {
                    x1: frac_sum(&[FracTerm::plain(x.x1), FracTerm::mul(n, omega[0])]),
                    x2: frac_sum(&[FracTerm::plain(x.x2), FracTerm::mul(n, omega[1])]),
                }
            }
            Dynamics::SkewShift { omega } => skew_point(omega, x, n as i128),
        }
    }

    /// Streaming orbit `T^k x`, `k = start, start+1, …`.
    pub fn orbit(&self, x: TorusPoint, start: i64) -> Orbit {
        Orbit {
            dynamics: *self,
            origin: x,
            next: start,
        }
    }
}

/// Closed-form skew-shift iterate
/// `T^m x = (x₁ + m·x₂ + m(m−1)/2·ω, x₂ + m·ω) mod 1`.
pub fn skew_closed_form(omega: f64, x: TorusPoint, m: u64) -> TorusPoint {
    skew_point(wrap(omega), x, m as i128)
}

fn skew_point(omega: f64, x: TorusPoint, m: i128) -> TorusPoint {
    let tri = m * (m - 1) / 2;
    TorusPoint {
        x1: frac_sum(&[
            FracTerm::plain(x.x1),
            FracTerm::mul(m, x.x2),
            FracTerm::mul(tri, omega),
        ]),
        x2: frac_sum(&[FracTerm::plain(x.x2), FracTerm::mul(m, omega)]),
    }
}

/// Iterator over `T^k x`; each point is evaluated from the closed form.
#[derive(Debug, Clone)]
pub struct Orbit {
    dynamics: Dynamics,
    origin: TorusPoint,
    next: i64,
}

impl Iterator for Orbit {
    type Item = TorusPoint;

    fn next(&mut self) -> Option<TorusPoint> {
        let p = self.dynamics.orbit_point(self.origin, self.next);
        self.next += 1;
        Some(p)
    }
}

/// Returns `f(T^k x)` for `k = 1..=n`.
pub fn orbit_fold<F>(dynamics: &Dynamics, x: TorusPoint, n: usize, f: F) -> Vec<f64>
where
    F: Fn(TorusPoint) -> f64,
{
    dynamics.orbit(x, 1).take(n).map(f).collect()
}

/// `Σ nᵢ·wᵢ mod 1` evaluated with error-free products; accurate to a few
/// ulps for any integer coefficients up to `2^127`.
pub fn frac_combination(products: &[(i128, f64)]) -> f64 {
    let terms: Vec<FracTerm> = products.iter().map(|&(n, w)| FracTerm::mul(n, w)).collect();
    frac_sum(&terms)
}

/// `frac(n·w)` split into an exactly reduced main part and small error parts.
#[derive(Debug, Clone, Copy)]
struct FracTerm {
    parts: [f64; 8],
    len: usize,
}

impl FracTerm {
    fn plain(v: f64) -> Self {
        let mut parts = [0.0; 8];
        parts[0] = wrap(v);
        FracTerm { parts, len: 1 }
    }

    /// Error-free decomposition of `n·w`: `n` is split into 32-bit limbs,
    /// each limb multiplies the exactly reduced `frac(2^{32i}·w)`, and the
    /// rounding error of every product is kept via fused multiply-add.
    fn mul(n: i128, w: f64) -> Self {
        let neg = n < 0;
        let mut mag = n.unsigned_abs();
        let mut parts = [0.0; 8];
        let mut len = 0;
        let mut scale = 1.0f64;
        while mag != 0 {
            let limb = (mag & 0xffff_ffff) as f64;
            let g = wrap(w * scale);
            let p = limb * g;
            let e = limb.mul_add(g, -p);
            parts[len] = wrap(p);
            parts[len + 1] = e;
            len += 2;
            mag >>= 32;
            scale *= 4_294_967_296.0;
        }
        if neg {
            for v in &mut parts[..len] {
                *v = -*v;
            }
        }
        FracTerm { parts, len }
    }
}

/// Compensated sum of the terms, reduced into `[0, 1)`.
fn frac_sum(terms: &[FracTerm]) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        for &v in &t.parts[..t.len] {
            let s = sum + v;
            if sum.abs() >= v.abs() {
                comp += (sum - s) + v;
            } else {
                comp += (v - s) + sum;
            }
            sum = s;
        }
    }
    let head = wrap(sum);
    wrap(head + comp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: TorusPoint, b: TorusPoint, tol: f64) -> bool {
        a.distance(&b) <= tol
    }

    #[test]
    fn shift_returns_to_origin() {
        let d = Dynamics::shift(0.25, 0.5);
        assert_eq!(d.iterate(TorusPoint::ORIGIN, 4), TorusPoint::ORIGIN);
    }

    #[test]
    fn skew_shift_period_four() {
        let d = Dynamics::skew_shift(0.5);
        assert_eq!(d.iterate(TorusPoint::ORIGIN, 4), TorusPoint::ORIGIN);
        assert_eq!(skew_closed_form(0.5, TorusPoint::ORIGIN, 4), TorusPoint::ORIGIN);
    }

    #[test]
    fn zero_steps_is_identity() {
        let x = TorusPoint::new(0.123, 0.987);
        assert_eq!(skew_closed_form(0.377, x, 0), x);
        assert_eq!(Dynamics::shift(0.1, 0.2).iterate(x, 0), x);
    }

    #[test]
    fn closed_form_matches_stepping() {
        let x = TorusPoint::new(0.1, 0.2);
        let d = Dynamics::skew_shift(0.3);
        let mut y = x;
        for _ in 0..3 {
            y = d.step(y);
        }
        assert!(close(d.iterate(x, 3), y, 1e-15));
        for _ in 3..10 {
            y = d.step(y);
        }
        assert!(close(skew_closed_form(0.3, x, 10), y, 1e-12));
    }

    #[test]
    fn negative_times_invert() {
        let x = TorusPoint::new(0.31, 0.77);
        for d in [Dynamics::skew_shift(0.618), Dynamics::shift(0.618, 0.414)] {
            let back = d.orbit_point(x, -37);
            assert!(close(d.orbit_point(back, 37), x, 1e-13));
            assert!(close(d.step(d.orbit_point(x, -1)), x, 1e-15));
        }
    }

    #[test]
    fn orbit_fold_constant_and_period_two() {
        let d = Dynamics::shift(0.5, 0.0);
        assert_eq!(orbit_fold(&d, TorusPoint::ORIGIN, 3, |_| 2.5), vec![2.5; 3]);
        assert_eq!(
            orbit_fold(&d, TorusPoint::ORIGIN, 4, |p| p.x1),
            vec![0.5, 0.0, 0.5, 0.0]
        );
    }

    #[test]
    fn large_times_stay_exact_on_dyadics() {
        // ω = 3/8: m(m-1)/2·ω mod 1 is computable by hand for any m
        let m: u64 = (1 << 40) + 3;
        let p = skew_closed_form(0.375, TorusPoint::ORIGIN, m);
        let tri = (m as u128) * (m as u128 - 1) / 2;
        let expect = ((tri * 3) % 8) as f64 / 8.0;
        assert_eq!(p.x1, expect);
        assert_eq!(p.x2, ((m as u128 * 3) % 8) as f64 / 8.0);
    }

    #[test]
    fn wrap_handles_negatives() {
        assert_eq!(wrap(-0.25), 0.75);
        assert_eq!(wrap(-1e-20), 0.0);
        assert_eq!(wrap(3.0), 0.0);
    }
}
