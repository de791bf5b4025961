//! Overflow-safe representations of large determinants and 2×2 products.

use std::f64::consts::LN_2;

use serde::Serialize;

const TWO54: f64 = 18_014_398_509_481_984.0;

/// Splits finite nonzero `x` as `m·2^k` with `|m| ∈ [1/2, 1)`. Zero and
/// non-finite values come back unchanged with `k = 0`.
pub(crate) fn frexp(x: f64) -> (f64, i32) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    if exp == 0 {
        let (m, k) = frexp(x * TWO54);
        return (m, k - 54);
    }
    let m = f64::from_bits((bits & !(0x7ff_u64 << 52)) | (1022_u64 << 52));
    (m, exp - 1022)
}

/// `x·2^k`, exact unless the result leaves the normal range.
pub(crate) fn ldexp(mut x: f64, mut k: i32) -> f64 {
    while k > 1000 {
        x *= 2f64.powi(1000);
        k -= 1000;
    }
    while k < -1000 {
        x *= 2f64.powi(-1000);
        k += 1000;
    }
    x * 2f64.powi(k)
}

/// `sign·exp(log_abs)`; `sign = 0` carries `log_abs = −∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignedLogDet {
    pub sign: i8,
    pub log_abs: f64,
}

impl SignedLogDet {
    pub const ONE: SignedLogDet = SignedLogDet {
        sign: 1,
        log_abs: 0.0,
    };
    pub const ZERO: SignedLogDet = SignedLogDet {
        sign: 0,
        log_abs: f64::NEG_INFINITY,
    };

    pub fn from_value(v: f64) -> Self {
        Self::from_scaled(v, 0)
    }

    /// The value `v·2^k`.
    pub(crate) fn from_scaled(v: f64, k: i64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            SignedLogDet {
                sign: if v > 0.0 { 1 } else { -1 },
                log_abs: v.abs().ln() + k as f64 * LN_2,
            }
        }
    }

    /// The represented value; overflows to `±∞` or underflows to `0`.
    pub fn value(&self) -> f64 {
        f64::from(self.sign) * self.log_abs.exp()
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn neg(self) -> Self {
        SignedLogDet {
            sign: -self.sign,
            ..self
        }
    }

    pub fn mul(self, other: Self) -> Self {
        if self.sign == 0 || other.sign == 0 {
            return Self::ZERO;
        }
        SignedLogDet {
            sign: self.sign * other.sign,
            log_abs: self.log_abs + other.log_abs,
        }
    }

    /// `None` when dividing by zero.
    pub fn div(self, other: Self) -> Option<Self> {
        if other.sign == 0 {
            return None;
        }
        if self.sign == 0 {
            return Some(Self::ZERO);
        }
        Some(SignedLogDet {
            sign: self.sign * other.sign,
            log_abs: self.log_abs - other.log_abs,
        })
    }

    /// `|log|a| − log|b|| / max(1, |log|b||)`, or `∞` when exactly one is
    /// zero. Two zeros agree.
    pub fn relative_log_gap(&self, reference: &Self) -> f64 {
        match (self.sign == 0, reference.sign == 0) {
            (true, true) => 0.0,
            (false, false) => {
                (self.log_abs - reference.log_abs).abs() / reference.log_abs.abs().max(1.0)
            }
            _ => f64::INFINITY,
        }
    }

    /// `|a/b − 1|` for same-sign values, `∞` on a sign mismatch.
    pub fn relative_error(&self, reference: &Self) -> f64 {
        if self.sign != reference.sign {
            return f64::INFINITY;
        }
        if self.sign == 0 {
            return 0.0;
        }
        (self.log_abs - reference.log_abs).exp_m1().abs()
    }
}

/// `exp(log_scale)·entries` with `max|entry| ∈ [1/2, 2]`, plus a separately
/// accumulated determinant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogScaledMatrix {
    pub entries: [[f64; 2]; 2],
    pub log_scale: f64,
    det: SignedLogDet,
}

impl LogScaledMatrix {
    pub const IDENTITY: LogScaledMatrix = LogScaledMatrix {
        entries: [[1.0, 0.0], [0.0, 1.0]],
        log_scale: 0.0,
        det: SignedLogDet::ONE,
    };

    /// Normalizes `entries·2^k` so the largest entry lies in `[1/2, 1)`.
    pub(crate) fn from_scaled(entries: [[f64; 2]; 2], k: i64, det: SignedLogDet) -> Self {
        let mx = entries.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        let (_, e) = frexp(mx);
        let entries = entries.map(|row| row.map(|v| ldexp(v, -e)));
        LogScaledMatrix {
            entries,
            log_scale: (k + i64::from(e)) as f64 * LN_2,
            det,
        }
    }

    /// Unnormalized entries with `log_scale = 0`.
    pub(crate) fn unscaled(entries: [[f64; 2]; 2], det: SignedLogDet) -> Self {
        LogScaledMatrix {
            entries,
            log_scale: 0.0,
            det,
        }
    }

    /// A plain matrix; its determinant is taken from the entries.
    pub fn from_matrix(m: [[f64; 2]; 2]) -> Self {
        let det = SignedLogDet::from_value(m[0][0] * m[1][1] - m[0][1] * m[1][0]);
        Self::from_scaled(m, 0, det)
    }

    /// Entry `(i, j)` of the represented matrix in sign/log form.
    pub fn entry(&self, i: usize, j: usize) -> SignedLogDet {
        let v = self.entries[i][j];
        let mut out = SignedLogDet::from_value(v);
        if out.sign != 0 {
            out.log_abs += self.log_scale;
        }
        out
    }

    /// The represented matrix; may overflow.
    pub fn represented(&self) -> [[f64; 2]; 2] {
        let s = self.log_scale.exp();
        self.entries.map(|row| row.map(|v| v * s))
    }

    /// The determinant tracked alongside the product. For transfer products
    /// it is accumulated from per-step triangular factors, so it does not
    /// suffer the cancellation of `e₁₁e₂₂ − e₁₂e₂₁` at large norms.
    pub fn determinant(&self) -> SignedLogDet {
        self.det
    }

    /// `log` of the spectral norm.
    pub fn log_norm(&self) -> f64 {
        let [[a, b], [c, d]] = self.entries;
        let s = a * a + b * b + c * c + d * d;
        let det = a * d - b * c;
        let disc = ((s * s - 4.0 * det * det).max(0.0)).sqrt();
        let sigma = (0.5 * (s + disc)).sqrt();
        sigma.ln() + self.log_scale
    }

    /// `self·rhs`, with the determinants multiplied.
    pub fn mul(&self, rhs: &LogScaledMatrix) -> LogScaledMatrix {
        let (x, y) = (self.entries, rhs.entries);
        let mut p = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                p[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        let mut out = Self::from_scaled(p, 0, self.det.mul(rhs.det));
        out.log_scale += self.log_scale + rhs.log_scale;
        out
    }

    /// `‖self − other‖_max / max(‖self‖_max, ‖other‖_max)` on represented
    /// values, evaluated in scaled form.
    pub fn relative_distance(&self, other: &LogScaledMatrix) -> f64 {
        let top = self.log_scale.max(other.log_scale);
        let a = self.entries.map(|r| r.map(|v| v * (self.log_scale - top).exp()));
        let b = other.entries.map(|r| r.map(|v| v * (other.log_scale - top).exp()));
        let mut diff = 0.0f64;
        let mut size = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                diff = diff.max((a[i][j] - b[i][j]).abs());
                size = size.max(a[i][j].abs()).max(b[i][j].abs());
            }
        }
        if size == 0.0 {
            0.0
        } else {
            diff / size
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frexp_ldexp_round_trip() {
        for x in [1.0, 0.75, -3.5, 1e300, -1e-310, 5e-324, 123456.789] {
            let (m, k) = frexp(x);
            assert!((0.5..1.0).contains(&m.abs()), "{x}: {m}");
            assert_eq!(ldexp(m, k), x);
        }
        assert_eq!(frexp(0.0), (0.0, 0));
    }

    #[test]
    fn signed_log_arithmetic() {
        let a = SignedLogDet::from_value(-6.0);
        let b = SignedLogDet::from_value(2.0);
        assert!((a.div(b).unwrap().value() + 3.0).abs() < 1e-15);
        assert!((a.mul(b).value() + 12.0).abs() < 1e-14);
        assert!(a.div(SignedLogDet::ZERO).is_none());
        assert_eq!(SignedLogDet::ZERO.relative_log_gap(&SignedLogDet::ZERO), 0.0);
        assert_eq!(a.relative_error(&b), f64::INFINITY);
    }

    #[test]
    fn scaled_matrix_bounds_and_value() {
        let m = LogScaledMatrix::from_matrix([[4.0, -3.0], [3.0, -2.0]]);
        let mx = m.entries.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!((0.5..=2.0).contains(&mx));
        let r = m.represented();
        assert!((r[0][0] - 4.0).abs() < 1e-14 && (r[1][1] + 2.0).abs() < 1e-14);
        assert!((m.determinant().value() - 1.0).abs() < 1e-15);
        assert!((m.log_norm() - (10.0f64.sqrt() + 3.0).ln()).abs() < 1e-12);
    }
}
