//! Transfer-matrix products `M_{[a,b]} = A_b ⋯ A_a`, `A_m = [[V_m − E, −1], [1, 0]]`.
//!
//! Entries are accumulated directly and renormalized by a power of two after
//! every step, which is exact. The determinant is tracked through a parallel
//! `Q·R` factorization of the same product, `Q` a rotation and `R` upper
//! triangular, as the product of the per-step diagonal factors of `R`; this
//! never cancels, unlike `e₁₁e₂₂ − e₁₂e₂₁` once the norm is large.

use super::logscaled::{frexp, ldexp, LogScaledMatrix, SignedLogDet};
use super::{Fault, Kernel};

/// The transfer product for the shifted diagonal `c_m = V_m − E`, taken in
/// the order `c[0]` first.
pub fn transfer_product(c: &[f64], kernel: Kernel) -> LogScaledMatrix {
    if kernel.fault == Some(Fault::DroppedRescale) {
        return naive_product(c);
    }
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    let mut exp = 0i64;
    let (mut qc, mut qs) = (1.0f64, 0.0f64);
    let mut det = SignedLogDet::ONE;
    for &ci in c {
        m = [
            [ci * m[0][0] - m[1][0], ci * m[0][1] - m[1][1]],
            [m[0][0], m[0][1]],
        ];
        let mx = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        let (_, k) = frexp(mx);
        m = m.map(|row| row.map(|v| ldexp(v, -k)));
        exp += i64::from(k);

        let b11 = ci * qc - qs;
        let b12 = -ci * qs - qc;
        let (b21, b22) = (qc, -qs);
        let r11 = b11.hypot(b21);
        let r22 = (b11 * b22 - b21 * b12) / r11;
        qc = b11 / r11;
        qs = b21 / r11;
        det = det.mul(SignedLogDet::from_value(r11 * r22));
    }
    LogScaledMatrix::from_scaled(m, exp, det)
}

/// `log‖M_ℓ‖` of the leading products for each `ℓ` in `checkpoints`
/// (increasing, each `≤ c.len()`).
pub fn log_norm_profile(c: &[f64], checkpoints: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    let mut exp = 0i64;
    while next.peek() == Some(&&0) {
        out.push(0.0);
        next.next();
    }
    for (k, &ci) in c.iter().enumerate() {
        if next.peek().is_none() {
            break;
        }
        m = [
            [ci * m[0][0] - m[1][0], ci * m[0][1] - m[1][1]],
            [m[0][0], m[0][1]],
        ];
        let mx = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        let (_, e) = frexp(mx);
        m = m.map(|row| row.map(|v| ldexp(v, -e)));
        exp += i64::from(e);
        while next.peek() == Some(&&(k + 1)) {
            out.push(LogScaledMatrix::from_scaled(m, exp, SignedLogDet::ONE).log_norm());
            next.next();
        }
    }
    out
}

fn naive_product(c: &[f64]) -> LogScaledMatrix {
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    for &ci in c {
        m = [
            [ci * m[0][0] - m[1][0], ci * m[0][1] - m[1][1]],
            [m[0][0], m[0][1]],
        ];
    }
    let det = SignedLogDet::from_value(m[0][0] * m[1][1] - m[0][1] * m[1][0]);
    LogScaledMatrix::unscaled(m, det)
}
