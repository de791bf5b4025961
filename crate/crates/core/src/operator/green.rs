//! Green function `G = (H − E)^{−1}` of a window, by Cramer's rule from
//! leading and trailing determinants, and by a twisted factorization used
//! as an independent oracle.

use super::determinant::{determinant, prefix_determinants, suffix_determinants};
use super::logscaled::SignedLogDet;
use super::{Fault, Kernel};
use crate::error::{Error, Result};

/// Leading and trailing determinants of one shifted diagonal, enough to
/// produce any Green entry in `O(1)`.
#[derive(Debug, Clone)]
pub struct GreenTable {
    prefix: Vec<SignedLogDet>,
    suffix: Vec<SignedLogDet>,
    total: SignedLogDet,
    off_by_one: bool,
}

impl GreenTable {
    /// `c` is the shifted diagonal `V_n − E`.
    pub fn new(c: &[f64], kernel: Kernel) -> Result<Self> {
        let prefix = prefix_determinants(c, kernel);
        let suffix = suffix_determinants(c, kernel);
        let total = prefix[c.len()];
        if total.is_zero() || !total.log_abs.is_finite() {
            return Err(Error::Singular(
                "window determinant vanishes: E is in the spectrum".into(),
            ));
        }
        Ok(GreenTable {
            prefix,
            suffix,
            total,
            off_by_one: kernel.fault == Some(Fault::CramerOffByOne),
        })
    }

    pub fn len(&self) -> usize {
        self.prefix.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `G(i, j)` for local indices `0 ≤ i, j < n`:
    /// `f(c[..min]) · f(c[max+1..]) / f(c)`, symmetric.
    pub fn entry(&self, i: usize, j: usize) -> SignedLogDet {
        let (m, n) = if i <= j { (i, j) } else { (j, i) };
        let left = if self.off_by_one {
            self.prefix[m + 1]
        } else {
            self.prefix[m]
        };
        let num = left.mul(self.suffix[n + 1]);
        num.div(self.total).expect("nonzero total checked at construction")
    }
}

/// Single Cramer entry for local indices.
pub fn cramer_entry(c: &[f64], i: usize, j: usize, kernel: Kernel) -> Result<SignedLogDet> {
    let n = c.len();
    if i >= n || j >= n {
        return Err(Error::Domain(format!("entry ({i},{j}) outside window of length {n}")));
    }
    let (m, k) = (i.min(j), i.max(j));
    let total = determinant(c, kernel);
    if total.is_zero() {
        return Err(Error::Singular(
            "window determinant vanishes: E is in the spectrum".into(),
        ));
    }
    let left_end = if kernel.fault == Some(Fault::CramerOffByOne) {
        m + 1
    } else {
        m
    };
    let num = determinant(&c[..left_end], kernel).mul(determinant(&c[k + 1..], kernel));
    Ok(num.div(total).expect("nonzero"))
}

/// Forward and backward pivots of the two-sided factorization.
#[derive(Debug, Clone)]
pub struct TwistedFactorization {
    c: Vec<f64>,
    /// `p_k = c_k − 1/p_{k−1}`
    fwd: Vec<f64>,
    /// `q_k = c_k − 1/q_{k+1}`
    bwd: Vec<f64>,
}

impl TwistedFactorization {
    pub fn new(c: &[f64]) -> Self {
        let n = c.len();
        let tiny = f64::MIN_POSITIVE;
        let guard = |v: f64| if v == 0.0 { tiny } else { v };
        let mut fwd = vec![0.0; n];
        let mut bwd = vec![0.0; n];
        for k in 0..n {
            fwd[k] = guard(if k == 0 { c[0] } else { c[k] - 1.0 / fwd[k - 1] });
        }
        for k in (0..n).rev() {
            bwd[k] = guard(if k + 1 == n { c[k] } else { c[k] - 1.0 / bwd[k + 1] });
        }
        TwistedFactorization {
            c: c.to_vec(),
            fwd,
            bwd,
        }
    }

    /// `γ_m = c_m − 1/p_{m−1} − 1/q_{m+1}`, the twisted pivot; `G(m,m) = 1/γ_m`.
    pub fn twist(&self, m: usize) -> f64 {
        let n = self.c.len();
        let mut g = self.c[m];
        if m > 0 {
            g -= 1.0 / self.fwd[m - 1];
        }
        if m + 1 < n {
            g -= 1.0 / self.bwd[m + 1];
        }
        g
    }

    /// Column `m` of `(H − E)^{−1}` in sign/log form.
    pub fn column(&self, m: usize) -> Result<Vec<SignedLogDet>> {
        let n = self.c.len();
        if m >= n {
            return Err(Error::Domain(format!("column {m} outside window of length {n}")));
        }
        let gamma = self.twist(m);
        if gamma == 0.0 || !gamma.is_finite() {
            return Err(Error::Singular(format!(
                "twisted pivot {gamma} at {m}: E is in the spectrum"
            )));
        }
        let mut out = vec![SignedLogDet::ZERO; n];
        let diag = SignedLogDet::from_value(1.0 / gamma);
        out[m] = diag;
        let mut cur = diag;
        for k in m + 1..n {
            cur = cur.div(SignedLogDet::from_value(self.bwd[k])).unwrap_or(SignedLogDet::ZERO);
            out[k] = cur;
        }
        let mut cur = diag;
        for k in (0..m).rev() {
            cur = cur.div(SignedLogDet::from_value(self.fwd[k])).unwrap_or(SignedLogDet::ZERO);
            out[k] = cur;
        }
        Ok(out)
    }

    /// `‖(H − E)u − e_m‖_∞` for a column in plain floating point.
    pub fn column_residual(&self, m: usize, col: &[SignedLogDet]) -> f64 {
        let u: Vec<f64> = col.iter().map(|v| v.value()).collect();
        let n = u.len();
        (0..n)
            .map(|k| {
                let mut r = self.c[k] * u[k];
                if k > 0 {
                    r -= u[k - 1];
                }
                if k + 1 < n {
                    r -= u[k + 1];
                }
                if k == m {
                    r -= 1.0;
                }
                r.abs()
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_site() {
        let g = cramer_entry(&[0.25], 0, 0, Kernel::EXACT).unwrap();
        assert!((g.value() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn two_by_two_zero() {
        let t = GreenTable::new(&[0.0, 0.0], Kernel::EXACT).unwrap();
        assert_eq!(t.entry(0, 1).value(), -1.0);
        assert_eq!(t.entry(1, 0).value(), -1.0);
        assert_eq!(t.entry(0, 0).sign, 0);
        let tw = TwistedFactorization::new(&[0.0, 0.0]);
        let col = tw.column(1).unwrap();
        assert_eq!(col[0].value(), -1.0);
        assert!(col[1].value().abs() < 1e-300);
    }

    #[test]
    fn large_constant_diagonal() {
        let c = vec![1000.0; 20];
        let tw = TwistedFactorization::new(&c);
        let g = tw.column(0).unwrap()[0].value();
        assert!((g - 1e-3).abs() <= 2e-6);
    }

    #[test]
    fn singular_window_is_reported() {
        assert!(matches!(GreenTable::new(&[0.0], Kernel::EXACT), Err(Error::Singular(_))));
        assert!(matches!(
            TwistedFactorization::new(&[0.0]).column(0),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn cramer_matches_twisted_and_residual_small() {
        let c: Vec<f64> = (0..60).map(|k| 3.0 * ((k as f64) * 1.234).sin() + 0.1).collect();
        let t = GreenTable::new(&c, Kernel::EXACT).unwrap();
        let tw = TwistedFactorization::new(&c);
        for m in 0..60 {
            let col = tw.column(m).unwrap();
            assert!(tw.column_residual(m, &col) < 1e-10);
            for k in 0..60 {
                assert!(t.entry(k, m).relative_error(&col[k]) < 1e-8);
            }
        }
    }
}
