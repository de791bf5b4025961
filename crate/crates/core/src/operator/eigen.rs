//! Eigenvalues by Sturm-sequence bisection and eigenvectors by inverse
//! iteration for `H = tridiag(−1, d, −1)`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng;

/// Maximum inverse-iteration steps per eigenvector.
pub const MAX_INVERSE_STEPS: usize = 50;

/// Bisection depth cap once an eigenvalue is isolated.
pub const MAX_BISECTIONS: usize = 60;

/// Eigenvalues closer than this are treated as one numerical cluster.
pub const CLUSTER_WIDTH: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    pub residuals: Vec<f64>,
}

/// `2 + max|d|`, the scale used for tolerances and residual thresholds.
pub fn spectral_scale(diag: &[f64]) -> f64 {
    2.0 + diag.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// `1e-12·(2 + max|d|)`
pub fn default_tolerance(diag: &[f64]) -> f64 {
    1e-12 * spectral_scale(diag)
}

/// `1e-8·(2 + max|d|)`
pub fn residual_threshold(diag: &[f64]) -> f64 {
    1e-8 * spectral_scale(diag)
}

/// `#{j : E_j < e}`, the number of negative pivots of `H − e = LDLᵀ`.
pub fn sturm_count(diag: &[f64], e: f64) -> usize {
    let pivmin = f64::MIN_POSITIVE;
    let mut count = 0;
    let mut d = 1.0f64;
    for (k, &v) in diag.iter().enumerate() {
        d = if k == 0 { v - e } else { (v - e) - 1.0 / d };
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin bracket `[min d − 2, max d + 2]`.
pub fn gershgorin(diag: &[f64]) -> (f64, f64) {
    let lo = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo - 2.0, hi + 2.0)
}

/// All eigenvalues in increasing order, each bracketed to width `≤ tol`
/// (or to adjacent floats) and returned as the bracket midpoint.
pub fn eigenvalues(diag: &[f64], tol: f64) -> Result<Vec<f64>> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (lo, hi) = gershgorin(diag);
    let (lo, hi) = (lo - tol, hi + tol);
    let mut out = Vec::with_capacity(n);
    // depth-first, left interval first, so values come out sorted
    let mut stack = vec![(lo, hi, 0usize, n, 0usize)];
    while let Some((lo, hi, clo, chi, depth)) = stack.pop() {
        if chi == clo {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let narrow = hi - lo <= tol || mid <= lo || mid >= hi;
        if (chi - clo == 1 && (narrow || depth >= MAX_BISECTIONS)) || (narrow && chi - clo > 1) {
            out.extend(std::iter::repeat_n(mid, chi - clo));
            continue;
        }
        let cm = sturm_count(diag, mid).clamp(clo, chi);
        let next_depth = if chi - clo == 1 { depth + 1 } else { 0 };
        stack.push((mid, hi, cm, chi, next_depth));
        stack.push((lo, mid, clo, cm, next_depth));
    }
    Ok(out)
}

/// LU factorization with partial pivoting of `tridiag(−1, d − e, −1)`.
struct TriLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TriLu {
    fn new(diag: &[f64], e: f64) -> Self {
        let n = diag.len();
        let mut d: Vec<f64> = diag.iter().map(|v| v - e).collect();
        let mut dl = vec![-1.0f64; n.saturating_sub(1)];
        let mut du = vec![-1.0; n.saturating_sub(1)];
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        let floor = f64::EPSILON * spectral_scale(diag);
        for v in &mut d {
            if v.abs() < floor {
                *v = if *v < 0.0 { -floor } else { floor };
            }
        }
        TriLu {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

/// `‖(H − e)v‖₂`
pub fn residual(diag: &[f64], e: f64, v: &[f64]) -> f64 {
    let n = v.len();
    let mut s = 0.0;
    for k in 0..n {
        let mut r = (diag[k] - e) * v[k];
        if k > 0 {
            r -= v[k - 1];
        }
        if k + 1 < n {
            r -= v[k + 1];
        }
        s += r * r;
    }
    s.sqrt()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

/// Flips `v` so its first entry above `√ε·max|v|` is positive.
fn fix_sign(v: &mut [f64]) {
    let mx = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let cut = f64::EPSILON.sqrt() * mx;
    if let Some(first) = v.iter().find(|x| x.abs() > cut) {
        if *first < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
}

/// Inverse iteration at shift `e` from a seeded random start, orthogonalized
/// against `deflate` at every step. Returns the unit vector and its residual.
fn inverse_iterate(diag: &[f64], e: f64, start: u64, deflate: &[&Vec<f64>]) -> Result<(Vec<f64>, f64)> {
    let n = diag.len();
    let lu = TriLu::new(diag, e);
    let threshold = residual_threshold(diag);
    let mut r = rng::stream(0x1e5e_ed00, start);
    let mut v: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
    normalize(&mut v);
    let mut res = f64::INFINITY;
    for _ in 0..MAX_INVERSE_STEPS {
        lu.solve(&mut v);
        for w in deflate {
            let dot: f64 = v.iter().zip(w.iter()).map(|(a, b)| a * b).sum();
            for (a, b) in v.iter_mut().zip(w.iter()) {
                *a -= dot * b;
            }
        }
        if normalize(&mut v) == 0.0 || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NoConvergence(format!(
                "inverse iteration at E = {e} collapsed"
            )));
        }
        res = residual(diag, e, &v);
        if res <= threshold {
            fix_sign(&mut v);
            return Ok((v, res));
        }
    }
    Err(Error::NoConvergence(format!(
        "inverse iteration at E = {e} stalled with residual {res:e}"
    )))
}

/// Unit eigenvector for an eigenvalue approximation `e`, with its residual.
pub fn eigenvector(diag: &[f64], e: f64) -> Result<(Vec<f64>, f64)> {
    if diag.is_empty() {
        return Err(Error::Domain("empty window".into()));
    }
    inverse_iterate(diag, e, 0, &[])
}

/// Eigenvalues, and optionally eigenvectors with residuals. Without vectors
/// the residual column holds the bracket tolerance.
pub fn decompose(diag: &[f64], tol: f64, vectors: bool) -> Result<SpectralDecomposition> {
    let eigenvalues = eigenvalues(diag, tol)?;
    if !vectors {
        return Ok(SpectralDecomposition {
            residuals: vec![tol; eigenvalues.len()],
            eigenvalues,
            eigenvectors: None,
        });
    }
    let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(eigenvalues.len());
    let mut residuals = Vec::with_capacity(eigenvalues.len());
    let mut cluster_start = 0;
    for (j, &e) in eigenvalues.iter().enumerate() {
        if j > 0 && e - eigenvalues[j - 1] >= CLUSTER_WIDTH {
            cluster_start = j;
        }
        let deflate: Vec<&Vec<f64>> = vecs[cluster_start..j].iter().collect();
        let (v, r) = inverse_iterate(diag, e, j as u64, &deflate)?;
        vecs.push(v);
        residuals.push(r);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: Some(vecs),
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free(n: usize) -> Vec<f64> {
        (1..=n)
            .map(|j| -2.0 * (j as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect()
    }

    #[test]
    fn two_by_two_zero_diagonal() {
        let e = eigenvalues(&[0.0, 0.0], 1e-14).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-13 && (e[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn free_spectrum_closed_form() {
        for n in [5, 50, 500] {
            let d = vec![0.0; n];
            let e = eigenvalues(&d, default_tolerance(&d)).unwrap();
            for (a, b) in e.iter().zip(free(n)) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    /// Bisection on the characteristic polynomial through its own sign
    /// changes on a fine grid, independent of the Sturm count.
    #[test]
    fn free_five_by_polynomial_roots() {
        let d = [0.0; 5];
        let p = |e: f64| super::super::determinant::determinant(
            &d.iter().map(|v| v - e).collect::<Vec<_>>(),
            super::super::Kernel::EXACT,
        )
        .value();
        let mut roots = Vec::new();
        let grid: Vec<f64> = (0..=4001).map(|i| -2.1 + 4.2 * i as f64 / 4001.0).collect();
        for w in grid.windows(2) {
            let (mut a, mut b) = (w[0], w[1]);
            if p(a) * p(b) < 0.0 {
                for _ in 0..100 {
                    let m = 0.5 * (a + b);
                    if p(a) * p(m) <= 0.0 {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                roots.push(0.5 * (a + b));
            }
        }
        let e = eigenvalues(&d, 1e-14).unwrap();
        assert_eq!(roots.len(), 5);
        for (a, b) in e.iter().zip(&roots) {
            assert!((a - b).abs() < 1e-12);
        }
        let s3 = 3f64.sqrt();
        for (a, b) in e.iter().zip([-s3, -1.0, 0.0, 1.0, s3]) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn eigenvectors_of_free_operator() {
        let (v, r) = eigenvector(&[0.0, 0.0], -1.0).unwrap();
        let h = 0.5f64.sqrt();
        assert!((v[0] - h).abs() < 1e-12 && (v[1] - h).abs() < 1e-12 && r < 1e-10);
        let (v, _) = eigenvector(&[0.0; 5], 0.0).unwrap();
        let s = 1.0 / 3f64.sqrt();
        for (a, b) in v.iter().zip([s, 0.0, -s, 0.0, s]) {
            assert!((a - b).abs() < 1e-10, "{v:?}");
        }
    }

    #[test]
    fn decomposition_is_orthonormal() {
        let d: Vec<f64> = (0..80).map(|k| 30.0 * ((k * k) as f64 * 0.618).cos()).collect();
        let dec = decompose(&d, default_tolerance(&d), true).unwrap();
        let vecs = dec.eigenvectors.unwrap();
        let thr = residual_threshold(&d);
        assert!(dec.residuals.iter().all(|r| *r <= thr));
        for i in 0..vecs.len() {
            for j in i..vecs.len() {
                let dot: f64 = vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a * b).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-6, "{i} {j} {dot}");
            }
        }
        assert!(dec.eigenvalues.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn degenerate_diagonal_blocks() {
        // two decoupled-looking identical sites far apart
        let mut d = vec![1000.0; 41];
        d[0] = 0.0;
        d[40] = 0.0;
        let dec = decompose(&d, default_tolerance(&d), true).unwrap();
        let vecs = dec.eigenvectors.unwrap();
        let dot: f64 = vecs[0].iter().zip(&vecs[1]).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-8);
    }
}
