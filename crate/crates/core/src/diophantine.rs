//! Continued fractions, `‖k·ω‖` minima, Diophantine classification of
//! frequencies and frequency-grid scans.
//!
//! Partial quotients are computed on an exact rational shadow of the
//! frequency (denominator `2^200`), so they stay correct far beyond the
//! `q_s ≈ 10^8` range where plain double-precision Euclid breaks down.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Bits of the dyadic rational shadow used for continued fractions.
pub const SHADOW_BITS: u32 = 200;

/// Expansion stops before any `q_s` exceeds this value.
pub const MAX_DENOMINATOR: u64 = 1 << 53;

/// Distance from `t` to the nearest integer, `‖t‖ ∈ [0, 1/2]`.
#[inline]
pub fn torus_norm(t: f64) -> f64 {
    (t - t.round()).abs()
}

/// A frequency: `ω ∈ T` or `ω ∈ T²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Frequency {
    One(f64),
    Two([f64; 2]),
}

impl Frequency {
    pub fn dim(&self) -> usize {
        match self {
            Frequency::One(_) => 1,
            Frequency::Two(_) => 2,
        }
    }

    /// `k·ω` for an integer vector (the second component is ignored in 1-D).
    pub fn dot(&self, k: [i64; 2]) -> f64 {
        match *self {
            Frequency::One(w) => k[0] as f64 * w,
            Frequency::Two(w) => k[0] as f64 * w[0] + k[1] as f64 * w[1],
        }
    }

    /// `‖k·ω‖` with each product reduced mod 1 before summing, which keeps
    /// full precision for large `k`.
    pub fn komega(&self, k: [i64; 2]) -> f64 {
        match *self {
            Frequency::One(w) => torus_norm(frac_prod(k[0], w)),
            Frequency::Two(w) => torus_norm(frac_prod(k[0], w[0]) + frac_prod(k[1], w[1])),
        }
    }
}

#[inline]
fn frac_prod(k: i64, w: f64) -> f64 {
    let p = k as f64 * w;
    let e = (k as f64).mul_add(w, -p);
    (p - p.round()) + e
}

/// Canonical representatives of `±k` with `1 ≤ max(|k₁|,|k₂|) ≤ n`,
/// ordered by max-norm, then `k₁`, then `|k₂|` (positive first).
fn canonical_ks(dim: usize, n: i64) -> Vec<[i64; 2]> {
    let mut out = Vec::new();
    if dim == 1 {
        out.extend((1..=n).map(|k| [k, 0]));
        return out;
    }
    for r in 1..=n {
        for k1 in 0..=r {
            let mut k2s: Vec<i64> = Vec::new();
            for m in 0..=r {
                for s in [m, -m] {
                    if k1 == 0 && s <= 0 {
                        continue;
                    }
                    if k1.max(s.abs()) != r || k2s.contains(&s) {
                        continue;
                    }
                    k2s.push(s);
                }
            }
            out.extend(k2s.into_iter().map(|k2| [k1, k2]));
        }
    }
    out
}

/// Canonical representatives of `±k` with `1 ≤ |k₁| + |k₂| ≤ n`.
fn canonical_ks_l1(dim: usize, n: i64) -> impl Iterator<Item = [i64; 2]> {
    let two_d = dim == 2;
    (0..=n).flat_map(move |k1| {
        let rest = if two_d { n - k1 } else { 0 };
        (-rest..=rest)
            .filter(move |&k2| (k1 > 0 || k2 > 0) && k1 + k2.abs() >= 1)
            .map(move |k2| [k1, k2])
    })
}

/// Continued-fraction expansion `ω = [a₁, a₂, …]` with convergents `p_s/q_s`.
///
/// Index `s` is 1-based, matching `q_s = a_s q_{s−1} + q_{s−2}`,
/// `q₀ = 1`, `q_{−1} = 0`, `p₀ = 0`, `p_{−1} = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuedFraction {
    pub omega: f64,
    pub partial_quotients: Vec<u64>,
    pub convergents: Vec<(u64, u64)>,
    /// The shadow was rational and the expansion ended exactly.
    pub terminated: bool,
}

impl ContinuedFraction {
    /// Number of stored levels.
    pub fn depth(&self) -> usize {
        self.partial_quotients.len()
    }

    /// `a_s`, `s ≥ 1`.
    pub fn a(&self, s: usize) -> Option<u64> {
        s.checked_sub(1).and_then(|i| self.partial_quotients.get(i).copied())
    }

    /// `q_s`, defined for `s ≥ 0` (`q₀ = 1`).
    pub fn q(&self, s: usize) -> Option<u64> {
        if s == 0 {
            return Some(1);
        }
        self.convergents.get(s - 1).map(|c| c.1)
    }

    /// `p_s`, defined for `s ≥ 0` (`p₀ = 0`).
    pub fn p(&self, s: usize) -> Option<u64> {
        if s == 0 {
            return Some(0);
        }
        self.convergents.get(s - 1).map(|c| c.0)
    }

    /// Expansion of an exact rational `num/den ∈ (0, 1)`.
    pub fn from_ratio(omega: f64, num: BigUint, den: BigUint, max_depth: usize) -> Self {
        let mut num = num;
        let mut den = den;
        let mut partial_quotients = Vec::new();
        let mut convergents = Vec::new();
        let (mut p_prev, mut p) = (1u128, 0u128);
        let (mut q_prev, mut q) = (0u128, 1u128);
        let mut terminated = false;
        while partial_quotients.len() < max_depth {
            if num.is_zero() {
                terminated = true;
                break;
            }
            let (a_big, r) = den.div_rem(&num);
            let a = match a_big.to_u64() {
                Some(a) if (a as u128) <= MAX_DENOMINATOR as u128 => a as u128,
                _ => break,
            };
            let q_next = a * q + q_prev;
            if q_next > MAX_DENOMINATOR as u128 {
                break;
            }
            let p_next = a * p + p_prev;
            partial_quotients.push(a as u64);
            convergents.push((p_next as u64, q_next as u64));
            (p_prev, p) = (p, p_next);
            (q_prev, q) = (q, q_next);
            den = num;
            num = r;
        }
        if num.is_zero() {
            terminated = true;
        }
        ContinuedFraction {
            omega,
            partial_quotients,
            convergents,
            terminated,
        }
    }
}

/// Continued fraction of a double, computed on its dyadic shadow
/// `round(ω·2^200)/2^200` (exact for every double above `2^-147`).
pub fn continued_fraction(omega: f64, max_depth: usize) -> Result<ContinuedFraction> {
    if !(omega > 0.0 && omega < 1.0) {
        return Err(Error::Domain(format!("frequency {omega} not in (0,1)")));
    }
    let num = dyadic_shadow(omega);
    let den = BigUint::one() << SHADOW_BITS;
    Ok(ContinuedFraction::from_ratio(omega, num, den, max_depth))
}

fn dyadic_shadow(omega: f64) -> BigUint {
    let bits = omega.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    let shift = e + SHADOW_BITS as i64;
    let m = BigUint::from(mant);
    if shift >= 0 {
        m << shift as usize
    } else {
        let s = (-shift) as usize;
        let half = BigUint::one() << (s - 1);
        (m + half) >> s
    }
}

/// Quadratic irrationals with exactly known expansions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NamedFrequency {
    /// `(√5 − 1)/2`, all partial quotients 1.
    Golden,
    /// `golden² = (3 − √5)/2`.
    GoldenSquared,
    /// `√2 − 1`, all partial quotients 2.
    Silver,
    /// `(√13 − 3)/2`, all partial quotients 3.
    Bronze,
}

impl NamedFrequency {
    pub const ALL: [NamedFrequency; 4] = [
        NamedFrequency::Bronze,
        NamedFrequency::Golden,
        NamedFrequency::GoldenSquared,
        NamedFrequency::Silver,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            NamedFrequency::Golden => "golden",
            NamedFrequency::GoldenSquared => "golden2",
            NamedFrequency::Silver => "silver",
            NamedFrequency::Bronze => "bronze",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    /// `(√d − b)/c` data.
    fn surd(&self) -> (u64, u64, u64, bool) {
        // (d, b, c, complement): value = (√d − b)/c, or 1 − that when complement
        match self {
            NamedFrequency::Golden => (5, 1, 2, false),
            NamedFrequency::GoldenSquared => (5, 1, 2, true),
            NamedFrequency::Silver => (2, 1, 1, false),
            NamedFrequency::Bronze => (13, 3, 2, false),
        }
    }

    pub fn value(&self) -> f64 {
        let (d, b, c, comp) = self.surd();
        let v = ((d as f64).sqrt() - b as f64) / c as f64;
        if comp {
            1.0 - v
        } else {
            v
        }
    }

    /// Numerator of the `2^200` shadow, via an integer square root.
    pub fn shadow(&self) -> BigUint {
        let (d, b, c, comp) = self.surd();
        let one = BigUint::one() << SHADOW_BITS;
        let root = (BigUint::from(d) << (2 * SHADOW_BITS as usize)).sqrt();
        let v = (root - BigUint::from(b) * &one) / BigUint::from(c);
        if comp {
            one - v
        } else {
            v
        }
    }

    pub fn continued_fraction(&self, max_depth: usize) -> ContinuedFraction {
        ContinuedFraction::from_ratio(
            self.value(),
            self.shadow(),
            BigUint::one() << SHADOW_BITS,
            max_depth,
        )
    }
}

/// Lower bound `a_{s+1}/q_{s+1}` on `‖mω‖` for `1 ≤ m < q_s`, using the
/// smallest admissible `s ≥ 1`.
pub fn komega_lower_bound(cf: &ContinuedFraction, m: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    let s = (1..cf.depth())
        .find(|&s| cf.q(s).is_some_and(|q| m < q))
        .ok_or_else(|| Error::Domain(format!("m = {m} beyond stored convergents")))?;
    komega_lower_bound_at(cf, m, s)
}

/// Lower bound `a_{s+1}/q_{s+1}` for an explicitly chosen level `s`.
pub fn komega_lower_bound_at(cf: &ContinuedFraction, m: u64, s: usize) -> Result<f64> {
    let q_s = cf
        .q(s)
        .filter(|_| s >= 1)
        .ok_or_else(|| Error::Domain(format!("level {s} not stored")))?;
    if m == 0 || m >= q_s {
        return Err(Error::Domain(format!("need 1 <= m < q_{s} = {q_s}, got m = {m}")));
    }
    match (cf.a(s + 1), cf.q(s + 1)) {
        (Some(a), Some(q)) => Ok(a as f64 / q as f64),
        _ => Err(Error::Domain(format!("level {} not stored", s + 1))),
    }
}

/// `min_{1 ≤ |k| ≤ n} ‖k·ω‖` with its minimizer (max-norm on `k` in 2-D).
pub fn min_komega(omega: Frequency, n: u64) -> ([i64; 2], f64) {
    let ks = canonical_ks(omega.dim(), n as i64);
    let mut best = (ks[0], omega.komega(ks[0]));
    for &k in &ks[1..] {
        let v = omega.komega(k);
        if v < best.1 {
            best = (k, v);
        }
    }
    best
}

/// A violated inequality `‖k·ω‖ < threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub k: [i64; 2],
    pub norm: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Flag {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Flag {
    fn from_witness(witness: Option<Witness>) -> Self {
        Flag {
            holds: witness.is_none(),
            witness,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifyParams {
    pub c: f64,
    pub a: f64,
    pub n: u64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub eps: f64,
    /// Cutoff on `|k₁| + |k₂|` for the full Diophantine condition.
    pub full_cutoff: u64,
}

impl ClassifyParams {
    pub const DEFAULT_CUTOFF_1D: u64 = 100_000;
    pub const DEFAULT_CUTOFF_2D: u64 = 1_000;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyClass {
    /// `‖k·ω‖ > c(|k₁|+|k₂|)^{−A}`, checked for `|k| ≤ verified_up_to`.
    pub dioph_full: Flag,
    pub verified_up_to: u64,
    /// `‖k·ω‖ ≥ N^{−γ₁}` for `1 ≤ |k| ≤ N^{γ₂}`.
    pub dioph_window: Flag,
    /// `‖k·ω‖ ≥ c N^{−(1+ε)}` for `1 ≤ |k| ≤ N`.
    pub in_t_cen: Flag,
}

/// First `k` (in enumeration order) violating `‖k·ω‖ ≥ threshold(|k|)`,
/// with `strict` selecting `>` instead of `≥`.
fn find_violation<F>(omega: Frequency, radius: u64, strict: bool, threshold: F) -> Option<Witness>
where
    F: Fn(i64) -> f64 + Sync,
{
    let ks: Vec<[i64; 2]> = canonical_ks_l1(omega.dim(), radius as i64).collect();
    ks.par_iter()
        .find_first(|k| {
            let norm = omega.komega(**k);
            let t = threshold(k[0].abs() + k[1].abs());
            if strict {
                norm <= t
            } else {
                norm < t
            }
        })
        .map(|&k| Witness {
            k,
            norm: omega.komega(k),
            threshold: threshold(k[0].abs() + k[1].abs()),
        })
}

/// Decides the three Diophantine flags by exhaustive enumeration.
pub fn classify_frequency(omega: Frequency, params: &ClassifyParams) -> FrequencyClass {
    let n = params.n as f64;
    let full = find_violation(omega, params.full_cutoff, true, |k| {
        params.c * (k as f64).powf(-params.a)
    });
    let window_radius = n.powf(params.gamma2).floor() as u64;
    let window_threshold = n.powf(-params.gamma1);
    let window = find_violation(omega, window_radius, false, |_| window_threshold);
    let t_threshold = params.c * n.powf(-(1.0 + params.eps));
    let t_cen = find_violation(omega, params.n, false, |_| t_threshold);
    FrequencyClass {
        dioph_full: Flag::from_witness(full),
        verified_up_to: params.full_cutoff,
        dioph_window: Flag::from_witness(window),
        in_t_cen: Flag::from_witness(t_cen),
    }
}

/// Result of scanning the grid `ω_j = j/N̄`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridScan {
    pub grid_size: u64,
    pub n0: u64,
    pub mu: f64,
    pub dim: usize,
    /// Flagged indices `j` (1-D: `[j, 0]`).
    pub flagged: Vec<[u64; 2]>,
    /// `μN₀²N̄² + N₀³N̄` in 2-D; in 1-D the counting bound
    /// `Σ_{k ≤ N₀} (2μN̄ + gcd(k, N̄))`.
    pub bound: f64,
}

impl GridScan {
    /// `C` such that `|J| = μN₀²N̄² + C·N₀³N̄` (2-D) or `|J| = C·bound` (1-D).
    pub fn measured_constant(&self) -> f64 {
        let count = self.flagged.len() as f64;
        let (nb, n0) = (self.grid_size as f64, self.n0 as f64);
        if self.dim == 2 {
            (count - self.mu * n0 * n0 * nb * nb) / (n0.powi(3) * nb)
        } else {
            count / self.bound
        }
    }
}

/// `J = { j : min_{1≤|k|≤N₀} ‖k·ω_j‖ < μ }` for `ω_j = j/N̄`, evaluated in
/// exact integer arithmetic.
pub fn bad_grid_scan(grid_size: u64, n0: u64, mu: f64, dim: usize) -> Result<GridScan> {
    if grid_size < n0 || n0 < 1 {
        return Err(Error::Domain(format!("need N̄ >= N0 >= 1, got {grid_size}, {n0}")));
    }
    if !(mu > 0.0 && mu < 0.5) {
        return Err(Error::Domain(format!("mu = {mu} not in (0, 1/2)")));
    }
    let nb = grid_size as i128;
    let ks = canonical_ks(dim, n0 as i64);
    let dist = |r: i128| -> f64 {
        let r = r.rem_euclid(nb);
        r.min(nb - r) as f64 / nb as f64
    };
    let flagged: Vec<[u64; 2]> = match dim {
        1 => (1..=grid_size)
            .into_par_iter()
            .filter(|&j| ks.iter().any(|k| dist(k[0] as i128 * j as i128) < mu))
            .map(|j| [j, 0])
            .collect(),
        2 => (1..=grid_size)
            .into_par_iter()
            .flat_map_iter(|j1| (1..=grid_size).map(move |j2| [j1, j2]))
            .filter(|j| {
                ks.iter().any(|k| {
                    dist(k[0] as i128 * j[0] as i128 + k[1] as i128 * j[1] as i128) < mu
                })
            })
            .collect(),
        _ => return Err(Error::Domain(format!("grid dimension {dim} not in {{1,2}}"))),
    };
    let (nbf, n0f) = (grid_size as f64, n0 as f64);
    let bound = if dim == 2 {
        mu * n0f * n0f * nbf * nbf + n0f.powi(3) * nbf
    } else {
        (1..=n0)
            .map(|k| 2.0 * mu * nbf + k.gcd(&grid_size) as f64)
            .sum()
    };
    Ok(GridScan {
        grid_size,
        n0,
        mu,
        dim,
        flagged,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: f64 = 0.618_033_988_749_894_9;

    #[test]
    fn torus_norm_examples() {
        assert_eq!(torus_norm(0.75), 0.25);
        assert!((torus_norm(-1.3) - 0.3).abs() < 1e-15);
        assert_eq!(torus_norm(3.5), 0.5);
        assert_eq!(torus_norm(-2.0), 0.0);
    }

    #[test]
    fn golden_expansion_is_fibonacci() {
        let cf = NamedFrequency::Golden.continued_fraction(200);
        assert!(cf.depth() > 70);
        assert!(cf.partial_quotients.iter().all(|&a| a == 1));
        let qs: Vec<u64> = (1..=8).map(|s| cf.q(s).unwrap()).collect();
        assert_eq!(qs, vec![1, 2, 3, 5, 8, 13, 21, 34]);
        assert!(cf.q(cf.depth()).unwrap() <= MAX_DENOMINATOR);
        assert!(!cf.terminated);
    }

    #[test]
    fn double_golden_agrees_until_precision_runs_out() {
        let cf = continued_fraction(GOLDEN, 100).unwrap();
        for s in 1..=cf.depth() {
            if cf.q(s).unwrap() > 10_000_000 {
                break;
            }
            assert_eq!(cf.a(s), Some(1), "s = {s}");
        }
    }

    #[test]
    fn rational_terminates() {
        let cf = continued_fraction(0.5, 10).unwrap();
        assert_eq!(cf.partial_quotients, vec![2]);
        assert!(cf.terminated);
        let cf = continued_fraction(0.375, 10).unwrap();
        assert_eq!(cf.partial_quotients, vec![2, 1, 2]);
        assert_eq!(cf.convergents.last(), Some(&(3, 8)));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(continued_fraction(0.0, 5).is_err());
        assert!(continued_fraction(1.0, 5).is_err());
        assert!(continued_fraction(-0.3, 5).is_err());
    }

    #[test]
    fn named_values_match_shadows() {
        for f in NamedFrequency::ALL {
            let shadow = f.shadow().to_f64().unwrap() / 2f64.powi(SHADOW_BITS as i32);
            assert!((shadow - f.value()).abs() < 1e-15, "{:?}", f);
        }
        let silver = NamedFrequency::Silver.continued_fraction(40);
        assert!(silver.partial_quotients.iter().all(|&a| a == 2));
        let bronze = NamedFrequency::Bronze.continued_fraction(30);
        assert!(bronze.partial_quotients.iter().all(|&a| a == 3));
        let g2 = NamedFrequency::GoldenSquared.continued_fraction(30);
        assert_eq!(g2.partial_quotients[..3], [2, 1, 1]);
    }

    #[test]
    fn golden_lower_bounds() {
        let cf = NamedFrequency::Golden.continued_fraction(60);
        // m = 4 < q_4 = 5 gives a_5/q_5 = 1/8
        let b = komega_lower_bound(&cf, 4).unwrap();
        assert!((b - 1.0 / 8.0).abs() < 1e-15);
        assert!(torus_norm(4.0 * GOLDEN) >= b);
        // m = 1: q_1 = 1 fails, q_2 = 2 works, bound a_3/q_3 = 1/3
        let b = komega_lower_bound(&cf, 1).unwrap();
        assert!((b - 1.0 / 3.0).abs() < 1e-15);
        assert!(torus_norm(GOLDEN) >= b);
    }

    #[test]
    fn lower_bound_rejects_m_equal_q() {
        let cf = NamedFrequency::Golden.continued_fraction(60);
        assert!(komega_lower_bound_at(&cf, 5, 4).is_err());
        assert!(komega_lower_bound_at(&cf, 4, 4).is_ok());
        assert!(komega_lower_bound(&cf, 0).is_err());
    }

    #[test]
    fn min_komega_examples() {
        let (k, v) = min_komega(Frequency::One(GOLDEN), 5);
        assert_eq!(k, [5, 0]);
        assert!((v - 0.090_169_943_749_474_5).abs() < 1e-12);
        let (k, v) = min_komega(Frequency::One(0.5), 2);
        assert_eq!((k, v), ([2, 0], 0.0));
        let (k, v) = min_komega(Frequency::Two([0.5, 0.5]), 1);
        assert_eq!((k, v), ([1, 1], 0.0));
    }

    #[test]
    fn canonical_ks_cover_half_space() {
        let ks = canonical_ks(2, 2);
        // (2·2+1)² − 1 = 24 nonzero vectors, half of them canonical
        assert_eq!(ks.len(), 12);
        for k in &ks {
            assert!(!ks.contains(&[-k[0], -k[1]]));
        }
        let l1: Vec<_> = canonical_ks_l1(2, 2).collect();
        assert_eq!(l1.len(), 6);
    }

    #[test]
    fn classification_examples() {
        let params = ClassifyParams {
            c: 0.2,
            a: 3.0,
            n: 100,
            gamma1: 0.3,
            gamma2: 0.3,
            eps: 0.2,
            full_cutoff: 1000,
        };
        let third = classify_frequency(Frequency::One(1.0 / 3.0), &params);
        let w = third.in_t_cen.witness.unwrap();
        assert!(!third.in_t_cen.holds);
        assert_eq!(w.k, [3, 0]);
        assert!(w.norm < 1e-15);
        assert!(!third.dioph_full.holds);

        let golden = classify_frequency(Frequency::One(GOLDEN), &params);
        assert!(golden.in_t_cen.holds);
        // ‖2ω‖ ≈ 0.236 < 100^{-0.3}
        assert!(!golden.dioph_window.holds);
    }

    #[test]
    fn golden_plus_golden_squared_is_resonant() {
        // golden + golden² = 1, so k = (1, 1) annihilates the pair
        let pair = Frequency::Two([GOLDEN, NamedFrequency::GoldenSquared.value()]);
        let params = ClassifyParams {
            c: 0.1,
            a: 3.0,
            n: 50,
            gamma1: 0.9,
            gamma2: 0.3,
            eps: 0.2,
            full_cutoff: 50,
        };
        let class = classify_frequency(pair, &params);
        assert!(!class.dioph_window.holds);
        assert_eq!(class.dioph_window.witness.unwrap().k, [1, 1]);

        let good = Frequency::Two([GOLDEN, NamedFrequency::Silver.value()]);
        assert!(classify_frequency(good, &params).dioph_window.holds);
    }

    #[test]
    fn witness_inequalities_confirmed() {
        let params = ClassifyParams {
            c: 0.5,
            a: 2.5,
            n: 40,
            gamma1: 0.5,
            gamma2: 0.9,
            eps: 0.5,
            full_cutoff: 500,
        };
        for w in [0.1234, 0.5001, 0.3333, 0.7071] {
            let class = classify_frequency(Frequency::One(w), &params);
            for flag in [class.dioph_full, class.dioph_window, class.in_t_cen] {
                if let Some(wit) = flag.witness {
                    assert!(!flag.holds);
                    assert!(Frequency::One(w).komega(wit.k) <= wit.threshold);
                }
            }
        }
    }

    #[test]
    fn grid_scan_small_cases() {
        let scan = bad_grid_scan(10, 1, 0.05, 1).unwrap();
        assert_eq!(scan.flagged, vec![[10, 0]]);
        assert!(bad_grid_scan(5, 6, 0.1, 1).is_err());
        assert!(bad_grid_scan(10, 1, 0.6, 1).is_err());
        assert!(bad_grid_scan(10, 1, 0.1, 3).is_err());
    }

    #[test]
    fn grid_scan_matches_brute_force() {
        let scan = bad_grid_scan(100, 3, 0.01, 1).unwrap();
        let brute = (1..=100u64)
            .filter(|&j| {
                (1..=3u64).any(|k| {
                    let r = (k * j) % 100;
                    (r.min(100 - r) as f64) / 100.0 < 0.01
                })
            })
            .count();
        assert_eq!(scan.flagged.len(), brute);
        assert!(scan.flagged.len() as f64 <= scan.bound);
    }

    #[test]
    fn grid_scan_two_dimensional() {
        let scan = bad_grid_scan(20, 2, 0.02, 2).unwrap();
        let brute = (1..=20i64)
            .flat_map(|a| (1..=20i64).map(move |b| (a, b)))
            .filter(|&(a, b)| {
                (-2..=2i64).any(|k1| {
                    (-2..=2i64).any(|k2| {
                        if k1 == 0 && k2 == 0 {
                            return false;
                        }
                        let r = (k1 * a + k2 * b).rem_euclid(20);
                        (r.min(20 - r) as f64) / 20.0 < 0.02
                    })
                })
            })
            .count();
        assert_eq!(scan.flagged.len(), brute);
        assert!(scan.measured_constant().is_finite());
    }
}
