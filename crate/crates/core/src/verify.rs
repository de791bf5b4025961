//! The acceptance checks behind `cocycle-lab verify`.
//!
//! Each check is deterministic given the seed. The identity suite can be run
//! with a [`Fault`] injected into the determinant, transfer-product and
//! Cramer kernels; a correct suite must then fail.

use std::fmt::Write as _;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use serde::Serialize;

use crate::diophantine::{ContinuedFraction, NamedFrequency};
use crate::ergodic::{sup_birkhoff_gap, weyl_sum_quadratic, DEFAULT_QUADRATURE};
use crate::error::Error;
use crate::experiments::{
    determinant_ldt, large_disorder_check, localization_profile, spectral_grid, LdtParams,
    LocalizationParams, Setup,
};
use crate::operator::eigen::{self, default_tolerance, sturm_count};
use crate::operator::{
    monodromy_identity_check, thouless_check, Fault, GreenTable, Kernel, SpectralWindow,
    TwistedFactorization,
};
use crate::potential::{Builtin, Potential};
use crate::report::Table;
use crate::rng::{self, random_point};
use crate::row;
use crate::stats::fit_line;
use crate::torus::Dynamics;

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identities,
    Statistics,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "identities" => Some(Suite::Identities),
            "statistics" => Some(Suite::Statistics),
            "all" => Some(Suite::All),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Statistics => "statistics",
            Suite::All => "all",
        }
    }

    /// Check ids in run order.
    pub fn checks(&self) -> Vec<CheckId> {
        use CheckId::*;
        let identities = [
            MonodromyIdentity,
            LongWindowIdentity,
            Thouless,
            Cramer,
            Eigensolver,
            ContinuedFractionBound,
            MutationSensitivity,
        ];
        let statistics = [ErgodicRate, WeylSum, LargeDisorder, Localization, LdtShrinkage];
        match self {
            Suite::Identities => identities.to_vec(),
            Suite::Statistics => statistics.to_vec(),
            Suite::All => {
                let mut v: Vec<CheckId> = identities.iter().chain(&statistics).copied().collect();
                v.sort_by_key(|c| c.order());
                v
            }
        }
    }
}

/// The individual checks. Criteria are numbered 1 to 11; the long-window
/// identity supplements criterion 1 at sizes where unscaled arithmetic
/// overflows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckId {
    MonodromyIdentity,
    LongWindowIdentity,
    Thouless,
    Cramer,
    Eigensolver,
    ContinuedFractionBound,
    ErgodicRate,
    WeylSum,
    LargeDisorder,
    Localization,
    LdtShrinkage,
    MutationSensitivity,
}

impl CheckId {
    pub const ALL: [CheckId; 12] = [
        CheckId::MonodromyIdentity,
        CheckId::LongWindowIdentity,
        CheckId::Thouless,
        CheckId::Cramer,
        CheckId::Eigensolver,
        CheckId::ContinuedFractionBound,
        CheckId::ErgodicRate,
        CheckId::WeylSum,
        CheckId::LargeDisorder,
        CheckId::Localization,
        CheckId::LdtShrinkage,
        CheckId::MutationSensitivity,
    ];

    /// Criterion number, `None` for supplementary checks.
    pub fn criterion(&self) -> Option<u8> {
        use CheckId::*;
        Some(match self {
            MonodromyIdentity => 1,
            LongWindowIdentity => return None,
            Thouless => 2,
            Cramer => 3,
            Eigensolver => 4,
            ContinuedFractionBound => 5,
            ErgodicRate => 6,
            WeylSum => 7,
            LargeDisorder => 8,
            Localization => 9,
            LdtShrinkage => 10,
            MutationSensitivity => 11,
        })
    }

    fn order(&self) -> usize {
        Self::ALL.iter().position(|c| c == self).unwrap_or(usize::MAX)
    }

    pub fn label(&self) -> String {
        match self.criterion() {
            Some(n) => format!("C{n:02}"),
            None => "C01b".into(),
        }
    }

    pub fn name(&self) -> &'static str {
        use CheckId::*;
        match self {
            MonodromyIdentity => "monodromy_determinant_identity",
            LongWindowIdentity => "long_window_identity",
            Thouless => "thouless_identity",
            Cramer => "cramer_vs_direct_solve",
            Eigensolver => "eigensolver_exactness",
            ContinuedFractionBound => "convergent_lower_bound",
            ErgodicRate => "ergodic_rate",
            WeylSum => "weyl_sum",
            LargeDisorder => "large_disorder",
            Localization => "localization_profile",
            LdtShrinkage => "ldt_shrinkage",
            MutationSensitivity => "mutation_sensitivity",
        }
    }

    /// Runtime budget in seconds.
    pub fn time_limit(&self) -> f64 {
        use CheckId::*;
        match self {
            MonodromyIdentity | LongWindowIdentity => 5.0,
            Thouless => 30.0,
            Cramer => 10.0,
            Eigensolver => 20.0,
            ContinuedFractionBound => 30.0,
            ErgodicRate => 60.0,
            WeylSum => 20.0,
            LargeDisorder | LdtShrinkage => 120.0,
            Localization => 300.0,
            MutationSensitivity => 30.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub id: CheckId,
    pub label: String,
    pub name: String,
    /// The numerical condition held.
    pub condition: bool,
    pub detail: String,
    /// Timing is kept out of the serialized report so that reruns compare
    /// byte-for-byte.
    #[serde(skip)]
    pub elapsed: f64,
    #[serde(skip)]
    pub time_limit: f64,
}

impl CheckOutcome {
    pub fn within_time(&self) -> bool {
        self.elapsed <= self.time_limit
    }

    pub fn passed(&self) -> bool {
        self.condition && self.within_time()
    }

    /// One human-readable line.
    pub fn line(&self) -> String {
        format!(
            "[{}] {} {}: {} ({:.2}s of {:.0}s)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.label,
            self.name,
            self.detail,
            self.elapsed,
            self.time_limit
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub fault: Option<Fault>,
    pub outcomes: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed())
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.passed()).count()
    }

    /// JUnit-style XML: one test case per check. Timing is omitted so the
    /// file is reproducible.
    pub fn junit_xml(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<testsuite name="{}" tests="{}" failures="{}">"#,
            self.suite.name(),
            self.outcomes.len(),
            self.outcomes.iter().filter(|o| !o.condition).count()
        );
        for o in &self.outcomes {
            let name = xml_escape(&format!("{} {}", o.label, o.name));
            if o.condition {
                let _ = writeln!(s, r#"  <testcase classname="verify" name="{name}"/>"#);
            } else {
                let _ = writeln!(s, r#"  <testcase classname="verify" name="{name}">"#);
                let _ = writeln!(s, r#"    <failure message="{}"/>"#, xml_escape(&o.detail));
                let _ = writeln!(s, "  </testcase>");
            }
        }
        s.push_str("</testsuite>\n");
        s
    }

    pub fn tables(&self) -> Vec<Table> {
        let mut t = Table::new("verify", &["label", "name", "condition", "detail"]);
        let mut timing = Table::new("verify_timing", &["label", "elapsed_seconds", "limit_seconds"]);
        for o in &self.outcomes {
            t.push(row![o.label.clone(), o.name.clone(), o.condition, o.detail.clone()]);
            timing.push(row![o.label.clone(), o.elapsed, o.time_limit]);
        }
        vec![t, timing]
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Runs every check of `suite`; the fault applies to the identity checks.
pub fn run_suite(suite: Suite, seed: u64, fault: Option<Fault>) -> SuiteReport {
    let outcomes = suite.checks().into_iter().map(|c| run_check(c, seed, fault)).collect();
    SuiteReport {
        suite,
        seed,
        fault,
        outcomes,
    }
}

pub fn run_check(id: CheckId, seed: u64, fault: Option<Fault>) -> CheckOutcome {
    let kernel = Kernel::with_fault(fault);
    let start = Instant::now();
    let seed = rng::subseed(seed, id.order() as u64);
    use CheckId::*;
    let result = match id {
        MonodromyIdentity => monodromy_identity(seed, kernel),
        LongWindowIdentity => long_window_identity(kernel),
        Thouless => thouless(seed, kernel),
        Cramer => cramer(seed, kernel),
        Eigensolver => eigensolver(seed),
        ContinuedFractionBound => convergent_bound(seed),
        ErgodicRate => ergodic_rate(seed),
        WeylSum => weyl(),
        LargeDisorder => large_disorder(seed),
        Localization => localization(seed),
        LdtShrinkage => ldt_shrinkage(seed),
        MutationSensitivity => mutation_sensitivity(seed),
    };
    let (condition, detail) = match result {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckOutcome {
        id,
        label: id.label(),
        name: id.name().into(),
        condition,
        detail,
        elapsed: start.elapsed().as_secs_f64(),
        time_limit: id.time_limit(),
    }
}

type Outcome = crate::error::Result<(bool, String)>;

fn golden() -> f64 {
    NamedFrequency::Golden.value()
}

fn silver() -> f64 {
    NamedFrequency::Silver.value()
}

/// A random window of length `len` on one of the given potentials, under a
/// random shift or skew-shift, with coupling in `[0.5, 4]` and `E` inside
/// the Gershgorin range.
fn random_window<'a, R: Rng>(r: &mut R, pots: &'a [Potential], len: usize) -> SpectralWindow<'a> {
    let pot = &pots[r.random_range(0..pots.len())];
    let dynamics = if r.random_bool(0.5) {
        Dynamics::shift(r.random::<f64>(), r.random::<f64>())
    } else {
        Dynamics::skew_shift(r.random::<f64>())
    };
    let phase = random_point(r);
    let a = r.random_range(-1000i64..=1000);
    let lambda = r.random_range(0.5..4.0);
    let w = SpectralWindow::new(pot, dynamics, phase, a, a + len as i64 - 1)
        .expect("nonempty")
        .with_coupling(lambda);
    let reach = w.potential_bound() + 2.0;
    w.with_energy(r.random_range(-reach..reach))
}

fn identity_potentials() -> Vec<Potential> {
    vec![Potential::cos2d(), Potential::builtin(Builtin::Weierstrass { alpha: 0.5 })]
}

fn monodromy_identity(seed: u64, kernel: Kernel) -> Outcome {
    let pots = identity_potentials();
    let mut worst = 0.0f64;
    let mut sign_failures = 0;
    for i in 0..1000u64 {
        let mut r = rng::stream(seed, i);
        let len = r.random_range(3..=64);
        let w = random_window(&mut r, &pots, len);
        let chk = monodromy_identity_check(&w, kernel)?;
        worst = worst.max(chk.max_relative_discrepancy);
        sign_failures += usize::from(!chk.signs_agree);
    }
    Ok((
        worst <= 1e-9 && sign_failures == 0,
        format!("1000 windows, max relative log gap {worst:.3e} (tol 1e-9), sign mismatches {sign_failures}"),
    ))
}

fn long_window_identity(kernel: Kernel) -> Outcome {
    let pot = Potential::cos2d();
    let w = SpectralWindow::new(&pot, Dynamics::skew_shift(golden()), crate::TorusPoint::new(0.3, 0.7), 1, 20_000)?
        .with_coupling(100.0)
        .with_energy(0.3);
    let chk = monodromy_identity_check(&w, kernel)?;
    Ok((
        chk.passes(1e-9),
        format!(
            "N = 20000, λ = 100: max relative log gap {:.3e}, signs agree {}",
            chk.max_relative_discrepancy, chk.signs_agree
        ),
    ))
}

fn thouless(seed: u64, kernel: Kernel) -> Outcome {
    let pots = identity_potentials();
    let mut worst = 0.0f64;
    let mut redraws = 0;
    for i in 0..1000u64 {
        let mut r = rng::stream(seed, i);
        let len = r.random_range(1..=100);
        let mut w = random_window(&mut r, &pots, len);
        let chk = loop {
            match thouless_check(&w, kernel) {
                Err(Error::Singular(_)) => {
                    redraws += 1;
                    let reach = w.potential_bound() + 2.0;
                    w = w.with_energy(r.random_range(-reach..reach));
                }
                other => break other?,
            }
        };
        worst = worst.max(chk.discrepancy);
    }
    Ok((
        worst <= 1e-6,
        format!("1000 windows, max |log|f| − Σlog|E_j − E|| = {worst:.3e} (tol 1e-6), {redraws} energies redrawn"),
    ))
}

fn cramer(seed: u64, kernel: Kernel) -> Outcome {
    let pots = identity_potentials();
    let mut worst = 0.0f64;
    let mut worst_residual = 0.0f64;
    for i in 0..100u64 {
        let mut r = rng::stream(seed, i);
        let len = r.random_range(1..=200);
        let mut w = random_window(&mut r, &pots, len);
        let d = w.site_values();
        let spec = eigen::eigenvalues(&d, default_tolerance(&d))?;
        let dist = |e: f64| spec.iter().map(|v| (v - e).abs()).fold(f64::INFINITY, f64::min);
        while dist(w.energy) < 1e-3 {
            let reach = w.potential_bound() + 2.0;
            w = w.with_energy(r.random_range(-reach..reach));
        }
        let c = w.shifted_diagonal();
        let table = GreenTable::new(&c, kernel)?;
        let oracle = TwistedFactorization::new(&c);
        for m in 0..len {
            let col = oracle.column(m)?;
            worst_residual = worst_residual.max(oracle.column_residual(m, &col));
            for (k, want) in col.iter().enumerate() {
                let err = table.entry(k, m).relative_error(want);
                worst = if err.is_nan() { f64::INFINITY } else { worst.max(err) };
            }
        }
    }
    Ok((
        worst <= 1e-8,
        format!("100 windows, max entrywise relative error {worst:.3e} (tol 1e-8), oracle residual {worst_residual:.3e}"),
    ))
}

fn eigensolver(seed: u64) -> Outcome {
    let mut free_err = 0.0f64;
    for n in [5usize, 50, 500] {
        let d = vec![0.0; n];
        let ev = eigen::eigenvalues(&d, default_tolerance(&d))?;
        for (j, v) in ev.iter().enumerate() {
            let exact = -2.0 * ((j + 1) as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            free_err = free_err.max((v - exact).abs());
        }
    }
    let pots = identity_potentials();
    let mut interlace_failures = 0;
    let mut sturm_failures = 0;
    for i in 0..100u64 {
        let mut r = rng::stream(seed, i);
        let len = r.random_range(2..=120);
        let w = random_window(&mut r, &pots, len);
        let d = w.site_values();
        let tol = default_tolerance(&d);
        let ev = eigen::eigenvalues(&d, tol)?;
        let sub = eigen::eigenvalues(&d[..len - 1], tol)?;
        for (j, mu) in sub.iter().enumerate() {
            if *mu < ev[j] - 2.0 * tol || *mu > ev[j + 1] + 2.0 * tol {
                interlace_failures += 1;
            }
        }
        for j in 0..len - 1 {
            if ev[j + 1] - ev[j] > 1e3 * tol && sturm_count(&d, 0.5 * (ev[j] + ev[j + 1])) != j + 1 {
                sturm_failures += 1;
            }
        }
        if sturm_count(&d, ev[0] - 1.0) != 0 || sturm_count(&d, ev[len - 1] + 1.0) != len {
            sturm_failures += 1;
        }
    }
    Ok((
        free_err <= 1e-10 && interlace_failures == 0 && sturm_failures == 0,
        format!(
            "free spectra max error {free_err:.3e} (tol 1e-10), interlacing failures {interlace_failures}, Sturm failures {sturm_failures} over 100 instances"
        ),
    ))
}

/// Exhaustive `‖mω‖ ≥ a_{s+1}/q_{s+1}` for `1 ≤ m < q_s ≤ 10⁵`, in exact
/// arithmetic on the dyadic expansion the continued fraction describes.
fn convergent_bound(seed: u64) -> Outcome {
    const BITS: u32 = crate::diophantine::SHADOW_BITS;
    let one = BigUint::one() << BITS;
    let mut cases: Vec<(f64, BigUint)> = (0..20u64)
        .map(|i| {
            let k = rng::stream(seed, i).random_range(1u64..(1 << 53));
            (k as f64 / (1u64 << 53) as f64, BigUint::from(k) << (BITS - 53))
        })
        .collect();
    cases.push((NamedFrequency::Golden.value(), NamedFrequency::Golden.shadow()));
    let mut violations = 0usize;
    let mut checked = 0usize;
    for (omega, num) in &cases {
        let cf = ContinuedFraction::from_ratio(*omega, num.clone(), one.clone(), 80);
        // thresholds a_{s+1}·2^B/q_{s+1} for every level with q_s ≤ 10⁵
        let levels: Vec<(u64, BigUint, u64)> = (1..cf.depth())
            .filter_map(|s| {
                let q = cf.q(s)?;
                let (a1, q1) = (cf.a(s + 1)?, cf.q(s + 1)?);
                (q <= 100_000).then(|| (q, BigUint::from(a1), q1))
            })
            .collect();
        let top = levels.iter().map(|l| l.0).max().unwrap_or(1);
        let mask = &one - 1u32;
        for m in 1..top {
            let r = (num * m) & &mask;
            let dist = if &r + &r > one { &one - &r } else { r };
            for (q, a1, q1) in &levels {
                if m < *q {
                    checked += 1;
                    if &dist * *q1 < a1 * &one {
                        violations += 1;
                    }
                }
            }
        }
    }
    Ok((
        violations == 0,
        format!("21 frequencies, {checked} (m, s) pairs checked, {violations} violations"),
    ))
}

fn ergodic_rate(seed: u64) -> Outcome {
    let psi = Potential::builtin(Builtin::CosProduct);
    let phases: Vec<_> = (0..64).map(|i| rng::phase(seed, i)).collect();
    let mut ok = true;
    let mut detail = Vec::new();
    for (label, dynamics) in [
        ("shift(golden, silver)", Dynamics::shift(golden(), silver())),
        ("skew(golden)", Dynamics::skew_shift(golden())),
    ] {
        let ns = [1_000usize, 10_000, 100_000];
        let gaps: Vec<f64> = ns
            .iter()
            .map(|&n| sup_birkhoff_gap(&psi, &dynamics, &phases, n, DEFAULT_QUADRATURE))
            .collect();
        let decreasing = gaps.windows(2).all(|g| g[1] < g[0]);
        let xs: Vec<f64> = ns.iter().map(|n| (*n as f64).ln()).collect();
        let ys: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
        let slope = fit_line(&xs, &ys).map_or(f64::NAN, |f| f.slope);
        ok &= decreasing && slope <= -0.2;
        detail.push(format!(
            "{label}: gaps {:.3e}, {:.3e}, {:.3e}, slope {slope:.3}",
            gaps[0], gaps[1], gaps[2]
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn weyl() -> Outcome {
    let alpha = golden() / 2.0;
    let mut worst = 0.0f64;
    for beta in [0.0, 0.3] {
        for n in [100u64, 1_000, 10_000, 100_000] {
            let s = weyl_sum_quadratic(alpha, beta, n, 0.25);
            worst = worst.max(s.value.norm() / (n as f64).powf(0.75));
        }
    }
    Ok((worst <= 1.0, format!("max |S|/N^0.75 = {worst:.4} (ceiling 1)")))
}

fn large_disorder(seed: u64) -> Outcome {
    let pot = Potential::cos2d();
    let setup = Setup::new(&pot, Dynamics::skew_shift(golden()), 100.0);
    let grid = spectral_grid(&setup, 201);
    let scan = large_disorder_check(&setup, &grid, 50, 1000, 20.0, seed)?;
    let zero = large_disorder_check(&setup, &[0.0], 50, 1000, 20.0, seed)?;
    let margin = zero.rows[0].mean - 2.3026;
    Ok((
        scan.failing_fraction <= 0.15 && margin >= 0.3,
        format!(
            "failing fraction {:.4} (ceiling 0.15), mean at E=0 {:.4} exceeds 2.3026 by {margin:.4} (need 0.3)",
            scan.failing_fraction, zero.rows[0].mean
        ),
    ))
}

fn localization(seed: u64) -> Outcome {
    let pot = Potential::cos2d();
    let setup = Setup::new(&pot, Dynamics::skew_shift(golden()), 100.0);
    let mut params = LocalizationParams::new(rng::phase(seed, 0), 300);
    params.seed = seed;
    let rep = localization_profile(&setup, &params)?;
    Ok((
        rep.localized_compact_fraction >= 0.9,
        format!(
            "{} edge-excluded eigenpairs: {:.4} localized and compact (need 0.9); localized {:.4}, compact {:.4}",
            rep.considered, rep.localized_compact_fraction, rep.localized_fraction, rep.compact_fraction
        ),
    ))
}

fn ldt_shrinkage(seed: u64) -> Outcome {
    let pot = Potential::cos2d();
    let setup = Setup::new(&pot, Dynamics::shift(golden(), silver()), 2.0);
    let at = |n| {
        determinant_ldt(
            &setup,
            0.7,
            LdtParams {
                n,
                kappa: 0.2,
                samples: 1000,
                tol: None,
            },
            seed,
        )
    };
    let (small, large) = (at(400)?, at(1600)?);
    Ok((
        large.fraction <= small.fraction && small.fraction <= 0.05 && large.fraction <= 0.05,
        format!(
            "fraction {:.4} at N=400, {:.4} at N=1600 (ceiling 0.05, must not increase)",
            small.fraction, large.fraction
        ),
    ))
}

fn mutation_sensitivity(seed: u64) -> Outcome {
    let mut caught = Vec::new();
    for fault in Fault::ALL {
        let rep = run_suite_conditions(seed, fault);
        caught.push((fault, rep));
    }
    let ok = caught.iter().all(|(_, failed)| !failed.is_empty());
    let detail = caught
        .iter()
        .map(|(f, failed)| {
            if failed.is_empty() {
                format!("{}: NOT detected", f.name())
            } else {
                format!("{}: detected by {}", f.name(), failed.join(","))
            }
        })
        .collect::<Vec<_>>()
        .join("; ");
    Ok((ok, detail))
}

/// Labels of the identity checks whose numerical condition fails under `fault`.
fn run_suite_conditions(seed: u64, fault: Fault) -> Vec<String> {
    Suite::Identities
        .checks()
        .into_iter()
        .filter(|c| *c != CheckId::MutationSensitivity)
        .map(|c| run_check(c, seed, Some(fault)))
        .filter(|o| !o.condition)
        .map(|o| o.label)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_membership() {
        assert_eq!(Suite::All.checks().len(), 12);
        assert_eq!(Suite::Identities.checks().len() + Suite::Statistics.checks().len(), 12);
        assert_eq!(Suite::parse("identities"), Some(Suite::Identities));
        assert_eq!(Suite::parse("nope"), None);
        let labels: Vec<String> = Suite::All.checks().iter().map(|c| c.label()).collect();
        assert_eq!(labels[0], "C01");
        assert_eq!(labels[1], "C01b");
        assert_eq!(labels[11], "C11");
    }

    #[test]
    fn junit_escapes_and_counts() {
        let rep = SuiteReport {
            suite: Suite::Identities,
            seed: 1,
            fault: None,
            outcomes: vec![CheckOutcome {
                id: CheckId::Cramer,
                label: "C03".into(),
                name: "x".into(),
                condition: false,
                detail: "a < b & \"c\"".into(),
                elapsed: 0.0,
                time_limit: 1.0,
            }],
        };
        let xml = rep.junit_xml();
        assert!(xml.contains(r#"failures="1""#));
        assert!(xml.contains("a &lt; b &amp; &quot;c&quot;"));
    }

    #[test]
    fn sign_flip_breaks_identity() {
        let o = run_check(CheckId::MonodromyIdentity, 1, Some(Fault::RecurrenceSignFlip));
        assert!(!o.condition, "{}", o.detail);
        let o = run_check(CheckId::LongWindowIdentity, 1, Some(Fault::DroppedRescale));
        assert!(!o.condition, "{}", o.detail);
        let o = run_check(CheckId::Cramer, 1, Some(Fault::CramerOffByOne));
        assert!(!o.condition, "{}", o.detail);
    }
}
