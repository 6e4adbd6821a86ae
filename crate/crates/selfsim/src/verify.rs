//! Verification suites. Each suite runs a fixed list of checks with
//! parameters derived from a seed, so that its report is a pure function of
//! the suite, the seed and the scale, whatever the number of workers.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::central::{center_witness, gamma_ball_coincidence, germ_group, orbit_mn};
use crate::constants::{A_CONTRACT_C, GROWTH_C};
use crate::error::{Error, Result};
use crate::finite::{dihedral_lamp, klein_lamp, FiniteGroup};
use crate::identities::{k_recursion_holds, level3_quotient, short_section_violations, theta_identity_check};
use crate::marked::{matching_radius, BallOptions, Diagonal, MarkedGroup};
use crate::norm::{alpha0, contraction_sides, solve_norm_weights};
use crate::synthesis::{
    empirical_vs_bounds, fixtures, reference_plans, sample_points, sandwich_check, schedule_partial, Constants,
};
use crate::traverse::{inverted_orbit_pair, max_a, recursion_monotonicity_check, traverse_field, zeta_coverage, SweepMode};
use crate::tree::{evaluate_word, OmegaString, Vertex};
use crate::word::{formal_recursion, free_reduce, random_k_word, random_pre_reduced, random_word, substitute_sigma, Word};
use crate::wreath::{build_delta_n, kdelta_witness, DeltaSpec, WreathGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Worked,
    Recursion,
    Contraction,
    Traverse,
    Convergence,
    Kdelta,
    Central,
    Synthesis,
    All,
}

impl Suite {
    pub const EACH: [Suite; 8] = [
        Suite::Worked,
        Suite::Recursion,
        Suite::Contraction,
        Suite::Traverse,
        Suite::Convergence,
        Suite::Kdelta,
        Suite::Central,
        Suite::Synthesis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Worked => "worked",
            Suite::Recursion => "recursion",
            Suite::Contraction => "contraction",
            Suite::Traverse => "traverse",
            Suite::Convergence => "convergence",
            Suite::Kdelta => "kdelta",
            Suite::Central => "central",
            Suite::Synthesis => "synthesis",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub workers: Option<usize>,
    /// Reduced sample counts and radii for fast runs.
    pub quick: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 7, workers: None, quick: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// The first failing input, verbatim.
    pub counterexample: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into(), counterexample: None }
    }

    fn failing_at(name: impl Into<String>, first: Option<String>, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed: first.is_none(), detail: detail.into(), counterexample: first }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub seed: u64,
    pub quick: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// One line per check; failures are followed by the counterexample.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{mark} {}/{}: {}", self.suite, c.name, c.detail);
            if let Some(w) = &c.counterexample {
                let _ = writeln!(s, "     counterexample: {w}");
            }
        }
        s
    }
}

/// Runs `suite` (every suite for [`Suite::All`]) in a pool of the
/// configured size.
pub fn run(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<SuiteReport>> {
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let body = || suites.iter().map(|&s| run_one(s, cfg)).collect::<Result<Vec<_>>>();
    match cfg.workers {
        None => body(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::invalid(format!("worker pool: {e}")))?
            .install(body),
    }
}

fn run_one(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Worked => worked()?,
        Suite::Recursion => recursion(cfg)?,
        Suite::Contraction => contraction(cfg)?,
        Suite::Traverse => traverse(cfg)?,
        Suite::Convergence => convergence(cfg)?,
        Suite::Kdelta => kdelta()?,
        Suite::Central => central(cfg)?,
        Suite::Synthesis => synthesis(cfg)?,
        Suite::All => unreachable!("expanded by run"),
    };
    Ok(SuiteReport { suite: suite.name(), seed: cfg.seed, quick: cfg.quick, checks })
}

/// Seed for the `i`-th independent sample stream of a check.
fn stream(seed: u64, tag: u64, i: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ tag.wrapping_mul(0xC2B2_AE3D_27D4_EB4F) ^ i,
    )
}

/// Runs `f` on indices `0..count` in parallel and returns the counterexample
/// with the smallest index.
fn first_failure(count: u64, f: impl Fn(u64) -> Result<Option<String>> + Sync) -> Result<Option<String>> {
    let found: Vec<(u64, String)> = (0..count)
        .into_par_iter()
        .map(|i| f(i).map(|o| o.map(|s| (i, s))))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(found.into_iter().min_by_key(|(i, _)| *i).map(|(_, s)| s))
}

fn w(s: &str) -> Word {
    s.parse().expect("literal words parse")
}

fn worked() -> Result<Vec<Check>> {
    let orbit = inverted_orbit_pair(&w("abaca"), 2)?.to_display();
    let expected = "((11,10),(01,00),(01,00),(10,11),(10,11),(00,01))";
    let field = traverse_field(&w("abaca"), 2)?;
    let p = field.pattern(&"01".parse::<Vertex>()?)?;
    Ok(vec![
        Check::new("inverted orbit of abaca on level 2", orbit == expected, orbit),
        Check::new("pattern at 01 of abaca", p == "10", format!("P(01) = {p}")),
    ])
}

fn recursion(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let r = formal_recursion(&substitute_sigma(&Word::commutator(&w("a"), &w("b")))?)?;
    let symbolic = !r.swap && free_reduce(&r.w0)?.is_empty() && free_reduce(&r.w1)? == w("abab");
    out.push(Check::new(
        "sigma of [a,b] splits as (id, abab)",
        symbolic,
        format!("({}, {}) swap {}", r.w0, r.w1, r.swap),
    ));

    let samples = if cfg.quick { 40 } else { 200 };
    let first = first_failure(samples, |i| {
        let word = random_k_word(cfg.seed ^ (i << 16), 6, 3);
        Ok((!k_recursion_holds(&word, 8)?).then(|| word.to_string()))
    })?;
    out.push(Check::failing_at("sigma acts as (id, w) on sampled K words", first, format!("{samples} words at depth 8")));

    let ad4 = evaluate_word(&w("adadadad"), &OmegaString::first(), 8)?;
    out.push(Check::new("(ad)^4 is trivial", ad4.is_identity(), "depth 8"));

    let per_level = if cfg.quick { 100 } else { 500 };
    for k in 3..=7usize {
        let max_len = (1usize << (k - 1)) - 1;
        let first = first_failure(per_level, |i| {
            let mut rng = stream(cfg.seed, k as u64, i);
            let len = rng.gen_range(0..=max_len);
            let word = random_word(&mut rng, len);
            let v = short_section_violations(&word, k)?;
            Ok(v.first().map(|v| format!("{} at {}: {} ({})", v.word, v.vertex, v.section, v.reason)))
        })?;
        out.push(Check::failing_at(
            format!("short sections on level {k}"),
            first,
            format!("{per_level} words of length <= {max_len}"),
        ));
    }

    for i in 1..=4usize {
        let rep = theta_identity_check(i, i + 4)?;
        let failed: Vec<&str> = rep.checks.iter().filter(|c| !c.1).map(|c| c.0.as_str()).collect();
        out.push(Check::failing_at(
            format!("theta_{i} commutator identities"),
            failed.first().map(|s| s.to_string()),
            format!("{} identities at depth {}", rep.checks.len(), i + 4),
        ));
    }
    Ok(out)
}

fn contraction(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let nw = solve_norm_weights();
    let count = if cfg.quick { 10_000 } else { 100_000 };
    let first = first_failure(count, |i| {
        let mut rng = stream(cfg.seed, 101, i);
        let len = rng.gen_range(0..=60);
        let word = random_pre_reduced(&mut rng, len);
        let (lhs, rhs) = contraction_sides(&word, &nw)?;
        Ok((lhs > rhs + 1e-9).then(|| format!("{word}: {lhs} > {rhs}")))
    })?;
    let a0 = alpha0(nw.eta);
    Ok(vec![
        Check::failing_at(
            "weighted norm contracts",
            first,
            format!("{count} pre-reduced words of length <= 60, eta = {:.10}", nw.eta),
        ),
        Check::new("growth exponent", (a0 - 0.7674).abs() < 1e-3, format!("alpha0 = {a0:.6}")),
    ])
}

fn traverse(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let count = if cfg.quick { 1_000 } else { 10_000 };
    let first = first_failure(count, |i| {
        let mut rng = stream(cfg.seed, 201, i);
        let n = rng.gen_range(2..=6);
        let len = rng.gen_range(0..=40);
        let word = random_word(&mut rng, len);
        let rep = recursion_monotonicity_check(&word, n)?;
        Ok((!rep.passed()).then(|| format!("{word} on level {n}")))
    })?;
    out.push(Check::failing_at("section fields embed in the parent field", first, format!("{count} words, levels 2..=6")));

    let radius = if cfg.quick { 8 } else { 12 };
    let mut worst = 0.0f64;
    let mut first = None;
    for n in 3..=8 {
        let rep = max_a(n, radius, SweepMode::Exhaustive)?;
        if let Some(&r) = rep.contraction_violations().first() {
            first.get_or_insert_with(|| format!("level {n}, length {r}: {}", rep.rows[r].argmax));
        }
        worst = worst.max(max_ratio(&rep));
    }
    out.push(Check::failing_at(
        "field totals obey the contraction bound (exhaustive)",
        first,
        format!("levels 3..=8, lengths <= {radius}, C = {A_CONTRACT_C}, worst ratio {worst:.5}"),
    ));

    let (len, per_len) = if cfg.quick { (60, 4) } else { (120, 14) };
    let mut worst = 0.0f64;
    let mut first = None;
    for n in 3..=8u64 {
        let rep = max_a(n as usize, len, SweepMode::Sampled { samples: per_len, seed: cfg.seed ^ (n << 32) })?;
        if let Some(&r) = rep.contraction_violations().first() {
            first.get_or_insert_with(|| format!("level {n}, length {r}: {}", rep.rows[r].argmax));
        }
        worst = worst.max(max_ratio(&rep));
    }
    out.push(Check::failing_at(
        "field totals obey the contraction bound (sampled)",
        first,
        format!("levels 3..=8, {per_len} words per length <= {len}, worst ratio {worst:.5}"),
    ));

    let mut detail = Vec::new();
    let mut uncovered = None;
    let mut ratios = Vec::new();
    for n in 1..=8 {
        let z = zeta_coverage(n)?;
        ratios.push(z.ratio);
        if n <= 6 && !z.complete() {
            uncovered.get_or_insert_with(|| format!("level {n}: {} of {}", z.covered, 1 << n));
        }
        detail.push(format!("{:.4}", z.ratio));
    }
    out.push(Check::failing_at("zeta words cover their level", uncovered, "levels 1..=6"));
    let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    out.push(Check::new(
        "zeta word lengths scale like (2/eta)^n",
        lo >= ZETA_BAND.0 && hi <= ZETA_BAND.1,
        format!("ratios {} within [{}, {}]", detail.join(" "), ZETA_BAND.0, ZETA_BAND.1),
    ));
    Ok(out)
}

/// Band for `|ζⁿ(ad)| / (2/η)ⁿ`, `1 ≤ n ≤ 8`.
pub const ZETA_BAND: (f64, f64) = (0.5, 2.0);

fn max_ratio(rep: &crate::traverse::SweepReport) -> f64 {
    rep.rows
        .iter()
        .filter_map(|row| crate::traverse::contraction_bound(rep.level, row.r).map(|b| row.max_a as f64 / b))
        .fold(0.0, f64::max)
}

fn convergence(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let opts = BallOptions { workers: None, ..BallOptions::default() };
    let klein = Arc::new(FiniteGroup::new(klein_lamp())?);
    let mut out = Vec::new();
    let max_level = if cfg.quick { 4 } else { 5 };
    let deltas: Vec<WreathGroup> =
        (1..=max_level).map(|n| build_delta_n(&DeltaSpec::new(n, klein.clone()))).collect::<Result<_>>()?;
    for n in 2..max_level {
        for m in n + 1..=max_level {
            let cap = (1 << (n - 1)) - 1;
            let rep = matching_radius(&deltas[n - 1], &deltas[m - 1], cap, opts)?;
            out.push(Check::new(
                format!("lamp factors {n} and {m} agree on balls"),
                rep.radius >= cap,
                format!("matching radius {} (required {cap})", rep.radius),
            ));
        }
    }
    let max_gamma = if cfg.quick { 3 } else { 4 };
    for n in 1..max_gamma {
        for m in n + 1..=max_gamma {
            let radius = (1 << (n - 1)) - 1;
            let rep = gamma_ball_coincidence(n, m, radius, opts)?;
            out.push(Check::new(
                format!("central extensions {n} and {m} agree on balls"),
                rep.passed(),
                format!("matching radius {} (required {radius})", rep.matching.radius),
            ));
        }
    }
    Ok(out)
}

fn kdelta() -> Result<Vec<Check>> {
    let lamp = Arc::new(FiniteGroup::new(dihedral_lamp(8)?)?);
    let (u, v) = (lamp.by_label("u1").expect("marked"), lamp.by_label("v1").expect("marked"));
    let uv = lamp.commutator(u, v);
    let factors: Vec<WreathGroup> =
        (1..=5).map(|n| build_delta_n(&DeltaSpec::new(n, lamp.clone()))).collect::<Result<_>>()?;
    let diagonal = Diagonal::new(factors.clone())?;
    let labels = diagonal.labels();
    let mut out = vec![Check::new("lamp commutator is nontrivial", uv != 0, format!("[u1,v1] = element {uv}"))];
    for n in 1..=5usize {
        let word = kdelta_witness(n, &OmegaString::first())?;
        let indices: Vec<usize> = word
            .letters()
            .iter()
            .map(|l| labels.iter().position(|s| *s == l.to_string()).expect("witness uses marked letters"))
            .collect();
        let x = diagonal.eval_indices(&indices);
        let mut bad = None;
        for (k, g) in factors.iter().enumerate() {
            let xk = diagonal.project(&x, k);
            let ok = if k + 1 == n { *xk == g.delta_lamp(Vertex::ones(n).code(), uv) } else { xk.is_identity() };
            if !ok {
                bad.get_or_insert_with(|| format!("{word} in factor {}", k + 1));
            }
        }
        out.push(Check::failing_at(
            format!("witness for level {n} lives on one lamp"),
            bad,
            format!("word of length {}", word.len()),
        ));
    }
    Ok(out)
}

fn central(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let g3 = germ_group();
    let abab = g3.eval(&w("abab"))?;
    let sections = (
        evaluate_word(&w("ca"), &OmegaString::first(), 2)?,
        evaluate_word(&w("ac"), &OmegaString::first(), 2)?,
    );
    let expected = crate::tree::TreeAut::from_sections(&sections.0, &sections.1, false)?;
    out.push(Check::new(
        "abab = (ca, ac) is nontrivial on level 3",
        abab != g3.identity() && *g3.element(abab) == expected,
        "depth 3",
    ));
    let closure = level3_quotient().len();
    out.push(Check::new(
        "order of the level-3 quotient",
        closure == 128 && g3.order() == 128,
        format!("closure {closure}, germ group {}", g3.order()),
    ));
    let max_level = if cfg.quick { 3 } else { 4 };
    for n in 1..=max_level {
        let ok = match orbit_mn(n) {
            Ok(m) => Check::new(format!("orbit M_{n} has trivial sign"), true, format!("{} pairs", m.len())),
            Err(e) => Check::failing_at(format!("orbit M_{n} has trivial sign"), Some(e.to_string()), ""),
        };
        out.push(ok);
    }
    for n in 1..=3 {
        let rep = center_witness(n)?;
        out.push(Check::new(
            format!("center witness on level {n}"),
            rep.passed(),
            format!("{} evaluates to central coordinate {}", rep.word, rep.central),
        ));
    }
    Ok(out)
}

fn synthesis(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let consts = Constants::default();
    let mut out = vec![Check::new(
        "growth exponent range",
        consts.alpha0 > 0.767 && consts.alpha0 < 0.768,
        format!("alpha0 = {:.6}", consts.alpha0),
    )];
    let samples = if cfg.quick { 200 } else { 1000 };
    for (name, table) in fixtures()? {
        let s = schedule_partial(&table, consts.lambda0, 60)?;
        let failures = s.invariant_failures();
        out.push(Check::failing_at(
            format!("schedule invariants for {name}"),
            failures.first().cloned(),
            format!("{} terms", s.len()),
        ));
        let rep = sandwich_check(&table, &s, &sample_points(&s, samples));
        let first = rep
            .violations
            .first()
            .map(|v| format!("x = {:e}: {} <= {} <= {}", v.x, v.lower, v.value, v.upper));
        out.push(Check::failing_at(
            format!("sandwich for {name}"),
            first,
            format!("{samples} points, c_lambda = {:.6}", rep.c_lambda),
        ));
        if name == "power" {
            let min_phi = s.terms.iter().map(|t| t.phi).fold(f64::MAX, f64::min);
            out.push(Check::new("boundary function keeps phi >= 1", min_phi >= 1.0 - 1e-9, format!("min phi {min_phi}")));
        }
    }
    let opts = BallOptions { workers: None, ..BallOptions::default() };
    let plans = reference_plans()?;
    let plans = if cfg.quick { &plans[..2] } else { &plans[..] };
    for rp in plans {
        let radius = if cfg.quick { rp.radius.min(6) } else { rp.radius };
        let rep = empirical_vs_bounds(&rp.plan, rp.levels, radius, &consts, opts)?;
        out.push(Check::failing_at(
            format!("diagonal ball dominates its factors ({})", rp.name),
            rep.dominance_failures.first().map(|r| format!("radius {r}")),
            format!("radius {radius}"),
        ));
        out.push(Check::failing_at(
            format!("volume within calibrated bounds ({})", rp.name),
            rep.bound_failures.first().map(|r| format!("radius {r}")),
            format!("C = {GROWTH_C}, empirical {:.4}", rep.empirical_c),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_suite_passes() {
        let r = run(Suite::Worked, &VerifyConfig::default()).unwrap();
        assert!(r[0].passed(), "{}", r[0].to_text());
    }

    #[test]
    fn failing_check_prints_the_counterexample() {
        let c = Check::failing_at("x", Some("abca".into()), "d");
        let rep = SuiteReport { suite: "t", seed: 0, quick: true, checks: vec![c] };
        assert!(!rep.passed());
        assert!(rep.to_text().contains("counterexample: abca"));
    }

    #[test]
    fn first_failure_picks_the_smallest_index() {
        let f = first_failure(1000, |i| Ok((i % 97 == 13).then(|| i.to_string()))).unwrap();
        assert_eq!(f.as_deref(), Some("13"));
    }
}
