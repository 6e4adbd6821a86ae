//! Growth bounds for diagonal products of lamp-decorated factors, the
//! approximation schedule of a prescribed growth function, and the pipeline
//! that turns such a function into a lamp plan.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constants::{A_CONTRACT_C, GROWTH_C};
use crate::error::{Error, Result};
use crate::finite::{dihedral_lamp, klein_lamp, psl2_lamp, trivial_lamp, z2_lamp, FiniteGroup, FiniteGroupSpec};
use crate::marked::{ball, BallOptions, Diagonal};
use crate::norm::{alpha0, contraction_eta};
use crate::wreath::{build_delta_n, DeltaSpec, WreathGroup};

/// Relative slack used by every floating comparison in this module.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub eta: f64,
    pub lambda0: f64,
    pub alpha0: f64,
    /// Constant of the traverse-field contraction bound.
    pub a_contract_c: f64,
    /// Constant relating lamp volume growth to `Φ(ℓ) = ℓ`.
    pub c0: f64,
    /// Constant of the two-sided volume bound, calibrated on the reference plans.
    pub growth_c: f64,
}

impl Constants {
    pub fn new(c0: f64) -> Self {
        let eta = contraction_eta();
        Constants {
            eta,
            lambda0: 2.0 / eta,
            alpha0: alpha0(eta),
            a_contract_c: A_CONTRACT_C,
            c0,
            growth_c: GROWTH_C,
        }
    }

    pub fn with_growth_c(mut self, c: f64) -> Self {
        self.growth_c = c;
        self
    }
}

impl Default for Constants {
    fn default() -> Self {
        Constants::new(1.0)
    }
}

/// `1 / log₂ λ`, the exponent below which no admissible function may fall.
pub fn alpha_for(lambda: f64) -> f64 {
    1.0 / lambda.log2()
}

/// `min{1/2 − 1/λ, 1/(2λ), λ/2 − 1}`
pub fn c_lambda(lambda: f64) -> f64 {
    (0.5 - 1.0 / lambda).min(1.0 / (2.0 * lambda)).min(lambda / 2.0 - 1.0)
}

fn le(a: f64, b: f64) -> bool {
    a <= b + TOLERANCE * b.abs().max(a.abs()).max(1.0)
}

/// A positive function on `[1, x_max]` tabulated on a grid and interpolated
/// linearly in log-log coordinates. Below the first grid point the value is
/// constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FTable {
    pub log_x: Vec<f64>,
    pub log_f: Vec<f64>,
}

impl FTable {
    pub fn from_log_points(log_x: Vec<f64>, log_f: Vec<f64>) -> Result<Self> {
        if log_x.len() != log_f.len() {
            return Err(Error::invalid("grid and values differ in length"));
        }
        if log_x.len() < 2 {
            return Err(Error::invalid("a function table needs at least two points"));
        }
        if log_x.iter().chain(&log_f).any(|v| !v.is_finite()) {
            return Err(Error::invalid("function table contains a non-finite value"));
        }
        if log_x[0] > 0.0 {
            return Err(Error::invalid("function table must start at x <= 1"));
        }
        if let Some(i) = (1..log_x.len()).find(|&i| log_x[i] <= log_x[i - 1]) {
            return Err(Error::invalid(format!("grid is not increasing at row {i}")));
        }
        Ok(FTable { log_x, log_f })
    }

    pub fn from_points(xs: &[f64], fs: &[f64]) -> Result<Self> {
        if xs.iter().chain(fs).any(|&v| !(v > 0.0)) {
            return Err(Error::invalid("function tables need positive x and f"));
        }
        Self::from_log_points(xs.iter().map(|x| x.ln()).collect(), fs.iter().map(|f| f.ln()).collect())
    }

    /// Samples `log f` as a function of `log x` on `0, step, 2·step, …, max_log_x`.
    pub fn from_log_fn(log_f: impl Fn(f64) -> f64, max_log_x: f64, step: f64) -> Result<Self> {
        let n = (max_log_x / step).round() as usize;
        let log_x: Vec<f64> = (0..=n).map(|k| k as f64 * step).collect();
        let log_f = log_x.iter().map(|&l| log_f(l)).collect();
        Self::from_log_points(log_x, log_f)
    }

    /// Rows `x,f`; blank lines, `#` comments and a non-numeric header are skipped.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut fs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (Some(x), Some(f), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(Error::invalid(format!("line {}: expected two columns", i + 1)));
            };
            match (x.parse::<f64>(), f.parse::<f64>()) {
                (Ok(x), Ok(f)) => {
                    xs.push(x);
                    fs.push(f);
                }
                _ if xs.is_empty() && i == 0 => continue,
                _ => return Err(Error::invalid(format!("line {}: not a number", i + 1))),
            }
        }
        Self::from_points(&xs, &fs)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,f\n");
        for (lx, lf) in self.log_x.iter().zip(&self.log_f) {
            let _ = writeln!(s, "{:e},{:e}", lx.exp(), lf.exp());
        }
        s
    }

    /// SHA-256 of the canonical CSV rendering.
    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.to_csv().as_bytes()))
    }

    pub fn len(&self) -> usize {
        self.log_x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_x.is_empty()
    }

    pub fn max_log_x(&self) -> f64 {
        *self.log_x.last().expect("tables are nonempty")
    }

    pub fn log_eval(&self, log_x: f64) -> f64 {
        let xs = &self.log_x;
        if log_x <= xs[0] {
            return self.log_f[0];
        }
        let last = xs.len() - 1;
        if log_x >= xs[last] {
            return self.log_f[last];
        }
        let i = xs.partition_point(|&v| v <= log_x) - 1;
        let t = (log_x - xs[i]) / (xs[i + 1] - xs[i]);
        self.log_f[i] + t * (self.log_f[i + 1] - self.log_f[i])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.log_eval(x.ln()).exp()
    }

    /// Checks monotonicity, `f(x) ≥ x^α` and subadditivity on the grid.
    /// Subadditivity is first tested through the sufficient condition that
    /// `f(x)/x` is nonincreasing; if that fails, pairs of grid points are
    /// tested directly (on a strided subgrid for long tables).
    pub fn validate(&self, alpha: f64) -> Result<()> {
        let (xs, fs) = (&self.log_x, &self.log_f);
        for i in 1..xs.len() {
            if fs[i] < fs[i - 1] - TOLERANCE {
                return Err(Error::invalid(format!(
                    "f decreases between x = {:e} and x = {:e}",
                    xs[i - 1].exp(),
                    xs[i].exp()
                )));
            }
        }
        for (lx, lf) in xs.iter().zip(fs) {
            if *lx >= 0.0 && *lf < alpha * lx - TOLERANCE {
                return Err(Error::invalid(format!(
                    "f({:e}) = {:e} is below x^{alpha:.6}",
                    lx.exp(),
                    lf.exp()
                )));
            }
        }
        let star = (1..xs.len()).all(|i| fs[i] - fs[i - 1] <= xs[i] - xs[i - 1] + TOLERANCE);
        if star {
            return Ok(());
        }
        let stride = xs.len().div_ceil(2000).max(1);
        let grid: Vec<f64> = xs.iter().step_by(stride).map(|l| l.exp()).collect();
        let top = self.max_log_x().exp();
        for (i, &x) in grid.iter().enumerate() {
            for &y in &grid[i..] {
                if x + y > top {
                    break;
                }
                if !le(self.eval(x + y), self.eval(x) + self.eval(y)) {
                    return Err(Error::invalid(format!("f is not subadditive at x = {x:e}, y = {y:e}")));
                }
            }
        }
        Ok(())
    }
}

/// Tabulates a function that alternates between the line `x^α` and a
/// prescribed upper curve. In the slow phase `log f` grows with slope
/// `slow_slope` but never drops below `α log x`; once it sits on that line
/// for at least `slow_len` units of `log x`, the fast phase climbs with slope
/// `fast_slope` until it meets `log upper`.
pub fn oscillating_table(
    log_upper: impl Fn(f64) -> f64,
    alpha: f64,
    slow_slope: f64,
    fast_slope: f64,
    slow_len: f64,
    max_log_x: f64,
    step: f64,
) -> Result<FTable> {
    let n = (max_log_x / step).round() as usize;
    let mut log_x = Vec::with_capacity(n + 1);
    let mut log_f = Vec::with_capacity(n + 1);
    let (mut lf, mut run, mut fast) = (0.0f64, 0.0f64, false);
    log_x.push(0.0);
    log_f.push(0.0);
    for k in 1..=n {
        let lx = k as f64 * step;
        run += step;
        if fast {
            lf += fast_slope * step;
            if lf >= log_upper(lx) {
                fast = false;
                run = 0.0;
            }
        } else {
            lf += slow_slope * step;
            if lf <= alpha * lx {
                lf = alpha * lx;
            }
            if lf <= alpha * lx + 1e-12 && run >= slow_len {
                fast = true;
                run = 0.0;
            }
        }
        log_x.push(lx);
        log_f.push(lf);
    }
    FTable::from_log_points(log_x, log_f)
}

/// `log(x / log(e + x))^k` as a function of `log x`.
fn log_x_over_log_pow(lx: f64, k: f64) -> f64 {
    lx - k * (std::f64::consts::E + lx.exp()).ln().ln()
}

pub const FIXTURE_MAX_LOG_X: f64 = 420.0;
pub const FIXTURE_STEP: f64 = 0.01;

/// The admissible test functions for the smallest admissible `λ`:
/// the boundary `x^α`, `x/log(e+x)` and `x/log²(e+x)` (each floored at
/// `x^α`), an oscillation between `x^α` and `x/log(e+x)`, and a single
/// excursion towards `x^0.95`.
pub fn fixtures() -> Result<Vec<(&'static str, FTable)>> {
    let alpha = Constants::default().alpha0;
    let (top, step) = (FIXTURE_MAX_LOG_X, FIXTURE_STEP);
    Ok(vec![
        ("power", FTable::from_log_fn(|lx| alpha * lx, top, step)?),
        (
            "x_over_log",
            FTable::from_log_fn(|lx| (alpha * lx).max(log_x_over_log_pow(lx, 1.0)), top, step)?,
        ),
        (
            "x_over_log2",
            FTable::from_log_fn(|lx| (alpha * lx).max(log_x_over_log_pow(lx, 2.0)), top, step)?,
        ),
        (
            "oscillating",
            oscillating_table(|lx| log_x_over_log_pow(lx, 1.0), alpha, 0.0, 0.95, 5.0, top, step)?,
        ),
        ("single_bump", oscillating_table(|lx| 0.95 * lx, alpha, alpha, 0.95, 10.0, top, step)?),
    ])
}

pub fn fixture(name: &str) -> Result<FTable> {
    fixtures()?
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| t)
        .ok_or_else(|| Error::invalid(format!("unknown fixture {name}")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleTerm {
    pub j: usize,
    pub m: usize,
    /// First scale at which `f(λᵐ)/λᵐ` has dropped by a further factor `2/λ`.
    pub m_slope: usize,
    /// First scale at which `f` has doubled.
    pub m_double: usize,
    pub theta: f64,
    pub phi: f64,
    /// `f(λᵐ)`
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesisSchedule {
    pub lambda: f64,
    pub c_lambda: f64,
    /// Terms `0..=J`; term 0 is the seed `m = 0, θ = 0, φ = 1`.
    pub terms: Vec<ScheduleTerm>,
    pub requested: usize,
}

impl SynthesisSchedule {
    pub fn len(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn complete(&self) -> bool {
        self.len() >= self.requested
    }

    /// Violations of `θ_j ≥ θ_{j−1} + 1`, of `φ` nondecreasing and of
    /// `φ_j = f(λ^{m_j}) / 2^{θ_j}`.
    pub fn invariant_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for w in self.terms.windows(2) {
            let (p, t) = (&w[0], &w[1]);
            if !le(p.theta + 1.0, t.theta) {
                out.push(format!("theta_{} - theta_{} = {} < 1", t.j, p.j, t.theta - p.theta));
            }
            if !le(p.phi, t.phi) {
                out.push(format!("phi_{} = {} < phi_{} = {}", t.j, t.phi, p.j, p.phi));
            }
            let expected = t.value / 2f64.powf(t.theta);
            if (t.phi - expected).abs() > TOLERANCE * expected.max(1.0) {
                out.push(format!("phi_{} = {} but f/2^theta = {}", t.j, t.phi, expected));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("j,m,m_slope,m_double,theta,phi,value\n");
        for t in &self.terms {
            let _ = writeln!(s, "{},{},{},{},{},{},{}", t.j, t.m, t.m_slope, t.m_double, t.theta, t.phi, t.value);
        }
        s
    }

    /// Lower and upper envelopes at `x`:
    /// `c_λ Σ_i A_i(x)` and `λ max_i A_i(x)` with
    /// `A_i(x) = 2^{θ_i} min(x / λ^{θ_i}, φ_i)` over `i` with `λ^{θ_i} ≤ x`.
    pub fn envelopes(&self, x: f64) -> (f64, f64) {
        let (mut sum, mut max) = (0.0f64, 0.0f64);
        for t in &self.terms {
            let start = self.lambda.powf(t.theta);
            if start > x * (1.0 + 1e-12) {
                continue;
            }
            let a = 2f64.powf(t.theta) * (x / start).min(t.phi);
            sum += a;
            max = max.max(a);
        }
        (self.c_lambda * sum, self.lambda * max)
    }
}

fn scan_schedule(f: &FTable, lambda: f64, requested: usize) -> Result<(SynthesisSchedule, Option<String>)> {
    if !(lambda > 2.0) || !lambda.is_finite() {
        return Err(Error::invalid("the schedule needs lambda > 2"));
    }
    f.validate(alpha_for(lambda))?;
    let ln_l = lambda.ln();
    let ratio = (2.0 / lambda).ln();
    let top = ((f.max_log_x() + TOLERANCE) / ln_l).floor() as usize;
    let at = |m: usize| f.log_eval(m as f64 * ln_l).exp();
    let mut terms = vec![ScheduleTerm { j: 0, m: 0, m_slope: 0, m_double: 0, theta: 0.0, phi: 1.0, value: at(0) }];
    let mut stop = None;
    for j in 1..=requested {
        let prev = terms.last().expect("seeded");
        // compared on the θ scale, where the invariant θ_j ≥ θ_{j−1} + 1 is checked
        let theta_at = |m: usize| (at(m) / lambda.powi(m as i32)).ln() / ratio;
        let m_slope = (prev.m + 1..=top).find(|&m| le(prev.theta + 1.0, theta_at(m)));
        let m_double = (prev.m + 1..=top).find(|&m| le(2.0 * prev.value, at(m)));
        let (Some(m_slope), Some(m_double)) = (m_slope, m_double) else {
            stop = Some(format!(
                "term {j} needs a scale beyond the table (last term j = {} at m = {}, table ends at m = {top})",
                j - 1,
                prev.m
            ));
            break;
        };
        let m = m_slope.max(m_double);
        let value = at(m);
        let theta = theta_at(m);
        let phi = lambda.powf(m as f64 - theta);
        terms.push(ScheduleTerm { j, m, m_slope, m_double, theta, phi, value });
    }
    Ok((SynthesisSchedule { lambda, c_lambda: c_lambda(lambda), terms, requested }, stop))
}

/// The first `requested` terms of the approximation schedule of `f`.
/// Fails with a budget error if the table ends first.
pub fn schedule(f: &FTable, lambda: f64, requested: usize) -> Result<SynthesisSchedule> {
    let (s, stop) = scan_schedule(f, lambda, requested)?;
    match stop {
        None => Ok(s),
        Some(what) => Err(Error::Budget { what, last_radius: None, counts: Vec::new() }),
    }
}

/// As [`schedule`], but returns whatever terms fit on the table.
pub fn schedule_partial(f: &FTable, lambda: f64, requested: usize) -> Result<SynthesisSchedule> {
    Ok(scan_schedule(f, lambda, requested)?.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichViolation {
    pub x: f64,
    /// `j` with `λ^{m_{j−1}} ≤ x < λ^{m_j}`.
    pub interval: usize,
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub lambda: f64,
    pub c_lambda: f64,
    pub samples: usize,
    pub violations: Vec<SandwichViolation>,
    /// Largest `lower / f` and `f / upper` seen.
    pub worst_lower: f64,
    pub worst_upper: f64,
}

impl SandwichReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Log-uniform sample points on `[1, λ^{m_J})`.
pub fn sample_points(schedule: &SynthesisSchedule, count: usize) -> Vec<f64> {
    let hi = schedule.terms.last().expect("seeded").m as f64 * schedule.lambda.ln();
    (0..count).map(|s| (hi * s as f64 / count as f64).exp()).collect()
}

/// Tests `c_λ Σ A_i(x) ≤ f(x) ≤ λ max A_i(x)` at every sample.
pub fn sandwich_check(f: &FTable, schedule: &SynthesisSchedule, xs: &[f64]) -> SandwichReport {
    let mut report = SandwichReport {
        lambda: schedule.lambda,
        c_lambda: schedule.c_lambda,
        samples: xs.len(),
        violations: Vec::new(),
        worst_lower: 0.0,
        worst_upper: 0.0,
    };
    for &x in xs {
        let (lower, upper) = schedule.envelopes(x);
        let value = f.eval(x);
        report.worst_lower = report.worst_lower.max(lower / value);
        report.worst_upper = report.worst_upper.max(value / upper);
        if !le(lower, value) || !le(value, upper) {
            let interval = schedule
                .terms
                .iter()
                .position(|t| schedule.lambda.powi(t.m as i32) > x)
                .unwrap_or(schedule.terms.len());
            report.violations.push(SandwichViolation { x, interval, lower, value, upper });
        }
    }
    report
}

/// A lamp candidate with its measured Cayley diameter.
#[derive(Clone)]
pub struct FamilyMember {
    pub group: Arc<FiniteGroup>,
    pub diameter: usize,
}

impl FamilyMember {
    pub fn new(spec: FiniteGroupSpec) -> Result<Self> {
        let group = Arc::new(FiniteGroup::new(spec)?);
        group.check_uv_marking()?;
        let diameter = group.diameter();
        Ok(FamilyMember { group, diameter })
    }

    pub fn name(&self) -> &str {
        &self.group.spec.name
    }
}

/// A finite library of lamp groups standing in for a family with diameters
/// of every size.
#[derive(Clone)]
pub struct LampFamily {
    pub members: Vec<FamilyMember>,
    /// Largest accepted `max(d/D, D/d)` between requested and actual diameter.
    pub max_distortion: f64,
}

impl LampFamily {
    pub fn new(specs: Vec<FiniteGroupSpec>, max_distortion: f64) -> Result<Self> {
        let members = specs.into_iter().map(FamilyMember::new).collect::<Result<Vec<_>>>()?;
        Ok(LampFamily { members, max_distortion })
    }

    /// `ℤ/2`, Klein, dihedral of order 8 and 16, `PSL₂(ℤ/5)`, `PSL₂(ℤ/25)`.
    pub fn standard() -> Result<Self> {
        Self::new(
            vec![z2_lamp(), klein_lamp(), dihedral_lamp(4)?, dihedral_lamp(8)?, psl2_lamp(5)?, psl2_lamp(25)?],
            4.0,
        )
    }

    /// Members of order at most `max_order`.
    pub fn restricted(&self, max_order: usize) -> Self {
        LampFamily {
            members: self.members.iter().filter(|m| m.group.order() <= max_order).cloned().collect(),
            max_distortion: self.max_distortion,
        }
    }

    /// Member with diameter nearest to `d` on a log scale, ties to the smaller group.
    pub fn select(&self, d: usize) -> Result<(&FamilyMember, f64)> {
        let d = d.max(1) as f64;
        let distortion = |m: &FamilyMember| {
            let dm = m.diameter.max(1) as f64;
            (dm / d).max(d / dm)
        };
        let best = self
            .members
            .iter()
            .filter(|m| m.diameter > 0)
            .min_by(|a, b| {
                distortion(a)
                    .total_cmp(&distortion(b))
                    .then(a.group.order().cmp(&b.group.order()))
            })
            .ok_or_else(|| Error::invalid("lamp family is empty"))?;
        let dist = distortion(best);
        if dist > self.max_distortion {
            return Err(Error::Budget {
                what: format!(
                    "no lamp with diameter near {d} (closest: {} with diameter {}, distortion {dist:.3} > {})",
                    best.name(),
                    best.diameter,
                    self.max_distortion
                ),
                last_radius: None,
                counts: Vec::new(),
            });
        }
        Ok((best, dist))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub level: usize,
    pub group: String,
    pub order: usize,
    pub diameter: usize,
    /// Diameter asked for by the schedule, if the entry came from one.
    pub requested: Option<usize>,
    pub distortion: f64,
    /// Smallest `C₀ ≥ 1` with `ℓ/C₀ ≤ log v(ℓ) ≤ C₀ ℓ` for `1 ≤ ℓ ≤ diameter`.
    pub c0: f64,
}

/// Nontrivial lamps by level; all other levels carry the trivial group.
/// The lamp growth function is `Φ(ℓ) = ℓ`.
#[derive(Clone, Serialize, Deserialize)]
pub struct LampPlan {
    pub entries: Vec<PlanEntry>,
    pub c0: f64,
    #[serde(skip)]
    groups: BTreeMap<usize, Arc<FiniteGroup>>,
}

impl std::fmt::Debug for LampPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LampPlan").field("entries", &self.entries).field("c0", &self.c0).finish()
    }
}

/// `C₀` for `Φ(ℓ) = ℓ` measured from the growth sequence of `group`.
pub fn measured_c0(group: &FiniteGroup) -> Result<f64> {
    let counts = &group.growth().counts;
    let mut c0 = 1.0f64;
    for (l, &v) in counts.iter().enumerate().skip(1) {
        let lv = (v as f64).ln();
        if lv <= 0.0 {
            return Err(Error::invariant(format!("{} has a trivial ball of radius {l}", group.spec.name)));
        }
        let l = l as f64;
        c0 = c0.max(lv / l).max(l / lv).max((1.0 + l).ln() / l);
    }
    Ok(c0)
}

impl LampPlan {
    pub fn trivial() -> Self {
        LampPlan { entries: Vec::new(), c0: 1.0, groups: BTreeMap::new() }
    }

    /// A plan with the given lamps; levels must be distinct and positive.
    pub fn from_groups(lamps: Vec<(usize, Arc<FiniteGroup>)>) -> Result<Self> {
        let mut plan = Self::trivial();
        for (level, g) in lamps {
            let diameter = g.diameter();
            plan.insert(level, g, diameter, None, 1.0)?;
        }
        Ok(plan)
    }

    fn insert(
        &mut self,
        level: usize,
        group: Arc<FiniteGroup>,
        diameter: usize,
        requested: Option<usize>,
        distortion: f64,
    ) -> Result<()> {
        if level == 0 {
            return Err(Error::invalid("lamp levels start at 1"));
        }
        if self.groups.contains_key(&level) {
            return Err(Error::invalid(format!("two lamps at level {level}")));
        }
        group.check_uv_marking()?;
        if group.order() == 1 {
            return Ok(());
        }
        let c0 = measured_c0(&group)?;
        self.c0 = self.c0.max(c0);
        self.entries.push(PlanEntry {
            level,
            group: group.spec.name.clone(),
            order: group.order(),
            diameter,
            requested,
            distortion,
            c0,
        });
        self.entries.sort_by_key(|e| e.level);
        self.groups.insert(level, group);
        Ok(())
    }

    pub fn lamp(&self, level: usize) -> Option<&Arc<FiniteGroup>> {
        self.groups.get(&level)
    }

    pub fn entry(&self, level: usize) -> Option<&PlanEntry> {
        self.entries.iter().find(|e| e.level == level)
    }

    pub fn max_level(&self) -> usize {
        self.entries.last().map_or(0, |e| e.level)
    }

    /// Re-checks `ℓ/C₀ ≤ log v(ℓ) ≤ C₀ ℓ` and `ℓ ≥ log(1+ℓ)/C₀` for every lamp.
    pub fn verify_growth_assumption(&self) -> Result<()> {
        for (level, g) in &self.groups {
            for (l, &v) in g.growth().counts.iter().enumerate().skip(1) {
                let (lv, l) = ((v as f64).ln(), l as f64);
                if !le(l / self.c0, lv) || !le(lv, self.c0 * l) || !le((1.0 + l).ln() / self.c0, l) {
                    return Err(Error::invariant(format!(
                        "lamp at level {level} violates the growth assumption at radius {l}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Lamp `F_{⌊θ_j⌋}` of diameter close to `⌊φ_j⌋` for each term `j ≥ 1` with
/// `⌊θ_j⌋ ≤ max_level`; every other level is trivial.
pub fn lamp_plan_from_schedule(schedule: &SynthesisSchedule, family: &LampFamily, max_level: usize) -> Result<LampPlan> {
    let mut plan = LampPlan::trivial();
    for t in schedule.terms.iter().skip(1) {
        let level = (t.theta + TOLERANCE).floor() as usize;
        if level == 0 || level > max_level {
            continue;
        }
        let requested = (t.phi + TOLERANCE).floor().max(1.0) as usize;
        let (member, distortion) = family.select(requested)?;
        plan.insert(level, member.group.clone(), member.diameter, Some(requested), distortion)?;
    }
    plan.verify_growth_assumption()?;
    Ok(plan)
}

/// `J_r = {j : r ≥ (2/η)^j and F_j nontrivial}`.
pub fn active_levels(r: usize, plan: &LampPlan, consts: &Constants) -> Vec<usize> {
    plan.entries
        .iter()
        .map(|e| e.level)
        .filter(|&j| le(consts.lambda0.powi(j as i32), r as f64))
        .collect()
}

fn level_term(r: usize, e: &PlanEntry, consts: &Constants) -> f64 {
    let scaled = (consts.eta / 2.0).powi(e.level as i32) * r as f64;
    2f64.powi(e.level as i32) * scaled.min(e.diameter as f64)
}

/// Sum over `J_r` of `2^j Φ(min((η/2)^j r, Diam F_j))`, and the base term `r^{α₀}`.
pub fn bound_shape(r: usize, plan: &LampPlan, consts: &Constants) -> (f64, f64, f64) {
    let active = active_levels(r, plan, consts);
    let terms: Vec<f64> = active
        .iter()
        .map(|&j| level_term(r, plan.entry(j).expect("active levels have entries"), consts))
        .collect();
    let sum = terms.iter().sum();
    let max = terms.iter().copied().fold(0.0, f64::max);
    (sum, max, (r as f64).powf(consts.alpha0))
}

pub fn upper_bound(r: usize, plan: &LampPlan, consts: &Constants) -> f64 {
    let (sum, _, base) = bound_shape(r, plan, consts);
    consts.growth_c * (sum + base)
}

pub fn lower_bound(r: usize, plan: &LampPlan, consts: &Constants) -> f64 {
    let (_, max, base) = bound_shape(r, plan, consts);
    (max + base) / consts.growth_c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `r < (2/η)ⁿ`: the lamps are not yet visible.
    Small,
    /// `(2/η)ⁿ ≤ r < (2/η)ⁿ Diam F`: the lamp configurations grow.
    Middle,
    /// `r ≥ (2/η)ⁿ Diam F`: all lamp configurations on the level are reached.
    Saturated,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeValue {
    pub regime: Regime,
    /// Order of magnitude of `log v_{Δ_n}(r)`.
    pub value: f64,
}

/// Piecewise description of `log v_{Δ_n}(r)` for the factor with lamp `F`.
pub fn factor_regime(n: usize, r: usize, lamp: &FiniteGroup, consts: &Constants) -> RegimeValue {
    let start = consts.lambda0.powi(n as i32);
    let diam = lamp.diameter();
    let base = (r as f64).powf(consts.alpha0);
    let r = r as f64;
    let two_n = 2f64.powi(n as i32);
    if r < start * (1.0 - 1e-12) {
        RegimeValue { regime: Regime::Small, value: base }
    } else if r < start * diam as f64 * (1.0 - 1e-12) {
        let l = ((consts.eta / 2.0).powi(n as i32) * r).floor().min(diam as f64) as usize;
        let v = lamp.growth().volume(l).expect("radius within the diameter");
        RegimeValue { regime: Regime::Middle, value: two_n * (v as f64).ln() + base }
    } else {
        RegimeValue { regime: Regime::Saturated, value: two_n * (lamp.order() as f64).ln() + base }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRow {
    pub r: usize,
    pub volume: u64,
    pub factor_max: u64,
    pub log_volume: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalReport {
    pub levels: usize,
    pub radius: usize,
    pub growth_c: f64,
    pub rows: Vec<EmpiricalRow>,
    /// Radii where the diagonal ball is smaller than some factor ball.
    pub dominance_failures: Vec<usize>,
    /// Radii where `log v` leaves `[lower, upper]`.
    pub bound_failures: Vec<usize>,
    /// Smallest constant that would make both bounds hold on this data.
    pub empirical_c: f64,
}

impl EmpiricalReport {
    pub fn passed(&self) -> bool {
        self.dominance_failures.is_empty() && self.bound_failures.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,volume,factor_max,log_volume,lower,upper\n");
        for row in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                row.r, row.volume, row.factor_max, row.log_volume, row.lower, row.upper
            );
        }
        s
    }
}

/// The factors `Δ_1, …, Δ_levels` of the diagonal product, with the plan's
/// lamps and the trivial lamp elsewhere.
pub fn plan_factors(plan: &LampPlan, levels: usize) -> Result<Vec<WreathGroup>> {
    let trivial = Arc::new(FiniteGroup::new(trivial_lamp())?);
    (1..=levels)
        .map(|n| {
            let lamp = plan.lamp(n).cloned().unwrap_or_else(|| trivial.clone());
            build_delta_n(&DeltaSpec::new(n, lamp))
        })
        .collect()
}

/// Exact ball volumes of the diagonal product of `Δ_1, …, Δ_levels` against
/// the two-sided bound and against every factor.
pub fn empirical_vs_bounds(
    plan: &LampPlan,
    levels: usize,
    radius: usize,
    consts: &Constants,
    opts: BallOptions,
) -> Result<EmpiricalReport> {
    if plan.max_level() > levels {
        return Err(Error::invalid("the plan has lamps above the requested levels"));
    }
    let factors = plan_factors(plan, levels)?;
    let factor_counts = factors
        .iter()
        .map(|g| ball(g, radius, opts).map(|p| p.counts))
        .collect::<Result<Vec<_>>>()?;
    let diagonal = Diagonal::new(factors)?;
    let counts = ball(&diagonal, radius, opts)?.counts;
    let mut report = EmpiricalReport {
        levels,
        radius,
        growth_c: consts.growth_c,
        rows: Vec::new(),
        dominance_failures: Vec::new(),
        bound_failures: Vec::new(),
        empirical_c: 1.0,
    };
    for (r, &volume) in counts.iter().enumerate() {
        let factor_max = factor_counts.iter().map(|c| c[r]).max().unwrap_or(1);
        if volume < factor_max {
            report.dominance_failures.push(r);
        }
        let log_volume = (volume as f64).ln();
        let (sum, max, base) = bound_shape(r, plan, consts);
        let (lower, upper) = ((max + base) / consts.growth_c, consts.growth_c * (sum + base));
        if r > 0 {
            report.empirical_c = report.empirical_c.max(log_volume / (sum + base)).max((max + base) / log_volume);
            if !le(lower, log_volume) || !le(log_volume, upper) {
                report.bound_failures.push(r);
            }
        }
        report.rows.push(EmpiricalRow { r, volume, factor_max, log_volume, lower, upper });
    }
    Ok(report)
}

/// A plan together with the size of the diagonal product it is tested on.
pub struct ReferencePlan {
    pub name: &'static str,
    pub plan: LampPlan,
    pub levels: usize,
    pub radius: usize,
}

/// The plans on which the growth constant is calibrated: the bare tower of
/// tree quotients, a Klein lamp on level 2, and `PSL₂(ℤ/5)` on level 1 with
/// the dihedral group of order 16 on level 3.
pub fn reference_plans() -> Result<Vec<ReferencePlan>> {
    let klein = Arc::new(FiniteGroup::new(klein_lamp())?);
    let psl = Arc::new(FiniteGroup::new(psl2_lamp(5)?)?);
    let dihedral = Arc::new(FiniteGroup::new(dihedral_lamp(8)?)?);
    Ok(vec![
        ReferencePlan { name: "tower", plan: LampPlan::trivial(), levels: 5, radius: 10 },
        ReferencePlan { name: "klein_level2", plan: LampPlan::from_groups(vec![(2, klein)])?, levels: 5, radius: 10 },
        ReferencePlan {
            name: "mixed",
            plan: LampPlan::from_groups(vec![(1, psl), (3, dihedral)])?,
            levels: 5,
            radius: 10,
        },
    ])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub table_sha256: String,
    pub table_points: usize,
    pub lambda: f64,
    pub requested_terms: usize,
    pub max_level: usize,
    pub constants: Constants,
    pub schedule: SynthesisSchedule,
    pub sandwich_samples: usize,
    pub sandwich_violations: usize,
    pub plan: LampPlan,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Table to schedule to plan, with the sandwich check on `samples` points.
pub fn synthesize(
    f: &FTable,
    lambda: f64,
    terms: usize,
    family: &LampFamily,
    max_level: usize,
    samples: usize,
) -> Result<(Manifest, SandwichReport)> {
    let s = schedule(f, lambda, terms)?;
    let failures = s.invariant_failures();
    if let Some(first) = failures.first() {
        return Err(Error::invariant(format!("schedule: {first}")));
    }
    let sandwich = sandwich_check(f, &s, &sample_points(&s, samples));
    let plan = lamp_plan_from_schedule(&s, family, max_level)?;
    let manifest = Manifest {
        table_sha256: f.sha256(),
        table_points: f.len(),
        lambda,
        requested_terms: terms,
        max_level,
        constants: Constants::new(plan.c0),
        schedule: s,
        sandwich_samples: samples,
        sandwich_violations: sandwich.violations.len(),
        plan,
    };
    Ok((manifest, sandwich))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lambda0() -> f64 {
        Constants::default().lambda0
    }

    /// Direct evaluation of the closed forms, independent of the tables.
    fn closed_power(x: f64) -> f64 {
        x.max(1.0).powf(Constants::default().alpha0)
    }

    #[test]
    fn constants_are_consistent() {
        let c = Constants::default();
        assert!(c.alpha0 > 0.767 && c.alpha0 < 0.768);
        assert!((c.lambda0 * c.eta - 2.0).abs() < 1e-12);
        assert!((alpha_for(c.lambda0) - c.alpha0).abs() < 1e-12);
        let cl = c_lambda(3.0);
        assert!((cl - (1.0f64 / 6.0)).abs() < 1e-15);
        assert!((c_lambda(2.2) - (0.5 - 1.0 / 2.2)).abs() < 1e-12);
    }

    #[test]
    fn table_interpolates_power_laws_exactly() {
        let t = FTable::from_log_fn(|lx| 0.5 * lx, 10.0, 0.7).unwrap();
        for x in [1.0, 2.0, 17.3, 1000.0] {
            assert!((t.eval(x) - x.sqrt()).abs() < 1e-9 * x.sqrt());
        }
        assert_eq!(t.eval(0.5), 1.0);
    }

    #[test]
    fn csv_round_trip_and_hash() {
        let t = FTable::from_points(&[1.0, 2.0, 4.0], &[1.0, 1.5, 2.5]).unwrap();
        let back = FTable::parse_csv(&t.to_csv()).unwrap();
        assert_eq!(back.sha256(), t.sha256());
        assert_eq!(t.sha256().len(), 64);
        assert!(FTable::parse_csv("x,f\n1,1\n2,oops\n").is_err());
    }

    #[test]
    fn validation_rejects_inadmissible_tables() {
        let a = alpha_for(lambda0());
        let decreasing = FTable::from_points(&[1.0, 2.0, 4.0], &[1.0, 2.0, 1.9]).unwrap();
        assert!(decreasing.validate(a).is_err());
        let low = FTable::from_points(&[1.0, 10.0], &[1.0, 2.0]).unwrap();
        assert!(low.validate(a).is_err());
        let superadditive = FTable::from_log_fn(|lx| 1.2 * lx, 5.0, 0.1).unwrap();
        assert!(superadditive.validate(a).is_err());
        let ok = FTable::from_log_fn(|lx| 0.9 * lx, 5.0, 0.1).unwrap();
        assert!(ok.validate(a).is_ok());
    }

    #[test]
    fn boundary_function_has_phi_at_least_one() {
        let t = fixture("power").unwrap();
        let s = schedule(&t, lambda0(), 30).unwrap();
        assert_eq!((s.terms[0].m, s.terms[0].theta), (0, 0.0));
        assert!(s.terms.iter().all(|t| t.phi >= 1.0 - 1e-9));
        assert!(s.invariant_failures().is_empty());
    }

    #[test]
    fn schedule_matches_direct_scan() {
        let lam = lambda0();
        let t = fixture("power").unwrap();
        let s = schedule(&t, lam, 8).unwrap();
        let (mut m0, mut th0) = (0usize, 0.0f64);
        for term in &s.terms[1..] {
            let f = |m: usize| closed_power(lam.powi(m as i32));
            let mp = (m0 + 1..)
                .find(|&m| f(m) / lam.powi(m as i32) <= (2.0 / lam).powf(th0 + 1.0) * (1.0 + 1e-9))
                .unwrap();
            let mpp = (m0 + 1..).find(|&m| f(m) >= 2.0 * f(m0) * (1.0 - 1e-9)).unwrap();
            assert_eq!((term.m_slope, term.m_double), (mp, mpp));
            m0 = mp.max(mpp);
            th0 = (f(m0) / lam.powi(m0 as i32)).ln() / (2.0 / lam).ln();
            assert_eq!(term.m, m0);
            assert!((term.theta - th0).abs() < 1e-9);
        }
    }

    #[test]
    fn schedule_reports_exhausted_grid() {
        let t = FTable::from_log_fn(|lx| 0.9 * lx, 20.0, 0.1).unwrap();
        let err = schedule(&t, lambda0(), 50).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(schedule_partial(&t, lambda0(), 50).unwrap().len() < 50);
        assert!(schedule(&t, 2.0, 3).is_err());
    }

    #[test]
    fn max_term_equals_f_at_schedule_points() {
        let t = fixture("x_over_log").unwrap();
        let s = schedule(&t, lambda0(), 20).unwrap();
        for term in &s.terms[1..] {
            let a = 2f64.powf(term.theta) * term.phi;
            assert!((a - term.value).abs() < 1e-9 * term.value);
        }
    }

    #[test]
    fn fixtures_pass_the_sandwich() {
        for (name, t) in fixtures().unwrap() {
            let s = schedule_partial(&t, lambda0(), 60).unwrap();
            assert!(s.len() >= 20, "{name}");
            assert!(s.invariant_failures().is_empty(), "{name}");
            let r = sandwich_check(&t, &s, &sample_points(&s, 1000));
            assert!(r.passed(), "{name}: {:?}", r.violations.first());
        }
    }

    #[test]
    fn single_term_schedule() {
        let t = fixture("x_over_log").unwrap();
        let s = schedule(&t, lambda0(), 1).unwrap();
        assert_eq!(s.len(), 1);
        let r = sandwich_check(&t, &s, &sample_points(&s, 200));
        assert!(r.passed(), "{:?}", r.violations.first());
    }

    #[test]
    fn oscillating_fixture_returns_to_the_lower_line() {
        let t = fixture("oscillating").unwrap();
        let alpha = Constants::default().alpha0;
        let mut touches = 0;
        let mut above = false;
        for (lx, lf) in t.log_x.iter().zip(&t.log_f).skip(1) {
            let upper = log_x_over_log_pow(*lx, 1.0);
            if *lf >= upper - 1e-9 && !above {
                touches += 1;
                above = true;
            }
            if *lf <= alpha * lx + 1e-12 {
                above = false;
            }
        }
        assert!(touches >= 2, "{touches}");
    }

    #[test]
    fn family_selection_and_plan() {
        let family = LampFamily::standard().unwrap();
        let names: Vec<_> = family.members.iter().map(|m| (m.name().to_string(), m.diameter)).collect();
        assert_eq!(names[0], ("z2".to_string(), 1));
        let psl = family.members.iter().find(|m| m.name() == "psl2_5").unwrap();
        assert_eq!(psl.group.order(), 60);
        let (m, d) = family.select(1).unwrap();
        assert_eq!((m.name(), d), ("z2", 1.0));
        assert!(family.select(10_000).is_err());

        let empty = SynthesisSchedule { lambda: 3.0, c_lambda: c_lambda(3.0), terms: vec![], requested: 0 };
        let plan = lamp_plan_from_schedule(&empty, &family, 5).unwrap();
        assert!(plan.entries.is_empty());

        let t = fixture("power").unwrap();
        let s = schedule(&t, lambda0(), 10).unwrap();
        let plan = lamp_plan_from_schedule(&s, &family, 5).unwrap();
        assert!(!plan.entries.is_empty());
        plan.verify_growth_assumption().unwrap();
    }

    #[test]
    fn bounds_and_regimes() {
        let consts = Constants::default();
        let lamp = Arc::new(FiniteGroup::new(dihedral_lamp(8).unwrap()).unwrap());
        let plan = LampPlan::from_groups(vec![(2, lamp.clone())]).unwrap();
        assert!(active_levels(6, &plan, &consts).is_empty());
        let r = 1usize;
        assert!((upper_bound(r, &plan, &consts) - consts.growth_c).abs() < 1e-12);
        assert_eq!(active_levels(7, &plan, &consts), vec![2]);
        for r in 0..200 {
            assert!(upper_bound(r, &plan, &consts) >= lower_bound(r, &plan, &consts));
        }
        assert_eq!(factor_regime(3, 1, &lamp, &consts).regime, Regime::Small);
        let start = consts.lambda0.powi(2);
        let boundary = start.ceil() as usize;
        assert_eq!(factor_regime(2, boundary, &lamp, &consts).regime, Regime::Middle);
        let huge = factor_regime(2, 10_000, &lamp, &consts);
        assert_eq!(huge.regime, Regime::Saturated);
        assert!(huge.value >= 4.0 * 16f64.ln());

        let mid = factor_regime(2, 8, &lamp, &consts);
        let shape = upper_bound(8, &plan, &consts) / consts.growth_c;
        let c0 = plan.c0;
        assert!(mid.value <= c0 * shape + 1e-9 && shape <= c0 * mid.value + 1e-9);
    }

    #[test]
    fn exact_boundary_is_middle_regime() {
        let consts = Constants { lambda0: 2.0, ..Constants::default() };
        let lamp = FiniteGroup::new(dihedral_lamp(4).unwrap()).unwrap();
        let diam = lamp.diameter();
        assert!(diam >= 2);
        assert_eq!(factor_regime(2, 3, &lamp, &consts).regime, Regime::Small);
        assert_eq!(factor_regime(2, 4, &lamp, &consts).regime, Regime::Middle);
        assert_eq!(factor_regime(2, 4 * diam, &lamp, &consts).regime, Regime::Saturated);
    }
}
