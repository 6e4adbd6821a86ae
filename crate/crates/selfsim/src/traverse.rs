//! Traverse fields: the record of visits that the inverted orbit of the pair
//! `(1ⁿ, 1ⁿ⁻¹0)` leaves on each vertex of level `n`, under the first
//! Grigorchuk group.
//!
//! The point after the prefix `z₁…z_i` is `x·(z₁…z_i)⁻¹`. Since every
//! generator is an involution, the level permutation `p_i(x) = x·(z₁…z_i)⁻¹`
//! satisfies `p_i(x) = p_{i−1}(x·z_i)`, which is what [`FieldWalker`] keeps.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::A_CONTRACT_C;
use crate::error::{Error, Result};
use crate::finite::FiniteGroup;
use crate::marked::MarkedGroup;
use crate::norm::contraction_eta;
use crate::tree::{Generators, OmegaString, TreeAut, Vertex};
use crate::word::{formal_recursion, random_pre_reduced, zeta_word, Letter, Word};
use crate::wreath::{WreathGroup, WreathKind};

/// Largest level handled by the traverse-field routines.
pub const MAX_FIELD_LEVEL: usize = 20;

/// Longest word accepted by the exhaustive sweep.
pub const MAX_EXHAUSTIVE_RADIUS: usize = 14;

fn check_level(n: usize) -> Result<()> {
    if n == 0 || n > MAX_FIELD_LEVEL {
        return Err(Error::invalid(format!("traverse level must be in 1..={MAX_FIELD_LEVEL}, got {n}")));
    }
    Ok(())
}

/// Level-`n` permutations of `a, b, c, d` in the first Grigorchuk group.
#[derive(Clone, Debug)]
pub struct LevelPerms {
    pub level: usize,
    perms: [Vec<u32>; 4],
}

impl LevelPerms {
    pub fn new(n: usize) -> Result<Self> {
        check_level(n)?;
        let gens = Generators::new(&OmegaString::first(), n)?;
        let perms = gens.all().clone().map(|g| g.level_perm(n));
        Ok(LevelPerms { level: n, perms })
    }

    pub fn perm(&self, l: Letter) -> Result<&[u32]> {
        l.tree_index()
            .map(|i| self.perms[i].as_slice())
            .ok_or_else(|| Error::invalid(format!("traverse fields take tree letters only, got {l}")))
    }

    fn ones(&self) -> u32 {
        Vertex::ones(self.level).code()
    }

    fn sibling(&self) -> u32 {
        Vertex::ones_then_zero(self.level).code()
    }
}

/// `((1ⁿ, 1ⁿ⁻¹0)·(z₁…z_i)⁻¹)_{i=0..|w|}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InvertedOrbitPair {
    pub level: usize,
    pub pairs: Vec<(Vertex, Vertex)>,
}

impl InvertedOrbitPair {
    pub fn to_display(&self) -> String {
        let body: Vec<String> = self.pairs.iter().map(|(x, y)| format!("({x},{y})")).collect();
        format!("({})", body.join(","))
    }
}

/// Incremental inverted orbit of the pair with the collapsed pattern lengths.
/// `push` and `pop` let a depth-first search share one walker.
#[derive(Clone, Debug)]
pub struct FieldWalker<'p> {
    perms: &'p LevelPerms,
    inv: Vec<Vec<u32>>,
    last: Vec<u8>,
    total: usize,
    undo: Vec<[(u32, u8); 2]>,
}

const NONE: u8 = 2;

impl<'p> FieldWalker<'p> {
    pub fn new(perms: &'p LevelPerms) -> Self {
        let size = 1usize << perms.level;
        let mut w = FieldWalker {
            perms,
            inv: vec![(0..size as u32).collect()],
            last: vec![NONE; size],
            total: 0,
            undo: Vec::new(),
        };
        w.record();
        w
    }

    /// Current pair `(1ⁿ·p⁻¹, 1ⁿ⁻¹0·p⁻¹)` as codes.
    pub fn pair(&self) -> (u32, u32) {
        let inv = self.inv.last().expect("walker never empty");
        (inv[self.perms.ones() as usize], inv[self.perms.sibling() as usize])
    }

    /// `A(n, w)` of the current word.
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn depth(&self) -> usize {
        self.inv.len() - 1
    }

    fn record(&mut self) {
        let (p1, p0) = self.pair();
        let mut entry = [(p1, NONE), (p0, NONE)];
        for (slot, (p, bit)) in entry.iter_mut().zip([(p1, 1u8), (p0, 0u8)]) {
            slot.1 = self.last[p as usize];
            if self.last[p as usize] != bit {
                self.last[p as usize] = bit;
                self.total += 1;
            }
        }
        self.undo.push(entry);
    }

    pub fn push(&mut self, l: Letter) -> Result<()> {
        let perm = self.perms.perm(l)?;
        let prev = self.inv.last().expect("walker never empty");
        let next: Vec<u32> = perm.iter().map(|&y| prev[y as usize]).collect();
        self.inv.push(next);
        self.record();
        Ok(())
    }

    pub fn pop(&mut self) {
        if self.inv.len() <= 1 {
            return;
        }
        let entry = self.undo.pop().expect("one undo entry per step");
        // restore in reverse order of recording
        for &(p, old) in entry.iter().rev() {
            if self.last[p as usize] != old {
                self.total -= 1;
                self.last[p as usize] = old;
            }
        }
        self.inv.pop();
    }
}

pub fn inverted_orbit_pair(w: &Word, n: usize) -> Result<InvertedOrbitPair> {
    let perms = LevelPerms::new(n)?;
    let mut walker = FieldWalker::new(&perms);
    let mut pairs = Vec::with_capacity(w.len() + 1);
    let to_pair = |(x, y): (u32, u32)| (Vertex::from_parts(n, x), Vertex::from_parts(n, y));
    pairs.push(to_pair(walker.pair()));
    for &l in w.letters() {
        walker.push(l)?;
        pairs.push(to_pair(walker.pair()));
    }
    Ok(InvertedOrbitPair { level: n, pairs })
}

/// Patterns `P(x, w)` indexed by level-`n` codes, raw strings `P̃(x, w)`,
/// and `A(n, w) = Σ|P(x, w)|`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraverseField {
    pub level: usize,
    pub patterns: Vec<String>,
    pub raw: Vec<String>,
    pub a: usize,
}

#[derive(Serialize)]
struct FieldJson<'a> {
    level: usize,
    a: usize,
    patterns: BTreeMap<String, &'a str>,
}

impl TraverseField {
    pub fn pattern(&self, x: &Vertex) -> Result<&str> {
        if x.len() != self.level {
            return Err(Error::LevelMismatch(x.len(), self.level));
        }
        Ok(&self.patterns[x.code() as usize])
    }

    pub fn raw_pattern(&self, x: &Vertex) -> Result<&str> {
        if x.len() != self.level {
            return Err(Error::LevelMismatch(x.len(), self.level));
        }
        Ok(&self.raw[x.code() as usize])
    }

    /// Vertices with a nonempty pattern, mapped to their pattern, plus `A`.
    pub fn to_json(&self) -> Result<String> {
        let patterns = self
            .patterns
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_empty())
            .map(|(x, p)| (Vertex::from_parts(self.level, x as u32).to_string(), p.as_str()))
            .collect();
        Ok(serde_json::to_string_pretty(&FieldJson { level: self.level, a: self.a, patterns })?)
    }
}

fn collapse(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for c in raw.chars() {
        if !out.ends_with(c) {
            out.push(c);
        }
    }
    out
}

pub fn traverse_field(w: &Word, n: usize) -> Result<TraverseField> {
    let orbit = inverted_orbit_pair(w, n)?;
    let mut raw = vec![String::new(); 1 << n];
    for (x, y) in &orbit.pairs {
        raw[x.code() as usize].push('1');
        raw[y.code() as usize].push('0');
    }
    let patterns: Vec<String> = raw.iter().map(|r| collapse(r)).collect();
    let a = patterns.iter().map(String::len).sum();
    Ok(TraverseField { level: n, patterns, raw, a })
}

/// `A(n, w)` without building the strings.
pub fn field_total(w: &Word, perms: &LevelPerms) -> Result<usize> {
    let mut walker = FieldWalker::new(perms);
    for &l in w.letters() {
        walker.push(l)?;
    }
    Ok(walker.total())
}

/// Order preserving embedding of `u` into `v` (greedy subsequence test).
pub fn embeds(u: &str, v: &str) -> bool {
    let mut rest = v.chars();
    u.chars().all(|c| rest.any(|d| d == c))
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub level: usize,
    pub checked: usize,
    /// Level-`n` vertices whose pattern does not embed into the pattern of
    /// the corresponding vertex for the section word.
    pub violations: Vec<String>,
    /// `A(n, w)` and `A(n−1, w₀) + A(n−1, w₁)`.
    pub total: usize,
    pub sections_total: usize,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.total <= self.sections_total
    }
}

/// Checks `P(ix, w) ⊂ P(x, w_i)` on level `n` for both children, where
/// `(w₀, w₁)` is the formal recursion of `w`.
pub fn recursion_monotonicity_check(w: &Word, n: usize) -> Result<MonotonicityReport> {
    if n < 2 {
        return Err(Error::invalid("the recursion check needs level >= 2"));
    }
    let r = formal_recursion(w)?;
    let top = traverse_field(w, n)?;
    let lower = [traverse_field(&r.w0, n - 1)?, traverse_field(&r.w1, n - 1)?];
    let mut violations = Vec::new();
    let mut checked = 0;
    for x in Vertex::level(n - 1) {
        for (i, field) in lower.iter().enumerate() {
            let child = Vertex::from_parts(0, 0).child(i as u32).concat(&x);
            checked += 1;
            if !embeds(top.pattern(&child)?, field.pattern(&x)?) {
                violations.push(child.to_string());
            }
        }
    }
    Ok(MonotonicityReport {
        level: n,
        checked,
        violations,
        total: top.a,
        sections_total: lower[0].a + lower[1].a,
    })
}

/// `min_{1≤k≤n−2} (ηᵏ r + 2ᵏ)`, or `None` when the range of `k` is empty.
pub fn contraction_bound_shape(n: usize, r: usize) -> Option<f64> {
    let eta = contraction_eta();
    (1..n.saturating_sub(1))
        .map(|k| eta.powi(k as i32) * r as f64 + (1u64 << k) as f64)
        .min_by(f64::total_cmp)
}

/// `C · min_k (ηᵏ r + 2ᵏ)` with the frozen constant.
pub fn contraction_bound(n: usize, r: usize) -> Option<f64> {
    contraction_bound_shape(n, r).map(|s| A_CONTRACT_C * s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    Exhaustive,
    /// `samples` random pre-reduced words per length, plus ζ-word probes.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub r: usize,
    pub max_a: usize,
    pub argmax: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub level: usize,
    pub exact: bool,
    pub words: u64,
    /// One row per length `0..=r`; `max_a` is the maximum over words of
    /// length at most `r`.
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn max_a(&self) -> usize {
        self.rows.last().map_or(0, |r| r.max_a)
    }

    /// `r, 𝒜(n,r), bound, ratio`, with empty bound columns when no `k` applies.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,max_a,bound,ratio\n");
        for row in &self.rows {
            match contraction_bound(self.level, row.r) {
                Some(b) => writeln!(s, "{},{},{:.6},{:.6}", row.r, row.max_a, b, row.max_a as f64 / b),
                None => writeln!(s, "{},{},,", row.r, row.max_a),
            }
            .expect("writing to a string");
        }
        s
    }

    /// Rows exceeding the frozen contraction bound.
    pub fn contraction_violations(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|row| contraction_bound(self.level, row.r).is_some_and(|b| row.max_a as f64 > b))
            .map(|row| row.r)
            .collect()
    }
}

/// Best value per exact length found by one search task.
#[derive(Clone, Debug)]
struct Best {
    by_len: Vec<(usize, Option<Vec<Letter>>)>,
    words: u64,
}

impl Best {
    fn new(r: usize) -> Self {
        Best { by_len: vec![(0, None); r + 1], words: 0 }
    }

    fn offer(&mut self, len: usize, a: usize, word: &[Letter]) {
        self.words += 1;
        let slot = &mut self.by_len[len];
        if slot.1.is_none() || a > slot.0 {
            *slot = (a, Some(word.to_vec()));
        }
    }

    /// Keeps the earlier task's witness on ties.
    fn merge(mut self, other: Best) -> Best {
        for (mine, theirs) in self.by_len.iter_mut().zip(other.by_len) {
            if theirs.1.is_some() && (mine.1.is_none() || theirs.0 > mine.0) {
                *mine = theirs;
            }
        }
        self.words += other.words;
        self
    }

    fn into_report(self, level: usize, exact: bool) -> SweepReport {
        let mut rows = Vec::with_capacity(self.by_len.len());
        let mut running: (usize, String) = (0, String::new());
        for (r, (a, w)) in self.by_len.into_iter().enumerate() {
            if let Some(w) = w {
                if rows.is_empty() || a > running.0 {
                    running = (a, Word::from_letters(w).to_string());
                }
            }
            rows.push(SweepRow { r, max_a: running.0, argmax: running.1.clone() });
        }
        SweepReport { level, exact, words: self.words, rows }
    }
}

/// Depth-first search over words alternating `a` with one of `b, c, d`.
fn dfs(walker: &mut FieldWalker, word: &mut Vec<Letter>, r: usize, best: &mut Best) -> Result<()> {
    best.offer(word.len(), walker.total(), word);
    if word.len() == r {
        return Ok(());
    }
    let next: &[Letter] = match word.last() {
        Some(Letter::A) => &[Letter::B, Letter::C, Letter::D],
        Some(_) => &[Letter::A],
        None => &Letter::TREE,
    };
    for &l in next {
        walker.push(l)?;
        word.push(l);
        dfs(walker, word, r, best)?;
        word.pop();
        walker.pop();
    }
    Ok(())
}

/// Starting segments of length 2 (or shorter, when `r < 2`) for the parallel
/// split of the exhaustive sweep.
fn seeds(r: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    for _ in 0..r.min(2) {
        out = out
            .into_iter()
            .flat_map(|w: Vec<Letter>| {
                let next: Vec<Letter> = match w.last() {
                    Some(Letter::A) => vec![Letter::B, Letter::C, Letter::D],
                    Some(_) => vec![Letter::A],
                    None => Letter::TREE.to_vec(),
                };
                next.into_iter().map(move |l| {
                    let mut v = w.clone();
                    v.push(l);
                    v
                })
            })
            .collect();
    }
    out
}

/// `𝒜(n, r') = max{A(n, w) : |w| ≤ r'}` for every `r' ≤ r`.
///
/// The exhaustive mode visits the reduced words of `⟨a⟩ ∗ ⟨b,c,d⟩`. Every
/// word has the same traverse field as its pre-reduction, and deleting a
/// factor `aa` only repeats a pair that the collapse already absorbs, so the
/// maximum is unchanged and each reduced word is no longer than the words it
/// represents.
pub fn max_a(n: usize, r: usize, mode: SweepMode) -> Result<SweepReport> {
    let perms = LevelPerms::new(n)?;
    match mode {
        SweepMode::Exhaustive => {
            if r > MAX_EXHAUSTIVE_RADIUS {
                return Err(Error::Budget {
                    what: format!("exhaustive sweep limited to r <= {MAX_EXHAUSTIVE_RADIUS}"),
                    last_radius: None,
                    counts: vec![],
                });
            }
            let seeds = seeds(r);
            let parts: Vec<Best> = seeds
                .par_iter()
                .map(|seed| {
                    let mut best = Best::new(r);
                    let mut walker = FieldWalker::new(&perms);
                    for &l in seed {
                        walker.push(l)?;
                    }
                    let mut word = seed.clone();
                    dfs(&mut walker, &mut word, r, &mut best)?;
                    Ok(best)
                })
                .collect::<Result<_>>()?;
            // the prefixes shorter than the seeds
            let mut total = Best::new(r);
            let seed_len = r.min(2);
            if seed_len >= 1 {
                total.offer(0, FieldWalker::new(&perms).total(), &[]);
            }
            if seed_len >= 2 {
                for &l in &Letter::TREE {
                    let mut w = FieldWalker::new(&perms);
                    w.push(l)?;
                    total.offer(1, w.total(), &[l]);
                }
            }
            let total = parts.into_iter().fold(total, Best::merge);
            Ok(total.into_report(n, true))
        }
        SweepMode::Sampled { samples, seed } => {
            let lengths: Vec<usize> = (0..=r).collect();
            let parts: Vec<Best> = lengths
                .par_iter()
                .map(|&len| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (len as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                    let mut best = Best::new(r);
                    for _ in 0..samples.max(1) {
                        let w = random_pre_reduced(&mut rng, len);
                        best.offer(len, field_total(&w, &perms)?, w.letters());
                    }
                    Ok(best)
                })
                .collect::<Result<_>>()?;
            let mut total = parts.into_iter().fold(Best::new(r), Best::merge);
            for probe in zeta_probes(n, r)? {
                let a = field_total(&probe, &perms)?;
                total.offer(probe.len(), a, probe.letters());
            }
            Ok(total.into_report(n, false))
        }
    }
}

/// `(w_m w_m⁻¹)^j` for `m ≤ n` and every `j ≥ 1` fitting in length `r`.
pub fn zeta_probes(n: usize, r: usize) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    for m in 0..=n {
        let w = zeta_word(m)?;
        let unit = w.concat(&w.inverse());
        if unit.len() > r {
            break;
        }
        for j in 1..=r / unit.len() {
            out.push(unit.repeat(j));
        }
    }
    Ok(out)
}

/// First index `j` with `1ⁿ·(z₁…z_j)⁻¹ = x`, for every level-`n` code, or
/// `None` for points the inverted orbit misses.
pub fn first_visits(w: &Word, n: usize) -> Result<Vec<Option<usize>>> {
    let orbit = inverted_orbit_pair(w, n)?;
    let mut out = vec![None; 1 << n];
    for (j, (x, _)) in orbit.pairs.iter().enumerate() {
        out[x.code() as usize].get_or_insert(j);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ZetaCoverage {
    pub level: usize,
    pub length: usize,
    pub covered: usize,
    /// `|w_n| / (2/η)ⁿ`
    pub ratio: f64,
}

impl ZetaCoverage {
    pub fn complete(&self) -> bool {
        self.covered == 1 << self.level
    }
}

/// Points of level `n` visited by the inverted orbit of `1ⁿ` under `w_n = ζⁿ(ad)`.
pub fn zeta_coverage(n: usize) -> Result<ZetaCoverage> {
    let w = zeta_word(n)?;
    let covered = if n == 0 { 1 } else { first_visits(&w, n)?.iter().filter(|j| j.is_some()).count() };
    let ratio = w.len() as f64 / (2.0 / contraction_eta()).powi(n as i32);
    Ok(ZetaCoverage { level: n, length: w.len(), covered, ratio })
}

fn lamp_letters(lamp: &FiniteGroup) -> Result<Vec<Letter>> {
    lamp.labels()
        .iter()
        .map(|s| {
            let w: Word = s.parse()?;
            match w.letters() {
                [l @ (Letter::U(_) | Letter::V(_))] => Ok(*l),
                _ => Err(Error::invalid(format!("lamp generator {s} is not a U or V letter"))),
            }
        })
        .collect()
}

/// Shortest `U ∪ V` words for the target lamp values of `Δ_n`, indexed by
/// level-`n` code.
pub fn target_words(targets: &[u32], delta: &WreathGroup) -> Result<Vec<Word>> {
    let lamp = delta.lamp();
    if targets.iter().any(|&t| t as usize >= lamp.order()) {
        return Err(Error::invalid("target is not an element of the lamp group"));
    }
    let letters = lamp_letters(lamp)?;
    let words = lamp.shortest_words();
    Ok(targets
        .iter()
        .map(|&t| Word::from_letters(words[t as usize].iter().map(|&i| letters[i]).collect()))
        .collect())
}

/// An `𝐌`-word whose image in `Δ_n` has lamp configuration `targets`
/// (indexed by level-`n` code).
///
/// Each round walks `w_n = ζⁿ(ad)` once and inserts one more letter of every
/// target word: a `u` letter right after the first prefix whose inverted
/// orbit brings `1ⁿ` to the target point, a `v` letter after the first prefix
/// bringing `1ⁿ` to its sibling. Rounds after the first aim at the point
/// translated by the tree part already written. With `ℓ` the longest target
/// word and at least one round, the word has length at most
/// `ℓ(|w_n| + 2ⁿ)` and its tree part is `w_n^ℓ`.
pub fn configuration_word(targets: &[u32], delta: &WreathGroup, ell: Option<usize>) -> Result<Word> {
    let WreathKind::Delta { n } = delta.kind else {
        return Err(Error::invalid("configuration words are built in Δ_n"));
    };
    if *delta.omega() != OmegaString::first() {
        return Err(Error::invalid("configuration words use the ζ-words of the first Grigorchuk group"));
    }
    if targets.len() != 1 << n {
        return Err(Error::invalid(format!("expected {} targets, got {}", 1u32 << n, targets.len())));
    }
    let words = target_words(targets, delta)?;
    let longest = words.iter().map(Word::len).max().unwrap_or(0);
    let ell = match ell {
        Some(l) if l < longest => {
            return Err(Error::invalid(format!("a target needs {longest} letters, more than {l}")))
        }
        Some(l) => l,
        None => longest,
    };
    let w = zeta_word(n)?;
    let visits = first_visits(&w, n)?;
    let tree = Generators::new(&OmegaString::first(), n)?.eval(&w)?;
    let mut shift = TreeAut::identity(n)?;
    let mut out = Word::empty();
    for round in 0..ell.max(1) {
        let mut slots: Vec<Vec<Letter>> = vec![Vec::new(); w.len() + 1];
        let mut late: Vec<Vec<Letter>> = vec![Vec::new(); w.len() + 1];
        for (x, word) in words.iter().enumerate() {
            let Some(&l) = word.letters().get(round) else { continue };
            let moved = shift.act_code(n, x as u32);
            let (aim, bucket) = match l {
                Letter::U(_) => (moved, &mut slots),
                _ => (moved ^ 1, &mut late),
            };
            let j = visits[aim as usize].ok_or_else(|| Error::invariant("ζ-word does not cover the level"))?;
            bucket[j].push(l);
        }
        for j in 0..=w.len() {
            if j > 0 {
                out.push(w.letters()[j - 1]);
            }
            for &l in slots[j].iter().chain(&late[j]) {
                out.push(l);
            }
        }
        shift = shift.compose(&tree);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::klein_lamp;
    use crate::wreath::{build_delta_n, evaluate_m_word, DeltaSpec};
    use rand::Rng;
    use std::sync::Arc;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn worked_example() {
        let orbit = inverted_orbit_pair(&w("abaca"), 2).unwrap();
        assert_eq!(orbit.to_display(), "((11,10),(01,00),(01,00),(10,11),(10,11),(00,01))");
        let f = traverse_field(&w("abaca"), 2).unwrap();
        let v: Vertex = "01".parse().unwrap();
        assert_eq!(f.raw_pattern(&v).unwrap(), "110");
        assert_eq!(f.pattern(&v).unwrap(), "10");
    }

    #[test]
    fn empty_word_field() {
        for n in 1..6 {
            let f = traverse_field(&Word::empty(), n).unwrap();
            assert_eq!(f.pattern(&Vertex::ones(n)).unwrap(), "1");
            assert_eq!(f.pattern(&Vertex::ones_then_zero(n)).unwrap(), "0");
            assert_eq!(f.a, 2);
        }
    }

    #[test]
    fn walker_push_pop_matches_fresh_computation() {
        let perms = LevelPerms::new(4).unwrap();
        let mut walker = FieldWalker::new(&perms);
        let word = w("abacabadacab");
        for (i, &l) in word.letters().iter().enumerate() {
            walker.push(l).unwrap();
            let prefix = Word::from_letters(word.letters()[..=i].to_vec());
            assert_eq!(walker.total(), traverse_field(&prefix, 4).unwrap().a);
        }
        for _ in 0..5 {
            walker.pop();
        }
        let prefix = Word::from_letters(word.letters()[..word.len() - 5].to_vec());
        assert_eq!(walker.total(), traverse_field(&prefix, 4).unwrap().a);
    }

    #[test]
    fn embedding_examples() {
        assert!(embeds("10", "110"));
        assert!(embeds("0101", "0101"));
        assert!(!embeds("101", "01"));
        assert!(embeds("", "1"));
    }

    #[test]
    fn recursion_check_on_example() {
        for n in 2..5 {
            assert!(recursion_monotonicity_check(&w("abaca"), n).unwrap().passed());
            assert!(recursion_monotonicity_check(&Word::empty(), n).unwrap().passed());
        }
    }

    /// Brute force over all words of `{a,b,c,d}` of length at most `r`.
    fn brute_max(n: usize, r: usize) -> Vec<usize> {
        let perms = LevelPerms::new(n).unwrap();
        let mut best = vec![0usize; r + 1];
        let mut layer = vec![Word::empty()];
        best[0] = field_total(&Word::empty(), &perms).unwrap();
        for len in 1..=r {
            layer = layer
                .iter()
                .flat_map(|p| Letter::TREE.iter().map(move |&l| {
                    let mut q = p.clone();
                    q.push(l);
                    q
                }))
                .collect();
            let m = layer.iter().map(|x| field_total(x, &perms).unwrap()).max().unwrap();
            best[len] = best[len - 1].max(m);
        }
        best
    }

    #[test]
    fn pruned_sweep_matches_brute_force() {
        for n in [2, 3, 5] {
            let r = 7;
            let report = max_a(n, r, SweepMode::Exhaustive).unwrap();
            let got: Vec<usize> = report.rows.iter().map(|row| row.max_a).collect();
            assert_eq!(got, brute_max(n, r), "level {n}");
            for row in &report.rows {
                assert_eq!(traverse_field(&w(&row.argmax), n).unwrap().a, row.max_a);
            }
        }
    }

    #[test]
    fn sweep_of_radius_zero() {
        for n in 1..6 {
            assert_eq!(max_a(n, 0, SweepMode::Exhaustive).unwrap().max_a(), 2);
        }
    }

    #[test]
    fn sampled_sweep_is_a_lower_bound() {
        let exact = max_a(4, 10, SweepMode::Exhaustive).unwrap();
        let sampled = max_a(4, 10, SweepMode::Sampled { samples: 50, seed: 3 }).unwrap();
        for (e, s) in exact.rows.iter().zip(&sampled.rows) {
            assert!(s.max_a <= e.max_a);
        }
    }

    #[test]
    fn zeta_probe_lower_bound() {
        for n in 1..5 {
            let wn = zeta_word(n).unwrap();
            for r in 1..4 {
                let probe = wn.concat(&wn.inverse()).repeat(r);
                let a = traverse_field(&probe, n).unwrap().a;
                assert!(a >= (1 << n) * 2 * r, "n={n} r={r} A={a}");
            }
        }
    }

    fn delta(n: usize) -> WreathGroup {
        let lamp = Arc::new(FiniteGroup::new(klein_lamp()).unwrap());
        build_delta_n(&DeltaSpec::new(n, lamp)).unwrap()
    }

    fn check_configuration(d: &WreathGroup, n: usize, targets: &[u32], ell: Option<usize>) -> Word {
        let word = configuration_word(targets, d, ell).unwrap();
        let value = evaluate_m_word(&word, d).unwrap();
        for (x, &t) in targets.iter().enumerate() {
            assert_eq!(value.lamp_at(x as u32), t, "point {x}");
        }
        let rounds = ell.unwrap_or(0).max(1);
        let tree = d.base_generators().eval(&zeta_word(n).unwrap().repeat(rounds)).unwrap();
        assert_eq!(value.base, tree);
        word
    }

    #[test]
    fn configuration_words() {
        let n = 3;
        let d = delta(n);
        let none = vec![0u32; 1 << n];
        let word = check_configuration(&d, n, &none, None);
        assert!(word.is_tree());

        let mut single = none.clone();
        single[Vertex::ones(n).code() as usize] = d.lamp().by_label("u1").unwrap();
        check_configuration(&d, n, &single, Some(1));

        let wn = zeta_word(n).unwrap().len();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let t: Vec<u32> = (0..1 << n).map(|_| rng.gen_range(0..d.lamp().order() as u32)).collect();
            let word = check_configuration(&d, n, &t, Some(2));
            assert!(word.len() <= 2 * (wn + (1 << n)));
        }
        assert!(configuration_word(&single, &d, Some(0)).is_err());
    }

    #[test]
    fn zeta_words_cover_levels() {
        for n in 1..=6 {
            assert!(zeta_coverage(n).unwrap().complete(), "level {n}");
        }
    }
}
