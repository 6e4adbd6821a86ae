//! Permutation wreath products `F ≀_{𝖫_n} π_d(G_ω)` with the lamp groups of
//! [`crate::finite`], and the two families of marked factor groups built from
//! them: `Δ_n`, marked by the tree generators plus lamps at `1ⁿ` and
//! `1ⁿ⁻¹0`, and `Γ_n^ω`, whose generators copy the level-`n` sections of
//! `b, c, d` into a lamp group marked by the tree alphabet.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite::{FiniteGroup, UV_LABELS};
use crate::marked::MarkedGroup;
use crate::tree::{Generators, OmegaString, SchreierBfs, TreeAut, Vertex};
use crate::word::{Letter, Word};

/// `(f, g)` with `f` a finitely supported lamp configuration, stored as
/// `(point code, lamp element)` pairs sorted by point with identity values
/// dropped, and `g` a tree automorphism acting on the points.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WreathElement {
    pub config: Vec<(u32, u32)>,
    pub base: TreeAut,
}

impl WreathElement {
    pub fn lamp_at(&self, point: u32) -> u32 {
        self.config
            .binary_search_by_key(&point, |e| e.0)
            .map(|i| self.config[i].1)
            .unwrap_or(0)
    }

    pub fn is_identity(&self) -> bool {
        self.config.is_empty() && self.base.is_identity()
    }

    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.config.iter().map(|e| e.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WreathSummary {
    pub level: usize,
    /// point ↦ lamp element index
    pub config: Vec<(String, u32)>,
    pub base: String,
}

/// How the Klein letters of `G_{𝔰ⁿω}` are renamed at level `n` in `Γ_n^ω`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PsiScheme {
    /// `x_{𝔰ⁿω} ↦ x`
    Identity,
    /// For `ω = (012)^∞`: identity for `n ≡ 0`, `b→c→d→b` for `n ≡ 1`,
    /// `b→d→c→b` for `n ≡ 2 (mod 3)`. This matches the names the formal
    /// recursion gives to the level-`n` sections.
    Cyclic,
}

impl PsiScheme {
    pub fn apply(self, n: usize, x: Letter) -> Letter {
        let shift = match self {
            PsiScheme::Identity => 0,
            PsiScheme::Cyclic => n % 3,
        };
        let order = [Letter::B, Letter::C, Letter::D];
        let i = order.iter().position(|&l| l == x).expect("Klein letter");
        order[(i + shift) % 3]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WreathKind {
    Delta { n: usize },
    Gamma { n: usize, psi: PsiScheme },
    Custom,
}

/// A marked subgroup of `F ≀_{𝖫_level} π_depth(G_ω)`.
#[derive(Clone)]
pub struct WreathGroup {
    pub level: usize,
    pub kind: WreathKind,
    lamp: Arc<FiniteGroup>,
    base: Generators,
    labels: Vec<String>,
    gens: Vec<WreathElement>,
}

impl std::fmt::Debug for WreathGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "WreathGroup({:?}, level {}, base depth {}, lamp {})",
            self.kind, self.level, self.base.depth, self.lamp.spec.name
        )
    }
}

impl WreathGroup {
    pub fn new(
        level: usize,
        lamp: Arc<FiniteGroup>,
        base: Generators,
        gens: Vec<(String, WreathElement)>,
    ) -> Result<Self> {
        if level > base.depth {
            return Err(Error::invalid("wreath level deeper than the base portrait"));
        }
        let (labels, gens) = gens.into_iter().unzip();
        Ok(WreathGroup { level, kind: WreathKind::Custom, lamp, base, labels, gens })
    }

    pub fn lamp(&self) -> &FiniteGroup {
        &self.lamp
    }

    pub fn lamp_arc(&self) -> Arc<FiniteGroup> {
        self.lamp.clone()
    }

    pub fn base_depth(&self) -> usize {
        self.base.depth
    }

    pub fn omega(&self) -> &OmegaString {
        &self.base.omega
    }

    pub fn base_generators(&self) -> &Generators {
        &self.base
    }

    pub fn element(&self, config: Vec<(u32, u32)>, base: TreeAut) -> WreathElement {
        let mut config: Vec<(u32, u32)> = config.into_iter().filter(|e| e.1 != 0).collect();
        config.sort_unstable();
        WreathElement { config, base }
    }

    /// `(δ_x^γ, id)`
    pub fn delta_lamp(&self, x: u32, gamma: u32) -> WreathElement {
        self.element(vec![(x, gamma)], TreeAut::identity(self.base.depth).expect("depth checked"))
    }

    pub fn base_element(&self, g: TreeAut) -> WreathElement {
        WreathElement { config: Vec::new(), base: g }
    }

    pub fn generator_by_label(&self, label: &str) -> Option<&WreathElement> {
        self.labels.iter().position(|l| l == label).map(|i| &self.gens[i])
    }

    /// `(f₁, g₁)(f₂, g₂) = (f₁ · (g₁·f₂), g₁g₂)` with `(g·f)(x) = f(x·g)`.
    pub fn mul(&self, x: &WreathElement, y: &WreathElement) -> WreathElement {
        let moved: Vec<(u32, u32)> = y
            .config
            .iter()
            .map(|&(p, v)| (x.base.act_inverse_code(self.level, p), v))
            .collect();
        let config = self.merge(&x.config, moved);
        WreathElement { config, base: x.base.compose(&y.base) }
    }

    /// `f₁ · f₂` pointwise, with `f₂` given unsorted.
    fn merge(&self, f1: &[(u32, u32)], mut f2: Vec<(u32, u32)>) -> Vec<(u32, u32)> {
        f2.sort_unstable();
        let mut out = Vec::with_capacity(f1.len() + f2.len());
        let (mut i, mut j) = (0, 0);
        while i < f1.len() || j < f2.len() {
            let take = match (f1.get(i), f2.get(j)) {
                (Some(a), Some(b)) if a.0 == b.0 => {
                    i += 1;
                    j += 1;
                    (a.0, self.lamp.mul(a.1, b.1))
                }
                (Some(a), Some(b)) if a.0 < b.0 => {
                    i += 1;
                    *a
                }
                (Some(a), None) => {
                    i += 1;
                    *a
                }
                (_, Some(b)) => {
                    j += 1;
                    *b
                }
                (None, None) => unreachable!(),
            };
            if take.1 != 0 {
                out.push(take);
            }
        }
        out
    }

    /// `(f, g)⁻¹ = (g⁻¹·f⁻¹, g⁻¹)`
    pub fn inv(&self, x: &WreathElement) -> WreathElement {
        let config: Vec<(u32, u32)> = x
            .config
            .iter()
            .map(|&(q, v)| (x.base.act_code(self.level, q), self.lamp.inv(v)))
            .collect();
        self.element(config, x.base.inverse())
    }

    pub fn letter(&self, l: Letter) -> Result<&WreathElement> {
        self.generator_by_label(&l.to_string())
            .ok_or_else(|| Error::invalid(format!("no generator {l} in this marking")))
    }

    /// Evaluates a word by repeated wreath multiplication.
    pub fn eval(&self, w: &Word) -> Result<WreathElement> {
        let mut acc = self.identity();
        for &l in w.letters() {
            acc = self.mul(&acc, self.letter(l)?);
        }
        Ok(acc)
    }

    pub fn summary(&self, x: &WreathElement) -> WreathSummary {
        WreathSummary {
            level: self.level,
            config: x
                .config
                .iter()
                .map(|&(p, v)| (Vertex::new(self.level, p).expect("point on level").to_string(), v))
                .collect(),
            base: x.base.to_hex(),
        }
    }
}

impl MarkedGroup for WreathGroup {
    type Elem = WreathElement;

    fn labels(&self) -> Vec<String> {
        self.labels.clone()
    }
    fn identity(&self) -> WreathElement {
        self.base_element(TreeAut::identity(self.base.depth).expect("depth checked"))
    }
    fn generator(&self, i: usize) -> WreathElement {
        self.gens[i].clone()
    }
    fn multiply(&self, x: &WreathElement, y: &WreathElement) -> WreathElement {
        self.mul(x, y)
    }
    fn inverse(&self, x: &WreathElement) -> WreathElement {
        self.inv(x)
    }
}

/// Parameters of `Δ_n`.
#[derive(Clone, Debug)]
pub struct DeltaSpec {
    pub n: usize,
    pub lamp: Arc<FiniteGroup>,
    pub omega: OmegaString,
    /// Depth of the tree quotient standing in for `G_ω`; defaults to `n + 3`.
    pub base_depth: Option<usize>,
}

impl DeltaSpec {
    pub fn new(n: usize, lamp: Arc<FiniteGroup>) -> Self {
        DeltaSpec { n, lamp, omega: OmegaString::first(), base_depth: None }
    }
}

/// `Δ_n = F_n ≀_{𝖫_n} π_{depth}(G_ω)` marked by
/// `(a, b, c, d, u1, v1, v2)`, with `u1` lit at `1ⁿ` and `v1, v2` at `1ⁿ⁻¹0`.
pub fn build_delta_n(spec: &DeltaSpec) -> Result<WreathGroup> {
    let n = spec.n;
    if n == 0 {
        return Err(Error::invalid("Δ_n needs n >= 1"));
    }
    spec.lamp.check_uv_marking()?;
    let depth = spec.base_depth.unwrap_or(n + 3);
    if depth < n {
        return Err(Error::invalid("base depth must be at least the level"));
    }
    let base = Generators::new(&spec.omega, depth)?;
    let id = TreeAut::identity(depth)?;
    let mut gens: Vec<(String, WreathElement)> = Letter::TREE
        .iter()
        .zip(base.all())
        .map(|(l, g)| (l.to_string(), WreathElement { config: Vec::new(), base: g.clone() }))
        .collect();
    let ones = Vertex::ones(n).code();
    let sib = Vertex::ones_then_zero(n).code();
    for label in UV_LABELS {
        let point = if label.starts_with('u') { ones } else { sib };
        let v = spec.lamp.by_label(label).expect("marking checked");
        let config = if v == 0 { Vec::new() } else { vec![(point, v)] };
        gens.push((label.to_string(), WreathElement { config, base: id.clone() }));
    }
    let mut g = WreathGroup::new(n, spec.lamp.clone(), base, gens)?;
    g.kind = WreathKind::Delta { n };
    Ok(g)
}

/// `Γ_n^ω ≤ A_n ≀_{𝖫_n} π_n(G_ω)` marked by `(a_n, b_n, c_n, d_n)` with
/// `x_n = (δ_{1ⁿ}^{ψ_n(x)} + δ_{1ⁿ⁻¹0}^{ω_{n−1}(x)}, x)`.
pub fn build_gamma_n(n: usize, lamp: Arc<FiniteGroup>, omega: &OmegaString, psi: PsiScheme) -> Result<WreathGroup> {
    if n == 0 {
        return Err(Error::invalid("Γ_n needs n >= 1"));
    }
    lamp.check_tree_marking()?;
    let base = Generators::new(omega, n)?;
    let ones = Vertex::ones(n).code();
    let sib = Vertex::ones_then_zero(n).code();
    let a_lamp = lamp.by_label("a").expect("marking checked");
    let mut gens = Vec::new();
    for (l, g) in Letter::TREE.iter().zip(base.all()) {
        let mut config = Vec::new();
        if l.is_klein() {
            let top = lamp.letter(psi.apply(n, *l))?;
            config.push((ones, top));
            if omega.survives(n - 1, *l) {
                config.push((sib, a_lamp));
            }
        }
        config.retain(|e| e.1 != 0);
        config.sort_unstable();
        gens.push((l.to_string(), WreathElement { config, base: g.clone() }));
    }
    let mut g = WreathGroup::new(n, lamp, base, gens)?;
    g.kind = WreathKind::Gamma { n, psi };
    Ok(g)
}

/// Evaluates an `𝐌`-word in `Δ_n`.
pub fn evaluate_m_word(w: &Word, delta: &WreathGroup) -> Result<WreathElement> {
    delta.eval(w)
}

/// The closed form of a word's image in `Δ_n`: a lamp letter following the
/// prefix `p` multiplies the value at `1ⁿ·p⁻¹` (for `u`) or `1ⁿ⁻¹0·p⁻¹`
/// (for `v`) on the right.
pub fn lamp_product_formula(w: &Word, delta: &WreathGroup) -> Result<WreathElement> {
    let WreathKind::Delta { n } = delta.kind else {
        return Err(Error::invalid("lamp product formula applies to Δ_n"));
    };
    let gens = delta.base_generators();
    let mut prefix = TreeAut::identity(gens.depth)?;
    let ones = Vertex::ones(n).code();
    let sib = Vertex::ones_then_zero(n).code();
    let mut values = vec![0u32; 1 << n];
    for &l in w.letters() {
        match l {
            Letter::U(_) | Letter::V(_) => {
                let start = if matches!(l, Letter::U(_)) { ones } else { sib };
                let x = prefix.act_inverse_code(n, start);
                let lamp = delta.lamp().letter(l)?;
                values[x as usize] = delta.lamp().mul(values[x as usize], lamp);
            }
            t => prefix = prefix.compose(gens.get(t)?),
        }
    }
    let config = values.into_iter().enumerate().map(|(p, v)| (p as u32, v)).collect();
    Ok(delta.element(config, prefix))
}

/// The shortest word moving `1ⁿ` to `1ⁿ⁻¹0` in the Schreier graph, first
/// found in generator order.
pub fn sibling_mover(n: usize, omega: &OmegaString) -> Result<Word> {
    let bfs = SchreierBfs::new(&Vertex::ones(n), omega)?;
    bfs.path_word(&Vertex::ones_then_zero(n))
        .ok_or_else(|| Error::invariant("level action is not transitive"))
}

/// `[u1, g v1 g⁻¹]` with `g` the sibling mover on level `n`.
pub fn kdelta_witness(n: usize, omega: &OmegaString) -> Result<Word> {
    let g = sibling_mover(n, omega)?;
    let v: Word = "v1".parse()?;
    let conj = g.concat(&v).concat(&g.inverse());
    Ok(Word::commutator(&"u1".parse()?, &conj))
}

/// Element of `Δ_n(𝔰𝓛, 𝔰ω) ≀ 𝔖₂`: `(h₀, h₁) ε^swap`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SwapPair {
    pub h0: WreathElement,
    pub h1: WreathElement,
    pub swap: bool,
}

impl SwapPair {
    fn mul(&self, g: &WreathGroup, other: &SwapPair) -> SwapPair {
        let (k0, k1) = if self.swap { (&other.h1, &other.h0) } else { (&other.h0, &other.h1) };
        SwapPair { h0: g.mul(&self.h0, k0), h1: g.mul(&self.h1, k1), swap: self.swap ^ other.swap }
    }
}

/// Splits an element of `Δ_{n+1}` at the root into its two sections, as an
/// element of `Δ_n ≀ 𝔖₂`.
pub fn theta_split(x: &WreathElement, big: &WreathGroup, small: &WreathGroup) -> Result<SwapPair> {
    let n = small.level;
    let mask = (1u32 << n) - 1;
    let mut halves = [Vec::new(), Vec::new()];
    for &(p, v) in &x.config {
        halves[(p >> n) as usize].push((p & mask, v));
    }
    let [c0, c1] = halves;
    debug_assert_eq!(big.level, n + 1);
    Ok(SwapPair {
        h0: small.element(c0, x.base.section(&Vertex::new(1, 0)?)?),
        h1: small.element(c1, x.base.section(&Vertex::new(1, 1)?)?),
        swap: x.base.swap_at(&Vertex::root()),
    })
}

/// Images of the generators of `Δ_{n+1}`: `a ↦ (id, id)ε`,
/// `x ↦ (ω₀(x), x)` for Klein letters, lamps `↦ (id, lamp)`.
pub fn theta_generator_images(big: &WreathGroup, small: &WreathGroup) -> Result<Vec<SwapPair>> {
    let id = small.identity();
    let omega = big.omega();
    big.labels()
        .iter()
        .map(|label| {
            let l: Letter = label
                .parse::<Word>()?
                .letters()
                .first()
                .copied()
                .ok_or_else(|| Error::invalid("empty label"))?;
            Ok(match l {
                Letter::A => SwapPair { h0: id.clone(), h1: id.clone(), swap: true },
                x if x.is_klein() => {
                    let h0 = if omega.survives(0, x) { small.letter(Letter::A)?.clone() } else { id.clone() };
                    SwapPair { h0, h1: small.letter(x)?.clone(), swap: false }
                }
                lamp => SwapPair { h0: id.clone(), h1: small.letter(lamp)?.clone(), swap: false },
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaEmbeddingReport {
    pub n: usize,
    pub max_len: usize,
    pub generators_match: bool,
    pub words_checked: u64,
    pub sampled_checked: u64,
    pub first_failure: Option<String>,
}

impl ThetaEmbeddingReport {
    pub fn passed(&self) -> bool {
        self.generators_match && self.first_failure.is_none()
    }
}

/// Compares, on every word of length at most `m` and on `samples` random
/// words of length at most 12, the root split of the image in `Δ_{n+1}`
/// with the product of generator images in `Δ_n(𝔰𝓛, 𝔰ω) ≀ 𝔖₂`.
pub fn theta_embedding_check(
    n: usize,
    m: usize,
    lamp: Arc<FiniteGroup>,
    samples: usize,
    seed: u64,
) -> Result<ThetaEmbeddingReport> {
    let omega = OmegaString::first();
    let big = build_delta_n(&DeltaSpec { n: n + 1, lamp: lamp.clone(), omega: omega.clone(), base_depth: None })?;
    let small = build_delta_n(&DeltaSpec {
        n,
        lamp,
        omega: omega.shift(1),
        base_depth: Some(big.base_depth() - 1),
    })?;
    let images = theta_generator_images(&big, &small)?;
    let split_gens: Vec<SwapPair> = big
        .generators()
        .iter()
        .map(|g| theta_split(g, &big, &small))
        .collect::<Result<_>>()?;
    let generators_match = split_gens == images;
    let labels = big.labels();
    let mut report = ThetaEmbeddingReport {
        n,
        max_len: m,
        generators_match,
        words_checked: 0,
        sampled_checked: 0,
        first_failure: None,
    };
    let id_pair = SwapPair { h0: small.identity(), h1: small.identity(), swap: false };
    let mut stack: Vec<(Vec<usize>, WreathElement, SwapPair)> = vec![(Vec::new(), big.identity(), id_pair.clone())];
    while let Some((word, x, y)) = stack.pop() {
        report.words_checked += 1;
        if theta_split(&x, &big, &small)? != y {
            report.first_failure = Some(word.iter().map(|&i| labels[i].as_str()).collect::<Vec<_>>().join("."));
            return Ok(report);
        }
        if word.len() < m {
            for (i, (g, im)) in big.generators().iter().zip(&images).enumerate() {
                let mut w = word.clone();
                w.push(i);
                stack.push((w, big.mul(&x, g), y.mul(&small, im)));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let len = rng.gen_range(0..=12);
        let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..labels.len())).collect();
        let x = big.eval_indices(&word);
        let y = word.iter().fold(id_pair.clone(), |acc, &i| acc.mul(&small, &images[i]));
        report.sampled_checked += 1;
        if theta_split(&x, &big, &small)? != y {
            report.first_failure = Some(word.iter().map(|&i| labels[i].as_str()).collect::<Vec<_>>().join("."));
            return Ok(report);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::{dihedral_lamp, dihedral_tree_lamp, klein_lamp, trivial_lamp};
    use crate::marked::{matching_radius, BallOptions, TreeGroup};
    use crate::word::{iterate_recursion, random_word, substitute_sigma_pow};

    fn lamp(spec: crate::finite::FiniteGroupSpec) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::new(spec).unwrap())
    }

    fn delta(n: usize, l: &Arc<FiniteGroup>) -> WreathGroup {
        build_delta_n(&DeltaSpec::new(n, l.clone())).unwrap()
    }

    #[test]
    fn lamps_at_one_point_multiply() {
        let d = delta(3, &lamp(dihedral_lamp(8).unwrap()));
        let x = d.delta_lamp(5, 3);
        let y = d.delta_lamp(5, 7);
        assert_eq!(d.mul(&x, &y), d.delta_lamp(5, d.lamp().mul(3, 7)));
    }

    #[test]
    fn conjugating_a_lamp_moves_it() {
        let l = lamp(klein_lamp());
        for n in 1..6 {
            let d = delta(n, &l);
            let g = sibling_mover(n, &OmegaString::first()).unwrap();
            assert_eq!(g.len(), (1 << n) - 1);
            let ge = d.eval(&g).unwrap();
            let v = d.letter(Letter::V(1)).unwrap();
            let conj = d.mul(&d.mul(&ge, v), &d.inv(&ge));
            let target = ge.base.act_inverse_code(n, Vertex::ones_then_zero(n).code());
            assert_eq!(target, Vertex::ones(n).code());
            assert_eq!(conj, d.delta_lamp(target, l.by_label("v1").unwrap()));
        }
    }

    #[test]
    fn inverse_and_associativity_sampled() {
        let d = delta(3, &lamp(dihedral_lamp(6).unwrap()));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let gens = d.generators();
        let rand_elem = |rng: &mut ChaCha8Rng| {
            let len = rng.gen_range(0..15);
            (0..len).fold(d.identity(), |acc, _| d.mul(&acc, &gens[rng.gen_range(0..gens.len())]))
        };
        for _ in 0..300 {
            let (x, y, z) = (rand_elem(&mut rng), rand_elem(&mut rng), rand_elem(&mut rng));
            assert!(d.mul(&x, &d.inv(&x)).is_identity());
            assert_eq!(d.mul(&d.mul(&x, &y), &z), d.mul(&x, &d.mul(&y, &z)));
        }
    }

    #[test]
    fn lamp_product_formula_agrees() {
        let l = lamp(dihedral_lamp(8).unwrap());
        let d = delta(3, &l);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let letters = ["a", "b", "c", "d", "u1", "v1", "v2"];
        for _ in 0..300 {
            let len = rng.gen_range(0..30);
            let s: Vec<&str> = (0..len).map(|_| letters[rng.gen_range(0..7)]).collect();
            let w: Word = s.join(".").parse().unwrap();
            assert_eq!(evaluate_m_word(&w, &d).unwrap(), lamp_product_formula(&w, &d).unwrap(), "{w}");
        }
        let u: Word = "u1".parse().unwrap();
        assert_eq!(d.eval(&u).unwrap(), d.delta_lamp(Vertex::ones(3).code(), l.by_label("u1").unwrap()));
    }

    #[test]
    fn trivial_lamps_give_the_tree_quotient() {
        let d = delta(3, &lamp(trivial_lamp()));
        let diag = crate::marked::Diagonal::new(vec![d]).unwrap();
        let t = TreeGroup::first(6).unwrap();
        let opts = BallOptions::default();
        let dp = crate::marked::ball(&diag, 6, opts).unwrap();
        let tp = crate::marked::ball(&t, 6, opts).unwrap();
        assert_eq!(dp, tp);
    }

    #[test]
    fn kdelta_witness_lives_on_one_level() {
        let l = lamp(dihedral_lamp(8).unwrap());
        let (u, v) = (l.by_label("u1").unwrap(), l.by_label("v1").unwrap());
        let uv = l.commutator(u, v);
        assert_ne!(uv, 0);
        for n in 1..5 {
            let w = kdelta_witness(n, &OmegaString::first()).unwrap();
            for k in 1..6 {
                let x = delta(k, &l).eval(&w).unwrap();
                if k == n {
                    assert_eq!(x, delta(k, &l).delta_lamp(Vertex::ones(n).code(), uv));
                } else {
                    assert!(x.is_identity(), "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn gamma_matches_formal_sections() {
        let a = lamp(dihedral_tree_lamp(16).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..5 {
            let g = build_gamma_n(n, a.clone(), &OmegaString::first(), PsiScheme::Cyclic).unwrap();
            for _ in 0..100 {
                let len = rng.gen_range(0..25);
                let w = random_word(&mut rng, len);
                let x = g.eval(&w).unwrap();
                let it = iterate_recursion(&w, n).unwrap();
                for v in Vertex::level(n) {
                    assert_eq!(x.lamp_at(v.code()), a.eval(it.section(&v)).unwrap(), "{w} at {v}");
                }
            }
        }
    }

    #[test]
    fn k_split_witness() {
        let a = lamp(dihedral_tree_lamp(16).unwrap());
        let w: Word = Word::commutator(&"b".parse().unwrap(), &"ad".parse::<Word>().unwrap().repeat(4));
        let wbar = a.eval(&w).unwrap();
        assert_eq!(wbar, a.by_label("c").unwrap());
        for n in 1..4 {
            let s = substitute_sigma_pow(&w, n).unwrap();
            let gn = build_gamma_n(n, a.clone(), &OmegaString::first(), PsiScheme::Cyclic).unwrap();
            assert_eq!(gn.eval(&s).unwrap(), gn.delta_lamp(Vertex::ones(n).code(), wbar));
            for j in n + 1..n + 3 {
                let gj = build_gamma_n(j, a.clone(), &OmegaString::first(), PsiScheme::Cyclic).unwrap();
                assert!(gj.eval(&s).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn gamma_balls_agree_with_next_level() {
        let a = lamp(dihedral_tree_lamp(16).unwrap());
        for n in 2..5 {
            let g1 = build_gamma_n(n, a.clone(), &OmegaString::first(), PsiScheme::Cyclic).unwrap();
            let g2 = build_gamma_n(n + 1, a.clone(), &OmegaString::first(), PsiScheme::Cyclic).unwrap();
            let r = matching_radius(&g1, &g2, (1 << (n - 1)) - 1, BallOptions::default()).unwrap();
            assert_eq!(r.radius, (1 << (n - 1)) - 1);
        }
    }

    #[test]
    fn theta_embedding_small() {
        let r = theta_embedding_check(2, 4, lamp(dihedral_lamp(6).unwrap()), 200, 3).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.generators_match);
    }
}
