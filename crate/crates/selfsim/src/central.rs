//! The class-two central extension over the germ set `X_n = 𝖫_n × G₃`.
//!
//! `π_{n+3}(𝔊)` acts on `X_n` by `(v, γ)·g = (v·g, γ·π₃(g_v))`. The diagonal
//! orbit `M_n` of `((1ⁿ, id), (1ⁿ, ab))` is the graph of `μ(v, γ) = (v, ab·γ)`,
//! and since `abab ≠ id` in `G₃` it never contains a pair together with its
//! reverse. The nilpotent group `N̄_n` is `ℤ^{X_n} × ℤ` with the cocycle
//! `B(f₁, f₂) = Σ_x f₁(x)·f₂(μx)`, so that `[b_x, b_y] = x⁻¹y⁻¹xy` has central
//! coordinate `+1` on `M_n`, `−1` on its reverse and `0` elsewhere.
//! `Γ_n = N̄_n ⋊ π_{n+3}(𝔊)` is marked by `(a, b, c, d, t)`, `t = b_{(1ⁿ, id)}`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::identities::level3_quotient;
use crate::marked::{ball_elements, matching_radius, BallOptions, MarkedGroup, MatchingReport};
use crate::tree::{Generators, OmegaString, TreeAut, Vertex};
use crate::word::{substitute_sigma_pow, free_reduce, Letter, Word};

/// Largest `n` for which `Γ_n` is built; its base is `π_{n+3}(𝔊)`.
pub const MAX_CENTRAL_LEVEL: usize = 6;

/// `G₃ = π₃(𝔊)` with its multiplication table.
#[derive(Debug)]
pub struct GermGroup {
    elems: &'static [TreeAut],
    index: HashMap<TreeAut, u8>,
    table: Vec<u8>,
    letters: [u8; 4],
}

impl GermGroup {
    fn build() -> Self {
        let elems = level3_quotient();
        let index: HashMap<TreeAut, u8> = elems.iter().enumerate().map(|(i, g)| (g.clone(), i as u8)).collect();
        let k = elems.len();
        let mut table = vec![0u8; k * k];
        for (i, x) in elems.iter().enumerate() {
            for (j, y) in elems.iter().enumerate() {
                table[i * k + j] = index[&x.compose(y)];
            }
        }
        let gens = Generators::new(&OmegaString::first(), 3).expect("depth 3 fits");
        let letters = gens.all().clone().map(|g| index[&g]);
        GermGroup { elems, index, table, letters }
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn identity(&self) -> u8 {
        self.index[&TreeAut::identity(3).expect("depth 3 fits")]
    }

    pub fn mul(&self, x: u8, y: u8) -> u8 {
        self.table[x as usize * self.elems.len() + y as usize]
    }

    pub fn element(&self, x: u8) -> &TreeAut {
        &self.elems[x as usize]
    }

    /// Index of a depth-3 automorphism, if it lies in `G₃`.
    pub fn index_of(&self, g: &TreeAut) -> Option<u8> {
        self.index.get(g).copied()
    }

    pub fn letter(&self, l: Letter) -> Result<u8> {
        l.tree_index()
            .map(|i| self.letters[i])
            .ok_or_else(|| Error::invalid(format!("{l} is not a tree letter")))
    }

    pub fn eval(&self, w: &Word) -> Result<u8> {
        w.letters().iter().try_fold(self.identity(), |acc, &l| Ok(self.mul(acc, self.letter(l)?)))
    }

    /// `ab`
    pub fn ab(&self) -> u8 {
        self.mul(self.letters[0], self.letters[1])
    }
}

pub fn germ_group() -> &'static GermGroup {
    static CELL: OnceLock<GermGroup> = OnceLock::new();
    CELL.get_or_init(GermGroup::build)
}

/// Points of `X_n` are coded `v·|G₃| + γ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GermSet {
    pub level: usize,
}

impl GermSet {
    pub fn new(level: usize) -> Result<Self> {
        if level == 0 || level > MAX_CENTRAL_LEVEL {
            return Err(Error::invalid(format!("germ level must be in 1..={MAX_CENTRAL_LEVEL}")));
        }
        Ok(GermSet { level })
    }

    pub fn size(&self) -> usize {
        (1usize << self.level) * germ_group().order()
    }

    pub fn point(&self, v: u32, gamma: u8) -> u32 {
        v * germ_group().order() as u32 + gamma as u32
    }

    pub fn split(&self, p: u32) -> (u32, u8) {
        let k = germ_group().order() as u32;
        (p / k, (p % k) as u8)
    }

    pub fn base_depth(&self) -> usize {
        self.level + 3
    }

    /// Level permutation and level-`n` sections (in `G₃`) of `g`.
    pub fn action_data(&self, g: &TreeAut) -> Result<ActionData> {
        if g.depth() != self.base_depth() {
            return Err(Error::LevelMismatch(g.depth(), self.base_depth()));
        }
        let n = self.level;
        let perm = g.level_perm(n);
        let sections = Vertex::level(n)
            .map(|v| {
                let s = g.section(&v)?;
                germ_group()
                    .index_of(&s)
                    .ok_or_else(|| Error::invariant("section outside the level-3 quotient"))
            })
            .collect::<Result<_>>()?;
        Ok(ActionData { perm, sections })
    }

    pub fn describe(&self, p: u32) -> String {
        let (v, gamma) = self.split(p);
        format!("({}, #{gamma})", Vertex::from_parts(self.level, v))
    }
}

/// How one base element moves the points of `X_n`.
#[derive(Clone, Debug)]
pub struct ActionData {
    perm: Vec<u32>,
    sections: Vec<u8>,
}

impl ActionData {
    pub fn act(&self, set: &GermSet, p: u32) -> u32 {
        let (v, gamma) = set.split(p);
        set.point(self.perm[v as usize], germ_group().mul(gamma, self.sections[v as usize]))
    }
}

/// The orbit `M_n`, stored as the partner map `μ`.
#[derive(Clone, Debug)]
pub struct SignedPairOrbit {
    pub set: GermSet,
    mu: Vec<u32>,
}

impl SignedPairOrbit {
    pub fn partner(&self, x: u32) -> u32 {
        self.mu[x as usize]
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        self.mu[x as usize] == y
    }

    /// `+1` on `M_n`, `−1` on its reverse, `0` elsewhere.
    pub fn sign(&self, x: u32, y: u32) -> i64 {
        if self.contains(x, y) {
            1
        } else if self.contains(y, x) {
            -1
        } else {
            0
        }
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }
}

fn generator_data(set: &GermSet) -> Result<Vec<ActionData>> {
    let gens = Generators::new(&OmegaString::first(), set.base_depth())?;
    gens.all().iter().map(|g| set.action_data(g)).collect()
}

/// Whether `π_{n+3}(𝔊)` acts transitively on `X_n`.
pub fn germ_action_transitive(n: usize) -> Result<bool> {
    let set = GermSet::new(n)?;
    let data = generator_data(&set)?;
    let mut seen = vec![false; set.size()];
    seen[0] = true;
    let mut queue = VecDeque::from([0u32]);
    let mut count = 1;
    while let Some(p) = queue.pop_front() {
        for d in &data {
            let q = d.act(&set, p);
            if !seen[q as usize] {
                seen[q as usize] = true;
                count += 1;
                queue.push_back(q);
            }
        }
    }
    Ok(count == set.size())
}

/// Closure of `((1ⁿ, id), (1ⁿ, ab))` under the diagonal action. Fails with an
/// invariant error when the orbit is not the graph of a map on all of `X_n`
/// or contains a pair together with its reverse.
pub fn orbit_mn(n: usize) -> Result<SignedPairOrbit> {
    let set = GermSet::new(n)?;
    let data = generator_data(&set)?;
    let g3 = germ_group();
    let ones = Vertex::ones(n).code();
    let start = (set.point(ones, g3.identity()), set.point(ones, g3.ab()));
    const UNSET: u32 = u32::MAX;
    let mut mu = vec![UNSET; set.size()];
    mu[start.0 as usize] = start.1;
    let mut queue = VecDeque::from([start]);
    while let Some((x, y)) = queue.pop_front() {
        for d in &data {
            let (gx, gy) = (d.act(&set, x), d.act(&set, y));
            match mu[gx as usize] {
                UNSET => {
                    mu[gx as usize] = gy;
                    queue.push_back((gx, gy));
                }
                z if z != gy => {
                    return Err(Error::invariant(format!(
                        "orbit pairs {} with two partners",
                        set.describe(gx)
                    )))
                }
                _ => {}
            }
        }
    }
    if mu.contains(&UNSET) {
        return Err(Error::invariant("the pair orbit does not cover X_n"));
    }
    for (x, &y) in mu.iter().enumerate() {
        if mu[y as usize] == x as u32 {
            return Err(Error::invariant(format!(
                "pair orbit contains ({}, {}) and its reverse",
                set.describe(x as u32),
                set.describe(y)
            )));
        }
    }
    Ok(SignedPairOrbit { set, mu })
}

/// Element `(f, z)` of `N̄_n`; `f` sorted by point without zero entries.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize)]
pub struct NilElement {
    pub f: Vec<(u32, i64)>,
    pub z: i64,
}

fn checked(x: Option<i64>) -> Result<i64> {
    x.ok_or(Error::Overflow("central extension arithmetic"))
}

fn lookup(f: &[(u32, i64)], p: u32) -> i64 {
    f.binary_search_by_key(&p, |e| e.0).map_or(0, |i| f[i].1)
}

fn add_sparse(f1: &[(u32, i64)], f2: &[(u32, i64)]) -> Result<Vec<(u32, i64)>> {
    let mut out = Vec::with_capacity(f1.len() + f2.len());
    let (mut i, mut j) = (0, 0);
    while i < f1.len() || j < f2.len() {
        let e = match (f1.get(i), f2.get(j)) {
            (Some(a), Some(b)) if a.0 == b.0 => {
                i += 1;
                j += 1;
                (a.0, checked(a.1.checked_add(b.1))?)
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
        if e.1 != 0 {
            out.push(e);
        }
    }
    Ok(out)
}

impl NilElement {
    /// `b_x`
    pub fn basis(x: u32) -> Self {
        NilElement { f: vec![(x, 1)], z: 0 }
    }

    pub fn central(z: i64) -> Self {
        NilElement { f: Vec::new(), z }
    }

    pub fn is_identity(&self) -> bool {
        self.f.is_empty() && self.z == 0
    }
}

/// `B(f₁, f₂) = Σ_x f₁(x)·f₂(μx)`.
pub fn cocycle(f1: &[(u32, i64)], f2: &[(u32, i64)], m: &SignedPairOrbit) -> Result<i64> {
    f1.iter().try_fold(0i64, |acc, &(x, a)| {
        let b = lookup(f2, m.partner(x));
        checked(acc.checked_add(checked(a.checked_mul(b))?))
    })
}

pub fn nil_multiply(x: &NilElement, y: &NilElement, m: &SignedPairOrbit) -> Result<NilElement> {
    let f = add_sparse(&x.f, &y.f)?;
    let z = checked(x.z.checked_add(y.z))?;
    let z = checked(z.checked_add(cocycle(&x.f, &y.f, m)?))?;
    Ok(NilElement { f, z })
}

/// `(f, z)⁻¹ = (−f, −z + B(f, f))`
pub fn nil_inverse(x: &NilElement, m: &SignedPairOrbit) -> Result<NilElement> {
    let f = x.f.iter().map(|&(p, a)| Ok((p, checked(a.checked_neg())?))).collect::<Result<Vec<_>>>()?;
    let z = checked(checked(x.z.checked_neg())?.checked_add(cocycle(&x.f, &x.f, m)?))?;
    Ok(NilElement { f, z })
}

/// `x⁻¹y⁻¹xy`
pub fn nil_commutator(x: &NilElement, y: &NilElement, m: &SignedPairOrbit) -> Result<NilElement> {
    let xi = nil_inverse(x, m)?;
    let yi = nil_inverse(y, m)?;
    let l = nil_multiply(&xi, &yi, m)?;
    let r = nil_multiply(x, y, m)?;
    nil_multiply(&l, &r, m)
}

/// Element `(h, g)` of `Γ_n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GammaElement {
    pub lamp: NilElement,
    pub base: TreeAut,
}

impl GammaElement {
    pub fn is_identity(&self) -> bool {
        self.lamp.is_identity() && self.base.is_identity()
    }

    /// Trivial image in `ℤ ≀_{X_n} G_{n+3}`.
    pub fn in_kernel(&self) -> bool {
        self.lamp.f.is_empty() && self.base.is_identity()
    }
}

/// Letter of a word in the marking `(a, b, c, d, t)`; `T` is `t⁻¹`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GammaLetter {
    Tree(Letter),
    T,
    TInv,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct GammaWord(pub Vec<GammaLetter>);

impl GammaWord {
    pub fn from_tree(w: &Word) -> Result<Self> {
        w.letters()
            .iter()
            .map(|&l| if l.is_tree() { Ok(GammaLetter::Tree(l)) } else { Err(Error::invalid(format!("{l} is not a tree letter"))) })
            .collect::<Result<_>>()
            .map(GammaWord)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        GammaWord(
            self.0
                .iter()
                .rev()
                .map(|&l| match l {
                    GammaLetter::T => GammaLetter::TInv,
                    GammaLetter::TInv => GammaLetter::T,
                    t => t,
                })
                .collect(),
        )
    }

    pub fn concat(&self, other: &GammaWord) -> Self {
        GammaWord(self.0.iter().chain(&other.0).copied().collect())
    }

    /// `x⁻¹y⁻¹xy`
    pub fn commutator(x: &GammaWord, y: &GammaWord) -> Self {
        x.inverse().concat(&y.inverse()).concat(x).concat(y)
    }
}

impl fmt::Display for GammaWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            match l {
                GammaLetter::Tree(t) => write!(f, "{t}")?,
                GammaLetter::T => f.write_str("t")?,
                GammaLetter::TInv => f.write_str("T")?,
            }
        }
        Ok(())
    }
}

impl FromStr for GammaWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != '.')
            .map(|c| match c {
                'a' => Ok(GammaLetter::Tree(Letter::A)),
                'b' => Ok(GammaLetter::Tree(Letter::B)),
                'c' => Ok(GammaLetter::Tree(Letter::C)),
                'd' => Ok(GammaLetter::Tree(Letter::D)),
                't' => Ok(GammaLetter::T),
                'T' => Ok(GammaLetter::TInv),
                other => Err(Error::UnknownLetter(other.to_string())),
            })
            .collect::<Result<_>>()
            .map(GammaWord)
    }
}

/// `Γ_n` marked by `(a, b, c, d, t)`.
#[derive(Clone, Debug)]
pub struct GammaGroup {
    pub orbit: Arc<SignedPairOrbit>,
    base: Generators,
    gens: Vec<GammaElement>,
}

impl GammaGroup {
    pub fn new(n: usize) -> Result<Self> {
        let orbit = Arc::new(orbit_mn(n)?);
        let base = Generators::new(&OmegaString::first(), n + 3)?;
        let mut gens: Vec<GammaElement> = base
            .all()
            .iter()
            .map(|g| GammaElement { lamp: NilElement::default(), base: g.clone() })
            .collect();
        let g3 = germ_group();
        let t = orbit.set.point(Vertex::ones(n).code(), g3.identity());
        gens.push(GammaElement { lamp: NilElement::basis(t), base: TreeAut::identity(n + 3)? });
        Ok(GammaGroup { orbit, base, gens })
    }

    pub fn level(&self) -> usize {
        self.orbit.set.level
    }

    pub fn set(&self) -> &GermSet {
        &self.orbit.set
    }

    pub fn base_generators(&self) -> &Generators {
        &self.base
    }

    /// `t = (b_{(1ⁿ, id)}, id)`
    pub fn t(&self) -> &GammaElement {
        &self.gens[4]
    }

    /// `(b_x, id)`
    pub fn basis_element(&self, x: u32) -> Result<GammaElement> {
        Ok(GammaElement { lamp: NilElement::basis(x), base: TreeAut::identity(self.base.depth)? })
    }

    /// `(0, z, id)`
    pub fn central_element(&self, z: i64) -> Result<GammaElement> {
        Ok(GammaElement { lamp: NilElement::central(z), base: TreeAut::identity(self.base.depth)? })
    }

    /// `g·f` with `(g·f)(p) = f(p·g)`: the entry at `q` moves to `q·g⁻¹`.
    fn shift(&self, g: &TreeAut, f: &[(u32, i64)]) -> Result<Vec<(u32, i64)>> {
        if f.is_empty() || g.is_identity() {
            return Ok(f.to_vec());
        }
        let data = self.set().action_data(&g.inverse())?;
        let mut out: Vec<(u32, i64)> = f.iter().map(|&(q, v)| (data.act(self.set(), q), v)).collect();
        out.sort_unstable();
        Ok(out)
    }

    pub fn try_mul(&self, x: &GammaElement, y: &GammaElement) -> Result<GammaElement> {
        let moved = NilElement { f: self.shift(&x.base, &y.lamp.f)?, z: y.lamp.z };
        Ok(GammaElement { lamp: nil_multiply(&x.lamp, &moved, &self.orbit)?, base: x.base.compose(&y.base) })
    }

    pub fn try_inv(&self, x: &GammaElement) -> Result<GammaElement> {
        let h = nil_inverse(&x.lamp, &self.orbit)?;
        let inv = x.base.inverse();
        Ok(GammaElement { lamp: NilElement { f: self.shift(&inv, &h.f)?, z: h.z }, base: inv })
    }

    pub fn letter(&self, l: GammaLetter) -> Result<GammaElement> {
        match l {
            GammaLetter::Tree(t) => Ok(self.gens[t.tree_index().expect("tree letter")].clone()),
            GammaLetter::T => Ok(self.gens[4].clone()),
            GammaLetter::TInv => self.try_inv(&self.gens[4]),
        }
    }

    pub fn commutes(&self, x: &GammaElement, y: &GammaElement) -> Result<bool> {
        Ok(self.try_mul(x, y)? == self.try_mul(y, x)?)
    }

    pub fn commutator(&self, x: &GammaElement, y: &GammaElement) -> Result<GammaElement> {
        let l = self.try_mul(&self.try_inv(x)?, &self.try_inv(y)?)?;
        self.try_mul(&l, &self.try_mul(x, y)?)
    }
}

impl MarkedGroup for GammaGroup {
    type Elem = GammaElement;

    fn labels(&self) -> Vec<String> {
        ["a", "b", "c", "d", "t"].map(String::from).to_vec()
    }
    fn identity(&self) -> GammaElement {
        GammaElement { lamp: NilElement::default(), base: TreeAut::identity(self.base.depth).expect("depth checked") }
    }
    fn generator(&self, i: usize) -> GammaElement {
        self.gens[i].clone()
    }
    /// Central coordinates stay far below `i64` range on any ball this crate
    /// can enumerate; overflow aborts.
    fn multiply(&self, x: &GammaElement, y: &GammaElement) -> GammaElement {
        self.try_mul(x, y).expect("central coordinate overflow")
    }
    fn inverse(&self, x: &GammaElement) -> GammaElement {
        self.try_inv(x).expect("central coordinate overflow")
    }
}

pub fn gamma_eval(w: &GammaWord, group: &GammaGroup) -> Result<GammaElement> {
    let mut acc = group.identity();
    for &l in &w.0 {
        acc = group.try_mul(&acc, &group.letter(l)?)?;
    }
    Ok(acc)
}

/// A tree word for an element fixing `1ⁿ` with section `ab` there: `σⁿ(ab)`,
/// freely reduced. Each application of `σ` puts the previous word at the
/// right child without a root swap.
pub fn section_conjugator(n: usize) -> Result<Word> {
    free_reduce(&substitute_sigma_pow(&"ab".parse()?, n)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorImage {
    pub level: usize,
    pub identity: bool,
    pub central: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CenterWitnessReport {
    pub level: usize,
    pub conjugator: String,
    pub word: String,
    /// Image in `Γ_n` is `(0, ±1, id)`.
    pub central_in_own_factor: bool,
    pub central: i64,
    /// Images in the neighbouring factors.
    pub others: Vec<FactorImage>,
    pub commutes_with_generators: bool,
}

impl CenterWitnessReport {
    pub fn passed(&self) -> bool {
        self.central_in_own_factor && self.others.iter().all(|f| f.identity) && self.commutes_with_generators
    }
}

/// `[t, w⁻¹tw]` for a tree word `w`: with `w` from [`section_conjugator`],
/// `w⁻¹tw = b_{(1ⁿ, ab)}` in `Γ_n` and the commutator is `[b_x, b_{μx}]`.
pub fn center_witness_word(conjugator: &Word) -> Result<GammaWord> {
    let w = GammaWord::from_tree(conjugator)?;
    let t = GammaWord(vec![GammaLetter::T]);
    let conj = w.inverse().concat(&t).concat(&w);
    Ok(GammaWord::commutator(&t, &conj))
}

pub fn center_witness(n: usize) -> Result<CenterWitnessReport> {
    center_witness_with(n, &section_conjugator(n)?)
}

/// Checks the witness built from `conjugator` in `Γ_n` and in `Γ_j` for
/// `1 ≤ j ≤ n + 2`, `j ≠ n`.
pub fn center_witness_with(n: usize, conjugator: &Word) -> Result<CenterWitnessReport> {
    let word = center_witness_word(conjugator)?;
    let own = GammaGroup::new(n)?;
    let value = gamma_eval(&word, &own)?;
    let central_in_own_factor = value.in_kernel() && value.lamp.z.abs() == 1;
    let mut commutes = true;
    for g in own.generators() {
        commutes &= own.commutes(&value, &g)?;
    }
    let mut others = Vec::new();
    for j in (1..=n + 2).filter(|&j| j != n) {
        let group = GammaGroup::new(j)?;
        let v = gamma_eval(&word, &group)?;
        others.push(FactorImage { level: j, identity: v.is_identity(), central: v.lamp.z });
    }
    Ok(CenterWitnessReport {
        level: n,
        conjugator: conjugator.to_string(),
        word: word.to_string(),
        central_in_own_factor,
        central: value.lamp.z,
        others,
        commutes_with_generators: commutes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BallCoincidenceReport {
    pub levels: (usize, usize),
    pub radius: usize,
    pub matching: MatchingReport,
    /// Every lamp point in both balls has germ coordinate in `{id, b, c, d}`.
    pub germs_in_klein: bool,
}

impl BallCoincidenceReport {
    pub fn passed(&self) -> bool {
        self.matching.radius >= self.radius && self.germs_in_klein
    }
}

fn germs_in_klein(group: &GammaGroup, radius: usize, opts: BallOptions) -> Result<bool> {
    let g3 = germ_group();
    let allowed: Vec<u8> = [Word::empty(), "b".parse()?, "c".parse()?, "d".parse()?]
        .iter()
        .map(|w| g3.eval(w))
        .collect::<Result<_>>()?;
    let (_, elems) = ball_elements(group, radius, opts)?;
    Ok(elems
        .iter()
        .all(|(x, _)| x.lamp.f.iter().all(|&(p, _)| allowed.contains(&group.set().split(p).1))))
}

/// Compares the Cayley balls of `Γ_n` and `Γ_m` up to `radius`.
pub fn gamma_ball_coincidence(n: usize, m: usize, radius: usize, opts: BallOptions) -> Result<BallCoincidenceReport> {
    let (gn, gm) = (GammaGroup::new(n)?, GammaGroup::new(m)?);
    let matching = matching_radius(&gn, &gm, radius, opts)?;
    let germs = germs_in_klein(&gn, radius, opts)? && germs_in_klein(&gm, radius, opts)?;
    Ok(BallCoincidenceReport { levels: (n, m), radius, matching, germs_in_klein: germs })
}

#[derive(Clone, Debug, Serialize)]
pub struct CenterReport {
    pub level: usize,
    pub radius: usize,
    pub elements: usize,
    /// Elements with nontrivial image in `ℤ ≀ G` that commute with every
    /// test element.
    pub noncentral_failures: Vec<String>,
    /// Kernel elements that fail to commute with some generator.
    pub kernel_failures: usize,
    pub kernel_elements: usize,
}

impl CenterReport {
    pub fn passed(&self) -> bool {
        self.noncentral_failures.is_empty() && self.kernel_failures == 0
    }
}

/// Over the ball of the given radius: kernel elements of `Γ_n → ℤ ≀ G`
/// commute with the generators, and every other element fails to commute
/// with a generator or with some `b_y`. Central elements `(0, z, id)` and
/// the center witness are checked as well.
pub fn center_check(n: usize, radius: usize, opts: BallOptions) -> Result<CenterReport> {
    let group = GammaGroup::new(n)?;
    let (_, elems) = ball_elements(&group, radius, opts)?;
    let mut tests = group.generators();
    for y in 0..group.set().size() as u32 {
        tests.push(group.basis_element(y)?);
    }
    let gens = group.generators();
    let mut noncentral_failures = Vec::new();
    let (mut kernel_failures, mut kernel_elements) = (0, 0);
    for (x, _) in &elems {
        if x.in_kernel() {
            kernel_elements += 1;
            for g in &gens {
                if !group.commutes(x, g)? {
                    kernel_failures += 1;
                    break;
                }
            }
        } else {
            let mut central = true;
            for h in &tests {
                if !group.commutes(x, h)? {
                    central = false;
                    break;
                }
            }
            if central {
                noncentral_failures.push(format!("{:?}", x.lamp));
            }
        }
    }
    // the kernel is not reached by small balls; add its generator and the witness
    let mut kernel = vec![group.central_element(1)?, group.central_element(-2)?];
    kernel.push(gamma_eval(&center_witness_word(&section_conjugator(n)?)?, &group)?);
    for x in &kernel {
        kernel_elements += 1;
        if !x.in_kernel() || !gens.iter().all(|g| group.commutes(x, g).unwrap_or(false)) {
            kernel_failures += 1;
        }
    }
    Ok(CenterReport { level: n, radius, elements: elems.len(), noncentral_failures, kernel_failures, kernel_elements })
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectSumReport {
    pub levels: Vec<usize>,
    /// `central[i][j]`: central coordinate of witness `i` in factor `j`.
    pub central: Vec<Vec<i64>>,
    pub products_checked: usize,
    pub failures: usize,
}

impl DirectSumReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
            && self.central.iter().enumerate().all(|(i, row)| {
                row.iter().enumerate().all(|(j, &z)| if i == j { z.abs() == 1 } else { z == 0 })
            })
    }
}

/// In the diagonal product of `Γ_1, …, Γ_k`, the witnesses are central and
/// `∏ W_i^{e_i}` has central coordinate `e_j·c_j` in factor `j` for every
/// exponent vector in `{−2, …, 2}ᵏ`.
pub fn direct_sum_check(k: usize) -> Result<DirectSumReport> {
    let groups: Vec<GammaGroup> = (1..=k).map(GammaGroup::new).collect::<Result<_>>()?;
    let words: Vec<GammaWord> = (1..=k).map(|i| center_witness_word(&section_conjugator(i)?)).collect::<Result<_>>()?;
    let mut values: Vec<Vec<GammaElement>> = Vec::new();
    let mut central: Vec<Vec<i64>> = Vec::new();
    let mut failures = 0;
    for w in &words {
        let row: Vec<GammaElement> = groups.iter().map(|g| gamma_eval(w, g)).collect::<Result<_>>()?;
        for (g, v) in groups.iter().zip(&row) {
            if !v.in_kernel() {
                failures += 1;
            }
            for s in g.generators() {
                if !g.commutes(v, &s)? {
                    failures += 1;
                }
            }
        }
        central.push(row.iter().map(|v| v.lamp.z).collect());
        values.push(row);
    }
    let mut checked = 0;
    let total = 5usize.pow(k as u32);
    for code in 0..total {
        let exps: Vec<i64> = (0..k).map(|i| (code / 5usize.pow(i as u32) % 5) as i64 - 2).collect();
        for (j, g) in groups.iter().enumerate() {
            let mut acc = g.identity();
            for (i, &e) in exps.iter().enumerate() {
                let base = if e < 0 { g.try_inv(&values[i][j])? } else { values[i][j].clone() };
                for _ in 0..e.abs() {
                    acc = g.try_mul(&acc, &base)?;
                }
            }
            let expected: i64 = (0..k).map(|i| exps[i] * central[i][j]).sum();
            if !acc.in_kernel() || acc.lamp.z != expected {
                failures += 1;
            }
        }
        checked += 1;
    }
    Ok(DirectSumReport { levels: (1..=k).collect(), central, products_checked: checked, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn germ_group_order_and_abab() {
        let g3 = germ_group();
        assert_eq!(g3.order(), 128);
        let abab = g3.eval(&"abab".parse().unwrap()).unwrap();
        assert_ne!(abab, g3.identity());
        // abab = (ca, ac) at depth 3
        let ca_ac = TreeAut::from_sections(
            &crate::tree::evaluate_word(&"ca".parse().unwrap(), &OmegaString::first(), 2).unwrap(),
            &crate::tree::evaluate_word(&"ac".parse().unwrap(), &OmegaString::first(), 2).unwrap(),
            false,
        )
        .unwrap();
        assert_eq!(g3.element(abab), &ca_ac);
    }

    #[test]
    fn orbit_is_left_multiplication_by_ab() {
        let g3 = germ_group();
        for n in 1..=3 {
            let m = orbit_mn(n).unwrap();
            assert_eq!(m.len(), m.set.size());
            for x in 0..m.set.size() as u32 {
                let (v, gamma) = m.set.split(x);
                let (u, delta) = m.set.split(m.partner(x));
                assert_eq!(u, v);
                assert_eq!(delta, g3.mul(g3.ab(), gamma));
            }
            assert!(germ_action_transitive(n).unwrap());
        }
    }

    fn random_nil(rng: &mut ChaCha8Rng, m: &SignedPairOrbit, near: u32) -> NilElement {
        let mut f: Vec<(u32, i64)> = Vec::new();
        for _ in 0..rng.gen_range(0..5) {
            // favour pairs related by μ so that the cocycle is exercised
            let p = if rng.gen_bool(0.5) { m.partner(near) } else { rng.gen_range(0..m.set.size() as u32) };
            let p = if rng.gen_bool(0.3) { near } else { p };
            f = add_sparse(&f, &[(p, rng.gen_range(-3..=3))]).unwrap();
        }
        NilElement { f, z: rng.gen_range(-5..=5) }
    }

    #[test]
    fn nil_group_axioms() {
        let m = orbit_mn(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let near = rng.gen_range(0..m.set.size() as u32);
            let (x, y, z) = (random_nil(&mut rng, &m, near), random_nil(&mut rng, &m, near), random_nil(&mut rng, &m, near));
            let l = nil_multiply(&nil_multiply(&x, &y, &m).unwrap(), &z, &m).unwrap();
            let r = nil_multiply(&x, &nil_multiply(&y, &z, &m).unwrap(), &m).unwrap();
            assert_eq!(l, r);
            assert!(nil_multiply(&x, &nil_inverse(&x, &m).unwrap(), &m).unwrap().is_identity());
        }
    }

    #[test]
    fn basis_commutators_are_signs() {
        let m = orbit_mn(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let x = rng.gen_range(0..m.set.size() as u32);
            let y = if rng.gen_bool(0.5) { m.partner(x) } else { rng.gen_range(0..m.set.size() as u32) };
            for (p, q) in [(x, y), (y, x)] {
                let c = nil_commutator(&NilElement::basis(p), &NilElement::basis(q), &m).unwrap();
                assert_eq!(c, NilElement::central(m.sign(p, q)));
            }
        }
    }

    /// Collects `b_x^{±1}` letters into increasing order of `x`, swapping
    /// neighbours with `b_x^e b_y^f = b_y^f b_x^e c^{e f ε(x,y)}`.
    fn bubble_normal_form(letters: &[(u32, i64)], m: &SignedPairOrbit) -> (Vec<(u32, i64)>, i64) {
        let mut w = letters.to_vec();
        let mut z = 0;
        let mut sorted = false;
        while !sorted {
            sorted = true;
            for i in 0..w.len().saturating_sub(1) {
                let ((x, e), (y, f)) = (w[i], w[i + 1]);
                if x > y {
                    z += e * f * m.sign(x, y);
                    w.swap(i, i + 1);
                    sorted = false;
                }
            }
        }
        let mut f: Vec<(u32, i64)> = Vec::new();
        for (p, e) in w {
            f = add_sparse(&f, &[(p, e)]).unwrap();
        }
        (f, z)
    }

    #[test]
    fn cocycle_agrees_with_relations() {
        let m = orbit_mn(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..300 {
            let seeds: Vec<u32> = (0..3).map(|_| rng.gen_range(0..m.set.size() as u32)).collect();
            let pool: Vec<u32> = seeds.iter().flat_map(|&s| [s, m.partner(s), m.partner(m.partner(s))]).collect();
            let letters: Vec<(u32, i64)> =
                (0..rng.gen_range(0..12)).map(|_| (pool[rng.gen_range(0..pool.len())], if rng.gen_bool(0.5) { 1 } else { -1 })).collect();
            let mut acc = NilElement::default();
            for &(p, e) in &letters {
                let b = NilElement::basis(p);
                let b = if e < 0 { nil_inverse(&b, &m).unwrap() } else { b };
                acc = nil_multiply(&acc, &b, &m).unwrap();
            }
            let (f, z) = bubble_normal_form(&letters, &m);
            assert_eq!(acc.f, f);
            // the ordered product of powers in the cocycle model
            let mut ordered = NilElement::default();
            for &(p, e) in &f {
                ordered = nil_multiply(&ordered, &NilElement { f: vec![(p, e)], z: 0 }, &m).unwrap();
            }
            assert_eq!(acc.z, z + ordered.z);
        }
    }

    #[test]
    fn gamma_generators_and_conjugation() {
        let g = GammaGroup::new(2).unwrap();
        let t = gamma_eval(&"t".parse().unwrap(), &g).unwrap();
        assert_eq!(t.lamp, NilElement::basis(g.set().point(3, germ_group().identity())));
        assert!(gamma_eval(&"tT".parse().unwrap(), &g).unwrap().is_identity());
        let w = GammaWord::from_tree(&section_conjugator(2).unwrap()).unwrap();
        let conj = gamma_eval(&w.inverse().concat(&"t".parse().unwrap()).concat(&w), &g).unwrap();
        let y = g.set().point(3, germ_group().ab());
        assert_eq!(conj, g.basis_element(y).unwrap());
    }

    #[test]
    fn base_conjugation_fixes_the_center() {
        let g = GammaGroup::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let gens = g.generators();
        for _ in 0..100 {
            let mut x = g.identity();
            for _ in 0..10 {
                x = g.try_mul(&x, &gens[rng.gen_range(0..4)]).unwrap();
            }
            let z = g.central_element(rng.gen_range(-4..=4)).unwrap();
            let conj = g.try_mul(&g.try_mul(&g.try_inv(&x).unwrap(), &z).unwrap(), &x).unwrap();
            assert_eq!(conj, z);
        }
    }

    #[test]
    fn witnesses_small_levels() {
        for n in 1..=2 {
            let r = center_witness(n).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        let degenerate = center_witness_with(1, &Word::empty()).unwrap();
        assert!(!degenerate.passed());
        assert_eq!(degenerate.central, 0);
    }
}
