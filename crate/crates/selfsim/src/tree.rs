//! Automorphisms of the finite binary rooted tree and the generators of the
//! groups `G_ω`.
//!
//! Everything acts on the right: `apply(compose(g, h), v) = apply(h, apply(g, v))`.
//! A [`TreeAut`] of depth `n` is its portrait, one swap bit per internal
//! vertex, stored breadth first (root at 0, children of `i` at `2i+1`, `2i+2`).

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{Letter, Word};

pub const MAX_DEPTH: usize = 24;

/// A vertex `v₁…v_k` of the tree, `v₁` stored in the most significant bit.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Vertex {
    len: u8,
    code: u32,
}

impl Vertex {
    pub fn root() -> Self {
        Vertex::default()
    }

    pub fn new(len: usize, code: u32) -> Result<Self> {
        if len > MAX_DEPTH {
            return Err(Error::Capacity(len));
        }
        if len < 32 && code >> len != 0 {
            return Err(Error::invalid(format!("code {code} does not fit {len} bits")));
        }
        Ok(Vertex { len: len as u8, code })
    }

    pub(crate) fn from_parts(len: usize, code: u32) -> Self {
        Vertex { len: len as u8, code }
    }

    /// `1ⁿ`
    pub fn ones(n: usize) -> Self {
        Vertex::from_parts(n, (1u32 << n) - 1)
    }

    /// `1ⁿ⁻¹0`, the sibling of `1ⁿ`.
    pub fn ones_then_zero(n: usize) -> Self {
        assert!(n >= 1, "1^(n-1)0 needs n >= 1");
        Vertex::from_parts(n, (1u32 << n) - 2)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_root(&self) -> bool {
        self.len == 0
    }

    pub fn code(&self) -> u32 {
        self.code
    }

    /// Letter `i` (0-based from the root).
    pub fn letter(&self, i: usize) -> u32 {
        (self.code >> (self.len as usize - 1 - i)) & 1
    }

    pub fn child(&self, c: u32) -> Self {
        Vertex::from_parts(self.len() + 1, (self.code << 1) | c)
    }

    pub fn concat(&self, other: &Vertex) -> Self {
        Vertex::from_parts(self.len() + other.len(), (self.code << other.len) | other.code)
    }

    pub fn prefix(&self, k: usize) -> Self {
        Vertex::from_parts(k, self.code >> (self.len() - k))
    }

    pub fn sibling(&self) -> Self {
        assert!(self.len > 0, "the root has no sibling");
        Vertex::from_parts(self.len(), self.code ^ 1)
    }

    /// All vertices of level `n` in lexicographic order.
    pub fn level(n: usize) -> impl Iterator<Item = Vertex> {
        (0..1u32 << n).map(move |c| Vertex::from_parts(n, c))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            return f.write_str("∅");
        }
        for i in 0..self.len() {
            write!(f, "{}", self.letter(i))?;
        }
        Ok(())
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "∅" || s == "root" {
            return Ok(Vertex::root());
        }
        let mut code = 0u32;
        for (i, ch) in s.chars().enumerate() {
            if i >= MAX_DEPTH {
                return Err(Error::Capacity(s.len()));
            }
            code = (code << 1)
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Error::invalid(format!("bad vertex {s:?}"))),
                };
        }
        Vertex::new(s.chars().count(), code)
    }
}

/// An eventually periodic sequence over `{0,1,2}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct OmegaString {
    prefix: Vec<u8>,
    period: Vec<u8>,
}

impl OmegaString {
    pub fn new(prefix: Vec<u8>, period: Vec<u8>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::invalid("omega needs a nonempty period"));
        }
        if prefix.iter().chain(&period).any(|&x| x > 2) {
            return Err(Error::invalid("omega letters must lie in {0,1,2}"));
        }
        Ok(OmegaString { prefix, period })
    }

    /// `(012)^∞`, the first Grigorchuk group.
    pub fn first() -> Self {
        OmegaString { prefix: vec![], period: vec![0, 1, 2] }
    }

    pub fn letter(&self, k: usize) -> u8 {
        if k < self.prefix.len() {
            self.prefix[k]
        } else {
            self.period[(k - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn shift(&self, k: usize) -> Self {
        if k <= self.prefix.len() {
            return OmegaString { prefix: self.prefix[k..].to_vec(), period: self.period.clone() };
        }
        let r = (k - self.prefix.len()) % self.period.len();
        let mut period = self.period[r..].to_vec();
        period.extend_from_slice(&self.period[..r]);
        OmegaString { prefix: vec![], period }
    }

    /// Whether `ω_k` sends the Klein letter `x` to `a`.
    pub fn survives(&self, k: usize, x: Letter) -> bool {
        let killed = match self.letter(k) {
            0 => Letter::D,
            1 => Letter::C,
            _ => Letter::B,
        };
        x != killed
    }
}

impl fmt::Display for OmegaString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.prefix {
            write!(f, "{x}")?;
        }
        f.write_str("(")?;
        for x in &self.period {
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for OmegaString {
    type Err = Error;

    /// `"012"` is a pure period; `"01(2)"` has prefix `01` and period `2`.
    fn from_str(s: &str) -> Result<Self> {
        let digits = |t: &str| -> Result<Vec<u8>> {
            t.chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    '2' => Ok(2),
                    _ => Err(Error::invalid(format!("bad omega {s:?}"))),
                })
                .collect()
        };
        let s = s.trim().trim_end_matches("^inf").trim_end_matches('∞').trim_end_matches('^');
        match s.find('(') {
            None => OmegaString::new(vec![], digits(s)?),
            Some(i) => {
                let rest = s[i + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::invalid(format!("bad omega {s:?}")))?;
                OmegaString::new(digits(&s[..i])?, digits(rest)?)
            }
        }
    }
}

/// Portrait of an automorphism of the depth-`n` tree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeAut {
    depth: u8,
    bits: Vec<u64>,
}

#[inline]
fn node(level: usize, code: u32) -> usize {
    (1usize << level) - 1 + code as usize
}

impl TreeAut {
    pub fn identity(depth: usize) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::Capacity(depth));
        }
        let nbits = (1usize << depth) - 1;
        Ok(TreeAut { depth: depth as u8, bits: vec![0; nbits.div_ceil(64)] })
    }

    fn blank(depth: usize) -> Self {
        let nbits = (1usize << depth) - 1;
        TreeAut { depth: depth as u8, bits: vec![0; nbits.div_ceil(64)] }
    }

    pub fn depth(&self) -> usize {
        self.depth as usize
    }

    #[inline]
    fn bit(&self, idx: usize) -> bool {
        (self.bits[idx >> 6] >> (idx & 63)) & 1 == 1
    }

    #[inline]
    fn set(&mut self, idx: usize, on: bool) {
        if on {
            self.bits[idx >> 6] |= 1 << (idx & 63);
        } else {
            self.bits[idx >> 6] &= !(1 << (idx & 63));
        }
    }

    /// Swap bit at an internal vertex.
    pub fn swap_at(&self, v: &Vertex) -> bool {
        v.len() < self.depth() && self.bit(node(v.len(), v.code()))
    }

    pub fn set_swap(&mut self, v: &Vertex, on: bool) -> Result<()> {
        if v.len() >= self.depth() {
            return Err(Error::TooDeep { vertex: v.len(), depth: self.depth() });
        }
        self.set(node(v.len(), v.code()), on);
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Image code of a level-`level` vertex given by its code.
    #[inline]
    pub fn act_code(&self, level: usize, code: u32) -> u32 {
        let mut out = 0u32;
        let mut src = 0u32;
        for k in 0..level {
            let c = (code >> (level - 1 - k)) & 1;
            let s = self.bit(node(k, src)) as u32;
            out = (out << 1) | (c ^ s);
            src = (src << 1) | c;
        }
        out
    }

    /// The code `x` with `x·g = code`, without forming `g⁻¹`.
    #[inline]
    pub fn act_inverse_code(&self, level: usize, code: u32) -> u32 {
        let mut src = 0u32;
        for k in 0..level {
            let c = (code >> (level - 1 - k)) & 1;
            let s = self.bit(node(k, src)) as u32;
            src = (src << 1) | (c ^ s);
        }
        src
    }

    pub fn apply(&self, v: &Vertex) -> Result<Vertex> {
        if v.len() > self.depth() {
            return Err(Error::TooDeep { vertex: v.len(), depth: self.depth() });
        }
        Ok(Vertex::from_parts(v.len(), self.act_code(v.len(), v.code())))
    }

    /// `g` then `h`.
    pub fn compose(&self, h: &TreeAut) -> TreeAut {
        assert_eq!(self.depth, h.depth, "composing portraits of different depth");
        let n = self.depth();
        let mut out = TreeAut::blank(n);
        let mut img = vec![0u32];
        for k in 0..n {
            let mut next = Vec::with_capacity(img.len() * 2);
            for (x, &y) in img.iter().enumerate() {
                let g = self.bit(node(k, x as u32));
                let hh = h.bit(node(k, y));
                if g ^ hh {
                    out.set(node(k, x as u32), true);
                }
                if k + 1 < n {
                    let base = y << 1;
                    next.push(base | g as u32);
                    next.push(base | (!g) as u32);
                }
            }
            img = next;
        }
        out
    }

    pub fn inverse(&self) -> TreeAut {
        let n = self.depth();
        let mut out = TreeAut::blank(n);
        let mut img = vec![0u32];
        for k in 0..n {
            let mut next = Vec::with_capacity(img.len() * 2);
            for (x, &y) in img.iter().enumerate() {
                let g = self.bit(node(k, x as u32));
                if g {
                    out.set(node(k, y), true);
                }
                if k + 1 < n {
                    next.push((y << 1) | g as u32);
                    next.push((y << 1) | (!g) as u32);
                }
            }
            img = next;
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> TreeAut {
        let mut acc = TreeAut::blank(self.depth());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    /// Order in the finite group `Aut(Tⁿ)`; always a power of two.
    pub fn order(&self) -> u64 {
        let mut x = self.clone();
        let mut ord = 1u64;
        while !x.is_identity() {
            x = x.compose(&x);
            ord *= 2;
        }
        ord
    }

    /// `g⁻¹h⁻¹gh`
    pub fn commutator(&self, h: &TreeAut) -> TreeAut {
        self.inverse().compose(&h.inverse()).compose(self).compose(h)
    }

    /// The automorphism of the subtree below `v`, of depth `n − |v|`.
    pub fn section(&self, v: &Vertex) -> Result<TreeAut> {
        let n = self.depth();
        if v.len() > n {
            return Err(Error::TooDeep { vertex: v.len(), depth: n });
        }
        let d = n - v.len();
        let mut out = TreeAut::blank(d);
        for k in 0..d {
            let lvl = v.len() + k;
            for x in 0..1u32 << k {
                if self.bit(node(lvl, (v.code() << k) | x)) {
                    out.set(node(k, x), true);
                }
            }
        }
        Ok(out)
    }

    /// Projection to a shallower tree.
    pub fn truncate(&self, depth: usize) -> TreeAut {
        assert!(depth <= self.depth());
        let mut out = TreeAut::blank(depth);
        let nb = (1usize << depth) - 1;
        for i in 0..nb {
            if self.bit(i) {
                out.set(i, true);
            }
        }
        out
    }

    /// Fixes every vertex of level `k`.
    pub fn in_level_stabilizer(&self, k: usize) -> bool {
        let nb = (1usize << k.min(self.depth())) - 1;
        (0..nb).all(|i| !self.bit(i))
    }

    /// The element `(left, right)ε^swap` one level deeper.
    pub fn from_sections(left: &TreeAut, right: &TreeAut, swap: bool) -> Result<TreeAut> {
        if left.depth != right.depth {
            return Err(Error::LevelMismatch(left.depth(), right.depth()));
        }
        TreeAut::assemble(left.depth() + 1, 1, &[swap], &[left.clone(), right.clone()])
    }

    /// Portrait with the given swap bits above level `k` (breadth first,
    /// `2ᵏ−1` of them) and the given sections at the `2ᵏ` vertices of level `k`.
    pub fn assemble(depth: usize, k: usize, top: &[bool], sections: &[TreeAut]) -> Result<TreeAut> {
        if depth > MAX_DEPTH {
            return Err(Error::Capacity(depth));
        }
        if top.len() != (1 << k) - 1 || sections.len() != 1 << k {
            return Err(Error::invalid("assemble: wrong number of pieces"));
        }
        let mut out = TreeAut::blank(depth);
        for (i, &b) in top.iter().enumerate() {
            out.set(i, b);
        }
        for (x, s) in sections.iter().enumerate() {
            if s.depth() + k != depth {
                return Err(Error::LevelMismatch(s.depth() + k, depth));
            }
            for j in 0..s.depth() {
                for y in 0..1u32 << j {
                    if s.bit(node(j, y)) {
                        out.set(node(k + j, ((x as u32) << j) | y), true);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Permutation induced on level `k` (image codes).
    pub fn level_perm(&self, k: usize) -> Vec<u32> {
        (0..1u32 << k).map(|x| self.act_code(k, x)).collect()
    }

    /// `"depth:hex"`; bits packed little endian, byte by byte.
    pub fn to_hex(&self) -> String {
        let nbits = (1usize << self.depth()) - 1;
        let nbytes = nbits.div_ceil(8);
        let bytes: Vec<u8> = (0..nbytes)
            .map(|b| (self.bits[b / 8] >> ((b % 8) * 8)) as u8)
            .collect();
        format!("{}:{}", self.depth, hex::encode(bytes))
    }

    pub fn from_hex(s: &str) -> Result<TreeAut> {
        let (d, h) = s.split_once(':').ok_or_else(|| Error::invalid("portrait needs depth:hex"))?;
        let depth: usize = d.trim().parse().map_err(|_| Error::invalid("bad portrait depth"))?;
        let mut out = TreeAut::identity(depth)?;
        let bytes = hex::decode(h.trim()).map_err(|e| Error::invalid(format!("bad portrait hex: {e}")))?;
        let nbits = (1usize << depth) - 1;
        if bytes.len() != nbits.div_ceil(8) {
            return Err(Error::invalid("portrait length does not match depth"));
        }
        for (b, &byte) in bytes.iter().enumerate() {
            for j in 0..8 {
                if byte >> j & 1 == 1 {
                    let idx = b * 8 + j;
                    if idx >= nbits {
                        return Err(Error::invalid("portrait has stray bits"));
                    }
                    out.set(idx, true);
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for TreeAut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TreeAut({})", self.to_hex())
    }
}

/// `π_depth` of a generator of `G_ω`.
pub fn generator(letter: Letter, omega: &OmegaString, depth: usize) -> Result<TreeAut> {
    let mut g = TreeAut::identity(depth)?;
    match letter {
        Letter::A => {
            if depth > 0 {
                g.set(0, true);
            }
        }
        Letter::B | Letter::C | Letter::D => {
            // bit at 1^k 0 is set iff ω_k does not kill the letter
            for k in 0..depth.saturating_sub(1) {
                if omega.survives(k, letter) {
                    let v = Vertex::ones(k).child(0);
                    g.set(node(v.len(), v.code()), true);
                }
            }
        }
        other => return Err(Error::UnknownLetter(other.to_string())),
    }
    Ok(g)
}

/// The four generators `a, b, c, d` at a fixed depth.
#[derive(Clone, Debug)]
pub struct Generators {
    pub omega: OmegaString,
    pub depth: usize,
    gens: [TreeAut; 4],
}

impl Generators {
    pub fn new(omega: &OmegaString, depth: usize) -> Result<Self> {
        Ok(Generators {
            omega: omega.clone(),
            depth,
            gens: [
                generator(Letter::A, omega, depth)?,
                generator(Letter::B, omega, depth)?,
                generator(Letter::C, omega, depth)?,
                generator(Letter::D, omega, depth)?,
            ],
        })
    }

    pub fn get(&self, letter: Letter) -> Result<&TreeAut> {
        letter
            .tree_index()
            .map(|i| &self.gens[i])
            .ok_or_else(|| Error::UnknownLetter(letter.to_string()))
    }

    pub fn all(&self) -> &[TreeAut; 4] {
        &self.gens
    }

    pub fn eval(&self, w: &Word) -> Result<TreeAut> {
        let mut acc = TreeAut::identity(self.depth)?;
        for &l in w.letters() {
            acc = acc.compose(self.get(l)?);
        }
        Ok(acc)
    }
}

/// Product of generator images, left to right.
pub fn evaluate_word(w: &Word, omega: &OmegaString, depth: usize) -> Result<TreeAut> {
    Generators::new(omega, depth)?.eval(w)
}

/// BFS tree of the level-`n` Schreier graph from `start`: distances and, for
/// every reached vertex, the word of a shortest path (generators tried in the
/// order a, b, c, d).
pub struct SchreierBfs {
    pub level: usize,
    pub dist: Vec<u32>,
    parent: Vec<(u32, u8)>,
    start: u32,
}

impl SchreierBfs {
    pub fn new(start: &Vertex, omega: &OmegaString) -> Result<Self> {
        let n = start.len();
        let gens = Generators::new(omega, n)?;
        let perms: Vec<Vec<u32>> = gens.all().iter().map(|g| g.level_perm(n)).collect();
        let size = 1usize << n;
        let mut dist = vec![u32::MAX; size];
        let mut parent = vec![(u32::MAX, 0u8); size];
        let mut queue = VecDeque::new();
        dist[start.code() as usize] = 0;
        queue.push_back(start.code());
        while let Some(x) = queue.pop_front() {
            for (gi, p) in perms.iter().enumerate() {
                let y = p[x as usize];
                if dist[y as usize] == u32::MAX {
                    dist[y as usize] = dist[x as usize] + 1;
                    parent[y as usize] = (x, gi as u8);
                    queue.push_back(y);
                }
            }
        }
        Ok(SchreierBfs { level: n, dist, parent, start: start.code() })
    }

    pub fn distance(&self, v: &Vertex) -> Option<u32> {
        let d = self.dist[v.code() as usize];
        (d != u32::MAX).then_some(d)
    }

    /// A shortest word `w` with `start · w = v`.
    pub fn path_word(&self, v: &Vertex) -> Option<Word> {
        self.distance(v)?;
        let mut letters = Vec::new();
        let mut x = v.code();
        while x != self.start {
            let (p, gi) = self.parent[x as usize];
            letters.push(Letter::TREE[gi as usize]);
            x = p;
        }
        letters.reverse();
        Some(Word::from_letters(letters))
    }

    pub fn connected(&self) -> bool {
        self.dist.iter().all(|&d| d != u32::MAX)
    }
}

/// Graph distance in the level-`|u|` Schreier graph of `G_ω` with generators a, b, c, d.
pub fn schreier_distance(u: &Vertex, v: &Vertex, omega: &OmegaString) -> Result<u32> {
    if u.len() != v.len() {
        return Err(Error::LevelMismatch(u.len(), v.len()));
    }
    let bfs = SchreierBfs::new(u, omega)?;
    bfs.distance(v)
        .ok_or_else(|| Error::invariant(format!("{v} unreachable from {u}: level action not transitive")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn om() -> OmegaString {
        OmegaString::first()
    }

    #[test]
    fn generator_a_swaps_level_one() {
        let a = generator(Letter::A, &om(), 1).unwrap();
        assert_eq!(a.level_perm(1), vec![1, 0]);
    }

    #[test]
    fn d_fixes_level_two() {
        let d = generator(Letter::D, &om(), 2).unwrap();
        assert!(d.is_identity());
    }

    #[test]
    fn depth_zero_is_trivial() {
        let b = generator(Letter::B, &om(), 0).unwrap();
        assert!(b.is_identity());
        assert_eq!(b.depth(), 0);
    }

    #[test]
    fn involutions_and_klein_relation() {
        for depth in 0..7 {
            assert!(evaluate_word(&w("bb"), &om(), depth).unwrap().is_identity());
            assert!(evaluate_word(&w("bcd"), &om(), depth).unwrap().is_identity());
        }
    }

    #[test]
    fn ab_has_order_sixteen() {
        for depth in 5..10 {
            let ab = evaluate_word(&w("ab"), &om(), depth).unwrap();
            assert_eq!(ab.order(), 16, "depth {depth}");
        }
        assert!(!evaluate_word(&w("abab"), &om(), 3).unwrap().is_identity());
    }

    #[test]
    fn sections_of_b_and_d() {
        let b = generator(Letter::B, &om(), 4).unwrap();
        let a3 = generator(Letter::A, &om(), 3).unwrap();
        assert_eq!(b.section(&"0".parse().unwrap()).unwrap(), a3);
        let d = generator(Letter::D, &om(), 4).unwrap();
        let b3 = generator(Letter::B, &om(), 3).unwrap();
        assert_eq!(d.section(&"1".parse().unwrap()).unwrap(), b3);
        let id = TreeAut::identity(5).unwrap();
        assert!(id.section(&"011".parse().unwrap()).unwrap().is_identity());
    }

    #[test]
    fn shifted_omega_matches_sections() {
        let omega: OmegaString = "2(10)".parse().unwrap();
        for l in [Letter::B, Letter::C, Letter::D] {
            let g = generator(l, &omega, 6).unwrap();
            let s = g.section(&Vertex::ones(2)).unwrap();
            assert_eq!(s, generator(l, &omega.shift(2), 4).unwrap());
        }
    }

    #[test]
    fn schreier_distance_between_siblings() {
        for n in 1..=8 {
            let d = schreier_distance(&Vertex::ones(n), &Vertex::ones_then_zero(n), &om()).unwrap();
            assert_eq!(d, (1 << n) - 1);
        }
        let v = Vertex::ones(4);
        assert_eq!(schreier_distance(&v, &v, &om()).unwrap(), 0);
        assert!(schreier_distance(&Vertex::ones(2), &Vertex::ones(3), &om()).is_err());
    }

    #[test]
    fn schreier_distance_small_level_by_hand() {
        // level 2: 11 -a- 01 -b,c- 00 -a- 10; b,c fix 11? b = (a,c): 11 -> 1(1·c) = 11
        let d = schreier_distance(&"11".parse().unwrap(), &"01".parse().unwrap(), &om()).unwrap();
        assert_eq!(d, 1);
        let d = schreier_distance(&"11".parse().unwrap(), &"00".parse().unwrap(), &om()).unwrap();
        assert_eq!(d, 2);
    }

    #[test]
    fn path_word_moves_start_to_target() {
        let n = 5;
        let bfs = SchreierBfs::new(&Vertex::ones(n), &om()).unwrap();
        let target = Vertex::ones_then_zero(n);
        let word = bfs.path_word(&target).unwrap();
        assert_eq!(word.len(), (1 << n) - 1);
        let g = evaluate_word(&word, &om(), n).unwrap();
        assert_eq!(g.apply(&Vertex::ones(n)).unwrap(), target);
    }

    #[test]
    fn hex_round_trip() {
        let g = evaluate_word(&w("abacabad"), &om(), 7).unwrap();
        let s = g.to_hex();
        assert_eq!(TreeAut::from_hex(&s).unwrap(), g);
        assert!(TreeAut::from_hex("2:ff").is_err());
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(matches!(TreeAut::identity(MAX_DEPTH + 1), Err(Error::Capacity(_))));
        assert!(TreeAut::identity(MAX_DEPTH).is_ok());
    }

    #[test]
    fn omega_parsing() {
        let o: OmegaString = "01(2)".parse().unwrap();
        assert_eq!((0..5).map(|k| o.letter(k)).collect::<Vec<_>>(), vec![0, 1, 2, 2, 2]);
        assert_eq!(o.to_string(), "01(2)");
        let p: OmegaString = "(012)".parse().unwrap();
        assert_eq!(p, OmegaString::first());
        assert_eq!(p.shift(4).letter(0), 1);
        assert!("013".parse::<OmegaString>().is_err());
    }

    #[test]
    fn assemble_matches_sections() {
        let g = evaluate_word(&w("abadacab"), &om(), 6).unwrap();
        let top: Vec<bool> = (0..3).map(|i| g.bit(i)).collect();
        let secs: Vec<TreeAut> = Vertex::level(2).map(|v| g.section(&v).unwrap()).collect();
        assert_eq!(TreeAut::assemble(6, 2, &top, &secs).unwrap(), g);
    }
}
