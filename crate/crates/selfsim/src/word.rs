//! Words over `𝐅 = ⟨a⟩ ∗ ⟨b,c,d⟩` and `𝐌 = 𝐅 ∗ U ∗ V`, the formal recursion
//! `a ↦ ε, b ↦ (a,c), c ↦ (a,d), d ↦ (∅,b)` and the substitutions built on it.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{Generators, OmegaString, TreeAut, Vertex};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Letter {
    A,
    B,
    C,
    D,
    /// `u_i`, 1-based
    U(u8),
    /// `v_j`, 1-based
    V(u8),
}

impl Letter {
    pub const TREE: [Letter; 4] = [Letter::A, Letter::B, Letter::C, Letter::D];

    pub fn is_tree(self) -> bool {
        matches!(self, Letter::A | Letter::B | Letter::C | Letter::D)
    }

    pub fn is_klein(self) -> bool {
        matches!(self, Letter::B | Letter::C | Letter::D)
    }

    pub fn tree_index(self) -> Option<usize> {
        match self {
            Letter::A => Some(0),
            Letter::B => Some(1),
            Letter::C => Some(2),
            Letter::D => Some(3),
            _ => None,
        }
    }

    /// b, c, d as the nonzero elements of `(ℤ/2)²`, so that `b·c = d` is xor.
    fn klein_code(self) -> u8 {
        match self {
            Letter::B => 1,
            Letter::C => 2,
            Letter::D => 3,
            _ => 0,
        }
    }

    fn from_klein(code: u8) -> Option<Letter> {
        match code {
            1 => Some(Letter::B),
            2 => Some(Letter::C),
            3 => Some(Letter::D),
            _ => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::A => f.write_str("a"),
            Letter::B => f.write_str("b"),
            Letter::C => f.write_str("c"),
            Letter::D => f.write_str("d"),
            Letter::U(i) => write!(f, "u{i}"),
            Letter::V(j) => write!(f, "v{j}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l)
    }

    pub fn extend(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    pub fn repeat(&self, k: usize) -> Word {
        Word(self.0.repeat(k))
    }

    pub fn is_tree(&self) -> bool {
        self.0.iter().all(|l| l.is_tree())
    }

    fn require_tree(&self) -> Result<()> {
        match self.0.iter().find(|l| !l.is_tree()) {
            Some(l) => Err(Error::UnknownLetter(format!("{l} (tree letters only)"))),
            None => Ok(()),
        }
    }

    /// Every letter of both alphabets is an involution, so the inverse is the reversal.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// `x⁻¹y⁻¹xy`
    pub fn commutator(x: &Word, y: &Word) -> Word {
        x.inverse().concat(&y.inverse()).concat(x).concat(y)
    }

    /// Letters from `{a,b,c,d}` only, in order.
    pub fn tree_part(&self) -> Word {
        Word(self.0.iter().copied().filter(|l| l.is_tree()).collect())
    }

    pub fn is_pre_reduced(&self) -> bool {
        self.0.windows(2).all(|p| !(p[0].is_klein() && p[1].is_klein()))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let dotted = !self.is_tree();
        for (i, l) in self.0.iter().enumerate() {
            if dotted && i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Accepts `"abad"`, `"a.b.u1.a"`, and `""`/`"ε"` for the empty word.
    fn from_str(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        let mut chars = s.chars().peekable();
        while let Some(ch) = chars.next() {
            let l = match ch {
                'a' => Letter::A,
                'b' => Letter::B,
                'c' => Letter::C,
                'd' => Letter::D,
                'u' | 'v' => {
                    let mut num = String::new();
                    while let Some(&c) = chars.peek() {
                        if c.is_ascii_digit() {
                            num.push(c);
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    let i: u8 = num
                        .parse()
                        .map_err(|_| Error::UnknownLetter(format!("{ch}{num}")))?;
                    if i == 0 {
                        return Err(Error::UnknownLetter(format!("{ch}0")));
                    }
                    if ch == 'u' {
                        Letter::U(i)
                    } else {
                        Letter::V(i)
                    }
                }
                '.' | ' ' | 'ε' => continue,
                other => return Err(Error::UnknownLetter(other.to_string())),
            };
            out.push(l);
        }
        Ok(Word(out))
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        if w.is_empty() {
            String::new()
        } else {
            w.to_string()
        }
    }
}

impl TryFrom<String> for Word {
    type Error = Error;
    fn try_from(s: String) -> Result<Word> {
        s.parse()
    }
}

/// Fold maximal `{b,c,d}` runs in the Klein group, dropping identity results.
/// Runs of `a` are kept verbatim.
pub fn pre_reduce(w: &Word) -> Result<Word> {
    w.require_tree()?;
    let mut out = Vec::with_capacity(w.len());
    let mut run = 0u8;
    for &l in w.letters() {
        if l.is_klein() {
            run ^= l.klein_code();
        } else {
            if let Some(x) = Letter::from_klein(run) {
                out.push(x);
            }
            run = 0;
            out.push(l);
        }
    }
    if let Some(x) = Letter::from_klein(run) {
        out.push(x);
    }
    Ok(Word(out))
}

/// Normal form in `ℤ/2 ∗ (ℤ/2)²`: cancel `aa` and fold Klein neighbours.
pub fn free_reduce(w: &Word) -> Result<Word> {
    w.require_tree()?;
    let mut stack: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w.letters() {
        match stack.last().copied() {
            Some(Letter::A) if l == Letter::A => {
                stack.pop();
            }
            Some(t) if t.is_klein() && l.is_klein() => {
                stack.pop();
                if let Some(x) = Letter::from_klein(t.klein_code() ^ l.klein_code()) {
                    stack.push(x);
                }
            }
            _ => stack.push(l),
        }
    }
    Ok(Word(stack))
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RecursionResult {
    pub w0: Word,
    pub w1: Word,
    pub swap: bool,
}

/// One unreduced step of the wreath recursion of the first Grigorchuk group.
pub fn formal_recursion(w: &Word) -> Result<RecursionResult> {
    w.require_tree()?;
    let mut streams = [Vec::new(), Vec::new()];
    let mut s = 0usize;
    for &l in w.letters() {
        let (left, right) = match l {
            Letter::A => {
                s ^= 1;
                continue;
            }
            Letter::B => (Some(Letter::A), Letter::C),
            Letter::C => (Some(Letter::A), Letter::D),
            Letter::D => (None, Letter::B),
            _ => unreachable!(),
        };
        if let Some(x) = left {
            streams[s].push(x);
        }
        streams[s ^ 1].push(right);
    }
    let [w0, w1] = streams;
    Ok(RecursionResult { w0: Word(w0), w1: Word(w1), swap: s == 1 })
}

/// Sections of `w` at all vertices of level `k` (pre-reducing after every
/// step) together with the level-`k` portrait of `w`.
#[derive(Clone, Debug)]
pub struct IteratedRecursion {
    pub level: usize,
    pub sections: Vec<Word>,
    pub image: TreeAut,
}

impl IteratedRecursion {
    pub fn section(&self, v: &Vertex) -> &Word {
        &self.sections[v.code() as usize]
    }

    /// Rebuild the depth-`k+m` automorphism of the first Grigorchuk group from
    /// the level-`k` portrait and the evaluated sections.
    pub fn reassemble(&self, m: usize) -> Result<TreeAut> {
        let top_depth = self.level;
        let top: Vec<bool> = (0..self.level)
            .flat_map(|k| Vertex::level(k).map(|v| self.image.swap_at(&v)).collect::<Vec<_>>())
            .collect();
        let gens = Generators::new(&OmegaString::first(), m)?;
        let secs = self.sections.iter().map(|s| gens.eval(s)).collect::<Result<Vec<_>>>()?;
        TreeAut::assemble(top_depth + m, self.level, &top, &secs)
    }
}

pub fn iterate_recursion(w: &Word, k: usize) -> Result<IteratedRecursion> {
    w.require_tree()?;
    let mut image = TreeAut::identity(k)?;
    let mut sections = vec![w.clone()];
    for lvl in 0..k {
        let mut next = Vec::with_capacity(sections.len() * 2);
        for (x, s) in sections.iter().enumerate() {
            let r = formal_recursion(s)?;
            image.set_swap(&Vertex::from_parts(lvl, x as u32), r.swap)?;
            next.push(pre_reduce(&r.w0)?);
            next.push(pre_reduce(&r.w1)?);
        }
        sections = next;
    }
    Ok(IteratedRecursion { level: k, sections, image })
}

/// `a ↦ aba, b ↦ d, c ↦ b, d ↦ c`, no reduction.
pub fn substitute_sigma(w: &Word) -> Result<Word> {
    w.require_tree()?;
    let mut out = Vec::with_capacity(w.len() * 2);
    for &l in w.letters() {
        match l {
            Letter::A => out.extend([Letter::A, Letter::B, Letter::A]),
            Letter::B => out.push(Letter::D),
            Letter::C => out.push(Letter::B),
            Letter::D => out.push(Letter::C),
            _ => unreachable!(),
        }
    }
    Ok(Word(out))
}

pub fn substitute_sigma_pow(w: &Word, k: usize) -> Result<Word> {
    let mut out = w.clone();
    for _ in 0..k {
        out = substitute_sigma(&out)?;
    }
    Ok(out)
}

/// Longest word `zeta_word` will build.
pub const ZETA_LENGTH_BUDGET: usize = 1 << 26;

/// `ab ↦ abadac, ac ↦ abab, ad ↦ acac` on words made of syllables `a·x`.
pub fn substitute_zeta(w: &Word) -> Result<Word> {
    use Letter::*;
    if !w.len().is_multiple_of(2) {
        return Err(Error::invalid(format!("{w} is not a syllable word")));
    }
    let mut out = Vec::with_capacity(w.len() * 3);
    for syl in w.letters().chunks(2) {
        match syl {
            [A, B] => out.extend([A, B, A, D, A, C]),
            [A, C] => out.extend([A, B, A, B]),
            [A, D] => out.extend([A, C, A, C]),
            _ => return Err(Error::invalid(format!("{w} is not a syllable word"))),
        }
    }
    Ok(Word(out))
}

/// `ζⁿ(ad)`.
pub fn zeta_word(n: usize) -> Result<Word> {
    let mut w: Word = Word(vec![Letter::A, Letter::D]);
    for i in 0..n {
        // the longest syllable image has length 6
        if w.len() * 3 > ZETA_LENGTH_BUDGET {
            return Err(Error::Budget {
                what: format!("zeta word {n} exceeds {ZETA_LENGTH_BUDGET} letters"),
                last_radius: Some(i),
                counts: vec![],
            });
        }
        w = substitute_zeta(&w)?;
    }
    Ok(w)
}

/// Uniform random word over `{a,b,c,d}`.
pub fn random_word<R: Rng>(rng: &mut R, len: usize) -> Word {
    Word((0..len).map(|_| Letter::TREE[rng.gen_range(0..4)]).collect())
}

/// Uniform random pre-reduced word of the given length.
pub fn random_pre_reduced<R: Rng>(rng: &mut R, len: usize) -> Word {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let after_klein = out.last().is_some_and(|l: &Letter| l.is_klein());
        if after_klein {
            out.push(Letter::A);
        } else {
            out.push(Letter::TREE[rng.gen_range(0..4)]);
        }
    }
    Word(out)
}

/// Product of `factors` conjugates `g⁻¹[a,b]^{±1}g`, `|g| ≤ conjugator_length`.
pub fn random_k_word(seed: u64, conjugator_length: usize, factors: usize) -> Word {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ab: Word = Word(vec![Letter::A, Letter::B, Letter::A, Letter::B]);
    let mut out = Word::empty();
    for _ in 0..factors {
        let len = rng.gen_range(0..=conjugator_length);
        let g = random_word(&mut rng, len);
        let c = if rng.gen_bool(0.5) { ab.clone() } else { ab.inverse() };
        out.extend(&g.inverse().concat(&c).concat(&g));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::evaluate_word;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(w("a.b.u1.a").letters(), &[Letter::A, Letter::B, Letter::U(1), Letter::A]);
        assert_eq!(w("abu12v3").to_string(), "a.b.u12.v3");
        assert_eq!(w("abad").to_string(), "abad");
        assert!("abx".parse::<Word>().is_err());
        assert!("u0".parse::<Word>().is_err());
        assert!(w("").is_empty());
    }

    #[test]
    fn pre_reduce_examples() {
        assert_eq!(pre_reduce(&w("abbc")).unwrap(), w("ac"));
        assert_eq!(pre_reduce(&w("abcd")).unwrap(), w("a"));
        assert_eq!(pre_reduce(&w("aabab")).unwrap(), w("aabab"));
        assert!(pre_reduce(&w("au1")).is_err());
    }

    #[test]
    fn free_reduce_cancels() {
        assert_eq!(free_reduce(&w("abbaac")).unwrap(), w("ac"));
        assert_eq!(free_reduce(&w("adadadadadadadad")).unwrap(), w("adadadadadadadad"));
        assert_eq!(free_reduce(&w("abcdda")).unwrap(), w("ada"));
        assert_eq!(free_reduce(&w("abca")).unwrap(), w("ada"));
    }

    #[test]
    fn recursion_of_sigma_commutator() {
        let s = substitute_sigma(&w("abab")).unwrap();
        assert_eq!(s, w("abadabad"));
        let r = formal_recursion(&s).unwrap();
        assert!(!r.swap);
        assert!(free_reduce(&r.w0).unwrap().is_empty());
        assert_eq!(r.w1, w("abab"));
    }

    #[test]
    fn ad_fourth_power_in_kernel() {
        let r = formal_recursion(&w("ad").repeat(4)).unwrap();
        assert!(!r.swap);
        assert!(free_reduce(&r.w0).unwrap().is_empty());
        assert!(free_reduce(&r.w1).unwrap().is_empty());
    }

    #[test]
    fn recursion_of_empty_word() {
        let r = formal_recursion(&Word::empty()).unwrap();
        assert!(r.w0.is_empty() && r.w1.is_empty() && !r.swap);
    }

    #[test]
    fn sigma_examples() {
        assert!(substitute_sigma(&Word::empty()).unwrap().is_empty());
        assert_eq!(substitute_sigma_pow(&w("d"), 2).unwrap(), w("b"));
    }

    #[test]
    fn zeta_examples() {
        assert_eq!(zeta_word(0).unwrap(), w("ad"));
        assert_eq!(zeta_word(1).unwrap(), w("acac"));
        assert_eq!(zeta_word(2).unwrap(), w("abababab"));
        let r = formal_recursion(&zeta_word(1).unwrap()).unwrap();
        assert_eq!((r.w0, r.w1, r.swap), (w("da"), w("ad"), false));
        assert!(substitute_zeta(&w("aab")).is_err());
        assert!(substitute_zeta(&w("ba")).is_err());
    }

    #[test]
    fn zeta_recursion_identity() {
        let om = OmegaString::first();
        for n in 1..=6 {
            let wn = zeta_word(n).unwrap();
            let prev = zeta_word(n - 1).unwrap();
            let r = formal_recursion(&wn).unwrap();
            assert!(!r.swap);
            let e = |x: &Word| evaluate_word(&free_reduce(x).unwrap(), &om, 8).unwrap();
            assert_eq!(e(&r.w0), e(&prev.inverse()), "n={n}");
            assert_eq!(e(&r.w1), e(&prev), "n={n}");
        }
    }

    #[test]
    fn iterate_recursion_level_zero() {
        let it = iterate_recursion(&w("abac"), 0).unwrap();
        assert_eq!(it.sections, vec![w("abac")]);
    }

    #[test]
    fn iterate_recursion_reassembles() {
        let om = OmegaString::first();
        for s in ["abacabad", "adacabadabacab", "aabbaccadda", "dacbadbacabda"] {
            let word = w(s);
            for k in 0..4 {
                let it = iterate_recursion(&word, k).unwrap();
                for m in 0..4 {
                    assert_eq!(it.reassemble(m).unwrap(), evaluate_word(&word, &om, k + m).unwrap());
                }
            }
        }
    }

    #[test]
    fn k_words_are_deterministic() {
        assert_eq!(random_k_word(7, 5, 3), random_k_word(7, 5, 3));
        assert_eq!(random_k_word(1, 0, 1).len(), 4);
    }
}
