//! Finite-depth checks of the recursion identities: the `K`-recursion, the
//! short-section bound and the commutators of the `θ_i`.

use std::collections::{HashSet, VecDeque};
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree::{evaluate_word, OmegaString, SchreierBfs, TreeAut, Vertex};
use crate::word::{
    formal_recursion, free_reduce, iterate_recursion, substitute_sigma, Letter, Word,
};

fn first() -> OmegaString {
    OmegaString::first()
}

/// The 128 elements of the level-3 quotient of the first Grigorchuk group.
pub fn level3_quotient() -> &'static [TreeAut] {
    static CELL: OnceLock<Vec<TreeAut>> = OnceLock::new();
    CELL.get_or_init(|| closure(&generators3()))
}

fn generators3() -> Vec<TreeAut> {
    let gens = crate::tree::Generators::new(&first(), 3).expect("depth 3 fits");
    gens.all().to_vec()
}

/// Subgroup of `Aut(T³)` generated by `gens`.
pub(crate) fn closure(gens: &[TreeAut]) -> Vec<TreeAut> {
    let id = TreeAut::identity(gens[0].depth()).expect("depth fits");
    let mut seen: HashSet<TreeAut> = HashSet::from([id.clone()]);
    let mut out = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.compose(g);
            if seen.insert(y.clone()) {
                out.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    out.sort();
    out
}

/// Image of `K = ⟨[a,b]⟩^𝐅` in the level-3 quotient. Since `St(3) ≤ K`, an
/// element lies in `K` iff its level-3 truncation lies here.
pub fn k_image3() -> &'static HashSet<TreeAut> {
    static CELL: OnceLock<HashSet<TreeAut>> = OnceLock::new();
    CELL.get_or_init(|| {
        let group = level3_quotient();
        let ab = evaluate_word(&"abab".parse().unwrap(), &first(), 3).unwrap();
        let conj: Vec<TreeAut> = group
            .iter()
            .map(|g| g.inverse().compose(&ab).compose(g))
            .collect();
        closure(&conj).into_iter().collect()
    })
}

/// Membership in `K` of an element of the first Grigorchuk group given at
/// depth at least 3.
pub fn in_k(g: &TreeAut) -> bool {
    g.depth() >= 3 && k_image3().contains(&g.truncate(3))
}

/// `φ(σ(w))` evaluated at `depth`: `(left, right, swap)` as tree elements.
pub fn sigma_sections(w: &Word, depth: usize) -> Result<(TreeAut, TreeAut, bool)> {
    let r = formal_recursion(&substitute_sigma(w)?)?;
    Ok((
        evaluate_word(&r.w0, &first(), depth)?,
        evaluate_word(&r.w1, &first(), depth)?,
        r.swap,
    ))
}

/// `φ(σ(w)) = (id, w)` at the given depth.
pub fn k_recursion_holds(w: &Word, depth: usize) -> Result<bool> {
    let (l, r, s) = sigma_sections(w, depth)?;
    Ok(!s && l.is_identity() && r == evaluate_word(w, &first(), depth)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct ShortSectionViolation {
    pub word: String,
    pub level: usize,
    pub vertex: String,
    pub section: String,
    pub reason: &'static str,
}

/// Checks every level-`k` section of `w` (free reduced) for length at most 1,
/// Klein letters near `1ᵏ` and `a` near `1ᵏ⁻¹0`.
pub fn short_section_violations(w: &Word, k: usize) -> Result<Vec<ShortSectionViolation>> {
    if k == 0 {
        return Err(Error::invalid("short sections need k >= 1"));
    }
    let it = iterate_recursion(w, k)?;
    let near_ones = SchreierBfs::new(&Vertex::ones(k), &first())?;
    let near_sib = SchreierBfs::new(&Vertex::ones_then_zero(k), &first())?;
    let radius = (1u32 << (k - 1)) - 1;
    let mut out = Vec::new();
    for v in Vertex::level(k) {
        let s = free_reduce(it.section(&v))?;
        let mut bad = |reason| {
            out.push(ShortSectionViolation {
                word: w.to_string(),
                level: k,
                vertex: v.to_string(),
                section: s.to_string(),
                reason,
            })
        };
        if s.len() > 1 {
            bad("section longer than one letter");
            continue;
        }
        let letter = s.letters().first().copied();
        if near_ones.distance(&v).is_some_and(|d| d <= radius)
            && letter.is_some_and(|l| !l.is_klein())
        {
            bad("expected a Klein letter near 1^k");
        }
        if near_sib.distance(&v).is_some_and(|d| d <= radius) && letter.is_some_and(|l| l != Letter::A)
        {
            bad("expected a near 1^(k-1)0");
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaReport {
    pub i: usize,
    pub depth: usize,
    pub checks: Vec<(String, bool)>,
}

impl ThetaReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }
}

/// The element of `St(i)` all of whose level-`i` sections equal `ad`.
pub fn theta(i: usize, depth: usize) -> Result<TreeAut> {
    if i > depth {
        return Err(Error::invalid("theta_i needs i <= depth"));
    }
    let ad = evaluate_word(&"ad".parse().unwrap(), &first(), depth - i)?;
    TreeAut::assemble(depth, i, &vec![false; (1 << i) - 1], &vec![ad; 1 << i])
}

/// Commutator identities of `θ_i` with the generators, evaluated at `depth`.
pub fn theta_identity_check(i: usize, depth: usize) -> Result<ThetaReport> {
    if i < 1 || i + 3 > depth {
        return Err(Error::invalid(format!("theta check needs 1 <= i <= depth-3, got i={i}, depth={depth}")));
    }
    let th = theta(i, depth)?;
    let ev = |s: &str, d: usize| evaluate_word(&s.parse().unwrap(), &first(), d);
    let mut checks = Vec::new();
    checks.push(("[theta,a] = 1".to_string(), th.commutator(&ev("a", depth)?).is_identity()));
    if i == 1 {
        let adad = ev("adad", depth - 1)?;
        let expect_c = TreeAut::from_sections(&adad, &adad, false)?;
        checks.push(("[theta,c] = (adad,adad)".to_string(), th.commutator(&ev("c", depth)?) == expect_c));
        let ad_b = evaluate_word(
            &Word::commutator(&"ad".parse().unwrap(), &"b".parse().unwrap()),
            &first(),
            depth - 1,
        )?;
        let expect_d = TreeAut::from_sections(&TreeAut::identity(depth - 1)?, &ad_b, false)?;
        checks.push(("[theta,d] = (1,[ad,b])".to_string(), th.commutator(&ev("d", depth)?) == expect_d));
    } else {
        let top = Vertex::ones(i - 2);
        for x in ["c", "d"] {
            let com = th.commutator(&ev(x, depth)?);
            let fixes = com.in_level_stabilizer(i - 2);
            let elsewhere = Vertex::level(i - 2)
                .filter(|v| *v != top)
                .all(|v| com.section(&v).map(|s| s.is_identity()).unwrap_or(false));
            let sec = com.section(&top)?;
            checks.push((
                format!("[theta,{x}] supported at 1^(i-2) with section in K"),
                fixes && elsewhere && in_k(&sec),
            ));
        }
    }
    Ok(ThetaReport { i, depth, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level3_quotient_has_128_elements() {
        assert_eq!(level3_quotient().len(), 128);
    }

    #[test]
    fn k_has_index_sixteen_at_level_three() {
        assert_eq!(k_image3().len(), 8);
    }

    #[test]
    fn ab_not_in_k_but_commutator_is() {
        let e = |s: &str| evaluate_word(&s.parse().unwrap(), &first(), 6).unwrap();
        assert!(!in_k(&e("ab")));
        assert!(in_k(&e("abab")));
        assert!(in_k(&e("dababd")));
    }

    #[test]
    fn sigma_commutator_recursion() {
        assert!(k_recursion_holds(&"abab".parse().unwrap(), 8).unwrap());
        assert!(!k_recursion_holds(&"ab".parse().unwrap(), 8).unwrap());
    }

    #[test]
    fn sampled_k_words_recurse() {
        for seed in 0..40 {
            let w = crate::word::random_k_word(seed, 6, 3);
            assert!(k_recursion_holds(&w, 8).unwrap(), "{w}");
        }
    }

    #[test]
    fn short_sections_for_small_words() {
        for s in ["", "a", "b", "abc", "bab", "adacaba"] {
            let w: Word = s.parse().unwrap();
            assert!(short_section_violations(&w, 4).unwrap().is_empty(), "{s}");
        }
    }

    #[test]
    fn theta_one_identities() {
        let r = theta_identity_check(1, 6).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn theta_two_identities() {
        let r = theta_identity_check(2, 8).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn theta_check_rejects_shallow_depth() {
        assert!(theta_identity_check(3, 5).is_err());
    }
}
