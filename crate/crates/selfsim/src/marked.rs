//! Marked groups, level-synchronous parallel ball enumeration, matching
//! radii and diagonal products.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{Generators, OmegaString, TreeAut};

/// A group together with an ordered generating tuple. Elements must compare
/// equal exactly when they are the same group element, so that `Eq + Hash`
/// serves as the canonical key.
pub trait MarkedGroup: Sync {
    type Elem: Clone + Eq + Hash + Send + Sync;

    fn labels(&self) -> Vec<String>;
    fn identity(&self) -> Self::Elem;
    fn generator(&self, i: usize) -> Self::Elem;
    fn multiply(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn inverse(&self, x: &Self::Elem) -> Self::Elem;

    fn arity(&self) -> usize {
        self.labels().len()
    }

    fn generators(&self) -> Vec<Self::Elem> {
        (0..self.arity()).map(|i| self.generator(i)).collect()
    }

    fn is_involution(&self, i: usize) -> bool {
        let g = self.generator(i);
        self.multiply(&g, &g) == self.identity()
    }

    /// Product of generators given by index, left to right.
    fn eval_indices(&self, word: &[usize]) -> Self::Elem {
        let gens = self.generators();
        word.iter()
            .fold(self.identity(), |acc, &i| self.multiply(&acc, &gens[i]))
    }
}

/// The symmetric generating set `S ∪ S⁻¹` in a fixed order: each generator
/// followed by its inverse when that differs from every earlier entry.
pub fn symmetric_generators<G: MarkedGroup>(g: &G) -> Vec<G::Elem> {
    let mut out: Vec<G::Elem> = Vec::new();
    for x in g.generators() {
        let xi = g.inverse(&x);
        for y in [x, xi] {
            if !out.contains(&y) {
                out.push(y);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthProfile {
    /// `counts[r] = |B(r)|`
    pub counts: Vec<u64>,
}

impl GrowthProfile {
    pub fn radius(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    pub fn volume(&self, r: usize) -> Option<u64> {
        self.counts.get(r).copied()
    }

    pub fn spheres(&self) -> Vec<u64> {
        let mut prev = 0;
        self.counts
            .iter()
            .map(|&c| {
                let s = c - prev;
                prev = c;
                s
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("radius,count\n");
        for (r, c) in self.counts.iter().enumerate() {
            let _ = writeln!(s, "{r},{c}");
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    /// `v(0) = 1`, monotone, `v(r+1) ≤ v(r)(2k+1)` and submultiplicative on
    /// the computed range.
    pub fn check(&self, arity: usize) -> Result<()> {
        let c = &self.counts;
        if c.first() != Some(&1) {
            return Err(Error::invariant("ball of radius 0 must have one element"));
        }
        for r in 1..c.len() {
            if c[r] < c[r - 1] {
                return Err(Error::invariant(format!("growth decreases at radius {r}")));
            }
            if c[r] > c[r - 1].saturating_mul(2 * arity as u64 + 1) {
                return Err(Error::invariant(format!("growth exceeds free bound at radius {r}")));
            }
        }
        for m in 0..c.len() {
            for n in 0..c.len() - m {
                if c[m + n] > c[m].saturating_mul(c[n]) {
                    return Err(Error::invariant(format!(
                        "v({}) > v({m})·v({n})",
                        m + n
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BallOptions {
    /// Abort once this many distinct elements have been seen.
    pub max_elements: usize,
    /// Size of the worker pool; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for BallOptions {
    fn default() -> Self {
        BallOptions { max_elements: 20_000_000, workers: None }
    }
}

const SHARDS: usize = 64;

fn shard_of<T: Hash>(x: &T) -> usize {
    let mut h = DefaultHasher::new();
    x.hash(&mut h);
    (h.finish() % SHARDS as u64) as usize
}

fn run_in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::invalid(format!("worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Level-synchronous breadth-first enumeration of a Cayley ball.
///
/// Each level expands the frontier in parallel, keeps the candidates in a
/// fixed order, and deduplicates them against hash shards that each process
/// their candidates in that order. The output is therefore independent of
/// the number of workers.
pub struct BallWalk<'g, G: MarkedGroup> {
    group: &'g G,
    gens: Vec<G::Elem>,
    seen: Vec<HashSet<G::Elem>>,
    frontier: Vec<G::Elem>,
    radius: usize,
    counts: Vec<u64>,
    max_elements: usize,
}

impl<'g, G: MarkedGroup> BallWalk<'g, G> {
    pub fn new(group: &'g G, max_elements: usize) -> Self {
        let id = group.identity();
        let mut seen: Vec<HashSet<G::Elem>> = (0..SHARDS).map(|_| HashSet::new()).collect();
        seen[shard_of(&id)].insert(id.clone());
        BallWalk {
            group,
            gens: symmetric_generators(group),
            seen,
            frontier: vec![id],
            radius: 0,
            counts: vec![1],
            max_elements,
        }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn frontier(&self) -> &[G::Elem] {
        &self.frontier
    }

    pub fn total(&self) -> u64 {
        *self.counts.last().unwrap()
    }

    /// Advances by one radius and returns the new sphere. Must run inside the
    /// intended rayon pool.
    pub fn step(&mut self) -> Result<&[G::Elem]> {
        let group = self.group;
        let gens = &self.gens;
        let candidates: Vec<G::Elem> = self
            .frontier
            .par_iter()
            .flat_map_iter(|x| gens.iter().map(move |s| group.multiply(x, s)))
            .collect();
        let shard_ids: Vec<usize> = candidates.par_iter().map(shard_of).collect();
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); SHARDS];
        for (i, &s) in shard_ids.iter().enumerate() {
            buckets[s].push(i);
        }
        let kept: Vec<Vec<usize>> = self
            .seen
            .par_iter_mut()
            .zip(buckets.par_iter())
            .map(|(set, idx)| {
                idx.iter()
                    .copied()
                    .filter(|&i| set.insert(candidates[i].clone()))
                    .collect()
            })
            .collect();
        let mut keep = vec![false; candidates.len()];
        for i in kept.into_iter().flatten() {
            keep[i] = true;
        }
        self.frontier = candidates
            .into_iter()
            .zip(keep)
            .filter_map(|(x, k)| k.then_some(x))
            .collect();
        let total = self.total() + self.frontier.len() as u64;
        if total as usize > self.max_elements {
            return Err(Error::Budget {
                what: format!("ball exceeds {} elements", self.max_elements),
                last_radius: Some(self.radius),
                counts: self.counts.clone(),
            });
        }
        self.radius += 1;
        self.counts.push(total);
        Ok(&self.frontier)
    }
}

/// Exact ball cardinalities up to `radius`.
pub fn ball<G: MarkedGroup>(g: &G, radius: usize, opts: BallOptions) -> Result<GrowthProfile> {
    run_in_pool(opts.workers, || {
        let mut walk = BallWalk::new(g, opts.max_elements);
        for _ in 0..radius {
            walk.step()?;
        }
        Ok(GrowthProfile { counts: walk.counts.clone() })
    })?
}

/// Like [`ball`], also returning every element with its word length, in
/// discovery order.
pub fn ball_elements<G: MarkedGroup>(
    g: &G,
    radius: usize,
    opts: BallOptions,
) -> Result<(GrowthProfile, Vec<(G::Elem, usize)>)> {
    run_in_pool(opts.workers, || {
        let mut walk = BallWalk::new(g, opts.max_elements);
        let mut out = vec![(g.identity(), 0)];
        for r in 1..=radius {
            let sphere = walk.step()?;
            out.extend(sphere.iter().cloned().map(|x| (x, r)));
        }
        Ok((GrowthProfile { counts: walk.counts.clone() }, out))
    })?
}

/// BFS until the ball stops growing; returns the full growth sequence of a
/// finite group (last entry is the order, length minus one the diameter).
pub fn full_growth<G: MarkedGroup>(g: &G, opts: BallOptions) -> Result<GrowthProfile> {
    run_in_pool(opts.workers, || {
        let mut walk = BallWalk::new(g, opts.max_elements);
        loop {
            if walk.step()?.is_empty() {
                let mut counts = walk.counts.clone();
                counts.pop();
                return Ok(GrowthProfile { counts });
            }
        }
    })?
}

/// Two marked groups over the same number of generators, marked diagonally.
pub struct Pair<'a, G1: MarkedGroup, G2: MarkedGroup> {
    pub first: &'a G1,
    pub second: &'a G2,
}

impl<'a, G1: MarkedGroup, G2: MarkedGroup> Pair<'a, G1, G2> {
    pub fn new(first: &'a G1, second: &'a G2) -> Result<Self> {
        if first.arity() != second.arity() {
            return Err(Error::invalid(format!(
                "marked groups of arity {} and {} cannot be paired",
                first.arity(),
                second.arity()
            )));
        }
        Ok(Pair { first, second })
    }
}

impl<G1: MarkedGroup, G2: MarkedGroup> MarkedGroup for Pair<'_, G1, G2> {
    type Elem = (G1::Elem, G2::Elem);

    fn labels(&self) -> Vec<String> {
        self.first.labels()
    }
    fn identity(&self) -> Self::Elem {
        (self.first.identity(), self.second.identity())
    }
    fn generator(&self, i: usize) -> Self::Elem {
        (self.first.generator(i), self.second.generator(i))
    }
    fn multiply(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        (self.first.multiply(&x.0, &y.0), self.second.multiply(&x.1, &y.1))
    }
    fn inverse(&self, x: &Self::Elem) -> Self::Elem {
        (self.first.inverse(&x.0), self.second.inverse(&x.1))
    }
}

/// Diagonal product of marked groups of one backend type.
pub struct Diagonal<G: MarkedGroup> {
    pub factors: Vec<G>,
}

impl<G: MarkedGroup> Diagonal<G> {
    pub fn new(factors: Vec<G>) -> Result<Self> {
        let first = factors.first().ok_or_else(|| Error::invalid("diagonal product of no factors"))?;
        let k = first.arity();
        if factors.iter().any(|f| f.arity() != k) {
            return Err(Error::invalid("diagonal product factors differ in arity"));
        }
        Ok(Diagonal { factors })
    }

    /// Marked projection to factor `i`.
    pub fn project<'a>(&self, x: &'a [G::Elem], i: usize) -> &'a G::Elem {
        &x[i]
    }
}

impl<G: MarkedGroup> MarkedGroup for Diagonal<G> {
    type Elem = Vec<G::Elem>;

    fn labels(&self) -> Vec<String> {
        self.factors[0].labels()
    }
    fn identity(&self) -> Self::Elem {
        self.factors.iter().map(|f| f.identity()).collect()
    }
    fn generator(&self, i: usize) -> Self::Elem {
        self.factors.iter().map(|f| f.generator(i)).collect()
    }
    fn multiply(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        self.factors
            .iter()
            .zip(x.iter().zip(y))
            .map(|(f, (a, b))| f.multiply(a, b))
            .collect()
    }
    fn inverse(&self, x: &Self::Elem) -> Self::Elem {
        self.factors.iter().zip(x).map(|(f, a)| f.inverse(a)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchingReport {
    /// Largest radius at which both projections of the diagonal ball are injective.
    pub radius: usize,
    /// Whether a disagreement was found at `radius + 1` (otherwise `radius == cap`).
    pub disagreement: bool,
    pub diagonal_counts: Vec<u64>,
    pub first_counts: Vec<u64>,
    pub second_counts: Vec<u64>,
}

/// Largest `k ≤ cap` such that words of length at most `k` coincide in `g1`
/// exactly when they coincide in `g2`. Equivalently, the diagonal ball of
/// radius `k` has the same size as both factor balls.
pub fn matching_radius<G1: MarkedGroup, G2: MarkedGroup>(
    g1: &G1,
    g2: &G2,
    cap: usize,
    opts: BallOptions,
) -> Result<MatchingReport> {
    let pair = Pair::new(g1, g2)?;
    run_in_pool(opts.workers, || {
        let mut walk = BallWalk::new(&pair, opts.max_elements);
        let mut firsts: HashSet<G1::Elem> = HashSet::from([g1.identity()]);
        let mut seconds: HashSet<G2::Elem> = HashSet::from([g2.identity()]);
        let (mut fc, mut sc) = (vec![1u64], vec![1u64]);
        for r in 1..=cap {
            let sphere = walk.step()?;
            for (x, y) in sphere {
                firsts.insert(x.clone());
                seconds.insert(y.clone());
            }
            fc.push(firsts.len() as u64);
            sc.push(seconds.len() as u64);
            let d = walk.total();
            if d != firsts.len() as u64 || d != seconds.len() as u64 {
                return Ok(MatchingReport {
                    radius: r - 1,
                    disagreement: true,
                    diagonal_counts: walk.counts().to_vec(),
                    first_counts: fc,
                    second_counts: sc,
                });
            }
        }
        Ok(MatchingReport {
            radius: cap,
            disagreement: false,
            diagonal_counts: walk.counts().to_vec(),
            first_counts: fc,
            second_counts: sc,
        })
    })?
}

/// `π_depth(G_ω)` marked by `(a, b, c, d)`.
#[derive(Clone, Debug)]
pub struct TreeGroup {
    gens: Generators,
}

impl TreeGroup {
    pub fn new(omega: &OmegaString, depth: usize) -> Result<Self> {
        Ok(TreeGroup { gens: Generators::new(omega, depth)? })
    }

    pub fn first(depth: usize) -> Result<Self> {
        Self::new(&OmegaString::first(), depth)
    }

    pub fn depth(&self) -> usize {
        self.gens.depth
    }

    pub fn omega(&self) -> &OmegaString {
        &self.gens.omega
    }
}

impl MarkedGroup for TreeGroup {
    type Elem = TreeAut;

    fn labels(&self) -> Vec<String> {
        ["a", "b", "c", "d"].map(String::from).to_vec()
    }
    fn identity(&self) -> TreeAut {
        TreeAut::identity(self.gens.depth).expect("depth validated")
    }
    fn generator(&self, i: usize) -> TreeAut {
        self.gens.all()[i].clone()
    }
    fn multiply(&self, x: &TreeAut, y: &TreeAut) -> TreeAut {
        x.compose(y)
    }
    fn inverse(&self, x: &TreeAut) -> TreeAut {
        x.inverse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grig(depth: usize) -> TreeGroup {
        TreeGroup::first(depth).unwrap()
    }

    #[test]
    fn small_balls_of_first_group() {
        let p = ball(&grig(3), 2, BallOptions::default()).unwrap();
        assert_eq!(p.counts, vec![1, 5, 11]);
        for k in 4..7 {
            assert_eq!(ball(&grig(k), 2, BallOptions::default()).unwrap().counts[2], 11);
        }
    }

    #[test]
    fn quotient_orders_by_closure() {
        for (k, order) in [(1, 2), (2, 8), (3, 128)] {
            let p = full_growth(&grig(k), BallOptions::default()).unwrap();
            assert_eq!(*p.counts.last().unwrap(), order);
        }
    }

    #[test]
    fn trivial_group_ball() {
        let p = ball(&grig(0), 5, BallOptions::default()).unwrap();
        assert_eq!(p.counts, vec![1; 6]);
    }

    #[test]
    fn worker_counts_agree() {
        let g = grig(6);
        let one = ball(&g, 9, BallOptions { workers: Some(1), ..Default::default() }).unwrap();
        let four = ball(&g, 9, BallOptions { workers: Some(4), ..Default::default() }).unwrap();
        assert_eq!(one, four);
        one.check(4).unwrap();
    }

    #[test]
    fn budget_reports_last_radius() {
        let err = ball(&grig(6), 20, BallOptions { max_elements: 100, workers: None }).unwrap_err();
        match err {
            Error::Budget { last_radius: Some(r), counts, .. } => {
                assert_eq!(counts.len(), r + 1);
                assert!(*counts.last().unwrap() <= 100);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn matching_radius_of_quotients() {
        let g = grig(5);
        assert_eq!(matching_radius(&g, &g, 6, BallOptions::default()).unwrap().radius, 6);
        let r = matching_radius(&grig(2), &grig(5), 20, BallOptions::default()).unwrap();
        assert!(r.disagreement && r.radius < 20);
    }

    #[test]
    fn diagonal_of_one_factor_matches_factor() {
        let d = Diagonal::new(vec![grig(4)]).unwrap();
        assert_eq!(matching_radius(&d, &grig(4), 8, BallOptions::default()).unwrap().radius, 8);
        let d2 = Diagonal::new(vec![grig(2), grig(5)]).unwrap();
        let pd = ball(&d2, 6, BallOptions::default()).unwrap();
        let p2 = ball(&grig(2), 6, BallOptions::default()).unwrap();
        let p5 = ball(&grig(5), 6, BallOptions::default()).unwrap();
        for r in 0..=6 {
            assert!(pd.counts[r] >= p2.counts[r].max(p5.counts[r]));
        }
    }

    #[test]
    fn csv_export() {
        let p = GrowthProfile { counts: vec![1, 5] };
        assert_eq!(p.to_csv(), "radius,count\n0,1\n1,5\n");
        assert_eq!(p.spheres(), vec![1, 4]);
    }
}
