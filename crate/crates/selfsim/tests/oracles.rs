//! Library results against independent reimplementations written here.
//!
//! - ball sizes of the tree quotients against a string-rewriting model of the
//!   generators acting on a level
//! - orders of the quotients and of the projective special linear lamps
//! - the contraction factor and growth exponent against a bisection root

use std::collections::HashSet;

use selfsim::finite::{library, FiniteGroup};
use selfsim::marked::{ball, full_growth, BallOptions, TreeGroup};
use selfsim::norm::{alpha0, contraction_eta};

/// Image of a vertex under a generator of the first Grigorchuk group,
/// computed letter by letter from the wreath recursion
/// `a = ε`, `b = (a, c)`, `c = (a, d)`, `d = (1, b)`.
fn act(g: char, v: &[u8]) -> Vec<u8> {
    let mut out = v.to_vec();
    let mut state = g;
    for i in 0..out.len() {
        match state {
            'a' => {
                out[i] ^= 1;
                return out;
            }
            'e' => return out,
            s => {
                let (on_zero, on_one) = match s {
                    'b' => ('a', 'c'),
                    'c' => ('a', 'd'),
                    'd' => ('e', 'b'),
                    _ => unreachable!(),
                };
                state = if out[i] == 0 { on_zero } else { on_one };
            }
        }
    }
    out
}

fn level(depth: usize) -> Vec<Vec<u8>> {
    (0..1u32 << depth).map(|c| (0..depth).map(|i| ((c >> (depth - 1 - i)) & 1) as u8).collect()).collect()
}

/// Ball sizes of the group of permutations of a level generated by `a,b,c,d`.
fn naive_ball(depth: usize, radius: usize) -> Vec<u64> {
    let points = level(depth);
    let index = |v: &Vec<u8>| points.iter().position(|p| p == v).unwrap() as u32;
    let gens: Vec<Vec<u32>> = "abcd".chars().map(|g| points.iter().map(|p| index(&act(g, p))).collect()).collect();
    let identity: Vec<u32> = (0..points.len() as u32).collect();
    let mut seen: HashSet<Vec<u32>> = HashSet::from([identity.clone()]);
    let mut frontier = vec![identity];
    let mut counts = vec![1u64];
    for _ in 0..radius {
        let mut next = Vec::new();
        for x in &frontier {
            for g in &gens {
                let y: Vec<u32> = x.iter().map(|&p| g[p as usize]).collect();
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        counts.push(seen.len() as u64);
        frontier = next;
    }
    counts
}

#[test]
fn tree_quotient_balls_match_the_string_model() {
    for depth in 1..=6 {
        let lib = ball(&TreeGroup::first(depth).unwrap(), 14, BallOptions::default()).unwrap();
        assert_eq!(lib.counts, naive_ball(depth, 14), "depth {depth}");
    }
}

#[test]
fn quotient_orders_follow_the_closed_form() {
    for depth in 3..=5 {
        let order = *full_growth(&TreeGroup::first(depth).unwrap(), BallOptions::default()).unwrap().counts.last().unwrap();
        assert_eq!(order, 1u64 << (5 * (1 << (depth - 3)) + 2), "depth {depth}");
    }
}

#[test]
fn projective_lamp_orders() {
    for (name, order) in [("psl2_5", 60), ("psl2_13", 13 * (13 * 13 - 1) / 2), ("psl2_25", 25 * 25 * 25 * 24 / 25 / 2)] {
        let g = FiniteGroup::new(library(name).unwrap()).unwrap();
        assert_eq!(g.order(), order, "{name}");
        assert_eq!(*g.growth().counts.last().unwrap(), order as u64, "{name}");
    }
}

#[test]
fn contraction_factor_is_the_cubic_root() {
    let p = |x: f64| x * x * x + x * x + x - 2.0;
    let (mut lo, mut hi) = (0.5f64, 1.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if p(mid) < 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
    assert!((contraction_eta() - lo).abs() < 1e-12);
    let expected = 2f64.ln() / (2.0 / lo).ln();
    assert!((alpha0(contraction_eta()) - expected).abs() < 1e-12);
}
