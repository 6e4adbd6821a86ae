//! The formal wreath recursion on words and the identities it satisfies:
//! substitution under the endomorphism, contraction of a weighted norm, and
//! the commutator identities of the level-stabilizer elements.
//!
//! Run with `cargo run --release --example word_identities`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use selfsim::identities::{k_recursion_holds, theta_identity_check};
use selfsim::norm::{contraction_sides, solve_norm_weights};
use selfsim::word::{formal_recursion, iterate_recursion, random_pre_reduced, substitute_sigma};
use selfsim::{Result, Word};

fn main() -> Result<()> {
    let w: Word = "abacabadac".parse()?;
    let r = formal_recursion(&w)?;
    println!("{w} -> ({}, {}) swap {}", r.w0, r.w1, r.swap);
    let it = iterate_recursion(&w, 3)?;
    println!("sections on level 3: {:?}", it.sections.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    println!("substituted: {}", substitute_sigma(&w)?);
    println!("abab is sent to the pair (1, abab) at depth 8: {}", k_recursion_holds(&"abab".parse()?, 8)?);

    let nw = solve_norm_weights();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let w = random_pre_reduced(&mut rng, 40);
        let (lhs, rhs) = contraction_sides(&w, &nw)?;
        worst = worst.max(lhs - rhs);
    }
    println!("contraction with factor {:.6}: worst excess over 10000 words {worst:.4}", nw.eta);

    for i in 1..=3 {
        println!("stabilizer identities at level {i}: {}", theta_identity_check(i, i + 5)?.passed());
    }
    Ok(())
}
