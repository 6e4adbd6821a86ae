//! Traverse fields of words on a level of the tree, and the largest field
//! size among words of bounded length.
//!
//! Run with `cargo run --release --example traverse_fields`.

use selfsim::traverse::{contraction_bound, inverted_orbit_pair, max_a, traverse_field, zeta_coverage, SweepMode};
use selfsim::word::zeta_word;
use selfsim::{Result, Vertex, Word};

fn main() -> Result<()> {
    let w: Word = "abaca".parse()?;
    println!("inverted orbit of {w} on level 2: {}", inverted_orbit_pair(&w, 2)?.to_display());
    let field = traverse_field(&w, 2)?;
    for x in Vertex::level(2) {
        println!("  pattern at {x}: {}", field.pattern(&x)?);
    }
    println!("  field size {}", field.a);

    let sweep = max_a(5, 10, SweepMode::Exhaustive)?;
    println!("largest fields on level 5 over words of length r:");
    for row in &sweep.rows {
        let bound = contraction_bound(5, row.r).unwrap_or(f64::NAN);
        println!("  r = {:2}: {:3} (bound {:7.2}) attained by {}", row.r, row.max_a, bound, row.argmax);
    }

    for n in 1..=5 {
        let z = zeta_word(n)?;
        let coverage = zeta_coverage(n)?;
        println!(
            "level {n}: |zeta word| = {}, length ratio {:.3}, field size {}, covers the level: {}",
            z.len(),
            coverage.ratio,
            traverse_field(&z, n)?.a,
            coverage.complete()
        );
    }
    Ok(())
}
