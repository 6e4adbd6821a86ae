//! The factor groups `Δ_n`: lamps over the level-`n` vertices driven by the
//! tree quotient. Shows the lamp product formula, the commutator witness on a
//! single lamp, configuration words, and how balls of two levels agree.
//!
//! Run with `cargo run --release --example lamp_factors`.

use std::sync::Arc;

use selfsim::finite::{dihedral_lamp, klein_lamp, FiniteGroup};
use selfsim::marked::{matching_radius, BallOptions};
use selfsim::traverse::configuration_word;
use selfsim::wreath::{build_delta_n, kdelta_witness, lamp_product_formula, DeltaSpec};
use selfsim::{OmegaString, Result, Word};

fn main() -> Result<()> {
    let klein = Arc::new(FiniteGroup::new(klein_lamp())?);
    let delta = build_delta_n(&DeltaSpec::new(3, klein.clone()))?;

    let w: Word = "u1 a b v1 a c u1 d".parse()?;
    let x = delta.eval(&w)?;
    println!("{w} in the level-3 factor: {:?}", delta.summary(&x));
    println!("  agrees with the lamp product formula: {}", lamp_product_formula(&w, &delta)? == x);

    let dihedral = Arc::new(FiniteGroup::new(dihedral_lamp(8)?)?);
    for n in 1..=4 {
        let d = build_delta_n(&DeltaSpec::new(n, dihedral.clone()))?;
        let witness = kdelta_witness(n, &OmegaString::first())?;
        let y = d.eval(&witness)?;
        println!("level {n}: witness of length {} lights {} lamp(s)", witness.len(), y.support().count());
    }

    let targets: Vec<u32> = (0..8).map(|i| (i % klein.order()) as u32).collect();
    let word = configuration_word(&targets, &delta, None)?;
    let lit = delta.eval(&word)?;
    let reached = (0..8u32).all(|p| lit.lamp_at(p) == targets[p as usize]);
    println!("configuration word of length {} reaches {targets:?}: {reached}", word.len());

    let d2 = build_delta_n(&DeltaSpec::new(2, klein.clone()))?;
    let d4 = build_delta_n(&DeltaSpec::new(4, klein))?;
    let report = matching_radius(&d2, &d4, 12, BallOptions::default())?;
    println!("balls of the level-2 and level-4 factors agree up to radius {}", report.radius);
    Ok(())
}
