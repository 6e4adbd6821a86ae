//! The class-two central extension over the lamplighter on germs: the signed
//! pair orbit that defines its cocycle, the commutator witness that lands in
//! the center, and a check that central elements on different levels are
//! independent.
//!
//! Run with `cargo run --release --example central_extension`.

use selfsim::central::{center_check, center_witness, direct_sum_check, gamma_eval, orbit_mn, GammaGroup, GammaWord};
use selfsim::marked::BallOptions;
use selfsim::Result;

fn main() -> Result<()> {
    for n in 1..=4 {
        println!("level {n}: signed pair orbit has {} pairs", orbit_mn(n)?.len());
    }

    let g = GammaGroup::new(2)?;
    let w: GammaWord = "t a t b a t".parse()?;
    let x = gamma_eval(&w, &g)?;
    println!("{w} at level 2: central coordinate {}, in kernel {}", x.lamp.z, x.in_kernel());

    for n in 1..=3 {
        let rep = center_witness(n)?;
        println!(
            "level {n}: witness of length {} has central value {} and commutes with the generators: {}",
            rep.word.len(),
            rep.central,
            rep.commutes_with_generators
        );
    }

    let center = center_check(2, 3, BallOptions::default())?;
    println!(
        "ball of radius 3 at level 2: {} elements, {} in the kernel, center check passed: {}",
        center.elements,
        center.kernel_elements,
        center.passed()
    );

    let sum = direct_sum_check(3)?;
    println!("central coordinates of the witnesses across levels: {:?}", sum.central);
    Ok(())
}
