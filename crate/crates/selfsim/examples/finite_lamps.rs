//! The finite lamp groups available to the factor construction, with their
//! orders, Cayley diameters and sphere sizes.
//!
//! Run with `cargo run --release --example finite_lamps`.

use selfsim::finite::{library, FiniteGroup};
use selfsim::Result;

fn main() -> Result<()> {
    for name in ["trivial", "z2", "klein", "dihedral4", "dihedral8", "psl2_5", "psl2_13"] {
        let g = FiniteGroup::new(library(name)?)?;
        let meta = g.metadata();
        let spheres: Vec<u64> = meta.growth.windows(2).map(|w| w[1] - w[0]).collect();
        println!("{:10} order {:4} diameter {:2} spheres {:?}", meta.name, meta.order, meta.diameter, spheres);
    }

    let psl = FiniteGroup::new(library("psl2_5")?)?;
    let (u, v) = (psl.by_label("u1").expect("marked"), psl.by_label("v1").expect("marked"));
    println!("in psl2_5 the lamps u1 and v1 commute: {}", psl.commutator(u, v) == 0);
    Ok(())
}
