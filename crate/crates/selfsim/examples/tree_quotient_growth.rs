//! Ball growth of the finite quotients of the first Grigorchuk group and of a
//! diagonal product of two of them.
//!
//! Run with `cargo run --release --example tree_quotient_growth`.

use selfsim::marked::{ball, matching_radius, BallOptions, Diagonal, TreeGroup};
use selfsim::Result;

fn main() -> Result<()> {
    let opts = BallOptions::default();
    for depth in 3..=7 {
        let g = TreeGroup::first(depth)?;
        let profile = ball(&g, 12, opts)?;
        println!("depth {depth}: volumes {:?}", profile.counts);
    }

    let diag = Diagonal::new(vec![TreeGroup::first(4)?, TreeGroup::first(6)?])?;
    let profile = ball(&diag, 10, opts)?;
    println!("diagonal of depths 4 and 6: volumes {:?}", profile.counts);

    let report = matching_radius(&TreeGroup::first(4)?, &TreeGroup::first(6)?, 20, opts)?;
    println!(
        "words up to length {} agree in depths 4 and 6 (disagreement found: {})",
        report.radius, report.disagreement
    );
    Ok(())
}
