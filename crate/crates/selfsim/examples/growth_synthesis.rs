//! From a prescribed growth function to a lamp plan: the schedule of scales,
//! the sandwich check of the function between the schedule envelopes, and a
//! comparison of a small diagonal product against the growth bounds.
//!
//! Run with `cargo run --release --example growth_synthesis`.

use selfsim::marked::BallOptions;
use selfsim::synthesis::{
    empirical_vs_bounds, fixture, reference_plans, sample_points, sandwich_check, schedule_partial, synthesize,
    Constants, LampFamily,
};
use selfsim::Result;

fn main() -> Result<()> {
    let consts = Constants::default();
    let lambda = consts.lambda0;
    let f = fixture("oscillating")?;

    let s = schedule_partial(&f, lambda, 12)?;
    println!("first terms of the schedule for the oscillating fixture:");
    for t in &s.terms {
        println!("  j {:2}  m {:4}  theta {:8.3}  phi {:10.3}", t.j, t.m, t.theta, t.phi);
    }
    let report = sandwich_check(&f, &s, &sample_points(&s, 1000));
    println!(
        "sandwich on 1000 points: {} violations, worst lower ratio {:.3}, worst upper ratio {:.3}",
        report.violations.len(),
        report.worst_lower,
        report.worst_upper
    );

    let (manifest, _) = synthesize(&fixture("power")?, lambda, 8, &LampFamily::standard()?, 5, 200)?;
    println!("plan for the power fixture:");
    for e in &manifest.plan.entries {
        println!("  level {} lamp {} (order {}, diameter {})", e.level, e.group, e.order, e.diameter);
    }

    let klein = reference_plans()?.into_iter().find(|p| p.name == "klein_level2").expect("present");
    let emp = empirical_vs_bounds(&klein.plan, klein.levels, 8, &consts, BallOptions::default())?;
    println!("diagonal product with a Klein lamp on level 2:");
    for row in &emp.rows {
        println!("  r {:2}  log volume {:7.3}  bounds [{:7.3}, {:7.3}]", row.r, row.log_volume, row.lower, row.upper);
    }
    println!("empirical constant {:.4}, within bounds: {}", emp.empirical_c, emp.passed());
    Ok(())
}
