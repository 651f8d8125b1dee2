//! The ratio constant `μ = min |A·Y|/|A|` by each of its routes.


use gsubmod::action::GroupAction;
use gsubmod::group::{cyclic, symmetric};
use gsubmod::submodular::mu_ratio;
use gsubmod::Caps;

fn main() -> gsubmod::Result<()> {
    let caps = Caps::default();
    for n in 3..=6 {
        let action = GroupAction::natural(symmetric(n)?)?;
        let r = mu_ratio(&action, &action.point_set([0]), &caps)?;
        println!("S{n}, Y = {{0}}: mu = {}", r.mu);
        for route in &r.routes {
            println!("  {:<12} {}  ({})", route.route, route.mu, route.detail);
        }
    }
    let action = GroupAction::left_translation(cyclic(10)?)?;
    let r = mu_ratio(&action, &action.point_set([0, 1, 4]), &caps)?;
    println!("C10 acting on itself, Y = {{0,1,4}}: mu = {}, witness of order {}", r.mu, r.witness.order());
    Ok(())
}
