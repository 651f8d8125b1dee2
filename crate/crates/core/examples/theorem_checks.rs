//! Each statement checker on one instance, with its clauses.

use std::sync::Arc;

use gsubmod::action::GroupAction;
use gsubmod::group::{cyclic, dihedral};
use gsubmod::rational::ratio;
use gsubmod::theorems::{self, CheckReport};
use gsubmod::Caps;

fn show(r: &CheckReport) {
    println!("{} ({}): hypotheses {}, conclusion {}", r.statement_id, r.setting, r.hypotheses_hold, r.conclusion_holds);
    for c in r.hypotheses.iter().chain(&r.conclusions) {
        println!("  [{}] {}: {}", if c.holds { "ok" } else { "no" }, c.name, c.detail);
    }
}

fn main() -> gsubmod::Result<()> {
    let caps = Caps::default();
    let d5 = Arc::new(GroupAction::natural(dihedral(5)?)?);
    let g = Arc::clone(d5.group());
    let flip = g.element_from_cycles("(1 4)(2 3)")?;
    let rot = g.element_from_cycles("(0 1 2 3 4)")?;
    let y = d5.point_set([0]);
    let a = g.set_of([0, flip]);
    let b = g.set_of([0, rot]);

    show(&theorems::check_murphy(&d5, &a, &y)?);
    show(&theorems::check_small_growth(&d5, &a, &y, ratio(1, 2))?);
    show(&theorems::check_freiman(&d5, &a, &y, ratio(1, 2))?);
    show(&theorems::check_ruzsa_triple(&d5, &a, &b, &d5.point_set([0, 1]))?);
    show(&theorems::check_hamidoune(&d5, &d5.point_set([0, 1]), ratio(1, 4), None, &caps, 0)?);
    show(&theorems::find_petridis_witness(&d5, &b, &y, ratio(2, 2), &caps, 0)?);
    show(&theorems::check_fragment_bounds(&d5, &b, ratio(1, 4), None, &caps)?);

    let c8 = Arc::new(GroupAction::left_translation(cyclic(8)?)?);
    let a = c8.group().set_of([0, 1]);
    show(&theorems::find_taod_witness(&c8, &a, &c8.point_set([0, 1, 2]), ratio(4, 3), 3, &caps, 0)?);
    Ok(())
}
