//! Exhaustive submodularity and invariance checks, including a `d_A` that
//! loses invariance on a non-Abelian group.

use std::sync::Arc;

use gsubmod::action::GroupAction;
use gsubmod::group::{dihedral, symmetric, Permutation};
use gsubmod::rational::{int, ratio};
use gsubmod::submodular::{check_invariance, check_submodular, CutFunction, CyFunction, DaFunction, GroundSymmetry, SetFunction};
use gsubmod::Caps;

fn report(f: &dyn SetFunction, caps: &Caps) {
    let v = check_submodular(f, caps, 0);
    println!("{:<24} submodular {} ({} triples, {:?})", f.label(), v.holds, v.checked, v.exhaustiveness);
}

fn main() -> gsubmod::Result<()> {
    let caps = Caps::default();
    let action = Arc::new(GroupAction::natural(dihedral(5)?)?);
    report(&CutFunction::new(Arc::clone(&action))?, &caps);
    report(&CyFunction::new(Arc::clone(&action), action.point_set([0, 2]), ratio(1, 2))?, &caps);
    report(&DaFunction::new(Arc::clone(&action), action.group().set_of([0, 1, 3]), int(1))?, &caps);

    let s5 = symmetric(5)?;
    let nat = Arc::new(GroupAction::natural(Arc::clone(&s5))?);
    let fix01: Vec<usize> = (0..s5.order()).filter(|&e| s5.element(e).apply(0) == 0 && s5.element(e).apply(1) == 1).collect();
    let f = DaFunction::new(Arc::clone(&nat), s5.set_of(fix01), int(0))?;
    let v = check_invariance(&f, GroundSymmetry::Points(&nat), &caps, 0)?;
    let c = v.counterexample.expect("not invariant");
    println!("S5, A = Sym{{2,3,4}}: element {} sends {:?} to {:?}, values {} and {}", s5.element(c.element), c.set, c.image, c.value, c.image_value);
    let rev = s5.index_of(&Permutation::new(vec![4, 3, 2, 1, 0])?).unwrap();
    let y = 0b00011;
    let gy = GroundSymmetry::Points(&nat).image(rev, y);
    println!("reversal: d_A({{0,1}}) = {}, d_A({{3,4}}) = {}", f.value(y), f.value(gy));
    Ok(())
}
