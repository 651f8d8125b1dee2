//! Orbits, stabilizers, symmetry sets and the orbit sandwich for `|A·Y|`.

use std::sync::Arc;

use gsubmod::action::GroupAction;
use gsubmod::bits;
use gsubmod::group::dihedral;
use gsubmod::rational::ratio;

fn main() -> gsubmod::Result<()> {
    let g = dihedral(6)?;
    let action = GroupAction::natural(Arc::clone(&g))?;
    let d = action.orbit_decomposition();
    println!("orbits of {} on 6 points: {:?}", g.name(), d.orbits.iter().map(bits::members).collect::<Vec<_>>());
    println!("profile: {:?}", action.profile());

    let y = action.point_set([0, 1, 3]);
    println!("stabilizer of {{0,1,3}} has order {}", action.set_stabilizer(&y).order());
    println!("overlap ratios |gY ∩ Y|/|Y|: {:?}", action.overlap_ratios(&y).iter().map(|r| r.to_string()).collect::<Vec<_>>());
    let sym = action.symmetry_set(&y, ratio(2, 3))?;
    println!("Sym_2/3(Y) has {} elements", bits::size(&sym));

    let a = g.set_of([0, 1, 2]);
    let b = action.orbit_reduction_bounds(&a, &y)?;
    println!("|A·Y| = {} within [{}, {}]", b.exact, b.lower, b.upper);

    let conj = GroupAction::conjugation(Arc::clone(&g))?;
    println!("{} conjugacy classes", conj.orbit_decomposition().orbits.len());
    Ok(())
}
