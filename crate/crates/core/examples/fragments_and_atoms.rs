//! Fragments and atoms of the cut function and of `d_A`, and the identity
//! atom of `c_Y` on the subsets of `G`.

use std::sync::Arc;

use gsubmod::action::GroupAction;
use gsubmod::bits;
use gsubmod::group::{symmetric, FiniteGroup, Permutation};
use gsubmod::rational::{int, ratio};
use gsubmod::submodular::{atom_identity, core_set, minimize_nonempty, CutFunction, CyFunction, DaFunction, GroundSymmetry};
use gsubmod::Caps;

fn lists(masks: &[u64]) -> Vec<Vec<usize>> {
    masks.iter().map(|&m| bits::mask_members(m)).collect()
}

fn main() -> gsubmod::Result<()> {
    let caps = Caps::default();
    let sigma = Permutation::parse_cycles(6, "(0 1 2)(3 4)")?;
    let action = Arc::new(GroupAction::natural(FiniteGroup::from_generators(6, vec![sigma])?)?);

    let cut = minimize_nonempty(&CutFunction::new(Arc::clone(&action))?, &caps)?;
    println!("cut: min {}, fragments {:?}, atoms {:?}", cut.min_value, lists(&cut.fragments), lists(&cut.atoms));

    for lambda in [ratio(1, 2), int(1)] {
        let f = DaFunction::new(Arc::clone(&action), action.group().full_set(), lambda)?;
        let r = minimize_nonempty(&f, &caps)?;
        println!("d_G, lambda = {lambda}: {} fragments, atoms {:?}", r.fragment_count, lists(&r.atoms));
        let core = core_set(&f, GroundSymmetry::Points(&action), &caps, 0)?;
        println!("  core {:?}", bits::mask_members(core.points));
    }

    let s3 = symmetric(3)?;
    let nat = Arc::new(GroupAction::natural(Arc::clone(&s3))?);
    let f = CyFunction::new(Arc::clone(&nat), nat.point_set([0]), ratio(1, 3))?;
    let r = atom_identity(&f, &s3, &caps, 0)?;
    println!("c_Y on S3, Y = {{0}}: identity atom {:?}, cosets {:?}", r.subgroup.elements(), lists(&r.cosets));
    Ok(())
}
