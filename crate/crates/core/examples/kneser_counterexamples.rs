//! The image-constrained sets `{σ : σ({0..k-1}) ⊆ {0..l-1}}` in `S_n`, where
//! the Kneser inequality fails whenever `k < l`, and a small image with a
//! nontrivial stabilizer in `AGL1(7)`.

use std::sync::Arc;

use gsubmod::action::GroupAction;
use gsubmod::group::{affine_gl1, affine_map};
use gsubmod::theorems::{example_3_1, example_3_1_formulas, kneser_check};
use gsubmod::Caps;

fn main() -> gsubmod::Result<()> {
    let caps = Caps::default();
    println!(" n  k  l  |A0|  |G_AY|  holds");
    for n in 3..=6 {
        for l in 1..n {
            for k in 1..=l {
                let ex = example_3_1(n, k, l, &caps)?;
                let r = kneser_check(&ex.action, &ex.a0, &ex.y)?;
                let (a0, stab) = example_3_1_formulas(n as u64, k as u64, l as u64);
                println!("{n:>2} {k:>2} {l:>2} {a0:>5} {stab:>7}  {}", r.conclusion_holds);
            }
        }
    }

    let g = affine_gl1(7)?;
    let action = GroupAction::natural(Arc::clone(&g))?;
    let a = g.set_of([g.index_of(&affine_map(7, 1, 0)?).unwrap(), g.index_of(&affine_map(7, 5, 3)?).unwrap()]);
    let y = action.point_set([1, 2]);
    let r = kneser_check(&action, &a, &y)?;
    println!("AGL1(7): {:?}", r.witnesses["AY"]);
    for o in &r.observations {
        println!("  {}: {}", o.name, o.detail);
    }
    Ok(())
}
