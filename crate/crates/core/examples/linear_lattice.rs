//! Subspace lattices over `F_p`: the Grassmann identity, `γ_W` on a
//! representation and lattice atoms of `W ↦ dim(A·W) − λ dim W`.

use std::sync::Arc;

use gsubmod::group::symmetric;
use gsubmod::action::GroupAction;
use gsubmod::linear::{enumerate_subspaces, minimize_on_lattice, DeltaA, GammaW, Representation, Subspace};
use gsubmod::rational::ratio;
use gsubmod::submodular::{check_submodular, SetFunction};
use gsubmod::Caps;

fn main() -> gsubmod::Result<()> {
    let caps = Caps::default();
    let all = enumerate_subspaces(2, 4, &caps)?;
    let pairs = all.iter().flat_map(|u| all.iter().map(move |w| (u, w))).count();
    let ok = all.iter().all(|u| all.iter().all(|w| u.sum(w).unwrap().dim() + u.intersection(w).unwrap().dim() == u.dim() + w.dim()));
    println!("{} subspaces of F2^4, Grassmann identity on {pairs} pairs: {ok}", all.len());

    let swap = Arc::new(Representation::swap(3)?);
    let w = Subspace::span(3, 2, &[vec![1, 0]])?;
    let f = GammaW::new(Arc::clone(&swap), w, ratio(1, 2))?;
    println!("gamma_W on the swap: values {:?}", (0..4).map(|m| f.value(m).to_string()).collect::<Vec<_>>());
    println!("  submodular {}", check_submodular(&f, &caps, 0).holds);

    let s3 = GroupAction::natural(symmetric(3)?)?;
    let rep = Arc::new(Representation::permutation_matrices(&s3, 2)?);
    let delta = DeltaA::new(Arc::clone(&rep), rep.group().full_set(), ratio(1, 2))?;
    let r = minimize_on_lattice(&delta, &caps)?;
    println!("S3 on F2^3: min {}, atoms {:?}, pairwise trivial {}", r.min_value, r.atoms, r.atoms_pairwise_trivial());
    Ok(())
}
