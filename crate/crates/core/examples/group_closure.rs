//! Builds groups from generators and lists their subgroups and cosets.

use gsubmod::group::{dihedral, FiniteGroup, Permutation};
use gsubmod::Caps;

fn main() -> gsubmod::Result<()> {
    let caps = Caps::default();
    let gens = vec![Permutation::parse_cycles(5, "(0 1 2 3 4)")?, Permutation::parse_cycles(5, "(0 1)")?];
    let s5 = FiniteGroup::closure("S5 from two generators".into(), 5, gens, &caps)?;
    println!("{}: order {}, abelian {}", s5.name(), s5.order(), s5.is_abelian());

    let d4 = dihedral(4)?;
    let subgroups = d4.enumerate_subgroups(&caps)?;
    println!("{} has {} subgroups", d4.name(), subgroups.len());
    for h in &subgroups {
        let cycles: Vec<String> = h.elements().iter().map(|&e| d4.element(e).to_string()).collect();
        println!("  order {:>2}, index {}: {}", h.order(), h.index(), cycles.join(" "));
    }
    let h = &subgroups[1];
    let cosets = d4.left_cosets(h)?;
    println!("{} left cosets of the first nontrivial subgroup", cosets.len());
    Ok(())
}
