use std::sync::Arc;

use num_integer::Integer;
use rand::Rng;

use super::{check_ground, DynSetFunction, SetFunction};
use crate::action::GroupAction;
use crate::bits::{self, ElementSet, Mask, MaskIter, PointSet, UnionCounter};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::sampling;

fn nonnegative(name: &str, v: Rational) -> Result<()> {
    if v < Rational::from_integer(0) {
        return Err(Error::Domain(format!("{name} = {v} must be nonnegative")));
    }
    Ok(())
}

/// `Y ↦ |{(g, y) ∈ G × Y : g·y ∉ Y}|` on the subsets of `X`.
pub struct CutFunction {
    action: Arc<GroupAction>,
    /// Orbit masks with the common stabilizer order `|G|/|O|` of their points.
    orbits: Vec<(Mask, i64)>,
}

impl CutFunction {
    pub fn new(action: Arc<GroupAction>) -> Result<Self> {
        check_ground(action.domain_size())?;
        let order = action.group().order();
        let orbits = action
            .orbit_decomposition()
            .orbits
            .iter()
            .map(|o| (bits::set_to_mask(o), (order / bits::size(o)) as i64))
            .collect();
        Ok(CutFunction { action, orbits })
    }

    pub fn action(&self) -> &Arc<GroupAction> {
        &self.action
    }
}

impl SetFunction for CutFunction {
    fn ground_size(&self) -> usize {
        self.action.domain_size()
    }

    fn denominator(&self) -> i64 {
        1
    }

    /// Each `y` in `Y ∩ O` is sent outside `Y` by `|G_y| · |O \ Y|` elements.
    fn scaled(&self, mask: Mask) -> i64 {
        self.orbits
            .iter()
            .map(|&(o, stab)| {
                let k = (mask & o).count_ones() as i64;
                let outside = (o & !mask).count_ones() as i64;
                k * stab * outside
            })
            .sum()
    }

    fn label(&self) -> String {
        "cut".into()
    }
}

/// `A ↦ |A·Y| − λ|A|` on the subsets of `G`.
pub struct CyFunction {
    action: Arc<GroupAction>,
    y: PointSet,
    lambda: Rational,
    images: UnionCounter,
}

impl CyFunction {
    pub fn new(action: Arc<GroupAction>, y: PointSet, lambda: Rational) -> Result<Self> {
        check_ground(action.group().order())?;
        nonnegative("lambda", lambda)?;
        let images = UnionCounter::new((0..action.group().order()).map(|g| action.act_element_on_set(g, &y)).collect());
        Ok(CyFunction { action, y, lambda, images })
    }

    pub fn action(&self) -> &Arc<GroupAction> {
        &self.action
    }

    pub fn y(&self) -> &PointSet {
        &self.y
    }

    pub fn lambda(&self) -> Rational {
        self.lambda
    }

    /// `|A·Y|` for `A` given as a mask over element indices.
    pub fn image_size(&self, mask: Mask) -> usize {
        self.images.count(mask)
    }
}

impl SetFunction for CyFunction {
    fn ground_size(&self) -> usize {
        self.action.group().order()
    }

    fn denominator(&self) -> i64 {
        *self.lambda.denom()
    }

    fn scaled(&self, mask: Mask) -> i64 {
        self.denominator() * self.images.count(mask) as i64 - self.lambda.numer() * mask.count_ones() as i64
    }

    fn label(&self) -> String {
        format!("c_Y(lambda = {})", self.lambda)
    }
}

/// `Y ↦ |A·Y| − λ|Y|` on the subsets of `X`.
pub struct DaFunction {
    action: Arc<GroupAction>,
    a: ElementSet,
    lambda: Rational,
    images: UnionCounter,
}

impl DaFunction {
    pub fn new(action: Arc<GroupAction>, a: ElementSet, lambda: Rational) -> Result<Self> {
        check_ground(action.domain_size())?;
        nonnegative("lambda", lambda)?;
        if bits::size(&a) == 0 {
            return Err(Error::Domain("d_A needs a nonempty A".into()));
        }
        let images = UnionCounter::new(
            (0..action.domain_size())
                .map(|x| action.point_set(a.ones().map(|g| action.act(g, x))))
                .collect(),
        );
        Ok(DaFunction { action, a, lambda, images })
    }

    pub fn a(&self) -> &ElementSet {
        &self.a
    }

    pub fn lambda(&self) -> Rational {
        self.lambda
    }

    pub fn action(&self) -> &Arc<GroupAction> {
        &self.action
    }
}

impl SetFunction for DaFunction {
    fn ground_size(&self) -> usize {
        self.action.domain_size()
    }

    fn denominator(&self) -> i64 {
        *self.lambda.denom()
    }

    fn scaled(&self, mask: Mask) -> i64 {
        self.denominator() * self.images.count(mask) as i64 - self.lambda.numer() * mask.count_ones() as i64
    }

    fn label(&self) -> String {
        format!("d_A(lambda = {})", self.lambda)
    }
}

/// `S ↦ Σ_{x ∈ S} w_x`.
pub struct Modular {
    weights: Vec<i64>,
    den: i64,
}

impl Modular {
    pub fn new(weights: &[Rational]) -> Result<Self> {
        check_ground(weights.len())?;
        let den = weights.iter().fold(1i64, |d, w| d.lcm(w.denom()));
        let weights = weights.iter().map(|w| w.numer() * (den / w.denom())).collect();
        Ok(Modular { weights, den })
    }

    pub fn cardinality(n: usize) -> Self {
        Modular::new(&vec![Rational::from_integer(1); n]).expect("ground size checked by caller")
    }
}

impl SetFunction for Modular {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn denominator(&self) -> i64 {
        self.den
    }

    fn scaled(&self, mask: Mask) -> i64 {
        MaskIter(mask).map(|i| self.weights[i]).sum()
    }

    fn label(&self) -> String {
        if self.den == 1 && self.weights.iter().all(|&w| w == 1) {
            "cardinality".into()
        } else {
            "modular".into()
        }
    }
}

type Evaluator = dyn Fn(Mask) -> i64 + Send + Sync;

/// A set function given by a closure returning `value · denominator`.
pub struct FnSetFunction {
    ground: usize,
    den: i64,
    label: String,
    f: Box<Evaluator>,
}

impl FnSetFunction {
    pub fn new(ground: usize, den: i64, label: impl Into<String>, f: impl Fn(Mask) -> i64 + Send + Sync + 'static) -> Self {
        assert!(ground <= super::MAX_GROUND && den > 0);
        FnSetFunction { ground, den, label: label.into(), f: Box::new(f) }
    }
}

impl SetFunction for FnSetFunction {
    fn ground_size(&self) -> usize {
        self.ground
    }

    fn denominator(&self) -> i64 {
        self.den
    }

    fn scaled(&self, mask: Mask) -> i64 {
        (self.f)(mask)
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// `λf + μg`.
pub struct Combination {
    f: DynSetFunction,
    g: DynSetFunction,
    lambda: Rational,
    mu: Rational,
    den: i64,
    f_factor: i64,
    g_factor: i64,
}

impl Combination {
    pub fn new(f: DynSetFunction, g: DynSetFunction, lambda: Rational, mu: Rational) -> Result<Self> {
        nonnegative("lambda", lambda)?;
        nonnegative("mu", mu)?;
        if f.ground_size() != g.ground_size() {
            return Err(Error::Structural(format!(
                "ground sizes {} and {} differ",
                f.ground_size(),
                g.ground_size()
            )));
        }
        let fd = lambda.denom() * f.denominator();
        let gd = mu.denom() * g.denominator();
        let den = fd.lcm(&gd);
        Ok(Combination {
            f_factor: lambda.numer() * (den / fd),
            g_factor: mu.numer() * (den / gd),
            f,
            g,
            lambda,
            mu,
            den,
        })
    }
}

impl SetFunction for Combination {
    fn ground_size(&self) -> usize {
        self.f.ground_size()
    }

    fn denominator(&self) -> i64 {
        self.den
    }

    fn scaled(&self, mask: Mask) -> i64 {
        let mut v = 0;
        if self.f_factor != 0 {
            v += self.f_factor * self.f.scaled(mask);
        }
        if self.g_factor != 0 {
            v += self.g_factor * self.g.scaled(mask);
        }
        v
    }

    fn label(&self) -> String {
        format!("{} * {} + {} * {}", self.lambda, self.f.label(), self.mu, self.g.label())
    }
}

/// `f − λu` for a modular `u`.
pub struct ModularShift {
    f: DynSetFunction,
    u: DynSetFunction,
    lambda: Rational,
    den: i64,
    f_factor: i64,
    u_factor: i64,
}

impl ModularShift {
    pub fn new(f: DynSetFunction, u: DynSetFunction, lambda: Rational, caps: &Caps, seed: u64) -> Result<Self> {
        let n = f.ground_size();
        if u.ground_size() != n {
            return Err(Error::Structural(format!("ground sizes {n} and {} differ", u.ground_size())));
        }
        check_modular(u.as_ref(), caps, seed)?;
        let fd = f.denominator();
        let ud = lambda.denom() * u.denominator();
        let den = fd.lcm(&ud);
        Ok(ModularShift {
            f_factor: den / fd,
            u_factor: lambda.numer() * (den / ud),
            f,
            u,
            lambda,
            den,
        })
    }
}

/// `u(S) = u(∅) + Σ_{x ∈ S} (u({x}) − u(∅))` on all or sampled `S`.
fn check_modular(u: &dyn SetFunction, caps: &Caps, seed: u64) -> Result<()> {
    let n = u.ground_size();
    let empty = u.scaled(0);
    let gains: Vec<i64> = (0..n).map(|i| u.scaled(1u64 << i) - empty).collect();
    let predicted = |m: Mask| empty + MaskIter(m).map(|i| gains[i]).sum::<i64>();
    let full = bits::ground_mask(n);
    let bad = if n <= caps.submodular_exhaustive {
        (0..=full).find(|&m| u.scaled(m) != predicted(m))
    } else {
        let mut rng = sampling::rng(seed, 0x3d);
        (0..caps.sample_trials).map(|_| rng.gen::<u64>() & full).find(|&m| u.scaled(m) != predicted(m))
    };
    match bad {
        Some(m) => Err(Error::Domain(format!(
            "{} is not modular: fails at {:?}",
            u.label(),
            bits::mask_members(m)
        ))),
        None => Ok(()),
    }
}

impl SetFunction for ModularShift {
    fn ground_size(&self) -> usize {
        self.f.ground_size()
    }

    fn denominator(&self) -> i64 {
        self.den
    }

    fn scaled(&self, mask: Mask) -> i64 {
        self.f_factor * self.f.scaled(mask) - self.u_factor * self.u.scaled(mask)
    }

    fn label(&self) -> String {
        format!("{} - {} * {}", self.f.label(), self.lambda, self.u.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic, dihedral, symmetric, FiniteGroup, Permutation};
    use crate::submodular::check_submodular;

    fn cut_oracle(action: &GroupAction, mask: Mask) -> i64 {
        let mut count = 0;
        for g in 0..action.group().order() {
            for y in MaskIter(mask) {
                if mask >> action.act(g, y) & 1 == 0 {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn cut_matches_pair_count() {
        let gens = vec![Permutation::parse_cycles(6, "(0 1 2)(3 4)").unwrap()];
        let g = FiniteGroup::from_generators(6, gens).unwrap();
        for action in [
            GroupAction::natural(g).unwrap(),
            GroupAction::natural(dihedral(5).unwrap()).unwrap(),
            GroupAction::conjugation(symmetric(3).unwrap()).unwrap(),
        ] {
            let action = Arc::new(action);
            let cut = CutFunction::new(action.clone()).unwrap();
            for m in 0..1u64 << action.domain_size() {
                assert_eq!(cut.scaled(m), cut_oracle(&action, m));
            }
            assert_eq!(cut.scaled(bits::ground_mask(action.domain_size())), 0);
        }
    }

    #[test]
    fn cy_and_da_values() {
        let g = symmetric(3).unwrap();
        let action = Arc::new(GroupAction::natural(g.clone()).unwrap());
        let y = action.point_set([0]);
        let cy = CyFunction::new(action.clone(), y.clone(), Rational::new(1, 2)).unwrap();
        for m in 0..64u64 {
            let a = bits::mask_to_set(m, 6);
            let want = Rational::from_integer(action.act_size(&a, &y) as i64) - Rational::new(m.count_ones() as i64, 2);
            assert_eq!(cy.value(m), want);
        }
        let a = g.set_of([0, 1]);
        let da = DaFunction::new(action.clone(), a.clone(), Rational::new(2, 3)).unwrap();
        for m in 0..8u64 {
            let ys = bits::mask_to_set(m, 3);
            let want = Rational::from_integer(action.act_size(&a, &ys) as i64) - Rational::new(2 * m.count_ones() as i64, 3);
            assert_eq!(da.value(m), want);
        }
        assert!(DaFunction::new(action.clone(), g.empty_set(), Rational::from_integer(0)).is_err());
        assert!(CyFunction::new(action, y, Rational::new(-1, 2)).is_err());
    }

    #[test]
    fn combinations() {
        let action = Arc::new(GroupAction::natural(cyclic(5).unwrap()).unwrap());
        let cut: DynSetFunction = Arc::new(CutFunction::new(action).unwrap());
        let card: DynSetFunction = Arc::new(Modular::cardinality(5));
        let same = Combination::new(cut.clone(), card.clone(), Rational::from_integer(1), Rational::from_integer(0)).unwrap();
        let double = Combination::new(cut.clone(), cut.clone(), Rational::from_integer(1), Rational::from_integer(1)).unwrap();
        for m in 0..32u64 {
            assert_eq!(same.value(m), cut.value(m));
            assert_eq!(double.value(m), cut.value(m) * 2);
        }
        assert!(check_submodular(&double, &Caps::default(), 0).holds);
        assert!(matches!(
            Combination::new(cut.clone(), card.clone(), Rational::from_integer(-1), Rational::from_integer(1)),
            Err(Error::Domain(_))
        ));
        let shifted = ModularShift::new(cut.clone(), card, Rational::from_integer(1), &Caps::default(), 0).unwrap();
        assert!(check_submodular(&shifted, &Caps::default(), 0).holds);
        assert!(ModularShift::new(cut.clone(), cut, Rational::from_integer(1), &Caps::default(), 0).is_err());
    }

    #[test]
    fn weighted_modular() {
        let u = Modular::new(&[Rational::new(1, 2), Rational::new(1, 3), Rational::from_integer(2)]).unwrap();
        assert_eq!(u.denominator(), 6);
        assert_eq!(u.value(0b111), Rational::new(17, 6));
    }
}
