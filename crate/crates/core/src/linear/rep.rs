use std::sync::Arc;

use super::{check_prime, FpMatrix, Subspace};
use crate::action::GroupAction;
use crate::bits::{self, ElementSet, Mask, MaskIter};
use crate::error::{Error, Result};
use crate::group::{cyclic, FiniteGroup, Subgroup, IDENTITY};
use crate::rational::Rational;
use crate::submodular::{check_ground, SetFunction};

/// A homomorphism `G → GL_d(F_p)`, stored as one matrix per element.
#[derive(Clone, Debug)]
pub struct Representation {
    group: Arc<FiniteGroup>,
    p: u32,
    dim: usize,
    images: Vec<FpMatrix>,
}

impl Representation {
    /// Extends matrices given for the generators (in the group's generator
    /// order) along the closure tree, then verifies the homomorphism law.
    pub fn from_generator_images(group: Arc<FiniteGroup>, p: u32, dim: usize, generators: Vec<FpMatrix>) -> Result<Self> {
        check_prime(p)?;
        if generators.len() != group.generators().len() {
            return Err(Error::Structural(format!(
                "{} generator images for {} generators",
                generators.len(),
                group.generators().len()
            )));
        }
        for m in &generators {
            if m.p() != p || m.rows() != dim || m.cols() != dim {
                return Err(Error::Structural(format!("generator image is not a {dim}x{dim} matrix over F{p}")));
            }
        }
        let mut images = vec![FpMatrix::identity(p, dim)?; group.order()];
        for g in 1..group.order() {
            let (parent, gen) = group.bfs_parent(g).expect("non-identity elements have a parent");
            images[g] = images[parent].mul(&generators[gen])?;
        }
        Self::from_images(group, p, dim, images)
    }

    /// Takes one matrix per element and verifies `ρ(gh) = ρ(g)ρ(h)`.
    pub fn from_images(group: Arc<FiniteGroup>, p: u32, dim: usize, images: Vec<FpMatrix>) -> Result<Self> {
        check_prime(p)?;
        if images.len() != group.order() {
            return Err(Error::Structural(format!("{} images for a group of order {}", images.len(), group.order())));
        }
        if images[IDENTITY] != FpMatrix::identity(p, dim)? {
            return Err(Error::Invariant("the identity is not sent to the identity matrix".into()));
        }
        for (g, m) in images.iter().enumerate() {
            if m.p() != p || m.rows() != dim || m.cols() != dim || !m.is_invertible() {
                return Err(Error::Invariant(format!("image of element {g} is not in GL_{dim}(F{p})")));
            }
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                if images[group.mul(g, h)] != images[g].mul(&images[h])? {
                    return Err(Error::Invariant(format!(
                        "not a homomorphism at g = {}, h = {}",
                        group.element(g),
                        group.element(h)
                    )));
                }
            }
        }
        Ok(Representation { group, p, dim, images })
    }

    /// Permutation matrices of an action: `ρ(g) e_x = e_{g·x}`.
    pub fn permutation_matrices(action: &GroupAction, p: u32) -> Result<Self> {
        let n = action.domain_size();
        let images = (0..action.group().order())
            .map(|g| {
                let mut data = vec![0; n * n];
                for x in 0..n {
                    data[action.act(g, x) * n + x] = 1;
                }
                FpMatrix::new(p, n, n, data)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_images(Arc::clone(action.group()), p, n, images)
    }

    /// `C_2` on `F_p²` exchanging the two coordinates.
    pub fn swap(p: u32) -> Result<Self> {
        let action = GroupAction::natural(cyclic(2)?)?;
        Self::permutation_matrices(&action, p)
    }

    /// `C_n` on `F_p^n` shifting coordinates cyclically.
    pub fn cyclic_shift(n: usize, p: u32) -> Result<Self> {
        let action = GroupAction::natural(cyclic(n)?)?;
        Self::permutation_matrices(&action, p)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn image(&self, g: usize) -> &FpMatrix {
        &self.images[g]
    }

    fn check_space(&self, w: &Subspace) -> Result<()> {
        if w.p() != self.p || w.ambient_dim() != self.dim {
            return Err(Error::Structural(format!(
                "subspace of F{}^{} given to a representation on F{}^{}",
                w.p(),
                w.ambient_dim(),
                self.p,
                self.dim
            )));
        }
        Ok(())
    }

    /// `g·W`.
    pub fn act_element(&self, g: usize, w: &Subspace) -> Result<Subspace> {
        self.check_space(w)?;
        w.image(&self.images[g])
    }

    /// `A·W`, the span of all `a·w`.
    pub fn act_subspace(&self, a: &ElementSet, w: &Subspace) -> Result<Subspace> {
        self.check_space(w)?;
        if bits::size(a) == 0 {
            return Err(Error::Domain("A·W needs a nonempty A".into()));
        }
        let rows: Vec<Vec<u32>> = a
            .ones()
            .flat_map(|g| w.basis().iter().map(move |v| self.images[g].apply(v)))
            .collect();
        Subspace::span(self.p, self.dim, &rows)
    }

    /// `G_W = {g : g·W = W}`.
    pub fn stabilizer(&self, w: &Subspace) -> Result<Subgroup> {
        self.check_space(w)?;
        let mut members = self.group.empty_set();
        for g in 0..self.group.order() {
            if &w.image(&self.images[g])? == w {
                members.insert(g);
            }
        }
        Subgroup::new(Arc::clone(&self.group), members)
    }

    /// `(Sym_α(W), Γ_W)`: elements with `dim(g·W ∩ W) ≥ α dim W`, and elements
    /// with `g·W ∩ W ≠ {0}`.
    pub fn symmetry_sets(&self, w: &Subspace, alpha: Rational) -> Result<(ElementSet, ElementSet)> {
        self.check_space(w)?;
        if w.is_zero() {
            return Err(Error::Domain("symmetry sets of the zero subspace".into()));
        }
        if alpha < Rational::from_integer(0) || alpha > Rational::from_integer(1) {
            return Err(Error::Domain(format!("alpha = {alpha} outside [0, 1]")));
        }
        let threshold = alpha * Rational::from_integer(w.dim() as i64);
        let mut sym = self.group.empty_set();
        let mut weak = self.group.empty_set();
        for g in 0..self.group.order() {
            let overlap = w.image(&self.images[g])?.intersection(w)?.dim();
            if Rational::from_integer(overlap as i64) >= threshold {
                sym.insert(g);
            }
            if overlap > 0 {
                weak.insert(g);
            }
        }
        Ok((sym, weak))
    }
}

/// `A ↦ dim(A·W) − λ|A|` on the subsets of `G`, with `dim(∅·W) = 0`.
pub struct GammaW {
    rep: Arc<Representation>,
    w: Subspace,
    lambda: Rational,
    /// Basis vectors of `g·W` for each element.
    moved: Vec<Vec<Vec<u32>>>,
}

impl GammaW {
    pub fn new(rep: Arc<Representation>, w: Subspace, lambda: Rational) -> Result<Self> {
        check_ground(rep.group().order())?;
        rep.check_space(&w)?;
        let moved = (0..rep.group().order())
            .map(|g| Ok(w.image(rep.image(g))?.basis().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Ok(GammaW { rep, w, lambda, moved })
    }

    pub fn w(&self) -> &Subspace {
        &self.w
    }

    /// `dim(A·W)` for `A` given as a mask.
    pub fn dim_image(&self, mask: Mask) -> usize {
        let rows: Vec<Vec<u32>> = MaskIter(mask).flat_map(|g| self.moved[g].iter().cloned()).collect();
        if rows.is_empty() {
            return 0;
        }
        let mut rows = rows;
        super::rref(&mut rows, self.rep.p()).len()
    }
}

impl SetFunction for GammaW {
    fn ground_size(&self) -> usize {
        self.rep.group().order()
    }

    fn denominator(&self) -> i64 {
        *self.lambda.denom()
    }

    fn scaled(&self, mask: Mask) -> i64 {
        self.denominator() * self.dim_image(mask) as i64 - self.lambda.numer() * mask.count_ones() as i64
    }

    fn label(&self) -> String {
        format!("gamma_W(lambda = {})", self.lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::group::symmetric;
    use crate::submodular::{check_invariance, check_submodular, GroundSymmetry};

    #[test]
    fn swap_moves_a_line() {
        let rep = Representation::swap(3).unwrap();
        let w = Subspace::span(3, 2, &[vec![1, 0]]).unwrap();
        let g = rep.group().clone();
        assert_eq!(rep.act_subspace(&g.full_set(), &w).unwrap(), Subspace::whole(3, 2).unwrap());
        assert_eq!(rep.act_subspace(&g.set_of([IDENTITY]), &w).unwrap(), w);
        let (sym, weak) = rep.symmetry_sets(&w, Rational::from_integer(1)).unwrap();
        assert_eq!(bits::members(&sym), vec![IDENTITY]);
        assert_eq!(bits::members(&weak), vec![IDENTITY]);
        let (all, _) = rep.symmetry_sets(&w, Rational::from_integer(0)).unwrap();
        assert_eq!(all, g.full_set());
        let v = Subspace::whole(3, 2).unwrap();
        assert_eq!(rep.symmetry_sets(&v, Rational::from_integer(1)).unwrap().0, g.full_set());
        assert!(rep.symmetry_sets(&Subspace::zero(3, 2).unwrap(), Rational::from_integer(1)).is_err());
        assert!(rep.act_subspace(&g.empty_set(), &w).is_err());
    }

    #[test]
    fn generator_images_extend() {
        let g = symmetric(3).unwrap();
        let action = GroupAction::natural(g.clone()).unwrap();
        let full = Representation::permutation_matrices(&action, 5).unwrap();
        let gens: Vec<FpMatrix> = g.generators().iter().map(|p| full.image(g.index_of(p).unwrap()).clone()).collect();
        let rebuilt = Representation::from_generator_images(g.clone(), 5, 3, gens).unwrap();
        for e in 0..6 {
            assert_eq!(rebuilt.image(e), full.image(e));
        }
    }

    #[test]
    fn non_homomorphism_rejected() {
        let g = cyclic(2).unwrap();
        // An element of order 2 cannot map to a matrix of order 4 over F5.
        let m = FpMatrix::from_rows(5, &[vec![2]]).unwrap();
        assert!(matches!(
            Representation::from_generator_images(g, 5, 1, vec![m]),
            Err(Error::Invariant(_))
        ));
    }

    #[test]
    fn gamma_w_on_swap() {
        let rep = Arc::new(Representation::swap(3).unwrap());
        let w = Subspace::span(3, 2, &[vec![1, 0]]).unwrap();
        for lambda in [Rational::from_integer(0), Rational::new(1, 2), Rational::from_integer(1)] {
            let f = GammaW::new(rep.clone(), w.clone(), lambda).unwrap();
            assert_eq!(f.value(0), Rational::from_integer(0));
            assert!(check_submodular(&f, &Caps::default(), 0).holds);
            assert!(check_invariance(&f, GroundSymmetry::Translation(rep.group()), &Caps::default(), 0).unwrap().holds);
        }
    }

    #[test]
    fn stabilizer_of_diagonal() {
        let rep = Representation::swap(3).unwrap();
        let diag = Subspace::span(3, 2, &[vec![1, 1]]).unwrap();
        assert_eq!(rep.stabilizer(&diag).unwrap().order(), 2);
    }
}
