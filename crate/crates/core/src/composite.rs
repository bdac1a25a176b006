//! Two embedded copies of a factor logic inside an ambient logic.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::builders::boolean;
use crate::compat::{self, Budget};
use crate::error::{Error, LemmaDetail, Result};
use crate::logic::{validate_logic, Element, FiniteLogic, ValidateConfig};
use crate::morphisms::{validate_morphism, Morphism};
use crate::state::{State, StatePolytope};
use crate::Rational;

/// Largest ambient logic built by [`boolean_product`].
pub const PRODUCT_MAX_ELEMENTS: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Check {
    #[default]
    Unchecked,
    Holds,
    Fails,
}

impl Check {
    fn from_bool(b: bool) -> Self {
        if b {
            Check::Holds
        } else {
            Check::Fails
        }
    }
}

/// First atom pair `(e, f)` whose embedded meet is missing or not an atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JFailure {
    pub e: Element,
    pub f: Element,
    pub meet: Option<Element>,
}

#[derive(Clone, Debug)]
pub struct CompositeLogic {
    factor: FiniteLogic,
    ambient: FiniteLogic,
    pi1: Morphism,
    pi2: Morphism,
    checked_i: Check,
    checked_j: Check,
}

impl CompositeLogic {
    /// Validates both maps as injective morphisms; (I) and (J) start unchecked.
    pub fn new(
        factor: FiniteLogic,
        ambient: FiniteLogic,
        pi1: &[usize],
        pi2: &[usize],
    ) -> Result<Self> {
        let mut maps = [pi1, pi2].into_iter().map(|m| {
            let m = validate_morphism(&factor, &ambient, m)?;
            match m.injectivity_witness() {
                Some((a, b)) => Err(Error::NotInjective(a.index(), b.index())),
                None => Ok(m),
            }
        });
        let pi1 = maps.next().expect("two maps")?;
        let pi2 = maps.next().expect("two maps")?;
        Ok(CompositeLogic {
            factor,
            ambient,
            pi1,
            pi2,
            checked_i: Check::Unchecked,
            checked_j: Check::Unchecked,
        })
    }

    pub fn factor(&self) -> &FiniteLogic {
        &self.factor
    }

    pub fn ambient(&self) -> &FiniteLogic {
        &self.ambient
    }

    pub fn pi1(&self) -> &Morphism {
        &self.pi1
    }

    pub fn pi2(&self) -> &Morphism {
        &self.pi2
    }

    pub fn checked_i(&self) -> Check {
        self.checked_i
    }

    pub fn checked_j(&self) -> Check {
        self.checked_j
    }

    /// (I): `π1(E)` and `π2(E)` are mutually compatible.
    pub fn check_condition_i(&mut self, budget: &mut Budget) -> Result<bool> {
        let s1: Vec<Element> = self.pi1.map().to_vec();
        let s2: Vec<Element> = self.pi2.map().to_vec();
        let holds = compat::mutually_compatible(&self.ambient, &s1, &s2, budget)?;
        self.checked_i = Check::from_bool(holds);
        Ok(holds)
    }

    /// (J): `π1(e) ∧ π2(f)` is an atom for all atoms `e`, `f`.
    pub fn check_condition_j(&mut self) -> Option<JFailure> {
        let failure = self.j_failure();
        self.checked_j = Check::from_bool(failure.is_none());
        failure
    }

    fn j_failure(&self) -> Option<JFailure> {
        for &e in self.factor.atoms() {
            for &f in self.factor.atoms() {
                let meet = self.meet_embed(e, f).ok();
                if !meet.is_some_and(|m| self.ambient.is_atom(m)) {
                    return Some(JFailure { e, f, meet });
                }
            }
        }
        None
    }

    /// `π1(e) ∧ π2(f)` in the ambient logic.
    pub fn meet_embed(&self, e: Element, f: Element) -> Result<Element> {
        self.ambient.inf(self.pi1.apply(e), self.pi2.apply(f))
    }

    pub fn restrict1(&self, rho: &State) -> State {
        restrict(&self.pi1, rho)
    }

    pub fn restrict2(&self, rho: &State) -> State {
        restrict(&self.pi2, rho)
    }

    fn require_i(&self) -> Result<()> {
        if self.checked_i != Check::Holds {
            return Err(Error::PreconditionFailed(
                "condition (I) is not verified for this composite".into(),
            ));
        }
        Ok(())
    }

    fn require_ij(&self) -> Result<()> {
        self.require_i()?;
        if self.checked_j != Check::Holds {
            return Err(Error::PreconditionFailed(
                "condition (J) is not verified for this composite".into(),
            ));
        }
        Ok(())
    }
}

fn restrict(pi: &Morphism, rho: &State) -> State {
    State::from_values(pi.map().iter().map(|&e| rho.value(e).clone()).collect())
}

/// The product algebra `E × E` for Boolean `E`, realized on the grid of
/// atom pairs, with `π1(e) = e × 1` and `π2(f) = 1 × f`. (I) and (J) are
/// checked before returning.
pub fn boolean_product(factor: &FiniteLogic) -> Result<CompositeLogic> {
    let all: Vec<Element> = factor.elements().collect();
    if !compat::is_boolean_subalgebra(factor, &all) {
        return Err(Error::NotBoolean);
    }
    let atoms = factor.atoms();
    let k = atoms.len();
    let grid = k * k;
    if grid >= usize::BITS as usize - 1 || 1usize << grid > PRODUCT_MAX_ELEMENTS {
        return Err(Error::TooLarge {
            size: if grid < 64 {
                1usize << grid
            } else {
                usize::MAX
            },
            limit: PRODUCT_MAX_ELEMENTS,
        });
    }
    let names: Vec<String> = if k == 1 {
        alloc::vec!["1".into()]
    } else {
        (0..grid)
            .map(|ij| {
                format!(
                    "({},{})",
                    factor.label(atoms[ij / k]),
                    factor.label(atoms[ij % k])
                )
            })
            .collect()
    };
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let ambient = validate_logic(
        &boolean(&refs),
        &ValidateConfig {
            max_elements: PRODUCT_MAX_ELEMENTS,
        },
    )?;
    // Element index of the ambient is the mask over grid atoms.
    let atom_mask = |e: Element| -> usize {
        (0..k)
            .filter(|&i| factor.leq(atoms[i], e))
            .fold(0, |m, i| m | 1 << i)
    };
    let pi1: Vec<usize> = factor
        .elements()
        .map(|e| {
            let m = atom_mask(e);
            (0..grid)
                .filter(|ij| m >> (ij / k) & 1 == 1)
                .fold(0, |acc, ij| acc | 1 << ij)
        })
        .collect();
    let pi2: Vec<usize> = factor
        .elements()
        .map(|e| {
            let m = atom_mask(e);
            (0..grid)
                .filter(|ij| m >> (ij % k) & 1 == 1)
                .fold(0, |acc, ij| acc | 1 << ij)
        })
        .collect();
    let mut c = CompositeLogic::new(factor.clone(), ambient, &pi1, &pi2)?;
    if !c.check_condition_i(&mut Budget::default())? {
        return Err(Error::ConstructionFailed(
            "product fails condition (I)".into(),
        ));
    }
    if c.check_condition_j().is_some() {
        return Err(Error::ConstructionFailed(
            "product fails condition (J)".into(),
        ));
    }
    Ok(c)
}

/// Values on both sides of the product identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma2Report {
    pub first: Rational,
    pub second: Rational,
    pub joint: Rational,
}

/// `ℙ(π1e2 ∧ π2f2 | π1e1 ∧ π2f1) = ℙ(e2|e1)·ℙ(f2|f1)`.
#[allow(clippy::too_many_arguments)]
pub fn check_lemma2(
    c: &CompositeLogic,
    factor: &StatePolytope,
    ambient: &StatePolytope,
    e1: Element,
    e2: Element,
    f1: Element,
    f2: Element,
) -> Result<Lemma2Report> {
    c.require_i()?;
    let fl = c.factor();
    let exists = |to: Element, from: Element| -> Result<Rational> {
        factor
            .transition_probability(to, from)?
            .s()
            .cloned()
            .ok_or_else(|| {
                Error::PreconditionFailed(format!(
                    "transition probability from {} to {} does not exist",
                    fl.label(from),
                    fl.label(to)
                ))
            })
    };
    let first = exists(e2, e1)?;
    let second = exists(f2, f1)?;
    let expected = &first * &second;
    let g1 = c.meet_embed(e1, f1)?;
    let g2 = c.meet_embed(e2, f2)?;
    let t = ambient.transition_probability(g2, g1)?;
    match t.s() {
        Some(joint) if *joint == expected => Ok(Lemma2Report {
            first,
            second,
            joint: joint.clone(),
        }),
        found => Err(Error::LemmaViolated {
            lemma: "Lemma 2",
            detail: Box::new(LemmaDetail {
                message: "joint transition probability differs from the product".into(),
                expected: Some(expected),
                found: found.cloned(),
            }),
        }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lemma3Report {
    /// `ρ∘π1 = ℙ_e` and `ρ∘π2 = ℙ_f`.
    pub restrictions_atomic: bool,
    /// `ρ = ℙ_{π1e ∧ π2f}`.
    pub is_grid_atomic: bool,
}

/// Both directions of `ρ∘π1 = ℙ_e ∧ ρ∘π2 = ℙ_f ⟺ ρ = ℙ_{π1e ∧ π2f}`.
pub fn check_lemma3(
    c: &CompositeLogic,
    factor: &StatePolytope,
    ambient: &StatePolytope,
    e: Element,
    f: Element,
    rho: &State,
) -> Result<Lemma3Report> {
    c.require_ij()?;
    let pe = factor.atomic_state(e)?;
    let pf = factor.atomic_state(f)?;
    let g = c.meet_embed(e, f)?;
    let pg = ambient.atomic_state(g)?;
    let restrictions_atomic = c.restrict1(rho) == pe && c.restrict2(rho) == pf;
    let is_grid_atomic = *rho == pg;
    if restrictions_atomic != is_grid_atomic {
        return Err(Error::LemmaViolated {
            lemma: "Lemma 3",
            detail: Box::new(LemmaDetail {
                message: format!(
                    "restrictions atomic: {restrictions_atomic}, state atomic at {}: {is_grid_atomic}",
                    c.ambient().label(g)
                ),
                expected: None,
                found: None,
            }),
        });
    }
    Ok(Lemma3Report {
        restrictions_atomic,
        is_grid_atomic,
    })
}
