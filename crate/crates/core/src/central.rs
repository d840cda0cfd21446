//! The central subalgebra of `l`-th powers.
//!
//! Powers of cluster variables to the order of the root of unity are
//! central in the ambient torus. This module builds them with a
//! double-checked centrality certificate, evaluates the exchange identity
//! their generators satisfy when the order is odd and coprime to the
//! symmetrizer, and compares the whole structure against the classical
//! engine at order one through the coefficientwise embedding of integers
//! into the cyclotomic ring.

use crate::cyclotomic::CyclotomicInteger;
use crate::error::EngineError;
use crate::exchange_graph::apply_word;
use crate::seeds::Seed;
use crate::torus::TorusElement;

/// A torus element certified central: every exponent lies in the radical
/// of the ambient form and the element commutes with every frame element
/// of the seed it was built from. The two checks are redundant on a
/// correct engine, which is the point.
#[derive(Clone, Debug)]
pub struct CentralElement {
    value: TorusElement,
    provenance: String,
}

impl CentralElement {
    /// Certifies and wraps a value. The provenance string names where the
    /// element came from, for reports.
    pub fn new_checked(
        seed: &Seed,
        value: TorusElement,
        provenance: String,
    ) -> Result<Self, EngineError> {
        if !value.is_central_support() {
            return Err(EngineError::Incompatible(format!(
                "element {provenance} has an exponent outside the radical of the form"
            )));
        }
        for (i, x) in seed.frame().iter().enumerate() {
            if !value.commutes_with(x) {
                return Err(EngineError::Incompatible(format!(
                    "element {provenance} does not commute with frame element {}",
                    i + 1
                )));
            }
        }
        Ok(CentralElement { value, provenance })
    }

    pub fn value(&self) -> &TorusElement {
        &self.value
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }
}

/// The `l`-th power of the seed's `j`-th cluster variable, certified
/// central.
pub fn ell_power(seed: &Seed, j: usize) -> Result<CentralElement, EngineError> {
    if j >= seed.dim() {
        return Err(EngineError::InvalidInput(format!(
            "direction {} out of range for a seed of dimension {}",
            j + 1,
            seed.dim()
        )));
    }
    let value = seed.frame()[j].pow(seed.ell());
    CentralElement::new_checked(seed, value, format!("frame[{}]^{}", j + 1, seed.ell()))
}

/// The `l`-th powers of all cluster variables of the seed.
pub fn ell_powers(seed: &Seed) -> Result<Vec<CentralElement>, EngineError> {
    (0..seed.dim()).map(|j| ell_power(seed, j)).collect()
}

/// Both sides of the exchange identity for `l`-th powers in direction
/// `k`, their difference, and the verdict.
#[derive(Clone, Debug)]
pub struct ExchangeIdentityReport {
    pub holds: bool,
    pub lhs: TorusElement,
    pub rhs: TorusElement,
    pub residual: TorusElement,
}

/// Evaluates `M(e_k)^l (mu_k M(e_k))^l` against
/// `prod_{b_ik>0} (M(e_i)^l)^{b_ik} + prod_{b_ik<0} (M(e_i)^l)^{-b_ik}`.
///
/// The identity holds whenever the order is odd and coprime to the
/// symmetrizer; the check runs unconditionally so that the failures
/// outside that hypothesis are observable, residual included.
pub fn exchange_identity_check(
    seed: &Seed,
    k: usize,
    safety: u64,
) -> Result<ExchangeIdentityReport, EngineError> {
    let ell = seed.ell();
    let mutated = seed.mutate(k, safety)?;
    let lhs = seed.frame()[k].pow(ell).mul_ref(&mutated.frame()[k].pow(ell));

    let column = seed.btilde().column(k);
    let mut plus = TorusElement::one(seed.ambient());
    let mut minus = TorusElement::one(seed.ambient());
    for (i, &b) in column.iter().enumerate() {
        if b > 0 {
            plus = plus.mul_ref(&seed.frame()[i].pow(ell).pow(b as u64));
        } else if b < 0 {
            minus = minus.mul_ref(&seed.frame()[i].pow(ell).pow((-b) as u64));
        }
    }
    let rhs = plus.add_ref(&minus);
    let residual = lhs.sub_ref(&rhs);
    Ok(ExchangeIdentityReport {
        holds: residual.is_zero(),
        lhs,
        rhs,
        residual,
    })
}

/// The verdict of the classical comparison along one mutation word.
#[derive(Clone, Debug)]
pub struct FrobeniusReport {
    pub holds: bool,
    /// The first direction whose variables disagree, when any.
    pub failed_direction: Option<usize>,
}

/// Runs a mutation word on the seed and on its classical twin at order
/// one, then checks that each classical variable, taken coefficientwise
/// into the cyclotomic ring with exponents scaled by `l`, equals the
/// `l`-th power of the corresponding quantum variable.
///
/// The seed must carry the standard frame, so that its variables line up
/// with the classical initial cluster, and must satisfy the coprimality
/// assumption.
pub fn frobenius_check(
    seed: &Seed,
    word: &[usize],
    safety: u64,
) -> Result<FrobeniusReport, EngineError> {
    seed.ensure_coprime()?;
    for (j, x) in seed.frame().iter().enumerate() {
        if *x != TorusElement::generator(seed.ambient(), j) {
            return Err(EngineError::InvalidInput(
                "the classical comparison needs a seed with the standard frame".into(),
            ));
        }
    }

    let quantum = apply_word(seed, word, safety)?;
    let classical = apply_word(&seed.classical_twin()?, word, safety)?;

    let ell = seed.ell();
    for j in 0..seed.dim() {
        let mut image = TorusElement::zero(seed.ambient());
        for (g, c) in classical.frame()[j].terms() {
            let scaled: Vec<i64> = g.iter().map(|&v| v * ell as i64).collect();
            let lifted = CyclotomicInteger::from_bigint(
                seed.context(),
                c.coefficients()[0].clone(),
            );
            image = image.add_ref(&TorusElement::monomial(seed.ambient(), scaled, lifted));
        }
        if image != quantum.frame()[j].pow(ell) {
            return Ok(FrobeniusReport {
                holds: false,
                failed_direction: Some(j),
            });
        }
    }
    Ok(FrobeniusReport {
        holds: true,
        failed_direction: None,
    })
}

/// Whether the element lies in the center of the ambient torus: every
/// exponent must be in the radical of the form. Membership in the cluster
/// algebra itself is the caller's concern.
pub fn full_center_membership(seed: &Seed, a: &TorusElement) -> bool {
    assert_eq!(
        **a.form(),
        **seed.ambient(),
        "element must live in the seed's ambient torus"
    );
    a.is_central_support()
}
