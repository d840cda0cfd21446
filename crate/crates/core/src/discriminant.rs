//! Regular traces and discriminants over the central subalgebra.
//!
//! An algebra that is free of finite rank over a central subring carries
//! the trace of left multiplication; the discriminant is the determinant
//! of the Gram matrix of a basis, well defined up to central units. The
//! presentations here expose a basis, a product, and an exact central
//! decomposition; the pipeline computes traces by honest decomposition,
//! takes the determinant fraction-free, and factors the result against
//! the closed form: the rank power of the order times powers of the
//! noninverted frozen variables.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::cyclotomic::CyclotomicInteger;
use crate::error::EngineError;
use crate::exchange_graph::canonical_key;
use crate::seeds::Seed;
use crate::torus::{SkewForm, TorusElement};

pub(crate) fn order_power(ell: u64, exponent: u64) -> BigInt {
    num_traits::pow(BigInt::from(ell), exponent as usize)
}

/// An algebra presented as a free module of finite rank over a central
/// coefficient ring. Coefficients are torus elements over
/// `coefficient_form` and must commute with each other.
pub trait FreePresentation {
    type Elt: Clone + PartialEq;

    fn rank(&self) -> usize;
    fn basis(&self, m: usize) -> Self::Elt;
    fn multiply(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt;
    /// Writes the element as `sum_m c_m * basis(m)` and returns the
    /// central coefficients, or errors when no unique expression exists.
    fn decompose(&self, a: &Self::Elt) -> Result<Vec<TorusElement>, EngineError>;
    fn coefficient_form(&self) -> &Arc<SkewForm>;
}

/// The trace of left multiplication by `a`: the sum over the basis of the
/// diagonal coefficient of `a * basis(m)`.
pub fn regular_trace<P: FreePresentation>(
    p: &P,
    a: &P::Elt,
) -> Result<TorusElement, EngineError> {
    let mut total = TorusElement::zero(p.coefficient_form());
    for m in 0..p.rank() {
        let product = p.multiply(a, &p.basis(m));
        let coords = p.decompose(&product)?;
        total = total.add_ref(&coords[m]);
    }
    Ok(total)
}

/// The Gram matrix `tr(basis(i) * basis(j))`, asserted symmetric. Rows
/// are computed in parallel.
pub fn trace_matrix<P: FreePresentation + Sync>(
    p: &P,
) -> Result<Vec<Vec<TorusElement>>, EngineError> {
    let n = p.rank();
    let entries: Vec<Vec<TorusElement>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let product = p.multiply(&p.basis(i), &p.basis(j));
                row.push(regular_trace(p, &product)?);
            }
            Ok(row)
        })
        .collect::<Result<_, EngineError>>()?;
    for i in 0..n {
        for j in i + 1..n {
            if entries[i][j] != entries[j][i] {
                return Err(EngineError::Incompatible(format!(
                    "trace matrix is not symmetric at ({i},{j})"
                )));
            }
        }
    }
    Ok(entries)
}

/// Fraction-free determinant of a matrix of pairwise commuting central
/// elements. Bareiss elimination with row swaps is the primary path; on
/// an unexpected division failure the cofactor expansion takes over for
/// ranks below twelve.
pub fn determinant_central(
    entries: &[Vec<TorusElement>],
    safety: u64,
) -> Result<TorusElement, EngineError> {
    let n = entries.len();
    if n == 0 {
        return Err(EngineError::InvalidInput("empty matrix".into()));
    }
    let form = entries[0][0].form().clone();
    for row in entries {
        if row.len() != n {
            return Err(EngineError::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
        for e in row {
            if !e.is_central_support() {
                return Err(EngineError::Incompatible(
                    "determinant entries must be central".into(),
                ));
            }
        }
    }
    match bareiss(entries, &form, safety) {
        Ok(det) => Ok(det),
        Err(err) if n < 12 => {
            let by_cofactor = cofactor_determinant(entries, &form);
            debug_assert!(false, "bareiss failed where cofactor succeeded: {err}");
            Ok(by_cofactor)
        }
        Err(err) => Err(err),
    }
}

fn bareiss(
    entries: &[Vec<TorusElement>],
    form: &Arc<SkewForm>,
    safety: u64,
) -> Result<TorusElement, EngineError> {
    let n = entries.len();
    let mut m: Vec<Vec<TorusElement>> = entries.to_vec();
    let mut sign = false;
    let mut prev = TorusElement::one(form);
    for k in 0..n {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&i| !m[i][k].is_zero());
            match swap {
                Some(i) => {
                    m.swap(k, i);
                    sign = !sign;
                }
                None => return Ok(TorusElement::zero(form)),
            }
        }
        if k + 1 == n {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let numerator = m[k][k]
                    .mul_ref(&m[i][j])
                    .sub_ref(&m[i][k].mul_ref(&m[k][j]));
                m[i][j] = if numerator.is_zero() {
                    TorusElement::zero(form)
                } else {
                    numerator.exact_left_divide(&prev, safety)?
                };
            }
            m[i][k] = TorusElement::zero(form);
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if sign { det.neg_ref() } else { det })
}

fn cofactor_determinant(entries: &[Vec<TorusElement>], form: &Arc<SkewForm>) -> TorusElement {
    let n = entries.len();
    if n == 1 {
        return entries[0][0].clone();
    }
    let mut det = TorusElement::zero(form);
    for j in 0..n {
        if entries[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<TorusElement>> = (1..n)
            .map(|i| {
                (0..n)
                    .filter(|&c| c != j)
                    .map(|c| entries[i][c].clone())
                    .collect()
            })
            .collect();
        let term = entries[0][j].mul_ref(&cofactor_determinant(&minor, form));
        det = if j % 2 == 0 {
            det.add_ref(&term)
        } else {
            det.sub_ref(&term)
        };
    }
    det
}

/// The outcome of a unit comparison: whether the two elements are
/// associates over the center, and the quotient when the division went
/// through.
#[derive(Clone, Debug)]
pub struct UnitComparison {
    pub equal: bool,
    pub quotient: Option<TorusElement>,
}

/// Whether `d` equals `expected` times a central unit: the quotient must
/// be a single monomial whose exponent is an `l`-multiple supported on
/// the inverted directions and whose coefficient has field norm one up to
/// sign.
pub fn compare_up_to_unit(
    d: &TorusElement,
    expected: &TorusElement,
    inverted: &[usize],
    safety: u64,
) -> UnitComparison {
    let quotient = match d.exact_left_divide(expected, safety) {
        Ok(q) => q,
        Err(_) => {
            return UnitComparison {
                equal: false,
                quotient: None,
            }
        }
    };
    let ell = d.form().ell() as i64;
    let equal = match quotient.leading_term() {
        Some((exp, coef)) if quotient.num_terms() == 1 => {
            exp.iter()
                .enumerate()
                .all(|(i, &v)| v == 0 || (v % ell == 0 && inverted.contains(&i)))
                && coef.is_unit()
        }
        _ => false,
    };
    UnitComparison {
        equal,
        quotient: Some(quotient),
    }
}

/// A presentation of a cluster algebra over the central subalgebra of
/// `l`-th powers: the basis is the set of frame monomials with exponents
/// in `[0,l)^N`, and coefficients live in the ambient torus with all
/// exponents divisible by `l`.
pub struct TorusPresentation {
    seed: Seed,
    basis: Vec<TorusElement>,
    by_leading_residue: BTreeMap<Vec<u64>, usize>,
    max_basis_terms: usize,
    safety: u64,
}

impl TorusPresentation {
    /// Builds the presentation from a seed. Fails when the rank would
    /// exceed `max_rank` or when two basis elements share the same
    /// leading exponent residue, which would make the peeling
    /// decomposition ambiguous.
    pub fn new(seed: &Seed, max_rank: usize, safety: u64) -> Result<Self, EngineError> {
        let ell = seed.ell();
        let n = seed.dim();
        let rank = (ell as u128).checked_pow(n as u32).ok_or_else(|| {
            EngineError::InvalidInput("presentation rank overflows".into())
        })?;
        if rank > max_rank as u128 {
            return Err(EngineError::InvalidInput(format!(
                "presentation rank {rank} exceeds the limit {max_rank}"
            )));
        }
        let mut exponents = Vec::with_capacity(rank as usize);
        let mut exponent = vec![0i64; n];
        loop {
            exponents.push(exponent.clone());
            let mut carry = 0;
            while carry < n {
                exponent[carry] += 1;
                if exponent[carry] < ell as i64 {
                    break;
                }
                exponent[carry] = 0;
                carry += 1;
            }
            if carry == n {
                break;
            }
        }
        Self::with_basis_exponents(seed, &exponents, safety)
    }

    /// Builds the presentation from explicit frame exponent vectors. The
    /// list must hit every exponent residue class exactly once, so it
    /// presents the same free module as the canonical box basis, possibly
    /// reordered. Exponents must stay inside `[0, l)` except along
    /// inverted directions, where the variable is a central unit and any
    /// representative of the residue class serves.
    pub fn with_basis_exponents(
        seed: &Seed,
        exponents: &[Vec<i64>],
        safety: u64,
    ) -> Result<Self, EngineError> {
        let ell = seed.ell();
        let n = seed.dim();
        let expected = (ell as u128).checked_pow(n as u32).ok_or_else(|| {
            EngineError::InvalidInput("presentation rank overflows".into())
        })?;
        if exponents.len() as u128 != expected {
            return Err(EngineError::InvalidInput(format!(
                "a free basis needs {expected} exponent vectors, got {}",
                exponents.len()
            )));
        }
        let mut basis = Vec::with_capacity(exponents.len());
        let mut by_leading_residue = BTreeMap::new();
        let mut max_basis_terms = 1;
        for exponent in exponents {
            for (t, &v) in exponent.iter().enumerate() {
                if !seed.inverted().contains(&t) && (v < 0 || v >= ell as i64) {
                    return Err(EngineError::InvalidInput(format!(
                        "basis exponent {v} at direction {} must lie in [0, {ell}) unless the direction is inverted",
                        t + 1
                    )));
                }
            }
            let elt = seed.frame_monomial(exponent)?;
            let (lead, _) = elt
                .leading_term()
                .ok_or_else(|| EngineError::InvalidInput("zero basis element".into()))?;
            let residue: Vec<u64> = lead.iter().map(|&v| v.rem_euclid(ell as i64) as u64).collect();
            if by_leading_residue.insert(residue, basis.len()).is_some() {
                return Err(EngineError::DecompositionFailed(
                    "two basis elements share a leading exponent residue".into(),
                ));
            }
            max_basis_terms = max_basis_terms.max(elt.num_terms());
            basis.push(elt);
        }
        Ok(TorusPresentation {
            seed: seed.clone(),
            basis,
            by_leading_residue,
            max_basis_terms,
            safety,
        })
    }

    pub fn seed(&self) -> &Seed {
        &self.seed
    }
}

impl FreePresentation for TorusPresentation {
    type Elt = TorusElement;

    fn rank(&self) -> usize {
        self.basis.len()
    }

    fn basis(&self, m: usize) -> TorusElement {
        self.basis[m].clone()
    }

    fn multiply(&self, a: &TorusElement, b: &TorusElement) -> TorusElement {
        a.mul_ref(b)
    }

    fn decompose(&self, a: &TorusElement) -> Result<Vec<TorusElement>, EngineError> {
        let form = self.seed.ambient();
        let ell = self.seed.ell() as i64;
        let mut coords = vec![TorusElement::zero(form); self.basis.len()];
        let mut residual = a.clone();
        let budget = (a.num_terms().max(1) as u64)
            * (1 + self.max_basis_terms as u64)
            * self.safety.max(1)
            * 16;
        let mut steps = 0u64;
        while let Some((lead, coef)) = residual.leading_term() {
            steps += 1;
            if steps > budget {
                return Err(EngineError::BudgetExceeded(format!(
                    "decomposition exceeded {budget} peeling steps"
                )));
            }
            let residue: Vec<u64> = lead.iter().map(|&v| v.rem_euclid(ell) as u64).collect();
            let m = *self.by_leading_residue.get(&residue).ok_or_else(|| {
                EngineError::DecompositionFailed(format!(
                    "no basis element matches the exponent {lead:?}"
                ))
            })?;
            let (blead, bcoef) = self.basis[m].leading_term().expect("nonzero basis");
            let f: Vec<i64> = lead.iter().zip(blead).map(|(&u, &h)| u - h).collect();
            let twist = form.pairing(&f, blead) as i64;
            let c = coef
                .mul_ref(&CyclotomicInteger::zeta_power(form.context(), -twist))
                .exact_div(bcoef)
                .ok_or_else(|| {
                    EngineError::DecompositionFailed(
                        "leading coefficient is not divisible".into(),
                    )
                })?;
            let piece = TorusElement::monomial(form, f, c);
            residual = residual.sub_ref(&piece.mul_ref(&self.basis[m]));
            coords[m] = coords[m].add_ref(&piece);
        }
        for c in &coords {
            if !c.terms().keys().all(|g| g.iter().all(|&v| v % ell == 0)) {
                return Err(EngineError::DecompositionFailed(
                    "a coefficient exponent is not divisible by the order".into(),
                ));
            }
            if !c.is_central_support() {
                return Err(EngineError::DecompositionFailed(
                    "a coefficient is not central".into(),
                ));
            }
        }
        Ok(coords)
    }

    fn coefficient_form(&self) -> &Arc<SkewForm> {
        self.seed.ambient()
    }
}

/// Verifies that the seeds form a nerve: pairwise mutation edges connect
/// them, every exchangeable direction is realized by at least one edge,
/// and the edge graph is connected. Seeds equal up to relabeling count as
/// the same vertex.
pub fn verify_nerve(seeds: &[Seed], safety: u64) -> Result<(), EngineError> {
    if seeds.is_empty() {
        return Err(EngineError::NotANerve("no seeds supplied".into()));
    }
    let n = seeds.len();
    let keys: Vec<String> = seeds.iter().map(canonical_key).collect();
    for i in 0..n {
        for j in i + 1..n {
            if keys[i] == keys[j] {
                return Err(EngineError::NotANerve(format!(
                    "seeds {i} and {j} coincide up to relabeling"
                )));
            }
        }
    }
    let ex = seeds[0].exchangeable().to_vec();
    if n == 1 {
        if ex.is_empty() {
            return Ok(());
        }
        return Err(EngineError::NotANerve(
            "a single seed cannot realize any mutation".into(),
        ));
    }

    let mut adjacency = vec![vec![false; n]; n];
    let mut realized: BTreeMap<usize, bool> = ex.iter().map(|&k| (k, false)).collect();
    for (i, seed) in seeds.iter().enumerate() {
        for &k in seed.exchangeable() {
            let neighbor = canonical_key(&seed.mutate(k, safety)?);
            for (j, key) in keys.iter().enumerate() {
                if j != i && *key == neighbor {
                    adjacency[i][j] = true;
                    adjacency[j][i] = true;
                    realized.insert(k, true);
                }
            }
        }
    }
    for (k, seen) in &realized {
        if !seen {
            return Err(EngineError::NotANerve(format!(
                "direction {} is not realized by any edge",
                k + 1
            )));
        }
    }
    let mut visited = vec![false; n];
    let mut stack = vec![0usize];
    visited[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if adjacency[i][j] && !visited[j] {
                visited[j] = true;
                stack.push(j);
            }
        }
    }
    if visited.iter().all(|&v| v) {
        Ok(())
    } else {
        Err(EngineError::NotANerve("the edge graph is disconnected".into()))
    }
}

/// The discriminant of a cluster algebra presentation together with its
/// factorization against the closed form.
#[derive(Clone, Debug)]
pub struct DiscriminantReport {
    /// The determinant of the trace matrix.
    pub discriminant: TorusElement,
    /// The reconstructed closed form: rank power of the order times the
    /// discovered powers of the noninverted frozen variables.
    pub expected: TorusElement,
    /// Whether the discriminant is an associate of the closed form.
    pub verdict: bool,
    /// Per noninverted frozen direction, the variable's exponent in the
    /// factorization.
    pub exponents: Vec<(usize, u64)>,
    /// The central unit relating the two when the verdict holds.
    pub unit: Option<TorusElement>,
}

/// Computes the discriminant of the cluster algebra spanned by the first
/// seed's frame monomials over the `l`-th power subalgebra, then factors
/// it as the rank power of the order times powers of the noninverted
/// frozen variables. The seed list must form a nerve.
pub fn cluster_discriminant(
    seeds: &[Seed],
    max_rank: usize,
    safety: u64,
) -> Result<DiscriminantReport, EngineError> {
    verify_nerve(seeds, safety)?;
    let seed = &seeds[0];
    seed.ensure_coprime()?;

    let presentation = TorusPresentation::new(seed, max_rank, safety)?;
    let gram = trace_matrix(&presentation)?;
    let d = determinant_central(&gram, safety)?;
    factor_discriminant(seed, &d, safety)
}

/// Factors `d` as `l^(N * l^N)` times powers of the noninverted frozen
/// variables times a central unit, reporting what was found.
pub fn factor_discriminant(
    seed: &Seed,
    d: &TorusElement,
    safety: u64,
) -> Result<DiscriminantReport, EngineError> {
    let ell = seed.ell();
    let n = seed.dim();
    let rank_power = order_power(ell, n as u64 * ell.pow(n as u32));

    let frozen: Vec<usize> = (0..n)
        .filter(|i| !seed.exchangeable().contains(i) && !seed.inverted().contains(i))
        .collect();

    let mut report = DiscriminantReport {
        discriminant: d.clone(),
        expected: TorusElement::zero(seed.ambient()),
        verdict: false,
        exponents: Vec::new(),
        unit: None,
    };

    let scalar = TorusElement::monomial(
        seed.ambient(),
        vec![0; n],
        CyclotomicInteger::from_bigint(seed.context(), rank_power.clone()),
    );
    let mut residual = match d.exact_left_divide(&scalar, safety) {
        Ok(q) => q,
        Err(_) => return Ok(report),
    };

    let mut exponents = Vec::new();
    let mut expected = scalar;
    for &i in &frozen {
        let generator = seed.frame()[i].pow(ell);
        if generator.num_terms() == 1 {
            continue;
        }
        let mut count = 0u64;
        while let Ok(q) = residual.exact_left_divide(&generator, safety) {
            residual = q;
            count += 1;
            if count > 4096 {
                return Err(EngineError::BudgetExceeded(
                    "polynomial frozen factor repeats beyond any plausible power".into(),
                ));
            }
        }
        exponents.push((i, ell * count));
        expected = expected.mul_ref(&generator.pow(count));
    }

    if residual.num_terms() != 1 {
        report.expected = expected;
        report.exponents = exponents;
        return Ok(report);
    }

    for &i in &frozen {
        let generator = seed.frame()[i].pow(ell);
        let Some((gexp, _)) = generator.leading_term() else {
            continue;
        };
        if generator.num_terms() != 1 {
            continue;
        }
        let pivots: Vec<usize> = (0..n).filter(|&c| gexp[c] != 0).collect();
        if pivots.len() != 1 {
            return Err(EngineError::InvalidInput(format!(
                "frozen variable {} is a monomial on several coordinates",
                i + 1
            )));
        }
        let pivot = pivots[0];
        let (rexp, _) = residual.leading_term().expect("single monomial");
        let times = rexp[pivot] / gexp[pivot];
        if times < 0 || rexp[pivot] % gexp[pivot] != 0 {
            report.expected = expected;
            report.exponents = exponents;
            return Ok(report);
        }
        let peel = generator.pow(times as u64);
        residual = residual
            .exact_left_divide(&peel, safety)
            .expect("monomial division is exact");
        exponents.push((i, ell * times as u64));
        expected = expected.mul_ref(&peel);
    }

    exponents.sort_unstable();
    let comparison = compare_up_to_unit(d, &expected, seed.inverted(), safety);
    report.expected = expected;
    report.exponents = exponents;
    report.verdict = comparison.equal;
    report.unit = comparison.quotient;
    Ok(report)
}

/// Convenience wrapper for the expected closed form of the pure
/// skew-polynomial case: the rank power of the order times each frozen
/// variable to the power `l^N (l - 1)`.
pub fn skew_poly_expected(seed: &Seed) -> TorusElement {
    let ell = seed.ell();
    let n = seed.dim();
    let rank_power = order_power(ell, n as u64 * ell.pow(n as u32));
    let exponent = (ell as i64).pow(n as u32) * (ell as i64 - 1);
    let mut out = TorusElement::monomial(
        seed.ambient(),
        vec![0; n],
        CyclotomicInteger::from_bigint(seed.context(), rank_power),
    );
    for i in 0..n {
        if seed.exchangeable().contains(&i) || seed.inverted().contains(&i) {
            continue;
        }
        out = out.mul_ref(&seed.frame()[i].pow(ell).pow(exponent as u64 / ell));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    fn monomial(seed: &Seed, exp: Vec<i64>, coef: i64) -> TorusElement {
        TorusElement::monomial(
            seed.ambient(),
            exp,
            CyclotomicInteger::from_int(seed.context(), coef),
        )
    }

    #[test]
    fn trace_projects_onto_multiples_of_the_order() {
        for (n, ell) in [(1usize, 3u64), (2, 3)] {
            let seed = samples::skew_poly(ell, n).unwrap();
            let p = TorusPresentation::new(&seed, 512, 4).unwrap();
            let rank = (ell as i64).pow(n as u32);
            for m in 0..p.rank() {
                let b = p.basis(m);
                let tr = regular_trace(&p, &b).unwrap();
                let (lead, _) = b.leading_term().unwrap();
                if lead.iter().all(|&v| v % ell as i64 == 0) {
                    assert_eq!(tr, b.scale(&CyclotomicInteger::from_int(seed.context(), rank)));
                } else {
                    assert!(tr.is_zero());
                }
            }
        }
    }

    #[test]
    fn trace_of_one_is_the_rank() {
        let seed = samples::skew_poly(5, 1).unwrap();
        let p = TorusPresentation::new(&seed, 512, 4).unwrap();
        let one = TorusElement::one(seed.ambient());
        assert_eq!(regular_trace(&p, &one).unwrap(), monomial(&seed, vec![0], 5));
    }

    #[test]
    fn trace_is_symmetric_on_random_pairs() {
        use rand::{Rng, SeedableRng};
        let seed = samples::skew_poly(3, 2).unwrap();
        let p = TorusPresentation::new(&seed, 512, 4).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..10 {
            let pick = |rng: &mut rand_chacha::ChaCha8Rng| {
                let exp: Vec<i64> = (0..2).map(|_| rng.gen_range(0..6)).collect();
                let c = rng.gen_range(-3i64..=3);
                monomial(&seed, exp, c)
            };
            let a = pick(&mut rng).add_ref(&pick(&mut rng));
            let b = pick(&mut rng);
            let ab = regular_trace(&p, &a.mul_ref(&b)).unwrap();
            let ba = regular_trace(&p, &b.mul_ref(&a)).unwrap();
            assert_eq!(ab, ba);
        }
    }

    #[test]
    fn the_rank_three_gram_matrix_is_the_known_one() {
        let seed = samples::skew_poly(3, 1).unwrap();
        let p = TorusPresentation::new(&seed, 512, 4).unwrap();
        let gram = trace_matrix(&p).unwrap();
        let z = TorusElement::zero(seed.ambient());
        let expected = vec![
            vec![monomial(&seed, vec![0], 3), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), monomial(&seed, vec![3], 3)],
            vec![z.clone(), monomial(&seed, vec![3], 3), z.clone()],
        ];
        assert_eq!(gram, expected);

        let det = determinant_central(&gram, 4).unwrap();
        assert_eq!(det, monomial(&seed, vec![6], -27));
    }

    #[test]
    fn nine_by_nine_gram_nonzeros_follow_the_congruence() {
        let seed = samples::skew_poly(3, 2).unwrap();
        let p = TorusPresentation::new(&seed, 512, 4).unwrap();
        let gram = trace_matrix(&p).unwrap();
        for i in 0..9 {
            let ei = p.basis(i).leading_term().unwrap().0.clone();
            for j in 0..9 {
                let ej = p.basis(j).leading_term().unwrap().0.clone();
                let zero_sum = ei.iter().zip(&ej).all(|(&a, &b)| (a + b) % 3 == 0);
                assert_eq!(!gram[i][j].is_zero(), zero_sum, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn bareiss_agrees_with_cofactor_on_random_central_matrices() {
        use rand::{Rng, SeedableRng};
        let seed = samples::skew_poly(3, 1).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let entries: Vec<Vec<TorusElement>> = (0..4)
                .map(|_| {
                    (0..4)
                        .map(|_| {
                            let e = 3 * rng.gen_range(0..3i64);
                            monomial(&seed, vec![e], rng.gen_range(-2i64..=2))
                        })
                        .collect()
                })
                .collect();
            let fast = bareiss(&entries, seed.ambient(), 4).unwrap();
            let slow = cofactor_determinant(&entries, seed.ambient());
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn diagonal_determinants_multiply_out() {
        let seed = samples::skew_poly(5, 1).unwrap();
        let z = TorusElement::zero(seed.ambient());
        let entries = vec![
            vec![monomial(&seed, vec![0], 2), z.clone()],
            vec![z.clone(), monomial(&seed, vec![5], 3)],
        ];
        let det = determinant_central(&entries, 4).unwrap();
        assert_eq!(det, monomial(&seed, vec![5], 6));
    }

    #[test]
    fn unit_comparison_accepts_unit_multiples_only() {
        let seed = samples::skew_poly(3, 1).unwrap();
        let d = monomial(&seed, vec![6], 27);
        assert!(compare_up_to_unit(&d, &d, &[], 4).equal);

        let zeta_twisted = d.scale_zeta(2).neg_ref();
        assert!(compare_up_to_unit(&zeta_twisted, &d, &[], 4).equal);

        let doubled = d.scale(&CyclotomicInteger::from_int(seed.context(), 2));
        assert!(!compare_up_to_unit(&doubled, &d, &[], 4).equal);

        let shifted = d.mul_ref(&monomial(&seed, vec![3], 1));
        assert!(!compare_up_to_unit(&shifted, &d, &[], 4).equal);
        assert!(compare_up_to_unit(&shifted, &d, &[0], 4).equal);
    }

    #[test]
    fn skew_poly_discriminants_match_the_closed_form() {
        for (n, ell, coeff, exp) in [
            (1usize, 3u64, 27i64, 6u64),
            (1, 5, 3125, 20),
            (2, 3, 387420489, 18),
        ] {
            let seed = samples::skew_poly(ell, n).unwrap();
            let report = cluster_discriminant(&[seed.clone()], 512, 4).unwrap();
            assert!(report.verdict, "({n},{ell})");
            assert_eq!(
                report.exponents,
                (0..n).map(|i| (i, exp)).collect::<Vec<_>>()
            );
            let mut closed = monomial(&seed, vec![0; n], coeff);
            for i in 0..n {
                let mut e = vec![0i64; n];
                e[i] = exp as i64;
                closed = closed.mul_ref(&monomial(&seed, e, 1));
            }
            assert!(compare_up_to_unit(&report.discriminant, &closed, &[], 4).equal);
            assert_eq!(report.expected, skew_poly_expected(&seed));
        }
    }

    #[test]
    fn basis_reordering_moves_the_discriminant_by_a_unit_only() {
        let seed = samples::skew_poly(3, 1).unwrap();
        let p = TorusPresentation::new(&seed, 512, 4).unwrap();
        let gram = trace_matrix(&p).unwrap();
        let d = determinant_central(&gram, 4).unwrap();

        let order = [2usize, 0, 1];
        let permuted: Vec<Vec<TorusElement>> = order
            .iter()
            .map(|&i| order.iter().map(|&j| gram[i][j].clone()).collect())
            .collect();
        let d2 = determinant_central(&permuted, 4).unwrap();
        assert!(compare_up_to_unit(&d2, &d, &[], 4).equal);

        let scaled: Vec<Vec<TorusElement>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| {
                        let mut e = gram[i][j].clone();
                        if i == 1 {
                            e = e.scale_zeta(1);
                        }
                        if j == 1 {
                            e = e.scale_zeta(1);
                        }
                        e
                    })
                    .collect()
            })
            .collect();
        let d3 = determinant_central(&scaled, 4).unwrap();
        assert!(compare_up_to_unit(&d3, &d, &[], 4).equal);
    }

    #[test]
    fn explicit_basis_exponents_accept_residue_transversals_only() {
        let seed = samples::skew_poly(3, 1).unwrap();
        let canonical = TorusPresentation::new(&seed, 512, 4).unwrap();
        let permuted =
            TorusPresentation::with_basis_exponents(&seed, &[vec![2], vec![0], vec![1]], 4)
                .unwrap();
        let d = determinant_central(&trace_matrix(&canonical).unwrap(), 4).unwrap();
        let d2 = determinant_central(&trace_matrix(&permuted).unwrap(), 4).unwrap();
        assert!(compare_up_to_unit(&d2, &d, &[], 4).equal);

        assert!(TorusPresentation::with_basis_exponents(&seed, &[vec![0], vec![1]], 4).is_err());
        assert!(
            TorusPresentation::with_basis_exponents(&seed, &[vec![0], vec![1], vec![5]], 4)
                .is_err()
        );
        assert!(
            TorusPresentation::with_basis_exponents(&seed, &[vec![0], vec![1], vec![1]], 4)
                .is_err()
        );
    }

    #[test]
    fn decomposition_round_trips_and_splits_exponents() {
        let seed = samples::skew_poly(3, 1).unwrap();
        let p = TorusPresentation::new(&seed, 512, 4).unwrap();

        let coords = p.decompose(&p.basis(2)).unwrap();
        assert!(coords[2].is_one());
        assert!(coords[0].is_zero() && coords[1].is_zero());

        let x4 = monomial(&seed, vec![4], 1);
        let coords = p.decompose(&x4).unwrap();
        assert_eq!(coords[1], monomial(&seed, vec![3], 1));

        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let elt = monomial(&seed, vec![rng.gen_range(-6i64..=6)], rng.gen_range(-4i64..=4))
                .add_ref(&monomial(&seed, vec![rng.gen_range(-6i64..=6)], rng.gen_range(-4..=4)));
            let coords = p.decompose(&elt).unwrap();
            let mut back = TorusElement::zero(seed.ambient());
            for (m, c) in coords.iter().enumerate() {
                back = back.add_ref(&c.mul_ref(&p.basis(m)));
            }
            assert_eq!(back, elt);
        }
    }

    #[test]
    fn nerve_verification_accepts_and_rejects_correctly() {
        let solitary = samples::skew_poly(3, 1).unwrap();
        assert!(verify_nerve(&[solitary], 4).is_ok());

        let a2 = samples::a2(5).unwrap();
        assert!(matches!(
            verify_nerve(&[a2.clone()], 4),
            Err(EngineError::NotANerve(_))
        ));

        let m0 = a2.mutate(0, 4).unwrap();
        assert!(matches!(
            verify_nerve(&[a2.clone(), m0.clone()], 4),
            Err(EngineError::NotANerve(_))
        ));

        let m1 = a2.mutate(1, 4).unwrap();
        assert!(verify_nerve(&[a2.clone(), m0.clone(), m1], 4).is_ok());

        let far = m0.mutate(1, 4).unwrap().mutate(0, 4).unwrap();
        assert!(matches!(
            verify_nerve(&[a2, far], 4),
            Err(EngineError::NotANerve(_))
        ));
    }
}
