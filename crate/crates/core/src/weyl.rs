//! The quantized Weyl algebra as a rewriting system with a fixed normal
//! form, together with its cluster seed and its discriminant over the
//! subalgebra of `l`-th powers.
//!
//! The algebra has generators `x_1..x_n` and `w_1..w_n` over the
//! cyclotomic integers of odd order `l`, with `e` denoting the square of
//! the root. The generators obey
//!
//! ```text
//! w_i w_j = e^{a_ij} w_j w_i
//! x_i x_j = e^{1+a_ij} x_j x_i            (i < j)
//! x_i w_j = e^{-a_ij}  w_j x_i            (i < j)
//! x_i w_j = e^{1-a_ij} w_j x_i            (i > j)
//! x_j w_j = (e-1) + e w_j x_j + (e-1) (w_1 x_1 + .. + w_{j-1} x_{j-1})
//! ```
//!
//! for a skew-symmetric integer parameter matrix `a`. Every product
//! rewrites to a combination of ordered monomials `x^a w^b`, and the
//! straightening rules strictly decrease the weight of the unordered
//! pairs, so normalization terminates.
//!
//! The frozen cluster variables are the scaled commutation defects
//! `z_i = (-1)^i (1 + w_1 x_1 + .. + w_i x_i)`. The seed construction
//! measures the commutation matrix directly from products in the algebra
//! rather than trusting a closed block formula for it; the block formula
//! is assembled anyway and the disagreement is reported, since it gives
//! a zero entry where the algebra visibly twists by `e`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cyclotomic::{CyclotomicInteger, RootContext};
use crate::discriminant::{
    compare_up_to_unit, determinant_central, order_power, trace_matrix, DiscriminantReport,
    FreePresentation,
};
use crate::error::EngineError;
use crate::seeds::{ExchangeMatrix, Seed};
use crate::torus::{SkewForm, TorusElement};

/// An element in normal form: a finite sum of ordered monomials
/// `x_1^{a_1}..x_n^{a_n} w_1^{b_1}..w_n^{b_n}` with cyclotomic integer
/// coefficients. Keys store the `x` exponents followed by the `w`
/// exponents; zero coefficients are never kept.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylElement {
    terms: BTreeMap<Vec<u64>, CyclotomicInteger>,
}

impl WeylElement {
    fn zero() -> Self {
        WeylElement {
            terms: BTreeMap::new(),
        }
    }

    fn insert(&mut self, key: Vec<u64>, c: CyclotomicInteger) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u64>, &CyclotomicInteger)> {
        self.terms.iter()
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (key, c) in &other.terms {
            out.insert(key.clone(), c.clone());
        }
        out
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (key, c) in &other.terms {
            out.insert(key.clone(), -c);
        }
        out
    }

    pub fn neg_ref(&self) -> Self {
        let mut out = WeylElement::zero();
        for (key, c) in &self.terms {
            out.insert(key.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &CyclotomicInteger) -> Self {
        let mut out = WeylElement::zero();
        if c.is_zero() {
            return out;
        }
        for (key, existing) in &self.terms {
            out.insert(key.clone(), existing * c);
        }
        out
    }
}

impl std::fmt::Display for WeylElement {
    /// Renders as `(<coefficient>)*xw^[a|b]` terms joined by ` + `, in
    /// ascending order of exponent keys. Zero renders as `0`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (key, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let n = key.len() / 2;
            let xs: Vec<String> = key[..n].iter().map(|v| v.to_string()).collect();
            let ws: Vec<String> = key[n..].iter().map(|v| v.to_string()).collect();
            write!(f, "({c})*xw^[{}|{}]", xs.join(","), ws.join(","))?;
        }
        Ok(())
    }
}

/// The validation record produced alongside the seed: the commutation
/// matrix measured from the algebra, the closed block formula it is
/// usually summarized as, whether the two agree modulo `l`, and the
/// exchange partner of each direction verified against the two-term
/// exchange sum inside the algebra.
#[derive(Clone, Debug)]
pub struct WeylSeedReport {
    pub lambda_observed: Vec<Vec<u64>>,
    pub lambda_block_formula: Vec<Vec<i64>>,
    pub block_formula_matches: bool,
    pub diagonal: Vec<u64>,
    pub coprime: bool,
    pub mutated: Vec<WeylElement>,
}

/// The quantized Weyl algebra on `2n` generators over the cyclotomic
/// integers of odd order `l`, with an optional skew-symmetric parameter
/// matrix. Elements are kept in normal form by the multiplication
/// routines; the coefficient form is the commutative torus that houses
/// central coefficients in the generators `x_i^l` and `w_i^l`.
pub struct WeylPresentation {
    n: usize,
    q: Vec<Vec<i64>>,
    ctx: Arc<RootContext>,
    coeff_form: Arc<SkewForm>,
}

impl WeylPresentation {
    /// Builds the presentation. The order must be odd and at least
    /// three, so that the square of the root is again a primitive root
    /// of the same order; the parameter matrix defaults to zero and must
    /// be skew-symmetric.
    pub fn new(ell: u64, n: usize, q: Option<Vec<Vec<i64>>>) -> Result<Self, EngineError> {
        if ell < 3 || ell % 2 == 0 {
            return Err(EngineError::InvalidInput(format!(
                "the presentation needs an odd order of at least three, got {ell}"
            )));
        }
        if n == 0 {
            return Err(EngineError::InvalidInput(
                "the presentation needs at least one generator pair".into(),
            ));
        }
        let q = q.unwrap_or_else(|| vec![vec![0; n]; n]);
        if q.len() != n {
            return Err(EngineError::DimensionMismatch {
                expected: n,
                got: q.len(),
            });
        }
        for (i, row) in q.iter().enumerate() {
            if row.len() != n {
                return Err(EngineError::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v != -q[j][i] {
                    return Err(EngineError::InvalidInput(format!(
                        "the parameter matrix is not skew-symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let ctx = RootContext::new(ell)?;
        let coeff_form = SkewForm::zero(&ctx, 2 * n);
        Ok(WeylPresentation {
            n,
            q,
            ctx,
            coeff_form,
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn ell(&self) -> u64 {
        self.ctx.ell()
    }

    pub fn context(&self) -> &Arc<RootContext> {
        &self.ctx
    }

    fn epsilon_power(&self, k: i64) -> CyclotomicInteger {
        CyclotomicInteger::zeta_power(&self.ctx, 2 * k)
    }

    /// `e - 1`, the scalar relating the two common generator choices.
    fn epsilon_minus_one(&self) -> CyclotomicInteger {
        &self.epsilon_power(1) - &CyclotomicInteger::one(&self.ctx)
    }

    pub fn one(&self) -> WeylElement {
        let mut out = WeylElement::zero();
        out.insert(vec![0; 2 * self.n], CyclotomicInteger::one(&self.ctx));
        out
    }

    /// The generator `x_i`, zero-based.
    pub fn x(&self, i: usize) -> WeylElement {
        assert!(i < self.n, "generator index out of range");
        let mut key = vec![0; 2 * self.n];
        key[i] = 1;
        let mut out = WeylElement::zero();
        out.insert(key, CyclotomicInteger::one(&self.ctx));
        out
    }

    /// The generator `w_i`, zero-based.
    pub fn w(&self, i: usize) -> WeylElement {
        assert!(i < self.n, "generator index out of range");
        let mut key = vec![0; 2 * self.n];
        key[self.n + i] = 1;
        let mut out = WeylElement::zero();
        out.insert(key, CyclotomicInteger::one(&self.ctx));
        out
    }

    /// Right multiplication of a single normal monomial by `w_j`: the new
    /// factor slides left past the tail of the `w` block, twisting by
    /// `e^{a_ij}` for each unit it crosses.
    fn monomial_times_w(&self, key: &[u64], j: usize) -> (Vec<u64>, CyclotomicInteger) {
        let n = self.n;
        let mut twist: i64 = 0;
        for i in j + 1..n {
            twist += key[n + i] as i64 * self.q[i][j];
        }
        let mut out = key.to_vec();
        out[n + j] += 1;
        (out, self.epsilon_power(twist))
    }

    fn times_w(&self, elt: &WeylElement, j: usize) -> WeylElement {
        let mut out = WeylElement::zero();
        for (key, c) in &elt.terms {
            let (new_key, scalar) = self.monomial_times_w(key, j);
            out.insert(new_key, c * &scalar);
        }
        out
    }

    /// Right multiplication of a single normal monomial by `x_j`. When
    /// the `w` block is empty the factor slides into the `x` block with a
    /// scalar twist; otherwise it crosses the last `w` factor by one of
    /// the straightening rules and recurses. Each recursion either
    /// shortens the `w` block or replaces its last factor by a strictly
    /// earlier one, so the weight of the block strictly decreases.
    fn monomial_times_x(&self, key: &[u64], j: usize) -> WeylElement {
        let n = self.n;
        let last_w = (0..n).rev().find(|&i| key[n + i] > 0);
        let mut out = WeylElement::zero();
        match last_w {
            None => {
                let mut twist: i64 = 0;
                for i in j + 1..n {
                    twist += key[i] as i64 * (self.q[i][j] - 1);
                }
                let mut new_key = key.to_vec();
                new_key[j] += 1;
                out.insert(new_key, self.epsilon_power(twist));
            }
            Some(m) if m != j => {
                let mut trimmed = key.to_vec();
                trimmed[n + m] -= 1;
                let c = if j < m {
                    self.q[j][m]
                } else {
                    self.q[j][m] - 1
                };
                let pushed = self.monomial_times_x(&trimmed, j);
                out = self.times_w(&pushed, m).scale(&self.epsilon_power(c));
            }
            Some(_) => {
                let mut trimmed = key.to_vec();
                trimmed[n + j] -= 1;
                let inv = self.epsilon_power(-1);
                let defect = &inv * &self.epsilon_minus_one();

                let pushed = self.monomial_times_x(&trimmed, j);
                out = self.times_w(&pushed, j).scale(&inv);

                let mut dropped = WeylElement::zero();
                dropped.insert(trimmed.clone(), defect.clone());
                out = out.sub_ref(&dropped);

                for r in 0..j {
                    let mut appended = WeylElement::zero();
                    let (wkey, wscalar) = self.monomial_times_w(&trimmed, r);
                    appended.insert(wkey, wscalar);
                    let lowered = self.times_x(&appended, r).scale(&defect);
                    out = out.sub_ref(&lowered);
                }
            }
        }
        out
    }

    fn times_x(&self, elt: &WeylElement, j: usize) -> WeylElement {
        let mut out = WeylElement::zero();
        for (key, c) in &elt.terms {
            let piece = self.monomial_times_x(key, j);
            for (new_key, scalar) in piece.terms {
                out.insert(new_key, &scalar * c);
            }
        }
        out
    }

    /// The normal form of the product, built by appending the right
    /// factor one generator at a time.
    pub fn multiply(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        let n = self.n;
        let mut out = WeylElement::zero();
        for (key, c) in &b.terms {
            let mut partial = a.scale(c);
            for j in 0..n {
                for _ in 0..key[j] {
                    partial = self.times_x(&partial, j);
                }
            }
            for j in 0..n {
                for _ in 0..key[n + j] {
                    partial = self.times_w(&partial, j);
                }
            }
            out = out.add_ref(&partial);
        }
        out
    }

    pub fn power(&self, a: &WeylElement, exp: u64) -> WeylElement {
        let mut out = self.one();
        for _ in 0..exp {
            out = self.multiply(&out, a);
        }
        out
    }

    /// The frozen cluster variable `z_i`, zero-based: the signed
    /// commutation defect `(-1)^{i+1} (1 + w_1 x_1 + .. + w_{i+1} x_{i+1})`
    /// in normal form.
    pub fn central_z(&self, i: usize) -> WeylElement {
        assert!(i < self.n, "index out of range");
        let mut sum = self.one();
        for r in 0..=i {
            sum = sum.add_ref(&self.times_x(&self.w(r), r));
        }
        let sign = if i % 2 == 0 { -1 } else { 1 };
        sum.scale(&CyclotomicInteger::from_int(&self.ctx, sign))
    }

    /// The residue `t` with `u v = e^t v u` when the two elements
    /// quasi-commute, or an error when they do not.
    pub fn commutation_residue(
        &self,
        u: &WeylElement,
        v: &WeylElement,
    ) -> Result<u64, EngineError> {
        let uv = self.multiply(u, v);
        let vu = self.multiply(v, u);
        if uv.is_zero() && vu.is_zero() {
            return Ok(0);
        }
        let (key, c1) = match uv.terms.iter().next() {
            Some(pair) => pair,
            None => {
                return Err(EngineError::Incompatible(
                    "the products differ in support".into(),
                ))
            }
        };
        let c2 = vu.terms.get(key).ok_or_else(|| {
            EngineError::Incompatible("the products differ in support".into())
        })?;
        let ratio = c1.exact_div(c2).ok_or_else(|| {
            EngineError::Incompatible("the coefficient ratio is not integral".into())
        })?;
        if uv != vu.scale(&ratio) {
            return Err(EngineError::Incompatible(
                "the elements do not quasi-commute".into(),
            ));
        }
        for t in 0..self.ell() {
            if ratio == self.epsilon_power(t as i64) {
                return Ok(t);
            }
        }
        Err(EngineError::Incompatible(
            "the commutation scalar is not a power of the squared root".into(),
        ))
    }

    /// The frame elements of the cluster seed. Writing `r` for the root
    /// of order `l` with `r^2 = e`, direction `i` carries
    /// `(-1)^{i+1} r x_i` and frozen direction `n+i` carries
    /// `r^{i+1} z_i`. The root powers on the frozen part are forced by
    /// the two-term exchange sums, which the seed constructor verifies.
    pub fn frame_elements(&self) -> Vec<WeylElement> {
        let n = self.n;
        let mut frames = Vec::with_capacity(2 * n);
        for i in 0..n {
            let sign = if i % 2 == 0 { -1 } else { 1 };
            let root = CyclotomicInteger::zeta_power(&self.ctx, 1);
            let scaled = &CyclotomicInteger::from_int(&self.ctx, sign) * &root;
            frames.push(self.x(i).scale(&scaled));
        }
        for i in 0..n {
            let c = CyclotomicInteger::zeta_power(&self.ctx, i as i64 + 1);
            frames.push(self.central_z(i).scale(&c));
        }
        frames
    }

    /// The closed block formula for the commutation matrix, assembled
    /// from the relation exponents. Kept for comparison only: its mixed
    /// block has a zero diagonal, while the measured commutations twist
    /// by `e` there.
    fn block_formula_lambda(&self) -> Vec<Vec<i64>> {
        let n = self.n;
        let mut lambda = vec![vec![0i64; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                if i < j {
                    lambda[i][j] = self.q[i][j] + 1;
                } else if i > j {
                    lambda[i][j] = -self.q[j][i] - 1;
                }
                let r = if i < j {
                    1
                } else if i > j {
                    self.q[j][i]
                } else {
                    0
                };
                lambda[i][n + j] = -r;
                lambda[n + i][j] = r;
            }
        }
        lambda
    }

    /// Builds the cluster seed and its validation record.
    ///
    /// The commutation matrix is measured from pairwise products of the
    /// frame elements, the exchange matrix stacks the unit and negated
    /// shift pattern under a zero block, and for every exchangeable
    /// direction the scaled generator `w_k` is verified to satisfy the
    /// two-term exchange sum inside the algebra.
    pub fn seed(&self) -> Result<(Seed, WeylSeedReport), EngineError> {
        let n = self.n;
        let ell = self.ell();
        let frames = self.frame_elements();

        let mut residues = vec![vec![0u64; 2 * n]; 2 * n];
        for i in 0..2 * n {
            for j in i + 1..2 * n {
                let t = self.commutation_residue(&frames[i], &frames[j])?;
                residues[i][j] = t;
                residues[j][i] = (ell - t) % ell;
            }
        }
        let lambda = SkewForm::from_residues(&self.ctx, residues.clone())?;

        let mut entries = vec![vec![0i64; n]; 2 * n];
        for k in 0..n {
            entries[n + k][k] = 1;
            if k > 0 {
                entries[n + k - 1][k] = -1;
            }
        }
        let btilde = ExchangeMatrix::new(2 * n, (0..n).collect(), entries)?;
        let seed = Seed::standard(&lambda, btilde, vec![])?;

        let mut mutated = Vec::with_capacity(n);
        for k in 0..n {
            let plus = &frames[n + k];
            let minus = if k > 0 {
                frames[n + k - 1].clone()
            } else {
                self.one()
            };
            let twist_plus = residues[k][n + k] as i64;
            let twist_minus = if k > 0 { residues[k][n + k - 1] as i64 } else { 0 };
            let rhs = plus
                .scale(&CyclotomicInteger::zeta_power(&self.ctx, twist_plus))
                .add_ref(&minus.scale(&CyclotomicInteger::zeta_power(&self.ctx, twist_minus)));
            let partner = self
                .w(k)
                .scale(&CyclotomicInteger::zeta_power(&self.ctx, k as i64 - 1));
            if self.multiply(&frames[k], &partner) != rhs {
                return Err(EngineError::Incompatible(format!(
                    "direction {k} has no exchange partner proportional to w"
                )));
            }
            mutated.push(partner);
        }

        let block = self.block_formula_lambda();
        let matches = (0..2 * n).all(|i| {
            (0..2 * n).all(|j| block[i][j].rem_euclid(ell as i64) as u64 == residues[i][j])
        });
        let report = WeylSeedReport {
            lambda_observed: residues,
            lambda_block_formula: block,
            block_formula_matches: matches,
            diagonal: seed.compatibility().diagonal.clone(),
            coprime: seed.compatibility().coprime,
            mutated,
        };
        Ok((seed, report))
    }

    fn checked_rank(&self, max_rank: usize) -> Result<usize, EngineError> {
        let rank = (self.ell() as u128)
            .checked_pow(2 * self.n as u32)
            .ok_or_else(|| EngineError::InvalidInput("presentation rank overflows".into()))?;
        if rank > max_rank as u128 {
            return Err(EngineError::InvalidInput(format!(
                "presentation rank {rank} exceeds the limit {max_rank}"
            )));
        }
        Ok(rank as usize)
    }

    /// The discriminant over the subalgebra generated by `x_i^l` and
    /// `w_i^l`, compared against `l^{2n l^{2n}}` times the frozen
    /// variables to the power `(l-1) l^{2n}`. The closed form is the one
    /// forced by the associated graded algebra, the skew-polynomial
    /// algebra on `2n` generators: its scalar is the order raised to the
    /// generator count times the rank, and each generator carries the
    /// exponent `(l-1) l^{2n}`, so the filtration argument gives each
    /// defect `z_i` the same exponent. The frozen exponents are
    /// discovered by repeated division and reported per direction.
    pub fn discriminant(
        &self,
        max_rank: usize,
        safety: u64,
    ) -> Result<DiscriminantReport, EngineError> {
        let n = self.n;
        let ell = self.ell();
        let rank = self.checked_rank(max_rank)?;

        let gram = trace_matrix(self)?;
        let d = determinant_central(&gram, safety)?;
        if d.is_zero() {
            return Err(EngineError::DecompositionFailed(
                "the trace matrix is singular".into(),
            ));
        }

        let scalar_exponent = 2 * n as u64 * rank as u64;
        let scalar = TorusElement::monomial(
            &self.coeff_form,
            vec![0; 2 * n],
            CyclotomicInteger::from_bigint(&self.ctx, order_power(ell, scalar_exponent)),
        );

        let mut frozen_powers = Vec::with_capacity(n);
        for i in 0..n {
            let zl = self.power(&self.central_z(i), ell);
            let coords = self.decompose(&zl)?;
            for (m, c) in coords.iter().enumerate() {
                if m != 0 && !c.is_zero() {
                    return Err(EngineError::Incompatible(format!(
                        "the l-th power of z_{i} is not central"
                    )));
                }
            }
            frozen_powers.push(coords[0].clone());
        }

        let closed_exponent = (ell - 1) * ell.pow(2 * n as u32 - 1);
        let mut expected = scalar.clone();
        for zl in &frozen_powers {
            expected = expected.mul_ref(&zl.pow(closed_exponent));
        }

        let mut verdict = true;
        let mut exponents = Vec::with_capacity(n);
        let mut residual = match d.exact_left_divide(&scalar, safety) {
            Ok(r) => r,
            Err(_) => {
                verdict = false;
                d.clone()
            }
        };
        for (i, zl) in frozen_powers.iter().enumerate() {
            let mut count = 0u64;
            while let Ok(next) = residual.exact_left_divide(zl, safety) {
                residual = next;
                count += 1;
                if count > 4096 {
                    return Err(EngineError::BudgetExceeded(
                        "frozen factor division does not terminate".into(),
                    ));
                }
            }
            exponents.push((n + i, ell * count));
        }
        let comparison = compare_up_to_unit(&d, &expected, &[], safety);
        verdict = verdict && comparison.equal;

        Ok(DiscriminantReport {
            discriminant: d,
            expected,
            verdict,
            exponents,
            unit: comparison.quotient.filter(|_| comparison.equal),
        })
    }
}

impl FreePresentation for WeylPresentation {
    type Elt = WeylElement;

    fn rank(&self) -> usize {
        (self.ell() as usize).pow(2 * self.n as u32)
    }

    fn basis(&self, m: usize) -> WeylElement {
        let ell = self.ell() as usize;
        let mut key = vec![0u64; 2 * self.n];
        let mut rest = m;
        for slot in key.iter_mut() {
            *slot = (rest % ell) as u64;
            rest /= ell;
        }
        let mut out = WeylElement::zero();
        out.insert(key, CyclotomicInteger::one(&self.ctx));
        out
    }

    fn multiply(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        WeylPresentation::multiply(self, a, b)
    }

    /// Splits every monomial as a central part with exponents divisible
    /// by `l` times a basis monomial with reduced exponents. The split is
    /// exact because the `l`-th powers of the generators are central, so
    /// no twist arises when they are pulled to the front.
    fn decompose(&self, a: &WeylElement) -> Result<Vec<TorusElement>, EngineError> {
        let ell = self.ell();
        let mut out = vec![TorusElement::zero(&self.coeff_form); self.rank()];
        for (key, c) in &a.terms {
            let mut slot = 0usize;
            let mut stride = 1usize;
            let mut central = vec![0i64; 2 * self.n];
            for (t, &v) in key.iter().enumerate() {
                slot += (v % ell) as usize * stride;
                stride *= ell as usize;
                central[t] = (v / ell) as i64;
            }
            let piece = TorusElement::monomial(&self.coeff_form, central, c.clone());
            out[slot] = out[slot].add_ref(&piece);
        }
        Ok(out)
    }

    fn coefficient_form(&self) -> &Arc<SkewForm> {
        &self.coeff_form
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::central;
    use crate::discriminant::regular_trace;
    use crate::exchange_graph::{explore, GraphLimits};
    use crate::torus::DEFAULT_DIVISION_SAFETY;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample_q() -> Vec<Vec<i64>> {
        vec![vec![0, 1], vec![-1, 0]]
    }

    fn eps(p: &WeylPresentation, k: i64) -> CyclotomicInteger {
        CyclotomicInteger::zeta_power(p.context(), 2 * k)
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(WeylPresentation::new(4, 1, None).is_err());
        assert!(WeylPresentation::new(1, 1, None).is_err());
        assert!(WeylPresentation::new(3, 0, None).is_err());
        assert!(WeylPresentation::new(3, 2, Some(vec![vec![0, 1], vec![1, 0]])).is_err());
        assert!(WeylPresentation::new(3, 2, Some(sample_q())).is_ok());
    }

    #[test]
    fn defining_relations_hold_in_normal_form() {
        let p = WeylPresentation::new(5, 2, Some(sample_q())).unwrap();
        let one = p.one();
        let em1 = &eps(&p, 1) - &CyclotomicInteger::one(p.context());

        for j in 0..2 {
            let mut rhs = one.scale(&em1);
            rhs = rhs.add_ref(&p.multiply(&p.w(j), &p.x(j)).scale(&eps(&p, 1)));
            for r in 0..j {
                rhs = rhs.add_ref(&p.multiply(&p.w(r), &p.x(r)).scale(&em1));
            }
            assert_eq!(p.multiply(&p.x(j), &p.w(j)), rhs);
        }

        let a01 = sample_q()[0][1];
        assert_eq!(
            p.multiply(&p.x(0), &p.x(1)),
            p.multiply(&p.x(1), &p.x(0)).scale(&eps(&p, 1 + a01))
        );
        assert_eq!(
            p.multiply(&p.w(0), &p.w(1)),
            p.multiply(&p.w(1), &p.w(0)).scale(&eps(&p, a01))
        );
        assert_eq!(
            p.multiply(&p.x(0), &p.w(1)),
            p.multiply(&p.w(1), &p.x(0)).scale(&eps(&p, -a01))
        );
        assert_eq!(
            p.multiply(&p.x(1), &p.w(0)),
            p.multiply(&p.w(0), &p.x(1)).scale(&eps(&p, 1 + a01))
        );
    }

    #[test]
    fn one_is_neutral_and_multiplication_is_associative() {
        let p = WeylPresentation::new(3, 2, Some(sample_q())).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        let gens: Vec<WeylElement> = (0..2).map(|i| p.x(i)).chain((0..2).map(|i| p.w(i))).collect();

        for _ in 0..40 {
            let pick = |rng: &mut ChaCha8Rng| {
                let g = gens[rng.gen_range(0..gens.len())].clone();
                let coeffs: Vec<num_bigint::BigInt> = (0..2)
                    .map(|_| num_bigint::BigInt::from(rng.gen_range(-2i64..=2)))
                    .collect();
                let c = CyclotomicInteger::from_coefficients(p.context(), &coeffs);
                g.scale(&c)
            };
            let a = pick(&mut rng);
            let b = pick(&mut rng);
            let c = pick(&mut rng);
            let left = p.multiply(&p.multiply(&a, &b), &c);
            let right = p.multiply(&a, &p.multiply(&b, &c));
            assert_eq!(left, right);
            assert_eq!(p.multiply(&p.one(), &a), a);
            assert_eq!(p.multiply(&a, &p.one()), a);
        }
    }

    #[test]
    fn commutation_defects_quasi_commute_with_the_generators() {
        let p = WeylPresentation::new(5, 2, Some(sample_q())).unwrap();
        for i in 0..2 {
            let z = p.central_z(i);
            for r in 0..2 {
                let expected_x = if r <= i { 1 } else { 0 };
                assert_eq!(p.commutation_residue(&p.x(r), &z).unwrap(), expected_x);
                let expected_w = if r <= i { 5 - 1 } else { 0 };
                assert_eq!(p.commutation_residue(&p.w(r), &z).unwrap(), expected_w);
            }
        }
        let single = WeylPresentation::new(3, 1, None).unwrap();
        let z = single.central_z(0);
        assert_eq!(
            single.multiply(&single.x(0), &z),
            single.multiply(&z, &single.x(0)).scale(&eps(&single, 1))
        );
    }

    #[test]
    fn ell_th_powers_of_generators_and_defects_are_central() {
        let p = WeylPresentation::new(3, 2, Some(sample_q())).unwrap();
        let mut candidates = Vec::new();
        for i in 0..2 {
            candidates.push(p.power(&p.x(i), 3));
            candidates.push(p.power(&p.w(i), 3));
            candidates.push(p.power(&p.central_z(i), 3));
        }
        let gens: Vec<WeylElement> = (0..2).map(|i| p.x(i)).chain((0..2).map(|i| p.w(i))).collect();
        for c in &candidates {
            for g in &gens {
                assert_eq!(p.multiply(c, g), p.multiply(g, c));
            }
        }
    }

    #[test]
    fn observed_commutations_follow_the_relation_pattern() {
        for (ell, n, q) in [(3u64, 1usize, None), (5, 2, Some(sample_q()))] {
            let p = WeylPresentation::new(ell, n, q.clone()).unwrap();
            let (_, report) = p.seed().unwrap();
            let ell_i = ell as i64;
            let q = q.unwrap_or_else(|| vec![vec![0; n]; n]);
            for i in 0..n {
                for j in 0..n {
                    let expect_x = if i < j {
                        (1 + q[i][j]).rem_euclid(ell_i) as u64
                    } else if i > j {
                        (-1 - q[j][i]).rem_euclid(ell_i) as u64
                    } else {
                        0
                    };
                    assert_eq!(report.lambda_observed[i][j], expect_x, "x block ({i},{j})");
                    let expect_mixed = if i <= j { 1 } else { 0 };
                    assert_eq!(
                        report.lambda_observed[i][n + j], expect_mixed,
                        "mixed block ({i},{j})"
                    );
                    assert_eq!(report.lambda_observed[n + i][n + j], 0);
                }
            }
            assert!(!report.block_formula_matches);
        }
    }

    #[test]
    fn seed_is_compatible_and_exchanges_x_for_w() {
        let p = WeylPresentation::new(5, 2, Some(sample_q())).unwrap();
        let (seed, report) = p.seed().unwrap();
        assert_eq!(report.diagonal, vec![4, 4]);
        assert!(report.coprime);
        assert_eq!(seed.exchangeable(), &[0, 1]);
        for (k, partner) in report.mutated.iter().enumerate() {
            let expected = p
                .w(k)
                .scale(&CyclotomicInteger::zeta_power(p.context(), k as i64 - 1));
            assert_eq!(partner, &expected);
        }
    }

    #[test]
    fn exchange_identity_holds_inside_the_algebra() {
        for (ell, n, q) in [(3u64, 1usize, None), (3, 2, Some(sample_q()))] {
            let p = WeylPresentation::new(ell, n, q).unwrap();
            let frames = p.frame_elements();
            let (seed, report) = p.seed().unwrap();
            for k in 0..n {
                let lhs = p.multiply(
                    &p.power(&frames[k], ell),
                    &p.power(&report.mutated[k], ell),
                );
                let mut rhs = p.power(&frames[n + k], ell);
                let minus = if k > 0 {
                    p.power(&frames[n + k - 1], ell)
                } else {
                    p.one()
                };
                rhs = rhs.add_ref(&minus);
                assert_eq!(lhs, rhs, "direction {k}");
            }
            for k in seed.exchangeable().to_vec() {
                let check =
                    central::exchange_identity_check(&seed, k, DEFAULT_DIVISION_SAFETY).unwrap();
                assert!(check.holds);
            }
        }
    }

    #[test]
    fn the_exchange_graph_is_a_hypercube() {
        for n in [1usize, 2] {
            let q = if n == 2 { Some(sample_q()) } else { None };
            let p = WeylPresentation::new(3, n, q).unwrap();
            let (seed, _) = p.seed().unwrap();
            let graph = explore(&seed, &GraphLimits::default()).unwrap();
            assert!(graph.complete);
            assert_eq!(graph.nodes.len(), 1usize << n);
        }
    }

    #[test]
    fn decomposition_splits_exponents_at_the_order() {
        let p = WeylPresentation::new(3, 1, None).unwrap();
        let x4 = p.power(&p.x(0), 4);
        let coords = p.decompose(&x4).unwrap();
        let slot = 1;
        for (m, c) in coords.iter().enumerate() {
            if m == slot {
                assert_eq!(
                    *c,
                    TorusElement::monomial(
                        p.coefficient_form(),
                        vec![1, 0],
                        CyclotomicInteger::one(p.context())
                    )
                );
            } else {
                assert!(c.is_zero());
            }
        }
    }

    #[test]
    fn trace_of_one_is_the_rank() {
        let p = WeylPresentation::new(3, 1, None).unwrap();
        let tr = regular_trace(&p, &p.one()).unwrap();
        assert_eq!(
            tr,
            TorusElement::monomial(
                p.coefficient_form(),
                vec![0, 0],
                CyclotomicInteger::from_int(p.context(), 9)
            )
        );
    }

    #[test]
    fn discriminant_matches_the_closed_form_at_rank_nine() {
        let p = WeylPresentation::new(3, 1, None).unwrap();
        let report = p.discriminant(16, DEFAULT_DIVISION_SAFETY).unwrap();
        assert!(report.verdict);
        assert_eq!(report.exponents, vec![(1, 18)]);

        let zl = {
            let coords = p.decompose(&p.power(&p.central_z(0), 3)).unwrap();
            coords[0].clone()
        };
        let scalar = TorusElement::monomial(
            p.coefficient_form(),
            vec![0, 0],
            CyclotomicInteger::from_bigint(p.context(), order_power(3, 18)),
        );
        let expected = scalar.mul_ref(&zl.pow(6));
        assert_eq!(report.expected, expected);
        assert_eq!(report.discriminant, expected);
    }
}
