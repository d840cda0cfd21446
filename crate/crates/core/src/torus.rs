//! Quantum tori over `Z[zeta]` twisted by a skew-symmetric form modulo `l`.
//!
//! A torus element is a finite sum of terms `c * X^f` with `c` in
//! `Z[zeta]` and `f` an integer exponent vector. Multiplication follows
//! `X^f * X^g = zeta^(L(f,g)) * X^(f+g)` where `L` is the form, so two
//! monomials quasi-commute: `X^f X^g = zeta^(2 L(f,g)) X^g X^f`. The form
//! only matters modulo `l`, and an optional integer lift travels along for
//! presentations that track one. Division is exact and budgeted: each step
//! cancels the leading term in the total-degree-then-lexicographic order,
//! and a failed coefficient division or an exhausted budget reports an
//! error instead of looping.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::cyclotomic::{CyclotomicInteger, RootContext};
use crate::error::EngineError;

/// Default multiplier for the step budget of [`TorusElement::exact_left_divide`].
pub const DEFAULT_DIVISION_SAFETY: u64 = 4;

/// A skew-symmetric bilinear form on `Z^dim` taken modulo `l`.
///
/// Residues are stored in `[0, l)`. When the form was built from integer
/// data the lift is kept so presentations can report exact matrices.
#[derive(Debug)]
pub struct SkewForm {
    ctx: Arc<RootContext>,
    dim: usize,
    residues: Vec<Vec<u64>>,
    lift: Option<Vec<Vec<i64>>>,
}

impl PartialEq for SkewForm {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.ell() == other.ctx.ell()
            && self.dim == other.dim
            && self.residues == other.residues
    }
}

impl Eq for SkewForm {}

fn rem_ell(value: i128, ell: u64) -> u64 {
    value.rem_euclid(ell as i128) as u64
}

impl SkewForm {
    /// Builds a form from an integer matrix, which must be skew-symmetric.
    pub fn from_lift(ctx: &Arc<RootContext>, lift: Vec<Vec<i64>>) -> Result<Arc<Self>, EngineError> {
        let dim = lift.len();
        for (i, row) in lift.iter().enumerate() {
            if row.len() != dim {
                return Err(EngineError::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v != -lift[j][i] {
                    return Err(EngineError::InvalidInput(format!(
                        "form is not skew-symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let ell = ctx.ell();
        let residues = lift
            .iter()
            .map(|row| row.iter().map(|&v| rem_ell(v as i128, ell)).collect())
            .collect();
        Ok(Arc::new(SkewForm {
            ctx: ctx.clone(),
            dim,
            residues,
            lift: Some(lift),
        }))
    }

    /// Builds a form from residues in `[0, l)` that are skew modulo `l`.
    pub fn from_residues(
        ctx: &Arc<RootContext>,
        residues: Vec<Vec<u64>>,
    ) -> Result<Arc<Self>, EngineError> {
        let dim = residues.len();
        let ell = ctx.ell();
        for (i, row) in residues.iter().enumerate() {
            if row.len() != dim {
                return Err(EngineError::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v >= ell {
                    return Err(EngineError::InvalidInput(format!(
                        "residue {v} at ({i},{j}) is not reduced modulo {ell}"
                    )));
                }
                if (v + residues[j][i]) % ell != 0 {
                    return Err(EngineError::InvalidInput(format!(
                        "residues are not skew modulo {ell} at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Arc::new(SkewForm {
            ctx: ctx.clone(),
            dim,
            residues,
            lift: None,
        }))
    }

    /// The zero form, whose torus is commutative.
    pub fn zero(ctx: &Arc<RootContext>, dim: usize) -> Arc<Self> {
        Arc::new(SkewForm {
            ctx: ctx.clone(),
            dim,
            residues: vec![vec![0; dim]; dim],
            lift: Some(vec![vec![0; dim]; dim]),
        })
    }

    pub fn context(&self) -> &Arc<RootContext> {
        &self.ctx
    }

    pub fn ell(&self) -> u64 {
        self.ctx.ell()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The residue of the form on basis vectors `(i, j)`.
    pub fn residue(&self, i: usize, j: usize) -> u64 {
        self.residues[i][j]
    }

    pub fn residues(&self) -> &[Vec<u64>] {
        &self.residues
    }

    pub fn lift(&self) -> Option<&Vec<Vec<i64>>> {
        self.lift.as_ref()
    }

    /// Evaluates the form on two exponent vectors, modulo `l`.
    pub fn pairing(&self, f: &[i64], g: &[i64]) -> u64 {
        assert_eq!(f.len(), self.dim, "exponent length mismatch");
        assert_eq!(g.len(), self.dim, "exponent length mismatch");
        let ell = self.ell();
        let mut acc: i128 = 0;
        for (i, &fi) in f.iter().enumerate() {
            if fi == 0 {
                continue;
            }
            for (j, &gj) in g.iter().enumerate() {
                if gj == 0 || self.residues[i][j] == 0 {
                    continue;
                }
                acc += fi as i128 * gj as i128 * self.residues[i][j] as i128;
                acc = acc.rem_euclid(ell as i128);
            }
        }
        rem_ell(acc, ell)
    }

    /// Whether `X^f` commutes with every generator, that is `L(f, e_j)`
    /// vanishes modulo `l` for all `j`.
    pub fn in_radical(&self, f: &[i64]) -> bool {
        assert_eq!(f.len(), self.dim, "exponent length mismatch");
        let ell = self.ell() as i128;
        (0..self.dim).all(|j| {
            let mut acc: i128 = 0;
            for (i, &fi) in f.iter().enumerate() {
                acc += fi as i128 * self.residues[i][j] as i128;
            }
            acc.rem_euclid(ell) == 0
        })
    }

    /// The form `E^T L E` for an integer matrix `E`, with the lift
    /// transported when present.
    pub fn conjugated(&self, e: &[Vec<i64>]) -> Arc<Self> {
        let n = self.dim;
        assert_eq!(e.len(), n, "conjugating matrix must match the dimension");
        let ell = self.ell();
        let mut residues = vec![vec![0u64; n]; n];
        for (i, row) in residues.iter_mut().enumerate() {
            for (j, out) in row.iter_mut().enumerate() {
                let mut acc: i128 = 0;
                for a in 0..n {
                    for b in 0..n {
                        acc += e[a][i] as i128 * self.residues[a][b] as i128 * e[b][j] as i128;
                        acc = acc.rem_euclid(ell as i128);
                    }
                }
                *out = rem_ell(acc, ell);
            }
        }
        let lift = self.lift.as_ref().map(|l| {
            let mut out = vec![vec![0i64; n]; n];
            for (i, row) in out.iter_mut().enumerate() {
                for (j, cell) in row.iter_mut().enumerate() {
                    let mut acc: i128 = 0;
                    for a in 0..n {
                        for b in 0..n {
                            acc += e[a][i] as i128 * l[a][b] as i128 * e[b][j] as i128;
                        }
                    }
                    *cell = i64::try_from(acc).expect("lift entry overflow");
                }
            }
            out
        });
        Arc::new(SkewForm {
            ctx: self.ctx.clone(),
            dim: n,
            residues,
            lift,
        })
    }

    /// The form in permuted coordinates: entry `(i, j)` of the result is
    /// the entry `(sigma[i], sigma[j])` of this form.
    pub fn permuted(&self, sigma: &[usize]) -> Arc<Self> {
        assert_eq!(sigma.len(), self.dim);
        let residues = sigma
            .iter()
            .map(|&si| sigma.iter().map(|&sj| self.residues[si][sj]).collect())
            .collect();
        let lift = self
            .lift
            .as_ref()
            .map(|l| {
                sigma
                    .iter()
                    .map(|&si| sigma.iter().map(|&sj| l[si][sj]).collect())
                    .collect()
            });
        Arc::new(SkewForm {
            ctx: self.ctx.clone(),
            dim: self.dim,
            residues,
            lift,
        })
    }
}

/// Compares exponents by total degree, then lexicographically. The
/// leading term of an element is the maximum in this order, which is
/// invariant under multiplication by a fixed monomial.
pub fn term_order(a: &[i64], b: &[i64]) -> std::cmp::Ordering {
    let da: i64 = a.iter().sum();
    let db: i64 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// A finite sum of twisted Laurent terms over a shared [`SkewForm`].
#[derive(Clone, Debug)]
pub struct TorusElement {
    form: Arc<SkewForm>,
    terms: BTreeMap<Vec<i64>, CyclotomicInteger>,
}

impl PartialEq for TorusElement {
    fn eq(&self, other: &Self) -> bool {
        self.form == other.form && self.terms == other.terms
    }
}

impl Eq for TorusElement {}

impl TorusElement {
    pub fn zero(form: &Arc<SkewForm>) -> Self {
        TorusElement {
            form: form.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(form: &Arc<SkewForm>) -> Self {
        Self::monomial(
            form,
            vec![0; form.dim()],
            CyclotomicInteger::one(form.context()),
        )
    }

    /// A single term `coeff * X^exp`.
    pub fn monomial(form: &Arc<SkewForm>, exp: Vec<i64>, coeff: CyclotomicInteger) -> Self {
        assert_eq!(exp.len(), form.dim(), "exponent length mismatch");
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        TorusElement {
            form: form.clone(),
            terms,
        }
    }

    /// The generator `X^(e_i)`.
    pub fn generator(form: &Arc<SkewForm>, i: usize) -> Self {
        assert!(i < form.dim(), "generator index out of range");
        let mut exp = vec![0; form.dim()];
        exp[i] = 1;
        Self::monomial(form, exp, CyclotomicInteger::one(form.context()))
    }

    pub fn form(&self) -> &Arc<SkewForm> {
        &self.form
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, CyclotomicInteger> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(f, c)| f.iter().all(|&v| v == 0) && c.is_one())
    }

    /// The maximal term in the total-degree-then-lexicographic order.
    pub fn leading_term(&self) -> Option<(&Vec<i64>, &CyclotomicInteger)> {
        self.terms
            .iter()
            .max_by(|(f, _), (g, _)| term_order(f, g))
    }

    fn assert_same_form(&self, other: &Self) {
        if !Arc::ptr_eq(&self.form, &other.form) {
            assert_eq!(
                self.form, other.form,
                "operands live over different skew forms"
            );
        }
    }

    fn insert_term(terms: &mut BTreeMap<Vec<i64>, CyclotomicInteger>, exp: Vec<i64>, c: CyclotomicInteger) {
        if c.is_zero() {
            return;
        }
        match terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let sum = slot.get().add_ref(&c);
                if sum.is_zero() {
                    slot.remove();
                } else {
                    slot.insert(sum);
                }
            }
        }
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        self.assert_same_form(other);
        let mut terms = self.terms.clone();
        for (f, c) in &other.terms {
            Self::insert_term(&mut terms, f.clone(), c.clone());
        }
        TorusElement {
            form: self.form.clone(),
            terms,
        }
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    pub fn neg_ref(&self) -> Self {
        TorusElement {
            form: self.form.clone(),
            terms: self
                .terms
                .iter()
                .map(|(f, c)| (f.clone(), c.neg_ref()))
                .collect(),
        }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        self.assert_same_form(other);
        let ctx = self.form.context();
        let mut terms = BTreeMap::new();
        for (f, a) in &self.terms {
            for (g, b) in &other.terms {
                let twist = self.form.pairing(f, g);
                let coeff = a
                    .mul_ref(b)
                    .mul_ref(&CyclotomicInteger::zeta_power(ctx, twist as i64));
                let exp: Vec<i64> = f.iter().zip(g).map(|(x, y)| x + y).collect();
                Self::insert_term(&mut terms, exp, coeff);
            }
        }
        TorusElement {
            form: self.form.clone(),
            terms,
        }
    }

    pub fn scale(&self, c: &CyclotomicInteger) -> Self {
        if c.is_zero() {
            return Self::zero(&self.form);
        }
        TorusElement {
            form: self.form.clone(),
            terms: self
                .terms
                .iter()
                .map(|(f, a)| (f.clone(), a.mul_ref(c)))
                .collect(),
        }
    }

    /// Multiplies every coefficient by `zeta^k`.
    pub fn scale_zeta(&self, k: i64) -> Self {
        self.scale(&CyclotomicInteger::zeta_power(self.form.context(), k))
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.form);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    /// Integer power; negative exponents require an invertible monomial.
    pub fn pow_int(&self, exp: i64) -> Result<Self, EngineError> {
        if exp >= 0 {
            Ok(self.pow(exp as u64))
        } else {
            Ok(self.invert_monomial()?.pow(exp.unsigned_abs()))
        }
    }

    /// Inverse of a single term whose coefficient is a unit: the inverse
    /// of `c * X^f` is `c^(-1) * X^(-f)`, with no extra twist because the
    /// form vanishes on `(f, f)`.
    pub fn invert_monomial(&self) -> Result<Self, EngineError> {
        if self.terms.len() != 1 {
            return Err(EngineError::NotAUnit);
        }
        let (f, c) = self.terms.iter().next().unwrap();
        let cinv = c.invert_unit().ok_or(EngineError::NotAUnit)?;
        Ok(Self::monomial(
            &self.form,
            f.iter().map(|&v| -v).collect(),
            cinv,
        ))
    }

    /// Solves `divisor * q = self` exactly.
    ///
    /// Each step is forced: only one monomial can cancel the current
    /// leading term, so a failed coefficient division proves
    /// non-divisibility. The step budget is
    /// `terms(self) * (1 + terms(divisor)) * safety` and the remainder may
    /// not grow past `64 * terms(self)` terms; exceeding either reports a
    /// budget error, which callers treat as non-divisibility evidence.
    pub fn exact_left_divide(&self, divisor: &Self, safety: u64) -> Result<Self, EngineError> {
        self.assert_same_form(divisor);
        if divisor.is_zero() {
            return Err(EngineError::NotDivisible("division by zero".into()));
        }
        if self.is_zero() {
            return Ok(Self::zero(&self.form));
        }
        let (df, dc) = divisor.leading_term().unwrap();
        let df = df.clone();
        let dc = dc.clone();
        let ctx = self.form.context().clone();
        let step_budget = (self.num_terms() as u64)
            .saturating_mul(1 + divisor.num_terms() as u64)
            .saturating_mul(safety.max(1));
        let term_cap = 64usize.saturating_mul(self.num_terms());
        let mut rem = self.clone();
        let mut quo = Self::zero(&self.form);
        let mut steps = 0u64;
        while !rem.is_zero() {
            steps += 1;
            if steps > step_budget {
                return Err(EngineError::BudgetExceeded(format!(
                    "left division passed {step_budget} steps without terminating"
                )));
            }
            if rem.num_terms() > term_cap {
                return Err(EngineError::BudgetExceeded(format!(
                    "left division remainder grew past {term_cap} terms"
                )));
            }
            let (rf, rc) = rem.leading_term().unwrap();
            let mf: Vec<i64> = rf.iter().zip(&df).map(|(a, b)| a - b).collect();
            let twist = self.form.pairing(&df, &mf);
            let adjusted = dc.mul_ref(&CyclotomicInteger::zeta_power(&ctx, twist as i64));
            let c = rc.exact_div(&adjusted).ok_or_else(|| {
                EngineError::NotDivisible(
                    "leading coefficient does not divide in Z[zeta]".into(),
                )
            })?;
            let mono = Self::monomial(&self.form, mf, c);
            rem = rem.sub_ref(&divisor.mul_ref(&mono));
            quo = quo.add_ref(&mono);
        }
        debug_assert_eq!(divisor.mul_ref(&quo), *self);
        Ok(quo)
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.mul_ref(other) == other.mul_ref(self)
    }

    /// Whether every exponent of the element lies in the radical of the
    /// form, which characterizes centrality in the torus.
    pub fn is_central_support(&self) -> bool {
        self.terms.keys().all(|f| self.form.in_radical(f))
    }

    /// Whether every exponent is nonnegative in the coordinates outside
    /// `ex` and `inv`, so the element lives in the mixed torus that
    /// inverts only the exchangeable and the chosen frozen directions.
    pub fn in_mixed_torus(&self, ex: &[usize], inv: &[usize]) -> bool {
        self.terms.keys().all(|f| {
            f.iter()
                .enumerate()
                .all(|(i, &v)| v >= 0 || ex.contains(&i) || inv.contains(&i))
        })
    }

    /// Whether `self * other = zeta^(2 twist) * other * self`.
    pub fn quasi_commutes_with(&self, other: &Self, twist: u64) -> bool {
        self.mul_ref(other) == other.mul_ref(self).scale_zeta(2 * twist as i64)
    }

    /// The element in permuted coordinates over the matching permuted
    /// form: coordinate `i` of a new exponent is coordinate `sigma[i]` of
    /// the old one.
    pub fn permute_coordinates(&self, sigma: &[usize], new_form: &Arc<SkewForm>) -> Self {
        assert_eq!(sigma.len(), self.form.dim());
        let terms = self
            .terms
            .iter()
            .map(|(f, c)| {
                let exp: Vec<i64> = sigma.iter().map(|&s| f[s]).collect();
                (exp, c.clone())
            })
            .collect();
        TorusElement {
            form: new_form.clone(),
            terms,
        }
    }

    /// Serializes as a list of `{"exp": [...], "coef": [...]}` records,
    /// with power-basis coefficients as exact JSON integers.
    pub fn to_json(&self) -> Value {
        let items: Vec<Value> = self
            .terms
            .iter()
            .map(|(f, c)| {
                let coef: Vec<Value> = c
                    .coefficients()
                    .iter()
                    .map(|b| Value::Number(bigint_to_number(b)))
                    .collect();
                json!({ "exp": f, "coef": coef })
            })
            .collect();
        Value::Array(items)
    }

    /// Parses the format produced by [`TorusElement::to_json`]. Duplicate
    /// exponents accumulate, and coefficient arrays longer than the power
    /// basis reduce into it.
    pub fn from_json(form: &Arc<SkewForm>, value: &Value) -> Result<Self, EngineError> {
        let items = value
            .as_array()
            .ok_or_else(|| EngineError::InvalidInput("element must be a JSON array".into()))?;
        let mut out = Self::zero(form);
        for item in items {
            let obj = item
                .as_object()
                .ok_or_else(|| EngineError::InvalidInput("term must be a JSON object".into()))?;
            let exp_val = obj
                .get("exp")
                .ok_or_else(|| EngineError::InvalidInput("term is missing 'exp'".into()))?;
            let exp = json_to_i64_vec(exp_val)?;
            if exp.len() != form.dim() {
                return Err(EngineError::DimensionMismatch {
                    expected: form.dim(),
                    got: exp.len(),
                });
            }
            let coef_val = obj
                .get("coef")
                .ok_or_else(|| EngineError::InvalidInput("term is missing 'coef'".into()))?;
            let coef_items = coef_val
                .as_array()
                .ok_or_else(|| EngineError::InvalidInput("'coef' must be an array".into()))?;
            let mut coeffs = Vec::with_capacity(coef_items.len());
            for c in coef_items {
                coeffs.push(json_to_bigint(c)?);
            }
            let coeff = CyclotomicInteger::from_coefficients(form.context(), &coeffs);
            out = out.add_ref(&Self::monomial(form, exp, coeff));
        }
        Ok(out)
    }
}

fn bigint_to_number(b: &BigInt) -> serde_json::Number {
    serde_json::from_str(&b.to_string()).expect("integer is valid JSON")
}

fn json_to_bigint(v: &Value) -> Result<BigInt, EngineError> {
    match v {
        Value::Number(n) => {
            let text = n.to_string();
            text.parse::<BigInt>().map_err(|_| {
                EngineError::InvalidInput(format!("'{text}' is not an exact integer"))
            })
        }
        _ => Err(EngineError::InvalidInput(
            "coefficient entries must be integers".into(),
        )),
    }
}

fn json_to_i64_vec(v: &Value) -> Result<Vec<i64>, EngineError> {
    let items = v
        .as_array()
        .ok_or_else(|| EngineError::InvalidInput("'exp' must be an array".into()))?;
    items
        .iter()
        .map(|x| {
            x.as_i64()
                .ok_or_else(|| EngineError::InvalidInput("exponents must fit in i64".into()))
        })
        .collect()
}

impl fmt::Display for TorusElement {
    /// Renders as `(<coefficient>)*X^[f1,...,fN]` terms joined by ` + `,
    /// in ascending lexicographic order of exponents. Zero renders as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exp, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coords: Vec<String> = exp.iter().map(|v| v.to_string()).collect();
            write!(f, "({c})*X^[{}]", coords.join(","))?;
        }
        Ok(())
    }
}

impl Add for &TorusElement {
    type Output = TorusElement;
    fn add(self, rhs: Self) -> TorusElement {
        self.add_ref(rhs)
    }
}

impl Sub for &TorusElement {
    type Output = TorusElement;
    fn sub(self, rhs: Self) -> TorusElement {
        self.sub_ref(rhs)
    }
}

impl Mul for &TorusElement {
    type Output = TorusElement;
    fn mul(self, rhs: Self) -> TorusElement {
        self.mul_ref(rhs)
    }
}

impl Neg for &TorusElement {
    type Output = TorusElement;
    fn neg(self) -> TorusElement {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(ell: u64) -> Arc<RootContext> {
        RootContext::new(ell).unwrap()
    }

    fn standard_form(ell: u64) -> Arc<SkewForm> {
        SkewForm::from_lift(&ctx(ell), vec![vec![0, -1], vec![1, 0]]).unwrap()
    }

    fn cyc(form: &Arc<SkewForm>, value: i64) -> CyclotomicInteger {
        CyclotomicInteger::from_int(form.context(), value)
    }

    fn random_element(form: &Arc<SkewForm>, rng: &mut ChaCha8Rng, max_terms: usize) -> TorusElement {
        let mut out = TorusElement::zero(form);
        let n_terms = rng.gen_range(1..=max_terms);
        for _ in 0..n_terms {
            let exp: Vec<i64> = (0..form.dim()).map(|_| rng.gen_range(-2i64..=2)).collect();
            let coeffs: Vec<BigInt> = (0..form.context().degree())
                .map(|_| BigInt::from(rng.gen_range(-3i64..=3)))
                .collect();
            let c = CyclotomicInteger::from_coefficients(form.context(), &coeffs);
            out = out.add_ref(&TorusElement::monomial(form, exp, c));
        }
        out
    }

    #[test]
    fn monomial_products_twist_by_the_form() {
        let form = standard_form(5);
        let x1 = TorusElement::generator(&form, 0);
        let x2 = TorusElement::generator(&form, 1);
        let z = |k: i64| CyclotomicInteger::zeta_power(form.context(), k);

        let expected_fwd = TorusElement::monomial(&form, vec![1, 1], z(-1));
        assert_eq!(x1.mul_ref(&x2), expected_fwd);
        let expected_rev = TorusElement::monomial(&form, vec![1, 1], z(1));
        assert_eq!(x2.mul_ref(&x1), expected_rev);

        assert!(x1.quasi_commutes_with(&x2, form.pairing(&[1, 0], &[0, 1])));
        assert!(!x1.commutes_with(&x2));
    }

    #[test]
    fn ring_axioms_hold_on_random_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let form = standard_form(5);
        for _ in 0..15 {
            let a = random_element(&form, &mut rng, 3);
            let b = random_element(&form, &mut rng, 3);
            let c = random_element(&form, &mut rng, 3);
            assert_eq!(a.mul_ref(&b).mul_ref(&c), a.mul_ref(&b.mul_ref(&c)));
            assert_eq!(
                a.mul_ref(&b.add_ref(&c)),
                a.mul_ref(&b).add_ref(&a.mul_ref(&c))
            );
            assert_eq!(
                a.add_ref(&b).mul_ref(&c),
                a.mul_ref(&c).add_ref(&b.mul_ref(&c))
            );
        }
    }

    #[test]
    fn power_matches_repeated_multiplication() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let form = standard_form(5);
        let a = random_element(&form, &mut rng, 3);
        let mut acc = TorusElement::one(&form);
        for e in 0..=4u64 {
            assert_eq!(a.pow(e), acc);
            acc = acc.mul_ref(&a);
        }
    }

    #[test]
    fn unit_monomials_invert_on_both_sides() {
        let form = standard_form(5);
        let unit = CyclotomicInteger::one(form.context())
            .add_ref(&CyclotomicInteger::zeta_power(form.context(), 1));
        let m = TorusElement::monomial(&form, vec![2, -1], unit);
        let inv = m.invert_monomial().unwrap();
        assert!(m.mul_ref(&inv).is_one());
        assert!(inv.mul_ref(&m).is_one());
        assert_eq!(m.pow_int(-2).unwrap(), inv.pow(2));

        let two_terms = TorusElement::generator(&form, 0)
            .add_ref(&TorusElement::generator(&form, 1));
        assert!(matches!(
            two_terms.invert_monomial(),
            Err(EngineError::NotAUnit)
        ));
        let non_unit = TorusElement::monomial(&form, vec![1, 0], cyc(&form, 2));
        assert!(matches!(
            non_unit.invert_monomial(),
            Err(EngineError::NotAUnit)
        ));
    }

    #[test]
    fn left_division_recovers_known_quotient() {
        // Dividing X^(0,1) + 1 by X^(1,0) on the left at order 5 gives
        // zeta * X^(-1,1) + X^(-1,0): the zeta compensates the twist
        // L(e1, e2 - e1) = -1 picked up when the divisor passes through.
        let form = standard_form(5);
        let divisor = TorusElement::generator(&form, 0);
        let dividend = TorusElement::generator(&form, 1).add_ref(&TorusElement::one(&form));
        let q = dividend
            .exact_left_divide(&divisor, DEFAULT_DIVISION_SAFETY)
            .unwrap();
        let z = |k: i64| CyclotomicInteger::zeta_power(form.context(), k);
        let expected = TorusElement::monomial(&form, vec![-1, 1], z(1))
            .add_ref(&TorusElement::monomial(&form, vec![-1, 0], z(0)));
        assert_eq!(q, expected);
        assert_eq!(divisor.mul_ref(&q), dividend);
    }

    #[test]
    fn left_division_round_trips_random_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for ell in [1u64, 4, 5] {
            let form = SkewForm::from_lift(&ctx(ell), vec![vec![0, -1], vec![1, 0]]).unwrap();
            for _ in 0..15 {
                let mut d = random_element(&form, &mut rng, 3);
                while d.is_zero() {
                    d = random_element(&form, &mut rng, 3);
                }
                let q = random_element(&form, &mut rng, 3);
                let a = d.mul_ref(&q);
                let recovered = a.exact_left_divide(&d, DEFAULT_DIVISION_SAFETY).unwrap();
                assert_eq!(recovered, q, "order {ell}");
            }
        }
    }

    #[test]
    fn left_division_reports_failures() {
        let form = standard_form(5);
        let x1 = TorusElement::generator(&form, 0);
        let one = TorusElement::one(&form);

        // 1 / (1 + X^(1,0)) expands into an infinite Laurent tail, which
        // the step budget cuts off.
        let d = one.add_ref(&x1);
        assert!(matches!(
            one.exact_left_divide(&d, DEFAULT_DIVISION_SAFETY),
            Err(EngineError::BudgetExceeded(_))
        ));

        // A coefficient that does not divide in Z[zeta] fails immediately.
        let two_x = TorusElement::monomial(&form, vec![1, 0], cyc(&form, 2));
        assert!(matches!(
            x1.exact_left_divide(&two_x, DEFAULT_DIVISION_SAFETY),
            Err(EngineError::NotDivisible(_))
        ));

        assert!(matches!(
            one.exact_left_divide(&TorusElement::zero(&form), DEFAULT_DIVISION_SAFETY),
            Err(EngineError::NotDivisible(_))
        ));
    }

    #[test]
    fn radical_membership_detects_central_exponents() {
        let form5 = standard_form(5);
        assert!(form5.in_radical(&[5, 0]));
        assert!(form5.in_radical(&[0, -5]));
        assert!(!form5.in_radical(&[1, 0]));

        // At order 4 with pairing 2 the radical is strictly larger than
        // the sublattice of multiples of 4.
        let form4 = SkewForm::from_lift(&ctx(4), vec![vec![0, 2], vec![-2, 0]]).unwrap();
        assert!(form4.in_radical(&[2, 2]));
        assert!(!form4.in_radical(&[1, 2]));

        let x_central = TorusElement::monomial(
            &form5,
            vec![5, 0],
            CyclotomicInteger::one(form5.context()),
        );
        let x2 = TorusElement::generator(&form5, 1);
        assert!(x_central.commutes_with(&x2));
    }

    #[test]
    fn form_validation_rejects_bad_input() {
        let c = ctx(5);
        assert!(SkewForm::from_lift(&c, vec![vec![0, 1], vec![1, 0]]).is_err());
        assert!(SkewForm::from_lift(&c, vec![vec![0, 1]]).is_err());
        assert!(SkewForm::from_residues(&c, vec![vec![0, 2], vec![2, 0]]).is_err());
        assert!(SkewForm::from_residues(&c, vec![vec![0, 7], vec![3, 0]]).is_err());
        assert!(SkewForm::from_residues(&c, vec![vec![0, 2], vec![3, 0]]).is_ok());
    }

    #[test]
    fn conjugation_transports_residues_and_lift() {
        let form = standard_form(5);
        let e = vec![vec![-1, 0], vec![3, 1]];
        let moved = form.conjugated(&e);
        // E^T L E for L = [[0,-1],[1,0]] and the matrix above.
        let lift = moved.lift().unwrap();
        let expected = vec![vec![0, 1], vec![-1, 0]];
        assert_eq!(lift, &expected);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(
                    moved.residue(i, j),
                    (expected[i][j] as i128).rem_euclid(5) as u64
                );
            }
        }
    }

    #[test]
    fn permutation_is_a_ring_isomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let form = standard_form(5);
        let sigma = vec![1usize, 0];
        let permuted_form = form.permuted(&sigma);
        for _ in 0..10 {
            let a = random_element(&form, &mut rng, 3);
            let b = random_element(&form, &mut rng, 3);
            let lhs = a.mul_ref(&b).permute_coordinates(&sigma, &permuted_form);
            let rhs = a
                .permute_coordinates(&sigma, &permuted_form)
                .mul_ref(&b.permute_coordinates(&sigma, &permuted_form));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn rendering_is_deterministic() {
        let form = standard_form(5);
        let unit = CyclotomicInteger::one(form.context())
            .add_ref(&CyclotomicInteger::zeta_power(form.context(), 1));
        let elt = TorusElement::monomial(&form, vec![0, 1], unit)
            .add_ref(&TorusElement::monomial(&form, vec![1, 0], cyc(&form, -2)));
        assert_eq!(elt.to_string(), "(1 + z)*X^[0,1] + (-2)*X^[1,0]");
        assert_eq!(TorusElement::zero(&form).to_string(), "0");
    }

    #[test]
    fn json_round_trip_preserves_large_coefficients() {
        let form = standard_form(5);
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let coeff = CyclotomicInteger::from_coefficients(
            form.context(),
            &[big, BigInt::from(-1), BigInt::from(0), BigInt::from(2)],
        );
        let elt = TorusElement::monomial(&form, vec![3, -4], coeff)
            .add_ref(&TorusElement::one(&form));
        let encoded = elt.to_json();
        let decoded = TorusElement::from_json(&form, &encoded).unwrap();
        assert_eq!(decoded, elt);

        let text = serde_json::to_string(&encoded).unwrap();
        assert!(text.contains("123456789012345678901234567890"));

        assert!(TorusElement::from_json(&form, &json!({"exp": []})).is_err());
        assert!(TorusElement::from_json(
            &form,
            &json!([{ "exp": [1], "coef": [1] }])
        )
        .is_err());
        assert!(TorusElement::from_json(
            &form,
            &json!([{ "exp": [0, 0], "coef": [0.5] }])
        )
        .is_err());
    }

    #[test]
    fn central_support_matches_the_kernel_of_the_form() {
        let form = standard_form(5);
        let x1 = TorusElement::generator(&form, 0);
        assert!(!x1.is_central_support());
        assert!(x1.pow(5).is_central_support());
        assert!(TorusElement::monomial(&form, vec![10, -5], cyc(&form, 7)).is_central_support());

        let scaled = SkewForm::from_lift(&ctx(9), vec![vec![0, 3], vec![-3, 0]]).unwrap();
        assert!(TorusElement::monomial(&scaled, vec![3, 0], cyc(&scaled, 1)).is_central_support());
        assert!(!TorusElement::generator(&scaled, 0).is_central_support());

        let mixed = x1.pow(5).add_ref(&TorusElement::generator(&form, 1));
        assert!(!mixed.is_central_support());
    }

    #[test]
    fn mixed_torus_membership_checks_frozen_exponents() {
        let form = standard_form(5);
        let poly = TorusElement::generator(&form, 0).add_ref(&TorusElement::one(&form));
        assert!(poly.in_mixed_torus(&[], &[]));

        let inverse = TorusElement::monomial(&form, vec![0, -1], cyc(&form, 1));
        assert!(!inverse.in_mixed_torus(&[0], &[]));
        assert!(inverse.in_mixed_torus(&[0], &[1]));
        assert!(inverse.in_mixed_torus(&[0, 1], &[]));

        let mutated = TorusElement::monomial(&form, vec![-1, 1], cyc(&form, 1))
            .add_ref(&TorusElement::monomial(&form, vec![-1, 0], cyc(&form, 1)));
        assert!(mutated.in_mixed_torus(&[0], &[]));
        assert!(!mutated.in_mixed_torus(&[1], &[]));
    }

    #[test]
    fn binomials_collapse_at_coprime_commutation_exponents() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for ell in [3u64, 5, 7] {
            for _ in 0..5 {
                let mut d = rng.gen_range(1..ell as i64);
                while num_integer::gcd(d as u64, ell) != 1 {
                    d = rng.gen_range(1..ell as i64);
                }
                let context = ctx(ell);
                let form =
                    SkewForm::from_lift(&context, vec![vec![0, -d], vec![d, 0]]).unwrap();
                let y = TorusElement::generator(&form, 0);
                let z = TorusElement::generator(&form, 1);
                assert!(z.quasi_commutes_with(&y, form.pairing(&[0, 1], &[1, 0])));
                let sum_power = y.add_ref(&z).pow(ell);
                assert_eq!(sum_power, y.pow(ell).add_ref(&z.pow(ell)));
            }
        }
    }
}
