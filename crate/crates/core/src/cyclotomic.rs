//! Exact arithmetic in `Z[zeta]` for a primitive `l`-th root of unity.
//!
//! Elements are stored in the power basis `1, zeta, ..., zeta^(d-1)` where
//! `d` is the degree of the `l`-th cyclotomic polynomial. Multiplication
//! reduces modulo that polynomial, norms are Sylvester resultants, and
//! divisibility is decided exactly through Cramer's rule, so unit tests on
//! coefficient growth never depend on floating point. The order `l = 1`
//! degenerates to plain integers, which the classical comparison paths use.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::EngineError;
use crate::intmat;

/// Removes trailing zero coefficients; the zero polynomial becomes empty.
fn poly_trim(p: &mut Vec<BigInt>) {
    while p.last().map_or(false, Zero::is_zero) {
        p.pop();
    }
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    poly_trim(&mut out);
    out
}

/// Long division by a monic divisor, panicking on a nonzero remainder.
/// Only used where exactness is guaranteed, such as building cyclotomic
/// polynomials from `t^l - 1`.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().map_or(false, One::is_one), "divisor must be monic");
    let mut rem = num.to_vec();
    poly_trim(&mut rem);
    let dd = den.len() - 1;
    if rem.len() <= dd {
        assert!(rem.is_empty(), "division left a remainder");
        return Vec::new();
    }
    let mut quo = vec![BigInt::zero(); rem.len() - dd];
    while rem.len() > dd {
        let shift = rem.len() - 1 - dd;
        let c = rem.last().unwrap().clone();
        quo[shift] = c.clone();
        for (k, dk) in den.iter().enumerate() {
            let idx = shift + k;
            let t = &c * dk;
            rem[idx] -= t;
        }
        poly_trim(&mut rem);
    }
    assert!(rem.is_empty(), "division left a remainder");
    quo
}

/// Coefficients of the `l`-th cyclotomic polynomial, constant term first.
///
/// Computed as `(t^l - 1)` divided by the product of the cyclotomic
/// polynomials of all proper divisors of `l`.
fn cyclotomic_polynomial(ell: u64) -> Vec<BigInt> {
    let mut num = vec![BigInt::zero(); ell as usize + 1];
    num[0] = -BigInt::one();
    num[ell as usize] = BigInt::one();
    let mut den = vec![BigInt::one()];
    for d in 1..ell {
        if ell % d == 0 {
            den = poly_mul(&den, &cyclotomic_polynomial(d));
        }
    }
    poly_div_exact(&num, &den)
}

/// Reduces a polynomial in `zeta` to the power basis, returning exactly
/// `degree` coefficients.
fn poly_mod_phi(mut p: Vec<BigInt>, phi: &[BigInt]) -> Vec<BigInt> {
    let degree = phi.len() - 1;
    while p.len() > degree {
        let d = p.len() - 1;
        let c = p.pop().unwrap();
        if c.is_zero() {
            continue;
        }
        let base = d - degree;
        for (k, fk) in phi.iter().take(degree).enumerate() {
            let t = &c * fk;
            p[base + k] -= t;
        }
    }
    p.resize(degree, BigInt::zero());
    p
}

/// The ambient ring `Z[zeta]` for a fixed primitive `l`-th root of unity.
///
/// Shared through an [`Arc`] by every element, matrix and seed built over
/// the same order.
#[derive(Debug)]
pub struct RootContext {
    ell: u64,
    phi: Vec<BigInt>,
}

impl PartialEq for RootContext {
    fn eq(&self, other: &Self) -> bool {
        self.ell == other.ell
    }
}

impl Eq for RootContext {}

impl RootContext {
    /// Builds the context for a primitive `l`-th root of unity.
    pub fn new(ell: u64) -> Result<Arc<Self>, EngineError> {
        if ell == 0 {
            return Err(EngineError::InvalidOrder(0));
        }
        Ok(Arc::new(RootContext {
            ell,
            phi: cyclotomic_polynomial(ell),
        }))
    }

    /// The order of the root of unity.
    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// Degree of the minimal polynomial, which is Euler's totient of `l`.
    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    /// Coefficients of the `l`-th cyclotomic polynomial, constant term
    /// first and monic at the top.
    pub fn minimal_polynomial(&self) -> &[BigInt] {
        &self.phi
    }
}

/// An element of `Z[zeta]` in the power basis of its [`RootContext`].
#[derive(Clone, Debug)]
pub struct CyclotomicInteger {
    ctx: Arc<RootContext>,
    coeffs: Vec<BigInt>,
}

impl PartialEq for CyclotomicInteger {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.ell == other.ctx.ell && self.coeffs == other.coeffs
    }
}

impl Eq for CyclotomicInteger {}

impl CyclotomicInteger {
    pub fn zero(ctx: &Arc<RootContext>) -> Self {
        CyclotomicInteger {
            ctx: ctx.clone(),
            coeffs: vec![BigInt::zero(); ctx.degree()],
        }
    }

    pub fn one(ctx: &Arc<RootContext>) -> Self {
        Self::from_int(ctx, 1)
    }

    pub fn from_int(ctx: &Arc<RootContext>, value: i64) -> Self {
        Self::from_bigint(ctx, BigInt::from(value))
    }

    pub fn from_bigint(ctx: &Arc<RootContext>, value: BigInt) -> Self {
        let mut coeffs = vec![BigInt::zero(); ctx.degree()];
        coeffs[0] = value;
        let coeffs = poly_mod_phi(coeffs, &ctx.phi);
        CyclotomicInteger {
            ctx: ctx.clone(),
            coeffs,
        }
    }

    /// Builds an element from coefficients of powers of `zeta`, reducing
    /// into the power basis when the slice is longer than the degree.
    pub fn from_coefficients(ctx: &Arc<RootContext>, coeffs: &[BigInt]) -> Self {
        CyclotomicInteger {
            ctx: ctx.clone(),
            coeffs: poly_mod_phi(coeffs.to_vec(), &ctx.phi),
        }
    }

    /// The element `zeta^k`, for any integer exponent.
    pub fn zeta_power(ctx: &Arc<RootContext>, k: i64) -> Self {
        let ell = ctx.ell as i64;
        let k = k.rem_euclid(ell) as usize;
        let mut mono = vec![BigInt::zero(); k + 1];
        mono[k] = BigInt::one();
        Self::from_coefficients(ctx, &mono)
    }

    pub fn context(&self) -> &Arc<RootContext> {
        &self.ctx
    }

    /// Power-basis coefficients, always exactly `degree` entries.
    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    fn assert_same_context(&self, other: &Self) {
        assert_eq!(
            self.ctx.ell, other.ctx.ell,
            "mixed root-of-unity orders in one operation"
        );
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        self.assert_same_context(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        CyclotomicInteger {
            ctx: self.ctx.clone(),
            coeffs,
        }
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.assert_same_context(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        CyclotomicInteger {
            ctx: self.ctx.clone(),
            coeffs,
        }
    }

    pub fn neg_ref(&self) -> Self {
        CyclotomicInteger {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        self.assert_same_context(other);
        let prod = poly_mul(&self.coeffs, &other.coeffs);
        CyclotomicInteger {
            ctx: self.ctx.clone(),
            coeffs: poly_mod_phi(prod, &self.ctx.phi),
        }
    }

    pub fn scale(&self, factor: &BigInt) -> Self {
        CyclotomicInteger {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ctx);
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

    /// Field norm down to `Z`, computed as the resultant of the minimal
    /// polynomial with the coefficient polynomial of this element.
    pub fn field_norm(&self) -> BigInt {
        let mut g = self.coeffs.clone();
        poly_trim(&mut g);
        if g.is_empty() {
            return BigInt::zero();
        }
        let m = self.ctx.degree();
        let n = g.len() - 1;
        if n == 0 {
            return num_traits::pow(g[0].clone(), m);
        }
        let f = &self.ctx.phi;
        let size = m + n;
        let mut s = vec![vec![BigInt::zero(); size]; size];
        for (r, row) in s.iter_mut().take(n).enumerate() {
            for j in 0..=m {
                row[r + j] = f[m - j].clone();
            }
        }
        for r in 0..m {
            for j in 0..=n {
                s[n + r][r + j] = g[n - j].clone();
            }
        }
        intmat::determinant(&s)
    }

    /// An element of `Z[zeta]` is a unit exactly when its norm is `1` or
    /// `-1`.
    pub fn is_unit(&self) -> bool {
        self.field_norm().abs().is_one()
    }

    /// Recognizes `sign * zeta^k`, returning `(sign, k)` when this element
    /// has that shape.
    pub fn as_unit_monomial(&self) -> Option<(i64, u64)> {
        for k in 0..self.ctx.ell {
            let z = Self::zeta_power(&self.ctx, k as i64);
            if *self == z {
                return Some((1, k));
            }
            if *self == z.neg_ref() {
                return Some((-1, k));
            }
        }
        None
    }

    /// Exact division in `Z[zeta]`, returning `None` when the quotient
    /// does not exist in the ring.
    ///
    /// Division by `sign * zeta^k` multiplies by the inverse directly;
    /// otherwise the quotient is solved from the multiplication matrix of
    /// the divisor by Cramer's rule, and every coordinate must divide
    /// exactly by the determinant, which is the divisor's norm up to sign.
    pub fn exact_div(&self, rhs: &Self) -> Option<Self> {
        self.assert_same_context(rhs);
        if rhs.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero(&self.ctx));
        }
        if let Some((sign, k)) = rhs.as_unit_monomial() {
            let inv = Self::zeta_power(&self.ctx, -(k as i64));
            let q = self.mul_ref(&inv);
            return Some(if sign < 0 { q.neg_ref() } else { q });
        }
        let m = self.ctx.degree();
        let mut mat = vec![vec![BigInt::zero(); m]; m];
        for j in 0..m {
            let col = rhs.mul_ref(&Self::zeta_power(&self.ctx, j as i64));
            for (i, row) in mat.iter_mut().enumerate() {
                row[j] = col.coeffs[i].clone();
            }
        }
        let (nums, det) = intmat::cramer_columns(&mat, &self.coeffs)?;
        let mut coeffs = Vec::with_capacity(m);
        for num in nums {
            let (q, r) = num.div_rem(&det);
            if !r.is_zero() {
                return None;
            }
            coeffs.push(q);
        }
        let out = CyclotomicInteger {
            ctx: self.ctx.clone(),
            coeffs,
        };
        debug_assert_eq!(out.mul_ref(rhs), *self);
        Some(out)
    }

    /// Inverse of a unit, or `None` when the element is not a unit.
    pub fn invert_unit(&self) -> Option<Self> {
        if !self.is_unit() {
            return None;
        }
        Self::one(&self.ctx).exact_div(self)
    }

    /// Parses the textual form produced by `Display`, an integer
    /// polynomial in `z` such as `1 - 2*z^3`. Whitespace is ignored and
    /// exponents of any size are reduced into the ring.
    pub fn parse(ctx: &Arc<RootContext>, text: &str) -> Result<Self, EngineError> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(EngineError::InvalidInput(
                "empty cyclotomic literal".into(),
            ));
        }
        let bad = |what: &str| EngineError::InvalidInput(format!("{what} in '{text}'"));
        let mut acc = Self::zero(ctx);
        let chars: Vec<char> = compact.chars().collect();
        let mut pos = 0;
        while pos < chars.len() {
            let mut negative = false;
            match chars[pos] {
                '+' => pos += 1,
                '-' => {
                    negative = true;
                    pos += 1;
                }
                _ if pos == 0 => {}
                _ => return Err(bad("expected '+' or '-' between terms")),
            }
            let digits_start = pos;
            while pos < chars.len() && chars[pos].is_ascii_digit() {
                pos += 1;
            }
            let mut coeff = if pos > digits_start {
                let digits: String = chars[digits_start..pos].iter().collect();
                digits
                    .parse::<BigInt>()
                    .map_err(|_| bad("unreadable coefficient"))?
            } else {
                BigInt::one()
            };
            if negative {
                coeff = -coeff;
            }
            let has_star = pos < chars.len() && chars[pos] == '*';
            if has_star {
                pos += 1;
            }
            let mut exponent = 0u64;
            if pos < chars.len() && chars[pos] == 'z' {
                pos += 1;
                exponent = 1;
                if pos < chars.len() && chars[pos] == '^' {
                    pos += 1;
                    let exp_start = pos;
                    while pos < chars.len() && chars[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    if pos == exp_start {
                        return Err(bad("missing exponent after '^'"));
                    }
                    let digits: String = chars[exp_start..pos].iter().collect();
                    exponent = digits.parse().map_err(|_| bad("unreadable exponent"))?;
                }
            } else {
                if has_star {
                    return Err(bad("expected 'z' after '*'"));
                }
                if pos == digits_start {
                    return Err(bad("expected a coefficient or 'z'"));
                }
            }
            let term = Self::zeta_power(ctx, (exponent % ctx.ell) as i64).scale(&coeff);
            acc = acc.add_ref(&term);
        }
        Ok(acc)
    }
}

impl fmt::Display for CyclotomicInteger {
    /// Renders as an integer polynomial in `z` with ascending powers,
    /// for example `1 - 2*z^3`. The zero element renders as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if wrote {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "z")?,
                (1, false) => write!(f, "{mag}*z")?,
                (_, true) => write!(f, "z^{k}")?,
                (_, false) => write!(f, "{mag}*z^{k}")?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &CyclotomicInteger {
    type Output = CyclotomicInteger;
    fn add(self, rhs: Self) -> CyclotomicInteger {
        self.add_ref(rhs)
    }
}

impl Sub for &CyclotomicInteger {
    type Output = CyclotomicInteger;
    fn sub(self, rhs: Self) -> CyclotomicInteger {
        self.sub_ref(rhs)
    }
}

impl Mul for &CyclotomicInteger {
    type Output = CyclotomicInteger;
    fn mul(self, rhs: Self) -> CyclotomicInteger {
        self.mul_ref(rhs)
    }
}

impl Neg for &CyclotomicInteger {
    type Output = CyclotomicInteger;
    fn neg(self) -> CyclotomicInteger {
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

    fn ints(values: &[i64]) -> Vec<BigInt> {
        values.iter().map(|&v| BigInt::from(v)).collect()
    }

    fn totient(n: u64) -> usize {
        (1..=n).filter(|&k| num_integer::gcd(n, k) == 1).count()
    }

    fn random_element(ctx: &Arc<RootContext>, rng: &mut ChaCha8Rng) -> CyclotomicInteger {
        let coeffs: Vec<BigInt> = (0..ctx.degree())
            .map(|_| BigInt::from(rng.gen_range(-9i64..=9)))
            .collect();
        CyclotomicInteger::from_coefficients(ctx, &coeffs)
    }

    #[test]
    fn minimal_polynomials_match_reference_tables() {
        let expected: &[(u64, &[i64])] = &[
            (1, &[-1, 1]),
            (2, &[1, 1]),
            (3, &[1, 1, 1]),
            (4, &[1, 0, 1]),
            (5, &[1, 1, 1, 1, 1]),
            (6, &[1, -1, 1]),
            (8, &[1, 0, 0, 0, 1]),
            (9, &[1, 0, 0, 1, 0, 0, 1]),
            (12, &[1, 0, -1, 0, 1]),
        ];
        for &(ell, coeffs) in expected {
            assert_eq!(
                ctx(ell).minimal_polynomial(),
                &ints(coeffs)[..],
                "wrong minimal polynomial for order {ell}"
            );
        }
    }

    #[test]
    fn degree_equals_euler_totient() {
        for ell in 1..=30 {
            assert_eq!(ctx(ell).degree(), totient(ell), "order {ell}");
        }
    }

    #[test]
    fn zeta_has_exact_order_and_vanishing_power_sum() {
        for ell in 1..=12u64 {
            let c = ctx(ell);
            let one = CyclotomicInteger::one(&c);
            assert_eq!(CyclotomicInteger::zeta_power(&c, ell as i64), one);
            for k in 1..ell {
                assert_ne!(
                    CyclotomicInteger::zeta_power(&c, k as i64),
                    one,
                    "zeta^{k} must not be 1 at order {ell}"
                );
            }
            if ell > 1 {
                let mut total = CyclotomicInteger::zero(&c);
                for k in 0..ell {
                    total = total.add_ref(&CyclotomicInteger::zeta_power(&c, k as i64));
                }
                assert!(total.is_zero(), "power sum at order {ell}");
            }
        }
    }

    #[test]
    fn norms_match_evaluation_oracles() {
        // The norm of 1 - zeta is the cyclotomic polynomial evaluated at 1,
        // and the norm of 1 + zeta is its value at -1. The norm of a
        // rational integer is its degree-th power.
        let c9 = ctx(9);
        let one_minus_zeta =
            CyclotomicInteger::one(&c9).sub_ref(&CyclotomicInteger::zeta_power(&c9, 1));
        assert_eq!(one_minus_zeta.field_norm(), BigInt::from(3));

        let c3 = ctx(3);
        assert_eq!(
            CyclotomicInteger::from_int(&c3, 2).field_norm(),
            BigInt::from(4)
        );

        let c5 = ctx(5);
        let one_plus_zeta =
            CyclotomicInteger::one(&c5).add_ref(&CyclotomicInteger::zeta_power(&c5, 1));
        assert_eq!(one_plus_zeta.field_norm(), BigInt::one());
        assert!(one_plus_zeta.is_unit());
    }

    #[test]
    fn norm_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for ell in [5u64, 9, 12] {
            let c = ctx(ell);
            for _ in 0..20 {
                let a = random_element(&c, &mut rng);
                let b = random_element(&c, &mut rng);
                assert_eq!(
                    a.mul_ref(&b).field_norm(),
                    a.field_norm() * b.field_norm(),
                    "order {ell}"
                );
            }
        }
    }

    #[test]
    fn unit_inverse_at_order_three() {
        let c = ctx(3);
        let u = CyclotomicInteger::one(&c).add_ref(&CyclotomicInteger::zeta_power(&c, 1));
        let v = CyclotomicInteger::one(&c).add_ref(&CyclotomicInteger::zeta_power(&c, 2));
        assert!(u.mul_ref(&v).is_one());
        assert_eq!(u.invert_unit().unwrap(), v);
        assert!(CyclotomicInteger::from_int(&c, 2).invert_unit().is_none());
    }

    #[test]
    fn exact_division_inverts_multiplication() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for ell in [3u64, 5, 9] {
            let c = ctx(ell);
            for _ in 0..25 {
                let a = random_element(&c, &mut rng);
                let mut b = random_element(&c, &mut rng);
                while b.is_zero() {
                    b = random_element(&c, &mut rng);
                }
                let product = a.mul_ref(&b);
                assert_eq!(product.exact_div(&b).unwrap(), a, "order {ell}");
            }
        }
    }

    #[test]
    fn division_by_signed_zeta_power_matches_general_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let c = ctx(9);
        for k in 0..9i64 {
            for sign in [1i64, -1] {
                let divisor = {
                    let z = CyclotomicInteger::zeta_power(&c, k);
                    if sign < 0 {
                        z.neg_ref()
                    } else {
                        z
                    }
                };
                assert_eq!(divisor.as_unit_monomial(), Some((sign, k as u64)));
                let a = random_element(&c, &mut rng);
                let q = a.exact_div(&divisor).unwrap();
                assert_eq!(q.mul_ref(&divisor), a);
            }
        }
    }

    #[test]
    fn division_detects_non_divisibility() {
        let c3 = ctx(3);
        let one = CyclotomicInteger::one(&c3);
        assert!(one.exact_div(&CyclotomicInteger::from_int(&c3, 2)).is_none());

        let c9 = ctx(9);
        let one_minus_zeta =
            CyclotomicInteger::one(&c9).sub_ref(&CyclotomicInteger::zeta_power(&c9, 1));
        assert!(CyclotomicInteger::one(&c9)
            .exact_div(&one_minus_zeta)
            .is_none());
    }

    #[test]
    fn render_and_parse_round_trip() {
        let c9 = ctx(9);
        let sample = CyclotomicInteger::from_coefficients(&c9, &ints(&[1, 0, 0, -2, 0, 0]));
        assert_eq!(sample.to_string(), "1 - 2*z^3");
        assert_eq!(CyclotomicInteger::parse(&c9, "1 - 2*z^3").unwrap(), sample);
        assert_eq!(CyclotomicInteger::parse(&c9, " 1-2 * z^3 ").unwrap(), sample);

        assert_eq!(CyclotomicInteger::zero(&c9).to_string(), "0");
        assert_eq!(
            CyclotomicInteger::parse(&c9, "0").unwrap(),
            CyclotomicInteger::zero(&c9)
        );
        let minus_z = CyclotomicInteger::zeta_power(&c9, 1).neg_ref();
        assert_eq!(minus_z.to_string(), "-z");
        assert_eq!(CyclotomicInteger::parse(&c9, "-z").unwrap(), minus_z);

        // Exponents at or above the degree reduce into the power basis.
        assert_eq!(
            CyclotomicInteger::parse(&c9, "z^6").unwrap(),
            CyclotomicInteger::zeta_power(&c9, 6)
        );

        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for ell in [1u64, 2, 5, 9, 12] {
            let c = ctx(ell);
            for _ in 0..20 {
                let a = random_element(&c, &mut rng);
                let rendered = a.to_string();
                assert_eq!(
                    CyclotomicInteger::parse(&c, &rendered).unwrap(),
                    a,
                    "round trip failed for '{rendered}' at order {ell}"
                );
            }
        }

        assert!(CyclotomicInteger::parse(&c9, "").is_err());
        assert!(CyclotomicInteger::parse(&c9, "2*").is_err());
        assert!(CyclotomicInteger::parse(&c9, "z^").is_err());
        assert!(CyclotomicInteger::parse(&c9, "1 ++ z").is_err());
    }

    #[test]
    fn order_one_behaves_like_plain_integers() {
        let c = ctx(1);
        assert_eq!(c.degree(), 1);
        assert_eq!(
            CyclotomicInteger::zeta_power(&c, 7),
            CyclotomicInteger::one(&c)
        );
        let minus_five = CyclotomicInteger::from_int(&c, -5);
        assert_eq!(minus_five.field_norm(), BigInt::from(-5));
        assert!(!minus_five.is_unit());
        assert!(CyclotomicInteger::from_int(&c, -1).is_unit());
    }
}
