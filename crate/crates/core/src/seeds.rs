//! Seeds: compatible matrix pairs together with a frame of torus elements.
//!
//! A seed holds an extended exchange matrix, a skew form presenting how the
//! frame elements quasi-commute, and the frame itself: one torus element
//! per direction, all living in a fixed ambient torus. Mutation in an
//! exchangeable direction replaces one frame element by an exact left
//! quotient and transports the matrix pair through the usual unimodular
//! `E` and `F` matrices, computing both sign choices and insisting they
//! agree.
//!
//! Compatibility is checked modulo `l`: the transpose of the exchange
//! matrix against the form must be a diagonal matrix in the exchangeable
//! rows and zero elsewhere. The canonical positive diagonal is recovered
//! per connected component of the principal part by propagating the
//! symmetrizer ratios and then choosing the smallest multiplier in
//! `1..=l` that reproduces the observed residues.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::cyclotomic::RootContext;
use crate::error::EngineError;
use crate::torus::{SkewForm, TorusElement};

/// An extended exchange matrix: all rows, one column per exchangeable
/// direction. Columns are ordered by ascending exchangeable index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExchangeMatrix {
    rows: usize,
    ex: Vec<usize>,
    entries: Vec<Vec<i64>>,
}

impl ExchangeMatrix {
    pub fn new(rows: usize, ex: Vec<usize>, entries: Vec<Vec<i64>>) -> Result<Self, EngineError> {
        if ex.windows(2).any(|w| w[0] >= w[1]) {
            return Err(EngineError::InvalidInput(
                "exchangeable indices must be strictly increasing".into(),
            ));
        }
        if ex.iter().any(|&k| k >= rows) {
            return Err(EngineError::InvalidInput(
                "exchangeable index out of range".into(),
            ));
        }
        if entries.len() != rows {
            return Err(EngineError::DimensionMismatch {
                expected: rows,
                got: entries.len(),
            });
        }
        for row in &entries {
            if row.len() != ex.len() {
                return Err(EngineError::DimensionMismatch {
                    expected: ex.len(),
                    got: row.len(),
                });
            }
        }
        for (j, &k) in ex.iter().enumerate() {
            if entries[k][j] != 0 {
                return Err(EngineError::InvalidInput(format!(
                    "exchange matrix must vanish on its principal diagonal, found {} at direction {k}",
                    entries[k][j]
                )));
            }
        }
        Ok(ExchangeMatrix { rows, ex, entries })
    }

    /// Number of directions, exchangeable and frozen together.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// The exchangeable directions, ascending.
    pub fn exchangeable(&self) -> &[usize] {
        &self.ex
    }

    pub fn is_exchangeable(&self, k: usize) -> bool {
        self.ex.binary_search(&k).is_ok()
    }

    /// Column position of an exchangeable direction.
    pub fn column_position(&self, k: usize) -> Option<usize> {
        self.ex.binary_search(&k).ok()
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    /// Entry in row `i` of the column attached to direction `k`.
    pub fn entry(&self, i: usize, k: usize) -> i64 {
        let pos = self.column_position(k).expect("column must be exchangeable");
        self.entries[i][pos]
    }

    /// The full column attached to exchangeable direction `k`.
    pub fn column(&self, k: usize) -> Vec<i64> {
        let pos = self.column_position(k).expect("column must be exchangeable");
        self.entries.iter().map(|row| row[pos]).collect()
    }

    /// The row mutation matrix for direction `k` and sign `s`: identity
    /// except in column `k`, where the diagonal is `-1` and row `i` holds
    /// the positive part of `-s * b[i][k]`.
    pub fn e_matrix(&self, k: usize, s: i64) -> Vec<Vec<i64>> {
        let pos = self.column_position(k).expect("column must be exchangeable");
        let mut e = identity(self.rows);
        e[k][k] = -1;
        for i in 0..self.rows {
            if i != k {
                e[i][k] = (-s * self.entries[i][pos]).max(0);
            }
        }
        e
    }

    /// The column mutation matrix for direction `k` and sign `s`: identity
    /// except in the row of `k`, where the diagonal is `-1` and column `j`
    /// holds the positive part of `s * b[k][j]`.
    pub fn f_matrix(&self, k: usize, s: i64) -> Vec<Vec<i64>> {
        let pos = self.column_position(k).expect("column must be exchangeable");
        let m = self.ex.len();
        let mut f = identity(m);
        f[pos][pos] = -1;
        for j in 0..m {
            if j != pos {
                f[pos][j] = (s * self.entries[k][j]).max(0);
            }
        }
        f
    }

    /// The mutated matrix `E_s * B * F_s`, computed for both signs, which
    /// must agree.
    pub fn mutated(&self, k: usize) -> Result<Self, EngineError> {
        if !self.is_exchangeable(k) {
            return Err(EngineError::InvalidInput(format!(
                "direction {k} is not exchangeable"
            )));
        }
        let plus = mat_mul(&mat_mul(&self.e_matrix(k, 1), &self.entries), &self.f_matrix(k, 1));
        let minus = mat_mul(
            &mat_mul(&self.e_matrix(k, -1), &self.entries),
            &self.f_matrix(k, -1),
        );
        if plus != minus {
            return Err(EngineError::Incompatible(
                "the two mutation sign conventions disagree on the exchange matrix".into(),
            ));
        }
        ExchangeMatrix::new(self.rows, self.ex.clone(), plus)
    }

    /// The matrix in permuted coordinates: new direction `i` is old
    /// direction `sigma[i]`, with columns reordered to keep the
    /// exchangeable indices ascending.
    pub fn permuted(&self, sigma: &[usize]) -> Self {
        assert_eq!(sigma.len(), self.rows);
        let mut inverse = vec![0usize; self.rows];
        for (new, &old) in sigma.iter().enumerate() {
            inverse[old] = new;
        }
        let mut cols: Vec<(usize, usize)> = self
            .ex
            .iter()
            .enumerate()
            .map(|(pos, &old_k)| (inverse[old_k], pos))
            .collect();
        cols.sort_unstable();
        let ex: Vec<usize> = cols.iter().map(|&(k, _)| k).collect();
        let entries: Vec<Vec<i64>> = (0..self.rows)
            .map(|i| cols.iter().map(|&(_, pos)| self.entries[sigma[i]][pos]).collect())
            .collect();
        ExchangeMatrix {
            rows: self.rows,
            ex,
            entries,
        }
    }
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0i64; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let rows = a.len();
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![0i64; cols]; rows];
    for (i, out_row) in out.iter_mut().enumerate() {
        for (j, cell) in out_row.iter_mut().enumerate() {
            let mut acc: i128 = 0;
            for k in 0..inner {
                acc += a[i][k] as i128 * b[k][j] as i128;
            }
            *cell = i64::try_from(acc).expect("matrix entry overflow");
        }
    }
    out
}

/// The verdict of a compatibility check: observed diagonal residues, the
/// canonical positive diagonal, and whether the coprimality assumption
/// holds for the order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compatibility {
    pub residues: Vec<u64>,
    pub diagonal: Vec<u64>,
    pub coprime: bool,
}

/// Checks the congruences pairing the form against the exchange matrix:
/// summing `b[k][j] * lambda[k][i]` over `k` must vanish modulo `l`
/// unless `i` is the direction of column `j`, where it gives the diagonal
/// residue. The canonical diagonal scales the primitive symmetrizer of
/// each connected component of the principal part by the smallest
/// multiplier in `1..=l` matching those residues.
pub fn check_compatibility(
    lambda: &SkewForm,
    btilde: &ExchangeMatrix,
) -> Result<Compatibility, EngineError> {
    let n_total = btilde.rows();
    if lambda.dim() != n_total {
        return Err(EngineError::DimensionMismatch {
            expected: n_total,
            got: lambda.dim(),
        });
    }
    let ell = lambda.ell();
    let ex = btilde.exchangeable();
    let mut residues = vec![0u64; ex.len()];
    for (j, &kj) in ex.iter().enumerate() {
        for i in 0..n_total {
            let mut acc: i128 = 0;
            for k in 0..n_total {
                acc += btilde.entries()[k][j] as i128 * lambda.residue(k, i) as i128;
                acc = acc.rem_euclid(ell as i128);
            }
            let value = acc.rem_euclid(ell as i128) as u64;
            if i == kj {
                residues[j] = value;
            } else if value != 0 {
                return Err(EngineError::Incompatible(format!(
                    "pairing of column {kj} with direction {i} is {value}, not 0, modulo {ell}"
                )));
            }
        }
    }

    let diagonal = canonical_diagonal(btilde, &residues, ell)?;
    let coprime = ell % 2 == 1
        && diagonal
            .iter()
            .all(|&d| num_integer::gcd(ell, d) == 1);
    Ok(Compatibility {
        residues,
        diagonal,
        coprime,
    })
}

/// Primitive positive symmetrizer per component, scaled to match the
/// observed residues.
fn canonical_diagonal(
    btilde: &ExchangeMatrix,
    residues: &[u64],
    ell: u64,
) -> Result<Vec<u64>, EngineError> {
    let ex = btilde.exchangeable();
    let m = ex.len();
    let b = |i: usize, j: usize| -> i64 { btilde.entries()[ex[i]][j] };

    let mut component = vec![usize::MAX; m];
    let mut n_components = 0usize;
    for start in 0..m {
        if component[start] != usize::MAX {
            continue;
        }
        let id = n_components;
        n_components += 1;
        let mut stack = vec![start];
        component[start] = id;
        while let Some(i) = stack.pop() {
            for j in 0..m {
                if component[j] == usize::MAX && (b(i, j) != 0 || b(j, i) != 0) {
                    component[j] = id;
                    stack.push(j);
                }
            }
        }
    }

    let mut diagonal = vec![0u64; m];
    for id in 0..n_components {
        let members: Vec<usize> = (0..m).filter(|&j| component[j] == id).collect();
        // Propagate the ratios d_i * b[i][j] = -d_j * b[j][i] as exact
        // fractions from the first member, then clear denominators.
        let mut num = vec![0i128; m];
        let mut den = vec![0i128; m];
        num[members[0]] = 1;
        den[members[0]] = 1;
        let mut queue = vec![members[0]];
        while let Some(i) = queue.pop() {
            for &j in &members {
                if den[j] != 0 {
                    continue;
                }
                let bij = b(i, j) as i128;
                let bji = b(j, i) as i128;
                if bij == 0 && bji == 0 {
                    continue;
                }
                if bij == 0 || bji == 0 {
                    return Err(EngineError::Incompatible(format!(
                        "principal entries at ({}, {}) are not simultaneously zero",
                        ex[i], ex[j]
                    )));
                }
                // d_j = d_i * (-b_ij) / b_ji
                let mut nj = num[i] * -bij;
                let mut dj = den[i] * bji;
                if dj < 0 {
                    nj = -nj;
                    dj = -dj;
                }
                let g = gcd_i128(nj.abs(), dj);
                num[j] = nj / g;
                den[j] = dj / g;
                queue.push(j);
            }
        }
        let mut lcm: i128 = 1;
        for &j in &members {
            lcm = lcm / gcd_i128(lcm, den[j]) * den[j];
        }
        let mut delta: Vec<i128> = members.iter().map(|&j| num[j] * (lcm / den[j])).collect();
        let mut g: i128 = 0;
        for &v in &delta {
            g = gcd_i128(g, v.abs());
        }
        for v in &mut delta {
            *v /= g;
        }
        if delta.iter().any(|&v| v <= 0) {
            return Err(EngineError::Incompatible(
                "principal part has no positive symmetrizer".into(),
            ));
        }
        for (idx, &i) in members.iter().enumerate() {
            for (jdx, &j) in members.iter().enumerate() {
                if delta[idx] * b(i, j) as i128 != -delta[jdx] * b(j, i) as i128 {
                    return Err(EngineError::Incompatible(format!(
                        "symmetrizer condition fails between directions {} and {}",
                        ex[i], ex[j]
                    )));
                }
            }
        }
        let scale = (1..=ell).find(|&s| {
            members.iter().enumerate().all(|(idx, &j)| {
                (s as i128 * delta[idx]).rem_euclid(ell as i128) as u64 == residues[j]
            })
        });
        let scale = scale.ok_or_else(|| {
            EngineError::Incompatible(
                "observed diagonal residues are not a multiple of the symmetrizer".into(),
            )
        })?;
        for (idx, &j) in members.iter().enumerate() {
            diagonal[j] = u64::try_from(scale as i128 * delta[idx])
                .expect("diagonal entry overflow");
        }
    }
    Ok(diagonal)
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let g = num_integer::gcd(a, b);
    if g == 0 {
        1
    } else {
        g
    }
}

/// A seed: a compatible pair plus a frame of torus elements.
#[derive(Clone, Debug)]
pub struct Seed {
    ambient: Arc<SkewForm>,
    lambda: Arc<SkewForm>,
    btilde: ExchangeMatrix,
    inverted: Vec<usize>,
    frame: Vec<TorusElement>,
    compat: Compatibility,
}

impl PartialEq for Seed {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient
            && self.lambda == other.lambda
            && self.btilde == other.btilde
            && self.inverted == other.inverted
            && self.frame == other.frame
    }
}

impl Eq for Seed {}

impl Seed {
    /// A seed with the standard frame `X^(e_i)` over the given form.
    pub fn standard(
        lambda: &Arc<SkewForm>,
        btilde: ExchangeMatrix,
        inverted: Vec<usize>,
    ) -> Result<Self, EngineError> {
        let frame = (0..lambda.dim())
            .map(|i| TorusElement::generator(lambda, i))
            .collect();
        Self::with_frame(lambda, lambda, btilde, inverted, frame)
    }

    /// A seed with an explicit frame. The elements live in the ambient
    /// torus and must quasi-commute according to the presentation form.
    pub fn with_frame(
        ambient: &Arc<SkewForm>,
        lambda: &Arc<SkewForm>,
        btilde: ExchangeMatrix,
        inverted: Vec<usize>,
        frame: Vec<TorusElement>,
    ) -> Result<Self, EngineError> {
        let n = btilde.rows();
        if lambda.dim() != n || ambient.dim() != n {
            return Err(EngineError::DimensionMismatch {
                expected: n,
                got: lambda.dim().min(ambient.dim()),
            });
        }
        if ambient.ell() != lambda.ell() {
            return Err(EngineError::InvalidInput(
                "ambient and presentation forms have different orders".into(),
            ));
        }
        if frame.len() != n {
            return Err(EngineError::DimensionMismatch {
                expected: n,
                got: frame.len(),
            });
        }
        for x in &frame {
            if x.form() != ambient {
                return Err(EngineError::InvalidInput(
                    "frame elements must live in the ambient torus".into(),
                ));
            }
            if x.is_zero() {
                return Err(EngineError::InvalidInput(
                    "frame elements must be nonzero".into(),
                ));
            }
        }
        if inverted.windows(2).any(|w| w[0] >= w[1]) || inverted.iter().any(|&k| k >= n) {
            return Err(EngineError::InvalidInput(
                "inverted directions must be strictly increasing and in range".into(),
            ));
        }
        if inverted.iter().any(|k| btilde.is_exchangeable(*k)) {
            return Err(EngineError::InvalidInput(
                "only frozen directions can be marked inverted".into(),
            ));
        }
        for i in 0..n {
            for j in i + 1..n {
                if !frame[i].quasi_commutes_with(&frame[j], lambda.residue(i, j)) {
                    return Err(EngineError::InvalidInput(format!(
                        "frame elements {i} and {j} do not quasi-commute as the presentation form claims"
                    )));
                }
            }
        }
        let compat = check_compatibility(lambda, &btilde)?;
        Ok(Seed {
            ambient: ambient.clone(),
            lambda: lambda.clone(),
            btilde,
            inverted,
            frame,
            compat,
        })
    }

    pub fn context(&self) -> &Arc<RootContext> {
        self.ambient.context()
    }

    pub fn ell(&self) -> u64 {
        self.ambient.ell()
    }

    /// Number of directions, exchangeable and frozen together.
    pub fn dim(&self) -> usize {
        self.ambient.dim()
    }

    pub fn ambient(&self) -> &Arc<SkewForm> {
        &self.ambient
    }

    /// The presentation form: how the current frame quasi-commutes.
    pub fn lambda(&self) -> &Arc<SkewForm> {
        &self.lambda
    }

    pub fn btilde(&self) -> &ExchangeMatrix {
        &self.btilde
    }

    pub fn exchangeable(&self) -> &[usize] {
        self.btilde.exchangeable()
    }

    pub fn inverted(&self) -> &[usize] {
        &self.inverted
    }

    pub fn frame(&self) -> &[TorusElement] {
        &self.frame
    }

    pub fn compatibility(&self) -> &Compatibility {
        &self.compat
    }

    /// Errors unless the order is odd and coprime to every canonical
    /// diagonal entry, the hypothesis under which the classical
    /// comparison results hold.
    pub fn ensure_coprime(&self) -> Result<(), EngineError> {
        if self.compat.coprime {
            return Ok(());
        }
        let ell = self.ell();
        let detail = if ell % 2 == 0 {
            "the order is even".to_string()
        } else {
            let d = self
                .compat
                .diagonal
                .iter()
                .find(|&&d| num_integer::gcd(ell, d) != 1)
                .copied()
                .unwrap_or(0);
            format!("gcd of the order and the diagonal entry {d} exceeds 1")
        };
        Err(EngineError::CoprimeViolated { ell, detail })
    }

    /// The standard seed at order one with the same exchange matrix and
    /// inverted set: the classical shadow this seed's central structure
    /// is compared against.
    pub fn classical_twin(&self) -> Result<Seed, EngineError> {
        let ctx = crate::cyclotomic::RootContext::new(1)?;
        let form = SkewForm::zero(&ctx, self.dim());
        let btilde = ExchangeMatrix::new(
            self.dim(),
            self.btilde.exchangeable().to_vec(),
            self.btilde.entries().to_vec(),
        )?;
        Seed::standard(&form, btilde, self.inverted.clone())
    }

    /// Canonical diagonal entry for exchangeable direction `k`.
    pub fn diagonal_for(&self, k: usize) -> Option<u64> {
        self.btilde
            .column_position(k)
            .map(|pos| self.compat.diagonal[pos])
    }

    /// The frame monomial: the ordered product of frame element powers,
    /// twisted so that for the standard frame it is exactly `X^g`.
    pub fn frame_monomial(&self, g: &[i64]) -> Result<TorusElement, EngineError> {
        let n = self.dim();
        assert_eq!(g.len(), n, "exponent length mismatch");
        let ell = self.ell() as i128;
        let mut acc: i128 = 0;
        for i in 0..n {
            for j in i + 1..n {
                acc += g[i] as i128 * g[j] as i128 * self.lambda.residue(i, j) as i128;
                acc = acc.rem_euclid(ell);
            }
        }
        let mut out = TorusElement::one(&self.ambient).scale_zeta(-(acc as i64));
        for (i, x) in self.frame.iter().enumerate() {
            if g[i] != 0 {
                out = out.mul_ref(&x.pow_int(g[i])?);
            }
        }
        Ok(out)
    }

    /// The residue `L(e_k, v)` of the presentation form against a vector.
    fn lambda_row(&self, k: usize, v: &[i64]) -> u64 {
        let mut unit = vec![0i64; self.dim()];
        unit[k] = 1;
        self.lambda.pairing(&unit, v)
    }

    /// The twist of the two exchange monomials in direction `k`, which
    /// compatibility forces to equal the diagonal residue.
    pub fn exchange_twist(&self, k: usize) -> u64 {
        let col = self.btilde.column(k);
        let mut lo: Vec<i64> = col.iter().map(|&v| (-v).max(0)).collect();
        let mut hi: Vec<i64> = col.iter().map(|&v| v.max(0)).collect();
        lo[k] -= 1;
        hi[k] -= 1;
        self.lambda.pairing(&lo, &hi)
    }

    /// Mutates the seed in exchangeable direction `k`.
    ///
    /// The new frame element is the exact left quotient of the two-term
    /// exchange sum by the old element; the matrix pair is transported by
    /// the sign-independent `E` and `F` matrices.
    pub fn mutate(&self, k: usize, safety: u64) -> Result<Seed, EngineError> {
        if !self.btilde.is_exchangeable(k) {
            return Err(EngineError::InvalidInput(format!(
                "direction {k} is not exchangeable"
            )));
        }
        let col = self.btilde.column(k);
        let bplus: Vec<i64> = col.iter().map(|&v| v.max(0)).collect();
        let bminus: Vec<i64> = col.iter().map(|&v| (-v).max(0)).collect();
        let m_plus = self.frame_monomial(&bplus)?;
        let m_minus = self.frame_monomial(&bminus)?;
        let sum = m_plus
            .scale_zeta(self.lambda_row(k, &bplus) as i64)
            .add_ref(&m_minus.scale_zeta(self.lambda_row(k, &bminus) as i64));
        let new_var = sum.exact_left_divide(&self.frame[k], safety)?;

        let e_plus = self.btilde.e_matrix(k, 1);
        let e_minus = self.btilde.e_matrix(k, -1);
        let lambda_plus = self.lambda.conjugated(&e_plus);
        let lambda_minus = self.lambda.conjugated(&e_minus);
        if lambda_plus.residues() != lambda_minus.residues() {
            return Err(EngineError::Incompatible(
                "the two mutation sign conventions disagree on the form".into(),
            ));
        }
        let btilde = self.btilde.mutated(k)?;

        let mut frame = self.frame.clone();
        frame[k] = new_var;
        let compat = check_compatibility(&lambda_plus, &btilde)?;
        Ok(Seed {
            ambient: self.ambient.clone(),
            lambda: lambda_plus,
            btilde,
            inverted: self.inverted.clone(),
            frame,
            compat,
        })
    }

    /// Renders every frame element.
    pub fn render_frame(&self) -> Vec<String> {
        self.frame.iter().map(|x| x.to_string()).collect()
    }

    /// The seed in permuted coordinates: new direction `i` is old
    /// direction `sigma[i]`.
    pub fn permuted(&self, sigma: &[usize]) -> Seed {
        let n = self.dim();
        assert_eq!(sigma.len(), n);
        let ambient = self.ambient.permuted(sigma);
        let lambda = self.lambda.permuted(sigma);
        let btilde = self.btilde.permuted(sigma);
        let mut inverse = vec![0usize; n];
        for (new, &old) in sigma.iter().enumerate() {
            inverse[old] = new;
        }
        let mut inverted: Vec<usize> = self.inverted.iter().map(|&k| inverse[k]).collect();
        inverted.sort_unstable();
        let frame: Vec<TorusElement> = sigma
            .iter()
            .map(|&old| self.frame[old].permute_coordinates(sigma, &ambient))
            .collect();
        let compat = check_compatibility(&lambda, &btilde)
            .expect("permutation preserves compatibility");
        Seed {
            ambient,
            lambda,
            btilde,
            inverted,
            frame,
            compat,
        }
    }

    /// Renames the directions without touching the ambient torus: new
    /// direction `i` is old direction `sigma[i]`, so the frame elements
    /// stay the same torus elements in a new order, and the presentation
    /// form and the exchange matrix are reindexed to match. Two seeds in
    /// the same torus describe the same point of the exchange graph
    /// exactly when one is a relabeling of the other.
    pub fn relabel_directions(&self, sigma: &[usize]) -> Seed {
        let n = self.dim();
        assert_eq!(sigma.len(), n);
        let lambda = self.lambda.permuted(sigma);
        let btilde = self.btilde.permuted(sigma);
        let mut inverse = vec![0usize; n];
        for (new, &old) in sigma.iter().enumerate() {
            inverse[old] = new;
        }
        let mut inverted: Vec<usize> = self.inverted.iter().map(|&k| inverse[k]).collect();
        inverted.sort_unstable();
        let frame: Vec<TorusElement> = sigma.iter().map(|&old| self.frame[old].clone()).collect();
        let compat = check_compatibility(&lambda, &btilde)
            .expect("relabeling preserves compatibility");
        Seed {
            ambient: self.ambient.clone(),
            lambda,
            btilde,
            inverted,
            frame,
            compat,
        }
    }

    /// Serializes the seed. Directions are 1-based in the JSON form. The
    /// ambient form is written only when it differs from the presentation,
    /// which happens after mutation.
    pub fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("l".into(), json!(self.ell()));
        obj.insert("N".into(), json!(self.dim()));
        obj.insert(
            "ex".into(),
            json!(self
                .exchangeable()
                .iter()
                .map(|k| k + 1)
                .collect::<Vec<_>>()),
        );
        obj.insert(
            "inv".into(),
            json!(self.inverted.iter().map(|k| k + 1).collect::<Vec<_>>()),
        );
        obj.insert("lambda".into(), json!(self.lambda.residues()));
        if let Some(lift) = self.lambda.lift() {
            obj.insert("lambda_lift".into(), json!(lift));
        }
        obj.insert("B".into(), json!(self.btilde.entries()));
        if self.ambient != self.lambda {
            obj.insert("ambient".into(), json!(self.ambient.residues()));
            if let Some(lift) = self.ambient.lift() {
                obj.insert("ambient_lift".into(), json!(lift));
            }
        }
        let standard = self
            .frame
            .iter()
            .enumerate()
            .all(|(i, x)| *x == TorusElement::generator(&self.ambient, i));
        if standard {
            obj.insert("frame".into(), json!("standard"));
        } else {
            obj.insert(
                "frame".into(),
                Value::Array(self.frame.iter().map(|x| x.to_json()).collect()),
            );
        }
        Value::Object(obj)
    }

    /// Parses the format produced by [`Seed::to_json`].
    pub fn from_json(value: &Value) -> Result<Seed, EngineError> {
        let obj = value
            .as_object()
            .ok_or_else(|| EngineError::InvalidInput("seed must be a JSON object".into()))?;
        let get = |key: &str| {
            obj.get(key)
                .ok_or_else(|| EngineError::InvalidInput(format!("seed is missing '{key}'")))
        };
        let ell = get("l")?
            .as_u64()
            .ok_or_else(|| EngineError::InvalidInput("'l' must be a positive integer".into()))?;
        let ctx = RootContext::new(ell)?;
        let n = get("N")?
            .as_u64()
            .ok_or_else(|| EngineError::InvalidInput("'N' must be a positive integer".into()))?
            as usize;
        let ex = one_based_indices(get("ex")?, n, "ex")?;
        let inverted = match obj.get("inv") {
            Some(v) => one_based_indices(v, n, "inv")?,
            None => Vec::new(),
        };
        let lambda = match obj.get("lambda_lift") {
            Some(lift_val) => {
                let lift = i64_matrix(lift_val, "lambda_lift")?;
                let form = SkewForm::from_lift(&ctx, lift)?;
                if let Some(res_val) = obj.get("lambda") {
                    let residues = u64_matrix(res_val, "lambda")?;
                    if form.residues() != residues.as_slice() {
                        return Err(EngineError::InvalidInput(
                            "'lambda' does not match 'lambda_lift' modulo l".into(),
                        ));
                    }
                }
                form
            }
            None => SkewForm::from_residues(&ctx, u64_matrix(get("lambda")?, "lambda")?)?,
        };
        let ambient = match obj.get("ambient") {
            Some(res_val) => match obj.get("ambient_lift") {
                Some(lift_val) => {
                    let form = SkewForm::from_lift(&ctx, i64_matrix(lift_val, "ambient_lift")?)?;
                    if form.residues() != u64_matrix(res_val, "ambient")?.as_slice() {
                        return Err(EngineError::InvalidInput(
                            "'ambient' does not match 'ambient_lift' modulo l".into(),
                        ));
                    }
                    form
                }
                None => SkewForm::from_residues(&ctx, u64_matrix(res_val, "ambient")?)?,
            },
            None => lambda.clone(),
        };
        let b_entries = i64_matrix(get("B")?, "B")?;
        let btilde = ExchangeMatrix::new(n, ex, b_entries)?;
        let frame_val = get("frame")?;
        if frame_val.as_str() == Some("standard") {
            if ambient != lambda {
                return Err(EngineError::InvalidInput(
                    "a standard frame requires the ambient form to equal the presentation".into(),
                ));
            }
            Seed::standard(&lambda, btilde, inverted)
        } else {
            let items = frame_val.as_array().ok_or_else(|| {
                EngineError::InvalidInput("'frame' must be \"standard\" or an array".into())
            })?;
            let frame: Result<Vec<TorusElement>, EngineError> = items
                .iter()
                .map(|item| TorusElement::from_json(&ambient, item))
                .collect();
            Seed::with_frame(&ambient, &lambda, btilde, inverted, frame?)
        }
    }
}

fn one_based_indices(v: &Value, n: usize, key: &str) -> Result<Vec<usize>, EngineError> {
    let items = v
        .as_array()
        .ok_or_else(|| EngineError::InvalidInput(format!("'{key}' must be an array")))?;
    let mut out = Vec::with_capacity(items.len());
    for item in items {
        let idx = item
            .as_u64()
            .filter(|&i| i >= 1 && i <= n as u64)
            .ok_or_else(|| {
                EngineError::InvalidInput(format!("'{key}' entries must be 1-based indices up to {n}"))
            })?;
        out.push(idx as usize - 1);
    }
    Ok(out)
}

fn i64_matrix(v: &Value, key: &str) -> Result<Vec<Vec<i64>>, EngineError> {
    let rows = v
        .as_array()
        .ok_or_else(|| EngineError::InvalidInput(format!("'{key}' must be a matrix")))?;
    rows.iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| EngineError::InvalidInput(format!("'{key}' must be a matrix")))?
                .iter()
                .map(|x| {
                    x.as_i64().ok_or_else(|| {
                        EngineError::InvalidInput(format!("'{key}' entries must fit in i64"))
                    })
                })
                .collect()
        })
        .collect()
}

fn u64_matrix(v: &Value, key: &str) -> Result<Vec<Vec<u64>>, EngineError> {
    let rows = v
        .as_array()
        .ok_or_else(|| EngineError::InvalidInput(format!("'{key}' must be a matrix")))?;
    rows.iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| EngineError::InvalidInput(format!("'{key}' must be a matrix")))?
                .iter()
                .map(|x| {
                    x.as_u64().ok_or_else(|| {
                        EngineError::InvalidInput(format!(
                            "'{key}' entries must be nonnegative integers"
                        ))
                    })
                })
                .collect()
        })
        .collect()
}

/// Convenience map from global exchangeable index to canonical diagonal.
pub fn diagonal_by_direction(seed: &Seed) -> BTreeMap<usize, u64> {
    seed.exchangeable()
        .iter()
        .zip(&seed.compatibility().diagonal)
        .map(|(&k, &d)| (k, d))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::CyclotomicInteger;
    use crate::torus::DEFAULT_DIVISION_SAFETY;

    fn ctx(ell: u64) -> Arc<RootContext> {
        RootContext::new(ell).unwrap()
    }

    fn form(ell: u64, lift: Vec<Vec<i64>>) -> Arc<SkewForm> {
        SkewForm::from_lift(&ctx(ell), lift).unwrap()
    }

    fn full_ex_matrix(entries: Vec<Vec<i64>>) -> ExchangeMatrix {
        let n = entries.len();
        ExchangeMatrix::new(n, (0..n).collect(), entries).unwrap()
    }

    fn a2_seed(ell: u64) -> Seed {
        let lambda = form(ell, vec![vec![0, 1], vec![-1, 0]]);
        let btilde = full_ex_matrix(vec![vec![0, 1], vec![-1, 0]]);
        Seed::standard(&lambda, btilde, vec![]).unwrap()
    }

    fn b2_seed(ell: u64) -> Seed {
        let lambda = form(ell, vec![vec![0, 1], vec![-1, 0]]);
        let btilde = full_ex_matrix(vec![vec![0, 1], vec![-2, 0]]);
        Seed::standard(&lambda, btilde, vec![]).unwrap()
    }

    #[test]
    fn compatibility_reports_canonical_diagonal() {
        let a2 = a2_seed(5);
        assert_eq!(a2.compatibility().diagonal, vec![1, 1]);
        assert!(a2.compatibility().coprime);

        let b2 = b2_seed(5);
        assert_eq!(b2.compatibility().residues, vec![2, 1]);
        assert_eq!(b2.compatibility().diagonal, vec![2, 1]);
        assert!(b2.compatibility().coprime);

        // Scaling the form scales the recovered diagonal through the
        // minimal multiplier.
        let lambda = form(7, vec![vec![0, 2], vec![-2, 0]]);
        let btilde = full_ex_matrix(vec![vec![0, 1], vec![-1, 0]]);
        let seed = Seed::standard(&lambda, btilde, vec![]).unwrap();
        assert_eq!(seed.compatibility().diagonal, vec![2, 2]);
    }

    #[test]
    fn compatibility_rejects_bad_pairs() {
        // Equal off-diagonal signs admit no positive symmetrizer.
        let lambda = form(5, vec![vec![0, 1], vec![-1, 0]]);
        let btilde = full_ex_matrix(vec![vec![0, -1], vec![-1, 0]]);
        assert!(matches!(
            check_compatibility(&lambda, &btilde),
            Err(EngineError::Incompatible(_))
        ));

        // A frozen row that pairs nontrivially with an exchangeable
        // column violates the off-diagonal congruence.
        let lambda = form(
            5,
            vec![vec![0, 1, 1], vec![-1, 0, 0], vec![-1, 0, 0]],
        );
        let btilde =
            ExchangeMatrix::new(3, vec![0, 1], vec![vec![0, 1], vec![-1, 0], vec![1, 0]])
                .unwrap();
        assert!(matches!(
            check_compatibility(&lambda, &btilde),
            Err(EngineError::Incompatible(_))
        ));
    }

    #[test]
    fn zero_column_directions_get_diagonal_l() {
        // With a zero exchange matrix every residue is zero, so the
        // canonical diagonal is l itself and coprimality fails.
        let lambda = form(3, vec![vec![0, 0], vec![0, 0]]);
        let btilde = full_ex_matrix(vec![vec![0, 0], vec![0, 0]]);
        let compat = check_compatibility(&lambda, &btilde).unwrap();
        assert_eq!(compat.diagonal, vec![3, 3]);
        assert!(!compat.coprime);
    }

    #[test]
    fn standard_frame_monomials_are_plain_monomials() {
        let seed = a2_seed(5);
        for g in [[2i64, 3], [-1, 4], [0, 0], [-2, -5]] {
            let m = seed.frame_monomial(&g).unwrap();
            let expected = TorusElement::monomial(
                seed.ambient(),
                g.to_vec(),
                CyclotomicInteger::one(seed.context()),
            );
            assert_eq!(m, expected, "exponent {g:?}");
        }
    }

    #[test]
    fn mutation_matches_frozen_rank_one_example() {
        let lambda = form(5, vec![vec![0, -1], vec![1, 0]]);
        let btilde = ExchangeMatrix::new(2, vec![0], vec![vec![0], vec![1]]).unwrap();
        let seed = Seed::standard(&lambda, btilde, vec![]).unwrap();
        let mutated = seed.mutate(0, DEFAULT_DIVISION_SAFETY).unwrap();
        let one = CyclotomicInteger::one(seed.context());
        let expected = TorusElement::monomial(seed.ambient(), vec![-1, 1], one.clone())
            .add_ref(&TorusElement::monomial(seed.ambient(), vec![-1, 0], one));
        assert_eq!(mutated.frame()[0], expected);

        // The exchange relation itself.
        let z4 = TorusElement::monomial(
            seed.ambient(),
            vec![0, 1],
            CyclotomicInteger::zeta_power(seed.context(), 4),
        );
        let rhs = z4.add_ref(&TorusElement::one(seed.ambient()));
        assert_eq!(seed.frame()[0].mul_ref(&mutated.frame()[0]), rhs);
    }

    #[test]
    fn mutation_matrices_match_frozen_examples() {
        let b = ExchangeMatrix::new(2, vec![0, 1], vec![vec![0, 1], vec![-3, 0]]).unwrap();
        assert_eq!(b.e_matrix(0, 1), vec![vec![-1, 0], vec![3, 1]]);

        let b01 = ExchangeMatrix::new(2, vec![0], vec![vec![0], vec![1]]).unwrap();
        assert_eq!(b01.e_matrix(0, -1), vec![vec![-1, 0], vec![1, 1]]);

        let a2 = full_ex_matrix(vec![vec![0, 1], vec![-1, 0]]);
        let mutated = a2.mutated(0).unwrap();
        assert_eq!(mutated.entries(), &[vec![0, -1], vec![1, 0]]);
    }

    #[test]
    fn mutation_is_an_involution() {
        for seed in [a2_seed(5), b2_seed(5), b2_seed(4)] {
            for &k in seed.exchangeable() {
                let once = seed.mutate(k, DEFAULT_DIVISION_SAFETY).unwrap();
                let twice = once.mutate(k, DEFAULT_DIVISION_SAFETY).unwrap();
                assert_eq!(twice, seed, "direction {k}");
            }
        }
    }

    #[test]
    fn mutated_frames_quasi_commute_as_the_presentation_claims() {
        let seed = b2_seed(5);
        for &k in seed.exchangeable() {
            let m = seed.mutate(k, DEFAULT_DIVISION_SAFETY).unwrap();
            let n = m.dim();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        assert!(
                            m.frame()[i]
                                .quasi_commutes_with(&m.frame()[j], m.lambda().residue(i, j)),
                            "mutated frame at ({i},{j})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn mutation_preserves_the_canonical_diagonal() {
        let seed = b2_seed(5);
        let d0 = seed.compatibility().diagonal.clone();
        let mut current = seed;
        for &k in [0usize, 1, 0, 1].iter() {
            current = current.mutate(k, DEFAULT_DIVISION_SAFETY).unwrap();
            assert_eq!(current.compatibility().diagonal, d0);
        }
    }

    #[test]
    fn exchange_twist_matches_the_diagonal_residue() {
        for seed in [a2_seed(5), b2_seed(5), b2_seed(7)] {
            for (pos, &k) in seed.exchangeable().iter().enumerate() {
                assert_eq!(
                    seed.exchange_twist(k),
                    seed.compatibility().residues[pos],
                    "direction {k}"
                );
            }
        }
    }

    #[test]
    fn permutation_transports_every_part_of_the_seed() {
        let seed = b2_seed(5).mutate(0, DEFAULT_DIVISION_SAFETY).unwrap();
        let sigma = vec![1usize, 0];
        let moved = seed.permuted(&sigma);
        assert_eq!(moved.frame()[0], seed.frame()[1].permute_coordinates(&sigma, moved.ambient()));
        assert_eq!(moved.frame()[1], seed.frame()[0].permute_coordinates(&sigma, moved.ambient()));
        let back = moved.permuted(&sigma);
        assert_eq!(back, seed);
        assert_eq!(
            moved.compatibility().diagonal,
            vec![
                seed.compatibility().diagonal[1],
                seed.compatibility().diagonal[0]
            ]
        );
    }

    #[test]
    fn seed_json_round_trip() {
        let seed = b2_seed(5);
        let encoded = seed.to_json();
        let decoded = Seed::from_json(&encoded).unwrap();
        assert_eq!(decoded, seed);

        let mutated = seed.mutate(0, DEFAULT_DIVISION_SAFETY).unwrap();
        let encoded = mutated.to_json();
        assert!(encoded.get("ambient").is_some());
        let decoded = Seed::from_json(&encoded).unwrap();
        assert_eq!(decoded, mutated);
    }

    #[test]
    fn seed_validation_rejects_inconsistent_input() {
        let lambda = form(5, vec![vec![0, 1], vec![-1, 0]]);
        let btilde = full_ex_matrix(vec![vec![0, 1], vec![-1, 0]]);
        // A frame that does not quasi-commute as claimed.
        let bad_frame = vec![
            TorusElement::generator(&lambda, 0).add_ref(&TorusElement::one(&lambda)),
            TorusElement::generator(&lambda, 1),
        ];
        assert!(Seed::with_frame(&lambda, &lambda, btilde.clone(), vec![], bad_frame).is_err());
        // Marking an exchangeable direction as inverted.
        assert!(Seed::standard(&lambda, btilde, vec![0]).is_err());
    }
}
