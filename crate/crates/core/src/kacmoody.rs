//! Cartan data, reduced words, and the seed data of quantum unipotent
//! cells.
//!
//! A symmetrizable generalized Cartan matrix determines a Weyl group
//! acting on the weight lattice. Every reduced word in the simple
//! reflections carries a family of positive roots, two occurrence maps,
//! and a pair of integer matrices: a skew form on the word's positions
//! and an exchange matrix on the positions whose letter repeats later.
//! The pair is integer-compatible, so every order of the root of unity
//! turns it into a seed presenting the cell attached to the word.
//!
//! Weights are carried in fundamental-weight coordinates. Root-lattice
//! elements are carried in exact simple-root coordinates instead, since
//! fundamental-weight coordinates do not determine them when the Cartan
//! matrix is singular; reflections and pairings stay in integer
//! arithmetic either way, so affine input works verbatim.
//!
//! The discriminant harness covers the two word families the torus
//! engine realizes without outside machinery: words with all letters
//! distinct, whose cell is the skew-polynomial ring on the frame
//! variables, and the rank-two three-letter word, whose cell is
//! generated by the initial frame together with its one mutated
//! variable.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::cyclotomic::RootContext;
use crate::discriminant::{
    determinant_central, factor_discriminant, trace_matrix, verify_nerve, DiscriminantReport,
    FreePresentation,
};
use crate::error::EngineError;
use crate::seeds::{ExchangeMatrix, Seed};
use crate::torus::{SkewForm, TorusElement};

/// A symmetrizable generalized Cartan matrix with a fixed choice of
/// positive symmetrizers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanDatum {
    a: Vec<Vec<i64>>,
    d: Vec<u64>,
}

impl CartanDatum {
    /// Validates the matrix axioms and the symmetrizing identity
    /// `d_i a_ij = d_j a_ji`.
    pub fn new(a: Vec<Vec<i64>>, d: Vec<u64>) -> Result<Self, EngineError> {
        let rank = a.len();
        if rank == 0 {
            return Err(EngineError::InvalidInput(
                "the Cartan matrix must have positive rank".into(),
            ));
        }
        if d.len() != rank {
            return Err(EngineError::DimensionMismatch {
                expected: rank,
                got: d.len(),
            });
        }
        for row in &a {
            if row.len() != rank {
                return Err(EngineError::DimensionMismatch {
                    expected: rank,
                    got: row.len(),
                });
            }
        }
        if let Some(i) = d.iter().position(|&v| v == 0) {
            return Err(EngineError::InvalidInput(format!(
                "symmetrizer {} must be positive",
                i + 1
            )));
        }
        for i in 0..rank {
            if a[i][i] != 2 {
                return Err(EngineError::InvalidInput(format!(
                    "diagonal entry at {} must be 2, got {}",
                    i + 1,
                    a[i][i]
                )));
            }
            for j in 0..rank {
                if i == j {
                    continue;
                }
                if a[i][j] > 0 {
                    return Err(EngineError::InvalidInput(format!(
                        "off-diagonal entry at ({}, {}) must be nonpositive",
                        i + 1,
                        j + 1
                    )));
                }
                if (a[i][j] == 0) != (a[j][i] == 0) {
                    return Err(EngineError::InvalidInput(format!(
                        "entries at ({}, {}) must vanish together",
                        i + 1,
                        j + 1
                    )));
                }
                if d[i] as i64 * a[i][j] != d[j] as i64 * a[j][i] {
                    return Err(EngineError::InvalidInput(format!(
                        "symmetrizers fail at ({}, {}): {}*{} != {}*{}",
                        i + 1,
                        j + 1,
                        d[i],
                        a[i][j],
                        d[j],
                        a[j][i]
                    )));
                }
            }
        }
        Ok(CartanDatum { a, d })
    }

    /// Number of simple roots.
    pub fn rank(&self) -> usize {
        self.a.len()
    }

    /// Cartan matrix entry `a_ij`.
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.a[i][j]
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.a
    }

    /// Symmetrizer `d_i`, so that `d_i a_ij` is symmetric.
    pub fn symmetrizer(&self, i: usize) -> u64 {
        self.d[i]
    }

    pub fn symmetrizers(&self) -> &[u64] {
        &self.d
    }
}

/// A weight in fundamental-weight coordinates: entry `t` is the pairing
/// with the `t`-th simple coroot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weight {
    coords: Vec<i64>,
}

impl Weight {
    pub fn new(coords: Vec<i64>) -> Self {
        Weight { coords }
    }

    /// The `i`-th fundamental weight.
    pub fn fundamental(rank: usize, i: usize) -> Self {
        let mut coords = vec![0; rank];
        coords[i] = 1;
        Weight { coords }
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    /// The simple reflection `s_j`: subtracts the `j`-th coordinate times
    /// the `j`-th simple root, whose fundamental-weight coordinates form
    /// column `j` of the Cartan matrix.
    pub fn reflect(&self, datum: &CartanDatum, j: usize) -> Weight {
        assert_eq!(self.coords.len(), datum.rank());
        let c = self.coords[j];
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(t, &v)| v - c * datum.entry(t, j))
            .collect();
        Weight { coords }
    }
}

/// An element of the root lattice in exact simple-root coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootVector {
    coords: Vec<i64>,
}

impl RootVector {
    pub fn new(coords: Vec<i64>) -> Self {
        RootVector { coords }
    }

    pub fn zero(rank: usize) -> Self {
        RootVector {
            coords: vec![0; rank],
        }
    }

    /// The `j`-th simple root.
    pub fn simple(rank: usize, j: usize) -> Self {
        let mut coords = vec![0; rank];
        coords[j] = 1;
        RootVector { coords }
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&v| v == 0)
    }

    /// Whether this is a nonzero nonnegative combination of simple roots.
    pub fn is_positive(&self) -> bool {
        !self.is_zero() && self.coords.iter().all(|&v| v >= 0)
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| a + b)
            .collect();
        RootVector { coords }
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| a - b)
            .collect();
        RootVector { coords }
    }

    pub fn neg_ref(&self) -> Self {
        RootVector {
            coords: self.coords.iter().map(|&v| -v).collect(),
        }
    }

    /// The simple reflection `s_j` on root coordinates: subtracts the
    /// coroot pairing `sum_m a_jm c_m` from the `j`-th coordinate.
    pub fn reflect(&self, datum: &CartanDatum, j: usize) -> RootVector {
        assert_eq!(self.coords.len(), datum.rank());
        let pairing: i64 = (0..datum.rank())
            .map(|m| datum.entry(j, m) * self.coords[m])
            .sum();
        let mut coords = self.coords.clone();
        coords[j] -= pairing;
        RootVector { coords }
    }

    /// The same element in fundamental-weight coordinates: the Cartan
    /// matrix applied to the root coordinates.
    pub fn weight_coords(&self, datum: &CartanDatum) -> Weight {
        let rank = datum.rank();
        assert_eq!(self.coords.len(), rank);
        let coords = (0..rank)
            .map(|t| (0..rank).map(|m| datum.entry(t, m) * self.coords[m]).sum())
            .collect();
        Weight { coords }
    }
}

/// The bilinear form value `(mu, gamma)` for a weight against a
/// root-lattice element, via `(pi_i, alpha_j) = delta_ij d_j`. No inverse
/// Cartan matrix is involved, so singular matrices work unchanged.
pub fn pair_with_root_lattice(datum: &CartanDatum, mu: &Weight, gamma: &RootVector) -> i64 {
    assert_eq!(mu.rank(), datum.rank());
    assert_eq!(gamma.coords.len(), datum.rank());
    let mut acc: i128 = 0;
    for j in 0..datum.rank() {
        acc += gamma.coords[j] as i128 * datum.symmetrizer(j) as i128 * mu.coords[j] as i128;
    }
    i64::try_from(acc).expect("pairing fits in 64 bits")
}

/// The bilinear form on the root lattice, `(alpha_m, alpha_t) = d_m a_mt`.
pub fn root_pairing(datum: &CartanDatum, left: &RootVector, right: &RootVector) -> i64 {
    let rank = datum.rank();
    assert_eq!(left.coords.len(), rank);
    assert_eq!(right.coords.len(), rank);
    let mut acc: i128 = 0;
    for m in 0..rank {
        for t in 0..rank {
            acc += left.coords[m] as i128
                * right.coords[t] as i128
                * datum.symmetrizer(m) as i128
                * datum.entry(m, t) as i128;
        }
    }
    i64::try_from(acc).expect("pairing fits in 64 bits")
}

/// Bareiss determinant of a small integer matrix.
fn small_determinant(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut sign: i128 = 1;
    let mut prev: i128 = 1;
    for k in 0..n {
        if m[k][k] == 0 {
            let swap = (k + 1..n).find(|&r| m[r][k] != 0);
            match swap {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Solves for the exact simple-root coordinates of a weight. Errors when
/// the Cartan matrix is singular, since fundamental-weight coordinates do
/// not determine a root-lattice element there, and when the weight is not
/// an integer combination of the simple roots.
pub fn root_coordinates(datum: &CartanDatum, mu: &Weight) -> Result<RootVector, EngineError> {
    let rank = datum.rank();
    assert_eq!(mu.rank(), rank);
    let base: Vec<Vec<i128>> = (0..rank)
        .map(|t| (0..rank).map(|m| datum.entry(t, m) as i128).collect())
        .collect();
    let det = small_determinant(base.clone());
    if det == 0 {
        return Err(EngineError::NotInRootLattice(
            "the Cartan matrix is singular, so fundamental-weight coordinates are ambiguous"
                .into(),
        ));
    }
    let mut coords = vec![0i64; rank];
    for m in 0..rank {
        let mut replaced = base.clone();
        for t in 0..rank {
            replaced[t][m] = mu.coords[t] as i128;
        }
        let numer = small_determinant(replaced);
        if numer % det != 0 {
            return Err(EngineError::NotInRootLattice(
                "the weight is not an integer combination of the simple roots".into(),
            ));
        }
        coords[m] = i64::try_from(numer / det).expect("coordinate fits in 64 bits");
    }
    let gamma = RootVector::new(coords);
    debug_assert_eq!(gamma.weight_coords(datum), *mu);
    Ok(gamma)
}

/// The root-lattice part of `(s_{l_1} ... s_{l_m} - 1) pi_target`, with
/// the letters acting rightmost first.
fn reflected_weight_delta(datum: &CartanDatum, letters: &[usize], target: usize) -> RootVector {
    let rank = datum.rank();
    let mut r = vec![0i64; rank];
    for &j in letters.iter().rev() {
        let mut coeff: i64 = if j == target { 1 } else { 0 };
        for m in 0..rank {
            coeff += datum.entry(j, m) * r[m];
        }
        r[j] -= coeff;
    }
    RootVector::new(r)
}

/// A reduced word together with the combinatorial data its positions
/// carry: the roots it sorts, the occurrence maps, and the split of
/// positions into exchangeable and frozen.
#[derive(Clone, Debug)]
pub struct ReducedWordData {
    word: Vec<usize>,
    beta: Vec<RootVector>,
    previous: Vec<Option<usize>>,
    next: Vec<Option<usize>>,
    exchangeable: Vec<usize>,
    support: Vec<usize>,
}

impl ReducedWordData {
    /// Validates the letters and certifies reducedness: the root of every
    /// position must be positive, which fails exactly on non-reduced
    /// words.
    pub fn new(datum: &CartanDatum, word: &[usize]) -> Result<Self, EngineError> {
        let rank = datum.rank();
        if word.is_empty() {
            return Err(EngineError::InvalidInput("the word must be nonempty".into()));
        }
        if let Some(&bad) = word.iter().find(|&&i| i >= rank) {
            return Err(EngineError::InvalidInput(format!(
                "letter {} exceeds the rank {}",
                bad + 1,
                rank
            )));
        }
        let n = word.len();
        let mut beta = Vec::with_capacity(n);
        for k in 0..n {
            let mut root = RootVector::simple(rank, word[k]);
            for j in (0..k).rev() {
                root = root.reflect(datum, word[j]);
            }
            if !root.is_positive() {
                return Err(EngineError::NotReduced(format!(
                    "the root of position {} is not positive",
                    k + 1
                )));
            }
            beta.push(root);
        }
        let mut previous = vec![None; n];
        let mut next = vec![None; n];
        for k in 0..n {
            previous[k] = (0..k).rev().find(|&j| word[j] == word[k]);
            next[k] = (k + 1..n).find(|&j| word[j] == word[k]);
        }
        let exchangeable: Vec<usize> = (0..n).filter(|&k| next[k].is_some()).collect();
        let support: Vec<usize> = word.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        assert_eq!(exchangeable.len(), n - support.len());
        Ok(ReducedWordData {
            word: word.to_vec(),
            beta,
            previous,
            next,
            exchangeable,
            support,
        })
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// The positive root sorted to position `k`: the prefix before `k`
    /// applied to the simple root of the letter at `k`.
    pub fn beta(&self, k: usize) -> &RootVector {
        &self.beta[k]
    }

    /// The previous position with the same letter.
    pub fn previous(&self, k: usize) -> Option<usize> {
        self.previous[k]
    }

    /// The next position with the same letter.
    pub fn next(&self, k: usize) -> Option<usize> {
        self.next[k]
    }

    /// Positions whose letter occurs again later.
    pub fn exchangeable(&self) -> &[usize] {
        &self.exchangeable
    }

    /// The distinct letters of the word, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// The root-lattice part of `(w_{<=k} - 1) pi` applied to the
    /// fundamental weight of the letter at position `k`.
    pub fn prefix_delta(&self, datum: &CartanDatum, k: usize) -> RootVector {
        reflected_weight_delta(datum, &self.word[0..=k], self.word[k])
    }
}

/// The integer seed data of a reduced word: the skew form on positions,
/// the exchange matrix on the exchangeable positions, the symmetrizers
/// those positions carry, and the twist exponents of the frame.
#[derive(Clone, Debug)]
pub struct UnipotentSeedData {
    /// Skew form on the word's positions.
    pub lambda: Vec<Vec<i64>>,
    /// Exchange matrix, one column per exchangeable position.
    pub btilde: Vec<Vec<i64>>,
    /// Positions whose letter occurs again later.
    pub exchangeable: Vec<usize>,
    /// Distinct letters of the word.
    pub support: Vec<usize>,
    /// Symmetrizers of the letters at the exchangeable positions.
    pub symmetrizers: Vec<u64>,
    /// Diagonal of the product of the transposed form with the exchange
    /// matrix: twice the symmetrizer at each exchangeable position.
    pub pairing_diagonal: Vec<i64>,
    /// Doubled twist exponents, filled for `j <= k`: the squared norm of
    /// the interval delta divided by two.
    pub doubled_a: Vec<Vec<i64>>,
}

/// Builds the seed data of a reduced word and verifies over the integers
/// that the form and the exchange matrix are compatible, with twice the
/// letter's symmetrizer on the diagonal.
///
/// For positions `j < k` the form pairs the plus-shifted prefix weight of
/// the later position against the minus-shifted prefix weight of the
/// earlier one; the opposite assignment makes the compatibility product
/// vanish identically.
pub fn build_unipotent_seed_data(
    datum: &CartanDatum,
    words: &ReducedWordData,
) -> Result<UnipotentSeedData, EngineError> {
    let n = words.len();
    let deltas: Vec<RootVector> = (0..n).map(|k| words.prefix_delta(datum, k)).collect();
    let plus_weights: Vec<Weight> = (0..n)
        .map(|k| {
            let mut w = deltas[k].weight_coords(datum);
            w.coords[words.word()[k]] += 2;
            w
        })
        .collect();

    let mut lambda = vec![vec![0i64; n]; n];
    for k in 0..n {
        for j in 0..k {
            let value = -pair_with_root_lattice(datum, &plus_weights[k], &deltas[j]);
            lambda[j][k] = value;
            lambda[k][j] = -value;
        }
    }

    let ex = words.exchangeable().to_vec();
    let mut btilde = vec![vec![0i64; ex.len()]; n];
    for (pos, &k) in ex.iter().enumerate() {
        let sk = words.next(k).expect("exchangeable positions repeat");
        for (j, row) in btilde.iter_mut().enumerate() {
            let entry = if words.previous(k) == Some(j) {
                1
            } else if j == sk {
                -1
            } else if j < k {
                let sj = words.next(j);
                let ordered = match sj {
                    Some(sj) => k < sj && sj < sk,
                    None => false,
                };
                if ordered {
                    datum.entry(words.word()[j], words.word()[k])
                } else {
                    0
                }
            } else if k < j && j < sk {
                let beyond = match words.next(j) {
                    Some(sj) => sk < sj,
                    None => true,
                };
                if beyond {
                    -datum.entry(words.word()[j], words.word()[k])
                } else {
                    0
                }
            } else {
                0
            };
            row[pos] = entry;
        }
    }

    let mut pairing_diagonal = Vec::with_capacity(ex.len());
    for (pos, &k) in ex.iter().enumerate() {
        for i in 0..n {
            let mut acc: i128 = 0;
            for j in 0..n {
                acc += lambda[j][i] as i128 * btilde[j][pos] as i128;
            }
            if i == k {
                let expected = 2 * datum.symmetrizer(words.word()[k]) as i128;
                if acc != expected {
                    return Err(EngineError::Incompatible(format!(
                        "pairing of column {} with its own direction is {}, expected {}",
                        k + 1,
                        acc,
                        expected
                    )));
                }
                pairing_diagonal.push(acc as i64);
            } else if acc != 0 {
                return Err(EngineError::Incompatible(format!(
                    "pairing of column {} with direction {} is {}, not 0",
                    k + 1,
                    i + 1,
                    acc
                )));
            }
        }
    }

    let mut doubled_a = vec![vec![0i64; n]; n];
    for j in 0..n {
        for k in j..n {
            let delta = reflected_weight_delta(datum, &words.word()[j..=k], words.word()[k]);
            let norm = root_pairing(datum, &delta, &delta);
            assert_eq!(norm % 2, 0, "squared norms on the root lattice are even");
            doubled_a[j][k] = norm / 2;
        }
    }

    let symmetrizers = ex
        .iter()
        .map(|&k| datum.symmetrizer(words.word()[k]))
        .collect();
    Ok(UnipotentSeedData {
        lambda,
        btilde,
        exchangeable: ex,
        support: words.support().to_vec(),
        symmetrizers,
        pairing_diagonal,
        doubled_a,
    })
}

/// Builds the runtime seed of a reduced word at the given order: the
/// standard frame over the word's skew form, with the frozen directions
/// not inverted.
pub fn unipotent_seed(
    datum: &CartanDatum,
    words: &ReducedWordData,
    ell: u64,
) -> Result<(Seed, UnipotentSeedData), EngineError> {
    let data = build_unipotent_seed_data(datum, words)?;
    let ctx = RootContext::new(ell)?;
    let form = SkewForm::from_lift(&ctx, data.lambda.clone())?;
    let btilde = ExchangeMatrix::new(words.len(), data.exchangeable.clone(), data.btilde.clone())?;
    let seed = Seed::standard(&form, btilde, Vec::new())?;
    Ok((seed, data))
}

/// Checks that the word's roots sum to the sum over the support of the
/// full word's weight deltas, both sides in exact root coordinates.
pub fn degree_identity_check(datum: &CartanDatum, words: &ReducedWordData) -> bool {
    let rank = datum.rank();
    let mut lhs = RootVector::zero(rank);
    for k in 0..words.len() {
        lhs = lhs.add_ref(words.beta(k));
    }
    let mut rhs = RootVector::zero(rank);
    for &i in words.support() {
        let delta = reflected_weight_delta(datum, words.word(), i);
        rhs = rhs.sub_ref(&delta);
    }
    lhs == rhs
}

/// The closed-form exponent each noninverted frozen variable carries in
/// the discriminant of a cell of the given word length, in frame-variable
/// units.
pub fn closed_form_exponent(ell: u64, length: usize) -> u64 {
    (ell - 1) * ell.pow(length as u32)
}

/// Presentation of the three-letter rank-two cell over the central
/// subalgebra spanned by the ordered products of `l`-th powers of the
/// three generating cluster variables: the two initial variables of the
/// repeated letter's positions and the one mutated variable.
pub struct CellPresentation {
    ambient: Arc<SkewForm>,
    ell: u64,
    safety: u64,
    mutated: TorusElement,
    basis: Vec<TorusElement>,
}

impl CellPresentation {
    /// The seed must have three directions with exactly the first
    /// exchangeable, and `mutated` must be its mutated variable: a
    /// two-term element whose exponents are the standard exchange
    /// binomials in direction one.
    pub fn new(seed: &Seed, mutated: &TorusElement, safety: u64) -> Result<Self, EngineError> {
        if seed.dim() != 3 || seed.exchangeable() != [0] {
            return Err(EngineError::InvalidInput(
                "the cell presentation needs three directions with only the first exchangeable"
                    .into(),
            ));
        }
        let expected: BTreeSet<Vec<i64>> =
            [vec![-1, 1, 0], vec![-1, 0, 1]].into_iter().collect();
        let found: BTreeSet<Vec<i64>> = mutated.terms().keys().cloned().collect();
        if found != expected {
            return Err(EngineError::InvalidInput(
                "the mutated variable must be the two-term exchange binomial".into(),
            ));
        }
        let ell = seed.ell();
        let rank = (ell * ell * ell) as usize;
        let x1 = seed.frame()[0].clone();
        let x2 = seed.frame()[1].clone();
        let mut basis = Vec::with_capacity(rank);
        for m in 0..rank {
            let m1 = (m as u64) % ell;
            let m2 = (m as u64) / ell % ell;
            let m3 = (m as u64) / (ell * ell);
            basis.push(x1.pow(m1).mul_ref(&x2.pow(m2)).mul_ref(&mutated.pow(m3)));
        }
        Ok(CellPresentation {
            ambient: seed.ambient().clone(),
            ell,
            safety,
            mutated: mutated.clone(),
            basis,
        })
    }

    /// Total generator powers of a torus exponent: the mutated variable
    /// is the only source of the third coordinate and lowers the first.
    fn generator_powers(&self, g: &[i64]) -> Result<(i64, i64, i64), EngineError> {
        let t1 = g[0] + g[2];
        let t2 = g[1];
        let t3 = g[2];
        if t1 < 0 || t2 < 0 || t3 < 0 {
            return Err(EngineError::DecompositionFailed(format!(
                "exponent [{}, {}, {}] is outside the span of the generators",
                g[0], g[1], g[2]
            )));
        }
        Ok((t1, t2, t3))
    }
}

impl FreePresentation for CellPresentation {
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
        let ell = self.ell as i64;
        let mut out = vec![TorusElement::zero(&self.ambient); self.rank()];
        let mut rem = a.clone();
        let mut budget =
            (a.num_terms() as u64 + 1) * self.rank() as u64 * self.safety.max(1) * 8;
        while !rem.is_zero() {
            if budget == 0 {
                return Err(EngineError::BudgetExceeded(
                    "cell decomposition exceeded its step budget".into(),
                ));
            }
            budget -= 1;
            let (g, coeff) = {
                let mut pick = None;
                for (g, c) in rem.terms() {
                    let better = match pick {
                        None => true,
                        Some((h, _)) => {
                            let hv: &Vec<i64> = h;
                            (g[2], g) > (hv[2], hv)
                        }
                    };
                    if better {
                        pick = Some((g, c));
                    }
                }
                let (g, c) = pick.expect("nonzero remainder has terms");
                (g.clone(), c.clone())
            };
            let (t1, t2, t3) = self.generator_powers(&g)?;
            let (m1, c1) = (t1 % ell, t1 / ell);
            let (m2, c2) = (t2 % ell, t2 / ell);
            let (m3, c3) = (t3 % ell, t3 / ell);
            let slot = (m1 + ell * m2 + ell * ell * m3) as usize;
            let central_monomial = TorusElement::monomial(
                &self.ambient,
                vec![c1 * ell, c2 * ell, 0],
                crate::cyclotomic::CyclotomicInteger::one(self.ambient.context()),
            );
            let central = central_monomial.mul_ref(&self.mutated.pow((c3 * ell) as u64));
            let product = central.mul_ref(&self.basis[slot]);
            let top = product.terms().get(&g).ok_or_else(|| {
                EngineError::DecompositionFailed(
                    "the reconstructed product misses its leading exponent".into(),
                )
            })?;
            let chi = coeff.exact_div(top).ok_or_else(|| {
                EngineError::DecompositionFailed(
                    "the leading coefficient of the reconstructed product is not a unit".into(),
                )
            })?;
            rem = rem.sub_ref(&product.scale(&chi));
            out[slot] = out[slot].add_ref(&central.scale(&chi));
        }
        Ok(out)
    }

    fn coefficient_form(&self) -> &Arc<SkewForm> {
        &self.ambient
    }
}

/// Runs the discriminant pipeline for a reduced word at the given order.
///
/// Two word families are realized by the torus engine alone and accepted
/// here: words with all letters distinct, whose cell is the fully frozen
/// skew-polynomial seed, and the rank-two three-letter word with repeated
/// outer letter, realized by the initial seed together with its one
/// mutation. Everything else needs machinery outside this crate's scope
/// and is rejected.
pub fn theorem_c_check(
    datum: &CartanDatum,
    word: &[usize],
    ell: u64,
    safety: u64,
) -> Result<DiscriminantReport, EngineError> {
    let words = ReducedWordData::new(datum, word)?;
    if ell < 3 || ell % 2 == 0 {
        return Err(EngineError::InvalidInput(format!(
            "the order must be odd and at least 3, got {ell}"
        )));
    }
    for &i in words.support() {
        let d = datum.symmetrizer(i);
        if num_integer::gcd(ell, d) != 1 {
            return Err(EngineError::CoprimeViolated {
                ell,
                detail: format!("symmetrizer {} of letter {} shares a factor", d, i + 1),
            });
        }
    }
    if words.exchangeable().is_empty() {
        let (seed, _) = unipotent_seed(datum, &words, ell)?;
        let rank = ell
            .checked_pow(words.len() as u32)
            .and_then(|r| usize::try_from(r).ok())
            .ok_or_else(|| {
                EngineError::BudgetExceeded("the module rank overflows the machine word".into())
            })?;
        return crate::discriminant::cluster_discriminant(&[seed], rank, safety);
    }
    let stretch = datum.rank() == 2
        && words.len() == 3
        && word[0] == word[2]
        && word[0] != word[1]
        && datum.entry(0, 1) == -1
        && datum.entry(1, 0) == -1;
    if !stretch {
        return Err(EngineError::UnsupportedWord(
            "only words with all letters distinct, or the rank-two three-letter word with unit \
             off-diagonal entries, are realized"
                .into(),
        ));
    }
    let (seed, _) = unipotent_seed(datum, &words, ell)?;
    let k = words.exchangeable()[0];
    let mutated_seed = seed.mutate(k, safety)?;
    verify_nerve(&[seed.clone(), mutated_seed.clone()], safety)?;
    let mutated = mutated_seed.frame()[k].clone();
    let presentation = CellPresentation::new(&seed, &mutated, safety)?;
    let gram = trace_matrix(&presentation)?;
    let det = determinant_central(&gram, safety)?;
    factor_discriminant(&seed, &det, safety)
}
