//! Multiplication map, quadrics through the canonical curve, and the first
//! and second Gaussian maps, all computed on local expansions at one point.
//!
//! Symmetric tensors are stored over unordered pairs `(i, j)`, `i <= j`, in
//! i-major order. A quadric vector `Q` contracts as
//! `sum_{i <= j} Q_ij f_i f_j` and its second Gaussian image is
//! `sum_{i <= j} Q_ij f_i' f_j'` (derivative products are kept to precision
//! `prec - 1`).
//!
//! Ranks computed here are lower bounds for the true ranks: truncation can
//! only hide linear independence, never create it.

use std::time::Instant;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::cover::{branch_solve, canonical_form_basis, FormBasis};
use crate::error::GaussianError;
use crate::linalg::{primitive_integer_vector, RationalMatrix};
use crate::monodromy::MonodromyDatum;
use crate::series::TruncatedSeries;

/// Unordered index pairs `(i, j)`, `i <= j < g`, in i-major order.
pub fn symmetric_pairs(g: usize) -> Vec<(usize, usize)> {
    (0..g).flat_map(|i| (i..g).map(move |j| (i, j))).collect()
}

/// Position of `(i, j)` (either order) in [`symmetric_pairs`].
pub fn pair_index(g: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // rows before i contribute g, g - 1, ..., g - i + 1 pairs
    i * g - i * i.saturating_sub(1) / 2 + (j - i)
}

/// Products `f_i f_j` over symmetric pairs, plus derivative products on demand.
#[derive(Debug, Clone)]
pub struct ProductTable {
    pairs: Vec<(usize, usize)>,
    products: Vec<TruncatedSeries>,
}

impl ProductTable {
    pub fn new(b: &FormBasis) -> Self {
        let pairs = symmetric_pairs(b.len());
        let s = b.series();
        let products = pairs.iter().map(|&(i, j)| s[i].mul(&s[j])).collect();
        ProductTable { pairs, products }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn products(&self) -> &[TruncatedSeries] {
        &self.products
    }

    /// `sum Q_ij f_i f_j`.
    pub fn contract(&self, q: &[Rational]) -> TruncatedSeries {
        contract(&self.products, q)
    }
}

fn contract(series: &[TruncatedSeries], q: &[Rational]) -> TruncatedSeries {
    let p = series.iter().map(|s| s.precision()).min().unwrap_or(1);
    let mut acc = TruncatedSeries::zero(p);
    for (s, c) in series.iter().zip(q) {
        if *c != 0 {
            acc = &acc + &s.scale(c);
        }
    }
    acc
}

/// Rows indexed by symmetric pairs; row `(i, j)` holds the coefficients of
/// `f_i f_j` up to the working precision.
pub fn multiplication_matrix(b: &FormBasis) -> RationalMatrix {
    matrix_from_series(ProductTable::new(b).products())
}

fn matrix_from_series(rows: &[TruncatedSeries]) -> RationalMatrix {
    let cols = rows.iter().map(|s| s.precision()).min().unwrap_or(0);
    RationalMatrix::from_rows(
        cols,
        rows.iter().map(|s| s.coeffs()[..cols].to_vec()).collect(),
    )
}

/// `I_2(K)` to precision: the kernel of the multiplication map on `S^2 H^0(K)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadricSpace {
    pub basis_vectors: Vec<Vec<Rational>>,
    pub dimension: usize,
}

pub fn quadric_space(b: &FormBasis) -> Result<QuadricSpace, GaussianError> {
    quadric_space_from(&ProductTable::new(b))
}

pub fn quadric_space_from(table: &ProductTable) -> Result<QuadricSpace, GaussianError> {
    let mat = matrix_from_series(table.products());
    let basis_vectors = mat.transpose().nullspace();
    let precision = mat.cols();
    for v in &basis_vectors {
        if !table.contract(v).is_zero() {
            return Err(GaussianError::NotAQuadric(precision));
        }
    }
    Ok(QuadricSpace {
        dimension: basis_vectors.len(),
        basis_vectors,
    })
}

/// Ranks of the multiplication map and of `mu_2` on the computed quadrics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelResult {
    pub precision: usize,
    pub mult_rank: usize,
    pub i2_dim: usize,
    pub mu2_rank: usize,
}

/// Second Gaussian map images `sum Q_ij f_i' f_j'` for every quadric in `q`.
pub fn mu2_images(b: &FormBasis, q: &QuadricSpace) -> Vec<TruncatedSeries> {
    let derivs: Vec<TruncatedSeries> = b.series().iter().map(|s| s.derivative()).collect();
    let pairs = symmetric_pairs(b.len());
    let p = derivs.iter().map(|s| s.precision()).min().unwrap_or(1);
    let ints: Vec<Vec<Integer>> = q
        .basis_vectors
        .iter()
        .map(|v| primitive_integer_vector(v))
        .collect();
    let mut products: Vec<Option<TruncatedSeries>> = vec![None; pairs.len()];
    for v in &ints {
        for (k, c) in v.iter().enumerate() {
            if *c != 0 && products[k].is_none() {
                let (i, j) = pairs[k];
                products[k] = Some(derivs[i].mul(&derivs[j]));
            }
        }
    }
    ints.iter()
        .map(|v| {
            let mut acc = TruncatedSeries::zero(p);
            for (prod, c) in products.iter().zip(v) {
                if let Some(prod) = prod.as_ref().filter(|_| *c != 0) {
                    acc = &acc + &prod.scale(&Rational::from(c));
                }
            }
            acc
        })
        .collect()
}

/// Rank of the coefficient matrix of `mu_2` on `q`; a lower bound for
/// `rank mu_2` provided `q` is exactly `I_2(K)`.
pub fn mu2_rank(b: &FormBasis, q: &QuadricSpace) -> usize {
    if q.dimension == 0 {
        return 0;
    }
    matrix_from_series(&mu2_images(b, q)).rank()
}

/// Local second Gaussian image of a single quadric, after checking that it
/// lies in the kernel of the multiplication map to precision.
pub fn mu2_of_quadric(b: &FormBasis, q: &[Rational]) -> Result<TruncatedSeries, GaussianError> {
    let g = b.len();
    let expected = g * (g + 1) / 2;
    if q.len() != expected {
        return Err(GaussianError::QuadricLength {
            expected,
            got: q.len(),
        });
    }
    let s = b.series();
    let pairs = symmetric_pairs(g);
    let mut membership = TruncatedSeries::zero(b.precision());
    let mut image = TruncatedSeries::zero(b.precision() - 1);
    for (&(i, j), c) in pairs.iter().zip(q) {
        if *c == 0 {
            continue;
        }
        membership = &membership + &s[i].mul(&s[j]).scale(c);
        image = &image + &s[i].derivative().mul(&s[j].derivative()).scale(c);
    }
    if !membership.is_zero() {
        return Err(GaussianError::NotAQuadric(b.precision()));
    }
    Ok(image)
}

/// Character of a symmetric tensor under the deck generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadricCharacter {
    /// Every nonzero entry pairs labels with `n_i + n_j = c mod m`.
    Residue(u32),
    Mixed,
}

impl QuadricCharacter {
    /// Invariant under the full cyclic group.
    pub fn is_invariant(self) -> bool {
        self == QuadricCharacter::Residue(0)
    }
}

pub fn quadric_character(b: &FormBasis, q: &[Rational]) -> QuadricCharacter {
    let m = b.m();
    let labels = b.labels();
    let mut found: Option<u32> = None;
    for (&(i, j), c) in symmetric_pairs(b.len()).iter().zip(q) {
        if *c == 0 {
            continue;
        }
        let ch = (labels[i].0 + labels[j].0) % m;
        match found {
            None => found = Some(ch),
            Some(prev) if prev != ch => return QuadricCharacter::Mixed,
            _ => {}
        }
    }
    QuadricCharacter::Residue(found.unwrap_or(0))
}

/// Which part of `Lambda^2 H^0(K - L)` the first Gaussian map is restricted to.
/// `W1`, `W3` are the forms `omega_{1,nu}`, `omega_{3,nu}` with `nu >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mu1Selector {
    WedgeW1,
    WedgeW3,
    W1TensorW3,
    Full,
}

impl Mu1Selector {
    fn name(self) -> &'static str {
        match self {
            Mu1Selector::WedgeW1 => "wedge-W1",
            Mu1Selector::WedgeW3 => "wedge-W3",
            Mu1Selector::W1TensorW3 => "W1-tensor-W3",
            Mu1Selector::Full => "full",
        }
    }
}

/// Indices of `omega_{n,nu}` with `nu >= 1`, in increasing `nu`.
pub fn weighted_subspace(b: &FormBasis, n: u32) -> Vec<usize> {
    b.labels()
        .iter()
        .enumerate()
        .filter(|(_, &(ln, nu))| ln == n && nu >= 1)
        .map(|(k, _)| k)
        .collect()
}

/// `mu_1(s_i ^ s_j) = f_i' f_j - f_i f_j'`, at precision `prec - 1`.
pub fn mu1_wedge(b: &FormBasis, i: usize, j: usize) -> TruncatedSeries {
    let s = b.series();
    let lhs = s[i].derivative().mul(&s[j]);
    let rhs = s[i].mul(&s[j].derivative());
    &lhs - &rhs
}

pub fn mu1_pairs(
    b: &FormBasis,
    selector: Mu1Selector,
) -> Result<Vec<(usize, usize)>, GaussianError> {
    let wedge = |idx: Vec<usize>| -> Result<Vec<(usize, usize)>, GaussianError> {
        if idx.len() < 2 {
            return Err(GaussianError::SubspaceTooSmall(idx.len()));
        }
        Ok(idx
            .iter()
            .enumerate()
            .flat_map(|(k, &i)| idx[k + 1..].iter().map(move |&j| (i, j)))
            .collect())
    };
    if selector != Mu1Selector::Full && b.m() != 4 {
        return Err(GaussianError::SelectorNeedsOrderFour(selector.name()));
    }
    match selector {
        Mu1Selector::Full => wedge((0..b.len()).collect()),
        Mu1Selector::WedgeW1 => wedge(weighted_subspace(b, 1)),
        Mu1Selector::WedgeW3 => wedge(weighted_subspace(b, 3)),
        Mu1Selector::W1TensorW3 => {
            let w1 = weighted_subspace(b, 1);
            let w3 = weighted_subspace(b, 3);
            if w1.len() + w3.len() < 2 || w1.is_empty() || w3.is_empty() {
                return Err(GaussianError::SubspaceTooSmall(w1.len().min(w3.len())));
            }
            Ok(w1
                .iter()
                .flat_map(|&i| w3.iter().map(move |&j| (i, j)))
                .collect())
        }
    }
}

pub fn mu1_restricted_rank(b: &FormBasis, selector: Mu1Selector) -> Result<usize, GaussianError> {
    let pairs = mu1_pairs(b, selector)?;
    let images: Vec<TruncatedSeries> = pairs.iter().map(|&(i, j)| mu1_wedge(b, i, j)).collect();
    Ok(matrix_from_series(&images).rank())
}

/// Full pipeline at one precision.
pub fn compute_level(
    d: &MonodromyDatum,
    t: &[Rational],
    precision: usize,
) -> Result<LevelResult, GaussianError> {
    let cover = branch_solve(d, t, precision)?;
    let basis = canonical_form_basis(&cover)?;
    let table = ProductTable::new(&basis);
    let mult_rank = matrix_from_series(table.products()).rank();
    let q = quadric_space_from(&table)?;
    debug_assert_eq!(q.dimension, table.pairs().len() - mult_rank);
    let mu2 = mu2_rank(&basis, &q);
    Ok(LevelResult {
        precision,
        mult_rank,
        i2_dim: q.dimension,
        mu2_rank: mu2,
    })
}

/// Precision policy for [`stable_rank`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrecisionPolicy {
    Fixed(usize),
    /// Start at `start`, multiply by `factor` until two consecutive levels
    /// agree or `max` has been computed.
    Escalate {
        start: usize,
        factor: usize,
        max: usize,
    },
}

impl PrecisionPolicy {
    pub fn levels(self) -> Vec<usize> {
        match self {
            PrecisionPolicy::Fixed(p) => vec![p],
            PrecisionPolicy::Escalate { start, factor, max } => {
                let mut out = vec![start.min(max)];
                let factor = factor.max(2);
                while *out.last().expect("nonempty") < max {
                    let next = (out.last().expect("nonempty") * factor).min(max);
                    out.push(next);
                }
                out
            }
        }
    }

    pub fn max_precision(self) -> usize {
        match self {
            PrecisionPolicy::Fixed(p) => p,
            PrecisionPolicy::Escalate { max, .. } => max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub datum: MonodromyDatum,
    pub branch_points: Vec<String>,
    pub genus: u32,
    pub precision_used: usize,
    pub mult_rank: usize,
    pub i2_dim: usize,
    pub mu2_rank_lower_bound: usize,
    /// The computed multiplication rank equals its known value (`3g - 3`, or
    /// `2g - 1` for a hyperelliptic datum), so the computed quadric space is
    /// exactly `I_2(K)` and the `mu_2` rank is a certified lower bound.
    pub kernel_certified: bool,
    /// `mu_2` rank equals `dim I_2`: the map is injective and the rank exact.
    pub saturated: bool,
    /// Saturated, or two successive precision levels agreed.
    pub stable: bool,
    /// `(precision, mu2 rank)` for each level computed.
    pub levels: Vec<(usize, usize)>,
    pub elapsed_ms: u64,
}

/// Known rank of the multiplication map for a datum of this genus.
pub fn expected_mult_rank(d: &MonodromyDatum, genus: u32) -> usize {
    let g = genus as usize;
    if d.m() == 2 {
        // every Z/2 cover of the line is hyperelliptic
        2 * g - 1
    } else {
        3 * g - 3
    }
}

/// Runs `level` at each precision the policy prescribes and assembles the report.
pub fn stable_rank_with<F>(
    d: &MonodromyDatum,
    t: &[Rational],
    policy: PrecisionPolicy,
    mut level: F,
) -> Result<RankReport, GaussianError>
where
    F: FnMut(usize) -> Result<LevelResult, GaussianError>,
{
    let start = Instant::now();
    let genus = d.genus()?;
    let expected = expected_mult_rank(d, genus);
    let mut history: Vec<LevelResult> = Vec::new();
    let mut stable = false;
    for p in policy.levels() {
        let res = level(p)?;
        let certified = res.mult_rank == expected;
        let saturated = certified && res.mu2_rank == res.i2_dim;
        let agreed = history.last().is_some_and(|prev| {
            prev.mult_rank == expected && certified && prev.mu2_rank == res.mu2_rank
        });
        history.push(res);
        if saturated || agreed {
            stable = true;
            break;
        }
    }
    let last = history.last().expect("at least one level");
    let kernel_certified = last.mult_rank == expected;
    Ok(RankReport {
        datum: d.clone(),
        branch_points: t.iter().map(|x| x.to_string()).collect(),
        genus,
        precision_used: last.precision,
        mult_rank: last.mult_rank,
        i2_dim: last.i2_dim,
        mu2_rank_lower_bound: last.mu2_rank,
        kernel_certified,
        saturated: kernel_certified && last.mu2_rank == last.i2_dim,
        stable,
        levels: history.iter().map(|l| (l.precision, l.mu2_rank)).collect(),
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

pub fn stable_rank(
    d: &MonodromyDatum,
    t: &[Rational],
    policy: PrecisionPolicy,
) -> Result<RankReport, GaussianError> {
    stable_rank_with(d, t, policy, |p| compute_level(d, t, p))
}
