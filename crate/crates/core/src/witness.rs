//! Invariant quadrics with nonvanishing second Gaussian image on Galois
//! bielliptic and bihyperelliptic families.
//!
//! For `x = phi(y)` and forms `omega_{n,nu} = x^nu omega_{n,0}`, binomial
//! relations such as `omega_{n,0} omega_{n,2} = omega_{n,1}^2` give quadrics
//! in `I_2(K)` whose `mu_2` image is `-(x')^2 f^2` and hence nonzero.

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::cover::{branch_solve, canonical_form_basis, default_precision, FormBasis};
use crate::error::GaussianError;
use crate::gaussian::{mu2_of_quadric, pair_index, quadric_character, QuadricCharacter};
use crate::monodromy::{default_branch_points, enumerate_galois, GaloisFamilyClass};
use crate::series::VanishingOrder;

type Term = (i64, (u32, u32), (u32, u32));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadricKind {
    /// `omega_{2,0} . omega_{2,2} - omega_{2,1} . omega_{2,1}`; needs `d_2 >= 3`.
    V2Pencil,
    /// `omega_{1,0} . omega_{1,2} - omega_{1,1} . omega_{1,1}`; needs `d_1 >= 3`.
    V1Pencil,
    /// `omega_{1,0} . omega_{3,1} - omega_{1,1} . omega_{3,0}`; needs
    /// `d_1, d_3 >= 2`.
    V1V3Mixed,
}

impl QuadricKind {
    /// `(coefficient, label_a, label_b)` terms of the quadric.
    fn terms(self) -> [Term; 2] {
        match self {
            QuadricKind::V2Pencil => [(1, (2, 0), (2, 2)), (-1, (2, 1), (2, 1))],
            QuadricKind::V1Pencil => [(1, (1, 0), (1, 2)), (-1, (1, 1), (1, 1))],
            QuadricKind::V1V3Mixed => [(1, (1, 0), (3, 1)), (-1, (1, 1), (3, 0))],
        }
    }

    pub fn describe(self) -> String {
        let [(_, a, b), (_, c, d)] = self.terms();
        format!("w{:?}.w{:?} - w{:?}.w{:?}", a, b, c, d).replace(' ', "")
    }
}

/// Symmetric coefficient vector of a [`QuadricKind`] on this basis, or the
/// missing label.
pub fn quadric_vector(b: &FormBasis, kind: QuadricKind) -> Result<Vec<Rational>, (u32, u32)> {
    let g = b.len();
    let mut v = vec![Rational::new(); g * (g + 1) / 2];
    for (c, la, lb) in kind.terms() {
        let i = b.index_of(la.0, la.1).ok_or(la)?;
        let j = b.index_of(lb.0, lb.1).ok_or(lb)?;
        v[pair_index(g, i, j)] += c;
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessQuadric {
    pub kind: QuadricKind,
    pub quadric: String,
    pub membership_verified: bool,
    pub character: QuadricCharacter,
    /// Invariant under the whole `Z/m`.
    pub full_group_invariant: bool,
    /// Invariant under the involution `z^(m/2)` (`m` even).
    pub involution_invariant: bool,
    /// Nonzero to the stated precision.
    pub nonzero: bool,
    pub vanishing_order: Option<usize>,
    pub leading_coefficient: Option<String>,
    pub precision: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub g: u32,
    pub gprime: u32,
    pub class: GaloisFamilyClass,
    pub eigenspace_dimensions: Vec<u32>,
    pub precision: usize,
    pub quadrics: Vec<WitnessQuadric>,
}

impl WitnessReport {
    /// A quadric with verified membership, full-group invariance and a
    /// nonzero image, if any.
    pub fn invariant_witness(&self) -> Option<&WitnessQuadric> {
        self.quadrics
            .iter()
            .find(|q| q.membership_verified && q.full_group_invariant && q.nonzero)
    }
}

/// Quadrics built for a family, the first being required.
/// `g' >= 3`: the `V_2` pencil. `g' = 2`: the `V_1` pencil, plus the mixed
/// `V_1 x V_3` quadric when it exists. `g' = 1`: the mixed quadric.
fn kinds_for(gprime: u32, dims: &[u32]) -> Result<Vec<QuadricKind>, GaussianError> {
    let (d1, d2, d3) = (dims[0], dims[1], dims[2]);
    let mixed_ok = d1 >= 2 && d3 >= 2;
    match gprime {
        0 => unreachable!("enumerate_galois rejects g' = 0"),
        1 => {
            if !mixed_ok {
                return Err(GaussianError::Degenerate(format!(
                    "need d1 >= 2 and d3 >= 2, have d1 = {d1}, d3 = {d3}"
                )));
            }
            Ok(vec![QuadricKind::V1V3Mixed])
        }
        2 => {
            if d1 < 3 {
                return Err(GaussianError::Degenerate(format!(
                    "need d1 >= 3 for the V1 pencil, have d1 = {d1}"
                )));
            }
            let mut v = vec![QuadricKind::V1Pencil];
            if mixed_ok {
                v.push(QuadricKind::V1V3Mixed);
            }
            Ok(v)
        }
        _ => {
            if d2 < 3 {
                return Err(GaussianError::Degenerate(format!(
                    "need dim V2 >= 3, have {d2}"
                )));
            }
            Ok(vec![QuadricKind::V2Pencil])
        }
    }
}

fn evaluate(b: &FormBasis, kind: QuadricKind) -> Result<WitnessQuadric, GaussianError> {
    let v = quadric_vector(b, kind).map_err(|l| {
        GaussianError::Degenerate(format!(
            "form omega_{{{},{}}} is not in the basis",
            l.0, l.1
        ))
    })?;
    let character = quadric_character(b, &v);
    let image = mu2_of_quadric(b, &v)?;
    let order = image.vanishing_order();
    let m = b.m();
    let involution_invariant = match character {
        QuadricCharacter::Residue(c) => m.is_multiple_of(2) && (c * (m / 2)).is_multiple_of(m),
        QuadricCharacter::Mixed => false,
    };
    Ok(WitnessQuadric {
        kind,
        quadric: kind.describe(),
        membership_verified: true,
        character,
        full_group_invariant: character.is_invariant(),
        involution_invariant,
        nonzero: order != VanishingOrder::ZeroToPrecision,
        vanishing_order: order.order(),
        leading_coefficient: order.order().map(|k| image.coeff(k).to_string()),
        precision: image.precision(),
    })
}

/// Builds the witness quadrics on class `class_index` of the `(g, g')`
/// Galois family. A zero-to-precision image triggers doubling of the
/// precision up to `max_precision`.
pub fn witness(
    g: u32,
    gprime: u32,
    class_index: usize,
    precision: Option<usize>,
    max_precision: usize,
) -> Result<WitnessReport, GaussianError> {
    let classes = enumerate_galois(g, gprime)?;
    let class = classes.get(class_index).cloned().ok_or_else(|| {
        GaussianError::Degenerate(format!(
            "class index {class_index} out of range ({} classes)",
            classes.len()
        ))
    })?;
    let d = class.representative.normalize()?;
    let dims = d.eigenspace_dimensions();
    let kinds = kinds_for(gprime, &dims)?;
    let t = default_branch_points(d.r());
    let mut prec = precision.unwrap_or_else(|| default_precision(g).min(max_precision));
    loop {
        let cover = branch_solve(&d, &t, prec)?;
        let basis = canonical_form_basis(&cover)?;
        let quadrics = kinds
            .iter()
            .map(|&k| evaluate(&basis, k))
            .collect::<Result<Vec<_>, _>>()?;
        let all_nonzero = quadrics.iter().all(|q| q.nonzero);
        if all_nonzero || prec >= max_precision {
            return Ok(WitnessReport {
                g,
                gprime,
                class,
                eigenspace_dimensions: dims,
                precision: prec,
                quadrics,
            });
        }
        prec = (prec * 2).min(max_precision);
    }
}
