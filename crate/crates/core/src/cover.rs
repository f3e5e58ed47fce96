//! Local model of a cyclic cover `y^m = g(x) = prod (x - t_i)^{a_i}` at the
//! totally ramified point over `t_1 = 0`.
//!
//! Near that point `y` is a local coordinate and `x = phi(y)` is a series in
//! `y^m`. Holomorphic forms are written as `f(y) dy` with
//!
//! ```text
//! f_{n,nu} = m / g'(phi) * y^(n-1) * phi^nu * prod_i (phi - t_i)^(l(i,n) + a_i)
//! ```
//!
//! where `l(i,n) = floor(-n a_i / m)`.

use rug::Rational;

use crate::error::CoverError;
use crate::monodromy::MonodromyDatum;
use crate::series::TruncatedSeries;

/// Default working precision: `max(150, 12 g)`.
pub fn default_precision(genus: u32) -> usize {
    150.max(12 * genus as usize)
}

/// `l(i, n) = floor(-n a_i / m)` for `n = 1..m-1`; indexed `[i][n - 1]`.
pub fn exponent_table(d: &MonodromyDatum) -> Vec<Vec<i64>> {
    let m = i64::from(d.m());
    d.residues()
        .iter()
        .map(|&a| (1..m).map(|n| (-n * i64::from(a)).div_euclid(m)).collect())
        .collect()
}

#[derive(Debug, Clone)]
pub struct CoverModel {
    datum: MonodromyDatum,
    branch_points: Vec<Rational>,
    precision: usize,
    phi: TruncatedSeries,
    gprime_at_phi: TruncatedSeries,
}

impl CoverModel {
    pub fn datum(&self) -> &MonodromyDatum {
        &self.datum
    }

    pub fn branch_points(&self) -> &[Rational] {
        &self.branch_points
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// `x = phi(y)`.
    pub fn phi(&self) -> &TruncatedSeries {
        &self.phi
    }

    /// `g'(phi(y))`, a unit series.
    pub fn gprime_at_phi(&self) -> &TruncatedSeries {
        &self.gprime_at_phi
    }

    pub fn genus(&self) -> u32 {
        self.datum.genus().expect("validated at construction")
    }
}

/// Multiplies out `prod (x - roots_i)^{exps_i}`; coefficients lowest degree first.
pub fn poly_from_roots<'a>(
    factors: impl IntoIterator<Item = (&'a Rational, u32)>,
) -> Vec<Rational> {
    let mut p = vec![Rational::from(1)];
    for (t, e) in factors {
        for _ in 0..e {
            let mut next = vec![Rational::new(); p.len() + 1];
            for (k, c) in p.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= Rational::from(c * t);
            }
            p = next;
        }
    }
    p
}

pub fn poly_derivative(p: &[Rational]) -> Vec<Rational> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * Rational::from(k as u64))
        .collect()
}

/// Solves `g(x) = y^m` for `x = phi(y)`, `g(x) = x h(x)` with
/// `h(x) = prod_{i >= 2} (x - t_i)^{a_i}`, by Newton iteration from 0.
/// `g'(0) = h(0)` is a unit, so each step doubles the number of correct
/// coefficients.
pub fn branch_solve(
    d: &MonodromyDatum,
    t: &[Rational],
    precision: usize,
) -> Result<CoverModel, CoverError> {
    let violations = d.validate();
    if !violations.is_empty() {
        return Err(crate::error::MonodromyError::Invalid(violations).into());
    }
    d.genus()?;
    if t.len() != d.r() {
        return Err(CoverError::BranchPointCount {
            expected: d.r(),
            got: t.len(),
        });
    }
    if !d.is_normalized() || t[0] != 0 {
        return Err(CoverError::NotNormalized);
    }
    for i in 0..t.len() {
        if t[i + 1..].contains(&t[i]) {
            return Err(CoverError::RepeatedBranchPoints);
        }
    }
    let m = d.m() as usize;
    if precision < m + 2 {
        return Err(CoverError::PrecisionBelowMinimum(precision));
    }

    let a = d.residues();
    let h = poly_from_roots(t[1..].iter().zip(a[1..].iter().copied()));
    let mut g = vec![Rational::new()];
    g.extend(h.iter().cloned());
    let gp = poly_derivative(&g);

    // phi = 0 is correct below degree m
    let mut phi = TruncatedSeries::zero(m);
    let mut correct = m;
    while correct < precision {
        let work = (2 * correct).min(precision);
        let p = TruncatedSeries::from_coeffs(phi.into_coeffs(), work);
        let ym = TruncatedSeries::monomial(Rational::from(1), m, work);
        let residual = &p.compose_poly(&g) - &ym;
        let step = residual.mul(&p.compose_poly(&gp).inverse()?);
        phi = &p - &step;
        correct = work;
    }

    let lhs = phi.compose_poly(&g);
    let ym = TruncatedSeries::monomial(Rational::from(1), m, precision);
    assert_eq!(lhs, ym, "g(phi(y)) must equal y^m to precision");

    let gprime_at_phi = phi.compose_poly(&gp);
    debug_assert!(*gprime_at_phi.coeff(0) != 0);

    Ok(CoverModel {
        datum: d.clone(),
        branch_points: t.to_vec(),
        precision,
        phi,
        gprime_at_phi,
    })
}

/// Local expansions of the basis `omega_{n,nu} = f_{n,nu}(y) dy` of
/// holomorphic forms, ordered n-major then nu.
#[derive(Debug, Clone)]
pub struct FormBasis {
    m: u32,
    labels: Vec<(u32, u32)>,
    series: Vec<TruncatedSeries>,
}

impl FormBasis {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// `(n, nu)` for each form; the generator acts on form `k` by `zeta^n`.
    pub fn labels(&self) -> &[(u32, u32)] {
        &self.labels
    }

    pub fn series(&self) -> &[TruncatedSeries] {
        &self.series
    }

    pub fn index_of(&self, n: u32, nu: u32) -> Option<usize> {
        self.labels.iter().position(|&l| l == (n, nu))
    }

    pub fn precision(&self) -> usize {
        self.series.iter().map(|s| s.precision()).min().unwrap_or(0)
    }
}

pub fn canonical_form_basis(c: &CoverModel) -> Result<FormBasis, CoverError> {
    let d = &c.datum;
    let m = d.m();
    let p = c.precision;
    let l = exponent_table(d);
    let dims = d.eigenspace_dimensions();
    let inv_gp = c.gprime_at_phi.inverse()?;
    let mut labels = Vec::new();
    let mut series = Vec::new();
    for n in 1..m {
        let dn = dims[(n - 1) as usize];
        if dn == 0 {
            continue;
        }
        let exps = d.residues().iter().zip(&l).map(|(&a, li)| {
            let e = li[(n - 1) as usize] + i64::from(a);
            u32::try_from(e).expect("l(i,n) + a_i >= 0")
        });
        let poly = poly_from_roots(c.branch_points.iter().zip(exps));
        let mut base = c
            .phi
            .compose_poly(&poly)
            .mul(&inv_gp)
            .shift((n - 1) as usize)
            .scale(&Rational::from(m));
        for nu in 0..dn {
            if base.is_zero() {
                return Err(CoverError::PrecisionTooLow {
                    label: (n, nu),
                    precision: p,
                });
            }
            labels.push((n, nu));
            series.push(base.clone());
            if nu + 1 < dn {
                base = base.mul(&c.phi);
            }
        }
    }
    Ok(FormBasis { m, labels, series })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monodromy::default_branch_points;
    use crate::series::VanishingOrder;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn genus_five_curve(prec: usize) -> CoverModel {
        let d = MonodromyDatum::new(4, vec![1, 1, 3, 3, 2, 2]).unwrap();
        branch_solve(&d, &default_branch_points(6), prec).unwrap()
    }

    #[test]
    fn exponent_examples() {
        let d = MonodromyDatum::new_unchecked(4, vec![1, 3]);
        let l = exponent_table(&d);
        assert_eq!(l[0][0], -1);
        assert_eq!(l[1][2], -3);
        let d = MonodromyDatum::new_unchecked(2, vec![1]);
        assert_eq!(exponent_table(&d)[0][0], -1);
    }

    #[test]
    fn exponent_range() {
        let d = MonodromyDatum::new_unchecked(6, vec![1, 2, 3, 4, 5]);
        for (a, row) in d.residues().iter().zip(exponent_table(&d)) {
            for l in row {
                assert!(l <= -1 && l >= -i64::from(*a));
            }
        }
    }

    #[test]
    fn phi_leading_terms() {
        let c = genus_five_curve(20);
        // h(x) = (x-1)(x+1)^3(x-2)^3(x+2)^2(x-3)^2, h(0) = 288
        assert_eq!(c.phi().vanishing_order(), VanishingOrder::Order(4));
        assert_eq!(*c.phi().coeff(4), q(1, 288));
        let h = poly_from_roots(c.branch_points()[1..].iter().zip([1u32, 3, 3, 2, 2]));
        assert_eq!(h[0], 288);
        // x = y^4 / h(x) gives b = -h'(0) a / h(0) = -h'(0) / h(0)^3
        assert_eq!(h[1], 240);
        let b = Rational::from(-&h[1]) / (Rational::from(&h[0] * &h[0]) * &h[0]);
        assert_eq!(*c.phi().coeff(8), b);
        assert_eq!(b, q(-5, 497664));
    }

    #[test]
    fn phi_hyperelliptic_leading_term() {
        let d = MonodromyDatum::new(2, vec![1, 1, 1, 1]).unwrap();
        let c = branch_solve(&d, &default_branch_points(4), 12).unwrap();
        assert_eq!(*c.phi().coeff(2), q(1, 2));
    }

    #[test]
    fn phi_only_in_powers_of_y_to_the_m() {
        let c = genus_five_curve(60);
        for (k, coeff) in c.phi().coeffs().iter().enumerate() {
            if k % 4 != 0 {
                assert_eq!(*coeff, 0);
            }
        }
    }

    #[test]
    fn solve_errors() {
        let d = MonodromyDatum::new(4, vec![1, 1, 3, 3, 2, 2]).unwrap();
        let mut t = default_branch_points(6);
        t[3] = t[1].clone();
        assert_eq!(
            branch_solve(&d, &t, 30).unwrap_err(),
            CoverError::RepeatedBranchPoints
        );
        let t = default_branch_points(6);
        let d2 = MonodromyDatum::new(4, vec![3, 3, 1, 1, 2, 2]).unwrap();
        assert_eq!(
            branch_solve(&d2, &t, 30).unwrap_err(),
            CoverError::NotNormalized
        );
        let mut t0 = t.clone();
        t0.swap(0, 1);
        assert_eq!(
            branch_solve(&d, &t0, 30).unwrap_err(),
            CoverError::NotNormalized
        );
        assert!(matches!(
            branch_solve(&d, &t[..5], 30),
            Err(CoverError::BranchPointCount { .. })
        ));
    }

    #[test]
    fn genus_five_basis() {
        let c = genus_five_curve(40);
        let b = canonical_form_basis(&c).unwrap();
        assert_eq!(b.len(), 5);
        assert_eq!(b.labels(), &[(1, 0), (1, 1), (2, 0), (3, 0), (3, 1)]);
        assert_eq!(b.series()[0].vanishing_order(), VanishingOrder::Order(0));
    }

    #[test]
    fn hyperelliptic_basis_is_x_powers() {
        let d = MonodromyDatum::new(2, vec![1; 8]).unwrap();
        let c = branch_solve(&d, &default_branch_points(8), 30).unwrap();
        let b = canonical_form_basis(&c).unwrap();
        assert_eq!(b.len(), 3);
        let f0 = &b.series()[0];
        for nu in 1..3 {
            assert_eq!(b.series()[nu], f0.mul(&c.phi().pow(nu as u32)));
        }
        // f_{1,0} = 2 / g'(phi)
        let expect = c
            .gprime_at_phi()
            .inverse()
            .unwrap()
            .scale(&Rational::from(2));
        assert_eq!(*f0, expect);
    }

    #[test]
    fn character_support() {
        let c = genus_five_curve(60);
        let b = canonical_form_basis(&c).unwrap();
        for (s, &(n, _)) in b.series().iter().zip(b.labels()) {
            for (k, coeff) in s.coeffs().iter().enumerate() {
                if *coeff != 0 {
                    assert_eq!(k as u32 % 4, n - 1);
                }
            }
        }
    }
}
