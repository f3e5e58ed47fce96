//! Randomized invariant checks shared by the property tests and the
//! acceptance runner. Each check runs `cases` random inputs and reports the
//! first failure (after shrinking) as a string.

#![allow(dead_code)]

use gaussmap::gaussian::{compute_level, mu2_images, quadric_space, ProductTable};
use gaussmap::monodromy::units;
use gaussmap::{
    branch_solve, canonical_form_basis, default_branch_points, MonodromyDatum, Rational,
    RationalMatrix, TruncatedSeries, VanishingOrder,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

fn run<S, F>(cases: u32, strategy: S, test: F) -> Result<(), String>
where
    S: Strategy,
    S::Value: std::fmt::Debug,
    F: Fn(S::Value) -> Result<(), TestCaseError>,
{
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::from((n, d)))
}

pub fn series_with(precision: usize) -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec(small_rational(), precision)
        .prop_map(move |c| TruncatedSeries::from_coeffs(c, precision))
}

pub fn series() -> impl Strategy<Value = TruncatedSeries> {
    (1usize..12).prop_flat_map(series_with)
}

fn series_triple() -> impl Strategy<Value = (TruncatedSeries, TruncatedSeries, TruncatedSeries)> {
    (1usize..12).prop_flat_map(|p| (series_with(p), series_with(p), series_with(p)))
}

/// Commutativity, associativity and distributivity of the series ring.
pub fn series_ring_laws(cases: u32) -> Result<(), String> {
    run(cases, series_triple(), |(a, b, c)| {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&(&b + &c)), &a.mul(&b) + &a.mul(&c));
        let copy = a.clone();
        prop_assert_eq!(&a - &copy, TruncatedSeries::zero(a.precision()));
        prop_assert_eq!(a.mul(&TruncatedSeries::one(a.precision())), a.clone());
        Ok(())
    })
}

/// `a * a^-1 = 1` whenever the constant term is nonzero.
pub fn inverse_round_trip(cases: u32) -> Result<(), String> {
    let strat = series().prop_filter("unit", |a| *a.coeff(0) != 0);
    run(cases, strat, |a| {
        let inv = a
            .inverse()
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(a.mul(&inv), TruncatedSeries::one(a.precision()));
        prop_assert_eq!(inv.inverse().unwrap(), a);
        Ok(())
    })
}

/// `(ab)' = a'b + ab'`.
pub fn leibniz(cases: u32) -> Result<(), String> {
    let strat = (2usize..12).prop_flat_map(|p| (series_with(p), series_with(p)));
    run(cases, strat, |(a, b)| {
        let lhs = a.mul(&b).derivative();
        let rhs = &a.derivative().mul(&b) + &a.mul(&b.derivative());
        prop_assert_eq!(lhs, rhs);
        Ok(())
    })
}

/// `ord(ab) = ord(a) + ord(b)` below the precision.
pub fn vanishing_order_additivity(cases: u32) -> Result<(), String> {
    let strat = (1usize..16).prop_flat_map(|p| (series_with(p), series_with(p), 0..p, 0..p));
    run(cases, strat, |(a, b, sa, sb)| {
        let a = a.shift(sa);
        let b = b.shift(sb);
        let prod = a.mul(&b);
        match (a.vanishing_order(), b.vanishing_order()) {
            (VanishingOrder::Order(i), VanishingOrder::Order(j)) if i + j < a.precision() => {
                prop_assert_eq!(prod.vanishing_order(), VanishingOrder::Order(i + j));
            }
            _ => prop_assert_eq!(prod.vanishing_order(), VanishingOrder::ZeroToPrecision),
        }
        Ok(())
    })
}

/// Random integer matrix with rank at most `k`, built as a product.
pub fn low_rank_matrix() -> impl Strategy<Value = (usize, usize, Vec<i64>)> {
    (1usize..7, 1usize..8, 1usize..6).prop_flat_map(|(r, c, k)| {
        (
            prop::collection::vec(-3i64..=3, r * k),
            prop::collection::vec(-3i64..=3, k * c),
        )
            .prop_map(move |(left, right)| {
                let mut e = vec![0i64; r * c];
                for i in 0..r {
                    for j in 0..c {
                        e[i * c + j] = (0..k).map(|l| left[i * k + l] * right[l * c + j]).sum();
                    }
                }
                (r, c, e)
            })
    })
}

/// Rank by textbook elimination over the rationals.
pub fn oracle_rank(rows: usize, cols: usize, entries: &[i64]) -> usize {
    let mut a: Vec<Vec<Rational>> = (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| Rational::from(entries[i * cols + j]))
                .collect()
        })
        .collect();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][col].clone();
        for i in rank + 1..rows {
            if a[i][col] != 0 {
                let f = Rational::from(&a[i][col] / &pivot);
                let pivot_row = a[rank].clone();
                for (x, p) in a[i].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= Rational::from(&f * p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Every nullspace vector is annihilated, the basis is independent, and
/// `rank + nullity = cols` with the rank matching elimination over Q.
pub fn nullspace_membership(cases: u32) -> Result<(), String> {
    run(cases, low_rank_matrix(), |(r, c, e)| {
        let m = RationalMatrix::from_i64(r, c, &e);
        let ns = m.nullspace();
        for v in &ns {
            prop_assert!(m.mul_vec(v).iter().all(|x| *x == 0));
        }
        let rank = m.rank();
        prop_assert_eq!(rank, oracle_rank(r, c, &e));
        prop_assert_eq!(rank + ns.len(), c);
        if !ns.is_empty() {
            let basis = RationalMatrix::from_rows(c, ns.clone());
            prop_assert_eq!(basis.rank(), ns.len());
        }
        Ok(())
    })
}

/// Rank is unchanged by permuting rows and scaling them by nonzero rationals.
pub fn rank_permutation_scaling(cases: u32) -> Result<(), String> {
    let strat = low_rank_matrix().prop_flat_map(|(r, c, e)| {
        (
            Just((r, c, e)),
            Just((0..r).collect::<Vec<_>>()).prop_shuffle(),
            prop::collection::vec(small_rational().prop_filter("nonzero", |x| *x != 0), r),
        )
    });
    run(cases, strat, |((r, c, e), perm, scales)| {
        let m = RationalMatrix::from_i64(r, c, &e);
        let rows: Vec<Vec<Rational>> = perm
            .iter()
            .zip(&scales)
            .map(|(&i, s)| m.row(i).iter().map(|x| Rational::from(x * s)).collect())
            .collect();
        let moved = RationalMatrix::from_rows(c, rows);
        prop_assert_eq!(moved.rank(), m.rank());
        prop_assert_eq!(m.transpose().rank(), m.rank());
        Ok(())
    })
}

/// Valid cyclic data with a totally ramified point and small genus.
pub fn small_datum() -> impl Strategy<Value = MonodromyDatum> {
    (2u32..=6, 2usize..=6)
        .prop_flat_map(|(m, r)| (Just(m), prop::collection::vec(1..m, r)))
        .prop_filter_map("valid datum", |(m, mut a)| {
            let s: u32 = a.iter().sum();
            let last = (m - s % m) % m;
            if last == 0 {
                return None;
            }
            a.push(last);
            let d = MonodromyDatum::new(m, a).ok()?;
            d.normalize().ok()?;
            (d.genus().ok()? <= 6).then_some(d)
        })
}

/// Genus and eigenspace dimensions under entry permutation and unit
/// multiplication: `d_n(u a) = d_{nu}(a)` and `sum d_n = g`.
pub fn hurwitz_invariance(cases: u32) -> Result<(), String> {
    let strat = small_datum().prop_flat_map(|d| {
        let us = units(d.m());
        let n = d.r();
        (
            Just(d),
            prop::sample::select(us),
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
        )
    });
    run(cases, strat, |(d, u, perm)| {
        let permuted: Vec<u32> = perm.iter().map(|&i| d.residues()[i]).collect();
        let moved = MonodromyDatum::new(d.m(), permuted)
            .map_err(|e| TestCaseError::fail(e.to_string()))?
            .scaled(u);
        prop_assert!(moved.is_valid());
        let g = d.genus().unwrap();
        prop_assert_eq!(moved.genus().unwrap(), g);
        let dims = d.eigenspace_dimensions();
        let moved_dims = moved.eigenspace_dimensions();
        let m = d.m();
        for n in 1..m {
            let nu = (n * u) % m;
            prop_assert_eq!(moved_dims[(n - 1) as usize], dims[(nu - 1) as usize]);
        }
        prop_assert_eq!(dims.iter().sum::<u32>(), g);
        let normal = moved.normalize().unwrap();
        prop_assert_eq!(normal.genus().unwrap(), g);
        prop_assert_eq!(normal.eigenspace_dimensions().iter().sum::<u32>(), g);
        Ok(())
    })
}

/// Ranks never decrease as precision grows: multiplication rank across two
/// independent runs, and the `mu_2` image matrix under column truncation.
pub fn rank_monotone_in_precision(cases: u32) -> Result<(), String> {
    let strat = (small_datum(), 8usize..30, 1usize..20)
        .prop_filter("room for the solve", |(d, lo, _)| *lo >= d.m() as usize + 2);
    run(cases, strat, |(d, lo, step)| {
        let d = d.normalize().unwrap();
        let t = default_branch_points(d.r());
        let hi = lo + step;
        let (Ok(low), Ok(high)) = (compute_level(&d, &t, lo), compute_level(&d, &t, hi)) else {
            // a form vanishing to this precision is not a rank question
            return Ok(());
        };
        prop_assert!(low.mult_rank <= high.mult_rank);
        prop_assert!(low.i2_dim >= high.i2_dim);

        let cover = branch_solve(&d, &t, hi).unwrap();
        let basis = canonical_form_basis(&cover).unwrap();
        let products = ProductTable::new(&basis);
        let q = quadric_space(&basis).unwrap();
        let images = mu2_images(&basis, &q);
        let full_cols = products.products()[0].precision();
        let mut last = 0;
        for cols in [1, full_cols / 3, full_cols / 2, full_cols] {
            let cols = cols.max(1);
            let rows: Vec<Vec<Rational>> = products
                .products()
                .iter()
                .map(|s| s.coeffs()[..cols].to_vec())
                .collect();
            let r = RationalMatrix::from_rows(cols, rows).rank();
            prop_assert!(r >= last);
            last = r;
        }
        if !images.is_empty() {
            let p = images[0].precision();
            let mut last = 0;
            for cols in [1, p / 2, p] {
                let cols = cols.max(1);
                let rows = images.iter().map(|s| s.coeffs()[..cols].to_vec()).collect();
                let r = RationalMatrix::from_rows(cols, rows).rank();
                prop_assert!(r >= last);
                last = r;
            }
        }
        Ok(())
    })
}
