//! Exact rank and nullspace over the rationals.
//!
//! Rows are first scaled to primitive integer vectors, the matrix is split
//! into independent blocks (connected components of the row/column incidence
//! graph), and each block is reduced with fraction-free elimination over
//! `rug::Integer`. Cyclic-cover matrices are block diagonal by character, so
//! the split keeps intermediate entries small.

use rug::{Integer, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            entries: vec![Rational::new(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::from(1));
        }
        m
    }

    /// Row-major construction. Panics if `entries.len() != rows * cols`.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Rational>) -> Self {
        assert_eq!(
            entries.len(),
            rows * cols,
            "entry count must be rows * cols"
        );
        RationalMatrix {
            rows,
            cols,
            entries,
        }
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Self {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged row");
            entries.extend(row);
        }
        RationalMatrix {
            rows: n,
            cols,
            entries,
        }
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        Self::from_entries(
            rows,
            cols,
            entries.iter().map(|&x| Rational::from(x)).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> RationalMatrix {
        let mut t = RationalMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::new();
                for (a, b) in self.row(i).iter().zip(v) {
                    if *a != 0 && *b != 0 {
                        acc += Rational::from(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        rank(self)
    }

    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        nullspace(self)
    }
}

/// Exact rank over the rationals.
pub fn rank(m: &RationalMatrix) -> usize {
    let int_rows = integer_rows(m);
    blocks(&int_rows, m.cols)
        .into_iter()
        .map(|b| {
            let mut a = b.extract(&int_rows);
            forward_eliminate(&mut a, b.cols.len())
        })
        .sum()
}

/// Basis of `{ v : M v = 0 }`, one vector per non-pivot column, taken from the
/// reduced row echelon form. The basis is canonical: vector `k` has a 1 in the
/// `k`-th free column and 0 in every other free column.
pub fn nullspace(m: &RationalMatrix) -> Vec<Vec<Rational>> {
    let int_rows = integer_rows(m);
    let mut out: Vec<(usize, Vec<Rational>)> = Vec::new();
    let mut touched = vec![false; m.cols];
    for b in blocks(&int_rows, m.cols) {
        for &c in &b.cols {
            touched[c] = true;
        }
        let mut a = b.extract(&int_rows);
        let (pivots, denom) = gauss_jordan(&mut a, b.cols.len());
        let mut is_pivot = vec![false; b.cols.len()];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        for free in (0..b.cols.len()).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Rational::new(); m.cols];
            v[b.cols[free]] = Rational::from(1);
            for (row, &pc) in pivots.iter().enumerate() {
                let e = &a[row][free];
                if *e != 0 {
                    v[b.cols[pc]] = -Rational::from((e.clone(), denom.clone()));
                }
            }
            out.push((b.cols[free], v));
        }
    }
    for (c, t) in touched.iter().enumerate() {
        if !t {
            let mut v = vec![Rational::new(); m.cols];
            v[c] = Rational::from(1);
            out.push((c, v));
        }
    }
    out.sort_by_key(|(c, _)| *c);
    out.into_iter().map(|(_, v)| v).collect()
}

/// Scales a rational vector to a primitive integer vector with the same span.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<Integer> {
    let mut lcm = Integer::from(1);
    for x in v {
        if *x != 0 {
            lcm.lcm_mut(x.denom());
        }
    }
    let mut out: Vec<Integer> = v
        .iter()
        .map(|x| {
            let mut n = Integer::from(x.numer() * &lcm);
            n.div_exact_mut(x.denom());
            n
        })
        .collect();
    let mut g = Integer::new();
    for x in &out {
        g.gcd_mut(x);
    }
    if g > 1 {
        for x in &mut out {
            x.div_exact_mut(&g);
        }
    }
    out
}

fn integer_rows(m: &RationalMatrix) -> Vec<Vec<Integer>> {
    (0..m.rows)
        .map(|i| primitive_integer_vector(m.row(i)))
        .collect()
}

struct Block {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl Block {
    fn extract(&self, int_rows: &[Vec<Integer>]) -> Vec<Vec<Integer>> {
        self.rows
            .iter()
            .map(|&r| self.cols.iter().map(|&c| int_rows[r][c].clone()).collect())
            .collect()
    }
}

/// Connected components of the bipartite graph joining row `i` to column `j`
/// whenever entry `(i, j)` is nonzero. Zero rows and zero columns belong to
/// no block.
fn blocks(int_rows: &[Vec<Integer>], cols: usize) -> Vec<Block> {
    let n = int_rows.len();
    let mut parent: Vec<usize> = (0..n + cols).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut live = vec![false; n + cols];
    for (i, row) in int_rows.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if *e != 0 {
                live[i] = true;
                live[n + j] = true;
                let (a, b) = (find(&mut parent, i), find(&mut parent, n + j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut order: Vec<usize> = Vec::new();
    let mut by_root: std::collections::HashMap<usize, Block> = std::collections::HashMap::new();
    for (x, _) in live.iter().enumerate().filter(|(_, &l)| l) {
        let root = find(&mut parent, x);
        let block = by_root.entry(root).or_insert_with(|| {
            order.push(root);
            Block {
                rows: Vec::new(),
                cols: Vec::new(),
            }
        });
        if x < n {
            block.rows.push(x);
        } else {
            block.cols.push(x - n);
        }
    }
    order
        .into_iter()
        .map(|r| by_root.remove(&r).expect("block root"))
        .collect()
}

/// Bareiss forward elimination in place; returns the rank. Pivots are the
/// first nonzero entry in each column.
fn forward_eliminate(a: &mut [Vec<Integer>], cols: usize) -> usize {
    let n = a.len();
    let mut prev = Integer::from(1);
    let mut r = 0;
    let mut tmp = Integer::new();
    for k in 0..cols {
        if r == n {
            break;
        }
        let Some(p) = (r..n).find(|&i| a[i][k] != 0) else {
            continue;
        };
        a.swap(r, p);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let piv = &pivot_row[k];
        for row in rest.iter_mut() {
            let factor = std::mem::take(&mut row[k]);
            for j in k + 1..cols {
                tmp.assign_ff(piv, &row[j], &factor, &pivot_row[j]);
                tmp.div_exact_mut(&prev);
                std::mem::swap(&mut row[j], &mut tmp);
            }
        }
        prev = pivot_row[k].clone();
        r += 1;
    }
    r
}

/// Fraction-free Gauss-Jordan reduction in place. On return row `i` (for
/// `i < pivots.len()`) divided by `denom` is row `i` of the reduced row
/// echelon form; `pivots[i]` is its pivot column.
fn gauss_jordan(a: &mut Vec<Vec<Integer>>, cols: usize) -> (Vec<usize>, Integer) {
    let n = a.len();
    let mut prev = Integer::from(1);
    let mut pivots = Vec::new();
    let mut tmp = Integer::new();
    for k in 0..cols {
        let r = pivots.len();
        if r == n {
            break;
        }
        let Some(p) = (r..n).find(|&i| a[i][k] != 0) else {
            continue;
        };
        a.swap(r, p);
        let pivot_row = std::mem::take(&mut a[r]);
        let piv = &pivot_row[k];
        for (i, row) in a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = std::mem::take(&mut row[k]);
            for j in 0..cols {
                if j == k {
                    continue;
                }
                if factor == 0 && row[j] == 0 {
                    continue;
                }
                tmp.assign_ff(piv, &row[j], &factor, &pivot_row[j]);
                tmp.div_exact_mut(&prev);
                std::mem::swap(&mut row[j], &mut tmp);
            }
        }
        prev = piv.clone();
        a[r] = pivot_row;
        pivots.push(k);
    }
    a.truncate(pivots.len());
    (pivots, prev)
}

trait FractionFree {
    /// `self = a*b - c*d`
    fn assign_ff(&mut self, a: &Integer, b: &Integer, c: &Integer, d: &Integer);
}

impl FractionFree for Integer {
    fn assign_ff(&mut self, a: &Integer, b: &Integer, c: &Integer, d: &Integer) {
        use rug::Assign;
        self.assign(a * b);
        if *c != 0 && *d != 0 {
            *self -= c * d;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    /// Plain Gauss-Jordan over the rationals, used as an independent oracle.
    fn rref_oracle(m: &RationalMatrix) -> (Vec<Vec<Rational>>, Vec<usize>) {
        let mut a: Vec<Vec<Rational>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for k in 0..m.cols() {
            let Some(p) = (r..a.len()).find(|&i| a[i][k] != 0) else {
                continue;
            };
            a.swap(r, p);
            let inv = Rational::from(a[r][k].recip_ref());
            for x in a[r].iter_mut() {
                *x *= &inv;
            }
            let pivot_row = a[r].clone();
            for (i, row) in a.iter_mut().enumerate() {
                if i != r && row[k] != 0 {
                    let f = row[k].clone();
                    for (x, p) in row.iter_mut().zip(&pivot_row) {
                        *x -= Rational::from(&f * p);
                    }
                }
            }
            pivots.push(k);
            r += 1;
        }
        a.truncate(r);
        (a, pivots)
    }

    #[test]
    fn identity_and_zero() {
        assert_eq!(RationalMatrix::identity(3).rank(), 3);
        assert_eq!(RationalMatrix::zeros(3, 4).rank(), 0);
        assert!(RationalMatrix::identity(3).nullspace().is_empty());
        assert_eq!(RationalMatrix::zeros(2, 3).nullspace().len(), 3);
    }

    #[test]
    fn one_by_two() {
        let m = RationalMatrix::from_i64(1, 2, &[1, 1]);
        let ns = m.nullspace();
        assert_eq!(ns, vec![vec![q(-1, 1), q(1, 1)]]);
    }

    #[test]
    fn rank_deficient_with_fractions() {
        let m = RationalMatrix::from_entries(
            3,
            3,
            vec![
                q(1, 2),
                q(1, 3),
                q(1, 4),
                q(1, 1),
                q(2, 3),
                q(1, 2),
                q(0, 1),
                q(5, 7),
                q(-1, 9),
            ],
        );
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(|x| *x == 0));
    }

    #[test]
    fn nullspace_matches_rref_oracle() {
        let m = RationalMatrix::from_i64(
            3,
            6,
            &[2, 4, 0, 6, 1, 0, 1, 2, 0, 3, 0, 5, 0, 0, 3, 3, 3, 3],
        );
        let (rref, pivots) = rref_oracle(&m);
        let free: Vec<usize> = (0..6).filter(|c| !pivots.contains(c)).collect();
        let expect: Vec<Vec<Rational>> = free
            .iter()
            .map(|&f| {
                let mut v = vec![Rational::new(); 6];
                v[f] = Rational::from(1);
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -rref[row][f].clone();
                }
                v
            })
            .collect();
        assert_eq!(m.nullspace(), expect);
        assert_eq!(m.rank(), pivots.len());
    }

    #[test]
    fn block_split_agrees_with_dense_oracle() {
        // two independent blocks interleaved
        let m = RationalMatrix::from_i64(4, 4, &[1, 0, 2, 0, 0, 3, 0, 1, 2, 0, 4, 0, 0, 1, 0, 5]);
        assert_eq!(m.rank(), 3);
        assert_eq!(rref_oracle(&m).1.len(), 3);
        let ns = m.nullspace();
        assert_eq!(ns, vec![vec![q(-2, 1), q(0, 1), q(1, 1), q(0, 1)]]);
    }

    #[test]
    fn primitive_vector() {
        let v = primitive_integer_vector(&[q(1, 2), q(-3, 4), q(0, 1)]);
        assert_eq!(
            v,
            vec![Integer::from(2), Integer::from(-3), Integer::from(0)]
        );
    }
}
