//! Rows of the bielliptic rank table and their CSV form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cache::{stable_rank_cached, ResultsCache};
use crate::cover::default_precision;
use crate::error::GaussianError;
use crate::gaussian::{PrecisionPolicy, RankReport};
use crate::monodromy::{default_branch_points, enumerate_galois};

pub const CSV_HEADER: &str = "genus,monodromy,rank_mu2,max_rank_mu2,precision,stable";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub genus: u32,
    /// Shorthand such as `[1^3:3:2^5]`.
    pub monodromy: String,
    pub mu2_rank: usize,
    /// False when `mu2_rank` is only a lower bound.
    pub exact: bool,
    /// `min(dim I_2, 5g - 5)` on bielliptic data, `min(dim I_2, 7g - 7)` otherwise.
    pub max_rank: usize,
    pub precision: usize,
    pub stable: bool,
    /// Evidence only: the computed bound equals `2g - 1` (g >= 8, bielliptic).
    #[serde(default)]
    pub equals_2g_minus_1: bool,
}

impl TableRow {
    pub fn rank_cell(&self) -> String {
        if self.exact {
            self.mu2_rank.to_string()
        } else {
            format!(">={}", self.mu2_rank)
        }
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.genus,
            self.monodromy,
            self.rank_cell(),
            self.max_rank,
            self.precision,
            self.stable
        )
    }
}

impl fmt::Display for TableRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:>3}  {:<16} {:>6}  {:>4}  prec {}{}",
            self.genus,
            self.monodromy,
            self.rank_cell(),
            self.max_rank,
            self.precision,
            if self.stable { "" } else { "  (unstable)" }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvError(pub String);

impl fmt::Display for CsvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bad table row: {}", self.0)
    }
}

impl std::error::Error for CsvError {}

impl FromStr for TableRow {
    type Err = CsvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let cells: Vec<&str> = s.trim().split(',').collect();
        let [genus, monodromy, rank, max_rank, precision, stable] = cells[..] else {
            return Err(CsvError(format!("expected 6 cells, got {}", cells.len())));
        };
        let num = |x: &str| {
            x.parse::<usize>()
                .map_err(|_| CsvError(format!("not a number: '{x}'")))
        };
        let (exact, rank) = match rank.strip_prefix(">=") {
            Some(r) => (false, num(r)?),
            None => (true, num(rank)?),
        };
        let genus = genus
            .parse::<u32>()
            .map_err(|_| CsvError(format!("not a genus: '{genus}'")))?;
        Ok(TableRow {
            genus,
            monodromy: monodromy.to_string(),
            mu2_rank: rank,
            exact,
            max_rank: num(max_rank)?,
            precision: num(precision)?,
            stable: stable
                .parse()
                .map_err(|_| CsvError(format!("not a bool: '{stable}'")))?,
            equals_2g_minus_1: !exact && genus >= 8 && rank == 2 * genus as usize - 1,
        })
    }
}

/// Upper bound on `rank mu_2` used in the table's last column.
pub fn max_rank(g: u32, gprime: u32) -> usize {
    let g = g as usize;
    let i2 = (g - 2) * (g - 3) / 2;
    let target = if gprime == 1 { 5 * g - 5 } else { 7 * g - 7 };
    i2.min(target)
}

/// Computes one table row on the first (canonical) class of the `(g, g')`
/// Galois family: `[1^4:2^(g-3)]` for odd `g` and `[1^3:3:2^(g-3)]` for even
/// `g` when `g' = 1`.
pub fn table_row(
    g: u32,
    gprime: u32,
    policy: Option<PrecisionPolicy>,
    cache: Option<&ResultsCache>,
) -> Result<(TableRow, RankReport), GaussianError> {
    let classes = enumerate_galois(g, gprime)?;
    let d = classes[0].representative.normalize()?;
    let t = default_branch_points(d.r());
    let policy = policy.unwrap_or(PrecisionPolicy::Fixed(default_precision(g)));
    let report = stable_rank_cached(cache, &d, &t, policy)?;
    let max = max_rank(g, gprime);
    let rank = report.mu2_rank_lower_bound;
    let exact = report.saturated || (report.kernel_certified && rank == max);
    let row = TableRow {
        genus: g,
        monodromy: classes[0].representative.shorthand(),
        mu2_rank: rank,
        exact,
        max_rank: max,
        precision: report.precision_used,
        stable: report.stable,
        equals_2g_minus_1: gprime == 1 && !exact && g >= 8 && rank == 2 * g as usize - 1,
    };
    Ok((row, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_rank_column() {
        let expect = [
            (5, 3),
            (8, 15),
            (9, 21),
            (13, 55),
            (14, 65),
            (15, 70),
            (30, 145),
        ];
        for (g, m) in expect {
            assert_eq!(max_rank(g, 1), m, "g = {g}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let row = TableRow {
            genus: 9,
            monodromy: "[1^4:2^6]".into(),
            mu2_rank: 17,
            exact: false,
            max_rank: 21,
            precision: 150,
            stable: false,
            equals_2g_minus_1: true,
        };
        let line = row.to_csv();
        assert_eq!(line, "9,[1^4:2^6],>=17,21,150,false");
        assert_eq!(line.parse::<TableRow>().unwrap(), row);
        let json = serde_json::to_string(&row).unwrap();
        assert_eq!(serde_json::from_str::<TableRow>(&json).unwrap(), row);
    }

    #[test]
    fn csv_rejects_garbage() {
        assert!("1,2,3".parse::<TableRow>().is_err());
        assert!("x,[1^4:2^2],3,3,150,true".parse::<TableRow>().is_err());
    }
}
