//! Cyclic monodromy data `(m; a_1, ..., a_r)` over a genus-zero base.
//!
//! A datum describes a `Z/m` cover of the line branched over `r` points, the
//! local monodromy at the i-th point being the residue `a_i`. Hurwitz
//! equivalence is taken as the quotient by entry permutations and by
//! multiplication with units of `Z/m`.

use std::fmt;
use std::str::FromStr;

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::error::MonodromyError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MonodromyDatum {
    m: u32,
    a: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `m < 2`.
    OrderTooSmall(u32),
    /// `a_i` is `0 mod m` (the entry at this index, as given).
    TrivialResidue {
        index: usize,
        value: u32,
    },
    /// `sum a_i != 0 mod m`.
    SumNotZero {
        residue: u32,
    },
    /// `gcd(a_1, ..., a_r, m) != 1`.
    NotEpimorphism {
        gcd: u32,
    },
    Empty,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OrderTooSmall(m) => write!(f, "group order m = {m} must be at least 2"),
            Violation::TrivialResidue { index, value } => {
                write!(f, "a_{} = {value} is 0 mod m", index + 1)
            }
            Violation::SumNotZero { residue } => {
                write!(f, "sum of residues is {residue} mod m, not 0")
            }
            Violation::NotEpimorphism { gcd } => {
                write!(f, "gcd(a, m) = {gcd} != 1, theta is not an epimorphism")
            }
            Violation::Empty => write!(f, "no branch points"),
        }
    }
}

impl MonodromyDatum {
    /// Builds a datum without checking it; see [`MonodromyDatum::validate`].
    /// Residues are stored as given.
    pub fn new_unchecked(m: u32, a: Vec<u32>) -> Self {
        MonodromyDatum { m, a }
    }

    /// Builds and validates, reducing residues mod `m`.
    pub fn new(m: u32, a: Vec<u32>) -> Result<Self, MonodromyError> {
        let d = MonodromyDatum { m, a };
        let v = d.validate();
        if !v.is_empty() {
            return Err(MonodromyError::Invalid(v));
        }
        Ok(MonodromyDatum {
            m,
            a: d.a.iter().map(|x| x % m).collect(),
        })
    }

    /// `m` and the residue blocks `(residue, count)`, e.g. `[1^4:2^2]`.
    pub fn from_blocks(m: u32, blocks: &[(u32, usize)]) -> Result<Self, MonodromyError> {
        let a = blocks
            .iter()
            .flat_map(|&(res, n)| std::iter::repeat_n(res, n))
            .collect();
        Self::new(m, a)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn residues(&self) -> &[u32] {
        &self.a
    }

    pub fn r(&self) -> usize {
        self.a.len()
    }

    /// Every violated invariant, each reported once.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.m < 2 {
            out.push(Violation::OrderTooSmall(self.m));
            return out;
        }
        if self.a.is_empty() {
            out.push(Violation::Empty);
            return out;
        }
        for (index, &value) in self.a.iter().enumerate() {
            if value % self.m == 0 {
                out.push(Violation::TrivialResidue { index, value });
            }
        }
        let sum = self.a.iter().map(|&x| u64::from(x)).sum::<u64>() % u64::from(self.m);
        if sum != 0 {
            out.push(Violation::SumNotZero {
                residue: sum as u32,
            });
        }
        let g = self.a.iter().fold(self.m, |acc, &x| gcd(acc, x));
        if g != 1 {
            out.push(Violation::NotEpimorphism { gcd: g });
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Local ramification orders `m_i = m / gcd(a_i, m)`.
    pub fn local_orders(&self) -> Vec<u32> {
        self.a.iter().map(|&x| self.m / gcd(x, self.m)).collect()
    }

    /// Genus from Riemann-Hurwitz: `2g - 2 = m(-2 + sum(1 - 1/m_i))`.
    pub fn genus(&self) -> Result<u32, MonodromyError> {
        let m = i64::from(self.m);
        let two_g_minus_2: i64 = -2 * m
            + self
                .a
                .iter()
                .map(|&x| m - i64::from(gcd(x, self.m)))
                .sum::<i64>();
        if two_g_minus_2 < -2 || two_g_minus_2 % 2 != 0 {
            return Err(MonodromyError::NonIntegralGenus(two_g_minus_2));
        }
        Ok(((two_g_minus_2 + 2) / 2) as u32)
    }

    /// `d_n = dim V_n` for `n = 1..m-1`, where `V_n` is the eigenspace of
    /// holomorphic forms on which the generator acts by `zeta^n`:
    /// `d_n = -1 + sum_j frac(-n a_j / m)`.
    pub fn eigenspace_dimensions(&self) -> Vec<u32> {
        let m = u64::from(self.m);
        (1..m)
            .map(|n| {
                // frac(-n a / m) = ((-n a) mod m) / m
                let num: u64 = self
                    .a
                    .iter()
                    .map(|&x| (m - (n * u64::from(x)) % m) % m)
                    .sum();
                debug_assert_eq!(num % m, 0, "valid data give integral d_n");
                (num / m).saturating_sub(1) as u32
            })
            .collect()
    }

    /// Hurwitz-equivalent datum with `a_1 = 1`: multiply by the inverse of the
    /// first unit residue, then swap that entry to the front.
    pub fn normalize(&self) -> Result<MonodromyDatum, MonodromyError> {
        let m = self.m;
        let (idx, &unit) = self
            .a
            .iter()
            .enumerate()
            .find(|(_, &x)| gcd(x, m) == 1)
            .ok_or(MonodromyError::NoTotallyRamifiedPoint(m))?;
        let inv = mod_inverse(unit, m).expect("unit has an inverse");
        let mut a: Vec<u32> = self
            .a
            .iter()
            .map(|&x| ((u64::from(x) * u64::from(inv)) % u64::from(m)) as u32)
            .collect();
        a.swap(0, idx);
        Ok(MonodromyDatum { m, a })
    }

    pub fn is_normalized(&self) -> bool {
        self.a.first() == Some(&1)
    }

    /// Multiplies every residue by `u` (mod m). `u` should be a unit.
    pub fn scaled(&self, u: u32) -> MonodromyDatum {
        MonodromyDatum {
            m: self.m,
            a: self
                .a
                .iter()
                .map(|&x| ((u64::from(x) * u64::from(u)) % u64::from(self.m)) as u32)
                .collect(),
        }
    }

    /// Run-length blocks in entry order, e.g. `[(1, 4), (2, 2)]`.
    pub fn blocks(&self) -> Vec<(u32, usize)> {
        let mut out: Vec<(u32, usize)> = Vec::new();
        for &x in &self.a {
            match out.last_mut() {
                Some((res, n)) if *res == x => *n += 1,
                _ => out.push((x, 1)),
            }
        }
        out
    }

    /// Compact shorthand, e.g. `[1^3:3:2^5]`.
    pub fn shorthand(&self) -> String {
        let parts: Vec<String> = self
            .blocks()
            .into_iter()
            .map(|(res, n)| {
                if n == 1 {
                    res.to_string()
                } else {
                    format!("{res}^{n}")
                }
            })
            .collect();
        format!("[{}]", parts.join(":"))
    }
}

impl fmt::Display for MonodromyDatum {
    /// The CLI grammar `m=<int>;a=<res>^<count>,...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks()
            .into_iter()
            .map(|(res, n)| {
                if n == 1 {
                    res.to_string()
                } else {
                    format!("{res}^{n}")
                }
            })
            .collect();
        write!(f, "m={};a={}", self.m, parts.join(","))
    }
}

impl FromStr for MonodromyDatum {
    type Err = MonodromyError;

    /// Parses `m=4;a=1^4,2^2` or the shorthand `[1^4:2^2]` (m = 4). The
    /// result is not validated.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_datum(s)
    }
}

fn parse_err(pos: usize, msg: impl Into<String>) -> MonodromyError {
    MonodromyError::Parse {
        pos,
        msg: msg.into(),
    }
}

fn parse_datum(s: &str) -> Result<MonodromyDatum, MonodromyError> {
    let lead = s.len() - s.trim_start().len();
    let t = s.trim();
    if let Some(inner) = t.strip_prefix('[') {
        let Some(inner) = inner.strip_suffix(']') else {
            return Err(parse_err(lead + t.len(), "expected closing ']'"));
        };
        let a = parse_blocks(inner, ':', lead + 1)?;
        return Ok(MonodromyDatum { m: 4, a });
    }
    let Some(rest) = t.strip_prefix("m=") else {
        return Err(parse_err(lead, "expected 'm=' or '['"));
    };
    let Some(semi) = rest.find(';') else {
        return Err(parse_err(
            lead + t.len(),
            "expected ';a=' after the group order",
        ));
    };
    let m_str = &rest[..semi];
    let m: u32 = m_str
        .trim()
        .parse()
        .map_err(|_| parse_err(lead + 2, format!("invalid group order '{m_str}'")))?;
    let after = &rest[semi + 1..];
    let a_off = lead + 2 + semi + 1;
    let Some(list) = after.trim_start().strip_prefix("a=") else {
        return Err(parse_err(a_off, "expected 'a='"));
    };
    let list_off = a_off + (after.len() - after.trim_start().len()) + 2;
    let a = parse_blocks(list, ',', list_off)?;
    Ok(MonodromyDatum { m, a })
}

fn parse_blocks(s: &str, sep: char, offset: usize) -> Result<Vec<u32>, MonodromyError> {
    if s.trim().is_empty() {
        return Err(parse_err(offset, "empty residue list"));
    }
    let mut out = Vec::new();
    let mut pos = offset;
    for item in s.split(sep) {
        let (res, count) = match item.split_once('^') {
            Some((r, c)) => (r, Some((c, pos + r.len() + 1))),
            None => (item, None),
        };
        let residue: u32 = res
            .trim()
            .parse()
            .map_err(|_| parse_err(pos, format!("invalid residue '{}'", res.trim())))?;
        let n: usize = match count {
            Some((c, cpos)) => c
                .trim()
                .parse()
                .map_err(|_| parse_err(cpos, format!("invalid count '{}'", c.trim())))?,
            None => 1,
        };
        if n == 0 {
            return Err(parse_err(pos, "block count must be positive"));
        }
        out.extend(std::iter::repeat_n(residue, n));
        pos += item.len() + 1;
    }
    Ok(out)
}

/// Default branch points `0, 1, -1, 2, -2, 3, ...`, truncated to `r`.
pub fn default_branch_points(r: usize) -> Vec<Rational> {
    (0..r)
        .map(|i| {
            let k = i64::try_from(i.div_ceil(2)).expect("branch point index fits in i64");
            if i % 2 == 1 {
                Rational::from(k)
            } else {
                Rational::from(-k)
            }
        })
        .collect()
}

/// One Hurwitz class of `Z/4` covers factoring through a double cover of a
/// genus-`gprime` curve: `s1` entries of residue 1, `s3` of residue 3 and
/// `r2` of residue 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisFamilyClass {
    pub g: u32,
    pub gprime: u32,
    pub s1: u32,
    pub s3: u32,
    pub r2: u32,
    pub representative: MonodromyDatum,
}

/// Classes of the Galois bielliptic (`gprime = 1`) or bihyperelliptic locus,
/// up to entry permutation and the unit swap `1 <-> 3`. Canonical
/// representatives have `s1 >= s3`, listed by decreasing `s1`.
pub fn enumerate_galois(g: u32, gprime: u32) -> Result<Vec<GaloisFamilyClass>, MonodromyError> {
    if gprime == 0 || g < 3 * gprime {
        return Err(MonodromyError::EmptyLocus { g, gprime });
    }
    let r4 = 2 * gprime + 2;
    let r2 = g - 3 * gprime;
    let mut out = Vec::new();
    for s1 in (r4.div_ceil(2)..=r4).rev() {
        let s3 = r4 - s1;
        if s1 % 2 != (g + 1) % 2 {
            continue;
        }
        let representative = MonodromyDatum::from_blocks(
            4,
            &[(1, s1 as usize), (3, s3 as usize), (2, r2 as usize)],
        )?;
        let rg = representative.genus()?;
        debug_assert_eq!(rg, g);
        out.push(GaloisFamilyClass {
            g,
            gprime,
            s1,
            s3,
            r2,
            representative,
        });
    }
    Ok(out)
}

pub(crate) fn gcd(a: u32, b: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn mod_inverse(a: u32, m: u32) -> Option<u32> {
    let (mut old_r, mut r) = (i64::from(a % m), i64::from(m));
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(i64::from(m)) as u32)
}

/// Units of `Z/m`.
pub fn units(m: u32) -> Vec<u32> {
    (1..m).filter(|&u| gcd(u, m) == 1).collect()
}
