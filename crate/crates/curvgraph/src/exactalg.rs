//! Exact scalar arithmetic and exact sparse row reduction.
//!
//! Everything in here is over the rationals: arbitrary-precision `Rat`
//! scalars, univariate polynomials `PolyM` in the formal dimension `m`,
//! reduced fractions `RatFuncM` of such polynomials and `KappaPoly`,
//! polynomials in the scalar-curvature symbol `kappa` with `RatFuncM`
//! coefficients. No floating point is used anywhere in this module.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

use crate::{Error, Result};

/// Arbitrary-precision rational, always reduced, denominator positive.
pub type Rat = BigRational;

/// Integer rational constructor.
pub fn rat_i(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// `n/d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Division with an explicit error on a zero divisor.
pub fn checked_div(a: &Rat, b: &Rat) -> Result<Rat> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a / b)
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().expect("rational out of f64 range")
}

/// Parse `p`, `-p` or `p/q`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.to_string(), d.to_string()),
        None => (s, "1".to_string()),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer `{num}`")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer `{den}`")))?;
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(BigRational::new(n, d))
}

// ---------------------------------------------------------------------------
// Univariate polynomials in the formal dimension m.
// ---------------------------------------------------------------------------

/// Polynomial in the formal dimension variable `m`, coefficients ascending
/// by power, trailing zeros stripped. The zero polynomial has no
/// coefficients and degree `None`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyM {
    coeffs: Vec<Rat>,
}

impl PolyM {
    pub fn zero() -> Self {
        PolyM { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        PolyM::constant(rat_i(1))
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = PolyM { coeffs: vec![c] };
        p.normalize();
        p
    }

    /// The variable `m`.
    pub fn var() -> Self {
        PolyM {
            coeffs: vec![rat_i(0), rat_i(1)],
        }
    }

    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        let mut p = PolyM { coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(|| rat_i(0))
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn add(&self, other: &PolyM) -> PolyM {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + other.coeff(k));
        }
        PolyM::from_coeffs(out)
    }

    pub fn neg(&self) -> PolyM {
        PolyM {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &PolyM) -> PolyM {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PolyM) -> PolyM {
        if self.is_zero() || other.is_zero() {
            return PolyM::zero();
        }
        let mut out = vec![rat_i(0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyM::from_coeffs(out)
    }

    pub fn scale(&self, c: &Rat) -> PolyM {
        PolyM::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Substitute a rational value for `m`.
    pub fn eval(&self, m: &Rat) -> Rat {
        let mut acc = rat_i(0);
        for c in self.coeffs.iter().rev() {
            acc = acc * m + c;
        }
        acc
    }

    /// Polynomial division, `(quotient, remainder)`.
    pub fn div_rem(&self, den: &PolyM) -> (PolyM, PolyM) {
        assert!(!den.is_zero(), "division by zero polynomial");
        let dd = den.degree().unwrap();
        let lead = den.coeffs[dd].clone();
        let mut rem = self.clone();
        let mut quot = vec![rat_i(0); self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let f = &rem.coeffs[rd] / &lead;
            quot[rd - dd] = f.clone();
            for k in 0..=dd {
                let t = &den.coeffs[k] * &f;
                rem.coeffs[rd - dd + k] -= t;
            }
            rem.normalize();
        }
        (PolyM::from_coeffs(quot), rem)
    }

    /// Monic gcd via the Euclidean algorithm.
    pub fn gcd(&self, other: &PolyM) -> PolyM {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.coeffs.last().unwrap().clone();
        a.scale(&(rat_i(1) / lead))
    }
}

impl fmt::Debug for PolyM {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PolyM {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if k == 1 {
                        write!(f, "m")?;
                    } else {
                        write!(f, "m^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Parse a polynomial in `m`: sums of `c`, `c*m^k`, `m^k`, `m`.
pub fn parse_polym(s: &str) -> Result<PolyM> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    // split into signed terms
    let mut terms: Vec<(i32, String)> = Vec::new();
    let mut cur = String::new();
    let mut sign = 1;
    for (i, ch) in s.chars().enumerate() {
        match ch {
            '+' | '-' if i > 0 => {
                terms.push((sign, std::mem::take(&mut cur)));
                sign = if ch == '-' { -1 } else { 1 };
            }
            '-' => sign = -1,
            '+' => {}
            _ => cur.push(ch),
        }
    }
    terms.push((sign, cur));
    let mut acc = PolyM::zero();
    for (sg, t) in terms {
        if t.is_empty() {
            return Err(Error::Parse(format!("dangling sign in `{s}`")));
        }
        let (coeff_str, pow) = match t.split_once('m') {
            None => (t.as_str(), 0usize),
            Some((c, rest)) => {
                let p = if rest.is_empty() {
                    1
                } else {
                    let r = rest
                        .strip_prefix('^')
                        .ok_or_else(|| Error::Parse(format!("bad power in `{t}`")))?;
                    r.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad power `{r}`")))?
                };
                (c.trim_end_matches('*'), p)
            }
        };
        let c = if coeff_str.is_empty() {
            rat_i(1)
        } else {
            parse_rat(coeff_str)?
        };
        let mut mono = vec![rat_i(0); pow + 1];
        mono[pow] = rat_i(sg as i64) * c;
        acc = acc.add(&PolyM::from_coeffs(mono));
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Rational functions of m.
// ---------------------------------------------------------------------------

/// Reduced fraction of polynomials in `m`; denominator monic and nonzero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFuncM {
    num: PolyM,
    den: PolyM,
}

impl RatFuncM {
    pub fn new(num: PolyM, den: PolyM) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut rf = RatFuncM { num, den };
        rf.reduce();
        Ok(rf)
    }

    pub fn from_poly(p: PolyM) -> Self {
        RatFuncM {
            num: p,
            den: PolyM::one(),
        }
    }

    pub fn from_rat(c: Rat) -> Self {
        RatFuncM::from_poly(PolyM::constant(c))
    }

    pub fn zero() -> Self {
        RatFuncM::from_rat(rat_i(0))
    }

    pub fn one() -> Self {
        RatFuncM::from_rat(rat_i(1))
    }

    pub fn num(&self) -> &PolyM {
        &self.num
    }

    pub fn den(&self) -> &PolyM {
        &self.den
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = PolyM::one();
            return;
        }
        let g = self.num.gcd(&self.den);
        if g.degree().unwrap_or(0) > 0 {
            self.num = self.num.div_rem(&g).0;
            self.den = self.den.div_rem(&g).0;
        }
        // make denominator monic, sign moves to the numerator
        let lead = self.den.coeffs.last().unwrap().clone();
        if !lead.is_one() {
            let inv = rat_i(1) / lead;
            self.den = self.den.scale(&inv);
            self.num = self.num.scale(&inv);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &RatFuncM) -> RatFuncM {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RatFuncM::new(num, den).unwrap()
    }

    pub fn neg(&self) -> RatFuncM {
        RatFuncM {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RatFuncM) -> RatFuncM {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFuncM) -> RatFuncM {
        RatFuncM::new(self.num.mul(&other.num), self.den.mul(&other.den)).unwrap()
    }

    pub fn div(&self, other: &RatFuncM) -> Result<RatFuncM> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RatFuncM::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    /// Substitute a rational value for `m`; errors when the denominator
    /// vanishes there.
    pub fn eval(&self, m: &Rat) -> Result<Rat> {
        let d = self.den.eval(m);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(m) / d)
    }
}

impl fmt::Debug for RatFuncM {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RatFuncM {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == PolyM::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// Parse `poly` or `(poly)/(poly)`.
pub fn parse_ratfunc(s: &str) -> Result<RatFuncM> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(stripped) = s.strip_prefix('(') {
        if let Some((num, rest)) = stripped.split_once(')') {
            let num = parse_polym(num)?;
            if rest.is_empty() {
                return RatFuncM::new(num, PolyM::one());
            }
            let den = rest
                .strip_prefix('/')
                .and_then(|r| r.strip_prefix('('))
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("bad rational function `{s}`")))?;
            return RatFuncM::new(num, parse_polym(den)?);
        }
    }
    Ok(RatFuncM::from_poly(parse_polym(&s)?))
}

// ---------------------------------------------------------------------------
// Polynomials in the scalar-curvature symbol kappa.
// ---------------------------------------------------------------------------

/// Polynomial in the scalar-curvature symbol with `RatFuncM` coefficients,
/// ascending by power of kappa, trailing zeros stripped.
#[derive(Clone, PartialEq)]
pub struct KappaPoly {
    coeffs: Vec<RatFuncM>,
}

impl KappaPoly {
    pub fn zero() -> Self {
        KappaPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        KappaPoly::constant(RatFuncM::one())
    }

    pub fn constant(c: RatFuncM) -> Self {
        let mut p = KappaPoly { coeffs: vec![c] };
        p.normalize();
        p
    }

    /// `c * kappa^k`.
    pub fn monomial(c: RatFuncM, k: usize) -> Self {
        let mut coeffs = vec![RatFuncM::zero(); k + 1];
        coeffs[k] = c;
        let mut p = KappaPoly { coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: usize) -> RatFuncM {
        self.coeffs.get(k).cloned().unwrap_or_else(RatFuncM::zero)
    }

    pub fn kappa_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &KappaPoly) -> KappaPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k).add(&other.coeff(k)));
        }
        let mut p = KappaPoly { coeffs: out };
        p.normalize();
        p
    }

    pub fn neg(&self) -> KappaPoly {
        KappaPoly {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn mul(&self, other: &KappaPoly) -> KappaPoly {
        if self.is_zero() || other.is_zero() {
            return KappaPoly::zero();
        }
        let mut out = vec![RatFuncM::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        let mut p = KappaPoly { coeffs: out };
        p.normalize();
        p
    }

    /// Substitute rational values for `m` and `kappa`.
    pub fn eval(&self, m: &Rat, kappa: &Rat) -> Result<Rat> {
        let mut acc = rat_i(0);
        for c in self.coeffs.iter().rev() {
            acc = acc * kappa + c.eval(m)?;
        }
        Ok(acc)
    }
}

impl fmt::Debug for KappaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for KappaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*k")?,
                _ => write!(f, "{c}*k^{k}")?,
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Sparse exact row reduction.
// ---------------------------------------------------------------------------

/// Sparse vector of exact rationals: entries sorted by column index,
/// no stored zeros.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Rat)>,
}

impl SparseVec {
    pub fn zero() -> Self {
        SparseVec {
            entries: Vec::new(),
        }
    }

    pub fn from_entries(mut entries: Vec<(usize, Rat)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut out: Vec<(usize, Rat)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            match out.last_mut() {
                Some((j, w)) if *j == i => *w += v,
                _ => out.push((i, v)),
            }
        }
        out.retain(|(_, v)| !v.is_zero());
        SparseVec { entries: out }
    }

    pub fn entries(&self) -> &[(usize, Rat)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, col: usize) -> Rat {
        match self.entries.binary_search_by_key(&col, |e| e.0) {
            Ok(k) => self.entries[k].1.clone(),
            Err(_) => rat_i(0),
        }
    }

    pub fn leading(&self) -> Option<(usize, &Rat)> {
        self.entries.first().map(|(i, v)| (*i, v))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn scale(&self, c: &Rat) -> SparseVec {
        if c.is_zero() {
            return SparseVec::zero();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    /// `self + c * other`, merged in one pass.
    pub fn axpy(&self, c: &Rat, other: &SparseVec) -> SparseVec {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() || b < other.entries.len() {
            let ia = self.entries.get(a).map(|e| e.0);
            let ib = other.entries.get(b).map(|e| e.0);
            match (ia, ib) {
                (Some(i), Some(j)) if i == j => {
                    let v = &self.entries[a].1 + c * &other.entries[b].1;
                    if !v.is_zero() {
                        out.push((i, v));
                    }
                    a += 1;
                    b += 1;
                }
                (Some(i), Some(j)) if i < j => {
                    out.push(self.entries[a].clone());
                    let _ = i;
                    a += 1;
                }
                (Some(_), Some(j)) => {
                    out.push((j, c * &other.entries[b].1));
                    b += 1;
                }
                (Some(_), None) => {
                    out.push(self.entries[a].clone());
                    a += 1;
                }
                (None, Some(j)) => {
                    out.push((j, c * &other.entries[b].1));
                    b += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        SparseVec { entries: out }
    }
}

/// Reduced row-echelon basis of a span of sparse rational vectors.
#[derive(Clone, Debug)]
pub struct Echelon {
    width: usize,
    /// Rows sorted by pivot column; each row is monic at its pivot and the
    /// pivot column is zero in every other row.
    rows: Vec<SparseVec>,
    /// Pivot column of each row.
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivots.binary_search(&col).is_ok()
    }
}

/// Reduced row echelon form of the given rows. Pivoting rule: leftmost
/// nonzero column, first row wins; deterministic for a fixed row order.
pub fn echelon(rows: &[SparseVec], width: usize) -> Result<Echelon> {
    let mut basis: Vec<SparseVec> = Vec::new();
    for row in rows {
        if let Some(mx) = row.max_index() {
            if mx >= width {
                return Err(Error::WidthMismatch {
                    expected: width,
                    got: mx + 1,
                });
            }
        }
        let red = reduce_row(&basis, row.clone());
        if let Some((pivot, lead)) = red.leading().map(|(i, v)| (i, v.clone())) {
            let monic = red.scale(&(rat_i(1) / lead));
            // keep the basis fully reduced: clear this pivot from old rows
            for r in basis.iter_mut() {
                let c = r.get(pivot);
                if !c.is_zero() {
                    *r = r.axpy(&-c, &monic);
                }
            }
            basis.push(monic);
            basis.sort_by_key(|r| r.leading().map(|(i, _)| i).unwrap_or(usize::MAX));
        }
    }
    let pivots: Vec<usize> = basis
        .iter()
        .map(|r| r.leading().expect("nonzero basis row").0)
        .collect();
    Ok(Echelon {
        width,
        rows: basis,
        pivots,
    })
}

fn reduce_row(basis: &[SparseVec], mut v: SparseVec) -> SparseVec {
    for b in basis {
        let (p, _) = b.leading().expect("nonzero basis row");
        let c = v.get(p);
        if !c.is_zero() {
            v = v.axpy(&-c, b);
        }
    }
    v
}

/// Residual of `v` against the echelon basis: zero at all pivot columns,
/// `v - residual` lies in the row span.
pub fn reduce_against(basis: &Echelon, v: &SparseVec) -> Result<SparseVec> {
    if let Some(mx) = v.max_index() {
        if mx >= basis.width {
            return Err(Error::WidthMismatch {
                expected: basis.width,
                got: mx + 1,
            });
        }
    }
    Ok(reduce_row(&basis.rows, v.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sv(entries: &[(usize, i64)]) -> SparseVec {
        SparseVec::from_entries(entries.iter().map(|&(i, v)| (i, rat_i(v))).collect())
    }

    #[test]
    fn rat_arith_examples() {
        assert_eq!(rat(1, 12) + rat(-1, 12), rat_i(0));
        assert_eq!(rat(1, 6) * rat(1, 2), rat(1, 12));
        assert_eq!(checked_div(&rat(5, 432), &rat(1, 432)).unwrap(), rat_i(5));
        assert!(matches!(
            checked_div(&rat_i(1), &rat_i(0)),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn echelon_identity_3x3() {
        let rows = vec![sv(&[(0, 1)]), sv(&[(1, 1)]), sv(&[(2, 1)])];
        let e = echelon(&rows, 3).unwrap();
        assert_eq!(e.rank(), 3);
        assert_eq!(e.pivots(), &[0, 1, 2]);
    }

    #[test]
    fn echelon_dependent_rows() {
        // third row = first - second
        let rows = vec![
            sv(&[(0, 1), (1, 1)]),
            sv(&[(1, 1), (2, 1)]),
            sv(&[(0, 1), (2, -1)]),
        ];
        let e = echelon(&rows, 3).unwrap();
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn echelon_idempotent() {
        let rows = vec![
            sv(&[(0, 2), (3, 4)]),
            sv(&[(1, 1), (3, 1)]),
            sv(&[(0, 1), (1, 1), (3, 3)]),
        ];
        let e = echelon(&rows, 5).unwrap();
        let e2 = echelon(e.rows(), 5).unwrap();
        assert_eq!(e.rows(), e2.rows());
    }

    #[test]
    fn reduce_in_span_gives_zero() {
        let rows = vec![sv(&[(0, 1), (1, 2)]), sv(&[(1, 1), (2, 1)])];
        let e = echelon(&rows, 3).unwrap();
        let v = sv(&[(0, 3), (1, 7), (2, 1)]); // 3*r0 + r1
        let r = reduce_against(&e, &v).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn reduce_against_empty_basis_is_identity() {
        let e = echelon(&[], 4).unwrap();
        let v = sv(&[(1, 5), (3, -2)]);
        assert_eq!(reduce_against(&e, &v).unwrap(), v);
    }

    #[test]
    fn reduce_width_mismatch_errors() {
        let e = echelon(&[sv(&[(0, 1)])], 2).unwrap();
        assert!(reduce_against(&e, &sv(&[(5, 1)])).is_err());
    }

    /// Degree-1 coordinates ordered [theta, dumbbell]: the single relation
    /// 2*theta + dumbbell leaves a residual on the dumbbell axis.
    #[test]
    fn reduce_theta_against_degree1_relation() {
        let relation = sv(&[(0, 2), (1, 1)]);
        let e = echelon(&[relation], 2).unwrap();
        assert_eq!(e.rank(), 1);
        let r = reduce_against(&e, &sv(&[(0, 1)])).unwrap();
        assert_eq!(r, SparseVec::from_entries(vec![(1, rat(-1, 2))]));
    }

    #[test]
    fn polym_basics() {
        let m = PolyM::var();
        let p = m.mul(&m).sub(&m); // m^2 - m
        assert_eq!(p.eval(&rat_i(4)), rat_i(12));
        assert_eq!(p.degree(), Some(2));
        assert_eq!(PolyM::zero().degree(), None);
        assert_eq!(format!("{p}"), "m^2-m");
        assert_eq!(parse_polym("m^2 - m").unwrap(), p);
        assert_eq!(parse_polym("-3 + 2*m").unwrap().eval(&rat_i(5)), rat_i(7));
    }

    #[test]
    fn ratfunc_normalization() {
        // (2m^2-2m)/(2m) reduces to m-1 with monic denominator
        let num = parse_polym("2*m^2-2*m").unwrap();
        let den = parse_polym("2*m").unwrap();
        let rf = RatFuncM::new(num, den).unwrap();
        assert_eq!(rf.num(), &parse_polym("m-1").unwrap());
        assert_eq!(rf.den(), &PolyM::one());
        let back = parse_ratfunc("(m^2-18*m+40)/(60*m^2)").unwrap();
        assert_eq!(back.eval(&rat_i(2)).unwrap(), rat(8, 240));
    }

    #[test]
    fn kappa_poly_eval() {
        let p = KappaPoly::monomial(parse_ratfunc("(1)/(m)").unwrap(), 2);
        assert_eq!(p.eval(&rat_i(4), &rat_i(3)).unwrap(), rat(9, 4));
        assert_eq!(p.kappa_degree(), Some(2));
    }

    /// Independent fraction-free rank oracle (Bareiss-style over BigInt via
    /// rationals kept integral) for random sparse systems.
    fn rank_oracle(rows: &[SparseVec], width: usize) -> usize {
        let mut mat: Vec<Vec<Rat>> = rows
            .iter()
            .map(|r| (0..width).map(|c| r.get(c)).collect())
            .collect();
        let mut rank = 0;
        for col in 0..width {
            let piv = (rank..mat.len()).find(|&r| !mat[r][col].is_zero());
            let Some(piv) = piv else { continue };
            mat.swap(rank, piv);
            for r in 0..mat.len() {
                if r != rank && !mat[r][col].is_zero() {
                    let f = &mat[r][col] / &mat[rank][col];
                    for c in 0..width {
                        let t = &f * &mat[rank][c];
                        mat[r][c] -= t;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    proptest! {
        #[test]
        fn field_axioms(an in -50i64..50, ad in 1i64..20,
                        bn in -50i64..50, bd in 1i64..20,
                        cn in -50i64..50, cd in 1i64..20) {
            let a = rat(an, ad); let b = rat(bn, bd); let c = rat(cn, cd);
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn echelon_rank_matches_oracle(seed in 0u64..300) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let width = rng.gen_range(1..8usize);
            let nrows = rng.gen_range(0..10usize);
            let rows: Vec<SparseVec> = (0..nrows).map(|_| {
                let k = rng.gen_range(0..=width);
                SparseVec::from_entries((0..k).map(|_| {
                    (rng.gen_range(0..width), rat_i(rng.gen_range(-3..4)))
                }).collect())
            }).collect();
            let e = echelon(&rows, width).unwrap();
            prop_assert_eq!(e.rank(), rank_oracle(&rows, width));
        }

        #[test]
        fn ratfunc_mul_inverse(pn in 1i64..6, qn in 1i64..6) {
            let p = PolyM::from_coeffs(vec![rat_i(pn), rat_i(1)]);
            let q = PolyM::from_coeffs(vec![rat_i(-qn), rat_i(2)]);
            let a = RatFuncM::new(p.clone(), q.clone()).unwrap();
            let b = RatFuncM::new(q, p).unwrap();
            prop_assert_eq!(a.mul(&b), RatFuncM::one());
        }

        #[test]
        fn polym_eval_is_homomorphism(m in -6i64..7,
                                      a in -5i64..6, b in -5i64..6,
                                      c in -5i64..6, d in -5i64..6) {
            let p = PolyM::from_coeffs(vec![rat_i(a), rat_i(b)]);
            let q = PolyM::from_coeffs(vec![rat_i(c), rat_i(d)]);
            let mv = rat_i(m);
            prop_assert_eq!(p.mul(&q).eval(&mv), p.eval(&mv) * q.eval(&mv));
            prop_assert_eq!(p.add(&q).eval(&mv), p.eval(&mv) + q.eval(&mv));
        }
    }
}
