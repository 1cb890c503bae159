//! The graded algebra of colored trivalent graphs: sparse formal linear
//! combinations over an exact coefficient ring, the disjoint-union product,
//! truncated exponential and logarithm, generator counting for free graded
//! algebras and the expansion of tetravalent vertices.

use std::collections::BTreeMap;
use std::fmt;

use crate::exactalg::{parse_rat, parse_ratfunc, rat, rat_i, KappaPoly, PolyM, Rat, RatFuncM};
use crate::graphs::{ColoredGraph, ExtGraph};
use crate::{Error, Result};

/// Exact coefficient rings usable in a [`GraphPoly`]. All three contain the
/// rationals, which the series operations rely on.
pub trait Coeff: Clone + PartialEq + fmt::Display {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn from_rat(r: Rat) -> Self;
    fn one() -> Self {
        Self::from_rat(rat_i(1))
    }
}

impl Coeff for Rat {
    fn zero() -> Self {
        rat_i(0)
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn from_rat(r: Rat) -> Self {
        r
    }
}

impl Coeff for PolyM {
    fn zero() -> Self {
        PolyM::zero()
    }
    fn is_zero(&self) -> bool {
        PolyM::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        PolyM::add(self, other)
    }
    fn neg(&self) -> Self {
        PolyM::neg(self)
    }
    fn mul(&self, other: &Self) -> Self {
        PolyM::mul(self, other)
    }
    fn from_rat(r: Rat) -> Self {
        PolyM::constant(r)
    }
}

impl Coeff for KappaPoly {
    fn zero() -> Self {
        KappaPoly::zero()
    }
    fn is_zero(&self) -> bool {
        KappaPoly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        KappaPoly::add(self, other)
    }
    fn neg(&self) -> Self {
        KappaPoly::neg(self)
    }
    fn mul(&self, other: &Self) -> Self {
        KappaPoly::mul(self, other)
    }
    fn from_rat(r: Rat) -> Self {
        KappaPoly::constant(RatFuncM::from_rat(r))
    }
}

/// Sparse formal linear combination of canonical colored graphs. No zero
/// coefficients are stored; an optional `max_degree` truncates products.
#[derive(Clone)]
pub struct GraphPoly<C: Coeff = Rat> {
    terms: BTreeMap<ColoredGraph, C>,
    max_degree: Option<usize>,
}

/// Equality is term-by-term; the truncation bound is a computational
/// setting, not part of the value.
impl<C: Coeff> PartialEq for GraphPoly<C> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<C: Coeff> GraphPoly<C> {
    pub fn zero() -> Self {
        GraphPoly {
            terms: BTreeMap::new(),
            max_degree: None,
        }
    }

    /// The empty graph with coefficient one.
    pub fn one() -> Self {
        GraphPoly::monomial(ColoredGraph::empty(), C::one())
    }

    pub fn monomial(g: ColoredGraph, c: C) -> Self {
        let mut p = GraphPoly::zero();
        p.add_term(g, c);
        p
    }

    pub fn with_max_degree(mut self, d: usize) -> Self {
        self.max_degree = Some(d);
        self.terms.retain(|g, _| g.degree() <= d);
        self
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.max_degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ColoredGraph, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, g: &ColoredGraph) -> C {
        self.terms.get(g).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, g: ColoredGraph, c: C) {
        if c.is_zero() {
            return;
        }
        if let Some(d) = self.max_degree {
            if g.degree() > d {
                return;
            }
        }
        match self.terms.get_mut(&g) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.terms.remove(&g);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(g, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.max_degree = merge_degree(self.max_degree, other.max_degree);
        for (g, c) in other.terms() {
            out.add_term(g.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = GraphPoly::zero();
        out.max_degree = self.max_degree;
        for (g, c) in self.terms() {
            out.add_term(g.clone(), c.neg());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = GraphPoly::zero();
        out.max_degree = self.max_degree;
        for (g, a) in self.terms() {
            out.add_term(g.clone(), a.mul(c));
        }
        out
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        self.scale(&C::from_rat(r.clone()))
    }

    /// Bilinear extension of the disjoint-union product; degrees add and
    /// terms above `max_degree` are dropped when a bound is set.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = GraphPoly::zero();
        out.max_degree = merge_degree(self.max_degree, other.max_degree);
        for (g1, c1) in self.terms() {
            for (g2, c2) in other.terms() {
                if let Some(d) = out.max_degree {
                    if g1.degree() + g2.degree() > d {
                        continue;
                    }
                }
                out.add_term(g1.disjoint_union(g2), c1.mul(c2));
            }
        }
        out
    }

    /// Homogeneous part of degree `n`.
    pub fn grade(&self, n: usize) -> Self {
        let mut out = GraphPoly::zero();
        for (g, c) in self.terms() {
            if g.degree() == n {
                out.add_term(g.clone(), c.clone());
            }
        }
        out
    }

    /// Largest degree present.
    pub fn top_degree(&self) -> Option<usize> {
        self.terms.keys().map(|g| g.degree()).max()
    }

    /// True iff all terms have degree `n`.
    pub fn is_homogeneous(&self, n: usize) -> bool {
        self.terms.keys().all(|g| g.degree() == n)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> GraphPoly<D> {
        let mut out = GraphPoly::zero();
        out.max_degree = self.max_degree;
        for (g, c) in self.terms() {
            out.add_term(g.clone(), f(c));
        }
        out
    }
}

fn merge_degree(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl<C: Coeff> fmt::Display for GraphPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return writeln!(f, "0 * c=[];r=[]");
        }
        for (g, c) in self.terms() {
            writeln!(f, "{} * {}", c, g.to_text())?;
        }
        Ok(())
    }
}

impl<C: Coeff> fmt::Debug for GraphPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Truncated formal exponential: requires vanishing degree-0 part.
pub fn exp_trunc<C: Coeff>(p: &GraphPoly<C>, max_degree: usize) -> Result<GraphPoly<C>> {
    if !p.grade(0).is_zero() {
        return Err(Error::Validation(
            "exp requires a vanishing degree-0 part".into(),
        ));
    }
    let p = p.clone().with_max_degree(max_degree);
    let mut out = GraphPoly::one().with_max_degree(max_degree);
    let mut power = GraphPoly::one().with_max_degree(max_degree);
    let mut factorial = rat_i(1);
    for k in 1..=max_degree {
        power = power.mul(&p);
        if power.is_zero() {
            break;
        }
        factorial *= rat_i(k as i64);
        out = out.add(&power.scale_rat(&(rat_i(1) / &factorial)));
    }
    Ok(out)
}

/// Truncated formal logarithm: requires constant term one.
pub fn log_trunc<C: Coeff>(p: &GraphPoly<C>, max_degree: usize) -> Result<GraphPoly<C>> {
    if p.grade(0) != GraphPoly::one() {
        return Err(Error::Validation("log requires constant term one".into()));
    }
    let q = p
        .sub(&GraphPoly::one())
        .with_max_degree(max_degree);
    let mut out = GraphPoly::zero().with_max_degree(max_degree);
    let mut power = GraphPoly::one().with_max_degree(max_degree);
    for k in 1..=max_degree {
        power = power.mul(&q);
        if power.is_zero() {
            break;
        }
        let sign = if k % 2 == 1 { 1 } else { -1 };
        out = out.add(&power.scale_rat(&rat(sign, k as i64)));
    }
    Ok(out)
}

/// Solve the free-commutative-algebra generator counts `m_d` from the
/// Hilbert dimensions: `sum_{n>0} (sum_{d|n} d m_d) t^n = t (ln D)'(t) * t`
/// where `D(t) = sum dims[n] t^n`. Errors when the solution is not a
/// sequence of nonnegative integers.
pub fn generator_counts(dims: &[u64]) -> Result<Vec<u64>> {
    if dims.is_empty() || dims[0] != 1 {
        return Err(Error::Validation("dims[0] must be 1".into()));
    }
    let nmax = dims.len() - 1;
    let d: Vec<Rat> = dims.iter().map(|&x| rat_i(x as i64)).collect();
    // a_n = coefficient of t^n in t D'/D, via a * D = t D'
    let mut a = vec![rat_i(0); nmax + 1];
    for n in 1..=nmax {
        let mut rhs = rat_i(n as i64) * &d[n];
        for i in 1..n {
            let t = &a[i] * &d[n - i];
            rhs -= t;
        }
        a[n] = rhs; // d[0] = 1
    }
    let mut m = vec![rat_i(0); nmax + 1];
    for n in 1..=nmax {
        let mut rest = a[n].clone();
        for dd in 1..n {
            if n % dd == 0 {
                let t = rat_i(dd as i64) * &m[dd];
                rest -= t;
            }
        }
        m[n] = rest / rat_i(n as i64);
        if !m[n].is_integer() || m[n] < rat_i(0) {
            return Err(Error::NotFreeHilbert(format!(
                "generator count at degree {n} is {}",
                m[n]
            )));
        }
    }
    Ok(m[1..]
        .iter()
        .map(|x| {
            use num_traits::ToPrimitive;
            x.to_integer().to_u64().expect("small count")
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Extended polynomials and the tetravalent expansion.
// ---------------------------------------------------------------------------

/// Formal combination of normalized extended graphs; orientation signs are
/// folded into the coefficients so a graph and its orientation flip never
/// both appear.
#[derive(Clone, PartialEq, Debug)]
pub struct ExtPoly {
    terms: BTreeMap<ExtGraph, Rat>,
}

impl ExtPoly {
    pub fn zero() -> Self {
        ExtPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(g: ExtGraph, c: Rat) -> Self {
        let mut p = ExtPoly::zero();
        p.add_term(g, c);
        p
    }

    pub fn add_term(&mut self, g: ExtGraph, c: Rat) {
        if num_traits::Zero::is_zero(&c) {
            return;
        }
        let (canon, sign) = g.canonicalize();
        let c = if sign < 0 { -c } else { c };
        let new = match self.terms.get(&canon) {
            Some(old) => old + &c,
            None => c,
        };
        if num_traits::Zero::is_zero(&new) {
            self.terms.remove(&canon);
        } else {
            self.terms.insert(canon, new);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExtGraph, &Rat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Expand every tetravalent vertex into a pair of trivalent vertices joined
/// by a new red edge: a vertex with normalized quadruple `(f1,f2,f3,f4)`
/// becomes `(1/6) * [f1 f4 | f2 f3] - (1/6) * [f1 f3 | f2 f4]`, applied
/// multiplicatively over all tetravalent vertices; the result is an ordinary
/// graph polynomial in canonical form.
pub fn expand_tetravalent(e: &ExtPoly) -> GraphPoly<Rat> {
    let mut out = GraphPoly::zero();
    for (g, coeff) in e.terms() {
        expand_one(g, coeff, &mut out);
    }
    out
}

fn expand_one(g: &ExtGraph, coeff: &Rat, out: &mut GraphPoly<Rat>) {
    let tet = g.tetra_count();
    if tet == 0 {
        let colored = g.to_colored().expect("no tetravalent vertices left");
        out.add_term(colored, coeff.clone());
        return;
    }
    let tri0 = g.tri_count();
    // each tetravalent vertex t becomes trivalent vertices (tri0 + 2t) and
    // (tri0 + 2t + 1); choice 0 pairs (f1,f4)|(f2,f3), choice 1 pairs
    // (f1,f3)|(f2,f4); flags renumber accordingly
    let total_tri = tri0 + 2 * tet;
    for mask in 0..(1u32 << tet) {
        let mut sign = rat(1, 1);
        let mut tri_red: Vec<u32> = g.tri_red().to_vec();
        tri_red.resize(total_tri, 0);
        // flag mapping old -> new
        let mut flag_map = vec![u32::MAX; g.flag_count()];
        for f in 0..2 * tri0 as u32 {
            flag_map[f as usize] = f;
        }
        for t in 0..tet {
            let q = g.quads()[t];
            let choice = (mask >> t) & 1;
            sign *= rat(1, 6);
            if choice == 1 {
                sign = -sign;
            }
            let vp = (tri0 + 2 * t) as u32;
            let vm = vp + 1;
            tri_red[vp as usize] = vm;
            tri_red[vm as usize] = vp;
            // destination flags: vertex v owns flags 2v, 2v+1
            let (plus_pair, minus_pair) = if choice == 0 {
                ([q[0], q[3]], [q[1], q[2]])
            } else {
                ([q[0], q[2]], [q[1], q[3]])
            };
            flag_map[plus_pair[0] as usize] = 2 * vp;
            flag_map[plus_pair[1] as usize] = 2 * vp + 1;
            flag_map[minus_pair[0] as usize] = 2 * vm;
            flag_map[minus_pair[1] as usize] = 2 * vm + 1;
        }
        let mut black = vec![u32::MAX; 2 * total_tri];
        for f in 0..g.flag_count() as u32 {
            let part = g.black()[f as usize];
            black[flag_map[f as usize] as usize] = flag_map[part as usize];
        }
        let fv = crate::graphs::FlagView {
            at: (0..2 * total_tri as u32).map(|f| f / 2).collect(),
            theta: black,
            red: tri_red,
        };
        out.add_term(fv.to_graph(), coeff * &sign);
    }
}

// ---------------------------------------------------------------------------
// Text and JSON formats.
// ---------------------------------------------------------------------------

/// Split `<coefficient> * <graph>` at the graph marker; the coefficient may
/// itself contain `*` in polynomial notation.
fn split_poly_line(line: &str) -> Result<(&str, &str)> {
    let at = line
        .find("c=")
        .ok_or_else(|| Error::Parse(format!("expected `coeff * c=..` in `{line}`")))?;
    let coeff = line[..at]
        .trim()
        .strip_suffix('*')
        .ok_or_else(|| Error::Parse(format!("expected `coeff * c=..` in `{line}`")))?;
    Ok((coeff, &line[at..]))
}

fn at_line(lineno: usize, e: Error) -> Error {
    match e {
        Error::Parse(msg) => Error::Parse(format!("line {lineno}: {msg}")),
        other => other,
    }
}

/// Parse the graph polynomial text format: one `<coefficient> * <graph>`
/// per line, rational coefficients.
pub fn parse_poly_rat(text: &str) -> Result<GraphPoly<Rat>> {
    let mut out = GraphPoly::zero();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (coeff, graph) = split_poly_line(line).map_err(|e| at_line(k + 1, e))?;
        out.add_term(
            ColoredGraph::parse(graph).map_err(|e| at_line(k + 1, e))?,
            parse_rat(coeff).map_err(|e| at_line(k + 1, e))?,
        );
    }
    Ok(out)
}

/// Parse with `RatFuncM` coefficients written as `p/q` rationals or
/// `(poly)/(poly)` in `m`.
pub fn parse_poly_ratfunc(text: &str) -> Result<GraphPoly<KappaPoly>> {
    let mut out = GraphPoly::zero();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (coeff, graph) = split_poly_line(line).map_err(|e| at_line(k + 1, e))?;
        let rf = parse_ratfunc(coeff).map_err(|e| at_line(k + 1, e))?;
        out.add_term(
            ColoredGraph::parse(graph).map_err(|e| at_line(k + 1, e))?,
            KappaPoly::constant(rf),
        );
    }
    Ok(out)
}

/// JSON array of `{coeff, graph}` records with string fields.
pub fn poly_to_json<C: Coeff>(p: &GraphPoly<C>) -> serde_json::Value {
    let arr: Vec<serde_json::Value> = p
        .terms()
        .map(|(g, c)| {
            serde_json::json!({
                "coeff": c.to_string(),
                "graph": g.to_text(),
            })
        })
        .collect();
    serde_json::Value::Array(arr)
}

pub fn poly_from_json(v: &serde_json::Value) -> Result<GraphPoly<Rat>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("expected JSON array".into()))?;
    let mut out = GraphPoly::zero();
    for item in arr {
        let coeff = item
            .get("coeff")
            .and_then(|c| c.as_str())
            .ok_or_else(|| Error::Parse("missing coeff".into()))?;
        let graph = item
            .get("graph")
            .and_then(|g| g.as_str())
            .ok_or_else(|| Error::Parse("missing graph".into()))?;
        out.add_term(ColoredGraph::parse(graph)?, parse_rat(coeff)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{dumbbell, enumerate_degree, square_crossed, theta};
    use rand::{Rng, SeedableRng};

    fn gp(g: ColoredGraph) -> GraphPoly<Rat> {
        GraphPoly::monomial(g, rat_i(1))
    }

    #[test]
    fn unit_element() {
        let d = gp(dumbbell());
        assert_eq!(d.mul(&GraphPoly::one()), d);
    }

    #[test]
    fn binomial_square() {
        let t = theta();
        let d = dumbbell();
        let p = gp(t.clone()).add(&gp(d.clone()));
        let sq = p.mul(&p);
        assert_eq!(sq.coeff(&t.disjoint_union(&t)), rat_i(1));
        assert_eq!(sq.coeff(&t.disjoint_union(&d)), rat_i(2));
        assert_eq!(sq.coeff(&d.disjoint_union(&d)), rat_i(1));
        assert_eq!(sq.len(), 3);
    }

    #[test]
    fn grading() {
        let p = gp(theta()).add(&gp(square_crossed()));
        assert_eq!(p.grade(1), gp(theta()));
        assert_eq!(GraphPoly::<Rat>::one().grade(0), GraphPoly::one());
        // product grades by summed degree
        let q = p.mul(&p);
        for (g, _) in q.terms() {
            assert!(g.degree() >= 2 && g.degree() <= 4);
        }
        assert_eq!(q.grade(2).len(), 1);
    }

    #[test]
    fn exp_log_round_trip() {
        let p = gp(theta())
            .scale_rat(&rat(1, 3))
            .add(&gp(square_crossed()).scale_rat(&rat(-2, 5)));
        let e = exp_trunc(&p, 3).unwrap();
        let back = log_trunc(&e, 3).unwrap();
        assert_eq!(back, p.clone().with_max_degree(3));
        assert!(exp_trunc(&GraphPoly::<Rat>::one(), 2).is_err());
        assert!(log_trunc(&gp(theta()), 2).is_err());
    }

    #[test]
    fn exp_of_zero_and_small() {
        assert_eq!(exp_trunc(&GraphPoly::<Rat>::zero(), 3).unwrap(), GraphPoly::one());
        let a = rat(2, 7);
        let t = gp(theta()).scale_rat(&a);
        let e = exp_trunc(&t, 2).unwrap();
        assert_eq!(e.coeff(&ColoredGraph::empty()), rat_i(1));
        assert_eq!(e.coeff(&theta()), a.clone());
        assert_eq!(
            e.coeff(&theta().disjoint_union(&theta())),
            &a * &a / rat_i(2)
        );
    }

    #[test]
    fn generator_counts_examples() {
        assert_eq!(generator_counts(&[1, 1, 3, 8, 26]).unwrap(), vec![1, 2, 5, 15]);
        assert_eq!(generator_counts(&[1, 1, 1, 1]).unwrap(), vec![1, 0, 0]);
        assert_eq!(
            generator_counts(&[1, 1, 3, 8, 26, 90]).unwrap(),
            vec![1, 2, 5, 15, 54]
        );
        // dims of a non-free algebra fail
        assert!(generator_counts(&[1, 2, 1]).is_err());
    }

    #[test]
    fn mul_agrees_with_quadratic_convolution() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let pool: Vec<ColoredGraph> = (1..=2usize)
            .flat_map(|n| enumerate_degree(n, false))
            .collect();
        for _ in 0..20 {
            let mut p = GraphPoly::zero();
            let mut q = GraphPoly::zero();
            for _ in 0..rng.gen_range(0..4) {
                p.add_term(
                    pool[rng.gen_range(0..pool.len())].clone(),
                    rat_i(rng.gen_range(-3..4)),
                );
            }
            for _ in 0..rng.gen_range(0..4) {
                q.add_term(
                    pool[rng.gen_range(0..pool.len())].clone(),
                    rat_i(rng.gen_range(-3..4)),
                );
            }
            // oracle: plain double loop without sparsity shortcuts
            let mut oracle = GraphPoly::zero();
            for (g1, c1) in p.terms() {
                for (g2, c2) in q.terms() {
                    oracle.add_term(g1.disjoint_union(g2), c1 * c2);
                }
            }
            assert_eq!(p.mul(&q), oracle);
        }
    }

    /// Unique factorization into connected classes for degrees <= 3.
    #[test]
    fn monoid_factors_into_connected_classes() {
        for n in 1..=3usize {
            for g in enumerate_degree(n, false) {
                let comps = g.components();
                assert!(comps.iter().all(|c| c.stats().components == 1));
                let prod = comps
                    .iter()
                    .fold(ColoredGraph::empty(), |acc, c| acc.disjoint_union(c));
                assert_eq!(prod, g, "component factorization reassembles {g}");
            }
        }
    }

    #[test]
    fn expand_no_tetravalent_is_identity() {
        // theta as an extended graph: two trivalent vertices, red-matched,
        // black edges 0-2 and 1-3
        let (e, sign) = ExtGraph::build(vec![1, 0], vec![2, 3, 0, 1], vec![]).unwrap();
        assert_eq!(sign, 1);
        let p = expand_tetravalent(&ExtPoly::monomial(e, rat(3, 4)));
        assert_eq!(p.coeff(&theta()), rat(3, 4));
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn expand_is_klein_representative_independent() {
        // one tetravalent vertex closed on itself by black edges f1-f3, f2-f4
        for quad in [[0u32, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]] {
            let (e, sign) = ExtGraph::build(vec![], vec![2, 3, 0, 1], vec![quad]).unwrap();
            assert_eq!(sign, 1);
            let p = expand_tetravalent(&ExtPoly::monomial(e, rat_i(1)));
            assert_eq!(p.coeff(&theta()), rat(1, 6));
            assert_eq!(p.coeff(&dumbbell()), rat(-1, 6));
        }
        // orientation flip carries a sign instead: the flipped decoration
        // stands for minus the standard one
        let (e, sign) = ExtGraph::build(vec![], vec![2, 3, 0, 1], vec![[1, 0, 2, 3]]).unwrap();
        assert_eq!(sign, -1);
        let p = expand_tetravalent(&ExtPoly::monomial(e, rat_i(sign as i64)));
        assert_eq!(p.coeff(&theta()), rat(-1, 6));
        assert_eq!(p.coeff(&dumbbell()), rat(1, 6));
    }

    #[test]
    fn poly_text_and_json_round_trip() {
        let text = "1/12 * c=[[0],[1]];r=[[0,1]]\n-1/12 * c=[[0,1]];r=[[0,1]]\n";
        let p = parse_poly_rat(text).unwrap();
        assert_eq!(p.coeff(&dumbbell()), rat(1, 12));
        assert_eq!(p.coeff(&theta()), rat(-1, 12));
        let js = poly_to_json(&p);
        let back = poly_from_json(&js).unwrap();
        assert_eq!(back, p);
        let printed = p.to_string();
        assert_eq!(parse_poly_rat(&printed).unwrap(), p);
    }

    #[test]
    fn poly_text_with_rational_function_coefficients() {
        let text = "(2*m^2-3)/ (m) * c=[[0,1]];r=[[0,1]]\n1/2 * c=[[0],[1]];r=[[0,1]]\n";
        let p = parse_poly_ratfunc(text).unwrap();
        let c = p.coeff(&theta());
        assert_eq!(
            c.coeff(0).eval(&rat_i(3)).unwrap(),
            rat(15, 3) // (18 - 3) / 3
        );
        assert_eq!(p.coeff(&dumbbell()).coeff(0).eval(&rat_i(7)).unwrap(), rat(1, 2));
    }
}
