//! Numeric evaluation of graphs on curvature models, the curvature
//! derivation in formal dimension `m`, constant-curvature values, the
//! Pfaffian and moment polynomial families with their definitional oracles,
//! the cubic polynomial of the standard curvature term, Einstein reduction
//! and the identity verifiers built from all of the above.

use std::collections::BTreeMap;

use crate::algebra::{ExtPoly, GraphPoly};
use crate::curvature::{
    curv_norm_sq, is_einstein, phi_plus, ricci_traceless, scalar, sym_norm_sq, CurvModel, Kind,
};
use crate::exactalg::{rat, rat_i, rat_to_f64, KappaPoly, PolyM, Rat, RatFuncM};
use crate::graphs::{
    contract_red_edge, enumerate_degree, reattach_configs, ColoredGraph, FlagView,
};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Graph evaluation.
// ---------------------------------------------------------------------------

/// Evaluation strategy for the iterated orthonormal-basis sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Loop over all index assignments; allowed while `m^edges <= 10^7`.
    Naive,
    /// Per-red-edge factor tensors contracted pairwise along a greedy
    /// smallest-intermediate order.
    Scheduled,
}

/// Black edge endpoints of each vertex: `vertex_edges[v] = (e1, e2)` lists
/// the black edges carrying the two black flags of `v`.
fn vertex_edges(g: &ColoredGraph) -> (usize, Vec<(usize, usize)>) {
    let nv = g.vertex_count();
    let mut edges_of = vec![(usize::MAX, usize::MAX); nv];
    let mut edge_count = 0usize;
    for cy in g.black_cycles() {
        let l = cy.len();
        if l == 1 {
            let v = cy[0] as usize;
            edges_of[v] = (edge_count, edge_count);
            edge_count += 1;
        } else {
            let base = edge_count;
            for k in 0..l {
                // edge k joins cy[k] and cy[k+1]
                let a = cy[k] as usize;
                let b = cy[(k + 1) % l] as usize;
                let e = base + k;
                if edges_of[a].0 == usize::MAX {
                    edges_of[a].0 = e;
                } else {
                    edges_of[a].1 = e;
                }
                if edges_of[b].0 == usize::MAX {
                    edges_of[b].0 = e;
                } else {
                    edges_of[b].1 = e;
                }
            }
            edge_count += l;
        }
    }
    (edge_count, edges_of)
}

/// Pairwise contraction plan for the scheduled strategy.
#[derive(Clone, Debug)]
pub struct EvalPlan {
    /// Tensor-merge steps as indices into the shrinking factor list.
    pub order: Vec<(usize, usize)>,
    /// Estimated scalar multiplications.
    pub estimated_cost: u64,
}

#[derive(Clone)]
struct SmallTensor {
    indices: Vec<usize>,
    dims: usize,
    data: Vec<f64>,
}

impl SmallTensor {
    fn rank(&self) -> usize {
        self.indices.len()
    }
}

fn contract_pair(a: &SmallTensor, b: &SmallTensor, m: usize) -> SmallTensor {
    let shared: Vec<usize> = a
        .indices
        .iter()
        .copied()
        .filter(|i| b.indices.contains(i))
        .collect();
    let mut out_idx: Vec<usize> = a
        .indices
        .iter()
        .chain(b.indices.iter())
        .copied()
        .filter(|i| !shared.contains(i))
        .collect();
    out_idx.sort_unstable();
    out_idx.dedup();
    let or = out_idx.len();
    let sr = shared.len();
    let mut data = vec![0.0; m.pow(or as u32)];
    let mut assign: Vec<usize> = vec![0; or + sr];
    let lookup = |t: &SmallTensor, full: &[usize], out_idx: &[usize], shared: &[usize]| -> usize {
        let mut pos = 0usize;
        for &ix in &t.indices {
            let v = if let Some(p) = out_idx.iter().position(|&o| o == ix) {
                full[p]
            } else {
                let p = shared.iter().position(|&s| s == ix).expect("index located");
                full[out_idx.len() + p]
            };
            pos = pos * t.dims + v;
        }
        pos
    };
    let total = m.pow((or + sr) as u32);
    for flat in 0..total {
        let mut rest = flat;
        for slot in (0..or + sr).rev() {
            assign[slot] = rest % m;
            rest /= m;
        }
        let va = a.data[lookup(a, &assign, &out_idx, &shared)];
        let vb = b.data[lookup(b, &assign, &out_idx, &shared)];
        let mut opos = 0usize;
        for p in 0..or {
            opos = opos * m + assign[p];
        }
        data[opos] += va * vb;
    }
    SmallTensor {
        indices: out_idx,
        dims: m,
        data,
    }
}

fn red_factor(sec: &CurvModel, edges: [usize; 4]) -> SmallTensor {
    let m = sec.m;
    let mut distinct: Vec<usize> = edges.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let r = distinct.len();
    let mut data = vec![0.0; m.pow(r as u32)];
    let mut assign = vec![0usize; r];
    for flat in 0..m.pow(r as u32) {
        let mut rest = flat;
        for slot in (0..r).rev() {
            assign[slot] = rest % m;
            rest /= m;
        }
        let val = |e: usize| assign[distinct.iter().position(|&d| d == e).unwrap()];
        data[flat] = sec.get(val(edges[0]), val(edges[1]), val(edges[2]), val(edges[3]));
    }
    SmallTensor {
        indices: distinct,
        dims: m,
        data,
    }
}

/// Build the greedy contraction plan (for cost reporting).
pub fn eval_plan(g: &ColoredGraph, m: usize) -> EvalPlan {
    let (_, edges_of) = vertex_edges(g);
    let mut ranks: Vec<Vec<usize>> = g
        .red_pairs()
        .iter()
        .map(|&(u, v)| {
            let (a, b) = edges_of[u as usize];
            let (c, d) = edges_of[v as usize];
            let mut ix = vec![a, b, c, d];
            ix.sort_unstable();
            ix.dedup();
            ix
        })
        .collect();
    let mut order = Vec::new();
    // building each factor touches all its entries
    let mut cost: u64 = ranks.iter().map(|r| (m as u64).pow(r.len() as u32)).sum();
    while ranks.len() > 1 {
        let mut best: Option<(usize, usize, usize, usize)> = None;
        for i in 0..ranks.len() {
            for j in i + 1..ranks.len() {
                let shared = ranks[i].iter().filter(|x| ranks[j].contains(x)).count();
                let union = ranks[i].len() + ranks[j].len() - shared;
                let result = union - shared;
                let key = (result, union, i, j);
                if best.map_or(true, |b| key < b) {
                    best = Some(key);
                }
            }
        }
        let (result, union, i, j) = best.expect("at least two tensors");
        cost += (m as u64).pow(union as u32);
        let mut merged: Vec<usize> = ranks[i]
            .iter()
            .chain(ranks[j].iter())
            .copied()
            .filter(|x| !(ranks[i].contains(x) && ranks[j].contains(x)))
            .collect();
        merged.sort_unstable();
        merged.dedup();
        debug_assert_eq!(merged.len(), result);
        order.push((i, j));
        ranks.remove(j);
        ranks.remove(i);
        ranks.push(merged);
    }
    // trailing trace over indices never shared between two factors
    if let Some(last) = ranks.first() {
        cost += (m as u64).pow(last.len() as u32);
    }
    EvalPlan {
        order,
        estimated_cost: cost,
    }
}

/// Evaluate a graph on an algebraic curvature model. The model is converted
/// to its sectional tensor once; each red edge contributes one sectional
/// factor and every black edge one orthonormal-basis sum. The empty graph
/// evaluates to 1.
pub fn eval_graph(g: &ColoredGraph, model: &CurvModel, strategy: Strategy) -> Result<f64> {
    if model.kind != Kind::Algebraic {
        return Err(Error::Validation("eval expects an algebraic model".into()));
    }
    if g.is_empty() {
        return Ok(1.0);
    }
    let sec = phi_plus(model)?;
    eval_graph_on_sec(g, &sec, strategy)
}

fn eval_graph_on_sec(g: &ColoredGraph, sec: &CurvModel, strategy: Strategy) -> Result<f64> {
    if g.is_empty() {
        return Ok(1.0);
    }
    let m = sec.m;
    let (edge_count, edges_of) = vertex_edges(g);
    let reds = g.red_pairs();
    match strategy {
        Strategy::Naive => {
            let total = (m as f64).powi(edge_count as i32);
            if total > 1e7 {
                return Err(Error::Budget(format!(
                    "naive needs {total:e} assignments; use the scheduled strategy"
                )));
            }
            let total = total as usize;
            let mut sum = 0.0;
            let mut assign = vec![0usize; edge_count];
            for flat in 0..total {
                let mut rest = flat;
                for slot in (0..edge_count).rev() {
                    assign[slot] = rest % m;
                    rest /= m;
                }
                let mut prod = 1.0;
                for &(u, v) in &reds {
                    let (a, b) = edges_of[u as usize];
                    let (c, d) = edges_of[v as usize];
                    prod *= sec.get(assign[a], assign[b], assign[c], assign[d]);
                    if prod == 0.0 {
                        break;
                    }
                }
                sum += prod;
            }
            Ok(sum)
        }
        Strategy::Scheduled => {
            let mut tensors: Vec<SmallTensor> = reds
                .iter()
                .map(|&(u, v)| {
                    let (a, b) = edges_of[u as usize];
                    let (c, d) = edges_of[v as usize];
                    red_factor(sec, [a, b, c, d])
                })
                .collect();
            while tensors.len() > 1 {
                let mut best: Option<(usize, usize, usize, usize)> = None;
                for i in 0..tensors.len() {
                    for j in i + 1..tensors.len() {
                        let shared = tensors[i]
                            .indices
                            .iter()
                            .filter(|x| tensors[j].indices.contains(x))
                            .count();
                        let union = tensors[i].rank() + tensors[j].rank() - shared;
                        let result = union - shared;
                        let key = (result, union, i, j);
                        if best.map_or(true, |b| key < b) {
                            best = Some(key);
                        }
                    }
                }
                let (_, _, i, j) = best.expect("two tensors remain");
                let merged = contract_pair(&tensors[i], &tensors[j], m);
                tensors.remove(j);
                tensors.remove(i);
                tensors.push(merged);
            }
            // black edges whose two flags sit on a single red edge never
            // became shared indices; trace them out now
            Ok(tensors[0].data.iter().sum())
        }
    }
}

/// Linear extension of `eval_graph` to rational-coefficient polynomials.
pub fn eval_poly(p: &GraphPoly<Rat>, model: &CurvModel, strategy: Strategy) -> Result<f64> {
    let mut acc = 0.0;
    for (g, c) in p.terms() {
        acc += rat_to_f64(c) * eval_graph(g, model, strategy)?;
    }
    Ok(acc)
}

/// Substitute a rational value for `m` in every coefficient.
pub fn subst_m(p: &GraphPoly<PolyM>, m: &Rat) -> GraphPoly<Rat> {
    p.map_coeffs(|c| c.eval(m))
}

/// Evaluate an extended polynomial: tetravalent vertices carry the
/// algebraic tensor, red edges the sectional one.
pub fn eval_ext(e: &ExtPoly, model: &CurvModel) -> Result<f64> {
    if model.kind != Kind::Algebraic {
        return Err(Error::Validation("eval expects an algebraic model".into()));
    }
    let sec = phi_plus(model)?;
    let m = model.m;
    let mut acc = 0.0;
    for (g, coeff) in e.terms() {
        // black edge ids from the involution
        let nf = g.flag_count();
        let mut edge_of = vec![usize::MAX; nf];
        let mut edge_count = 0usize;
        for f in 0..nf {
            if edge_of[f] == usize::MAX {
                edge_of[f] = edge_count;
                edge_of[g.black()[f] as usize] = edge_count;
                edge_count += 1;
            }
        }
        let total = (m as f64).powi(edge_count as i32);
        if total > 1e7 {
            return Err(Error::Budget("extended graph too large".into()));
        }
        let mut sum = 0.0;
        let mut assign = vec![0usize; edge_count];
        for flat in 0..total as usize {
            let mut rest = flat;
            for slot in (0..edge_count).rev() {
                assign[slot] = rest % m;
                rest /= m;
            }
            let mut prod = 1.0;
            for v in 0..g.tri_count() as u32 {
                let w = g.tri_red()[v as usize];
                if v < w {
                    let (a, b) = (edge_of[(2 * v) as usize], edge_of[(2 * v + 1) as usize]);
                    let (c, d) = (edge_of[(2 * w) as usize], edge_of[(2 * w + 1) as usize]);
                    prod *= sec.get(assign[a], assign[b], assign[c], assign[d]);
                }
            }
            for q in g.quads() {
                let ix = |f: u32| assign[edge_of[f as usize]];
                prod *= model.get(ix(q[0]), ix(q[1]), ix(q[2]), ix(q[3]));
            }
            sum += prod;
        }
        acc += rat_to_f64(coeff) * sum;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Curvature derivation in formal dimension m.
// ---------------------------------------------------------------------------

/// Degree `-1` derivation expanding each red edge via the constant-curvature
/// sectional tensor: the red edge and its two vertices are removed and the
/// four adjacent black flags reconnected with weights `+4` (same-vertex
/// pairing) and `-2`, `-2` (cross pairings); every vertexless circle closed
/// in the process contributes a factor of the formal dimension `m`.
pub fn delta_m(p: &GraphPoly<PolyM>) -> GraphPoly<PolyM> {
    let m = PolyM::var();
    let mut out: GraphPoly<PolyM> = GraphPoly::zero();
    for (g, c) in p.terms() {
        for (u, v) in g.red_pairs() {
            let (a, b) = (2 * u, 2 * u + 1);
            let (x, y) = (2 * v, 2 * v + 1);
            for (weight, pairing) in [
                (rat_i(4), [(a, b), (x, y)]),
                (rat_i(-2), [(a, x), (b, y)]),
                (rat_i(-2), [(a, y), (b, x)]),
            ] {
                let (h, circles) = contract_red_edge(g, u, v, &pairing);
                let mut factor = PolyM::constant(weight);
                for _ in 0..circles {
                    factor = factor.mul(&m);
                }
                out.add_term(h, c.mul(&factor));
            }
        }
    }
    out
}

/// Value of a homogeneous degree-`n` polynomial on the constant-curvature
/// model of dimension `m` and scalar curvature `kappa`, computed as
/// `(1/n!) (kappa / (m (m-1)))^n  delta_m^n p`.
pub fn const_value(p: &GraphPoly<Rat>, m: &Rat, kappa: &Rat) -> Result<f64> {
    let (n, rf) = const_value_symbolic(p)?;
    let base = rf.eval(m)?;
    let mut factor = rat_i(1);
    for _ in 0..n {
        factor *= kappa;
    }
    Ok(rat_to_f64(&(base * factor)))
}

/// Symbolic constant-curvature value: returns the degree `n` and the
/// rational function `f(m)` with value `kappa^n f(m)`.
pub fn const_value_symbolic(p: &GraphPoly<Rat>) -> Result<(usize, RatFuncM)> {
    let n = p.top_degree().unwrap_or(0);
    if !p.is_homogeneous(n) {
        return Err(Error::Validation("const_value needs a homogeneous input".into()));
    }
    let mut cur: GraphPoly<PolyM> = p.map_coeffs(|c| PolyM::constant(c.clone()));
    for _ in 0..n {
        cur = delta_m(&cur);
    }
    let num = cur.coeff(&ColoredGraph::empty());
    let mut fact = rat_i(1);
    for k in 1..=n {
        fact *= rat_i(k as i64);
    }
    let mm1 = PolyM::var().mul(&PolyM::var().sub(&PolyM::one())); // m(m-1)
    let mut den = PolyM::constant(fact);
    for _ in 0..n {
        den = den.mul(&mm1);
    }
    RatFuncM::new(num, den).map(|rf| (n, rf))
}

// ---------------------------------------------------------------------------
// Pfaffian and moment polynomials.
// ---------------------------------------------------------------------------

/// `pf_n = sum over classes of degree n of
/// (-1)^e(γ) 2^g(γ) / (6^n #Aut̄ γ) [γ]`.
pub fn pfaffian_poly(n: usize) -> GraphPoly<Rat> {
    if n == 0 {
        return GraphPoly::one();
    }
    let mut out = GraphPoly::zero();
    let mut six_n = rat_i(1);
    for _ in 0..n {
        six_n *= rat_i(6);
    }
    for g in enumerate_degree(n, false) {
        let st = g.stats();
        let (_, _, aut_bar) = g.automorphisms();
        let sign = if st.e % 2 == 0 { 1 } else { -1 };
        let coeff = rat_i(sign) * rat_i(1i64 << st.g) / (&six_n * rat_i(aut_bar as i64));
        out.add_term(g, coeff);
    }
    out
}

/// The exponent of the Pfaffian generating series truncated at `max_degree`:
/// the sum over connected classes of `(-1)^e 2^g / (6^n #Aut̄) [γ]`.
pub fn pfaffian_exponent(max_degree: usize) -> GraphPoly<Rat> {
    let mut out = GraphPoly::zero();
    for n in 1..=max_degree {
        let mut six_n = rat_i(1);
        for _ in 0..n {
            six_n *= rat_i(6);
        }
        for g in enumerate_degree(n, false) {
            let st = g.stats();
            if st.components != 1 {
                continue;
            }
            let (_, _, aut_bar) = g.automorphisms();
            let sign = if st.e % 2 == 0 { 1 } else { -1 };
            let coeff = rat_i(sign) * rat_i(1i64 << st.g) / (&six_n * rat_i(aut_bar as i64));
            out.add_term(g, coeff);
        }
    }
    out
}

/// Normalized moment polynomial: the sum over classes whose black cycles
/// all have even length of `(-1)^n 2^g / #Aut̄ [γ]`.
pub fn moment_poly(n: usize) -> GraphPoly<Rat> {
    if n == 0 {
        return GraphPoly::one();
    }
    let mut out = GraphPoly::zero();
    for g in enumerate_degree(n, false) {
        if g.cycle_lens().iter().any(|&l| l % 2 != 0) {
            continue;
        }
        let st = g.stats();
        let (_, _, aut_bar) = g.automorphisms();
        let sign = if n % 2 == 0 { 1 } else { -1 };
        let coeff = rat_i(sign) * rat_i(1i64 << st.g) / rat_i(aut_bar as i64);
        out.add_term(g, coeff);
    }
    out
}

/// Falling factorial `[x]_k = x (x-1) ... (x-k+1)`.
pub fn falling_factorial(x: f64, k: usize) -> f64 {
    (0..k).map(|i| x - i as f64).product()
}

/// Grassmannian moment `Psi_n = n! / [m+2n-2]_{2n} * Psi^o_n(R)`.
pub fn moment_value(n: usize, model: &CurvModel, strategy: Strategy) -> Result<f64> {
    let ff = falling_factorial((model.m + 2 * n) as f64 - 2.0, 2 * n);
    if ff == 0.0 {
        return Err(Error::Numeric("falling factorial vanishes".into()));
    }
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    Ok(fact / ff * eval_poly(&moment_poly(n), model, strategy)?)
}

/// Definitional Pfaffian value: the signed permutation sum over `S_{2n}`
/// of iterated sectional contractions, `(1/(12^n n!)) sum_sigma sgn sigma
/// sum_mu prod_r Sec(mu_{2r-1}, mu_{sigma(2r-1)}; mu_{2r}, mu_{sigma(2r)})`.
pub fn pfaffian_defn_eval(n: usize, model: &CurvModel) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    if n > 3 {
        return Err(Error::Budget("definitional Pfaffian limited to n <= 3".into()));
    }
    let sec = phi_plus(model)?;
    let m = model.m;
    let k = 2 * n;
    let mut acc = 0.0;
    let mut idx = vec![0usize; k];
    for perm in all_permutations(k) {
        let mut inversions = 0usize;
        for i in 0..k {
            for j in i + 1..k {
                if perm[i] > perm[j] {
                    inversions += 1;
                }
            }
        }
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        let total = m.pow(k as u32);
        let mut sum = 0.0;
        for flat in 0..total {
            let mut rest = flat;
            for slot in (0..k).rev() {
                idx[slot] = rest % m;
                rest /= m;
            }
            let mut prod = 1.0;
            for r in 0..n {
                prod *= sec.get(
                    idx[2 * r],
                    idx[perm[2 * r]],
                    idx[2 * r + 1],
                    idx[perm[2 * r + 1]],
                );
                if prod == 0.0 {
                    break;
                }
            }
            sum += prod;
        }
        acc += sign * sum;
    }
    let mut norm = 1.0;
    for _ in 0..n {
        norm *= 12.0;
    }
    for r in 1..=n {
        norm *= r as f64;
    }
    Ok(acc / norm)
}

fn all_permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for i in k..cur.len() {
            cur.swap(k, i);
            rec(cur, k + 1, out);
            cur.swap(k, i);
        }
    }
    let mut cur: Vec<usize> = (0..k).collect();
    let mut out = Vec::new();
    rec(&mut cur, 0, &mut out);
    out
}

// ---------------------------------------------------------------------------
// Wick oracle for the normalized moment polynomials.
// ---------------------------------------------------------------------------

/// Sparse multivariate polynomial over f64, exponent vectors as keys.
#[derive(Clone, Debug, Default)]
struct MPoly {
    terms: BTreeMap<Vec<u8>, f64>,
}

impl MPoly {
    fn zero() -> Self {
        MPoly::default()
    }

    fn constant(nvars: usize, v: f64) -> Self {
        let mut p = MPoly::zero();
        if v != 0.0 {
            p.terms.insert(vec![0; nvars], v);
        }
        p
    }

    fn add_term(&mut self, expo: Vec<u8>, v: f64) {
        if v == 0.0 {
            return;
        }
        let e = self.terms.entry(expo).or_insert(0.0);
        *e += v;
        if *e == 0.0 {
            let key = self.terms.iter().find(|(_, &x)| x == 0.0).map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, v) in &other.terms {
            out.add_term(e.clone(), *v);
        }
        out
    }

    fn scale(&self, c: f64) -> MPoly {
        let mut out = MPoly::zero();
        for (e, v) in &self.terms {
            out.add_term(e.clone(), c * v);
        }
        out
    }

    fn mul_trunc(&self, other: &MPoly, max_deg: usize) -> MPoly {
        let mut out = MPoly::zero();
        for (ea, va) in &self.terms {
            let da: usize = ea.iter().map(|&x| x as usize).sum();
            for (eb, vb) in &other.terms {
                let db: usize = eb.iter().map(|&x| x as usize).sum();
                if da + db > max_deg {
                    continue;
                }
                let expo: Vec<u8> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(expo, va * vb);
            }
        }
        out
    }

    /// Homogeneous part of total degree `d`.
    fn grade(&self, d: usize) -> MPoly {
        let mut out = MPoly::zero();
        for (e, v) in &self.terms {
            if e.iter().map(|&x| x as usize).sum::<usize>() == d {
                out.add_term(e.clone(), *v);
            }
        }
        out
    }

    /// Apply the flat Laplacian `sum_i d^2/dx_i^2` once.
    fn laplacian(&self) -> MPoly {
        let mut out = MPoly::zero();
        for (e, v) in &self.terms {
            for i in 0..e.len() {
                if e[i] >= 2 {
                    let mut f = e.clone();
                    f[i] -= 2;
                    out.add_term(f, v * (e[i] as f64) * (e[i] as f64 - 1.0));
                }
            }
        }
        out
    }

    fn constant_term(&self) -> f64 {
        self.terms
            .iter()
            .find(|(e, _)| e.iter().all(|&x| x == 0))
            .map(|(_, &v)| v)
            .unwrap_or(0.0)
    }
}

/// Direct Wick evaluation of the normalized moment polynomial
/// `Psi^o_n(R)`: expand `exp(sum_{r>0} 1/(2r) tr(R_{.,X} X)^r)` to total
/// degree `2n` in `X` and apply `exp(-Laplacian)` at zero.
pub fn psi_defn_eval(n: usize, model: &CurvModel) -> Result<f64> {
    if model.kind != Kind::Algebraic {
        return Err(Error::Validation("psi oracle expects an algebraic model".into()));
    }
    if n == 0 {
        return Ok(1.0);
    }
    if n > 3 {
        return Err(Error::Budget("Wick oracle limited to n <= 3".into()));
    }
    let m = model.m;
    let deg = 2 * n;
    // Jacobi operator entries as quadratic polynomials in X:
    // J[u][v](X) = sum_{j,k} R[u, j, k, v] x_j x_k
    let mut j: Vec<Vec<MPoly>> = vec![vec![MPoly::zero(); m]; m];
    for u in 0..m {
        for v in 0..m {
            let mut p = MPoly::zero();
            for a in 0..m {
                for b in 0..m {
                    let c = model.get(u, a, b, v);
                    if c != 0.0 {
                        let mut e = vec![0u8; m];
                        e[a] += 1;
                        e[b] += 1;
                        p.add_term(e, c);
                    }
                }
            }
            j[u][v] = p;
        }
    }
    // traces of powers
    let mut f = MPoly::zero();
    let mut power = j.clone();
    for r in 1..=n {
        if r > 1 {
            let mut next = vec![vec![MPoly::zero(); m]; m];
            for a in 0..m {
                for b in 0..m {
                    let mut acc = MPoly::zero();
                    for c in 0..m {
                        acc = acc.add(&power[a][c].mul_trunc(&j[c][b], deg));
                    }
                    next[a][b] = acc;
                }
            }
            power = next;
        }
        let mut tr = MPoly::zero();
        for a in 0..m {
            tr = tr.add(&power[a][a]);
        }
        f = f.add(&tr.scale(1.0 / (2.0 * r as f64)));
    }
    // exp(F) truncated to degree 2n
    let mut g = MPoly::constant(m, 1.0);
    let mut fk = MPoly::constant(m, 1.0);
    let mut fact = 1.0;
    for k in 1..=n {
        fk = fk.mul_trunc(&f, deg);
        fact *= k as f64;
        g = g.add(&fk.scale(1.0 / fact));
    }
    // exp(-Delta_g)|_0 on the degree-2n part: (sum_i d_i^2)^n / n!
    let mut h = g.grade(deg);
    for _ in 0..n {
        h = h.laplacian();
    }
    let nfact: f64 = (1..=n).map(|k| k as f64).product();
    Ok(h.constant_term() / nfact)
}

// ---------------------------------------------------------------------------
// The cubic polynomial of the standard curvature term.
// ---------------------------------------------------------------------------

/// Normal form of the curvature derivation of a single class, expressed in
/// the quotient representatives one degree down.
pub fn delta_m_reduced(p: &GraphPoly<PolyM>, degree: usize) -> Result<GraphPoly<PolyM>> {
    let d = delta_m(p);
    if degree == 1 {
        return Ok(d); // image in degree 0 is already scalar
    }
    let basis = crate::ihx::build_quotient(degree - 1);
    crate::ihx::normal_form_polym(&d, &basis)
}

/// Hexagon classes by their curvature-derivation fingerprints: rows of the
/// degree-3 derivation table, `delta(g3.k)` expressed over the degree-2
/// quotient representatives. Returns the five connected-black degree-3
/// classes in table order.
pub fn degree3_table_classes() -> Result<Vec<ColoredGraph>> {
    let qp = crate::graphs::square_parallel();
    let qx = crate::graphs::square_crossed();
    let tt = crate::graphs::theta().disjoint_union(&crate::graphs::theta());
    let mvar = PolyM::var();
    let c = |k: i64| PolyM::constant(rat_i(k));
    let expected: Vec<GraphPoly<PolyM>> = vec![
        // -6(m-1) qp
        GraphPoly::monomial(qp.clone(), c(-6).mul(&mvar.sub(&PolyM::one()))),
        // -(4m-6) qp - 2 theta^2
        {
            let mut p = GraphPoly::monomial(qp.clone(), c(-4).mul(&mvar).add(&c(6)));
            p.add_term(tt.clone(), c(-2));
            p
        },
        // +12 qp - 2(m-1) qx
        {
            let mut p = GraphPoly::monomial(qp.clone(), c(12));
            p.add_term(qx.clone(), c(-2).mul(&mvar.sub(&PolyM::one())));
            p
        },
        // +12 qp + 6 qx
        {
            let mut p = GraphPoly::monomial(qp.clone(), c(12));
            p.add_term(qx.clone(), c(6));
            p
        },
        // -6 qp + 24 qx
        {
            let mut p = GraphPoly::monomial(qp.clone(), c(-6));
            p.add_term(qx.clone(), c(24));
            p
        },
    ];
    let classes = enumerate_degree(3, true);
    let mut out: Vec<Option<ColoredGraph>> = vec![None; 5];
    for g in classes {
        let d = delta_m_reduced(&GraphPoly::monomial(g.clone(), PolyM::one()), 3)?;
        if let Some(pos) = expected.iter().position(|e| *e == d) {
            if out[pos].is_some() {
                return Err(Error::Numeric(
                    "two classes share a derivation fingerprint".into(),
                ));
            }
            out[pos] = Some(g);
        }
    }
    out.into_iter()
        .map(|o| o.ok_or_else(|| Error::Numeric("derivation fingerprint not matched".into())))
        .collect()
}

/// `Theta_3` as a graph polynomial:
/// `(1/12) [ (1/6) g_a - (2/3) g_b + (1/2) g_c ]` with the three hexagon
/// classes identified by their derivation fingerprints (table rows 5, 4, 3).
pub fn theta3_poly() -> Result<GraphPoly<Rat>> {
    let table = degree3_table_classes()?;
    let (ga, gb, gc) = (table[4].clone(), table[3].clone(), table[2].clone());
    let mut p = GraphPoly::zero();
    p.add_term(ga, rat(1, 6));
    p.add_term(gb, rat(-2, 3));
    p.add_term(gc, rat(1, 2));
    Ok(p.scale_rat(&rat(1, 12)))
}

// ---------------------------------------------------------------------------
// Einstein reduction.
// ---------------------------------------------------------------------------

/// Black adjacency of two vertices in canonical storage: consecutive within
/// a cycle range (or the wraparound pair).
fn black_adjacent(g: &ColoredGraph, u: u32, v: u32) -> bool {
    let mut base = 0u32;
    for &l in g.cycle_lens() {
        let end = base + l;
        if u >= base && u < end {
            if !(v >= base && v < end) {
                return false;
            }
            if l == 1 {
                return false; // a loop is not an edge between two vertices
            }
            let (a, b) = (u - base, v - base);
            let d = if a > b { a - b } else { b - a };
            return d == 1 || d == l - 1;
        }
        base = end;
    }
    false
}

fn same_cycle(g: &ColoredGraph, u: u32, v: u32) -> bool {
    let mut base = 0u32;
    for &l in g.cycle_lens() {
        let end = base + l;
        let iu = u >= base && u < end;
        let iv = v >= base && v < end;
        if iu || iv {
            return iu && iv;
        }
        base = end;
    }
    false
}

/// One Einstein rewrite step on a canonical class, when a step applies:
/// either a red edge parallel to a black edge is contracted at the cost of
/// a factor `-2 kappa / m` (a closed circle contributing an extra `m`), or
/// a red edge joining two different black cycles is resolved through its
/// IHX relation into minus the two merged configurations.
fn einstein_step(g: &ColoredGraph) -> Option<Vec<(ColoredGraph, KappaPoly)>> {
    let reds = g.red_pairs();
    // qualifying edge with the smallest (u, v)
    for &(u, v) in &reds {
        if black_adjacent(g, u, v) {
            // delete the shared black edge, join the two remaining flags
            let fv = FlagView::of(g);
            let flags_u = [2 * u, 2 * u + 1];
            let flags_v = [2 * v, 2 * v + 1];
            let mut shared: Option<(u32, u32)> = None;
            for fu in flags_u {
                for fvv in flags_v {
                    if fv.theta[fu as usize] == fvv {
                        shared = Some((fu, fvv));
                    }
                }
            }
            let (su, sv) = shared.expect("adjacent vertices share a black edge");
            let ou = flags_u.into_iter().find(|&f| f != su).unwrap();
            let ov = flags_v.into_iter().find(|&f| f != sv).unwrap();
            let (h, circles) = contract_red_edge(g, u, v, &[(ou, ov)]);
            let mut factor = KappaPoly::monomial(
                RatFuncM::new(PolyM::constant(rat_i(-2)), PolyM::var()).unwrap(),
                1,
            );
            for _ in 0..circles {
                factor = factor.mul(&KappaPoly::constant(RatFuncM::from_poly(PolyM::var())));
            }
            return Some(vec![(h, factor)]);
        }
        if !same_cycle(g, u, v) {
            let (_, gh, gx) = reattach_configs(g, u, v);
            let minus_one = KappaPoly::constant(RatFuncM::from_rat(rat_i(-1)));
            return Some(vec![(gh, minus_one.clone()), (gx, minus_one)]);
        }
    }
    None
}

fn reduce_class(
    g: &ColoredGraph,
    memo: &mut BTreeMap<ColoredGraph, GraphPoly<KappaPoly>>,
) -> GraphPoly<KappaPoly> {
    if let Some(hit) = memo.get(g) {
        return hit.clone();
    }
    let out = match einstein_step(g) {
        None => GraphPoly::monomial(g.clone(), KappaPoly::one()),
        Some(terms) => {
            let mut acc: GraphPoly<KappaPoly> = GraphPoly::zero();
            for (h, factor) in terms {
                let sub = reduce_class(&h, memo);
                acc = acc.add(&sub.scale(&factor));
            }
            acc
        }
    };
    memo.insert(g.clone(), out.clone());
    out
}

/// Rewrite a rational graph polynomial of degree at most 3 on the Einstein
/// locus: parallel red/black pairs contract to `-2 kappa / m` and red edges
/// between different black cycles are resolved by their IHX relation, until
/// only irreducible classes remain (the empty graph, the crossed square and
/// the two parallel-free hexagons). Coefficients become polynomials in
/// `kappa` over rational functions of `m`.
pub fn einstein_reduce(p: &GraphPoly<Rat>) -> Result<GraphPoly<KappaPoly>> {
    if p.top_degree().unwrap_or(0) > 3 {
        return Err(Error::Unsupported(
            "Einstein reduction verified for degree <= 3 only".into(),
        ));
    }
    let mut memo = BTreeMap::new();
    let mut acc: GraphPoly<KappaPoly> = GraphPoly::zero();
    for (g, c) in p.terms() {
        let reduced = reduce_class(g, &mut memo);
        acc = acc.add(&reduced.scale(&KappaPoly::constant(RatFuncM::from_rat(c.clone()))));
    }
    Ok(acc)
}

/// All-orders variant for confluence checking: reduces by every qualifying
/// red edge at each step and demands identical outcomes.
pub fn einstein_reduce_all_orders(g: &ColoredGraph) -> Result<GraphPoly<KappaPoly>> {
    fn step_at(
        g: &ColoredGraph,
        u: u32,
        v: u32,
    ) -> Option<Vec<(ColoredGraph, KappaPoly)>> {
        if black_adjacent(g, u, v) {
            let fv = FlagView::of(g);
            let flags_u = [2 * u, 2 * u + 1];
            let flags_v = [2 * v, 2 * v + 1];
            let mut shared: Option<(u32, u32)> = None;
            for fu in flags_u {
                for fvv in flags_v {
                    if fv.theta[fu as usize] == fvv {
                        shared = Some((fu, fvv));
                    }
                }
            }
            let (su, sv) = shared?;
            let ou = flags_u.into_iter().find(|&f| f != su).unwrap();
            let ov = flags_v.into_iter().find(|&f| f != sv).unwrap();
            let (h, circles) = contract_red_edge(g, u, v, &[(ou, ov)]);
            let mut factor = KappaPoly::monomial(
                RatFuncM::new(PolyM::constant(rat_i(-2)), PolyM::var()).unwrap(),
                1,
            );
            for _ in 0..circles {
                factor = factor.mul(&KappaPoly::constant(RatFuncM::from_poly(PolyM::var())));
            }
            Some(vec![(h, factor)])
        } else if !same_cycle(g, u, v) {
            let (_, gh, gx) = reattach_configs(g, u, v);
            let minus_one = KappaPoly::constant(RatFuncM::from_rat(rat_i(-1)));
            Some(vec![(gh, minus_one.clone()), (gx, minus_one)])
        } else {
            None
        }
    }
    fn recurse(g: &ColoredGraph) -> Result<GraphPoly<KappaPoly>> {
        let mut results: Vec<GraphPoly<KappaPoly>> = Vec::new();
        for (u, v) in g.red_pairs() {
            if let Some(terms) = step_at(g, u, v) {
                let mut acc: GraphPoly<KappaPoly> = GraphPoly::zero();
                for (h, factor) in terms {
                    acc = acc.add(&recurse(&h)?.scale(&factor));
                }
                results.push(acc);
            }
        }
        if results.is_empty() {
            return Ok(GraphPoly::monomial(g.clone(), KappaPoly::one()));
        }
        for r in &results[1..] {
            if *r != results[0] {
                return Err(Error::Numeric(format!(
                    "Einstein rewrite not confluent at {g}"
                )));
            }
        }
        Ok(results.remove(0))
    }
    recurse(g)
}

// ---------------------------------------------------------------------------
// Identity verifiers.
// ---------------------------------------------------------------------------

/// Symbolic Einstein expansion of one degree-3 polynomial: the scalar part
/// in `kappa` and `m`, the `|R|^2` slot read from the crossed-square
/// coefficient (via `[Q_x](R) = -24 |R|^2`) and the coefficients on the two
/// surviving hexagon classes.
#[derive(Clone, Debug)]
pub struct EinsteinExpansion {
    pub scalar_part: KappaPoly,
    pub r2_slot: KappaPoly,
    pub hexagon_antipodal: KappaPoly,
    pub hexagon_mixed: KappaPoly,
}

/// Reduce `p` and split the outcome over the irreducible classes.
pub fn einstein_expand(p: &GraphPoly<Rat>) -> Result<EinsteinExpansion> {
    let reduced = einstein_reduce(p)?;
    let table = degree3_table_classes()?;
    let hex_a = table[4].clone(); // all-antipodal hexagon
    let hex_b = table[3].clone(); // one antipodal, two distance-2 chords
    let qx = crate::graphs::square_crossed();
    let empty = ColoredGraph::empty();
    for (g, _) in reduced.terms() {
        if *g != hex_a && *g != hex_b && *g != qx && *g != empty {
            return Err(Error::Numeric(format!(
                "unexpected irreducible class {g} in Einstein reduction"
            )));
        }
    }
    let minus24 = KappaPoly::constant(RatFuncM::from_rat(rat_i(-24)));
    Ok(EinsteinExpansion {
        scalar_part: reduced.coeff(&empty),
        r2_slot: reduced.coeff(&qx).mul(&minus24),
        hexagon_antipodal: reduced.coeff(&hex_a),
        hexagon_mixed: reduced.coeff(&hex_b),
    })
}

/// The three per-polynomial Einstein expansions of `pf_3`, `Psi^o_3` and
/// `Theta_3`, in that order.
pub fn per_poly_einstein_expansions() -> Result<[EinsteinExpansion; 3]> {
    let pf3 = pfaffian_poly(3);
    let psi3 = moment_poly(3);
    let th3 = theta3_poly()?;
    Ok([
        einstein_expand(&pf3)?,
        einstein_expand(&psi3)?,
        einstein_expand(&th3)?,
    ])
}

/// Report of the cubic Einstein identity check on one model.
#[derive(Clone, Debug)]
pub struct EinsteinIdentityReport {
    pub m: usize,
    pub kappa: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub relative_gap: f64,
    pub symbolic_ok: bool,
}

/// The combination `pf_3 - (1/40) Psi^o_3 - (2/15) Theta_3` as a graph
/// polynomial.
pub fn einstein_combination() -> Result<GraphPoly<Rat>> {
    let pf3 = pfaffian_poly(3);
    let psi3 = moment_poly(3).scale_rat(&rat(-1, 40));
    let th3 = theta3_poly()?.scale_rat(&rat(-2, 15));
    Ok(pf3.add(&psi3).add(&th3))
}

/// Expected scalar part `kappa^3 (m^2 - 18m + 40) / (60 m^2)` of the
/// combination.
pub fn expected_combination_scalar() -> KappaPoly {
    KappaPoly::monomial(
        RatFuncM::new(
            crate::exactalg::parse_polym("m^2-18*m+40").unwrap(),
            crate::exactalg::parse_polym("60*m^2").unwrap(),
        )
        .unwrap(),
        3,
    )
}

/// Expected `|R|^2` slot `kappa (3m - 104) / (30 m)` of the combination.
pub fn expected_combination_r2() -> KappaPoly {
    KappaPoly::monomial(
        RatFuncM::new(
            crate::exactalg::parse_polym("3*m-104").unwrap(),
            crate::exactalg::parse_polym("30*m").unwrap(),
        )
        .unwrap(),
        1,
    )
}

/// Check the pointwise cubic identity on an Einstein-type model and the
/// symbolic reduction of the combination.
pub fn einstein_identity(model: &CurvModel, strategy: Strategy) -> Result<EinsteinIdentityReport> {
    if model.m < 3 {
        return Err(Error::Validation("identity needs m >= 3".into()));
    }
    if !is_einstein(model, 1e-8) {
        return Err(Error::Validation("model is not of Einstein type".into()));
    }
    let m = model.m;
    let kappa = scalar(model)?;
    let r2 = curv_norm_sq(model);
    let combo = einstein_combination()?;
    let lhs = eval_poly(&combo, model, strategy)?;
    let mf = m as f64;
    let rhs = kappa.powi(3) * (mf * mf - 18.0 * mf + 40.0) / (60.0 * mf * mf)
        + kappa * (3.0 * mf - 104.0) / (30.0 * mf) * r2;
    let scale = lhs.abs().max(rhs.abs()).max(1e-12);
    let expansion = einstein_expand(&combo)?;
    let symbolic_ok = expansion.scalar_part == expected_combination_scalar()
        && expansion.r2_slot == expected_combination_r2()
        && expansion.hexagon_antipodal.is_zero()
        && expansion.hexagon_mixed.is_zero();
    Ok(EinsteinIdentityReport {
        m,
        kappa,
        lhs,
        rhs,
        relative_gap: (lhs - rhs).abs() / scale,
        symbolic_ok,
    })
}

/// Euler characteristic of the unit sphere of even dimension `m` through
/// the constant-curvature value pipeline:
/// `Vol(S^m) pf_{m/2}(R) / (2 pi)^{m/2}`.
pub fn gauss_bonnet_sphere(m: usize) -> Result<f64> {
    if m % 2 != 0 || !(2..=6).contains(&m) {
        return Err(Error::Unsupported("sphere check for m in {2, 4, 6}".into()));
    }
    let vol = match m {
        2 => 4.0 * std::f64::consts::PI,
        4 => 8.0 * std::f64::consts::PI.powi(2) / 3.0,
        _ => 16.0 * std::f64::consts::PI.powi(3) / 15.0,
    };
    let kappa = rat_i((m * (m - 1)) as i64);
    let pf = pfaffian_poly(m / 2);
    let value = const_value(&pf, &rat_i(m as i64), &kappa)?;
    Ok(vol * value / (2.0 * std::f64::consts::PI).powi((m / 2) as i32))
}

/// Report of the dimension-4 integrand identity
/// `pf_2(R) - 15 Psi_2(R) = -(4/3)|Ric_0|^2 - kappa^2 / 12`.
#[derive(Clone, Debug)]
pub struct HitchinThorpeReport {
    pub lhs: f64,
    pub rhs: f64,
    pub relative_gap: f64,
}

pub fn hitchin_thorpe4(model: &CurvModel, strategy: Strategy) -> Result<HitchinThorpeReport> {
    if model.m != 4 {
        return Err(Error::Validation("integrand identity needs m = 4".into()));
    }
    let pf2 = eval_poly(&pfaffian_poly(2), model, strategy)?;
    let psi2 = moment_value(2, model, strategy)?;
    let kappa = scalar(model)?;
    let ric0 = ricci_traceless(model)?;
    let lhs = pf2 - 15.0 * psi2;
    let rhs = -4.0 / 3.0 * sym_norm_sq(&ric0) - kappa * kappa / 12.0;
    let scale = lhs.abs().max(rhs.abs()).max(1e-12);
    Ok(HitchinThorpeReport {
        lhs,
        rhs,
        relative_gap: (lhs - rhs).abs() / scale,
    })
}
