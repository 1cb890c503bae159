//! IHX relations and the per-degree quotient of the graph algebra.
//!
//! For every red edge of a colored trivalent graph the three ways of
//! reattaching the four adjacent black flags sum to zero under evaluation
//! (the graph shadow of the first Bianchi identity). This module generates
//! those relations, row-reduces them over the canonical class basis and
//! exposes normal forms and stable dimensions of the quotient.

use std::collections::BTreeMap;

use crate::algebra::GraphPoly;
use crate::exactalg::{echelon, rat_i, reduce_against, Echelon, PolyM, Rat, SparseVec};
use crate::graphs::{enumerate_degree, reattach_configs, ColoredGraph};
use crate::{Error, Result};

/// Echelonized IHX relation span of one degree together with the ordered
/// class basis it is expressed in.
#[derive(Clone)]
pub struct IhxBasis {
    degree: usize,
    class_list: Vec<ColoredGraph>,
    index: BTreeMap<ColoredGraph, usize>,
    relations: Echelon,
}

impl IhxBasis {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn class_list(&self) -> &[ColoredGraph] {
        &self.class_list
    }

    pub fn rank(&self) -> usize {
        self.relations.rank()
    }

    pub fn relation_basis(&self) -> &Echelon {
        &self.relations
    }

    /// Dimension of the quotient: classes minus relation rank.
    pub fn stable_dim(&self) -> usize {
        self.class_list.len() - self.relations.rank()
    }

    /// Surviving coset representatives: the non-pivot classes.
    pub fn representatives(&self) -> Vec<ColoredGraph> {
        (0..self.class_list.len())
            .filter(|&i| !self.relations.is_pivot(i))
            .map(|i| self.class_list[i].clone())
            .collect()
    }

    pub fn coords(&self, p: &GraphPoly<Rat>) -> Result<SparseVec> {
        let mut entries = Vec::new();
        for (g, c) in p.terms() {
            let i = self.index.get(g).ok_or_else(|| Error::DegreeMismatch {
                expected: self.degree,
                got: g.degree(),
            })?;
            entries.push((*i, c.clone()));
        }
        Ok(SparseVec::from_entries(entries))
    }

    pub fn from_coords(&self, v: &SparseVec) -> GraphPoly<Rat> {
        let mut out = GraphPoly::zero();
        for (i, c) in v.entries() {
            out.add_term(self.class_list[*i].clone(), c.clone());
        }
        out
    }
}

/// All IHX relations of degree `n` as graph polynomials: one candidate per
/// (class, red edge), with duplicate vectors removed. Deterministic for the
/// canonical class order.
pub fn ihx_relations(n: usize) -> Vec<GraphPoly<Rat>> {
    let mut out: Vec<GraphPoly<Rat>> = Vec::new();
    if n == 0 {
        return out;
    }
    for g in enumerate_degree(n, false) {
        for (u, v) in g.red_pairs() {
            let (gi, gh, gx) = reattach_configs(&g, u, v);
            let mut rel = GraphPoly::zero();
            rel.add_term(gi, rat_i(1));
            rel.add_term(gh, rat_i(1));
            rel.add_term(gx, rat_i(1));
            if !out.contains(&rel) {
                out.push(rel);
            }
        }
    }
    out
}

/// Echelonize all degree-`n` relations over the canonical class list.
pub fn build_quotient(n: usize) -> IhxBasis {
    let class_list = enumerate_degree(n, false);
    build_quotient_with_classes(n, class_list)
}

fn build_quotient_with_classes(n: usize, class_list: Vec<ColoredGraph>) -> IhxBasis {
    let index: BTreeMap<ColoredGraph, usize> = class_list
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, g)| (g, i))
        .collect();
    let rows: Vec<SparseVec> = ihx_relations(n)
        .iter()
        .map(|rel| {
            SparseVec::from_entries(
                rel.terms()
                    .map(|(g, c)| (index[g], c.clone()))
                    .collect(),
            )
        })
        .collect();
    let relations = echelon(&rows, class_list.len()).expect("relation widths match");
    IhxBasis {
        degree: n,
        class_list,
        index,
        relations,
    }
}

/// Quotient built over an explicitly ordered class list (the list must be a
/// permutation of the canonical classes of the degree). Used to check that
/// the stable dimension does not depend on the ordering.
pub fn build_quotient_ordered(n: usize, class_list: Vec<ColoredGraph>) -> IhxBasis {
    build_quotient_with_classes(n, class_list)
}

/// Normal form of a homogeneous polynomial modulo the relation span:
/// `p - normal_form(p)` lies in the span and the result vanishes at all
/// pivot classes.
pub fn normal_form(p: &GraphPoly<Rat>, basis: &IhxBasis) -> Result<GraphPoly<Rat>> {
    if !p.is_homogeneous(basis.degree) {
        return Err(Error::DegreeMismatch {
            expected: basis.degree,
            got: p.top_degree().unwrap_or(0),
        });
    }
    let v = basis.coords(p)?;
    let r = reduce_against(&basis.relations, &v)?;
    Ok(basis.from_coords(&r))
}

/// Normal form with polynomial coefficients in the formal dimension,
/// reduced power by power (the relation span has rational coefficients).
pub fn normal_form_polym(p: &GraphPoly<PolyM>, basis: &IhxBasis) -> Result<GraphPoly<PolyM>> {
    let top = p
        .terms()
        .filter_map(|(_, c)| c.degree())
        .max()
        .unwrap_or(0);
    let mut out: GraphPoly<PolyM> = GraphPoly::zero();
    for k in 0..=top {
        let slice = p.map_coeffs(|c| c.coeff(k));
        if slice.is_zero() {
            continue;
        }
        let nf = normal_form(&slice, basis)?;
        let mut mono = vec![crate::exactalg::rat_i(0); k + 1];
        mono[k] = crate::exactalg::rat_i(1);
        let mk = PolyM::from_coeffs(mono);
        out = out.add(&nf.map_coeffs(|c| PolyM::constant(c.clone()).mul(&mk)));
    }
    Ok(out)
}

/// Count of connected-black classes of degree `n` and the number of
/// independent relations purely between them in the quotient, computed by
/// eliminating all other classes first.
pub fn connected_black_rank(n: usize) -> (usize, usize) {
    let all = enumerate_degree(n, false);
    let (other, cb): (Vec<ColoredGraph>, Vec<ColoredGraph>) = {
        let mut other = Vec::new();
        let mut cb = Vec::new();
        for g in all {
            if g.stats().black_connected {
                cb.push(g);
            } else {
                other.push(g);
            }
        }
        (other, cb)
    };
    let cb_count = cb.len();
    let split = other.len();
    let mut ordered = other;
    ordered.extend(cb);
    let basis = build_quotient_with_classes(n, ordered);
    let independent = basis
        .relations
        .pivots()
        .iter()
        .filter(|&&p| p >= split)
        .count();
    (cb_count, independent)
}

/// Stable dimensions `[dim A^0, ..., dim A^maxN]` of the quotient algebra.
pub fn stable_dims(max_n: usize) -> Vec<usize> {
    (0..=max_n).map(|n| build_quotient(n).stable_dim()).collect()
}
