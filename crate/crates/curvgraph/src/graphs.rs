//! Colored trivalent graphs: black cycle partition plus a red perfect
//! matching on the vertices, stored in a canonical labeling.
//!
//! A graph of degree `n` has `2n` vertices. Every vertex carries two black
//! flags and one red flag; the black subgraph is a disjoint union of cycles
//! (a 1-cycle is a black loop, a 2-cycle a black double edge) and the red
//! edges form a fixpoint-free involution on the vertices.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::{Error, Result};

/// A colored trivalent graph in canonical form.
///
/// Canonical storage: black cycles are the consecutive label ranges
/// `[0..lens[0])`, `[lens[0]..lens[0]+lens[1])`, ... with `lens` ascending,
/// each cycle traversed in label order, and `red` is the lexicographically
/// minimal involution array achievable by any relabeling that preserves the
/// black structure.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ColoredGraph {
    n: u32,
    lens: Vec<u32>,
    red: Vec<u32>,
    canonical: bool,
}

impl PartialOrd for ColoredGraph {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ColoredGraph {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.lens.cmp(&other.lens))
            .then_with(|| self.red.cmp(&other.red))
    }
}

/// Cycle counts of the black subgraph and connectivity data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphStats {
    /// Degree.
    pub n: usize,
    /// Black cycles of even length.
    pub e: usize,
    /// Black cycles of length greater than 2.
    pub g: usize,
    /// Black cycles of length at most 2.
    pub s: usize,
    /// Connected components of the whole colored graph.
    pub components: usize,
    /// True iff the black subgraph is a single cycle.
    pub black_connected: bool,
}

impl ColoredGraph {
    /// The empty graph, unit of the disjoint-union monoid.
    pub fn empty() -> Self {
        ColoredGraph {
            n: 0,
            lens: Vec::new(),
            red: Vec::new(),
            canonical: true,
        }
    }

    /// Validate and canonicalize a graph given by black cycles and a red
    /// matching (as an involution array).
    pub fn build(cycles: &[Vec<u32>], red: &[u32]) -> Result<Self> {
        let nv: usize = cycles.iter().map(|c| c.len()).sum();
        if nv % 2 != 0 {
            return Err(Error::Validation("odd number of vertices".into()));
        }
        if red.len() != nv {
            return Err(Error::Validation(format!(
                "red involution has length {} for {} vertices",
                red.len(),
                nv
            )));
        }
        let mut seen = vec![false; nv];
        for c in cycles {
            if c.is_empty() {
                return Err(Error::Validation("empty black cycle".into()));
            }
            for &v in c {
                let v = v as usize;
                if v >= nv {
                    return Err(Error::Validation(format!("vertex {v} out of range")));
                }
                if seen[v] {
                    return Err(Error::Validation(format!("vertex {v} appears twice")));
                }
                seen[v] = true;
            }
        }
        for v in 0..nv {
            let w = red[v] as usize;
            if w >= nv || red[w] as usize != v {
                return Err(Error::Validation("red matching is not an involution".into()));
            }
            if w == v {
                return Err(Error::Validation(format!("red fixed point at vertex {v}")));
            }
        }
        let (lens, red, _) = canonicalize(cycles, red);
        Ok(ColoredGraph {
            n: (nv / 2) as u32,
            lens,
            red,
            canonical: true,
        })
    }

    /// Build from a red matching given as vertex pairs.
    pub fn build_from_pairs(cycles: &[Vec<u32>], pairs: &[(u32, u32)]) -> Result<Self> {
        let nv: usize = cycles.iter().map(|c| c.len()).sum();
        let mut red = vec![u32::MAX; nv];
        for &(a, b) in pairs {
            if a as usize >= nv || b as usize >= nv {
                return Err(Error::Validation("red pair out of range".into()));
            }
            if a == b {
                return Err(Error::Validation("red loop".into()));
            }
            if red[a as usize] != u32::MAX || red[b as usize] != u32::MAX {
                return Err(Error::Validation("vertex in two red pairs".into()));
            }
            red[a as usize] = b;
            red[b as usize] = a;
        }
        if red.iter().any(|&x| x == u32::MAX) {
            return Err(Error::Validation("red matching not perfect".into()));
        }
        ColoredGraph::build(cycles, &red)
    }

    /// Degree `n` (half the vertex count).
    pub fn degree(&self) -> usize {
        self.n as usize
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    /// Black cycle lengths, ascending.
    pub fn cycle_lens(&self) -> &[u32] {
        &self.lens
    }

    /// Black cycles as vertex sequences in canonical labeling.
    pub fn black_cycles(&self) -> Vec<Vec<u32>> {
        let mut out = Vec::with_capacity(self.lens.len());
        let mut base = 0;
        for &l in &self.lens {
            out.push((base..base + l).collect());
            base += l;
        }
        out
    }

    /// Red involution on vertices.
    pub fn red_match(&self) -> &[u32] {
        &self.red
    }

    /// Red edges as sorted vertex pairs.
    pub fn red_pairs(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.n as usize);
        for v in 0..self.red.len() as u32 {
            let w = self.red[v as usize];
            if v < w {
                out.push((v, w));
            }
        }
        out
    }

    /// Byte encoding; equal bytes iff isomorphic.
    pub fn canonical_form(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + self.lens.len() + self.red.len());
        out.extend_from_slice(&self.n.to_be_bytes());
        out.push(self.lens.len() as u8);
        for &l in &self.lens {
            out.push(l as u8);
        }
        for &r in &self.red {
            out.push(r as u8);
        }
        out
    }

    /// Inverse of `canonical_form`.
    pub fn from_canonical_form(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 5 {
            return Err(Error::Parse("short graph encoding".into()));
        }
        let n = u32::from_be_bytes(bytes[0..4].try_into().unwrap());
        let k = bytes[4] as usize;
        if bytes.len() != 5 + k + 2 * n as usize {
            return Err(Error::Parse("bad graph encoding length".into()));
        }
        let lens: Vec<u32> = bytes[5..5 + k].iter().map(|&b| b as u32).collect();
        let red: Vec<u32> = bytes[5 + k..].iter().map(|&b| b as u32).collect();
        let cycles: Vec<Vec<u32>> = {
            let mut out = Vec::new();
            let mut base = 0;
            for &l in &lens {
                out.push((base..base + l).collect());
                base += l;
            }
            out
        };
        ColoredGraph::build(&cycles, &red)
    }

    /// Cycle counts of the black subgraph.
    pub fn stats(&self) -> GraphStats {
        let e = self.lens.iter().filter(|&&l| l % 2 == 0).count();
        let g = self.lens.iter().filter(|&&l| l > 2).count();
        let s = self.lens.iter().filter(|&&l| l <= 2).count();
        GraphStats {
            n: self.n as usize,
            e,
            g,
            s,
            components: self.component_ids().1,
            black_connected: self.lens.len() == 1 || self.n == 0,
        }
    }

    /// Flag automorphism group orders `(aut_flag, aut0, aut_bar)`.
    ///
    /// `aut_bar` counts vertex permutations preserving the black adjacency
    /// multiset and the red matching; `aut0 = 2^s` counts trivial
    /// automorphisms swapping the two flags of a black loop or the two
    /// parallel edges of a black double edge.
    pub fn automorphisms(&self) -> (u64, u64, u64) {
        if self.n == 0 {
            return (1, 1, 1);
        }
        let (_, _, aut_bar) = canonicalize(&self.black_cycles(), &self.red);
        let s = self.lens.iter().filter(|&&l| l <= 2).count() as u32;
        let aut0 = 1u64 << s;
        (aut0 * aut_bar, aut0, aut_bar)
    }

    /// Component id per vertex and the component count.
    fn component_ids(&self) -> (Vec<usize>, usize) {
        let nv = self.vertex_count();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        let unite = |p: &mut Vec<usize>, a: usize, b: usize| {
            let (ra, rb) = (find(p, a), find(p, b));
            if ra != rb {
                p[ra] = rb;
            }
        };
        let mut base = 0usize;
        for &l in &self.lens {
            for k in 1..l as usize {
                unite(&mut parent, base, base + k);
            }
            base += l as usize;
        }
        for v in 0..nv {
            let w = self.red[v] as usize;
            unite(&mut parent, v, w);
        }
        let mut ids = vec![usize::MAX; nv];
        let mut count = 0;
        for v in 0..nv {
            let r = find(&mut parent, v);
            if ids[r] == usize::MAX {
                ids[r] = count;
                count += 1;
            }
        }
        let out = (0..nv).map(|v| ids[find(&mut parent, v)]).collect();
        (out, count)
    }

    /// Connected components as canonical graphs (with multiplicity).
    pub fn components(&self) -> Vec<ColoredGraph> {
        if self.n == 0 {
            return Vec::new();
        }
        let (ids, count) = self.component_ids();
        let mut out = Vec::with_capacity(count);
        for c in 0..count {
            let verts: Vec<u32> = (0..self.vertex_count() as u32)
                .filter(|&v| ids[v as usize] == c)
                .collect();
            let mut relabel = vec![u32::MAX; self.vertex_count()];
            for (i, &v) in verts.iter().enumerate() {
                relabel[v as usize] = i as u32;
            }
            let cycles: Vec<Vec<u32>> = self
                .black_cycles()
                .into_iter()
                .filter(|cy| ids[cy[0] as usize] == c)
                .map(|cy| cy.iter().map(|&v| relabel[v as usize]).collect())
                .collect();
            let red: Vec<u32> = verts
                .iter()
                .map(|&v| relabel[self.red[v as usize] as usize])
                .collect();
            out.push(ColoredGraph::build(&cycles, &red).expect("component is valid"));
        }
        out.sort();
        out
    }

    /// Disjoint union, canonicalized; degrees add.
    pub fn disjoint_union(&self, other: &ColoredGraph) -> ColoredGraph {
        if self.n == 0 {
            return other.clone();
        }
        if other.n == 0 {
            return self.clone();
        }
        let shift = self.vertex_count() as u32;
        let mut cycles = self.black_cycles();
        for cy in other.black_cycles() {
            cycles.push(cy.iter().map(|&v| v + shift).collect());
        }
        let mut red = self.red.clone();
        red.extend(other.red.iter().map(|&v| v + shift));
        ColoredGraph::build(&cycles, &red).expect("union of valid graphs is valid")
    }

    /// Graph text format `c=[[..],[..]];r=[[a,b],..]`.
    pub fn to_text(&self) -> String {
        let cycles: Vec<String> = self
            .black_cycles()
            .iter()
            .map(|cy| {
                let inner: Vec<String> = cy.iter().map(|v| v.to_string()).collect();
                format!("[{}]", inner.join(","))
            })
            .collect();
        let pairs: Vec<String> = self
            .red_pairs()
            .iter()
            .map(|(a, b)| format!("[{a},{b}]"))
            .collect();
        format!("c=[{}];r=[{}]", cycles.join(","), pairs.join(","))
    }

    /// Parse the graph text format (whitespace-insensitive).
    pub fn parse(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let rest = s
            .strip_prefix("c=")
            .ok_or_else(|| Error::Parse("expected `c=`".into()))?;
        let (cpart, rpart) = rest
            .split_once(";r=")
            .ok_or_else(|| Error::Parse("expected `;r=`".into()))?;
        let cycles = parse_nested_lists(cpart)?;
        let pairs_lists = parse_nested_lists(rpart)?;
        let mut pairs = Vec::with_capacity(pairs_lists.len());
        for p in &pairs_lists {
            if p.len() != 2 {
                return Err(Error::Parse("red pair must have two vertices".into()));
            }
            pairs.push((p[0], p[1]));
        }
        ColoredGraph::build_from_pairs(&cycles, &pairs)
    }
}

impl fmt::Debug for ColoredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Display for ColoredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

fn parse_nested_lists(s: &str) -> Result<Vec<Vec<u32>>> {
    let inner = s
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected [..] in `{s}`")))?;
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in inner.chars() {
        match ch {
            '[' => {
                depth += 1;
                if depth > 1 {
                    return Err(Error::Parse("nesting too deep".into()));
                }
                cur.clear();
            }
            ']' => {
                if depth == 0 {
                    return Err(Error::Parse("unbalanced brackets".into()));
                }
                depth -= 1;
                let items: Result<Vec<u32>> = cur
                    .split(',')
                    .filter(|t| !t.is_empty())
                    .map(|t| {
                        t.parse::<u32>()
                            .map_err(|_| Error::Parse(format!("bad vertex `{t}`")))
                    })
                    .collect();
                out.push(items?);
            }
            ',' if depth == 0 => {}
            _ if depth == 1 => cur.push(ch),
            _ => return Err(Error::Parse(format!("unexpected `{ch}`"))),
        }
    }
    if depth != 0 {
        return Err(Error::Parse("unbalanced brackets".into()));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Canonical labeling.
// ---------------------------------------------------------------------------

/// Find the lexicographically minimal `(cycle lengths ascending, red array)`
/// over all relabelings preserving the black cycle structure, and count the
/// relabelings achieving the minimum (the pure automorphism group order).
///
/// Relabelings are parametrized by an assignment of original cycles to
/// length-sorted slots plus a rotation (and for cycles of length >= 3 a
/// reflection) of each; this parametrization is in bijection with the vertex
/// permutations preserving black adjacency.
pub(crate) fn canonicalize(cycles: &[Vec<u32>], red: &[u32]) -> (Vec<u32>, Vec<u32>, u64) {
    let nv = red.len();
    if nv == 0 {
        return (Vec::new(), Vec::new(), 1);
    }
    let mut order: Vec<usize> = (0..cycles.len()).collect();
    order.sort_by_key(|&i| cycles[i].len());
    let lens: Vec<u32> = order.iter().map(|&i| cycles[i].len() as u32).collect();

    struct Search<'a> {
        cycles: &'a [Vec<u32>],
        red: &'a [u32],
        lens: Vec<usize>,
        slot_base: Vec<usize>,
        nv: usize,
        new_label: Vec<u32>,
        old_of: Vec<u32>,
        used: Vec<bool>,
        best: Option<Vec<u32>>,
        best_count: u64,
    }

    impl<'a> Search<'a> {
        /// Compare the partially determined red array against the best.
        /// Returns Less/Equal/Greater where Less means strictly better,
        /// Greater means prunable; Equal covers both ties and undecidable.
        fn partial_cmp_best(&self, assigned: usize) -> Ordering {
            let best = match &self.best {
                Some(b) => b,
                None => return Ordering::Equal,
            };
            for i in 0..self.nv {
                let old = if i < assigned {
                    self.old_of[i]
                } else {
                    return Ordering::Equal;
                };
                let partner = self.red[old as usize];
                let lbl = self.new_label[partner as usize];
                if lbl == u32::MAX {
                    // undetermined, eventual value >= assigned
                    if best[i] < assigned as u32 {
                        return Ordering::Greater;
                    }
                    return Ordering::Equal;
                }
                match lbl.cmp(&best[i]) {
                    Ordering::Less => return Ordering::Less,
                    Ordering::Greater => return Ordering::Greater,
                    Ordering::Equal => {}
                }
            }
            Ordering::Equal
        }

        fn place(&mut self, slot: usize) {
            if slot == self.lens.len() {
                let cand: Vec<u32> = (0..self.nv)
                    .map(|i| {
                        let old = self.old_of[i];
                        self.new_label[self.red[old as usize] as usize]
                    })
                    .collect();
                match &self.best {
                    None => {
                        self.best = Some(cand);
                        self.best_count = 1;
                    }
                    Some(b) => match cand.cmp(b) {
                        Ordering::Less => {
                            self.best = Some(cand);
                            self.best_count = 1;
                        }
                        Ordering::Equal => self.best_count += 1,
                        Ordering::Greater => {}
                    },
                }
                return;
            }
            let base = self.slot_base[slot];
            let want = self.lens[slot];
            for ci in 0..self.cycles.len() {
                if self.used[ci] || self.cycles[ci].len() != want {
                    continue;
                }
                let dirs: &[i64] = if want >= 3 { &[1, -1] } else { &[1] };
                for start in 0..want {
                    for &dir in dirs {
                        self.used[ci] = true;
                        for k in 0..want {
                            let idx =
                                ((start as i64 + dir * k as i64).rem_euclid(want as i64)) as usize;
                            let old = self.cycles[ci][idx];
                            self.new_label[old as usize] = (base + k) as u32;
                            self.old_of[base + k] = old;
                        }
                        if self.partial_cmp_best(base + want) != Ordering::Greater {
                            self.place(slot + 1);
                        }
                        for k in 0..want {
                            let old = self.old_of[base + k];
                            self.new_label[old as usize] = u32::MAX;
                        }
                        self.used[ci] = false;
                    }
                }
            }
        }
    }

    let lens_usize: Vec<usize> = lens.iter().map(|&l| l as usize).collect();
    let mut slot_base = Vec::with_capacity(lens_usize.len());
    let mut acc = 0usize;
    for &l in &lens_usize {
        slot_base.push(acc);
        acc += l;
    }
    let mut search = Search {
        cycles,
        red,
        lens: lens_usize,
        slot_base,
        nv,
        new_label: vec![u32::MAX; nv],
        old_of: vec![u32::MAX; nv],
        used: vec![false; cycles.len()],
        best: None,
        best_count: 0,
    };
    search.place(0);
    (lens, search.best.expect("nonempty graph"), search.best_count)
}

// ---------------------------------------------------------------------------
// Flag-level view for rewrites (IHX reattachment, red-edge contraction).
// ---------------------------------------------------------------------------

/// Flag-level picture of the black structure: vertex `v` owns flags `2v`
/// and `2v+1`; `theta` is the black edge involution on flags and `at` the
/// attachment map. Rewrites mutate `at` or contract vertices, then rebuild
/// cycles by walking.
#[derive(Clone, Debug)]
pub(crate) struct FlagView {
    pub at: Vec<u32>,
    pub theta: Vec<u32>,
    pub red: Vec<u32>,
}

impl FlagView {
    pub fn of(g: &ColoredGraph) -> FlagView {
        let nv = g.vertex_count();
        let mut theta = vec![u32::MAX; 2 * nv];
        for cy in g.black_cycles() {
            let l = cy.len();
            if l == 1 {
                let v = cy[0];
                theta[(2 * v) as usize] = 2 * v + 1;
                theta[(2 * v + 1) as usize] = 2 * v;
            } else {
                for k in 0..l {
                    let v = cy[k];
                    let w = cy[(k + 1) % l];
                    // the "next" flag of v meets the "prev" flag of w
                    theta[(2 * v + 1) as usize] = 2 * w;
                    theta[(2 * w) as usize] = 2 * v + 1;
                }
            }
        }
        let at = (0..2 * nv as u32).map(|f| f / 2).collect();
        FlagView {
            at,
            theta,
            red: g.red.clone(),
        }
    }

    /// Rebuild `(cycles, red)` from the flag structure and canonicalize.
    /// Flags of a vertex are those with `at[f] == v` (exactly two).
    pub fn to_graph(&self) -> ColoredGraph {
        let nv = self.red.len();
        let mut flags_of: Vec<Vec<u32>> = vec![Vec::new(); nv];
        for (f, &v) in self.at.iter().enumerate() {
            if v != u32::MAX {
                flags_of[v as usize].push(f as u32);
            }
        }
        for fl in &flags_of {
            debug_assert_eq!(fl.len(), 2, "vertex must carry two black flags");
        }
        let mut visited = vec![false; nv];
        let mut cycles = Vec::new();
        for v0 in 0..nv {
            if visited[v0] {
                continue;
            }
            let mut cycle = vec![v0 as u32];
            visited[v0] = true;
            let enter0 = flags_of[v0][0];
            let mut leave = flags_of[v0][1];
            loop {
                let g = self.theta[leave as usize];
                let w = self.at[g as usize];
                if w as usize == v0 && g == enter0 {
                    break;
                }
                debug_assert!(!visited[w as usize], "walk revisited a vertex");
                visited[w as usize] = true;
                cycle.push(w);
                let fl = &flags_of[w as usize];
                leave = if fl[0] == g { fl[1] } else { fl[0] };
            }
            cycles.push(cycle);
        }
        ColoredGraph::build(&cycles, &self.red).expect("rewrite produced a valid graph")
    }
}

/// The three reattachment configurations of the four black flags around the
/// red edge `{u, v}`: same-vertex (the original graph), and the two cross
/// pairings. Returned as canonical graphs `(gamma_i, gamma_h, gamma_x)`.
pub(crate) fn reattach_configs(
    g: &ColoredGraph,
    u: u32,
    v: u32,
) -> (ColoredGraph, ColoredGraph, ColoredGraph) {
    debug_assert_eq!(g.red[u as usize], v);
    let base = FlagView::of(g);
    let make = |swap: Option<(u32, u32)>| -> ColoredGraph {
        let mut fv = base.clone();
        if let Some((p, q)) = swap {
            fv.at.swap(p as usize, q as usize);
        }
        fv.to_graph()
    };
    let (b, c, d) = (2 * u + 1, 2 * v, 2 * v + 1);
    (make(None), make(Some((b, c))), make(Some((b, d))))
}

/// Delete the red edge `{u, v}` together with both vertices, joining the
/// adjacent black flags in the listed pairs (flags drawn from
/// `{2u, 2u+1, 2v, 2v+1}`; flags of the deleted vertices not mentioned in
/// any pair vanish with their black edge). Joins are processed in order so
/// chains through the deleted vertices resolve; a join whose flags are
/// already black partners closes a vertexless circle. Returns the canonical
/// graph on the remaining vertices and the circle count.
pub(crate) fn contract_red_edge(
    g: &ColoredGraph,
    u: u32,
    v: u32,
    pairing: &[(u32, u32)],
) -> (ColoredGraph, usize) {
    debug_assert_eq!(g.red[u as usize], v);
    let mut fv = FlagView::of(g);
    let mut circles = 0usize;
    for &(p, q) in pairing {
        let a = fv.theta[p as usize];
        if a == q {
            circles += 1;
            continue;
        }
        let b = fv.theta[q as usize];
        fv.theta[a as usize] = b;
        fv.theta[b as usize] = a;
    }
    // drop u, v and relabel the rest
    let nv = g.vertex_count();
    let mut relabel = vec![u32::MAX; nv];
    let mut next = 0u32;
    for w in 0..nv as u32 {
        if w != u && w != v {
            relabel[w as usize] = next;
            next += 1;
        }
    }
    let keep_flag = |f: u32| fv.at[f as usize] != u && fv.at[f as usize] != v;
    let mut at = Vec::new();
    let mut theta_pairs = Vec::new();
    let mut flag_relabel = vec![u32::MAX; 2 * nv];
    for f in 0..2 * nv as u32 {
        if keep_flag(f) {
            flag_relabel[f as usize] = at.len() as u32;
            at.push(relabel[fv.at[f as usize] as usize]);
        }
    }
    for f in 0..2 * nv as u32 {
        if keep_flag(f) {
            let g2 = fv.theta[f as usize];
            debug_assert!(keep_flag(g2));
            theta_pairs.push((flag_relabel[f as usize], flag_relabel[g2 as usize]));
        }
    }
    let mut theta = vec![u32::MAX; at.len()];
    for (a, b) in theta_pairs {
        theta[a as usize] = b;
    }
    let red: Vec<u32> = (0..nv as u32)
        .filter(|&w| w != u && w != v)
        .map(|w| relabel[g.red[w as usize] as usize])
        .collect();
    let out = FlagView { at, theta, red };
    (out.to_graph(), circles)
}

// ---------------------------------------------------------------------------
// Enumeration.
// ---------------------------------------------------------------------------

fn partitions_of(total: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if total == 0 {
        out.push(prefix.clone());
        return;
    }
    for part in (1..=max_part.min(total)).rev() {
        prefix.push(part);
        partitions_of(total - part, part, prefix, out);
        prefix.pop();
    }
}

fn perfect_matchings(verts: &[u32]) -> Vec<Vec<(u32, u32)>> {
    if verts.is_empty() {
        return vec![Vec::new()];
    }
    let a = verts[0];
    let mut out = Vec::new();
    for k in 1..verts.len() {
        let b = verts[k];
        let rest: Vec<u32> = verts[1..]
            .iter()
            .copied()
            .filter(|&v| v != b)
            .collect();
        for mut m in perfect_matchings(&rest) {
            m.push((a, b));
            out.push(m);
        }
    }
    out
}

/// All isomorphism classes of degree `n`, one canonical representative per
/// class, sorted by canonical encoding. With `connected_black_only` only
/// classes whose black subgraph is a single cycle are produced.
pub fn enumerate_degree(n: usize, connected_black_only: bool) -> Vec<ColoredGraph> {
    if n == 0 {
        return vec![ColoredGraph::empty()];
    }
    let nv = 2 * n as u32;
    let mut types = Vec::new();
    if connected_black_only {
        types.push(vec![nv]);
    } else {
        let mut prefix = Vec::new();
        partitions_of(nv, nv, &mut prefix, &mut types);
    }
    let verts: Vec<u32> = (0..nv).collect();
    let matchings = perfect_matchings(&verts);
    let mut classes: BTreeSet<ColoredGraph> = BTreeSet::new();
    for ty in &types {
        let mut cycles = Vec::with_capacity(ty.len());
        let mut base = 0u32;
        for &l in ty {
            cycles.push((base..base + l).collect::<Vec<u32>>());
            base += l;
        }
        for m in &matchings {
            let g = ColoredGraph::build_from_pairs(&cycles, m).expect("enumeration input valid");
            classes.insert(g);
        }
    }
    classes.into_iter().collect()
}

// ---------------------------------------------------------------------------
// Extended graphs with tetravalent vertices.
// ---------------------------------------------------------------------------

/// Reference to a black flag of an extended graph: trivalent vertex `v` owns
/// flags `2v`, `2v+1`; tetravalent vertex `t` owns flags `B+4t .. B+4t+3`
/// where `B` is twice the trivalent vertex count.
pub type ExtFlag = u32;

/// Graph with trivalent vertices (one red flag each, paired by `tri_red`)
/// and tetravalent vertices carrying four black flags decorated by an
/// ordered quadruple modulo the Klein four-group; orientation reversals are
/// folded into `sign`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ExtGraph {
    tri_count: u32,
    tetra_count: u32,
    /// Red involution on trivalent vertices.
    tri_red: Vec<u32>,
    /// Black involution on all flags.
    black: Vec<ExtFlag>,
    /// Normalized flag quadruple per tetravalent vertex.
    quads: Vec<[ExtFlag; 4]>,
}

const KLEIN: [[usize; 4]; 4] = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]];

/// Minimum of a quadruple over the Klein four-group images.
fn klein_min(q: [ExtFlag; 4]) -> [ExtFlag; 4] {
    KLEIN
        .iter()
        .map(|p| [q[p[0]], q[p[1]], q[p[2]], q[p[3]]])
        .min()
        .unwrap()
}

/// Normalize a quadruple modulo Klein images and orientation flips: returns
/// the lexicographic minimum over all eight images together with the sign
/// (+1 when reached by a Klein element, -1 through an orientation flip).
pub fn normalize_quadruple(q: [ExtFlag; 4]) -> ([ExtFlag; 4], i8) {
    let same = klein_min(q);
    let flipped = klein_min([q[1], q[0], q[2], q[3]]);
    if same <= flipped {
        (same, 1)
    } else {
        (flipped, -1)
    }
}

impl ExtGraph {
    /// Degree: half the flag count minus the vertex count, i.e. tetravalent
    /// vertices count twice.
    pub fn degree(&self) -> usize {
        (self.tri_count as usize + 2 * self.tetra_count as usize) / 2
    }

    pub fn tri_count(&self) -> usize {
        self.tri_count as usize
    }

    pub fn tetra_count(&self) -> usize {
        self.tetra_count as usize
    }

    pub fn tri_red(&self) -> &[u32] {
        &self.tri_red
    }

    pub fn black(&self) -> &[ExtFlag] {
        &self.black
    }

    pub fn quads(&self) -> &[[ExtFlag; 4]] {
        &self.quads
    }

    pub fn flag_count(&self) -> usize {
        2 * self.tri_count as usize + 4 * self.tetra_count as usize
    }

    /// Owner vertex encoding of a flag: trivalent `(false, v)`,
    /// tetravalent `(true, t)`.
    pub fn flag_owner(&self, f: ExtFlag) -> (bool, u32) {
        let b = 2 * self.tri_count;
        if f < b {
            (false, f / 2)
        } else {
            (true, (f - b) / 4)
        }
    }

    /// Validate and normalize. `quads` lists, for every tetravalent vertex,
    /// its own four flags in decoration order; the returned sign accumulates
    /// the orientation flips used in normalization.
    pub fn build(
        tri_red: Vec<u32>,
        black: Vec<ExtFlag>,
        quads: Vec<[ExtFlag; 4]>,
    ) -> Result<(ExtGraph, i8)> {
        let tri_count = tri_red.len() as u32;
        let tetra_count = quads.len() as u32;
        let nf = 2 * tri_count as usize + 4 * tetra_count as usize;
        if black.len() != nf {
            return Err(Error::Validation("black involution length mismatch".into()));
        }
        for f in 0..nf {
            let g = black[f] as usize;
            if g >= nf || black[g] as usize != f || g == f {
                return Err(Error::Validation(
                    "black flags must pair via a fixpoint-free involution".into(),
                ));
            }
        }
        for v in 0..tri_count as usize {
            let w = tri_red[v] as usize;
            if w >= tri_count as usize || tri_red[w] as usize != v || w == v {
                return Err(Error::Validation("red matching invalid".into()));
            }
        }
        let mut sign = 1i8;
        let mut normed = Vec::with_capacity(quads.len());
        for (t, q) in quads.iter().enumerate() {
            let base = 2 * tri_count + 4 * t as u32;
            let mut own: Vec<ExtFlag> = q.to_vec();
            own.sort_unstable();
            let expect: Vec<ExtFlag> = (base..base + 4).collect();
            if own != expect {
                return Err(Error::Validation(format!(
                    "decoration of tetravalent vertex {t} must list its own four flags"
                )));
            }
            let (nq, s) = normalize_quadruple(*q);
            sign *= s;
            normed.push(nq);
        }
        Ok((
            ExtGraph {
                tri_count,
                tetra_count,
                tri_red,
                black,
                quads: normed,
            },
            sign,
        ))
    }

    /// Canonical form over vertex relabelings (trivalent and tetravalent
    /// separately); the returned sign tracks orientation flips picked up by
    /// re-normalizing decorations. Exhaustive search, intended for the desk
    /// scale sizes in this crate.
    pub fn canonicalize(&self) -> (ExtGraph, i8) {
        let tri = self.tri_count as usize;
        let tet = self.tetra_count as usize;
        let mut best: Option<(ExtGraph, i8)> = None;
        let tri_perms = permutations(tri);
        let tet_perms = permutations(tet);
        for tp in &tri_perms {
            for qp in &tet_perms {
                let (cand, sign) = self.relabeled(tp, qp);
                match &best {
                    None => best = Some((cand, sign)),
                    Some((b, _)) => {
                        if cand < *b {
                            best = Some((cand, sign));
                        }
                    }
                }
            }
        }
        best.unwrap_or_else(|| (self.clone(), 1))
    }

    fn relabeled(&self, tri_perm: &[usize], tet_perm: &[usize]) -> (ExtGraph, i8) {
        let b = 2 * self.tri_count;
        let map_flag = |f: ExtFlag| -> ExtFlag {
            if f < b {
                let v = (f / 2) as usize;
                2 * tri_perm[v] as u32 + (f % 2)
            } else {
                let t = ((f - b) / 4) as usize;
                b + 4 * tet_perm[t] as u32 + ((f - b) % 4)
            }
        };
        let mut tri_red = vec![0u32; self.tri_count as usize];
        for v in 0..self.tri_count as usize {
            tri_red[tri_perm[v]] = tri_perm[self.tri_red[v] as usize] as u32;
        }
        let nf = self.flag_count();
        let mut black = vec![0u32; nf];
        for f in 0..nf as u32 {
            black[map_flag(f) as usize] = map_flag(self.black[f as usize]);
        }
        let mut quads = vec![[0u32; 4]; self.tetra_count as usize];
        let mut sign = 1i8;
        for t in 0..self.tetra_count as usize {
            let q = self.quads[t];
            let mapped = [
                map_flag(q[0]),
                map_flag(q[1]),
                map_flag(q[2]),
                map_flag(q[3]),
            ];
            let (nq, s) = normalize_quadruple(mapped);
            sign *= s;
            quads[tet_perm[t]] = nq;
        }
        (
            ExtGraph {
                tri_count: self.tri_count,
                tetra_count: self.tetra_count,
                tri_red,
                black,
                quads,
            },
            sign,
        )
    }

    /// Convert an extended graph without tetravalent vertices into an
    /// ordinary colored graph.
    pub fn to_colored(&self) -> Result<ColoredGraph> {
        if self.tetra_count != 0 {
            return Err(Error::Unsupported(
                "graph still has tetravalent vertices".into(),
            ));
        }
        let fv = FlagView {
            at: (0..self.flag_count() as u32).map(|f| f / 2).collect(),
            theta: self.black.clone(),
            red: self.tri_red.clone(),
        };
        Ok(fv.to_graph())
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    permute_rec(&mut cur, 0, &mut out);
    out
}

fn permute_rec(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == cur.len() {
        out.push(cur.clone());
        return;
    }
    for i in k..cur.len() {
        cur.swap(k, i);
        permute_rec(cur, k + 1, out);
        cur.swap(k, i);
    }
}

// ---------------------------------------------------------------------------
// Named small graphs used throughout.
// ---------------------------------------------------------------------------

/// Theta: one black 2-cycle, red edge between its vertices.
pub fn theta() -> ColoredGraph {
    ColoredGraph::build_from_pairs(&[vec![0, 1]], &[(0, 1)]).unwrap()
}

/// Dumbbell: two black loops joined by a red edge.
pub fn dumbbell() -> ColoredGraph {
    ColoredGraph::build_from_pairs(&[vec![0], vec![1]], &[(0, 1)]).unwrap()
}

/// Black 4-cycle with red edges parallel to black ones.
pub fn square_parallel() -> ColoredGraph {
    ColoredGraph::build_from_pairs(&[vec![0, 1, 2, 3]], &[(0, 1), (2, 3)]).unwrap()
}

/// Black 4-cycle with antipodal red edges.
pub fn square_crossed() -> ColoredGraph {
    ColoredGraph::build_from_pairs(&[vec![0, 1, 2, 3]], &[(0, 2), (1, 3)]).unwrap()
}

/// Ladder: two black double edges joined crosswise by red edges.
pub fn ladder() -> ColoredGraph {
    ColoredGraph::build_from_pairs(&[vec![0, 1], vec![2, 3]], &[(0, 2), (1, 3)]).unwrap()
}
