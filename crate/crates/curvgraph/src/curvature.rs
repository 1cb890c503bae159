//! Numeric algebraic and sectional curvature tensors over an orthonormal
//! frame. The metric is the identity, so raising and lowering indices is
//! free; all components are 64-bit floats.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::{Error, Result};

/// Tensor kind: algebraic (antisymmetric pairs, first Bianchi) or sectional
/// (symmetric pairs, vanishing on the full diagonal).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Algebraic,
    Sectional,
}

/// Dense rank-4 tensor of components in an orthonormal frame, row-major
/// index order `(i, j, k, l)`.
#[derive(Clone, Debug)]
pub struct CurvModel {
    pub m: usize,
    pub kind: Kind,
    comp: Vec<f64>,
}

/// Dense symmetric bilinear form.
#[derive(Clone, Debug)]
pub struct SymForm {
    pub m: usize,
    comp: Vec<f64>,
}

impl SymForm {
    pub fn zeros(m: usize) -> Self {
        SymForm {
            m,
            comp: vec![0.0; m * m],
        }
    }

    pub fn identity(m: usize) -> Self {
        let mut a = SymForm::zeros(m);
        for i in 0..m {
            a.set(i, i, 1.0);
        }
        a
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.comp[i * self.m + j]
    }

    /// Sets both `(i,j)` and `(j,i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.comp[i * self.m + j] = v;
        self.comp[j * self.m + i] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.m).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, c: f64) -> SymForm {
        SymForm {
            m: self.m,
            comp: self.comp.iter().map(|x| c * x).collect(),
        }
    }

    pub fn add(&self, other: &SymForm) -> SymForm {
        assert_eq!(self.m, other.m);
        SymForm {
            m: self.m,
            comp: self
                .comp
                .iter()
                .zip(&other.comp)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.comp.iter().fold(0.0, |a, b| a.max(b.abs()))
    }
}

/// `g_{Sym^2}(a, b) = 1/2 sum a b` componentwise.
pub fn sym_inner(a: &SymForm, b: &SymForm) -> f64 {
    assert_eq!(a.m, b.m);
    0.5 * a
        .comp
        .iter()
        .zip(&b.comp)
        .map(|(x, y)| x * y)
        .sum::<f64>()
}

/// `|a|^2` in the symmetric-form convention.
pub fn sym_norm_sq(a: &SymForm) -> f64 {
    sym_inner(a, a)
}

impl CurvModel {
    pub fn zeros(m: usize, kind: Kind) -> Self {
        CurvModel {
            m,
            kind,
            comp: vec![0.0; m * m * m * m],
        }
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.m + j) * self.m + k) * self.m + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.comp[self.idx(i, j, k, l)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let ix = self.idx(i, j, k, l);
        self.comp[ix] = v;
    }

    pub fn comp(&self) -> &[f64] {
        &self.comp
    }

    pub fn max_abs(&self) -> f64 {
        self.comp.iter().fold(0.0, |a, b| a.max(b.abs()))
    }

    pub fn add(&self, other: &CurvModel) -> CurvModel {
        assert_eq!(self.m, other.m);
        assert_eq!(self.kind, other.kind);
        CurvModel {
            m: self.m,
            kind: self.kind,
            comp: self
                .comp
                .iter()
                .zip(&other.comp)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> CurvModel {
        CurvModel {
            m: self.m,
            kind: self.kind,
            comp: self.comp.iter().map(|x| c * x).collect(),
        }
    }

    /// Check the symmetries of the stored kind, each within
    /// `tol * max|comp|`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let m = self.m;
        let scale = self.max_abs().max(1e-300);
        let bound = tol * scale;
        let fail = |what: &str| -> Result<()> {
            Err(Error::Validation(format!("{what} violated beyond {bound:e}")))
        };
        match self.kind {
            Kind::Algebraic => {
                for i in 0..m {
                    for j in 0..m {
                        for k in 0..m {
                            for l in 0..m {
                                let r = self.get(i, j, k, l);
                                if (r + self.get(j, i, k, l)).abs() > bound
                                    || (r + self.get(i, j, l, k)).abs() > bound
                                {
                                    return fail("antisymmetry");
                                }
                                if (r - self.get(k, l, i, j)).abs() > bound {
                                    return fail("pair symmetry");
                                }
                                let b = r + self.get(j, k, i, l) + self.get(k, i, j, l);
                                if b.abs() > bound {
                                    return fail("first Bianchi identity");
                                }
                            }
                        }
                    }
                }
            }
            Kind::Sectional => {
                for i in 0..m {
                    for j in 0..m {
                        for k in 0..m {
                            for l in 0..m {
                                let s = self.get(i, j, k, l);
                                if (s - self.get(j, i, k, l)).abs() > bound
                                    || (s - self.get(i, j, l, k)).abs() > bound
                                    || (s - self.get(k, l, i, j)).abs() > bound
                                {
                                    return fail("pair symmetries");
                                }
                                let b = s + self.get(j, k, i, l) + self.get(k, i, j, l);
                                if b.abs() > bound {
                                    return fail("polarized S(X,X;X,V) = 0");
                                }
                            }
                        }
                        if self.get(i, i, i, j).abs() > bound {
                            return fail("S(X,X;X,V) = 0");
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Constant sectional curvature `c`:
/// `R[i,j,k,l] = -c (delta_ik delta_jl - delta_il delta_jk)`.
pub fn constant_model(m: usize, c: f64) -> Result<CurvModel> {
    if m < 2 {
        return Err(Error::Validation("constant model needs m >= 2".into()));
    }
    let mut r = CurvModel::zeros(m, Kind::Algebraic);
    for i in 0..m {
        for j in 0..m {
            if i != j {
                r.set(i, j, i, j, -c);
                r.set(i, j, j, i, c);
            }
        }
    }
    Ok(r)
}

/// Nomizu-Kulkarni product of symmetric forms; the result is algebraic.
pub fn nk_product(a: &SymForm, b: &SymForm) -> Result<CurvModel> {
    if a.m != b.m {
        return Err(Error::Validation("dimension mismatch".into()));
    }
    let m = a.m;
    let mut r = CurvModel::zeros(m, Kind::Algebraic);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let v = a.get(i, k) * b.get(j, l) - a.get(i, l) * b.get(j, k)
                        - a.get(j, k) * b.get(i, l)
                        + a.get(j, l) * b.get(i, k);
                    r.set(i, j, k, l, v);
                }
            }
        }
    }
    Ok(r)
}

/// Seeded sum of signed Nomizu-Kulkarni squares of random symmetric forms.
pub fn random_model(m: usize, terms: usize, seed: u64) -> CurvModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = CurvModel::zeros(m, Kind::Algebraic);
    for _ in 0..terms {
        let mut a = SymForm::zeros(m);
        for i in 0..m {
            for j in i..m {
                a.set(i, j, rng.gen_range(-1.0..1.0));
            }
        }
        let sign: f64 = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        r = r.add(&nk_product(&a, &a).expect("same dimension").scale(sign));
    }
    r
}

/// `Sec = Phi^+ R`: `Sec[i,j,k,l] = -2 (R[i,k,j,l] + R[i,l,j,k])`.
pub fn phi_plus(r: &CurvModel) -> Result<CurvModel> {
    if r.kind != Kind::Algebraic {
        return Err(Error::Validation("phi_plus expects an algebraic tensor".into()));
    }
    let m = r.m;
    let mut s = CurvModel::zeros(m, Kind::Sectional);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    s.set(i, j, k, l, -2.0 * (r.get(i, k, j, l) + r.get(i, l, j, k)));
                }
            }
        }
    }
    Ok(s)
}

/// `R = Phi^- S`: `R[i,j,k,l] = -(1/6)(S[i,k,j,l] - S[i,l,j,k])`.
pub fn phi_minus(s: &CurvModel) -> Result<CurvModel> {
    if s.kind != Kind::Sectional {
        return Err(Error::Validation("phi_minus expects a sectional tensor".into()));
    }
    let m = s.m;
    let mut r = CurvModel::zeros(m, Kind::Algebraic);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    r.set(
                        i,
                        j,
                        k,
                        l,
                        -(s.get(i, k, j, l) - s.get(i, l, j, k)) / 6.0,
                    );
                }
            }
        }
    }
    Ok(r)
}

/// Projection of a pair-symmetric quadrilinear form onto sectional
/// curvature tensors:
/// `6 (pr S)(X,Y;U,V) = 2S(X,Y;U,V) + 2S(U,V;X,Y) - S(X,U;Y,V)
///  - S(X,V;Y,U) - S(Y,U;X,V) - S(Y,V;X,U)`.
pub fn pr_sectional(s: &CurvModel) -> CurvModel {
    let m = s.m;
    let mut out = CurvModel::zeros(m, Kind::Sectional);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let v = 2.0 * s.get(i, j, k, l) + 2.0 * s.get(k, l, i, j)
                        - s.get(i, k, j, l)
                        - s.get(i, l, j, k)
                        - s.get(j, k, i, l)
                        - s.get(j, l, i, k);
                    out.set(i, j, k, l, v / 6.0);
                }
            }
        }
    }
    out
}

/// `Ric[j,k] = sum_i R[i,j,k,i]`.
pub fn ricci(r: &CurvModel) -> Result<SymForm> {
    if r.kind != Kind::Algebraic {
        return Err(Error::Validation("ricci expects an algebraic tensor".into()));
    }
    let m = r.m;
    let mut ric = SymForm::zeros(m);
    for j in 0..m {
        for k in j..m {
            let v: f64 = (0..m).map(|i| r.get(i, j, k, i)).sum();
            ric.set(j, k, v);
        }
    }
    Ok(ric)
}

pub fn scalar(r: &CurvModel) -> Result<f64> {
    Ok(ricci(r)?.trace())
}

/// Trace-free part of the Ricci tensor.
pub fn ricci_traceless(r: &CurvModel) -> Result<SymForm> {
    let ric = ricci(r)?;
    let kappa = ric.trace();
    let m = r.m as f64;
    Ok(ric.add(&SymForm::identity(r.m).scale(-kappa / m)))
}

/// `1/4 sum T S` componentwise (the rank-4 inner product).
pub fn curv_inner(a: &CurvModel, b: &CurvModel) -> f64 {
    assert_eq!(a.m, b.m);
    0.25 * a
        .comp
        .iter()
        .zip(&b.comp)
        .map(|(x, y)| x * y)
        .sum::<f64>()
}

/// `|T|^2 = 1/4 sum T^2` for rank-4 tensors of either kind.
pub fn curv_norm_sq(t: &CurvModel) -> f64 {
    curv_inner(t, t)
}

/// Block direct sum; zero on mixed indices.
pub fn direct_sum(a: &CurvModel, b: &CurvModel) -> Result<CurvModel> {
    if a.kind != Kind::Algebraic || b.kind != Kind::Algebraic {
        return Err(Error::Validation("direct_sum expects algebraic tensors".into()));
    }
    let m = a.m + b.m;
    let mut out = CurvModel::zeros(m, Kind::Algebraic);
    for i in 0..a.m {
        for j in 0..a.m {
            for k in 0..a.m {
                for l in 0..a.m {
                    out.set(i, j, k, l, a.get(i, j, k, l));
                }
            }
        }
    }
    for i in 0..b.m {
        for j in 0..b.m {
            for k in 0..b.m {
                for l in 0..b.m {
                    out.set(a.m + i, a.m + j, a.m + k, a.m + l, b.get(i, j, k, l));
                }
            }
        }
    }
    Ok(out)
}

/// Pad with `k` flat directions.
pub fn pad_flat(r: &CurvModel, k: usize) -> CurvModel {
    let zero = CurvModel::zeros(k, Kind::Algebraic);
    direct_sum(r, &zero).expect("padding is algebraic")
}

/// Pull back along an orthogonal frame change `f` (an `m x m` matrix):
/// `(f * R)[i,j,k,l] = sum R[a,b,c,d] f[a][i] f[b][j] f[c][k] f[d][l]`.
pub fn frame_change(r: &CurvModel, f: &[Vec<f64>]) -> CurvModel {
    let m = r.m;
    let mut out = CurvModel::zeros(m, r.kind);
    // contract one index at a time
    let mut cur = r.comp.clone();
    for slot in 0..4 {
        let mut next = vec![0.0; cur.len()];
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let dst = ((i * m + j) * m + k) * m + l;
                        let mut acc = 0.0;
                        for a in 0..m {
                            let src = match slot {
                                0 => ((a * m + j) * m + k) * m + l,
                                1 => ((i * m + a) * m + k) * m + l,
                                2 => ((i * m + j) * m + a) * m + l,
                                _ => ((i * m + j) * m + k) * m + a,
                            };
                            let fi = match slot {
                                0 => f[a][i],
                                1 => f[a][j],
                                2 => f[a][k],
                                _ => f[a][l],
                            };
                            acc += cur[src] * fi;
                        }
                        next[dst] = acc;
                    }
                }
            }
        }
        cur = next;
    }
    out.comp = cur;
    out
}

/// Random orthogonal matrix via Gram-Schmidt on a Gaussian matrix.
pub fn random_orthogonal(m: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    while rows.len() < m {
        let mut v: Vec<f64> = (0..m).map(|_| standard_normal(&mut rng)).collect();
        for r in &rows {
            let d: f64 = v.iter().zip(r).map(|(a, b)| a * b).sum();
            for (x, y) in v.iter_mut().zip(r) {
                *x -= d * y;
            }
        }
        let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            for x in v.iter_mut() {
                *x /= n;
            }
            rows.push(v);
        }
    }
    rows
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

// ---------------------------------------------------------------------------
// Standard curvature term.
// ---------------------------------------------------------------------------

/// Dual action of a skew matrix on a covariant rank-4 tensor:
/// `(A * T)(X1..X4) = -sum_i T(X1, .., A X_i, .., X4)`.
fn act_skew(a: &[Vec<f64>], t: &CurvModel) -> CurvModel {
    let m = t.m;
    let mut out = CurvModel::zeros(m, t.kind);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let mut acc = 0.0;
                    for x in 0..m {
                        acc += a[x][i] * t.get(x, j, k, l)
                            + a[x][j] * t.get(i, x, k, l)
                            + a[x][k] * t.get(i, j, x, l)
                            + a[x][l] * t.get(i, j, k, x);
                    }
                    out.set(i, j, k, l, -acc);
                }
            }
        }
    }
    out
}

/// Standard curvature term acting on a rank-4 tensor:
/// `q(R) * T = 1/4 sum_{mu,nu} (e_mu ^ e_nu) * (R_mu,nu * T)` with both
/// factors acting in the dual (leading minus) convention. The output kind
/// equals the input kind.
pub fn q_star(r: &CurvModel, t: &CurvModel) -> Result<CurvModel> {
    if r.kind != Kind::Algebraic {
        return Err(Error::Validation("q_star expects an algebraic R".into()));
    }
    if r.m != t.m {
        return Err(Error::Validation("dimension mismatch".into()));
    }
    let m = r.m;
    let mut out = CurvModel::zeros(m, t.kind);
    for mu in 0..m {
        for nu in 0..m {
            if mu == nu {
                continue;
            }
            // B = R_{mu,nu}: (B e_c)_d = R[mu,nu,c,d]
            let mut b = vec![vec![0.0; m]; m];
            for c in 0..m {
                for d in 0..m {
                    b[d][c] = r.get(mu, nu, c, d);
                }
            }
            let u = act_skew(&b, t);
            // A = e_mu ^ e_nu: (A e_c)_d = delta_{c,mu} delta_{d,nu}
            //                            - delta_{c,nu} delta_{d,mu}
            let ua = act_skew_elementary(mu, nu, &u);
            out = out.add(&ua);
        }
    }
    Ok(out.scale(0.25))
}

/// `act_skew` specialised to the elementary skew matrix `e_mu ^ e_nu`.
fn act_skew_elementary(mu: usize, nu: usize, t: &CurvModel) -> CurvModel {
    let m = t.m;
    let mut out = CurvModel::zeros(m, t.kind);
    // (A e_c) = delta_{c,mu} e_nu - delta_{c,nu} e_mu
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let mut acc = 0.0;
                    if i == mu {
                        acc += t.get(nu, j, k, l);
                    }
                    if i == nu {
                        acc -= t.get(mu, j, k, l);
                    }
                    if j == mu {
                        acc += t.get(i, nu, k, l);
                    }
                    if j == nu {
                        acc -= t.get(i, mu, k, l);
                    }
                    if k == mu {
                        acc += t.get(i, j, nu, l);
                    }
                    if k == nu {
                        acc -= t.get(i, j, mu, l);
                    }
                    if l == mu {
                        acc += t.get(i, j, k, nu);
                    }
                    if l == nu {
                        acc -= t.get(i, j, k, mu);
                    }
                    out.set(i, j, k, l, -acc);
                }
            }
        }
    }
    out
}

/// `q(R)` acting on a single vector, which is half the Ricci endomorphism.
/// Test-only analogue of the rank-4 action.
pub fn q_star_vector(r: &CurvModel, x: &[f64]) -> Result<Vec<f64>> {
    if r.kind != Kind::Algebraic {
        return Err(Error::Validation("q_star expects an algebraic R".into()));
    }
    let m = r.m;
    let mut out = vec![0.0; m];
    for mu in 0..m {
        for nu in 0..m {
            // B x
            let mut bx = vec![0.0; m];
            for d in 0..m {
                for c in 0..m {
                    bx[d] += r.get(mu, nu, c, d) * x[c];
                }
            }
            // A (B x) with A = e_mu ^ e_nu
            out[nu] += 0.25 * bx[mu];
            out[mu] -= 0.25 * bx[nu];
        }
    }
    Ok(out)
}

/// `Theta_3(R) = g(q(R) * R, R)` in the rank-4 inner product.
pub fn theta3_numeric(r: &CurvModel) -> Result<f64> {
    Ok(curv_inner(&q_star(r, r)?, r))
}

/// Hamilton's quadratic curvature expression:
/// `Q(R)(X,Y;U,V) = 2 g(R_XY, R_UV)
///  + 2 sum_mu [ g(R_{mu,X} U, R_{mu,Y} V) - g(R_{mu,X} V, R_{mu,Y} U) ]`.
pub fn hamilton_q(r: &CurvModel) -> CurvModel {
    let m = r.m;
    let mut out = CurvModel::zeros(m, Kind::Algebraic);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let mut v = 0.0;
                    for a in 0..m {
                        for b in 0..m {
                            v += r.get(i, j, a, b) * r.get(k, l, a, b);
                        }
                    }
                    let mut w = 0.0;
                    for mu in 0..m {
                        for a in 0..m {
                            w += r.get(mu, i, k, a) * r.get(mu, j, l, a)
                                - r.get(mu, i, l, a) * r.get(mu, j, k, a);
                        }
                    }
                    out.set(i, j, k, l, v + 2.0 * w);
                }
            }
        }
    }
    out
}

/// Derivation extension of a symmetric endomorphism to rank-4 tensors.
pub fn der_sym(a: &SymForm, t: &CurvModel) -> CurvModel {
    let m = t.m;
    let mut out = CurvModel::zeros(m, t.kind);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let mut acc = 0.0;
                    for x in 0..m {
                        acc += a.get(x, i) * t.get(x, j, k, l)
                            + a.get(x, j) * t.get(i, x, k, l)
                            + a.get(x, k) * t.get(i, j, x, l)
                            + a.get(x, l) * t.get(i, j, k, x);
                    }
                    out.set(i, j, k, l, acc);
                }
            }
        }
    }
    out
}

/// Correct the trace-free Ricci part with a Nomizu-Kulkarni term so that
/// the result is of Einstein type; the scalar curvature is preserved.
pub fn make_einstein(r: &CurvModel) -> Result<CurvModel> {
    if r.m < 3 {
        return Err(Error::Validation(
            "Einstein correction degenerate for m < 3".into(),
        ));
    }
    let ric0 = ricci_traceless(r)?;
    if ric0.max_abs() < 1e-14 * ricci(r)?.max_abs().max(1.0) {
        return Ok(r.clone());
    }
    let correction = nk_product(&ric0, &SymForm::identity(r.m))?;
    let c0 = ricci_traceless(&correction)?;
    // Ric0 of (R + t * correction) is linear in t; least squares for t
    let num = -sym_inner(&ric0, &c0);
    let den = sym_inner(&c0, &c0);
    if den < 1e-24 {
        return Err(Error::Validation("Einstein correction has no effect".into()));
    }
    let t = num / den;
    let out = r.add(&correction.scale(t));
    let resid = ricci_traceless(&out)?.max_abs();
    let scale = ricci(&out)?.max_abs().max(1e-300);
    if resid > 1e-10 * scale {
        return Err(Error::Numeric(format!(
            "Einstein correction residual {resid:e} exceeds tolerance"
        )));
    }
    Ok(out)
}

/// True iff the trace-free Ricci part is negligible.
pub fn is_einstein(r: &CurvModel, tol: f64) -> bool {
    match (ricci_traceless(r), ricci(r)) {
        (Ok(r0), Ok(ric)) => r0.max_abs() <= tol * ric.max_abs().max(1e-300),
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Sectional curvature and Grassmannian moments.
// ---------------------------------------------------------------------------

/// `sec(X, Y) = R(X,Y;Y,X) / |X ^ Y|^2`.
pub fn sectional(r: &CurvModel, x: &[f64], y: &[f64]) -> Result<f64> {
    let m = r.m;
    let xx: f64 = x.iter().map(|a| a * a).sum();
    let yy: f64 = y.iter().map(|a| a * a).sum();
    let xy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let area = xx * yy - xy * xy;
    if area < 1e-12 {
        return Err(Error::Validation("plane degenerate".into()));
    }
    let mut num = 0.0;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    num += r.get(i, j, k, l) * x[i] * y[j] * y[k] * x[l];
                }
            }
        }
    }
    Ok(num / area)
}

/// Monte Carlo moment of the sectional curvature over uniformly random
/// planes: two orthonormalized standard Gaussian vectors induce the
/// invariant measure on the Grassmannian. Returns `(mean, stderr)`.
pub fn grassmann_moment_mc(
    r: &CurvModel,
    n: u32,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let m = r.m;
    if m < 2 {
        return Err(Error::Validation("need m >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut got = 0usize;
    while got < samples {
        let x: Vec<f64> = (0..m).map(|_| standard_normal(&mut rng)).collect();
        let mut y: Vec<f64> = (0..m).map(|_| standard_normal(&mut rng)).collect();
        // orthonormalize
        let nx: f64 = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        if nx < 1e-10 {
            continue;
        }
        let x: Vec<f64> = x.iter().map(|a| a / nx).collect();
        let d: f64 = y.iter().zip(&x).map(|(a, b)| a * b).sum();
        for (v, u) in y.iter_mut().zip(&x) {
            *v -= d * u;
        }
        let ny: f64 = y.iter().map(|a| a * a).sum::<f64>().sqrt();
        if ny < 1e-10 {
            continue;
        }
        let y: Vec<f64> = y.iter().map(|a| a / ny).collect();
        let s = sectional(r, &x, &y)?;
        let v = s.powi(n as i32);
        sum += v;
        sum_sq += v * v;
        got += 1;
    }
    let mean = sum / samples as f64;
    let var = (sum_sq / samples as f64 - mean * mean).max(0.0);
    Ok((mean, (var / samples as f64).sqrt()))
}

/// Estimate the extremal sectional curvatures from moments
/// `psi[0..=N]` (with `psi[0] = 1`) and a shift `lambda`:
/// max: `-lambda + (sum C(N,n) psi_n lambda^(N-n))^(1/N)`,
/// min: `+lambda - (sum (-1)^n C(N,n) psi_n lambda^(N-n))^(1/N)`.
/// Converges only as the number of moments grows.
pub fn sec_extrema_estimate(psi: &[f64], lambda: f64) -> Result<(f64, f64)> {
    if psi.len() < 2 {
        return Err(Error::Validation("need at least the first moment".into()));
    }
    let n = psi.len() - 1;
    let mut up = 0.0;
    let mut dn = 0.0;
    let mut binom = 1.0f64;
    for k in 0..=n {
        let term = binom * psi[k] * lambda.powi((n - k) as i32);
        up += term;
        dn += if k % 2 == 0 { term } else { -term };
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    if up < 0.0 || dn < 0.0 {
        return Err(Error::Numeric(
            "negative radicand; increase the shift".into(),
        ));
    }
    let root = 1.0 / n as f64;
    Ok((-lambda + up.powf(root), lambda - dn.powf(root)))
}

// ---------------------------------------------------------------------------
// Model JSON.
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum ModelSpec {
    Constant {
        m: usize,
        c: f64,
    },
    NkRandom {
        m: usize,
        terms: usize,
        seed: u64,
    },
    DirectSum {
        parts: Vec<ModelSpec>,
    },
    Explicit {
        m: usize,
        comp: Vec<f64>,
    },
}

fn realize(spec: &ModelSpec) -> Result<CurvModel> {
    match spec {
        ModelSpec::Constant { m, c } => constant_model(*m, *c),
        ModelSpec::NkRandom { m, terms, seed } => Ok(random_model(*m, *terms, *seed)),
        ModelSpec::DirectSum { parts } => {
            let mut acc: Option<CurvModel> = None;
            for p in parts {
                let r = realize(p)?;
                acc = Some(match acc {
                    None => r,
                    Some(a) => direct_sum(&a, &r)?,
                });
            }
            acc.ok_or_else(|| Error::Parse("direct_sum needs parts".into()))
        }
        ModelSpec::Explicit { m, comp } => {
            if comp.len() != m * m * m * m {
                return Err(Error::Parse(format!(
                    "explicit model needs m^4 = {} components, got {}",
                    m * m * m * m,
                    comp.len()
                )));
            }
            let r = CurvModel {
                m: *m,
                kind: Kind::Algebraic,
                comp: comp.clone(),
            };
            r.validate(1e-8)?;
            Ok(r)
        }
    }
}

/// Parse the model JSON format.
pub fn model_from_json(text: &str) -> Result<CurvModel> {
    let spec: ModelSpec =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("model JSON: {e}")))?;
    realize(&spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn constant_model_basics() {
        let r = constant_model(4, 1.0).unwrap();
        r.validate(1e-12).unwrap();
        assert!(close(scalar(&r).unwrap(), 12.0, 1e-12));
        let ric = ricci(&r).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 3.0 } else { 0.0 };
                assert!(close(ric.get(i, j), want, 1e-12));
            }
        }
        assert!(close(curv_norm_sq(&r), 6.0, 1e-12));
        assert!(constant_model(1, 1.0).is_err());
    }

    #[test]
    fn nk_products() {
        // g x g = -2 * constant curvature 1
        let m = 5;
        let g = SymForm::identity(m);
        let gg = nk_product(&g, &g).unwrap();
        gg.validate(1e-12).unwrap();
        let c = constant_model(m, 1.0).unwrap().scale(-2.0);
        for (a, b) in gg.comp().iter().zip(c.comp()) {
            assert!(close(*a, *b, 1e-12));
        }
        // rank-1 square has vanishing NK square
        let mut a = SymForm::zeros(3);
        for i in 0..3 {
            for j in 0..3 {
                a.set(i, j, (i + 1) as f64 * (j + 1) as f64);
            }
        }
        let z = nk_product(&a, &a).unwrap();
        assert!(z.max_abs() < 1e-12);
        // wedge-square identity for squares of two covectors
        let alpha = [1.0, -2.0, 0.5];
        let beta = [0.25, 1.0, -1.0];
        let mut ha = SymForm::zeros(3);
        let mut hb = SymForm::zeros(3);
        for i in 0..3 {
            for j in 0..3 {
                ha.set(i, j, alpha[i] * alpha[j]);
                hb.set(i, j, beta[i] * beta[j]);
            }
        }
        let w = nk_product(&ha, &hb).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let wedge = |x: usize, y: usize| alpha[x] * beta[y] - alpha[y] * beta[x];
                        assert!(close(w.get(i, j, k, l), wedge(i, j) * wedge(k, l), 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn random_model_validates_and_is_seed_stable() {
        let r1 = random_model(4, 3, 42);
        let r2 = random_model(4, 3, 42);
        assert_eq!(r1.comp(), r2.comp());
        r1.validate(1e-12).unwrap();
        let z = random_model(4, 0, 1);
        assert!(z.max_abs() == 0.0);
    }

    #[test]
    fn phi_round_trip_and_sec1() {
        let r = random_model(5, 3, 7);
        let s = phi_plus(&r).unwrap();
        s.validate(1e-10).unwrap();
        let back = phi_minus(&s).unwrap();
        for (a, b) in r.comp().iter().zip(back.comp()) {
            assert!(close(*a, *b, 1e-12));
        }
        // constant curvature: Sec = 4 gg' - 2 gg' - 2 gg'
        let s1 = phi_plus(&constant_model(3, 1.0).unwrap()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                        let want = 4.0 * d(i, j) * d(k, l) - 2.0 * d(i, k) * d(j, l)
                            - 2.0 * d(i, l) * d(j, k);
                        assert!(close(s1.get(i, j, k, l), want, 1e-12));
                    }
                }
            }
        }
        // norms: |Sec|^2 = 12 |R|^2
        assert!(close(curv_norm_sq(&s), 12.0 * curv_norm_sq(&r), 1e-10));
        // quarter-diagonal identity
        let x = 1;
        let u = 3;
        assert!(close(0.25 * s.get(x, x, u, u), r.get(x, u, u, x), 1e-12));
    }

    #[test]
    fn ricci_inner_for_constant4() {
        let r = constant_model(4, 1.0).unwrap();
        let ric = ricci(&r).unwrap();
        assert!(close(sym_inner(&ric, &ric), 18.0, 1e-12));
        // ricci commutes with the phi round trip
        let r2 = phi_minus(&phi_plus(&r).unwrap()).unwrap();
        let ric2 = ricci(&r2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!(close(ric.get(i, j), ric2.get(i, j), 1e-12));
            }
        }
    }

    #[test]
    fn pr_projects_onto_sectional() {
        // pr of a random pair-symmetric tensor is sectional, and pr is the
        // identity on sectional tensors
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = 4;
        let mut t = CurvModel::zeros(m, Kind::Sectional);
        for i in 0..m {
            for j in i..m {
                for k in 0..m {
                    for l in k..m {
                        let v: f64 = rng.gen_range(-1.0..1.0);
                        t.set(i, j, k, l, v);
                        t.set(j, i, k, l, v);
                        t.set(i, j, l, k, v);
                        t.set(j, i, l, k, v);
                    }
                }
            }
        }
        // symmetrize in pairs
        let mut sym = CurvModel::zeros(m, Kind::Sectional);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        sym.set(i, j, k, l, 0.5 * (t.get(i, j, k, l) + t.get(k, l, i, j)));
                    }
                }
            }
        }
        let p = pr_sectional(&sym);
        p.validate(1e-10).unwrap();
        let pp = pr_sectional(&p);
        for (a, b) in p.comp().iter().zip(pp.comp()) {
            assert!(close(*a, *b, 1e-10));
        }
    }

    #[test]
    fn direct_sum_properties() {
        let r = random_model(3, 2, 9);
        let padded = pad_flat(&r, 2);
        padded.validate(1e-12).unwrap();
        assert!(close(scalar(&padded).unwrap(), scalar(&r).unwrap(), 1e-12));
        let s2 = constant_model(2, 1.0).unwrap();
        let prod = direct_sum(&s2, &s2).unwrap();
        let ric = ricci(&prod).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(close(ric.get(i, j), want, 1e-12));
            }
        }
        let q = random_model(2, 2, 10);
        let both = direct_sum(&r, &q).unwrap();
        assert!(close(
            curv_norm_sq(&both),
            curv_norm_sq(&r) + curv_norm_sq(&q),
            1e-12
        ));
    }

    #[test]
    fn polarization_formula() {
        // 24 R(X,Y;U,V) from diagonal values R(A,B;B,A)
        let r = random_model(4, 3, 21);
        let m = r.m;
        let diag = |x: &[f64], y: &[f64]| {
            let mut acc = 0.0;
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        for l in 0..m {
                            acc += r.get(i, j, k, l) * x[i] * y[j] * y[k] * x[l];
                        }
                    }
                }
            }
            acc
        };
        let basis = |t: usize| -> Vec<f64> {
            let mut v = vec![0.0; m];
            v[t] = 1.0;
            v
        };
        let add = |a: &[f64], b: &[f64], s: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| x + s * y).collect()
        };
        for (i, j, k, l) in [(0, 1, 2, 3), (0, 2, 1, 3), (1, 3, 0, 2)] {
            let (x, y, u, v) = (basis(i), basis(j), basis(k), basis(l));
            let val = diag(&add(&x, &v, 1.0), &add(&y, &u, 1.0))
                - diag(&add(&x, &u, 1.0), &add(&y, &v, 1.0))
                - diag(&add(&x, &v, 1.0), &add(&y, &u, -1.0))
                + diag(&add(&x, &u, 1.0), &add(&y, &v, -1.0))
                - diag(&add(&x, &v, -1.0), &add(&y, &u, 1.0))
                + diag(&add(&x, &u, -1.0), &add(&y, &v, 1.0))
                + diag(&add(&x, &v, -1.0), &add(&y, &u, -1.0))
                - diag(&add(&x, &u, -1.0), &add(&y, &v, -1.0));
            assert!(close(val, 24.0 * r.get(i, j, k, l), 1e-10));
        }
    }

    #[test]
    fn q_star_defining_representation() {
        let r = random_model(4, 3, 13);
        let ric = ricci(&r).unwrap();
        for t in 0..4 {
            let mut x = vec![0.0; 4];
            x[t] = 1.0;
            let qx = q_star_vector(&r, &x).unwrap();
            for d in 0..4 {
                assert!(close(qx[d], 0.5 * ric.get(t, d), 1e-10));
            }
        }
    }

    #[test]
    fn q_star_zero_and_hamilton() {
        let m = 4;
        let z = CurvModel::zeros(m, Kind::Algebraic);
        let t = random_model(m, 2, 3);
        assert!(q_star(&z, &t).unwrap().max_abs() == 0.0);
        // Hamilton decomposition q(R) * R = 1/2 Der_Ric R + Q(R)
        let r = random_model(m, 3, 17);
        let lhs = q_star(&r, &r).unwrap();
        let ric = ricci(&r).unwrap();
        let rhs = der_sym(&ric, &r).scale(0.5).add(&hamilton_q(&r));
        let scale = lhs.max_abs().max(rhs.max_abs());
        for (a, b) in lhs.comp().iter().zip(rhs.comp()) {
            assert!((a - b).abs() <= 1e-9 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn make_einstein_works() {
        let r = random_model(5, 3, 33);
        let e = make_einstein(&r).unwrap();
        assert!(is_einstein(&e, 1e-9));
        assert!(close(scalar(&e).unwrap(), scalar(&r).unwrap(), 1e-10));
        // already-Einstein input unchanged
        let c = constant_model(4, 2.0).unwrap();
        let e2 = make_einstein(&c).unwrap();
        for (a, b) in c.comp().iter().zip(e2.comp()) {
            assert!(close(*a, *b, 1e-12));
        }
        assert!(make_einstein(&random_model(2, 2, 1)).is_err());
    }

    #[test]
    fn sectional_constant_and_mc() {
        let r = constant_model(5, 2.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
            let y: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
            if let Ok(s) = sectional(&r, &x, &y) {
                assert!(close(s, 2.5, 1e-9));
            }
        }
        let (mean, stderr) = grassmann_moment_mc(&constant_model(5, 1.0).unwrap(), 2, 10_000, 9)
            .unwrap();
        assert!((mean - 1.0).abs() <= 4.0 * stderr.max(1e-12) + 1e-9);
        // degenerate plane errors
        let x = vec![1.0, 0.0, 0.0, 0.0, 0.0];
        assert!(sectional(&r, &x, &x).is_err());
    }

    #[test]
    fn sec_extrema_for_constant_models() {
        let c: f64 = 1.0;
        let lambda = c.abs() + 1.0;
        let psi: Vec<f64> = (0..=20).map(|n| c.powi(n)).collect();
        let (mx, mn) = sec_extrema_estimate(&psi, lambda).unwrap();
        assert!((mx - c).abs() < 0.2);
        assert!((mn - c).abs() < 0.2);
        assert!(close(mx, mn, 1e-9));
        // N = 1 gives the mean exactly
        let (m1, _) = sec_extrema_estimate(&[1.0, 0.37], 5.0).unwrap();
        assert!(close(m1, 0.37, 1e-12));
    }

    /// Moment-based extremal estimates bracket against direct maximization
    /// over sampled planes.
    #[test]
    fn sec_extrema_against_sampled_planes() {
        let r = random_model(4, 3, 27);
        // sampled oracle for max/min and the moments from the same measure
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut smax = f64::NEG_INFINITY;
        let mut smin = f64::INFINITY;
        for _ in 0..100_000 {
            let x: Vec<f64> = (0..4).map(|_| standard_normal(&mut rng)).collect();
            let y: Vec<f64> = (0..4).map(|_| standard_normal(&mut rng)).collect();
            if let Ok(s) = sectional(&r, &x, &y) {
                smax = smax.max(s);
                smin = smin.min(s);
            }
        }
        let n = 14usize;
        let mut psi = vec![1.0];
        for k in 1..=n {
            psi.push(grassmann_moment_mc(&r, k as u32, 100_000, 5).unwrap().0);
        }
        let lambda = smax.abs().max(smin.abs()) + 1.0;
        let (mx, mn) = sec_extrema_estimate(&psi, lambda).unwrap();
        let range = smax - smin;
        // estimates converge from inside the range as moments grow
        assert!(mx <= smax + 0.05 * range, "{mx} vs sampled max {smax}");
        assert!(mn >= smin - 0.05 * range, "{mn} vs sampled min {smin}");
        assert!(mx >= smin && mn <= smax);
        // with only a few moments the gap to the true extrema stays coarse
        assert!((mx - smax).abs() <= 0.8 * range);
        assert!((mn - smin).abs() <= 0.8 * range);
    }

    #[test]
    fn model_json() {
        let r = model_from_json(r#"{"type":"constant","m":6,"c":1}"#).unwrap();
        assert_eq!(r.m, 6);
        let r = model_from_json(r#"{"type":"nk_random","m":5,"terms":3,"seed":42}"#).unwrap();
        assert_eq!(r.comp(), random_model(5, 3, 42).comp());
        let r = model_from_json(
            r#"{"type":"direct_sum","parts":[{"type":"constant","m":2,"c":1},{"type":"constant","m":2,"c":1}]}"#,
        )
        .unwrap();
        assert_eq!(r.m, 4);
        assert!(is_einstein(&r, 1e-10));
        let comp: Vec<f64> = constant_model(2, 1.0).unwrap().comp().to_vec();
        let js = serde_json::json!({"type": "explicit", "m": 2, "comp": comp});
        assert!(model_from_json(&js.to_string()).is_ok());
    }
}
