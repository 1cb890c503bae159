//! Named verification suites. Each case records an expected and an actual
//! value, a tolerance and a pass flag; the report is JSON on stdout with a
//! human summary on stderr, and the process exit code follows the overall
//! flag.

use curvgraph::algebra::GraphPoly;
use curvgraph::curvature::{
    constant_model, curv_norm_sq, direct_sum, frame_change, grassmann_moment_mc, make_einstein,
    pad_flat, random_model, random_orthogonal, CurvModel,
};
use curvgraph::exactalg::{rat, rat_i, rat_to_f64, KappaPoly, PolyM, Rat, RatFuncM};
use curvgraph::graphs::{
    dumbbell, enumerate_degree, ladder, square_crossed, square_parallel, theta, ColoredGraph,
};
use curvgraph::ihx::{
    connected_black_rank, ihx_relations, stable_dims,
};
use curvgraph::invariants::{
    const_value, const_value_symbolic, degree3_table_classes, delta_m, delta_m_reduced,
    einstein_identity, eval_graph, eval_poly, expected_combination_r2,
    expected_combination_scalar, gauss_bonnet_sphere, hitchin_thorpe4, moment_poly, moment_value,
    per_poly_einstein_expansions, pfaffian_defn_eval, pfaffian_poly, psi_defn_eval, theta3_poly,
    Strategy,
};
use serde::Serialize;
use std::time::Instant;

#[derive(Serialize)]
pub struct CaseReport {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: Vec<CaseReport>,
    pub overall: bool,
    pub wall_time_ms: u64,
}

struct Suite {
    cases: Vec<CaseReport>,
    tolerance_override: Option<f64>,
}

impl Suite {
    fn new(tolerance_override: Option<f64>) -> Self {
        Suite {
            cases: Vec::new(),
            tolerance_override,
        }
    }

    fn tol(&self, default: f64) -> f64 {
        self.tolerance_override.unwrap_or(default)
    }

    /// Relative comparison of two floats.
    fn numeric(&mut self, name: &str, expected: f64, actual: f64, tol: f64) {
        let tol = self.tol(tol);
        let scale = 1.0f64.max(expected.abs()).max(actual.abs());
        let pass = (expected - actual).abs() <= tol * scale;
        self.cases.push(CaseReport {
            name: name.to_string(),
            expected: format!("{expected:.12e}"),
            actual: format!("{actual:.12e}"),
            tolerance: tol,
            pass,
        });
    }

    /// Residual that must stay below the tolerance.
    fn residual(&mut self, name: &str, actual: f64, tol: f64) {
        let tol = self.tol(tol);
        self.cases.push(CaseReport {
            name: name.to_string(),
            expected: format!("<= {tol:e}"),
            actual: format!("{actual:.12e}"),
            tolerance: tol,
            pass: actual <= tol,
        });
    }

    fn exact<T: PartialEq + std::fmt::Debug>(&mut self, name: &str, expected: T, actual: T) {
        self.cases.push(CaseReport {
            name: name.to_string(),
            expected: format!("{expected:?}"),
            actual: format!("{actual:?}"),
            tolerance: 0.0,
            pass: expected == actual,
        });
    }

    fn finish(mut self, suite: &str, started: Instant) -> SuiteReport {
        self.cases.sort_by(|a, b| a.name.cmp(&b.name));
        let overall = self.cases.iter().all(|c| c.pass);
        SuiteReport {
            suite: suite.to_string(),
            cases: self.cases,
            overall,
            wall_time_ms: started.elapsed().as_millis() as u64,
        }
    }
}

fn models_for(seed: u64, count: usize, dims: &[usize]) -> Vec<CurvModel> {
    (0..count)
        .map(|k| random_model(dims[k % dims.len()], 3, seed.wrapping_add(k as u64)))
        .collect()
}

fn suite_ihx_numeric(s: &mut Suite, seed: u64) {
    let models = models_for(seed, 50, &[4, 5, 6]);
    for n in 1..=3usize {
        let rels = ihx_relations(n);
        let mut worst = 0.0f64;
        for r in &models {
            for rel in &rels {
                let scale: f64 = rel
                    .terms()
                    .map(|(g, c)| {
                        (rat_to_f64(c) * eval_graph(g, r, Strategy::Scheduled).unwrap()).abs()
                    })
                    .sum();
                let v = eval_poly(rel, r, Strategy::Scheduled).unwrap();
                worst = worst.max(v.abs() / scale.max(1.0));
            }
        }
        s.residual(&format!("degree-{n} relations vanish"), worst, 1e-9);
    }
}

fn suite_dims(s: &mut Suite, allow_large: bool) {
    let max_n = if allow_large { 5 } else { 4 };
    let dims = stable_dims(max_n);
    let expected: Vec<usize> = if allow_large {
        vec![1, 1, 3, 8, 26, 90]
    } else {
        vec![1, 1, 3, 8, 26]
    };
    s.exact("stable dimensions", expected.clone(), dims.clone());
    let gens =
        curvgraph::algebra::generator_counts(&dims.iter().map(|&d| d as u64).collect::<Vec<_>>())
            .unwrap_or_default();
    let expected_gens: Vec<u64> = if allow_large {
        vec![1, 2, 5, 15, 54]
    } else {
        vec![1, 2, 5, 15]
    };
    s.exact("generator counts", expected_gens, gens);
    let cb: Vec<(usize, usize)> = (1..=4).map(connected_black_rank).collect();
    s.exact(
        "connected-black classes and relations",
        vec![(1, 0), (2, 0), (5, 0), (17, 2)],
        cb,
    );
}

fn suite_gauss_bonnet(s: &mut Suite) {
    for m in [2usize, 4, 6] {
        let chi = gauss_bonnet_sphere(m).unwrap();
        s.numeric(&format!("euler characteristic of S^{m}"), 2.0, chi, 1e-9);
    }
    let r3 = constant_model(3, 1.0).unwrap();
    let pf2 = eval_poly(&pfaffian_poly(2), &r3, Strategy::Scheduled).unwrap();
    s.residual("pf_2 vanishes at m = 3", pf2.abs(), 1e-10);
}

fn suite_norm12(s: &mut Suite, seed: u64) {
    for (k, r) in models_for(seed, 10, &[3, 4, 5]).iter().enumerate() {
        let v = 0.25 * eval_graph(&ladder(), r, Strategy::Scheduled).unwrap();
        s.numeric(
            &format!("sectional norm graph = 12 |R|^2 (model {k})"),
            12.0 * curv_norm_sq(r),
            v,
            1e-9,
        );
    }
}

fn suite_delta_table(s: &mut Suite) {
    let mvar = PolyM::var();
    let one = PolyM::one();
    let c = |k: i64| PolyM::constant(rat_i(k));
    let gp = |g: ColoredGraph, p: PolyM| GraphPoly::monomial(g, p);
    // degree 1 and 2 rows
    let dt = delta_m(&gp(theta(), one.clone()));
    s.exact(
        "delta theta = -2m(m-1)",
        gp(ColoredGraph::empty(), c(-2).mul(&mvar).mul(&mvar.sub(&one))),
        dt,
    );
    let dqp = delta_m_reduced(&gp(square_parallel(), one.clone()), 2).unwrap();
    s.exact(
        "delta parallel square = -4(m-1) theta",
        gp(theta(), c(-4).mul(&mvar.sub(&one))),
        dqp,
    );
    let dqx = delta_m_reduced(&gp(square_crossed(), one.clone()), 2).unwrap();
    s.exact("delta crossed square = 12 theta", gp(theta(), c(12)), dqx);
    // the five degree-3 rows, in table order
    let table = degree3_table_classes().unwrap();
    let qp = square_parallel();
    let qx = square_crossed();
    let tt = theta().disjoint_union(&theta());
    let rows: Vec<GraphPoly<PolyM>> = vec![
        gp(qp.clone(), c(-6).mul(&mvar.sub(&one))),
        {
            let mut p = gp(qp.clone(), c(-4).mul(&mvar).add(&c(6)));
            p.add_term(tt.clone(), c(-2));
            p
        },
        {
            let mut p = gp(qp.clone(), c(12));
            p.add_term(qx.clone(), c(-2).mul(&mvar.sub(&one)));
            p
        },
        {
            let mut p = gp(qp.clone(), c(12));
            p.add_term(qx.clone(), c(6));
            p
        },
        {
            let mut p = gp(qp.clone(), c(-6));
            p.add_term(qx.clone(), c(24));
            p
        },
    ];
    for (k, expected) in rows.into_iter().enumerate() {
        let d = delta_m_reduced(&gp(table[k].clone(), one.clone()), 3).unwrap();
        s.exact(&format!("delta g3.{} row", k + 1), expected, d);
    }
}

fn suite_const_values(s: &mut Suite) {
    let table = degree3_table_classes().unwrap();
    // hexagon with one antipodal and two distance-2 chords (table row 4):
    // 8 (2m-5) kappa^3 / (m^2 (m-1)^2)
    let g_b = GraphPoly::monomial(table[3].clone(), rat_i(1));
    let (n, rf) = const_value_symbolic(&g_b).unwrap();
    let expected = RatFuncM::new(
        curvgraph::exactalg::parse_polym("16*m-40").unwrap(),
        curvgraph::exactalg::parse_polym("m^2").unwrap().mul(
            &curvgraph::exactalg::parse_polym("m^2-2*m+1").unwrap(),
        ),
    )
    .unwrap();
    s.exact("table row 4 value degree", 3usize, n);
    s.exact("table row 4 value 8(2m-5)k^3/(m^2(m-1)^2)", expected, rf);
    // all-antipodal hexagon (table row 5): -8 (m+11) kappa^3 / (m^2 (m-1)^2)
    let g_a = GraphPoly::monomial(table[4].clone(), rat_i(1));
    let (_, rf) = const_value_symbolic(&g_a).unwrap();
    let expected = RatFuncM::new(
        curvgraph::exactalg::parse_polym("-8*m-88").unwrap(),
        curvgraph::exactalg::parse_polym("m^2").unwrap().mul(
            &curvgraph::exactalg::parse_polym("m^2-2*m+1").unwrap(),
        ),
    )
    .unwrap();
    s.exact("table row 5 value -8(m+11)k^3/(m^2(m-1)^2)", expected, rf);
    // numeric agreement on constant models
    for m in 3..=6usize {
        let model = constant_model(m, 1.0).unwrap();
        let kappa = rat_i((m * (m - 1)) as i64);
        let mut worst = 0.0f64;
        for g in [&table[3], &table[4]] {
            let p = GraphPoly::monomial((*g).clone(), rat_i(1));
            let direct = eval_poly(&p, &model, Strategy::Scheduled).unwrap();
            let via = const_value(&p, &rat_i(m as i64), &kappa).unwrap();
            worst = worst.max((direct - via).abs() / (1.0 + direct.abs().max(via.abs())));
        }
        s.residual(&format!("pipeline matches direct eval at m={m}"), worst, 1e-9);
    }
}

fn suite_pfaffian_defn(s: &mut Suite, seed: u64) {
    for n in 1..=2usize {
        for m in [4usize, 5] {
            let mut worst = 0.0f64;
            for k in 0..10u64 {
                let r = random_model(m, 3, seed.wrapping_add(1000 + k));
                let defn = pfaffian_defn_eval(n, &r).unwrap();
                let poly = eval_poly(&pfaffian_poly(n), &r, Strategy::Scheduled).unwrap();
                worst = worst.max((defn - poly).abs() / (1.0 + defn.abs().max(poly.abs())));
            }
            s.residual(
                &format!("pf_{n} defn vs polynomial at m={m} (10 seeds)"),
                worst,
                1e-9,
            );
        }
    }
}

fn suite_psi_closure(s: &mut Suite, seed: u64) {
    for n in 1..=3usize {
        for m in [4usize, 5] {
            let mut worst = 0.0f64;
            for k in 0..3u64 {
                let r = random_model(m, 3, seed.wrapping_add(500 + k));
                let oracle = psi_defn_eval(n, &r).unwrap();
                let poly = eval_poly(&moment_poly(n), &r, Strategy::Scheduled).unwrap();
                worst = worst.max((oracle - poly).abs() / (1.0 + oracle.abs().max(poly.abs())));
            }
            s.residual(
                &format!("psi_{n} closure vs polynomial at m={m}"),
                worst,
                1e-9,
            );
        }
    }
}

fn suite_moments_mc(s: &mut Suite, seed: u64) {
    for n in 1..=3usize {
        let mut worst = 0.0f64;
        for m in 3..=8usize {
            let v = moment_value(n, &constant_model(m, 1.0).unwrap(), Strategy::Scheduled)
                .unwrap();
            worst = worst.max((v - 1.0).abs());
        }
        s.residual(
            &format!("moment {n} of unit constant models is 1 (m=3..8)"),
            worst,
            1e-9,
        );
    }
    let r = random_model(4, 3, seed.wrapping_add(77));
    let exact = moment_value(2, &r, Strategy::Scheduled).unwrap();
    let (mc, stderr) = grassmann_moment_mc(&r, 2, 100_000, seed).unwrap();
    s.residual(
        "second moment within 4 standard errors of Monte Carlo",
        (exact - mc).abs(),
        4.0 * stderr,
    );
}

fn suite_cubic_lemma(s: &mut Suite, seed: u64) {
    let p = theta3_poly().unwrap();
    let mut worst = 0.0f64;
    for k in 0..20u64 {
        let m = 4 + (k % 3) as usize;
        let r = random_model(m, 3, seed.wrapping_add(700 + k));
        let via_poly = eval_poly(&p, &r, Strategy::Scheduled).unwrap();
        let direct = curvgraph::curvature::theta3_numeric(&r).unwrap();
        worst = worst.max((via_poly - direct).abs() / (1.0 + via_poly.abs().max(direct.abs())));
    }
    s.residual("theta3 polynomial vs direct action (20 models)", worst, 1e-9);
    // Hamilton decomposition of the standard curvature term
    use curvgraph::curvature::{der_sym, hamilton_q, q_star, ricci};
    let mut worst = 0.0f64;
    for k in 0..5u64 {
        let r = random_model(4, 3, seed.wrapping_add(40 + k));
        let lhs = q_star(&r, &r).unwrap();
        let rhs = der_sym(&ricci(&r).unwrap(), &r)
            .scale(0.5)
            .add(&hamilton_q(&r));
        let scale = lhs.max_abs().max(rhs.max_abs()).max(1.0);
        for (a, b) in lhs.comp().iter().zip(rhs.comp()) {
            worst = worst.max((a - b).abs() / scale);
        }
    }
    s.residual("Hamilton decomposition of q(R) * R", worst, 1e-9);
}

fn suite_einstein_cubic(s: &mut Suite, seed: u64) {
    for m in 3..=8usize {
        let r = constant_model(m, 1.0).unwrap();
        let rep = einstein_identity(&r, Strategy::Scheduled).unwrap();
        s.residual(
            &format!("cubic identity on the unit sphere model m={m}"),
            rep.relative_gap,
            1e-9,
        );
    }
    let s2 = constant_model(2, 1.0).unwrap();
    let prod = direct_sum(&s2, &s2).unwrap();
    let rep = einstein_identity(&prod, Strategy::Scheduled).unwrap();
    s.residual("cubic identity on the S^2 x S^2 model", rep.relative_gap, 1e-9);
    let e = make_einstein(&random_model(5, 3, seed.wrapping_add(8))).unwrap();
    let rep = einstein_identity(&e, Strategy::Scheduled).unwrap();
    s.residual(
        "cubic identity on an einsteinized random model",
        rep.relative_gap,
        1e-9,
    );
}

fn suite_einstein_symbolic(s: &mut Suite) {
    let combo = curvgraph::invariants::einstein_combination().unwrap();
    let exp = curvgraph::invariants::einstein_expand(&combo).unwrap();
    s.exact(
        "combination scalar part k^3 (m^2-18m+40)/(60 m^2)",
        expected_combination_scalar(),
        exp.scalar_part.clone(),
    );
    s.exact(
        "combination |R|^2 slot k (3m-104)/(30 m)",
        expected_combination_r2(),
        exp.r2_slot.clone(),
    );
    s.exact(
        "combination hexagon residue",
        (KappaPoly::zero(), KappaPoly::zero()),
        (exp.hexagon_antipodal.clone(), exp.hexagon_mixed.clone()),
    );
    let [pf3, psi3, th3] = per_poly_einstein_expansions().unwrap();
    let rf = |num: &str, den: &str, k: usize| {
        KappaPoly::monomial(
            RatFuncM::new(
                curvgraph::exactalg::parse_polym(num).unwrap(),
                curvgraph::exactalg::parse_polym(den).unwrap(),
            )
            .unwrap(),
            k,
        )
    };
    let konst = |r: Rat| KappaPoly::constant(RatFuncM::from_rat(r));
    s.exact(
        "pf_3 scalar part",
        rf("m^2-12*m+40", "48*m^2", 3),
        pf3.scalar_part.clone(),
    );
    s.exact("pf_3 |R|^2 slot", rf("m-8", "4*m", 1), pf3.r2_slot.clone());
    s.exact(
        "pf_3 hexagon coefficients (-1/432, -5/432)",
        (konst(rat(-1, 432)), konst(rat(-5, 432))),
        (pf3.hexagon_antipodal.clone(), pf3.hexagon_mixed.clone()),
    );
    s.exact(
        "psi_3 scalar part",
        rf("m^2+12*m+40", "6*m^2", 3),
        psi3.scalar_part.clone(),
    );
    s.exact("psi_3 |R|^2 slot", rf("6*m+48", "m", 1), psi3.r2_slot.clone());
    s.exact(
        "psi_3 hexagon coefficients (-1/6, -1/6)",
        (konst(rat(-1, 6)), konst(rat(-1, 6))),
        (psi3.hexagon_antipodal.clone(), psi3.hexagon_mixed.clone()),
    );
    s.exact("theta_3 scalar part", KappaPoly::zero(), th3.scalar_part.clone());
    s.exact("theta_3 |R|^2 slot", rf("2", "m", 1), th3.r2_slot.clone());
    s.exact(
        "theta_3 hexagon coefficients (+1/72, -1/18)",
        (konst(rat(1, 72)), konst(rat(-1, 18))),
        (th3.hexagon_antipodal.clone(), th3.hexagon_mixed.clone()),
    );
}

fn suite_hitchin_thorpe(s: &mut Suite, seed: u64) {
    let mut worst = 0.0f64;
    for k in 0..20u64 {
        let r = random_model(4, 3, seed.wrapping_add(900 + k));
        let rep = hitchin_thorpe4(&r, Strategy::Scheduled).unwrap();
        worst = worst.max(rep.relative_gap);
    }
    s.residual("integrand identity on 20 random models", worst, 1e-9);
    let rep = hitchin_thorpe4(&constant_model(4, 1.0).unwrap(), Strategy::Scheduled).unwrap();
    s.numeric("unit sphere integrand value", -12.0, rep.lhs, 1e-9);
}

fn suite_stability(s: &mut Suite, seed: u64) {
    // flat padding
    let r = random_model(3, 2, seed.wrapping_add(55));
    let mut worst = 0.0f64;
    for k in 1..=3usize {
        let padded = pad_flat(&r, k);
        for n in 1..=2usize {
            for g in enumerate_degree(n, false) {
                let a = eval_graph(&g, &r, Strategy::Scheduled).unwrap();
                let b = eval_graph(&g, &padded, Strategy::Scheduled).unwrap();
                worst = worst.max((a - b).abs() / (1.0 + a.abs()));
            }
        }
    }
    s.residual("padding by flat factors", worst, 1e-10);
    // additivity of connected classes
    let r1 = random_model(3, 2, seed.wrapping_add(61));
    let r2 = random_model(4, 2, seed.wrapping_add(62));
    let sum = direct_sum(&r1, &r2).unwrap();
    let mut worst = 0.0f64;
    for n in 1..=3usize {
        for g in enumerate_degree(n, false) {
            if g.stats().components != 1 {
                continue;
            }
            let a = eval_graph(&g, &r1, Strategy::Scheduled).unwrap();
            let b = eval_graph(&g, &r2, Strategy::Scheduled).unwrap();
            let c = eval_graph(&g, &sum, Strategy::Scheduled).unwrap();
            worst = worst.max((c - a - b).abs() / (1.0 + c.abs()));
        }
    }
    s.residual("additivity under direct sums", worst, 1e-9);
    // multiplicativity over disjoint unions
    let r = random_model(4, 2, seed.wrapping_add(23));
    let pool = [theta(), dumbbell(), square_parallel(), square_crossed()];
    let mut worst = 0.0f64;
    for a in &pool {
        for b in &pool {
            let u = a.disjoint_union(b);
            let va = eval_graph(a, &r, Strategy::Scheduled).unwrap();
            let vb = eval_graph(b, &r, Strategy::Scheduled).unwrap();
            let vu = eval_graph(&u, &r, Strategy::Scheduled).unwrap();
            worst = worst.max((vu - va * vb).abs() / (1.0 + vu.abs()));
        }
    }
    s.residual("multiplicativity over disjoint unions", worst, 1e-10);
    // orthogonal invariance
    let r = random_model(4, 3, seed.wrapping_add(71));
    let mut worst = 0.0f64;
    for k in 0..4u64 {
        let f = random_orthogonal(4, seed.wrapping_add(200 + k));
        let rf = frame_change(&r, &f);
        for n in 1..=2usize {
            for g in enumerate_degree(n, false) {
                let a = eval_graph(&g, &r, Strategy::Scheduled).unwrap();
                let b = eval_graph(&g, &rf, Strategy::Scheduled).unwrap();
                worst = worst.max((a - b).abs() / (1.0 + a.abs()));
            }
        }
    }
    s.residual("orthogonal frame invariance", worst, 1e-8);
    // strategy equivalence
    let r = random_model(4, 3, seed.wrapping_add(11));
    let mut worst = 0.0f64;
    for n in 1..=3usize {
        for g in enumerate_degree(n, false) {
            let a = eval_graph(&g, &r, Strategy::Naive).unwrap();
            let b = eval_graph(&g, &r, Strategy::Scheduled).unwrap();
            worst = worst.max((a - b).abs() / (1.0 + a.abs()));
        }
    }
    s.residual("naive and scheduled strategies agree", worst, 1e-10);
}

pub fn run_suite(
    name: &str,
    seed: u64,
    tolerance: Option<f64>,
    allow_large: bool,
) -> Result<bool, String> {
    let started = Instant::now();
    let mut s = Suite::new(tolerance);
    match name {
        "ihx-numeric" => suite_ihx_numeric(&mut s, seed),
        "dims" => suite_dims(&mut s, allow_large),
        "gauss-bonnet" => suite_gauss_bonnet(&mut s),
        "norm12" => suite_norm12(&mut s, seed),
        "delta-table" => suite_delta_table(&mut s),
        "const-values" => suite_const_values(&mut s),
        "pfaffian-defn" => suite_pfaffian_defn(&mut s, seed),
        "psi-closure" => suite_psi_closure(&mut s, seed),
        "moments-mc" => suite_moments_mc(&mut s, seed),
        "cubic-lemma" => suite_cubic_lemma(&mut s, seed),
        "einstein-cubic" => suite_einstein_cubic(&mut s, seed),
        "einstein-symbolic" => suite_einstein_symbolic(&mut s),
        "hitchin-thorpe4" => suite_hitchin_thorpe(&mut s, seed),
        "stability" => suite_stability(&mut s, seed),
        other => return Err(format!("unknown suite `{other}`")),
    }
    let report = s.finish(name, started);
    for c in &report.cases {
        eprintln!(
            "[{}] {} (expected {}, actual {})",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            c.expected,
            c.actual
        );
    }
    eprintln!(
        "suite {name}: {} in {} ms",
        if report.overall { "pass" } else { "FAIL" },
        report.wall_time_ms
    );
    println!(
        "{}",
        serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?
    );
    Ok(report.overall)
}
