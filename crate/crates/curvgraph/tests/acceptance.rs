//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Tolerances are pinned in code. Run with `--nocapture` to see the
//! lines for passing criteria too.

use std::time::Instant;

use curvgraph::algebra::{generator_counts, GraphPoly};
use curvgraph::curvature::{
    constant_model, der_sym, direct_sum, frame_change, grassmann_moment_mc,
    hamilton_q, make_einstein, pad_flat, q_star, random_model, random_orthogonal, ricci,
    theta3_numeric,
};
use curvgraph::exactalg::{parse_polym, rat, rat_i, KappaPoly, PolyM, Rat, RatFuncM};
use curvgraph::graphs::{
    dumbbell, enumerate_degree, square_crossed, square_parallel, theta, ColoredGraph,
};
use curvgraph::ihx::{connected_black_rank, ihx_relations, stable_dims};
use curvgraph::invariants::{
    const_value, const_value_symbolic, degree3_table_classes, delta_m, delta_m_reduced,
    einstein_combination, einstein_expand, einstein_identity, eval_graph, eval_poly,
    expected_combination_r2, expected_combination_scalar, gauss_bonnet_sphere, hitchin_thorpe4,
    moment_poly, moment_value, per_poly_einstein_expansions, pfaffian_defn_eval, pfaffian_poly,
    psi_defn_eval, theta3_poly, Strategy,
};

fn report(criterion: &str, pass: bool) {
    println!(
        "acceptance {criterion}: {}",
        if pass { "pass" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed");
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1.0f64.max(a.abs()).max(b.abs())
}

#[test]
fn criterion_01_stable_dimensions() {
    let started = Instant::now();
    let dims = stable_dims(4);
    let ok = dims == vec![1, 1, 3, 8, 26] && started.elapsed().as_secs() < 60;
    report("1 stable dimensions (1,1,3,8,26) under 60 s", ok);
}

/// Degree 5 takes a few seconds; opt in with `--ignored`.
#[test]
#[ignore]
fn criterion_01b_stable_dimension_degree5() {
    let started = Instant::now();
    let dims = stable_dims(5);
    let ok = dims == vec![1, 1, 3, 8, 26, 90] && started.elapsed().as_secs() < 600;
    report("1b stable dimension 90 at degree 5 under 10 min", ok);
}

#[test]
fn criterion_02_generator_counts() {
    let gens = generator_counts(&[1, 1, 3, 8, 26]).unwrap();
    report("2 generator counts (1,2,5,15)", gens == vec![1, 2, 5, 15]);
}

#[test]
fn criterion_03_connected_black_structure() {
    let counts: Vec<(usize, usize)> = (1..=4).map(connected_black_rank).collect();
    report(
        "3 connected-black counts (1,2,5,17) with relations (0,0,0,2)",
        counts == vec![(1, 0), (2, 0), (5, 0), (17, 2)],
    );
}

#[test]
fn criterion_04_delta_table() {
    let mvar = PolyM::var();
    let one = PolyM::one();
    let c = |k: i64| PolyM::constant(rat_i(k));
    let gp = |g: ColoredGraph, p: PolyM| GraphPoly::monomial(g, p);
    let mut ok = true;
    // degree 1 and 2 rows
    ok &= delta_m(&gp(theta(), one.clone()))
        == gp(ColoredGraph::empty(), c(-2).mul(&mvar).mul(&mvar.sub(&one)));
    ok &= delta_m_reduced(&gp(square_parallel(), one.clone()), 2).unwrap()
        == gp(theta(), c(-4).mul(&mvar.sub(&one)));
    ok &= delta_m_reduced(&gp(square_crossed(), one.clone()), 2).unwrap()
        == gp(theta(), c(12));
    // degree 3 rows
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
        ok &= delta_m_reduced(&gp(table[k].clone(), one.clone()), 3).unwrap() == expected;
    }
    report("4 derivation table rows exact", ok);
}

#[test]
fn criterion_05_constant_curvature_values() {
    let table = degree3_table_classes().unwrap();
    let mm1sq = parse_polym("m^2").unwrap().mul(&parse_polym("m^2-2*m+1").unwrap());
    let mut ok = true;
    // 8 (2m-5) / (m^2 (m-1)^2) on table row 4
    let (n, rf) =
        const_value_symbolic(&GraphPoly::monomial(table[3].clone(), rat_i(1))).unwrap();
    ok &= n == 3
        && rf == RatFuncM::new(parse_polym("16*m-40").unwrap(), mm1sq.clone()).unwrap();
    // -8 (m+11) / (m^2 (m-1)^2) on table row 5
    let (_, rf) =
        const_value_symbolic(&GraphPoly::monomial(table[4].clone(), rat_i(1))).unwrap();
    ok &= rf == RatFuncM::new(parse_polym("-8*m-88").unwrap(), mm1sq).unwrap();
    // numeric agreement on constant models
    for m in 3..=6usize {
        let model = constant_model(m, 1.0).unwrap();
        let kappa = rat_i((m * (m - 1)) as i64);
        for g in [&table[3], &table[4]] {
            let p = GraphPoly::monomial((*g).clone(), rat_i(1));
            let direct = eval_poly(&p, &model, Strategy::Scheduled).unwrap();
            let via = const_value(&p, &rat_i(m as i64), &kappa).unwrap();
            ok &= rel_gap(direct, via) <= 1e-9;
        }
    }
    report("5 constant-curvature hexagon values exact and numeric", ok);
}

#[test]
fn criterion_06_gauss_bonnet() {
    let mut ok = true;
    for m in [2usize, 4, 6] {
        ok &= (gauss_bonnet_sphere(m).unwrap() - 2.0).abs() <= 1e-9;
    }
    let pf2 = eval_poly(
        &pfaffian_poly(2),
        &constant_model(3, 1.0).unwrap(),
        Strategy::Scheduled,
    )
    .unwrap();
    ok &= pf2.abs() <= 1e-10;
    report("6 Gauss-Bonnet spheres and low-dimension vanishing", ok);
}

#[test]
fn criterion_07_oracle_equivalences() {
    let mut ok = true;
    for n in 1..=2usize {
        for m in [4usize, 5] {
            for seed in 0..10u64 {
                let r = random_model(m, 3, 1000 + seed);
                let defn = pfaffian_defn_eval(n, &r).unwrap();
                let poly = eval_poly(&pfaffian_poly(n), &r, Strategy::Scheduled).unwrap();
                ok &= rel_gap(defn, poly) <= 1e-9;
            }
        }
    }
    for n in 1..=3usize {
        for m in [4usize, 5] {
            for seed in 0..10u64 {
                let r = random_model(m, 3, 2000 + seed);
                let wick = psi_defn_eval(n, &r).unwrap();
                let poly = eval_poly(&moment_poly(n), &r, Strategy::Scheduled).unwrap();
                ok &= rel_gap(wick, poly) <= 1e-9;
            }
        }
    }
    report("7 definitional oracles match the polynomial families", ok);
}

#[test]
fn criterion_08_moments() {
    let mut ok = true;
    for n in 1..=3usize {
        for m in 3..=8usize {
            let v = moment_value(n, &constant_model(m, 1.0).unwrap(), Strategy::Scheduled)
                .unwrap();
            ok &= (v - 1.0).abs() <= 1e-9;
        }
    }
    let r = random_model(4, 3, 321);
    let exact = moment_value(2, &r, Strategy::Scheduled).unwrap();
    let (mc, stderr) = grassmann_moment_mc(&r, 2, 100_000, 11).unwrap();
    ok &= (exact - mc).abs() <= 4.0 * stderr;
    report("8 moment normalization and Monte Carlo agreement", ok);
}

#[test]
fn criterion_09_cubic_lemma() {
    let p = theta3_poly().unwrap();
    let mut ok = true;
    for seed in 0..20u64 {
        let m = 4 + (seed % 3) as usize;
        let r = random_model(m, 3, 700 + seed);
        let via_poly = eval_poly(&p, &r, Strategy::Scheduled).unwrap();
        let direct = theta3_numeric(&r).unwrap();
        ok &= rel_gap(via_poly, direct) <= 1e-9;
    }
    // Hamilton decomposition of the standard curvature term
    for seed in 0..5u64 {
        let r = random_model(4, 3, 400 + seed);
        let lhs = q_star(&r, &r).unwrap();
        let rhs = der_sym(&ricci(&r).unwrap(), &r)
            .scale(0.5)
            .add(&hamilton_q(&r));
        let scale = lhs.max_abs().max(rhs.max_abs()).max(1.0);
        for (a, b) in lhs.comp().iter().zip(rhs.comp()) {
            ok &= (a - b).abs() <= 1e-9 * scale;
        }
    }
    report("9 cubic polynomial equals the standard-curvature-term action", ok);
}

#[test]
fn criterion_10_einstein_identity() {
    let mut ok = true;
    // symbolic: the combination reduces to the stated rational functions
    let expansion = einstein_expand(&einstein_combination().unwrap()).unwrap();
    ok &= expansion.scalar_part == expected_combination_scalar();
    ok &= expansion.r2_slot == expected_combination_r2();
    ok &= expansion.hexagon_antipodal.is_zero() && expansion.hexagon_mixed.is_zero();
    // per-polynomial expansions
    let [pf3, psi3, th3] = per_poly_einstein_expansions().unwrap();
    let rfm = |num: &str, den: &str, k: usize| {
        KappaPoly::monomial(
            RatFuncM::new(parse_polym(num).unwrap(), parse_polym(den).unwrap()).unwrap(),
            k,
        )
    };
    let konst = |r: Rat| KappaPoly::constant(RatFuncM::from_rat(r));
    ok &= pf3.scalar_part == rfm("m^2-12*m+40", "48*m^2", 3)
        && pf3.r2_slot == rfm("m-8", "4*m", 1)
        && pf3.hexagon_antipodal == konst(rat(-1, 432))
        && pf3.hexagon_mixed == konst(rat(-5, 432));
    ok &= psi3.scalar_part == rfm("m^2+12*m+40", "6*m^2", 3)
        && psi3.r2_slot == rfm("6*m+48", "m", 1)
        && psi3.hexagon_antipodal == konst(rat(-1, 6))
        && psi3.hexagon_mixed == konst(rat(-1, 6));
    ok &= th3.scalar_part.is_zero()
        && th3.r2_slot == rfm("2", "m", 1)
        && th3.hexagon_antipodal == konst(rat(1, 72))
        && th3.hexagon_mixed == konst(rat(-1, 18));
    // numeric gap on constant models and Einstein direct sums
    for m in 3..=8usize {
        let rep = einstein_identity(&constant_model(m, 1.0).unwrap(), Strategy::Scheduled)
            .unwrap();
        ok &= rep.relative_gap <= 1e-9 && rep.symbolic_ok;
    }
    let s2 = constant_model(2, 1.0).unwrap();
    let rep = einstein_identity(&direct_sum(&s2, &s2).unwrap(), Strategy::Scheduled).unwrap();
    ok &= rep.relative_gap <= 1e-9;
    let s3 = constant_model(3, 1.0).unwrap();
    let rep =
        einstein_identity(&direct_sum(&s3, &s3).unwrap(), Strategy::Scheduled).unwrap();
    ok &= rep.relative_gap <= 1e-9;
    let e = make_einstein(&random_model(5, 3, 8)).unwrap();
    let rep = einstein_identity(&e, Strategy::Scheduled).unwrap();
    ok &= rep.relative_gap <= 1e-9;
    report("10 cubic Einstein identity, symbolic and numeric", ok);
}

#[test]
fn criterion_11_hitchin_thorpe_integrand() {
    let mut ok = true;
    for seed in 0..20u64 {
        let r = random_model(4, 3, 900 + seed);
        let rep = hitchin_thorpe4(&r, Strategy::Scheduled).unwrap();
        ok &= rep.relative_gap <= 1e-9;
    }
    report("11 dimension-4 integrand identity on 20 models", ok);
}

#[test]
fn criterion_12_property_suites() {
    let started = Instant::now();
    let mut ok = true;
    // IHX numeric vanishing: 50 random models, m = 4..6
    let models: Vec<_> = (0..50u64)
        .map(|k| random_model(4 + (k % 3) as usize, 3, 3000 + k))
        .collect();
    for n in 1..=3usize {
        for rel in ihx_relations(n) {
            for r in &models {
                let scale: f64 = rel
                    .terms()
                    .map(|(g, c)| {
                        (curvgraph::exactalg::rat_to_f64(c)
                            * eval_graph(g, r, Strategy::Scheduled).unwrap())
                        .abs()
                    })
                    .sum();
                let v = eval_poly(&rel, r, Strategy::Scheduled).unwrap();
                ok &= v.abs() <= 1e-9 * scale.max(1.0);
            }
        }
    }
    // orthogonal invariance, degree <= 2
    let r = random_model(4, 3, 71);
    for seed in 0..4u64 {
        let f = random_orthogonal(4, 200 + seed);
        let rot = frame_change(&r, &f);
        for n in 1..=2usize {
            for g in enumerate_degree(n, false) {
                let a = eval_graph(&g, &r, Strategy::Scheduled).unwrap();
                let b = eval_graph(&g, &rot, Strategy::Scheduled).unwrap();
                ok &= rel_gap(a, b) <= 1e-8;
            }
        }
    }
    // stability padding
    let r3 = random_model(3, 2, 55);
    for k in 1..=3usize {
        let padded = pad_flat(&r3, k);
        for n in 1..=2usize {
            for g in enumerate_degree(n, false) {
                let a = eval_graph(&g, &r3, Strategy::Scheduled).unwrap();
                let b = eval_graph(&g, &padded, Strategy::Scheduled).unwrap();
                ok &= rel_gap(a, b) <= 1e-10;
            }
        }
    }
    // additivity of connected classes
    let r1 = random_model(3, 2, 61);
    let r2 = random_model(4, 2, 62);
    let sum = direct_sum(&r1, &r2).unwrap();
    for n in 1..=3usize {
        for g in enumerate_degree(n, false) {
            if g.stats().components != 1 {
                continue;
            }
            let a = eval_graph(&g, &r1, Strategy::Scheduled).unwrap();
            let b = eval_graph(&g, &r2, Strategy::Scheduled).unwrap();
            let c = eval_graph(&g, &sum, Strategy::Scheduled).unwrap();
            ok &= rel_gap(c, a + b) <= 1e-9;
        }
    }
    // multiplicativity and strategy equivalence
    let r = random_model(4, 2, 23);
    let pool = [theta(), dumbbell(), square_parallel(), square_crossed()];
    for a in &pool {
        for b in &pool {
            let u = a.disjoint_union(b);
            let va = eval_graph(a, &r, Strategy::Scheduled).unwrap();
            let vb = eval_graph(b, &r, Strategy::Scheduled).unwrap();
            let vu = eval_graph(&u, &r, Strategy::Scheduled).unwrap();
            ok &= rel_gap(vu, va * vb) <= 1e-10;
        }
    }
    let r = random_model(4, 3, 11);
    for n in 1..=3usize {
        for g in enumerate_degree(n, false) {
            let a = eval_graph(&g, &r, Strategy::Naive).unwrap();
            let b = eval_graph(&g, &r, Strategy::Scheduled).unwrap();
            ok &= rel_gap(a, b) <= 1e-10;
        }
    }
    ok &= started.elapsed().as_secs() < 300;
    report("12 property suites within time budget", ok);
}
