//! Command-line surface: enumeration, quotient dimensions, polynomial
//! dumps, evaluation, derivation tables and named verification suites with
//! machine-readable reports.

mod suites;

use clap::{Args, Parser, Subcommand, ValueEnum};
use curvgraph::algebra::{parse_poly_rat, poly_from_json, poly_to_json, GraphPoly};
use curvgraph::curvature::{model_from_json, CurvModel};
use curvgraph::exactalg::Rat;
use curvgraph::graphs::enumerate_degree;
use curvgraph::ihx::{build_quotient, connected_black_rank, ihx_relations};
use curvgraph::invariants::{
    degree3_table_classes, delta_m, delta_m_reduced, eval_plan, eval_poly, moment_poly,
    pfaffian_poly, theta3_poly, Strategy,
};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "curvgraph", version, about = "graph calculus for curvature invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Naive,
    Scheduled,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Naive => Strategy::Naive,
            StrategyArg::Scheduled => Strategy::Scheduled,
        }
    }
}

#[derive(Args)]
struct BudgetArgs {
    /// Allow degree-5 enumeration (slower).
    #[arg(long)]
    allow_large: bool,
}

#[derive(Subcommand)]
enum Command {
    /// List isomorphism classes of one degree with their cycle counts.
    Enumerate {
        #[arg(long)]
        degree: usize,
        /// Restrict to classes with connected black subgraph.
        #[arg(long)]
        connected_black: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Class counts, quotient dimensions and generator counts per degree.
    Dims {
        #[arg(long, default_value = "4")]
        max_degree: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Evaluate a graph polynomial on a curvature model.
    Eval {
        /// Builtin name (theta, dumbbell, sq-par, sq-cross, pf:N, psi0:N,
        /// theta3, g3.1..g3.5) or a file in the polynomial text/JSON format.
        #[arg(long)]
        poly: String,
        /// Model JSON, inline or a file path.
        #[arg(long)]
        model: String,
        #[arg(long, value_enum, default_value = "scheduled")]
        strategy: StrategyArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print a builtin polynomial.
    Poly {
        #[arg(long)]
        name: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Curvature derivation of a polynomial (optionally reduced modulo IHX).
    Delta {
        #[arg(long)]
        poly: String,
        /// Reduce the image to quotient representatives.
        #[arg(long)]
        reduced: bool,
    },
    /// IHX relation tooling.
    Ihx {
        #[command(subcommand)]
        sub: IhxCommand,
    },
    /// Run a named verification suite; exits 1 on failure.
    Verify {
        /// One of: ihx-numeric, dims, gauss-bonnet, norm12, delta-table,
        /// const-values, pfaffian-defn, psi-closure, moments-mc,
        /// cubic-lemma, einstein-cubic, einstein-symbolic, hitchin-thorpe4,
        /// stability.
        suite: String,
        #[arg(long, default_value = "1")]
        seed: u64,
        /// Override the default relative tolerance of numeric cases.
        #[arg(long)]
        tolerance: Option<f64>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Subcommand)]
enum IhxCommand {
    /// Write the relations of one degree in the polynomial text format.
    Dump {
        #[arg(long)]
        degree: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

fn max_degree_cap(budget: &BudgetArgs) -> usize {
    if let Ok(v) = std::env::var("CURVGRAPH_MAX_DEGREE") {
        if let Ok(n) = v.parse::<usize>() {
            return n;
        }
    }
    if budget.allow_large {
        5
    } else {
        4
    }
}

fn check_degree(degree: usize, budget: &BudgetArgs) -> Result<(), String> {
    let cap = max_degree_cap(budget);
    if degree > cap {
        return Err(format!(
            "degree {degree} exceeds the cap {cap}; pass --allow-large or set CURVGRAPH_MAX_DEGREE"
        ));
    }
    Ok(())
}

fn load_model(spec: &str) -> Result<CurvModel, String> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec).map_err(|e| format!("reading {spec}: {e}"))?
    };
    model_from_json(&text).map_err(|e| e.to_string())
}

fn builtin_poly(name: &str) -> Result<Option<GraphPoly<Rat>>, String> {
    use curvgraph::exactalg::rat_i;
    use curvgraph::graphs as g;
    let gp = |x| Some(GraphPoly::monomial(x, rat_i(1)));
    Ok(match name {
        "theta" => gp(g::theta()),
        "dumbbell" => gp(g::dumbbell()),
        "sq-par" => gp(g::square_parallel()),
        "sq-cross" => gp(g::square_crossed()),
        "theta3" => Some(theta3_poly().map_err(|e| e.to_string())?),
        _ => {
            if let Some(n) = name.strip_prefix("pf:") {
                let n: usize = n.parse().map_err(|_| format!("bad degree in {name}"))?;
                Some(pfaffian_poly(n))
            } else if let Some(n) = name.strip_prefix("psi0:") {
                let n: usize = n.parse().map_err(|_| format!("bad degree in {name}"))?;
                Some(moment_poly(n))
            } else if let Some(k) = name.strip_prefix("g3.") {
                let k: usize = k.parse().map_err(|_| format!("bad index in {name}"))?;
                if !(1..=5).contains(&k) {
                    return Err(format!("{name}: table rows are g3.1 .. g3.5"));
                }
                let table = degree3_table_classes().map_err(|e| e.to_string())?;
                gp(table[k - 1].clone())
            } else {
                None
            }
        }
    })
}

fn load_poly(spec: &str) -> Result<GraphPoly<Rat>, String> {
    if let Some(p) = builtin_poly(spec)? {
        return Ok(p);
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| format!("`{spec}` is neither a builtin polynomial nor a readable file: {e}"))?;
    if text.trim_start().starts_with('[') {
        let v: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| format!("JSON in {spec}: {e}"))?;
        poly_from_json(&v).map_err(|e| e.to_string())
    } else {
        parse_poly_rat(&text).map_err(|e| e.to_string())
    }
}

fn cmd_enumerate(
    degree: usize,
    connected_black: bool,
    format: Format,
    budget: &BudgetArgs,
) -> Result<(), String> {
    check_degree(degree, budget)?;
    let classes = enumerate_degree(degree, connected_black);
    match format {
        Format::Text => {
            for g in &classes {
                let st = g.stats();
                let (_, _, aut_bar) = g.automorphisms();
                println!("{}  e={} g={} autbar={}", g.to_text(), st.e, st.g, aut_bar);
            }
        }
        Format::Json => {
            let arr: Vec<serde_json::Value> = classes
                .iter()
                .map(|g| {
                    let st = g.stats();
                    let (_, _, aut_bar) = g.automorphisms();
                    serde_json::json!({
                        "graph": g.to_text(),
                        "e": st.e,
                        "g": st.g,
                        "autbar": aut_bar,
                    })
                })
                .collect();
            println!("{}", serde_json::Value::Array(arr));
        }
    }
    Ok(())
}

fn cmd_dims(max_degree: usize, format: Format, budget: &BudgetArgs) -> Result<(), String> {
    check_degree(max_degree, budget)?;
    let mut rows = Vec::new();
    let mut dims: Vec<u64> = Vec::new();
    for n in 0..=max_degree {
        let classes = enumerate_degree(n, false).len();
        let basis = build_quotient(n);
        dims.push(basis.stable_dim() as u64);
        rows.push((n, classes, basis.stable_dim()));
    }
    let gens = curvgraph::algebra::generator_counts(&dims).map_err(|e| e.to_string())?;
    match format {
        Format::Text => {
            println!("n  classes  stable_dim  generators");
            for (n, classes, dim) in &rows {
                let g = if *n == 0 {
                    "-".to_string()
                } else {
                    gens[n - 1].to_string()
                };
                println!("{n}  {classes}  {dim}  {g}");
            }
        }
        Format::Json => {
            let arr: Vec<serde_json::Value> = rows
                .iter()
                .map(|(n, classes, dim)| {
                    serde_json::json!({
                        "degree": n,
                        "classes": classes,
                        "stable_dim": dim,
                        "generators": if *n == 0 { None } else { Some(gens[n - 1]) },
                    })
                })
                .collect();
            println!("{}", serde_json::Value::Array(arr));
        }
    }
    Ok(())
}

fn cmd_eval(
    poly: &str,
    model: &str,
    strategy: StrategyArg,
    format: Format,
) -> Result<(), String> {
    let p = load_poly(poly)?;
    let r = load_model(model)?;
    let value = eval_poly(&p, &r, strategy.into()).map_err(|e| e.to_string())?;
    let kappa = curvgraph::curvature::scalar(&r).map_err(|e| e.to_string())?;
    let cost: u64 = p
        .terms()
        .map(|(g, _)| eval_plan(g, r.m).estimated_cost)
        .sum();
    match format {
        Format::Text => {
            println!("value = {value:.12e}");
            eprintln!("m = {}, kappa = {kappa:.6e}, plan cost = {cost} multiplications", r.m);
        }
        Format::Json => {
            println!(
                "{}",
                serde_json::json!({
                    "value": value,
                    "m": r.m,
                    "kappa": kappa,
                    "plan_cost": cost,
                })
            );
        }
    }
    Ok(())
}

fn cmd_poly(name: &str, format: Format) -> Result<(), String> {
    let p = builtin_poly(name)?.ok_or_else(|| format!("unknown builtin `{name}`"))?;
    match format {
        Format::Text => print!("{p}"),
        Format::Json => println!("{}", poly_to_json(&p)),
    }
    Ok(())
}

fn cmd_delta(poly: &str, reduced: bool) -> Result<(), String> {
    let p = load_poly(poly)?;
    let pm = p.map_coeffs(|c| curvgraph::exactalg::PolyM::constant(c.clone()));
    let out = if reduced {
        let degree = pm.top_degree().unwrap_or(0);
        if degree == 0 {
            delta_m(&pm)
        } else {
            delta_m_reduced(&pm, degree).map_err(|e| e.to_string())?
        }
    } else {
        delta_m(&pm)
    };
    print!("{out}");
    Ok(())
}

fn cmd_ihx_dump(degree: usize, budget: &BudgetArgs) -> Result<(), String> {
    check_degree(degree, budget)?;
    for (k, rel) in ihx_relations(degree).iter().enumerate() {
        println!("# relation {k}");
        print!("{rel}");
    }
    // rank summary on stderr for orientation
    let (cb, indep) = connected_black_rank(degree);
    eprintln!(
        "degree {degree}: {} classes, rank {}, connected-black {cb} with {indep} relations",
        enumerate_degree(degree, false).len(),
        build_quotient(degree).rank(),
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<bool, String> = match &cli.command {
        Command::Enumerate {
            degree,
            connected_black,
            format,
            budget,
        } => cmd_enumerate(*degree, *connected_black, *format, budget).map(|_| true),
        Command::Dims {
            max_degree,
            format,
            budget,
        } => cmd_dims(*max_degree, *format, budget).map(|_| true),
        Command::Eval {
            poly,
            model,
            strategy,
            format,
        } => cmd_eval(poly, model, *strategy, *format).map(|_| true),
        Command::Poly { name, format } => cmd_poly(name, *format).map(|_| true),
        Command::Delta { poly, reduced } => cmd_delta(poly, *reduced).map(|_| true),
        Command::Ihx {
            sub: IhxCommand::Dump { degree, budget },
        } => cmd_ihx_dump(*degree, budget).map(|_| true),
        Command::Verify {
            suite,
            seed,
            tolerance,
            budget,
        } => suites::run_suite(suite, *seed, *tolerance, budget.allow_large),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
