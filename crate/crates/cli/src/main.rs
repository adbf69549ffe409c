use std::process::ExitCode;

use num_traits::Zero;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use serde::Serialize;
use walg::brst::{self, BrstAlgebra};
use walg::dsred::{reduce, GammaAlgebra, KValue, Reduction};
use walg::hamflow::{self, HamiltonianSystem, LocalFunctional};
use walg::liealg::{loop_label, make_sl, LieAlgebra, Nilpotent};
use walg::pva::{check_all_pairs, check_all_triples, check_compatibility, CheckReport, Presentation};
use walg::{Error, Q};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "walg", version, about = "Exact computations with classical W-algebras")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum NilArg {
    Principal,
    Minimal,
}

#[derive(Args, Clone, Serialize)]
struct AlgebraArgs {
    /// Simple Lie algebra, `sl<n>`.
    #[arg(long, default_value = "sl2")]
    algebra: String,
    #[arg(long, value_enum, default_value_t = NilArg::Principal)]
    nilpotent: NilArg,
    /// Loop degree of the fractional reduction.
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Level: a rational number or `k` for the symbolic level.
    #[arg(long, default_value = "k")]
    k: String,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum PvaPreset {
    Virasoro,
    Kdv,
    Fractional,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum HierarchyPreset {
    Kdv,
    Reduction,
}

#[derive(Subcommand)]
enum Command {
    /// Check the axioms of a λ-bracket presentation.
    VerifyPva {
        #[arg(long, value_enum, conflicts_with = "file")]
        preset: Option<PvaPreset>,
        /// Presentation in the text format.
        #[arg(long)]
        file: Option<std::path::PathBuf>,
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Central charge for the KdV preset.
        #[arg(long, default_value = "1")]
        c: String,
    },
    /// Canonical form of the universal Lax operator.
    DsReduce {
        #[command(flatten)]
        alg: AlgebraArgs,
    },
    /// Free generators of the reduction.
    Generators {
        #[command(flatten)]
        alg: AlgebraArgs,
    },
    /// λ-brackets among the free generators.
    BracketTable {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Which of the two brackets.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
    },
    /// Conserved densities of an integrable hierarchy.
    Hierarchy {
        #[arg(long, value_enum, default_value_t = HierarchyPreset::Reduction)]
        preset: HierarchyPreset,
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long, default_value = "1")]
        c: String,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        depth: u32,
    },
    /// The KdV Lenard chain.
    Kdv {
        #[arg(long, default_value = "1")]
        c: String,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        depth: u32,
    },
    /// Scalar equation obtained from the sl2, m = 1 flow.
    KdvFromSl2 {
        #[arg(long, default_value = "k")]
        k: String,
    },
    /// Identities of the BRST complex.
    BrstCheck {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        weight_bound: u32,
        /// Seed for the random sample of the d₍₀₎² check.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Serialize)]
struct Entry {
    name: String,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<String>,
}

impl Entry {
    fn value(name: impl Into<String>, value: impl ToString) -> Self {
        Entry { name: name.into(), pass: true, residual: None, value: Some(value.to_string()) }
    }

    fn check(name: impl Into<String>, pass: bool, residual: Option<String>) -> Self {
        Entry { name: name.into(), pass, residual, value: None }
    }

    fn from_report(r: &CheckReport) -> Self {
        let name = if r.arguments.is_empty() {
            r.check.clone()
        } else {
            format!("{}({})", r.check, r.arguments.join(", "))
        };
        Entry::check(name, r.pass, r.residual.clone())
    }
}

#[derive(Serialize)]
struct Report {
    schema_version: u32,
    command: String,
    config: serde_json::Value,
    results: Vec<Entry>,
}

fn lie_of(a: &AlgebraArgs) -> Result<LieAlgebra, Error> {
    let n: usize = a
        .algebra
        .strip_prefix("sl")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Config(format!("unknown algebra `{}`", a.algebra)))?;
    let nil = match a.nilpotent {
        NilArg::Principal => Nilpotent::Principal,
        NilArg::Minimal => Nilpotent::Minimal,
    };
    make_sl(n, nil)
}

fn level(s: &str) -> Result<KValue, Error> {
    s.parse()
}

fn rational(s: &str) -> Result<Q, Error> {
    s.trim().parse().map_err(|_| Error::Config(format!("bad rational `{s}`")))
}

fn reduction(a: &AlgebraArgs) -> Result<Reduction, Error> {
    Reduction::new(&lie_of(a)?, a.m, level(&a.k)?)
}

fn gamma_side(a: &AlgebraArgs) -> Result<(Reduction, GammaAlgebra, Presentation, Presentation), Error> {
    let red = reduction(a)?;
    let (_, table) = reduce(&red)?;
    let gamma = GammaAlgebra::new(&red, &table)?;
    let (w1, w2) = red.fractional_presentations();
    let (p1, p2) = gamma.presentations(&red, &w1, &w2)?;
    Ok((red, gamma, p1, p2))
}

fn checks(reports: &[CheckReport]) -> Vec<Entry> {
    reports.iter().map(Entry::from_report).collect()
}

fn virasoro() -> Result<Presentation, Error> {
    Presentation::from_text("even u\nparam c\n{u, u} = u' + 2*L*u + c*L^3\n")
}

fn verify_pva(preset: Option<PvaPreset>, file: Option<&std::path::Path>, a: &AlgebraArgs, c: &str) -> Result<Vec<Entry>, Error> {
    let mut out = Vec::new();
    let axioms = |p: &Presentation| -> Vec<Entry> {
        let gens: Vec<_> = p.algebra().fields().collect();
        let mut r = check_all_pairs(p, &gens);
        r.extend(check_all_triples(p, &gens));
        checks(&r)
    };
    match (preset, file) {
        (_, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            out.extend(axioms(&Presentation::from_text(&text)?));
        }
        (Some(PvaPreset::Virasoro), None) => out.extend(axioms(&virasoro()?)),
        (Some(PvaPreset::Kdv), None) => {
            let (ph, pk) = hamflow::kdv_pair(&rational(c)?)?;
            out.extend(axioms(&ph));
            out.extend(axioms(&pk));
            let gens: Vec<_> = ph.algebra().fields().collect();
            out.extend(checks(&check_compatibility(&ph, &pk, &gens)?));
        }
        (Some(PvaPreset::Fractional), None) => {
            let red = reduction(a)?;
            let (p1, p2) = red.fractional_presentations();
            let gens = red.gens();
            out.extend(axioms(&p1));
            out.extend(axioms(&p2));
            out.extend(checks(&check_compatibility(&p1, &p2, &gens)?));
        }
        (None, None) => return Err(Error::Config("give --preset or --file".into())),
    }
    Ok(out)
}

fn generators(a: &AlgebraArgs) -> Result<Vec<Entry>, Error> {
    let red = reduction(a)?;
    let (_, table) = reduce(&red)?;
    Ok(table.gens.iter().map(|g| Entry::value(g.label.clone(), &g.gamma)).collect())
}

fn ds_reduce(a: &AlgebraArgs) -> Result<Vec<Entry>, Error> {
    let red = reduction(a)?;
    let (_, table) = reduce(&red)?;
    let mut out = Vec::new();
    for ((j, i), c) in table.qcan.terms() {
        out.push(Entry::value(format!("q[{}]", loop_label(&red.lie, *j, *i)), c));
    }
    Ok(out)
}

fn bracket_table(a: &AlgebraArgs, which: u8) -> Result<Vec<Entry>, Error> {
    let (_, gamma, p1, p2) = gamma_side(a)?;
    let p = if which == 1 { p1 } else { p2 };
    let alg = gamma.alg.clone();
    let mut out = Vec::new();
    for &x in &gamma.ids {
        for &y in &gamma.ids {
            let v = p.get(x, y);
            out.push(Entry::value(format!("{{{}, {}}}_{which}", alg.name(x), alg.name(y)), v));
        }
    }
    Ok(out)
}

fn kdv(c: &str, depth: u32) -> Result<Vec<Entry>, Error> {
    let c = rational(c)?;
    let hs = hamflow::kdv_hierarchy(&c, depth as usize)?;
    let (ph, pk) = hamflow::kdv_pair(&c)?;
    let mut out: Vec<Entry> = hs.iter().enumerate().map(|(n, h)| Entry::value(format!("h{n}"), &h.density)).collect();
    for (a, ha) in hs.iter().enumerate() {
        for (b, hb) in hs.iter().enumerate().skip(a + 1) {
            let ok = hamflow::involution_check(&ph, ha, hb) && hamflow::involution_check(&pk, ha, hb);
            out.push(Entry::check(format!("involution(h{a}, h{b})"), ok, None));
        }
    }
    Ok(out)
}

fn reduction_hierarchy(a: &AlgebraArgs, depth: u32) -> Result<Vec<Entry>, Error> {
    let sys = HamiltonianSystem::new(&lie_of(a)?, a.m, level(&a.k)?, depth)?;
    let mut out: Vec<Entry> = sys.hams.iter().enumerate().map(|(n, h)| Entry::value(format!("H{n}"), h)).collect();
    let inv = sys.involution_matrix();
    for (x, row) in inv.iter().enumerate() {
        for (y, ok) in row.iter().enumerate().skip(x + 1) {
            out.push(Entry::check(format!("involution(H{x}, H{y})"), *ok, None));
        }
    }
    let fs: Vec<LocalFunctional> = sys.hams.iter().cloned().map(LocalFunctional::new).collect();
    out.push(Entry::check("independent", hamflow::linearly_independent(&fs, &sys.gens()), None));
    out.extend(checks(&sys.double_hamiltonian()));
    Ok(out)
}

fn kdv_from_sl2(k: &str) -> Result<Vec<Entry>, Error> {
    let sys = HamiltonianSystem::new(&make_sl(2, Nilpotent::Principal)?, 1, level(k)?, 2)?;
    let r = hamflow::reduce_to_kdv(&sys)?;
    let mut out: Vec<Entry> = r.flow.iter().map(|(n, p)| Entry::value(format!("{n}_t"), p)).collect();
    out.push(Entry::value("equation", &r.equation));
    Ok(out)
}

fn brst_check(a: &AlgebraArgs, weight_bound: u32, seed: u64) -> Result<Vec<Entry>, Error> {
    let lie = lie_of(a)?;
    let b = BrstAlgebra::new(&lie, level(&a.k)?)?;
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut out = checks(&brst::run_checks(&b, &mut rng, weight_bound));
    let numeric = match level(&a.k)? {
        KValue::Value(v) if !v.is_zero() => Some(v),
        KValue::Value(_) => None,
        KValue::Symbol => Some(Q::from_integer(1.into())),
    };
    if let Some(k) = numeric {
        let bn = BrstAlgebra::new(&lie, KValue::Value(k))?;
        out.extend(checks(&brst::check_energy_momentum(&bn, weight_bound)?));
    }
    Ok(out)
}

fn run(cli: &Cli) -> Result<(String, serde_json::Value, Vec<Entry>), Error> {
    Ok(match &cli.command {
        Command::VerifyPva { preset, file, alg, c } => (
            "verify-pva".into(),
            serde_json::json!({"preset": preset, "file": file, "algebra": alg, "c": c}),
            verify_pva(*preset, file.as_deref(), alg, c)?,
        ),
        Command::DsReduce { alg } => ("ds-reduce".into(), serde_json::json!({"algebra": alg}), ds_reduce(alg)?),
        Command::Generators { alg } => ("generators".into(), serde_json::json!({"algebra": alg}), generators(alg)?),
        Command::BracketTable { alg, which } => (
            "bracket-table".into(),
            serde_json::json!({"algebra": alg, "which": which}),
            bracket_table(alg, *which)?,
        ),
        Command::Hierarchy { preset, alg, c, depth } => {
            let res = match preset {
                HierarchyPreset::Kdv => kdv(c, *depth)?,
                HierarchyPreset::Reduction => reduction_hierarchy(alg, *depth)?,
            };
            ("hierarchy".into(), serde_json::json!({"preset": preset, "algebra": alg, "c": c, "depth": depth}), res)
        }
        Command::Kdv { c, depth } => ("kdv".into(), serde_json::json!({"c": c, "depth": depth}), kdv(c, *depth)?),
        Command::KdvFromSl2 { k } => ("kdv-from-sl2".into(), serde_json::json!({"k": k}), kdv_from_sl2(k)?),
        Command::BrstCheck { alg, weight_bound, seed } => (
            "brst-check".into(),
            serde_json::json!({"algebra": alg, "weight_bound": weight_bound, "seed": seed}),
            brst_check(alg, *weight_bound, *seed)?,
        ),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, config, results) = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            // identity failures detected inside a module are not usage errors
            return ExitCode::from(if matches!(e, Error::Check(_)) { 1 } else { 2 });
        }
    };
    let ok = results.iter().all(|r| r.pass);
    match cli.format {
        Format::Json => {
            let rep = Report { schema_version: SCHEMA_VERSION, command, config, results };
            println!("{}", serde_json::to_string_pretty(&rep).expect("serializable"));
        }
        Format::Text => {
            for r in &results {
                match (&r.value, r.pass, &r.residual) {
                    (Some(v), _, _) => println!("{} = {v}", r.name),
                    (None, true, _) => println!("PASS {}", r.name),
                    (None, false, Some(res)) => println!("FAIL {}: {res}", r.name),
                    (None, false, None) => println!("FAIL {}", r.name),
                }
            }
        }
    }
    ExitCode::from(if ok { 0 } else { 1 })
}
