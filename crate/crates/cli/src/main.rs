use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use twistcalc::analytic::{deligne_leray_scenario, ScenarioReport};
use twistcalc::config::{ConfigKind, InputConfig, VectorsFile};
use twistcalc::fujiki::{
    bbf_roundtrip, fujiki_constant, intersection_number, matching_sum, permutation_sum, BeauvilleSetup,
    FujikiFamily, PERMUTATION_ORACLE_MAX_N,
};
use twistcalc::lattice::{self, LatticeVector};
use twistcalc::section_ring::{build_ring, lambda_cohomology};
use twistcalc::sha::{bm_sha_report, degree_twist_generator, og10_lattice_check, og10_sha_report, CheckItem, CheckRecord};
use twistcalc::Error;

#[derive(Parser, Debug)]
#[command(name = "twistcalc", version, about = "Integral bookkeeping for intermediate Jacobian fibrations")]
struct Cli {
    /// Emit JSON instead of aligned tables.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct InputArgs {
    /// JSON or TOML input file.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
struct K3Args {
    #[command(flatten)]
    input: InputArgs,
    /// Genus of the linear system when no config is given.
    #[arg(long)]
    genus: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sections and Tate-Shafarevich data for the cubic fourfold fibration.
    Og10Sha(InputArgs),
    /// The Beauville-Mukai analogue for a polarized K3 surface.
    BmSha(K3Args),
    /// The degree twist generator h^2 - 3b mod 3.
    TwistGen(InputArgs),
    /// Lattice checks for H^4 of the cubic and H^2 of the OG10 fibration.
    LatticeCheck(InputArgs),
    /// Cohomology of the complex Lambda on the base.
    LambdaCohomology {
        #[command(flatten)]
        args: K3Args,
        /// `cubic` or `k3` when no config is given.
        #[arg(long, default_value = "cubic")]
        kind: String,
    },
    /// The Deligne-Leray spectral sequence of the universal hyperplane section.
    DeligneSs(InputArgs),
    /// Fujiki relation, permutation and matching sums, and the BBF round trip.
    FujikiCheck {
        #[arg(long, default_value = "og10")]
        family: String,
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// JSON/TOML file with `vectors` and optionally `gram`/`lattice`, `theta`, `eta`.
        #[arg(long)]
        vectors: Option<PathBuf>,
    },
}

/// Check failures exit with 2, input errors with 1.
enum Outcome {
    Passed,
    ChecksFailed,
}

fn load(input: &InputArgs, kind: ConfigKind, genus: Option<u32>) -> anyhow::Result<InputConfig> {
    let mut cfg = match &input.config {
        Some(path) => InputConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => InputConfig::default(),
    };
    cfg.kind.get_or_insert(kind);
    if kind == ConfigKind::K3 && cfg.g.is_none() {
        cfg.g = Some(genus.unwrap_or(2));
    }
    Ok(cfg)
}

fn table(rows: &[(String, String)]) -> String {
    let w = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<w$}  {v}\n")).collect()
}

fn row(k: impl Into<String>, v: impl ToString) -> (String, String) {
    (k.into(), v.to_string())
}

fn checks_rows(rec: &CheckRecord) -> Vec<(String, String)> {
    rec.items
        .iter()
        .map(|i| row(format!("check {}", i.name), format!("{} ({})", if i.passed { "pass" } else { "FAIL" }, i.detail)))
        .collect()
}

fn emit(json_out: bool, value: Value, text: String) {
    if json_out {
        println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
    } else {
        print!("{text}");
    }
}

fn og10_sha(json_out: bool, input: &InputArgs) -> anyhow::Result<Outcome> {
    let r = og10_sha_report(&load(input, ConfigKind::Cubic, None)?.cubic_input()?)?;
    let mut rows = vec![
        row("defect general", r.defect_general),
        row("divisibility d of h2 in NS", &r.d),
        row("H0(B,J)", format!("Z^{}", r.h0_j)),
        row("H0(B,J~)", format!("Z^{}", r.h0_jtilde)),
        row("H1(B,J~)", r.h1_jtilde),
        row("first term", &r.first_term),
        row("Sha0 source", &r.sha0.source),
        row("first map injective", r.sha0.first_map_injective),
        row("Sha0 middle", r.sha0.middle),
        row("Sha0 quotient", r.sha0.quotient),
        row("Mordell-Weil rank >=", r.mw_rank),
        row("rank Sigma^perp", r.sigma_perp_rank),
    ];
    if let Some(t) = &r.twist_generator {
        rows.push(row("twist generator mod 3", &t.class_mod3));
        rows.push(row("twist generator order", &t.order));
    }
    for h in &r.higher {
        rows.push(row(format!("H{}(B,J)", 2 * h.k), &h.h2k_j));
        rows.push(row(format!("H{}(B,J~)", 2 * h.k), &h.h2k_jtilde));
    }
    for n in &r.not_computed {
        rows.push(row("not computed", n));
    }
    rows.extend(checks_rows(&r.og10_checks));
    emit(json_out, serde_json::to_value(&r)?, table(&rows));
    Ok(if r.og10_checks.passed() { Outcome::Passed } else { Outcome::ChecksFailed })
}

fn bm_sha(json_out: bool, args: &K3Args) -> anyhow::Result<Outcome> {
    let r = bm_sha_report(&load(&args.input, ConfigKind::K3, args.genus)?.k3_input()?)?;
    let mut rows = vec![
        row("genus", r.genus),
        row("divisibility d of L in NS", &r.d),
        row("H0(B,J)", format!("Z^{}", r.h0_j)),
        row("H0(B,J~)", format!("Z^{}", r.h0_jtilde)),
        row("first term", &r.first_term),
        row("first map injective", r.sha0.first_map_injective),
        row("Br_an", r.brauer),
    ];
    for (k, g) in r.lambda.iter().enumerate() {
        rows.push(row(format!("H{k}(B,Lambda)"), g));
    }
    emit(json_out, serde_json::to_value(&r)?, table(&rows));
    Ok(Outcome::Passed)
}

fn twist_gen(json_out: bool, input: &InputArgs) -> anyhow::Result<Outcome> {
    let t = degree_twist_generator(&load(input, ConfigKind::Cubic, None)?.cubic_input()?)?;
    let rows = vec![
        row("class mod 3", &t.class_mod3),
        row("dual class b", &t.dual_class),
        row("order", &t.order),
        row("primitive", t.primitive),
    ];
    emit(json_out, serde_json::to_value(&t)?, table(&rows));
    Ok(if t.primitive { Outcome::Passed } else { Outcome::ChecksFailed })
}

fn lattice_check(json_out: bool, input: &InputArgs) -> anyhow::Result<Outcome> {
    let c = load(input, ConfigKind::Cubic, None)?.cubic_input()?;
    let lat = &c.hodge.lattice;
    let rec = og10_lattice_check(lat, &c.h2, &c.hodge.ns_basis);
    let inv = lat.invariants();
    let (_, prim) = lat.orthogonal_complement(&[c.h2.clone()])?;
    let pinv = prim.invariants();
    let mut rows = vec![
        row("H4 rank", inv.rank),
        row("H4 signature", format!("{:?}", inv.signature)),
        row("H4 determinant", &inv.determinant),
        row("(h2)^2", lat.norm(&c.h2)?),
        row("(h2)^perp rank", pinv.rank),
        row("(h2)^perp determinant", &pinv.determinant),
        row("(h2)^perp discriminant group", &pinv.discriminant_group),
        row("(h2)^perp even", pinv.even),
    ];
    rows.extend(checks_rows(&rec));
    let value = json!({ "h4": inv, "primitive": pinv, "checks": rec, "passed": rec.passed() });
    emit(json_out, value, table(&rows));
    Ok(if rec.passed() { Outcome::Passed } else { Outcome::ChecksFailed })
}

fn lambda(json_out: bool, args: &K3Args, kind: &str) -> anyhow::Result<Outcome> {
    let kind = match kind {
        "cubic" => ConfigKind::Cubic,
        "k3" => ConfigKind::K3,
        other => bail!("unknown kind {other:?}, expected cubic or k3"),
    };
    let cfg = load(&args.input, kind, args.genus)?;
    let ring = build_ring(&cfg.preset()?)?;
    let top = 2 * ring.preset().base_dim - 1;
    let groups = (0..=top).map(|k| lambda_cohomology(&ring, k)).collect::<Result<Vec<_>, _>>()?;
    let ranks = ring.graded_ranks();
    let mut rows: Vec<(String, String)> =
        groups.iter().enumerate().map(|(k, g)| row(format!("H{k}(B,Lambda)"), g)).collect();
    rows.extend(ranks.iter().enumerate().filter(|(_, r)| **r > 0).map(|(k, r)| row(format!("H{k}(Y,Z)"), format!("Z^{r}"))));
    let value = json!({
        "lambda": groups.iter().enumerate().map(|(k, g)| (k.to_string(), json!(g.to_string()))).collect::<serde_json::Map<_, _>>(),
        "section_ring_ranks": ranks.iter().enumerate().map(|(k, r)| (k.to_string(), json!(r))).collect::<serde_json::Map<_, _>>(),
    });
    emit(json_out, value, table(&rows));
    Ok(Outcome::Passed)
}

fn render_scenario(r: &ScenarioReport) -> String {
    let mut out = String::new();
    for page in [&r.e2, &r.e3] {
        out.push_str(&page.render((0, 10), (0, 6)));
        out.push('\n');
    }
    let mut rows = vec![row("degenerates at", format!("E_{}", r.degenerates_at))];
    for (n, g) in &r.diagonals {
        rows.push(row(format!("H{n}(Y,Z(2)_D)"), g));
    }
    rows.push(row("H0(B,J~)", &r.h0_jtilde));
    rows.push(row("H1(B,J~)", &r.h1_jtilde));
    rows.push(row("degree 6 rank", r.degree6_rank));
    rows.push(row("degree 4", &r.degree4_splitting));
    out.push_str(&table(&rows));
    out
}

fn deligne_ss(json_out: bool, input: &InputArgs) -> anyhow::Result<Outcome> {
    let cfg = load(input, ConfigKind::Cubic, None)?;
    match deligne_leray_scenario(&cfg.scenario_input()?) {
        Ok(r) => {
            emit(json_out, serde_json::to_value(&r)?, render_scenario(&r));
            Ok(Outcome::Passed)
        }
        Err(e @ Error::BudgetMismatch { .. }) => {
            emit(json_out, json!({ "passed": false, "error": e.to_string() }), format!("check FAIL: {e}\n"));
            Ok(Outcome::ChecksFailed)
        }
        Err(e) => Err(e.into()),
    }
}

fn fujiki(json_out: bool, family: &str, n: usize, vectors: Option<&PathBuf>) -> anyhow::Result<Outcome> {
    let family: FujikiFamily = family.parse()?;
    let file = vectors.map(|p| VectorsFile::load(p)).transpose()?;
    let lattice = match file.as_ref().map(VectorsFile::lattice_or_none).transpose()?.flatten() {
        Some(l) => l,
        None => match family {
            FujikiFamily::Og10 => lattice::og10_h2_default(),
            FujikiFamily::K3Hilb => lattice::k3_lattice(),
        },
    };
    let rank = lattice.rank();
    let setup = BeauvilleSetup::new(lattice.clone(), fujiki_constant(family, n)?, n)?;
    let vs: Vec<LatticeVector> = match &file {
        Some(f) => f.vectors.clone(),
        None => (0..2 * n).map(|i| LatticeVector::basis(rank, (i + 2) % rank).add(&LatticeVector::basis(rank, (3 * i + 5) % rank))).collect(),
    };
    for (i, v) in vs.iter().enumerate() {
        if v.len() != rank {
            bail!("vector #{i} has length {}, lattice has rank {rank}", v.len());
        }
    }
    let mut items = Vec::new();
    let mut push = |name: String, passed: bool, detail: String| items.push(CheckItem { name, passed, detail });

    for (i, u) in vs.iter().enumerate() {
        let lhs = intersection_number(&setup, &vec![u.clone(); 2 * n])?;
        let rhs = &setup.fujiki_constant * num_pow(lattice.norm(u)?, n);
        push(format!("fujiki_relation_{i}"), lhs == rhs, format!("∫u^{} = {lhs}, c_M q(u)^{n} = {rhs}", 2 * n));
    }
    if vs.len() == 2 * n && n <= PERMUTATION_ORACLE_MAX_N {
        let p = permutation_sum(&vs, &lattice)?;
        let m = matching_sum(&vs, &lattice)?;
        let scale = BigInt::from(1u32) << n;
        let scale = scale * (1..=n).product::<usize>();
        push("permutation_vs_matching".into(), p == &scale * &m, format!("permutations {p}, matchings {m}"));
    }
    let (theta, eta) = match (&file, family) {
        (Some(VectorsFile { theta: Some(t), eta: Some(e), .. }), _) => (Some(t.clone()), Some(e.clone())),
        (_, FujikiFamily::Og10) if rank == 24 => {
            let (t, e) = lattice::og10_theta_eta();
            (Some(t), Some(e))
        }
        _ => (None, None),
    };
    if let (Some(t), Some(e)) = (theta, eta) {
        for (i, pair) in vs.chunks(2).enumerate().filter(|(_, p)| p.len() == 2) {
            let orth = |v: &LatticeVector| -> anyhow::Result<bool> {
                Ok(lattice.pairing(v, &t)?.is_zero() && lattice.pairing(v, &e)?.is_zero())
            };
            if !(orth(&pair[0])? && orth(&pair[1])?) {
                continue;
            }
            let q = bbf_roundtrip(&setup, &pair[0], &pair[1], &t, &e)?;
            let expected = lattice.pairing(&pair[0], &pair[1])?;
            push(format!("bbf_roundtrip_{i}"), q == expected.clone().into(), format!("{q} vs q(u,v) = {expected}"));
        }
    }
    let rec = CheckRecord { items };
    let value = json!({
        "family": format!("{family:?}"),
        "n": n,
        "fujiki_constant": setup.fujiki_constant.to_string(),
        "checks": rec,
        "passed": rec.passed(),
    });
    let mut rows = vec![row("family", format!("{family:?}")), row("n", n), row("c_M", &setup.fujiki_constant)];
    rows.extend(checks_rows(&rec));
    emit(json_out, value, table(&rows));
    Ok(if rec.passed() { Outcome::Passed } else { Outcome::ChecksFailed })
}

fn num_pow(x: BigInt, n: usize) -> BigRational {
    BigRational::from_integer(num_traits::pow(x, n))
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Og10Sha(a) => og10_sha(cli.json, a),
        Command::BmSha(a) => bm_sha(cli.json, a),
        Command::TwistGen(a) => twist_gen(cli.json, a),
        Command::LatticeCheck(a) => lattice_check(cli.json, a),
        Command::LambdaCohomology { args, kind } => lambda(cli.json, args, kind),
        Command::DeligneSs(a) => deligne_ss(cli.json, a),
        Command::FujikiCheck { family, n, vectors } => fujiki(cli.json, family, *n, vectors.as_ref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Passed) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
