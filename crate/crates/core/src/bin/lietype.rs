use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use lietype::fixedpoint::{fixed_datum, lift_diagnostic};
use lietype::invariants::{cap_from_env, degrees_with_cap, enumerate_weyl};
use lietype::padic::{
    closed_subgroup_equal, generated_subgroup_descriptor, mult_order, teichmuller_lift, unit_valuation, untwist_factor,
};
use lietype::pipeline::{
    classification_key, datum_from_label, fingerprint, fundamental_class_verdict, load_datum_file, parse_tau,
    parse_unit, tezuka_report, untwist,
};
use lietype::rootdata::RootDatum;
use lietype::Error;

#[derive(Parser)]
#[command(name = "lietype", version, about = "Invariants of l-compact groups and their twisted forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DatumArgs {
    /// Label such as A2, B3ad, T1xD4 or GL3
    #[arg(long = "type", value_name = "LABEL")]
    label: Option<String>,
    /// Datum file (JSON) with raw matrices
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Fundamental degrees and the Weyl group order
    Degrees {
        #[command(flatten)]
        datum: DatumArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Fixed-point root datum of a twisting
    FixedDatum {
        #[command(flatten)]
        datum: DatumArgs,
        /// id, diagram, diagram:<perm>, psi:<u>, auto:<name>, or a `*` product
        #[arg(long, default_value = "id")]
        tau: String,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        precision: Option<u32>,
        /// Also compare the fixed data of every maximal-rank lift
        #[arg(long)]
        lifts: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Untwist the form over q into a form over q' = 1 mod l
    Untwist {
        #[command(flatten)]
        datum: DatumArgs,
        #[arg(long, default_value = "id")]
        tau: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        precision: Option<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Series-level comparison of the finite group and free loop space cohomology
    Tezuka {
        #[command(flatten)]
        datum: DatumArgs,
        #[arg(long, default_value = "id")]
        tau: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        precision: Option<u32>,
        /// Truncation degree for series and spectral sequences
        #[arg(long, default_value_t = 24)]
        trunc: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Whether a fundamental class is guaranteed
    Verdict {
        #[command(flatten)]
        datum: DatumArgs,
        #[arg(long, default_value = "id")]
        tau: String,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        precision: Option<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Closed subgroup of Z_l^x generated by q
    Subgroup {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        q: String,
        /// Compare with the subgroup generated by this unit
        #[arg(long)]
        with: Option<String>,
        #[arg(long)]
        precision: Option<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Check the root-datum axioms
    Validate {
        #[command(flatten)]
        datum: DatumArgs,
        #[command(flatten)]
        common: Common,
    },
}

/// Result of a command: a JSON document, its text rendering, and whether
/// every check it reports passed.
struct Output {
    value: Value,
    text: String,
    ok: bool,
}

fn load(args: &DatumArgs) -> Result<RootDatum, Error> {
    match (&args.label, &args.file) {
        (Some(l), None) => datum_from_label(l),
        (None, Some(p)) => load_datum_file(p),
        (Some(_), Some(_)) => Err(Error::InvalidInput("give only one of --type and --file".into())),
        (None, None) => Err(Error::InvalidInput("one of --type or --file is required".into())),
    }
}

fn to_value<T: serde::Serialize>(t: &T) -> Result<Value, Error> {
    serde_json::to_value(t).map_err(|e| Error::Inconsistent(e.to_string()))
}

fn name(d: &RootDatum) -> String {
    d.label().map_or_else(|| "(unlabeled)".to_string(), |l| l.to_string())
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

fn run(cmd: &Command) -> Result<Output, Error> {
    let cap = cap_from_env();
    match cmd {
        Command::Degrees { datum, .. } => {
            let d = load(datum)?;
            let deg = degrees_with_cap(&d, cap)?;
            let fp = fingerprint(&d, cap)?;
            let reflections = deg.reflection_count();
            let text = format!(
                "datum: {}\nrank: {}\ndegrees: {}\nsource: {:?}\nweyl_order: {}\nreflections: {}\nfundamental_group: {:?}",
                name(&d),
                d.rank(),
                join(&deg.degrees),
                deg.source,
                fp.weyl_order,
                reflections,
                fp.fundamental_group.0
            );
            let value = json!({
                "datum": name(&d),
                "rank": d.rank(),
                "degrees": deg.degrees,
                "source": deg.source,
                "weyl_order": fp.weyl_order,
                "reflection_count": reflections,
                "fundamental_group": fp.fundamental_group,
            });
            Ok(Output { value, text, ok: true })
        }
        Command::FixedDatum { datum, tau, ell, precision, lifts, .. } => {
            let d = load(datum)?;
            let t = parse_tau(&d, tau, *ell, *precision)?;
            let e = enumerate_weyl(&d, cap)?;
            let f = fixed_datum(&d, &e, &t, *ell)?;
            let mut value = to_value(&f)?;
            let mut text = format!(
                "datum: {}\ntau: {tau}\nrank: {}\nrelative_weyl_order: {}\ndegrees: {}\nfundamental_group: {:?}\nspringer_rank: {}",
                name(&d),
                f.rank(),
                f.relative_order,
                join(&f.degrees.degrees),
                f.fundamental_group.0,
                f.springer_rank
            );
            let mut ok = true;
            if *lifts {
                let diag = lift_diagnostic(&d, &e, &t, *ell)?;
                text.push_str(&format!("\nmaximal_lifts: {}\nlifts_agree: {}", diag.lifts, diag.agree));
                value["lift_diagnostic"] = to_value(&diag)?;
                ok = diag.agree;
            }
            Ok(Output { value, text, ok })
        }
        Command::Untwist { datum, tau, q, ell, precision, .. } => {
            let d = load(datum)?;
            let t = parse_tau(&d, tau, *ell, *precision)?;
            let q = parse_unit(q, *ell, *precision)?;
            let r = untwist(&d, &t, &q, cap)?;
            let fp = r.fingerprint()?;
            let mut value = to_value(&r)?;
            let key = classification_key(&r);
            match &key {
                Ok(k) => value["classification_key"] = to_value(k)?,
                Err(e) => value["key_error"] = json!(e.code()),
            }
            let mut text = format!(
                "datum: {}\ne: {}\nzeta: {}\nq_prime: {}\nvaluation: {}\nfixed_rank: {}\nfingerprint: degrees [{}], order {}, pi1 {:?}",
                name(&d),
                r.e,
                r.zeta.residue(),
                r.q_prime.residue(),
                r.valuation,
                r.fixed.rank(),
                join(&fp.degrees),
                fp.weyl_order,
                fp.fundamental_group.0
            );
            if r.q_prime.prime() == 2 && r.q_prime.precision() >= 2 {
                text.push_str(&format!("\nq_prime_mod4: {}", r.q_prime.mod4()));
            }
            Ok(Output { value, text, ok: true })
        }
        Command::Tezuka { datum, tau, q, ell, precision, trunc, .. } => {
            let d = load(datum)?;
            let t = parse_tau(&d, tau, *ell, *precision)?;
            let q = parse_unit(q, *ell, *precision)?;
            let r = tezuka_report(&d, &t, &q, *trunc, cap)?;
            let verdict = r.verdict.as_ref().map_or("n/a", |v| v.status.as_str());
            let text = format!(
                "datum: {}\nfixed_degrees: {}\nLBG: {}\nBGq: {}\nseries_equal (model): {}\nem_collapse: {}\nrank_one: {} (generator {:?})\npsi_q: {:?}\nverdict: {verdict}\nconsistent: {}",
                name(&d),
                join(&r.fixed_degrees.degrees),
                r.lbg_series.formula,
                r.bgq_series.formula,
                r.series_equal,
                r.em_collapse.passed,
                r.rank_one.passed,
                r.rank_one.generator,
                r.psiq.verdict,
                r.consistent
            );
            Ok(Output { value: to_value(&r)?, text, ok: r.consistent })
        }
        Command::Verdict { datum, tau, ell, precision, .. } => {
            let d = load(datum)?;
            let t = parse_tau(&d, tau, *ell, *precision)?;
            let v = fundamental_class_verdict(&d, &t, *ell)?;
            let text = format!("datum: {}\nstatus: {}\nreasons: {}", name(&d), v.status.as_str(), v.reasons.join(", "));
            Ok(Output { value: to_value(&v)?, text, ok: true })
        }
        Command::Subgroup { ell, q, with, precision, .. } => {
            let u = parse_unit(q, *ell, *precision)?;
            let f = untwist_factor(&u);
            let descriptor = generated_subgroup_descriptor(&u)?;
            let mut value = json!({
                "q": u,
                "order_mod_l": mult_order(&u),
                "teichmuller": teichmuller_lift(&u),
                "q_prime": f.q_prime,
                "valuation": unit_valuation(&f.q_prime),
                "descriptor": descriptor,
            });
            let mut text = format!(
                "q: {}\norder_mod_l: {}\nteichmuller: {}\nq_prime: {}\nvaluation: {}\ndescriptor: {descriptor:?}",
                u.residue(),
                f.e,
                f.zeta.residue(),
                f.q_prime.residue(),
                unit_valuation(&f.q_prime)
            );
            if let Some(w) = with {
                let v = parse_unit(w, *ell, *precision)?;
                let eq = closed_subgroup_equal(&u, &v)?;
                value["same_closed_subgroup"] = json!(eq);
                text.push_str(&format!("\nsame_closed_subgroup: {eq}"));
            }
            Ok(Output { value, text, ok: true })
        }
        Command::Validate { datum, .. } => {
            let d = load(datum)?;
            let violations = d.validate();
            let matches = d.matches_label()?;
            let mut text = format!("datum: {}\nmatches_label: {matches}\nvalid: {}", name(&d), violations.is_empty());
            for v in &violations {
                text.push_str(&format!("\n  {v}"));
            }
            let value = json!({
                "datum": name(&d),
                "matches_label": matches,
                "valid": violations.is_empty(),
                "violations": violations,
            });
            Ok(Output { value, text, ok: violations.is_empty() })
        }
    }
}

fn json_flag(cmd: &Command) -> bool {
    match cmd {
        Command::Degrees { common, .. }
        | Command::FixedDatum { common, .. }
        | Command::Untwist { common, .. }
        | Command::Tezuka { common, .. }
        | Command::Verdict { common, .. }
        | Command::Subgroup { common, .. }
        | Command::Validate { common, .. } => common.json,
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).unwrap_or_else(|_| v.to_string())
}

// A closed pipe on stdout is not an error worth a panic.
fn emit(s: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{s}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let as_json = json_flag(&cli.command);
    match run(&cli.command) {
        Ok(out) => {
            if as_json {
                emit(&pretty(&out.value));
            } else {
                emit(&out.text);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            if as_json {
                emit(&pretty(&json!({"error": {"code": e.code(), "message": e.to_string()}})));
            } else {
                eprintln!("error [{}]: {e}", e.code());
            }
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
