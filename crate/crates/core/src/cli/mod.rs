//! The `diracbi` command line: instance files in, check reports out.
//!
//! Exit codes: 0 when every check passes, 1 when some check fails or errors,
//! 2 for ill-formed input or when nothing applies.

pub mod instance;
pub mod report;

use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bialgebroid::{build_courant_c, check_la_dirac, check_manin_pair, verify_appendix_lemmas, AManinPair};
use crate::check::{prefixed, Outcome};
use crate::courant::{
    check_courant_axioms, check_dirac, dirac_from_2form, dirac_from_poisson, standard_courant, Carrier,
    CourantPresentation,
};
use crate::error::{Error, Result};
use crate::sampling::CheckConfig;
use crate::scalar::Scalar;
use crate::zoo::{
    bialgebroid_from_iis, bialgebroid_from_im2form, bialgebroid_from_lie_bialgebroid, bialgebroid_pipeline,
    check_instance, courant_double, instance_bialgebroid, preset, preset_names, ZooInstance, PRESETS,
};

pub use instance::{emit, ingest, parse_instance, Instance};
pub use report::{Collector, Report};

pub const SUITES: &[&str] = &[
    "courant",
    "dirac",
    "la-dirac",
    "manin",
    "lemmas",
    "bialgebroid",
    "iis",
    "im2form",
    "bialgebra",
    "all",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "diracbi",
    version,
    about = "Exact checks for Courant algebroids, Dirac structures and Dirac bialgebroids"
)]
pub struct Cli {
    /// Seed of the random test sections.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Random trials per identity, on top of the basis tuples.
    #[arg(long, global = true, default_value_t = 8)]
    trials: usize,
    /// Maximal coefficient degree of random test sections.
    #[arg(long = "max-degree", global = true, default_value_t = 2)]
    max_degree: u32,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a suite of checks on an instance file.
    Check {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
        file: String,
    },
    /// Run a named example, or write it as an instance file.
    Zoo {
        /// Preset name; omit to list the presets.
        name: Option<String>,
        #[arg(long)]
        emit: Option<String>,
    },
    /// Check the auxiliary lemmas on every LA-Dirac triple of an instance.
    Lemmas { file: String },
    /// Build the Courant algebroid of an A-Manin pair and write it as JSON.
    BuildManin { file: String },
}

/// Runs the suite on an instance. Fails when no object of the file is
/// covered by the suite.
pub fn run_suite(inst: &Instance, suite: &str, cfg: &CheckConfig) -> Result<Report> {
    let mut col = Collector::new(cfg);
    if suite == "all" {
        let wanted: Vec<String> = match &inst.suites {
            Some(s) => s.clone(),
            None => SUITES.iter().filter(|s| **s != "all").map(|s| s.to_string()).collect(),
        };
        for s in wanted {
            suite_into(inst, &s, cfg, &mut col);
        }
    } else {
        suite_into(inst, suite, cfg, &mut col);
    }
    if col.is_empty() {
        return Err(Error::Precondition(format!(
            "{}: no objects to which suite `{suite}` applies",
            inst.path
        )));
    }
    Ok(col.finish(suite, &inst.path))
}

fn with_result<T>(name: &str, r: Result<T>, f: impl FnOnce(T) -> Vec<Outcome>) -> Vec<Outcome> {
    match r {
        Ok(x) => f(x),
        Err(e) => vec![Outcome::error(name, e.to_string())],
    }
}

fn family_manin(inst: &ZooInstance, cfg: &CheckConfig) -> Result<AManinPair> {
    match inst {
        ZooInstance::LieBialgebroid(lb) => Ok(bialgebroid_from_lie_bialgebroid(lb)?.1),
        ZooInstance::Im2Form(im) => Ok(bialgebroid_from_im2form(im)?.1),
        ZooInstance::Iis(iis) => Ok(bialgebroid_from_iis(iis, cfg)?.1),
        ZooInstance::Bialgebra(_) => {
            let db = instance_bialgebroid(inst, cfg)?;
            build_courant_c(&crate::bialgebroid::triple_from_bialgebroid(&db, None)?)
        }
    }
}

fn family_key(inst: &ZooInstance) -> &'static str {
    match inst {
        ZooInstance::LieBialgebroid(_) => "lie_bialgebroid",
        ZooInstance::Im2Form(_) => "sigma",
        ZooInstance::Iis(_) => "iis",
        ZooInstance::Bialgebra(_) => "bialgebra",
    }
}

fn suite_into(inst: &Instance, suite: &str, cfg: &CheckConfig, col: &mut Collector) {
    let families = inst.families();
    match suite {
        "courant" => {
            for (name, c) in &inst.courants {
                col.group(|| prefixed(name, check_courant_axioms(c, cfg)));
            }
            if let Some(lb) = &inst.lie_bialgebroid {
                col.group(|| prefixed("lie_bialgebroid.double", check_courant_axioms(&courant_double(lb), cfg)));
            }
            for (name, t) in &inst.triples {
                let p = format!("{name}.C");
                col.group(|| {
                    with_result(&p, build_courant_c(t), |mp| {
                        prefixed(&p, check_courant_axioms(&mp.c, cfg))
                    })
                });
            }
        }
        "dirac" => {
            for d in &inst.diracs {
                let c = inst
                    .courants
                    .iter()
                    .find(|(n, _)| *n == d.courant)
                    .map(|(_, c)| c)
                    .expect("validated on ingest");
                col.group(|| with_result(&d.name, check_dirac(c, &d.vectors, cfg), |v| prefixed(&d.name, v)));
            }
            let patch = inst.patch.as_ref().expect("validated on ingest");
            let std = standard_courant(patch);
            if let Some(pi) = &inst.pi {
                col.group(|| {
                    with_result(
                        "pi",
                        dirac_from_poisson(patch, pi).and_then(|s| check_dirac(&std, s.vectors(), cfg)),
                        |v| prefixed("pi", v),
                    )
                });
            }
            if let Some(w) = &inst.omega {
                col.group(|| {
                    with_result(
                        "omega",
                        dirac_from_2form(patch, w).and_then(|s| check_dirac(&std, s.vectors(), cfg)),
                        |v| prefixed("omega", v),
                    )
                });
            }
        }
        "la-dirac" => {
            for (name, t) in &inst.triples {
                col.group(|| prefixed(name, check_la_dirac(t, cfg)));
            }
        }
        "manin" => {
            for (name, t) in &inst.triples {
                col.group(|| {
                    with_result(name, build_courant_c(t), |mp| {
                        prefixed(name, check_manin_pair(&mp, cfg))
                    })
                });
            }
            for f in &families {
                let p = format!("{}.manin", family_key(f));
                col.group(|| {
                    with_result(&p, family_manin(f, cfg), |mp| {
                        prefixed(family_key(f), check_manin_pair(&mp, cfg))
                    })
                });
            }
        }
        "lemmas" => {
            for (name, t) in &inst.triples {
                col.group(|| prefixed(name, verify_appendix_lemmas(t, cfg)));
            }
        }
        "bialgebroid" => {
            for (name, db) in &inst.bialgebroids {
                col.group(|| prefixed(name, bialgebroid_pipeline(db, cfg)));
            }
            for f in families.iter().filter(|f| matches!(f, ZooInstance::LieBialgebroid(_))) {
                col.group(|| check_instance(f, cfg));
            }
        }
        "iis" | "im2form" | "bialgebra" => {
            for f in families.iter().filter(|f| f.family() == suite) {
                col.group(|| check_instance(f, cfg));
            }
        }
        _ => {}
    }
}

fn show_mat(c: &CourantPresentation, m: &[Vec<Scalar>]) -> Vec<Vec<String>> {
    m.iter().map(|row| c.patch.show_all(row)).collect()
}

/// JSON description of the Courant algebroid of an A-Manin pair: carrier
/// frames, and pairing, anchor, `𝒟` and bracket on a frame of the carrier.
pub fn manin_json(source: &str, mp: &AManinPair) -> serde_json::Value {
    let c = &mp.c;
    let basis = c.basis();
    let (admissible, graph) = match &c.carrier {
        Carrier::Quotient(q) => (
            Some(show_mat(c, q.admissible.vectors())),
            Some(show_mat(c, q.graph.vectors())),
        ),
        Carrier::Trivial(_) => (None, None),
    };
    let coords = |v: &[Scalar]| c.coords(v).map(|x| c.patch.show_all(&x));
    let bracket: Vec<Vec<Option<Vec<String>>>> = basis
        .iter()
        .map(|u| basis.iter().map(|v| coords(&c.bracket(u, v))).collect())
        .collect();
    let d: Vec<Option<Vec<String>>> = (0..c.dim()).map(|k| coords(&c.d(&Scalar::var(k)))).collect();
    json!({
        "schema": 1,
        "source": source,
        "name": c.name,
        "coords": c.patch.names(),
        "len": c.len(),
        "rank": c.rank(),
        "degenerate": c.degenerate,
        "admissible": admissible,
        "graph": graph,
        "basis": show_mat(c, &basis),
        "pairing": show_mat(c, &c.gram()),
        "anchor": basis.iter().map(|b| c.patch.show_all(&c.anchor_of(b))).collect::<Vec<_>>(),
        "d": d,
        "bracket": bracket,
        "u": show_mat(c, &mp.u_in_c),
        "iota": show_mat(c, &mp.iota),
    })
}

fn build_manin(inst: &Instance, cfg: &CheckConfig) -> Result<serde_json::Value> {
    if let Some((name, t)) = inst.triples.first() {
        return Ok(manin_json(name, &build_courant_c(t)?));
    }
    if let Some(f) = inst.families().first() {
        return Ok(manin_json(family_key(f), &family_manin(f, cfg)?));
    }
    Err(Error::Precondition(format!(
        "{}: no LA-Dirac triple or example family to build from",
        inst.path
    )))
}

fn write_out(out: &Option<String>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{path}: {e}"))),
        None => stdout.write_all(text.as_bytes()).map_err(Error::from),
    }
}

fn render(r: &Report, f: Format) -> String {
    match f {
        Format::Json => r.to_json(),
        Format::Text => r.to_text(),
    }
}

/// Runs the command line; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let cfg = CheckConfig {
        seed: cli.seed,
        trials: cli.trials,
        max_degree: cli.max_degree,
    };
    let result: Result<Option<Report>> = (|| match &cli.command {
        Command::Check { suite, file } => {
            let inst = ingest(file)?;
            Ok(Some(run_suite(&inst, suite, &cfg)?))
        }
        Command::Lemmas { file } => {
            let inst = ingest(file)?;
            Ok(Some(run_suite(&inst, "lemmas", &cfg)?))
        }
        Command::Zoo { name: None, .. } => {
            let mut text = String::new();
            for p in PRESETS {
                text.push_str(&format!(
                    "{:22} {} {}\n",
                    p.name,
                    if p.positive { "+" } else { "-" },
                    p.summary
                ));
            }
            write_out(&cli.out, &text, stdout)?;
            Ok(None)
        }
        Command::Zoo {
            name: Some(name),
            emit: target,
        } => {
            let z = preset(name)?;
            if let Some(path) = target {
                std::fs::write(path, emit(&z)).map_err(|e| Error::Io(format!("{path}: {e}")))?;
                return Ok(None);
            }
            let mut col = Collector::new(&cfg);
            col.group(|| check_instance(&z, &cfg));
            Ok(Some(col.finish(z.family(), &format!("preset:{name}"))))
        }
        Command::BuildManin { file } => {
            let inst = ingest(file)?;
            let v = build_manin(&inst, &cfg)?;
            let text = serde_json::to_string_pretty(&v).expect("json values serialize") + "\n";
            write_out(&cli.out, &text, stdout)?;
            Ok(None)
        }
    })();
    match result {
        Ok(None) => 0,
        Ok(Some(r)) => {
            if let Err(e) = write_out(&cli.out, &render(&r, cli.format), stdout) {
                let _ = writeln!(stderr, "diracbi: {e}");
                return 2;
            }
            if r.passed() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "diracbi: {e}");
            if let Error::Precondition(m) = &e {
                if m.starts_with("unknown preset") {
                    let _ = writeln!(stderr, "presets: {}", preset_names().join(", "));
                }
            }
            2
        }
    }
}
