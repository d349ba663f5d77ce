//! `twilled`: check identities of split algebras and operators from JSON files.
//!
//! Exit codes: 0 when the checked property holds, 1 when it fails (the report
//! carries the residual), 2 on usage, schema or precondition errors.

mod render;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use twilled::algebra::check_associativity;
use twilled::bigraded::{bidegree_of, check_proto_conditions, classify, SplitContext};
use twilled::catalog::{self, CatalogEntry};
use twilled::cochain::{derived_bracket, g_bracket};
use twilled::filter::DegreeBound;
use twilled::io;
use twilled::twisting::twist;
use twilled::verify::{verify, Identity, VerifyInputs};
use twilled::{rational, Algebra, Bimodule, LinearOp};

#[derive(Parser)]
#[command(
    name = "twilled",
    version,
    about = "Exact checks for split algebras, twisting and Rota-Baxter type operators"
)]
struct Cli {
    /// Report format; text is a rendering of the JSON report.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Write the report to this file (for `catalog emit`: the output directory).
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct StructureArgs {
    /// Algebra file holding the structure constants of θ.
    #[arg(long)]
    algebra: PathBuf,

    /// Dimension of A1; defaults to the split recorded in the algebra file.
    #[arg(long)]
    split: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Check associativity on all basis triples.
    CheckAssoc {
        /// Algebra file.
        algebra: PathBuf,
    },
    /// Split θ into its four bihomogeneous parts.
    Decompose(StructureArgs),
    /// Classify θ (twilled, quasi-twilled, proto-twilled) and check the
    /// compatibility conditions.
    Classify(StructureArgs),
    /// Gerstenhaber bracket {f, g} of two cochains, or the derived bracket
    /// [f, g]_S with --structure.
    Bracket {
        f: PathBuf,
        g: PathBuf,
        /// Cochain S for the derived bracket (-1)^{|f|-1} {{S, f}, g}.
        #[arg(long)]
        structure: Option<PathBuf>,
        /// Report the bidegree of the result for this split.
        #[arg(long)]
        split: Option<usize>,
    },
    /// Twist θ by a linear map H between the summands.
    Twist {
        #[command(flatten)]
        structure: StructureArgs,
        /// Operator file for H (A2 -> A1 or A1 -> A2).
        #[arg(long)]
        map: PathBuf,
    },
    /// Verify an operator identity.
    Verify(VerifyArgs),
    /// Built-in example bundles.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// One of: associativity, rb, grb, mc, strong-mc, tmc, qmc, aybe,
    /// nijenhuis, nijenhuis-chain, induced, twist-iso, invariance.
    identity: String,

    #[arg(long)]
    algebra: PathBuf,

    #[arg(long)]
    bimodule: Option<PathBuf>,

    #[arg(long)]
    op: Option<PathBuf>,

    /// Second operator (Omega for nijenhuis-chain).
    #[arg(long)]
    op2: Option<PathBuf>,

    /// Weight of a Rota-Baxter operator, as p/q.
    #[arg(long, allow_hyphen_values = true)]
    weight: Option<String>,

    /// Only check inputs of degree at most this.
    #[arg(long)]
    safe_degree: Option<u32>,

    /// Only check input tuples of total degree at most this.
    #[arg(long)]
    max_total: Option<u32>,

    #[arg(long)]
    split: Option<usize>,
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List the built-in bundles.
    List,
    /// Write a bundle's files and a manifest of its claims.
    Emit {
        id: String,
        /// Parameters as key=value.
        params: Vec<String>,
        /// Dual-module convention (left or right), for bundles that use one.
        #[arg(long)]
        convention: Option<String>,
    },
}

/// Result of a command that ran to completion.
struct Outcome {
    kind: &'static str,
    holds: bool,
    body: Value,
}

impl Outcome {
    fn info(kind: &'static str, body: Value) -> Self {
        Outcome {
            kind,
            holds: true,
            body,
        }
    }
}

/// Reads input files and remembers their hashes for the report.
#[derive(Default)]
struct Inputs {
    seen: Vec<(String, String)>,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> anyhow::Result<String> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.seen
            .push((path.display().to_string(), hex::encode(Sha256::digest(&bytes))));
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    fn algebra(&mut self, path: &Path) -> anyhow::Result<Algebra> {
        let text = self.read(path)?;
        io::algebra_from_str(&text).with_context(|| format!("in {}", path.display()))
    }

    fn bimodule(&mut self, path: &Path, alg: Arc<Algebra>) -> anyhow::Result<Bimodule> {
        let text = self.read(path)?;
        io::bimodule_from_str(&text, alg).with_context(|| format!("in {}", path.display()))
    }

    fn op(&mut self, path: &Path) -> anyhow::Result<LinearOp> {
        let text = self.read(path)?;
        io::op_from_str(&text).with_context(|| format!("in {}", path.display()))
    }

    fn cochain(&mut self, path: &Path) -> anyhow::Result<twilled::Cochain> {
        let text = self.read(path)?;
        io::cochain_from_str(&text).with_context(|| format!("in {}", path.display()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut inputs = Inputs::default();
    match run(&cli, &mut inputs) {
        Ok(outcome) => {
            let doc = io::report(outcome.kind, &inputs.seen, outcome.body);
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&doc).expect("serializable"),
                Format::Text => render::text(&doc),
            };
            let written = match (&cli.output, &cli.command) {
                (Some(path), cmd) if !matches!(cmd, Command::Catalog { .. }) => {
                    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
                }
                // A closed pipe (`| head`) is not an error worth reporting.
                _ => {
                    let _ = writeln!(std::io::stdout().lock(), "{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if outcome.holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli, inputs: &mut Inputs) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::CheckAssoc { algebra } => {
            let alg = inputs.algebra(algebra)?;
            let rep = check_associativity(&alg);
            Ok(Outcome {
                kind: "check-assoc",
                holds: rep.holds,
                body: io::associativity_to_json(&rep),
            })
        }
        Command::Decompose(s) => {
            let alg = inputs.algebra(&s.algebra)?;
            let ps = io::proto_from_algebra(&alg, s.split)?;
            let mut body = io::proto_to_json(&ps);
            let mut degrees = serde_json::Map::new();
            for (name, c) in ps.parts() {
                degrees.insert(name.into(), io::bidegree_result_to_json(&bidegree_of(ps.split(), c)?));
            }
            body["bidegrees"] = Value::Object(degrees);
            body["class"] = json!(classify(&ps).as_str());
            Ok(Outcome::info("decompose", body))
        }
        Command::Classify(s) => {
            let alg = inputs.algebra(&s.algebra)?;
            let ps = io::proto_from_algebra(&alg, s.split)?;
            let conditions = check_proto_conditions(&ps)?;
            Ok(Outcome::info(
                "classify",
                json!({
                    "class": classify(&ps).as_str(),
                    "parts_zero": ps.parts().iter().map(|(n, c)| (n.to_string(), c.is_zero())).collect::<BTreeMap<_, _>>(),
                    "conditions": io::conditions_to_json(&conditions),
                }),
            ))
        }
        Command::Bracket { f, g, structure, split } => {
            let f = inputs.cochain(f)?;
            let g = inputs.cochain(g)?;
            let result = match structure {
                Some(s) => {
                    let s = inputs.cochain(s)?;
                    derived_bracket(&s, &f, &g)?
                }
                None => g_bracket(&f, &g)?,
            };
            let mut body = json!({
                "bracket": if structure.is_some() { "derived" } else { "gerstenhaber" },
                "result": io::cochain_to_json(&result),
            });
            if let Some(n1) = split {
                let d = result.dim();
                if *n1 > d {
                    bail!("split {n1} exceeds dimension {d}");
                }
                let sc = SplitContext::new(*n1, d - n1);
                body["bidegree"] = io::bidegree_result_to_json(&bidegree_of(&sc, &result)?);
            }
            Ok(Outcome::info("bracket", body))
        }
        Command::Twist { structure, map } => {
            let alg = inputs.algebra(&structure.algebra)?;
            let h = inputs.op(map)?;
            let ps = io::proto_from_algebra(&alg, structure.split)?;
            let rep = twist(&ps, &h)?;
            Ok(Outcome {
                kind: "twist",
                holds: rep.agree,
                body: io::twist_to_json(&rep),
            })
        }
        Command::Verify(v) => run_verify(v, inputs),
        Command::Catalog { action } => match action {
            CatalogAction::List => Ok(Outcome::info(
                "catalog-list",
                Value::Array(
                    catalog::list()
                        .iter()
                        .map(|(id, about)| json!({ "id": id, "description": about }))
                        .collect(),
                ),
            )),
            CatalogAction::Emit { id, params, convention } => {
                let mut map = BTreeMap::new();
                for p in params {
                    let (k, v) = p
                        .split_once('=')
                        .ok_or_else(|| anyhow!("parameter `{p}` is not of the form key=value"))?;
                    map.insert(k.to_string(), v.to_string());
                }
                if let Some(c) = convention {
                    map.insert("convention".into(), c.clone());
                }
                let entry = catalog::build(id, &map)?;
                let dir = cli.output.clone().unwrap_or_else(|| PathBuf::from("."));
                let manifest = emit(&entry, &dir)?;
                Ok(Outcome::info("catalog-emit", manifest))
            }
        },
    }
}

fn run_verify(v: &VerifyArgs, inputs: &mut Inputs) -> anyhow::Result<Outcome> {
    let identity: Identity = v.identity.parse()?;
    let alg = Arc::new(inputs.algebra(&v.algebra)?);
    let module = v
        .bimodule
        .as_deref()
        .map(|p| inputs.bimodule(p, alg.clone()))
        .transpose()?;
    let op = v.op.as_deref().map(|p| inputs.op(p)).transpose()?;
    let op2 = v.op2.as_deref().map(|p| inputs.op(p)).transpose()?;
    let weight = v
        .weight
        .as_deref()
        .map(|w| rational::parse(w).with_context(|| "--weight"))
        .transpose()?;
    let outcome = verify(
        identity,
        &VerifyInputs {
            algebra: Some(&alg),
            module: module.as_ref(),
            op: op.as_ref(),
            op2: op2.as_ref(),
            weight: weight.as_ref(),
            split: v.split,
            bound: DegreeBound {
                max_each: v.safe_degree,
                max_total: v.max_total,
            },
        },
    )?;
    Ok(Outcome {
        kind: "verify",
        holds: outcome.holds,
        body: io::outcome_to_json(&outcome),
    })
}

/// Writes every object of the entry plus `manifest.json`, whose claims carry
/// the exact `twilled` arguments (relative to `dir`) that re-check them.
fn emit(entry: &CatalogEntry, dir: &Path) -> anyhow::Result<Value> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let write = |name: String, doc: &Value| -> anyhow::Result<String> {
        let path = dir.join(&name);
        fs::write(&path, serde_json::to_string_pretty(doc)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(name)
    };
    let alg_file = |n: &str| format!("algebra-{n}.json");
    let module_file = |n: &str| format!("module-{n}.json");
    let op_file = |n: &str| format!("op-{n}.json");

    let mut files = Vec::new();
    for (name, alg) in &entry.algebras {
        files.push(write(alg_file(name), &io::algebra_to_json(alg))?);
    }
    for (name, over, module) in &entry.modules {
        let mut doc = io::bimodule_to_json(module, name);
        doc["algebra"] = json!(over);
        files.push(write(module_file(name), &doc)?);
    }
    for (name, op) in &entry.operators {
        let mut doc = io::op_to_json(op);
        doc["name"] = json!(name);
        files.push(write(op_file(name), &doc)?);
    }

    let claims: Vec<Value> = entry
        .claims
        .iter()
        .map(|c| {
            let mut args = vec![
                "verify".to_string(),
                c.identity.to_string(),
                "--algebra".into(),
                alg_file(&c.algebra),
            ];
            if let Some(m) = &c.module {
                args.extend(["--bimodule".into(), module_file(m)]);
            }
            if let Some(o) = &c.op {
                args.extend(["--op".into(), op_file(o)]);
            }
            if let Some(o) = &c.op2 {
                args.extend(["--op2".into(), op_file(o)]);
            }
            if let Some(w) = &c.weight {
                args.extend(["--weight".into(), rational::format(w)]);
            }
            if let Some(e) = c.bound.max_each {
                args.extend(["--safe-degree".into(), e.to_string()]);
            }
            if let Some(t) = c.bound.max_total {
                args.extend(["--max-total".into(), t.to_string()]);
            }
            json!({
                "identity": c.identity.as_str(),
                "algebra": c.algebra,
                "module": c.module,
                "op": c.op,
                "op2": c.op2,
                "weight": c.weight.as_ref().map(rational::format),
                "bound": io::bound_to_json(&c.bound),
                "expect": c.expect,
                "expected_exit": if c.expect { 0 } else { 1 },
                "args": args,
            })
        })
        .collect();
    let classes: Vec<Value> = entry
        .classes
        .iter()
        .map(|(a, class)| json!({ "algebra": a, "file": alg_file(a), "class": class.as_str() }))
        .collect();
    let manifest = json!({
        "schema_version": io::SCHEMA_VERSION,
        "id": entry.id,
        "params": entry.params,
        "files": files,
        "classes": classes,
        "claims": claims,
    });
    write("manifest.json".into(), &manifest)?;
    Ok(json!({ "directory": dir.display().to_string(), "manifest": manifest }))
}
