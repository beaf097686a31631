use std::fmt::Write as _;
use std::io::{IsTerminal, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crbound::bounds::{
    minkowski_bound, pgl2_admissible, rough_bound, schur_bound, serre_bound, serre_degree_bound,
    table,
};
use crbound::cyclotomic::{all_invariants, canonical_conductor, FieldFlags, FieldSpec, Tristate};
use crbound::diophantine::{max_schur_exponent, solve_standard_equation, SolutionConstraints};
use crbound::ledger::{Ledger, Status, WHITELIST};
use crbound::totient::{invphi_all, invphi_max};
use crbound::{FactoredInteger, Prime};

const EXIT_DOMAIN: u8 = 1;
const EXIT_MISMATCH: u8 = 3;

#[derive(Parser)]
#[command(
    name = "crbound",
    version,
    about = "Exact order bounds for finite linear and Cremona groups"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Minkowski bound for finite subgroups of GL_n(Q).
    Minkowski {
        #[arg(short)]
        n: u64,
    },
    /// Schur bound for GL_n over the cyclotomic field Q(ξ_N).
    Schur {
        #[arg(short)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        conductor: u64,
    },
    /// Serre bound for PGL_n over Q(ξ_N), or over all fields of a given degree.
    Serre {
        #[arg(short)]
        n: u64,
        #[arg(long, default_value_t = 1, conflicts_with = "degree")]
        conductor: u64,
        /// Bound every field of this degree instead of one cyclotomic field.
        #[arg(long)]
        degree: Option<u64>,
    },
    /// Rough bound B_{n,d} for GL_n over any field of degree d.
    Rough {
        #[arg(short)]
        n: u64,
        #[arg(short)]
        d: u64,
    },
    /// Rough bounds for d = 1..=dmax.
    Table {
        #[arg(short)]
        n: u64,
        #[arg(long)]
        dmax: u64,
    },
    /// Cyclotomic invariants t_p, m_p, e_p of Q(ξ_N).
    Invariants {
        #[arg(long)]
        conductor: u64,
        #[arg(long)]
        prime: u64,
    },
    /// All n with φ(n) ≤ bound, and the largest one.
    Invphi {
        #[arg(long)]
        bound: u64,
    },
    /// Solutions of p^{m-1}(p-1)·e = d·t.
    SolveEq {
        #[arg(short)]
        p: u64,
        #[arg(short)]
        d: u64,
        /// Largest t considered; defaults to the rank when --rank is given.
        #[arg(long)]
        tmax: Option<u64>,
        #[arg(long, default_value_t = 1)]
        emin: u64,
        /// Also report the largest Schur exponent for GL_rank.
        #[arg(long)]
        rank: Option<u64>,
    },
    /// Finite subgroups admissible in PGL_2(K).
    Pgl2 {
        /// Degree of K; flags describe what else is known about it.
        #[arg(short, required_unless_present = "conductor")]
        d: Option<u64>,
        /// Use the exact cyclotomic field Q(ξ_N) instead.
        #[arg(long, conflicts_with_all = ["d", "xi4", "minus1", "sqrt5"])]
        conductor: Option<u64>,
        #[arg(long, default_value = "unknown", value_parser = parse_tristate)]
        xi4: Tristate,
        #[arg(long, default_value = "unknown", value_parser = parse_tristate)]
        minus1: Tristate,
        #[arg(long, default_value = "unknown", value_parser = parse_tristate)]
        sqrt5: Tristate,
    },
    /// Load, evaluate and audit a bound ledger.
    Ledger {
        /// Ledger file; the built-in ledger is used when absent.
        #[arg(long, global = true)]
        file: Option<PathBuf>,
        /// Replace a node by a constant, e.g. g10=1000; a value of 0 drops the node.
        #[arg(long = "override", value_name = "ID=M", global = true)]
        overrides: Vec<String>,
        #[command(subcommand)]
        action: LedgerAction,
    },
}

#[derive(Subcommand)]
enum LedgerAction {
    /// Compare every declared value with its computation.
    Verify,
    /// Value of one node.
    Eval { id: String },
    /// Derivation tree below one node.
    Explain { id: String },
    /// Value of the root.
    Final,
    /// Print the ledger document.
    Export,
}

fn parse_tristate(s: &str) -> Result<Tristate, String> {
    s.parse().map_err(|e: crbound::Error| e.to_string())
}

/// Failure carrying its exit status.
struct Failure(u8, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(EXIT_DOMAIN, e.to_string())
    }
}

type Outcome = Result<(String, u8), Failure>;

fn color_enabled() -> bool {
    std::env::var_os("NO_COLOR").is_none() && std::io::stdout().is_terminal()
}

fn paint(text: &str, code: &str) -> String {
    if color_enabled() {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

fn value_json(v: &FactoredInteger) -> Value {
    json!({ "factored": v, "decimal": v.to_decimal(false) })
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn emit_value(format: Format, v: &FactoredInteger) -> Outcome {
    Ok(match format {
        Format::Text => (v.to_decimal(false), 0),
        Format::Json => (pretty(&value_json(v)), 0),
    })
}

fn run(cli: Cli) -> Outcome {
    let format = cli.format;
    match cli.command {
        Command::Minkowski { n } => emit_value(format, &minkowski_bound(n)),
        Command::Schur { n, conductor } => {
            emit_value(format, &schur_bound(n, canonical_conductor(conductor)?)?)
        }
        Command::Serre {
            n,
            conductor,
            degree,
        } => {
            let v = match degree {
                Some(d) => serre_degree_bound(n, d)?,
                None => serre_bound(n, canonical_conductor(conductor)?)?,
            };
            emit_value(format, &v)
        }
        Command::Rough { n, d } => {
            if d == 0 {
                return Err(Failure(
                    EXIT_DOMAIN,
                    "domain error: field degree must be positive".into(),
                ));
            }
            emit_value(format, &rough_bound(n, d))
        }
        Command::Table { n, dmax } => {
            let rows = table(n, dmax);
            Ok(match format {
                Format::Json => (pretty(&serde_json::to_value(&rows)?), 0),
                Format::Text => {
                    let mut out = String::new();
                    for r in &rows {
                        let _ = writeln!(
                            out,
                            "{:>3}  {} = {}",
                            r.d,
                            r.factored,
                            r.factored.to_decimal(true)
                        );
                    }
                    (out.trim_end().to_string(), 0)
                }
            })
        }
        Command::Invariants { conductor, prime } => {
            let field = canonical_conductor(conductor)?;
            let inv = all_invariants(field, Prime::new(prime)?)?;
            Ok(match format {
                Format::Json => {
                    let mut v = serde_json::to_value(inv)?;
                    v["degree"] = json!(field.degree());
                    (pretty(&v), 0)
                }
                Format::Text => (
                    format!(
                        "field Q(ξ_{}) of degree {}\np = {}\nt = {}\nm = {}\ne = {}\nxi4 = {}",
                        field.get(),
                        field.degree(),
                        inv.p,
                        inv.t,
                        inv.m,
                        inv.e,
                        inv.xi4
                    ),
                    0,
                ),
            })
        }
        Command::Invphi { bound } => {
            let all = invphi_all(bound);
            let max = invphi_max(bound);
            Ok(match format {
                Format::Json => (
                    pretty(&json!({ "bound": bound, "max": max, "all": all })),
                    0,
                ),
                Format::Text => {
                    let list: Vec<String> = all.iter().map(ToString::to_string).collect();
                    (format!("max {max}\nall {}", list.join(" ")), 0)
                }
            })
        }
        Command::SolveEq {
            p,
            d,
            tmax,
            emin,
            rank,
        } => {
            let p = Prime::new(p)?;
            let t_max = tmax
                .or(rank)
                .ok_or_else(|| Failure(EXIT_DOMAIN, "give --tmax or --rank".into()))?;
            let c = SolutionConstraints::with_t_max(t_max).e_min(emin);
            let sols = solve_standard_equation(p, d, &c)?;
            let best = rank.map(|n| max_schur_exponent(p, n, d, &c)).transpose()?;
            Ok(match format {
                Format::Json => {
                    let mut v = json!({ "p": p.get(), "d": d, "solutions": sols });
                    if let Some(b) = best {
                        v["max_schur_exponent"] = json!(b);
                    }
                    (pretty(&v), 0)
                }
                Format::Text => {
                    let mut out = String::new();
                    if sols.is_empty() {
                        out.push_str("no solutions\n");
                    }
                    for s in &sols {
                        let _ = writeln!(out, "m = {}, e = {}, t = {}", s.m, s.e, s.t);
                    }
                    if let Some(b) = best {
                        let _ = writeln!(out, "max Schur exponent: {b}");
                    }
                    (out.trim_end().to_string(), 0)
                }
            })
        }
        Command::Pgl2 {
            d,
            conductor,
            xi4,
            minus1,
            sqrt5,
        } => {
            let spec = match conductor {
                Some(c) => FieldSpec::ExactCyclotomic(canonical_conductor(c)?),
                // The only field of degree 1 is Q itself.
                None if d == Some(1) => FieldSpec::rationals(),
                None => FieldSpec::DegreeOnly {
                    d: d.unwrap_or(1),
                    flags: FieldFlags { xi4, minus1, sqrt5 },
                },
            };
            let report = pgl2_admissible(&spec)?;
            let names: Vec<String> = report.families.iter().map(ToString::to_string).collect();
            Ok(match format {
                Format::Json => (
                    pretty(&json!({ "families": names, "max_order": report.max_order })),
                    0,
                ),
                Format::Text => (
                    format!(
                        "families: {}\nmax order: {}",
                        names.join(" "),
                        report.max_order
                    ),
                    0,
                ),
            })
        }
        Command::Ledger {
            file,
            overrides,
            action,
        } => run_ledger(format, file, &overrides, action),
    }
}

fn load_ledger(file: Option<PathBuf>, overrides: &[String]) -> Result<Ledger, Failure> {
    let mut ledger = match file {
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| {
                Failure(EXIT_DOMAIN, format!("cannot read {}: {e}", path.display()))
            })?;
            Ledger::from_json(&text)?
        }
        None => Ledger::shipped(),
    };
    for o in overrides {
        let (id, value) = o.split_once('=').ok_or_else(|| {
            Failure(
                EXIT_DOMAIN,
                format!("override {o:?} is not of the form ID=M"),
            )
        })?;
        let value: FactoredInteger = match value.trim() {
            "0" => {
                ledger = ledger.with_override(id, None)?;
                continue;
            }
            v => v.parse()?,
        };
        ledger = ledger.with_override(id, Some(&value))?;
    }
    Ok(ledger)
}

fn status_label(s: Status) -> String {
    match s {
        Status::Match => paint("MATCH", "32"),
        Status::Mismatch => paint("MISMATCH", "31"),
        Status::Unchecked => paint("UNCHECKED", "2"),
    }
}

fn run_ledger(
    format: Format,
    file: Option<PathBuf>,
    overrides: &[String],
    action: LedgerAction,
) -> Outcome {
    let ledger = load_ledger(file, overrides)?;
    match action {
        LedgerAction::Verify => {
            let report = ledger.verify()?;
            let unexpected: Vec<&str> = report
                .unexpected(&WHITELIST)
                .map(|r| r.id.as_str())
                .collect();
            let code = if unexpected.is_empty() {
                0
            } else {
                EXIT_MISMATCH
            };
            let text = match format {
                Format::Json => pretty(&json!({ "rows": report.rows, "unexpected": unexpected })),
                Format::Text => {
                    let mut out = String::new();
                    for r in &report.rows {
                        let _ = write!(out, "{} {}", status_label(r.status), r.id);
                        match r.status {
                            Status::Mismatch => {
                                let _ = write!(
                                    out,
                                    ": declared {} = {}, computed {} = {}",
                                    r.declared, r.declared_decimal, r.computed, r.computed_decimal
                                );
                            }
                            _ => {
                                let _ = write!(out, " = {}", r.computed_decimal);
                            }
                        }
                        if let Some(p) = &r.paper_prints {
                            if *p != r.computed {
                                let _ = write!(out, " (printed as {})", p.to_decimal(false));
                            }
                        }
                        if WHITELIST.contains(&r.id.as_str()) && r.status == Status::Mismatch {
                            out.push_str(" [known]");
                        }
                        out.push('\n');
                    }
                    let _ = write!(
                        out,
                        "{} match, {} mismatch ({} unexpected), {} unchecked",
                        report.count(Status::Match),
                        report.count(Status::Mismatch),
                        unexpected.len(),
                        report.count(Status::Unchecked)
                    );
                    out
                }
            };
            Ok((text, code))
        }
        LedgerAction::Eval { id } => emit_value(format, &ledger.eval(&id)?),
        LedgerAction::Final => {
            let v = ledger.final_bound()?;
            Ok(match format {
                Format::Json => (pretty(&value_json(&v)), 0),
                Format::Text => (format!("{} = {}", v, v.to_decimal(true)), 0),
            })
        }
        LedgerAction::Explain { id } => Ok(match format {
            Format::Text => (ledger.explain(&id)?.trim_end().to_string(), 0),
            Format::Json => {
                let node = ledger.node(&id)?;
                let v = ledger.eval(&id)?;
                (
                    pretty(
                        &json!({ "id": id, "value": value_json(&v), "children": node.children, "tree": ledger.explain(&id)? }),
                    ),
                    0,
                )
            }
        }),
        LedgerAction::Export => Ok((ledger.to_json_pretty(), 0)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, code)) => {
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{out}");
            ExitCode::from(code)
        }
        Err(Failure(code, msg)) => {
            eprintln!("crbound: {msg}");
            ExitCode::from(code)
        }
    }
}
