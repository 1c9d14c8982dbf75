//! `moduli-strata`: plan complete families, list decomposition strata, compute
//! `Γ_λ` product dimensions and sweep closed forms against their oracles.

mod render;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use moduli_strata::hecke::{gamma_gamma_codim, max_product_dim, GammaSubgroup};
use moduli_strata::moduli::{GroupAtom, GroupExpr};
use moduli_strata::partitions::SetPartition;
use moduli_strata::planner::{kodaira_budget, plan_family, realize_group, FamilySpec, RealizeHints, DEFAULT_LEVEL};
use moduli_strata::strata::{
    mdec_codim_fixedpart, mdec_codim_product, mdec_codim_unitary_fixedpart, strata_of_fixedpart,
    strata_of_product, strata_of_unitary, CodimReport, DecompositionShape, Stratum,
};
use moduli_strata::verify::{run_lemma, LemmaId, VerificationRun, VerifyOptions};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_DISAGREEMENT: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "moduli-strata", version, about = "Dimension budgets for complete families of abelian varieties")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit the machine-readable report.
    #[arg(long, global = true)]
    json: bool,

    /// Write the report to FILE instead of standard output.
    #[arg(long, value_name = "FILE", global = true)]
    out: Option<PathBuf>,

    /// Record elapsed wall-clock time in verification summaries.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension budget, monodromy group and Hecke margin for a family.
    Plan {
        #[command(flatten)]
        family: FamilyArgs,
        /// Exit with status 3 when no complete family of positive dimension fits.
        #[arg(long)]
        require_feasible: bool,
    },
    /// Multiply-decomposable strata and their minimum codimension.
    Strata {
        #[command(flatten)]
        family: FamilyArgs,
        /// List every stratum attaining the minimum.
        #[arg(long)]
        witness_all: bool,
    },
    /// Dimensions of Γ_λ and of the products Γ_λΓ_μ.
    Gamma {
        /// Ground set size.
        #[arg(long)]
        g: usize,
        /// A proper partition such as `12|3`; without it, maximize over all pairs.
        #[arg(long)]
        partition: Option<String>,
        /// List every maximizing intersection matrix.
        #[arg(long)]
        witness_all: bool,
    },
    /// Sweep a closed form against its oracle (`all` runs every sweep).
    Verify {
        /// One of L3.1, L3.2, L3.3, L3.4, C5.3-increment, L5.5, C5.6, all.
        lemma: String,
        /// Upper end of the swept parameter.
        #[arg(long)]
        g_max: Option<usize>,
        #[arg(long)]
        witness_all: bool,
    },
    /// Kodaira-fibration budget for a fiber genus.
    Kodaira {
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        require_feasible: bool,
    },
    /// A family of dimension `--g` whose monodromy is the given group.
    Realize {
        /// Target `∏ Sp(2k)` given by its ranks.
        #[arg(long, value_delimiter = ',', conflicts_with = "unitary")]
        varying: Vec<u32>,
        /// Target `SU(p,q)`.
        #[arg(long, value_delimiter = ',', num_args = 1)]
        unitary: Option<Vec<u32>>,
        /// Total dimension of the family's fibers.
        #[arg(long)]
        g: u32,
        #[arg(long, default_value = "L")]
        field: String,
        #[arg(long, default_value_t = DEFAULT_LEVEL)]
        level: u32,
    },
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// Dimensions of the fixed factors.
    #[arg(long, value_delimiter = ',')]
    fixed: Vec<u32>,
    /// Dimensions of the varying factors.
    #[arg(long, value_delimiter = ',')]
    varying: Vec<u32>,
    /// Signature `p,q` of a unitary family.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["fixed", "varying"])]
    unitary: Option<Vec<u32>>,
    /// Number of fixed elliptic factors in a unitary family.
    #[arg(long, default_value_t = 0, requires = "unitary")]
    elliptic: u32,
    /// Label of the imaginary quadratic field.
    #[arg(long, default_value = "L")]
    field: String,
    #[arg(long, default_value_t = DEFAULT_LEVEL)]
    level: u32,
}

/// A usage problem detected after parsing.
struct UsageError(String);

fn signature(values: &[u32]) -> Result<(u32, u32), UsageError> {
    match values {
        [p, q] => Ok((*p, *q)),
        _ => Err(UsageError(format!("--unitary expects p,q; got {} value(s)", values.len()))),
    }
}

impl FamilyArgs {
    fn spec(&self) -> Result<FamilySpec, UsageError> {
        let spec = match &self.unitary {
            Some(pq) => {
                let (p, q) = signature(pq)?;
                FamilySpec::unitary(self.elliptic, p, q, self.field.clone())
            }
            None => FamilySpec::symplectic(self.fixed.clone(), self.varying.clone()),
        };
        Ok(spec.with_level(self.level))
    }
}

/// What a subcommand hands back for printing.
struct Outcome {
    command: &'static str,
    input: Value,
    result: Value,
    notes: Vec<String>,
    text: String,
    exit: u8,
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    input: &'a Value,
    result: &'a Value,
    notes: &'a [String],
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            return ExitCode::from(code);
        }
    };
    let outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let body = if cli.json {
        let envelope = Envelope {
            tool: "moduli-strata",
            version: env!("CARGO_PKG_VERSION"),
            command: outcome.command,
            input: &outcome.input,
            result: &outcome.result,
            notes: &outcome.notes,
        };
        let mut s = serde_json::to_string_pretty(&envelope).expect("envelope serializes");
        s.push('\n');
        s
    } else {
        outcome.text
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, body.as_bytes()),
        None => io::stdout().lock().write_all(body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    ExitCode::from(outcome.exit)
}

fn dispatch(cli: &Cli) -> Result<Outcome, UsageError> {
    match &cli.command {
        Command::Plan { family, require_feasible } => plan(family, *require_feasible),
        Command::Strata { family, witness_all } => strata(family, *witness_all),
        Command::Gamma { g, partition, witness_all } => gamma(*g, partition.as_deref(), *witness_all),
        Command::Verify { lemma, g_max, witness_all } => verify(lemma, *g_max, *witness_all, cli.timing),
        Command::Kodaira { genus, require_feasible } => kodaira(*genus, *require_feasible),
        Command::Realize { varying, unitary, g, field, level } => realize(varying, unitary.as_deref(), *g, field, *level),
    }
}

fn plan(family: &FamilyArgs, require_feasible: bool) -> Result<Outcome, UsageError> {
    let spec = family.spec()?;
    let report = plan_family(&spec).map_err(|e| UsageError(e.to_string()))?;
    let exit = if require_feasible && !report.feasible { EXIT_INFEASIBLE } else { EXIT_OK };
    Ok(Outcome {
        command: "plan",
        input: json!({ "spec": spec, "require_feasible": require_feasible }),
        result: to_value(&report),
        notes: report.notes.clone(),
        text: render::plan(&report),
        exit,
    })
}

fn strata(family: &FamilyArgs, witness_all: bool) -> Result<Outcome, UsageError> {
    let spec = family.spec()?;
    let usage = |e: &dyn std::fmt::Display| UsageError(e.to_string());
    let (strata, excluded, report): (Vec<Stratum>, Vec<String>, CodimReport) = match &family.unitary {
        Some(pq) => {
            let (p, q) = signature(pq)?;
            let report = mdec_codim_unitary_fixedpart(family.elliptic, p, q).map_err(|e| usage(&e))?;
            (strata_of_unitary(p, q).map_err(|e| usage(&e))?, Vec::new(), report)
        }
        None if family.fixed.is_empty() => {
            let report = mdec_codim_product(&family.varying).map_err(|e| usage(&e))?;
            (strata_of_product(&family.varying).map_err(|e| usage(&e))?, Vec::new(), report)
        }
        None => {
            let shape = DecompositionShape::new(family.fixed.clone(), family.varying.clone()).map_err(|e| usage(&e))?;
            let (strata, excluded) = strata_of_fixedpart(&shape);
            let excluded = excluded.iter().map(ToString::to_string).collect();
            (strata, excluded, mdec_codim_fixedpart(&shape))
        }
    };
    let minimizers: Vec<&Stratum> = strata.iter().filter(|s| s.codim == report.value).collect();
    let mut result = json!({
        "strata": strata,
        "excluded": excluded,
        "mdec_codim": report.value,
        "witness": report.witness,
        "closed_form": report.closed_form,
        "agrees": report.agrees(),
        "notes": report.notes,
    });
    if witness_all {
        result["minimizers"] = to_value(&minimizers);
    }
    Ok(Outcome {
        command: "strata",
        input: json!({ "spec": spec, "witness_all": witness_all }),
        result,
        notes: report.notes.clone(),
        text: render::strata(&strata, &excluded, &report, witness_all.then_some(&minimizers[..])),
        exit: EXIT_OK,
    })
}

fn gamma(g: usize, partition: Option<&str>, witness_all: bool) -> Result<Outcome, UsageError> {
    let input = json!({ "g": g, "partition": partition, "witness_all": witness_all });
    match partition {
        Some(raw) => {
            let lambda: SetPartition = raw.parse().map_err(|e: moduli_strata::partitions::PartitionError| UsageError(e.to_string()))?;
            let codim = gamma_gamma_codim(g, &lambda).map_err(|e| UsageError(e.to_string()))?;
            let subgroup = GammaSubgroup::new(&lambda);
            let result = json!({ "subgroup": subgroup, "gamma_gamma_codim": codim, "bound": 4, "meets_bound": codim >= 4 });
            Ok(Outcome {
                command: "gamma",
                input,
                text: render::gamma_partition(&subgroup, codim),
                result,
                notes: Vec::new(),
                exit: EXIT_OK,
            })
        }
        None => {
            let best = max_product_dim(g).map_err(|e| UsageError(e.to_string()))?;
            let mut result = to_value(&best);
            if !witness_all {
                result.as_object_mut().expect("struct").remove("maximizers");
            }
            Ok(Outcome {
                command: "gamma",
                input,
                text: render::max_product(&best, witness_all),
                result,
                notes: Vec::new(),
                exit: if best.agrees() { EXIT_OK } else { EXIT_DISAGREEMENT },
            })
        }
    }
}

fn verify(lemma: &str, g_max: Option<usize>, witness_all: bool, timing: bool) -> Result<Outcome, UsageError> {
    let ids: Vec<LemmaId> = if lemma.eq_ignore_ascii_case("all") {
        LemmaId::ALL.to_vec()
    } else {
        vec![lemma.parse().map_err(|e: moduli_strata::verify::VerifyError| UsageError(e.to_string()))?]
    };
    let opts = VerifyOptions { max: g_max, witness_all, timing };
    let runs: Vec<VerificationRun> = ids
        .iter()
        .map(|&id| run_lemma(id, &opts))
        .collect::<Result<_, _>>()
        .map_err(|e| UsageError(e.to_string()))?;
    let disagree = runs.iter().any(|r| !r.all_agree());
    let notes: Vec<String> = runs.iter().flat_map(|r| r.notes.iter().map(move |n| format!("{}: {n}", r.lemma_id))).collect();
    let result = match &runs[..] {
        [single] => to_value(single),
        many => json!({ "runs": many }),
    };
    Ok(Outcome {
        command: "verify",
        input: json!({ "lemma": lemma, "g_max": g_max, "witness_all": witness_all, "timing": timing }),
        result,
        notes,
        text: runs.iter().map(render::verification).collect::<Vec<_>>().join("\n"),
        exit: if disagree { EXIT_DISAGREEMENT } else { EXIT_OK },
    })
}

fn kodaira(genus: u32, require_feasible: bool) -> Result<Outcome, UsageError> {
    let report = kodaira_budget(genus).map_err(|e| UsageError(e.to_string()))?;
    Ok(Outcome {
        command: "kodaira",
        input: json!({ "genus": genus, "require_feasible": require_feasible }),
        result: to_value(&report),
        notes: report.notes.clone(),
        text: render::kodaira(&report),
        exit: if require_feasible && !report.feasible { EXIT_INFEASIBLE } else { EXIT_OK },
    })
}

fn realize(varying: &[u32], unitary: Option<&[u32]>, g: u32, field: &str, level: u32) -> Result<Outcome, UsageError> {
    let target = match unitary {
        Some(pq) => {
            let (p, q) = signature(pq)?;
            GroupExpr::new(vec![GroupAtom::SuForm(p, q)])
        }
        None => GroupExpr::symplectic(varying),
    }
    .map_err(|e| UsageError(format!("target group: {e}")))?;
    let hints = RealizeHints { field_label: field.to_string(), level };
    let spec = realize_group(&target, g, &hints).map_err(|e| UsageError(e.to_string()))?;
    let report = plan_family(&spec).map_err(|e| UsageError(e.to_string()))?;
    let round_trip = report.monodromy == target;
    let mut notes = report.notes.clone();
    if !round_trip {
        notes.push(format!("planned monodromy {} differs from target {target}", report.monodromy));
    }
    Ok(Outcome {
        command: "realize",
        input: json!({ "target": target, "g": g, "field": field, "level": level }),
        result: json!({ "spec": spec, "plan": report, "round_trip": round_trip }),
        text: render::realize(&target, &report),
        notes,
        exit: if round_trip { EXIT_OK } else { EXIT_DISAGREEMENT },
    })
}
