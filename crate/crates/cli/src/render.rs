//! Plain-text reports.

use std::fmt::Write;

use moduli_strata::hecke::{GammaSubgroup, MaxProduct};
use moduli_strata::moduli::{Bound, GroupExpr};
use moduli_strata::planner::{KodairaReport, PlanReport};
use moduli_strata::strata::{CodimReport, Stratum};
use moduli_strata::verify::VerificationRun;

fn notes(out: &mut String, notes: &[String]) {
    for n in notes {
        let _ = writeln!(out, "  note: {n}");
    }
}

fn bound_word(b: Bound) -> &'static str {
    match b {
        Bound::Exact => "exact",
        Bound::LowerBound => "lower bound",
    }
}

pub fn plan(r: &PlanReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "family of dimension g = {} (ambient dim {})", r.total_g, r.ambient_dim);
    let _ = writeln!(out, "  mdec codim      {} (witness {})", r.mdec_codim, r.mdec_witness.kind);
    let _ = writeln!(out, "  boundary codim  {} ({})", r.boundary_codim.value, bound_word(r.boundary_codim.bound));
    let _ = writeln!(out, "  budget          {}", r.budget);
    let _ = writeln!(out, "  d_max           {} (closed bound {})", r.d_max, r.theorem_d_max);
    let _ = writeln!(out, "  monodromy       {} (dim {})", r.monodromy, r.monodromy_dim);
    match (&r.hecke_partition, r.hecke_margin) {
        (Some(p), Some(m)) => {
            let _ = writeln!(out, "  hecke margin    {m} for {p}");
        }
        _ => {
            let _ = writeln!(out, "  hecke margin    n/a (single block)");
        }
    }
    let _ = writeln!(out, "  feasible        {}", if r.feasible { "yes" } else { "no" });
    notes(&mut out, &r.notes);
    out
}

pub fn strata(strata: &[Stratum], excluded: &[String], r: &CodimReport, minimizers: Option<&[&Stratum]>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<24} {:>8} {:>8} {:>6}", "stratum", "ambient", "dim", "codim");
    for s in strata {
        let _ = writeln!(out, "{:<24} {:>8} {:>8} {:>6}", s.kind.to_string(), s.ambient_dim, s.stratum_dim, s.codim);
    }
    if !excluded.is_empty() {
        let _ = writeln!(out, "empty: {}", excluded.join(", "));
    }
    let closed = r.closed_form.map_or_else(|| "not applied".to_string(), |c| c.to_string());
    let _ = writeln!(out, "minimum codim {} at {} (closed form {closed})", r.value, r.witness.kind);
    if let Some(ms) = minimizers {
        let kinds: Vec<String> = ms.iter().map(|s| s.kind.to_string()).collect();
        let _ = writeln!(out, "attained by {}", kinds.join(", "));
    }
    notes(&mut out, &r.notes);
    out
}

pub fn gamma_partition(sub: &GammaSubgroup, codim: u64) -> String {
    format!(
        "Gamma_{} = {} (dim {})\ncodim of Gamma Gamma_lambda in Sp({}): {codim}\n",
        sub.partition,
        sub.group,
        sub.dim,
        2 * sub.partition.ground_size()
    )
}

pub fn max_product(m: &MaxProduct, all: bool) -> String {
    let mut out = String::new();
    let mode = if m.exhaustive { "matrix types" } else { "tables (pruned)" };
    let _ = writeln!(out, "g = {}: max dim = {} (closed form {}, {} {mode})", m.g, m.value, m.closed_form, m.examined);
    let _ = writeln!(out, "witness {}", m.witness);
    if all {
        for w in &m.maximizers {
            let _ = writeln!(out, "  {w}");
        }
    }
    out
}

fn compact(v: &serde_json::Value) -> String {
    serde_json::to_string(v).expect("value serializes")
}

pub fn verification(run: &VerificationRun) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} over {}", run.lemma_id, compact(&run.parameter_range));
    let _ = write!(out, "  {} case(s), {} disagreement(s)", run.summary.cases, run.summary.disagreements);
    if let Some(ms) = run.summary.elapsed_ms {
        let _ = write!(out, ", {ms} ms");
    }
    out.push('\n');
    for c in run.disagreements() {
        let _ = writeln!(
            out,
            "  DISAGREE {}: expected {} computed {} witness {}",
            compact(&c.input),
            compact(&c.expected),
            compact(&c.computed),
            compact(&c.witness)
        );
        for n in &c.notes {
            let _ = writeln!(out, "    {n}");
        }
    }
    notes(&mut out, &run.notes);
    out
}

pub fn kodaira(r: &KodairaReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "fiber genus {}: {{E}} x A_{}", r.fiber_genus, r.fiber_genus - 1);
    let _ = writeln!(out, "  mdec codim      {}", r.mdec_codim);
    let _ = writeln!(out, "  boundary codim  {}", r.boundary_codim);
    let _ = writeln!(out, "  torelli codim   {}", r.torelli_codim);
    let _ = writeln!(out, "  residual budget {}", r.post_torelli_budget);
    let _ = writeln!(out, "  monodromy       {}", r.monodromy);
    let _ = writeln!(out, "  feasible        {}", if r.feasible { "yes" } else { "no" });
    notes(&mut out, &r.notes);
    out
}

pub fn realize(target: &GroupExpr, r: &PlanReport) -> String {
    format!("target {target} in dimension {}\n{}", r.total_g, plan(r))
}
