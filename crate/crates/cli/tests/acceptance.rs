//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! A criterion listed in `KNOWN_FINDINGS` still prints FAIL, with the reason,
//! but does not fail the run. If such a criterion starts passing the run fails
//! so the list gets updated.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use moduli_strata::hecke::{gamma_dim, gamma_gamma_codim, max_product_dim, max_product_dim_by_pairs};
use moduli_strata::moduli::GroupExpr;
use moduli_strata::partitions::{enumerate_proper_partitions, intersection_matrix, meet, Partitions, SetPartition};
use moduli_strata::planner::{kodaira_budget, plan_family, realize_group, FamilySpec, RealizeHints};
use moduli_strata::strata::{mdec_codim_fixedpart, DecompositionShape};
use moduli_strata::verify::{run_lemma, LemmaId, VerifyOptions};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde_json::Value;

const KNOWN_FINDINGS: [(u32, &str); 2] = [
    (
        4,
        "the unitary stratum Z⊗O_L, Z generic in A_p, has codimension p(p-1)/2 in Z_L(p,p): \
         1 at (2,2) and 3 at (3,3), below min(2p, p+q-2, 2q)",
    ),
    (7, "the same strata bound the unitary budget: (2,2) gives d_max 0 and (3,3) gives d_max 2"),
];

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(elapsed < limit, || format!("{what} took {elapsed:?}, limit {limit:?}"))
}

fn c1_max_product() -> Check {
    let start = Instant::now();
    let out = common::run(&["verify", "L5.5", "--g-max", "8", "--json"]);
    let elapsed = start.elapsed();
    ensure(out.status.code() == Some(0), || format!("exit {:?}", out.status.code()))?;
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let values: Vec<u64> = v["result"]["cases"]
        .as_array()
        .ok_or("no cases")?
        .iter()
        .filter(|c| c["input"]["check"] == "matrix_types")
        .map(|c| {
            assert!(c["witness"]["rows"].is_u64());
            c["computed"].as_u64().unwrap()
        })
        .collect();
    ensure(values == [6, 17, 32, 51, 74, 101, 132], || format!("values {values:?}"))?;
    for g in 2..=7 {
        let (pairs, _) = max_product_dim_by_pairs(g).map_err(|e| e.to_string())?;
        let types = max_product_dim(g).map_err(|e| e.to_string())?.value;
        ensure(pairs == types, || format!("g={g}: pairs {pairs} vs types {types}"))?;
    }
    within(start.elapsed(), Duration::from_secs(60), "L5.5")?;
    Ok(format!("values {values:?}, cli run {} ms", elapsed.as_millis()))
}

fn c2_product_strata() -> Check {
    let start = Instant::now();
    let run = run_lemma(LemmaId::ProductStrata, &VerifyOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(run.all_agree(), || format!("{} disagreement(s)", run.summary.disagreements))?;
    ensure(run.summary.cases >= 100, || format!("only {} cases", run.summary.cases))?;
    within(elapsed, Duration::from_secs(5), "L3.1")?;
    Ok(format!("{} cases agree with 2g1-2", run.summary.cases))
}

fn c3_fixed_part() -> Check {
    let anchor = mdec_codim_fixedpart(&DecompositionShape::new(vec![1], vec![3]).unwrap()).value;
    ensure(anchor == 3, || format!("fixed (1), varying (3) gives {anchor}"))?;
    let run = run_lemma(LemmaId::FixedPartStrata, &VerifyOptions::default()).map_err(|e| e.to_string())?;
    ensure(run.all_agree(), || format!("{} disagreement(s)", run.summary.disagreements))?;
    let flagged = run.cases.iter().filter(|c| c.expected.is_null()).count();
    let silent = run.cases.iter().filter(|c| c.expected.is_null() && c.notes.is_empty()).count();
    ensure(silent == 0, || format!("{silent} unflagged divergence(s)"))?;
    Ok(format!("anchor 3; {} shapes, {flagged} flagged, 0 silent", run.summary.cases))
}

fn c4_unitary() -> Check {
    let start = Instant::now();
    let l33 = run_lemma(LemmaId::UnitaryStrata, &VerifyOptions::default()).map_err(|e| e.to_string())?;
    let l34 = run_lemma(LemmaId::UnitaryFixedPart, &VerifyOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1), "L3.3/L3.4")?;
    ensure(l33.notes.iter().any(|n| n.contains("closed display")), || "display note missing".into())?;
    let bad: Vec<String> = l33
        .disagreements()
        .chain(l34.disagreements())
        .map(|c| format!("{} expected {} computed {}", c.input, c.expected, c.computed))
        .collect();
    ensure(bad.is_empty(), || bad.join("; "))?;
    Ok(format!("{} + {} cases agree", l33.summary.cases, l34.summary.cases))
}

fn c5_margin() -> Check {
    let mut smallest = u64::MAX;
    for g in 2..=7 {
        for lambda in enumerate_proper_partitions(g).map_err(|e| e.to_string())? {
            let c = gamma_gamma_codim(g, &lambda).map_err(|e| e.to_string())?;
            ensure(c >= 4, || format!("{lambda}: {c}"))?;
            smallest = smallest.min(c);
        }
    }
    let g2 = gamma_gamma_codim(2, &"1|2".parse().unwrap()).map_err(|e| e.to_string())?;
    ensure(g2 == 4, || format!("g=2 gives {g2}"))?;
    Ok(format!("min {smallest} over g=2..7; g=2 exactly 4"))
}

fn c6_symplectic_planner() -> Check {
    let cases = [(vec![1], vec![2], 1, "Sp(4)", 10), (vec![1], vec![3], 2, "Sp(6)", 21), (vec![], vec![2, 2], 1, "Sp(4)xSp(4)", 20)];
    for (fixed, varying, d, group, dim) in cases {
        let r = plan_family(&FamilySpec::symplectic(fixed.clone(), varying.clone())).map_err(|e| e.to_string())?;
        let got = (r.d_max, r.monodromy.label(), r.monodromy_dim);
        ensure(got == (d, group.to_string(), dim), || format!("{fixed:?}/{varying:?}: {got:?}"))?;
    }
    Ok("d_max 1/2/1, dims 10/21/20".into())
}

fn c7_unitary_planner() -> Check {
    let r22 = plan_family(&FamilySpec::unitary(1, 2, 2, "Q(i)")).map_err(|e| e.to_string())?;
    let r33 = plan_family(&FamilySpec::unitary(1, 3, 3, "Q(i)")).map_err(|e| e.to_string())?;
    ensure(r22.monodromy.label() == "SU(2,2)" && r22.monodromy_dim == 15, || format!("{}", r22.monodromy))?;
    let mut bad = Vec::new();
    if r22.d_max != 1 {
        bad.push(format!("(2,2): d_max {} (witness {})", r22.d_max, r22.mdec_witness.kind));
    }
    if r33.d_max != 3 {
        bad.push(format!("(3,3): d_max {} (witness {})", r33.d_max, r33.mdec_witness.kind));
    }
    ensure(bad.is_empty(), || bad.join("; "))?;
    Ok("d_max 1 and 3".into())
}

fn c8_kodaira() -> Check {
    let k3 = kodaira_budget(3).map_err(|e| e.to_string())?;
    let k4 = kodaira_budget(4).map_err(|e| e.to_string())?;
    ensure(k3.feasible && k3.post_torelli_budget == 2 && k3.monodromy.label() == "Sp(4)", || format!("{k3:?}"))?;
    ensure(k4.feasible && k4.post_torelli_budget == 2 && k4.monodromy.label() == "Sp(6)", || format!("{k4:?}"))?;
    let chain = (k4.mdec_codim, k4.torelli_codim, k4.boundary_codim);
    ensure(chain == (3, 1, 3), || format!("genus 4 chain {chain:?}"))?;
    for genus in 5..=10 {
        let k = kodaira_budget(genus).map_err(|e| e.to_string())?;
        ensure(!k.feasible, || format!("genus {genus} feasible"))?;
    }
    Ok("genus 3, 4 feasible with budget 2; 5..10 infeasible".into())
}

fn c9_round_trip() -> Check {
    let hints = RealizeHints::default();
    let mut lists = Vec::new();
    for a in 2..=5u32 {
        lists.push(vec![a]);
        for b in a..=5 {
            lists.push(vec![a, b]);
            for c in b..=5 {
                lists.push(vec![a, b, c]);
            }
        }
    }
    let mut count = 0;
    for ranks in lists {
        let target = GroupExpr::symplectic(&ranks).unwrap();
        let sum: u32 = ranks.iter().sum();
        for g in sum..=15 {
            let spec = realize_group(&target, g, &hints).map_err(|e| format!("{target} in {g}: {e}"))?;
            let plan = plan_family(&spec).map_err(|e| e.to_string())?;
            ensure(plan.monodromy == target, || format!("{target} in {g}: got {}", plan.monodromy))?;
            let want = i64::from(ranks[0]) - 1;
            ensure(plan.d_max == want, || format!("{target} in {g}: d_max {}", plan.d_max))?;
            count += 1;
        }
    }
    Ok(format!("{count} (target, g') pairs"))
}

fn c10_partition_lattice() -> Check {
    let bells = [1usize, 1, 2, 5, 15, 52, 203, 877, 4140];
    for g in 1..=8 {
        let n = Partitions::new(g).count();
        ensure(n == bells[g], || format!("g={g}: {n} partitions"))?;
    }
    let mut rng = StdRng::seed_from_u64(10);
    let random = |rng: &mut StdRng, g: usize| {
        let labels: Vec<usize> = (0..g).map(|_| rng.gen_range(0..g)).collect();
        SetPartition::from_labels(&labels).unwrap()
    };
    for g in 1..=6 {
        for _ in 0..1000 {
            let (a, b, c) = (random(&mut rng, g), random(&mut rng, g), random(&mut rng, g));
            let ab = meet(&a, &b).unwrap();
            ensure(ab == meet(&b, &a).unwrap() && ab.refines(&a) && ab.refines(&b), || format!("meet {a} {b}"))?;
            ensure(meet(&ab, &c).unwrap() == meet(&a, &meet(&b, &c).unwrap()).unwrap(), || format!("assoc {a} {b} {c}"))?;
            let m = intersection_matrix(&a, &b).unwrap();
            let mut rows = m.row_sums();
            rows.sort_unstable();
            let mut sizes: Vec<u32> = a.block_sizes().iter().map(|&s| s as u32).collect();
            sizes.sort_unstable();
            ensure(rows == sizes && m.total() == g, || format!("row sums {a} {b}"))?;
            let mut perm: Vec<usize> = (1..=g).collect();
            perm.shuffle(&mut rng);
            let moved = intersection_matrix(&a.relabel(&perm).unwrap(), &b.relabel(&perm).unwrap()).unwrap();
            ensure(moved == m, || format!("relabel {a} {b} {perm:?}"))?;
        }
    }
    Ok("meet laws, margins, Bell counts to g=8, 6000 relabelings".into())
}

fn c11_increment() -> Check {
    let mut count = 0;
    for g in 2..=6 {
        for lambda in Partitions::new(g) {
            let sizes = lambda.block_sizes();
            for target in std::iter::once(None).chain((0..sizes.len()).map(Some)) {
                let l = target.map_or(0, |b| sizes[b]) as u64;
                let bigger = lambda.with_element_inserted(target).unwrap();
                ensure(gamma_dim(&bigger) == gamma_dim(&lambda) + 4 * l + 3, || format!("{lambda} {target:?}"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} insertions"))
}

fn c12_cli() -> Check {
    for (args, expected) in common::GOLDEN {
        let code = common::exit_code(args);
        ensure(code == expected, || format!("{args:?}: exit {code}, expected {expected}"))?;
        let mut with_json = args.to_vec();
        if !with_json.contains(&"--json") {
            with_json.push("--json");
        }
        let (a, b) = (common::run(&with_json), common::run(&with_json));
        ensure(a.stdout == b.stdout, || format!("{with_json:?} differs between runs"))?;
    }
    Ok(format!("{} golden invocations", common::GOLDEN.len()))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Check); 12] = [
        (1, "max product dimension 2g^2+g-4, g=2..8", c1_max_product),
        (2, "product strata minimum 2g1-2", c2_product_strata),
        (3, "fixed-part strata closed form", c3_fixed_part),
        (4, "unitary strata min(2p, p+q-2, 2q)", c4_unitary),
        (5, "Gamma Gamma_lambda codimension >= 4", c5_margin),
        (6, "symplectic planner", c6_symplectic_planner),
        (7, "unitary planner", c7_unitary_planner),
        (8, "Kodaira budgets", c8_kodaira),
        (9, "realize/plan round trip", c9_round_trip),
        (10, "partition lattice properties", c10_partition_lattice),
        (11, "insertion increment 4l+3", c11_increment),
        (12, "CLI determinism and exit codes", c12_cli),
    ];
    let mut unexpected = 0;
    let mut passed = 0;
    for (n, name, check) in criteria {
        let known = KNOWN_FINDINGS.iter().find(|(k, _)| *k == n).map(|(_, why)| *why);
        match (check(), known) {
            (Ok(detail), None) => {
                passed += 1;
                println!("PASS {n:>2} {name}: {detail}");
            }
            (Ok(detail), Some(_)) => {
                unexpected += 1;
                println!("PASS {n:>2} {name}: {detail} (listed as a known finding; update the list)");
            }
            (Err(why), Some(reason)) => {
                println!("FAIL {n:>2} {name}: {why}");
                println!("        known finding: {reason}");
            }
            (Err(why), None) => {
                unexpected += 1;
                println!("FAIL {n:>2} {name}: {why}");
            }
        }
    }
    println!("{passed}/12 criteria pass; {} known finding(s); {unexpected} unexpected", KNOWN_FINDINGS.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
