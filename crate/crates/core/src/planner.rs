//! Family planner: dimension budgets for complete families of indecomposable
//! abelian varieties with a prescribed isogeny decomposition, their connected
//! monodromy groups, Kodaira-fibration budgets, and the endomorphism-algebra
//! predicates under which isogenies are realized by Hecke translation.

use serde::Serialize;
use thiserror::Error;

use crate::hecke::gamma_gamma_codim;
use crate::moduli::{
    boundary_codim, group_dim, siegel_dim, torelli_codim, unitary_dim, BoundaryCodim, GroupAtom, GroupExpr,
    ModuliSpace,
};
use crate::partitions::SetPartition;
use crate::strata::{
    mdec_codim_fixedpart, mdec_codim_unitary_fixedpart, unitary_closed_form, DecompositionShape, Stratum,
};

pub const DEFAULT_LEVEL: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlannerError {
    #[error("specification violates hypotheses: {}", .0.join("; "))]
    SpecInvalid(Vec<String>),
    #[error("target needs dimension {needed} but only {available} is available")]
    TargetTooLarge { needed: u32, available: u32 },
    #[error("Sp({}) has rank {0} < 2", 2 * .0)]
    RankTooSmall(u32),
    #[error("SU({p},{q}) in dimension {g}: need 5 <= p+q+1 <= g")]
    UnitaryBoundViolated { p: u32, q: u32, g: u32 },
    #[error("unsupported target group {0}")]
    UnsupportedTarget(String),
    #[error("fiber genus {0} < 3")]
    GenusTooSmall(u32),
    #[error("Neron-Severi rank rule not proven for {0}")]
    RuleNotProven(String),
    #[error("invalid endomorphism algebra: {0}")]
    InvalidEndAlgebra(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "flavor", rename_all = "snake_case")]
pub enum Flavor {
    /// Fixed factors `A_{c,i}` and varying factors `A_{v,j}`, both sorted.
    Symplectic { fixed_dims: Vec<u32>, varying_dims: Vec<u32> },
    /// `r` fixed non-CM elliptic curves times a general point of `𝒵_L(p,q)`.
    Unitary { elliptic_count: u32, p: u32, q: u32, field_label: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FamilySpec {
    #[serde(flatten)]
    pub flavor: Flavor,
    pub level: u32,
}

impl FamilySpec {
    pub fn symplectic(mut fixed_dims: Vec<u32>, mut varying_dims: Vec<u32>) -> Self {
        fixed_dims.sort_unstable();
        varying_dims.sort_unstable();
        Self { flavor: Flavor::Symplectic { fixed_dims, varying_dims }, level: DEFAULT_LEVEL }
    }

    pub fn unitary(elliptic_count: u32, p: u32, q: u32, field_label: impl Into<String>) -> Self {
        Self {
            flavor: Flavor::Unitary { elliptic_count, p, q, field_label: field_label.into() },
            level: DEFAULT_LEVEL,
        }
    }

    pub fn with_level(mut self, level: u32) -> Self {
        self.level = level;
        self
    }

    pub fn total_g(&self) -> u32 {
        match &self.flavor {
            Flavor::Symplectic { fixed_dims, varying_dims } => fixed_dims.iter().chain(varying_dims).sum(),
            Flavor::Unitary { elliptic_count, p, q, .. } => elliptic_count + p + q,
        }
    }

    /// The partition of `{1,…,g}` recording the decomposition: fixed factors
    /// first, then varying ones (unitary: `r` singletons, then one block).
    pub fn partition(&self) -> Option<SetPartition> {
        let sizes: Vec<usize> = match &self.flavor {
            Flavor::Symplectic { fixed_dims, varying_dims } => {
                fixed_dims.iter().chain(varying_dims).map(|&d| d as usize).collect()
            }
            Flavor::Unitary { elliptic_count, p, q, .. } => std::iter::repeat(1)
                .take(*elliptic_count as usize)
                .chain(std::iter::once((p + q) as usize))
                .collect(),
        };
        SetPartition::intervals(&sizes).ok()
    }
}

/// Every violated hypothesis, as a readable condition. Empty when valid.
pub fn validate_spec(spec: &FamilySpec) -> Vec<String> {
    let mut out = Vec::new();
    match &spec.flavor {
        Flavor::Symplectic { fixed_dims, varying_dims } => {
            if varying_dims.is_empty() {
                out.push("no varying factor".to_string());
            }
            out.extend(varying_dims.iter().filter(|&&v| v < 2).map(|v| format!("varying dim {v} < 2")));
            out.extend(fixed_dims.iter().filter(|&&c| c < 1).map(|c| format!("fixed dim {c} < 1")));
        }
        Flavor::Unitary { p, q, field_label, .. } => {
            if *p < 1 {
                out.push(format!("p={p} < 1"));
            }
            if *q < 1 {
                out.push(format!("q={q} < 1"));
            }
            if p + q < 4 {
                out.push(format!("p+q={} < 4", p + q));
            }
            if field_label.trim().is_empty() {
                out.push("field label is empty".to_string());
            }
        }
    }
    if spec.level < 3 {
        out.push(format!("level {} < 3", spec.level));
    }
    out
}

fn require_valid(spec: &FamilySpec) -> Result<(), PlannerError> {
    let violations = validate_spec(spec);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(PlannerError::SpecInvalid(violations))
    }
}

/// Derived Mumford–Tate group of the varying part: `∏ Sp(2g_{v,j})`, or the
/// ℚ-form of `SU(p,q)` for the unitary flavor. Fixed factors contribute nothing.
pub fn derived_mt(spec: &FamilySpec) -> Result<GroupExpr, PlannerError> {
    require_valid(spec)?;
    let expr = match &spec.flavor {
        Flavor::Symplectic { varying_dims, .. } => GroupExpr::symplectic(varying_dims),
        Flavor::Unitary { p, q, .. } => GroupExpr::new(vec![GroupAtom::SuForm(*p, *q)]),
    };
    Ok(expr.expect("validated spec yields non-degenerate atoms"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanReport {
    pub spec: FamilySpec,
    pub total_g: u32,
    pub ambient_dim: u64,
    pub mdec_codim: u64,
    pub mdec_witness: Stratum,
    pub boundary_codim: BoundaryCodim,
    pub budget: u64,
    pub d_max: i64,
    /// `min g_{v,j} − 1`, or `min(2p, p+q−2, 2q) − 1`.
    pub theorem_d_max: i64,
    pub monodromy: GroupExpr,
    pub monodromy_dim: u64,
    pub hecke_partition: Option<SetPartition>,
    pub hecke_margin: Option<u64>,
    pub feasible: bool,
    pub notes: Vec<String>,
}

impl PlanReport {
    pub fn agrees_with_theorem(&self) -> bool {
        self.d_max == self.theorem_d_max
    }
}

/// A complete base of dimension `d` needs both the multiply-decomposable locus
/// and the compactification boundary to have codimension at least `d+1`.
pub fn plan_family(spec: &FamilySpec) -> Result<PlanReport, PlannerError> {
    require_valid(spec)?;
    let monodromy = derived_mt(spec)?;
    let mut notes = Vec::new();
    let (ambient_dim, mdec, boundary, theorem_d_max) = match &spec.flavor {
        Flavor::Symplectic { fixed_dims, varying_dims } => {
            let shape = DecompositionShape::new(fixed_dims.clone(), varying_dims.clone())
                .map_err(|e| PlannerError::SpecInvalid(vec![e.to_string()]))?;
            let mdec = mdec_codim_fixedpart(&shape);
            let boundary = varying_dims
                .iter()
                .map(|&g| boundary_codim(ModuliSpace::Siegel { g }).expect("g >= 2"))
                .min_by_key(|b| b.value)
                .expect("non-empty");
            if fixed_dims.iter().any(|&c| c >= 2) {
                notes.push(
                    "assumed: fixed factors are simple, pairwise non-isogenous, and not isogenous to any varying factor"
                        .to_string(),
                );
            }
            let ambient: u64 = varying_dims.iter().map(|&g| siegel_dim(g)).sum();
            (ambient, mdec, boundary, i64::from(varying_dims[0]) - 1)
        }
        Flavor::Unitary { elliptic_count, p, q, .. } => {
            let mdec = mdec_codim_unitary_fixedpart(*elliptic_count, *p, *q)
                .map_err(|e| PlannerError::SpecInvalid(vec![e.to_string()]))?;
            let boundary = boundary_codim(ModuliSpace::Unitary { p: *p, q: *q }).expect("p, q >= 1");
            (unitary_dim(*p, *q), mdec, boundary, unitary_closed_form(*p, *q) as i64 - 1)
        }
    };
    notes.extend(mdec.notes.iter().cloned());

    let budget = mdec.value.min(boundary.value);
    let d_max = budget as i64 - 1;
    if d_max != theorem_d_max {
        notes.push(format!("budget gives d_max {d_max} but the closed bound is {theorem_d_max}"));
    }
    let hecke_partition = spec.partition().filter(SetPartition::is_proper);
    let hecke_margin = hecke_partition
        .as_ref()
        .map(|lambda| gamma_gamma_codim(lambda.ground_size(), lambda).expect("proper partition"));

    Ok(PlanReport {
        spec: spec.clone(),
        total_g: spec.total_g(),
        ambient_dim,
        mdec_codim: mdec.value,
        mdec_witness: mdec.witness,
        boundary_codim: boundary,
        budget,
        d_max,
        theorem_d_max,
        monodromy_dim: group_dim(&monodromy),
        monodromy,
        hecke_partition,
        hecke_margin,
        feasible: d_max >= 1,
        notes,
    })
}

/// Hints for [`realize_group`] that the target group does not determine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizeHints {
    pub field_label: String,
    pub level: u32,
}

impl Default for RealizeHints {
    fn default() -> Self {
        Self { field_label: "L".to_string(), level: DEFAULT_LEVEL }
    }
}

/// A family specification of total dimension `g_prime` whose derived
/// Mumford–Tate group is `target`, padded with elliptic fixed factors.
pub fn realize_group(target: &GroupExpr, g_prime: u32, hints: &RealizeHints) -> Result<FamilySpec, PlannerError> {
    let atoms = target.atoms();
    let spec = match atoms {
        [GroupAtom::SuForm(p, q)] => {
            let (p, q) = (*p, *q);
            if p + q + 1 < 5 || p + q + 1 > g_prime {
                return Err(PlannerError::UnitaryBoundViolated { p, q, g: g_prime });
            }
            FamilySpec::unitary(g_prime - p - q, p, q, hints.field_label.clone())
        }
        _ if atoms.iter().all(|a| matches!(a, GroupAtom::Sp(_))) => {
            let ranks: Vec<u32> = atoms
                .iter()
                .map(|a| match a {
                    GroupAtom::Sp(k) => *k,
                    GroupAtom::SuForm(..) => unreachable!(),
                })
                .collect();
            if let Some(&small) = ranks.iter().find(|&&k| k < 2) {
                return Err(PlannerError::RankTooSmall(small));
            }
            let needed: u32 = ranks.iter().sum();
            if needed > g_prime {
                return Err(PlannerError::TargetTooLarge { needed, available: g_prime });
            }
            FamilySpec::symplectic(vec![1; (g_prime - needed) as usize], ranks)
        }
        _ => return Err(PlannerError::UnsupportedTarget(target.label())),
    };
    Ok(spec.with_level(hints.level))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KodairaReport {
    pub fiber_genus: u32,
    pub spec: FamilySpec,
    pub mdec_codim: u64,
    pub boundary_codim: u64,
    pub torelli_codim: u64,
    pub post_torelli_budget: i64,
    pub feasible: bool,
    pub monodromy: GroupExpr,
    pub notes: Vec<String>,
}

/// Budget for a Kodaira fibration of the given fiber genus built from
/// `{E}×𝒜_{genus−1}` cut by the Torelli locus: a complete curve needs the
/// residual budget to be at least 2.
pub fn kodaira_budget(fiber_genus: u32) -> Result<KodairaReport, PlannerError> {
    if fiber_genus < 3 {
        return Err(PlannerError::GenusTooSmall(fiber_genus));
    }
    let varying = fiber_genus - 1;
    let spec = FamilySpec::symplectic(vec![1], vec![varying]);
    let shape = DecompositionShape::new(vec![1], vec![varying]).expect("varying >= 2");
    let mdec = mdec_codim_fixedpart(&shape).value;
    let boundary = boundary_codim(ModuliSpace::Siegel { g: varying }).expect("g >= 2").value;
    let torelli = torelli_codim(fiber_genus).expect("genus >= 3");
    let post_torelli_budget = mdec.min(boundary) as i64 - torelli as i64;
    let feasible = post_torelli_budget >= 2;
    let mut notes = vec![
        "the complete curve meets the hyperelliptic locus in finitely many points; a branched double cover \
         of the base is assumed to complete the family of curves"
            .to_string(),
    ];
    if !feasible {
        notes.push(format!(
            "method limit: residual budget {post_torelli_budget} < 2 leaves no complete curve; \
             this is not a non-existence result"
        ));
    }
    Ok(KodairaReport {
        fiber_genus,
        spec,
        mdec_codim: mdec,
        boundary_codim: boundary,
        torelli_codim: torelli,
        post_torelli_budget,
        feasible,
        monodromy: GroupExpr::symplectic(&[varying]).expect("rank >= 2"),
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "label", rename_all = "snake_case")]
pub enum FieldKind {
    Rational,
    ImaginaryQuadratic(String),
    RealQuadratic(String),
    Other(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct EndFactor {
    pub field: FieldKind,
    pub multiplicity: u32,
}

/// `End_ℚ(A)` recorded as simple-factor fields with isogeny multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct EndAlgebra {
    factors: Vec<EndFactor>,
}

impl EndAlgebra {
    pub fn new(factors: Vec<EndFactor>) -> Result<Self, PlannerError> {
        if factors.is_empty() {
            return Err(PlannerError::InvalidEndAlgebra("no factors".into()));
        }
        for f in &factors {
            if f.multiplicity == 0 {
                return Err(PlannerError::InvalidEndAlgebra("multiplicity 0".into()));
            }
            let label = match &f.field {
                FieldKind::Rational => None,
                FieldKind::ImaginaryQuadratic(l) | FieldKind::RealQuadratic(l) | FieldKind::Other(l) => Some(l),
            };
            if label.is_some_and(|l| l.trim().is_empty()) {
                return Err(PlannerError::InvalidEndAlgebra("empty field label".into()));
            }
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[EndFactor] {
        &self.factors
    }

    pub fn push(&mut self, factor: EndFactor) -> Result<(), PlannerError> {
        let mut all = self.factors.clone();
        all.push(factor);
        *self = Self::new(all)?;
        Ok(())
    }

    fn hypothesis_holds(&self) -> bool {
        self.factors
            .iter()
            .all(|f| f.multiplicity == 1 && matches!(f.field, FieldKind::Rational | FieldKind::ImaginaryQuadratic(_)))
    }
}

/// True when every isogeny class is guaranteed to be a polarized isogeny
/// class: all multiplicities 1 and every field `ℚ` or imaginary quadratic.
/// `false` means "not guaranteed", not "fails".
pub fn polarized_isogeny_closed(alg: &EndAlgebra) -> bool {
    alg.hypothesis_holds()
}

/// Rank of `NS(A) ≅ ℤ^k`: the Rosati-fixed part of each factor field is ℚ.
pub fn ns_rank(alg: &EndAlgebra) -> Result<u32, PlannerError> {
    if !alg.hypothesis_holds() {
        return Err(PlannerError::RuleNotProven(format!("{:?}", alg.factors)));
    }
    Ok(alg.factors.len() as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rational() -> EndFactor {
        EndFactor { field: FieldKind::Rational, multiplicity: 1 }
    }

    #[test]
    fn validation_messages() {
        assert!(validate_spec(&FamilySpec::symplectic(vec![1], vec![2])).is_empty());
        assert_eq!(validate_spec(&FamilySpec::symplectic(vec![], vec![1, 3])), vec!["varying dim 1 < 2"]);
        assert_eq!(validate_spec(&FamilySpec::unitary(1, 1, 2, "Q(i)")), vec!["p+q=3 < 4"]);
        assert_eq!(validate_spec(&FamilySpec::symplectic(vec![], vec![2]).with_level(2)), vec!["level 2 < 3"]);
        assert_eq!(validate_spec(&FamilySpec::symplectic(vec![], vec![])), vec!["no varying factor"]);
    }

    #[test]
    fn plans() {
        let r = plan_family(&FamilySpec::symplectic(vec![1], vec![3])).unwrap();
        assert_eq!((r.total_g, r.d_max, r.monodromy.label()), (4, 2, "Sp(6)".to_string()));
        assert!(r.feasible && r.agrees_with_theorem());
        assert_eq!(r.hecke_margin, Some(gamma_gamma_codim(4, &"1|234".parse().unwrap()).unwrap()));

        let r = plan_family(&FamilySpec::symplectic(vec![], vec![2, 2])).unwrap();
        assert_eq!((r.total_g, r.d_max, r.monodromy_dim), (4, 1, 20));
        assert_eq!(r.monodromy.label(), "Sp(4)xSp(4)");

        let r = plan_family(&FamilySpec::unitary(1, 2, 2, "Q(i)")).unwrap();
        assert_eq!((r.total_g, r.d_max, r.theorem_d_max), (5, 0, 1));
        assert_eq!((r.monodromy.label(), r.monodromy_dim), ("SU(2,2)".to_string(), 15));
        assert!(!r.feasible && !r.agrees_with_theorem());
        assert!(!r.boundary_codim.is_exact());

        let r = plan_family(&FamilySpec::unitary(1, 2, 3, "Q(i)")).unwrap();
        assert_eq!((r.d_max, r.budget, r.boundary_codim.value), (2, 3, 4));
        assert!(r.feasible && r.agrees_with_theorem());

        let single = plan_family(&FamilySpec::symplectic(vec![], vec![3])).unwrap();
        assert_eq!(single.hecke_margin, None);

        assert!(matches!(
            plan_family(&FamilySpec::symplectic(vec![], vec![1])),
            Err(PlannerError::SpecInvalid(_))
        ));
    }

    #[test]
    fn derived_groups() {
        let d = |s: FamilySpec| derived_mt(&s).unwrap();
        assert_eq!(group_dim(&d(FamilySpec::symplectic(vec![], vec![2]))), 10);
        assert_eq!(group_dim(&d(FamilySpec::symplectic(vec![5], vec![3, 2]))), 31);
        let u = d(FamilySpec::unitary(0, 3, 2, "L"));
        assert_eq!((u.label(), group_dim(&u)), ("SU(3,2)".to_string(), 24));
    }

    #[test]
    fn realization() {
        let h = RealizeHints::default();
        let s = realize_group(&"Sp(4)".parse().unwrap(), 3, &h).unwrap();
        assert_eq!(s, FamilySpec::symplectic(vec![1], vec![2]));
        assert_eq!(plan_family(&s).unwrap().d_max, 1);
        let s = realize_group(&"Sp(4)xSp(6)".parse().unwrap(), 5, &h).unwrap();
        assert_eq!(s, FamilySpec::symplectic(vec![], vec![2, 3]));
        let s = realize_group(&"SU(2,2)".parse().unwrap(), 6, &h).unwrap();
        assert_eq!(s, FamilySpec::unitary(2, 2, 2, "L"));

        assert_eq!(
            realize_group(&"Sp(6)xSp(6)".parse().unwrap(), 5, &h),
            Err(PlannerError::TargetTooLarge { needed: 6, available: 5 })
        );
        assert_eq!(realize_group(&"Sp(2)".parse().unwrap(), 5, &h), Err(PlannerError::RankTooSmall(1)));
        assert!(matches!(
            realize_group(&"SU(2,2)".parse().unwrap(), 4, &h),
            Err(PlannerError::UnitaryBoundViolated { .. })
        ));
        assert!(matches!(
            realize_group(&"SU(2,1)".parse().unwrap(), 8, &h),
            Err(PlannerError::UnitaryBoundViolated { .. })
        ));
        assert!(matches!(
            realize_group(&"Sp(4)xSU(2,2)".parse().unwrap(), 9, &h),
            Err(PlannerError::UnsupportedTarget(_))
        ));
    }

    #[test]
    fn kodaira() {
        let k3 = kodaira_budget(3).unwrap();
        assert_eq!(
            (k3.torelli_codim, k3.mdec_codim, k3.boundary_codim, k3.post_torelli_budget, k3.feasible),
            (0, 2, 2, 2, true)
        );
        assert_eq!(k3.monodromy.label(), "Sp(4)");
        let k4 = kodaira_budget(4).unwrap();
        assert_eq!(
            (k4.torelli_codim, k4.mdec_codim, k4.boundary_codim, k4.post_torelli_budget, k4.feasible),
            (1, 3, 3, 2, true)
        );
        assert_eq!(k4.monodromy.label(), "Sp(6)");
        let k5 = kodaira_budget(5).unwrap();
        assert_eq!(
            (k5.torelli_codim, k5.mdec_codim, k5.boundary_codim, k5.post_torelli_budget, k5.feasible),
            (3, 4, 4, 1, false)
        );
        assert_eq!(kodaira_budget(2), Err(PlannerError::GenusTooSmall(2)));
    }

    #[test]
    fn endomorphism_predicates() {
        let qqq = EndAlgebra::new(vec![rational(), rational(), rational()]).unwrap();
        assert!(polarized_isogeny_closed(&qqq));
        assert_eq!(ns_rank(&qqq), Ok(3));

        let real = EndAlgebra::new(vec![EndFactor { field: FieldKind::RealQuadratic("Q(sqrt5)".into()), multiplicity: 1 }])
            .unwrap();
        assert!(!polarized_isogeny_closed(&real));
        assert!(matches!(ns_rank(&real), Err(PlannerError::RuleNotProven(_))));

        let imag2 = EndAlgebra::new(vec![EndFactor { field: FieldKind::ImaginaryQuadratic("Q(i)".into()), multiplicity: 2 }])
            .unwrap();
        assert!(!polarized_isogeny_closed(&imag2));

        let imag = EndAlgebra::new(vec![EndFactor { field: FieldKind::ImaginaryQuadratic("Q(i)".into()), multiplicity: 1 }])
            .unwrap();
        assert_eq!(ns_rank(&imag), Ok(1));

        assert!(EndAlgebra::new(vec![]).is_err());
        assert!(EndAlgebra::new(vec![EndFactor { field: FieldKind::Other(" ".into()), multiplicity: 1 }]).is_err());
        assert!(EndAlgebra::new(vec![EndFactor { field: FieldKind::Rational, multiplicity: 0 }]).is_err());
    }
}
