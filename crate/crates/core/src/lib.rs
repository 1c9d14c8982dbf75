//! Dimension and codimension calculus for families of indecomposable abelian
//! varieties with a prescribed isogeny decomposition.
//!
//! [`partitions`] handles set partitions and their intersection matrices,
//! [`moduli`] the ambient spaces and group dimensions, [`strata`] the
//! multiply-decomposable loci, [`hecke`] products of subgroups `Γ_λ`,
//! [`planner`] family budgets, and [`verify`] runs the closed forms against
//! brute force.

pub mod hecke;
pub mod moduli;
pub mod partitions;
pub mod planner;
pub mod strata;
pub mod verify;

pub use hecke::{gamma_dim, gamma_gamma_codim, max_product_dim, product_dim, GammaSubgroup, HeckeError, MaxProduct};
pub use moduli::{
    boundary_codim, dim_space, group_dim, torelli_codim, Bound, BoundaryCodim, GroupAtom, GroupExpr, ModuliError,
    ModuliSpace,
};
pub use partitions::{
    enumerate_matrix_types, enumerate_proper_partitions, intersection_matrix, meet, IntersectionMatrix,
    PartitionError, SetPartition,
};
pub use planner::{
    derived_mt, kodaira_budget, ns_rank, plan_family, polarized_isogeny_closed, realize_group, validate_spec,
    EndAlgebra, FamilySpec, Flavor, KodairaReport, PlanReport, PlannerError, RealizeHints,
};
pub use strata::{
    mdec_codim_fixedpart, mdec_codim_product, mdec_codim_unitary, CodimReport, DecompositionShape, Stratum,
    StratumKind, StrataError,
};
pub use verify::{run_lemma, LemmaId, Relation, VerificationCase, VerificationRun, VerifyError, VerifyOptions};
