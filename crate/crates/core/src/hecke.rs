//! Dimensions of the subgroups `Γ_λ ≅ ∏ Sp(2ℓ_i)` of `Sp(2g)` attached to
//! proper partitions, of their pairwise products `Γ_λΓ_μ`, and of the margin
//! by which `ΓΓ_λ` fails to fill `Sp(2g)`.
//!
//! `Γ_λ ∩ Γ_μ` preserves both block structures, so it is `Γ_{λ∧μ}`; the
//! product then has dimension `dim Γ_λ + dim Γ_μ − dim Γ_{λ∧μ}`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::moduli::{GroupAtom, GroupExpr};
use crate::partitions::{
    enumerate_matrix_types, enumerate_proper_partitions, for_each_table, intersection_matrix, margins, meet,
    IntersectionMatrix, PartitionError, SetPartition,
};

/// Largest ground size for which `max_product_dim` scans every matrix type.
pub const EXHAUSTIVE_MAX_G: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeckeError {
    #[error("partition {0} has a single block")]
    NotProper(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

fn sp_dim(rank: u64) -> u64 {
    rank * (2 * rank + 1)
}

/// `Γ_λ` as a symbolic group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaSubgroup {
    pub partition: SetPartition,
    pub group: GroupExpr,
    pub dim: u64,
}

impl GammaSubgroup {
    pub fn new(partition: &SetPartition) -> Self {
        let ranks: Vec<GroupAtom> = partition.block_sizes().iter().map(|&l| GroupAtom::Sp(l as u32)).collect();
        let group = GroupExpr::new(ranks).expect("blocks are nonempty");
        Self { partition: partition.clone(), dim: gamma_dim(partition), group }
    }
}

/// `Σ ℓ(2ℓ+1)` over the block lengths of `λ`.
pub fn gamma_dim(lambda: &SetPartition) -> u64 {
    lambda.block_sizes().iter().map(|&l| sp_dim(l as u64)).sum()
}

/// `dim Γ_λΓ_μ` through the common refinement.
pub fn product_dim(lambda: &SetPartition, mu: &SetPartition) -> Result<u64, HeckeError> {
    let common = meet(lambda, mu)?;
    Ok(gamma_dim(lambda) + gamma_dim(mu) - gamma_dim(&common))
}

/// `dim Γ_λΓ_μ` from the intersection profile alone: row sums are the block
/// lengths of `λ`, column sums those of `μ`, entries those of `λ∧μ`.
pub fn product_dim_from_matrix(m: &IntersectionMatrix) -> u64 {
    let rows: u64 = m.row_sums().iter().map(|&r| sp_dim(u64::from(r))).sum();
    let cols: u64 = m.col_sums().iter().map(|&c| sp_dim(u64::from(c))).sum();
    let cells: u64 = m.entries().map(|n| sp_dim(u64::from(n))).sum();
    rows + cols - cells
}

/// `2g²+g−4`.
pub fn max_product_closed_form(g: usize) -> u64 {
    let g = g as u64;
    2 * g * g + g - 4
}

/// `2g²+g = dim Sp(2g)`.
pub fn full_group_dim(g: usize) -> u64 {
    sp_dim(g as u64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaxProduct {
    pub g: usize,
    pub value: u64,
    /// Smallest maximizer in canonical order.
    pub witness: IntersectionMatrix,
    /// Every maximizing matrix type, ascending.
    pub maximizers: Vec<IntersectionMatrix>,
    pub closed_form: u64,
    /// Matrix types (exhaustive mode) or raw tables (pruned mode) evaluated.
    pub examined: usize,
    pub exhaustive: bool,
}

impl MaxProduct {
    pub fn agrees(&self) -> bool {
        self.value == self.closed_form
    }
}

/// Maximum of `dim Γ_λΓ_μ` over pairs of proper partitions of `{1,…,g}`.
///
/// Up to [`EXHAUSTIVE_MAX_G`] every canonical matrix type is scanned. Beyond
/// that the search runs over row/column margin pairs, discarding any pair
/// whose optimistic value (all cells at most 1) cannot reach the best so far.
pub fn max_product_dim(g: usize) -> Result<MaxProduct, HeckeError> {
    if g < 2 {
        return Err(PartitionError::GroundTooSmall(g).into());
    }
    if g <= EXHAUSTIVE_MAX_G {
        let types = enumerate_matrix_types(g)?;
        let scored: Vec<(u64, &IntersectionMatrix)> =
            types.par_iter().map(|m| (product_dim_from_matrix(m), m)).collect();
        let value = scored.iter().map(|(v, _)| *v).max().expect("g >= 2 has a matrix type");
        let maximizers: Vec<IntersectionMatrix> =
            scored.iter().filter(|(v, _)| *v == value).map(|(_, m)| (*m).clone()).collect();
        return Ok(MaxProduct {
            g,
            value,
            witness: maximizers[0].clone(),
            maximizers,
            closed_form: max_product_closed_form(g),
            examined: types.len(),
            exhaustive: true,
        });
    }
    Ok(max_product_pruned(g))
}

pub(crate) fn max_product_pruned(g: usize) -> MaxProduct {
    let sq = |v: &[usize]| -> u64 { v.iter().map(|&x| (x * x) as u64).sum() };
    let all = margins(g);
    let mut pairs: Vec<(u64, &Vec<usize>, &Vec<usize>)> = all
        .iter()
        .flat_map(|r| all.iter().map(move |c| (sq(r) + sq(c) - g as u64, r, c)))
        .collect();
    // most promising margins first so the bound bites early
    pairs.sort_by(|a, b| b.0.cmp(&a.0));

    // best value of Σr² + Σc² − Σn²; product dim is g + 2·best
    let mut best: u64 = 0;
    let mut found: BTreeSet<IntersectionMatrix> = BTreeSet::new();
    let mut examined = 0usize;
    for (bound, r, c) in pairs {
        if bound < best {
            break;
        }
        let margin_sq = sq(r) + sq(c);
        for_each_table(r, c, &mut |t| {
            examined += 1;
            let cells: u64 = t.iter().map(|&n| u64::from(n) * u64::from(n)).sum();
            let value = margin_sq - cells;
            if value < best {
                return;
            }
            let m = IntersectionMatrix::new(
                &t.chunks(c.len()).map(<[u32]>::to_vec).collect::<Vec<_>>(),
            )
            .expect("margins are positive");
            if value > best {
                best = value;
                found.clear();
            }
            found.insert(m);
        });
    }
    let maximizers: Vec<IntersectionMatrix> = found.into_iter().collect();
    MaxProduct {
        g,
        value: g as u64 + 2 * best,
        witness: maximizers[0].clone(),
        maximizers,
        closed_form: max_product_closed_form(g),
        examined,
        exhaustive: false,
    }
}

/// Maximum over all `(Bell(g)−1)²` ordered pairs of proper partitions, with the
/// set of maximizing profiles. Independent of matrix-type enumeration.
pub fn max_product_dim_by_pairs(g: usize) -> Result<(u64, BTreeSet<IntersectionMatrix>), HeckeError> {
    let parts = enumerate_proper_partitions(g)?;
    let best = parts
        .par_iter()
        .map(|lambda| {
            let mut local_best = 0u64;
            let mut local: Vec<&SetPartition> = Vec::new();
            for mu in &parts {
                let v = product_dim(lambda, mu).expect("same ground");
                if v > local_best {
                    local_best = v;
                    local.clear();
                }
                if v == local_best {
                    local.push(mu);
                }
            }
            let set: BTreeSet<IntersectionMatrix> =
                local.into_iter().map(|mu| intersection_matrix(lambda, mu).expect("same ground")).collect();
            (local_best, set)
        })
        .reduce(
            || (0, BTreeSet::new()),
            |a, b| match a.0.cmp(&b.0) {
                std::cmp::Ordering::Greater => a,
                std::cmp::Ordering::Less => b,
                std::cmp::Ordering::Equal => {
                    let mut s = a.1;
                    s.extend(b.1);
                    (a.0, s)
                }
            },
        );
    Ok(best)
}

/// `dim Sp(2g) − max_μ dim Γ_μΓ_λ` over proper `μ`.
///
/// Writing `n_jk = |λ_j ∩ μ_k|`, one has
/// `dim Γ_μΓ_λ − dim Γ_λ = 4·#{pairs in a common μ-block but different λ-blocks}`.
/// Merging blocks of `μ` never lowers that count, so the maximum is attained by
/// a two-block `μ = (T, Tᶜ)`, and only the counts `a_j = |T ∩ λ_j|` matter.
/// Blocks of equal length are interchangeable, so per length class only the
/// multiset of counts is enumerated.
pub fn gamma_gamma_codim(g: usize, lambda: &SetPartition) -> Result<u64, HeckeError> {
    if lambda.ground_size() != g {
        return Err(PartitionError::GroundMismatch(g, lambda.ground_size()).into());
    }
    if !lambda.is_proper() {
        return Err(HeckeError::NotProper(lambda.to_string()));
    }
    let sizes = lambda.block_sizes();
    let cross_pairs: u64 = {
        let total: u64 = sizes.iter().map(|&l| l as u64).sum();
        let sq: u64 = sizes.iter().map(|&l| (l * l) as u64).sum();
        (total * total - sq) / 2
    };
    let mut classes: BTreeMap<usize, usize> = BTreeMap::new();
    for &l in &sizes {
        *classes.entry(l).or_default() += 1;
    }
    let classes: Vec<(usize, usize)> = classes.into_iter().collect();

    let mut counts: Vec<(usize, usize)> = Vec::with_capacity(sizes.len());
    let min_cut = min_cut(&classes, 0, &mut counts);
    Ok(full_group_dim(g) - gamma_dim(lambda) - 4 * (cross_pairs - min_cut))
}

/// Smallest number of cross-block pairs separated by a nonempty proper subset
/// `T`, given per-block `(a_j, ℓ_j)` choices made so far.
fn min_cut(classes: &[(usize, usize)], idx: usize, counts: &mut Vec<(usize, usize)>) -> u64 {
    if idx == classes.len() {
        let taken: usize = counts.iter().map(|c| c.0).sum();
        let total: usize = counts.iter().map(|c| c.1).sum();
        if taken == 0 || taken == total {
            return u64::MAX;
        }
        // Σ_{j≠j'} a_j(ℓ_j' − a_j') = A(g−A) − Σ_j a_j(ℓ_j − a_j)
        let same: usize = counts.iter().map(|&(a, l)| a * (l - a)).sum();
        return (taken * (total - taken) - same) as u64;
    }
    let (len, mult) = classes[idx];
    let mut best = u64::MAX;
    // non-increasing sequences of length `mult` with values in 0..=len
    fn choose(
        classes: &[(usize, usize)],
        idx: usize,
        len: usize,
        left: usize,
        cap: usize,
        counts: &mut Vec<(usize, usize)>,
        best: &mut u64,
    ) {
        if left == 0 {
            *best = (*best).min(min_cut(classes, idx + 1, counts));
            return;
        }
        for a in 0..=cap {
            counts.push((a, len));
            choose(classes, idx, len, left - 1, a, counts, best);
            counts.pop();
        }
    }
    choose(classes, idx, len, mult, len, counts, &mut best);
    best
}

/// `gamma_gamma_codim` by scanning every proper `μ`.
pub fn gamma_gamma_codim_by_scan(lambda: &SetPartition) -> Result<u64, HeckeError> {
    if !lambda.is_proper() {
        return Err(HeckeError::NotProper(lambda.to_string()));
    }
    let g = lambda.ground_size();
    let best = enumerate_proper_partitions(g)?
        .iter()
        .map(|mu| product_dim(mu, lambda).expect("same ground"))
        .max()
        .expect("a proper partition exists");
    Ok(full_group_dim(g) - best)
}
