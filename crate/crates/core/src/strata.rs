//! Components of the locus of abelian varieties with two isogenous simple
//! factors inside products of Siegel spaces, fixed-part products, and unitary
//! Shimura varieties.
//!
//! Every stratum dimension is computed directly as a signed sum of ambient
//! space dimensions. The closed-form codimensions are evaluated separately and
//! compared against those sums; the minima returned here are always minima over
//! the enumerated strata, never the closed forms.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::moduli::{dim_space, exact_half, siegel_dim, unitary_dim, ModuliSpace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrataError {
    #[error("varying dimension {0} is below 2")]
    VaryingDimTooSmall(u32),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
}

/// Which component a stratum is. Indices are 1-based positions in the sorted
/// dimension lists; in `C`, `i` indexes the varying factor and `j` the fixed one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StratumKind {
    BOffdiag { i: usize, j: usize, d: u32 },
    BDiag { i: usize, d: u32 },
    C { i: usize, j: usize },
    UnitaryCm { k: u32, l: u32 },
    UnitaryNonCm { k: u32 },
}

impl fmt::Display for StratumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StratumKind::BOffdiag { i, j, d } => write!(f, "B_offdiag({i},{j},{d})"),
            StratumKind::BDiag { i, d } => write!(f, "B_diag({i},{d})"),
            StratumKind::C { i, j } => write!(f, "C({i},{j})"),
            StratumKind::UnitaryCm { k, l } => write!(f, "UnitaryCM({k},{l})"),
            StratumKind::UnitaryNonCm { k } => write!(f, "UnitaryNonCM({k})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Stratum {
    pub kind: StratumKind,
    pub ambient_dim: u64,
    pub stratum_dim: u64,
    pub codim: u64,
}

impl Stratum {
    fn new(kind: StratumKind, ambient_dim: u64, stratum_dim: i64) -> Self {
        let stratum_dim = u64::try_from(stratum_dim).expect("stratum dimension is non-negative");
        assert!(stratum_dim <= ambient_dim, "{kind}: stratum exceeds ambient space");
        Self { kind, ambient_dim, stratum_dim, codim: ambient_dim - stratum_dim }
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} dim {} codim {}", self.kind, self.stratum_dim, self.codim)
    }
}

/// Fixed simple factors `g_{c,1} ≤ … ≤ g_{c,r}` and varying factors
/// `g_{v,1} ≤ … ≤ g_{v,s}`, every varying dimension at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DecompositionShape {
    fixed_dims: Vec<u32>,
    varying_dims: Vec<u32>,
}

impl DecompositionShape {
    pub fn new(mut fixed_dims: Vec<u32>, mut varying_dims: Vec<u32>) -> Result<Self, StrataError> {
        if varying_dims.is_empty() {
            return Err(StrataError::InvalidShape("no varying factor".into()));
        }
        if let Some(&bad) = varying_dims.iter().find(|&&v| v < 2) {
            return Err(StrataError::InvalidShape(format!("varying dim {bad} < 2")));
        }
        if fixed_dims.contains(&0) {
            return Err(StrataError::InvalidShape("fixed dim 0".into()));
        }
        fixed_dims.sort_unstable();
        varying_dims.sort_unstable();
        Ok(Self { fixed_dims, varying_dims })
    }

    pub fn fixed_dims(&self) -> &[u32] {
        &self.fixed_dims
    }

    pub fn varying_dims(&self) -> &[u32] {
        &self.varying_dims
    }

    pub fn total(&self) -> u32 {
        self.fixed_dims.iter().chain(&self.varying_dims).sum()
    }

    /// Every fixed dimension is at most every varying dimension.
    pub fn fixed_below_varying(&self) -> bool {
        match (self.fixed_dims.last(), self.varying_dims.first()) {
            (Some(c), Some(v)) => c <= v,
            _ => true,
        }
    }
}

/// Closed form for `B_{i,j,d}`, `i ≠ j`: `½d(2g_i+2g_j+1−3d)`.
pub fn b_offdiag_codim(gi: u32, gj: u32, d: u32) -> u64 {
    let (gi, gj, d) = (i64::from(gi), i64::from(gj), i64::from(d));
    exact_half(d * (2 * gi + 2 * gj + 1 - 3 * d)) as u64
}

/// Closed form for `B_{i,i,d}`: `½d(4g_i+1−5d)`.
pub fn b_diag_codim(gi: u32, d: u32) -> u64 {
    let (gi, d) = (i64::from(gi), i64::from(d));
    exact_half(d * (4 * gi + 1 - 5 * d)) as u64
}

/// Closed form for a varying factor of dimension `gv` splitting off a fixed
/// factor of dimension `gc`: `½g_c(2g_v+1−g_c)`.
pub fn c_codim(gc: u32, gv: u32) -> u64 {
    let (gc, gv) = (i64::from(gc), i64::from(gv));
    exact_half(gc * (2 * gv + 1 - gc)) as u64
}

fn sdim(g: u32) -> i64 {
    dim_space(ModuliSpace::Siegel { g }) as i64
}

fn udim(p: u32, q: u32) -> i64 {
    dim_space(ModuliSpace::Unitary { p, q }) as i64
}

fn check_varying(dims: &[u32]) -> Result<Vec<u32>, StrataError> {
    if dims.is_empty() {
        return Err(StrataError::InvalidShape("no varying factor".into()));
    }
    if let Some(&bad) = dims.iter().find(|&&g| g < 2) {
        return Err(StrataError::VaryingDimTooSmall(bad));
    }
    let mut sorted = dims.to_vec();
    sorted.sort_unstable();
    Ok(sorted)
}

/// All `B` strata of `𝒜_{g_1}×⋯×𝒜_{g_r}`, off-diagonal first.
///
/// Panics if a directly summed codimension differs from its closed form.
pub fn strata_of_product(varying_dims: &[u32]) -> Result<Vec<Stratum>, StrataError> {
    let dims = check_varying(varying_dims)?;
    let ambient: u64 = dims.iter().map(|&g| siegel_dim(g)).sum();
    let amb = ambient as i64;
    let mut out = Vec::new();
    for i in 0..dims.len() {
        for j in i + 1..dims.len() {
            let (gi, gj) = (dims[i], dims[j]);
            for d in 1..=gi.min(gj) {
                let dim = amb - sdim(gi) - sdim(gj) + sdim(gi - d) + sdim(d) + sdim(gj - d);
                let s = Stratum::new(StratumKind::BOffdiag { i: i + 1, j: j + 1, d }, ambient, dim);
                assert_eq!(s.codim, b_offdiag_codim(gi, gj, d), "{}", s.kind);
                out.push(s);
            }
        }
    }
    for (i, &gi) in dims.iter().enumerate() {
        for d in 1..=gi / 2 {
            let dim = amb - sdim(gi) + sdim(gi - 2 * d) + sdim(d);
            let s = Stratum::new(StratumKind::BDiag { i: i + 1, d }, ambient, dim);
            assert_eq!(s.codim, b_diag_codim(gi, d), "{}", s.kind);
            out.push(s);
        }
    }
    Ok(out)
}

/// A minimum codimension over enumerated strata, with its witness and the
/// closed form it is checked against (when one applies).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodimReport {
    pub value: u64,
    pub witness: Stratum,
    pub closed_form: Option<u64>,
    pub strata_count: usize,
    pub notes: Vec<String>,
}

impl CodimReport {
    /// True unless a closed form applies and differs from the enumerated minimum.
    pub fn agrees(&self) -> bool {
        self.closed_form.map_or(true, |c| c == self.value)
    }
}

fn minimum(strata: &[Stratum]) -> Stratum {
    // first minimal stratum in enumeration order
    *strata
        .iter()
        .min_by_key(|s| s.codim)
        .expect("at least one stratum")
}

/// Codimension of the multiply-decomposable locus in a product of Siegel spaces.
/// The closed form is `2g_1−2` for the smallest factor `g_1`.
pub fn mdec_codim_product(varying_dims: &[u32]) -> Result<CodimReport, StrataError> {
    let strata = strata_of_product(varying_dims)?;
    let g1 = *varying_dims.iter().min().expect("checked non-empty");
    let witness = minimum(&strata);
    Ok(CodimReport {
        value: witness.codim,
        witness,
        closed_form: Some(2 * u64::from(g1) - 2),
        strata_count: strata.len(),
        notes: Vec::new(),
    })
}

/// All strata of `{P}×𝒜_{g_{v,1}}×⋯×𝒜_{g_{v,s}}`: the `B` strata of the
/// varying part and one `C(i,j)` per varying factor `i` and fixed factor `j`
/// with `g_{c,j} ≤ g_{v,i}`. Pairs with `g_{c,j} > g_{v,i}` are empty and are
/// returned separately.
pub fn strata_of_fixedpart(shape: &DecompositionShape) -> (Vec<Stratum>, Vec<StratumKind>) {
    let mut strata = strata_of_product(&shape.varying_dims).expect("shape is validated");
    let ambient: u64 = shape.varying_dims.iter().map(|&g| siegel_dim(g)).sum();
    let mut excluded = Vec::new();
    for (i, &gv) in shape.varying_dims.iter().enumerate() {
        for (j, &gc) in shape.fixed_dims.iter().enumerate() {
            let kind = StratumKind::C { i: i + 1, j: j + 1 };
            if gc > gv {
                excluded.push(kind);
                continue;
            }
            let dim = ambient as i64 - sdim(gv) + sdim(gv - gc);
            let s = Stratum::new(kind, ambient, dim);
            assert_eq!(s.codim, c_codim(gc, gv), "{kind}");
            strata.push(s);
        }
    }
    (strata, excluded)
}

/// Codimension of the multiply-decomposable locus in a fixed-part product.
///
/// The closed form `min(2g_{v,1}−2, ½g_{c,1}(2g_{v,1}+1−g_{c,1}), ½g_{c,r}(2g_{v,1}+1−g_{c,r}))`
/// is only attached when every `C` stratum is realizable (all fixed dims at
/// most all varying dims); otherwise the enumerated minimum stands alone and
/// the divergence is noted.
pub fn mdec_codim_fixedpart(shape: &DecompositionShape) -> CodimReport {
    if shape.fixed_dims.is_empty() {
        return mdec_codim_product(&shape.varying_dims).expect("shape is validated");
    }
    let (strata, excluded) = strata_of_fixedpart(shape);
    let witness = minimum(&strata);
    let gv1 = shape.varying_dims[0];
    let mut notes = Vec::new();
    let closed_form = if shape.fixed_below_varying() {
        let gc1 = shape.fixed_dims[0];
        let gcr = *shape.fixed_dims.last().unwrap();
        Some((2 * u64::from(gv1) - 2).min(c_codim(gc1, gv1)).min(c_codim(gcr, gv1)))
    } else {
        notes.push(format!(
            "closed form not applied: fixed dims {:?} exceed some varying dim; empty strata {}",
            shape.fixed_dims,
            excluded.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
        ));
        None
    };
    if witness.codim < u64::from(gv1) {
        notes.push(format!("codimension {} is below the smallest varying dim {gv1}", witness.codim));
    }
    CodimReport { value: witness.codim, witness, closed_form, strata_count: strata.len(), notes }
}

/// Strata of `𝒵_L(p,q)`: non-CM strata `Z²×P'` with `Z ∈ 𝒜_k`, then CM strata
/// with `Z² ∈ 𝒵_L(k,ℓ)`, `k, ℓ` even.
pub fn strata_of_unitary(p: u32, q: u32) -> Result<Vec<Stratum>, StrataError> {
    if p < 1 || q < 1 {
        return Err(StrataError::InvalidShape(format!("unitary signature ({p},{q}) needs p, q >= 1")));
    }
    let ambient = unitary_dim(p, q);
    let mut out = Vec::new();
    for k in 1..=p.min(q) {
        let dim = sdim(k) + udim(p - k, q - k);
        out.push(Stratum::new(StratumKind::UnitaryNonCm { k }, ambient, dim));
    }
    for k in (0..=p).step_by(2) {
        for l in (0..=q).step_by(2) {
            if k + l < 2 {
                continue;
            }
            let dim = udim(k / 2, l / 2) + udim(p - k, q - l);
            out.push(Stratum::new(StratumKind::UnitaryCm { k, l }, ambient, dim));
        }
    }
    Ok(out)
}

/// `min(2p, p+q−2, 2q)`.
pub fn unitary_closed_form(p: u32, q: u32) -> u64 {
    let (p, q) = (u64::from(p), u64::from(q));
    (2 * p).min(2 * q).min((p + q).saturating_sub(2))
}

/// `n/4` in lowest terms.
fn quarters(n: i64) -> String {
    match (n % 4 == 0, n % 2 == 0) {
        (true, _) => (n / 4).to_string(),
        (false, true) => format!("{}/2", n / 2),
        _ => format!("{n}/4"),
    }
}

fn unitary_notes(p: u32, q: u32, strata: &[Stratum]) -> Vec<String> {
    let mut notes = Vec::new();
    // the closed display for the non-CM locus, pq − ½k(p+q−(3/2)k−½), gives
    // codimension k(2p+2q−3k−1)/4
    let halved: Vec<String> = strata
        .iter()
        .filter_map(|s| match s.kind {
            StratumKind::UnitaryNonCm { k } => {
                let four_x = i64::from(k) * (2 * i64::from(p) + 2 * i64::from(q) - 3 * i64::from(k) - 1);
                (four_x != 4 * s.codim as i64)
                    .then(|| format!("k={k}: display codim {} vs direct {}", quarters(four_x), s.codim))
            }
            _ => None,
        })
        .collect();
    if !halved.is_empty() {
        notes.push(format!(
            "non-CM stratum dimension uses dim A_k + dim Z_L(p-k,q-k); the closed display \
             pq-(1/2)k(p+q-(3/2)k-1/2) disagrees ({})",
            halved.join("; ")
        ));
    }
    let cm_dim = |pred: &dyn Fn(u32, u32) -> bool| {
        strata
            .iter()
            .filter_map(|s| match s.kind {
                StratumKind::UnitaryCm { k, l } if pred(k, l) => Some(s.stratum_dim),
                _ => None,
            })
            .max()
    };
    if let Some(wide) = cm_dim(&|k, l| k + l > 2) {
        let narrow = cm_dim(&|k, l| k + l == 2);
        if narrow.map_or(true, |n| wide > n) {
            notes.push(format!(
                "a CM stratum with k+l > 2 has dimension {wide}, exceeding every k+l = 2 CM stratum ({})",
                narrow.map_or_else(|| "none".to_string(), |n| n.to_string())
            ));
        }
    }
    notes
}

/// Codimension of the multiply-decomposable locus in `𝒵_L(p,q)`, checked
/// against `min(2p, p+q−2, 2q)` whenever `p+q ≥ 3`.
pub fn mdec_codim_unitary(p: u32, q: u32) -> Result<CodimReport, StrataError> {
    let strata = strata_of_unitary(p, q)?;
    let witness = minimum(&strata);
    let closed_form = (p + q >= 3).then(|| unitary_closed_form(p, q));
    let mut notes = unitary_notes(p, q, &strata);
    if let Some(c) = closed_form.filter(|&c| c != witness.codim) {
        notes.push(format!(
            "stratum {} has codimension {} below min(2p, p+q-2, 2q) = {c}",
            witness.kind, witness.codim
        ));
    }
    Ok(CodimReport { value: witness.codim, witness, closed_form, strata_count: strata.len(), notes })
}

/// Same locus after multiplying by `r` fixed pairwise non-isogenous non-CM
/// elliptic curves; those factors contribute no strata.
pub fn mdec_codim_unitary_fixedpart(r: u32, p: u32, q: u32) -> Result<CodimReport, StrataError> {
    let mut report = mdec_codim_unitary(p, q)?;
    if r > 0 {
        report.notes.push(format!("{r} fixed non-CM elliptic factor(s) add no strata"));
    }
    Ok(report)
}
