//! Dimensions of the ambient moduli spaces and of the symbolic groups acting on
//! them, together with Satake–Baily–Borel boundary codimensions.

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuliError {
    #[error("no boundary codimension rule is available for {0}")]
    NoCompactificationRule(ModuliSpace),
    #[error("genus {0} is too small (need g >= 2)")]
    GroundTooSmall(u32),
    #[error("a group expression needs at least one atom")]
    EmptyGroup,
    #[error("degenerate atom {0}")]
    DegenerateAtom(String),
    #[error("cannot parse group expression {0:?}")]
    Parse(String),
}

/// `𝒜_g[n]`, `𝒵_L(p,q)[n]` or `𝓜_g[n]`. Dimensions never depend on the level.
///
/// `Siegel(0)` and `Unitary` with a zero parameter are point spaces; they only
/// arise as residual factors in stratum arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModuliSpace {
    Siegel { g: u32 },
    Unitary { p: u32, q: u32 },
    CurveModuli { g: u32 },
}

impl fmt::Display for ModuliSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuliSpace::Siegel { g } => write!(f, "A_{g}"),
            ModuliSpace::Unitary { p, q } => write!(f, "Z_L({p},{q})"),
            ModuliSpace::CurveModuli { g } => write!(f, "M_{g}"),
        }
    }
}

/// Halves an even quantity. The codimension formulas carry factors of ½ that
/// must always cancel; an odd argument is a bug.
pub(crate) fn exact_half(twice: i64) -> i64 {
    assert!(twice % 2 == 0, "non-integral half-integer formula value {twice}/2");
    twice / 2
}

pub fn siegel_dim(g: u32) -> u64 {
    let g = u64::from(g);
    g * (g + 1) / 2
}

pub fn unitary_dim(p: u32, q: u32) -> u64 {
    u64::from(p) * u64::from(q)
}

pub fn dim_space(space: ModuliSpace) -> u64 {
    match space {
        ModuliSpace::Siegel { g } => siegel_dim(g),
        ModuliSpace::Unitary { p, q } => unitary_dim(p, q),
        ModuliSpace::CurveModuli { g } => 3 * u64::from(g) - 3,
    }
}

/// Whether a boundary codimension is the true value or only a guaranteed bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Exact,
    LowerBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundaryCodim {
    pub value: u64,
    pub bound: Bound,
}

impl BoundaryCodim {
    pub fn is_exact(&self) -> bool {
        self.bound == Bound::Exact
    }
}

/// Codimension of the boundary of the Satake–Baily–Borel compactification.
///
/// For `𝒜_g` the boundary strata are `𝒜_i`, `i < g`, so the codimension is
/// exactly `g`. For `𝒵_L(p,q)` the strata are `𝒵_L(p−r,q−r)`, giving the
/// lower bound `p+q−1`.
pub fn boundary_codim(space: ModuliSpace) -> Result<BoundaryCodim, ModuliError> {
    match space {
        ModuliSpace::Siegel { g } if g >= 1 => Ok(BoundaryCodim { value: u64::from(g), bound: Bound::Exact }),
        ModuliSpace::Unitary { p, q } if p >= 1 && q >= 1 => Ok(BoundaryCodim {
            value: u64::from(p) + u64::from(q) - 1,
            bound: Bound::LowerBound,
        }),
        other => Err(ModuliError::NoCompactificationRule(other)),
    }
}

/// Codimension of the Torelli locus in `𝒜_g`: `g(g+1)/2 − (3g−3)`.
pub fn torelli_codim(g: u32) -> Result<u64, ModuliError> {
    if g < 2 {
        return Err(ModuliError::GroundTooSmall(g));
    }
    Ok(siegel_dim(g) - dim_space(ModuliSpace::CurveModuli { g }))
}

/// One simple factor of a formal product of groups.
///
/// Atoms order by kind first (all `Sp` before `SU`) and then by parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupAtom {
    /// `Sp(2k)`; the field is the rank `k`.
    Sp(u32),
    /// A ℚ-form of `SU(p,q)`.
    SuForm(u32, u32),
}

impl GroupAtom {
    pub fn dim(&self) -> u64 {
        match *self {
            GroupAtom::Sp(k) => {
                let k = u64::from(k);
                k * (2 * k + 1)
            }
            GroupAtom::SuForm(p, q) => {
                let n = u64::from(p) + u64::from(q);
                n * n - 1
            }
        }
    }
}

impl fmt::Display for GroupAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupAtom::Sp(k) => write!(f, "Sp({})", 2 * k),
            GroupAtom::SuForm(p, q) => write!(f, "SU({p},{q})"),
        }
    }
}

/// A non-empty formal product of group atoms in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupExpr {
    atoms: Vec<GroupAtom>,
}

impl GroupExpr {
    pub fn new(mut atoms: Vec<GroupAtom>) -> Result<Self, ModuliError> {
        if atoms.is_empty() {
            return Err(ModuliError::EmptyGroup);
        }
        for a in &atoms {
            let degenerate = match *a {
                GroupAtom::Sp(k) => k == 0,
                GroupAtom::SuForm(p, q) => p == 0 || q == 0,
            };
            if degenerate {
                return Err(ModuliError::DegenerateAtom(a.to_string()));
            }
        }
        atoms.sort_unstable();
        Ok(Self { atoms })
    }

    /// `∏ Sp(2k)` over the given ranks.
    pub fn symplectic(ranks: &[u32]) -> Result<Self, ModuliError> {
        Self::new(ranks.iter().map(|&k| GroupAtom::Sp(k)).collect())
    }

    pub fn atoms(&self) -> &[GroupAtom] {
        &self.atoms
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

/// Sum of atom dimensions: `k(2k+1)` for `Sp(2k)`, `(p+q)²−1` for `SU(p,q)`.
pub fn group_dim(expr: &GroupExpr) -> u64 {
    expr.atoms.iter().map(GroupAtom::dim).sum()
}

impl fmt::Display for GroupExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.atoms.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("x"))
    }
}

impl std::str::FromStr for GroupExpr {
    type Err = ModuliError;

    /// Parses labels such as `Sp(4)xSp(6)` or `SU(2,2)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModuliError::Parse(s.to_string());
        let mut atoms = Vec::new();
        for part in s.split(['x', '*', '×']) {
            let part = part.trim();
            let inner = |prefix: &str| {
                part.strip_prefix(prefix).and_then(|r| r.strip_suffix(')')).map(str::trim)
            };
            if let Some(n) = inner("Sp(") {
                let n: u32 = n.parse().map_err(|_| bad())?;
                if n == 0 || n % 2 == 1 {
                    return Err(bad());
                }
                atoms.push(GroupAtom::Sp(n / 2));
            } else if let Some(pq) = inner("SU(") {
                let (p, q) = pq.split_once(',').ok_or_else(bad)?;
                atoms.push(GroupAtom::SuForm(
                    p.trim().parse().map_err(|_| bad())?,
                    q.trim().parse().map_err(|_| bad())?,
                ));
            } else {
                return Err(bad());
            }
        }
        Self::new(atoms)
    }
}

impl Serialize for GroupExpr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_dimensions() {
        assert_eq!(dim_space(ModuliSpace::Siegel { g: 4 }), 10);
        assert_eq!(dim_space(ModuliSpace::Unitary { p: 2, q: 3 }), 6);
        assert_eq!(dim_space(ModuliSpace::Siegel { g: 0 }), 0);
        assert_eq!(dim_space(ModuliSpace::Unitary { p: 0, q: 3 }), 0);
        assert_eq!(dim_space(ModuliSpace::CurveModuli { g: 4 }), 9);
    }

    #[test]
    fn boundary_codims() {
        let s3 = boundary_codim(ModuliSpace::Siegel { g: 3 }).unwrap();
        assert_eq!((s3.value, s3.bound), (3, Bound::Exact));
        let u22 = boundary_codim(ModuliSpace::Unitary { p: 2, q: 2 }).unwrap();
        assert_eq!((u22.value, u22.bound), (3, Bound::LowerBound));
        assert_eq!(boundary_codim(ModuliSpace::Siegel { g: 1 }).unwrap().value, 1);
        assert!(matches!(
            boundary_codim(ModuliSpace::CurveModuli { g: 3 }),
            Err(ModuliError::NoCompactificationRule(_))
        ));
        assert!(boundary_codim(ModuliSpace::Siegel { g: 0 }).is_err());
    }

    #[test]
    fn torelli() {
        assert_eq!(torelli_codim(4), Ok(1));
        assert_eq!(torelli_codim(3), Ok(0));
        assert_eq!(torelli_codim(5), Ok(3));
        assert_eq!(torelli_codim(2), Ok(0));
        assert_eq!(torelli_codim(1), Err(ModuliError::GroundTooSmall(1)));
    }

    #[test]
    fn group_dimensions() {
        assert_eq!(group_dim(&GroupExpr::symplectic(&[4]).unwrap()), 36);
        assert_eq!(group_dim(&GroupExpr::symplectic(&[2, 3]).unwrap()), 31);
        assert_eq!(group_dim(&GroupExpr::new(vec![GroupAtom::SuForm(2, 2)]).unwrap()), 15);
        assert_eq!(GroupExpr::new(vec![]), Err(ModuliError::EmptyGroup));
    }

    #[test]
    fn labels_parse_back() {
        let e = GroupExpr::symplectic(&[3, 2]).unwrap();
        assert_eq!(e.label(), "Sp(4)xSp(6)");
        assert_eq!("Sp(6)xSp(4)".parse::<GroupExpr>().unwrap(), e);
        assert_eq!("SU(3,2)".parse::<GroupExpr>().unwrap().label(), "SU(3,2)");
        assert!("Sp(5)".parse::<GroupExpr>().is_err());
        assert!("GL(2)".parse::<GroupExpr>().is_err());
    }

    #[test]
    fn siegel_steps() {
        for g in 0..40 {
            assert_eq!(siegel_dim(g + 1) - siegel_dim(g), u64::from(g) + 1);
        }
        for g in 1..40 {
            let b = boundary_codim(ModuliSpace::Siegel { g }).unwrap().value;
            assert_eq!(b, siegel_dim(g) - siegel_dim(g - 1));
        }
        for m in 1..40u64 {
            assert_eq!(GroupAtom::Sp(m as u32 + 1).dim() - GroupAtom::Sp(m as u32).dim(), 4 * m + 3);
        }
        for p in 1..12 {
            for q in 1..12 {
                let b = boundary_codim(ModuliSpace::Unitary { p, q }).unwrap().value;
                assert_eq!(b, unitary_dim(p, q) - unitary_dim(p - 1, q - 1));
            }
        }
    }
}
