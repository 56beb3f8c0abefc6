//! Missing harmonics of a subgroup and sufficient conditions for their existence.
//!
//! An irreducible `η` is missing from `H` when the average `η(H)` vanishes.
//! Since `η(H)` is an orthogonal projection with trace `(1/|H|) Σ_{h∈H} χ_η(h)`,
//! that is decided from characters alone.

use num_complex::Complex64;

use crate::characters::CharacterTable;
use crate::group::{normal_subgroups, Subgroup};
use crate::representations::{irrep_matrices, rank_of_projector, subgroup_average};

/// Absolute tolerance, per element of `H`, for a character sum to count as zero.
pub const CHARACTER_SUM_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionStatus {
    Holds,
    Fails,
    NotApplicable,
}

#[derive(Clone, Debug)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub status: ConditionStatus,
    pub detail: String,
}

impl ConditionCheck {
    pub fn holds(&self) -> bool {
        self.status == ConditionStatus::Holds
    }
}

/// The four sufficient conditions, in order: normal and nontrivial; transverse
/// to a proper normal subgroup; transitive in `S_n`; index below `Σ d_τ`.
#[derive(Clone, Debug)]
pub struct SufficientConditions {
    pub checks: [ConditionCheck; 4],
    /// Members of the proper normal subgroup `K` with `HK = G`, if any.
    pub transverse_witness: Option<Vec<usize>>,
    /// `C = Σ_τ d_τ`.
    pub degree_sum: usize,
}

impl SufficientConditions {
    pub fn any_holds(&self) -> bool {
        self.checks.iter().any(ConditionCheck::holds)
    }
}

#[derive(Clone, Debug)]
pub struct HarmonicReport<'g> {
    pub subgroup: Subgroup<'g>,
    /// Irreducible indices `η` with `η(H) = 0`, ascending.
    pub missing: Vec<usize>,
    /// `Σ_{h∈H} χ_τ(h)` for every irreducible.
    pub character_sums: Vec<Complex64>,
    /// `rank τ(H)` from explicit matrices, where the family supports them.
    pub explicit_ranks: Vec<Option<usize>>,
    pub conditions: SufficientConditions,
}

impl HarmonicReport<'_> {
    /// Whether every explicit rank agrees with the character-sum verdict.
    pub fn cross_check_consistent(&self) -> bool {
        self.explicit_ranks.iter().enumerate().all(|(t, r)| match r {
            Some(r) => (*r == 0) == self.missing.contains(&t),
            None => true,
        })
    }

    /// `rank τ(H) = (1/|H|) Σ_h χ_τ(h)` from characters.
    pub fn character_ranks(&self) -> Vec<f64> {
        let order = self.subgroup.order() as f64;
        self.character_sums.iter().map(|s| s.re / order).collect()
    }
}

pub fn is_missing(ct: &CharacterTable<'_>, eta: usize, h: &Subgroup<'_>) -> bool {
    ct.character_sum(eta, h.members()).norm() < CHARACTER_SUM_TOL * h.order() as f64
}

pub fn find_missing_harmonics<'g>(ct: &CharacterTable<'g>, h: &Subgroup<'g>) -> HarmonicReport<'g> {
    let r = ct.num_irreps();
    let character_sums: Vec<Complex64> = (0..r).map(|t| ct.character_sum(t, h.members())).collect();
    let missing = (0..r).filter(|&t| is_missing(ct, t, h)).collect();
    let explicit_ranks = (0..r)
        .map(|t| {
            let mats = irrep_matrices(ct, t).ok()?;
            rank_of_projector(&subgroup_average(&mats, h)).ok()
        })
        .collect();
    HarmonicReport {
        subgroup: h.clone(),
        missing,
        character_sums,
        explicit_ranks,
        conditions: sufficient_conditions(ct, h),
    }
}

pub fn sufficient_conditions(ct: &CharacterTable<'_>, h: &Subgroup<'_>) -> SufficientConditions {
    let g = ct.group();

    let normal = h.is_normal();
    let c1 = ConditionCheck {
        name: "normal and nontrivial",
        status: verdict(normal && !h.is_trivial()),
        detail: format!("normal = {normal}, |H| = {}", h.order()),
    };

    // HK = G  ⇔  |H||K| / |H ∩ K| = |G|
    let witness = normal_subgroups(g)
        .into_iter()
        .filter(|k| k.order() < g.order())
        .find(|k| h.order() * k.order() == g.order() * h.intersection_order(k));
    let c2 = match &witness {
        Some(k) => {
            let quotient_irrep = (1..ct.num_irreps()).find(|&t| {
                let d = ct.degree(t) as f64;
                k.members().iter().all(|&x| (ct.at(t, x) - d).norm() < 1e-8)
            });
            ConditionCheck {
                name: "meets every coset of a proper normal subgroup",
                status: ConditionStatus::Holds,
                detail: format!(
                    "K of order {} (index {}); lifted quotient irreducible {}",
                    k.order(),
                    k.index(),
                    quotient_irrep.map_or_else(|| "none".to_string(), |t| ct.label(t))
                ),
            }
        }
        None => ConditionCheck {
            name: "meets every coset of a proper normal subgroup",
            status: ConditionStatus::Fails,
            detail: "no proper normal K with HK = G".into(),
        },
    };

    let c3 = match g.degree() {
        Some(n) if n >= 2 && g.order() == (1..=n).product::<usize>() => {
            let transitive = h.is_transitive().unwrap_or(false);
            ConditionCheck {
                name: "transitive subgroup of S_n",
                status: verdict(transitive),
                detail: format!("n = {n}, transitive = {transitive}"),
            }
        }
        Some(n) => ConditionCheck {
            name: "transitive subgroup of S_n",
            status: ConditionStatus::NotApplicable,
            detail: format!("permutation group of degree {n} is not the full symmetric group on n >= 2 points"),
        },
        None => ConditionCheck {
            name: "transitive subgroup of S_n",
            status: ConditionStatus::NotApplicable,
            detail: format!("{} has no permutation action", g.family().name()),
        },
    };

    let degree_sum: usize = ct.degrees().iter().sum();
    let c4 = ConditionCheck {
        name: "index below the degree sum",
        status: verdict(h.index() < degree_sum),
        detail: format!("|G|/|H| = {}, C = {degree_sum}", h.index()),
    };

    SufficientConditions {
        checks: [c1, c2, c3, c4],
        transverse_witness: witness.map(|k| k.members().to_vec()),
        degree_sum,
    }
}

fn verdict(b: bool) -> ConditionStatus {
    if b {
        ConditionStatus::Holds
    } else {
        ConditionStatus::Fails
    }
}
