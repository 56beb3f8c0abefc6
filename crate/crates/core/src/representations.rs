//! Explicit representation matrices, subgroup averages, and isotypic projectors.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::characters::CharacterTable;
use crate::error::{Error, Result};
use crate::group::{Family, GroupTable, Subgroup};
use crate::linalg::{self, CMatrix, ONE};
use crate::young;

/// A homomorphism from a group into unitary matrices.
pub trait Representation {
    fn dim(&self) -> usize;
    fn group(&self) -> &GroupTable;
    fn matrix(&self, g: usize) -> CMatrix;
}

/// Unitary matrices of one irreducible of a supported family.
#[derive(Clone, Debug)]
pub struct IrrepMatrices<'g> {
    group: &'g GroupTable,
    irrep: usize,
    mats: Vec<CMatrix>,
}

/// Residuals certifying that a list of matrices is a unitary representation
/// with the expected character.
#[derive(Clone, Copy, Debug, Default)]
pub struct RepResiduals {
    pub homomorphism: f64,
    pub unitarity: f64,
    pub trace: f64,
}

impl<'g> IrrepMatrices<'g> {
    pub fn irrep(&self) -> usize {
        self.irrep
    }

    pub fn mats(&self) -> &[CMatrix] {
        &self.mats
    }

    pub fn get(&self, g: usize) -> &CMatrix {
        &self.mats[g]
    }

    /// Checks the homomorphism property over all pairs, unitarity, and
    /// agreement of traces with `ct`.
    pub fn certify(&self, ct: &CharacterTable<'_>) -> RepResiduals {
        let g = self.group;
        let mut res = RepResiduals::default();
        for a in 0..g.order() {
            for b in 0..g.order() {
                let diff = &self.mats[g.mul(a, b)] - &self.mats[a] * &self.mats[b];
                res.homomorphism = res.homomorphism.max(linalg::frobenius(&diff));
            }
            res.unitarity = res.unitarity.max(linalg::unitarity_residual(&self.mats[a]));
            res.trace = res
                .trace
                .max((linalg::trace(&self.mats[a]) - ct.at(self.irrep, a)).norm());
        }
        res
    }
}

impl Representation for IrrepMatrices<'_> {
    fn dim(&self) -> usize {
        self.mats[0].nrows()
    }

    fn group(&self) -> &GroupTable {
        self.group
    }

    fn matrix(&self, g: usize) -> CMatrix {
        self.mats[g].clone()
    }
}

/// Explicit unitary matrices for irreducible `sigma` of `ct`'s group.
///
/// Degree-1 irreducibles come straight from the character. Higher degrees are
/// built for dihedral groups (rotation/reflection matrices), symmetric groups
/// (Young's orthogonal form), and direct products of supported groups
/// (Kronecker products of factor irreducibles). The result's traces are
/// checked against the character table.
pub fn irrep_matrices<'g>(ct: &CharacterTable<'g>, sigma: usize) -> Result<IrrepMatrices<'g>> {
    let group = ct.group();
    if sigma >= ct.num_irreps() {
        return Err(Error::Domain(format!("no irreducible with index {sigma}")));
    }
    let mats = if ct.degree(sigma) == 1 {
        (0..group.order())
            .map(|g| CMatrix::from_element(1, 1, ct.at(sigma, g)))
            .collect()
    } else {
        higher_degree(ct, sigma)?
    };
    let irrep = IrrepMatrices { group, irrep: sigma, mats };
    for g in 0..group.order() {
        let err = (linalg::trace(&irrep.mats[g]) - ct.at(sigma, g)).norm();
        if err > 1e-8 {
            return Err(Error::Numerical(format!(
                "constructed matrices for {} disagree with the character table by {err:e}",
                ct.label(sigma)
            )));
        }
    }
    Ok(irrep)
}

fn higher_degree(ct: &CharacterTable<'_>, sigma: usize) -> Result<Vec<CMatrix>> {
    let group = ct.group();
    let matches = |mats: &[CMatrix]| {
        group.classes().iter().enumerate().all(|(m, class)| {
            (linalg::trace(&mats[class[0]]) - ct.value(sigma, m)).norm() < 1e-8
        })
    };
    match group.family() {
        Family::Dihedral(n) => {
            let n = *n;
            for j in 1..n {
                if 2 * j >= n {
                    break;
                }
                let mats = dihedral_irrep(n, j);
                if matches(&mats) {
                    return Ok(mats);
                }
            }
        }
        Family::Symmetric(n) => {
            for shape in young::partitions(*n) {
                let tabs = young::standard_tableaux(&shape);
                if tabs.len() != ct.degree(sigma) {
                    continue;
                }
                let mats = young_orthogonal(group, *n, &tabs);
                if matches(&mats) {
                    return Ok(mats);
                }
            }
        }
        Family::Product(a, b) => return product_irrep(ct, sigma, a, b),
        _ => {}
    }
    Err(Error::Unsupported(format!(
        "no explicit matrices for degree-{} irreducible {} of a {}",
        ct.degree(sigma),
        ct.label(sigma),
        group.family().name()
    )))
}

fn rotation(theta: f64, flip: bool) -> CMatrix {
    let (s, c) = theta.sin_cos();
    let f = if flip { -1.0 } else { 1.0 };
    // R(θ)·diag(1, f)
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c, 0.0),
            Complex64::new(-s * f, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(c * f, 0.0),
        ],
    )
}

fn dihedral_irrep(n: usize, j: usize) -> Vec<CMatrix> {
    (0..2 * n)
        .map(|x| {
            let (a, f) = (x % n, x / n);
            rotation(2.0 * PI * (j * a) as f64 / n as f64, f == 1)
        })
        .collect()
}

fn young_orthogonal(group: &GroupTable, n: usize, tabs: &[young::Tableau]) -> Vec<CMatrix> {
    let gens: Vec<(usize, CMatrix)> = (0..n - 1)
        .map(|i| {
            let mut p: Vec<usize> = (0..n).collect();
            p.swap(i, i + 1);
            let idx = (0..group.order())
                .find(|&x| group.permutation(x) == Some(p.as_slice()))
                .expect("adjacent transposition missing from S_n");
            (idx, young::adjacent_transposition(tabs, i))
        })
        .collect();
    generate_from(group, &gens, tabs.len())
}

/// Extends generator images to the whole group along a Cayley-graph BFS.
fn generate_from(group: &GroupTable, gens: &[(usize, CMatrix)], dim: usize) -> Vec<CMatrix> {
    let mut mats: Vec<Option<CMatrix>> = vec![None; group.order()];
    mats[group.identity()] = Some(CMatrix::identity(dim, dim));
    let mut queue = VecDeque::from([group.identity()]);
    while let Some(x) = queue.pop_front() {
        for (s, m) in gens {
            let y = group.mul(x, *s);
            if mats[y].is_none() {
                mats[y] = Some(mats[x].as_ref().unwrap() * m);
                queue.push_back(y);
            }
        }
    }
    mats.into_iter()
        .map(|m| m.expect("generators do not generate the group"))
        .collect()
}

fn product_irrep(
    ct: &CharacterTable<'_>,
    sigma: usize,
    a: &GroupTable,
    b: &GroupTable,
) -> Result<Vec<CMatrix>> {
    let group = ct.group();
    let ct_a = CharacterTable::new(a)?;
    let ct_b = CharacterTable::new(b)?;
    let nb = b.order();
    for alpha in 0..ct_a.num_irreps() {
        for beta in 0..ct_b.num_irreps() {
            if ct_a.degree(alpha) * ct_b.degree(beta) != ct.degree(sigma) {
                continue;
            }
            let agrees = group.classes().iter().enumerate().all(|(m, class)| {
                let x = class[0];
                let v = ct_a.at(alpha, x / nb) * ct_b.at(beta, x % nb);
                (v - ct.value(sigma, m)).norm() < 1e-8
            });
            if agrees {
                let ma = irrep_matrices(&ct_a, alpha)?;
                let mb = irrep_matrices(&ct_b, beta)?;
                return Ok((0..group.order())
                    .map(|x| ma.get(x / nb).kronecker(mb.get(x % nb)))
                    .collect());
            }
        }
    }
    Err(Error::Numerical(format!(
        "no factor pair reproduces the character of {}",
        ct.label(sigma)
    )))
}

/// The regular representation `R(g)|x⟩ = |x g⁻¹⟩`, i.e. right multiplication
/// written as a left action, stored as permutations.
#[derive(Clone, Debug)]
pub struct RegularRep<'g> {
    group: &'g GroupTable,
}

impl<'g> RegularRep<'g> {
    pub fn new(group: &'g GroupTable) -> Self {
        RegularRep { group }
    }

    /// Image of basis vector `x` under `R(g)`.
    #[inline]
    pub fn apply(&self, g: usize, x: usize) -> usize {
        self.group.mul(x, self.group.inverse(g))
    }

    pub fn character(&self, g: usize) -> usize {
        (0..self.group.order()).filter(|&x| self.apply(g, x) == x).count()
    }
}

impl Representation for RegularRep<'_> {
    fn dim(&self) -> usize {
        self.group.order()
    }

    fn group(&self) -> &GroupTable {
        self.group
    }

    fn matrix(&self, g: usize) -> CMatrix {
        let n = self.group.order();
        let mut m = CMatrix::zeros(n, n);
        for x in 0..n {
            m[(self.apply(g, x), x)] = ONE;
        }
        m
    }
}

/// `τ(H) = (1/|H|) Σ_{h∈H} τ(h)`.
pub fn subgroup_average<R: Representation + ?Sized>(rep: &R, h: &Subgroup<'_>) -> CMatrix {
    let d = rep.dim();
    let mut acc = CMatrix::zeros(d, d);
    for &x in h.members() {
        acc += rep.matrix(x);
    }
    acc / Complex64::new(h.order() as f64, 0.0)
}

/// `Π_τ = (d_τ/|G|) Σ_g χ_τ(g)* U(g)` for a representation given as one matrix
/// per group element.
pub fn isotypic_projector(ct: &CharacterTable<'_>, tau: usize, action: &[CMatrix]) -> Result<CMatrix> {
    let group = ct.group();
    if action.len() != group.order() {
        return Err(Error::InvalidAction(format!(
            "expected {} matrices, got {}",
            group.order(),
            action.len()
        )));
    }
    let d = action[0].nrows();
    let mut p = CMatrix::zeros(d, d);
    for (g, u) in action.iter().enumerate() {
        p += u * ct.at(tau, g).conj();
    }
    p *= Complex64::new(ct.degree(tau) as f64 / group.order() as f64, 0.0);
    let residue = linalg::idempotence_residual(&p);
    if residue > 1e-8 {
        return Err(Error::InvalidAction(format!(
            "projector for {} is not idempotent (residue {residue:e}); the matrices are not a representation",
            ct.label(tau)
        )));
    }
    Ok(p)
}

/// Rank of an orthogonal projector from its trace.
pub fn rank_of_projector(p: &CMatrix) -> Result<usize> {
    let t = linalg::trace(p);
    if t.im.abs() > 1e-6 {
        return Err(Error::Numerical(format!("projector trace {t} is not real")));
    }
    let r = linalg::snap_integer(t.re, 1e-6, "projector trace")?;
    usize::try_from(r).map_err(|_| Error::Numerical(format!("negative projector trace {t}")))
}

/// Diagonal action `g ↦ ⊗_i σ_i(g)` of a list of irreducibles.
pub fn diagonal_tensor(factors: &[&IrrepMatrices<'_>]) -> Vec<CMatrix> {
    assert!(!factors.is_empty());
    let order = factors[0].mats.len();
    (0..order)
        .map(|g| {
            let mats: Vec<&CMatrix> = factors.iter().map(|f| f.get(g)).collect();
            linalg::kron_all(&mats)
        })
        .collect()
}

/// Every irreducible of `ct` with explicit matrices, or `None` where the family
/// is unsupported.
pub fn all_irrep_matrices<'g>(ct: &CharacterTable<'g>) -> Vec<Option<IrrepMatrices<'g>>> {
    (0..ct.num_irreps())
        .map(|t| irrep_matrices(ct, t).ok())
        .collect()
}
