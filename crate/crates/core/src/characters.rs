//! Complex character tables by class-algebra diagonalization.
//!
//! The class sums `K_j` span the center of the group algebra, and their
//! common eigenvectors are the central idempotents
//! `e_χ = (d_χ/|G|) Σ_m χ(C_m)* K_m`. Left multiplication by
//! `z = Σ_j c_j K_j` is self-adjoint for the inner product in which the `K_j`
//! are orthogonal with `⟨K_j, K_j⟩ = |C_j|`, provided `c_{j'} = c_j*` where
//! `C_{j'}` is the inverse class. A random such `z` therefore gives a
//! Hermitian matrix whose (generically simple) eigenvectors read off every
//! character at once, already normalized.

use std::cmp::Ordering;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::{Family, GroupTable};
use crate::linalg::snap_integer;

const SPLIT_SEED: u64 = 0x5eed_c1a5_5000;
const MAX_SPLIT_ATTEMPTS: u64 = 16;

/// Character table with irreducibles sorted by degree, then by descending
/// lexicographic character values; index 0 is always the trivial character.
#[derive(Clone, Debug)]
pub struct CharacterTable<'g> {
    group: &'g GroupTable,
    chars: Vec<Vec<Complex64>>,
    degrees: Vec<usize>,
}

/// `Planch(τ) = d_τ² / |G|`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlancherelDistribution {
    pub probs: Vec<f64>,
}

pub fn character_table(g: &GroupTable) -> Result<CharacterTable<'_>> {
    CharacterTable::new(g)
}

impl<'g> CharacterTable<'g> {
    pub fn new(group: &'g GroupTable) -> Result<Self> {
        let r = group.num_classes();
        let n = group.order();
        let sizes: Vec<f64> = group.classes().iter().map(|c| c.len() as f64).collect();

        // a[(j*r + l)*r + m] = #{x ∈ C_j : x⁻¹ z_m ∈ C_l} for a fixed z_m ∈ C_m
        let mut a = vec![0.0f64; r * r * r];
        for (m, class) in group.classes().iter().enumerate() {
            let z = class[0];
            for x in 0..n {
                let j = group.class_of(x);
                let l = group.class_of(group.mul(group.inverse(x), z));
                a[(j * r + l) * r + m] += 1.0;
            }
        }
        let inverse_class: Vec<usize> = group
            .classes()
            .iter()
            .map(|c| group.class_of(group.inverse(c[0])))
            .collect();

        let mut last_gap = 0.0;
        for attempt in 0..MAX_SPLIT_ATTEMPTS {
            let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED + attempt);
            let mut coeffs = vec![Complex64::new(0.0, 0.0); r];
            for j in 0..r {
                let jj = inverse_class[j];
                if jj == j {
                    coeffs[j] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
                } else if j < jj {
                    let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    coeffs[j] = c;
                    coeffs[jj] = c.conj();
                }
            }
            let mut h = DMatrix::<Complex64>::zeros(r, r);
            for m in 0..r {
                for l in 0..r {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (j, c) in coeffs.iter().enumerate() {
                        acc += c * a[(j * r + l) * r + m];
                    }
                    h[(m, l)] = acc * (sizes[m] / sizes[l]).sqrt();
                }
            }
            let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
            let eig = SymmetricEigen::new(h);

            let mut evals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            evals.sort_by(f64::total_cmp);
            let scale = evals.iter().fold(1.0f64, |s, l| s.max(l.abs()));
            let gap = evals.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
            last_gap = gap;
            if r > 1 && gap < 1e-6 * scale {
                continue;
            }

            let mut chars = Vec::with_capacity(r);
            let mut degrees = Vec::with_capacity(r);
            for col in eig.eigenvectors.column_iter() {
                let u0 = col[0];
                let d = (n as f64).sqrt() * u0.norm();
                let degree = snap_integer(d, 1e-6, "irreducible degree")?;
                if degree < 1 {
                    return Err(Error::Numerical(format!("degree {d} below 1")));
                }
                let s = u0.conj() / u0.norm() * (n as f64).sqrt();
                let row: Vec<Complex64> = (0..r)
                    .map(|m| clean((s * col[m] / sizes[m].sqrt()).conj()))
                    .collect();
                chars.push(row);
                degrees.push(degree as usize);
            }

            let mut order: Vec<usize> = (0..r).collect();
            order.sort_by(|&x, &y| compare_rows(degrees[x], &chars[x], degrees[y], &chars[y]));
            let table = CharacterTable {
                group,
                chars: order.iter().map(|&i| chars[i].clone()).collect(),
                degrees: order.iter().map(|&i| degrees[i]).collect(),
            };
            table.certify()?;
            return Ok(table);
        }
        Err(Error::Numerical(format!(
            "could not separate the class-algebra eigenvalues after {MAX_SPLIT_ATTEMPTS} splitting vectors (last gap {last_gap:e})"
        )))
    }

    fn certify(&self) -> Result<()> {
        let n = self.group.order();
        let sum_sq: usize = self.degrees.iter().map(|d| d * d).sum();
        if sum_sq != n {
            return Err(Error::Numerical(format!("Σ d² = {sum_sq} differs from |G| = {n}")));
        }
        if let Some(d) = self.degrees.iter().find(|&&d| n % d != 0) {
            return Err(Error::Numerical(format!("degree {d} does not divide |G| = {n}")));
        }
        let row = self.row_orthogonality_residual();
        let col = self.column_orthogonality_residual();
        if row > 1e-9 || col > 1e-9 {
            return Err(Error::Numerical(format!(
                "orthogonality residuals too large (rows {row:e}, columns {col:e})"
            )));
        }
        Ok(())
    }

    pub fn group(&self) -> &'g GroupTable {
        self.group
    }

    pub fn num_irreps(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self, tau: usize) -> usize {
        self.degrees[tau]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// `χ_τ` on conjugacy class `class`.
    pub fn value(&self, tau: usize, class: usize) -> Complex64 {
        self.chars[tau][class]
    }

    /// `χ_τ(g)` for an element index.
    pub fn at(&self, tau: usize, g: usize) -> Complex64 {
        self.chars[tau][self.group.class_of(g)]
    }

    pub fn row(&self, tau: usize) -> &[Complex64] {
        &self.chars[tau]
    }

    /// `Σ_{h ∈ members} χ_τ(h)`.
    pub fn character_sum(&self, tau: usize, members: &[usize]) -> Complex64 {
        members.iter().map(|&h| self.at(tau, h)).sum()
    }

    /// Max deviation of `(1/|G|) Σ_C |C| χ_τ(C) χ_τ'(C)*` from `δ_ττ'`.
    pub fn row_orthogonality_residual(&self) -> f64 {
        let n = self.group.order() as f64;
        let r = self.num_irreps();
        let mut worst = 0.0f64;
        for t in 0..r {
            for u in 0..r {
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, class) in self.group.classes().iter().enumerate() {
                    acc += self.chars[t][m] * self.chars[u][m].conj() * class.len() as f64;
                }
                let target = if t == u { 1.0 } else { 0.0 };
                worst = worst.max((acc / n - target).norm());
            }
        }
        worst
    }

    /// Max deviation of `Σ_τ χ_τ(C_i) χ_τ(C_j)*` from `δ_ij |G|/|C_i|`, relative to `|G|`.
    pub fn column_orthogonality_residual(&self) -> f64 {
        let n = self.group.order() as f64;
        let classes = self.group.classes();
        let mut worst = 0.0f64;
        for i in 0..classes.len() {
            for j in 0..classes.len() {
                let acc: Complex64 = (0..self.num_irreps())
                    .map(|t| self.chars[t][i] * self.chars[t][j].conj())
                    .sum();
                let target = if i == j { n / classes[i].len() as f64 } else { 0.0 };
                worst = worst.max((acc - target).norm() / n);
            }
        }
        worst
    }

    pub fn plancherel(&self) -> PlancherelDistribution {
        let n = self.group.order() as f64;
        PlancherelDistribution {
            probs: self.degrees.iter().map(|&d| (d * d) as f64 / n).collect(),
        }
    }

    /// Multiplicities of each irreducible in `⊗_i σ_i` under the diagonal action.
    pub fn tensor_decompose(&self, taus: &[usize]) -> Result<Vec<usize>> {
        if taus.is_empty() {
            return Err(Error::Domain("tensor_decompose needs at least one factor".into()));
        }
        let classes = self.group.classes();
        let n = self.group.order() as f64;
        let mut mults = Vec::with_capacity(self.num_irreps());
        for tau in 0..self.num_irreps() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, class) in classes.iter().enumerate() {
                let prod: Complex64 = taus.iter().map(|&s| self.chars[s][m]).product();
                acc += prod * self.chars[tau][m].conj() * class.len() as f64;
            }
            acc /= n;
            if acc.im.abs() > 1e-6 {
                return Err(Error::Numerical(format!("multiplicity {acc} is not real")));
            }
            let a = snap_integer(acc.re, 1e-6, "tensor multiplicity")?;
            if a < 0 {
                return Err(Error::Numerical(format!("negative multiplicity {a}")));
            }
            mults.push(a as usize);
        }
        let dim: usize = taus.iter().map(|&s| self.degrees[s]).product();
        let total: usize = mults.iter().zip(&self.degrees).map(|(a, d)| a * d).sum();
        if dim != total {
            return Err(Error::Numerical(format!(
                "decomposition has dimension {total}, expected {dim}"
            )));
        }
        Ok(mults)
    }

    /// Index of the row matching the given class function to within `tol`.
    pub fn find_row(&self, values: &[Complex64], tol: f64) -> Option<usize> {
        (0..self.num_irreps()).find(|&t| {
            self.chars[t]
                .iter()
                .zip(values)
                .all(|(a, b)| (a - b).norm() < tol)
        })
    }

    /// Irreducibles with a conventional name for this family: `sign` (parity
    /// for permutation groups, sign-of-flip for dihedral groups) and
    /// `standard` (fixed points minus one, when irreducible).
    pub fn named_irreps(&self) -> Vec<(&'static str, usize)> {
        let g = self.group;
        let mut named = Vec::new();
        let per_class = |f: &dyn Fn(usize) -> f64| -> Vec<Complex64> {
            g.classes().iter().map(|c| Complex64::new(f(c[0]), 0.0)).collect()
        };
        let mut push = |name: &'static str, values: Vec<Complex64>| {
            if let Some(t) = self.find_row(&values, 1e-8) {
                if t != 0 || name == "trivial" {
                    named.push((name, t));
                }
            }
        };
        push("trivial", per_class(&|_| 1.0));
        if let Family::Dihedral(n) = g.family() {
            let n = *n;
            push("sign", per_class(&|x| if x < n { 1.0 } else { -1.0 }));
        }
        if g.degree().is_some() {
            push(
                "sign",
                per_class(&|x| if is_odd(g.permutation(x).unwrap()) { -1.0 } else { 1.0 }),
            );
            push(
                "standard",
                per_class(&|x| {
                    let p = g.permutation(x).unwrap();
                    (0..p.len()).filter(|&i| p[i] == i).count() as f64 - 1.0
                }),
            );
        }
        named
    }

    /// Human-readable label: a conventional name when one applies, else `chi<i>`.
    pub fn label(&self, tau: usize) -> String {
        self.named_irreps()
            .into_iter()
            .find(|&(_, t)| t == tau)
            .map(|(name, _)| name.to_string())
            .unwrap_or_else(|| format!("chi{tau}"))
    }

    /// Resolves `chi<i>`, a bare index, or a conventional name.
    pub fn lookup(&self, label: &str) -> Option<usize> {
        let label = label.trim();
        let index = label.strip_prefix("chi").unwrap_or(label);
        if let Ok(i) = index.parse::<usize>() {
            return (i < self.num_irreps()).then_some(i);
        }
        self.named_irreps()
            .into_iter()
            .find(|&(name, _)| name == label)
            .map(|(_, t)| t)
    }
}

impl PlancherelDistribution {
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

fn is_odd(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    let mut transpositions = 0;
    for s in 0..p.len() {
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = p[x];
            len += 1;
        }
        if len > 0 {
            transpositions += len - 1;
        }
    }
    transpositions % 2 == 1
}

fn clean(z: Complex64) -> Complex64 {
    let f = |x: f64| if (x - x.round()).abs() < 1e-12 { x.round() + 0.0 } else { x };
    Complex64::new(f(z.re), f(z.im))
}

fn compare_rows(da: usize, a: &[Complex64], db: usize, b: &[Complex64]) -> Ordering {
    let key = |x: f64| (x * 1e6).round() as i64;
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().zip(b) {
            let c = key(y.re).cmp(&key(x.re)).then(key(y.im).cmp(&key(x.im)));
            if c != Ordering::Equal {
                return c;
            }
        }
        Ordering::Equal
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, GroupSpec};

    fn table_for(spec: GroupSpec) -> (GroupTable, Vec<usize>) {
        let g = build_group(&spec).unwrap();
        let degrees = CharacterTable::new(&g).unwrap().degrees().to_vec();
        (g, degrees)
    }

    #[test]
    fn z2_characters() {
        let g = build_group(&GroupSpec::Cyclic(2)).unwrap();
        let ct = CharacterTable::new(&g).unwrap();
        assert_eq!(ct.num_irreps(), 2);
        let re = |t: usize| ct.row(t).iter().map(|z| z.re).collect::<Vec<_>>();
        assert_eq!(re(0), vec![1.0, 1.0]);
        assert!((re(1)[1] + 1.0).abs() < 1e-12);
        assert_eq!(ct.plancherel().probs, vec![0.5, 0.5]);
    }

    #[test]
    fn known_degrees() {
        assert_eq!(table_for(GroupSpec::Symmetric(3)).1, vec![1, 1, 2]);
        assert_eq!(table_for(GroupSpec::Dihedral(4)).1, vec![1, 1, 1, 1, 2]);
        assert_eq!(table_for(GroupSpec::Symmetric(4)).1, vec![1, 1, 2, 3, 3]);
        assert_eq!(table_for(GroupSpec::Cyclic(1)).1, vec![1]);
    }

    #[test]
    fn trivial_group_plancherel() {
        let g = build_group(&GroupSpec::Cyclic(1)).unwrap();
        assert_eq!(CharacterTable::new(&g).unwrap().plancherel().probs, vec![1.0]);
    }

    #[test]
    fn s3_plancherel() {
        let g = build_group(&GroupSpec::Symmetric(3)).unwrap();
        let p = CharacterTable::new(&g).unwrap().plancherel();
        for (x, y) in p.probs.iter().zip([1.0 / 6.0, 1.0 / 6.0, 4.0 / 6.0]) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn s3_standard_squared() {
        let g = build_group(&GroupSpec::Symmetric(3)).unwrap();
        let ct = CharacterTable::new(&g).unwrap();
        let std = ct.lookup("standard").unwrap();
        assert_eq!(ct.tensor_decompose(&[std, std]).unwrap(), vec![1, 1, 1]);
        assert_eq!(ct.tensor_decompose(&[std]).unwrap(), vec![0, 0, 1]);
    }

    #[test]
    fn names_resolve() {
        let g = build_group(&GroupSpec::Dihedral(4)).unwrap();
        let ct = CharacterTable::new(&g).unwrap();
        let sign = ct.lookup("sign").unwrap();
        for x in 0..8 {
            let expected = if x < 4 { 1.0 } else { -1.0 };
            assert!((ct.at(sign, x).re - expected).abs() < 1e-12);
        }
        assert_eq!(ct.label(0), "trivial");
        assert_eq!(ct.lookup("chi4"), Some(4));
        assert_eq!(ct.lookup("chi5"), None);
    }

    #[test]
    fn complex_characters_of_z3() {
        let g = build_group(&GroupSpec::Cyclic(3)).unwrap();
        let ct = CharacterTable::new(&g).unwrap();
        assert!(ct.row_orthogonality_residual() < 1e-12);
        let w = ct.value(1, 1);
        assert!((w.norm() - 1.0).abs() < 1e-12);
        assert!(w.im.abs() > 0.5);
    }
}
