//! State-vector simulation of representation kickback: a `G`-valued control
//! register drives `g ↦ 𝛔_I(g⁻¹)` on a target `V = ⊗_i σ_i`, and measuring the
//! control's `η`-isotypic component reveals the `η`-component of the target
//! under the diagonal action.
//!
//! Joint basis states are indexed `g · dim V + φ`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::characters::CharacterTable;
use crate::error::{Error, Result};
use crate::group::GroupTable;
use crate::linalg::{self, CMatrix, CVector, ZERO};
use crate::representations::{diagonal_tensor, irrep_matrices, isotypic_projector, IrrepMatrices};

#[derive(Clone, Debug)]
pub struct KickbackCircuit<'g> {
    group: &'g GroupTable,
    sigmas: Vec<usize>,
    target: Vec<CMatrix>,
    dim_v: usize,
}

impl<'g> KickbackCircuit<'g> {
    pub fn new(ct: &CharacterTable<'g>, sigmas: &[usize]) -> Result<Self> {
        if sigmas.is_empty() {
            return Err(Error::Domain("target needs at least one irreducible".into()));
        }
        let factors: Vec<IrrepMatrices<'g>> = sigmas
            .iter()
            .map(|&s| irrep_matrices(ct, s))
            .collect::<Result<_>>()?;
        let refs: Vec<&IrrepMatrices<'g>> = factors.iter().collect();
        let target = diagonal_tensor(&refs);
        let dim_v = target[0].nrows();
        Ok(KickbackCircuit {
            group: ct.group(),
            sigmas: sigmas.to_vec(),
            target,
            dim_v,
        })
    }

    pub fn group(&self) -> &'g GroupTable {
        self.group
    }

    pub fn sigmas(&self) -> &[usize] {
        &self.sigmas
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn dim(&self) -> usize {
        self.group.order() * self.dim_v
    }

    /// `𝛔_I(g) = ⊗_i σ_i(g)`.
    pub fn target_matrix(&self, g: usize) -> &CMatrix {
        &self.target[g]
    }

    /// `|G⟩ ⊗ φ`.
    pub fn prepare(&self, input: &CVector) -> Result<CVector> {
        if input.len() != self.dim_v {
            return Err(Error::Domain(format!(
                "input has dimension {}, target space has {}",
                input.len(),
                self.dim_v
            )));
        }
        let n = self.group.order();
        let amp = 1.0 / (n as f64).sqrt();
        Ok(CVector::from_fn(self.dim(), |r, _| input[r % self.dim_v] * amp))
    }

    /// `M: |g⟩⊗|φ⟩ ↦ |g⟩⊗𝛔_I(g⁻¹)|φ⟩`.
    pub fn controlled_g_action(&self, state: &CVector) -> Result<CVector> {
        self.check_dim(state)?;
        let dv = self.dim_v;
        let mut out = CVector::zeros(state.len());
        for g in 0..self.group.order() {
            let block = state.rows(g * dv, dv);
            let image = &self.target[self.group.inverse(g)] * block;
            out.rows_mut(g * dv, dv).copy_from(&image);
        }
        Ok(out)
    }

    /// `(Π_η^L ⊗ 1) ψ` with `Π_η^L = (d_η/|G|) Σ_g χ_η(g)* L(g)` and `L(g)|x⟩ = |gx⟩`.
    pub fn apply_control_projector(&self, ct: &CharacterTable<'_>, eta: usize, state: &CVector) -> Result<CVector> {
        self.check_dim(state)?;
        let g = self.group;
        let n = g.order();
        let dv = self.dim_v;
        let scale = ct.degree(eta) as f64 / n as f64;
        let mut out = CVector::zeros(state.len());
        for h in 0..n {
            let c = ct.at(eta, h).conj() * scale;
            if c == ZERO {
                continue;
            }
            for x in 0..n {
                let y = g.mul(h, x);
                for p in 0..dv {
                    out[y * dv + p] += c * state[x * dv + p];
                }
            }
        }
        Ok(out)
    }

    /// Born probability of observing `η` on the control after `M`.
    pub fn probability(&self, ct: &CharacterTable<'_>, eta: usize, input: &CVector) -> Result<f64> {
        let psi = self.controlled_g_action(&self.prepare(input)?)?;
        Ok(self.apply_control_projector(ct, eta, &psi)?.norm_squared())
    }

    /// Prepares `|G⟩⊗input`, applies `M`, and samples `{Π_η, 1 − Π_η}` on the control.
    pub fn kickback_measure(
        &self,
        ct: &CharacterTable<'_>,
        eta: usize,
        input: &CVector,
        seed: u64,
    ) -> Result<KickbackOutcome> {
        let norm = input.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("input must be normalized, has norm {norm}")));
        }
        let psi = self.controlled_g_action(&self.prepare(input)?)?;
        let projected = self.apply_control_projector(ct, eta, &psi)?;
        let p = projected.norm_squared().clamp(0.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let observed = rng.random::<f64>() < p;
        let post = if observed {
            projected.unscale(p.sqrt())
        } else {
            (&psi - &projected).unscale((1.0 - p).sqrt())
        };
        Ok(KickbackOutcome {
            observed,
            probability: p,
            post_state: post,
        })
    }

    /// `‖Π_η^diag φ‖²` from the character projector of the diagonal action on `V`.
    pub fn diagonal_weight(&self, ct: &CharacterTable<'_>, eta: usize, input: &CVector) -> Result<f64> {
        let p = isotypic_projector(ct, eta, &self.target)?;
        Ok((p * input).norm_squared())
    }

    /// `max_h ‖M D_h − L_h M‖_F` with `D_h: |g,φ⟩ ↦ |hg⟩⊗𝛔_I(h)φ` and `L_h: |g,φ⟩ ↦ |hg,φ⟩`.
    pub fn verify_intertwining(&self) -> f64 {
        let g = self.group;
        let n = g.order();
        let dv = self.dim_v;
        let big = self.dim();
        let mut m = CMatrix::zeros(big, big);
        for x in 0..n {
            m.view_mut((x * dv, x * dv), (dv, dv)).copy_from(&self.target[g.inverse(x)]);
        }
        let mut worst = 0.0f64;
        for h in 0..n {
            let mut d = CMatrix::zeros(big, big);
            let mut l = CMatrix::zeros(big, big);
            for x in 0..n {
                let y = g.mul(h, x);
                d.view_mut((y * dv, x * dv), (dv, dv)).copy_from(&self.target[h]);
                for p in 0..dv {
                    l[(y * dv + p, x * dv + p)] = Complex64::new(1.0, 0.0);
                }
            }
            let resid = linalg::frobenius(&(&m * &d - &l * &m));
            worst = worst.max(resid);
        }
        worst
    }

    fn check_dim(&self, state: &CVector) -> Result<()> {
        if state.len() != self.dim() {
            return Err(Error::Domain(format!(
                "state has dimension {}, circuit has {}",
                state.len(),
                self.dim()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct KickbackOutcome {
    pub observed: bool,
    pub probability: f64,
    pub post_state: CVector,
}

/// Fourier transform on `C[G]` with rows `(σ, i, j)` and entries `√(d_σ/|G|) σ(g)_{ij}`.
#[derive(Clone, Debug)]
pub struct FourierTransform {
    pub matrix: CMatrix,
    /// Irreducible index of each row.
    pub row_irrep: Vec<usize>,
}

pub fn fourier_transform(ct: &CharacterTable<'_>) -> Result<FourierTransform> {
    let n = ct.group().order();
    let mut matrix = CMatrix::zeros(n, n);
    let mut row_irrep = Vec::with_capacity(n);
    let mut row = 0;
    for sigma in 0..ct.num_irreps() {
        let mats = irrep_matrices(ct, sigma)?;
        let d = ct.degree(sigma);
        let scale = (d as f64 / n as f64).sqrt();
        for i in 0..d {
            for j in 0..d {
                for g in 0..n {
                    matrix[(row, g)] = mats.get(g)[(i, j)] * scale;
                }
                row_irrep.push(sigma);
                row += 1;
            }
        }
    }
    Ok(FourierTransform { matrix, row_irrep })
}

impl FourierTransform {
    pub fn unitarity_residual(&self) -> f64 {
        linalg::unitarity_residual(&self.matrix)
    }

    /// Weight of `ψ` on the `η` rows after transforming the control register.
    pub fn block_weight(&self, circuit: &KickbackCircuit<'_>, eta: usize, psi: &CVector) -> f64 {
        let n = circuit.group().order();
        let dv = circuit.dim_v();
        let mut total = 0.0;
        for (r, &s) in self.row_irrep.iter().enumerate() {
            if s != eta {
                continue;
            }
            for p in 0..dv {
                let mut amp = ZERO;
                for g in 0..n {
                    amp += self.matrix[(r, g)] * psi[g * dv + p];
                }
                total += amp.norm_sqr();
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, GroupSpec};

    fn random_input(dim: usize, seed: u64) -> CVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        linalg::random_state(dim, &mut rng)
    }

    #[test]
    fn trivial_target_is_identity() {
        let g = build_group(&GroupSpec::Dihedral(4)).unwrap();
        let ct = CharacterTable::new(&g).unwrap();
        let c = KickbackCircuit::new(&ct, &[0, 0]).unwrap();
        let psi = random_input(c.dim(), 1);
        assert!((c.controlled_g_action(&psi).unwrap() - &psi).norm() < 1e-15);
    }

    #[test]
    fn identity_control_leaves_target() {
        let g = build_group(&GroupSpec::Symmetric(3)).unwrap();
        let ct = CharacterTable::new(&g).unwrap();
        let c = KickbackCircuit::new(&ct, &[2, 2]).unwrap();
        let phi = random_input(c.dim_v(), 2);
        let mut psi = CVector::zeros(c.dim());
        psi.rows_mut(0, c.dim_v()).copy_from(&phi);
        let out = c.controlled_g_action(&psi).unwrap();
        assert!((out - psi).norm() < 1e-14);
    }

    #[test]
    fn z2_sign_is_phase_kickback() {
        let g = build_group(&GroupSpec::Cyclic(2)).unwrap();
        let ct = CharacterTable::new(&g).unwrap();
        let c = KickbackCircuit::new(&ct, &[1]).unwrap();
        let psi = CVector::from_vec(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]);
        let out = c.controlled_g_action(&psi).unwrap();
        assert_eq!(out[0], psi[0]);
        assert_eq!(out[1], -psi[1]);
        assert!(c.verify_intertwining() < 1e-15);
    }

    #[test]
    fn action_preserves_norm() {
        let g = build_group(&GroupSpec::Dihedral(4)).unwrap();
        let ct = CharacterTable::new(&g).unwrap();
        let c = KickbackCircuit::new(&ct, &[4, 4]).unwrap();
        for seed in 0..20 {
            let psi = random_input(c.dim(), seed);
            let out = c.controlled_g_action(&psi).unwrap();
            assert!((out.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn probability_matches_diagonal_projector() {
        let g = build_group(&GroupSpec::Dihedral(4)).unwrap();
        let ct = CharacterTable::new(&g).unwrap();
        let c = KickbackCircuit::new(&ct, &[4, 4]).unwrap();
        for seed in 0..25 {
            let phi = random_input(c.dim_v(), seed);
            let mut total = 0.0;
            for eta in 0..ct.num_irreps() {
                let p = c.probability(&ct, eta, &phi).unwrap();
                let q = c.diagonal_weight(&ct, eta, &phi).unwrap();
                assert!((p - q).abs() < 1e-10, "eta {eta}: {p} vs {q}");
                total += p;
            }
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn isotypic_inputs_are_deterministic() {
        let g = build_group(&GroupSpec::Symmetric(3)).unwrap();
        let ct = CharacterTable::new(&g).unwrap();
        let std = ct.lookup("standard").unwrap();
        let c = KickbackCircuit::new(&ct, &[std, std]).unwrap();
        // std ⊗ std = trivial ⊕ sign ⊕ standard; project a random vector onto the sign part
        let sign = ct.lookup("sign").unwrap();
        let p = isotypic_projector(&ct, sign, &(0..6).map(|x| c.target_matrix(x).clone()).collect::<Vec<_>>()).unwrap();
        let phi = p * random_input(4, 5);
        let phi = phi.unscale(phi.norm());
        assert!((c.probability(&ct, sign, &phi).unwrap() - 1.0).abs() < 1e-12);
        assert!(c.probability(&ct, std, &phi).unwrap() < 1e-12);
        let out = c.kickback_measure(&ct, sign, &phi, 3).unwrap();
        assert!(out.observed);
        assert!((out.post_state.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn intertwining_holds() {
        for spec in [GroupSpec::Symmetric(3), GroupSpec::Dihedral(4)] {
            let g = build_group(&spec).unwrap();
            let ct = CharacterTable::new(&g).unwrap();
            let top = ct.num_irreps() - 1;
            let c = KickbackCircuit::new(&ct, &[top, top]).unwrap();
            assert_eq!(c.dim(), g.order() * 4);
            assert!(c.verify_intertwining() < 1e-10);
        }
    }

    #[test]
    fn fourier_route_agrees_with_character_route() {
        let g = build_group(&GroupSpec::Symmetric(3)).unwrap();
        let ct = CharacterTable::new(&g).unwrap();
        let f = fourier_transform(&ct).unwrap();
        assert!(f.unitarity_residual() < 1e-12);
        let c = KickbackCircuit::new(&ct, &[2, 1]).unwrap();
        let phi = random_input(c.dim_v(), 8);
        let psi = c.controlled_g_action(&c.prepare(&phi).unwrap()).unwrap();
        for eta in 0..ct.num_irreps() {
            let via_f = f.block_weight(&c, eta, &psi);
            let via_chi = c.apply_control_projector(&ct, eta, &psi).unwrap().norm_squared();
            assert!((via_f - via_chi).abs() < 1e-12);
        }
    }

    #[test]
    fn unsupported_family_is_reported() {
        let g = build_group(&GroupSpec::PermGens(vec![vec![1, 0, 2], vec![1, 2, 0]])).unwrap();
        let ct = CharacterTable::new(&g).unwrap();
        let big = ct.num_irreps() - 1;
        assert_eq!(ct.degree(big), 2);
        assert!(matches!(KickbackCircuit::new(&ct, &[big]), Err(Error::Unsupported(_))));
        assert!(fourier_transform(&ct).is_err());
    }
}
