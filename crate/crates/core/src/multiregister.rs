//! The `k`-register space `C[G]^{⊗k}`: coset states, per-subset isotypic
//! projectors, their span, and the trivial-versus-conjugate measurement.
//!
//! Basis states are tuples `(x_0, …, x_{k-1})` with register 0 the most
//! significant digit. Register subsets are bitmasks with bit `i` for register
//! `i`, shown 1-based.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::characters::CharacterTable;
use crate::error::{Error, Result};
use crate::group::{GroupTable, Subgroup};
use crate::linalg::{self, CMatrix, CVector, RankedSpectrum, RANK_THRESHOLD, ZERO};
use crate::representations::{isotypic_projector, Representation, RegularRep};

pub const DEFAULT_GUARD: usize = 4096;

/// Born probabilities below this are reported as zero.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct MultiRegisterSpace<'g> {
    group: &'g GroupTable,
    k: usize,
    dim: usize,
    guard: usize,
    strides: Vec<usize>,
    // right_inv[g][x] = x g⁻¹
    right_inv: Vec<Vec<usize>>,
}

impl<'g> MultiRegisterSpace<'g> {
    pub fn new(group: &'g GroupTable, k: usize) -> Result<Self> {
        Self::with_guard(group, k, DEFAULT_GUARD)
    }

    pub fn with_guard(group: &'g GroupTable, k: usize, guard: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("register count k must be at least 1".into()));
        }
        if k > 31 {
            return Err(Error::Domain(format!("k = {k} exceeds the 31-register limit")));
        }
        let n = group.order();
        let dim = u32::try_from(k)
            .ok()
            .and_then(|k| n.checked_pow(k))
            .ok_or_else(|| Error::Domain(format!("|G|^k overflows for |G| = {n}, k = {k}")))?;
        let strides = (0..k).map(|i| n.pow((k - 1 - i) as u32)).collect();
        let right_inv = (0..n)
            .map(|g| {
                let gi = group.inverse(g);
                (0..n).map(|x| group.mul(x, gi)).collect()
            })
            .collect();
        Ok(MultiRegisterSpace {
            group,
            k,
            dim,
            guard,
            strides,
            right_inv,
        })
    }

    pub fn group(&self) -> &'g GroupTable {
        self.group
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn guard(&self) -> usize {
        self.guard
    }

    pub fn digits(&self, x: usize) -> Vec<usize> {
        let n = self.group.order();
        self.strides.iter().map(|s| (x / s) % n).collect()
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    /// Basis image of `x` under `R_I(g)`: `x_i ↦ x_i g⁻¹` for `i ∈ I`.
    #[inline]
    pub fn act(&self, x: usize, subset: RegisterSubset, g: usize) -> usize {
        let n = self.group.order();
        let row = &self.right_inv[g];
        let mut y = x;
        for (i, &s) in self.strides.iter().enumerate() {
            if subset.contains(i) {
                let d = (x / s) % n;
                y = y - d * s + row[d] * s;
            }
        }
        y
    }

    pub fn require_dense(&self, hint: &'static str) -> Result<()> {
        if self.dim > self.guard {
            return Err(Error::DimensionGuard {
                dim: self.dim,
                guard: self.guard,
                hint,
            });
        }
        Ok(())
    }

    /// All `2^k − 1` nonempty subsets in increasing bitmask order.
    pub fn subsets(&self) -> Vec<RegisterSubset> {
        (1u32..(1u32 << self.k)).map(RegisterSubset).collect()
    }

    pub fn subset(&self, registers: &[usize]) -> Result<RegisterSubset> {
        RegisterSubset::from_registers(registers, self.k)
    }
}

/// Nonempty set of registers, bit `i` for register `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegisterSubset(u32);

impl RegisterSubset {
    pub fn from_mask(mask: u32, k: usize) -> Result<Self> {
        if mask == 0 {
            return Err(Error::Domain("register subset must be nonempty".into()));
        }
        if k < 32 && mask >> k != 0 {
            return Err(Error::Domain(format!("mask {mask:#b} names registers beyond k = {k}")));
        }
        Ok(RegisterSubset(mask))
    }

    /// From 0-based register indices.
    pub fn from_registers(registers: &[usize], k: usize) -> Result<Self> {
        let mut mask = 0u32;
        for &r in registers {
            if r >= k {
                return Err(Error::Domain(format!("register {} out of range 1..={k}", r + 1)));
            }
            mask |= 1 << r;
        }
        Self::from_mask(mask, k)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// 0-based register indices.
    pub fn registers(self) -> Vec<usize> {
        (0..32).filter(|&i| self.contains(i)).collect()
    }
}

impl fmt::Display for RegisterSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.registers().iter().map(|r| (r + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateMode {
    Dense,
    Ensemble,
}

/// Sparse vector as sorted `(index, amplitude)` pairs.
pub type SparseVector = Vec<(usize, Complex64)>;

/// The mixed state `ρ^{⊗k}` with `ρ` uniform over left-coset states `|cH⟩`.
#[derive(Clone, Debug)]
pub struct CosetState<'s, 'g> {
    space: &'s MultiRegisterSpace<'g>,
    subgroup: Subgroup<'g>,
    cosets: Vec<Vec<usize>>,
    dense: Option<CMatrix>,
}

pub fn build_coset_state<'s, 'g>(
    space: &'s MultiRegisterSpace<'g>,
    h: &Subgroup<'g>,
    mode: StateMode,
) -> Result<CosetState<'s, 'g>> {
    let dense = match mode {
        StateMode::Dense => {
            space.require_dense("use ensemble mode for coset states")?;
            Some(dense_coset_state(space, h))
        }
        StateMode::Ensemble => None,
    };
    Ok(CosetState {
        space,
        subgroup: h.clone(),
        cosets: h.left_cosets(),
        dense,
    })
}

fn dense_coset_state(space: &MultiRegisterSpace<'_>, h: &Subgroup<'_>) -> CMatrix {
    let g = space.group();
    let n = g.order();
    let single = CMatrix::from_fn(n, n, |x, y| {
        if h.contains(g.mul(g.inverse(x), y)) {
            Complex64::new(1.0 / n as f64, 0.0)
        } else {
            ZERO
        }
    });
    let factors: Vec<&CMatrix> = vec![&single; space.k()];
    linalg::kron_all(&factors)
}

#[derive(Clone, Copy, Debug)]
pub struct StateResiduals {
    pub hermitian: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

impl<'s, 'g> CosetState<'s, 'g> {
    pub fn space(&self) -> &'s MultiRegisterSpace<'g> {
        self.space
    }

    pub fn subgroup(&self) -> &Subgroup<'g> {
        &self.subgroup
    }

    pub fn dense(&self) -> Option<&CMatrix> {
        self.dense.as_ref()
    }

    /// Number of distinct pure states `|c_0 H⟩ ⊗ … ⊗ |c_{k-1} H⟩`, all equally weighted.
    pub fn num_vectors(&self) -> usize {
        self.cosets.len().pow(self.space.k() as u32)
    }

    /// The `t`-th pure coset state, coset indices read as mixed-radix digits.
    pub fn vector(&self, t: usize) -> SparseVector {
        let k = self.space.k();
        let q = self.cosets.len();
        let choice: Vec<&[usize]> = (0..k)
            .map(|i| self.cosets[(t / q.pow((k - 1 - i) as u32)) % q].as_slice())
            .collect();
        tensor_support(self.space, &choice)
    }

    /// Hermiticity, trace and positivity of the dense form.
    pub fn certify(&self) -> Option<StateResiduals> {
        let rho = self.dense.as_ref()?;
        let eig = nalgebra::SymmetricEigen::new(rho.clone());
        Some(StateResiduals {
            hermitian: linalg::hermitian_residual(rho),
            trace: (linalg::trace(rho) - 1.0).norm(),
            min_eigenvalue: eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min),
        })
    }
}

// Uniform superposition over the product of the given per-register sets.
fn tensor_support(space: &MultiRegisterSpace<'_>, sets: &[&[usize]]) -> SparseVector {
    let size: usize = sets.iter().map(|s| s.len()).product();
    let amp = Complex64::new(1.0 / (size as f64).sqrt(), 0.0);
    let mut out = Vec::with_capacity(size);
    let mut idx = vec![0usize; sets.len()];
    loop {
        let digits: Vec<usize> = idx.iter().zip(sets).map(|(&j, s)| s[j]).collect();
        out.push((space.index(&digits), amp));
        let mut r = sets.len();
        loop {
            if r == 0 {
                out.sort_unstable_by_key(|e| e.0);
                return out;
            }
            r -= 1;
            idx[r] += 1;
            if idx[r] < sets[r].len() {
                break;
            }
            idx[r] = 0;
        }
    }
}

/// `Π_η^I = (d_η/|G|) Σ_g χ_η(g)* R_I(g)`.
#[derive(Clone, Debug)]
pub struct SubsetProjector<'s, 'g> {
    space: &'s MultiRegisterSpace<'g>,
    subset: RegisterSubset,
    eta: usize,
    degree: usize,
    coeffs: Vec<Complex64>,
}

pub fn subset_projector<'s, 'g>(
    space: &'s MultiRegisterSpace<'g>,
    ct: &CharacterTable<'_>,
    subset: RegisterSubset,
    eta: usize,
) -> Result<SubsetProjector<'s, 'g>> {
    if subset.is_empty() {
        return Err(Error::Domain("register subset must be nonempty".into()));
    }
    if subset.registers().iter().any(|&r| r >= space.k()) {
        return Err(Error::Domain(format!("subset {subset} exceeds k = {}", space.k())));
    }
    if eta >= ct.num_irreps() {
        return Err(Error::Domain(format!("no irreducible with index {eta}")));
    }
    let n = space.group().order();
    let scale = ct.degree(eta) as f64 / n as f64;
    let coeffs = (0..n).map(|g| ct.at(eta, g).conj() * scale).collect();
    Ok(SubsetProjector {
        space,
        subset,
        eta,
        degree: ct.degree(eta),
        coeffs,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct ProjectorResiduals {
    pub hermitian: f64,
    pub idempotence: f64,
    pub trace: f64,
    pub expected_trace: usize,
}

impl<'s, 'g> SubsetProjector<'s, 'g> {
    pub fn subset(&self) -> RegisterSubset {
        self.subset
    }

    pub fn eta(&self) -> usize {
        self.eta
    }

    /// `(d_η²/|G|)·|G|^k`.
    pub fn expected_trace(&self) -> usize {
        self.degree * self.degree * self.space.dim() / self.space.group().order()
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        assert_eq!(v.len(), self.space.dim());
        let mut out = CVector::zeros(v.len());
        for (g, &c) in self.coeffs.iter().enumerate() {
            if c == ZERO {
                continue;
            }
            for (x, &a) in v.iter().enumerate() {
                if a != ZERO {
                    out[self.space.act(x, self.subset, g)] += c * a;
                }
            }
        }
        out
    }

    pub fn apply_sparse(&self, v: &[(usize, Complex64)]) -> SparseVector {
        let mut acc: BTreeMap<usize, Complex64> = BTreeMap::new();
        for (g, &c) in self.coeffs.iter().enumerate() {
            if c == ZERO {
                continue;
            }
            for &(x, a) in v {
                *acc.entry(self.space.act(x, self.subset, g)).or_insert(ZERO) += c * a;
            }
        }
        acc.into_iter().collect()
    }

    pub fn dense(&self) -> Result<CMatrix> {
        self.space.require_dense("use the matrix-free projector")?;
        let d = self.space.dim();
        let mut m = CMatrix::zeros(d, d);
        for (g, &c) in self.coeffs.iter().enumerate() {
            if c == ZERO {
                continue;
            }
            for x in 0..d {
                m[(self.space.act(x, self.subset, g), x)] += c;
            }
        }
        Ok(m)
    }

    pub fn certify(&self) -> Result<ProjectorResiduals> {
        let p = self.dense()?;
        Ok(ProjectorResiduals {
            hermitian: linalg::hermitian_residual(&p),
            idempotence: linalg::idempotence_residual(&p),
            trace: (linalg::trace(&p) - self.expected_trace() as f64).norm(),
            expected_trace: self.expected_trace(),
        })
    }
}

/// `‖Π ρ‖_F` for a dense state, otherwise `max_v ‖Π v‖` over the pure coset states.
pub fn verify_annihilation(p: &SubsetProjector<'_, '_>, state: &CosetState<'_, '_>) -> f64 {
    if let Some(rho) = state.dense() {
        if let Ok(pd) = p.dense() {
            return linalg::frobenius(&(pd * rho));
        }
    }
    (0..state.num_vectors())
        .into_par_iter()
        .map(|t| {
            let image = p.apply_sparse(&state.vector(t));
            image.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>().sqrt()
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceMode {
    Exact,
    /// Stochastic estimate from `samples` random unit vectors.
    Approximate { samples: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug)]
pub struct TraceEstimate {
    pub value: Complex64,
    /// `Some` only for stochastic estimates.
    pub std_error: Option<f64>,
}

impl TraceEstimate {
    pub fn is_approximate(&self) -> bool {
        self.std_error.is_some()
    }
}

/// `tr(Π_η^I Π_η^J)`.
pub fn pairwise_trace(
    space: &MultiRegisterSpace<'_>,
    ct: &CharacterTable<'_>,
    i: RegisterSubset,
    j: RegisterSubset,
    eta: usize,
    mode: TraceMode,
) -> Result<TraceEstimate> {
    let pi = subset_projector(space, ct, i, eta)?;
    let pj = subset_projector(space, ct, j, eta)?;
    match mode {
        TraceMode::Exact => {
            space.require_dense("request an approximate trace")?;
            Ok(TraceEstimate {
                value: linalg::trace_of_product(&pi.dense()?, &pj.dense()?),
                std_error: None,
            })
        }
        TraceMode::Approximate { samples, seed } => {
            if samples < 2 {
                return Err(Error::Domain("stochastic trace needs at least 2 samples".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = space.dim() as f64;
            let draws: Vec<Complex64> = (0..samples)
                .map(|_| {
                    let v = linalg::random_state(space.dim(), &mut rng);
                    v.dotc(&pi.apply(&pj.apply(&v))) * d
                })
                .collect();
            let mean = draws.iter().sum::<Complex64>() / samples as f64;
            let var = draws.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / (samples - 1) as f64;
            Ok(TraceEstimate {
                value: mean,
                std_error: Some((var / samples as f64).sqrt()),
            })
        }
    }
}

/// `M = Σ_I Π_η^I` and its spectral rank decision.
#[derive(Clone, Debug)]
pub struct SpanAnalysis {
    pub eta: usize,
    pub k: usize,
    pub dim_total: usize,
    pub subset_count: usize,
    /// `dim W_η^I = d_η² |G|^{k-1}`.
    pub subset_dim: usize,
    pub m: CMatrix,
    pub spectrum: RankedSpectrum,
}

impl SpanAnalysis {
    pub fn dim(&self) -> usize {
        self.spectrum.rank
    }

    pub fn fraction(&self) -> f64 {
        self.dim() as f64 / self.dim_total as f64
    }

    /// Orthogonal projector `P_W` onto `W_η`.
    pub fn range_projector(&self) -> CMatrix {
        self.spectrum.range_projector()
    }

    /// Largest eigenvalue of `M`, the scale for every rank decision against it.
    pub fn scale(&self) -> f64 {
        self.spectrum.eigenvalues.iter().fold(0.0f64, |a, l| a.max(l.abs()))
    }

    pub fn frobenius_sq(&self) -> f64 {
        linalg::frobenius(&self.m).powi(2)
    }

    /// `m d + m(m−1) d²/D`, the value forced by pairwise independence.
    pub fn expected_frobenius_sq(&self) -> f64 {
        let m = self.subset_count as f64;
        let d = self.subset_dim as f64;
        m * d + m * (m - 1.0) * d * d / self.dim_total as f64
    }

    pub fn bound(&self) -> Result<f64> {
        span_bound(self.dim_total, self.subset_count, self.subset_dim)
    }
}

pub fn analyze_span(space: &MultiRegisterSpace<'_>, ct: &CharacterTable<'_>, eta: usize) -> Result<SpanAnalysis> {
    space.require_dense("the span dimension needs dense projectors")?;
    let projectors: Vec<SubsetProjector<'_, '_>> = space
        .subsets()
        .into_iter()
        .map(|s| subset_projector(space, ct, s, eta))
        .collect::<Result<_>>()?;
    let subset_dim = projectors[0].expected_trace();
    let m = projectors
        .par_iter()
        .map(|p| p.dense())
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(CMatrix::zeros(space.dim(), space.dim()), |acc, p| acc + p);
    let spectrum = linalg::hermitian_rank(&m, RANK_THRESHOLD)?;
    Ok(SpanAnalysis {
        eta,
        k: space.k(),
        dim_total: space.dim(),
        subset_count: projectors.len(),
        subset_dim,
        m,
        spectrum,
    })
}

/// `dim W_η`.
pub fn span_dimension(space: &MultiRegisterSpace<'_>, ct: &CharacterTable<'_>, eta: usize) -> Result<usize> {
    analyze_span(space, ct, eta).map(|s| s.dim())
}

/// Lower bound `1 − 1/(1 + md/(D−d))` on the fraction of a `D`-dimensional
/// space spanned by `m` pairwise independent `d`-dimensional subspaces.
pub fn span_bound(total: usize, m: usize, d: usize) -> Result<f64> {
    if d == 0 || d >= total {
        return Err(Error::Domain(format!("need 0 < d < D, got d = {d}, D = {total}")));
    }
    if m == 0 {
        return Err(Error::Domain("need at least one subspace".into()));
    }
    let ratio = (m * d) as f64 / (total - d) as f64;
    Ok(1.0 - 1.0 / (1.0 + ratio))
}

/// Hidden subgroup for the measurement simulation.
#[derive(Clone, Debug)]
pub enum HiddenSubgroup<'g> {
    Trivial,
    /// A uniformly random conjugate of the given subgroup, drawn per trial.
    ConjugatesOf(Subgroup<'g>),
}

#[derive(Clone, Copy, Debug)]
pub struct MeasurementStats {
    pub trials: usize,
    pub reports_trivial: usize,
    /// Empirical frequency of reporting "trivial".
    pub empirical: f64,
    /// `tr(P_W ρ)` computed from the dense state.
    pub exact: f64,
    /// `sqrt(p(1−p)/trials)` at the exact probability.
    pub std_error: f64,
    /// Largest per-trial Born probability seen.
    pub max_probability: f64,
}

impl MeasurementStats {
    pub fn deviation_in_std_errors(&self) -> f64 {
        let diff = (self.empirical - self.exact).abs();
        if self.std_error == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / self.std_error
        }
    }
}

/// Samples the two-outcome measurement `{P_W, 1 − P_W}` on pure coset states.
pub fn simulate_measurement(
    space: &MultiRegisterSpace<'_>,
    span: &SpanAnalysis,
    hidden: &HiddenSubgroup<'_>,
    trials: usize,
    seed: u64,
) -> Result<MeasurementStats> {
    space.require_dense("the measurement needs the dense span projector")?;
    let pw = span.range_projector();
    let g = space.group();
    let n = g.order();
    let k = space.k();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let exact = match hidden {
        HiddenSubgroup::Trivial => linalg::trace(&pw).re / space.dim() as f64,
        HiddenSubgroup::ConjugatesOf(h) => {
            let rho = dense_coset_state(space, h);
            linalg::trace_of_product(&pw, &rho).re
        }
    };
    let exact = floor_probability(exact);

    let conjugates: Vec<Subgroup<'_>> = match hidden {
        HiddenSubgroup::Trivial => Vec::new(),
        HiddenSubgroup::ConjugatesOf(h) => (0..n).map(|c| h.conjugate(c)).collect(),
    };
    let mut cache: HashMap<(usize, Vec<usize>), f64> = HashMap::new();

    let mut reports = 0usize;
    let mut max_p = 0.0f64;
    for _ in 0..trials {
        let p = match hidden {
            HiddenSubgroup::Trivial => {
                let c = rng.random_range(0..space.dim());
                pw[(c, c)].re
            }
            HiddenSubgroup::ConjugatesOf(_) => {
                let which = rng.random_range(0..n);
                let hc = &conjugates[which];
                let reps: Vec<usize> = (0..k).map(|_| rng.random_range(0..n)).collect();
                let cosets: Vec<Vec<usize>> = reps
                    .iter()
                    .map(|&a| {
                        let mut c: Vec<usize> = hc.members().iter().map(|&x| g.mul(a, x)).collect();
                        c.sort_unstable();
                        c
                    })
                    .collect();
                let key = (which, cosets.iter().map(|c| c[0]).collect());
                *cache.entry(key).or_insert_with(|| {
                    let sets: Vec<&[usize]> = cosets.iter().map(Vec::as_slice).collect();
                    let v = tensor_support(space, &sets);
                    let mut acc = ZERO;
                    for &(x, a) in &v {
                        for &(y, b) in &v {
                            acc += a.conj() * pw[(x, y)] * b;
                        }
                    }
                    acc.re
                })
            }
        };
        let p = floor_probability(p);
        max_p = max_p.max(p);
        let u: f64 = rng.random();
        if u < p {
            reports += 1;
        }
    }

    let empirical = if trials == 0 { 0.0 } else { reports as f64 / trials as f64 };
    let std_error = if trials == 0 {
        0.0
    } else {
        (exact * (1.0 - exact) / trials as f64).sqrt()
    };
    Ok(MeasurementStats {
        trials,
        reports_trivial: reports,
        empirical,
        exact,
        std_error,
        max_probability: max_p,
    })
}

fn floor_probability(p: f64) -> f64 {
    if p < PROBABILITY_FLOOR {
        0.0
    } else {
        p.min(1.0)
    }
}

/// One row of the decomposition of `W_η` over irreducibles `𝛔 = (σ_0, …, σ_{k-1})` of `G^k`.
#[derive(Clone, Debug)]
pub struct SigmaEntry {
    pub sigma: Vec<usize>,
    /// `Planch(𝛔) = Π d_{σ_i}² / |G|^k`.
    pub plancherel: f64,
    /// `dim(W_η ∩ block_𝛔)`.
    pub block_rank: usize,
    /// `dim W_{η,𝛔}/d_𝛔 = block_rank / d_𝛔²`.
    pub normalized: f64,
}

/// Splits `W_η` along the `G^k` isotypic blocks of `C[G]^{⊗k}`.
pub fn per_sigma_decomposition(
    space: &MultiRegisterSpace<'_>,
    ct: &CharacterTable<'_>,
    span: &SpanAnalysis,
) -> Result<Vec<SigmaEntry>> {
    space.require_dense("the block decomposition needs dense matrices")?;
    let g = space.group();
    let n = g.order();
    let reg = RegularRep::new(g);
    let action: Vec<CMatrix> = (0..n).map(|x| reg.matrix(x)).collect();
    let bases: Vec<CMatrix> = (0..ct.num_irreps())
        .map(|t| {
            let p = isotypic_projector(ct, t, &action)?;
            let spec = linalg::hermitian_rank(&p, RANK_THRESHOLD)?;
            let keep: Vec<usize> = (0..n).filter(|&i| spec.eigenvalues[i] > 0.5).collect();
            let mut b = CMatrix::zeros(n, keep.len());
            for (c, &i) in keep.iter().enumerate() {
                b.set_column(c, &spec.eigenvectors.column(i));
            }
            Ok(b)
        })
        .collect::<Result<_>>()?;

    let r = ct.num_irreps();
    let k = space.k();
    let scale = span.scale();
    let tuples: Vec<Vec<usize>> = (0..r.pow(k as u32))
        .map(|t| (0..k).map(|i| (t / r.pow((k - 1 - i) as u32)) % r).collect())
        .collect();
    tuples
        .into_par_iter()
        .map(|sigma| {
            let factors: Vec<&CMatrix> = sigma.iter().map(|&s| &bases[s]).collect();
            let b = linalg::kron_all(&factors);
            let block = b.adjoint() * &span.m * &b;
            let block_rank = if scale == 0.0 {
                0
            } else {
                linalg::hermitian_rank_with_scale(&block, RANK_THRESHOLD, scale)?
            };
            let d2: usize = sigma.iter().map(|&s| ct.degree(s).pow(2)).product();
            Ok(SigmaEntry {
                plancherel: d2 as f64 / space.dim() as f64,
                normalized: block_rank as f64 / d2 as f64,
                block_rank,
                sigma,
            })
        })
        .collect()
}

/// `Σ_𝛔 Planch(𝛔) · dim W_{η,𝛔}/d_𝛔`.
pub fn weighted_average(entries: &[SigmaEntry]) -> f64 {
    entries.iter().map(|e| e.plancherel * e.normalized).sum()
}
