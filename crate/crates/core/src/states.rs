//! State constructions: Haar-random unitaries, random symmetric states, the
//! symmetric maximally entangled state, the isotropic twirl state, and
//! two-site reductions.
//!
//! Two-site reductions exist in two provenances. The dense oracle embeds a
//! symmetric state into the full d^m tensor space through the isometry and
//! partial-traces it down; it is exact but capped in size. The fast path
//! contracts closed-form transition reduced matrices between occupation
//! states (nonzero only when two occupations differ by relocating at most
//! two units) and works for any m. The fast-path coefficients are the
//! likeliest place for a combinatorial slip, so they are cross-validated
//! against the dense oracle over a grid before being trusted at large m.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{
    digits, kron, partial_trace, CMatrix, DensityMatrix, PureState, DEFAULT_SIZE_CAP,
};
use crate::symspace::{
    build_isometry_with_cap, dim_sym, enumerate_basis_with_cap, ln_multinomial, OccupationBasis,
};

/// Name and version of the RNG backing all sampling, echoed into sweep
/// configs for reproducibility.
pub const RNG_ALGORITHM: &str = "chacha12 (rand_chacha 0.3)";

/// Seeded, streamable source of Haar-random unitaries and Gaussian vectors.
///
/// A sampler is identified by `(seed, stream)`; the same pair always
/// reproduces the same draw sequence on one platform. Sweeps give every
/// sample its own stream index so aggregation order and thread count cannot
/// change the results.
#[derive(Clone, Debug)]
pub struct HaarSampler {
    seed: u64,
    stream: u64,
    rng: ChaCha12Rng,
}

impl HaarSampler {
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    pub fn substream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        HaarSampler { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    #[inline]
    pub fn complex_gaussian(&mut self) -> Complex64 {
        Complex64::new(self.standard_normal(), self.standard_normal())
    }

    pub fn rng(&mut self) -> &mut ChaCha12Rng {
        &mut self.rng
    }
}

/// Sample a Haar-distributed d x d unitary.
///
/// A complex Ginibre matrix is orthonormalized column by column with the
/// triangular factor's diagonal kept real positive (Gram-Schmidt produces
/// that phase convention directly), which makes the resulting Q exactly
/// Haar distributed.
pub fn haar_unitary(sampler: &mut HaarSampler, d: usize) -> CMatrix {
    assert!(d >= 1, "haar_unitary requires d >= 1");
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    for _ in 0..d {
        loop {
            let mut v: Vec<Complex64> = (0..d).map(|_| sampler.complex_gaussian()).collect();
            // two orthogonalization passes keep Q unitary to machine precision
            for _ in 0..2 {
                for q in &cols {
                    let overlap: Complex64 = q.iter().zip(&v).map(|(qi, vi)| qi.conj() * vi).sum();
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= overlap * qi;
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-100 {
                for z in &mut v {
                    *z /= norm;
                }
                cols.push(v);
                break;
            }
        }
    }
    CMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// First column of a Haar unitary: a uniformly random unit vector.
pub fn haar_state(sampler: &mut HaarSampler, d: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..d).map(|_| sampler.complex_gaussian()).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-100 {
        return haar_state(sampler, d);
    }
    for z in &mut v {
        *z /= norm;
    }
    v
}

/// A pure state of the symmetric subspace of m sites of n qubits each,
/// stored as coefficients over the occupation basis.
#[derive(Clone, Debug)]
pub struct SymmetricState {
    n: u32,
    m: usize,
    basis: OccupationBasis,
    coefficients: Vec<Complex64>,
}

impl SymmetricState {
    pub fn new(n: u32, m: usize, coefficients: Vec<Complex64>) -> Result<Self> {
        let d = local_dim(n)?;
        let basis = enumerate_basis_with_cap(d, m, DEFAULT_SIZE_CAP)?;
        if coefficients.len() != basis.len() {
            return Err(Error::arg(format!(
                "expected {} coefficients for n={n}, m={m}, got {}",
                basis.len(),
                coefficients.len()
            )));
        }
        let norm: f64 = coefficients.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::arg(format!(
                "symmetric state norm {norm} differs from 1"
            )));
        }
        Ok(SymmetricState {
            n,
            m,
            basis,
            coefficients,
        })
    }

    /// Dicke-type basis state: coefficient 1 on one occupation vector.
    pub fn dicke(n: u32, m: usize, occupation: &[u32]) -> Result<Self> {
        let d = local_dim(n)?;
        let basis = enumerate_basis_with_cap(d, m, DEFAULT_SIZE_CAP)?;
        let j = basis
            .index_of(occupation)
            .ok_or_else(|| Error::arg("occupation vector is not in the basis"))?;
        let mut coefficients = vec![Complex64::new(0.0, 0.0); basis.len()];
        coefficients[j] = Complex64::new(1.0, 0.0);
        Ok(SymmetricState {
            n,
            m,
            basis,
            coefficients,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Local site dimension 2^n.
    pub fn d(&self) -> usize {
        1usize << self.n
    }

    pub fn basis(&self) -> &OccupationBasis {
        &self.basis
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Dense embedding into the full (C^d)^(x)m space via the isometry.
    pub fn embed(&self) -> Result<PureState> {
        let iso = build_isometry_with_cap(&self.basis, DEFAULT_SIZE_CAP)?;
        PureState::new(iso.embed(&self.coefficients), vec![self.d(); self.m])
    }
}

fn local_dim(n: u32) -> Result<usize> {
    if n as usize >= usize::BITS as usize - 1 {
        return Err(Error::Overflow(format!("local dimension 2^{n}")));
    }
    Ok(1usize << n)
}

/// Draw a symmetric state uniformly from the unit sphere of the symmetric
/// subspace (complex Gaussian coefficients, normalized; the distribution is
/// invariant under rotations of the subspace).
pub fn random_symmetric_state(
    sampler: &mut HaarSampler,
    n: u32,
    m: usize,
) -> Result<SymmetricState> {
    let d = local_dim(n)?;
    let basis = enumerate_basis_with_cap(d, m, DEFAULT_SIZE_CAP)?;
    let mut coefficients: Vec<Complex64> =
        (0..basis.len()).map(|_| sampler.complex_gaussian()).collect();
    let norm = coefficients.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut coefficients {
        *z /= norm;
    }
    Ok(SymmetricState {
        n,
        m,
        basis,
        coefficients,
    })
}

/// The two-site maximally entangled state sum_i |ii> / sqrt(d).
pub fn max_entangled_pure(d: usize) -> PureState {
    let mut amps = vec![Complex64::new(0.0, 0.0); d * d];
    let a = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        amps[i * d + i] = Complex64::new(a, 0.0);
    }
    PureState::new(amps, vec![d, d]).expect("max entangled state is normalized")
}

/// |Phi+><Phi+| on C^d (x) C^d.
pub fn max_entangled_projector(d: usize) -> DensityMatrix {
    max_entangled_pure(d).density()
}

/// The twirl of |00><00| under U (x) conj(U): the isotropic state with
/// maximally-entangled fraction 1/d,
/// `(1/d)|Phi+><Phi+| + (1 - 1/d)(I - |Phi+><Phi+|)/(d^2 - 1)`.
///
/// It is separable, and its partial transpose has minimum eigenvalue
/// exactly 0 (the PPT boundary of the isotropic family).
pub fn rho_bar(d: usize) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::arg("rho_bar requires d >= 2"));
    }
    let phi = max_entangled_projector(d);
    let df = d as f64;
    let dd = (d * d) as f64;
    let alpha = (1.0 - 1.0 / df) / (dd - 1.0);
    let mat = CMatrix::from_fn(d * d, d * d, |i, j| {
        let p = phi.matrix().get(i, j);
        let ident = if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        p * (1.0 / df) + (ident - p) * alpha
    });
    DensityMatrix::new(mat.hermitize(), vec![d, d])
}

/// The symmetric maximally entangled state |Phi> on m = 2k sites of n
/// qubits each: sum_j |e_j>|conj(e_j)> / sqrt(d_s) across the odd/even site
/// split, where {e_j} is the occupation basis of (C^{2^n})^{sym k} and
/// d_s = dim_sym(2^n, k).
///
/// Odd sites (1-based 1,3,5,...) carry the U-half of the defining twirl
/// integral, even sites the conjugate half; the coefficient matrix across
/// that split is I/sqrt(d_s).
#[derive(Clone, Debug)]
pub struct PhiState {
    n: u32,
    k: usize,
    basis: OccupationBasis,
    coefficient_matrix: CMatrix,
}

/// Construct [`PhiState`] for k site pairs of n qubits each.
pub fn phi_state(n: u32, k: usize) -> Result<PhiState> {
    if k == 0 {
        return Err(Error::arg("phi_state requires k >= 1"));
    }
    let d = local_dim(n)?;
    let basis = enumerate_basis_with_cap(d, k, DEFAULT_SIZE_CAP)?;
    let ds = basis.len() as f64;
    let coefficient_matrix =
        CMatrix::identity(basis.len()).scale(Complex64::new(1.0 / ds.sqrt(), 0.0));
    Ok(PhiState {
        n,
        k,
        basis,
        coefficient_matrix,
    })
}

impl PhiState {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        2 * self.k
    }

    pub fn d(&self) -> usize {
        1usize << self.n
    }

    pub fn dim_sym(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &OccupationBasis {
        &self.basis
    }

    /// Coefficient matrix over the paired occupation bases (I/sqrt(d_s)).
    pub fn coefficient_matrix(&self) -> &CMatrix {
        &self.coefficient_matrix
    }

    /// Dense embedding as a pure state over 2k interleaved sites of
    /// dimension d (the U-half site first in each pair).
    pub fn embed(&self) -> Result<PureState> {
        let d = self.d();
        let k = self.k;
        let total = (d as u128)
            .checked_pow(2 * k as u32)
            .ok_or_else(|| Error::Overflow("phi embedding size".into()))?;
        if total > DEFAULT_SIZE_CAP as u128 {
            return Err(Error::Size {
                needed: total,
                cap: DEFAULT_SIZE_CAP as u128,
            });
        }
        let iso = build_isometry_with_cap(&self.basis, DEFAULT_SIZE_CAP)?;
        let v = iso.matrix();
        let ds = self.basis.len();
        let scale = 1.0 / (ds as f64).sqrt();
        let dims = vec![d; 2 * k];
        // P_sym[o,e]/sqrt(d_s) with o read off the odd sites, e off the even.
        let mut amps = vec![Complex64::new(0.0, 0.0); total as usize];
        for (idx, amp) in amps.iter_mut().enumerate() {
            let word = digits(idx, &dims);
            let mut o = 0usize;
            let mut e = 0usize;
            for p in 0..k {
                o = o * d + word[2 * p];
                e = e * d + word[2 * p + 1];
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..ds {
                acc += v.get(o, j) * v.get(e, j);
            }
            *amp = acc * scale;
        }
        PureState::new(amps, dims)
    }

    /// The vector's partial transpose across the odd/even split, which is
    /// the symmetric projector of k sites scaled by 1/sqrt(d_s).
    pub fn partial_transpose(&self) -> Result<CMatrix> {
        let iso = build_isometry_with_cap(&self.basis, DEFAULT_SIZE_CAP)?;
        let ds = self.basis.len() as f64;
        Ok(iso.projector().scale(Complex64::new(1.0 / ds.sqrt(), 0.0)))
    }
}

/// Which route produced a two-site reduction.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    DenseOracle,
    FastPath,
}

/// A two-site reduced density matrix tagged with how it was computed.
#[derive(Clone, Debug)]
pub struct TwoSiteReduction {
    pub rho: DensityMatrix,
    pub provenance: Provenance,
}

/// f(occ, x, y) = occ_x (occ_y - [x == y]): the number of ordered ways to
/// pull letters x then y out of the multiset.
#[inline]
fn take_two(occ: &[u32], x: usize, y: usize) -> f64 {
    let ox = occ[x] as f64;
    let oy = occ[y] as f64 - if x == y { 1.0 } else { 0.0 };
    if ox <= 0.0 || oy <= 0.0 {
        0.0
    } else {
        ox * oy
    }
}

/// Two-site reduction of a symmetric state via closed-form transition
/// reduced matrices; valid for any m >= 2, O(dim_sym * d^4) time.
///
/// For occupations mu, nu the two-site transition matrix
/// `Tr_{3..m} |e_mu><e_nu|` has entry
/// `sqrt(f(mu,a1,a2) f(nu,b1,b2)) / (m(m-1))` at ((a1,a2),(b1,b2)) exactly
/// when `mu - 1_{a1} - 1_{a2} = nu - 1_{b1} - 1_{b2}` stays nonnegative,
/// and is zero otherwise (f as in [`take_two`]).
pub fn reduce_two_sites(state: &SymmetricState) -> Result<TwoSiteReduction> {
    let m = state.m();
    if m < 2 {
        return Err(Error::arg("reduce_two_sites requires m >= 2"));
    }
    let d = state.d();
    let basis = state.basis();
    let coeff = state.coefficients();
    let norm = 1.0 / (m as f64 * (m as f64 - 1.0));
    let mut rho = CMatrix::zeros(d * d, d * d);
    let mut lambda = vec![0u32; d];
    let mut nu = vec![0u32; d];
    for (j, mu) in basis.states().iter().enumerate() {
        let cj = coeff[j];
        if cj.norm_sqr() == 0.0 {
            continue;
        }
        for a1 in 0..d {
            if mu[a1] == 0 {
                continue;
            }
            for a2 in 0..d {
                let f_mu = take_two(mu, a1, a2);
                if f_mu == 0.0 {
                    continue;
                }
                lambda.copy_from_slice(mu);
                lambda[a1] -= 1;
                lambda[a2] -= 1;
                let row = a1 * d + a2;
                for b1 in 0..d {
                    for b2 in 0..d {
                        nu.copy_from_slice(&lambda);
                        nu[b1] += 1;
                        nu[b2] += 1;
                        let Some(jp) = basis.index_of(&nu) else {
                            continue;
                        };
                        let cjp = coeff[jp];
                        if cjp.norm_sqr() == 0.0 {
                            continue;
                        }
                        let f_nu = take_two(&nu, b1, b2);
                        let w = (f_mu * f_nu).sqrt() * norm;
                        rho.add_at(row, b1 * d + b2, cj * cjp.conj() * w);
                    }
                }
            }
        }
    }
    Ok(TwoSiteReduction {
        rho: DensityMatrix::new(rho.hermitize(), vec![d, d])?,
        provenance: Provenance::FastPath,
    })
}

/// Dense-oracle two-site reduction: embed through the isometry, then
/// partial-trace sites 3..m away. Capped in size; certifies the fast path.
pub fn reduce_two_sites_dense(state: &SymmetricState) -> Result<TwoSiteReduction> {
    let m = state.m();
    if m < 2 {
        return Err(Error::arg("reduce_two_sites requires m >= 2"));
    }
    let full = state.embed()?;
    let rho = partial_trace(&full.density(), &[0, 1])?;
    Ok(TwoSiteReduction {
        rho,
        provenance: Provenance::DenseOracle,
    })
}

/// First-pair reduction of |Phi> via single-site transition reduced
/// matrices.
///
/// Over k sites, `T = Tr_{2..k} |e_mu><e_nu|` has entry `sqrt(mu_a nu_b)/k`
/// at (a,b) exactly when `mu - 1_a = nu - 1_b` stays nonnegative. The
/// reduction is `(1/d_s) sum_{mu,nu} T ⊗ conj(T)`: off-diagonal one-move
/// transitions contribute `(mu_a nu_b / k^2)|aa><bb|`, and the diagonal
/// transitions contribute `(mu_a mu_a' / k^2)|a a'><a a'|`.
pub fn reduce_phi_two_sites(phi: &PhiState) -> Result<TwoSiteReduction> {
    let d = phi.d();
    let k = phi.k;
    let basis = &phi.basis;
    let ds = basis.len() as f64;
    let kf = k as f64;
    let mut rho = CMatrix::zeros(d * d, d * d);
    let mut nu = vec![0u32; d];
    for mu in basis.states() {
        // one-move transitions (a -> b, a != b)
        for a in 0..d {
            if mu[a] == 0 {
                continue;
            }
            for b in 0..d {
                if b == a {
                    continue;
                }
                nu.copy_from_slice(mu);
                nu[a] -= 1;
                nu[b] += 1;
                if basis.index_of(&nu).is_none() {
                    continue;
                }
                let w = (mu[a] as f64) * (nu[b] as f64) / (kf * kf);
                rho.add_at(a * d + a, b * d + b, Complex64::new(w / ds, 0.0));
            }
        }
        // diagonal transitions: diag(mu/k) ⊗ diag(mu/k)
        for a in 0..d {
            if mu[a] == 0 {
                continue;
            }
            for ap in 0..d {
                if mu[ap] == 0 {
                    continue;
                }
                let w = (mu[a] as f64) * (mu[ap] as f64) / (kf * kf);
                rho.add_at(a * d + ap, a * d + ap, Complex64::new(w / ds, 0.0));
            }
        }
    }
    Ok(TwoSiteReduction {
        rho: DensityMatrix::new(rho.hermitize(), vec![d, d])?,
        provenance: Provenance::FastPath,
    })
}

/// Closed form the first-pair reduction of |Phi> must equal:
/// `rho_bar + (2/m)(|Phi+><Phi+| - rho_bar)` with m = 2k.
pub fn phi_reduced_closed_form(n: u32, k: usize) -> Result<DensityMatrix> {
    let d = local_dim(n)?;
    if k == 0 {
        return Err(Error::arg("phi reduction requires k >= 1"));
    }
    let t = 2.0 / (2.0 * k as f64);
    let phi = max_entangled_projector(d);
    let bar = rho_bar(d)?;
    // (1-t) rho_bar + t phi
    phi.mix(&bar, t)
}

/// One draw of the Haar decomposition of a pure symmetric state's two-site
/// reduction: sample U, condition sites 3..m on U|0...0>, and record the
/// ensemble weight and the top Schmidt weight of the conditioned two-site
/// pure state.
#[derive(Clone, Debug)]
pub struct SchmidtSample {
    /// Unnormalized ensemble weight Tr[(<v|^(m-2)) rho (|v>^(m-2))].
    pub p_u: f64,
    /// Largest squared Schmidt coefficient of the conditioned state.
    pub a1: f64,
    /// Entanglement entropy (nats) of the conditioned state.
    pub ent_nats: f64,
    /// (seed, stream) of the sampler that produced U.
    pub seed: u64,
    pub stream: u64,
}

/// Draw one [`SchmidtSample`] for a pure symmetric state.
///
/// Everything happens in the occupation basis: the overlap of |e_mu> with
/// |a1 a2> ⊗ |v>^(m-2) is `multinomial(m-2, mu - 1_{a1} - 1_{a2})
/// / sqrt(multinomial(m, mu)) * prod_c conj(v_c)^{lambda_c}`, so no d^m
/// vector is ever built.
pub fn schmidt_sample(state: &SymmetricState, sampler: &mut HaarSampler) -> Result<SchmidtSample> {
    let m = state.m();
    if m < 2 {
        return Err(Error::arg("schmidt_sample requires m >= 2"));
    }
    let d = state.d();
    let u = haar_unitary(sampler, d);
    let v: Vec<Complex64> = (0..d).map(|i| u.get(i, 0)).collect();
    let chi = conditioned_pair_vector(state, &v);

    // Gram matrix of the first site: eigenvalues are the squared Schmidt
    // coefficients scaled by p_u.
    let mut gram = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..d {
                acc += chi[i * d + t] * chi[j * d + t].conj();
            }
            gram.set(i, j, acc);
        }
    }
    let eigs = crate::linalg::eigvalsh(&gram.hermitize())?;
    let p_u: f64 = eigs.iter().map(|l| l.max(0.0)).sum();
    let (a1, ent_nats) = if p_u < 1e-250 {
        (0.0, 0.0)
    } else {
        let spec: Vec<f64> = eigs.iter().map(|l| l.max(0.0) / p_u).collect();
        (
            spec[0],
            crate::linalg::entropy_of_spectrum(&spec, crate::linalg::LogBase::Nat),
        )
    };
    Ok(SchmidtSample {
        p_u,
        a1,
        ent_nats,
        seed: sampler.seed(),
        stream: sampler.stream(),
    })
}

/// (<v|^(m-2) on sites 3..m) |state>, as an unnormalized two-site vector.
fn conditioned_pair_vector(state: &SymmetricState, v: &[Complex64]) -> Vec<Complex64> {
    let m = state.m();
    let d = state.d();
    let basis = state.basis();
    // conj(v_c)^p tables up to p = m
    let mut pow: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    for &vc in v {
        let mut row = Vec::with_capacity(m + 1);
        let mut acc = Complex64::new(1.0, 0.0);
        row.push(acc);
        for _ in 0..m {
            acc *= vc.conj();
            row.push(acc);
        }
        pow.push(row);
    }
    let mut chi = vec![Complex64::new(0.0, 0.0); d * d];
    let mut lambda = vec![0u32; d];
    for (j, mu) in basis.states().iter().enumerate() {
        let cj = state.coefficients()[j];
        if cj.norm_sqr() == 0.0 {
            continue;
        }
        let half_ln_mult = 0.5 * ln_multinomial(m, mu);
        for a1 in 0..d {
            if mu[a1] == 0 {
                continue;
            }
            for a2 in 0..d {
                if take_two(mu, a1, a2) == 0.0 {
                    continue;
                }
                lambda.copy_from_slice(mu);
                lambda[a1] -= 1;
                lambda[a2] -= 1;
                let coeff = (ln_multinomial(m - 2, &lambda) - half_ln_mult).exp();
                let mut monomial = Complex64::new(coeff, 0.0);
                for c in 0..d {
                    monomial *= pow[c][lambda[c] as usize];
                }
                chi[a1 * d + a2] += cj * monomial;
            }
        }
    }
    chi
}

/// Monte Carlo twirl oracle: mean of (U ⊗ conj(U)) |00><00| (U ⊗ conj(U))†
/// over `samples` Haar draws. Verification helper for [`rho_bar`].
pub fn mc_twirl_00(seed: u64, d: usize, samples: usize) -> CMatrix {
    let mut acc = CMatrix::zeros(d * d, d * d);
    for s in 0..samples {
        let mut sampler = HaarSampler::substream(seed, s as u64);
        let u = haar_unitary(&mut sampler, d);
        let v: Vec<Complex64> = (0..d).map(|i| u.get(i, 0)).collect();
        let mut pair = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                pair[i * d + j] = v[i] * v[j].conj();
            }
        }
        for i in 0..d * d {
            for j in 0..d * d {
                acc.add_at(i, j, pair[i] * pair[j].conj());
            }
        }
    }
    acc.scale(Complex64::new(1.0 / samples as f64, 0.0))
}

/// Monte Carlo estimate of sqrt(d_s) * mean of (U|0> ⊗ conj(U)|0>)^(x)k,
/// the defining integral of |Phi>. Verification helper for [`phi_state`].
pub fn mc_phi_vector(seed: u64, n: u32, k: usize, samples: usize) -> Result<Vec<Complex64>> {
    let d = local_dim(n)?;
    let ds = dim_sym(d, k)? as f64;
    let total = (d * d).pow(k as u32);
    let mut acc = vec![Complex64::new(0.0, 0.0); total];
    for s in 0..samples {
        let mut sampler = HaarSampler::substream(seed, s as u64);
        let u = haar_unitary(&mut sampler, d);
        let v: Vec<Complex64> = (0..d).map(|i| u.get(i, 0)).collect();
        let mut pair = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                pair[i * d + j] = v[i] * v[j].conj();
            }
        }
        // k-fold tensor power; adjacent pairs give the interleaved order
        let mut cur = vec![Complex64::new(1.0, 0.0)];
        for _ in 0..k {
            let mut next = vec![Complex64::new(0.0, 0.0); cur.len() * d * d];
            for (ci, cv) in cur.iter().enumerate() {
                for (pi, pv) in pair.iter().enumerate() {
                    next[ci * d * d + pi] = cv * pv;
                }
            }
            cur = next;
        }
        for (a, b) in acc.iter_mut().zip(&cur) {
            *a += b;
        }
    }
    let scale = ds.sqrt() / samples as f64;
    for a in &mut acc {
        *a *= scale;
    }
    Ok(acc)
}

/// Build (|psi>)^(x)m as a dense pure state (helper for presets and tests).
pub fn tensor_power_state(single: &PureState, m: usize) -> Result<PureState> {
    if m == 0 {
        return Err(Error::arg("tensor power requires m >= 1"));
    }
    let base = CMatrix::from_fn(single.dim_total(), 1, |i, _| single.amps()[i]);
    let mut mat = base.clone();
    for _ in 1..m {
        mat = kron(&mat, &base)?;
    }
    let mut dims = Vec::with_capacity(m * single.dims().len());
    for _ in 0..m {
        dims.extend_from_slice(single.dims());
    }
    PureState::new(mat.data().to_vec(), dims)
}
