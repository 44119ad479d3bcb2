//! Entanglement measures and the bound chain connecting them: exact
//! two-qubit entanglement of formation, negativity and the PPT flag, the
//! trace-norm distance to the PPT set, the Schmidt-weight floor of
//! symmetric reductions, and the Pinsker-type upper bound
//! `min_sep ||rho - sigma||_1 <= sqrt(2 E_f)`.
//!
//! The separability distance is minimized over the PPT set, which equals
//! the separable set for two qubits and relaxes it (value becomes a lower
//! bound on the separable distance) in higher dimensions. All bound-chain
//! arithmetic is done in nats; conversion to bits happens at reporting.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    binary_entropy, eigh, eigvalsh, partial_transpose_matrix, trace_norm, CMatrix, DensityMatrix,
    LogBase,
};
use crate::symspace::dim_sym;

/// Eigenvalue floor for calling a partial transpose positive.
pub const PPT_TOL: f64 = 1e-9;

/// Default stationarity tolerance of the separability-distance solver.
pub const SEP_SOLVER_DEFAULT_TOL: f64 = 1e-7;

/// Iteration cap of the separability-distance solver.
pub const SEP_SOLVER_MAX_ITERS: usize = 20_000;

/// Everything this module can say about one bipartite state (exact EoF
/// requires two qubits).
#[derive(Clone, Debug)]
pub struct EntanglementReport {
    pub eof_nats: f64,
    pub negativity: f64,
    pub is_ppt: bool,
    pub sep_distance: f64,
    pub sep_distance_gap: f64,
    pub pinsker_upper: f64,
}

/// Feasible output of the separability-distance solver.
#[derive(Clone, Debug)]
pub struct SepDistanceSolution {
    /// trace_norm(rho - closest_state); an upper bound on the true PPT-set
    /// distance that tightens as the solver converges.
    pub value: f64,
    /// A PPT-feasible state witnessing `value`.
    pub closest_state: DensityMatrix,
    pub iterations: usize,
    /// Fixed-point residual at termination (stationarity gap).
    pub gap: f64,
}

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(Error::arg(format!(
            "expected a 2(x)2 state, got dims {:?}",
            rho.dims()
        )));
    }
    Ok(())
}

fn split_dims(rho: &DensityMatrix, cut: usize) -> Result<Vec<usize>> {
    let m = rho.dims().len();
    if cut == 0 || cut >= m {
        return Err(Error::arg(format!(
            "cut must split {m} subsystems into two nonempty parts"
        )));
    }
    Ok((cut..m).collect())
}

/// Partial transpose of the subsystems after `cut`, as a raw matrix.
pub fn partial_transpose(rho: &DensityMatrix, cut: usize) -> Result<CMatrix> {
    let part = split_dims(rho, cut)?;
    Ok(partial_transpose_matrix(rho.matrix(), rho.dims(), &part))
}

/// Wootters concurrence of a two-qubit state:
/// `max(0, l1 - l2 - l3 - l4)` with l_i the descending square roots of the
/// eigenvalues of `sqrt(rho) rho_tilde sqrt(rho)` and
/// `rho_tilde = (sy ⊗ sy) conj(rho) (sy ⊗ sy)`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho)?;
    let m = rho.matrix();

    // sy ⊗ sy has +-1 entries on the antidiagonal: (0,3)->-1? Work it out
    // elementwise: (sy ⊗ sy)[i,j] = -1 at (0,3) and (3,0), +1 at (1,2) and
    // (2,1), with all other entries zero.
    let mut yy = CMatrix::zeros(4, 4);
    yy.set(0, 3, Complex64::new(-1.0, 0.0));
    yy.set(3, 0, Complex64::new(-1.0, 0.0));
    yy.set(1, 2, Complex64::new(1.0, 0.0));
    yy.set(2, 1, Complex64::new(1.0, 0.0));

    let tilde = yy.matmul(&m.conj()).matmul(&yy);

    // sqrt(rho) via the spectral decomposition, clamping tiny negatives
    let dec = eigh(m)?;
    let roots: Vec<f64> = dec.values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let n = 4;
    let sqrt_rho = CMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| dec.vectors.get(i, k) * roots[k] * dec.vectors.get(j, k).conj())
            .sum()
    });

    let inner = sqrt_rho.matmul(&tilde).matmul(&sqrt_rho).hermitize();
    let mut lambdas: Vec<f64> = eigvalsh(&inner)?
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Entanglement of formation from a concurrence value.
pub fn eof_from_concurrence(c: f64, base: LogBase) -> Result<f64> {
    if !(0.0..=1.0 + 1e-12).contains(&c) {
        return Err(Error::arg(format!("concurrence {c} outside [0,1]")));
    }
    let c = c.min(1.0);
    let x = (1.0 + (1.0 - c * c).max(0.0).sqrt()) / 2.0;
    binary_entropy(x, base)
}

/// Exact two-qubit entanglement of formation
/// `h((1 + sqrt(1 - C^2))/2)` in the requested base.
pub fn eof_two_qubit(rho: &DensityMatrix, base: LogBase) -> Result<f64> {
    eof_from_concurrence(concurrence(rho)?, base)
}

/// Negativity `(||rho^PT||_1 - 1)/2` across the cut.
pub fn negativity(rho: &DensityMatrix, cut: usize) -> Result<f64> {
    let pt = partial_transpose(rho, cut)?;
    Ok((trace_norm(&pt)? - 1.0) / 2.0)
}

/// PPT flag: minimum eigenvalue of the partial transpose >= -1e-9.
pub fn is_ppt(rho: &DensityMatrix, cut: usize) -> Result<bool> {
    let pt = partial_transpose(rho, cut)?;
    let eigs = eigvalsh(&pt)?;
    Ok(*eigs.last().unwrap() >= -PPT_TOL)
}

/// Exact floor on the ensemble-mean largest Schmidt weight of a pure
/// symmetric state's two-site reduction:
/// `dim_sym(2^n, m-2) / dim_sym(2^n, m) = m(m-1)/((2^n+m-2)(2^n+m-1))`.
pub fn schmidt_weight_floor(n: u32, m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::arg("schmidt_weight_floor requires m >= 2"));
    }
    let d = 2u128
        .checked_pow(n)
        .ok_or_else(|| Error::Overflow(format!("2^{n}")))?;
    let mu = m as u128;
    let num = mu
        .checked_mul(mu - 1)
        .ok_or_else(|| Error::Overflow("m(m-1)".into()))?;
    let f1 = d
        .checked_add(mu - 2)
        .ok_or_else(|| Error::Overflow("2^n+m-2".into()))?;
    let f2 = d
        .checked_add(mu - 1)
        .ok_or_else(|| Error::Overflow("2^n+m-1".into()))?;
    let den = f1
        .checked_mul(f2)
        .ok_or_else(|| Error::Overflow("(2^n+m-2)(2^n+m-1)".into()))?;
    Ok(num as f64 / den as f64)
}

/// Entropy cap induced by a mean largest Schmidt weight:
/// `h(a1) + (1 - a1) ln(dim_sym(2^n, 2) - 1)` in nats. Bounds the
/// ensemble-mean entanglement entropy (and hence the entanglement of
/// formation) of the reduction.
pub fn eof_entropy_cap(a1_mean: f64, n: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&a1_mean) {
        return Err(Error::arg(format!("a1 mean {a1_mean} outside [0,1]")));
    }
    let d2 = dim_sym(1usize << n, 2)? as f64;
    Ok(binary_entropy(a1_mean, LogBase::Nat)? + (1.0 - a1_mean) * (d2 - 1.0).ln())
}

/// `sqrt(2 * eof_nats)`: the trace-distance bound the relative-entropy /
/// Pinsker chain places under an entanglement-of-formation value.
pub fn pinsker_upper(eof_nats: f64) -> Result<f64> {
    if eof_nats < 0.0 {
        return Err(Error::arg(format!("eof {eof_nats} is negative")));
    }
    Ok((2.0 * eof_nats).sqrt())
}

// ---------------------------------------------------------------------------
// Separability distance: min ||rho - sigma||_1 over {sigma PSD, tr 1, PPT}
// ---------------------------------------------------------------------------

/// Project a real vector onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut acc = 0.0;
    let mut theta = 0.0;
    let mut k = 0usize;
    for (i, &x) in sorted.iter().enumerate() {
        acc += x;
        let t = (acc - 1.0) / (i as f64 + 1.0);
        if x - t > 0.0 {
            theta = t;
            k = i + 1;
        }
    }
    debug_assert!(k > 0);
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Frobenius projection onto {sigma >= 0, tr sigma = 1}: simplex-project
/// the eigenvalues.
fn project_density(x: &CMatrix) -> CMatrix {
    let dec = eigh(&x.hermitize()).expect("hermitized input");
    let clipped = project_simplex(&dec.values);
    rebuild(&dec.vectors, &clipped)
}

/// Frobenius projection onto the PSD cone.
fn project_psd(x: &CMatrix) -> CMatrix {
    let dec = eigh(&x.hermitize()).expect("hermitized input");
    let clipped: Vec<f64> = dec.values.iter().map(|&l| l.max(0.0)).collect();
    rebuild(&dec.vectors, &clipped)
}

fn rebuild(vectors: &CMatrix, values: &[f64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| vectors.get(i, k) * values[k] * vectors.get(j, k).conj())
            .sum()
    })
}

/// Dykstra's alternating projections onto
/// `{density matrices} ∩ {PPT across `part`}`.
fn project_feasible(x: &CMatrix, dims: &[usize], part: &[usize]) -> CMatrix {
    let n = x.rows();
    let mut cur = x.hermitize();
    let mut p = CMatrix::zeros(n, n);
    let mut q = CMatrix::zeros(n, n);
    let mut last_a = cur.clone();
    for _ in 0..400 {
        let a = project_density(&cur.add(&p));
        p = cur.add(&p).sub(&a);
        let pt = partial_transpose_matrix(&a.add(&q), dims, part);
        let b = partial_transpose_matrix(&project_psd(&pt), dims, part);
        q = a.add(&q).sub(&b);
        let drift = a.max_abs_diff(&b);
        cur = b;
        if drift < 1e-12 {
            return a;
        }
        last_a = a;
    }
    last_a
}

/// prox of t*||rho - .||_1: spectral soft-threshold of (x - rho) around rho.
fn prox_trace_dist(x: &CMatrix, rho: &CMatrix, t: f64) -> CMatrix {
    let delta = x.sub(rho).hermitize();
    let dec = eigh(&delta).expect("hermitized input");
    let shrunk: Vec<f64> = dec
        .values
        .iter()
        .map(|&l| l.signum() * (l.abs() - t).max(0.0))
        .collect();
    rho.add(&rebuild(&dec.vectors, &shrunk))
}

/// Minimize `||rho - sigma||_1` over PPT states across the cut, by
/// Douglas-Rachford splitting between the trace-distance prox and the
/// feasibility projection (Dykstra over the density and PPT sets).
///
/// Returns a feasible witness; `value` is recomputed from it, so it is a
/// certified upper bound on the PPT-set distance. For two qubits the PPT
/// set equals the separable set, so the value is the separable distance;
/// beyond that it is a lower bound on the separable distance (the PPT set
/// is larger). PPT inputs short-circuit to distance zero.
pub fn sep_distance(rho: &DensityMatrix, cut: usize, tol: f64) -> Result<SepDistanceSolution> {
    let part = split_dims(rho, cut)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::arg("solver tolerance must be positive"));
    }

    if is_ppt(rho, cut)? {
        return Ok(SepDistanceSolution {
            value: 0.0,
            closest_state: rho.clone(),
            iterations: 0,
            gap: 0.0,
        });
    }

    let dims = rho.dims().to_vec();
    let step = 0.25;
    let mut z = rho.matrix().clone();
    let mut best_value = f64::INFINITY;
    let mut best_state: Option<CMatrix> = None;
    let mut gap = f64::INFINITY;

    for iter in 1..=SEP_SOLVER_MAX_ITERS {
        let y = prox_trace_dist(&z, rho.matrix(), step);
        let reflected = y.scale(Complex64::new(2.0, 0.0)).sub(&z);
        let w = project_feasible(&reflected, &dims, &part);
        z = z.add(&w).sub(&y);

        gap = w.max_abs_diff(&y);
        let value = trace_norm(&rho.matrix().sub(&w))?;
        if value < best_value {
            best_value = value;
            best_state = Some(w);
        }
        if gap <= tol {
            let closest = DensityMatrix::new(
                best_state.expect("at least one feasible iterate"),
                dims.clone(),
            )?;
            return Ok(SepDistanceSolution {
                value: best_value,
                closest_state: closest,
                iterations: iter,
                gap,
            });
        }
    }
    Err(Error::Convergence {
        best_value,
        gap,
        iterations: SEP_SOLVER_MAX_ITERS,
    })
}

/// Full report for a two-qubit state, using the default solver tolerance.
pub fn entanglement_report(rho: &DensityMatrix) -> Result<EntanglementReport> {
    require_two_qubits(rho)?;
    let eof_nats = eof_two_qubit(rho, LogBase::Nat)?;
    let negativity = negativity(rho, 1)?;
    let ppt = is_ppt(rho, 1)?;
    let sol = sep_distance(rho, 1, SEP_SOLVER_DEFAULT_TOL)?;
    Ok(EntanglementReport {
        eof_nats,
        negativity,
        is_ppt: ppt,
        sep_distance: sol.value,
        sep_distance_gap: sol.gap,
        pinsker_upper: pinsker_upper(eof_nats)?,
    })
}
