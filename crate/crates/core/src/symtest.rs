//! Symmetrization-test measurements.
//!
//! The test measures the projector onto the symmetric subspace: acceptance
//! probability ||P_sym phi||^2, post-state P_sym phi renormalized. That
//! projector semantics is the primary execution path. A didactic mode
//! builds the controlled-permutation circuit literally - an m!-dimensional
//! permutation register prepared in uniform superposition, a controlled
//! pi gate, and an uncomputation of the register - and must agree with the
//! projector exactly; it exists to certify the equivalence at small m, not
//! to scale. The paired two-stage variant first projects fused site pairs
//! onto their pair-symmetric subspace, then projects the odd sites.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{reorder_sites, CMatrix, PureState, DEFAULT_SIZE_CAP};
use crate::states::HaarSampler;
use crate::symspace::{
    all_permutations, apply_permutation, build_isometry_with_cap, enumerate_basis_with_cap,
    pair_regroup, pair_ungroup, project_sym, SitePermutation,
};

/// Post-states below this weight are reported as absent.
const ZERO_WEIGHT: f64 = 1e-12;

/// Outcome of a symmetrization-type measurement.
#[derive(Clone, Debug)]
pub struct TestOutcome {
    /// Probability of the accepting outcome, in [0, 1].
    pub accept_probability: f64,
    /// Renormalized post-measurement state; absent when the probability
    /// vanishes.
    pub post_state: Option<PureState>,
    /// (stage label, stage acceptance probability), in execution order.
    pub stage_log: Vec<(String, f64)>,
}

/// Measure the symmetric projector on a state over m equal sites.
///
/// Accepts with probability ||P_sym phi||^2; the post-state is the fixed
/// point P_sym phi / ||.||, and the probability is 1 exactly when the input
/// already lies in the symmetric subspace.
pub fn symmetry_test(psi: &PureState) -> Result<TestOutcome> {
    let (projected, weight) = project_sym(psi)?;
    let post_state = if weight > ZERO_WEIGHT {
        Some(PureState::normalized(projected, psi.dims().to_vec())?)
    } else {
        None
    };
    Ok(TestOutcome {
        accept_probability: weight.clamp(0.0, 1.0),
        post_state,
        stage_log: vec![("symmetric-projection".to_string(), weight.clamp(0.0, 1.0))],
    })
}

/// Joint state of the permutation register and the system after the
/// controlled-permutation gate: `(1/sqrt(m!)) sum_pi |pi> pi|phi>`.
///
/// Work states of the register preparation are modeled as already reset,
/// so only the m!-dimensional register itself is stored. Didactic only;
/// m <= 6 is enforced on top of the entry cap.
#[derive(Clone, Debug)]
pub struct DidacticCircuitState {
    register_dim: usize,
    system_dim: usize,
    joint: Vec<Complex64>,
}

impl DidacticCircuitState {
    /// Prepare the register, apply controlled-pi.
    pub fn run(psi: &PureState) -> Result<Self> {
        let m = psi.num_sites();
        if m > 6 {
            return Err(Error::arg(
                "didactic circuit is capped at m <= 6 (the register scales as m!)",
            ));
        }
        let perms = all_permutations(m);
        let register_dim = perms.len();
        let system_dim = psi.dim_total();
        let needed = (register_dim as u128) * (system_dim as u128);
        if needed > DEFAULT_SIZE_CAP as u128 {
            return Err(Error::Size {
                needed,
                cap: DEFAULT_SIZE_CAP as u128,
            });
        }
        let scale = 1.0 / (register_dim as f64).sqrt();
        let mut joint = vec![Complex64::new(0.0, 0.0); register_dim * system_dim];
        for (r, perm) in perms.iter().enumerate() {
            let moved = apply_permutation(psi, perm)?;
            for (s, amp) in moved.amps().iter().enumerate() {
                joint[r * system_dim + s] = amp * scale;
            }
        }
        Ok(DidacticCircuitState {
            register_dim,
            system_dim,
            joint,
        })
    }

    pub fn register_dim(&self) -> usize {
        self.register_dim
    }

    pub fn joint(&self) -> &[Complex64] {
        &self.joint
    }

    /// Uncompute the register preparation and project it on |0...0>:
    /// equivalently, project the register on the uniform superposition.
    /// Returns the unnormalized system vector and the outcome probability.
    pub fn uncompute_register(&self) -> (Vec<Complex64>, f64) {
        let scale = 1.0 / (self.register_dim as f64).sqrt();
        let mut system = vec![Complex64::new(0.0, 0.0); self.system_dim];
        for r in 0..self.register_dim {
            for s in 0..self.system_dim {
                system[s] += self.joint[r * self.system_dim + s] * scale;
            }
        }
        let prob: f64 = system.iter().map(|z| z.norm_sqr()).sum();
        (system, prob)
    }
}

/// Run the symmetrization test as an explicit circuit (didactic mode).
/// Must agree with [`symmetry_test`] in probability and post-state; the
/// circuit realizes the projector exactly.
pub fn didactic_circuit_test(psi: &PureState) -> Result<TestOutcome> {
    let circuit = DidacticCircuitState::run(psi)?;
    let (system, prob) = circuit.uncompute_register();
    let post_state = if prob > ZERO_WEIGHT {
        Some(PureState::normalized(system, psi.dims().to_vec())?)
    } else {
        None
    };
    Ok(TestOutcome {
        accept_probability: prob.clamp(0.0, 1.0),
        post_state,
        stage_log: vec![
            ("register-preparation".to_string(), 1.0),
            ("controlled-permutation".to_string(), 1.0),
            ("register-uncomputation".to_string(), prob.clamp(0.0, 1.0)),
        ],
    })
}

/// Two-stage projection test on m sites (m even): first project the fused
/// site pairs (2i-1, 2i) onto their pair-symmetric subspace, then project
/// the odd sites 1,3,5,... onto theirs. The two projectors commute, so the
/// post-state lies in both ranges and the stage probabilities multiply to
/// the squared norm of the composed projection.
pub fn two_stage_test(psi: &PureState) -> Result<TestOutcome> {
    let dims = psi.dims();
    let m = dims.len();
    if m % 2 != 0 || m == 0 {
        return Err(Error::arg("two_stage_test requires an even site count"));
    }
    let d = dims[0];
    if dims.iter().any(|&x| x != d) {
        return Err(Error::arg("two_stage_test requires equal site dimensions"));
    }
    let k = m / 2;

    // Stage 1: pair symmetrization on fused pairs.
    let fused = pair_regroup(psi)?;
    let (proj1, p1) = project_sym(&fused)?;
    let mut stage_log = vec![("pair-symmetrization".to_string(), p1.clamp(0.0, 1.0))];
    if p1 <= ZERO_WEIGHT {
        stage_log.push(("odd-site-symmetrization".to_string(), 0.0));
        return Ok(TestOutcome {
            accept_probability: 0.0,
            post_state: None,
            stage_log,
        });
    }
    let stage1 = pair_ungroup(&PureState::normalized(proj1, fused.dims().to_vec())?, d)?;

    // Stage 2: symmetrize the odd sites (1-based 1,3,5,... = the first
    // member of each pair) in the unfused representation.
    let mut order: Vec<usize> = (0..m).step_by(2).collect();
    order.extend((0..m).skip(1).step_by(2));
    let fronted = reorder_sites(&stage1, &order);

    let basis = enumerate_basis_with_cap(d, k, DEFAULT_SIZE_CAP)?;
    let iso = build_isometry_with_cap(&basis, DEFAULT_SIZE_CAP)?;
    let v = iso.matrix();
    let dk = v.rows();
    let ds = basis.len();

    // amplitudes as a (d^k x d^k) matrix: odd block row, even block column
    let amps = fronted.amps();
    let mut coords = CMatrix::zeros(ds, dk);
    for o in 0..dk {
        for e in 0..dk {
            let a = amps[o * dk + e];
            if a.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..ds {
                let w = v.get(o, j);
                if w.norm_sqr() > 0.0 {
                    coords.add_at(j, e, w.conj() * a);
                }
            }
        }
    }
    let p2: f64 = coords.data().iter().map(|z| z.norm_sqr()).sum();
    stage_log.push(("odd-site-symmetrization".to_string(), p2.clamp(0.0, 1.0)));
    if p2 <= ZERO_WEIGHT {
        return Ok(TestOutcome {
            accept_probability: 0.0,
            post_state: None,
            stage_log,
        });
    }
    let mut projected = vec![Complex64::new(0.0, 0.0); dk * dk];
    for j in 0..ds {
        for e in 0..dk {
            let cval = coords.get(j, e);
            if cval.norm_sqr() == 0.0 {
                continue;
            }
            for o in 0..dk {
                let w = v.get(o, j);
                if w.norm_sqr() > 0.0 {
                    projected[o * dk + e] += w * cval;
                }
            }
        }
    }
    let fronted_post = PureState::normalized(projected, vec![dk, dk])?;
    // expand the two blocks back into sites, then undo the front ordering
    let as_sites = PureState::new(fronted_post.amps().to_vec(), vec![d; m])?;
    let mut inverse_order = vec![0usize; m];
    for (pos, &site) in order.iter().enumerate() {
        inverse_order[site] = pos;
    }
    let post = reorder_sites(&as_sites, &inverse_order);

    Ok(TestOutcome {
        accept_probability: (p1 * p2).clamp(0.0, 1.0),
        post_state: Some(post),
        stage_log,
    })
}

/// Sample a uniformly random permutation of m sites (swap-based shuffle).
pub fn uniform_permutation(m: usize, sampler: &mut HaarSampler) -> Result<SitePermutation> {
    if m == 0 {
        return Err(Error::arg("uniform_permutation requires m >= 1"));
    }
    use rand::Rng;
    let mut mapping: Vec<usize> = (0..m).collect();
    for i in (1..m).rev() {
        let j = sampler.rng().gen_range(0..=i);
        mapping.swap(i, j);
    }
    SitePermutation::new(mapping)
}
