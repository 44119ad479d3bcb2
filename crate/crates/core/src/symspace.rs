//! The symmetric subspace of m sites of local dimension d: its
//! occupation-number basis, its isometric embedding into the full tensor
//! space, symmetric projectors, and site permutations.
//!
//! The basis ordering convention is load-bearing: every module indexes the
//! symmetric subspace through [`OccupationBasis`], whose states are ordered
//! by their sorted-word representation (the non-decreasing word over the
//! alphabet `0..d` that each multiset corresponds to, in lexicographic
//! order). For d=2, m=2 that is `(2,0), (1,1), (0,2)`, i.e. words
//! `00 < 01 < 11`.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{digits, CMatrix, PureState, DEFAULT_SIZE_CAP};

/// Dimension of the symmetric subspace of `m` sites of local dimension `d`:
/// the number of size-`m` multisets over `d` letters.
///
/// Computed with the multiplicative formula `prod_{k=1..m} (d-1+k)/k` in
/// overflow-checked integer arithmetic (each intermediate is a binomial, so
/// the division is exact); the factorial form would overflow long before
/// the ratio does.
pub fn dim_sym(d: usize, m: usize) -> Result<u128> {
    dim_sym_u128(d as u128, m)
}

/// Same as [`dim_sym`] for local dimensions that may not fit a `usize`.
pub fn dim_sym_u128(d: u128, m: usize) -> Result<u128> {
    if d == 0 {
        return if m == 0 {
            Ok(1)
        } else {
            Err(Error::arg("dim_sym requires d >= 1 when m > 0"))
        };
    }
    let mut acc: u128 = 1;
    for k in 1..=(m as u128) {
        let factor = (d - 1)
            .checked_add(k)
            .ok_or_else(|| Error::Overflow(format!("dim_sym({d}, {m})")))?;
        acc = acc
            .checked_mul(factor)
            .ok_or_else(|| Error::Overflow(format!("dim_sym({d}, {m})")))?;
        acc /= k;
    }
    Ok(acc)
}

/// Natural log of the multinomial coefficient m!/prod(occ_c!).
pub fn ln_multinomial(m: usize, occ: &[u32]) -> f64 {
    debug_assert_eq!(occ.iter().map(|&c| c as usize).sum::<usize>(), m);
    let mut s = ln_factorial(m);
    for &c in occ {
        s -= ln_factorial(c as usize);
    }
    s
}

/// ln(n!) by direct summation (n stays desk-scale here).
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// The occupation-number basis of the symmetric subspace `(C^d)^{sym m}`.
///
/// `states[j]` is a length-`d` vector of nonnegative counts summing to `m`;
/// the list is ordered by the sorted-word representation described in the
/// module docs.
#[derive(Clone, Debug)]
pub struct OccupationBasis {
    d: usize,
    m: usize,
    states: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl OccupationBasis {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec<u32>] {
        &self.states
    }

    pub fn occupation(&self, j: usize) -> &[u32] {
        &self.states[j]
    }

    pub fn index_of(&self, occ: &[u32]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    /// Occupation vector (letter counts) of a computational-basis word.
    pub fn type_of_word(&self, word: &[usize]) -> Vec<u32> {
        let mut occ = vec![0u32; self.d];
        for &w in word {
            occ[w] += 1;
        }
        occ
    }
}

/// Enumerate the occupation basis with the default size cap.
pub fn enumerate_basis(d: usize, m: usize) -> Result<OccupationBasis> {
    enumerate_basis_with_cap(d, m, DEFAULT_SIZE_CAP)
}

/// Enumerate the occupation basis; errors if it would hold more than `cap`
/// counts in total.
pub fn enumerate_basis_with_cap(d: usize, m: usize, cap: usize) -> Result<OccupationBasis> {
    if d == 0 {
        return Err(Error::arg("enumerate_basis requires d >= 1"));
    }
    let count = dim_sym(d, m)?;
    let needed = count
        .checked_mul(d as u128)
        .ok_or_else(|| Error::Overflow(format!("basis storage for d={d}, m={m}")))?;
    if needed > cap as u128 {
        return Err(Error::Size {
            needed,
            cap: cap as u128,
        });
    }
    // Walk non-decreasing words in lexicographic order; the running letter
    // counts are the occupation vectors.
    let mut states = Vec::with_capacity(count as usize);
    let mut occ = vec![0u32; d];
    fn rec(
        states: &mut Vec<Vec<u32>>,
        occ: &mut Vec<u32>,
        min_letter: usize,
        left: usize,
        d: usize,
    ) {
        if left == 0 {
            states.push(occ.clone());
            return;
        }
        for letter in min_letter..d {
            occ[letter] += 1;
            rec(states, occ, letter, left - 1, d);
            occ[letter] -= 1;
        }
    }
    rec(&mut states, &mut occ, 0, m, d);
    debug_assert_eq!(states.len() as u128, count);
    let index = states
        .iter()
        .enumerate()
        .map(|(j, s)| (s.clone(), j))
        .collect();
    Ok(OccupationBasis {
        d,
        m,
        states,
        index,
    })
}

/// Isometric embedding of the symmetric subspace into the full tensor
/// space: a `d^m x dim_sym` matrix whose columns are the normalized
/// symmetrizations of the computational basis words.
#[derive(Clone, Debug)]
pub struct SymIsometry {
    basis: OccupationBasis,
    matrix: CMatrix,
}

impl SymIsometry {
    pub fn basis(&self) -> &OccupationBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// V c: embed symmetric-subspace coefficients into the full space.
    pub fn embed(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        self.matrix.matvec(coeffs)
    }

    /// V† x: coordinates of a full-space vector in the symmetric basis.
    pub fn coords(&self, full: &[Complex64]) -> Vec<Complex64> {
        self.matrix.adjoint_matvec(full)
    }

    /// The symmetric projector V V† as a dense matrix.
    pub fn projector(&self) -> CMatrix {
        self.matrix.matmul(&self.matrix.adjoint())
    }
}

/// Build the symmetric isometry with the default size cap.
pub fn build_isometry(basis: &OccupationBasis) -> Result<SymIsometry> {
    build_isometry_with_cap(basis, DEFAULT_SIZE_CAP)
}

/// Build the symmetric isometry; errors if the dense `d^m x dim_sym`
/// matrix would exceed `cap` entries.
pub fn build_isometry_with_cap(basis: &OccupationBasis, cap: usize) -> Result<SymIsometry> {
    let d = basis.d();
    let m = basis.m();
    let full: u128 = (d as u128)
        .checked_pow(m as u32)
        .ok_or_else(|| Error::Overflow(format!("d^m for d={d}, m={m}")))?;
    let needed = full
        .checked_mul(basis.len() as u128)
        .ok_or_else(|| Error::Overflow("isometry entry count".into()))?;
    if needed > cap as u128 {
        return Err(Error::Size {
            needed,
            cap: cap as u128,
        });
    }
    let full = full as usize;
    let dims = vec![d; m];
    let mut matrix = CMatrix::zeros(full, basis.len());
    for w in 0..full {
        let word = digits(w, &dims);
        let occ = basis.type_of_word(&word);
        let j = basis
            .index_of(&occ)
            .expect("every word type is in the basis");
        let amp = (-0.5 * ln_multinomial(m, &occ)).exp();
        matrix.set(w, j, Complex64::new(amp, 0.0));
    }
    Ok(SymIsometry {
        basis: basis.clone(),
        matrix,
    })
}

/// A permutation of m sites. `mapping[i]` is the site that site `i` is sent
/// to; the permutation operator acts on basis words by moving the content
/// of site `i` to site `mapping[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SitePermutation {
    mapping: Vec<usize>,
}

impl SitePermutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let m = mapping.len();
        let mut seen = vec![false; m];
        for &t in &mapping {
            if t >= m || seen[t] {
                return Err(Error::arg("permutation mapping must be a bijection"));
            }
            seen[t] = true;
        }
        Ok(SitePermutation { mapping })
    }

    pub fn identity(m: usize) -> Self {
        SitePermutation {
            mapping: (0..m).collect(),
        }
    }

    pub fn transposition(m: usize, a: usize, b: usize) -> Result<Self> {
        if a >= m || b >= m {
            return Err(Error::arg("transposition indices out of range"));
        }
        let mut mapping: Vec<usize> = (0..m).collect();
        mapping.swap(a, b);
        SitePermutation::new(mapping)
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &t)| i == t)
    }

    pub fn inverse(&self) -> SitePermutation {
        let mut inv = vec![0usize; self.mapping.len()];
        for (i, &t) in self.mapping.iter().enumerate() {
            inv[t] = i;
        }
        SitePermutation { mapping: inv }
    }

    /// self ∘ other: apply `other` first, then `self`.
    pub fn compose(&self, other: &SitePermutation) -> Result<SitePermutation> {
        if self.len() != other.len() {
            return Err(Error::arg("cannot compose permutations of different m"));
        }
        let mapping = (0..self.len())
            .map(|i| self.mapping[other.mapping[i]])
            .collect();
        SitePermutation::new(mapping)
    }
}

/// All m! permutations in lexicographic order of their mapping vectors.
pub fn all_permutations(m: usize) -> Vec<SitePermutation> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..m).collect();
    loop {
        out.push(SitePermutation {
            mapping: current.clone(),
        });
        // next lexicographic permutation
        let Some(i) = (0..m.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1])
        else {
            break;
        };
        let j = (i + 1..m).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    out
}

/// Apply a site permutation to a pure state. Site dims move along with
/// their contents.
pub fn apply_permutation(psi: &PureState, perm: &SitePermutation) -> Result<PureState> {
    if perm.len() != psi.num_sites() {
        return Err(Error::arg(format!(
            "permutation acts on {} sites, state has {}",
            perm.len(),
            psi.num_sites()
        )));
    }
    // reorder_sites pulls from the input: output site k holds input site
    // order[k]; under our convention that is the inverse mapping.
    let inv = perm.inverse();
    Ok(crate::linalg::reorder_sites(psi, inv.mapping()))
}

/// Project a pure state over m equal-dimension sites onto the symmetric
/// subspace. Returns the unnormalized projected vector and its squared
/// norm (the acceptance weight of a symmetrization measurement).
///
/// Computational-basis inputs take a closed-form path; everything else goes
/// through the dense isometry, and inputs too large for the dense cap are
/// refused rather than approximated.
pub fn project_sym(psi: &PureState) -> Result<(Vec<Complex64>, f64)> {
    project_sym_with_cap(psi, DEFAULT_SIZE_CAP)
}

pub fn project_sym_with_cap(psi: &PureState, cap: usize) -> Result<(Vec<Complex64>, f64)> {
    let dims = psi.dims();
    let m = dims.len();
    if m == 0 {
        return Err(Error::arg("project_sym requires at least one site"));
    }
    let d = dims[0];
    if dims.iter().any(|&x| x != d) {
        return Err(Error::arg("project_sym requires equal site dimensions"));
    }
    if m == 1 {
        return Ok((psi.amps().to_vec(), 1.0));
    }

    // Sort-and-normalize fast path for a computational basis word:
    // P|w> = (1/multinomial) * sum over words of the same type.
    let nonzero: Vec<usize> = psi
        .amps()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm_sqr() > 0.0)
        .map(|(i, _)| i)
        .collect();
    if nonzero.len() == 1 {
        let idx = nonzero[0];
        let amp_in = psi.amps()[idx];
        let word = digits(idx, dims);
        let basis = enumerate_basis_with_cap(d, m, cap)?;
        let occ = basis.type_of_word(&word);
        let count = ln_multinomial(m, &occ).exp().round();
        let coeff = amp_in / count;
        let mut out = vec![Complex64::new(0.0, 0.0); psi.dim_total()];
        scatter_orbit(&mut out, &occ, dims, coeff);
        let weight = amp_in.norm_sqr() / count;
        return Ok((out, weight));
    }

    let basis = enumerate_basis_with_cap(d, m, cap)?;
    let iso = build_isometry_with_cap(&basis, cap)?;
    let coords = iso.coords(psi.amps());
    let weight: f64 = coords.iter().map(|z| z.norm_sqr()).sum();
    Ok((iso.embed(&coords), weight))
}

/// Add `coeff` at every word whose type is `occ`.
fn scatter_orbit(out: &mut [Complex64], occ: &[u32], dims: &[usize], coeff: Complex64) {
    let m = dims.len();
    let d = dims[0];
    let mut word = Vec::with_capacity(m);
    fn rec(
        out: &mut [Complex64],
        remaining: &mut Vec<u32>,
        word: &mut Vec<usize>,
        m: usize,
        d: usize,
        coeff: Complex64,
    ) {
        if word.len() == m {
            let mut idx = 0usize;
            for &w in word.iter() {
                idx = idx * d + w;
            }
            out[idx] += coeff;
            return;
        }
        for letter in 0..d {
            if remaining[letter] > 0 {
                remaining[letter] -= 1;
                word.push(letter);
                rec(out, remaining, word, m, d, coeff);
                word.pop();
                remaining[letter] += 1;
            }
        }
    }
    let mut remaining = occ.to_vec();
    rec(out, &mut remaining, &mut word, m, d, coeff);
}

/// Reinterpret m sites of dimension d (m even) as m/2 fused pair-sites of
/// dimension d^2. Amplitudes are untouched; only the dims change.
pub fn pair_regroup(psi: &PureState) -> Result<PureState> {
    let dims = psi.dims();
    let m = dims.len();
    if m % 2 != 0 || m == 0 {
        return Err(Error::arg("pair_regroup requires an even number of sites"));
    }
    let d = dims[0];
    if dims.iter().any(|&x| x != d) {
        return Err(Error::arg("pair_regroup requires equal site dimensions"));
    }
    PureState::new(psi.amps().to_vec(), vec![d * d; m / 2])
}

/// Inverse of [`pair_regroup`]: split m/2 pair-sites of dimension d^2 back
/// into m sites of dimension d.
pub fn pair_ungroup(psi: &PureState, d: usize) -> Result<PureState> {
    let dims = psi.dims();
    if dims.iter().any(|&x| x != d * d) {
        return Err(Error::arg(
            "pair_ungroup requires pair-sites of dimension d^2",
        ));
    }
    PureState::new(psi.amps().to_vec(), vec![d; dims.len() * 2])
}
