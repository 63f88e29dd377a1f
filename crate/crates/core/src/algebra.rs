//! The t-product algebra over third-order tensors.
//!
//! The tensor product is the block-circulant product `fold(bcirc(a) ·
//! unfold(b))`, but it is never computed that way here: the block-circulant
//! matrix is diagonalized by the mode-3 DFT, so the product reduces to
//! independent matrix products per spectral slice. The same trick drives
//! the t-SVD (one matrix SVD per slice) and the singular-value shrinkage
//! operator. Real input makes the spectrum conjugate-symmetric, so all
//! per-slice work runs on the first `n3/2 + 1` slices and the rest are
//! mirrored.
//!
//! The tensor nuclear norm used throughout is the trace of the f-diagonal
//! t-SVD factor, which equals the matrix nuclear norm of the sum of frontal
//! slices. Note this is a seminorm: it vanishes on nonzero tensors whose
//! frontal slices cancel. The truncated variant drops the `r` largest
//! singular values from that sum.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::spectral::{
    dft_mode3, idft_mode3, is_self_mirrored, mirror_half, retained_slice_count, CMatrix,
    SpectralTensor,
};
use crate::tensor::{Matrix, Tensor3};
use crate::{Error, Result};

/// Iteration cap handed to the iterative SVD; generous enough that hitting
/// it means the slice is genuinely pathological.
const SVD_MAX_ITER: usize = 10_000;

/// The t-SVD factor triple `a = u ∗ s ∗ vᵀ`: `u` is `n1×n1×n3`, `v` is
/// `n2×n2×n3`, both orthogonal, and `s` is `n1×n2×n3` f-diagonal (every
/// frontal slice diagonal) with real, nonnegative, descending diagonals in
/// each spectral slice.
#[derive(Debug, Clone)]
pub struct TSvdFactors {
    pub u: Tensor3,
    pub s: Tensor3,
    pub v: Tensor3,
    /// Per-slice singular values of the retained spectral half, each list
    /// descending. Mirrored slices share the values of their partners.
    sv: Vec<Vec<f64>>,
}

impl TSvdFactors {
    /// Singular values of the retained spectral slices (the first
    /// `n3/2 + 1`), one descending list per slice.
    pub fn spectral_singular_values(&self) -> &[Vec<f64>] {
        &self.sv
    }
}

/// Identity tensor: slice 1 is the `n × n` identity, slices 2..n3 are zero.
/// It is the unit of the tensor product.
pub fn identity_tensor(n: usize, n3: usize) -> Tensor3 {
    Tensor3::from_fn(n, n, n3, |i, j, k| if k == 1 && i == j { 1.0 } else { 0.0 })
}

/// Tensor transpose: slice 1 is transposed in place, and slice `k ≥ 2` of
/// the result is the transpose of slice `n3 + 2 - k` of the input. With
/// this ordering `(a ∗ b)ᵀ = bᵀ ∗ aᵀ`, exactly as for matrices.
pub fn conj_transpose(a: &Tensor3) -> Tensor3 {
    let (n1, n2, n3) = a.dims();
    Tensor3::from_fn(n2, n1, n3, |i, j, k| {
        let src = if k == 1 { 1 } else { n3 + 2 - k };
        a.get(j, i, src)
    })
}

/// Tensor product of `a` (`n1×n2×n3`) and `b` (`n2×n4×n3`), computed as
/// per-slice matrix products in the spectral domain.
pub fn t_product(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    let (_, n2a, n3a) = a.dims();
    let (n1b, _, n3b) = b.dims();
    if n2a != n1b || n3a != n3b {
        return Err(Error::DimMismatch {
            op: "t_product",
            detail: format!("{:?} ∗ {:?}", a.dims(), b.dims()),
        });
    }
    let sa = dft_mode3(a);
    let sb = dft_mode3(b);
    let retained = retained_slice_count(n3a);
    let mut half = Vec::with_capacity(retained);
    for k in 0..retained {
        half.push(&sa.slices()[k] * &sb.slices()[k]);
    }
    idft_mode3(&SpectralTensor::from_slices(mirror_half(half, n3a)))
}

/// True when `q ∗ qᵀ` and `qᵀ ∗ q` both deviate from the identity tensor
/// by at most `tol` in Frobenius norm. Requires square frontal slices.
pub fn is_orthogonal(q: &Tensor3, tol: f64) -> Result<bool> {
    let (n1, n2, n3) = q.dims();
    if n1 != n2 {
        return Err(Error::DimMismatch {
            op: "is_orthogonal",
            detail: format!("frontal slices are {n1}x{n2}, not square"),
        });
    }
    let qt = conj_transpose(q);
    let id = identity_tensor(n1, n3);
    let d1 = (&t_product(q, &qt)? - &id).fro_norm();
    let d2 = (&t_product(&qt, q)? - &id).fro_norm();
    Ok(d1 <= tol && d2 <= tol)
}

/// Frobenius mass of everything off the frontal-slice diagonals; zero for
/// an exactly f-diagonal tensor.
pub fn off_fdiagonal_mass(t: &Tensor3) -> f64 {
    let (n1, n2, n3) = t.dims();
    let mut acc = 0.0;
    for k in 1..=n3 {
        for j in 1..=n2 {
            for i in 1..=n1 {
                if i != j {
                    let v = t.get(i, j, k);
                    acc += v * v;
                }
            }
        }
    }
    acc.sqrt()
}

/// Embeds a real matrix into the complex slice type.
fn embed(m: &Matrix) -> CMatrix {
    m.map(|v| Complex64::new(v, 0.0))
}

/// Extends a matrix with orthonormal columns to a full unitary basis.
///
/// Candidates are standard basis vectors; each round picks the one with the
/// largest residual against the current columns (first index wins ties, so
/// the completion is deterministic), then orthonormalizes it with two
/// passes of modified Gram–Schmidt. Real input yields real output.
fn complete_unitary(thin: &CMatrix) -> CMatrix {
    let n = thin.nrows();
    let t = thin.ncols();
    debug_assert!(t <= n);
    if t == n {
        return thin.clone();
    }
    // residual² of candidate e_i is 1 − Σ_c |q_c[i]|², maintained incrementally
    let mut residual: Vec<f64> = (0..n)
        .map(|i| 1.0 - (0..t).map(|c| thin[(i, c)].norm_sqr()).sum::<f64>())
        .collect();
    let mut cols: Vec<DVector<Complex64>> =
        thin.column_iter().map(|c| c.into_owned()).collect();
    while cols.len() < n {
        let mut best = 0;
        let mut best_r = f64::NEG_INFINITY;
        for (i, &r) in residual.iter().enumerate() {
            if r > best_r {
                best_r = r;
                best = i;
            }
        }
        let mut v: DVector<Complex64> = DVector::zeros(n);
        v[best] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for c in &cols {
                let alpha = c.dotc(&v);
                v.axpy(-alpha, c, Complex64::new(1.0, 0.0));
            }
        }
        let nrm = v.norm();
        v.unscale_mut(nrm);
        residual[best] = f64::NEG_INFINITY;
        for (i, r) in residual.iter_mut().enumerate() {
            if *r != f64::NEG_INFINITY {
                *r -= v[i].norm_sqr();
            }
        }
        cols.push(v);
    }
    CMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Full SVD of one spectral slice: square unitary factors plus descending
/// singular values. `slice_1b` is only used for error reporting.
fn full_slice_svd(m: CMatrix, real: bool, slice_1b: usize) -> Result<(CMatrix, Vec<f64>, CMatrix)> {
    let fail = || Error::SvdFailure { slice: slice_1b };
    if real {
        // Self-mirrored slices are real up to round-off; running the real
        // SVD keeps their factors exactly real, which the inverse transform
        // depends on.
        let mr: Matrix = m.map(|z| z.re);
        let svd = mr
            .try_svd(true, true, f64::EPSILON, SVD_MAX_ITER)
            .ok_or_else(fail)?;
        let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        let u = complete_unitary(&embed(&svd.u.expect("u requested")));
        let v = complete_unitary(&embed(&svd.v_t.expect("v requested").transpose()));
        Ok((u, sv, v))
    } else {
        let svd = m
            .try_svd(true, true, f64::EPSILON, SVD_MAX_ITER)
            .ok_or_else(fail)?;
        let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        let u = complete_unitary(&svd.u.expect("u requested"));
        let v = complete_unitary(&svd.v_t.expect("v requested").adjoint());
        Ok((u, sv, v))
    }
}

/// t-SVD by one full matrix SVD per retained spectral slice, mirrored to
/// the remaining slices and transformed back.
pub fn t_svd(a: &Tensor3) -> Result<TSvdFactors> {
    let (n1, n2, n3) = a.dims();
    let spectral = dft_mode3(a);
    let retained = retained_slice_count(n3);
    let mut u_half = Vec::with_capacity(retained);
    let mut s_half = Vec::with_capacity(retained);
    let mut v_half = Vec::with_capacity(retained);
    let mut sv_all = Vec::with_capacity(retained);
    for k in 0..retained {
        let (u, sv, v) = full_slice_svd(
            spectral.slices()[k].clone(),
            is_self_mirrored(k, n3),
            k + 1,
        )?;
        debug_assert!(sv.windows(2).all(|w| w[0] >= w[1]), "singular values not sorted");
        let mut s = CMatrix::zeros(n1, n2);
        for (d, &val) in sv.iter().enumerate() {
            s[(d, d)] = Complex64::new(val, 0.0);
        }
        u_half.push(u);
        s_half.push(s);
        v_half.push(v);
        sv_all.push(sv);
    }
    let u = idft_mode3(&SpectralTensor::from_slices(mirror_half(u_half, n3)))?;
    let s = idft_mode3(&SpectralTensor::from_slices(mirror_half(s_half, n3)))?;
    let v = idft_mode3(&SpectralTensor::from_slices(mirror_half(v_half, n3)))?;
    Ok(TSvdFactors { u, s, v, sv: sv_all })
}

/// Tubal rank: the largest per-slice count of spectral singular values
/// exceeding `tol · σ_max`, where `σ_max` is the largest singular value
/// over all slices. Values below `1e-12 · σ_max` always count as zero.
pub fn tubal_rank(f: &TSvdFactors, tol: f64) -> usize {
    let sigma_max = f
        .sv
        .iter()
        .filter_map(|s| s.first().copied())
        .fold(0.0f64, f64::max);
    if sigma_max <= 0.0 {
        return 0;
    }
    let thr = tol.max(1e-12) * sigma_max;
    f.sv
        .iter()
        .map(|s| s.iter().filter(|&&x| x > thr).count())
        .max()
        .unwrap_or(0)
}

/// Singular values of the slice sum, descending.
fn slice_sum_singular_values(a: &Tensor3) -> Result<Vec<f64>> {
    let svd = a
        .slice_sum()
        .try_svd(false, false, f64::EPSILON, SVD_MAX_ITER)
        .ok_or(Error::SvdFailure { slice: 1 })?;
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_unstable_by(|x, y| y.partial_cmp(x).expect("singular values are finite"));
    Ok(sv)
}

/// Tensor nuclear norm: the trace of the f-diagonal t-SVD factor, computed
/// by one matrix SVD of the slice sum.
///
/// Panics only if that SVD fails to converge, which has not been observed
/// on finite input.
pub fn tensor_nuclear_norm(a: &Tensor3) -> f64 {
    truncated_norm(a, 0).expect("r = 0 is always in range")
}

/// Truncated tensor nuclear norm: the sum of all but the `r` largest
/// singular values of the slice sum. `r = 0` gives the full nuclear norm;
/// `r = min(n1, n2)` gives zero.
pub fn truncated_norm(a: &Tensor3, r: usize) -> Result<f64> {
    let (n1, n2, _) = a.dims();
    let min = n1.min(n2);
    if r > min {
        return Err(Error::RankOutOfRange {
            op: "truncated_norm",
            r,
            min: 0,
            max: min,
        });
    }
    let sv = slice_sum_singular_values(a)?;
    Ok(sv[r..].iter().sum())
}

/// The truncation operators for the solver: `a = uᵀ` restricted to the
/// first `r` lateral columns of `u`, and likewise `b` from `v`, giving
/// `r×n1×n3` and `r×n2×n3` tensors with orthonormal rows
/// (`a ∗ aᵀ = b ∗ bᵀ = identity of size r`).
pub fn truncation_factors(f: &TSvdFactors, r: usize) -> Result<(Tensor3, Tensor3)> {
    let (n1, _, n3) = f.u.dims();
    let (n2, _, _) = f.v.dims();
    let min = n1.min(n2);
    if r < 1 || r > min {
        return Err(Error::RankOutOfRange {
            op: "truncation_factors",
            r,
            min: 1,
            max: min,
        });
    }
    let u_r = Tensor3::from_fn(n1, r, n3, |i, j, k| f.u.get(i, j, k));
    let v_r = Tensor3::from_fn(n2, r, n3, |i, j, k| f.v.get(i, j, k));
    Ok((conj_transpose(&u_r), conj_transpose(&v_r)))
}

/// Singular-value shrinkage: every spectral slice's singular values are
/// reduced by `tau` and clipped at zero, the slices are rebuilt from their
/// SVD factors, and the result is transformed back. `tau = 0` reproduces
/// the input up to round-off; `tau` at or above the largest spectral
/// singular value yields the zero tensor.
pub fn t_svt(x: &Tensor3, tau: f64) -> Result<Tensor3> {
    assert!(
        tau >= 0.0 && tau.is_finite(),
        "shrinkage threshold must be finite and nonnegative"
    );
    let (n1, n2, n3) = x.dims();
    let spectral = dft_mode3(x);
    let retained = retained_slice_count(n3);
    let mut half = Vec::with_capacity(retained);
    for k in 0..retained {
        let rebuilt = if is_self_mirrored(k, n3) {
            let mr: Matrix = spectral.slices()[k].map(|z| z.re);
            let svd = mr
                .try_svd(true, true, f64::EPSILON, SVD_MAX_ITER)
                .ok_or(Error::SvdFailure { slice: k + 1 })?;
            let sv = svd.singular_values;
            let keep = sv.iter().take_while(|&&s| s > tau).count();
            if keep == 0 {
                CMatrix::zeros(n1, n2)
            } else {
                let u = svd.u.expect("u requested");
                let vt = svd.v_t.expect("v requested");
                let mut shrunk = vt.rows(0, keep).into_owned();
                for d in 0..keep {
                    shrunk.row_mut(d).scale_mut(sv[d] - tau);
                }
                embed(&(u.columns(0, keep) * shrunk))
            }
        } else {
            let svd = spectral.slices()[k]
                .clone()
                .try_svd(true, true, f64::EPSILON, SVD_MAX_ITER)
                .ok_or(Error::SvdFailure { slice: k + 1 })?;
            let sv = svd.singular_values;
            let keep = sv.iter().take_while(|&&s| s > tau).count();
            if keep == 0 {
                CMatrix::zeros(n1, n2)
            } else {
                let u = svd.u.expect("u requested");
                let vt = svd.v_t.expect("v requested");
                let mut shrunk = vt.rows(0, keep).into_owned();
                for d in 0..keep {
                    shrunk.row_mut(d).scale_mut(sv[d] - tau);
                }
                u.columns(0, keep) * shrunk
            }
        };
        half.push(rebuilt);
    }
    idft_mode3(&SpectralTensor::from_slices(mirror_half(half, n3)))
}
