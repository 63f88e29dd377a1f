//! Mode-3 DFT of a real third-order tensor.
//!
//! Conventions, fixed once for the whole crate: the forward transform of a
//! tube is the unnormalized DFT with root `w = exp(-2πi/n3)`, and the
//! inverse carries the full `1/n3` factor. Consequently the first spectral
//! slice is exactly the sum of the frontal slices, which the nuclear-norm
//! fast paths in [`crate::algebra`] rely on.
//!
//! For real input the spectrum is conjugate-symmetric along the third mode:
//! slice `k` (0-based) is the conjugate of slice `n3 - k`. Only the first
//! `n3/2 + 1` slices carry independent information; per-slice work elsewhere
//! in the crate runs on that retained half and mirrors the rest.
//!
//! Tube length `n3` is arbitrary — the transform backend handles any length
//! (mixed-radix with a Bluestein fallback), so frame counts like 40 or
//! channel counts like 3 need no padding.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::tensor::Tensor3;
use crate::{Error, Result};

/// Dense complex matrix holding one spectral slice.
pub type CMatrix = nalgebra::DMatrix<Complex64>;

/// Complex mode-3 spectrum of a tensor: `n3` slices of shape `n1 × n2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTensor {
    n1: usize,
    n2: usize,
    n3: usize,
    slices: Vec<CMatrix>,
}

impl SpectralTensor {
    /// Assembles a spectrum from per-slice matrices. Panics if the slice
    /// count is zero or the shapes are inconsistent.
    pub fn from_slices(slices: Vec<CMatrix>) -> Self {
        assert!(!slices.is_empty(), "a spectrum needs at least one slice");
        let (n1, n2) = (slices[0].nrows(), slices[0].ncols());
        assert!(n1 > 0 && n2 > 0, "spectral slices must be non-empty");
        assert!(
            slices.iter().all(|s| s.nrows() == n1 && s.ncols() == n2),
            "spectral slices must share one shape"
        );
        let n3 = slices.len();
        SpectralTensor { n1, n2, n3, slices }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n1, self.n2, self.n3)
    }

    /// The `k`-th spectral slice, 1-based.
    pub fn slice(&self, k: usize) -> &CMatrix {
        assert!(k >= 1 && k <= self.n3, "spectral slice {k} out of range 1..={}", self.n3);
        &self.slices[k - 1]
    }

    /// All slices in order (0-based access for internal loops).
    pub fn slices(&self) -> &[CMatrix] {
        &self.slices
    }

    /// Frobenius norm over all complex entries.
    pub fn fro_norm(&self) -> f64 {
        self.slices
            .iter()
            .map(|s| s.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    /// Checks the real-input symmetry `slice(k) = conj(slice(n3 - k + 2))`
    /// (1-based, k ≥ 2) within an absolute entrywise tolerance.
    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        for k in 1..self.n3 {
            let a = &self.slices[k];
            let b = &self.slices[self.n3 - k];
            let max_dev = a
                .iter()
                .zip(b.iter())
                .map(|(x, y)| (x - y.conj()).norm())
                .fold(0.0f64, f64::max);
            if max_dev > tol {
                return false;
            }
        }
        true
    }
}

/// Number of leading spectral slices that determine the rest of a
/// real-input spectrum: `n3/2 + 1`.
pub fn retained_slice_count(n3: usize) -> usize {
    n3 / 2 + 1
}

/// True when 0-based slice `k` is its own mirror (`k = 0`, or `k = n3/2`
/// for even `n3`). Such slices are real up to round-off.
pub(crate) fn is_self_mirrored(k: usize, n3: usize) -> bool {
    k == 0 || (n3 % 2 == 0 && k == n3 / 2)
}

/// Extends per-slice results computed on the retained half to all `n3`
/// slices by mirroring: slice `n3 - k` is the conjugate of slice `k`.
pub(crate) fn mirror_half(half: Vec<CMatrix>, n3: usize) -> Vec<CMatrix> {
    assert_eq!(half.len(), retained_slice_count(n3));
    let mut all = half;
    for k in (retained_slice_count(n3))..n3 {
        let src = &all[n3 - k];
        all.push(src.map(|z| z.conj()));
    }
    all
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(n)
        } else {
            p.plan_fft_inverse(n)
        }
    })
}

/// Forward mode-3 DFT: every tube `t ↦ x(i, j, t)` is transformed with the
/// unnormalized DFT, so the first output slice is the sum of the input's
/// frontal slices.
pub fn dft_mode3(t: &Tensor3) -> SpectralTensor {
    let (n1, n2, n3) = t.dims();
    let fft = plan(n3, true);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut slices = vec![CMatrix::zeros(n1, n2); n3];
    let data = t.data();
    let mut tube = vec![Complex64::default(); n3];
    let stride = n1 * n2;
    for j in 0..n2 {
        for i in 0..n1 {
            let base = i + n1 * j;
            for (k, slot) in tube.iter_mut().enumerate() {
                *slot = Complex64::new(data[base + stride * k], 0.0);
            }
            fft.process_with_scratch(&mut tube, &mut scratch);
            for (k, v) in tube.iter().enumerate() {
                slices[k][(i, j)] = *v;
            }
        }
    }
    SpectralTensor { n1, n2, n3, slices }
}

/// Inverse mode-3 DFT with `1/n3` normalization. The result must be real:
/// if any entry's imaginary part exceeds `1e-8 · max(1, ‖s‖_F)` the input
/// was not conjugate-symmetric and an error is returned instead of silently
/// truncating.
pub fn idft_mode3(s: &SpectralTensor) -> Result<Tensor3> {
    let (n1, n2, n3) = s.dims();
    let fft = plan(n3, false);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut data = vec![0.0f64; n1 * n2 * n3];
    let mut tube = vec![Complex64::default(); n3];
    let stride = n1 * n2;
    let scale = 1.0 / n3 as f64;
    let mut residue = 0.0f64;
    for j in 0..n2 {
        for i in 0..n1 {
            for (k, slot) in tube.iter_mut().enumerate() {
                *slot = s.slices[k][(i, j)];
            }
            fft.process_with_scratch(&mut tube, &mut scratch);
            let base = i + n1 * j;
            for (k, v) in tube.iter().enumerate() {
                let z = v * scale;
                let im = z.im.abs();
                if im > residue {
                    residue = im;
                }
                data[base + stride * k] = z.re;
            }
        }
    }
    let tolerance = 1e-8 * s.fro_norm().max(1.0);
    if residue > tolerance {
        return Err(Error::ImaginaryResidue { residue, tolerance });
    }
    Tensor3::from_data(n1, n2, n3, data)
}

/// Block-diagonal view of the spectrum: an `(n1·n3) × (n2·n3)` complex
/// matrix with the spectral slices on the diagonal in order.
pub fn bdiag(s: &SpectralTensor) -> CMatrix {
    let (n1, n2, n3) = s.dims();
    let mut m = CMatrix::zeros(n1 * n3, n2 * n3);
    for k in 0..n3 {
        for j in 0..n2 {
            for i in 0..n1 {
                m[(k * n1 + i, k * n2 + j)] = s.slices[k][(i, j)];
            }
        }
    }
    m
}
