//! Dense real third-order tensors.
//!
//! Storage is a single `Vec<f64>` in a fixed linearization order: the first
//! index runs fastest and the third slowest, so entry `(i, j, k)` (1-based)
//! lives at `data[(i-1) + n1*((j-1) + n2*(k-1))]`. Serialization, mask
//! bitmaps, and the spectral routines all depend on this order; it is part
//! of the public contract.
//!
//! All slice and fold operations copy — the public API never hands out
//! aliasing views — so a `Tensor3` behaves as an immutable value and is safe
//! to share across threads.

use crate::{Error, Result};

/// Dense real matrix used by the slice-level operations.
pub type Matrix = nalgebra::DMatrix<f64>;

/// Dense real third-order tensor of shape `n1 × n2 × n3`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n1: usize,
    n2: usize,
    n3: usize,
    data: Vec<f64>,
}

/// The three elementwise norms of a tensor, computed in one pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    /// Sum of absolute values.
    pub l1: f64,
    /// Largest absolute value.
    pub linf: f64,
    /// Square root of the sum of squares.
    pub fro: f64,
}

impl Tensor3 {
    /// All-zero tensor. Panics if any dimension is zero.
    pub fn zeros(n1: usize, n2: usize, n3: usize) -> Self {
        assert!(n1 > 0 && n2 > 0 && n3 > 0, "tensor dimensions must be positive");
        Tensor3 {
            n1,
            n2,
            n3,
            data: vec![0.0; n1 * n2 * n3],
        }
    }

    /// Builds a tensor from raw data in linearization order (first index
    /// fastest). Fails if the length is wrong or any entry is non-finite.
    pub fn from_data(n1: usize, n2: usize, n3: usize, data: Vec<f64>) -> Result<Self> {
        assert!(n1 > 0 && n2 > 0 && n3 > 0, "tensor dimensions must be positive");
        if data.len() != n1 * n2 * n3 {
            return Err(Error::DimMismatch {
                op: "from_data",
                detail: format!("{} values for a {n1}x{n2}x{n3} tensor", data.len()),
            });
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("tensor data".into()));
        }
        Ok(Tensor3 { n1, n2, n3, data })
    }

    /// Builds a tensor by evaluating `f(i, j, k)` at every 1-based index,
    /// visited in linearization order.
    pub fn from_fn<F: FnMut(usize, usize, usize) -> f64>(
        n1: usize,
        n2: usize,
        n3: usize,
        mut f: F,
    ) -> Self {
        assert!(n1 > 0 && n2 > 0 && n3 > 0, "tensor dimensions must be positive");
        let mut data = Vec::with_capacity(n1 * n2 * n3);
        for k in 1..=n3 {
            for j in 1..=n2 {
                for i in 1..=n1 {
                    data.push(f(i, j, k));
                }
            }
        }
        Tensor3 { n1, n2, n3, data }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n1, self.n2, self.n3)
    }

    /// Raw storage in linearization order.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    fn lin(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.n1 && j >= 1 && j <= self.n2 && k >= 1 && k <= self.n3);
        (i - 1) + self.n1 * ((j - 1) + self.n2 * (k - 1))
    }

    /// Entry at 1-based `(i, j, k)`. Panics out of range.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        assert!(
            i >= 1 && i <= self.n1 && j >= 1 && j <= self.n2 && k >= 1 && k <= self.n3,
            "index ({i}, {j}, {k}) out of range for {}x{}x{} tensor",
            self.n1,
            self.n2,
            self.n3,
        );
        self.data[self.lin(i, j, k)]
    }

    /// Overwrites the entry at 1-based `(i, j, k)`. Panics out of range.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        assert!(
            i >= 1 && i <= self.n1 && j >= 1 && j <= self.n2 && k >= 1 && k <= self.n3,
            "index ({i}, {j}, {k}) out of range for {}x{}x{} tensor",
            self.n1,
            self.n2,
            self.n3,
        );
        let idx = self.lin(i, j, k);
        self.data[idx] = v;
    }

    /// Copy of the `i`-th frontal slice (1-based), an `n1 × n2` matrix.
    pub fn frontal_slice(&self, i: usize) -> Result<Matrix> {
        if i < 1 || i > self.n3 {
            return Err(Error::IndexOutOfRange {
                op: "frontal_slice",
                index: i,
                bound: self.n3,
            });
        }
        let base = self.n1 * self.n2 * (i - 1);
        Ok(Matrix::from_fn(self.n1, self.n2, |r, c| {
            self.data[base + r + self.n1 * c]
        }))
    }

    /// Vertical stack of the frontal slices: an `(n1·n3) × n2` matrix with
    /// slice `k` occupying rows `(k-1)·n1 .. k·n1`.
    pub fn unfold(&self) -> Matrix {
        Matrix::from_fn(self.n1 * self.n3, self.n2, |r, c| {
            let k = r / self.n1;
            let i = r % self.n1;
            self.data[i + self.n1 * (c + self.n2 * k)]
        })
    }

    /// Inverse of [`unfold`](Self::unfold): restacks an `(n1·n3) × n2`
    /// matrix into a tensor.
    pub fn fold(m: &Matrix, dims: (usize, usize, usize)) -> Result<Self> {
        let (n1, n2, n3) = dims;
        assert!(n1 > 0 && n2 > 0 && n3 > 0, "tensor dimensions must be positive");
        if m.nrows() != n1 * n3 || m.ncols() != n2 {
            return Err(Error::DimMismatch {
                op: "fold",
                detail: format!(
                    "{}x{} matrix cannot fold into {n1}x{n2}x{n3}",
                    m.nrows(),
                    m.ncols()
                ),
            });
        }
        Ok(Tensor3::from_fn(n1, n2, n3, |i, j, k| {
            m[((k - 1) * n1 + (i - 1), j - 1)]
        }))
    }

    /// The `(n1·n3) × (n2·n3)` block-circulant expansion: block column `t`
    /// (0-based) holds the frontal slices shifted circularly downward by `t`
    /// block rows, so block `(s, t)` is slice `((s - t) mod n3) + 1`.
    pub fn bcirc(&self) -> Matrix {
        let (n1, n2, n3) = (self.n1, self.n2, self.n3);
        Matrix::from_fn(n1 * n3, n2 * n3, |r, c| {
            let (s, i) = (r / n1, r % n1);
            let (t, j) = (c / n2, c % n2);
            let k = (s + n3 - t) % n3;
            self.data[i + n1 * (j + n2 * k)]
        })
    }

    /// Sum of the frontal slices, an `n1 × n2` matrix. Under the transform
    /// convention used by [`crate::spectral`], this equals the first
    /// spectral slice exactly.
    pub fn slice_sum(&self) -> Matrix {
        let mut acc = Matrix::zeros(self.n1, self.n2);
        for k in 0..self.n3 {
            let base = self.n1 * self.n2 * k;
            for c in 0..self.n2 {
                for r in 0..self.n1 {
                    acc[(r, c)] += self.data[base + r + self.n1 * c];
                }
            }
        }
        acc
    }

    /// Euclidean inner product `Σ_ijk a_ijk · b_ijk`.
    pub fn inner(&self, other: &Tensor3) -> Result<f64> {
        if self.dims() != other.dims() {
            return Err(Error::DimMismatch {
                op: "inner",
                detail: format!("{:?} vs {:?}", self.dims(), other.dims()),
            });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .sum())
    }

    /// Sum of the traces of all frontal slices. Requires square slices.
    pub fn trace(&self) -> Result<f64> {
        if self.n1 != self.n2 {
            return Err(Error::DimMismatch {
                op: "trace",
                detail: format!("frontal slices are {}x{}, not square", self.n1, self.n2),
            });
        }
        let mut acc = 0.0;
        for k in 0..self.n3 {
            let base = self.n1 * self.n2 * k;
            for d in 0..self.n1 {
                acc += self.data[base + d + self.n1 * d];
            }
        }
        Ok(acc)
    }

    /// ℓ1, ℓ∞, and Frobenius norms in a single pass.
    pub fn norms(&self) -> Norms {
        let (mut l1, mut linf, mut sq) = (0.0f64, 0.0f64, 0.0f64);
        for &v in &self.data {
            let a = v.abs();
            l1 += a;
            if a > linf {
                linf = a;
            }
            sq += v * v;
        }
        Norms {
            l1,
            linf,
            fro: sq.sqrt(),
        }
    }

    /// Frobenius norm shorthand.
    pub fn fro_norm(&self) -> f64 {
        self.norms().fro
    }

    /// True when every entry is finite.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Elementwise `self + alpha · other`. Panics on a shape mismatch.
    pub fn add_scaled(&self, other: &Tensor3, alpha: f64) -> Tensor3 {
        assert_eq!(self.dims(), other.dims(), "add_scaled: shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + alpha * b)
            .collect();
        Tensor3 {
            n1: self.n1,
            n2: self.n2,
            n3: self.n3,
            data,
        }
    }

    /// Elementwise scaling by a constant.
    pub fn scale(&self, alpha: f64) -> Tensor3 {
        Tensor3 {
            n1: self.n1,
            n2: self.n2,
            n3: self.n3,
            data: self.data.iter().map(|v| alpha * v).collect(),
        }
    }
}

impl std::ops::Add for &Tensor3 {
    type Output = Tensor3;
    fn add(self, rhs: &Tensor3) -> Tensor3 {
        self.add_scaled(rhs, 1.0)
    }
}

impl std::ops::Sub for &Tensor3 {
    type Output = Tensor3;
    fn sub(self, rhs: &Tensor3) -> Tensor3 {
        self.add_scaled(rhs, -1.0)
    }
}
