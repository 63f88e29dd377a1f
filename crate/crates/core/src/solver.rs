//! Tensor completion by truncated-nuclear-norm minimization.
//!
//! The main solver alternates two levels. The outer loop takes the t-SVD of
//! the current iterate and freezes the truncation operators `a`, `b` built
//! from its leading singular tubes; the inner loop then solves the
//! resulting subproblem with a three-step ADMM:
//!
//! 1. `x ← shrink(w − y/μ, 1/μ)` — singular-value shrinkage per spectral
//!    slice;
//! 2. `w ← x + (aᵀ ∗ b + y)/μ`, then the observed entries of `w` are
//!    overwritten with the data (so `w` is always exactly feasible);
//! 3. `y ← y + μ(x − w)` — dual ascent.
//!
//! The outer loop stops when consecutive iterates move less than
//! `outer_eps` in Frobenius norm, or after `outer_max` rounds; the inner
//! loop stops on the primal residual `‖x − w‖_F ≤ inner_eps · max(1, ‖m‖_F)`
//! or after `inner_max` steps. The returned tensor is the final `w`, which
//! matches the observed data bitwise.
//!
//! The baseline solver minimizes the plain tensor nuclear norm: the same
//! ADMM with the coupling term `aᵀ ∗ b` replaced by zero.
//!
//! Missing entries of the initial iterate are zero-filled; the solver never
//! reads the input tensor outside the observed set.

use crate::algebra::{conj_transpose, t_product, t_svd, t_svt, truncated_norm, truncation_factors};
use crate::tensor::Tensor3;
use crate::{Error, Result};

/// The set of observed positions Ω, stored as a dense bitmap in the
/// tensor linearization order (`true` = observed).
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationMask {
    n1: usize,
    n2: usize,
    n3: usize,
    observed: Vec<bool>,
    count: usize,
}

impl ObservationMask {
    /// Builds a mask from a bitmap in linearization order. At least one
    /// entry must be observed.
    pub fn from_bitmap(dims: (usize, usize, usize), observed: Vec<bool>) -> Result<Self> {
        let (n1, n2, n3) = dims;
        assert!(n1 > 0 && n2 > 0 && n3 > 0, "mask dimensions must be positive");
        if observed.len() != n1 * n2 * n3 {
            return Err(Error::InvalidMask(format!(
                "bitmap has {} entries for a {n1}x{n2}x{n3} tensor",
                observed.len()
            )));
        }
        let count = observed.iter().filter(|&&b| b).count();
        if count == 0 {
            return Err(Error::InvalidMask("no entry is observed".into()));
        }
        Ok(ObservationMask {
            n1,
            n2,
            n3,
            observed,
            count,
        })
    }

    /// Builds a mask from a list of observed 1-based `(i, j, k)` indices.
    /// Indices must be in bounds and free of duplicates.
    pub fn from_indices(dims: (usize, usize, usize), indices: &[(usize, usize, usize)]) -> Result<Self> {
        let (n1, n2, n3) = dims;
        assert!(n1 > 0 && n2 > 0 && n3 > 0, "mask dimensions must be positive");
        let mut observed = vec![false; n1 * n2 * n3];
        for &(i, j, k) in indices {
            if i < 1 || i > n1 || j < 1 || j > n2 || k < 1 || k > n3 {
                return Err(Error::InvalidMask(format!(
                    "index ({i}, {j}, {k}) out of range for {n1}x{n2}x{n3}"
                )));
            }
            let lin = (i - 1) + n1 * ((j - 1) + n2 * (k - 1));
            if observed[lin] {
                return Err(Error::InvalidMask(format!("duplicate index ({i}, {j}, {k})")));
            }
            observed[lin] = true;
        }
        if indices.is_empty() {
            return Err(Error::InvalidMask("no entry is observed".into()));
        }
        Ok(ObservationMask {
            n1,
            n2,
            n3,
            observed,
            count: indices.len(),
        })
    }

    /// Mask observing every entry.
    pub fn full(dims: (usize, usize, usize)) -> Self {
        let (n1, n2, n3) = dims;
        assert!(n1 > 0 && n2 > 0 && n3 > 0, "mask dimensions must be positive");
        ObservationMask {
            n1,
            n2,
            n3,
            observed: vec![true; n1 * n2 * n3],
            count: n1 * n2 * n3,
        }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n1, self.n2, self.n3)
    }

    /// Number of observed entries |Ω|.
    pub fn observed_count(&self) -> usize {
        self.count
    }

    /// Number of missing entries |Ω^c|.
    pub fn missing_count(&self) -> usize {
        self.observed.len() - self.count
    }

    /// Whether the 1-based `(i, j, k)` entry is observed.
    pub fn is_observed(&self, i: usize, j: usize, k: usize) -> bool {
        assert!(
            i >= 1 && i <= self.n1 && j >= 1 && j <= self.n2 && k >= 1 && k <= self.n3,
            "index ({i}, {j}, {k}) out of range for {}x{}x{} mask",
            self.n1,
            self.n2,
            self.n3,
        );
        self.observed[(i - 1) + self.n1 * ((j - 1) + self.n2 * (k - 1))]
    }

    /// The raw bitmap in linearization order.
    pub fn bitmap(&self) -> &[bool] {
        &self.observed
    }

    /// Copy of `m` with every missing entry set to zero.
    pub fn zero_fill(&self, m: &Tensor3) -> Result<Tensor3> {
        if m.dims() != self.dims() {
            return Err(Error::DimMismatch {
                op: "zero_fill",
                detail: format!("tensor {:?} vs mask {:?}", m.dims(), self.dims()),
            });
        }
        let data = m
            .data()
            .iter()
            .zip(&self.observed)
            .map(|(&v, &obs)| if obs { v } else { 0.0 })
            .collect();
        Tensor3::from_data(self.n1, self.n2, self.n3, data)
    }

    /// Overwrites the observed entries of `target` with those of `source`
    /// (a bitwise copy). Panics on a shape mismatch.
    pub fn overwrite_observed(&self, target: &mut Tensor3, source: &Tensor3) {
        assert_eq!(target.dims(), self.dims(), "overwrite_observed: shape mismatch");
        assert_eq!(source.dims(), self.dims(), "overwrite_observed: shape mismatch");
        let src = source.data();
        let dst = target.data_mut();
        for (idx, &obs) in self.observed.iter().enumerate() {
            if obs {
                dst[idx] = src[idx];
            }
        }
    }
}

/// Solver parameters. The defaults are the recommended operating point:
/// fixed penalty `mu = 5e-4`, outer tolerance `1e-3` with at most 50
/// rounds, inner tolerance `1e-4` with at most 200 steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Number of leading singular values excluded from the penalty. Must be
    /// in `1..=min(n1, n2)`. Ignored by the baseline solver.
    pub r: usize,
    /// ADMM penalty, fixed for the whole run.
    pub mu: f64,
    /// Outer stop: `‖x_next − x‖_F ≤ outer_eps`.
    pub outer_eps: f64,
    /// Outer iteration cap.
    pub outer_max: usize,
    /// Inner stop: `‖x − w‖_F ≤ inner_eps · max(1, ‖m‖_F)`.
    pub inner_eps: f64,
    /// Inner iteration cap per outer round.
    pub inner_max: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            r: 1,
            mu: 5e-4,
            outer_eps: 1e-3,
            outer_max: 50,
            inner_eps: 1e-4,
            inner_max: 200,
        }
    }
}

impl SolverConfig {
    /// Checks every field against the tensor dimensions. `check_r` is off
    /// for the baseline, which ignores the truncation count.
    fn validate(&self, dims: (usize, usize, usize), check_r: bool) -> Result<()> {
        let (n1, n2, _) = dims;
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidConfig(format!("mu = {} must be positive", self.mu)));
        }
        if !(self.outer_eps > 0.0 && self.outer_eps.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "outer_eps = {} must be positive",
                self.outer_eps
            )));
        }
        if !(self.inner_eps > 0.0 && self.inner_eps.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "inner_eps = {} must be positive",
                self.inner_eps
            )));
        }
        if self.outer_max == 0 || self.inner_max == 0 {
            return Err(Error::InvalidConfig(
                "iteration caps must be at least 1".into(),
            ));
        }
        if check_r && (self.r < 1 || self.r > n1.min(n2)) {
            return Err(Error::InvalidConfig(format!(
                "r = {} out of range 1..={}",
                self.r,
                n1.min(n2)
            )));
        }
        Ok(())
    }
}

/// Which completion objective a report came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Truncated tensor nuclear norm (the two-level solver).
    Ttnn,
    /// Plain tensor nuclear norm baseline.
    TubalNn,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Ttnn => "ttnn",
            Method::TubalNn => "tubal",
        })
    }
}

/// Everything a completion run produced: the recovered tensor, iteration
/// counts, and per-iteration histories. `recovered` matches the observed
/// entries of the input bitwise.
#[derive(Debug, Clone)]
pub struct SolverReport {
    pub method: Method,
    pub config: SolverConfig,
    /// Number of outer rounds executed (≤ `config.outer_max`).
    pub outer_iterations: usize,
    /// Inner ADMM steps summed over all outer rounds.
    pub total_inner_iterations: usize,
    /// `‖x_next − x‖_F` per outer round.
    pub outer_residuals: Vec<f64>,
    /// `‖x − w‖_F` per inner step, concatenated across outer rounds.
    pub inner_residuals: Vec<f64>,
    /// Truncated-norm objective of each outer iterate (full nuclear norm
    /// for the baseline). Recorded, not asserted monotone: the alternation
    /// only reaches a local minimum.
    pub objective_history: Vec<f64>,
    /// True when the outer loop met `outer_eps` before exhausting
    /// `outer_max`. Hitting the cap is a normal exit, not an error.
    pub converged: bool,
    pub recovered: Tensor3,
}

/// Completion with the truncated nuclear norm: outer t-SVD refresh, inner
/// ADMM. See the module docs for the exact iteration.
pub fn ttnn_complete(m: &Tensor3, mask: &ObservationMask, cfg: &SolverConfig) -> Result<SolverReport> {
    run_completion(m, mask, cfg, Method::Ttnn)
}

/// Baseline completion with the plain tensor nuclear norm: the identical
/// ADMM with the coupling term zeroed. `cfg.r` is ignored.
pub fn tubal_nn_complete(
    m: &Tensor3,
    mask: &ObservationMask,
    cfg: &SolverConfig,
) -> Result<SolverReport> {
    run_completion(m, mask, cfg, Method::TubalNn)
}

fn run_completion(
    m: &Tensor3,
    mask: &ObservationMask,
    cfg: &SolverConfig,
    method: Method,
) -> Result<SolverReport> {
    if m.dims() != mask.dims() {
        return Err(Error::DimMismatch {
            op: "complete",
            detail: format!("tensor {:?} vs mask {:?}", m.dims(), mask.dims()),
        });
    }
    cfg.validate(m.dims(), method == Method::Ttnn)?;
    if !m.is_finite() {
        return Err(Error::NonFinite("input tensor".into()));
    }

    let (n1, n2, n3) = m.dims();
    let m_obs = mask.zero_fill(m)?;
    let objective_r = match method {
        Method::Ttnn => cfg.r,
        Method::TubalNn => 0,
    };

    let mut x = m_obs.clone();
    let mut outer_residuals = Vec::new();
    let mut inner_residuals = Vec::new();
    let mut objective_history = Vec::new();
    let mut total_inner = 0;
    let mut converged = false;

    for outer in 1..=cfg.outer_max {
        let coupling = match method {
            Method::Ttnn => {
                let f = t_svd(&x)?;
                let (a, b) = truncation_factors(&f, cfg.r)?;
                #[cfg(debug_assertions)]
                {
                    use crate::algebra::identity_tensor;
                    let idr = identity_tensor(cfg.r, n3);
                    let da = (&t_product(&a, &conj_transpose(&a))? - &idr).fro_norm();
                    let db = (&t_product(&b, &conj_transpose(&b))? - &idr).fro_norm();
                    debug_assert!(
                        da <= 1e-8 * (cfg.r as f64).sqrt().max(1.0)
                            && db <= 1e-8 * (cfg.r as f64).sqrt().max(1.0),
                        "truncation operators lost orthonormality: {da:.2e}, {db:.2e}"
                    );
                }
                t_product(&conj_transpose(&a), &b)?
            }
            Method::TubalNn => Tensor3::zeros(n1, n2, n3),
        };

        let (w, steps, residuals) = admm_iterations(&m_obs, mask, &coupling, &x, cfg, outer)?;
        let outer_residual = (&w - &x).fro_norm();
        let objective = truncated_norm(&w, objective_r)?;
        log::info!(
            "{method} outer {outer}: residual {outer_residual:.3e}, objective {objective:.6e}, {steps} inner steps"
        );

        x = w;
        total_inner += steps;
        inner_residuals.extend(residuals);
        outer_residuals.push(outer_residual);
        objective_history.push(objective);

        if outer_residual <= cfg.outer_eps {
            converged = true;
            break;
        }
    }

    Ok(SolverReport {
        method,
        config: *cfg,
        outer_iterations: outer_residuals.len(),
        total_inner_iterations: total_inner,
        outer_residuals,
        inner_residuals,
        objective_history,
        converged,
        recovered: x,
    })
}

/// One inner ADMM solve with explicit truncation operators `a` (`r×n1×n3`)
/// and `b` (`r×n2×n3`), started from `x0`. Returns the recovered tensor
/// (the final `w`, exactly feasible on Ω) and the number of steps taken.
///
/// The coupling tensor `aᵀ ∗ b` is formed once up front; the per-step work
/// is one shrinkage plus elementwise updates.
pub fn admm_inner(
    m: &Tensor3,
    mask: &ObservationMask,
    a: &Tensor3,
    b: &Tensor3,
    x0: &Tensor3,
    cfg: &SolverConfig,
) -> Result<(Tensor3, usize)> {
    let (n1, n2, n3) = m.dims();
    let (ra, an1, an3) = a.dims();
    let (rb, bn2, bn3) = b.dims();
    if m.dims() != mask.dims()
        || x0.dims() != m.dims()
        || ra != rb
        || an1 != n1
        || bn2 != n2
        || an3 != n3
        || bn3 != n3
    {
        return Err(Error::DimMismatch {
            op: "admm_inner",
            detail: format!(
                "m {:?}, a {:?}, b {:?}, x0 {:?}",
                m.dims(),
                a.dims(),
                b.dims(),
                x0.dims()
            ),
        });
    }
    cfg.validate(m.dims(), false)?;
    let m_obs = mask.zero_fill(m)?;
    let coupling = t_product(&conj_transpose(a), b)?;
    let (w, steps, _) = admm_iterations(&m_obs, mask, &coupling, x0, cfg, 0)?;
    Ok((w, steps))
}

/// The three-step iteration shared by both solvers. `m_obs` must already be
/// zero-filled; `coupling` is `aᵀ ∗ b` (or zero for the baseline).
fn admm_iterations(
    m_obs: &Tensor3,
    mask: &ObservationMask,
    coupling: &Tensor3,
    x0: &Tensor3,
    cfg: &SolverConfig,
    outer: usize,
) -> Result<(Tensor3, usize, Vec<f64>)> {
    let mu = cfg.mu;
    let tau = 1.0 / mu;
    let threshold = cfg.inner_eps * m_obs.fro_norm().max(1.0);

    let mut w = x0.clone();
    let mut y = x0.clone();
    let mut residuals = Vec::new();

    for step in 1..=cfg.inner_max {
        let x = t_svt(&w.add_scaled(&y, -tau), tau)?;

        w = x.add_scaled(&(coupling + &y), tau);
        mask.overwrite_observed(&mut w, m_obs);

        let diff = &x - &w;
        let residual = diff.fro_norm();
        y = y.add_scaled(&diff, mu);

        if !residual.is_finite() || !w.is_finite() {
            return Err(Error::NonFinite(format!(
                "inner step {step} (outer round {outer})"
            )));
        }
        residuals.push(residual);
        if residual <= threshold {
            break;
        }
    }

    let steps = residuals.len();
    Ok((w, steps, residuals))
}
