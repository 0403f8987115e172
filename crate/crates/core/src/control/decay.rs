use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::Serialize;

/// Exponential fit `‖w(k)‖ ≈ C e^{−γk}` of the error at integer times, plus
/// the worst even-cycle contraction factor `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayReport {
    #[serde(rename = "C")]
    pub c: f64,
    pub gamma: f64,
    pub theta: f64,
    pub n_cycles: usize,
    /// Initial error was zero, nothing to stabilise.
    pub zero_error: bool,
}

impl DecayReport {
    pub fn zero(n_cycles: usize) -> Self {
        Self {
            c: 0.0,
            gamma: 0.0,
            theta: 0.0,
            n_cycles,
            zero_error: true,
        }
    }

    pub fn is_stabilised(&self) -> bool {
        self.zero_error || (self.gamma > 0.0 && self.theta < 1.0)
    }
}

/// Fits errors `e_0, …, e_N` measured at `t = 0, …, N`.
///
/// `θ = max_{k even} e_{k+1}/e_k`; `(C, γ)` from least squares of `ln e_k`
/// against `k` over `k ≥ 2`, skipping exact zeros.
pub fn fit_decay<T: Real>(errors: &[T]) -> Result<DecayReport> {
    let n_cycles = errors.len().saturating_sub(1);
    if errors.iter().any(|e| !e.is_finite() || *e < T::zero()) {
        return Err(Error::precondition("errors must be finite and non-negative"));
    }
    if errors.iter().all(|e| e.is_zero()) {
        return Ok(DecayReport::zero(n_cycles));
    }
    if errors.len() < 4 {
        return Err(Error::precondition(format!(
            "decay fit needs at least 4 error values, got {}",
            errors.len()
        )));
    }
    if errors[0].is_zero() {
        return Err(Error::precondition("initial error is zero but later errors are not"));
    }
    let e: Vec<f64> = errors.iter().map(|v| v.as_f64()).collect();

    let theta = (0..n_cycles)
        .step_by(2)
        .filter(|&k| e[k] > 0.0)
        .map(|k| e[k + 1] / e[k])
        .fold(0.0, f64::max);

    let pts: Vec<(f64, f64)> = (2..e.len())
        .filter(|&k| e[k] > 0.0)
        .map(|k| (k as f64, e[k].ln()))
        .collect();
    if pts.is_empty() {
        // Error vanished exactly from k = 2 on.
        return Ok(DecayReport {
            c: e[0],
            gamma: f64::MAX,
            theta,
            n_cycles,
            zero_error: false,
        });
    }
    let (slope, intercept) = if pts.len() == 1 {
        // Single point: line through (0, ln e_0).
        let (k, y) = pts[0];
        let s = (y - e[0].ln()) / k;
        (s, e[0].ln())
    } else {
        let m = pts.len() as f64;
        let kx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let ky = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - kx) * (p.1 - ky)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - kx) * (p.0 - kx)).sum();
        let s = sxy / sxx;
        (s, ky - s * kx)
    };
    Ok(DecayReport {
        c: intercept.exp(),
        gamma: -slope,
        theta,
        n_cycles,
        zero_error: false,
    })
}
