//! Adaptive Simpson quadrature with a relative tolerance.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Target error relative to the magnitude of the integral.
    pub rel_tol: f64,
    /// Absolute floor on the target error, for integrals that are ~0.
    pub abs_tol: f64,
    /// Maximum bisection depth below each initial panel.
    pub max_depth: u32,
    /// Uniform panels the interval is cut into before adapting.
    pub initial_panels: usize,
    /// Half-width of the integration window in units of the in-subset sd.
    pub half_width_sds: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-14,
            max_depth: 40,
            initial_panels: 64,
            half_width_sds: 12.0,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerances must be positive: rel {}, abs {}",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.initial_panels == 0 || self.max_depth == 0 {
            return Err(Error::InvalidParameter(
                "quadrature needs at least one panel and depth >= 1".into(),
            ));
        }
        if !(self.half_width_sds > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "integration half-width must be positive, got {}",
                self.half_width_sds
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

struct Segment {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
}

/// Integrates `f` over `[lo, hi]`.
///
/// A composite Simpson pass over `initial_panels` sets the scale; each
/// panel is then bisected until the Richardson error `|S₂ − S₁|/15` meets its
/// share of `max(rel_tol·|I|, abs_tol)`. Panels that reach `max_depth` keep
/// their best estimate; if the summed error estimate still exceeds the
/// target, the result is a non-convergence error carrying the estimate.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    cfg.validate()?;
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(Error::InvalidParameter(format!("bad integration interval [{lo}, {hi}]")));
    }
    if hi == lo {
        return Ok(Integral {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let panels = cfg.initial_panels;
    let h = (hi - lo) / panels as f64;
    let mut evaluations = 0usize;
    let mut eval = |x: f64| {
        evaluations += 1;
        f(x)
    };
    let mut stack = Vec::with_capacity(panels);
    let mut coarse = 0.0;
    let mut fa = eval(lo);
    for p in 0..panels {
        let a = lo + p as f64 * h;
        let b = if p + 1 == panels { hi } else { a + h };
        let fm = eval(0.5 * (a + b));
        let fb = eval(b);
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        coarse += whole;
        stack.push((a, b, fa, fm, fb, whole));
        fa = fb;
    }
    let target = (cfg.rel_tol * coarse.abs()).max(cfg.abs_tol);
    let mut work: Vec<Segment> = stack
        .into_iter()
        .rev()
        .map(|(a, b, fa, fm, fb, whole)| Segment {
            a,
            b,
            fa,
            fm,
            fb,
            whole,
            eps: target * (b - a) / (hi - lo),
            depth: 0,
        })
        .collect();

    let mut value = 0.0;
    let mut error = 0.0;
    while let Some(s) = work.pop() {
        let m = 0.5 * (s.a + s.b);
        let lm = 0.5 * (s.a + m);
        let rm = 0.5 * (m + s.b);
        let flm = eval(lm);
        let frm = eval(rm);
        let left = (m - s.a) / 6.0 * (s.fa + 4.0 * flm + s.fm);
        let right = (s.b - m) / 6.0 * (s.fm + 4.0 * frm + s.fb);
        let delta = left + right - s.whole;
        if delta.abs() <= 15.0 * s.eps || s.depth + 1 >= cfg.max_depth || !delta.is_finite() {
            value += left + right + delta / 15.0;
            error += delta.abs() / 15.0;
            continue;
        }
        let eps = 0.5 * s.eps;
        work.push(Segment {
            a: m,
            b: s.b,
            fa: s.fm,
            fm: frm,
            fb: s.fb,
            whole: right,
            eps,
            depth: s.depth + 1,
        });
        work.push(Segment {
            a: s.a,
            b: m,
            fa: s.fa,
            fm: flm,
            fb: s.fm,
            whole: left,
            eps,
            depth: s.depth + 1,
        });
    }
    let tolerance = (cfg.rel_tol * value.abs()).max(cfg.abs_tol);
    if !value.is_finite() || !(error <= tolerance.max(target)) {
        return Err(Error::NonConvergence {
            lo,
            hi,
            estimate: value,
            error_estimate: error,
            tolerance,
        });
    }
    Ok(Integral {
        value,
        error_estimate: error,
        evaluations,
    })
}
