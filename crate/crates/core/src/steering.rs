//! Minimum-norm steering of the linear system onto `[ε, 1-ε]`.
//!
//! A steering segment on `[t0, t1]` stores `w = Q_{L_ε}^{-1}(t1 - t0) α`
//! and evaluates `u(t) = B* S*(t1 - t) L_ε* w` on demand.

use crate::error::{Error, Result};
use crate::gramian::apply_partial_gramian_inverse;
use crate::grid::{embed, restrict, Grid, Margin, RestrictedFunction, State};
use crate::semigroup::{apply_input, apply_semigroup, coupling_exp, Direction, Plant, SystemSpec};

/// Which output the linear control aims at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TargetTransport {
    /// `α = L S(τ)(η − ξ)`: the transported target `L S(τ)η` is reached.
    /// This is the per-stage form of the dyadic construction.
    #[default]
    Transported,
    /// `α = L(η − S(τ)ξ)`: the target `Lη` itself is reached.
    Direct,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SegmentControl {
    /// `u(t) = B* S*(t_end - t) L_ε* w`.
    Steering(RestrictedFunction),
    /// Time-independent control.
    Constant(State),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlSegment {
    pub t_start: f64,
    pub t_end: f64,
    pub control: SegmentControl,
}

/// Which one-sided limit to take at a segment boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limit {
    /// Segment with `t_start ≤ t < t_end`.
    Right,
    /// Segment with `t_start < t ≤ t_end`.
    Left,
}

/// Piecewise control on consecutive, non-overlapping segments.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSignal {
    sys: SystemSpec,
    grid: Grid,
    segments: Vec<ControlSegment>,
}

impl ControlSignal {
    pub fn new(sys: SystemSpec, grid: Grid) -> Self {
        Self {
            sys,
            grid,
            segments: Vec::new(),
        }
    }

    pub fn system(&self) -> &SystemSpec {
        &self.sys
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn segments(&self) -> &[ControlSegment] {
        &self.segments
    }

    pub fn push(&mut self, segment: ControlSegment) -> Result<()> {
        if !(segment.t_start < segment.t_end) || !segment.t_end.is_finite() {
            return Err(Error::parameter("t_end", segment.t_end, format!("> t_start = {}", segment.t_start)));
        }
        if let Some(last) = self.segments.last() {
            if segment.t_start < last.t_end {
                return Err(Error::parameter(
                    "t_start",
                    segment.t_start,
                    format!("≥ previous segment end {}", last.t_end),
                ));
            }
        }
        match &segment.control {
            SegmentControl::Steering(w) => {
                self.grid.check_same(&w.grid())?;
                if w.margin() != self.sys.margin(self.grid)? {
                    return Err(Error::parameter("epsilon", w.margin().eps(), "the system margin"));
                }
                if w.kind() != self.sys.kind() {
                    return Err(Error::KindMismatch {
                        expected: self.sys.kind().name(),
                        found: w.kind().name(),
                    });
                }
            }
            SegmentControl::Constant(x) => {
                self.grid.check_same(&x.grid())?;
                x.expect_kind(self.sys.kind())?;
            }
        }
        self.segments.push(segment);
        Ok(())
    }

    pub fn extend(&mut self, other: ControlSignal) -> Result<()> {
        other.segments.into_iter().try_for_each(|s| self.push(s))
    }

    fn owner(&self, t: f64, limit: Limit) -> Option<&ControlSegment> {
        self.segments.iter().find(|s| match limit {
            Limit::Right => s.t_start <= t && t < s.t_end,
            Limit::Left => s.t_start < t && t <= s.t_end,
        })
    }

    /// `u(t)` using the given one-sided limit; zero outside every segment.
    pub fn eval_limit(&self, t: f64, limit: Limit) -> Result<State> {
        match self.owner(t, limit) {
            None => Ok(State::zeros(self.grid, self.sys.kind())),
            Some(seg) => match &seg.control {
                SegmentControl::Constant(x) => Ok(x.clone()),
                SegmentControl::Steering(w) => {
                    let r = (seg.t_end - t).max(0.0);
                    let back = apply_semigroup(&self.sys, r, &embed(w), Direction::Adjoint)?;
                    apply_input(&self.sys, &back)
                }
            },
        }
    }

    /// `u(t)`, right-continuous except at the final segment end.
    pub fn eval(&self, t: f64) -> Result<State> {
        if self.owner(t, Limit::Right).is_none() && self.owner(t, Limit::Left).is_some() {
            return self.eval_limit(t, Limit::Left);
        }
        self.eval_limit(t, Limit::Right)
    }
}

/// Steering segment on `[tau, t_final]` from `xi` toward `eta`.
pub fn synthesize_linear_control(
    sys: &SystemSpec,
    xi: &State,
    eta: &State,
    tau: f64,
    t_final: f64,
    transport: TargetTransport,
) -> Result<ControlSignal> {
    if !(tau >= 0.0) {
        return Err(Error::parameter("tau", tau, "≥ 0"));
    }
    if !(tau < t_final) || !t_final.is_finite() {
        return Err(Error::parameter("tau", tau, format!("< T = {t_final}")));
    }
    xi.check_compatible(eta)?;
    xi.expect_kind(sys.kind())?;
    let grid = xi.grid();
    let margin = sys.margin(grid)?;
    let span = t_final - tau;
    let alpha = match transport {
        TargetTransport::Transported => {
            restrict(&apply_semigroup(sys, span, &eta.sub(xi)?, Direction::Forward)?, margin)?
        }
        TargetTransport::Direct => {
            restrict(&eta.sub(&apply_semigroup(sys, span, xi, Direction::Forward)?)?, margin)?
        }
    };
    let w = apply_partial_gramian_inverse(sys, span, &alpha)?;
    let mut u = ControlSignal::new(*sys, grid);
    u.push(ControlSegment {
        t_start: tau,
        t_end: t_final,
        control: SegmentControl::Steering(w),
    })?;
    Ok(u)
}

/// `∫ ‖u(t)‖² dt`, trapezoid in time with `n_time_steps` per segment.
///
/// For steering segments the θ-integral of `‖B* S*(r) L_ε* w‖²` is taken
/// over its exact support `[max(ε, r), 1-ε]` in the variable of `w`, with
/// the integrand interpolated linearly inside the cut cell.
pub fn control_energy(u: &ControlSignal, n_time_steps: usize) -> Result<f64> {
    if n_time_steps < 2 {
        return Err(Error::parameter("n_time_steps", n_time_steps as f64, "≥ 2"));
    }
    let mut total = 0.0;
    for seg in &u.segments {
        total += segment_energy(&u.sys, seg, n_time_steps)?;
    }
    Ok(total)
}

pub fn segment_energy(sys: &SystemSpec, seg: &ControlSegment, n_time_steps: usize) -> Result<f64> {
    let span = seg.t_end - seg.t_start;
    match &seg.control {
        SegmentControl::Constant(x) => Ok(span * x.inner(x)?),
        SegmentControl::Steering(w) => {
            let ds = span / n_time_steps as f64;
            let mut acc = 0.0;
            for j in 0..=n_time_steps {
                let r = if j == n_time_steps { span } else { j as f64 * ds };
                let wt = if j == 0 || j == n_time_steps { 0.5 } else { 1.0 };
                acc += wt * instantaneous_energy(sys, w, r)?;
            }
            Ok(acc * ds)
        }
    }
}

/// `‖B* S*(r) L_ε* w‖²`.
fn instantaneous_energy(sys: &SystemSpec, w: &RestrictedFunction, r: f64) -> Result<f64> {
    let comps = w.components();
    let density: Vec<f64> = match sys.plant() {
        Plant::Monotubular { a, b } => {
            let s = (b * (-a * r).exp()).powi(2);
            comps[0].iter().map(|v| s * v * v).collect()
        }
        Plant::TwoStream { h1, h2, b1, b2 } => {
            let e = coupling_exp(h1, h2, r)?.entries;
            comps[0]
                .iter()
                .zip(&comps[1])
                .map(|(&x1, &x2)| {
                    // B Eᵀ w
                    let y1 = b1 * (e[0][0] * x1 + e[1][0] * x2);
                    let y2 = b2 * (e[0][1] * x1 + e[1][1] * x2);
                    y1 * y1 + y2 * y2
                })
                .collect()
        }
    };
    Ok(window_integral(w.margin(), &density, r))
}

/// Integral of the piecewise-linear interpolant of `g` (window samples)
/// over `[max(ε, lower), 1-ε]`.
fn window_integral(margin: Margin, g: &[f64], lower: f64) -> f64 {
    let h = margin.grid().spacing();
    let len = g.len();
    let p = ((lower - margin.eps()) / h).max(0.0);
    let j = p.floor() as usize;
    let frac = p - p.floor();
    if j + 1 >= len {
        return 0.0;
    }
    let (start, head) = if frac <= 1e-9 {
        (j, 0.0)
    } else if frac >= 1.0 - 1e-9 {
        (j + 1, 0.0)
    } else {
        let gp = (1.0 - frac) * g[j] + frac * g[j + 1];
        (j + 1, 0.5 * (1.0 - frac) * h * (gp + g[j + 1]))
    };
    if start + 1 >= len {
        return head;
    }
    let inner: f64 = g[start + 1..len - 1].iter().sum();
    head + h * (0.5 * (g[start] + g[len - 1]) + inner)
}

/// `‖L_ε xT − L_ε η‖` on `[ε, 1-ε]`.
pub fn partial_error(x_t: &State, eta: &State, margin: Margin) -> Result<f64> {
    x_t.check_compatible(eta)?;
    Ok(restrict(x_t, margin)?.sub(&restrict(eta, margin)?)?.norm())
}
