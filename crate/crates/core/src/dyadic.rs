//! Dyadic piecewise steering of the semilinear system.
//!
//! Stage `n` lasts `τ_n = T/2ⁿ` and ends at `t_n = T(1 - 2⁻ⁿ)`; its control
//! is the minimum-norm linear control for `α_n = L S(τ_n)(η - x_{n-1})`,
//! after which the semilinear dynamics advance `x_{n-1} → x_n`.

use crate::error::{Error, Result};
use crate::grid::{restrict, Margin, State};
use crate::semigroup::{apply_semigroup, Direction, SystemSpec};
use crate::semilinear::{solve_mild, Nonlinearity, PicardOptions, Trajectory};
use crate::steering::{
    partial_error, segment_energy, synthesize_linear_control, ControlSignal, TargetTransport,
};

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicSchedule {
    pub horizon: f64,
    pub tau: Vec<f64>,
    pub t: Vec<f64>,
}

impl DyadicSchedule {
    pub fn new(horizon: f64, n_stages: usize) -> Result<Self> {
        if n_stages < 1 {
            return Err(Error::parameter("n_stages", n_stages as f64, "≥ 1"));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::parameter("T", horizon, "> 0"));
        }
        let tau: Vec<f64> = (1..=n_stages).map(|n| horizon * 0.5f64.powi(n as i32)).collect();
        let t = (1..=n_stages).map(|n| horizon * (1.0 - 0.5f64.powi(n as i32))).collect();
        Ok(Self { horizon, tau, t })
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    /// Start of stage `n` (1-based).
    pub fn start(&self, n: usize) -> f64 {
        if n == 1 {
            0.0
        } else {
            self.t[n - 2]
        }
    }
}

/// `‖S(τ)η − η‖ + M K τ`.
pub fn stage_error_bound(sys: &SystemSpec, eta: &State, f: &Nonlinearity, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::parameter("tau", tau, "> 0"));
    }
    let drift = apply_semigroup(sys, tau, eta, Direction::Forward)?.sub(eta)?.norm();
    Ok(drift + f.sup_bound(sys.kind()) * sys.semigroup_bound() * tau)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetDiagnostics {
    /// `η(0)` per component; the generator domain needs it to vanish.
    pub inflow_values: Vec<f64>,
    /// `η(1)` per component (informational).
    pub outflow_values: Vec<f64>,
    pub boundary_ok: bool,
    /// Finite-difference `‖η'‖` on the full grid.
    pub derivative_norm: f64,
    /// The same on every fourth node.
    pub derivative_norm_coarse: f64,
    pub derivative_growth: f64,
    pub derivative_ok: bool,
    pub pass: bool,
}

const GROWTH_LIMIT: f64 = 1.25;

fn fd_norm(values: &[f64], stride: usize, h: f64) -> f64 {
    let pts: Vec<f64> = values.iter().step_by(stride).copied().collect();
    let hs = h * stride as f64;
    let s: f64 = pts.windows(2).map(|w| ((w[1] - w[0]) / hs).powi(2)).sum();
    (s * hs).sqrt()
}

/// Checks that `η` lies (numerically) in the generator domain: zero
/// inflow value and a finite-difference derivative that stays bounded
/// when the grid is refined fourfold. A jump makes the norm grow by 2.
pub fn validate_target(sys: &SystemSpec, eta: &State) -> Result<TargetDiagnostics> {
    eta.expect_kind(sys.kind())?;
    let grid = eta.grid();
    let h = grid.spacing();
    let comps = eta.components();
    let scale = eta.max_abs().max(1.0);
    let inflow_values: Vec<f64> = comps.iter().map(|c| c.values()[0]).collect();
    let outflow_values: Vec<f64> = comps.iter().map(|c| *c.values().last().unwrap()).collect();
    let boundary_ok = inflow_values.iter().all(|v| v.abs() <= 1e-9 * scale);
    let fine: f64 = comps.iter().map(|c| fd_norm(c.values(), 1, h).powi(2)).sum::<f64>().sqrt();
    let coarse_stride = if grid.n_cells().is_multiple_of(4) { 4 } else { 2 };
    let coarse: f64 = comps
        .iter()
        .map(|c| fd_norm(c.values(), coarse_stride, h).powi(2))
        .sum::<f64>()
        .sqrt();
    let growth = if coarse > 0.0 { fine / coarse } else if fine > 0.0 { f64::INFINITY } else { 1.0 };
    let derivative_ok = growth <= GROWTH_LIMIT;
    Ok(TargetDiagnostics {
        inflow_values,
        outflow_values,
        boundary_ok,
        derivative_norm: fine,
        derivative_norm_coarse: coarse,
        derivative_growth: growth,
        derivative_ok,
        pass: boundary_ok && derivative_ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// `‖L x_n − L η‖ ≤ stop_tol`.
    Tolerance,
    /// The next stage would be shorter than two cells.
    GridFloor,
    /// All requested stages ran.
    StagesExhausted,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Tolerance => "tolerance",
            StopReason::GridFloor => "grid_floor",
            StopReason::StagesExhausted => "stages_exhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord {
    pub n: usize,
    pub tau: f64,
    pub t_end: f64,
    /// `‖L x_n − L S(τ_n)η‖`.
    pub err_transported: f64,
    /// `‖L x_n − L η‖`.
    pub err_target: f64,
    pub bound: f64,
    pub stage_energy: f64,
    pub cumulative_energy: f64,
    /// `‖η‖ + ‖x_{n-1}‖`, the scale of the discretization slack.
    pub scale: f64,
    pub picard_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteeringReport {
    pub stages: Vec<StageRecord>,
    pub stop_reason: StopReason,
    pub terminal_error: f64,
    pub terminal_relative_error: f64,
    /// `max_{n ≥ 2} E_n / τ_n`, so that `E_n ≤ c τ_n` on the logged stages.
    pub energy_constant: f64,
    pub target: TargetDiagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicOptions {
    pub n_stages: usize,
    pub n_time_steps_per_stage: usize,
    pub stop_tol: f64,
    pub picard: PicardOptions,
}

impl Default for DyadicOptions {
    fn default() -> Self {
        Self {
            n_stages: 20,
            n_time_steps_per_stage: 256,
            stop_tol: 0.0,
            picard: PicardOptions::default(),
        }
    }
}

pub struct SteeringOutcome {
    pub control: ControlSignal,
    pub trajectory: Trajectory,
    pub report: SteeringReport,
}

pub fn steer_semilinear(
    sys: &SystemSpec,
    xi: &State,
    eta: &State,
    f: &Nonlinearity,
    opts: DyadicOptions,
) -> Result<SteeringOutcome> {
    xi.check_compatible(eta)?;
    xi.expect_kind(sys.kind())?;
    let grid = xi.grid();
    let margin: Margin = sys.margin(grid)?;
    let target = validate_target(sys, eta)?;
    let schedule = DyadicSchedule::new(sys.horizon(), opts.n_stages)?;
    let target_norm = restrict(eta, margin)?.norm();

    let mut control = ControlSignal::new(*sys, grid);
    let mut trajectory = Trajectory {
        stamps: vec![0.0],
        states: vec![xi.clone()],
        picard_gaps: Vec::new(),
    };
    let mut x = xi.clone();
    let mut stages = Vec::new();
    let mut cumulative = 0.0;
    let mut stop_reason = StopReason::StagesExhausted;

    for n in 1..=schedule.len() {
        let tau = schedule.tau[n - 1];
        if tau < 2.0 * grid.spacing() {
            stop_reason = StopReason::GridFloor;
            break;
        }
        let (t0, t1) = (schedule.start(n), schedule.t[n - 1]);
        let wrap = |e: Error| Error::Stage { stage: n, source: Box::new(e) };
        let stage_u = synthesize_linear_control(sys, &x, eta, t0, t1, TargetTransport::Transported)
            .map_err(wrap)?;
        let energy = segment_energy(sys, &stage_u.segments()[0], opts.n_time_steps_per_stage)?;
        control.extend(stage_u).map_err(wrap)?;
        let leg = solve_mild(sys, &x, &control, f, t0, t1, opts.n_time_steps_per_stage, opts.picard)
            .map_err(wrap)?;
        let picard_iterations = leg.picard_iterations();
        let x_next = leg.last().clone();
        trajectory.append(leg);

        let transported = apply_semigroup(sys, tau, eta, Direction::Forward)?;
        cumulative += energy;
        let err_target = partial_error(&x_next, eta, margin)?;
        stages.push(StageRecord {
            n,
            tau,
            t_end: t1,
            err_transported: partial_error(&x_next, &transported, margin)?,
            err_target,
            bound: stage_error_bound(sys, eta, f, tau)?,
            stage_energy: energy,
            cumulative_energy: cumulative,
            scale: eta.norm() + x.norm(),
            picard_iterations,
        });
        x = x_next;
        if err_target <= opts.stop_tol {
            stop_reason = StopReason::Tolerance;
            break;
        }
    }

    let terminal_error = partial_error(&x, eta, margin)?;
    let energy_constant = stages
        .iter()
        .skip(1)
        .map(|s| s.stage_energy / s.tau)
        .fold(0.0, f64::max);
    let report = SteeringReport {
        stages,
        stop_reason,
        terminal_error,
        terminal_relative_error: if target_norm > 0.0 { terminal_error / target_norm } else { terminal_error },
        energy_constant,
        target,
    };
    Ok(SteeringOutcome {
        control,
        trajectory,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, GridFunction};
    use crate::presets::Preset;

    fn scalar(grid: Grid, f: impl Fn(f64) -> f64) -> State {
        GridFunction::from_fn(grid, f).into()
    }

    #[test]
    fn schedule_examples() {
        let s = DyadicSchedule::new(1.0, 3).unwrap();
        assert_eq!(s.tau, vec![0.5, 0.25, 0.125]);
        assert_eq!(s.t, vec![0.5, 0.75, 0.875]);
        let s = DyadicSchedule::new(2.0, 1).unwrap();
        assert_eq!((s.tau[0], s.t[0]), (1.0, 1.0));
        assert!(DyadicSchedule::new(1.0, 0).is_err());
        let s = DyadicSchedule::new(1.0, 30).unwrap();
        let sum: f64 = s.tau.iter().sum();
        assert!((sum - s.t[29]).abs() < 1e-12);
        assert!((1.0 - sum - 0.5f64.powi(30)).abs() < 1e-12);
    }

    #[test]
    fn bound_without_nonlinearity_is_drift() {
        let g = Grid::new(256).unwrap();
        let sys = SystemSpec::monotubular(1.0, 1.0, 1.0, 0.1).unwrap();
        let eta = Preset::Bump { center: 0.5, width: 0.4, amplitude: 1.0 }.sample(g).unwrap().into();
        let b0 = stage_error_bound(&sys, &eta, &Nonlinearity::Zero, 0.125).unwrap();
        let drift = apply_semigroup(&sys, 0.125, &eta, Direction::Forward).unwrap().sub(&eta).unwrap().norm();
        assert_eq!(b0, drift);
        let b1 = stage_error_bound(&sys, &eta, &Nonlinearity::SatTanh { gain: 0.1 }, 0.125).unwrap();
        assert!((b1 - b0 - 0.0125).abs() < 1e-15);
    }

    #[test]
    fn target_validation() {
        let g = Grid::new(1024).unwrap();
        let sys = SystemSpec::monotubular(1.0, 1.0, 1.0, 0.1).unwrap();
        let bump: State = Preset::Bump { center: 0.5, width: 0.4, amplitude: 1.0 }.sample(g).unwrap().into();
        assert!(validate_target(&sys, &bump).unwrap().pass);
        let one = scalar(g, |_| 1.0);
        let d = validate_target(&sys, &one).unwrap();
        assert!(!d.boundary_ok && !d.pass);
        let step = scalar(g, |t| if t < 0.5 { 0.0 } else { 1.0 });
        let d = validate_target(&sys, &step).unwrap();
        assert!(!d.derivative_ok, "{d:?}");
        assert!((d.derivative_growth - 2.0).abs() < 1e-9);
    }

    #[test]
    fn linear_dyadic_stages_hit_transported_target() {
        let g = Grid::new(256).unwrap();
        let sys = SystemSpec::monotubular(1.0, 1.0, 1.0, 0.1).unwrap();
        let xi = scalar(g, |t| (std::f64::consts::PI * t).sin());
        let eta: State = Preset::Bump { center: 0.5, width: 0.4, amplitude: 1.0 }.sample(g).unwrap().into();
        let out = steer_semilinear(&sys, &xi, &eta, &Nonlinearity::Zero, DyadicOptions { n_stages: 5, ..Default::default() }).unwrap();
        let h = g.spacing();
        for s in &out.report.stages {
            assert!(s.err_transported <= 10.0 * h * s.scale, "{s:?}");
        }
        let cum: Vec<f64> = out.report.stages.iter().map(|s| s.cumulative_energy).collect();
        assert!(cum.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(out.report.stop_reason, StopReason::StagesExhausted);
    }

    #[test]
    fn grid_floor_stops_early() {
        let g = Grid::new(64).unwrap();
        let sys = SystemSpec::monotubular(1.0, 1.0, 1.0, 0.1).unwrap();
        let xi = scalar(g, |t| t);
        let eta = scalar(g, |t| (std::f64::consts::PI * t).sin());
        let out = steer_semilinear(&sys, &xi, &eta, &Nonlinearity::Zero, DyadicOptions { n_stages: 20, ..Default::default() }).unwrap();
        // τ_5 = 1/32 = 2Δθ still runs, τ_6 does not
        assert_eq!(out.report.stages.len(), 5);
        assert_eq!(out.report.stop_reason, StopReason::GridFloor);
    }

    #[test]
    fn single_stage_matches_linear_synthesis_bitwise() {
        let g = Grid::new(128).unwrap();
        let sys = SystemSpec::two_stream(0.5, 0.5, 1.0, 1.0, 1.0, 0.1).unwrap();
        let xi = State::zeros(g, sys.kind());
        let eta: State = crate::grid::PairFunction::new(
            GridFunction::from_fn(g, |t| (3.0 * t).sin()),
            GridFunction::from_fn(g, |t| t * t),
        )
        .unwrap()
        .into();
        let out = steer_semilinear(&sys, &xi, &eta, &Nonlinearity::Zero, DyadicOptions { n_stages: 1, ..Default::default() }).unwrap();
        let direct = synthesize_linear_control(&sys, &xi, &eta, 0.0, 0.5, TargetTransport::Transported).unwrap();
        assert_eq!(out.control, direct);
    }
}
