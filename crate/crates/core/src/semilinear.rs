//! Nodewise nonlinearities and the Picard solver for mild solutions
//! `x(t) = S(t - t0)ξ + ∫ S(t - s)(Bu(s) + f(s, x(s), u(s))) ds`.

use crate::error::{Error, Result};
use crate::grid::{GridFunction, Kind, State};
use crate::semigroup::{apply_input, apply_semigroup, Direction, SystemSpec};
use crate::steering::{ControlSignal, Limit};

/// Built-in nonlinearities, applied per component and per node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nonlinearity {
    Zero,
    /// `γ tanh(x)`.
    SatTanh { gain: f64 },
    /// `γ sin(x + u)`.
    BoundedMix { gain: f64 },
}

impl Nonlinearity {
    pub const NAMES: [&'static str; 3] = ["zero", "sat_tanh", "bounded_mix"];

    /// Looks up a registry entry; `gain` is required by the gained entries.
    pub fn from_name(name: &str, gain: Option<f64>) -> Result<Self> {
        let need_gain = || {
            let g = gain.ok_or_else(|| Error::parameter("gain", f64::NAN, "required"))?;
            if !(g >= 0.0 && g.is_finite()) {
                return Err(Error::parameter("gain", g, "≥ 0"));
            }
            Ok(g)
        };
        match name {
            "zero" => Ok(Nonlinearity::Zero),
            "sat_tanh" => Ok(Nonlinearity::SatTanh { gain: need_gain()? }),
            "bounded_mix" => Ok(Nonlinearity::BoundedMix { gain: need_gain()? }),
            other => Err(Error::UnknownNonlinearity(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Nonlinearity::Zero => "zero",
            Nonlinearity::SatTanh { .. } => "sat_tanh",
            Nonlinearity::BoundedMix { .. } => "bounded_mix",
        }
    }

    pub fn gain(&self) -> f64 {
        match *self {
            Nonlinearity::Zero => 0.0,
            Nonlinearity::SatTanh { gain } | Nonlinearity::BoundedMix { gain } => gain,
        }
    }

    /// Pointwise bound `|f| ≤ γ`.
    pub fn pointwise_bound(&self) -> f64 {
        self.gain()
    }

    /// `M = sup ‖f‖` in the state space: `γ` for one component, `√2 γ` for two.
    pub fn sup_bound(&self, kind: Kind) -> f64 {
        self.gain() * (kind.components() as f64).sqrt()
    }

    /// Lipschitz constant in `x`.
    pub fn lipschitz(&self) -> f64 {
        self.gain()
    }

    pub fn is_zero(&self) -> bool {
        self.gain() == 0.0
    }

    #[inline]
    pub fn value(&self, _t: f64, x: f64, u: f64) -> f64 {
        match *self {
            Nonlinearity::Zero => 0.0,
            Nonlinearity::SatTanh { gain } => gain * x.tanh(),
            Nonlinearity::BoundedMix { gain } => gain * (x + u).sin(),
        }
    }
}

/// `f(t, x, u)` applied nodewise.
pub fn eval_nonlinearity(f: &Nonlinearity, t: f64, state: &State, control: &State) -> Result<State> {
    state.check_compatible(control)?;
    let grid = state.grid();
    let parts = state
        .components()
        .into_iter()
        .zip(control.components())
        .map(|(x, u)| {
            let v = x.values().iter().zip(u.values()).map(|(&a, &b)| f.value(t, a, b)).collect();
            GridFunction::from_raw(grid, v)
        })
        .collect();
    State::from_components(parts)
}

/// Picard iteration limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            max_iterations: 50,
            tolerance: 1e-10,
        }
    }
}

/// States at increasing time stamps.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub stamps: Vec<f64>,
    pub states: Vec<State>,
    /// Sup-norm gap between successive Picard iterates, one per iteration.
    pub picard_gaps: Vec<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &State {
        self.states.last().expect("non-empty trajectory")
    }

    pub fn len(&self) -> usize {
        self.stamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stamps.is_empty()
    }

    pub fn picard_iterations(&self) -> usize {
        self.picard_gaps.len()
    }

    /// Appends `other`, whose first stamp must equal this trajectory's last.
    pub fn append(&mut self, other: Trajectory) {
        let skip = usize::from(!self.stamps.is_empty());
        self.stamps.extend(other.stamps.into_iter().skip(skip));
        self.states.extend(other.states.into_iter().skip(skip));
        self.picard_gaps.extend(other.picard_gaps);
    }
}

/// Time stamps for `[t_start, t_end]`: one step per cell when the
/// interval is a whole number of cells (every shift is then exact),
/// otherwise at least `n_time_steps` and at least one per cell.
pub fn time_stamps(grid_cells: usize, t_start: f64, t_end: f64, n_time_steps: usize) -> Vec<f64> {
    let span = t_end - t_start;
    let cells = span * grid_cells as f64;
    let k = cells.round();
    let steps = if (cells - k).abs() <= 1e-9 && k >= 2.0 {
        k as usize
    } else {
        n_time_steps.max(cells.ceil() as usize)
    };
    let ds = span / steps as f64;
    (0..=steps)
        .map(|j| if j == steps { t_end } else { t_start + j as f64 * ds })
        .collect()
}

/// Forcing `g = Bu + f(s, x, u)` at one stamp and one side.
fn forcing(
    sys: &SystemSpec,
    u: &ControlSignal,
    f: &Nonlinearity,
    s: f64,
    x: Option<&State>,
    limit: Limit,
) -> Result<State> {
    let us = u.eval_limit(s, limit)?;
    let bu = apply_input(sys, &us)?;
    match x {
        Some(x) if !f.is_zero() => bu.add(&eval_nonlinearity(f, s, x, &us)?),
        _ => Ok(bu),
    }
}

/// `S(t_j - t_0)ξ` at every stamp, each applied in one step so that
/// off-grid shifts are interpolated once rather than compounded.
fn free_evolution(sys: &SystemSpec, xi: &State, stamps: &[f64]) -> Result<Vec<State>> {
    stamps
        .iter()
        .map(|&t| apply_semigroup(sys, t - stamps[0], xi, Direction::Forward))
        .collect()
}

/// One pass of `z_{j+1} = S(Δs)(z_j + Δs/2 g_j⁺) + Δs/2 g_{j+1}⁻` from
/// `z_0 = 0`, added to the free evolution; the nonlinearity is frozen at
/// `previous` (absent on the first pass).
fn march(
    sys: &SystemSpec,
    free: &[State],
    u: &ControlSignal,
    f: &Nonlinearity,
    stamps: &[f64],
    previous: Option<&[State]>,
) -> Result<Vec<State>> {
    let mut out = Vec::with_capacity(stamps.len());
    out.push(free[0].clone());
    let mut z = State::zeros(free[0].grid(), free[0].kind());
    for j in 0..stamps.len() - 1 {
        let (s0, s1) = (stamps[j], stamps[j + 1]);
        let ds = s1 - s0;
        let g0 = forcing(sys, u, f, s0, previous.map(|p| &p[j]), Limit::Right)?;
        let g1 = forcing(sys, u, f, s1, previous.map(|p| &p[j + 1]), Limit::Left)?;
        z = apply_semigroup(sys, ds, &z.axpy(0.5 * ds, &g0)?, Direction::Forward)?.axpy(0.5 * ds, &g1)?;
        out.push(free[j + 1].add(&z)?);
    }
    Ok(out)
}

fn sup_gap(a: &[State], b: &[State]) -> Result<f64> {
    a.iter().zip(b).try_fold(0.0f64, |acc, (x, y)| Ok(acc.max(x.max_abs_diff(y)?)))
}

/// Mild solution on `[t_start, t_end]` by Picard iteration over the whole
/// discrete trajectory, started from the `f = 0` solution.
#[allow(clippy::too_many_arguments)]
pub fn solve_mild(
    sys: &SystemSpec,
    xi: &State,
    u: &ControlSignal,
    f: &Nonlinearity,
    t_start: f64,
    t_end: f64,
    n_time_steps: usize,
    picard: PicardOptions,
) -> Result<Trajectory> {
    if !(t_start < t_end) || !t_end.is_finite() {
        return Err(Error::parameter("t_end", t_end, format!("> t_start = {t_start}")));
    }
    if n_time_steps < 2 {
        return Err(Error::parameter("n_time_steps", n_time_steps as f64, "≥ 2"));
    }
    xi.expect_kind(sys.kind())?;
    xi.grid().check_same(&u.grid())?;
    let stamps = time_stamps(xi.grid().n_cells(), t_start, t_end, n_time_steps);
    let free = free_evolution(sys, xi, &stamps)?;
    let mut current = march(sys, &free, u, &Nonlinearity::Zero, &stamps, None)?;
    let mut gaps = Vec::new();
    if !f.is_zero() {
        loop {
            let next = march(sys, &free, u, f, &stamps, Some(&current))?;
            let gap = sup_gap(&next, &current)?;
            gaps.push(gap);
            current = next;
            if gap <= picard.tolerance {
                break;
            }
            if gaps.len() >= picard.max_iterations || !gap.is_finite() {
                return Err(Error::PicardDivergence {
                    iterations: gaps.len(),
                    gap,
                });
            }
        }
    }
    Ok(Trajectory {
        stamps,
        states: current,
        picard_gaps: gaps,
    })
}
