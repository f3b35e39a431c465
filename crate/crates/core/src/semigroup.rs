//! Translation semigroups and the exchanger semigroups built on them.
//!
//! Every factor is evaluated in closed form: shifts by whole cells are exact
//! index moves, other shifts interpolate linearly between nodes, damping is
//! `e^{-at}` and stream coupling is the explicit `e^{A1 t}`.

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction, Kind, PairFunction, State, ALIGN_TOL};

/// Exchanger model and its coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Plant {
    /// `x_t = -x_θ - a x + b u`
    Monotubular { a: f64, b: f64 },
    /// Two parallel streams exchanging heat with capacities `h1`, `h2`.
    TwoStream { h1: f64, h2: f64, b1: f64, b2: f64 },
}

/// A plant together with the steering horizon `T` and the margin `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemSpec {
    plant: Plant,
    horizon: f64,
    eps: f64,
}

impl SystemSpec {
    pub fn new(plant: Plant, horizon: f64, eps: f64) -> Result<Self> {
        match plant {
            Plant::Monotubular { a, b } => {
                positive("a", a)?;
                nonzero("b", b)?;
            }
            Plant::TwoStream { h1, h2, b1, b2 } => {
                positive("h1", h1)?;
                positive("h2", h2)?;
                nonzero("b1", b1)?;
                nonzero("b2", b2)?;
            }
        }
        positive("horizon", horizon)?;
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::parameter("epsilon", eps, "in (0, 1/2)"));
        }
        Ok(Self { plant, horizon, eps })
    }

    pub fn monotubular(a: f64, b: f64, horizon: f64, eps: f64) -> Result<Self> {
        Self::new(Plant::Monotubular { a, b }, horizon, eps)
    }

    pub fn two_stream(h1: f64, h2: f64, b1: f64, b2: f64, horizon: f64, eps: f64) -> Result<Self> {
        Self::new(Plant::TwoStream { h1, h2, b1, b2 }, horizon, eps)
    }

    pub fn plant(&self) -> Plant {
        self.plant
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn kind(&self) -> Kind {
        match self.plant {
            Plant::Monotubular { .. } => Kind::Scalar,
            Plant::TwoStream { .. } => Kind::Pair,
        }
    }

    /// `ε` snapped onto `grid`.
    pub fn margin(&self, grid: Grid) -> Result<crate::grid::Margin> {
        crate::grid::Margin::snapped(grid, self.eps)
    }

    /// Input gains, one per component.
    pub fn gains(&self) -> Vec<f64> {
        match self.plant {
            Plant::Monotubular { b, .. } => vec![b],
            Plant::TwoStream { b1, b2, .. } => vec![b1, b2],
        }
    }

    /// `K = sup_{[0,T]} ‖S(t)‖` in the L2 norm.
    ///
    /// Monotubular damping gives 1. For two streams the coupling factor is
    /// affine in `e^{-(h1+h2)t}`, so its spectral norm is convex along the
    /// orbit and the supremum sits at `t = 0` or `t = T`.
    pub fn semigroup_bound(&self) -> f64 {
        match self.plant {
            Plant::Monotubular { .. } => 1.0,
            Plant::TwoStream { h1, h2, .. } => {
                let e = coupling_exp(h1, h2, self.horizon).expect("validated");
                e.spectral_norm().max(1.0)
            }
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::parameter(name, v, "> 0"));
    }
    Ok(())
}

fn nonzero(name: &'static str, v: f64) -> Result<()> {
    if v == 0.0 || !v.is_finite() {
        return Err(Error::parameter(name, v, "≠ 0"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Adjoint,
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::parameter("t", t, "≥ 0"));
    }
    Ok(())
}

/// Left translation `[T(t)x](θ) = x(θ - t)` for `θ ≥ t`, zero inflow otherwise.
pub fn translate_left(x: &GridFunction, t: f64) -> Result<GridFunction> {
    check_time(t)?;
    let grid = x.grid();
    Ok(GridFunction::from_raw(grid, shift(x.values(), t * grid.n_cells() as f64, Side::Left)))
}

/// Right translation `[T*(t)x](θ) = x(θ + t)` for `θ + t ≤ 1`, zero otherwise.
pub fn translate_right(x: &GridFunction, t: f64) -> Result<GridFunction> {
    check_time(t)?;
    let grid = x.grid();
    Ok(GridFunction::from_raw(grid, shift(x.values(), t * grid.n_cells() as f64, Side::Right)))
}

#[derive(Clone, Copy)]
enum Side {
    Left,
    Right,
}

/// Shifts node samples by `s` cells with zero extension.
fn shift(x: &[f64], s: f64, side: Side) -> Vec<f64> {
    let n = x.len() - 1;
    let mut out = vec![0.0; x.len()];
    if s >= n as f64 - ALIGN_TOL {
        // nilpotent from t = 1 on
        return out;
    }
    let k = s.round();
    if (s - k).abs() <= ALIGN_TOL {
        let k = k as usize;
        match side {
            Side::Left => out[k..].copy_from_slice(&x[..=n - k]),
            Side::Right => out[..=n - k].copy_from_slice(&x[k..]),
        }
        return out;
    }
    let whole = s.floor() as usize;
    let frac = s - s.floor();
    match side {
        Side::Left => {
            // θ_i - t = (i - whole - 1) + (1 - frac) cells
            for i in whole + 1..=n {
                let j = i - whole - 1;
                out[i] = frac * x[j] + (1.0 - frac) * x[j + 1];
            }
        }
        Side::Right => {
            // θ_i + t = (i + whole) + frac cells, must stay ≤ n
            for i in 0..n - whole {
                let j = i + whole;
                out[i] = (1.0 - frac) * x[j] + frac * x[j + 1];
            }
        }
    }
    out
}

/// The 2×2 matrix `e^{A1 t}` coupling the two streams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingMatrix {
    pub entries: [[f64; 2]; 2],
}

impl CouplingMatrix {
    pub fn identity() -> Self {
        Self {
            entries: [[1.0, 0.0], [0.0, 1.0]],
        }
    }

    pub fn transpose(&self) -> Self {
        let e = self.entries;
        Self {
            entries: [[e[0][0], e[1][0]], [e[0][1], e[1][1]]],
        }
    }

    pub fn row_sums(&self) -> [f64; 2] {
        let e = self.entries;
        [e[0][0] + e[0][1], e[1][0] + e[1][1]]
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        let e = self.entries;
        [e[0][0] * v[0] + e[0][1] * v[1], e[1][0] * v[0] + e[1][1] * v[1]]
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        let e = self.entries;
        // eigenvalues of EᵀE
        let p = e[0][0] * e[0][0] + e[1][0] * e[1][0];
        let r = e[0][1] * e[0][1] + e[1][1] * e[1][1];
        let q = e[0][0] * e[0][1] + e[1][0] * e[1][1];
        let mid = 0.5 * (p + r);
        let rad = (0.25 * (p - r) * (p - r) + q * q).sqrt();
        (mid + rad).sqrt()
    }
}

/// Closed form of `e^{A1 t}` with `A1 = [[-h1, h1], [h2, -h2]]`.
pub fn coupling_exp(h1: f64, h2: f64, t: f64) -> Result<CouplingMatrix> {
    positive("h1", h1)?;
    positive("h2", h2)?;
    check_time(t)?;
    let h = h1 + h2;
    let decay = (-h * t).exp();
    // 1 - e^{-ht} without cancellation
    let rise = -(-h * t).exp_m1();
    Ok(CouplingMatrix {
        entries: [
            [(h2 + h1 * decay) / h, h1 * rise / h],
            [h2 * rise / h, (h1 + h2 * decay) / h],
        ],
    })
}

fn couple(pair: &PairFunction, m: &CouplingMatrix) -> PairFunction {
    let (a, b) = (pair.first().values(), pair.second().values());
    let grid = pair.grid();
    let mut first = Vec::with_capacity(a.len());
    let mut second = Vec::with_capacity(a.len());
    for (x1, x2) in a.iter().zip(b) {
        let [y1, y2] = m.apply([*x1, *x2]);
        first.push(y1);
        second.push(y2);
    }
    PairFunction::new(
        GridFunction::from_raw(grid, first),
        GridFunction::from_raw(grid, second),
    )
    .expect("same grid")
}

fn translate_state(state: &State, t: f64, direction: Direction) -> Result<State> {
    let parts = state
        .components()
        .into_iter()
        .map(|c| match direction {
            Direction::Forward => translate_left(c, t),
            Direction::Adjoint => translate_right(c, t),
        })
        .collect::<Result<Vec<_>>>()?;
    State::from_components(parts)
}

/// `S(t)x` or `S*(t)x` for the exchanger described by `sys`.
pub fn apply_semigroup(sys: &SystemSpec, t: f64, state: &State, direction: Direction) -> Result<State> {
    check_time(t)?;
    state.expect_kind(sys.kind())?;
    match sys.plant {
        Plant::Monotubular { a, .. } => {
            let damping = (-a * t).exp();
            Ok(translate_state(state, t, direction)?.scaled(damping))
        }
        Plant::TwoStream { h1, h2, .. } => {
            let e = coupling_exp(h1, h2, t)?;
            match (direction, state) {
                (Direction::Forward, _) => match translate_state(state, t, direction)? {
                    State::Pair(p) => Ok(State::Pair(couple(&p, &e))),
                    State::Scalar(_) => unreachable!("kind checked"),
                },
                (Direction::Adjoint, State::Pair(p)) => {
                    translate_state(&State::Pair(couple(p, &e.transpose())), t, direction)
                }
                (Direction::Adjoint, State::Scalar(_)) => unreachable!("kind checked"),
            }
        }
    }
}

/// Coupling applied before the translation; equal to [`apply_semigroup`]
/// because the two factors commute.
pub fn apply_semigroup_coupling_first(sys: &SystemSpec, t: f64, state: &State) -> Result<State> {
    check_time(t)?;
    state.expect_kind(sys.kind())?;
    match (sys.plant, state) {
        (Plant::TwoStream { h1, h2, .. }, State::Pair(p)) => {
            let e = coupling_exp(h1, h2, t)?;
            translate_state(&State::Pair(couple(p, &e)), t, Direction::Forward)
        }
        _ => apply_semigroup(sys, t, state, Direction::Forward),
    }
}

/// Multiplies by the (diagonal, self-adjoint) input operator `B = B*`.
pub fn apply_input(sys: &SystemSpec, state: &State) -> Result<State> {
    state.expect_kind(sys.kind())?;
    let gains = sys.gains();
    let parts = state
        .components()
        .into_iter()
        .zip(gains)
        .map(|(c, g)| c.scaled(g))
        .collect();
    State::from_components(parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid {
        Grid::new(n).unwrap()
    }

    #[test]
    fn translate_left_examples() {
        let g = grid(8);
        let one = GridFunction::from_fn(g, |_| 1.0);
        let y = translate_left(&one, 0.25).unwrap();
        assert_eq!(y.values(), &[0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        let x = GridFunction::from_fn(g, |t| (5.0 * t).sin() + t);
        assert_eq!(translate_left(&x, 0.0).unwrap(), x);
        assert_eq!(translate_left(&x, 1.0).unwrap(), GridFunction::zeros(g));
        assert_eq!(translate_left(&x, 3.7).unwrap(), GridFunction::zeros(g));
        assert!(translate_left(&x, -0.1).is_err());
    }

    #[test]
    fn translate_right_examples() {
        let g = grid(8);
        let one = GridFunction::from_fn(g, |_| 1.0);
        let y = translate_right(&one, 0.25).unwrap();
        assert_eq!(y.values(), &[1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0]);
        assert_eq!(translate_right(&one, 1.0).unwrap(), GridFunction::zeros(g));
        assert!(translate_right(&one, -1e-3).is_err());
    }

    #[test]
    fn off_grid_shift_interpolates() {
        let g = grid(10);
        let lin = GridFunction::from_fn(g, |t| t);
        let y = translate_left(&lin, 0.25).unwrap();
        for (i, v) in y.values().iter().enumerate() {
            let th = g.node(i);
            let expect = if th >= 0.25 { th - 0.25 } else { 0.0 };
            assert!((v - expect).abs() < 1e-15, "node {i}: {v} vs {expect}");
        }
        let y = translate_right(&lin, 0.25).unwrap();
        for (i, v) in y.values().iter().enumerate() {
            let th = g.node(i);
            let expect = if th + 0.25 <= 1.0 { th + 0.25 } else { 0.0 };
            assert!((v - expect).abs() < 1e-15, "node {i}: {v} vs {expect}");
        }
    }

    #[test]
    fn inflow_node_takes_boundary_value() {
        let g = grid(4);
        let x = GridFunction::from_fn(g, |t| 2.0 + t);
        // θ - t = 0 exactly at node 1
        let y = translate_left(&x, 0.25).unwrap();
        assert_eq!(y.values()[1], 2.0);
        assert_eq!(y.values()[0], 0.0);
    }

    #[test]
    fn coupling_examples() {
        let id = coupling_exp(0.3, 0.9, 0.0).unwrap();
        assert_eq!(id, CouplingMatrix::identity());

        let e = coupling_exp(0.5, 0.5, 2f64.ln()).unwrap();
        let want = [[0.75, 0.25], [0.25, 0.75]];
        for r in 0..2 {
            for c in 0..2 {
                assert!((e.entries[r][c] - want[r][c]).abs() < 1e-15);
            }
        }

        let e = coupling_exp(1.0, 2.0, 50.0).unwrap();
        let want = [[2.0 / 3.0, 1.0 / 3.0], [2.0 / 3.0, 1.0 / 3.0]];
        for r in 0..2 {
            for c in 0..2 {
                assert!((e.entries[r][c] - want[r][c]).abs() < 1e-12);
            }
        }
        assert!(coupling_exp(0.0, 1.0, 1.0).is_err());
        assert!(coupling_exp(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn coupling_derivative_at_zero_is_generator() {
        let (h1, h2) = (0.7, 1.9);
        let dt = 1e-7;
        let e = coupling_exp(h1, h2, dt).unwrap();
        let gen = [[-h1, h1], [h2, -h2]];
        let id = CouplingMatrix::identity();
        for r in 0..2 {
            for c in 0..2 {
                let d = (e.entries[r][c] - id.entries[r][c]) / dt;
                assert!((d - gen[r][c]).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn monotubular_closed_form() {
        let g = grid(8);
        let sys = SystemSpec::monotubular(1.0, 1.0, 1.0, 0.25).unwrap();
        let one: State = GridFunction::from_fn(g, |_| 1.0).into();
        let y = apply_semigroup(&sys, 0.5, &one, Direction::Forward).unwrap();
        let d = (-0.5f64).exp();
        let y = &y.components()[0];
        for i in 0..=8 {
            let want = if i >= 4 { d } else { 0.0 };
            assert_eq!(y.values()[i], want);
        }
        assert_eq!(apply_semigroup(&sys, 0.0, &one, Direction::Adjoint).unwrap(), one);
    }

    #[test]
    fn kind_mismatch_is_reported() {
        let g = grid(8);
        let sys = SystemSpec::two_stream(0.5, 0.5, 1.0, 1.0, 1.0, 0.25).unwrap();
        let x: State = GridFunction::zeros(g).into();
        assert!(matches!(
            apply_semigroup(&sys, 0.1, &x, Direction::Forward),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn two_stream_factors_commute_on_grid() {
        let g = grid(64);
        let sys = SystemSpec::two_stream(0.4, 1.3, 1.0, -2.0, 1.0, 0.125).unwrap();
        let x: State = PairFunction::new(
            GridFunction::from_fn(g, |t| (7.0 * t).sin()),
            GridFunction::from_fn(g, |t| 1.0 - t * t),
        )
        .unwrap()
        .into();
        for k in [0, 1, 5, 17, 40, 63, 64] {
            let t = k as f64 / 64.0;
            let a = apply_semigroup(&sys, t, &x, Direction::Forward).unwrap();
            let b = apply_semigroup_coupling_first(&sys, t, &x).unwrap();
            assert_eq!(a, b, "t = {t}");
        }
    }

    #[test]
    fn spectral_norm_of_lopsided_limit_exceeds_one() {
        let e = coupling_exp(1.0, 9.0, 40.0).unwrap();
        assert!(e.spectral_norm() > 1.2);
        let sym = coupling_exp(0.5, 0.5, 3.0).unwrap();
        assert!((sym.spectral_norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn invalid_systems_rejected() {
        assert!(SystemSpec::monotubular(0.0, 1.0, 1.0, 0.1).is_err());
        assert!(SystemSpec::monotubular(1.0, 0.0, 1.0, 0.1).is_err());
        assert!(SystemSpec::monotubular(1.0, 1.0, 0.0, 0.1).is_err());
        assert!(SystemSpec::monotubular(1.0, 1.0, 1.0, 0.6).is_err());
        assert!(SystemSpec::two_stream(1.0, 0.0, 1.0, 1.0, 1.0, 0.1).is_err());
        assert!(SystemSpec::two_stream(1.0, 1.0, 1.0, 0.0, 1.0, 0.1).is_err());
    }
}
