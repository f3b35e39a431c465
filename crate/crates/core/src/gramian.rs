//! Controllability Gramians `Q(t) = ∫₀ᵗ S(s)BB*S*(s) ds`.
//!
//! For both exchangers `S(s)S*(s)` is multiplication by the indicator of
//! `s ≤ θ`, so `Q(t)` acts pointwise in θ: a scalar multiplier for the
//! monotubular plant and a symmetric 2×2 block for two streams, each a
//! function of the effective time `m = min(t, θ)` only. The partial
//! Gramian `Q_{L_ε}(t) = L_ε Q(t) L_ε*` is the same multiplier read on
//! `[ε, 1-ε]`, which is why its inverse and norm are exact nodewise.

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction, Margin, RestrictedFunction, State};
use crate::semigroup::{apply_input, apply_semigroup, Direction, Plant, SystemSpec};

type Mat2 = [[f64; 2]; 2];

/// Value of the Gramian multiplier at one point θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GramianMultiplier {
    Scalar(f64),
    Block(Mat2),
}

impl GramianMultiplier {
    pub fn min_eigenvalue(&self) -> f64 {
        match *self {
            GramianMultiplier::Scalar(m) => m,
            GramianMultiplier::Block(q) => sym_eigen(q).0,
        }
    }

    pub fn max_eigenvalue(&self) -> f64 {
        match *self {
            GramianMultiplier::Scalar(m) => m,
            GramianMultiplier::Block(q) => sym_eigen(q).1,
        }
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        match *self {
            GramianMultiplier::Scalar(m) => vec![m * v[0]],
            GramianMultiplier::Block(q) => vec![
                q[0][0] * v[0] + q[0][1] * v[1],
                q[1][0] * v[0] + q[1][1] * v[1],
            ],
        }
    }

    fn solve(&self, v: &[f64]) -> Vec<f64> {
        match *self {
            GramianMultiplier::Scalar(m) => vec![v[0] / m],
            GramianMultiplier::Block(q) => {
                let det = q[0][0] * q[1][1] - q[0][1] * q[1][0];
                vec![
                    (q[1][1] * v[0] - q[0][1] * v[1]) / det,
                    (q[0][0] * v[1] - q[1][0] * v[0]) / det,
                ]
            }
        }
    }
}

/// Eigenvalues (min, max) of a symmetric 2×2 matrix.
fn sym_eigen(q: Mat2) -> (f64, f64) {
    let mid = 0.5 * (q[0][0] + q[1][1]);
    let rad = (0.25 * (q[0][0] - q[1][1]).powi(2) + q[0][1] * q[1][0]).sqrt();
    (mid - rad, mid + rad)
}

/// `u` and `v` of the two-stream multiplier with `h1 = h2 = 1/2`,
/// `b1 = b2 = 1`, as functions of the effective time `m`.
pub fn two_stream_uv(m: f64) -> (f64, f64) {
    let e = (-2.0 * m).exp();
    (2.0 * m - e + 1.0, 2.0 * m + e - 1.0)
}

/// `(1 - e^{-z})/z`-type integral `∫₀^m e^{-rs} ds` computed without cancellation.
fn decay_integral(rate: f64, m: f64) -> f64 {
    if rate == 0.0 {
        m
    } else {
        -(-rate * m).exp_m1() / rate
    }
}

/// Multiplier as a function of the effective time `m = min(t, θ)`.
pub(crate) fn multiplier_at(plant: Plant, m: f64) -> GramianMultiplier {
    match plant {
        Plant::Monotubular { a, b } => GramianMultiplier::Scalar(b * b * decay_integral(2.0 * a, m)),
        Plant::TwoStream { h1, h2, b1, b2 } => {
            // e^{A1 s} = P + e^{-hs} R with P the rank-one limit and R = I - P.
            let h = h1 + h2;
            let (p1, p2) = (h2 / h, h1 / h);
            let (d1, d2) = (b1 * b1, b2 * b2);
            let c = p1 * p1 * d1 + p2 * p2 * d2;
            let delta = p1 * d1 - p2 * d2;
            let cross: Mat2 = [
                [2.0 * delta * p2, delta * (p2 - p1)],
                [delta * (p2 - p1), -2.0 * delta * p1],
            ];
            let fast: Mat2 = [[p2 * p2, -p1 * p2], [-p1 * p2, p1 * p1]];
            let phi1 = decay_integral(h, m);
            let phi2 = decay_integral(2.0 * h, m) * (d1 + d2);
            let mut q = [[0.0; 2]; 2];
            for r in 0..2 {
                for s in 0..2 {
                    q[r][s] = m * c + phi1 * cross[r][s] + phi2 * fast[r][s];
                }
            }
            GramianMultiplier::Block(q)
        }
    }
}

fn check_positive_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::parameter("t", t, "> 0"));
    }
    Ok(())
}

/// Multiplier of `Q(t)` at the point θ.
pub fn gramian_multiplier(sys: &SystemSpec, t: f64, theta: f64) -> Result<GramianMultiplier> {
    check_positive_time(t)?;
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::parameter("theta", theta, "in [0, 1]"));
    }
    Ok(multiplier_at(sys.plant(), t.min(theta)))
}

fn nodewise(x: &State, mut f: impl FnMut(usize, &[f64]) -> Vec<f64>) -> State {
    let grid = x.grid();
    let comps = x.components();
    let n = comps.len();
    let mut out = vec![Vec::with_capacity(grid.n_nodes()); n];
    let mut v = vec![0.0; n];
    for i in 0..grid.n_nodes() {
        for (slot, c) in v.iter_mut().zip(&comps) {
            *slot = c.values()[i];
        }
        for (col, y) in out.iter_mut().zip(f(i, &v)) {
            col.push(y);
        }
    }
    State::from_components(out.into_iter().map(|c| GridFunction::from_raw(grid, c)).collect())
        .expect("shape preserved")
}

/// `Q(t)x` from the closed-form multiplier.
pub fn apply_gramian(sys: &SystemSpec, t: f64, x: &State) -> Result<State> {
    check_positive_time(t)?;
    x.expect_kind(sys.kind())?;
    let grid = x.grid();
    let plant = sys.plant();
    Ok(nodewise(x, |i, v| multiplier_at(plant, t.min(grid.node(i))).apply(v)))
}

/// Placement of the `s`-nodes of [`gramian_oracle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OracleNodes {
    /// Uniform nodes rounded to whole cells (the last node stays at `t`).
    /// Every factor is then an exact shift and `S(s)S*(s)` is exactly the
    /// indicator of `s < θ`.
    #[default]
    GridAligned,
    /// Uniform nodes `j t / n_steps`. Off-grid factors smear the edge of
    /// `S*(s)x` at `θ = 1 - s`, which costs an `O(1)` error on the last node.
    Uniform,
}

/// `Q(t)x` by composite trapezoid in `s` over `S(s) B B* S*(s) x`, using
/// only the semigroup and input operators.
pub fn gramian_oracle(sys: &SystemSpec, t: f64, x: &State, n_steps: usize, nodes: OracleNodes) -> Result<State> {
    if n_steps < 2 {
        return Err(Error::parameter("n_steps", n_steps as f64, "≥ 2"));
    }
    check_positive_time(t)?;
    x.expect_kind(sys.kind())?;
    let cells = x.grid().n_cells() as f64;
    let mut s_nodes: Vec<f64> = (0..n_steps)
        .map(|j| {
            let s = j as f64 * t / n_steps as f64;
            match nodes {
                OracleNodes::Uniform => s,
                OracleNodes::GridAligned => ((s * cells).round() / cells).min(t),
            }
        })
        .collect();
    s_nodes.push(t);
    s_nodes.dedup();
    let terms = s_nodes
        .iter()
        .map(|&s| {
            let back = apply_semigroup(sys, s, x, Direction::Adjoint)?;
            let pushed = apply_input(sys, &apply_input(sys, &back)?)?;
            apply_semigroup(sys, s, &pushed, Direction::Forward)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut acc = State::zeros(x.grid(), x.kind());
    for (k, w) in s_nodes.windows(2).enumerate() {
        let half = 0.5 * (w[1] - w[0]);
        acc = acc.axpy(half, &terms[k])?.axpy(half, &terms[k + 1])?;
    }
    Ok(acc)
}

fn restricted_nodewise(
    w: &RestrictedFunction,
    mut f: impl FnMut(usize, &[f64]) -> Vec<f64>,
) -> RestrictedFunction {
    let comps = w.components();
    let len = w.margin().len();
    let mut out = vec![Vec::with_capacity(len); comps.len()];
    let mut v = vec![0.0; comps.len()];
    for k in 0..len {
        for (slot, c) in v.iter_mut().zip(comps) {
            *slot = c[k];
        }
        for (col, y) in out.iter_mut().zip(f(k, &v)) {
            col.push(y);
        }
    }
    RestrictedFunction::from_raw(w.margin(), out)
}

fn window_multipliers(sys: &SystemSpec, t: f64, margin: Margin) -> Vec<GramianMultiplier> {
    let grid = margin.grid();
    (margin.lo()..=margin.hi())
        .map(|i| multiplier_at(sys.plant(), t.min(grid.node(i))))
        .collect()
}

fn check_restricted(sys: &SystemSpec, w: &RestrictedFunction) -> Result<()> {
    if w.kind() != sys.kind() {
        return Err(Error::KindMismatch {
            expected: sys.kind().name(),
            found: w.kind().name(),
        });
    }
    Ok(())
}

/// `Q_{L_ε}(t) w`.
pub fn apply_partial_gramian(sys: &SystemSpec, t: f64, w: &RestrictedFunction) -> Result<RestrictedFunction> {
    check_positive_time(t)?;
    check_restricted(sys, w)?;
    let mults = window_multipliers(sys, t, w.margin());
    Ok(restricted_nodewise(w, |k, v| mults[k].apply(v)))
}

/// `Q_{L_ε}(t)^{-1} w`, inverted node by node.
pub fn apply_partial_gramian_inverse(
    sys: &SystemSpec,
    t: f64,
    w: &RestrictedFunction,
) -> Result<RestrictedFunction> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Singular(format!("Q_L(t) is zero at t = {t}")));
    }
    check_restricted(sys, w)?;
    if w.margin().cells() == 0 {
        return Err(Error::Singular("multiplier vanishes at θ = 0 without a margin".into()));
    }
    let mults = window_multipliers(sys, t, w.margin());
    if let Some(bad) = mults.iter().find(|m| !(m.min_eigenvalue() > 0.0)) {
        return Err(Error::Singular(format!(
            "multiplier eigenvalue {} on the window",
            bad.min_eigenvalue()
        )));
    }
    Ok(restricted_nodewise(w, |k, v| mults[k].solve(v)))
}

/// Coercivity of `Q_{L_ε}(t)` and the condition (E) product `t ‖Q_{L_ε}^{-1}(t)‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoercivityReport {
    pub t: f64,
    pub eps: f64,
    /// Smallest multiplier eigenvalue over the window nodes.
    pub c_min: f64,
    pub inv_norm: f64,
    pub product: f64,
    /// Short-time cap `ε / λ_min(Q block at m = ε)`; for the monotubular
    /// plant this is `2aε / (b²(1 - e^{-2aε}))`.
    pub condition_e_bound: f64,
    /// Bound on `t ‖Q_{L_ε}^{-1}(t)‖` over the whole horizon `(0, T]`.
    pub horizon_bound: f64,
    /// The published constant (`b^{-2}` monotubular, `1` two-stream); it is
    /// the `t → 0` infimum of the product, not an upper bound.
    pub published_constant: f64,
    pub coercive: bool,
    pub pass: bool,
}

pub fn coercivity_report(sys: &SystemSpec, t: f64, margin: Margin) -> Result<CoercivityReport> {
    check_positive_time(t)?;
    let mults = window_multipliers(sys, t, margin);
    // left-to-right minimum
    let c_min = mults
        .iter()
        .map(GramianMultiplier::min_eigenvalue)
        .fold(f64::INFINITY, f64::min);
    let coercive = c_min > 0.0;
    let inv_norm = if coercive { 1.0 / c_min } else { f64::INFINITY };
    let product = t * inv_norm;
    let eps = margin.eps();
    let condition_e_bound = short_time_cap(sys, eps);
    let horizon_bound = if margin.cells() == 0 {
        f64::INFINITY
    } else {
        let edge = multiplier_at(sys.plant(), eps).min_eigenvalue();
        condition_e_bound.max(sys.horizon() / edge)
    };
    let published_constant = match sys.plant() {
        Plant::Monotubular { b, .. } => 1.0 / (b * b),
        Plant::TwoStream { .. } => 1.0,
    };
    Ok(CoercivityReport {
        t,
        eps,
        c_min,
        inv_norm,
        product,
        condition_e_bound,
        horizon_bound,
        published_constant,
        coercive,
        pass: coercive && product <= condition_e_bound + 1e-9,
    })
}

fn short_time_cap(sys: &SystemSpec, eps: f64) -> f64 {
    if eps > 0.0 {
        eps / multiplier_at(sys.plant(), eps).min_eigenvalue()
    } else {
        // m / λ_min(Q(m)) → 1 / λ_min(BB*) as m → 0
        let g = sys.gains();
        1.0 / g.iter().map(|b| b * b).fold(f64::INFINITY, f64::min)
    }
}

/// Where the test function of [`noncoercivity_demo`] lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundarySupport {
    /// `[0, δ]`, next to the inflow boundary.
    Inflow,
    /// `[0, δ] ∪ [1 - δ, 1]`.
    BothEnds,
}

/// Rayleigh quotient `⟨Q(t)x_δ, x_δ⟩ / ‖x_δ‖²` for an indicator `x_δ`
/// supported near the boundary (every component for two streams).
pub fn noncoercivity_demo(
    sys: &SystemSpec,
    t: f64,
    delta: f64,
    grid: Grid,
    support: BoundarySupport,
) -> Result<f64> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::parameter("delta", delta, "in (0, 1/2)"));
    }
    if delta < grid.spacing() {
        return Err(Error::parameter("delta", delta, "at least one cell"));
    }
    let tol = 1e-12;
    let indicator = GridFunction::from_fn(grid, |th| {
        let inside = th <= delta + tol
            || (support == BoundarySupport::BothEnds && th >= 1.0 - delta - tol);
        if inside {
            1.0
        } else {
            0.0
        }
    });
    let x = State::from_components(vec![indicator; sys.kind().components()])?;
    let qx = apply_gramian(sys, t, &x)?;
    Ok(qx.inner(&x)? / x.inner(&x)?)
}

/// `⟨w, Q_{L_ε}(t)^{-1} w⟩`, the minimum steering energy for the output `w`.
pub fn minimum_energy(sys: &SystemSpec, t: f64, alpha: &RestrictedFunction) -> Result<f64> {
    let w = apply_partial_gramian_inverse(sys, t, alpha)?;
    alpha.inner(&w)
}

/// Smallest multiplier eigenvalue over all grid nodes (the full interval).
pub fn full_interval_c_min(sys: &SystemSpec, t: f64, grid: Grid) -> Result<f64> {
    check_positive_time(t)?;
    let plant = sys.plant();
    let vals: Vec<f64> = grid
        .nodes()
        .map(|th| multiplier_at(plant, t.min(th)).min_eigenvalue())
        .collect();
    Ok(vals.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Trapezoid `⟨Q(t)x, x⟩` without forming `Q(t)x`.
pub fn quadratic_form(sys: &SystemSpec, t: f64, x: &State) -> Result<f64> {
    let qx = apply_gramian(sys, t, x)?;
    qx.inner(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{restrict, PairFunction};

    fn mono(a: f64, b: f64) -> SystemSpec {
        SystemSpec::monotubular(a, b, 1.0, 0.1).unwrap()
    }

    fn special() -> SystemSpec {
        SystemSpec::two_stream(0.5, 0.5, 1.0, 1.0, 1.0, 0.1).unwrap()
    }

    #[test]
    fn monotubular_multiplier_examples() {
        let m = gramian_multiplier(&mono(0.5, 1.0), 1.0, 0.5).unwrap();
        let GramianMultiplier::Scalar(v) = m else { panic!() };
        assert!((v - (1.0 - (-0.5f64).exp())).abs() < 1e-15);
        assert!((v - 0.39347).abs() < 1e-5);
        assert_eq!(gramian_multiplier(&mono(1.0, 2.0), 0.7, 0.0).unwrap(), GramianMultiplier::Scalar(0.0));
        assert!(gramian_multiplier(&mono(1.0, 1.0), 0.0, 0.5).is_err());
    }

    #[test]
    fn two_stream_special_case_matches_uv() {
        let (u, v) = two_stream_uv(0.1);
        assert!((u - 0.38127).abs() < 1e-5);
        assert!((v - 0.01873).abs() < 1e-5);
        for &(t, th) in &[(0.1f64, 0.5f64), (0.3, 0.2), (1.0, 0.95), (0.05, 0.0)] {
            let m = t.min(th);
            let (u, v) = two_stream_uv(m);
            let GramianMultiplier::Block(q) = gramian_multiplier(&special(), t, th).unwrap() else {
                panic!()
            };
            let want = [[u / 4.0, v / 4.0], [v / 4.0, u / 4.0]];
            for r in 0..2 {
                for c in 0..2 {
                    assert!((q[r][c] - want[r][c]).abs() < 1e-15, "t={t} θ={th}");
                }
            }
            assert!((u + v - 4.0 * m).abs() < 1e-14);
            assert!((u - v - (2.0 - 2.0 * (-2.0 * m).exp())).abs() < 1e-14);
        }
    }

    #[test]
    fn general_block_matches_numerical_integral() {
        // ∫₀^m E(s) D E(s)ᵀ ds by fine Simpson quadrature of the closed-form coupling
        let (h1, h2, b1, b2) = (0.3, 1.7, 1.4, -0.6);
        let sys = SystemSpec::two_stream(h1, h2, b1, b2, 1.0, 0.1).unwrap();
        let m = 0.37;
        let n = 2000;
        let mut acc = [[0.0; 2]; 2];
        for j in 0..=n {
            let s = m * j as f64 / n as f64;
            let w = if j == 0 || j == n {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            } * m
                / (3.0 * n as f64);
            let e = crate::semigroup::coupling_exp(h1, h2, s).unwrap().entries;
            let d = [b1 * b1, b2 * b2];
            for r in 0..2 {
                for c in 0..2 {
                    acc[r][c] += w * (e[r][0] * d[0] * e[c][0] + e[r][1] * d[1] * e[c][1]);
                }
            }
        }
        let GramianMultiplier::Block(q) = gramian_multiplier(&sys, 0.9, m).unwrap() else { panic!() };
        for r in 0..2 {
            for c in 0..2 {
                assert!((q[r][c] - acc[r][c]).abs() < 1e-12, "{q:?} vs {acc:?}");
            }
        }
    }

    #[test]
    fn partial_inverse_small_time_monotubular() {
        let g = Grid::new(100).unwrap();
        let sys = mono(1.0, 1.0);
        let margin = sys.margin(g).unwrap();
        let t = 0.05;
        let w = RestrictedFunction::new(margin, vec![(0..margin.len()).map(|k| 1.0 + k as f64 * 0.01).collect()]).unwrap();
        let m = (1.0 - (-2.0f64 * t).exp()) / 2.0;
        let inv = apply_partial_gramian_inverse(&sys, t, &w).unwrap();
        for (a, b) in inv.components()[0].iter().zip(&w.components()[0]) {
            assert!((a - b / m).abs() < 1e-12 * (b / m).abs());
        }
    }

    #[test]
    fn partial_inverse_two_stream_eigen_directions() {
        let g = Grid::new(100).unwrap();
        let sys = special();
        let margin = sys.margin(g).unwrap();
        let t = 0.05;
        let len = margin.len();
        let sum = RestrictedFunction::new(margin, vec![vec![1.0; len], vec![1.0; len]]).unwrap();
        let diff = RestrictedFunction::new(margin, vec![vec![1.0; len], vec![-1.0; len]]).unwrap();
        // block ¼[[u,v],[v,u]]: eigenvalue t on (1,1), (1-e^{-2t})/2 on (1,-1)
        let a = apply_partial_gramian_inverse(&sys, t, &sum).unwrap();
        let b = apply_partial_gramian_inverse(&sys, t, &diff).unwrap();
        let ks = 1.0 / t;
        let kd = 2.0 / (1.0 - (-2.0 * t).exp());
        for k in 0..len {
            assert!((a.components()[0][k] - ks).abs() < 1e-10);
            assert!((a.components()[1][k] - ks).abs() < 1e-10);
            assert!((b.components()[0][k] - kd).abs() < 1e-10);
            assert!((b.components()[1][k] + kd).abs() < 1e-10);
        }
    }

    #[test]
    fn partial_inverse_rejects_degenerate() {
        let g = Grid::new(100).unwrap();
        let sys = mono(1.0, 1.0);
        let margin = sys.margin(g).unwrap();
        let w = RestrictedFunction::new(margin, vec![vec![1.0; margin.len()]]).unwrap();
        assert!(matches!(
            apply_partial_gramian_inverse(&sys, 0.0, &w),
            Err(Error::Singular(_))
        ));
        let full = Margin::full(g);
        let x: State = GridFunction::from_fn(g, |_| 1.0).into();
        let wf = restrict(&x, full).unwrap();
        assert!(matches!(
            apply_partial_gramian_inverse(&sys, 0.5, &wf),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn coercivity_examples() {
        let g = Grid::new(1000).unwrap();
        let sys = mono(1.0, 1.0);
        let r = coercivity_report(&sys, 0.05, sys.margin(g).unwrap()).unwrap();
        assert!((r.c_min - (1.0 - (-0.1f64).exp()) / 2.0).abs() < 1e-15);
        assert!((r.c_min - 0.047581).abs() < 1e-6);
        assert!((r.product - 1.05084).abs() < 1e-5);
        assert!((r.condition_e_bound - 0.2 / (1.0 - (-0.2f64).exp())).abs() < 1e-14);
        assert!((r.condition_e_bound - 1.10334).abs() < 1e-5);
        assert!(r.pass);

        // two-stream special case: λ_min = (1 - e^{-2t})/2
        let r = coercivity_report(&special(), 0.05, special().margin(g).unwrap()).unwrap();
        assert!((r.c_min - (1.0 - (-0.1f64).exp()) / 2.0).abs() < 1e-15);
        assert!(r.pass);

        let full = coercivity_report(&sys, 0.5, Margin::full(g)).unwrap();
        assert_eq!(full.c_min, 0.0);
        assert!(!full.coercive && !full.pass);
    }

    #[test]
    fn noncoercivity_quotients() {
        let g = Grid::new(1024).unwrap();
        let sys = mono(1.0, 1.0);
        let mut prev = f64::INFINITY;
        for d in [0.1, 0.05, 0.025, 0.0125] {
            let q = noncoercivity_demo(&sys, 1.0, d, g, BoundarySupport::Inflow).unwrap();
            assert!(q <= d, "δ={d}: {q}");
            assert!(q < prev);
            prev = q;
        }
        assert!(noncoercivity_demo(&sys, 1.0, 0.6, g, BoundarySupport::Inflow).is_err());
        // the outflow end keeps a full multiplier
        let q = noncoercivity_demo(&sys, 1.0, 0.0125, g, BoundarySupport::BothEnds).unwrap();
        assert!(q > 0.2);
    }

    #[test]
    fn gramian_is_symmetric_pointwise() {
        let g = Grid::new(64).unwrap();
        let sys = SystemSpec::two_stream(0.2, 0.9, 2.0, 0.5, 1.0, 0.1).unwrap();
        let x: State = PairFunction::new(
            GridFunction::from_fn(g, |t| (4.0 * t).sin()),
            GridFunction::from_fn(g, |t| t - 0.4),
        )
        .unwrap()
        .into();
        let y: State = PairFunction::new(
            GridFunction::from_fn(g, |t| (2.0 * t).cos()),
            GridFunction::from_fn(g, |t| t * t),
        )
        .unwrap()
        .into();
        let a = apply_gramian(&sys, 0.6, &x).unwrap().inner(&y).unwrap();
        let b = x.inner(&apply_gramian(&sys, 0.6, &y).unwrap()).unwrap();
        assert!((a - b).abs() <= 1e-12 * x.norm() * y.norm());
    }

    #[test]
    fn oracle_agrees_with_closed_form() {
        let g = Grid::new(256).unwrap();
        let x: State = GridFunction::from_fn(g, |t| 1.0 + t + (3.0 * t).sin()).into();
        for sys in [mono(1.0, 1.0), special()] {
            let x = State::from_components(vec![x.components()[0].clone(); sys.kind().components()]).unwrap();
            for t in [0.1, 0.37, 1.0] {
                let closed = apply_gramian(&sys, t, &x).unwrap();
                let oracle = gramian_oracle(&sys, t, &x, 128, OracleNodes::GridAligned).unwrap();
                let rel = closed.sub(&oracle).unwrap().norm() / closed.norm();
                assert!(rel <= 5.0 * (g.spacing() + t / 128.0), "t={t}: {rel}");
            }
        }
        assert!(gramian_oracle(&mono(1.0, 1.0), 0.5, &x, 1, OracleNodes::Uniform).is_err());
    }
}
