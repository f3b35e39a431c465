//! Property and oracle checks shared by the acceptance suite and the
//! `selftest` command. Each check reports what it measured next to the
//! threshold it was held to; non-gating lines are informational.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dyadic::{steer_semilinear, DyadicOptions};
use crate::error::Result;
use crate::gramian::{
    apply_gramian, apply_partial_gramian, coercivity_report, gramian_oracle, minimum_energy,
    noncoercivity_demo, BoundarySupport, OracleNodes,
};
use crate::grid::{project, restrict, Grid, GridFunction, Kind, PairFunction, State};
use crate::presets::Preset;
use crate::semigroup::{
    apply_input, apply_semigroup, coupling_exp, translate_left, Direction, Plant, SystemSpec,
};
use crate::semilinear::{solve_mild, Nonlinearity, PicardOptions};
use crate::steering::{
    control_energy, partial_error, synthesize_linear_control, ControlSignal, Limit, TargetTransport,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: String,
    pub label: String,
    pub pass: bool,
    /// Informational lines never fail a run.
    pub gating: bool,
    pub detail: String,
}

impl Check {
    fn gate(id: &str, label: &str, pass: bool, detail: String) -> Self {
        Self {
            id: id.into(),
            label: label.into(),
            pass,
            gating: true,
            detail,
        }
    }

    fn info(id: &str, label: &str, pass: bool, detail: String) -> Self {
        Self {
            gating: false,
            ..Self::gate(id, label, pass, detail)
        }
    }

    pub fn status(&self) -> &'static str {
        match (self.gating, self.pass) {
            (false, _) => "INFO",
            (true, true) => "PASS",
            (true, false) => "FAIL",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {} {}: {}", self.status(), self.id, self.label, self.detail)
    }
}

/// Grid sizes and seed for one verification sweep.
#[derive(Debug, Clone)]
pub struct Scale {
    /// Grid for the property checks.
    pub n_cells: usize,
    /// Grid for the steering runs.
    pub steer_cells: usize,
    /// Refinement ladder for the convergence study.
    pub refinement: Vec<usize>,
    pub seed: u64,
}

impl Scale {
    pub fn acceptance(seed: u64) -> Self {
        Self {
            n_cells: 1024,
            steer_cells: 2048,
            refinement: vec![256, 512, 1024, 2048],
            seed,
        }
    }

    pub fn selftest(seed: u64) -> Self {
        Self {
            n_cells: 256,
            ..Self::acceptance(seed)
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }
}

fn sine_series(grid: Grid, rng: &mut ChaCha8Rng) -> GridFunction {
    let c: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    GridFunction::from_fn(grid, |t| {
        c.iter()
            .enumerate()
            .map(|(k, a)| a * ((k + 1) as f64 * std::f64::consts::PI * t).sin())
            .sum()
    })
}

fn smooth(grid: Grid, rng: &mut ChaCha8Rng) -> GridFunction {
    let base = sine_series(grid, rng);
    let (c0, c1, c2) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let extra = GridFunction::from_fn(grid, |t| c0 + c1 * t + c2 * (std::f64::consts::PI * t).cos());
    base.axpy(1.0, &extra).expect("same grid")
}

/// Random state; `vanishing` draws from sine series (zero at both ends).
fn random_state(grid: Grid, kind: Kind, vanishing: bool, rng: &mut ChaCha8Rng) -> State {
    let mut draw = || if vanishing { sine_series(grid, rng) } else { smooth(grid, rng) };
    match kind {
        Kind::Scalar => draw().into(),
        Kind::Pair => {
            let a = draw();
            PairFunction::new(a, draw()).expect("same grid").into()
        }
    }
}

fn signed(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let v = rng.gen_range(lo..hi);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

fn random_mono(rng: &mut ChaCha8Rng) -> SystemSpec {
    SystemSpec::monotubular(rng.gen_range(0.2..2.0), signed(rng, 0.5, 2.0), 1.0, 0.1).expect("valid ranges")
}

fn random_two_stream(rng: &mut ChaCha8Rng, symmetric: bool) -> SystemSpec {
    let h1 = rng.gen_range(0.2..2.0);
    let h2 = if symmetric { h1 } else { rng.gen_range(0.2..2.0) };
    SystemSpec::two_stream(h1, h2, signed(rng, 0.5, 2.0), signed(rng, 0.5, 2.0), 1.0, 0.1).expect("valid ranges")
}

fn special_two_stream() -> SystemSpec {
    SystemSpec::two_stream(0.5, 0.5, 1.0, 1.0, 1.0, 0.1).expect("valid")
}

fn reference_mono() -> SystemSpec {
    SystemSpec::monotubular(1.0, 1.0, 1.0, 0.1).expect("valid")
}

fn bump() -> Preset {
    Preset::Bump {
        center: 0.5,
        width: 0.4,
        amplitude: 1.0,
    }
}

/// Closed-form Gramian against the semigroup-composition quadrature.
pub fn gramian_oracle_equivalence(scale: &Scale) -> Result<Vec<Check>> {
    let grid = Grid::new(scale.n_cells)?;
    let mut rng = scale.rng(1);
    let n_steps = 256;
    let (mut worst, mut worst_uniform) = (0.0f64, 0.0f64);
    for case in 0..40 {
        let sys = if case < 20 { random_mono(&mut rng) } else { special_two_stream() };
        let t = rng.gen_range(0.02..=1.0);
        let x = random_state(grid, sys.kind(), false, &mut rng);
        let closed = apply_gramian(&sys, t, &x)?;
        let tol = 5.0 * (grid.spacing() + t / n_steps as f64);
        for (nodes, slot) in [(OracleNodes::GridAligned, &mut worst), (OracleNodes::Uniform, &mut worst_uniform)] {
            let oracle = gramian_oracle(&sys, t, &x, n_steps, nodes)?;
            let rel = closed.sub(&oracle)?.norm() / closed.norm();
            *slot = slot.max(rel / tol);
        }
    }
    Ok(vec![
        Check::gate(
            "C1",
            "Gramian closed form vs semigroup quadrature within 5(Δθ+Δs) relative (20 monotubular + 20 two-stream)",
            worst <= 1.0,
            format!("worst relative error / tolerance = {worst:.3} (s-nodes on whole cells)"),
        ),
        Check::info(
            "C1x",
            "same with uniform off-grid s-nodes",
            worst_uniform <= 1.0,
            format!(
                "worst relative error / tolerance = {worst_uniform:.3}; off-grid S(s)S*(s) smears the edge at θ = 1−s, an O(√Δθ) L2 error"
            ),
        ),
    ])
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Condition (E) for the monotubular plant.
pub fn condition_e_monotubular(scale: &Scale) -> Result<Vec<Check>> {
    let grid = Grid::new(scale.n_cells)?;
    let sys = reference_mono();
    let margin = sys.margin(grid)?;
    let ts = log_spaced(1e-4, sys.horizon(), 50);
    let rows = ts
        .iter()
        .map(|&t| coercivity_report(&sys, t, margin))
        .collect::<Result<Vec<_>>>()?;
    let cap = rows[0].condition_e_bound;
    let (sup, t_sup) = rows
        .iter()
        .map(|r| (r.product, r.t))
        .fold((0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a });
    let inf = rows.iter().map(|r| r.product).fold(f64::INFINITY, f64::min);
    let published = rows[0].published_constant;
    let horizon = rows[0].horizon_bound;
    let failing = rows.iter().filter(|r| !r.pass).count();
    Ok(vec![
        Check::gate(
            "C2a",
            "t‖Q_L⁻¹(t)‖ ≤ 2aε/(b²(1−e^{−2aε})) + 1e-9 over 50 log-spaced t",
            sup <= cap + 1e-9,
            format!(
                "sup = {sup:.6} at t = {t_sup:.4}, cap = {cap:.6} (ε = {:.6}); {failing}/50 t exceed it — \
                 for t > ε the product grows like 2at/(b²(1−e^{{−2aε}}))",
                margin.eps()
            ),
        ),
        Check::gate(
            "C2b",
            "infimum of t‖Q_L⁻¹(t)‖ approaches b⁻² within 1%",
            (inf / published - 1.0).abs() <= 0.01,
            format!("inf = {inf:.6}, b⁻² = {published:.6}"),
        ),
        Check::info(
            "C2c",
            "t‖Q_L⁻¹(t)‖ bounded on (0, T] by 2a·max(T,ε)/(b²(1−e^{−2aε}))",
            sup <= horizon + 1e-9,
            format!("sup = {sup:.6} ≤ {horizon:.6}"),
        ),
    ])
}

/// Condition (E) for the two-stream special case, in the `≥ t‖x‖²` form.
pub fn condition_e_two_stream(scale: &Scale) -> Result<Vec<Check>> {
    let grid = Grid::new(scale.n_cells)?;
    let sys = special_two_stream();
    let margin = sys.margin(grid)?;
    let mut rng = scale.rng(3);
    let mut worst_form = f64::INFINITY;
    let mut worst_product: f64 = 0.0;
    for _ in 0..20 {
        let t = rng.gen_range(1e-3..=margin.eps());
        let x = restrict(&random_state(grid, Kind::Pair, false, &mut rng), margin)?;
        let qx = apply_partial_gramian(&sys, t, &x)?;
        let slack = qx.inner(&x)? - t * x.inner(&x)?;
        worst_form = worst_form.min(slack);
        worst_product = worst_product.max(coercivity_report(&sys, t, margin)?.product);
    }
    let cap = coercivity_report(&sys, margin.eps(), margin)?.condition_e_bound;
    Ok(vec![
        Check::gate(
            "C3a",
            "⟨Q_L(t)x, x⟩ ≥ t‖x‖² − 1e-9 for t ∈ (0, ε], 20 random pairs",
            worst_form >= -1e-9,
            format!(
                "min ⟨Q_L x,x⟩ − t‖x‖² = {worst_form:.3e}; the block's eigenvalues are t and (1−e^{{−2t}})/2 < t"
            ),
        ),
        Check::gate(
            "C3b",
            "t‖Q_L⁻¹(t)‖ ≤ 1 for t ∈ (0, ε]",
            worst_product <= 1.0,
            format!("max = {worst_product:.6} = 2t/(1−e^{{−2t}})"),
        ),
        Check::info(
            "C3c",
            "t‖Q_L⁻¹(t)‖ bounded on (0, ε] by 2ε/(1−e^{−2ε})",
            worst_product <= cap + 1e-9,
            format!("max = {worst_product:.6} ≤ {cap:.6}"),
        ),
    ])
}

/// Condition (F) for the pure translation, literal and relaxed.
pub fn condition_f(scale: &Scale) -> Result<Vec<Check>> {
    let grid = Grid::new(scale.n_cells)?;
    let margin = reference_mono().margin(grid)?;
    let mut rng = scale.rng(4);
    let h = grid.spacing();
    let mut aligned_ok = true;
    let mut aligned_worst: f64 = 0.0;
    let mut offgrid_worst: f64 = 0.0;
    for _ in 0..20 {
        let x = smooth(grid, &mut rng);
        let xs: State = x.clone().into();
        let k = rng.gen_range(1..margin.cells());
        let moved: State = translate_left(&x, k as f64 * h)?.into();
        let d = project(&moved, margin)?.sub(&project(&xs, margin)?)?;
        aligned_ok &= d.max_abs() == 0.0;
        aligned_worst = aligned_worst.max(d.norm() / xs.norm());
        let tau = rng.gen_range(0.0..margin.eps());
        let moved: State = translate_left(&x, tau)?.into();
        let d = project(&moved, margin)?.sub(&project(&xs, margin)?)?;
        offgrid_worst = offgrid_worst.max(d.norm() / (5.0 * h * xs.norm()));
    }
    // strong continuity: the same defect vanishes as τ → 0
    let x: State = smooth(grid, &mut rng).into();
    let mut decay = Vec::new();
    let mut ks = vec![margin.cells(), margin.cells() / 4, margin.cells() / 16, 1];
    ks.dedup();
    for k in ks.into_iter().filter(|&k| k > 0) {
        let moved = apply_semigroup(&reference_mono(), k as f64 * h, &x, Direction::Forward)?;
        decay.push((k as f64 * h, project(&moved, margin)?.sub(&project(&x, margin)?)?.norm()));
    }
    let monotone = decay.windows(2).all(|w| w[1].1 <= w[0].1);
    Ok(vec![
        Check::gate(
            "C4a",
            "P_L T(τ)x = P_L x bitwise for grid-aligned τ < ε, 20 random x",
            aligned_ok,
            format!("worst relative defect ‖P_L T(τ)x − P_L x‖/‖x‖ = {aligned_worst:.3e}; T(τ)x = x(·−τ) moves the profile"),
        ),
        Check::gate(
            "C4b",
            "‖P_L T(τ)x − P_L x‖ ≤ 5Δθ‖x‖ for non-aligned τ < ε",
            offgrid_worst <= 1.0,
            format!("worst defect / tolerance = {offgrid_worst:.3e}"),
        ),
        Check::info(
            "C4c",
            "‖P_L S(τ)x − P_L x‖ → 0 as τ → 0",
            monotone,
            decay
                .iter()
                .map(|(t, d)| format!("τ={t:.5}: {d:.3e}"))
                .collect::<Vec<_>>()
                .join(", "),
        ),
    ])
}

/// Rayleigh quotients of `Q(T)` on indicators of shrinking boundary layers.
pub fn noncoercivity(scale: &Scale) -> Result<Vec<Check>> {
    let grid = Grid::new(scale.n_cells)?;
    let deltas = [0.1, 0.05, 0.025, 0.0125];
    let mut out = Vec::new();
    for (name, sys, b2) in [
        ("monotubular a=1 b=1", reference_mono(), 1.0),
        ("monotubular a=0.5 b=2", SystemSpec::monotubular(0.5, 2.0, 1.0, 0.1)?, 4.0),
        ("two-stream h=1/2 b=1", special_two_stream(), 1.0),
    ] {
        let q = deltas
            .iter()
            .map(|&d| noncoercivity_demo(&sys, sys.horizon(), d, grid, BoundarySupport::Inflow))
            .collect::<Result<Vec<_>>>()?;
        let bounded = q.iter().zip(&deltas).all(|(q, d)| *q <= b2 * d);
        let monotone = q.windows(2).all(|w| w[1] < w[0]);
        out.push(Check::gate(
            "C5",
            &format!("non-coercivity, {name}: quotient ≤ b²δ and decreasing (x_δ on [0, δ])"),
            bounded && monotone,
            q.iter()
                .zip(&deltas)
                .map(|(q, d)| format!("δ={d}: {q:.5}"))
                .collect::<Vec<_>>()
                .join(", "),
        ));
    }
    let sys = reference_mono();
    let both = deltas
        .iter()
        .map(|&d| noncoercivity_demo(&sys, 1.0, d, grid, BoundarySupport::BothEnds))
        .collect::<Result<Vec<_>>>()?;
    out.push(Check::info(
        "C5x",
        "monotubular quotient with x_δ on [0,δ] ∪ [1−δ,1] (outflow end is not degenerate)",
        true,
        both.iter()
            .zip(&deltas)
            .map(|(q, d)| format!("δ={d}: {q:.5}"))
            .collect::<Vec<_>>()
            .join(", "),
    ));
    Ok(out)
}

struct SteeringRun {
    err_transported: f64,
    transported_norm: f64,
    err_direct: f64,
    target_norm: f64,
}

fn linear_steering_run(n_cells: usize) -> Result<SteeringRun> {
    let grid = Grid::new(n_cells)?;
    let sys = reference_mono();
    let margin = sys.margin(grid)?;
    let xi: State = Preset::Sine { k: 1.0, amplitude: 1.0 }.sample(grid)?.into();
    let eta: State = bump().sample(grid)?.into();
    let t_final = sys.horizon();
    let run = |transport| -> Result<State> {
        let u = synthesize_linear_control(&sys, &xi, &eta, 0.0, t_final, transport)?;
        let traj = solve_mild(&sys, &xi, &u, &Nonlinearity::Zero, 0.0, t_final, 256, PicardOptions::default())?;
        Ok(traj.last().clone())
    };
    let transported = apply_semigroup(&sys, t_final, &eta, Direction::Forward)?;
    let y = run(TargetTransport::Transported)?;
    let y_direct = run(TargetTransport::Direct)?;
    Ok(SteeringRun {
        err_transported: partial_error(&y, &transported, margin)?,
        transported_norm: restrict(&transported, margin)?.norm(),
        err_direct: partial_error(&y_direct, &eta, margin)?,
        target_norm: restrict(&eta, margin)?.norm(),
    })
}

fn ratios(errs: &[f64]) -> Vec<f64> {
    errs.windows(2).map(|w| w[0] / w[1]).collect()
}

/// Linear steering on `[0, T]`, with the grid refinement study.
pub fn linear_steering(scale: &Scale) -> Result<Vec<Check>> {
    let runs = scale
        .refinement
        .iter()
        .map(|&n| linear_steering_run(n))
        .collect::<Result<Vec<_>>>()?;
    let finest = runs.last().expect("non-empty ladder");
    let rel: Vec<f64> = runs.iter().map(|r| r.err_transported / r.transported_norm).collect();
    let rel_ok = rel.last().is_some_and(|r| *r <= 5e-3);
    let r = ratios(&rel);
    let order_ok = r.iter().all(|q| (1.7..=2.3).contains(q));
    let direct: Vec<f64> = runs.iter().map(|r| r.err_direct / r.target_norm).collect();
    let dr = ratios(&direct);
    Ok(vec![
        Check::gate(
            "C6",
            "‖L y(T) − L S(T)η‖/‖L S(T)η‖ ≤ 5e-3 with ratio ∈ [1.7, 2.3] per doubling",
            rel_ok && order_ok,
            format!(
                "‖L S(T)η‖ = {:.3e}, ‖L y(T) − L S(T)η‖ = {:.3e} (S(1) = 0, so the quotient is 0/0); relative = {:?}, ratios = {:?}",
                finest.transported_norm, finest.err_transported, rel, r
            ),
        ),
        Check::info(
            "C6x",
            "same scenario steering to Lη itself: ‖L y(T) − Lη‖/‖Lη‖ ≤ 5e-3, ratio ∈ [1.7, 2.3]",
            direct.last().is_some_and(|e| *e <= 5e-3) && dr.iter().all(|q| (1.7..=2.3).contains(q)),
            format!(
                "relative = [{}], ratios = [{}]",
                direct.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(", "),
                dr.iter().map(|q| format!("{q:.3}")).collect::<Vec<_>>().join(", ")
            ),
        ),
    ])
}

/// Measured control energy against `⟨α, Q_L⁻¹α⟩`.
pub fn energy_identity(scale: &Scale) -> Result<Vec<Check>> {
    let grid = Grid::new(scale.n_cells)?;
    let mut rng = scale.rng(7);
    let mut out = Vec::new();
    for (name, two) in [("monotubular", false), ("two-stream", true)] {
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let sys = if two { random_two_stream(&mut rng, false) } else { random_mono(&mut rng) };
            let xi = random_state(grid, sys.kind(), false, &mut rng);
            let eta = random_state(grid, sys.kind(), false, &mut rng);
            let tau = rng.gen_range(0.0..0.8);
            let u = synthesize_linear_control(&sys, &xi, &eta, tau, 1.0, TargetTransport::Transported)?;
            let span = 1.0 - tau;
            let alpha = restrict(&apply_semigroup(&sys, span, &eta.sub(&xi)?, Direction::Forward)?, sys.margin(grid)?)?;
            let want = minimum_energy(&sys, span, &alpha)?;
            let got = control_energy(&u, 256)?;
            worst = worst.max((got - want).abs() / want);
        }
        out.push(Check::gate(
            "C7",
            &format!("control energy = ⟨α, Q_L⁻¹α⟩ within 1e-4 relative, 10 random {name} targets"),
            worst <= 1e-4,
            format!("worst relative deviation = {worst:.3e}"),
        ));
    }
    Ok(out)
}

/// Dyadic steering of the semilinear monotubular plant with `γ tanh`.
pub fn semilinear_steering(scale: &Scale) -> Result<Vec<Check>> {
    let grid = Grid::new(scale.steer_cells)?;
    let sys = reference_mono();
    let gamma = 0.1;
    let f = Nonlinearity::SatTanh { gain: gamma };
    let xi: State = Preset::Sine { k: 1.0, amplitude: 1.0 }.sample(grid)?.into();
    let eta: State = bump().sample(grid)?.into();
    let opts = DyadicOptions {
        n_stages: 20,
        ..DyadicOptions::default()
    };
    let out = steer_semilinear(&sys, &xi, &eta, &f, opts)?;
    let rep = &out.report;
    let h = grid.spacing();
    let c_run = rep.stages.iter().map(|s| s.scale).fold(0.0, f64::max);
    let worst = rep
        .stages
        .iter()
        .map(|s| s.err_target - (s.bound + 10.0 * h * c_run))
        .fold(f64::NEG_INFINITY, f64::max);
    let energies: Vec<f64> = rep.stages.iter().map(|s| s.stage_energy).collect();
    let tail: Vec<f64> = energies[energies.len().saturating_sub(4)..]
        .windows(2)
        .map(|w| w[1] / w[0])
        .collect();
    let e1 = energies.first().copied().unwrap_or(0.0);
    let cap = e1 + rep.energy_constant * sys.horizon() / 2.0;
    let sums_ok = rep.stages.iter().all(|s| s.cumulative_energy.is_finite() && s.cumulative_energy <= cap * (1.0 + 1e-12));
    let tail_ok = tail.len() == 3 && tail.iter().all(|r| *r <= 0.75);
    Ok(vec![
        Check::gate(
            "C8a",
            "every stage: ‖L x_n − L η‖ ≤ ‖S(τ_n)η − η‖ + γτ_n + 10Δθ·C_run",
            worst <= 0.0,
            format!("{} stages, C_run = {c_run:.4}, max(error − bound) = {worst:.3e}", rep.stages.len()),
        ),
        Check::gate(
            "C8b",
            "cumulative energy ≤ E_1 + cT/2 and last-4 stage energy ratios ≤ 0.75",
            sums_ok && tail_ok,
            format!(
                "E_1 = {e1:.4e}, c = {:.4e}, total = {:.4e}, tail ratios = [{}]",
                rep.energy_constant,
                rep.stages.last().map_or(0.0, |s| s.cumulative_energy),
                tail.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join(", ")
            ),
        ),
        Check::gate(
            "C8c",
            "terminal ‖L x_N − L η‖/‖L η‖ ≤ 1e-2",
            rep.terminal_relative_error <= 1e-2,
            format!("{:.3e} (stop: {}, {} cells)", rep.terminal_relative_error, rep.stop_reason.as_str(), scale.steer_cells),
        ),
    ])
}

/// Semigroup law, duality, nilpotency, contraction and coupling rows.
pub fn semigroup_algebra(scale: &Scale) -> Result<Vec<Check>> {
    let grid = Grid::new(scale.n_cells)?;
    let h = grid.spacing();
    let mut rng = scale.rng(9);
    let cases = 100;
    let pick = |rng: &mut ChaCha8Rng, k: usize| match k % 3 {
        0 => random_mono(rng),
        1 => random_two_stream(rng, true),
        _ => random_two_stream(rng, false),
    };

    let (mut law, mut law_exact) = (0.0f64, 0.0f64);
    for k in 0..cases {
        let sys = pick(&mut rng, k);
        let x = random_state(grid, sys.kind(), true, &mut rng);
        let t = rng.gen_range(0.0..0.6);
        let s = rng.gen_range(0.0..(1.0 - t));
        let both = apply_semigroup(&sys, t + s, &x, Direction::Forward)?;
        let step = apply_semigroup(&sys, t, &apply_semigroup(&sys, s, &x, Direction::Forward)?, Direction::Forward)?;
        law = law.max(both.sub(&step)?.norm() / (5.0 * h * x.norm()));
        let (ta, sa) = (rng.gen_range(0..grid.n_cells() / 2) as f64 * h, rng.gen_range(0..grid.n_cells() / 2) as f64 * h);
        let both = apply_semigroup(&sys, ta + sa, &x, Direction::Forward)?;
        let step = apply_semigroup(&sys, ta, &apply_semigroup(&sys, sa, &x, Direction::Forward)?, Direction::Forward)?;
        law_exact = law_exact.max(both.sub(&step)?.norm() / x.norm());
    }

    let mut duality = 0.0f64;
    for k in 0..cases {
        let sys = pick(&mut rng, k);
        let x = random_state(grid, sys.kind(), false, &mut rng);
        let y = random_state(grid, sys.kind(), false, &mut rng);
        let t = rng.gen_range(0.0..1.0);
        let lhs = apply_semigroup(&sys, t, &x, Direction::Forward)?.inner(&y)?;
        let rhs = x.inner(&apply_semigroup(&sys, t, &y, Direction::Adjoint)?)?;
        duality = duality.max((lhs - rhs).abs() / (5.0 * h * x.norm() * y.norm()));
    }

    let mut nilpotent = true;
    for k in 0..cases {
        let sys = pick(&mut rng, k);
        let x = random_state(grid, sys.kind(), false, &mut rng);
        let t = rng.gen_range(1.0..3.0);
        for dir in [Direction::Forward, Direction::Adjoint] {
            nilpotent &= apply_semigroup(&sys, t, &x, dir)?.max_abs() == 0.0;
        }
    }

    // L2 contraction needs h1 = h2; general coupling contracts in the sup norm
    let (mut l2, mut sup) = (0.0f64, 0.0f64);
    for k in 0..cases {
        let sys = pick(&mut rng, k);
        let x = random_state(grid, sys.kind(), true, &mut rng);
        let t = rng.gen_range(0.0..1.0);
        let y = apply_semigroup(&sys, t, &x, Direction::Forward)?;
        sup = sup.max(y.max_abs() / x.max_abs());
        let symmetric = match sys.plant() {
            Plant::TwoStream { h1, h2, .. } => h1 == h2,
            Plant::Monotubular { .. } => true,
        };
        if symmetric {
            l2 = l2.max(y.norm() / x.norm());
        }
    }

    let mut rows = 0.0f64;
    let mut entries_ok = true;
    for _ in 0..cases {
        let (h1, h2, t) = (rng.gen_range(0.05..5.0), rng.gen_range(0.05..5.0), rng.gen_range(0.0..20.0));
        let e = coupling_exp(h1, h2, t)?;
        for r in e.row_sums() {
            rows = rows.max((r - 1.0).abs());
        }
        entries_ok &= e.entries.iter().flatten().all(|v| (0.0..=1.0).contains(v));
    }

    Ok(vec![
        Check::gate("C9a", "semigroup law within 5Δθ‖x‖ (100 cases)", law <= 1.0, format!("worst / tolerance = {law:.3e}")),
        Check::gate(
            "C9b",
            "semigroup law exact for grid-aligned t, s (100 cases)",
            law_exact <= 1e-14,
            format!("worst relative = {law_exact:.3e}"),
        ),
        Check::gate("C9c", "adjoint duality within 5Δθ‖x‖‖y‖ (100 cases)", duality <= 1.0, format!("worst / tolerance = {duality:.3e}")),
        Check::gate("C9d", "S(t) = S*(t) = 0 exactly for t ≥ 1 (100 cases)", nilpotent, format!("all zero: {nilpotent}")),
        Check::gate(
            "C9e",
            "contraction: L2 for h1 = h2 and monotubular, sup norm for all (100 cases)",
            l2 <= 1.0 + 1e-12 && sup <= 1.0 + 1e-12,
            format!("max ‖S(t)x‖/‖x‖ = {l2:.6}, max sup ratio = {sup:.6}"),
        ),
        Check::gate(
            "C9f",
            "coupling rows sum to 1 within 1e-14, entries in [0, 1] (100 cases)",
            rows <= 1e-14 && entries_ok,
            format!("max |row sum − 1| = {rows:.3e}"),
        ),
    ])
}

/// `x(t_j) = S(t_j − t_0)ξ + Σ_k w_k S(t_j − s_k) g_k` summed directly,
/// with trapezoid weights and the one-sided control limits the stepping
/// scheme uses at each node.
pub fn duhamel_oracle(sys: &SystemSpec, xi: &State, u: &ControlSignal, stamps: &[f64]) -> Result<Vec<State>> {
    let t0 = stamps[0];
    let g = |s: f64, limit| -> Result<State> { apply_input(sys, &u.eval_limit(s, limit)?) };
    let mut out = Vec::with_capacity(stamps.len());
    for j in 0..stamps.len() {
        let mut x = apply_semigroup(sys, stamps[j] - t0, xi, Direction::Forward)?;
        for k in 0..j {
            let ds = stamps[k + 1] - stamps[k];
            let left = apply_semigroup(sys, stamps[j] - stamps[k], &g(stamps[k], Limit::Right)?, Direction::Forward)?;
            let right = apply_semigroup(sys, stamps[j] - stamps[k + 1], &g(stamps[k + 1], Limit::Left)?, Direction::Forward)?;
            x = x.axpy(0.5 * ds, &left)?.axpy(0.5 * ds, &right)?;
        }
        out.push(x);
    }
    Ok(out)
}

/// Picard gap decay and the linear path against the direct Duhamel sum.
pub fn picard_convergence(scale: &Scale) -> Result<Vec<Check>> {
    let grid = Grid::new(scale.n_cells.min(512))?;
    let mut rng = scale.rng(10);
    let mut worst_ratio: f64 = 0.0;
    let mut bound_gap: f64 = 0.0;
    let mut iters = Vec::new();
    let mut out = Vec::new();
    for (k, f) in [
        Nonlinearity::SatTanh { gain: 0.1 },
        Nonlinearity::BoundedMix { gain: 0.1 },
        Nonlinearity::SatTanh { gain: 0.5 },
    ]
    .into_iter()
    .enumerate()
    {
        let sys = if k == 1 { special_two_stream() } else { reference_mono() };
        let xi = random_state(grid, sys.kind(), false, &mut rng).scaled(2.0);
        let eta = random_state(grid, sys.kind(), false, &mut rng);
        let u = synthesize_linear_control(&sys, &xi, &eta, 0.0, 1.0, TargetTransport::Direct)?;
        let traj = solve_mild(&sys, &xi, &u, &f, 0.0, 1.0, 256, PicardOptions::default())?;
        let ratio = f.lipschitz() * 1.0 + 0.05;
        for w in traj.picard_gaps.windows(2) {
            worst_ratio = worst_ratio.max(w[1] / w[0] / ratio);
        }
        bound_gap = bound_gap.max(*traj.picard_gaps.last().unwrap_or(&0.0));
        iters.push(traj.picard_iterations());
    }
    out.push(Check::gate(
        "C10a",
        "Picard gaps decay with ratio ≤ L·T + 0.05 after the first iterate",
        worst_ratio <= 1.0,
        format!("worst ratio / (L·T + 0.05) = {worst_ratio:.3e}, iterations = {iters:?}, final gap ≤ {bound_gap:.1e}"),
    ));

    // the direct sum is quadratic in the number of stamps
    let grid = Grid::new(scale.n_cells.min(128))?;
    let mut worst: f64 = 0.0;
    for sys in [reference_mono(), special_two_stream(), random_two_stream(&mut rng, false)] {
        let xi = random_state(grid, sys.kind(), false, &mut rng);
        let eta = random_state(grid, sys.kind(), false, &mut rng);
        let u = synthesize_linear_control(&sys, &xi, &eta, 0.25, 0.75, TargetTransport::Transported)?;
        let traj = solve_mild(&sys, &xi, &u, &Nonlinearity::Zero, 0.0, 1.0, 64, PicardOptions::default())?;
        let oracle = duhamel_oracle(&sys, &xi, &u, &traj.stamps)?;
        for (a, b) in traj.states.iter().zip(&oracle) {
            worst = worst.max(a.max_abs_diff(b)?);
        }
    }
    out.push(Check::gate(
        "C10b",
        "f = 0 trajectory matches the direct Duhamel sum within 1e-10",
        worst <= 1e-10,
        format!("max |difference| = {worst:.3e}"),
    ));
    Ok(out)
}

type Suite = fn(&Scale) -> Result<Vec<Check>>;

/// Every check, in criterion order.
pub fn run_all(scale: &Scale) -> Result<Vec<Check>> {
    let suites: [Suite; 10] = [
        gramian_oracle_equivalence,
        condition_e_monotubular,
        condition_e_two_stream,
        condition_f,
        noncoercivity,
        linear_steering,
        energy_identity,
        semilinear_steering,
        semigroup_algebra,
        picard_convergence,
    ];
    let mut out = Vec::new();
    for suite in suites {
        out.extend(suite(scale)?);
    }
    Ok(out)
}
