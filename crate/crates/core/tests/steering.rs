use exsteer_core::dyadic::{steer_semilinear, DyadicOptions, StopReason};
use exsteer_core::grid::{Grid, GridFunction, PairFunction, State};
use exsteer_core::presets::Preset;
use exsteer_core::semigroup::{apply_semigroup, Direction, SystemSpec};
use exsteer_core::semilinear::{solve_mild, Nonlinearity, PicardOptions};
use exsteer_core::steering::{
    partial_error, synthesize_linear_control, ControlSegment, ControlSignal, SegmentControl, TargetTransport,
};
use exsteer_core::verify::duhamel_oracle;

fn bump(g: Grid) -> State {
    Preset::Bump { center: 0.5, width: 0.4, amplitude: 1.0 }.sample(g).unwrap().into()
}

fn sine(g: Grid) -> State {
    Preset::Sine { k: 1.0, amplitude: 1.0 }.sample(g).unwrap().into()
}

#[test]
fn mixed_segments_match_direct_duhamel_sum() {
    let g = Grid::new(96).unwrap();
    let sys = SystemSpec::two_stream(0.4, 1.3, 1.2, -0.8, 1.0, 0.125).unwrap();
    let xi: State = PairFunction::new(GridFunction::from_fn(g, |t| 1.0 - t), GridFunction::from_fn(g, |t| t * t))
        .unwrap()
        .into();
    let eta: State = PairFunction::new(GridFunction::from_fn(g, |t| (4.0 * t).sin()), GridFunction::from_fn(g, |t| t))
        .unwrap()
        .into();
    let mut u = ControlSignal::new(sys, g);
    u.push(ControlSegment { t_start: 0.0, t_end: 0.25, control: SegmentControl::Constant(eta.scaled(0.3)) })
        .unwrap();
    u.extend(synthesize_linear_control(&sys, &xi, &eta, 0.25, 0.75, TargetTransport::Transported).unwrap())
        .unwrap();
    let traj = solve_mild(&sys, &xi, &u, &Nonlinearity::Zero, 0.0, 1.0, 32, PicardOptions::default()).unwrap();
    let oracle = duhamel_oracle(&sys, &xi, &u, &traj.stamps).unwrap();
    for (a, b) in traj.states.iter().zip(&oracle) {
        assert!(a.max_abs_diff(b).unwrap() <= 1e-10);
    }
}

#[test]
fn transported_stage_reaches_its_target() {
    let sys = SystemSpec::monotubular(1.0, 1.0, 1.0, 0.125).unwrap();
    for n in [128, 256] {
        let g = Grid::new(n).unwrap();
        let (xi, eta) = (sine(g), bump(g));
        let u = synthesize_linear_control(&sys, &xi, &eta, 0.0, 0.5, TargetTransport::Transported).unwrap();
        let y = solve_mild(&sys, &xi, &u, &Nonlinearity::Zero, 0.0, 0.5, 256, PicardOptions::default()).unwrap();
        let target = apply_semigroup(&sys, 0.5, &eta, Direction::Forward).unwrap();
        let err = partial_error(y.last(), &target, sys.margin(g).unwrap()).unwrap();
        assert!(err <= 10.0 * g.spacing() * (eta.norm() + xi.norm()), "n={n}: {err}");
    }
}

#[test]
fn direct_steering_converges_at_first_order() {
    let sys = SystemSpec::monotubular(1.0, 1.0, 1.0, 0.125).unwrap();
    let errs: Vec<f64> = [128, 256, 512]
        .iter()
        .map(|&n| {
            let g = Grid::new(n).unwrap();
            let (xi, eta) = (sine(g), bump(g));
            let u = synthesize_linear_control(&sys, &xi, &eta, 0.0, 1.0, TargetTransport::Direct).unwrap();
            let y = solve_mild(&sys, &xi, &u, &Nonlinearity::Zero, 0.0, 1.0, 256, PicardOptions::default()).unwrap();
            partial_error(y.last(), &eta, sys.margin(g).unwrap()).unwrap()
        })
        .collect();
    for w in errs.windows(2) {
        let r = w[0] / w[1];
        assert!((1.7..=2.3).contains(&r), "{errs:?}");
    }
}

#[test]
fn two_stream_semilinear_stages_respect_bound() {
    let g = Grid::new(512).unwrap();
    let sys = SystemSpec::two_stream(0.5, 0.5, 1.0, 1.0, 1.0, 0.125).unwrap();
    let xi = State::zeros(g, sys.kind());
    let b = bump(g);
    let eta: State = PairFunction::new(b.components()[0].clone(), b.components()[0].scaled(0.5)).unwrap().into();
    let f = Nonlinearity::BoundedMix { gain: 0.1 };
    let out = steer_semilinear(&sys, &xi, &eta, &f, DyadicOptions { n_stages: 12, ..Default::default() }).unwrap();
    let rep = &out.report;
    assert_eq!(rep.stop_reason, StopReason::GridFloor);
    let c = rep.stages.iter().map(|s| s.scale).fold(0.0, f64::max);
    for s in &rep.stages {
        assert!(s.err_target <= s.bound + 10.0 * g.spacing() * c, "{s:?}");
        assert!(s.picard_iterations > 0);
    }
    assert!(rep.terminal_relative_error < 0.05);
    assert_eq!(out.trajectory.stamps.last().copied(), rep.stages.last().map(|s| s.t_end));
    assert!(out.trajectory.stamps.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn runs_are_bitwise_reproducible() {
    let g = Grid::new(128).unwrap();
    let sys = SystemSpec::monotubular(0.7, 1.5, 1.0, 0.125).unwrap();
    let f = Nonlinearity::SatTanh { gain: 0.2 };
    let run = || steer_semilinear(&sys, &sine(g), &bump(g), &f, DyadicOptions { n_stages: 4, ..Default::default() }).unwrap();
    let (a, b) = (run(), run());
    assert_eq!(a.trajectory, b.trajectory);
    assert_eq!(a.report, b.report);
}
