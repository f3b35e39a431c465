//! Named initial/target profiles sampled onto a grid.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};

#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    Zero,
    Const(f64),
    /// `amplitude · sin(kπθ)`.
    Sine { k: f64, amplitude: f64 },
    /// `amplitude · cos²(π(θ − center)/(2·width))` on `|θ − center| < width`, zero elsewhere.
    Bump { center: f64, width: f64, amplitude: f64 },
    /// Coefficients in increasing degree.
    Poly(Vec<f64>),
    /// `(θ, value)` knots, linearly interpolated; must cover `[0, 1]`.
    Samples(Vec<(f64, f64)>),
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Zero => "zero",
            Preset::Const(_) => "const",
            Preset::Sine { .. } => "sine",
            Preset::Bump { .. } => "bump",
            Preset::Poly(_) => "poly",
            Preset::Samples(_) => "samples",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |name, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::parameter(name, v, "finite"))
            }
        };
        match self {
            Preset::Zero => Ok(()),
            Preset::Const(c) => finite("value", *c),
            Preset::Sine { k, amplitude } => {
                finite("k", *k)?;
                finite("amplitude", *amplitude)
            }
            Preset::Bump { center, width, amplitude } => {
                finite("center", *center)?;
                finite("amplitude", *amplitude)?;
                if !(*width > 0.0 && width.is_finite()) {
                    return Err(Error::parameter("width", *width, "> 0"));
                }
                Ok(())
            }
            Preset::Poly(c) => c.iter().try_for_each(|&v| finite("coeffs", v)),
            Preset::Samples(knots) => {
                if knots.len() < 2 {
                    return Err(Error::parameter("samples", knots.len() as f64, "at least 2 rows"));
                }
                for w in knots.windows(2) {
                    if !(w[1].0 > w[0].0) {
                        return Err(Error::parameter("theta", w[1].0, "strictly increasing"));
                    }
                }
                for &(th, v) in knots {
                    finite("theta", th)?;
                    finite("value", v)?;
                }
                let (first, last) = (knots[0].0, knots[knots.len() - 1].0);
                if first > 1e-12 || last < 1.0 - 1e-12 {
                    return Err(Error::parameter("samples", first.max(1.0 - last), "knots covering [0, 1]"));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        match self {
            Preset::Zero => 0.0,
            Preset::Const(c) => *c,
            Preset::Sine { k, amplitude } => amplitude * (k * PI * theta).sin(),
            Preset::Bump { center, width, amplitude } => {
                let d = (theta - center).abs();
                if d >= *width {
                    0.0
                } else {
                    amplitude * (0.5 * PI * d / width).cos().powi(2)
                }
            }
            Preset::Poly(c) => c.iter().rev().fold(0.0, |acc, &a| acc * theta + a),
            Preset::Samples(knots) => {
                let j = knots.partition_point(|&(th, _)| th <= theta);
                if j == 0 {
                    knots[0].1
                } else if j == knots.len() {
                    knots[knots.len() - 1].1
                } else {
                    let (t0, v0) = knots[j - 1];
                    let (t1, v1) = knots[j];
                    v0 + (v1 - v0) * (theta - t0) / (t1 - t0)
                }
            }
        }
    }

    pub fn sample(&self, grid: Grid) -> Result<GridFunction> {
        self.validate()?;
        Ok(GridFunction::from_fn(grid, |th| self.eval(th)))
    }
}
