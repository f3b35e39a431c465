//! Discrete L2(0,1) and L2(0,1)² on a uniform node grid.
//!
//! Functions are stored as samples at the nodes `θ_i = i / n_cells`. All
//! integrals use the composite trapezoid rule and are summed in a fixed
//! pairwise order, so results do not depend on how work is partitioned.
//!
//! The restriction operator `L_ε` keeps the closed window `[ε, 1-ε]`; its
//! adjoint [`embed`] extends by zero and [`project`] is `L_ε* L_ε`.

use crate::error::{Error, Result};

/// Offsets below this (in cell units) count as lying on a node.
pub const ALIGN_TOL: f64 = 1e-9;

/// Uniform grid on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    n_cells: usize,
}

impl Grid {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < 4 {
            return Err(Error::parameter("n_cells", n_cells as f64, "at least 4"));
        }
        Ok(Self { n_cells })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    /// Node spacing Δθ.
    pub fn spacing(&self) -> f64 {
        1.0 / self.n_cells as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 / self.n_cells as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_nodes()).map(move |i| self.node(i))
    }

    /// Trapezoid weight of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        let h = self.spacing();
        if i == 0 || i == self.n_cells {
            0.5 * h
        } else {
            h
        }
    }

    /// Converts a length to cell units, returning the integer cell count when
    /// the length sits on the grid.
    pub fn cells_in(&self, length: f64) -> Option<usize> {
        let s = length * self.n_cells as f64;
        let k = s.round();
        if k >= 0.0 && (s - k).abs() <= ALIGN_TOL {
            Some(k as usize)
        } else {
            None
        }
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch {
                left: self.n_cells,
                right: other.n_cells,
            });
        }
        Ok(())
    }
}

/// Sums `len` terms produced by `term` along a fixed binary tree.
pub fn pairwise_sum(len: usize, term: &impl Fn(usize) -> f64) -> f64 {
    fn rec(lo: usize, hi: usize, term: &impl Fn(usize) -> f64) -> f64 {
        let n = hi - lo;
        if n <= 8 {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += term(i);
            }
            return acc;
        }
        let mid = lo + n / 2;
        rec(lo, mid, term) + rec(mid, hi, term)
    }
    rec(0, len, term)
}

/// Scalar state kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Scalar,
    Pair,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Scalar => "scalar",
            Kind::Pair => "pair",
        }
    }

    pub fn components(self) -> usize {
        match self {
            Kind::Scalar => 1,
            Kind::Pair => 2,
        }
    }
}

/// Samples of an L2(0,1) function at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_nodes() {
            return Err(Error::parameter(
                "values.len",
                values.len() as f64,
                format!("one sample per node ({})", grid.n_nodes()),
            ));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::parameter("sample", *bad, "finite"));
        }
        Ok(Self { grid, values })
    }

    /// Builds from already validated samples.
    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_nodes());
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::from_raw(grid, vec![0.0; grid.n_nodes()])
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(grid, grid.nodes().map(f).collect())
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn inner(&self, other: &GridFunction) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        let (g, a, b) = (self.grid, &self.values, &other.values);
        Ok(pairwise_sum(a.len(), &|i| g.weight(i) * a[i] * b[i]))
    }

    pub fn norm(&self) -> f64 {
        let (g, a) = (self.grid, &self.values);
        pairwise_sum(a.len(), &|i| g.weight(i) * a[i] * a[i]).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|v| factor * v).collect())
    }

    /// `self + factor * other`
    pub fn axpy(&self, factor: f64, other: &GridFunction) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + factor * b)
                .collect(),
        ))
    }
}

/// Two components on one grid: the two-stream state `(x1, x2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairFunction {
    first: GridFunction,
    second: GridFunction,
}

impl PairFunction {
    pub fn new(first: GridFunction, second: GridFunction) -> Result<Self> {
        first.grid.check_same(&second.grid)?;
        Ok(Self { first, second })
    }

    pub fn first(&self) -> &GridFunction {
        &self.first
    }

    pub fn second(&self) -> &GridFunction {
        &self.second
    }

    pub fn grid(&self) -> Grid {
        self.first.grid
    }

    pub fn into_parts(self) -> (GridFunction, GridFunction) {
        (self.first, self.second)
    }

    pub fn inner(&self, other: &PairFunction) -> Result<f64> {
        Ok(self.first.inner(&other.first)? + self.second.inner(&other.second)?)
    }

    pub fn norm(&self) -> f64 {
        let a = self.first.norm();
        let b = self.second.norm();
        (a * a + b * b).sqrt()
    }
}

/// A system state: scalar for the monotubular exchanger, pair for two streams.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Scalar(GridFunction),
    Pair(PairFunction),
}

impl From<GridFunction> for State {
    fn from(f: GridFunction) -> Self {
        State::Scalar(f)
    }
}

impl From<PairFunction> for State {
    fn from(p: PairFunction) -> Self {
        State::Pair(p)
    }
}

impl State {
    pub fn kind(&self) -> Kind {
        match self {
            State::Scalar(_) => Kind::Scalar,
            State::Pair(_) => Kind::Pair,
        }
    }

    pub fn grid(&self) -> Grid {
        match self {
            State::Scalar(f) => f.grid,
            State::Pair(p) => p.grid(),
        }
    }

    pub fn zeros(grid: Grid, kind: Kind) -> Self {
        match kind {
            Kind::Scalar => State::Scalar(GridFunction::zeros(grid)),
            Kind::Pair => State::Pair(PairFunction {
                first: GridFunction::zeros(grid),
                second: GridFunction::zeros(grid),
            }),
        }
    }

    pub fn components(&self) -> Vec<&GridFunction> {
        match self {
            State::Scalar(f) => vec![f],
            State::Pair(p) => vec![&p.first, &p.second],
        }
    }

    /// Reassembles a state from one or two components on a common grid.
    pub fn from_components(mut parts: Vec<GridFunction>) -> Result<Self> {
        match parts.len() {
            1 => Ok(State::Scalar(parts.pop().expect("one part"))),
            2 => {
                let second = parts.pop().expect("two parts");
                let first = parts.pop().expect("two parts");
                Ok(State::Pair(PairFunction::new(first, second)?))
            }
            n => Err(Error::parameter("components", n as f64, "1 or 2")),
        }
    }

    pub fn map_components(&self, mut f: impl FnMut(&GridFunction) -> GridFunction) -> Self {
        match self {
            State::Scalar(g) => State::Scalar(f(g)),
            State::Pair(p) => State::Pair(PairFunction {
                first: f(&p.first),
                second: f(&p.second),
            }),
        }
    }

    pub fn expect_kind(&self, kind: Kind) -> Result<()> {
        if self.kind() != kind {
            return Err(Error::KindMismatch {
                expected: kind.name(),
                found: self.kind().name(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_compatible(&self, other: &State) -> Result<()> {
        other.expect_kind(self.kind())?;
        self.grid().check_same(&other.grid())
    }

    pub fn inner(&self, other: &State) -> Result<f64> {
        match (self, other) {
            (State::Scalar(a), State::Scalar(b)) => a.inner(b),
            (State::Pair(a), State::Pair(b)) => a.inner(b),
            _ => Err(Error::KindMismatch {
                expected: self.kind().name(),
                found: other.kind().name(),
            }),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            State::Scalar(f) => f.norm(),
            State::Pair(p) => p.norm(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.components()
            .iter()
            .fold(0.0, |m, c| m.max(c.max_abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map_components(|c| c.scaled(factor))
    }

    /// `self + factor * other`
    pub fn axpy(&self, factor: f64, other: &State) -> Result<Self> {
        self.check_compatible(other)?;
        let parts = self
            .components()
            .into_iter()
            .zip(other.components())
            .map(|(a, b)| a.axpy(factor, b))
            .collect::<Result<Vec<_>>>()?;
        State::from_components(parts)
    }

    pub fn sub(&self, other: &State) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub fn add(&self, other: &State) -> Result<Self> {
        self.axpy(1.0, other)
    }

    /// Largest nodewise absolute difference over all components.
    pub fn max_abs_diff(&self, other: &State) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .components()
            .into_iter()
            .zip(other.components())
            .flat_map(|(a, b)| a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max))
    }
}

/// The restriction margin ε, stored as a whole number of cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Margin {
    grid: Grid,
    cells: usize,
}

impl Margin {
    /// ε must already sit on a node and satisfy Δθ ≤ ε ≤ 1/2 − Δθ.
    pub fn new(grid: Grid, eps: f64) -> Result<Self> {
        Self::check_open_range(eps)?;
        let cells = grid
            .cells_in(eps)
            .ok_or_else(|| Error::parameter("epsilon", eps, "a grid node (multiple of 1/n_cells)"))?;
        Self::from_cells(grid, cells)
    }

    /// Snaps ε to the nearest node.
    pub fn snapped(grid: Grid, eps: f64) -> Result<Self> {
        Self::check_open_range(eps)?;
        let cells = (eps * grid.n_cells() as f64).round() as usize;
        Self::from_cells(grid, cells)
    }

    /// The whole interval `[0, 1]`; used only to exhibit non-coercivity.
    pub fn full(grid: Grid) -> Self {
        Self { grid, cells: 0 }
    }

    fn check_open_range(eps: f64) -> Result<()> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::parameter("epsilon", eps, "in (0, 1/2)"));
        }
        Ok(())
    }

    fn from_cells(grid: Grid, cells: usize) -> Result<Self> {
        let n = grid.n_cells();
        if cells < 1 || 2 * cells + 2 > n {
            return Err(Error::parameter(
                "epsilon",
                cells as f64 / n as f64,
                format!("in [Δθ, 1/2 − Δθ] with Δθ = 1/{n}"),
            ));
        }
        Ok(Self { grid, cells })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn eps(&self) -> f64 {
        self.cells as f64 / self.grid.n_cells() as f64
    }

    /// First node index of the window.
    pub fn lo(&self) -> usize {
        self.cells
    }

    /// Last node index of the window (inclusive).
    pub fn hi(&self) -> usize {
        self.grid.n_cells() - self.cells
    }

    pub fn len(&self) -> usize {
        self.hi() - self.lo() + 1
    }

    /// Never true: the window always holds at least one node.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, node: usize) -> bool {
        node >= self.lo() && node <= self.hi()
    }

    /// Trapezoid weight of the `k`-th window node on `[ε, 1-ε]`.
    pub fn weight(&self, k: usize) -> f64 {
        let h = self.grid.spacing();
        if k == 0 || k + 1 == self.len() {
            0.5 * h
        } else {
            h
        }
    }
}

/// An element of `X_ε = L2(ε, 1-ε)` (or its square): samples on `[ε, 1-ε]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedFunction {
    margin: Margin,
    components: Vec<Vec<f64>>,
}

impl RestrictedFunction {
    pub fn new(margin: Margin, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.is_empty() || components.len() > 2 {
            return Err(Error::parameter("components", components.len() as f64, "1 or 2"));
        }
        for c in &components {
            if c.len() != margin.len() {
                return Err(Error::parameter(
                    "restricted.len",
                    c.len() as f64,
                    format!("{} window nodes", margin.len()),
                ));
            }
            if let Some(bad) = c.iter().find(|v| !v.is_finite()) {
                return Err(Error::parameter("sample", *bad, "finite"));
            }
        }
        Ok(Self { margin, components })
    }

    pub(crate) fn from_raw(margin: Margin, components: Vec<Vec<f64>>) -> Self {
        Self { margin, components }
    }

    pub fn margin(&self) -> Margin {
        self.margin
    }

    pub fn grid(&self) -> Grid {
        self.margin.grid
    }

    pub fn kind(&self) -> Kind {
        if self.components.len() == 1 {
            Kind::Scalar
        } else {
            Kind::Pair
        }
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    fn check_compatible(&self, other: &RestrictedFunction) -> Result<()> {
        self.grid().check_same(&other.grid())?;
        if self.margin != other.margin {
            return Err(Error::parameter("epsilon", other.margin.eps(), format!("{}", self.margin.eps())));
        }
        if self.kind() != other.kind() {
            return Err(Error::KindMismatch {
                expected: self.kind().name(),
                found: other.kind().name(),
            });
        }
        Ok(())
    }

    /// Trapezoid inner product on `[ε, 1-ε]`.
    pub fn inner(&self, other: &RestrictedFunction) -> Result<f64> {
        self.check_compatible(other)?;
        let m = self.margin;
        let mut total = 0.0;
        for (a, b) in self.components.iter().zip(&other.components) {
            total += pairwise_sum(a.len(), &|k| m.weight(k) * a[k] * b[k]);
        }
        Ok(total)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).expect("self-compatible").sqrt()
    }

    pub fn sub(&self, other: &RestrictedFunction) -> Result<Self> {
        self.check_compatible(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Ok(Self::from_raw(self.margin, components))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_raw(
            self.margin,
            self.components
                .iter()
                .map(|c| c.iter().map(|v| factor * v).collect())
                .collect(),
        )
    }
}

/// `L_ε`: keeps the samples on `[ε, 1-ε]`.
pub fn restrict(x: &State, margin: Margin) -> Result<RestrictedFunction> {
    x.grid().check_same(&margin.grid)?;
    let components = x
        .components()
        .into_iter()
        .map(|c| c.values[margin.lo()..=margin.hi()].to_vec())
        .collect();
    Ok(RestrictedFunction::from_raw(margin, components))
}

/// `L_ε*`: zero extension back to `[0, 1]`.
pub fn embed(w: &RestrictedFunction) -> State {
    let m = w.margin;
    let parts = w
        .components
        .iter()
        .map(|c| {
            let mut values = vec![0.0; m.grid.n_nodes()];
            values[m.lo()..=m.hi()].copy_from_slice(c);
            GridFunction::from_raw(m.grid, values)
        })
        .collect();
    State::from_components(parts).expect("components share the margin grid")
}

/// `P_{L_ε} = L_ε* L_ε`: zeroes samples outside `[ε, 1-ε]`.
pub fn project(x: &State, margin: Margin) -> Result<State> {
    x.grid().check_same(&margin.grid)?;
    Ok(x.map_components(|c| {
        let values = c
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| if margin.contains(i) { *v } else { 0.0 })
            .collect();
        GridFunction::from_raw(margin.grid, values)
    }))
}
