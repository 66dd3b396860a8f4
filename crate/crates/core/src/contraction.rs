//! Discretized contraction inequality and the density bisection.
//!
//! With `d` constant on the cells of `[0, 4]` and lengths in units of `r`,
//! the one-step contraction condition at the right endpoint `λ_i = 4i/L`
//! reads
//!
//! ```text
//! (c + W_i) d_i ≥ g_i + Σ_{j<i} w_ij d_j,     W_i = Σ_{j<i} w_ij,
//! ```
//!
//! with `c = 1 − 4ρ − ε̂`, `g_i = (ρ/π)·crescent_area(λ_i)` and
//! `w_ij = (ρ/π) ∫_{cell j} 2(π − θ(u, λ_i)) u du`. The system is lower
//! triangular, so forward substitution yields its pointwise-least solution.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::format::round_sig;
use crate::geometry::{crescent_angle_unchecked, crescent_area_unchecked};
use crate::lp::{LinearProgram, Relation};
use crate::metric::{PiecewiseMetric, GRID_SPAN};
use crate::quadrature::GaussLegendre;
use crate::{Error, Real, Result, DEFAULT_EPSILON_HAT};

pub const DEFAULT_QUADRATURE_ORDER: usize = 16;
pub const DEFAULT_CELLS: usize = 256;
pub const DEFAULT_TOL: f64 = 1e-6;

/// Residuals below this count as tight.
pub const TIGHT_THRESHOLD: f64 = 1e-8;

/// Upper limit of the savings integral.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegralVariant {
    /// Integrate `u` over `(0, λ]`, using the law-of-cosines angle for `u > 2`.
    AsWritten,
    /// Stop at `u = 2`: points farther than `2r` from `y` are not in the crescent.
    #[default]
    Clamped,
}

impl fmt::Display for IntegralVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntegralVariant::AsWritten => "as-written",
            IntegralVariant::Clamped => "clamped",
        })
    }
}

impl FromStr for IntegralVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as-written" => Ok(IntegralVariant::AsWritten),
            "clamped" => Ok(IntegralVariant::Clamped),
            other => Err(Error::Parse(format!(
                "unknown integral variant {other:?} (expected as-written or clamped)"
            ))),
        }
    }
}

/// Density-independent part of the constraint system: crescent areas at the
/// right endpoints and the savings integrals `∫_{cell j} 2(π − θ(u, λ_i)) u du`.
#[derive(Debug, Clone)]
pub struct SavingsKernel<T> {
    cells: usize,
    order: usize,
    variant: IntegralVariant,
    areas: Vec<T>,
    rows: Vec<Vec<T>>,
}

impl<T: Real> SavingsKernel<T> {
    pub fn new(cells: usize, order: usize, variant: IntegralVariant) -> Result<Self> {
        if cells == 0 {
            return Err(Error::domain("L", "need at least one cell"));
        }
        let rule = GaussLegendre::<T>::new(order)?;
        let h = T::lit(GRID_SPAN) / T::lit(cells as f64);
        let lambda = |i: usize| T::lit(GRID_SPAN * (i + 1) as f64 / cells as f64);
        let areas = (0..cells).map(|i| crescent_area_unchecked(lambda(i))).collect();
        let rows = (0..cells)
            .into_par_iter()
            .map(|i| {
                let lam = lambda(i);
                (0..i)
                    .map(|j| cell_integral(&rule, lam, T::lit(j as f64) * h, T::lit((j + 1) as f64) * h, variant))
                    .collect()
            })
            .collect();
        Ok(Self {
            cells,
            order,
            variant,
            areas,
            rows,
        })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn variant(&self) -> IntegralVariant {
        self.variant
    }

    /// Savings integral of cell `j` for constraint `i` (0-based, `j < i`).
    pub fn weight(&self, i: usize, j: usize) -> T {
        self.rows[i][j]
    }

    /// Cells that carry no savings weight into any later constraint. Raising
    /// `d` on such a cell only loosens its own constraint.
    pub fn load_free(&self) -> Vec<bool> {
        (0..self.cells)
            .map(|j| self.rows[j + 1..].iter().all(|row| row[j] == T::zero()))
            .collect()
    }
}

/// `∫_a^{b'} 2(π − θ(u, λ)) u du` with `b'` truncated at `λ` (and at 2 when clamped).
fn cell_integral<T: Real>(rule: &GaussLegendre<T>, lambda: T, a: T, b: T, variant: IntegralVariant) -> T {
    let two = T::lit(2.0);
    let mut hi = b.min(lambda);
    if variant == IntegralVariant::Clamped {
        hi = hi.min(two);
    }
    let kink = (lambda - two).abs();
    rule.integrate_split(a, hi, &[kink], |u| {
        two * (T::PI() - crescent_angle_unchecked(u, lambda)) * u
    })
}

/// The contraction constraints for one density.
#[derive(Debug, Clone)]
pub struct ConstraintSystem<T> {
    rho: T,
    epsilon_hat: T,
    margin: T,
    variant: IntegralVariant,
    g: Vec<T>,
    w: Vec<Vec<T>>,
    w_sum: Vec<T>,
    load_free: Vec<bool>,
}

impl<T: Real> ConstraintSystem<T> {
    /// Builds the system with `ε̂ = 10⁻⁶`.
    pub fn assemble(rho: T, cells: usize, order: usize, variant: IntegralVariant) -> Result<Self> {
        let kernel = SavingsKernel::new(cells, order, variant)?;
        Self::from_kernel(&kernel, rho, T::lit(DEFAULT_EPSILON_HAT))
    }

    pub fn from_kernel(kernel: &SavingsKernel<T>, rho: T, epsilon_hat: T) -> Result<Self> {
        if !(rho > T::zero() && rho < T::lit(0.25)) {
            return Err(Error::domain("rho", format!("{rho} not in (0, 1/4)")));
        }
        if !(epsilon_hat >= T::zero()) {
            return Err(Error::domain("epsilon_hat", format!("{epsilon_hat} < 0")));
        }
        let margin = T::one() - T::lit(4.0) * rho - epsilon_hat;
        if !(margin > T::zero()) {
            return Err(Error::domain(
                "rho",
                format!("{rho} leaves no contraction margin (1 − 4ρ − ε̂ = {margin})"),
            ));
        }
        let scale = rho / T::PI();
        let g = kernel.areas.iter().map(|&a| scale * a).collect();
        let w: Vec<Vec<T>> = kernel
            .rows
            .iter()
            .map(|row| row.iter().map(|&v| scale * v).collect())
            .collect();
        let w_sum = w.iter().map(|row| row.iter().copied().sum()).collect();
        Ok(Self {
            rho,
            epsilon_hat,
            margin,
            variant: kernel.variant,
            g,
            w,
            w_sum,
            load_free: kernel.load_free(),
        })
    }

    pub fn cells(&self) -> usize {
        self.g.len()
    }

    pub fn rho(&self) -> T {
        self.rho
    }

    pub fn epsilon_hat(&self) -> T {
        self.epsilon_hat
    }

    /// `c = 1 − 4ρ − ε̂`.
    pub fn margin(&self) -> T {
        self.margin
    }

    pub fn variant(&self) -> IntegralVariant {
        self.variant
    }

    /// Crescent terms `g_i`.
    pub fn g(&self) -> &[T] {
        &self.g
    }

    /// Savings weights `w_ij`, `j < i`, of constraint `i` (0-based).
    pub fn weights(&self, i: usize) -> &[T] {
        &self.w[i]
    }

    /// `W_i = Σ_j w_ij`.
    pub fn weight_sum(&self, i: usize) -> T {
        self.w_sum[i]
    }

    /// Right endpoint of cell `i` (0-based), `4(i + 1)/L`.
    pub fn lambda(&self, i: usize) -> T {
        T::lit(GRID_SPAN * (i + 1) as f64 / self.cells() as f64)
    }

    fn check_dim(&self, metric: &PiecewiseMetric<T>) -> Result<()> {
        if metric.cells() != self.cells() {
            return Err(Error::domain(
                "metric",
                format!("has {} cells, system has {}", metric.cells(), self.cells()),
            ));
        }
        Ok(())
    }

    fn residual_at(&self, i: usize, d: &[T]) -> T {
        let saved: T = self.w[i].iter().zip(d).map(|(&w, &v)| w * v).sum();
        (self.margin + self.w_sum[i]) * d[i] - self.g[i] - saved
    }

    /// `(c + W_i) d_i − g_i − Σ_j w_ij d_j` for every constraint.
    pub fn residuals(&self, metric: &PiecewiseMetric<T>) -> Result<Vec<T>> {
        self.check_dim(metric)?;
        let d = metric.values();
        Ok((0..self.cells()).map(|i| self.residual_at(i, d)).collect())
    }

    /// Rounding allowance for constraint `i`.
    fn tolerance(&self, i: usize) -> T {
        T::epsilon() * T::lit(64.0) * (self.margin + self.w_sum[i] + self.g[i])
    }

    /// Whether `metric` satisfies every constraint up to rounding.
    pub fn is_satisfied_by(&self, metric: &PiecewiseMetric<T>) -> Result<bool> {
        let r = self.residuals(metric)?;
        Ok(r.iter().enumerate().all(|(i, &v)| v >= -self.tolerance(i)))
    }

    /// Pointwise-least nonnegative solution, by forward substitution.
    ///
    /// Values may exceed 1; the system is feasible with `d ≤ 1` iff they don't.
    pub fn minimal_metric(&self) -> PiecewiseMetric<T> {
        let mut d: Vec<T> = Vec::with_capacity(self.cells());
        for i in 0..self.cells() {
            let saved: T = self.w[i].iter().zip(&d).map(|(&w, &v)| w * v).sum();
            let v = (self.g[i] + saved) / (self.margin + self.w_sum[i]);
            d.push(v.max(T::zero()));
        }
        PiecewiseMetric::new(d).expect("forward substitution yields finite nonnegative values")
    }

    /// Feasibility of `d ∈ [0, 1]^L` decided by the phase-1 simplex.
    pub fn lp_feasible(&self) -> bool {
        let l = self.cells();
        let mut lp = LinearProgram::<T>::new(l);
        for i in 0..l {
            let mut row: Vec<(usize, T)> = self.w[i]
                .iter()
                .enumerate()
                .filter(|(_, w)| **w != T::zero())
                .map(|(j, &w)| (j, -w))
                .collect();
            row.push((i, self.margin + self.w_sum[i]));
            lp.constrain(row, Relation::GreaterEq, self.g[i]);
            lp.constrain(vec![(i, T::one())], Relation::LessEq, T::one());
        }
        lp.is_feasible()
    }

    /// Whether the Hamming metric `d ≡ 1` satisfies every constraint.
    pub fn hamming_feasible(&self) -> bool {
        self.is_satisfied_by(&PiecewiseMetric::constant_one(self.cells()))
            .expect("dimensions match")
    }

    /// Turns the minimal solution into a metric satisfying the metric axioms.
    ///
    /// Caps at 1, lowers to the largest monotone subadditive minorant, then
    /// raises load-free cells to the largest value the axioms allow. If the
    /// values stay too small for `d ≡ 1` beyond the grid, the minorant is
    /// first rescaled so its last cell is 1. The result must still be checked
    /// against the constraints.
    pub fn repair(&self, minimal: &PiecewiseMetric<T>) -> Result<PiecewiseMetric<T>> {
        self.check_dim(minimal)?;
        let l = self.cells();
        let mut d: Vec<T> = minimal.values().iter().map(|v| v.min(T::one())).collect();

        for _ in 0..=l {
            let mut changed = false;
            for k in 1..l {
                let bound = (0..k)
                    .map(|a| d[a] + d[k - 1 - a])
                    .fold(T::infinity(), T::min);
                if bound < d[k] {
                    d[k] = bound;
                    changed = true;
                }
            }
            for k in (0..l.saturating_sub(1)).rev() {
                if d[k] > d[k + 1] {
                    d[k] = d[k + 1];
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let raised = self.raise_load_free(d.clone());
        if PiecewiseMetric::new(raised.clone())?.check_axioms().tail.is_empty() {
            return PiecewiseMetric::new(raised);
        }
        // Scaling up keeps every constraint and both shape axioms; with the
        // last cell at 1, subadditivity then implies the tail condition.
        let top = d.iter().copied().fold(T::zero(), T::max);
        if top > T::zero() {
            for v in &mut d {
                *v = (*v / top).min(T::one());
            }
        }
        PiecewiseMetric::new(self.raise_load_free(d))
    }

    fn raise_load_free(&self, mut d: Vec<T>) -> Vec<T> {
        let l = d.len();
        for k in 0..l {
            if !self.load_free[k] {
                continue;
            }
            let mut cap = (0..k)
                .map(|a| d[a] + d[k - 1 - a])
                .fold(T::one(), T::min);
            for m in k + 1..l {
                if !self.load_free[m] {
                    cap = cap.min(d[m]);
                }
            }
            d[k] = d[k].max(cap);
        }
        d
    }

    /// Decides feasibility: minimal solution `≤ 1`, and its repair satisfies
    /// both the constraints and the metric axioms.
    pub fn feasibility(&self) -> Result<Feasibility<T>> {
        let minimal = self.minimal_metric();
        if minimal.values().iter().any(|&v| v > T::one()) {
            return Ok(Feasibility {
                feasible: false,
                minimal,
                metric: None,
            });
        }
        let repaired = self.repair(&minimal)?;
        let ok = self.is_satisfied_by(&repaired)? && repaired.check_axioms().is_ok();
        Ok(Feasibility {
            feasible: ok,
            minimal,
            metric: ok.then_some(repaired),
        })
    }

    /// Per-constraint residuals of `metric` and the λ-ranges where they are tight.
    pub fn slack_report(&self, metric: &PiecewiseMetric<T>) -> Result<SlackReport<T>> {
        let residuals = self.residuals(metric)?;
        let threshold = T::lit(TIGHT_THRESHOLD);
        let h = T::lit(GRID_SPAN) / T::lit(self.cells() as f64);
        let mut tight_ranges: Vec<(T, T)> = Vec::new();
        let mut open: Option<usize> = None;
        for (i, &r) in residuals.iter().enumerate() {
            match (r < threshold, open) {
                (true, None) => open = Some(i),
                (false, Some(start)) => {
                    tight_ranges.push((T::lit(start as f64) * h, self.lambda(i - 1)));
                    open = None;
                }
                _ => {}
            }
        }
        if let Some(start) = open {
            tight_ranges.push((T::lit(start as f64) * h, self.lambda(self.cells() - 1)));
        }
        let tight_lambda_max = tight_ranges.last().map(|&(_, hi)| hi);
        Ok(SlackReport {
            residuals,
            tight_ranges,
            tight_lambda_max,
        })
    }
}

/// Result of [`ConstraintSystem::feasibility`].
#[derive(Debug, Clone)]
pub struct Feasibility<T> {
    pub feasible: bool,
    pub minimal: PiecewiseMetric<T>,
    /// The repaired metric, present when feasible.
    pub metric: Option<PiecewiseMetric<T>>,
}

/// Convenience wrapper: assemble with the default order and decide.
pub fn feasible<T: Real>(rho: T, cells: usize, variant: IntegralVariant) -> Result<Feasibility<T>> {
    ConstraintSystem::assemble(rho, cells, DEFAULT_QUADRATURE_ORDER, variant)?.feasibility()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlackReport<T> {
    pub residuals: Vec<T>,
    /// Maximal runs of tight cells as `(left, right)` λ-intervals.
    pub tight_ranges: Vec<(T, T)>,
    pub tight_lambda_max: Option<T>,
}

/// Parameters of the bisection for the largest feasible density.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSearch {
    pub cells: usize,
    pub tol: f64,
    pub variant: IntegralVariant,
    pub quadrature_order: usize,
    pub epsilon_hat: f64,
    /// Force `d ≡ 1` (the Hamming baseline).
    pub hamming: bool,
}

impl Default for BoundSearch {
    fn default() -> Self {
        Self {
            cells: DEFAULT_CELLS,
            tol: DEFAULT_TOL,
            variant: IntegralVariant::Clamped,
            quadrature_order: DEFAULT_QUADRATURE_ORDER,
            epsilon_hat: DEFAULT_EPSILON_HAT,
            hamming: false,
        }
    }
}

impl BoundSearch {
    pub fn new(cells: usize) -> Self {
        Self {
            cells,
            ..Self::default()
        }
    }

    /// Bisects on `[1/8, (1 − ε̂)/4)` to resolution `tol`.
    ///
    /// If `1/8` itself is infeasible (the Hamming baseline sits just below
    /// it) the bracket drops to `(0, 1/8]`.
    pub fn run<T: Real>(&self) -> Result<BoundResult<T>> {
        if !(self.tol >= 1e-9) {
            return Err(Error::domain("tol", format!("{} < 1e-9", self.tol)));
        }
        let kernel = SavingsKernel::<T>::new(self.cells, self.quadrature_order, self.variant)?;
        let eps = T::lit(self.epsilon_hat);
        let probe = |rho: f64| -> Result<Option<(ConstraintSystem<T>, PiecewiseMetric<T>)>> {
            let system = ConstraintSystem::from_kernel(&kernel, T::lit(rho), eps)?;
            let metric = if self.hamming {
                system
                    .hamming_feasible()
                    .then(|| PiecewiseMetric::constant_one(self.cells))
            } else {
                system.feasibility()?.metric
            };
            Ok(metric.map(|m| (system, m)))
        };

        let mut hi = (1.0 - self.epsilon_hat) / 4.0;
        let mut lo = 0.125;
        let mut iterations = 0usize;
        let mut best = probe(lo)?;
        if best.is_none() {
            hi = lo;
            lo = 0.0;
        }
        while hi - lo > self.tol {
            let mid = 0.5 * (lo + hi);
            iterations += 1;
            match probe(mid)? {
                Some(found) => {
                    lo = mid;
                    best = Some(found);
                }
                None => hi = mid,
            }
        }
        let (system, metric) = best.ok_or_else(|| {
            Error::domain("rho", "no feasible density above the search resolution")
        })?;
        let slack = system.slack_report(&metric)?;
        Ok(BoundResult {
            cells: self.cells,
            rho_star: system.rho(),
            tol: self.tol,
            variant: self.variant,
            quadrature_order: self.quadrature_order,
            epsilon_hat: self.epsilon_hat,
            hamming: self.hamming,
            iterations,
            metric,
            slack,
        })
    }
}

/// Largest feasible density for `cells` cells with the default settings.
pub fn max_density<T: Real>(cells: usize, tol: f64, variant: IntegralVariant) -> Result<BoundResult<T>> {
    BoundSearch {
        cells,
        tol,
        variant,
        ..BoundSearch::default()
    }
    .run()
}

#[derive(Debug, Clone)]
pub struct BoundResult<T> {
    pub cells: usize,
    pub rho_star: T,
    pub tol: f64,
    pub variant: IntegralVariant,
    pub quadrature_order: usize,
    pub epsilon_hat: f64,
    pub hamming: bool,
    pub iterations: usize,
    /// Repaired metric at `rho_star`.
    pub metric: PiecewiseMetric<T>,
    pub slack: SlackReport<T>,
}

impl<T: Real> BoundResult<T> {
    pub fn to_record(&self) -> BoundRecord {
        BoundRecord {
            cells: self.cells,
            rho_star: round_sig(self.rho_star.to_f64_lossy()),
            tol: self.tol,
            variant: self.variant,
            epsilon_hat: self.epsilon_hat,
            iterations: self.iterations,
            metric: MetricValues {
                values: self
                    .metric
                    .values()
                    .iter()
                    .map(|v| round_sig(v.to_f64_lossy()))
                    .collect(),
            },
            tight_lambda_max: self.slack.tight_lambda_max.map(|v| round_sig(v.to_f64_lossy())),
        }
    }
}

/// Serialized [`BoundResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    #[serde(rename = "L")]
    pub cells: usize,
    pub rho_star: f64,
    pub tol: f64,
    pub variant: IntegralVariant,
    pub epsilon_hat: f64,
    pub iterations: usize,
    pub metric: MetricValues,
    pub tight_lambda_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricValues {
    pub values: Vec<f64>,
}
