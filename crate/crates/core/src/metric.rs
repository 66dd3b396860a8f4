//! The piecewise-constant coupling metric `d(λ)`.
//!
//! `d` is stored as `L` values on the cells `((i−1)·4/L, i·4/L]` of `[0, 4]`
//! (lengths in units of `r`). It is `0` at `λ = 0` and `1` from `λ = 4` on.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::dynamics::Configuration;
use crate::format::{fmt_sig, round_sig};
use crate::geometry::{crescent_area_unchecked, torus_dist, TorusPoint};
use crate::{Error, Real, Result};

/// Right end of the grid, in units of `r`.
pub const GRID_SPAN: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseMetric<T> {
    values: Vec<T>,
}

impl<T: Real> PiecewiseMetric<T> {
    /// Wraps cell values; they must be finite and nonnegative. Values above 1
    /// are accepted here and reported by [`check_axioms`](Self::check_axioms).
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("L", "metric needs at least one cell"));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < T::zero())
        {
            return Err(Error::domain("metric value", format!("d[{i}] = {v}")));
        }
        Ok(Self { values })
    }

    /// The Hamming metric, `d ≡ 1`.
    pub fn constant_one(cells: usize) -> Self {
        Self {
            values: vec![T::one(); cells.max(1)],
        }
    }

    /// Number of cells `L`.
    pub fn cells(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn cell_width(&self) -> T {
        T::lit(GRID_SPAN) / T::lit(self.cells() as f64)
    }

    /// Right endpoint `4i/L` of cell `i` (1-based).
    pub fn right_endpoint(&self, i: usize) -> T {
        T::lit(GRID_SPAN * i as f64 / self.cells() as f64)
    }

    /// 1-based cell containing `λ ∈ (0, 4]`, tolerant of rounding at endpoints.
    pub fn cell_index(&self, lambda: T) -> usize {
        let l = self.cells();
        let pos = (lambda * T::lit(l as f64) / T::lit(GRID_SPAN)).to_f64_lossy();
        ((pos - 1e-9).ceil().max(1.0) as usize).min(l)
    }

    /// `d(λ)`.
    pub fn eval(&self, lambda: T) -> Result<T> {
        if !(lambda >= T::zero()) {
            return Err(Error::domain("lambda", format!("{lambda} < 0")));
        }
        Ok(self.eval_unchecked(lambda))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, lambda: T) -> T {
        if lambda <= T::zero() {
            T::zero()
        } else if lambda >= T::lit(GRID_SPAN) {
            T::one()
        } else {
            self.values[self.cell_index(lambda) - 1]
        }
    }

    /// Grid checks of monotonicity, subadditivity and range.
    ///
    /// Subadditivity is `d_{i+j} ≤ d_i + d_j` for `i + j ≤ L` and, past the
    /// grid where `d = 1`, `1 ≤ d_i + d_j` for `i + j > L`.
    pub fn check_axioms(&self) -> AxiomReport {
        let tol = T::epsilon() * T::lit(64.0);
        let d = &self.values;
        let l = d.len();
        let mut report = AxiomReport::default();
        for (i, &v) in d.iter().enumerate() {
            if v < T::zero() || v > T::one() + tol {
                report.range.push(i + 1);
            }
        }
        for i in 1..l {
            if d[i - 1] > d[i] + tol {
                report.monotonicity.push(i);
            }
        }
        for i in 1..=l {
            for j in i..=l {
                let lhs = if i + j <= l { d[i + j - 1] } else { T::one() };
                if lhs > d[i - 1] + d[j - 1] + tol {
                    if i + j <= l {
                        report.subadditivity.push((i, j));
                    } else {
                        report.tail.push((i, j));
                    }
                }
            }
        }
        report
    }

    /// Writes the `lambda_right,d` CSV; the tail `d = 1` past 4 is implicit.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["lambda_right", "d"])?;
        for (i, v) in self.values.iter().enumerate() {
            w.write_record([
                fmt_sig(self.right_endpoint(i + 1).to_f64_lossy()),
                fmt_sig(v.to_f64_lossy()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the CSV written by [`write_csv`](Self::write_csv), checking the grid.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["lambda_right", "d"] {
            return Err(Error::Parse(format!(
                "expected header lambda_right,d, got {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut rows = Vec::new();
        for row in rdr.deserialize() {
            let (lambda, d): (f64, f64) = row?;
            rows.push((lambda, d));
        }
        let l = rows.len();
        if l == 0 {
            return Err(Error::Parse("metric CSV has no rows".into()));
        }
        for (i, (lambda, _)) in rows.iter().enumerate() {
            let want = GRID_SPAN * (i + 1) as f64 / l as f64;
            if (lambda - want).abs() > 1e-9 * want.max(1.0) {
                return Err(Error::Parse(format!(
                    "row {} has lambda_right = {lambda}, expected {want}",
                    i + 1
                )));
            }
        }
        Self::new(rows.into_iter().map(|(_, d)| T::lit(d)).collect())
    }

    /// JSON form `{L, rho, values[]}`.
    pub fn to_record(&self, rho: f64) -> MetricRecord {
        MetricRecord {
            cells: self.cells(),
            rho: round_sig(rho),
            values: self.values.iter().map(|v| round_sig(v.to_f64_lossy())).collect(),
        }
    }

    pub fn from_record(record: &MetricRecord) -> Result<Self> {
        if record.values.len() != record.cells {
            return Err(Error::Parse(format!(
                "L = {} but {} values",
                record.cells,
                record.values.len()
            )));
        }
        Self::new(record.values.iter().map(|&v| T::lit(v)).collect())
    }
}

/// Serialized metric: `{L, rho, values[]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    #[serde(rename = "L")]
    pub cells: usize,
    pub rho: f64,
    pub values: Vec<f64>,
}

/// Violations found by [`PiecewiseMetric::check_axioms`]; indices are 1-based.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub monotonicity: Vec<usize>,
    pub subadditivity: Vec<(usize, usize)>,
    pub tail: Vec<(usize, usize)>,
    pub range: Vec<usize>,
}

impl AxiomReport {
    pub fn is_ok(&self) -> bool {
        self.monotonicity.is_empty()
            && self.subadditivity.is_empty()
            && self.tail.is_empty()
            && self.range.is_empty()
    }
}

/// Optimal metric on `0 ≤ λ ≤ 1`, where no near move can save anything:
/// `ρ / (π (1 − 4ρ)) · crescent_area(λ)`.
pub fn analytic_small_ell<T: Real>(lambda: T, rho: T) -> Result<T> {
    if !(lambda >= T::zero() && lambda <= T::one()) {
        return Err(Error::domain("lambda", format!("{lambda} not in [0, 1]")));
    }
    if !(rho > T::zero() && rho < T::lit(0.25)) {
        return Err(Error::domain("rho", format!("{rho} not in (0, 1/4)")));
    }
    let four = T::lit(4.0);
    Ok(rho / (T::PI() * (T::one() - four * rho)) * crescent_area_unchecked(lambda))
}

/// Two configurations that disagree in at most two disk positions.
#[derive(Debug, Clone)]
pub struct DisagreementPair<T> {
    x: Configuration<T>,
    y: Configuration<T>,
    indices: Vec<usize>,
}

impl<T: Real> DisagreementPair<T> {
    pub fn new(x: Configuration<T>, y: Configuration<T>) -> Result<Self> {
        if x.n() != y.n() || x.r() != y.r() {
            return Err(Error::domain("pair", "configurations differ in n or r"));
        }
        let indices: Vec<usize> = (0..x.n())
            .filter(|&i| x.center(i) != y.center(i))
            .collect();
        if indices.len() > 2 {
            return Err(Error::domain(
                "pair",
                format!("{} disagreeing disks (at most 2 supported)", indices.len()),
            ));
        }
        Ok(Self { x, y, indices })
    }

    pub fn x(&self) -> &Configuration<T> {
        &self.x
    }

    pub fn y(&self) -> &Configuration<T> {
        &self.y
    }

    /// Indices of the disagreeing disks (paired by label).
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Torus distances of the label-paired disagreeing centres.
    pub fn lengths(&self) -> Vec<T> {
        self.indices
            .iter()
            .map(|&i| torus_dist(&self.x.center(i), &self.y.center(i)))
            .collect()
    }

    /// Metric distance, minimized over the two pairings when two disks differ.
    pub fn distance(&self, metric: &PiecewiseMetric<T>) -> T {
        let r = self.x.r();
        match *self.indices.as_slice() {
            [] => T::zero(),
            [a] => metric.eval_unchecked(torus_dist(&self.x.center(a), &self.y.center(a)) / r),
            [a, b] => two_disk_distance(
                metric,
                r,
                [self.x.center(a), self.x.center(b)],
                [self.y.center(a), self.y.center(b)],
            ),
            _ => unreachable!("checked in DisagreementPair::new"),
        }
    }
}

/// Distance between configurations differing at two disks: `xs[k]` is paired
/// with `ys[k]` by label, and the crossed pairing is also considered.
pub fn two_disk_distance<T: Real>(
    metric: &PiecewiseMetric<T>,
    r: T,
    xs: [TorusPoint<T>; 2],
    ys: [TorusPoint<T>; 2],
) -> T {
    let d = |p: &TorusPoint<T>, q: &TorusPoint<T>| metric.eval_unchecked(torus_dist(p, q) / r);
    let straight = d(&xs[0], &ys[0]) + d(&xs[1], &ys[1]);
    let crossed = d(&xs[0], &ys[1]) + d(&xs[1], &ys[0]);
    straight.min(crossed)
}

/// [`DisagreementPair::distance`].
pub fn pair_distance<T: Real>(pair: &DisagreementPair<T>, metric: &PiecewiseMetric<T>) -> T {
    pair.distance(metric)
}
