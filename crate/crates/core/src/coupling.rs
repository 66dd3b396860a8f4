//! Coupled single-disk chains for pairs that disagree at disk 0.
//!
//! Both chains pick the same disk `j` and, unless the proposal falls in the
//! symmetric difference of the two danger zones of disk 0, the same position.
//! Inside that symmetric difference the `Y` chain receives the mirror image of
//! the proposal across the bisector of `x₀y₀`.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{random_config_with, stream_rng, uniform_point, Configuration};
use crate::geometry::{reflect_across_bisector, torus_dist, TorusPoint};
use crate::metric::{two_disk_distance, PiecewiseMetric};
use crate::{Error, Real, Result};

/// Burn-in used by [`make_pair`], in sweeps of `n` steps.
pub const DEFAULT_BURN_IN_SWEEPS: u64 = 2;

const DIRECTION_ATTEMPTS: usize = 1000;
const PAIR_RESTARTS: usize = 100;
const TRIALS_PER_CHUNK: u64 = 2048;
const Z_99: f64 = 2.575_829_303_548_900_4;

/// Two configurations identical except at disk 0.
#[derive(Debug, Clone)]
pub struct CoupledPair<T> {
    x: Configuration<T>,
    y: Configuration<T>,
    ell: T,
}

/// Where the shared proposal landed relative to the two danger zones of disk 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    /// The proposal moves disk 0 itself.
    DiskZero,
    /// `Z(y₀) \ Z(x₀)`.
    Crescent,
    /// `Z(x₀) \ Z(y₀)`.
    Mirror,
    /// Inside both zones or outside both.
    Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeKind {
    Coalesced,
    Unchanged,
    BothRejected,
    FarMove,
    NearMove,
}

impl OutcomeKind {
    pub const ALL: [OutcomeKind; 5] = [
        OutcomeKind::Coalesced,
        OutcomeKind::Unchanged,
        OutcomeKind::BothRejected,
        OutcomeKind::FarMove,
        OutcomeKind::NearMove,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeKind::Coalesced => "coalesced",
            OutcomeKind::Unchanged => "unchanged",
            OutcomeKind::BothRejected => "both-rejected",
            OutcomeKind::FarMove => "far-move",
            OutcomeKind::NearMove => "near-move",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl std::fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of one coupled step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome<T> {
    pub kind: OutcomeKind,
    pub region: Region,
    /// Index of the disk chosen by both chains.
    pub disk: usize,
    /// Bound on the metric change charged by the near/far accounting.
    pub delta_bound: T,
    /// Metric change after greedy relabelling.
    pub delta_exact: T,
    /// `|z − y₀| / r` for proposals landing in the crescent.
    pub s: Option<T>,
    /// Whether the move went through in each chain.
    pub x_moved: bool,
    pub y_moved: bool,
}

/// State after a coupled step.
#[derive(Debug, Clone)]
pub enum Successor<T> {
    /// The chains agree everywhere.
    Coalesced(Configuration<T>),
    /// Still a single disagreement at disk 0.
    Pair(CoupledPair<T>),
    /// Two disagreements, relabelled so the listed indices disagree.
    Split {
        x: Configuration<T>,
        y: Configuration<T>,
        indices: [usize; 2],
    },
}

impl<T: Real> CoupledPair<T> {
    /// Builds a pair from `x` by moving disk 0 to `y0`.
    pub fn new(x: Configuration<T>, y0: TorusPoint<T>) -> Result<Self> {
        let ell = torus_dist(&x.center(0), &y0);
        if !(ell > T::zero()) {
            return Err(Error::domain("pair", "disk 0 must differ between the chains"));
        }
        if ell > T::lit(4.0) * x.r() * (T::one() + T::epsilon() * T::lit(16.0)) {
            return Err(Error::domain("ell", format!("{} exceeds 4r", ell / x.r())));
        }
        if x.blocked(&y0, &[0]) {
            return Err(Error::Overlap("displaced disk 0 overlaps another disk".into()));
        }
        let mut y = x.clone();
        y.place(0, y0);
        Ok(Self { x, y, ell })
    }

    pub fn x(&self) -> &Configuration<T> {
        &self.x
    }

    pub fn y(&self) -> &Configuration<T> {
        &self.y
    }

    /// Torus distance `|x₀ − y₀|`.
    pub fn ell(&self) -> T {
        self.ell
    }

    pub fn ell_over_r(&self) -> T {
        self.ell / self.x.r()
    }

    fn x0(&self) -> TorusPoint<T> {
        self.x.center(0)
    }

    fn y0(&self) -> TorusPoint<T> {
        self.y.center(0)
    }

    /// Classifies a proposal of disk `j` to `z`.
    pub fn region(&self, j: usize, z: &TorusPoint<T>) -> Region {
        if j == 0 {
            return Region::DiskZero;
        }
        let two_r = T::lit(2.0) * self.x.r();
        let in_x = torus_dist(z, &self.x0()) < two_r;
        let in_y = torus_dist(z, &self.y0()) < two_r;
        match (in_x, in_y) {
            (false, true) => Region::Crescent,
            (true, false) => Region::Mirror,
            _ => Region::Common,
        }
    }

    /// Position proposed to the `Y` chain when `X` proposes `z` for disk `j`.
    pub fn y_proposal(&self, j: usize, z: &TorusPoint<T>) -> Result<TorusPoint<T>> {
        match self.region(j, z) {
            Region::Crescent | Region::Mirror => {
                reflect_across_bisector(z, &self.x0(), &self.y0())
            }
            _ => Ok(*z),
        }
    }

    /// Evaluates the coupled move of disk `j` to `z` without changing the pair.
    pub fn outcome(
        &self,
        metric: &PiecewiseMetric<T>,
        j: usize,
        z: &TorusPoint<T>,
    ) -> Result<StepOutcome<T>> {
        Ok(self.resolve(metric, j, z)?.0)
    }

    fn resolve(
        &self,
        metric: &PiecewiseMetric<T>,
        j: usize,
        z: &TorusPoint<T>,
    ) -> Result<(StepOutcome<T>, Option<Move<T>>)> {
        let r = self.x.r();
        let d_ell = metric.eval_unchecked(self.ell / r);
        let region = self.region(j, z);
        let quiet = |kind| StepOutcome {
            kind,
            region,
            disk: j,
            delta_bound: T::zero(),
            delta_exact: T::zero(),
            s: None,
            x_moved: false,
            y_moved: false,
        };
        match region {
            Region::DiskZero => {
                if self.x.blocked(z, &[0]) {
                    return Ok((quiet(OutcomeKind::Unchanged), None));
                }
                let out = StepOutcome {
                    kind: OutcomeKind::Coalesced,
                    delta_bound: -d_ell,
                    delta_exact: -d_ell,
                    x_moved: true,
                    y_moved: true,
                    ..quiet(OutcomeKind::Coalesced)
                };
                Ok((out, Some(Move::Coalesce(*z))))
            }
            Region::Mirror => Ok((quiet(OutcomeKind::BothRejected), None)),
            Region::Common => {
                if self.x.blocked(z, &[j]) {
                    return Ok((quiet(OutcomeKind::Unchanged), None));
                }
                let out = StepOutcome {
                    x_moved: true,
                    y_moved: true,
                    ..quiet(OutcomeKind::Unchanged)
                };
                Ok((out, Some(Move::Shared(*z))))
            }
            Region::Crescent => {
                let zbar = reflect_across_bisector(z, &self.x0(), &self.y0())?;
                let s_len = torus_dist(z, &self.y0());
                let s = s_len / r;
                let x_ok = !self.x.blocked(z, &[j]);
                let y_ok = !self.y.blocked(&zbar, &[j]);
                if !x_ok && !y_ok {
                    let out = StepOutcome {
                        s: Some(s),
                        ..quiet(OutcomeKind::Unchanged)
                    };
                    return Ok((out, None));
                }
                let xj = self.x.center(j);
                let (x0n, xjn) = (self.x0(), if x_ok { *z } else { xj });
                let (y0n, yjn) = (self.y0(), if y_ok { zbar } else { xj });
                let near = s_len < self.ell;
                let (kind, bound, xs, ys, relabel) = if !near {
                    (
                        OutcomeKind::FarMove,
                        T::one(),
                        [x0n, xjn],
                        [y0n, yjn],
                        Relabel::Keep,
                    )
                } else if x_ok {
                    // z becomes disk 0 of X; the old x₀ takes label j
                    (
                        OutcomeKind::NearMove,
                        T::one() + metric.eval_unchecked(s) - d_ell,
                        [xjn, x0n],
                        [y0n, yjn],
                        Relabel::SwapX,
                    )
                } else {
                    (
                        OutcomeKind::NearMove,
                        T::one() + metric.eval_unchecked(s) - d_ell,
                        [x0n, xjn],
                        [yjn, y0n],
                        Relabel::SwapY,
                    )
                };
                let exact = two_disk_distance(metric, r, xs, ys) - d_ell;
                let out = StepOutcome {
                    kind,
                    region,
                    disk: j,
                    delta_bound: bound,
                    delta_exact: exact,
                    s: Some(s),
                    x_moved: x_ok,
                    y_moved: y_ok,
                };
                let mv = Move::Split {
                    x_to: x_ok.then_some(*z),
                    y_to: y_ok.then_some(zbar),
                    relabel,
                };
                Ok((out, Some(mv)))
            }
        }
    }

    /// One coupled step with a fresh proposal drawn from `rng`.
    pub fn step<R: Rng + ?Sized>(
        &self,
        metric: &PiecewiseMetric<T>,
        rng: &mut R,
    ) -> Result<(Successor<T>, StepOutcome<T>)> {
        let (j, z) = self.x.propose(rng);
        coupled_step_at(self, metric, j, &z)
    }
}

#[derive(Debug, Clone, Copy)]
enum Relabel {
    Keep,
    SwapX,
    SwapY,
}

#[derive(Debug, Clone, Copy)]
enum Move<T> {
    Coalesce(TorusPoint<T>),
    Shared(TorusPoint<T>),
    Split {
        x_to: Option<TorusPoint<T>>,
        y_to: Option<TorusPoint<T>>,
        relabel: Relabel,
    },
}

fn swap_labels<T: Real>(c: &mut Configuration<T>, a: usize, b: usize) {
    let (pa, pb) = (c.center(a), c.center(b));
    c.place(a, pb);
    c.place(b, pa);
}

/// Applies the coupled move of disk `j` to `z` and returns the next state.
pub fn coupled_step_at<T: Real>(
    pair: &CoupledPair<T>,
    metric: &PiecewiseMetric<T>,
    j: usize,
    z: &TorusPoint<T>,
) -> Result<(Successor<T>, StepOutcome<T>)> {
    let (outcome, mv) = pair.resolve(metric, j, z)?;
    let next = match mv {
        None => Successor::Pair(pair.clone()),
        Some(Move::Coalesce(p)) => {
            let mut x = pair.x.clone();
            x.place(0, p);
            Successor::Coalesced(x)
        }
        Some(Move::Shared(p)) => {
            let mut next = pair.clone();
            next.x.place(j, p);
            next.y.place(j, p);
            Successor::Pair(next)
        }
        Some(Move::Split {
            x_to,
            y_to,
            relabel,
        }) => {
            let (mut x, mut y) = (pair.x.clone(), pair.y.clone());
            if let Some(p) = x_to {
                x.place(j, p);
            }
            if let Some(p) = y_to {
                y.place(j, p);
            }
            match relabel {
                Relabel::Keep => {}
                Relabel::SwapX => swap_labels(&mut x, 0, j),
                Relabel::SwapY => swap_labels(&mut y, 0, j),
            }
            Successor::Split {
                x,
                y,
                indices: [0, j],
            }
        }
    };
    Ok((next, outcome))
}

/// One step of the coupled chains.
pub fn coupled_step<T: Real, R: Rng + ?Sized>(
    pair: &CoupledPair<T>,
    metric: &PiecewiseMetric<T>,
    rng: &mut R,
) -> Result<(Successor<T>, StepOutcome<T>)> {
    pair.step(metric, rng)
}

/// Draws an equilibrated `X` and displaces disk 0 by exactly `ell_over_r · r`
/// in a uniformly random valid direction.
pub fn make_pair<T: Real, R: Rng + ?Sized>(
    n: usize,
    rho: f64,
    ell_over_r: f64,
    burn_in_sweeps: u64,
    rng: &mut R,
) -> Result<CoupledPair<T>> {
    if !(ell_over_r > 0.0 && ell_over_r <= 4.0) {
        return Err(Error::domain("ell", format!("{ell_over_r} not in (0, 4]")));
    }
    for _ in 0..PAIR_RESTARTS {
        let mut x = random_config_with::<T, R>(n, rho, rng)?;
        x.run_with(burn_in_sweeps * n as u64, rng);
        let ell = T::lit(ell_over_r) * x.r();
        let x0 = x.center(0);
        for _ in 0..DIRECTION_ATTEMPTS {
            let phi = T::lit(rng.random::<f64>() * std::f64::consts::TAU);
            let y0 = x0.offset([ell * phi.cos(), ell * phi.sin()]);
            if !x.blocked(&y0, &[0]) {
                let mut y = x.clone();
                y.place(0, y0);
                return Ok(CoupledPair { x, y, ell });
            }
        }
    }
    Err(Error::DisplacementFailed {
        attempts: PAIR_RESTARTS * DIRECTION_ATTEMPTS,
    })
}

/// Monte Carlo estimate of the one-step metric change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionEstimate {
    pub n: usize,
    pub rho: f64,
    pub ell_over_r: f64,
    pub trials: u64,
    pub mean_delta_bound: f64,
    pub mean_delta_exact: f64,
    pub ci99_bound: [f64; 2],
    pub ci99_exact: [f64; 2],
    pub outcome_counts: BTreeMap<String, u64>,
}

impl ContractionEstimate {
    /// Upper end of the 99% interval of the bound lies below zero.
    pub fn contracts(&self) -> bool {
        self.ci99_bound[1] < 0.0
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    sum_bound: f64,
    sum_sq_bound: f64,
    sum_exact: f64,
    sum_sq_exact: f64,
    counts: [u64; 5],
}

impl Tally {
    fn add<T: Real>(&mut self, o: &StepOutcome<T>) {
        let (b, e) = (o.delta_bound.to_f64_lossy(), o.delta_exact.to_f64_lossy());
        self.sum_bound += b;
        self.sum_sq_bound += b * b;
        self.sum_exact += e;
        self.sum_sq_exact += e * e;
        self.counts[o.kind.index()] += 1;
    }

    fn merge(&mut self, other: &Tally) {
        self.sum_bound += other.sum_bound;
        self.sum_sq_bound += other.sum_sq_bound;
        self.sum_exact += other.sum_exact;
        self.sum_sq_exact += other.sum_sq_exact;
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
    }
}

fn mean_and_ci(sum: f64, sum_sq: f64, trials: u64) -> (f64, [f64; 2]) {
    let t = trials as f64;
    let mean = sum / t;
    let var = if trials > 1 {
        ((sum_sq - t * mean * mean) / (t - 1.0)).max(0.0)
    } else {
        0.0
    };
    let half = Z_99 * (var / t).sqrt();
    (mean, [mean - half, mean + half])
}

/// Parameters of a contraction experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CouplingExperiment {
    pub n: usize,
    pub rho: f64,
    pub ell_over_r: f64,
    pub trials: u64,
    pub seed: u64,
    pub burn_in_sweeps: u64,
}

impl CouplingExperiment {
    pub fn new(n: usize, rho: f64, ell_over_r: f64, trials: u64, seed: u64) -> Self {
        Self {
            n,
            rho,
            ell_over_r,
            trials,
            seed,
            burn_in_sweeps: DEFAULT_BURN_IN_SWEEPS,
        }
    }

    /// Runs one coupled step on a fresh pair per trial. Trial `t` draws from
    /// stream `t` of the seed, so the result does not depend on the thread count.
    pub fn run<T: Real>(&self, metric: &PiecewiseMetric<T>) -> Result<ContractionEstimate> {
        if self.trials == 0 {
            return Err(Error::domain("trials", "need at least one trial"));
        }
        let chunks = self.trials.div_ceil(TRIALS_PER_CHUNK);
        let tallies: Vec<Tally> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut tally = Tally::default();
                let end = ((c + 1) * TRIALS_PER_CHUNK).min(self.trials);
                for t in c * TRIALS_PER_CHUNK..end {
                    tally.add(&self.trial::<T>(metric, t)?);
                }
                Ok(tally)
            })
            .collect::<Result<_>>()?;
        let mut total = Tally::default();
        for t in &tallies {
            total.merge(t);
        }
        let (mean_b, ci_b) = mean_and_ci(total.sum_bound, total.sum_sq_bound, self.trials);
        let (mean_e, ci_e) = mean_and_ci(total.sum_exact, total.sum_sq_exact, self.trials);
        let outcome_counts = OutcomeKind::ALL
            .iter()
            .map(|k| (k.as_str().to_string(), total.counts[k.index()]))
            .collect();
        Ok(ContractionEstimate {
            n: self.n,
            rho: self.rho,
            ell_over_r: self.ell_over_r,
            trials: self.trials,
            mean_delta_bound: mean_b,
            mean_delta_exact: mean_e,
            ci99_bound: ci_b,
            ci99_exact: ci_e,
            outcome_counts,
        })
    }

    /// Outcome of trial `t`.
    pub fn trial<T: Real>(&self, metric: &PiecewiseMetric<T>, t: u64) -> Result<StepOutcome<T>> {
        let mut rng = stream_rng(self.seed, t);
        let pair = make_pair::<T, _>(
            self.n,
            self.rho,
            self.ell_over_r,
            self.burn_in_sweeps,
            &mut rng,
        )?;
        let j = rng.random_range(0..self.n);
        let z = uniform_point(&mut rng);
        pair.outcome(metric, j, &z)
    }
}

pub fn estimate_contraction<T: Real>(
    n: usize,
    rho: f64,
    ell_over_r: f64,
    metric: &PiecewiseMetric<T>,
    trials: u64,
    seed: u64,
) -> Result<ContractionEstimate> {
    CouplingExperiment::new(n, rho, ell_over_r, trials, seed).run(metric)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::seeded_rng;
    use crate::metric::DisagreementPair;

    fn linear_metric() -> PiecewiseMetric<f64> {
        PiecewiseMetric::new((1..=16).map(|i| (i as f64 / 16.0).min(1.0)).collect()).unwrap()
    }

    /// Disk 0 at the centre, disk 1 parked far away, disk 0 of Y shifted by `ell·r` in x.
    fn staged(ell_over_r: f64) -> CoupledPair<f64> {
        let r = 0.02;
        let x = Configuration::new(
            vec![
                TorusPoint::new(0.5, 0.5),
                TorusPoint::new(0.1, 0.1),
                TorusPoint::new(0.8, 0.2),
            ],
            r,
        )
        .unwrap();
        CoupledPair::new(x, TorusPoint::new(0.5 + ell_over_r * r, 0.5)).unwrap()
    }

    #[test]
    fn make_pair_differs_only_at_disk_zero() {
        let mut rng = seeded_rng(1);
        for &ell in &[0.5, 1.0, 2.0, 4.0] {
            let p = make_pair::<f64, _>(32, 0.14, ell, 2, &mut rng).unwrap();
            assert!((torus_dist(&p.x().center(0), &p.y().center(0)) / p.x().r() - ell).abs() < 1e-12);
            for i in 1..32 {
                assert_eq!(p.x().center(i), p.y().center(i));
            }
            p.x().audit().unwrap();
            p.y().audit().unwrap();
        }
    }

    #[test]
    fn valid_disk_zero_move_coalesces() {
        let pair = staged(1.0);
        let m = linear_metric();
        let z = TorusPoint::new(0.3, 0.7);
        let (next, out) = coupled_step_at(&pair, &m, 0, &z).unwrap();
        assert_eq!(out.kind, OutcomeKind::Coalesced);
        assert!((out.delta_exact + m.eval(1.0).unwrap()).abs() < 1e-15);
        assert!(matches!(next, Successor::Coalesced(_)));
    }

    #[test]
    fn mirror_crescent_rejects_in_both_chains() {
        let pair = staged(1.0);
        let z = TorusPoint::new(0.5 - 1.5 * 0.02, 0.5);
        assert_eq!(pair.region(1, &z), Region::Mirror);
        let out = pair.outcome(&linear_metric(), 1, &z).unwrap();
        assert_eq!(out.kind, OutcomeKind::BothRejected);
        assert_eq!(out.delta_exact, 0.0);
    }

    #[test]
    fn near_move_bound_and_relabel() {
        let pair = staged(2.0);
        let m = linear_metric();
        // s = 1 < ℓ = 2, on the far side of y₀ from x₀
        let z = TorusPoint::new(0.5 + 3.0 * 0.02, 0.5);
        let (next, out) = coupled_step_at(&pair, &m, 1, &z).unwrap();
        assert_eq!(out.kind, OutcomeKind::NearMove);
        let s = out.s.unwrap();
        assert!((s - 1.0).abs() < 1e-12);
        let bound = 1.0 + m.eval(s).unwrap() - m.eval(2.0).unwrap();
        assert!((out.delta_bound - bound).abs() < 1e-15);
        assert!(out.delta_exact <= out.delta_bound + 1e-12);
        let Successor::Split { x, y, .. } = next else {
            panic!("near move must split");
        };
        assert_eq!(x.center(0), z);
        assert_eq!(y.center(0), pair.y().center(0));
        let dp = DisagreementPair::new(x, y).unwrap();
        assert!((dp.distance(&m) - m.eval(2.0).unwrap() - out.delta_exact).abs() < 1e-12);
    }

    #[test]
    fn far_move_charges_one() {
        let pair = staged(1.0);
        // s = 1.5 ≥ ℓ = 1, inside Z(y₀) only
        let z = TorusPoint::new(0.5 + 2.5 * 0.02, 0.5);
        assert_eq!(pair.region(1, &z), Region::Crescent);
        let out = pair.outcome(&linear_metric(), 1, &z).unwrap();
        assert_eq!(out.kind, OutcomeKind::FarMove);
        assert_eq!(out.delta_bound, 1.0);
        assert!(out.delta_exact <= 1.0 + 1e-12);
    }

    #[test]
    fn reflected_proposal_lands_in_the_mirror_region() {
        let pair = staged(1.5);
        let mut rng = seeded_rng(5);
        let mut hits = 0;
        for _ in 0..20_000 {
            let z: TorusPoint<f64> = uniform_point(&mut rng);
            if pair.region(1, &z) == Region::Crescent {
                let zb = pair.y_proposal(1, &z).unwrap();
                assert_eq!(pair.region(1, &zb), Region::Mirror);
                hits += 1;
            }
        }
        assert!(hits > 0);
    }

    #[test]
    fn exact_never_exceeds_bound() {
        let m = linear_metric();
        let mut rng = seeded_rng(9);
        for _ in 0..50 {
            let pair = make_pair::<f64, _>(16, 0.12, 1.7, 1, &mut rng).unwrap();
            for _ in 0..200 {
                let (_, out) = pair.step(&m, &mut rng).unwrap();
                assert!(out.delta_exact <= out.delta_bound + 1e-12, "{out:?}");
            }
        }
    }

    #[test]
    fn estimate_is_deterministic_and_counts_sum() {
        let m = linear_metric();
        let a = estimate_contraction(16, 0.1, 1.0, &m, 3000, 4).unwrap();
        let b = estimate_contraction(16, 0.1, 1.0, &m, 3000, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.outcome_counts.values().sum::<u64>(), 3000);
        assert!(a.mean_delta_exact <= a.mean_delta_bound);
    }

    #[test]
    fn rejects_bad_ell() {
        let mut rng = seeded_rng(0);
        assert!(make_pair::<f64, _>(8, 0.1, 0.0, 0, &mut rng).is_err());
        assert!(make_pair::<f64, _>(8, 0.1, 4.5, 0, &mut rng).is_err());
    }
}
