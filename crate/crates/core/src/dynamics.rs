//! Hard-disk configurations and the single-disk global-move chain.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::format::fmt_sig;
use crate::geometry::{torus_dist_sq, TorusPoint};
use crate::{Error, Real, Result};

/// Seedable generator shared by every experiment.
pub type ExperimentRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> ExperimentRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator for sub-experiment `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ExperimentRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Disk radius giving density `rho` for `n` disks: `√(ρ / (π n))`.
pub fn radius_for_density(n: usize, rho: f64) -> f64 {
    (rho / (std::f64::consts::PI * n as f64)).sqrt()
}

#[inline]
pub(crate) fn uniform_point<T: Real, R: Rng + ?Sized>(rng: &mut R) -> TorusPoint<T> {
    let x: f64 = rng.random();
    let y: f64 = rng.random();
    TorusPoint::new(T::lit(x), T::lit(y))
}

/// Bucket grid over the torus with cell side at least `2r`.
#[derive(Debug, Clone)]
struct SpatialGrid {
    side: usize,
    cells: Vec<Vec<usize>>,
}

impl SpatialGrid {
    /// Empty grid sized for `n` disks of radius `r`.
    fn empty<T: Real>(r: T, n: usize) -> Self {
        let fit = (T::one() / (T::lit(2.0) * r)).floor().to_f64_lossy();
        let fit = if fit.is_finite() { fit as usize } else { usize::MAX };
        let cap = (2.0 * (n as f64).sqrt()).ceil() as usize;
        let side = fit.min(cap.max(3)).max(3);
        Self {
            side,
            cells: vec![Vec::new(); side * side],
        }
    }

    fn new<T: Real>(r: T, centers: &[TorusPoint<T>]) -> Self {
        let mut grid = Self::empty(r, centers.len());
        for (i, c) in centers.iter().enumerate() {
            grid.insert(i, c);
        }
        grid
    }

    #[inline]
    fn coord<T: Real>(&self, v: T) -> usize {
        let k = (v * T::lit(self.side as f64)).to_f64_lossy() as usize;
        k.min(self.side - 1)
    }

    #[inline]
    fn cell_of<T: Real>(&self, p: &TorusPoint<T>) -> usize {
        self.coord(p.y()) * self.side + self.coord(p.x())
    }

    fn insert<T: Real>(&mut self, i: usize, p: &TorusPoint<T>) {
        let c = self.cell_of(p);
        self.cells[c].push(i);
    }

    fn remove<T: Real>(&mut self, i: usize, p: &TorusPoint<T>) {
        let c = self.cell_of(p);
        let cell = &mut self.cells[c];
        if let Some(k) = cell.iter().position(|&j| j == i) {
            cell.swap_remove(k);
        }
    }

    /// Indices in the 3×3 block of cells around `p`.
    fn neighbors<'a, T: Real>(&'a self, p: &TorusPoint<T>) -> impl Iterator<Item = usize> + 'a {
        let s = self.side;
        let cx = self.coord(p.x());
        let cy = self.coord(p.y());
        (0..3).flat_map(move |dy| {
            (0..3).flat_map(move |dx| {
                let x = (cx + s + dx - 1) % s;
                let y = (cy + s + dy - 1) % s;
                self.cells[y * s + x].iter().copied()
            })
        })
    }
}

/// `n` disk centres of radius `r` on the unit torus, pairwise at least `2r` apart.
#[derive(Debug, Clone)]
pub struct Configuration<T> {
    r: T,
    centers: Vec<TorusPoint<T>>,
    grid: SpatialGrid,
}

impl<T: Real> Configuration<T> {
    /// Validates the radius bound `8r < 1/2`, density `< 1/4`, and the
    /// hard-core constraint.
    pub fn new(centers: Vec<TorusPoint<T>>, r: T) -> Result<Self> {
        Self::check_parameters(centers.len(), r)?;
        let config = Self {
            grid: SpatialGrid::new(r, &centers),
            r,
            centers,
        };
        config.audit()?;
        Ok(config)
    }

    fn check_parameters(n: usize, r: T) -> Result<()> {
        if n == 0 {
            return Err(Error::domain("n", "need at least one disk"));
        }
        if !(r > T::zero() && T::lit(8.0) * r < T::lit(0.5)) {
            return Err(Error::domain("radius", format!("{r} violates 0 < 8r < 1/2")));
        }
        let rho = T::lit(n as f64) * T::PI() * r * r;
        if rho >= T::lit(0.25) {
            return Err(Error::domain("density", format!("{rho} >= 1/4")));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.centers.len()
    }

    pub fn r(&self) -> T {
        self.r
    }

    /// Density `n π r²`.
    pub fn rho(&self) -> T {
        T::lit(self.n() as f64) * T::PI() * self.r * self.r
    }

    pub fn centers(&self) -> &[TorusPoint<T>] {
        &self.centers
    }

    pub fn center(&self, i: usize) -> TorusPoint<T> {
        self.centers[i]
    }

    #[inline]
    fn exclusion_sq(&self) -> T {
        let d = T::lit(2.0) * self.r;
        d * d
    }

    /// Whether `z` lies within `2r` of a centre not listed in `exclude`.
    pub fn blocked(&self, z: &TorusPoint<T>, exclude: &[usize]) -> bool {
        let limit = self.exclusion_sq();
        self.grid
            .neighbors(z)
            .any(|k| !exclude.contains(&k) && torus_dist_sq(z, &self.centers[k]) < limit)
    }

    /// Same decision as [`blocked`](Self::blocked) by scanning every disk.
    pub fn blocked_brute(&self, z: &TorusPoint<T>, exclude: &[usize]) -> bool {
        let limit = self.exclusion_sq();
        self.centers
            .iter()
            .enumerate()
            .any(|(k, c)| !exclude.contains(&k) && torus_dist_sq(z, c) < limit)
    }

    /// Full pairwise check of the hard-core constraint.
    pub fn audit(&self) -> Result<()> {
        let limit = self.exclusion_sq();
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                if torus_dist_sq(&self.centers[i], &self.centers[j]) < limit {
                    return Err(Error::Overlap(format!("disks {i} and {j} overlap")));
                }
            }
        }
        Ok(())
    }

    /// Moves disk `i` without any validity check.
    pub(crate) fn place(&mut self, i: usize, p: TorusPoint<T>) {
        let old = self.centers[i];
        self.grid.remove(i, &old);
        self.grid.insert(i, &p);
        self.centers[i] = p;
    }

    /// Uniform disk index and uniform torus position.
    pub fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, TorusPoint<T>) {
        let j = rng.random_range(0..self.n());
        (j, uniform_point(rng))
    }

    /// One step of the chain; returns whether the move was accepted.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        let (j, z) = self.propose(rng);
        if self.blocked(&z, &[j]) {
            false
        } else {
            self.place(j, z);
            true
        }
    }

    /// [`step`](Self::step) that also cross-checks the grid against a brute-force scan.
    pub fn step_audited<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<bool> {
        let (j, z) = self.propose(rng);
        let fast = self.blocked(&z, &[j]);
        let slow = self.blocked_brute(&z, &[j]);
        if fast != slow {
            return Err(Error::Overlap(format!(
                "grid and brute-force checks disagree for disk {j} at ({}, {})",
                z.x(),
                z.y()
            )));
        }
        if !fast {
            self.place(j, z);
        }
        Ok(!fast)
    }

    pub fn run_with<R: Rng + ?Sized>(&mut self, steps: u64, rng: &mut R) -> ChainStats {
        let mut stats = ChainStats::default();
        for _ in 0..steps {
            stats.record(self.step(rng));
        }
        stats
    }

    /// Writes `x,y` rows to `csv_path` and `{n, r, rho, seed}` to `json_path`.
    pub fn write_snapshot(&self, csv_path: &Path, json_path: &Path, seed: u64) -> Result<()> {
        let mut w = csv::Writer::from_path(csv_path)?;
        w.write_record(["x", "y"])?;
        for c in &self.centers {
            w.write_record([fmt_sig(c.x().to_f64_lossy()), fmt_sig(c.y().to_f64_lossy())])?;
        }
        w.flush()?;
        let meta = SnapshotMeta {
            n: self.n(),
            r: crate::format::round_sig(self.r.to_f64_lossy()),
            rho: crate::format::round_sig(self.rho().to_f64_lossy()),
            seed,
        };
        std::fs::write(json_path, serde_json::to_string_pretty(&meta)? + "\n")?;
        Ok(())
    }

    /// Reads a snapshot pair; the radius comes from the sidecar.
    pub fn read_snapshot(csv_path: &Path, json_path: &Path) -> Result<(Self, SnapshotMeta)> {
        let meta: SnapshotMeta = serde_json::from_str(&std::fs::read_to_string(json_path)?)?;
        let mut rdr = csv::Reader::from_path(csv_path)?;
        let mut centers = Vec::new();
        for row in rdr.deserialize() {
            let (x, y): (f64, f64) = row?;
            centers.push(TorusPoint::new(T::lit(x), T::lit(y)));
        }
        if centers.len() != meta.n {
            return Err(Error::Parse(format!(
                "snapshot has {} rows but sidecar says n = {}",
                centers.len(),
                meta.n
            )));
        }
        Ok((Self::new(centers, T::lit(meta.r))?, meta))
    }
}

/// Sidecar metadata of a configuration snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub n: usize,
    pub r: f64,
    pub rho: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ChainStats {
    pub steps: u64,
    pub accepted: u64,
    pub rejected: u64,
}

impl ChainStats {
    #[inline]
    pub fn record(&mut self, accepted: bool) {
        self.steps += 1;
        if accepted {
            self.accepted += 1;
        } else {
            self.rejected += 1;
        }
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.accepted as f64 / self.steps as f64
        }
    }
}

impl std::ops::AddAssign for ChainStats {
    fn add_assign(&mut self, rhs: Self) {
        self.steps += rhs.steps;
        self.accepted += rhs.accepted;
        self.rejected += rhs.rejected;
    }
}

/// Random configuration by sequential insertion with rejection.
pub fn random_config<T: Real>(n: usize, rho: f64, seed: u64) -> Result<Configuration<T>> {
    random_config_with(n, rho, &mut seeded_rng(seed))
}

const INSERT_ATTEMPTS: usize = 10_000;
const INSERT_RESTARTS: usize = 100;

pub fn random_config_with<T: Real, R: Rng + ?Sized>(
    n: usize,
    rho: f64,
    rng: &mut R,
) -> Result<Configuration<T>> {
    if !(rho > 0.0 && rho < 0.25) {
        return Err(Error::domain("rho", format!("{rho} not in (0, 1/4)")));
    }
    let r = T::lit(radius_for_density(n.max(1), rho));
    Configuration::<T>::check_parameters(n, r)?;
    'restart: for _ in 0..INSERT_RESTARTS {
        let mut config = Configuration {
            r,
            centers: Vec::with_capacity(n),
            grid: SpatialGrid::empty(r, n),
        };
        for i in 0..n {
            let mut placed = false;
            for _ in 0..INSERT_ATTEMPTS {
                let z = uniform_point(rng);
                if !config.blocked(&z, &[]) {
                    config.grid.insert(i, &z);
                    config.centers.push(z);
                    placed = true;
                    break;
                }
            }
            if !placed {
                continue 'restart;
            }
        }
        return Ok(config);
    }
    Err(Error::InsertionFailed {
        n,
        rho,
        attempts: INSERT_RESTARTS,
    })
}

/// Runs `steps` moves from `config` with a generator seeded by `seed`.
pub fn run<T: Real>(
    mut config: Configuration<T>,
    steps: u64,
    seed: u64,
) -> (Configuration<T>, ChainStats) {
    let stats = config.run_with(steps, &mut seeded_rng(seed));
    (config, stats)
}
