//! Dense phase-1 simplex for deciding feasibility of small linear systems.
//!
//! Variables are nonnegative. Pivoting follows Bland's rule, so the method
//! terminates on degenerate problems.

use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    LessEq,
    GreaterEq,
    Equal,
}

#[derive(Debug, Clone)]
struct Row<T> {
    coeffs: Vec<(usize, T)>,
    relation: Relation,
    rhs: T,
}

/// Feasibility problem `{x ≥ 0 : A x (≤ | ≥ | =) b}`.
#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    vars: usize,
    rows: Vec<Row<T>>,
}

/// Outcome of phase 1.
#[derive(Debug, Clone)]
pub struct PhaseOne<T> {
    pub feasible: bool,
    /// Minimal sum of artificial variables.
    pub infeasibility: T,
    /// A feasible point when one exists.
    pub point: Option<Vec<T>>,
    pub pivots: usize,
}

impl<T: Real> LinearProgram<T> {
    pub fn new(vars: usize) -> Self {
        Self {
            vars,
            rows: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    /// Adds `Σ coeffs · x  relation  rhs` (sparse coefficients).
    pub fn constrain(&mut self, coeffs: Vec<(usize, T)>, relation: Relation, rhs: T) {
        debug_assert!(coeffs.iter().all(|&(j, _)| j < self.vars));
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn is_feasible(&self) -> bool {
        self.phase_one().feasible
    }

    pub fn phase_one(&self) -> PhaseOne<T> {
        let m = self.rows.len();
        let n = self.vars;
        if m == 0 {
            return PhaseOne {
                feasible: true,
                infeasibility: T::zero(),
                point: Some(vec![T::zero(); n]),
                pivots: 0,
            };
        }

        // Normalize to b ≥ 0, then count auxiliary columns.
        let rows: Vec<Row<T>> = self
            .rows
            .iter()
            .map(|row| {
                if row.rhs < T::zero() {
                    Row {
                        coeffs: row.coeffs.iter().map(|&(j, a)| (j, -a)).collect(),
                        relation: match row.relation {
                            Relation::LessEq => Relation::GreaterEq,
                            Relation::GreaterEq => Relation::LessEq,
                            Relation::Equal => Relation::Equal,
                        },
                        rhs: -row.rhs,
                    }
                } else {
                    row.clone()
                }
            })
            .collect();
        let slack_count = rows.iter().filter(|r| r.relation != Relation::Equal).count();
        let art_count = rows.iter().filter(|r| r.relation != Relation::LessEq).count();
        let art_start = n + slack_count;
        let cols = art_start + art_count;

        // Tableau rows hold [coefficients | rhs]; the last row is the phase-1 cost.
        let width = cols + 1;
        let mut tab = vec![T::zero(); (m + 1) * width];
        let mut basis = vec![0usize; m];
        let (mut next_slack, mut next_art) = (n, art_start);
        for (i, row) in rows.iter().enumerate() {
            let base = i * width;
            for &(j, a) in &row.coeffs {
                tab[base + j] = tab[base + j] + a;
            }
            tab[base + cols] = row.rhs;
            match row.relation {
                Relation::LessEq => {
                    tab[base + next_slack] = T::one();
                    basis[i] = next_slack;
                    next_slack += 1;
                }
                Relation::GreaterEq => {
                    tab[base + next_slack] = -T::one();
                    next_slack += 1;
                    tab[base + next_art] = T::one();
                    basis[i] = next_art;
                    next_art += 1;
                }
                Relation::Equal => {
                    tab[base + next_art] = T::one();
                    basis[i] = next_art;
                    next_art += 1;
                }
            }
        }
        // Cost row: minimize Σ artificials, expressed in nonbasic variables.
        let cost = m * width;
        for i in 0..m {
            if basis[i] >= art_start {
                for c in 0..width {
                    if c < art_start || c == cols {
                        tab[cost + c] = tab[cost + c] - tab[i * width + c];
                    }
                }
            }
        }

        let scale = rows
            .iter()
            .flat_map(|r| r.coeffs.iter().map(|&(_, a)| a.abs()).chain(std::iter::once(r.rhs)))
            .fold(T::one(), T::max);
        let tol = T::epsilon() * T::lit(1e3) * scale;
        let mut pivots = 0usize;
        // Bland: lowest-index column with negative reduced cost.
        while let Some(enter) = (0..cols).find(|&c| tab[cost + c] < -tol) {
            let mut leave: Option<(usize, T)> = None;
            for i in 0..m {
                let a = tab[i * width + enter];
                if a > tol {
                    let ratio = tab[i * width + cols] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            if ratio < best - tol || (ratio <= best + tol && basis[i] < basis[k]) {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            // Phase 1 is bounded below by zero, so an entering column always has a pivot row.
            let Some((p, _)) = leave else { break };
            pivot(&mut tab, width, m + 1, p, enter);
            basis[p] = enter;
            pivots += 1;
        }

        let infeasibility = -tab[cost + cols];
        let feasible = infeasibility <= tol * T::lit(m as f64);
        let point = feasible.then(|| {
            let mut x = vec![T::zero(); n];
            for (i, &b) in basis.iter().enumerate() {
                if b < n {
                    x[b] = tab[i * width + cols].max(T::zero());
                }
            }
            x
        });
        PhaseOne {
            feasible,
            infeasibility: infeasibility.max(T::zero()),
            point,
            pivots,
        }
    }
}

fn pivot<T: Real>(tab: &mut [T], width: usize, rows: usize, p: usize, q: usize) {
    let inv = T::one() / tab[p * width + q];
    for c in 0..width {
        tab[p * width + c] = tab[p * width + c] * inv;
    }
    tab[p * width + q] = T::one();
    let (before, rest) = tab.split_at_mut(p * width);
    let (prow, after) = rest.split_at_mut(width);
    let eliminate = |row: &mut [T]| {
        let f = row[q];
        if f != T::zero() {
            for (v, &pv) in row.iter_mut().zip(prow.iter()) {
                *v = *v - f * pv;
            }
            row[q] = T::zero();
        }
    };
    for row in before.chunks_mut(width) {
        eliminate(row);
    }
    for row in after.chunks_mut(width).take(rows - p - 1) {
        eliminate(row);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_feasible_box() {
        // x + y ≥ 1, x ≤ 0.7, y ≤ 0.7
        let mut lp = LinearProgram::<f64>::new(2);
        lp.constrain(vec![(0, 1.0), (1, 1.0)], Relation::GreaterEq, 1.0);
        lp.constrain(vec![(0, 1.0)], Relation::LessEq, 0.7);
        lp.constrain(vec![(1, 1.0)], Relation::LessEq, 0.7);
        let out = lp.phase_one();
        assert!(out.feasible);
        let x = out.point.unwrap();
        assert!(x[0] + x[1] >= 1.0 - 1e-12 && x[0] <= 0.7 + 1e-12 && x[1] <= 0.7 + 1e-12);
    }

    #[test]
    fn simple_infeasible_box() {
        let mut lp = LinearProgram::<f64>::new(2);
        lp.constrain(vec![(0, 1.0), (1, 1.0)], Relation::GreaterEq, 1.5);
        lp.constrain(vec![(0, 1.0)], Relation::LessEq, 0.7);
        lp.constrain(vec![(1, 1.0)], Relation::LessEq, 0.7);
        assert!(!lp.is_feasible());
    }

    #[test]
    fn equality_and_negative_rhs() {
        // x − y = −0.5, x + y ≤ 1 → x = 0.25, y = 0.75 is feasible
        let mut lp = LinearProgram::<f64>::new(2);
        lp.constrain(vec![(0, 1.0), (1, -1.0)], Relation::Equal, -0.5);
        lp.constrain(vec![(0, 1.0), (1, 1.0)], Relation::LessEq, 1.0);
        assert!(lp.is_feasible());
        lp.constrain(vec![(1, 1.0)], Relation::LessEq, 0.4);
        assert!(!lp.is_feasible());
    }

    #[test]
    fn degenerate_problem_terminates() {
        // many redundant constraints through the origin
        let mut lp = LinearProgram::<f64>::new(3);
        for k in 0..10 {
            let a = 1.0 + k as f64;
            lp.constrain(vec![(0, a), (1, -1.0), (2, 1.0)], Relation::GreaterEq, 0.0);
            lp.constrain(vec![(0, 1.0), (1, a), (2, -1.0)], Relation::LessEq, 0.0);
        }
        lp.constrain(vec![(0, 1.0), (1, 1.0), (2, 1.0)], Relation::GreaterEq, 1.0);
        let out = lp.phase_one();
        if let Some(x) = out.point {
            assert!(x.iter().sum::<f64>() >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn no_constraints_is_feasible() {
        assert!(LinearProgram::<f32>::new(4).is_feasible());
    }
}
