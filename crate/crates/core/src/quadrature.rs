//! Fixed-order Gauss–Legendre rules.

use crate::{Error, Real, Result};

/// An `order`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Builds the rule by Newton iteration on `P_order` (in `f64`, then cast).
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::domain("quadrature order", format!("{order} < 2")));
        }
        let n = order as f64;
        let mut nodes = vec![T::zero(); order];
        let mut weights = vec![T::zero(); order];
        for i in 0..order.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = T::lit(-x);
            nodes[order - 1 - i] = T::lit(x);
            weights[i] = T::lit(w);
            weights[order - 1 - i] = T::lit(w);
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `∫_a^b f(x) dx`; returns zero for an empty or reversed interval.
    pub fn integrate<F: Fn(T) -> T>(&self, a: T, b: T, f: F) -> T {
        if !(b > a) {
            return T::zero();
        }
        let half = T::lit(0.5);
        let mid = (a + b) * half;
        let rad = (b - a) * half;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + rad * x))
            .fold(T::zero(), |acc, v| acc + v)
            * rad
    }

    /// Integrates over `[a, b]` after splitting at every breakpoint inside it.
    pub fn integrate_split<F: Fn(T) -> T>(&self, a: T, b: T, breaks: &[T], f: F) -> T {
        if !(b > a) {
            return T::zero();
        }
        let mut cuts: Vec<T> = breaks.iter().copied().filter(|&c| c > a && c < b).collect();
        cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
        let mut lo = a;
        let mut total = T::zero();
        for hi in cuts.into_iter().chain(std::iter::once(b)) {
            total = total + self.integrate(lo, hi, &f);
            lo = hi;
        }
        total
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_two_and_nodes_are_symmetric() {
        for order in [2, 3, 5, 16, 32] {
            let rule = GaussLegendre::<f64>::new(order).unwrap();
            let s: f64 = rule.weights().iter().sum();
            assert_relative_eq!(s, 2.0, max_relative = 1e-13);
            for (a, b) in rule.nodes().iter().zip(rule.nodes().iter().rev()) {
                assert_relative_eq!(*a, -*b, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = GaussLegendre::<f64>::new(5).unwrap();
        for deg in 0..10 {
            let got = rule.integrate(0.0, 2.0, |x| x.powi(deg));
            let want = 2f64.powi(deg + 1) / f64::from(deg + 1);
            assert_relative_eq!(got, want, max_relative = 1e-13);
        }
    }

    #[test]
    fn split_integration_restores_accuracy_at_kinks() {
        let rule = GaussLegendre::<f64>::new(8).unwrap();
        let f = |x: f64| (x - 0.3).abs();
        let exact = 0.5 * 0.3 * 0.3 + 0.5 * 0.7 * 0.7;
        let split = rule.integrate_split(0.0, 1.0, &[0.3], f);
        assert_relative_eq!(split, exact, max_relative = 1e-14);
        let plain = rule.integrate(0.0, 1.0, f);
        assert!((plain - exact).abs() > 1e-6);
    }

    #[test]
    fn rejects_tiny_orders() {
        assert!(GaussLegendre::<f64>::new(1).is_err());
    }
}
