//! Gauss-Legendre quadrature with node caching and an adaptive driver for
//! smooth oscillatory integrands.
//!
//! Node/weight pairs are computed once per degree by Newton iteration on the
//! Legendre polynomial recurrence and kept in a process-wide cache, so the
//! sweep can hammer the integrator from many threads without recomputing
//! tables.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Controls for the adaptive oscillatory quadrature of the defocused OTF
/// integral.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureSpec {
    /// Minimum node count for any integral.
    pub base_nodes: usize,
    /// Nodes allotted to each full period of the oscillatory factor.
    pub nodes_per_oscillation: usize,
    /// Absolute tolerance for the doubling convergence test.
    pub absolute_tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            base_nodes: 32,
            nodes_per_oscillation: 16,
            absolute_tolerance: 1e-9,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.base_nodes < 16 {
            return Err(Error::Domain("base_nodes must be at least 16".into()));
        }
        if self.nodes_per_oscillation < 8 {
            return Err(Error::Domain(
                "nodes_per_oscillation must be at least 8".into(),
            ));
        }
        if !(self.absolute_tolerance > 0.0) {
            return Err(Error::Domain("absolute_tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on P_n; O(n) per root.
    fn compute(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi-style initial guess for the i-th positive root.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Legendre recurrence for P_n(x) and P'_n(x).
                let mut p0 = 1.0;
                let mut p1 = x;
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Integrates `f` over [a, b] with this rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        half * sum
    }
}

fn table_cache() -> &'static Mutex<HashMap<usize, Arc<GaussLegendre>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Returns the cached n-point rule, computing it on first use.
pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    let mut cache = table_cache().lock().unwrap();
    cache
        .entry(n)
        .or_insert_with(|| Arc::new(GaussLegendre::compute(n)))
        .clone()
}

/// Maximum node count the adaptive driver will attempt.
const NODE_BUDGET: usize = 1 << 21;

/// Integrates a smooth integrand over [a, b], starting from `initial_nodes`
/// and doubling until two successive estimates differ by less than
/// `spec.absolute_tolerance`.
pub fn integrate_adaptive<F>(spec: &QuadratureSpec, initial_nodes: usize, a: f64, b: f64, f: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut n = initial_nodes.max(spec.base_nodes);
    let mut prev = gauss_legendre(n).integrate(a, b, &f);
    loop {
        n *= 2;
        if n > NODE_BUDGET {
            return Err(Error::QuadratureNonConvergence(format!(
                "node budget {NODE_BUDGET} exceeded on [{a}, {b}]"
            )));
        }
        let next = gauss_legendre(n).integrate(a, b, &f);
        if (next - prev).abs() < spec.absolute_tolerance {
            return Ok(next);
        }
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn low_order_rules_are_exact_for_polynomials() {
        // n-point Gauss-Legendre is exact through degree 2n-1.
        let rule = gauss_legendre(3);
        let int = rule.integrate(0.0, 1.0, |x| x.powi(5));
        assert_abs_diff_eq!(int, 1.0 / 6.0, epsilon = 1e-14);
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [4, 17, 64, 129] {
            let rule = gauss_legendre(n);
            let total: f64 = rule.weights.iter().sum();
            assert_abs_diff_eq!(total, 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn adaptive_matches_known_integral() {
        let spec = QuadratureSpec::default();
        let v = integrate_adaptive(&spec, 32, 0.0, 1.0, |x| (1.0 - x * x).sqrt()).unwrap();
        assert_abs_diff_eq!(v, std::f64::consts::PI / 4.0, epsilon = 1e-9);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let spec = QuadratureSpec::default();
        let omega = 120.0;
        let v = integrate_adaptive(&spec, 256, 0.0, 1.0, |x| (omega * x).cos()).unwrap();
        assert_abs_diff_eq!(v, (omega).sin() / omega, epsilon = 1e-9);
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::default().validate().is_ok());
        let bad = QuadratureSpec {
            base_nodes: 8,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
