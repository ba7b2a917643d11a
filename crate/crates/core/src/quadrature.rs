//! Gauss–Legendre rules, plain and composite.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let mut x = vec![0.0; order];
    let mut w = vec![0.0; order];
    let m = order.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(order, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(order, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[order - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[order - 1 - i] = wi;
    }
    (x, w)
}

/// `P_n(z)` and `P_n'(z)` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// A composite rule: one Gauss–Legendre block per panel.
#[derive(Clone, Debug, Default)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Gauss–Legendre of `order` on each `[b_i, b_{i+1}]`, each panel split
    /// into `subdivisions` equal pieces. Empty panels are skipped.
    pub fn composite(breaks: &[f64], order: usize, subdivisions: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let mut rule = Rule::default();
        for pair in breaks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b <= a {
                continue;
            }
            let h = (b - a) / subdivisions as f64;
            for s in 0..subdivisions {
                let lo = a + s as f64 * h;
                let c = lo + h / 2.0;
                for (xi, wi) in x.iter().zip(&w) {
                    rule.nodes.push(c + xi * h / 2.0);
                    rule.weights.push(wi * h / 2.0);
                }
            }
        }
        rule
    }

    /// Panels whose edges grow geometrically from `a` to `b` (`0 < a < b`).
    pub fn geometric(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let ratio = (b / a).powf(1.0 / panels as f64);
        let mut breaks: Vec<f64> = (0..=panels).map(|i| a * ratio.powi(i as i32)).collect();
        breaks[panels] = b;
        Self::composite(&breaks, order, 1)
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Sorted, deduplicated breakpoints clipped to `[a, b]`, always containing both ends.
pub fn breakpoints(a: f64, b: f64, interior: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = interior.into_iter().filter(|&x| x > a && x < b).collect();
    v.push(a);
    v.push(b);
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    v.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * y.abs().max(1.0));
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        for order in 1..12 {
            let (x, w) = gauss_legendre(order);
            for deg in 0..(2 * order) {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "order {order} deg {deg}");
            }
        }
    }

    #[test]
    fn composite_integrates_smooth_function() {
        let r = Rule::composite(&[0.0, 1.0, 3.0], 8, 4);
        let v = r.integrate(|x| x.sin());
        assert!((v - (1.0 - 3f64.cos())).abs() < 1e-14);
        let g = Rule::geometric(1.0, 100.0, 10, 8);
        assert!((g.integrate(|x| 1.0 / x) - 100f64.ln()).abs() < 1e-12);
    }
}
