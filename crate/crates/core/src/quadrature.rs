//! Gauss–Legendre rules, composite panels and compensated sums.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

/// Nodes and weights of the `order`-point Gauss–Legendre rule on [-1, 1],
/// sorted by node. Rules are cached process-wide.
pub fn gauss_legendre(order: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&order) {
        return Arc::clone(rule);
    }
    let mut pairs = GaussLegendre::new(order.max(2))
        .expect("order >= 2")
        .into_node_weight_pairs();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let rule = Arc::new(pairs.into_iter().unzip());
    cache.lock().unwrap().insert(order, Arc::clone(&rule));
    rule
}

/// Composite Gauss–Legendre rule with `order` points on each panel
/// `[edges[i], edges[i+1]]`.
pub fn composite(edges: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = gauss_legendre(order);
    let (x, w) = (&rule.0, &rule.1);
    let panels = edges.len().saturating_sub(1);
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for pair in edges.windows(2) {
        let half = 0.5 * (pair[1] - pair[0]);
        let mid = 0.5 * (pair[1] + pair[0]);
        for (xi, wi) in x.iter().zip(w) {
            nodes.push(mid + half * xi);
            weights.push(half * wi);
        }
    }
    (nodes, weights)
}

/// `panels` equal panels on [a, b].
pub fn composite_uniform(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let panels = panels.max(1);
    let edges: Vec<f64> = (0..=panels)
        .map(|i| a + (b - a) * i as f64 / panels as f64)
        .collect();
    composite(&edges, order)
}

/// Integrate `f` over [a, b] with panels short enough to resolve oscillations
/// of wavelength `period`.
pub fn integrate_oscillatory<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, period: f64) -> f64 {
    let panels = ((b - a) / (0.5 * period)).ceil().max(1.0) as usize;
    let (x, w) = composite_uniform(a, b, panels, 16);
    let mut acc = Neumaier::default();
    for (xi, wi) in x.iter().zip(&w) {
        acc.add(wi * f(*xi));
    }
    acc.sum()
}

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated complex accumulator (componentwise Neumaier).
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexSum {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn sum(&self) -> Complex64 {
        Complex64::new(self.re.sum(), self.im.sum())
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = Neumaier::default();
    values.into_iter().for_each(|v| acc.add(v));
    acc.sum()
}
