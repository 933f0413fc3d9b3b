use std::hash::{DefaultHasher, Hash, Hasher};

use crate::error::{ensure, Error, Result};
use crate::quadrature::{composite, Neumaier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridScheme {
    CompositeGaussLegendre,
    Uniform,
    /// Gauss–Legendre panels on caller-supplied breakpoints.
    Panels,
}

/// Quadrature nodes and weights for `∫_0^{R_max} · dr`, origin excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    r_max: f64,
    scheme: GridScheme,
    id: u64,
}

/// Largest Gauss–Legendre panel order in 2..=16 dividing `q`.
fn panel_order(q: usize) -> Option<usize> {
    (2..=16).rev().find(|p| q % p == 0)
}

impl RadialGrid {
    fn from_parts(nodes: Vec<f64>, weights: Vec<f64>, r_max: f64, scheme: GridScheme) -> Self {
        let mut h = DefaultHasher::new();
        for (x, w) in nodes.iter().zip(&weights) {
            x.to_bits().hash(&mut h);
            w.to_bits().hash(&mut h);
        }
        r_max.to_bits().hash(&mut h);
        Self { nodes, weights, r_max, scheme, id: h.finish() }
    }

    /// Composite Gauss–Legendre with the given panel breakpoints.
    pub fn from_panels(edges: &[f64], order: usize) -> Result<Self> {
        ensure!(edges.len() >= 2, Domain, "need at least one panel");
        ensure!(edges[0] >= 0.0, Domain, "panels must start at r >= 0");
        ensure!(edges.windows(2).all(|p| p[0] < p[1]), Domain, "panel edges must increase strictly");
        ensure!((2..=64).contains(&order), Domain, "panel order must lie in 2..=64, got {order}");
        let (nodes, weights) = composite(edges, order);
        ensure!(nodes.len() >= 64, Domain, "grid needs at least 64 nodes, got {}", nodes.len());
        Ok(Self::from_parts(nodes, weights, *edges.last().unwrap(), GridScheme::Panels))
    }

    /// Panels whose width grows geometrically from `h0` near the origin
    /// until it reaches `h_max`, then stays constant up to `r_max`.
    pub fn graded(r_max: f64, h0: f64, h_max: f64, order: usize) -> Result<Self> {
        ensure!(h0 > 0.0 && h_max >= h0 && r_max > h0, Domain, "invalid graded grid parameters");
        let mut edges = vec![0.0];
        let mut h = h0;
        while *edges.last().unwrap() < r_max {
            let next = (edges.last().unwrap() + h).min(r_max);
            edges.push(next);
            h = (1.5 * h).min(h_max);
        }
        let n = edges.len();
        if n > 2 && edges[n - 1] - edges[n - 2] < 0.25 * h_max {
            edges.remove(n - 2);
        }
        Self::from_panels(&edges, order)
    }

    /// Panels aligned with the dyadic points `2^m`: one panel on
    /// `[0, 2^{m_min}]`, then `per_octave` equal panels on every octave up to
    /// `2^{m_max}`. Every band `[2^{m-1}, 2^m]` is then integrated without a
    /// cut inside a panel, and the nodes of one band are the nodes of the
    /// next scaled by two.
    pub fn dyadic(m_min: i32, m_max: i32, per_octave: usize, order: usize) -> Result<Self> {
        ensure!(m_max > m_min && per_octave >= 1, Domain, "invalid dyadic grid parameters");
        let mut edges = vec![0.0];
        for m in m_min..m_max {
            let lo = 2f64.powi(m);
            for p in 0..per_octave {
                edges.push(lo * (1.0 + p as f64 / per_octave as f64));
            }
        }
        edges.push(2f64.powi(m_max));
        Self::from_panels(&edges, order)
    }

    /// Load a grid written by [`RadialGrid::to_csv`].
    pub fn from_csv(text: &str, r_max: f64) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            let mut parts = line.split(',');
            let parse = |p: Option<&str>| -> Result<f64> {
                p.and_then(|v| v.trim().parse().ok())
                    .ok_or_else(|| Error::InvalidConfig(format!("grid csv line {}: malformed", i + 1)))
            };
            nodes.push(parse(parts.next())?);
            weights.push(parse(parts.next())?);
        }
        ensure!(nodes.len() >= 64, Domain, "grid needs at least 64 nodes");
        ensure!(nodes[0] > 0.0 && nodes.windows(2).all(|p| p[0] < p[1]), Domain, "nodes must be positive and increasing");
        ensure!(*nodes.last().unwrap() <= r_max, Domain, "nodes exceed r_max");
        Ok(Self::from_parts(nodes, weights, r_max, GridScheme::Panels))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("node,weight\n");
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s.push_str(&format!("{x:e},{w:e}\n"));
        }
        s
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn scheme(&self) -> GridScheme {
        self.scheme
    }

    /// Identifies the grid; equal ids mean identical nodes and weights.
    pub fn id(&self) -> u64 {
        self.id
    }

    /// Spacing of a uniform grid.
    pub fn spacing(&self) -> Option<f64> {
        (self.scheme == GridScheme::Uniform).then(|| self.r_max / self.nodes.len() as f64)
    }

    /// `∫ f(r) dr` over the grid.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mut acc = Neumaier::default();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(*x));
        }
        acc.sum()
    }

    /// Weights of the radial measure `r^{n-1} dr`.
    pub fn measure(&self, n: usize) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(r, w)| w * r.powi(n as i32 - 1))
            .collect()
    }
}

/// A grid on `(0, r_max]` with `q` nodes.
///
/// ```
/// use invsq::hankel::{make_grid, GridScheme};
/// let g = make_grid(10.0, 512, GridScheme::CompositeGaussLegendre).unwrap();
/// let v = g.integrate(|r| r * r);
/// assert!((v - 1000.0 / 3.0).abs() < 1e-12 * v);
/// ```
pub fn make_grid(r_max: f64, q: usize, scheme: GridScheme) -> Result<RadialGrid> {
    ensure!(r_max > 0.0 && r_max.is_finite(), Domain, "R_max must be positive, got {r_max}");
    ensure!(q >= 64, Domain, "grid needs at least 64 nodes, got {q}");
    match scheme {
        GridScheme::Uniform => {
            let h = r_max / q as f64;
            let nodes = (0..q).map(|i| (i as f64 + 0.5) * h).collect();
            Ok(RadialGrid::from_parts(nodes, vec![h; q], r_max, scheme))
        }
        GridScheme::CompositeGaussLegendre => {
            let order = panel_order(q)
                .ok_or_else(|| Error::Domain(format!("Q = {q} has no panel order between 2 and 16")))?;
            let panels = q / order;
            let edges: Vec<f64> = (0..=panels).map(|i| r_max * i as f64 / panels as f64).collect();
            let (nodes, weights) = composite(&edges, order);
            Ok(RadialGrid::from_parts(nodes, weights, r_max, scheme))
        }
        GridScheme::Panels => Err(Error::Domain("use RadialGrid::from_panels for custom panels".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_midpoints() {
        let g = make_grid(1.0, 64, GridScheme::Uniform).unwrap();
        for (i, (x, w)) in g.nodes().iter().zip(g.weights()).enumerate() {
            assert!((x - (i as f64 + 0.5) / 64.0).abs() < 1e-15);
            assert_eq!(*w, 1.0 / 64.0);
        }
    }

    #[test]
    fn gauss_legendre_exactness() {
        let g = make_grid(10.0, 512, GridScheme::CompositeGaussLegendre).unwrap();
        assert!((g.integrate(|r| r * r) - 1000.0 / 3.0).abs() < 1e-12 * 1000.0 / 3.0);
        let erf_half = std::f64::consts::PI.sqrt() / 2.0;
        assert!((g.integrate(|r| (-r * r).exp()) - erf_half).abs() < 1e-10);
        assert!((g.weights().iter().sum::<f64>() - 10.0).abs() < 1e-12 * 10.0);
        assert!(g.nodes()[0] > 0.0 && *g.nodes().last().unwrap() <= 10.0);
    }

    #[test]
    fn csv_round_trip() {
        let g = make_grid(3.0, 96, GridScheme::CompositeGaussLegendre).unwrap();
        let back = RadialGrid::from_csv(&g.to_csv(), 3.0).unwrap();
        for (a, b) in g.nodes().iter().zip(back.nodes()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn graded_grid_covers_range() {
        let g = RadialGrid::graded(16.0, 1e-3, 0.25, 16).unwrap();
        assert!((g.weights().iter().sum::<f64>() - 16.0).abs() < 1e-12);
        assert!(g.nodes()[0] < 1e-3);
    }

    #[test]
    fn too_few_nodes() {
        assert!(make_grid(1.0, 32, GridScheme::Uniform).is_err());
    }
}
