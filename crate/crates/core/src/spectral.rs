//! Chebyshev-Gauss-Lobatto grids and the discrete Chebyshev transform pair.
//!
//! The grid holds the CGL nodes `cos(hπ/N)`, the quadrature weights `w_h`
//! (π/2N at the endpoints, π/N inside) and the normalizers `γ_k` (π at the
//! first and last mode, π/2 inside). Together they define the forward
//! transform
//!
//! ```text
//! c_k = (1/γ_k) Σ_h f(z_h) T_k(z_h) w_h
//! ```
//!
//! and the inverse (evaluation of the expansion at the nodes), which are
//! exact inverses of each other on nodal data. Transforms are direct
//! O(N²) summations against a precomputed cosine table; all angle products
//! `k·h·π/N` are reduced modulo 2π so the matrix entries are exact cosines
//! of exact angles.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Float;

/// Chebyshev-Gauss-Lobatto grid of degree `N` (N+1 nodes).
#[derive(Debug, Clone)]
pub struct ChebGrid<T> {
    degree: usize,
    nodes: Vec<T>,
    quad_weights: Vec<T>,
    normalizers: Vec<T>,
    /// cos(jπ/N) for j = 0..2N; entry (k,h) of the transform matrix is
    /// `cos_table[(k*h) mod 2N]`.
    cos_table: Vec<T>,
}

impl<T: Float> ChebGrid<T> {
    /// Build the grid for polynomial degree `degree >= 2`.
    pub fn new(degree: usize) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidDegree(degree));
        }
        let n = degree;
        let pi = T::PI();
        let nf = T::from_f64_lit(n as f64);

        // Half table with enforced antisymmetry about π/2 so that
        // nodes come out exactly symmetric (and exactly 0 at the center
        // for even N).
        let mut half = vec![T::zero(); n + 1];
        for j in 0..=n {
            if 2 * j < n {
                half[j] = (T::from_f64_lit(j as f64) * pi / nf).cos();
            } else if 2 * j == n {
                half[j] = T::zero();
            } else {
                half[j] = -half[n - j];
            }
        }

        let nodes = half.clone();

        let mut cos_table = vec![T::zero(); 2 * n];
        for (j, entry) in cos_table.iter_mut().enumerate() {
            *entry = if j <= n { half[j] } else { half[2 * n - j] };
        }

        let w_end = pi / (T::from_f64_lit(2.0) * nf);
        let w_mid = pi / nf;
        let mut quad_weights = vec![w_mid; n + 1];
        quad_weights[0] = w_end;
        quad_weights[n] = w_end;

        let half_pi = pi / T::from_f64_lit(2.0);
        let mut normalizers = vec![half_pi; n + 1];
        normalizers[0] = pi;
        normalizers[n] = pi;

        Ok(Self {
            degree: n,
            nodes,
            quad_weights,
            normalizers,
            cos_table,
        })
    }

    /// Polynomial degree N.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of nodes, N+1.
    pub fn len(&self) -> usize {
        self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// CGL nodes, strictly decreasing from +1 to −1.
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Quadrature weights w_h.
    pub fn quad_weights(&self) -> &[T] {
        &self.quad_weights
    }

    /// Mode normalizers γ_k.
    pub fn normalizers(&self) -> &[T] {
        &self.normalizers
    }

    /// T_k(z_h) as an exact table lookup.
    #[inline]
    pub fn basis_at_node(&self, k: usize, h: usize) -> T {
        self.cos_table[(k * h) % (2 * self.degree)]
    }

    /// Discrete weighted L² norm: sqrt(Σ_h v_h² w_h).
    pub fn weighted_l2_norm(&self, values: &[T]) -> T {
        debug_assert_eq!(values.len(), self.len());
        let mut acc = T::zero();
        for (v, w) in values.iter().zip(&self.quad_weights) {
            acc += *v * *v * *w;
        }
        acc.sqrt()
    }

    /// Discrete weighted inner product Σ_h a_h b_h w_h.
    pub fn weighted_inner(&self, a: &[T], b: &[T]) -> T {
        debug_assert_eq!(a.len(), self.len());
        debug_assert_eq!(b.len(), self.len());
        let mut acc = T::zero();
        for ((x, y), w) in a.iter().zip(b).zip(&self.quad_weights) {
            acc += *x * *y * *w;
        }
        acc
    }
}

/// Nodal samples of a function on a [`ChebGrid`].
#[derive(Debug, Clone)]
pub struct GridFunction<T> {
    grid: Arc<ChebGrid<T>>,
    values: Vec<T>,
}

impl<T: Float> GridFunction<T> {
    /// Wrap nodal values; the length must be N+1.
    pub fn new(grid: Arc<ChebGrid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch {
                left: grid.len(),
                right: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    /// Sample `f` at the grid nodes.
    pub fn from_fn(grid: Arc<ChebGrid<T>>, f: impl Fn(T) -> T) -> Self {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self { grid, values }
    }

    /// Constant function.
    pub fn constant(grid: Arc<ChebGrid<T>>, value: T) -> Self {
        let values = vec![value; grid.len()];
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<ChebGrid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// True when both functions live on grids of the same degree.
    pub fn same_grid(&self, other: &Self) -> bool {
        self.grid.degree() == other.grid.degree()
    }
}

/// Chebyshev coefficients of a function on a [`ChebGrid`].
#[derive(Debug, Clone)]
pub struct ChebCoeffs<T> {
    grid: Arc<ChebGrid<T>>,
    coeffs: Vec<T>,
}

impl<T: Float> ChebCoeffs<T> {
    pub fn new(grid: Arc<ChebGrid<T>>, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch {
                left: grid.len(),
                right: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &Arc<ChebGrid<T>> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    /// Evaluate the expansion at an arbitrary point via Clenshaw's
    /// recurrence; cross-checked against `cos(k·arccos x)` in the tests.
    pub fn eval(&self, x: T) -> T {
        clenshaw(&self.coeffs, x)
    }
}

/// Clenshaw evaluation of Σ c_k T_k(x).
pub fn clenshaw<T: Float>(coeffs: &[T], x: T) -> T {
    let n = coeffs.len();
    if n == 0 {
        return T::zero();
    }
    if n == 1 {
        return coeffs[0];
    }
    let two_x = x + x;
    let mut b_kp1 = T::zero();
    let mut b_kp2 = T::zero();
    for k in (1..n).rev() {
        let b_k = two_x * b_kp1 - b_kp2 + coeffs[k];
        b_kp2 = b_kp1;
        b_kp1 = b_k;
    }
    coeffs[0] + x * b_kp1 - b_kp2
}

/// Forward discrete Chebyshev transform: nodal values to coefficients.
pub fn forward_transform<T: Float>(f: &GridFunction<T>) -> ChebCoeffs<T> {
    let grid = f.grid();
    let n = grid.degree();
    let table = &grid.cos_table;
    let two_n = 2 * n;

    // Fold the quadrature weights into the data once.
    let weighted: Vec<T> = f
        .values()
        .iter()
        .zip(grid.quad_weights())
        .map(|(&v, &w)| v * w)
        .collect();

    let mut coeffs = vec![T::zero(); n + 1];
    for (k, c) in coeffs.iter_mut().enumerate() {
        let mut acc = T::zero();
        let mut idx = 0usize;
        for &fw in &weighted {
            acc += fw * table[idx];
            idx += k;
            if idx >= two_n {
                idx -= two_n;
            }
        }
        *c = acc / grid.normalizers()[k];
    }
    ChebCoeffs {
        grid: Arc::clone(f.grid()),
        coeffs,
    }
}

/// Inverse discrete Chebyshev transform: coefficients to nodal values.
pub fn inverse_transform<T: Float>(c: &ChebCoeffs<T>) -> GridFunction<T> {
    let grid = c.grid();
    let n = grid.degree();
    let table = &grid.cos_table;
    let two_n = 2 * n;

    let mut values = vec![T::zero(); n + 1];
    for (h, v) in values.iter_mut().enumerate() {
        let mut acc = T::zero();
        let mut idx = 0usize;
        for &ck in c.coeffs() {
            acc += ck * table[idx];
            idx += h;
            if idx >= two_n {
                idx -= two_n;
            }
        }
        *v = acc;
    }
    GridFunction {
        grid: Arc::clone(c.grid()),
        values,
    }
}

/// Orthogonal projection onto modes 0..=m: truncate the expansion and
/// resample. `m = N` is the identity up to roundoff.
pub fn project<T: Float>(f: &GridFunction<T>, m: usize) -> Result<GridFunction<T>> {
    let n = f.grid().degree();
    if m > n {
        return Err(Error::InvalidProjection {
            requested: m,
            max: n,
        });
    }
    let mut coeffs = forward_transform(f);
    for c in coeffs.coeffs_mut().iter_mut().skip(m + 1) {
        *c = T::zero();
    }
    Ok(inverse_transform(&coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Arc<ChebGrid<f64>> {
        Arc::new(ChebGrid::new(n).unwrap())
    }

    /// Independent oracle: the quadrature sum evaluated directly with
    /// its own cosine calls.
    fn quadrature_coeff(values: &[f64], k: usize) -> f64 {
        let n = values.len() - 1;
        let gamma = if k == 0 || k == n { PI } else { PI / 2.0 };
        let mut acc = 0.0;
        for (h, &v) in values.iter().enumerate() {
            let w = if h == 0 || h == n {
                PI / (2.0 * n as f64)
            } else {
                PI / n as f64
            };
            let z = (h as f64 * PI / n as f64).cos();
            acc += v * (k as f64 * z.acos()).cos() * w;
        }
        acc / gamma
    }

    #[test]
    fn rejects_degenerate_degree() {
        assert!(matches!(
            ChebGrid::<f64>::new(0),
            Err(Error::InvalidDegree(0))
        ));
        assert!(matches!(
            ChebGrid::<f64>::new(1),
            Err(Error::InvalidDegree(1))
        ));
    }

    #[test]
    fn nodes_n2_are_exact() {
        let g = grid(2);
        assert_eq!(g.nodes(), &[1.0, 0.0, -1.0]);
    }

    #[test]
    fn nodes_n4_are_exact_cosines() {
        let g = grid(4);
        let r = 0.5f64.sqrt();
        assert_eq!(g.nodes()[0], 1.0);
        assert_abs_diff_eq!(g.nodes()[1], r, epsilon = 1e-15);
        assert_eq!(g.nodes()[2], 0.0);
        assert_abs_diff_eq!(g.nodes()[3], -r, epsilon = 1e-15);
        assert_eq!(g.nodes()[4], -1.0);
    }

    #[test]
    fn nodes_strictly_decreasing() {
        for n in [2usize, 5, 16, 33] {
            let g = grid(n);
            for h in 0..n {
                assert!(g.nodes()[h] > g.nodes()[h + 1]);
            }
            assert_eq!(g.nodes()[0], 1.0);
            assert_eq!(g.nodes()[n], -1.0);
        }
    }

    #[test]
    fn quad_weights_n4() {
        let g = grid(4);
        assert_eq!(
            g.quad_weights(),
            &[PI / 8.0, PI / 4.0, PI / 4.0, PI / 4.0, PI / 8.0]
        );
    }

    #[test]
    fn quad_weights_sum_to_pi() {
        for n in [2usize, 7, 64, 129] {
            let g = grid(n);
            let sum: f64 = g.quad_weights().iter().sum();
            assert_abs_diff_eq!(sum, PI, epsilon = 1e-13);
            assert!(g.quad_weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn normalizers_match_definition() {
        let g = grid(6);
        assert_eq!(g.normalizers()[0], PI);
        assert_eq!(g.normalizers()[6], PI);
        for k in 1..6 {
            assert_eq!(g.normalizers()[k], PI / 2.0);
        }
    }

    #[test]
    fn constant_transforms_to_first_mode() {
        for n in [2usize, 5, 17, 64] {
            let g = grid(n);
            let f = GridFunction::constant(Arc::clone(&g), 1.0);
            let c = forward_transform(&f);
            assert_abs_diff_eq!(c.coeffs()[0], 1.0, epsilon = 1e-14);
            for &ck in &c.coeffs()[1..] {
                assert!(ck.abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn t2_on_n4_recovers_unit_coefficient() {
        let g = grid(4);
        let f = GridFunction::from_fn(Arc::clone(&g), |x| 2.0 * x * x - 1.0);
        let c = forward_transform(&f);
        for (k, &ck) in c.coeffs().iter().enumerate() {
            let expected = if k == 2 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(ck, expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn low_mode_combination_matches_quadrature_oracle() {
        // f = 3 T_0 + 0.5 T_1 on the N = 8 grid.
        let g = grid(8);
        let f = GridFunction::from_fn(Arc::clone(&g), |x| 3.0 + 0.5 * x);
        let c = forward_transform(&f);
        for k in 0..=8 {
            let oracle = quadrature_coeff(f.values(), k);
            assert_abs_diff_eq!(c.coeffs()[k], oracle, epsilon = 1e-13);
            let expected = match k {
                0 => 3.0,
                1 => 0.5,
                _ => 0.0,
            };
            assert_abs_diff_eq!(c.coeffs()[k], expected, epsilon = 1e-13);
        }
    }

    #[test]
    fn discrete_orthogonality_recovers_each_mode() {
        let n = 24;
        let g = grid(n);
        for j in 0..n {
            let f = GridFunction::from_fn(Arc::clone(&g), |x| (j as f64 * x.acos()).cos());
            let c = forward_transform(&f);
            for (k, &ck) in c.coeffs().iter().enumerate() {
                let expected = if k == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(ck, expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn inverse_of_single_modes() {
        let g = grid(6);
        // [c0, 0, ...] is the constant c0.
        let mut coeffs = vec![0.0; 7];
        coeffs[0] = 2.5;
        let c = ChebCoeffs::new(Arc::clone(&g), coeffs).unwrap();
        let f = inverse_transform(&c);
        assert!(f.values().iter().all(|&v| v == 2.5));

        // [0, 1, 0, ...] reproduces the nodes bitwise.
        let mut coeffs = vec![0.0; 7];
        coeffs[1] = 1.0;
        let c = ChebCoeffs::new(Arc::clone(&g), coeffs).unwrap();
        let f = inverse_transform(&c);
        assert_eq!(f.values(), g.nodes());
    }

    #[test]
    fn projection_full_degree_is_identity() {
        let g = grid(12);
        let f = GridFunction::from_fn(Arc::clone(&g), |x| (3.0 * x).sin() + x * x);
        let p = project(&f, 12).unwrap();
        for (a, b) in f.values().iter().zip(p.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn projection_annihilates_high_modes() {
        // T_3 on N = 8, truncated at M = 2, is the zero function.
        let g = grid(8);
        let f = GridFunction::from_fn(Arc::clone(&g), |x| 4.0 * x * x * x - 3.0 * x);
        let p = project(&f, 2).unwrap();
        for &v in p.values() {
            assert!(v.abs() <= 1e-12);
        }
    }

    #[test]
    fn projection_truncates_t1_plus_t5() {
        let g = grid(8);
        let t5 = |x: f64| (5.0 * x.acos()).cos();
        let f = GridFunction::from_fn(Arc::clone(&g), |x| x + t5(x));
        let p = project(&f, 3).unwrap();
        for (h, &v) in p.values().iter().enumerate() {
            assert_abs_diff_eq!(v, g.nodes()[h], epsilon = 1e-12);
        }
    }

    #[test]
    fn projection_residual_is_discretely_orthogonal() {
        let g = grid(16);
        let f = GridFunction::from_fn(Arc::clone(&g), |x| (2.0 + x).recip());
        let m = 9;
        let p = project(&f, m).unwrap();
        let residual: Vec<f64> = f
            .values()
            .iter()
            .zip(p.values())
            .map(|(a, b)| a - b)
            .collect();
        for j in 0..=m {
            let tj: Vec<f64> = g
                .nodes()
                .iter()
                .map(|&x| (j as f64 * x.acos()).cos())
                .collect();
            let ip = g.weighted_inner(&residual, &tj);
            assert!(ip.abs() <= 1e-10, "mode {j}: inner product {ip}");
        }
    }

    #[test]
    fn projection_is_idempotent() {
        let g = grid(20);
        let f = GridFunction::from_fn(Arc::clone(&g), |x| x.abs());
        let once = project(&f, 7).unwrap();
        let twice = project(&once, 7).unwrap();
        for (a, b) in once.values().iter().zip(twice.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn projection_degree_out_of_range() {
        let g = grid(8);
        let f = GridFunction::constant(Arc::clone(&g), 1.0);
        assert!(matches!(
            project(&f, 9),
            Err(Error::InvalidProjection {
                requested: 9,
                max: 8
            })
        ));
    }

    #[test]
    fn clenshaw_matches_cosine_form() {
        let g = grid(40);
        let coeffs: Vec<f64> = (0..=40)
            .map(|k| 1.0 / (1.0 + k as f64 * k as f64))
            .collect();
        let c = ChebCoeffs::new(Arc::clone(&g), coeffs.clone()).unwrap();
        for &x in &[-1.0, -0.73, -0.2, 0.0, 0.41, 0.99, 1.0] {
            let direct: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(k, &ck)| ck * (k as f64 * f64::acos(x)).cos())
                .sum();
            assert_abs_diff_eq!(c.eval(x), direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn grid_function_length_checked() {
        let g = grid(4);
        assert!(GridFunction::new(Arc::clone(&g), vec![0.0; 4]).is_err());
        assert!(GridFunction::new(Arc::clone(&g), vec![0.0; 5]).is_ok());
    }

    #[test]
    fn f32_roundtrip_smoke() {
        let g = Arc::new(ChebGrid::<f32>::new(16).unwrap());
        let f = GridFunction::from_fn(Arc::clone(&g), |x| (2.0 * x).sin());
        let back = inverse_transform(&forward_transform(&f));
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).abs() < 1e-4);
        }
    }

    proptest! {
        #[test]
        fn roundtrip_is_identity(n in 2usize..48, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = grid(n);
            let values: Vec<f64> = (0..=n).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let f = GridFunction::new(Arc::clone(&g), values).unwrap();
            let back = inverse_transform(&forward_transform(&f));
            for (a, b) in f.values().iter().zip(back.values()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        #[test]
        fn transforms_are_linear(n in 2usize..24, a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let g = grid(n);
            let f = GridFunction::from_fn(Arc::clone(&g), |x| (1.3 * x).sin());
            let h = GridFunction::from_fn(Arc::clone(&g), |x| x * x - 0.4);
            let combo = GridFunction::new(
                Arc::clone(&g),
                f.values().iter().zip(h.values()).map(|(x, y)| a * x + b * y).collect(),
            ).unwrap();
            let cf = forward_transform(&f);
            let ch = forward_transform(&h);
            let cc = forward_transform(&combo);
            for k in 0..=n {
                let lin = a * cf.coeffs()[k] + b * ch.coeffs()[k];
                prop_assert!((cc.coeffs()[k] - lin).abs() <= 1e-11);
            }
        }
    }
}
