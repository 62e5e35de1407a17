use boxl0::linalg::{DenseMatrix, dist, norm};
use boxl0::operators::IdentityMap;
use boxl0::solver::newton_direction;
use boxl0::stationarity::partition_indices;
use boxl0::{
    BoxBounds, ComposedMap, HaarDirection, HaarMap, LeastSquaresObjective, PartialDftMap, Result, SmoothObjective,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix<f64> {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

fn vecn(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn fd_gradient<O: SmoothObjective<f64>>(obj: &O, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut p = x.to_vec();
            let mut q = x.to_vec();
            p[i] += h;
            q[i] -= h;
            (obj.value(&p) - obj.value(&q)) / (2.0 * h)
        })
        .collect()
}

fn check_derivatives<O: SmoothObjective<f64>>(obj: &O, rng: &mut ChaCha8Rng) {
    let n = obj.dim();
    let x = vecn(rng, n);
    let g = obj.gradient(&x);
    let g_fd = fd_gradient(obj, &x, 1e-5);
    assert!(dist(&g, &g_fd) <= 1e-6 * (1.0 + norm(&g)), "gradient mismatch");

    // Hessian columns from central differences of the gradient
    let idx: Vec<usize> = (0..n).step_by(3).collect();
    let block = obj.hessian_block(&x, &idx, &idx).unwrap();
    for (q, &j) in idx.iter().enumerate() {
        let mut p = x.clone();
        let mut m = x.clone();
        p[j] += 1e-5;
        m[j] -= 1e-5;
        let (gp, gm) = (obj.gradient(&p), obj.gradient(&m));
        for (r, &i) in idx.iter().enumerate() {
            let fd = (gp[i] - gm[i]) / 2e-5;
            assert!((block[(r, q)] - fd).abs() <= 1e-5 * (1.0 + fd.abs()), "H[{i},{j}]");
        }
    }
    // block products agree with the assembled block
    let v = vecn(rng, idx.len());
    let hv = obj.hessian_block_apply(&x, &idx, &idx, &v).unwrap();
    assert!(dist(&hv, &block.mul_vec(&v)) <= 1e-10 * (1.0 + norm(&hv)));
}

#[test]
fn dense_least_squares_derivatives() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = gaussian(&mut rng, 12, 20);
    let b = vecn(&mut rng, 12);
    let obj = LeastSquaresObjective::<f64, f64, _>::new(a, b).unwrap();
    check_derivatives(&obj, &mut rng);
    assert_eq!(obj.hessian_rank_bound(), Some(12));
}

#[test]
fn complex_least_squares_derivatives() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let map = ComposedMap::new::<f64, Complex64>(
        PartialDftMap::<f64>::random(64, 20, 5).unwrap(),
        HaarMap::new(8, HaarDirection::Inverse).unwrap(),
    )
    .unwrap();
    let b: Vec<Complex64> = (0..20)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let obj = LeastSquaresObjective::new(map, b).unwrap();
    check_derivatives(&obj, &mut rng);
    assert_eq!(obj.hessian_rank_bound(), Some(40));
}

#[test]
fn least_squares_rejects_bad_shapes() {
    let a = DenseMatrix::<f64>::zeros(3, 4);
    assert!(LeastSquaresObjective::<f64, f64, _>::new(a.clone(), vec![0.0; 2]).is_err());
    let obj = LeastSquaresObjective::<f64, f64, _>::new(a, vec![0.0; 3]).unwrap();
    assert!(obj.hessian_block(&[0.0; 4], &[4], &[0]).is_err());
    assert!(obj.hessian_block_apply(&[0.0; 4], &[0], &[1, 2], &[1.0]).is_err());
}

#[test]
fn value_is_consistent_after_cache_reuse() {
    let obj = LeastSquaresObjective::<f64, f64, _>::new(IdentityMap { n: 3 }, vec![1.0, 2.0, 3.0]).unwrap();
    let x = [0.0, 0.0, 0.0];
    let y = [1.0, 2.0, 0.0];
    assert_eq!(obj.value(&x), 7.0);
    assert_eq!(obj.value(&y), 4.5);
    assert_eq!(obj.value(&x), 7.0);
    assert_eq!(obj.gradient(&y), vec![0.0, 0.0, -3.0]);
    let cloned = obj.clone();
    assert_eq!(cloned.value(&y), 4.5);
}

/// Forces the matrix-free Newton path on an objective that would otherwise
/// assemble its blocks.
struct MatrixFree<O>(O);

impl<O: SmoothObjective<f64>> SmoothObjective<f64> for MatrixFree<O> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.0.value(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.0.gradient(x)
    }
    fn hessian_block(&self, x: &[f64], rows: &[usize], cols: &[usize]) -> Result<DenseMatrix<f64>> {
        self.0.hessian_block(x, rows, cols)
    }
    fn hessian_block_apply(&self, x: &[f64], rows: &[usize], cols: &[usize], v: &[f64]) -> Result<Vec<f64>> {
        self.0.hessian_block_apply(x, rows, cols, v)
    }
    fn cheap_hessian_blocks(&self) -> bool {
        false
    }
}

#[test]
fn iterative_and_factored_newton_directions_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (m, n) = (60, 100);
    let a = gaussian(&mut rng, m, n);
    let b = vecn(&mut rng, m);
    let obj = LeastSquaresObjective::<f64, f64, _>::new(a, b).unwrap();
    let bounds = BoxBounds::symmetric(n, 2.0).unwrap();
    let mut x = vec![0.0; n];
    for (i, xi) in x.iter_mut().enumerate().take(30) {
        *xi = if i % 2 == 0 { 0.5 } else { -1.0 };
    }
    let g = obj.gradient(&x);
    let part = partition_indices(&x, &g, 0.01, 5.0, &bounds).unwrap();
    assert!(!part.theta.is_empty() && part.theta.len() <= m);
    let dense = newton_direction(&obj, &x, &g, &part, &bounds).unwrap();
    let free = MatrixFree(&obj);
    let iterative = newton_direction(&free, &x, &g, &part, &bounds).unwrap();
    assert_eq!(dense.theta, iterative.theta);
    assert!(dist(&dense.d, &iterative.d) <= 1e-8 * (1.0 + norm(&dense.d)));
}

#[test]
fn oversized_theta_is_unsolvable() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (m, n) = (5, 30);
    let obj = LeastSquaresObjective::<f64, f64, _>::new(gaussian(&mut rng, m, n), vecn(&mut rng, m)).unwrap();
    let bounds = BoxBounds::symmetric(n, 100.0).unwrap();
    let x = vec![0.0; n];
    let g = obj.gradient(&x);
    let part = partition_indices(&x, &g, 0.01, 1e-12, &bounds).unwrap();
    assert!(part.theta.len() > m);
    assert!(newton_direction(&obj, &x, &g, &part, &bounds).is_err());
}
