//! State-space SISO plants `x+ = Ax + Bu, y = Cx + Du` (or `x' = ...` in
//! continuous time), their simulation and structural matrices.

use nalgebra::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, Matrix, Vector};

/// Draws allowed in [`random_minimal_system`] before giving up.
pub const REJECTION_CAP: usize = 1000;

/// Spectral radius a random discrete-time `A` is rescaled to when it exceeds one.
pub const RESCALED_RADIUS: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeDomain {
    #[serde(rename = "dt")]
    Discrete,
    #[serde(rename = "ct")]
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LtiSystem {
    a: Matrix,
    b: Matrix,
    c: Matrix,
    d: f64,
    domain: TimeDomain,
}

impl LtiSystem {
    /// `a` is `n x n`, `b` is `n x 1`, `c` is `1 x n`, `n >= 1`.
    pub fn new(a: Matrix, b: Matrix, c: Matrix, d: f64, domain: TimeDomain) -> Result<Self> {
        let n = a.nrows();
        if n == 0 || !a.is_square() {
            return Err(Error::Dimension(format!(
                "A must be square with n >= 1, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if b.shape() != (n, 1) {
            return Err(Error::Dimension(format!(
                "B must be {n}x1, got {:?}",
                b.shape()
            )));
        }
        if c.shape() != (1, n) {
            return Err(Error::Dimension(format!(
                "C must be 1x{n}, got {:?}",
                c.shape()
            )));
        }
        let finite = a
            .iter()
            .chain(b.iter())
            .chain(c.iter())
            .all(|x| x.is_finite());
        if !finite || !d.is_finite() {
            return Err(Error::Precondition("system matrices must be finite".into()));
        }
        Ok(Self { a, b, c, d, domain })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }
    pub fn b(&self) -> &Matrix {
        &self.b
    }
    pub fn c(&self) -> &Matrix {
        &self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn domain(&self) -> TimeDomain {
        self.domain
    }
    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    /// Transfer function `C (zI - A)^-1 B + D` at a complex point.
    pub fn transfer_at(&self, z: Complex<f64>) -> Option<Complex<f64>> {
        let n = self.order();
        let a = self.a.map(|x| Complex::new(x, 0.0));
        let zi_a = nalgebra::DMatrix::<Complex<f64>>::from_diagonal_element(n, n, z) - a;
        let b = self.b.map(|x| Complex::new(x, 0.0));
        let sol = zi_a.lu().solve(&b)?;
        let c = self.c.map(|x| Complex::new(x, 0.0));
        Some((c * sol)[(0, 0)] + Complex::new(self.d, 0.0))
    }
}

/// Paired input/output samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub u: Vec<f64>,
    pub y: Vec<f64>,
    #[serde(default)]
    pub start_index: i64,
}

impl Trajectory {
    pub fn new(u: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if u.is_empty() || u.len() != y.len() {
            return Err(Error::Dimension(format!(
                "trajectory needs equal nonzero lengths, got u={} y={}",
                u.len(),
                y.len()
            )));
        }
        Ok(Self {
            u,
            y,
            start_index: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

/// A discrete-time run with the full state sequence `x(0), ..., x(T)`.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub trajectory: Trajectory,
    pub states: Vec<Vector>,
}

/// Krylov matrix `[v, Av, ..., A^(k-1) v]` for any number of columns in `v`.
pub(crate) fn krylov(a: &Matrix, v: &Matrix, k: usize) -> Matrix {
    let (n, m) = v.shape();
    let mut out = Matrix::zeros(n, m * k);
    let mut block = v.clone();
    for i in 0..k {
        out.view_mut((0, i * m), (n, m)).copy_from(&block);
        if i + 1 < k {
            block = a * &block;
        }
    }
    out
}

/// `[b, ab, ..., a^(k-1) b]`.
pub fn controllability_matrix(a: &Matrix, b: &Matrix, k: usize) -> Result<Matrix> {
    if !a.is_square() || b.nrows() != a.nrows() {
        return Err(Error::Dimension(format!(
            "controllability matrix needs square A and matching B, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    Ok(krylov(a, b, k))
}

/// `[c; ca; ...; c a^(k-1)]`.
pub fn observability_matrix(c: &Matrix, a: &Matrix, k: usize) -> Result<Matrix> {
    if !a.is_square() || c.ncols() != a.ncols() {
        return Err(Error::Dimension(format!(
            "observability matrix needs square A and matching C, got {:?} and {:?}",
            a.shape(),
            c.shape()
        )));
    }
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    Ok(krylov(&a.transpose(), &c.transpose(), k).transpose())
}

pub(crate) fn obsv(c: &Matrix, a: &Matrix, k: usize) -> Matrix {
    krylov(&a.transpose(), &c.transpose(), k).transpose()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Minimality {
    pub minimal: bool,
    pub controllability_rank: usize,
    pub observability_rank: usize,
}

pub fn is_minimal(sys: &LtiSystem) -> Minimality {
    let n = sys.order();
    let controllability_rank = numerics::rank(&krylov(&sys.a, &sys.b, n));
    let observability_rank = numerics::rank(&obsv(&sys.c, &sys.a, n));
    Minimality {
        minimal: controllability_rank == n && observability_rank == n,
        controllability_rank,
        observability_rank,
    }
}

fn check_x0(sys: &LtiSystem, x0: &Vector) -> Result<()> {
    if x0.len() != sys.order() {
        return Err(Error::Dimension(format!(
            "x0 has length {}, plant order is {}",
            x0.len(),
            sys.order()
        )));
    }
    Ok(())
}

/// Simulates a discrete-time plant and keeps the state sequence.
pub fn simulate_dt_states(sys: &LtiSystem, u: &[f64], x0: &Vector) -> Result<Simulation> {
    if sys.domain != TimeDomain::Discrete {
        return Err(Error::Precondition(
            "simulate_dt needs a discrete-time plant".into(),
        ));
    }
    check_x0(sys, x0)?;
    if u.is_empty() {
        return Err(Error::Precondition("input sequence is empty".into()));
    }
    let b = sys.b.column(0);
    let c = sys.c.row(0);
    let mut x = x0.clone();
    let mut states = Vec::with_capacity(u.len() + 1);
    let mut y = Vec::with_capacity(u.len());
    for &ut in u {
        y.push(c.dot(&x.transpose()) + sys.d * ut);
        let next = &sys.a * &x + b * ut;
        states.push(std::mem::replace(&mut x, next));
    }
    states.push(x);
    Ok(Simulation {
        trajectory: Trajectory::new(u.to_vec(), y)?,
        states,
    })
}

pub fn simulate_dt(sys: &LtiSystem, u: &[f64], x0: &Vector) -> Result<Trajectory> {
    simulate_dt_states(sys, u, x0).map(|s| s.trajectory)
}

/// `dim(B_L) = L + rank(O_L(C, A))`.
pub fn behavior_dimension(sys: &LtiSystem, l: usize) -> usize {
    if l == 0 {
        return 0;
    }
    l + numerics::rank(&obsv(&sys.c, &sys.a, l))
}

/// True iff `rank([x0, A x0, ..., A^(n-1) x0]) = n`.
pub fn pbh_controllable_from(a: &Matrix, x0: &Vector) -> bool {
    let n = a.nrows();
    let v = Matrix::from_column_slice(n, 1, x0.as_slice());
    numerics::rank(&krylov(a, &v, n)) == n
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(a: &Matrix) -> f64 {
    a.complex_eigenvalues()
        .iter()
        .fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Random plant with i.i.d. standard-normal entries, resampled until minimal.
/// Discrete-time `A` with spectral radius above one is scaled down to
/// [`RESCALED_RADIUS`] so long simulations stay bounded.
pub fn random_minimal_system<R: Rng + ?Sized>(
    n: usize,
    domain: TimeDomain,
    rng: &mut R,
) -> Result<LtiSystem> {
    if n == 0 {
        return Err(Error::Precondition("plant order must be at least 1".into()));
    }
    for _ in 0..REJECTION_CAP {
        let mut a = random_matrix(n, n, rng);
        if domain == TimeDomain::Discrete {
            let rho = spectral_radius(&a);
            if rho >= 1.0 {
                a *= RESCALED_RADIUS / rho;
            }
        }
        let b = random_matrix(n, 1, rng);
        let c = random_matrix(1, n, rng);
        let d: f64 = rng.sample(StandardNormal);
        let sys = LtiSystem::new(a, b, c, d, domain)?;
        if is_minimal(&sys).minimal {
            return Ok(sys);
        }
    }
    Err(Error::RejectionCap(REJECTION_CAP))
}

pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn random_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vector {
    Vector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(rows: usize, cols: usize, v: &[f64]) -> Matrix {
        Matrix::from_row_slice(rows, cols, v)
    }

    fn shift2() -> Matrix {
        m(2, 2, &[0.0, 1.0, 0.0, 0.0])
    }

    #[test]
    fn controllability_of_identity() {
        let c = controllability_matrix(&Matrix::identity(2, 2), &m(2, 1, &[1.0, 0.0]), 2).unwrap();
        assert_eq!(c, m(2, 2, &[1.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn controllability_of_shift() {
        let c = controllability_matrix(&shift2(), &m(2, 1, &[0.0, 1.0]), 2).unwrap();
        assert_eq!(c, m(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    }

    #[test]
    fn one_step_controllability_is_b() {
        let b = m(2, 1, &[3.0, -1.0]);
        assert_eq!(controllability_matrix(&shift2(), &b, 1).unwrap(), b);
    }

    #[test]
    fn controllability_rejects_bad_shapes() {
        assert!(matches!(
            controllability_matrix(&shift2(), &m(3, 1, &[1.0, 0.0, 0.0]), 2),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            controllability_matrix(&shift2(), &m(2, 1, &[1.0, 0.0]), 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn observability_examples() {
        let o = observability_matrix(&m(1, 2, &[1.0, 0.0]), &Matrix::identity(2, 2), 3).unwrap();
        assert_eq!(o, m(3, 2, &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0]));
        let o = observability_matrix(&m(1, 2, &[0.0, 1.0]), &shift2(), 2).unwrap();
        assert_eq!(o, m(2, 2, &[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn observability_is_transposed_controllability() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = random_matrix(4, 4, &mut rng);
            let c = random_matrix(1, 4, &mut rng);
            let o = observability_matrix(&c, &a, 5).unwrap();
            let k = controllability_matrix(&a.transpose(), &c.transpose(), 5).unwrap();
            assert!((o - k.transpose()).abs().max() < 1e-12);
        }
    }

    #[test]
    fn minimality() {
        let sys = |b: &[f64], c: &[f64]| {
            LtiSystem::new(shift2(), m(2, 1, b), m(1, 2, c), 0.0, TimeDomain::Discrete).unwrap()
        };
        assert!(is_minimal(&sys(&[0.0, 1.0], &[1.0, 0.0])).minimal);
        let r = is_minimal(&sys(&[0.0, 0.0], &[1.0, 0.0]));
        assert!(!r.minimal);
        assert_eq!(r.controllability_rank, 0);
        let r = is_minimal(&sys(&[0.0, 1.0], &[0.0, 0.0]));
        assert!(!r.minimal);
        assert_eq!(r.observability_rank, 0);
    }

    fn scalar(a: f64) -> LtiSystem {
        LtiSystem::new(
            m(1, 1, &[a]),
            m(1, 1, &[1.0]),
            m(1, 1, &[1.0]),
            0.0,
            TimeDomain::Discrete,
        )
        .unwrap()
    }

    #[test]
    fn delay_element() {
        let t = simulate_dt(&scalar(0.0), &[1.0, 0.0, 0.0], &Vector::zeros(1)).unwrap();
        assert_eq!(t.y, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn zero_input_zero_state() {
        let t = simulate_dt(&scalar(0.7), &[0.0; 5], &Vector::zeros(1)).unwrap();
        assert!(t.y.iter().all(|&y| y == 0.0));
    }

    #[test]
    fn first_order_recursion() {
        let t = simulate_dt(&scalar(0.5), &[1.0, 1.0, 1.0], &Vector::zeros(1)).unwrap();
        assert_eq!(t.y, vec![0.0, 1.0, 1.5]);
    }

    #[test]
    fn simulation_rejects_wrong_x0() {
        assert!(matches!(
            simulate_dt(&scalar(0.5), &[1.0], &Vector::zeros(2)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn states_follow_the_recursion() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sys = random_minimal_system(3, TimeDomain::Discrete, &mut rng).unwrap();
        let u: Vec<f64> = (0..6).map(|i| (i as f64).sin()).collect();
        let x0 = random_vector(3, &mut rng);
        let sim = simulate_dt_states(&sys, &u, &x0).unwrap();
        assert_eq!(sim.states.len(), 7);
        for t in 0..6 {
            let next = sys.a() * &sim.states[t] + sys.b().column(0) * u[t];
            assert!((next - &sim.states[t + 1]).amax() < 1e-12);
        }
    }

    #[test]
    fn behavior_dimension_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s2 = random_minimal_system(2, TimeDomain::Discrete, &mut rng).unwrap();
        assert_eq!(behavior_dimension(&s2, 1), 2);
        assert_eq!(behavior_dimension(&s2, 3), 5);
        let s3 = random_minimal_system(3, TimeDomain::Discrete, &mut rng).unwrap();
        assert_eq!(behavior_dimension(&s3, 4), 7);
    }

    #[test]
    fn pbh_examples() {
        assert!(pbh_controllable_from(
            &shift2(),
            &Vector::from_vec(vec![0.0, 1.0])
        ));
        // e1 is an eigenvector of the shift.
        assert!(!pbh_controllable_from(
            &shift2(),
            &Vector::from_vec(vec![1.0, 0.0])
        ));
        let a = m(2, 2, &[2.0, 0.0, 0.0, 3.0]);
        assert!(!pbh_controllable_from(
            &a,
            &Vector::from_vec(vec![0.0, 5.0])
        ));
    }

    #[test]
    fn random_systems_are_minimal_and_seeded() {
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_minimal_system(3, TimeDomain::Discrete, &mut rng).unwrap()
        };
        let s = draw(9);
        assert_eq!(s, draw(9));
        assert!(is_minimal(&s).minimal);
        assert!(spectral_radius(s.a()) < 1.0 + 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s1 = random_minimal_system(1, TimeDomain::Discrete, &mut rng).unwrap();
        assert!(s1.b()[(0, 0)] != 0.0 && s1.c()[(0, 0)] != 0.0);
    }

    #[test]
    fn transfer_function_of_scalar_plant() {
        let h = scalar(0.5).transfer_at(Complex::new(1.0, 0.0)).unwrap();
        assert!((h.re - 2.0).abs() < 1e-14 && h.im.abs() < 1e-14);
    }
}
