//! A signal generator driving a plant, seen through the Sylvester equation
//! `A Pi + B L_g = Pi S_g`.
//!
//! With `xbar = x - Pi w` the interconnection splits into two autonomous parts,
//! `w+ = S_g w` and `xbar+ = A xbar`, and the input-output Hankel matrix
//! factors as `H = L_L R` with
//!
//! ```text
//! L_L = [ O_L(L_g, S_g)   0        ]      R = [ C(S_g, w(0))    ]
//!       [ O_L(M_g, S_g)   O_L(C,A) ]          [ C(A, xbar(0))   ]
//! ```
//!
//! where `M_g = C Pi + D L_g` is the moment. Whether `H` reaches full behavior
//! rank is decided by the generator dimension against `L` and `L + n`, and, in
//! the intermediate case, by whether `[C(A, xbar(0))  Pi_2]` has full row rank.

use nalgebra::linalg::Schur;
use nalgebra::Complex;
use rand::Rng;
use serde::Serialize;

use crate::error::{Assumption, Error, Result};
use crate::informativity::CaseLabel;
use crate::lti::{self, krylov, obsv, LtiSystem};
use crate::numerics::{self, Matrix, Vector};
use crate::siggen::{check_assumptions, spectra_check, SignalGenerator};

/// Solves `a X + q = X s` for `X` by vectorisation:
/// `(I kron a - s^T kron I) vec(X) = -vec(q)`.
pub fn solve_sylvester_dense(a: &Matrix, s: &Matrix, q: &Matrix) -> Result<Matrix> {
    let n = a.nrows();
    let m = s.nrows();
    if q.shape() != (n, m) {
        return Err(Error::Dimension(format!(
            "right-hand side must be {n}x{m}, got {:?}",
            q.shape()
        )));
    }
    let eye_n = Matrix::identity(n, n);
    let eye_m = Matrix::identity(m, m);
    let k = eye_m.kronecker(a) - s.transpose().kronecker(&eye_n);
    let report = numerics::numerical_rank(&k, None);
    if report.rank < n * m {
        return Err(Error::Singular(format!(
            "Sylvester operator is singular (sigma_min = {:.3e})",
            report.sigma(n * m)
        )));
    }
    let rhs = Vector::from_iterator(n * m, q.iter().map(|x| -x));
    let lu = k.clone().full_piv_lu();
    let mut x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("Sylvester operator is singular".into()))?;
    // one step of iterative refinement
    let r = &rhs - &k * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    Ok(Matrix::from_column_slice(n, m, x.as_slice()))
}

/// `||A Pi + B L_g - Pi S_g|| / (||A|| ||Pi|| + ||B|| ||L_g||)` in spectral norm.
pub fn sylvester_residual(plant: &LtiSystem, gen: &SignalGenerator, pi: &Matrix) -> f64 {
    let r = plant.a() * pi + plant.b() * gen.l_g() - pi * gen.s_g();
    let scale = numerics::norm2(plant.a()) * numerics::norm2(pi)
        + numerics::norm2(plant.b()) * numerics::norm2(gen.l_g());
    numerics::norm2(&r) / scale.max(f64::MIN_POSITIVE)
}

fn check_pair(plant: &LtiSystem, gen: &SignalGenerator) -> Result<()> {
    if plant.domain() != gen.domain() {
        return Err(Error::Precondition(
            "plant and generator live in different time domains".into(),
        ));
    }
    Ok(())
}

/// Unique solution of `A Pi + B L_g = Pi S_g`.
///
/// Requires `(A, B)` controllable, `(L_g, S_g)` observable and disjoint spectra.
pub fn solve_sylvester(plant: &LtiSystem, gen: &SignalGenerator) -> Result<Matrix> {
    check_pair(plant, gen)?;
    let n = plant.order();
    if numerics::rank(&krylov(plant.a(), plant.b(), n)) < n {
        return Err(Error::Assumption(Assumption::PlantControllable));
    }
    let n_g = gen.dim();
    if numerics::rank(&gen.observability(n_g)) < n_g {
        return Err(Error::Assumption(Assumption::GeneratorObservable));
    }
    if !spectra_check(plant.a(), gen.s_g()).disjoint {
        return Err(Error::Assumption(Assumption::DisjointSpectra));
    }
    solve_sylvester_dense(plant.a(), gen.s_g(), &(plant.b() * gen.l_g()))
}

/// `M_g = C Pi + D L_g`.
pub fn moment(plant: &LtiSystem, pi: &Matrix, gen: &SignalGenerator) -> Matrix {
    plant.c() * pi + gen.l_g() * plant.d()
}

/// Coefficients `c_0, ..., c_(n-1)` of the monic characteristic polynomial
/// `z^n + c_(n-1) z^(n-1) + ... + c_0`, expanded from the eigenvalues.
pub fn char_poly(a: &Matrix) -> Vec<f64> {
    let eig = a.complex_eigenvalues();
    // coefficients low -> high, leading one last
    let mut coeffs = vec![Complex::new(1.0, 0.0)];
    for lambda in eig.iter() {
        let mut next = vec![Complex::new(0.0, 0.0); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * lambda;
        }
        coeffs = next;
    }
    coeffs.pop();
    coeffs.into_iter().map(|c| c.re).collect()
}

/// Plant companion with ones on the subdiagonal and last column `-alpha`.
pub fn plant_companion(alpha: &[f64]) -> Matrix {
    let n = alpha.len();
    let mut m = Matrix::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for (i, &a) in alpha.iter().enumerate() {
        m[(i, n - 1)] = -a;
    }
    m
}

/// Solves the companion-form equation `Ac Gamma + e1 e1^T = Gamma Sc`, with
/// `Ac` = [`plant_companion`]`(alpha)` and `Sc` = [`crate::siggen::companion`]`(xi)`.
/// Then `Pi = C_n(A, B) Gamma O_Ng(L_g, S_g)`.
pub fn gamma_solution(alpha: &[f64], xi: &[f64]) -> Result<Matrix> {
    let (n, n_g) = (alpha.len(), xi.len());
    if n == 0 || n_g == 0 {
        return Err(Error::Precondition(
            "characteristic polynomials must have degree >= 1".into(),
        ));
    }
    let mut e = Matrix::zeros(n, n_g);
    e[(0, 0)] = 1.0;
    solve_sylvester_dense(&plant_companion(alpha), &crate::siggen::companion(xi), &e)
}

/// Lower-triangular Toeplitz matrix of Markov parameters
/// `D, CB, CAB, ..., C A^(L-2) B`.
pub fn toeplitz_markov(plant: &LtiSystem, l: usize) -> Matrix {
    let mut markov = Vec::with_capacity(l);
    markov.push(plant.d());
    let mut v = plant.b().clone();
    for _ in 1..l {
        markov.push((plant.c() * &v)[(0, 0)]);
        v = plant.a() * v;
    }
    Matrix::from_fn(l, l, |i, j| if i >= j { markov[i - j] } else { 0.0 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterconnectionAnalysis {
    /// Sylvester solution, `n x N_g`.
    pub pi: Matrix,
    /// Moment row `C Pi + D L_g`.
    pub m_g: Matrix,
    /// `x(0) - Pi w(0)`.
    pub x_bar0: Vector,
    /// `Pi O_Ng(L_g, S_g)^-1`, equal to `C_n(A, B) Gamma`.
    pub pi_bar: Matrix,
    /// First `min(L, N_g)` columns of `pi_bar`.
    pub pi1: Matrix,
    /// Remaining `N_g - L` columns (possibly none).
    pub pi2: Matrix,
    pub gamma: Matrix,
    pub depth_l: usize,
    pub w0: Vector,
    pub sylvester_residual: f64,
}

impl InterconnectionAnalysis {
    pub fn n(&self) -> usize {
        self.pi.nrows()
    }

    pub fn n_g(&self) -> usize {
        self.pi.ncols()
    }

    /// Split of `pi_bar` at column `min(l, N_g)`.
    pub fn partition(&self, l: usize) -> (Matrix, Matrix) {
        let n_g = self.n_g();
        let split = l.min(n_g);
        (
            self.pi_bar.columns(0, split).into_owned(),
            self.pi_bar.columns(split, n_g - split).into_owned(),
        )
    }

    pub fn offset(&self, x0: &Vector) -> Vector {
        x0 - &self.pi * &self.w0
    }
}

pub fn analyze(
    plant: &LtiSystem,
    gen: &SignalGenerator,
    x0: &Vector,
    l: usize,
) -> Result<InterconnectionAnalysis> {
    if x0.len() != plant.order() {
        return Err(Error::Dimension(format!(
            "x0 has length {}, plant order is {}",
            x0.len(),
            plant.order()
        )));
    }
    let pi = solve_sylvester(plant, gen)?;
    let m_g = moment(plant, &pi, gen);
    let n_g = gen.dim();
    let o = gen.observability(n_g);
    // pi_bar O = pi  <=>  O^T pi_bar^T = pi^T
    let pi_bar = o
        .transpose()
        .full_piv_lu()
        .solve(&pi.transpose())
        .ok_or_else(|| Error::Singular("generator observability matrix is singular".into()))?
        .transpose();
    let gamma = gamma_solution(&char_poly(plant.a()), &char_poly(gen.s_g()))?;
    let split = l.min(n_g);
    let sylvester_residual = sylvester_residual(plant, gen, &pi);
    Ok(InterconnectionAnalysis {
        x_bar0: x0 - &pi * gen.w0(),
        pi1: pi_bar.columns(0, split).into_owned(),
        pi2: pi_bar.columns(split, n_g - split).into_owned(),
        pi,
        m_g,
        pi_bar,
        gamma,
        depth_l: l,
        w0: gen.w0().clone(),
        sylvester_residual,
    })
}

/// `[O_L(L_g,S_g) 0; O_L(M_g,S_g) O_L(C,A)]`, `2L x (N_g + n)`.
pub fn build_ll(
    plant: &LtiSystem,
    gen: &SignalGenerator,
    analysis: &InterconnectionAnalysis,
    l: usize,
) -> Matrix {
    let top = numerics::hstack(&[&gen.observability(l), &Matrix::zeros(l, plant.order())]);
    let bottom = numerics::hstack(&[
        &obsv(&analysis.m_g, gen.s_g(), l),
        &obsv(plant.c(), plant.a(), l),
    ]);
    numerics::vstack(&[&top, &bottom])
}

/// Stacked state trajectory `[C(S_g, w0); C(A, xbar0)]` with `cols` columns.
pub fn build_r(
    gen: &SignalGenerator,
    plant: &LtiSystem,
    w0: &Vector,
    x_bar0: &Vector,
    cols: usize,
) -> Matrix {
    let w = Matrix::from_column_slice(w0.len(), 1, w0.as_slice());
    let x = Matrix::from_column_slice(x_bar0.len(), 1, x_bar0.as_slice());
    numerics::vstack(&[&krylov(gen.s_g(), &w, cols), &krylov(plant.a(), &x, cols)])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExceptionalTest {
    pub member: bool,
    /// `n`-th singular value of the tested matrix.
    pub margin: f64,
    pub tolerance: f64,
}

fn row_rank_test(m: &Matrix) -> ExceptionalTest {
    let n = m.nrows();
    let report = numerics::numerical_rank(m, None);
    ExceptionalTest {
        member: report.rank < n,
        margin: report.sigma(n),
        tolerance: report.tolerance_used,
    }
}

fn offset_krylov(plant: &LtiSystem, x_bar0: &Vector) -> Matrix {
    let n = plant.order();
    krylov(
        plant.a(),
        &Matrix::from_column_slice(n, 1, x_bar0.as_slice()),
        n,
    )
}

/// Membership of `x0` in the set where `(A, x0 - Pi w0)` is not controllable.
pub fn in_e1(
    plant: &LtiSystem,
    analysis: &InterconnectionAnalysis,
    x0: &Vector,
) -> ExceptionalTest {
    row_rank_test(&offset_krylov(plant, &analysis.offset(x0)))
}

/// Membership of `x0` in the refined exceptional set where
/// `[C(A, x0 - Pi w0)  Pi_2]` loses row rank, `Pi_2` taken at depth `l`.
/// A member is always also an [`in_e1`] member.
///
/// For `l >= n` the set is exact: data from a member is never informative.
/// For `l < n` only directions in the row space of `O_l(C, A)` matter, so the
/// set is an outer bound and some members still yield informative data.
pub fn in_e2(
    plant: &LtiSystem,
    analysis: &InterconnectionAnalysis,
    x0: &Vector,
    l: usize,
) -> Result<ExceptionalTest> {
    if analysis.n_g() < l {
        return Err(Error::Precondition(format!(
            "refined exceptional set needs N_g >= L, got N_g = {} < {l}",
            analysis.n_g()
        )));
    }
    let (_, pi2) = analysis.partition(l);
    let kry = offset_krylov(plant, &analysis.offset(x0));
    let mut test = row_rank_test(&numerics::hstack(&[&kry, &pi2]));
    test.member = test.member && row_rank_test(&kry).member;
    Ok(test)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Prediction {
    NeverForAnyX0,
    #[serde(rename = "AlmostAll_X0NotInE2")]
    AlmostAllX0NotInE2,
    AllX0,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremOneVerdict {
    pub case_label: CaseLabel,
    pub informative_prediction: Prediction,
    /// Evaluated in cases B and C.
    pub e2_member: Option<ExceptionalTest>,
    /// `T >= N_g + n + L - 1`; always true in continuous time.
    pub t_sufficient: bool,
}

impl TheoremOneVerdict {
    /// Informativity implied for the concrete `x0`, or `None` when the data
    /// length is below the guaranteed bound in cases B and C.
    pub fn predicts_informative(&self) -> Option<bool> {
        match self.case_label {
            CaseLabel::A => Some(false),
            _ if !self.t_sufficient => None,
            CaseLabel::B => self.e2_member.map(|e| !e.member),
            CaseLabel::C => Some(true),
        }
    }
}

pub fn generator_case(n_g: usize, l: usize, n: usize) -> CaseLabel {
    if n_g < l {
        CaseLabel::A
    } else if n_g < l + n {
        CaseLabel::B
    } else {
        CaseLabel::C
    }
}

pub(crate) fn classify(
    plant: &LtiSystem,
    gen: &SignalGenerator,
    x0: &Vector,
    l: usize,
    t_len: Option<usize>,
) -> Result<TheoremOneVerdict> {
    check_pair(plant, gen)?;
    if l == 0 {
        return Err(Error::Precondition("depth L must be at least 1".into()));
    }
    if let Some(a) = check_assumptions(gen, Some(plant)).first_violation() {
        return Err(Error::Assumption(a));
    }
    let (n, n_g) = (plant.order(), gen.dim());
    let case_label = generator_case(n_g, l, n);
    let t_sufficient = t_len.is_none_or(|t| t + 1 >= n_g + n + l);
    let informative_prediction = match case_label {
        CaseLabel::A => Prediction::NeverForAnyX0,
        CaseLabel::B => Prediction::AlmostAllX0NotInE2,
        CaseLabel::C => Prediction::AllX0,
    };
    let e2_member = match case_label {
        CaseLabel::A => None,
        _ => {
            let analysis = analyze(plant, gen, x0, l)?;
            Some(in_e2(plant, &analysis, x0, l)?)
        }
    };
    Ok(TheoremOneVerdict {
        case_label,
        informative_prediction,
        e2_member,
        t_sufficient,
    })
}

/// Case split on `N_g` against `L` and `L + n` for discrete-time data of length `t_len`.
pub fn classify_theorem1(
    plant: &LtiSystem,
    gen: &SignalGenerator,
    x0: &Vector,
    l: usize,
    t_len: usize,
) -> Result<TheoremOneVerdict> {
    classify(plant, gen, x0, l, Some(t_len))
}

/// The interconnection as a single autonomous system with state `[w; xbar]`
/// and two outputs `[u; y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BigGenerator {
    /// `blockdiag(S_g, A)`.
    pub s: Matrix,
    /// `[[L_g, 0], [M_g, C]]`.
    pub l: Matrix,
    pub w0: Vector,
}

impl BigGenerator {
    /// `(u, y)` over `t_len` steps (discrete time).
    pub fn outputs(&self, t_len: usize) -> (Vec<f64>, Vec<f64>) {
        let mut w = self.w0.clone();
        let mut u = Vec::with_capacity(t_len);
        let mut y = Vec::with_capacity(t_len);
        for _ in 0..t_len {
            let out = &self.l * &w;
            u.push(out[0]);
            y.push(out[1]);
            w = &self.s * &w;
        }
        (u, y)
    }

    pub fn is_observable(&self) -> bool {
        let n = self.s.nrows();
        numerics::rank(&obsv(&self.l, &self.s, n)) == n
    }

    pub fn is_excited(&self) -> bool {
        let n = self.s.nrows();
        numerics::rank(&krylov(
            &self.s,
            &Matrix::from_column_slice(n, 1, self.w0.as_slice()),
            n,
        )) == n
    }
}

pub fn big_generator(
    plant: &LtiSystem,
    gen: &SignalGenerator,
    analysis: &InterconnectionAnalysis,
) -> BigGenerator {
    let (n, n_g) = (plant.order(), gen.dim());
    let mut l = Matrix::zeros(2, n_g + n);
    l.view_mut((0, 0), (1, n_g)).copy_from(gen.l_g());
    l.view_mut((1, 0), (1, n_g)).copy_from(&analysis.m_g);
    l.view_mut((1, n_g), (1, n)).copy_from(plant.c());
    let mut w0 = Vector::zeros(n_g + n);
    w0.rows_mut(0, n_g).copy_from(gen.w0());
    w0.rows_mut(n_g, n).copy_from(&analysis.x_bar0);
    BigGenerator {
        s: numerics::block_diag(gen.s_g(), plant.a()),
        l,
        w0,
    }
}

/// Orthonormal basis of an `A`-invariant subspace of dimension `n - m'`, where
/// `m' >= m` is the smallest size of a leading real-Schur block of `A^T` that
/// does not split a complex-conjugate pair.
pub fn invariant_complement(a: &Matrix, m: usize) -> Matrix {
    let n = a.nrows();
    if m >= n {
        return Matrix::zeros(n, 0);
    }
    let (q, t) = Schur::new(a.transpose()).unpack();
    let scale = numerics::max_abs(&t).max(1.0);
    let mut m = m;
    if m > 0 && t[(m, m - 1)].abs() > 1e-12 * scale {
        m += 1;
    }
    q.columns(m, n - m).into_owned()
}

/// Random `x0` inside the refined exceptional set of a case-B pair.
///
/// Picks an `A^T`-invariant subspace `W` of dimension at least
/// `N_g - L + 1`; then `W` meets the orthogonal complement of `im(Pi_2)`
/// nontrivially, and any `xbar0` orthogonal to `W` has its whole Krylov space
/// orthogonal to a common vector of that intersection.
pub fn construct_e2_member<R: Rng + ?Sized>(
    plant: &LtiSystem,
    gen: &SignalGenerator,
    l: usize,
    rng: &mut R,
) -> Result<Vector> {
    let (n, n_g) = (plant.order(), gen.dim());
    if generator_case(n_g, l, n) != CaseLabel::B {
        return Err(Error::Precondition(format!(
            "exceptional-set construction needs L <= N_g < L + n, got N_g = {n_g}, L = {l}, n = {n}"
        )));
    }
    let pi = solve_sylvester(plant, gen)?;
    let basis = invariant_complement(plant.a(), n_g - l + 1);
    let anchor = &pi * gen.w0();
    let x_bar0 = scaled_offset(&basis, anchor.norm(), rng);
    Ok(anchor + x_bar0)
}

/// Random direction in the span of `basis` with norm `max(1, reference)`.
///
/// Membership tests recompute the offset as `x0 - Pi w0`, which carries an
/// absolute error of order `eps * |Pi w0|`; an offset much shorter than
/// `Pi w0` would leave the invariant subspace by more than the rank tolerance.
fn scaled_offset<R: Rng + ?Sized>(basis: &Matrix, reference: f64, rng: &mut R) -> Vector {
    if basis.ncols() == 0 {
        return Vector::zeros(basis.nrows());
    }
    let mut coeffs = lti::random_vector(basis.ncols(), rng);
    while coeffs.norm() == 0.0 {
        coeffs = lti::random_vector(basis.ncols(), rng);
    }
    basis * coeffs.normalize() * reference.max(1.0)
}

/// Random `x0` whose offset `x0 - Pi w0` lies in an `A`-invariant subspace of
/// dimension `n_c` (or `n_c - 1` to keep a complex pair together), so that
/// `rank C(A, xbar0) <= n_c`.
pub fn offset_in_invariant_subspace<R: Rng + ?Sized>(
    plant: &LtiSystem,
    pi: &Matrix,
    w0: &Vector,
    n_c: usize,
    rng: &mut R,
) -> Vector {
    let n = plant.order();
    let basis = invariant_complement(plant.a(), n - n_c.min(n));
    let anchor = pi * w0;
    let x_bar0 = scaled_offset(&basis, anchor.norm(), rng);
    anchor + x_bar0
}

/// The three integers in `rank(H) = rank(L_L) - dim(im(L_L^T) cap ker(R^T))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankBookkeeping {
    pub rank_h: usize,
    pub rank_ll: usize,
    pub intersection_dim: usize,
}

impl RankBookkeeping {
    pub fn balanced(&self) -> bool {
        self.rank_ll >= self.intersection_dim && self.rank_h == self.rank_ll - self.intersection_dim
    }
}

/// Principal-angle cosines above `1 - angle_tol` count toward the intersection.
pub fn rank_bookkeeping(h: &Matrix, ll: &Matrix, r: &Matrix, angle_tol: f64) -> RankBookkeeping {
    let row_space = numerics::range_basis(&ll.transpose(), None);
    let left_null = numerics::kernel_basis(&r.transpose(), None);
    RankBookkeeping {
        rank_h: numerics::rank(h),
        rank_ll: row_space.ncols(),
        intersection_dim: numerics::intersection_dim(&row_space, &left_null, angle_tol),
    }
}
