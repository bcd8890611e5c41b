//! Autonomous input generators `w+ = S_g w, u = L_g w` (or `w' = S_g w`).
//!
//! Besides construction and assumption checks this module computes the
//! maximum persistency-of-excitation order of a sequence and realizes a
//! minimal generator from a raw signal via a linear recurrence found in the
//! kernel of its Hankel matrix.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Assumption, Error, Result};
use crate::lti::{krylov, obsv, LtiSystem, TimeDomain};
use crate::numerics::{self, Matrix, Vector};

/// Relative recurrence residual above which a realization is rejected.
const REALIZATION_RESIDUAL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SignalGenerator {
    s_g: Matrix,
    l_g: Matrix,
    w0: Vector,
    domain: TimeDomain,
}

impl SignalGenerator {
    /// `s_g` is `N x N`, `l_g` is `1 x N`, `w0` has length `N >= 1`.
    pub fn new(s_g: Matrix, l_g: Matrix, w0: Vector, domain: TimeDomain) -> Result<Self> {
        let n = s_g.nrows();
        if n == 0 || !s_g.is_square() {
            return Err(Error::Dimension(format!(
                "S_g must be square with N_g >= 1, got {:?}",
                s_g.shape()
            )));
        }
        if l_g.shape() != (1, n) {
            return Err(Error::Dimension(format!(
                "L_g must be 1x{n}, got {:?}",
                l_g.shape()
            )));
        }
        if w0.len() != n {
            return Err(Error::Dimension(format!(
                "w0 must have length {n}, got {}",
                w0.len()
            )));
        }
        if !s_g
            .iter()
            .chain(l_g.iter())
            .chain(w0.iter())
            .all(|x| x.is_finite())
        {
            return Err(Error::Precondition(
                "generator entries must be finite".into(),
            ));
        }
        Ok(Self {
            s_g,
            l_g,
            w0,
            domain,
        })
    }

    pub fn s_g(&self) -> &Matrix {
        &self.s_g
    }
    pub fn l_g(&self) -> &Matrix {
        &self.l_g
    }
    pub fn w0(&self) -> &Vector {
        &self.w0
    }
    pub fn domain(&self) -> TimeDomain {
        self.domain
    }
    pub fn dim(&self) -> usize {
        self.s_g.nrows()
    }

    pub fn with_w0(&self, w0: Vector) -> Result<Self> {
        Self::new(self.s_g.clone(), self.l_g.clone(), w0, self.domain)
    }

    /// `O_k(L_g, S_g)`.
    pub fn observability(&self, k: usize) -> Matrix {
        obsv(&self.l_g, &self.s_g, k)
    }

    /// `C_k(S_g, w0)`.
    pub fn excitation(&self, k: usize) -> Matrix {
        krylov(&self.s_g, &self.w0_column(), k)
    }

    pub(crate) fn w0_column(&self) -> Matrix {
        Matrix::from_column_slice(self.dim(), 1, self.w0.as_slice())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectraCheck {
    pub disjoint: bool,
    /// `min |lambda - mu|` over plant eigenvalues `lambda` and generator eigenvalues `mu`.
    pub min_gap: f64,
    pub gap_tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub obs_lg_sg: bool,
    pub ctrb_sg_w0: bool,
    /// Present only when a plant was supplied.
    pub spectra_disjoint: Option<SpectraCheck>,
}

impl AssumptionReport {
    /// First failing assumption, if any.
    pub fn first_violation(&self) -> Option<Assumption> {
        if !self.obs_lg_sg {
            Some(Assumption::GeneratorObservable)
        } else if !self.ctrb_sg_w0 {
            Some(Assumption::GeneratorExcited)
        } else if self.spectra_disjoint.is_some_and(|s| !s.disjoint) {
            Some(Assumption::DisjointSpectra)
        } else {
            None
        }
    }

    pub fn all_hold(&self) -> bool {
        self.first_violation().is_none()
    }
}

/// Eigenvalue pairs closer than `1e-8 * (1 + max spectral radius)` count as
/// shared.
pub fn spectra_check(a: &Matrix, s_g: &Matrix) -> SpectraCheck {
    let la = a.complex_eigenvalues();
    let ls = s_g.complex_eigenvalues();
    let radius = la
        .iter()
        .chain(ls.iter())
        .fold(0.0_f64, |acc, z| acc.max(z.norm()));
    let gap_tolerance = 1e-8 * (1.0 + radius);
    let min_gap = la
        .iter()
        .flat_map(|l| ls.iter().map(move |m| (l - m).norm()))
        .fold(f64::INFINITY, f64::min);
    SpectraCheck {
        disjoint: min_gap > gap_tolerance,
        min_gap,
        gap_tolerance,
    }
}

pub fn check_assumptions(gen: &SignalGenerator, plant: Option<&LtiSystem>) -> AssumptionReport {
    let n = gen.dim();
    AssumptionReport {
        obs_lg_sg: numerics::rank(&gen.observability(n)) == n,
        ctrb_sg_w0: numerics::rank(&gen.excitation(n)) == n,
        spectra_disjoint: plant.map(|p| spectra_check(p.a(), gen.s_g())),
    }
}

/// `u(t) = L_g S_g^t w0` for `t = 0..t_len`, by state recursion.
pub fn response(gen: &SignalGenerator, t_len: usize) -> Result<Vec<f64>> {
    if gen.domain != TimeDomain::Discrete {
        return Err(Error::Precondition(
            "sampled response needs a discrete-time generator".into(),
        ));
    }
    let l = gen.l_g.row(0);
    let mut w = gen.w0.clone();
    let mut u = Vec::with_capacity(t_len);
    for _ in 0..t_len {
        u.push(l.dot(&w.transpose()));
        w = &gen.s_g * &w;
    }
    Ok(u)
}

/// Frequencies, amplitudes and phases of a sum of sinusoids plus optional bias.
///
/// Amplitudes default to one and phases to zero. With `bias`, the bias level
/// is the last entry of `amplitudes` (default one).
#[derive(Debug, Clone, Default)]
pub struct Multisine {
    pub freqs: Vec<f64>,
    pub bias: bool,
    pub amplitudes: Option<Vec<f64>>,
    pub phases: Option<Vec<f64>>,
}

impl Multisine {
    pub fn new(freqs: Vec<f64>, bias: bool) -> Self {
        Self {
            freqs,
            bias,
            ..Default::default()
        }
    }
}

/// Block-diagonal generator of `2 * |freqs| (+1)` states whose first block
/// coordinates sum to `sum_k a_k cos(w_k t + phi_k) (+ bias)`.
///
/// Discrete-time frequencies are angles in `(0, pi)`; continuous-time ones are
/// positive angular rates.
pub fn multisine_generator(spec: &Multisine, domain: TimeDomain) -> Result<SignalGenerator> {
    let nf = spec.freqs.len();
    let n_g = 2 * nf + usize::from(spec.bias);
    if n_g == 0 {
        return Err(Error::Precondition(
            "multisine needs a frequency or a bias".into(),
        ));
    }
    for (i, &f) in spec.freqs.iter().enumerate() {
        let in_range = match domain {
            TimeDomain::Discrete => f > 0.0 && f < PI,
            TimeDomain::Continuous => f > 0.0 && f.is_finite(),
        };
        if !in_range {
            return Err(Error::Precondition(format!("frequency {f} out of range")));
        }
        if spec.freqs[..i]
            .iter()
            .any(|&g| (g - f).abs() <= f64::EPSILON * f.abs().max(1.0))
        {
            return Err(Error::Precondition(format!("duplicate frequency {f}")));
        }
    }
    let amps = match &spec.amplitudes {
        Some(a) if a.len() != nf + usize::from(spec.bias) => {
            return Err(Error::Dimension(format!(
                "expected {} amplitudes, got {}",
                nf + usize::from(spec.bias),
                a.len()
            )))
        }
        Some(a) => a.clone(),
        None => vec![1.0; nf + usize::from(spec.bias)],
    };
    let phases = match &spec.phases {
        Some(p) if p.len() != nf => {
            return Err(Error::Dimension(format!(
                "expected {nf} phases, got {}",
                p.len()
            )))
        }
        Some(p) => p.clone(),
        None => vec![0.0; nf],
    };
    if amps.iter().any(|&a| a == 0.0 || !a.is_finite()) {
        return Err(Error::Precondition(
            "amplitudes must be nonzero and finite".into(),
        ));
    }

    let mut s_g = Matrix::zeros(n_g, n_g);
    let mut l_g = Matrix::zeros(1, n_g);
    let mut w0 = Vector::zeros(n_g);
    for (k, &f) in spec.freqs.iter().enumerate() {
        let i = 2 * k;
        let (p, q) = match domain {
            TimeDomain::Discrete => (f.cos(), f.sin()),
            TimeDomain::Continuous => (0.0, f),
        };
        s_g[(i, i)] = p;
        s_g[(i, i + 1)] = q;
        s_g[(i + 1, i)] = -q;
        s_g[(i + 1, i + 1)] = p;
        l_g[(0, i)] = 1.0;
        w0[i] = amps[k] * phases[k].cos();
        w0[i + 1] = -amps[k] * phases[k].sin();
    }
    if spec.bias {
        let i = n_g - 1;
        s_g[(i, i)] = match domain {
            TimeDomain::Discrete => 1.0,
            TimeDomain::Continuous => 0.0,
        };
        l_g[(0, i)] = 1.0;
        w0[i] = amps[nf];
    }
    SignalGenerator::new(s_g, l_g, w0, domain)
}

/// Random multisine generator of dimension `n_g`: `n_g / 2` frequencies plus a
/// bias when `n_g` is odd, with random amplitudes in `[0.5, 1.5]` and phases.
///
/// Discrete-time frequencies are drawn in `(0, pi)` keeping at least
/// `0.5 * pi / (n_g + 1)` apart from each other and from `0` and `pi`.
/// Continuous-time frequencies are drawn in `[1, 10]` rad/s with the same
/// relative spacing.
pub fn random_multisine<R: Rng + ?Sized>(
    n_g: usize,
    domain: TimeDomain,
    rng: &mut R,
) -> Result<SignalGenerator> {
    if n_g == 0 {
        return Err(Error::Precondition(
            "generator dimension must be at least 1".into(),
        ));
    }
    let nf = n_g / 2;
    let bias = n_g % 2 == 1;
    let (lo, hi) = match domain {
        TimeDomain::Discrete => (0.0, PI),
        TimeDomain::Continuous => (1.0, 10.0),
    };
    let sep = 0.5 * (hi - lo) / (n_g as f64 + 1.0);
    let mut freqs = Vec::with_capacity(nf);
    let mut attempts = 0;
    while freqs.len() < nf {
        attempts += 1;
        if attempts > crate::lti::REJECTION_CAP {
            return Err(Error::RejectionCap(crate::lti::REJECTION_CAP));
        }
        let f = rng.random_range(lo + sep..hi - sep);
        if freqs.iter().all(|&g: &f64| (g - f).abs() >= sep) {
            freqs.push(f);
        }
    }
    let amplitudes = (0..nf + usize::from(bias))
        .map(|_| rng.random_range(0.5..1.5))
        .collect();
    let phases = (0..nf).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
    multisine_generator(
        &Multisine {
            freqs,
            bias,
            amplitudes: Some(amplitudes),
            phases: Some(phases),
        },
        domain,
    )
}

/// Random generator `(S_g, L_g, w0)` with i.i.d. standard-normal entries,
/// resampled until observable and excited. No spectral normalisation.
pub fn random_dense_generator<R: Rng + ?Sized>(
    n_g: usize,
    domain: TimeDomain,
    rng: &mut R,
) -> Result<SignalGenerator> {
    for _ in 0..crate::lti::REJECTION_CAP {
        let s_g = crate::lti::random_matrix(n_g, n_g, rng);
        let l_g = crate::lti::random_matrix(1, n_g, rng);
        let w0 = Vector::from_fn(n_g, |_, _| rng.sample(StandardNormal));
        let gen = SignalGenerator::new(s_g, l_g, w0, domain)?;
        if check_assumptions(&gen, None).all_hold() {
            return Ok(gen);
        }
    }
    Err(Error::RejectionCap(crate::lti::REJECTION_CAP))
}

/// Hankel matrix with `k` rows and `len - k + 1` columns (possibly zero).
pub(crate) fn hankel(u: &[f64], k: usize) -> Matrix {
    let cols = (u.len() + 1).saturating_sub(k);
    Matrix::from_fn(k, cols, |i, j| u[i + j])
}

/// Depth-`k` Hankel matrix `k x (T - k + 1)` of `u`.
pub fn signal_hankel(u: &[f64], k: usize) -> Result<Matrix> {
    if k > u.len() {
        return Err(Error::Precondition(format!(
            "Hankel depth {k} exceeds signal length {}",
            u.len()
        )));
    }
    Ok(hankel(u, k))
}

/// Largest `K` such that the depth-`K` Hankel matrix has full row rank.
///
/// Scans upward from one and stops at the first failure: a sequence that is
/// not persistently exciting of some order is not of any higher order.
pub fn max_pe_order(u: &[f64]) -> usize {
    let t = u.len();
    let mut k = 0;
    while k < t - k {
        // depth k+1 has t-k columns
        if numerics::rank(&hankel(u, k + 1)) < k + 1 {
            break;
        }
        k += 1;
    }
    k
}

/// `rank(H_K(u[0..T-1])) == rank(H_{K+1}(u[0..T]))`.
pub fn recurrence_rank_condition(u: &[f64], k: usize) -> bool {
    if u.is_empty() {
        return false;
    }
    let head = &u[..u.len() - 1];
    numerics::rank(&hankel(head, k)) == numerics::rank(&hankel(u, k + 1))
}

/// Bottom-companion matrix: ones on the superdiagonal and last row `-xi`,
/// the characteristic polynomial being `z^K + xi_(K-1) z^(K-1) + ... + xi_0`.
pub fn companion(xi: &[f64]) -> Matrix {
    let k = xi.len();
    let mut s = Matrix::zeros(k, k);
    for i in 0..k.saturating_sub(1) {
        s[(i, i + 1)] = 1.0;
    }
    if k > 0 {
        for (j, &x) in xi.iter().enumerate() {
            s[(k - 1, j)] = -x;
        }
    }
    s
}

/// Realizes a discrete-time generator reproducing `u`.
///
/// The order defaults to [`max_pe_order`]. The recurrence coefficients `xi`
/// solve `-xi^T H_K(u[0..T-1]) = u[K..T]` in the least-squares sense; the
/// generator is the companion matrix of that recurrence with `L_g = e_1^T`, so
/// `O_K(L_g, S_g) = I` and `w0 = u[0..K]`.
pub fn realize_from_signal(u: &[f64], k: Option<usize>) -> Result<SignalGenerator> {
    if u.is_empty() {
        return Err(Error::Precondition("signal is empty".into()));
    }
    realize_at(u, k.unwrap_or_else(|| max_pe_order(u)))
}

fn realize_at(u: &[f64], k: usize) -> Result<SignalGenerator> {
    let t = u.len();
    if k == 0 {
        return Err(Error::NotRepresentable {
            order: 0,
            reason: "signal has no persistency of excitation".into(),
        });
    }
    if t + 1 < 2 * k {
        return Err(Error::Precondition(format!(
            "length {t} is shorter than 2K-1 = {}",
            2 * k - 1
        )));
    }

    let head = hankel(&u[..t - 1], k); // k x (t - k)
    let rhs = Vector::from_iterator(t - k, u[k..].iter().map(|&x| -x));
    let xi = if t > k {
        // Each equation is scaled by the size of its window so that early
        // samples of a growing signal weigh as much as late ones.
        let weights: Vec<f64> = (0..t - k)
            .map(|j| {
                let m = u[j..=j + k].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
                if m > 0.0 {
                    1.0 / m
                } else {
                    1.0
                }
            })
            .collect();
        let mut lhs = head.transpose();
        let mut b = rhs.clone();
        for (j, w) in weights.iter().enumerate() {
            lhs.row_mut(j).scale_mut(*w);
            b[j] *= w;
        }
        numerics::lstsq(&lhs, &b, None)
    } else {
        Vector::zeros(k)
    };

    // The rank condition says the last Hankel row lies in the span of the
    // others, i.e. the recurrence is consistent. It is judged by the backward
    // error: comparing two numerical ranks flips on rounding-level singular
    // values. Forward regeneration is not used either, since a companion
    // matrix with large coefficients amplifies rounding at every step.
    let scale = u
        .iter()
        .fold(0.0_f64, |m, x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let residual = if t > k {
        (head.transpose() * &xi - &rhs).amax() / scale
    } else {
        0.0
    };
    if residual > REALIZATION_RESIDUAL {
        return Err(Error::NotRepresentable {
            order: k,
            reason: format!(
                "Hankel rank grows with depth; no order-K recurrence (residual {residual:.3e})"
            ),
        });
    }

    let s_g = companion(xi.as_slice());
    let mut l_g = Matrix::zeros(1, k);
    l_g[(0, 0)] = 1.0;
    let w0 = Vector::from_column_slice(&u[..k]);
    let gen = SignalGenerator::new(s_g, l_g, w0, TimeDomain::Discrete)?;
    Ok(gen)
}

/// `max |a - b| / max(max |b|, tiny)`.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let scale = b
        .iter()
        .fold(0.0_f64, |m, x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    a.iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
        / scale
}

/// Checks both clauses of the recurrence characterization for the response of
/// `gen` over `t_len` samples: maximum PE order equals `N_g` and the depth-`N_g`
/// Hankel rank of the truncated signal equals the depth-`(N_g+1)` rank.
pub fn lemma1_equivalence_check(gen: &SignalGenerator, t_len: usize) -> Result<bool> {
    if let Some(a) = check_assumptions(gen, None).first_violation() {
        return Err(Error::Assumption(a));
    }
    let n_g = gen.dim();
    if t_len + 1 < 2 * n_g {
        return Err(Error::Precondition(format!(
            "t_len {t_len} is shorter than 2 N_g - 1 = {}",
            2 * n_g - 1
        )));
    }
    let u = response(gen, t_len)?;
    Ok(max_pe_order(&u) == n_g && recurrence_rank_condition(&u, n_g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rotation() -> SignalGenerator {
        SignalGenerator::new(
            Matrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
            Matrix::from_row_slice(1, 2, &[1.0, 0.0]),
            Vector::from_vec(vec![1.0, 0.0]),
            TimeDomain::Discrete,
        )
        .unwrap()
    }

    fn constant() -> SignalGenerator {
        SignalGenerator::new(
            Matrix::from_element(1, 1, 1.0),
            Matrix::from_element(1, 1, 1.0),
            Vector::from_element(1, 1.0),
            TimeDomain::Discrete,
        )
        .unwrap()
    }

    #[test]
    fn rotation_satisfies_assumptions() {
        let r = check_assumptions(&rotation(), None);
        assert!(r.obs_lg_sg && r.ctrb_sg_w0 && r.spectra_disjoint.is_none());
    }

    #[test]
    fn zero_output_map_breaks_observability() {
        let g = rotation();
        let g = SignalGenerator::new(g.s_g.clone(), Matrix::zeros(1, 2), g.w0.clone(), g.domain)
            .unwrap();
        assert_eq!(
            check_assumptions(&g, None).first_violation(),
            Some(Assumption::GeneratorObservable)
        );
    }

    #[test]
    fn zero_initial_state_breaks_excitation() {
        let g = rotation().with_w0(Vector::zeros(2)).unwrap();
        let r = check_assumptions(&g, None);
        assert!(r.obs_lg_sg && !r.ctrb_sg_w0);
    }

    #[test]
    fn spectra_check_with_plant() {
        let plant = LtiSystem::new(
            Matrix::from_element(1, 1, 1.0),
            Matrix::from_element(1, 1, 1.0),
            Matrix::from_element(1, 1, 1.0),
            0.0,
            TimeDomain::Discrete,
        )
        .unwrap();
        let r = check_assumptions(&constant(), Some(&plant));
        assert_eq!(r.first_violation(), Some(Assumption::DisjointSpectra));
        let r = check_assumptions(&rotation(), Some(&plant));
        let s = r.spectra_disjoint.unwrap();
        assert!(s.disjoint);
        assert!((s.min_gap - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn responses() {
        assert_eq!(response(&constant(), 4).unwrap(), vec![1.0; 4]);
        assert_eq!(
            response(&rotation(), 5).unwrap(),
            vec![1.0, 0.0, -1.0, 0.0, 1.0]
        );
        // z^2 - 1: u(t) = u(t - 2).
        let g = SignalGenerator::new(
            companion(&[-1.0, 0.0]),
            Matrix::from_row_slice(1, 2, &[1.0, 0.0]),
            Vector::from_vec(vec![2.0, -3.0]),
            TimeDomain::Discrete,
        )
        .unwrap();
        assert_eq!(
            response(&g, 6).unwrap(),
            vec![2.0, -3.0, 2.0, -3.0, 2.0, -3.0]
        );
    }

    #[test]
    fn multisine_single_quarter_turn() {
        let g = multisine_generator(&Multisine::new(vec![PI / 2.0], false), TimeDomain::Discrete)
            .unwrap();
        assert_eq!(g.dim(), 2);
        assert!((g.s_g() - rotation().s_g()).amax() < 1e-15);
        let u = response(&g, 5).unwrap();
        for (a, b) in u.iter().zip([1.0, 0.0, -1.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn multisine_two_frequencies_with_bias() {
        let g = multisine_generator(&Multisine::new(vec![0.7, 1.9], true), TimeDomain::Discrete)
            .unwrap();
        assert_eq!(g.dim(), 5);
        assert!(check_assumptions(&g, None).all_hold());
        assert_eq!(max_pe_order(&response(&g, 9).unwrap()), 5);
    }

    #[test]
    fn multisine_phase_and_amplitude() {
        let spec = Multisine {
            freqs: vec![0.3],
            bias: true,
            amplitudes: Some(vec![2.0, 0.5]),
            phases: Some(vec![0.4]),
        };
        let u = response(
            &multisine_generator(&spec, TimeDomain::Discrete).unwrap(),
            6,
        )
        .unwrap();
        for (t, ut) in u.iter().enumerate() {
            let expect = 2.0 * (0.3 * t as f64 + 0.4).cos() + 0.5;
            assert!((ut - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn multisine_rejects_bad_frequencies() {
        let dt = TimeDomain::Discrete;
        assert!(multisine_generator(&Multisine::new(vec![1.0, 1.0], false), dt).is_err());
        assert!(multisine_generator(&Multisine::new(vec![0.0], false), dt).is_err());
        assert!(multisine_generator(&Multisine::new(vec![PI], false), dt).is_err());
        assert!(multisine_generator(&Multisine::new(vec![], false), dt).is_err());
    }

    #[test]
    fn pe_order_examples() {
        assert_eq!(max_pe_order(&[0.0, 0.0, 0.0]), 0);
        assert_eq!(max_pe_order(&[1.0, 0.0, -1.0, 0.0, 1.0]), 2);
        assert_eq!(max_pe_order(&[3.0]), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u: Vec<f64> = (0..7).map(|_| rng.sample(StandardNormal)).collect();
        assert_eq!(max_pe_order(&u), 4);
    }

    #[test]
    fn hankel_examples() {
        assert_eq!(
            signal_hankel(&[1.0, 2.0, 3.0], 2).unwrap(),
            Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 3.0])
        );
        assert_eq!(
            signal_hankel(&[1.0, 2.0, 3.0], 1).unwrap(),
            Matrix::from_row_slice(1, 3, &[1.0, 2.0, 3.0])
        );
        assert!(signal_hankel(&[1.0, 2.0], 3).is_err());
    }

    #[test]
    fn realize_constant() {
        let g = realize_from_signal(&[1.0; 5], None).unwrap();
        assert_eq!(g.dim(), 1);
        assert!((g.s_g()[(0, 0)] - 1.0).abs() < 1e-12);
        assert_eq!(g.w0()[0], 1.0);
    }

    #[test]
    fn realize_alternating_quarter_wave() {
        let u = [1.0, 0.0, -1.0, 0.0, 1.0];
        let g = realize_from_signal(&u, None).unwrap();
        assert_eq!(g.dim(), 2);
        // companion of z^2 + 1
        let expect = companion(&[1.0, 0.0]);
        assert!((g.s_g() - expect).amax() < 1e-12);
        assert!(relative_error(&response(&g, 5).unwrap(), &u) < 1e-12);
    }

    #[test]
    fn realize_rejects_zero_and_growing_rank() {
        assert!(matches!(
            realize_from_signal(&[0.0, 0.0], None),
            Err(Error::NotRepresentable { order: 0, .. })
        ));
        // PE order 2, but the depth-2 rank of the head is 1 while depth 3 reaches 2.
        let u = [1.0, 1.0, 1.0, 1.0, 2.0];
        assert_eq!(max_pe_order(&u), 2);
        assert!(matches!(
            realize_from_signal(&u, None),
            Err(Error::NotRepresentable { order: 2, .. })
        ));
        // An impulse is generated by the nilpotent S_g = 0.
        let g = realize_from_signal(&[1.0, 0.0, 0.0, 0.0, 0.0], Some(1)).unwrap();
        assert_eq!(g.s_g()[(0, 0)], 0.0);
    }

    #[test]
    fn realize_single_sample() {
        let g = realize_from_signal(&[2.5], None).unwrap();
        assert_eq!(g.dim(), 1);
        assert_eq!(response(&g, 1).unwrap(), vec![2.5]);
    }

    #[test]
    fn lemma1_check_examples() {
        assert!(lemma1_equivalence_check(&rotation(), 5).unwrap());
        assert!(lemma1_equivalence_check(&constant(), 3).unwrap());
        let dead = rotation().with_w0(Vector::zeros(2)).unwrap();
        assert!(matches!(
            lemma1_equivalence_check(&dead, 5),
            Err(Error::Assumption(Assumption::GeneratorExcited))
        ));
        assert!(matches!(
            lemma1_equivalence_check(&rotation(), 2),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn random_generators_pass_assumptions() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n_g in 1..=7 {
            let g = random_multisine(n_g, TimeDomain::Discrete, &mut rng).unwrap();
            assert_eq!(g.dim(), n_g);
            assert!(check_assumptions(&g, None).all_hold());
            let g = random_dense_generator(n_g, TimeDomain::Discrete, &mut rng).unwrap();
            assert!(check_assumptions(&g, None).all_hold());
        }
    }
}
