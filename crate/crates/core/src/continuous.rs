//! Continuous-time interconnections observed through jets.
//!
//! Along `w' = S_g w`, `u = L_g w` feeding `x' = A x + B u`, the derivatives
//! are `u^(l) = L_g S_g^l w(t)` and `y^(l) = M_g S_g^l w(t) + C A^l xbar(t)`
//! with `w(t) = exp(S_g t) w(0)` and `xbar(t) = exp(A t) xbar(0)`. Stacking
//! `(L-1)`-jets at `k` time instants gives a `2L x k` matrix that plays the
//! role of the Hankel matrix.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::informativity::InformativityVerdict;
use crate::interconnection::{classify, InterconnectionAnalysis, TheoremOneVerdict};
use crate::lti::{behavior_dimension, obsv, LtiSystem, TimeDomain};
use crate::numerics::{self, Matrix, Vector};
use crate::siggen::SignalGenerator;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JetSample {
    pub time: f64,
    /// `u(t), u'(t), ..., u^(L-1)(t)`.
    pub u_jet: Vec<f64>,
    pub y_jet: Vec<f64>,
}

impl JetSample {
    pub fn depth(&self) -> usize {
        self.u_jet.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CtHankel {
    pub matrix: Matrix,
    pub sample_times: Vec<f64>,
}

fn require_ct(plant: &LtiSystem, gen: &SignalGenerator) -> Result<()> {
    if plant.domain() != TimeDomain::Continuous || gen.domain() != TimeDomain::Continuous {
        return Err(Error::Precondition(
            "jets need a continuous-time plant and generator".into(),
        ));
    }
    Ok(())
}

/// `exp(S_g t) w(0)` and `exp(A t) xbar(0)`.
pub fn ct_states(
    plant: &LtiSystem,
    gen: &SignalGenerator,
    analysis: &InterconnectionAnalysis,
    t: f64,
) -> (Vector, Vector) {
    let w = (gen.s_g() * t).exp() * &analysis.w0;
    let xbar = (plant.a() * t).exp() * &analysis.x_bar0;
    (w, xbar)
}

pub fn ct_jet(
    plant: &LtiSystem,
    gen: &SignalGenerator,
    analysis: &InterconnectionAnalysis,
    t: f64,
    l: usize,
) -> Result<JetSample> {
    require_ct(plant, gen)?;
    if l == 0 {
        return Err(Error::Precondition("jet depth must be at least 1".into()));
    }
    let (w, xbar) = ct_states(plant, gen, analysis, t);
    let u = gen.observability(l) * &w;
    let y = obsv(&analysis.m_g, gen.s_g(), l) * &w + obsv(plant.c(), plant.a(), l) * &xbar;
    Ok(JetSample {
        time: t,
        u_jet: u.as_slice().to_vec(),
        y_jet: y.as_slice().to_vec(),
    })
}

pub fn ct_jets(
    plant: &LtiSystem,
    gen: &SignalGenerator,
    analysis: &InterconnectionAnalysis,
    times: &[f64],
    l: usize,
) -> Result<Vec<JetSample>> {
    times
        .iter()
        .map(|&t| ct_jet(plant, gen, analysis, t, l))
        .collect()
}

pub fn ct_hankel(samples: &[JetSample]) -> Result<CtHankel> {
    let first = samples
        .first()
        .ok_or_else(|| Error::Precondition("at least one jet sample is needed".into()))?;
    let l = first.depth();
    if l == 0 {
        return Err(Error::Precondition(
            "jets must have depth at least 1".into(),
        ));
    }
    if let Some(bad) = samples
        .iter()
        .find(|s| s.u_jet.len() != l || s.y_jet.len() != l)
    {
        return Err(Error::Dimension(format!(
            "jet at t = {} has lengths ({}, {}), expected {l}",
            bad.time,
            bad.u_jet.len(),
            bad.y_jet.len()
        )));
    }
    let matrix = Matrix::from_fn(2 * l, samples.len(), |i, j| {
        if i < l {
            samples[j].u_jet[i]
        } else {
            samples[j].y_jet[i - l]
        }
    });
    Ok(CtHankel {
        matrix,
        sample_times: samples.iter().map(|s| s.time).collect(),
    })
}

/// Rank of the jet matrix against `L + rank(O_L(C, A))`. No case label is
/// attached since the samples alone do not reveal the generator dimension.
pub fn ct_is_informative(
    samples: &[JetSample],
    l: usize,
    plant: &LtiSystem,
) -> Result<InformativityVerdict> {
    let h = ct_hankel(samples)?;
    if h.matrix.nrows() != 2 * l {
        return Err(Error::Dimension(format!(
            "jets have depth {}, expected {l}",
            h.matrix.nrows() / 2
        )));
    }
    let report = numerics::numerical_rank(&h.matrix, None);
    Ok(InformativityVerdict::from_rank(
        &report,
        behavior_dimension(plant, l),
        None,
    ))
}

/// Same case split as in discrete time; any positive horizon suffices, so
/// `t_sufficient` is always set.
pub fn classify_theorem2(
    plant: &LtiSystem,
    gen: &SignalGenerator,
    x0: &Vector,
    l: usize,
) -> Result<TheoremOneVerdict> {
    require_ct(plant, gen)?;
    classify(plant, gen, x0, l, None)
}

/// `[w(t_1) ... w(t_k); xbar(t_1) ... xbar(t_k)]`.
pub fn build_r_ct(
    plant: &LtiSystem,
    gen: &SignalGenerator,
    analysis: &InterconnectionAnalysis,
    times: &[f64],
) -> Matrix {
    let (n_g, n) = (gen.dim(), plant.order());
    let mut r = Matrix::zeros(n_g + n, times.len());
    for (j, &t) in times.iter().enumerate() {
        let (w, xbar) = ct_states(plant, gen, analysis, t);
        r.view_mut((0, j), (n_g, 1)).copy_from(&w);
        r.view_mut((n_g, j), (n, 1)).copy_from(&xbar);
    }
    r
}

/// `k` Chebyshev points in `(0, horizon)`, ascending.
pub fn chebyshev_times(k: usize, horizon: f64) -> Vec<f64> {
    (0..k)
        .map(|i| {
            let theta = (2 * i + 1) as f64 * std::f64::consts::PI / (2 * k) as f64;
            0.5 * horizon * (1.0 - theta.cos())
        })
        .collect()
}

/// `k` sorted uniform draws in `(0, horizon)`.
pub fn random_times<R: Rng + ?Sized>(k: usize, horizon: f64, rng: &mut R) -> Vec<f64> {
    let mut t: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..horizon)).collect();
    t.sort_by(f64::total_cmp);
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::informativity::CaseLabel;
    use crate::interconnection::{analyze, build_ll};
    use crate::lti::{random_minimal_system, random_vector};
    use crate::siggen::random_multisine;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar_ct() -> (LtiSystem, SignalGenerator) {
        let plant = LtiSystem::new(
            Matrix::from_element(1, 1, -1.0),
            Matrix::from_element(1, 1, 1.0),
            Matrix::from_element(1, 1, 1.0),
            0.0,
            TimeDomain::Continuous,
        )
        .unwrap();
        let gen = SignalGenerator::new(
            Matrix::zeros(1, 1),
            Matrix::from_element(1, 1, 1.0),
            Vector::from_element(1, 1.0),
            TimeDomain::Continuous,
        )
        .unwrap();
        (plant, gen)
    }

    #[test]
    fn jets_at_time_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let plant = random_minimal_system(2, TimeDomain::Continuous, &mut rng).unwrap();
        let gen = random_multisine(3, TimeDomain::Continuous, &mut rng).unwrap();
        let x0 = random_vector(2, &mut rng);
        let an = analyze(&plant, &gen, &x0, 3).unwrap();
        let jet = ct_jet(&plant, &gen, &an, 0.0, 3).unwrap();
        let u = gen.observability(3) * gen.w0();
        let y = obsv(&an.m_g, gen.s_g(), 3) * gen.w0() + obsv(plant.c(), plant.a(), 3) * &an.x_bar0;
        assert!((Vector::from_vec(jet.u_jet) - u).amax() < 1e-12);
        assert!((Vector::from_vec(jet.y_jet) - y).amax() < 1e-12);
    }

    #[test]
    fn scalar_plant_closed_form() {
        // x' = -x + 1, so Pi = 1, M_g = 1 and y(t) = 1 + (x0 - 1) e^-t
        let (plant, gen) = scalar_ct();
        let x0 = Vector::from_element(1, 3.0);
        let an = analyze(&plant, &gen, &x0, 3).unwrap();
        assert!((an.pi[(0, 0)] - 1.0).abs() < 1e-14);
        assert!((an.m_g[(0, 0)] - 1.0).abs() < 1e-14);
        let t = 0.7;
        let jet = ct_jet(&plant, &gen, &an, t, 3).unwrap();
        let e = 2.0 * (-t).exp();
        assert_eq!(jet.u_jet, vec![1.0, 0.0, 0.0]);
        for (got, want) in jet.y_jet.iter().zip([1.0 + e, -e, e]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn hankel_shapes_and_errors() {
        let s = JetSample {
            time: 0.1,
            u_jet: vec![1.0, 2.0],
            y_jet: vec![3.0, 4.0],
        };
        let h = ct_hankel(std::slice::from_ref(&s)).unwrap();
        assert_eq!(
            h.matrix,
            Matrix::from_column_slice(4, 1, &[1.0, 2.0, 3.0, 4.0])
        );
        let dup = ct_hankel(&[s.clone(), s.clone()]).unwrap();
        assert_eq!(numerics::rank(&dup.matrix), 1);
        let bad = JetSample {
            time: 0.2,
            u_jet: vec![1.0],
            y_jet: vec![1.0],
        };
        assert!(ct_hankel(&[s, bad]).is_err());
        assert!(ct_hankel(&[]).is_err());
    }

    #[test]
    fn factorization_through_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let plant = random_minimal_system(2, TimeDomain::Continuous, &mut rng).unwrap();
        let gen = random_multisine(4, TimeDomain::Continuous, &mut rng).unwrap();
        let x0 = random_vector(2, &mut rng);
        let an = analyze(&plant, &gen, &x0, 3).unwrap();
        let times = chebyshev_times(8, 1.0);
        let h = ct_hankel(&ct_jets(&plant, &gen, &an, &times, 3).unwrap()).unwrap();
        let r = build_r_ct(&plant, &gen, &an, &times);
        let resid = &h.matrix - build_ll(&plant, &gen, &an, 3) * r;
        assert!(numerics::max_abs(&resid) < 1e-9 * numerics::max_abs(&h.matrix).max(1.0));
    }

    #[test]
    fn rotation_generator_on_scalar_plant() {
        let (plant, _) = scalar_ct();
        let gen = SignalGenerator::new(
            Matrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
            Matrix::from_row_slice(1, 2, &[1.0, 0.0]),
            Vector::from_vec(vec![1.0, 0.0]),
            TimeDomain::Continuous,
        )
        .unwrap();
        let x0 = Vector::from_element(1, 0.3);
        let v = classify_theorem2(&plant, &gen, &x0, 1).unwrap();
        assert_eq!(v.case_label, CaseLabel::C);
        assert!(v.t_sufficient);
        let an = analyze(&plant, &gen, &x0, 1).unwrap();
        let jets = ct_jets(&plant, &gen, &an, &chebyshev_times(5, 1.0), 1).unwrap();
        assert!(ct_is_informative(&jets, 1, &plant).unwrap().informative);
    }

    #[test]
    fn discrete_inputs_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let plant = random_minimal_system(2, TimeDomain::Discrete, &mut rng).unwrap();
        let gen = random_multisine(2, TimeDomain::Discrete, &mut rng).unwrap();
        assert!(matches!(
            classify_theorem2(&plant, &gen, &Vector::zeros(2), 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sample_grids() {
        let t = chebyshev_times(7, 1.0);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        assert!(t[0] > 0.0 && t[6] < 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let r = random_times(5, 2.0, &mut rng);
        assert!(r.windows(2).all(|w| w[0] <= w[1]));
        assert!(r.iter().all(|&x| (0.0..2.0).contains(&x)));
    }
}
