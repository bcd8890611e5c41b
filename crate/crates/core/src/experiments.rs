//! Seeded Monte Carlo drivers.
//!
//! Every trial owns a `ChaCha8Rng` seeded from the master seed and placed on
//! its own stream (`arm << 32 | trial`), so a single trial can be replayed in
//! isolation and trials run in parallel without changing the report.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::continuous::{
    chebyshev_times, classify_theorem2, ct_is_informative, ct_jets, random_times, JetSample,
};
use crate::error::{Error, Result};
use crate::informativity::{io_hankel, is_informative, CaseLabel, InformativityVerdict};
use crate::interconnection::{
    analyze, classify_theorem1, construct_e2_member, generator_case, offset_in_invariant_subspace,
    solve_sylvester, ExceptionalTest,
};
use crate::lti::{
    random_minimal_system, random_vector, simulate_dt, LtiSystem, TimeDomain, REJECTION_CAP,
};
use crate::numerics::{self, Vector};
use crate::siggen::{
    check_assumptions, max_pe_order, random_multisine, realize_from_signal,
    recurrence_rank_condition, relative_error, response, spectra_check, SignalGenerator,
};

/// Failures whose exceptional-set margin is at least this many tolerances are
/// counted as unexplained.
pub const EXPLAINED_MARGIN_FACTOR: f64 = 10.0;

/// Length of the validation trajectory for recovered difference equations.
pub const VALIDATION_LEN: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Theorem1Mc,
    InterconnectionMc,
    Corollary2,
    WillemsCompare,
    CtInformativity,
    Lemma2Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    #[default]
    Chebyshev,
    Uniform,
}

/// Parameters of a Monte Carlo run. Which fields are read depends on the
/// experiment; lists hold one entry unless the experiment sweeps them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: Vec<usize>,
    pub n_g: Option<usize>,
    pub l: Option<usize>,
    pub t_len: Vec<usize>,
    /// Number of jet samples (continuous time).
    pub k: Option<usize>,
    /// Sampling horizon (continuous time).
    pub horizon: f64,
    pub sampling: Sampling,
    pub trials: usize,
    pub seed: u64,
    /// Extra trials with initial states chosen inside the exceptional set
    /// (case B) or with hand-picked structure (case C).
    pub adversarial: usize,
    pub tolerance: Option<f64>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, trials: usize, seed: u64) -> Self {
        Self {
            experiment,
            n: Vec::new(),
            n_g: None,
            l: None,
            t_len: Vec::new(),
            k: None,
            horizon: 1.0,
            sampling: Sampling::default(),
            trials,
            seed,
            adversarial: 0,
            tolerance: numerics::tolerance_override(),
        }
    }

    pub fn interconnection(
        experiment: Experiment,
        n: usize,
        n_g: usize,
        l: usize,
        t_len: usize,
        trials: usize,
        seed: u64,
    ) -> Self {
        Self {
            n: vec![n],
            n_g: Some(n_g),
            l: Some(l),
            t_len: vec![t_len],
            ..Self::new(experiment, trials, seed)
        }
    }

    fn single_n(&self) -> Result<usize> {
        match self.n.as_slice() {
            [n] if *n >= 1 => Ok(*n),
            _ => Err(Error::Precondition(
                "exactly one plant order n >= 1 is required".into(),
            )),
        }
    }

    fn single_t(&self) -> Result<usize> {
        match self.t_len.as_slice() {
            [t] if *t >= 1 => Ok(*t),
            _ => Err(Error::Precondition(
                "exactly one data length T >= 1 is required".into(),
            )),
        }
    }

    fn required(v: Option<usize>, what: &str) -> Result<usize> {
        match v {
            Some(x) if x >= 1 => Ok(x),
            _ => Err(Error::Precondition(format!("{what} >= 1 is required"))),
        }
    }

    fn check_trials(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Precondition("trials must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum X0Kind {
    Random,
    Exceptional,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct TrialRecord {
    pub trial: usize,
    pub stream: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0_kind: Option<X0Kind>,
    /// The trial agrees with the claim under test.
    pub success: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub informative: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank_achieved: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank_required: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e2: Option<ExceptionalTest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_label: Option<CaseLabel>,
    /// Smallest distance between plant and generator eigenvalues; small gaps
    /// inflate the Sylvester solution and the rounding in the data.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pe_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realizable: Option<bool>,
    /// Max relative deviation of a realized generator's response from the signal.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roundtrip_error: Option<f64>,
    /// Relative free-run error of the recovered difference equation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prediction_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialRecord {
    fn apply_verdict(&mut self, v: &InformativityVerdict) {
        self.informative = Some(v.informative);
        self.rank_achieved = Some(v.rank_achieved);
        self.rank_required = Some(v.rank_required);
        self.margin = Some(v.margin);
        self.tolerance = Some(v.tolerance_used);
    }

    /// A failed informativity trial that the exceptional-set margin does not
    /// account for.
    pub fn unexplained(&self, expected: Option<bool>) -> bool {
        if self.success || expected != Some(true) {
            return false;
        }
        match self.e2 {
            Some(e) => e.margin >= EXPLAINED_MARGIN_FACTOR * e.tolerance,
            None => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub trials: usize,
    pub successes: usize,
    pub informative: usize,
    pub errors: usize,
    pub unexplained_failures: usize,
    pub min_margin: Option<f64>,
    pub median_margin: Option<f64>,
    pub min_e2_margin: Option<f64>,
    pub max_prediction_error: Option<f64>,
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

fn min_of(v: impl Iterator<Item = f64>) -> Option<f64> {
    v.fold(None, |acc: Option<f64>, x| {
        Some(acc.map_or(x, |a| a.min(x)))
    })
}

impl Summary {
    pub fn from_records(records: &[TrialRecord], expected: Option<bool>) -> Self {
        let margins: Vec<f64> = records.iter().filter_map(|r| r.margin).collect();
        Self {
            trials: records.len(),
            successes: records.iter().filter(|r| r.success).count(),
            informative: records
                .iter()
                .filter(|r| r.informative == Some(true))
                .count(),
            errors: records.iter().filter(|r| r.error.is_some()).count(),
            unexplained_failures: records.iter().filter(|r| r.unexplained(expected)).count(),
            min_margin: min_of(margins.iter().copied()),
            median_margin: median(margins),
            min_e2_margin: min_of(records.iter().filter_map(|r| r.e2.map(|e| e.margin))),
            max_prediction_error: records
                .iter()
                .filter_map(|r| r.prediction_error)
                .fold(None, |acc: Option<f64>, x| {
                    Some(acc.map_or(x, |a| a.max(x)))
                }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmReport {
    pub name: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_g: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_len: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Expected informativity of every trial, if the claim fixes it.
    pub expected_informative: Option<bool>,
    pub summary: Summary,
    pub records: Vec<TrialRecord>,
}

impl ArmReport {
    pub fn all_succeeded(&self) -> bool {
        self.summary.successes == self.summary.trials
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub config: ExperimentConfig,
    pub arms: Vec<ArmReport>,
    pub wall_time_s: f64,
}

impl ExperimentReport {
    pub fn arm(&self, name: &str) -> Option<&ArmReport> {
        self.arms.iter().find(|a| a.name == name)
    }

    /// JSON with the wall-time field removed, stable across reruns.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("wall_time_s");
        }
        serde_json::to_string(&v).expect("report serializes")
    }
}

pub fn trial_rng(seed: u64, arm: usize, trial: usize) -> (ChaCha8Rng, u64) {
    let stream = ((arm as u64) << 32) | trial as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (rng, stream)
}

fn run_arm<F>(seed: u64, arm: usize, count: usize, offset: usize, f: F) -> Vec<TrialRecord>
where
    F: Fn(&mut ChaCha8Rng, usize) -> Result<TrialRecord> + Sync,
{
    (offset..offset + count)
        .into_par_iter()
        .map(|trial| {
            let (mut rng, stream) = trial_rng(seed, arm, trial);
            let mut rec = f(&mut rng, trial).unwrap_or_else(|e| TrialRecord {
                error: Some(e.to_string()),
                ..TrialRecord::default()
            });
            rec.trial = trial;
            rec.stream = stream;
            rec
        })
        .collect()
}

/// Random multisine of dimension `n_g` satisfying the standing assumptions
/// against `plant`.
pub fn random_generator_for<R: rand::Rng + ?Sized>(
    plant: &LtiSystem,
    n_g: usize,
    rng: &mut R,
) -> Result<SignalGenerator> {
    for _ in 0..REJECTION_CAP {
        let gen = random_multisine(n_g, plant.domain(), rng)?;
        if check_assumptions(&gen, Some(plant)).all_hold() {
            return Ok(gen);
        }
    }
    Err(Error::RejectionCap(REJECTION_CAP))
}

/// Hand-picked initial states; `kind` cycles through zero state, zero offset,
/// offsets in low- and high-dimensional invariant subspaces, a unit vector
/// and a large random state.
pub fn structured_x0<R: rand::Rng + ?Sized>(
    kind: usize,
    plant: &LtiSystem,
    gen: &SignalGenerator,
    rng: &mut R,
) -> Result<Vector> {
    let n = plant.order();
    let pi = solve_sylvester(plant, gen)?;
    Ok(match kind % 6 {
        0 => Vector::zeros(n),
        1 => &pi * gen.w0(),
        2 => offset_in_invariant_subspace(plant, &pi, gen.w0(), 1, rng),
        3 => offset_in_invariant_subspace(plant, &pi, gen.w0(), n.saturating_sub(1), rng),
        4 => {
            let mut e = Vector::zeros(n);
            e[0] = 1.0;
            e
        }
        _ => random_vector(n, rng) * 1e3,
    })
}

struct DtCase {
    n: usize,
    n_g: usize,
    l: usize,
    t_len: usize,
}

fn dt_trial(
    c: &DtCase,
    kind: X0Kind,
    index: usize,
    expected: Option<bool>,
    rng: &mut ChaCha8Rng,
) -> Result<TrialRecord> {
    let plant = random_minimal_system(c.n, TimeDomain::Discrete, rng)?;
    let gen = random_generator_for(&plant, c.n_g, rng)?;
    let x0 = match kind {
        X0Kind::Random => random_vector(c.n, rng),
        X0Kind::Exceptional => construct_e2_member(&plant, &gen, c.l, rng)?,
        X0Kind::Structured => structured_x0(index, &plant, &gen, rng)?,
    };
    let u = response(&gen, c.t_len)?;
    let traj = simulate_dt(&plant, &u, &x0)?;
    let verdict = is_informative(&traj, c.l, &plant)?;
    let theorem = classify_theorem1(&plant, &gen, &x0, c.l, c.t_len)?;
    let mut rec = TrialRecord {
        x0_kind: Some(kind),
        case_label: Some(theorem.case_label),
        e2: theorem.e2_member,
        spectral_gap: Some(spectra_check(plant.a(), gen.s_g()).min_gap),
        ..Default::default()
    };
    rec.apply_verdict(&verdict);
    rec.success = expected.is_none_or(|e| e == verdict.informative);
    Ok(rec)
}

fn dt_arm(
    cfg: &ExperimentConfig,
    name: &str,
    arm: usize,
    c: DtCase,
    expected: Option<bool>,
    extra: Option<(X0Kind, Option<bool>)>,
) -> ArmReport {
    let mut records = run_arm(cfg.seed, arm, cfg.trials, 0, |rng, i| {
        dt_trial(&c, X0Kind::Random, i, expected, rng)
    });
    let mut arms_expected = expected;
    if let Some((kind, exp)) = extra {
        if cfg.adversarial > 0 {
            records.extend(run_arm(
                cfg.seed,
                arm,
                cfg.adversarial,
                cfg.trials,
                |rng, i| dt_trial(&c, kind, i - cfg.trials, exp, rng),
            ));
            if exp != expected {
                arms_expected = None;
            }
        }
    }
    ArmReport {
        name: name.into(),
        n: c.n,
        n_g: Some(c.n_g),
        l: Some(c.l),
        t_len: Some(c.t_len),
        k: None,
        expected_informative: arms_expected,
        summary: Summary::from_records(&records, expected),
        records,
    }
}

fn finish(cfg: &ExperimentConfig, arms: Vec<ArmReport>, start: Instant) -> ExperimentReport {
    ExperimentReport {
        experiment: cfg.experiment,
        config: cfg.clone(),
        arms,
        wall_time_s: start.elapsed().as_secs_f64(),
    }
}

/// Case B of the interconnection result with random initial states, plus
/// `adversarial` trials whose initial states lie in the exceptional set.
pub fn run_theorem1_mc(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    cfg.check_trials()?;
    let n = cfg.single_n()?;
    let n_g = ExperimentConfig::required(cfg.n_g, "N_g")?;
    let l = ExperimentConfig::required(cfg.l, "L")?;
    let t_len = cfg.single_t()?;
    if generator_case(n_g, l, n) != CaseLabel::B {
        return Err(Error::Precondition(format!(
            "need L <= N_g < L + n, got N_g = {n_g}, L = {l}, n = {n}"
        )));
    }
    if t_len + 1 < n_g + n + l {
        return Err(Error::Precondition(format!(
            "need T >= N_g + n + L - 1 = {}, got {t_len}",
            n_g + n + l - 1
        )));
    }
    let mut arms = vec![dt_arm(
        cfg,
        "random-x0",
        0,
        DtCase { n, n_g, l, t_len },
        Some(true),
        None,
    )];
    if cfg.adversarial > 0 {
        let c = DtCase { n, n_g, l, t_len };
        let records = run_arm(cfg.seed, 1, cfg.adversarial, 0, |rng, i| {
            dt_trial(&c, X0Kind::Exceptional, i, Some(false), rng)
        });
        arms.push(ArmReport {
            name: "exceptional-x0".into(),
            n,
            n_g: Some(n_g),
            l: Some(l),
            t_len: Some(t_len),
            k: None,
            expected_informative: Some(false),
            summary: Summary::from_records(&records, Some(false)),
            records,
        });
    }
    Ok(finish(cfg, arms, start))
}

/// Any case. The expected verdict follows the case: never informative in case
/// A, informative for random states in B, always informative in C (when the
/// data is long enough). In case C, `adversarial` adds structured initial
/// states to the same arm.
pub fn run_interconnection_mc(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    cfg.check_trials()?;
    let n = cfg.single_n()?;
    let n_g = ExperimentConfig::required(cfg.n_g, "N_g")?;
    let l = ExperimentConfig::required(cfg.l, "L")?;
    let t_len = cfg.single_t()?;
    if l > t_len {
        return Err(Error::Precondition(format!(
            "depth L = {l} exceeds T = {t_len}"
        )));
    }
    let case = generator_case(n_g, l, n);
    let long_enough = t_len + 1 >= n_g + n + l;
    let expected = match case {
        CaseLabel::A => Some(false),
        _ if !long_enough => None,
        _ => Some(true),
    };
    let extra = match case {
        CaseLabel::C => Some((X0Kind::Structured, expected)),
        CaseLabel::B => Some((X0Kind::Exceptional, Some(false))),
        CaseLabel::A => Some((X0Kind::Structured, Some(false))),
    };
    let name = format!("case-{case:?}").to_lowercase();
    let arm = dt_arm(cfg, &name, 0, DtCase { n, n_g, l, t_len }, expected, extra);
    Ok(finish(cfg, vec![arm], start))
}

/// Coefficients `[p; q]` with `sum p_i u(t+i) + sum q_i y(t+i) = 0`, read off
/// the one-dimensional left kernel of the depth-`(n+1)` Hankel matrix.
pub fn difference_equation(h: &numerics::Matrix) -> Option<Vector> {
    let ker = numerics::kernel_basis(&h.transpose(), None);
    (ker.ncols() == 1).then(|| ker.column(0).into_owned())
}

/// Free-run prediction of `y` from `u` and the first `n` outputs.
pub fn predict_with(theta: &Vector, u: &[f64], y: &[f64]) -> Vec<f64> {
    let depth = theta.len() / 2;
    let n = depth - 1;
    let lead = theta[2 * depth - 1];
    let mut out = y[..n.min(y.len())].to_vec();
    for t in n..u.len() {
        let base = t - n;
        let mut acc = 0.0;
        for i in 0..depth {
            acc += theta[i] * u[base + i];
        }
        for i in 0..n {
            acc += theta[depth + i] * out[base + i];
        }
        out.push(-acc / lead);
    }
    out
}

fn corollary2_trial(n: usize, rng: &mut ChaCha8Rng) -> Result<TrialRecord> {
    let (n_g, l, t_len) = (n + 1, n + 1, 3 * n + 1);
    let plant = random_minimal_system(n, TimeDomain::Discrete, rng)?;
    let gen = random_generator_for(&plant, n_g, rng)?;
    let x0 = random_vector(n, rng);
    let traj = simulate_dt(&plant, &response(&gen, t_len)?, &x0)?;
    let verdict = is_informative(&traj, l, &plant)?;
    let theorem = classify_theorem1(&plant, &gen, &x0, l, t_len)?;
    let mut rec = TrialRecord {
        case_label: Some(theorem.case_label),
        e2: theorem.e2_member,
        spectral_gap: Some(spectra_check(plant.a(), gen.s_g()).min_gap),
        ..Default::default()
    };
    rec.apply_verdict(&verdict);
    rec.success = verdict.informative;
    if verdict.informative {
        let h = io_hankel(&traj, l)?.matrix;
        if let Some(theta) = difference_equation(&h) {
            let u: Vec<f64> = (0..VALIDATION_LEN)
                .map(|_| rand::Rng::sample(rng, rand_distr::StandardNormal))
                .collect();
            let fresh = simulate_dt(&plant, &u, &random_vector(n, rng))?;
            let pred = predict_with(&theta, &fresh.u, &fresh.y);
            let num: f64 = pred
                .iter()
                .zip(&fresh.y)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            let den: f64 = fresh.y.iter().map(|b| b * b).sum::<f64>().sqrt();
            rec.prediction_error = Some(num / den.max(f64::MIN_POSITIVE));
        }
    }
    Ok(rec)
}

/// `N_g = L = n + 1`, `T = 3n + 1`, one arm per plant order.
pub fn run_corollary2(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    cfg.check_trials()?;
    if cfg.n.is_empty() || cfg.n.contains(&0) {
        return Err(Error::Precondition(
            "plant orders must be at least 1".into(),
        ));
    }
    let arms = cfg
        .n
        .iter()
        .enumerate()
        .map(|(arm, &n)| {
            let records = run_arm(cfg.seed, arm, cfg.trials, 0, |rng, _| {
                corollary2_trial(n, rng)
            });
            ArmReport {
                name: format!("n={n}"),
                n,
                n_g: Some(n + 1),
                l: Some(n + 1),
                t_len: Some(3 * n + 1),
                k: None,
                expected_informative: Some(true),
                summary: Summary::from_records(&records, Some(true)),
                records,
            }
        })
        .collect();
    Ok(finish(cfg, arms, start))
}

/// Per plant order: the short relaxed design (`N_g = n + 1`, `T = 3n + 1`),
/// the classical design (`N_g = 2n + 1`, `T = 4n + 1`) and an
/// under-excited control (`N_g = n`, `T = 4n + 1`), all at depth `n + 1`.
pub fn run_willems_compare(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    cfg.check_trials()?;
    if cfg.n.is_empty() || cfg.n.contains(&0) {
        return Err(Error::Precondition(
            "plant orders must be at least 1".into(),
        ));
    }
    let mut arms = Vec::new();
    for (i, &n) in cfg.n.iter().enumerate() {
        let designs = [
            ("relaxed", n + 1, 3 * n + 1, true),
            ("willems", 2 * n + 1, 4 * n + 1, true),
            ("control", n, 4 * n + 1, false),
        ];
        for (j, (name, n_g, t_len, expect)) in designs.into_iter().enumerate() {
            let c = DtCase {
                n,
                n_g,
                l: n + 1,
                t_len,
            };
            arms.push(dt_arm(
                cfg,
                &format!("{name}/n={n}"),
                3 * i + j,
                c,
                Some(expect),
                None,
            ));
        }
    }
    Ok(finish(cfg, arms, start))
}

fn lemma2_trial(t_len: usize, rng: &mut ChaCha8Rng) -> Result<TrialRecord> {
    let u: Vec<f64> = (0..t_len)
        .map(|_| rand::Rng::sample(rng, rand_distr::StandardNormal))
        .collect();
    let k = t_len.div_ceil(2);
    let pe = max_pe_order(&u);
    let realizable = recurrence_rank_condition(&u, k);
    let roundtrip_error = realize_from_signal(&u, Some(k))
        .ok()
        .and_then(|g| response(&g, t_len).ok())
        .map(|r| relative_error(&r, &u));
    Ok(TrialRecord {
        pe_order: Some(pe),
        realizable: Some(realizable && roundtrip_error.is_some()),
        roundtrip_error,
        success: pe == k && realizable && roundtrip_error.is_some(),
        ..Default::default()
    })
}

/// Standard-normal signals: PE order `floor((T + 1) / 2)` and realizability
/// by a generator of that dimension.
pub fn run_lemma2_mc(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    cfg.check_trials()?;
    if cfg.t_len.is_empty() || cfg.t_len.contains(&0) {
        return Err(Error::Precondition(
            "data lengths must be at least 1".into(),
        ));
    }
    let arms = cfg
        .t_len
        .iter()
        .enumerate()
        .map(|(arm, &t)| {
            let records = run_arm(cfg.seed, arm, cfg.trials, 0, |rng, _| lemma2_trial(t, rng));
            ArmReport {
                name: format!("T={t}"),
                n: 0,
                n_g: Some(t.div_ceil(2)),
                l: None,
                t_len: Some(t),
                k: None,
                expected_informative: None,
                summary: Summary::from_records(&records, None),
                records,
            }
        })
        .collect();
    Ok(finish(cfg, arms, start))
}

struct CtCase {
    n: usize,
    n_g: usize,
    l: usize,
    k: usize,
    horizon: f64,
    sampling: Sampling,
}

struct CtDraw {
    plant: LtiSystem,
    gen: SignalGenerator,
    x0: Vector,
    jets: Vec<JetSample>,
}

fn ct_draw(c: &CtCase, rng: &mut ChaCha8Rng) -> Result<CtDraw> {
    let plant = random_minimal_system(c.n, TimeDomain::Continuous, rng)?;
    let gen = random_generator_for(&plant, c.n_g, rng)?;
    let x0 = random_vector(c.n, rng);
    let times = match c.sampling {
        Sampling::Chebyshev => chebyshev_times(c.k, c.horizon),
        Sampling::Uniform => random_times(c.k, c.horizon, rng),
    };
    let analysis = analyze(&plant, &gen, &x0, c.l)?;
    let jets = ct_jets(&plant, &gen, &analysis, &times, c.l)?;
    Ok(CtDraw {
        plant,
        gen,
        x0,
        jets,
    })
}

fn ct_trial(c: &CtCase, expected: Option<bool>, rng: &mut ChaCha8Rng) -> Result<TrialRecord> {
    let CtDraw {
        plant,
        gen,
        x0,
        jets,
    } = ct_draw(c, rng)?;
    let verdict = ct_is_informative(&jets, c.l, &plant)?;
    let theorem = classify_theorem2(&plant, &gen, &x0, c.l)?;
    let mut rec = TrialRecord {
        case_label: Some(theorem.case_label),
        e2: theorem.e2_member,
        spectral_gap: Some(spectra_check(plant.a(), gen.s_g()).min_gap),
        ..Default::default()
    };
    rec.apply_verdict(&verdict);
    rec.success = expected.is_none_or(|e| e == verdict.informative);
    Ok(rec)
}

fn ct_case(cfg: &ExperimentConfig) -> Result<CtCase> {
    let n = cfg.single_n()?;
    let n_g = ExperimentConfig::required(cfg.n_g, "N_g")?;
    let l = ExperimentConfig::required(cfg.l, "L")?;
    let k = cfg.k.unwrap_or(n_g + n + 2);
    if k == 0 || cfg.horizon.is_nan() || cfg.horizon <= 0.0 {
        return Err(Error::Precondition(
            "need k >= 1 samples and a positive horizon".into(),
        ));
    }
    Ok(CtCase {
        n,
        n_g,
        l,
        k,
        horizon: cfg.horizon,
        sampling: cfg.sampling,
    })
}

/// Regenerates the jets seen by one trial of [`run_ct_informativity`].
pub fn ct_trial_jets(cfg: &ExperimentConfig, trial: usize) -> Result<Vec<JetSample>> {
    let c = ct_case(cfg)?;
    let (mut rng, _) = trial_rng(cfg.seed, 0, trial);
    Ok(ct_draw(&c, &mut rng)?.jets)
}

/// Continuous-time jets at `k` instants (default `N_g + n + 2`) in `(0, horizon)`.
pub fn run_ct_informativity(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    cfg.check_trials()?;
    let c = ct_case(cfg)?;
    let (n, n_g, l, k) = (c.n, c.n_g, c.l, c.k);
    let expected = Some(generator_case(n_g, l, n) != CaseLabel::A);
    let records = run_arm(cfg.seed, 0, cfg.trials, 0, |rng, _| {
        ct_trial(&c, expected, rng)
    });
    let arm = ArmReport {
        name: format!("case-{:?}", generator_case(n_g, l, n)).to_lowercase(),
        n,
        n_g: Some(n_g),
        l: Some(l),
        t_len: None,
        k: Some(k),
        expected_informative: expected,
        summary: Summary::from_records(&records, expected),
        records,
    };
    Ok(finish(cfg, vec![arm], start))
}

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    match cfg.experiment {
        Experiment::Theorem1Mc => run_theorem1_mc(cfg),
        Experiment::InterconnectionMc => run_interconnection_mc(cfg),
        Experiment::Corollary2 => run_corollary2(cfg),
        Experiment::WillemsCompare => run_willems_compare(cfg),
        Experiment::CtInformativity => run_ct_informativity(cfg),
        Experiment::Lemma2Mc => run_lemma2_mc(cfg),
    }
}
