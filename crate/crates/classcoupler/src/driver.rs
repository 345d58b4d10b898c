//! Parallel execution of independent exact draws.
//!
//! Each draw owns a replayable deviate store seeded from the master seed and
//! the draw index alone, so the same configuration produces the same draws
//! whether they run on one thread or thirty-two. Aggregation is a
//! single-threaded reduce at the end.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupler::{couple_single_atom, couple_two_class, verify_singleton_null};
use crate::error::{Error, Result};
use crate::estimator::{atom_probability, bct_summary, histogram, RunSummary};
use crate::imh::{imh_backward_sample, BackwardSchedule, CouplingResult, WeightedDiscreteTarget};
use crate::models::{SingleMeanKnownVariance, SingleMeanModel, TwoSampleModel, VarianceCase};
use crate::state::{MeanCoord, MixedState, VarCoord};
use crate::store::DeviateStore;
use crate::stream::derive_draw_seed;

/// A model wired to the engine that matches its null-class topology.
pub enum BuiltModel {
    /// Continuum null `(theta0, v)`: two-class engine.
    SingleMean(SingleMeanModel),
    /// Point null: single-atom engine.
    SingleMeanKnownVar(SingleMeanKnownVariance),
    /// Continuum null `mu1 = mu2`: two-class engine.
    TwoSample(TwoSampleModel),
    /// Finite-state independence chain baseline.
    Discrete(WeightedDiscreteTarget),
}

impl BuiltModel {
    pub fn kind_name(&self) -> &'static str {
        match self {
            BuiltModel::SingleMean(_) => "single-mean",
            BuiltModel::SingleMeanKnownVar(_) => "single-mean-known-variance",
            BuiltModel::TwoSample(m) => match m.case() {
                VarianceCase::Known(_, _) => "two-sample-known-variances",
                VarianceCase::Common(_) => "two-sample-common-variance",
                VarianceCase::Separate(_, _) => "two-sample-separate-variances",
            },
            BuiltModel::Discrete(_) => "discrete-demo",
        }
    }

    /// Per-draw numeric column names for tabular output.
    pub fn column_names(&self) -> Vec<&'static str> {
        match self {
            BuiltModel::SingleMean(_) => vec!["in_null", "mu", "v"],
            BuiltModel::SingleMeanKnownVar(_) => vec!["in_null", "mu"],
            BuiltModel::TwoSample(m) => {
                let mut cols = vec!["in_null", "mu1", "mu2"];
                match m.case() {
                    VarianceCase::Known(_, _) => {}
                    VarianceCase::Common(_) => cols.push("v"),
                    VarianceCase::Separate(_, _) => cols.extend(["v1", "v2"]),
                }
                cols
            }
            BuiltModel::Discrete(_) => vec!["state"],
        }
    }

    /// Numeric view of one draw, aligned with [`Self::column_names`].
    pub fn column_values(&self, state: &DrawState) -> Vec<f64> {
        match (self, state) {
            (BuiltModel::SingleMean(m), DrawState::Mixed(s)) => {
                let mu = match s.mean {
                    MeanCoord::Atom => m.theta0(),
                    MeanCoord::Free(mu) => mu,
                    other => panic!("one-sample draw carries {other:?}"),
                };
                let v = match s.var {
                    VarCoord::Common(v) => v,
                    other => panic!("one-sample draw carries {other:?}"),
                };
                vec![f64::from(u8::from(s.is_null())), mu, v]
            }
            (BuiltModel::SingleMeanKnownVar(m), DrawState::Mixed(s)) => {
                let mu = match s.mean {
                    MeanCoord::Atom => m.theta0(),
                    MeanCoord::Free(mu) => mu,
                    other => panic!("known-variance draw carries {other:?}"),
                };
                vec![f64::from(u8::from(s.is_null())), mu]
            }
            (BuiltModel::TwoSample(m), DrawState::Mixed(s)) => {
                let (m1, m2) = match s.mean {
                    MeanCoord::Tied(w) => (w, w),
                    MeanCoord::Split(z1, z2) => (z1, z2),
                    other => panic!("two-sample draw carries {other:?}"),
                };
                let mut cols = vec![f64::from(u8::from(s.is_null())), m1, m2];
                match (m.case(), s.var) {
                    (VarianceCase::Known(_, _), VarCoord::Known) => {}
                    (VarianceCase::Common(_), VarCoord::Common(v)) => cols.push(v),
                    (VarianceCase::Separate(_, _), VarCoord::PerGroup(v1, v2)) => {
                        cols.extend([v1, v2])
                    }
                    (case, var) => panic!("draw variance {var:?} under case {case:?}"),
                }
                cols
            }
            (BuiltModel::Discrete(_), DrawState::Discrete(k)) => vec![*k as f64],
            (_, s) => panic!("draw state {s:?} does not belong to this model"),
        }
    }
}

/// Execution knobs, independent of the model.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct RunOptions {
    pub draws: u64,
    pub seed: u64,
    pub max_horizon: u64,
    pub workers: usize,
    /// Bins for marginal and coupling-time histograms; 0 disables them.
    pub bins: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            draws: 10_000,
            seed: 1,
            max_horizon: 1 << 22,
            workers: 1,
            bins: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DrawState {
    Mixed(MixedState),
    Discrete(usize),
}

/// One completed draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrawOutcome {
    pub index: u64,
    pub seed: u64,
    pub state: DrawState,
    pub bct: u64,
    pub mh_steps: u64,
}

/// All draws of a run, in index order, plus the indices that hit the
/// horizon cap.
pub struct RunOutput {
    pub outcomes: Vec<DrawOutcome>,
    pub horizon_exceeded: Vec<u64>,
}

/// Summary for the finite-state demo target.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DiscreteSummary {
    pub n_draws: usize,
    pub state_counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    pub exact_probabilities: Vec<f64>,
    pub tv_distance: f64,
    pub bct_mean: f64,
    pub bct_min: u64,
    pub bct_max: u64,
    pub mh_steps_mean: f64,
    pub horizon_exceeded: usize,
}

/// Report emitted by a run; the variant follows the model family.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RunReport {
    ClassCoupling(RunSummary),
    ImhDemo(DiscreteSummary),
}

fn draw_one(model: &BuiltModel, opts: &RunOptions, index: u64) -> Result<DrawOutcome> {
    let seed = derive_draw_seed(opts.seed, index);
    let (state, bct, mh_steps) = match model {
        BuiltModel::SingleMean(m) => {
            let mut store = DeviateStore::new(seed);
            let r = couple_two_class(m, &mut store, opts.max_horizon)?;
            (DrawState::Mixed(r.draw), r.bct, r.mh_steps)
        }
        BuiltModel::SingleMeanKnownVar(m) => {
            let mut store = DeviateStore::new(seed);
            let r = couple_single_atom(m, &mut store, opts.max_horizon)?;
            (DrawState::Mixed(r.draw), r.bct, r.mh_steps)
        }
        BuiltModel::TwoSample(m) => {
            let mut store = DeviateStore::new(seed);
            let r = couple_two_class(m, &mut store, opts.max_horizon)?;
            (DrawState::Mixed(r.draw), r.bct, r.mh_steps)
        }
        BuiltModel::Discrete(t) => {
            let mut store = DeviateStore::new(seed);
            let r: CouplingResult<usize> =
                imh_backward_sample(t, &mut store, opts.max_horizon, BackwardSchedule::UnitStep)?;
            (DrawState::Discrete(r.draw), r.bct, r.mh_steps)
        }
    };
    Ok(DrawOutcome {
        index,
        seed,
        state,
        bct,
        mh_steps,
    })
}

/// Run `opts.draws` independent draws on a private thread pool.
///
/// A draw that exhausts the horizon is recorded by index, not fatal; any
/// other error aborts the run.
pub fn run_draws(model: &BuiltModel, opts: &RunOptions) -> Result<RunOutput> {
    if opts.draws == 0 {
        return Err(Error::Config("draws must be at least 1".into()));
    }
    if opts.workers == 0 {
        return Err(Error::Config("workers must be at least 1".into()));
    }
    if opts.max_horizon == 0 {
        return Err(Error::Config("max_horizon must be at least 1".into()));
    }
    if let BuiltModel::SingleMeanKnownVar(m) = model {
        verify_singleton_null(m, derive_draw_seed(opts.seed, u64::MAX - 1))?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<Result<DrawOutcome>> = pool.install(|| {
        (0..opts.draws)
            .into_par_iter()
            .map(|i| draw_one(model, opts, i))
            .collect()
    });
    let mut outcomes = Vec::with_capacity(results.len());
    let mut horizon_exceeded = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(o) => outcomes.push(o),
            Err(Error::HorizonExceeded { .. }) => horizon_exceeded.push(i as u64),
            Err(e) => return Err(e),
        }
    }
    Ok(RunOutput {
        outcomes,
        horizon_exceeded,
    })
}

/// Reduce a run to its report. Histograms cover each numeric column plus
/// the coupling times when `opts.bins > 0`.
pub fn summarize(model: &BuiltModel, output: &RunOutput, opts: &RunOptions) -> Result<RunReport> {
    if output.outcomes.is_empty() {
        return Err(Error::Config(format!(
            "no draw finished; {} draws hit the horizon cap {}",
            output.horizon_exceeded.len(),
            opts.max_horizon
        )));
    }
    let times: Vec<u64> = output.outcomes.iter().map(|o| o.bct).collect();
    let (bct_mean, bct_min, bct_max) = bct_summary(&times)?;
    let mh_steps_mean = output.outcomes.iter().map(|o| o.mh_steps as f64).sum::<f64>()
        / output.outcomes.len() as f64;

    if let BuiltModel::Discrete(t) = model {
        let mut counts = vec![0u64; t.n_states()];
        for o in &output.outcomes {
            match o.state {
                DrawState::Discrete(k) => counts[k] += 1,
                ref s => panic!("discrete run produced {s:?}"),
            }
        }
        let n = output.outcomes.len();
        let frequencies: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
        let exact = t.exact_probabilities();
        let tv_distance = crate::imh::total_variation(&counts, &exact);
        return Ok(RunReport::ImhDemo(DiscreteSummary {
            n_draws: n,
            state_counts: counts,
            frequencies,
            exact_probabilities: exact,
            tv_distance,
            bct_mean,
            bct_min,
            bct_max,
            mh_steps_mean,
            horizon_exceeded: output.horizon_exceeded.len(),
        }));
    }

    let states: Vec<MixedState> = output
        .outcomes
        .iter()
        .map(|o| match o.state {
            DrawState::Mixed(s) => s,
            ref s => panic!("class-coupling run produced {s:?}"),
        })
        .collect();
    let (atom_prob, ci_low, ci_high) = atom_probability(&states)?;
    let mut histograms = Vec::new();
    if opts.bins > 0 {
        let names = model.column_names();
        let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(states.len()); names.len()];
        for o in &output.outcomes {
            for (col, v) in columns.iter_mut().zip(model.column_values(&o.state)) {
                col.push(v);
            }
        }
        for (name, col) in names.iter().zip(&columns).skip(1) {
            histograms.push(histogram(name, col, opts.bins)?);
        }
        let bct_f: Vec<f64> = times.iter().map(|&t| t as f64).collect();
        histograms.push(histogram("bct", &bct_f, opts.bins)?);
    }
    Ok(RunReport::ClassCoupling(RunSummary {
        n_draws: states.len(),
        atom_prob,
        ci_low,
        ci_high,
        bct_mean,
        bct_min,
        bct_max,
        mh_steps_mean,
        horizon_exceeded: output.horizon_exceeded.len(),
        histograms,
    }))
}

/// Convenience wrapper: run, then summarize.
pub fn run_and_summarize(model: &BuiltModel, opts: &RunOptions) -> Result<(RunReport, RunOutput)> {
    let output = run_draws(model, opts)?;
    let report = summarize(model, &output, opts)?;
    Ok((report, output))
}
