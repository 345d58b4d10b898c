//! Backward-coupling engine for targets split into a null class and an
//! unrestricted class.
//!
//! The candidate kernel depends on the current state only through its class,
//! so one stored candidate per class per time step drives every path at once.
//! When the shared acceptance uniform falls below the minimum acceptance
//! ratio of a whole class, that entire class moves to its candidate
//! simultaneously; the engine searches backward for a step where both classes
//! move (or, for a singleton null, where the null holds still while everyone
//! else joins it), then replays the surviving paths forward to time zero.

use crate::error::{Error, Result};
use crate::imh::CouplingResult;
use crate::state::{ClassId, MixedState};
use crate::store::{DeviateRecord, DeviateStore};
use crate::stream::{ReplayStream, TimeIndex};

/// Model contract consumed by the coupling engine.
///
/// `candidate_for_class(k, record)` is the candidate offered to every state
/// of class `k` at that step, built deterministically from the stored
/// deviates; candidates always lie in the other class.
/// `min_log_ratio_into(c, k)` must be an exact lower bound over class `k` of
/// the log acceptance ratio into `c`; the correctness of every draw rests on
/// it, which is why the shipped models attain it at maximum-likelihood
/// plug-ins and cross-check it with randomized dominance probes.
pub trait CouplerModel {
    /// Class membership; structural, from the state tags.
    fn class_of(&self, state: &MixedState) -> ClassId {
        state.class()
    }

    /// Number of candidate deviates one step consumes.
    fn deviates_per_step(&self) -> usize;

    /// Draw one step's candidate deviates, in the model's documented order.
    fn sample_step_deviates(&self, stream: &mut ReplayStream) -> Vec<f64>;

    /// Candidate proposed to states of `class`, assembled from `record`.
    fn candidate_for_class(&self, class: ClassId, record: &DeviateRecord) -> MixedState;

    /// Log Metropolis-Hastings acceptance ratio for `from -> to`
    /// (`from` and `to` in opposite classes).
    fn log_accept_ratio(&self, from: &MixedState, to: &MixedState) -> f64;

    /// Exact minimum over states of `from_class` of
    /// `log_accept_ratio(x, candidate)`.
    fn min_log_ratio_into(&self, candidate: &MixedState, from_class: ClassId) -> f64;
}

/// Metropolis-Hastings acceptance test: `u <= min(1, exp(log_ratio))`.
#[inline]
pub fn accept(log_ratio: f64, u: f64) -> bool {
    debug_assert!(!log_ratio.is_nan());
    debug_assert!((0.0..1.0).contains(&u));
    log_ratio >= 0.0 || u <= log_ratio.exp()
}

/// Paths that survive the first coupling stage, alive at time `-birth_t + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStageState {
    pub first: MixedState,
    pub second: Option<MixedState>,
    /// Backward step at which the first stage fired.
    pub birth_t: TimeIndex,
}

/// Result of replaying survivors forward to time zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForwardOutcome {
    /// All survivors reached the same state (exact structural equality).
    Merged(MixedState),
    /// Survivors remain distinct at time zero.
    Split(MixedState, MixedState),
}

/// Replay survivors from `-birth_t + 1` through time zero on the stored
/// deviates. Each path proposes its class's stored candidate and accepts
/// against the shared uniform; merging is exact equality, never tolerance.
pub fn forward_run<M: CouplerModel>(
    model: &M,
    store: &mut DeviateStore,
    survivors: &TwoStageState,
) -> Result<ForwardOutcome> {
    let mut steps = 0u64;
    forward_run_counted(model, store, survivors, &mut steps)
}

fn forward_run_counted<M: CouplerModel>(
    model: &M,
    store: &mut DeviateStore,
    survivors: &TwoStageState,
    mh_steps: &mut u64,
) -> Result<ForwardOutcome> {
    debug_assert!(survivors.birth_t >= 1);
    let mut a = survivors.first;
    let mut b = survivors.second;
    for k in (1..survivors.birth_t).rev() {
        step_states(model, store, k, std::iter::once(&mut a).chain(b.as_mut()), mh_steps)?;
    }
    Ok(match b {
        None => ForwardOutcome::Merged(a),
        Some(b) if a == b => ForwardOutcome::Merged(a),
        Some(b) => ForwardOutcome::Split(a, b),
    })
}

/// Advance `state` from time `-from_t` through time zero on the stored
/// deviates. `from_t = 0` returns the state unchanged. This is the replay
/// primitive behind the funnel diagnostics: after a completed draw, any
/// start state advanced from the coupling horizon must land on the draw.
pub fn advance_from<M: CouplerModel>(
    model: &M,
    store: &mut DeviateStore,
    state: MixedState,
    from_t: TimeIndex,
) -> Result<MixedState> {
    let mut state = state;
    let mut steps = 0u64;
    for k in (1..=from_t).rev() {
        step_states(model, store, k, std::iter::once(&mut state), &mut steps)?;
    }
    Ok(state)
}

/// Apply the stored transition at backward step `k` to each state in place.
fn step_states<'a, M: CouplerModel>(
    model: &M,
    store: &mut DeviateStore,
    k: TimeIndex,
    states: impl Iterator<Item = &'a mut MixedState>,
    mh_steps: &mut u64,
) -> Result<()> {
    let record = store
        .get_or_generate_checked(k, model.deviates_per_step(), |s| {
            model.sample_step_deviates(s)
        })?
        .clone();
    for state in states {
        let class = model.class_of(state);
        let candidate = model.candidate_for_class(class, &record);
        debug_assert!(candidate.is_valid());
        debug_assert_eq!(model.class_of(&candidate), class.other());
        *mh_steps += 1;
        if accept(model.log_accept_ratio(state, &candidate), record.accept_u) {
            *state = candidate;
        }
    }
    Ok(())
}

/// Candidates and shared uniform for the backward step at `t`.
fn stage_inputs<M: CouplerModel>(
    model: &M,
    store: &mut DeviateStore,
    t: TimeIndex,
) -> Result<(MixedState, MixedState, f64)> {
    let record = store.get_or_generate_checked(t, model.deviates_per_step(), |s| {
        model.sample_step_deviates(s)
    })?;
    let cand_i = model.candidate_for_class(ClassId::I, record);
    let cand_ii = model.candidate_for_class(ClassId::II, record);
    debug_assert!(cand_i.is_valid() && cand_ii.is_valid());
    debug_assert_eq!(model.class_of(&cand_i), ClassId::II);
    debug_assert_eq!(model.class_of(&cand_ii), ClassId::I);
    Ok((cand_i, cand_ii, record.accept_u))
}

/// Exact draw for a model whose null class is a single point.
///
/// At each backward step `t` the engine inspects the shared uniform against
/// `R1 = min_log_ratio_into(null, II)` and `R2 = log_accept_ratio(null ->
/// candidate)`:
///
/// * `R2 < u <= R1`: every off-null path joins the null while the null path
///   holds, so all paths occupy the null point one step later: coupled.
/// * `u <= min(R1, R2)`: both classes move; the two survivors are replayed
///   forward and the draw stands only if they merge by time zero.
///
/// Otherwise the horizon extends by one and all deviates are reused.
pub fn couple_single_atom<M: CouplerModel>(
    model: &M,
    store: &mut DeviateStore,
    max_horizon: u64,
) -> Result<CouplingResult<MixedState>> {
    let mut mh_steps = 0u64;
    for t in 1..=max_horizon {
        let (cand_i, cand_ii, u) = stage_inputs(model, store, t)?;
        let r_all_off_null = model.min_log_ratio_into(&cand_ii, ClassId::II);
        let r_null_moves = model.min_log_ratio_into(&cand_i, ClassId::I);
        mh_steps += 1;
        if !accept(r_all_off_null, u) {
            continue;
        }
        if !accept(r_null_moves, u) {
            // One-step coupling: the whole space collapses onto the null.
            let mut draw = cand_ii;
            for k in (1..t).rev() {
                step_states(model, store, k, std::iter::once(&mut draw), &mut mh_steps)?;
            }
            return Ok(CouplingResult {
                draw,
                bct: t,
                mh_steps,
            });
        }
        let survivors = TwoStageState {
            first: cand_ii,
            second: Some(cand_i),
            birth_t: t,
        };
        if let ForwardOutcome::Merged(draw) =
            forward_run_counted(model, store, &survivors, &mut mh_steps)?
        {
            return Ok(CouplingResult {
                draw,
                bct: t,
                mh_steps,
            });
        }
    }
    Err(Error::HorizonExceeded {
        max_horizon,
        mh_steps,
    })
}

/// Exact draw for a model whose null class is a continuum.
///
/// Only the simultaneous-accept event can start a coupling here: there is no
/// step at which a continuum of held states collapses. Both classes must
/// accept their shared-step candidates at once (`u <= min(R_I, R_II)`),
/// leaving two survivors that are replayed forward and must merge by time
/// zero. A full coupling needs at least three backward steps, so the search
/// starts at `t = 3`.
pub fn couple_two_class<M: CouplerModel>(
    model: &M,
    store: &mut DeviateStore,
    max_horizon: u64,
) -> Result<CouplingResult<MixedState>> {
    let mut mh_steps = 0u64;
    for t in 3..=max_horizon {
        let (cand_i, cand_ii, u) = stage_inputs(model, store, t)?;
        let r_class_i = model.min_log_ratio_into(&cand_i, ClassId::I);
        let r_class_ii = model.min_log_ratio_into(&cand_ii, ClassId::II);
        mh_steps += 1;
        if accept(r_class_i, u) && accept(r_class_ii, u) {
            let survivors = TwoStageState {
                first: cand_ii,
                second: Some(cand_i),
                birth_t: t,
            };
            if let ForwardOutcome::Merged(draw) =
                forward_run_counted(model, store, &survivors, &mut mh_steps)?
            {
                return Ok(CouplingResult {
                    draw,
                    bct: t,
                    mh_steps,
                });
            }
        }
    }
    Err(Error::HorizonExceeded {
        max_horizon,
        mh_steps,
    })
}

/// Probe that a model's class I is a single point: the candidate offered to
/// class II must be one fixed class-I state regardless of the step's
/// deviates. Run this before trusting [`couple_single_atom`] with a model.
pub fn verify_singleton_null<M: CouplerModel>(model: &M, probe_seed: u64) -> Result<()> {
    let mut store = DeviateStore::new(probe_seed);
    let mut reference: Option<MixedState> = None;
    for t in 1..=8 {
        let record = store.get_or_generate_checked(t, model.deviates_per_step(), |s| {
            model.sample_step_deviates(s)
        })?;
        let cand = model.candidate_for_class(ClassId::II, record);
        if model.class_of(&cand) != ClassId::I {
            return Err(Error::Contract(
                "candidate offered to class II does not lie in class I".into(),
            ));
        }
        match &reference {
            None => reference = Some(cand),
            Some(r) if *r != cand => {
                return Err(Error::Contract(
                    "null class is not a single point: class-II candidates vary across steps"
                        .into(),
                ));
            }
            Some(_) => {}
        }
    }
    Ok(())
}
