//! Exact sampling for independence-candidate Metropolis-Hastings chains.
//!
//! An independence chain orders its states by the importance weight
//! `h(x)/q(x)`: whenever the maximal-weight state `l` accepts a candidate,
//! every other state accepts it too, so all sample paths started anywhere in
//! the past funnel through a single state. [`imh_backward_sample`] locates
//! the most recent such funnel time and runs the chain forward to time zero,
//! yielding a draw distributed exactly according to the normalized `h`.

use crate::coupler::accept;
use crate::error::{Error, Result};
use crate::store::DeviateStore;
use crate::stream::{ReplayStream, TimeIndex};

/// Target and candidate pair for an independence Metropolis-Hastings chain.
///
/// `log_h` is the unnormalized log target, `log_q` the log candidate density,
/// and `lowest_state` the state maximizing `h(x)/q(x)`. The maximizer is
/// supplied, not discovered; [`verify_lowest_state`] spot-checks it.
pub trait ImhTarget {
    type State: Clone + PartialEq;

    fn log_h(&self, x: &Self::State) -> f64;
    fn log_q(&self, x: &Self::State) -> f64;
    fn sample_q(&self, stream: &mut ReplayStream) -> Self::State;
    fn lowest_state(&self) -> Self::State;
}

/// Outcome of one backward-coupled draw.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingResult<S> {
    /// The exact draw at time zero.
    pub draw: S,
    /// Backward coupling time: the certified horizon the draw used.
    pub bct: u64,
    /// Total acceptance tests evaluated (diagnostic).
    pub mh_steps: u64,
}

/// Horizon schedule for the backward search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackwardSchedule {
    /// Extend one step at a time; `bct` is the exact funnel time.
    #[default]
    UnitStep,
    /// Double the horizon per attempt; `bct` is the certified horizon, which
    /// may overshoot the exact funnel time. Not used for statistics that
    /// report coupling-time distributions.
    Doubling,
}

fn log_weight<T: ImhTarget>(target: &T, x: &T::State) -> Result<(f64, f64)> {
    let lh = target.log_h(x);
    let lq = target.log_q(x);
    if lh.is_nan() || lq.is_nan() || lh == f64::INFINITY || lq == f64::INFINITY {
        return Err(Error::Domain(format!(
            "non-finite log density: log_h = {lh}, log_q = {lq}"
        )));
    }
    Ok((lh, lq))
}

/// Acceptance probability `min(1, [h(y)/q(y)] / [h(x)/q(x)])` for a proposed
/// move from `x` to `y`, or 1 when `h(x) q(x) = 0`.
pub fn imh_accept_ratio<T: ImhTarget>(target: &T, x: &T::State, y: &T::State) -> Result<f64> {
    Ok(imh_log_accept_ratio(target, x, y)?.exp().min(1.0))
}

fn imh_log_accept_ratio<T: ImhTarget>(target: &T, x: &T::State, y: &T::State) -> Result<f64> {
    let (lhx, lqx) = log_weight(target, x)?;
    let (lhy, lqy) = log_weight(target, y)?;
    if lhx + lqx == f64::NEG_INFINITY {
        // Zero-density current state: leave it with probability one.
        return Ok(0.0);
    }
    let log_ratio = (lhy - lqy) - (lhx - lqx);
    if log_ratio.is_nan() {
        return Err(Error::Domain(
            "acceptance ratio undefined: candidate has zero target and candidate density".into(),
        ));
    }
    Ok(log_ratio)
}

/// Draw one exact sample from the normalized target.
///
/// Scans horizons per `schedule`; at each horizon the maximal-weight state is
/// started at `-t` and the first time it accepts a candidate every chain has
/// coalesced, after which the path is rolled forward to time zero reusing the
/// stored deviates.
pub fn imh_backward_sample<T: ImhTarget>(
    target: &T,
    store: &mut DeviateStore<T::State>,
    max_horizon: u64,
    schedule: BackwardSchedule,
) -> Result<CouplingResult<T::State>> {
    let lowest = target.lowest_state();
    let mut mh_steps = 0u64;
    match schedule {
        BackwardSchedule::UnitStep => {
            for t in 1..=max_horizon {
                let (candidate, u) = {
                    let rec = store.get_or_generate(t, |s| target.sample_q(s));
                    (rec.candidate.clone(), rec.accept_u)
                };
                mh_steps += 1;
                if accept(imh_log_accept_ratio(target, &lowest, &candidate)?, u) {
                    let draw = advance_from(target, store, candidate, t - 1, &mut mh_steps)?;
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
        BackwardSchedule::Doubling => {
            let mut t = 1u64;
            loop {
                let mut state: Option<T::State> = None;
                for k in (1..=t).rev() {
                    let (candidate, u) = {
                        let rec = store.get_or_generate(k, |s| target.sample_q(s));
                        (rec.candidate.clone(), rec.accept_u)
                    };
                    mh_steps += 1;
                    let from = state.as_ref().unwrap_or(&lowest);
                    if accept(imh_log_accept_ratio(target, from, &candidate)?, u) {
                        state = Some(candidate);
                    }
                }
                if let Some(draw) = state {
                    return Ok(CouplingResult {
                        draw,
                        bct: t,
                        mh_steps,
                    });
                }
                if t >= max_horizon {
                    return Err(Error::HorizonExceeded {
                        max_horizon,
                        mh_steps,
                    });
                }
                t = (t * 2).min(max_horizon);
            }
        }
    }
}

/// Run the chain forward from `state` at time `-from_t` through time zero,
/// reusing the stored deviates. With `from_t = 0` this returns `state`.
pub fn imh_advance_from<T: ImhTarget>(
    target: &T,
    store: &mut DeviateStore<T::State>,
    state: T::State,
    from_t: TimeIndex,
) -> Result<T::State> {
    let mut steps = 0;
    advance_from(target, store, state, from_t, &mut steps)
}

fn advance_from<T: ImhTarget>(
    target: &T,
    store: &mut DeviateStore<T::State>,
    mut state: T::State,
    from_t: TimeIndex,
    mh_steps: &mut u64,
) -> Result<T::State> {
    for k in (1..=from_t).rev() {
        let (candidate, u) = {
            let rec = store.get_or_generate(k, |s| target.sample_q(s));
            (rec.candidate.clone(), rec.accept_u)
        };
        *mh_steps += 1;
        if accept(imh_log_accept_ratio(target, &state, &candidate)?, u) {
            state = candidate;
        }
    }
    Ok(state)
}

/// Spot-check that no probed candidate beats the supplied lowest state's
/// importance weight. Converts a silently wrong maximizer into a loud error.
pub fn verify_lowest_state<T: ImhTarget>(target: &T, probe_seed: u64, probes: u32) -> Result<()> {
    let lowest = target.lowest_state();
    let (lh, lq) = log_weight(target, &lowest)?;
    let lowest_log_weight = lh - lq;
    let mut stream = ReplayStream::from_seed(probe_seed);
    for _ in 0..probes {
        let x = target.sample_q(&mut stream);
        let (ph, pq) = log_weight(target, &x)?;
        let probe_log_weight = ph - pq;
        if probe_log_weight > lowest_log_weight + 1e-9 {
            return Err(Error::LowestStateViolation {
                probe_log_weight,
                lowest_log_weight,
            });
        }
    }
    Ok(())
}

/// Finite discrete target given by a weight list, with an independent
/// candidate distribution over the same states (uniform by default).
#[derive(Debug, Clone)]
pub struct WeightedDiscreteTarget {
    log_h: Vec<f64>,
    log_q: Vec<f64>,
    candidate_cdf: Vec<f64>,
    lowest: usize,
}

impl WeightedDiscreteTarget {
    pub fn new(weights: &[f64], candidate_weights: Option<&[f64]>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("weight list is empty".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidParameter(
                "weights must be positive and finite".into(),
            ));
        }
        let q: Vec<f64> = match candidate_weights {
            Some(cw) => {
                if cw.len() != weights.len() {
                    return Err(Error::InvalidParameter(
                        "candidate weight list length differs from target's".into(),
                    ));
                }
                if cw.iter().any(|w| !w.is_finite() || *w <= 0.0) {
                    return Err(Error::InvalidParameter(
                        "candidate weights must be positive and finite".into(),
                    ));
                }
                let total: f64 = cw.iter().sum();
                cw.iter().map(|w| w / total).collect()
            }
            None => vec![1.0 / weights.len() as f64; weights.len()],
        };
        let mut candidate_cdf = Vec::with_capacity(q.len());
        let mut acc = 0.0;
        for p in &q {
            acc += p;
            candidate_cdf.push(acc);
        }
        *candidate_cdf.last_mut().expect("nonempty") = 1.0;
        let lowest = weights
            .iter()
            .zip(&q)
            .enumerate()
            .max_by(|(_, (wa, qa)), (_, (wb, qb))| {
                (*wa / *qa).partial_cmp(&(*wb / *qb)).expect("finite")
            })
            .map(|(i, _)| i)
            .expect("nonempty");
        Ok(Self {
            log_h: weights.iter().map(|w| w.ln()).collect(),
            log_q: q.iter().map(|p| p.ln()).collect(),
            candidate_cdf,
            lowest,
        })
    }

    pub fn n_states(&self) -> usize {
        self.log_h.len()
    }

    /// Normalized target probabilities.
    pub fn exact_probabilities(&self) -> Vec<f64> {
        let total: f64 = self.log_h.iter().map(|l| l.exp()).sum();
        self.log_h.iter().map(|l| l.exp() / total).collect()
    }
}

impl ImhTarget for WeightedDiscreteTarget {
    type State = usize;

    fn log_h(&self, x: &usize) -> f64 {
        self.log_h[*x]
    }

    fn log_q(&self, x: &usize) -> f64 {
        self.log_q[*x]
    }

    fn sample_q(&self, stream: &mut ReplayStream) -> usize {
        let u = stream.uniform01();
        self.candidate_cdf
            .iter()
            .position(|c| u < *c)
            .unwrap_or(self.candidate_cdf.len() - 1)
    }

    fn lowest_state(&self) -> usize {
        self.lowest
    }
}

/// Total variation distance between empirical counts and exact probabilities.
pub fn total_variation(counts: &[u64], exact: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    counts
        .iter()
        .zip(exact)
        .map(|(c, p)| (*c as f64 / n as f64 - p).abs())
        .sum::<f64>()
        / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_target() -> WeightedDiscreteTarget {
        WeightedDiscreteTarget::new(&[1.0, 2.0, 3.0, 4.0, 5.0], None).unwrap()
    }

    fn run_many(
        target: &WeightedDiscreteTarget,
        n: u64,
        master_seed: u64,
        schedule: BackwardSchedule,
    ) -> Vec<CouplingResult<usize>> {
        (0..n)
            .map(|i| {
                let seed = crate::stream::derive_draw_seed(master_seed, i);
                let mut store = DeviateStore::new(seed);
                imh_backward_sample(target, &mut store, 1_000_000, schedule).unwrap()
            })
            .collect()
    }

    #[test]
    fn accept_ratio_is_one_for_self_moves() {
        let t = demo_target();
        for s in 0..t.n_states() {
            assert_eq!(imh_accept_ratio(&t, &s, &s).unwrap(), 1.0);
        }
    }

    #[test]
    fn accept_ratio_matches_hand_computation() {
        // h = (1, 2, 3), uniform q: ratio(0 -> 2) = min(1, 3) = 1,
        // ratio(2 -> 0) = 1/3.
        let t = WeightedDiscreteTarget::new(&[1.0, 2.0, 3.0], None).unwrap();
        assert_eq!(imh_accept_ratio(&t, &0, &2).unwrap(), 1.0);
        let r = imh_accept_ratio(&t, &2, &0).unwrap();
        assert!((r - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn lowest_state_maximizes_weight() {
        let t = demo_target();
        assert_eq!(t.lowest_state(), 4);
        verify_lowest_state(&t, 0, 1000).unwrap();
        // Deliberately wrong maximizer must be caught.
        let mut bad = t.clone();
        bad.lowest = 0;
        assert!(matches!(
            verify_lowest_state(&bad, 0, 1000),
            Err(Error::LowestStateViolation { .. })
        ));
    }

    #[test]
    fn constant_weight_target_couples_in_one_step() {
        // q identical to the target: every candidate is accepted from l.
        let t = WeightedDiscreteTarget::new(&[1.0, 1.0, 1.0, 1.0], None).unwrap();
        for r in run_many(&t, 2000, 5, BackwardSchedule::UnitStep) {
            assert_eq!(r.bct, 1);
        }
    }

    #[test]
    fn empirical_law_approaches_exact_probabilities() {
        let t = demo_target();
        let exact = t.exact_probabilities();
        let mut tv_by_n = Vec::new();
        for n in [1_000u64, 10_000, 100_000] {
            let mut counts = vec![0u64; t.n_states()];
            for r in run_many(&t, n, 99, BackwardSchedule::UnitStep) {
                counts[r.draw] += 1;
            }
            tv_by_n.push(total_variation(&counts, &exact));
        }
        assert!(tv_by_n[2] < tv_by_n[0]);
        assert!(tv_by_n[2] < 0.01, "tv = {}", tv_by_n[2]);
    }

    #[test]
    fn doubling_schedule_draws_the_same_law() {
        let t = demo_target();
        let exact = t.exact_probabilities();
        let mut counts = vec![0u64; t.n_states()];
        for r in run_many(&t, 40_000, 7, BackwardSchedule::Doubling) {
            assert!(r.bct.is_power_of_two());
            counts[r.draw] += 1;
        }
        assert!(total_variation(&counts, &exact) < 0.015);
    }

    #[test]
    fn reruns_are_bit_identical() {
        let t = demo_target();
        let a = run_many(&t, 500, 123, BackwardSchedule::UnitStep);
        let b = run_many(&t, 500, 123, BackwardSchedule::UnitStep);
        assert_eq!(a, b);
    }

    #[test]
    fn every_start_state_funnels_to_the_draw() {
        let t = demo_target();
        for i in 0..100u64 {
            let seed = crate::stream::derive_draw_seed(4242, i);
            let mut store = DeviateStore::new(seed);
            let result =
                imh_backward_sample(&t, &mut store, 1_000_000, BackwardSchedule::UnitStep)
                    .unwrap();
            let mut probe = ReplayStream::from_seed(seed ^ 0xABCD);
            for _ in 0..50 {
                let start = (probe.uniform01() * t.n_states() as f64) as usize;
                let landed =
                    imh_advance_from(&t, &mut store, start, result.bct).unwrap();
                assert_eq!(landed, result.draw);
            }
        }
    }

    #[test]
    fn acceptance_at_funnel_time_dominates_all_states() {
        let t = demo_target();
        for i in 0..100u64 {
            let seed = crate::stream::derive_draw_seed(777, i);
            let mut store = DeviateStore::new(seed);
            let result =
                imh_backward_sample(&t, &mut store, 1_000_000, BackwardSchedule::UnitStep)
                    .unwrap();
            let rec = store.get(result.bct).unwrap().clone();
            for x in 0..t.n_states() {
                let ratio = imh_accept_ratio(&t, &x, &rec.candidate).unwrap();
                assert!(rec.accept_u <= ratio);
            }
        }
    }
}
