//! One-sample normal mean test: `y_i ~ N(mu, v)` with prior mass `p` on
//! `mu = theta0` and a normal slab elsewhere.
//!
//! The log-likelihood collapses onto two cached sufficient statistics,
//! `Sum (y_i - mu)^2 = n*vhat + n*(ybar - mu)^2`, so a single evaluation is
//! O(1) regardless of sample size. Class suprema sit at the maximum
//! likelihood plug-ins: `(ybar, vhat)` unrestricted, `(theta0, vhat0)` on the
//! null, with `vhat0 = vhat + (ybar - theta0)^2`. The null location `theta0`
//! enters only through that shift, which is how a nonzero null is supported
//! without touching any other formula.

use crate::coupler::CouplerModel;
use crate::distributions::{AtomMixturePrior, InvGammaParams};
use crate::error::{Error, Result};
use crate::models::{check_dominance, class_odds, gaussian_suff_ll, moments};
use crate::state::{ClassId, MeanCoord, MixedState, VarCoord};
use crate::store::DeviateRecord;
use crate::stream::ReplayStream;

/// Point-null mean test with unknown variance under an inverse-gamma prior.
///
/// Class I states are `(theta0, v)`, class II states `(mu, v)`; both classes
/// are continua, so draws come from the two-class coupling engine.
#[derive(Debug, Clone)]
pub struct SingleMeanModel {
    data: Vec<f64>,
    prior: AtomMixturePrior,
    variance_prior: InvGammaParams,
    n: f64,
    ybar: f64,
    vhat: f64,
    vhat0: f64,
    ml_free: f64,
    ml_null: f64,
}

impl SingleMeanModel {
    pub fn new(
        data: &[f64],
        prior: AtomMixturePrior,
        variance_prior: InvGammaParams,
    ) -> Result<Self> {
        let (n, ybar, vhat) = moments(data)?;
        if vhat <= 0.0 {
            return Err(Error::DegenerateData(
                "all observations equal: the likelihood is unbounded in the variance".into(),
            ));
        }
        let d0 = ybar - prior.atom_location();
        let vhat0 = vhat + d0 * d0;
        let model = Self {
            data: data.to_vec(),
            prior,
            variance_prior,
            n,
            ybar,
            vhat,
            vhat0,
            ml_free: gaussian_suff_ll(n, ybar, vhat, ybar, vhat),
            ml_null: gaussian_suff_ll(n, ybar, vhat, prior.atom_location(), vhat0),
        };
        model.verify_dominance(128, 0x5eed_cafe)?;
        Ok(model)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn prior(&self) -> &AtomMixturePrior {
        &self.prior
    }

    pub fn variance_prior(&self) -> &InvGammaParams {
        &self.variance_prior
    }

    pub fn theta0(&self) -> f64 {
        self.prior.atom_location()
    }

    /// Unrestricted maximum-likelihood mean, the sample mean.
    pub fn mean_mle(&self) -> f64 {
        self.ybar
    }

    /// Maximum-likelihood variance about the sample mean.
    pub fn vhat(&self) -> f64 {
        self.vhat
    }

    /// Maximum-likelihood variance about the null location.
    pub fn vhat0(&self) -> f64 {
        self.vhat0
    }

    /// Data log-likelihood at `(mean, var)`.
    pub fn log_likelihood(&self, mean: f64, var: f64) -> Result<f64> {
        if !(var.is_finite() && var > 0.0) {
            return Err(Error::Domain(format!(
                "log-likelihood needs a positive variance, got {var}"
            )));
        }
        Ok(gaussian_suff_ll(self.n, self.ybar, self.vhat, mean, var))
    }

    fn state_params(&self, state: &MixedState) -> (f64, f64) {
        let var = match state.var {
            VarCoord::Common(v) => v,
            other => panic!("single-mean state carries {other:?}, expected a common variance"),
        };
        let mean = match state.mean {
            MeanCoord::Atom => self.prior.atom_location(),
            MeanCoord::Free(mu) => mu,
            other => panic!("single-mean state carries {other:?}, expected atom or free mean"),
        };
        (mean, var)
    }

    fn state_ll(&self, state: &MixedState) -> f64 {
        let (mean, var) = self.state_params(state);
        gaussian_suff_ll(self.n, self.ybar, self.vhat, mean, var)
    }

    /// Randomized check that the cached class suprema really dominate: for
    /// prior-distributed states and candidates, the class minimum acceptance
    /// ratio never exceeds the pointwise ratio. Runs at construction with a
    /// fixed seed; tests run it much harder.
    pub fn verify_dominance(&self, probes: usize, seed: u64) -> Result<()> {
        let mut stream = ReplayStream::from_seed(seed);
        for _ in 0..probes {
            let state_ii = MixedState {
                mean: MeanCoord::Free(self.prior.slab().sample(&mut stream)),
                var: VarCoord::Common(self.variance_prior.sample(&mut stream)),
            };
            let state_i = MixedState {
                mean: MeanCoord::Atom,
                var: VarCoord::Common(self.variance_prior.sample(&mut stream)),
            };
            let cand_var = VarCoord::Common(self.variance_prior.sample(&mut stream));
            let cand_into_i = MixedState {
                mean: MeanCoord::Atom,
                var: cand_var,
            };
            let cand_into_ii = MixedState {
                mean: MeanCoord::Free(self.prior.slab().sample(&mut stream)),
                var: cand_var,
            };
            check_dominance(self, &state_ii, &cand_into_i, ClassId::II)?;
            check_dominance(self, &state_i, &cand_into_ii, ClassId::I)?;
        }
        Ok(())
    }
}

impl CouplerModel for SingleMeanModel {
    fn deviates_per_step(&self) -> usize {
        2
    }

    /// Order: candidate mean from the slab, then candidate variance.
    fn sample_step_deviates(&self, stream: &mut ReplayStream) -> Vec<f64> {
        let mean = self.prior.slab().sample(stream);
        let var = self.variance_prior.sample(stream);
        vec![mean, var]
    }

    fn candidate_for_class(&self, class: ClassId, record: &DeviateRecord) -> MixedState {
        let var = VarCoord::Common(record.candidate[1]);
        match class {
            ClassId::I => MixedState {
                mean: MeanCoord::Free(record.candidate[0]),
                var,
            },
            ClassId::II => MixedState {
                mean: MeanCoord::Atom,
                var,
            },
        }
    }

    fn log_accept_ratio(&self, from: &MixedState, to: &MixedState) -> f64 {
        debug_assert_ne!(from.class(), to.class());
        class_odds(&self.prior, to.class()) + self.state_ll(to) - self.state_ll(from)
    }

    fn min_log_ratio_into(&self, candidate: &MixedState, from_class: ClassId) -> f64 {
        debug_assert_ne!(candidate.class(), from_class);
        let sup = match from_class {
            ClassId::II => self.ml_free,
            ClassId::I => self.ml_null,
        };
        class_odds(&self.prior, candidate.class()) + self.state_ll(candidate) - sup
    }
}

/// Point-null mean test with the observation variance known.
///
/// The null class is the single state `(theta0, v)`, which is what the
/// single-atom engine requires; its "class supremum" is that state's own
/// log-likelihood, cached from the same evaluation path as every ratio.
#[derive(Debug, Clone)]
pub struct SingleMeanKnownVariance {
    data: Vec<f64>,
    prior: AtomMixturePrior,
    variance: f64,
    n: f64,
    ybar: f64,
    vhat: f64,
    ml_free: f64,
    ml_null: f64,
}

impl SingleMeanKnownVariance {
    pub fn new(data: &[f64], prior: AtomMixturePrior, variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "known variance must be positive and finite, got {variance}"
            )));
        }
        let (n, ybar, vhat) = moments(data)?;
        let model = Self {
            data: data.to_vec(),
            prior,
            variance,
            n,
            ybar,
            vhat,
            ml_free: gaussian_suff_ll(n, ybar, vhat, ybar, variance),
            ml_null: gaussian_suff_ll(n, ybar, vhat, prior.atom_location(), variance),
        };
        model.verify_dominance(128, 0x5eed_cafe)?;
        Ok(model)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn prior(&self) -> &AtomMixturePrior {
        &self.prior
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn theta0(&self) -> f64 {
        self.prior.atom_location()
    }

    pub fn mean_mle(&self) -> f64 {
        self.ybar
    }

    /// Data log-likelihood at `mean` under the known variance.
    pub fn log_likelihood(&self, mean: f64) -> f64 {
        gaussian_suff_ll(self.n, self.ybar, self.vhat, mean, self.variance)
    }

    fn state_mean(&self, state: &MixedState) -> f64 {
        assert_eq!(
            state.var,
            VarCoord::Known,
            "known-variance state carries a variance coordinate"
        );
        match state.mean {
            MeanCoord::Atom => self.prior.atom_location(),
            MeanCoord::Free(mu) => mu,
            other => panic!("known-variance state carries {other:?}"),
        }
    }

    pub fn verify_dominance(&self, probes: usize, seed: u64) -> Result<()> {
        let mut stream = ReplayStream::from_seed(seed);
        let null_state = MixedState {
            mean: MeanCoord::Atom,
            var: VarCoord::Known,
        };
        for _ in 0..probes {
            let state_ii = MixedState {
                mean: MeanCoord::Free(self.prior.slab().sample(&mut stream)),
                var: VarCoord::Known,
            };
            let cand_into_ii = MixedState {
                mean: MeanCoord::Free(self.prior.slab().sample(&mut stream)),
                var: VarCoord::Known,
            };
            check_dominance(self, &state_ii, &null_state, ClassId::II)?;
            check_dominance(self, &null_state, &cand_into_ii, ClassId::I)?;
        }
        Ok(())
    }
}

impl CouplerModel for SingleMeanKnownVariance {
    fn deviates_per_step(&self) -> usize {
        1
    }

    fn sample_step_deviates(&self, stream: &mut ReplayStream) -> Vec<f64> {
        vec![self.prior.slab().sample(stream)]
    }

    fn candidate_for_class(&self, class: ClassId, record: &DeviateRecord) -> MixedState {
        match class {
            ClassId::I => MixedState {
                mean: MeanCoord::Free(record.candidate[0]),
                var: VarCoord::Known,
            },
            ClassId::II => MixedState {
                mean: MeanCoord::Atom,
                var: VarCoord::Known,
            },
        }
    }

    fn log_accept_ratio(&self, from: &MixedState, to: &MixedState) -> f64 {
        debug_assert_ne!(from.class(), to.class());
        class_odds(&self.prior, to.class()) + self.log_likelihood(self.state_mean(to))
            - self.log_likelihood(self.state_mean(from))
    }

    fn min_log_ratio_into(&self, candidate: &MixedState, from_class: ClassId) -> f64 {
        debug_assert_ne!(candidate.class(), from_class);
        let sup = match from_class {
            ClassId::II => self.ml_free,
            // Class I is one state; the "minimum" is the exact ratio from it.
            ClassId::I => self.ml_null,
        };
        class_odds(&self.prior, candidate.class()) + self.log_likelihood(self.state_mean(candidate))
            - sup
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{NormalParams, LN_2PI};
    use crate::quad::{ks_critical_value, ks_statistic};
    use crate::store::DeviateStore;
    use approx::assert_relative_eq;

    pub(crate) const TEN_OBS: [f64; 10] = [
        0.575, 1.808, 0.532, -0.168, 0.529, 0.888, -1.368, -0.512, 2.667, 0.874,
    ];

    fn ten_obs_model() -> SingleMeanModel {
        let slab = NormalParams::new(0.0, 100.0).unwrap();
        let prior = AtomMixturePrior::new(0.5, 0.0, slab).unwrap();
        let vp = InvGammaParams::new(1.0, 0.05).unwrap();
        SingleMeanModel::new(&TEN_OBS, prior, vp).unwrap()
    }

    #[test]
    fn cached_mles_match_hand_arithmetic() {
        let m = ten_obs_model();
        assert_relative_eq!(m.mean_mle(), 0.5825, max_relative = 1e-12);
        assert_relative_eq!(m.vhat0(), 1.4989455, max_relative = 1e-12);
        assert_relative_eq!(m.vhat(), 1.15963925, max_relative = 1e-12);
        let d0 = m.mean_mle() - m.theta0();
        assert_relative_eq!(m.vhat0(), m.vhat() + d0 * d0, max_relative = 1e-12);
    }

    #[test]
    fn sufficient_statistics_reproduce_the_full_likelihood() {
        let m = ten_obs_model();
        for &(mu, v) in &[(0.0, 1.0), (0.5825, 1.15963925), (-2.0, 0.3), (3.0, 7.5)] {
            let full: f64 = TEN_OBS
                .iter()
                .map(|&y| NormalParams::new(mu, v).unwrap().log_pdf(y))
                .sum();
            assert_relative_eq!(m.log_likelihood(mu, v).unwrap(), full, max_relative = 1e-12);
        }
        assert!(m.log_likelihood(0.0, 0.0).is_err());
        assert!(m.log_likelihood(0.0, -1.0).is_err());
    }

    #[test]
    fn single_point_likelihood_is_the_standard_normal_constant() {
        let slab = NormalParams::new(0.0, 1.0).unwrap();
        let prior = AtomMixturePrior::new(0.5, 0.0, slab).unwrap();
        let m = SingleMeanKnownVariance::new(&[0.0], prior, 1.0).unwrap();
        assert_relative_eq!(m.log_likelihood(0.0), -0.5 * LN_2PI, max_relative = 1e-15);
    }

    #[test]
    fn degenerate_data_is_rejected_at_construction() {
        let slab = NormalParams::new(0.0, 100.0).unwrap();
        let prior = AtomMixturePrior::new(0.5, 0.0, slab).unwrap();
        let vp = InvGammaParams::new(1.0, 0.05).unwrap();
        for data in [&[2.0][..], &[1.0, 1.0, 1.0][..]] {
            assert!(matches!(
                SingleMeanModel::new(data, prior, vp),
                Err(Error::DegenerateData(_))
            ));
        }
        // With the variance known there is nothing to blow up.
        assert!(SingleMeanKnownVariance::new(&[2.0], prior, 1.0).is_ok());
    }

    #[test]
    fn ratio_is_antisymmetric_and_odds_free_at_even_prior_mass() {
        let m = ten_obs_model();
        let a = MixedState {
            mean: MeanCoord::Free(1.3),
            var: VarCoord::Common(0.7),
        };
        let b = MixedState {
            mean: MeanCoord::Atom,
            var: VarCoord::Common(2.2),
        };
        assert_relative_eq!(
            m.log_accept_ratio(&a, &b),
            -m.log_accept_ratio(&b, &a),
            max_relative = 1e-12
        );
        // Equal-likelihood pair across classes: the ratio is the odds term
        // alone, which vanishes at p = 1/2.
        let free_at_null = MixedState {
            mean: MeanCoord::Free(0.0),
            var: VarCoord::Common(2.2),
        };
        assert_eq!(m.log_accept_ratio(&free_at_null, &b), 0.0);
    }

    #[test]
    fn cached_suprema_beat_a_grid_around_the_mle() {
        let m = ten_obs_model();
        for i in -10..=10 {
            for j in 1..=20 {
                let mu = m.mean_mle() + 0.2 * i as f64;
                let v = 0.2 * j as f64;
                let ll = m.log_likelihood(mu, v).unwrap();
                assert!(ll <= m.ml_free);
                let ll0 = m.log_likelihood(m.theta0(), v).unwrap();
                assert!(ll0 <= m.ml_null);
            }
        }
    }

    #[test]
    fn dominance_probe_passes_ten_thousand_states() {
        ten_obs_model().verify_dominance(10_000, 99).unwrap();
        let slab = NormalParams::new(0.0, 4.0).unwrap();
        let prior = AtomMixturePrior::new(0.5, 0.0, slab).unwrap();
        SingleMeanKnownVariance::new(&[0.9, -0.6, 0.3, 1.5, -0.2], prior, 1.0)
            .unwrap()
            .verify_dominance(10_000, 99)
            .unwrap();
    }

    #[test]
    fn candidates_share_the_variance_deviate_and_alternate_class() {
        let m = ten_obs_model();
        let record = DeviateRecord {
            candidate: vec![1.25, 0.8],
            accept_u: 0.5,
        };
        let into_ii = m.candidate_for_class(ClassId::I, &record);
        let into_i = m.candidate_for_class(ClassId::II, &record);
        assert_eq!(into_ii.mean, MeanCoord::Free(1.25));
        assert_eq!(into_i.mean, MeanCoord::Atom);
        assert_eq!(into_ii.var, VarCoord::Common(0.8));
        assert_eq!(into_i.var, into_ii.var);
        assert_eq!(into_i.class(), ClassId::I);
        assert_eq!(into_ii.class(), ClassId::II);
    }

    #[test]
    fn candidate_mean_marginal_matches_the_slab_by_ks() {
        let m = ten_obs_model();
        let mut store = DeviateStore::new(7);
        let mut sample: Vec<f64> = (1..=100_000)
            .map(|t| {
                store
                    .get_or_generate(t, |s| m.sample_step_deviates(s))
                    .candidate[0]
            })
            .collect();
        sample.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let slab = *m.prior().slab();
        let d = ks_statistic(&sample, |x| slab.log_pdf(x).exp(), -120.0);
        assert!(
            d < ks_critical_value(sample.len(), 0.01),
            "ks statistic {d} too large"
        );
    }

    #[test]
    fn singleton_null_minimum_is_the_exact_ratio_from_the_null() {
        let slab = NormalParams::new(0.0, 4.0).unwrap();
        let prior = AtomMixturePrior::new(0.35, 0.0, slab).unwrap();
        let m = SingleMeanKnownVariance::new(&[0.9, -0.6, 0.3, 1.5, -0.2], prior, 1.0).unwrap();
        let null_state = MixedState {
            mean: MeanCoord::Atom,
            var: VarCoord::Known,
        };
        for mu in [-3.0, -0.4, 0.0, 0.9, 2.6] {
            let cand = MixedState {
                mean: MeanCoord::Free(mu),
                var: VarCoord::Known,
            };
            assert_eq!(
                m.min_log_ratio_into(&cand, ClassId::I),
                m.log_accept_ratio(&null_state, &cand)
            );
        }
    }
}
