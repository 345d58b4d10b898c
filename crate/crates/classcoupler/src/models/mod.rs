//! Concrete posterior targets for point-null tests on normal data.
//!
//! Every model here follows the same recipe: the candidate kernel draws the
//! opposite class's free components from their priors, so priors and proposal
//! densities cancel out of the acceptance ratio, leaving the prior odds of
//! the destination class plus a log-likelihood difference. Each model caches
//! its data's sufficient statistics and the exact supremum of the
//! log-likelihood over each class, which is what turns the per-class minimum
//! acceptance ratio into two cached numbers.

mod single_mean;
mod two_sample;

pub use single_mean::{SingleMeanKnownVariance, SingleMeanModel};
pub use two_sample::{TwoSampleModel, VarianceCase};

use crate::coupler::CouplerModel;
use crate::distributions::{AtomMixturePrior, LN_2PI};
use crate::error::{Error, Result};
use crate::state::{ClassId, MixedState};

/// `Sum_i log N(y_i; mean, var)` through the sufficient statistics
/// `(n, ybar, vhat)`: the sum of squares about any `mean` is
/// `n*vhat + n*(ybar - mean)^2`. Class suprema are cached from this same
/// function so dominance comparisons are anchor-consistent in floating point.
pub(crate) fn gaussian_suff_ll(n: f64, ybar: f64, vhat: f64, mean: f64, var: f64) -> f64 {
    let d = ybar - mean;
    -0.5 * n * (LN_2PI + var.ln()) - n * (vhat + d * d) / (2.0 * var)
}

/// Probe body shared by the models' randomized dominance checks:
/// `min_log_ratio_into` must lower-bound the ratio from any concrete state
/// of the same class.
pub(crate) fn check_dominance<M: CouplerModel>(
    model: &M,
    state: &MixedState,
    candidate: &MixedState,
    class: ClassId,
) -> Result<()> {
    let bound = model.min_log_ratio_into(candidate, class);
    let actual = model.log_accept_ratio(state, candidate);
    if bound > actual {
        return Err(Error::Contract(format!(
            "dominance violated from class {class:?}: bound {bound} > ratio {actual} \
             (state {state:?}, candidate {candidate:?})"
        )));
    }
    Ok(())
}

/// Sample size, mean, and mean squared deviation about the mean.
pub(crate) fn moments(data: &[f64]) -> Result<(f64, f64, f64)> {
    if data.is_empty() {
        return Err(Error::EmptyInput);
    }
    if data.iter().any(|y| !y.is_finite()) {
        return Err(Error::InvalidParameter(
            "observations must be finite".into(),
        ));
    }
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let msd = data.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / n;
    Ok((n, mean, msd))
}

/// Log prior odds of landing in `to`: `ln p - ln(1-p)` into the null class,
/// its negation out of it.
pub(crate) fn class_odds(prior: &AtomMixturePrior, to: ClassId) -> f64 {
    match to {
        ClassId::I => prior.log_odds_into_atom(),
        ClassId::II => -prior.log_odds_into_atom(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::NormalParams;
    use approx::assert_relative_eq;

    #[test]
    fn moments_match_hand_values() {
        let (n, mean, msd) = moments(&[0.0, 2.0]).unwrap();
        assert_eq!(n, 2.0);
        assert_eq!(mean, 1.0);
        assert_eq!(msd, 1.0);
        let (n, mean, msd) = moments(&[1.0, 2.0, 3.0, 6.0]).unwrap();
        assert_eq!(n, 4.0);
        assert_eq!(mean, 3.0);
        assert_relative_eq!(msd, 3.5, max_relative = 1e-15);
    }

    #[test]
    fn moments_reject_bad_input() {
        assert!(matches!(moments(&[]), Err(Error::EmptyInput)));
        assert!(moments(&[1.0, f64::NAN]).is_err());
        assert!(moments(&[1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn class_odds_are_antisymmetric_and_vanish_at_even_odds() {
        let slab = NormalParams::new(0.0, 4.0).unwrap();
        let even = AtomMixturePrior::new(0.5, 0.0, slab).unwrap();
        assert_eq!(class_odds(&even, ClassId::I), 0.0);
        assert_eq!(class_odds(&even, ClassId::II), 0.0);
        let tilted = AtomMixturePrior::new(0.25, 0.0, slab).unwrap();
        assert_relative_eq!(
            class_odds(&tilted, ClassId::I),
            (0.25_f64 / 0.75).ln(),
            max_relative = 1e-15
        );
        assert_eq!(
            class_odds(&tilted, ClassId::I),
            -class_odds(&tilted, ClassId::II)
        );
    }
}
