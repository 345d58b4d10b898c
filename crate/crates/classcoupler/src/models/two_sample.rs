//! Two-sample normal test of a common mean: `y_1j ~ N(mu1, v1)`,
//! `y_2j ~ N(mu2, v2)`, with prior mass `p` on `mu1 = mu2`.
//!
//! The tied class draws its common mean from one slab, the split class draws
//! two independent means from another, and the variances come in three
//! flavors: both known, one shared unknown, or two separate unknowns. Group
//! log-likelihoods run through per-group sufficient statistics exactly as in
//! the one-sample model.
//!
//! The delicate number is the tied-class supremum. With a shared or known
//! equal variance it sits at the pooled mean in closed form; with known
//! unequal variances it moves to the precision-weighted mean (still closed
//! form); with separate unknown variances the profiled likelihood over the
//! common mean can be multimodal and has no closed-form maximizer, so the
//! constructor grid-scans the profile between the group means, polishes every
//! local peak, takes the best against the pooled-mean plug-in, and records
//! when the numerical search beat the plug-in. A hair of upward padding keeps
//! the cached supremum an upper bound despite optimizer slack; an overstated
//! supremum only delays coupling, it never biases a draw.

use crate::coupler::CouplerModel;
use crate::distributions::{InvGammaParams, NormalParams};
use crate::error::{Error, Result};
use crate::models::{check_dominance, gaussian_suff_ll, moments};
use crate::state::{ClassId, MeanCoord, MixedState, VarCoord};
use crate::store::DeviateRecord;
use crate::stream::ReplayStream;

/// How the two observation variances are treated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarianceCase {
    /// Both variances fixed and known.
    Known(f64, f64),
    /// One unknown variance shared by both groups, inverse-gamma prior.
    Common(InvGammaParams),
    /// Separate unknown variances, one inverse-gamma prior each.
    Separate(InvGammaParams, InvGammaParams),
}

#[derive(Debug, Clone, Copy)]
struct GroupStats {
    n: f64,
    ybar: f64,
    vhat: f64,
}

#[derive(Debug, Clone)]
pub struct TwoSampleModel {
    group1: Vec<f64>,
    group2: Vec<f64>,
    tied_weight: f64,
    tied_slab: NormalParams,
    split_slab: NormalParams,
    case: VarianceCase,
    g1: GroupStats,
    g2: GroupStats,
    n_total: f64,
    pooled_mean: f64,
    log_odds_tied: f64,
    ml_free: f64,
    ml_null: f64,
    tied_opt: f64,
    profile_fallback: bool,
}

impl TwoSampleModel {
    pub fn new(
        group1: &[f64],
        group2: &[f64],
        tied_weight: f64,
        tied_slab: NormalParams,
        split_slab: NormalParams,
        case: VarianceCase,
    ) -> Result<Self> {
        if !(tied_weight > 0.0 && tied_weight < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tied-class prior weight must lie in (0, 1), got {tied_weight}"
            )));
        }
        let (n1, ybar1, vhat1) = moments(group1)?;
        let (n2, ybar2, vhat2) = moments(group2)?;
        let g1 = GroupStats {
            n: n1,
            ybar: ybar1,
            vhat: vhat1,
        };
        let g2 = GroupStats {
            n: n2,
            ybar: ybar2,
            vhat: vhat2,
        };
        let n_total = n1 + n2;
        match case {
            VarianceCase::Known(v1, v2) => {
                if !(v1 > 0.0 && v1.is_finite() && v2 > 0.0 && v2.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "known variances must be positive and finite, got ({v1}, {v2})"
                    )));
                }
            }
            VarianceCase::Common(_) => {
                if n1 * vhat1 + n2 * vhat2 <= 0.0 {
                    return Err(Error::DegenerateData(
                        "no variation in either group: the shared variance is unidentifiable"
                            .into(),
                    ));
                }
            }
            VarianceCase::Separate(_, _) => {
                if vhat1 <= 0.0 || vhat2 <= 0.0 {
                    return Err(Error::DegenerateData(
                        "a group with no internal variation makes its likelihood unbounded"
                            .into(),
                    ));
                }
            }
        }
        let pooled_mean = (n1 * ybar1 + n2 * ybar2) / n_total;
        let mut model = Self {
            group1: group1.to_vec(),
            group2: group2.to_vec(),
            tied_weight,
            tied_slab,
            split_slab,
            case,
            g1,
            g2,
            n_total,
            pooled_mean,
            log_odds_tied: tied_weight.ln() - (-tied_weight).ln_1p(),
            ml_free: 0.0,
            ml_null: 0.0,
            tied_opt: 0.0,
            profile_fallback: false,
        };
        model.ml_free = model.split_supremum();
        let (tied_opt, ml_null, fallback) = model.tied_supremum();
        model.tied_opt = tied_opt;
        model.ml_null = ml_null;
        model.profile_fallback = fallback;
        model.verify_dominance(128, 0x5eed_cafe)?;
        Ok(model)
    }

    pub fn group1(&self) -> &[f64] {
        &self.group1
    }

    pub fn group2(&self) -> &[f64] {
        &self.group2
    }

    pub fn tied_weight(&self) -> f64 {
        self.tied_weight
    }

    pub fn tied_slab(&self) -> &NormalParams {
        &self.tied_slab
    }

    pub fn split_slab(&self) -> &NormalParams {
        &self.split_slab
    }

    pub fn case(&self) -> &VarianceCase {
        &self.case
    }

    /// Per-group maximum-likelihood pairs `((ybar1, vhat1), (ybar2, vhat2))`.
    pub fn group_mles(&self) -> ((f64, f64), (f64, f64)) {
        ((self.g1.ybar, self.g1.vhat), (self.g2.ybar, self.g2.vhat))
    }

    /// Sample-size-weighted grand mean.
    pub fn pooled_mean(&self) -> f64 {
        self.pooled_mean
    }

    /// Shared-variance MLEs `(vhat, vhat0)`: pooled within-group variance and
    /// total variance about the pooled mean. The tied value decomposes as
    /// `vhat0 = vhat + n1*n2*(ybar1 - ybar2)^2 / (n1+n2)^2`.
    pub fn pooled_variance_mles(&self) -> (f64, f64) {
        let vhat = (self.g1.n * self.g1.vhat + self.g2.n * self.g2.vhat) / self.n_total;
        let gap = self.g1.ybar - self.g2.ybar;
        let vhat0 = vhat + self.g1.n * self.g2.n * gap * gap / (self.n_total * self.n_total);
        (vhat, vhat0)
    }

    /// Per-group variances about the pooled mean, the separate-variances
    /// tied-class plug-in.
    pub fn per_group_null_mles(&self) -> (f64, f64) {
        let d1 = self.g1.ybar - self.pooled_mean;
        let d2 = self.g2.ybar - self.pooled_mean;
        (self.g1.vhat + d1 * d1, self.g2.vhat + d2 * d2)
    }

    /// Maximizer of the tied-class profile log-likelihood.
    pub fn tied_mean_optimum(&self) -> f64 {
        self.tied_opt
    }

    /// True when the separate-variances profile search beat the pooled-mean
    /// plug-in by more than rounding.
    pub fn profile_fallback_engaged(&self) -> bool {
        self.profile_fallback
    }

    /// Data log-likelihood at group means `(m1, m2)` and variances `(v1, v2)`.
    pub fn log_likelihood(&self, m1: f64, m2: f64, v1: f64, v2: f64) -> Result<f64> {
        if !(v1 > 0.0 && v2 > 0.0) {
            return Err(Error::Domain(format!(
                "log-likelihood needs positive variances, got ({v1}, {v2})"
            )));
        }
        Ok(self.suff_ll(m1, m2, v1, v2))
    }

    fn suff_ll(&self, m1: f64, m2: f64, v1: f64, v2: f64) -> f64 {
        gaussian_suff_ll(self.g1.n, self.g1.ybar, self.g1.vhat, m1, v1)
            + gaussian_suff_ll(self.g2.n, self.g2.ybar, self.g2.vhat, m2, v2)
    }

    /// Tied-class log-likelihood at common mean `w`, profiled over whatever
    /// variances the case leaves free.
    pub fn tied_profile_loglik(&self, w: f64) -> f64 {
        let d1 = self.g1.ybar - w;
        let d2 = self.g2.ybar - w;
        match self.case {
            VarianceCase::Known(v1, v2) => self.suff_ll(w, w, v1, v2),
            VarianceCase::Common(_) => {
                let v = (self.g1.n * (self.g1.vhat + d1 * d1)
                    + self.g2.n * (self.g2.vhat + d2 * d2))
                    / self.n_total;
                self.suff_ll(w, w, v, v)
            }
            VarianceCase::Separate(_, _) => {
                self.suff_ll(w, w, self.g1.vhat + d1 * d1, self.g2.vhat + d2 * d2)
            }
        }
    }

    fn split_supremum(&self) -> f64 {
        let (m1, m2) = (self.g1.ybar, self.g2.ybar);
        match self.case {
            VarianceCase::Known(v1, v2) => self.suff_ll(m1, m2, v1, v2),
            VarianceCase::Common(_) => {
                let v = (self.g1.n * self.g1.vhat + self.g2.n * self.g2.vhat) / self.n_total;
                self.suff_ll(m1, m2, v, v)
            }
            VarianceCase::Separate(_, _) => self.suff_ll(m1, m2, self.g1.vhat, self.g2.vhat),
        }
    }

    fn tied_supremum(&self) -> (f64, f64, bool) {
        match self.case {
            VarianceCase::Known(v1, v2) => {
                // Quadratic in w; the maximizer is the precision-weighted mean.
                let w1 = self.g1.n / v1;
                let w2 = self.g2.n / v2;
                let w = (w1 * self.g1.ybar + w2 * self.g2.ybar) / (w1 + w2);
                (w, self.tied_profile_loglik(w), false)
            }
            VarianceCase::Common(_) => {
                // Minimizing the pooled sum of squares is size-weighted only.
                let w = self.pooled_mean;
                (w, self.tied_profile_loglik(w), false)
            }
            VarianceCase::Separate(_, _) => {
                let plug = self.tied_profile_loglik(self.pooled_mean);
                let (lo, hi) = if self.g1.ybar <= self.g2.ybar {
                    (self.g1.ybar, self.g2.ybar)
                } else {
                    (self.g2.ybar, self.g1.ybar)
                };
                if lo == hi {
                    return (lo, self.tied_profile_loglik(lo), false);
                }
                let (w_num, num) = profile_peak(|w| self.tied_profile_loglik(w), lo, hi);
                let (w_best, best) = if num > plug {
                    (w_num, num)
                } else {
                    (self.pooled_mean, plug)
                };
                let fallback = num > plug + 1e-12 * (1.0 + plug.abs());
                // Pad out optimizer slack; see the module comment.
                let padded = best + 1e-12 * (1.0 + best.abs());
                (w_best, padded, fallback)
            }
        }
    }

    fn state_params(&self, state: &MixedState) -> (f64, f64, f64, f64) {
        let (m1, m2) = match state.mean {
            MeanCoord::Tied(w) => (w, w),
            MeanCoord::Split(z1, z2) => (z1, z2),
            other => panic!("two-sample state carries {other:?}, expected tied or split means"),
        };
        let (v1, v2) = match (self.case, state.var) {
            (VarianceCase::Known(v1, v2), VarCoord::Known) => (v1, v2),
            (VarianceCase::Common(_), VarCoord::Common(v)) => (v, v),
            (VarianceCase::Separate(_, _), VarCoord::PerGroup(v1, v2)) => (v1, v2),
            (case, var) => panic!("state variance {var:?} does not match case {case:?}"),
        };
        (m1, m2, v1, v2)
    }

    fn state_ll(&self, state: &MixedState) -> f64 {
        let (m1, m2, v1, v2) = self.state_params(state);
        self.suff_ll(m1, m2, v1, v2)
    }

    fn sample_var_part(&self, stream: &mut ReplayStream) -> Vec<f64> {
        match self.case {
            VarianceCase::Known(_, _) => vec![],
            VarianceCase::Common(ig) => vec![ig.sample(stream)],
            VarianceCase::Separate(ig1, ig2) => vec![ig1.sample(stream), ig2.sample(stream)],
        }
    }

    fn var_coord(&self, record: &DeviateRecord) -> VarCoord {
        match self.case {
            VarianceCase::Known(_, _) => VarCoord::Known,
            VarianceCase::Common(_) => VarCoord::Common(record.candidate[3]),
            VarianceCase::Separate(_, _) => {
                VarCoord::PerGroup(record.candidate[3], record.candidate[4])
            }
        }
    }

    /// Randomized lower-bound check, as in the one-sample model: class
    /// minima must never exceed pointwise ratios on prior-distributed states.
    pub fn verify_dominance(&self, probes: usize, seed: u64) -> Result<()> {
        let mut stream = ReplayStream::from_seed(seed);
        let rand_var = |stream: &mut ReplayStream| match self.case {
            VarianceCase::Known(_, _) => VarCoord::Known,
            VarianceCase::Common(ig) => VarCoord::Common(ig.sample(stream)),
            VarianceCase::Separate(ig1, ig2) => {
                VarCoord::PerGroup(ig1.sample(stream), ig2.sample(stream))
            }
        };
        for _ in 0..probes {
            let state_i = MixedState {
                mean: MeanCoord::Tied(self.tied_slab.sample(&mut stream)),
                var: rand_var(&mut stream),
            };
            let state_ii = MixedState {
                mean: MeanCoord::Split(
                    self.split_slab.sample(&mut stream),
                    self.split_slab.sample(&mut stream),
                ),
                var: rand_var(&mut stream),
            };
            let cand_var = rand_var(&mut stream);
            let cand_into_i = MixedState {
                mean: MeanCoord::Tied(self.tied_slab.sample(&mut stream)),
                var: cand_var,
            };
            let cand_into_ii = MixedState {
                mean: MeanCoord::Split(
                    self.split_slab.sample(&mut stream),
                    self.split_slab.sample(&mut stream),
                ),
                var: cand_var,
            };
            check_dominance(self, &state_ii, &cand_into_i, ClassId::II)?;
            check_dominance(self, &state_i, &cand_into_ii, ClassId::I)?;
        }
        Ok(())
    }
}

impl CouplerModel for TwoSampleModel {
    fn deviates_per_step(&self) -> usize {
        match self.case {
            VarianceCase::Known(_, _) => 3,
            VarianceCase::Common(_) => 4,
            VarianceCase::Separate(_, _) => 5,
        }
    }

    /// Order: tied mean, split mean 1, split mean 2, then variance draws.
    fn sample_step_deviates(&self, stream: &mut ReplayStream) -> Vec<f64> {
        let mut d = vec![
            self.tied_slab.sample(stream),
            self.split_slab.sample(stream),
            self.split_slab.sample(stream),
        ];
        d.extend(self.sample_var_part(stream));
        d
    }

    fn candidate_for_class(&self, class: ClassId, record: &DeviateRecord) -> MixedState {
        debug_assert_eq!(record.candidate.len(), self.deviates_per_step());
        let var = self.var_coord(record);
        match class {
            ClassId::I => MixedState {
                mean: MeanCoord::Split(record.candidate[1], record.candidate[2]),
                var,
            },
            ClassId::II => MixedState {
                mean: MeanCoord::Tied(record.candidate[0]),
                var,
            },
        }
    }

    fn log_accept_ratio(&self, from: &MixedState, to: &MixedState) -> f64 {
        debug_assert_ne!(from.class(), to.class());
        let odds = match to.class() {
            ClassId::I => self.log_odds_tied,
            ClassId::II => -self.log_odds_tied,
        };
        odds + self.state_ll(to) - self.state_ll(from)
    }

    fn min_log_ratio_into(&self, candidate: &MixedState, from_class: ClassId) -> f64 {
        debug_assert_ne!(candidate.class(), from_class);
        let sup = match from_class {
            ClassId::II => self.ml_free,
            ClassId::I => self.ml_null,
        };
        let odds = match candidate.class() {
            ClassId::I => self.log_odds_tied,
            ClassId::II => -self.log_odds_tied,
        };
        odds + self.state_ll(candidate) - sup
    }
}

/// Grid scan plus golden-section polish of every interior local peak.
/// `f` is smooth with at most a few critical points between `lo` and `hi`.
fn profile_peak(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    const GRID: usize = 512;
    let step = (hi - lo) / GRID as f64;
    let values: Vec<f64> = (0..=GRID).map(|i| f(lo + step * i as f64)).collect();
    let mut best = (lo, values[0]);
    for i in 0..=GRID {
        let here = values[i];
        if here > best.1 {
            best = (lo + step * i as f64, here);
        }
        let peak = (i == 0 || values[i - 1] <= here) && (i == GRID || values[i + 1] <= here);
        if !peak {
            continue;
        }
        let a = lo + step * i.saturating_sub(1) as f64;
        let b = (lo + step * (i + 1) as f64).min(hi);
        let (x, fx) = golden_max(&f, a, b);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, f(mid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ig22() -> InvGammaParams {
        InvGammaParams::new(2.0, 2.0).unwrap()
    }

    fn slab4() -> NormalParams {
        NormalParams::new(0.0, 4.0).unwrap()
    }

    fn hand_model(case: VarianceCase) -> TwoSampleModel {
        TwoSampleModel::new(&[0.0, 2.0], &[1.0, 3.0], 0.5, slab4(), slab4(), case).unwrap()
    }

    #[test]
    fn hand_arithmetic_mles_are_exact() {
        let m = hand_model(VarianceCase::Common(ig22()));
        assert_eq!(m.pooled_mean(), 1.5);
        assert_eq!(m.group_mles(), ((1.0, 1.0), (2.0, 1.0)));
        assert_eq!(m.pooled_variance_mles(), (1.0, 1.25));
        // Direct total-variance computation agrees with the decomposition.
        let direct: f64 = [0.0, 2.0, 1.0, 3.0]
            .iter()
            .map(|y| (y - 1.5) * (y - 1.5))
            .sum::<f64>()
            / 4.0;
        assert_eq!(m.pooled_variance_mles().1, direct);
    }

    #[test]
    fn mirrored_groups_have_symmetric_statistics() {
        let y1 = [0.4, -1.2, 2.2];
        let y2: Vec<f64> = y1.iter().map(|y| -y).collect();
        let m = TwoSampleModel::new(
            &y1,
            &y2,
            0.5,
            slab4(),
            slab4(),
            VarianceCase::Separate(ig22(), ig22()),
        )
        .unwrap();
        let ((_, v1), (_, v2)) = m.group_mles();
        assert_eq!(v1, v2);
        assert_eq!(m.pooled_mean(), 0.0);
        let (n1, n2) = m.per_group_null_mles();
        assert_eq!(n1, n2);
    }

    #[test]
    fn constant_groups_are_rejected_when_a_variance_is_estimated() {
        let c = [3.0, 3.0];
        for case in [
            VarianceCase::Common(ig22()),
            VarianceCase::Separate(ig22(), ig22()),
        ] {
            assert!(matches!(
                TwoSampleModel::new(&c, &c, 0.5, slab4(), slab4(), case),
                Err(Error::DegenerateData(_))
            ));
        }
        // Known variances need no variation at all.
        TwoSampleModel::new(&c, &c, 0.5, slab4(), slab4(), VarianceCase::Known(1.0, 2.0)).unwrap();
    }

    #[test]
    fn sufficient_statistics_reproduce_the_full_likelihood() {
        let m = hand_model(VarianceCase::Separate(ig22(), ig22()));
        for &(m1, m2, v1, v2) in &[(0.0, 0.0, 1.0, 1.0), (1.5, -0.3, 0.4, 2.7)] {
            let full: f64 = [(0.0, m1, v1), (2.0, m1, v1), (1.0, m2, v2), (3.0, m2, v2)]
                .iter()
                .map(|&(y, mu, v)| NormalParams::new(mu, v).unwrap().log_pdf(y))
                .sum();
            assert_relative_eq!(
                m.log_likelihood(m1, m2, v1, v2).unwrap(),
                full,
                max_relative = 1e-12
            );
        }
        assert!(m.log_likelihood(0.0, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn equal_mean_equal_variance_state_matches_a_pooled_sample() {
        let m = hand_model(VarianceCase::Known(2.5, 2.5));
        let pooled = NormalParams::new(0.7, 2.5).unwrap();
        let direct: f64 = [0.0, 2.0, 1.0, 3.0].iter().map(|&y| pooled.log_pdf(y)).sum();
        assert_relative_eq!(
            m.log_likelihood(0.7, 0.7, 2.5, 2.5).unwrap(),
            direct,
            max_relative = 1e-12
        );
    }

    #[test]
    fn known_unequal_variances_move_the_tied_optimum_off_the_pooled_mean() {
        let m = hand_model(VarianceCase::Known(1.0, 4.0));
        // Precision weights 2/1 and 2/4: (2*1 + 0.5*2) / 2.5 = 1.2.
        assert_relative_eq!(m.tied_mean_optimum(), 1.2, max_relative = 1e-12);
        let at_opt = m.tied_profile_loglik(1.2);
        for w in [1.5, 1.1, 1.3, 0.0] {
            assert!(m.tied_profile_loglik(w) <= at_opt);
        }
        assert!(!m.profile_fallback_engaged());
        // Equal variances keep it at the pooled mean.
        let eq = hand_model(VarianceCase::Known(2.0, 2.0));
        assert_relative_eq!(eq.tied_mean_optimum(), 1.5, max_relative = 1e-12);
    }

    #[test]
    fn separate_variance_profile_search_beats_a_bad_plug_in() {
        // Group 1 is nearly degenerate at 0, group 2 is diffuse around 10:
        // the tied-class profile peaks near 0, far from the pooled mean 5.
        let m = TwoSampleModel::new(
            &[0.0, 0.02],
            &[9.0, 11.0],
            0.5,
            NormalParams::new(0.0, 100.0).unwrap(),
            NormalParams::new(0.0, 100.0).unwrap(),
            VarianceCase::Separate(ig22(), ig22()),
        )
        .unwrap();
        assert!(m.profile_fallback_engaged());
        assert!(m.tied_mean_optimum() < 1.0);
        assert!(m.tied_profile_loglik(m.tied_mean_optimum()) > m.tied_profile_loglik(5.005));
        m.verify_dominance(10_000, 4242).unwrap();
    }

    #[test]
    fn tame_separate_case_keeps_the_plug_in() {
        let m = hand_model(VarianceCase::Separate(ig22(), ig22()));
        assert!(!m.profile_fallback_engaged());
        assert_relative_eq!(m.tied_mean_optimum(), 1.5, max_relative = 1e-9);
    }

    #[test]
    fn dominance_probes_pass_across_all_cases() {
        for case in [
            VarianceCase::Known(1.0, 4.0),
            VarianceCase::Common(ig22()),
            VarianceCase::Separate(ig22(), ig22()),
        ] {
            hand_model(case).verify_dominance(10_000, 77).unwrap();
        }
    }

    #[test]
    fn ratios_are_antisymmetric() {
        let m = hand_model(VarianceCase::Common(ig22()));
        let a = MixedState {
            mean: MeanCoord::Tied(0.3),
            var: VarCoord::Common(1.4),
        };
        let b = MixedState {
            mean: MeanCoord::Split(-0.5, 2.0),
            var: VarCoord::Common(0.6),
        };
        assert_relative_eq!(
            m.log_accept_ratio(&a, &b),
            -m.log_accept_ratio(&b, &a),
            max_relative = 1e-12
        );
    }

    #[test]
    fn candidates_share_the_variance_part_and_respect_arity() {
        let known = hand_model(VarianceCase::Known(1.0, 4.0));
        assert_eq!(known.deviates_per_step(), 3);
        let common = hand_model(VarianceCase::Common(ig22()));
        assert_eq!(common.deviates_per_step(), 4);
        let sep = hand_model(VarianceCase::Separate(ig22(), ig22()));
        assert_eq!(sep.deviates_per_step(), 5);

        let record = DeviateRecord {
            candidate: vec![0.5, -1.0, 2.0, 0.7, 3.1],
            accept_u: 0.2,
        };
        let into_ii = sep.candidate_for_class(ClassId::I, &record);
        let into_i = sep.candidate_for_class(ClassId::II, &record);
        assert_eq!(into_ii.mean, MeanCoord::Split(-1.0, 2.0));
        assert_eq!(into_i.mean, MeanCoord::Tied(0.5));
        assert_eq!(into_i.var, VarCoord::PerGroup(0.7, 3.1));
        assert_eq!(into_i.var, into_ii.var);
        assert_eq!(into_i.class(), ClassId::I);
        assert_eq!(into_ii.class(), ClassId::II);
    }

    #[test]
    #[should_panic(expected = "does not match case")]
    fn mismatched_variance_layout_panics() {
        let m = hand_model(VarianceCase::Common(ig22()));
        let bad = MixedState {
            mean: MeanCoord::Tied(0.0),
            var: VarCoord::PerGroup(1.0, 1.0),
        };
        let good = MixedState {
            mean: MeanCoord::Split(0.0, 1.0),
            var: VarCoord::Common(1.0),
        };
        let _ = m.log_accept_ratio(&bad, &good);
    }
}
