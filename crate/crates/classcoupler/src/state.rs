//! State representation for targets that mix continuous components with a
//! lower-dimensional null structure.

/// Which side of the null a state lies on.
///
/// Class I is the null class (at the atom, or on the tied-mean diagonal);
/// class II is the unrestricted class. The coupling engine ships with these
/// two; the model contract would admit more.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassId {
    I,
    II,
}

impl ClassId {
    pub fn other(self) -> ClassId {
        match self {
            ClassId::I => ClassId::II,
            ClassId::II => ClassId::I,
        }
    }
}

/// Mean component of a state. The tag is structural: a free mean that happens
/// to equal the atom numerically is still a free mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanCoord {
    /// Scalar mean sitting exactly at the model's point null.
    Atom,
    /// Scalar mean off the null.
    Free(f64),
    /// Two-group common mean (the two-sample null).
    Tied(f64),
    /// Two distinct group means.
    Split(f64, f64),
}

/// Variance component of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarCoord {
    /// Variances are fixed model constants, not state coordinates.
    Known,
    /// One shared unknown variance.
    Common(f64),
    /// One unknown variance per group.
    PerGroup(f64, f64),
}

/// A point of the target's state space.
///
/// Equality is exact and tag-aware: merge checks in the coupling engine
/// compare bit-for-bit, never within a tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedState {
    pub mean: MeanCoord,
    pub var: VarCoord,
}

impl MixedState {
    pub fn class(&self) -> ClassId {
        match self.mean {
            MeanCoord::Atom | MeanCoord::Tied(_) => ClassId::I,
            MeanCoord::Free(_) | MeanCoord::Split(_, _) => ClassId::II,
        }
    }

    /// True when the state satisfies the null (atom or tied means).
    pub fn is_null(&self) -> bool {
        self.class() == ClassId::I
    }

    /// Variance coordinates must be strictly positive; tags must be one of
    /// the shipped layouts. Used by debug assertions in the engine.
    pub fn is_valid(&self) -> bool {
        let mean_ok = match self.mean {
            MeanCoord::Atom => true,
            MeanCoord::Free(m) | MeanCoord::Tied(m) => m.is_finite(),
            MeanCoord::Split(a, b) => a.is_finite() && b.is_finite(),
        };
        let var_ok = match self.var {
            VarCoord::Known => true,
            VarCoord::Common(v) => v.is_finite() && v > 0.0,
            VarCoord::PerGroup(a, b) => a.is_finite() && a > 0.0 && b.is_finite() && b > 0.0,
        };
        mean_ok && var_ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes_follow_the_mean_tag() {
        let atom = MixedState {
            mean: MeanCoord::Atom,
            var: VarCoord::Common(1.0),
        };
        let free = MixedState {
            mean: MeanCoord::Free(0.0),
            var: VarCoord::Common(1.0),
        };
        assert_eq!(atom.class(), ClassId::I);
        assert_eq!(free.class(), ClassId::II);
        assert!(atom.is_null());
        assert!(!free.is_null());
    }

    #[test]
    fn equality_is_structural_not_numeric() {
        // A free mean numerically at zero is not the atom.
        let a = MixedState {
            mean: MeanCoord::Atom,
            var: VarCoord::Known,
        };
        let b = MixedState {
            mean: MeanCoord::Free(0.0),
            var: VarCoord::Known,
        };
        assert_ne!(a, b);
        let c = MixedState {
            mean: MeanCoord::Tied(1.0),
            var: VarCoord::Known,
        };
        let d = MixedState {
            mean: MeanCoord::Split(1.0, 1.0),
            var: VarCoord::Known,
        };
        assert_ne!(c, d);
    }

    #[test]
    fn validity_requires_positive_variances() {
        let bad = MixedState {
            mean: MeanCoord::Free(1.0),
            var: VarCoord::Common(0.0),
        };
        assert!(!bad.is_valid());
        let bad2 = MixedState {
            mean: MeanCoord::Split(1.0, 2.0),
            var: VarCoord::PerGroup(1.0, -0.5),
        };
        assert!(!bad2.is_valid());
    }
}
