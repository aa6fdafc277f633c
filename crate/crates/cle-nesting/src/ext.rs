//! Extended real values.
//!
//! Rate functions and Fenchel-Legendre conjugates are genuinely infinite in
//! well-defined situations (a weight outside its support, an empty phase),
//! and those cases are carried as explicit variants instead of IEEE
//! infinities so that finite arithmetic never silently mixes with sentinel
//! values. The variant order makes the derived comparison match the order
//! of the extended real line.

use std::fmt;

/// A point of the extended real line \[-inf, +inf\].
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub enum Extended {
    NegInf,
    Finite(f64),
    PosInf,
}

impl Extended {
    /// The finite payload, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    /// Unwrap a value that the caller knows to be finite.
    ///
    /// Panics with `what` in the message otherwise; meant for contexts where
    /// finiteness is an established invariant, mostly tests.
    pub fn expect_finite(self, what: &str) -> f64 {
        match self {
            Extended::Finite(v) => v,
            other => panic!("{what}: expected finite value, got {other}"),
        }
    }

    /// Multiply by a strictly positive scalar. Infinite values are fixed
    /// points of the scaling.
    pub fn scale(self, c: f64) -> Extended {
        debug_assert!(c > 0.0, "scale factor must be positive, got {c}");
        match self {
            Extended::Finite(v) => Extended::Finite(c * v),
            inf => inf,
        }
    }

    /// Extended addition. The indeterminate form (+inf) + (-inf) never
    /// arises in this crate (rates are bounded below by zero) and panics.
    pub fn add(self, rhs: Extended) -> Extended {
        use Extended::*;
        match (self, rhs) {
            (Finite(a), Finite(b)) => Finite(a + b),
            (PosInf, NegInf) | (NegInf, PosInf) => {
                panic!("indeterminate extended sum (+inf) + (-inf)")
            }
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
        }
    }
}

impl From<f64> for Extended {
    fn from(v: f64) -> Self {
        debug_assert!(v.is_finite(), "Extended::from expects a finite float");
        Extended::Finite(v)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInf => write!(f, "-inf"),
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::PosInf => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::Extended::{self, *};

    #[test]
    fn ordering_follows_the_extended_line() {
        assert!(NegInf < Finite(-1e300));
        assert!(Finite(3.0) < Finite(4.0));
        assert!(Finite(1e300) < PosInf);
        assert!(NegInf < PosInf);
    }

    #[test]
    fn scaling_fixes_infinities() {
        assert_eq!(PosInf.scale(0.25), PosInf);
        assert_eq!(Finite(2.0).scale(0.25), Finite(0.5));
    }

    #[test]
    fn addition_absorbs_infinities() {
        assert_eq!(PosInf.add(Finite(-5.0)), PosInf);
        assert_eq!(Finite(1.0).add(Finite(2.0)), Finite(3.0));
        assert_eq!(NegInf.add(Finite(7.0)), NegInf);
    }

    #[test]
    fn display_uses_inf_tokens() {
        assert_eq!(PosInf.to_string(), "inf");
        assert_eq!(NegInf.to_string(), "-inf");
        assert_eq!(Extended::Finite(0.5).to_string(), "0.5");
    }
}
