//! Exact arithmetic in number fields and in a transcendental polynomial ring.

pub mod field;
pub mod interval;
pub mod linalg;
pub mod poly;
pub mod rational;
pub mod ring;
pub mod roots;
pub mod symbolic;

use std::sync::atomic::{AtomicU32, Ordering};

use num_traits::{Signed, Zero};

pub use field::NumberField;
pub use interval::{ComplexInterval, Interval};
pub use poly::QPoly;
pub use rational::{parse_rational, q, qr, Q};
pub use ring::{Ring, RingElem};
pub use symbolic::{Symbol, SymbolicRing};

/// Working precision, in bits, of the first attempt at a sign decision.
pub const PRECISION_START: u32 = 64;
/// Default precision beyond which an undecided sign is reported as an error.
pub const PRECISION_CAP: u32 = 16384;

static CAP: AtomicU32 = AtomicU32::new(PRECISION_CAP);

/// The current precision cap, in bits.
pub fn precision_cap() -> u32 {
    CAP.load(Ordering::Relaxed)
}

/// Sets the process-wide precision cap; it must be at least `PRECISION_START`.
pub fn set_precision_cap(bits: u32) -> crate::Result<()> {
    if bits < PRECISION_START {
        return Err(crate::Error::InvalidArgument(format!(
            "precision cap must be at least {PRECISION_START} bits"
        )));
    }
    CAP.store(bits, Ordering::Relaxed);
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(x: &Q) -> Sign {
        if x.is_zero() {
            Sign::Zero
        } else if x.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }
}
