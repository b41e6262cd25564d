//! Exact dyadic rationals (`mantissa * 2^exp`) with arbitrary-precision
//! mantissas.
//!
//! Every finite `f64` is a dyadic rational, and differences, sums and
//! products of dyadics are again dyadics, so the grid oracle can accumulate
//! cell volumes without any rounding. Rounding happens exactly once, in
//! [`Dyadic::to_f64`], which makes oracle results a deterministic function
//! of the mathematical value: two exactly equal measures produce the same
//! `f64` bit pattern even when summed over different grids.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Dyadic {
    mantissa: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            mantissa: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            mantissa: BigInt::one(),
            exp: 0,
        }
    }

    /// Exact decomposition of a finite `f64` into `mantissa * 2^exp`.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "dyadic conversion needs a finite value");
        if x == 0.0 {
            return Dyadic::zero();
        }
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let exp_field = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mag, exp) = if exp_field == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_field - 1075)
        };
        let sign = if negative { Sign::Minus } else { Sign::Plus };
        Dyadic {
            mantissa: BigInt::from_biguint(sign, BigUint::from(mag)),
            exp,
        }
        .normalized()
    }

    /// Exact difference `hi - lo` of two finite `f64` values.
    pub fn from_f64_diff(hi: f64, lo: f64) -> Self {
        Dyadic::from_f64(hi).sub(&Dyadic::from_f64(lo))
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let exp = self.exp.min(other.exp);
        let a = &self.mantissa << u64::try_from(self.exp - exp).unwrap();
        let b = &other.mantissa << u64::try_from(other.exp - exp).unwrap();
        Dyadic {
            mantissa: a + b,
            exp,
        }
        .normalized()
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        let exp = self.exp.min(other.exp);
        let a = &self.mantissa << u64::try_from(self.exp - exp).unwrap();
        let b = &other.mantissa << u64::try_from(other.exp - exp).unwrap();
        Dyadic {
            mantissa: a - b,
            exp,
        }
        .normalized()
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic {
            mantissa: &self.mantissa * &other.mantissa,
            exp: self.exp + other.exp,
        }
        .normalized()
    }

    /// Canonical form: odd mantissa (or zero with exponent zero), so that
    /// equal values compare equal structurally.
    fn normalized(mut self) -> Dyadic {
        if self.mantissa.is_zero() {
            self.exp = 0;
            return self;
        }
        if let Some(shift) = self.mantissa.trailing_zeros() {
            if shift > 0 {
                self.mantissa >>= shift;
                self.exp += i64::try_from(shift).unwrap();
            }
        }
        self
    }

    /// Nearest-representable conversion, deterministic in the exact value.
    pub fn to_f64(&self) -> f64 {
        if self.mantissa.is_zero() {
            return 0.0;
        }
        let negative = self.mantissa.sign() == Sign::Minus;
        let mag = self.mantissa.magnitude();
        let bits = mag.bits();
        let (m, e) = if bits <= 53 {
            (mag.to_u64().expect("fits in 53 bits"), self.exp)
        } else {
            let shift = bits - 53;
            let mut top = (mag >> shift).to_u64().expect("shifted to 53 bits");
            // Round half away from zero on the dropped bits.
            if ((mag >> (shift - 1)).to_u64().unwrap() & 1) == 1 {
                top += 1;
            }
            (top, self.exp + i64::try_from(shift).unwrap())
        };
        let value = scale_by_pow2(m as f64, e);
        if negative {
            -value
        } else {
            value
        }
    }
}

/// `x * 2^e` in steps small enough that no intermediate scale factor
/// overflows. Power-of-two scaling is exact while the result stays in
/// range, so chunking loses nothing.
fn scale_by_pow2(x: f64, e: i64) -> f64 {
    let mut result = x;
    let mut rem = e;
    while rem != 0 && result != 0.0 && result.is_finite() {
        let step = rem.clamp(-900, 900);
        result *= 2f64.powi(step as i32);
        rem -= step;
    }
    result
}
