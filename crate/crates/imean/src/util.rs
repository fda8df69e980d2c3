//! Small shared helpers: a deterministic PRNG for seeded suites and
//! rational parsing/printing in `p/q` form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// SplitMix64: tiny, deterministic, good enough for reproducible test
/// instance generation. Not cryptographic.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..bound` (bound > 0).
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0);
        (self.next_u64() % bound as u64) as usize
    }

    pub fn chance(&mut self, num: u32, den: u32) -> bool {
        (self.next_u64() % den as u64) < num as u64
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

/// Render a rational as `p/q` in lowest terms with positive denominator,
/// or just `p` when the denominator is one.
pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `p/q` or `p` into an exact rational.
pub fn rational_from_str(s: &str) -> Result<BigRational> {
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::InvalidInput(format!("bad integer `{t}`")))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let num = parse_int(p)?;
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::InvalidInput(format!("zero denominator in `{s}`")));
            }
            Ok(BigRational::new(num, den))
        }
    }
}

/// Non-negative rational check used by mean/tower validation.
pub fn is_nonnegative(r: &BigRational) -> bool {
    !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_is_deterministic() {
        let mut a = SplitMix64::new(7);
        let mut b = SplitMix64::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn rational_round_trip() {
        for s in ["0", "1", "-3", "2/3", "-7/9", "10/4"] {
            let r = rational_from_str(s).unwrap();
            let back = rational_from_str(&rational_to_string(&r)).unwrap();
            assert_eq!(r, back);
        }
        assert_eq!(rational_to_string(&rational_from_str("10/4").unwrap()), "5/2");
        assert!(rational_from_str("1/0").is_err());
        assert!(rational_from_str("x").is_err());
    }
}
