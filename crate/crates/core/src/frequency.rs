//! Reduced rational frequencies.

use core::cmp::Ordering;
use core::fmt;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    gcd(a, b)
}

/// Least common multiple, `None` on overflow.
pub fn lcm_u64(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}

/// A rational `num/den` with `den > 0` and `gcd(|num|, den) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Frequency {
    num: i64,
    den: u64,
}

impl Frequency {
    pub const ZERO: Frequency = Frequency { num: 0, den: 1 };

    /// Reduces `num/den`.
    ///
    /// # Panics
    /// If `den == 0` or the reduced numerator does not fit in `i64`.
    pub fn new(num: i64, den: u64) -> Self {
        Self::from_wide(num as i128, den as u128).expect("frequency overflow or zero denominator")
    }

    /// Reduces a wide fraction, `None` if `den == 0` or the result overflows.
    pub fn from_wide(num: i128, den: u128) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let g = {
            let (mut a, mut b) = (num.unsigned_abs(), den);
            while b != 0 {
                let t = a % b;
                a = b;
                b = t;
            }
            a
        };
        let num = i64::try_from(num / g as i128).ok()?;
        let den = u64::try_from(den / g).ok()?;
        Some(Self { num, den })
    }

    pub fn integer(k: i64) -> Self {
        Self { num: k, den: 1 }
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// Sign: -1, 0 or 1.
    pub fn signum(self) -> i64 {
        self.num.signum()
    }

    /// `q·n ∈ Z`, the membership test of the level-`n` filter.
    pub fn in_level(self, n: u64) -> bool {
        n % self.den == 0
    }

    pub fn checked_add(self, o: Self) -> Option<Self> {
        let num = self.num as i128 * o.den as i128 + o.num as i128 * self.den as i128;
        Self::from_wide(num, self.den as u128 * o.den as u128)
    }

    /// `q·k` for an integer `k`.
    pub fn checked_mul_int(self, k: i64) -> Option<Self> {
        Self::from_wide(self.num as i128 * k as i128, self.den as u128)
    }
}

impl core::ops::Neg for Frequency {
    type Output = Self;

    fn neg(self) -> Self {
        Self { num: -self.num, den: self.den }
    }
}

impl Ord for Frequency {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.num as i128 * o.den as i128).cmp(&(o.num as i128 * self.den as i128))
    }
}

impl PartialOrd for Frequency {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_and_order() {
        assert_eq!(Frequency::new(2, 4), Frequency::new(1, 2));
        assert_eq!(Frequency::new(-3, 6), Frequency::new(-1, 2));
        assert_eq!(Frequency::new(0, 7), Frequency::ZERO);
        assert!(Frequency::new(1, 3) < Frequency::new(1, 2));
        assert!(Frequency::new(-1, 2) < Frequency::ZERO);
        assert_eq!(
            Frequency::new(1, 2).checked_add(Frequency::new(1, 3)).unwrap(),
            Frequency::new(5, 6)
        );
    }

    #[test]
    fn level_membership() {
        assert!(Frequency::new(1, 2).in_level(2));
        assert!(Frequency::new(1, 2).in_level(6));
        assert!(!Frequency::new(1, 3).in_level(2));
        assert!(Frequency::integer(5).in_level(1));
    }

    #[test]
    fn overflow_is_detected() {
        let big = Frequency::new(i64::MAX, 1);
        assert!(big.checked_add(big).is_none());
        assert_eq!(lcm_u64(u64::MAX, 2), None);
    }
}
