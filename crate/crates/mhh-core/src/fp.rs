//! Arithmetic in the prime field F_p.
//!
//! Scalars are bare `u32` values in `0..p`; the modulus lives in the `Fp`
//! context that every operation takes, not in the values themselves.

use crate::{Error, Result};

/// A prime-field context. Copy-cheap; pass by value.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Fp {
    p: u32,
}

impl Fp {
    /// Builds the field F_p, rejecting non-prime moduli.
    pub fn new(p: u64) -> Result<Fp> {
        if p < 2 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p > u32::MAX as u64 {
            return Err(Error::Unsupported(format!("modulus {p} too large")));
        }
        Ok(Fp { p: p as u32 })
    }

    pub fn p(self) -> u32 {
        self.p
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.p as u64) as u32
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1u32;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat's little theorem. Panics on zero:
    /// callers divide only by scalars they know are units.
    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.p != 0, "division by zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    /// Canonical representative of a possibly-negative integer.
    pub fn reduce_i64(self, a: i64) -> u32 {
        let p = self.p as i64;
        (((a % p) + p) % p) as u32
    }

    /// The sign (−1)^k as a scalar.
    pub fn sign(self, k: i64) -> u32 {
        if k % 2 == 0 {
            1
        } else {
            self.neg(1)
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_moduli() {
        assert_eq!(Fp::new(4), Err(Error::NotPrime(4)));
        assert_eq!(Fp::new(1), Err(Error::NotPrime(1)));
        assert_eq!(Fp::new(0), Err(Error::NotPrime(0)));
        assert!(Fp::new(2).is_ok());
        assert!(Fp::new(3).is_ok());
        assert!(Fp::new(97).is_ok());
    }

    #[test]
    fn field_arithmetic() {
        let f3 = Fp::new(3).unwrap();
        assert_eq!(f3.add(2, 2), 1);
        assert_eq!(f3.sub(0, 1), 2);
        assert_eq!(f3.mul(2, 2), 1);
        assert_eq!(f3.inv(2), 2);
        assert_eq!(f3.reduce_i64(-4), 2);
        assert_eq!(f3.sign(3), 2);
        assert_eq!(f3.sign(-2), 1);
        let f5 = Fp::new(5).unwrap();
        for a in 1..5 {
            assert_eq!(f5.mul(a, f5.inv(a)), 1);
        }
    }
}
