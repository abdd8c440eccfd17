//! Binomial coefficients mod p via Lucas' theorem.

use crate::fp::Fp;

/// `C(m, n) mod p` computed digit-by-digit in base p: the product of the
/// digitwise binomials, which vanishes exactly when some digit of n exceeds
/// the corresponding digit of m.
pub fn binomial_mod_p(fp: Fp, m: u64, n: u64) -> u32 {
    if n > m {
        return 0;
    }
    let p = fp.p() as u64;
    let (mut m, mut n) = (m, n);
    let mut acc = 1u32;
    while n > 0 || m > 0 {
        let (md, nd) = (m % p, n % p);
        if nd > md {
            return 0;
        }
        acc = fp.mul(acc, small_binomial(fp, md as u32, nd as u32));
        m /= p;
        n /= p;
    }
    acc
}

/// `C(a, b) mod p` for digits `b ≤ a < p`, by the multiplicative formula.
fn small_binomial(fp: Fp, a: u32, b: u32) -> u32 {
    let b = b.min(a - b);
    let mut num = 1u32;
    let mut den = 1u32;
    for k in 0..b {
        num = fp.mul(num, (a - k) % fp.p());
        den = fp.mul(den, (k + 1) % fp.p());
    }
    fp.mul(num, fp.inv(den))
}

/// Exact binomial coefficient, for cross-checking the modular path in tests
/// and for small multiplicity counts. Fits u128 comfortably for m ≤ 120.
pub fn binomial_exact(m: u64, n: u64) -> u128 {
    if n > m {
        return 0;
    }
    let n = n.min(m - n);
    let mut acc: u128 = 1;
    for k in 0..n {
        acc = acc * (m - k) as u128 / (k + 1) as u128;
    }
    acc
}
