//! Tridegrees (filtration, topological degree, motivic weight) and the
//! derived gradings: stem and Chow degree.

use serde::Serialize;

/// The trigrading `(f, d, w)`: bar filtration, topological degree, weight.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct Tridegree {
    pub f: i64,
    pub d: i64,
    pub w: i64,
}

impl Tridegree {
    pub const ZERO: Tridegree = Tridegree { f: 0, d: 0, w: 0 };

    pub fn new(f: i64, d: i64, w: i64) -> Tridegree {
        Tridegree { f, d, w }
    }

    /// Total (abutment) degree `f + d`.
    pub fn stem(self) -> i64 {
        self.f + self.d
    }

    /// Chow degree `c = f + 2w − d`. Nonzero classes of the pages under
    /// consideration satisfy `0 ≤ c ≤ f` before τ-powers are factored in,
    /// which is what drives the vanishing arguments.
    pub fn chow(self) -> i64 {
        self.f + 2 * self.w - self.d
    }

    pub fn bidegree(self) -> Bidegree {
        Bidegree { stem: self.stem(), w: self.w }
    }

    pub fn add(self, other: Tridegree) -> Tridegree {
        Tridegree { f: self.f + other.f, d: self.d + other.d, w: self.w + other.w }
    }

    pub fn scale(self, n: i64) -> Tridegree {
        Tridegree { f: self.f * n, d: self.d * n, w: self.w * n }
    }

    /// Parity governing Koszul signs: stem parity (≡ Chow parity mod 2).
    pub fn sign_parity(self) -> u8 {
        (self.stem().rem_euclid(2)) as u8
    }
}

/// The abutment bigrading `(stem, weight)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct Bidegree {
    pub stem: i64,
    pub w: i64,
}

impl Bidegree {
    pub fn new(stem: i64, w: i64) -> Bidegree {
        Bidegree { stem, w }
    }

    pub fn add(self, other: Bidegree) -> Bidegree {
        Bidegree { stem: self.stem + other.stem, w: self.w + other.w }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chow_degree_examples() {
        // τ has tridegree (0, 0, −1), so c(τ) = −2.
        assert_eq!(Tridegree::new(0, 0, -1).chow(), -2);
        // λ̄_1 at p=2: (1, 2, 1) with c = 1.
        assert_eq!(Tridegree::new(1, 2, 1).chow(), 1);
        // γ_{p^j}μ̄_i has c = 0; here p=2, i=0, j=1 gives (2, 2, 0).
        assert_eq!(Tridegree::new(2, 2, 0).chow(), 0);
        assert_eq!(Tridegree::new(2, 2, 0).stem(), 4);
    }

    #[test]
    fn stem_and_chow_parity_agree() {
        for f in -3..4 {
            for d in -3..4 {
                for w in -3..4 {
                    let t = Tridegree::new(f, d, w);
                    assert_eq!(t.stem().rem_euclid(2), t.chow().rem_euclid(2));
                }
            }
        }
    }
}
