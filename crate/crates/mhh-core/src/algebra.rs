//! Trigraded commutative algebras presented by generators with kinds.
//!
//! A `GeneratorSpec` carries a name, a tridegree, and a kind: polynomial,
//! exterior, height-truncated polynomial, or divided power. Monomials are
//! canonical sorted exponent vectors; elements are scalar combinations.
//! Multiplication inserts divided-power binomials (γ_m γ_n = C(m+n,m) γ_{m+n})
//! and Koszul signs by stem parity — the parity of filtration + topological
//! degree, which equals Chow-degree parity. Stem parity (rather than bare
//! topological degree) is what makes every divided-power class even and every
//! suspension of an even class odd, matching the graded commutativity of the
//! homotopy rings these algebras present.

use crate::binom::binomial_mod_p;
use crate::fp::Fp;
use crate::grading::Tridegree;
use crate::{Error, Result};
use std::collections::BTreeMap;

pub type GenId = usize;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GeneratorKind {
    Polynomial,
    /// Square-zero; for odd p the generator must have odd stem.
    Exterior,
    /// x^h = 0 with h ≥ 2.
    Truncated(u32),
    /// Basis {γ_n(x)}; the exponent stored on the generator is the γ-index.
    DividedPower,
}

#[derive(Clone, Debug)]
pub struct GeneratorSpec {
    pub name: String,
    pub kind: GeneratorKind,
    pub degree: Tridegree,
}

/// A presentation: an ordered list of generators. The list order is the
/// canonical monomial order (earlier generators sort first).
#[derive(Clone, Debug, Default)]
pub struct AlgebraSpec {
    pub generators: Vec<GeneratorSpec>,
}

impl AlgebraSpec {
    pub fn new(generators: Vec<GeneratorSpec>) -> AlgebraSpec {
        AlgebraSpec { generators }
    }

    /// Checks the sign-consistency invariants for characteristic p:
    /// truncation heights are ≥ 2; at odd p exterior generators have odd stem
    /// and divided-power generators have even stem (else squares misbehave).
    pub fn validate(&self, fp: Fp) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for g in &self.generators {
            if !seen.insert(g.name.clone()) {
                return Err(Error::BadGenerator(format!("duplicate generator {}", g.name)));
            }
            match g.kind {
                GeneratorKind::Truncated(h) if h < 2 => {
                    return Err(Error::BadGenerator(format!(
                        "truncation height {h} < 2 on {}",
                        g.name
                    )));
                }
                GeneratorKind::Exterior if fp.p() != 2 && g.degree.stem() % 2 == 0 => {
                    return Err(Error::BadGenerator(format!(
                        "exterior generator {} has even stem at odd p",
                        g.name
                    )));
                }
                GeneratorKind::DividedPower if fp.p() != 2 && g.degree.stem() % 2 != 0 => {
                    return Err(Error::BadGenerator(format!(
                        "divided-power generator {} has odd stem at odd p",
                        g.name
                    )));
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn by_name(&self, name: &str) -> Option<GenId> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn degree(&self, g: GenId) -> Tridegree {
        self.generators[g].degree
    }

    /// Parity (for Koszul signs) of x^e resp. γ_e(x): e · stem-parity of x.
    fn factor_parity(&self, g: GenId, e: u32) -> u8 {
        (self.generators[g].degree.sign_parity() * (e % 2) as u8) % 2
    }

    pub fn monomial_degree(&self, m: &Monomial) -> Tridegree {
        let mut t = Tridegree::ZERO;
        for &(g, e) in &m.0 {
            t = t.add(self.degree(g).scale(e as i64));
        }
        t
    }

    /// Multiplies two monomials: `None` when the product vanishes (exterior
    /// square, truncation overflow, or divided-power binomial ≡ 0), otherwise
    /// the canonical monomial with its scalar (sign × binomials).
    pub fn mul_monomials(&self, fp: Fp, a: &Monomial, b: &Monomial) -> Option<(Monomial, u32)> {
        // Parity of the a-suffix from each position, for Koszul bookkeeping.
        let mut suffix = vec![0u8; a.0.len() + 1];
        for i in (0..a.0.len()).rev() {
            let (g, e) = a.0[i];
            suffix[i] = (suffix[i + 1] + self.factor_parity(g, e)) % 2;
        }
        let mut out = Vec::with_capacity(a.0.len() + b.0.len());
        let mut coeff = 1u32;
        let mut sign = 0u8;
        let (mut i, mut j) = (0, 0);
        while i < a.0.len() || j < b.0.len() {
            if j >= b.0.len() {
                out.push(a.0[i]);
                i += 1;
            } else if i >= a.0.len() || b.0[j].0 < a.0[i].0 {
                let (g, e) = b.0[j];
                sign = (sign + self.factor_parity(g, e) * suffix[i]) % 2;
                out.push((g, e));
                j += 1;
            } else if a.0[i].0 < b.0[j].0 {
                out.push(a.0[i]);
                i += 1;
            } else {
                let (g, ea) = a.0[i];
                let (_, eb) = b.0[j];
                // The b-factor crosses only the strictly-later a-factors.
                sign = (sign + self.factor_parity(g, eb) * suffix[i + 1]) % 2;
                let e = ea + eb;
                match self.generators[g].kind {
                    GeneratorKind::Polynomial => out.push((g, e)),
                    GeneratorKind::Exterior => return None,
                    GeneratorKind::Truncated(h) => {
                        if e >= h {
                            return None;
                        }
                        out.push((g, e));
                    }
                    GeneratorKind::DividedPower => {
                        let c = binomial_mod_p(fp, e as u64, ea as u64);
                        if c == 0 {
                            return None;
                        }
                        coeff = fp.mul(coeff, c);
                        out.push((g, e));
                    }
                }
                i += 1;
                j += 1;
            }
        }
        if sign == 1 {
            coeff = fp.neg(coeff);
        }
        Some((Monomial(out), coeff))
    }

    /// Human-readable monomial label, e.g. `tau^2*gamma_4(mu_bar_0)`.
    pub fn monomial_label(&self, m: &Monomial) -> String {
        if m.0.is_empty() {
            return "1".to_string();
        }
        let parts: Vec<String> = m
            .0
            .iter()
            .map(|&(g, e)| {
                let name = &self.generators[g].name;
                match self.generators[g].kind {
                    GeneratorKind::DividedPower if e > 1 => format!("gamma_{e}({name})"),
                    _ if e > 1 => format!("{name}^{e}"),
                    _ => name.clone(),
                }
            })
            .collect();
        parts.join("*")
    }

    pub fn element_label(&self, fp: Fp, e: &Element) -> String {
        if e.is_zero() {
            return "0".to_string();
        }
        let _ = fp;
        let parts: Vec<String> = e
            .terms
            .iter()
            .map(|(m, &c)| {
                let label = self.monomial_label(m);
                if c == 1 {
                    label
                } else if m.0.is_empty() {
                    format!("{c}")
                } else {
                    format!("{c}*{label}")
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// Canonical monomial: sorted generator/exponent pairs, exponents ≥ 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(Vec<(GenId, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    /// Builds from arbitrary pairs; merges duplicates additively (callers
    /// constructing γ-classes pass the γ-index directly as the exponent).
    pub fn from_pairs(pairs: &[(GenId, u32)]) -> Monomial {
        let mut map: BTreeMap<GenId, u32> = BTreeMap::new();
        for &(g, e) in pairs {
            if e > 0 {
                *map.entry(g).or_insert(0) += e;
            }
        }
        Monomial(map.into_iter().collect())
    }

    pub fn generator(g: GenId) -> Monomial {
        Monomial(vec![(g, 1)])
    }

    pub fn power(g: GenId, e: u32) -> Monomial {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(g, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, g: GenId) -> u32 {
        self.0
            .binary_search_by_key(&g, |&(h, _)| h)
            .map(|k| self.0[k].1)
            .unwrap_or(0)
    }

    pub fn factors(&self) -> &[(GenId, u32)] {
        &self.0
    }

    /// The monomial with generator `g` removed.
    pub fn without(&self, g: GenId) -> Monomial {
        Monomial(self.0.iter().copied().filter(|&(h, _)| h != g).collect())
    }

    /// Replaces the exponent of `g` (0 removes the factor).
    pub fn with_exponent(&self, g: GenId, e: u32) -> Monomial {
        let mut v: Vec<(GenId, u32)> =
            self.0.iter().copied().filter(|&(h, _)| h != g).collect();
        if e > 0 {
            v.push((g, e));
            v.sort_by_key(|&(h, _)| h);
        }
        Monomial(v)
    }
}

/// A finite scalar combination of monomials.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Element {
    terms: BTreeMap<Monomial, u32>,
}

impl Element {
    pub fn zero() -> Element {
        Element::default()
    }

    pub fn one() -> Element {
        Element::term(Monomial::one(), 1)
    }

    pub fn term(m: Monomial, c: u32) -> Element {
        let mut e = Element::zero();
        if c != 0 {
            e.terms.insert(m, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, fp: Fp, m: Monomial, c: u32) {
        let c = c % fp.p();
        if c == 0 {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = fp.add(*o.get(), c);
                if v == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, fp: Fp, other: &Element) -> Element {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(fp, m.clone(), c);
        }
        out
    }

    pub fn scale(&self, fp: Fp, c: u32) -> Element {
        let mut out = Element::zero();
        for (m, a) in self.terms() {
            out.add_term(fp, m.clone(), fp.mul(a, c));
        }
        out
    }

    pub fn sub(&self, fp: Fp, other: &Element) -> Element {
        self.add(fp, &other.scale(fp, fp.neg(1)))
    }

    pub fn mul(&self, fp: Fp, spec: &AlgebraSpec, other: &Element) -> Element {
        let mut out = Element::zero();
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                if let Some((m, c)) = spec.mul_monomials(fp, ma, mb) {
                    out.add_term(fp, m, fp.mul(fp.mul(ca, cb), c));
                }
            }
        }
        out
    }

    /// True when every monomial is homogeneous of the same tridegree; returns
    /// that tridegree (None for 0 or inhomogeneous).
    pub fn homogeneous_degree(&self, spec: &AlgebraSpec) -> Option<Tridegree> {
        let mut it = self.terms.keys();
        let first = spec.monomial_degree(it.next()?);
        for m in it {
            if spec.monomial_degree(m) != first {
                return None;
            }
        }
        Some(first)
    }
}

/// Bounds for basis enumeration. `stem_max` always applies; the optional
/// windows additionally filter (and, for stem-0 generators like τ, bound) the
/// search.
#[derive(Clone, Copy, Debug)]
pub struct EnumBounds {
    pub stem_max: i64,
    pub w_min: Option<i64>,
    pub w_max: Option<i64>,
    pub f_max: Option<i64>,
}

impl EnumBounds {
    pub fn stems(stem_max: i64) -> EnumBounds {
        EnumBounds { stem_max, w_min: None, w_max: None, f_max: None }
    }

    pub fn with_weights(stem_max: i64, w_min: i64, w_max: i64) -> EnumBounds {
        EnumBounds { stem_max, w_min: Some(w_min), w_max: Some(w_max), f_max: None }
    }

    fn admits(&self, t: Tridegree) -> bool {
        t.stem() <= self.stem_max
            && self.w_min.is_none_or(|w| t.w >= w)
            && self.w_max.is_none_or(|w| t.w <= w)
            && self.f_max.is_none_or(|f| t.f <= f)
    }
}

/// Enumerates all monomials inside the bounds, sorted canonically. Errors when
/// some generator makes the region provably infinite (nonpositive stem with
/// nothing else bounding it). `caps` optionally overrides the per-generator
/// exponent cap (e.g. normalized Steenrod monomials cap τ_i at 1).
pub fn basis_enumerate(
    spec: &AlgebraSpec,
    bounds: EnumBounds,
    caps: Option<&[Option<u32>]>,
) -> Result<Vec<Monomial>> {
    let n = spec.generators.len();
    let kind_cap = |g: &GeneratorSpec| match g.kind {
        GeneratorKind::Exterior => 1u32,
        GeneratorKind::Truncated(h) => h - 1,
        _ => u32::MAX,
    };
    let user_cap =
        |g: GenId| caps.and_then(|c| c.get(g).copied().flatten()).unwrap_or(u32::MAX);
    // A finite cap, from the generator kind or from the caller, bounds a
    // generator's exponents no matter what region is asked for.
    let hard_cap = |g: GenId| kind_cap(&spec.generators[g]).min(user_cap(g));

    // Uncapped stem-0 generators of opposite weight signs can compensate each
    // other indefinitely inside a weight window: that region is genuinely
    // infinite.
    let stem0_uncapped = |sign: i64| {
        spec.generators.iter().enumerate().any(|(g, gen)| {
            gen.degree.stem() == 0 && gen.degree.w.signum() == sign && hard_cap(g) == u32::MAX
        })
    };
    if stem0_uncapped(-1) && stem0_uncapped(1) {
        return Err(Error::InfiniteRegion(
            "stem-0 generators of both weight signs compensate indefinitely".into(),
        ));
    }

    // First pass: stem-budget caps for positive-stem generators, and the
    // extreme weight contributions they allow.
    let mut max_exp = vec![0u32; n];
    let mut weight_up: i64 = 0; // largest achievable positive weight sum
    let mut weight_down: i64 = 0; // most negative achievable weight sum
    for (g, gen) in spec.generators.iter().enumerate() {
        let t = gen.degree;
        if t.stem() < 0 {
            return Err(Error::InfiniteRegion(format!(
                "generator {} has negative stem",
                gen.name
            )));
        }
        if t.stem() > 0 {
            let budget = (bounds.stem_max.max(0) / t.stem()) as u32;
            let cap = budget.min(kind_cap(gen)).min(user_cap(g));
            max_exp[g] = cap;
            if t.w > 0 {
                weight_up += t.w * cap as i64;
            } else {
                weight_down += t.w * cap as i64;
            }
        }
    }
    // Second pass: stem-0 generators, bounded by the weight window (or the
    // filtration bound for the degenerate weight-0 case).
    for (g, gen) in spec.generators.iter().enumerate() {
        let t = gen.degree;
        if t.stem() != 0 {
            continue;
        }
        let budget: u32 = if hard_cap(g) != u32::MAX {
            hard_cap(g)
        } else if t.w < 0 {
            let Some(w_min) = bounds.w_min else {
                return Err(Error::InfiniteRegion(format!(
                    "generator {} has stem 0 and negative weight; need a weight window",
                    gen.name
                )));
            };
            let head = bounds.w_max.unwrap_or(i64::MAX).min(weight_up);
            (((head - w_min).max(0)) / -t.w) as u32
        } else if t.w > 0 {
            let Some(w_max) = bounds.w_max else {
                return Err(Error::InfiniteRegion(format!(
                    "generator {} has stem 0 and positive weight; need a weight window",
                    gen.name
                )));
            };
            let floor = bounds.w_min.unwrap_or(i64::MIN).max(weight_down);
            (((w_max - floor).max(0)) / t.w) as u32
        } else if t.f > 0 {
            let Some(f_max) = bounds.f_max else {
                return Err(Error::InfiniteRegion(format!(
                    "generator {} is bounded only by filtration; need a filtration bound",
                    gen.name
                )));
            };
            (f_max.max(0) / t.f) as u32
        } else {
            return Err(Error::InfiniteRegion(format!(
                "generator {} of tridegree ({}, {}, {}) bounds nothing",
                gen.name, t.f, t.d, t.w
            )));
        };
        max_exp[g] = budget.min(kind_cap(gen)).min(user_cap(g));
    }

    let mut out = Vec::new();
    let mut stack: Vec<(GenId, u32)> = Vec::new();
    fn rec(
        spec: &AlgebraSpec,
        bounds: &EnumBounds,
        max_exp: &[u32],
        g: GenId,
        partial: Tridegree,
        stack: &mut Vec<(GenId, u32)>,
        out: &mut Vec<Monomial>,
    ) {
        if g == spec.generators.len() {
            if bounds.admits(partial) {
                out.push(Monomial(stack.clone()));
            }
            return;
        }
        let deg = spec.degree(g);
        for e in 0..=max_exp[g] {
            let t = partial.add(deg.scale(e as i64));
            // Positive-stem exponents beyond the stem budget can only grow.
            if deg.stem() > 0 && t.stem() > bounds.stem_max {
                break;
            }
            if e > 0 {
                stack.push((g, e));
            }
            rec(spec, bounds, max_exp, g + 1, t, stack, out);
            if e > 0 {
                stack.pop();
            }
        }
    }
    rec(spec, &bounds, &max_exp, 0, Tridegree::ZERO, &mut stack, &mut out);
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> Fp {
        Fp::new(p).unwrap()
    }

    /// Γ(mu) ⊗ Λ(lam) with the tridegrees of γμ̄_0 and λ̄_1 at p=2.
    fn gamma_lambda() -> AlgebraSpec {
        AlgebraSpec::new(vec![
            GeneratorSpec {
                name: "mu".into(),
                kind: GeneratorKind::DividedPower,
                degree: Tridegree::new(1, 1, 0),
            },
            GeneratorSpec {
                name: "lam".into(),
                kind: GeneratorKind::Exterior,
                degree: Tridegree::new(1, 2, 1),
            },
        ])
    }

    #[test]
    fn divided_power_binomials() {
        let spec = gamma_lambda();
        let mu = spec.by_name("mu").unwrap();
        let g1 = Element::term(Monomial::power(mu, 1), 1);
        // γ_1 · γ_1 = C(2,1) γ_2 = 2 γ_2: zero mod 2, twice γ_2 mod 3.
        assert!(g1.mul(f(2), &spec, &g1).is_zero());
        let sq = g1.mul(f(3), &spec, &g1);
        assert_eq!(sq, Element::term(Monomial::power(mu, 2), 2));
        // γ_2 · γ_3 = C(5,2) γ_5 = 10 γ_5 ≡ γ_5 mod 3, ≡ 0 mod 2 and mod 5.
        let g2 = Element::term(Monomial::power(mu, 2), 1);
        let g3 = Element::term(Monomial::power(mu, 3), 1);
        assert_eq!(g2.mul(f(3), &spec, &g3), Element::term(Monomial::power(mu, 5), 1));
        assert!(g2.mul(f(2), &spec, &g3).is_zero());
        assert!(g2.mul(f(5), &spec, &g3).is_zero());
    }

    #[test]
    fn truncated_generators_vanish_at_height() {
        let spec = AlgebraSpec::new(vec![GeneratorSpec {
            name: "t".into(),
            kind: GeneratorKind::Truncated(3),
            degree: Tridegree::new(0, 0, -1),
        }]);
        let t = Element::term(Monomial::generator(0), 1);
        let t2 = t.mul(f(3), &spec, &t);
        assert_eq!(t2, Element::term(Monomial::power(0, 2), 1));
        assert!(t2.mul(f(3), &spec, &t).is_zero());
    }

    #[test]
    fn exterior_squares_vanish_and_odd_classes_anticommute() {
        let p3 = f(3);
        let spec = AlgebraSpec::new(vec![
            GeneratorSpec {
                name: "a".into(),
                kind: GeneratorKind::Exterior,
                degree: Tridegree::new(1, 4, 2),
            },
            GeneratorSpec {
                name: "b".into(),
                kind: GeneratorKind::Exterior,
                degree: Tridegree::new(1, 16, 8),
            },
        ]);
        spec.validate(p3).unwrap();
        let a = Element::term(Monomial::generator(0), 1);
        let b = Element::term(Monomial::generator(1), 1);
        assert!(a.mul(p3, &spec, &a).is_zero());
        let ab = a.mul(p3, &spec, &b);
        let ba = b.mul(p3, &spec, &a);
        assert_eq!(ba, ab.scale(p3, p3.neg(1)));
        assert_eq!(ab, Element::term(Monomial::from_pairs(&[(0, 1), (1, 1)]), 1));
    }

    #[test]
    fn even_divided_classes_commute_with_everything() {
        // γ-classes have even stem, so they pick up no signs even when their
        // internal topological degree is odd.
        let p3 = f(3);
        let spec = AlgebraSpec::new(vec![
            GeneratorSpec {
                name: "m0".into(),
                kind: GeneratorKind::DividedPower,
                degree: Tridegree::new(1, 1, 0),
            },
            GeneratorSpec {
                name: "m1".into(),
                kind: GeneratorKind::DividedPower,
                degree: Tridegree::new(1, 5, 2),
            },
        ]);
        spec.validate(p3).unwrap();
        let x = Element::term(Monomial::power(0, 3), 1);
        let y = Element::term(Monomial::power(1, 3), 1);
        assert_eq!(x.mul(p3, &spec, &y), y.mul(p3, &spec, &x));
    }

    #[test]
    fn validation_rejects_wrong_parities_at_odd_p() {
        let bad_ext = AlgebraSpec::new(vec![GeneratorSpec {
            name: "x".into(),
            kind: GeneratorKind::Exterior,
            degree: Tridegree::new(0, 2, 1),
        }]);
        assert!(bad_ext.validate(f(3)).is_err());
        assert!(bad_ext.validate(f(2)).is_ok());
        let bad_div = AlgebraSpec::new(vec![GeneratorSpec {
            name: "y".into(),
            kind: GeneratorKind::DividedPower,
            degree: Tridegree::new(1, 2, 1),
        }]);
        assert!(bad_div.validate(f(5)).is_err());
        let bad_height = AlgebraSpec::new(vec![GeneratorSpec {
            name: "z".into(),
            kind: GeneratorKind::Truncated(1),
            degree: Tridegree::new(0, 2, 1),
        }]);
        assert!(bad_height.validate(f(2)).is_err());
    }

    #[test]
    fn pth_powers_of_p_index_divided_classes() {
        // The subalgebra on γ_{p^j}(x) has exactly p nonzero power classes:
        // (γ_p)^k ≠ 0 for k < p and (γ_p)^p = 0.
        for p in [2u64, 3, 5] {
            let fp = f(p);
            let spec = AlgebraSpec::new(vec![GeneratorSpec {
                name: "x".into(),
                kind: GeneratorKind::DividedPower,
                degree: Tridegree::new(1, 1, 0),
            }]);
            let gp = Element::term(Monomial::power(0, p as u32), 1);
            let mut acc = Element::one();
            for k in 1..=p as u32 {
                acc = acc.mul(fp, &spec, &gp);
                if k < p as u32 {
                    assert!(!acc.is_zero(), "(γ_p)^{k} vanished unexpectedly mod {p}");
                } else {
                    assert!(acc.is_zero(), "(γ_p)^{p} should vanish mod {p}");
                }
            }
        }
    }

    #[test]
    fn enumerate_divided_powers_by_stem() {
        // Γ(μ̄_0) at p=2: stems 2n, so stem ≤ 8 gives 1, γ_1, ..., γ_4.
        let spec = AlgebraSpec::new(vec![GeneratorSpec {
            name: "mu".into(),
            kind: GeneratorKind::DividedPower,
            degree: Tridegree::new(1, 1, 0),
        }]);
        let basis = basis_enumerate(&spec, EnumBounds::stems(8), None).unwrap();
        assert_eq!(basis.len(), 5);
        assert_eq!(basis[0], Monomial::one());
        assert_eq!(basis[4], Monomial::power(0, 4));
    }

    #[test]
    fn enumerate_rejects_unbounded_regions() {
        let tau_like = AlgebraSpec::new(vec![GeneratorSpec {
            name: "tau".into(),
            kind: GeneratorKind::Polynomial,
            degree: Tridegree::new(0, 0, -1),
        }]);
        assert!(matches!(
            basis_enumerate(&tau_like, EnumBounds::stems(4), None),
            Err(Error::InfiniteRegion(_))
        ));
        let with_window = basis_enumerate(
            &tau_like,
            EnumBounds::with_weights(4, -3, 0),
            None,
        )
        .unwrap();
        assert_eq!(with_window.len(), 4); // 1, τ, τ², τ³
        let degenerate = AlgebraSpec::new(vec![GeneratorSpec {
            name: "unit".into(),
            kind: GeneratorKind::Polynomial,
            degree: Tridegree::new(0, 0, 0),
        }]);
        assert!(matches!(
            basis_enumerate(&degenerate, EnumBounds::stems(4), None),
            Err(Error::InfiniteRegion(_))
        ));
    }

    #[test]
    fn labels() {
        let spec = gamma_lambda();
        let m = Monomial::from_pairs(&[(0, 4), (1, 1)]);
        assert_eq!(spec.monomial_label(&m), "gamma_4(mu)*lam");
        assert_eq!(spec.monomial_label(&Monomial::one()), "1");
        let e = Element::term(m, 2);
        assert_eq!(spec.element_label(f(3), &e), "2*gamma_4(mu)*lam");
    }

    #[test]
    fn homogeneous_degree_detection() {
        let spec = gamma_lambda();
        let mu = Element::term(Monomial::generator(0), 1);
        let lam = Element::term(Monomial::generator(1), 1);
        assert_eq!(
            mu.homogeneous_degree(&spec),
            Some(Tridegree::new(1, 1, 0))
        );
        assert_eq!(mu.add(f(3), &lam).homogeneous_degree(&spec), None);
    }
}
