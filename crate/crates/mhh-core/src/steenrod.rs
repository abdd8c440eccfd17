//! The dual motivic Steenrod algebra over an algebraically closed base field
//! (so the class ρ vanishes and the coefficient ring is F_p[τ]).
//!
//! Three variants share one presentation type:
//! * `Integral`: F_p[τ][ξ_{i+1}, τ_i] with τ_i² = τ·ξ_{i+1} at p = 2 and
//!   τ_i² = 0 at odd p;
//! * `ModTau`: the same algebra over F_p[τ]/τ^{p−1} (at p = 2 this kills τ,
//!   making the τ_i exterior);
//! * `Etale`: τ inverted; at p = 2 the ξ's become redundant (ξ_{i+1} =
//!   τ^{−1}τ_i²) and are dropped, leaving a free polynomial algebra on the
//!   τ_i.
//!
//! Degrees: |ξ_i| = (0, 2p^i − 2, p^i − 1), |τ_i| = (0, 2p^i − 1, p^i − 1),
//! |τ| = (0, 0, −1).

use crate::algebra::{basis_enumerate, AlgebraSpec, Element, EnumBounds, GenId, GeneratorKind, GeneratorSpec, Monomial};
use crate::fp::Fp;
use crate::grading::Tridegree;
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Variant {
    Integral,
    ModTau,
    Etale,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Integral => "integral",
            Variant::ModTau => "mod-tau",
            Variant::Etale => "etale",
        }
    }
}

/// A bounded presentation of the dual Steenrod algebra.
#[derive(Clone, Debug)]
pub struct SteenrodAlgebra {
    pub fp: Fp,
    pub variant: Variant,
    pub spec: AlgebraSpec,
    /// Generator id of τ, when τ is part of the presentation (everything but
    /// mod-τ at p = 2, where τ = 0).
    pub tau: Option<GenId>,
    /// tau_ids[i] = generator id of τ_i, for i ≤ imax.
    pub tau_ids: Vec<GenId>,
    /// xi_ids[k−1] = generator id of ξ_k (absent in the étale p=2 variant).
    pub xi_ids: Vec<GenId>,
    pub imax: usize,
}

impl SteenrodAlgebra {
    /// Presentation with τ_i for i ≤ imax (and ξ_k for k ≤ imax+1 where the
    /// variant keeps them, so the p = 2 rewrite never runs out of range).
    pub fn new(fp: Fp, variant: Variant, imax: usize) -> Result<SteenrodAlgebra> {
        let p = fp.p() as i64;
        let mut gens: Vec<(String, GeneratorKind, Tridegree)> = Vec::new();
        if !(variant == Variant::ModTau && p == 2) {
            gens.push((
                "tau".into(),
                if variant == Variant::ModTau {
                    GeneratorKind::Truncated(fp.p() - 1)
                } else {
                    GeneratorKind::Polynomial
                },
                Tridegree::new(0, 0, -1),
            ));
        }
        let tau_i_kind = if p == 2 {
            match variant {
                // Letters are normalized to τ_i-exponent ≤ 1, but the square
                // is τ·ξ_{i+1}, not zero, so the kind stays polynomial and a
                // rewrite pass restores normal form.
                Variant::Integral => GeneratorKind::Polynomial,
                Variant::ModTau => GeneratorKind::Exterior,
                Variant::Etale => GeneratorKind::Polynomial,
            }
        } else {
            GeneratorKind::Exterior
        };
        for i in 0..=imax {
            let pi = p.pow(i as u32);
            gens.push((
                format!("tau_{i}"),
                tau_i_kind,
                Tridegree::new(0, 2 * pi - 1, pi - 1),
            ));
        }
        if !(variant == Variant::Etale && p == 2) {
            for k in 1..=imax + 1 {
                let pk = p.pow(k as u32);
                gens.push((
                    format!("xi_{k}"),
                    GeneratorKind::Polynomial,
                    Tridegree::new(0, 2 * pk - 2, pk - 1),
                ));
            }
        }
        gens.sort_by(|a, b| (a.2.d, &a.0).cmp(&(b.2.d, &b.0)));
        let spec = AlgebraSpec::new(
            gens.into_iter()
                .map(|(name, kind, degree)| GeneratorSpec { name, kind, degree })
                .collect(),
        );
        spec.validate(fp)?;
        let tau = spec.by_name("tau");
        let tau_ids = (0..=imax)
            .map(|i| spec.by_name(&format!("tau_{i}")).expect("tau_i present"))
            .collect();
        let xi_ids: Vec<GenId> = (1..=imax + 1)
            .filter_map(|k| spec.by_name(&format!("xi_{k}")))
            .collect();
        Ok(SteenrodAlgebra { fp, variant, spec, tau, tau_ids, xi_ids, imax })
    }

    /// Presentation large enough that every class of topological degree
    /// ≤ degree_max (and every product of two such) is expressible.
    pub fn for_degree(fp: Fp, variant: Variant, degree_max: i64) -> Result<SteenrodAlgebra> {
        let p = fp.p() as i64;
        let mut imax = 0usize;
        // τ_i enters at degree 2p^i − 1; ξ_k at 2p^k − 2 (one step earlier).
        while 2 * p.pow(imax as u32 + 1) - 2 <= degree_max.max(0) {
            imax += 1;
        }
        SteenrodAlgebra::new(fp, variant, imax)
    }

    pub fn xi(&self, k: usize) -> Option<GenId> {
        if k == 0 || self.xi_ids.is_empty() {
            return None;
        }
        self.xi_ids.get(k - 1).copied()
    }

    pub fn tau_i(&self, i: usize) -> Option<GenId> {
        self.tau_ids.get(i).copied()
    }

    /// Rewrites a monomial to normal form. Only the p = 2 integral variant
    /// has work to do: τ_i^{2k+r} → τ^k ξ_{i+1}^k τ_i^r. Returns the τ-power
    /// produced alongside the normalized τ-free-in-τ_i monomial.
    fn normalize_monomial(&self, m: &Monomial) -> Result<Monomial> {
        if !(self.fp.p() == 2 && self.variant == Variant::Integral) {
            return Ok(m.clone());
        }
        let mut out = m.clone();
        for (i, &tid) in self.tau_ids.iter().enumerate() {
            let e = out.exponent(tid);
            if e >= 2 {
                let k = e / 2;
                let xi = self.xi(i + 1).ok_or_else(|| {
                    Error::Unsupported(format!("xi_{} outside presentation bound", i + 1))
                })?;
                out = out.with_exponent(tid, e % 2);
                out = out.with_exponent(xi, out.exponent(xi) + k);
                let tau = self.tau.expect("integral variant has tau");
                out = out.with_exponent(tau, out.exponent(tau) + k);
            }
        }
        Ok(out)
    }

    /// Multiplies and renormalizes, enforcing the variant's τ-truncation.
    pub fn normalize(&self, e: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (m, c) in e.terms() {
            let norm = self.normalize_monomial(m)?;
            if let Some(tau) = self.tau {
                if self.variant == Variant::ModTau && norm.exponent(tau) >= self.fp.p() - 1 {
                    continue;
                }
            }
            out.add_term(self.fp, norm, c);
        }
        Ok(out)
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Result<Element> {
        self.normalize(&a.mul(self.fp, &self.spec, b))
    }

    /// Exponent caps that keep enumeration inside normal form (τ_i ≤ 1 in the
    /// p = 2 integral variant, where the generator kind alone caps nothing).
    fn normal_form_caps(&self) -> Vec<Option<u32>> {
        let mut caps = vec![None; self.spec.generators.len()];
        if self.fp.p() == 2 && self.variant == Variant::Integral {
            for &tid in &self.tau_ids {
                caps[tid] = Some(1);
            }
        }
        caps
    }

    /// Basis classes in the region `d ≤ degree_max`, weight in the window,
    /// as (τ-exponent, τ-free monomial) pairs. The τ-exponent may be negative
    /// only in the étale variant.
    pub fn basis_classes(
        &self,
        degree_max: i64,
        w_min: i64,
        w_max: i64,
    ) -> Result<Vec<(i64, Monomial)>> {
        let frees = self.tau_free_monomials(degree_max)?;
        let mut out = Vec::new();
        for m in frees {
            let wm = self.spec.monomial_degree(&m).w;
            // τ^a shifts weight to wm − a.
            let (lo, hi): (i64, i64) = match self.variant {
                Variant::Integral => (0, i64::MAX),
                Variant::ModTau => {
                    if self.tau.is_none() {
                        (0, 0)
                    } else {
                        (0, self.fp.p() as i64 - 2)
                    }
                }
                Variant::Etale => (i64::MIN, i64::MAX),
            };
            let a_min = (wm - w_max).max(lo);
            let a_max = (wm - w_min).min(hi);
            for a in a_min..=a_max {
                out.push((a, m.clone()));
            }
        }
        out.sort();
        Ok(out)
    }

    /// Monomials with no τ factor, topological degree ≤ degree_max, in normal
    /// form, including the unit.
    pub fn tau_free_monomials(&self, degree_max: i64) -> Result<Vec<Monomial>> {
        let mut caps = self.normal_form_caps();
        if let Some(tau) = self.tau {
            caps[tau] = Some(0);
        }
        // With τ capped to zero every remaining generator has positive stem,
        // so a bare stem bound suffices.
        basis_enumerate(&self.spec, EnumBounds::stems(degree_max), Some(&caps))
    }

    /// Bar-complex letters: τ-free non-unit monomials of degree ≤ degree_max.
    pub fn letters(&self, degree_max: i64) -> Result<Vec<Monomial>> {
        Ok(self
            .tau_free_monomials(degree_max)?
            .into_iter()
            .filter(|m| !m.is_one())
            .collect())
    }

    /// Letter product split as (τ-power, τ-free monomial, coefficient); None
    /// when the product vanishes (exterior squares, mod-τ truncation).
    pub fn mul_letters(&self, a: &Monomial, b: &Monomial) -> Result<Option<(u32, Monomial, u32)>> {
        let Some((m, c)) = self.spec.mul_monomials(self.fp, a, b) else {
            return Ok(None);
        };
        let norm = self.normalize_monomial(&m)?;
        let tau_pow = match self.tau {
            Some(tau) => norm.exponent(tau),
            None => 0,
        };
        if self.variant == Variant::ModTau && self.tau.is_some() && tau_pow >= self.fp.p() - 1 {
            return Ok(None);
        }
        let tau_free = match self.tau {
            Some(tau) => norm.with_exponent(tau, 0),
            None => norm,
        };
        Ok(Some((tau_pow, tau_free, c)))
    }

    /// The augmentation to the τ-line: kills every ξ and τ_i.
    pub fn augment_letter(&self, m: &Monomial) -> bool {
        m.is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> Fp {
        Fp::new(p).unwrap()
    }

    #[test]
    fn tau_cubed_normalizes_at_p2() {
        // τ_0³ = τ·τ_0·ξ_1 in the integral p=2 presentation.
        let a = SteenrodAlgebra::new(f(2), Variant::Integral, 2).unwrap();
        let t0 = a.tau_i(0).unwrap();
        let cubed = Element::term(Monomial::power(t0, 3), 1);
        let norm = a.normalize(&cubed).unwrap();
        let expected = Monomial::from_pairs(&[
            (a.tau.unwrap(), 1),
            (t0, 1),
            (a.xi(1).unwrap(), 1),
        ]);
        assert_eq!(norm, Element::term(expected, 1));
    }

    #[test]
    fn tau_i_squares_by_variant() {
        // Integral p=2: τ_1² = τ·ξ_2. Mod-τ p=2: τ_1² = 0. Étale p=2: τ_1²
        // is itself a basis monomial. Odd p: τ_i exterior in all variants.
        let int2 = SteenrodAlgebra::new(f(2), Variant::Integral, 2).unwrap();
        let t1 = Element::term(Monomial::generator(int2.tau_i(1).unwrap()), 1);
        let sq = int2.mul(&t1, &t1).unwrap();
        let expected = Monomial::from_pairs(&[(int2.tau.unwrap(), 1), (int2.xi(2).unwrap(), 1)]);
        assert_eq!(sq, Element::term(expected, 1));

        let red2 = SteenrodAlgebra::new(f(2), Variant::ModTau, 2).unwrap();
        let t1 = Element::term(Monomial::generator(red2.tau_i(1).unwrap()), 1);
        assert!(red2.mul(&t1, &t1).unwrap().is_zero());

        let et2 = SteenrodAlgebra::new(f(2), Variant::Etale, 2).unwrap();
        assert!(et2.xi(1).is_none());
        let t1 = Element::term(Monomial::generator(et2.tau_i(1).unwrap()), 1);
        let sq = et2.mul(&t1, &t1).unwrap();
        assert_eq!(sq, Element::term(Monomial::power(et2.tau_i(1).unwrap(), 2), 1));

        for variant in [Variant::Integral, Variant::ModTau, Variant::Etale] {
            let a3 = SteenrodAlgebra::new(f(3), variant, 2).unwrap();
            let t1 = Element::term(Monomial::generator(a3.tau_i(1).unwrap()), 1);
            assert!(a3.mul(&t1, &t1).unwrap().is_zero(), "{variant:?}");
        }
    }

    #[test]
    fn mod_tau_basis_at_p2_low_degrees() {
        // Degree ≤ 3: {1, τ_0, ξ_1, τ_1, τ_0ξ_1}.
        let a = SteenrodAlgebra::for_degree(f(2), Variant::ModTau, 3).unwrap();
        let classes = a.basis_classes(3, -10, 10).unwrap();
        assert_eq!(classes.len(), 5);
        assert!(classes.iter().all(|(t, _)| *t == 0));
        let labels: Vec<String> =
            classes.iter().map(|(_, m)| a.spec.monomial_label(m)).collect();
        assert!(labels.contains(&"1".to_string()));
        assert!(labels.contains(&"tau_0".to_string()));
        assert!(labels.contains(&"xi_1".to_string()));
        assert!(labels.contains(&"tau_1".to_string()));
        assert!(labels.contains(&"tau_0*xi_1".to_string()));
    }

    #[test]
    fn mod_tau_basis_at_p3_includes_one_tau_power() {
        let a = SteenrodAlgebra::for_degree(f(3), Variant::ModTau, 5).unwrap();
        let classes = a.basis_classes(5, -1, 3).unwrap();
        // τ-free part {1, τ_0, ξ_1, τ_1, τ_0ξ_1} ⊗ {1, τ}.
        assert_eq!(classes.len(), 10);
        assert_eq!(classes.iter().filter(|(t, _)| *t == 1).count(), 5);
    }

    #[test]
    fn integral_tau_multiplication_is_injective() {
        // No τ-torsion: τ·(bounded basis) has full rank. Checked as a rank
        // computation rather than by inspecting monomials.
        use crate::linalg::{rank, SparseMatrix};
        for p in [2u64, 3] {
            let fp = f(p);
            let a = SteenrodAlgebra::for_degree(fp, Variant::Integral, 8).unwrap();
            let dom = a.basis_classes(8, -2, 6).unwrap();
            let cod = a.basis_classes(8, -3, 6).unwrap();
            let index: std::collections::BTreeMap<_, usize> =
                cod.iter().cloned().zip(0..).collect();
            let mut rows = Vec::new();
            for (t, m) in &dom {
                let target = (*t + 1, m.clone());
                rows.push(vec![(index[&target], 1u32)]);
            }
            let mat = SparseMatrix::from_rows(cod.len(), rows);
            assert_eq!(rank(&mat, fp), dom.len());
        }
    }

    #[test]
    fn mod_tau_dimensions_refine_integral_ones() {
        // dim_modτ(d, w) = Σ_{c<p−1} dim_int^{τ-free}(d, w+c).
        for p in [2u64, 3, 5] {
            let fp = f(p);
            let int = SteenrodAlgebra::for_degree(fp, Variant::Integral, 9).unwrap();
            let red = SteenrodAlgebra::for_degree(fp, Variant::ModTau, 9).unwrap();
            let free: Vec<(i64, i64)> = int
                .tau_free_monomials(9)
                .unwrap()
                .iter()
                .map(|m| {
                    let t = int.spec.monomial_degree(m);
                    (t.d, t.w)
                })
                .collect();
            let reduced = red.basis_classes(9, -20, 20).unwrap();
            for d in 0..=9i64 {
                for w in -20..=20i64 {
                    let lhs = reduced
                        .iter()
                        .filter(|(a, m)| {
                            let t = red.spec.monomial_degree(m);
                            t.d == d && t.w - a == w
                        })
                        .count();
                    let rhs: usize = (0..=(p as i64 - 2))
                        .map(|c| free.iter().filter(|&&(fd, fw)| fd == d && fw == w + c).count())
                        .sum();
                    assert_eq!(lhs, rhs, "p={p} d={d} w={w}");
                }
            }
        }
    }

    #[test]
    fn etale_p2_drops_xi_and_counts_match() {
        let a = SteenrodAlgebra::for_degree(f(2), Variant::Etale, 6).unwrap();
        assert!(a.xi_ids.is_empty());
        // Degree ≤ 6 τ-free monomials in τ_0, τ_1 (free polynomial): τ_0^e0
        // τ_1^e1 with e0 + 3e1 ≤ 6: e1=0: e0≤6 (7), e1=1: e0≤3 (4), e1=2:
        // e0=0 (1) → 12 monomials.
        assert_eq!(a.tau_free_monomials(6).unwrap().len(), 12);
    }

    #[test]
    fn letters_exclude_units_and_tau() {
        let a = SteenrodAlgebra::for_degree(f(2), Variant::Integral, 3).unwrap();
        let letters = a.letters(3).unwrap();
        let labels: Vec<String> =
            letters.iter().map(|m| a.spec.monomial_label(m)).collect();
        assert_eq!(labels.len(), 4);
        assert!(!labels.contains(&"1".to_string()));
        assert!(labels.iter().all(|l| !l.starts_with("tau^") && l != "tau"));
    }
}
