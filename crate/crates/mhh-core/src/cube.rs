//! The cube complex: the divided-power/exterior algebra
//! C = ⊗_i Γ(μ_i) ⊗ Λ(λ_{i+1}) with the odd derivation
//! D(γ_{j+p}μ_i) = λ_{i+1}·γ_jμ_i, its distinguished χ-classes indexed by a
//! finite-support exponent function f and a subset S of its support, the
//! binomial product law between χ-classes, contractible per-f subcomplexes,
//! and trigraded cycle/boundary/homology tables of (C, D).
//!
//! Everything here is the algebraic skeleton that the τ-Bockstein of the
//! reduced bar homology retracts onto; the spectral-sequence and ring modules
//! consume these tables.

use crate::algebra::{
    basis_enumerate, AlgebraSpec, Element, EnumBounds, GeneratorKind, GeneratorSpec, Monomial,
};
use crate::binom::binomial_mod_p;
use crate::fp::Fp;
use crate::grading::Tridegree;
use crate::linalg::{kernel_basis, rank, solve_columns, subquotient, SparseMatrix, SparseVec};
use crate::table::DimensionTable;
use crate::{Error, Result};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};

/// Index of a χ-class: a finitely supported exponent function f (stored with
/// strictly positive values) and a subset S of its support.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ChiIndex {
    pub s: BTreeSet<usize>,
    pub f: BTreeMap<usize, u32>,
}

impl ChiIndex {
    pub fn new(s: BTreeSet<usize>, f: BTreeMap<usize, u32>) -> Result<ChiIndex> {
        if f.values().any(|&v| v == 0) {
            return Err(Error::Precondition("exponent function has a zero value".into()));
        }
        if let Some(n) = s.iter().find(|n| !f.contains_key(n)) {
            return Err(Error::Precondition(format!(
                "subset member {} is outside the support",
                n
            )));
        }
        Ok(ChiIndex { s, f })
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.f.keys().copied()
    }

    /// Least element of the support, when the support is non-empty.
    pub fn t_f(&self) -> Option<usize> {
        self.f.keys().next().copied()
    }

    /// Whether the index names a torsion-class generator: non-empty support
    /// with the least support element outside S.
    pub fn is_torsion_index(&self) -> bool {
        match self.t_f() {
            Some(t) => !self.s.contains(&t),
            None => false,
        }
    }

    /// Label of the associated torsion class, e.g. `x{0;1*d0+2*d1}` for
    /// S = {0}, f = δ_0 + 2δ_1.
    pub fn label(&self) -> String {
        let s: Vec<String> = self.s.iter().map(|n| n.to_string()).collect();
        let f: Vec<String> = self.f.iter().map(|(n, v)| format!("{}*d{}", v, n)).collect();
        format!("x{{{};{}}}", s.join(","), f.join("+"))
    }
}

/// Pointwise sum of two exponent functions.
pub fn add_exponents(f: &BTreeMap<usize, u32>, g: &BTreeMap<usize, u32>) -> BTreeMap<usize, u32> {
    let mut h = f.clone();
    for (&n, &v) in g {
        *h.entry(n).or_insert(0) += v;
    }
    h
}

/// The binomial coefficient attached to a pair of χ-indices: zero unless
/// S ⊆ supp f, T ⊆ supp g and S ∩ T = ∅, and otherwise the product over the
/// combined support of one binomial per index, shifted on S and on T.
pub fn k_coeff(
    fp: Fp,
    s: &BTreeSet<usize>,
    t: &BTreeSet<usize>,
    f: &BTreeMap<usize, u32>,
    g: &BTreeMap<usize, u32>,
) -> u32 {
    if s.iter().any(|n| !f.contains_key(n)) || t.iter().any(|n| !g.contains_key(n)) {
        return 0;
    }
    if s.intersection(t).next().is_some() {
        return 0;
    }
    let fv = |n: usize| f.get(&n).copied().unwrap_or(0) as u64;
    let gv = |n: usize| g.get(&n).copied().unwrap_or(0) as u64;
    let mut out = 1u32;
    let support: BTreeSet<usize> = f.keys().chain(g.keys()).copied().collect();
    for n in support {
        let b = if s.contains(&n) {
            binomial_mod_p(fp, fv(n) - 1 + gv(n), fv(n) - 1)
        } else if t.contains(&n) {
            binomial_mod_p(fp, fv(n) + gv(n) - 1, fv(n))
        } else {
            binomial_mod_p(fp, fv(n) + gv(n), fv(n))
        };
        out = fp.mul(out, b);
    }
    out
}

/// The inversion count #{(m, m') ∈ S × T : m > m'}, whose parity is the
/// Koszul sign relating χ_S·χ_T to the canonical χ_{S∪T}.
pub fn inversions(s: &BTreeSet<usize>, t: &BTreeSet<usize>) -> usize {
    s.iter().flat_map(|m| t.iter().filter(move |mp| m > mp)).count()
}

/// The cube algebra with generators μ_0, …, μ_{imax} and λ_1, …, λ_{imax+1}
/// (divided-power and exterior respectively), or a stem-bounded subset.
#[derive(Clone, Debug)]
pub struct CubeAlgebra {
    pub fp: Fp,
    pub spec: AlgebraSpec,
    /// mu[i] = generator id of μ_i.
    mu: Vec<usize>,
    /// lam[i] = generator id of λ_{i+1}.
    lam: Vec<usize>,
}

impl CubeAlgebra {
    /// All generators of index ≤ imax on both families.
    pub fn new(fp: Fp, imax: usize) -> Result<CubeAlgebra> {
        Self::build(fp, |deg_mu| deg_mu <= imax as i64, |deg_lam| deg_lam <= imax as i64)
    }

    /// Generators filtered by their own stem: μ_i when 2p^i ≤ stem_max and
    /// λ_{i+1} when 2p^{i+1} − 1 ≤ stem_max. Every class of stem ≤ stem_max+1
    /// and its image under D are then expressible.
    pub fn for_stem(fp: Fp, stem_max: i64) -> Result<CubeAlgebra> {
        let p = fp.p() as i64;
        let mut keep_mu = Vec::new();
        let mut keep_lam = Vec::new();
        let mut pw = 1i64;
        loop {
            let mu_ok = 2 * pw <= stem_max;
            let lam_ok = 2 * pw * p - 1 <= stem_max;
            keep_mu.push(mu_ok);
            keep_lam.push(lam_ok);
            if !mu_ok && !lam_ok {
                break;
            }
            pw *= p;
        }
        Self::build(
            fp,
            |i| keep_mu.get(i as usize).copied().unwrap_or(false),
            |i| keep_lam.get(i as usize).copied().unwrap_or(false),
        )
    }

    fn build(
        fp: Fp,
        keep_mu: impl Fn(i64) -> bool,
        keep_lam: impl Fn(i64) -> bool,
    ) -> Result<CubeAlgebra> {
        let p = fp.p() as i64;
        let mut gens: Vec<(GeneratorSpec, bool, usize)> = Vec::new();
        let mut pw = 1i64;
        let mut i = 0usize;
        loop {
            let mu_ok = keep_mu(i as i64);
            let lam_ok = keep_lam(i as i64);
            if !mu_ok && !lam_ok {
                break;
            }
            if mu_ok {
                gens.push((
                    GeneratorSpec {
                        name: format!("mu_{}", i),
                        kind: GeneratorKind::DividedPower,
                        degree: Tridegree::new(1, 2 * pw - 1, pw - 1),
                    },
                    true,
                    i,
                ));
            }
            if lam_ok {
                gens.push((
                    GeneratorSpec {
                        name: format!("lambda_{}", i + 1),
                        kind: GeneratorKind::Exterior,
                        degree: Tridegree::new(1, 2 * pw * p - 2, pw * p - 1),
                    },
                    false,
                    i,
                ));
            }
            pw *= p;
            i += 1;
        }
        // The interleaved (μ_0, λ_1, μ_1, λ_2, …) order is already sorted by
        // topological degree: 2p^i − 1 < 2p^{i+1} − 2 < 2p^{i+1} − 1.
        let mut mu = Vec::new();
        let mut lam = Vec::new();
        for (gid, (_, is_mu, idx)) in gens.iter().enumerate() {
            if *is_mu {
                assert_eq!(mu.len(), *idx);
                mu.push(gid);
            } else {
                assert_eq!(lam.len(), *idx);
                lam.push(gid);
            }
        }
        let spec = AlgebraSpec::new(gens.into_iter().map(|(g, _, _)| g).collect());
        spec.validate(fp)?;
        Ok(CubeAlgebra { fp, spec, mu, lam })
    }

    pub fn mu(&self, i: usize) -> Option<usize> {
        self.mu.get(i).copied()
    }

    pub fn lam(&self, i: usize) -> Option<usize> {
        self.lam.get(i).copied()
    }

    pub fn mu_count(&self) -> usize {
        self.mu.len()
    }

    pub fn mu_index_of(&self, gid: usize) -> Option<usize> {
        self.mu.iter().position(|&g| g == gid)
    }

    /// The derivation D on one monomial: one term per divided-power factor
    /// γ_e(μ_i) with e ≥ p, replacing it by λ_{i+1}·γ_{e−p}(μ_i). The Koszul
    /// reordering sign of the left λ-multiplication is exactly the Leibniz
    /// sign of the derivation, so no separate bookkeeping is needed.
    pub fn d_monomial(&self, m: &Monomial) -> Result<Element> {
        let p = self.fp.p();
        let mut out = Element::zero();
        for &(gid, e) in m.factors() {
            let Some(i) = self.mu_index_of(gid) else { continue };
            if e < p {
                continue;
            }
            let lam = self.lam(i).ok_or_else(|| {
                Error::BadGenerator(format!("lambda_{} is outside this presentation", i + 1))
            })?;
            let base = m.with_exponent(gid, e - p);
            if let Some((mono, c)) =
                self.spec.mul_monomials(self.fp, &Monomial::generator(lam), &base)
            {
                out.add_term(self.fp, mono, c);
            }
        }
        Ok(out)
    }

    pub fn d_element(&self, e: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (m, c) in e.terms() {
            out = out.add(self.fp, &self.d_monomial(m)?.scale(self.fp, c));
        }
        Ok(out)
    }

    /// The canonical monomial χ_{S,f}: λ_{m+1}·γ_{pf(m)−p}(μ_m) over m ∈ S
    /// and γ_{pf(n)}(μ_n) over the rest of the support.
    pub fn chi(&self, idx: &ChiIndex) -> Result<Monomial> {
        let p = self.fp.p();
        let mut pairs = Vec::new();
        for (&n, &v) in &idx.f {
            let mu = self.mu(n).ok_or_else(|| {
                Error::BadGenerator(format!("mu_{} is outside this presentation", n))
            })?;
            let e = if idx.s.contains(&n) { p * v - p } else { p * v };
            if e > 0 {
                pairs.push((mu, e));
            }
            if idx.s.contains(&n) {
                let lam = self.lam(n).ok_or_else(|| {
                    Error::BadGenerator(format!("lambda_{} is outside this presentation", n + 1))
                })?;
                pairs.push((lam, 1));
            }
        }
        pairs.sort();
        Ok(Monomial::from_pairs(&pairs))
    }

    pub fn chi_tridegree(&self, idx: &ChiIndex) -> Result<Tridegree> {
        Ok(self.spec.monomial_degree(&self.chi(idx)?))
    }

    /// D applied to χ_{S,f}.
    pub fn dchi(&self, idx: &ChiIndex) -> Result<Element> {
        self.d_monomial(&self.chi(idx)?)
    }

    /// Tridegree of the torsion class Dχ_{S,f}.
    pub fn dchi_tridegree(&self, idx: &ChiIndex) -> Result<Tridegree> {
        let p = self.fp.p() as i64;
        Ok(self.chi_tridegree(idx)?.add(Tridegree::new(-(p - 1), p - 2, p - 1)))
    }

    /// Expand Dχ_{S,f}·Dχ_{T,g} in the basis {Dχ_{S∪T∪{u}, f+g}} indexed by
    /// the admissible u (in the combined support, outside S∪T∪{t_{f+g}}).
    /// The result maps each admissible u to its coefficient.
    pub fn dchi_product_expand(
        &self,
        a: &ChiIndex,
        b: &ChiIndex,
    ) -> Result<BTreeMap<usize, u32>> {
        if !a.is_torsion_index() || !b.is_torsion_index() {
            return Err(Error::Precondition(
                "product expansion needs torsion-class indices".into(),
            ));
        }
        let h = add_exponents(&a.f, &b.f);
        let union: BTreeSet<usize> = a.s.union(&b.s).copied().collect();
        let t_h = *h.keys().next().expect("non-empty support");
        let candidates: Vec<usize> = h
            .keys()
            .copied()
            .filter(|u| *u != t_h && !union.contains(u))
            .collect();
        let prod = self.dchi(a)?.mul(self.fp, &self.spec, &self.dchi(b)?);
        let mut basis_elements = Vec::new();
        for &u in &candidates {
            let mut s = union.clone();
            s.insert(u);
            basis_elements.push(self.dchi(&ChiIndex::new(s, h.clone())?)?);
        }
        // Index every monomial that appears, then solve the linear system.
        let mut index: BTreeMap<&Monomial, usize> = BTreeMap::new();
        for e in basis_elements.iter().chain(std::iter::once(&prod)) {
            for (m, _) in e.terms() {
                let next = index.len();
                index.entry(m).or_insert(next);
            }
        }
        let dim = index.len();
        let to_vec = |e: &Element| -> SparseVec {
            let mut v: SparseVec = e.terms().map(|(m, c)| (index[m], c)).collect();
            v.sort_by_key(|&(i, _)| i);
            v
        };
        let columns: Vec<SparseVec> = basis_elements.iter().map(to_vec).collect();
        let target = to_vec(&prod);
        let ncols = columns.len();
        if rank(&SparseMatrix::from_rows(dim, columns.clone()), self.fp) < ncols {
            return Err(Error::ShapeMismatch(
                "expansion classes are linearly dependent".into(),
            ));
        }
        let coeffs = solve_columns(self.fp, dim, &columns, &target)
            .ok_or(Error::NotInSpan(0))?;
        Ok(candidates.into_iter().zip(coeffs).filter(|&(_, c)| c != 0).collect())
    }

    /// Coefficient of Dχ_{S∪T∪{u}, f+g} in the product Dχ_{S,f}·Dχ_{T,g},
    /// computed from the actual product expansion.
    pub fn epsilon(&self, u: usize, a: &ChiIndex, b: &ChiIndex) -> Result<u32> {
        let h = add_exponents(&a.f, &b.f);
        let t_h = h.keys().next().copied().ok_or_else(|| {
            Error::Precondition("combined support is empty".into())
        })?;
        if !h.contains_key(&u) || u == t_h || a.s.contains(&u) || b.s.contains(&u) {
            return Err(Error::Precondition(format!(
                "index {} is not an admissible expansion direction",
                u
            )));
        }
        Ok(self.dchi_product_expand(a, b)?.get(&u).copied().unwrap_or(0))
    }

    /// The two-term binomial closed form for the expansion coefficient, with
    /// f and g kept as separate arguments of the binomial product and the
    /// inserted indices distributed over the two set slots. Each term carries
    /// the Koszul sign of inserting the odd letter into its block plus the
    /// pairwise inversion sign of the two blocks; at p = 2 both signs are
    /// trivial and the expression is the plain two-term sum.
    pub fn epsilon_closed_form(&self, u: usize, a: &ChiIndex, b: &ChiIndex) -> Option<u32> {
        let h = add_exponents(&a.f, &b.f);
        let t_h = h.keys().next().copied()?;
        let with = |base: &BTreeSet<usize>, extra: usize| -> BTreeSet<usize> {
            let mut s = base.clone();
            s.insert(extra);
            s
        };
        let below = |set: &BTreeSet<usize>, n: usize| set.iter().filter(|&&m| m < n).count();
        let term = |from_a: usize, from_b: usize| -> u32 {
            let s = with(&a.s, from_a);
            let t = with(&b.s, from_b);
            let k = k_coeff(self.fp, &s, &t, &a.f, &b.f);
            let parity = below(&a.s, from_a) + below(&b.s, from_b) + inversions(&s, &t);
            self.fp.mul(self.fp.sign(parity as i64), k)
        };
        Some(self.fp.add(term(u, t_h), term(t_h, u)))
    }

    /// The per-f cube: basis χ_{S,f} over S ⊆ supp f grouped by |S|, with
    /// the matrices of D from each level to the next.
    pub fn f_cube(&self, f: &BTreeMap<usize, u32>) -> Result<FCube> {
        let support: Vec<usize> = f.keys().copied().collect();
        let n = support.len();
        let mut subsets: Vec<Vec<BTreeSet<usize>>> = vec![Vec::new(); n + 1];
        for bits in 0u64..(1 << n) {
            let s: BTreeSet<usize> = support
                .iter()
                .enumerate()
                .filter(|(b, _)| bits >> b & 1 == 1)
                .map(|(_, &m)| m)
                .collect();
            subsets[s.len()].push(s);
        }
        for level in &mut subsets {
            level.sort();
        }
        let index: Vec<BTreeMap<&BTreeSet<usize>, usize>> = subsets
            .iter()
            .map(|v| v.iter().enumerate().map(|(i, s)| (s, i)).collect())
            .collect();
        let mut mats = Vec::new();
        for k in 0..n {
            let mut triplets = Vec::new();
            for (col, s) in subsets[k].iter().enumerate() {
                let idx = ChiIndex::new(s.clone(), f.clone())?;
                let image = self.dchi(&idx)?;
                for (m, c) in image.terms() {
                    let (rest, target) = self.decompose_monomial(m)?;
                    if !rest.is_one() || target.f != *f {
                        return Err(Error::ShapeMismatch(
                            "image of a cube class leaves the cube".into(),
                        ));
                    }
                    let row = *index[k + 1].get(&target.s).ok_or_else(|| {
                        Error::ShapeMismatch("image subset missing from the cube".into())
                    })?;
                    triplets.push((row, col, c));
                }
            }
            mats.push(SparseMatrix::from_triplets(
                subsets[k + 1].len(),
                subsets[k].len(),
                &triplets,
                self.fp,
            )?);
        }
        Ok(FCube { subsets, mats })
    }

    /// Homology dimensions of the per-f cube at each level 0..=|supp f|.
    /// Errors on empty support, where the cube is not contractible
    /// (it is the ground field in one spot).
    pub fn f_cube_homology(&self, f: &BTreeMap<usize, u32>) -> Result<Vec<usize>> {
        if f.is_empty() {
            return Err(Error::Precondition(
                "contractibility is only claimed for non-empty support".into(),
            ));
        }
        let cube = self.f_cube(f)?;
        let n = cube.subsets.len() - 1;
        let mut dims = Vec::new();
        for k in 0..=n {
            let cycles = if k == n {
                cube.subsets[n].len()
            } else {
                cube.subsets[k].len() - rank(&cube.mats[k], self.fp)
            };
            let boundaries = if k == 0 { 0 } else { rank(&cube.mats[k - 1], self.fp) };
            let h = cycles.checked_sub(boundaries).ok_or_else(|| {
                Error::ShapeMismatch("boundaries exceed cycles in a cube level".into())
            })?;
            dims.push(h);
        }
        Ok(dims)
    }

    /// Unique factorization of a monomial as (μ-part with exponents < p) ×
    /// χ_{S,f}: S is the λ-set, f(i) counts the p-blocks of the μ_i exponent
    /// (shifted by one on S), and the binomial gluing coefficient is a unit.
    pub fn decompose_monomial(&self, m: &Monomial) -> Result<(Monomial, ChiIndex)> {
        let p = self.fp.p();
        let mut s = BTreeSet::new();
        let mut f = BTreeMap::new();
        let mut rest = Vec::new();
        for &(gid, e) in m.factors() {
            if let Some(i) = self.lam.iter().position(|&g| g == gid) {
                if e != 1 {
                    return Err(Error::Precondition(format!(
                        "exterior exponent {} on lambda_{}",
                        e,
                        i + 1
                    )));
                }
                s.insert(i);
                f.entry(i).or_insert(0);
            } else if let Some(i) = self.mu_index_of(gid) {
                if e % p != 0 {
                    rest.push((gid, e % p));
                }
                if e / p > 0 {
                    *f.entry(i).or_insert(0) += e / p;
                }
            } else {
                return Err(Error::BadGenerator(format!("unknown generator id {}", gid)));
            }
        }
        for i in s.iter() {
            *f.get_mut(i).unwrap() += 1;
        }
        f.retain(|_, v| *v > 0);
        rest.sort();
        Ok((Monomial::from_pairs(&rest), ChiIndex::new(s, f)?))
    }

    /// All χ-indices with χ-stem ≤ the bound, over the generators of this
    /// presentation.
    pub fn chi_indices_bounded(&self, chi_stem_max: i64) -> Result<Vec<ChiIndex>> {
        let p = self.fp.p() as i64;
        let nmax = self.mu.len();
        // stem χ_{S,f} = Σ_n p·f(n)·2p^n − |S|, so enumerate f with the first
        // sum ≤ bound + (number of candidate indices), then filter exactly.
        let budget = chi_stem_max + nmax as i64;
        let mut fs: Vec<BTreeMap<usize, u32>> = Vec::new();
        let mut cur = BTreeMap::new();
        fn rec(
            n: usize,
            nmax: usize,
            p: i64,
            pw: i64,
            left: i64,
            cur: &mut BTreeMap<usize, u32>,
            out: &mut Vec<BTreeMap<usize, u32>>,
        ) {
            if n == nmax {
                out.push(cur.clone());
                return;
            }
            let unit = 2 * pw * p;
            let mut v = 0i64;
            while v * unit <= left {
                if v > 0 {
                    cur.insert(n, v as u32);
                }
                rec(n + 1, nmax, p, pw * p, left - v * unit, cur, out);
                cur.remove(&n);
                v += 1;
            }
        }
        rec(0, nmax, p, 1, budget, &mut cur, &mut fs);
        let mut out = Vec::new();
        for f in fs {
            let support: Vec<usize> = f.keys().copied().collect();
            let n = support.len();
            for bits in 0u64..(1 << n) {
                let s: BTreeSet<usize> = support
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| bits >> b & 1 == 1)
                    .map(|(_, &m)| m)
                    .collect();
                if s.iter().any(|&m| self.lam(m).is_none()) {
                    continue;
                }
                let idx = ChiIndex::new(s, f.clone())?;
                if self.chi_tridegree(&idx)?.stem() <= chi_stem_max {
                    out.push(idx);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Torsion-class indices (S,f) with t_f ∉ S whose class Dχ has stem ≤
    /// the bound.
    pub fn torsion_indices_bounded(&self, stem_max: i64) -> Result<Vec<ChiIndex>> {
        Ok(self
            .chi_indices_bounded(stem_max + 1)?
            .into_iter()
            .filter(|idx| idx.is_torsion_index())
            .filter(|idx| {
                self.dchi_tridegree(idx).map(|t| t.stem() <= stem_max).unwrap_or(false)
            })
            .collect())
    }

    /// Trigraded tables of the complex (C, D) through the given stem:
    /// monomial basis counts, cycles Z, boundaries B, and homology H with
    /// representative labels.
    pub fn zbh_tables(&self, stem_max: i64) -> Result<CubeTables> {
        let p = self.fp.p() as i64;
        // Boundaries at stem s come from sources at stem s+1, so enumerate
        // one stem further than reported.
        let monos = basis_enumerate(&self.spec, EnumBounds::stems(stem_max + 1), None)?;
        let mut cells: BTreeMap<Tridegree, Vec<Monomial>> = BTreeMap::new();
        for m in monos {
            cells.entry(self.spec.monomial_degree(&m)).or_default().push(m);
        }
        for v in cells.values_mut() {
            v.sort();
        }
        let keys: Vec<Tridegree> = cells.keys().copied().collect();
        let cell_index: BTreeMap<Tridegree, usize> =
            keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let shift = Tridegree::new(-(p - 1), p - 2, p - 1);
        // Matrix of D out of each cell, in the target cell's basis.
        let outs: Vec<SparseMatrix> = keys
            .par_iter()
            .map(|&key| -> Result<SparseMatrix> {
                let source = &cells[&key];
                let target_key = key.add(shift);
                let empty = Vec::new();
                let target = cells.get(&target_key).unwrap_or(&empty);
                let index: BTreeMap<&Monomial, usize> =
                    target.iter().enumerate().map(|(i, m)| (m, i)).collect();
                let mut triplets = Vec::new();
                for (col, m) in source.iter().enumerate() {
                    for (tm, c) in self.d_monomial(m)?.terms() {
                        let row = *index.get(tm).ok_or_else(|| {
                            Error::ShapeMismatch("derivation image outside enumerated cells".into())
                        })?;
                        triplets.push((row, col, c));
                    }
                }
                SparseMatrix::from_triplets(target.len(), source.len(), &triplets, self.fp)
            })
            .collect::<Result<Vec<_>>>()?;
        let data: Vec<(usize, usize, Vec<String>)> = keys
            .par_iter()
            .enumerate()
            .map(|(i, &key)| -> Result<(usize, usize, Vec<String>)> {
                let dim = cells[&key].len();
                let cycles = kernel_basis(&outs[i], self.fp);
                let source_key = key.add(shift.scale(-1));
                let boundaries: Vec<SparseVec> = match cell_index.get(&source_key) {
                    Some(&si) => outs[si]
                        .transpose()
                        .row_vecs()
                        .iter()
                        .filter(|v| !v.is_empty())
                        .cloned()
                        .collect(),
                    None => Vec::new(),
                };
                let sq = subquotient(dim, &cycles, &boundaries, self.fp)?;
                let labels = sq
                    .reps
                    .iter()
                    .map(|rep| {
                        let mut e = Element::zero();
                        for &(idx, c) in rep {
                            e.add_term(self.fp, cells[&key][idx].clone(), c);
                        }
                        self.spec.element_label(self.fp, &e)
                    })
                    .collect();
                Ok((sq.cycle_rank, sq.boundary_rank, labels))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut tables = CubeTables {
            basis: DimensionTable::new(),
            z: DimensionTable::new(),
            b: DimensionTable::new(),
            h: DimensionTable::new(),
        };
        for (i, &key) in keys.iter().enumerate() {
            if key.stem() > stem_max {
                continue;
            }
            let (cycle_rank, boundary_rank, labels) = &data[i];
            tables.basis.set(key, cells[&key].len());
            tables.z.set(key, *cycle_rank);
            tables.b.set(key, *boundary_rank);
            tables.h.set(key, cycle_rank - boundary_rank);
            tables.h.set_labels(key, labels.clone());
        }
        Ok(tables)
    }
}

/// The per-f cube: χ-classes grouped by subset size with the D matrices
/// between adjacent levels (mats[k]: level k → level k+1).
#[derive(Clone, Debug)]
pub struct FCube {
    pub subsets: Vec<Vec<BTreeSet<usize>>>,
    pub mats: Vec<SparseMatrix>,
}

/// Trigraded dimension tables of (C, D).
#[derive(Clone, Debug)]
pub struct CubeTables {
    pub basis: DimensionTable,
    pub z: DimensionTable,
    pub b: DimensionTable,
    pub h: DimensionTable,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> Fp {
        Fp::new(p).unwrap()
    }

    fn fmap(pairs: &[(usize, u32)]) -> BTreeMap<usize, u32> {
        pairs.iter().copied().collect()
    }

    fn sset(items: &[usize]) -> BTreeSet<usize> {
        items.iter().copied().collect()
    }

    fn idx(s: &[usize], fv: &[(usize, u32)]) -> ChiIndex {
        ChiIndex::new(sset(s), fmap(fv)).unwrap()
    }

    #[test]
    fn generators_interleave_by_topological_degree() {
        let alg = CubeAlgebra::new(f(3), 2).unwrap();
        let labels: Vec<i64> = (0..alg.spec.generators.len())
            .map(|g| alg.spec.degree(g).d)
            .collect();
        assert_eq!(labels, vec![1, 4, 5, 16, 17, 52]);
        assert_eq!(alg.mu(1), alg.spec.by_name("mu_1"));
        assert_eq!(alg.lam(0), alg.spec.by_name("lambda_1"));
    }

    #[test]
    fn derivation_on_small_divided_powers() {
        let alg2 = CubeAlgebra::new(f(2), 1).unwrap();
        let gamma2 = Monomial::power(alg2.mu(0).unwrap(), 2);
        let lam1 = Monomial::generator(alg2.lam(0).unwrap());
        assert_eq!(alg2.d_monomial(&gamma2).unwrap(), Element::term(lam1, 1));

        let alg3 = CubeAlgebra::new(f(3), 1).unwrap();
        let gamma3 = Monomial::power(alg3.mu(0).unwrap(), 3);
        let lam1 = Monomial::generator(alg3.lam(0).unwrap());
        assert_eq!(alg3.d_monomial(&gamma3).unwrap(), Element::term(lam1, 1));
        let gamma2 = Monomial::power(alg3.mu(0).unwrap(), 2);
        assert!(alg3.d_monomial(&gamma2).unwrap().is_zero());
    }

    #[test]
    fn derivation_squares_to_zero() {
        for p in [2u64, 3] {
            let alg = CubeAlgebra::for_stem(f(p), 13).unwrap();
            for m in basis_enumerate(&alg.spec, EnumBounds::stems(12), None).unwrap() {
                let dd = alg.d_element(&alg.d_monomial(&m).unwrap()).unwrap();
                assert!(dd.is_zero(), "D² ≠ 0 at p={} on {:?}", p, m);
            }
        }
    }

    #[test]
    fn derivation_satisfies_leibniz_on_a_divided_power_square() {
        // γ_3(μ_0)·γ_3(μ_0) = C(6,3)·γ_6 = 2γ_6 at p = 3, so
        // D(γ_3·γ_3) = 2λ_1γ_3 must equal Dγ_3·γ_3 + γ_3·Dγ_3.
        let alg = CubeAlgebra::new(f(3), 1).unwrap();
        let fp = f(3);
        let g3 = Element::term(Monomial::power(alg.mu(0).unwrap(), 3), 1);
        let prod = g3.mul(fp, &alg.spec, &g3);
        assert_eq!(prod, Element::term(Monomial::power(alg.mu(0).unwrap(), 6), 2));
        let lhs = alg.d_element(&prod).unwrap();
        let dg3 = alg.d_element(&g3).unwrap();
        // Both γ-classes have even stem, so no Koszul sign enters here.
        let rhs = dg3.mul(fp, &alg.spec, &g3).add(fp, &g3.mul(fp, &alg.spec, &dg3));
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.num_terms(), 1);
    }

    #[test]
    fn chi_special_cases() {
        let alg = CubeAlgebra::new(f(2), 2).unwrap();
        assert!(alg.chi(&idx(&[], &[])).unwrap().is_one());
        // χ_{∅, p^j·δ_n} = γ_{p^{j+1}}(μ_n).
        let chi = alg.chi(&idx(&[], &[(0, 2)])).unwrap();
        assert_eq!(chi, Monomial::power(alg.mu(0).unwrap(), 4));
        assert_eq!(
            alg.chi_tridegree(&idx(&[], &[(0, 1)])).unwrap(),
            Tridegree::new(2, 2, 0)
        );
        // χ_{{m}, δ_m} = λ_{m+1}.
        let chi = alg.chi(&idx(&[1], &[(1, 1)])).unwrap();
        assert_eq!(chi, Monomial::generator(alg.lam(1).unwrap()));
    }

    #[test]
    fn dchi_expands_with_alternating_signs() {
        // At p = 3 with S = {1}, f = δ_0 + δ_1 + δ_2:
        // Dχ = χ_{{0,1},f} − χ_{{1,2},f}.
        let alg = CubeAlgebra::new(f(3), 2).unwrap();
        let base = idx(&[1], &[(0, 1), (1, 1), (2, 1)]);
        let image = alg.dchi(&base).unwrap();
        let plus = alg.chi(&idx(&[0, 1], &[(0, 1), (1, 1), (2, 1)])).unwrap();
        let minus = alg.chi(&idx(&[1, 2], &[(0, 1), (1, 1), (2, 1)])).unwrap();
        let mut expected = Element::term(plus, 1);
        expected.add_term(f(3), minus, 2);
        assert_eq!(image, expected);
    }

    #[test]
    fn chi_products_follow_the_binomial_law() {
        let fp = f(3);
        let alg = CubeAlgebra::new(fp, 2).unwrap();
        // Divided-power merge: χ_{∅,δ_0}·χ_{∅,δ_0} = C(6,3)·χ_{∅,2δ_0}.
        let a = idx(&[], &[(0, 1)]);
        let chi_a = alg.chi(&a).unwrap();
        let prod = Element::term(chi_a.clone(), 1).mul(fp, &alg.spec, &Element::term(chi_a, 1));
        let k = k_coeff(fp, &sset(&[]), &sset(&[]), &fmap(&[(0, 1)]), &fmap(&[(0, 1)]));
        assert_eq!(k, 2);
        let expected = Element::term(alg.chi(&idx(&[], &[(0, 2)])).unwrap(), k);
        assert_eq!(prod, expected);

        // Exterior factors in canonical order: λ_2·λ_3 = +χ, and the swapped
        // order picks up the inversion sign.
        let s1 = idx(&[1], &[(1, 1)]);
        let s2 = idx(&[2], &[(2, 1)]);
        let c1 = Element::term(alg.chi(&s1).unwrap(), 1);
        let c2 = Element::term(alg.chi(&s2).unwrap(), 1);
        let union = alg.chi(&idx(&[1, 2], &[(1, 1), (2, 1)])).unwrap();
        let k12 = k_coeff(fp, &sset(&[1]), &sset(&[2]), &fmap(&[(1, 1)]), &fmap(&[(2, 1)]));
        assert_eq!(k12, 1);
        assert_eq!(inversions(&sset(&[1]), &sset(&[2])), 0);
        assert_eq!(c1.mul(fp, &alg.spec, &c2), Element::term(union.clone(), 1));
        assert_eq!(inversions(&sset(&[2]), &sset(&[1])), 1);
        assert_eq!(c2.mul(fp, &alg.spec, &c1), Element::term(union, 2));
    }

    #[test]
    fn cube_levels_have_binomial_dimensions_and_no_homology() {
        let alg = CubeAlgebra::new(f(2), 2).unwrap();
        let fv = fmap(&[(0, 1), (1, 2), (2, 1)]);
        let cube = alg.f_cube(&fv).unwrap();
        let dims: Vec<usize> = cube.subsets.iter().map(Vec::len).collect();
        assert_eq!(dims, vec![1, 3, 3, 1]);
        assert_eq!(alg.f_cube_homology(&fv).unwrap(), vec![0, 0, 0, 0]);
        assert!(matches!(
            alg.f_cube_homology(&BTreeMap::new()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn cubes_are_contractible_at_an_odd_prime() {
        let alg = CubeAlgebra::new(f(3), 2).unwrap();
        for fv in [fmap(&[(0, 2)]), fmap(&[(0, 1), (1, 1)]), fmap(&[(1, 2), (2, 1)])] {
            let dims = alg.f_cube_homology(&fv).unwrap();
            assert!(dims.iter().all(|&d| d == 0), "H ≠ 0 for {:?}", fv);
        }
    }

    #[test]
    fn expansion_coefficients_at_p2_match_the_closed_form() {
        let alg = CubeAlgebra::new(f(2), 2).unwrap();
        let a = idx(&[], &[(0, 1), (1, 1)]);
        let b = idx(&[], &[(2, 1)]);
        let expansion = alg.dchi_product_expand(&a, &b).unwrap();
        // Admissible directions are u ∈ {1, 2}; the product lands on u = 1
        // and u = 2 with the coefficients the two-term binomial form gives.
        for u in [1usize, 2] {
            let closed = alg.epsilon_closed_form(u, &a, &b).unwrap();
            assert_eq!(expansion.get(&u).copied().unwrap_or(0), closed, "u = {}", u);
        }
    }

    #[test]
    fn expansion_coefficients_detect_anticommutativity_at_odd_primes() {
        let alg = CubeAlgebra::new(f(3), 1).unwrap();
        let a = idx(&[], &[(0, 1)]);
        let b = idx(&[], &[(1, 1)]);
        assert_eq!(alg.epsilon(1, &a, &b).unwrap(), 1);
        assert_eq!(alg.epsilon(1, &b, &a).unwrap(), 2);
        assert!(alg.epsilon(0, &a, &b).is_err());
    }

    #[test]
    fn monomial_decomposition_round_trips() {
        for p in [2u64, 3] {
            let alg = CubeAlgebra::for_stem(f(p), 11).unwrap();
            for m in basis_enumerate(&alg.spec, EnumBounds::stems(10), None).unwrap() {
                let (rest, chi_idx) = alg.decompose_monomial(&m).unwrap();
                for &(_, e) in rest.factors() {
                    assert!(e < alg.fp.p());
                }
                let chi = alg.chi(&chi_idx).unwrap();
                let (prod, coeff) = alg.spec.mul_monomials(alg.fp, &rest, &chi).unwrap();
                assert_eq!(prod, m);
                assert_eq!(coeff, 1, "gluing unit fails for {:?}", m);
            }
        }
    }

    #[test]
    fn homology_is_a_truncated_polynomial_algebra() {
        for p in [2u64, 3] {
            let fp = f(p);
            let alg = CubeAlgebra::for_stem(fp, 10).unwrap();
            let tables = alg.zbh_tables(10).unwrap();
            // Independent enumeration of ⊗ F_p[μ_i]/μ_i^p.
            let trunc = AlgebraSpec::new(
                (0..alg.mu_count())
                    .map(|i| {
                        let gid = alg.mu(i).unwrap();
                        GeneratorSpec {
                            name: format!("m{}", i),
                            kind: GeneratorKind::Truncated(fp.p()),
                            degree: alg.spec.degree(gid),
                        }
                    })
                    .collect(),
            );
            let mut expected = DimensionTable::new();
            for m in basis_enumerate(&trunc, EnumBounds::stems(10), None).unwrap() {
                expected.add(trunc.monomial_degree(&m), 1);
            }
            assert_eq!(tables.h.diff(&expected), vec![]);
        }
    }

    #[test]
    fn torsion_indices_in_a_stem_range() {
        let alg = CubeAlgebra::for_stem(f(2), 8).unwrap();
        let indices = alg.torsion_indices_bounded(7).unwrap();
        // Stems of Dχ: (∅,δ_0) → 3, (∅,2δ_0) → 7, ({1},δ_0+δ_1) → hmm.
        assert!(indices.contains(&idx(&[], &[(0, 1)])));
        assert!(indices.contains(&idx(&[], &[(0, 2)])));
        for i in &indices {
            assert!(i.is_torsion_index());
            assert!(alg.dchi_tridegree(i).unwrap().stem() <= 7);
        }
        assert!(!indices.is_empty());
    }

    #[test]
    fn labels_serialize_subset_and_exponents() {
        assert_eq!(idx(&[0], &[(0, 1), (1, 2)]).label(), "x{0;1*d0+2*d1}");
        assert_eq!(idx(&[], &[(0, 1)]).label(), "x{;1*d0}");
    }
}
