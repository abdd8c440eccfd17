//! The three computed coefficient rings in closed form: the étale ring
//! `F_p[μ, τ^{±1}]`, the reduced ring `(⊗_i Γ(μ̄_i) ⊗ Λ(λ̄_{i+1})) ⊗ F_p[τ]/τ^{p−1}`,
//! and the integral ring
//! `F_p[τ, μ_i, x_{S,f}] / (μ_i^p − τ^{p−1}μ_{i+1}, τ^{p−1}x_{S,f}, x·x − Σ ε·x)`,
//! presented as a terminating rewriting system with an explicit normal-form
//! basis. The module also provides the Hilbert-function tables, the pullback
//! consistency checker that cross-verifies the integral basis against the
//! τ-inverted and τ-truncated answers, the comparison with the classical
//! topological Hochschild homology of a prime field, and the τ-torsion
//! witness certificate.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{basis_enumerate, Element, EnumBounds, Monomial};
use crate::cube::{add_exponents, ChiIndex, CubeAlgebra};
use crate::fp::Fp;
use crate::grading::{Bidegree, Tridegree};
use crate::linalg::{rank, SparseMatrix, SparseVec};
use crate::table::{BidegreeTable, DimensionTable};
use crate::{Error, Result};

fn pow_i64(base: i64, exp: usize) -> Result<i64> {
    let mut out = 1i64;
    for _ in 0..exp {
        out = out.checked_mul(base).ok_or_else(|| {
            Error::Precondition("generator index too large for the grading".into())
        })?;
    }
    Ok(out)
}

/// Bidegree of μ_i in the abutment grading: `(2p^i, p^i − 1)`.
pub fn mu_bidegree(fp: Fp, i: usize) -> Result<Bidegree> {
    let pi = pow_i64(fp.p() as i64, i)?;
    Ok(Bidegree::new(2 * pi, pi - 1))
}

/// Bidegree of the torsion generator:
/// `|x_{S,f}| = (|S|+1)·(−1, p−1) + p·Σ_j f(j)·(2p^j, p^j−1)`.
pub fn x_degree(fp: Fp, idx: &ChiIndex) -> Result<Bidegree> {
    if !idx.is_torsion_index() {
        return Err(Error::Precondition(format!(
            "{} is not a torsion-class index",
            idx.label()
        )));
    }
    let p = fp.p() as i64;
    let card = idx.s.len() as i64 + 1;
    let mut stem = -card;
    let mut w = card * (p - 1);
    for (&j, &v) in &idx.f {
        let pj = pow_i64(p, j)?;
        stem += p * (v as i64) * 2 * pj;
        w += p * (v as i64) * (pj - 1);
    }
    Ok(Bidegree::new(stem, w))
}

// ---------------------------------------------------------------------------
// The étale ring
// ---------------------------------------------------------------------------

/// `F_p[μ, τ^{±1}]` with `|μ| = (2, 0)`: one basis class in every bidegree
/// `(2k, w)` with `k ≥ 0`. In the μ-family presentation that class is
/// `τ^{W(k)−w}·Πμ_i^{k_i}` where the `k_i` are the base-p digits of k and
/// `W(k)` is the weight of the μ-monomial.
pub struct EtaleRing {
    pub fp: Fp,
}

impl EtaleRing {
    pub fn new(fp: Fp) -> EtaleRing {
        EtaleRing { fp }
    }

    pub fn dim(&self, b: Bidegree) -> usize {
        usize::from(b.stem >= 0 && b.stem % 2 == 0)
    }

    /// Base-p digits of `k`, least significant first, with their μ-weight.
    fn digits(&self, k: i64) -> (Vec<u32>, i64) {
        let p = self.fp.p() as i64;
        let mut digits = Vec::new();
        let mut rest = k;
        let mut weight = 0i64;
        let mut pi = 1i64;
        while rest > 0 {
            let d = rest % p;
            digits.push(d as u32);
            weight += d * (pi - 1);
            rest /= p;
            pi *= p;
        }
        (digits, weight)
    }

    /// Label of the unique basis class at `b`, if the bidegree is occupied.
    pub fn label(&self, b: Bidegree) -> Option<String> {
        if self.dim(b) == 0 {
            return None;
        }
        let (digits, weight) = self.digits(b.stem / 2);
        let mut parts = Vec::new();
        let e = weight - b.w;
        match e {
            0 => {}
            1 => parts.push("tau".to_string()),
            _ => parts.push(format!("tau^{e}")),
        }
        for (i, &d) in digits.iter().enumerate() {
            match d {
                0 => {}
                1 => parts.push(format!("mu_{i}")),
                _ => parts.push(format!("mu_{i}^{d}")),
            }
        }
        if parts.is_empty() {
            Some("1".to_string())
        } else {
            Some(parts.join("*"))
        }
    }

    pub fn hilbert(&self, stem_max: i64, w_min: i64, w_max: i64) -> BidegreeTable {
        let mut table = BidegreeTable::new();
        for stem in (0..=stem_max).step_by(2) {
            for w in w_min..=w_max {
                let b = Bidegree::new(stem, w);
                table.set(b, 1);
                table.set_labels(b, vec![self.label(b).expect("even stem")]);
            }
        }
        table
    }

    /// Per-stem comparison against the classical answer `F_p[μ]`, `|μ| = 2`:
    /// the étale theory is that ring with τ adjoined invertibly, so modulo
    /// τ-powers each stem carries the classical dimension. Returns
    /// `(stem, τ-orbit count, classical dim)` triples.
    pub fn betti_comparison(&self, stem_max: i64) -> Vec<(i64, usize, usize)> {
        (0..=stem_max)
            .map(|s| {
                let orbits = self.dim(Bidegree::new(s, 0));
                let classical = usize::from(s >= 0 && s % 2 == 0);
                (s, orbits, classical)
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// The reduced ring
// ---------------------------------------------------------------------------

/// `(⊗_i Γ(μ̄_i) ⊗ Λ(λ̄_{i+1})) ⊗ F_p[τ]/τ^{p−1}`: cube monomials times a
/// truncated τ-window (empty τ-line at p = 2).
pub struct ReducedRing {
    pub cube: CubeAlgebra,
}

impl ReducedRing {
    pub fn for_stem(fp: Fp, stem_max: i64) -> Result<ReducedRing> {
        Ok(ReducedRing { cube: CubeAlgebra::for_stem(fp, stem_max)? })
    }

    /// Trigraded dimensions with labels: the class `τ^c·m` is reported at
    /// `(f_m, d_m, w_m − c)` for `0 ≤ c ≤ p − 2`.
    pub fn dimension_table(&self, stem_max: i64) -> Result<DimensionTable> {
        let p = self.cube.fp.p() as i64;
        let monos = basis_enumerate(&self.cube.spec, EnumBounds::stems(stem_max), None)?;
        let mut cells: BTreeMap<Tridegree, Vec<String>> = BTreeMap::new();
        for m in &monos {
            let t = self.cube.spec.monomial_degree(m);
            let base = self.cube.spec.monomial_label(m);
            for c in 0..=(p - 2).max(0) {
                let label = match (c, base.as_str()) {
                    (0, _) => base.clone(),
                    (1, "1") => "tau".to_string(),
                    (_, "1") => format!("tau^{c}"),
                    (1, _) => format!("tau*{base}"),
                    _ => format!("tau^{c}*{base}"),
                };
                cells
                    .entry(Tridegree::new(t.f, t.d, t.w - c))
                    .or_default()
                    .push(label);
            }
        }
        let mut table = DimensionTable::new();
        for (t, mut labels) in cells {
            labels.sort();
            table.set(t, labels.len());
            table.set_labels(t, labels);
        }
        Ok(table)
    }

    pub fn hilbert(&self, stem_max: i64) -> Result<BidegreeTable> {
        Ok(self.dimension_table(stem_max)?.to_bidegrees())
    }
}

// ---------------------------------------------------------------------------
// The integral ring
// ---------------------------------------------------------------------------

/// A normal-form monomial: `τ^a · Πμ_i^{e_i} · (x_{S,f})?` with every μ-
/// exponent below p, and `a ≤ p − 2` whenever the x-factor is present.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct RingMonomial {
    pub tau: u32,
    pub mu: BTreeMap<usize, u32>,
    pub x: Option<ChiIndex>,
}

impl RingMonomial {
    pub fn one() -> RingMonomial {
        RingMonomial { tau: 0, mu: BTreeMap::new(), x: None }
    }

    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        match self.tau {
            0 => {}
            1 => parts.push("tau".to_string()),
            a => parts.push(format!("tau^{a}")),
        }
        for (&i, &e) in &self.mu {
            match e {
                0 => {}
                1 => parts.push(format!("mu_{i}")),
                _ => parts.push(format!("mu_{i}^{e}")),
            }
        }
        if let Some(idx) = &self.x {
            parts.push(idx.label());
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

/// A formal product of generators, prior to normalization: μ-exponents and
/// the τ-power are unrestricted and any number of x-factors may appear, in
/// a remembered order.
#[derive(Clone, Debug)]
pub struct RawTerm {
    pub coeff: u32,
    pub tau: u32,
    pub mu: BTreeMap<usize, u32>,
    pub xs: Vec<ChiIndex>,
}

impl RawTerm {
    pub fn one() -> RawTerm {
        RawTerm { coeff: 1, tau: 0, mu: BTreeMap::new(), xs: Vec::new() }
    }

    pub fn tau_power(a: u32) -> RawTerm {
        RawTerm { tau: a, ..RawTerm::one() }
    }

    pub fn with_mu(mut self, i: usize, e: u32) -> RawTerm {
        if e > 0 {
            *self.mu.entry(i).or_insert(0) += e;
        }
        self
    }

    pub fn with_x(mut self, idx: ChiIndex) -> RawTerm {
        self.xs.push(idx);
        self
    }
}

/// A linear combination of normal-form monomials.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RingElement {
    terms: BTreeMap<RingMonomial, u32>,
}

impl RingElement {
    pub fn zero() -> RingElement {
        RingElement::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&RingMonomial, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &RingMonomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    fn add_term(&mut self, fp: Fp, m: RingMonomial, c: u32) {
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
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
        }
    }

    pub fn add(&self, fp: Fp, other: &RingElement) -> RingElement {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(fp, m.clone(), c);
        }
        out
    }

    pub fn scale(&self, fp: Fp, c: u32) -> RingElement {
        let mut out = RingElement::zero();
        for (m, a) in self.terms() {
            out.add_term(fp, m.clone(), fp.mul(a, c));
        }
        out
    }

    pub fn label(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(m, c)| {
                if c == 1 {
                    m.label()
                } else if m.mu.is_empty() && m.tau == 0 && m.x.is_none() {
                    format!("{c}")
                } else {
                    format!("{c}*{}", m.label())
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// A reducible site in an expression: one rewrite applies at one term.
#[derive(Clone, Copy, Debug)]
enum Site {
    /// τ-power at or past p−1 on a term carrying an x-factor: the term dies.
    TauKill(usize),
    /// μ-exponent at or past p at the named index: carry into `μ_{i+1}`.
    MuCarry(usize, usize),
    /// Two adjacent x-factors starting at the named position: ε-expansion.
    XPair(usize, usize),
}

/// One torsion-witness certificate: the class, its bidegree, and the facts
/// certifying τ-power torsion that is not τ-divisible.
#[derive(Clone, Debug)]
pub struct TorsionWitness {
    pub label: String,
    pub bidegree: Bidegree,
    pub nonzero: bool,
    /// τ^{p−1} annihilates the class.
    pub annihilated: bool,
    /// τ^{p−2} does not (trivially true at p = 2).
    pub lower_power_survives: bool,
    /// No torsion basis monomial sits one τ-step above the class.
    pub tau_divisible: bool,
    pub ok: bool,
}

/// One failing cell of the pullback consistency check.
#[derive(Clone, Debug)]
pub struct PullbackLine {
    pub check: String,
    pub stem: i64,
    pub w: i64,
    pub expected: usize,
    pub got: usize,
}

/// Outcome of the pullback consistency check: the number of verified
/// bidegree cells and the failures (expected empty).
#[derive(Clone, Debug)]
pub struct PullbackReport {
    pub checked: usize,
    pub failures: Vec<PullbackLine>,
}

impl PullbackReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The integral coefficient ring, presented by generators and relations and
/// computed through its rewriting system. The embedded cube algebra is the
/// single source of the ε-expansion coefficients.
pub struct IntegralRing {
    pub fp: Fp,
    pub cube: CubeAlgebra,
}

impl IntegralRing {
    /// Ring with μ/λ generator families up to the given index.
    pub fn new(fp: Fp, imax: usize) -> Result<IntegralRing> {
        Ok(IntegralRing { fp, cube: CubeAlgebra::new(fp, imax)? })
    }

    /// Ring able to express every basis class and product through `stem_max`.
    pub fn for_stem(fp: Fp, stem_max: i64) -> Result<IntegralRing> {
        Ok(IntegralRing { fp, cube: CubeAlgebra::for_stem(fp, stem_max + 1)? })
    }

    /// Bidegree of the torsion generator, cross-checked against the cube
    /// presentation: the closed formula must equal the projected tridegree
    /// of Dχ whenever the cube can express the class.
    pub fn x_degree(&self, idx: &ChiIndex) -> Result<Bidegree> {
        let b = x_degree(self.fp, idx)?;
        if idx.f.keys().all(|&j| self.cube.mu(j).is_some())
            && idx.s.iter().all(|&m| self.cube.lam(m).is_some())
        {
            let t = self.cube.dchi_tridegree(idx)?;
            if (t.stem(), t.w) != (b.stem, b.w) {
                return Err(Error::ShapeMismatch(format!(
                    "torsion degree formula disagrees with the presentation at {}",
                    idx.label()
                )));
            }
        }
        Ok(b)
    }

    pub fn monomial_bidegree(&self, m: &RingMonomial) -> Result<Bidegree> {
        let mut stem = 0i64;
        let mut w = -(m.tau as i64);
        for (&i, &e) in &m.mu {
            let b = mu_bidegree(self.fp, i)?;
            stem += b.stem * e as i64;
            w += b.w * e as i64;
        }
        if let Some(idx) = &m.x {
            let b = x_degree(self.fp, idx)?;
            stem += b.stem;
            w += b.w;
        }
        Ok(Bidegree::new(stem, w))
    }

    /// The generator x_{S,f} as a ring element; errors when the index is not
    /// a torsion index.
    pub fn x_class(&self, idx: &ChiIndex) -> Result<RingElement> {
        if !idx.is_torsion_index() {
            return Err(Error::Precondition(format!(
                "{} is not a torsion-class index",
                idx.label()
            )));
        }
        let mut e = RingElement::zero();
        e.add_term(
            self.fp,
            RingMonomial { tau: 0, mu: BTreeMap::new(), x: Some(idx.clone()) },
            1,
        );
        Ok(e)
    }

    /// Fully reduces a formal expression, applying rewrites left to right.
    pub fn normal_form(&self, terms: &[RawTerm]) -> Result<RingElement> {
        self.reduce(terms, &mut None)
    }

    /// Fully reduces a formal expression, choosing each rewrite site with the
    /// seeded generator. Confluence of the system makes the result
    /// independent of the seed; the property suite verifies exactly that.
    pub fn normal_form_seeded(&self, terms: &[RawTerm], seed: u64) -> Result<RingElement> {
        self.reduce(terms, &mut Some(ChaCha8Rng::seed_from_u64(seed)))
    }

    fn sites(&self, terms: &[RawTerm]) -> Vec<Site> {
        let p = self.fp.p();
        let mut out = Vec::new();
        for (ti, t) in terms.iter().enumerate() {
            if t.tau >= p - 1 && !t.xs.is_empty() {
                out.push(Site::TauKill(ti));
            }
            for (&i, &e) in &t.mu {
                if e >= p {
                    out.push(Site::MuCarry(ti, i));
                }
            }
            for j in 0..t.xs.len().saturating_sub(1) {
                out.push(Site::XPair(ti, j));
            }
        }
        out
    }

    fn apply(&self, terms: &mut Vec<RawTerm>, site: Site) -> Result<()> {
        let p = self.fp.p();
        match site {
            Site::TauKill(ti) => {
                terms.remove(ti);
            }
            Site::MuCarry(ti, i) => {
                let t = &mut terms[ti];
                let e = t.mu.get_mut(&i).expect("carry site");
                *e -= p;
                if *e == 0 {
                    t.mu.remove(&i);
                }
                *t.mu.entry(i + 1).or_insert(0) += 1;
                t.tau += p - 1;
            }
            Site::XPair(ti, j) => {
                let t = terms.remove(ti);
                let a = &t.xs[j];
                let b = &t.xs[j + 1];
                let expansion = self.cube.dchi_product_expand(a, b)?;
                let h = add_exponents(&a.f, &b.f);
                let mut union = a.s.clone();
                union.extend(b.s.iter().copied());
                for (u, c) in expansion {
                    let mut s = union.clone();
                    s.insert(u);
                    let merged = ChiIndex::new(s, h.clone())?;
                    let mut xs = t.xs.clone();
                    xs.splice(j..=j + 1, std::iter::once(merged));
                    terms.push(RawTerm {
                        coeff: self.fp.mul(t.coeff, c),
                        tau: t.tau,
                        mu: t.mu.clone(),
                        xs,
                    });
                }
            }
        }
        Ok(())
    }

    fn reduce(&self, input: &[RawTerm], rng: &mut Option<ChaCha8Rng>) -> Result<RingElement> {
        for t in input {
            for idx in &t.xs {
                if !idx.is_torsion_index() {
                    return Err(Error::Precondition(format!(
                        "{} is not a torsion-class index",
                        idx.label()
                    )));
                }
            }
        }
        let mut terms: Vec<RawTerm> =
            input.iter().filter(|t| t.coeff % self.fp.p() != 0).cloned().collect();
        loop {
            let sites = self.sites(&terms);
            if sites.is_empty() {
                break;
            }
            let pick = match rng {
                Some(r) => sites[r.random_range(0..sites.len())],
                None => sites[0],
            };
            self.apply(&mut terms, pick)?;
        }
        let mut out = RingElement::zero();
        for t in terms {
            debug_assert!(t.xs.len() <= 1);
            let mono = RingMonomial {
                tau: t.tau,
                mu: t.mu.into_iter().filter(|&(_, e)| e > 0).collect(),
                x: t.xs.into_iter().next(),
            };
            out.add_term(self.fp, mono, t.coeff);
        }
        Ok(out)
    }

    /// Product of two normalized elements.
    pub fn mul(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        let mut raw = Vec::new();
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                let mut mu = ma.mu.clone();
                for (&i, &e) in &mb.mu {
                    *mu.entry(i).or_insert(0) += e;
                }
                let xs: Vec<ChiIndex> =
                    ma.x.iter().chain(mb.x.iter()).cloned().collect();
                raw.push(RawTerm {
                    coeff: self.fp.mul(ca, cb),
                    tau: ma.tau + mb.tau,
                    mu,
                    xs,
                });
            }
        }
        self.normal_form(&raw)
    }

    /// μ-monomials with all exponents below p and stem within the bound,
    /// as `(exponents, stem, weight)` triples, sorted.
    fn mu_digit_monomials(&self, stem_max: i64) -> Result<Vec<(BTreeMap<usize, u32>, i64, i64)>> {
        let p = self.fp.p() as i64;
        let mut out = Vec::new();
        let mut cur: BTreeMap<usize, u32> = BTreeMap::new();
        fn rec(
            p: i64,
            i: usize,
            pi: i64,
            left: i64,
            cur: &mut BTreeMap<usize, u32>,
            stem: i64,
            w: i64,
            out: &mut Vec<(BTreeMap<usize, u32>, i64, i64)>,
        ) {
            if 2 * pi > left {
                out.push((cur.clone(), stem, w));
                return;
            }
            for e in 0..p {
                let cost = e * 2 * pi;
                if cost > left {
                    break;
                }
                if e > 0 {
                    cur.insert(i, e as u32);
                }
                rec(p, i + 1, pi * p, left - cost, cur, stem + cost, w + e * (pi - 1), out);
                cur.remove(&i);
            }
        }
        rec(p, 0, 1, stem_max, &mut cur, 0, 0, &mut out);
        out.sort();
        Ok(out)
    }

    /// All normal-form basis monomials with stem ≤ `stem_max` and weight in
    /// the window, sorted. The τ-free family needs the weight window to stay
    /// finite; the torsion family is finite on its own but respects it too.
    pub fn basis(
        &self,
        stem_max: i64,
        w_min: i64,
        w_max: i64,
    ) -> Result<Vec<RingMonomial>> {
        let p = self.fp.p() as i64;
        let mut out = Vec::new();
        let digit_monos = self.mu_digit_monomials(stem_max)?;
        for (mu, _stem, w_mu) in &digit_monos {
            // τ^a·μ^E sits at weight w_mu − a; solve the window for a ≥ 0.
            let a_lo = (w_mu - w_max).max(0);
            let a_hi = w_mu - w_min;
            for a in a_lo..=a_hi {
                out.push(RingMonomial { tau: a as u32, mu: mu.clone(), x: None });
            }
        }
        for idx in self.cube.torsion_indices_bounded(stem_max)? {
            let xb = self.x_degree(&idx)?;
            for (mu, stem_mu, w_mu) in &digit_monos {
                if stem_mu + xb.stem > stem_max {
                    continue;
                }
                for c in 0..=(p - 2).max(0) {
                    let w = w_mu + xb.w - c;
                    if w < w_min || w > w_max {
                        continue;
                    }
                    out.push(RingMonomial {
                        tau: c as u32,
                        mu: mu.clone(),
                        x: Some(idx.clone()),
                    });
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Hilbert table of the normal-form basis over the window, with labels.
    pub fn hilbert(
        &self,
        stem_max: i64,
        w_min: i64,
        w_max: i64,
    ) -> Result<BidegreeTable> {
        let mut table = BidegreeTable::new();
        for m in self.basis(stem_max, w_min, w_max)? {
            let b = self.monomial_bidegree(&m)?;
            table.add(b, 1);
            table.push_labels(b, vec![m.label()]);
        }
        Ok(table)
    }

    /// The pullback consistency check. For every bidegree in the window it
    /// verifies: (a) the basis count is the sum of its τ-free and torsion
    /// parts; (b) the torsion count equals the cube boundary dimensions
    /// spread over the τ-window `{1, …, τ^{p−2}}`; (c) per stem, the τ-free
    /// part localizes to the étale ring; (d) the torsion monomials map to
    /// linearly independent elements of the reduced ring (computed as an
    /// exact rank over the cube monomial basis).
    pub fn pullback_check(
        &self,
        stem_max: i64,
        w_min: i64,
        w_max: i64,
    ) -> Result<PullbackReport> {
        let fp = self.fp;
        let p = fp.p() as i64;
        let basis = self.basis(stem_max, w_min, w_max)?;
        let mut total: BTreeMap<Bidegree, usize> = BTreeMap::new();
        let mut free: BTreeMap<Bidegree, usize> = BTreeMap::new();
        let mut torsion: BTreeMap<Bidegree, Vec<&RingMonomial>> = BTreeMap::new();
        for m in &basis {
            let b = self.monomial_bidegree(m)?;
            *total.entry(b).or_insert(0) += 1;
            if m.x.is_none() {
                *free.entry(b).or_insert(0) += 1;
            } else {
                torsion.entry(b).or_default().push(m);
            }
        }

        // Cube boundary dimensions, projected to bidegrees.
        let tables = self.cube.zbh_tables(stem_max)?;
        let mut b_bid: BTreeMap<Bidegree, usize> = BTreeMap::new();
        for (t, n) in tables.b.iter() {
            *b_bid.entry(t.bidegree()).or_insert(0) += n;
        }

        let mut failures = Vec::new();
        let mut checked = 0usize;
        for stem in 0..=stem_max {
            for w in w_min..=w_max {
                let b = Bidegree::new(stem, w);
                checked += 1;
                let n_total = total.get(&b).copied().unwrap_or(0);
                let n_free = free.get(&b).copied().unwrap_or(0);
                let n_tor = torsion.get(&b).map(Vec::len).unwrap_or(0);
                if n_total != n_free + n_tor {
                    failures.push(PullbackLine {
                        check: "partition".into(),
                        stem,
                        w,
                        expected: n_free + n_tor,
                        got: n_total,
                    });
                }
                let expected_tor: usize = (0..=(p - 2).max(0))
                    .map(|c| b_bid.get(&Bidegree::new(stem, w + c)).copied().unwrap_or(0))
                    .sum();
                if n_tor != expected_tor {
                    failures.push(PullbackLine {
                        check: "torsion-boundary".into(),
                        stem,
                        w,
                        expected: expected_tor,
                        got: n_tor,
                    });
                }
                if let Some(monos) = torsion.get(&b) {
                    let got = self.torsion_image_rank(monos)?;
                    if got != monos.len() {
                        failures.push(PullbackLine {
                            check: "reduced-injectivity".into(),
                            stem,
                            w,
                            expected: monos.len(),
                            got,
                        });
                    }
                }
            }
        }

        // (c) per stem: exactly one μ-digit monomial per even stem, matching
        // the étale Hilbert function once τ is inverted.
        let etale = EtaleRing::new(fp);
        let digit_monos = self.mu_digit_monomials(stem_max)?;
        let mut per_stem: BTreeMap<i64, usize> = BTreeMap::new();
        for (_, stem, _) in &digit_monos {
            *per_stem.entry(*stem).or_insert(0) += 1;
        }
        for stem in 0..=stem_max {
            checked += 1;
            let got = per_stem.get(&stem).copied().unwrap_or(0);
            let expected = etale.dim(Bidegree::new(stem, 0));
            if got != expected {
                failures.push(PullbackLine {
                    check: "etale-localization".into(),
                    stem,
                    w: 0,
                    expected,
                    got,
                });
            }
        }
        Ok(PullbackReport { checked, failures })
    }

    /// Rank of the images of torsion basis monomials in the reduced ring.
    /// `τ^c·μ^E·x_{S,f}` maps to `τ^c·μ^E·Dχ_{S,f}`, expanded in the cube
    /// monomial basis; coordinates are indexed by (τ-power, monomial).
    fn torsion_image_rank(&self, monos: &[&RingMonomial]) -> Result<usize> {
        let fp = self.fp;
        let mut index: BTreeMap<(u32, Monomial), usize> = BTreeMap::new();
        let mut rows: Vec<SparseVec> = Vec::new();
        for m in monos {
            let idx = m.x.as_ref().expect("torsion monomial");
            let dchi = self.cube.dchi(idx)?;
            let mut mu_mono = Monomial::one();
            for (&i, &e) in &m.mu {
                let g = self.cube.mu(i).ok_or_else(|| {
                    Error::BadGenerator(format!("mu_{i} outside the cube range"))
                })?;
                mu_mono = mu_mono.with_exponent(g, e);
            }
            let image = dchi.mul(fp, &self.cube.spec, &Element::term(mu_mono, 1));
            let mut row: SparseVec = Vec::new();
            for (mono, c) in image.terms() {
                let next = index.len();
                let i = *index.entry((m.tau, mono.clone())).or_insert(next);
                row.push((i, c));
            }
            row.sort_unstable_by_key(|&(i, _)| i);
            rows.push(row);
        }
        let cols = index.len().max(1);
        Ok(rank(&SparseMatrix::from_rows(cols, rows), fp))
    }

    /// The τ-torsion witness x_{∅,δ_0} with its certificate.
    pub fn torsion_witness(&self) -> Result<TorsionWitness> {
        let p = self.fp.p();
        let idx = ChiIndex::new(Default::default(), [(0usize, 1u32)].into())?;
        let x = self.x_class(&idx)?;
        let bidegree = self.x_degree(&idx)?;
        let nonzero = !x.is_zero();
        let tau_times = |a: u32| -> Result<RingElement> {
            let raw: Vec<RawTerm> = x
                .terms()
                .map(|(m, c)| RawTerm {
                    coeff: c,
                    tau: m.tau + a,
                    mu: m.mu.clone(),
                    xs: m.x.iter().cloned().collect(),
                })
                .collect();
            self.normal_form(&raw)
        };
        let annihilated = tau_times(p - 1)?.is_zero();
        let lower_power_survives = p == 2 || !tau_times(p - 2)?.is_zero();
        // A preimage under τ would be a torsion basis monomial one weight up.
        let above = self
            .basis(bidegree.stem, bidegree.w + 1, bidegree.w + 1)?
            .into_iter()
            .filter(|m| {
                m.x.is_some()
                    && self
                        .monomial_bidegree(m)
                        .map(|b| b == Bidegree::new(bidegree.stem, bidegree.w + 1))
                        .unwrap_or(false)
            })
            .count();
        let tau_divisible = above != 0;
        let ok = nonzero && annihilated && lower_power_survives && !tau_divisible;
        Ok(TorsionWitness {
            label: "x{;1*d0}".to_string(),
            bidegree,
            nonzero,
            annihilated,
            lower_power_survives,
            tau_divisible,
            ok,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn f(p: u64) -> Fp {
        Fp::new(p).unwrap()
    }

    fn delta(entries: &[(usize, u32)]) -> ChiIndex {
        ChiIndex::new(BTreeSet::new(), entries.iter().copied().collect()).unwrap()
    }

    #[test]
    fn etale_dimensions_and_labels() {
        let ring = EtaleRing::new(f(2));
        assert_eq!(ring.dim(Bidegree::new(4, 7)), 1);
        assert_eq!(ring.dim(Bidegree::new(3, 0)), 0);
        assert_eq!(ring.dim(Bidegree::new(-2, 0)), 0);
        assert_eq!(ring.label(Bidegree::new(0, 0)).unwrap(), "1");
        assert_eq!(ring.label(Bidegree::new(0, -1)).unwrap(), "tau");
        assert_eq!(ring.label(Bidegree::new(2, 0)).unwrap(), "mu_0");
        // stem 4 = μ_1, whose μ-weight is 1.
        assert_eq!(ring.label(Bidegree::new(4, 1)).unwrap(), "mu_1");
        assert_eq!(ring.label(Bidegree::new(4, 0)).unwrap(), "tau*mu_1");
        assert_eq!(ring.label(Bidegree::new(4, 3)).unwrap(), "tau^-2*mu_1");
        assert_eq!(ring.label(Bidegree::new(6, 1)).unwrap(), "mu_0*mu_1");
    }

    #[test]
    fn etale_betti_comparison_is_clean() {
        for p in [2u64, 3] {
            let ring = EtaleRing::new(f(p));
            for (stem, orbits, classical) in ring.betti_comparison(40) {
                assert_eq!(orbits, classical, "stem {stem} at p = {p}");
            }
        }
    }

    #[test]
    fn reduced_table_at_p2_through_stem_four() {
        let ring = ReducedRing::for_stem(f(2), 4).unwrap();
        let table = ring.dimension_table(4).unwrap();
        let expect = [
            (Tridegree::new(0, 0, 0), 1),
            (Tridegree::new(1, 1, 0), 1),
            (Tridegree::new(1, 2, 1), 1),
            (Tridegree::new(1, 3, 1), 1),
            (Tridegree::new(2, 2, 0), 1),
        ];
        assert_eq!(table.len(), expect.len());
        for (t, d) in expect {
            assert_eq!(table.get(t), d, "at {t:?}");
        }
        assert_eq!(table.labels(Tridegree::new(1, 2, 1)), ["lambda_1"]);
        assert_eq!(table.labels(Tridegree::new(2, 2, 0)), ["gamma_2(mu_0)"]);
    }

    #[test]
    fn reduced_table_at_odd_primes_carries_a_tau_window() {
        let ring = ReducedRing::for_stem(f(3), 2).unwrap();
        let table = ring.dimension_table(2).unwrap();
        // Unit and τ·unit; μ_0 and τ·μ_0.
        assert_eq!(table.get(Tridegree::new(0, 0, 0)), 1);
        assert_eq!(table.get(Tridegree::new(0, 0, -1)), 1);
        assert_eq!(table.labels(Tridegree::new(0, 0, -1)), ["tau"]);
        assert_eq!(table.get(Tridegree::new(1, 1, 0)), 1);
        assert_eq!(table.get(Tridegree::new(1, 1, -1)), 1);
        assert_eq!(table.labels(Tridegree::new(1, 1, -1)), ["tau*mu_0"]);
    }

    #[test]
    fn x_degrees_match_the_closed_formula() {
        let ring = IntegralRing::for_stem(f(2), 10).unwrap();
        assert_eq!(
            ring.x_degree(&delta(&[(0, 1)])).unwrap(),
            Bidegree::new(3, 1)
        );
        assert_eq!(
            ring.x_degree(&delta(&[(1, 1)])).unwrap(),
            Bidegree::new(7, 3)
        );
        // ({0}, δ_0) has its least support element inside S: not in K.
        let bad = ChiIndex::new([0usize].into(), [(0usize, 1u32)].into()).unwrap();
        assert!(ring.x_degree(&bad).is_err());
    }

    #[test]
    fn normal_form_carries_mu_powers_into_tau() {
        let ring = IntegralRing::new(f(2), 4).unwrap();
        let nf = ring.normal_form(&[RawTerm::one().with_mu(0, 2)]).unwrap();
        assert_eq!(nf.num_terms(), 1);
        let (m, c) = nf.terms().next().unwrap();
        assert_eq!(c, 1);
        assert_eq!(m.label(), "tau*mu_1");
        // Cascading: μ_0⁴ → τ²·μ_1² → τ³·μ_2 (weights match: both sides sit
        // at weight 0).
        let nf = ring.normal_form(&[RawTerm::one().with_mu(0, 4)]).unwrap();
        let (m, _) = nf.terms().next().unwrap();
        assert_eq!(m.label(), "tau^3*mu_2");
        // Odd prime: μ_0³ → τ²·μ_1 at p = 3.
        let ring3 = IntegralRing::new(f(3), 4).unwrap();
        let nf = ring3.normal_form(&[RawTerm::one().with_mu(0, 3)]).unwrap();
        let (m, _) = nf.terms().next().unwrap();
        assert_eq!(m.label(), "tau^2*mu_1");
    }

    #[test]
    fn tau_annihilates_torsion_classes() {
        let ring = IntegralRing::new(f(2), 3).unwrap();
        let raw = RawTerm::tau_power(1).with_x(delta(&[(0, 1)]));
        assert!(ring.normal_form(&[raw]).unwrap().is_zero());
        let ring3 = IntegralRing::new(f(3), 3).unwrap();
        let kept = RawTerm::tau_power(1).with_x(delta(&[(0, 1)]));
        assert!(!ring3.normal_form(&[kept]).unwrap().is_zero());
        let killed = RawTerm::tau_power(2).with_x(delta(&[(0, 1)]));
        assert!(ring3.normal_form(&[killed]).unwrap().is_zero());
    }

    #[test]
    fn intro_relations_hold_at_p2() {
        // x_{δ0+δ1}x_{δ2} + x_{δ1+δ2}x_{δ0} + x_{δ2+δ0}x_{δ1} = 0 and
        // x_{δ0+δ1}x_{δ1+δ2} = x_{2δ1}x_{δ0+δ2}.
        let ring = IntegralRing::new(f(2), 4).unwrap();
        let x = |entries: &[(usize, u32)]| delta(entries);
        let prod = |a: &ChiIndex, b: &ChiIndex| -> RawTerm {
            RawTerm::one().with_x(a.clone()).with_x(b.clone())
        };
        let sum = ring
            .normal_form(&[
                prod(&x(&[(0, 1), (1, 1)]), &x(&[(2, 1)])),
                prod(&x(&[(1, 1), (2, 1)]), &x(&[(0, 1)])),
                prod(&x(&[(2, 1), (0, 1)]), &x(&[(1, 1)])),
            ])
            .unwrap();
        assert!(sum.is_zero(), "three-fold relation fails: {}", sum.label());
        let lhs = ring
            .normal_form(&[prod(&x(&[(0, 1), (1, 1)]), &x(&[(1, 1), (2, 1)]))])
            .unwrap();
        let rhs = ring
            .normal_form(&[prod(&x(&[(1, 2)]), &x(&[(0, 1), (2, 1)]))])
            .unwrap();
        assert_eq!(lhs, rhs, "{} vs {}", lhs.label(), rhs.label());
        assert!(!lhs.is_zero());
    }

    #[test]
    fn seeded_reduction_agrees_with_the_deterministic_one() {
        let ring = IntegralRing::new(f(3), 4).unwrap();
        let expr = vec![
            RawTerm::one()
                .with_mu(0, 5)
                .with_x(delta(&[(0, 1)]))
                .with_x(delta(&[(1, 1)])),
            RawTerm::tau_power(1).with_mu(1, 3),
        ];
        let base = ring.normal_form(&expr).unwrap();
        for seed in 0..20 {
            assert_eq!(ring.normal_form_seeded(&expr, seed).unwrap(), base);
        }
    }

    #[test]
    fn hilbert_table_spots_at_p2() {
        let ring = IntegralRing::for_stem(f(2), 8).unwrap();
        let table = ring.hilbert(8, -2, 4).unwrap();
        // Even stems: one μ-digit class continued by τ-powers.
        assert_eq!(table.get(Bidegree::new(0, 0)), 1);
        assert_eq!(table.get(Bidegree::new(0, -2)), 1);
        assert_eq!(table.get(Bidegree::new(2, 0)), 1);
        assert_eq!(table.get(Bidegree::new(4, 1)), 1);
        assert_eq!(table.get(Bidegree::new(4, 2)), 0);
        // Torsion: x_{∅,δ_0} at (3,1), gone one weight down (τx = 0),
        // and μ_0·x at (5,1).
        assert_eq!(table.get(Bidegree::new(3, 1)), 1);
        assert_eq!(table.labels(Bidegree::new(3, 1)), ["x{;1*d0}"]);
        assert_eq!(table.get(Bidegree::new(3, 0)), 0);
        assert_eq!(table.get(Bidegree::new(5, 1)), 1);
        assert_eq!(table.labels(Bidegree::new(5, 1)), ["mu_0*x{;1*d0}"]);
        assert_eq!(table.get(Bidegree::new(7, 3)), 1);
    }

    #[test]
    fn hilbert_stabilizes_below_the_torsion_window() {
        // Along each stem, dims at low weights equal the τ-free count alone.
        let ring = IntegralRing::for_stem(f(3), 12).unwrap();
        let table = ring.hilbert(12, -30, 12).unwrap();
        for stem in 0..=12i64 {
            let low = table.get(Bidegree::new(stem, -30));
            let expected = usize::from(stem % 2 == 0);
            assert_eq!(low, expected, "stem {stem}");
        }
    }

    #[test]
    fn pullback_check_is_clean_for_small_windows() {
        for (p, stem_max) in [(2u64, 12i64), (3, 14)] {
            let ring = IntegralRing::for_stem(f(p), stem_max).unwrap();
            let report = ring.pullback_check(stem_max, -6, 10).unwrap();
            assert!(
                report.ok(),
                "p = {p}: failing cells {:?}",
                report.failures
            );
            assert!(report.checked > 0);
        }
    }

    #[test]
    fn torsion_witness_certificates() {
        let w2 = IntegralRing::for_stem(f(2), 10).unwrap().torsion_witness().unwrap();
        assert!(w2.ok);
        assert_eq!(w2.bidegree, Bidegree::new(3, 1));
        assert_eq!(w2.label, "x{;1*d0}");
        let w3 = IntegralRing::for_stem(f(3), 10).unwrap().torsion_witness().unwrap();
        assert!(w3.ok);
        assert!(w3.lower_power_survives);
    }

    #[test]
    fn products_mix_mu_and_torsion_factors() {
        let ring = IntegralRing::new(f(2), 4).unwrap();
        let x = ring.x_class(&delta(&[(0, 1)])).unwrap();
        let mu0 = ring.normal_form(&[RawTerm::one().with_mu(0, 1)]).unwrap();
        let prod = ring.mul(&mu0, &x).unwrap();
        assert_eq!(prod.num_terms(), 1);
        let (m, _) = prod.terms().next().unwrap();
        assert_eq!(m.label(), "mu_0*x{;1*d0}");
        assert_eq!(
            ring.monomial_bidegree(m).unwrap(),
            Bidegree::new(5, 1)
        );
    }
}
