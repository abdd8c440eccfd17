//! Reduced bar complex over the dual Steenrod algebra or a small synthetic
//! coefficient algebra: words of non-unit τ-free letters, the alternating
//! face differential, shuffle products, and cell-by-cell homology giving
//! trigraded Tor tables.
//!
//! A basis class is τ^t·[a_1|…|a_k] where the letters a_j are τ-free
//! monomials of positive topological degree. Within the homology cell of
//! topological degree d and weight w the τ-exponent of every word is
//! determined: t = Σ w(a_j) − w. Which t are allowed depends on the
//! coefficient variant (t ≥ 0 integrally, 0 ≤ t ≤ p−2 mod τ^{p−1}, any t
//! étale, t = 0 for synthetic coefficients).

use crate::algebra::{AlgebraSpec, Monomial};
use crate::fp::Fp;
use crate::grading::Tridegree;
use crate::linalg::{kernel_basis, subquotient, SparseMatrix, SparseVec, Subquotient};
use crate::steenrod::{SteenrodAlgebra, Variant};
use crate::table::DimensionTable;
use crate::{Error, Result};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// A bar word: the sequence of letters of [a_1|…|a_k].
pub type Word = Vec<Monomial>;

/// Coefficients for the bar construction: the dual Steenrod algebra in one
/// of its variants, or a user-supplied connective algebra whose generators
/// all have positive topological degree and no filtration part.
#[derive(Clone, Debug)]
pub enum BarAlgebra {
    Steenrod(SteenrodAlgebra),
    Synthetic { fp: Fp, spec: AlgebraSpec },
}

impl BarAlgebra {
    pub fn steenrod(a: SteenrodAlgebra) -> BarAlgebra {
        BarAlgebra::Steenrod(a)
    }

    pub fn synthetic(fp: Fp, spec: AlgebraSpec) -> Result<BarAlgebra> {
        spec.validate(fp)?;
        for g in 0..spec.generators.len() {
            let deg = spec.degree(g);
            if deg.f != 0 || deg.d < 1 {
                return Err(Error::BadGenerator(format!(
                    "synthetic bar letters need filtration 0 and positive degree, got ({}, {}, {})",
                    deg.f, deg.d, deg.w
                )));
            }
        }
        Ok(BarAlgebra::Synthetic { fp, spec })
    }

    pub fn fp(&self) -> Fp {
        match self {
            BarAlgebra::Steenrod(a) => a.fp,
            BarAlgebra::Synthetic { fp, .. } => *fp,
        }
    }

    pub fn spec(&self) -> &AlgebraSpec {
        match self {
            BarAlgebra::Steenrod(a) => &a.spec,
            BarAlgebra::Synthetic { spec, .. } => spec,
        }
    }

    /// Non-unit τ-free monomials of topological degree ≤ degree_max.
    pub fn letters(&self, degree_max: i64) -> Result<Vec<Monomial>> {
        match self {
            BarAlgebra::Steenrod(a) => a.letters(degree_max),
            BarAlgebra::Synthetic { fp, spec } => {
                let mut out: Vec<Monomial> =
                    crate::algebra::basis_enumerate(spec, crate::algebra::EnumBounds::stems(degree_max), None)?
                        .into_iter()
                        .filter(|m| !m.is_one())
                        .collect();
                let _ = fp;
                out.sort();
                Ok(out)
            }
        }
    }

    /// Product of two letters, split as (τ-power, τ-free part, coefficient);
    /// None when the product vanishes.
    pub fn mul_letters(&self, a: &Monomial, b: &Monomial) -> Result<Option<(u32, Monomial, u32)>> {
        match self {
            BarAlgebra::Steenrod(alg) => alg.mul_letters(a, b),
            BarAlgebra::Synthetic { fp, spec } => {
                Ok(spec.mul_monomials(*fp, a, b).map(|(m, c)| (0, m, c)))
            }
        }
    }

    /// Whether a class τ^t·[word] exists in this variant.
    pub fn tau_admissible(&self, t: i64) -> bool {
        match self {
            BarAlgebra::Steenrod(a) => match a.variant {
                Variant::Integral => t >= 0,
                Variant::ModTau => match a.tau {
                    Some(_) => 0 <= t && t <= a.fp.p() as i64 - 2,
                    None => t == 0,
                },
                Variant::Etale => true,
            },
            BarAlgebra::Synthetic { .. } => t == 0,
        }
    }

    /// The τ-exponent range admitted by the variant, when it is finite.
    fn tau_range(&self) -> Option<(i64, i64)> {
        match self {
            BarAlgebra::Steenrod(a) => match a.variant {
                Variant::Integral | Variant::Etale => None,
                Variant::ModTau => match a.tau {
                    Some(_) => Some((0, a.fp.p() as i64 - 2)),
                    None => Some((0, 0)),
                },
            },
            BarAlgebra::Synthetic { .. } => Some((0, 0)),
        }
    }
}

/// A finite F_p-linear combination of classes τ^t·[a_1|…|a_k].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BarElement {
    terms: BTreeMap<(i64, Word), u32>,
}

impl BarElement {
    pub fn zero() -> BarElement {
        BarElement::default()
    }

    pub fn class(t: i64, word: Word) -> BarElement {
        let mut terms = BTreeMap::new();
        terms.insert((t, word), 1);
        BarElement { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Word, u32)> {
        self.terms.iter().map(|((t, w), c)| (*t, w, *c))
    }

    pub fn coefficient(&self, t: i64, word: &Word) -> u32 {
        self.terms.get(&(t, word.clone())).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, fp: Fp, t: i64, word: Word, c: u32) {
        let c = c % fp.p();
        if c == 0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((t, word)) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = fp.add(*e.get(), c);
                if s == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, fp: Fp, other: &BarElement) -> BarElement {
        let mut out = self.clone();
        for (t, w, c) in other.terms() {
            out.add_term(fp, t, w.clone(), c);
        }
        out
    }

    pub fn scale(&self, fp: Fp, c: u32) -> BarElement {
        let mut out = BarElement::zero();
        for (t, w, k) in self.terms() {
            out.add_term(fp, t, w.clone(), fp.mul(k, c));
        }
        out
    }

    pub fn sub(&self, fp: Fp, other: &BarElement) -> BarElement {
        self.add(fp, &other.scale(fp, fp.neg(1)))
    }
}

/// Format a single class τ^t·[a|b|…] using the coefficient algebra's labels.
pub fn class_label(spec: &AlgebraSpec, t: i64, word: &Word) -> String {
    let prefix = match t {
        0 => String::new(),
        1 => "tau*".to_string(),
        _ => format!("tau^{}*", t),
    };
    let letters: Vec<String> = word.iter().map(|m| spec.monomial_label(m)).collect();
    format!("{}[{}]", prefix, letters.join("|"))
}

/// Format an element as a signed sum of labeled classes.
pub fn element_label(fp: Fp, spec: &AlgebraSpec, e: &BarElement) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (t, w, c) in e.terms() {
        let body = class_label(spec, t, w);
        if c == 1 {
            parts.push(body);
        } else {
            parts.push(format!("{}*{}", c, body));
        }
    }
    let _ = fp;
    parts.join(" + ")
}

/// The reduced bar complex of a coefficient algebra.
#[derive(Clone, Debug)]
pub struct BarComplex {
    pub alg: BarAlgebra,
}

/// All homology data of one (degree, weight) cell: the admitted words grouped
/// by length and the face-differential matrices between adjacent lengths.
#[derive(Clone, Debug)]
pub struct BarCell {
    pub d: i64,
    pub w: i64,
    /// words[k] = sorted words of length k in this cell.
    pub words: Vec<Vec<Word>>,
    /// mats[k] maps length-k words to length-(k−1) words, for k ≥ 1;
    /// mats[0] is a placeholder with zero rows.
    pub mats: Vec<SparseMatrix>,
}

impl BarCell {
    pub fn dim(&self, k: usize) -> usize {
        self.words.get(k).map(Vec::len).unwrap_or(0)
    }

    pub fn max_length(&self) -> usize {
        self.words.len().saturating_sub(1)
    }

    /// The τ-exponent carried by a given word of this cell.
    pub fn tau_exponent(&self, spec: &AlgebraSpec, word: &Word) -> i64 {
        let wsum: i64 = word.iter().map(|m| spec.monomial_degree(m).w).sum();
        wsum - self.w
    }

    /// Homology at each word length, as subquotients with representative
    /// cycles in the word basis.
    pub fn homology(&self, fp: Fp) -> Result<Vec<Subquotient>> {
        let mut out = Vec::new();
        for k in 0..self.words.len() {
            let cycles: Vec<SparseVec> = if k == 0 {
                (0..self.dim(0)).map(|i| vec![(i, 1)]).collect()
            } else {
                kernel_basis(&self.mats[k], fp)
            };
            let boundaries: Vec<SparseVec> = if k + 1 < self.mats.len() {
                self.mats[k + 1]
                    .transpose()
                    .row_vecs()
                    .iter()
                    .filter(|v| !v.is_empty())
                    .cloned()
                    .collect()
            } else {
                Vec::new()
            };
            out.push(subquotient(self.dim(k), &cycles, &boundaries, fp)?);
        }
        Ok(out)
    }
}

impl BarComplex {
    pub fn new(alg: BarAlgebra) -> BarComplex {
        BarComplex { alg }
    }

    pub fn fp(&self) -> Fp {
        self.alg.fp()
    }

    /// Topological degree and weight of the underlying word (the τ-free part).
    pub fn word_degree(&self, word: &Word) -> (i64, i64) {
        let spec = self.alg.spec();
        let mut d = 0;
        let mut w = 0;
        for m in word {
            let deg = spec.monomial_degree(m);
            d += deg.d;
            w += deg.w;
        }
        (d, w)
    }

    /// Tridegree of the class τ^t·[word]: filtration = word length.
    pub fn class_tridegree(&self, t: i64, word: &Word) -> Tridegree {
        let (d, w) = self.word_degree(word);
        Tridegree::new(word.len() as i64, d, w - t)
    }

    /// Face differential: the alternating sum of adjacent-letter merges. The
    /// face merging positions i, i+1 (1-indexed) carries the suspension sign
    /// (−1)^{i + d(a_1) + … + d(a_i)}.
    pub fn d1(&self, e: &BarElement) -> Result<BarElement> {
        let fp = self.fp();
        let spec = self.alg.spec();
        let mut out = BarElement::zero();
        for (t, word, c) in e.terms() {
            let degs: Vec<i64> = word.iter().map(|m| spec.monomial_degree(m).d).collect();
            let mut sign_exp: i64 = 0;
            for i in 0..word.len().saturating_sub(1) {
                sign_exp += 1 + degs[i];
                let Some((tp, m, mc)) = self.alg.mul_letters(&word[i], &word[i + 1])? else {
                    continue;
                };
                let t2 = t + tp as i64;
                if !self.alg.tau_admissible(t2) {
                    continue;
                }
                let mut target = Vec::with_capacity(word.len() - 1);
                target.extend_from_slice(&word[..i]);
                target.push(m);
                target.extend_from_slice(&word[i + 2..]);
                let coeff = fp.mul(c, fp.mul(mc, fp.sign(sign_exp)));
                out.add_term(fp, t2, target, coeff);
            }
        }
        Ok(out)
    }

    /// Shuffle product of two elements. Interleavings carry the Koszul sign
    /// on suspended letter degrees; τ-exponents add.
    pub fn shuffle(&self, a: &BarElement, b: &BarElement) -> BarElement {
        let fp = self.fp();
        let spec = self.alg.spec();
        let mut out = BarElement::zero();
        for (ta, wa, ca) in a.terms() {
            for (tb, wb, cb) in b.terms() {
                let c = fp.mul(ca, cb);
                for (word, parity) in shuffle_words(spec, wa, wb) {
                    let coeff = if parity % 2 == 0 { c } else { fp.mul(c, fp.neg(1)) };
                    out.add_term(fp, ta + tb, word, coeff);
                }
            }
        }
        out
    }

    /// Stem of a homogeneous class (word length + topological degree), used
    /// as the parity governing Koszul signs.
    pub fn class_stem(&self, word: &Word) -> i64 {
        let (d, _) = self.word_degree(word);
        word.len() as i64 + d
    }

    /// All words over letters of degree ≤ degree_max with exactly the given
    /// length, in sorted order.
    pub fn words_of_filtration(&self, k: usize, degree_max: i64) -> Result<Vec<Word>> {
        let letters = self.alg.letters(degree_max)?;
        let mut out = Vec::new();
        let mut cur = Vec::new();
        gen_words_by_len(&letters, degree_max, k, &mut cur, &mut out, |word| {
            self.word_degree(word).0 <= degree_max
        });
        out.sort();
        Ok(out)
    }

    /// The homology cell at (degree, weight).
    pub fn cell(&self, d: i64, w: i64) -> Result<BarCell> {
        let words = self.words_of_degree(d)?;
        self.cell_from_words(d, w, &words)
    }

    /// All words with letter degrees summing to exactly d.
    fn words_of_degree(&self, d: i64) -> Result<Vec<Word>> {
        if d < 0 {
            return Ok(Vec::new());
        }
        let spec = self.alg.spec();
        let mut letters: Vec<(Monomial, i64)> = self
            .alg
            .letters(d)?
            .into_iter()
            .map(|m| {
                let deg = spec.monomial_degree(&m).d;
                (m, deg)
            })
            .collect();
        letters.sort();
        let mut out = Vec::new();
        let mut cur = Vec::new();
        gen_words_exact(&letters, d, &mut cur, &mut out);
        Ok(out)
    }

    fn cell_from_words(&self, d: i64, w: i64, all_words: &[Word]) -> Result<BarCell> {
        let fp = self.fp();
        let spec = self.alg.spec();
        let kmax = if d <= 0 { 0 } else { d as usize };
        let mut words: Vec<Vec<Word>> = vec![Vec::new(); kmax + 1];
        for word in all_words {
            let (_, wsum) = self.word_degree(word);
            if self.alg.tau_admissible(wsum - w) {
                words[word.len()].push(word.clone());
            }
        }
        if d == 0 && self.alg.tau_admissible(-w) {
            words[0].push(Vec::new());
        }
        for v in &mut words {
            v.sort();
        }
        let index: Vec<BTreeMap<&Word, usize>> = words
            .iter()
            .map(|v| v.iter().enumerate().map(|(i, w)| (w, i)).collect())
            .collect();
        let mut mats = Vec::with_capacity(kmax + 1);
        mats.push(SparseMatrix::zero(0, words[0].len()));
        for k in 1..=kmax {
            let mut triplets = Vec::new();
            for (j, word) in words[k].iter().enumerate() {
                let (_, wsum) = self.word_degree(word);
                let t = wsum - w;
                let degs: Vec<i64> = word.iter().map(|m| spec.monomial_degree(m).d).collect();
                let mut sign_exp: i64 = 0;
                for i in 0..k - 1 {
                    sign_exp += 1 + degs[i];
                    let Some((tp, m, mc)) = self.alg.mul_letters(&word[i], &word[i + 1])? else {
                        continue;
                    };
                    if !self.alg.tau_admissible(t + tp as i64) {
                        continue;
                    }
                    let mut target = Vec::with_capacity(k - 1);
                    target.extend_from_slice(&word[..i]);
                    target.push(m);
                    target.extend_from_slice(&word[i + 2..]);
                    let row = *index[k - 1].get(&target).ok_or_else(|| {
                        Error::ShapeMismatch("face target missing from homology cell".into())
                    })?;
                    let coeff = fp.mul(mc, fp.sign(sign_exp));
                    if coeff != 0 {
                        triplets.push((row, j, coeff));
                    }
                }
            }
            mats.push(merge_triplets(words[k - 1].len(), words[k].len(), triplets, fp)?);
        }
        Ok(BarCell { d, w, words, mats })
    }

    /// Trigraded Tor table up to the given stem, with basis labels from
    /// representative cycles. A weight window is mandatory for the variants
    /// whose τ-line is infinite in each cell column (integral and étale).
    pub fn tor_table(
        &self,
        stem_max: i64,
        w_window: Option<(i64, i64)>,
    ) -> Result<DimensionTable> {
        let window = match (w_window, self.alg.tau_range()) {
            (Some(win), _) => {
                if win.0 > win.1 {
                    return Err(Error::Precondition(format!(
                        "empty weight window [{}, {}]",
                        win.0, win.1
                    )));
                }
                Some(win)
            }
            (None, Some(_)) => None,
            (None, None) => {
                return Err(Error::InfiniteRegion(
                    "this variant has infinitely many weights per degree; pass a weight window"
                        .into(),
                ))
            }
        };
        let fp = self.fp();
        let spec = self.alg.spec();
        let mut cells: Vec<BarCell> = Vec::new();
        for d in 1..stem_max.max(0) {
            let all_words = self.words_of_degree(d)?;
            let wset: Vec<i64> = match window {
                Some((lo, hi)) => (lo..=hi).collect(),
                None => {
                    let (tlo, thi) = self.alg.tau_range().unwrap();
                    let mut ws: Vec<i64> = all_words
                        .iter()
                        .flat_map(|word| {
                            let (_, wsum) = self.word_degree(word);
                            (tlo..=thi).map(move |t| wsum - t)
                        })
                        .collect();
                    ws.sort();
                    ws.dedup();
                    ws
                }
            };
            for w in wset {
                let cell = self.cell_from_words(d, w, &all_words)?;
                if cell.words.iter().any(|v| !v.is_empty()) {
                    cells.push(cell);
                }
            }
        }
        let homologies: Vec<(usize, Vec<Subquotient>)> = cells
            .par_iter()
            .enumerate()
            .map(|(i, cell)| cell.homology(fp).map(|h| (i, h)))
            .collect::<Result<Vec<_>>>()?;
        let mut table = DimensionTable::new();
        // The unit cell: τ^t·[] at tridegree (0, 0, −t).
        let unit_ts: Vec<i64> = match window {
            Some((lo, hi)) => (-hi..=-lo).filter(|&t| self.alg.tau_admissible(t)).collect(),
            None => {
                let (tlo, thi) = self.alg.tau_range().unwrap();
                (tlo..=thi).collect()
            }
        };
        for t in unit_ts {
            let key = Tridegree::new(0, 0, -t);
            table.set(key, 1);
            table.set_labels(key, vec![class_label(spec, t, &Vec::new())]);
        }
        for (i, homology) in homologies {
            let cell = &cells[i];
            for (k, sq) in homology.iter().enumerate() {
                if sq.dim() == 0 || (k as i64) + cell.d > stem_max {
                    continue;
                }
                let key = Tridegree::new(k as i64, cell.d, cell.w);
                table.set(key, sq.dim());
                let labels: Vec<String> = sq
                    .reps
                    .iter()
                    .map(|rep| {
                        let mut e = BarElement::zero();
                        for &(idx, c) in rep {
                            let word = cell.words[k][idx].clone();
                            let t = cell.tau_exponent(spec, &word);
                            e.add_term(fp, t, word, c);
                        }
                        element_label(fp, spec, &e)
                    })
                    .collect();
                table.set_labels(key, labels);
            }
        }
        Ok(table)
    }
}

/// All interleavings of u and v preserving each word's internal order, with
/// the Koszul sign parity accumulated on suspended degrees (d + 1).
pub fn shuffle_words(spec: &AlgebraSpec, u: &[Monomial], v: &[Monomial]) -> Vec<(Word, u8)> {
    fn susp(spec: &AlgebraSpec, m: &Monomial) -> i64 {
        spec.monomial_degree(m).d + 1
    }
    fn rec(spec: &AlgebraSpec, u: &[Monomial], v: &[Monomial]) -> Vec<(Word, u8)> {
        if u.is_empty() {
            return vec![(v.to_vec(), 0)];
        }
        if v.is_empty() {
            return vec![(u.to_vec(), 0)];
        }
        let mut out = Vec::new();
        for (mut word, parity) in rec(spec, &u[1..], v) {
            word.insert(0, u[0].clone());
            out.push((word, parity));
        }
        let u_susp: i64 = u.iter().map(|m| susp(spec, m)).sum();
        let cross = ((susp(spec, &v[0]) * u_susp) % 2) as u8;
        for (mut word, parity) in rec(spec, u, &v[1..]) {
            word.insert(0, v[0].clone());
            out.push((word, (parity + cross) % 2));
        }
        out
    }
    rec(spec, u, v)
}

/// Coproduct of the k-th divided power of a one-letter cycle: the terms
/// γ_i ⊗ γ_j over i + j = k, each with coefficient one.
pub fn coproduct_gamma(k: u32) -> Vec<(u32, u32)> {
    (0..=k).map(|i| (i, k - i)).collect()
}

fn gen_words_exact(letters: &[(Monomial, i64)], remaining: i64, cur: &mut Word, out: &mut Vec<Word>) {
    if remaining == 0 {
        out.push(cur.clone());
        return;
    }
    for (m, d) in letters {
        if *d <= remaining {
            cur.push(m.clone());
            gen_words_exact(letters, remaining - d, cur, out);
            cur.pop();
        }
    }
}

fn gen_words_by_len(
    letters: &[Monomial],
    degree_max: i64,
    k: usize,
    cur: &mut Word,
    out: &mut Vec<Word>,
    admit: impl Fn(&Word) -> bool + Copy,
) {
    if cur.len() == k {
        if admit(cur) {
            out.push(cur.clone());
        }
        return;
    }
    let _ = degree_max;
    for m in letters {
        cur.push(m.clone());
        if admit(cur) {
            gen_words_by_len(letters, degree_max, k, cur, out, admit);
        }
        cur.pop();
    }
}

/// Accumulate duplicate triplets modulo p before constructing the matrix.
fn merge_triplets(
    rows: usize,
    cols: usize,
    triplets: Vec<(usize, usize, u32)>,
    fp: Fp,
) -> Result<SparseMatrix> {
    let mut acc: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for (r, c, v) in triplets {
        let e = acc.entry((r, c)).or_insert(0);
        *e = fp.add(*e, v);
    }
    let merged: Vec<(usize, usize, u32)> = acc
        .into_iter()
        .filter(|&(_, v)| v != 0)
        .map(|((r, c), v)| (r, c, v))
        .collect();
    SparseMatrix::from_triplets(rows, cols, &merged, fp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{GeneratorKind, GeneratorSpec};

    fn f(p: u64) -> Fp {
        Fp::new(p).unwrap()
    }

    fn steenrod_bar(p: u64, variant: Variant, imax: usize) -> BarComplex {
        BarComplex::new(BarAlgebra::steenrod(
            SteenrodAlgebra::new(f(p), variant, imax).unwrap(),
        ))
    }

    fn exterior_x(p: u64, d: i64, w: i64) -> BarComplex {
        let spec = AlgebraSpec::new(vec![GeneratorSpec {
            name: "x".into(),
            kind: GeneratorKind::Exterior,
            degree: Tridegree::new(0, d, w),
        }]);
        BarComplex::new(BarAlgebra::synthetic(f(p), spec).unwrap())
    }

    fn polynomial_y(p: u64, d: i64, w: i64) -> BarComplex {
        let spec = AlgebraSpec::new(vec![GeneratorSpec {
            name: "y".into(),
            kind: GeneratorKind::Polynomial,
            degree: Tridegree::new(0, d, w),
        }]);
        BarComplex::new(BarAlgebra::synthetic(f(p), spec).unwrap())
    }

    #[test]
    fn face_of_tau_i_squared_word_is_tau_times_xi() {
        // d[τ_i|τ_i] = τ·[ξ_{i+1}] in the integral p = 2 bar complex.
        let bar = steenrod_bar(2, Variant::Integral, 3);
        let BarAlgebra::Steenrod(alg) = &bar.alg else { unreachable!() };
        for i in 0..3 {
            let ti = Monomial::generator(alg.tau_i(i).unwrap());
            let xi = Monomial::generator(alg.xi(i + 1).unwrap());
            let d1 = bar.d1(&BarElement::class(0, vec![ti.clone(), ti])).unwrap();
            assert_eq!(d1, BarElement::class(1, vec![xi]));
        }
    }

    #[test]
    fn single_letter_words_are_cycles() {
        let bar = steenrod_bar(2, Variant::Integral, 2);
        let BarAlgebra::Steenrod(alg) = &bar.alg else { unreachable!() };
        let xi = Monomial::generator(alg.xi(1).unwrap());
        assert!(bar.d1(&BarElement::class(0, vec![xi])).unwrap().is_zero());
    }

    #[test]
    fn face_differential_squares_to_zero() {
        for (p, variant) in [(2, Variant::Integral), (3, Variant::ModTau), (2, Variant::Etale)] {
            let bar = steenrod_bar(p, variant, 2);
            for k in 1..=4 {
                for word in bar.words_of_filtration(k, 6).unwrap() {
                    let e = BarElement::class(0, word);
                    let dd = bar.d1(&bar.d1(&e).unwrap()).unwrap();
                    assert!(dd.is_zero(), "d1² ≠ 0 at p={} on {:?}", p, e);
                }
            }
        }
    }

    #[test]
    fn shuffle_square_of_odd_letter_is_twice_the_two_letter_word() {
        let bar = exterior_x(3, 3, 1);
        let x = Monomial::generator(0);
        let a = BarElement::class(0, vec![x.clone()]);
        let sq = bar.shuffle(&a, &a);
        assert_eq!(sq, BarElement::class(0, vec![x.clone(), x]).scale(f(3), 2));
    }

    #[test]
    fn shuffle_square_of_even_letter_vanishes() {
        let bar = polynomial_y(3, 2, 1);
        let y = Monomial::generator(0);
        let a = BarElement::class(0, vec![y]);
        assert!(bar.shuffle(&a, &a).is_zero());
    }

    #[test]
    fn shuffles_realize_divided_power_coefficients() {
        // γ_2·γ_1 = C(3,1)·γ_3 on one-letter words of odd degree.
        let bar = exterior_x(5, 3, 1);
        let x = Monomial::generator(0);
        let gamma2 = BarElement::class(0, vec![x.clone(), x.clone()]);
        let gamma1 = BarElement::class(0, vec![x.clone()]);
        let prod = bar.shuffle(&gamma2, &gamma1);
        let gamma3 = BarElement::class(0, vec![x.clone(), x.clone(), x]);
        assert_eq!(prod, gamma3.scale(f(5), 3));
    }

    #[test]
    fn exterior_coefficients_give_divided_power_tor() {
        // Tor of Λ(x) is the divided power algebra on the suspension: one
        // class in each filtration j, at tridegree (j, 3j, j) here.
        let bar = exterior_x(3, 3, 1);
        let table = bar.tor_table(12, None).unwrap();
        let mut expected = DimensionTable::new();
        for j in 0..=3 {
            expected.set(Tridegree::new(j, 3 * j, j), 1);
        }
        assert_eq!(table.diff(&expected), vec![]);
    }

    #[test]
    fn polynomial_coefficients_give_exterior_tor() {
        // Tor of F_p[y] is exterior on the suspension: unit plus a single
        // class at filtration one.
        let bar = polynomial_y(3, 2, 1);
        let table = bar.tor_table(8, None).unwrap();
        let mut expected = DimensionTable::new();
        expected.set(Tridegree::new(0, 0, 0), 1);
        expected.set(Tridegree::new(1, 2, 1), 1);
        assert_eq!(table.diff(&expected), vec![]);
    }

    #[test]
    fn face_differential_is_a_derivation_for_the_shuffle_product() {
        let bar = steenrod_bar(3, Variant::ModTau, 1);
        let fp = f(3);
        let mut words = Vec::new();
        for k in 1..=2 {
            words.extend(bar.words_of_filtration(k, 5).unwrap());
        }
        for u in &words {
            for v in &words {
                let a = BarElement::class(0, u.clone());
                let b = BarElement::class(0, v.clone());
                let lhs = bar.d1(&bar.shuffle(&a, &b)).unwrap();
                let da_b = bar.shuffle(&bar.d1(&a).unwrap(), &b);
                let a_db = bar
                    .shuffle(&a, &bar.d1(&b).unwrap())
                    .scale(fp, fp.sign(bar.class_stem(u)));
                assert_eq!(lhs, da_b.add(fp, &a_db), "Leibniz fails on {:?}, {:?}", u, v);
            }
        }
    }

    #[test]
    fn filtration_two_words_of_degree_two() {
        let bar = steenrod_bar(2, Variant::ModTau, 2);
        let BarAlgebra::Steenrod(alg) = &bar.alg else { unreachable!() };
        let t0 = Monomial::generator(alg.tau_i(0).unwrap());
        assert_eq!(bar.words_of_filtration(2, 2).unwrap(), vec![vec![t0.clone(), t0]]);
    }

    #[test]
    fn mod_tau_tor_at_p2_through_stem_four() {
        let bar = steenrod_bar(2, Variant::ModTau, 2);
        let table = bar.tor_table(4, None).unwrap();
        let mut expected = DimensionTable::new();
        expected.set(Tridegree::new(0, 0, 0), 1);
        expected.set(Tridegree::new(1, 1, 0), 1);
        expected.set(Tridegree::new(1, 2, 1), 1);
        expected.set(Tridegree::new(2, 2, 0), 1);
        expected.set(Tridegree::new(1, 3, 1), 1);
        assert_eq!(table.diff(&expected), vec![]);
        assert_eq!(table.labels(Tridegree::new(2, 2, 0)), &["[tau_0|tau_0]"]);
    }

    #[test]
    fn integral_tor_keeps_tau_multiples_in_the_window() {
        let bar = steenrod_bar(2, Variant::Integral, 2);
        let table = bar.tor_table(3, Some((-2, 1))).unwrap();
        // Unit line τ^t·[] at (0, 0, −t) for 0 ≤ t ≤ 2.
        assert_eq!(table.get(Tridegree::new(0, 0, 0)), 1);
        assert_eq!(table.get(Tridegree::new(0, 0, -1)), 1);
        assert_eq!(table.get(Tridegree::new(0, 0, -2)), 1);
        assert_eq!(table.get(Tridegree::new(0, 0, 1)), 0);
        // [τ_0] and its τ-multiples.
        assert_eq!(table.get(Tridegree::new(1, 1, 0)), 1);
        assert_eq!(table.get(Tridegree::new(1, 1, -1)), 1);
        // [ξ_1] survives at weight 1, but τ·[ξ_1] is the boundary of
        // [τ_0|τ_0] (whose merge rewrites τ_0² = τξ_1), so the whole
        // degree-2 column at weight 0 dies.
        assert_eq!(table.get(Tridegree::new(1, 2, 1)), 1);
        assert_eq!(table.get(Tridegree::new(1, 2, 0)), 0);
        assert_eq!(table.get(Tridegree::new(2, 2, 0)), 0);
    }

    #[test]
    fn unbounded_variants_require_weight_windows() {
        let integral = steenrod_bar(2, Variant::Integral, 1);
        assert!(matches!(integral.tor_table(4, None), Err(Error::InfiniteRegion(_))));
        let etale = steenrod_bar(2, Variant::Etale, 1);
        assert!(matches!(etale.tor_table(4, None), Err(Error::InfiniteRegion(_))));
    }

    #[test]
    fn coproduct_of_divided_powers_lists_all_splittings() {
        assert_eq!(coproduct_gamma(3), vec![(0, 3), (1, 2), (2, 1), (3, 0)]);
    }
}
