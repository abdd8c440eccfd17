//! Bidegree charts for the three rings.
//!
//! Marks come from the same Hilbert tables the `hilbert` subcommand prints,
//! so the TSV export and the SVG dots enumerate identical class sets. Edges
//! are never guessed from occupancy alone except in the étale ring (where τ
//! is invertible and every product of basis classes is a unit multiple of a
//! basis class): the reduced ring multiplies actual cube monomials and the
//! integral ring runs its rewrite system, so a τ- or μ-line appears exactly
//! when the product is nonzero and its target is drawn.

use std::collections::BTreeSet;
use std::fmt::Write;

use mhh_core::algebra::{basis_enumerate, Element, EnumBounds, Monomial};
use mhh_core::fp::Fp;
use mhh_core::grading::Bidegree;
use mhh_core::rings::{EtaleRing, IntegralRing, RawTerm, ReducedRing};
use mhh_core::table::BidegreeTable;

use crate::config::RunConfig;
use crate::Failure;

pub struct Chart {
    pub table: BidegreeTable,
    /// τ-multiplications, drawn as vertical lines (weight drops by one).
    pub tau_edges: BTreeSet<(Bidegree, Bidegree)>,
    /// μ_i-multiplications `(i, from, to)`, horizontal for i = 0 and
    /// diagonal with slope (p^i − 1)/(2 p^i) above that.
    pub mu_edges: BTreeSet<(usize, Bidegree, Bidegree)>,
}

pub fn build(ring: &str, cfg: &RunConfig) -> Result<Chart, Failure> {
    let fp = Fp::new(cfg.prime)?;
    match ring {
        "etale" => {
            let (lo, hi) = cfg.window()?;
            Ok(etale_chart(fp, cfg.stem_max, lo, hi))
        }
        "reduced" => reduced_chart(fp, cfg),
        "integral" => {
            let (lo, hi) = cfg.window()?;
            integral_chart(fp, cfg.stem_max, lo, hi)
        }
        other => Err(Failure::Usage(format!(
            "unknown ring '{other}' (expected one of: etale, reduced, integral)"
        ))),
    }
}

fn etale_chart(fp: Fp, stem_max: i64, w_min: i64, w_max: i64) -> Chart {
    let ring = EtaleRing::new(fp);
    let table = ring.hilbert(stem_max, w_min, w_max);
    let occupied: BTreeSet<Bidegree> = table.keys().collect();
    let p = fp.p() as i64;
    let mut tau_edges = BTreeSet::new();
    let mut mu_edges = BTreeSet::new();
    for &b in &occupied {
        let down = Bidegree::new(b.stem, b.w - 1);
        if occupied.contains(&down) {
            tau_edges.insert((b, down));
        }
        let mut pi = 1i64;
        let mut i = 0usize;
        while 2 * pi <= stem_max {
            let target = Bidegree::new(b.stem + 2 * pi, b.w + pi - 1);
            if occupied.contains(&target) {
                mu_edges.insert((i, b, target));
            }
            pi *= p;
            i += 1;
        }
    }
    Chart { table, tau_edges, mu_edges }
}

fn reduced_chart(fp: Fp, cfg: &RunConfig) -> Result<Chart, Failure> {
    let stem_max = cfg.stem_max;
    let ring = ReducedRing::for_stem(fp, stem_max)?;
    let mut table = ring.hilbert(stem_max)?;
    let p = fp.p() as i64;
    let monos = basis_enumerate(&ring.cube.spec, EnumBounds::stems(stem_max), None)?;
    let mut tau_edges = BTreeSet::new();
    let mut mu_edges = BTreeSet::new();
    for m in &monos {
        let t = ring.cube.spec.monomial_degree(m);
        // Nonzero μ-products of the cube monomial, independent of the τ-power.
        let mut targets = Vec::new();
        for i in 0..ring.cube.mu_count() {
            let pi = p.pow(i as u32);
            if t.stem() + 2 * pi > stem_max {
                continue;
            }
            let Some(mu_id) = ring.cube.mu(i) else {
                continue;
            };
            let gen = Element::term(Monomial::power(mu_id, 1), 1);
            let prod = Element::term(m.clone(), 1).mul(fp, &ring.cube.spec, &gen);
            if !prod.is_zero() {
                targets.push((i, pi));
            }
        }
        for c in 0..=(p - 2).max(0) {
            let b = Bidegree::new(t.stem(), t.w - c);
            if c + 1 <= p - 2 {
                tau_edges.insert((b, Bidegree::new(b.stem, b.w - 1)));
            }
            for &(i, pi) in &targets {
                mu_edges.insert((i, b, Bidegree::new(b.stem + 2 * pi, b.w + pi - 1)));
            }
        }
    }
    if cfg.window_given() {
        let (lo, hi) = cfg.window()?;
        let keep = |b: &Bidegree| b.w >= lo && b.w <= hi;
        table = table.restrict(|b| keep(&b));
        tau_edges.retain(|(a, b)| keep(a) && keep(b));
        mu_edges.retain(|(_, a, b)| keep(a) && keep(b));
    }
    Ok(Chart { table, tau_edges, mu_edges })
}

fn integral_chart(
    fp: Fp,
    stem_max: i64,
    w_min: i64,
    w_max: i64,
) -> Result<Chart, Failure> {
    let ring = IntegralRing::for_stem(fp, stem_max)?;
    let table = ring.hilbert(stem_max, w_min, w_max)?;
    let basis = ring.basis(stem_max, w_min, w_max)?;
    let p = fp.p() as i64;
    let in_window =
        |b: &Bidegree| b.stem <= stem_max && b.w >= w_min && b.w <= w_max;
    let mut tau_edges = BTreeSet::new();
    let mut mu_edges = BTreeSet::new();
    for m in &basis {
        let b = ring.monomial_bidegree(m)?;
        let base = RawTerm {
            coeff: 1,
            tau: m.tau,
            mu: m.mu.clone(),
            xs: m.x.iter().cloned().collect(),
        };
        let down = Bidegree::new(b.stem, b.w - 1);
        if in_window(&down) {
            let mut raw = base.clone();
            raw.tau += 1;
            if !ring.normal_form(std::slice::from_ref(&raw))?.is_zero() {
                tau_edges.insert((b, down));
            }
        }
        for i in 0..ring.cube.mu_count() {
            let pi = p.pow(i as u32);
            let target = Bidegree::new(b.stem + 2 * pi, b.w + pi - 1);
            if !in_window(&target) {
                continue;
            }
            let mut raw = base.clone();
            *raw.mu.entry(i).or_insert(0) += 1;
            if !ring.normal_form(std::slice::from_ref(&raw))?.is_zero() {
                mu_edges.insert((i, b, target));
            }
        }
    }
    Ok(Chart { table, tau_edges, mu_edges })
}

// ---------------------------------------------------------------------------
// SVG rendering
// ---------------------------------------------------------------------------

const CELL_X: i64 = 34;
const CELL_Y: i64 = 26;
const MARGIN_L: i64 = 52;
const MARGIN_R: i64 = 24;
const MARGIN_T: i64 = 36;
const MARGIN_B: i64 = 40;

const MU_COLORS: &[&str] = &["#3668a8", "#2e8b57", "#b05a2a", "#7a4aa0", "#a8325e"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

impl Chart {
    /// Hand-assembled SVG 1.1: axes, multiplication lines underneath, one
    /// dot per occupied bidegree (dimension printed beside the dot when it
    /// exceeds one, full label list in a tooltip). Integer geometry keeps
    /// the output byte-deterministic.
    pub fn render_svg(&self, title: &str) -> String {
        let keys: Vec<Bidegree> = self.table.keys().collect();
        let (s_min, s_max, w_min, w_max) = match (
            keys.iter().map(|b| b.stem).min(),
            keys.iter().map(|b| b.stem).max(),
            keys.iter().map(|b| b.w).min(),
            keys.iter().map(|b| b.w).max(),
        ) {
            (Some(a), Some(b), Some(c), Some(d)) => (a.min(0), b.max(1), c, d),
            _ => (0, 1, 0, 1),
        };
        let width = MARGIN_L + (s_max - s_min) * CELL_X + MARGIN_R;
        let height = MARGIN_T + (w_max - w_min) * CELL_Y + MARGIN_B;
        let x = |stem: i64| MARGIN_L + (stem - s_min) * CELL_X;
        let y = |w: i64| MARGIN_T + (w_max - w) * CELL_Y;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
        );
        let _ = writeln!(svg, "  <title>{}</title>", escape(title));
        let _ = writeln!(
            svg,
            "  <rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"#ffffff\"/>"
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#222222\">{}</text>",
            MARGIN_L,
            MARGIN_T - 16,
            escape(title)
        );

        // Axes along the left and bottom edges of the grid.
        let x0 = x(s_min) - CELL_X / 2;
        let y0 = y(w_min) + CELL_Y / 2;
        let _ = writeln!(
            svg,
            "  <line x1=\"{x0}\" y1=\"{}\" x2=\"{}\" y2=\"{y0}\" stroke=\"#999999\" stroke-width=\"1\"/>",
            y(w_max) - CELL_Y / 2,
            x0
        );
        let _ = writeln!(
            svg,
            "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{}\" y2=\"{y0}\" stroke=\"#999999\" stroke-width=\"1\"/>",
            x(s_max) + CELL_X / 2
        );
        let s_step = if s_max - s_min > 24 { 2 } else { 1 };
        let mut stem = s_min;
        while stem <= s_max {
            let _ = writeln!(
                svg,
                "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#555555\" text-anchor=\"middle\">{stem}</text>",
                x(stem),
                y0 + 14
            );
            stem += s_step;
        }
        let w_step = if w_max - w_min > 24 { 2 } else { 1 };
        let mut w = w_min;
        while w <= w_max {
            let _ = writeln!(
                svg,
                "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#555555\" text-anchor=\"end\">{w}</text>",
                x0 - 6,
                y(w) + 3
            );
            w += w_step;
        }
        let _ = writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555555\" text-anchor=\"middle\">stem</text>",
            (x0 + x(s_max) + CELL_X / 2) / 2,
            y0 + 30
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555555\" text-anchor=\"end\">weight</text>",
            x0 - 6,
            y(w_max) - CELL_Y / 2 - 6
        );

        // Multiplication lines under the dots: τ vertical, μ_i colored.
        for (a, b) in &self.tau_edges {
            let _ = writeln!(
                svg,
                "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#888888\" stroke-width=\"1\"/>",
                x(a.stem),
                y(a.w),
                x(b.stem),
                y(b.w)
            );
        }
        for (i, a, b) in &self.mu_edges {
            let color = MU_COLORS[i % MU_COLORS.len()];
            let _ = writeln!(
                svg,
                "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"1\"/>",
                x(a.stem),
                y(a.w),
                x(b.stem),
                y(b.w)
            );
        }

        // One dot per occupied bidegree.
        for (b, dim) in self.table.iter() {
            let labels = self.table.labels(b).join(", ");
            let _ = writeln!(
                svg,
                "  <circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#1a1a1a\"><title>({}, {}) dim {}: {}</title></circle>",
                x(b.stem),
                y(b.w),
                b.stem,
                b.w,
                dim,
                escape(&labels)
            );
            if dim > 1 {
                let _ = writeln!(
                    svg,
                    "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"9\" fill=\"#1a1a1a\">{dim}</text>",
                    x(b.stem) + 5,
                    y(b.w) - 4
                );
            }
        }

        svg.push_str("</svg>\n");
        svg
    }
}
