//! Tate resolutions: construction from a presentation or from one differential, and the
//! cohomology tables, regularity and duals read off them.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::complexes::{cosyzygy, syzygy_cover, EComplex, ExtMatrix, FreeEModule};
use crate::exterior::ExtElement;
use crate::linalg::rank;
use crate::scalar::{Field, FieldSpec};
use crate::symmetric::{graded_piece, mult_map, SPresentation};
use crate::{BggError, Result};

/// How a window was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    FromPresentation { start: i64, certified_with: i64 },
    FromDifferential { left: usize, right: usize },
    Dual { of: Box<Provenance> },
    Projection { codim: usize, of: Box<Provenance> },
}

impl Provenance {
    /// True when the terms encode the cohomology of a single sheaf.
    pub fn is_sheaf(&self) -> bool {
        match self {
            Provenance::FromPresentation { .. } => true,
            Provenance::Projection { of, .. } => of.is_sheaf(),
            _ => false,
        }
    }
}

/// A finite window [lo, hi] of a Tate resolution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TateWindow<E> {
    pub field: FieldSpec,
    pub complex: EComplex<E>,
    pub provenance: Provenance,
}

impl<E: Clone + Send + Sync> TateWindow<E> {
    pub fn v(&self) -> usize {
        self.complex.v
    }

    pub fn lo(&self) -> i64 {
        self.complex.lo
    }

    pub fn hi(&self) -> i64 {
        self.complex.hi()
    }

    /// Twist multiplicities {a: m_a} of T^p = ⊕ ω_E(a)^{m_a}.
    pub fn twists(&self, p: i64) -> BTreeMap<i64, usize> {
        self.complex.term(p).map(|t| t.twists()).unwrap_or_default()
    }

    /// d∘d = 0, minimality, and exactness at every interior position.
    pub fn verify<F: Field<Elem = E>>(&self, f: &F) -> Result<()> {
        if !self.complex.is_minimal() {
            return Err(BggError::NotExact("window is not minimal".into()));
        }
        let report = self.complex.check_interior_acyclic(f)?;
        if let Some((p, n, h)) = report.failures.first() {
            return Err(BggError::NotExact(format!("homology of dimension {h} at position {p}, degree {n}")));
        }
        Ok(())
    }

    pub fn to_json<F: Field<Elem = E>>(&self, f: &F) -> Value {
        json!({
            "field": self.field,
            "provenance": self.provenance,
            "complex": self.complex.to_json(f),
        })
    }

    pub fn from_json<F: Field<Elem = E>>(f: &F, doc: &Value) -> Result<Self> {
        let bad = |m: &str| BggError::InvalidInput(m.to_string());
        let field: FieldSpec = serde_json::from_value(doc.get("field").cloned().ok_or_else(|| bad("window needs 'field'"))?)
            .map_err(|e| bad(&e.to_string()))?;
        if field != f.spec() {
            return Err(BggError::InvalidField(format!("window is over {field}, expected {}", f.spec())));
        }
        let provenance = serde_json::from_value(doc.get("provenance").cloned().ok_or_else(|| bad("window needs 'provenance'"))?)
            .map_err(|e| bad(&e.to_string()))?;
        let complex = EComplex::from_json(f, doc.get("complex").ok_or_else(|| bad("window needs 'complex'"))?)?;
        Ok(TateWindow { field, complex, provenance })
    }
}

/// Extends `d`: T^0 → T^1 by `left` syzygy steps and `right` cosyzygy steps, then prunes.
pub fn tate_from_differential<F: Field>(f: &F, d: &ExtMatrix<F::Elem>, left: usize, right: usize) -> Result<TateWindow<F::Elem>> {
    let complex = extend(f, d, 0, left, right)?;
    let w = TateWindow { field: f.spec(), complex, provenance: Provenance::FromDifferential { left, right } };
    w.verify(f)?;
    Ok(w)
}

/// Resolves around the differential leaving position `p`.
fn extend<F: Field>(f: &F, d: &ExtMatrix<F::Elem>, p: i64, left: usize, right: usize) -> Result<EComplex<F::Elem>> {
    let mut diffs = vec![d.clone()];
    for _ in 0..left {
        let next = syzygy_cover(f, &diffs[0]);
        diffs.insert(0, next);
    }
    for _ in 0..right {
        let next = cosyzygy(f, diffs.last().expect("nonempty"));
        diffs.push(next);
    }
    let mut terms: Vec<FreeEModule> = diffs.iter().map(|m| m.source.clone()).collect();
    terms.push(diffs.last().expect("nonempty").target.clone());
    let c = EComplex::new(d.v(), p - left as i64, terms, diffs)?;
    c.check_dd(f)?;
    Ok(c.prune(f))
}

/// The linear strand ω_E(p)⊗M_p → ω_E(p+1)⊗M_{p+1} for p in [a, top].
pub fn linear_strand<F: Field>(f: &F, pres: &SPresentation<F::Elem>, a: i64, top: i64) -> Result<EComplex<F::Elem>> {
    let v = pres.v;
    let pieces: Vec<_> = (a..=top).into_par_iter().map(|p| graded_piece(f, pres, p)).collect();
    let terms: Vec<FreeEModule> =
        (a..=top).zip(&pieces).map(|(p, m)| FreeEModule::cofree(v, &vec![p; m.dim()])).collect();
    let diffs = (0..pieces.len().saturating_sub(1))
        .into_par_iter()
        .map(|k| {
            let acts = mult_map(f, pres, &pieces[k], &pieces[k + 1]);
            let mut d = ExtMatrix::zero(terms[k].clone(), terms[k + 1].clone());
            for t in 0..pieces[k + 1].dim() {
                for s in 0..pieces[k].dim() {
                    let terms: Vec<_> = acts
                        .iter()
                        .enumerate()
                        .filter(|(_, m)| !f.is_zero(m.get(t, s)))
                        .map(|(alpha, m)| (1u32 << alpha, m.get(t, s).clone()))
                        .collect();
                    if !terms.is_empty() {
                        d.set(t, s, ExtElement::from_terms(f, 1, terms).expect("linear entry")).expect("degree one");
                    }
                }
            }
            d
        })
        .collect();
    EComplex::new(v, a, terms, diffs)
}

/// One construction from start `a`; `None` when the strand is not exact to the right of `a`.
fn build_from_start<F: Field>(
    f: &F,
    pres: &SPresentation<F::Elem>,
    a: i64,
    lo: i64,
    hi: i64,
) -> Result<Option<EComplex<F::Elem>>> {
    let v = pres.v as i64;
    let bottom = lo.min(a - 1);
    let top = hi.max(a + v + 2);
    let strand = linear_strand(f, pres, a, top)?;
    for p in a + 1..=a + v + 1 {
        if !strand.homology_at(f, p).is_empty() {
            return Ok(None);
        }
    }
    let left = extend(f, &strand.diffs[0], a, (a - bottom) as usize, 0)?;
    let mut terms = left.terms.clone();
    let mut diffs = left.diffs.clone();
    terms.extend(strand.terms[2..].iter().cloned());
    diffs.extend(strand.diffs[1..].iter().cloned());
    let full = EComplex::new(pres.v, left.lo, terms, diffs)?.prune(f);
    Ok(Some(full.truncate(lo, hi)))
}

/// Twist multisets and per-degree ranks of every differential.
fn fingerprint<F: Field>(f: &F, c: &EComplex<F::Elem>) -> Vec<(BTreeMap<i64, usize>, Vec<(i64, usize)>)> {
    (c.lo..=c.hi())
        .map(|p| {
            let twists = c.term(p).expect("position").twists();
            let ranks = match (c.diff(p), c.support_at(p)) {
                (Some(d), Some((lo, hi))) => (lo..=hi).into_par_iter().map(|n| (n, rank(f, &d.realize(f, n)))).collect(),
                _ => Vec::new(),
            };
            (twists, ranks)
        })
        .collect()
}

/// Largest number of start offsets tried when the start is chosen automatically.
const MAX_ATTEMPTS: usize = 6;

/// A window [lo, hi] of T(F) for the sheaf of a presented module. With `start = None`
/// the start degree is chosen and certified automatically.
pub fn tate_from_presentation<F: Field>(
    f: &F,
    pres: &SPresentation<F::Elem>,
    start: Option<i64>,
    lo: i64,
    hi: i64,
) -> Result<TateWindow<F::Elem>> {
    pres.validate()?;
    if lo > hi {
        return Err(BggError::InvalidInput(format!("empty window [{lo}, {hi}]")));
    }
    let v = pres.v as i64;
    let attempt = |a: i64| -> Result<Option<TateWindow<F::Elem>>> {
        let Some(c) = build_from_start(f, pres, a, lo, hi)? else {
            return Ok(None);
        };
        let check = a + v + 2;
        let Some(c2) = build_from_start(f, pres, check, lo, hi)? else {
            return Ok(None);
        };
        if fingerprint(f, &c) != fingerprint(f, &c2) {
            return Ok(None);
        }
        let w = TateWindow { field: f.spec(), complex: c, provenance: Provenance::FromPresentation { start: a, certified_with: check } };
        w.verify(f)?;
        Ok(Some(w))
    };
    match start {
        Some(a) => attempt(a)?.ok_or_else(|| {
            BggError::StartTooSmall(format!("start {a} fails the stabilization certificate; try a larger start"))
        }),
        None => {
            let maxgen = pres.gens.iter().copied().max().unwrap_or(0);
            let mingen = pres.gens.iter().copied().min().unwrap_or(0);
            let maxrel = pres.rels.iter().copied().max().unwrap_or(mingen);
            let mut off = (maxrel - mingen).max(0);
            for _ in 0..MAX_ATTEMPTS {
                if let Some(w) = attempt(maxgen + off)? {
                    return Ok(w);
                }
                off = (2 * off).max(1);
            }
            Err(BggError::StartTooSmall(format!("no certified start up to {}", maxgen + off)))
        }
    }
}

/// Whether a table holds sheaf cohomology or twist multiplicities of an arbitrary complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableKind {
    Cohomology,
    TwistTable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableCell {
    pub i: usize,
    pub n: i64,
    /// `None` when the cell lies outside the certified window.
    pub value: Option<usize>,
}

/// h^i F(n) for i in [0, v] and n in [n_lo, n_hi].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyTable {
    pub v: usize,
    pub kind: TableKind,
    pub positions: (i64, i64),
    pub n_lo: i64,
    pub n_hi: i64,
    pub cells: Vec<TableCell>,
}

impl CohomologyTable {
    pub fn get(&self, i: usize, n: i64) -> Option<usize> {
        if i > self.v || n < self.n_lo || n > self.n_hi {
            return None;
        }
        let w = (self.n_hi - self.n_lo + 1) as usize;
        self.cells[i * w + (n - self.n_lo) as usize].value
    }

    /// Reflection (i, n) ↦ (v − i, −n − v − 1).
    pub fn reflect(&self) -> CohomologyTable {
        let v = self.v as i64;
        let (n_lo, n_hi) = (-self.n_hi - v - 1, -self.n_lo - v - 1);
        let mut cells = Vec::with_capacity(self.cells.len());
        for i in 0..=self.v {
            for n in n_lo..=n_hi {
                cells.push(TableCell { i, n, value: self.get(self.v - i, -n - v - 1) });
            }
        }
        CohomologyTable {
            v: self.v,
            kind: TableKind::TwistTable,
            positions: (-self.positions.1 - 1, -self.positions.0 - 1),
            n_lo,
            n_hi,
            cells,
        }
    }
}

impl fmt::Display for CohomologyTable {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self.kind {
            TableKind::Cohomology => "cohomology table",
            TableKind::TwistTable => "twist table",
        };
        writeln!(out, "{label} (rows i = {}..0, columns n = {}..{}, ? = unknown)", self.v, self.n_lo, self.n_hi)?;
        let cell = |x: Option<usize>| match x {
            None => "?".to_string(),
            Some(0) => ".".to_string(),
            Some(k) => k.to_string(),
        };
        let mut width = 2;
        for n in self.n_lo..=self.n_hi {
            width = width.max(n.to_string().len());
        }
        for c in &self.cells {
            width = width.max(cell(c.value).len());
        }
        for i in (0..=self.v).rev() {
            write!(out, "{i:>3}:")?;
            for n in self.n_lo..=self.n_hi {
                write!(out, " {:>width$}", cell(self.get(i, n)))?;
            }
            writeln!(out)?;
        }
        write!(out, "  n:")?;
        for n in self.n_lo..=self.n_hi {
            write!(out, " {n:>width$}")?;
        }
        writeln!(out)
    }
}

/// Reads the table off the twists: ω_E(a) at position p contributes to (i, n) = (p − a, a).
pub fn cohomology_table<E: Clone + Send + Sync>(t: &TateWindow<E>) -> CohomologyTable {
    let v = t.v();
    let (lo, hi) = (t.lo(), t.hi());
    let kind = if t.provenance.is_sheaf() { TableKind::Cohomology } else { TableKind::TwistTable };
    let (n_lo, n_hi) = (lo - v as i64, hi);
    let mut cells = Vec::new();
    for i in 0..=v {
        for n in n_lo..=n_hi {
            let p = n + i as i64;
            let value = if p >= lo && p <= hi { Some(t.twists(p).get(&n).copied().unwrap_or(0)) } else { None };
            cells.push(TableCell { i, n, value });
        }
    }
    CohomologyTable { v, kind, positions: (lo, hi), n_lo, n_hi, cells }
}

/// Least m in the window with h^i F(m − i) = 0 for all i > 0 (and for every larger m in
/// the window). `sharp` is false when m is the window floor, so the true value may be lower.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Regularity {
    pub value: i64,
    pub sharp: bool,
}

pub fn regularity(tab: &CohomologyTable) -> Result<Regularity> {
    let (lo, hi) = tab.positions;
    let pure = |m: i64| (1..=tab.v).all(|i| tab.get(i, m - i as i64) == Some(0));
    if lo > hi || !pure(hi) {
        return Err(BggError::WindowInsufficient(format!("T^{hi} is not pure, so no position of [{lo}, {hi}] is certified regular; widen the window upward")));
    }
    let mut m = hi;
    while m > lo && pure(m - 1) {
        m -= 1;
    }
    Ok(Regularity { value: m, sharp: m > lo })
}

/// The termwise dual window: position p goes to −p − 1 and ω_E(a) to ω_E(−a − v − 1).
pub fn dual_tate<F: Field>(f: &F, t: &TateWindow<F::Elem>) -> TateWindow<F::Elem> {
    TateWindow {
        field: t.field,
        complex: t.complex.dual(f, -1),
        provenance: Provenance::Dual { of: Box::new(t.provenance.clone()) },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::PrimeField;
    use crate::symmetric::SPolynomial;

    #[test]
    fn structure_sheaf_on_the_line() {
        let f = PrimeField::default();
        let pres = SPresentation::free(1, vec![0]);
        let t = tate_from_presentation(&f, &pres, None, -3, 3).unwrap();
        let tab = cohomology_table(&t);
        for n in -3..=2 {
            let h0 = if n >= 0 { n as usize + 1 } else { 0 };
            let h1 = if n <= -2 { (-n - 1) as usize } else { 0 };
            assert_eq!(tab.get(0, n), Some(h0), "h0 at {n}");
            assert_eq!(tab.get(1, n), Some(h1), "h1 at {n}");
        }
        assert_eq!(regularity(&tab).unwrap(), Regularity { value: 0, sharp: true });
    }

    #[test]
    fn point_from_presentation_and_differential() {
        let f = PrimeField::default();
        let x = |i| SPolynomial::var(&f, 3, i);
        let pres = SPresentation::new(2, vec![0], vec![1, 1], vec![vec![x(1), x(2)]]).unwrap();
        let t = tate_from_presentation(&f, &pres, None, -3, 3).unwrap();
        for p in -3..=3 {
            assert_eq!(t.twists(p), BTreeMap::from([(p, 1)]));
        }
        let mut d = ExtMatrix::zero(FreeEModule::cofree(2, &[0]), FreeEModule::cofree(2, &[1]));
        d.set(0, 0, ExtElement::gen(&f, 0)).unwrap();
        let t2 = tate_from_differential(&f, &d, 3, 2).unwrap();
        for p in -3..=3 {
            assert_eq!(t2.twists(p), BTreeMap::from([(p, 1)]));
        }
    }

    #[test]
    fn empty_differential() {
        let f = PrimeField::default();
        let z = FreeEModule::new(2, vec![]);
        let t = tate_from_differential(&f, &ExtMatrix::zero(z.clone(), z), 2, 2).unwrap();
        assert!(t.complex.terms.iter().all(|m| m.rank() == 0));
    }

    #[test]
    fn table_json_round_trip() {
        let f = PrimeField::default();
        let t = tate_from_presentation(&f, &SPresentation::free(1, vec![1]), None, -2, 2).unwrap();
        let tab = cohomology_table(&t);
        let s = serde_json::to_string(&tab).unwrap();
        assert_eq!(serde_json::from_str::<CohomologyTable>(&s).unwrap(), tab);
        let w = TateWindow::from_json(&f, &t.to_json(&f)).unwrap();
        assert_eq!(w, t);
    }
}
