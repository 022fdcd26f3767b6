//! Graded free E-modules, degree-zero maps between them, complexes, and the minimal
//! resolution engine.
//!
//! Conventions: a free module with generator degrees g_j is ⊕_j E(−g_j); the summand
//! ω_E(a) is the free module on one generator of degree −a−v−1. A map acts on column
//! vectors of coordinates, y_i = Σ_j m_ij ∧ x_j, so composition is the matrix product
//! and modules are acted on from the right.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::exterior::{binomial, ext_mul, mask_rank, masks_of_degree, popcount, ExtElement, Mask, MAX_GENERATORS};
use crate::linalg::{kernel, rank, rref_matrix, Matrix, Span};
use crate::scalar::Field;
use crate::{BggError, Result};

/// ⊕_j E(−g_j) over the exterior algebra on v+1 generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeEModule {
    pub v: usize,
    pub degrees: Vec<i64>,
}

/// Positions of the generator blocks inside one internal degree.
#[derive(Clone, Debug)]
pub struct Layout {
    pub offsets: Vec<usize>,
    pub sizes: Vec<usize>,
    pub total: usize,
}

impl FreeEModule {
    pub fn new(v: usize, degrees: Vec<i64>) -> Self {
        assert!(v < MAX_GENERATORS, "too many exterior generators");
        FreeEModule { v, degrees }
    }

    /// ⊕ ω_E(a) over the given twists.
    pub fn cofree(v: usize, twists: &[i64]) -> Self {
        Self::new(v, twists.iter().map(|a| -a - v as i64 - 1).collect())
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    pub fn twist(&self, j: usize) -> i64 {
        -self.degrees[j] - self.v as i64 - 1
    }

    pub fn twists(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for j in 0..self.rank() {
            *out.entry(self.twist(j)).or_insert(0) += 1;
        }
        out
    }

    /// Internal degrees in which the module is nonzero.
    pub fn support(&self) -> Option<(i64, i64)> {
        let lo = *self.degrees.iter().min()?;
        let hi = *self.degrees.iter().max()? + self.v as i64 + 1;
        Some((lo, hi))
    }

    pub fn layout(&self, n: i64) -> Layout {
        let mut offsets = Vec::with_capacity(self.rank());
        let mut sizes = Vec::with_capacity(self.rank());
        let mut total = 0;
        for &g in &self.degrees {
            offsets.push(total);
            let s = binomial(self.v as i64 + 1, n - g);
            sizes.push(s);
            total += s;
        }
        Layout { offsets, sizes, total }
    }

    pub fn dim_at(&self, n: i64) -> usize {
        self.degrees.iter().map(|&g| binomial(self.v as i64 + 1, n - g)).sum()
    }

    /// Basis (generator, mask) in internal degree n, in coordinate order.
    pub fn basis(&self, n: i64) -> Vec<(usize, Mask)> {
        let mut out = Vec::new();
        for (j, &g) in self.degrees.iter().enumerate() {
            let k = n - g;
            if k >= 0 && k <= self.v as i64 + 1 {
                out.extend(masks_of_degree(self.v + 1, k as usize).into_iter().map(|m| (j, m)));
            }
        }
        out
    }

    /// Right multiplication x ↦ x·e_τ from degree n to degree n+|τ|.
    pub fn mul_right<F: Field>(&self, f: &F, n: i64, x: &[F::Elem], tau: Mask) -> Vec<F::Elem> {
        let target = self.layout(n + popcount(tau) as i64);
        let mut out = vec![f.zero(); target.total];
        for ((j, mu), c) in self.basis(n).into_iter().zip(x) {
            if f.is_zero(c) {
                continue;
            }
            if let Some((nu, neg)) = ext_mul(mu, tau) {
                let k = target.offsets[j] + mask_rank(nu);
                out[k] = if neg { f.sub(&out[k], c) } else { f.add(&out[k], c) };
            }
        }
        out
    }

    pub fn dual(&self) -> FreeEModule {
        FreeEModule::new(self.v, self.degrees.iter().map(|g| -g - self.v as i64 - 1).collect())
    }

    pub fn remove(&mut self, j: usize) {
        self.degrees.remove(j);
    }
}

/// Degree-zero map between free modules; rows are sparse lists sorted by column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtMatrix<E> {
    pub source: FreeEModule,
    pub target: FreeEModule,
    pub rows: Vec<Vec<(usize, ExtElement<E>)>>,
}

impl<E: Clone + Send + Sync> ExtMatrix<E> {
    pub fn zero(source: FreeEModule, target: FreeEModule) -> Self {
        let rows = vec![Vec::new(); target.rank()];
        ExtMatrix { source, target, rows }
    }

    pub fn v(&self) -> usize {
        self.source.v
    }

    /// Builds a map from a dense grid of entries, checking homogeneity.
    pub fn from_entries<F: Field<Elem = E>>(
        f: &F,
        source: FreeEModule,
        target: FreeEModule,
        entries: Vec<Vec<ExtElement<E>>>,
    ) -> Result<Self> {
        let _ = f;
        if entries.len() != target.rank() || entries.iter().any(|r| r.len() != source.rank()) {
            return Err(BggError::InvalidInput("entry grid does not match module ranks".into()));
        }
        let mut m = Self::zero(source, target);
        for (i, row) in entries.into_iter().enumerate() {
            for (j, e) in row.into_iter().enumerate() {
                m.set(i, j, e)?;
            }
        }
        Ok(m)
    }

    pub fn expected_degree(&self, i: usize, j: usize) -> i64 {
        self.source.degrees[j] - self.target.degrees[i]
    }

    /// Sets an entry; zero elements clear it.
    pub fn set(&mut self, i: usize, j: usize, e: ExtElement<E>) -> Result<()> {
        if !e.is_zero() && e.degree as i64 != self.expected_degree(i, j) {
            return Err(BggError::DegreeMismatch(format!(
                "entry ({i},{j}) has degree {} but the generators force {}",
                e.degree,
                self.expected_degree(i, j)
            )));
        }
        let row = &mut self.rows[i];
        match row.binary_search_by_key(&j, |(c, _)| *c) {
            Ok(k) => {
                if e.is_zero() {
                    row.remove(k);
                } else {
                    row[k].1 = e;
                }
            }
            Err(k) => {
                if !e.is_zero() {
                    row.insert(k, (j, e));
                }
            }
        }
        Ok(())
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&ExtElement<E>> {
        let row = &self.rows[i];
        row.binary_search_by_key(&j, |(c, _)| *c).ok().map(|k| &row[k].1)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    /// Minimal means no entry is an invertible scalar.
    pub fn is_minimal(&self) -> bool {
        self.rows.iter().flatten().all(|(_, e)| !e.is_unit())
    }

    /// The field matrix of the map in internal degree n.
    pub fn realize<F: Field<Elem = E>>(&self, f: &F, n: i64) -> Matrix<E> {
        let sl = self.source.layout(n);
        let tl = self.target.layout(n);
        let mut m = Matrix::zeros(f, tl.total, sl.total);
        let v1 = self.v() + 1;
        for (i, row) in self.rows.iter().enumerate() {
            if tl.sizes[i] == 0 {
                continue;
            }
            for (j, e) in row {
                if sl.sizes[*j] == 0 {
                    continue;
                }
                let k = (n - self.source.degrees[*j]) as usize;
                for (c_idx, mu) in masks_of_degree(v1, k).into_iter().enumerate() {
                    let col = sl.offsets[*j] + c_idx;
                    for (tau, c) in &e.terms {
                        if let Some((nu, neg)) = ext_mul(*tau, mu) {
                            let r = tl.offsets[i] + mask_rank(nu);
                            let cur = &mut m.data[r * sl.total + col];
                            *cur = if neg { f.sub(cur, c) } else { f.add(cur, c) };
                        }
                    }
                }
            }
        }
        m
    }

    /// The composite `self ∘ inner`.
    pub fn compose<F: Field<Elem = E>>(&self, f: &F, inner: &ExtMatrix<E>) -> ExtMatrix<E> {
        assert_eq!(self.source, inner.target, "composing incompatible maps");
        let mut out = ExtMatrix::zero(inner.source.clone(), self.target.clone());
        for (i, row) in self.rows.iter().enumerate() {
            let mut acc: BTreeMap<usize, ExtElement<E>> = BTreeMap::new();
            for (j, a) in row {
                for (k, b) in &inner.rows[*j] {
                    let p = a.wedge(f, b);
                    if p.is_zero() {
                        continue;
                    }
                    let slot = acc.entry(*k).or_insert_with(|| ExtElement::zero(p.degree));
                    *slot = slot.add(f, &p);
                }
            }
            out.rows[i] = acc.into_iter().filter(|(_, e)| !e.is_zero()).collect();
        }
        out
    }

    /// The dual map D(target) → D(source): transpose with the reversion sign on entries.
    pub fn dual<F: Field<Elem = E>>(&self, f: &F) -> ExtMatrix<E> {
        let mut out = ExtMatrix::zero(self.target.dual(), self.source.dual());
        for (i, row) in self.rows.iter().enumerate() {
            for (j, e) in row {
                out.rows[*j].push((i, e.reversed(f)));
            }
        }
        for row in &mut out.rows {
            row.sort_by_key(|(c, _)| *c);
        }
        out
    }

    /// Applies the map to a coordinate vector in degree n.
    pub fn apply<F: Field<Elem = E>>(&self, f: &F, n: i64, x: &[E]) -> Vec<E> {
        self.realize(f, n).apply(f, x)
    }

    /// Image of every entry under a ring map, with new module structures.
    pub fn map_entries(
        &self,
        source: FreeEModule,
        target: FreeEModule,
        mut g: impl FnMut(&ExtElement<E>) -> ExtElement<E>,
    ) -> ExtMatrix<E> {
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|(j, e)| (*j, g(e))).filter(|(_, e)| !e.is_zero()).collect())
            .collect();
        ExtMatrix { source, target, rows }
    }

    /// Restriction to the chosen source and target generators.
    pub fn restrict(&self, keep_src: &[usize], keep_tgt: &[usize]) -> ExtMatrix<E> {
        let mut newcol = vec![usize::MAX; self.source.rank()];
        for (k, &j) in keep_src.iter().enumerate() {
            newcol[j] = k;
        }
        let source = FreeEModule::new(self.v(), keep_src.iter().map(|&j| self.source.degrees[j]).collect());
        let target = FreeEModule::new(self.v(), keep_tgt.iter().map(|&i| self.target.degrees[i]).collect());
        let rows = keep_tgt
            .iter()
            .map(|&i| {
                self.rows[i]
                    .iter()
                    .filter(|(j, _)| newcol[*j] != usize::MAX)
                    .map(|(j, e)| (newcol[*j], e.clone()))
                    .collect()
            })
            .collect();
        ExtMatrix { source, target, rows }
    }

    pub fn to_json<F: Field<Elem = E>>(&self, f: &F) -> Value {
        let mut entries = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            for (j, e) in row {
                let terms: Vec<Value> = e.terms.iter().map(|(m, c)| json!([m, f.to_json(c)])).collect();
                entries.push(json!([i, j, terms]));
            }
        }
        json!({"source": self.source.degrees, "target": self.target.degrees, "entries": entries})
    }

    pub fn from_json<F: Field<Elem = E>>(f: &F, v: usize, doc: &Value) -> Result<Self> {
        let bad = |m: &str| BggError::InvalidInput(m.to_string());
        let degs = |key: &str| -> Result<Vec<i64>> {
            doc.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| bad(&format!("matrix needs '{key}'")))?
                .iter()
                .map(|x| x.as_i64().ok_or_else(|| bad("generator degrees are integers")))
                .collect()
        };
        let source = FreeEModule::new(v, degs("source")?);
        let target = FreeEModule::new(v, degs("target")?);
        let mut m = ExtMatrix::zero(source, target);
        let entries = doc.get("entries").and_then(Value::as_array).ok_or_else(|| bad("matrix needs 'entries'"))?;
        for e in entries {
            let a = e.as_array().filter(|a| a.len() == 3).ok_or_else(|| bad("entries are [row, col, terms]"))?;
            let i = a[0].as_u64().ok_or_else(|| bad("row index"))? as usize;
            let j = a[1].as_u64().ok_or_else(|| bad("column index"))? as usize;
            if i >= m.target.rank() || j >= m.source.rank() {
                return Err(bad("entry index out of range"));
            }
            let deg = m.expected_degree(i, j);
            if deg < 0 || deg > v as i64 + 1 {
                return Err(BggError::DegreeMismatch(format!("entry ({i},{j}) would have degree {deg}")));
            }
            let mut terms = Vec::new();
            for t in a[2].as_array().ok_or_else(|| bad("terms must be a list"))? {
                let p = t.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("terms are [mask, coefficient]"))?;
                let mask = p[0].as_u64().ok_or_else(|| bad("mask must be an integer"))?;
                if mask >> (v + 1) != 0 {
                    return Err(bad("mask uses a generator beyond e_v"));
                }
                terms.push((mask as Mask, f.from_json(&p[1])?));
            }
            let el = ExtElement::from_terms(f, deg as usize, terms)?;
            m.set(i, j, el)?;
        }
        Ok(m)
    }
}

/// A finite-dimensional graded E-module: degreewise dimensions and the action of each e_α.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteEModule<E> {
    pub v: usize,
    pub lo: i64,
    pub dims: Vec<usize>,
    /// `action[k][α]` maps degree lo+k to degree lo+k+1.
    pub action: Vec<Vec<Matrix<E>>>,
}

impl<E: Clone + Send + Sync> FiniteEModule<E> {
    pub fn dim_at(&self, n: i64) -> usize {
        if n < self.lo || n >= self.lo + self.dims.len() as i64 {
            0
        } else {
            self.dims[(n - self.lo) as usize]
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.dims.len() as i64 - 1
    }

    /// The one-dimensional module k in degree `d`.
    pub fn residue_field<F: Field<Elem = E>>(f: &F, v: usize, d: i64) -> Self {
        FiniteEModule { v, lo: d, dims: vec![1], action: vec![(0..=v).map(|_| Matrix::zeros(f, 0, 1)).collect()] }
    }

    /// x·e_α for x in degree n.
    pub fn act<F: Field<Elem = E>>(&self, f: &F, n: i64, alpha: usize, x: &[E]) -> Vec<E> {
        if n < self.lo || n > self.hi() {
            return Vec::new();
        }
        self.action[(n - self.lo) as usize][alpha].apply(f, x)
    }

    /// x·e_τ, multiplying by the factors of τ in ascending order.
    pub fn act_monomial<F: Field<Elem = E>>(&self, f: &F, n: i64, tau: Mask, x: &[E]) -> Vec<E> {
        let mut cur = x.to_vec();
        let mut deg = n;
        for alpha in 0..=self.v {
            if tau >> alpha & 1 == 1 {
                cur = self.act(f, deg, alpha, &cur);
                deg += 1;
                if cur.is_empty() {
                    return vec![f.zero(); self.dim_at(n + popcount(tau) as i64)];
                }
            }
        }
        cur
    }

    /// The actions square to zero and pairwise anticommute.
    pub fn check_relations<F: Field<Elem = E>>(&self, f: &F) -> bool {
        for k in 0..self.dims.len().saturating_sub(1) {
            for a in 0..=self.v {
                for b in a..=self.v {
                    let ab = self.action[k + 1][a].mul(f, &self.action[k][b]);
                    let ba = self.action[k + 1][b].mul(f, &self.action[k][a]);
                    if ab.data.iter().zip(&ba.data).any(|(x, y)| !f.is_zero(&f.add(x, y))) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Graded k-dual: degree −n holds the dual of degree n, actions transpose.
    pub fn dual<F: Field<Elem = E>>(&self, f: &F) -> Self {
        let len = self.dims.len();
        if len == 0 {
            return FiniteEModule { v: self.v, lo: -self.lo, dims: Vec::new(), action: Vec::new() };
        }
        let lo = -self.hi();
        let dims: Vec<usize> = self.dims.iter().rev().copied().collect();
        let action = (0..len)
            .map(|k| {
                let n = lo + k as i64;
                (0..=self.v)
                    .map(|a| {
                        if -n - 1 < self.lo {
                            Matrix::zeros(f, 0, dims[k])
                        } else {
                            self.action[(-n - 1 - self.lo) as usize][a].transpose()
                        }
                    })
                    .collect()
            })
            .collect();
        FiniteEModule { v: self.v, lo, dims, action }
    }
}

/// Kernel of a map as a finite E-module, with coordinates read off the free columns.
pub fn kernel_module<F: Field>(f: &F, m: &ExtMatrix<F::Elem>) -> FiniteEModule<F::Elem> {
    let v = m.v();
    let Some((lo, hi)) = m.source.support() else {
        return FiniteEModule { v, lo: 0, dims: Vec::new(), action: Vec::new() };
    };
    let pieces: Vec<_> = (lo..=hi + 1)
        .into_par_iter()
        .map(|n| {
            let ech = rref_matrix(f, &m.realize(f, n));
            let basis = ech.kernel_basis(f);
            (ech.free_columns(), basis)
        })
        .collect();
    let dims: Vec<usize> = pieces[..pieces.len() - 1].iter().map(|(_, b)| b.len()).collect();
    let action = (0..dims.len())
        .into_par_iter()
        .map(|k| {
            let n = lo + k as i64;
            let (free_next, _) = &pieces[k + 1];
            (0..=v)
                .map(|a| {
                    let mut mat = Matrix::zeros(f, free_next.len(), dims[k]);
                    for (col, y) in pieces[k].1.iter().enumerate() {
                        let z = m.source.mul_right(f, n, y, 1 << a);
                        for (row, &c) in free_next.iter().enumerate() {
                            mat.set(row, col, z[c].clone());
                        }
                    }
                    mat
                })
                .collect()
        })
        .collect();
    FiniteEModule { v, lo, dims, action }
}

/// Chooses minimal generators of a graded subspace family closed under right
/// multiplication: a basis of N_n modulo Σ_α N_{n−1}·e_α, lowest degree first.
fn select_generators<E: Clone>(
    f: &impl Field<Elem = E>,
    lo: i64,
    ambient_dims: &[usize],
    pieces: &[Vec<Vec<E>>],
    mult: impl Fn(i64, &[E], usize) -> Vec<E>,
    v: usize,
) -> Vec<(i64, Vec<E>)> {
    let mut gens = Vec::new();
    for (k, basis) in pieces.iter().enumerate() {
        if basis.is_empty() {
            continue;
        }
        let n = lo + k as i64;
        let mut span = Span::new(ambient_dims[k]);
        if k > 0 {
            'outer: for y in &pieces[k - 1] {
                for a in 0..=v {
                    if span.dim() == basis.len() {
                        break 'outer;
                    }
                    span.insert(f, &mult(n - 1, y, a));
                }
            }
        }
        for y in basis {
            if span.dim() == basis.len() {
                break;
            }
            if span.insert(f, y) {
                gens.push((n, y.clone()));
            }
        }
    }
    gens
}

/// Turns generator vectors of a submodule of `module` into the columns of a map P → module.
fn cover_map<E: Clone + Send + Sync>(module: &FreeEModule, gens: &[(i64, Vec<E>)], f: &impl Field<Elem = E>) -> ExtMatrix<E> {
    let source = FreeEModule::new(module.v, gens.iter().map(|(n, _)| *n).collect());
    let mut m = ExtMatrix::zero(source, module.clone());
    let mut cache: BTreeMap<i64, Vec<(usize, Mask)>> = BTreeMap::new();
    let mut cols: Vec<BTreeMap<usize, Vec<(Mask, E)>>> = vec![BTreeMap::new(); gens.len()];
    for (g, (n, y)) in gens.iter().enumerate() {
        let basis = cache.entry(*n).or_insert_with(|| module.basis(*n));
        for ((j, mu), c) in basis.iter().zip(y) {
            if !f.is_zero(c) {
                cols[g].entry(*j).or_default().push((*mu, c.clone()));
            }
        }
    }
    for (g, col) in cols.into_iter().enumerate() {
        for (j, terms) in col {
            let deg = (gens[g].0 - module.degrees[j]) as usize;
            let e = ExtElement::from_terms(f, deg, terms).expect("homogeneous kernel vector");
            m.rows[j].push((g, e));
        }
    }
    m
}

/// The minimal map P → A whose image is the kernel of `d`: A → B.
pub fn syzygy_cover<F: Field>(f: &F, d: &ExtMatrix<F::Elem>) -> ExtMatrix<F::Elem> {
    let module = &d.source;
    let Some((lo, hi)) = module.support() else {
        return ExtMatrix::zero(FreeEModule::new(module.v, Vec::new()), module.clone());
    };
    let pieces: Vec<Vec<Vec<F::Elem>>> =
        (lo..=hi).into_par_iter().map(|n| kernel(f, &d.realize(f, n))).collect();
    let dims: Vec<usize> = (lo..=hi).map(|n| module.dim_at(n)).collect();
    let gens = select_generators(f, lo, &dims, &pieces, |n, y, a| module.mul_right(f, n, y, 1 << a), module.v);
    cover_map(module, &gens, f)
}

/// The minimal map B → C whose kernel is the image of `d`: A → B (an injective hull of
/// the cokernel), obtained through duality.
pub fn cosyzygy<F: Field>(f: &F, d: &ExtMatrix<F::Elem>) -> ExtMatrix<F::Elem> {
    syzygy_cover(f, &d.dual(f)).dual(f)
}

/// A window of a complex of free E-modules; `diffs[k]` maps `terms[k]` to `terms[k+1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EComplex<E> {
    pub v: usize,
    pub lo: i64,
    pub terms: Vec<FreeEModule>,
    pub diffs: Vec<ExtMatrix<E>>,
}

/// Homology that failed to vanish: (position, internal degree, dimension).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AcyclicityReport {
    pub failures: Vec<(i64, i64, usize)>,
}

impl AcyclicityReport {
    pub fn is_exact(&self) -> bool {
        self.failures.is_empty()
    }
}

impl<E: Clone + Send + Sync> EComplex<E> {
    pub fn new(v: usize, lo: i64, terms: Vec<FreeEModule>, diffs: Vec<ExtMatrix<E>>) -> Result<Self> {
        let c = EComplex { v, lo, terms, diffs };
        c.validate()?;
        Ok(c)
    }

    pub fn empty(v: usize, lo: i64) -> Self {
        EComplex { v, lo, terms: Vec::new(), diffs: Vec::new() }
    }

    fn validate(&self) -> Result<()> {
        if self.diffs.len() + 1 != self.terms.len() && !(self.terms.is_empty() && self.diffs.is_empty()) {
            return Err(BggError::InvalidInput("need one differential between each pair of terms".into()));
        }
        for (k, d) in self.diffs.iter().enumerate() {
            if d.source != self.terms[k] || d.target != self.terms[k + 1] {
                return Err(BggError::InvalidInput(format!("differential at position {} has the wrong shape", self.lo + k as i64)));
            }
        }
        if self.terms.iter().any(|t| t.v != self.v) {
            return Err(BggError::InvalidInput("terms over different exterior algebras".into()));
        }
        Ok(())
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.terms.len() as i64 - 1
    }

    pub fn contains(&self, p: i64) -> bool {
        p >= self.lo && p <= self.hi()
    }

    pub fn term(&self, p: i64) -> Option<&FreeEModule> {
        if self.contains(p) {
            Some(&self.terms[(p - self.lo) as usize])
        } else {
            None
        }
    }

    /// The differential leaving position p.
    pub fn diff(&self, p: i64) -> Option<&ExtMatrix<E>> {
        if p >= self.lo && p < self.hi() {
            Some(&self.diffs[(p - self.lo) as usize])
        } else {
            None
        }
    }

    /// d∘d = 0, checked symbolically.
    pub fn check_dd<F: Field<Elem = E>>(&self, f: &F) -> Result<()> {
        for k in 1..self.diffs.len() {
            if !self.diffs[k].compose(f, &self.diffs[k - 1]).is_zero() {
                return Err(BggError::NotAComplex(format!(
                    "d∘d ≠ 0 at position {}",
                    self.lo + k as i64 - 1
                )));
            }
        }
        Ok(())
    }

    pub fn is_minimal(&self) -> bool {
        self.diffs.iter().all(|d| d.is_minimal())
    }

    /// Internal degrees where position p is nonzero.
    pub fn support_at(&self, p: i64) -> Option<(i64, i64)> {
        self.term(p)?.support()
    }

    /// dim H^p in every internal degree. Terms outside the window count as zero.
    pub fn homology_at<F: Field<Elem = E>>(&self, f: &F, p: i64) -> BTreeMap<i64, usize> {
        let Some((lo, hi)) = self.support_at(p) else {
            return BTreeMap::new();
        };
        let out_d = self.diff(p);
        let in_d = self.diff(p - 1);
        let term = self.term(p).expect("position in window");
        (lo..=hi)
            .into_par_iter()
            .map(|n| {
                let dim = term.dim_at(n);
                let r_out = out_d.map_or(0, |d| rank(f, &d.realize(f, n)));
                let r_in = in_d.map_or(0, |d| rank(f, &d.realize(f, n)));
                (n, dim - r_out - r_in)
            })
            .filter(|(_, h)| *h > 0)
            .collect()
    }

    /// Homology dimensions at the given positions; validates d∘d = 0 first.
    pub fn check_acyclic<F: Field<Elem = E>>(&self, f: &F, positions: impl IntoIterator<Item = i64>) -> Result<AcyclicityReport> {
        self.check_dd(f)?;
        let mut failures = Vec::new();
        for p in positions {
            if !(p > self.lo && p < self.hi()) {
                return Err(BggError::WindowInsufficient(format!("position {p} is not interior to [{}, {}]", self.lo, self.hi())));
            }
            for (n, h) in self.homology_at(f, p) {
                failures.push((p, n, h));
            }
        }
        Ok(AcyclicityReport { failures })
    }

    /// Exactness at every interior position.
    pub fn check_interior_acyclic<F: Field<Elem = E>>(&self, f: &F) -> Result<AcyclicityReport> {
        self.check_acyclic(f, (self.lo + 1)..self.hi())
    }

    /// Keeps positions in [lo, hi] (clamped to the window).
    pub fn truncate(&self, lo: i64, hi: i64) -> EComplex<E> {
        let lo = lo.max(self.lo);
        let hi = hi.min(self.hi());
        if lo > hi {
            return EComplex::empty(self.v, lo);
        }
        let a = (lo - self.lo) as usize;
        let b = (hi - self.lo) as usize;
        EComplex { v: self.v, lo, terms: self.terms[a..=b].to_vec(), diffs: self.diffs[a..b].to_vec() }
    }

    /// Applies the duality functor termwise; position p goes to `shift − p`.
    pub fn dual<F: Field<Elem = E>>(&self, f: &F, shift: i64) -> EComplex<E> {
        if self.terms.is_empty() {
            return EComplex::empty(self.v, shift - self.lo);
        }
        let terms = self.terms.iter().rev().map(|t| t.dual()).collect();
        let diffs = self.diffs.iter().rev().map(|d| d.dual(f)).collect();
        EComplex { v: self.v, lo: shift - self.hi(), terms, diffs }
    }

    /// The subcomplex spanned by the chosen generators; fails if it is not closed.
    pub fn subcomplex(&self, keep: &[Vec<bool>]) -> Result<EComplex<E>> {
        let idx: Vec<Vec<usize>> =
            keep.iter().map(|k| k.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j).collect()).collect();
        for (k, d) in self.diffs.iter().enumerate() {
            for (i, row) in d.rows.iter().enumerate() {
                if keep[k + 1][i] {
                    continue;
                }
                if row.iter().any(|(j, _)| keep[k][*j]) {
                    return Err(BggError::Precondition("selected summands do not form a subcomplex".into()));
                }
            }
        }
        let terms = self
            .terms
            .iter()
            .zip(&idx)
            .map(|(t, ix)| FreeEModule::new(self.v, ix.iter().map(|&j| t.degrees[j]).collect()))
            .collect();
        let diffs = self.diffs.iter().enumerate().map(|(k, d)| d.restrict(&idx[k], &idx[k + 1])).collect();
        Ok(EComplex { v: self.v, lo: self.lo, terms, diffs })
    }

    /// Splits off unit entries until the complex is minimal.
    pub fn prune<F: Field<Elem = E>>(&self, f: &F) -> EComplex<E> {
        let mut c = self.clone();
        loop {
            let mut found = None;
            'search: for (k, d) in c.diffs.iter().enumerate() {
                for (i, row) in d.rows.iter().enumerate() {
                    for (j, e) in row {
                        if e.is_unit() {
                            found = Some((k, i, *j, e.terms[0].1.clone()));
                            break 'search;
                        }
                    }
                }
            }
            let Some((k, i, j, u)) = found else { break };
            c.eliminate(f, k, i, j, &u);
        }
        c
    }

    fn eliminate<F: Field<Elem = E>>(&mut self, f: &F, k: usize, i: usize, j: usize, u: &E) {
        let u_inv = f.inv(u).expect("unit entry");
        let d = &self.diffs[k];
        let row_i: Vec<(usize, ExtElement<E>)> = d.rows[i].iter().filter(|(s, _)| *s != j).cloned().collect();
        let col_j: Vec<(usize, ExtElement<E>)> = d
            .rows
            .iter()
            .enumerate()
            .filter(|(r, _)| *r != i)
            .filter_map(|(r, row)| d.entry_in(row, j).map(|x| (r, x.clone())))
            .collect();
        let d = &mut self.diffs[k];
        for (r, x) in &col_j {
            for (s, y) in &row_i {
                let corr = x.wedge(f, y).scale(f, &f.neg(&u_inv));
                let cur = d.entry(*r, *s).cloned().unwrap_or_else(|| ExtElement::zero(corr.degree));
                d.set(*r, *s, cur.add(f, &corr)).expect("homogeneous correction");
            }
        }
        let keep_src: Vec<usize> = (0..d.source.rank()).filter(|&s| s != j).collect();
        let keep_tgt: Vec<usize> = (0..d.target.rank()).filter(|&r| r != i).collect();
        self.diffs[k] = self.diffs[k].restrict(&keep_src, &keep_tgt);
        if k > 0 {
            let prev = &self.diffs[k - 1];
            let all: Vec<usize> = (0..prev.source.rank()).collect();
            self.diffs[k - 1] = prev.restrict(&all, &keep_src);
        }
        if k + 1 < self.diffs.len() {
            let next = &self.diffs[k + 1];
            let all: Vec<usize> = (0..next.target.rank()).collect();
            self.diffs[k + 1] = next.restrict(&keep_tgt, &all);
        }
        self.terms[k].remove(j);
        self.terms[k + 1].remove(i);
    }

    /// Σ_p (−1)^p dim C^p_n.
    pub fn euler_characteristic(&self, n: i64) -> i64 {
        self.terms
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let s = if (self.lo + k as i64).rem_euclid(2) == 0 { 1 } else { -1 };
                s * t.dim_at(n) as i64
            })
            .sum()
    }

    pub fn to_json<F: Field<Elem = E>>(&self, f: &F) -> Value {
        let terms: Vec<&Vec<i64>> = self.terms.iter().map(|t| &t.degrees).collect();
        let diffs: Vec<Value> = self.diffs.iter().map(|d| d.to_json(f)["entries"].clone()).collect();
        json!({"v": self.v, "lo": self.lo, "terms": terms, "diffs": diffs})
    }

    pub fn from_json<F: Field<Elem = E>>(f: &F, doc: &Value) -> Result<Self> {
        let bad = |m: &str| BggError::InvalidInput(m.to_string());
        let v = doc.get("v").and_then(Value::as_u64).ok_or_else(|| bad("complex needs 'v'"))? as usize;
        if v + 1 > MAX_GENERATORS {
            return Err(bad("too many exterior generators"));
        }
        let lo = doc.get("lo").and_then(Value::as_i64).ok_or_else(|| bad("complex needs 'lo'"))?;
        let terms: Vec<FreeEModule> = doc
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("complex needs 'terms'"))?
            .iter()
            .map(|t| {
                let degs = t
                    .as_array()
                    .ok_or_else(|| bad("terms are lists of generator degrees"))?
                    .iter()
                    .map(|x| x.as_i64().ok_or_else(|| bad("generator degrees are integers")))
                    .collect::<Result<Vec<i64>>>()?;
                Ok(FreeEModule::new(v, degs))
            })
            .collect::<Result<_>>()?;
        let raw = doc.get("diffs").and_then(Value::as_array).ok_or_else(|| bad("complex needs 'diffs'"))?;
        if raw.len() + 1 != terms.len() && !(terms.is_empty() && raw.is_empty()) {
            return Err(bad("need one differential between each pair of terms"));
        }
        let diffs = raw
            .iter()
            .enumerate()
            .map(|(k, entries)| {
                let doc = json!({"source": terms[k].degrees, "target": terms[k + 1].degrees, "entries": entries});
                ExtMatrix::from_json(f, v, &doc)
            })
            .collect::<Result<_>>()?;
        EComplex::new(v, lo, terms, diffs)
    }
}

impl<E: Clone + Send + Sync> ExtMatrix<E> {
    fn entry_in<'a>(&self, row: &'a [(usize, ExtElement<E>)], j: usize) -> Option<&'a ExtElement<E>> {
        row.binary_search_by_key(&j, |(c, _)| *c).ok().map(|k| &row[k].1)
    }
}

/// A minimal free resolution P^{−steps} → … → P^{−1} of a finite module, with the
/// images of the generators of P^{−1}.
#[derive(Clone, Debug)]
pub struct FreeResolution<E> {
    pub complex: EComplex<E>,
    pub cover: Vec<(i64, Vec<E>)>,
}

/// Minimal free resolution of a finite E-module, `steps` terms long.
pub fn min_free_resolution<F: Field>(f: &F, k: &FiniteEModule<F::Elem>, steps: usize) -> Result<FreeResolution<F::Elem>> {
    if steps == 0 {
        return Err(BggError::Precondition("a resolution needs at least one step".into()));
    }
    let v = k.v;
    let pieces: Vec<Vec<Vec<F::Elem>>> = k
        .dims
        .iter()
        .map(|&d| {
            (0..d)
                .map(|i| {
                    let mut x = vec![f.zero(); d];
                    x[i] = f.one();
                    x
                })
                .collect()
        })
        .collect();
    let cover = select_generators(f, k.lo, &k.dims, &pieces, |n, y, a| k.act(f, n, a, y), v);
    let p1 = FreeEModule::new(v, cover.iter().map(|(n, _)| *n).collect());
    let mut terms = vec![p1.clone()];
    let mut diffs: Vec<ExtMatrix<F::Elem>> = Vec::new();
    if steps >= 2 {
        let first = match p1.support() {
            None => ExtMatrix::zero(FreeEModule::new(v, Vec::new()), p1.clone()),
            Some((lo, hi)) => {
                let kern: Vec<Vec<Vec<F::Elem>>> = (lo..=hi)
                    .map(|n| {
                        let basis = p1.basis(n);
                        let mut m = Matrix::zeros(f, k.dim_at(n), basis.len());
                        for (col, (j, mu)) in basis.iter().enumerate() {
                            let img = k.act_monomial(f, cover[*j].0, *mu, &cover[*j].1);
                            for (row, c) in img.into_iter().enumerate() {
                                m.set(row, col, c);
                            }
                        }
                        kernel(f, &m)
                    })
                    .collect();
                let dims: Vec<usize> = (lo..=hi).map(|n| p1.dim_at(n)).collect();
                let gens = select_generators(f, lo, &dims, &kern, |n, y, a| p1.mul_right(f, n, y, 1 << a), v);
                cover_map(&p1, &gens, f)
            }
        };
        terms.insert(0, first.source.clone());
        diffs.insert(0, first);
        for _ in 2..steps {
            let next = syzygy_cover(f, &diffs[0]);
            terms.insert(0, next.source.clone());
            diffs.insert(0, next);
        }
    }
    let complex = EComplex::new(v, -(steps as i64), terms, diffs)?;
    Ok(FreeResolution { complex, cover })
}

/// Minimal cofree resolution I^1 → … → I^steps of a finite module via duality.
pub fn min_cofree_resolution<F: Field>(f: &F, c: &FiniteEModule<F::Elem>, steps: usize) -> Result<EComplex<F::Elem>> {
    let res = min_free_resolution(f, &c.dual(f), steps)?;
    Ok(res.complex.dual(f, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::PrimeField;

    #[test]
    fn identity_realizes_as_identity() {
        let f = PrimeField::default();
        let m = FreeEModule::new(2, vec![0, 1]);
        let mut id = ExtMatrix::zero(m.clone(), m.clone());
        id.set(0, 0, ExtElement::scalar(&f, 1)).unwrap();
        id.set(1, 1, ExtElement::scalar(&f, 1)).unwrap();
        for n in -1..5 {
            let r = id.realize(&f, n);
            assert_eq!(r, Matrix::identity(&f, m.dim_at(n)));
        }
    }

    #[test]
    fn multiplication_by_e0_column() {
        let f = PrimeField::default();
        let v = 2;
        let src = FreeEModule::new(v, vec![0]);
        let tgt = FreeEModule::new(v, vec![-1]);
        let mut m = ExtMatrix::zero(src, tgt);
        m.set(0, 0, ExtElement::gen(&f, 0)).unwrap();
        let r = m.realize(&f, 0);
        assert_eq!((r.rows, r.cols), (3, 1));
        assert_eq!(r.data, vec![1, 0, 0]);
    }

    #[test]
    fn kernel_of_e0_has_half_dimension() {
        let f = PrimeField::default();
        for v in 0..4 {
            let m0 = FreeEModule::new(v, vec![0]);
            let m1 = FreeEModule::new(v, vec![-1]);
            let mut m = ExtMatrix::zero(m0, m1);
            m.set(0, 0, ExtElement::gen(&f, 0)).unwrap();
            let k = kernel_module(&f, &m);
            assert_eq!(k.total_dim(), 1 << v);
            assert!(k.check_relations(&f));
        }
    }

    #[test]
    fn resolution_of_residue_field() {
        let f = PrimeField::default();
        for v in 1..3usize {
            let k = FiniteEModule::residue_field(&f, v, 0);
            let res = min_free_resolution(&f, &k, 4).unwrap();
            let c = &res.complex;
            for (idx, t) in c.terms.iter().rev().enumerate() {
                assert_eq!(t.rank(), binomial((idx + v) as i64, v as i64));
            }
            assert!(c.is_minimal());
            c.check_dd(&f).unwrap();
        }
    }

    #[test]
    fn prune_identity_complex() {
        let f = PrimeField::default();
        let m = FreeEModule::new(1, vec![0]);
        let mut id = ExtMatrix::zero(m.clone(), m.clone());
        id.set(0, 0, ExtElement::scalar(&f, 1)).unwrap();
        let c = EComplex::new(1, 0, vec![m.clone(), m], vec![id]).unwrap();
        let p = c.prune(&f);
        assert!(p.terms.iter().all(|t| t.rank() == 0));
        assert_eq!(p.prune(&f), p);
    }
}
