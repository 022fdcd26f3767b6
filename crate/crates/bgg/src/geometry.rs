//! Local analysis through the annihilator subcomplexes Hom_E(Λ(U*), T): fibers, local
//! projective dimension, degeneracy probing, sheaf certification, and projection.

use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexes::{EComplex, FreeEModule};
use crate::exterior::QuotientAlgebraSpec;
use crate::linalg::{kernel, rank, Matrix};
use crate::scalar::Field;
use crate::tate::{Provenance, TateWindow};
use crate::{BggError, Result};

/// A codimension-d subspace U ⊆ W, given by d independent forms spanning its annihilator
/// in V. With d = 1 this is a point of P(W).
pub type SubspaceSpec<E> = QuotientAlgebraSpec<E>;

/// The point with homogeneous coordinates `coords`.
pub fn point<F: Field>(f: &F, coords: Vec<F::Elem>) -> Result<SubspaceSpec<F::Elem>> {
    let v = coords.len().checked_sub(1).ok_or_else(|| BggError::InvalidInput("a point needs coordinates".into()))?;
    QuotientAlgebraSpec::new(f, v, vec![coords])
}

/// Hom_E(E/(θ), −) applied termwise: ω_E(a) becomes ω over the quotient algebra with the
/// same twist, and entries are reduced modulo the θ's.
pub fn hom_annihilator<F: Field>(f: &F, c: &EComplex<F::Elem>, sub: &SubspaceSpec<F::Elem>) -> Result<EComplex<F::Elem>> {
    if sub.v != c.v {
        return Err(BggError::InvalidInput(format!("subspace lives over v = {}, complex over v = {}", sub.v, c.v)));
    }
    let d = sub.codim();
    if d > c.v {
        return Err(BggError::InvalidInput("the subspace must have codimension at most v".into()));
    }
    let red = sub.reducer(f)?;
    let v2 = c.v - d;
    let lift = |t: &FreeEModule| FreeEModule::new(v2, t.degrees.iter().map(|g| g + d as i64).collect());
    let terms: Vec<FreeEModule> = c.terms.iter().map(lift).collect();
    let diffs = c
        .diffs
        .iter()
        .enumerate()
        .map(|(k, m)| m.map_entries(terms[k].clone(), terms[k + 1].clone(), |e| red.reduce(f, e)))
        .collect();
    EComplex::new(v2, c.lo, terms, diffs)
}

/// Right multiplication by a linear form θ from degree n to n+1.
fn right_mult<F: Field>(f: &F, m: &FreeEModule, n: i64, theta: &[F::Elem]) -> Matrix<F::Elem> {
    let src = m.dim_at(n);
    let tgt = m.dim_at(n + 1);
    let mut out = Matrix::zeros(f, tgt, src);
    for col in 0..src {
        let mut x = vec![f.zero(); src];
        x[col] = f.one();
        let mut acc = vec![f.zero(); tgt];
        for (alpha, c) in theta.iter().enumerate() {
            if !f.is_zero(c) {
                f.axpy(&mut acc, c, &m.mul_right(f, n, &x, 1 << alpha));
            }
        }
        for (row, y) in acc.into_iter().enumerate() {
            out.set(row, col, y);
        }
    }
    out
}

/// Basis (as columns) of the common annihilator of the θ's in degree n of `m`.
fn annihilator_basis<F: Field>(f: &F, m: &FreeEModule, n: i64, thetas: &[Vec<F::Elem>]) -> Matrix<F::Elem> {
    let dim = m.dim_at(n);
    let mut rows = Vec::new();
    for th in thetas {
        rows.extend(right_mult(f, m, n, th).to_rows());
    }
    let basis = if thetas.is_empty() {
        (0..dim)
            .map(|i| {
                let mut x = vec![f.zero(); dim];
                x[i] = f.one();
                x
            })
            .collect()
    } else {
        kernel(f, &Matrix::from_rows(rows, dim))
    };
    let mut out = Matrix::zeros(f, dim, basis.len());
    for (c, y) in basis.into_iter().enumerate() {
        for (r, x) in y.into_iter().enumerate() {
            out.set(r, c, x);
        }
    }
    out
}

/// Homology at position p of the annihilator subcomplex, computed directly inside T.
pub fn direct_annihilator_homology<F: Field>(
    f: &F,
    c: &EComplex<F::Elem>,
    thetas: &[Vec<F::Elem>],
    p: i64,
) -> BTreeMap<i64, usize> {
    let Some((lo, hi)) = c.support_at(p) else {
        return BTreeMap::new();
    };
    (lo..=hi)
        .into_par_iter()
        .map(|n| {
            let here = annihilator_basis(f, c.term(p).unwrap(), n, thetas);
            let out_rank = c.diff(p).map_or(0, |d| rank(f, &d.realize(f, n).mul(f, &here)));
            let in_rank = c.diff(p - 1).map_or(0, |d| {
                let prev = annihilator_basis(f, c.term(p - 1).unwrap(), n, thetas);
                rank(f, &d.realize(f, n).mul(f, &prev))
            });
            (n, here.cols - out_rank - in_rank)
        })
        .filter(|(_, h)| *h > 0)
        .collect()
}

fn local_homology<F: Field>(f: &F, t: &EComplex<F::Elem>, sub: &SubspaceSpec<F::Elem>, a: i64) -> Result<BTreeMap<i64, usize>> {
    if !(t.contains(a - 1) && t.contains(a + 1)) {
        return Err(BggError::WindowInsufficient(format!("positions {}..{} are needed, window is [{}, {}]", a - 1, a + 1, t.lo, t.hi())));
    }
    let h = hom_annihilator(f, &t.truncate(a - 1, a + 1), sub)?;
    h.check_dd(f)?;
    Ok(h.homology_at(f, a))
}

/// dim of the fiber at a point: H^a of the annihilator complex in degree −a.
pub fn fiber_rank<F: Field>(f: &F, t: &TateWindow<F::Elem>, pt: &SubspaceSpec<F::Elem>, a: i64) -> Result<usize> {
    check_point(pt)?;
    Ok(local_homology(f, &t.complex, pt, a)?.get(&-a).copied().unwrap_or(0))
}

/// Projective dimension of the stalk: the largest l with H^a in degree −l−a nonzero;
/// `None` when the stalk is zero.
pub fn local_pd<F: Field>(f: &F, t: &TateWindow<F::Elem>, pt: &SubspaceSpec<F::Elem>, a: i64) -> Result<Option<usize>> {
    check_point(pt)?;
    let h = local_homology(f, &t.complex, pt, a)?;
    Ok(pd_from(&h, a))
}

fn pd_from(h: &BTreeMap<i64, usize>, a: i64) -> Option<usize> {
    h.keys().filter(|&&n| n <= -a).map(|&n| (-a - n) as usize).max()
}

fn check_point<E: Clone + Send + Sync>(pt: &SubspaceSpec<E>) -> Result<()> {
    if pt.codim() != 1 {
        return Err(BggError::InvalidInput(format!("a point has codimension 1, got {}", pt.codim())));
    }
    Ok(())
}

/// One sampled point: its coordinates and the annihilator homology at position a.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub point: Vec<String>,
    pub homology: BTreeMap<i64, usize>,
    pub rank: usize,
    pub pd: Option<usize>,
}

fn random_vector<F: Field>(f: &F, rng: &mut ChaCha8Rng, len: usize) -> Vec<F::Elem> {
    loop {
        let x: Vec<F::Elem> = (0..len).map(|_| f.sample(rng)).collect();
        if x.iter().any(|c| !f.is_zero(c)) {
            return x;
        }
    }
}

/// Random nonzero combination of the given forms.
fn random_in_span<F: Field>(f: &F, rng: &mut ChaCha8Rng, forms: &[Vec<F::Elem>], len: usize) -> Vec<F::Elem> {
    if forms.is_empty() {
        return random_vector(f, rng, len);
    }
    loop {
        let c = random_vector(f, rng, forms.len());
        let mut x = vec![f.zero(); len];
        for (ci, th) in c.iter().zip(forms) {
            f.axpy(&mut x, ci, th);
        }
        if x.iter().any(|y| !f.is_zero(y)) {
            return x;
        }
    }
}

fn run_samples<F: Field>(f: &F, c: &EComplex<F::Elem>, a: i64, points: Vec<Vec<F::Elem>>) -> Result<Vec<Sample>> {
    points
        .into_par_iter()
        .map(|x| {
            let pt = QuotientAlgebraSpec::new(f, c.v, vec![x.clone()])?;
            let h = local_homology(f, c, &pt, a)?;
            Ok(Sample {
                point: x.iter().map(|y| f.render(y)).collect(),
                rank: h.get(&-a).copied().unwrap_or(0),
                pd: pd_from(&h, a),
                homology: h,
            })
        })
        .collect()
}

/// Whether a sample is pure: homology only in degree −a.
fn is_pure(s: &Sample, a: i64) -> bool {
    s.homology.keys().all(|&n| n == -a)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub codim: usize,
    pub samples: Vec<Sample>,
    /// Common rank when every sample is pure.
    pub uniform_rank: Option<usize>,
}

impl fmt::Display for ProbeReport {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.samples {
            let pd = s.pd.map_or("-".to_string(), |p| p.to_string());
            writeln!(out, "({}) rank {} pd {}", s.point.join(":"), s.rank, pd)?;
        }
        match self.uniform_rank {
            Some(r) => writeln!(out, "probabilistic ({} samples): degeneracy locus of codim ≥ {} with rank {r}", self.samples.len(), self.codim),
            None => writeln!(out, "probabilistic ({} samples): a nonpure sample was found", self.samples.len()),
        }
    }
}

/// Samples points of P(W/U) for U ⊆ U_0 of codimension one, i.e. forms in the span of
/// the θ's (all of V when d = 0), and records rank and pd at each.
pub fn probe_degeneracy<F: Field>(
    f: &F,
    t: &TateWindow<F::Elem>,
    sub: &SubspaceSpec<F::Elem>,
    a: i64,
    samples: usize,
    seed: u64,
) -> Result<ProbeReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<_> = (0..samples).map(|_| random_in_span(f, &mut rng, &sub.theta, t.v() + 1)).collect();
    let samples = run_samples(f, &t.complex, a, points)?;
    let uniform_rank = match samples.first() {
        Some(s0) if samples.iter().all(|s| is_pure(s, a) && s.rank == s0.rank) => Some(s0.rank),
        _ => None,
    };
    Ok(ProbeReport { codim: sub.codim(), samples, uniform_rank })
}

/// Outcome of the randomized sheaf test on a three-term complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheafVerdict {
    pub samples: usize,
    pub a: i64,
    pub l: usize,
    pub hypothesis_a: bool,
    pub hypothesis_b: bool,
    pub rank: Option<usize>,
    pub locally_free_at_samples: bool,
    pub torsion_free: bool,
    pub fiber_ranks: Vec<usize>,
    pub local_pds: Vec<Option<usize>>,
    pub counterexample: Option<Sample>,
}

impl SheafVerdict {
    pub fn certified(&self) -> bool {
        self.hypothesis_a && self.hypothesis_b && self.rank.is_some()
    }
}

impl fmt::Display for SheafVerdict {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "probabilistic ({} samples): ", self.samples)?;
        if !self.certified() {
            write!(out, "not certified")?;
            if let Some(s) = &self.counterexample {
                write!(out, "; counterexample at ({}) with homology {:?}", s.point.join(":"), s.homology)?;
            }
            return writeln!(out);
        }
        let r = self.rank.unwrap_or(0);
        write!(out, "certifies coherent sheaf, rank {r}, lpd ≤ {}, degeneracy codim ≥ {}", self.l, self.l)?;
        if self.locally_free_at_samples {
            write!(out, "; locally free at all samples")?;
        }
        if self.torsion_free {
            write!(out, "; torsion free, lpd < {}", self.l)?;
        }
        writeln!(out)
    }
}

/// Randomized test of the sheaf criterion on T^{a−1} → T^a → T^{a+1}: (a) for random
/// points the local homology sits in degrees [−a−l, −a]; (b) for points over a random
/// codimension-l U_0 it is concentrated in degree −a with constant dimension.
pub fn certify_sheaf<F: Field>(f: &F, e3: &EComplex<F::Elem>, a: i64, l: usize, samples: usize, seed: u64) -> Result<SheafVerdict> {
    if e3.terms.len() != 3 || e3.lo + 1 != a {
        return Err(BggError::InvalidInput(format!("need a three-term complex centred at position {a}")));
    }
    let report = e3.check_acyclic(f, [a])?;
    if !report.is_exact() {
        return Err(BggError::NotExact(format!("the complex is not exact in the middle: {:?}", report.failures)));
    }
    let v = e3.v;
    if l == 0 || l > v + 1 {
        return Err(BggError::InvalidInput(format!("l must lie in [1, {}]", v + 1)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts_a: Vec<_> = (0..samples).map(|_| random_vector(f, &mut rng, v + 1)).collect();
    let u0: Vec<_> = (0..l).map(|_| random_vector(f, &mut rng, v + 1)).collect();
    let pts_b: Vec<_> = (0..samples).map(|_| random_in_span(f, &mut rng, &u0, v + 1)).collect();
    let sa = run_samples(f, e3, a, pts_a)?;
    let sb = run_samples(f, e3, a, pts_b)?;
    let in_range = |s: &Sample| s.homology.keys().all(|&n| n <= -a && n >= -a - l as i64);
    let hyp_a = sa.iter().all(in_range);
    let rank = sb.first().map(|s| s.rank);
    let hyp_b = sb.iter().all(|s| is_pure(s, a) && Some(s.rank) == rank);
    let counterexample = sa
        .iter()
        .find(|s| !in_range(s))
        .or_else(|| sb.iter().find(|s| !(is_pure(s, a) && Some(s.rank) == rank)))
        .cloned();
    Ok(SheafVerdict {
        samples,
        a,
        l,
        hypothesis_a: hyp_a,
        hypothesis_b: hyp_b,
        rank: if hyp_b { rank } else { None },
        locally_free_at_samples: sa.iter().all(|s| is_pure(s, a)),
        torsion_free: sa.iter().all(|s| s.homology.keys().all(|&n| n > -a - l as i64)),
        fiber_ranks: sa.iter().map(|s| s.rank).collect(),
        local_pds: sa.iter().map(|s| s.pd).collect(),
        counterexample,
    })
}

/// The window of the projected sheaf: the annihilator complex, which must be exact.
pub fn project<F: Field>(f: &F, t: &TateWindow<F::Elem>, sub: &SubspaceSpec<F::Elem>) -> Result<TateWindow<F::Elem>> {
    let h = hom_annihilator(f, &t.complex, sub)?;
    let report = h.check_interior_acyclic(f)?;
    if let Some((p, n, dim)) = report.failures.first() {
        return Err(BggError::SupportMeetsCenter(format!(
            "the projected complex has homology of dimension {dim} at position {p}, degree {n}"
        )));
    }
    Ok(TateWindow {
        field: t.field,
        complex: h,
        provenance: Provenance::Projection { codim: sub.codim(), of: Box::new(t.provenance.clone()) },
    })
}
