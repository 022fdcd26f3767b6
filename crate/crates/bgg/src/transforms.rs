//! Invariants extracted from Tate windows: Hilbert polynomials, rigid complexes, and the
//! term shapes of Beilinson and Walter complexes and of minimal free resolutions.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::complexes::{kernel_module, EComplex};
use crate::linalg::rref;
use crate::scalar::{render_rational, Field, Rationals};
use crate::symmetric::SPolynomial;
use crate::tate::{cohomology_table, regularity, TateWindow};
use crate::{BggError, Result};

/// Generalized binomial coefficient m(m−1)…(m−k+1)/k! for any integer m.
pub fn binomial_poly(m: i64, k: usize) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..k as i64 {
        acc *= BigRational::new(BigInt::from(m - i), BigInt::from(i + 1));
    }
    acc
}

mod rational_strings {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::scalar::{parse_rational, render_rational};

    pub fn serialize<S: Serializer>(xs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(render_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|x| parse_rational(x).map_err(serde::de::Error::custom)).collect()
    }
}

/// χ(n) = Σ_j c_j C(n+v−j, v−j) with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertPolynomial {
    pub v: usize,
    #[serde(with = "rational_strings")]
    pub coefficients: Vec<BigRational>,
}

impl HilbertPolynomial {
    /// Interpolates from the values at n = 0..=v.
    pub fn from_values(v: usize, values: &[BigRational]) -> Self {
        assert_eq!(values.len(), v + 1);
        let q = Rationals;
        let rows = (0..=v)
            .map(|n| {
                let mut row: Vec<BigRational> = (0..=v).map(|j| binomial_poly(n as i64 + (v - j) as i64, v - j)).collect();
                row.push(values[n].clone());
                row
            })
            .collect();
        let ech = rref(&q, rows, v + 2);
        assert_eq!(ech.rank(), v + 1, "binomial basis is a basis");
        let coefficients = ech.rows.iter().map(|r| r[v + 1].clone()).collect();
        HilbertPolynomial { v, coefficients }
    }

    pub fn eval(&self, n: i64) -> BigRational {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(j, c)| c * binomial_poly(n + (self.v - j) as i64, self.v - j))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Integer coefficients as i64 when they all are.
    pub fn integer_coefficients(&self) -> Option<Vec<i64>> {
        self.coefficients.iter().map(crate::scalar::rational_to_i64).collect()
    }
}

impl fmt::Display for HilbertPolynomial {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "χ(n) = ")?;
        let mut first = true;
        for (j, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = self.v - j;
            let neg = *c < BigRational::zero();
            let mag = render_rational(&if neg { -c.clone() } else { c.clone() });
            match (first, neg) {
                (true, true) => write!(out, "-")?,
                (false, true) => write!(out, " - ")?,
                (false, false) => write!(out, " + ")?,
                (true, false) => {}
            }
            first = false;
            if k == 0 {
                write!(out, "{mag}")?;
            } else {
                if mag != "1" {
                    write!(out, "{mag}·")?;
                }
                write!(out, "C(n+{k},{k})")?;
            }
        }
        if first {
            write!(out, "0")?;
        }
        Ok(())
    }
}

/// χ via the kernel of d^p: Σ_q (−1)^{q+p} dim(ker d^p)_q · χO(q+n).
pub fn hilbert_from_kernel<F: Field>(f: &F, t: &TateWindow<F::Elem>, p: i64) -> Result<HilbertPolynomial> {
    let d = t
        .complex
        .diff(p)
        .ok_or_else(|| BggError::WindowInsufficient(format!("no differential leaves position {p} in [{}, {}]", t.lo(), t.hi())))?;
    let v = t.v();
    let k = kernel_module(f, d);
    let values: Vec<BigRational> = (0..=v as i64)
        .map(|n| {
            let mut acc = BigRational::zero();
            for (idx, &dim) in k.dims.iter().enumerate() {
                let q = k.lo + idx as i64;
                let sign = if (q + p).rem_euclid(2) == 0 { 1 } else { -1 };
                acc += binomial_poly(q + n + v as i64, v) * BigRational::from_integer(BigInt::from(sign * dim as i64));
            }
            acc
        })
        .collect();
    Ok(HilbertPolynomial::from_values(v, &values))
}

/// χ(n) as the alternating sum of the multiplicities of ω_E(n) down column n of the table.
pub fn hilbert_from_coranks<E: Clone + Send + Sync>(t: &TateWindow<E>, n: i64) -> Result<i64> {
    let tab = cohomology_table(t);
    let mut acc = 0i64;
    for i in 0..=tab.v {
        let h = tab.get(i, n).ok_or_else(|| {
            BggError::WindowInsufficient(format!("the twist-{n} strand leaves the window [{}, {}]", t.lo(), t.hi()))
        })?;
        acc += if i % 2 == 0 { h as i64 } else { -(h as i64) };
    }
    Ok(acc)
}

/// A linear complex of free S-modules: position `lo + k` is S(twists[k])^{ranks[k]}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidComplex<E> {
    pub v: usize,
    pub lo: i64,
    pub twists: Vec<i64>,
    pub ranks: Vec<usize>,
    /// `diffs[k]` is a ranks[k+1] × ranks[k] matrix of linear forms.
    pub diffs: Vec<Vec<Vec<SPolynomial<E>>>>,
}

impl<E: Clone + Send + Sync> RigidComplex<E> {
    pub fn check_dd<F: Field<Elem = E>>(&self, f: &F) -> bool {
        for k in 1..self.diffs.len() {
            let (a, b) = (&self.diffs[k], &self.diffs[k - 1]);
            for row in a {
                for c in 0..self.ranks[k - 1] {
                    let mut acc = SPolynomial::zero(2);
                    for (j, x) in row.iter().enumerate() {
                        if !x.is_zero() && !b[j][c].is_zero() {
                            acc = acc.add(f, &x.mul(f, &b[j][c]));
                        }
                    }
                    if !acc.is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Σ_k (−1)^{lo+k} rank_k · χO(twist_k + n).
    pub fn euler_characteristic(&self) -> HilbertPolynomial {
        let values: Vec<BigRational> = (0..=self.v as i64)
            .map(|n| {
                let mut acc = BigRational::zero();
                for (k, (&q, &r)) in self.twists.iter().zip(&self.ranks).enumerate() {
                    let sign = if (self.lo + k as i64).rem_euclid(2) == 0 { 1 } else { -1 };
                    acc += binomial_poly(q + n + self.v as i64, self.v) * BigRational::from_integer(BigInt::from(sign * r as i64));
                }
                acc
            })
            .collect();
        HilbertPolynomial::from_values(self.v, &values)
    }

    pub fn to_json<F: Field<Elem = E>>(&self, f: &F) -> Value {
        let diffs: Vec<Value> = self
            .diffs
            .iter()
            .map(|m| Value::Array(m.iter().map(|row| Value::Array(row.iter().map(|p| p.to_json(f)).collect())).collect()))
            .collect();
        json!({"v": self.v, "lo": self.lo, "twists": self.twists, "ranks": self.ranks, "diffs": diffs})
    }
}

/// The rigid complex of ker d^n: position q + n holds S(q) ⊗ (ker d^n)_q, and the
/// differential is Σ_α x_α ⊗ (action of e_α).
pub fn rigid_complex<F: Field>(f: &F, t: &TateWindow<F::Elem>, n: i64) -> Result<RigidComplex<F::Elem>> {
    let d = t
        .complex
        .diff(n)
        .ok_or_else(|| BggError::WindowInsufficient(format!("no differential leaves position {n}")))?;
    let v = t.v();
    let k = kernel_module(f, d);
    let nv = v + 1;
    let diffs = (0..k.dims.len().saturating_sub(1))
        .map(|idx| {
            let (src, tgt) = (k.dims[idx], k.dims[idx + 1]);
            (0..tgt)
                .map(|r| {
                    (0..src)
                        .map(|c| {
                            let terms = (0..=v)
                                .filter(|&a| !f.is_zero(k.action[idx][a].get(r, c)))
                                .map(|a| {
                                    let mut e = vec![0; nv];
                                    e[a] = 1;
                                    (e, k.action[idx][a].get(r, c).clone())
                                })
                                .collect();
                            SPolynomial::from_terms(f, 1, terms).expect("linear")
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(RigidComplex {
        v,
        lo: k.lo + n,
        twists: (0..k.dims.len()).map(|i| k.lo + i as i64).collect(),
        ranks: k.dims.clone(),
        diffs,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeEntry {
    pub position: i64,
    pub twist: i64,
    pub rank: usize,
}

/// Terms ⊕_q S(−q)^{rank} per position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SComplexShape {
    pub v: usize,
    pub label: String,
    pub entries: Vec<ShapeEntry>,
}

impl SComplexShape {
    fn from_homology(v: usize, label: String, homology: &BTreeMap<i64, BTreeMap<i64, usize>>) -> Self {
        let mut entries = Vec::new();
        for (&big_p, by_degree) in homology {
            for (&n, &rank) in by_degree {
                let q = -n;
                entries.push(ShapeEntry { position: big_p - q, twist: q, rank });
            }
        }
        entries.sort_by_key(|e| (std::cmp::Reverse(e.position), e.twist));
        SComplexShape { v, label, entries }
    }

    pub fn get(&self, p: i64, q: i64) -> usize {
        self.entries.iter().filter(|e| e.position == p && e.twist == q).map(|e| e.rank).sum()
    }

    /// Σ_p (−1)^p Σ_q rank · χO(n − q).
    pub fn euler_characteristic(&self, n: i64) -> BigRational {
        self.entries
            .iter()
            .map(|e| {
                let s = if e.position.rem_euclid(2) == 0 { 1 } else { -1 };
                binomial_poly(n - e.twist + self.v as i64, self.v) * BigRational::from_integer(BigInt::from(s * e.rank as i64))
            })
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Shape entries as a Betti table in the usual layout: column i = −p, row j = q + p.
    pub fn betti_layout(&self) -> String {
        if self.entries.is_empty() {
            return format!("{}: zero\n", self.label);
        }
        let cols: Vec<i64> = self.entries.iter().map(|e| -e.position).collect();
        let rows: Vec<i64> = self.entries.iter().map(|e| e.twist + e.position).collect();
        let (c0, c1) = (*cols.iter().min().unwrap(), *cols.iter().max().unwrap());
        let (r0, r1) = (*rows.iter().min().unwrap(), *rows.iter().max().unwrap());
        let mut s = format!("{}\n      ", self.label);
        for c in c0..=c1 {
            s.push_str(&format!("{c:>5}"));
        }
        s.push('\n');
        for r in r0..=r1 {
            s.push_str(&format!("{r:>4}: "));
            for c in c0..=c1 {
                let x = self.get(-c, r - (-c));
                s.push_str(&format!("{:>5}", if x == 0 { ".".to_string() } else { x.to_string() }));
            }
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for SComplexShape {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(out, "{}", self.label)?;
        let mut by_pos: BTreeMap<i64, Vec<&ShapeEntry>> = BTreeMap::new();
        for e in &self.entries {
            by_pos.entry(e.position).or_default().push(e);
        }
        for (p, es) in by_pos {
            let terms: Vec<String> = es.iter().map(|e| format!("S({})^{}", -e.twist, e.rank)).collect();
            writeln!(out, "{p:>4}: {}", terms.join(" ⊕ "))?;
        }
        Ok(())
    }
}

/// Keeps the summands selected by `keep(position, twist)`.
fn select<E: Clone + Send + Sync>(c: &EComplex<E>, keep: impl Fn(i64, i64) -> bool) -> Result<EComplex<E>> {
    let mask: Vec<Vec<bool>> = (c.lo..=c.hi())
        .map(|p| {
            let t = c.term(p).expect("position");
            (0..t.rank()).map(|j| keep(p, t.twist(j))).collect()
        })
        .collect();
    c.subcomplex(&mask)
}

fn homology_range<F: Field>(f: &F, c: &EComplex<F::Elem>, from: i64, to: i64) -> BTreeMap<i64, BTreeMap<i64, usize>> {
    (from..=to).map(|p| (p, c.homology_at(f, p))).filter(|(_, h)| !h.is_empty()).collect()
}

/// Terms of the Beilinson complex of b^{≥r}T: rank(p, q) = dim H^{p+q}(b^{≥r}T)_{−q}.
pub fn beilinson_shape<F: Field>(f: &F, t: &TateWindow<F::Elem>, r: i64) -> Result<SComplexShape> {
    let v = t.v() as i64;
    if t.lo() > r || t.hi() < r + v + 1 {
        return Err(BggError::WindowInsufficient(format!(
            "positions [{r}, {}] are needed, window is [{}, {}]",
            r + v + 1,
            t.lo(),
            t.hi()
        )));
    }
    let b = select(&t.complex, |_, a| a >= r)?.truncate(r, r + v + 1);
    let h = homology_range(f, &b, r, r + v);
    Ok(SComplexShape::from_homology(t.v(), format!("Beilinson shape, r = {r}"), &h))
}

/// Lowest position from which w_{≤r}T is computed: a floor, or one above a vanishing term.
fn walter_start<E: Clone + Send + Sync>(t: &TateWindow<E>, r: usize, floor: Option<i64>) -> Result<i64> {
    if let Some(fl) = floor {
        if fl < t.lo() {
            return Err(BggError::WindowInsufficient(format!("floor {fl} is below the window")));
        }
        return Ok(fl);
    }
    let vanishes = |p: i64| !t.twists(p).keys().any(|&a| p - a <= r as i64);
    (t.lo()..=t.hi()).find(|&p| vanishes(p)).map(|p| p + 1).ok_or_else(|| {
        BggError::WindowInsufficient(format!("w_≤{r} does not vanish anywhere in [{}, {}]; widen the window or give a floor", t.lo(), t.hi()))
    })
}

fn walter_homology<F: Field>(f: &F, t: &TateWindow<F::Elem>, r: usize, floor: Option<i64>) -> Result<BTreeMap<i64, BTreeMap<i64, usize>>> {
    let start = walter_start(t, r, floor)?;
    let reg = regularity(&cohomology_table(t))?;
    if reg.value > t.hi() - 1 {
        return Err(BggError::WindowInsufficient(format!("T is not pure at position {}", t.hi() - 1)));
    }
    let w = select(&t.complex, |p, a| p - a <= r as i64)?.truncate(start, t.hi());
    Ok(homology_range(f, &w, start, t.hi() - 1))
}

/// Terms of the Walter complex of w_{≤r}T. Requires 0 ≤ r ≤ v − 1 − lpd unless a floor is
/// given, in which case w is cut off below it.
pub fn walter_shape<F: Field>(f: &F, t: &TateWindow<F::Elem>, r: usize, lpd: usize, floor: Option<i64>) -> Result<SComplexShape> {
    let v = t.v();
    if floor.is_none() && r + 1 + lpd > v {
        return Err(BggError::Precondition(format!("need 0 ≤ r ≤ v − 1 − lpd, got r = {r}, lpd = {lpd}, v = {v}")));
    }
    let h = walter_homology(f, t, r, floor)?;
    Ok(SComplexShape::from_homology(v, format!("Walter shape, r = {r}"), &h))
}

/// Graded Betti numbers of H^0_*F: β_{p,q} = dim H^{p+q}(w_{≤0}T)_{−q}.
pub fn betti_numbers<F: Field>(f: &F, t: &TateWindow<F::Elem>, floor: Option<i64>) -> Result<SComplexShape> {
    let h = walter_homology(f, t, 0, floor)?;
    Ok(SComplexShape::from_homology(t.v(), "Betti numbers".to_string(), &h))
}
