//! Graded pieces and multiplication maps of modules over S = k[x_0..x_v] given by a
//! presentation matrix. Everything is degreewise linear algebra.

use std::collections::HashMap;

use serde_json::{json, Value};

use crate::exterior::binomial;
use crate::linalg::{rref, Echelon, Matrix};
use crate::scalar::Field;
use crate::{BggError, Result};

pub type Exponents = Vec<u32>;

/// Monomials of degree `d` in `n` variables, graded-lex order (x_0 largest).
pub fn monomials(n: usize, d: i64) -> Vec<Exponents> {
    if d < 0 || n == 0 {
        return if d == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Exponents>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for a in (0..=left).rev() {
            cur[i] = a;
            rec(i + 1, left - a, cur, out);
        }
    }
    rec(0, d as u32, &mut cur, &mut out);
    out
}

/// Monomial basis of S_d with reverse lookup.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    pub monos: Vec<Exponents>,
    index: HashMap<Exponents, usize>,
}

impl MonomialBasis {
    pub fn new(n: usize, d: i64) -> Self {
        let monos = monomials(n, d);
        let index = monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        MonomialBasis { monos, index }
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn index_of(&self, m: &[u32]) -> Option<usize> {
        self.index.get(m).copied()
    }
}

/// Homogeneous polynomial in S.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SPolynomial<E> {
    pub degree: i64,
    pub terms: Vec<(Exponents, E)>,
}

impl<E: Clone> SPolynomial<E> {
    pub fn zero(degree: i64) -> Self {
        SPolynomial { degree, terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn var<F: Field<Elem = E>>(f: &F, n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        SPolynomial { degree: 1, terms: vec![(e, f.one())] }
    }

    pub fn from_terms<F: Field<Elem = E>>(f: &F, degree: i64, terms: Vec<(Exponents, E)>) -> Result<Self> {
        let mut acc: Vec<(Exponents, E)> = Vec::new();
        for (e, c) in terms {
            let d: i64 = e.iter().map(|&x| x as i64).sum();
            if d != degree {
                return Err(BggError::DegreeMismatch(format!(
                    "monomial {e:?} has degree {d}, expected {degree}"
                )));
            }
            match acc.iter_mut().find(|(k, _)| *k == e) {
                Some((_, x)) => *x = f.add(x, &c),
                None => acc.push((e, c)),
            }
        }
        acc.retain(|(_, c)| !f.is_zero(c));
        acc.sort_by(|a, b| b.0.cmp(&a.0));
        Ok(SPolynomial { degree, terms: acc })
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::from_terms(f, self.degree, terms).expect("same degree")
    }

    pub fn mul<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        let mut terms = Vec::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let e: Exponents = a.iter().zip(b).map(|(p, q)| p + q).collect();
                terms.push((e, f.mul(x, y)));
            }
        }
        Self::from_terms(f, self.degree + other.degree, terms).expect("homogeneous")
    }

    pub fn scale<F: Field<Elem = E>>(&self, f: &F, c: &E) -> Self {
        let terms = self.terms.iter().map(|(e, x)| (e.clone(), f.mul(c, x))).collect();
        Self::from_terms(f, self.degree, terms).expect("homogeneous")
    }

    pub fn render<F: Field<Elem = E>>(&self, f: &F) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let mut coef = f.render(c);
            let mono: String = e
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(i, &a)| if a == 1 { format!("x{i}") } else { format!("x{i}^{a}") })
                .collect();
            if coef.starts_with('-') {
                s.push('-');
                coef.remove(0);
            } else if k > 0 {
                s.push('+');
            }
            if coef != "1" || mono.is_empty() {
                s.push_str(&coef);
            }
            s.push_str(&mono);
        }
        s
    }

    pub fn to_json<F: Field<Elem = E>>(&self, f: &F) -> Value {
        Value::Array(self.terms.iter().map(|(e, c)| json!([f.to_json(c), e])).collect())
    }
}

/// M = coker(⊕_j S(−a_j) → ⊕_i S(−b_i)) with matrix entries φ_{ij} of degree a_j − b_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SPresentation<E> {
    pub v: usize,
    pub gens: Vec<i64>,
    pub rels: Vec<i64>,
    /// `matrix[i][j]`, rows indexed by generators, columns by relations.
    pub matrix: Vec<Vec<SPolynomial<E>>>,
}

impl<E: Clone + Send + Sync> SPresentation<E> {
    pub fn new(v: usize, gens: Vec<i64>, rels: Vec<i64>, matrix: Vec<Vec<SPolynomial<E>>>) -> Result<Self> {
        let p = SPresentation { v, gens, rels, matrix };
        p.validate()?;
        Ok(p)
    }

    pub fn free(v: usize, gens: Vec<i64>) -> Self {
        let matrix = vec![Vec::new(); gens.len()];
        SPresentation { v, gens, rels: Vec::new(), matrix }
    }

    pub fn nvars(&self) -> usize {
        self.v + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.matrix.len() != self.gens.len() {
            return Err(BggError::InvalidInput(format!(
                "matrix has {} rows but there are {} generators",
                self.matrix.len(),
                self.gens.len()
            )));
        }
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != self.rels.len() {
                return Err(BggError::InvalidInput(format!(
                    "row {i} has {} entries but there are {} relations",
                    row.len(),
                    self.rels.len()
                )));
            }
            for (j, p) in row.iter().enumerate() {
                let want = self.rels[j] - self.gens[i];
                if !p.is_zero() && p.degree != want {
                    return Err(BggError::DegreeMismatch(format!(
                        "entry ({i},{j}) has degree {} but relation degree minus generator degree is {want}",
                        p.degree
                    )));
                }
                if p.terms.iter().any(|(e, _)| e.len() != self.nvars()) {
                    return Err(BggError::InvalidInput(format!("entry ({i},{j}) has wrong number of variables")));
                }
            }
        }
        Ok(())
    }

    /// Parses `{"v":..,"gens":[..],"rels":[..],"matrix":[[[[c,[e0..ev]],..],..],..]}`;
    /// `v` may be omitted when some entry has a term.
    pub fn from_json<F: Field<Elem = E>>(f: &F, doc: &Value) -> Result<Self> {
        let bad = |m: &str| BggError::InvalidInput(m.to_string());
        let ints = |key: &str| -> Result<Vec<i64>> {
            doc.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| bad(&format!("missing array '{key}'")))?
                .iter()
                .map(|x| x.as_i64().ok_or_else(|| bad(&format!("'{key}' must hold integers"))))
                .collect()
        };
        let gens = ints("gens")?;
        let rels = ints("rels")?;
        let rows = doc.get("matrix").and_then(Value::as_array).ok_or_else(|| bad("missing array 'matrix'"))?;
        let mut v = doc.get("v").and_then(Value::as_u64).map(|x| x as usize);
        let mut parsed = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_array().ok_or_else(|| bad("matrix rows must be arrays"))?;
            let mut out = Vec::with_capacity(row.len());
            for (j, entry) in row.iter().enumerate() {
                let entry = entry.as_array().ok_or_else(|| bad("matrix entries must be term lists"))?;
                let mut terms = Vec::with_capacity(entry.len());
                for t in entry {
                    let pair = t.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("terms are [c, [exponents]]"))?;
                    let c = f.from_json(&pair[0])?;
                    let e: Exponents = pair[1]
                        .as_array()
                        .ok_or_else(|| bad("exponents must be an array"))?
                        .iter()
                        .map(|x| x.as_u64().map(|k| k as u32).ok_or_else(|| bad("exponents are nonnegative")))
                        .collect::<Result<_>>()?;
                    match v {
                        None => v = Some(e.len().checked_sub(1).ok_or_else(|| bad("empty exponent vector"))?),
                        Some(vv) if vv + 1 != e.len() => return Err(bad("inconsistent number of variables")),
                        _ => {}
                    }
                    terms.push((e, c));
                }
                let want = rels.get(j).copied().unwrap_or(0) - gens.get(i).copied().unwrap_or(0);
                out.push(SPolynomial::from_terms(f, want, terms)?);
            }
            parsed.push(out);
        }
        let v = v.ok_or_else(|| bad("cannot infer 'v'; please provide it"))?;
        SPresentation::new(v, gens, rels, parsed)
    }

    pub fn to_json<F: Field<Elem = E>>(&self, f: &F) -> Value {
        let matrix: Vec<Value> =
            self.matrix.iter().map(|row| Value::Array(row.iter().map(|p| p.to_json(f)).collect())).collect();
        json!({"v": self.v, "gens": self.gens, "rels": self.rels, "matrix": matrix})
    }

    fn ambient_offsets(&self, d: i64) -> (Vec<usize>, Vec<MonomialBasis>, usize) {
        let mut offsets = Vec::with_capacity(self.gens.len());
        let mut bases = Vec::with_capacity(self.gens.len());
        let mut total = 0;
        for &b in &self.gens {
            offsets.push(total);
            let basis = MonomialBasis::new(self.nvars(), d - b);
            total += basis.len();
            bases.push(basis);
        }
        (offsets, bases, total)
    }
}

/// The degree-d part M_d, with a basis of coset representatives.
#[derive(Clone, Debug)]
pub struct GradedPiece<E> {
    pub degree: i64,
    pub ambient_dim: usize,
    offsets: Vec<usize>,
    bases: Vec<MonomialBasis>,
    image: Echelon<E>,
    /// Ambient coordinates (generator block, monomial) chosen as the basis of M_d.
    pub basis: Vec<usize>,
    coordinate: HashMap<usize, usize>,
}

impl<E: Clone + Send + Sync> GradedPiece<E> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates in the chosen basis of the class of an ambient vector.
    pub fn project<F: Field<Elem = E>>(&self, f: &F, mut x: Vec<E>) -> Vec<E> {
        self.image.reduce(f, &mut x);
        self.basis.iter().map(|&k| x[k].clone()).collect()
    }

    /// Ambient index of generator `i` times monomial `m`.
    pub fn ambient_index(&self, i: usize, m: &[u32]) -> Option<usize> {
        self.bases[i].index_of(m).map(|k| self.offsets[i] + k)
    }

    /// Generator block and monomial of an ambient index.
    pub fn locate(&self, k: usize) -> (usize, &Exponents) {
        let i = (0..self.offsets.len())
            .find(|&g| k >= self.offsets[g] && k < self.offsets[g] + self.bases[g].len())
            .expect("ambient index in range");
        (i, &self.bases[i].monos[k - self.offsets[i]])
    }

    pub fn coordinate_of(&self, ambient: usize) -> Option<usize> {
        self.coordinate.get(&ambient).copied()
    }
}

/// Realizes M_d: ambient ⊕_i S_{d−b_i} modulo the span of the relations times monomials.
pub fn graded_piece<F: Field>(f: &F, pres: &SPresentation<F::Elem>, d: i64) -> GradedPiece<F::Elem> {
    let (offsets, bases, total) = pres.ambient_offsets(d);
    let n = pres.nvars();
    let mut rows = Vec::new();
    for (j, &a) in pres.rels.iter().enumerate() {
        for m in monomials(n, d - a) {
            let mut x = vec![f.zero(); total];
            let mut nonzero = false;
            for i in 0..pres.gens.len() {
                for (e, c) in &pres.matrix[i][j].terms {
                    let prod: Exponents = e.iter().zip(&m).map(|(p, q)| p + q).collect();
                    if let Some(k) = bases[i].index_of(&prod) {
                        x[offsets[i] + k] = f.add(&x[offsets[i] + k], c);
                        nonzero = true;
                    }
                }
            }
            if nonzero {
                rows.push(x);
            }
        }
    }
    let image = rref(f, rows, total);
    let basis = image.free_columns();
    let coordinate = basis.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    GradedPiece { degree: d, ambient_dim: total, offsets, bases, image, basis, coordinate }
}

/// Matrices of multiplication by x_0..x_v from M_d to M_{d+1} in the chosen bases.
pub fn mult_map<F: Field>(
    f: &F,
    pres: &SPresentation<F::Elem>,
    src: &GradedPiece<F::Elem>,
    tgt: &GradedPiece<F::Elem>,
) -> Vec<Matrix<F::Elem>> {
    assert_eq!(src.degree + 1, tgt.degree);
    (0..pres.nvars())
        .map(|alpha| {
            let mut m = Matrix::zeros(f, tgt.dim(), src.dim());
            for (col, &k) in src.basis.iter().enumerate() {
                let (i, mono) = src.locate(k);
                let mut prod = mono.clone();
                prod[alpha] += 1;
                let mut x = vec![f.zero(); tgt.ambient_dim];
                let idx = tgt.ambient_index(i, &prod).expect("monomial of the next degree");
                x[idx] = f.one();
                for (row, c) in tgt.project(f, x).into_iter().enumerate() {
                    m.set(row, col, c);
                }
            }
            m
        })
        .collect()
}

/// Expected dim M_d from the binomial count and the rank of the relation image.
pub fn expected_dim<E: Clone + Send + Sync>(pres: &SPresentation<E>, d: i64, image_rank: usize) -> usize {
    let n = pres.nvars() as i64;
    pres.gens.iter().map(|&b| binomial(d - b + n - 1, n - 1)).sum::<usize>() - image_rank
}

impl<E: Clone + Send + Sync> GradedPiece<E> {
    pub fn image_rank(&self) -> usize {
        self.image.rank()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::PrimeField;

    fn var(f: &PrimeField, n: usize, i: usize) -> SPolynomial<u32> {
        SPolynomial::var(f, n, i)
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(3, 2).len(), 6);
        assert_eq!(monomials(3, 2)[0], vec![2, 0, 0]);
        assert_eq!(monomials(2, -1).len(), 0);
    }

    #[test]
    fn pieces() {
        let f = PrimeField::default();
        let s = SPresentation::free(2, vec![0]);
        assert_eq!(graded_piece(&f, &s, 2).dim(), 6);
        let pt = SPresentation::new(2, vec![0], vec![1, 1], vec![vec![var(&f, 3, 1), var(&f, 3, 2)]]).unwrap();
        assert_eq!(graded_piece(&f, &pt, 5).dim(), 1);
        let m = SPresentation::new(1, vec![1, 1], vec![2], vec![vec![var(&f, 2, 0)], vec![var(&f, 2, 1)]]).unwrap();
        assert_eq!(graded_piece(&f, &m, 1).dim(), 2);
        assert_eq!(graded_piece(&f, &m, 2).dim(), 3);
    }

    #[test]
    fn point_multiplication() {
        let f = PrimeField::default();
        let pt = SPresentation::new(2, vec![0], vec![1, 1], vec![vec![var(&f, 3, 1), var(&f, 3, 2)]]).unwrap();
        for d in 0..4 {
            let a = graded_piece(&f, &pt, d);
            let b = graded_piece(&f, &pt, d + 1);
            let ms = mult_map(&f, &pt, &a, &b);
            assert_eq!(ms[0].data, vec![1]);
            assert_eq!(ms[1].data, vec![0]);
            assert_eq!(ms[2].data, vec![0]);
        }
    }

    #[test]
    fn free_multiplication_on_the_line() {
        let f = PrimeField::default();
        let s = SPresentation::free(1, vec![0]);
        let a = graded_piece(&f, &s, 0);
        let b = graded_piece(&f, &s, 1);
        let ms = mult_map(&f, &s, &a, &b);
        assert_eq!(ms[0].data, vec![1, 0]);
        assert_eq!(ms[1].data, vec![0, 1]);
    }

    #[test]
    fn degree_mismatch_rejected() {
        let f = PrimeField::default();
        let r = SPresentation::new(1, vec![0], vec![2], vec![vec![var(&f, 2, 0)]]);
        assert!(matches!(r, Err(BggError::DegreeMismatch(_))));
    }
}
