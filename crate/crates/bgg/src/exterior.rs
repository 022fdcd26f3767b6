//! The exterior algebra E on generators e_0..e_v, its graded dual, and quotient algebras.
//!
//! Monomials are bit masks with factors in ascending index order. Every sign in the
//! crate comes from [`ext_mul`].

use crate::linalg::rref;
use crate::scalar::Field;
use crate::{BggError, Result};

pub type Mask = u32;

/// Largest supported number of exterior generators.
pub const MAX_GENERATORS: usize = 31;

pub fn popcount(m: Mask) -> usize {
    m.count_ones() as usize
}

/// Wedge product of two monomials: `None` when they share a factor, otherwise the union
/// mask and whether the sign is negative.
pub fn ext_mul(a: Mask, b: Mask) -> Option<(Mask, bool)> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (a >> j >> 1).count_ones();
    }
    Some((a | b, inversions % 2 == 1))
}

/// Binomial coefficient as `usize`; zero outside the usual range.
pub fn binomial(n: i64, k: i64) -> usize {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Rank of a mask among masks of the same popcount in increasing numeric order.
pub fn mask_rank(m: Mask) -> usize {
    let mut r = 0;
    let mut rest = m;
    let mut k = 1;
    while rest != 0 {
        let b = rest.trailing_zeros() as i64;
        rest &= rest - 1;
        r += binomial(b, k);
        k += 1;
    }
    r
}

/// All masks over `n` bits with exactly `k` bits set, in increasing order.
pub fn masks_of_degree(n: usize, k: usize) -> Vec<Mask> {
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::with_capacity(binomial(n as i64, k as i64));
    let mut m: u64 = (1u64 << k) - 1;
    while m < (1u64 << n) {
        out.push(m as Mask);
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    out
}

/// Homogeneous element of E: sparse combination of monomials of one degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtElement<E> {
    pub degree: usize,
    /// Sorted by mask, no zero coefficients.
    pub terms: Vec<(Mask, E)>,
}

impl<E: Clone> ExtElement<E> {
    pub fn zero(degree: usize) -> Self {
        ExtElement { degree, terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn monomial<F: Field<Elem = E>>(f: &F, mask: Mask, c: E) -> Self {
        let degree = popcount(mask);
        if f.is_zero(&c) {
            return Self::zero(degree);
        }
        ExtElement { degree, terms: vec![(mask, c)] }
    }

    pub fn scalar<F: Field<Elem = E>>(f: &F, c: E) -> Self {
        Self::monomial(f, 0, c)
    }

    /// The generator e_i.
    pub fn gen<F: Field<Elem = E>>(f: &F, i: usize) -> Self {
        Self::monomial(f, 1 << i, f.one())
    }

    /// Builds an element from unsorted terms, merging duplicates.
    pub fn from_terms<F: Field<Elem = E>>(f: &F, degree: usize, mut terms: Vec<(Mask, E)>) -> Result<Self> {
        if let Some((m, _)) = terms.iter().find(|(m, _)| popcount(*m) != degree) {
            return Err(BggError::DegreeMismatch(format!(
                "monomial {m:#b} in an element of degree {degree}"
            )));
        }
        terms.sort_by_key(|(m, _)| *m);
        let mut out: Vec<(Mask, E)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = f.add(lc, &c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !f.is_zero(c));
        Ok(ExtElement { degree, terms: out })
    }

    /// True for a nonzero element of degree zero.
    pub fn is_unit(&self) -> bool {
        self.degree == 0 && !self.terms.is_empty()
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        debug_assert!(self.is_zero() || other.is_zero() || self.degree == other.degree);
        if self.is_zero() {
            return other.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            if j == other.terms.len() || (i < self.terms.len() && self.terms[i].0 < other.terms[j].0) {
                out.push(self.terms[i].clone());
                i += 1;
            } else if i == self.terms.len() || other.terms[j].0 < self.terms[i].0 {
                out.push(other.terms[j].clone());
                j += 1;
            } else {
                let c = f.add(&self.terms[i].1, &other.terms[j].1);
                if !f.is_zero(&c) {
                    out.push((self.terms[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        ExtElement { degree: self.degree, terms: out }
    }

    pub fn scale<F: Field<Elem = E>>(&self, f: &F, c: &E) -> Self {
        if f.is_zero(c) {
            return Self::zero(self.degree);
        }
        ExtElement { degree: self.degree, terms: self.terms.iter().map(|(m, x)| (*m, f.mul(c, x))).collect() }
    }

    pub fn neg<F: Field<Elem = E>>(&self, f: &F) -> Self {
        ExtElement { degree: self.degree, terms: self.terms.iter().map(|(m, x)| (*m, f.neg(x))).collect() }
    }

    pub fn wedge<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        let degree = self.degree + other.degree;
        let mut terms = Vec::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if let Some((m, neg)) = ext_mul(*a, *b) {
                    let c = f.mul(x, y);
                    terms.push((m, if neg { f.neg(&c) } else { c }));
                }
            }
        }
        Self::from_terms(f, degree, terms).expect("homogeneous product")
    }

    /// The reversion anti-automorphism: e_T ↦ (−1)^{C(|T|,2)} e_T, so rev(ab) = rev(b) rev(a).
    pub fn reversed<F: Field<Elem = E>>(&self, f: &F) -> Self {
        if (self.degree * self.degree.saturating_sub(1) / 2) % 2 == 1 {
            self.neg(f)
        } else {
            self.clone()
        }
    }

    pub fn coefficient(&self, m: Mask) -> Option<&E> {
        self.terms.binary_search_by_key(&m, |(k, _)| *k).ok().map(|i| &self.terms[i].1)
    }

    /// Renders as e.g. `e0e1-2e2e4`.
    pub fn render<F: Field<Elem = E>>(&self, f: &F) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let mut coef = f.render(c);
            let mono: String = (0..32).filter(|i| m >> i & 1 == 1).map(|i| format!("e{i}")).collect();
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
}

/// Element of the graded dual ω_E: combination of dual monomials e*_S, where e*_S has
/// degree −|S| and pairs to one with e_S.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaElement<E> {
    pub degree: i64,
    pub terms: Vec<(Mask, E)>,
}

impl<E: Clone> OmegaElement<E> {
    pub fn dual_monomial<F: Field<Elem = E>>(f: &F, mask: Mask) -> Self {
        OmegaElement { degree: -(popcount(mask) as i64), terms: vec![(mask, f.one())] }
    }
}

/// The pairing of Λ^p V with its dual: ⟨e_R, e*_S⟩ = δ_{RS}.
pub fn pairing<F: Field>(f: &F, w: &ExtElement<F::Elem>, alpha: &OmegaElement<F::Elem>) -> F::Elem {
    let mut acc = f.zero();
    for (m, x) in &w.terms {
        if let Some((_, y)) = alpha.terms.iter().find(|(k, _)| k == m) {
            acc = f.add(&acc, &f.mul(x, y));
        }
    }
    acc
}

/// The action of E on ω_E, characterised by ⟨w, u·α⟩ = ⟨w∧u, α⟩:
/// e_T · e*_S = sign(S∖T, T) e*_{S∖T} when T ⊆ S, and zero otherwise.
pub fn contract<F: Field>(
    f: &F,
    u: &ExtElement<F::Elem>,
    alpha: &OmegaElement<F::Elem>,
) -> Result<OmegaElement<F::Elem>> {
    let degree = alpha.degree + u.degree as i64;
    if degree > 0 {
        return Err(BggError::DegreeMismatch(format!(
            "cannot contract a degree {} element into degree {}",
            u.degree, alpha.degree
        )));
    }
    let mut terms: Vec<(Mask, F::Elem)> = Vec::new();
    for (t, x) in &u.terms {
        for (s, y) in &alpha.terms {
            if t & s != *t {
                continue;
            }
            let r = s & !t;
            let (_, neg) = ext_mul(r, *t).expect("disjoint");
            let c = f.mul(x, y);
            terms.push((r, if neg { f.neg(&c) } else { c }));
        }
    }
    let merged = ExtElement::from_terms(f, (-degree) as usize, terms)?;
    Ok(OmegaElement { degree, terms: merged.terms })
}

/// Transport ω_E ≅ E·e*_top: e*_R = sign(R, R^c) e_{R^c} · e*_top.
pub fn omega_to_free<F: Field>(f: &F, v: usize, alpha: &OmegaElement<F::Elem>) -> ExtElement<F::Elem> {
    let full: Mask = ((1u64 << (v + 1)) - 1) as Mask;
    let terms = alpha
        .terms
        .iter()
        .map(|(r, c)| {
            let (_, neg) = ext_mul(*r, full & !r).expect("disjoint");
            (full & !r, if neg { f.neg(c) } else { c.clone() })
        })
        .collect();
    ExtElement::from_terms(f, v + 1 - (-alpha.degree) as usize, terms).expect("homogeneous")
}

/// Inverse of [`omega_to_free`]: e_T ↦ e_T · e*_top = sign(T^c, T) e*_{T^c}.
pub fn free_to_omega<F: Field>(f: &F, v: usize, x: &ExtElement<F::Elem>) -> OmegaElement<F::Elem> {
    let full: Mask = ((1u64 << (v + 1)) - 1) as Mask;
    let terms: Vec<_> = x
        .terms
        .iter()
        .map(|(t, c)| {
            let (_, neg) = ext_mul(full & !t, *t).expect("disjoint");
            (full & !t, if neg { f.neg(c) } else { c.clone() })
        })
        .collect();
    let merged = ExtElement::from_terms(f, v + 1 - x.degree, terms).expect("homogeneous");
    OmegaElement { degree: -((v + 1 - x.degree) as i64), terms: merged.terms }
}

/// Dimension of ω_E(a) in internal degree q.
pub fn omega_dim(v: usize, a: i64, q: i64) -> usize {
    binomial(v as i64 + 1, -(a + q))
}

/// The quotient E → Λ(U*) = E/(θ_1..θ_d) for independent linear forms θ_k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientAlgebraSpec<E> {
    pub v: usize,
    /// Each form as a coordinate vector of length v+1 over e_0..e_v.
    pub theta: Vec<Vec<E>>,
}

/// Precomputed reduction map onto the quotient exterior algebra on v−d+1 generators.
#[derive(Clone, Debug)]
pub struct Reducer<E> {
    pub v: usize,
    pub quotient_v: isize,
    /// Image of e_k as a linear form over the quotient generators f_0..f_{v−d}.
    images: Vec<ExtElement<E>>,
    /// Original indices whose images are the quotient generators.
    pub complement: Vec<usize>,
}

impl<E: Clone + Send + Sync> QuotientAlgebraSpec<E> {
    pub fn new<F: Field<Elem = E>>(f: &F, v: usize, theta: Vec<Vec<E>>) -> Result<Self> {
        let spec = QuotientAlgebraSpec { v, theta };
        spec.reducer(f)?;
        Ok(spec)
    }

    pub fn codim(&self) -> usize {
        self.theta.len()
    }

    /// Changes basis so the θ's become trailing coordinates and returns the reduction map.
    pub fn reducer<F: Field<Elem = E>>(&self, f: &F) -> Result<Reducer<E>> {
        let n = self.v + 1;
        if let Some(t) = self.theta.iter().find(|t| t.len() != n) {
            return Err(BggError::InvalidInput(format!("linear form of length {} over {n} variables", t.len())));
        }
        let ech = rref(f, self.theta.clone(), n);
        if ech.rank() != self.theta.len() {
            return Err(BggError::InvalidInput("linear forms are not independent".into()));
        }
        let complement = ech.free_columns();
        let mut position = vec![usize::MAX; n];
        for (l, &c) in complement.iter().enumerate() {
            position[c] = l;
        }
        let mut images = vec![ExtElement::zero(1); n];
        for (l, &c) in complement.iter().enumerate() {
            images[c] = ExtElement::gen(f, l);
        }
        for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
            let terms = complement
                .iter()
                .filter(|&&c| !f.is_zero(&row[c]))
                .map(|&c| (1 << position[c], f.neg(&row[c])))
                .collect();
            images[p] = ExtElement::from_terms(f, 1, terms)?;
        }
        Ok(Reducer { v: self.v, quotient_v: complement.len() as isize - 1, images, complement })
    }
}

impl<E: Clone> Reducer<E> {
    /// Image of `x` in the quotient algebra, written over its own generators.
    pub fn reduce<F: Field<Elem = E>>(&self, f: &F, x: &ExtElement<E>) -> ExtElement<E> {
        let mut out = ExtElement::zero(x.degree);
        for (m, c) in &x.terms {
            let mut acc = ExtElement::scalar(f, c.clone());
            for k in 0..=self.v {
                if m >> k & 1 == 1 {
                    acc = acc.wedge(f, &self.images[k]);
                    if acc.is_zero() {
                        break;
                    }
                }
            }
            out = out.add(f, &acc);
        }
        out.degree = x.degree;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::PrimeField;

    #[test]
    fn wedge_signs() {
        assert_eq!(ext_mul(0b01, 0b10), Some((0b11, false)));
        assert_eq!(ext_mul(0b10, 0b01), Some((0b11, true)));
        assert_eq!(ext_mul(0b01, 0b01), None);
        assert_eq!(ext_mul(0b101, 0b010), Some((0b111, true)));
    }

    #[test]
    fn mask_enumeration_and_rank() {
        for n in 0..7 {
            for k in 0..=n {
                let ms = masks_of_degree(n, k);
                assert_eq!(ms.len(), binomial(n as i64, k as i64));
                for (i, m) in ms.iter().enumerate() {
                    assert_eq!(mask_rank(*m), i);
                    assert_eq!(popcount(*m), k);
                }
            }
        }
    }

    #[test]
    fn contraction_examples() {
        let f = PrimeField::default();
        let e0 = ExtElement::gen(&f, 0);
        let e2 = ExtElement::gen(&f, 2);
        let a = OmegaElement::dual_monomial(&f, 0b11);
        let r = contract(&f, &e0, &a).unwrap();
        assert_eq!(r.degree, -1);
        assert_eq!(r.terms, vec![(0b10, f.neg(&1))]);
        assert!(contract(&f, &e2, &a).unwrap().terms.is_empty());
        let one = ExtElement::scalar(&f, 1);
        assert_eq!(contract(&f, &one, &a).unwrap(), a);
        let e012 = ExtElement::monomial(&f, 0b111, 1);
        assert!(contract(&f, &e012, &a).is_err());
    }

    #[test]
    fn reduction_examples() {
        let f = PrimeField::default();
        let v = 3;
        let theta = vec![vec![0, 0, 0, 1]];
        let q = QuotientAlgebraSpec::new(&f, v, theta).unwrap();
        let r = q.reducer(&f).unwrap();
        let e0ev = ExtElement::monomial(&f, 0b1001, 1);
        assert!(r.reduce(&f, &e0ev).is_zero());
        let e01 = ExtElement::monomial(&f, 0b0011, 1);
        assert_eq!(r.reduce(&f, &e01), e01);
        let s = ExtElement::from_terms(&f, 1, vec![(0b0001, 1), (0b1000, 1)]).unwrap();
        assert_eq!(r.reduce(&f, &s), ExtElement::gen(&f, 0));
    }
}
