//! Built-in examples and closed-form oracles.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::complexes::{ExtMatrix, FreeEModule};
use crate::exterior::{binomial, masks_of_degree, ExtElement};
use crate::scalar::Field;
use crate::symmetric::{SPolynomial, SPresentation};
use crate::{BggError, Result};

fn wedge2<F: Field>(f: &F, i: usize, j: usize) -> ExtElement<F::Elem> {
    ExtElement::gen(f, i).wedge(f, &ExtElement::gen(f, j))
}

/// The Horrocks-Mumford differentials (d^0, d^{−1}) over v = 4, entries as displayed.
pub fn horrocks_mumford<F: Field>(f: &F) -> (ExtMatrix<F::Elem>, ExtMatrix<F::Elem>) {
    let v = 4;
    let d0_rows = [[(0, 1), (2, 4)], [(1, 2), (3, 0)], [(2, 3), (4, 1)], [(3, 4), (0, 2)], [(4, 0), (1, 3)]];
    let dm1_cols = [[(2, 4), (1, 0)], [(3, 0), (2, 1)], [(4, 1), (3, 2)], [(0, 2), (4, 3)], [(1, 3), (0, 4)]];
    let t_m1 = FreeEModule::cofree(v, &[-4; 5]);
    let t_0 = FreeEModule::cofree(v, &[-2; 2]);
    let t_1 = FreeEModule::cofree(v, &[0; 5]);
    let d0 = d0_rows
        .iter()
        .map(|row| row.iter().map(|&(i, j)| wedge2(f, i, j)).collect())
        .collect();
    let dm1 = (0..2)
        .map(|r| dm1_cols.iter().map(|col| wedge2(f, col[r].0, col[r].1)).collect())
        .collect();
    let d0 = ExtMatrix::from_entries(f, t_0.clone(), t_1, d0).expect("homogeneous");
    let dm1 = ExtMatrix::from_entries(f, t_m1, t_0, dm1).expect("homogeneous");
    (d0, dm1)
}

/// S(d) on P^v: one generator of degree −d and no relations.
pub fn line_bundle<E: Clone + Send + Sync>(v: usize, d: i64) -> SPresentation<E> {
    SPresentation::free(v, vec![-d])
}

fn cyclic<E: Clone + Send + Sync>(v: usize, rels: Vec<SPolynomial<E>>) -> SPresentation<E> {
    let degs = rels.iter().map(|r| r.degree).collect();
    SPresentation::new(v, vec![0], degs, vec![rels]).expect("valid cyclic presentation")
}

fn x<F: Field>(f: &F, v: usize, i: usize) -> SPolynomial<F::Elem> {
    SPolynomial::var(f, v + 1, i)
}

/// S/(x_1, …, x_v): the point (1:0:…:0).
pub fn point_module<F: Field>(f: &F, v: usize) -> SPresentation<F::Elem> {
    cyclic(v, (1..=v).map(|i| x(f, v, i)).collect())
}

/// S/(x_0x_2 − x_1², x_1x_3 − x_2², x_0x_3 − x_1x_2) on P^3.
pub fn twisted_cubic<F: Field>(f: &F) -> SPresentation<F::Elem> {
    let m1 = f.from_i64(-1);
    let q = |a: usize, b: usize, c: usize, d: usize| {
        x(f, 3, a).mul(f, &x(f, 3, b)).add(f, &x(f, 3, c).mul(f, &x(f, 3, d)).scale(f, &m1))
    };
    cyclic(3, vec![q(0, 2, 1, 1), q(1, 3, 2, 2), q(0, 3, 1, 2)])
}

/// S/(x_2, x_0x_1) on P^2: the points (1:0:0) and (0:1:0).
pub fn two_points<F: Field>(f: &F) -> SPresentation<F::Elem> {
    cyclic(2, vec![x(f, 2, 2), x(f, 2, 0).mul(f, &x(f, 2, 1))])
}

/// A module whose sheaf is Ω^p(p): the cokernel of the Koszul map
/// Λ^{p+2}W ⊗ S(−2) → Λ^{p+1}W ⊗ S(−1).
pub fn twisted_differentials<F: Field>(f: &F, v: usize, p: usize) -> Result<SPresentation<F::Elem>> {
    if p > v {
        return Err(BggError::InvalidInput(format!("Ω^p needs 0 ≤ p ≤ v, got p = {p}, v = {v}")));
    }
    let gens_masks = masks_of_degree(v + 1, p + 1);
    let rel_masks = masks_of_degree(v + 1, p + 2);
    let mut matrix = vec![vec![SPolynomial::zero(1); rel_masks.len()]; gens_masks.len()];
    for (c, &jm) in rel_masks.iter().enumerate() {
        let mut k = 0;
        for bit in 0..=v {
            if jm >> bit & 1 == 0 {
                continue;
            }
            let face = jm & !(1 << bit);
            let row = gens_masks.iter().position(|&g| g == face).expect("face of a subset");
            let sign = f.from_sign(k % 2 == 1);
            matrix[row][c] = x(f, v, bit).scale(f, &sign);
            k += 1;
        }
    }
    SPresentation::new(v, vec![1; gens_masks.len()], vec![2; rel_masks.len()], matrix)
}

/// h^i O(d)(n) on P^v by the closed formula.
pub fn line_bundle_cohomology(v: usize, d: i64, i: usize, n: i64) -> usize {
    let m = d + n;
    let v = v as i64;
    if i == 0 && m >= 0 {
        binomial(m + v, v)
    } else if i as i64 == v && m < -v {
        binomial(-m - 1, v)
    } else {
        0
    }
}

/// Weakly decreasing integer sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition(pub Vec<i64>);

impl Partition {
    pub fn new(parts: Vec<i64>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(BggError::InvalidInput("partition parts must be weakly decreasing".into()));
        }
        Ok(Partition(parts))
    }

    /// (1, …, 1, 0, …, 0) with p ones and v − p zeros.
    pub fn column(v: usize, p: usize) -> Self {
        Partition((0..v).map(|k| if k < p { 1 } else { 0 }).collect())
    }
}

/// dim S_μ W for a weakly decreasing weight μ of length dim W, by the Weyl product formula.
pub fn weyl_dimension(mu: &[i64]) -> BigInt {
    let mut num = BigRational::one();
    for i in 0..mu.len() {
        for j in i + 1..mu.len() {
            let top = mu[i] - mu[j] + (j - i) as i64;
            num *= BigRational::new(BigInt::from(top), BigInt::from((j - i) as i64));
        }
    }
    assert!(num.is_integer(), "Weyl product is integral");
    num.to_integer()
}

/// For S_λ(Ω(1)) on P^v and an integer a: the only r with H^r(… (a − r)) ≠ 0, and that
/// dimension.
pub fn schur_oracle(v: usize, lam: &Partition, a: i64) -> Result<(usize, BigInt)> {
    if lam.0.len() != v {
        return Err(BggError::InvalidInput(format!("partition needs {v} parts")));
    }
    let part = |r: usize| -> Option<i64> {
        if r == 0 || r == v + 1 {
            None
        } else {
            Some(lam.0[r - 1])
        }
    };
    let r = (0..=v)
        .find(|&r| part(r).is_none_or(|l| l > a) && part(r + 1).is_none_or(|l| a >= l))
        .expect("the sentinels make f_λ total");
    let mut mu: Vec<i64> = lam.0[..r].iter().map(|l| l - 1).collect();
    mu.push(a);
    mu.extend_from_slice(&lam.0[r..]);
    Ok((r, weyl_dimension(&mu)))
}

/// Predicted h^i S_λ(Ω(1))(n).
pub fn schur_cell(v: usize, lam: &Partition, i: usize, n: i64) -> Result<BigInt> {
    let (r, dim) = schur_oracle(v, lam, n + i as i64)?;
    Ok(if r == i { dim } else { BigInt::zero() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::PrimeField;

    #[test]
    fn hm_entries_and_composite() {
        let f = PrimeField::default();
        let (d0, dm1) = horrocks_mumford(&f);
        assert_eq!(d0.entry(0, 0), Some(&wedge2(&f, 0, 1)));
        assert_eq!(d0.entry(0, 1), Some(&wedge2(&f, 2, 4)));
        assert_eq!(d0.entry(1, 1).unwrap().terms, vec![(0b01001, f.from_i64(-1))]);
        assert!(d0.compose(&f, &dm1).is_zero());
    }

    #[test]
    fn schur_trivial_partition_is_bott() {
        for v in 1..4 {
            let lam = Partition(vec![0; v]);
            for a in -6..6i64 {
                for i in 0..=v {
                    let n = a - i as i64;
                    assert_eq!(schur_cell(v, &lam, i, n).unwrap(), BigInt::from(line_bundle_cohomology(v, 0, i, n)));
                }
            }
        }
    }

    #[test]
    fn omega_one_on_the_plane() {
        let lam = Partition::column(2, 1);
        assert_eq!(schur_cell(2, &lam, 1, -1).unwrap(), BigInt::from(1));
        assert_eq!(schur_cell(2, &lam, 0, 0).unwrap(), BigInt::from(0));
        assert_eq!(schur_cell(2, &lam, 0, 1).unwrap(), BigInt::from(3));
    }
}
