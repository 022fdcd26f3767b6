#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bgg::scalar::{Field, PrimeField};
use bgg::symmetric::{monomials, SPolynomial, SPresentation};

pub const P: u64 = 32003;

fn inv(a: u64) -> u64 {
    let (mut r, mut b, mut e) = (1u64, a % P, P - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    r
}

/// Row echelon form over F_P; returns (rows, pivot columns).
fn echelon(mut rows: Vec<Vec<u64>>) -> (Vec<Vec<u64>>, Vec<usize>) {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut piv = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(i) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(i, r);
        let s = inv(rows[r][c]);
        for x in rows[r].iter_mut() {
            *x = *x * s % P;
        }
        let pivot = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k != r && row[c] != 0 {
                let m = row[c];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + P - m * y % P) % P;
                }
            }
        }
        piv.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, piv)
}

fn rank_of(rows: Vec<Vec<u64>>) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    echelon(rows).1.len()
}

fn monos(n: usize, d: i64) -> Vec<Vec<u32>> {
    if d < 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for a in 0..=left {
            cur[i] = a;
            rec(i + 1, left - a, cur, out);
        }
    }
    if n == 0 {
        return if d == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    rec(0, d as u32, &mut cur, &mut out);
    out
}

/// A cyclic module S/I over F_P, with ideal generators as (exponent, coefficient) lists.
pub struct Cyclic {
    pub n: usize,
    pub gens: Vec<(i64, Vec<(Vec<u32>, u64)>)>,
}

/// M_d: monomials, reduction data, and the coordinates of the quotient.
struct Piece {
    index: HashMap<Vec<u32>, usize>,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
    free: Vec<usize>,
}

impl Piece {
    fn coords(&self, mut x: Vec<u64>) -> Vec<u64> {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if x[p] != 0 {
                let m = x[p];
                for (a, b) in x.iter_mut().zip(row) {
                    *a = (*a + P - m * b % P) % P;
                }
            }
        }
        self.free.iter().map(|&c| x[c]).collect()
    }
}

impl Cyclic {
    fn piece(&self, d: i64) -> Piece {
        let ms = monos(self.n, d);
        let index: HashMap<Vec<u32>, usize> = ms.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut rows = Vec::new();
        for (deg, g) in &self.gens {
            for m in monos(self.n, d - deg) {
                let mut x = vec![0u64; ms.len()];
                for (e, c) in g {
                    let prod: Vec<u32> = e.iter().zip(&m).map(|(a, b)| a + b).collect();
                    let k = index[&prod];
                    x[k] = (x[k] + c) % P;
                }
                rows.push(x);
            }
        }
        let (rows, pivots) = if rows.is_empty() { (Vec::new(), Vec::new()) } else { echelon(rows) };
        let free = (0..ms.len()).filter(|c| !pivots.contains(c)).collect();
        Piece { index, rows, pivots, free }
    }

    /// β_{i,j} = dim Tor_i(M, k)_j from the Koszul complex Λ^i k^n ⊗ M_{j−i}.
    pub fn betti(&self, max_degree: i64) -> BTreeMap<(usize, i64), usize> {
        let n = self.n;
        let pieces: Vec<Piece> = (0..=max_degree).map(|d| self.piece(d)).collect();
        let subsets = |k: usize| -> Vec<Vec<usize>> {
            (0u32..1 << n).filter(|m| m.count_ones() as usize == k).map(|m| (0..n).filter(|&b| m >> b & 1 == 1).collect()).collect()
        };
        let mut out = BTreeMap::new();
        for j in 0..=max_degree {
            let dim = |i: usize| -> usize {
                let d = j - i as i64;
                if d < 0 || d > max_degree {
                    0
                } else {
                    subsets(i).len() * pieces[d as usize].free.len()
                }
            };
            let boundary = |i: usize| -> Vec<Vec<u64>> {
                let d = j - i as i64;
                if i == 0 || d < 0 || d + 1 > max_degree {
                    return Vec::new();
                }
                let (src, tgt) = (&pieces[d as usize], &pieces[d as usize + 1]);
                let src_monos: Vec<Vec<u32>> = {
                    let mut v: Vec<_> = src.index.iter().collect();
                    v.sort_by_key(|(_, &k)| k);
                    v.into_iter().map(|(m, _)| m.clone()).collect()
                };
                let tgt_sets = subsets(i - 1);
                let mut cols = Vec::new();
                for s in subsets(i) {
                    for &fc in &src.free {
                        let mut img = vec![0u64; tgt_sets.len() * tgt.free.len()];
                        for (k, &b) in s.iter().enumerate() {
                            let face: Vec<usize> = s.iter().copied().filter(|&x| x != b).collect();
                            let fi = tgt_sets.iter().position(|t| *t == face).unwrap();
                            let mut m = src_monos[fc].clone();
                            m[b] += 1;
                            let mut x = vec![0u64; tgt.index.len()];
                            x[tgt.index[&m]] = if k % 2 == 0 { 1 } else { P - 1 };
                            for (c, y) in tgt.coords(x).into_iter().enumerate() {
                                let slot = &mut img[fi * tgt.free.len() + c];
                                *slot = (*slot + y) % P;
                            }
                        }
                        cols.push(img);
                    }
                }
                cols
            };
            for i in 0..=n {
                let di = dim(i);
                if di == 0 {
                    continue;
                }
                let out_rank = rank_of(boundary(i));
                let in_rank = if i < n { rank_of(boundary(i + 1)) } else { 0 };
                let b = di - out_rank - in_rank;
                if b > 0 {
                    out.insert((i, j), b);
                }
            }
        }
        out
    }
}

pub fn point_on_plane() -> Cyclic {
    Cyclic { n: 3, gens: vec![(1, vec![(vec![0, 1, 0], 1)]), (1, vec![(vec![0, 0, 1], 1)])] }
}

pub fn twisted_cubic() -> Cyclic {
    let m = P - 1;
    Cyclic {
        n: 4,
        gens: vec![
            (2, vec![(vec![1, 0, 1, 0], 1), (vec![0, 2, 0, 0], m)]),
            (2, vec![(vec![0, 1, 0, 1], 1), (vec![0, 0, 2, 0], m)]),
            (2, vec![(vec![1, 0, 0, 1], 1), (vec![0, 1, 1, 0], m)]),
        ],
    }
}

/// A random graded presentation on P^v with at most two generators and two relations.
pub fn random_presentation(f: &PrimeField, seed: u64) -> SPresentation<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = rng.gen_range(1..=2usize);
    let n = v + 1;
    let ngens = rng.gen_range(1..=2usize);
    let gens: Vec<i64> = (0..ngens).map(|_| rng.gen_range(-1..=1)).collect();
    let nrels = rng.gen_range(0..=2usize);
    let mingen = *gens.iter().min().unwrap();
    let rels: Vec<i64> = (0..nrels).map(|_| mingen + rng.gen_range(1..=2)).collect();
    let matrix = gens
        .iter()
        .map(|&b| {
            rels.iter()
                .map(|&a| {
                    let d = a - b;
                    let ms = monomials(n, d);
                    if ms.is_empty() || rng.gen_bool(0.2) {
                        return SPolynomial::zero(d);
                    }
                    let k = rng.gen_range(1..=ms.len().min(3));
                    let terms = (0..k)
                        .map(|_| (ms[rng.gen_range(0..ms.len())].clone(), f.from_i64(rng.gen_range(-3..=3))))
                        .collect();
                    SPolynomial::from_terms(f, d, terms).unwrap()
                })
                .collect()
        })
        .collect();
    SPresentation::new(v, gens, rels, matrix).unwrap()
}
