//! Independent reference computations used by the integration tests.
//!
//! Everything here works on small `i128` matrices and shares no code with the
//! library beyond the `IntegerMatrix` container.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::Rng;
use twistcalc::IntegerMatrix;

pub type Mat = Vec<Vec<i128>>;

pub fn to_matrix(m: &Mat, rows: usize, cols: usize) -> IntegerMatrix {
    let entries = m.iter().flatten().map(|&x| BigInt::from(x)).collect();
    IntegerMatrix::new(rows, cols, entries).expect("shape")
}

pub fn from_matrix(m: &IntegerMatrix) -> Mat {
    m.to_rows().iter().map(|r| r.iter().map(|x| x.to_i128().expect("small entry")).collect()).collect()
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, bound: i128) -> Mat {
    (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect()).collect()
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Invariant factors by repeated elementary row and column operations.
pub fn naive_invariant_factors(m: &Mat, rows: usize, cols: usize) -> Vec<i128> {
    let mut a = m.clone();
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // Pivot: smallest nonzero absolute value in the trailing block.
        let mut pivot = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j] != 0 && pivot.map_or(true, |(pi, pj): (usize, usize)| a[i][j].abs() < a[pi][pj].abs()) {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let p = a[t][t];
        let mut clean = true;
        for i in t + 1..rows {
            let q = a[i][t] / p;
            for j in t..cols {
                a[i][j] -= q * a[t][j];
            }
            clean &= a[i][t] == 0;
        }
        for j in t + 1..cols {
            let q = a[t][j] / p;
            for i in t..rows {
                a[i][j] -= q * a[i][t];
            }
            clean &= a[t][j] == 0;
        }
        if !clean {
            continue;
        }
        // The pivot must divide the whole trailing block; otherwise fold a bad row in.
        let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % p != 0));
        if let Some(i) = bad {
            for j in t..cols {
                a[t][j] += a[i][j];
            }
            continue;
        }
        out.push(p.abs());
        t += 1;
    }
    out
}

/// Rank over the rationals by fraction-free elimination.
pub fn rational_rank(m: &Mat) -> usize {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, p);
        for i in r + 1..rows {
            let (x, y) = (a[r][c], a[i][c]);
            for j in 0..cols {
                a[i][j] = x * a[i][j] - y * a[r][j];
            }
            let g = a[i].iter().fold(0, |g, &v| gcd(g, v));
            if g > 1 {
                a[i].iter_mut().for_each(|v| *v /= g);
            }
        }
        r += 1;
    }
    r
}

fn det(m: &Mat) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .map(|j| {
            let minor: Mat = m[1..].iter().map(|r| [&r[..j], &r[j + 1..]].concat()).collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * m[0][j] * det(&minor)
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|s| s.count_ones() as usize == k).map(|s| (0..n).filter(|i| s >> i & 1 == 1).collect()).collect()
}

/// Gcd of the `k × k` minors.
pub fn determinantal_divisor(m: &Mat, k: usize) -> i128 {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut g = 0;
    for rs in subsets(rows, k) {
        for cs in subsets(cols, k) {
            let sub: Mat = rs.iter().map(|&i| cs.iter().map(|&j| m[i][j]).collect()).collect();
            g = gcd(g, det(&sub));
        }
    }
    g
}

/// Invariant factors from quotients of determinantal divisors.
pub fn minor_invariant_factors(m: &Mat) -> Vec<i128> {
    let r = rational_rank(m);
    let d: Vec<i128> = (0..=r).map(|k| determinantal_divisor(m, k)).collect();
    (1..=r).map(|k| d[k] / d[k - 1]).collect()
}

fn apply_mod(m: &Mat, x: &[i128], n: i128) -> Vec<i128> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum::<i128>().rem_euclid(n)).collect()
}

fn all_vectors(len: usize, n: i128) -> impl Iterator<Item = Vec<i128>> {
    let total = (n as usize).pow(len as u32);
    (0..total).map(move |mut idx| {
        (0..len)
            .map(|_| {
                let d = (idx % n as usize) as i128;
                idx /= n as usize;
                d
            })
            .collect()
    })
}

/// `|im(f mod n)|` by enumerating the source.
fn image_size(f: &Mat, src: usize, n: i128) -> usize {
    all_vectors(src, n).map(|x| apply_mod(f, &x, n)).collect::<HashSet<_>>().len()
}

/// `|ker(g mod n)|` by enumerating the target of `f`.
fn kernel_size(g: &Mat, dim: usize, n: i128) -> usize {
    all_vectors(dim, n).filter(|x| apply_mod(g, x, n).iter().all(|&v| v == 0)).count()
}

/// Structure of `ker g / im f` for `Z^a → Z^b → Z^c`, read off by enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumeratedCohomology {
    pub free_rank: usize,
    pub torsion_order: i128,
    /// `|H ⊗ Z/n|` for `n = 1..=counts.len()`.
    pub counts: Vec<u128>,
}

/// Uses `H^1(C ⊗ Z/n) ≅ H/nH ⊕ Tor(coker g, Z/n)` and `|G[n]| = |G/nG| / n^{rank G}`.
pub fn enumerate_middle(f: &Mat, g: &Mat, a: usize, b: usize, c: usize, max_n: i128) -> EnumeratedCohomology {
    let rf = rational_rank(f);
    let rg = rational_rank(g);
    let free_rank = b - rf - rg;
    let coker_g_free = (c - rg) as u32;
    let counts = (1..=max_n)
        .map(|n| {
            let reduced = kernel_size(g, b, n) / image_size(f, a, n);
            let coker_g = (n as usize).pow(c as u32) / image_size(g, b, n);
            let coker_g_torsion = coker_g / (n as usize).pow(coker_g_free);
            (reduced / coker_g_torsion) as u128
        })
        .collect();
    // Torsion of ker g / im f equals the torsion of coker f.
    let torsion_order = if rf == 0 { 1 } else { determinantal_divisor(f, rf).abs() };
    EnumeratedCohomology { free_rank, torsion_order, counts }
}

/// A random complex `Z^a --f--> Z^b --g--> Z^c` with small entries and `g·f = 0`.
///
/// `g` is a small combination of rows annihilating `im f`, found by search.
pub fn random_complex(rng: &mut impl Rng, max_dim: usize, bound: i128) -> (Mat, Mat, usize, usize, usize) {
    loop {
        let a = rng.gen_range(1..=max_dim);
        let b = rng.gen_range(1..=max_dim);
        let c = rng.gen_range(1..=max_dim);
        let f = random_matrix(rng, b, a, bound);
        // Rows w with w·f = 0, |w_i| ≤ bound.
        let span = 2 * bound + 1;
        let annihilators: Vec<Vec<i128>> = all_vectors(b, span)
            .map(|w| w.iter().map(|x| x - bound).collect::<Vec<_>>())
            .filter(|w| w.iter().any(|&x| x != 0))
            .filter(|w| (0..a).all(|j| (0..b).map(|i| w[i] * f[i][j]).sum::<i128>() == 0))
            .collect();
        let g: Mat = (0..c)
            .map(|_| {
                if annihilators.is_empty() || rng.gen_bool(0.2) {
                    vec![0; b]
                } else {
                    annihilators[rng.gen_range(0..annihilators.len())].clone()
                }
            })
            .collect();
        if f.iter().flatten().any(|&x| x != 0) || g.iter().flatten().any(|&x| x != 0) {
            return (f, g, a, b, c);
        }
    }
}
