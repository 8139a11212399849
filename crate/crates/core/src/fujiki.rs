//! Fujiki relation and the extraction of the BBF form from top intersection numbers.
//!
//! Top intersections on a hyperkähler `M` of dimension `2n` are modelled by the
//! polarized Fujiki relation: `∫ α_1⋯α_{2n}` is `c_M/(2n)!` times the sum over `S_{2n}`
//! of `Π q(α_σ(2i−1), α_σ(2i))`, which equals `c_M·2ⁿn!/(2n)!` times the sum over
//! perfect matchings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, Lattice, LatticeVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FujikiFamily {
    /// `K3^[n]`-type.
    K3Hilb,
    Og10,
}

impl std::str::FromStr for FujikiFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "k3_hilb" | "k3n" | "k3" => Ok(Self::K3Hilb),
            "og10" => Ok(Self::Og10),
            _ => Err(Error::InvalidInput(format!("unknown family {s:?}"))),
        }
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * k)
}

/// `c_M = (2n)!/(2ⁿ n!)`.
pub fn fujiki_constant(family: FujikiFamily, n: usize) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::BadFamilyDimension("n must be at least 1".into()));
    }
    if family == FujikiFamily::Og10 && n != 5 {
        return Err(Error::BadFamilyDimension(format!("OG10 has half dimension 5, not {n}")));
    }
    Ok(BigRational::new(factorial(2 * n), (BigInt::one() << n) * factorial(n)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BeauvilleSetup {
    pub lattice: Lattice,
    #[serde(serialize_with = "ser_rational")]
    pub fujiki_constant: BigRational,
    pub half_dimension: usize,
}

fn ser_rational<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl BeauvilleSetup {
    pub fn new(lattice: Lattice, fujiki_constant: BigRational, half_dimension: usize) -> Result<Self> {
        if fujiki_constant <= BigRational::zero() {
            return Err(Error::InvalidInput("Fujiki constant must be positive".into()));
        }
        if half_dimension == 0 {
            return Err(Error::BadFamilyDimension("n must be at least 1".into()));
        }
        Ok(Self { lattice, fujiki_constant, half_dimension })
    }

    pub fn for_family(lattice: Lattice, family: FujikiFamily, n: usize) -> Result<Self> {
        Self::new(lattice, fujiki_constant(family, n)?, n)
    }

    /// `H²` of OG10 modelled as `K3 ⊕ A2(−1)` with `c_M = 945`.
    pub fn og10() -> Self {
        Self::for_family(lattice::og10_h2_default(), FujikiFamily::Og10, 5).expect("valid")
    }
}

fn pairing_table(vectors: &[LatticeVector], q: &Lattice) -> Result<Vec<Vec<BigInt>>> {
    if vectors.len() % 2 == 1 {
        return Err(Error::OddCount(vectors.len()));
    }
    vectors
        .iter()
        .map(|a| vectors.iter().map(|b| q.pairing(a, b)).collect::<Result<Vec<_>>>())
        .collect()
}

fn matchings(table: &[Vec<BigInt>], remaining: &mut Vec<usize>) -> BigInt {
    if remaining.is_empty() {
        return BigInt::one();
    }
    let first = remaining.remove(0);
    let mut total = BigInt::zero();
    for k in 0..remaining.len() {
        let partner = remaining.remove(k);
        let w = &table[first][partner];
        if !w.is_zero() {
            total += w * matchings(table, remaining);
        }
        remaining.insert(k, partner);
    }
    remaining.insert(0, first);
    total
}

/// Sum over perfect matchings of the products of pairings.
pub fn matching_sum(vectors: &[LatticeVector], q: &Lattice) -> Result<BigInt> {
    let table = pairing_table(vectors, q)?;
    let mut idx: Vec<usize> = (0..vectors.len()).collect();
    Ok(matchings(&table, &mut idx))
}

/// Upper bound on `n` for [`permutation_sum`].
pub const PERMUTATION_ORACLE_MAX_N: usize = 6;

/// `Σ_{σ ∈ S_{2n}} Π q(α_σ(2i−1), α_σ(2i))` by enumerating every permutation.
pub fn permutation_sum(vectors: &[LatticeVector], q: &Lattice) -> Result<BigInt> {
    let table = pairing_table(vectors, q)?;
    let m = vectors.len();
    if m / 2 > PERMUTATION_ORACLE_MAX_N {
        return Err(Error::InvalidInput(format!(
            "permutation oracle limited to n ≤ {PERMUTATION_ORACLE_MAX_N}"
        )));
    }
    if m == 0 {
        return Ok(BigInt::one());
    }
    let small: Option<Vec<Vec<i64>>> =
        table.iter().map(|r| r.iter().map(ToPrimitive::to_i64).collect()).collect();
    // Partition by the first two entries so that workers get similar loads.
    let prefixes: Vec<(usize, usize)> =
        (0..m).flat_map(|a| (0..m).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let total = prefixes
        .par_iter()
        .map(|&(a, b)| {
            let rest: Vec<usize> = (0..m).filter(|&x| x != a && x != b).collect();
            let head = &table[a][b];
            if head.is_zero() {
                return BigInt::zero();
            }
            let tail = match &small {
                Some(t) => permutations_small(t, rest),
                None => permutations_big(&table, rest),
            };
            head * tail
        })
        .reduce(BigInt::zero, |x, y| x + y);
    Ok(total)
}

fn pair_product_small(t: &[Vec<i64>], perm: &[usize]) -> Option<i128> {
    let mut acc: i128 = 1;
    for c in perm.chunks(2) {
        acc = acc.checked_mul(t[c[0]][c[1]] as i128)?;
    }
    Some(acc)
}

fn pair_product_big(t: &[Vec<BigInt>], perm: &[usize]) -> BigInt {
    perm.chunks(2).fold(BigInt::one(), |a, c| a * &t[c[0]][c[1]])
}

/// Heap's algorithm over `rest`, accumulating in `i128` while it fits.
fn permutations_small(t: &[Vec<i64>], mut rest: Vec<usize>) -> BigInt {
    let mut big = BigInt::zero();
    let mut acc: i128 = 0;
    let add = |perm: &[usize], acc: &mut i128, big: &mut BigInt| match pair_product_small(t, perm) {
        Some(v) => match acc.checked_add(v) {
            Some(s) => *acc = s,
            None => {
                *big += BigInt::from(*acc) + BigInt::from(v);
                *acc = 0;
            }
        },
        None => {
            let tb: Vec<Vec<BigInt>> = t.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            *big += pair_product_big(&tb, perm);
        }
    };
    heap_permutations(&mut rest, |p| add(p, &mut acc, &mut big));
    big + BigInt::from(acc)
}

fn permutations_big(t: &[Vec<BigInt>], mut rest: Vec<usize>) -> BigInt {
    let mut total = BigInt::zero();
    heap_permutations(&mut rest, |p| total += pair_product_big(t, p));
    total
}

fn heap_permutations(a: &mut [usize], mut visit: impl FnMut(&[usize])) {
    let n = a.len();
    let mut c = vec![0usize; n];
    visit(a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            visit(a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// `∫_M α_1⋯α_{2n} = c_M·2ⁿn!/(2n)! · matching_sum`.
pub fn intersection_number(setup: &BeauvilleSetup, vectors: &[LatticeVector]) -> Result<BigRational> {
    if vectors.len() % 2 == 1 {
        return Err(Error::OddCount(vectors.len()));
    }
    let n = setup.half_dimension;
    if vectors.len() != 2 * n {
        return Err(Error::DimensionMismatch(format!("{} classes for a manifold of dimension {}", vectors.len(), 2 * n)));
    }
    let m = matching_sum(vectors, &setup.lattice)?;
    let coef = BigRational::new((BigInt::one() << n) * factorial(n), factorial(2 * n));
    Ok(&setup.fujiki_constant * coef * BigRational::from_integer(m))
}

/// `q(u,v) = C(2n,n)·(n/2ⁿ)·∫uvθ^{n−1}η^{n−1} / c_M` for `u, v ⊥ ⟨θ, η⟩`, `q(η) = 0`, `q(θ,η) = 1`.
pub fn bbf_roundtrip(
    setup: &BeauvilleSetup,
    u: &LatticeVector,
    v: &LatticeVector,
    theta: &LatticeVector,
    eta: &LatticeVector,
) -> Result<BigRational> {
    let q = &setup.lattice;
    let mut failures = Vec::new();
    for (name, a) in [("u", u), ("v", v)] {
        for (tname, t) in [("θ", theta), ("η", eta)] {
            let x = q.pairing(a, t)?;
            if !x.is_zero() {
                failures.push(format!("q({name},{tname}) = {x}"));
            }
        }
    }
    let qe = q.norm(eta)?;
    if !qe.is_zero() {
        failures.push(format!("q(η) = {qe}"));
    }
    let qte = q.pairing(theta, eta)?;
    if !qte.is_one() {
        failures.push(format!("q(θ,η) = {qte}"));
    }
    if !failures.is_empty() {
        return Err(Error::PreconditionViolated(failures));
    }
    let n = setup.half_dimension;
    let mut classes = vec![u.clone(), v.clone()];
    classes.extend(std::iter::repeat(theta.clone()).take(n - 1));
    classes.extend(std::iter::repeat(eta.clone()).take(n - 1));
    let integral = intersection_number(setup, &classes)?;
    let binom = factorial(2 * n) / (factorial(n) * factorial(n));
    let coef = BigRational::new(binom * n, BigInt::one() << n);
    Ok(coef * integral / &setup.fujiki_constant)
}

/// `(2n−1)!!`, the number of perfect matchings of `2n` points.
pub fn double_factorial_odd(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * (2 * k - 1))
}
