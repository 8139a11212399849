//! Integral lattices: symmetric bilinear forms on `Z^n`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::abelian::{self, cokernel, smith_normal_form, FinAbGroup};
use crate::error::{Error, Result};
use crate::matrix::{dot, IntegerMatrix};

/// Coordinates of a vector in the lattice basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(#[serde(with = "crate::matrix::bigint_vec_str")] pub Vec<BigInt>);

impl LatticeVector {
    pub fn from_i64(v: &[i64]) -> Self {
        Self(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![BigInt::zero(); n])
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        v.0[i] = BigInt::one();
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self(self.0.iter().map(|a| a * k).collect())
    }

    /// gcd of the coordinates.
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    pub fn reduce_mod(&self, m: &BigInt) -> Self {
        Self(self.0.iter().map(|x| x.mod_floor(m)).collect())
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A free abelian group with a symmetric integral bilinear form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    gram: IntegerMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

/// Discriminant quadratic form of an even nondegenerate lattice.
///
/// `generator_values` depend on the chosen generators; equality only compares the
/// value distribution, which is an isometry invariant.
#[derive(Clone, Debug, Serialize)]
pub struct DiscriminantForm {
    /// `q(x_i) mod 2Z` for the SNF generators `x_i`.
    #[serde(serialize_with = "ser_rationals")]
    pub generator_values: Vec<BigRational>,
    /// Number of group elements with each value of `q mod 2Z`, when the group is small.
    pub value_counts: Option<BTreeMap<String, u64>>,
}

impl PartialEq for DiscriminantForm {
    fn eq(&self, other: &Self) -> bool {
        self.value_counts == other.value_counts
    }
}

impl Eq for DiscriminantForm {}

fn ser_rationals<S: serde::Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    v.iter().map(ToString::to_string).collect::<Vec<_>>().serialize(s)
}

/// Rank, signature, determinant and discriminant data of a lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeInvariants {
    pub rank: usize,
    /// `(positive, negative, zero)` eigenvalue counts.
    pub signature: (usize, usize, usize),
    #[serde(with = "crate::matrix::bigint_str")]
    pub determinant: BigInt,
    pub discriminant_group: FinAbGroup,
    pub even: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discriminant_form: Option<DiscriminantForm>,
}

impl LatticeInvariants {
    /// Same invariants after negating the form.
    pub fn negated(&self) -> Self {
        let (p, n, z) = self.signature;
        let sign = if self.rank % 2 == 1 { -BigInt::one() } else { BigInt::one() };
        let discriminant_form = self.discriminant_form.as_ref().map(|f| DiscriminantForm {
            generator_values: f.generator_values.iter().map(|q| mod_two(&-q)).collect(),
            value_counts: f.value_counts.as_ref().map(|c| {
                c.iter()
                    .map(|(k, v)| {
                        let q: BigRational = k.parse().expect("stored value parses");
                        (mod_two(&-q).to_string(), *v)
                    })
                    .collect()
            }),
        });
        Self {
            rank: self.rank,
            signature: (n, p, z),
            determinant: &self.determinant * sign,
            discriminant_group: self.discriminant_group.clone(),
            even: self.even,
            discriminant_form,
        }
    }

    /// Equality up to a global sign of the form.
    pub fn equal_up_to_sign(&self, other: &Self) -> bool {
        self == other || self.negated() == *other
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant.abs().is_one()
    }
}

fn mod_two(q: &BigRational) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    q - &two * (q / &two).floor()
}

/// Cap on the discriminant group order for the full value distribution.
const VALUE_COUNT_LIMIT: u64 = 4096;

impl Lattice {
    pub fn new(gram: IntegerMatrix) -> Result<Self> {
        if !gram.is_symmetric() {
            return Err(Error::InvalidInput("Gram matrix is not symmetric".into()));
        }
        Ok(Self { gram, label: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(IntegerMatrix::from_rows(rows)?)
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        Self { gram: IntegerMatrix::diagonal(entries.iter().map(|&x| BigInt::from(x))), label: None }
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &IntegerMatrix {
        &self.gram
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    fn check(&self, v: &LatticeVector) -> Result<()> {
        if v.len() != self.rank() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in a lattice of rank {}",
                v.len(),
                self.rank()
            )));
        }
        Ok(())
    }

    pub fn pairing(&self, v: &LatticeVector, w: &LatticeVector) -> Result<BigInt> {
        self.check(v)?;
        self.check(w)?;
        Ok(dot(&self.gram.mul_vec(&w.0)?, &v.0))
    }

    pub fn norm(&self, v: &LatticeVector) -> Result<BigInt> {
        self.pairing(v, v)
    }

    /// The functional `⟨v, -⟩` as a coordinate row.
    pub fn functional(&self, v: &LatticeVector) -> Result<Vec<BigInt>> {
        self.check(v)?;
        self.gram.mul_vec(&v.0)
    }

    /// gcd of the pairings of `v` with the basis.
    pub fn divisibility(&self, v: &LatticeVector) -> Result<BigInt> {
        if v.is_zero() {
            return Err(Error::ZeroVector);
        }
        let g = self.functional(v)?.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g.is_zero() {
            return Err(Error::InvalidInput("vector lies in the radical of the form".into()));
        }
        Ok(g)
    }

    /// gcd of the pairings of `v` with the given vectors (0 when all vanish).
    pub fn divisibility_in(&self, v: &LatticeVector, within: &[LatticeVector]) -> Result<BigInt> {
        let mut g = BigInt::zero();
        for w in within {
            g = g.gcd(&self.pairing(v, w)?);
        }
        Ok(g)
    }

    /// A vector `b` with `⟨b, v⟩ = 1`, preferring a basis vector.
    pub fn dual_vector(&self, v: &LatticeVector) -> Result<LatticeVector> {
        let w = self.functional(v)?;
        unit_preimage(&w).ok_or_else(|| {
            let d = w.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            Error::NoDualClass(d.to_string())
        })
    }

    /// The lattice spanned by `basis` with the induced form.
    pub fn sublattice(&self, basis: &[LatticeVector]) -> Result<Lattice> {
        for b in basis {
            self.check(b)?;
        }
        let cols: Vec<Vec<BigInt>> = basis.iter().map(|b| b.0.clone()).collect();
        let b = IntegerMatrix::from_columns(self.rank(), &cols)?;
        let gram = b.transpose().mul(&self.gram)?.mul(&b)?;
        Ok(Lattice { gram, label: None })
    }

    /// Saturated basis of `{w : ⟨w, s⟩ = 0 for all s ∈ S}` and its induced form.
    pub fn orthogonal_complement(&self, s: &[LatticeVector]) -> Result<(Vec<LatticeVector>, Lattice)> {
        let mut rows = Vec::with_capacity(s.len());
        for v in s {
            rows.push(self.functional(v)?);
        }
        let m = if rows.is_empty() {
            IntegerMatrix::zeros(0, self.rank())
        } else {
            IntegerMatrix::from_rows(&rows)?
        };
        let basis: Vec<LatticeVector> = abelian::kernel(&m).into_iter().map(LatticeVector).collect();
        let sub = self.sublattice(&basis)?;
        Ok((basis, sub))
    }

    /// Basis of the primitive closure of the span of `s`.
    pub fn saturation(&self, s: &[LatticeVector]) -> Result<Vec<LatticeVector>> {
        for v in s {
            self.check(v)?;
        }
        Ok(saturate(self.rank(), s))
    }

    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        let label = match (&self.label, &other.label) {
            (Some(a), Some(b)) => Some(format!("{a}+{b}")),
            _ => None,
        };
        Lattice { gram: self.gram.direct_sum(&other.gram), label }
    }

    pub fn scaled(&self, k: &BigInt) -> Lattice {
        Lattice { gram: self.gram.scaled(k), label: self.label.as_ref().map(|l| format!("{l}({k})")) }
    }

    pub fn negated(&self) -> Lattice {
        self.scaled(&-BigInt::one())
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[(i, i)].is_even())
    }

    pub fn determinant(&self) -> BigInt {
        self.gram.determinant().expect("Gram matrices are square")
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().abs().is_one()
    }

    /// `(positive, negative, zero)` by exact congruence diagonalization.
    pub fn signature(&self) -> (usize, usize, usize) {
        signature(&self.gram)
    }

    pub fn invariants(&self) -> LatticeInvariants {
        let det = self.determinant();
        let even = self.is_even();
        let discriminant_group = cokernel(&self.gram);
        let discriminant_form =
            if even && !det.is_zero() { Some(self.discriminant_form()) } else { None };
        LatticeInvariants {
            rank: self.rank(),
            signature: self.signature(),
            determinant: det,
            discriminant_group,
            even,
            discriminant_form,
        }
    }

    fn discriminant_form(&self) -> DiscriminantForm {
        let snf = smith_normal_form(&self.gram);
        let n = self.rank();
        // Generators of L*/L are V·e_i / d_i in rational coordinates of L.
        let gens: Vec<(usize, BigInt)> = (0..n)
            .filter(|&i| !snf.d[(i, i)].is_one())
            .map(|i| (i, snf.d[(i, i)].clone()))
            .collect();
        let vecs: Vec<Vec<BigInt>> = gens.iter().map(|(i, _)| snf.v.column(*i)).collect();
        let k = gens.len();
        let mut b = vec![vec![BigRational::zero(); k]; k];
        for a in 0..k {
            let gv = self.gram.mul_vec(&vecs[a]).expect("square");
            for c in 0..k {
                let num = dot(&gv, &vecs[c]);
                b[a][c] = BigRational::new(num, &gens[a].1 * &gens[c].1);
            }
        }
        let generator_values: Vec<BigRational> = (0..k).map(|a| mod_two(&b[a][a])).collect();
        let order: BigInt = gens.iter().map(|(_, d)| d.clone()).product();
        let value_counts = order.to_u64().filter(|&o| o <= VALUE_COUNT_LIMIT).map(|_| {
            let orders: Vec<u64> = gens.iter().map(|(_, d)| d.to_u64().expect("small")).collect();
            let mut counts = BTreeMap::new();
            let mut coeffs = vec![0u64; k];
            loop {
                let mut q = BigRational::zero();
                for a in 0..k {
                    if coeffs[a] == 0 {
                        continue;
                    }
                    for c in 0..k {
                        if coeffs[c] != 0 {
                            q += &b[a][c] * BigRational::from_integer(BigInt::from(coeffs[a] * coeffs[c]));
                        }
                    }
                }
                *counts.entry(mod_two(&q).to_string()).or_insert(0u64) += 1;
                let mut i = 0;
                while i < k {
                    coeffs[i] += 1;
                    if coeffs[i] < orders[i] {
                        break;
                    }
                    coeffs[i] = 0;
                    i += 1;
                }
                if i == k {
                    break;
                }
            }
            counts
        });
        DiscriminantForm { generator_values, value_counts }
    }
}

/// A vector `x` with `Σ w_i x_i = 1`, preferring a signed basis vector; `None` when
/// the gcd of `w` is not 1.
pub fn unit_preimage(w: &[BigInt]) -> Option<LatticeVector> {
    let n = w.len();
    if let Some(i) = w.iter().position(One::is_one) {
        return Some(LatticeVector::basis(n, i));
    }
    if let Some(i) = w.iter().position(|x| (-x).is_one()) {
        return Some(LatticeVector::basis(n, i).scale(&-BigInt::one()));
    }
    let row = IntegerMatrix::new(1, n, w.to_vec()).ok()?;
    let snf = smith_normal_form(&row);
    if snf.rank == 0 || !snf.d[(0, 0)].is_one() {
        return None;
    }
    Some(LatticeVector(snf.v.column(0)).scale(&snf.u[(0, 0)]))
}

/// Primitive closure of the span of `s` inside `Z^n`.
pub fn saturate(n: usize, s: &[LatticeVector]) -> Vec<LatticeVector> {
    let m = if s.is_empty() {
        IntegerMatrix::zeros(0, n)
    } else {
        IntegerMatrix::from_rows(&s.iter().map(|v| v.0.clone()).collect::<Vec<_>>())
            .expect("vectors share a length")
    };
    // The annihilator of the span, then its annihilator.
    let ann = abelian::kernel(&m);
    let ann_m = if ann.is_empty() {
        IntegerMatrix::zeros(0, n)
    } else {
        IntegerMatrix::from_rows(&ann).expect("kernel vectors share a length")
    };
    abelian::kernel(&ann_m).into_iter().map(LatticeVector).collect()
}

/// True when the span of `s` is primitive in `Z^n`.
pub fn is_saturated(n: usize, s: &[LatticeVector]) -> bool {
    let cols: Vec<Vec<BigInt>> = s.iter().map(|v| v.0.clone()).collect();
    abelian::quotient_by_span(n, &cols).map(|g| g.is_free()).unwrap_or(false)
}

/// Signature of a symmetric integer matrix by rational congruence diagonalization.
pub fn signature(gram: &IntegerMatrix) -> (usize, usize, usize) {
    let n = gram.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| gram.row(i).iter().cloned().map(BigRational::from_integer).collect())
        .collect();
    let (mut pos, mut neg) = (0, 0);
    let mut k = 0;
    while k < n {
        let pivot = (k..n).find(|&i| !a[i][i].is_zero());
        let p = match pivot {
            Some(p) => p,
            None => {
                // All remaining diagonal entries vanish: replace e_i by e_i + e_j for some
                // nonzero off-diagonal entry, which creates the diagonal entry 2·a_ij.
                let off = (k..n).flat_map(|i| (k..n).map(move |j| (i, j))).find(|&(i, j)| i != j && !a[i][j].is_zero());
                let Some((i, j)) = off else { break };
                for c in 0..n {
                    let x = a[j][c].clone();
                    a[i][c] += x;
                }
                for r in 0..n {
                    let x = a[r][j].clone();
                    a[r][i] += x;
                }
                i
            }
        };
        a.swap(k, p);
        for row in a.iter_mut() {
            row.swap(k, p);
        }
        let d = a[k][k].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &d;
            for j in k..n {
                let x = &a[k][j] * &f;
                a[i][j] -= x;
            }
            for r in 0..n {
                let x = &a[r][k] * &f;
                a[r][i] -= x;
            }
        }
        k += 1;
    }
    (pos, neg, n - pos - neg)
}

// ---------------------------------------------------------------------------
// Standard lattices

pub fn hyperbolic_plane() -> Lattice {
    Lattice::from_rows(&[vec![0, 1], vec![1, 0]]).expect("symmetric").with_label("U")
}

pub fn a2() -> Lattice {
    Lattice::from_rows(&[vec![2, -1], vec![-1, 2]]).expect("symmetric").with_label("A2")
}

/// Positive definite E8 Cartan matrix: a chain of seven nodes with the eighth
/// attached to the fifth.
pub fn e8() -> Lattice {
    let mut rows = vec![vec![0i64; 8]; 8];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut edge = |a: usize, b: usize| {
        rows[a][b] = -1;
        rows[b][a] = -1;
    };
    for i in 0..6 {
        edge(i, i + 1);
    }
    edge(4, 7);
    Lattice::from_rows(&rows).expect("symmetric").with_label("E8")
}

pub fn unit(n: usize) -> Lattice {
    Lattice::diagonal(&vec![1; n]).with_label(format!("unit{n}"))
}

/// `U^3 ⊕ E8(-1)^2`.
pub fn k3_lattice() -> Lattice {
    let u = hyperbolic_plane();
    let e = e8().negated();
    u.direct_sum(&u).direct_sum(&u).direct_sum(&e).direct_sum(&e).with_label("K3")
}

/// `⟨1⟩^21 ⊕ ⟨-1⟩^2` with `h² = e1 + e2 + e3`.
pub fn cubic_h4_default() -> Lattice {
    let mut d = vec![1i64; 21];
    d.extend([-1, -1]);
    Lattice::diagonal(&d).with_label("cubic_h4_default")
}

pub fn cubic_h2_default() -> LatticeVector {
    let mut v = LatticeVector::zero(23);
    for i in 0..3 {
        v.0[i] = BigInt::one();
    }
    v
}

/// `U^3 ⊕ E8(-1)^2 ⊕ A2(-1)`; `θ`, `η` are the basis of the first `U`.
pub fn og10_h2_default() -> Lattice {
    k3_lattice().direct_sum(&a2().negated()).with_label("og10_h2_default")
}

/// `(θ, η)` in [`og10_h2_default`].
pub fn og10_theta_eta() -> (LatticeVector, LatticeVector) {
    (LatticeVector::basis(24, 0), LatticeVector::basis(24, 1))
}

/// `c1(L) = e + (g-1) f` in the first `U` of the K3 lattice, of square `2g - 2`.
pub fn k3_polarization(g: u32) -> LatticeVector {
    let mut v = LatticeVector::zero(22);
    v.0[0] = BigInt::one();
    v.0[1] = BigInt::from(g) - 1;
    v
}

/// Distinguished vectors that ship with a standard lattice name.
pub fn standard_vectors(name: &str) -> BTreeMap<String, LatticeVector> {
    let mut out = BTreeMap::new();
    match name.trim() {
        "cubic_h4_default" => {
            out.insert("h2".to_string(), cubic_h2_default());
        }
        "og10_h2_default" => {
            let (t, e) = og10_theta_eta();
            out.insert("theta".to_string(), t);
            out.insert("eta".to_string(), e);
        }
        _ => {}
    }
    out
}

/// Parses names like `U`, `E8(-1)`, `U^3+E8(-1)^2`, `-A2`, `unit5`, `unit(5)`,
/// `cubic_h4_default`.
pub fn standard_lattice(name: &str) -> Result<Lattice> {
    let unknown = || Error::UnknownLatticeName(name.to_string());
    let mut total: Option<Lattice> = None;
    for raw in name.split('+') {
        let term = raw.trim();
        if term.is_empty() {
            return Err(unknown());
        }
        let (negate, rest) = match term.strip_prefix('-') {
            Some(r) => (true, r.trim()),
            None => (false, term),
        };
        let (body, power) = match rest.rsplit_once('^') {
            Some((b, p)) => (b.trim(), p.trim().parse::<usize>().map_err(|_| unknown())?),
            None => (rest, 1),
        };
        if power == 0 {
            return Err(unknown());
        }
        let (base_name, scale) = match body.strip_suffix(')').and_then(|b| b.split_once('(')) {
            Some((n, s)) => (n.trim(), Some(s.trim().to_string())),
            None => (body, None),
        };
        let mut base = match base_name {
            "U" => hyperbolic_plane(),
            "A2" => a2(),
            "E8" => e8(),
            "K3" => k3_lattice(),
            "cubic_h4_default" => cubic_h4_default(),
            "og10_h2_default" => og10_h2_default(),
            "unit" => {
                let n = scale.as_deref().and_then(|s| s.parse::<usize>().ok()).ok_or_else(unknown)?;
                unit(n)
            }
            other => match other.strip_prefix("unit").and_then(|n| n.parse::<usize>().ok()) {
                Some(n) => unit(n),
                None => return Err(unknown()),
            },
        };
        if base_name != "unit" {
            if let Some(s) = scale {
                let k: BigInt = s.parse().map_err(|_| unknown())?;
                base = base.scaled(&k);
            }
        }
        if negate {
            base = base.negated();
        }
        let mut block = base.clone();
        for _ in 1..power {
            block = block.direct_sum(&base);
        }
        total = Some(match total {
            None => block,
            Some(t) => t.direct_sum(&block),
        });
    }
    let mut l = total.ok_or_else(unknown)?;
    l.label = Some(name.trim().to_string());
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::big_vec;
    use proptest::prelude::*;

    fn v(x: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(x)
    }

    #[test]
    fn standard_grams() {
        assert_eq!(
            standard_lattice("U").unwrap().gram(),
            &IntegerMatrix::from_rows(&[vec![0i64, 1], vec![1, 0]]).unwrap()
        );
        assert_eq!(
            standard_lattice("A2").unwrap().gram(),
            &IntegerMatrix::from_rows(&[vec![2i64, -1], vec![-1, 2]]).unwrap()
        );
        let c = standard_lattice("cubic_h4_default").unwrap();
        assert_eq!(c.rank(), 23);
        assert!(c.is_unimodular());
        assert_eq!(c.signature(), (21, 2, 0));
        let h2 = cubic_h2_default();
        assert_eq!(c.norm(&h2).unwrap(), BigInt::from(3));
        assert_eq!(c.divisibility_in(&h2, &[h2.clone()]).unwrap(), BigInt::from(3));
        assert!(matches!(standard_lattice("D4"), Err(Error::UnknownLatticeName(_))));
    }

    #[test]
    fn modifiers() {
        let l = standard_lattice("U^3+E8(-1)^2").unwrap();
        assert_eq!(l.gram(), k3_lattice().gram());
        assert_eq!(standard_lattice("-A2").unwrap().gram(), a2().negated().gram());
        assert_eq!(standard_lattice("U(2)").unwrap().gram()[(0, 1)], BigInt::from(2));
        assert_eq!(standard_lattice("unit5").unwrap().rank(), 5);
        assert_eq!(standard_lattice("unit(4)").unwrap().rank(), 4);
        assert!(standard_lattice("U^0").is_err());
        assert!(standard_lattice("U+").is_err());
    }

    #[test]
    fn pairing_examples() {
        let u = hyperbolic_plane();
        assert_eq!(u.pairing(&v(&[1, 0]), &v(&[0, 1])).unwrap(), BigInt::one());
        assert_eq!(a2().pairing(&v(&[1, 0]), &v(&[0, 1])).unwrap(), BigInt::from(-1));
        assert!(matches!(u.pairing(&v(&[1]), &v(&[0, 1])), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn divisibility_examples() {
        assert_eq!(hyperbolic_plane().divisibility(&v(&[1, 0])).unwrap(), BigInt::one());
        assert_eq!(a2().divisibility(&v(&[1, -1])).unwrap(), BigInt::from(3));
        assert_eq!(Lattice::diagonal(&[3]).divisibility(&v(&[1])).unwrap(), BigInt::from(3));
        assert_eq!(a2().divisibility(&v(&[0, 0])), Err(Error::ZeroVector));
    }

    #[test]
    fn complement_examples() {
        let (basis, sub) = hyperbolic_plane().orthogonal_complement(&[v(&[1, 0])]).unwrap();
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0].content(), BigInt::one());
        assert_eq!(sub.gram()[(0, 0)], BigInt::zero());

        let c = cubic_h4_default();
        let (_, prim) = c.orthogonal_complement(&[cubic_h2_default()]).unwrap();
        assert_eq!(prim.rank(), 22);
        assert_eq!(prim.determinant().abs(), BigInt::from(3));

        let o = og10_h2_default();
        let (t, e) = og10_theta_eta();
        let (_, perp) = o.orthogonal_complement(&[t, e]).unwrap();
        assert_eq!(perp.rank(), 22);
        assert_eq!(perp.determinant().abs(), BigInt::from(3));
    }

    #[test]
    fn saturation_examples() {
        let l = unit(2);
        let s = l.saturation(&[v(&[2, 0])]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].content(), BigInt::one());
        assert_eq!(s[0].0[1], BigInt::zero());
        assert!(l.saturation(&[]).unwrap().is_empty());
        let s = l.saturation(&[v(&[1, 1])]).unwrap();
        assert!(is_saturated(2, &s));
        assert!(!is_saturated(2, &[v(&[2, 0])]));
    }

    #[test]
    fn invariants_examples() {
        let u = hyperbolic_plane().invariants();
        assert_eq!((u.rank, u.signature), (2, (1, 1, 0)));
        assert_eq!(u.determinant, BigInt::from(-1));
        assert!(u.discriminant_group.is_trivial());
        let a = a2().invariants();
        assert_eq!(a.signature, (2, 0, 0));
        assert_eq!(a.determinant, BigInt::from(3));
        assert_eq!(a.discriminant_group, FinAbGroup::cyclic(3));
        // The nonzero classes of A2*/A2 have q = 2/3.
        let form = a.discriminant_form.unwrap();
        assert_eq!(form.generator_values[0].to_string(), "2/3");
        assert_eq!(form.value_counts.unwrap().get("2/3"), Some(&2));
        let e = e8().invariants();
        assert_eq!((e.signature, e.determinant.clone()), ((8, 0, 0), BigInt::one()));
        assert!(e.discriminant_group.is_trivial());
        let k3 = k3_lattice().invariants();
        assert_eq!(k3.signature, (3, 19, 0));
        assert!(k3.is_unimodular());
    }

    #[test]
    fn hyperbolic_pivot_and_degenerate_forms() {
        let z = Lattice::from_rows(&[vec![0, 0], vec![0, 0]]).unwrap();
        assert_eq!(z.signature(), (0, 0, 2));
        let w = Lattice::from_rows(&[vec![0, 2, 0], vec![2, 0, 0], vec![0, 0, 0]]).unwrap();
        assert_eq!(w.signature(), (1, 1, 1));
        assert_eq!(w.invariants().discriminant_group, FinAbGroup::new(1, &big_vec(&[2, 2])));
    }

    #[test]
    fn dual_vector_examples() {
        let c = cubic_h4_default();
        assert_eq!(c.dual_vector(&cubic_h2_default()).unwrap(), LatticeVector::basis(23, 0));
        assert_eq!(hyperbolic_plane().dual_vector(&v(&[1, 0])).unwrap(), v(&[0, 1]));
        assert!(matches!(unit(1).dual_vector(&v(&[2])), Err(Error::NoDualClass(_))));
        let l = Lattice::diagonal(&[2, 3]);
        let b = l.dual_vector(&v(&[1, 1])).unwrap();
        assert_eq!(l.pairing(&b, &v(&[1, 1])).unwrap(), BigInt::one());
    }

    fn gram_strategy() -> impl Strategy<Value = Lattice> {
        (1usize..=5).prop_flat_map(|n| {
            proptest::collection::vec(-4i64..=4, n * (n + 1) / 2).prop_map(move |e| {
                let mut rows = vec![vec![0i64; n]; n];
                let mut it = e.into_iter();
                for i in 0..n {
                    for j in i..n {
                        let x = it.next().unwrap();
                        rows[i][j] = x;
                        rows[j][i] = x;
                    }
                }
                Lattice::from_rows(&rows).unwrap()
            })
        })
    }

    fn unimodular(n: usize) -> impl Strategy<Value = IntegerMatrix> {
        proptest::collection::vec((0..n, 0..n, -2i64..=2), 0..10).prop_map(move |ops| {
            let mut u = IntegerMatrix::identity(n);
            for (a, b, k) in ops {
                if a != b {
                    u.add_row_multiple(a, b, &BigInt::from(k));
                }
            }
            u
        })
    }

    proptest! {
        #[test]
        fn invariants_basis_independent(
            (l, p) in gram_strategy().prop_flat_map(|l| { let n = l.rank(); (Just(l), unimodular(n)) })
        ) {
            let g2 = p.transpose().mul(l.gram()).unwrap().mul(&p).unwrap();
            let l2 = Lattice::new(g2).unwrap();
            prop_assert_eq!(l.invariants(), l2.invariants());
        }

        #[test]
        fn direct_sum_invariants(a in gram_strategy(), b in gram_strategy()) {
            let (ia, ib) = (a.invariants(), b.invariants());
            let s = a.direct_sum(&b).invariants();
            prop_assert_eq!(s.rank, ia.rank + ib.rank);
            prop_assert_eq!(
                s.signature,
                (ia.signature.0 + ib.signature.0, ia.signature.1 + ib.signature.1, ia.signature.2 + ib.signature.2)
            );
            prop_assert_eq!(s.determinant, &ia.determinant * &ib.determinant);
            prop_assert_eq!(s.discriminant_group, ia.discriminant_group.direct_sum(&ib.discriminant_group));
        }

        #[test]
        fn divisibility_divides_norm(l in gram_strategy(), seed in proptest::collection::vec(-3i64..=3, 5)) {
            let x = LatticeVector::from_i64(&seed[..l.rank()]);
            if let Ok(d) = l.divisibility(&x) {
                prop_assert!((l.norm(&x).unwrap() % d).is_zero());
            }
        }

        #[test]
        fn primitive_sublattice_determinants(
            n in 2usize..=8,
            raw in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 8), 1..=3)
        ) {
            let l = unit(n);
            let s: Vec<LatticeVector> = raw.iter().map(|r| LatticeVector::from_i64(&r[..n])).collect();
            let t = l.saturation(&s).unwrap();
            let (perp_basis, perp) = l.orthogonal_complement(&t).unwrap();
            let tl = l.sublattice(&t).unwrap();
            prop_assert_eq!(tl.determinant().abs(), perp.determinant().abs());
            // The complement is saturated and T ⊕ T^⊥ has finite index.
            prop_assert!(is_saturated(n, &perp_basis));
            let mut all: Vec<Vec<BigInt>> = t.iter().map(|x| x.0.clone()).collect();
            all.extend(perp_basis.iter().map(|x| x.0.clone()));
            prop_assert_eq!(abelian::quotient_by_span(n, &all).unwrap().free_rank(), 0);
        }
    }
}
