//! Cohomology of the universal hyperplane section.
//!
//! For a cubic fourfold `X ⊂ P^5` the universal section `𝒴 ⊂ X × B`, `B = (P^5)^∨`,
//! is a `P^4`-bundle over `X`; for a K3 surface `S` with polarization `L` of genus `g`
//! the universal curve `𝒞 ⊂ S × |L|` is a `P^{g-1}`-bundle over `S`. In both cases
//! `H*(𝒴) = ⊕_{i=0..f} A*·H^i` where `A* = H*(ambient)` and `H` is the hyperplane
//! class of the base. Classes are stored in this basis.

use serde::{Deserialize, Serialize};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::abelian::{self, middle_cohomology, quotient_by_span, solve_in_span, FinAbGroup};
use crate::error::{Error, Result};
use crate::lattice::{self, Lattice, LatticeVector};
use crate::matrix::{dot, IntegerMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetKind {
    CubicFourfold,
    K3LinearSystem,
}

/// Geometric input for a section ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AmbientPreset {
    pub kind: PresetKind,
    /// Middle cohomology of the ambient variety.
    pub lattice: Lattice,
    /// `h²` for the cubic, `c1(L)` for the K3.
    pub distinguished: LatticeVector,
    /// Fiber dimension `f` of `q: 𝒴 → ambient`.
    pub fiber_dim: usize,
    /// Dimension `N` of the base `B = P^N`.
    pub base_dim: usize,
    /// Complex dimension `n` of the ambient variety.
    pub ambient_dim: usize,
    /// `∫ ℓ^n` for the polarization `ℓ`.
    #[serde(with = "crate::matrix::bigint_str")]
    pub top_degree: BigInt,
    pub genus: Option<u32>,
}

impl AmbientPreset {
    /// Cubic fourfold preset from a rank-23 unimodular lattice and `h²` of square 3.
    pub fn cubic(lattice: Lattice, h2: LatticeVector) -> Result<Self> {
        if lattice.rank() != 23 {
            return Err(Error::BadPreset(format!("cubic lattice has rank {}, expected 23", lattice.rank())));
        }
        if !lattice.is_unimodular() {
            return Err(Error::BadPreset("cubic lattice is not unimodular".into()));
        }
        let sq = lattice.norm(&h2).map_err(|e| Error::BadPreset(e.to_string()))?;
        if sq != BigInt::from(3) {
            return Err(Error::BadPreset(format!("(h²)² = {sq}, expected 3")));
        }
        Ok(Self {
            kind: PresetKind::CubicFourfold,
            lattice,
            distinguished: h2,
            fiber_dim: 4,
            base_dim: 5,
            ambient_dim: 4,
            top_degree: BigInt::from(3),
            genus: None,
        })
    }

    pub fn cubic_default() -> Self {
        Self::cubic(lattice::cubic_h4_default(), lattice::cubic_h2_default()).expect("default cubic is valid")
    }

    /// K3 preset from a rank-22 unimodular lattice and a primitive `c1(L)` of square `2g − 2`.
    pub fn k3(lattice: Lattice, l: LatticeVector, g: u32) -> Result<Self> {
        if lattice.rank() != 22 {
            return Err(Error::BadPreset(format!("K3 lattice has rank {}, expected 22", lattice.rank())));
        }
        if !lattice.is_unimodular() {
            return Err(Error::BadPreset("K3 lattice is not unimodular".into()));
        }
        if g < 2 {
            return Err(Error::BadPreset(format!("genus {g} < 2")));
        }
        if !l.content().is_one() {
            return Err(Error::BadPreset("c1(L) is not primitive".into()));
        }
        let sq = lattice.norm(&l).map_err(|e| Error::BadPreset(e.to_string()))?;
        if sq != BigInt::from(2 * g - 2) {
            return Err(Error::BadPreset(format!("L² = {sq}, expected {}", 2 * g - 2)));
        }
        Ok(Self {
            kind: PresetKind::K3LinearSystem,
            lattice,
            distinguished: l,
            fiber_dim: g as usize - 1,
            base_dim: g as usize,
            ambient_dim: 2,
            top_degree: sq,
            genus: Some(g),
        })
    }

    pub fn k3_default(g: u32) -> Result<Self> {
        Self::k3(lattice::k3_lattice(), lattice::k3_polarization(g), g)
    }

    /// Complex degree of the middle lattice inside the ambient cohomology.
    pub fn middle_degree(&self) -> usize {
        self.ambient_dim / 2
    }

    /// Relative dimension `d` of `p: 𝒴 → B`.
    pub fn relative_dim(&self) -> usize {
        self.ambient_dim - 1
    }

    /// Complex dimension of `𝒴`.
    pub fn total_dim(&self) -> usize {
        self.ambient_dim + self.base_dim - 1
    }
}

/// A class in `H^{2·degree}(𝒴)`: `components[i] ∈ A^{degree − i}` is the coefficient of `H^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SectionRingClass {
    pub degree: usize,
    #[serde(with = "components_str")]
    pub components: Vec<Vec<BigInt>>,
}

mod components_str {
    use num_bigint::BigInt;
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(c: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        c.iter()
            .map(|v| v.iter().map(ToString::to_string).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }
}

impl SectionRingClass {
    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.iter().all(Zero::is_zero))
    }
}

/// A class on the base `B = P^N`: coefficients of `H^0, …, H^N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BaseClass {
    #[serde(with = "crate::matrix::bigint_vec_str")]
    pub coefficients: Vec<BigInt>,
}

impl BaseClass {
    pub fn coefficient(&self, j: usize) -> BigInt {
        self.coefficients.get(j).cloned().unwrap_or_default()
    }
}

/// Ambient class of a given complex degree.
type AmbientClass = (usize, Vec<BigInt>);

/// The ring `H*(𝒴, Z)` with its tautological relation.
#[derive(Clone, Debug)]
pub struct SectionRing {
    preset: AmbientPreset,
    ranks: Vec<usize>,
    ell: Vec<BigInt>,
}

pub fn build_ring(preset: &AmbientPreset) -> Result<SectionRing> {
    let n = preset.ambient_dim;
    let mid = preset.middle_degree();
    let ranks: Vec<usize> = (0..=n).map(|k| if k == mid { preset.lattice.rank() } else { 1 }).collect();
    let ell = match preset.kind {
        PresetKind::CubicFourfold => vec![BigInt::one()],
        PresetKind::K3LinearSystem => preset.distinguished.0.clone(),
    };
    if preset.fiber_dim + 1 != preset.base_dim {
        return Err(Error::BadPreset("fiber dimension must be N − 1".into()));
    }
    Ok(SectionRing { preset: preset.clone(), ranks, ell })
}

impl SectionRing {
    pub fn preset(&self) -> &AmbientPreset {
        &self.preset
    }

    fn n(&self) -> usize {
        self.preset.ambient_dim
    }

    fn f(&self) -> usize {
        self.preset.fiber_dim
    }

    fn big_n(&self) -> usize {
        self.preset.base_dim
    }

    pub fn top_degree(&self) -> usize {
        self.preset.total_dim()
    }

    fn ambient_rank(&self, k: isize) -> usize {
        if k < 0 || k as usize > self.n() {
            0
        } else {
            self.ranks[k as usize]
        }
    }

    fn ambient_zero(&self, k: usize) -> Vec<BigInt> {
        vec![BigInt::zero(); self.ambient_rank(k as isize)]
    }

    fn pair(&self, a: &[BigInt], b: &[BigInt]) -> BigInt {
        dot(&self.preset.lattice.gram().mul_vec(b).expect("middle vector"), a)
    }

    /// Product in the ambient cohomology; `None` beyond the top degree.
    fn ambient_mul(&self, (da, a): (usize, &[BigInt]), (db, b): (usize, &[BigInt])) -> Option<Vec<BigInt>> {
        if da + db > self.n() {
            return None;
        }
        if da > db {
            return self.ambient_mul((db, b), (da, a));
        }
        if da == 0 {
            return Some(b.iter().map(|x| x * &a[0]).collect());
        }
        match self.preset.kind {
            PresetKind::CubicFourfold => {
                let h2 = &self.preset.distinguished.0;
                Some(match (da, db) {
                    (1, 1) => h2.iter().map(|x| x * &a[0] * &b[0]).collect(),
                    (1, 2) => vec![&a[0] * self.pair(b, h2)],
                    (1, 3) => vec![&a[0] * &b[0]],
                    (2, 2) => vec![self.pair(a, b)],
                    _ => unreachable!("degrees bounded by the ambient dimension"),
                })
            }
            PresetKind::K3LinearSystem => Some(vec![self.pair(a, b)]),
        }
    }

    fn ell_power_times(&self, i: usize, (deg, a): (usize, &[BigInt])) -> Option<Vec<BigInt>> {
        let mut cur = a.to_vec();
        let mut d = deg;
        for _ in 0..i {
            cur = self.ambient_mul((1, &self.ell), (d, &cur))?;
            d += 1;
        }
        Some(cur)
    }

    fn ambient_power_ell(&self, a: usize) -> Option<AmbientClass> {
        let one = vec![BigInt::one()];
        self.ell_power_times(a, (0, &one)).map(|v| (a, v))
    }

    /// `∫` over the ambient variety of a top-degree class.
    fn ambient_integral(&self, (deg, a): (usize, &[BigInt])) -> BigInt {
        if deg == self.n() {
            a[0].clone()
        } else {
            BigInt::zero()
        }
    }

    /// Rank of `H^{2c}(𝒴)`.
    pub fn rank(&self, c: usize) -> usize {
        (0..=self.f()).map(|i| self.ambient_rank(c as isize - i as isize)).sum()
    }

    /// Ranks of `H^k(𝒴)` for `k = 0..=2·dim`, odd degrees included.
    pub fn graded_ranks(&self) -> Vec<usize> {
        (0..=2 * self.top_degree()).map(|k| if k % 2 == 1 { 0 } else { self.rank(k / 2) }).collect()
    }

    pub fn zero(&self, c: usize) -> SectionRingClass {
        SectionRingClass {
            degree: c,
            components: (0..=self.f())
                .map(|i| if i <= c { self.ambient_zero(c - i) } else { Vec::new() })
                .collect(),
        }
    }

    pub fn one(&self) -> SectionRingClass {
        let mut x = self.zero(0);
        x.components[0] = vec![BigInt::one()];
        x
    }

    /// `q*α` for an ambient class of degree `deg`.
    pub fn pullback(&self, deg: usize, coords: &[BigInt]) -> Result<SectionRingClass> {
        if coords.len() != self.ambient_rank(deg as isize) {
            return Err(Error::DimensionMismatch(format!(
                "ambient class of degree {deg} needs {} coordinates",
                self.ambient_rank(deg as isize)
            )));
        }
        let mut x = self.zero(deg);
        x.components[0] = coords.to_vec();
        Ok(x)
    }

    /// `q*ℓ^a`.
    pub fn ell_power(&self, a: usize) -> SectionRingClass {
        match self.ambient_power_ell(a) {
            Some((_, v)) => self.pullback(a, &v).expect("rank matches"),
            None => self.zero(a),
        }
    }

    /// `p*H^j`, reduced into the basis.
    pub fn hyperplane_power(&self, j: usize) -> SectionRingClass {
        let mut raw: Vec<Vec<BigInt>> = (0..=j).map(|_| Vec::new()).collect();
        raw[j] = vec![BigInt::one()];
        self.reduce(j, raw)
    }

    /// Reduces `Σ raw[i]·H^i` (with `raw[i] ∈ A^{c−i}`) using the tautological relation
    /// `H^{f+1} = Σ_{i=1}^{f+1} (−1)^{i+1} ℓ^i H^{f+1−i}`.
    fn reduce(&self, c: usize, mut raw: Vec<Vec<BigInt>>) -> SectionRingClass {
        let f = self.f();
        for m in (f + 1..raw.len()).rev() {
            let a = std::mem::take(&mut raw[m]);
            if a.iter().all(Zero::is_zero) {
                continue;
            }
            let deg = c - m;
            for i in 1..=f + 1 {
                let Some(term) = self.ell_power_times(i, (deg, &a)) else { continue };
                let target = &mut raw[m - i];
                if target.is_empty() {
                    *target = vec![BigInt::zero(); term.len()];
                }
                for (t, x) in target.iter_mut().zip(term) {
                    if i % 2 == 1 {
                        *t += x;
                    } else {
                        *t -= x;
                    }
                }
            }
        }
        let mut out = self.zero(c);
        for (i, comp) in raw.into_iter().take(f + 1).enumerate() {
            if !comp.is_empty() && i <= c {
                out.components[i] = comp;
            }
        }
        out
    }

    /// Cup product.
    pub fn cup(&self, x: &SectionRingClass, y: &SectionRingClass) -> Result<SectionRingClass> {
        let c = x.degree + y.degree;
        if c > self.top_degree() {
            return Err(Error::DegreeOverflow { degree: 2 * c, top: 2 * self.top_degree() });
        }
        let mut raw: Vec<Vec<BigInt>> = vec![Vec::new(); 2 * self.f() + 1];
        for (i, a) in x.components.iter().enumerate() {
            if a.is_empty() || a.iter().all(Zero::is_zero) {
                continue;
            }
            for (j, b) in y.components.iter().enumerate() {
                if b.is_empty() || b.iter().all(Zero::is_zero) {
                    continue;
                }
                let Some(p) = self.ambient_mul((x.degree - i, a), (y.degree - j, b)) else { continue };
                let slot = &mut raw[i + j];
                if slot.is_empty() {
                    *slot = vec![BigInt::zero(); p.len()];
                }
                for (s, v) in slot.iter_mut().zip(p) {
                    *s += v;
                }
            }
        }
        Ok(self.reduce(c, raw))
    }

    /// `deg_𝒴` of a top-degree class: the ambient integral of its `H^f` component.
    pub fn degree(&self, x: &SectionRingClass) -> Result<BigInt> {
        if x.degree != self.top_degree() {
            return Err(Error::InvalidInput(format!(
                "degree of a class in H^{} but the top degree is {}",
                2 * x.degree,
                2 * self.top_degree()
            )));
        }
        let f = self.f();
        Ok(self.ambient_integral((self.n(), &x.components[f])))
    }

    /// `p_*` computed through the divisor `𝒴 ⊂ A × B` of class `ℓ + H`:
    /// `p_*(a·H^i) = (∫ a·ℓ) H^i + (∫ a) H^{i+1}`.
    pub fn push_to_base(&self, x: &SectionRingClass) -> BaseClass {
        let big_n = self.big_n();
        let mut coeffs = vec![BigInt::zero(); big_n + 1];
        for (i, a) in x.components.iter().enumerate() {
            if a.is_empty() {
                continue;
            }
            let deg = x.degree - i;
            if let Some(al) = self.ambient_mul((1, &self.ell), (deg, a)) {
                if i <= big_n {
                    coeffs[i] += self.ambient_integral((deg + 1, &al));
                }
            }
            if i < big_n {
                coeffs[i + 1] += self.ambient_integral((deg, a));
            }
        }
        BaseClass { coefficients: coeffs }
    }

    /// `deg_𝒴(x · H^N)`, the degree on a fiber of `p`.
    pub fn fiber_degree(&self, x: &SectionRingClass) -> Result<BigInt> {
        let fiber = self.hyperplane_power(self.big_n());
        self.degree(&self.cup(x, &fiber)?)
    }

    /// Coordinates of a class in the concatenated basis of `H^{2c}(𝒴)`.
    pub fn to_coords(&self, x: &SectionRingClass) -> Vec<BigInt> {
        let mut out = Vec::with_capacity(self.rank(x.degree));
        for (i, comp) in x.components.iter().enumerate() {
            let r = self.ambient_rank(x.degree as isize - i as isize);
            if comp.is_empty() {
                out.extend(std::iter::repeat(BigInt::zero()).take(r));
            } else {
                out.extend(comp.iter().cloned());
            }
        }
        out
    }

    pub fn from_coords(&self, c: usize, coords: &[BigInt]) -> Result<SectionRingClass> {
        if coords.len() != self.rank(c) {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for H^{} of rank {}",
                coords.len(),
                2 * c,
                self.rank(c)
            )));
        }
        let mut x = self.zero(c);
        let mut pos = 0;
        for i in 0..=self.f() {
            let r = self.ambient_rank(c as isize - i as isize);
            x.components[i] = coords[pos..pos + r].to_vec();
            pos += r;
        }
        Ok(x)
    }

    /// Two-way oracle: `deg_𝒴(ℓ^a H^b)` by reducing in the ring.
    pub fn monomial_degree_ring(&self, a: usize, b: usize) -> Result<BigInt> {
        let x = self.cup(&self.ell_power(a), &self.hyperplane_power(b))?;
        self.degree(&x)
    }

    /// Two-way oracle: `deg_{A×B}(ℓ^a H^b (ℓ + H))` with `∫ ℓ^n` taken from the preset.
    pub fn monomial_degree_divisor_lift(&self, a: usize, b: usize) -> BigInt {
        let (n, big_n) = (self.n(), self.big_n());
        let t = &self.preset.top_degree;
        let mut total = BigInt::zero();
        // ℓ^{a+1} H^b
        if a + 1 == n && b == big_n {
            total += t;
        }
        // ℓ^a H^{b+1}
        if a == n && b + 1 == big_n {
            total += t;
        }
        total
    }
}

/// `b` (cubic) or `β` (K3) with pairing 1 against the distinguished vector.
pub fn dual_class(preset: &AmbientPreset) -> Result<LatticeVector> {
    preset.lattice.dual_vector(&preset.distinguished)
}

/// `ξ_0, …, ξ_d`: `1, q*h, q*b, q*(bh)` for the cubic and `1, q*β` for the K3.
pub fn xi_family(ring: &SectionRing) -> Result<Vec<SectionRingClass>> {
    let preset = ring.preset();
    let b = dual_class(preset)?;
    match preset.kind {
        PresetKind::CubicFourfold => {
            let h = ring.ell_power(1);
            let qb = ring.pullback(2, &b.0)?;
            let bh = ring.cup(&qb, &h)?;
            Ok(vec![ring.one(), h, qb, bh])
        }
        PresetKind::K3LinearSystem => Ok(vec![ring.one(), ring.pullback(1, &b.0)?]),
    }
}

/// `P[i][j]` = coefficient of `H^{i−j}` in `p_*(ξ_i · ξ_{d−j})`; zero for `i < j` by degree.
pub fn decomposition_gram(ring: &SectionRing) -> Result<IntegerMatrix> {
    let xi = xi_family(ring)?;
    let d = xi.len() - 1;
    let mut p = IntegerMatrix::zeros(d + 1, d + 1);
    for i in 0..=d {
        for j in 0..=i {
            let prod = ring.cup(&xi[i], &xi[d - j])?;
            p[(i, j)] = ring.push_to_base(&prod).coefficient(i - j);
        }
    }
    Ok(p)
}

/// The two maps of the complex computing `H^k(B, Λ•)`, in the bases of the base
/// cohomology and of `H^{k+d}(𝒴)`.
#[derive(Clone, Debug)]
pub struct LambdaComplex {
    pub k: usize,
    /// Complex degree `(k + d)/2` of the middle term, `None` when `k + d` is odd.
    pub middle_degree: Option<usize>,
    pub first: IntegerMatrix,
    pub second: IntegerMatrix,
}

pub fn lambda_complex(ring: &SectionRing, k: usize) -> Result<LambdaComplex> {
    let preset = ring.preset();
    let big_n = preset.base_dim;
    if k > 2 * big_n - 1 {
        return Err(Error::IndexOutOfRange { index: k as i64, min: 0, max: 2 * big_n as i64 - 1 });
    }
    let d = preset.relative_dim();
    let total = k + d;
    if total % 2 == 1 {
        return Ok(LambdaComplex {
            k,
            middle_degree: None,
            first: IntegerMatrix::zeros(0, 0),
            second: IntegerMatrix::zeros(0, 0),
        });
    }
    let c = total / 2;
    let xi = xi_family(ring)?;
    let base_ok = |e: isize| e >= 0 && e as usize <= big_n;

    let mut first_cols = Vec::new();
    for (i, x) in xi.iter().enumerate().take((d - 1) / 2 + 1) {
        let e = c as isize - i as isize;
        if base_ok(e) {
            let cls = ring.cup(&ring.hyperplane_power(e as usize), x)?;
            first_cols.push(ring.to_coords(&cls));
        }
    }
    let dim = ring.rank(c);
    let first = IntegerMatrix::from_columns(dim, &first_cols)?;

    let basis: Vec<SectionRingClass> = (0..dim)
        .map(|t| {
            let mut e = vec![BigInt::zero(); dim];
            e[t] = BigInt::one();
            ring.from_coords(c, &e)
        })
        .collect::<Result<_>>()?;
    let mut second_rows = Vec::new();
    for j in (d + 1) / 2..=d {
        let e = c as isize - j as isize;
        if !base_ok(e) {
            continue;
        }
        let mut row = Vec::with_capacity(dim);
        for alpha in &basis {
            let prod = ring.cup(alpha, &xi[d - j])?;
            row.push(ring.push_to_base(&prod).coefficient(e as usize));
        }
        second_rows.push(row);
    }
    let second = if second_rows.is_empty() {
        IntegerMatrix::zeros(0, dim)
    } else {
        IntegerMatrix::from_rows(&second_rows)?
    };
    Ok(LambdaComplex { k, middle_degree: Some(c), first, second })
}

/// `H^k(B, Λ•)` as the middle cohomology of the complex.
pub fn lambda_cohomology(ring: &SectionRing, k: usize) -> Result<FinAbGroup> {
    let cx = lambda_complex(ring, k)?;
    if cx.middle_degree.is_none() {
        return Ok(FinAbGroup::trivial());
    }
    let g = middle_cohomology(&cx.first, &cx.second)?;
    if !g.is_free() {
        log::warn!("H^{k}(B, Λ•) has torsion {g}");
    }
    Ok(g)
}

/// Kernel representatives of `H^1(B, Λ•)` and the pairing `deg_𝒴(u·v·H^{N−1})`.
#[derive(Clone, Debug)]
pub struct HOnePairing {
    /// Basis of the complement of the distinguished vector in the middle lattice.
    pub primitive_basis: Vec<LatticeVector>,
    /// `q*α` for `α` in `primitive_basis`.
    pub representatives: Vec<SectionRingClass>,
    pub gram: Lattice,
}

pub fn h1_pairing_gram(ring: &SectionRing) -> Result<HOnePairing> {
    let preset = ring.preset();
    let cx = lambda_complex(ring, 1)?;
    let c = cx.middle_degree.ok_or_else(|| Error::BadPreset("H^1 complex has odd degree".into()))?;
    let (prim, _) = preset.lattice.orthogonal_complement(&[preset.middle_vector()])?;
    let mid = preset.middle_degree();
    let reps: Vec<SectionRingClass> = prim
        .iter()
        .map(|a| ring.pullback(mid, &a.0))
        .collect::<Result<_>>()?;
    if mid != c {
        return Err(Error::BadPreset("middle lattice is not in the H^1 degree".into()));
    }

    // The representatives together with the image of the first map span ker(second).
    let kernel = abelian::kernel(&cx.second);
    let dim = ring.rank(c);
    let mut in_kernel = Vec::new();
    for r in reps.iter().map(|r| ring.to_coords(r)).chain(cx.first.columns()) {
        let coords = solve_in_span(dim, &kernel, &r)?
            .ok_or_else(|| Error::BadPreset("representative is not a cycle".into()))?;
        in_kernel.push(coords);
    }
    if !quotient_by_span(kernel.len(), &in_kernel)?.is_trivial() {
        return Err(Error::BadPreset("representatives do not span H^1(B, Λ•)".into()));
    }

    let hn1 = ring.hyperplane_power(preset.base_dim - 1);
    let r = reps.len();
    let mut gram = IntegerMatrix::zeros(r, r);
    for i in 0..r {
        let ui = ring.cup(&reps[i], &hn1)?;
        for j in i..r {
            let v = ring.degree(&ring.cup(&ui, &reps[j])?)?;
            gram[(i, j)] = v.clone();
            gram[(j, i)] = v;
        }
    }
    Ok(HOnePairing { primitive_basis: prim, representatives: reps, gram: Lattice::new(gram)? })
}

impl AmbientPreset {
    /// The vector whose complement models `H^1(B, Λ•)`.
    pub fn middle_vector(&self) -> LatticeVector {
        self.distinguished.clone()
    }
}

/// `Σ^⊥` inside the middle lattice, the model of `H^1(B, Λ)`.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaPerp {
    pub basis: Vec<LatticeVector>,
    pub lattice: Lattice,
    pub group: FinAbGroup,
}

pub fn sigma_perp(preset: &AmbientPreset, sigma: &[LatticeVector]) -> Result<SigmaPerp> {
    let n = preset.lattice.rank();
    for s in sigma {
        if s.len() != n {
            return Err(Error::DimensionMismatch(format!("Σ generator of length {} in rank {n}", s.len())));
        }
    }
    let gens: Vec<Vec<BigInt>> = sigma.iter().map(|s| s.0.clone()).collect();
    if solve_in_span(n, &gens, &preset.distinguished.0)?.is_none() {
        return Err(Error::MissingDistinguishedVector);
    }
    let (basis, lattice) = preset.lattice.orthogonal_complement(sigma)?;
    let group = FinAbGroup::free(basis.len());
    Ok(SigmaPerp { basis, lattice, group })
}

/// Integral cohomology of a cubic threefold with defect `δ` and third Betti number `b3`.
pub fn threefold_cohomology(defect: usize, b3: usize) -> Vec<(usize, FinAbGroup)> {
    (0..=6)
        .map(|k| {
            let g = match k {
                0 | 2 | 6 => FinAbGroup::free(1),
                3 => FinAbGroup::free(b3),
                4 => FinAbGroup::free(1 + defect),
                _ => FinAbGroup::trivial(),
            };
            (k, g)
        })
        .collect()
}
