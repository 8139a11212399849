//! K3-type Hodge data and their Brauer groups.
//!
//! `Br_an(H)` is a complex line modulo a discrete subgroup and is never
//! represented directly; a [`BrauerDescriptor`] records its corank `τ` and
//! produces `m`-torsion on demand.

use std::fmt;

use log::warn;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::abelian::{self, cokernel_mod, element_order, solve_in_span, FinAbGroup};
use crate::error::{Error, Result};
use crate::lattice::{is_saturated, saturate, unit_preimage, Lattice, LatticeVector};
use crate::matrix::{dot, IntegerMatrix};

/// A lattice of K3 type together with its algebraic part `NS`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct K3HodgeDatum {
    pub lattice: Lattice,
    pub ns_basis: Vec<LatticeVector>,
    /// The `k` in weight `2k`.
    pub weight_index: u32,
    /// Repairs applied at construction.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl K3HodgeDatum {
    /// Builds a datum, replacing `ns` by its saturation when needed.
    pub fn new(lattice: Lattice, ns: Vec<LatticeVector>, weight_index: u32) -> Result<Self> {
        Self::build(lattice, ns, weight_index, false)
    }

    /// Like [`K3HodgeDatum::new`] but rejects a non-saturated `ns`.
    pub fn new_strict(lattice: Lattice, ns: Vec<LatticeVector>, weight_index: u32) -> Result<Self> {
        Self::build(lattice, ns, weight_index, true)
    }

    fn build(lattice: Lattice, ns: Vec<LatticeVector>, weight_index: u32, strict: bool) -> Result<Self> {
        let n = lattice.rank();
        for v in &ns {
            if v.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "NS vector of length {} in a lattice of rank {n}",
                    v.len()
                )));
            }
        }
        let mut diagnostics = Vec::new();
        let independent = abelian::rank(&columns(n, &ns)) == ns.len();
        let ns_basis = if independent && is_saturated(n, &ns) {
            ns
        } else {
            if strict {
                return Err(Error::NotSaturated);
            }
            let sat = saturate(n, &ns);
            let msg = format!(
                "NS generators replaced by a basis of their saturation (rank {})",
                sat.len()
            );
            warn!("{msg}");
            diagnostics.push(msg);
            sat
        };
        Ok(Self { lattice, ns_basis, weight_index, diagnostics })
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn ns_rank(&self) -> usize {
        self.ns_basis.len()
    }

    /// `n × ρ` matrix whose columns are the NS basis.
    pub fn ns_matrix(&self) -> IntegerMatrix {
        columns(self.rank(), &self.ns_basis)
    }

    /// Whether `v` lies in NS.
    pub fn contains(&self, v: &LatticeVector) -> Result<bool> {
        let gens: Vec<Vec<BigInt>> = self.ns_basis.iter().map(|x| x.0.clone()).collect();
        Ok(solve_in_span(self.rank(), &gens, &v.0)?.is_some())
    }
}

fn columns(n: usize, vs: &[LatticeVector]) -> IntegerMatrix {
    let cols: Vec<Vec<BigInt>> = vs.iter().map(|v| v.0.clone()).collect();
    IntegerMatrix::from_columns(n, &cols).expect("lengths checked")
}

/// `Br_an(H)`: a complex line modulo a discrete subgroup of rank `τ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BrauerDescriptor {
    pub transcendental_corank: usize,
}

impl BrauerDescriptor {
    pub fn new(tau: usize) -> Self {
        Self { transcendental_corank: tau }
    }

    pub fn tau(&self) -> usize {
        self.transcendental_corank
    }

    pub fn is_trivial(&self) -> bool {
        self.transcendental_corank == 0
    }

    /// The `m`-torsion `(Z/m)^τ`.
    pub fn torsion(&self, m: &BigInt) -> FinAbGroup {
        FinAbGroup::new(0, &vec![m.abs(); self.transcendental_corank])
    }

    pub fn symbolic(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for BrauerDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.transcendental_corank {
            0 => write!(f, "0"),
            t => write!(f, "C mod Z^{t}"),
        }
    }
}

/// `τ = rank H − rank NS`.
pub fn brauer_an(datum: &K3HodgeDatum) -> BrauerDescriptor {
    BrauerDescriptor::new(datum.rank() - datum.ns_rank())
}

/// `coker(NS ⊗ Z/m → H ⊗ Z/m)`, the `m`-torsion of `Br(H)`.
pub fn brauer_torsion(datum: &K3HodgeDatum, m: &BigInt) -> Result<FinAbGroup> {
    if !m.is_positive() {
        return Err(Error::InvalidInput(format!("modulus must be positive, got {m}")));
    }
    cokernel_mod(&datum.ns_matrix(), m)
}

/// Kernel of `Br_an(ker v) → Br_an(G)` for a surjective functional `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RestrictionKernel {
    /// `v(NS(G)) = mZ`.
    #[serde(with = "crate::matrix::bigint_str")]
    pub m: BigInt,
    /// `G / (ker v + NS(G))`, cyclic of order `m` (infinite cyclic when `m = 0`).
    pub kernel_group: FinAbGroup,
    /// `s − m·g` reduced mod `m`, in the coordinates of `G`.
    pub generator: Option<LatticeVector>,
    /// Order of the generator in `coker(NS(H) ⊗ Z/m → H ⊗ Z/m)`.
    #[serde(with = "opt_bigint")]
    pub generator_order: Option<BigInt>,
    /// Saturated basis of `H = ker v`.
    pub h_basis: Vec<LatticeVector>,
    /// Basis of `NS(H) = NS(G) ∩ H`.
    pub ns_h_basis: Vec<LatticeVector>,
    /// The datum `(H, NS(H))` with the induced form.
    #[serde(skip)]
    pub sub_datum: Option<K3HodgeDatum>,
}

mod opt_bigint {
    use num_bigint::BigInt;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_str(&v.to_string()),
            None => s.serialize_none(),
        }
    }
}

/// Evaluates the functional `v` on `x`.
fn eval(v: &[BigInt], x: &LatticeVector) -> BigInt {
    dot(v, &x.0)
}

/// Computes the restriction kernel with canonical choices of `g` and `s`.
pub fn restriction_kernel(datum: &K3HodgeDatum, v: &[BigInt]) -> Result<RestrictionKernel> {
    check_functional(datum, v)?;
    let g = unit_preimage(v).expect("surjectivity checked");
    let values: Vec<BigInt> = datum.ns_basis.iter().map(|x| eval(v, x)).collect();
    let m = values.iter().fold(BigInt::zero(), |a, x| a.gcd(x));
    let s = if m.is_zero() {
        LatticeVector::zero(datum.rank())
    } else {
        let scaled: Vec<BigInt> = values.iter().map(|x| x / &m).collect();
        let c = unit_preimage(&scaled).expect("gcd of scaled values is one");
        combine(datum.rank(), &datum.ns_basis, &c.0)
    };
    restriction_kernel_with(datum, v, &g, &s)
}

fn check_functional(datum: &K3HodgeDatum, v: &[BigInt]) -> Result<()> {
    if v.len() != datum.rank() {
        return Err(Error::DimensionMismatch(format!(
            "functional of length {} on a lattice of rank {}",
            v.len(),
            datum.rank()
        )));
    }
    let g = v.iter().fold(BigInt::zero(), |a, x| a.gcd(x));
    if !g.is_one() {
        return Err(Error::NotSurjective(g.to_string()));
    }
    Ok(())
}

fn combine(n: usize, basis: &[LatticeVector], c: &[BigInt]) -> LatticeVector {
    let mut out = LatticeVector::zero(n);
    for (b, k) in basis.iter().zip(c) {
        out = out.add(&b.scale(k));
    }
    out
}

/// Computes the restriction kernel for given `g` with `v(g) = 1` and `s ∈ NS` with `v(s) = m`.
pub fn restriction_kernel_with(
    datum: &K3HodgeDatum,
    v: &[BigInt],
    g: &LatticeVector,
    s: &LatticeVector,
) -> Result<RestrictionKernel> {
    check_functional(datum, v)?;
    let n = datum.rank();
    if !eval(v, g).is_one() {
        return Err(Error::PreconditionViolated(vec![format!("v(g) = {} instead of 1", eval(v, g))]));
    }
    if !datum.contains(s)? {
        return Err(Error::PreconditionViolated(vec!["s is not in NS".into()]));
    }
    let values: Vec<BigInt> = datum.ns_basis.iter().map(|x| eval(v, x)).collect();
    let m = values.iter().fold(BigInt::zero(), |a, x| a.gcd(x));
    if eval(v, s) != m {
        return Err(Error::PreconditionViolated(vec![format!("v(s) = {} instead of {m}", eval(v, s))]));
    }

    let row = IntegerMatrix::new(1, n, v.to_vec())?;
    let h_basis: Vec<LatticeVector> = abelian::kernel(&row).into_iter().map(LatticeVector).collect();
    let ns_h_basis: Vec<LatticeVector> = if datum.ns_basis.is_empty() {
        Vec::new()
    } else {
        let vrow = IntegerMatrix::new(1, values.len(), values.clone())?;
        abelian::kernel(&vrow)
            .into_iter()
            .map(|c| combine(n, &datum.ns_basis, &c))
            .collect()
    };

    // Coordinates of vectors of H in the basis `h_basis`.
    let h_gens: Vec<Vec<BigInt>> = h_basis.iter().map(|x| x.0.clone()).collect();
    let to_h = |x: &LatticeVector| -> Result<Vec<BigInt>> {
        solve_in_span(n, &h_gens, &x.0)?
            .ok_or_else(|| Error::InvalidInput("vector does not lie in ker v".into()))
    };
    let ns_h_coords: Vec<Vec<BigInt>> = ns_h_basis.iter().map(&to_h).collect::<Result<_>>()?;
    let h_lattice = datum.lattice.sublattice(&h_basis)?;
    let ns_h_in_h: Vec<LatticeVector> = ns_h_coords.iter().cloned().map(LatticeVector).collect();
    let sub_datum = K3HodgeDatum::new(h_lattice, ns_h_in_h, datum.weight_index)?;

    let (generator, generator_order) = if m.is_zero() {
        (None, None)
    } else {
        let t = s.sub(&g.scale(&m));
        let t_h = to_h(&t)?;
        let k = h_basis.len();
        let mut cols = ns_h_coords.clone();
        for i in 0..k {
            let mut e = vec![BigInt::zero(); k];
            e[i] = m.clone();
            cols.push(e);
        }
        let rel = IntegerMatrix::from_columns(k, &cols)?;
        let order = element_order(&rel, &t_h)?;
        (Some(t.reduce_mod(&m)), order)
    };
    let kernel_group = if m.is_zero() { FinAbGroup::free(1) } else { FinAbGroup::cyclic(m.clone()) };
    Ok(RestrictionKernel {
        m,
        kernel_group,
        generator,
        generator_order,
        h_basis,
        ns_h_basis,
        sub_datum: Some(sub_datum),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{cubic_h2_default, cubic_h4_default, k3_lattice, k3_polarization, unit};
    use proptest::prelude::*;

    fn cubic_datum(ns: Vec<LatticeVector>) -> K3HodgeDatum {
        K3HodgeDatum::new(cubic_h4_default(), ns, 2).unwrap()
    }

    fn h2_functional() -> Vec<BigInt> {
        cubic_h4_default().functional(&cubic_h2_default()).unwrap()
    }

    #[test]
    fn brauer_an_examples() {
        let full = K3HodgeDatum::new(unit(3), (0..3).map(|i| LatticeVector::basis(3, i)).collect(), 1).unwrap();
        assert!(brauer_an(&full).is_trivial());
        let k3 = K3HodgeDatum::new(k3_lattice(), vec![k3_polarization(2)], 1).unwrap();
        assert_eq!(brauer_an(&k3).tau(), 21);
        assert_eq!(brauer_an(&cubic_datum(vec![cubic_h2_default()])).tau(), 22);
        assert_eq!(brauer_an(&cubic_datum(vec![cubic_h2_default()])).to_string(), "C mod Z^22");
    }

    #[test]
    fn brauer_torsion_examples() {
        let d = cubic_datum(vec![cubic_h2_default()]);
        let three = BigInt::from(3);
        assert_eq!(brauer_torsion(&d, &three).unwrap(), brauer_an(&d).torsion(&three));
        assert_eq!(brauer_torsion(&d, &three).unwrap().torsion().len(), 22);
        assert!(brauer_torsion(&d, &BigInt::one()).unwrap().is_trivial());
        let full = K3HodgeDatum::new(unit(2), vec![LatticeVector::basis(2, 0), LatticeVector::basis(2, 1)], 1).unwrap();
        assert!(brauer_torsion(&full, &BigInt::from(5)).unwrap().is_trivial());
    }

    #[test]
    fn saturation_is_repaired_or_rejected() {
        let twice = vec![cubic_h2_default().scale(&BigInt::from(2))];
        let d = K3HodgeDatum::new(cubic_h4_default(), twice.clone(), 2).unwrap();
        assert_eq!(d.diagnostics.len(), 1);
        assert_eq!(d.ns_basis[0].content(), BigInt::one());
        assert_eq!(K3HodgeDatum::new_strict(cubic_h4_default(), twice, 2), Err(Error::NotSaturated));
    }

    #[test]
    fn cubic_restriction_kernel() {
        let d = cubic_datum(vec![cubic_h2_default()]);
        let rk = restriction_kernel(&d, &h2_functional()).unwrap();
        assert_eq!(rk.m, BigInt::from(3));
        assert_eq!(rk.generator_order, Some(BigInt::from(3)));
        // h² − 3b with b = e1 reduces to (1, 1, 1, 0, …) mod 3.
        let b = cubic_h4_default().dual_vector(&cubic_h2_default()).unwrap();
        let t = cubic_h2_default().sub(&b.scale(&BigInt::from(3)));
        assert_eq!(rk.generator.unwrap(), t.reduce_mod(&BigInt::from(3)));
        assert_eq!(rk.h_basis.len(), 22);
        assert!(rk.ns_h_basis.is_empty());
    }

    #[test]
    fn unit_pairing_class_gives_trivial_kernel() {
        let b = LatticeVector::basis(23, 0);
        let d = cubic_datum(vec![cubic_h2_default(), b]);
        let rk = restriction_kernel(&d, &h2_functional()).unwrap();
        assert!(rk.m.is_one());
        assert!(rk.kernel_group.is_trivial());
    }

    #[test]
    fn k3_restriction_kernel_is_divisibility() {
        for g in 2..=4u32 {
            let l = k3_polarization(g);
            let d = K3HodgeDatum::new(k3_lattice(), vec![l.clone()], 1).unwrap();
            let v = k3_lattice().functional(&l).unwrap();
            let rk = restriction_kernel(&d, &v).unwrap();
            assert_eq!(rk.m, BigInt::from(2 * g - 2));
            assert_eq!(rk.generator_order, Some(rk.m.clone()));
        }
    }

    #[test]
    fn non_surjective_functional() {
        let d = cubic_datum(vec![cubic_h2_default()]);
        let v: Vec<BigInt> = h2_functional().iter().map(|x| x * 2).collect();
        assert!(matches!(restriction_kernel(&d, &v), Err(Error::NotSurjective(_))));
    }

    proptest! {
        #[test]
        fn torsion_order_is_m_to_tau(extra in proptest::collection::vec(proptest::collection::vec(-2i64..=2, 23), 0..3), m in 1i64..=12) {
            let mut ns = vec![cubic_h2_default()];
            ns.extend(extra.iter().map(|r| LatticeVector::from_i64(r)));
            let d = cubic_datum(ns);
            let tau = brauer_an(&d).tau() as u32;
            let m = BigInt::from(m);
            prop_assert_eq!(brauer_torsion(&d, &m).unwrap().order(), Some(m.pow(tau)));
        }

        #[test]
        fn generator_independent_of_choices(
            x in proptest::collection::vec(-3i64..=3, 23),
            extra in proptest::collection::vec(proptest::collection::vec(-2i64..=2, 23), 0..2),
            k in -3i64..=3,
        ) {
            let mut ns = vec![cubic_h2_default()];
            ns.extend(extra.iter().map(|r| LatticeVector::from_i64(r)));
            let d = cubic_datum(ns);
            let v = h2_functional();
            let base = restriction_kernel(&d, &v).unwrap();
            prop_assume!(!base.m.is_zero());
            // Move g inside ker v and s inside NS(H).
            let x = LatticeVector::from_i64(&x);
            let shift = x.sub(&LatticeVector::basis(23, 0).scale(&eval(&v, &x)));
            let g0 = unit_preimage(&v).unwrap();
            let g = g0.add(&shift);
            let values: Vec<BigInt> = d.ns_basis.iter().map(|y| eval(&v, y)).collect();
            let scaled: Vec<BigInt> = values.iter().map(|y| y / &base.m).collect();
            let s0 = combine(23, &d.ns_basis, &unit_preimage(&scaled).unwrap().0);
            let s = match base.ns_h_basis.first() {
                Some(y) => s0.add(&y.scale(&BigInt::from(k))),
                None => s0,
            };
            let other = restriction_kernel_with(&d, &v, &g, &s).unwrap();
            prop_assert_eq!(&other.m, &base.m);
            prop_assert_eq!(&other.generator_order, &Some(base.m.clone()));
            // The two generators differ by an element of NS(H) + m·H.
            let diff = other.generator.unwrap().sub(base.generator.as_ref().unwrap());
            let mut gens: Vec<Vec<BigInt>> = base.ns_h_basis.iter().map(|y| y.0.clone()).collect();
            gens.extend(base.h_basis.iter().map(|y| y.scale(&base.m).0));
            // Reduction mod m may leave ker v, so also allow multiples of m·e_i.
            for i in 0..23 { gens.push(LatticeVector::basis(23, i).scale(&base.m).0); }
            prop_assert!(solve_in_span(23, &gens, &diff.0).unwrap().is_some());
            // v kills the generator mod m.
            prop_assert!((eval(&v, base.generator.as_ref().unwrap()) % &base.m).is_zero());
        }
    }
}
