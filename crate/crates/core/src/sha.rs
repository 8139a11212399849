//! Sections, Tate–Shafarevich data and degree twists of intermediate Jacobian
//! fibrations, with the Beauville–Mukai analogue for polarized K3 surfaces.
//!
//! The Tate–Shafarevich group is reported as an extension
//! `first_term ↪ Sha⁰ ↠ Br_an` rather than as a single group token.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::abelian::{self, quotient_by_span, solve_in_span, FinAbGroup};
use crate::brauer::{brauer_an, restriction_kernel, BrauerDescriptor, K3HodgeDatum};
use crate::error::{Error, Result};
use crate::lattice::{self, Lattice, LatticeInvariants, LatticeVector};
use crate::matrix::IntegerMatrix;
use crate::section_ring::{build_ring, dual_class, lambda_cohomology, sigma_perp, AmbientPreset, SectionRing};

/// A cubic fourfold datum.
#[derive(Clone, Debug)]
pub struct CubicInput {
    pub hodge: K3HodgeDatum,
    pub h2: LatticeVector,
    /// Generators of `Σ`; `None` means `Σ = Z h²`.
    pub sigma: Option<Vec<LatticeVector>>,
    pub defect_general: bool,
}

impl CubicInput {
    /// Defect-general input with `Σ = Z h²`.
    pub fn new(hodge: K3HodgeDatum, h2: LatticeVector) -> Self {
        Self { hodge, h2, sigma: None, defect_general: true }
    }

    /// Input with a user-supplied `Σ`, not assumed defect general.
    pub fn with_sigma(hodge: K3HodgeDatum, h2: LatticeVector, sigma: Vec<LatticeVector>) -> Self {
        Self { hodge, h2, sigma: Some(sigma), defect_general: false }
    }

    /// `NS = Z h² + extra` on the default lattice.
    pub fn default_with_ns(extra: &[LatticeVector]) -> Result<Self> {
        let h2 = lattice::cubic_h2_default();
        let mut ns = vec![h2.clone()];
        ns.extend(extra.iter().cloned());
        Ok(Self::new(K3HodgeDatum::new(lattice::cubic_h4_default(), ns, 2)?, h2))
    }

    pub fn sigma_generators(&self) -> Vec<LatticeVector> {
        self.sigma.clone().unwrap_or_else(|| vec![self.h2.clone()])
    }

    pub fn preset(&self) -> Result<AmbientPreset> {
        AmbientPreset::cubic(self.hodge.lattice.clone(), self.h2.clone())
    }

    fn validate(&self) -> Result<AmbientPreset> {
        if self.hodge.weight_index != 2 {
            return Err(Error::InvalidInput("cubic datum must have weight 4".into()));
        }
        let preset = self.preset()?;
        if !self.hodge.contains(&self.h2)? {
            return Err(Error::MissingDistinguishedVector);
        }
        if self.defect_general {
            if let Some(s) = &self.sigma {
                let n = self.hodge.rank();
                if lattice::saturate(n, s) != lattice::saturate(n, &[self.h2.clone()]) {
                    return Err(Error::InvalidInput("defect-general input needs Σ = Z h²".into()));
                }
            }
        }
        Ok(preset)
    }
}

/// `first_term → Sha⁰ → Br_an(X) → 0`, with `Sha⁰ ≅ Br_an(Σ^⊥)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShaExtension {
    /// `H/(Σ + Σ^⊥)`, the source of the first map (`Z/3` for a cubic).
    pub source: FinAbGroup,
    /// `H/(NS + Σ^⊥)`, the image of the first map.
    pub first_term: FinAbGroup,
    pub first_map_injective: bool,
    /// `Br_an(Σ^⊥)` with the induced algebraic part.
    pub middle: BrauerDescriptor,
    pub quotient: BrauerDescriptor,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistGenerator {
    /// `h² − 3b` reduced mod 3.
    pub class_mod3: LatticeVector,
    pub dual_class: LatticeVector,
    /// Order of the image of the generator; `d` of the report.
    #[serde(with = "crate::matrix::bigint_str")]
    pub order: BigInt,
    /// `t · h² ≡ 0 mod 3`.
    pub primitive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HigherCohomology {
    pub k: usize,
    /// `H^{2k}(B, 𝒥) = H^{2k+1}(Λ•)`.
    pub h2k_j: FinAbGroup,
    /// `H^{2k}(B, 𝒥̃)`, an extension of `Z` by `H^{2k}(B, 𝒥)`; split since both are free.
    pub h2k_jtilde: FinAbGroup,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub items: Vec<CheckItem>,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.items.push(CheckItem { name: name.into(), passed, detail: detail.into() });
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ShaReport {
    pub defect_general: bool,
    #[serde(with = "crate::matrix::bigint_str")]
    pub d: BigInt,
    pub h0_j: usize,
    pub h0_jtilde: usize,
    pub h1_jtilde: BrauerDescriptor,
    pub first_term: FinAbGroup,
    pub sha0: ShaExtension,
    pub mw_rank: usize,
    pub sigma_perp_rank: usize,
    pub twist_generator: Option<TwistGenerator>,
    pub higher: Vec<HigherCohomology>,
    pub og10_checks: CheckRecord,
    /// Fields that depend on `H²(B, Λ)` and are not computed outside the defect-general case.
    pub not_computed: Vec<String>,
}

/// Pieces shared by the cubic and K3 reports.
struct Core {
    d: BigInt,
    rho: usize,
    h0_j: usize,
    source: FinAbGroup,
    first_term: FinAbGroup,
    sigma_perp: Vec<LatticeVector>,
    middle: BrauerDescriptor,
    quotient: BrauerDescriptor,
}

fn sha_core(datum: &K3HodgeDatum, distinguished: &LatticeVector, sigma: &[LatticeVector], preset: &AmbientPreset) -> Result<Core> {
    let n = datum.rank();
    let d = datum.lattice.divisibility_in(distinguished, &datum.ns_basis)?;
    let perp = sigma_perp(preset, sigma)?;
    let gens = |extra: &[LatticeVector]| -> Vec<Vec<BigInt>> {
        extra.iter().chain(&perp.basis).map(|v| v.0.clone()).collect()
    };
    let source = quotient_by_span(n, &gens(sigma))?;
    let first_term = quotient_by_span(n, &gens(&datum.ns_basis))?;

    // NS ∩ Σ^⊥: NS combinations killed by pairing with every generator of Σ.
    let rho = datum.ns_rank();
    let ns_perp: Vec<LatticeVector> = if rho == 0 {
        Vec::new()
    } else {
        let rows: Vec<Vec<BigInt>> = sigma
            .iter()
            .map(|s| datum.ns_basis.iter().map(|x| datum.lattice.pairing(s, x)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let m = if rows.is_empty() { IntegerMatrix::zeros(0, rho) } else { IntegerMatrix::from_rows(&rows)? };
        abelian::kernel(&m)
            .into_iter()
            .map(|c| {
                datum.ns_basis.iter().zip(&c).fold(LatticeVector::zero(n), |acc, (b, k)| acc.add(&b.scale(k)))
            })
            .collect()
    };
    let h0_j = ns_perp.len();

    // Br_an(Σ^⊥) with NS(Σ^⊥) = NS ∩ Σ^⊥ written in the basis of Σ^⊥.
    let perp_gens: Vec<Vec<BigInt>> = perp.basis.iter().map(|v| v.0.clone()).collect();
    let mut ns_in_perp = Vec::with_capacity(ns_perp.len());
    for v in &ns_perp {
        let c = solve_in_span(n, &perp_gens, &v.0)?
            .ok_or_else(|| Error::InvalidInput("NS ∩ Σ^⊥ is not inside Σ^⊥".into()))?;
        ns_in_perp.push(LatticeVector(c));
    }
    let middle = brauer_an(&K3HodgeDatum::new(perp.lattice.clone(), ns_in_perp, datum.weight_index)?);
    Ok(Core {
        d,
        rho,
        h0_j,
        source,
        first_term,
        sigma_perp: perp.basis,
        middle,
        quotient: brauer_an(datum),
    })
}

impl Core {
    fn extension(&self) -> ShaExtension {
        let injective = self.source.order() == self.first_term.order();
        ShaExtension {
            source: self.source.clone(),
            first_term: self.first_term.clone(),
            first_map_injective: injective,
            middle: self.middle,
            quotient: self.quotient,
        }
    }
}

/// The cubic fourfold report.
pub fn og10_sha_report(input: &CubicInput) -> Result<ShaReport> {
    let preset = input.validate()?;
    let sigma = input.sigma_generators();
    let core = sha_core(&input.hodge, &input.h2, &sigma, &preset)?;
    let mut not_computed = Vec::new();
    let (twist_generator, higher) = if input.defect_general {
        let ring = build_ring(&preset)?;
        let higher = (1..=4).map(|k| higher_j_cohomology(&ring, k)).collect::<Result<Vec<_>>>()?;
        (Some(degree_twist_generator(input)?), higher)
    } else {
        not_computed.extend(
            ["twist_generator", "higher", "H^1(B,J)/H^1(B,J)^0 (needs H^2(B,Λ))"].map(String::from),
        );
        (None, Vec::new())
    };
    Ok(ShaReport {
        defect_general: input.defect_general,
        d: core.d.clone(),
        h0_j: core.h0_j,
        h0_jtilde: core.rho,
        h1_jtilde: core.quotient,
        first_term: core.first_term.clone(),
        sha0: core.extension(),
        mw_rank: core.h0_j,
        sigma_perp_rank: core.sigma_perp.len(),
        twist_generator,
        higher,
        og10_checks: og10_lattice_check(&input.hodge.lattice, &input.h2, &input.hodge.ns_basis),
        not_computed,
    })
}

/// `H^{2k}(B, 𝒥)` and `H^{2k}(B, 𝒥̃)` for `1 ≤ k ≤ 4`; odd degrees vanish.
pub fn higher_j_cohomology(ring: &SectionRing, k: usize) -> Result<HigherCohomology> {
    let max = (ring.preset().base_dim as i64 - 1) as usize;
    if k == 0 || k > max {
        return Err(Error::IndexOutOfRange { index: k as i64, min: 1, max: max as i64 });
    }
    let lam = lambda_cohomology(ring, 2 * k + 1)?;
    let tilde = lam.direct_sum(&FinAbGroup::free(1));
    Ok(HigherCohomology { k, h2k_j: lam, h2k_jtilde: tilde })
}

/// `t = h² − 3b` mod 3 and the order of its image.
pub fn degree_twist_generator(input: &CubicInput) -> Result<TwistGenerator> {
    if !input.defect_general {
        return Err(Error::InvalidInput("the degree twist generator needs a defect-general input".into()));
    }
    let preset = input.validate()?;
    let b = dual_class(&preset)?;
    let three = BigInt::from(3);
    let t = input.h2.sub(&b.scale(&three)).reduce_mod(&three);
    let pairing = input.hodge.lattice.pairing(&t, &input.h2)?;
    let v = input.hodge.lattice.functional(&input.h2)?;
    let rk = restriction_kernel(&input.hodge, &v)?;
    let order = rk.generator_order.unwrap_or_else(BigInt::zero);
    Ok(TwistGenerator { class_mod3: t, dual_class: b, order, primitive: pairing.is_multiple_of(&three) })
}

/// Checks for `H²(M) ≅ (h²)^⊥(−1) ⊕ U` against the cubic data.
pub fn og10_lattice_check(h4: &Lattice, h2: &LatticeVector, ns: &[LatticeVector]) -> CheckRecord {
    let mut rec = CheckRecord { items: Vec::new() };
    rec.push("h4_unimodular", h4.is_unimodular(), format!("det = {}", h4.determinant()));
    let prim = match h4.orthogonal_complement(&[h2.clone()]) {
        Ok((basis, l)) => (basis, l),
        Err(e) => {
            rec.push("primitive_lattice", false, e.to_string());
            return rec;
        }
    };
    let (prim_basis, prim_lattice) = prim;
    let h2m = prim_lattice.negated().direct_sum(&lattice::hyperbolic_plane());
    let r = h2m.rank();
    rec.push("rank_24", r == 24, format!("rank {r}"));
    let det = h2m.determinant();
    rec.push("det_3", det.magnitude() == &num_bigint::BigUint::from(3u32), format!("det = {det}"));

    let theta = LatticeVector::basis(r, r - 2);
    let eta = LatticeVector::basis(r, r - 1);
    let u_inv = lattice::hyperbolic_plane().invariants();
    match h2m.sublattice(&[theta.clone(), eta.clone()]) {
        Ok(te) => {
            let ok = te.invariants() == u_inv;
            rec.push("theta_eta_is_U", ok, format!("gram {:?}", te.gram().to_rows()));
        }
        Err(e) => rec.push("theta_eta_is_U", false, e.to_string()),
    }
    match h2m.orthogonal_complement(&[theta, eta]) {
        Ok((_, c)) => {
            let a: LatticeInvariants = c.invariants();
            let b = prim_lattice.invariants();
            rec.push("complement_matches_primitive", a.equal_up_to_sign(&b), format!("rank {} det {}", a.rank, a.determinant));
        }
        Err(e) => rec.push("complement_matches_primitive", false, e.to_string()),
    }

    // NS(M) = (NS ∩ (h²)^⊥)(−1) ⊕ U, so Br²(M) has corank 24 − (ρ − 1 + 2).
    let n = h4.rank();
    let rho = if ns.is_empty() { 0 } else { lattice::saturate(n, ns).len() };
    let h2_in_ns = solve_in_span(n, &ns.iter().map(|v| v.0.clone()).collect::<Vec<_>>(), &h2.0)
        .ok()
        .flatten()
        .is_some();
    let rho_pr = if h2_in_ns { rho.saturating_sub(1) } else { rho };
    let tau_m = r as i64 - (rho_pr as i64 + 2);
    let tau_pr = prim_basis.len() as i64 - rho_pr as i64;
    rec.push(
        "brauer_coranks_agree",
        tau_m == tau_pr,
        format!("Br(M) corank {tau_m}, Br_pr(X) corank {tau_pr}"),
    );
    rec
}

/// Input for the Beauville–Mukai analogue.
#[derive(Clone, Debug)]
pub struct K3Input {
    pub hodge: K3HodgeDatum,
    pub l: LatticeVector,
}

#[derive(Clone, Debug, Serialize)]
pub struct BmShaReport {
    pub genus: u32,
    #[serde(with = "crate::matrix::bigint_str")]
    pub d: BigInt,
    pub h0_j: usize,
    pub h0_jtilde: usize,
    pub first_term: FinAbGroup,
    pub sha0: ShaExtension,
    pub brauer: BrauerDescriptor,
    /// `H^k(B, Λ•)` for `k = 0..2g−1`.
    pub lambda: Vec<FinAbGroup>,
}

pub fn bm_sha_report(input: &K3Input) -> Result<BmShaReport> {
    let lat = &input.hodge.lattice;
    if input.hodge.weight_index != 1 {
        return Err(Error::InvalidInput("K3 datum must have weight 2".into()));
    }
    if !input.l.content().is_one() {
        return Err(Error::NotPrimitive);
    }
    let sq = lat.norm(&input.l)?;
    if sq < BigInt::from(2) || sq.is_odd() {
        return Err(Error::InvalidInput(format!("L² = {sq}, expected an even value ≥ 2")));
    }
    let g = u32::try_from(&sq / 2 + 1).map_err(|_| Error::InvalidInput("genus too large".into()))?;
    let preset = AmbientPreset::k3(lat.clone(), input.l.clone(), g)?;
    if !input.hodge.contains(&input.l)? {
        return Err(Error::MissingDistinguishedVector);
    }
    let core = sha_core(&input.hodge, &input.l, &[input.l.clone()], &preset)?;
    let ring = build_ring(&preset)?;
    let lambda = (0..2 * g as usize).map(|k| lambda_cohomology(&ring, k)).collect::<Result<Vec<_>>>()?;
    Ok(BmShaReport {
        genus: g,
        d: core.d.clone(),
        h0_j: core.h0_j,
        h0_jtilde: core.rho,
        first_term: core.first_term.clone(),
        sha0: core.extension(),
        brauer: core.quotient,
        lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic(extra: &[LatticeVector]) -> CubicInput {
        CubicInput::default_with_ns(extra).unwrap()
    }

    #[test]
    fn very_general_cubic() {
        let r = og10_sha_report(&cubic(&[])).unwrap();
        assert_eq!(r.d, BigInt::from(3));
        assert_eq!(r.h0_j, 0);
        assert_eq!(r.h0_jtilde, 1);
        assert_eq!(r.first_term, FinAbGroup::cyclic(3));
        assert_eq!(r.h1_jtilde.tau(), 22);
        assert!(r.sha0.first_map_injective);
        assert_eq!(r.sha0.middle.tau(), 22);
        assert!(r.og10_checks.passed(), "{:?}", r.og10_checks);
        let t = r.twist_generator.unwrap();
        assert_eq!(t.order, BigInt::from(3));
        assert!(t.primitive && !t.class_mod3.is_zero());
    }

    #[test]
    fn unit_pairing_class_flips_injectivity() {
        let r = og10_sha_report(&cubic(&[LatticeVector::basis(23, 0)])).unwrap();
        assert_eq!(r.d, BigInt::one());
        assert!(!r.sha0.first_map_injective);
        assert!(r.first_term.is_trivial());
        assert_eq!(r.h0_j, 1);
        assert_eq!(r.twist_generator.unwrap().order, BigInt::one());
    }

    #[test]
    fn full_ns() {
        let all: Vec<LatticeVector> = (0..23).map(|i| LatticeVector::basis(23, i)).collect();
        let r = og10_sha_report(&cubic(&all)).unwrap();
        assert!(r.h1_jtilde.is_trivial());
        assert_eq!((r.h0_j, r.h0_jtilde), (22, 23));
    }

    #[test]
    fn h0_two_ways() {
        // NS containing classes of divisibility 3 against h²: rank NS − 1 = rank NS ∩ (h²)^⊥.
        let extra = [
            LatticeVector::from_i64(&{
                let mut v = vec![0i64; 23];
                v[0] = 1;
                v[1] = -1;
                v
            }),
            LatticeVector::basis(23, 5),
        ];
        let r = og10_sha_report(&cubic(&extra)).unwrap();
        assert_eq!(r.d, BigInt::from(3));
        assert_eq!(r.h0_j, r.h0_jtilde - 1);
        assert_eq!(r.h1_jtilde.tau(), 23 - r.h0_jtilde);
        assert_eq!(r.sha0.middle.tau(), r.h1_jtilde.tau());
    }

    #[test]
    fn higher_table() {
        let ring = build_ring(&AmbientPreset::cubic_default()).unwrap();
        let h1 = higher_j_cohomology(&ring, 1).unwrap();
        assert_eq!((h1.h2k_j.clone(), h1.h2k_jtilde.free_rank()), (FinAbGroup::free(22), 23));
        assert_eq!(higher_j_cohomology(&ring, 2).unwrap().h2k_j, FinAbGroup::free(23));
        assert!(matches!(higher_j_cohomology(&ring, 5), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(higher_j_cohomology(&ring, 0), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn twist_generator_choice_independent() {
        let input = cubic(&[]);
        let t = degree_twist_generator(&input).unwrap();
        let three = BigInt::from(3);
        // Another dual class b' = b + x with x ⊥ h².
        let (perp, _) = input.hodge.lattice.orthogonal_complement(&[input.h2.clone()]).unwrap();
        for x in &perp {
            let b2 = t.dual_class.add(x);
            let t2 = input.h2.sub(&b2.scale(&three)).reduce_mod(&three);
            assert_eq!(t2, t.class_mod3);
        }
        let residue = input.hodge.lattice.pairing(&t.class_mod3, &input.h2).unwrap();
        assert!(residue.is_multiple_of(&three));
    }

    #[test]
    fn lattice_check_negative() {
        let mut rows = lattice::cubic_h4_default().gram().to_rows();
        rows[22][22] = BigInt::from(-2);
        let bad = Lattice::new(IntegerMatrix::from_rows(&rows).unwrap()).unwrap();
        let rec = og10_lattice_check(&bad, &lattice::cubic_h2_default(), &[lattice::cubic_h2_default()]);
        assert!(!rec.passed());
        assert!(!rec.items.iter().find(|i| i.name == "h4_unimodular").unwrap().passed);
    }

    #[test]
    fn non_defect_general_marks_fields() {
        let base = cubic(&[LatticeVector::basis(23, 5)]);
        let sigma = vec![base.h2.clone(), LatticeVector::basis(23, 5)];
        let input = CubicInput::with_sigma(base.hodge.clone(), base.h2.clone(), sigma);
        let r = og10_sha_report(&input).unwrap();
        assert!(r.twist_generator.is_none());
        assert!(!r.not_computed.is_empty());
        assert_eq!(r.sigma_perp_rank, 21);
        assert_eq!(r.h0_j, 0);
    }

    #[test]
    fn bm_generic() {
        for g in 2..=4u32 {
            let l = lattice::k3_polarization(g);
            let hodge = K3HodgeDatum::new(lattice::k3_lattice(), vec![l.clone()], 1).unwrap();
            let r = bm_sha_report(&K3Input { hodge, l }).unwrap();
            assert_eq!(r.d, BigInt::from(2 * g - 2));
            assert_eq!(r.first_term, FinAbGroup::cyclic(2 * g - 2));
            assert_eq!(r.brauer.tau(), 21);
            assert_eq!(r.lambda[1], FinAbGroup::free(21));
            assert_eq!(r.lambda[2 * g as usize - 1], FinAbGroup::free(21));
            for k in (3..2 * g as usize - 1).step_by(2) {
                assert_eq!(r.lambda[k], FinAbGroup::free(22));
            }
        }
    }

    #[test]
    fn bm_errors_and_full_ns() {
        let l = lattice::k3_polarization(3).scale(&BigInt::from(2));
        let hodge = K3HodgeDatum::new(lattice::k3_lattice(), vec![l.clone()], 1).unwrap();
        assert_eq!(bm_sha_report(&K3Input { hodge, l }).unwrap_err(), Error::NotPrimitive);
        let all: Vec<LatticeVector> = (0..22).map(|i| LatticeVector::basis(22, i)).collect();
        let l = lattice::k3_polarization(3);
        let hodge = K3HodgeDatum::new(lattice::k3_lattice(), all, 1).unwrap();
        let r = bm_sha_report(&K3Input { hodge, l }).unwrap();
        assert!(r.brauer.is_trivial());
        assert_eq!(r.d, BigInt::one());
        assert!(!r.sha0.first_map_injective);
    }
}
