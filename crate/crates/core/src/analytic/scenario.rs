use std::collections::BTreeMap;

use serde::Serialize;

use super::deligne::deligne_universal_section;
use super::group::AnalyticGroup;
use super::spectral::{converge, Declaration, MorphismDescriptor, SSPage};
use crate::brauer::{brauer_an, BrauerDescriptor, K3HodgeDatum};
use crate::error::{Error, Result};
use crate::lattice::LatticeVector;
use crate::section_ring::{build_ring, lambda_cohomology, AmbientPreset};

pub const H0_NAME: &str = "H0(B,J~)";
pub const H1_NAME: &str = "H1(B,J~)";

/// Cubic fourfold datum: `H^4(X, Z)` of K3 type with `h² ∈ NS`.
#[derive(Clone, Debug)]
pub struct ScenarioInput {
    pub datum: K3HodgeDatum,
    pub h2: LatticeVector,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub e2: SSPage,
    pub e3: SSPage,
    pub e_infinity: SSPage,
    /// First page `r` with `E_r = E_∞`.
    pub degenerates_at: usize,
    pub declarations: Vec<Declaration>,
    /// `H^n(𝒴, Z(2)_D)` from the projective bundle formula.
    pub targets: BTreeMap<i64, AnalyticGroup>,
    /// `⊕_{p+q=n} E_∞^{p,q}` with the unknowns substituted.
    pub diagonals: BTreeMap<i64, AnalyticGroup>,
    pub h0_jtilde: AnalyticGroup,
    pub h1_jtilde: AnalyticGroup,
    pub brauer: BrauerDescriptor,
    pub degree6_rank: usize,
    /// The Leray filtration on degree 4 is not derived; this records the splitting used.
    pub degree4_splitting: String,
}

fn validate(input: &ScenarioInput) -> Result<AmbientPreset> {
    let d = &input.datum;
    if d.rank() != 23 || d.weight_index != 2 {
        return Err(Error::InvalidInput(format!(
            "scenario needs a rank-23 datum of weight 4, got rank {} weight {}",
            d.rank(),
            2 * d.weight_index
        )));
    }
    if !d.contains(&input.h2)? {
        return Err(Error::MissingDistinguishedVector);
    }
    AmbientPreset::cubic(d.lattice.clone(), input.h2.clone())
}

/// The `E_2` page and the declarations for the Deligne–Leray spectral sequence of `p: 𝒴 → B`.
pub fn scenario_e2(input: &ScenarioInput) -> Result<(SSPage, Vec<Declaration>)> {
    let preset = validate(input)?;
    let ring = build_ring(&preset)?;
    let mut e = SSPage::new(2);
    let z = AnalyticGroup::free(1);
    let cx = AnalyticGroup::cstar(1);

    for p in (0..=10).step_by(2) {
        e.set(p, 6, z.clone(), "R^6 = Z_B, integral cohomology of P^5");
        e.set(p, 1, cx.clone(), "R^1 = C*_B, constant sheaf cohomology of P^5");
    }
    e.set(0, 4, AnalyticGroup::opaque(H0_NAME), "unknown");
    e.set(1, 4, AnalyticGroup::opaque(H1_NAME), "unknown");
    for j in 1..=4i64 {
        let lam = lambda_cohomology(&ring, 2 * j as usize + 1)?;
        if !lam.is_free() {
            return Err(Error::InvalidInput(format!("H^{}(Λ•) = {lam} is not free", 2 * j + 1)));
        }
        e.set(2 * j, 4, AnalyticGroup::free(lam.free_rank() + 1), format!("H^{}(Λ•) + Z", 2 * j + 1));
    }
    e.set(10, 4, z.clone(), "H^11(Λ•) = 0, plus Z");
    e.set(0, 3, cx.clone(), "H^0 of the extension of Λ by Ω^1: C*");
    for p in (1..=9).step_by(2) {
        e.set(p, 3, z.clone(), "H^p(B, Λ) contribution");
    }
    for p in (2..=8).step_by(2) {
        e.set(p, 2, AnalyticGroup::cc(1), "R^2 ⊃ O_B, Hodge cohomology of P^5");
    }

    let mut decls = Vec::new();
    for k in 1..=4i64 {
        decls.push(Declaration {
            page: 2,
            p: 2 * k,
            q: 2,
            morphism: MorphismDescriptor::Exp { copies: 1 },
            note: "gluing sequence of Deligne cohomology of P^5: the exponential C -> C*".into(),
        });
    }
    decls.push(Declaration {
        page: 2,
        p: 0,
        q: 3,
        morphism: MorphismDescriptor::declared_zero(&cx, &AnalyticGroup::cc(1), "divisibility"),
        note: "factors through the kernel Z of the next exponential; C* is divisible".into(),
    });
    decls.push(Declaration {
        page: 2,
        p: 1,
        q: 4,
        morphism: MorphismDescriptor::declared_zero(&AnalyticGroup::opaque(H1_NAME), &z, "rank budget"),
        note: "rank budget: H^6(Y, Z(2)_D) has rank 26, the sum of the ranks on the sixth diagonal".into(),
    });
    decls.push(Declaration {
        page: 3,
        p: 1,
        q: 4,
        morphism: MorphismDescriptor::declared_zero(&AnalyticGroup::opaque(H1_NAME), &z, "rank budget"),
        note: "rank budget on the sixth diagonal, as for d_2".into(),
    });
    Ok((e, decls))
}

/// Runs the spectral sequence and matches every diagonal against the targets.
pub fn run_scenario(input: &ScenarioInput, e2: &SSPage, declarations: &[Declaration]) -> Result<ScenarioReport> {
    validate(input)?;
    let pages = converge(e2, declarations)?;
    let e_inf = pages.last().expect("nonempty").clone();
    let e3 = pages.get(1).cloned().unwrap_or_else(|| e_inf.clone());
    let degenerates_at = pages.iter().position(|p| p.same_groups(&e_inf)).expect("last page matches") + 2;

    let target_vec = deligne_universal_section(&input.datum, 2)?;
    let targets: BTreeMap<i64, AnalyticGroup> =
        target_vec.iter().enumerate().map(|(n, g)| (n as i64, g.clone())).collect();
    let top = e_inf.grid.keys().map(|(p, q)| p + q).max().unwrap_or(0).max(target_vec.len() as i64 - 1);

    let mut solved: BTreeMap<String, AnalyticGroup> = BTreeMap::new();
    let mut diagonals = BTreeMap::new();
    for n in 0..=top {
        let diag = e_inf.diagonal(n);
        let target = targets.get(&n).cloned().unwrap_or_default();
        let mismatch = || Error::BudgetMismatch { degree: n, expected: target.to_string(), found: diag.to_string() };
        let value = match diag.opaque_names() {
            [] => {
                if diag != target {
                    return Err(mismatch());
                }
                diag.clone()
            }
            [name] => {
                let known = diag.checked_sub(&AnalyticGroup::opaque(name.clone())).expect("contains the atom");
                let rest = target.checked_sub(&known).ok_or_else(mismatch)?;
                solved.insert(name.clone(), rest);
                target.clone()
            }
            _ => return Err(Error::InvalidInput(format!("several unknowns on diagonal {n}"))),
        };
        diagonals.insert(n, value);
    }

    let h0 = solved.remove(H0_NAME).unwrap_or_default();
    let h1 = solved.remove(H1_NAME).unwrap_or_default();
    let degree6_rank = diagonals.get(&6).map(AnalyticGroup::free_rank).unwrap_or(0);
    Ok(ScenarioReport {
        e2: e2.clone(),
        e3,
        e_infinity: e_inf,
        degenerates_at,
        declarations: declarations.to_vec(),
        targets,
        diagonals,
        h0_jtilde: h0,
        h1_jtilde: h1,
        brauer: brauer_an(&input.datum),
        degree6_rank,
        degree4_splitting: "L_3 of degree 4 is the saturation of Z H^2 + Z hH, split off as Z^2".into(),
    })
}

/// [`scenario_e2`] followed by [`run_scenario`].
pub fn deligne_leray_scenario(input: &ScenarioInput) -> Result<ScenarioReport> {
    let (e2, decls) = scenario_e2(input)?;
    run_scenario(input, &e2, &decls)
}
