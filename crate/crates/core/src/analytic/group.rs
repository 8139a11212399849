use std::fmt;

use num_bigint::BigInt;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::abelian::FinAbGroup;
use crate::brauer::BrauerDescriptor;

/// `fg ⊕ C^cc ⊕ (C*)^cstar ⊕ ⊕ C/Z^τ ⊕ opaque`.
///
/// Opaque atoms are named unknowns (for example a group still to be solved for);
/// they block every structural rule.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AnalyticGroup {
    fg: FinAbGroup,
    cc: usize,
    cstar: usize,
    torus: Vec<usize>,
    opaque: Vec<String>,
}

impl AnalyticGroup {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn free(r: usize) -> Self {
        Self { fg: FinAbGroup::free(r), ..Self::default() }
    }

    pub fn finite(orders: &[BigInt]) -> Self {
        Self { fg: FinAbGroup::new(0, orders), ..Self::default() }
    }

    pub fn from_fin_ab(g: FinAbGroup) -> Self {
        Self { fg: g, ..Self::default() }
    }

    pub fn cc(a: usize) -> Self {
        Self { cc: a, ..Self::default() }
    }

    pub fn cstar(c: usize) -> Self {
        Self { cstar: c, ..Self::default() }
    }

    /// `C/Z^τ`; `τ = 0` is taken as the zero group, matching [`BrauerDescriptor::is_trivial`].
    pub fn torus(tau: usize) -> Self {
        Self { torus: if tau == 0 { Vec::new() } else { vec![tau] }, ..Self::default() }
    }

    pub fn brauer(b: BrauerDescriptor) -> Self {
        Self::torus(b.tau())
    }

    pub fn opaque(name: impl Into<String>) -> Self {
        Self { opaque: vec![name.into()], ..Self::default() }
    }

    pub fn fg_part(&self) -> &FinAbGroup {
        &self.fg
    }

    pub fn free_rank(&self) -> usize {
        self.fg.free_rank()
    }

    pub fn cc_count(&self) -> usize {
        self.cc
    }

    pub fn cstar_count(&self) -> usize {
        self.cstar
    }

    pub fn torus_ranks(&self) -> &[usize] {
        &self.torus
    }

    pub fn opaque_names(&self) -> &[String] {
        &self.opaque
    }

    pub fn is_zero(&self) -> bool {
        self.fg.is_trivial() && self.cc == 0 && self.cstar == 0 && self.torus.is_empty() && self.opaque.is_empty()
    }

    pub fn is_divisible(&self) -> bool {
        self.fg.is_trivial() && self.opaque.is_empty()
    }

    pub fn is_finitely_generated(&self) -> bool {
        self.cc == 0 && self.cstar == 0 && self.torus.is_empty() && self.opaque.is_empty()
    }

    pub fn is_torsion(&self) -> bool {
        self.fg.free_rank() == 0 && self.is_finitely_generated()
    }

    /// `C*` and `C/Z^τ` contain roots of unity, so only `Z^r ⊕ C^a` qualifies.
    pub fn is_torsion_free(&self) -> bool {
        self.fg.torsion().is_empty() && self.cstar == 0 && self.torus.is_empty() && self.opaque.is_empty()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut torus: Vec<usize> = self.torus.iter().chain(&other.torus).copied().collect();
        torus.sort_unstable();
        let mut opaque: Vec<String> = self.opaque.iter().chain(&other.opaque).cloned().collect();
        opaque.sort();
        Self {
            fg: self.fg.direct_sum(&other.fg),
            cc: self.cc + other.cc,
            cstar: self.cstar + other.cstar,
            torus,
            opaque,
        }
    }

    /// The complement of `other` as a multiset of atoms, if `other` is contained in `self`.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let free = self.fg.free_rank().checked_sub(other.fg.free_rank())?;
        let mut torsion = self.fg.torsion().to_vec();
        for t in other.fg.torsion() {
            let pos = torsion.iter().position(|x| x == t)?;
            torsion.remove(pos);
        }
        let mut torus = self.torus.clone();
        for t in &other.torus {
            let pos = torus.iter().position(|x| x == t)?;
            torus.remove(pos);
        }
        let mut opaque = self.opaque.clone();
        for o in &other.opaque {
            let pos = opaque.iter().position(|x| x == o)?;
            opaque.remove(pos);
        }
        Some(Self {
            fg: FinAbGroup::new(free, &torsion),
            cc: self.cc.checked_sub(other.cc)?,
            cstar: self.cstar.checked_sub(other.cstar)?,
            torus,
            opaque,
        })
    }

    pub(crate) fn with_fg(&self, fg: FinAbGroup) -> Self {
        Self { fg, ..self.clone() }
    }

    pub(crate) fn with_counts(&self, free: usize, cc: usize, cstar: usize) -> Self {
        Self {
            fg: FinAbGroup::new(free, self.fg.torsion()),
            cc,
            cstar,
            ..self.clone()
        }
    }
}

impl std::iter::Sum for AnalyticGroup {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a.direct_sum(&b))
    }
}

fn power(base: &str, k: usize, parens: bool) -> String {
    match k {
        1 => base.to_string(),
        _ if parens => format!("({base})^{k}"),
        _ => format!("{base}^{k}"),
    }
}

impl fmt::Display for AnalyticGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.fg.is_trivial() {
            parts.push(self.fg.to_string());
        }
        if self.cc > 0 {
            parts.push(power("C", self.cc, false));
        }
        if self.cstar > 0 {
            parts.push(power("C*", self.cstar, true));
        }
        for t in &self.torus {
            parts.push(format!("C/{}", power("Z", *t, false)));
        }
        parts.extend(self.opaque.iter().cloned());
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Tokens: `Z`, `Zn`, `C`, `Cx`, `CmodZ` and `?` for opaque atoms; zero atoms are omitted.
impl Serialize for AnalyticGroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        if self.fg.free_rank() > 0 {
            m.serialize_entry("Z", &self.fg.free_rank())?;
        }
        if !self.fg.torsion().is_empty() {
            let t: Vec<String> = self.fg.torsion().iter().map(ToString::to_string).collect();
            m.serialize_entry("Zn", &t)?;
        }
        if self.cc > 0 {
            m.serialize_entry("C", &self.cc)?;
        }
        if self.cstar > 0 {
            m.serialize_entry("Cx", &self.cstar)?;
        }
        match self.torus.as_slice() {
            [] => {}
            [t] => m.serialize_entry("CmodZ", t)?,
            ts => m.serialize_entry("CmodZ", ts)?,
        }
        if !self.opaque.is_empty() {
            m.serialize_entry("?", &self.opaque)?;
        }
        m.end()
    }
}
