use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::group::AnalyticGroup;
use crate::abelian::middle_cohomology;
use crate::error::{Error, Result};
use crate::matrix::IntegerMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MorphismDescriptor {
    Zero,
    /// `exp: C^copies → (C*)^copies`, surjective with kernel `Z^copies`; identity elsewhere is not implied,
    /// the remaining atoms of source and target are untouched.
    Exp { copies: usize },
    /// Acts on free parts only.
    IntegerMatrix { matrix: IntegerMatrix },
    Declared { kernel: AnalyticGroup, cokernel: AnalyticGroup, note: String },
    Unresolved { page: usize, p: i64, q: i64 },
}

impl MorphismDescriptor {
    /// The zero map `src → tgt` as a declaration.
    pub fn declared_zero(src: &AnalyticGroup, tgt: &AnalyticGroup, note: impl Into<String>) -> Self {
        Self::Declared { kernel: src.clone(), cokernel: tgt.clone(), note: note.into() }
    }
}

/// A differential fixed by hand rather than by a rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Declaration {
    pub page: usize,
    pub p: i64,
    pub q: i64,
    pub morphism: MorphismDescriptor,
    pub note: String,
}

/// `true` when every map `src → tgt` is zero for structural reasons. `false` means undetermined.
pub fn classify_forced_zero(src: &AnalyticGroup, tgt: &AnalyticGroup) -> bool {
    if src.is_zero() || tgt.is_zero() {
        return true;
    }
    (src.is_divisible() && tgt.is_finitely_generated()) || (src.is_torsion() && tgt.is_torsion_free())
}

fn unresolved(m: &MorphismDescriptor) -> Option<Error> {
    match m {
        MorphismDescriptor::Unresolved { page, p, q } => {
            Some(Error::UnresolvedDifferential { page: *page, p: *p, q: *q })
        }
        _ => None,
    }
}

/// `ker(outgoing)/im(incoming)` at `group`.
pub fn homology_at(
    incoming: &MorphismDescriptor,
    group: &AnalyticGroup,
    outgoing: &MorphismDescriptor,
) -> Result<AnalyticGroup> {
    use MorphismDescriptor as M;
    if let Some(e) = unresolved(incoming).or_else(|| unresolved(outgoing)) {
        return Err(e);
    }

    if matches!(incoming, M::IntegerMatrix { .. }) || matches!(outgoing, M::IntegerMatrix { .. }) {
        return matrix_homology(incoming, group, outgoing);
    }

    let kernel = match outgoing {
        M::Zero => group.clone(),
        M::Exp { copies } => {
            if group.cc_count() < *copies {
                return Err(Error::InvalidInput(format!("exp on {copies} copies of C but the source is {group}")));
            }
            group.with_counts(group.free_rank() + copies, group.cc_count() - copies, group.cstar_count())
        }
        M::Declared { kernel, .. } => kernel.clone(),
        M::IntegerMatrix { .. } | M::Unresolved { .. } => unreachable!(),
    };

    match incoming {
        M::Zero => Ok(kernel),
        M::Exp { copies } => {
            if kernel.cstar_count() < *copies {
                return Err(Error::InvalidInput(format!("exp onto {copies} copies of C* inside {kernel}")));
            }
            Ok(kernel.with_counts(kernel.free_rank(), kernel.cc_count(), kernel.cstar_count() - copies))
        }
        M::Declared { cokernel, .. } => {
            if cokernel == group {
                Ok(kernel)
            } else if matches!(outgoing, M::Zero) {
                Ok(cokernel.clone())
            } else {
                Err(Error::InvalidInput(
                    "a nonzero declared incoming map needs a zero outgoing map".into(),
                ))
            }
        }
        M::IntegerMatrix { .. } | M::Unresolved { .. } => unreachable!(),
    }
}

fn matrix_homology(
    incoming: &MorphismDescriptor,
    group: &AnalyticGroup,
    outgoing: &MorphismDescriptor,
) -> Result<AnalyticGroup> {
    use MorphismDescriptor as M;
    let r = group.free_rank();
    if !group.fg_part().torsion().is_empty() {
        return Err(Error::InvalidInput("integer matrices act on torsion-free parts only".into()));
    }
    let f = match incoming {
        M::Zero => IntegerMatrix::zeros(r, 0),
        M::IntegerMatrix { matrix } => matrix.clone(),
        _ => return Err(Error::InvalidInput("integer matrix mixed with a non-matrix differential".into())),
    };
    let g = match outgoing {
        M::Zero => IntegerMatrix::zeros(0, r),
        M::IntegerMatrix { matrix } => matrix.clone(),
        _ => return Err(Error::InvalidInput("integer matrix mixed with a non-matrix differential".into())),
    };
    Ok(group.with_fg(middle_cohomology(&f, &g)?))
}

/// One page `E_r` of a cohomological spectral sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SSPage {
    pub page: usize,
    pub grid: BTreeMap<(i64, i64), AnalyticGroup>,
    pub differentials: BTreeMap<(i64, i64), MorphismDescriptor>,
    /// Where each installed entry comes from.
    pub provenance: BTreeMap<(i64, i64), String>,
}

impl SSPage {
    pub fn new(page: usize) -> Self {
        Self { page, grid: BTreeMap::new(), differentials: BTreeMap::new(), provenance: BTreeMap::new() }
    }

    pub fn set(&mut self, p: i64, q: i64, g: AnalyticGroup, provenance: impl Into<String>) {
        self.provenance.insert((p, q), provenance.into());
        if g.is_zero() {
            self.grid.remove(&(p, q));
        } else {
            self.grid.insert((p, q), g);
        }
    }

    pub fn get(&self, p: i64, q: i64) -> AnalyticGroup {
        self.grid.get(&(p, q)).cloned().unwrap_or_default()
    }

    pub fn target(&self, p: i64, q: i64) -> (i64, i64) {
        (p + self.page as i64, q - self.page as i64 + 1)
    }

    /// `⊕_{p+q=n}` of the entries.
    pub fn diagonal(&self, n: i64) -> AnalyticGroup {
        self.grid.iter().filter(|((p, q), _)| p + q == n).map(|(_, g)| g.clone()).sum()
    }

    /// Bounding box of the support as `(p_min, p_max, q_min, q_max)`.
    pub fn bounds(&self) -> Option<(i64, i64, i64, i64)> {
        let ps = self.grid.keys().map(|k| k.0);
        let qs = self.grid.keys().map(|k| k.1);
        Some((ps.clone().min()?, ps.max()?, qs.clone().min()?, qs.max()?))
    }

    /// Whether the entries agree with `other`, ignoring differentials and provenance.
    pub fn same_groups(&self, other: &SSPage) -> bool {
        self.grid == other.grid
    }

    /// Aligned text table with `q` decreasing downwards, in the layout of a printed page.
    pub fn render(&self, p_range: (i64, i64), q_range: (i64, i64)) -> String {
        let cells: Vec<Vec<String>> = (q_range.0..=q_range.1)
            .rev()
            .map(|q| {
                let mut row = vec![q.to_string()];
                row.extend((p_range.0..=p_range.1).map(|p| self.get(p, q).to_string()));
                row
            })
            .chain(std::iter::once({
                let mut row = vec!["q/p".to_string()];
                row.extend((p_range.0..=p_range.1).map(|p| p.to_string()));
                row
            }))
            .collect();
        let ncols = cells[0].len();
        let widths: Vec<usize> =
            (0..ncols).map(|c| cells.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
        let mut out = format!("E_{}\n", self.page);
        for row in &cells {
            let line: Vec<String> =
                row.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}", w = *w)).collect();
            out.push_str(line.join(" | ").trim_end());
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for SSPage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bounds() {
            Some((p0, p1, q0, q1)) => write!(f, "{}", self.render((p0.min(0), p1), (q0.min(0), q1))),
            None => writeln!(f, "E_{}: 0", self.page),
        }
    }
}

#[derive(Serialize)]
struct EntryJson<'a> {
    p: i64,
    q: i64,
    group: &'a AnalyticGroup,
    #[serde(skip_serializing_if = "Option::is_none")]
    provenance: Option<&'a String>,
}

impl Serialize for SSPage {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct PageJson<'a> {
            page: usize,
            entries: Vec<EntryJson<'a>>,
        }
        PageJson {
            page: self.page,
            entries: self
                .grid
                .iter()
                .map(|(&(p, q), group)| EntryJson { p, q, group, provenance: self.provenance.get(&(p, q)) })
                .collect(),
        }
        .serialize(s)
    }
}

/// Resolves every differential of `page` leaving a nonzero entry: zero source or target,
/// then an explicit declaration, then [`classify_forced_zero`].
pub fn resolve_differentials(
    page: &SSPage,
    declarations: &[Declaration],
) -> Result<BTreeMap<(i64, i64), MorphismDescriptor>> {
    let r = page.page;
    let mut out = BTreeMap::new();
    for (&(p, q), src) in &page.grid {
        let (tp, tq) = page.target(p, q);
        let tgt = page.get(tp, tq);
        let declared = declarations.iter().find(|d| d.page == r && d.p == p && d.q == q);
        let m = if tgt.is_zero() {
            MorphismDescriptor::Zero
        } else if let Some(d) = declared {
            if d.note.trim().is_empty() {
                return Err(Error::MissingProvenance { p, q });
            }
            if let MorphismDescriptor::Declared { note, .. } = &d.morphism {
                if note.trim().is_empty() {
                    return Err(Error::MissingProvenance { p, q });
                }
            }
            if let MorphismDescriptor::Exp { copies } = d.morphism {
                if src.cc_count() < copies || tgt.cstar_count() < copies {
                    return Err(Error::InvalidInput(format!("exp at ({p},{q}) does not fit {src} → {tgt}")));
                }
            }
            d.morphism.clone()
        } else if classify_forced_zero(src, &tgt) {
            MorphismDescriptor::Zero
        } else {
            return Err(Error::UnresolvedDifferential { page: r, p, q });
        };
        out.insert((p, q), m);
    }
    Ok(out)
}

/// `E_{r+1}` from `E_r`.
pub fn turn_page(page: &SSPage, declarations: &[Declaration]) -> Result<SSPage> {
    let diffs = resolve_differentials(page, declarations)?;
    let r = page.page as i64;
    let mut next = SSPage::new(page.page + 1);
    let positions: BTreeSet<(i64, i64)> = page.grid.keys().copied().collect();
    for &(p, q) in &positions {
        let group = page.get(p, q);
        let incoming = diffs.get(&(p - r, q + r - 1)).cloned().unwrap_or(MorphismDescriptor::Zero);
        let outgoing = diffs.get(&(p, q)).cloned().unwrap_or(MorphismDescriptor::Zero);
        let h = homology_at(&incoming, &group, &outgoing)?;
        if !h.is_zero() {
            next.grid.insert((p, q), h);
        }
    }
    Ok(next)
}

/// Turns pages until every differential leaves the support; returns `E_start, …, E_∞`.
pub fn converge(start: &SSPage, declarations: &[Declaration]) -> Result<Vec<SSPage>> {
    let mut pages = vec![start.clone()];
    loop {
        let cur = pages.last().expect("nonempty");
        let Some((_, _, q0, q1)) = cur.bounds() else { break };
        if cur.page as i64 > q1 - q0 + 1 {
            break;
        }
        let next = turn_page(cur, declarations)?;
        pages.push(next);
    }
    Ok(pages)
}
