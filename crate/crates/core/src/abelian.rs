//! Finitely generated abelian groups and Smith normal form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::IntegerMatrix;

/// `Z^free_rank ⊕ Z/d_1 ⊕ … ⊕ Z/d_k` with `d_1 | d_2 | … | d_k` and every `d_i ≥ 2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinAbGroup {
    free_rank: usize,
    #[serde(with = "crate::matrix::bigint_vec_str")]
    torsion: Vec<BigInt>,
}

impl FinAbGroup {
    /// Builds a group from arbitrary cyclic factors; zeros become free summands and
    /// units are dropped.
    pub fn new(free_rank: usize, cyclic_orders: &[BigInt]) -> Self {
        let mut free = free_rank;
        let mut finite = Vec::new();
        for c in cyclic_orders {
            let c = c.abs();
            if c.is_zero() {
                free += 1;
            } else if !c.is_one() {
                finite.push(c);
            }
        }
        Self { free_rank: free, torsion: invariant_factors(finite) }
    }

    pub fn trivial() -> Self {
        Self { free_rank: 0, torsion: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        Self { free_rank: rank, torsion: Vec::new() }
    }

    pub fn cyclic(n: impl Into<BigInt>) -> Self {
        Self::new(0, &[n.into()])
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Order of a finite group, `None` when the free rank is positive.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }

    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut t = self.torsion.clone();
        t.extend(other.torsion.iter().cloned());
        Self::new(self.free_rank + other.free_rank, &t)
    }

    /// `G ⊗ Z/m`; `m = 0` returns `G`.
    pub fn tensor_mod(&self, m: &BigInt) -> Self {
        if m.is_zero() {
            return self.clone();
        }
        let mut t: Vec<BigInt> = vec![m.abs(); self.free_rank];
        t.extend(self.torsion.iter().map(|d| d.gcd(m)));
        Self::new(0, &t)
    }

    /// Number of elements of `G ⊗ Z/n` for `n ≥ 1`.
    pub fn count_mod(&self, n: &BigInt) -> BigInt {
        self.tensor_mod(n).torsion_order()
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let d = &self.torsion[i];
            let run = self.torsion[i..].iter().take_while(|x| *x == d).count();
            if run == 1 {
                parts.push(format!("Z/{d}"));
            } else {
                parts.push(format!("(Z/{d})^{run}"));
            }
            i += run;
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Invariant factors of `⊕ Z/c_i` for positive `c_i`, units removed.
fn invariant_factors(cyclic: Vec<BigInt>) -> Vec<BigInt> {
    if cyclic.is_empty() {
        return cyclic;
    }
    let snf = smith_normal_form(&IntegerMatrix::diagonal(cyclic));
    snf.diagonal().into_iter().filter(|d| !d.is_one()).collect()
}

/// `U·M·V = D` with `U`, `V` unimodular and `D` in Smith form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SnfDecomposition {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
    /// Inverse of `v`, tracked alongside the column operations.
    #[serde(skip)]
    pub v_inv: IntegerMatrix,
    pub rank: usize,
}

impl SnfDecomposition {
    /// The diagonal entries `D[i][i]` for `i < min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).collect()
    }

    /// Nonzero diagonal entries.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d[(i, i)].clone()).collect()
    }
}

fn smallest_nonzero(
    d: &IntegerMatrix,
    rows: impl Iterator<Item = usize> + Clone,
    cols: impl Iterator<Item = usize> + Clone,
) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for i in rows {
        for j in cols.clone() {
            let x = &d[(i, j)];
            if x.is_zero() {
                continue;
            }
            let a = x.abs();
            if best.as_ref().map_or(true, |(_, b)| a < *b) {
                let done = a.is_one();
                best = Some(((i, j), a));
                if done {
                    return best.map(|(p, _)| p);
                }
            }
        }
    }
    best.map(|(p, _)| p)
}

/// Smith normal form with smallest-absolute-value pivoting.
pub fn smith_normal_form(m: &IntegerMatrix) -> SnfDecomposition {
    let (rows, cols) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut u = IntegerMatrix::identity(rows);
    let mut v = IntegerMatrix::identity(cols);
    let mut v_inv = IntegerMatrix::identity(cols);

    let swap_cols = |d: &mut IntegerMatrix, v: &mut IntegerMatrix, vi: &mut IntegerMatrix, a, b| {
        d.swap_cols(a, b);
        v.swap_cols(a, b);
        vi.swap_rows(a, b);
    };
    // col[target] += k col[source]; the inverse update is row[source] -= k row[target].
    let add_col = |d: &mut IntegerMatrix,
                   v: &mut IntegerMatrix,
                   vi: &mut IntegerMatrix,
                   target: usize,
                   source: usize,
                   k: &BigInt| {
        d.add_col_multiple(target, source, k);
        v.add_col_multiple(target, source, k);
        vi.add_row_multiple(source, target, &-k);
    };

    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = smallest_nonzero(&d, t..rows, t..cols) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        swap_cols(&mut d, &mut v, &mut v_inv, t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = &d[(i, t)] / &d[(t, t)];
                d.add_row_multiple(i, t, &-&q);
                u.add_row_multiple(i, t, &-&q);
                clean &= d[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = &d[(t, j)] / &d[(t, t)];
                add_col(&mut d, &mut v, &mut v_inv, j, t, &-&q);
                clean &= d[(t, j)].is_zero();
            }
            if !clean {
                // A remainder smaller than the pivot survived; move the smallest entry of
                // the pivot row/column into place and reduce again.
                let cand_row = smallest_nonzero(&d, t..t + 1, t..cols);
                let cand_col = smallest_nonzero(&d, t..rows, t..t + 1);
                let pick = match (cand_row, cand_col) {
                    (Some(a), Some(b)) => {
                        if d[a].abs() <= d[b].abs() {
                            a
                        } else {
                            b
                        }
                    }
                    (Some(a), None) | (None, Some(a)) => a,
                    (None, None) => unreachable!("pivot row and column cannot both vanish"),
                };
                d.swap_rows(t, pick.0);
                u.swap_rows(t, pick.0);
                swap_cols(&mut d, &mut v, &mut v_inv, t, pick.1);
                continue;
            }
            let p = d[(t, t)].clone();
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&d[(i, j)] % &p).is_zero()));
            match offender {
                Some(i) => {
                    d.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    SnfDecomposition { u, d, v, v_inv, rank: t }
}

/// `Z^rows / image(f)` for `f: Z^cols → Z^rows`.
pub fn cokernel(f: &IntegerMatrix) -> FinAbGroup {
    let snf = smith_normal_form(f);
    FinAbGroup::new(f.rows() - snf.rank, &snf.invariant_factors())
}

/// A basis of the saturated kernel of `f: Z^cols → Z^rows`, as column vectors.
pub fn kernel(f: &IntegerMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(f);
    (snf.rank..f.cols()).map(|j| snf.v.column(j)).collect()
}

/// Rank of `f` over the rationals.
pub fn rank(f: &IntegerMatrix) -> usize {
    smith_normal_form(f).rank
}

/// `ker(g) / im(f)` for `Z^a --f--> Z^b --g--> Z^c`.
pub fn middle_cohomology(f: &IntegerMatrix, g: &IntegerMatrix) -> Result<FinAbGroup> {
    if f.rows() != g.cols() {
        return Err(Error::DimensionMismatch(format!(
            "f has {} rows but g has {} columns",
            f.rows(),
            g.cols()
        )));
    }
    if !g.mul(f)?.is_zero() {
        return Err(Error::CompositionNonzero);
    }
    let snf = smith_normal_form(g);
    let b = g.cols();
    // Columns rank.. of V span ker(g); coordinates of im(f) in that basis are the
    // corresponding rows of V^{-1}·f.
    let coords = snf.v_inv.mul(f)?;
    let k = b - snf.rank;
    let mut sub = IntegerMatrix::zeros(k, f.cols());
    for i in 0..k {
        for j in 0..f.cols() {
            sub[(i, j)] = coords[(snf.rank + i, j)].clone();
        }
    }
    Ok(cokernel(&sub))
}

/// `Z^n` modulo the span of `generators`.
pub fn quotient_by_span(n: usize, generators: &[Vec<BigInt>]) -> Result<FinAbGroup> {
    if generators.is_empty() {
        return Ok(FinAbGroup::free(n));
    }
    Ok(cokernel(&IntegerMatrix::from_columns(n, generators)?))
}

/// `coker(A) ⊗ Z/m`, computed as the cokernel of `[A | m·I]`.
pub fn cokernel_mod(a: &IntegerMatrix, m: &BigInt) -> Result<FinAbGroup> {
    let mi = IntegerMatrix::identity(a.rows()).scaled(m);
    Ok(cokernel(&a.hstack(&mi)?))
}

/// Tensor product of a group with `Z/m`.
pub fn tensor_mod(g: &FinAbGroup, m: &BigInt) -> FinAbGroup {
    g.tensor_mod(m)
}

/// Order of the class of `x` in `Z^n / image(relations)`; `None` when infinite.
pub fn element_order(relations: &IntegerMatrix, x: &[BigInt]) -> Result<Option<BigInt>> {
    let snf = smith_normal_form(relations);
    let y = snf.u.mul_vec(x)?;
    let mut order = BigInt::one();
    for (i, yi) in y.iter().enumerate() {
        if i < snf.rank {
            let di = &snf.d[(i, i)];
            order = order.lcm(&(di / di.gcd(yi)));
        } else if !yi.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(order))
}

/// Integer coefficients `c` with `Σ c_j·gen_j = x`, if they exist.
pub fn solve_in_span(n: usize, generators: &[Vec<BigInt>], x: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if x.len() != n {
        return Err(Error::DimensionMismatch(format!("vector of length {} in Z^{n}", x.len())));
    }
    if generators.is_empty() {
        return Ok(x.iter().all(Zero::is_zero).then(Vec::new));
    }
    let m = IntegerMatrix::from_columns(n, generators)?;
    let snf = smith_normal_form(&m);
    let y = snf.u.mul_vec(x)?;
    let mut z = vec![BigInt::zero(); m.cols()];
    for (i, yi) in y.iter().enumerate() {
        if i < snf.rank {
            let (q, r) = yi.div_rem(&snf.d[(i, i)]);
            if !r.is_zero() {
                return Ok(None);
            }
            z[i] = q;
        } else if !yi.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(snf.v.mul_vec(&z)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::big_vec;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntegerMatrix {
        IntegerMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn is_smith(d: &IntegerMatrix, rank: usize) -> bool {
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                if i != j && !d[(i, j)].is_zero() {
                    return false;
                }
            }
        }
        let diag: Vec<BigInt> = (0..d.rows().min(d.cols())).map(|i| d[(i, i)].clone()).collect();
        diag.iter().enumerate().all(|(i, x)| (i < rank) == x.is_positive())
            && diag.windows(2).all(|w| w[1].is_zero() || (&w[1] % &w[0]).is_zero())
    }

    /// gcd of all k×k minors, the k-th determinantal divisor.
    fn determinantal_divisor(a: &IntegerMatrix, k: usize) -> BigInt {
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = subsets(n - 1, k);
            for mut s in subsets(n - 1, k - 1) {
                s.push(n - 1);
                out.push(s);
            }
            out
        }
        let mut g = BigInt::zero();
        for rs in subsets(a.rows(), k) {
            for cs in subsets(a.cols(), k) {
                let rows: Vec<Vec<BigInt>> =
                    rs.iter().map(|&i| cs.iter().map(|&j| a[(i, j)].clone()).collect()).collect();
                g = g.gcd(&IntegerMatrix::from_rows(&rows).unwrap().determinant().unwrap());
            }
        }
        g
    }

    #[test]
    fn snf_examples() {
        let id = smith_normal_form(&IntegerMatrix::identity(3));
        assert_eq!(id.d, IntegerMatrix::identity(3));
        assert_eq!(smith_normal_form(&m(&[&[3]])).d, m(&[&[3]]));
        assert_eq!(smith_normal_form(&m(&[&[2, 0], &[0, 3]])).d, m(&[&[1, 0], &[0, 6]]));
    }

    #[test]
    fn cokernel_examples() {
        assert_eq!(cokernel(&m(&[&[3]])), FinAbGroup::cyclic(3));
        assert_eq!(cokernel(&m(&[&[2, -1], &[-1, 2]])), FinAbGroup::cyclic(3));
        assert!(cokernel(&IntegerMatrix::identity(4)).is_trivial());
        assert_eq!(cokernel(&IntegerMatrix::zeros(2, 0)), FinAbGroup::free(2));
    }

    #[test]
    fn kernel_examples() {
        let k = kernel(&IntegerMatrix::zeros(1, 2));
        assert_eq!(k.len(), 2);
        assert_eq!(kernel(&m(&[&[1, 1, 1]])).len(), 2);
        // Saturation: the kernel of (2, 4) is spanned by (-2, 1), not by a multiple.
        let k = kernel(&m(&[&[2, 4]]));
        assert_eq!(k.len(), 1);
        assert!(quotient_by_span(2, &k).unwrap().is_free());
    }

    #[test]
    fn middle_cohomology_examples() {
        let z = IntegerMatrix::zeros(3, 3);
        assert_eq!(middle_cohomology(&z, &z).unwrap(), FinAbGroup::free(3));
        let two = m(&[&[2]]);
        let zero = IntegerMatrix::zeros(0, 1);
        assert_eq!(middle_cohomology(&two, &zero).unwrap(), FinAbGroup::cyclic(2));
        assert_eq!(
            middle_cohomology(&m(&[&[1]]), &m(&[&[1]])),
            Err(Error::CompositionNonzero)
        );
    }

    #[test]
    fn quotient_and_tensor_examples() {
        assert!(quotient_by_span(2, &[big_vec(&[1, 0]), big_vec(&[0, 1])]).unwrap().is_trivial());
        assert_eq!(
            quotient_by_span(2, &[big_vec(&[2, 0])]).unwrap(),
            FinAbGroup::new(1, &[BigInt::from(2)])
        );
        assert!(quotient_by_span(2, &[big_vec(&[1])]).is_err());
        let three = BigInt::from(3);
        assert_eq!(FinAbGroup::free(1).tensor_mod(&three), FinAbGroup::cyclic(3));
        assert!(FinAbGroup::cyclic(2).tensor_mod(&three).is_trivial());
        assert_eq!(FinAbGroup::free(22).tensor_mod(&three).torsion().len(), 22);
    }

    #[test]
    fn canonical_form_merges_factors() {
        let g = FinAbGroup::new(1, &big_vec(&[2, 3, 1, 4]));
        assert_eq!(g.torsion(), &big_vec(&[2, 12])[..]);
        assert_eq!(g.to_string(), "Z + Z/2 + Z/12");
        assert_eq!(FinAbGroup::new(0, &big_vec(&[3, 3])).to_string(), "(Z/3)^2");
        assert_eq!(FinAbGroup::trivial().to_string(), "0");
    }

    #[test]
    fn element_order_and_span() {
        let rel = m(&[&[3, 0], &[0, 0]]);
        assert_eq!(element_order(&rel, &big_vec(&[1, 0])).unwrap(), Some(BigInt::from(3)));
        assert_eq!(element_order(&rel, &big_vec(&[3, 0])).unwrap(), Some(BigInt::one()));
        assert_eq!(element_order(&rel, &big_vec(&[0, 1])).unwrap(), None);
        let gens = vec![big_vec(&[2, 1]), big_vec(&[0, 3])];
        let c = solve_in_span(2, &gens, &big_vec(&[4, 5])).unwrap().unwrap();
        assert_eq!(c, big_vec(&[2, 1]));
        assert!(solve_in_span(2, &gens, &big_vec(&[1, 0])).unwrap().is_none());
    }

    fn small_matrix() -> impl Strategy<Value = IntegerMatrix> {
        (0usize..=5, 0usize..=5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-9i64..=9, r * c)
                .prop_map(move |e| IntegerMatrix::new(r, c, big_vec(&e)).unwrap())
        })
    }

    fn unimodular(n: usize) -> impl Strategy<Value = IntegerMatrix> {
        proptest::collection::vec((0..n.max(1), 0..n.max(1), -3i64..=3), 0..12).prop_map(move |ops| {
            let mut u = IntegerMatrix::identity(n);
            for (a, b, k) in ops {
                if a != b && a < n && b < n {
                    u.add_row_multiple(a, b, &BigInt::from(k));
                }
            }
            u
        })
    }

    proptest! {
        #[test]
        fn snf_reconstructs(a in small_matrix()) {
            let s = smith_normal_form(&a);
            prop_assert_eq!(s.u.mul(&a).unwrap().mul(&s.v).unwrap(), s.d.clone());
            prop_assert!(is_smith(&s.d, s.rank));
            prop_assert_eq!(s.u.determinant().unwrap().abs(), BigInt::one());
            prop_assert_eq!(s.v.determinant().unwrap().abs(), BigInt::one());
            prop_assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntegerMatrix::identity(a.cols()));
        }

        #[test]
        fn snf_matches_determinantal_divisors(a in small_matrix()) {
            let s = smith_normal_form(&a);
            let mut prev = BigInt::one();
            for k in 1..=a.rows().min(a.cols()) {
                let dk = determinantal_divisor(&a, k);
                let expected = if dk.is_zero() { BigInt::zero() } else { &dk / &prev };
                prop_assert_eq!(&s.d[(k - 1, k - 1)], &expected);
                if dk.is_zero() { break; }
                prev = dk;
            }
        }

        #[test]
        fn cokernel_is_unimodular_invariant(
            (a, p, q) in small_matrix().prop_flat_map(|a| {
                let (r, c) = (a.rows(), a.cols());
                (Just(a), unimodular(r), unimodular(c))
            })
        ) {
            let b = p.mul(&a).unwrap().mul(&q).unwrap();
            prop_assert_eq!(cokernel(&a), cokernel(&b));
        }

        #[test]
        fn kernel_is_saturated_and_exact(a in small_matrix()) {
            let k = kernel(&a);
            for v in &k {
                prop_assert!(a.mul_vec(v).unwrap().iter().all(Zero::is_zero));
            }
            prop_assert_eq!(k.len(), a.cols() - rank(&a));
            prop_assert!(quotient_by_span(a.cols(), &k).unwrap().is_free());
        }

        #[test]
        fn split_complex_free_rank(
            (a, c, extra, p) in (0usize..=3, 0usize..=3, 0usize..=3).prop_flat_map(|(a, c, e)| {
                (Just(a), Just(c), Just(e), unimodular(a + c + e))
            })
        ) {
            // Z^a -> Z^b -> Z^c with b = a + c + extra, conjugated by a unimodular P.
            let b = a + c + extra;
            let mut f = IntegerMatrix::zeros(b, a);
            for i in 0..a { f[(i, i)] = BigInt::one(); }
            let mut g = IntegerMatrix::zeros(c, b);
            for i in 0..c { g[(i, a + i)] = BigInt::one(); }
            let pinv = p.unimodular_inverse().unwrap();
            let f2 = p.mul(&f).unwrap();
            let g2 = g.mul(&pinv).unwrap();
            prop_assert_eq!(middle_cohomology(&f2, &g2).unwrap(), FinAbGroup::free(b - a - c));
        }
    }
}
