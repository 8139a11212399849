use super::group::AnalyticGroup;
use crate::brauer::{brauer_an, K3HodgeDatum};
use crate::error::{Error, Result};

/// `(H^{2k}, H^{2k+1})` of `Z(m)_D` for a rank-`r` Hodge–Tate piece in degree `2k`.
/// Twists `m ≤ 0` give ordinary cohomology.
pub fn deligne_tate(r: usize, k: u32, m: i64) -> (AnalyticGroup, AnalyticGroup) {
    if m <= k as i64 {
        (AnalyticGroup::free(r), AnalyticGroup::zero())
    } else {
        (AnalyticGroup::zero(), AnalyticGroup::cstar(r))
    }
}

/// `(H^{2k}, H^{2k+1})` of `Z(m)_D` for a K3-type piece in degree `2k`, `k` the weight index.
///
/// `m = k` gives `NS` and `Br_an`; `m < k` gives the whole lattice; `m ≥ k + 2` gives
/// `H^{2k}(C)/H^{2k}(Z)`. The mixed case `m = k + 1` is not modelled.
pub fn deligne_k3(datum: &K3HodgeDatum, m: i64) -> Result<(AnalyticGroup, AnalyticGroup)> {
    let k = datum.weight_index as i64;
    let rank = datum.rank();
    if m < k {
        Ok((AnalyticGroup::free(rank), AnalyticGroup::zero()))
    } else if m == k {
        Ok((AnalyticGroup::free(datum.ns_rank()), AnalyticGroup::brauer(brauer_an(datum))))
    } else if m == k + 1 {
        Err(Error::InvalidInput(format!("twist {m} on a K3-type piece of weight {} is not supported", 2 * k)))
    } else {
        Ok((AnalyticGroup::zero(), AnalyticGroup::cstar(rank)))
    }
}

/// One even-degree summand of the integral cohomology of a variety with no odd cohomology.
#[derive(Clone, Debug)]
pub enum HodgePiece {
    Tate { k: u32, rank: usize },
    K3(K3HodgeDatum),
}

impl HodgePiece {
    fn half_degree(&self) -> u32 {
        match self {
            HodgePiece::Tate { k, .. } => *k,
            HodgePiece::K3(d) => d.weight_index,
        }
    }
}

/// `H^j(W, Z(m)_D)` for `j = 0..=2·dim`.
pub fn deligne_table(pieces: &[HodgePiece], dim: u32, m: i64) -> Result<Vec<AnalyticGroup>> {
    let mut out = vec![AnalyticGroup::zero(); 2 * dim as usize + 2];
    for piece in pieces {
        let k = piece.half_degree();
        if k > dim {
            return Err(Error::InvalidInput(format!("piece in degree {} above dimension {dim}", 2 * k)));
        }
        let (even, odd) = match piece {
            HodgePiece::Tate { k, rank } => deligne_tate(*rank, *k, m),
            HodgePiece::K3(d) => deligne_k3(d, m)?,
        };
        let j = 2 * k as usize;
        out[j] = out[j].direct_sum(&even);
        out[j + 1] = out[j + 1].direct_sum(&odd);
    }
    // H^{2·dim+1} is nonzero only when the top piece has twist above its weight.
    if out.last().is_some_and(AnalyticGroup::is_zero) {
        out.pop();
    }
    Ok(out)
}

pub fn deligne_projective_space(n: u32, m: i64) -> Vec<AnalyticGroup> {
    let pieces: Vec<HodgePiece> = (0..=n).map(|k| HodgePiece::Tate { k, rank: 1 }).collect();
    deligne_table(&pieces, n, m).expect("Tate pieces only")
}

/// A K3 surface: `H^0`, `H^4` of Tate type and `H^2` of K3 type (weight index 1).
pub fn deligne_k3_surface(datum: &K3HodgeDatum, m: i64) -> Result<Vec<AnalyticGroup>> {
    check_weight(datum, 1)?;
    deligne_table(
        &[HodgePiece::Tate { k: 0, rank: 1 }, HodgePiece::K3(datum.clone()), HodgePiece::Tate { k: 2, rank: 1 }],
        2,
        m,
    )
}

/// A cubic fourfold: Tate pieces of rank 1 in degrees 0, 2, 6, 8 and `H^4` of K3 type.
pub fn deligne_cubic(datum: &K3HodgeDatum, m: i64) -> Result<Vec<AnalyticGroup>> {
    check_weight(datum, 2)?;
    let mut pieces: Vec<HodgePiece> =
        [0, 1, 3, 4].iter().map(|&k| HodgePiece::Tate { k, rank: 1 }).collect();
    pieces.push(HodgePiece::K3(datum.clone()));
    deligne_table(&pieces, 4, m)
}

fn check_weight(datum: &K3HodgeDatum, k: u32) -> Result<()> {
    if datum.weight_index != k {
        return Err(Error::InvalidInput(format!(
            "expected a K3-type datum of weight {}, got weight {}",
            2 * k,
            2 * datum.weight_index
        )));
    }
    Ok(())
}

/// `H^j(P(E), Z(m)_D) = ⊕_{i=0..f} H^{j−2i}(W, Z(m−i)_D)` for a `P^f`-bundle over `W`.
pub fn deligne_projective_bundle(
    base: impl Fn(i64) -> Result<Vec<AnalyticGroup>>,
    base_dim: u32,
    fiber_dim: u32,
    m: i64,
) -> Result<Vec<AnalyticGroup>> {
    let mut out = vec![AnalyticGroup::zero(); 2 * (base_dim + fiber_dim) as usize + 1];
    for i in 0..=fiber_dim as usize {
        for (j, g) in base(m - i as i64)?.iter().enumerate() {
            if out.len() <= j + 2 * i {
                out.resize(j + 2 * i + 1, AnalyticGroup::zero());
            }
            out[j + 2 * i] = out[j + 2 * i].direct_sum(g);
        }
    }
    Ok(out)
}

/// `H^j(𝒴, Z(m)_D)` for the universal hyperplane section of a cubic fourfold.
pub fn deligne_universal_section(datum: &K3HodgeDatum, m: i64) -> Result<Vec<AnalyticGroup>> {
    deligne_projective_bundle(|t| deligne_cubic(datum, t), 4, 4, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{self, LatticeVector};

    fn cubic_datum(extra: &[usize]) -> K3HodgeDatum {
        let mut ns = vec![lattice::cubic_h2_default()];
        ns.extend(extra.iter().map(|&i| LatticeVector::basis(23, i)));
        K3HodgeDatum::new(lattice::cubic_h4_default(), ns, 2).unwrap()
    }

    #[test]
    fn tate_cases() {
        assert_eq!(deligne_tate(3, 1, 0), (AnalyticGroup::free(3), AnalyticGroup::zero()));
        assert_eq!(deligne_tate(1, 1, 2), (AnalyticGroup::zero(), AnalyticGroup::cstar(1)));
        assert_eq!(deligne_tate(1, 2, 2), (AnalyticGroup::free(1), AnalyticGroup::zero()));
    }

    #[test]
    fn projective_space_tables() {
        let t = deligne_projective_space(5, 2);
        let c = AnalyticGroup::cstar(1);
        let z = AnalyticGroup::free(1);
        let zero = AnalyticGroup::zero();
        let expected = vec![
            zero.clone(), c.clone(), zero.clone(), c, z.clone(), zero.clone(), z.clone(), zero.clone(), z.clone(),
            zero, z,
        ];
        assert_eq!(t, expected);
        for n in 1..=6u32 {
            for m in 0..=n as i64 + 2 {
                let nonzero = deligne_projective_space(n, m).iter().filter(|g| !g.is_zero()).count();
                assert_eq!(nonzero, n as usize + 1, "P^{n}, m = {m}");
            }
            let ordinary = deligne_projective_space(n, 0);
            assert!(ordinary.iter().step_by(2).all(|g| *g == AnalyticGroup::free(1)));
        }
    }

    #[test]
    fn k3_surface_table() {
        let d = K3HodgeDatum::new(lattice::k3_lattice(), vec![lattice::k3_polarization(2)], 1).unwrap();
        let t = deligne_k3_surface(&d, 1).unwrap();
        assert_eq!(
            t,
            vec![
                AnalyticGroup::zero(),
                AnalyticGroup::cstar(1),
                AnalyticGroup::free(1),
                AnalyticGroup::torus(21),
                AnalyticGroup::free(1)
            ]
        );
    }

    #[test]
    fn cubic_and_section_tables() {
        let d = cubic_datum(&[]);
        let x = deligne_cubic(&d, 2).unwrap();
        assert_eq!(x[4], AnalyticGroup::free(1));
        assert_eq!(x[5], AnalyticGroup::torus(22));
        assert_eq!(x[1], AnalyticGroup::cstar(1));
        assert_eq!(x[3], AnalyticGroup::cstar(1));
        let y = deligne_universal_section(&d, 2).unwrap();
        assert_eq!(y[3], AnalyticGroup::cstar(2));
        assert_eq!(y[4], AnalyticGroup::free(3));
        assert_eq!(y[5], AnalyticGroup::torus(22));
        assert_eq!(y[6], AnalyticGroup::free(26));
        let full: Vec<usize> = (0..23).collect();
        let d = K3HodgeDatum::new(lattice::cubic_h4_default(), full.iter().map(|&i| LatticeVector::basis(23, i)).collect(), 2).unwrap();
        let (ns, br) = deligne_k3(&d, 2).unwrap();
        assert_eq!(ns, AnalyticGroup::free(23));
        assert!(br.is_zero());
        assert!(deligne_k3(&d, 3).is_err());
    }
}
