//! Independent oracles: bar-complex homology of small groups, the stable
//! orbit-count prediction, and symplectic orbit counts for abelian groups.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegroup::MoveSet;
use crate::group::{enumerate_subgroups, FiniteGroup};
use crate::orbits::TupleCodec;
use crate::zlinalg::{chain_homology, HomologyGroup, IntMatrix};

pub const BAR_ORDER_CAP: usize = 12;

/// Normalized bar complex in degrees 1..3 with trivial coefficients.
#[derive(Clone, Debug)]
pub struct BarComplexSlice {
    pub order: usize,
    /// ranks of `C_1, C_2, C_3`
    pub ranks: [usize; 3],
    pub d2: IntMatrix,
    pub d3: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarHomology {
    pub h1: HomologyGroup,
    pub h2: HomologyGroup,
}

impl BarHomology {
    /// `|H_2|`; the group is finite for a finite group.
    pub fn schur_order(&self) -> BigInt {
        debug_assert_eq!(self.h2.free_rank, 0);
        self.h2.torsion.iter().product()
    }
}

/// Builds `d_2` and `d_3`; non-identity elements `1..|G|` index each slot.
pub fn bar_slice(g: &FiniteGroup) -> Result<BarComplexSlice> {
    let q = g.order();
    if q > BAR_ORDER_CAP {
        return Err(Error::GroupTooLarge {
            order: q,
            cap: BAR_ORDER_CAP,
        });
    }
    let m = q - 1;
    // index of a non-identity element, None for the identity
    let ix = |x: usize| (x != 0).then(|| x - 1);
    let mut d2 = Vec::with_capacity(m * m);
    for a in 1..q {
        for b in 1..q {
            let mut col = Vec::new();
            let terms = [(ix(b), 1), (ix(g.mul(a, b)), -1), (ix(a), 1)];
            for (i, s) in terms {
                if let Some(i) = i {
                    col.push((i, s));
                }
            }
            d2.push(col);
        }
    }
    let pair = |x: usize, y: usize| Some(ix(x)? * m + ix(y)?);
    let mut d3 = Vec::with_capacity(m * m * m);
    for a in 1..q {
        for b in 1..q {
            for c in 1..q {
                let terms = [
                    (pair(b, c), 1),
                    (pair(g.mul(a, b), c), -1),
                    (pair(a, g.mul(b, c)), 1),
                    (pair(a, b), -1),
                ];
                d3.push(terms.into_iter().filter_map(|(i, s)| Some((i?, s))).collect());
            }
        }
    }
    Ok(BarComplexSlice {
        order: q,
        ranks: [m, m * m, m * m * m],
        d2: IntMatrix::from_columns(m, d2),
        d3: IntMatrix::from_columns(m * m, d3),
    })
}

/// `H_1` and `H_2` of `G` with integer coefficients.
pub fn bar_homology(g: &FiniteGroup) -> Result<BarHomology> {
    let s = bar_slice(g)?;
    let d1 = IntMatrix::zeros(0, s.ranks[0]);
    Ok(BarHomology {
        h1: chain_homology(&d1, &s.d2)?,
        h2: chain_homology(&s.d2, &s.d3)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupTerm {
    pub order: usize,
    pub schur: BigInt,
    pub derived_order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StablePrediction {
    pub terms: Vec<SubgroupTerm>,
    /// sum over subgroups of `|H_2(H)|`
    pub marked: BigInt,
    /// sum over subgroups of `|H_2(H)| * |[H, H]|`, which also separates the
    /// possible boundary values
    pub bordered: BigInt,
}

pub fn stable_count_prediction(g: &FiniteGroup) -> Result<StablePrediction> {
    let subs = enumerate_subgroups(g)?;
    let mut terms = Vec::with_capacity(subs.len());
    for s in subs.iter() {
        let h = bar_homology(&s.group)?;
        terms.push(SubgroupTerm {
            order: s.group.order(),
            schur: h.schur_order(),
            derived_order: s.group.commutator_subgroup().len(),
        });
    }
    let marked = terms.iter().map(|t| t.schur.clone()).sum();
    let bordered = terms.iter().map(|t| &t.schur * BigInt::from(t.derived_order)).sum();
    Ok(StablePrediction {
        terms,
        marked,
        bordered,
    })
}

/// Standard form on `Z^{2n}`: `<e_{2k}, e_{2k+1}> = 1`.
fn form(x: &[i64], y: &[i64]) -> i64 {
    x.chunks(2)
        .zip(y.chunks(2))
        .map(|(a, b)| a[0] * b[1] - a[1] * b[0])
        .sum()
}

/// The transvections `x -> x + <x, v> v` with `v = e_i` or `e_i + e_j`.
pub fn transvection_vectors(n: usize) -> Vec<Vec<i64>> {
    let d = 2 * n;
    let mut out = Vec::new();
    for i in 0..d {
        let mut v = vec![0; d];
        v[i] = 1;
        out.push(v);
    }
    for i in 0..d {
        for j in i + 1..d {
            let mut v = vec![0; d];
            v[i] = 1;
            v[j] = 1;
            out.push(v);
        }
    }
    out
}

/// Matrix of a transvection, columns are images of basis vectors.
pub fn transvection_matrix(v: &[i64]) -> Vec<Vec<i64>> {
    let d = v.len();
    (0..d)
        .map(|i| {
            let mut e = vec![0; d];
            e[i] = 1;
            let c = form(&e, v);
            e.iter().zip(v).map(|(x, y)| x + c * y).collect()
        })
        .collect()
}

/// `<Mx, My> = <x, y>` on basis vectors; `cols[j]` is the image of `e_j`.
pub fn preserves_form(cols: &[Vec<i64>]) -> bool {
    let d = cols.len();
    (0..d).all(|i| {
        (0..d).all(|j| {
            let (mut ei, mut ej) = (vec![0; d], vec![0; d]);
            ei[i] = 1;
            ej[j] = 1;
            form(&cols[i], &cols[j]) == form(&ei, &ej)
        })
    })
}

/// Orbit count of `G^{2n}` under the transvection family; `G` must be abelian.
pub fn sp_orbit_oracle(g: &FiniteGroup, n: usize, state_cap: u64) -> Result<usize> {
    if !g.is_abelian() {
        return Err(Error::NotAbelian);
    }
    let codec = TupleCodec::new(g.order(), 2 * n)?;
    let states = codec.states();
    if states > state_cap {
        return Err(Error::StateCapExceeded {
            states: states as u128,
            cap: state_cap,
        });
    }
    let vs = transvection_vectors(n);
    for v in &vs {
        if !preserves_form(&transvection_matrix(v)) {
            return Err(Error::Module(format!("transvection along {v:?} is not symplectic")));
        }
    }
    let mut seen = vec![false; states as usize];
    let mut orbits = 0;
    let mut stack = Vec::new();
    for start in 0..states {
        if seen[start as usize] {
            continue;
        }
        orbits += 1;
        seen[start as usize] = true;
        stack.push(start);
        while let Some(r) = stack.pop() {
            let t = codec.decode(r);
            for v in &vs {
                // phi(v) as a group element
                let phi_v = t
                    .iter()
                    .zip(v)
                    .fold(g.identity(), |acc, (&x, &c)| g.mul(acc, g.pow(x, c)));
                let image: Vec<usize> = (0..2 * n)
                    .map(|i| {
                        let mut e = vec![0; 2 * n];
                        e[i] = 1;
                        g.mul(t[i], g.pow(phi_v, form(&e, v)))
                    })
                    .collect();
                let s = codec.encode(&image);
                if !seen[s as usize] {
                    seen[s as usize] = true;
                    stack.push(s);
                }
            }
        }
    }
    Ok(orbits)
}

/// Image of the abelianized moves modulo a prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModPImage {
    pub prime: u64,
    /// `None` when the closure exceeded the cap
    pub order: Option<u64>,
    pub sp_order: u64,
    pub all_symplectic: bool,
}

/// A [`ModPImage`] tagged with its genus, for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModPRecord {
    pub genus: usize,
    #[serde(flatten)]
    pub image: ModPImage,
}

impl ModPRecord {
    pub fn new(genus: usize, image: ModPImage) -> Self {
        ModPRecord { genus, image }
    }
}

/// `|Sp(2n, F_p)| = p^{n^2} prod (p^{2i} - 1)`.
pub fn sp_order(n: usize, p: u64) -> u64 {
    let mut o = p.pow((n * n) as u32);
    for i in 1..=n {
        o *= p.pow(2 * i as u32) - 1;
    }
    o
}

pub fn moves_mod_p(moves: &MoveSet, p: u64, cap: usize) -> ModPImage {
    let d = moves.rank();
    let n = d / 2;
    let mats: Vec<Vec<Vec<i64>>> = moves
        .moves
        .iter()
        .map(|m| {
            // transpose to columns
            let a = m.abelianization();
            (0..d).map(|j| (0..d).map(|i| a[i][j]).collect()).collect()
        })
        .collect();
    let all_symplectic = mats.iter().all(|m| preserves_form(m));
    let reduce = |cols: &Vec<Vec<i64>>| -> Vec<u8> {
        cols.iter()
            .flatten()
            .map(|&x| x.rem_euclid(p as i64) as u8)
            .collect()
    };
    let gens: Vec<Vec<u8>> = mats.iter().map(reduce).collect();
    let mul = |a: &[u8], b: &[u8]| -> Vec<u8> {
        // column-major: (ab)[j][i] = sum_k a[k][i] b[j][k]
        let mut out = vec![0u8; d * d];
        for j in 0..d {
            for i in 0..d {
                let mut s = 0u64;
                for k in 0..d {
                    s += a[k * d + i] as u64 * b[j * d + k] as u64;
                }
                out[j * d + i] = (s % p) as u8;
            }
        }
        out
    };
    let mut id = vec![0u8; d * d];
    for i in 0..d {
        id[i * d + i] = 1;
    }
    let mut seen: HashSet<Vec<u8>> = HashSet::from([id.clone()]);
    let mut frontier = vec![id];
    let mut overflow = false;
    while let Some(x) = frontier.pop() {
        for gm in &gens {
            let y = mul(gm, &x);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    overflow = true;
                    break;
                }
                frontier.push(y);
            }
        }
        if overflow {
            break;
        }
    }
    ModPImage {
        prime: p,
        order: (!overflow).then_some(seen.len() as u64),
        sp_order: sp_order(n, p),
        all_symplectic,
    }
}

/// Summary printed by `oracle` and stored in the report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub group: String,
    pub h1: String,
    pub h2: String,
    pub abelianization: Vec<u64>,
    pub h1_matches_abelianization: bool,
    pub subgroups: usize,
    pub stable_marked: BigInt,
    pub stable_bordered: BigInt,
}

pub fn oracle_summary(g: &FiniteGroup) -> Result<OracleSummary> {
    let bar = bar_homology(g)?;
    let ab = g.abelianization_invariants();
    let pred = stable_count_prediction(g)?;
    Ok(OracleSummary {
        group: g.name().to_string(),
        h1: bar.h1.to_string(),
        h2: bar.h2.to_string(),
        h1_matches_abelianization: h1_matches(&bar.h1, &ab),
        abelianization: ab,
        subgroups: pred.terms.len(),
        stable_marked: pred.marked,
        stable_bordered: pred.bordered,
    })
}

pub fn h1_matches(h1: &HomologyGroup, invariants: &[u64]) -> bool {
    let inv: Vec<BigInt> = invariants
        .iter()
        .filter(|&&x| x != 1)
        .map(|&x| BigInt::from(x))
        .collect();
    h1.free_rank == 0 && h1.torsion == inv && !h1.torsion.iter().any(|t| t.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{load_group, GroupSpec};

    fn grp(name: &str) -> FiniteGroup {
        load_group(&GroupSpec::named(name).unwrap()).unwrap()
    }

    #[test]
    fn bar_complex_is_a_complex() {
        for name in ["z2", "z3", "klein", "s3", "q8"] {
            let s = bar_slice(&grp(name)).unwrap();
            assert!(s.d2.mul(&s.d3).unwrap().is_zero(), "{name}");
        }
    }

    #[test]
    fn small_homology() {
        let h = bar_homology(&grp("trivial")).unwrap();
        assert!(h.h1.is_zero() && h.h2.is_zero());
        for k in 2..=7 {
            let h = bar_homology(&FiniteGroup::cyclic(k)).unwrap();
            assert_eq!(h.h1.torsion, vec![BigInt::from(k)]);
            assert!(h.h2.is_zero());
        }
        let k = bar_homology(&grp("klein")).unwrap();
        assert_eq!(k.h2.torsion, vec![BigInt::from(2)]);
    }

    #[test]
    fn too_large() {
        assert!(matches!(
            bar_homology(&FiniteGroup::cyclic(13)),
            Err(Error::GroupTooLarge { .. })
        ));
    }

    #[test]
    fn predictions() {
        let cases = [("trivial", 1, 1), ("z2", 2, 2), ("z3", 2, 2), ("z4", 3, 3), ("klein", 6, 6), ("s3", 6, 8)];
        for (name, marked, bordered) in cases {
            let p = stable_count_prediction(&grp(name)).unwrap();
            assert_eq!(p.marked, BigInt::from(marked), "{name}");
            assert_eq!(p.bordered, BigInt::from(bordered), "{name}");
        }
    }

    #[test]
    fn transvections_are_symplectic() {
        for n in 1..=3 {
            for v in transvection_vectors(n) {
                assert!(preserves_form(&transvection_matrix(&v)));
            }
        }
        assert!(!preserves_form(&[vec![2, 0], vec![0, 1]]));
    }

    #[test]
    fn sp_orbits() {
        assert_eq!(sp_orbit_oracle(&grp("z2"), 1, 1 << 20).unwrap(), 2);
        assert_eq!(sp_orbit_oracle(&grp("z3"), 1, 1 << 20).unwrap(), 2);
        assert_eq!(sp_orbit_oracle(&grp("z4"), 1, 1 << 20).unwrap(), 3);
        assert_eq!(sp_orbit_oracle(&grp("klein"), 2, 1 << 20).unwrap(), 6);
        assert_eq!(sp_orbit_oracle(&grp("trivial"), 2, 1 << 20).unwrap(), 1);
        assert!(matches!(sp_orbit_oracle(&grp("s3"), 1, 1 << 20), Err(Error::NotAbelian)));
        assert!(matches!(
            sp_orbit_oracle(&grp("z4"), 3, 100),
            Err(Error::StateCapExceeded { .. })
        ));
    }

    #[test]
    fn sp_orders() {
        assert_eq!(sp_order(1, 2), 6);
        assert_eq!(sp_order(1, 3), 24);
        assert_eq!(sp_order(2, 2), 720);
    }

    #[test]
    fn moves_generate_sp_mod_small_primes() {
        for n in 1..=2 {
            let moves = crate::freegroup::enumerate_stabilizing_automorphisms(n, 2).unwrap();
            for p in [2, 3] {
                let img = moves_mod_p(&moves, p, 1 << 20);
                assert!(img.all_symplectic);
                assert_eq!(img.order, Some(img.sp_order), "n={n} p={p}");
            }
        }
    }

    #[test]
    fn h1_comparison() {
        for name in ["trivial", "z4", "klein", "s3", "d4", "q8"] {
            let g = grp(name);
            let s = oracle_summary(&g).unwrap();
            assert!(s.h1_matches_abelianization, "{name}: {s:?}");
        }
    }
}
