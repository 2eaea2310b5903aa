//! The graded ring of connected components.
//!
//! `R_n` is free on the orbits of `G^{2n}`; the product concatenates
//! representatives and `U` is left multiplication by the class of `(1,1)`.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::orbits::{self, OrbitTable};

/// A homogeneous element of `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingElement {
    pub degree: usize,
    pub coeffs: Vec<BigInt>,
}

impl RingElement {
    pub fn basis(ring: &GradedRing, degree: usize, index: usize) -> Result<Self> {
        let len = ring.count(degree)?;
        let mut coeffs = vec![BigInt::zero(); len];
        coeffs[index] = BigInt::from(1);
        Ok(RingElement { degree, coeffs })
    }

    pub fn unit() -> Self {
        RingElement {
            degree: 0,
            coeffs: vec![BigInt::from(1)],
        }
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, &BigInt)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }
}

/// Degree of a graded object as far as a finite window can tell.
///
/// `value` is the largest degree with a nonzero part (`None` for the zero
/// object); `saturated` means the object is still nonzero at the top of the
/// window, so the true degree may be larger.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowDeg {
    pub value: Option<usize>,
    pub saturated: bool,
}

impl WindowDeg {
    /// From per-degree nonvanishing flags over the window `0..flags.len()`.
    pub fn from_flags(flags: &[bool]) -> Self {
        WindowDeg {
            value: flags.iter().rposition(|&b| b),
            saturated: flags.last().copied().unwrap_or(false),
        }
    }

    pub fn certified(&self) -> bool {
        !self.saturated
    }

    /// Degree as a signed integer, with the zero object at `-1`.
    pub fn as_i64(&self) -> i64 {
        self.value.map_or(-1, |v| v as i64)
    }

    pub fn max(self, o: WindowDeg) -> WindowDeg {
        WindowDeg {
            value: self.value.max(o.value),
            saturated: self.saturated || o.saturated,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityProfile {
    pub counts: Vec<usize>,
    pub u_injective: Vec<bool>,
    pub u_surjective: Vec<bool>,
    pub deg_kernel_u: WindowDeg,
    pub deg_quotient_u: WindowDeg,
    pub deg_u: usize,
    pub a_r: i64,
    pub a_tilde: i64,
    pub a_certified: bool,
    /// First degree from which every computed `U` is a bijection.
    pub bijective_from: Option<usize>,
    pub stable_within_window: bool,
}

#[derive(Clone, Debug)]
pub struct GradedRing {
    group: FiniteGroup,
    tables: Vec<OrbitTable>,
    u_map: Vec<Vec<u32>>,
    left_pair: Vec<Vec<Vec<u32>>>,
    right_pair: Vec<Vec<Vec<u32>>>,
    q_pow: Vec<u64>,
}

/// Builds `R_0, ..., R_{n_max}` from freshly enumerated orbit tables.
pub fn build_ring(g: &FiniteGroup, n_max: usize, depth: usize, state_cap: u64) -> Result<GradedRing> {
    let tables = (0..=n_max)
        .map(|n| orbits::orbits_for_genus(g, n, depth, state_cap))
        .collect::<Result<Vec<_>>>()?;
    GradedRing::from_tables(g, tables)
}

impl GradedRing {
    /// Assembles the ring from orbit tables for degrees `0..tables.len()`.
    pub fn from_tables(g: &FiniteGroup, tables: Vec<OrbitTable>) -> Result<Self> {
        for (n, t) in tables.iter().enumerate() {
            if t.n != n || t.order != g.order() || t.group_hash != g.content_hash() {
                return Err(Error::Cache(format!(
                    "orbit table for degree {n} does not belong to this group"
                )));
            }
        }
        let q = g.order() as u64;
        let top = tables.len().saturating_sub(1);
        let q_pow: Vec<u64> = (0..=2 * top + 2).map(|k| q.pow(k as u32)).collect();
        let mut ring = GradedRing {
            group: g.clone(),
            tables,
            u_map: Vec::new(),
            left_pair: Vec::new(),
            right_pair: Vec::new(),
            q_pow,
        };
        for n in 0..top {
            let q2 = q * q;
            let shift = ring.q_pow[2 * n];
            let mut left = Vec::with_capacity((q2) as usize);
            let mut right = Vec::with_capacity((q2) as usize);
            for ab in 0..q2 {
                left.push(
                    ring.tables[n]
                        .reps
                        .iter()
                        .map(|&r| ring.tables[n + 1].orbit_of_rank(ab * shift + r))
                        .collect::<Vec<u32>>(),
                );
                right.push(
                    ring.tables[n]
                        .reps
                        .iter()
                        .map(|&r| ring.tables[n + 1].orbit_of_rank(r * q2 + ab))
                        .collect::<Vec<u32>>(),
                );
            }
            ring.u_map.push(left[0].clone());
            ring.left_pair.push(left);
            ring.right_pair.push(right);
        }
        Ok(ring)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn n_max(&self) -> usize {
        self.tables.len() - 1
    }

    pub fn table(&self, n: usize) -> Result<&OrbitTable> {
        self.tables.get(n).ok_or(Error::DegreeOverflow {
            degree: n,
            top: self.n_max(),
        })
    }

    pub fn tables(&self) -> &[OrbitTable] {
        &self.tables
    }

    pub fn count(&self, n: usize) -> Result<usize> {
        Ok(self.table(n)?.count())
    }

    pub fn counts(&self) -> Vec<usize> {
        self.tables.iter().map(OrbitTable::count).collect()
    }

    fn check_degree(&self, n: usize) -> Result<()> {
        if n > self.n_max() {
            return Err(Error::DegreeOverflow {
                degree: n,
                top: self.n_max(),
            });
        }
        Ok(())
    }

    /// Representative tuple of a basis class.
    pub fn rep(&self, n: usize, i: usize) -> Vec<usize> {
        self.tables[n].rep_tuple(i as u32)
    }

    pub fn rep_rank(&self, n: usize, i: usize) -> u64 {
        self.tables[n].reps[i]
    }

    /// Class of an arbitrary tuple of even length.
    pub fn class_of(&self, v: &[usize]) -> Result<usize> {
        if v.len() % 2 != 0 {
            return Err(Error::DimensionMismatch {
                expected: v.len() + 1,
                got: v.len(),
            });
        }
        let n = v.len() / 2;
        self.check_degree(n)?;
        Ok(self.tables[n].orbit_of(v)? as usize)
    }

    /// Basis product `[v_i] * [w_j]`, both given by class index.
    pub fn multiply_basis(&self, m: usize, i: usize, n: usize, j: usize) -> Result<usize> {
        self.check_degree(m + n)?;
        let rank = self.tables[m].reps[i] * self.q_pow[2 * n] + self.tables[n].reps[j];
        Ok(self.tables[m + n].orbit_of_rank(rank) as usize)
    }

    /// Class of the concatenation of two explicit tuples.
    pub fn concat_class(&self, v: &[usize], w: &[usize]) -> Result<usize> {
        self.class_of(&[v, w].concat())
    }

    pub fn ring_multiply(&self, x: &RingElement, y: &RingElement) -> Result<RingElement> {
        let d = x.degree + y.degree;
        self.check_degree(d)?;
        let mut coeffs = vec![BigInt::zero(); self.count(d)?];
        for (i, a) in x.support() {
            for (j, b) in y.support() {
                let k = self.multiply_basis(x.degree, i, y.degree, j)?;
                coeffs[k] += a * b;
            }
        }
        Ok(RingElement { degree: d, coeffs })
    }

    /// Basis map of `U` from degree `n` to `n + 1`.
    pub fn u_map(&self, n: usize) -> Result<&[u32]> {
        self.u_map.get(n).map(Vec::as_slice).ok_or(Error::DegreeOverflow {
            degree: n + 1,
            top: self.n_max(),
        })
    }

    pub fn apply_u(&self, x: &RingElement) -> Result<RingElement> {
        let map = self.u_map(x.degree)?;
        let mut coeffs = vec![BigInt::zero(); self.count(x.degree + 1)?];
        for (i, a) in x.support() {
            coeffs[map[i] as usize] += a;
        }
        Ok(RingElement {
            degree: x.degree + 1,
            coeffs,
        })
    }

    /// Class of `(a, b)` prepended to basis class `i` of degree `n`.
    #[inline]
    pub fn left_pair(&self, n: usize, pair: usize, i: usize) -> usize {
        self.left_pair[n][pair][i] as usize
    }

    /// Class of basis class `i` of degree `n` with `(a, b)` appended.
    #[inline]
    pub fn right_pair(&self, n: usize, pair: usize, i: usize) -> usize {
        self.right_pair[n][pair][i] as usize
    }

    pub fn pair_index(&self, a: usize, b: usize) -> usize {
        a * self.group.order() + b
    }

    /// Evaluated boundary word of a basis class.
    pub fn boundary(&self, n: usize, i: usize) -> usize {
        crate::freegroup::evaluated_boundary(&self.group, &self.rep(n, i))
    }

    pub fn stability_profile(&self) -> StabilityProfile {
        let top = self.n_max();
        let counts = self.counts();
        let mut u_injective = Vec::new();
        let mut u_surjective = Vec::new();
        for n in 0..top {
            let map = &self.u_map[n];
            let mut hit = vec![false; counts[n + 1]];
            let mut inj = true;
            for &t in map {
                if std::mem::replace(&mut hit[t as usize], true) {
                    inj = false;
                }
            }
            u_injective.push(inj);
            u_surjective.push(hit.iter().all(|&h| h));
        }
        // R[U] lives in degrees 0..top, R/UR in 0..=top (R_0 is never hit)
        let kernel_flags: Vec<bool> = u_injective.iter().map(|&i| !i).collect();
        let mut quot_flags = vec![true];
        quot_flags.extend(u_surjective.iter().map(|&s| !s));
        let deg_kernel_u = WindowDeg::from_flags(&kernel_flags);
        let deg_quotient_u = WindowDeg::from_flags(&quot_flags);
        let a = deg_kernel_u.max(deg_quotient_u);
        let a_r = a.as_i64();
        let deg_u = 1usize;
        let a_tilde = a_r.max(deg_u as i64);
        let bijective: Vec<bool> = u_injective
            .iter()
            .zip(&u_surjective)
            .map(|(&i, &s)| i && s)
            .collect();
        let bijective_from = if bijective.last() == Some(&true) {
            let first_bad = bijective.iter().rposition(|&b| !b);
            Some(first_bad.map_or(0, |k| k + 1))
        } else {
            None
        };
        let stable_within_window = top >= 2 && bijective[top - 2] && bijective[top - 1];
        StabilityProfile {
            counts,
            u_injective,
            u_surjective,
            deg_kernel_u,
            deg_quotient_u,
            deg_u,
            a_r,
            a_tilde,
            a_certified: a.certified(),
            bijective_from,
            stable_within_window,
        }
    }

    pub fn summary(&self) -> RingSummary {
        RingSummary {
            group: self.group.name().to_string(),
            group_hash: hex::encode(self.group.content_hash()),
            moveset_hashes: self.tables.iter().map(|t| hex::encode(t.moveset_hash)).collect(),
            counts: self.counts(),
            u_map: self.u_map.clone(),
            profile: self.stability_profile(),
        }
    }

    /// Picks a uniformly random member of the orbit of basis class `i`.
    pub fn random_member<R: Rng>(&self, rng: &mut R, n: usize, i: usize, members: &[Vec<u64>]) -> Vec<usize> {
        let m = &members[i];
        let r = m[rng.gen_range(0..m.len())];
        self.tables[n].codec().decode(r)
    }

    /// Checks that the class of `v' w'` does not depend on the members
    /// `v' ~ v`, `w' ~ w` chosen. Returns the number of failures.
    pub fn sample_product_well_definedness<R: Rng>(&self, rng: &mut R, samples: usize) -> Result<WellDefinedness> {
        let top = self.n_max();
        let members: Vec<Vec<Vec<u64>>> = self.tables.iter().map(OrbitTable::members).collect();
        let mut failures = Vec::new();
        for _ in 0..samples {
            let m = rng.gen_range(0..=top);
            let n = rng.gen_range(0..=top - m);
            let i = rng.gen_range(0..self.count(m)?);
            let j = rng.gen_range(0..self.count(n)?);
            let expected = self.multiply_basis(m, i, n, j)?;
            let v = self.random_member(rng, m, i, &members[m]);
            let w = self.random_member(rng, n, j, &members[n]);
            let got = self.concat_class(&v, &w)?;
            if got != expected {
                failures.push(format!("{v:?} * {w:?} -> class {got}, expected {expected}"));
            }
        }
        Ok(WellDefinedness { samples, failures })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WellDefinedness {
    pub samples: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RingSummary {
    pub group: String,
    pub group_hash: String,
    pub moveset_hashes: Vec<String>,
    pub counts: Vec<usize>,
    pub u_map: Vec<Vec<u32>>,
    pub profile: StabilityProfile,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{load_group, GroupSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ring(name: &str, n_max: usize) -> GradedRing {
        let g = load_group(&GroupSpec::named(name).unwrap()).unwrap();
        build_ring(&g, n_max, 2, orbits::DEFAULT_STATE_CAP).unwrap()
    }

    #[test]
    fn trivial_ring() {
        let r = ring("trivial", 4);
        assert_eq!(r.counts(), vec![1; 5]);
        let p = r.stability_profile();
        assert_eq!(p.a_r, 0);
        assert_eq!(p.bijective_from, Some(0));
        assert!(p.stable_within_window && p.a_certified);
        assert_eq!(p.a_tilde, 1);
    }

    #[test]
    fn z2_profile() {
        let r = ring("z2", 4);
        assert_eq!(r.counts(), vec![1, 2, 2, 2, 2]);
        let p = r.stability_profile();
        assert_eq!(p.deg_kernel_u.value, None);
        assert_eq!(p.deg_quotient_u.value, Some(1));
        assert_eq!(p.a_r, 1);
        assert_eq!(p.bijective_from, Some(1));
        assert!(p.stable_within_window);
        // U(g,1) = (1,1,g,1)
        let x = r.class_of(&[1, 0]).unwrap();
        let ux = r.apply_u(&RingElement::basis(&r, 1, x).unwrap()).unwrap();
        let expect = r.class_of(&[0, 0, 1, 0]).unwrap();
        assert_eq!(ux, RingElement::basis(&r, 2, expect).unwrap());
    }

    #[test]
    fn small_counts() {
        assert_eq!(ring("z3", 2).counts()[1], 2);
        let z4 = ring("z4", 3);
        assert_eq!(z4.counts(), vec![1, 3, 3, 3]);
        let k = ring("klein", 2);
        assert_eq!(k.counts(), vec![1, 5, 6]);
    }

    #[test]
    fn unit_and_u_laws() {
        let r = ring("s3", 2);
        let one = RingElement::unit();
        for n in 0..=2 {
            for i in 0..r.count(n).unwrap() {
                let y = RingElement::basis(&r, n, i).unwrap();
                assert_eq!(r.ring_multiply(&one, &y).unwrap(), y);
                assert_eq!(r.ring_multiply(&y, &one).unwrap(), y);
                if n < 2 {
                    let u = RingElement::basis(&r, 1, r.class_of(&[0, 0]).unwrap()).unwrap();
                    assert_eq!(r.ring_multiply(&u, &y).unwrap(), r.apply_u(&y).unwrap());
                    // U is central
                    assert_eq!(r.ring_multiply(&y, &u).unwrap(), r.apply_u(&y).unwrap());
                }
            }
        }
        assert_eq!(
            r.apply_u(&one).unwrap(),
            RingElement::basis(&r, 1, r.class_of(&[0, 0]).unwrap()).unwrap()
        );
        assert!(matches!(
            r.ring_multiply(
                &RingElement::basis(&r, 2, 0).unwrap(),
                &RingElement::basis(&r, 1, 0).unwrap()
            ),
            Err(Error::DegreeOverflow { .. })
        ));
    }

    #[test]
    fn associativity_and_generation() {
        for name in ["z4", "s3"] {
            let r = ring(name, 3);
            for a in 0..r.count(1).unwrap() {
                for b in 0..r.count(1).unwrap() {
                    for c in 0..r.count(1).unwrap() {
                        let ab = r.multiply_basis(1, a, 1, b).unwrap();
                        let bc = r.multiply_basis(1, b, 1, c).unwrap();
                        assert_eq!(
                            r.multiply_basis(2, ab, 1, c).unwrap(),
                            r.multiply_basis(1, a, 2, bc).unwrap()
                        );
                    }
                }
            }
            let q = r.group().order();
            for n in 1..=3 {
                for i in 0..r.count(n).unwrap() {
                    let v = r.rep(n, i);
                    let rest = r.class_of(&v[2..]).unwrap();
                    assert_eq!(r.left_pair(n - 1, v[0] * q + v[1], rest), i);
                }
            }
        }
    }

    #[test]
    fn left_pairs_commute_with_u() {
        let r = ring("s3", 3);
        let q = r.group().order();
        for n in 0..2 {
            for i in 0..r.count(n).unwrap() {
                for ab in 0..q * q {
                    let lhs = r.left_pair(n + 1, ab, r.u_map(n).unwrap()[i] as usize);
                    let rhs = r.u_map(n + 1).unwrap()[r.left_pair(n, ab, i)] as usize;
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn well_defined_products() {
        let r = ring("s3", 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = r.sample_product_well_definedness(&mut rng, 500).unwrap();
        assert!(w.failures.is_empty(), "{:?}", w.failures);
    }

    #[test]
    fn window_degrees() {
        assert_eq!(WindowDeg::from_flags(&[]).value, None);
        let d = WindowDeg::from_flags(&[true, false, true, false]);
        assert_eq!((d.value, d.saturated), (Some(2), false));
        assert!(WindowDeg::from_flags(&[false, true]).saturated);
        assert_eq!(WindowDeg::from_flags(&[false]).as_i64(), -1);
    }
}
