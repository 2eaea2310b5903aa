//! The complex `K(M)_p = Z<G^{2p}> (x) M[p]` and its checks.
//!
//! A basis element of `K_p` in total degree `n` is a tuple
//! `(a_1, b_1, ..., a_p, b_p)` together with a basis element of `M_{n-p}`;
//! its index is `rank(tuple) * dim M_{n-p} + m`. Every computation is done one
//! `(p, n)` spot at a time.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::modules::{GradedModuleData, Side};
use crate::ring::{GradedRing, StabilityProfile, WindowDeg};
use crate::verdict::{fmt_deg, Check, Verdict};
use crate::zlinalg::{
    chain_homology, kernel_basis, rank, smith_normal_form, HomologyGroup, IntMatrix, SmithSummary,
};

type SparseCol = Vec<(usize, i64)>;

/// Free coefficients for the complex: dimensions and degree-one actions.
#[derive(Clone, Debug)]
pub struct KCoeffs {
    pub name: String,
    pub dims: Vec<usize>,
    /// `act[n][pair][m]`: image of basis element `m` of degree `n`
    act: Vec<Vec<Vec<SparseCol>>>,
}

impl KCoeffs {
    /// The regular module, acting by prepending pairs.
    pub fn from_ring(ring: &GradedRing) -> Self {
        let pairs = ring.group().order().pow(2);
        let act = (0..ring.n_max())
            .map(|n| {
                (0..pairs)
                    .map(|ab| {
                        (0..ring.count(n).expect("in range"))
                            .map(|i| vec![(ring.left_pair(n, ab, i), 1)])
                            .collect()
                    })
                    .collect()
            })
            .collect();
        KCoeffs {
            name: "R".into(),
            dims: ring.counts(),
            act,
        }
    }

    /// A left module with free components.
    pub fn from_module(m: &GradedModuleData) -> Result<Self> {
        if m.side != Side::Left {
            return Err(Error::Module(format!("{} must be a left module", m.name)));
        }
        let free = m.to_free()?;
        let act = free
            .action
            .iter()
            .map(|per_pair| {
                per_pair
                    .iter()
                    .map(|a| {
                        (0..a.ncols())
                            .map(|j| {
                                a.column(j)
                                    .iter()
                                    .map(|(i, v)| {
                                        let v = i64::try_from(v).map_err(|_| {
                                            Error::Module("action entry exceeds i64".into())
                                        })?;
                                        Ok((*i, v))
                                    })
                                    .collect::<Result<SparseCol>>()
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(KCoeffs {
            name: m.name.clone(),
            dims: free.comps.iter().map(|c| c.gens).collect(),
            act,
        })
    }

    pub fn top(&self) -> usize {
        self.dims.len() - 1
    }

    fn dim(&self, n: i64) -> usize {
        if n < 0 {
            0
        } else {
            self.dims.get(n as usize).copied().unwrap_or(0)
        }
    }
}

/// Homology of one spot; `certified` is false when the incoming differential
/// lies outside the window and only `ker d` was computed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyRow {
    pub p: usize,
    pub n: usize,
    pub group: HomologyGroup,
    pub certified: bool,
}

pub struct KComplex<'g> {
    group: &'g FiniteGroup,
    coeffs: KCoeffs,
    p_max: usize,
    n_max: usize,
    q_pow: Vec<u64>,
    diffs: BTreeMap<(usize, usize), IntMatrix>,
}

/// Builds every differential `d_p: K_p(n) -> K_{p-1}(n)` with `1 <= p <= p_max`.
pub fn build_kcomplex<'g>(
    group: &'g FiniteGroup,
    coeffs: KCoeffs,
    p_max: usize,
    n_max: usize,
) -> Result<KComplex<'g>> {
    if n_max > coeffs.top() {
        return Err(Error::DegreeOverflow {
            degree: n_max,
            top: coeffs.top(),
        });
    }
    let q = group.order() as u64;
    let q_pow = (0..=2 * (p_max + 1)).map(|k| q.pow(k as u32)).collect();
    let mut k = KComplex {
        group,
        coeffs,
        p_max,
        n_max,
        q_pow,
        diffs: BTreeMap::new(),
    };
    let spots: Vec<(usize, usize)> = (1..=p_max)
        .flat_map(|p| (p..=n_max).map(move |n| (p, n)))
        .collect();
    let built: Vec<((usize, usize), IntMatrix)> = spots
        .par_iter()
        .map(|&(p, n)| ((p, n), k.assemble_differential(p, n)))
        .collect();
    k.diffs = built.into_iter().collect();
    Ok(k)
}

impl<'g> KComplex<'g> {
    pub fn p_max(&self) -> usize {
        self.p_max
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn coeffs(&self) -> &KCoeffs {
        &self.coeffs
    }

    /// Rank of `K_p` in total degree `n`.
    pub fn dim(&self, p: usize, n: usize) -> usize {
        if n < p {
            return 0;
        }
        (self.q_pow[2 * p] as usize) * self.coeffs.dim((n - p) as i64)
    }

    fn decode(&self, p: usize, rank: u64) -> Vec<usize> {
        let q = self.group.order() as u64;
        let mut v = vec![0usize; 2 * p];
        let mut r = rank;
        for d in (0..2 * p).rev() {
            v[d] = (r % q) as usize;
            r /= q;
        }
        v
    }

    /// `d` applied to one basis element of `K_p(n)`.
    fn d_column(&self, p: usize, n: usize, col: usize) -> SparseCol {
        let g = self.group;
        let q = g.order();
        let dm = self.coeffs.dim((n - p) as i64);
        let (tuple_rank, m) = ((col / dm) as u64, col % dm);
        let v = self.decode(p, tuple_rank);
        let dm_out = self.coeffs.dim((n + 1 - p) as i64);
        // conjugators d_k = c_{k+1} ... c_p, for k = p down to 1
        let mut suffix = vec![g.identity(); p + 1];
        for k in (1..p).rev() {
            suffix[k] = g.mul(g.commutator(v[2 * k], v[2 * k + 1]), suffix[k + 1]);
        }
        let mut out = Vec::new();
        for k in 1..=p {
            let dk = suffix[k];
            let a = g.conjugate(v[2 * (k - 1)], dk);
            let b = g.conjugate(v[2 * (k - 1) + 1], dk);
            let hi = tuple_rank / self.q_pow[2 * (p - k + 1)];
            let lo = tuple_rank % self.q_pow[2 * (p - k)];
            let rest = (hi * self.q_pow[2 * (p - k)] + lo) as usize;
            let sign = if k % 2 == 1 { 1 } else { -1 };
            for &(m2, c) in &self.coeffs.act[n - p][a * q + b][m] {
                out.push((rest * dm_out + m2, sign * c));
            }
        }
        out
    }

    fn assemble_differential(&self, p: usize, n: usize) -> IntMatrix {
        let cols: Vec<SparseCol> = (0..self.dim(p, n))
            .into_par_iter()
            .map(|c| self.d_column(p, n, c))
            .collect();
        IntMatrix::from_columns(self.dim(p - 1, n), cols)
    }

    /// `d_p: K_p(n) -> K_{p-1}(n)`; `d_0` is the zero map to the zero group.
    pub fn differential(&self, p: usize, n: usize) -> Result<IntMatrix> {
        if p == 0 {
            return Ok(IntMatrix::zeros(0, self.dim(0, n)));
        }
        if n < p {
            return Ok(IntMatrix::zeros(self.dim(p - 1, n), 0));
        }
        self.diffs.get(&(p, n)).cloned().ok_or(Error::DegreeOverflow {
            degree: p,
            top: self.p_max,
        })
    }

    /// `d_{p-1} d_p = 0` at every composable spot; the first offending basis
    /// element of `K_p(n)` otherwise.
    pub fn verify_d_squared(&self) -> Result<DSquared> {
        let spots: Vec<(usize, usize)> = (2..=self.p_max)
            .flat_map(|p| (p..=self.n_max).map(move |n| (p, n)))
            .collect();
        let bad: Vec<Option<String>> = spots
            .par_iter()
            .map(|&(p, n)| -> Result<Option<String>> {
                let comp = self.diffs[&(p - 1, n)].mul(&self.diffs[&(p, n)])?;
                Ok(comp.first_nonzero().map(|(_, col)| self.describe(p, n, col)))
            })
            .collect::<Result<_>>()?;
        Ok(DSquared {
            spots: spots.len(),
            first_bad: bad.into_iter().flatten().next(),
        })
    }

    fn describe(&self, p: usize, n: usize, col: usize) -> String {
        let dm = self.coeffs.dim((n - p) as i64);
        let v = self.decode(p, (col / dm) as u64);
        format!("K_{p}({n}) basis {v:?} (x) e_{}", col % dm)
    }

    /// `H_p` at total degree `n`, for `p < p_max`.
    pub fn homology(&self, p: usize, n: usize) -> Result<HomologyGroup> {
        if p >= self.p_max {
            return Err(Error::DegreeOverflow {
                degree: p + 1,
                top: self.p_max,
            });
        }
        chain_homology(&self.differential(p, n)?, &self.differential(p + 1, n)?)
    }

    /// Homology table over the window. Rows with `p = p_max` only record
    /// `ker d_p` and are marked uncertified.
    pub fn homology_table(&self) -> Result<Vec<HomologyRow>> {
        let spots: Vec<(usize, usize)> = (0..=self.p_max)
            .flat_map(|p| (p..=self.n_max).map(move |n| (p, n)))
            .collect();
        spots
            .par_iter()
            .map(|&(p, n)| {
                if p < self.p_max {
                    Ok(HomologyRow {
                        p,
                        n,
                        group: self.homology(p, n)?,
                        certified: true,
                    })
                } else {
                    let d = self.differential(p, n)?;
                    Ok(HomologyRow {
                        p,
                        n,
                        group: HomologyGroup::free(d.ncols() - rank(&d)),
                        certified: false,
                    })
                }
            })
            .collect()
    }

    /// `(Id (x) U) d = d (Id (x) U)` at every spot with `n + 1` in the window.
    pub fn verify_u_commutes(&self) -> Result<Option<String>> {
        let spots: Vec<(usize, usize)> = (1..=self.p_max)
            .flat_map(|p| (p..self.n_max).map(move |n| (p, n)))
            .collect();
        let bad: Vec<Option<String>> = spots
            .par_iter()
            .map(|&(p, n)| {
                let d_lo = &self.diffs[&(p, n)];
                let d_hi = &self.diffs[&(p, n + 1)];
                for col in 0..self.dim(p, n) {
                    let lhs = self.apply_u(p - 1, n, d_lo.column(col));
                    let ux = self.apply_u(p, n, &[(col, 1i64.into())]);
                    let rhs = apply_sparse(d_hi, &ux);
                    if normalize(lhs) != normalize(rhs) {
                        return Some(self.describe(p, n, col));
                    }
                }
                None
            })
            .collect();
        Ok(bad.into_iter().flatten().next())
    }

    fn apply_u(&self, p: usize, n: usize, v: &[(usize, num_bigint::BigInt)]) -> SparseCol {
        let dm = self.coeffs.dim((n - p) as i64);
        let dm_out = self.coeffs.dim((n + 1 - p) as i64);
        let mut out = Vec::new();
        for (idx, c) in v {
            let c = i64::try_from(c).expect("small coefficients");
            let (t, m) = (idx / dm, idx % dm);
            for &(m2, x) in &self.coeffs.act[n - p][0][m] {
                out.push((t * dm_out + m2, c * x));
            }
        }
        out
    }

    /// Observed `h_p = deg H_p(K)` from a homology table, for `p < p_max`.
    pub fn h_profile(&self, table: &[HomologyRow]) -> Vec<WindowDeg> {
        (0..self.p_max)
            .map(|p| {
                let flags: Vec<bool> = (0..=self.n_max)
                    .map(|n| {
                        table
                            .iter()
                            .find(|r| r.p == p && r.n == n)
                            .is_some_and(|r| !r.group.is_zero())
                    })
                    .collect();
                WindowDeg::from_flags(&flags)
            })
            .collect()
    }
}

fn apply_sparse(m: &IntMatrix, v: &[(usize, i64)]) -> SparseCol {
    let mut out = Vec::new();
    for &(k, c) in v {
        for (i, x) in m.column(k) {
            out.push((*i, c * i64::try_from(x).expect("small coefficients")));
        }
    }
    out
}

fn normalize(mut v: SparseCol) -> SparseCol {
    v.sort_unstable_by_key(|e| e.0);
    let mut out: SparseCol = Vec::with_capacity(v.len());
    for (i, c) in v {
        match out.last_mut() {
            Some((li, lc)) if *li == i => *lc += c,
            _ => out.push((i, c)),
        }
    }
    out.retain(|e| e.1 != 0);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DSquared {
    pub spots: usize,
    pub first_bad: Option<String>,
}

/// The homotopy and right multiplication on `K(R)`; needs the class of each
/// coefficient, so it only exists for the regular module.
pub struct RegularOps<'a, 'g> {
    k: &'a KComplex<'g>,
    ring: &'a GradedRing,
    boundaries: Vec<Vec<usize>>,
}

impl<'a, 'g> RegularOps<'a, 'g> {
    pub fn new(k: &'a KComplex<'g>, ring: &'a GradedRing) -> Result<Self> {
        if k.coeffs.dims != ring.counts()[..k.coeffs.dims.len()] || k.coeffs.name != "R" {
            return Err(Error::Module("homotopy needs K(R)".into()));
        }
        let boundaries = (0..=ring.n_max())
            .map(|n| (0..ring.count(n).expect("in range")).map(|i| ring.boundary(n, i)).collect())
            .collect();
        Ok(RegularOps { k, ring, boundaries })
    }

    /// `S_{(g,h)}` on one basis element of `K_p(n)`, landing in `K_{p+1}(n+1)`.
    fn s_column(&self, p: usize, n: usize, col: usize, g: usize, h: usize) -> (usize, i64) {
        let grp = self.k.group;
        let q = grp.order();
        let dm = self.k.coeffs.dim((n - p) as i64);
        let (tuple_rank, w) = ((col / dm) as u64, col % dm);
        let v = self.k.decode(p, tuple_rank);
        let tau = v
            .chunks(2)
            .fold(grp.identity(), |acc, c| grp.mul(acc, grp.commutator(c[0], c[1])));
        let tau = grp.mul(tau, self.boundaries[n - p][w]);
        let ti = grp.inv(tau);
        let (g2, h2) = (grp.conjugate(g, ti), grp.conjugate(h, ti));
        let new_rank = ((g2 * q + h2) as u64) * self.k.q_pow[2 * p] + tuple_rank;
        // same coefficient degree n - p = (n + 1) - (p + 1)
        (new_rank as usize * dm + w, 1)
    }

    /// Right multiplication by `[g,h]` on one basis element of `K_p(n)`.
    fn rho_column(&self, p: usize, n: usize, col: usize, gh: usize) -> (usize, i64) {
        let dm = self.k.coeffs.dim((n - p) as i64);
        let dm_out = self.k.coeffs.dim((n + 1 - p) as i64);
        let (t, w) = (col / dm, col % dm);
        (t * dm_out + self.ring.right_pair(n - p, gh, w), 1)
    }

    /// Verifies `S d + d S = rho_{(g,h)}` on `K_p(n)` for every `(g, h)`.
    /// Returns the first failing `(g, h)` and basis element.
    pub fn homotopy_at(&self, p: usize, n: usize) -> Option<String> {
        let q = self.k.group.order();
        for g in 0..q {
            for h in 0..q {
                for col in 0..self.k.dim(p, n) {
                    let mut acc: SparseCol = Vec::new();
                    if p >= 1 {
                        for (i, c) in self.k.d_column(p, n, col) {
                            let (j, s) = self.s_column(p - 1, n, i, g, h);
                            acc.push((j, c * s));
                        }
                    }
                    let (sx, s) = self.s_column(p, n, col, g, h);
                    for (i, c) in self.k.d_column(p + 1, n + 1, sx) {
                        acc.push((i, c * s));
                    }
                    let (r, c) = self.rho_column(p, n, col, g * q + h);
                    acc.push((r, -c));
                    if !normalize(acc).is_empty() {
                        return Some(format!("(g,h) = ({g},{h}), {}", self.k.describe(p, n, col)));
                    }
                }
            }
        }
        None
    }

    /// Spots `(p, n)` where the homotopy identity is checkable.
    pub fn homotopy_spots(&self) -> Vec<(usize, usize)> {
        (0..self.k.p_max)
            .flat_map(|p| (p..self.k.n_max).map(move |n| (p, n)))
            .collect()
    }

    pub fn verify_homotopy(&self) -> HomotopyResult {
        let spots = self.homotopy_spots();
        let bad: Vec<Option<String>> = spots.par_iter().map(|&(p, n)| self.homotopy_at(p, n)).collect();
        HomotopyResult {
            spots: spots.len(),
            pairs: self.k.group.order().pow(2),
            first_bad: bad.into_iter().flatten().next(),
        }
    }

    /// Right multiplication by `[g,h]` as a matrix `K_p(n) -> K_p(n+1)`.
    pub fn rho_matrix(&self, p: usize, n: usize, gh: usize) -> IntMatrix {
        let cols = (0..self.k.dim(p, n))
            .map(|c| vec![self.rho_column(p, n, c, gh)])
            .collect();
        IntMatrix::from_columns(self.k.dim(p, n + 1), cols)
    }

    /// Whether right multiplication by every `[g,h]` kills `H_p` at degree `n`:
    /// `im d_{p+1}(n+1) + rho(ker d_p(n)) = im d_{p+1}(n+1)`.
    pub fn annihilates(&self, p: usize, n: usize, image: &SmithSummary) -> Result<Option<String>> {
        let z = if p == 0 {
            IntMatrix::identity(self.k.dim(0, n))
        } else {
            kernel_basis(&self.k.differential(p, n)?)
        };
        let d_next = self.k.differential(p + 1, n + 1)?;
        let q = self.k.group.order();
        let mut all = d_next.clone();
        for gh in 0..q * q {
            all = all.hstack(&self.rho_matrix(p, n, gh).mul(&z)?)?;
        }
        if contains_with(image, &all) {
            return Ok(None);
        }
        // locate a failing pair
        for gh in 0..q * q {
            let one = d_next.hstack(&self.rho_matrix(p, n, gh).mul(&z)?)?;
            if !contains_with(image, &one) {
                return Ok(Some(format!("p = {p}, n = {n}, (g,h) = ({},{})", gh / q, gh % q)));
            }
        }
        Ok(Some(format!("p = {p}, n = {n}")))
    }

    /// Spots `(p, n)` where the annihilation is checkable.
    pub fn annihilation_spots(&self) -> Vec<(usize, usize)> {
        self.homotopy_spots()
    }

    /// Runs the annihilation check at every checkable spot.
    pub fn verify_annihilation(&self) -> Result<AnnihilationResult> {
        let spots = self.annihilation_spots();
        let bad: Vec<Option<String>> = spots
            .par_iter()
            .map(|&(p, n)| {
                let image = smith_normal_form(&self.k.differential(p + 1, n + 1)?);
                self.annihilates(p, n, &image)
            })
            .collect::<Result<_>>()?;
        Ok(AnnihilationResult {
            spots: spots.len(),
            first_bad: bad.into_iter().flatten().next(),
        })
    }

    /// Draws basis elements of `K_p(n)` with random coefficient
    /// representatives and checks that `S_{(g,h)}` computed from the
    /// representative agrees with the canonical one.
    pub fn sample_s_well_definedness<R: Rng>(&self, rng: &mut R, samples: usize) -> Result<Vec<String>> {
        let grp = self.k.group;
        let q = grp.order();
        let members: Vec<Vec<Vec<u64>>> = self.ring.tables().iter().map(|t| t.members()).collect();
        let spots = self.homotopy_spots();
        let mut failures = Vec::new();
        if spots.is_empty() {
            return Ok(failures);
        }
        for _ in 0..samples {
            let (p, n) = spots[rng.gen_range(0..spots.len())];
            let col = rng.gen_range(0..self.k.dim(p, n));
            let (g, h) = (rng.gen_range(0..q), rng.gen_range(0..q));
            let expected = self.s_column(p, n, col, g, h);
            let dm = self.k.coeffs.dim((n - p) as i64);
            let (t, w) = (col / dm, col % dm);
            let v = self.k.decode(p, t as u64);
            let w_rep = self.ring.random_member(rng, n - p, w, &members[n - p]);
            let tau = grp.mul(
                crate::freegroup::evaluated_boundary(grp, &v),
                crate::freegroup::evaluated_boundary(grp, &w_rep),
            );
            let ti = grp.inv(tau);
            let mut out = vec![grp.conjugate(g, ti), grp.conjugate(h, ti)];
            out.extend(&v);
            let tuple_rank = out.iter().fold(0usize, |acc, &x| acc * q + x);
            let class = self.ring.class_of(&w_rep)?;
            let got = (tuple_rank * dm + class, 1);
            if got != expected {
                failures.push(format!("p = {p}, n = {n}, basis {v:?}, rep {w_rep:?}"));
            }
        }
        Ok(failures)
    }
}

fn contains_with(image: &SmithSummary, all: &IntMatrix) -> bool {
    let s = smith_normal_form(all);
    s.rank == image.rank && s.det() == image.det()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomotopyResult {
    pub spots: usize,
    pub pairs: usize,
    pub first_bad: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnihilationResult {
    pub spots: usize,
    pub first_bad: Option<String>,
}

/// Window bound checks on `K(R)` against the stability profile of `R`.
pub fn bound_checks(profile: &StabilityProfile, h: &[WindowDeg], n_max: usize) -> Vec<Check> {
    let a = profile.a_r;
    let a_tilde = profile.a_tilde;
    let certified = profile.a_certified && profile.stable_within_window;
    let window_note = if profile.stable_within_window {
        String::new()
    } else {
        "; window not stable, verdict cannot be certified".to_string()
    };
    let bij = |n: usize| profile.u_injective[n] && profile.u_surjective[n];
    let mut out = Vec::new();

    // (i) h_p <= p + A + 1
    for (p, hp) in h.iter().enumerate() {
        let bound = p as i64 + a + 1;
        let lhs = hp.value.map(|v| v as i64);
        let violated = lhs.is_some_and(|l| l > bound);
        let verdict = match (violated, profile.stable_within_window, certified) {
            (_, false, _) => Verdict::Inconclusive,
            (false, _, _) => Verdict::Pass,
            (true, _, true) => Verdict::Fail,
            (true, _, false) => Verdict::Inconclusive,
        };
        out.push(
            Check::new(format!("degree_bound[p={p}]"), "h_p(R) <= p + A(R) + 1", verdict)
                .with_detail(format!("h_{p} = {}, bound = {bound}{window_note}", fmt_deg(lhs)))
                .with_witness(violated.then(|| format!("H_{p} nonzero in degree {}", fmt_deg(lhs)))),
        );
    }

    // U bijective from A(R) + 1 on
    let threshold_check = |name: &str, anchor: &str, threshold: i64, extra_certified: bool| {
        let first_bad = (0..n_max).find(|&n| n as i64 >= threshold && !bij(n));
        let verdict = match (first_bad, profile.stable_within_window, certified && extra_certified) {
            (_, false, _) => Verdict::Inconclusive,
            (None, _, _) => Verdict::Pass,
            (Some(_), _, true) => Verdict::Fail,
            (Some(_), _, false) => Verdict::Inconclusive,
        };
        Check::new(name, anchor, verdict)
            .with_detail(format!(
                "threshold = {threshold}{}{window_note}",
                if threshold >= n_max as i64 { "; no U in the window starts at or above it" } else { "" }
            ))
            .with_witness(first_bad.map(|n| format!("U not bijective on R_{n}")))
    };
    out.push(threshold_check(
        "u_stabilization",
        "U: R_n -> R_{n+1} bijective for n >= A(R) + 1",
        a + 1,
        true,
    ));
    let h01 = h.iter().take(2).map(|d| d.value.map_or(-1, |v| v as i64)).max().unwrap_or(-1);
    let h_certified = h.len() >= 2 && h.iter().take(2).all(WindowDeg::certified);
    out.push(threshold_check(
        "ham2_threshold",
        "U iso for n >= max{h_0(R), h_1(R)} + 5A(R) + 1",
        h01.max(0) + 5 * a + 1,
        h_certified,
    ));
    out.push(threshold_check(
        "main_theorem_q0",
        "U iso in degree 0 homology for n >= A~(R) + 6A(R) + 2",
        a_tilde + 6 * a + 2,
        true,
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{load_group, GroupSpec};
    use crate::modules::{derive_module, Recipe};
    use crate::orbits::DEFAULT_STATE_CAP;
    use crate::ring::build_ring;
    use num_bigint::BigInt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(name: &str, n_max: usize) -> (FiniteGroup, GradedRing) {
        let g = load_group(&GroupSpec::named(name).unwrap()).unwrap();
        let r = build_ring(&g, n_max, 2, DEFAULT_STATE_CAP).unwrap();
        (g, r)
    }

    #[test]
    fn first_differential_is_the_action() {
        let (g, r) = setup("s3", 2);
        let k = build_kcomplex(&g, KCoeffs::from_ring(&r), 1, 2).unwrap();
        let d = k.differential(1, 2).unwrap();
        let q = g.order();
        for a in 0..q {
            for b in 0..q {
                for m in 0..r.count(1).unwrap() {
                    let col = (a * q + b) * r.count(1).unwrap() + m;
                    let expect = r.left_pair(1, a * q + b, m);
                    assert_eq!(d.column(col), &[(expect, BigInt::from(1))]);
                }
            }
        }
    }

    #[test]
    fn trivial_group_alternates() {
        let (g, r) = setup("trivial", 4);
        let k = build_kcomplex(&g, KCoeffs::from_ring(&r), 3, 4).unwrap();
        for p in 1..=3 {
            for n in p..=4 {
                let d = k.differential(p, n).unwrap();
                let expect = if p % 2 == 1 { 1 } else { 0 };
                assert_eq!(d.get(0, 0), BigInt::from(expect), "p={p} n={n}");
            }
        }
        assert!(k.verify_d_squared().unwrap().first_bad.is_none());
        let table = k.homology_table().unwrap();
        for row in table.iter().filter(|r| r.certified) {
            let expect = if row.p % 2 == 0 && row.n == row.p { 1 } else { 0 };
            assert_eq!(row.group, HomologyGroup::free(expect), "{row:?}");
        }
    }

    #[test]
    fn d_squared_and_homotopy_small_battery() {
        for (name, n_max, p_max) in [("z2", 4, 3), ("z3", 3, 2), ("s3", 3, 2)] {
            let (g, r) = setup(name, n_max);
            let k = build_kcomplex(&g, KCoeffs::from_ring(&r), p_max, n_max).unwrap();
            assert!(k.verify_d_squared().unwrap().first_bad.is_none(), "{name}");
            let ops = RegularOps::new(&k, &r).unwrap();
            let h = ops.verify_homotopy();
            assert!(h.first_bad.is_none(), "{name}: {:?}", h.first_bad);
            assert!(k.verify_u_commutes().unwrap().is_none(), "{name}");
        }
    }

    #[test]
    fn homology_is_annihilated() {
        let (g, r) = setup("z2", 4);
        let k = build_kcomplex(&g, KCoeffs::from_ring(&r), 2, 4).unwrap();
        let ops = RegularOps::new(&k, &r).unwrap();
        let res = ops.verify_annihilation().unwrap();
        assert!(res.first_bad.is_none(), "{res:?}");
        let table = k.homology_table().unwrap();
        let h0: Vec<_> = table.iter().filter(|r| r.p == 0).collect();
        assert_eq!(h0[0].group, HomologyGroup::free(1));
        assert!(h0[1..].iter().all(|r| r.group.is_zero()));
    }

    #[test]
    fn free_module_coefficients() {
        let (g, r) = setup("z2", 3);
        let bar = derive_module(&r, &Recipe::bar(), Side::Left).unwrap();
        let k = build_kcomplex(&g, KCoeffs::from_module(&bar).unwrap(), 2, 3).unwrap();
        assert!(k.verify_d_squared().unwrap().first_bad.is_none());
        assert!(k.verify_u_commutes().unwrap().is_none());
    }

    #[test]
    fn s_is_well_defined() {
        let (g, r) = setup("s3", 3);
        let k = build_kcomplex(&g, KCoeffs::from_ring(&r), 2, 3).unwrap();
        let ops = RegularOps::new(&k, &r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert!(ops.sample_s_well_definedness(&mut rng, 300).unwrap().is_empty());
    }

    #[test]
    fn bounds_on_z2() {
        let (g, r) = setup("z2", 4);
        let k = build_kcomplex(&g, KCoeffs::from_ring(&r), 2, 4).unwrap();
        let table = k.homology_table().unwrap();
        let h = k.h_profile(&table);
        let checks = bound_checks(&r.stability_profile(), &h, 4);
        for c in checks {
            assert_ne!(c.verdict, Verdict::Fail, "{c:?}");
        }
    }
}
