//! Graded modules over the ring of components, presented degreewise.
//!
//! Each component `M_n` is the cokernel of a relation matrix (columns are
//! relations among `gens` generators). The structure maps are the actions of
//! the degree-one classes `[a,b]`, indexed by the pair `a * |G| + b`; since
//! `R` is generated in degree one they determine the whole module structure.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{GradedRing, StabilityProfile, WindowDeg};
use crate::verdict::{bound_verdict, deg_add, deg_of, fmt_deg, Check, Verdict};
use crate::zlinalg::{
    image_basis, kernel_basis, lattice_contains, rank, same_lattice, smith_normal_form,
    smith_with_transforms, solve_with, DMat, HomologyGroup, IntMatrix,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub gens: usize,
    pub rels: IntMatrix,
}

impl Component {
    pub fn zero() -> Self {
        Component::free(0)
    }

    pub fn free(gens: usize) -> Self {
        Component {
            gens,
            rels: IntMatrix::zeros(gens, 0),
        }
    }

    pub fn group(&self) -> HomologyGroup {
        HomologyGroup::cokernel_of(self.gens, &self.rels)
    }

    pub fn is_zero(&self) -> bool {
        self.gens == 0 || self.group().is_zero()
    }

    pub fn is_presented_free(&self) -> bool {
        self.rels.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedModuleData {
    pub name: String,
    pub side: Side,
    pub n_max: usize,
    pub pairs: usize,
    pub comps: Vec<Component>,
    /// `action[n][pair]` maps generators of degree `n` to degree `n + 1`.
    pub action: Vec<Vec<IntMatrix>>,
}

/// How a module is obtained from the regular module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Recipe {
    Regular,
    PositivePart,
    ImageU,
    Augmentation,
    QuotientU { of: Box<Recipe> },
    KernelU { of: Box<Recipe> },
    Shift { of: Box<Recipe>, by: usize },
    Truncate { of: Box<Recipe>, top: usize },
}

impl Recipe {
    pub fn bar() -> Recipe {
        Recipe::QuotientU {
            of: Box::new(Recipe::Regular),
        }
    }

    pub fn kernel_u() -> Recipe {
        Recipe::KernelU {
            of: Box::new(Recipe::Regular),
        }
    }

    pub fn shift(self, by: usize) -> Recipe {
        Recipe::Shift {
            of: Box::new(self),
            by,
        }
    }

    pub fn truncate(self, top: usize) -> Recipe {
        Recipe::Truncate {
            of: Box::new(self),
            top,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Recipe::Regular => "R".into(),
            Recipe::PositivePart => "R_{>0}".into(),
            Recipe::ImageU => "UR".into(),
            Recipe::Augmentation => "Z".into(),
            Recipe::QuotientU { of } if **of == Recipe::Regular => "R/UR".into(),
            Recipe::QuotientU { of } => format!("({})/U", of.label()),
            Recipe::KernelU { of } => format!("{}[U]", of.label()),
            Recipe::Shift { of, by } => format!("{}[{by}]", of.label()),
            Recipe::Truncate { of, top } => format!("{}<={top}", of.label()),
        }
    }
}

/// A right ideal of `R` spanned by basis classes, degree by degree.
#[derive(Clone, Debug)]
pub struct Ideal {
    pub name: String,
    pub basis: Vec<Vec<usize>>,
}

impl Ideal {
    pub fn whole(ring: &GradedRing) -> Ideal {
        Ideal {
            name: "R".into(),
            basis: ring.counts().iter().map(|&c| (0..c).collect()).collect(),
        }
    }

    pub fn positive(ring: &GradedRing) -> Ideal {
        let mut basis: Vec<Vec<usize>> = ring.counts().iter().map(|&c| (0..c).collect()).collect();
        basis[0].clear();
        Ideal {
            name: "R_{>0}".into(),
            basis,
        }
    }

    pub fn image_u(ring: &GradedRing) -> Ideal {
        let mut basis = vec![Vec::new()];
        for n in 0..ring.n_max() {
            let mut img: Vec<usize> = ring
                .u_map(n)
                .expect("degree below the top")
                .iter()
                .map(|&c| c as usize)
                .collect();
            img.sort_unstable();
            img.dedup();
            basis.push(img);
        }
        Ideal {
            name: "UR".into(),
            basis,
        }
    }

    /// The ideal as a free module with the given side action.
    pub fn module(&self, ring: &GradedRing, side: Side) -> Result<GradedModuleData> {
        let pairs = ring.group().order().pow(2);
        let pos: Vec<HashMap<usize, usize>> = self
            .basis
            .iter()
            .map(|b| b.iter().enumerate().map(|(j, &c)| (c, j)).collect())
            .collect();
        let mut action = Vec::new();
        for n in 0..ring.n_max() {
            let mut per_pair = Vec::with_capacity(pairs);
            for ab in 0..pairs {
                let mut cols = Vec::with_capacity(self.basis[n].len());
                for &c in &self.basis[n] {
                    let image = match side {
                        Side::Left => ring.left_pair(n, ab, c),
                        Side::Right => ring.right_pair(n, ab, c),
                    };
                    let j = *pos[n + 1].get(&image).ok_or_else(|| {
                        Error::Module(format!(
                            "{} is not closed under the action (degree {n}, pair {ab})",
                            self.name
                        ))
                    })?;
                    cols.push(vec![(j, 1)]);
                }
                per_pair.push(IntMatrix::from_columns(self.basis[n + 1].len(), cols));
            }
            action.push(per_pair);
        }
        Ok(GradedModuleData {
            name: self.name.clone(),
            side,
            n_max: ring.n_max(),
            pairs,
            comps: self.basis.iter().map(|b| Component::free(b.len())).collect(),
            action,
        })
    }
}

/// Builds the module described by `recipe`, with the given side action.
pub fn derive_module(ring: &GradedRing, recipe: &Recipe, side: Side) -> Result<GradedModuleData> {
    let mut m = match recipe {
        Recipe::Regular => Ideal::whole(ring).module(ring, side)?,
        Recipe::PositivePart => Ideal::positive(ring).module(ring, side)?,
        Recipe::ImageU => Ideal::image_u(ring).module(ring, side)?,
        Recipe::Augmentation => {
            let pairs = ring.group().order().pow(2);
            let mut comps = vec![Component::free(1)];
            comps.extend((0..ring.n_max()).map(|_| Component::zero()));
            let action = (0..ring.n_max())
                .map(|n| vec![IntMatrix::zeros(0, usize::from(n == 0)); pairs])
                .collect();
            GradedModuleData {
                name: String::new(),
                side,
                n_max: ring.n_max(),
                pairs,
                comps,
                action,
            }
        }
        Recipe::QuotientU { of } => derive_module(ring, of, side)?.quotient_u(),
        Recipe::KernelU { of } => derive_module(ring, of, side)?.kernel_u()?,
        Recipe::Shift { of, by } => derive_module(ring, of, side)?.shift(*by, ring.n_max()),
        Recipe::Truncate { of, top } => derive_module(ring, of, side)?.truncate(*top),
    };
    m.name = recipe.label();
    m.validate()?;
    Ok(m)
}

impl GradedModuleData {
    pub fn validate(&self) -> Result<()> {
        if self.comps.len() != self.n_max + 1 || self.action.len() != self.n_max {
            return Err(Error::Module(format!("{}: inconsistent degree range", self.name)));
        }
        for (n, c) in self.comps.iter().enumerate() {
            if c.rels.nrows() != c.gens {
                return Err(Error::Module(format!("{}: relation shape in degree {n}", self.name)));
            }
        }
        for (n, per_pair) in self.action.iter().enumerate() {
            if per_pair.len() != self.pairs {
                return Err(Error::Module(format!("{}: missing actions in degree {n}", self.name)));
            }
            for a in per_pair {
                if a.ncols() != self.comps[n].gens || a.nrows() != self.comps[n + 1].gens {
                    return Err(Error::Module(format!(
                        "{}: action shape in degree {n}",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn gens(&self, n: usize) -> usize {
        self.comps.get(n).map_or(0, |c| c.gens)
    }

    /// The action of the degree-one class `(1,1)`.
    pub fn u_action(&self, n: usize) -> &IntMatrix {
        &self.action[n][0]
    }

    pub fn groups(&self) -> Vec<HomologyGroup> {
        self.comps.iter().map(Component::group).collect()
    }

    pub fn deg(&self) -> WindowDeg {
        let flags: Vec<bool> = self.comps.iter().map(|c| !c.is_zero()).collect();
        WindowDeg::from_flags(&flags)
    }

    pub fn is_free(&self) -> bool {
        self.comps.iter().all(Component::is_presented_free)
    }

    fn quotient_u(mut self) -> GradedModuleData {
        for n in 1..=self.n_max {
            let extra = self.action[n - 1][0].clone();
            self.comps[n].rels = self.comps[n].rels.hstack(&extra).expect("same generator count");
        }
        self
    }

    fn kernel_u(self) -> Result<GradedModuleData> {
        if self.n_max == 0 {
            return Err(Error::Module("the kernel of U needs at least two degrees".into()));
        }
        let top = self.n_max - 1;
        // basis of {x : U x lies in the relations of the next degree}
        let bases: Vec<DMat> = (0..=top)
            .map(|n| {
                let pre = preimage_lattice(self.u_action(n), &self.comps[n + 1].rels);
                lattice_basis(&pre)
            })
            .collect();
        let forms: Vec<_> = bases.iter().map(smith_with_transforms).collect();
        let coords = |n: usize, m: &IntMatrix| -> Result<IntMatrix> {
            let dense = m.to_dense();
            let cols: Result<Vec<Vec<BigInt>>> = (0..dense.cols())
                .map(|j| {
                    solve_with(&forms[n], &dense.col(j)).ok_or_else(|| {
                        Error::Module(format!("vector outside the kernel of U in degree {n}"))
                    })
                })
                .collect();
            Ok(DMat::from_cols(bases[n].cols(), &cols?).to_sparse())
        };
        let mut comps = Vec::new();
        for n in 0..=top {
            comps.push(Component {
                gens: bases[n].cols(),
                rels: coords(n, &self.comps[n].rels)?,
            });
        }
        let mut action = Vec::new();
        for n in 0..top {
            let b = bases[n].to_sparse();
            let mut per_pair = Vec::with_capacity(self.pairs);
            for a in &self.action[n] {
                per_pair.push(coords(n + 1, &a.mul(&b)?)?);
            }
            action.push(per_pair);
        }
        Ok(GradedModuleData {
            name: format!("{}[U]", self.name),
            side: self.side,
            n_max: top,
            pairs: self.pairs,
            comps,
            action,
        })
    }

    fn shift(self, by: usize, window: usize) -> GradedModuleData {
        let n_max = (self.n_max + by).min(window);
        let mut comps: Vec<Component> = (0..by.min(n_max + 1)).map(|_| Component::zero()).collect();
        comps.extend(self.comps.iter().take(n_max + 1 - comps.len()).cloned());
        let action = (0..n_max)
            .map(|n| {
                if n + 1 < by {
                    vec![IntMatrix::zeros(0, 0); self.pairs]
                } else if n + 1 == by {
                    vec![IntMatrix::zeros(comps[n + 1].gens, 0); self.pairs]
                } else {
                    self.action[n - by].clone()
                }
            })
            .collect();
        GradedModuleData {
            name: format!("{}[{by}]", self.name),
            side: self.side,
            n_max,
            pairs: self.pairs,
            comps,
            action,
        }
    }

    fn truncate(mut self, top: usize) -> GradedModuleData {
        for n in top + 1..=self.n_max {
            self.comps[n] = Component::zero();
        }
        for n in top..self.n_max {
            let cols = self.comps[n].gens;
            for a in &mut self.action[n] {
                *a = IntMatrix::zeros(0, cols);
            }
        }
        self
    }

    /// An isomorphic module with free components, if every component is
    /// torsion-free.
    pub fn to_free(&self) -> Result<GradedModuleData> {
        if self.is_free() {
            return Ok(self.clone());
        }
        // per degree: projection onto the cokernel and a section of it
        let mut proj = Vec::new();
        let mut sect = Vec::new();
        for (n, c) in self.comps.iter().enumerate() {
            let sf = smith_with_transforms(&c.rels.to_dense());
            if sf.diag.iter().any(|d| !d.is_one()) {
                return Err(Error::Module(format!(
                    "{} has torsion in degree {n}",
                    self.name
                )));
            }
            let r = sf.diag.len();
            let u = sf.u.expect("transforms requested");
            let keep: Vec<usize> = (r..c.gens).collect();
            let inv = unimodular_inverse(&u);
            proj.push(u.select_rows(&keep).to_sparse());
            sect.push(inv.select_cols(&keep).to_sparse());
        }
        let mut action = Vec::new();
        for n in 0..self.n_max {
            let mut per_pair = Vec::new();
            for a in &self.action[n] {
                per_pair.push(proj[n + 1].mul(&a.mul(&sect[n])?)?);
            }
            action.push(per_pair);
        }
        Ok(GradedModuleData {
            name: self.name.clone(),
            side: self.side,
            n_max: self.n_max,
            pairs: self.pairs,
            comps: proj.iter().map(|p| Component::free(p.nrows())).collect(),
            action,
        })
    }

    /// `H_0`: the quotient by the image of every degree-one action.
    pub fn h0(&self) -> Vec<HomologyGroup> {
        (0..=self.n_max)
            .map(|n| {
                let mut rels = self.comps[n].rels.clone();
                if n > 0 {
                    for a in &self.action[n - 1] {
                        rels = rels.hstack(a).expect("same generator count");
                    }
                }
                HomologyGroup::cokernel_of(self.comps[n].gens, &rels.dedup_cols())
            })
            .collect()
    }

    /// `M / UM`, degreewise.
    pub fn mod_u(&self) -> Vec<HomologyGroup> {
        self.clone().quotient_u().groups()
    }

    /// Whether `ker(U: M_n -> M_{n+1})` is nonzero, for `n < n_max`.
    pub fn kernel_u_flags(&self) -> Vec<bool> {
        (0..self.n_max)
            .map(|n| {
                let pre = preimage_lattice(self.u_action(n), &self.comps[n + 1].rels);
                !same_lattice(&pre, &self.comps[n].rels).expect("same ambient rank")
            })
            .collect()
    }

    /// Composite action of basis class `c` of `R_i` on generators of degree `k`.
    pub fn class_action(&self, ring: &GradedRing, i: usize, c: usize, k: usize) -> Result<IntMatrix> {
        if k + i > self.n_max {
            return Err(Error::DegreeOverflow {
                degree: k + i,
                top: self.n_max,
            });
        }
        let q = ring.group().order();
        let rep = ring.rep(i, c);
        let pairs: Vec<usize> = rep.chunks(2).map(|p| p[0] * q + p[1]).collect();
        let mut mat = IntMatrix::identity(self.gens(k));
        match self.side {
            // [a_1,b_1,...] m = l_{a_1 b_1}( ... l_{a_i b_i}(m))
            Side::Left => {
                for (step, &ab) in pairs.iter().rev().enumerate() {
                    mat = self.action[k + step][ab].mul(&mat)?;
                }
            }
            Side::Right => {
                for (step, &ab) in pairs.iter().enumerate() {
                    mat = self.action[k + step][ab].mul(&mat)?;
                }
            }
        }
        Ok(mat)
    }
}

/// `{x : a x in span(rels)}` as generating columns.
fn preimage_lattice(a: &IntMatrix, rels: &IntMatrix) -> IntMatrix {
    let g = a.ncols();
    if g == 0 {
        return IntMatrix::zeros(0, 0);
    }
    let k = kernel_basis(&a.hstack(rels).expect("same target"));
    k.top_rows(g).dedup_cols()
}

fn lattice_basis(m: &IntMatrix) -> DMat {
    if m.ncols() == 0 {
        return DMat::zeros(m.nrows(), 0);
    }
    image_basis(&m.to_dense())
}

fn unimodular_inverse(u: &DMat) -> DMat {
    let sf = smith_with_transforms(u);
    debug_assert!(sf.diag.len() == u.rows() && sf.diag.iter().all(One::is_one));
    sf.v.expect("transforms").mul(&sf.u.expect("transforms"))
}

/// Presentation of `(N tensor_R M)_n`.
#[derive(Clone, Debug)]
pub struct TensorDegree {
    pub n: usize,
    pub gens: usize,
    /// generator offset of the block `N_i x M_{n-i}`
    pub offsets: Vec<usize>,
    pub rels: IntMatrix,
}

impl TensorDegree {
    pub fn group(&self) -> HomologyGroup {
        HomologyGroup::cokernel_of(self.gens, &self.rels)
    }
}

fn check_sides(n: &GradedModuleData, m: &GradedModuleData) -> Result<()> {
    if n.side != Side::Right || m.side != Side::Left {
        return Err(Error::Module(format!(
            "tensor needs a right module and a left module, got {} ({:?}) and {} ({:?})",
            n.name, n.side, m.name, m.side
        )));
    }
    if n.pairs != m.pairs {
        return Err(Error::Module("modules over different rings".into()));
    }
    Ok(())
}

/// Presentation of the graded tensor product in total degree `n`.
pub fn tensor_degree(nm: &GradedModuleData, m: &GradedModuleData, n: usize) -> Result<TensorDegree> {
    check_sides(nm, m)?;
    let top = nm.n_max.min(m.n_max);
    if n > top {
        return Err(Error::DegreeOverflow { degree: n, top });
    }
    let mut offsets = Vec::with_capacity(n + 2);
    let mut total = 0;
    for i in 0..=n {
        offsets.push(total);
        total += nm.gens(i) * m.gens(n - i);
    }
    offsets.push(total);
    let idx = |i: usize, s: usize, t: usize| offsets[i] + s * m.gens(n - i) + t;
    let mut rels = IntMatrix::zeros(total, 0);
    for i in 0..=n {
        let (gn, gm) = (nm.gens(i), m.gens(n - i));
        let rn = &nm.comps[i].rels;
        for j in 0..rn.ncols() {
            for t in 0..gm {
                rels.push_column(rn.column(j).iter().map(|(s, v)| (idx(i, *s, t), v.clone())).collect());
            }
        }
        let rm = &m.comps[n - i].rels;
        for j in 0..rm.ncols() {
            for s in 0..gn {
                rels.push_column(rm.column(j).iter().map(|(t, v)| (idx(i, s, *t), v.clone())).collect());
            }
        }
    }
    // s.[a,b] x t - s x [a,b].t
    for i in 0..n {
        let k = n - 1 - i;
        for ab in 0..nm.pairs {
            let rho = &nm.action[i][ab];
            let lam = &m.action[k][ab];
            for s in 0..nm.gens(i) {
                for t in 0..m.gens(k) {
                    let mut col: Vec<(usize, BigInt)> = rho
                        .column(s)
                        .iter()
                        .map(|(s2, v)| (idx(i + 1, *s2, t), v.clone()))
                        .collect();
                    col.extend(lam.column(t).iter().map(|(t2, v)| (idx(i, s, *t2), -v)));
                    rels.push_column(col);
                }
            }
        }
    }
    Ok(TensorDegree {
        n,
        gens: total,
        offsets,
        rels: rels.dedup_cols(),
    })
}

/// `(N tensor_R M)_n` for every degree both modules cover.
pub fn graded_tensor(nm: &GradedModuleData, m: &GradedModuleData) -> Result<Vec<HomologyGroup>> {
    check_sides(nm, m)?;
    (0..=nm.n_max.min(m.n_max))
        .map(|n| Ok(tensor_degree(nm, m, n)?.group()))
        .collect()
}

/// A subquotient `K / L` with `L` inside `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subquotient {
    pub nonzero: bool,
    pub rank: usize,
}

/// Degreewise `ker(I tensor_R M -> M)` for a right ideal `I`.
pub fn ideal_multiplication_kernel(
    ring: &GradedRing,
    ideal: &Ideal,
    m: &GradedModuleData,
) -> Result<Vec<Subquotient>> {
    if m.side != Side::Left {
        return Err(Error::Module(format!("{} must be a left module", m.name)));
    }
    let nm = ideal.module(ring, Side::Right)?;
    let top = nm.n_max.min(m.n_max);
    let mut out = Vec::with_capacity(top + 1);
    for n in 0..=top {
        let t = tensor_degree(&nm, m, n)?;
        let mut beta = IntMatrix::zeros(m.gens(n), 0);
        for i in 0..=n {
            let k = n - i;
            for &c in &ideal.basis[i] {
                let act = m.class_action(ring, i, c, k)?;
                for tcol in 0..m.gens(k) {
                    beta.push_column(act.column(tcol).to_vec());
                }
            }
        }
        debug_assert_eq!(beta.ncols(), t.gens);
        if m.comps[n].is_presented_free() {
            let composite = beta.mul(&t.rels)?;
            if let Some((row, col)) = composite.first_nonzero() {
                return Err(Error::NonzeroComposite { row, col });
            }
        }
        let pre = preimage_lattice(&beta, &m.comps[n].rels);
        let r_pre = rank(&pre);
        let r_rel = rank(&t.rels);
        let nonzero = if t.gens == 0 {
            false
        } else {
            !same_lattice(&pre, &t.rels)?
        };
        out.push(Subquotient {
            nonzero,
            rank: r_pre - r_rel,
        });
    }
    Ok(out)
}

/// `H_0(M)` and `H_1(M) = ker(R_{>0} tensor_R M -> M)`.
pub fn h0_h1(ring: &GradedRing, m: &GradedModuleData) -> Result<(Vec<HomologyGroup>, Vec<Subquotient>)> {
    Ok((m.h0(), ideal_multiplication_kernel(ring, &Ideal::positive(ring), m)?))
}

fn flags_deg(flags: &[bool]) -> WindowDeg {
    WindowDeg::from_flags(flags)
}

/// Degree invariants of one left module and the bound checks that use them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModuleReport {
    pub name: String,
    pub n_max: usize,
    pub components: Vec<String>,
    pub deg: WindowDeg,
    pub h0: Vec<String>,
    pub deg_h0: WindowDeg,
    pub h1_nonzero: Vec<bool>,
    pub deg_h1: WindowDeg,
    pub deg_mod_u: WindowDeg,
    pub deg_kernel_u: WindowDeg,
    pub deg_tor1: WindowDeg,
    pub a_m: Option<i64>,
    pub delta: Option<i64>,
    pub checks: Vec<Check>,
}

pub fn delta_and_bounds(
    ring: &GradedRing,
    profile: &StabilityProfile,
    m: &GradedModuleData,
) -> Result<ModuleReport> {
    let (h0, h1) = h0_h1(ring, m)?;
    let h0_flags: Vec<bool> = h0.iter().map(|g| !g.is_zero()).collect();
    let h1_nonzero: Vec<bool> = h1.iter().map(|s| s.nonzero).collect();
    let mod_u_flags: Vec<bool> = m.mod_u().iter().map(|g| !g.is_zero()).collect();
    let ker_flags = m.kernel_u_flags();
    let tor1: Vec<bool> = ideal_multiplication_kernel(ring, &Ideal::image_u(ring), m)?
        .iter()
        .map(|s| s.nonzero)
        .collect();
    let deg_mod_u = flags_deg(&mod_u_flags);
    let deg_kernel_u = flags_deg(&ker_flags);
    let deg_tor1 = flags_deg(&tor1);
    let a_m = deg_of(&deg_kernel_u).max(deg_of(&deg_mod_u));
    let delta = deg_of(&deg_mod_u).max(deg_of(&deg_tor1));
    let a_r = Some(profile.a_r).filter(|&a| a >= 0);
    let rhs = deg_add(delta, a_r);
    let rhs_certified = deg_mod_u.certified() && deg_tor1.certified() && profile.a_certified;
    let lemma312 = Check::new(
        format!("lemma_3_12[{}]", m.name),
        "A(M) <= delta(M) + A(R)",
        bound_verdict(a_m, rhs, rhs_certified),
    )
    .with_detail(format!(
        "A(M) = {}, delta(M) = {}, A(R) = {}",
        fmt_deg(a_m),
        fmt_deg(delta),
        fmt_deg(a_r)
    ));
    let checks = vec![
        consistency_check(ring, m)?,
        lemma_c1(m)?,
        lemma312,
    ];
    Ok(ModuleReport {
        name: m.name.clone(),
        n_max: m.n_max,
        components: m.groups().iter().map(|g| g.to_string()).collect(),
        deg: m.deg(),
        h0: h0.iter().map(|g| g.to_string()).collect(),
        deg_h0: flags_deg(&h0_flags),
        h1_nonzero: h1_nonzero.clone(),
        deg_h1: flags_deg(&h1_nonzero),
        deg_mod_u,
        deg_kernel_u,
        deg_tor1,
        a_m,
        delta,
        checks,
    })
}

/// Whether `M` is generated by its components of degree at most `a`, within
/// the window.
pub fn generated_in_degrees(m: &GradedModuleData, a: usize) -> Result<bool> {
    let mut span: Option<DMat> = None;
    for n in 0..=m.n_max {
        let g = m.gens(n);
        if n <= a {
            span = Some(DMat::identity(g));
            continue;
        }
        let prev = span.take().expect("set in the previous degree").to_sparse();
        let mut cols = m.comps[n].rels.clone();
        for act in &m.action[n - 1] {
            cols = cols.hstack(&act.mul(&prev)?)?;
        }
        let cols = cols.dedup_cols();
        let s = smith_normal_form(&cols);
        if s.rank != g || s.factors.iter().any(|f| !f.is_one()) {
            return Ok(false);
        }
        span = Some(DMat::identity(g));
    }
    Ok(true)
}

/// `deg H_0(M) <= a` exactly when `M` is generated in degrees `<= a`.
pub fn lemma_c1(m: &GradedModuleData) -> Result<Check> {
    let flags: Vec<bool> = m.h0().iter().map(|g| !g.is_zero()).collect();
    let d = WindowDeg::from_flags(&flags).as_i64();
    let mut bad = None;
    for a in 0..=m.n_max {
        let lhs = d <= a as i64;
        let rhs = generated_in_degrees(m, a)?;
        if lhs != rhs {
            bad = Some(format!("a = {a}: deg H0 <= a is {lhs}, generated is {rhs}"));
            break;
        }
    }
    Ok(Check::new(
        format!("lemma_c1[{}]", m.name),
        "deg H_0(M) <= a iff M is generated in degrees <= a",
        Verdict::from_bool(bad.is_none()),
    )
    .with_witness(bad)
    .with_detail(format!("deg H_0 = {}", fmt_deg(Some(d).filter(|&x| x >= 0)))))
}

/// Composites of degree-one actions agree whenever the four-tuples lie in
/// one orbit.
pub fn consistency_check(ring: &GradedRing, m: &GradedModuleData) -> Result<Check> {
    let name = format!("action_consistency[{}]", m.name);
    let anchor = "[a,b,c,d] = [a',b',c',d'] implies equal composite actions";
    if ring.n_max() < 2 || m.n_max < 2 {
        return Ok(Check::new(name, anchor, Verdict::Inconclusive)
            .with_detail("window too small for degree-two classes"));
    }
    let q = ring.group().order();
    let t2 = ring.table(2)?;
    let codec = t2.codec();
    let composite = |k: usize, v: &[usize]| -> Result<IntMatrix> {
        let (p, r) = (v[0] * q + v[1], v[2] * q + v[3]);
        match m.side {
            Side::Left => m.action[k + 1][p].mul(&m.action[k][r]),
            Side::Right => m.action[k + 1][r].mul(&m.action[k][p]),
        }
    };
    for k in 0..=m.n_max - 2 {
        let reps: Vec<IntMatrix> = (0..t2.count())
            .map(|c| composite(k, &ring.rep(2, c)))
            .collect::<Result<_>>()?;
        let mut diffs = IntMatrix::zeros(m.gens(k + 2), 0);
        let mut first_bad = None;
        for rank_v in 0..codec.states() {
            let v = codec.decode(rank_v);
            let c = t2.orbit_of_rank(rank_v) as usize;
            let d = composite(k, &v)?.sub(&reps[c])?;
            if d.is_zero() {
                continue;
            }
            if first_bad.is_none() {
                first_bad = Some(format!("degree {k}, tuple {v:?}"));
            }
            diffs = diffs.hstack(&d)?;
        }
        if diffs.ncols() == 0 {
            continue;
        }
        let rels = &m.comps[k + 2].rels;
        if !lattice_contains(rels, &diffs.dedup_cols())? {
            return Ok(Check::new(name, anchor, Verdict::Fail).with_witness(first_bad));
        }
    }
    Ok(Check::new(name, anchor, Verdict::Pass))
}

/// `deg(N tensor M) <= min(deg N + deg H_0 M, deg H_0 N + deg M)`.
pub fn lemma44(nm: &GradedModuleData, m: &GradedModuleData) -> Result<Check> {
    let tensor = graded_tensor(nm, m)?;
    let lhs_flags: Vec<bool> = tensor.iter().map(|g| !g.is_zero()).collect();
    let lhs = WindowDeg::from_flags(&lhs_flags);
    let flags = |v: Vec<HomologyGroup>| -> WindowDeg {
        WindowDeg::from_flags(&v.iter().map(|g| !g.is_zero()).collect::<Vec<_>>())
    };
    let (dn, dm) = (nm.deg(), m.deg());
    let (h0n, h0m) = (flags(nm.h0()), flags(m.h0()));
    let x = deg_add(deg_of(&dn), deg_of(&h0m));
    let y = deg_add(deg_of(&h0n), deg_of(&dm));
    let l = deg_of(&lhs);
    let rhs = x.min(y);
    let verdict = if l <= rhs {
        Verdict::Pass
    } else if (l > x && dn.certified() && h0m.certified()) || (l > y && h0n.certified() && dm.certified()) {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    Ok(Check::new(
        format!("lemma_4_4[{} x {}]", nm.name, m.name),
        "deg(N (x)_R M) <= min(deg N + deg H_0(M), deg H_0(N) + deg M)",
        verdict,
    )
    .with_detail(format!(
        "deg(N x M) = {}, deg N + deg H0 M = {}, deg H0 N + deg M = {}",
        fmt_deg(l),
        fmt_deg(x),
        fmt_deg(y)
    ))
    .with_witness((verdict == Verdict::Fail).then(|| format!("degree {}", fmt_deg(l)))))
}
