//! Free-group words, automorphisms fixing the boundary word, and their
//! compilation into maps on tuples of group elements.
//!
//! Generators are numbered `1..=2n`; generator `2i-1` is the `a`-curve and
//! generator `2i` the `b`-curve of handle `i`. A letter is a signed generator
//! index. The boundary word is `W = [x1,x2][x3,x4]...` with
//! `[x,y] = x y x⁻¹ y⁻¹`.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;

/// Signed generator index, never zero.
pub type Letter = i32;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FreeWord(Vec<Letter>);

impl FreeWord {
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        reduce_word(letters)
    }

    pub fn empty() -> Self {
        FreeWord(Vec::new())
    }

    pub fn generator(j: usize) -> Self {
        FreeWord(vec![j as Letter])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord(self.0.iter().rev().map(|&l| -l).collect())
    }

    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        reduce_word(self.0.iter().chain(other.0.iter()).copied())
    }

    /// Evaluates the word in `g`, generator `j` mapping to `values[j-1]`.
    pub fn evaluate(&self, g: &FiniteGroup, values: &[usize]) -> usize {
        self.0.iter().fold(g.identity(), |acc, &l| {
            let x = values[l.unsigned_abs() as usize - 1];
            g.mul(acc, if l > 0 { x } else { g.inv(x) })
        })
    }

    /// Exponent sum of generator `j`.
    pub fn exponent_sum(&self, j: usize) -> i64 {
        self.0
            .iter()
            .filter(|l| l.unsigned_abs() as usize == j)
            .map(|&l| l.signum() as i64)
            .sum()
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, &l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if l > 0 {
                write!(f, "x{l}")?;
            } else {
                write!(f, "x{}^-1", -l)?;
            }
        }
        Ok(())
    }
}

/// Free reduction: cancels every adjacent `x x⁻¹` pair.
pub fn reduce_word(letters: impl IntoIterator<Item = Letter>) -> FreeWord {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        debug_assert!(l != 0, "letters are nonzero");
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    FreeWord(out)
}

/// `W = ∏_{i=1..n} [x_{2i-1}, x_{2i}]`.
pub fn boundary_word(n: usize) -> Result<FreeWord> {
    if n == 0 {
        return Err(Error::ZeroGenus);
    }
    Ok(boundary_word_unchecked(n))
}

fn boundary_word_unchecked(n: usize) -> FreeWord {
    let mut letters = Vec::with_capacity(4 * n);
    for i in 0..n {
        let (a, b) = ((2 * i + 1) as Letter, (2 * i + 2) as Letter);
        letters.extend([a, b, -a, -b]);
    }
    reduce_word(letters)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum Provenance {
    Identity,
    Named { name: String },
    Whitehead { depth: u8, handle_offset: usize },
}

/// An automorphism of the free group of rank `2n`, given by the images of the
/// generators together with the images under its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedAutomorphism {
    pub images: Vec<FreeWord>,
    pub inverse_images: Vec<FreeWord>,
    pub provenance: Provenance,
}

impl MarkedAutomorphism {
    pub fn identity(rank: usize) -> Self {
        let images: Vec<FreeWord> = (1..=rank).map(FreeWord::generator).collect();
        MarkedAutomorphism {
            inverse_images: images.clone(),
            images,
            provenance: Provenance::Identity,
        }
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, w: &FreeWord) -> FreeWord {
        substitute(&self.images, w)
    }

    pub fn apply_inverse(&self, w: &FreeWord) -> FreeWord {
        substitute(&self.inverse_images, w)
    }

    pub fn inverse(&self) -> MarkedAutomorphism {
        MarkedAutomorphism {
            images: self.inverse_images.clone(),
            inverse_images: self.images.clone(),
            provenance: self.provenance.clone(),
        }
    }

    /// `self ∘ inner`: first `inner`, then `self`, as substitutions.
    pub fn compose(&self, inner: &MarkedAutomorphism) -> MarkedAutomorphism {
        MarkedAutomorphism {
            images: inner.images.iter().map(|w| self.apply(w)).collect(),
            inverse_images: self
                .inverse_images
                .iter()
                .map(|w| inner.apply_inverse(w))
                .collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Checks that the stored inverse really is a two-sided inverse.
    pub fn verify_inverse(&self) -> bool {
        (1..=self.rank()).all(|j| {
            let x = FreeWord::generator(j);
            self.apply(&self.apply_inverse(&x)) == x && self.apply_inverse(&self.apply(&x)) == x
        })
    }

    pub fn fixes(&self, w: &FreeWord) -> bool {
        &self.apply(w) == w
    }

    /// Integer matrix of the induced map on the abelianization: entry
    /// `(i, j)` is the exponent sum of generator `i+1` in the image of `j+1`.
    pub fn abelianization(&self) -> Vec<Vec<i64>> {
        let r = self.rank();
        (0..r)
            .map(|i| (0..r).map(|j| self.images[j].exponent_sum(i + 1)).collect())
            .collect()
    }

    /// Relabels generators `1..=rank` as `1+shift..`, extending by the identity
    /// to `total_rank` generators.
    pub fn embed(&self, total_rank: usize, shift: usize) -> MarkedAutomorphism {
        let relabel = |w: &FreeWord| {
            FreeWord(
                w.0.iter()
                    .map(|&l| l.signum() * (l.abs() + shift as Letter))
                    .collect(),
            )
        };
        let mut images: Vec<FreeWord> = (1..=total_rank).map(FreeWord::generator).collect();
        let mut inverse_images = images.clone();
        for j in 0..self.rank() {
            images[j + shift] = relabel(&self.images[j]);
            inverse_images[j + shift] = relabel(&self.inverse_images[j]);
        }
        MarkedAutomorphism {
            images,
            inverse_images,
            provenance: self.provenance.clone(),
        }
    }

    fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }
}

fn substitute(images: &[FreeWord], w: &FreeWord) -> FreeWord {
    let mut out = Vec::new();
    for &l in &w.0 {
        let img = &images[l.unsigned_abs() as usize - 1];
        if l > 0 {
            out.extend_from_slice(&img.0);
        } else {
            out.extend(img.0.iter().rev().map(|&x| -x));
        }
    }
    reduce_word(out)
}

fn word(letters: &[Letter]) -> FreeWord {
    reduce_word(letters.iter().copied())
}

/// `T1_i: a ↦ ab`, `T2_i: b ↦ ba`, and the handle swap
/// `S_i: (a_i, b_i, a_{i+1}, b_{i+1}) ↦ (a_{i+1}, b_{i+1}, a_i^c, b_i^c)` with
/// `c = [a_{i+1}, b_{i+1}]`, each followed by its inverse.
pub fn named_moves(n: usize) -> Vec<MarkedAutomorphism> {
    let rank = 2 * n;
    let mut out = Vec::new();
    let base = |images: Vec<(usize, FreeWord)>, inv: Vec<(usize, FreeWord)>, name: String| {
        let mut m = MarkedAutomorphism::identity(rank);
        for (j, w) in images {
            m.images[j - 1] = w;
        }
        for (j, w) in inv {
            m.inverse_images[j - 1] = w;
        }
        m.with_provenance(Provenance::Named { name })
    };
    for i in 1..=n {
        let (a, b) = ((2 * i - 1) as Letter, (2 * i) as Letter);
        let (ai, bi) = (a as usize, b as usize);
        let t1 = base(
            vec![(ai, word(&[a, b]))],
            vec![(ai, word(&[a, -b]))],
            format!("T1_{i}"),
        );
        let t2 = base(
            vec![(bi, word(&[b, a]))],
            vec![(bi, word(&[b, -a]))],
            format!("T2_{i}"),
        );
        for m in [t1, t2] {
            let inv = m.inverse().with_provenance(Provenance::Named {
                name: format!("{}^-1", provenance_name(&m)),
            });
            out.push(m);
            out.push(inv);
        }
    }
    for i in 1..n {
        let (a, b) = ((2 * i - 1) as Letter, (2 * i) as Letter);
        let (c, d) = (a + 2, b + 2);
        // conjugation x^y = y⁻¹ x y
        let comm_next = [c, d, -c, -d];
        let conj = |x: Letter, by: &[Letter]| {
            let inv: Vec<Letter> = by.iter().rev().map(|&l| -l).collect();
            word(&[inv.as_slice(), &[x], by].concat())
        };
        let images = vec![
            (a as usize, FreeWord::generator(c as usize)),
            (b as usize, FreeWord::generator(d as usize)),
            (c as usize, conj(a, &comm_next)),
            (d as usize, conj(b, &comm_next)),
        ];
        // inverse: a ↦ e c e⁻¹, b ↦ e d e⁻¹, c ↦ a, d ↦ b with e = [a, b]
        let comm_this = [a, b, -a, -b];
        let unconj = |x: Letter| {
            let inv: Vec<Letter> = comm_this.iter().rev().map(|&l| -l).collect();
            word(&[&comm_this[..], &[x], inv.as_slice()].concat())
        };
        let inverse = vec![
            (a as usize, unconj(c)),
            (b as usize, unconj(d)),
            (c as usize, FreeWord::generator(a as usize)),
            (d as usize, FreeWord::generator(b as usize)),
        ];
        let s = base(images, inverse, format!("S_{i}"));
        let s_inv = s.inverse().with_provenance(Provenance::Named {
            name: format!("S_{i}^-1"),
        });
        out.push(s);
        out.push(s_inv);
    }
    out
}

fn provenance_name(m: &MarkedAutomorphism) -> String {
    match &m.provenance {
        Provenance::Named { name } => name.clone(),
        Provenance::Identity => "id".into(),
        Provenance::Whitehead { depth, handle_offset } => format!("wh{depth}@{handle_offset}"),
    }
}

/// All Whitehead automorphisms of the free group of the given rank:
/// signed permutations of the generators, and the maps fixing a multiplier
/// letter `m` while sending each other generator to one of `x`, `x m`,
/// `m⁻¹ x`, `m⁻¹ x m`. The identity is included once.
pub fn whitehead_automorphisms(rank: usize) -> Vec<MarkedAutomorphism> {
    let mut out = Vec::new();
    let prov = Provenance::Whitehead {
        depth: 1,
        handle_offset: 0,
    };
    // signed permutations
    let mut perm: Vec<usize> = (0..rank).collect();
    let mut perms = Vec::new();
    permutations(&mut perm, 0, &mut perms);
    for p in &perms {
        for signs in 0u32..(1 << rank) {
            let sign = |j: usize| if signs & (1 << j) != 0 { -1 } else { 1 };
            let images: Vec<FreeWord> = (0..rank)
                .map(|j| FreeWord(vec![sign(j) * (p[j] as Letter + 1)]))
                .collect();
            // inverse: x_{p[j]+1} ↦ x_{j+1}^{sign(j)}
            let mut inverse_images = vec![FreeWord::empty(); rank];
            for j in 0..rank {
                inverse_images[p[j]] = FreeWord(vec![sign(j) * (j as Letter + 1)]);
            }
            out.push(MarkedAutomorphism {
                images,
                inverse_images,
                provenance: prov.clone(),
            });
        }
    }
    // multiplier type
    for m in 1..=rank as Letter {
        for mult in [m, -m] {
            let others: Vec<usize> = (1..=rank).filter(|&j| j as Letter != m).collect();
            let combos = 4usize.pow(others.len() as u32);
            for code in 1..combos {
                let mut images: Vec<FreeWord> = (1..=rank).map(FreeWord::generator).collect();
                let mut inverse_images = images.clone();
                let mut c = code;
                for &j in &others {
                    let x = j as Letter;
                    let choice = c % 4;
                    c /= 4;
                    let (img, inv) = match choice {
                        0 => continue,
                        1 => (word(&[x, mult]), word(&[x, -mult])),
                        2 => (word(&[-mult, x]), word(&[mult, x])),
                        _ => (word(&[-mult, x, mult]), word(&[mult, x, -mult])),
                    };
                    images[j - 1] = img;
                    inverse_images[j - 1] = inv;
                }
                out.push(MarkedAutomorphism {
                    images,
                    inverse_images,
                    provenance: prov.clone(),
                });
            }
        }
    }
    out
}

fn permutations(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, out);
        v.swap(k, i);
    }
}

/// Whitehead automorphisms of rank `2w` fixing `W` (depth 1), or every
/// composite `χ⁻¹ ∘ ψ` of two Whitehead automorphisms with `χ(W) = ψ(W)`
/// (depth 2), which is exactly the set of depth-two composites fixing `W`.
pub fn whitehead_stabilizer(handles: usize, depth: usize) -> Result<Vec<MarkedAutomorphism>> {
    if handles == 0 {
        return Err(Error::ZeroGenus);
    }
    if !(1..=2).contains(&depth) {
        return Err(Error::SearchDepth(depth));
    }
    let w = boundary_word_unchecked(handles);
    let all = whitehead_automorphisms(2 * handles);
    let mut out = Vec::new();
    let mut seen: HashSet<Vec<FreeWord>> = HashSet::new();
    let mut push = |m: MarkedAutomorphism, out: &mut Vec<MarkedAutomorphism>| {
        if seen.insert(m.images.clone()) {
            out.push(m);
        }
    };
    for m in all.iter().filter(|m| m.fixes(&w)) {
        push(m.clone(), &mut out);
    }
    if depth == 2 {
        let mut classes: HashMap<FreeWord, Vec<usize>> = HashMap::new();
        for (i, m) in all.iter().enumerate() {
            classes.entry(m.apply(&w)).or_default().push(i);
        }
        let mut keys: Vec<&FreeWord> = classes.keys().collect();
        keys.sort();
        for key in keys {
            let members = &classes[key];
            for &c in members {
                let chi_inv = all[c].inverse();
                for &p in members {
                    let comp = chi_inv.compose(&all[p]).with_provenance(Provenance::Whitehead {
                        depth: 2,
                        handle_offset: 0,
                    });
                    push(comp, &mut out);
                }
            }
        }
    }
    Ok(out)
}

/// Handles searched exhaustively; larger genera reuse these moves on every
/// pair of adjacent handles.
pub const SEARCH_WINDOW_HANDLES: usize = 2;

/// The full move set for genus `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveSet {
    pub genus: usize,
    pub depth: usize,
    pub moves: Vec<MarkedAutomorphism>,
}

impl MoveSet {
    pub fn rank(&self) -> usize {
        2 * self.genus
    }

    /// SHA-256 of the canonical JSON of the move list.
    pub fn content_hash(&self) -> [u8; 32] {
        let body = serde_json::to_vec(&(self.genus, self.depth, &self.moves))
            .expect("move sets serialize");
        let mut h = Sha256::new();
        h.update(b"stabring-moves-v1");
        h.update(&body);
        h.finalize().into()
    }

    pub fn manifest(&self) -> MoveManifest {
        MoveManifest {
            genus: self.genus,
            rank: self.rank(),
            depth: self.depth,
            hash: hex::encode(self.content_hash()),
            moves: self
                .moves
                .iter()
                .map(|m| ManifestEntry {
                    images: m.images.clone(),
                    provenance: m.provenance.clone(),
                })
                .collect(),
        }
    }

    pub fn compile(&self, g: &FiniteGroup) -> Vec<CompiledMove> {
        compile_moves(&self.moves, g)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub images: Vec<FreeWord>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveManifest {
    pub genus: usize,
    pub rank: usize,
    pub depth: usize,
    pub hash: String,
    pub moves: Vec<ManifestEntry>,
}

/// Identity, the named moves, and the Whitehead stabilizer search, each
/// verified to fix `W` exactly and to carry a verified inverse.
///
/// The Whitehead search runs on a window of up to two handles and its
/// results are applied to every adjacent pair of handles.
pub fn enumerate_stabilizing_automorphisms(n: usize, depth: usize) -> Result<MoveSet> {
    if n == 0 {
        return Err(Error::ZeroGenus);
    }
    if !(1..=2).contains(&depth) {
        return Err(Error::SearchDepth(depth));
    }
    let rank = 2 * n;
    let w = boundary_word_unchecked(n);
    let mut moves = vec![MarkedAutomorphism::identity(rank)];
    moves.extend(named_moves(n));
    let window = n.min(SEARCH_WINDOW_HANDLES);
    let local = whitehead_stabilizer(window, depth)?;
    for offset in 0..=(n - window) {
        for m in &local {
            let mut e = m.embed(rank, 2 * offset);
            if let Provenance::Whitehead { depth, .. } = e.provenance {
                e.provenance = Provenance::Whitehead {
                    depth,
                    handle_offset: offset,
                };
            }
            moves.push(e);
        }
    }
    let mut seen: HashSet<Vec<FreeWord>> = HashSet::new();
    moves.retain(|m| seen.insert(m.images.clone()));
    for m in &moves {
        assert!(m.fixes(&w), "move {:?} does not fix the boundary word", m.provenance);
        assert!(m.verify_inverse(), "move {:?} has a bad inverse", m.provenance);
    }
    Ok(MoveSet { genus: n, depth, moves })
}

/// A move compiled against a concrete group: a map on `G^{2n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompiledMove {
    coords: Vec<usize>,
    order: usize,
    kind: CompiledKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum CompiledKind {
    /// Lookup over the local states of `coords` (first coordinate most significant).
    Table(Vec<u32>),
    /// Per-coordinate images as (coordinate, inverted) programs.
    Words(Vec<Vec<(usize, bool)>>),
}

const LOCAL_TABLE_LIMIT: usize = 1 << 22;

/// Total map `v ↦ (eval of φ(x_j) at v)_j` on `G^{2n}`.
pub fn compile_move(m: &MarkedAutomorphism, g: &FiniteGroup) -> CompiledMove {
    let rank = m.rank();
    let mut support: Vec<usize> = Vec::new();
    for j in 0..rank {
        if m.images[j] != FreeWord::generator(j + 1) {
            support.push(j);
            support.extend(m.images[j].0.iter().map(|l| l.unsigned_abs() as usize - 1));
        }
    }
    support.sort_unstable();
    support.dedup();
    let q = g.order();
    let programs: Vec<Vec<(usize, bool)>> = support
        .iter()
        .map(|&j| {
            m.images[j]
                .0
                .iter()
                .map(|&l| {
                    let c = l.unsigned_abs() as usize - 1;
                    (support.binary_search(&c).unwrap(), l < 0)
                })
                .collect()
        })
        .collect();
    let local_states = (q as u128).checked_pow(support.len() as u32);
    let kind = match local_states {
        Some(s) if s as usize <= LOCAL_TABLE_LIMIT => {
            let s = s as usize;
            let k = support.len();
            let mut table = Vec::with_capacity(s);
            let mut digits = vec![0usize; k];
            let mut out = vec![0usize; k];
            for idx in 0..s {
                let mut r = idx;
                for d in (0..k).rev() {
                    digits[d] = r % q;
                    r /= q;
                }
                eval_programs(g, &programs, &digits, &mut out);
                let local = out.iter().fold(0usize, |acc, &d| acc * q + d);
                table.push(local as u32);
            }
            CompiledKind::Table(table)
        }
        _ => CompiledKind::Words(programs),
    };
    CompiledMove {
        coords: support,
        order: q,
        kind,
    }
}

fn eval_programs(g: &FiniteGroup, programs: &[Vec<(usize, bool)>], digits: &[usize], out: &mut [usize]) {
    for (o, prog) in out.iter_mut().zip(programs) {
        *o = prog.iter().fold(g.identity(), |acc, &(c, inv)| {
            let x = digits[c];
            g.mul(acc, if inv { g.inv(x) } else { x })
        });
    }
}

impl CompiledMove {
    pub fn is_identity(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn support(&self) -> &[usize] {
        &self.coords
    }

    /// Applies the move to an explicit tuple.
    pub fn apply_tuple(&self, g: &FiniteGroup, v: &[usize]) -> Vec<usize> {
        let mut out = v.to_vec();
        let digits: Vec<usize> = self.coords.iter().map(|&c| v[c]).collect();
        let mut new = vec![0; digits.len()];
        match &self.kind {
            CompiledKind::Table(t) => {
                let q = self.order;
                let local = digits.iter().fold(0usize, |acc, &d| acc * q + d);
                let mut r = t[local] as usize;
                for d in (0..new.len()).rev() {
                    new[d] = r % q;
                    r /= q;
                }
            }
            CompiledKind::Words(p) => eval_programs(g, p, &digits, &mut new),
        }
        for (&c, &x) in self.coords.iter().zip(&new) {
            out[c] = x;
        }
        out
    }

    /// Applies the move to a mixed-radix rank over `len` coordinates, where
    /// `place[c]` is the weight of coordinate `c`.
    #[inline]
    pub fn apply_rank(&self, g: &FiniteGroup, place: &[u64], rank: u64) -> u64 {
        let q = self.order as u64;
        match &self.kind {
            CompiledKind::Table(t) => {
                let mut local = 0u64;
                let mut base = rank;
                for &c in &self.coords {
                    let d = (rank / place[c]) % q;
                    local = local * q + d;
                    base -= d * place[c];
                }
                let mut r = t[local as usize] as u64;
                for &c in self.coords.iter().rev() {
                    base += (r % q) * place[c];
                    r /= q;
                }
                base
            }
            CompiledKind::Words(p) => {
                let digits: Vec<usize> = self
                    .coords
                    .iter()
                    .map(|&c| ((rank / place[c]) % q) as usize)
                    .collect();
                let mut new = vec![0; digits.len()];
                eval_programs(g, p, &digits, &mut new);
                let mut out = rank;
                for ((&c, &old), &x) in self.coords.iter().zip(&digits).zip(&new) {
                    out = out - old as u64 * place[c] + x as u64 * place[c];
                }
                out
            }
        }
    }
}

/// Compiles every move and drops duplicates (as maps) and the identity.
/// The first occurrence of each map is kept, so the output order is stable.
pub fn compile_moves(moves: &[MarkedAutomorphism], g: &FiniteGroup) -> Vec<CompiledMove> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for m in moves {
        let c = compile_move(m, g);
        if c.is_identity() || is_identity_map(&c) {
            continue;
        }
        if seen.insert(c.clone()) {
            out.push(c);
        }
    }
    out
}

fn is_identity_map(c: &CompiledMove) -> bool {
    match &c.kind {
        CompiledKind::Table(t) => t.iter().enumerate().all(|(i, &x)| i == x as usize),
        CompiledKind::Words(_) => false,
    }
}

/// `β(v) = ∏ [a_i, b_i]` evaluated in `g`.
pub fn evaluated_boundary(g: &FiniteGroup, v: &[usize]) -> usize {
    v.chunks(2)
        .fold(g.identity(), |acc, pair| g.mul(acc, g.commutator(pair[0], pair[1])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{load_group, GroupSpec};

    fn w(letters: &[Letter]) -> FreeWord {
        FreeWord::new(letters.iter().copied())
    }

    #[test]
    fn reduction_examples() {
        assert!(w(&[1, -1]).is_empty());
        assert_eq!(w(&[1, 2, -2, 1]).letters(), &[1, 1]);
        let w1 = boundary_word(1).unwrap();
        assert_eq!(w1.letters(), &[1, 2, -1, -2]);
        assert_eq!(reduce_word(w1.letters().iter().copied()), w1);
    }

    #[test]
    fn boundary_word_lengths() {
        assert_eq!(boundary_word(1).unwrap().len(), 4);
        assert_eq!(boundary_word(2).unwrap().len(), 8);
        assert!(matches!(boundary_word(0), Err(Error::ZeroGenus)));
    }

    #[test]
    fn boundary_evaluates_trivially_in_abelian_groups() {
        let g = FiniteGroup::cyclic(4);
        let w2 = boundary_word(2).unwrap();
        for v in [[1, 2, 3, 1], [0, 3, 2, 2], [3, 3, 3, 1]] {
            assert_eq!(w2.evaluate(&g, &v), 0);
        }
    }

    #[test]
    fn named_moves_fix_boundary() {
        for n in 1..=4 {
            let wn = boundary_word(n).unwrap();
            for m in named_moves(n) {
                assert!(m.fixes(&wn), "{:?}", m.provenance);
                assert!(m.verify_inverse(), "{:?}", m.provenance);
            }
        }
    }

    #[test]
    fn t1_is_found_and_identity_is_returned() {
        let set = enumerate_stabilizing_automorphisms(1, 1).unwrap();
        let t1 = vec![w(&[1, 2]), w(&[2])];
        assert!(set.moves.iter().any(|m| m.images == t1));
        let id = MarkedAutomorphism::identity(2);
        assert!(set.moves.iter().any(|m| m.images == id.images));
    }

    #[test]
    fn depth_two_mixes_handles() {
        let set = enumerate_stabilizing_automorphisms(2, 2).unwrap();
        let mixing = set.moves.iter().any(|m| {
            let a = m.abelianization();
            // blocks: handle 1 = rows/cols 0..2, handle 2 = 2..4; ignore pure swaps
            let off = (0..2).any(|i| (2..4).any(|j| a[i][j] != 0 || a[j][i] != 0));
            let diag = (0..2).any(|i| (0..2).any(|j| a[i][j] != 0));
            off && diag
        });
        assert!(mixing);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            enumerate_stabilizing_automorphisms(0, 1),
            Err(Error::ZeroGenus)
        ));
        assert!(matches!(
            enumerate_stabilizing_automorphisms(1, 3),
            Err(Error::SearchDepth(3))
        ));
    }

    #[test]
    fn move_set_closed_under_inverses() {
        for (n, depth) in [(1, 2), (2, 2), (3, 1)] {
            let set = enumerate_stabilizing_automorphisms(n, depth).unwrap();
            let images: HashSet<&Vec<FreeWord>> = set.moves.iter().map(|m| &m.images).collect();
            for m in &set.moves {
                assert!(images.contains(&m.inverse_images), "{:?}", m.provenance);
            }
        }
    }

    #[test]
    fn compile_identity_and_t1() {
        let g = FiniteGroup::cyclic(2);
        let id = compile_move(&MarkedAutomorphism::identity(2), &g);
        assert!(id.is_identity());
        assert_eq!(id.apply_tuple(&g, &[1, 0]), vec![1, 0]);
        let t1 = &named_moves(1)[0];
        let c = compile_move(t1, &g);
        // a = identity, b = g  ↦  (ab, b) = (g, g)
        assert_eq!(c.apply_tuple(&g, &[0, 1]), vec![1, 1]);
    }

    #[test]
    fn compiled_swap_and_inverse_round_trip() {
        let g = load_group(&GroupSpec::named("s3").unwrap()).unwrap();
        let moves = named_moves(2);
        let s = moves.iter().find(|m| matches!(&m.provenance, Provenance::Named { name } if name == "S_1")).unwrap();
        let s_inv = moves.iter().find(|m| matches!(&m.provenance, Provenance::Named { name } if name == "S_1^-1")).unwrap();
        let (cs, ci) = (compile_move(s, &g), compile_move(s_inv, &g));
        for v in [[1, 2, 3, 4], [5, 1, 0, 2], [2, 2, 4, 3]] {
            assert_eq!(ci.apply_tuple(&g, &cs.apply_tuple(&g, &v)), v.to_vec());
            assert_eq!(cs.apply_tuple(&g, &ci.apply_tuple(&g, &v)), v.to_vec());
        }
    }

    #[test]
    fn manifest_hash_is_stable() {
        let a = enumerate_stabilizing_automorphisms(2, 1).unwrap();
        let b = enumerate_stabilizing_automorphisms(2, 1).unwrap();
        assert_eq!(a.content_hash(), b.content_hash());
        let c = enumerate_stabilizing_automorphisms(2, 2).unwrap();
        assert_ne!(a.content_hash(), c.content_hash());
        let m = a.manifest();
        let text = serde_json::to_string(&m).unwrap();
        let back: MoveManifest = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use crate::group::{load_group, GroupSpec};
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn compiled_moves_preserve_boundary(seed in proptest::collection::vec(0usize..6, 6), which in 0usize..10_000) {
            let g = load_group(&GroupSpec::named("s3").unwrap()).unwrap();
            let set = enumerate_stabilizing_automorphisms(3, 1).unwrap();
            let m = &set.moves[which % set.moves.len()];
            let c = compile_move(m, &g);
            let out = c.apply_tuple(&g, &seed);
            prop_assert_eq!(evaluated_boundary(&g, &out), evaluated_boundary(&g, &seed));
            // agreement with direct word evaluation
            for (j, img) in m.images.iter().enumerate() {
                prop_assert_eq!(out[j], img.evaluate(&g, &seed));
            }
        }

        #[test]
        fn reduction_is_idempotent(letters in proptest::collection::vec(prop_oneof![-3i32..=-1, 1i32..=3], 0..20)) {
            let r = reduce_word(letters.iter().copied());
            prop_assert_eq!(reduce_word(r.letters().iter().copied()), r.clone());
            prop_assert!(r.letters().windows(2).all(|p| p[0] != -p[1]));
        }
    }
}
