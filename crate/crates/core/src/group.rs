//! Finite groups given by a validated Cayley table.
//!
//! Elements are dense indices `0..order` and every operation is a table
//! lookup. Index 0 is always the identity.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Element index inside a [`FiniteGroup`].
pub type Elem = u16;

pub const DEFAULT_ORDER_CAP: usize = 4096;
pub const DEFAULT_SUBGROUP_CAP: usize = 16;

/// Group-spec document, as read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupSpec {
    Cayley {
        table: CayleyTable,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    Cyclic {
        order: usize,
    },
    Product {
        factors: Vec<GroupSpec>,
    },
    Perm {
        generators: Vec<Vec<Vec<usize>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
}

/// Cayley tables are accepted either as nested rows or flat row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CayleyTable {
    Rows(Vec<Vec<usize>>),
    Flat(Vec<usize>),
}

impl GroupSpec {
    /// Short names used by the CLI: `trivial`, `z<k>`, `klein`, `s3`, `d4`, `q8`.
    pub fn named(name: &str) -> Option<GroupSpec> {
        let lower = name.trim().to_ascii_lowercase();
        let spec = match lower.as_str() {
            "trivial" | "1" => GroupSpec::Cyclic { order: 1 },
            "klein" | "v4" | "z2xz2" => GroupSpec::Product {
                factors: vec![GroupSpec::Cyclic { order: 2 }, GroupSpec::Cyclic { order: 2 }],
            },
            "s3" => GroupSpec::Perm {
                generators: vec![vec![vec![1, 2]], vec![vec![1, 2, 3]]],
                name: Some("S3".into()),
            },
            "d4" => GroupSpec::Perm {
                generators: vec![vec![vec![1, 2, 3, 4]], vec![vec![1, 3]]],
                name: Some("D4".into()),
            },
            "q8" => GroupSpec::Perm {
                generators: vec![
                    vec![vec![1, 2, 3, 4], vec![5, 6, 7, 8]],
                    vec![vec![1, 5, 3, 7], vec![2, 8, 4, 6]],
                ],
                name: Some("Q8".into()),
            },
            other => {
                let digits = other
                    .strip_prefix("z/")
                    .or_else(|| other.strip_prefix('z'))
                    .or_else(|| other.strip_prefix("c"))?;
                let order: usize = digits.parse().ok()?;
                GroupSpec::Cyclic { order }
            }
        };
        Some(spec)
    }
}

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<Elem>,
    inverse: Vec<Elem>,
    name: String,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.table == other.table
    }
}

impl Eq for FiniteGroup {}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (order {})", self.name, self.order)
    }
}

/// Loads a group spec with the default order cap.
pub fn load_group(spec: &GroupSpec) -> Result<FiniteGroup> {
    load_group_with_cap(spec, DEFAULT_ORDER_CAP)
}

pub fn load_group_with_cap(spec: &GroupSpec, cap: usize) -> Result<FiniteGroup> {
    match spec {
        GroupSpec::Cayley { table, name } => {
            let rows = match table {
                CayleyTable::Rows(rows) => rows.clone(),
                CayleyTable::Flat(flat) => {
                    let n = (flat.len() as f64).sqrt().round() as usize;
                    if n * n != flat.len() {
                        return Err(Error::InvalidGroupSpec(format!(
                            "flat table of length {} is not square",
                            flat.len()
                        )));
                    }
                    flat.chunks(n.max(1)).map(|c| c.to_vec()).collect()
                }
            };
            if rows.len() > cap {
                return Err(Error::GroupTooLarge {
                    order: rows.len(),
                    cap,
                });
            }
            let name = name
                .clone()
                .unwrap_or_else(|| format!("cayley[{}]", rows.len()));
            FiniteGroup::from_rows(&rows, name)
        }
        GroupSpec::Cyclic { order } => {
            if *order == 0 {
                return Err(Error::InvalidGroupSpec("cyclic order must be positive".into()));
            }
            if *order > cap {
                return Err(Error::GroupTooLarge { order: *order, cap });
            }
            Ok(FiniteGroup::cyclic(*order))
        }
        GroupSpec::Product { factors } => {
            if factors.is_empty() {
                return Ok(FiniteGroup::cyclic(1));
            }
            let mut acc = load_group_with_cap(&factors[0], cap)?;
            for f in &factors[1..] {
                let g = load_group_with_cap(f, cap)?;
                let order = acc.order * g.order;
                if order > cap {
                    return Err(Error::GroupTooLarge { order, cap });
                }
                acc = acc.direct_product(&g);
            }
            Ok(acc)
        }
        GroupSpec::Perm { generators, name } => {
            FiniteGroup::from_permutations(generators, name.clone(), cap)
        }
    }
}

impl FiniteGroup {
    pub fn cyclic(k: usize) -> Self {
        let mut table = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                table.push(((i + j) % k) as Elem);
            }
        }
        let inverse = (0..k).map(|i| ((k - i) % k) as Elem).collect();
        let name = if k == 1 { "1".to_string() } else { format!("Z/{k}") };
        FiniteGroup {
            order: k,
            table,
            inverse,
            name,
        }
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// Builds a group from table rows, checking the group axioms.
    pub fn from_rows(rows: &[Vec<usize>], name: String) -> Result<Self> {
        Self::build(rows, name, true)
    }

    // Permutation closures are associative by construction; the O(n³) triple
    // scan is skipped for them.
    fn build(rows: &[Vec<usize>], name: String, check_assoc: bool) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidGroupSpec("empty table".into()));
        }
        if n > Elem::MAX as usize {
            return Err(Error::GroupTooLarge {
                order: n,
                cap: Elem::MAX as usize,
            });
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroupSpec(format!(
                    "row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            for &x in row {
                if x >= n {
                    return Err(Error::InvalidGroupSpec(format!(
                        "entry {x} in row {i} is out of range"
                    )));
                }
                table.push(x as Elem);
            }
        }
        for x in 0..n {
            if table[x] as usize != x || table[x * n] as usize != x {
                return Err(Error::InvalidGroupSpec(
                    "element 0 must be the identity".into(),
                ));
            }
        }
        // Latin square: every row and column is a permutation.
        for i in 0..n {
            let mut seen_row = vec![false; n];
            let mut seen_col = vec![false; n];
            for j in 0..n {
                let r = table[i * n + j] as usize;
                let c = table[j * n + i] as usize;
                if seen_row[r] || seen_col[c] {
                    return Err(Error::InvalidGroupSpec(format!(
                        "row or column {i} repeats an element"
                    )));
                }
                seen_row[r] = true;
                seen_col[c] = true;
            }
        }
        let mut inverse = vec![0 as Elem; n];
        for x in 0..n {
            let y = (0..n)
                .find(|&y| table[x * n + y] == 0)
                .expect("latin square has an identity in every row");
            if table[y * n + x] != 0 {
                return Err(Error::InvalidGroupSpec(format!(
                    "element {x} has no two-sided inverse"
                )));
            }
            inverse[x] = y as Elem;
        }
        let g = FiniteGroup {
            order: n,
            table,
            inverse,
            name,
        };
        if check_assoc {
            g.check_associative()?;
        }
        Ok(g)
    }

    fn check_associative(&self) -> Result<()> {
        let n = self.order;
        for a in 0..n {
            for b in 0..n {
                let ab = self.table[a * n + b] as usize;
                for c in 0..n {
                    let bc = self.table[b * n + c] as usize;
                    if self.table[ab * n + c] != self.table[a * n + bc] {
                        return Err(Error::NotAssociative { a, b, c });
                    }
                }
            }
        }
        Ok(())
    }

    /// Closure of permutation generators given as cycles on `{1..m}`.
    /// The product `x*y` applies `x` first, then `y`.
    pub fn from_permutations(
        generators: &[Vec<Vec<usize>>],
        name: Option<String>,
        cap: usize,
    ) -> Result<Self> {
        let degree = generators
            .iter()
            .flatten()
            .flatten()
            .copied()
            .max()
            .unwrap_or(0);
        let mut gens: Vec<Vec<usize>> = Vec::with_capacity(generators.len());
        for cycles in generators {
            let mut img: Vec<usize> = (0..degree).collect();
            let mut touched = vec![false; degree];
            for cycle in cycles {
                for (k, &pt) in cycle.iter().enumerate() {
                    if pt == 0 {
                        return Err(Error::InvalidGroupSpec("points are numbered from 1".into()));
                    }
                    if touched[pt - 1] {
                        return Err(Error::InvalidGroupSpec(format!(
                            "point {pt} appears twice in one generator"
                        )));
                    }
                    touched[pt - 1] = true;
                    let next = cycle[(k + 1) % cycle.len()];
                    img[pt - 1] = next - 1;
                }
            }
            gens.push(img);
        }
        let identity: Vec<usize> = (0..degree).collect();
        let mut elements = vec![identity.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        index.insert(identity, 0);
        let mut queue = VecDeque::from([0usize]);
        let compose = |x: &[usize], y: &[usize]| -> Vec<usize> { x.iter().map(|&p| y[p]).collect() };
        while let Some(i) = queue.pop_front() {
            for g in &gens {
                let prod = compose(&elements[i], g);
                if !index.contains_key(&prod) {
                    if elements.len() >= cap {
                        return Err(Error::GroupTooLarge {
                            order: elements.len() + 1,
                            cap,
                        });
                    }
                    index.insert(prod.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(prod);
                }
            }
        }
        let n = elements.len();
        let rows: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| index[&compose(&elements[i], &elements[j])])
                    .collect()
            })
            .collect();
        let name = name.unwrap_or_else(|| format!("perm[{n}]"));
        Self::build(&rows, name, false)
    }

    /// Direct product; the pair `(x, y)` has index `x * |other| + y`.
    pub fn direct_product(&self, other: &FiniteGroup) -> FiniteGroup {
        let (n, m) = (self.order, other.order);
        let order = n * m;
        let mut table = Vec::with_capacity(order * order);
        for i in 0..order {
            for j in 0..order {
                let x = self.mul(i / m, j / m);
                let y = other.mul(i % m, j % m);
                table.push((x * m + y) as Elem);
            }
        }
        let inverse = (0..order)
            .map(|i| (self.inv(i / m) * m + other.inv(i % m)) as Elem)
            .collect();
        FiniteGroup {
            order,
            table,
            inverse,
            name: format!("{} x {}", self.name, other.name),
        }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.order + y] as usize
    }

    #[inline]
    pub fn inv(&self, x: usize) -> usize {
        self.inverse[x] as usize
    }

    /// `x^y = y⁻¹ x y`.
    #[inline]
    pub fn conjugate(&self, x: usize, y: usize) -> usize {
        self.mul(self.mul(self.inv(y), x), y)
    }

    /// `[x, y] = x y x⁻¹ y⁻¹`.
    #[inline]
    pub fn commutator(&self, x: usize, y: usize) -> usize {
        let xy = self.mul(x, y);
        self.mul(self.mul(xy, self.inv(x)), self.inv(y))
    }

    pub fn pow(&self, x: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(x) } else { x };
        let mut e = k.unsigned_abs();
        let mut acc = 0;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            sq = self.mul(sq, sq);
            e >>= 1;
        }
        acc
    }

    pub fn element_order(&self, x: usize) -> usize {
        let mut k = 1;
        let mut y = x;
        while y != 0 {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|x| (0..x).all(|y| self.mul(x, y) == self.mul(y, x)))
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    /// SHA-256 over the table contents; stable across runs and platforms.
    pub fn content_hash(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"stabring-group-v1");
        h.update((self.order as u32).to_le_bytes());
        for &e in &self.table {
            h.update(e.to_le_bytes());
        }
        h.finalize().into()
    }

    /// Subgroup generated by `gens`, as a sorted element list.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.order];
        member[0] = true;
        let mut elems = vec![0usize];
        let mut i = 0;
        while i < elems.len() {
            let x = elems[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !member[y] {
                    member[y] = true;
                    elems.push(y);
                }
            }
            i += 1;
        }
        elems.sort_unstable();
        elems
    }

    /// Restriction of the table to a closed subset, relabelled in sorted order.
    pub fn restrict(&self, elements: &[usize], name: String) -> Result<FiniteGroup> {
        let pos: HashMap<usize, usize> = elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut rows = Vec::with_capacity(elements.len());
        for &x in elements {
            let mut row = Vec::with_capacity(elements.len());
            for &y in elements {
                let p = pos.get(&self.mul(x, y)).copied().ok_or_else(|| {
                    Error::InvalidGroupSpec("subset is not closed under the product".into())
                })?;
                row.push(p);
            }
            rows.push(row);
        }
        FiniteGroup::from_rows(&rows, name)
    }

    pub fn commutator_subgroup(&self) -> Vec<usize> {
        let mut comms = Vec::new();
        for x in 0..self.order {
            for y in 0..self.order {
                comms.push(self.commutator(x, y));
            }
        }
        comms.sort_unstable();
        comms.dedup();
        self.generated_subgroup(&comms)
    }

    /// Invariant factors of `G / [G, G]`, computed from element orders of the
    /// quotient (no linear algebra involved).
    pub fn abelianization_invariants(&self) -> Vec<u64> {
        let derived = self.commutator_subgroup();
        let mut coset_of = vec![usize::MAX; self.order];
        let mut reps = Vec::new();
        for x in 0..self.order {
            if coset_of[x] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(x);
            for &d in &derived {
                coset_of[self.mul(x, d)] = id;
            }
        }
        let q = reps.len();
        let qmul = |a: usize, b: usize| coset_of[self.mul(reps[a], reps[b])];
        let qpow = |a: usize, k: u64| {
            let mut acc = 0usize; // coset of the identity is index 0
            for _ in 0..k {
                acc = qmul(acc, a);
            }
            acc
        };
        invariant_factors_from_counts(q as u64, |k| (0..q).filter(|&a| qpow(a, k) == 0).count() as u64)
    }
}

/// Invariant factors of a finite abelian group of order `order`, given a
/// function counting elements `x` with `x^k = 1`.
pub(crate) fn invariant_factors_from_counts(order: u64, count_killed: impl Fn(u64) -> u64) -> Vec<u64> {
    let mut per_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    let mut rest = order;
    let mut p = 2;
    while rest > 1 {
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            // ranks[j] = number of cyclic p-factors of exponent > j
            let mut prev = 1u64;
            let mut ranks = Vec::new();
            for j in 1..=e {
                let nj = count_killed(p.pow(j));
                let ratio = nj / prev;
                let mut r = 0;
                let mut t = ratio;
                while t > 1 {
                    t /= p;
                    r += 1;
                }
                if r == 0 {
                    break;
                }
                ranks.push(r);
                prev = nj;
            }
            // partition: exponents of the cyclic factors, descending
            let mut exps = Vec::new();
            let total = ranks.first().copied().unwrap_or(0);
            for i in 0..total {
                let ex = ranks.iter().filter(|&&r| r > i).count() as u32;
                exps.push(ex);
            }
            per_prime.insert(p, exps);
        }
        p += 1;
    }
    let len = per_prime.values().map(|v| v.len()).max().unwrap_or(0);
    // largest invariant factor first, then reverse
    let mut factors = Vec::with_capacity(len);
    for i in 0..len {
        let mut f = 1u64;
        for (&p, exps) in &per_prime {
            if let Some(&e) = exps.get(i) {
                f *= p.pow(e);
            }
        }
        factors.push(f);
    }
    factors.reverse();
    factors
}

/// One subgroup: its elements in `G` and the relabelled group.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub elements: Vec<usize>,
    pub group: FiniteGroup,
}

#[derive(Clone, Debug)]
pub struct SubgroupList {
    pub subgroups: Vec<Subgroup>,
}

impl SubgroupList {
    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Subgroup> {
        self.subgroups.iter()
    }
}

pub fn enumerate_subgroups(g: &FiniteGroup) -> Result<SubgroupList> {
    enumerate_subgroups_with_cap(g, DEFAULT_SUBGROUP_CAP)
}

/// Every subgroup exactly once, built by joining cyclic subgroups.
/// Ordered by (order, element list).
pub fn enumerate_subgroups_with_cap(g: &FiniteGroup, cap: usize) -> Result<SubgroupList> {
    let n = g.order();
    if n > cap || n > 64 {
        return Err(Error::GroupTooLarge {
            order: n,
            cap: cap.min(64),
        });
    }
    let mask_of = |elems: &[usize]| elems.iter().fold(0u64, |m, &e| m | (1u64 << e));
    let cyclic: Vec<u64> = (0..n).map(|x| mask_of(&g.generated_subgroup(&[x]))).collect();
    let mut found: Vec<u64> = vec![1];
    let mut seen: std::collections::HashSet<u64> = found.iter().copied().collect();
    let mut i = 0;
    while i < found.len() {
        let h = found[i];
        for (x, &c) in cyclic.iter().enumerate() {
            if h & (1 << x) != 0 || c & !h == 0 {
                continue;
            }
            let gens: Vec<usize> = (0..n).filter(|&e| h & (1 << e) != 0).chain([x]).collect();
            let joined = mask_of(&g.generated_subgroup(&gens));
            if seen.insert(joined) {
                found.push(joined);
            }
        }
        i += 1;
    }
    let mut subgroups = Vec::with_capacity(found.len());
    for mask in found {
        let elements: Vec<usize> = (0..n).filter(|&e| mask & (1 << e) != 0).collect();
        let name = format!("{}<{}>", g.name(), elements.len());
        let group = g.restrict(&elements, name)?;
        subgroups.push(Subgroup { elements, group });
    }
    subgroups.sort_by(|a, b| {
        (a.elements.len(), &a.elements).cmp(&(b.elements.len(), &b.elements))
    });
    Ok(SubgroupList { subgroups })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> FiniteGroup {
        load_group(&GroupSpec::named("s3").unwrap()).unwrap()
    }

    fn is_transposition(g: &FiniteGroup, x: usize) -> bool {
        x != 0 && g.element_order(x) == 2
    }

    #[test]
    fn cyclic_two() {
        let g = load_group(&GroupSpec::Cyclic { order: 2 }).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.identity(), 0);
        assert_eq!(g.mul(1, 1), 0);
    }

    #[test]
    fn rejects_non_associative_table() {
        // A loop of order 5 that is latin with identity 0 but not associative.
        let rows = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = load_group(&GroupSpec::Cayley {
            table: CayleyTable::Rows(rows),
            name: None,
        })
        .unwrap_err();
        match err {
            Error::NotAssociative { a, b, c } => {
                let msg = err.to_string();
                assert!(msg.contains(&format!("({a}*{b})*{c}")));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn permutation_closure_s3() {
        let g = s3();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
    }

    #[test]
    fn closure_respects_cap() {
        let spec = GroupSpec::named("s3").unwrap();
        assert!(matches!(
            load_group_with_cap(&spec, 4),
            Err(Error::GroupTooLarge { .. })
        ));
    }

    #[test]
    fn flat_table_accepted() {
        let spec: GroupSpec =
            serde_json::from_str(r#"{"kind":"cayley","table":[0,1,1,0]}"#).unwrap();
        assert_eq!(load_group(&spec).unwrap().order(), 2);
    }

    #[test]
    fn conjugation_and_commutators_in_s3() {
        let g = s3();
        for x in 0..6 {
            assert_eq!(g.conjugate(x, 0), x);
            assert_eq!(g.commutator(x, x), 0);
        }
        let transpositions: Vec<usize> = (0..6).filter(|&x| is_transposition(&g, x)).collect();
        let three_cycles: Vec<usize> = (1..6).filter(|&x| g.element_order(x) == 3).collect();
        assert_eq!(transpositions.len(), 3);
        assert_eq!(three_cycles.len(), 2);
        for &t in &transpositions {
            for &c in &three_cycles {
                let conj = g.conjugate(t, c);
                assert!(is_transposition(&g, conj));
                assert_ne!(conj, t);
            }
        }
        let (t1, t2) = (transpositions[0], transpositions[1]);
        assert_eq!(g.element_order(g.commutator(t1, t2)), 3);
    }

    #[test]
    fn abelian_groups_have_trivial_commutators() {
        let g = load_group(&GroupSpec::named("klein").unwrap()).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(g.commutator(x, y), 0);
                assert_eq!(g.conjugate(x, y), x);
            }
        }
    }

    #[test]
    fn subgroup_counts() {
        let z2 = FiniteGroup::cyclic(2);
        assert_eq!(enumerate_subgroups(&z2).unwrap().len(), 2);
        let klein = load_group(&GroupSpec::named("klein").unwrap()).unwrap();
        assert_eq!(enumerate_subgroups(&klein).unwrap().len(), 5);
        assert_eq!(enumerate_subgroups(&s3()).unwrap().len(), 6);
    }

    #[test]
    fn subgroup_cap() {
        let g = FiniteGroup::cyclic(17);
        assert!(enumerate_subgroups(&g).is_err());
    }

    #[test]
    fn abelianization() {
        assert_eq!(s3().abelianization_invariants(), vec![2]);
        let klein = load_group(&GroupSpec::named("klein").unwrap()).unwrap();
        assert_eq!(klein.abelianization_invariants(), vec![2, 2]);
        assert_eq!(FiniteGroup::cyclic(12).abelianization_invariants(), vec![12]);
        assert!(FiniteGroup::trivial().abelianization_invariants().is_empty());
        let z2z4 = FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(4));
        assert_eq!(z2z4.abelianization_invariants(), vec![2, 4]);
        let q8 = load_group(&GroupSpec::named("q8").unwrap()).unwrap();
        assert_eq!(q8.order(), 8);
        assert_eq!(q8.abelianization_invariants(), vec![2, 2]);
    }
}
