//! Partition of `G^{2n}` into orbits of the compiled move set.
//!
//! States are mixed-radix ranks with `a_1` as the most significant digit, so
//! the minimum rank of an orbit is also its lexicographically least tuple.
//! The enumeration is a concurrent union-find in which every link points the
//! larger root at the smaller one; the surviving root of each class is its
//! minimum rank no matter how the work was scheduled.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU32, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::freegroup::{self, CompiledMove, MoveSet};
use crate::group::FiniteGroup;

pub const DEFAULT_STATE_CAP: u64 = 1 << 32;

/// Mixed-radix encoding of tuples in `G^len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleCodec {
    order: usize,
    len: usize,
    place: Vec<u64>,
    states: u64,
}

impl TupleCodec {
    pub fn new(order: usize, len: usize) -> Result<Self> {
        let states = (order as u128).pow(len as u32);
        if states > u64::MAX as u128 {
            return Err(Error::StateCapExceeded {
                states,
                cap: u64::MAX,
            });
        }
        let mut place = vec![1u64; len];
        for c in (0..len.saturating_sub(1)).rev() {
            place[c] = place[c + 1] * order as u64;
        }
        Ok(TupleCodec {
            order,
            len,
            place,
            states: states as u64,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn states(&self) -> u64 {
        self.states
    }

    pub fn place(&self) -> &[u64] {
        &self.place
    }

    pub fn encode(&self, v: &[usize]) -> u64 {
        debug_assert_eq!(v.len(), self.len);
        v.iter().fold(0u64, |acc, &x| acc * self.order as u64 + x as u64)
    }

    pub fn decode(&self, mut rank: u64) -> Vec<usize> {
        let q = self.order as u64;
        let mut v = vec![0usize; self.len];
        for d in (0..self.len).rev() {
            v[d] = (rank % q) as usize;
            rank /= q;
        }
        v
    }
}

/// A point `(a_1, b_1, ..., a_n, b_n)` of `G^{2n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HurwitzTuple(pub Vec<usize>);

impl HurwitzTuple {
    pub fn identity(n: usize) -> Self {
        HurwitzTuple(vec![0; 2 * n])
    }

    pub fn genus(&self) -> usize {
        self.0.len() / 2
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    /// Concatenation `(v, w)`.
    pub fn concat(&self, other: &HurwitzTuple) -> HurwitzTuple {
        HurwitzTuple([self.0.as_slice(), other.0.as_slice()].concat())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitTable {
    pub n: usize,
    pub order: usize,
    pub group_hash: [u8; 32],
    pub moveset_hash: [u8; 32],
    pub orbit_id: Vec<u32>,
    pub reps: Vec<u64>,
}

impl OrbitTable {
    pub fn count(&self) -> usize {
        self.reps.len()
    }

    pub fn codec(&self) -> TupleCodec {
        TupleCodec::new(self.order, 2 * self.n).expect("table was built with a valid codec")
    }

    #[inline]
    pub fn orbit_of_rank(&self, rank: u64) -> u32 {
        self.orbit_id[rank as usize]
    }

    pub fn orbit_of(&self, v: &[usize]) -> Result<u32> {
        if v.len() != 2 * self.n {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.n,
                got: v.len(),
            });
        }
        Ok(self.orbit_of_rank(self.codec().encode(v)))
    }

    pub fn rep_tuple(&self, orbit: u32) -> Vec<usize> {
        self.codec().decode(self.reps[orbit as usize])
    }

    /// Orbit sizes, indexed by orbit id.
    pub fn orbit_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.count()];
        for &o in &self.orbit_id {
            sizes[o as usize] += 1;
        }
        sizes
    }

    /// Every member rank of every orbit, grouped by orbit id.
    pub fn members(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new(); self.count()];
        for (r, &o) in self.orbit_id.iter().enumerate() {
            out[o as usize].push(r as u64);
        }
        out
    }
}

/// The minimum-rank tuple in the orbit of `v`.
pub fn canonical_rep(t: &OrbitTable, v: &HurwitzTuple) -> Result<HurwitzTuple> {
    let o = t.orbit_of(v.entries())?;
    Ok(HurwitzTuple(t.rep_tuple(o)))
}

struct UnionFind {
    parent: Vec<AtomicU32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).map(AtomicU32::new).collect(),
        }
    }

    fn find(&self, mut x: u32) -> u32 {
        loop {
            let p = self.parent[x as usize].load(Ordering::Relaxed);
            if p == x {
                return x;
            }
            let gp = self.parent[p as usize].load(Ordering::Relaxed);
            if gp != p {
                // path halving; losing the race is harmless
                let _ = self.parent[x as usize].compare_exchange_weak(
                    p,
                    gp,
                    Ordering::Relaxed,
                    Ordering::Relaxed,
                );
            }
            x = p;
        }
    }

    fn union(&self, a: u32, b: u32) {
        loop {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                return;
            }
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            if self.parent[hi as usize]
                .compare_exchange(hi, lo, Ordering::AcqRel, Ordering::Relaxed)
                .is_ok()
            {
                return;
            }
        }
    }
}

/// Full partition of `G^{2n}` under the given compiled moves.
pub fn enumerate_orbits(
    g: &FiniteGroup,
    n: usize,
    moves: &[CompiledMove],
    moveset_hash: [u8; 32],
    state_cap: u64,
) -> Result<OrbitTable> {
    let states = (g.order() as u128).pow(2 * n as u32);
    let cap = state_cap.min(1u64 << 32);
    if states > cap as u128 {
        return Err(Error::StateCapExceeded {
            states,
            cap: state_cap,
        });
    }
    let codec = TupleCodec::new(g.order(), 2 * n)?;
    let total = codec.states();
    let uf = UnionFind::new(total as usize);
    let place = codec.place();
    const CHUNK: u64 = 4096;
    let chunks = total.div_ceil(CHUNK);
    (0..chunks).into_par_iter().for_each(|c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(total);
        for r in lo..hi {
            for m in moves {
                let img = m.apply_rank(g, place, r);
                if img != r {
                    uf.union(r as u32, img as u32);
                }
            }
        }
    });
    let roots: Vec<u32> = (0..total as u32).into_par_iter().map(|r| uf.find(r)).collect();
    let mut id_of_root = vec![u32::MAX; total as usize];
    let mut reps = Vec::new();
    for (r, &root) in roots.iter().enumerate() {
        if root as usize == r {
            id_of_root[r] = reps.len() as u32;
            reps.push(r as u64);
        }
    }
    let orbit_id: Vec<u32> = roots.par_iter().map(|&root| id_of_root[root as usize]).collect();
    Ok(OrbitTable {
        n,
        order: g.order(),
        group_hash: g.content_hash(),
        moveset_hash,
        orbit_id,
        reps,
    })
}

/// Hash recorded for the empty move set used at genus zero.
pub fn empty_moveset_hash() -> [u8; 32] {
    use sha2::{Digest, Sha256};
    Sha256::digest(b"stabring-moves-v1:genus0").into()
}

/// Builds the move set for genus `n` and enumerates its orbits.
pub fn orbits_for_genus(
    g: &FiniteGroup,
    n: usize,
    depth: usize,
    state_cap: u64,
) -> Result<OrbitTable> {
    if n == 0 {
        return enumerate_orbits(g, 0, &[], empty_moveset_hash(), state_cap);
    }
    let set = freegroup::enumerate_stabilizing_automorphisms(n, depth)?;
    let compiled = set.compile(g);
    enumerate_orbits(g, n, &compiled, set.content_hash(), state_cap)
}

/// Hash of the move set that [`orbits_for_genus`] would use.
pub fn moveset_hash_for(n: usize, depth: usize) -> Result<[u8; 32]> {
    if n == 0 {
        return Ok(empty_moveset_hash());
    }
    Ok(freegroup::enumerate_stabilizing_automorphisms(n, depth)?.content_hash())
}

pub fn moveset_for(n: usize, depth: usize) -> Result<Option<MoveSet>> {
    if n == 0 {
        return Ok(None);
    }
    freegroup::enumerate_stabilizing_automorphisms(n, depth).map(Some)
}

const MAGIC: &[u8; 4] = b"HWOT";
const VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 32 + 32 + 2 + 2 + 4;

/// Writes the table in the `HWOT` binary layout (all integers little-endian).
pub fn cache_store(t: &OrbitTable, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(MAGIC);
    header.extend_from_slice(&VERSION.to_le_bytes());
    header.extend_from_slice(&t.group_hash);
    header.extend_from_slice(&t.moveset_hash);
    header.extend_from_slice(&(t.n as u16).to_le_bytes());
    header.extend_from_slice(&(t.order as u16).to_le_bytes());
    header.extend_from_slice(&(t.count() as u32).to_le_bytes());
    let io = |e| Error::io(path, e);
    w.write_all(&header).map_err(io)?;
    for &r in &t.reps {
        w.write_all(&r.to_le_bytes()).map_err(io)?;
    }
    for &o in &t.orbit_id {
        w.write_all(&o.to_le_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Reads a table without checking it against any expected hashes.
pub fn cache_load(path: &Path) -> Result<OrbitTable> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    BufReader::new(file)
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io(path, e))?;
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(Error::Cache("corrupt header".into()));
    }
    let u16_at = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]);
    let version = u16_at(4);
    if version != VERSION {
        return Err(Error::Cache(format!("unsupported version {version}")));
    }
    let group_hash: [u8; 32] = bytes[6..38].try_into().unwrap();
    let moveset_hash: [u8; 32] = bytes[38..70].try_into().unwrap();
    let n = u16_at(70) as usize;
    let order = u16_at(72) as usize;
    let count = u32::from_le_bytes(bytes[74..78].try_into().unwrap()) as usize;
    if order == 0 {
        return Err(Error::Cache("corrupt header: zero group order".into()));
    }
    let states = (order as u128).pow(2 * n as u32);
    let expected = HEADER_LEN as u128 + 8 * count as u128 + 4 * states;
    if bytes.len() as u128 != expected {
        return Err(Error::Cache(format!(
            "payload length {} does not match the expected {expected}",
            bytes.len()
        )));
    }
    let mut off = HEADER_LEN;
    let reps: Vec<u64> = (0..count)
        .map(|i| u64::from_le_bytes(bytes[off + 8 * i..off + 8 * i + 8].try_into().unwrap()))
        .collect();
    off += 8 * count;
    let orbit_id: Vec<u32> = (0..states as usize)
        .map(|i| u32::from_le_bytes(bytes[off + 4 * i..off + 4 * i + 4].try_into().unwrap()))
        .collect();
    if orbit_id.iter().any(|&o| o as usize >= count)
        || reps.iter().enumerate().any(|(i, &r)| {
            r as u128 >= states || orbit_id[r as usize] as usize != i
        })
    {
        return Err(Error::Cache("orbit ids are inconsistent with the representatives".into()));
    }
    Ok(OrbitTable {
        n,
        order,
        group_hash,
        moveset_hash,
        orbit_id,
        reps,
    })
}

/// Reads a table and rejects it unless the hashes and genus match.
pub fn cache_load_checked(
    path: &Path,
    group_hash: &[u8; 32],
    moveset_hash: &[u8; 32],
    n: usize,
) -> Result<OrbitTable> {
    let t = cache_load(path)?;
    if &t.group_hash != group_hash {
        return Err(Error::CacheMismatch { field: "group hash" });
    }
    if &t.moveset_hash != moveset_hash {
        return Err(Error::CacheMismatch {
            field: "move-set hash",
        });
    }
    if t.n != n {
        return Err(Error::CacheMismatch { field: "genus" });
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::evaluated_boundary;
    use crate::group::{load_group, GroupSpec};

    fn group(name: &str) -> FiniteGroup {
        load_group(&GroupSpec::named(name).unwrap()).unwrap()
    }

    /// Plain BFS over explicit tuples, used as an independent check of the
    /// union-find enumeration.
    fn bfs_orbit_count(g: &FiniteGroup, n: usize) -> usize {
        let set = freegroup::enumerate_stabilizing_automorphisms(n, 2).unwrap();
        let moves = set.compile(g);
        let codec = TupleCodec::new(g.order(), 2 * n).unwrap();
        let mut seen = vec![false; codec.states() as usize];
        let mut count = 0;
        for start in 0..codec.states() {
            if seen[start as usize] {
                continue;
            }
            count += 1;
            seen[start as usize] = true;
            let mut stack = vec![codec.decode(start)];
            while let Some(v) = stack.pop() {
                for m in &moves {
                    let w = m.apply_tuple(g, &v);
                    let r = codec.encode(&w) as usize;
                    if !seen[r] {
                        seen[r] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    #[test]
    fn small_counts() {
        let trivial = FiniteGroup::trivial();
        for n in 0..=3 {
            assert_eq!(orbits_for_genus(&trivial, n, 2, DEFAULT_STATE_CAP).unwrap().count(), 1);
        }
        let z2 = FiniteGroup::cyclic(2);
        assert_eq!(orbits_for_genus(&z2, 1, 2, DEFAULT_STATE_CAP).unwrap().count(), 2);
        assert_eq!(bfs_orbit_count(&z2, 1), 2);
        let z3 = FiniteGroup::cyclic(3);
        assert_eq!(orbits_for_genus(&z3, 1, 2, DEFAULT_STATE_CAP).unwrap().count(), 2);
        assert_eq!(bfs_orbit_count(&z3, 1), 2);
    }

    #[test]
    fn union_find_agrees_with_bfs() {
        for (name, n) in [("z4", 2), ("klein", 2), ("s3", 2)] {
            let g = group(name);
            let t = orbits_for_genus(&g, n, 2, DEFAULT_STATE_CAP).unwrap();
            assert_eq!(t.count(), bfs_orbit_count(&g, n), "{name}");
        }
    }

    #[test]
    fn genus_zero_has_one_orbit() {
        let t = orbits_for_genus(&group("s3"), 0, 2, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(t.count(), 1);
        assert_eq!(t.orbit_id, vec![0]);
    }

    #[test]
    fn canonical_reps() {
        let z2 = FiniteGroup::cyclic(2);
        let t = orbits_for_genus(&z2, 1, 2, DEFAULT_STATE_CAP).unwrap();
        let id = HurwitzTuple::identity(1);
        assert_eq!(canonical_rep(&t, &id).unwrap(), id);
        let a = canonical_rep(&t, &HurwitzTuple(vec![1, 0])).unwrap();
        let b = canonical_rep(&t, &HurwitzTuple(vec![0, 1])).unwrap();
        assert_eq!(a, b);
        assert_eq!(canonical_rep(&t, &a).unwrap(), a);
        assert!(matches!(
            canonical_rep(&t, &HurwitzTuple(vec![0, 1, 1])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn state_cap_is_enforced() {
        let g = group("s3");
        let err = orbits_for_genus(&g, 3, 1, 1000).unwrap_err();
        assert!(matches!(err, Error::StateCapExceeded { .. }));
        assert!(err.to_string().contains("lower n"));
    }

    #[test]
    fn orbit_invariants_s3() {
        let g = group("s3");
        let n = 2;
        let set = freegroup::enumerate_stabilizing_automorphisms(n, 2).unwrap();
        let moves = set.compile(&g);
        let t = enumerate_orbits(&g, n, &moves, set.content_hash(), DEFAULT_STATE_CAP).unwrap();
        let codec = t.codec();
        assert_eq!(t.orbit_sizes().iter().sum::<u64>(), codec.states());
        let mut boundary = vec![None; t.count()];
        let mut image = vec![None; t.count()];
        for r in 0..codec.states() {
            let v = codec.decode(r);
            let o = t.orbit_of_rank(r) as usize;
            for m in &moves {
                assert_eq!(t.orbit_of_rank(m.apply_rank(&g, codec.place(), r)) as usize, o);
            }
            let b = evaluated_boundary(&g, &v);
            assert_eq!(*boundary[o].get_or_insert(b), b);
            let h = g.generated_subgroup(&v);
            assert_eq!(image[o].get_or_insert_with(|| h.clone()), &h);
            assert!(t.reps[o] <= r);
        }
    }

    #[test]
    fn cache_round_trip_and_errors() {
        let g = group("klein");
        let t = orbits_for_genus(&g, 2, 2, DEFAULT_STATE_CAP).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.hwot");
        cache_store(&t, &path).unwrap();
        let back = cache_load_checked(&path, &t.group_hash, &t.moveset_hash, 2).unwrap();
        assert_eq!(back, t);

        let wrong = [7u8; 32];
        assert!(matches!(
            cache_load_checked(&path, &wrong, &t.moveset_hash, 2),
            Err(Error::CacheMismatch { field: "group hash" })
        ));
        assert!(matches!(
            cache_load_checked(&path, &t.group_hash, &wrong, 2),
            Err(Error::CacheMismatch { .. })
        ));

        let bytes = std::fs::read(&path).unwrap();
        let cut = dir.path().join("cut.hwot");
        std::fs::write(&cut, &bytes[..bytes.len() - 3]).unwrap();
        let err = cache_load(&cut).unwrap_err();
        assert!(err.to_string().contains("payload length"), "{err}");

        let bad = dir.path().join("bad.hwot");
        std::fs::write(&bad, b"XXXX").unwrap();
        assert!(cache_load(&bad).unwrap_err().to_string().contains("corrupt header"));
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let g = group("s3");
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| orbits_for_genus(&g, 2, 2, DEFAULT_STATE_CAP).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}
