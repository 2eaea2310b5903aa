//! Exact integer linear algebra.
//!
//! Sparse matrices are column-major with arbitrary-precision entries. Smith
//! forms are computed by eliminating unit pivots sparsely and handing the
//! remaining block to a dense diagonalization. Both stages first run over
//! checked `i64` and restart over `BigInt` if anything overflows.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt::{self, Debug};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Marker for an `i64` overflow; callers restart in `BigInt`.
#[derive(Debug, Clone, Copy)]
pub struct Overflow;

type Checked<T> = std::result::Result<T, Overflow>;

/// Integer scalar used by the elimination kernels.
pub trait Entry: Clone + Debug + PartialEq + Send + Sync + 'static {
    fn nil() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_nil(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn add(&self, o: &Self) -> Checked<Self>;
    fn sub(&self, o: &Self) -> Checked<Self>;
    fn mul(&self, o: &Self) -> Checked<Self>;
    fn neg(&self) -> Checked<Self>;
    /// Quotient rounded toward zero.
    fn quot(&self, o: &Self) -> Self;
    fn cmp_abs(&self, o: &Self) -> Ordering;
    fn to_big(&self) -> BigInt;
    fn from_big(v: &BigInt) -> Checked<Self>;
}

impl Entry for i64 {
    fn nil() -> Self {
        0
    }
    fn from_i64(v: i64) -> Self {
        v
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn is_neg(&self) -> bool {
        *self < 0
    }
    fn add(&self, o: &Self) -> Checked<Self> {
        self.checked_add(*o).ok_or(Overflow)
    }
    fn sub(&self, o: &Self) -> Checked<Self> {
        self.checked_sub(*o).ok_or(Overflow)
    }
    fn mul(&self, o: &Self) -> Checked<Self> {
        self.checked_mul(*o).ok_or(Overflow)
    }
    fn neg(&self) -> Checked<Self> {
        self.checked_neg().ok_or(Overflow)
    }
    fn quot(&self, o: &Self) -> Self {
        self / o
    }
    fn cmp_abs(&self, o: &Self) -> Ordering {
        self.unsigned_abs().cmp(&o.unsigned_abs())
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_big(v: &BigInt) -> Checked<Self> {
        v.to_i64().ok_or(Overflow)
    }
}

impl Entry for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn add(&self, o: &Self) -> Checked<Self> {
        Ok(self + o)
    }
    fn sub(&self, o: &Self) -> Checked<Self> {
        Ok(self - o)
    }
    fn mul(&self, o: &Self) -> Checked<Self> {
        Ok(self * o)
    }
    fn neg(&self) -> Checked<Self> {
        Ok(-self)
    }
    fn quot(&self, o: &Self) -> Self {
        self / o
    }
    fn cmp_abs(&self, o: &Self) -> Ordering {
        self.magnitude().cmp(o.magnitude())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn from_big(v: &BigInt) -> Checked<Self> {
        Ok(v.clone())
    }
}

// ---------------------------------------------------------------------------
// sparse matrices

/// Sparse integer matrix, stored by columns with strictly increasing rows.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: Vec<Vec<(usize, BigInt)>>,
}

impl Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix({}x{}, nnz={})", self.rows, self.ncols(), self.nnz())
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for (i, c) in m.cols.iter_mut().enumerate() {
            c.push((i, BigInt::one()));
        }
        m
    }

    /// Builds a matrix from triplets; duplicates are summed and zeros dropped.
    pub fn from_triplets<I, V>(rows: usize, cols: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, V)>,
        V: Into<BigInt>,
    {
        let mut out = vec![Vec::new(); cols];
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(Error::Shape(format!(
                    "entry ({r}, {c}) outside a {rows}x{cols} matrix"
                )));
            }
            out[c].push((r, v.into()));
        }
        for col in &mut out {
            *col = normalize_column(std::mem::take(col));
        }
        Ok(IntMatrix { rows, cols: out })
    }

    /// Builds a matrix from columns given as `(row, value)` lists in any order.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, i64)>>) -> Self {
        let cols = columns
            .into_iter()
            .map(|c| {
                debug_assert!(c.iter().all(|&(r, _)| r < rows));
                normalize_column(c.into_iter().map(|(r, v)| (r, BigInt::from(v))).collect())
            })
            .collect();
        IntMatrix { rows, cols }
    }

    pub fn from_dense(d: &DMat) -> Self {
        let mut m = Self::zeros(d.rows(), d.cols());
        for j in 0..d.cols() {
            for i in 0..d.rows() {
                let v = d.get(i, j);
                if !Zero::is_zero(v) {
                    m.cols[j].push((i, v.clone()));
                }
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn column(&self, j: usize) -> &[(usize, BigInt)] {
        &self.cols[j]
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        match self.cols[j].binary_search_by_key(&i, |e| e.0) {
            Ok(k) => self.cols[j][k].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    /// Row-major triplets in ascending (row, col) order.
    pub fn triplets(&self) -> Vec<(usize, usize, BigInt)> {
        let mut t: Vec<_> = self
            .cols
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |(i, v)| (*i, j, v.clone())))
            .collect();
        t.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        t
    }

    /// First nonzero entry in row-major order.
    pub fn first_nonzero(&self) -> Option<(usize, usize)> {
        self.cols
            .iter()
            .enumerate()
            .filter_map(|(j, c)| c.first().map(|(i, _)| (*i, j)))
            .min()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = vec![Vec::new(); self.rows];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, v) in c {
                out[*i].push((j, v.clone()));
            }
        }
        IntMatrix {
            rows: self.ncols(),
            cols: out,
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.ncols() != other.rows {
            return Err(Error::Shape(format!(
                "{}x{} times {}x{}",
                self.rows,
                self.ncols(),
                other.rows,
                other.ncols()
            )));
        }
        let small = self.fits_i64() && other.fits_i64();
        let cols = other
            .cols
            .iter()
            .map(|bc| {
                if small {
                    if let Some(c) = self.mul_column_i64(bc) {
                        return c;
                    }
                }
                let mut acc: Vec<(usize, BigInt)> = Vec::new();
                for (k, bv) in bc {
                    for (i, av) in &self.cols[*k] {
                        acc.push((*i, av * bv));
                    }
                }
                normalize_column(acc)
            })
            .collect();
        Ok(IntMatrix {
            rows: self.rows,
            cols,
        })
    }

    fn mul_column_i64(&self, bc: &[(usize, BigInt)]) -> Option<Vec<(usize, BigInt)>> {
        let mut acc: Vec<(usize, i64)> = Vec::new();
        for (k, bv) in bc {
            let bv = bv.to_i64()?;
            for (i, av) in &self.cols[*k] {
                acc.push((*i, av.to_i64()?.checked_mul(bv)?));
            }
        }
        acc.sort_unstable_by_key(|e| e.0);
        let mut out: Vec<(usize, BigInt)> = Vec::with_capacity(acc.len());
        let mut cur: Option<(usize, i64)> = None;
        for (i, v) in acc {
            match cur {
                Some((ci, cv)) if ci == i => cur = Some((ci, cv.checked_add(v)?)),
                Some((ci, cv)) => {
                    if cv != 0 {
                        out.push((ci, BigInt::from(cv)));
                    }
                    cur = Some((i, v));
                }
                None => cur = Some((i, v)),
            }
        }
        if let Some((ci, cv)) = cur {
            if cv != 0 {
                out.push((ci, BigInt::from(cv)));
            }
        }
        Some(out)
    }

    fn fits_i64(&self) -> bool {
        self.cols
            .iter()
            .flatten()
            .all(|(_, v)| v.to_i64().map(|x| x.unsigned_abs() < (1 << 31)).unwrap_or(false))
    }

    pub fn add(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.combine(other, true)
    }

    fn combine(&self, other: &IntMatrix, negate: bool) -> Result<IntMatrix> {
        if self.rows != other.rows || self.ncols() != other.ncols() {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows,
                self.ncols(),
                other.rows,
                other.ncols()
            )));
        }
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let mut c: Vec<(usize, BigInt)> = a.clone();
                c.extend(
                    b.iter()
                        .map(|(i, v)| (*i, if negate { -v } else { v.clone() })),
                );
                normalize_column(c)
            })
            .collect();
        Ok(IntMatrix {
            rows: self.rows,
            cols,
        })
    }

    /// Columns of `self` followed by columns of `other`.
    pub fn hstack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != other.rows {
            return Err(Error::Shape(format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let mut cols = self.cols.clone();
        cols.extend(other.cols.iter().cloned());
        Ok(IntMatrix {
            rows: self.rows,
            cols,
        })
    }

    /// Drops empty and repeated columns.
    pub fn dedup_cols(&self) -> IntMatrix {
        let mut seen = std::collections::HashSet::new();
        let cols = self
            .cols
            .iter()
            .filter(|c| !c.is_empty() && seen.insert((*c).clone()))
            .cloned()
            .collect();
        IntMatrix {
            rows: self.rows,
            cols,
        }
    }

    /// Restriction to the first `k` rows.
    pub fn top_rows(&self, k: usize) -> IntMatrix {
        IntMatrix {
            rows: k,
            cols: self
                .cols
                .iter()
                .map(|c| c.iter().filter(|(i, _)| *i < k).cloned().collect())
                .collect(),
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: idx.iter().map(|&j| self.cols[j].clone()).collect(),
        }
    }

    pub fn push_column(&mut self, col: Vec<(usize, BigInt)>) {
        debug_assert!(col.iter().all(|(i, _)| *i < self.rows));
        self.cols.push(normalize_column(col));
    }

    /// Image of one sparse vector.
    pub fn apply(&self, v: &[(usize, BigInt)]) -> Vec<(usize, BigInt)> {
        let mut acc = Vec::new();
        for (k, x) in v {
            for (i, a) in &self.cols[*k] {
                acc.push((*i, a * x));
            }
        }
        normalize_column(acc)
    }

    pub fn to_dense(&self) -> DMat {
        let mut d = DMat::zeros(self.rows, self.ncols());
        for (j, c) in self.cols.iter().enumerate() {
            for (i, v) in c {
                d.set(*i, j, v.clone());
            }
        }
        d
    }

    /// Text dump: a `rows cols nnz` header, then one `row col value` line per entry.
    pub fn dump(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows, self.ncols(), self.nnz());
        for (i, j, v) in self.triplets() {
            s.push_str(&format!("{i} {j} {v}\n"));
        }
        s
    }

    pub fn parse(text: &str) -> Result<IntMatrix> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::MatrixParse("missing header".into()))?;
        let nums = parse_fields::<usize>(header, 3)?;
        let (rows, cols, nnz) = (nums[0], nums[1], nums[2]);
        let mut entries = Vec::with_capacity(nnz);
        for line in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(Error::MatrixParse(format!("bad triplet line `{line}`")));
            }
            let r = f[0]
                .parse::<usize>()
                .map_err(|e| Error::MatrixParse(e.to_string()))?;
            let c = f[1]
                .parse::<usize>()
                .map_err(|e| Error::MatrixParse(e.to_string()))?;
            let v = BigInt::from_str(f[2]).map_err(|e| Error::MatrixParse(e.to_string()))?;
            entries.push((r, c, v));
        }
        if entries.len() != nnz {
            return Err(Error::MatrixParse(format!(
                "header declares {nnz} entries, found {}",
                entries.len()
            )));
        }
        IntMatrix::from_triplets(rows, cols, entries)
            .map_err(|e| Error::MatrixParse(e.to_string()))
    }

    fn to_work<T: Entry>(&self) -> Checked<Vec<Vec<(u32, T)>>> {
        self.cols
            .iter()
            .map(|c| {
                c.iter()
                    .map(|(i, v)| Ok((*i as u32, T::from_big(v)?)))
                    .collect()
            })
            .collect()
    }
}

fn parse_fields<T: FromStr>(line: &str, n: usize) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    let f: Vec<&str> = line.split_whitespace().collect();
    if f.len() != n {
        return Err(Error::MatrixParse(format!(
            "expected {n} fields in `{line}`"
        )));
    }
    f.iter()
        .map(|x| x.parse::<T>().map_err(|e| Error::MatrixParse(e.to_string())))
        .collect()
}

fn normalize_column(mut c: Vec<(usize, BigInt)>) -> Vec<(usize, BigInt)> {
    c.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, BigInt)> = Vec::with_capacity(c.len());
    for (i, v) in c {
        match out.last_mut() {
            Some((li, lv)) if *li == i => *lv += v,
            _ => out.push((i, v)),
        }
    }
    out.retain(|(_, v)| !Zero::is_zero(v));
    out
}

// ---------------------------------------------------------------------------
// dense matrices

/// Dense integer matrix (row-major).
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl Debug for DMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl DMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows<V: Into<BigInt> + Clone>(rows: &[Vec<V>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone().into());
            }
        }
        m
    }

    /// Matrix with the given vectors as columns; all must have length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &BigInt) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn col_list(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> DMat {
        let mut t = DMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &DMat) -> DMat {
        assert_eq!(self.cols, o.rows, "dense product shape mismatch");
        let mut out = DMat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if Zero::is_zero(a) {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !Zero::is_zero(b) {
                        out.data[i * o.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !Zero::is_zero(*a))
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn sub(&self, o: &DMat) -> DMat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        DMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Columns of `self` then `o`.
    pub fn hcat(&self, o: &DMat) -> DMat {
        assert_eq!(self.rows, o.rows, "hcat row mismatch");
        let mut m = DMat::zeros(self.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
            for j in 0..o.cols {
                m.set(i, self.cols + j, o.get(i, j).clone());
            }
        }
        m
    }

    /// Rows of `self` then `o`.
    pub fn vcat(&self, o: &DMat) -> DMat {
        assert_eq!(self.cols, o.cols, "vcat column mismatch");
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        DMat {
            rows: self.rows + o.rows,
            cols: self.cols,
            data,
        }
    }

    /// Block diagonal `[self 0; 0 o]`.
    pub fn block_diag(&self, o: &DMat) -> DMat {
        let mut m = DMat::zeros(self.rows + o.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..o.rows {
            for j in 0..o.cols {
                m.set(self.rows + i, self.cols + j, o.get(i, j).clone());
            }
        }
        m
    }

    /// Kronecker product.
    pub fn kron(&self, o: &DMat) -> DMat {
        let mut m = DMat::zeros(self.rows * o.rows, self.cols * o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if Zero::is_zero(a) {
                    continue;
                }
                for k in 0..o.rows {
                    for l in 0..o.cols {
                        let b = o.get(k, l);
                        if !Zero::is_zero(b) {
                            m.set(i * o.rows + k, j * o.cols + l, a * b);
                        }
                    }
                }
            }
        }
        m
    }

    pub fn select_cols(&self, idx: &[usize]) -> DMat {
        let mut m = DMat::zeros(self.rows, idx.len());
        for (jj, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                m.set(i, jj, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> DMat {
        let mut m = DMat::zeros(idx.len(), self.cols);
        for (ii, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                m.set(ii, j, self.get(i, j).clone());
            }
        }
        m
    }

    /// Drops zero columns and repeated columns.
    pub fn dedup_cols(&self) -> DMat {
        let mut seen = std::collections::HashSet::new();
        let keep: Vec<usize> = (0..self.cols)
            .filter(|&j| {
                let c = self.col(j);
                !c.iter().all(Zero::is_zero) && seen.insert(c)
            })
            .collect();
        self.select_cols(&keep)
    }

    pub fn to_sparse(&self) -> IntMatrix {
        IntMatrix::from_dense(self)
    }

    fn to_work<T: Entry>(&self) -> Checked<Vec<Vec<T>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(T::from_big).collect())
            .collect()
    }
}

// ---------------------------------------------------------------------------
// dense Smith diagonalization

/// `u * a * v = d` with `d` diagonal (nonnegative, nonzero entries first).
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diag: Vec<BigInt>,
    pub u: Option<DMat>,
    pub v: Option<DMat>,
    pub rows: usize,
    pub cols: usize,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }
}

struct DenseWork<T> {
    a: Vec<Vec<T>>,
    u: Option<Vec<Vec<T>>>,
    v: Option<Vec<Vec<T>>>,
    rows: usize,
    cols: usize,
}

impl<T: Entry> DenseWork<T> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        if let Some(u) = &mut self.u {
            u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in &mut self.a {
            r.swap(i, j);
        }
        if let Some(v) = &mut self.v {
            for r in v {
                r.swap(i, j);
            }
        }
    }

    /// row_i -= q * row_t
    fn row_op(&mut self, i: usize, t: usize, q: &T, from: usize) -> Checked<()> {
        for j in from..self.cols {
            if !self.a[t][j].is_nil() {
                let x = self.a[t][j].mul(q)?;
                self.a[i][j] = self.a[i][j].sub(&x)?;
            }
        }
        if let Some(u) = &mut self.u {
            for j in 0..self.rows {
                if !u[t][j].is_nil() {
                    let x = u[t][j].mul(q)?;
                    u[i][j] = u[i][j].sub(&x)?;
                }
            }
        }
        Ok(())
    }

    /// col_j -= q * col_t
    fn col_op(&mut self, j: usize, t: usize, q: &T, from: usize) -> Checked<()> {
        for i in from..self.rows {
            if !self.a[i][t].is_nil() {
                let x = self.a[i][t].mul(q)?;
                self.a[i][j] = self.a[i][j].sub(&x)?;
            }
        }
        if let Some(v) = &mut self.v {
            for row in v.iter_mut() {
                if !row[t].is_nil() {
                    let x = row[t].mul(q)?;
                    row[j] = row[j].sub(&x)?;
                }
            }
        }
        Ok(())
    }

    fn negate_row(&mut self, t: usize) -> Checked<()> {
        for j in 0..self.cols {
            self.a[t][j] = self.a[t][j].neg()?;
        }
        if let Some(u) = &mut self.u {
            for j in 0..self.rows {
                u[t][j] = u[t][j].neg()?;
            }
        }
        Ok(())
    }

    fn run(&mut self) -> Checked<Vec<T>> {
        let mut diag = Vec::new();
        let n = self.rows.min(self.cols);
        for t in 0..n {
            // pivot: smallest nonzero magnitude in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..self.rows {
                for j in t..self.cols {
                    let x = &self.a[i][j];
                    if x.is_nil() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| x.cmp_abs(&self.a[bi][bj]) == Ordering::Less) {
                        best = Some((i, j));
                        if x.is_unit() {
                            break;
                        }
                    }
                }
                if best.is_some_and(|(bi, bj)| self.a[bi][bj].is_unit()) {
                    break;
                }
            }
            let Some((pi, pj)) = best else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut again = false;
                for i in t + 1..self.rows {
                    if self.a[i][t].is_nil() {
                        continue;
                    }
                    let q = self.a[i][t].quot(&self.a[t][t]);
                    self.row_op(i, t, &q, t)?;
                    if !self.a[i][t].is_nil() {
                        again = true;
                    }
                }
                for j in t + 1..self.cols {
                    if self.a[t][j].is_nil() {
                        continue;
                    }
                    let q = self.a[t][j].quot(&self.a[t][t]);
                    self.col_op(j, t, &q, t)?;
                    if !self.a[t][j].is_nil() {
                        again = true;
                    }
                }
                if !again {
                    break;
                }
                // move the smallest remainder in row/column t to the pivot
                let mut bi = t;
                let mut bj = t;
                for i in t + 1..self.rows {
                    if !self.a[i][t].is_nil()
                        && self.a[i][t].cmp_abs(&self.a[bi][bj]) == Ordering::Less
                    {
                        (bi, bj) = (i, t);
                    }
                }
                for j in t + 1..self.cols {
                    if !self.a[t][j].is_nil()
                        && self.a[t][j].cmp_abs(&self.a[bi][bj]) == Ordering::Less
                    {
                        (bi, bj) = (t, j);
                    }
                }
                self.swap_rows(t, bi);
                self.swap_cols(t, bj);
            }
            if self.a[t][t].is_neg() {
                self.negate_row(t)?;
            }
            diag.push(self.a[t][t].clone());
        }
        Ok(diag)
    }
}

fn identity_work<T: Entry>(n: usize) -> Vec<Vec<T>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { T::from_i64(1) } else { T::nil() })
                .collect()
        })
        .collect()
}

fn work_to_dmat<T: Entry>(w: &[Vec<T>], rows: usize, cols: usize) -> DMat {
    let mut m = DMat::zeros(rows, cols);
    for (i, r) in w.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            if !v.is_nil() {
                m.set(i, j, v.to_big());
            }
        }
    }
    m
}

fn dense_smith_in<T: Entry>(a: &DMat, transforms: bool) -> Checked<SmithForm> {
    let (rows, cols) = (a.rows(), a.cols());
    let mut w = DenseWork {
        a: a.to_work::<T>()?,
        u: transforms.then(|| identity_work(rows)),
        v: transforms.then(|| identity_work(cols)),
        rows,
        cols,
    };
    let diag = w.run()?;
    Ok(SmithForm {
        diag: diag.iter().map(Entry::to_big).collect(),
        u: w.u.as_ref().map(|u| work_to_dmat(u, rows, rows)),
        v: w.v.as_ref().map(|v| work_to_dmat(v, cols, cols)),
        rows,
        cols,
    })
}

/// Diagonalizes `a` by unimodular row and column operations. The diagonal is
/// not normalized to divisibility; see [`invariant_factors`].
pub fn smith_with_transforms(a: &DMat) -> SmithForm {
    dense_smith_in::<i64>(a, true)
        .or_else(|_| dense_smith_in::<BigInt>(a, true))
        .expect("BigInt arithmetic cannot overflow")
}

pub fn smith_diagonal(a: &DMat) -> Vec<BigInt> {
    dense_smith_in::<i64>(a, false)
        .or_else(|_| dense_smith_in::<BigInt>(a, false))
        .expect("BigInt arithmetic cannot overflow")
        .diag
}

/// Normalizes a diagonal into invariant factors `d_1 | d_2 | ...` (zeros dropped).
pub fn invariant_factors(diag: &[BigInt]) -> Vec<BigInt> {
    let mut d: Vec<BigInt> = diag
        .iter()
        .filter(|x| !Zero::is_zero(*x))
        .map(|x| x.abs())
        .collect();
    // units are already in final position; only the others need gcd/lcm passes
    let units = d.iter().filter(|x| x.is_one()).count();
    let mut rest: Vec<BigInt> = d.drain(..).filter(|x| !x.is_one()).collect();
    for i in 0..rest.len() {
        for j in i + 1..rest.len() {
            let g = rest[i].gcd(&rest[j]);
            let l = rest[i].lcm(&rest[j]);
            rest[i] = g;
            rest[j] = l;
        }
    }
    let mut out = vec![BigInt::one(); units];
    out.extend(rest);
    out
}

// ---------------------------------------------------------------------------
// sparse elimination

/// Result of the sparse elimination.
struct Eliminated<T> {
    unit_rank: usize,
    /// columns that did not receive a pivot, restricted to rows without a pivot
    rest_cols: Vec<usize>,
    rest_rows: Vec<u32>,
    cols: Vec<Vec<(u32, T)>>,
    recipes: Option<Vec<Vec<(u32, T)>>>,
}

fn col_get<T: Entry>(c: &[(u32, T)], r: u32) -> Option<&T> {
    c.binary_search_by_key(&r, |e| e.0).ok().map(|k| &c[k].1)
}

/// `dst -= q * src` on sorted sparse vectors.
fn axpy<T: Entry>(dst: &[(u32, T)], src: &[(u32, T)], q: &T) -> Checked<Vec<(u32, T)>> {
    let mut out = Vec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        let take_dst = j >= src.len() || (i < dst.len() && dst[i].0 < src[j].0);
        let take_src = i >= dst.len() || (j < src.len() && src[j].0 < dst[i].0);
        if take_dst {
            out.push(dst[i].clone());
            i += 1;
        } else if take_src {
            out.push((src[j].0, src[j].1.mul(q)?.neg()?));
            j += 1;
        } else {
            let v = dst[i].1.sub(&src[j].1.mul(q)?)?;
            if !v.is_nil() {
                out.push((dst[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Ok(out)
}

fn sparse_eliminate<T: Entry>(
    rows: usize,
    mut cols: Vec<Vec<(u32, T)>>,
    track: bool,
) -> Checked<Eliminated<T>> {
    let ncols = cols.len();
    let mut recipes: Option<Vec<Vec<(u32, T)>>> =
        track.then(|| (0..ncols).map(|j| vec![(j as u32, T::from_i64(1))]).collect());
    let mut row_cols: Vec<Vec<u32>> = vec![Vec::new(); rows];
    for (j, c) in cols.iter().enumerate() {
        for (r, _) in c {
            row_cols[*r as usize].push(j as u32);
        }
    }
    let mut done = vec![false; ncols];
    let mut row_used = vec![false; rows];
    let mut heap: BinaryHeap<Reverse<(usize, u32)>> = cols
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_empty())
        .map(|(j, c)| Reverse((c.len(), j as u32)))
        .collect();
    let mut unit_rank = 0;
    while let Some(Reverse((len, j))) = heap.pop() {
        let ju = j as usize;
        if done[ju] || cols[ju].len() != len || cols[ju].is_empty() {
            continue;
        }
        // unit entry in the row with the fewest live columns
        let pivot = cols[ju]
            .iter()
            .filter(|(_, v)| v.is_unit())
            .min_by_key(|(r, _)| (row_cols[*r as usize].len(), *r))
            .map(|(r, v)| (*r, v.clone()));
        let Some((r, pv)) = pivot else { continue };
        done[ju] = true;
        row_used[r as usize] = true;
        unit_rank += 1;
        let targets = std::mem::take(&mut row_cols[r as usize]);
        let src = cols[ju].clone();
        let src_recipe = recipes.as_ref().map(|rc| rc[ju].clone());
        for &k in &targets {
            let ku = k as usize;
            if done[ku] {
                continue;
            }
            let Some(x) = col_get(&cols[ku], r) else { continue };
            // pivot is +-1, so x / pv = x * pv
            let q = x.mul(&pv)?;
            let new = axpy(&cols[ku], &src, &q)?;
            for (nr, _) in &new {
                if col_get(&cols[ku], *nr).is_none() {
                    row_cols[*nr as usize].push(k);
                }
            }
            cols[ku] = new;
            if let (Some(rc), Some(sr)) = (recipes.as_mut(), src_recipe.as_ref()) {
                rc[ku] = axpy(&rc[ku], sr, &q)?;
            }
            if !cols[ku].is_empty() {
                heap.push(Reverse((cols[ku].len(), k)));
            }
        }
    }
    let rest_cols: Vec<usize> = (0..ncols).filter(|&j| !done[j]).collect();
    let rest_rows: Vec<u32> = (0..rows as u32).filter(|&r| !row_used[r as usize]).collect();
    Ok(Eliminated {
        unit_rank,
        rest_cols,
        rest_rows,
        cols,
        recipes,
    })
}

impl<T: Entry> Eliminated<T> {
    /// The block left after unit pivoting, with only its nonzero rows kept.
    fn remainder(&self) -> (DMat, Vec<usize>) {
        let mut row_index = vec![usize::MAX; self.rest_rows.iter().map(|&r| r as usize + 1).max().unwrap_or(0)];
        let live: Vec<u32> = {
            let mut s: Vec<u32> = self
                .rest_cols
                .iter()
                .flat_map(|&j| self.cols[j].iter().map(|(r, _)| *r))
                .collect();
            s.sort_unstable();
            s.dedup();
            s
        };
        for (k, &r) in live.iter().enumerate() {
            row_index[r as usize] = k;
        }
        let mut d = DMat::zeros(live.len(), self.rest_cols.len());
        for (jj, &j) in self.rest_cols.iter().enumerate() {
            for (r, v) in &self.cols[j] {
                d.set(row_index[*r as usize], jj, v.to_big());
            }
        }
        (d, live.iter().map(|&r| r as usize).collect())
    }
}

/// Summary of a Smith normal form computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithSummary {
    pub rank: usize,
    /// Invariant factors, including the units.
    pub factors: Vec<BigInt>,
}

impl SmithSummary {
    pub fn torsion(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    /// Product of the nonzero invariant factors.
    pub fn det(&self) -> BigInt {
        self.factors.iter().product()
    }
}

fn smith_sparse_in<T: Entry>(a: &IntMatrix) -> Checked<SmithSummary> {
    let el = sparse_eliminate::<T>(a.nrows(), a.to_work()?, false)?;
    let (rem, _) = el.remainder();
    let diag = dense_smith_in::<T>(&rem, false)?.diag;
    let mut all: Vec<BigInt> = vec![BigInt::one(); el.unit_rank];
    all.extend(diag.iter().map(Entry::to_big));
    let factors = invariant_factors(&all);
    Ok(SmithSummary {
        rank: factors.len(),
        factors,
    })
}

/// Invariant factors of a sparse matrix.
pub fn smith_normal_form(a: &IntMatrix) -> SmithSummary {
    smith_sparse_in::<i64>(a)
        .or_else(|_| smith_sparse_in::<BigInt>(a))
        .expect("BigInt arithmetic cannot overflow")
}

pub fn rank(a: &IntMatrix) -> usize {
    smith_normal_form(a).rank
}

fn kernel_in<T: Entry>(a: &IntMatrix) -> Checked<Vec<Vec<(usize, BigInt)>>> {
    let el = sparse_eliminate::<T>(a.nrows(), a.to_work()?, true)?;
    let (rem, _) = el.remainder();
    let sf = dense_smith_in::<T>(&rem, true)?;
    let v = sf.v.expect("transforms requested");
    let recipes = el.recipes.as_ref().expect("recipes requested");
    let mut out = Vec::new();
    for k in sf.diag.len()..rem.cols() {
        // kernel vector of the remainder, pulled back through the recipes
        let mut acc: Vec<(usize, BigInt)> = Vec::new();
        for (jj, &j) in el.rest_cols.iter().enumerate() {
            let c = v.get(jj, k);
            if Zero::is_zero(c) {
                continue;
            }
            for (i, x) in &recipes[j] {
                acc.push((*i as usize, x.to_big() * c));
            }
        }
        out.push(normalize_column(acc));
    }
    Ok(out)
}

/// A basis of the integer kernel `{x : A x = 0}`, as columns of a sparse matrix.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let cols = kernel_in::<i64>(a)
        .or_else(|_| kernel_in::<BigInt>(a))
        .expect("BigInt arithmetic cannot overflow");
    IntMatrix {
        rows: a.ncols(),
        cols,
    }
}

/// Kernel basis of a dense matrix, as columns.
pub fn dense_kernel_basis(a: &DMat) -> DMat {
    let sf = smith_with_transforms(a);
    let v = sf.v.expect("transforms requested");
    let idx: Vec<usize> = (sf.diag.len()..a.cols()).collect();
    v.select_cols(&idx)
}

/// Solves `A x = b` over the integers, if possible.
pub fn solve_integer(a: &DMat, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let sf = smith_with_transforms(a);
    solve_with(&sf, b)
}

/// Solves `A x = b` given a precomputed diagonalization of `A`.
pub fn solve_with(sf: &SmithForm, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let u = sf.u.as_ref().expect("transforms required");
    let v = sf.v.as_ref().expect("transforms required");
    let ub = u.mul_vec(b);
    let mut y = vec![BigInt::zero(); sf.cols];
    for (i, d) in sf.diag.iter().enumerate() {
        let (q, r) = ub[i].div_rem(d);
        if !Zero::is_zero(&r) {
            return None;
        }
        y[i] = q;
    }
    if ub[sf.diag.len()..].iter().any(|x| !Zero::is_zero(x)) {
        return None;
    }
    Some(v.mul_vec(&y))
}

/// A basis (as columns) of the lattice spanned by the columns of `a`.
pub fn image_basis(a: &DMat) -> DMat {
    let sf = smith_with_transforms(a);
    let v = sf.v.expect("transforms requested");
    let idx: Vec<usize> = (0..sf.diag.len()).collect();
    a.mul(&v.select_cols(&idx))
}

/// Whether the column lattices of `a` and `b` coincide.
pub fn same_lattice(a: &IntMatrix, b: &IntMatrix) -> Result<bool> {
    if a.nrows() != b.nrows() {
        return Err(Error::Shape("lattices live in different ambient ranks".into()));
    }
    let both = a.hstack(b)?;
    let (sa, sb, s) = (
        smith_normal_form(a),
        smith_normal_form(b),
        smith_normal_form(&both),
    );
    Ok(sa.rank == s.rank && sb.rank == s.rank && sa.det() == s.det() && sb.det() == s.det())
}

/// Whether the column lattice of `sub` lies inside that of `sup`.
pub fn lattice_contains(sup: &IntMatrix, sub: &IntMatrix) -> Result<bool> {
    let both = sup.hstack(sub)?;
    let (s, sb) = (smith_normal_form(sup), smith_normal_form(&both));
    Ok(s.rank == sb.rank && s.det() == sb.det())
}

/// Rank over the rationals by fraction-free (Bareiss) elimination.
pub fn rational_rank(a: &DMat) -> usize {
    let mut m: Vec<Vec<BigInt>> = (0..a.rows()).map(|i| a.row(i).to_vec()).collect();
    let (rows, cols) = (a.rows(), a.cols());
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !Zero::is_zero(&m[i][c])) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

// ---------------------------------------------------------------------------
// homology

/// A finitely generated abelian group `Z^free_rank + sum Z/t_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn zero() -> Self {
        HomologyGroup {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        HomologyGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Cokernel of a presentation matrix whose columns are relations.
    pub fn cokernel_of(gens: usize, relations: &IntMatrix) -> Self {
        let s = smith_normal_form(relations);
        HomologyGroup {
            free_rank: gens - s.rank,
            torsion: s.torsion(),
        }
    }

    pub fn torsion_string(&self) -> String {
        let t: Vec<String> = self.torsion.iter().map(|x| x.to_string()).collect();
        t.join(";")
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.free_rank)
            });
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `ker(d_out) / im(d_in)` for `C_2 --d_in--> C_1 --d_out--> C_0`.
pub fn chain_homology(d_out: &IntMatrix, d_in: &IntMatrix) -> Result<HomologyGroup> {
    if d_out.ncols() != d_in.nrows() {
        return Err(Error::DimensionMismatch {
            expected: d_out.ncols(),
            got: d_in.nrows(),
        });
    }
    let comp = d_out.mul(d_in)?;
    if let Some((row, col)) = comp.first_nonzero() {
        return Err(Error::NonzeroComposite { row, col });
    }
    let dim = d_out.ncols();
    let r_out = rank(d_out);
    let s_in = smith_normal_form(d_in);
    // C_1 / ker(d_out) is free, so the torsion of coker(d_in) is that of the homology
    Ok(HomologyGroup {
        free_rank: dim - r_out - s_in.rank,
        torsion: s_in.torsion(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn dense(rows: &[Vec<i64>]) -> DMat {
        DMat::from_rows(rows)
    }

    #[test]
    fn snf_examples() {
        assert_eq!(smith_normal_form(&IntMatrix::identity(4)).factors, big(&[1, 1, 1, 1]));
        assert!(smith_normal_form(&IntMatrix::zeros(3, 5)).factors.is_empty());
        assert!(smith_normal_form(&IntMatrix::zeros(0, 0)).factors.is_empty());
        let d = dense(&[vec![2, 0], vec![0, 3]]).to_sparse();
        assert_eq!(smith_normal_form(&d).factors, big(&[1, 6]));
        let m = dense(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]).to_sparse();
        assert_eq!(smith_normal_form(&m).factors, big(&[2, 6, 12]));
    }

    #[test]
    fn chain_homology_examples() {
        let h = chain_homology(&IntMatrix::zeros(0, 3), &IntMatrix::zeros(3, 0)).unwrap();
        assert_eq!(h, HomologyGroup::free(3));
        let two = IntMatrix::from_triplets(1, 1, [(0, 0, 2)]).unwrap();
        let h = chain_homology(&IntMatrix::zeros(0, 1), &two).unwrap();
        assert_eq!(h.torsion, big(&[2]));
        assert_eq!(h.free_rank, 0);
        let one = IntMatrix::identity(1);
        assert!(matches!(
            chain_homology(&one, &one),
            Err(Error::NonzeroComposite { row: 0, col: 0 })
        ));
        assert!(matches!(
            chain_homology(&IntMatrix::zeros(1, 2), &one),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dump_round_trip() {
        let m = dense(&[vec![0, -7, 0], vec![12345678901234, 0, 1]]).to_sparse();
        let text = m.dump();
        assert!(text.starts_with("2 3 3\n"));
        assert_eq!(IntMatrix::parse(&text).unwrap(), m);
        assert!(IntMatrix::parse("2 2 1\n").is_err());
        assert!(IntMatrix::parse("2 2 1\n5 0 1\n").is_err());
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let huge = 1i64 << 40;
        let m = dense(&[vec![huge, huge + 1], vec![huge - 1, huge]]);
        // det = huge^2 - (huge^2 - 1) = 1
        assert_eq!(smith_normal_form(&m.to_sparse()).factors, big(&[1, 1]));
        let k = dense(&[vec![huge * 3, huge * 5]]);
        let ker = kernel_basis(&k.to_sparse());
        assert_eq!(ker.ncols(), 1);
        assert!(k.to_sparse().mul(&ker).unwrap().is_zero());
    }

    #[test]
    fn kernel_and_solve() {
        let a = dense(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        let k = kernel_basis(&a.to_sparse());
        assert_eq!(k.ncols(), 1);
        assert!(a.to_sparse().mul(&k).unwrap().is_zero());
        let x = solve_integer(&a, &big(&[3, 6, 1])).unwrap();
        assert_eq!(a.mul_vec(&x), big(&[3, 6, 1]));
        let two = dense(&[vec![2]]);
        assert!(solve_integer(&two, &big(&[3])).is_none());
        let img = image_basis(&dense(&[vec![2, 4], vec![0, 0]]));
        assert_eq!(img.cols(), 1);
    }

    #[test]
    fn lattice_comparisons() {
        let a = dense(&[vec![2, 0], vec![0, 1]]).to_sparse();
        let b = dense(&[vec![2, 2], vec![1, 0]]).to_sparse();
        assert!(same_lattice(&a, &b).unwrap());
        let c = dense(&[vec![4, 0], vec![0, 1]]).to_sparse();
        assert!(!same_lattice(&a, &c).unwrap());
        assert!(lattice_contains(&a, &c).unwrap());
        assert!(!lattice_contains(&c, &a).unwrap());
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMat {
        let data: Vec<Vec<i64>> = (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| if rng.gen_bool(0.4) { rng.gen_range(-3..=3) } else { 0 })
                    .collect()
            })
            .collect();
        DMat::from_rows(&data)
    }

    #[test]
    fn permutation_invariance_and_rank_cross_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let (r, c) = (rng.gen_range(1..9), rng.gen_range(1..9));
            let a = random_matrix(&mut rng, r, c);
            let f = smith_normal_form(&a.to_sparse());
            let mut ri: Vec<usize> = (0..r).collect();
            let mut ci: Vec<usize> = (0..c).collect();
            ri.shuffle(&mut rng);
            ci.shuffle(&mut rng);
            let p = a.select_rows(&ri).select_cols(&ci);
            assert_eq!(smith_normal_form(&p.to_sparse()), f);
            assert_eq!(invariant_factors(&smith_diagonal(&a)), f.factors);
            assert_eq!(rational_rank(&a), f.rank);
            let sf = smith_with_transforms(&a);
            let d = sf.u.as_ref().unwrap().mul(&a).mul(sf.v.as_ref().unwrap());
            for i in 0..r {
                for j in 0..c {
                    let expect = if i == j && i < sf.diag.len() {
                        sf.diag[i].clone()
                    } else {
                        BigInt::zero()
                    };
                    assert_eq!(d.get(i, j), &expect);
                }
            }
        }
    }

    #[test]
    fn homology_invariant_under_basis_change() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // C_2 = Z^3 -> C_1 = Z^4 -> C_0 = Z^2 with d_out d_in = 0
        let d_in = dense(&[vec![2, 0, 0], vec![0, 0, 0], vec![0, 3, 0], vec![0, 0, 0]]);
        let d_out = dense(&[vec![0, 1, 0, 0], vec![0, 0, 0, 0]]);
        let h = chain_homology(&d_out.to_sparse(), &d_in.to_sparse()).unwrap();
        assert_eq!(h, HomologyGroup { free_rank: 1, torsion: big(&[6]) });
        for _ in 0..20 {
            // random unimodular P as a product of elementary operations
            let mut p = DMat::identity(4);
            let mut pinv = DMat::identity(4);
            for _ in 0..6 {
                let (i, j) = (rng.gen_range(0..4), rng.gen_range(0..4));
                if i == j {
                    continue;
                }
                let q: i64 = rng.gen_range(-2..=2);
                let mut e = DMat::identity(4);
                e.set(i, j, BigInt::from(q));
                let mut einv = DMat::identity(4);
                einv.set(i, j, BigInt::from(-q));
                p = e.mul(&p);
                pinv = pinv.mul(&einv);
            }
            let h2 = chain_homology(
                &d_out.mul(&pinv).to_sparse(),
                &p.mul(&d_in).to_sparse(),
            )
            .unwrap();
            assert_eq!(h2, h);
        }
    }

    #[test]
    fn sparse_kernel_on_larger_random_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 25, 40).to_sparse();
            let k = kernel_basis(&a);
            assert!(a.mul(&k).unwrap().is_zero());
            assert_eq!(k.ncols(), 40 - rank(&a));
            // saturated: the kernel lattice has no torsion in its cokernel
            let s = smith_normal_form(&k);
            assert!(s.factors.iter().all(One::is_one));
        }
    }

    proptest! {
        #[test]
        fn snf_factors_divide(rows in prop::collection::vec(prop::collection::vec(-6i64..6, 4), 1..5)) {
            let m = DMat::from_rows(&rows);
            let f = smith_normal_form(&m.to_sparse()).factors;
            for w in f.windows(2) {
                prop_assert!(Zero::is_zero(&(&w[1] % &w[0])));
            }
            prop_assert_eq!(f.len(), rational_rank(&m));
        }
    }
}
