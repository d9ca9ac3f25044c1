use std::fmt;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::IndexSpace;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, PowerIteration};

/// Dense norms are refused above this dimension.
pub const DENSE_NORM_HARD_LIMIT: usize = 20_000;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// How operator norms are computed.
#[derive(Debug, Clone, Copy)]
pub struct NormOptions {
    /// Dimensions up to this use a dense decomposition, larger ones power iteration.
    pub dense_limit: usize,
    pub power: PowerIteration,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions {
            dense_limit: 2_048,
            power: PowerIteration::default(),
        }
    }
}

/// Sparse operator with `k × k` complex blocks, stored row-compressed.
#[derive(Clone)]
pub struct BlockOperator {
    space: IndexSpace,
    k: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    /// `k²` row-major entries per stored block.
    vals: Vec<Complex64>,
    propagation: OnceLock<u64>,
    rank: OnceLock<usize>,
}

impl fmt::Debug for BlockOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlockOperator")
            .field("space", &self.space)
            .field("fiber", &self.k)
            .field("blocks", &self.cols.len())
            .finish()
    }
}

fn block_mul_add(acc: &mut [Complex64], a: &[Complex64], b: &[Complex64], k: usize) {
    if k == 1 {
        acc[0] += a[0] * b[0];
        return;
    }
    for i in 0..k {
        for l in 0..k {
            let ail = a[i * k + l];
            if ail == ZERO {
                continue;
            }
            for j in 0..k {
                acc[i * k + j] += ail * b[l * k + j];
            }
        }
    }
}

impl BlockOperator {
    fn from_csr(space: IndexSpace, k: usize, row_ptr: Vec<usize>, cols: Vec<usize>, vals: Vec<Complex64>) -> Self {
        debug_assert_eq!(row_ptr.len(), space.len() + 1);
        debug_assert_eq!(vals.len(), cols.len() * k * k);
        BlockOperator {
            space,
            k,
            row_ptr,
            cols,
            vals,
            propagation: OnceLock::new(),
            rank: OnceLock::new(),
        }
    }

    fn from_rows(space: IndexSpace, k: usize, rows: Vec<(Vec<usize>, Vec<Complex64>)>) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        row_ptr.push(0);
        let nnz: usize = rows.iter().map(|r| r.0.len()).sum();
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz * k * k);
        for (c, v) in rows {
            cols.extend(c);
            vals.extend(v);
            row_ptr.push(cols.len());
        }
        Self::from_csr(space, k, row_ptr, cols, vals)
    }

    /// Builds from `(x, y, block)` triplets; repeated pairs are summed and
    /// all-zero blocks dropped.
    pub fn from_triplets(space: IndexSpace, k: usize, triplets: impl IntoIterator<Item = (usize, usize, Vec<Complex64>)>) -> Self {
        let kk = k * k;
        let mut t: Vec<_> = triplets.into_iter().collect();
        t.sort_by_key(|(x, y, _)| (*x, *y));
        let n = space.len();
        let mut rows: Vec<(Vec<usize>, Vec<Complex64>)> = vec![(Vec::new(), Vec::new()); n];
        let mut i = 0;
        while i < t.len() {
            let (x, y) = (t[i].0, t[i].1);
            assert!(x < n && y < n, "index ({x}, {y}) out of range {n}");
            assert_eq!(t[i].2.len(), kk, "block must have {kk} entries");
            let mut block = t[i].2.clone();
            i += 1;
            while i < t.len() && t[i].0 == x && t[i].1 == y {
                block.iter_mut().zip(&t[i].2).for_each(|(a, b)| *a += b);
                i += 1;
            }
            if block.iter().any(|z| *z != ZERO) {
                rows[x].0.push(y);
                rows[x].1.extend(block);
            }
        }
        Self::from_rows(space, k, rows)
    }

    /// Scalar (`k = 1`) operator from `(x, y, value)` triplets.
    pub fn from_scalars(space: IndexSpace, entries: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        Self::from_triplets(space, 1, entries.into_iter().map(|(x, y, v)| (x, y, vec![v])))
    }

    /// Keeps every block with a nonzero entry.
    pub fn from_dense(space: IndexSpace, k: usize, m: &CMatrix) -> Self {
        let n = space.len();
        assert_eq!(m.nrows(), n * k);
        assert_eq!(m.ncols(), n * k);
        let rows = (0..n)
            .into_par_iter()
            .map(|x| {
                let mut cols = Vec::new();
                let mut vals = Vec::new();
                for y in 0..n {
                    let nonzero = (0..k).any(|i| (0..k).any(|j| m[(x * k + i, y * k + j)] != ZERO));
                    if nonzero {
                        cols.push(y);
                        for i in 0..k {
                            for j in 0..k {
                                vals.push(m[(x * k + i, y * k + j)]);
                            }
                        }
                    }
                }
                (cols, vals)
            })
            .collect();
        Self::from_rows(space, k, rows)
    }

    pub fn zero(space: IndexSpace, k: usize) -> Self {
        let n = space.len();
        Self::from_csr(space, k, vec![0; n + 1], Vec::new(), Vec::new())
    }

    pub fn identity(space: IndexSpace, k: usize) -> Self {
        Self::diagonal(space, k, |_| ONE)
    }

    /// `f(x) · 1_k` on the diagonal.
    pub fn diagonal(space: IndexSpace, k: usize, f: impl Fn(usize) -> Complex64) -> Self {
        let n = space.len();
        let triplets = (0..n).map(|x| {
            let mut b = vec![ZERO; k * k];
            let v = f(x);
            (0..k).for_each(|i| b[i * k + i] = v);
            (x, x, b)
        });
        Self::from_triplets(space, k, triplets)
    }

    pub fn space(&self) -> &IndexSpace {
        &self.space
    }

    pub fn fiber_dim(&self) -> usize {
        self.k
    }

    /// Total dimension `|X| · k`.
    pub fn dim(&self) -> usize {
        self.space.len() * self.k
    }

    pub fn nnz_blocks(&self) -> usize {
        self.cols.len()
    }

    /// Stored blocks of row `x` as `(column, block)`.
    pub fn row(&self, x: usize) -> impl Iterator<Item = (usize, &[Complex64])> + '_ {
        let kk = self.k * self.k;
        (self.row_ptr[x]..self.row_ptr[x + 1]).map(move |p| (self.cols[p], &self.vals[p * kk..(p + 1) * kk]))
    }

    /// All stored blocks as `(x, y, block)`.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize, &[Complex64])> + '_ {
        (0..self.space.len()).flat_map(move |x| self.row(x).map(move |(y, b)| (x, y, b)))
    }

    pub fn get(&self, x: usize, y: usize) -> Option<&[Complex64]> {
        let kk = self.k * self.k;
        let range = self.row_ptr[x]..self.row_ptr[x + 1];
        self.cols[range.clone()]
            .binary_search(&y)
            .ok()
            .map(|i| &self.vals[(range.start + i) * kk..(range.start + i + 1) * kk])
    }

    /// Scalar entry `(x·k + i, y·k + j)`.
    pub fn entry(&self, x: usize, y: usize, i: usize, j: usize) -> Complex64 {
        self.get(x, y).map_or(ZERO, |b| b[i * self.k + j])
    }

    /// Operator norm of the block `T_{x,y}`.
    pub fn block_norm(&self, x: usize, y: usize) -> f64 {
        match self.get(x, y) {
            None => 0.0,
            Some(b) if self.k == 1 => b[0].norm(),
            Some(b) => linalg::spectral_norm(&CMatrix::from_row_slice(self.k, self.k, b)),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::IndexSpaceMismatch {
                left: format!("{}[{}]", self.space.id(), self.space.len()),
                right: format!("{}[{}]", other.space.id(), other.space.len()),
            });
        }
        if self.k != other.k {
            return Err(Error::FiberMismatch {
                left: self.k,
                right: other.k,
            });
        }
        Ok(())
    }

    fn combine(&self, other: &Self, alpha: Complex64, beta: Complex64) -> Result<Self> {
        self.check_compatible(other)?;
        let kk = self.k * self.k;
        let rows = (0..self.space.len())
            .into_par_iter()
            .map(|x| {
                let (a, b) = (
                    (self.row_ptr[x]..self.row_ptr[x + 1]).collect::<Vec<_>>(),
                    (other.row_ptr[x]..other.row_ptr[x + 1]).collect::<Vec<_>>(),
                );
                let (mut i, mut j) = (0, 0);
                let mut cols = Vec::with_capacity(a.len() + b.len());
                let mut vals = Vec::with_capacity((a.len() + b.len()) * kk);
                let mut push = |c: usize, block: Vec<Complex64>| {
                    if block.iter().any(|z| *z != ZERO) {
                        cols.push(c);
                        vals.extend(block);
                    }
                };
                while i < a.len() || j < b.len() {
                    let ca = a.get(i).map(|&p| self.cols[p]);
                    let cb = b.get(j).map(|&p| other.cols[p]);
                    match (ca, cb) {
                        (Some(u), Some(v)) if u == v => {
                            let (p, q) = (a[i], b[j]);
                            let block = (0..kk).map(|t| alpha * self.vals[p * kk + t] + beta * other.vals[q * kk + t]).collect();
                            push(u, block);
                            i += 1;
                            j += 1;
                        }
                        (Some(u), v) if v.is_none_or(|v| u < v) => {
                            let p = a[i];
                            push(u, self.vals[p * kk..(p + 1) * kk].iter().map(|z| alpha * z).collect());
                            i += 1;
                        }
                        (_, Some(v)) => {
                            let q = b[j];
                            push(v, other.vals[q * kk..(q + 1) * kk].iter().map(|z| beta * z).collect());
                            j += 1;
                        }
                        _ => unreachable!(),
                    }
                }
                (cols, vals)
            })
            .collect();
        Ok(Self::from_rows(self.space.clone(), self.k, rows))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, ONE, ONE)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, ONE, -ONE)
    }

    /// `alpha·self + beta·other`.
    pub fn linear_combination(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Result<Self> {
        self.combine(other, alpha, beta)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        if s == ZERO {
            return Self::zero(self.space.clone(), self.k);
        }
        let out = Self::from_csr(
            self.space.clone(),
            self.k,
            self.row_ptr.clone(),
            self.cols.clone(),
            self.vals.iter().map(|z| z * s).collect(),
        );
        if let Some(&p) = self.propagation.get() {
            let _ = out.propagation.set(p);
        }
        if let Some(&r) = self.rank.get() {
            let _ = out.rank.set(r);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let n = self.space.len();
        let k = self.k;
        let kk = k * k;
        let rows = (0..n)
            .into_par_iter()
            .map_init(
                || vec![usize::MAX; n],
                |slot, x| {
                    let mut cols: Vec<usize> = Vec::new();
                    let mut acc: Vec<Complex64> = Vec::new();
                    for p in self.row_ptr[x]..self.row_ptr[x + 1] {
                        let y = self.cols[p];
                        let a = &self.vals[p * kk..(p + 1) * kk];
                        for q in other.row_ptr[y]..other.row_ptr[y + 1] {
                            let z = other.cols[q];
                            if slot[z] == usize::MAX {
                                slot[z] = cols.len();
                                cols.push(z);
                                acc.extend(std::iter::repeat_n(ZERO, kk));
                            }
                            let s = slot[z];
                            block_mul_add(&mut acc[s * kk..(s + 1) * kk], a, &other.vals[q * kk..(q + 1) * kk], k);
                        }
                    }
                    let mut order: Vec<usize> = (0..cols.len()).collect();
                    order.sort_by_key(|&i| cols[i]);
                    let mut out_cols = Vec::with_capacity(cols.len());
                    let mut out_vals = Vec::with_capacity(acc.len());
                    for i in order {
                        slot[cols[i]] = usize::MAX;
                        let b = &acc[i * kk..(i + 1) * kk];
                        if b.iter().any(|z| *z != ZERO) {
                            out_cols.push(cols[i]);
                            out_vals.extend_from_slice(b);
                        }
                    }
                    (out_cols, out_vals)
                },
            )
            .collect();
        Ok(Self::from_rows(self.space.clone(), k, rows))
    }

    /// `(T*)_{x,y} = (T_{y,x})*`.
    pub fn adjoint(&self) -> Self {
        let k = self.k;
        let triplets = self.blocks().map(|(x, y, b)| {
            let mut t = vec![ZERO; k * k];
            for i in 0..k {
                for j in 0..k {
                    t[j * k + i] = b[i * k + j].conj();
                }
            }
            (y, x, t)
        });
        Self::from_triplets(self.space.clone(), k, triplets.collect::<Vec<_>>())
    }

    /// Largest entrywise difference `max |T_{xy,ij} - S_{xy,ij}|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let d = self.sub(other)?;
        Ok(d.vals.iter().fold(0.0, |m, z| m.max(z.norm())))
    }

    /// Largest stored entry in modulus.
    pub fn max_abs_entry(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()).is_ok_and(|d| d <= tol)
    }

    /// `max d(x, y)` over stored blocks.
    pub fn propagation(&self) -> u64 {
        *self.propagation.get_or_init(|| {
            (0..self.space.len())
                .into_par_iter()
                .map(|x| {
                    let cols = &self.cols[self.row_ptr[x]..self.row_ptr[x + 1]];
                    if cols.is_empty() {
                        return 0;
                    }
                    self.space.distances_from(x, cols).into_iter().max().unwrap_or(0)
                })
                .max()
                .unwrap_or(0)
        })
    }

    /// Largest numerical rank of a single block.
    pub fn uniform_rank(&self) -> usize {
        *self.rank.get_or_init(|| {
            if self.cols.is_empty() {
                return 0;
            }
            if self.k == 1 {
                return 1;
            }
            let kk = self.k * self.k;
            (0..self.cols.len())
                .into_par_iter()
                .map(|p| linalg::numerical_rank(&CMatrix::from_row_slice(self.k, self.k, &self.vals[p * kk..(p + 1) * kk]), 1e-12))
                .max()
                .unwrap_or(0)
        })
    }

    /// `Σ_x tr(T_{x,x})`.
    pub fn trace(&self) -> Complex64 {
        let k = self.k;
        (0..self.space.len())
            .filter_map(|x| self.get(x, x))
            .map(|b| (0..k).map(|i| b[i * k + i]).sum::<Complex64>())
            .sum()
    }

    pub fn to_dense(&self) -> CMatrix {
        let k = self.k;
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (x, y, b) in self.blocks() {
            for i in 0..k {
                for j in 0..k {
                    m[(x * k + i, y * k + j)] = b[i * k + j];
                }
            }
        }
        m
    }

    /// Dense `rows × cols` submatrix over the given points (fibers expanded).
    pub fn compress_dense(&self, rows: &[usize], cols: &[usize]) -> CMatrix {
        let k = self.k;
        let mut col_pos = vec![usize::MAX; self.space.len()];
        for (j, &y) in cols.iter().enumerate() {
            col_pos[y] = j;
        }
        let mut m = DMatrix::zeros(rows.len() * k, cols.len() * k);
        for (i, &x) in rows.iter().enumerate() {
            for (y, b) in self.row(x) {
                let j = col_pos[y];
                if j == usize::MAX {
                    continue;
                }
                for a in 0..k {
                    for c in 0..k {
                        m[(i * k + a, j * k + c)] = b[a * k + c];
                    }
                }
            }
        }
        m
    }

    /// `P T P` as an operator on `space`, where `points[i]` of `self`
    /// becomes point `i` of `space`.
    pub fn restrict(&self, points: &[usize], space: IndexSpace) -> Self {
        assert_eq!(points.len(), space.len());
        let mut pos = vec![usize::MAX; self.space.len()];
        for (i, &x) in points.iter().enumerate() {
            pos[x] = i;
        }
        let triplets: Vec<_> = points
            .iter()
            .enumerate()
            .flat_map(|(i, &x)| {
                let pos = &pos;
                self.row(x)
                    .filter(move |(y, _)| pos[*y] != usize::MAX)
                    .map(move |(y, b)| (i, pos[y], b.to_vec()))
            })
            .collect();
        Self::from_triplets(space, self.k, triplets)
    }

    /// `T ⊗ q` for a `k' × k'` matrix `q` on the fiber of a scalar operator.
    pub fn tensor_fiber(&self, q: &CMatrix) -> Self {
        assert_eq!(self.k, 1, "fiber tensoring needs a scalar operator");
        assert!(q.is_square());
        let k = q.nrows();
        let qv: Vec<Complex64> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).map(|(i, j)| q[(i, j)]).collect();
        let triplets: Vec<_> = self.blocks().map(|(x, y, b)| (x, y, qv.iter().map(|z| z * b[0]).collect())).collect();
        Self::from_triplets(self.space.clone(), k, triplets)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let k = self.k;
        let kk = k * k;
        assert_eq!(v.len(), self.dim());
        (0..self.space.len())
            .into_par_iter()
            .flat_map_iter(|x| {
                let mut out = vec![ZERO; k];
                for p in self.row_ptr[x]..self.row_ptr[x + 1] {
                    let y = self.cols[p];
                    let b = &self.vals[p * kk..(p + 1) * kk];
                    for i in 0..k {
                        for j in 0..k {
                            out[i] += b[i * k + j] * v[y * k + j];
                        }
                    }
                }
                out
            })
            .collect()
    }

    /// `T* v` without forming the adjoint.
    pub fn adjoint_matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let k = self.k;
        let kk = k * k;
        let mut out = vec![ZERO; self.dim()];
        for x in 0..self.space.len() {
            for p in self.row_ptr[x]..self.row_ptr[x + 1] {
                let y = self.cols[p];
                let b = &self.vals[p * kk..(p + 1) * kk];
                for i in 0..k {
                    for j in 0..k {
                        out[y * k + j] += b[i * k + j].conj() * v[x * k + i];
                    }
                }
            }
        }
        out
    }

    /// Operator norm with the default [`NormOptions`].
    pub fn operator_norm(&self) -> f64 {
        self.operator_norm_with(&NormOptions::default())
    }

    pub fn operator_norm_with(&self, opts: &NormOptions) -> f64 {
        if self.cols.is_empty() {
            return 0.0;
        }
        if self.dim() <= opts.dense_limit {
            return linalg::spectral_norm(&self.to_dense());
        }
        opts.power.norm(self.dim(), |v| self.adjoint_matvec(&self.matvec(v)))
    }

    /// Norm via a dense decomposition, regardless of size up to the hard limit.
    pub fn dense_operator_norm(&self) -> Result<f64> {
        if self.dim() > DENSE_NORM_HARD_LIMIT {
            return Err(Error::TooLargeForDenseNorm {
                dim: self.dim(),
                limit: DENSE_NORM_HARD_LIMIT,
            });
        }
        Ok(linalg::spectral_norm(&self.to_dense()))
    }

    /// Text dump: a header, then one `x y re im ...` row per stored block.
    pub fn to_dump(&self) -> String {
        let mut out = String::from("# coarse-lab operator v1\n");
        out.push_str(&format!("space {} {}\n", self.space.id(), self.space.len()));
        out.push_str(&format!("fiber {}\n", self.k));
        out.push_str(&format!("propagation {}\n", self.propagation()));
        for (x, y, b) in self.blocks() {
            out.push_str(&format!("{x} {y}"));
            for z in b {
                out.push_str(&format!(" {:?} {:?}", z.re, z.im));
            }
            out.push('\n');
        }
        out
    }

    /// Parses [`to_dump`](Self::to_dump) output onto a matching index space.
    pub fn from_dump(text: &str, space: IndexSpace) -> Result<Self> {
        let mut k = None;
        let mut triplets = Vec::new();
        let parse_err = |line: usize, message: String| Error::Parse { line, message };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = l.split_whitespace().collect();
            match parts[0] {
                "space" => {
                    let len: usize = parts
                        .get(2)
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| parse_err(line, "bad space header".into()))?;
                    if parts[1] != space.id() || len != space.len() {
                        return Err(Error::IndexSpaceMismatch {
                            left: format!("{}[{len}]", parts[1]),
                            right: format!("{}[{}]", space.id(), space.len()),
                        });
                    }
                }
                "fiber" => {
                    k = Some(
                        parts
                            .get(1)
                            .and_then(|s| s.parse::<usize>().ok())
                            .filter(|&k| k > 0)
                            .ok_or_else(|| parse_err(line, "bad fiber header".into()))?,
                    );
                }
                "propagation" => {}
                _ => {
                    let k = k.ok_or_else(|| parse_err(line, "block row before fiber header".into()))?;
                    if parts.len() != 2 + 2 * k * k {
                        return Err(parse_err(line, format!("expected {} fields", 2 + 2 * k * k)));
                    }
                    let idx = |s: &str| -> Result<usize> {
                        let v: usize = s.parse().map_err(|_| parse_err(line, format!("bad index `{s}`")))?;
                        if v >= space.len() {
                            return Err(parse_err(line, format!("index {v} out of range")));
                        }
                        Ok(v)
                    };
                    let (x, y) = (idx(parts[0])?, idx(parts[1])?);
                    let nums = parts[2..]
                        .iter()
                        .map(|s| s.parse::<f64>().map_err(|_| parse_err(line, format!("bad number `{s}`"))))
                        .collect::<Result<Vec<_>>>()?;
                    let block = nums.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
                    triplets.push((x, y, block));
                }
            }
        }
        let k = k.ok_or_else(|| parse_err(0, "missing fiber header".into()))?;
        Ok(Self::from_triplets(space, k, triplets))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{cycle_graph, Graph};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn adjacency(g: &Graph, space: &IndexSpace) -> BlockOperator {
        BlockOperator::from_scalars(space.clone(), g.edges().iter().flat_map(|&(u, v)| [(u, v, c(1.0)), (v, u, c(1.0))]))
    }

    pub(crate) fn random_prop1(space: &IndexSpace, g: &Graph, k: usize, rng: &mut ChaCha8Rng) -> BlockOperator {
        let mut t = Vec::new();
        for x in 0..g.vertex_count() {
            for y in std::iter::once(x).chain(g.neighbors(x).iter().copied()) {
                t.push((
                    x,
                    y,
                    (0..k * k)
                        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect(),
                ));
            }
        }
        BlockOperator::from_triplets(space.clone(), k, t)
    }

    #[test]
    fn identity_basics() {
        let g = cycle_graph(5).unwrap();
        let s = IndexSpace::graph("C5", &g);
        let id = BlockOperator::identity(s, 2);
        assert_eq!(id.propagation(), 0);
        assert!((id.operator_norm() - 1.0).abs() < 1e-12);
        assert_eq!(id.trace(), c(10.0));
        assert_eq!(id.uniform_rank(), 2);
    }

    #[test]
    fn cycle_adjacency() {
        let g = cycle_graph(4).unwrap();
        let s = IndexSpace::graph("C4", &g);
        let a = adjacency(&g, &s);
        assert_eq!(a.propagation(), 1);
        assert!((a.operator_norm() - 2.0).abs() < 1e-12);
        let a2 = a.mul(&a).unwrap();
        assert_eq!(a2.propagation(), 2);
        assert_eq!(a2.get(0, 2), Some(&[c(2.0)][..]));
    }

    #[test]
    fn algebra_identities() {
        let g = cycle_graph(8).unwrap();
        let s = IndexSpace::graph("C8", &g);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_prop1(&s, &g, 2, &mut rng);
        let u = random_prop1(&s, &g, 2, &mut rng);
        let tt = t.mul(&t.adjoint()).unwrap();
        assert!(tt.max_abs_diff(&tt.adjoint()).unwrap() < 1e-12);
        let lhs = t.mul(&u).unwrap().to_dense();
        let rhs = t.to_dense() * u.to_dense();
        assert!((lhs - rhs).norm() < 1e-12);
        assert!(t.mul(&u).unwrap().propagation() <= 2);
        assert!(t.add(&u).unwrap().propagation() <= 1);
        assert_eq!(t.sub(&t).unwrap().nnz_blocks(), 0);
        let dense =
            (t.to_dense() * Complex64::new(0.5, -1.0) + u.to_dense()) - t.linear_combination(Complex64::new(0.5, -1.0), &u, ONE).unwrap().to_dense();
        assert!(dense.norm() < 1e-12);
    }

    #[test]
    fn norm_paths_agree() {
        let g = cycle_graph(30).unwrap();
        let s = IndexSpace::graph("C30", &g);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let t = random_prop1(&s, &g, 1, &mut rng);
        let dense = t.operator_norm();
        let iter = t.operator_norm_with(&NormOptions {
            dense_limit: 0,
            ..NormOptions::default()
        });
        assert!((dense - iter).abs() < 1e-6 * dense, "{dense} vs {iter}");
    }

    #[test]
    fn mismatches() {
        let g = cycle_graph(4).unwrap();
        let a = BlockOperator::identity(IndexSpace::graph("A", &g), 1);
        let b = BlockOperator::identity(IndexSpace::graph("B", &g), 1);
        assert!(matches!(a.add(&b), Err(Error::IndexSpaceMismatch { .. })));
        let c2 = BlockOperator::identity(IndexSpace::graph("A", &g), 2);
        assert!(matches!(a.mul(&c2), Err(Error::FiberMismatch { left: 1, right: 2 })));
    }

    #[test]
    fn dense_limit() {
        let edges: Vec<_> = (0..10_001).map(|i| (i, i + 1)).collect();
        let g = Graph::from_edges(&edges).unwrap();
        let big = BlockOperator::identity(IndexSpace::graph("P", &g), 2);
        assert!(matches!(big.dense_operator_norm(), Err(Error::TooLargeForDenseNorm { .. })));
        assert!((big.operator_norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn restriction_and_tensor() {
        let g = cycle_graph(6).unwrap();
        let s = IndexSpace::graph("C6", &g);
        let a = adjacency(&g, &s);
        let sub = crate::graphs::path_graph(3).unwrap();
        let r = a.restrict(&[0, 1, 2], IndexSpace::graph("P3", &sub));
        assert_eq!(r.nnz_blocks(), 4);
        let q = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let aq = a.tensor_fiber(&q);
        assert_eq!(aq.fiber_dim(), 2);
        assert!((aq.operator_norm() - 2.0).abs() < 1e-12);
        assert_eq!(aq.uniform_rank(), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn dump_roundtrip(seed in any::<u64>(), k in 1usize..3) {
            let g = cycle_graph(7).unwrap();
            let s = IndexSpace::graph("C7", &g);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_prop1(&s, &g, k, &mut rng);
            let back = BlockOperator::from_dump(&t.to_dump(), s).unwrap();
            prop_assert_eq!(back.max_abs_diff(&t).unwrap(), 0.0);
            prop_assert_eq!(back.nnz_blocks(), t.nnz_blocks());
        }
    }
}
