//! Dense linear algebra over a coefficient field.
//!
//! Matrices hold encoded field values and borrow the [`FieldCtx`] for every
//! operation. Elimination skips zero entries, which keeps the monomial-like
//! Galois matrices cheap.

use crate::field::FieldCtx;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            m.row_mut(i).copy_from_slice(r);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [u32] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                axpy(ctx, dst, a, src);
            }
        }
        out
    }

    pub fn mul_vec(&self, ctx: &FieldCtx, v: &[u32]) -> Vec<u32> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(&a, &b)| a != 0 && b != 0)
                    .fold(0, |acc, (&a, &b)| ctx.add(acc, ctx.mul(a, b)))
            })
            .collect()
    }

    pub fn add(&self, ctx: &FieldCtx, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| ctx.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| ctx.sub(a, b))
                .collect(),
        }
    }

    pub fn pow(&self, ctx: &FieldCtx, e: u64) -> Matrix {
        assert_eq!(self.rows, self.cols);
        let mut acc = Matrix::identity(self.rows);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(ctx, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(ctx, &base);
            }
        }
        acc
    }

    /// Top-left `n × n` block.
    pub fn leading_block(&self, n: usize) -> Matrix {
        assert!(n <= self.rows && n <= self.cols);
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            out.row_mut(i).copy_from_slice(&self.row(i)[..n]);
        }
        out
    }

    pub fn rank(&self, ctx: &FieldCtx) -> usize {
        let mut space = RowSpace::new(self.cols);
        for i in 0..self.rows {
            space.insert(ctx, self.row(i).to_vec());
        }
        space.rank()
    }
}

/// `dst += a · src`.
#[inline]
pub fn axpy(ctx: &FieldCtx, dst: &mut [u32], a: u32, src: &[u32]) {
    if ctx.degree() == 1 {
        let p = ctx.characteristic();
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d = ((*d as u64 + a as u64 * s as u64) % p) as u32;
            }
        }
    } else {
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d = ctx.add(*d, ctx.mul(a, s));
            }
        }
    }
}

/// Span of row vectors kept in reduced row echelon form.
#[derive(Debug, Clone)]
pub struct RowSpace {
    cols: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl RowSpace {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` in place against the basis and returns the coefficient
    /// used for each basis row.
    pub fn reduce(&self, ctx: &FieldCtx, v: &mut [u32]) -> Vec<u32> {
        let mut coeffs = vec![0u32; self.rows.len()];
        for (i, (row, &pc)) in self.rows.iter().zip(&self.pivots).enumerate() {
            let c = v[pc];
            if c != 0 {
                coeffs[i] = c;
                axpy(ctx, v, ctx.neg(c), row);
            }
        }
        coeffs
    }

    pub fn contains(&self, ctx: &FieldCtx, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(ctx, &mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, ctx: &FieldCtx, mut v: Vec<u32>) -> bool {
        assert_eq!(v.len(), self.cols);
        self.reduce(ctx, &mut v);
        let Some(pc) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = ctx.inv(v[pc]).expect("nonzero pivot");
        for x in v.iter_mut() {
            *x = ctx.mul(*x, inv);
        }
        for row in self.rows.iter_mut() {
            let c = row[pc];
            if c != 0 {
                axpy(ctx, row, ctx.neg(c), &v);
            }
        }
        let at = self.pivots.partition_point(|&q| q < pc);
        self.pivots.insert(at, pc);
        self.rows.insert(at, v);
        true
    }

    /// Basis of the solution space of `r·x = 0` for all basis rows `r`.
    pub fn kernel(&self, ctx: &FieldCtx) -> Vec<Vec<u32>> {
        let mut is_pivot = vec![false; self.cols];
        for &pc in &self.pivots {
            is_pivot[pc] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut x = vec![0u32; self.cols];
                x[free] = 1;
                for (row, &pc) in self.rows.iter().zip(&self.pivots) {
                    x[pc] = ctx.neg(row[free]);
                }
                x
            })
            .collect()
    }
}

/// Nullity profile of a square nilpotent matrix read as a partition.
///
/// Returns the Jordan block sizes in descending order, or `None` when the
/// matrix is not nilpotent.
pub fn nilpotent_partition(ctx: &FieldCtx, t: &Matrix) -> Option<Vec<usize>> {
    let n = t.rows();
    assert_eq!(n, t.cols());
    let mut ranks = vec![n];
    let mut power = Matrix::identity(n);
    while *ranks.last().unwrap() > 0 {
        if ranks.len() > n + 1 {
            return None;
        }
        power = power.mul(ctx, t);
        let r = power.rank(ctx);
        if r == *ranks.last().unwrap() {
            return None;
        }
        ranks.push(r);
    }
    Some(partition_from_ranks(&ranks))
}

/// Given `ranks[j] = rank(T^j)` down to zero, the number of blocks of size
/// at least `j` is `ranks[j-1] - ranks[j]`.
pub fn partition_from_ranks(ranks: &[usize]) -> Vec<usize> {
    let at_least: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
    let mut parts = Vec::new();
    for (j, &cnt) in at_least.iter().enumerate() {
        let next = at_least.get(j + 1).copied().unwrap_or(0);
        parts.extend(std::iter::repeat_n(j + 1, cnt - next));
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    parts
}
