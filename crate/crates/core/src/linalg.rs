//! Dense complex matrix kernels.
//!
//! Matrices are square and stored row-major: entry `(r, c)` lives at
//! `r * dim + c`. Basis indices follow the little-endian wire contract used
//! throughout the crate: wire 0 is the least-significant bit of an index.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default tolerance for unitarity and skew-Hermiticity checks.
pub const DEFAULT_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense square matrix of complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = d;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.data[r * dim + c] = f(r, c);
            }
        }
        m
    }

    /// Builds a matrix from row-major entries; fails unless `data.len()` is a
    /// positive perfect square.
    pub fn from_row_major(data: Vec<C64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} entries do not form a square matrix",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch("rows do not form a square matrix".into()));
        }
        Ok(Self {
            dim,
            data: rows.concat(),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|r| (0..self.dim).all(|c| r == c || self.get(r, c) == ZERO))
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// `‖A − A†‖_F ≤ tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    fn hermitian_deviation(&self) -> f64 {
        let mut acc = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                acc += (self.get(r, c) - self.get(c, r).conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    fn skew_deviation(&self) -> f64 {
        let mut acc = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                acc += (self.get(r, c) + self.get(c, r).conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Relative skew-Hermitian check `‖A + A†‖_F ≤ tol·‖A‖_F`.
    pub fn is_skew_hermitian(&self, tol: f64) -> bool {
        self.skew_deviation() <= tol * self.frobenius_norm().max(f64::MIN_POSITIVE)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for r in 0..n {
            let out_row = &mut out[r * n..(r + 1) * n];
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Self { dim: n, data: out }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// Kronecker product `self ⊗ other`; `other` occupies the low-order bits
    /// of the combined index.
    pub fn kron(&self, other: &Self) -> Self {
        let (na, nb) = (self.dim, other.dim);
        let n = na * nb;
        let mut out = Self::zeros(n);
        for ar in 0..na {
            for ac in 0..na {
                let a = self.get(ar, ac);
                if a == ZERO {
                    continue;
                }
                for br in 0..nb {
                    for bc in 0..nb {
                        out.data[(ar * nb + br) * n + ac * nb + bc] = a * other.get(br, bc);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "matrix-vector dimension mismatch");
        (0..self.dim)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Euclidean norm of a complex vector.
pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨a|b⟩`, conjugate-linear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Matrix exponential of a skew-Hermitian generator.
///
/// Writes `g = iH`, diagonalises the Hermitian `H = V·diag(λ)·V†` and returns
/// `V·diag(e^{iλ})·V†`. Diagonal generators skip the eigensolver.
pub fn matexp(g: &ComplexMatrix) -> Result<ComplexMatrix> {
    let scale = g.frobenius_norm();
    if scale == 0.0 {
        return Ok(ComplexMatrix::identity(g.dim));
    }
    let deviation = g.skew_deviation() / scale;
    if !(deviation <= DEFAULT_TOL) {
        return Err(Error::NonSkewHermitian { deviation });
    }
    if g.is_diagonal() {
        // Diagonal of a skew-Hermitian matrix is purely imaginary.
        let diag: Vec<C64> = g.diagonal().iter().map(|d| C64::from_polar(1.0, d.im)).collect();
        return Ok(ComplexMatrix::from_diag(&diag));
    }
    let mut out = ComplexMatrix::zeros(g.dim);
    for block in coupled_blocks(g) {
        exp_block(g, &block, &mut out);
    }
    Ok(out)
}

/// Index sets closed under the nonzero pattern of `g`. Number-conserving
/// generators split into many small blocks that exponentiate independently.
fn coupled_blocks(g: &ComplexMatrix) -> Vec<Vec<usize>> {
    let n = g.dim;
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for r in 0..n {
        for c in r + 1..n {
            if g.get(r, c) != ZERO || g.get(c, r) != ZERO {
                let (a, b) = (root(&mut parent, r), root(&mut parent, c));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[r]].push(i);
    }
    blocks
}

fn exp_block(g: &ComplexMatrix, idx: &[usize], out: &mut ComplexMatrix) {
    let n = idx.len();
    let dim = g.dim;
    if n == 1 {
        let i = idx[0];
        out.data[i * dim + i] = C64::from_polar(1.0, g.get(i, i).im);
        return;
    }
    // H = -i g, symmetrised so the eigensolver sees an exactly Hermitian input.
    let h = DMatrix::from_fn(n, n, |r, c| {
        let a = -I * g.get(idx[r], idx[c]);
        let b = (-I * g.get(idx[c], idx[r])).conj();
        (a + b) * 0.5
    });
    let eig = h.symmetric_eigen();
    let phases: Vec<C64> = eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, l)).collect();
    let v = &eig.eigenvectors;
    // U[r][c] = Σ_k V[r][k] e^{iλ_k} conj(V[c][k])
    let vp: Vec<C64> = (0..n * n).map(|i| v[(i / n, i % n)] * phases[i % n]).collect();
    let vc: Vec<C64> = (0..n * n).map(|i| v[(i / n, i % n)].conj()).collect();
    for r in 0..n {
        for c in 0..n {
            let mut acc = ZERO;
            for k in 0..n {
                acc += vp[r * n + k] * vc[c * n + k];
            }
            out.data[idx[r] * dim + idx[c]] = acc;
        }
    }
}

/// `‖u†u − I‖_F ≤ tol`.
pub fn is_unitary(u: &ComplexMatrix, tol: f64) -> bool {
    let prod = u.dagger().matmul(u);
    let dev: f64 = (0..u.dim)
        .flat_map(|r| (0..u.dim).map(move |c| (r, c)))
        .map(|(r, c)| {
            let id = if r == c { ONE } else { ZERO };
            (prod.get(r, c) - id).norm_sqr()
        })
        .sum::<f64>()
        .sqrt();
    dev <= tol
}

/// Checks a wire list against `total_wires` and returns the local→global bit
/// offsets for every local basis index.
pub fn local_offsets(wires: &[usize], total_wires: usize) -> Result<Vec<usize>> {
    for (i, &w) in wires.iter().enumerate() {
        if w >= total_wires {
            return Err(Error::WireOutOfRange {
                wire: w,
                total: total_wires,
            });
        }
        if wires[..i].contains(&w) {
            return Err(Error::DuplicateWire(w));
        }
    }
    Ok((0..1usize << wires.len())
        .map(|local| deposit_bits(local, wires))
        .collect())
}

/// Scatters the bits of `local` onto the global positions named by `wires`
/// (bit j of `local` goes to bit `wires[j]`).
#[inline]
pub fn deposit_bits(local: usize, wires: &[usize]) -> usize {
    wires
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &w)| acc | (((local >> j) & 1) << w))
}

/// Gathers the bits at positions `wires` of `global` into a local index.
#[inline]
pub fn extract_bits(global: usize, wires: &[usize]) -> usize {
    wires
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &w)| acc | (((global >> w) & 1) << j))
}

/// Lifts `op` acting on `wires` to the full `2^total_wires` space. Wire
/// `wires[j]` carries bit j of the operator's local index.
pub fn embed(op: &ComplexMatrix, wires: &[usize], total_wires: usize) -> Result<ComplexMatrix> {
    if op.dim != 1usize << wires.len() {
        return Err(Error::DimensionMismatch(format!(
            "operator of dim {} cannot act on {} wires",
            op.dim,
            wires.len()
        )));
    }
    let offsets = local_offsets(wires, total_wires)?;
    let mask = offsets[offsets.len() - 1];
    let n = 1usize << total_wires;
    let mut out = ComplexMatrix::zeros(n);
    for r in 0..n {
        let rest = r & !mask;
        let lr = extract_bits(r, wires);
        for (lc, &off) in offsets.iter().enumerate() {
            out.data[r * n + (rest | off)] = op.get(lr, lc);
        }
    }
    Ok(out)
}
