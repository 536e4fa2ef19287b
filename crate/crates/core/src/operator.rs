//! Dense Hermitian operators on multi-subsystem Hilbert spaces.
//!
//! Multi-indices are row-major over the layout: the last subsystem varies
//! fastest, so `kron(A, B)` carries the layout `A.dims ++ B.dims`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result, C64};

/// Hermiticity tolerance accepted from external input before symmetrizing.
pub const HERMITIAN_INPUT_TOL: f64 = 1e-9;

/// Ordered subsystem dimensions plus the index of the first right-party subsystem.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemLayout {
    dims: Vec<usize>,
    cut: usize,
}

impl SystemLayout {
    pub fn new(dims: Vec<usize>, cut: usize) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Layout("layout needs at least one subsystem".into()));
        }
        if let Some(i) = dims.iter().position(|&d| d == 0) {
            return Err(Error::Layout(format!("subsystem {i} has dimension 0")));
        }
        if cut > dims.len() {
            return Err(Error::Layout(format!("cut {cut} beyond {} subsystems", dims.len())));
        }
        Ok(Self { dims, cut })
    }

    /// Single subsystem of dimension `d`.
    pub fn single(d: usize) -> Result<Self> {
        Self::new(vec![d], 0)
    }

    /// Two subsystems `[left, right]` cut between them.
    pub fn bipartite(left: usize, right: usize) -> Result<Self> {
        Self::new(vec![left, right], 1)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn cut(&self) -> usize {
        self.cut
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn with_cut(&self, cut: usize) -> Result<Self> {
        Self::new(self.dims.clone(), cut)
    }

    pub fn is_bipartite(&self) -> bool {
        self.cut > 0 && self.cut < self.dims.len()
    }

    pub fn require_bipartite(&self) -> Result<()> {
        if self.is_bipartite() {
            Ok(())
        } else {
            Err(Error::Layout(format!("cut {} does not split {:?} into two parties", self.cut, self.dims)))
        }
    }

    /// Total dimensions of the left and right parties.
    pub fn party_dims(&self) -> (usize, usize) {
        let left = self.dims[..self.cut].iter().product();
        let right = self.dims[self.cut..].iter().product();
        (left, right)
    }

    /// Indices of the subsystems right of the cut.
    pub fn right_party(&self) -> Vec<usize> {
        (self.cut..self.dims.len()).collect()
    }

    /// Concatenation; the cut falls between the two inputs.
    pub fn concat(&self, other: &SystemLayout) -> SystemLayout {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        SystemLayout { dims, cut: self.dims.len() }
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    fn digits(&self, mut index: usize, out: &mut [usize]) {
        for k in (0..self.dims.len()).rev() {
            out[k] = index % self.dims[k];
            index /= self.dims[k];
        }
    }

    fn check_indices(&self, subsystems: &[usize]) -> Result<()> {
        for &s in subsystems {
            if s >= self.dims.len() {
                return Err(Error::Layout(format!("subsystem index {s} out of range for {:?}", self.dims)));
            }
        }
        Ok(())
    }
}

/// Dense Hermitian matrix tagged with its subsystem layout.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    layout: SystemLayout,
    entries: DMatrix<C64>,
}

/// Spectral decomposition with eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: DMatrix<C64>,
}

impl Eigh {
    pub fn min_value(&self) -> f64 {
        *self.values.last().expect("nonempty spectrum")
    }
}

fn max_hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

fn hermitize(m: &mut DMatrix<C64>) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
}

impl HermitianOperator {
    /// Validates shape and Hermiticity, then symmetrizes exactly.
    pub fn new(layout: SystemLayout, mut entries: DMatrix<C64>) -> Result<Self> {
        let n = layout.total();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: entries.nrows().max(entries.ncols()) });
        }
        let scale = entries.iter().fold(1.0_f64, |acc, z| acc.max(z.norm()));
        let deviation = max_hermitian_deviation(&entries);
        if deviation > HERMITIAN_INPUT_TOL * scale {
            return Err(Error::NotHermitian { deviation });
        }
        hermitize(&mut entries);
        Ok(Self { layout, entries })
    }

    /// Caller guarantees exact Hermiticity.
    pub(crate) fn from_hermitian_unchecked(layout: SystemLayout, entries: DMatrix<C64>) -> Self {
        debug_assert_eq!(entries.nrows(), layout.total());
        Self { layout, entries }
    }

    pub fn from_real(layout: SystemLayout, rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let m = DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0));
        Self::new(layout, m)
    }

    pub fn identity(layout: SystemLayout) -> Self {
        let n = layout.total();
        Self::from_hermitian_unchecked(layout, DMatrix::identity(n, n))
    }

    pub fn zeros(layout: SystemLayout) -> Self {
        let n = layout.total();
        Self::from_hermitian_unchecked(layout, DMatrix::zeros(n, n))
    }

    pub fn diagonal(layout: SystemLayout, diag: &[f64]) -> Result<Self> {
        if diag.len() != layout.total() {
            return Err(Error::DimensionMismatch { expected: layout.total(), got: diag.len() });
        }
        let m = DMatrix::from_diagonal(&DVector::from_iterator(diag.len(), diag.iter().map(|&x| C64::new(x, 0.0))));
        Ok(Self::from_hermitian_unchecked(layout, m))
    }

    /// Rank-one projector `|v><v|` (no normalization applied).
    pub fn projector(layout: SystemLayout, v: &DVector<C64>) -> Result<Self> {
        if v.len() != layout.total() {
            return Err(Error::DimensionMismatch { expected: layout.total(), got: v.len() });
        }
        let mut m = v * v.adjoint();
        hermitize(&mut m);
        Ok(Self::from_hermitian_unchecked(layout, m))
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn dims(&self) -> &[usize] {
        self.layout.dims()
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.entries
    }

    /// Same entries under a different layout of equal total dimension.
    pub fn relabel(&self, layout: SystemLayout) -> Result<Self> {
        if layout.total() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: layout.total() });
        }
        Ok(Self::from_hermitian_unchecked(layout, self.entries.clone()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance to `other` (layouts ignored, sizes must match).
    pub fn distance(&self, other: &HermitianOperator) -> f64 {
        (&self.entries - &other.entries).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_hermitian_unchecked(self.layout.clone(), self.entries.map(|z| z * factor))
    }

    pub fn add(&self, other: &HermitianOperator) -> Result<Self> {
        self.require_same_dim(other)?;
        Ok(Self::from_hermitian_unchecked(self.layout.clone(), &self.entries + &other.entries))
    }

    pub fn sub(&self, other: &HermitianOperator) -> Result<Self> {
        self.require_same_dim(other)?;
        Ok(Self::from_hermitian_unchecked(self.layout.clone(), &self.entries - &other.entries))
    }

    /// Full transpose, equal to the entrywise conjugate for Hermitian input.
    pub fn transpose(&self) -> Self {
        Self::from_hermitian_unchecked(self.layout.clone(), self.entries.transpose())
    }

    fn require_same_dim(&self, other: &HermitianOperator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(())
    }

    /// `Tr(self * other)` as a complex number.
    pub fn trace_product(&self, other: &HermitianOperator) -> Result<C64> {
        self.require_same_dim(other)?;
        Ok(trace_of_product(&self.entries, &other.entries))
    }

    /// `<v|self|v>` for a full-space vector.
    pub fn quadratic_form(&self, v: &DVector<C64>) -> Result<f64> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        Ok((v.adjoint() * &self.entries * v)[(0, 0)].re)
    }

    pub fn kron(&self, other: &HermitianOperator) -> Self {
        Self::from_hermitian_unchecked(self.layout.concat(&other.layout), self.entries.kronecker(&other.entries))
    }

    /// Transposes the listed subsystems.
    pub fn partial_transpose(&self, subsystems: &[usize]) -> Result<Self> {
        self.layout.check_indices(subsystems)?;
        let layout = &self.layout;
        let strides = layout.strides();
        let n = self.dim();
        let mut flip = vec![false; layout.len()];
        for &s in subsystems {
            flip[s] = true;
        }
        let mut out = DMatrix::zeros(n, n);
        let mut di = vec![0; layout.len()];
        let mut dj = vec![0; layout.len()];
        for i in 0..n {
            layout.digits(i, &mut di);
            for j in 0..n {
                layout.digits(j, &mut dj);
                let (mut si, mut sj) = (0, 0);
                for k in 0..layout.len() {
                    let (a, b) = if flip[k] { (dj[k], di[k]) } else { (di[k], dj[k]) };
                    si += a * strides[k];
                    sj += b * strides[k];
                }
                out[(i, j)] = self.entries[(si, sj)];
            }
        }
        Ok(Self::from_hermitian_unchecked(layout.clone(), out))
    }

    /// Transposes every subsystem right of the cut.
    pub fn partial_transpose_right(&self) -> Result<Self> {
        self.layout.require_bipartite()?;
        self.partial_transpose(&self.layout.right_party())
    }

    /// Traces out every subsystem not listed in `keep`.
    ///
    /// Kept subsystems stay in their original relative order; the new cut
    /// counts kept subsystems that were left of the old cut.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidArgument("partial trace must keep at least one subsystem".into()));
        }
        self.layout.check_indices(keep)?;
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let traced: Vec<usize> = (0..self.layout.len()).filter(|k| !kept.contains(k)).collect();
        let strides = self.layout.strides();
        let dims = self.layout.dims();

        let kept_layout = SystemLayout::new(
            kept.iter().map(|&k| dims[k]).collect(),
            kept.iter().filter(|&&k| k < self.layout.cut()).count(),
        )?;
        let traced_layout =
            SystemLayout::new(if traced.is_empty() { vec![1] } else { traced.iter().map(|&k| dims[k]).collect() }, 0)?;
        let offset = |sub: &SystemLayout, idx: &[usize], index: usize, buf: &mut Vec<usize>| -> usize {
            buf.resize(sub.len(), 0);
            sub.digits(index, buf);
            idx.iter().zip(buf.iter()).map(|(&k, &d)| d * strides[k]).sum()
        };

        let nk = kept_layout.total();
        let nt = if traced.is_empty() { 1 } else { traced_layout.total() };
        let mut buf = Vec::new();
        let kept_off: Vec<usize> = (0..nk).map(|i| offset(&kept_layout, &kept, i, &mut buf)).collect();
        let traced_off: Vec<usize> = if traced.is_empty() {
            vec![0]
        } else {
            (0..nt).map(|t| offset(&traced_layout, &traced, t, &mut buf)).collect()
        };
        let mut out = DMatrix::zeros(nk, nk);
        for i in 0..nk {
            for j in 0..nk {
                let mut acc = C64::new(0.0, 0.0);
                for &t in &traced_off {
                    acc += self.entries[(kept_off[i] + t, kept_off[j] + t)];
                }
                out[(i, j)] = acc;
            }
        }
        hermitize(&mut out);
        Ok(Self::from_hermitian_unchecked(kept_layout, out))
    }

    /// Reorders tensor factors: output subsystem `k` is input subsystem `perm[k]`.
    pub fn permute_systems(&self, perm: &[usize]) -> Result<Self> {
        let len = self.layout.len();
        let mut seen = vec![false; len];
        if perm.len() != len || perm.iter().any(|&p| p >= len || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Layout(format!("{perm:?} is not a permutation of {len} subsystems")));
        }
        let dims = self.layout.dims();
        let new_layout = SystemLayout::new(perm.iter().map(|&p| dims[p]).collect(), self.layout.cut())?;
        let new_strides = new_layout.strides();
        // position of input subsystem k in the output
        let mut pos = vec![0; len];
        for (k, &p) in perm.iter().enumerate() {
            pos[p] = k;
        }
        let n = self.dim();
        let mut digits = vec![0; len];
        let map: Vec<usize> = (0..n)
            .map(|i| {
                self.layout.digits(i, &mut digits);
                (0..len).map(|k| digits[k] * new_strides[pos[k]]).sum()
            })
            .collect();
        let mut out = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(map[i], map[j])] = self.entries[(i, j)];
            }
        }
        Ok(Self::from_hermitian_unchecked(new_layout, out))
    }

    pub fn eigh(&self) -> Result<Eigh> {
        eigh_matrix(&self.entries)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigh()?.min_value())
    }

    /// True iff the minimum eigenvalue is at least `-tol`.
    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        if tol < 0.0 {
            return Err(Error::InvalidArgument(format!("negative tolerance {tol}")));
        }
        Ok(self.min_eigenvalue()? >= -tol)
    }

    /// Applies `f` to the spectrum.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let e = self.eigh()?;
        let n = self.dim();
        let mut scaled = e.vectors.clone();
        for (j, &v) in e.values.iter().enumerate() {
            let fv = f(v);
            for i in 0..n {
                scaled[(i, j)] *= fv;
            }
        }
        let mut m = scaled * e.vectors.adjoint();
        hermitize(&mut m);
        Ok(Self::from_hermitian_unchecked(self.layout.clone(), m))
    }

    /// `U self U^dagger` for a unitary (or any) `u` of matching size.
    pub fn conjugate_by(&self, u: &DMatrix<C64>) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: u.nrows() });
        }
        let mut m = u * &self.entries * u.adjoint();
        hermitize(&mut m);
        Ok(Self::from_hermitian_unchecked(self.layout.clone(), m))
    }
}

pub(crate) fn trace_of_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..n {
        for i in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

const EIGH_MAX_ITERS: usize = 10_000;

/// Hermitian eigensolve; eigenvalues descending.
pub fn eigh_matrix(m: &DMatrix<C64>) -> Result<Eigh> {
    let n = m.nrows();
    let eig = m
        .clone()
        .try_symmetric_eigen(f64::EPSILON, EIGH_MAX_ITERS)
        .ok_or_else(|| {
            Error::Numerical(format!(
                "Hermitian eigensolver did not converge on {n}x{n} input within {EIGH_MAX_ITERS} iterations (max |entry| {:.3e})",
                m.iter().fold(0.0_f64, |a, z| a.max(z.norm()))
            ))
        })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(Eigh { values, vectors })
}

/// Multiplies `v` by a phase so its largest-magnitude entry is real positive.
pub fn rephase(v: &mut DVector<C64>) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in v.iter().enumerate() {
        // strict comparison with a small margin keeps the lowest index on ties
        if z.norm() > best_abs + 1e-12 {
            best = i;
            best_abs = z.norm();
        }
    }
    if best_abs > 0.0 {
        let phase = v[best].conj() / best_abs;
        v.iter_mut().for_each(|z| *z *= phase);
    }
}

/// Pure product vector, one unit vector per tensor factor.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductVector {
    factors: Vec<DVector<C64>>,
}

pub const UNIT_NORM_TOL: f64 = 1e-12;

impl ProductVector {
    pub fn new(factors: Vec<DVector<C64>>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("product vector needs a factor".into()));
        }
        for (k, f) in factors.iter().enumerate() {
            let norm = f.norm();
            if (norm - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::InvalidArgument(format!("factor {k} has norm {norm}, expected 1")));
            }
        }
        Ok(Self { factors })
    }

    /// Normalizes each factor before validation.
    pub fn normalized(factors: Vec<DVector<C64>>) -> Result<Self> {
        let mut out = Vec::with_capacity(factors.len());
        for (k, f) in factors.into_iter().enumerate() {
            let norm = f.norm();
            if norm == 0.0 {
                return Err(Error::InvalidArgument(format!("factor {k} is zero")));
            }
            out.push(f / C64::new(norm, 0.0));
        }
        Self::new(out)
    }

    /// Computational basis product `|i_0>|i_1>...`.
    pub fn basis(dims: &[usize], indices: &[usize]) -> Result<Self> {
        if dims.len() != indices.len() || dims.iter().zip(indices).any(|(d, i)| i >= d) {
            return Err(Error::InvalidArgument(format!("basis indices {indices:?} invalid for {dims:?}")));
        }
        Self::new(
            dims.iter()
                .zip(indices)
                .map(|(&d, &i)| {
                    let mut v = DVector::zeros(d);
                    v[i] = C64::new(1.0, 0.0);
                    v
                })
                .collect(),
        )
    }

    pub fn factors(&self) -> &[DVector<C64>] {
        &self.factors
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.len()).collect()
    }

    /// The Kronecker product of all factors.
    pub fn full_vector(&self) -> DVector<C64> {
        let mut v = self.factors[0].clone();
        for f in &self.factors[1..] {
            v = v.kronecker(f);
        }
        v
    }

    /// `|v><v|` carried by `layout`.
    pub fn density(&self, layout: SystemLayout) -> Result<HermitianOperator> {
        HermitianOperator::projector(layout, &self.full_vector())
    }

    /// `|v><v|` with one subsystem per factor.
    pub fn factor_density(&self) -> HermitianOperator {
        let dims = self.dims();
        let cut = if dims.len() > 1 { 1 } else { 0 };
        let layout = SystemLayout::new(dims, cut).expect("factor dims are positive");
        HermitianOperator::projector(layout, &self.full_vector()).expect("sizes agree")
    }

    /// Concatenates factor lists: `self ⊗ other`.
    pub fn tensor(&self, other: &ProductVector) -> ProductVector {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        ProductVector { factors }
    }
}

/// Convex mixture of pure product states.
#[derive(Debug, Clone)]
pub struct SeparableEnsemble {
    layout: SystemLayout,
    weights: Vec<f64>,
    members: Vec<ProductVector>,
}

pub const WEIGHT_SUM_TOL: f64 = 1e-12;

impl SeparableEnsemble {
    pub fn new(layout: SystemLayout, weights: Vec<f64>, members: Vec<ProductVector>) -> Result<Self> {
        if weights.is_empty() || weights.len() != members.len() {
            return Err(Error::InvalidArgument(format!("{} weights for {} members", weights.len(), members.len())));
        }
        if let Some(w) = weights.iter().find(|w| w.is_nan() || **w < 0.0) {
            return Err(Error::InvalidArgument(format!("negative weight {w}")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidArgument(format!("weights sum to {sum}")));
        }
        let total = layout.total();
        for m in &members {
            let d: usize = m.dims().iter().product();
            if d != total {
                return Err(Error::DimensionMismatch { expected: total, got: d });
            }
        }
        let first = members[0].dims();
        if members.iter().any(|m| m.dims() != first) {
            return Err(Error::Layout("ensemble members have different factor layouts".into()));
        }
        Ok(Self { layout, weights, members })
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn members(&self) -> &[ProductVector] {
        &self.members
    }

    pub fn density(&self) -> HermitianOperator {
        let n = self.layout.total();
        let mut acc = DMatrix::<C64>::zeros(n, n);
        for (w, m) in self.weights.iter().zip(&self.members) {
            let v = m.full_vector();
            acc += (&v * v.adjoint()) * C64::new(*w, 0.0);
        }
        hermitize(&mut acc);
        HermitianOperator::from_hermitian_unchecked(self.layout.clone(), acc)
    }
}

// ---- JSON wire format: {"dims":[...], "cut":k, "data":[[[re,im],...],...]}

#[derive(Serialize, Deserialize)]
struct OperatorWire {
    dims: Vec<usize>,
    cut: usize,
    data: Vec<Vec<[f64; 2]>>,
}

pub(crate) fn matrix_to_rows(m: &DMatrix<C64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re + 0.0, m[(i, j)].im + 0.0]).collect()).collect()
}

pub(crate) fn rows_to_matrix(rows: &[Vec<[f64; 2]>]) -> Result<DMatrix<C64>> {
    let n = rows.len();
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidArgument("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(n, cols, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

impl Serialize for HermitianOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorWire { dims: self.layout.dims.clone(), cut: self.layout.cut, data: matrix_to_rows(&self.entries) }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = OperatorWire::deserialize(d)?;
        let layout = SystemLayout::new(wire.dims, wire.cut).map_err(D::Error::custom)?;
        let m = rows_to_matrix(&wire.data).map_err(D::Error::custom)?;
        HermitianOperator::new(layout, m).map_err(D::Error::custom)
    }
}

impl HermitianOperator {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

impl Serialize for ProductVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let factors: Vec<Vec<[f64; 2]>> =
            self.factors.iter().map(|f| f.iter().map(|z| [z.re + 0.0, z.im + 0.0]).collect()).collect();
        factors.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProductVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let factors: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let factors = factors
            .into_iter()
            .map(|f| DVector::from_iterator(f.len(), f.into_iter().map(|[re, im]| C64::new(re, im))))
            .collect();
        ProductVector::new(factors).map_err(D::Error::custom)
    }
}
