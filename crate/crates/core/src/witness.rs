//! Numerical certification of entanglement witnesses.
//!
//! The minimum of `<phi ⊗ psi| W |phi ⊗ psi>` over product vectors is found by
//! see-saw: with one party's vector fixed the objective is a Hermitian form in
//! the other, minimized exactly by its lowest eigenvector. Zeros of that form
//! collected over many descents give the spanning-rank checks.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::operator::{eigh_matrix, rephase, HermitianOperator, ProductVector};
use crate::par::{map_indices, Execution};
use crate::sampling::unit_vector;
use crate::seed::{self, stream};
use crate::{Error, Result, C64, PSD_TOL};

/// Zero threshold for product expectations.
pub const ZERO_TOL: f64 = 1e-8;
/// Relative singular-value threshold for span ranks.
pub const RANK_TOL: f64 = 1e-8;
/// See-saw stops once a sweep changes the value by less than this.
pub const SEESAW_STEP_TOL: f64 = 1e-12;
/// Two zeros are duplicates when their overlap exceeds `1 - DEDUP_TOL`.
pub const DEDUP_TOL: f64 = 1e-6;

/// A bipartite Hermitian operator proposed as an entanglement witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub op: HermitianOperator,
    pub provenance: String,
}

impl Witness {
    pub fn new(op: HermitianOperator, provenance: impl Into<String>) -> Result<Self> {
        op.layout().require_bipartite()?;
        Ok(Self { op, provenance: provenance.into() })
    }

    pub fn party_dims(&self) -> (usize, usize) {
        self.op.layout().party_dims()
    }

    /// The partially transposed operator, as a witness candidate.
    pub fn gamma(&self) -> Result<Witness> {
        Witness::new(self.op.partial_transpose_right()?, format!("gamma({})", self.provenance))
    }
}

/// `Re Tr(W rho)`.
pub fn expectation(w: &Witness, rho: &HermitianOperator) -> Result<f64> {
    expectation_op(&w.op, rho)
}

pub(crate) fn expectation_op(w: &HermitianOperator, rho: &HermitianOperator) -> Result<f64> {
    let t = w.trace_product(rho)?;
    let scale = 1.0_f64.max(w.frobenius_norm() * rho.frobenius_norm());
    if t.im.abs() > 1e-10 * scale {
        return Err(Error::Numerical(format!("Tr(W rho) has imaginary part {:.3e}", t.im)));
    }
    Ok(t.re)
}

/// `<v|W|v>` for a product vector whose factors match the party split.
pub fn product_expectation(w: &Witness, v: &ProductVector) -> Result<f64> {
    w.op.quadratic_form(&v.full_vector())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeeSawOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Not serialized: results do not depend on it.
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for SeeSawOptions {
    fn default() -> Self {
        Self { restarts: 64, max_iters: 500, seed: 42, exec: Execution::Parallel }
    }
}

impl SeeSawOptions {
    pub fn new(restarts: usize, seed: u64) -> Self {
        Self { restarts, seed, ..Self::default() }
    }
}

/// Outcome of a multi-restart see-saw minimization.
#[derive(Debug, Clone, Serialize)]
pub struct SeeSawReport {
    pub best_value: f64,
    pub best_vector: ProductVector,
    pub best_restart: usize,
    pub restarts: usize,
    pub finals: Vec<f64>,
    pub converged: Vec<bool>,
    pub iterations: Vec<usize>,
    pub seed: u64,
    /// Objective after each sweep, per restart; starts with the initial value.
    #[serde(skip)]
    pub traces: Vec<Vec<f64>>,
}

pub(crate) struct Descent {
    pub value: f64,
    pub vector: ProductVector,
    pub converged: bool,
    pub iterations: usize,
    pub trace: Vec<f64>,
    /// The polishing sweeps reached a fixed point (always false without polish).
    pub settled: bool,
}

/// `A_ij = <i ⊗ psi| W |j ⊗ psi>`.
fn left_effective(w: &DMatrix<C64>, dl: usize, dr: usize, psi: &DVector<C64>) -> DMatrix<C64> {
    let mut a = DMatrix::zeros(dl, dl);
    for i in 0..dl {
        for j in 0..dl {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..dr {
                let mut row = C64::new(0.0, 0.0);
                for l in 0..dr {
                    row += w[(i * dr + k, j * dr + l)] * psi[l];
                }
                acc += psi[k].conj() * row;
            }
            a[(i, j)] = acc;
        }
    }
    a
}

/// `B_kl = <phi ⊗ k| W |phi ⊗ l>`.
fn right_effective(w: &DMatrix<C64>, dl: usize, dr: usize, phi: &DVector<C64>) -> DMatrix<C64> {
    let mut b = DMatrix::zeros(dr, dr);
    for i in 0..dl {
        let ci = phi[i].conj();
        if ci == C64::new(0.0, 0.0) {
            continue;
        }
        for j in 0..dl {
            let f = ci * phi[j];
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..dr {
                for l in 0..dr {
                    b[(k, l)] += f * w[(i * dr + k, j * dr + l)];
                }
            }
        }
    }
    b
}

/// Lowest eigenpair; on a degenerate minimum the first tied column of the
/// descending solve is taken, then re-phased.
fn lowest_eigenvector(h: &DMatrix<C64>) -> Result<(f64, DVector<C64>)> {
    let e = eigh_matrix(h)?;
    let min = e.min_value();
    let tie = 1e-12 * 1.0_f64.max(min.abs());
    let idx = e.values.iter().position(|&v| v <= min + tie).expect("nonempty");
    let mut v = e.vectors.column(idx).into_owned();
    v /= C64::new(v.norm(), 0.0);
    rephase(&mut v);
    Ok((e.values[idx], v))
}

fn quadratic(w: &DMatrix<C64>, phi: &DVector<C64>, psi: &DVector<C64>) -> f64 {
    let v = phi.kronecker(psi);
    (v.adjoint() * w * &v)[(0, 0)].re
}

/// Phase-aligned distance `min_theta |a - e^{i theta} b|`.
fn aligned_distance(a: &DVector<C64>, b: &DVector<C64>) -> f64 {
    let overlap = (b.adjoint() * a)[(0, 0)];
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
    (a - b * phase).norm()
}

/// Extra sweeps run on zero candidates after the value has converged.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Polish {
    pub vector_tol: f64,
    pub max_sweeps: usize,
}

/// Zero candidates are accurate only to about the square root of their value,
/// so they are iterated further until the vectors themselves stop moving.
pub(crate) const ZERO_POLISH: Polish = Polish { vector_tol: 1e-13, max_sweeps: 5000 };

pub(crate) fn descend(w: &HermitianOperator, max_iters: usize, task_seed: u64) -> Result<Descent> {
    descend_polished(w, max_iters, task_seed, None)
}

pub(crate) fn descend_polished(
    w: &HermitianOperator,
    max_iters: usize,
    task_seed: u64,
    polish: Option<Polish>,
) -> Result<Descent> {
    let (dl, dr) = w.layout().party_dims();
    let m = w.matrix();
    let mut rng = seed::rng(task_seed);
    let mut phi = unit_vector(dl, &mut rng);
    let mut psi = unit_vector(dr, &mut rng);
    let mut value = quadratic(m, &phi, &psi);
    let mut trace = vec![value];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iters {
        iterations += 1;
        phi = lowest_eigenvector(&left_effective(m, dl, dr, &psi))?.1;
        let (v, next_psi) = lowest_eigenvector(&right_effective(m, dl, dr, &phi))?;
        psi = next_psi;
        trace.push(v);
        let step = (value - v).abs();
        value = v;
        if step < SEESAW_STEP_TOL {
            converged = true;
            break;
        }
    }
    let mut settled = false;
    if let Some(p) = polish {
        for _ in 0..p.max_sweeps {
            let next_phi = lowest_eigenvector(&left_effective(m, dl, dr, &psi))?.1;
            let next_psi = lowest_eigenvector(&right_effective(m, dl, dr, &next_phi))?.1;
            let moved = aligned_distance(&next_phi, &phi) + aligned_distance(&next_psi, &psi);
            phi = next_phi;
            psi = next_psi;
            if moved < p.vector_tol {
                settled = true;
                break;
            }
        }
    }
    let vector = ProductVector::normalized(vec![phi, psi])?;
    let value = w.quadratic_form(&vector.full_vector())?;
    Ok(Descent { value, vector, converged, iterations, trace, settled })
}

/// Minimizes the witness over pure product states.
pub fn min_product_expectation(w: &Witness, opts: &SeeSawOptions) -> Result<SeeSawReport> {
    min_product_expectation_op(&w.op, opts)
}

pub(crate) fn min_product_expectation_op(w: &HermitianOperator, opts: &SeeSawOptions) -> Result<SeeSawReport> {
    w.layout().require_bipartite()?;
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument("see-saw needs at least one restart".into()));
    }
    let descents = map_indices(opts.restarts, opts.exec, |r| {
        descend(w, opts.max_iters, seed::derive(opts.seed, stream::SEESAW, r as u64))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut best = 0;
    for (r, d) in descents.iter().enumerate() {
        if d.value < descents[best].value {
            best = r;
        }
    }
    Ok(SeeSawReport {
        best_value: descents[best].value,
        best_vector: descents[best].vector.clone(),
        best_restart: best,
        restarts: opts.restarts,
        finals: descents.iter().map(|d| d.value).collect(),
        converged: descents.iter().map(|d| d.converged).collect(),
        iterations: descents.iter().map(|d| d.iterations).collect(),
        seed: opts.seed,
        traces: descents.into_iter().map(|d| d.trace).collect(),
    })
}

/// Verdict of [`certify_witness`].
#[derive(Debug, Clone, Serialize)]
pub struct Certification {
    pub is_witness_numeric: bool,
    pub min_product_value: f64,
    pub min_eigenvalue: f64,
    /// Normalized projector onto the negative eigenspace, if there is one.
    pub detection_state: Option<HermitianOperator>,
    pub detection_value: Option<f64>,
    pub seesaw: SeeSawReport,
}

/// Checks nonnegativity on product states and the presence of a negative eigenvalue.
pub fn certify_witness(w: &Witness, opts: &SeeSawOptions, tol: f64) -> Result<Certification> {
    let report = min_product_expectation(w, opts)?;
    let e = w.op.eigh()?;
    let min_eigenvalue = e.min_value();
    let negative: Vec<usize> = (0..e.values.len()).filter(|&k| e.values[k] < -tol).collect();
    let (detection_state, detection_value) = if negative.is_empty() {
        (None, None)
    } else {
        let n = w.op.dim();
        let mut p = DMatrix::<C64>::zeros(n, n);
        for &k in &negative {
            let v = e.vectors.column(k);
            p += v * v.adjoint();
        }
        p /= C64::new(negative.len() as f64, 0.0);
        let state = HermitianOperator::new(w.op.layout().clone(), p)?;
        let value = expectation(w, &state)?;
        (Some(state), Some(value))
    };
    Ok(Certification {
        is_witness_numeric: report.best_value >= -tol && min_eigenvalue < -tol,
        min_product_value: report.best_value,
        min_eigenvalue,
        detection_state,
        detection_value,
        seesaw: report,
    })
}

/// Product vectors on which an operator vanishes, with the rank of their span.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroSet {
    /// Factor dimensions shared by all members.
    pub dims: Vec<usize>,
    pub vectors: Vec<ProductVector>,
    pub span_rank: usize,
    pub zero_tol: f64,
}

impl ZeroSet {
    pub fn from_vectors(dims: Vec<usize>, vectors: Vec<ProductVector>, zero_tol: f64) -> Self {
        let span_rank = span_rank(&vectors);
        Self { dims, vectors, span_rank, zero_tol }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn full_dim(&self) -> usize {
        self.dims.iter().product()
    }
}

/// Numerical rank of the stacked full vectors (singular values above
/// `RANK_TOL * sigma_max`).
pub fn span_rank(vectors: &[ProductVector]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let cols: Vec<DVector<C64>> = vectors.iter().map(|v| v.full_vector()).collect();
    let m = DMatrix::from_columns(&cols);
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * max).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroSetOptions {
    pub target_count: usize,
    pub zero_tol: f64,
    /// Upper bound on see-saw descents.
    pub max_descents: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Not serialized: results do not depend on it.
    #[serde(skip)]
    pub exec: Execution,
}

impl ZeroSetOptions {
    /// Budget scaled to the operator's total dimension.
    pub fn for_dim(n: usize, seed: u64) -> Self {
        Self {
            target_count: 4 * n,
            zero_tol: ZERO_TOL,
            max_descents: 32 * n,
            max_iters: 500,
            seed,
            exec: Execution::Parallel,
        }
    }
}

const ZERO_BATCH: usize = 32;

/// Runs see-saw descents and keeps distinct product zeros.
///
/// Stops when `target_count` zeros are kept, when their span fills the whole
/// space, or when the descent budget runs out. May return an empty set.
pub fn collect_zero_set(w: &Witness, opts: &ZeroSetOptions) -> Result<ZeroSet> {
    collect_zero_set_op(&w.op, opts)
}

pub(crate) fn collect_zero_set_op(w: &HermitianOperator, opts: &ZeroSetOptions) -> Result<ZeroSet> {
    w.layout().require_bipartite()?;
    let (dl, dr) = w.layout().party_dims();
    let n = dl * dr;
    let mut kept: Vec<ProductVector> = Vec::new();
    let mut fulls: Vec<DVector<C64>> = Vec::new();
    let mut start = 0;
    while start < opts.max_descents && kept.len() < opts.target_count {
        let batch = ZERO_BATCH.min(opts.max_descents - start);
        let descents = map_indices(batch, opts.exec, |k| {
            descend_polished(
                w,
                opts.max_iters,
                seed::derive(opts.seed, stream::ZERO_SET, (start + k) as u64),
                Some(ZERO_POLISH),
            )
        });
        for d in descents {
            let d = d?;
            if !d.settled || d.value.abs() > opts.zero_tol || kept.len() >= opts.target_count {
                continue;
            }
            let full = d.vector.full_vector();
            let duplicate = fulls.iter().any(|f| (f.adjoint() * &full)[(0, 0)].norm() > 1.0 - DEDUP_TOL);
            if !duplicate {
                fulls.push(full);
                kept.push(d.vector);
            }
        }
        start += batch;
        if span_rank(&kept) == n {
            break;
        }
    }
    Ok(ZeroSet::from_vectors(vec![dl, dr], kept, opts.zero_tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpanningVerdict {
    Confirmed,
    NotFoundAtBudget,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpanningReport {
    pub verdict: SpanningVerdict,
    pub spanning: bool,
    pub rank: usize,
    pub total_dim: usize,
    pub zeros_found: usize,
    pub caveat: Option<String>,
}

fn spanning_of(w: &HermitianOperator, opts: &ZeroSetOptions) -> Result<SpanningReport> {
    let zs = collect_zero_set_op(w, opts)?;
    let total_dim = w.dim();
    let spanning = zs.span_rank == total_dim;
    Ok(SpanningReport {
        verdict: if spanning { SpanningVerdict::Confirmed } else { SpanningVerdict::NotFoundAtBudget },
        spanning,
        rank: zs.span_rank,
        total_dim,
        zeros_found: zs.len(),
        caveat: (!spanning).then(|| {
            "optimality not decided: spanning is only a sufficient condition and zero discovery is heuristic"
                .to_string()
        }),
    })
}

/// Spanning-rank check. Requires `w` to pass numeric certification.
pub fn has_spanning_property(w: &Witness, opts: &SeeSawOptions, tol: f64) -> Result<SpanningReport> {
    let cert = certify_witness(w, opts, tol)?;
    if !cert.is_witness_numeric {
        return Err(Error::Precondition(format!(
            "'{}' is not a witness (min product value {:.3e}, min eigenvalue {:.3e})",
            w.provenance, cert.min_product_value, cert.min_eigenvalue
        )));
    }
    spanning_of(
        &w.op,
        &ZeroSetOptions {
            max_iters: opts.max_iters,
            exec: opts.exec,
            ..ZeroSetOptions::for_dim(w.op.dim(), opts.seed)
        },
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct NdSpanningReport {
    pub nd_spanning: bool,
    pub witness: SpanningReport,
    pub gamma: SpanningReport,
}

/// Spanning for both `W` and its partial transpose.
pub fn nd_spanning(w: &Witness, opts: &SeeSawOptions, tol: f64) -> Result<NdSpanningReport> {
    let witness = has_spanning_property(w, opts, tol)?;
    let gamma = spanning_of(
        &w.gamma()?.op,
        &ZeroSetOptions {
            max_iters: opts.max_iters,
            exec: opts.exec,
            ..ZeroSetOptions::for_dim(w.op.dim(), seed::derive(opts.seed, stream::ZERO_SET, u64::MAX))
        },
    )?;
    Ok(NdSpanningReport { nd_spanning: witness.spanning && gamma.spanning, witness, gamma })
}

/// One-sided certificate that `w` detects a PPT state.
///
/// `false` means "not certified", never "decomposable".
pub fn certify_indecomposable(w: &Witness, rho: &HermitianOperator, tol: f64) -> Result<bool> {
    if rho.dim() != w.op.dim() {
        return Err(Error::DimensionMismatch { expected: w.op.dim(), got: rho.dim() });
    }
    let rho = rho.relabel(w.op.layout().clone())?;
    Ok(rho.is_psd(tol)? && rho.partial_transpose_right()?.is_psd(tol)? && expectation(w, &rho)? < -tol)
}

/// Default tolerance for witness decisions.
pub const WITNESS_TOL: f64 = PSD_TOL;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue;
    use crate::operator::SystemLayout;

    fn opts() -> SeeSawOptions {
        SeeSawOptions::new(16, 7)
    }

    #[test]
    fn effective_operators_match_quadratic_form() {
        let mut rng = seed::rng(11);
        let w = crate::sampling::random_hermitian(SystemLayout::bipartite(2, 3).unwrap(), &mut rng).unwrap();
        let phi = unit_vector(2, &mut rng);
        let psi = unit_vector(3, &mut rng);
        let q = quadratic(w.matrix(), &phi, &psi);
        let a = left_effective(w.matrix(), 2, 3, &psi);
        let b = right_effective(w.matrix(), 2, 3, &phi);
        assert!(((phi.adjoint() * a * &phi)[(0, 0)].re - q).abs() < 1e-12);
        assert!(((psi.adjoint() * b * &psi)[(0, 0)].re - q).abs() < 1e-12);
    }

    #[test]
    fn negative_identity_is_not_a_witness() {
        let w = Witness::new(HermitianOperator::identity(SystemLayout::bipartite(2, 2).unwrap()).scale(-1.0), "-I")
            .unwrap();
        let r = min_product_expectation(&w, &opts()).unwrap();
        assert!((r.best_value + 1.0).abs() < 1e-12);
        assert!(matches!(has_spanning_property(&w, &opts(), WITNESS_TOL), Err(Error::Precondition(_))));
    }

    #[test]
    fn identity_detects_nothing() {
        let w = catalogue::identity_witness(3, 3).unwrap();
        let c = certify_witness(&w, &opts(), WITNESS_TOL).unwrap();
        assert!(!c.is_witness_numeric);
        assert!(c.detection_state.is_none());
    }

    #[test]
    fn expectation_on_identity_is_trace() {
        let w = catalogue::choi();
        let id = HermitianOperator::identity(w.op.layout().clone());
        assert_eq!(expectation(&w, &id).unwrap(), w.op.trace());
        assert!(expectation(&w, &HermitianOperator::identity(SystemLayout::bipartite(2, 2).unwrap())).is_err());
    }

    #[test]
    fn restart_count_must_be_positive() {
        assert!(min_product_expectation(&catalogue::choi(), &SeeSawOptions::new(0, 1)).is_err());
    }

    #[test]
    fn zero_set_members_round_trip() {
        let w = catalogue::swap(2).unwrap();
        let zs = collect_zero_set(&w, &ZeroSetOptions::for_dim(4, 3)).unwrap();
        assert!(!zs.is_empty());
        for v in &zs.vectors {
            assert!(product_expectation(&w, v).unwrap().abs() <= zs.zero_tol);
        }
    }

    #[test]
    fn rank_of_basis_products() {
        let vs: Vec<_> = [[0, 1], [1, 0], [0, 1]].iter().map(|i| ProductVector::basis(&[2, 2], i).unwrap()).collect();
        assert_eq!(span_rank(&vs), 2);
        assert_eq!(span_rank(&[]), 0);
    }
}
