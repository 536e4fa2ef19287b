//! Measurement-device-independent evaluation of a witness.
//!
//! The witness on `[d_A, d_B]` is expanded over products of trusted input
//! states, `W = sum_st beta_st sigma_s ⊗ tau_t`. Each party feeds the transpose
//! of its input together with its half of the unknown state into a joint
//! measurement whose first outcome has POVM element `E` (on `A'A`) or `F` (on
//! `BB'`). With `E = F = P+` the weighted click sum equals
//! `Tr(W rho) / (d_A d_B)`; for separable `rho` it is nonnegative for every
//! choice of POVM elements.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::catalogue::psi_plus_vector;
use crate::extension::{extend_witness, ExtensionSpec};
use crate::operator::{trace_of_product, HermitianOperator, ProductVector, SeparableEnsemble, SystemLayout};
use crate::par::{map_indices, Execution};
use crate::sampling;
use crate::seed::{self, stream};
use crate::witness::Witness;
use crate::{Error, Result, C64};

pub const GRAM_RANK_TOL: f64 = 1e-8;
pub const DECOMPOSITION_TOL: f64 = 1e-9;
pub const BETA_IMAG_TOL: f64 = 1e-10;
pub const POVM_TOL: f64 = 1e-10;
pub const PROBABILITY_TOL: f64 = 1e-10;
/// Separable-safety and route-agreement threshold used by the audit.
pub const AUDIT_TOL: f64 = 1e-9;

/// `d^2` linearly independent density matrices on `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateBasis {
    dim: usize,
    states: Vec<HermitianOperator>,
}

fn gram(states: &[HermitianOperator]) -> DMatrix<f64> {
    let n = states.len();
    DMatrix::from_fn(n, n, |s, t| states[s].trace_product(&states[t]).expect("equal dims").re)
}

fn numerical_rank_sym(g: &DMatrix<f64>) -> usize {
    if g.nrows() == 0 {
        return 0;
    }
    let eig = g.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
    if max == 0.0 {
        return 0;
    }
    eig.eigenvalues.iter().filter(|v| v.abs() > GRAM_RANK_TOL * max).count()
}

impl StateBasis {
    pub fn new(states: Vec<HermitianOperator>) -> Result<Self> {
        let dim = states.first().map(|s| s.dim()).ok_or_else(|| Error::InvalidArgument("basis is empty".into()))?;
        if states.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "{} states cannot span Hermitian operators on C^{dim}",
                states.len()
            )));
        }
        for (k, s) in states.iter().enumerate() {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: s.dim() });
            }
            if (s.trace() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!("state {k} has trace {}", s.trace())));
            }
            if !s.is_psd(1e-10)? {
                return Err(Error::NotPsd(format!("basis state {k}")));
            }
        }
        let full = gram(&states);
        if numerical_rank_sym(&full) < dim * dim {
            let mut dependent = Vec::new();
            let mut kept: Vec<usize> = Vec::new();
            for k in 0..states.len() {
                let mut trial = kept.clone();
                trial.push(k);
                let g = DMatrix::from_fn(trial.len(), trial.len(), |i, j| full[(trial[i], trial[j])]);
                if numerical_rank_sym(&g) == trial.len() {
                    kept.push(k);
                } else {
                    dependent.push(k);
                }
            }
            return Err(Error::RankDeficient { members: dependent });
        }
        Ok(Self { dim, states })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn states(&self) -> &[HermitianOperator] {
        &self.states
    }

    pub fn gram(&self) -> DMatrix<f64> {
        gram(&self.states)
    }
}

/// `|m><m|`, then projectors onto `(|m>+|n>)/sqrt2` and `(|m>+i|n>)/sqrt2` for `m < n`.
pub fn tomographic_basis(d: usize) -> Result<StateBasis> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("tomographic basis needs d >= 2, got {d}")));
    }
    let layout = SystemLayout::single(d)?;
    let ket = |entries: &[(usize, C64)]| {
        let mut v = DVector::<C64>::zeros(d);
        for &(i, z) in entries {
            v[i] = z;
        }
        v
    };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut states = Vec::with_capacity(d * d);
    for m in 0..d {
        states.push(HermitianOperator::projector(layout.clone(), &ket(&[(m, C64::new(1.0, 0.0))]))?);
    }
    for m in 0..d {
        for n in (m + 1)..d {
            states.push(HermitianOperator::projector(
                layout.clone(),
                &ket(&[(m, C64::new(s, 0.0)), (n, C64::new(s, 0.0))]),
            )?);
            states.push(HermitianOperator::projector(
                layout.clone(),
                &ket(&[(m, C64::new(s, 0.0)), (n, C64::new(0.0, s))]),
            )?);
        }
    }
    StateBasis::new(states)
}

/// Real coefficients of `W` over products of basis states.
#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    /// `beta[s][t]` multiplies `sigma_s ⊗ tau_t` (untransposed).
    #[serde(serialize_with = "serialize_rows")]
    pub beta: DMatrix<f64>,
    pub residual: f64,
    pub max_imag: f64,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn serialize_rows<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    rows(m).serialize(s)
}

/// `sum_st beta_st sigma_s ⊗ tau_t`.
pub fn reconstruct(beta: &DMatrix<f64>, left: &StateBasis, right: &StateBasis) -> Result<HermitianOperator> {
    if beta.nrows() != left.states.len() || beta.ncols() != right.states.len() {
        return Err(Error::DimensionMismatch {
            expected: left.states.len() * right.states.len(),
            got: beta.nrows() * beta.ncols(),
        });
    }
    let (dl, dr) = (left.dim, right.dim);
    let mut acc = DMatrix::<C64>::zeros(dl * dr, dl * dr);
    for (s, sigma) in left.states.iter().enumerate() {
        let mut inner = DMatrix::<C64>::zeros(dr, dr);
        for (t, tau) in right.states.iter().enumerate() {
            inner += tau.matrix() * C64::new(beta[(s, t)], 0.0);
        }
        acc += sigma.matrix().kronecker(&inner);
    }
    HermitianOperator::new(SystemLayout::bipartite(dl, dr)?, acc)
}

/// Solves `sum beta_st sigma_s ⊗ tau_t = W` in the least-squares sense.
///
/// The normal equations factor over the two parties, so
/// `beta = G_L^{-1} M G_R^{-1}` with `M_st = Tr((sigma_s ⊗ tau_t) W)` and Gram
/// matrices `G`.
pub fn decompose_witness(w: &Witness, left: &StateBasis, right: &StateBasis) -> Result<Decomposition> {
    let (da, db) = w.party_dims();
    if left.dim != da {
        return Err(Error::DimensionMismatch { expected: da, got: left.dim });
    }
    if right.dim != db {
        return Err(Error::DimensionMismatch { expected: db, got: right.dim });
    }
    let (nl, nr) = (left.states.len(), right.states.len());
    let wm = w.op.matrix();
    let mut m = DMatrix::<f64>::zeros(nl, nr);
    let mut max_imag: f64 = 0.0;
    for (s, sigma) in left.states.iter().enumerate() {
        for (t, tau) in right.states.iter().enumerate() {
            let z = trace_of_product(&sigma.matrix().kronecker(tau.matrix()), wm);
            max_imag = max_imag.max(z.im.abs());
            m[(s, t)] = z.re;
        }
    }
    if max_imag > BETA_IMAG_TOL * 1.0_f64.max(w.op.frobenius_norm()) {
        return Err(Error::Numerical(format!("basis overlaps with the witness have imaginary part {max_imag:.3e}")));
    }
    let gl = left.gram().cholesky().ok_or_else(|| Error::Numerical("left Gram matrix not positive definite".into()))?;
    let gr =
        right.gram().cholesky().ok_or_else(|| Error::Numerical("right Gram matrix not positive definite".into()))?;
    let x = gl.solve(&m);
    let beta = gr.solve(&x.transpose()).transpose();
    let residual = reconstruct(&beta, left, right)?.distance(&w.op);
    if residual > DECOMPOSITION_TOL * 1.0_f64.max(w.op.frobenius_norm()) {
        return Err(Error::Numerical(format!("decomposition residual {residual:.3e} exceeds {DECOMPOSITION_TOL:.0e}")));
    }
    Ok(Decomposition { beta, residual, max_imag })
}

/// First element of a two-outcome POVM: `0 <= E <= I`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PovmElement(HermitianOperator);

impl PovmElement {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let e = op.eigh()?;
        let (max, min) = (e.values[0], e.min_value());
        if min < -POVM_TOL || max > 1.0 + POVM_TOL {
            return Err(Error::InvalidArgument(format!(
                "POVM element spectrum [{min:.3e}, {max:.3e}] is outside [0, 1]"
            )));
        }
        Ok(Self(op))
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// `|Psi+><Psi+|` on `[d, d]`.
pub fn ideal_projector(d: usize) -> Result<PovmElement> {
    PovmElement::new(HermitianOperator::projector(SystemLayout::bipartite(d, d)?, &psi_plus_vector(d))?)
}

fn check_povm_dims(
    rho: &HermitianOperator,
    d_in_left: usize,
    d_in_right: usize,
    e: &PovmElement,
    f: &PovmElement,
) -> Result<(usize, usize)> {
    let layout = rho.layout();
    layout.require_bipartite()?;
    let (pa, pb) = layout.party_dims();
    if e.dim() != d_in_left * pa {
        return Err(Error::DimensionMismatch { expected: d_in_left * pa, got: e.dim() });
    }
    if f.dim() != pb * d_in_right {
        return Err(Error::DimensionMismatch { expected: pb * d_in_right, got: f.dim() });
    }
    Ok((pa, pb))
}

/// `rho ⊗ sigma^T ⊗ tau^T` reordered from `[A, B, A', B']` to `[A', A, B, B']`.
fn prepared_input(
    rho: &HermitianOperator,
    sigma: &HermitianOperator,
    tau: &HermitianOperator,
) -> Result<HermitianOperator> {
    let (pa, pb) = rho.layout().party_dims();
    let rho = rho.relabel(SystemLayout::bipartite(pa, pb)?)?;
    let sigma_t = sigma.transpose().relabel(SystemLayout::single(sigma.dim())?)?;
    let tau_t = tau.transpose().relabel(SystemLayout::single(tau.dim())?)?;
    rho.kron(&sigma_t).kron(&tau_t).permute_systems(&[2, 0, 1, 3])
}

fn checked_probability(z: C64) -> Result<f64> {
    if z.im.abs() > PROBABILITY_TOL || z.re < -PROBABILITY_TOL || z.re > 1.0 + PROBABILITY_TOL {
        return Err(Error::Numerical(format!("click probability {z} outside [0, 1]")));
    }
    Ok(z.re)
}

/// `Tr((rho ⊗ sigma^T ⊗ tau^T)(E ⊗ F))` with systems in `A', A, B, B'` order.
pub fn joint_probability(
    rho: &HermitianOperator,
    sigma: &HermitianOperator,
    tau: &HermitianOperator,
    povm_left: &PovmElement,
    povm_right: &PovmElement,
) -> Result<f64> {
    check_povm_dims(rho, sigma.dim(), tau.dim(), povm_left, povm_right)?;
    let x = prepared_input(rho, sigma, tau)?;
    let ef = povm_left.op().matrix().kronecker(povm_right.op().matrix());
    checked_probability(trace_of_product(x.matrix(), &ef))
}

/// Trusted inputs, coefficients and (possibly untrusted) measurements.
#[derive(Debug, Clone)]
pub struct MdiewScenario {
    pub witness: Witness,
    pub basis_left: StateBasis,
    pub basis_right: StateBasis,
    pub beta: DMatrix<f64>,
    pub povm_left: PovmElement,
    pub povm_right: PovmElement,
}

impl MdiewScenario {
    pub fn new(
        witness: Witness,
        basis_left: StateBasis,
        basis_right: StateBasis,
        beta: DMatrix<f64>,
        povm_left: PovmElement,
        povm_right: PovmElement,
    ) -> Result<Self> {
        let (da, db) = witness.party_dims();
        if basis_left.dim != da || basis_right.dim != db {
            return Err(Error::InvalidArgument(format!(
                "bases on C^{} and C^{} do not match witness parties [{da}, {db}]",
                basis_left.dim, basis_right.dim
            )));
        }
        let residual = reconstruct(&beta, &basis_left, &basis_right)?.distance(&witness.op);
        if residual > DECOMPOSITION_TOL * 1.0_f64.max(witness.op.frobenius_norm()) {
            return Err(Error::InvalidArgument(format!("beta reconstructs the witness with residual {residual:.3e}")));
        }
        if !povm_left.dim().is_multiple_of(da) || !povm_right.dim().is_multiple_of(db) {
            return Err(Error::InvalidArgument("POVM dimensions are not multiples of the input dimensions".into()));
        }
        Ok(Self { witness, basis_left, basis_right, beta, povm_left, povm_right })
    }

    /// Tomographic bases and ideal `P+` measurements.
    pub fn ideal(witness: Witness) -> Result<Self> {
        let (da, db) = witness.party_dims();
        let basis_left = tomographic_basis(da)?;
        let basis_right = tomographic_basis(db)?;
        let dec = decompose_witness(&witness, &basis_left, &basis_right)?;
        Self::new(witness, basis_left, basis_right, dec.beta, ideal_projector(da)?, ideal_projector(db)?)
    }

    pub fn with_povms(&self, povm_left: PovmElement, povm_right: PovmElement) -> Result<Self> {
        Self::new(
            self.witness.clone(),
            self.basis_left.clone(),
            self.basis_right.clone(),
            self.beta.clone(),
            povm_left,
            povm_right,
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: ScenarioWire = serde_json::from_str(text)?;
        let beta_rows = wire.beta.len();
        let beta_cols = wire.beta.first().map_or(0, |r| r.len());
        if wire.beta.iter().any(|r| r.len() != beta_cols) {
            return Err(Error::InvalidArgument("ragged beta".into()));
        }
        let beta = DMatrix::from_fn(beta_rows, beta_cols, |i, j| wire.beta[i][j]);
        Self::new(
            Witness::new(wire.witness, "scenario")?,
            StateBasis::new(wire.basis_left)?,
            StateBasis::new(wire.basis_right)?,
            beta,
            PovmElement::new(wire.povm_left)?,
            PovmElement::new(wire.povm_right)?,
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ScenarioWire::from(self))?)
    }
}

#[derive(Serialize, Deserialize)]
struct ScenarioWire {
    witness: HermitianOperator,
    basis_left: Vec<HermitianOperator>,
    basis_right: Vec<HermitianOperator>,
    beta: Vec<Vec<f64>>,
    povm_left: HermitianOperator,
    povm_right: HermitianOperator,
}

impl From<&MdiewScenario> for ScenarioWire {
    fn from(s: &MdiewScenario) -> Self {
        ScenarioWire {
            witness: s.witness.op.clone(),
            basis_left: s.basis_left.states.clone(),
            basis_right: s.basis_right.states.clone(),
            beta: rows(&s.beta),
            povm_left: s.povm_left.op().clone(),
            povm_right: s.povm_right.op().clone(),
        }
    }
}

impl Serialize for MdiewScenario {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScenarioWire::from(self).serialize(s)
    }
}

/// `sum_st beta_st P(0,0|st)` with the scenario's own measurements.
pub fn mdiew_value(scenario: &MdiewScenario, rho: &HermitianOperator) -> Result<f64> {
    mdiew_value_with(scenario, rho, &scenario.povm_left, &scenario.povm_right)
}

/// `sum_st beta_st P(0,0|st)` with the given measurements.
pub fn mdiew_value_with(
    scenario: &MdiewScenario,
    rho: &HermitianOperator,
    povm_left: &PovmElement,
    povm_right: &PovmElement,
) -> Result<f64> {
    check_povm_dims(rho, scenario.basis_left.dim, scenario.basis_right.dim, povm_left, povm_right)?;
    let ef = povm_left.op().matrix().kronecker(povm_right.op().matrix());
    let mut total = 0.0;
    for (s, sigma) in scenario.basis_left.states.iter().enumerate() {
        for (t, tau) in scenario.basis_right.states.iter().enumerate() {
            let beta = scenario.beta[(s, t)];
            if beta == 0.0 {
                continue;
            }
            let x = prepared_input(rho, sigma, tau)?;
            total += beta * checked_probability(trace_of_product(x.matrix(), &ef))?;
        }
    }
    Ok(total)
}

/// `sum_i p_i Tr(W^i (E ⊗ F))` with `W^i = rho_A^i ⊗ W^T ⊗ rho_B^i`
/// reordered to `[A', A, B, B']`.
///
/// The full transpose appears because the coefficients multiply
/// untransposed inputs while the parties prepare their transposes.
pub fn extended_route_value(
    scenario: &MdiewScenario,
    ensemble: &SeparableEnsemble,
    povm_left: &PovmElement,
    povm_right: &PovmElement,
) -> Result<f64> {
    let rho = ensemble.density();
    check_povm_dims(&rho, scenario.basis_left.dim, scenario.basis_right.dim, povm_left, povm_right)?;
    let wt = Witness::new(scenario.witness.op.transpose(), format!("transpose({})", scenario.witness.provenance))?;
    let ef = povm_left.op().matrix().kronecker(povm_right.op().matrix());
    let mut total = 0.0;
    for (p, member) in ensemble.weights().iter().zip(ensemble.members()) {
        let [phi, psi] = member.factors() else {
            return Err(Error::InvalidArgument("ensemble members must have two party factors".into()));
        };
        let cap = |v: &DVector<C64>| HermitianOperator::projector(SystemLayout::single(v.len())?, v);
        let spec = ExtensionSpec::new(cap(phi)?, cap(psi)?)?;
        let ext = extend_witness(&wt, &spec)?.op.permute_systems(&[1, 0, 3, 2])?;
        total += p * trace_of_product(ext.matrix(), &ef).re;
    }
    Ok(total)
}

/// How audit trials draw the measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PovmModel {
    /// `P+` on both sides.
    Ideal,
    /// `P+` conjugated by independent random local unitaries.
    Misaligned,
    /// Arbitrary `0 <= E <= I` from the Gaussian-square construction.
    Arbitrary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditOptions {
    pub trials: usize,
    pub seed: u64,
    /// Pure product states per separable ensemble.
    pub components: usize,
    pub povm_model: PovmModel,
    /// Physical dimensions of `A` and `B` when the state is embedded into
    /// degrees of freedom other than the intended ones (arbitrary model only).
    pub embed: Option<(usize, usize)>,
    /// Not serialized: results do not depend on it.
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            trials: 1000,
            seed: 42,
            components: 3,
            povm_model: PovmModel::Arbitrary,
            embed: None,
            exec: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub direct: f64,
    pub extended: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub options: AuditOptions,
    pub min_direct: f64,
    pub min_extended: f64,
    pub max_route_gap: f64,
    pub worst_trial: usize,
    pub negative_trials: usize,
    pub disagreeing_trials: usize,
    pub passed: bool,
}

fn local_unitary_projector<R: rand::Rng + ?Sized>(d_in: usize, d_phys: usize, rng: &mut R) -> Result<PovmElement> {
    let ideal = ideal_projector(d_in)?;
    let u = sampling::unitary(d_in, rng).kronecker(&sampling::unitary(d_phys, rng));
    PovmElement::new(ideal.op().conjugate_by(&u)?)
}

fn audit_trial(scenario: &MdiewScenario, opts: &AuditOptions, index: usize) -> Result<TrialOutcome> {
    let mut rng = seed::rng(seed::derive(opts.seed, stream::AUDIT, index as u64));
    let (da, db) = scenario.witness.party_dims();
    let (din_l, din_r) = (scenario.basis_left.dim, scenario.basis_right.dim);
    let base = sampling::random_separable_with(&SystemLayout::bipartite(da, db)?, opts.components, &mut rng)?;
    let ensemble = match opts.embed {
        None => base,
        Some((pa, pb)) => {
            let va = sampling::isometry(da, pa, &mut rng)?;
            let vb = sampling::isometry(db, pb, &mut rng)?;
            let members = base
                .members()
                .iter()
                .map(|m| ProductVector::normalized(vec![&va * &m.factors()[0], &vb * &m.factors()[1]]))
                .collect::<Result<Vec<_>>>()?;
            SeparableEnsemble::new(SystemLayout::bipartite(pa, pb)?, base.weights().to_vec(), members)?
        }
    };
    let (pa, pb) = ensemble.layout().party_dims();
    let (e, f) = match opts.povm_model {
        PovmModel::Ideal | PovmModel::Misaligned if (pa, pb) != (din_l, din_r) => {
            return Err(Error::InvalidArgument(
                "ideal and misaligned measurements need physical dimensions equal to the input dimensions".into(),
            ))
        }
        PovmModel::Ideal => (ideal_projector(din_l)?, ideal_projector(din_r)?),
        PovmModel::Misaligned => {
            (local_unitary_projector(din_l, pa, &mut rng)?, local_unitary_projector(pb, din_r, &mut rng)?)
        }
        PovmModel::Arbitrary => (
            PovmElement::new(sampling::random_povm_element_on(SystemLayout::bipartite(din_l, pa)?, &mut rng)?)?,
            PovmElement::new(sampling::random_povm_element_on(SystemLayout::bipartite(pb, din_r)?, &mut rng)?)?,
        ),
    };
    let direct = mdiew_value_with(scenario, &ensemble.density(), &e, &f)?;
    let extended = extended_route_value(scenario, &ensemble, &e, &f)?;
    Ok(TrialOutcome { direct, extended })
}

/// Runs `opts.trials` independent trials and reports the extremes.
pub fn run_audit(scenario: &MdiewScenario, opts: &AuditOptions) -> Result<(AuditReport, Vec<TrialOutcome>)> {
    if opts.trials == 0 {
        return Err(Error::InvalidArgument("audit needs at least one trial".into()));
    }
    if opts.components == 0 {
        return Err(Error::InvalidArgument("ensembles need at least one component".into()));
    }
    let outcomes = map_indices(opts.trials, opts.exec, |i| audit_trial(scenario, opts, i))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.direct < outcomes[worst].direct {
            worst = i;
        }
    }
    let gap = |o: &TrialOutcome| (o.direct - o.extended).abs();
    let negative_trials = outcomes.iter().filter(|o| o.direct < -AUDIT_TOL || o.extended < -AUDIT_TOL).count();
    let disagreeing_trials = outcomes.iter().filter(|o| gap(o) > AUDIT_TOL).count();
    let report = AuditReport {
        options: *opts,
        min_direct: outcomes[worst].direct,
        min_extended: outcomes.iter().map(|o| o.extended).fold(f64::INFINITY, f64::min),
        max_route_gap: outcomes.iter().map(gap).fold(0.0, f64::max),
        worst_trial: worst,
        negative_trials,
        disagreeing_trials,
        passed: negative_trials == 0 && disagreeing_trials == 0,
    };
    Ok((report, outcomes))
}

/// Separable-nonnegativity audit; per-trial outcomes are dropped.
pub fn separable_nonnegativity_audit(scenario: &MdiewScenario, opts: &AuditOptions) -> Result<AuditReport> {
    Ok(run_audit(scenario, opts)?.0)
}
