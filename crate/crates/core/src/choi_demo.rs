//! A state on `[3, 3, 2]` detected by `W_choi ⊗ P_{B'}` whose `B'`-marginal is
//! not detected by `W_choi`.
//!
//! The state is `sum_ij |i><j| ⊗ rho_ij` with diagonal blocks
//! `(S^i ⊗ I) X (S^i ⊗ I)^dagger`, `X = |0><0| ⊗ a + |2><2| ⊗ b`, and
//! off-diagonal blocks `|i><j| ⊗ a`. It is normalized by its exact trace
//! `3 Tr(a + b)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::extension::{extend_witness, ExtensionSpec};
use crate::operator::{HermitianOperator, SystemLayout};
use crate::witness::{expectation, Witness};
use crate::{Error, Result, C64};

pub use crate::catalogue::choi as choi_witness;

/// Ratio between matrix-computed values of the unit-trace state and the
/// closed forms `3 Tr(P(b-a)) / Tr(a+b)`, `3 Tr(b-a) / Tr(a+b)`.
pub const KAPPA: f64 = 1.0 / 3.0;

pub const PARAM_PSD_TOL: f64 = 1e-10;

/// The 2x2 blocks `a` and `b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbParams {
    a: HermitianOperator,
    b: HermitianOperator,
}

fn qubit(m: DMatrix<C64>) -> Result<HermitianOperator> {
    HermitianOperator::new(SystemLayout::single(2)?, m)
}

impl AbParams {
    pub fn new(a: DMatrix<C64>, b: DMatrix<C64>) -> Result<Self> {
        let (a, b) = (qubit(a)?, qubit(b)?);
        for (name, m) in [("a", &a), ("b", &b)] {
            let min = m.min_eigenvalue()?;
            if min < -PARAM_PSD_TOL {
                return Err(Error::NotPsd(format!("{name} has eigenvalue {min:.3e}")));
            }
        }
        if a.trace() + b.trace() <= 0.0 {
            return Err(Error::InvalidArgument("Tr(a) + Tr(b) must be positive".into()));
        }
        Ok(Self { a, b })
    }

    pub fn from_real(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> Result<Self> {
        Self::new(real2(a), real2(b))
    }

    pub fn a(&self) -> &HermitianOperator {
        &self.a
    }

    pub fn b(&self) -> &HermitianOperator {
        &self.b
    }

    /// Reads `{"a": operator, "b": operator}`.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(serde::Deserialize)]
        struct Wire {
            a: HermitianOperator,
            b: HermitianOperator,
        }
        let wire: Wire = serde_json::from_str(text)?;
        Self::new(wire.a.into_matrix(), wire.b.into_matrix())
    }

    /// `a = [[1,1],[1,1]]`, `b = I`.
    pub fn default_exhibit() -> Self {
        Self::from_real([[1.0, 1.0], [1.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]]).expect("valid")
    }
}

pub fn real2(m: [[f64; 2]; 2]) -> DMatrix<C64> {
    DMatrix::from_fn(2, 2, |i, j| C64::new(m[i][j], 0.0))
}

/// Cyclic shift `S|k> = |k+1 mod d>`.
pub fn shift_operator(d: usize) -> Result<DMatrix<C64>> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("shift needs d >= 2, got {d}")));
    }
    let mut s = DMatrix::zeros(d, d);
    for k in 0..d {
        s[((k + 1) % d, k)] = C64::new(1.0, 0.0);
    }
    Ok(s)
}

fn ket_bra(d: usize, i: usize, j: usize) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(d, d);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

/// Unnormalized block matrix for arbitrary Hermitian `a`, `b`.
pub fn assemble_rho_abb(a: &DMatrix<C64>, b: &DMatrix<C64>) -> Result<HermitianOperator> {
    if a.shape() != (2, 2) || b.shape() != (2, 2) {
        return Err(Error::InvalidArgument("a and b must be 2x2".into()));
    }
    let s = shift_operator(3)?;
    let id2 = DMatrix::<C64>::identity(2, 2);
    let x = ket_bra(3, 0, 0).kronecker(a) + ket_bra(3, 2, 2).kronecker(b);
    let mut full = DMatrix::<C64>::zeros(18, 18);
    let mut shift_pow = DMatrix::<C64>::identity(3, 3);
    for i in 0..3 {
        let u = shift_pow.kronecker(&id2);
        for j in 0..3 {
            let block = if i == j { &u * &x * u.adjoint() } else { ket_bra(3, i, j).kronecker(a) };
            full += ket_bra(3, i, j).kronecker(&block);
        }
        shift_pow = &s * shift_pow;
    }
    HermitianOperator::new(SystemLayout::new(vec![3, 3, 2], 1)?, full)
}

/// Unit-trace state on `[3, 3, 2]`.
pub fn rho_abb(params: &AbParams) -> Result<HermitianOperator> {
    let raw = assemble_rho_abb(params.a.matrix(), params.b.matrix())?;
    let tr = raw.trace();
    Ok(raw.scale(1.0 / tr))
}

/// `Tr_{B'}`, keeping `[3, 3]`.
pub fn reduce(rho: &HermitianOperator) -> Result<HermitianOperator> {
    rho.partial_trace(&[0, 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExhibitValues {
    /// `Tr((W ⊗ P) rho_ABB')` from matrices.
    pub ext_value: f64,
    /// `Tr(W Tr_{B'} rho_ABB')` from matrices.
    pub reduced_value: f64,
    /// `3 Tr(P (b - a)) / Tr(a + b)`.
    pub ext_closed_form: f64,
    /// `3 Tr(b - a) / Tr(a + b)`.
    pub reduced_closed_form: f64,
}

pub fn closed_forms(params: &AbParams, cap_right: &HermitianOperator) -> Result<(f64, f64)> {
    let diff = params.b.sub(&params.a)?;
    let pref = 3.0 / (params.a.trace() + params.b.trace());
    Ok((pref * cap_right.trace_product(&diff)?.re, pref * diff.trace()))
}

pub fn theorem4_values(params: &AbParams, cap_right: &HermitianOperator) -> Result<ExhibitValues> {
    let w = choi_witness();
    let rho = rho_abb(params)?;
    let ext = extend_witness(&w, &ExtensionSpec::right_only(cap_right.clone())?)?;
    let ext_value = expectation(&ext, &rho)?;
    let reduced_value = expectation(&w, &reduce(&rho)?)?;
    let (ext_closed_form, reduced_closed_form) = closed_forms(params, cap_right)?;
    Ok(ExhibitValues { ext_value, reduced_value, ext_closed_form, reduced_closed_form })
}

pub const EXHIBIT_REDUCED_TOL: f64 = 1e-10;
pub const EXHIBIT_PSD_TOL: f64 = 1e-9;

/// Machine-checked triple `(W_ABB', rho_ABB', rho_AB)`.
#[derive(Debug, Clone, Serialize)]
pub struct Exhibit {
    pub params: AbParams,
    pub cap_right: HermitianOperator,
    pub witness: Witness,
    pub rho_abb: HermitianOperator,
    pub rho_ab: HermitianOperator,
    pub values: ExhibitValues,
    pub kappa: f64,
    pub rho_min_eigenvalue: f64,
    pub rho_psd: bool,
    pub detected_extended: bool,
    pub undetected_reduced: bool,
    pub accepted: bool,
    pub rejection: Option<String>,
}

pub fn exhibit_for(params: AbParams, cap_right: HermitianOperator) -> Result<Exhibit> {
    if params.a.trace() <= 0.0 {
        return Err(Error::Precondition(
            "a11 = a22 = 0 leaves the off-diagonal blocks empty; the exhibit needs Tr(a) > 0".into(),
        ));
    }
    let w = choi_witness();
    let witness = extend_witness(&w, &ExtensionSpec::right_only(cap_right.clone())?)?;
    let rho = rho_abb(&params)?;
    let rho_ab = reduce(&rho)?;
    let values = theorem4_values(&params, &cap_right)?;
    let rho_min_eigenvalue = rho.min_eigenvalue()?;
    let rho_psd = rho_min_eigenvalue >= -EXHIBIT_PSD_TOL;
    let detected_extended = values.ext_value < -1e-6 * KAPPA;
    let undetected_reduced = values.reduced_value.abs() <= EXHIBIT_REDUCED_TOL;
    let mut reasons = Vec::new();
    if !detected_extended {
        reasons.push(format!(
            "extended value {:.6e} is not negative; detection needs Tr(P(b - a)) < 0 (for the all-ones cap, b12 < a12)",
            values.ext_value
        ));
    }
    if !undetected_reduced {
        reasons.push(format!("reduced value {:.6e} is nonzero; needs Tr(b) = Tr(a)", values.reduced_value));
    }
    if !rho_psd {
        reasons.push(format!("state has eigenvalue {rho_min_eigenvalue:.3e}"));
    }
    Ok(Exhibit {
        params,
        cap_right,
        witness,
        rho_abb: rho,
        rho_ab,
        values,
        kappa: KAPPA,
        rho_min_eigenvalue,
        rho_psd,
        detected_extended,
        undetected_reduced,
        accepted: reasons.is_empty(),
        rejection: (!reasons.is_empty()).then(|| reasons.join("; ")),
    })
}

/// Default exhibit: `a = [[1,1],[1,1]]`, `b = I`, `P_{B'} = [[1,1],[1,1]]`.
pub fn nontrivial_extension_exhibit() -> Result<Exhibit> {
    let cap = qubit(real2([[1.0, 1.0], [1.0, 1.0]]))?;
    exhibit_for(AbParams::default_exhibit(), cap)
}
