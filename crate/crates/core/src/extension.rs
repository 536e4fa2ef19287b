//! Tensor-product extensions `P_{A'} ⊗ W_{AB} ⊗ P_{B'}` of witnesses and states.
//!
//! The extended layout is `[A', A, B, B']` with the cut after `A`, so the
//! parties are `A'A | BB'` and no matrix permutation is ever needed.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::operator::{HermitianOperator, ProductVector, SystemLayout};
use crate::witness::{Witness, ZeroSet};
use crate::{Error, Result, C64};

pub const CAP_PSD_TOL: f64 = 1e-10;
/// Frobenius tolerance for the partial-transpose structure check.
pub const GAMMA_CHECK_TOL: f64 = 1e-10;

/// Positive semidefinite caps attached left of `A` and right of `B`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionSpec {
    cap_left: HermitianOperator,
    cap_right: HermitianOperator,
}

impl ExtensionSpec {
    pub fn new(cap_left: HermitianOperator, cap_right: HermitianOperator) -> Result<Self> {
        for (side, cap) in [("left", &cap_left), ("right", &cap_right)] {
            if cap.frobenius_norm() == 0.0 {
                return Err(Error::InvalidArgument(format!("{side} cap is the zero operator")));
            }
            let min = cap.min_eigenvalue()?;
            if min < -CAP_PSD_TOL {
                return Err(Error::NotPsd(format!("{side} cap has eigenvalue {min:.3e}")));
            }
        }
        Ok(Self { cap_left, cap_right })
    }

    /// Caps of dimension 1 equal to the scalar `1`.
    pub fn trivial() -> Self {
        let one = HermitianOperator::identity(SystemLayout::single(1).expect("valid"));
        Self::new(one.clone(), one).expect("identity caps")
    }

    /// `1 ⊗ W ⊗ cap_right`.
    pub fn right_only(cap_right: HermitianOperator) -> Result<Self> {
        Self::new(HermitianOperator::identity(SystemLayout::single(1)?), cap_right)
    }

    pub fn cap_left(&self) -> &HermitianOperator {
        &self.cap_left
    }

    pub fn cap_right(&self) -> &HermitianOperator {
        &self.cap_right
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Wire {
            cap_left: HermitianOperator,
            cap_right: HermitianOperator,
        }
        let wire: Wire = serde_json::from_str(text)?;
        Self::new(wire.cap_left, wire.cap_right)
    }
}

fn extend_op(op: &HermitianOperator, spec: &ExtensionSpec) -> Result<HermitianOperator> {
    let inner = op.layout();
    let mut dims = spec.cap_left.dims().to_vec();
    dims.extend_from_slice(inner.dims());
    dims.extend_from_slice(spec.cap_right.dims());
    let cut = spec.cap_left.layout().len() + inner.cut();
    spec.cap_left.kron(op).kron(&spec.cap_right).relabel(SystemLayout::new(dims, cut)?)
}

/// `P_{A'} ⊗ W ⊗ P_{B'}` on `[A', A, B, B']`, cut `A'A | BB'`.
pub fn extend_witness(w: &Witness, spec: &ExtensionSpec) -> Result<Witness> {
    let op = extend_op(&w.op, spec)?;
    Witness::new(op, format!("extended({}, P_A', P_B')", w.provenance))
}

/// `P~_{A'} ⊗ rho ⊗ P~_{B'}`, optionally normalized to unit trace.
pub fn extend_state(rho: &HermitianOperator, spec: &ExtensionSpec, normalize: bool) -> Result<HermitianOperator> {
    let min = rho.min_eigenvalue()?;
    if min < -CAP_PSD_TOL {
        return Err(Error::NotPsd(format!("state has eigenvalue {min:.3e}")));
    }
    let out = extend_op(rho, spec)?;
    if normalize {
        let tr = out.trace();
        if tr <= 0.0 {
            return Err(Error::InvalidArgument("extended state has zero trace".into()));
        }
        Ok(out.scale(1.0 / tr))
    } else {
        Ok(out)
    }
}

/// `{e_i ⊗ phi ⊗ psi ⊗ f_j}` over computational bases of `A'` and `B'`.
pub fn extended_zero_set(zeros: &ZeroSet, d_left: usize, d_right: usize) -> Result<ZeroSet> {
    if zeros.is_empty() {
        return Err(Error::Precondition("zero set is empty".into()));
    }
    if d_left == 0 || d_right == 0 {
        return Err(Error::InvalidArgument("cap dimensions must be positive".into()));
    }
    let unit = |d: usize, i: usize| {
        let mut v = DVector::<C64>::zeros(d);
        v[i] = C64::new(1.0, 0.0);
        v
    };
    let mut vectors = Vec::with_capacity(zeros.len() * d_left * d_right);
    for i in 0..d_left {
        for z in &zeros.vectors {
            for j in 0..d_right {
                let e = ProductVector::new(vec![unit(d_left, i)])?;
                let f = ProductVector::new(vec![unit(d_right, j)])?;
                vectors.push(e.tensor(z).tensor(&f));
            }
        }
    }
    let mut dims = vec![d_left];
    dims.extend_from_slice(&zeros.dims);
    dims.push(d_right);
    Ok(ZeroSet::from_vectors(dims, vectors, zeros.zero_tol))
}

/// Checks `(P ⊗ W ⊗ Q)^Γ = P ⊗ W^Γ ⊗ Q^T` in Frobenius norm.
pub fn gamma_of_extension_check(w: &Witness, spec: &ExtensionSpec) -> Result<bool> {
    let lhs = extend_witness(w, spec)?.op.partial_transpose_right()?;
    let rhs = spec.cap_left.kron(&w.op.partial_transpose_right()?).kron(&spec.cap_right.transpose());
    Ok(lhs.distance(&rhs) <= GAMMA_CHECK_TOL)
}
