//! Bundled witnesses and states.

use nalgebra::DVector;

use crate::operator::{HermitianOperator, SystemLayout};
use crate::witness::Witness;
use crate::{Result, C64};

#[rustfmt::skip]
const CHOI: [[f64; 9]; 9] = [
    [ 1.0, 0.0, 0.0,  0.0, -1.0, 0.0,  0.0, 0.0, -1.0],
    [ 0.0, 0.0, 0.0,  0.0,  0.0, 0.0,  0.0, 0.0,  0.0],
    [ 0.0, 0.0, 1.0,  0.0,  0.0, 0.0,  0.0, 0.0,  0.0],
    [ 0.0, 0.0, 0.0,  1.0,  0.0, 0.0,  0.0, 0.0,  0.0],
    [-1.0, 0.0, 0.0,  0.0,  1.0, 0.0,  0.0, 0.0, -1.0],
    [ 0.0, 0.0, 0.0,  0.0,  0.0, 0.0,  0.0, 0.0,  0.0],
    [ 0.0, 0.0, 0.0,  0.0,  0.0, 0.0,  0.0, 0.0,  0.0],
    [ 0.0, 0.0, 0.0,  0.0,  0.0, 0.0,  0.0, 1.0,  0.0],
    [-1.0, 0.0, 0.0,  0.0, -1.0, 0.0,  0.0, 0.0,  1.0],
];

/// The 9x9 Choi witness on `[3, 3]`.
pub fn choi_matrix() -> HermitianOperator {
    let rows: Vec<&[f64]> = CHOI.iter().map(|r| r.as_slice()).collect();
    HermitianOperator::from_real(SystemLayout::bipartite(3, 3).expect("valid"), &rows).expect("symmetric")
}

pub fn choi() -> Witness {
    Witness::new(choi_matrix(), "choi").expect("bipartite")
}

/// Flip operator `V|ij> = |ji>` on `[d, d]`.
pub fn swap_matrix(d: usize) -> Result<HermitianOperator> {
    let layout = SystemLayout::bipartite(d, d)?;
    let n = d * d;
    let mut m = nalgebra::DMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j, j * d + i)] = C64::new(1.0, 0.0);
        }
    }
    HermitianOperator::new(layout, m)
}

pub fn swap(d: usize) -> Result<Witness> {
    Witness::new(swap_matrix(d)?, "swap")
}

/// `I / (d_A d_B)`: positive, detects nothing.
pub fn identity_witness(d_a: usize, d_b: usize) -> Result<Witness> {
    let layout = SystemLayout::bipartite(d_a, d_b)?;
    let n = (d_a * d_b) as f64;
    Witness::new(HermitianOperator::identity(layout).scale(1.0 / n), "identity")
}

/// `(1/sqrt d) sum_k |kk>`.
pub fn psi_plus_vector(d: usize) -> DVector<C64> {
    let mut v = DVector::zeros(d * d);
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    for k in 0..d {
        v[k * d + k] = amp;
    }
    v
}

pub fn psi_plus(d: usize) -> Result<HermitianOperator> {
    HermitianOperator::projector(SystemLayout::bipartite(d, d)?, &psi_plus_vector(d))
}

/// Singlet `(|01> - |10>)/sqrt 2` on `[2, 2]`.
pub fn psi_minus() -> HermitianOperator {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = DVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0), C64::new(0.0, 0.0)]);
    HermitianOperator::projector(SystemLayout::bipartite(2, 2).expect("valid"), &v).expect("sizes agree")
}

/// Two-qutrit family `2/7 P+ + a/7 S+ + (5-a)/7 S-` where `S+` mixes
/// `|01>,|12>,|20>` and `S-` mixes `|10>,|21>,|02>`.
///
/// PPT for `1 <= a <= 4`; the Choi witness evaluates to `(3 - a)/7`.
pub fn horodecki_qutrit_state(alpha: f64) -> Result<HermitianOperator> {
    let layout = SystemLayout::bipartite(3, 3)?;
    let pp = psi_plus(3)?.scale(2.0 / 7.0);
    let mut diag = [0.0; 9];
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        diag[i * 3 + j] = alpha / 21.0;
    }
    for (i, j) in [(1, 0), (2, 1), (0, 2)] {
        diag[i * 3 + j] = (5.0 - alpha) / 21.0;
    }
    pp.add(&HermitianOperator::diagonal(layout, &diag)?)
}

/// PPT entangled state detected by the Choi witness.
pub const CHOI_PPT_ALPHA: f64 = 3.5;

pub fn choi_detected_ppt_state() -> HermitianOperator {
    horodecki_qutrit_state(CHOI_PPT_ALPHA).expect("valid")
}
