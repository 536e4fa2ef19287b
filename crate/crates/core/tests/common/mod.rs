#![allow(dead_code)]

use ewitness::sampling;
use ewitness::{HermitianOperator, SystemLayout};
use rand::Rng;

pub fn herm<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator {
    sampling::random_hermitian(SystemLayout::single(d).unwrap(), rng).unwrap()
}

/// Kronecker product of single-system factors, cut after `cut` factors.
pub fn kron_all(factors: &[HermitianOperator], cut: usize) -> HermitianOperator {
    let mut out = factors[0].clone();
    for f in &factors[1..] {
        out = out.kron(f);
    }
    let dims = factors.iter().map(|f| f.dim()).collect();
    out.relabel(SystemLayout::new(dims, cut).unwrap()).unwrap()
}

/// `sum_k F_k0 ⊗ F_k1 ⊗ ...` with random Hermitian factors, returned with its terms.
pub fn product_sum<R: Rng + ?Sized>(
    dims: &[usize],
    terms: usize,
    rng: &mut R,
) -> (Vec<Vec<HermitianOperator>>, HermitianOperator) {
    let parts: Vec<Vec<HermitianOperator>> = (0..terms).map(|_| dims.iter().map(|&d| herm(d, rng)).collect()).collect();
    let total = sum(parts.iter().map(|p| kron_all(p, 1.min(dims.len() - 1))));
    (parts, total)
}

pub fn sum(ops: impl Iterator<Item = HermitianOperator>) -> HermitianOperator {
    ops.reduce(|a, b| a.add(&b).unwrap()).unwrap()
}

/// Frobenius distance scaled by the larger norm.
pub fn rel_distance(a: &HermitianOperator, b: &HermitianOperator) -> f64 {
    a.distance(b) / 1.0_f64.max(a.frobenius_norm().max(b.frobenius_norm()))
}
