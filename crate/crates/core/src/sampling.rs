//! Seeded sampling of states, product vectors, separable ensembles and POVM elements.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::operator::{HermitianOperator, ProductVector, SeparableEnsemble, SystemLayout};
use crate::{seed, Error, Result, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random unit vector.
pub fn unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<C64> {
    loop {
        let v = DVector::from_fn(d, |_, _| gaussian(rng));
        let n = v.norm();
        if n > 1e-300 {
            return v / C64::new(n, 0.0);
        }
    }
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let g = gaussian_matrix(d, d, rng);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Isometry `C^d -> C^big` given by the first `d` columns of a Haar unitary.
pub fn isometry<R: Rng + ?Sized>(d: usize, big: usize, rng: &mut R) -> Result<DMatrix<C64>> {
    if big < d {
        return Err(Error::InvalidArgument(format!("cannot embed dimension {d} into {big}")));
    }
    Ok(unitary(big, rng).columns(0, d).into_owned())
}

fn require_positive(name: &str, v: usize) -> Result<()> {
    if v < 1 {
        return Err(Error::InvalidArgument(format!("{name} must be at least 1, got {v}")));
    }
    Ok(())
}

fn gaussian_square<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let g = gaussian_matrix(d, d, rng);
    &g * g.adjoint()
}

/// Hilbert-Schmidt random density matrix on `layout`.
pub fn random_density_on<R: Rng + ?Sized>(layout: SystemLayout, rng: &mut R) -> Result<HermitianOperator> {
    let d = layout.total();
    let s = gaussian_square(d, rng);
    let tr: f64 = (0..d).map(|i| s[(i, i)].re).sum();
    HermitianOperator::new(layout, s / C64::new(tr, 0.0))
}

/// Hilbert-Schmidt random density matrix of dimension `d`.
pub fn random_density(d: usize, seed: u64) -> Result<HermitianOperator> {
    require_positive("dimension", d)?;
    random_density_on(SystemLayout::single(d)?, &mut seed::rng(seed))
}

/// Random product vector with one Haar factor per entry of `dims`.
pub fn random_product_vector_with<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<ProductVector> {
    for &d in dims {
        require_positive("dimension", d)?;
    }
    ProductVector::normalized(dims.iter().map(|&d| unit_vector(d, rng)).collect())
}

/// Random product vector with one factor per subsystem of `layout`.
pub fn random_product_vector(layout: &SystemLayout, seed: u64) -> Result<ProductVector> {
    random_product_vector_with(layout.dims(), &mut seed::rng(seed))
}

/// Dirichlet(1, ..., 1) mixture of `k` pure states, each a product across the cut.
pub fn random_separable_with<R: Rng + ?Sized>(
    layout: &SystemLayout,
    k: usize,
    rng: &mut R,
) -> Result<SeparableEnsemble> {
    require_positive("ensemble size", k)?;
    layout.require_bipartite()?;
    let (dl, dr) = layout.party_dims();
    let raw: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    // absorb rounding so the sum is 1 to the last bit or two
    let drift: f64 = 1.0 - weights.iter().sum::<f64>();
    weights[0] += drift;
    let members = (0..k).map(|_| random_product_vector_with(&[dl, dr], rng)).collect::<Result<Vec<_>>>()?;
    SeparableEnsemble::new(layout.clone(), weights, members)
}

pub fn random_separable(layout: &SystemLayout, k: usize, seed: u64) -> Result<SeparableEnsemble> {
    random_separable_with(layout, k, &mut seed::rng(seed))
}

/// `E = (S+T)^{-1/2} S (S+T)^{-1/2}` for independent Gaussian squares `S`, `T`,
/// so that `0 <= E <= I`.
pub fn random_povm_element_on<R: Rng + ?Sized>(layout: SystemLayout, rng: &mut R) -> Result<HermitianOperator> {
    let d = layout.total();
    let s = HermitianOperator::new(layout.clone(), gaussian_square(d, rng))?;
    let t = HermitianOperator::new(layout, gaussian_square(d, rng))?;
    let sum = s.add(&t)?;
    let inv_sqrt = sum.spectral_map(|x| if x > 0.0 { 1.0 / x.sqrt() } else { 0.0 })?;
    let e = inv_sqrt.matrix() * s.matrix() * inv_sqrt.matrix();
    HermitianOperator::new(s.layout().clone(), e)
}

pub fn random_povm_first_element(d: usize, seed: u64) -> Result<HermitianOperator> {
    require_positive("dimension", d)?;
    random_povm_element_on(SystemLayout::single(d)?, &mut seed::rng(seed))
}

/// Random Hermitian matrix with independent Gaussian entries (GUE-like), for tests.
pub fn random_hermitian<R: Rng + ?Sized>(layout: SystemLayout, rng: &mut R) -> Result<HermitianOperator> {
    let d = layout.total();
    let g = gaussian_matrix(d, d, rng);
    HermitianOperator::new(layout, (&g + g.adjoint()) * C64::new(0.5, 0.0))
}

/// Random PSD operator `G G^dagger` with trace normalized to `d`.
pub fn random_psd<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<HermitianOperator> {
    require_positive("dimension", d)?;
    Ok(random_density_on(SystemLayout::single(d)?, rng)?.scale(d as f64))
}
