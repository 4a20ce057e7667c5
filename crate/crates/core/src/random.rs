//! Seeded random states, ensembles and measurements for property tests.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::ensembles::{DensityOperator, Ensemble, Povm, PureState, State};
use crate::error::Result;
use crate::linalg::{self, HermitianOperator, SquareMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Complex Ginibre matrix with i.i.d. standard normal entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> SquareMatrix {
    SquareMatrix::from_fn(dim, |_, _| gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianOperator {
    let g = ginibre(rng, dim);
    HermitianOperator::new((&g + &g.adjoint()).scale_real(0.5)).expect("symmetrized")
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
        if let Ok(p) = PureState::normalize(&v) {
            return p;
        }
    }
}

/// Full-rank density operator `GG†/Tr(GG†)`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityOperator {
    let g = ginibre(rng, dim);
    let m = &g * &g.adjoint();
    let t = m.trace().re;
    DensityOperator::from_matrix(m.scale_real(1.0 / t)).expect("positive by construction")
}

/// Priors bounded away from zero: normalized uniforms on `[0.05, 1)`.
pub fn random_priors<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut priors: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // absorb the rounding into the last prior so the sum is 1 to machine precision
    let head: f64 = priors[..n - 1].iter().sum();
    priors[n - 1] = 1.0 - head;
    priors
}

/// Ensemble of `n` states, each pure with probability `pure_fraction`.
pub fn random_ensemble<R: Rng + ?Sized>(rng: &mut R, dim: usize, n: usize, pure_fraction: f64) -> Ensemble {
    let states = (0..n)
        .map(|_| {
            if rng.random_bool(pure_fraction) {
                State::Pure(random_pure(rng, dim))
            } else {
                State::Mixed(random_density(rng, dim))
            }
        })
        .collect();
    Ensemble::from_states(states, random_priors(rng, n)).expect("valid by construction")
}

/// POVM from positive operators `A_k` rescaled as `S^{-1/2} A_k S^{-1/2}`, `S = Σ A_k`.
pub fn random_povm<R: Rng + ?Sized>(rng: &mut R, dim: usize, n: usize) -> Result<Povm> {
    let raw: Vec<HermitianOperator> = (0..n).map(|_| random_density(rng, dim).op().clone()).collect();
    let mut total = HermitianOperator::zeros(dim);
    for a in &raw {
        total = total.add(a)?;
    }
    let inv_sqrt = linalg::inverse_sqrt(&total)?;
    let mut elements = Vec::with_capacity(n);
    for a in &raw {
        elements.push(a.conjugate_by(&inv_sqrt)?);
    }
    // push the completeness residual into the last element
    let head = elements[..n - 1]
        .iter()
        .try_fold(HermitianOperator::zeros(dim), |acc, e| acc.add(e))?;
    elements[n - 1] = HermitianOperator::identity(dim).sub(&head)?;
    Povm::from_operators(elements)
}

/// Rank-one projective measurement in a random orthonormal basis.
pub fn random_projective<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Povm {
    let spectrum = random_hermitian(rng, dim).eig();
    let elements = (0..dim)
        .map(|k| HermitianOperator::projector(&spectrum.eigenvector(k)))
        .collect();
    Povm::from_operators(elements).expect("orthonormal eigenbasis")
}
