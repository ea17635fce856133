//! Seeded random draws used by the randomized verification suites and the
//! optimizer: Haar-like pure states, convex mixtures, Hermitian observable
//! sets, orthogonal/nonsingular transforms, and PSD Hermitian splittings.
//!
//! Every suite derives one ChaCha substream per trial index via
//! [`rng_stream`], so parallel and sequential runs produce identical draws.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::ObservableSet;
use crate::matcore::C64;
use crate::states::QuantumState;

/// Independent deterministic substream `stream` of a master seed.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn complex_normal(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(normal(rng), normal(rng))
}

/// Haar-distributed unit vector in C^d.
pub fn random_unit(d: usize, rng: &mut ChaCha8Rng) -> DVector<C64> {
    loop {
        let v = DVector::from_fn(d, |_, _| complex_normal(rng));
        let n = v.norm();
        if n > 1e-6 {
            return v / C64::new(n, 0.0);
        }
    }
}

/// Haar-random pure state.
pub fn random_pure(d: usize, rng: &mut ChaCha8Rng) -> QuantumState {
    QuantumState::from_coefficients(random_unit(d, rng), None)
        .expect("random unit vector is a valid state")
}

/// Random mixed state: a normalized convex mixture of `components`
/// Haar-random pure states.
pub fn random_mixed(d: usize, components: usize, rng: &mut ChaCha8Rng) -> QuantumState {
    let components = components.max(1);
    let mut weights: Vec<f64> = (0..components)
        .map(|_| rng.random::<f64>() + 1e-6)
        .collect();
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let mut rho = DMatrix::<C64>::zeros(d, d);
    for &w in &weights {
        let v = random_unit(d, rng);
        for i in 0..d {
            for j in 0..d {
                rho[(i, j)] += v[i] * v[j].conj() * w;
            }
        }
    }
    // enforce exact Hermiticity and unit trace against roundoff
    let rho = (&rho + rho.adjoint()).scale(0.5);
    let trace = rho.trace().re;
    let rho = rho / C64::new(trace, 0.0);
    QuantumState::mixed(rho, None).expect("convex mixture is a valid density matrix")
}

/// Random Hermitian matrix with O(1) entries.
pub fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, d, |_, _| complex_normal(rng));
    (&g + g.adjoint()).scale(0.5)
}

/// A set of n random Hermitian observables on C^d (exact, no truncation).
pub fn random_observable_set(n: usize, d: usize, rng: &mut ChaCha8Rng) -> ObservableSet {
    let matrices: Vec<DMatrix<C64>> = (0..n).map(|_| random_hermitian(d, rng)).collect();
    let labels = (0..n).map(|i| format!("X{}", i + 1)).collect();
    ObservableSet::new(labels, matrices, None, vec![true; d])
        .expect("random Hermitian set is valid")
}

/// Haar-like random orthogonal matrix via QR with sign normalization.
pub fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| normal(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Random real nonsingular matrix (redrawn until well-conditioned enough).
pub fn random_nonsingular(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    loop {
        let g = DMatrix::from_fn(n, n, |_, _| normal(rng));
        if g.clone().lu().determinant().abs() > 1e-3 {
            return g;
        }
    }
}

/// Random PSD Hermitian matrix H = G†G/d split into its real symmetric and
/// imaginary antisymmetric parts, H = S + iK.
pub fn random_psd_split(n: usize, rng: &mut ChaCha8Rng) -> (DMatrix<f64>, DMatrix<f64>) {
    let g = DMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    let h = (g.adjoint() * &g).scale(1.0 / n as f64);
    let s = DMatrix::from_fn(n, n, |i, j| h[(i, j)].re);
    let k = DMatrix::from_fn(n, n, |i, j| h[(i, j)].im);
    (s, k)
}

/// Random centered Gaussian state: a squeezed vacuum with random complex
/// squeezing parameter, |ζ| ≤ `max_zeta`.
pub fn random_gaussian_like(dim: usize, max_zeta: f64, rng: &mut ChaCha8Rng) -> QuantumState {
    loop {
        let radius = max_zeta * rng.random::<f64>().sqrt();
        let angle = std::f64::consts::TAU * rng.random::<f64>();
        let zeta = C64::from_polar(radius, angle);
        if let Ok(state) = crate::states::squeezed_from_zeta(zeta, dim) {
            return state;
        }
    }
}
