//! Seeded random instances for property sweeps and multi-start searches.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{gram_schmidt_extend, Direction, LocalUnitary, TwoQuditState};

/// Generator for instance `index` of a sweep seeded by `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Uniformly distributed pure qudit (normalized complex Gaussian).
pub fn random_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Direction {
    loop {
        if let Ok(v) = Direction::normalized(gaussian_vector(d, rng)) {
            return v;
        }
    }
}

/// Random real-amplitude direction.
pub fn random_real_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Direction {
    loop {
        let v: Vec<Complex64> = (0..d)
            .map(|_| Complex64::new(rng.sample(StandardNormal), 0.0))
            .collect();
        if let Ok(v) = Direction::normalized(v) {
            return v;
        }
    }
}

/// Random normalized two-qudit pure state.
pub fn random_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> TwoQuditState {
    loop {
        if let Ok(s) = TwoQuditState::normalized_from(d, gaussian_vector(d * d, rng)) {
            return s;
        }
    }
}

/// Random unitary from orthonormalizing a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> LocalUnitary {
    loop {
        let rows: Vec<Direction> = (0..d).map(|_| random_direction(d, rng)).collect();
        if let Ok(basis) = gram_schmidt_extend(&rows, d) {
            let entries = basis.iter().flat_map(|v| v.amplitudes().to_vec()).collect();
            if let Ok(u) = LocalUnitary::new(d, entries) {
                return u;
            }
        }
    }
}

/// Four independent random axes.
pub fn random_directions<R: Rng + ?Sized>(d: usize, rng: &mut R) -> crate::protocol::Directions {
    crate::protocol::Directions {
        psi: random_direction(d, rng),
        psi_prime: random_direction(d, rng),
        eta: random_direction(d, rng),
        eta_prime: random_direction(d, rng),
    }
}

/// Channel probabilities uniform on the simplex.
pub fn random_spec<R: Rng + ?Sized>(rng: &mut R) -> crate::channel::ChannelSpec {
    loop {
        let e: [f64; 3] = std::array::from_fn(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln());
        let s: f64 = e.iter().sum();
        let (c1, c2) = (e[0] / s, e[1] / s);
        if let Ok(spec) = crate::channel::ChannelSpec::new(c1, c2, 1.0 - c1 - c2) {
            return spec;
        }
    }
}
