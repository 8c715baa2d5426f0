//! Seeded random states, unitaries and observables for property suites.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, ComplexMatrix, C64};
use crate::observables::ProjectiveObservable;
use crate::state::{DensityOperator, PureState};

/// Independent, reproducible stream `stream` derived from `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unitary: Gram–Schmidt on the columns of a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
        let mut degenerate = false;
        for _ in 0..dim {
            let mut v: Vec<C64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
            // Twice is enough for numerical orthogonality.
            for _ in 0..2 {
                for u in &cols {
                    let proj = linalg::inner(u, &v);
                    for (vi, ui) in v.iter_mut().zip(u) {
                        *vi -= proj * ui;
                    }
                }
            }
            let n = linalg::norm(&v);
            if n < 1e-8 {
                degenerate = true;
                break;
            }
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
        if !degenerate {
            return ComplexMatrix::from_fn(dim, |r, c| cols[c][r]);
        }
    }
}

pub fn haar_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    let v: Vec<C64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
    PureState::normalized(v).expect("Gaussian vectors are nonzero almost surely")
}

/// `G G† / Tr(G G†)` with `G` a `dim × rank` Ginibre matrix; `rank` is drawn
/// uniformly from `1..=dim`, so pure states appear with positive probability.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityOperator {
    let rank = rng.gen_range(1..=dim);
    let g: Vec<Vec<C64>> = (0..rank)
        .map(|_| (0..dim).map(|_| gaussian_complex(rng)).collect())
        .collect();
    let mut m = ComplexMatrix::zeros(dim);
    for col in &g {
        m = &m + &ComplexMatrix::outer(col, col);
    }
    let tr = m.trace().re;
    DensityOperator::new(m.scale_real(1.0 / tr)).expect("Wishart matrices are valid states")
}

/// State diagonal in the eigenbasis of `x` with random weights.
pub fn random_diagonal_in<R: Rng + ?Sized>(
    x: &ProjectiveObservable,
    rng: &mut R,
) -> DensityOperator {
    let weights: Vec<f64> = x
        .projectors()
        .iter()
        .map(|_| rng.gen::<f64>() + 1e-3)
        .collect();
    let total: f64 = weights.iter().sum();
    let m =
        x.projectors()
            .iter()
            .zip(&weights)
            .fold(ComplexMatrix::zeros(x.dim()), |acc, (p, w)| {
                let rank = p.trace().re;
                &acc + &p.scale_real(w / (total * rank))
            });
    DensityOperator::new(m).expect("convex mixture of projectors")
}

/// Nondegenerate observable with a Haar-random eigenbasis.
pub fn random_observable<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ProjectiveObservable {
    ProjectiveObservable::from_unitary(&haar_unitary(dim, rng)).expect("Haar unitaries are unitary")
}

/// Uniform on `[0, 1]`.
pub fn random_epsilon<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.gen_range(0.0..=1.0)
}
