#![allow(dead_code)]

use csd_compiler::decompositions::qr_nonneg;
use csd_compiler::seo::{Control, Instruction, Polarity, Program};
use csd_compiler::ComplexMatrix;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// triangular factor's diagonal made non-negative.
pub fn random_unitary(rng: &mut StdRng, n: usize) -> ComplexMatrix {
    let data = (0..n * n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let g = ComplexMatrix::from_vec(n, n, data).unwrap();
    qr_nonneg(&g).0
}

pub fn random_angle(rng: &mut StdRng) -> f64 {
    rng.random_range(-360.0..360.0)
}

/// Distinct random bits, `count` of them, below `nb`.
pub fn random_bits(rng: &mut StdRng, nb: usize, count: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..nb).collect();
    for i in 0..count {
        let j = rng.random_range(i..nb);
        all.swap(i, j);
    }
    all.truncate(count);
    all
}

pub fn random_controls(rng: &mut StdRng, bits: &[usize]) -> Vec<Control> {
    bits.iter()
        .map(|&bit| Control {
            bit,
            polarity: if rng.random_bool(0.5) { Polarity::Set } else { Polarity::Clear },
        })
        .collect()
}

pub fn random_instruction(rng: &mut StdRng, nb: usize) -> Instruction {
    let max_controls = nb.saturating_sub(1).max(1);
    match rng.random_range(0..6) {
        0 => Instruction::RotY { target: rng.random_range(0..nb), angle: random_angle(rng) },
        1 => Instruction::RotZ { target: rng.random_range(0..nb), angle: random_angle(rng) },
        2 => Instruction::SigX { target: rng.random_range(0..nb) },
        3 if nb >= 2 => {
            let k = rng.random_range(1..=max_controls);
            let bits = random_bits(rng, nb, k + 1);
            Instruction::Cnot { controls: random_controls(rng, &bits[..k]), target: bits[k] }
        }
        5 => {
            let k = rng.random_range(1..=nb);
            let bits = random_bits(rng, nb, k);
            Instruction::Cpha { controls: random_controls(rng, &bits), angle: random_angle(rng) }
        }
        _ => Instruction::Phas { angle: random_angle(rng) },
    }
}

pub fn random_program(rng: &mut StdRng, nb: usize, len: usize) -> Program {
    let insts = (0..len).map(|_| random_instruction(rng, nb)).collect();
    Program::from_instructions(nb, insts).unwrap()
}
