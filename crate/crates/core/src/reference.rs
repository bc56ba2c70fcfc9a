//! Reference matrices and the textbook quantum Fourier transform circuit.

use num_complex::Complex64;

use crate::bits::sylvester_hadamard;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::seo::{Control, Instruction, Program};

/// Unitary DFT matrix on `nb` bits: `F_{ab} = exp(2 pi i a b / ns) / sqrt(ns)`
/// with `ns = 2^nb`.
pub fn dft_matrix(nb: usize) -> ComplexMatrix {
    let ns = 1usize << nb;
    let mut m = ComplexMatrix::zeros(ns, ns);
    let norm = 1.0 / (ns as f64).sqrt();
    for a in 0..ns {
        for b in 0..ns {
            // Reduce the exponent first so large products stay exact.
            let k = (a * b) % ns;
            let angle = 2.0 * std::f64::consts::PI * k as f64 / ns as f64;
            m[(a, b)] = Complex64::from_polar(norm, angle);
        }
    }
    m
}

/// `H_nb / 2^(nb/2)`: the Hadamard gate on every bit.
pub fn hadamard_input(nb: usize) -> ComplexMatrix {
    let h = sylvester_hadamard(nb);
    h.scale(Complex64::new(1.0 / ((1usize << nb) as f64).sqrt(), 0.0))
}

/// Hadamard gate on `beta` as `ROTY 45`, `ROTZ 90`, `PHAS -90`.
fn hadamard_gate(beta: usize) -> [Instruction; 3] {
    [
        Instruction::RotY {
            target: beta,
            angle: 45.0,
        },
        Instruction::RotZ {
            target: beta,
            angle: 90.0,
        },
        Instruction::Phas { angle: -90.0 },
    ]
}

/// Textbook QFT circuit without the final bit reversal.
///
/// Acts with the Hadamard on the top bit first, then for each lower bit
/// `beta` applies the controlled phases `360 / 2^(alpha - beta + 1)` from every
/// higher bit `alpha` followed by the Hadamard on `beta`. Its matrix is the
/// bit-reversal permutation times the DFT matrix.
pub fn quantum_fft_program(nb: usize) -> Result<Program> {
    if nb == 0 {
        return Err(Error::InvalidArgument("nb must be at least 1".into()));
    }
    let mut out = Vec::new();
    for beta in (0..nb).rev() {
        for alpha in beta + 1..nb {
            out.push(Instruction::Cpha {
                controls: vec![Control::set(beta), Control::set(alpha)],
                angle: 360.0 / (1u64 << (alpha - beta + 1)) as f64,
            });
        }
        out.extend(hadamard_gate(beta));
    }
    Program::from_instructions(nb, out)
}
