//! Dense evaluation of instructions and programs.

use num_complex::Complex64;

use super::{controls_hold, Control, Instruction, Program};
use crate::error::{Error, Result};
use crate::matrix::{tensor_product, ComplexMatrix};

fn expi(deg: f64) -> Complex64 {
    Complex64::from_polar(1.0, deg.to_radians())
}

/// `I (x) ... (x) m (x) ... (x) I` with `m` at bit `beta`.
fn single_bit_operator(m: &ComplexMatrix, beta: usize, nb: usize) -> ComplexMatrix {
    let high = ComplexMatrix::identity(1 << (nb - 1 - beta));
    let low = ComplexMatrix::identity(1 << beta);
    tensor_product(&tensor_product(&high, m), &low)
}

fn projector(controls: &[Control], nb: usize) -> ComplexMatrix {
    let n0 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
    let n1 = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]).unwrap();
    let mut p = ComplexMatrix::identity(1 << nb);
    for c in controls {
        let f = match c.polarity {
            super::Polarity::Set => &n1,
            super::Polarity::Clear => &n0,
        };
        p = &p * &single_bit_operator(f, c.bit, nb);
    }
    p
}

fn check_bits(inst: &Instruction, nb: usize) -> Result<()> {
    inst.validate()?;
    match inst.max_bit() {
        Some(b) if b >= nb => Err(Error::IndexOutOfRange { index: b, bound: nb }),
        _ => Ok(()),
    }
}

/// Dense `2^nb x 2^nb` matrix of one instruction, built from tensor
/// products and projectors.
pub fn instruction_matrix(inst: &Instruction, nb: usize) -> Result<ComplexMatrix> {
    check_bits(inst, nb)?;
    let dim = 1 << nb;
    let id = ComplexMatrix::identity(dim);
    let sigma_x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
    Ok(match inst {
        Instruction::RotY { target, angle } => {
            let (s, c) = angle.to_radians().sin_cos();
            let r = ComplexMatrix::from_real_rows(&[&[c, s], &[-s, c]]).unwrap();
            single_bit_operator(&r, *target, nb)
        }
        Instruction::RotZ { target, angle } => {
            let r = ComplexMatrix::from_diagonal(&[expi(*angle), expi(-*angle)]);
            single_bit_operator(&r, *target, nb)
        }
        Instruction::SigX { target } => single_bit_operator(&sigma_x, *target, nb),
        Instruction::Cnot { controls, target } => {
            let p = projector(controls, nb);
            let x = single_bit_operator(&sigma_x, *target, nb);
            (&p * &x).add(&id.sub(&p)?)?
        }
        Instruction::Phas { angle } => id.scale(expi(*angle)),
        Instruction::Cpha { controls, angle } => {
            let p = projector(controls, nb);
            p.scale(expi(*angle)).add(&id.sub(&p)?)?
        }
    })
}

/// Apply `inst` to the rows of a `2^nb x width` row-major block.
fn apply_rows(inst: &Instruction, data: &mut [Complex64], width: usize) {
    let dim = data.len() / width;
    let row_pair = |data: &mut [Complex64], i: usize, j: usize, f: &dyn Fn(Complex64, Complex64) -> (Complex64, Complex64)| {
        for k in 0..width {
            let (a, b) = f(data[i * width + k], data[j * width + k]);
            data[i * width + k] = a;
            data[j * width + k] = b;
        }
    };
    let scale_row = |data: &mut [Complex64], i: usize, s: Complex64| {
        for z in &mut data[i * width..(i + 1) * width] {
            *z *= s;
        }
    };
    match inst {
        Instruction::RotY { target, angle } => {
            let (s, c) = angle.to_radians().sin_cos();
            let m = 1 << target;
            for i in (0..dim).filter(|i| i & m == 0) {
                row_pair(data, i, i | m, &|a, b| (a * c + b * s, b * c - a * s));
            }
        }
        Instruction::RotZ { target, angle } => {
            let (e, ec) = (expi(*angle), expi(-*angle));
            let m = 1 << target;
            for i in 0..dim {
                scale_row(data, i, if i & m == 0 { e } else { ec });
            }
        }
        Instruction::SigX { target } => {
            let m = 1 << target;
            for i in (0..dim).filter(|i| i & m == 0) {
                row_pair(data, i, i | m, &|a, b| (b, a));
            }
        }
        Instruction::Cnot { controls, target } => {
            let m = 1 << target;
            for i in (0..dim).filter(|&i| i & m == 0 && controls_hold(controls, i)) {
                row_pair(data, i, i | m, &|a, b| (b, a));
            }
        }
        Instruction::Phas { angle } => {
            let e = expi(*angle);
            data.iter_mut().for_each(|z| *z *= e);
        }
        Instruction::Cpha { controls, angle } => {
            let e = expi(*angle);
            for i in (0..dim).filter(|&i| controls_hold(controls, i)) {
                scale_row(data, i, e);
            }
        }
    }
}

/// Apply one instruction to a state vector of length `2^nb` in place.
pub fn apply_to_state(inst: &Instruction, state: &mut [Complex64], nb: usize) -> Result<()> {
    if state.len() != 1 << nb {
        return Err(Error::DimensionMismatch {
            expected: 1 << nb,
            found: state.len(),
        });
    }
    check_bits(inst, nb)?;
    apply_rows(inst, state, 1);
    Ok(())
}

/// Matrix realized by a program: the last instruction is the leftmost factor.
pub fn program_to_matrix(p: &Program) -> ComplexMatrix {
    let dim = 1 << p.nb();
    let mut m = ComplexMatrix::identity(dim);
    for inst in p {
        apply_rows(inst, m.as_mut_slice(), dim);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::frobenius_distance;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn roty_ninety() {
        let m = instruction_matrix(&Instruction::RotY { target: 0, angle: 90.0 }, 1).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        assert!(frobenius_distance(&m, &expected).unwrap() < 1e-15);
    }

    #[test]
    fn cnot_controlled_by_high_bit() {
        let inst = Instruction::Cnot {
            controls: vec![Control::set(1)],
            target: 0,
        };
        let m = instruction_matrix(&inst, 2).unwrap();
        let mut expected = ComplexMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 1), (3, 2), (2, 3)] {
            expected[(i, j)] = c(1.0, 0.0);
        }
        assert_eq!(m, expected);
    }

    #[test]
    fn cpha_with_clear_control() {
        let inst = Instruction::Cpha {
            controls: vec![Control::clear(0)],
            angle: 180.0,
        };
        let m = instruction_matrix(&inst, 1).unwrap();
        assert!((m[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(m[(1, 1)], c(1.0, 0.0));
    }

    #[test]
    fn out_of_range_target() {
        assert!(instruction_matrix(&Instruction::SigX { target: 2 }, 2).is_err());
    }

    #[test]
    fn empty_program_is_identity() {
        assert_eq!(program_to_matrix(&Program::new(3)), ComplexMatrix::identity(8));
    }

    #[test]
    fn state_path_matches_matrix_path() {
        let insts = vec![
            Instruction::RotY { target: 1, angle: 33.0 },
            Instruction::RotZ { target: 0, angle: -12.0 },
            Instruction::Cnot {
                controls: vec![Control::set(2), Control::clear(0)],
                target: 1,
            },
            Instruction::Cpha {
                controls: vec![Control::set(1)],
                angle: 71.0,
            },
            Instruction::Phas { angle: 5.0 },
            Instruction::SigX { target: 2 },
        ];
        let p = Program::from_instructions(3, insts.clone()).unwrap();
        let mut dense = ComplexMatrix::identity(8);
        for inst in &insts {
            dense = &instruction_matrix(inst, 3).unwrap() * &dense;
        }
        assert!(frobenius_distance(&program_to_matrix(&p), &dense).unwrap() < 1e-13);

        let mut state: Vec<Complex64> = (0..8).map(|k| c(k as f64, 1.0 - k as f64)).collect();
        let expected: Vec<Complex64> = (0..8)
            .map(|i| (0..8).map(|k| dense[(i, k)] * state[k]).sum())
            .collect();
        for inst in &insts {
            apply_to_state(inst, &mut state, 3).unwrap();
        }
        for (a, b) in state.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
