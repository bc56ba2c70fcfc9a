//! Rewriting multiply-controlled gates into gates that touch at most two bits.

use super::{Control, Instruction, Polarity, Program};
use crate::central::{angles_to_theta, emit_multiplexed_rotation, Axis};
use crate::decompositions::wrap_degrees;
use crate::error::{Error, Result};
use crate::matrix::Tolerance;

/// `SIGX` on every clear-polarity control, and the controls as all-set.
fn split_polarity(controls: &[Control]) -> (Vec<Instruction>, Vec<usize>) {
    let flips = controls
        .iter()
        .filter(|c| c.polarity == Polarity::Clear)
        .map(|c| Instruction::SigX { target: c.bit })
        .collect();
    (flips, controls.iter().map(|c| c.bit).collect())
}

/// `exp(i angle prod_{b in bits} n(b))` as PHAS, ROTZ and single-control CNOTs.
fn phase_on_all_set(bits: &[usize], angle: f64, tol: &Tolerance, out: &mut Vec<Instruction>) {
    let r = bits.len();
    let mut phases = vec![0.0; 1 << r];
    phases[(1 << r) - 1] = angle;
    let theta = angles_to_theta(&phases).expect("power-of-two length");
    let global = wrap_degrees(theta[0]);
    if global.abs() > tol.prune {
        out.push(Instruction::Phas { angle: global });
    }
    for low in 0..r {
        let controls: Vec<usize> = bits[low + 1..].to_vec();
        let group: Vec<f64> = (0..1usize << controls.len())
            .map(|m| theta[(1 << low) | (m << (low + 1))])
            .collect();
        emit_multiplexed_rotation(Axis::Z, bits[low], &controls, &group, tol.prune, out);
    }
}

fn expand_cpha(controls: &[Control], angle: f64, tol: &Tolerance, out: &mut Vec<Instruction>) {
    let (flips, bits) = split_polarity(controls);
    out.extend(flips.iter().cloned());
    phase_on_all_set(&bits, angle, tol, out);
    out.extend(flips);
}

/// `sigma_x(t)^{prod n} = exp(i 90 prod n) R exp(-i 90 sigma_y(t) prod n) R^dagger`
/// with `R = exp(i 45 sigma_z(t))` turning `sigma_y` into `sigma_x`.
fn expand_cnot(controls: &[Control], target: usize, tol: &Tolerance, out: &mut Vec<Instruction>) {
    let (flips, bits) = split_polarity(controls);
    out.extend(flips.iter().cloned());
    out.push(Instruction::RotZ { target, angle: -45.0 });
    let r = bits.len();
    let mut phi = vec![0.0; 1 << r];
    phi[(1 << r) - 1] = -90.0;
    let theta = angles_to_theta(&phi).expect("power-of-two length");
    emit_multiplexed_rotation(Axis::Y, target, &bits, &theta, tol.prune, out);
    out.push(Instruction::RotZ { target, angle: 45.0 });
    if r <= 2 {
        out.push(Instruction::Cpha {
            controls: bits.iter().map(|&b| Control::set(b)).collect(),
            angle: 90.0,
        });
    } else {
        phase_on_all_set(&bits, 90.0, tol, out);
    }
    out.extend(flips);
}

/// Replace every CNOT with two or more controls and every CPHA with three or
/// more controls by an equivalent run of instructions touching at most two bits.
/// Everything else is copied unchanged.
pub fn expand_controls(p: &Program) -> Result<Program> {
    let tol = Tolerance::default();
    let mut out = Vec::with_capacity(p.len());
    for inst in p {
        match inst {
            Instruction::Cnot { controls, target } if controls.len() >= 2 => {
                expand_cnot(controls, *target, &tol, &mut out)
            }
            Instruction::Cpha { controls, angle } if controls.len() >= 3 => {
                expand_cpha(controls, *angle, &tol, &mut out)
            }
            other => out.push(other.clone()),
        }
    }
    Program::from_instructions(p.nb(), out)
}

/// Three CNOTs swapping bits `alpha` and `beta`.
pub fn exchanger_program(alpha: usize, beta: usize, nb: usize) -> Result<Program> {
    if alpha == beta {
        return Err(Error::InvalidArgument(format!(
            "cannot exchange bit {alpha} with itself"
        )));
    }
    let cnot = |c: usize, t: usize| Instruction::Cnot {
        controls: vec![Control::set(c)],
        target: t,
    };
    Program::from_instructions(nb, vec![cnot(beta, alpha), cnot(alpha, beta), cnot(beta, alpha)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitPermutation;
    use crate::matrix::frobenius_distance;
    use crate::seo::{program_to_matrix, serialize, InstructionKind};

    fn check_expansion(inst: Instruction, nb: usize) -> Program {
        let p = Program::from_instructions(nb, vec![inst]).unwrap();
        let e = expand_controls(&p).unwrap();
        let d = frobenius_distance(&program_to_matrix(&p), &program_to_matrix(&e)).unwrap();
        assert!(d < 1e-10, "distance {d}");
        for i in &e {
            assert!(i.bits().len() <= 2, "{i:?}");
        }
        e
    }

    #[test]
    fn toffoli_expansion() {
        let e = check_expansion(
            Instruction::Cnot {
                controls: vec![Control::set(1), Control::set(0)],
                target: 2,
            },
            3,
        );
        let roty: Vec<f64> = e
            .iter()
            .filter(|i| i.kind() == InstructionKind::RotY)
            .map(|i| i.angle().unwrap().abs())
            .collect();
        assert_eq!(roty, vec![22.5; 4]);
    }

    #[test]
    fn mixed_polarity_and_many_controls() {
        check_expansion(
            Instruction::Cnot {
                controls: vec![Control::clear(0), Control::set(3), Control::clear(1)],
                target: 2,
            },
            4,
        );
        check_expansion(
            Instruction::Cpha {
                controls: vec![Control::set(0), Control::clear(2), Control::set(3)],
                angle: 77.0,
            },
            4,
        );
    }

    #[test]
    fn single_control_gates_are_untouched() {
        let p = Program::from_instructions(
            2,
            vec![
                Instruction::Cnot {
                    controls: vec![Control::clear(0)],
                    target: 1,
                },
                Instruction::Cpha {
                    controls: vec![Control::set(1), Control::set(0)],
                    angle: 30.0,
                },
            ],
        )
        .unwrap();
        assert_eq!(expand_controls(&p).unwrap(), p);
    }

    #[test]
    fn exchanger_swaps_bits() {
        let p = exchanger_program(0, 1, 2).unwrap();
        assert_eq!(serialize(&p), "CNOT 1 T 0\nCNOT 0 T 1\nCNOT 1 T 0\n");
        let swap = BitPermutation::new(vec![1, 0]).unwrap().state_matrix();
        assert!(frobenius_distance(&program_to_matrix(&p), &swap).unwrap() < 1e-15);
        assert!(exchanger_program(1, 1, 2).is_err());
    }
}
