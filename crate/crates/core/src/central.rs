//! Central matrices of the CSD tree and their expansion into SEOs.
//!
//! A central matrix at level `l` of an `nb`-bit tree rotates bit `nb - l`
//! with an angle chosen by the values of the other `nb - 1` bits. Those
//! other bits, read in order with the rotation bit removed, form the control
//! index `a`.

use num_complex::Complex64;

use crate::bits::{gray_sequence, hadamard_transform, number_basis_coefficients, BitPermutation};
use crate::decompositions::{wrap_degrees, BlockPhases, PhaseFactors};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, Tolerance};
use crate::seo::{Control, Instruction, Program};

#[derive(Debug, Clone, PartialEq)]
pub enum CentralMatrix {
    /// `sum_a exp(i angles[a] sigma_y)` on the rotation bit, `2^(nb-1)` angles.
    RealD { nb: usize, level: usize, angles: Vec<f64> },
    /// One phased 2x2 block per control index.
    ComplexD { nb: usize, level: usize, phases: PhaseFactors },
    /// `diag(exp(i phases[s]))` over all `2^nb` states.
    Diagonal { nb: usize, phases: Vec<f64> },
}

/// How diagonal unitaries are expanded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalMode {
    /// CNOT-conjugated `ROTZ` factors in Gray order.
    RotzChain,
    /// One `PHAS` per global phase and `CPHA` per multi-bit term of the
    /// number-operator expansion; single-bit terms become `ROTZ` + `PHAS`.
    ControlledPhase,
}

/// State index with `v` inserted at bit `r` of the control index `a`.
pub fn insert_bit(a: usize, r: usize, v: usize) -> usize {
    ((a >> r) << (r + 1)) | (v << r) | (a & ((1 << r) - 1))
}

/// Bit map from the level-1 layout (rotation on the top bit) to level `level`.
pub fn level_alias(nb: usize, level: usize) -> Result<BitPermutation> {
    if level == 0 || level > nb {
        return Err(Error::InvalidArgument(format!(
            "level {level} outside 1..={nb}"
        )));
    }
    let r = nb - level;
    let map = (0..nb)
        .map(|k| {
            if k == nb - 1 {
                r
            } else if k >= r {
                k + 1
            } else {
                k
            }
        })
        .collect();
    BitPermutation::new(map)
}

impl CentralMatrix {
    pub fn nb(&self) -> usize {
        match self {
            CentralMatrix::RealD { nb, .. }
            | CentralMatrix::ComplexD { nb, .. }
            | CentralMatrix::Diagonal { nb, .. } => *nb,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            CentralMatrix::RealD { .. } => "realD",
            CentralMatrix::ComplexD { .. } => "complexD",
            CentralMatrix::Diagonal { .. } => "diagonal",
        }
    }

    /// Bit acted on by the rotations, if any.
    pub fn rotation_bit(&self) -> Option<usize> {
        match self {
            CentralMatrix::RealD { nb, level, .. } | CentralMatrix::ComplexD { nb, level, .. } => {
                Some(nb - level)
            }
            CentralMatrix::Diagonal { .. } => None,
        }
    }

    fn check(&self) -> Result<()> {
        let nb = self.nb();
        if nb == 0 {
            return Err(Error::InvalidArgument("central matrix needs nb >= 1".into()));
        }
        let (len, expected) = match self {
            CentralMatrix::RealD { level, angles, .. } => {
                level_alias(nb, *level)?;
                (angles.len(), 1 << (nb - 1))
            }
            CentralMatrix::ComplexD { level, phases, .. } => {
                level_alias(nb, *level)?;
                let n = phases.len();
                if phases.omega.len() != n || phases.omega_l.len() != n || phases.omega_r.len() != n {
                    return Err(Error::InvalidArgument("phase vectors differ in length".into()));
                }
                (n, 1 << (nb - 1))
            }
            CentralMatrix::Diagonal { phases, .. } => (phases.len(), 1 << nb),
        };
        if len != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: len,
            });
        }
        Ok(())
    }

    /// Dense `2^nb x 2^nb` matrix.
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        self.check()?;
        let nb = self.nb();
        let dim = 1 << nb;
        let mut m = ComplexMatrix::zeros(dim, dim);
        let mut put_blocks = |r: usize, blocks: &mut dyn Iterator<Item = [Complex64; 4]>| {
            for (a, [d00, d01, d10, d11]) in blocks.enumerate() {
                let (s0, s1) = (insert_bit(a, r, 0), insert_bit(a, r, 1));
                m[(s0, s0)] = d00;
                m[(s0, s1)] = d01;
                m[(s1, s0)] = d10;
                m[(s1, s1)] = d11;
            }
        };
        match self {
            CentralMatrix::RealD { level, angles, .. } => {
                let mut it = angles.iter().map(|&t| {
                    BlockPhases {
                        omega: 0.0,
                        omega_l: 0.0,
                        omega_r: 0.0,
                        theta: t,
                    }
                    .entries()
                });
                put_blocks(nb - level, &mut it);
            }
            CentralMatrix::ComplexD { level, phases, .. } => {
                let mut it = (0..phases.len()).map(|j| phases.block(j).entries());
                put_blocks(nb - level, &mut it);
            }
            CentralMatrix::Diagonal { phases, .. } => {
                for (s, &p) in phases.iter().enumerate() {
                    m[(s, s)] = Complex64::from_polar(1.0, p.to_radians());
                }
            }
        }
        Ok(m)
    }
}

/// `theta = H phi / len(phi)`: coefficients of the sigma-product expansion.
pub fn angles_to_theta(phi: &[f64]) -> Result<Vec<f64>> {
    let n = phi.len() as f64;
    Ok(hadamard_transform(phi)?.into_iter().map(|x| x / n).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Axis {
    Y,
    Z,
}

/// Emit `prod_g exp(i thetas[g] sigma(target) prod_{k in g} sigma_z(controls[k]))`
/// as rotations on `target` threaded by CNOTs, visiting `g` in Gray order.
/// Rotations at or below `prune` are skipped and the CNOTs around them merge.
pub(crate) fn emit_multiplexed_rotation(
    axis: Axis,
    target: usize,
    controls: &[usize],
    thetas: &[f64],
    prune: f64,
    out: &mut Vec<Instruction>,
) {
    debug_assert_eq!(thetas.len(), 1 << controls.len());
    let cnots = |diff: usize, out: &mut Vec<Instruction>| {
        for (k, &c) in controls.iter().enumerate() {
            if diff >> k & 1 == 1 {
                out.push(Instruction::Cnot {
                    controls: vec![Control::set(c)],
                    target,
                });
            }
        }
    };
    let mut mask = 0;
    for g in gray_sequence(controls.len()) {
        let angle = thetas[g.value];
        if angle.abs() <= prune {
            continue;
        }
        cnots(mask ^ g.value, out);
        out.push(match axis {
            Axis::Y => Instruction::RotY { target, angle },
            Axis::Z => Instruction::RotZ { target, angle },
        });
        mask = g.value;
    }
    cnots(mask, out);
}

/// SEO for a real D matrix: Gray-ordered `ROTY`s on the rotation bit
/// separated by single-control CNOTs.
pub fn decompose_real_d(c: &CentralMatrix) -> Result<Program> {
    decompose_real_d_with(c, &Tolerance::default())
}

pub fn decompose_real_d_with(c: &CentralMatrix, tol: &Tolerance) -> Result<Program> {
    c.check()?;
    let CentralMatrix::RealD { nb, level, angles } = c else {
        return Err(Error::InvalidArgument(format!(
            "expected a realD central matrix, found {}",
            c.kind_name()
        )));
    };
    let theta = angles_to_theta(angles)?;
    let controls: Vec<usize> = (0..nb - 1).collect();
    let mut out = Vec::new();
    emit_multiplexed_rotation(Axis::Y, nb - 1, &controls, &theta, tol.prune, &mut out);
    Program::from_instructions(*nb, out)?.permuted(&level_alias(*nb, *level)?)
}

fn diagonal_rotz_chain(nb: usize, phases: &[f64], tol: &Tolerance) -> Result<Vec<Instruction>> {
    let theta = angles_to_theta(phases)?;
    let mut out = Vec::new();
    let global = wrap_degrees(theta[0]);
    if global.abs() > tol.prune {
        out.push(Instruction::Phas { angle: global });
    }
    for low in 0..nb {
        let controls: Vec<usize> = (low + 1..nb).collect();
        let group: Vec<f64> = (0..1usize << controls.len())
            .map(|m| theta[(1 << low) | (m << (low + 1))])
            .collect();
        emit_multiplexed_rotation(Axis::Z, low, &controls, &group, tol.prune, &mut out);
    }
    Ok(out)
}

fn diagonal_controlled_phase(phases: &[f64], tol: &Tolerance) -> Result<Vec<Instruction>> {
    let theta = number_basis_coefficients(phases)?;
    let mut out = Vec::new();
    let global = wrap_degrees(theta[0]);
    if global.abs() > tol.prune {
        out.push(Instruction::Phas { angle: global });
    }
    for (b, &t) in theta.iter().enumerate().skip(1) {
        let angle = wrap_degrees(t);
        if angle.abs() <= tol.prune {
            continue;
        }
        if b.count_ones() == 1 {
            let target = b.trailing_zeros() as usize;
            out.push(Instruction::RotZ {
                target,
                angle: -angle / 2.0,
            });
            out.push(Instruction::Phas { angle: angle / 2.0 });
        } else {
            let controls = (0..usize::BITS as usize)
                .filter(|k| b >> k & 1 == 1)
                .map(Control::set)
                .collect();
            out.push(Instruction::Cpha { controls, angle });
        }
    }
    Ok(out)
}

/// SEO for a diagonal unitary.
pub fn decompose_diagonal(c: &CentralMatrix, mode: DiagonalMode) -> Result<Program> {
    decompose_diagonal_with(c, mode, &Tolerance::default())
}

pub fn decompose_diagonal_with(c: &CentralMatrix, mode: DiagonalMode, tol: &Tolerance) -> Result<Program> {
    c.check()?;
    let CentralMatrix::Diagonal { nb, phases } = c else {
        return Err(Error::InvalidArgument(format!(
            "expected a diagonal central matrix, found {}",
            c.kind_name()
        )));
    };
    let out = match mode {
        DiagonalMode::RotzChain => diagonal_rotz_chain(*nb, phases, tol)?,
        DiagonalMode::ControlledPhase => diagonal_controlled_phase(phases, tol)?,
    };
    Program::from_instructions(*nb, out)
}

/// Split a complex D matrix into `right diagonal`, `real D`, `left diagonal`
/// (in application order).
pub fn split_complex_d(c: &CentralMatrix) -> Result<[CentralMatrix; 3]> {
    c.check()?;
    let CentralMatrix::ComplexD { nb, level, phases } = c else {
        return Err(Error::InvalidArgument(format!(
            "expected a complexD central matrix, found {}",
            c.kind_name()
        )));
    };
    let r = nb - level;
    let dim = 1 << nb;
    let mut right = vec![0.0; dim];
    let mut left = vec![0.0; dim];
    for a in 0..phases.len() {
        let (s0, s1) = (insert_bit(a, r, 0), insert_bit(a, r, 1));
        right[s0] = phases.omega[a];
        right[s1] = phases.omega[a] + phases.omega_r[a];
        left[s1] = phases.omega_l[a];
    }
    Ok([
        CentralMatrix::Diagonal { nb: *nb, phases: right },
        CentralMatrix::RealD {
            nb: *nb,
            level: *level,
            angles: phases.thetas.clone(),
        },
        CentralMatrix::Diagonal { nb: *nb, phases: left },
    ])
}

/// SEO for a complex D matrix: its two diagonal factors in controlled-phase
/// form around the real D core.
pub fn decompose_complex_d(c: &CentralMatrix) -> Result<Program> {
    decompose_complex_d_with(c, &Tolerance::default(), false)
}

/// As [`decompose_complex_d`]; with `right_angles` the real core goes through
/// [`decompose_right_angle_case`] when all its angles are 0 or 90 degrees.
pub fn decompose_complex_d_with(c: &CentralMatrix, tol: &Tolerance, right_angles: bool) -> Result<Program> {
    let [right, core, left] = split_complex_d(c)?;
    let mut p = decompose_diagonal_with(&right, DiagonalMode::ControlledPhase, tol)?;
    let core_prog = if right_angles && is_right_angle_case(&core, tol) {
        decompose_right_angle_case_with(&core, tol)?
    } else {
        decompose_real_d_with(&core, tol)?
    };
    p.append(&core_prog)?;
    p.append(&decompose_diagonal_with(&left, DiagonalMode::ControlledPhase, tol)?)?;
    Ok(p)
}

fn right_angle_flags(angles: &[f64], tol: &Tolerance) -> Result<Vec<bool>> {
    angles
        .iter()
        .map(|&t| {
            if t.abs() <= tol.angle_cluster {
                Ok(false)
            } else if (t - 90.0).abs() <= tol.angle_cluster {
                Ok(true)
            } else {
                Err(Error::NotRightAngle { angle: t })
            }
        })
        .collect()
}

/// True for a real D matrix whose angles are all 0 or 90 degrees.
pub fn is_right_angle_case(c: &CentralMatrix, tol: &Tolerance) -> bool {
    matches!(c, CentralMatrix::RealD { angles, .. } if right_angle_flags(angles, tol).is_ok())
}

/// SEO for a real D matrix with only 0 and 90 degree angles.
///
/// A rotation by 90 on every block is one `ROTY`; a rotation selected by a
/// single control bit becomes a CNOT and a sign fix. Anything else falls back
/// to [`decompose_real_d`].
pub fn decompose_right_angle_case(c: &CentralMatrix) -> Result<Program> {
    decompose_right_angle_case_with(c, &Tolerance::default())
}

pub fn decompose_right_angle_case_with(c: &CentralMatrix, tol: &Tolerance) -> Result<Program> {
    c.check()?;
    let CentralMatrix::RealD { nb, level, angles } = c else {
        return Err(Error::InvalidArgument(format!(
            "expected a realD central matrix, found {}",
            c.kind_name()
        )));
    };
    let flags = right_angle_flags(angles, tol)?;
    let (nb, level) = (*nb, *level);
    let gamma = nb - level;
    if flags.iter().all(|&f| !f) {
        return Ok(Program::new(nb));
    }
    if flags.iter().all(|&f| f) {
        return Program::from_instructions(
            nb,
            vec![Instruction::RotY {
                target: gamma,
                angle: 90.0,
            }],
        );
    }
    let alias = level_alias(nb, level)?;
    for k in 0..nb - 1 {
        for set in [true, false] {
            if flags.iter().enumerate().all(|(a, &f)| f == ((a >> k & 1 == 1) == set)) {
                let alpha = alias.image(k);
                let ctl = if set { Control::set(alpha) } else { Control::clear(alpha) };
                return Program::from_instructions(
                    nb,
                    vec![
                        Instruction::Cnot {
                            controls: vec![ctl],
                            target: gamma,
                        },
                        Instruction::Cpha {
                            controls: vec![Control::set(gamma), ctl],
                            angle: 180.0,
                        },
                    ],
                );
            }
        }
    }
    decompose_real_d_with(c, tol)
}
