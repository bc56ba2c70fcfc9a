//! Sequences of elementary operations (SEOs): instruction types, the text
//! format, dense simulation, and expansion of multiply-controlled gates.

mod expand;
mod sim;
mod text;

pub use expand::{exchanger_program, expand_controls};
pub use sim::{apply_to_state, instruction_matrix, program_to_matrix};
pub use text::{format_angle, parse, serialize};

use serde::Serialize;

use crate::bits::BitPermutation;
use crate::error::{Error, Result};

/// Which projector a control selects: `Set` is `n = |1><1|`, `Clear` is `|0><0|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Polarity {
    Set,
    Clear,
}

impl Polarity {
    pub fn symbol(self) -> char {
        match self {
            Polarity::Set => 'T',
            Polarity::Clear => 'F',
        }
    }

    pub fn from_bool(set: bool) -> Self {
        if set {
            Polarity::Set
        } else {
            Polarity::Clear
        }
    }

    /// Whether a bit with this value satisfies the control.
    pub fn accepts(self, bit: bool) -> bool {
        bit == (self == Polarity::Set)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Control {
    pub bit: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn set(bit: usize) -> Self {
        Control {
            bit,
            polarity: Polarity::Set,
        }
    }

    pub fn clear(bit: usize) -> Self {
        Control {
            bit,
            polarity: Polarity::Clear,
        }
    }
}

/// True when every control accepts the corresponding bit of `state`.
pub fn controls_hold(controls: &[Control], state: usize) -> bool {
    controls
        .iter()
        .all(|c| c.polarity.accepts((state >> c.bit) & 1 == 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum InstructionKind {
    RotY,
    RotZ,
    SigX,
    Cnot,
    Phas,
    Cpha,
}

impl InstructionKind {
    pub fn keyword(self) -> &'static str {
        match self {
            InstructionKind::RotY => "ROTY",
            InstructionKind::RotZ => "ROTZ",
            InstructionKind::SigX => "SIGX",
            InstructionKind::Cnot => "CNOT",
            InstructionKind::Phas => "PHAS",
            InstructionKind::Cpha => "CPHA",
        }
    }

    pub const ALL: [InstructionKind; 6] = [
        InstructionKind::RotY,
        InstructionKind::RotZ,
        InstructionKind::SigX,
        InstructionKind::Cnot,
        InstructionKind::Phas,
        InstructionKind::Cpha,
    ];
}

/// One elementary operation. Angles are in degrees.
///
/// `RotY`/`RotZ` apply `exp(i angle sigma_{y,z})` to the target bit, `Phas`
/// multiplies by `exp(i angle)`, `Cpha` does so only when all controls hold,
/// and `Cnot` flips the target when all controls hold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Instruction {
    RotY { target: usize, angle: f64 },
    RotZ { target: usize, angle: f64 },
    SigX { target: usize },
    Cnot { controls: Vec<Control>, target: usize },
    Phas { angle: f64 },
    Cpha { controls: Vec<Control>, angle: f64 },
}

impl Instruction {
    pub fn kind(&self) -> InstructionKind {
        match self {
            Instruction::RotY { .. } => InstructionKind::RotY,
            Instruction::RotZ { .. } => InstructionKind::RotZ,
            Instruction::SigX { .. } => InstructionKind::SigX,
            Instruction::Cnot { .. } => InstructionKind::Cnot,
            Instruction::Phas { .. } => InstructionKind::Phas,
            Instruction::Cpha { .. } => InstructionKind::Cpha,
        }
    }

    pub fn target(&self) -> Option<usize> {
        match self {
            Instruction::RotY { target, .. }
            | Instruction::RotZ { target, .. }
            | Instruction::SigX { target }
            | Instruction::Cnot { target, .. } => Some(*target),
            _ => None,
        }
    }

    pub fn controls(&self) -> &[Control] {
        match self {
            Instruction::Cnot { controls, .. } | Instruction::Cpha { controls, .. } => controls,
            _ => &[],
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self {
            Instruction::RotY { angle, .. }
            | Instruction::RotZ { angle, .. }
            | Instruction::Phas { angle }
            | Instruction::Cpha { angle, .. } => Some(*angle),
            _ => None,
        }
    }

    /// Every bit the instruction reads or acts on: controls first, then the target.
    pub fn bits(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.controls().iter().map(|c| c.bit).collect();
        out.extend(self.target());
        out
    }

    pub fn max_bit(&self) -> Option<usize> {
        self.bits().into_iter().max()
    }

    /// Check that controls exist where required and no bit appears twice.
    pub fn validate(&self) -> Result<()> {
        if matches!(self.kind(), InstructionKind::Cnot | InstructionKind::Cpha)
            && self.controls().is_empty()
        {
            return Err(Error::InvalidArgument(format!(
                "{} needs at least one control",
                self.kind().keyword()
            )));
        }
        let mut bits = self.bits();
        bits.sort_unstable();
        if let Some(w) = bits.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "bit {} appears twice in {}",
                w[0],
                self.kind().keyword()
            )));
        }
        Ok(())
    }

    /// Copy with every bit index `b` replaced by `f(b)`.
    pub fn map_bits(&self, f: impl Fn(usize) -> usize) -> Instruction {
        let ctl = |cs: &[Control]| -> Vec<Control> {
            cs.iter()
                .map(|c| Control {
                    bit: f(c.bit),
                    polarity: c.polarity,
                })
                .collect()
        };
        match self {
            Instruction::RotY { target, angle } => Instruction::RotY {
                target: f(*target),
                angle: *angle,
            },
            Instruction::RotZ { target, angle } => Instruction::RotZ {
                target: f(*target),
                angle: *angle,
            },
            Instruction::SigX { target } => Instruction::SigX { target: f(*target) },
            Instruction::Cnot { controls, target } => Instruction::Cnot {
                controls: ctl(controls),
                target: f(*target),
            },
            Instruction::Phas { angle } => Instruction::Phas { angle: *angle },
            Instruction::Cpha { controls, angle } => Instruction::Cpha {
                controls: ctl(controls),
                angle: *angle,
            },
        }
    }
}

/// Instructions over `nb` bits, in the order they act on a state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Program {
    nb: usize,
    instructions: Vec<Instruction>,
}

impl Program {
    pub fn new(nb: usize) -> Self {
        Program {
            nb,
            instructions: Vec::new(),
        }
    }

    pub fn from_instructions(nb: usize, instructions: Vec<Instruction>) -> Result<Self> {
        let mut p = Program::new(nb);
        for inst in instructions {
            p.push(inst)?;
        }
        Ok(p)
    }

    pub fn nb(&self) -> usize {
        self.nb
    }

    pub fn push(&mut self, inst: Instruction) -> Result<()> {
        inst.validate()?;
        if let Some(b) = inst.max_bit() {
            if b >= self.nb {
                return Err(Error::IndexOutOfRange {
                    index: b,
                    bound: self.nb,
                });
            }
        }
        self.instructions.push(inst);
        Ok(())
    }

    pub fn append(&mut self, other: &Program) -> Result<()> {
        if other.nb > self.nb {
            return Err(Error::DimensionMismatch {
                expected: self.nb,
                found: other.nb,
            });
        }
        self.instructions.extend(other.instructions.iter().cloned());
        Ok(())
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn into_instructions(self) -> Vec<Instruction> {
        self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Instruction> {
        self.instructions.iter()
    }

    pub fn count(&self, kind: InstructionKind) -> usize {
        self.instructions.iter().filter(|i| i.kind() == kind).count()
    }

    /// Move every bit `b` to `perm.image(b)`.
    ///
    /// If this program realizes `M`, the result realizes `G M G^dagger`, where
    /// `G` is the state permutation of `perm`.
    pub fn permuted(&self, perm: &BitPermutation) -> Result<Program> {
        if perm.nb() != self.nb {
            return Err(Error::DimensionMismatch {
                expected: self.nb,
                found: perm.nb(),
            });
        }
        Ok(Program {
            nb: self.nb,
            instructions: self
                .instructions
                .iter()
                .map(|i| i.map_bits(|b| perm.image(b)))
                .collect(),
        })
    }
}

impl<'a> IntoIterator for &'a Program {
    type Item = &'a Instruction;
    type IntoIter = std::slice::Iter<'a, Instruction>;
    fn into_iter(self) -> Self::IntoIter {
        self.instructions.iter()
    }
}
