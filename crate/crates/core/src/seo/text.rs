//! Line-oriented SEO text format.
//!
//! ```text
//! ROTY 1 45
//! CNOT 0 T 2 F 1
//! CPHA 0 T 2 T 45
//! PHAS -90
//! ```

use std::fmt::Write as _;

use super::{Control, Instruction, Polarity, Program};
use crate::error::{Error, Result};

/// Angle with 15 significant digits, trailing zeros trimmed.
pub fn format_angle(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.14e}", x);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(char::is_ascii_digit).collect();
    let body = if (-5..15).contains(&exp) {
        let point = exp + 1;
        let s = if point <= 0 {
            format!("0.{}{}", "0".repeat((-point) as usize), digits)
        } else {
            let p = point as usize;
            format!("{}.{}", &digits[..p], &digits[p..])
        };
        trim_fraction(&s)
    } else {
        let m = trim_fraction(&format!("{}.{}", &digits[..1], &digits[1..]));
        format!("{m}e{exp}")
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn write_controls(out: &mut String, controls: &[Control]) {
    for c in controls {
        write!(out, " {} {}", c.bit, c.polarity.symbol()).unwrap();
    }
}

/// One line per instruction, in application order.
pub fn serialize(p: &Program) -> String {
    let mut out = String::new();
    for inst in p {
        out.push_str(inst.kind().keyword());
        match inst {
            Instruction::RotY { target, angle } | Instruction::RotZ { target, angle } => {
                write!(out, " {target} {}", format_angle(*angle)).unwrap();
            }
            Instruction::SigX { target } => write!(out, " {target}").unwrap(),
            Instruction::Cnot { controls, target } => {
                write_controls(&mut out, controls);
                write!(out, " {target}").unwrap();
            }
            Instruction::Phas { angle } => write!(out, " {}", format_angle(*angle)).unwrap(),
            Instruction::Cpha { controls, angle } => {
                write_controls(&mut out, controls);
                write!(out, " {}", format_angle(*angle)).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

struct LineParser<'a> {
    line: usize,
    tokens: Vec<&'a str>,
}

impl<'a> LineParser<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn bit(&self, t: &str) -> Result<usize> {
        t.parse()
            .map_err(|_| self.err(format!("expected a bit index, found '{t}'")))
    }

    fn angle(&self, t: &str) -> Result<f64> {
        t.parse::<f64>()
            .ok()
            .filter(|a| a.is_finite())
            .ok_or_else(|| self.err(format!("expected an angle, found '{t}'")))
    }

    fn polarity(&self, t: &str) -> Result<Polarity> {
        match t {
            "T" => Ok(Polarity::Set),
            "F" => Ok(Polarity::Clear),
            _ => Err(self.err(format!("expected T or F, found '{t}'"))),
        }
    }

    fn expect_args(&self, n: usize) -> Result<()> {
        if self.tokens.len() - 1 != n {
            return Err(self.err(format!(
                "{} takes {n} argument(s), found {}",
                self.tokens[0],
                self.tokens.len() - 1
            )));
        }
        Ok(())
    }

    /// Control pairs followed by one trailing token.
    fn controls_then_last(&self) -> Result<(Vec<Control>, &'a str)> {
        let args = &self.tokens[1..];
        if args.len() < 3 || args.len().is_multiple_of(2) {
            return Err(self.err(format!(
                "{} takes one or more 'bit T|F' controls and a final argument",
                self.tokens[0]
            )));
        }
        let mut controls = Vec::new();
        for pair in args[..args.len() - 1].chunks(2) {
            controls.push(Control {
                bit: self.bit(pair[0])?,
                polarity: self.polarity(pair[1])?,
            });
        }
        Ok((controls, args[args.len() - 1]))
    }

    fn instruction(&self) -> Result<Instruction> {
        let t = &self.tokens;
        let inst = match t[0] {
            "ROTY" | "ROTZ" => {
                self.expect_args(2)?;
                let (target, angle) = (self.bit(t[1])?, self.angle(t[2])?);
                if t[0] == "ROTY" {
                    Instruction::RotY { target, angle }
                } else {
                    Instruction::RotZ { target, angle }
                }
            }
            "SIGX" => {
                self.expect_args(1)?;
                Instruction::SigX {
                    target: self.bit(t[1])?,
                }
            }
            "PHAS" => {
                if t.len() > 2 {
                    return Err(self.err("PHAS takes a single angle and no controls"));
                }
                self.expect_args(1)?;
                Instruction::Phas {
                    angle: self.angle(t[1])?,
                }
            }
            "CNOT" => {
                let (controls, last) = self.controls_then_last()?;
                Instruction::Cnot {
                    controls,
                    target: self.bit(last)?,
                }
            }
            "CPHA" => {
                let (controls, last) = self.controls_then_last()?;
                Instruction::Cpha {
                    controls,
                    angle: self.angle(last)?,
                }
            }
            other => return Err(self.err(format!("unknown instruction '{other}'"))),
        };
        inst.validate().map_err(|e| self.err(e.to_string()))?;
        Ok(inst)
    }
}

/// Parse SEO text. Without `nb`, the bit count is one more than the largest
/// bit index referenced (at least 1). Blank lines are skipped.
pub fn parse(text: &str, nb: Option<usize>) -> Result<Program> {
    let mut parsed = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let lp = LineParser {
            line: i + 1,
            tokens,
        };
        let inst = lp.instruction()?;
        if let (Some(nb), Some(b)) = (nb, inst.max_bit()) {
            if b >= nb {
                return Err(lp.err(format!("bit {b} out of range for {nb} bits")));
            }
        }
        parsed.push(inst);
    }
    let nb = nb.unwrap_or_else(|| {
        parsed
            .iter()
            .filter_map(Instruction::max_bit)
            .max()
            .map_or(1, |b| b + 1)
    });
    Program::from_instructions(nb, parsed)
}
