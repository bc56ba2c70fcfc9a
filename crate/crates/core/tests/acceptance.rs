//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::time::Instant;

use csd_compiler::bits::bit_reversal_permutation;
use csd_compiler::central::{
    decompose_complex_d, decompose_diagonal, decompose_real_d, decompose_right_angle_case, insert_bit,
    CentralMatrix, DiagonalMode,
};
use csd_compiler::compiler::{compile_with_tree, CsdNode};
use csd_compiler::decompositions::{csd, PhaseFactors};
use csd_compiler::matrix::{frobenius_distance, ComplexMatrix};
use csd_compiler::reference::{dft_matrix, hadamard_input, quantum_fft_program};
use csd_compiler::seo::{
    expand_controls, instruction_matrix, parse, program_to_matrix, serialize, Instruction, InstructionKind, Program,
};
use csd_compiler::{compile, CompileOptions};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use common::{random_angle, random_bits, random_controls, random_program, random_unitary, rng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn expi(deg: f64) -> Complex64 {
    Complex64::from_polar(1.0, deg.to_radians())
}

fn dft_input(nb: usize) -> ComplexMatrix {
    &bit_reversal_permutation(nb).state_matrix() * &dft_matrix(nb)
}

fn round_trip_fidelity() -> Outcome {
    let mut worst = 0.0f64;
    for nb in 1..=5 {
        let errors: Vec<f64> = (0..200u64)
            .into_par_iter()
            .map(|k| {
                let u = random_unitary(&mut rng(1000 * nb as u64 + k), 1 << nb);
                let p = compile(&u, &CompileOptions::default()).expect("compiles");
                frobenius_distance(&u, &program_to_matrix(&p)).unwrap()
            })
            .collect();
        worst = errors.into_iter().fold(worst, f64::max);
    }
    check(worst < 1e-8, format!("1000 unitaries, nb 1..5, worst distance {worst:.2e}"))
}

fn fft_reproduction() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for nb in 2..=4 {
        let u = dft_input(nb);
        let p = compile(&u, &CompileOptions::default()).map_err(|e| e.to_string())?;
        let dist = frobenius_distance(&u, &program_to_matrix(&p)).unwrap();
        let mut got: Vec<f64> = p
            .iter()
            .filter(|i| i.kind() == InstructionKind::Cpha)
            .map(|i| i.angle().unwrap())
            .collect();
        got.sort_by(f64::total_cmp);
        let mut want: Vec<f64> = (2..=nb)
            .flat_map(|g| std::iter::repeat_n(360.0 / (1u64 << g) as f64, nb + 1 - g))
            .collect();
        want.sort_by(f64::total_cmp);
        let angles_match = got.len() == want.len() && got.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-9);
        let budget = quantum_fft_program(nb).unwrap().len() + 2 * nb;
        ok &= dist < 1e-10 && angles_match && p.len() <= budget;
        notes.push(format!(
            "nb={nb}: dist {dist:.1e}, CPHA {got:?} vs {want:?}, count {} <= {budget}",
            p.len()
        ));
    }
    check(ok, notes.join("; "))
}

fn hadamard_scaling() -> Outcome {
    let mut counts = Vec::new();
    let mut worst = 0.0f64;
    for nb in 2..=5 {
        let u = hadamard_input(nb);
        let p = compile(&u, &CompileOptions::default()).map_err(|e| e.to_string())?;
        worst = worst.max(frobenius_distance(&u, &program_to_matrix(&p)).unwrap());
        counts.push(p.len());
    }
    let steps: Vec<i64> = counts.windows(2).map(|w| w[1] as i64 - w[0] as i64).collect();
    let constant = steps.windows(2).all(|w| w[0] == w[1]);
    check(
        constant && worst < 1e-10,
        format!("counts for nb 2..5 {counts:?}, steps {steps:?}, worst distance {worst:.1e}"),
    )
}

fn csd_kernel() -> Outcome {
    let results: Vec<Result<(f64, f64, f64), String>> = (0..1000u64)
        .into_par_iter()
        .map(|k| {
            let n = 2 * (1 + (k as usize % 8));
            let u = random_unitary(&mut rng(50_000 + k), n);
            let f = csd(&u).map_err(|e| e.to_string())?;
            let rec = frobenius_distance(&f.reconstruct(), &u).unwrap();
            let side = [&f.l0, &f.l1, &f.r0, &f.r1]
                .iter()
                .map(|m| m.unitarity_deviation())
                .fold(0.0, f64::max);
            let sorted = f.thetas.windows(2).all(|w| w[0] <= w[1]);
            let in_range = f.thetas.iter().all(|&t| (0.0..=90.0).contains(&t));
            if !(sorted && in_range) {
                return Err(format!("dim {n}: angles {:?}", f.thetas));
            }
            let h = n / 2;
            let cs = ComplexMatrix::from_diagonal(
                &f.thetas.iter().map(|t| Complex64::new(t.to_radians().cos(), 0.0)).collect::<Vec<_>>(),
            );
            let sn = ComplexMatrix::from_diagonal(
                &f.thetas.iter().map(|t| Complex64::new(t.to_radians().sin(), 0.0)).collect::<Vec<_>>(),
            );
            let neg = Complex64::new(-1.0, 0.0);
            let blocks = [
                (u.block(0, 0, h, h), &(&f.l0 * &cs) * &f.r0),
                (u.block(0, h, h, h), &(&f.l0 * &sn) * &f.r1),
                (u.block(h, 0, h, h), (&(&f.l1 * &sn) * &f.r0).scale(neg)),
                (u.block(h, h, h, h), &(&f.l1 * &cs) * &f.r1),
            ];
            let block = blocks
                .iter()
                .map(|(a, b)| frobenius_distance(a, b).unwrap())
                .fold(0.0, f64::max);
            Ok((rec, side, block))
        })
        .collect();
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for r in results {
        let (a, b, c) = r?;
        worst = (worst.0.max(a), worst.1.max(b), worst.2.max(c));
    }
    check(
        worst.0 < 1e-10 && worst.1 < 1e-12 && worst.2 < 1e-10,
        format!(
            "1000 unitaries, dims 2..16: reconstruction {:.1e}, side unitarity {:.1e}, block residual {:.1e}, angles sorted in [0, 90]",
            worst.0, worst.1, worst.2
        ),
    )
}

fn control_expansion() -> Outcome {
    let mut r = rng(7);
    let mut worst = 0.0f64;
    let mut widest = 0;
    for k in 0..100 {
        let nb = 3 + k % 3;
        let inst = if r.random_bool(0.5) {
            let c = r.random_range(2..=3.min(nb - 1));
            let bits = random_bits(&mut r, nb, c + 1);
            Instruction::Cnot {
                controls: random_controls(&mut r, &bits[..c]),
                target: bits[c],
            }
        } else {
            let c = r.random_range(2..=3);
            let bits = random_bits(&mut r, nb, c);
            Instruction::Cpha {
                controls: random_controls(&mut r, &bits),
                angle: random_angle(&mut r),
            }
        };
        let p = Program::from_instructions(nb, vec![inst.clone()]).unwrap();
        let e = expand_controls(&p).map_err(|e| e.to_string())?;
        let dense = instruction_matrix(&inst, nb).unwrap();
        worst = worst.max(frobenius_distance(&dense, &program_to_matrix(&e)).unwrap());
        widest = e.iter().map(|i| i.bits().len()).fold(widest, usize::max);
    }
    check(
        worst < 1e-10 && widest <= 2,
        format!("100 instructions: worst distance {worst:.1e}, widest output touches {widest} bits"),
    )
}

/// `exp(i theta sigma_y)` blocks on bit `nb - level`, built entry by entry.
fn dense_real_d(nb: usize, level: usize, angles: &[f64]) -> ComplexMatrix {
    let blocks: Vec<(f64, f64, f64, f64)> = angles.iter().map(|&t| (0.0, 0.0, 0.0, t)).collect();
    dense_complex_d(nb, level, &blocks)
}

/// Blocks `e^{iW} [[c, e^{iwr} s], [-e^{iwl} s, e^{i(wl+wr)} c]]` on bit `nb - level`.
fn dense_complex_d(nb: usize, level: usize, blocks: &[(f64, f64, f64, f64)]) -> ComplexMatrix {
    let r = nb - level;
    let mut m = ComplexMatrix::zeros(1 << nb, 1 << nb);
    for (a, &(w, wl, wr, t)) in blocks.iter().enumerate() {
        let (s, c) = t.to_radians().sin_cos();
        let (s0, s1) = (insert_bit(a, r, 0), insert_bit(a, r, 1));
        m[(s0, s0)] = expi(w) * c;
        m[(s0, s1)] = expi(w + wr) * s;
        m[(s1, s0)] = -expi(w + wl) * s;
        m[(s1, s1)] = expi(w + wl + wr) * c;
    }
    m
}

fn dense_diagonal(phases: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&phases.iter().map(|&p| expi(p)).collect::<Vec<_>>())
}

fn central_decompositions() -> Outcome {
    let mut r = rng(11);
    let mut worst: Vec<(&str, f64)> = vec![
        ("realD", 0.0),
        ("diagonal/rotz-chain", 0.0),
        ("diagonal/controlled-phase", 0.0),
        ("complexD", 0.0),
        ("right-angle", 0.0),
    ];
    let mut record = |slot: usize, p: &Program, dense: &ComplexMatrix| {
        let d = frobenius_distance(&program_to_matrix(p), dense).unwrap();
        worst[slot].1 = worst[slot].1.max(d);
    };
    for nb in 2..=4 {
        let half = 1 << (nb - 1);
        for k in 0..100 {
            for level in 1..=nb {
                let angles: Vec<f64> = (0..half).map(|_| random_angle(&mut r)).collect();
                let c = CentralMatrix::RealD { nb, level, angles: angles.clone() };
                record(0, &decompose_real_d(&c).map_err(|e| e.to_string())?, &dense_real_d(nb, level, &angles));
            }

            let phases: Vec<f64> = (0..1 << nb).map(|_| random_angle(&mut r)).collect();
            let c = CentralMatrix::Diagonal { nb, phases: phases.clone() };
            let dense = dense_diagonal(&phases);
            record(1, &decompose_diagonal(&c, DiagonalMode::RotzChain).map_err(|e| e.to_string())?, &dense);
            record(2, &decompose_diagonal(&c, DiagonalMode::ControlledPhase).map_err(|e| e.to_string())?, &dense);

            let level = 1 + k % nb;
            let blocks: Vec<(f64, f64, f64, f64)> = (0..half)
                .map(|_| {
                    (
                        random_angle(&mut r),
                        random_angle(&mut r),
                        random_angle(&mut r),
                        r.random_range(0.0..=90.0),
                    )
                })
                .collect();
            let phases = PhaseFactors {
                omega: blocks.iter().map(|b| b.0).collect(),
                omega_l: blocks.iter().map(|b| b.1).collect(),
                omega_r: blocks.iter().map(|b| b.2).collect(),
                thetas: blocks.iter().map(|b| b.3).collect(),
            };
            let c = CentralMatrix::ComplexD { nb, level, phases };
            record(3, &decompose_complex_d(&c).map_err(|e| e.to_string())?, &dense_complex_d(nb, level, &blocks));

            let angles: Vec<f64> = (0..half).map(|_| if r.random_bool(0.5) { 90.0 } else { 0.0 }).collect();
            let c = CentralMatrix::RealD { nb, level, angles: angles.clone() };
            record(
                4,
                &decompose_right_angle_case(&c).map_err(|e| e.to_string())?,
                &dense_real_d(nb, level, &angles),
            );
        }
    }
    let ok = worst.iter().all(|(_, d)| *d < 1e-10);
    let detail = worst
        .iter()
        .map(|(name, d)| format!("{name} {d:.1e}"))
        .collect::<Vec<_>>()
        .join(", ");
    check(ok, format!("nb 2..4, 100 instances each: {detail}"))
}

fn same_program(a: &Program, b: &Program) -> bool {
    a.nb() == b.nb()
        && a.len() == b.len()
        && a.iter().zip(b.iter()).all(|(x, y)| {
            x.kind() == y.kind()
                && x.target() == y.target()
                && x.controls() == y.controls()
                && match (x.angle(), y.angle()) {
                    (Some(p), Some(q)) => (p - q).abs() <= 1e-12 * p.abs().max(1.0),
                    (None, None) => true,
                    _ => false,
                }
        })
}

fn file_format_stability() -> Outcome {
    let mut r = rng(3);
    for k in 0..1000 {
        let nb = 1 + k % 6;
        let len = r.random_range(0..40);
        let p = random_program(&mut r, nb, len);
        let text = serialize(&p);
        let back = parse(&text, Some(nb)).map_err(|e| format!("program {k}: {e}"))?;
        if !same_program(&p, &back) {
            return Err(format!("program {k} changed through text:\n{text}"));
        }
        if serialize(&back) != text {
            return Err(format!("program {k} re-serializes differently"));
        }
    }
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
    let mut files = 0;
    for entry in std::fs::read_dir(dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.extension().is_some_and(|x| x == "seo") {
            let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
            let p = parse(&text, None).map_err(|e| format!("{}: {e}", path.display()))?;
            if serialize(&p) != text {
                return Err(format!("{} is not reproduced byte for byte", path.display()));
            }
            files += 1;
        }
    }
    check(files > 0, format!("1000 random programs round-trip; {files} canonical files byte-identical"))
}

fn tree_shape() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for nb in 2..=4 {
        let (tree, _) = compile_with_tree(&dft_input(nb), &CompileOptions::default()).map_err(|e| e.to_string())?;
        let widest = tree.nodes().iter().map(|n: &&CsdNode| n.child_count()).max().unwrap_or(0);
        ok &= widest <= 1;
        notes.push(format!("nb={nb}: {} nodes, max children {widest}", tree.node_count()));
    }
    check(ok, notes.join("; "))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("round-trip fidelity", round_trip_fidelity),
        ("quantum FFT reproduction", fft_reproduction),
        ("Hadamard linear scaling", hadamard_scaling),
        ("CSD kernel", csd_kernel),
        ("control expansion", control_expansion),
        ("central decompositions", central_decompositions),
        ("file format stability", file_format_stability),
        ("tree shape", tree_shape),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {} {tag} {name} ({:.2}s): {detail}",
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
