//! Recursive CSD tree construction and its flattening into a program.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::{apply_bit_permutation, BitPermutation};
use crate::central::{
    decompose_complex_d_with, decompose_diagonal_with, decompose_real_d_with,
    decompose_right_angle_case_with, is_right_angle_case, CentralMatrix, DiagonalMode,
};
use crate::decompositions::{block_phases, csd_with_tol, is_complex_d, lighten, BlockPhases, PhaseFactors};
use crate::error::{Error, Result};
use crate::matrix::{frobenius_distance, ComplexMatrix, Tolerance};
use crate::seo::{expand_controls, program_to_matrix, InstructionKind, Program};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PermSearch {
    None,
    /// Try every bit permutation at the root and keep the shortest program.
    RootExhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompileOptions {
    pub lighten: bool,
    pub extract_phases: bool,
    pub expand_controls: bool,
    pub perm_search: PermSearch,
    pub tol: Tolerance,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            lighten: true,
            extract_phases: true,
            expand_controls: false,
            perm_search: PermSearch::None,
            tol: Tolerance::default(),
        }
    }
}

/// Node of the CSD tree. Children are absent when their side matrices are
/// all the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct CsdNode {
    pub level: usize,
    pub central: CentralMatrix,
    /// Bit permutation the whole tree was built under, set on the root only.
    pub perm: Option<BitPermutation>,
    pub left: Option<Box<CsdNode>>,
    pub right: Option<Box<CsdNode>>,
}

impl CsdNode {
    pub fn node_count(&self) -> usize {
        1 + self.left.as_ref().map_or(0, |n| n.node_count()) + self.right.as_ref().map_or(0, |n| n.node_count())
    }

    pub fn depth(&self) -> usize {
        1 + self
            .left
            .as_ref()
            .map_or(0, |n| n.depth())
            .max(self.right.as_ref().map_or(0, |n| n.depth()))
    }

    /// Every node in the tree, in preorder.
    pub fn nodes(&self) -> Vec<&CsdNode> {
        let mut out = vec![self];
        if let Some(l) = &self.left {
            out.extend(l.nodes());
        }
        if let Some(r) = &self.right {
            out.extend(r.nodes());
        }
        out
    }

    pub fn child_count(&self) -> usize {
        self.left.is_some() as usize + self.right.is_some() as usize
    }
}

/// Pad `u` with an identity block up to the next power of two (at least 2).
/// Returns the padded matrix and its bit count.
pub fn pad_to_power_of_two(u: &ComplexMatrix, tol: &Tolerance) -> Result<(ComplexMatrix, usize)> {
    if !u.is_square() {
        return Err(Error::NotSquare {
            rows: u.rows(),
            cols: u.cols(),
        });
    }
    if u.rows() == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let dev = u.unitarity_deviation();
    if dev > tol.eps {
        return Err(Error::NotUnitary { max_deviation: dev });
    }
    let dim = u.rows().next_power_of_two().max(2);
    let nb = dim.trailing_zeros() as usize;
    if dim == u.rows() {
        return Ok((u.clone(), nb));
    }
    let mut out = ComplexMatrix::identity(dim);
    out.set_block(0, 0, u);
    Ok((out, nb))
}

/// Side matrices of one side of a node; `None` stands for the identity.
type Sides = Vec<Option<ComplexMatrix>>;

fn all_identity(sides: &Sides, tol: f64) -> bool {
    sides.iter().all(|s| s.as_ref().is_none_or(|m| m.is_identity(tol)))
}

fn all_diagonal(sides: &Sides, tol: f64) -> bool {
    sides.iter().all(|s| s.as_ref().is_none_or(|m| m.is_diagonal(tol)))
}

fn diag_entry(side: &Option<ComplexMatrix>, j: usize) -> Complex64 {
    side.as_ref().map_or(Complex64::new(1.0, 0.0), |m| m[(j, j)])
}

/// Multiply diagonal side matrices into the 2x2 blocks of the central matrix.
fn absorb_diagonal_sides(blocks: &mut [BlockPhases], left: &Sides, right: &Sides, half: usize, tol: f64) {
    for (k, blk) in blocks.iter_mut().enumerate() {
        let (b, j) = (k / half, k % half);
        let (l0, l1) = (diag_entry(&left[2 * b], j), diag_entry(&left[2 * b + 1], j));
        let (r0, r1) = (diag_entry(&right[2 * b], j), diag_entry(&right[2 * b + 1], j));
        let [d00, d01, d10, d11] = blk.entries();
        *blk = block_phases([l0 * d00 * r0, l0 * d01 * r1, l1 * d10 * r0, l1 * d11 * r1], tol);
    }
}

fn build_node(level: usize, nb: usize, inputs: Vec<ComplexMatrix>, opts: &CompileOptions) -> Result<CsdNode> {
    let tol = &opts.tol;
    if level == nb + 1 {
        let phases = inputs.iter().map(|m| m[(0, 0)].arg().to_degrees()).collect();
        return Ok(CsdNode {
            level,
            central: CentralMatrix::Diagonal { nb, phases },
            perm: None,
            left: None,
            right: None,
        });
    }
    let half = 1usize << (nb - level);
    let zero = BlockPhases {
        omega: 0.0,
        omega_l: 0.0,
        omega_r: 0.0,
        theta: 0.0,
    };
    let mut blocks = vec![zero; inputs.len() * half];
    let mut left: Sides = Vec::with_capacity(2 * inputs.len());
    let mut right: Sides = Vec::with_capacity(2 * inputs.len());
    for (b, u) in inputs.iter().enumerate() {
        if opts.extract_phases && is_complex_d(u, tol.eps) {
            for j in 0..half {
                blocks[b * half + j] = block_phases(
                    [u[(j, j)], u[(j, half + j)], u[(half + j, j)], u[(half + j, half + j)]],
                    tol.eps,
                );
            }
            left.extend([None, None]);
            right.extend([None, None]);
            continue;
        }
        let mut f = csd_with_tol(u, tol)?;
        if opts.lighten {
            f = lighten(&f, tol);
        }
        for (j, &theta) in f.thetas.iter().enumerate() {
            blocks[b * half + j] = BlockPhases { theta, ..zero };
        }
        left.extend([Some(f.l0), Some(f.l1)]);
        right.extend([Some(f.r0), Some(f.r1)]);
    }

    if opts.extract_phases {
        let absorb_left = !all_identity(&left, tol.identity) && all_diagonal(&left, tol.eps);
        let absorb_right = !all_identity(&right, tol.identity) && all_diagonal(&right, tol.eps);
        if absorb_left || absorb_right {
            let none: Sides = vec![None; left.len()];
            absorb_diagonal_sides(
                &mut blocks,
                if absorb_left { &left } else { &none },
                if absorb_right { &right } else { &none },
                half,
                tol.eps,
            );
            if absorb_left {
                left = none.clone();
            }
            if absorb_right {
                right = none;
            }
        }
    }

    let central = if blocks.iter().any(|b| b.has_phases(tol.prune)) {
        CentralMatrix::ComplexD {
            nb,
            level,
            phases: PhaseFactors::from_blocks(&blocks),
        }
    } else {
        CentralMatrix::RealD {
            nb,
            level,
            angles: blocks.iter().map(|b| b.theta).collect(),
        }
    };

    let child = |sides: Sides| -> Result<Option<Box<CsdNode>>> {
        if all_identity(&sides, tol.identity) {
            return Ok(None);
        }
        let dim = half;
        let inputs = sides
            .into_iter()
            .map(|s| s.unwrap_or_else(|| ComplexMatrix::identity(dim)))
            .collect();
        build_node(level + 1, nb, inputs, opts).map(|n| Some(Box::new(n)))
    };
    let (l, r) = rayon::join(|| child(left), || child(right));
    Ok(CsdNode {
        level,
        central,
        perm: None,
        left: l?,
        right: r?,
    })
}

fn build_tree_unpermuted(u: &ComplexMatrix, nb: usize, opts: &CompileOptions) -> Result<CsdNode> {
    build_node(1, nb, vec![u.clone()], opts)
}

/// Central matrices in application order, each with the permutation under
/// which it was built.
pub fn assemble(tree: &CsdNode) -> Vec<(&CentralMatrix, Option<&BitPermutation>)> {
    fn walk<'a>(n: &'a CsdNode, perm: Option<&'a BitPermutation>, out: &mut Vec<(&'a CentralMatrix, Option<&'a BitPermutation>)>) {
        if let Some(r) = &n.right {
            walk(r, perm, out);
        }
        out.push((&n.central, perm));
        if let Some(l) = &n.left {
            walk(l, perm, out);
        }
    }
    let mut out = Vec::new();
    walk(tree, tree.perm.as_ref(), &mut out);
    out
}

/// Program for one central matrix under the given options.
pub fn decompose_central(c: &CentralMatrix, opts: &CompileOptions) -> Result<Program> {
    let tol = &opts.tol;
    match c {
        CentralMatrix::RealD { .. } if opts.extract_phases && is_right_angle_case(c, tol) => {
            decompose_right_angle_case_with(c, tol)
        }
        CentralMatrix::RealD { .. } => decompose_real_d_with(c, tol),
        CentralMatrix::ComplexD { .. } => decompose_complex_d_with(c, tol, opts.extract_phases),
        CentralMatrix::Diagonal { .. } => decompose_diagonal_with(c, DiagonalMode::RotzChain, tol),
    }
}

fn tree_program(tree: &CsdNode, nb: usize, opts: &CompileOptions) -> Result<Program> {
    let mut p = Program::new(nb);
    for (c, perm) in assemble(tree) {
        let mut part = decompose_central(c, opts)?;
        if let Some(perm) = perm {
            part = part.permuted(&perm.inverse())?;
        }
        p.append(&part)?;
    }
    if opts.expand_controls {
        p = expand_controls(&p)?;
    }
    Ok(p)
}

/// Every permutation of `0..n` in lexicographic order, identity first.
fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in all_permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out.sort();
    out
}

fn search_root_permutations(u: &ComplexMatrix, nb: usize, opts: &CompileOptions) -> Result<(CsdNode, Program)> {
    if nb > 8 {
        return Err(Error::PermSearchTooLarge { nb });
    }
    let candidates: Vec<Result<(CsdNode, Program)>> = all_permutations(nb)
        .into_par_iter()
        .map(|map| {
            let perm = BitPermutation::new(map)?;
            let permuted = apply_bit_permutation(&perm, u)?;
            let mut tree = build_tree_unpermuted(&permuted, nb, opts)?;
            if !perm.is_identity() {
                tree.perm = Some(perm);
            }
            let prog = tree_program(&tree, nb, opts)?;
            Ok((tree, prog))
        })
        .collect();
    let mut best: Option<(CsdNode, Program)> = None;
    for c in candidates {
        let c = c?;
        if best.as_ref().is_none_or(|b| c.1.len() < b.1.len()) {
            best = Some(c);
        }
    }
    Ok(best.expect("at least one permutation"))
}

/// CSD tree of a unitary matrix (padded to a power of two).
pub fn build_tree(u: &ComplexMatrix, opts: &CompileOptions) -> Result<CsdNode> {
    let (padded, nb) = pad_to_power_of_two(u, &opts.tol)?;
    match opts.perm_search {
        PermSearch::None => build_tree_unpermuted(&padded, nb, opts),
        PermSearch::RootExhaustive => Ok(search_root_permutations(&padded, nb, opts)?.0),
    }
}

/// Compile a unitary matrix into a program realizing it (after padding).
pub fn compile(u: &ComplexMatrix, opts: &CompileOptions) -> Result<Program> {
    Ok(compile_with_tree(u, opts)?.1)
}

/// Like [`compile`], also returning the tree the program came from.
pub fn compile_with_tree(u: &ComplexMatrix, opts: &CompileOptions) -> Result<(CsdNode, Program)> {
    let (padded, nb) = pad_to_power_of_two(u, &opts.tol)?;
    match opts.perm_search {
        PermSearch::None => {
            let tree = build_tree_unpermuted(&padded, nb, opts)?;
            let prog = tree_program(&tree, nb, opts)?;
            Ok((tree, prog))
        }
        PermSearch::RootExhaustive => search_root_permutations(&padded, nb, opts),
    }
}

/// Summary of a compilation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompileReport {
    pub nb: usize,
    pub instructions: usize,
    pub counts: Vec<(String, usize)>,
    pub tree_nodes: usize,
    pub tree_depth: usize,
    /// Frobenius distance between the program's matrix and the padded input.
    pub error: f64,
}

/// Compile and measure how well the program reproduces the input.
pub fn compile_with_report(u: &ComplexMatrix, opts: &CompileOptions) -> Result<(Program, CompileReport)> {
    let (padded, nb) = pad_to_power_of_two(u, &opts.tol)?;
    let (tree, prog) = compile_with_tree(u, opts)?;
    let error = frobenius_distance(&program_to_matrix(&prog), &padded)?;
    let report = CompileReport {
        nb,
        instructions: prog.len(),
        counts: InstructionKind::ALL
            .iter()
            .map(|k| (k.keyword().to_string(), prog.count(*k)))
            .collect(),
        tree_nodes: tree.node_count(),
        tree_depth: tree.depth(),
        error,
    };
    Ok((prog, report))
}
