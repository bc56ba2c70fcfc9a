//! C ABI for `csd-compiler`.
//!
//! Matrices and programs cross the boundary as opaque handles that the caller
//! releases with the matching `*_free` function. Every fallible call returns a
//! [`CsdStatus`]; on failure, [`csd_last_error_message`] describes the cause.
//! Strings returned by the library are released with [`csd_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use csd_compiler::compiler::{compile, CompileOptions, PermSearch};
use csd_compiler::matrix::{frobenius_distance, parse_matrix, serialize_matrix};
use csd_compiler::seo::{parse, program_to_matrix, serialize};
use csd_compiler::{ComplexMatrix, Error, Program};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotUnitary = 3,
    Parse = 4,
    IndexOutOfRange = 5,
    Internal = 6,
}

/// Opaque complex matrix.
pub struct CsdMatrix(ComplexMatrix);

/// Opaque instruction sequence.
pub struct CsdProgram(Program);

/// Compiler switches. Obtain defaults from [`csd_compile_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CsdCompileOptions {
    pub lighten: bool,
    pub extract_phases: bool,
    pub expand_controls: bool,
    /// Try every bit permutation at the root and keep the shortest program.
    pub root_perm_search: bool,
}

impl From<CsdCompileOptions> for CompileOptions {
    fn from(o: CsdCompileOptions) -> Self {
        CompileOptions {
            lighten: o.lighten,
            extract_phases: o.extract_phases,
            expand_controls: o.expand_controls,
            perm_search: if o.root_perm_search {
                PermSearch::RootExhaustive
            } else {
                PermSearch::None
            },
            ..CompileOptions::default()
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CsdStatus {
    match e {
        Error::NotUnitary { .. } => CsdStatus::NotUnitary,
        Error::Parse { .. } => CsdStatus::Parse,
        Error::IndexOutOfRange { .. } => CsdStatus::IndexOutOfRange,
        _ => CsdStatus::InvalidArgument,
    }
}

/// Run `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), (CsdStatus, String)>) -> CsdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CsdStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            CsdStatus::Internal
        }
    }
}

fn lib_err(e: Error) -> (CsdStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (CsdStatus, String) {
    (CsdStatus::NullPointer, format!("{name} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, name: &str) -> Result<&'a T, (CsdStatus, String)> {
    unsafe { p.as_ref() }.ok_or_else(|| null(name))
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, (CsdStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| (CsdStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), (CsdStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

unsafe fn store_string(out: *mut *mut c_char, s: String) -> Result<(), (CsdStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).map_err(|_| (CsdStatus::Internal, "interior nul".to_string()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn csd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Default compiler switches.
#[no_mangle]
pub extern "C" fn csd_compile_options_default() -> CsdCompileOptions {
    let d = CompileOptions::default();
    CsdCompileOptions {
        lighten: d.lighten,
        extract_phases: d.extract_phases,
        expand_controls: d.expand_controls,
        root_perm_search: d.perm_search == PermSearch::RootExhaustive,
    }
}

/// New `rows x cols` matrix from `2 * rows * cols` doubles: row-major entries,
/// each as a real part followed by an imaginary part.
///
/// # Safety
/// `re_im` must point to `2 * rows * cols` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csd_matrix_new(
    rows: usize,
    cols: usize,
    re_im: *const f64,
    out: *mut *mut CsdMatrix,
) -> CsdStatus {
    guard(|| {
        if re_im.is_null() && rows * cols > 0 {
            return Err(null("re_im"));
        }
        let vals = if rows * cols == 0 {
            &[][..]
        } else {
            unsafe { std::slice::from_raw_parts(re_im, 2 * rows * cols) }
        };
        let data = vals
            .chunks_exact(2)
            .map(|c| csd_compiler::Complex64::new(c[0], c[1]))
            .collect();
        let m = ComplexMatrix::from_vec(rows, cols, data).map_err(lib_err)?;
        unsafe { store(out, CsdMatrix(m)) }
    })
}

/// Parse a matrix in the text format.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csd_matrix_parse(text: *const c_char, out: *mut *mut CsdMatrix) -> CsdStatus {
    guard(|| {
        let s = unsafe { read_str(text, "text") }?;
        let m = parse_matrix(s).map_err(lib_err)?;
        unsafe { store(out, CsdMatrix(m)) }
    })
}

/// Serialize a matrix in the text format. Free the result with [`csd_string_free`].
///
/// # Safety
/// `m` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csd_matrix_to_text(m: *const CsdMatrix, out: *mut *mut c_char) -> CsdStatus {
    guard(|| {
        let m = unsafe { borrow(m, "matrix") }?;
        let s = serialize_matrix(&m.0).map_err(lib_err)?;
        unsafe { store_string(out, s) }
    })
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn csd_matrix_rows(m: *const CsdMatrix) -> usize {
    unsafe { m.as_ref() }.map_or(0, |m| m.0.rows())
}

/// Number of columns, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn csd_matrix_cols(m: *const CsdMatrix) -> usize {
    unsafe { m.as_ref() }.map_or(0, |m| m.0.cols())
}

/// Read entry `(row, col)`.
///
/// # Safety
/// `m` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csd_matrix_get(
    m: *const CsdMatrix,
    row: usize,
    col: usize,
    re: *mut f64,
    im: *mut f64,
) -> CsdStatus {
    guard(|| {
        let m = unsafe { borrow(m, "matrix") }?;
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        if row >= m.0.rows() || col >= m.0.cols() {
            return Err(lib_err(Error::IndexOutOfRange {
                index: if row >= m.0.rows() { row } else { col },
                bound: if row >= m.0.rows() { m.0.rows() } else { m.0.cols() },
            }));
        }
        let z = m.0[(row, col)];
        unsafe {
            *re = z.re;
            *im = z.im;
        }
        Ok(())
    })
}

/// Frobenius distance between two matrices of equal shape.
///
/// # Safety
/// `a` and `b` must be live handles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csd_frobenius_distance(
    a: *const CsdMatrix,
    b: *const CsdMatrix,
    out: *mut f64,
) -> CsdStatus {
    guard(|| {
        let (a, b) = unsafe { (borrow(a, "a")?, borrow(b, "b")?) };
        if out.is_null() {
            return Err(null("out"));
        }
        let d = frobenius_distance(&a.0, &b.0).map_err(lib_err)?;
        unsafe { *out = d };
        Ok(())
    })
}

/// Release a matrix. Null is ignored.
///
/// # Safety
/// `m` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn csd_matrix_free(m: *mut CsdMatrix) {
    if !m.is_null() {
        drop(unsafe { Box::from_raw(m) });
    }
}

/// Compile a unitary matrix. Non-power-of-two dimensions are padded with an
/// identity block. `options` may be null for the defaults.
///
/// # Safety
/// `m` must be a live handle, `options` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn csd_compile(
    m: *const CsdMatrix,
    options: *const CsdCompileOptions,
    out: *mut *mut CsdProgram,
) -> CsdStatus {
    guard(|| {
        let m = unsafe { borrow(m, "matrix") }?;
        let opts = unsafe { options.as_ref() }
            .map_or_else(CompileOptions::default, |o| (*o).into());
        let p = compile(&m.0, &opts).map_err(lib_err)?;
        unsafe { store(out, CsdProgram(p)) }
    })
}

/// Parse SEO text. `nb == 0` infers the bit count from the highest bit used.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csd_program_from_seo(
    text: *const c_char,
    nb: usize,
    out: *mut *mut CsdProgram,
) -> CsdStatus {
    guard(|| {
        let s = unsafe { read_str(text, "text") }?;
        let p = parse(s, (nb > 0).then_some(nb)).map_err(lib_err)?;
        unsafe { store(out, CsdProgram(p)) }
    })
}

/// SEO text of a program. Free the result with [`csd_string_free`].
///
/// # Safety
/// `p` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csd_program_to_seo(p: *const CsdProgram, out: *mut *mut c_char) -> CsdStatus {
    guard(|| {
        let p = unsafe { borrow(p, "program") }?;
        unsafe { store_string(out, serialize(&p.0)) }
    })
}

/// Number of instructions, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn csd_program_len(p: *const CsdProgram) -> usize {
    unsafe { p.as_ref() }.map_or(0, |p| p.0.len())
}

/// Bit count, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn csd_program_nb(p: *const CsdProgram) -> usize {
    unsafe { p.as_ref() }.map_or(0, |p| p.0.nb())
}

/// Matrix realized by a program.
///
/// # Safety
/// `p` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csd_program_to_matrix(p: *const CsdProgram, out: *mut *mut CsdMatrix) -> CsdStatus {
    guard(|| {
        let p = unsafe { borrow(p, "program") }?;
        unsafe { store(out, CsdMatrix(program_to_matrix(&p.0))) }
    })
}

/// Release a program. Null is ignored.
///
/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn csd_program_free(p: *mut CsdProgram) {
    if !p.is_null() {
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn csd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
