//! C ABI over `progcoef`.
//!
//! Every fallible function returns a [`PcStatus`]; on failure a message is
//! available from [`pc_last_error`] on the same thread. Objects are opaque
//! handles created by `*_new`/producer functions and released with the matching
//! `*_free`. Text outputs use the size-query convention: pass a buffer and its
//! capacity, and the required length (excluding the NUL) is always written to
//! `out_len`; if the buffer is too small, `PC_STATUS_BUFFER_TOO_SMALL` is returned.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use progcoef::compress::{Compressor, CompressorSpec};
use progcoef::measure::{self, MeasureParams, Measurement, Normalization};
use progcoef::systems::{
    configuration_at, Boundary, Configuration, EnumerationScheme, Evolution, InitialConfiguration, RuleSystem,
};
use progcoef::taxonomy::{self, Label};
use progcoef::{Error, ErrorCategory};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcStatus {
    Ok = 0,
    InvalidArgument = 1,
    Simulation = 2,
    Compressor = 3,
    Io = 4,
    NullPointer = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcBoundary {
    Cyclic = 0,
    FixedZero = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcScheme {
    Binary = 0,
    Gray = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcNormalization {
    Horizon = 0,
    Runtime = 1,
}

/// Ordered: a larger label is "more of a computer".
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcLabel {
    NonComputer = 0,
    BoundaryComputer = 1,
    Computer = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PcLinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PcCoefficient {
    pub value: f64,
    pub normalized_value: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub t: usize,
    pub n: usize,
}

/// An elementary cellular automaton.
pub struct PcSystem(RuleSystem);

/// A compressor specification.
pub struct PcCompressor(CompressorSpec);

/// A space-time evolution.
pub struct PcEvolution(Evolution);

/// A profile, variability curve and coefficient from one measurement.
pub struct PcMeasurement(Measurement);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', "?");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(e: &Error) -> PcStatus {
    match e.category() {
        ErrorCategory::Argument => PcStatus::InvalidArgument,
        ErrorCategory::Simulation => PcStatus::Simulation,
        ErrorCategory::Compressor => PcStatus::Compressor,
        ErrorCategory::Io => PcStatus::Io,
    }
}

struct Fail(PcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(PcStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `f`, converting errors and panics into a status plus last-error message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            PcStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            PcStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_text(text: &[u8], buf: *mut c_char, cap: usize, out_len: *mut usize) -> Result<(), Fail> {
    *out_ref(out_len, "out_len")? = text.len();
    if buf.is_null() || cap < text.len() + 1 {
        return Err(Fail(
            PcStatus::BufferTooSmall,
            format!("buffer holds {cap} bytes, {} needed", text.len() + 1),
        ));
    }
    ptr::copy_nonoverlapping(text.as_ptr(), buf.cast::<u8>(), text.len());
    *buf.add(text.len()) = 0;
    Ok(())
}

fn boundary(b: PcBoundary) -> Boundary {
    match b {
        PcBoundary::Cyclic => Boundary::Cyclic,
        PcBoundary::FixedZero => Boundary::FixedZero,
    }
}

fn scheme(s: PcScheme) -> EnumerationScheme {
    match s {
        PcScheme::Binary => EnumerationScheme::Binary,
        PcScheme::Gray => EnumerationScheme::Gray,
    }
}

fn normalization(n: PcNormalization) -> Normalization {
    match n {
        PcNormalization::Horizon => Normalization::Horizon,
        PcNormalization::Runtime => Normalization::Runtime,
    }
}

fn label(l: Label) -> PcLabel {
    match l {
        Label::NonComputer => PcLabel::NonComputer,
        Label::BoundaryComputer => PcLabel::BoundaryComputer,
        Label::Computer => PcLabel::Computer,
    }
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn pc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates an elementary cellular automaton (`rule` in 0..=255, `width` ≥ 3).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pc_system_new_eca(
    rule: u32,
    width: usize,
    boundary_kind: PcBoundary,
    out: *mut *mut PcSystem,
) -> PcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let system = RuleSystem::elementary(rule, width, boundary(boundary_kind))?;
        *out = Box::into_raw(Box::new(PcSystem(system)));
        Ok(())
    })
}

/// # Safety
/// `system` must come from `pc_system_new_eca` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pc_system_free(system: *mut PcSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Parses a compressor description: `builtin`, `builtin:dict=12,width=fixed,full=freeze`
/// or `cmd:"<shell command>"`. Null selects the built-in default.
///
/// # Safety
/// `spec` must be null or a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pc_compressor_new(spec: *const c_char, out: *mut *mut PcCompressor) -> PcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let parsed = if spec.is_null() {
            CompressorSpec::default()
        } else {
            let text = CStr::from_ptr(spec)
                .to_str()
                .map_err(|_| Fail(PcStatus::InvalidArgument, "compressor spec is not UTF-8".into()))?;
            text.parse()?
        };
        *out = Box::into_raw(Box::new(PcCompressor(parsed)));
        Ok(())
    })
}

/// # Safety
/// `compressor` must come from `pc_compressor_new` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pc_compressor_free(compressor: *mut PcCompressor) {
    if !compressor.is_null() {
        drop(Box::from_raw(compressor));
    }
}

/// Copies the compressor's version tag into `buf`.
///
/// # Safety
/// `compressor` must be a live handle; `buf` must hold `cap` bytes; `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_compressor_tag(
    compressor: *const PcCompressor,
    buf: *mut c_char,
    cap: usize,
    out_len: *mut usize,
) -> PcStatus {
    guard(|| {
        let c = deref(compressor, "compressor")?;
        write_text(c.0.tag().as_bytes(), buf, cap, out_len)
    })
}

/// Compressed length of `len` bytes at `data` (`len` ≥ 1).
///
/// # Safety
/// `data` must be readable for `len` bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_compress_len(
    compressor: *const PcCompressor,
    data: *const u8,
    len: usize,
    out: *mut usize,
) -> PcStatus {
    guard(|| {
        let c = deref(compressor, "compressor")?;
        let data = slice(data, len, "data")?;
        *out_ref(out, "out")? = progcoef::compress::compress_len(&c.0, data)?.output_len;
        Ok(())
    })
}

/// Evolves the `input_index`-th enumerated configuration for `steps` rows.
///
/// # Safety
/// `system` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_evolve(
    system: *const PcSystem,
    input_index: u64,
    enumeration: PcScheme,
    steps: usize,
    out: *mut *mut PcEvolution,
) -> PcStatus {
    guard(|| {
        let s = &deref(system, "system")?.0;
        let out = out_ref(out, "out")?;
        let cells = configuration_at(s.width(), input_index, scheme(enumeration))?;
        let ev = s.evolve(&InitialConfiguration::new(cells, input_index), steps)?;
        *out = Box::into_raw(Box::new(PcEvolution(ev)));
        Ok(())
    })
}

/// Evolves a single live cell at `width / 2` for `steps` rows.
///
/// # Safety
/// `system` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_evolve_single_seed(
    system: *const PcSystem,
    steps: usize,
    out: *mut *mut PcEvolution,
) -> PcStatus {
    guard(|| {
        let s = &deref(system, "system")?.0;
        let out = out_ref(out, "out")?;
        let init = InitialConfiguration::new(Configuration::single_seed(s.width()), 0);
        *out = Box::into_raw(Box::new(PcEvolution(s.evolve(&init, steps)?)));
        Ok(())
    })
}

/// # Safety
/// `evolution` must come from a `pc_evolve*` call and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pc_evolution_free(evolution: *mut PcEvolution) {
    if !evolution.is_null() {
        drop(Box::from_raw(evolution));
    }
}

/// Rows in the evolution; 0 for a null handle.
///
/// # Safety
/// `evolution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_evolution_steps(evolution: *const PcEvolution) -> usize {
    evolution.as_ref().map_or(0, |e| e.0.steps())
}

/// Writes the evolution as `0`/`1` rows, each ending in `\n`.
///
/// # Safety
/// `evolution` must be a live handle; `buf` must hold `cap` bytes; `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_evolution_text(
    evolution: *const PcEvolution,
    buf: *mut c_char,
    cap: usize,
    out_len: *mut usize,
) -> PcStatus {
    guard(|| {
        let ev = deref(evolution, "evolution")?;
        write_text(&ev.0.to_text(), buf, cap, out_len)
    })
}

/// Compressed length of the evolution's text serialisation.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_evolution_compressed_len(
    evolution: *const PcEvolution,
    compressor: *const PcCompressor,
    out: *mut usize,
) -> PcStatus {
    guard(|| {
        let ev = deref(evolution, "evolution")?;
        let c = deref(compressor, "compressor")?;
        *out_ref(out, "out")? = progcoef::compress::approx_k(&c.0, &ev.0)?.output_len;
        Ok(())
    })
}

/// Measures the coefficient over `n` enumerated inputs and strictly increasing `runtimes`.
///
/// # Safety
/// Handles must be live; `runtimes` must be readable for `runtimes_len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_measure(
    system: *const PcSystem,
    compressor: *const PcCompressor,
    n: usize,
    runtimes: *const usize,
    runtimes_len: usize,
    enumeration: PcScheme,
    norm: PcNormalization,
    out: *mut *mut PcMeasurement,
) -> PcStatus {
    guard(|| {
        let s = &deref(system, "system")?.0;
        let c = &deref(compressor, "compressor")?.0;
        let runtimes = slice(runtimes, runtimes_len, "runtimes")?.to_vec();
        let out = out_ref(out, "out")?;
        let params = MeasureParams::new(n, runtimes)?
            .with_scheme(scheme(enumeration))
            .with_normalization(normalization(norm));
        *out = Box::into_raw(Box::new(PcMeasurement(measure::measure(s, &params, c)?)));
        Ok(())
    })
}

/// # Safety
/// `measurement` must come from `pc_measure` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pc_measurement_free(measurement: *mut PcMeasurement) {
    if !measurement.is_null() {
        drop(Box::from_raw(measurement));
    }
}

/// # Safety
/// `measurement` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_measurement_coefficient(
    measurement: *const PcMeasurement,
    out: *mut PcCoefficient,
) -> PcStatus {
    guard(|| {
        let c = &deref(measurement, "measurement")?.0.coefficient;
        *out_ref(out, "out")? = PcCoefficient {
            value: c.value,
            normalized_value: c.normalized_value,
            intercept: c.intercept,
            r_squared: c.r_squared,
            t: c.t,
            n: c.n,
        };
        Ok(())
    })
}

/// Copies the variability curve into `runtimes_out`/`f_out` (each with room for `cap`
/// entries). The number of points is always written to `out_len`.
///
/// # Safety
/// `measurement` must be a live handle; both arrays must hold `cap` entries; `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_measurement_curve(
    measurement: *const PcMeasurement,
    runtimes_out: *mut usize,
    f_out: *mut f64,
    cap: usize,
    out_len: *mut usize,
) -> PcStatus {
    guard(|| {
        let points = &deref(measurement, "measurement")?.0.curve.points;
        *out_ref(out_len, "out_len")? = points.len();
        if cap < points.len() || runtimes_out.is_null() || f_out.is_null() {
            return Err(Fail(
                PcStatus::BufferTooSmall,
                format!("curve has {} points, room for {cap}", points.len()),
            ));
        }
        for (i, &(t, f)) in points.iter().enumerate() {
            *runtimes_out.add(i) = t;
            *f_out.add(i) = f;
        }
        Ok(())
    })
}

/// `Σ |l[j+1] − l[j]| / (t · (n − 1))` over `n` ≥ 2 compressed lengths.
///
/// # Safety
/// `lengths` must be readable for `n` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_variability(
    lengths: *const usize,
    n: usize,
    t: usize,
    out: *mut f64,
) -> PcStatus {
    guard(|| {
        let lengths = slice(lengths, n, "lengths")?;
        *out_ref(out, "out")? = measure::variability_of(lengths, t)?;
        Ok(())
    })
}

/// Ordinary least squares over `len` ≥ 2 points with at least two distinct `xs`.
///
/// # Safety
/// `xs` and `ys` must be readable for `len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_fit_slope(
    xs: *const f64,
    ys: *const f64,
    len: usize,
    out: *mut PcLinearFit,
) -> PcStatus {
    guard(|| {
        let xs = slice(xs, len, "xs")?;
        let ys = slice(ys, len, "ys")?;
        let points: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
        let fit = measure::fit_slope(&points)?;
        *out_ref(out, "out")? = PcLinearFit {
            slope: fit.slope,
            intercept: fit.intercept,
            r_squared: fit.r_squared,
        };
        Ok(())
    })
}

/// Labels `value` against threshold `delta` (≥ 0) with a boundary band (≥ 0).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_classify(value: f64, delta: f64, band: f64, out: *mut PcLabel) -> PcStatus {
    guard(|| {
        *out_ref(out, "out")? = label(taxonomy::label_for(value, delta, band)?);
        Ok(())
    })
}
