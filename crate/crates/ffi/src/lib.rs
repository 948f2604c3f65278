//! C ABI over the `sl2lab` kernels.
//!
//! Every function returns an [`Sl2Status`]; results travel through out
//! pointers. On failure the message is available from [`sl2_last_error`]
//! until the next failing call on the same thread. Objects are opaque
//! handles released by their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use sl2lab::error::Error;
use sl2lab::origami::{self, Origami, SaddleConnection};
use sl2lab::sl2::GroupElement;
use sl2lab::specfit;
use sl2lab::spherical::{self, SphericalParam};
use sl2lab::transforms::{ExtendedTransform, SpectralAtoms};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sl2Status {
    Ok = 0,
    InvalidInput = 1,
    Domain = 2,
    Pole = 3,
    Numerical = 4,
    Resource = 5,
    NullPointer = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

enum Fail {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> Sl2Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => Sl2Status::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            Sl2Status::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            let status = match e {
                Error::InvalidInput(_) => Sl2Status::InvalidInput,
                Error::Domain(_) => Sl2Status::Domain,
                Error::Pole { .. } => Sl2Status::Pole,
                Error::Numerical { .. } => Sl2Status::Numerical,
                Error::Resource { .. } => Sl2Status::Resource,
            };
            set_last_error(e.to_string());
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            Sl2Status::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn slice<'a, T>(p: *const T, n: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

/// Message of the last failing call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sl2_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sl2_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string obtained from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn sl2_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Harish-Chandra c-function `c(s)`.
///
/// # Safety
/// `re` and `im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl2_c_function(s_re: f64, s_im: f64, re: *mut f64, im: *mut f64) -> Sl2Status {
    guard(|| {
        let (re, im) = (out(re, "re")?, out(im, "im")?);
        let c = spherical::c_function(Complex64::new(s_re, s_im))?;
        (*re, *im) = (c.re, c.im);
        Ok(())
    })
}

/// Spherical function `φ_s(g_t)` to relative tolerance `tol`.
///
/// # Safety
/// `re` and `im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl2_phi(s_re: f64, s_im: f64, t: f64, tol: f64, re: *mut f64, im: *mut f64) -> Sl2Status {
    guard(|| {
        let (re, im) = (out(re, "re")?, out(im, "im")?);
        let p = SphericalParam::from_complex(Complex64::new(s_re, s_im))?;
        let v = spherical::phi(&p, t, tol)?;
        (*re, *im) = (v.re, v.im);
        Ok(())
    })
}

/// # Safety
/// `rate` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl2_eigenvalue_to_rate(lambda: f64, rate: *mut f64) -> Sl2Status {
    guard(|| {
        *out(rate, "rate")? = specfit::eigenvalue_to_rate(lambda)?;
        Ok(())
    })
}

/// # Safety
/// `lambda` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl2_rate_to_eigenvalue(rate: f64, lambda: *mut f64) -> Sl2Status {
    guard(|| {
        *out(lambda, "lambda")? = specfit::rate_to_eigenvalue(rate)?;
        Ok(())
    })
}

/// Fits `k` exponentials to the samples with `t_min ≤ t ≤ t_max`. `rates`
/// and `coeffs` receive `k` values each, sorted by increasing rate.
///
/// # Safety
/// `t` and `y` must hold `n` values; `rates` and `coeffs` must have room
/// for `k`; `residual` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl2_fit_exponential_sum(
    t: *const f64,
    y: *const f64,
    n: usize,
    k: usize,
    t_min: f64,
    t_max: f64,
    rates: *mut f64,
    coeffs: *mut f64,
    residual: *mut f64,
) -> Sl2Status {
    guard(|| {
        let (t, y) = (slice(t, n, "t")?, slice(y, n, "y")?);
        if rates.is_null() || coeffs.is_null() {
            return Err(Fail::Null("rates/coeffs"));
        }
        let residual = out(residual, "residual")?;
        let fit = specfit::fit_window(t, y, k, t_min, t_max)?;
        for (i, (a, c)) in fit.pairs.iter().enumerate() {
            *rates.add(i) = *a;
            *coeffs.add(i) = *c;
        }
        *residual = fit.residual;
        Ok(())
    })
}

/// Opaque square-tiled surface.
pub struct Sl2Origami(Origami);

/// Parses a record `n; sigma_h cycles; sigma_v cycles[; deformation a b c d]`.
///
/// # Safety
/// `record` must be a NUL-terminated string; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl2_origami_parse(record: *const c_char, result: *mut *mut Sl2Origami) -> Sl2Status {
    guard(|| {
        let result = out(result, "result")?;
        if record.is_null() {
            return Err(Fail::Null("record"));
        }
        let text = CStr::from_ptr(record).to_str().map_err(|_| Error::InvalidInput("record is not UTF-8".into()))?;
        let o: Origami = text.parse()?;
        *result = Box::into_raw(Box::new(Sl2Origami(o)));
        Ok(())
    })
}

/// # Safety
/// `o` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn sl2_origami_free(o: *mut Sl2Origami) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

/// Record string of the surface; release with [`sl2_string_free`].
///
/// # Safety
/// `o` must be a live handle; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl2_origami_record(o: *const Sl2Origami, result: *mut *mut c_char) -> Sl2Status {
    guard(|| {
        let (o, result) = (get(o, "origami")?, out(result, "result")?);
        *result = CString::new(o.0.to_record()).unwrap_or_default().into_raw();
        Ok(())
    })
}

/// # Safety
/// `o` must be a live handle; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl2_origami_n_squares(o: *const Sl2Origami, result: *mut usize) -> Sl2Status {
    guard(|| {
        *out(result, "result")? = get(o, "origami")?.0.n_squares();
        Ok(())
    })
}

/// # Safety
/// `o` must be a live handle; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl2_origami_genus(o: *const Sl2Origami, result: *mut usize) -> Sl2Status {
    guard(|| {
        *out(result, "result")? = get(o, "origami")?.0.genus();
        Ok(())
    })
}

/// Length of the shortest saddle connection.
///
/// # Safety
/// `o` must be a live handle; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl2_origami_systole(o: *const Sl2Origami, result: *mut f64) -> Sl2Status {
    guard(|| {
        let (o, result) = (get(o, "origami")?, out(result, "result")?);
        *result = origami::systole(&o.0)?;
        Ok(())
    })
}

/// Recurrence observable `V_δ`.
///
/// # Safety
/// `o` must be a live handle; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl2_origami_v_delta(o: *const Sl2Origami, delta: f64, result: *mut f64) -> Sl2Status {
    guard(|| {
        let (o, result) = (get(o, "origami")?, out(result, "result")?);
        *result = origami::v_delta(&o.0, delta)?;
        Ok(())
    })
}

/// New surface `[[a, b], [c, d]] · o`; the matrix must have positive determinant.
///
/// # Safety
/// `o` must be a live handle; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl2_origami_apply(
    o: *const Sl2Origami,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    result: *mut *mut Sl2Origami,
) -> Sl2Status {
    guard(|| {
        let (o, result) = (get(o, "origami")?, out(result, "result")?);
        let m = GroupElement::gl_plus(a, b, c, d)?;
        *result = Box::into_raw(Box::new(Sl2Origami(o.0.apply_element(&m)?)));
        Ok(())
    })
}

/// One saddle connection, with 0-based class and square indices.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sl2Saddle {
    pub start_class: usize,
    pub end_class: usize,
    pub start_square: usize,
    pub holonomy_x: i64,
    pub holonomy_y: i64,
    pub length: f64,
}

/// Opaque list of saddle connections.
pub struct Sl2Saddles(Vec<SaddleConnection>);

/// Saddle connections of length at most `bound`, sorted by length.
/// A `budget` of 0 means unlimited.
///
/// # Safety
/// `o` must be a live handle; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl2_origami_saddles(
    o: *const Sl2Origami,
    bound: f64,
    budget: u64,
    result: *mut *mut Sl2Saddles,
) -> Sl2Status {
    guard(|| {
        let (o, result) = (get(o, "origami")?, out(result, "result")?);
        let list = if budget == 0 {
            origami::saddle_connections(&o.0, bound)?
        } else {
            origami::saddle_connections_with_budget(&o.0, bound, budget)?
        };
        *result = Box::into_raw(Box::new(Sl2Saddles(list)));
        Ok(())
    })
}

/// # Safety
/// `list` must be a live handle; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl2_saddles_len(list: *const Sl2Saddles, result: *mut usize) -> Sl2Status {
    guard(|| {
        *out(result, "result")? = get(list, "saddles")?.0.len();
        Ok(())
    })
}

/// # Safety
/// `list` must be a live handle; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl2_saddles_get(list: *const Sl2Saddles, index: usize, result: *mut Sl2Saddle) -> Sl2Status {
    guard(|| {
        let (list, result) = (get(list, "saddles")?, out(result, "result")?);
        let s = list.0.get(index).ok_or_else(|| {
            Error::InvalidInput(format!("index {index} out of range for {} connections", list.0.len()))
        })?;
        *result = Sl2Saddle {
            start_class: s.start_class,
            end_class: s.end_class,
            start_square: s.start_square,
            holonomy_x: s.holonomy.0,
            holonomy_y: s.holonomy.1,
            length: s.length,
        };
        Ok(())
    })
}

/// # Safety
/// `list` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn sl2_saddles_free(list: *mut Sl2Saddles) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}

/// Opaque extended Laplace transform of a finite atomic spectrum.
pub struct Sl2Transform(ExtendedTransform);

/// Builds the transform for atoms at `s[i]` (strictly increasing, in
/// `(0, 1]`) with weights `w[i]`, split at `delta`.
///
/// # Safety
/// `s` and `w` must hold `n` values; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl2_transform_new(
    s: *const f64,
    w: *const f64,
    n: usize,
    delta: f64,
    result: *mut *mut Sl2Transform,
) -> Sl2Status {
    guard(|| {
        let (s, w) = (slice(s, n, "s")?, slice(w, n, "w")?);
        let result = out(result, "result")?;
        let atoms = SpectralAtoms::new(s.iter().copied().zip(w.iter().copied()).collect())?;
        *result = Box::into_raw(Box::new(Sl2Transform(ExtendedTransform::new(atoms, delta)?)));
        Ok(())
    })
}

/// # Safety
/// `f` must be a live handle; `re` and `im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl2_transform_eval(
    f: *const Sl2Transform,
    z_re: f64,
    z_im: f64,
    re: *mut f64,
    im: *mut f64,
) -> Sl2Status {
    guard(|| {
        let f = get(f, "transform")?;
        let (re, im) = (out(re, "re")?, out(im, "im")?);
        let v = f.0.eval(Complex64::new(z_re, z_im))?;
        (*re, *im) = (v.re, v.im);
        Ok(())
    })
}

/// # Safety
/// `f` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn sl2_transform_free(f: *mut Sl2Transform) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}
