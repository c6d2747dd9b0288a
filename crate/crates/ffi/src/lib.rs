//! C ABI for the `kakeya-lab` numerical core.
//!
//! Every fallible function returns a [`KlStatus`]; outputs go through
//! caller-provided pointers and are written only on success. The message
//! for the most recent failure on the calling thread is available from
//! [`kl_last_error_message`].
//!
//! Orientation measures and measure specs are opaque handles. Each
//! constructor hands out a pointer that must be released with the matching
//! `*_free` function. Handles are immutable and may be shared across threads.
//!
//! Subspaces are passed as `k` raw spanning vectors of length `d`, row-major
//! (`k * d` doubles); they are orthonormalized on entry.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use kakeya_lab::grassmannian::{self, Frame};
use kakeya_lab::orientation::{self, DiscreteOrientationMeasure, KakeyaMeasureSpec, TranslationStrategy};
use kakeya_lab::{bump::BumpProfile, kakeya_measure, scaling, Error};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlStatus {
    Ok = 0,
    RankDeficient = 1,
    DimensionMismatch = 2,
    BadDimensions = 3,
    DegenerateSphere = 4,
    LengthMismatch = 5,
    ZeroFrequency = 6,
    GridBelowResolution = 7,
    InsufficientGrid = 8,
    BadParameters = 9,
    /// A required pointer argument was null.
    NullPointer = 10,
    /// The library panicked; this is a bug.
    Panic = 11,
}

impl From<&Error> for KlStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::RankDeficient { .. } => KlStatus::RankDeficient,
            Error::DimensionMismatch { .. } => KlStatus::DimensionMismatch,
            Error::BadDimensions(_) => KlStatus::BadDimensions,
            Error::DegenerateSphere { .. } => KlStatus::DegenerateSphere,
            Error::LengthMismatch { .. } => KlStatus::LengthMismatch,
            Error::ZeroFrequency => KlStatus::ZeroFrequency,
            Error::GridBelowResolution { .. } => KlStatus::GridBelowResolution,
            Error::InsufficientGrid(_) => KlStatus::InsufficientGrid,
            Error::BadParameters(_) => KlStatus::BadParameters,
        }
    }
}

/// Translation choice for [`kl_spec_new`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlTranslation {
    Zero = 0,
    /// Independent uniform points of `[0, side]^d`.
    RandomBox = 1,
}

/// The two terms of the slab/tail split of the decay bound.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KlSplitBound {
    pub eta: f64,
    pub n: f64,
    pub slab_term: f64,
    pub tail_term: f64,
    pub total: f64,
}

/// Opaque probability measure on finitely many `k`-planes.
pub struct KlMeasure(Arc<DiscreteOrientationMeasure>);

/// Opaque orientation measure with translations and the standard bump.
pub struct KlSpec(KakeyaMeasureSpec);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(KlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(KlStatus::from(&e), e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Outcome) -> KlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            KlStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("internal panic: {what}"));
            KlStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(KlStatus::NullPointer, format!("{name} is null"))
}

/// # Safety
/// `p` must be null or point to `len` readable doubles.
unsafe fn doubles<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// # Safety
/// `p` must be null or valid for writing one `T`.
unsafe fn put<T>(p: *mut T, value: T, name: &str) -> Outcome {
    if p.is_null() {
        return Err(null(name));
    }
    p.write(value);
    Ok(())
}

/// # Safety
/// `p` must be null or a live handle from this library.
unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

/// # Safety
/// `basis` must point to `k * d` readable doubles.
unsafe fn frame(basis: *const f64, d: usize, k: usize, name: &str) -> Result<Frame, Failure> {
    let raw = doubles(basis, k.saturating_mul(d), name)?;
    let vectors: Vec<Vec<f64>> = raw.chunks_exact(d.max(1)).map(<[f64]>::to_vec).collect();
    Ok(grassmannian::orthonormalize(&vectors)?)
}

fn check_len(expected: usize, found: usize) -> Outcome {
    if expected != found {
        return Err(Error::DimensionMismatch {
            expected: format!("vector of length {expected}"),
            found: found.to_string(),
        }
        .into());
    }
    Ok(())
}

/// Message describing the most recent failure on this thread, or an empty
/// string after a successful call. Valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn kl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Distance between the spans of two sets of `k` vectors in `R^d`.
///
/// # Safety
/// `s` and `t` must each point to `k * d` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_metric(d: usize, k: usize, s: *const f64, t: *const f64, out: *mut f64) -> KlStatus {
    guard(|| {
        let s = frame(s, d, k, "s")?;
        let t = frame(t, d, k, "t")?;
        put(out, grassmannian::metric(&s, &t)?.value(), "out")
    })
}

/// Fourier transform of the normalized bump at `u`.
///
/// # Safety
/// `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_phi_hat(u: f64, re: *mut f64, im: *mut f64) -> KlStatus {
    guard(|| {
        if !u.is_finite() {
            return Err(Error::BadParameters(format!("u must be finite, got {u}")).into());
        }
        let z = BumpProfile::standard().phi_hat(u);
        put(re, z.re, "re")?;
        put(im, z.im, "im")
    })
}

fn publish_measure(m: DiscreteOrientationMeasure, out: *mut *mut KlMeasure) -> Outcome {
    // SAFETY: callers pass the user's out pointer, checked for null here.
    unsafe { put(out, Box::into_raw(Box::new(KlMeasure(Arc::new(m)))), "out") }
}

/// Invariant measure on `G(d,k)` discretized by a `1/n`-net.
///
/// # Safety
/// `out` must be writable; on success it receives a handle for [`kl_measure_free`].
#[no_mangle]
pub unsafe extern "C" fn kl_measure_uniform(
    d: usize,
    k: usize,
    n: usize,
    budget: usize,
    seed: u64,
    out: *mut *mut KlMeasure,
) -> KlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        publish_measure(orientation::uniform_grassmannian_measure(d, k, n, budget, seed)?, out)
    })
}

/// `m` lines whose directions make angle `polar_angle` with `axis`.
///
/// # Safety
/// `axis` must point to `d` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_measure_sphere(
    d: usize,
    axis: *const f64,
    polar_angle: f64,
    m: usize,
    seed: u64,
    out: *mut *mut KlMeasure,
) -> KlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let axis = doubles(axis, d, "axis")?;
        publish_measure(orientation::nondegenerate_sphere_measure(d, axis, polar_angle, m, seed)?, out)
    })
}

/// Invariant measure on the `k`-planes inside the hyperplane spanned by the
/// `d - 1` vectors of `v`.
///
/// # Safety
/// `v` must point to `(d - 1) * d` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_measure_hyperplane(
    d: usize,
    k: usize,
    v: *const f64,
    n: usize,
    budget: usize,
    seed: u64,
    out: *mut *mut KlMeasure,
) -> KlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let v = frame(v, d, d.saturating_sub(1), "v")?;
        publish_measure(orientation::hyperplane_family_measure(d, k, &v, n, budget, seed)?, out)
    })
}

/// Number of atoms, or 0 for a null handle.
///
/// # Safety
/// `measure` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kl_measure_len(measure: *const KlMeasure) -> usize {
    measure.as_ref().map_or(0, |m| m.0.len())
}

/// Ambient dimension `d`, or 0 for a null handle.
///
/// # Safety
/// `measure` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kl_measure_ambient_dim(measure: *const KlMeasure) -> usize {
    measure.as_ref().map_or(0, |m| m.0.ambient_dim())
}

/// Releases a measure handle. Null is ignored. Specs built from the
/// measure stay valid.
///
/// # Safety
/// `measure` must be null or a live handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn kl_measure_free(measure: *mut KlMeasure) {
    if !measure.is_null() {
        drop(Box::from_raw(measure));
    }
}

/// Mass of the atoms inside the slab of frequency `xi` and width `eta`.
///
/// # Safety
/// `xi` must point to `xi_len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_slab_mass(
    measure: *const KlMeasure,
    xi: *const f64,
    xi_len: usize,
    eta: f64,
    out: *mut f64,
) -> KlStatus {
    guard(|| {
        let m = handle(measure, "measure")?;
        let xi = doubles(xi, xi_len, "xi")?;
        put(out, scaling::slab_mass(&m.0, xi, eta)?, "out")
    })
}

/// Largest slab mass found by a search over `search_budget` directions.
/// `direction` may be null; otherwise it receives the `d` coordinates of
/// the worst direction.
///
/// # Safety
/// `mass` must be writable; `direction` must be null or hold `d` doubles.
#[no_mangle]
pub unsafe extern "C" fn kl_worst_case_slab_mass(
    measure: *const KlMeasure,
    eta: f64,
    search_budget: usize,
    seed: u64,
    mass: *mut f64,
    direction: *mut f64,
) -> KlStatus {
    guard(|| {
        let m = handle(measure, "measure")?;
        if mass.is_null() {
            return Err(null("mass"));
        }
        let worst = scaling::worst_case_slab_mass(&m.0, eta, search_budget, seed)?;
        if !direction.is_null() {
            ptr::copy_nonoverlapping(worst.direction.as_ptr(), direction, worst.direction.len());
        }
        put(mass, worst.mass, "mass")
    })
}

/// Fitted scaling exponent over a decreasing `eta` grid. `sup_masses` may
/// be null; otherwise it receives one mass per grid point.
///
/// # Safety
/// `eta` must hold `eta_len` doubles; `beta_hat` and `r_squared` must be
/// writable; `sup_masses` must be null or hold `eta_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn kl_fit_beta(
    measure: *const KlMeasure,
    eta: *const f64,
    eta_len: usize,
    search_budget: usize,
    seed: u64,
    beta_hat: *mut f64,
    r_squared: *mut f64,
    sup_masses: *mut f64,
) -> KlStatus {
    guard(|| {
        let m = handle(measure, "measure")?;
        let grid = doubles(eta, eta_len, "eta")?;
        if beta_hat.is_null() || r_squared.is_null() {
            return Err(null("beta_hat or r_squared"));
        }
        let report = scaling::fit_beta(&m.0, grid, search_budget, seed, None)?;
        if !sup_masses.is_null() {
            ptr::copy_nonoverlapping(report.sup_masses.as_ptr(), sup_masses, report.sup_masses.len());
        }
        put(beta_hat, report.beta_hat, "beta_hat")?;
        put(r_squared, report.r_squared, "r_squared")
    })
}

fn publish_spec(spec: KakeyaMeasureSpec, out: *mut *mut KlSpec) -> Outcome {
    // SAFETY: callers pass the user's out pointer, checked for null here.
    unsafe { put(out, Box::into_raw(Box::new(KlSpec(spec))), "out") }
}

/// Attaches generated translations to a measure. `side` is used only by
/// [`KlTranslation::RandomBox`].
///
/// # Safety
/// `measure` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_spec_new(
    measure: *const KlMeasure,
    strategy: KlTranslation,
    side: f64,
    seed: u64,
    out: *mut *mut KlSpec,
) -> KlStatus {
    guard(|| {
        let m = handle(measure, "measure")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let strategy = match strategy {
            KlTranslation::Zero => TranslationStrategy::Zero,
            KlTranslation::RandomBox => TranslationStrategy::RandomBox { side },
        };
        publish_spec(orientation::assign_translations_shared(m.0.clone(), &strategy, seed)?, out)
    })
}

/// Attaches explicit translations, one `d`-vector per atom in atom order.
///
/// # Safety
/// `translations` must hold `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_spec_with_translations(
    measure: *const KlMeasure,
    translations: *const f64,
    len: usize,
    out: *mut *mut KlSpec,
) -> KlStatus {
    guard(|| {
        let m = handle(measure, "measure")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let d = m.0.ambient_dim();
        let flat = doubles(translations, len, "translations")?;
        if len != d * m.0.len() {
            return Err(Error::LengthMismatch {
                expected: d * m.0.len(),
                found: len,
            }
            .into());
        }
        let fixed = TranslationStrategy::Fixed(flat.chunks_exact(d).map(<[f64]>::to_vec).collect());
        publish_spec(orientation::assign_translations_shared(m.0.clone(), &fixed, 0)?, out)
    })
}

/// Zero-translation measure on the cone of lines at angle π/4 to `e_d`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_spec_cone(d: usize, m: usize, seed: u64, out: *mut *mut KlSpec) -> KlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        publish_spec(kakeya_measure::cone_measure_spec(d, m, seed)?, out)
    })
}

/// Releases a spec handle. Null is ignored.
///
/// # Safety
/// `spec` must be null or a live handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn kl_spec_free(spec: *mut KlSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Fourier transform of the measure at `xi`.
///
/// # Safety
/// `xi` must hold `xi_len` doubles; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_mu_hat(
    spec: *const KlSpec,
    xi: *const f64,
    xi_len: usize,
    re: *mut f64,
    im: *mut f64,
) -> KlStatus {
    guard(|| {
        let s = handle(spec, "spec")?;
        let xi = doubles(xi, xi_len, "xi")?;
        check_len(s.0.ambient_dim(), xi.len())?;
        let z = kakeya_measure::mu_hat(&s.0, xi);
        put(re, z.re, "re")?;
        put(im, z.im, "im")
    })
}

/// Translation-free upper bound for `|μ̂(xi)|`.
///
/// # Safety
/// `xi` must hold `xi_len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_mu_hat_envelope(
    spec: *const KlSpec,
    xi: *const f64,
    xi_len: usize,
    out: *mut f64,
) -> KlStatus {
    guard(|| {
        let s = handle(spec, "spec")?;
        let xi = doubles(xi, xi_len, "xi")?;
        check_len(s.0.ambient_dim(), xi.len())?;
        put(out, kakeya_measure::mu_hat_envelope(&s.0, xi), "out")
    })
}

/// Slab and tail terms of the decay bound at `|ξ| = xi_norm`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_split_bound(beta: f64, alpha: f64, xi_norm: f64, out: *mut KlSplitBound) -> KlStatus {
    guard(|| {
        let b = kakeya_measure::split_bound(beta, alpha, xi_norm)?;
        put(
            out,
            KlSplitBound {
                eta: b.eta,
                n: b.n,
                slab_term: b.slab_term,
                tail_term: b.tail_term,
                total: b.total,
            },
            "out",
        )
    })
}
