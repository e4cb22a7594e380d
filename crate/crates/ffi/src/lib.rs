//! C ABI for `klagg`.
//!
//! Objects cross the boundary as opaque handles that the caller frees with the
//! matching `*_free` function. Every fallible call returns a [`KlaggStatus`];
//! on failure, [`klagg_last_error_message`] describes the most recent error on
//! the calling thread. Panics never unwind into C: they are reported as
//! [`KlaggStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use klagg::{AggregationResult, Distribution, Engine, Error, Mode, Pairing, ThreePartitionInstance};

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlaggStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    TooLarge = 3,
    BufferTooSmall = 4,
    Internal = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlaggMode {
    /// Plain first-fit; may leave bins empty.
    Paper = 0,
    /// First-fit that keeps every bin non-empty.
    Strict = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlaggEngine {
    Naive = 0,
    Tree = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlaggPairing {
    /// Bin masses sorted descending against the head of `p`.
    Sorted = 0,
    /// Bin `i` paired with the `i`-th largest component of `p`.
    BinIndex = 1,
}

/// A validated distribution, stored sorted in non-increasing order.
pub struct KlaggDistribution {
    inner: Distribution,
}

/// The result of an aggregation.
pub struct KlaggAggregation {
    result: AggregationResult,
    /// Block of each component in the caller's original order.
    block_of: Vec<usize>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> KlaggStatus {
    match e {
        Error::TooLarge { .. } => KlaggStatus::TooLarge,
        e if e.is_input_error() => KlaggStatus::InvalidInput,
        _ => KlaggStatus::Internal,
    }
}

fn fail(status: KlaggStatus, msg: impl Into<String>) -> KlaggStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), KlaggStatus>) -> KlaggStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KlaggStatus::Ok,
        Ok(Err(s)) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(KlaggStatus::Panic, msg)
        }
    }
}

fn lift<T>(r: klagg::Result<T>) -> Result<T, KlaggStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn slice<'a, T>(data: *const T, len: usize) -> Result<&'a [T], KlaggStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(fail(KlaggStatus::NullPointer, "null input buffer"));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn handle<'a, T>(h: *const T) -> Result<&'a T, KlaggStatus> {
    h.as_ref().ok_or_else(|| fail(KlaggStatus::NullPointer, "null handle"))
}

unsafe fn write_out<T: Copy>(src: &[T], out: *mut T, cap: usize, written: *mut usize) -> Result<(), KlaggStatus> {
    if !written.is_null() {
        *written = src.len();
    }
    if cap < src.len() {
        return Err(fail(KlaggStatus::BufferTooSmall, format!("buffer holds {cap} entries, {} needed", src.len())));
    }
    if src.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(fail(KlaggStatus::NullPointer, "null output buffer"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}

fn nonnull<T>(out: *mut T) -> Result<(), KlaggStatus> {
    if out.is_null() {
        return Err(fail(KlaggStatus::NullPointer, "null output pointer"));
    }
    Ok(())
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), KlaggStatus> {
    nonnull(out)?;
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message for the last failed call on this thread, or NULL if none.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn klagg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Validates `len` probabilities and stores a new handle in `*out`.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn klagg_distribution_new(
    values: *const f64,
    len: usize,
    out: *mut *mut KlaggDistribution,
) -> KlaggStatus {
    guard(|| {
        nonnull(out)?;
        let v = slice(values, len)?;
        let inner = lift(Distribution::new(v))?;
        store(out, KlaggDistribution { inner })
    })
}

/// # Safety
/// `dist` must be NULL or a handle from this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn klagg_distribution_free(dist: *mut KlaggDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

/// Number of components, or 0 for a NULL handle.
///
/// # Safety
/// `dist` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn klagg_distribution_len(dist: *const KlaggDistribution) -> usize {
    dist.as_ref().map_or(0, |d| d.inner.len())
}

/// Copies the sorted probabilities into `out`.
///
/// `*written` (if not NULL) receives the number of entries required.
///
/// # Safety
/// `dist` must be a live handle and `out` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn klagg_distribution_probs(
    dist: *const KlaggDistribution,
    out: *mut f64,
    cap: usize,
    written: *mut usize,
) -> KlaggStatus {
    guard(|| write_out(handle(dist)?.inner.probs(), out, cap, written))
}

/// Greedy aggregation into `m` blocks.
///
/// # Safety
/// `dist` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn klagg_reduce_greedy(
    dist: *const KlaggDistribution,
    m: usize,
    mode: KlaggMode,
    engine: KlaggEngine,
    out: *mut *mut KlaggAggregation,
) -> KlaggStatus {
    guard(|| {
        nonnull(out)?;
        let d = &handle(dist)?.inner;
        let mode = match mode {
            KlaggMode::Paper => Mode::Paper,
            KlaggMode::Strict => Mode::Strict,
        };
        let engine = match engine {
            KlaggEngine::Naive => Engine::Naive,
            KlaggEngine::Tree => Engine::Tree,
        };
        let result = lift(klagg::greedy_approx(d, m, mode, engine))?;
        store(out, aggregation(d, result))
    })
}

/// Optimal aggregation by exhaustive search.
///
/// Fails with `TOO_LARGE` above 14 components unless `force` is set.
///
/// # Safety
/// `dist` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn klagg_reduce_exact(
    dist: *const KlaggDistribution,
    m: usize,
    force: bool,
    out: *mut *mut KlaggAggregation,
) -> KlaggStatus {
    guard(|| {
        nonnull(out)?;
        let d = &handle(dist)?.inner;
        let result = lift(klagg::exact_search(d, m, force))?.best;
        store(out, aggregation(d, result))
    })
}

fn aggregation(d: &Distribution, result: AggregationResult) -> KlaggAggregation {
    let block_of = d.to_original(result.partition.block_of());
    KlaggAggregation { result, block_of }
}

/// # Safety
/// `agg` must be NULL or a handle from this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn klagg_aggregation_free(agg: *mut KlaggAggregation) {
    if !agg.is_null() {
        drop(Box::from_raw(agg));
    }
}

/// Number of blocks, or 0 for a NULL handle.
///
/// # Safety
/// `agg` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn klagg_aggregation_m(agg: *const KlaggAggregation) -> usize {
    agg.as_ref().map_or(0, |a| a.result.q.len())
}

/// `D(q || p)` in bits under the given pairing, or NaN for a NULL handle.
///
/// # Safety
/// `agg` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn klagg_aggregation_divergence(agg: *const KlaggAggregation, pairing: KlaggPairing) -> f64 {
    let pairing = match pairing {
        KlaggPairing::Sorted => Pairing::SortedCanonical,
        KlaggPairing::BinIndex => Pairing::BinIndex,
    };
    agg.as_ref().map_or(f64::NAN, |a| a.result.bits(pairing))
}

/// Copies the `m` block masses into `out`.
///
/// # Safety
/// `agg` must be a live handle and `out` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn klagg_aggregation_q(
    agg: *const KlaggAggregation,
    out: *mut f64,
    cap: usize,
    written: *mut usize,
) -> KlaggStatus {
    guard(|| write_out(&handle(agg)?.result.q, out, cap, written))
}

/// Copies the block of every component, indexed in the caller's original
/// order, into `out` (`n` entries).
///
/// # Safety
/// `agg` must be a live handle and `out` must hold `cap` entries.
#[no_mangle]
pub unsafe extern "C" fn klagg_aggregation_blocks(
    agg: *const KlaggAggregation,
    out: *mut usize,
    cap: usize,
    written: *mut usize,
) -> KlaggStatus {
    guard(|| write_out(&handle(agg)?.block_of, out, cap, written))
}

/// `-log2` of the mass of the `m` largest components.
///
/// # Safety
/// `dist` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn klagg_lower_bound_bits(
    dist: *const KlaggDistribution,
    m: usize,
    out: *mut f64,
) -> KlaggStatus {
    guard(|| {
        nonnull(out)?;
        let b = lift(klagg::lower_bound(&handle(dist)?.inner, m))?;
        *out = b.value_bits;
        Ok(())
    })
}

/// `D(q || p)` in bits for two vectors of length `len`.
///
/// # Safety
/// `q` and `p` must each point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn klagg_relative_entropy(
    q: *const f64,
    p: *const f64,
    len: usize,
    out: *mut f64,
) -> KlaggStatus {
    guard(|| {
        nonnull(out)?;
        let d = lift(klagg::relative_entropy(slice(q, len)?, slice(p, len)?))?;
        *out = d;
        Ok(())
    })
}

/// Encodes a 3-Partition instance (`3m` positive integers summing to `m *
/// target`) as a distribution.
///
/// # Safety
/// `values` must point to `len` integers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn klagg_encode_3partition(
    values: *const i64,
    len: usize,
    m: usize,
    target: i64,
    out: *mut *mut KlaggDistribution,
) -> KlaggStatus {
    guard(|| {
        nonnull(out)?;
        let inst = lift(ThreePartitionInstance::new(slice(values, len)?, m, target))?;
        let inner = lift(klagg::encode(&inst))?;
        store(out, KlaggDistribution { inner })
    })
}
