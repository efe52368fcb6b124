//! C ABI for hypersketch.
//!
//! Objects cross the boundary as opaque handles created by `hs_*_new` /
//! `hs_*_parse` style constructors and released with the matching `*_free`.
//! Every fallible call returns an [`HsStatus`]; on failure a message is
//! available from [`hs_last_error_message`] on the same thread. Panics are
//! caught and reported as [`HsStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::c_char;

use hypersketch::contract::q_bound;
use hypersketch::maxcutlab::{build_gadget, exact_max_cut, gadget_expected_value, gen_bhh};
use hypersketch::mincut::{min_cut, strong_connectivities};
use hypersketch::rng::stream_rng;
use hypersketch::satsketch::{estimate_value, parse_dimacs, sketch_formula, SatSketch};
use hypersketch::sparsify::{sparsify, verify_sparsifier, SparsifyParams};
use hypersketch::{cut_weight, hypercore, Cut, Error, Hypergraph};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsStatus {
    Ok = 0,
    InvalidArgument = 1,
    Parse = 2,
    ResourceLimit = 3,
    Io = 4,
    NullPointer = 5,
    Panic = 6,
}

/// Opaque hypergraph handle.
pub struct HsHypergraph {
    inner: Hypergraph,
}

/// Opaque SAT sketch handle.
pub struct HsSatSketch {
    inner: SatSketch,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> HsStatus {
    match err {
        Error::InvalidArgument(_) | Error::Stream { .. } => HsStatus::InvalidArgument,
        Error::Parse { .. } | Error::Json(_) => HsStatus::Parse,
        Error::ResourceLimit(_) => HsStatus::ResourceLimit,
        Error::Io(_) => HsStatus::Io,
    }
}

struct NullArg;

enum Failure {
    Null,
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<NullArg> for Failure {
    fn from(_: NullArg) -> Self {
        Failure::Null
    }
}

fn guard<F>(f: F) -> HsStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HsStatus::Ok,
        Ok(Err(Failure::Null)) => {
            set_error("null pointer argument");
            HsStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            HsStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T) -> Result<&'a T, NullArg> {
    p.as_ref().ok_or(NullArg)
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, NullArg> {
    p.as_mut().ok_or(NullArg)
}

unsafe fn slice<'a, T>(p: *const T, len: usize) -> Result<&'a [T], NullArg> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(NullArg);
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize) -> Result<&'a mut [T], NullArg> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(NullArg);
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null);
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Lib(Error::InvalidArgument("text is not valid UTF-8".into())))
}

fn check_len(got: usize, want: usize, what: &str) -> Result<(), Failure> {
    if got != want {
        return Err(Failure::Lib(Error::InvalidArgument(format!(
            "{what} has length {got}, expected {want}"
        ))));
    }
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates an edgeless hypergraph on `n` vertices.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn hs_hypergraph_new(n: usize, out_handle: *mut *mut HsHypergraph) -> HsStatus {
    guard(|| {
        let slot = out(out_handle)?;
        *slot = Box::into_raw(Box::new(HsHypergraph {
            inner: Hypergraph::empty(n),
        }));
        Ok(())
    })
}

/// Parses the `n m` / `w k v1 .. vk` text format.
///
/// # Safety
/// `text` must be a nul-terminated string; `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hs_hypergraph_parse(text_ptr: *const c_char, out_handle: *mut *mut HsHypergraph) -> HsStatus {
    guard(|| {
        let slot = out(out_handle)?;
        let h = hypercore::parse_hypergraph(text(text_ptr)?)?;
        *slot = Box::into_raw(Box::new(HsHypergraph { inner: h }));
        Ok(())
    })
}

/// # Safety
/// `h` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn hs_hypergraph_free(h: *mut HsHypergraph) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Appends an edge. Endpoints are deduplicated; the weight must be positive.
///
/// # Safety
/// `h` must be a live handle and `endpoints` must point to `len` values.
#[no_mangle]
pub unsafe extern "C" fn hs_hypergraph_add_edge(
    h: *mut HsHypergraph,
    endpoints: *const usize,
    len: usize,
    weight: f64,
) -> HsStatus {
    guard(|| {
        let h = out(h)?;
        let ends = slice(endpoints, len)?.to_vec();
        h.inner.add_edge(ends, weight)?;
        Ok(())
    })
}

/// Vertex count, or 0 for NULL.
///
/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hs_hypergraph_vertex_count(h: *const HsHypergraph) -> usize {
    h.as_ref().map_or(0, |h| h.inner.n())
}

/// Edge count, or 0 for NULL.
///
/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hs_hypergraph_edge_count(h: *const HsHypergraph) -> usize {
    h.as_ref().map_or(0, |h| h.inner.edge_count())
}

/// Serializes to the text format. Free the result with [`hs_string_free`].
///
/// # Safety
/// `h` must be a live handle and `out_text` writable.
#[no_mangle]
pub unsafe extern "C" fn hs_hypergraph_serialize(h: *const HsHypergraph, out_text: *mut *mut c_char) -> HsStatus {
    guard(|| {
        let h = as_ref(h)?;
        let slot = out(out_text)?;
        let s = CString::new(hypercore::serialize_hypergraph(&h.inner)).expect("no interior nul");
        *slot = s.into_raw();
        Ok(())
    })
}

/// Weight of the cut whose true side holds the vertices with nonzero
/// `side[v]`; `len` must equal the vertex count.
///
/// # Safety
/// `h` must be a live handle, `side` must point to `len` bytes and
/// `out_weight` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hs_cut_weight(
    h: *const HsHypergraph,
    side: *const u8,
    len: usize,
    out_weight: *mut f64,
) -> HsStatus {
    guard(|| {
        let h = as_ref(h)?;
        let side = slice(side, len)?;
        let slot = out(out_weight)?;
        let cut = Cut::new(side.iter().map(|&b| b != 0).collect());
        *slot = cut_weight(&h.inner, &cut)?;
        Ok(())
    })
}

/// Minimum cut. Writes the canonical side vector (vertex 0 on side 0) to
/// `side_out`, which must hold exactly the vertex count.
///
/// # Safety
/// `h` must be a live handle, `side_out` must point to `len` writable bytes
/// and `out_weight` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hs_min_cut(
    h: *const HsHypergraph,
    side_out: *mut u8,
    len: usize,
    out_weight: *mut f64,
) -> HsStatus {
    guard(|| {
        let h = as_ref(h)?;
        check_len(len, h.inner.n(), "side buffer")?;
        let side = slice_mut(side_out, len)?;
        let slot = out(out_weight)?;
        let mc = min_cut(&h.inner)?;
        for (dst, &b) in side.iter_mut().zip(mc.cut.canonical().side()) {
            *dst = u8::from(b);
        }
        *slot = mc.weight;
        Ok(())
    })
}

/// Strong connectivity of every edge, in edge order. Self-loops get
/// `INFINITY`. `len` must equal the edge count.
///
/// # Safety
/// `h` must be a live handle and `k_out` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn hs_strong_connectivities(h: *const HsHypergraph, k_out: *mut f64, len: usize) -> HsStatus {
    guard(|| {
        let h = as_ref(h)?;
        check_len(len, h.inner.edge_count(), "output buffer")?;
        let dst = slice_mut(k_out, len)?;
        let k = strong_connectivities(&h.inner)?;
        dst.copy_from_slice(k.values());
        Ok(())
    })
}

/// Samples a cut sparsifier into a new handle.
///
/// # Safety
/// `h` must be a live handle and `out_handle` writable.
#[no_mangle]
pub unsafe extern "C" fn hs_sparsify(
    h: *const HsHypergraph,
    epsilon: f64,
    d: f64,
    seed: u64,
    out_handle: *mut *mut HsHypergraph,
) -> HsStatus {
    guard(|| {
        let h = as_ref(h)?;
        let slot = out(out_handle)?;
        let params = SparsifyParams::new(epsilon, d, seed)?;
        let (sparse, _) = sparsify(&h.inner, &params)?;
        *slot = Box::into_raw(Box::new(HsHypergraph { inner: sparse }));
        Ok(())
    })
}

/// Largest relative cut error of `sparse` against `h` over all cuts
/// (at most 20 vertices). Infinite if a cut's weight vanished or appeared.
///
/// # Safety
/// Both handles must be live and `out_error` writable.
#[no_mangle]
pub unsafe extern "C" fn hs_verify_sparsifier(
    h: *const HsHypergraph,
    sparse: *const HsHypergraph,
    out_error: *mut f64,
) -> HsStatus {
    guard(|| {
        let (h, s) = (as_ref(h)?, as_ref(sparse)?);
        let slot = out(out_error)?;
        let report = verify_sparsifier(&h.inner, &s.inner, 1.0)?;
        *slot = report.max_relative_cut_error.unwrap_or(f64::NAN);
        Ok(())
    })
}

/// Lower bound on the probability that one contraction run outputs a fixed
/// cut of weight at most `alpha` times the minimum.
///
/// # Safety
/// `out_p` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hs_q_bound(n: usize, r: usize, alpha: f64, out_p: *mut f64) -> HsStatus {
    guard(|| {
        let slot = out(out_p)?;
        *slot = q_bound(n, r, alpha)?;
        Ok(())
    })
}

/// Parses a DIMACS CNF formula and sketches it.
///
/// # Safety
/// `dimacs` must be a nul-terminated string and `out_handle` writable.
#[no_mangle]
pub unsafe extern "C" fn hs_sat_sketch_from_dimacs(
    dimacs: *const c_char,
    epsilon: f64,
    d: f64,
    seed: u64,
    out_handle: *mut *mut HsSatSketch,
) -> HsStatus {
    guard(|| {
        let slot = out(out_handle)?;
        let phi = parse_dimacs(text(dimacs)?)?;
        let sketch = sketch_formula(&phi, epsilon, d, seed)?;
        *slot = Box::into_raw(Box::new(HsSatSketch { inner: sketch }));
        Ok(())
    })
}

/// Number of variables of the sketched formula, or 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hs_sat_sketch_num_vars(s: *const HsSatSketch) -> usize {
    s.as_ref().map_or(0, |s| s.inner.num_vars())
}

/// Estimated number of satisfied clauses; `assignment[i] != 0` means
/// variable `i + 1` is true.
///
/// # Safety
/// `s` must be a live handle, `assignment` must point to `len` bytes and
/// `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hs_sat_sketch_estimate(
    s: *const HsSatSketch,
    assignment: *const u8,
    len: usize,
    out_value: *mut f64,
) -> HsStatus {
    guard(|| {
        let s = as_ref(s)?;
        let a: Vec<bool> = slice(assignment, len)?.iter().map(|&b| b != 0).collect();
        let slot = out(out_value)?;
        *slot = estimate_value(&s.inner, &a)?;
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn hs_sat_sketch_free(s: *mut HsSatSketch) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Builds the Max-Cut gadget of a random hidden-hypermatching instance and
/// reports its exact maximum cut alongside the predicted value.
///
/// # Safety
/// `out_maxcut` and `out_expected` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hs_gadget_max_cut(
    k: usize,
    t: usize,
    b: u8,
    seed: u64,
    out_maxcut: *mut f64,
    out_expected: *mut f64,
) -> HsStatus {
    guard(|| {
        let (mc, ex) = (out(out_maxcut)?, out(out_expected)?);
        if b > 1 {
            return Err(Error::InvalidArgument("b must be 0 or 1".into()).into());
        }
        let inst = gen_bhh(k, t, b == 1, &mut stream_rng(seed, 0))?;
        let g = build_gadget(&inst)?;
        *mc = exact_max_cut(&g.graph)?;
        *ex = gadget_expected_value(inst.n(), t, b == 1)? as f64;
        Ok(())
    })
}
