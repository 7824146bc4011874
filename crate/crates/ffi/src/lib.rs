//! C ABI over the loose-hc toolkit.
//!
//! Graphs live behind an opaque `LhcGraph` handle created by `lhc_graph_new` or
//! `lhc_graph_from_text` and released with `lhc_graph_free`. Every fallible call
//! returns an `LhcStatus` and writes results through out-pointers.

use std::ffi::{c_char, CStr};
use std::ptr;

use loose_hc::absorb::{build_gadget_template, m3_density, AbsorbError, GadgetKind};
use loose_hc::oracle::{count_loose_hc, has_loose_hc_with_budget, Decision, OracleError};
use loose_hc::Hypergraph3;

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum LhcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    TooLarge = 3,
    BudgetExhausted = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum LhcGadget {
    A2 = 0,
    A1 = 1,
    Backbone1 = 2,
    ContractedBackbone = 3,
}

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum LhcDecision {
    No = 0,
    Yes = 1,
    /// Budget ran out before the search finished.
    Unknown = 2,
}

/// Opaque 3-uniform hypergraph.
pub struct LhcGraph {
    inner: Hypergraph3,
}

impl LhcGraph {
    pub fn graph(&self) -> &Hypergraph3 {
        &self.inner
    }
}

fn guard(f: impl FnOnce() -> LhcStatus) -> LhcStatus {
    std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)).unwrap_or(LhcStatus::Panic)
}

fn oracle_status(e: &OracleError) -> LhcStatus {
    match e {
        OracleError::TooLarge { .. } => LhcStatus::TooLarge,
        OracleError::InvalidInput(_) => LhcStatus::InvalidInput,
    }
}

fn absorb_status(e: &AbsorbError) -> LhcStatus {
    match e {
        AbsorbError::TooManyEdges { .. } | AbsorbError::TooLarge { .. } => LhcStatus::TooLarge,
        _ => LhcStatus::InvalidInput,
    }
}

unsafe fn store<T>(out: *mut T, v: T) {
    if !out.is_null() {
        *out = v;
    }
}

/// Static description of a status code. Never null.
#[no_mangle]
pub extern "C" fn lhc_status_message(status: LhcStatus) -> *const c_char {
    let s: &'static CStr = match status {
        LhcStatus::Ok => c"ok",
        LhcStatus::NullPointer => c"null pointer argument",
        LhcStatus::InvalidInput => c"invalid input",
        LhcStatus::TooLarge => c"instance exceeds an exhaustive limit",
        LhcStatus::BudgetExhausted => c"search budget exhausted",
        LhcStatus::BufferTooSmall => c"output buffer too small",
        LhcStatus::Panic => c"internal error",
    };
    s.as_ptr()
}

/// Builds a graph on `n` vertices from `edge_count` triples stored flat in `edges`.
///
/// # Safety
/// `edges` must point to `3 * edge_count` readable values (may be null when `edge_count == 0`);
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lhc_graph_new(n: usize, edges: *const usize, edge_count: usize, out: *mut *mut LhcGraph) -> LhcStatus {
    if out.is_null() || (edges.is_null() && edge_count > 0) {
        return LhcStatus::NullPointer;
    }
    *out = ptr::null_mut();
    guard(|| {
        let flat = if edge_count == 0 { &[][..] } else { std::slice::from_raw_parts(edges, 3 * edge_count) };
        let triples = flat.chunks_exact(3).map(|c| [c[0], c[1], c[2]]);
        match Hypergraph3::new(n, triples) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(LhcGraph { inner: g }));
                LhcStatus::Ok
            }
            Err(_) => LhcStatus::InvalidInput,
        }
    })
}

/// Parses the text or JSON hypergraph format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lhc_graph_from_text(text: *const c_char, out: *mut *mut LhcGraph) -> LhcStatus {
    if text.is_null() || out.is_null() {
        return LhcStatus::NullPointer;
    }
    *out = ptr::null_mut();
    guard(|| {
        let Ok(s) = CStr::from_ptr(text).to_str() else {
            return LhcStatus::InvalidInput;
        };
        match Hypergraph3::from_any(s) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(LhcGraph { inner: g }));
                LhcStatus::Ok
            }
            Err(_) => LhcStatus::InvalidInput,
        }
    })
}

/// # Safety
/// `g` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn lhc_graph_free(g: *mut LhcGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn lhc_graph_vertex_count(g: *const LhcGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.n())
}

/// # Safety
/// `g` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn lhc_graph_edge_count(g: *const LhcGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.edge_count())
}

/// Minimum `d`-degree for `d` in {1, 2}.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lhc_min_degree(g: *const LhcGraph, d: usize, out: *mut usize) -> LhcStatus {
    let Some(g) = g.as_ref() else { return LhcStatus::NullPointer };
    if out.is_null() {
        return LhcStatus::NullPointer;
    }
    guard(|| match g.inner.min_d_degree(d) {
        Ok(v) => {
            *out = v;
            LhcStatus::Ok
        }
        Err(_) => LhcStatus::InvalidInput,
    })
}

/// Exhaustive loose Hamilton cycle search with a node budget (0 means the default).
///
/// On `Yes`, the cyclic vertex order is written to `witness` when `witness_cap` allows it;
/// `witness_len` always receives the order length (0 otherwise). A short buffer yields
/// `BufferTooSmall` with `decision` still set. A spent budget gives `BudgetExhausted`
/// with decision `Unknown`.
///
/// # Safety
/// `g` must be a live handle; `decision` writable; `witness` must hold `witness_cap`
/// values or be null with `witness_cap == 0`; `witness_len` writable or null.
#[no_mangle]
pub unsafe extern "C" fn lhc_has_loose_hc(
    g: *const LhcGraph,
    budget: u64,
    decision: *mut LhcDecision,
    witness: *mut usize,
    witness_cap: usize,
    witness_len: *mut usize,
) -> LhcStatus {
    let Some(g) = g.as_ref() else { return LhcStatus::NullPointer };
    if decision.is_null() || (witness.is_null() && witness_cap > 0) {
        return LhcStatus::NullPointer;
    }
    store(witness_len, 0);
    guard(|| {
        let budget = if budget == 0 { loose_hc::oracle::ORACLE_BUDGET } else { budget };
        let r = match has_loose_hc_with_budget(&g.inner, budget) {
            Ok(r) => r,
            Err(e) => return oracle_status(&e),
        };
        match (r.decision, r.exhaustive) {
            (Decision::Yes, _) => {
                *decision = LhcDecision::Yes;
                let w = r.witness.map(|c| c.vertices).unwrap_or_default();
                store(witness_len, w.len());
                if w.len() > witness_cap {
                    return LhcStatus::BufferTooSmall;
                }
                ptr::copy_nonoverlapping(w.as_ptr(), witness, w.len());
                LhcStatus::Ok
            }
            (Decision::No, true) => {
                *decision = LhcDecision::No;
                LhcStatus::Ok
            }
            (Decision::No, false) => {
                *decision = LhcDecision::Unknown;
                LhcStatus::BudgetExhausted
            }
        }
    })
}

/// Number of loose Hamilton cycles (up to rotation and reflection), small graphs only.
///
/// # Safety
/// `g` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lhc_count_loose_hc(g: *const LhcGraph, out: *mut u64) -> LhcStatus {
    let Some(g) = g.as_ref() else { return LhcStatus::NullPointer };
    if out.is_null() {
        return LhcStatus::NullPointer;
    }
    guard(|| match count_loose_hc(&g.inner) {
        Ok(c) => {
            *out = c;
            LhcStatus::Ok
        }
        Err(e) => oracle_status(&e),
    })
}

unsafe fn write_m3(h: &Hypergraph3, num: *mut i64, den: *mut i64) -> LhcStatus {
    if num.is_null() || den.is_null() {
        return LhcStatus::NullPointer;
    }
    match m3_density(h) {
        Ok(m) => {
            *num = *m.value.numer();
            *den = *m.value.denom();
            LhcStatus::Ok
        }
        Err(e) => absorb_status(&e),
    }
}

/// Exact 3-density of `g` as a reduced fraction.
///
/// # Safety
/// `g` must be a live handle; `num` and `den` writable.
#[no_mangle]
pub unsafe extern "C" fn lhc_m3(g: *const LhcGraph, num: *mut i64, den: *mut i64) -> LhcStatus {
    let Some(g) = g.as_ref() else { return LhcStatus::NullPointer };
    guard(|| write_m3(&g.inner, num, den))
}

/// Exact 3-density of a built-in gadget.
///
/// # Safety
/// `num` and `den` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lhc_m3_gadget(kind: LhcGadget, num: *mut i64, den: *mut i64) -> LhcStatus {
    let kind = match kind {
        LhcGadget::A2 => GadgetKind::A2,
        LhcGadget::A1 => GadgetKind::A1,
        LhcGadget::Backbone1 => GadgetKind::Backbone1,
        LhcGadget::ContractedBackbone => GadgetKind::ContractedBackbone,
    };
    guard(|| write_m3(&build_gadget_template(kind).hypergraph(), num, den))
}
