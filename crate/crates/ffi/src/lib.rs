//! C ABI for `didpr`.
//!
//! Objects cross the boundary as opaque handles created by `didpr_*_new`,
//! `didpr_generate_*`, `didpr_graph_read` or `didpr_solve_eta` and released
//! with the matching `*_free`. Every fallible call returns a [`DidprStatus`];
//! on failure `didpr_last_error_message` describes the most recent error on
//! the calling thread. Panics are caught and reported as `DIDPR_STATUS_PANIC`.
//!
//! Coefficient arrays always have four entries in the order r11, r12, r21,
//! r22. Type pairs are passed as the integers 11, 12, 21 and 22.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::panic::{catch_unwind, AssertUnwindSafe};

use didpr::eta::EtaMethod;
use didpr::lp::Simplex;
use didpr::rewire::RewiringConfig;
use didpr::{AssortProfile, DirectedGraph, EdgeMixMatrix, EtaOutcome, EtaProblem, Interval, TypePair};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DidprStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    /// Targets or conditioning intervals lie outside the attainable region.
    Unattainable = 5,
    /// A solver failed to converge or returned an unexpected status.
    Numerical = 6,
    Panic = 7,
}

/// Eta solver selection for [`didpr_solve_eta`].
pub const DIDPR_METHOD_MAX_ENTROPY: i32 = 0;
pub const DIDPR_METHOD_ANALYTIC_CENTER: i32 = 1;
pub const DIDPR_METHOD_VERTEX: i32 = 2;

/// Opaque directed multigraph.
pub struct DidprGraph(DirectedGraph);

/// Opaque edge mix matrix.
pub struct DidprEta(EdgeMixMatrix);

/// `lower <= r(pair) <= upper`, `pair` one of 11, 12, 21, 22.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DidprInterval {
    pub pair: i32,
    pub lower: f64,
    pub upper: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(DidprStatus, String);

impl From<didpr::Error> for Failure {
    fn from(e: didpr::Error) -> Self {
        use didpr::Error as E;
        let status = match &e {
            E::Io(_) => DidprStatus::Io,
            E::Parse { .. } => DidprStatus::Parse,
            E::ConditioningUnattainable => DidprStatus::Unattainable,
            E::InvalidLp(_) | E::IterationCap(_) | E::UnexpectedLpStatus(_) | E::BoundOvershoot(_) => {
                DidprStatus::Numerical
            }
            _ => DidprStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: DidprStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DidprStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            DidprStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("panic: {msg}"));
            DidprStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| fail(DidprStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| fail(DidprStatus::NullPointer, format!("{what} is null")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(DidprStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn c_path<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(DidprStatus::NullPointer, "path is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(DidprStatus::InvalidArgument, "path is not valid UTF-8"))
}

unsafe fn write_profile(out: *mut f64, r: AssortProfile) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(DidprStatus::NullPointer, "output array is null"));
    }
    let vals = [r.r11, r.r12, r.r21, r.r22];
    std::ptr::copy_nonoverlapping(vals.as_ptr(), out, 4);
    Ok(())
}

unsafe fn read_profile(p: *const f64) -> Result<AssortProfile, Failure> {
    let v = slice(p, 4, "targets")?;
    Ok(AssortProfile::new(v[0], v[1], v[2], v[3]))
}

fn pair_of(code: i32) -> Result<TypePair, Failure> {
    match code {
        11 => Ok(TypePair::OutOut),
        12 => Ok(TypePair::OutIn),
        21 => Ok(TypePair::InOut),
        22 => Ok(TypePair::InIn),
        _ => Err(fail(DidprStatus::InvalidArgument, format!("unknown type pair {code}"))),
    }
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn didpr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or an empty string after
/// a successful one. Valid until the next `didpr_*` call on the same thread.
#[no_mangle]
pub extern "C" fn didpr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a graph on `num_nodes` nodes from parallel arrays of edge
/// endpoints.
///
/// # Safety
/// `sources` and `targets` must point to `num_edges` readable values each
/// (they may be null when `num_edges` is 0); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn didpr_graph_new(
    num_nodes: usize,
    sources: *const u32,
    targets: *const u32,
    num_edges: usize,
    out: *mut *mut DidprGraph,
) -> DidprStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let s = slice(sources, num_edges, "sources")?;
        let t = slice(targets, num_edges, "targets")?;
        if let Some(&v) = s.iter().chain(t).find(|&&v| v as usize >= num_nodes) {
            return Err(fail(
                DidprStatus::InvalidArgument,
                format!("node {v} out of range for {num_nodes} nodes"),
            ));
        }
        let g = DirectedGraph::from_edges(num_nodes, s.iter().copied().zip(t.iter().copied()));
        *out = boxed(DidprGraph(g));
        Ok(())
    })
}

/// Reads a whitespace-separated edge list.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn didpr_graph_read(path: *const c_char, out: *mut *mut DidprGraph) -> DidprStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let p = c_path(path)?;
        let f = File::open(p).map_err(|e| fail(DidprStatus::Io, format!("{p}: {e}")))?;
        let g = DirectedGraph::read_edge_list(BufReader::new(f))?;
        *out = boxed(DidprGraph(g));
        Ok(())
    })
}

/// Writes the graph as an edge list.
///
/// # Safety
/// `graph` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn didpr_graph_write(graph: *const DidprGraph, path: *const c_char) -> DidprStatus {
    guard(|| {
        let g = deref(graph, "graph")?;
        let p = c_path(path)?;
        let f = File::create(p).map_err(|e| fail(DidprStatus::Io, format!("{p}: {e}")))?;
        g.0.write_edge_list(BufWriter::new(f))?;
        Ok(())
    })
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn didpr_graph_num_nodes(graph: *const DidprGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.num_nodes())
}

/// Number of edges, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn didpr_graph_num_edges(graph: *const DidprGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.num_edges())
}

/// Endpoints of edge `index`.
///
/// # Safety
/// `graph` must be a live handle; `source` and `target` must be writable.
#[no_mangle]
pub unsafe extern "C" fn didpr_graph_edge(
    graph: *const DidprGraph,
    index: usize,
    source: *mut u32,
    target: *mut u32,
) -> DidprStatus {
    guard(|| {
        let g = deref(graph, "graph")?;
        let (s, t) = (out_ptr(source, "source")?, out_ptr(target, "target")?);
        let (u, v) = g.0.edge(index).ok_or_else(|| {
            fail(
                DidprStatus::InvalidArgument,
                format!("edge index {index} out of range for {} edges", g.0.num_edges()),
            )
        })?;
        (*s, *t) = (u, v);
        Ok(())
    })
}

/// Releases a graph. Null is ignored.
///
/// # Safety
/// `graph` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn didpr_graph_free(graph: *mut DidprGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Erdős–Rényi graph with self-loops: each ordered pair independently with
/// probability `p`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn didpr_generate_er(n: usize, p: f64, seed: u64, out: *mut *mut DidprGraph) -> DidprStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let g = didpr::generators::gen_er(n, p, seed)?;
        *out = boxed(DidprGraph(g));
        Ok(())
    })
}

/// Directed preferential attachment grown to `edges` edges after the seed
/// self-loop. Scenario labels are not returned.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn didpr_generate_dpa(
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta_in: f64,
    delta_out: f64,
    edges: usize,
    seed: u64,
    out: *mut *mut DidprGraph,
) -> DidprStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let params = didpr::generators::DpaParams {
            alpha,
            beta,
            gamma,
            delta_in,
            delta_out,
            target_edges: edges,
            seed,
        };
        let g = didpr::generators::gen_dpa(&params)?;
        *out = boxed(DidprGraph(g.graph));
        Ok(())
    })
}

/// Writes the graph's four assortativity coefficients into `out[0..4]`.
///
/// # Safety
/// `graph` must be a live handle and `out` must have room for 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn didpr_assortativity(graph: *const DidprGraph, out: *mut f64) -> DidprStatus {
    guard(|| {
        let g = deref(graph, "graph")?;
        write_profile(out, didpr::assortativity_of_graph(&g.0)?)
    })
}

/// Attainable range of every coefficient for the graph's degree-pair
/// distribution, subject to `intervals`. An interval on a coefficient is not
/// applied to that coefficient's own range. Returns `DIDPR_STATUS_UNATTAINABLE`
/// when the intervals cannot hold together.
///
/// # Safety
/// `graph` must be a live handle; `intervals` must point to
/// `num_intervals` values (or be null when it is 0); `lower` and `upper`
/// must each have room for 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn didpr_bounds(
    graph: *const DidprGraph,
    intervals: *const DidprInterval,
    num_intervals: usize,
    lower: *mut f64,
    upper: *mut f64,
) -> DidprStatus {
    guard(|| {
        let g = deref(graph, "graph")?;
        let mut problem = EtaProblem::from_graph(&g.0)?;
        for iv in slice(intervals, num_intervals, "intervals")? {
            if !(iv.lower <= iv.upper) {
                return Err(fail(DidprStatus::InvalidArgument, "interval lower exceeds upper"));
            }
            problem = problem.with_interval(Interval::new(pair_of(iv.pair)?, iv.lower, iv.upper));
        }
        let b = didpr::coefficient_bounds(&problem, &TypePair::ALL, &Simplex::default())?;
        let (lo, hi): (Vec<f64>, Vec<f64>) = TypePair::ALL
            .iter()
            .map(|&p| b.get(p).expect("every pair was requested"))
            .unzip();
        write_profile(lower, AssortProfile::new(lo[0], lo[1], lo[2], lo[3]))?;
        write_profile(upper, AssortProfile::new(hi[0], hi[1], hi[2], hi[3]))
    })
}

/// Solves for an edge mix matrix with the graph's degree-pair distribution
/// and the given four coefficients. `method` is one of the
/// `DIDPR_METHOD_*` constants. Returns `DIDPR_STATUS_UNATTAINABLE` when no
/// such matrix exists.
///
/// # Safety
/// `graph` must be a live handle, `targets` must point to 4 doubles and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn didpr_solve_eta(
    graph: *const DidprGraph,
    targets: *const f64,
    method: i32,
    out: *mut *mut DidprEta,
) -> DidprStatus {
    guard(|| {
        let g = deref(graph, "graph")?;
        let out = out_ptr(out, "out")?;
        let method = match method {
            DIDPR_METHOD_MAX_ENTROPY => EtaMethod::MaxEntropy,
            DIDPR_METHOD_ANALYTIC_CENTER => EtaMethod::AnalyticCenter,
            DIDPR_METHOD_VERTEX => EtaMethod::Vertex,
            m => return Err(fail(DidprStatus::InvalidArgument, format!("unknown method {m}"))),
        };
        let problem = EtaProblem::from_graph(&g.0)?.with_targets(read_profile(targets)?);
        match didpr::solve_target_eta(&problem, method, &Simplex::default())? {
            EtaOutcome::Solved(eta) => {
                *out = boxed(DidprEta(eta));
                Ok(())
            }
            EtaOutcome::Unattainable => Err(fail(DidprStatus::Unattainable, "targets are not jointly attainable")),
        }
    })
}

/// Writes the four coefficients of the edge mix matrix into `out[0..4]`.
///
/// # Safety
/// `eta` must be a live handle and `out` must have room for 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn didpr_eta_assortativity(eta: *const DidprEta, out: *mut f64) -> DidprStatus {
    guard(|| {
        let e = deref(eta, "eta")?;
        write_profile(out, e.0.assortativity()?)
    })
}

/// Releases an edge mix matrix. Null is ignored.
///
/// # Safety
/// `eta` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn didpr_eta_free(eta: *mut DidprEta) {
    if !eta.is_null() {
        drop(Box::from_raw(eta));
    }
}

/// Runs `steps` proposed double-edge swaps on a copy of `graph`, accepting
/// each with the ratio given by `eta`, which must share the graph's
/// degree-pair support. The rewired graph goes to `out`; `final_r`, if not
/// null, receives its four coefficients.
///
/// # Safety
/// `graph` and `eta` must be live handles, `out` must be writable and
/// `final_r` must be null or have room for 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn didpr_rewire(
    graph: *const DidprGraph,
    eta: *const DidprEta,
    steps: u64,
    seed: u64,
    out: *mut *mut DidprGraph,
    final_r: *mut f64,
) -> DidprStatus {
    guard(|| {
        let g = deref(graph, "graph")?;
        let e = deref(eta, "eta")?;
        let out = out_ptr(out, "out")?;
        let cfg = RewiringConfig {
            max_steps: steps,
            checkpoint_every: steps.max(1),
            seed,
            ..RewiringConfig::default()
        };
        let (rewired, trace) = didpr::rewire::rewire(&g.0, &e.0, &cfg)?;
        if !final_r.is_null() {
            let last = trace.last().ok_or_else(|| fail(DidprStatus::Numerical, "empty trace"))?;
            write_profile(final_r, last.profile())?;
        }
        *out = boxed(DidprGraph(rewired));
        Ok(())
    })
}
