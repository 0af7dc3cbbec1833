//! C ABI for the `quekno` crate.
//!
//! Objects cross the boundary as opaque handles created by `qk_*` functions
//! and released with the matching `*_free`. Every fallible call returns a
//! [`QkStatus`]; on failure [`qk_last_error`] describes the problem. Strings
//! returned through `char **` out-parameters are owned by the caller and
//! must be released with [`qk_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use quekno::generator::{self, Benchmark, QueknoMetadata, QueknoSpec};
use quekno::graph::ArchitectureGraph;
use quekno::route::{self, RouterConfig};
use quekno::verify::{self, Transcript};
use quekno::Circuit;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    ParseError = 4,
    GenerationFailed = 5,
    ValidationFailed = 6,
    Panic = 7,
}

/// A device coupling graph.
pub struct QkArchitecture(ArchitectureGraph);

/// A gate list over `num_qubits` qubits.
pub struct QkCircuit(Circuit);

/// A generated circuit with its planted solution.
pub struct QkBenchmark(Benchmark);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

struct Fail(QkStatus, String);

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            QkStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            QkStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(QkStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(QkStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(QkStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(QkStatus::NullPointer, "output pointer is null".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(QkStatus::NullPointer, "output pointer is null".into()));
    }
    let c = CString::new(s).map_err(|_| Fail(QkStatus::InvalidArgument, "string contains nul".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next `qk_*` call on the same thread.
#[no_mangle]
pub extern "C" fn qk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Looks up a builtin device (`grid2x3`, `tokyo`, `rochester`,
/// `sycamore53`, `sycamore54`).
///
/// # Safety
/// `name` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_architecture_builtin(
    name: *const c_char,
    out: *mut *mut QkArchitecture,
) -> QkStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let ag = ArchitectureGraph::builtin(name)
            .map_err(|e| Fail(QkStatus::InvalidArgument, e.to_string()))?;
        put(out, QkArchitecture(ag))
    })
}

/// Parses a device from the `n <count>` / `e <p> <q>` text format.
///
/// # Safety
/// `name` and `text` must be nul-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_architecture_from_text(
    name: *const c_char,
    text: *const c_char,
    out: *mut *mut QkArchitecture,
) -> QkStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let text = str_arg(text, "text")?;
        let ag = ArchitectureGraph::from_text(name, text)
            .map_err(|e| Fail(QkStatus::ParseError, e.to_string()))?;
        put(out, QkArchitecture(ag))
    })
}

/// Number of physical qubits; 0 for null.
///
/// # Safety
/// `ag` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qk_architecture_vertex_count(ag: *const QkArchitecture) -> usize {
    ag.as_ref().map_or(0, |a| a.0.vertex_count())
}

/// Number of couplers; 0 for null.
///
/// # Safety
/// `ag` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qk_architecture_edge_count(ag: *const QkArchitecture) -> usize {
    ag.as_ref().map_or(0, |a| a.0.edge_count())
}

/// # Safety
/// `ag` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qk_architecture_free(ag: *mut QkArchitecture) {
    if !ag.is_null() {
        drop(Box::from_raw(ag));
    }
}

/// Parses an OpenQASM 2.0 circuit.
///
/// # Safety
/// `qasm` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_circuit_from_qasm(
    qasm: *const c_char,
    out: *mut *mut QkCircuit,
) -> QkStatus {
    guard(|| {
        let text = str_arg(qasm, "qasm")?;
        let c = Circuit::from_qasm(text).map_err(|e| Fail(QkStatus::ParseError, e.to_string()))?;
        put(out, QkCircuit(c))
    })
}

/// Emits a circuit as OpenQASM 2.0.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_circuit_to_qasm(c: *const QkCircuit, out: *mut *mut c_char) -> QkStatus {
    guard(|| {
        let c = ref_arg(c, "circuit")?;
        put_string(out, c.0.to_qasm())
    })
}

/// Gate counts and depth of a circuit. Any output pointer may be null.
///
/// # Safety
/// `c` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_circuit_summary(
    c: *const QkCircuit,
    num_qubits: *mut usize,
    one_qubit: *mut usize,
    two_qubit: *mut usize,
    depth: *mut usize,
) -> QkStatus {
    guard(|| {
        let c = &ref_arg(c, "circuit")?.0;
        let counts = c.gate_counts();
        for (p, v) in [
            (num_qubits, c.num_qubits()),
            (one_qubit, counts.one_qubit),
            (two_qubit, counts.two_qubit),
            (depth, c.depth()),
        ] {
            if !p.is_null() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `c` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qk_circuit_free(c: *mut QkCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Generates a benchmark from a JSON spec, e.g.
/// `{"ag_name":"tokyo","objective":"gate","target_cost":5,"perm_type":"opt1",
/// "graph_size":"tokyo","qbg_ratio":1.5,"seed":7}`.
///
/// # Safety
/// `spec_json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_benchmark_generate(
    spec_json: *const c_char,
    out: *mut *mut QkBenchmark,
) -> QkStatus {
    guard(|| {
        let text = str_arg(spec_json, "spec_json")?;
        let spec: QueknoSpec =
            serde_json::from_str(text).map_err(|e| Fail(QkStatus::ParseError, e.to_string()))?;
        let b = generator::generate(&spec).map_err(|e| match e {
            generator::GenerateError::Graph(_) | generator::GenerateError::InvalidSpec(_) => {
                Fail(QkStatus::InvalidArgument, e.to_string())
            }
            _ => Fail(QkStatus::GenerationFailed, e.to_string()),
        })?;
        put(out, QkBenchmark(b))
    })
}

/// Copies the benchmark circuit into a new circuit handle.
///
/// # Safety
/// `b` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_benchmark_circuit(
    b: *const QkBenchmark,
    out: *mut *mut QkCircuit,
) -> QkStatus {
    guard(|| {
        let b = ref_arg(b, "benchmark")?;
        put(out, QkCircuit(b.0.circuit.clone()))
    })
}

/// The benchmark circuit as OpenQASM 2.0.
///
/// # Safety
/// `b` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_benchmark_qasm(b: *const QkBenchmark, out: *mut *mut c_char) -> QkStatus {
    guard(|| {
        let b = ref_arg(b, "benchmark")?;
        put_string(out, b.0.circuit.to_qasm())
    })
}

/// The sidecar metadata as JSON.
///
/// # Safety
/// `b` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_benchmark_metadata_json(
    b: *const QkBenchmark,
    out: *mut *mut c_char,
) -> QkStatus {
    guard(|| {
        let b = ref_arg(b, "benchmark")?;
        put_string(out, serde_json::to_string(&b.0.metadata).expect("metadata serializes"))
    })
}

/// Known cost and ratio of the planted solution. Outputs may be null.
///
/// # Safety
/// `b` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_benchmark_known(
    b: *const QkBenchmark,
    known_cost: *mut usize,
    known_rho: *mut f64,
) -> QkStatus {
    guard(|| {
        let m = &ref_arg(b, "benchmark")?.0.metadata;
        if !known_cost.is_null() {
            *known_cost = m.known_cost;
        }
        if !known_rho.is_null() {
            *known_rho = m.known_rho;
        }
        Ok(())
    })
}

/// # Safety
/// `b` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qk_benchmark_free(b: *mut QkBenchmark) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Validates a transcript (JSON) for `c` on `ag` and writes the report as
/// JSON. Returns `ValidationFailed` for an invalid transcript; the report is
/// still written.
///
/// # Safety
/// Handles must be live; `transcript_json` nul-terminated; `report_out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn qk_validate_transcript_json(
    c: *const QkCircuit,
    ag: *const QkArchitecture,
    transcript_json: *const c_char,
    report_out: *mut *mut c_char,
) -> QkStatus {
    let mut invalid = None;
    let status = guard(|| {
        let c = ref_arg(c, "circuit")?;
        let ag = ref_arg(ag, "architecture")?;
        let text = str_arg(transcript_json, "transcript_json")?;
        let t = Transcript::from_json(text).map_err(|e| Fail(QkStatus::ParseError, e.to_string()))?;
        let report = verify::validate_transcript(&c.0, &ag.0, &t);
        invalid = report.first_violation.as_ref().map(|v| v.to_string());
        put_string(report_out, serde_json::to_string(&report).expect("reports serialize"))
    });
    match (status, invalid) {
        (QkStatus::Ok, Some(msg)) => {
            set_error(msg);
            QkStatus::ValidationFailed
        }
        (s, _) => s,
    }
}

/// Replays sidecar metadata (JSON) against `c` on `ag`; writes the report.
///
/// # Safety
/// As for [`qk_validate_transcript_json`].
#[no_mangle]
pub unsafe extern "C" fn qk_replay_metadata_json(
    c: *const QkCircuit,
    ag: *const QkArchitecture,
    metadata_json: *const c_char,
    report_out: *mut *mut c_char,
) -> QkStatus {
    let mut invalid = None;
    let status = guard(|| {
        let c = ref_arg(c, "circuit")?;
        let ag = ref_arg(ag, "architecture")?;
        let text = str_arg(metadata_json, "metadata_json")?;
        let meta: QueknoMetadata =
            serde_json::from_str(text).map_err(|e| Fail(QkStatus::ParseError, e.to_string()))?;
        let replay = verify::replay(&c.0, &meta, &ag.0)
            .map_err(|e| Fail(QkStatus::InvalidArgument, e.to_string()))?;
        invalid = replay.report.first_violation.as_ref().map(|v| v.to_string());
        put_string(report_out, serde_json::to_string(&replay.report).expect("reports serialize"))
    });
    match (status, invalid) {
        (QkStatus::Ok, Some(msg)) => {
            set_error(msg);
            QkStatus::ValidationFailed
        }
        (s, _) => s,
    }
}

/// Routes `c` on `ag` with the greedy baseline router (gate objective) and
/// writes the transcript as JSON.
///
/// # Safety
/// Handles must be live; `transcript_out` writable.
#[no_mangle]
pub unsafe extern "C" fn qk_greedy_route(
    c: *const QkCircuit,
    ag: *const QkArchitecture,
    seed: u64,
    restarts: usize,
    transcript_out: *mut *mut c_char,
) -> QkStatus {
    guard(|| {
        let c = ref_arg(c, "circuit")?;
        let ag = ref_arg(ag, "architecture")?;
        let cfg = RouterConfig {
            seed,
            restarts,
            ..RouterConfig::default()
        };
        let t = route::greedy_route(&c.0, &ag.0, &cfg)
            .map_err(|e| Fail(QkStatus::InvalidArgument, e.to_string()))?;
        put_string(transcript_out, t.to_json())
    })
}

/// Exact minimum swap count on devices with at most 8 qubits. Writes -1 to
/// `out` when no solution within `limit` swaps exists.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qk_optimal_swap_count(
    c: *const QkCircuit,
    ag: *const QkArchitecture,
    limit: usize,
    out: *mut i64,
) -> QkStatus {
    guard(|| {
        let c = ref_arg(c, "circuit")?;
        let ag = ref_arg(ag, "architecture")?;
        if out.is_null() {
            return Err(Fail(QkStatus::NullPointer, "output pointer is null".into()));
        }
        let r = verify::brute_force_optimal(&c.0, &ag.0, limit)
            .map_err(|e| Fail(QkStatus::InvalidArgument, e.to_string()))?;
        *out = r.map_or(-1, |v| v as i64);
        Ok(())
    })
}
