//! Benchmark suites: grids of specs, on-disk layout and per-cell statistics.
//!
//! A suite directory holds `<stem>.qasm` and `<stem>.json` (sidecar
//! metadata) per circuit, plus `manifest.json`, a JSON array of
//! [`CircuitSummary`] records.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, GateCounts};
use crate::generator::{
    generate_on, Benchmark, GenerateError, GraphSize, Objective, QueknoMetadata, QueknoSpec,
    QSE_RATIO, TFL_RATIO,
};
use crate::graph::{ArchitectureGraph, GraphError};
use crate::perm::PermType;
use crate::seed::{derive_seed, str_word};
use crate::verify;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {message}")]
    Corrupt { path: PathBuf, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{stem}: {source}")]
    Generate { stem: String, source: GenerateError },
    #[error("no circuits found in {0}")]
    Empty(PathBuf),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> SuiteError + '_ {
    move |source| SuiteError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Target costs used when none are given.
pub fn default_costs(objective: Objective) -> Vec<usize> {
    match objective {
        Objective::Gate => vec![0, 1, 2, 3, 4, 5, 10, 15, 20, 25],
        Objective::Depth => vec![1, 2, 3, 4, 5, 10],
    }
}

/// One point of the grid, without the repetition index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub perm_type: PermType,
    pub graph_size: GraphSize,
    pub qbg_ratio: f64,
    pub target_cost: usize,
}

/// A grid of specs on one device with one objective.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub ag_name: String,
    pub objective: Objective,
    pub perm_types: Vec<PermType>,
    pub graph_sizes: Vec<GraphSize>,
    pub qbg_ratios: Vec<f64>,
    pub costs: Vec<usize>,
    pub count: usize,
    pub seed: u64,
}

impl SuiteConfig {
    /// The standard grid for a device and objective, 10 circuits per cell.
    pub fn standard(ag_name: &str, objective: Objective, seed: u64) -> SuiteConfig {
        let (perm_types, qbg_ratios) = match objective {
            Objective::Gate => (vec![PermType::Opt1, PermType::Opt2], vec![TFL_RATIO]),
            Objective::Depth => (vec![PermType::Parallel], vec![TFL_RATIO, QSE_RATIO]),
        };
        SuiteConfig {
            ag_name: ag_name.to_string(),
            objective,
            perm_types,
            graph_sizes: GraphSize::default_for(ag_name),
            qbg_ratios,
            costs: default_costs(objective),
            count: 10,
            seed,
        }
    }

    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &perm_type in &self.perm_types {
            for &graph_size in &self.graph_sizes {
                for &qbg_ratio in &self.qbg_ratios {
                    for &target_cost in &self.costs {
                        out.push(Cell {
                            perm_type,
                            graph_size,
                            qbg_ratio,
                            target_cost,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.cells().len() * self.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every `(stem, spec)` in grid order. Seeds depend on the base seed, the
    /// device, the objective, the cell position and the repetition index.
    pub fn specs(&self) -> Vec<(String, QueknoSpec)> {
        let mut out = Vec::with_capacity(self.len());
        for (ci, cell) in self.cells().iter().enumerate() {
            for index in 0..self.count {
                let seed = derive_seed(&[
                    self.seed,
                    str_word(&self.ag_name),
                    str_word(self.objective.as_str()),
                    ci as u64,
                    index as u64,
                ]);
                let spec = QueknoSpec {
                    ag_name: self.ag_name.clone(),
                    objective: self.objective,
                    target_cost: cell.target_cost,
                    perm_type: cell.perm_type,
                    graph_size: cell.graph_size,
                    qbg_ratio: cell.qbg_ratio,
                    seed,
                };
                out.push((file_stem(&spec, index), spec));
            }
        }
        out
    }
}

/// `rochester_gate_opt1_small_r1.5_c10_03`.
pub fn file_stem(spec: &QueknoSpec, index: usize) -> String {
    format!(
        "{}_{}_{}_{}_r{}_c{}_{:02}",
        spec.ag_name,
        spec.objective,
        spec.perm_type,
        spec.graph_size,
        spec.qbg_ratio,
        spec.target_cost,
        index
    )
}

/// One manifest record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitSummary {
    pub file: String,
    pub qasm_file: String,
    pub spec: QueknoSpec,
    pub known_cost: usize,
    pub known_rho: f64,
    pub all_strong: bool,
    pub num_qubits: usize,
    pub gate_counts: GateCounts,
    pub depth: usize,
}

impl CircuitSummary {
    pub fn of(stem: &str, meta: &QueknoMetadata) -> CircuitSummary {
        CircuitSummary {
            file: format!("{stem}.json"),
            qasm_file: format!("{stem}.qasm"),
            spec: meta.spec.clone(),
            known_cost: meta.known_cost,
            known_rho: meta.known_rho,
            all_strong: meta.all_strong(),
            num_qubits: meta.num_qubits,
            gate_counts: meta.gate_counts,
            depth: meta.depth,
        }
    }
}

/// Generates every circuit of the grid in memory, in grid order.
pub fn generate_all(cfg: &SuiteConfig) -> Result<Vec<(String, Benchmark)>, SuiteError> {
    let ag = ArchitectureGraph::builtin(&cfg.ag_name)?;
    cfg.specs()
        .into_par_iter()
        .map(|(stem, spec)| {
            generate_on(&ag, &spec)
                .map(|b| (stem.clone(), b))
                .map_err(|source| SuiteError::Generate { stem, source })
        })
        .collect()
}

/// Writes `bytes` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), SuiteError> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    let mut f = fs::File::create(&tmp).map_err(io_err(&tmp))?;
    f.write_all(bytes).map_err(io_err(&tmp))?;
    f.sync_all().map_err(io_err(&tmp))?;
    drop(f);
    fs::rename(&tmp, path).map_err(io_err(path))
}

/// Generates the grid into `out_dir` and returns the manifest records.
pub fn generate_suite(cfg: &SuiteConfig, out_dir: &Path) -> Result<Vec<CircuitSummary>, SuiteError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let ag = ArchitectureGraph::builtin(&cfg.ag_name)?;
    let summaries: Vec<CircuitSummary> = cfg
        .specs()
        .into_par_iter()
        .map(|(stem, spec)| {
            let mut b = generate_on(&ag, &spec).map_err(|source| SuiteError::Generate {
                stem: stem.clone(),
                source,
            })?;
            let qasm_name = format!("{stem}.qasm");
            b.metadata.qasm_file = Some(qasm_name.clone());
            write_atomic(&out_dir.join(&qasm_name), b.circuit.to_qasm().as_bytes())?;
            let json = serde_json::to_string_pretty(&b.metadata).expect("metadata serializes");
            write_atomic(&out_dir.join(format!("{stem}.json")), json.as_bytes())?;
            Ok(CircuitSummary::of(&stem, &b.metadata))
        })
        .collect::<Result<_, SuiteError>>()?;
    let manifest = serde_json::to_string_pretty(&summaries).expect("summaries serialize");
    write_atomic(&out_dir.join(MANIFEST_FILE), manifest.as_bytes())?;
    Ok(summaries)
}

/// A circuit read back from a suite directory.
#[derive(Debug, Clone)]
pub struct SuiteEntry {
    pub stem: String,
    pub sidecar: PathBuf,
    pub metadata: QueknoMetadata,
    pub circuit: Circuit,
}

/// Reads every sidecar in `dir` (sorted by name) with its QASM file.
/// Unreadable entries are returned as errors in place.
pub fn load_suite(dir: &Path) -> Result<Vec<Result<SuiteEntry, SuiteError>>, SuiteError> {
    let mut sidecars: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|e| e == "json")
                && p.file_name().is_some_and(|n| n != MANIFEST_FILE)
        })
        .collect();
    sidecars.sort();
    if sidecars.is_empty() {
        return Err(SuiteError::Empty(dir.to_path_buf()));
    }
    Ok(sidecars.into_iter().map(|p| load_entry(&p)).collect())
}

pub fn load_entry(sidecar: &Path) -> Result<SuiteEntry, SuiteError> {
    let corrupt = |message: String| SuiteError::Corrupt {
        path: sidecar.to_path_buf(),
        message,
    };
    let text = fs::read_to_string(sidecar).map_err(io_err(sidecar))?;
    let metadata: QueknoMetadata =
        serde_json::from_str(&text).map_err(|e| corrupt(e.to_string()))?;
    let stem = sidecar
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or_default()
        .to_string();
    let qasm_name = metadata
        .qasm_file
        .clone()
        .unwrap_or_else(|| format!("{stem}.qasm"));
    let qasm_path = sidecar.with_file_name(qasm_name);
    let qasm = fs::read_to_string(&qasm_path).map_err(io_err(&qasm_path))?;
    let circuit = Circuit::from_qasm(&qasm).map_err(|e| SuiteError::Corrupt {
        path: qasm_path.clone(),
        message: e.to_string(),
    })?;
    Ok(SuiteEntry {
        stem,
        sidecar: sidecar.to_path_buf(),
        metadata,
        circuit,
    })
}

/// Replays an entry and checks it against its recorded cost and ratio.
pub fn check_entry(entry: &SuiteEntry) -> Result<(), String> {
    let meta = &entry.metadata;
    let ag = ArchitectureGraph::builtin(&meta.spec.ag_name).map_err(|e| e.to_string())?;
    let replay = verify::replay(&entry.circuit, meta, &ag).map_err(|e| e.to_string())?;
    if let Some(v) = &replay.report.first_violation {
        return Err(format!("replay invalid: {v}"));
    }
    let cost = replay.cost(meta.spec.objective);
    if cost != meta.known_cost {
        return Err(format!(
            "replay uses {cost} but known_cost is {}",
            meta.known_cost
        ));
    }
    let rho = verify::known_rho(&replay.report, meta.spec.objective);
    if (rho - meta.known_rho).abs() > 1e-9 {
        return Err(format!(
            "replayed ratio {rho} differs from known_rho {}",
            meta.known_rho
        ));
    }
    Ok(())
}

/// Aggregates of one grid cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellStats {
    pub objective: Objective,
    pub perm_type: PermType,
    pub graph_size: GraphSize,
    pub qbg_ratio: f64,
    pub target_cost: usize,
    pub count: usize,
    pub mean_known_rho: f64,
    pub min_known_rho: f64,
    pub max_known_rho: f64,
    pub mean_depth: f64,
    pub mean_two_qubit: f64,
    pub mean_one_qubit: f64,
}

impl CellStats {
    pub const CSV_HEADER: &'static str = "objective,perm_type,graph_size,qbg_ratio,target_cost,count,mean_known_rho,min_known_rho,max_known_rho,mean_depth,mean_two_qubit,mean_one_qubit";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.6},{:.6},{:.6},{:.3},{:.3},{:.3}",
            self.objective,
            self.perm_type,
            self.graph_size,
            self.qbg_ratio,
            self.target_cost,
            self.count,
            self.mean_known_rho,
            self.min_known_rho,
            self.max_known_rho,
            self.mean_depth,
            self.mean_two_qubit,
            self.mean_one_qubit
        )
    }
}

/// Groups metadata by cell, ordered by (perm type, size, ratio, cost).
pub fn cell_stats<'a>(metas: impl IntoIterator<Item = &'a QueknoMetadata>) -> Vec<CellStats> {
    type Key = (Objective, PermType, GraphSize, u64, usize);
    let mut groups: BTreeMap<Key, Vec<&QueknoMetadata>> = BTreeMap::new();
    for m in metas {
        let s = &m.spec;
        groups
            .entry((s.objective, s.perm_type, s.graph_size, s.qbg_ratio.to_bits(), s.target_cost))
            .or_default()
            .push(m);
    }
    groups
        .into_iter()
        .map(|((objective, perm_type, graph_size, ratio_bits, target_cost), ms)| {
            let n = ms.len() as f64;
            let mean = |f: &dyn Fn(&QueknoMetadata) -> f64| ms.iter().map(|m| f(m)).sum::<f64>() / n;
            let rhos = ms.iter().map(|m| m.known_rho);
            CellStats {
                objective,
                perm_type,
                graph_size,
                qbg_ratio: f64::from_bits(ratio_bits),
                target_cost,
                count: ms.len(),
                mean_known_rho: mean(&|m| m.known_rho),
                min_known_rho: rhos.clone().fold(f64::INFINITY, f64::min),
                max_known_rho: rhos.fold(f64::NEG_INFINITY, f64::max),
                mean_depth: mean(&|m| m.depth as f64),
                mean_two_qubit: mean(&|m| m.gate_counts.two_qubit as f64),
                mean_one_qubit: mean(&|m| m.gate_counts.one_qubit as f64),
            }
        })
        .collect()
}
