//! Instance and report JSON documents and the benchmark CSV schema.
//!
//! Instance:
//! ```json
//! {"k": 2, "n": 3,
//!  "centers": [{"capacity": 1, "penalty": {"family": "constant", "params": [3]}}, ...],
//!  "cost_matrix": [[1, 9], [2, 9], [9, 1]]}
//! ```
//! Penalty families: `constant` `[p]`, `linear` `[base, step]`, `table`
//! `[q1, q2, ...]`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use lbdd_core::{
    evaluate_objective, Allotment, Cost, CostMatrix, PenaltySpec, ProblemInstance, SolveReport,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid document: {0}")]
    Invalid(String),
    #[error(transparent)]
    Solver(#[from] lbdd_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyFamily {
    Constant,
    Linear,
    Table,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PenaltyDoc {
    pub family: PenaltyFamily,
    pub params: Vec<Cost>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterDoc {
    pub capacity: usize,
    pub penalty: PenaltyDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub k: usize,
    pub n: usize,
    pub centers: Vec<CenterDoc>,
    pub cost_matrix: Vec<Vec<Cost>>,
}

impl From<&PenaltySpec> for PenaltyDoc {
    fn from(spec: &PenaltySpec) -> Self {
        match spec {
            PenaltySpec::Constant(p) => PenaltyDoc {
                family: PenaltyFamily::Constant,
                params: vec![*p],
            },
            PenaltySpec::Linear { base, step } => PenaltyDoc {
                family: PenaltyFamily::Linear,
                params: vec![*base, *step],
            },
            PenaltySpec::Table(values) => PenaltyDoc {
                family: PenaltyFamily::Table,
                params: values.clone(),
            },
        }
    }
}

impl TryFrom<&PenaltyDoc> for PenaltySpec {
    type Error = FormatError;

    fn try_from(doc: &PenaltyDoc) -> Result<Self, FormatError> {
        match (doc.family, doc.params.as_slice()) {
            (PenaltyFamily::Constant, &[p]) => Ok(PenaltySpec::Constant(p)),
            (PenaltyFamily::Linear, &[base, step]) => Ok(PenaltySpec::Linear { base, step }),
            (PenaltyFamily::Table, values) if !values.is_empty() => {
                Ok(PenaltySpec::Table(values.to_vec()))
            }
            (family, params) => Err(FormatError::Invalid(format!(
                "{family:?} penalty cannot take {} parameter(s)",
                params.len()
            ))),
        }
    }
}

impl From<&ProblemInstance> for InstanceDoc {
    fn from(instance: &ProblemInstance) -> Self {
        let cm = &instance.cost_matrix;
        InstanceDoc {
            k: instance.k(),
            n: instance.n(),
            centers: instance
                .centers
                .iter()
                .map(|c| CenterDoc {
                    capacity: c.capacity,
                    penalty: PenaltyDoc::from(&c.penalty),
                })
                .collect(),
            cost_matrix: (0..cm.rows()).map(|d| cm.row(d).to_vec()).collect(),
        }
    }
}

impl InstanceDoc {
    /// Converts and validates.
    pub fn to_instance(&self) -> Result<ProblemInstance, FormatError> {
        if self.centers.len() != self.k {
            return Err(FormatError::Invalid(format!(
                "k is {} but {} centers are listed",
                self.k,
                self.centers.len()
            )));
        }
        if self.cost_matrix.len() != self.n {
            return Err(FormatError::Invalid(format!(
                "n is {} but the cost matrix has {} rows",
                self.n,
                self.cost_matrix.len()
            )));
        }
        if let Some(d) = self.cost_matrix.iter().position(|r| r.len() != self.k) {
            return Err(FormatError::Invalid(format!(
                "cost matrix row {d} does not have {} entries",
                self.k
            )));
        }
        let centers = self
            .centers
            .iter()
            .map(|c| Ok((c.capacity, PenaltySpec::try_from(&c.penalty)?)))
            .collect::<Result<Vec<_>, FormatError>>()?;
        let data = self.cost_matrix.concat();
        let cm = CostMatrix::new(self.n, self.k, data)
            .ok_or_else(|| FormatError::Invalid("cost matrix shape".into()))?;
        let instance = ProblemInstance::new(centers, cm);
        instance.validate()?;
        Ok(instance)
    }
}

pub fn instance_to_json(instance: &ProblemInstance) -> String {
    serde_json::to_string(&InstanceDoc::from(instance)).expect("plain data serializes")
}

pub fn instance_from_json(text: &str) -> Result<ProblemInstance, FormatError> {
    serde_json::from_str::<InstanceDoc>(text)?.to_instance()
}

pub fn read_instance(path: &Path) -> Result<ProblemInstance, FormatError> {
    let mut text = String::new();
    BufReader::new(File::open(path)?).read_to_string(&mut text)?;
    instance_from_json(&text)
}

pub fn write_instance(path: &Path, instance: &ProblemInstance) -> Result<(), FormatError> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut out, &InstanceDoc::from(instance))?;
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsDoc {
    pub iterations: usize,
    pub cycle_searches: usize,
    pub path_searches: usize,
    pub negative_cycles_removed: usize,
    pub negative_paths_removed: usize,
    pub transfers_applied: usize,
    pub refinement_gain: Cost,
    pub invariant_checks: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimingsDoc {
    pub index_update_ns: u64,
    pub bellman_ford_ns: u64,
    pub other_ns: u64,
    pub total_ns: u64,
}

/// Serialized [`SolveReport`]. `assignment[d]` is the center of demand `d`,
/// or null for unserved demands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub solver: String,
    pub objective: Cost,
    pub surcharge: Cost,
    pub unserved: Vec<usize>,
    pub assignment: Vec<Option<usize>>,
    pub loads: Vec<usize>,
    pub stats: StatsDoc,
    pub timings: TimingsDoc,
}

impl From<&SolveReport> for ReportDoc {
    fn from(r: &SolveReport) -> Self {
        let s = r.stats;
        let t = r.timings;
        ReportDoc {
            solver: r.solver.name().to_owned(),
            objective: r.objective,
            surcharge: r.surcharge,
            unserved: r.unserved.clone(),
            assignment: r.assignment.assignment().to_vec(),
            loads: r.assignment.loads().to_vec(),
            stats: StatsDoc {
                iterations: s.iterations,
                cycle_searches: s.cycle_searches,
                path_searches: s.path_searches,
                negative_cycles_removed: s.negative_cycles_removed,
                negative_paths_removed: s.negative_paths_removed,
                transfers_applied: s.transfers_applied,
                refinement_gain: s.refinement_gain,
                invariant_checks: s.invariant_checks,
            },
            timings: TimingsDoc {
                index_update_ns: t.index_update_ns,
                bellman_ford_ns: t.bellman_ford_ns,
                other_ns: t.other_ns,
                total_ns: t.total_ns,
            },
        }
    }
}

impl ReportDoc {
    /// Recomputes the objective of the stored assignment against
    /// `instance`. Unserved demands are skipped.
    pub fn reevaluate(&self, instance: &ProblemInstance) -> Result<Cost, FormatError> {
        if self.assignment.len() != instance.n() {
            return Err(FormatError::Invalid(format!(
                "report covers {} demands, instance has {}",
                self.assignment.len(),
                instance.n()
            )));
        }
        let mut allotment = Allotment::new(instance.n(), instance.k());
        for (d, c) in self.assignment.iter().enumerate() {
            if let Some(c) = *c {
                allotment.assign(d, c)?;
            }
        }
        if self.unserved.is_empty() {
            Ok(evaluate_objective(instance, &allotment)?)
        } else {
            Ok(lbdd_core::model::partial_objective(instance, &allotment)?)
        }
    }
}

pub fn report_to_json(report: &SolveReport) -> String {
    serde_json::to_string_pretty(&ReportDoc::from(report)).expect("plain data serializes")
}

pub fn report_from_json(text: &str) -> Result<ReportDoc, FormatError> {
    Ok(serde_json::from_str(text)?)
}

/// One benchmark run. Column order is the CSV schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub solver: String,
    pub theta: f64,
    pub penalty_lo: Cost,
    pub penalty_hi: Cost,
    pub ratio: usize,
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub objective: Cost,
    pub wall_ns: u64,
    pub index_update_ns: u64,
    pub bellman_ford_ns: u64,
    pub other_ns: u64,
}

pub const BENCH_COLUMNS: [&str; 13] = [
    "solver",
    "theta",
    "penalty_lo",
    "penalty_hi",
    "ratio",
    "seed",
    "n",
    "k",
    "objective",
    "wall_ns",
    "index_update_ns",
    "bellman_ford_ns",
    "other_ns",
];

pub fn write_bench_csv<W: Write>(out: W, rows: &[BenchRow]) -> Result<(), FormatError> {
    let mut writer = csv::Writer::from_writer(out);
    if rows.is_empty() {
        writer.write_record(BENCH_COLUMNS)?;
    }
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_bench_csv<R: Read>(input: R) -> Result<Vec<BenchRow>, FormatError> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(FormatError::from))
        .collect()
}
