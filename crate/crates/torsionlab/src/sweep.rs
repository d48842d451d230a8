//! Uniformity sweeps: the best norm ratio found for each member of a random
//! curve family, all on one grid.

use serde_json::{json, Value};
use torsionlab_core::exec::{Executor, Sequential};
use torsionlab_core::oscillatory::{norm_ratio_search, NormSearch, TestFamily, TestFunction};
use torsionlab_core::{GridSpec, PolyCurve};

use crate::config::{FamilyKind, GridConfig, SearchConfig};
use crate::exit_code;
use crate::random::Family;
use crate::report::num;

#[derive(Clone, Debug, PartialEq)]
pub enum RowResult {
    Ok(NormSearch),
    /// The search could not run on this curve (usually aliasing).
    Failed {
        code: u8,
        message: String,
    },
}

impl RowResult {
    pub fn ratio(&self) -> Option<f64> {
        match self {
            RowResult::Ok(s) => Some(s.lower_bound),
            RowResult::Failed { .. } => None,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            RowResult::Ok(s) => json!({ "ratio": num(s.lower_bound), "best": test_function(&s.best), "evaluations": s.evaluations }),
            RowResult::Failed { code, message } => json!({ "error": message, "exit_code": code }),
        }
    }
}

fn test_function(tf: &TestFunction) -> Value {
    match *tf {
        TestFunction::Gaussian { center, width, frequency } => {
            json!({ "gaussian": { "center": num(center), "width": num(width), "frequency": num(frequency) } })
        }
        TestFunction::Indicator { start, length } => json!({ "indicator": { "start": num(start), "length": num(length) } }),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub curve: PolyCurve,
    pub rejected: usize,
    pub weighted: RowResult,
    pub unweighted: RowResult,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
}

fn family_max(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    values.flatten().fold(None, |m, v| Some(m.map_or(v, |m: f64| m.max(v))))
}

impl Sweep {
    pub fn weighted_max(&self) -> Option<f64> {
        family_max(self.rows.iter().map(|r| r.weighted.ratio()))
    }

    pub fn unweighted_max(&self) -> Option<f64> {
        family_max(self.rows.iter().map(|r| r.unweighted.ratio()))
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.weighted.ratio().is_none() || r.unweighted.ratio().is_none()).count()
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                json!({
                    "index": i,
                    "exprs": r.curve.components().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                    "torsion": r.curve.torsion_poly().to_string(),
                    "rejected_draws": r.rejected,
                    "weighted": r.weighted.to_json(),
                    "unweighted": r.unweighted.to_json(),
                })
            })
            .collect();
        let opt = |v: Option<f64>| v.map_or(Value::Null, num);
        json!({
            "rows": rows,
            "family_max_weighted": opt(self.weighted_max()),
            "family_max_unweighted": opt(self.unweighted_max()),
            "failed_rows": self.failures(),
            "rejected_draws": self.rows.iter().map(|r| r.rejected).sum::<usize>(),
        })
    }
}

pub fn test_family(kind: FamilyKind) -> TestFamily {
    match kind {
        FamilyKind::Gaussian => TestFamily::Gaussian,
        FamilyKind::Indicator => TestFamily::Indicator,
        FamilyKind::Both => TestFamily::Both,
    }
}

/// Runs the weighted and the unweighted search on every curve. Curves are
/// spread over the executor; each search runs sequentially.
pub fn run<E: Executor>(exec: &E, family: &Family, grid: &GridConfig, search: &SearchConfig) -> Result<Sweep, crate::CliError> {
    let d = family.curves.first().map_or(2, PolyCurve::dim);
    let spec = GridSpec::cube(d, grid.half_width, grid.resolution, grid.nodes, grid.support())?;
    let kind = test_family(search.family);
    let one = |curve: &PolyCurve, weighted: bool| match norm_ratio_search(
        &Sequential,
        curve,
        search.p,
        search.q,
        &spec,
        kind,
        search.budget,
        weighted,
    ) {
        Ok(s) if s.lower_bound.is_finite() => RowResult::Ok(s),
        Ok(s) => RowResult::Failed { code: crate::EXIT_NUMERICAL, message: format!("non-finite ratio {}", s.lower_bound) },
        Err(e) => RowResult::Failed { code: exit_code(&e), message: e.to_string() },
    };
    let rows = exec.map(family.curves.len(), |i| {
        let curve = &family.curves[i];
        SweepRow { curve: curve.clone(), rejected: family.rejected[i], weighted: one(curve, true), unweighted: one(curve, false) }
    });
    Ok(Sweep { rows })
}
