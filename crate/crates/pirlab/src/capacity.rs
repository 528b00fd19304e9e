//! Closed-form capacities, bounds, and baseline comparisons, all as
//! exact rationals.
//!
//! Two of the built-in settings have an exactly known capacity
//! (modified-edge on paths, two-sided neighborhoods on cycles); the rest
//! carry lower bounds, two of them sandwiched by an upper bound. The
//! [`sweep`] operation cross-checks every closed form against the rate
//! the planner actually achieves, symbol counted by [`measure_rate`] —
//! two independent routes to the same number.

use num_rational::Ratio;
use serde::Serialize;

use crate::audit::measure_rate;
use crate::error::{Error, Result};
use crate::model::{PrivacySetting, StorageGraph};
use crate::Rational;

/// How to read a [`CapacityValue`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Exact,
    LowerBound,
    UpperBound,
}

/// A capacity statement: an exact value, a one-sided bound, or a
/// two-sided sandwich (`value` is then the lower end and `companion` the
/// upper).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CapacityValue {
    pub value: Rational,
    pub kind: BoundKind,
    pub companion: Option<Rational>,
}

impl CapacityValue {
    pub fn exact(value: Rational) -> Self {
        CapacityValue {
            value,
            kind: BoundKind::Exact,
            companion: None,
        }
    }

    pub fn lower(value: Rational) -> Self {
        CapacityValue {
            value,
            kind: BoundKind::LowerBound,
            companion: None,
        }
    }

    pub fn sandwich(lower: Rational, upper: Rational) -> Self {
        assert!(lower <= upper, "two-sided bounds must be ordered");
        CapacityValue {
            value: lower,
            kind: BoundKind::LowerBound,
            companion: Some(upper),
        }
    }

    /// The rate the built-in scheme is expected to achieve: the exact
    /// capacity when known, otherwise the lower bound.
    pub fn achievable(&self) -> Rational {
        self.value
    }

    /// Renders like `3/5`, `>= 1/3`, or `2/5 <= C <= 1/2`.
    pub fn render(&self) -> String {
        match (self.kind, self.companion) {
            (BoundKind::Exact, _) => format!("{}", self.value),
            (BoundKind::LowerBound, Some(upper)) => {
                format!("{} <= C <= {}", self.value, upper)
            }
            (BoundKind::LowerBound, None) => format!(">= {}", self.value),
            (BoundKind::UpperBound, _) => format!("<= {}", self.value),
        }
    }
}

fn rat(n: i64, d: i64) -> Rational {
    Ratio::new(n, d)
}

/// The capacity statement for a setting on a graph with `N` servers.
///
/// Parameters must lie in the same accepted ranges as the planner's; the
/// graph is built internally to reuse that validation.
pub fn capacity_bound(setting: &PrivacySetting, n: u32) -> Result<CapacityValue> {
    let graph = StorageGraph::build(setting.graph_kind(), n)?;
    setting.validate(&graph)?;
    let n = n as i64;
    Ok(match *setting {
        PrivacySetting::PathModifiedEdge => CapacityValue::exact(rat(n - 1, 2 * n - 3)),
        PrivacySetting::PathOneSidedH { h } => {
            let h = h as i64;
            let denom = (h + 2) * (h + 1) / 2 + 3 * h + 5 + (h + 4) * (n - h - 3);
            CapacityValue::lower(rat(2 * (n - 1), denom))
        }
        PrivacySetting::PathTwoSidedH { h } | PrivacySetting::PathTwoSidedHModEdge { h } => {
            let h = h as i64;
            CapacityValue::lower(rat(2 * (n - 1), (h + 2) * (2 * n - h - 3)))
        }
        PrivacySetting::CyclicFirstNeighbor => CapacityValue::sandwich(rat(2, 5), rat(1, 2)),
        PrivacySetting::CyclicIthNeighbor { .. } => CapacityValue::sandwich(rat(1, 3), rat(2, 5)),
        PrivacySetting::CyclicOneSidedH { h } => CapacityValue::lower(rat(2, h as i64 + 4)),
        PrivacySetting::CyclicTwoSidedH { h } => CapacityValue::exact(rat(1, h as i64 + 2)),
    })
}

/// Reference capacities this library compares against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    /// Full privacy against every server, path storage.
    PirPath,
    /// Full privacy against every server, cyclic storage.
    PirCycle,
    /// Privacy only against storing servers, path storage.
    LpirPath,
    /// Privacy only against storing servers, cyclic storage.
    LpirCycle,
}

/// Known baseline capacities.
///
/// `LpirPath` is exactly known only for odd `N`; for even `N` the best
/// published statement is a lower bound, and the returned kind says so.
pub fn baseline(name: Baseline, n: u32) -> Result<CapacityValue> {
    let min = match name {
        Baseline::PirPath | Baseline::LpirPath => 3,
        Baseline::PirCycle | Baseline::LpirCycle => 4,
    };
    if n < min {
        return Err(Error::ParameterRange(format!(
            "baseline {name:?} needs N >= {min}, got {n}"
        )));
    }
    let n = n as i64;
    Ok(match name {
        Baseline::PirPath => CapacityValue::exact(rat(2, n)),
        Baseline::PirCycle => CapacityValue::exact(rat(2, n + 1)),
        Baseline::LpirCycle => CapacityValue::exact(rat(1, 2)),
        Baseline::LpirPath => {
            if n % 2 == 1 {
                CapacityValue::exact(rat(n - 1, 2 * n - 4))
            } else {
                CapacityValue::lower(rat(n - 1, 2 * n - 3))
            }
        }
    })
}

/// One cell of a capacity sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub setting: String,
    pub n: u32,
    pub param: Option<u32>,
    pub bound: Option<CapacityValue>,
    pub measured: Option<Rational>,
    /// True when the measured rate equals the stated achievable rate.
    pub matches: Option<bool>,
    /// Populated instead of the other fields when the cell's parameters
    /// are rejected.
    pub skipped: Option<String>,
}

/// Evaluates the closed form and the measured rate for every requested
/// `(setting, N)` cell. Cells with rejected parameters are marked
/// skipped rather than failing the sweep.
pub fn sweep(cells: impl IntoIterator<Item = (PrivacySetting, u32)>) -> Vec<SweepRow> {
    cells
        .into_iter()
        .map(|(setting, n)| match sweep_cell(&setting, n) {
            Ok(row) => row,
            Err(err) => SweepRow {
                setting: setting.name().into(),
                n,
                param: setting.param(),
                bound: None,
                measured: None,
                matches: None,
                skipped: Some(err.to_string()),
            },
        })
        .collect()
}

fn sweep_cell(setting: &PrivacySetting, n: u32) -> Result<SweepRow> {
    let graph = StorageGraph::build(setting.graph_kind(), n)?;
    let bound = capacity_bound(setting, n)?;
    let measured = measure_rate(setting, &graph)?.rate;
    Ok(SweepRow {
        setting: setting.name().into(),
        n,
        param: setting.param(),
        bound: Some(bound),
        measured: Some(measured),
        matches: Some(measured == bound.achievable()),
        skipped: None,
    })
}

/// CSV rendering of a sweep, one header plus one line per row.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "setting,n,param,bound_kind,bound_num,bound_den,upper_num,upper_den,\
         measured_num,measured_den,match\n",
    );
    for row in rows {
        let param = row.param.map(|p| p.to_string()).unwrap_or_default();
        if let Some(reason) = &row.skipped {
            out.push_str(&format!(
                "{},{},{},skipped,,,,,,,\"{}\"\n",
                row.setting, row.n, param, reason
            ));
            continue;
        }
        let bound = row.bound.expect("bound present when not skipped");
        let kind = match bound.kind {
            BoundKind::Exact => "exact",
            BoundKind::LowerBound => "lower",
            BoundKind::UpperBound => "upper",
        };
        let (un, ud) = bound
            .companion
            .map(|u| (u.numer().to_string(), u.denom().to_string()))
            .unwrap_or_default();
        let measured = row.measured.expect("measured present when not skipped");
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            row.setting,
            row.n,
            param,
            kind,
            bound.value.numer(),
            bound.value.denom(),
            un,
            ud,
            measured.numer(),
            measured.denom(),
            row.matches.unwrap_or(false),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_capacity_values() {
        let c = capacity_bound(&PrivacySetting::PathModifiedEdge, 4).unwrap();
        assert_eq!(c.kind, BoundKind::Exact);
        assert_eq!(c.value, rat(3, 5));

        let c = capacity_bound(&PrivacySetting::CyclicTwoSidedH { h: 0 }, 7).unwrap();
        assert_eq!(c.kind, BoundKind::Exact);
        assert_eq!(c.value, rat(1, 2));

        let c = capacity_bound(&PrivacySetting::PathTwoSidedH { h: 2 }, 7).unwrap();
        assert_eq!(c.kind, BoundKind::LowerBound);
        assert_eq!(c.value, rat(1, 3)); // 12/36

        let c = capacity_bound(&PrivacySetting::CyclicFirstNeighbor, 6).unwrap();
        assert_eq!((c.value, c.companion), (rat(2, 5), Some(rat(1, 2))));
        assert_eq!(c.render(), "2/5 <= C <= 1/2");
    }

    #[test]
    fn out_of_range_parameters_are_rejected() {
        assert!(capacity_bound(&PrivacySetting::PathTwoSidedH { h: 5 }, 6).is_err());
        assert!(capacity_bound(&PrivacySetting::CyclicIthNeighbor { i: 5 }, 7).is_err());
    }

    #[test]
    fn baseline_values() {
        assert_eq!(baseline(Baseline::PirCycle, 5).unwrap().value, rat(1, 3));
        assert_eq!(baseline(Baseline::PirPath, 4).unwrap().value, rat(1, 2));
        let odd = baseline(Baseline::LpirPath, 5).unwrap();
        assert_eq!((odd.kind, odd.value), (BoundKind::Exact, rat(2, 3)));
        let even = baseline(Baseline::LpirPath, 6).unwrap();
        assert_eq!((even.kind, even.value), (BoundKind::LowerBound, rat(5, 9)));
        assert_eq!(baseline(Baseline::LpirCycle, 9).unwrap().value, rat(1, 2));
    }

    #[test]
    fn ordering_relations_hold() {
        // Modified-edge beats full-privacy path retrieval for N >= 4.
        for n in 4..=12i64 {
            assert!(rat(n - 1, 2 * n - 3) > rat(2, n));
        }
        // Local privacy beats modified-edge for odd N.
        for n in (5..=11i64).step_by(2) {
            assert!(rat(n - 1, 2 * n - 4) > rat(n - 1, 2 * n - 3));
        }
        // First-neighbor lower bound beats full cyclic privacy for N >= 5.
        for n in 5..=12i64 {
            assert!(rat(2, 5) > rat(2, n + 1));
        }
    }

    #[test]
    fn boundary_reductions() {
        // Two-sided path at h = 0 reduces to the modified-edge capacity.
        for n in 5..=10u32 {
            let two_sided = capacity_bound(&PrivacySetting::PathTwoSidedHModEdge { h: 0 }, n)
                .unwrap()
                .value;
            let edge = capacity_bound(&PrivacySetting::PathModifiedEdge, n)
                .unwrap()
                .value;
            assert_eq!(two_sided, edge);
        }
        // Two-sided path at h = N-3 reaches the full-privacy baseline.
        for n in 5..=10u32 {
            let b = capacity_bound(&PrivacySetting::PathTwoSidedH { h: n - 3 }, n)
                .unwrap()
                .value;
            assert_eq!(b, baseline(Baseline::PirPath, n).unwrap().value);
        }
        // One-sided cycle at h = N-3 reaches the full-privacy baseline.
        for n in 5..=10u32 {
            let b = capacity_bound(&PrivacySetting::CyclicOneSidedH { h: n - 3 }, n)
                .unwrap()
                .value;
            assert_eq!(b, baseline(Baseline::PirCycle, n).unwrap().value);
        }
    }

    #[test]
    fn sweep_matches_measured_rates() {
        let cells = (5..=9u32).flat_map(|n| {
            (0..=(n - 3) / 2).map(move |h| (PrivacySetting::CyclicTwoSidedH { h }, n))
        });
        for row in sweep(cells) {
            assert_eq!(row.matches, Some(true), "N={} {:?}", row.n, row.param);
            let h = row.param.unwrap() as i64;
            assert_eq!(row.measured, Some(rat(1, h + 2)));
        }
    }

    #[test]
    fn sweep_marks_rejected_cells_skipped() {
        let rows = sweep([
            (PrivacySetting::CyclicFirstNeighbor, 4),
            (PrivacySetting::CyclicFirstNeighbor, 5),
        ]);
        assert!(rows[0].skipped.is_some());
        assert!(rows[1].skipped.is_none());
    }

    #[test]
    fn csv_has_stable_header_and_shape() {
        let rows = sweep([
            (PrivacySetting::PathModifiedEdge, 4),
            (PrivacySetting::PathModifiedEdge, 5),
        ]);
        let csv = sweep_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "setting,n,param,bound_kind,bound_num,bound_den,upper_num,upper_den,\
             measured_num,measured_den,match"
        );
        assert_eq!(lines.next().unwrap(), "modified-edge,4,,exact,3,5,,,3,5,true");
    }
}
