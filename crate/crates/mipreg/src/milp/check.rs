//! Solution verification against the full model.

use super::model::{MilpModel, VarId, VarKind};
use super::{MilpError, FEASIBILITY_TOL, INTEGRALITY_TOL, SOS2_TOL};
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    Bounds { var: VarId },
    Linear { row: usize },
    Integrality { var: VarId },
    Sos2 { set: usize },
    QuadCap { cap: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub residual: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ViolationKind::Bounds { var } => write!(f, "bounds on x{}: {:e}", var, self.residual),
            ViolationKind::Linear { row } => write!(f, "row {}: {:e}", row, self.residual),
            ViolationKind::Integrality { var } => {
                write!(f, "integrality of x{}: {:e}", var, self.residual)
            }
            ViolationKind::Sos2 { set } => write!(f, "sos2 set {}: {:e}", set, self.residual),
            ViolationKind::QuadCap { cap } => write!(f, "quad cap {}: {:e}", cap, self.residual),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn worst(&self) -> f64 {
        self.violations
            .iter()
            .map(|v| v.residual)
            .fold(0.0, f64::max)
    }
}

/// Maximum weight of two adjacent members; the SOS2 residual is the mass
/// outside the best adjacent pair.
pub(crate) fn sos2_residual(members: &[VarId], values: &[f64]) -> f64 {
    let total: f64 = members.iter().map(|&id| values[id].max(0.0)).sum();
    let best_pair = members
        .windows(2)
        .map(|w| values[w[0]].max(0.0) + values[w[1]].max(0.0))
        .fold(0.0, f64::max);
    (total - best_pair).max(0.0)
}

/// Checks every constraint class of `model` at `values` and reports each
/// violation beyond its tolerance with the residual.
pub fn check_solution(model: &MilpModel, values: &[f64]) -> Result<ViolationReport, MilpError> {
    if values.len() != model.num_variables() {
        return Err(MilpError::WrongValueCount {
            expected: model.num_variables(),
            got: values.len(),
        });
    }
    let mut report = ViolationReport::default();

    for (id, var) in model.variables().iter().enumerate() {
        let below = var.lower - values[id];
        let above = values[id] - var.upper;
        let residual = below.max(above);
        if residual > FEASIBILITY_TOL {
            report.violations.push(Violation {
                kind: ViolationKind::Bounds { var: id },
                residual,
            });
        }
        if var.kind == VarKind::Binary {
            let frac = (values[id] - values[id].round()).abs();
            if frac > INTEGRALITY_TOL {
                report.violations.push(Violation {
                    kind: ViolationKind::Integrality { var: id },
                    residual: frac,
                });
            }
        }
    }

    for (row, cons) in model.constraints().iter().enumerate() {
        let residual = cons.violation(values);
        if residual > FEASIBILITY_TOL {
            report.violations.push(Violation {
                kind: ViolationKind::Linear { row },
                residual,
            });
        }
    }

    for (set, sos) in model.sos2_sets().iter().enumerate() {
        // Tiny values are noise, not activity.
        let filtered: Vec<f64> = sos
            .members
            .iter()
            .map(|&id| {
                if values[id].abs() > SOS2_TOL {
                    values[id]
                } else {
                    0.0
                }
            })
            .collect();
        let total: f64 = filtered.iter().map(|v| v.max(0.0)).sum();
        let best_pair = filtered
            .windows(2)
            .map(|w| w[0].max(0.0) + w[1].max(0.0))
            .fold(0.0, f64::max);
        let residual = (total - best_pair).max(0.0);
        if residual > SOS2_TOL {
            report.violations.push(Violation {
                kind: ViolationKind::Sos2 { set },
                residual,
            });
        }
    }

    for (cap_idx, cap) in model.quad_caps().iter().enumerate() {
        let residual = cap.violation(values);
        if residual > SOS2_TOL {
            report.violations.push(Violation {
                kind: ViolationKind::QuadCap { cap: cap_idx },
                residual,
            });
        }
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::model::Relation;

    #[test]
    fn violated_row_reported_with_residual() {
        let mut m = MilpModel::new();
        let x = m.add_continuous(0.0, 10.0).unwrap();
        m.add_linear(alloc::vec![(x, 1.0)], Relation::Le, 1.0).unwrap();
        let report = check_solution(&m, &[1.5]).unwrap();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].kind, ViolationKind::Linear { row: 0 });
        assert!((report.violations[0].residual - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sos2_adjacency_enforced() {
        let mut m = MilpModel::new();
        let ids: Vec<_> = (0..4).map(|_| m.add_continuous(0.0, 1.0).unwrap()).collect();
        m.add_sos2(ids).unwrap();
        // two adjacent nonzeros: clean
        assert!(check_solution(&m, &[0.3, 0.7, 0.0, 0.0]).unwrap().is_clean());
        // two non-adjacent nonzeros: violation equals the smaller mass
        let report = check_solution(&m, &[0.3, 0.0, 0.0, 0.7]).unwrap();
        assert_eq!(report.violations.len(), 1);
        assert!((report.violations[0].residual - 0.3).abs() < 1e-12);
    }

    #[test]
    fn report_matches_dense_reevaluation() {
        // Independent re-check: dense arithmetic straight from the model.
        let mut m = MilpModel::new();
        let x = m.add_continuous(-1.0, 1.0).unwrap();
        let y = m.add_continuous(-1.0, 1.0).unwrap();
        let b = m.add_binary().unwrap();
        m.add_linear(alloc::vec![(x, 2.0), (y, -1.0)], Relation::Ge, 0.5)
            .unwrap();
        m.add_linear(alloc::vec![(x, 1.0), (b, 1.0)], Relation::Eq, 1.0)
            .unwrap();
        m.add_quad_cap(
            alloc::vec![x, y],
            alloc::vec![1.0, 0.0, 0.0, 1.0],
            alloc::vec![0.0, 0.0],
            0.5,
        )
        .unwrap();

        let values = [0.9, 0.8, 0.4];
        let report = check_solution(&m, &values).unwrap();

        let mut expected = Vec::new();
        let r0 = 0.5 - (2.0 * values[0] - values[1]);
        if r0 > FEASIBILITY_TOL {
            expected.push(r0);
        }
        let r1 = (values[0] + values[2] - 1.0).abs();
        if r1 > FEASIBILITY_TOL {
            expected.push(r1);
        }
        let frac = (values[2] - values[2].round()).abs();
        if frac > INTEGRALITY_TOL {
            expected.push(frac);
        }
        let cap = values[0] * values[0] + values[1] * values[1] - 0.5;
        if cap > SOS2_TOL {
            expected.push(cap);
        }
        let mut got: Vec<f64> = report.violations.iter().map(|v| v.residual).collect();
        got.sort_by(f64::total_cmp);
        expected.sort_by(f64::total_cmp);
        assert_eq!(got.len(), expected.len());
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).abs() < 1e-12);
        }
    }
}
