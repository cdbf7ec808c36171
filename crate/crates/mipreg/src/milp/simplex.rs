//! Bounded-variable revised simplex with lazy row activation.
//!
//! The node LPs of the registration models carry thousands of big-M rows
//! of which only a handful are ever binding, so the solver keeps a
//! working subset of rows and activates the rest on violation (or along
//! an unbounded ray). Each working LP is solved by a primal simplex over
//! general bounds with a two-phase artificial start, Dantzig pricing and
//! a Bland's-rule fallback for anti-cycling.

use super::model::{LinearConstraint, MilpModel, Relation};
use super::{MilpError, FEASIBILITY_TOL};
use alloc::vec::Vec;
use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

/// Solution of an LP relaxation.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

/// Reduced-cost and ratio tolerances.
const COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
/// Refactorize the basis inverse after this many pivots.
const REFACTOR_EVERY: usize = 120;
/// Consecutive degenerate pivots before switching to Bland's rule.
const STALL_LIMIT: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
enum ColumnState {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Free variable resting at zero.
    FreeAtZero,
}

/// One column of the working LP: sparse rows plus bounds and cost.
struct Column {
    entries: Vec<(usize, f64)>,
    lower: f64,
    upper: f64,
    cost: f64,
    phase1_cost: f64,
    artificial: bool,
}

pub(crate) struct RowData<'a> {
    pub terms: &'a [(usize, f64)],
    pub relation: Relation,
    pub rhs: f64,
}

/// Solves `min cᵀx + const` over `bounds` subject to `rows`, activating
/// rows lazily. `rows` is the full candidate set.
pub(crate) fn solve_lp(
    bounds: &[(f64, f64)],
    objective: &[(usize, f64)],
    objective_constant: f64,
    rows: &[RowData<'_>],
) -> Result<LpOutcome, MilpError> {
    for &(lo, hi) in bounds {
        if lo > hi {
            return Ok(LpOutcome::Infeasible);
        }
    }

    // Start with the equality rows; they are almost always binding.
    let mut active: Vec<usize> = (0..rows.len())
        .filter(|&i| rows[i].relation == Relation::Eq)
        .collect();
    let mut is_active: Vec<bool> = alloc::vec![false; rows.len()];
    for &i in &active {
        is_active[i] = true;
    }

    loop {
        let outcome = solve_working(bounds, objective, rows, &active)?;
        match outcome {
            WorkingOutcome::Infeasible => return Ok(LpOutcome::Infeasible),
            WorkingOutcome::Optimal(values) => {
                let mut added = false;
                let mut violated: Vec<(f64, usize)> = Vec::new();
                for (i, row) in rows.iter().enumerate() {
                    if is_active[i] {
                        continue;
                    }
                    let v = row_violation(row, &values);
                    if v > FEASIBILITY_TOL * 0.1 {
                        violated.push((v, i));
                    }
                }
                violated.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
                for &(_, i) in violated.iter().take(256) {
                    active.push(i);
                    is_active[i] = true;
                    added = true;
                }
                if !added {
                    let objective_value = objective
                        .iter()
                        .map(|&(id, c)| c * values[id])
                        .sum::<f64>()
                        + objective_constant;
                    return Ok(LpOutcome::Optimal(LpSolution {
                        values,
                        objective: objective_value,
                    }));
                }
            }
            WorkingOutcome::Unbounded { values, ray } => {
                // Activate rows the ray will eventually violate.
                let mut added = false;
                for (i, row) in rows.iter().enumerate() {
                    if is_active[i] {
                        continue;
                    }
                    let slope: f64 = row.terms.iter().map(|&(id, c)| c * ray[id]).sum();
                    let against = match row.relation {
                        Relation::Le => slope > 1e-9,
                        Relation::Ge => slope < -1e-9,
                        Relation::Eq => slope.abs() > 1e-9,
                    };
                    if against || row_violation(row, &values) > FEASIBILITY_TOL * 0.1 {
                        active.push(i);
                        is_active[i] = true;
                        added = true;
                    }
                }
                if !added {
                    return Ok(LpOutcome::Unbounded);
                }
            }
        }
    }
}

fn row_violation(row: &RowData<'_>, values: &[f64]) -> f64 {
    let lhs: f64 = row.terms.iter().map(|&(id, c)| c * values[id]).sum();
    match row.relation {
        Relation::Le => lhs - row.rhs,
        Relation::Ge => row.rhs - lhs,
        Relation::Eq => (lhs - row.rhs).abs(),
    }
}

enum WorkingOutcome {
    Optimal(Vec<f64>),
    Infeasible,
    Unbounded { values: Vec<f64>, ray: Vec<f64> },
}

struct Tableau {
    columns: Vec<Column>,
    n_structural: usize,
    m: usize,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<ColumnState>,
    values: Vec<f64>,
    binv: Vec<f64>, // row-major m×m
    pivots_since_refactor: usize,
}

impl Tableau {
    fn binv_row(&self, r: usize) -> &[f64] {
        &self.binv[r * self.m..(r + 1) * self.m]
    }

    /// w = B⁻¹ · a_col for a sparse column.
    fn ftran(&self, entries: &[(usize, f64)]) -> Vec<f64> {
        let mut w = alloc::vec![0.0; self.m];
        for &(row, coef) in entries {
            for i in 0..self.m {
                w[i] += self.binv[i * self.m + row] * coef;
            }
        }
        w
    }

    /// y = (B⁻¹)ᵀ · c_B.
    fn btran(&self, cb: &[f64]) -> Vec<f64> {
        let mut y = alloc::vec![0.0; self.m];
        for i in 0..self.m {
            let ci = cb[i];
            if ci != 0.0 {
                let row = self.binv_row(i);
                for j in 0..self.m {
                    y[j] += ci * row[j];
                }
            }
        }
        y
    }

    /// Recompute basic values from scratch: x_B = B⁻¹(b − N·x_N).
    fn recompute_basics(&mut self) {
        let mut residual = self.rhs.clone();
        for (j, col) in self.columns.iter().enumerate() {
            if let ColumnState::Basic(_) = self.state[j] {
                continue;
            }
            let xj = self.values[j];
            if xj != 0.0 {
                for &(r, c) in &col.entries {
                    residual[r] -= c * xj;
                }
            }
        }
        let mut xb = alloc::vec![0.0; self.m];
        for i in 0..self.m {
            let row = self.binv_row(i);
            let mut acc = 0.0;
            for (r, &res) in residual.iter().enumerate() {
                acc += row[r] * res;
            }
            xb[i] = acc;
        }
        for i in 0..self.m {
            self.values[self.basis[i]] = xb[i];
        }
    }

    /// Rebuild B⁻¹ by factorizing the current basis matrix.
    fn refactorize(&mut self) -> Result<(), MilpError> {
        let m = self.m;
        let mut bmat = DMatrix::<f64>::zeros(m, m);
        for (i, &j) in self.basis.iter().enumerate() {
            for &(r, c) in &self.columns[j].entries {
                bmat[(r, i)] = c;
            }
        }
        let inv = bmat.try_inverse().ok_or(MilpError::NumericalFailure)?;
        for r in 0..m {
            for c in 0..m {
                self.binv[r * m + c] = inv[(r, c)];
            }
        }
        self.pivots_since_refactor = 0;
        self.recompute_basics();
        Ok(())
    }

    /// Rank-one update of B⁻¹ after column `entering` replaces the basic
    /// variable in pivot row `r`, with direction vector `w = B⁻¹a_q`.
    fn update_binv(&mut self, r: usize, w: &[f64]) {
        let m = self.m;
        let wr = w[r];
        let pivot_row: Vec<f64> = self.binv_row(r).iter().map(|v| v / wr).collect();
        for i in 0..m {
            if i == r {
                continue;
            }
            let wi = w[i];
            if wi.abs() > 1e-300 {
                for j in 0..m {
                    self.binv[i * m + j] -= wi * pivot_row[j];
                }
            }
        }
        self.binv[r * m..(r + 1) * m].copy_from_slice(&pivot_row);
        self.pivots_since_refactor += 1;
    }
}

fn solve_working(
    bounds: &[(f64, f64)],
    objective: &[(usize, f64)],
    rows: &[RowData<'_>],
    active: &[usize],
) -> Result<WorkingOutcome, MilpError> {
    let n = bounds.len();
    let m = active.len();

    // Structural columns.
    let mut columns: Vec<Column> = Vec::with_capacity(n + m);
    let mut cost = alloc::vec![0.0; n];
    for &(id, c) in objective {
        cost[id] += c;
    }
    let mut col_rows: Vec<Vec<(usize, f64)>> = alloc::vec![Vec::new(); n];
    for (local, &gi) in active.iter().enumerate() {
        for &(id, c) in rows[gi].terms {
            if c != 0.0 {
                col_rows[id].push((local, c));
            }
        }
    }
    for j in 0..n {
        columns.push(Column {
            entries: core::mem::take(&mut col_rows[j]),
            lower: bounds[j].0,
            upper: bounds[j].1,
            cost: cost[j],
            phase1_cost: 0.0,
            artificial: false,
        });
    }
    // Slack columns: a·x + s = b with bounds by relation.
    let mut rhs = alloc::vec![0.0; m];
    for (local, &gi) in active.iter().enumerate() {
        rhs[local] = rows[gi].rhs;
        let (lo, hi) = match rows[gi].relation {
            Relation::Le => (0.0, f64::INFINITY),
            Relation::Ge => (f64::NEG_INFINITY, 0.0),
            Relation::Eq => (0.0, 0.0),
        };
        columns.push(Column {
            entries: alloc::vec![(local, 1.0)],
            lower: lo,
            upper: hi,
            cost: 0.0,
            phase1_cost: 0.0,
            artificial: false,
        });
    }

    if m == 0 {
        // Pure box problem: every variable sits at its favorable bound.
        let mut values = alloc::vec![0.0; n];
        for j in 0..n {
            let c = columns[j].cost;
            let v = if c > 0.0 {
                columns[j].lower
            } else if c < 0.0 {
                columns[j].upper
            } else if columns[j].lower.is_finite() {
                columns[j].lower
            } else if columns[j].upper.is_finite() {
                columns[j].upper
            } else {
                0.0
            };
            if !v.is_finite() {
                let mut ray = alloc::vec![0.0; n];
                ray[j] = if c > 0.0 { -1.0 } else { 1.0 };
                let mut at = alloc::vec![0.0; n];
                for k in 0..n {
                    at[k] = finite_start(&columns[k]);
                }
                return Ok(WorkingOutcome::Unbounded { values: at, ray });
            }
            values[j] = v;
        }
        return Ok(WorkingOutcome::Optimal(values));
    }

    // Initial point: structural variables at a finite bound (or zero),
    // slacks basic where the residual fits their bounds, artificials
    // otherwise.
    let mut values = alloc::vec![0.0; columns.len()];
    let mut state = alloc::vec![ColumnState::AtLower; columns.len()];
    for j in 0..n {
        let v = finite_start(&columns[j]);
        values[j] = v;
        state[j] = start_state(&columns[j]);
    }

    let mut residual = rhs.clone();
    for j in 0..n {
        if values[j] != 0.0 {
            for &(r, c) in &columns[j].entries {
                residual[r] -= c * values[j];
            }
        }
    }

    let mut basis = alloc::vec![usize::MAX; m];
    let mut need_artificial: Vec<usize> = Vec::new();
    for i in 0..m {
        let slack = n + i;
        let fits = residual[i] >= columns[slack].lower - 1e-12
            && residual[i] <= columns[slack].upper + 1e-12;
        if fits {
            basis[i] = slack;
            state[slack] = ColumnState::Basic(i);
            values[slack] = residual[i];
        } else {
            // Slack rests at the bound nearest the residual.
            let s = residual[i].clamp(columns[slack].lower, columns[slack].upper);
            let s = if s.is_finite() { s } else { 0.0 };
            values[slack] = s;
            state[slack] = if s == columns[slack].lower {
                ColumnState::AtLower
            } else {
                ColumnState::AtUpper
            };
            need_artificial.push(i);
        }
    }
    let mut any_artificial = false;
    // The initial basis is diagonal (slacks +1, artificials ±1), so its
    // inverse is the same diagonal.
    let mut binv = identity(m);
    for &i in &need_artificial {
        let slack = n + i;
        let gap = residual[i] - values[slack];
        let sign = if gap >= 0.0 { 1.0 } else { -1.0 };
        columns.push(Column {
            entries: alloc::vec![(i, sign)],
            lower: 0.0,
            upper: f64::INFINITY,
            cost: 0.0,
            phase1_cost: 1.0,
            artificial: true,
        });
        let id = columns.len() - 1;
        values.push(gap.abs());
        state.push(ColumnState::Basic(i));
        basis[i] = id;
        binv[i * m + i] = sign;
        any_artificial = true;
    }

    let mut tab = Tableau {
        n_structural: n,
        m,
        rhs,
        columns,
        basis,
        state,
        values,
        binv,
        pivots_since_refactor: 0,
    };

    if any_artificial {
        match simplex_phase(&mut tab, Phase::One)? {
            PhaseOutcome::Optimal => {
                let infeasibility: f64 = tab
                    .columns
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.artificial)
                    .map(|(j, _)| tab.values[j].max(0.0))
                    .sum();
                if infeasibility > FEASIBILITY_TOL {
                    return Ok(WorkingOutcome::Infeasible);
                }
                // Freeze artificials at zero for phase 2.
                for (j, col) in tab.columns.iter_mut().enumerate() {
                    if col.artificial {
                        col.lower = 0.0;
                        col.upper = 0.0;
                        if !matches!(tab.state[j], ColumnState::Basic(_)) {
                            tab.values[j] = 0.0;
                            tab.state[j] = ColumnState::AtLower;
                        }
                    }
                }
            }
            PhaseOutcome::Unbounded(_) => return Err(MilpError::NumericalFailure),
        }
    }

    match simplex_phase(&mut tab, Phase::Two)? {
        PhaseOutcome::Optimal => {
            let values = tab.values[..n].to_vec();
            Ok(WorkingOutcome::Optimal(values))
        }
        PhaseOutcome::Unbounded(ray) => Ok(WorkingOutcome::Unbounded {
            values: tab.values[..n].to_vec(),
            ray: ray[..n].to_vec(),
        }),
    }
}

fn finite_start(col: &Column) -> f64 {
    if col.lower.is_finite() {
        col.lower
    } else if col.upper.is_finite() {
        col.upper
    } else {
        0.0
    }
}

fn start_state(col: &Column) -> ColumnState {
    if col.lower.is_finite() {
        ColumnState::AtLower
    } else if col.upper.is_finite() {
        ColumnState::AtUpper
    } else {
        ColumnState::FreeAtZero
    }
}

fn identity(m: usize) -> Vec<f64> {
    let mut out = alloc::vec![0.0; m * m];
    for i in 0..m {
        out[i * m + i] = 1.0;
    }
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Phase {
    One,
    Two,
}

enum PhaseOutcome {
    Optimal,
    Unbounded(Vec<f64>),
}

fn simplex_phase(tab: &mut Tableau, phase: Phase) -> Result<PhaseOutcome, MilpError> {
    let total_cols = tab.columns.len();
    let iteration_cap = 5000 + 80 * (tab.m + total_cols);
    let mut bland = false;
    let mut stall = 0usize;

    for _iter in 0..iteration_cap {
        if tab.pivots_since_refactor >= REFACTOR_EVERY {
            tab.refactorize()?;
        }
        // Reduced costs: d_j = c_j − y·a_j with y = (B⁻¹)ᵀ c_B.
        let cb: Vec<f64> = (0..tab.m)
            .map(|i| column_cost(&tab.columns[tab.basis[i]], phase))
            .collect();
        let y = tab.btran(&cb);

        // Entering-variable selection: Dantzig (largest violation), or
        // first eligible index under Bland's rule.
        let mut entering: Option<(usize, f64, f64)> = None; // (col, d, direction)
        for j in 0..total_cols {
            let st = tab.state[j];
            if matches!(st, ColumnState::Basic(_)) {
                continue;
            }
            let col = &tab.columns[j];
            if col.lower == col.upper {
                continue; // fixed (includes frozen artificials)
            }
            let mut d = column_cost(col, phase);
            for &(r, c) in &col.entries {
                d -= y[r] * c;
            }
            let dir = match st {
                ColumnState::AtLower => {
                    if d < -COST_TOL {
                        1.0
                    } else {
                        continue;
                    }
                }
                ColumnState::AtUpper => {
                    if d > COST_TOL {
                        -1.0
                    } else {
                        continue;
                    }
                }
                ColumnState::FreeAtZero => {
                    if d < -COST_TOL {
                        1.0
                    } else if d > COST_TOL {
                        -1.0
                    } else {
                        continue;
                    }
                }
                ColumnState::Basic(_) => unreachable!(),
            };
            if bland {
                entering = Some((j, d, dir));
                break;
            }
            match entering {
                Some((_, best, _)) if d.abs() <= best.abs() => {}
                _ => entering = Some((j, d, dir)),
            }
        }

        let Some((q, _dq, dir)) = entering else {
            return Ok(PhaseOutcome::Optimal);
        };

        let w = tab.ftran(&tab.columns[q].entries);

        // Ratio test: largest step t ≥ 0 for x_q along `dir` before any
        // basic variable (or x_q itself) hits a bound.
        let own_range = tab.columns[q].upper - tab.columns[q].lower;
        let mut t_best = if own_range.is_finite() {
            own_range
        } else {
            f64::INFINITY
        };
        let mut leaving: Option<(usize, f64)> = None; // (row, |pivot|)
        for i in 0..tab.m {
            let wi = w[i];
            if wi.abs() <= PIVOT_TOL {
                continue;
            }
            let bi = tab.basis[i];
            let xb = tab.values[bi];
            let rate = -dir * wi; // dx_B(i)/dt
            let limit = if rate > 0.0 {
                let ub = tab.columns[bi].upper;
                if !ub.is_finite() {
                    continue;
                }
                (ub - xb) / rate
            } else {
                let lb = tab.columns[bi].lower;
                if !lb.is_finite() {
                    continue;
                }
                (xb - lb) / -rate
            };
            let limit = limit.max(0.0);
            let take = if limit < t_best - 1e-12 {
                true
            } else if limit <= t_best + 1e-10 {
                match leaving {
                    None => limit <= t_best,
                    Some((li, lp)) => {
                        if bland {
                            tab.basis[i] < tab.basis[li]
                        } else {
                            wi.abs() > lp
                        }
                    }
                }
            } else {
                false
            };
            if take {
                t_best = t_best.min(limit);
                leaving = Some((i, wi.abs()));
            }
        }

        if t_best.is_infinite() {
            // Unbounded: report the improving ray over all columns.
            let mut ray = alloc::vec![0.0; total_cols];
            ray[q] = dir;
            for i in 0..tab.m {
                if w[i].abs() > PIVOT_TOL {
                    ray[tab.basis[i]] = -dir * w[i];
                }
            }
            return Ok(PhaseOutcome::Unbounded(ray));
        }

        if t_best <= 1e-12 {
            stall += 1;
            if stall > STALL_LIMIT {
                bland = true;
            }
        } else {
            stall = 0;
            bland = false;
        }

        let do_flip = own_range.is_finite() && t_best >= own_range - 1e-12;
        let t = t_best;
        for i in 0..tab.m {
            let bi = tab.basis[i];
            tab.values[bi] -= dir * t * w[i];
        }
        if do_flip {
            // Bound flip: x_q crosses to its other bound; no basis change.
            let (lo, hi) = (tab.columns[q].lower, tab.columns[q].upper);
            if dir > 0.0 {
                tab.values[q] = hi;
                tab.state[q] = ColumnState::AtUpper;
            } else {
                tab.values[q] = lo;
                tab.state[q] = ColumnState::AtLower;
            }
        } else {
            let (r, _) = leaving.expect("finite non-flip step must have a leaving row");
            let old = tab.basis[r];
            let (old_lo, old_hi) = (tab.columns[old].lower, tab.columns[old].upper);
            // Departing variable rests at the bound it hit.
            let hit_upper = -dir * w[r] > 0.0;
            tab.values[old] = if hit_upper { old_hi } else { old_lo };
            tab.state[old] = if hit_upper {
                ColumnState::AtUpper
            } else {
                ColumnState::AtLower
            };
            let new_value = start_value_after_move(tab, q, dir, t);
            tab.values[q] = new_value;
            tab.state[q] = ColumnState::Basic(r);
            tab.basis[r] = q;
            tab.update_binv(r, &w);
        }
    }
    Err(MilpError::NumericalFailure)
}

fn start_value_after_move(tab: &Tableau, q: usize, dir: f64, t: f64) -> f64 {
    let col = &tab.columns[q];
    let from = match tab.state[q] {
        ColumnState::AtLower => col.lower,
        ColumnState::AtUpper => col.upper,
        ColumnState::FreeAtZero => 0.0,
        ColumnState::Basic(_) => tab.values[q],
    };
    from + dir * t
}

fn column_cost(col: &Column, phase: Phase) -> f64 {
    match phase {
        Phase::One => col.phase1_cost,
        Phase::Two => col.cost,
    }
}

/// Solves the LP relaxation of `model`: binaries relaxed to their box,
/// SOS2 conditions dropped, quadratic caps ignored (they are only
/// enforced through accumulated cuts during branch and bound).
pub fn solve_lp_relaxation(model: &MilpModel) -> Result<LpOutcome, MilpError> {
    let bounds: Vec<(f64, f64)> = model
        .variables()
        .iter()
        .map(|v| (v.lower, v.upper))
        .collect();
    let rows: Vec<RowData<'_>> = model
        .constraints()
        .iter()
        .map(|c| RowData {
            terms: c.expr.terms(),
            relation: c.relation,
            rhs: c.rhs,
        })
        .collect();
    let (obj, constant) = model.objective();
    solve_lp(&bounds, obj.terms(), constant, &rows)
}

/// Like [`solve_lp_relaxation`] but with per-variable bound overrides and
/// extra rows (branching state and cut pool); used by branch and bound.
pub(crate) fn solve_lp_with(
    model: &MilpModel,
    bounds: &[(f64, f64)],
    extra_rows: &[LinearConstraint],
) -> Result<LpOutcome, MilpError> {
    let mut rows: Vec<RowData<'_>> = Vec::with_capacity(model.constraints().len() + extra_rows.len());
    for c in model.constraints() {
        rows.push(RowData {
            terms: c.expr.terms(),
            relation: c.relation,
            rhs: c.rhs,
        });
    }
    for c in extra_rows {
        rows.push(RowData {
            terms: c.expr.terms(),
            relation: c.relation,
            rhs: c.rhs,
        });
    }
    let (obj, constant) = model.objective();
    solve_lp(bounds, obj.terms(), constant, &rows)
}
