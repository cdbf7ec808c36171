//! Sparse MILP model and builder operations.

use super::MilpError;
use alloc::vec::Vec;

pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variable {
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// A sparse linear expression; terms are sorted by variable id with
/// duplicates merged and exact zeros dropped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearExpr {
    terms: Vec<(VarId, f64)>,
}

impl LinearExpr {
    pub fn new(mut terms: Vec<(VarId, f64)>) -> Self {
        terms.sort_by_key(|&(id, _)| id);
        let mut merged: Vec<(VarId, f64)> = Vec::with_capacity(terms.len());
        for (id, coef) in terms {
            match merged.last_mut() {
                Some((last, c)) if *last == id => *c += coef,
                _ => merged.push((id, coef)),
            }
        }
        merged.retain(|&(_, c)| c != 0.0);
        Self { terms: merged }
    }

    pub fn terms(&self) -> &[(VarId, f64)] {
        &self.terms
    }

    pub fn evaluate(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(id, c)| c * values[id]).sum()
    }

    fn max_var(&self) -> Option<VarId> {
        self.terms.last().map(|&(id, _)| id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub expr: LinearExpr,
    pub relation: Relation,
    pub rhs: f64,
}

impl LinearConstraint {
    /// Signed violation of the constraint at `values`; positive means
    /// infeasible by that amount.
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.expr.evaluate(values);
        match self.relation {
            Relation::Le => lhs - self.rhs,
            Relation::Ge => self.rhs - lhs,
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// Convex quadratic constraint `‖A·x_sub + b‖₂² ≤ c` over the variable
/// subset `vars`. `matrix` is row-major with `offset.len()` rows and
/// `vars.len()` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadCap {
    pub vars: Vec<VarId>,
    pub matrix: Vec<f64>,
    pub offset: Vec<f64>,
    pub bound: f64,
}

impl QuadCap {
    pub fn rows(&self) -> usize {
        self.offset.len()
    }

    /// `‖A·x_sub + b‖²` at `values`.
    pub fn lhs(&self, values: &[f64]) -> f64 {
        let cols = self.vars.len();
        let mut total = 0.0;
        for r in 0..self.rows() {
            let mut acc = self.offset[r];
            for (k, &v) in self.vars.iter().enumerate() {
                acc += self.matrix[r * cols + k] * values[v];
            }
            total += acc * acc;
        }
        total
    }

    pub fn violation(&self, values: &[f64]) -> f64 {
        self.lhs(values) - self.bound
    }

    /// Outer-approximation cut at `values`: the tangent of the convex
    /// function `‖A·x + b‖² − c` there. Returns `None` when the gradient
    /// vanishes (the point cannot violate the cap then).
    pub fn tangent_cut(&self, values: &[f64]) -> Option<LinearConstraint> {
        let cols = self.vars.len();
        let mut residual = self.offset.clone();
        for r in 0..self.rows() {
            for (k, &v) in self.vars.iter().enumerate() {
                residual[r] += self.matrix[r * cols + k] * values[v];
            }
        }
        // gradient over the subset: 2·Aᵀ·residual
        let mut grad = alloc::vec![0.0; cols];
        for r in 0..self.rows() {
            for k in 0..cols {
                grad[k] += 2.0 * self.matrix[r * cols + k] * residual[r];
            }
        }
        if grad.iter().all(|g| g.abs() < 1e-14) {
            return None;
        }
        let g_value: f64 = residual.iter().map(|r| r * r).sum::<f64>() - self.bound;
        let grad_dot_x: f64 = grad
            .iter()
            .zip(&self.vars)
            .map(|(g, &v)| g * values[v])
            .sum();
        let terms = grad
            .iter()
            .zip(&self.vars)
            .map(|(&g, &v)| (v, g))
            .collect();
        Some(LinearConstraint {
            expr: LinearExpr::new(terms),
            relation: Relation::Le,
            rhs: grad_dot_x - g_value,
        })
    }
}

/// Optional metadata linking an SOS2 weight set to the variables it
/// interpolates. When present, SOS2 branching also tightens the bounds
/// of the interpolated value (`Σλ·q`) and square (`Σλ·q²`) variables,
/// which sharpens the node relaxations considerably.
#[derive(Debug, Clone, PartialEq)]
pub struct Sos2Interpolation {
    pub value_var: VarId,
    pub square_var: Option<VarId>,
    /// Ascending breakpoints, one per set member.
    pub breakpoints: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sos2Set {
    pub members: Vec<VarId>,
    pub interpolation: Option<Sos2Interpolation>,
}

/// A sparse mixed-integer linear program, sense minimize.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MilpModel {
    variables: Vec<Variable>,
    objective: LinearExpr,
    objective_constant: f64,
    constraints: Vec<LinearConstraint>,
    sos2_sets: Vec<Sos2Set>,
    quad_caps: Vec<QuadCap>,
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, lower: f64, upper: f64, kind: VarKind) -> Result<VarId, MilpError> {
        if !(lower <= upper) {
            return Err(MilpError::BadBounds);
        }
        if kind == VarKind::Binary && (lower < 0.0 || upper > 1.0) {
            return Err(MilpError::BadBounds);
        }
        self.variables.push(Variable { lower, upper, kind });
        Ok(self.variables.len() - 1)
    }

    pub fn add_continuous(&mut self, lower: f64, upper: f64) -> Result<VarId, MilpError> {
        self.add_variable(lower, upper, VarKind::Continuous)
    }

    pub fn add_binary(&mut self) -> Result<VarId, MilpError> {
        self.add_variable(0.0, 1.0, VarKind::Binary)
    }

    fn check_ids(&self, expr: &LinearExpr) -> Result<(), MilpError> {
        if let Some(max) = expr.max_var() {
            if max >= self.variables.len() {
                return Err(MilpError::UnknownVariable(max));
            }
        }
        Ok(())
    }

    pub fn add_linear(
        &mut self,
        terms: Vec<(VarId, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> Result<usize, MilpError> {
        let expr = LinearExpr::new(terms);
        self.check_ids(&expr)?;
        self.constraints.push(LinearConstraint {
            expr,
            relation,
            rhs,
        });
        Ok(self.constraints.len() - 1)
    }

    pub fn add_sos2(&mut self, members: Vec<VarId>) -> Result<usize, MilpError> {
        if members.len() < 3 {
            return Err(MilpError::SosTooSmall);
        }
        for &id in &members {
            if id >= self.variables.len() {
                return Err(MilpError::UnknownVariable(id));
            }
        }
        self.sos2_sets.push(Sos2Set {
            members,
            interpolation: None,
        });
        Ok(self.sos2_sets.len() - 1)
    }

    /// Attaches interpolation metadata to an existing SOS2 set; see
    /// [`Sos2Interpolation`]. Breakpoints must be ascending and match the
    /// member count.
    pub fn link_sos2_interpolation(
        &mut self,
        set: usize,
        link: Sos2Interpolation,
    ) -> Result<(), MilpError> {
        let Some(entry) = self.sos2_sets.get_mut(set) else {
            return Err(MilpError::UnknownVariable(set));
        };
        if link.breakpoints.len() != entry.members.len()
            || link.breakpoints.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(MilpError::BadBounds);
        }
        if link.value_var >= self.variables.len()
            || link.square_var.is_some_and(|v| v >= self.variables.len())
        {
            return Err(MilpError::UnknownVariable(link.value_var));
        }
        entry.interpolation = Some(link);
        Ok(())
    }

    /// Adds `‖A·x_sub + b‖₂² ≤ c`. `matrix` is row-major,
    /// `offset.len() × vars.len()`.
    pub fn add_quad_cap(
        &mut self,
        vars: Vec<VarId>,
        matrix: Vec<f64>,
        offset: Vec<f64>,
        bound: f64,
    ) -> Result<usize, MilpError> {
        if matrix.len() != offset.len() * vars.len() || offset.is_empty() || vars.is_empty() {
            return Err(MilpError::MalformedQuadCap);
        }
        for &id in &vars {
            if id >= self.variables.len() {
                return Err(MilpError::UnknownVariable(id));
            }
        }
        self.quad_caps.push(QuadCap {
            vars,
            matrix,
            offset,
            bound,
        });
        Ok(self.quad_caps.len() - 1)
    }

    pub fn set_objective(
        &mut self,
        terms: Vec<(VarId, f64)>,
        constant: f64,
    ) -> Result<(), MilpError> {
        let expr = LinearExpr::new(terms);
        self.check_ids(&expr)?;
        self.objective = expr;
        self.objective_constant = constant;
        Ok(())
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id]
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn objective(&self) -> (&LinearExpr, f64) {
        (&self.objective, self.objective_constant)
    }

    /// Objective value at `values`, including the additive constant.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.evaluate(values) + self.objective_constant
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn sos2_sets(&self) -> &[Sos2Set] {
        &self.sos2_sets
    }

    pub fn quad_caps(&self) -> &[QuadCap] {
        &self.quad_caps
    }

    pub fn binary_ids(&self) -> impl Iterator<Item = VarId> + '_ {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Binary)
            .map(|(id, _)| id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_defaults_to_unit_box() {
        let mut m = MilpModel::new();
        let id = m.add_binary().unwrap();
        let v = m.variable(id);
        assert_eq!((v.lower, v.upper), (0.0, 1.0));
        assert_eq!(v.kind, VarKind::Binary);
    }

    #[test]
    fn bad_bounds_rejected() {
        let mut m = MilpModel::new();
        assert_eq!(m.add_continuous(1.0, 0.0), Err(MilpError::BadBounds));
        assert_eq!(
            m.add_variable(-0.5, 1.0, VarKind::Binary),
            Err(MilpError::BadBounds)
        );
    }

    #[test]
    fn sos2_needs_three_members() {
        let mut m = MilpModel::new();
        let a = m.add_continuous(0.0, 1.0).unwrap();
        let b = m.add_continuous(0.0, 1.0).unwrap();
        assert_eq!(m.add_sos2(alloc::vec![a, b]), Err(MilpError::SosTooSmall));
    }

    #[test]
    fn unknown_variable_rejected() {
        let mut m = MilpModel::new();
        let a = m.add_continuous(0.0, 1.0).unwrap();
        assert_eq!(
            m.add_linear(alloc::vec![(a, 1.0), (17, 2.0)], Relation::Le, 1.0),
            Err(MilpError::UnknownVariable(17))
        );
    }

    #[test]
    fn linear_expr_merges_duplicates() {
        let e = LinearExpr::new(alloc::vec![(2, 1.0), (0, 3.0), (2, -1.0), (1, 0.5)]);
        assert_eq!(e.terms(), &[(0, 3.0), (1, 0.5)]);
    }

    #[test]
    fn tangent_cut_separates_violating_point() {
        // cap: ‖x‖² ≤ 1 over two vars; point (1, 1) violates by 1.
        let mut m = MilpModel::new();
        let x = m.add_continuous(-2.0, 2.0).unwrap();
        let y = m.add_continuous(-2.0, 2.0).unwrap();
        let cap_id = m
            .add_quad_cap(
                alloc::vec![x, y],
                alloc::vec![1.0, 0.0, 0.0, 1.0],
                alloc::vec![0.0, 0.0],
                1.0,
            )
            .unwrap();
        let cap = &m.quad_caps()[cap_id];
        let point = alloc::vec![1.0, 1.0];
        assert!(cap.violation(&point) > 0.0);
        let cut = cap.tangent_cut(&point).unwrap();
        // The cut must exclude the violating point...
        assert!(cut.violation(&point) > 1e-9);
        // ...and keep every point satisfying the cap (sampled).
        let mut seed = 77u64;
        for _ in 0..1000 {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            let a = ((seed >> 33) as f64 / (1u64 << 31) as f64) - 1.0;
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            let b = ((seed >> 33) as f64 / (1u64 << 31) as f64) - 1.0;
            let p = alloc::vec![a, b];
            if cap.violation(&p) <= 0.0 {
                assert!(cut.violation(&p) <= 1e-9, "cut rejected feasible {p:?}");
            }
        }
    }
}
