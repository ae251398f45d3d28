//! Solver-agnostic mixed-integer models for the two NP-hard objectives,
//! LP-format emission for external solvers, and solution checking.
//!
//! Three models are built over the same assignment core (binary `x_i_k`
//! membership, widths `w_i_k`, layer-use flags `y_k`): minimize the
//! largest perimeter, minimize the largest side deviation (the
//! linearizable stand-in whose optima coincide with aspect-ratio
//! optima; the true aspect ratio must be recomputed from the returned
//! assignment), and the fixed-threshold aspect feasibility model used
//! by the bisection scheme. Big-M coefficients are kept exactly as
//! derived from the instance data, with no tightening.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{
    evaluate, realize, Instance, ObjectiveKind, ObjectiveValue, Partition,
};
use crate::error::{Error, Result};
use crate::scalar::{rational_to_f64, Rational};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default feasibility tolerance when checking assignments, matching
/// the usual integer-solver convention.
pub const DEFAULT_CHECK_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    /// `None` means unbounded below.
    pub lower: Option<f64>,
    /// `None` means unbounded above.
    pub upper: Option<f64>,
    pub kind: VarKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl std::fmt::Display for Sense {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

/// One linear row: `sum(coef * var) sense rhs`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(f64, usize)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Which model a [`LinearModel`] encodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    PeriMax,
    AspectReform,
    AspectDecision,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::PeriMax => "peri-max",
            ModelKind::AspectReform => "aspect-reform",
            ModelKind::AspectDecision => "aspect-decision",
        })
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "peri-max" => Ok(ModelKind::PeriMax),
            "aspect-reform" => Ok(ModelKind::AspectReform),
            "aspect-decision" => Ok(ModelKind::AspectDecision),
            other => Err(format!(
                "unknown model kind {other:?} (use peri-max, aspect-reform or aspect-decision)"
            )),
        }
    }
}

/// A solver-agnostic minimization model: variables with bounds and
/// integrality, named linear constraints, and a linear objective.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinearModel {
    pub instance_name: String,
    pub kind: ModelKind,
    pub with_cuts: bool,
    /// Threshold of the decision model, absent otherwise.
    pub phi: Option<f64>,
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Vec<(f64, usize)>,
    #[serde(skip)]
    name_index: BTreeMap<String, usize>,
}

impl LinearModel {
    fn new(instance_name: &str, kind: ModelKind) -> Self {
        Self {
            instance_name: instance_name.to_string(),
            kind,
            with_cuts: false,
            phi: None,
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: Vec::new(),
            name_index: BTreeMap::new(),
        }
    }

    /// Declares a variable; names must be unique and match
    /// `[A-Za-z][A-Za-z0-9_]*`.
    pub fn add_variable(
        &mut self,
        name: impl Into<String>,
        lower: Option<f64>,
        upper: Option<f64>,
        kind: VarKind,
    ) -> Result<usize> {
        let name = name.into();
        let mut chars = name.chars();
        let head_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic());
        let tail_ok = chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !head_ok || !tail_ok {
            return Err(Error::BadVariableName { name });
        }
        if self.name_index.contains_key(&name) {
            return Err(Error::DuplicateVariable { name });
        }
        let id = self.variables.len();
        self.name_index.insert(name.clone(), id);
        self.variables.push(Variable {
            name,
            lower,
            upper,
            kind,
        });
        Ok(id)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(f64, usize)>,
        sense: Sense,
        rhs: f64,
    ) {
        debug_assert!(terms.iter().all(|&(_, v)| v < self.variables.len()));
        self.constraints.push(Constraint {
            name: name.into(),
            terms,
            sense,
            rhs,
        });
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(f64, usize)] {
        &self.objective
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        // The index map is not serialized; fall back to a scan after a
        // round-trip through JSON.
        self.name_index
            .get(name)
            .copied()
            .or_else(|| self.variables.iter().position(|v| v.name == name))
    }
}

/// Per-rectangle-and-layer variable ids shared by all three models.
struct CoreVars {
    x: Vec<Vec<usize>>,
    w: Vec<Vec<usize>>,
    y: Vec<usize>,
}

fn var_name(prefix: &str, i: usize, k: usize) -> String {
    format!("{prefix}_{}_{}", i + 1, k + 1)
}

/// Declares x, w, y and emits the shared assignment rows: every
/// rectangle in exactly one layer, layer-use flags consistent, widths
/// summing to `L1` per used layer, widths zero outside the layer, and
/// pairwise width proportionality within a layer.
fn build_core(instance: &Instance, model: &mut LinearModel) -> Result<CoreVars> {
    let n = instance.len();
    let l1 = rational_to_f64(instance.l1());
    let l2 = rational_to_f64(instance.l2());
    let areas: Vec<f64> = instance.areas().iter().map(rational_to_f64).collect();

    let x: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|k| {
                    model
                        .add_variable(var_name("x", i, k), Some(0.0), Some(1.0), VarKind::Binary)
                        .expect("generated names are unique")
                })
                .collect()
        })
        .collect();
    let w: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|k| {
                    model
                        .add_variable(var_name("w", i, k), Some(0.0), None, VarKind::Continuous)
                        .expect("generated names are unique")
                })
                .collect()
        })
        .collect();
    let y: Vec<usize> = (0..n)
        .map(|k| {
            model
                .add_variable(format!("y_{}", k + 1), Some(0.0), Some(1.0), VarKind::Binary)
                .expect("generated names are unique")
        })
        .collect();

    for i in 0..n {
        let terms = (0..n).map(|k| (1.0, x[i][k])).collect();
        model.add_constraint(format!("assign_{}", i + 1), terms, Sense::Eq, 1.0);
    }
    for k in 0..n {
        let mut terms: Vec<(f64, usize)> = (0..n).map(|i| (1.0, x[i][k])).collect();
        terms.push((-1.0, y[k]));
        model.add_constraint(format!("used_lb_{}", k + 1), terms, Sense::Ge, 0.0);
    }
    for i in 0..n {
        for k in 0..n {
            model.add_constraint(
                var_name("open", i, k),
                vec![(1.0, x[i][k]), (-1.0, y[k])],
                Sense::Le,
                0.0,
            );
        }
    }
    for k in 0..n {
        let mut terms: Vec<(f64, usize)> = (0..n).map(|i| (1.0, w[i][k])).collect();
        terms.push((-l1, y[k]));
        model.add_constraint(format!("width_sum_{}", k + 1), terms, Sense::Eq, 0.0);
    }
    for i in 0..n {
        for k in 0..n {
            model.add_constraint(
                var_name("width_ub", i, k),
                vec![(1.0, w[i][k]), (-l1, x[i][k])],
                Sense::Le,
                0.0,
            );
        }
    }
    for i in 0..n {
        for k in 0..n {
            model.add_constraint(
                var_name("width_lb", i, k),
                vec![(areas[i], x[i][k]), (-l2, w[i][k])],
                Sense::Le,
                0.0,
            );
        }
    }
    // Pairwise width proportionality: members of one layer share the
    // height, so a_j * w_i = a_i * w_j; both big-M halves are emitted
    // for every ordered pair.
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for k in 0..n {
                model.add_constraint(
                    format!("prop_a_{}_{}_{}", i + 1, j + 1, k + 1),
                    vec![
                        (areas[j], w[i][k]),
                        (-areas[i], w[j][k]),
                        (areas[j] * l1, x[i][k]),
                        (areas[j] * l1, x[j][k]),
                    ],
                    Sense::Le,
                    2.0 * areas[j] * l1,
                );
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for k in 0..n {
                model.add_constraint(
                    format!("prop_b_{}_{}_{}", i + 1, j + 1, k + 1),
                    vec![
                        (areas[i], w[j][k]),
                        (-areas[j], w[i][k]),
                        (areas[i] * l1, x[i][k]),
                        (areas[i] * l1, x[j][k]),
                    ],
                    Sense::Le,
                    2.0 * areas[i] * l1,
                );
            }
        }
    }
    Ok(CoreVars { x, w, y })
}

fn add_symmetry_cuts(model: &mut LinearModel, core: &CoreVars) {
    let n = core.y.len();
    for k in 0..n.saturating_sub(1) {
        model.add_constraint(
            format!("layer_order_{}", k + 1),
            vec![(1.0, core.y[k]), (-1.0, core.y[k + 1])],
            Sense::Ge,
            0.0,
        );
    }
    // Rectangle i may only use layers 1..=i.
    for i in 0..n {
        for k in i + 1..n {
            model.add_constraint(
                var_name("sym", i, k),
                vec![(1.0, core.x[i][k])],
                Sense::Eq,
                0.0,
            );
        }
    }
}

/// Largest-perimeter model: minimize `phi` subject to each placed
/// rectangle's perimeter staying below it (big-M deactivated for
/// non-members), over the shared assignment core. `with_cuts` appends
/// the layer-ordering and index symmetry rows.
pub fn build_peri_max_model(instance: &Instance, with_cuts: bool) -> Result<LinearModel> {
    let n = instance.len();
    let l1 = rational_to_f64(instance.l1());
    let l2 = rational_to_f64(instance.l2());
    let areas: Vec<f64> = instance.areas().iter().map(rational_to_f64).collect();

    let mut model = LinearModel::new(instance.name().unwrap_or(""), ModelKind::PeriMax);
    model.with_cuts = with_cuts;
    let core = build_core(instance, &mut model)?;
    let phi = model.add_variable("phi", Some(0.0), None, VarKind::Continuous)?;

    // Perimeter rows come first to mirror the model statement, then the
    // shared core; constraint order inside the builder is fixed, so the
    // rows are spliced below.
    let mut perim_rows = Vec::with_capacity(n * n);
    for i in 0..n {
        for k in 0..n {
            let mut terms: Vec<(f64, usize)> = Vec::with_capacity(n + 2);
            // x_i_k carries both the big-M activation and its own area
            // share of the layer height.
            terms.push((2.0 * (l1 + l2) + 2.0 * areas[i] / l1, core.x[i][k]));
            terms.push((2.0, core.w[i][k]));
            for j in 0..n {
                if j != i {
                    terms.push((2.0 * areas[j] / l1, core.x[j][k]));
                }
            }
            terms.push((-1.0, phi));
            perim_rows.push(Constraint {
                name: var_name("perim", i, k),
                terms,
                sense: Sense::Le,
                rhs: 2.0 * (l1 + l2),
            });
        }
    }
    let core_rows = std::mem::take(&mut model.constraints);
    model.constraints = perim_rows;
    model.constraints.extend(core_rows);

    if with_cuts {
        add_symmetry_cuts(&mut model, &core);
    }
    model.objective = vec![(1.0, phi)];
    Ok(model)
}

/// Side-deviation model: minimize `phi >= |w_i - h_k| / sqrt(a_i)` over
/// the shared core, with deviation variables `d_i_k` activated only for
/// members. Optima coincide with aspect-ratio optima, but the true
/// aspect ratio must be recomputed from the assignment afterwards
/// ([`decode_assignment`] does both).
pub fn build_aspect_reform_model(instance: &Instance) -> Result<LinearModel> {
    let n = instance.len();
    let l1 = rational_to_f64(instance.l1());
    let l2 = rational_to_f64(instance.l2());
    let areas: Vec<f64> = instance.areas().iter().map(rational_to_f64).collect();

    let mut model = LinearModel::new(instance.name().unwrap_or(""), ModelKind::AspectReform);
    let core = build_core(instance, &mut model)?;
    let d: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|k| {
                    model
                        .add_variable(var_name("d", i, k), Some(0.0), None, VarKind::Continuous)
                        .expect("generated names are unique")
                })
                .collect()
        })
        .collect();
    let phi = model.add_variable("phi", Some(0.0), None, VarKind::Continuous)?;

    for i in 0..n {
        for k in 0..n {
            // d_i_k >= (width - height) - L1 (1 - x_i_k)
            let mut terms: Vec<(f64, usize)> = Vec::with_capacity(n + 3);
            terms.push((1.0, d[i][k]));
            terms.push((-l1 + areas[i] / l1, core.x[i][k]));
            terms.push((-1.0, core.w[i][k]));
            for j in 0..n {
                if j != i {
                    terms.push((areas[j] / l1, core.x[j][k]));
                }
            }
            model.add_constraint(var_name("dev_pos", i, k), terms, Sense::Ge, -l1);
        }
    }
    for i in 0..n {
        for k in 0..n {
            // d_i_k >= (height - width) - L2 (1 - x_i_k)
            let mut terms: Vec<(f64, usize)> = Vec::with_capacity(n + 3);
            terms.push((1.0, d[i][k]));
            terms.push((-l2 - areas[i] / l1, core.x[i][k]));
            terms.push((1.0, core.w[i][k]));
            for j in 0..n {
                if j != i {
                    terms.push((-areas[j] / l1, core.x[j][k]));
                }
            }
            model.add_constraint(var_name("dev_neg", i, k), terms, Sense::Ge, -l2);
        }
    }
    for i in 0..n {
        for k in 0..n {
            // phi >= d_i_k / sqrt(a_i); the square root is materialized
            // numerically here, which the a-posteriori recomputation of
            // the true aspect ratio absorbs.
            model.add_constraint(
                var_name("ratio", i, k),
                vec![(1.0, phi), (-1.0 / areas[i].sqrt(), d[i][k])],
                Sense::Ge,
                0.0,
            );
        }
    }
    model.objective = vec![(1.0, phi)];
    Ok(model)
}

/// Fixed-threshold aspect feasibility model: no objective, layer
/// heights defined from memberships, and both aspect sides bounded by
/// `phi` for members (the height side carries an `L2` slack for
/// non-members, without which any partition with an unused pair would
/// be cut off).
pub fn build_aspect_decision_model(instance: &Instance, phi: f64) -> Result<LinearModel> {
    if !(phi >= 1.0) {
        return Err(Error::ThresholdBelowOne { phi });
    }
    let n = instance.len();
    let l1 = rational_to_f64(instance.l1());
    let l2 = rational_to_f64(instance.l2());
    let areas: Vec<f64> = instance.areas().iter().map(rational_to_f64).collect();

    let mut model = LinearModel::new(instance.name().unwrap_or(""), ModelKind::AspectDecision);
    model.phi = Some(phi);
    let core = build_core(instance, &mut model)?;
    let h: Vec<usize> = (0..n)
        .map(|k| {
            model
                .add_variable(format!("h_{}", k + 1), Some(0.0), None, VarKind::Continuous)
                .expect("generated names are unique")
        })
        .collect();

    for k in 0..n {
        let mut terms: Vec<(f64, usize)> = vec![(l1, h[k])];
        for i in 0..n {
            terms.push((-areas[i], core.x[i][k]));
        }
        model.add_constraint(format!("height_{}", k + 1), terms, Sense::Eq, 0.0);
    }
    for i in 0..n {
        for k in 0..n {
            model.add_constraint(
                var_name("ar_len", i, k),
                vec![(1.0, core.w[i][k]), (-phi, h[k])],
                Sense::Le,
                0.0,
            );
        }
    }
    for i in 0..n {
        for k in 0..n {
            model.add_constraint(
                var_name("ar_hgt", i, k),
                vec![(1.0, h[k]), (-phi, core.w[i][k]), (l2, core.x[i][k])],
                Sense::Le,
                l2,
            );
        }
    }
    Ok(model)
}

// ---------------------------------------------------------------------
// LP emission
// ---------------------------------------------------------------------

/// Integer-valued coefficients print as integers; everything else uses
/// the shortest decimal that round-trips the exact binary value (at
/// most 17 significant digits).
fn fmt_num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

fn push_expression(out: &mut String, terms: &[(f64, usize)], variables: &[Variable]) {
    for &(coef, var) in terms {
        let sign = if coef < 0.0 { '-' } else { '+' };
        let magnitude = coef.abs();
        out.push(' ');
        out.push(sign);
        out.push(' ');
        if magnitude != 1.0 {
            out.push_str(&fmt_num(magnitude));
            out.push(' ');
        }
        out.push_str(&variables[var].name);
    }
}

/// Renders the model as LP-format text (Minimize / Subject To / Bounds /
/// Binaries / End) with header comments; deterministic, so emitting the
/// same model twice is byte-identical.
pub fn emit_lp(model: &LinearModel) -> String {
    let mut out = String::new();
    out.push_str(&format!("\\ instance: {}\n", model.instance_name));
    out.push_str(&format!("\\ model: {}\n", model.kind));
    out.push_str(&format!("\\ cuts: {}\n", model.with_cuts));
    if let Some(phi) = model.phi {
        out.push_str(&format!("\\ phi: {}\n", fmt_num(phi)));
        out.push_str("\\ note: layer heights declared nonnegative rather than free\n");
    }
    out.push_str(&format!("\\ tool: softrect {TOOL_VERSION}\n"));

    out.push_str("Minimize\n obj:");
    push_expression(&mut out, &model.objective, &model.variables);
    out.push('\n');

    out.push_str("Subject To\n");
    for c in &model.constraints {
        out.push_str(&format!(" {}:", c.name));
        push_expression(&mut out, &c.terms, &model.variables);
        out.push_str(&format!(" {} {}\n", c.sense, fmt_num(c.rhs)));
    }

    out.push_str("Bounds\n");
    for v in &model.variables {
        if v.kind == VarKind::Binary {
            continue;
        }
        match (v.lower, v.upper) {
            (None, None) => out.push_str(&format!(" {} free\n", v.name)),
            (Some(lo), None) => out.push_str(&format!(" {} >= {}\n", v.name, fmt_num(lo))),
            (None, Some(hi)) => out.push_str(&format!(" {} <= {}\n", v.name, fmt_num(hi))),
            (Some(lo), Some(hi)) => out.push_str(&format!(
                " {} <= {} <= {}\n",
                fmt_num(lo),
                v.name,
                fmt_num(hi)
            )),
        }
    }

    out.push_str("Binaries\n");
    for v in &model.variables {
        if v.kind == VarKind::Binary {
            out.push_str(&format!(" {}\n", v.name));
        }
    }
    out.push_str("End\n");
    out
}

// ---------------------------------------------------------------------
// Encoding and checking
// ---------------------------------------------------------------------

/// Variable values by name.
pub type Assignment = BTreeMap<String, f64>;

/// How encoded layers are numbered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerOrder {
    /// Non-increasing cardinality (the canonical display order).
    Canonical,
    /// Increasing smallest member, which is the numbering the symmetry
    /// cuts admit.
    FirstIndex,
}

/// Encodes a partition as a full variable assignment for the given
/// model kind: memberships, widths, layer flags, and the objective or
/// height variables they imply.
pub fn encode_partition(
    instance: &Instance,
    partition: &Partition,
    kind: ModelKind,
    order: LayerOrder,
) -> Result<Assignment> {
    let n = instance.len();
    let ordered = match order {
        LayerOrder::Canonical => partition.canonicalize(),
        LayerOrder::FirstIndex => {
            let mut layers = partition.canonicalize().layers().to_vec();
            layers.sort_by_key(|layer| layer.first().copied());
            Partition::new(layers)
        }
    };
    let layout = realize(instance, &ordered)?;

    let mut values = Assignment::new();
    for i in 0..n {
        for k in 0..n {
            values.insert(var_name("x", i, k), 0.0);
            values.insert(var_name("w", i, k), 0.0);
        }
    }
    for k in 0..n {
        values.insert(format!("y_{}", k + 1), 0.0);
        if kind == ModelKind::AspectDecision {
            values.insert(format!("h_{}", k + 1), 0.0);
        }
        if kind == ModelKind::AspectReform {
            for i in 0..n {
                values.insert(var_name("d", i, k), 0.0);
            }
        }
    }
    for (k, layer) in ordered.layers().iter().enumerate() {
        values.insert(format!("y_{}", k + 1), 1.0);
        let height = rational_to_f64(&layout.layer_heights()[k]);
        if kind == ModelKind::AspectDecision {
            values.insert(format!("h_{}", k + 1), height);
        }
        for &i in layer {
            let width = rational_to_f64(&layout.rects()[i].width);
            values.insert(var_name("x", i, k), 1.0);
            values.insert(var_name("w", i, k), width);
            if kind == ModelKind::AspectReform {
                values.insert(var_name("d", i, k), (width - height).abs());
            }
        }
    }
    match kind {
        ModelKind::PeriMax => {
            let phi = evaluate(&layout, ObjectiveKind::PeriMax).to_f64();
            values.insert("phi".to_string(), phi);
        }
        ModelKind::AspectReform => {
            let phi = evaluate(&layout, ObjectiveKind::AspectSurrogate).to_f64();
            values.insert("phi".to_string(), phi);
        }
        ModelKind::AspectDecision => {}
    }
    Ok(values)
}

/// One violated row: how far the left-hand side strayed.
#[derive(Clone, Debug)]
pub struct Violation {
    pub constraint: String,
    pub lhs: f64,
    pub sense: Sense,
    pub rhs: f64,
    pub slack: f64,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {} {} {} (off by {:.3e})",
            self.constraint,
            self.lhs,
            self.sense,
            self.rhs,
            self.slack.abs()
        )
    }
}

/// Evaluates every constraint under the assignment; an empty result
/// means feasible within the additive tolerance. Variables present in
/// the assignment but not in the model are an error; model variables
/// missing from the assignment count as zero.
pub fn check_solution(
    model: &LinearModel,
    assignment: &Assignment,
    tolerance: f64,
) -> Result<Vec<Violation>> {
    let mut values = vec![0.0; model.variables().len()];
    for (name, &value) in assignment {
        match model.variable_index(name) {
            Some(id) => values[id] = value,
            None => {
                return Err(Error::UnknownVariable { name: name.clone() });
            }
        }
    }
    let mut violations = Vec::new();
    for c in model.constraints() {
        let lhs: f64 = c.terms.iter().map(|&(coef, var)| coef * values[var]).sum();
        let violated = match c.sense {
            Sense::Le => lhs > c.rhs + tolerance,
            Sense::Ge => lhs < c.rhs - tolerance,
            Sense::Eq => (lhs - c.rhs).abs() > tolerance,
        };
        if violated {
            violations.push(Violation {
                constraint: c.name.clone(),
                lhs,
                sense: c.sense,
                rhs: c.rhs,
                slack: lhs - c.rhs,
            });
        }
    }
    Ok(violations)
}

/// Reads a `name value` per-line solution file; `#` and `\` lines are
/// comments.
pub fn parse_solution(text: &str) -> Result<Assignment> {
    let mut values = Assignment::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('\\') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::MalformedSolutionLine {
                line: lineno + 1,
                text: line.to_string(),
            });
        };
        let value: f64 = value.parse().map_err(|_| Error::MalformedSolutionLine {
            line: lineno + 1,
            text: line.to_string(),
        })?;
        values.insert(name.to_string(), value);
    }
    Ok(values)
}

/// A solved model's assignment turned back into geometry: the partition
/// read off the memberships, the model's own objective value if any,
/// and the exactly recomputed objectives.
#[derive(Clone, Debug)]
pub struct DecodedSolution {
    pub partition: Partition,
    pub model_objective: Option<f64>,
    pub peri_max: Rational,
    pub aspect_ratio: Rational,
}

/// Extracts the partition from the `x` variables (values above 0.5 are
/// memberships) and recomputes the true objectives exactly. This is the
/// required post-processing step for the deviation model, whose own
/// objective is not the aspect ratio.
pub fn decode_assignment(instance: &Instance, assignment: &Assignment) -> Result<DecodedSolution> {
    let n = instance.len();
    let mut layers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for k in 0..n {
            if assignment.get(&var_name("x", i, k)).copied().unwrap_or(0.0) > 0.5 {
                layers[k].push(i);
            }
        }
    }
    layers.retain(|layer| !layer.is_empty());
    let partition = Partition::new(layers).canonicalize();
    let layout = realize(instance, &partition)?;
    let peri_max = match evaluate(&layout, ObjectiveKind::PeriMax) {
        ObjectiveValue::Exact(v) => v,
        ObjectiveValue::Sqrt(_) => unreachable!("perimeter is rational"),
    };
    let aspect_ratio = match evaluate(&layout, ObjectiveKind::AspectRatio) {
        ObjectiveValue::Exact(v) => v,
        ObjectiveValue::Sqrt(_) => unreachable!("aspect ratio is rational"),
    };
    Ok(DecodedSolution {
        partition,
        model_objective: assignment.get("phi").copied(),
        peri_max,
        aspect_ratio,
    })
}
