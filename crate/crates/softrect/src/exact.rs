//! Exact solvers for the NP-hard objectives: a set-partition
//! brute-forcer used as the oracle, depth-first branch-and-bound for the
//! largest-perimeter and aspect-ratio objectives, an interval
//! feasibility decision procedure, and the bisection scheme that drives
//! it.
//!
//! All searches assign rectangles in non-increasing area order, and a
//! rectangle may join an existing layer or open the next one. This
//! canonical enumeration visits every set partition exactly once, which
//! is the same symmetry reduction the integer models achieve with
//! ordering cuts.

use std::time::{Duration, Instant};

use num::{One, Signed, Zero};

use crate::clws::solve_peri_sum;
use crate::domain::{evaluate, realize, Instance, ObjectiveKind, ObjectiveValue, Partition};
use crate::error::{Error, Result};
use crate::scalar::{rational_to_f64, Rational};

/// Default cap for the brute-force oracle (Bell(12) is about 4.2e6).
pub const BRUTE_FORCE_LIMIT: usize = 12;

/// Additive slack for testing float membership in a height interval.
pub const DEFAULT_FEASIBILITY_TOLERANCE: f64 = 1e-9;

/// Bisection stops when the bracket is narrower than this.
pub const BINARY_SEARCH_GAP: f64 = 0.01;

// ---------------------------------------------------------------------
// Set partition enumeration (restricted growth strings)
// ---------------------------------------------------------------------

/// Enumerates all set partitions of `{0..n}` via restricted growth
/// strings: `codes[i]` is the layer of element `i`, and each element may
/// use at most one layer id beyond the largest id seen before it.
pub struct SetPartitions {
    codes: Vec<usize>,
    maxes: Vec<usize>,
    state: EnumState,
}

enum EnumState {
    Fresh,
    Running,
    Done,
}

impl SetPartitions {
    pub fn new(n: usize) -> Self {
        Self {
            codes: vec![0; n],
            maxes: vec![0; n],
            state: EnumState::Fresh,
        }
    }

    /// Moves to the next partition; `false` once exhausted.
    pub fn advance(&mut self) -> bool {
        match self.state {
            EnumState::Fresh => {
                self.state = if self.codes.is_empty() {
                    EnumState::Done
                } else {
                    EnumState::Running
                };
                matches!(self.state, EnumState::Running)
            }
            EnumState::Running => {
                let n = self.codes.len();
                for i in (1..n).rev() {
                    if self.codes[i] <= self.maxes[i - 1] {
                        self.codes[i] += 1;
                        self.maxes[i] = self.maxes[i - 1].max(self.codes[i]);
                        for j in i + 1..n {
                            self.codes[j] = 0;
                            self.maxes[j] = self.maxes[i];
                        }
                        return true;
                    }
                }
                self.state = EnumState::Done;
                false
            }
            EnumState::Done => false,
        }
    }

    pub fn codes(&self) -> &[usize] {
        &self.codes
    }

    pub fn layer_count(&self) -> usize {
        self.maxes.last().map_or(0, |m| m + 1)
    }

    pub fn to_partition(&self) -> Partition {
        let mut layers = vec![Vec::new(); self.layer_count()];
        for (i, &k) in self.codes.iter().enumerate() {
            layers[k].push(i);
        }
        Partition::new(layers)
    }
}

// ---------------------------------------------------------------------
// Brute force oracle
// ---------------------------------------------------------------------

/// Exhaustive minimizer over all set partitions; the oracle every other
/// solver is checked against. Ties go to the canonically smallest
/// partition. Guarded by `limit` because the count grows like Bell(n).
pub fn brute_force_with_limit(
    instance: &Instance,
    kind: ObjectiveKind,
    limit: usize,
) -> Result<(Partition, ObjectiveValue)> {
    let n = instance.len();
    if n > limit {
        return Err(Error::EnumerationGuard { n, limit });
    }
    let areas = instance.areas();
    let l1 = instance.l1();
    let l1_sq = l1 * l1;
    let two = Rational::from_integer(2.into());

    let mut best: Option<(ObjectiveValue, Partition)> = None;
    let mut sums: Vec<Rational> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    let mut mins: Vec<usize> = Vec::new();
    let mut maxes: Vec<usize> = Vec::new();

    let mut iter = SetPartitions::new(n);
    while iter.advance() {
        let m = iter.layer_count();
        sums.clear();
        sums.resize(m, Rational::zero());
        counts.clear();
        counts.resize(m, 0);
        mins.clear();
        mins.resize(m, usize::MAX);
        maxes.clear();
        maxes.resize(m, usize::MAX);
        for (i, &k) in iter.codes().iter().enumerate() {
            sums[k] += &areas[i];
            counts[k] += 1;
            if mins[k] == usize::MAX || areas[i] < areas[mins[k]] {
                mins[k] = i;
            }
            if maxes[k] == usize::MAX || areas[i] > areas[maxes[k]] {
                maxes[k] = i;
            }
        }

        let value = match kind {
            ObjectiveKind::PeriSum => {
                let mut weighted = Rational::zero();
                for k in 0..m {
                    weighted += Rational::from_integer(counts[k].into()) * &sums[k];
                }
                ObjectiveValue::Exact(
                    &two * (weighted / l1 + Rational::from_integer(m.into()) * l1),
                )
            }
            ObjectiveKind::PeriMax => {
                let mut worst: Option<Rational> = None;
                for k in 0..m {
                    // 2 * (h + a_max / h) with h = sum / L1.
                    let h = &sums[k] / l1;
                    let perim = &two * (&h + &areas[maxes[k]] / &h);
                    if worst.as_ref().is_none_or(|w| perim > *w) {
                        worst = Some(perim);
                    }
                }
                ObjectiveValue::Exact(worst.expect("at least one layer"))
            }
            ObjectiveKind::AspectRatio => {
                let mut worst: Option<Rational> = None;
                for k in 0..m {
                    let h_sq = (&sums[k] * &sums[k]) / &l1_sq;
                    for idx in [maxes[k], mins[k]] {
                        let a = &areas[idx];
                        let aspect = if *a > h_sq { a / &h_sq } else { &h_sq / a };
                        if worst.as_ref().is_none_or(|w| aspect > *w) {
                            worst = Some(aspect);
                        }
                    }
                }
                ObjectiveValue::Exact(worst.expect("at least one layer"))
            }
            ObjectiveKind::AspectSurrogate => {
                let mut worst: Option<Rational> = None;
                for k in 0..m {
                    let h_sq = (&sums[k] * &sums[k]) / &l1_sq;
                    for idx in [maxes[k], mins[k]] {
                        let a = &areas[idx];
                        let diff = &h_sq - a;
                        let dev_sq = &diff * &diff / (a * &h_sq);
                        if worst.as_ref().is_none_or(|w| dev_sq > *w) {
                            worst = Some(dev_sq);
                        }
                    }
                }
                ObjectiveValue::Sqrt(worst.expect("at least one layer"))
            }
        };

        match &mut best {
            None => best = Some((value, iter.to_partition().canonicalize())),
            Some((best_value, best_partition)) => {
                if value < *best_value {
                    *best_value = value;
                    *best_partition = iter.to_partition().canonicalize();
                } else if value == *best_value {
                    let candidate = iter.to_partition().canonicalize();
                    if candidate < *best_partition {
                        *best_partition = candidate;
                    }
                }
            }
        }
    }
    let (value, partition) = best.expect("n >= 1 yields partitions");
    Ok((partition, value))
}

/// [`brute_force_with_limit`] at the default guard.
pub fn brute_force(
    instance: &Instance,
    kind: ObjectiveKind,
) -> Result<(Partition, ObjectiveValue)> {
    brute_force_with_limit(instance, kind, BRUTE_FORCE_LIMIT)
}

// ---------------------------------------------------------------------
// Search bookkeeping
// ---------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    Optimal,
    TimeLimit,
    Infeasible,
}

impl std::fmt::Display for SearchStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SearchStatus::Optimal => "optimal",
            SearchStatus::TimeLimit => "time-limit",
            SearchStatus::Infeasible => "infeasible",
        })
    }
}

/// Node count, wall time, and the objective bracket a search ended with.
#[derive(Clone, Debug)]
pub struct SearchStats {
    pub nodes: u64,
    pub elapsed: f64,
    pub bound_lb: f64,
    pub bound_ub: f64,
    pub status: SearchStatus,
}

/// Closed interval of admissible layer heights for one rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeightInterval {
    pub lo: f64,
    pub hi: f64,
    pub rect: usize,
}

/// Heights at which a rectangle of area `a` keeps its perimeter within
/// `phi`; `None` when even the square shape (perimeter `4 sqrt(a)`)
/// exceeds the threshold.
pub fn height_interval_perimeter(
    a: &Rational,
    phi: f64,
    rect: usize,
) -> Result<Option<HeightInterval>> {
    if !a.is_positive() || !(phi > 0.0) {
        return Err(Error::NonPositiveThreshold);
    }
    let half = phi / 2.0;
    let disc = half * half - 4.0 * rational_to_f64(a);
    if disc < 0.0 {
        return Ok(None);
    }
    let root = disc.sqrt();
    Ok(Some(HeightInterval {
        lo: (half - root) / 2.0,
        hi: (half + root) / 2.0,
        rect,
    }))
}

/// Heights at which a rectangle of area `a` keeps its aspect ratio
/// within `phi`: `[sqrt(a / phi), sqrt(a * phi)]`, never empty.
pub fn height_interval_aspect(a: &Rational, phi: f64, rect: usize) -> Result<HeightInterval> {
    if !a.is_positive() {
        return Err(Error::NonPositiveThreshold);
    }
    if !(phi >= 1.0) {
        return Err(Error::ThresholdBelowOne { phi });
    }
    let a = rational_to_f64(a);
    Ok(HeightInterval {
        lo: (a / phi).sqrt(),
        hi: (a * phi).sqrt(),
        rect,
    })
}

/// Aspect-ratio height intervals for every rectangle of an instance.
pub fn aspect_intervals(instance: &Instance, phi: f64) -> Result<Vec<HeightInterval>> {
    instance
        .areas()
        .iter()
        .enumerate()
        .map(|(i, a)| height_interval_aspect(a, phi, i))
        .collect()
}

// ---------------------------------------------------------------------
// Shared branch-and-bound scaffolding
// ---------------------------------------------------------------------

/// Rectangle order used by every search: non-increasing area, original
/// index as tie-break (stable sort).
fn sorted_by_area_desc(instance: &Instance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..instance.len()).collect();
    order.sort_by(|&a, &b| instance.areas()[b].cmp(&instance.areas()[a]));
    order
}

fn suffix_sums(areas: &[Rational], order: &[usize]) -> Vec<Rational> {
    let mut suffix = vec![Rational::zero(); order.len() + 1];
    for t in (0..order.len()).rev() {
        suffix[t] = &suffix[t + 1] + &areas[order[t]];
    }
    suffix
}

fn partition_from_codes(order: &[usize], codes: &[usize], layer_count: usize) -> Partition {
    let mut layers = vec![Vec::new(); layer_count];
    for (t, &k) in codes.iter().enumerate() {
        layers[k].push(order[t]);
    }
    Partition::new(layers).canonicalize()
}

/// Smallest perimeter a rectangle of area `a` can have when its layer
/// height is confined to `[w_lo, w_hi]`.
fn min_perimeter_over(a: &Rational, w_lo: &Rational, w_hi: &Rational) -> ObjectiveValue {
    let two = Rational::from_integer(2.into());
    if *a <= w_lo * w_lo {
        ObjectiveValue::Exact(&two * (w_lo + a / w_lo))
    } else if *a >= w_hi * w_hi {
        ObjectiveValue::Exact(&two * (w_hi + a / w_hi))
    } else {
        ObjectiveValue::Sqrt(Rational::from_integer(16.into()) * a)
    }
}

/// Smallest aspect ratio a rectangle of area `a` can have when its
/// layer height is confined to `[w_lo, w_hi]`.
fn min_aspect_over(a: &Rational, w_lo: &Rational, w_hi: &Rational) -> Rational {
    let lo_sq = w_lo * w_lo;
    let hi_sq = w_hi * w_hi;
    if *a <= lo_sq {
        lo_sq / a
    } else if *a >= hi_sq {
        a / hi_sq
    } else {
        Rational::one()
    }
}

struct Ticker {
    deadline: Option<Instant>,
    expired: bool,
    checked: u64,
}

impl Ticker {
    fn new(limit: Option<Duration>) -> Self {
        Self {
            deadline: limit.map(|d| Instant::now() + d),
            expired: false,
            checked: 0,
        }
    }

    fn expired(&mut self) -> bool {
        if self.expired {
            return true;
        }
        let Some(deadline) = self.deadline else {
            return false;
        };
        self.checked += 1;
        if self.checked % 256 == 0 && Instant::now() >= deadline {
            self.expired = true;
        }
        self.expired
    }
}

// ---------------------------------------------------------------------
// Largest perimeter
// ---------------------------------------------------------------------

struct PeriMaxSearch<'a> {
    l1: &'a Rational,
    areas: &'a [Rational],
    order: Vec<usize>,
    suffix: Vec<Rational>,
    codes: Vec<usize>,
    layer_sums: Vec<Rational>,
    layer_max: Vec<usize>,
    best_value: Rational,
    best_partition: Partition,
    nodes: u64,
    ticker: Ticker,
}

impl PeriMaxSearch<'_> {
    fn dive(&mut self, depth: usize, open_layers: usize) {
        if self.ticker.expired() {
            return;
        }
        if depth == self.order.len() {
            let mut worst = Rational::zero();
            for k in 0..open_layers {
                let h = &self.layer_sums[k] / self.l1;
                let perim =
                    Rational::from_integer(2.into()) * (&h + &self.areas[self.layer_max[k]] / &h);
                if perim > worst {
                    worst = perim;
                }
            }
            if worst < self.best_value {
                self.best_value = worst;
                self.best_partition = partition_from_codes(&self.order, &self.codes, open_layers);
            }
            return;
        }
        let item = self.order[depth];
        for k in 0..=open_layers {
            self.nodes += 1;
            if k == open_layers {
                self.layer_sums.push(self.areas[item].clone());
                self.layer_max.push(item);
            } else {
                self.layer_sums[k] += &self.areas[item];
            }
            self.codes[depth] = k;
            if self.admissible(depth + 1, open_layers.max(k + 1)) {
                self.dive(depth + 1, open_layers.max(k + 1));
            }
            if k == open_layers {
                self.layer_sums.pop();
                self.layer_max.pop();
            } else {
                self.layer_sums[k] -= &self.areas[item];
            }
            if self.ticker.expired() {
                return;
            }
        }
    }

    /// Every open layer must still admit a completion cheaper than the
    /// incumbent. A layer's final height lies between its current value
    /// and what it reaches by swallowing everything unassigned.
    fn admissible(&self, assigned: usize, open_layers: usize) -> bool {
        let ub = ObjectiveValue::Exact(self.best_value.clone());
        let unassigned = &self.suffix[assigned];
        if assigned < self.order.len() {
            let a = &self.areas[self.order[assigned]];
            let square = ObjectiveValue::Sqrt(Rational::from_integer(16.into()) * a);
            if square >= ub {
                return false;
            }
        }
        for k in 0..open_layers {
            let w_lo = &self.layer_sums[k] / self.l1;
            let w_hi = (&self.layer_sums[k] + unassigned) / self.l1;
            let bound = min_perimeter_over(&self.areas[self.layer_max[k]], &w_lo, &w_hi);
            if bound >= ub {
                return false;
            }
        }
        true
    }
}

/// Exact largest-perimeter minimizer by depth-first branch-and-bound.
///
/// `initial` seeds the incumbent; by default the total-perimeter
/// optimum, which is usually close. On timeout the incumbent is
/// returned with valid bounds and status `TimeLimit`; the solver never
/// claims optimality it has not proven.
pub fn solve_peri_max_bb(
    instance: &Instance,
    time_limit: Option<Duration>,
    initial: Option<Partition>,
) -> Result<(Partition, SearchStats)> {
    let started = Instant::now();
    let incumbent = match initial {
        Some(p) => {
            p.validate(instance.len())?;
            p
        }
        None => solve_peri_sum(instance)?.0,
    };
    let incumbent_value = match evaluate(&realize(instance, &incumbent)?, ObjectiveKind::PeriMax) {
        ObjectiveValue::Exact(v) => v,
        ObjectiveValue::Sqrt(_) => unreachable!("perimeter is rational"),
    };

    let order = sorted_by_area_desc(instance);
    let suffix = suffix_sums(instance.areas(), &order);
    let n = instance.len();

    // Incumbent-independent root bound: every rectangle's layer height
    // is confined to [a / L1, L2].
    let root_lb = instance
        .areas()
        .iter()
        .map(|a| min_perimeter_over(a, &(a / instance.l1()), instance.l2()))
        .max()
        .expect("non-empty instance");

    let mut search = PeriMaxSearch {
        l1: instance.l1(),
        areas: instance.areas(),
        order,
        suffix,
        codes: vec![0; n],
        layer_sums: Vec::with_capacity(n),
        layer_max: Vec::with_capacity(n),
        best_value: incumbent_value,
        best_partition: incumbent.canonicalize(),
        nodes: 0,
        ticker: Ticker::new(time_limit),
    };
    if ObjectiveValue::Exact(search.best_value.clone()) > root_lb {
        search.dive(0, 0);
    }

    let timed_out = search.ticker.expired;
    let ub = rational_to_f64(&search.best_value);
    let stats = SearchStats {
        nodes: search.nodes,
        elapsed: started.elapsed().as_secs_f64(),
        bound_lb: if timed_out { root_lb.to_f64() } else { ub },
        bound_ub: ub,
        status: if timed_out {
            SearchStatus::TimeLimit
        } else {
            SearchStatus::Optimal
        },
    };
    Ok((search.best_partition, stats))
}

// ---------------------------------------------------------------------
// Aspect ratio: exact branch-and-bound
// ---------------------------------------------------------------------

struct AspectSearch<'a> {
    l1: &'a Rational,
    areas: &'a [Rational],
    order: Vec<usize>,
    suffix: Vec<Rational>,
    codes: Vec<usize>,
    layer_sums: Vec<Rational>,
    layer_max: Vec<usize>,
    layer_min: Vec<usize>,
    best_value: Rational,
    best_partition: Partition,
    nodes: u64,
    ticker: Ticker,
}

impl AspectSearch<'_> {
    fn dive(&mut self, depth: usize, open_layers: usize) {
        if self.ticker.expired() {
            return;
        }
        if depth == self.order.len() {
            let mut worst = Rational::one();
            for k in 0..open_layers {
                let h_sq = (&self.layer_sums[k] * &self.layer_sums[k]) / (self.l1 * self.l1);
                for idx in [self.layer_max[k], self.layer_min[k]] {
                    let a = &self.areas[idx];
                    let aspect = if *a > h_sq { a / &h_sq } else { &h_sq / a };
                    if aspect > worst {
                        worst = aspect;
                    }
                }
            }
            if worst < self.best_value {
                self.best_value = worst;
                self.best_partition = partition_from_codes(&self.order, &self.codes, open_layers);
            }
            return;
        }
        let item = self.order[depth];
        for k in 0..=open_layers {
            self.nodes += 1;
            if k == open_layers {
                self.layer_sums.push(self.areas[item].clone());
                self.layer_max.push(item);
                self.layer_min.push(item);
            } else {
                self.layer_sums[k] += &self.areas[item];
            }
            let saved_min = self.layer_min[k];
            // Items arrive in non-increasing area order, so the newest
            // member is the layer minimum.
            self.layer_min[k] = item;
            self.codes[depth] = k;
            if self.admissible(depth + 1, open_layers.max(k + 1)) {
                self.dive(depth + 1, open_layers.max(k + 1));
            }
            if k == open_layers {
                self.layer_sums.pop();
                self.layer_max.pop();
                self.layer_min.pop();
            } else {
                self.layer_sums[k] -= &self.areas[item];
                self.layer_min[k] = saved_min;
            }
            if self.ticker.expired() {
                return;
            }
        }
    }

    fn admissible(&self, assigned: usize, open_layers: usize) -> bool {
        let unassigned = &self.suffix[assigned];
        for k in 0..open_layers {
            let w_lo = &self.layer_sums[k] / self.l1;
            let w_hi = (&self.layer_sums[k] + unassigned) / self.l1;
            for idx in [self.layer_max[k], self.layer_min[k]] {
                if min_aspect_over(&self.areas[idx], &w_lo, &w_hi) >= self.best_value {
                    return false;
                }
            }
        }
        true
    }
}

/// Exact aspect-ratio minimizer by depth-first branch-and-bound; the
/// cross-check for the bisection scheme on mid-size instances.
pub fn solve_aspect_exact_bb(
    instance: &Instance,
    time_limit: Option<Duration>,
) -> Result<(Partition, SearchStats)> {
    let started = Instant::now();
    let incumbent = solve_peri_sum(instance)?.0;
    let incumbent_value =
        match evaluate(&realize(instance, &incumbent)?, ObjectiveKind::AspectRatio) {
            ObjectiveValue::Exact(v) => v,
            ObjectiveValue::Sqrt(_) => unreachable!("aspect ratio is rational"),
        };

    let order = sorted_by_area_desc(instance);
    let suffix = suffix_sums(instance.areas(), &order);
    let n = instance.len();
    let mut search = AspectSearch {
        l1: instance.l1(),
        areas: instance.areas(),
        order,
        suffix,
        codes: vec![0; n],
        layer_sums: Vec::with_capacity(n),
        layer_max: Vec::with_capacity(n),
        layer_min: Vec::with_capacity(n),
        best_value: incumbent_value,
        best_partition: incumbent.canonicalize(),
        nodes: 0,
        ticker: Ticker::new(time_limit),
    };
    if !search.best_value.is_one() {
        search.dive(0, 0);
    }

    let timed_out = search.ticker.expired;
    let ub = rational_to_f64(&search.best_value);
    let stats = SearchStats {
        nodes: search.nodes,
        elapsed: started.elapsed().as_secs_f64(),
        bound_lb: if timed_out { 1.0 } else { ub },
        bound_ub: ub,
        status: if timed_out {
            SearchStatus::TimeLimit
        } else {
            SearchStatus::Optimal
        },
    };
    Ok((search.best_partition, stats))
}

// ---------------------------------------------------------------------
// Interval feasibility decision
// ---------------------------------------------------------------------

/// Witness or refutation for "some partition keeps every layer height
/// inside all of its members' intervals".
#[derive(Clone, Debug)]
pub enum Feasibility {
    Feasible(Partition),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn witness(&self) -> Option<&Partition> {
        match self {
            Feasibility::Feasible(p) => Some(p),
            Feasibility::Infeasible => None,
        }
    }
}

struct FeasibilitySearch<'a> {
    l1: f64,
    areas: Vec<f64>,
    order: Vec<usize>,
    suffix: Vec<f64>,
    lo: &'a [f64],
    hi: &'a [f64],
    tolerance: f64,
    codes: Vec<usize>,
    layer_sums: Vec<f64>,
    layer_lo: Vec<f64>,
    layer_hi: Vec<f64>,
    nodes: u64,
    witness: Option<Partition>,
    ticker: Ticker,
}

impl FeasibilitySearch<'_> {
    fn dive(&mut self, depth: usize, open_layers: usize) {
        if self.witness.is_some() || self.ticker.expired() {
            return;
        }
        if depth == self.order.len() {
            for k in 0..open_layers {
                let height = self.layer_sums[k] / self.l1;
                if height < self.layer_lo[k] - self.tolerance
                    || height > self.layer_hi[k] + self.tolerance
                {
                    return;
                }
            }
            self.witness = Some(partition_from_codes(&self.order, &self.codes, open_layers));
            return;
        }
        let item = self.order[depth];
        for k in 0..=open_layers {
            self.nodes += 1;
            let (saved_lo, saved_hi) = if k == open_layers {
                self.layer_sums.push(self.areas[item]);
                self.layer_lo.push(self.lo[item]);
                self.layer_hi.push(self.hi[item]);
                (0.0, 0.0)
            } else {
                let saved = (self.layer_lo[k], self.layer_hi[k]);
                self.layer_sums[k] += self.areas[item];
                self.layer_lo[k] = self.layer_lo[k].max(self.lo[item]);
                self.layer_hi[k] = self.layer_hi[k].min(self.hi[item]);
                saved
            };
            self.codes[depth] = k;
            if self.admissible(depth + 1, open_layers.max(k + 1)) {
                self.dive(depth + 1, open_layers.max(k + 1));
            }
            if k == open_layers {
                self.layer_sums.pop();
                self.layer_lo.pop();
                self.layer_hi.pop();
            } else {
                self.layer_sums[k] -= self.areas[item];
                self.layer_lo[k] = saved_lo;
                self.layer_hi[k] = saved_hi;
            }
            if self.witness.is_some() || self.ticker.expired() {
                return;
            }
        }
    }

    fn admissible(&self, assigned: usize, open_layers: usize) -> bool {
        let unassigned = self.suffix[assigned];
        let mut deficit = 0.0;
        for k in 0..open_layers {
            // Dead when the members' intervals no longer intersect, or
            // the layer is already taller than every member allows.
            if self.layer_lo[k] > self.layer_hi[k] + self.tolerance {
                return false;
            }
            let height = self.layer_sums[k] / self.l1;
            if height > self.layer_hi[k] + self.tolerance {
                return false;
            }
            deficit += (self.layer_lo[k] - height).max(0.0);
        }
        // All shortfalls must be coverable by unassigned area.
        deficit <= unassigned / self.l1 + self.tolerance * open_layers as f64
    }
}

/// Decides whether some partition places every layer height within the
/// intersection of its members' intervals; interval membership is
/// tested with additive `tolerance`.
pub fn feasibility_decision(
    instance: &Instance,
    intervals: &[HeightInterval],
    tolerance: f64,
) -> Result<Feasibility> {
    Ok(feasibility_search(instance, intervals, tolerance, None)?.0)
}

fn feasibility_search(
    instance: &Instance,
    intervals: &[HeightInterval],
    tolerance: f64,
    time_limit: Option<Duration>,
) -> Result<(Feasibility, u64, bool)> {
    let n = instance.len();
    if intervals.len() != n {
        return Err(Error::IndexOutOfRange {
            index: intervals.len(),
            n,
        });
    }
    let mut lo = vec![f64::NAN; n];
    let mut hi = vec![f64::NAN; n];
    for interval in intervals {
        if interval.rect >= n {
            return Err(Error::IndexOutOfRange {
                index: interval.rect + 1,
                n,
            });
        }
        if !lo[interval.rect].is_nan() {
            return Err(Error::DuplicateIndex {
                index: interval.rect + 1,
            });
        }
        lo[interval.rect] = interval.lo;
        hi[interval.rect] = interval.hi;
    }
    let order = sorted_by_area_desc(instance);
    let areas: Vec<f64> = instance.areas().iter().map(rational_to_f64).collect();
    let mut suffix = vec![0.0; n + 1];
    for t in (0..n).rev() {
        suffix[t] = suffix[t + 1] + areas[order[t]];
    }
    let mut search = FeasibilitySearch {
        l1: rational_to_f64(instance.l1()),
        areas,
        order,
        suffix,
        lo: &lo,
        hi: &hi,
        tolerance,
        codes: vec![0; n],
        layer_sums: Vec::with_capacity(n),
        layer_lo: Vec::with_capacity(n),
        layer_hi: Vec::with_capacity(n),
        nodes: 0,
        witness: None,
        ticker: Ticker::new(time_limit),
    };
    search.dive(0, 0);
    let timed_out = search.ticker.expired;
    let feasibility = match search.witness {
        Some(p) => Feasibility::Feasible(p),
        None => Feasibility::Infeasible,
    };
    Ok((feasibility, search.nodes, timed_out))
}

// ---------------------------------------------------------------------
// Aspect ratio: binary search
// ---------------------------------------------------------------------

/// Bisection history: every probed midpoint with its feasibility
/// answer, the final bracket, and the best witness.
#[derive(Clone, Debug)]
pub struct BinarySearchTrace {
    pub iterations: Vec<(f64, bool)>,
    pub phi_low: f64,
    pub phi_up: f64,
    pub incumbent: Partition,
}

/// Result of [`solve_aspect_binary_search`]: the witness partition, its
/// exact aspect ratio, the bisection trace, and search statistics.
#[derive(Clone, Debug)]
pub struct BinarySearchOutcome {
    pub partition: Partition,
    pub value: Rational,
    pub trace: BinarySearchTrace,
    pub stats: SearchStats,
}

/// Minimizes the aspect ratio to within 0.01 by bisecting on the
/// decision problem "is there a layout with aspect ratio at most phi".
///
/// The bracket starts at `[1, phi3(s1)]` where `s1` is the
/// total-perimeter optimum; a feasible midpoint becomes the new upper
/// bound and its witness the incumbent. The returned value is the
/// incumbent's aspect ratio recomputed exactly.
pub fn solve_aspect_binary_search(
    instance: &Instance,
    time_limit: Option<Duration>,
) -> Result<BinarySearchOutcome> {
    let started = Instant::now();
    let deadline = time_limit.map(|d| started + d);
    let mut incumbent = solve_peri_sum(instance)?.0;
    let mut incumbent_value =
        match evaluate(&realize(instance, &incumbent)?, ObjectiveKind::AspectRatio) {
            ObjectiveValue::Exact(v) => v,
            ObjectiveValue::Sqrt(_) => unreachable!("aspect ratio is rational"),
        };

    let mut phi_low = 1.0_f64;
    let mut phi_up = rational_to_f64(&incumbent_value);
    let mut iterations = Vec::new();
    let mut nodes = 0u64;
    let mut status = SearchStatus::Optimal;

    if incumbent_value.is_one() {
        phi_low = phi_up;
    } else {
        while phi_up - phi_low >= BINARY_SEARCH_GAP {
            if deadline.is_some_and(|d| Instant::now() >= d) {
                status = SearchStatus::TimeLimit;
                break;
            }
            let phi_mid = (phi_low + phi_up) / 2.0;
            let intervals = aspect_intervals(instance, phi_mid)?;
            let remaining = deadline.map(|d| d.saturating_duration_since(Instant::now()));
            let (feasibility, probe_nodes, probe_timed_out) = feasibility_search(
                instance,
                &intervals,
                DEFAULT_FEASIBILITY_TOLERANCE,
                remaining,
            )?;
            nodes += probe_nodes;
            if probe_timed_out && !feasibility.is_feasible() {
                status = SearchStatus::TimeLimit;
                break;
            }
            match feasibility {
                Feasibility::Feasible(witness) => {
                    iterations.push((phi_mid, true));
                    phi_up = phi_mid;
                    incumbent_value = match evaluate(
                        &realize(instance, &witness)?,
                        ObjectiveKind::AspectRatio,
                    ) {
                        ObjectiveValue::Exact(v) => v,
                        ObjectiveValue::Sqrt(_) => unreachable!(),
                    };
                    incumbent = witness;
                }
                Feasibility::Infeasible => {
                    iterations.push((phi_mid, false));
                    phi_low = phi_mid;
                }
            }
        }
    }

    let partition = incumbent.canonicalize();
    Ok(BinarySearchOutcome {
        partition: partition.clone(),
        value: incumbent_value,
        trace: BinarySearchTrace {
            iterations,
            phi_low,
            phi_up,
            incumbent: partition,
        },
        stats: SearchStats {
            nodes,
            elapsed: started.elapsed().as_secs_f64(),
            bound_lb: phi_low,
            bound_ub: phi_up,
            status,
        },
    })
}
