//! Exact total-perimeter solver.
//!
//! After sorting the areas, an optimal solution uses layers of
//! consecutive sorted indices (a consequence of the exchange argument in
//! [`crate::domain::swap_delta`]). Choosing the layer boundaries is then
//! a least-weight subsequence problem whose weight function is concave,
//! which the candidate-stack solver handles in `O(n log n)` weight
//! evaluations.
//!
//! Two solvers are provided: [`solve_clws_quadratic`], a plain `O(n^2)`
//! recurrence valid for arbitrary weights and used as the oracle, and
//! [`solve_clws_fast`], the stack method requiring concavity. Both break
//! ties towards the smallest predecessor so their breakpoints are
//! identical, not merely equal in value. A linear-time method exists for
//! this problem; it is not implemented here because sorting dominates
//! the overall bound anyway, and the stack method is far easier to
//! check. The solvers are generic over the weight scalar so the hot
//! path can run on scaled integers while oracle runs stay rational.

use std::collections::VecDeque;

use num::{Integer, Zero};
use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{Instance, Partition};
use crate::error::{Error, Result};
use crate::scalar::{Int, Rational, Weight};

/// Areas in non-decreasing order with prefix sums and the sort
/// permutation (sorted position to original index).
#[derive(Clone, Debug)]
pub struct PrefixAreas {
    sorted: Vec<Rational>,
    prefix: Vec<Rational>,
    perm: Vec<usize>,
}

impl PrefixAreas {
    pub fn from_instance(instance: &Instance) -> Self {
        Self::from_areas(instance.areas())
    }

    /// Stable sort, so equal areas keep their input order.
    pub fn from_areas(areas: &[Rational]) -> Self {
        let mut perm: Vec<usize> = (0..areas.len()).collect();
        perm.sort_by(|&a, &b| areas[a].cmp(&areas[b]));
        let sorted: Vec<Rational> = perm.iter().map(|&i| areas[i].clone()).collect();
        let mut prefix = Vec::with_capacity(sorted.len() + 1);
        prefix.push(Rational::zero());
        for area in &sorted {
            let last = prefix.last().unwrap().clone();
            prefix.push(last + area);
        }
        Self {
            sorted,
            prefix,
            perm,
        }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[Rational] {
        &self.sorted
    }

    pub fn prefix(&self) -> &[Rational] {
        &self.prefix
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Sum of sorted areas `i+1..=j`.
    pub fn range_sum(&self, i: usize, j: usize) -> Rational {
        &self.prefix[j] - &self.prefix[i]
    }
}

/// Total perimeter of the sorted rectangles `i+1..=j` packed into one
/// full-width layer: `2 * (L1 + (j - i) / L1 * (P[j] - P[i]))`.
pub fn weight(prefix: &PrefixAreas, l1: &Rational, i: usize, j: usize) -> Result<Rational> {
    if i >= j || j > prefix.len() {
        return Err(Error::WeightRange { i, j });
    }
    let count = Rational::from_integer((j - i).into());
    Ok(Rational::from_integer(2.into()) * (l1 + count / l1 * prefix.range_sum(i, j)))
}

/// Layer boundaries `0 = b_0 < b_1 < ... < b_k = n` over sorted positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Breakpoints(Vec<usize>);

impl Breakpoints {
    pub fn points(&self) -> &[usize] {
        &self.0
    }

    /// Half-open segments `(start, end]` between consecutive breakpoints.
    pub fn segments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.windows(2).map(|w| (w[0], w[1]))
    }
}

/// Reference `O(n^2)` least-weight subsequence recurrence. Valid for
/// arbitrary weights; ties broken by the smallest predecessor.
pub fn solve_clws_quadratic<W, F>(n: usize, mut weight: F) -> Result<(Breakpoints, W)>
where
    W: Weight,
    F: FnMut(usize, usize) -> W,
{
    if n == 0 {
        return Err(Error::EmptySubsequence);
    }
    let mut best: Vec<Option<W>> = vec![None; n + 1];
    best[0] = Some(W::zero());
    let mut pred = vec![0usize; n + 1];
    for j in 1..=n {
        let mut current: Option<W> = None;
        for i in 0..j {
            let candidate = best[i].clone().expect("filled in order") + weight(i, j);
            if current.as_ref().is_none_or(|c| candidate < *c) {
                current = Some(candidate);
                pred[j] = i;
            }
        }
        best[j] = current;
    }
    Ok((
        reconstruct(&pred, n),
        best[n].take().expect("n >= 1 filled"),
    ))
}

/// Candidate-stack least-weight subsequence solver for concave weights.
///
/// Keeps a deque of `(candidate, start)` pairs meaning "from `start` on,
/// this candidate is the best predecessor seen so far"; a new candidate
/// claims a suffix of positions located by binary search. Requires the
/// quadrangle inequality (checked only by tests); `O(n log n)` weight
/// evaluations, measured at no more than `2 * n * (log2(n) + 4)`.
pub fn solve_clws_fast<W, F>(n: usize, mut weight: F) -> Result<(Breakpoints, W)>
where
    W: Weight,
    F: FnMut(usize, usize) -> W,
{
    if n == 0 {
        return Err(Error::EmptySubsequence);
    }
    let mut values: Vec<Option<W>> = vec![None; n + 1];
    values[0] = Some(W::zero());
    let mut pred = vec![0usize; n + 1];

    fn g<W, F>(values: &[Option<W>], cand: usize, pos: usize, weight: &mut F) -> W
    where
        W: Weight,
        F: FnMut(usize, usize) -> W,
    {
        values[cand].clone().expect("candidate already scored") + weight(cand, pos)
    }

    struct Entry {
        cand: usize,
        start: usize,
    }
    let mut deque: VecDeque<Entry> = VecDeque::new();
    deque.push_back(Entry { cand: 0, start: 1 });

    for j in 1..=n {
        while deque.len() >= 2 && deque[1].start <= j {
            deque.pop_front();
        }
        let owner = deque.front().expect("never emptied").cand;
        values[j] = Some(g(&values, owner, j, &mut weight));
        pred[j] = owner;
        if j == n {
            break;
        }
        // A later candidate can only improve on later positions, so if j
        // does not strictly win at n it never wins anywhere (ties keep
        // the smaller candidate, matching the quadratic tie-break).
        let back = deque.back().expect("never emptied").cand;
        if g(&values, j, n, &mut weight) >= g(&values, back, n, &mut weight) {
            continue;
        }
        loop {
            let (cand, start) = {
                let e = deque.back().expect("checked before loop");
                (e.cand, e.start)
            };
            let lo = start.max(j + 1);
            if g(&values, j, lo, &mut weight) < g(&values, cand, lo, &mut weight) {
                deque.pop_back();
                if deque.is_empty() {
                    deque.push_back(Entry { cand: j, start: lo });
                    break;
                }
            } else {
                // j wins at n but not at lo; the win region is a suffix,
                // find its first position.
                let mut lose = lo;
                let mut win = n;
                while win - lose > 1 {
                    let mid = lose + (win - lose) / 2;
                    if g(&values, j, mid, &mut weight) < g(&values, cand, mid, &mut weight) {
                        win = mid;
                    } else {
                        lose = mid;
                    }
                }
                deque.push_back(Entry {
                    cand: j,
                    start: win,
                });
                break;
            }
        }
    }
    Ok((
        reconstruct(&pred, n),
        values[n].take().expect("n >= 1 filled"),
    ))
}

fn reconstruct(pred: &[usize], n: usize) -> Breakpoints {
    let mut points = vec![n];
    let mut at = n;
    while at > 0 {
        at = pred[at];
        points.push(at);
    }
    points.reverse();
    Breakpoints(points)
}

/// Globally optimal total-perimeter partition with its exact value.
///
/// Sorts the areas, solves the least-weight subsequence problem over
/// scaled integer weights (exact; `i128` when the magnitudes allow it,
/// big integers otherwise), and maps the chosen segments back to the
/// original indices.
pub fn solve_peri_sum(instance: &Instance) -> Result<(Partition, Rational)> {
    let prefix = PrefixAreas::from_instance(instance);
    let n = prefix.len();

    // Common denominator D: with A_i = a_i * D and L = L1 * D integral,
    // w(i, j) * L1 * D^2 = 2 * (L^2 + (j - i) * (P[j] - P[i]) * D * D)
    // is an integer, and scaling all weights by L1 * D^2 > 0 does not
    // change the optimal breakpoints.
    let mut denom_lcm: Int = instance.l1().denom().clone();
    for area in prefix.sorted() {
        denom_lcm = denom_lcm.lcm(area.denom());
    }
    let scaled_l1: Int = (instance.l1() * Rational::from_integer(denom_lcm.clone()))
        .to_integer();
    let scaled_prefix: Vec<Int> = prefix
        .prefix()
        .iter()
        .map(|p| (p * Rational::from_integer(denom_lcm.clone())).to_integer())
        .collect();

    let l1_sq = &scaled_l1 * &scaled_l1;
    let weight_cap: Int = (&l1_sq + Int::from(n) * &scaled_prefix[n] * &denom_lcm) * Int::from(2);
    let fits_i128 = Int::from(n.max(1)) * &weight_cap < Int::from(i128::MAX / 4);

    let (breakpoints, total) = if fits_i128 {
        let l1_sq: i128 = int_to_i128(&l1_sq);
        let d: i128 = int_to_i128(&denom_lcm);
        let p: Vec<i128> = scaled_prefix.iter().map(int_to_i128).collect();
        let (bp, value) = solve_clws_fast(n, |i, j| {
            2 * (l1_sq + (j - i) as i128 * (p[j] - p[i]) * d)
        })?;
        (bp, Int::from(value))
    } else {
        let (bp, value) = solve_clws_fast(n, |i, j| {
            (&l1_sq + Int::from(j - i) * (&scaled_prefix[j] - &scaled_prefix[i]) * &denom_lcm)
                * Int::from(2)
        })?;
        (bp, value)
    };

    let layers: Vec<Vec<usize>> = breakpoints
        .segments()
        .map(|(lo, hi)| prefix.perm()[lo..hi].to_vec())
        .collect();
    let partition = Partition::new(layers).canonicalize();
    let value = Rational::new(total, scaled_l1 * denom_lcm);
    Ok((partition, value))
}

fn int_to_i128(value: &Int) -> i128 {
    num::ToPrimitive::to_i128(value).expect("bounded by weight_cap check")
}

/// Outcome of sampling the quadrangle inequality on random index
/// quadruples.
#[derive(Clone, Debug)]
pub struct ConcavityReport {
    pub samples: usize,
    /// First quadruple `(i0, i1, j0, j1)` violating strict concavity.
    pub counterexample: Option<(usize, usize, usize, usize)>,
}

impl ConcavityReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Samples random quadruples `i0 < i1 < j0 < j1` and checks the strict
/// quadrangle inequality
/// `w(i0, j0) + w(i1, j1) < w(i0, j1) + w(i1, j0)`.
pub fn check_concavity(
    prefix: &PrefixAreas,
    l1: &Rational,
    samples: usize,
    seed: u64,
) -> Result<ConcavityReport> {
    let n = prefix.len();
    if n < 4 {
        return Err(Error::TooSmallForConcavity { n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for run in 0..samples {
        let mut picks: Vec<usize> = sample_indices(&mut rng, n + 1, 4).into_vec();
        picks.sort_unstable();
        let (i0, i1, j0, j1) = (picks[0], picks[1], picks[2], picks[3]);
        let lhs = weight(prefix, l1, i0, j0)? + weight(prefix, l1, i1, j1)?;
        let rhs = weight(prefix, l1, i0, j1)? + weight(prefix, l1, i1, j0)?;
        if lhs >= rhs {
            return Ok(ConcavityReport {
                samples: run + 1,
                counterexample: Some((i0, i1, j0, j1)),
            });
        }
    }
    Ok(ConcavityReport {
        samples,
        counterexample: None,
    })
}

/// Convenience wrapper checking concavity of an instance's weight data.
pub fn check_instance_concavity(
    instance: &Instance,
    samples: usize,
    seed: u64,
) -> Result<ConcavityReport> {
    check_concavity(
        &PrefixAreas::from_instance(instance),
        instance.l1(),
        samples,
        seed,
    )
}
