//! Core domain types: instances, layer partitions, realized layouts, and
//! the four objective functions.
//!
//! A solution is an ordered partition of the rectangle set into layers.
//! Layer heights follow from the contained areas (`height = sum / L1`),
//! so every objective is a pure function of the partition. All geometry
//! is exact rational; only the deviation objective involves a square
//! root, and it is kept in squared form until a decimal is needed.

use std::cmp::{Ordering, Reverse};

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{rational_to_f64, Rational};

/// A region of `L1 x L2` to be split into soft rectangles of fixed areas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    l1: Rational,
    l2: Rational,
    areas: Vec<Rational>,
    name: Option<String>,
}

impl Instance {
    /// Validates positivity and that the areas exactly fill the region.
    pub fn new(l1: Rational, l2: Rational, areas: Vec<Rational>) -> Result<Self> {
        if areas.is_empty() {
            return Err(Error::EmptyInstance);
        }
        if !l1.is_positive() {
            return Err(Error::NonPositiveSide { side: "L1" });
        }
        if !l2.is_positive() {
            return Err(Error::NonPositiveSide { side: "L2" });
        }
        for (i, area) in areas.iter().enumerate() {
            if !area.is_positive() {
                return Err(Error::NonPositiveArea { index: i + 1 });
            }
        }
        let area_sum: Rational = areas.iter().sum();
        let region_area = &l1 * &l2;
        if area_sum != region_area {
            return Err(Error::AreaSumMismatch {
                area_sum: crate::scalar::format_rational(&area_sum),
                region_area: crate::scalar::format_rational(&region_area),
            });
        }
        Ok(Self {
            l1,
            l2,
            areas,
            name: None,
        })
    }

    /// Integer-sided convenience constructor.
    pub fn from_integers(l1: i64, l2: i64, areas: &[i64]) -> Result<Self> {
        Self::new(
            crate::scalar::rat_int(l1),
            crate::scalar::rat_int(l2),
            areas.iter().map(|&a| crate::scalar::rat_int(a)).collect(),
        )
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn l1(&self) -> &Rational {
        &self.l1
    }

    pub fn l2(&self) -> &Rational {
        &self.l2
    }

    pub fn areas(&self) -> &[Rational] {
        &self.areas
    }

    /// Number of soft rectangles.
    pub fn len(&self) -> usize {
        self.areas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.areas.is_empty()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }
}

/// An ordered partition of rectangle indices (0-based) into layers.
///
/// External formats use 1-based indices; conversion happens at the I/O
/// boundary.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Partition {
    layers: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(layers: Vec<Vec<usize>>) -> Self {
        Self { layers }
    }

    /// Everything in one layer.
    pub fn single_layer(n: usize) -> Self {
        Self {
            layers: vec![(0..n).collect()],
        }
    }

    pub fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// Checks disjointness, full coverage of `0..n`, and non-empty layers.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for (k, layer) in self.layers.iter().enumerate() {
            if layer.is_empty() {
                return Err(Error::EmptyLayer { layer: k + 1 });
            }
            for &i in layer {
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i + 1, n });
                }
                if seen[i] {
                    return Err(Error::DuplicateIndex { index: i + 1 });
                }
                seen[i] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::MissingIndex { index: missing + 1 });
        }
        Ok(())
    }

    /// Maps each rectangle to its layer id; fails on invalid partitions.
    pub fn layer_of(&self, n: usize) -> Result<Vec<usize>> {
        self.validate(n)?;
        let mut owner = vec![0; n];
        for (k, layer) in self.layers.iter().enumerate() {
            for &i in layer {
                owner[i] = k;
            }
        }
        Ok(owner)
    }

    /// Canonical form: layers by non-increasing cardinality, ties by
    /// smallest contained index; indices ascending within each layer.
    pub fn canonicalize(&self) -> Partition {
        let mut layers: Vec<Vec<usize>> = self.layers.clone();
        for layer in &mut layers {
            layer.sort_unstable();
        }
        layers.sort_by_key(|layer| (Reverse(layer.len()), layer.first().copied()));
        Partition { layers }
    }

    /// 1-based layer lists for files and terminal output.
    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.layers
            .iter()
            .map(|layer| layer.iter().map(|&i| i + 1).collect())
            .collect()
    }

    /// Parses 1-based layer lists; zero indices are rejected.
    pub fn from_one_based(layers: Vec<Vec<usize>>) -> Result<Self> {
        let mut shifted = Vec::with_capacity(layers.len());
        for layer in layers {
            let mut out = Vec::with_capacity(layer.len());
            for i in layer {
                if i == 0 {
                    return Err(Error::IndexOutOfRange { index: 0, n: 0 });
                }
                out.push(i - 1);
            }
            shifted.push(out);
        }
        Ok(Self { layers: shifted })
    }
}

/// Realized geometry of one rectangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectShape {
    pub layer: usize,
    pub width: Rational,
    pub height: Rational,
}

/// Exact geometry of a realized partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    l1: Rational,
    layer_heights: Vec<Rational>,
    rects: Vec<RectShape>,
}

impl Layout {
    pub fn l1(&self) -> &Rational {
        &self.l1
    }

    pub fn layer_heights(&self) -> &[Rational] {
        &self.layer_heights
    }

    pub fn rects(&self) -> &[RectShape] {
        &self.rects
    }
}

/// The four objectives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObjectiveKind {
    /// Total perimeter.
    PeriSum,
    /// Largest perimeter.
    PeriMax,
    /// Largest aspect ratio (always at least 1).
    AspectRatio,
    /// Largest side deviation `|h - l| / sqrt(a)`, the linearizable
    /// stand-in for the aspect ratio.
    AspectSurrogate,
}

impl ObjectiveKind {
    pub const ALL: [ObjectiveKind; 4] = [
        ObjectiveKind::PeriSum,
        ObjectiveKind::PeriMax,
        ObjectiveKind::AspectRatio,
        ObjectiveKind::AspectSurrogate,
    ];
}

impl std::fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ObjectiveKind::PeriSum => "peri-sum",
            ObjectiveKind::PeriMax => "peri-max",
            ObjectiveKind::AspectRatio => "aspect",
            ObjectiveKind::AspectSurrogate => "aspect-surrogate",
        };
        f.write_str(name)
    }
}

/// An objective value that is either an exact rational or the square
/// root of one. Ordering is exact in both cases: mixed comparisons go
/// through the squared form.
#[derive(Clone, Debug)]
pub enum ObjectiveValue {
    Exact(Rational),
    /// `Sqrt(q)` stands for `sqrt(q)` with `q >= 0`.
    Sqrt(Rational),
}

impl ObjectiveValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            ObjectiveValue::Exact(q) => rational_to_f64(q),
            ObjectiveValue::Sqrt(q) => rational_to_f64(q).sqrt(),
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            ObjectiveValue::Exact(q) => Some(q),
            ObjectiveValue::Sqrt(_) => None,
        }
    }
}

impl PartialEq for ObjectiveValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ObjectiveValue {}

impl PartialOrd for ObjectiveValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ObjectiveValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use ObjectiveValue::{Exact, Sqrt};
        match (self, other) {
            (Exact(a), Exact(b)) => a.cmp(b),
            (Sqrt(a), Sqrt(b)) => a.cmp(b),
            (Exact(a), Sqrt(b)) => {
                if a.is_negative() {
                    Ordering::Less
                } else {
                    (a * a).cmp(b)
                }
            }
            (Sqrt(_), Exact(_)) => other.cmp(self).reverse(),
        }
    }
}

/// Realizes a partition: layer heights from contained areas, rectangle
/// widths from `area / height`.
pub fn realize(instance: &Instance, partition: &Partition) -> Result<Layout> {
    partition.validate(instance.len())?;
    let n = instance.len();
    let mut layer_heights = Vec::with_capacity(partition.layer_count());
    let mut rects = vec![None; n];
    for (k, layer) in partition.layers().iter().enumerate() {
        let layer_area: Rational = layer.iter().map(|&i| &instance.areas()[i]).sum();
        let height = layer_area / instance.l1();
        for &i in layer {
            rects[i] = Some(RectShape {
                layer: k,
                width: &instance.areas()[i] / &height,
                height: height.clone(),
            });
        }
        layer_heights.push(height);
    }
    Ok(Layout {
        l1: instance.l1().clone(),
        layer_heights,
        rects: rects.into_iter().map(|r| r.expect("covered")).collect(),
    })
}

/// Evaluates an objective on a realized layout.
pub fn evaluate(layout: &Layout, kind: ObjectiveKind) -> ObjectiveValue {
    let two = Rational::from_integer(2.into());
    match kind {
        ObjectiveKind::PeriSum => {
            let half: Rational = layout
                .rects()
                .iter()
                .map(|r| &r.width + &r.height)
                .sum();
            ObjectiveValue::Exact(two * half)
        }
        ObjectiveKind::PeriMax => {
            let half = layout
                .rects()
                .iter()
                .map(|r| &r.width + &r.height)
                .max()
                .expect("non-empty layout");
            ObjectiveValue::Exact(two * half)
        }
        ObjectiveKind::AspectRatio => {
            let best = layout
                .rects()
                .iter()
                .map(aspect_ratio)
                .max()
                .expect("non-empty layout");
            ObjectiveValue::Exact(best)
        }
        ObjectiveKind::AspectSurrogate => {
            let best = layout
                .rects()
                .iter()
                .map(surrogate_sq)
                .max()
                .expect("non-empty layout");
            ObjectiveValue::Sqrt(best)
        }
    }
}

/// Aspect ratio `max(w/h, h/w)` of one rectangle.
pub fn aspect_ratio(rect: &RectShape) -> Rational {
    let a = &rect.width / &rect.height;
    let b = &rect.height / &rect.width;
    a.max(b)
}

/// Squared deviation `(w - h)^2 / (w * h)` of one rectangle; the
/// deviation objective is its square root.
pub fn surrogate_sq(rect: &RectShape) -> Rational {
    let diff = &rect.width - &rect.height;
    (&diff * &diff) / (&rect.width * &rect.height)
}

/// Total perimeter computed from the partition alone, without realizing
/// any geometry: `2 * sum_k (|S_k| * height_k + L1)`.
pub fn peri_sum_of_partition(instance: &Instance, partition: &Partition) -> Result<Rational> {
    partition.validate(instance.len())?;
    let mut total = Rational::zero();
    for layer in partition.layers() {
        let layer_area: Rational = layer.iter().map(|&i| &instance.areas()[i]).sum();
        let height = layer_area / instance.l1();
        total += Rational::from_integer(layer.len().into()) * height + instance.l1();
    }
    Ok(total * Rational::from_integer(2.into()))
}

/// Exact total-perimeter change if rectangles `i` and `j` (0-based, in
/// different layers) were exchanged: `(2/L1) * (|S_k| - |S_l|) * (a_j - a_i)`
/// where `i` sits in `S_k` and `j` in `S_l`.
pub fn swap_delta(
    instance: &Instance,
    partition: &Partition,
    i: usize,
    j: usize,
) -> Result<Rational> {
    let n = instance.len();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i + 1, n });
    }
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j + 1, n });
    }
    let owner = partition.layer_of(n)?;
    if owner[i] == owner[j] {
        return Err(Error::SameLayer { i: i + 1, j: j + 1 });
    }
    let size_i = partition.layers()[owner[i]].len() as i64;
    let size_j = partition.layers()[owner[j]].len() as i64;
    let size_diff = Rational::from_integer((size_i - size_j).into());
    let area_diff = &instance.areas()[j] - &instance.areas()[i];
    Ok(Rational::from_integer(2.into()) / instance.l1() * size_diff * area_diff)
}

/// True when every rectangle is square, in which case all four
/// objectives are simultaneously at their minimum.
pub fn all_square(layout: &Layout) -> bool {
    layout.rects().iter().all(|r| r.width == r.height)
}

impl ObjectiveValue {
    /// Exact value of the objective's unit element (1 for ratios, 0 for
    /// deviations); used for early exits.
    pub fn is_unit_aspect(&self) -> bool {
        match self {
            ObjectiveValue::Exact(q) => q.is_one(),
            ObjectiveValue::Sqrt(q) => q.is_zero(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    fn micro() -> Instance {
        Instance::from_integers(2, 2, &[1, 1, 2]).unwrap()
    }

    fn part(layers: &[&[usize]]) -> Partition {
        Partition::new(layers.iter().map(|l| l.to_vec()).collect())
    }

    #[test]
    fn realize_micro_instance() {
        let layout = realize(&micro(), &part(&[&[0, 1], &[2]])).unwrap();
        assert_eq!(layout.layer_heights(), &[rat_int(1), rat_int(1)]);
        let widths: Vec<_> = layout.rects().iter().map(|r| r.width.clone()).collect();
        assert_eq!(widths, vec![rat_int(1), rat_int(1), rat_int(2)]);
    }

    #[test]
    fn realize_single_rectangle() {
        let inst = Instance::from_integers(3, 2, &[6]).unwrap();
        let layout = realize(&inst, &Partition::single_layer(1)).unwrap();
        assert_eq!(layout.layer_heights(), &[rat_int(2)]);
        assert_eq!(layout.rects()[0].width, rat_int(3));
    }

    #[test]
    fn realize_uneven_layers() {
        let layout = realize(&micro(), &part(&[&[0], &[1, 2]])).unwrap();
        assert_eq!(layout.layer_heights(), &[rat(1, 2), rat(3, 2)]);
        let widths: Vec<_> = layout.rects().iter().map(|r| r.width.clone()).collect();
        assert_eq!(widths, vec![rat_int(2), rat(2, 3), rat(4, 3)]);
    }

    #[test]
    fn realize_rejects_bad_partitions() {
        let inst = micro();
        assert!(matches!(
            realize(&inst, &part(&[&[0, 0], &[1, 2]])),
            Err(Error::DuplicateIndex { index: 1 })
        ));
        assert!(matches!(
            realize(&inst, &part(&[&[0, 1]])),
            Err(Error::MissingIndex { index: 3 })
        ));
        assert!(matches!(
            realize(&inst, &part(&[&[0, 1, 2], &[]])),
            Err(Error::EmptyLayer { layer: 2 })
        ));
        assert!(matches!(
            realize(&inst, &part(&[&[0, 1, 3]])),
            Err(Error::IndexOutOfRange { index: 4, n: 3 })
        ));
    }

    #[test]
    fn evaluate_micro_partitions() {
        let layout = realize(&micro(), &part(&[&[0, 1], &[2]])).unwrap();
        assert_eq!(
            evaluate(&layout, ObjectiveKind::PeriSum),
            ObjectiveValue::Exact(rat_int(14))
        );
        assert_eq!(
            evaluate(&layout, ObjectiveKind::PeriMax),
            ObjectiveValue::Exact(rat_int(6))
        );
        assert_eq!(
            evaluate(&layout, ObjectiveKind::AspectRatio),
            ObjectiveValue::Exact(rat_int(2))
        );

        let layout = realize(&micro(), &part(&[&[0], &[1, 2]])).unwrap();
        assert_eq!(
            evaluate(&layout, ObjectiveKind::PeriSum),
            ObjectiveValue::Exact(rat_int(15))
        );
        assert_eq!(
            evaluate(&layout, ObjectiveKind::PeriMax),
            ObjectiveValue::Exact(rat(17, 3))
        );
        assert_eq!(
            evaluate(&layout, ObjectiveKind::AspectRatio),
            ObjectiveValue::Exact(rat_int(4))
        );
    }

    #[test]
    fn evaluate_square_rectangle() {
        let inst = Instance::from_integers(2, 2, &[4]).unwrap();
        let layout = realize(&inst, &Partition::single_layer(1)).unwrap();
        assert_eq!(
            evaluate(&layout, ObjectiveKind::AspectRatio),
            ObjectiveValue::Exact(rat_int(1))
        );
        assert_eq!(
            evaluate(&layout, ObjectiveKind::AspectSurrogate),
            ObjectiveValue::Sqrt(rat_int(0))
        );
        assert!(all_square(&layout));
    }

    #[test]
    fn swap_delta_matches_reevaluation() {
        let inst = micro();
        let before = part(&[&[0, 2], &[1]]);
        // Exchange rectangle 3 (area 2) with rectangle 2 (area 1).
        let delta = swap_delta(&inst, &before, 2, 1).unwrap();
        assert_eq!(delta, rat_int(-1));
        let after = part(&[&[0, 1], &[2]]);
        let phi_before = peri_sum_of_partition(&inst, &before).unwrap();
        let phi_after = peri_sum_of_partition(&inst, &after).unwrap();
        assert_eq!(phi_before, rat_int(15));
        assert_eq!(phi_after, rat_int(14));
        assert_eq!(phi_after - phi_before, delta);
    }

    #[test]
    fn swap_delta_vanishing_cases() {
        let inst = Instance::from_integers(4, 2, &[1, 2, 2, 3]).unwrap();
        // Equal cardinalities.
        let p = part(&[&[0, 3], &[1, 2]]);
        assert_eq!(swap_delta(&inst, &p, 0, 1).unwrap(), rat_int(0));
        // Equal areas in different-size layers.
        let p = part(&[&[0, 1, 3], &[2]]);
        assert_eq!(swap_delta(&inst, &p, 1, 2).unwrap(), rat_int(0));
    }

    #[test]
    fn swap_delta_same_layer_is_an_error() {
        let inst = micro();
        let p = part(&[&[0, 1], &[2]]);
        assert!(matches!(
            swap_delta(&inst, &p, 0, 1),
            Err(Error::SameLayer { i: 1, j: 2 })
        ));
    }

    #[test]
    fn canonicalize_examples() {
        let p = part(&[&[2], &[0, 1]]);
        assert_eq!(p.canonicalize(), part(&[&[0, 1], &[2]]));
        let canonical = part(&[&[0, 1], &[2]]);
        assert_eq!(canonical.canonicalize(), canonical);
        let p = part(&[&[1], &[0]]);
        assert_eq!(p.canonicalize(), part(&[&[0], &[1]]));
        // Unsorted members get sorted.
        let p = part(&[&[1, 0], &[2]]);
        assert_eq!(p.canonicalize(), part(&[&[0, 1], &[2]]));
    }

    #[test]
    fn instance_validation() {
        assert!(matches!(
            Instance::from_integers(2, 2, &[]),
            Err(Error::EmptyInstance)
        ));
        assert!(matches!(
            Instance::from_integers(2, 2, &[1, 1, 1]),
            Err(Error::AreaSumMismatch { .. })
        ));
        assert!(matches!(
            Instance::from_integers(2, 2, &[0, 2, 2]),
            Err(Error::NonPositiveArea { index: 1 })
        ));
        assert!(matches!(
            Instance::from_integers(0, 2, &[1]),
            Err(Error::NonPositiveSide { side: "L1" })
        ));
    }

    #[test]
    fn peri_sum_two_forms_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.random_range(1..=8);
            let areas: Vec<i64> = (0..n).map(|_| rng.random_range(1..=50)).collect();
            let total: i64 = areas.iter().sum();
            let inst = Instance::new(
                rat_int(total),
                rat_int(1),
                areas.iter().map(|&a| rat_int(a)).collect(),
            )
            .unwrap();
            let partition = random_partition(n, &mut rng);
            let layout = realize(&inst, &partition).unwrap();
            let via_layout = evaluate(&layout, ObjectiveKind::PeriSum);
            let via_partition = peri_sum_of_partition(&inst, &partition).unwrap();
            assert_eq!(via_layout, ObjectiveValue::Exact(via_partition));
        }
    }

    #[test]
    fn aspect_and_surrogate_share_argmax() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.random_range(2..=7);
            let areas: Vec<i64> = (0..n).map(|_| rng.random_range(1..=60)).collect();
            let total: i64 = areas.iter().sum();
            let inst = Instance::new(
                rat_int(total * 2),
                rat(1, 2),
                areas.iter().map(|&a| rat_int(a)).collect(),
            )
            .unwrap();
            let layout = realize(&inst, &random_partition(n, &mut rng)).unwrap();
            let max_aspect = layout.rects().iter().map(aspect_ratio).max().unwrap();
            let max_dev = layout.rects().iter().map(surrogate_sq).max().unwrap();
            let aspect_argmax: Vec<usize> = layout
                .rects()
                .iter()
                .enumerate()
                .filter(|(_, r)| aspect_ratio(r) == max_aspect)
                .map(|(i, _)| i)
                .collect();
            let dev_argmax: Vec<usize> = layout
                .rects()
                .iter()
                .enumerate()
                .filter(|(_, r)| surrogate_sq(r) == max_dev)
                .map(|(i, _)| i)
                .collect();
            assert_eq!(aspect_argmax, dev_argmax);
        }
    }

    #[test]
    fn objective_value_mixed_ordering() {
        // sqrt(2) vs 3/2: 2 < 9/4.
        assert!(ObjectiveValue::Sqrt(rat_int(2)) < ObjectiveValue::Exact(rat(3, 2)));
        assert!(ObjectiveValue::Exact(rat_int(1)) < ObjectiveValue::Sqrt(rat_int(2)));
        assert_eq!(
            ObjectiveValue::Exact(rat_int(2)),
            ObjectiveValue::Sqrt(rat_int(4))
        );
        assert!(ObjectiveValue::Exact(rat_int(-1)) < ObjectiveValue::Sqrt(rat_int(0)));
    }

    pub(crate) fn random_partition(n: usize, rng: &mut impl rand::Rng) -> Partition {
        let mut layers: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let choice = rng.random_range(0..=layers.len());
            if choice == layers.len() {
                layers.push(vec![i]);
            } else {
                layers[choice].push(i);
            }
        }
        Partition::new(layers)
    }
}
