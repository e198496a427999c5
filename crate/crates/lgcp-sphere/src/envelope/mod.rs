//! Global rank envelope testing over combined summary curves.
//!
//! A goodness-of-fit run compares one observed curve against `s` curves
//! simulated from the fitted model. Each curve receives an extreme rank:
//! its most extreme pointwise position relative to the whole bundle, low
//! ranks meaning most extreme. The observed rank yields a liberal and a
//! conservative p-value (ties make the p-value an interval), and peeling
//! the `k_level` most extreme simulated curves yields a global envelope.

mod pipeline;

pub use pipeline::{
    informative_grid, run_gof_pipeline, thinning_sensitivity, FittedModel, GofConfig,
    GofOutcome, ThinningSweep,
};

use crate::error::{Error, Result};
use crate::summaries::{CurveKind, SummaryCurve};

/// One observed curve and `s` simulated curves on a shared coordinate set,
/// optionally split into labeled segments (concatenated F, G, J).
#[derive(Debug, Clone)]
pub struct CurveSet {
    observed: Vec<f64>,
    simulated: Vec<Vec<f64>>,
    r: Vec<f64>,
    segments: Vec<(CurveKind, usize, usize)>,
}

impl CurveSet {
    /// Strict constructor: every row must have the same length and an
    /// identical missing-coordinate (NaN) pattern, and at least one
    /// coordinate must be present.
    pub fn new(
        observed: Vec<f64>,
        simulated: Vec<Vec<f64>>,
        r: Vec<f64>,
        segments: Vec<(CurveKind, usize, usize)>,
    ) -> Result<Self> {
        if simulated.is_empty() {
            return Err(Error::InvalidArgument(
                "need at least one simulated curve".into(),
            ));
        }
        let m = observed.len();
        if r.len() != m {
            return Err(Error::InvalidArgument(format!(
                "coordinate positions ({}) do not match curve length ({m})",
                r.len()
            )));
        }
        for (i, row) in simulated.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidArgument(format!(
                    "simulated curve {i} has length {}, expected {m}",
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                if v.is_nan() != observed[j].is_nan() {
                    return Err(Error::MissingValues(format!(
                        "curve {i} and the observed curve disagree on missing \
                         coordinate {j}"
                    )));
                }
            }
        }
        if observed.iter().all(|v| v.is_nan()) {
            return Err(Error::MissingValues(
                "every coordinate is missing".into(),
            ));
        }
        let mut seg_sorted = segments.clone();
        seg_sorted.sort_by_key(|&(_, start, _)| start);
        for &(_, start, end) in &seg_sorted {
            if start > end || end > m {
                return Err(Error::InvalidArgument(format!(
                    "segment bounds {start}..{end} exceed curve length {m}"
                )));
            }
        }
        Ok(Self { observed, simulated, r, segments })
    }

    /// Build from concatenated (F, G, J) triples, masking out any
    /// coordinate that is missing in at least one replicate so the missing
    /// pattern is identical across rows.
    pub fn from_fgj(
        observed: &(SummaryCurve, SummaryCurve, SummaryCurve),
        simulated: &[(SummaryCurve, SummaryCurve, SummaryCurve)],
    ) -> Result<Self> {
        if simulated.is_empty() {
            return Err(Error::InvalidArgument(
                "need at least one simulated curve".into(),
            ));
        }
        let concat = |t: &(SummaryCurve, SummaryCurve, SummaryCurve)| -> Result<Vec<f64>> {
            for (curve, want) in [
                (&t.0, CurveKind::F),
                (&t.1, CurveKind::G),
                (&t.2, CurveKind::J),
            ] {
                if curve.kind() != want {
                    return Err(Error::InvalidArgument(format!(
                        "expected an {want} curve, got {}",
                        curve.kind()
                    )));
                }
                if curve.grid().values() != observed.0.grid().values() {
                    return Err(Error::InvalidArgument(
                        "all curves must share the observed grid".into(),
                    ));
                }
            }
            let mut row = t.0.values().to_vec();
            row.extend_from_slice(t.1.values());
            row.extend_from_slice(t.2.values());
            Ok(row)
        };

        let mut obs = concat(observed)?;
        let mut rows: Vec<Vec<f64>> = simulated.iter().map(concat).collect::<Result<_>>()?;
        for j in 0..obs.len() {
            let missing =
                obs[j].is_nan() || rows.iter().any(|row| row[j].is_nan());
            if missing {
                obs[j] = f64::NAN;
                for row in &mut rows {
                    row[j] = f64::NAN;
                }
            }
        }
        let m = observed.0.len();
        let mut r = observed.0.grid().values().to_vec();
        r.extend_from_slice(observed.1.grid().values());
        r.extend_from_slice(observed.2.grid().values());
        let segments = vec![
            (CurveKind::F, 0, m),
            (CurveKind::G, m, 2 * m),
            (CurveKind::J, 2 * m, 3 * m),
        ];
        Self::new(obs, rows, r, segments)
    }

    pub fn observed(&self) -> &[f64] {
        &self.observed
    }

    pub fn simulated(&self) -> &[Vec<f64>] {
        &self.simulated
    }

    /// Number of simulated curves s.
    pub fn n_sims(&self) -> usize {
        self.simulated.len()
    }

    /// Number of coordinates m.
    pub fn len(&self) -> usize {
        self.observed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observed.is_empty()
    }

    /// Coordinate positions (concatenated r-grids).
    pub fn r(&self) -> &[f64] {
        &self.r
    }

    /// Segment labels as (kind, start, end) index ranges.
    pub fn segments(&self) -> &[(CurveKind, usize, usize)] {
        &self.segments
    }

    /// Segment label covering coordinate `j`, if any.
    pub fn segment_of(&self, j: usize) -> Option<CurveKind> {
        self.segments
            .iter()
            .find(|&&(_, start, end)| j >= start && j < end)
            .map(|&(kind, _, _)| kind)
    }

    /// Rows in ranking order: observed first, then the simulated curves.
    fn rows(&self) -> Vec<&[f64]> {
        let mut rows = Vec::with_capacity(self.n_sims() + 1);
        rows.push(self.observed.as_slice());
        rows.extend(self.simulated.iter().map(|r| r.as_slice()));
        rows
    }
}

/// Global envelope with the attached p-value interval.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeResult {
    /// Pointwise lower bound (k_level-th smallest simulated value).
    pub lower: Vec<f64>,
    /// Pointwise upper bound (k_level-th largest simulated value).
    pub upper: Vec<f64>,
    /// Liberal p-value.
    pub p_lo: f64,
    /// Conservative p-value.
    pub p_hi: f64,
    /// Nominal test level.
    pub level: f64,
    /// Critical extreme rank: curves ranked below it form the rejection set.
    pub k_level: usize,
}

impl EnvelopeResult {
    /// Conservative rejection at the nominal level.
    pub fn rejects(&self) -> bool {
        self.p_hi < self.level
    }
}

/// Extreme rank of every curve among `rows`, restricted to the listed
/// coordinates. Rank 1 is most extreme; ties share the minimal rank.
fn extreme_ranks_among(rows: &[&[f64]], coords: &[usize]) -> Vec<usize> {
    let n = rows.len();
    let mut ranks = vec![usize::MAX; n];
    let mut column = Vec::with_capacity(n);
    for &j in coords {
        column.clear();
        column.extend(rows.iter().map(|row| row[j]));
        let mut sorted = column.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        for (i, &v) in column.iter().enumerate() {
            let below = sorted.partition_point(|&x| x < v) + 1;
            let above = n - sorted.partition_point(|&x| x <= v) + 1;
            ranks[i] = ranks[i].min(below.min(above));
        }
    }
    if ranks[0] == usize::MAX {
        // No informative coordinate: a full tie, every curve equally central.
        vec![1; n]
    } else {
        ranks
    }
}

/// Coordinates that can order the curves: present (non-NaN) and not a full
/// tie. A coordinate where every curve agrees exactly (a saturated F = 1
/// region, for example) carries no ordering information, and under
/// minimal-rank tie sharing it would force every extreme rank to 1.
fn informative_coords(rows: &[&[f64]]) -> Vec<usize> {
    let m = rows.first().map(|r| r.len()).unwrap_or(0);
    (0..m)
        .filter(|&j| {
            let first = rows[0][j];
            if first.is_nan() {
                return false;
            }
            rows.iter().any(|row| row[j] != first)
        })
        .collect()
}

/// Extreme rank of the observed curve (index 0) and each simulated curve
/// (indices 1..=s) among the whole bundle.
///
/// At every informative coordinate each curve gets a rank from below and
/// from above (ties share the minimal rank); its pointwise rank is the
/// smaller of the two, and its extreme rank is the minimum over
/// coordinates. Missing and fully tied coordinates are skipped; if nothing
/// informative remains, all curves tie at rank 1.
pub fn extreme_ranks(curves: &CurveSet) -> Vec<usize> {
    let rows = curves.rows();
    extreme_ranks_among(&rows, &informative_coords(&rows))
}

/// Liberal and conservative p-values from extreme ranks.
///
/// p_lo counts simulated curves strictly more extreme than the observed
/// one; p_hi also counts ties. Both include the observed curve itself in
/// the numerator and denominator.
pub fn p_interval(ranks: &[usize], observed_index: usize) -> (f64, f64) {
    assert!(
        observed_index < ranks.len(),
        "observed index {observed_index} out of range for {} ranks",
        ranks.len()
    );
    let obs = ranks[observed_index];
    let n = ranks.len();
    let mut strictly = 0;
    let mut tied_or_less = 0;
    for (i, &r) in ranks.iter().enumerate() {
        if i == observed_index {
            continue;
        }
        if r < obs {
            strictly += 1;
        }
        if r <= obs {
            tied_or_less += 1;
        }
    }
    (
        (strictly + 1) as f64 / n as f64,
        (tied_or_less + 1) as f64 / n as f64,
    )
}

/// Global rank envelope at the given level.
///
/// The critical rank `k_level` is the largest k whose rejection set (the
/// simulated curves with extreme rank below k) stays within level*(s+1)
/// curves; the envelope at each coordinate spans the k_level-th smallest to
/// the k_level-th largest simulated value. Requires enough simulations for
/// the level: floor(level*(s+1)) must be at least 1 and leave at least one
/// curve, otherwise the run must be repeated with more simulations.
pub fn rank_envelope(curves: &CurveSet, level: f64) -> Result<EnvelopeResult> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "level must lie strictly between 0 and 1, got {level}"
        )));
    }
    let s = curves.n_sims();
    let budget = level * (s + 1) as f64;
    let discard = budget.floor() as usize;
    if discard < 1 {
        return Err(Error::TooFewSimulations(format!(
            "{s} simulations cannot resolve level {level} \
             (needs at least {})",
            (1.0 / level).ceil() as usize
        )));
    }
    if discard >= s {
        return Err(Error::TooFewSimulations(format!(
            "level {level} would discard all {s} simulated curves"
        )));
    }

    let ranks = extreme_ranks(curves);
    let mut sim_ranks: Vec<usize> = ranks[1..].to_vec();
    sim_ranks.sort_unstable();
    let k_level = sim_ranks[discard];

    let s_curves = curves.simulated();
    let m = curves.len();
    let mut lower = vec![f64::NAN; m];
    let mut upper = vec![f64::NAN; m];
    let mut column = Vec::with_capacity(s);
    for j in 0..m {
        if curves.observed()[j].is_nan() {
            continue;
        }
        column.clear();
        column.extend(s_curves.iter().map(|row| row[j]));
        column.sort_by(|a, b| a.total_cmp(b));
        lower[j] = column[k_level - 1];
        upper[j] = column[s - k_level];
    }

    let (p_lo, p_hi) = p_interval(&ranks, 0);
    Ok(EnvelopeResult { lower, upper, p_lo, p_hi, level, k_level })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replicate_rng;
    use proptest::prelude::*;
    use rand::Rng;

    fn plain_set(observed: Vec<f64>, simulated: Vec<Vec<f64>>) -> CurveSet {
        let m = observed.len();
        let r: Vec<f64> = (0..m).map(|i| i as f64).collect();
        CurveSet::new(observed, simulated, r, vec![(CurveKind::K, 0, m)]).unwrap()
    }

    fn random_set(seed: u64, s: usize, m: usize) -> CurveSet {
        let mut rng = replicate_rng(150, seed);
        let mut row = || -> Vec<f64> {
            (0..m).map(|_| rng.random_range(-10.0..10.0)).collect()
        };
        let observed = row();
        let simulated = (0..s).map(|_| row()).collect();
        plain_set(observed, simulated)
    }

    /// Reference implementation: direct double loop over curves and
    /// coordinates.
    fn brute_force_ranks(rows: &[Vec<f64>]) -> Vec<usize> {
        let n = rows.len();
        let m = rows[0].len();
        (0..n)
            .map(|i| {
                let mut best = usize::MAX;
                for j in 0..m {
                    let v = rows[i][j];
                    if v.is_nan() || rows.iter().all(|r| r[j] == rows[0][j]) {
                        continue;
                    }
                    let below = rows.iter().filter(|r| r[j] < v).count() + 1;
                    let above = rows.iter().filter(|r| r[j] > v).count() + 1;
                    best = best.min(below.min(above));
                }
                if best == usize::MAX {
                    1
                } else {
                    best
                }
            })
            .collect()
    }

    #[test]
    fn central_observed_curve_has_the_maximal_rank() {
        let set = plain_set(
            vec![1.0, 1.0, 1.0, 1.0],
            vec![vec![0.0, 0.0, 0.0, 0.0], vec![2.0, 2.0, 2.0, 2.0]],
        );
        let ranks = extreme_ranks(&set);
        assert_eq!(ranks, vec![2, 1, 1]);
    }

    #[test]
    fn one_extreme_coordinate_forces_rank_one() {
        let set = plain_set(
            vec![1.0, 1.0, 9.0, 1.0],
            vec![
                vec![0.5, 0.8, 1.2, 0.9],
                vec![1.5, 1.2, 0.8, 1.1],
                vec![0.7, 1.4, 1.0, 1.3],
            ],
        );
        let ranks = extreme_ranks(&set);
        assert_eq!(ranks[0], 1);
    }

    #[test]
    fn ranks_match_brute_force_on_random_sets() {
        for seed in 0..100 {
            let set = random_set(seed, 4, 5);
            let mut rows = vec![set.observed().to_vec()];
            rows.extend(set.simulated().iter().cloned());
            assert_eq!(extreme_ranks(&set), brute_force_ranks(&rows), "seed {seed}");
        }
    }

    #[test]
    fn p_interval_for_a_uniquely_extreme_observation() {
        let ranks = vec![1, 3, 2, 4, 2];
        let (lo, hi) = p_interval(&ranks, 0);
        assert_eq!(lo, 0.2);
        assert_eq!(hi, 0.2);
    }

    #[test]
    fn identical_curves_give_the_full_tie_interval() {
        let row = vec![0.3, 0.7, 0.1];
        let set = plain_set(row.clone(), vec![row.clone(), row.clone(), row.clone()]);
        let ranks = extreme_ranks(&set);
        assert_eq!(ranks, vec![1; 4]);
        let (lo, hi) = p_interval(&ranks, 0);
        assert_eq!(lo, 0.25);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn p_interval_matches_direct_counting_on_random_ties() {
        let mut rng = replicate_rng(151, 0);
        for _ in 0..200 {
            let n = rng.random_range(2..12);
            let ranks: Vec<usize> = (0..n).map(|_| rng.random_range(1..5)).collect();
            let idx = rng.random_range(0..n);
            let (lo, hi) = p_interval(&ranks, idx);
            let strictly =
                ranks.iter().enumerate().filter(|&(i, &r)| i != idx && r < ranks[idx]).count();
            let tied =
                ranks.iter().enumerate().filter(|&(i, &r)| i != idx && r <= ranks[idx]).count();
            assert_eq!(lo, (strictly + 1) as f64 / n as f64);
            assert_eq!(hi, (tied + 1) as f64 / n as f64);
            assert!(lo <= hi);
        }
    }

    #[test]
    fn missing_coordinates_must_align_and_are_skipped() {
        let err = CurveSet::new(
            vec![1.0, f64::NAN],
            vec![vec![1.0, 2.0]],
            vec![0.0, 1.0],
            vec![],
        );
        assert!(matches!(err, Err(Error::MissingValues(_))));

        // An aligned missing coordinate never influences the ranks.
        let with_gap = CurveSet::new(
            vec![1.0, f64::NAN, 3.0],
            vec![
                vec![2.0, f64::NAN, 1.0],
                vec![0.5, f64::NAN, 4.0],
            ],
            vec![0.0, 1.0, 2.0],
            vec![],
        )
        .unwrap();
        let without_gap = plain_set(
            vec![1.0, 3.0],
            vec![vec![2.0, 1.0], vec![0.5, 4.0]],
        );
        assert_eq!(extreme_ranks(&with_gap), extreme_ranks(&without_gap));

        let all_gone = CurveSet::new(
            vec![f64::NAN, f64::NAN],
            vec![vec![f64::NAN, f64::NAN]],
            vec![0.0, 1.0],
            vec![],
        );
        assert!(all_gone.is_err());
    }

    #[test]
    fn envelope_needs_enough_simulations_for_the_level() {
        let set = random_set(0, 4, 6);
        assert!(matches!(
            rank_envelope(&set, 0.05),
            Err(Error::TooFewSimulations(_))
        ));
        assert!(rank_envelope(&set, 1.0).is_err());
        assert!(rank_envelope(&set, 0.0).is_err());
        // Discarding everything is as useless as discarding nothing.
        assert!(matches!(
            rank_envelope(&set, 0.9),
            Err(Error::TooFewSimulations(_))
        ));

        let big = random_set(1, 99, 6);
        let env = rank_envelope(&big, 0.05).unwrap();
        assert_eq!(env.level, 0.05);
        assert!(env.k_level >= 1);
    }

    #[test]
    fn seven_and_a_half_thousand_simulations_are_accepted() {
        let set = random_set(2, 7497, 3);
        let env = rank_envelope(&set, 0.05).unwrap();
        assert!(env.p_lo <= env.p_hi);
        for (lo, hi) in env.lower.iter().zip(&env.upper) {
            assert!(lo <= hi);
        }
    }

    #[test]
    fn envelope_bounds_are_exactly_the_rank_coverage_sets() {
        // Ranking the simulated curves among themselves: rank >= k_level
        // stays inside the envelope everywhere, rank < k_level touches or
        // exits it somewhere. Few coordinates and many curves keep k_level
        // above 1 so both sides occur.
        let set = random_set(3, 60, 3);
        let env = rank_envelope(&set, 0.2).unwrap();
        let k = env.k_level;
        let sim_rows: Vec<&[f64]> =
            set.simulated().iter().map(|r| r.as_slice()).collect();
        let coords = informative_coords(&sim_rows);
        let sim_ranks = extreme_ranks_among(&sim_rows, &coords);
        let mut saw_inside = false;
        let mut saw_out = false;
        for (row, &rank) in set.simulated().iter().zip(&sim_ranks) {
            if rank >= k {
                saw_inside = true;
                for j in 0..set.len() {
                    assert!(
                        row[j] >= env.lower[j] && row[j] <= env.upper[j],
                        "rank {rank} >= {k} but coordinate {j} escapes"
                    );
                }
            } else {
                saw_out = true;
                assert!(
                    (0..set.len())
                        .any(|j| row[j] <= env.lower[j] || row[j] >= env.upper[j]),
                    "rank {rank} < {k} but the curve is strictly inside"
                );
            }
        }
        assert!(saw_inside && saw_out, "test set should exercise both sides");
    }

    #[test]
    fn shuffling_simulated_curves_changes_nothing() {
        let set = random_set(4, 25, 9);
        let env = rank_envelope(&set, 0.1).unwrap();
        let mut order: Vec<usize> = (0..25).collect();
        // Deterministic shuffle.
        for i in (1..order.len()).rev() {
            order.swap(i, (i * 7 + 3) % (i + 1));
        }
        let shuffled = plain_set(
            set.observed().to_vec(),
            order.iter().map(|&i| set.simulated()[i].clone()).collect(),
        );
        let env2 = rank_envelope(&shuffled, 0.1).unwrap();
        assert_eq!(env, env2);
    }

    #[test]
    fn segment_ranks_dominate_combined_ranks() {
        // Fewer coordinates can only raise the minimum.
        for seed in 0..20 {
            let set = random_set(seed, 8, 10);
            let rows = set.rows();
            let all = extreme_ranks_among(&rows, &informative_coords(&rows));
            let front: Vec<usize> = informative_coords(&rows)
                .into_iter()
                .filter(|&j| j < 5)
                .collect();
            let partial = extreme_ranks_among(&rows, &front);
            for (p, a) in partial.iter().zip(&all) {
                assert!(p >= a);
            }
        }
    }

    #[test]
    fn segments_label_coordinates() {
        let set = CurveSet::new(
            vec![1.0, 2.0, 3.0, 4.0],
            vec![vec![0.0, 1.0, 2.0, 3.0]],
            vec![0.1, 0.2, 0.1, 0.2],
            vec![(CurveKind::F, 0, 2), (CurveKind::G, 2, 4)],
        )
        .unwrap();
        assert_eq!(set.segment_of(1), Some(CurveKind::F));
        assert_eq!(set.segment_of(2), Some(CurveKind::G));
        assert_eq!(set.segment_of(4), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// Adding a simulated curve identical to the observed one cannot
        /// decrease the conservative p-value.
        #[test]
        fn duplicating_the_observed_curve_cannot_decrease_p_hi(
            seed in 0u64..5000,
            s in 3usize..16,
            m in 2usize..8,
        ) {
            let set = random_set(seed, s, m);
            let (_, before) = p_interval(&extreme_ranks(&set), 0);
            let mut extended = set.simulated().to_vec();
            extended.push(set.observed().to_vec());
            let bigger = plain_set(set.observed().to_vec(), extended);
            let (_, after) = p_interval(&extreme_ranks(&bigger), 0);
            prop_assert!(
                after >= before - 1e-12,
                "p_hi fell from {before} to {after}"
            );
        }
    }
}
