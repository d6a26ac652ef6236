//! Target composition of the instruction dataset.
//!
//! The reference composition is given as two marginals (share per source and
//! share per task), while generation happens per (source, task) cell. The
//! joint cell shares are fitted to both marginals by iterative proportional
//! fitting over the cells the task registry allows, starting from a prior
//! (uniform, or the per-cell counts of the original generation run). Cell
//! quotas then come from largest-remainder rounding, so they sum exactly to
//! the requested total.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{is_registered, SyngenError, TaskType};
use crate::corpus::SftSource;

const PCT_SUM_TOLERANCE: f64 = 1e-6;
const FIT_TOLERANCE: f64 = 1e-9;
const MAX_FIT_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellWeight {
    pub source: SftSource,
    pub task: TaskType,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub total: usize,
    pub task_pct: BTreeMap<TaskType, f64>,
    pub source_pct: BTreeMap<SftSource, f64>,
    /// Optional starting weights for the joint fit. Empty means uniform over
    /// registered cells.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cell_prior: Vec<CellWeight>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellQuota {
    pub source: SftSource,
    pub task: TaskType,
    pub quota: usize,
}

impl DistributionSpec {
    /// The reference instruction-data composition scaled to `total` samples.
    pub fn reference(total: usize) -> Self {
        use SftSource::*;
        use TaskType::*;
        let task_pct = [
            (FillInTheBlank, 19.0),
            (MultiTurnQa, 6.0),
            (MultipleChoiceQa, 16.0),
            (Summarization, 16.0),
            (TrueFalse, 14.0),
            (KeyInformationExtraction, 1.0),
            (TableGeneration, 3.0),
            (SentimentAnalysis, 14.0),
            (ListGeneration, 4.0),
            (NamedEntityRecognition, 3.0),
            (Categorization, 4.0),
        ];
        let source_pct = [(Academic, 54.0), (CentralBank, 5.0), (News, 21.0), (TradeRegistryGazette, 20.0)];
        // per-cell counts of a full-size generation run, used as the starting weights
        let prior = [
            (Academic, FillInTheBlank, 4347.0),
            (Academic, MultiTurnQa, 130.0),
            (Academic, MultipleChoiceQa, 3781.0),
            (Academic, Summarization, 851.0),
            (Academic, TrueFalse, 3366.0),
            (CentralBank, KeyInformationExtraction, 161.0),
            (CentralBank, MultiTurnQa, 559.0),
            (CentralBank, SentimentAnalysis, 159.0),
            (CentralBank, Summarization, 167.0),
            (CentralBank, TableGeneration, 149.0),
            (News, SentimentAnalysis, 3057.0),
            (News, Summarization, 1887.0),
            (TradeRegistryGazette, Categorization, 865.0),
            (TradeRegistryGazette, ListGeneration, 865.0),
            (TradeRegistryGazette, TableGeneration, 645.0),
            (TradeRegistryGazette, MultiTurnQa, 693.0),
            (TradeRegistryGazette, NamedEntityRecognition, 734.0),
            (TradeRegistryGazette, Summarization, 818.0),
        ];
        Self {
            total,
            task_pct: task_pct.into_iter().collect(),
            source_pct: source_pct.into_iter().collect(),
            cell_prior: prior
                .into_iter()
                .map(|(source, task, weight)| CellWeight { source, task, weight })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<(), SyngenError> {
        let bad = |m: String| Err(SyngenError::InvalidDistribution(m));
        if self.total == 0 {
            return bad("total must be positive".into());
        }
        let task_sum: f64 = self.task_pct.values().sum();
        let source_sum: f64 = self.source_pct.values().sum();
        if (task_sum - 100.0).abs() > PCT_SUM_TOLERANCE {
            return bad(format!("task percentages sum to {task_sum}, not 100"));
        }
        if (source_sum - 100.0).abs() > PCT_SUM_TOLERANCE {
            return bad(format!("source percentages sum to {source_sum}, not 100"));
        }
        let negative = self
            .task_pct
            .values()
            .chain(self.source_pct.values())
            .chain(self.cell_prior.iter().map(|c| &c.weight))
            .any(|v| !v.is_finite() || *v < 0.0);
        if negative {
            return bad("percentages and prior weights must be finite and non-negative".into());
        }
        if let Some(c) = self.cell_prior.iter().find(|c| !is_registered(c.source, c.task)) {
            return bad(format!("prior names unregistered cell {:?}/{}", c.source, c.task));
        }
        Ok(())
    }

    /// Joint percentage per cell, matching both marginals.
    pub fn joint_pct(&self) -> Result<Vec<(SftSource, TaskType, f64)>, SyngenError> {
        self.validate()?;
        let src = |s: SftSource| self.source_pct.get(&s).copied().unwrap_or(0.0);
        let tsk = |t: TaskType| self.task_pct.get(&t).copied().unwrap_or(0.0);
        let prior: BTreeMap<(SftSource, TaskType), f64> =
            self.cell_prior.iter().map(|c| ((c.source, c.task), c.weight)).collect();

        let mut cells: Vec<(SftSource, TaskType, f64)> = Vec::new();
        for s in SftSource::ALL {
            for t in TaskType::ALL {
                if !is_registered(s, t) || src(s) == 0.0 || tsk(t) == 0.0 {
                    continue;
                }
                let w = if prior.is_empty() {
                    1.0
                } else {
                    prior.get(&(s, t)).copied().unwrap_or(0.0)
                };
                if w > 0.0 {
                    cells.push((s, t, w));
                }
            }
        }

        for (&s, &pct) in &self.source_pct {
            if pct > 0.0 && !cells.iter().any(|c| c.0 == s) {
                return Err(SyngenError::InvalidDistribution(format!("source {s:?} has share {pct} but no usable task cell")));
            }
        }
        for (&t, &pct) in &self.task_pct {
            if pct > 0.0 && !cells.iter().any(|c| c.1 == t) {
                return Err(SyngenError::InvalidDistribution(format!("task {t} has share {pct} but no usable source cell")));
            }
        }

        let deviation = |cells: &[(SftSource, TaskType, f64)]| -> f64 {
            let mut worst: f64 = 0.0;
            for s in SftSource::ALL {
                let sum: f64 = cells.iter().filter(|c| c.0 == s).map(|c| c.2).sum();
                worst = worst.max((sum - src(s)).abs());
            }
            for t in TaskType::ALL {
                let sum: f64 = cells.iter().filter(|c| c.1 == t).map(|c| c.2).sum();
                worst = worst.max((sum - tsk(t)).abs());
            }
            worst
        };

        for _ in 0..MAX_FIT_ITERATIONS {
            for s in SftSource::ALL {
                let sum: f64 = cells.iter().filter(|c| c.0 == s).map(|c| c.2).sum();
                if sum > 0.0 {
                    let f = src(s) / sum;
                    cells.iter_mut().filter(|c| c.0 == s).for_each(|c| c.2 *= f);
                }
            }
            for t in TaskType::ALL {
                let sum: f64 = cells.iter().filter(|c| c.1 == t).map(|c| c.2).sum();
                if sum > 0.0 {
                    let f = tsk(t) / sum;
                    cells.iter_mut().filter(|c| c.1 == t).for_each(|c| c.2 *= f);
                }
            }
            if deviation(&cells) < FIT_TOLERANCE {
                return Ok(cells);
            }
        }
        Err(SyngenError::InvalidDistribution(format!(
            "source and task shares cannot both be met under the task registry (residual {:.3e} points)",
            deviation(&cells)
        )))
    }

    /// Integer sample quota per cell, summing exactly to `total`.
    pub fn cell_quotas(&self) -> Result<Vec<CellQuota>, SyngenError> {
        let joint = self.joint_pct()?;
        let expected: Vec<f64> = joint.iter().map(|c| c.2 * self.total as f64 / 100.0).collect();
        let counts = largest_remainder(&expected, self.total);
        Ok(joint
            .into_iter()
            .zip(counts)
            .map(|((source, task, _), quota)| CellQuota { source, task, quota })
            .collect())
    }
}

/// Hamilton apportionment: floor every share, then hand the remaining units
/// to the largest fractional parts. Ties go to the earlier entry.
///
/// `expected` should sum to `total`; values within 1e-7 of an integer are
/// treated as that integer so float noise cannot steal a unit.
pub fn largest_remainder(expected: &[f64], total: usize) -> Vec<usize> {
    let snapped: Vec<f64> = expected
        .iter()
        .map(|&x| if (x - x.round()).abs() < 1e-7 { x.round() } else { x })
        .collect();
    let mut counts: Vec<usize> = snapped.iter().map(|x| x.floor().max(0.0) as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..snapped.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = snapped[a] - snapped[a].floor();
        let fb = snapped[b] - snapped[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn marginals(quotas: &[CellQuota]) -> (BTreeMap<SftSource, usize>, BTreeMap<TaskType, usize>) {
        let mut s = BTreeMap::new();
        let mut t = BTreeMap::new();
        for q in quotas {
            *s.entry(q.source).or_default() += q.quota;
            *t.entry(q.task).or_default() += q.quota;
        }
        (s, t)
    }

    #[test]
    fn reference_spec_fill_in_the_blank_quota() {
        let quotas = DistributionSpec::reference(23_000).cell_quotas().unwrap();
        assert_eq!(quotas.iter().map(|q| q.quota).sum::<usize>(), 23_000);
        let (_, tasks) = marginals(&quotas);
        assert_eq!(tasks[&TaskType::FillInTheBlank], 4370);
        assert_eq!(quotas.len(), 18);
    }

    #[test]
    fn small_totals_stay_within_one_unit_per_cell() {
        // joint rounding can move a marginal by at most one unit per cell in it
        let spec = DistributionSpec::reference(100);
        let quotas = spec.cell_quotas().unwrap();
        assert_eq!(quotas.iter().map(|q| q.quota).sum::<usize>(), 100);
        let (sources, tasks) = marginals(&quotas);
        for (t, pct) in &spec.task_pct {
            let cells = quotas.iter().filter(|q| q.task == *t).count() as f64;
            assert!((tasks[t] as f64 - pct).abs() < cells, "{t}");
        }
        for (s, pct) in &spec.source_pct {
            let cells = quotas.iter().filter(|q| q.source == *s).count() as f64;
            assert!((sources[s] as f64 - pct).abs() < cells, "{s:?}");
        }
    }

    #[test]
    fn uniform_prior_also_fits() {
        let mut spec = DistributionSpec::reference(1000);
        spec.cell_prior.clear();
        let joint = spec.joint_pct().unwrap();
        let sum: f64 = joint.iter().filter(|c| c.1 == TaskType::Summarization).map(|c| c.2).sum();
        assert!((sum - 16.0).abs() < 1e-6);
    }

    #[test]
    fn bad_specs_are_rejected() {
        let mut spec = DistributionSpec::reference(100);
        spec.task_pct.insert(TaskType::FillInTheBlank, 20.0);
        assert!(spec.validate().is_err());

        // sentiment cannot exceed what News + Central Bank can hold
        let mut spec = DistributionSpec::reference(100);
        spec.source_pct = [(SftSource::Academic, 100.0)].into_iter().collect();
        assert!(matches!(spec.cell_quotas(), Err(SyngenError::InvalidDistribution(_))));

        let mut spec = DistributionSpec::reference(0);
        spec.total = 0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn largest_remainder_hand_cases() {
        assert_eq!(largest_remainder(&[3.5, 3.5, 3.0], 10), [4, 3, 3]);
        assert_eq!(largest_remainder(&[0.2, 0.3, 0.5], 1), [0, 0, 1]);
        assert_eq!(largest_remainder(&[4369.999999999, 0.000000001], 4370), [4370, 0]);
    }

    proptest! {
        #[test]
        fn apportionment_sums_to_total(weights in prop::collection::vec(0.0f64..1000.0, 1..30), total in 0usize..50_000) {
            let sum: f64 = weights.iter().sum();
            prop_assume!(sum > 0.0);
            let expected: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
            let counts = largest_remainder(&expected, total);
            prop_assert_eq!(counts.iter().sum::<usize>(), total);
            for (c, e) in counts.iter().zip(&expected) {
                prop_assert!((*c as f64 - e).abs() < 1.0 + 1e-6);
            }
        }

        #[test]
        fn feasible_marginals_give_exact_totals(
            weights in prop::collection::vec(0.01f64..10.0, 18),
            total in 1usize..30_000,
        ) {
            // marginals taken from a random joint over registered cells are always feasible
            let cells: Vec<(SftSource, TaskType)> = SftSource::ALL
                .into_iter()
                .flat_map(|s| TaskType::ALL.into_iter().filter(move |&t| is_registered(s, t)).map(move |t| (s, t)))
                .collect();
            let wsum: f64 = weights.iter().sum();
            let mut task_pct = BTreeMap::new();
            let mut source_pct = BTreeMap::new();
            for (&(s, t), w) in cells.iter().zip(&weights) {
                *task_pct.entry(t).or_insert(0.0) += w / wsum * 100.0;
                *source_pct.entry(s).or_insert(0.0) += w / wsum * 100.0;
            }
            let spec = DistributionSpec { total, task_pct, source_pct, cell_prior: vec![] };
            let quotas = spec.cell_quotas().unwrap();
            prop_assert_eq!(quotas.iter().map(|q| q.quota).sum::<usize>(), total);
        }
    }
}
