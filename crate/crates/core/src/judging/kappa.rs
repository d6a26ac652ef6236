use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{ItemKey, JudgingError, JudgmentRecord, Verdict};

/// Agreement between two annotators over their shared items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairAgreement {
    pub annotator_a: String,
    pub annotator_b: String,
    pub shared_items: usize,
    pub p_o: f64,
    pub p_e: f64,
    /// None when both annotators used one identical label throughout.
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub pairs: Vec<PairAgreement>,
    /// Mean over pairs with a defined kappa.
    pub mean_kappa: Option<f64>,
}

impl AgreementReport {
    pub fn kappa(&self, a: &str, b: &str) -> Option<f64> {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.pairs.iter().find(|p| p.annotator_a == a && p.annotator_b == b)?.kappa
    }
}

/// Observed and chance agreement plus kappa, from exact integer counts.
pub fn agreement_stats<L: Ord + Clone>(a: &[L], b: &[L]) -> Result<(f64, f64, Option<f64>), JudgingError> {
    if a.len() != b.len() {
        return Err(JudgingError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(JudgingError::EmptyLabels);
    }
    let n = a.len() as u128;
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count() as u128;
    let mut counts: BTreeMap<&L, (u128, u128)> = BTreeMap::new();
    for x in a {
        counts.entry(x).or_default().0 += 1;
    }
    for y in b {
        counts.entry(y).or_default().1 += 1;
    }
    // p_e * n^2
    let chance: u128 = counts.values().map(|(ca, cb)| ca * cb).sum();
    let nn = n * n;
    let p_o = agree as f64 / n as f64;
    let p_e = chance as f64 / nn as f64;
    let kappa = (chance < nn).then(|| (n * agree) as f64 - chance as f64).map(|num| num / (nn - chance) as f64);
    Ok((p_o, p_e, kappa))
}

/// Cohen's kappa for two label vectors in the same item order.
pub fn cohen_kappa<L: Ord + Clone>(a: &[L], b: &[L]) -> Result<f64, JudgingError> {
    agreement_stats(a, b)?.2.ok_or(JudgingError::DegenerateAgreement)
}

/// Kappa for every annotator pair that shares at least one item.
pub fn pairwise_kappa_matrix(records: &[JudgmentRecord]) -> Result<AgreementReport, JudgingError> {
    let mut by_annotator: BTreeMap<&str, BTreeMap<ItemKey, Verdict>> = BTreeMap::new();
    for r in records {
        by_annotator.entry(r.annotator_id.as_str()).or_default().insert(r.item_key(), r.verdict);
    }
    let names: Vec<&str> = by_annotator.keys().copied().collect();
    let mut pairs = Vec::new();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            let (ja, jb) = (&by_annotator[a], &by_annotator[b]);
            let shared: BTreeSet<&ItemKey> = ja.keys().filter(|k| jb.contains_key(*k)).collect();
            if shared.is_empty() {
                continue;
            }
            let la: Vec<Verdict> = shared.iter().map(|k| ja[*k]).collect();
            let lb: Vec<Verdict> = shared.iter().map(|k| jb[*k]).collect();
            let (p_o, p_e, kappa) = agreement_stats(&la, &lb)?;
            pairs.push(PairAgreement {
                annotator_a: a.to_string(),
                annotator_b: b.to_string(),
                shared_items: shared.len(),
                p_o,
                p_e,
                kappa,
            });
        }
    }
    if pairs.is_empty() {
        return Err(JudgingError::NoOverlap);
    }
    let defined: Vec<f64> = pairs.iter().filter_map(|p| p.kappa).collect();
    let mean_kappa = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
    Ok(AgreementReport { pairs, mean_kappa })
}
