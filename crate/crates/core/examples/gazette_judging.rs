//! Record verdicts from two annotators, then compute accuracy per event type
//! and inter-annotator agreement.

use std::path::PathBuf;

use finadapt::evalbench::{load_gazette, ModelAnswer};
use finadapt::judging::{
    accuracy_from_judgments, pairwise_kappa_matrix, ItemKey, JudgmentRecord, JudgmentStore, Policy, Verdict,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let items = load_gazette(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/gazette.jsonl"))?;
    let answers: Vec<ModelAnswer> = items
        .iter()
        .map(|g| ModelAnswer {
            item_id: g.id.clone(),
            raw_text: "İlana göre yanıt.".into(),
            extracted: None,
            latency_ms: 0,
            endpoint_id: "demo".into(),
        })
        .collect();

    let mut store = JudgmentStore::new(items.iter().map(|g| ItemKey::new(None, &g.id)));
    for (i, item) in items.iter().enumerate() {
        let a = if i % 4 == 0 { Verdict::Incorrect } else { Verdict::Correct };
        let b = if i % 3 == 0 { Verdict::Incorrect } else { Verdict::Correct };
        store.record(JudgmentRecord::new(&item.id, "ayse", a))?;
        store.record(JudgmentRecord::new(&item.id, "mehmet", b))?;
    }
    // a later verdict from the same annotator replaces the earlier one
    store.record(JudgmentRecord::new(&items[0].id, "ayse", Verdict::Correct))?;

    let records = store.records();
    let report = accuracy_from_judgments(&records, &answers, &items, Policy::Majority)?;
    for (event, acc) in &report.per_group {
        println!("{event:<4} {acc:.3}");
    }
    println!("macro {:.3}", report.macro_mean);

    let agreement = pairwise_kappa_matrix(&records)?;
    for pair in &agreement.pairs {
        println!(
            "{} / {}: p_o {:.3} p_e {:.3} kappa {:?}",
            pair.annotator_a, pair.annotator_b, pair.p_o, pair.p_e, pair.kappa
        );
    }
    Ok(())
}
