//! Emit the continual-pretraining and fine-tuning configs and check a corpus
//! against the reference token budget.

use finadapt::corpus::{CorpusStats, CptCategory};
use finadapt::trainplan::{emit_config, plan_cpt, plan_sft, validate_budget, DatasetManifest, Overrides};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reference = CorpusStats::reference_cpt_budget();
    let cpt = plan_cpt(&reference, &Overrides::default())?;
    println!("# cpt.toml\n{}", emit_config(&cpt));

    let manifest = DatasetManifest {
        dataset_path: "dataset.jsonl".into(),
        sample_count: 23_000,
    };
    let sft = plan_sft(&manifest, &Overrides::default())?;
    println!("# sft.toml\n{}", emit_config(&sft));

    // a corpus that is a tenth short on one category
    let short = CorpusStats::from_totals(reference.per_category().iter().map(|(&c, &n)| {
        if c == CptCategory::Academic.into() {
            (c, n - n / 10)
        } else {
            (c, n)
        }
    }));
    let report = validate_budget(&short, &reference, 5.0);
    println!("budget within 5%: {}", report.passed);
    for row in report.failures() {
        println!("  {} off by {:.1}%", row.category, row.gap_pct);
    }

    let err = plan_cpt(
        &reference,
        &Overrides {
            learning_rate: Some(1e-4),
            ..Overrides::default()
        },
    )
    .unwrap_err();
    println!("override rejected: {err}");
    Ok(())
}
