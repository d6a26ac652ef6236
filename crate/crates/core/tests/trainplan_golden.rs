use std::path::PathBuf;

use finadapt::corpus::CorpusStats;
use finadapt::trainplan::{emit_config, parse_config, plan_cpt, plan_sft, DatasetManifest, Overrides};

fn golden(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn cpt_matches_golden() {
    let cfg = plan_cpt(&CorpusStats::reference_cpt_budget(), &Overrides::default()).unwrap();
    assert_eq!(emit_config(&cfg), golden("cpt.toml"));
    assert_eq!(parse_config(&golden("cpt.toml")).unwrap(), cfg);
}

#[test]
fn sft_matches_golden() {
    let manifest = DatasetManifest { dataset_path: "dataset.jsonl".into(), sample_count: 23_000 };
    let cfg = plan_sft(&manifest, &Overrides::default()).unwrap();
    assert_eq!(emit_config(&cfg), golden("sft.toml"));
    assert_eq!(parse_config(&golden("sft.toml")).unwrap(), cfg);
}

#[test]
fn goldens_carry_the_pinned_values() {
    for (name, lr) in [("cpt.toml", "learning_rate = 2e-5"), ("sft.toml", "learning_rate = 2e-6")] {
        let text = golden(name);
        for line in [lr, "rank = 64", "alpha = 128", "quant_bits = 4"] {
            assert!(text.lines().any(|l| l == line), "{name} lacks {line}");
        }
    }
}
