//! Translate the exam set to English with two mock translators, score the
//! model on each version and print the comparison table.

use std::collections::HashMap;
use std::path::PathBuf;

use finadapt::client::{ChatClient, RetryPolicy};
use finadapt::evalbench::{
    compare_runs, load_exams, run_exams, score, translate_items, Direction, EvalOptions, NamedRun, RunCondition,
};
use finadapt::mock::{MockReply, MockServer};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let questions = load_exams(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/exams.jsonl"))?;
    let keys: HashMap<String, char> = questions.iter().map(|q| (q.stem.clone(), q.key.letter())).collect();

    // translates by echoing the payload; answers exams from the key for even-numbered stems
    let model = MockServer::start(move |req, _| {
        let prompt = req.last_user_content().unwrap_or_default();
        if req.response_format.is_some() {
            return MockReply::content(prompt.to_string());
        }
        let stem = prompt
            .rsplit(if prompt.contains("Question: ") { "Question: " } else { "Soru: " })
            .next()
            .and_then(|s| s.lines().next())
            .unwrap_or_default();
        let n: usize = stem.trim_start_matches('(').split(')').next().and_then(|d| d.parse().ok()).unwrap_or(1);
        match keys.get(stem) {
            Some(&k) if n.is_multiple_of(2) => MockReply::content(format!("Cevap: {k}")),
            _ => MockReply::content("Cevap: bilmiyorum"),
        }
    })?;
    // drops the last option of every fifth item, which breaks its structure
    let external = MockServer::start(|req, _| {
        let mut v: serde_json::Value = serde_json::from_str(req.last_user_content().unwrap_or("{}")).unwrap_or_default();
        let stem = v["stem"].as_str().unwrap_or_default().to_string();
        if stem.starts_with("(5") || stem.ends_with('5') {
            v["options"].as_array_mut().map(|o| o.pop());
        }
        MockReply::content(v.to_string())
    })?;

    let client = ChatClient::new(model.endpoint("model"), RetryPolicy::default())?;
    let ext_client = ChatClient::new(external.endpoint("external"), RetryPolicy::default())?;
    let opts = EvalOptions::default();

    let mut runs = Vec::new();
    let answers = run_exams(&questions, &questions, &client, &opts).await?;
    runs.push((RunCondition::OriginalTr, score(&answers, &questions)?));
    for (condition, translator) in [
        (RunCondition::SelfTranslatedEn, &client),
        (RunCondition::ExternalTranslatedEn, &ext_client),
    ] {
        let outcome = translate_items(&questions, translator, Direction::TrToEn, 8).await?;
        println!("{}: {} excluded", condition.title(), outcome.excluded.len());
        let answers = run_exams(&outcome.translated, &outcome.translated, &client, &opts).await?;
        runs.push((condition, score(&answers, &outcome.translated)?));
    }

    let runs: Vec<NamedRun> = runs
        .into_iter()
        .map(|(condition, report)| NamedRun {
            model: "demo-model".into(),
            condition,
            report,
        })
        .collect();
    print!("{}", compare_runs(&runs).render());
    Ok(())
}
