//! Run the bundled exam fixture against a mock model that answers 70% of
//! questions correctly, then print the score report.

use std::collections::HashMap;
use std::path::PathBuf;

use finadapt::client::{ChatClient, RetryPolicy};
use finadapt::evalbench::{load_exams, run_exams, score, EvalOptions};
use finadapt::mock::{MockReply, MockServer};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let questions = load_exams(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/exams.jsonl"))?;
    let keys: HashMap<String, (usize, char, char)> = questions
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let wrong = q.options.iter().map(|(l, _)| l.letter()).find(|&l| l != q.key.letter()).unwrap();
            (q.stem.clone(), (i, q.key.letter(), wrong))
        })
        .collect();
    let server = MockServer::start(move |req, _| {
        let prompt = req.last_user_content().unwrap_or_default();
        let stem = prompt.rsplit("Soru: ").next().and_then(|s| s.lines().next()).unwrap_or_default();
        match keys.get(stem) {
            Some(&(i, key, wrong)) => MockReply::content(format!("Cevap: {}", if i % 10 < 7 { key } else { wrong })),
            None => MockReply::content("Bilmiyorum."),
        }
    })?;

    let client = ChatClient::new(server.endpoint("mock"), RetryPolicy::default())?;
    let opts = EvalOptions {
        parallelism: 16,
        ..EvalOptions::default()
    };
    let answers = run_exams(&questions, &questions, &client, &opts).await?;
    let report = score(&answers, &questions)?;
    for (domain, acc) in &report.per_group {
        println!("{domain:<6} {acc:.3}");
    }
    println!("macro {:.3}  overall {:.3}", report.macro_mean, report.overall);
    Ok(())
}
