//! Build a small instruction dataset against an in-process mock generator
//! and check the per-task quotas.

use std::collections::BTreeMap;

use finadapt::client::{ChatClient, RetryPolicy};
use finadapt::corpus::{CleanChunk, SftSource};
use finadapt::mock::{MockReply, MockServer};
use finadapt::syngen::{
    assemble_dataset, AnswerFormat, AssemblyOptions, DistributionSpec, EndpointGenerator, TaskType, TemplateSet,
};

fn pools() -> BTreeMap<SftSource, Vec<CleanChunk>> {
    SftSource::ALL
        .into_iter()
        .map(|source| {
            let chunks = (0..4)
                .map(|i| CleanChunk {
                    id: format!("{}-{i}", source.slug()),
                    doc_id: source.slug().into(),
                    category: source.into(),
                    text: format!("Parça {i}: faiz oranları ve piyasa beklentileri hakkında kısa bir metin."),
                    token_estimate: 16,
                    span: (0, 70),
                })
                .collect();
            (source, chunks)
        })
        .collect()
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let templates = TemplateSet::default();
    // the mock recognises the task from the instruction and answers with a valid label
    let instructions: Vec<(TaskType, String)> = TaskType::ALL
        .into_iter()
        .map(|t| (t, templates.seed_prompt(t, "").lines().next().unwrap_or_default().to_string()))
        .collect();
    let server = MockServer::start(move |req, _| {
        let user = req.last_user_content().unwrap_or_default();
        let task = instructions.iter().find(|(_, line)| user.contains(line.as_str())).map(|(t, _)| *t);
        let answer = match task.map(TaskType::answer_format) {
            Some(AnswerFormat::Categorical(labels)) => labels[0].to_string(),
            _ => "Metindeki bilgilere dayanan kısa bir yanıt.".to_string(),
        };
        MockReply::content(
            serde_json::json!({"rephrased_prompt": "Metni okuyup görevi yerine getiriniz.", "answer": answer}).to_string(),
        )
    })?;

    let client = ChatClient::new(server.endpoint("generator"), RetryPolicy::default())?;
    let generator = EndpointGenerator::new(client, templates.clone());
    let spec = DistributionSpec::reference(230);
    let opts = AssemblyOptions {
        rng_seed: 42,
        ..AssemblyOptions::default()
    };
    let assembly = assemble_dataset(&spec, &generator, &pools(), &templates, &opts).await?;

    let mut per_task: BTreeMap<TaskType, usize> = BTreeMap::new();
    for s in &assembly.samples {
        *per_task.entry(s.task).or_default() += 1;
    }
    for (task, n) in per_task {
        println!("{:<28} {n:>4}", task.slug());
    }
    println!("{} samples, {} attempts", assembly.samples.len(), assembly.stats.attempts);
    Ok(())
}
