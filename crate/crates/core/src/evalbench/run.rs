use std::time::Duration;

use super::{build_fewshot_prompt, extract_choice, EvalError, ExamQuestion, GazetteItem, ModelAnswer, DEFAULT_SHOTS};
use crate::client::{map_bounded, ChatClient, ChatMessage, ChatRequest, Completion, DecodeParams};

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub shots: usize,
    pub rng_seed: u64,
    pub decode: DecodeParams,
    pub parallelism: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            shots: DEFAULT_SHOTS,
            rng_seed: 0,
            decode: DecodeParams::default(),
            parallelism: 8,
        }
    }
}

/// Sends one prompt as a single user message.
pub async fn query_model(prompt: &str, client: &ChatClient, decode: DecodeParams) -> Result<Completion, EvalError> {
    let req = ChatRequest::new(vec![ChatMessage::user(prompt)]).with_decode(decode);
    Ok(client.complete(&req).await?)
}

fn millis(d: Duration) -> u64 {
    d.as_millis().try_into().unwrap_or(u64::MAX)
}

/// Answers every question with a k-shot prompt drawn from `pool` and
/// extracts the chosen label. Answers come back in question order.
pub async fn run_exams(
    questions: &[ExamQuestion],
    pool: &[ExamQuestion],
    client: &ChatClient,
    opts: &EvalOptions,
) -> Result<Vec<ModelAnswer>, EvalError> {
    let prompts = questions
        .iter()
        .map(|q| Ok((q, build_fewshot_prompt(q, pool, opts.shots, opts.rng_seed)?.text)))
        .collect::<Result<Vec<_>, EvalError>>()?;
    let endpoint_id = client.endpoint().id.clone();
    let decode = opts.decode;
    let results = map_bounded(prompts, opts.parallelism, |(q, prompt)| async move {
        let completion = query_model(&prompt, client, decode).await?;
        Ok::<_, EvalError>((q, completion))
    })
    .await;
    results
        .into_iter()
        .map(|r| {
            let (q, c) = r?;
            Ok(ModelAnswer {
                item_id: q.id.clone(),
                extracted: Some(extract_choice(&c.text, &q.options)),
                raw_text: c.text,
                latency_ms: millis(c.latency),
                endpoint_id: endpoint_id.clone(),
            })
        })
        .collect()
}

pub fn gazette_prompt(item: &GazetteItem) -> String {
    format!(
        "Aşağıdaki Ticaret Sicili Gazetesi ilanını okuyunuz ve soruyu ilana dayanarak Türkçe yanıtlayınız.\n\nİlan:\n{}\n\nSoru: {}\nCevap:",
        item.announcement_text.trim(),
        item.question.trim()
    )
}

/// Collects free-text answers for human judgment.
pub async fn run_gazette(
    items: &[GazetteItem],
    client: &ChatClient,
    opts: &EvalOptions,
) -> Result<Vec<ModelAnswer>, EvalError> {
    let endpoint_id = client.endpoint().id.clone();
    let decode = opts.decode;
    let results = map_bounded(items.iter().collect(), opts.parallelism, |item: &GazetteItem| async move {
        let c = query_model(&gazette_prompt(item), client, decode).await?;
        Ok::<_, EvalError>((item, c))
    })
    .await;
    results
        .into_iter()
        .map(|r| {
            let (item, c) = r?;
            Ok(ModelAnswer {
                item_id: item.id.clone(),
                raw_text: c.text,
                extracted: None,
                latency_ms: millis(c.latency),
                endpoint_id: endpoint_id.clone(),
            })
        })
        .collect()
}
