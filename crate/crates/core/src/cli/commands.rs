use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use super::config::ProjectConfig;
use super::manifest::ManifestBuilder;
use super::{write_json, Cli, CliError, Command, JudgeAction, StageArg};
use crate::client::{ChatClient, DecodeParams};
use crate::corpus::{self, ChunkPolicy, CleanChunk, CleaningProfile, Corpus, CorpusStats, SourceCategory};
use crate::evalbench::{
    self, compare_runs, detect_language_switch, load_exams, load_gazette, run_exams, run_gazette, translate_items,
    Direction, EvalOptions, ExamQuestion, GazetteItem, Language, LanguageSwitch, ModelAnswer, NamedRun, RunCondition,
    ScoreReport,
};
use crate::jsonl;
use crate::judging::{
    accuracy_from_judgments, export_judgments, import_judgments, pairwise_kappa_matrix, JudgmentStore, Policy,
    RecordOutcome,
};
use crate::review::{self, ReviewState};
use crate::syngen::{self, AssemblyOptions, EndpointGenerator, TemplateSet};
use crate::trainplan::{self, DatasetManifest};

struct Ctx {
    cfg: ProjectConfig,
    seed: u64,
    out: PathBuf,
    parallelism: usize,
    endpoint: Option<String>,
}

impl Ctx {
    fn manifest(&self, command: &str) -> ManifestBuilder {
        ManifestBuilder::new(command, self.seed, &self.out)
    }

    fn client(&self, name: Option<&str>, fallback: &Option<String>, what: &str) -> Result<ChatClient, CliError> {
        let name = name
            .or(fallback.as_deref())
            .ok_or_else(|| CliError::Config(format!("no {what} endpoint: pass --endpoint or set it in the config")))?;
        let descriptor = self.cfg.endpoint(name)?;
        Ok(ChatClient::new(descriptor, self.cfg.client.retry_policy())?)
    }

    fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            shots: self.cfg.eval.shots,
            rng_seed: self.seed,
            decode: DecodeParams {
                temperature: self.cfg.eval.temperature,
                max_tokens: self.cfg.eval.max_tokens,
            },
            parallelism: self.parallelism,
        }
    }

    fn input_or_default(&self, explicit: Option<&Path>, configured: Option<&Path>, default: &str) -> PathBuf {
        explicit
            .map(Path::to_path_buf)
            .or_else(|| configured.map(|p| self.cfg.resolve(p)))
            .unwrap_or_else(|| self.out.join(default))
    }
}

fn must_exist(path: &Path, what: &str) -> Result<(), CliError> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{what} {} does not exist", path.display())))
    }
}

fn emit<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

pub(super) async fn dispatch(cli: Cli) -> Result<(), CliError> {
    let cfg = ProjectConfig::load(&cli.config)?;
    let ctx = Ctx {
        seed: cli.seed.unwrap_or(cfg.seed),
        out: cli.out.clone().unwrap_or_else(|| cfg.resolve(&cfg.output_dir)),
        parallelism: cli.parallelism.unwrap_or(cfg.parallelism).max(1),
        endpoint: cli.endpoint.clone(),
        cfg,
    };
    std::fs::create_dir_all(&ctx.out).map_err(|e| CliError::io(&ctx.out, e))?;
    match cli.command {
        Command::Ingest => ingest(&ctx),
        Command::Synth { total } => synth(&ctx, total).await,
        Command::Plan { stage, stats, dataset } => plan(&ctx, stage, stats.as_deref(), dataset.as_deref()),
        Command::EvalExams => eval_exams(&ctx).await,
        Command::EvalGazette => eval_gazette(&ctx).await,
        Command::TranslateEval { external } => translate_eval(&ctx, external.as_deref()).await,
        Command::Judge { action } => judge(&ctx, action),
        Command::Report => report(&ctx),
        Command::ServeReview { addr, static_dir } => serve_review(&ctx, &addr, static_dir).await,
    }
}

fn collect_files(path: &Path, out: &mut Vec<PathBuf>) -> Result<(), CliError> {
    if path.is_file() {
        out.push(path.to_path_buf());
        return Ok(());
    }
    let mut entries: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| CliError::io(path, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    entries.sort();
    for p in entries {
        if p.is_dir() {
            collect_files(&p, out)?;
        } else if matches!(p.extension().and_then(|e| e.to_str()), Some("txt" | "jsonl")) {
            out.push(p);
        }
    }
    Ok(())
}

fn ingest(ctx: &Ctx) -> Result<(), CliError> {
    let c = &ctx.cfg.corpus;
    if c.inputs.is_empty() {
        return Err(CliError::Config("[corpus] lists no inputs".into()));
    }
    let mut m = ctx.manifest("ingest");
    let mut docs = Corpus::new();
    for input in &c.inputs {
        let root = ctx.cfg.existing(&input.path, "corpus input")?;
        let mut files = Vec::new();
        collect_files(&root, &mut files)?;
        for f in files {
            m.input(&f);
            if f.extension().and_then(|e| e.to_str()) == Some("jsonl") {
                docs.load_jsonl(&f)?;
            } else {
                let category = input.category.ok_or_else(|| {
                    CliError::Config(format!("corpus input {} needs a category for text files", input.path.display()))
                })?;
                // origin relative to the config dir keeps ids stable across checkouts
                let origin = f.strip_prefix(&ctx.cfg.base_dir).unwrap_or(&f).display().to_string();
                let text = std::fs::read_to_string(&f).map_err(|e| CliError::io(&f, e))?;
                docs.ingest(text, category, origin)?;
            }
        }
    }
    let profile = CleaningProfile {
        boilerplate_min_pages: c.boilerplate_min_pages,
        ..CleaningProfile::default()
    };
    let policy = ChunkPolicy::new(c.target_tokens, c.max_tokens)?;
    let prepared = corpus::prepare(docs.documents(), &profile, &policy);
    jsonl::write_jsonl(&m.output("chunks.jsonl"), &prepared.chunks)?;
    write_json(&m.output("stats.json"), &prepared.stats)?;
    m.write()?;
    emit(&json!({"documents": docs.len(), "chunks": prepared.chunks.len(), "stats": prepared.stats}));
    Ok(())
}

async fn synth(ctx: &Ctx, total: Option<usize>) -> Result<(), CliError> {
    let s = &ctx.cfg.synth;
    let mut m = ctx.manifest("synth");
    let chunks_path = ctx.input_or_default(None, s.chunks.as_deref(), "chunks.jsonl");
    must_exist(&chunks_path, "chunk file")?;
    m.input(&chunks_path);
    let templates = match &s.templates {
        Some(p) => {
            let p = ctx.cfg.existing(p, "template file")?;
            m.input(&p);
            TemplateSet::from_file(&p)?
        }
        None => TemplateSet::default(),
    };
    let chunks: Vec<CleanChunk> = jsonl::read_jsonl(&chunks_path)?;
    let mut pools: BTreeMap<_, Vec<CleanChunk>> = BTreeMap::new();
    for c in chunks {
        if let SourceCategory::Sft(src) = c.category {
            pools.entry(src).or_default().push(c);
        }
    }

    let client = ctx.client(ctx.endpoint.as_deref(), &s.generator, "generator")?;
    let generator = EndpointGenerator::new(client, templates.clone()).with_temperature(s.temperature);
    let spec = s.distribution(total.unwrap_or(s.total));
    let opts = AssemblyOptions {
        rng_seed: ctx.seed,
        limits: ctx.cfg.quality,
        attempt_factor: s.attempt_factor,
        parallelism: ctx.parallelism,
    };
    let assembly = syngen::assemble_dataset(&spec, &generator, &pools, &templates, &opts).await?;
    syngen::export_dataset(&assembly.samples, &m.output("dataset.jsonl"))?;
    let summary = json!({
        "total": assembly.samples.len(),
        "quotas": assembly.quotas,
        "attempts": assembly.stats,
    });
    write_json(&m.output("synth_report.json"), &summary)?;
    m.write()?;
    emit(&summary);
    Ok(())
}

fn plan(ctx: &Ctx, stage: StageArg, stats: Option<&Path>, dataset: Option<&Path>) -> Result<(), CliError> {
    let p = &ctx.cfg.plan;
    let mut m = ctx.manifest("plan");
    let mut summary = serde_json::Map::new();
    if matches!(stage, StageArg::Cpt | StageArg::Both) {
        let stats_path = ctx.input_or_default(stats, None, "stats.json");
        must_exist(&stats_path, "corpus stats")?;
        m.input(&stats_path);
        let text = std::fs::read_to_string(&stats_path).map_err(|e| CliError::io(&stats_path, e))?;
        let actual: CorpusStats =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", stats_path.display())))?;
        let cfg = trainplan::plan_cpt(&actual, &p.cpt)?;
        trainplan::write_config(&cfg, &m.output("cpt.toml"))?;
        let reference = match &p.reference_budget {
            Some(r) => CorpusStats::from_totals(r.iter().map(|(&c, &n)| (c, n))),
            None => CorpusStats::reference_cpt_budget(),
        };
        let budget = trainplan::validate_budget(&actual, &reference, p.budget_tolerance_pct);
        write_json(&m.output("budget.json"), &budget)?;
        summary.insert("cpt".into(), json!(cfg));
        summary.insert("budget_passed".into(), json!(budget.passed));
    }
    if matches!(stage, StageArg::Sft | StageArg::Both) {
        let data_path = ctx.input_or_default(dataset, None, "dataset.jsonl");
        must_exist(&data_path, "SFT dataset")?;
        m.input(&data_path);
        let samples = syngen::import_dataset(&data_path)?;
        let shown = data_path.strip_prefix(&ctx.out).unwrap_or(&data_path).display().to_string();
        let cfg = trainplan::plan_sft(&DatasetManifest::from_samples(shown, &samples), &p.sft)?;
        trainplan::write_config(&cfg, &m.output("sft.toml"))?;
        summary.insert("sft".into(), json!(cfg));
    }
    m.write()?;
    emit(&summary);
    Ok(())
}

fn load_exam_inputs(ctx: &Ctx, m: &mut ManifestBuilder) -> Result<(Vec<ExamQuestion>, Vec<ExamQuestion>), CliError> {
    let path = ctx.cfg.existing(ctx.cfg.required(&ctx.cfg.eval.exams, "eval.exams")?, "exam file")?;
    m.input(&path);
    let questions = load_exams(&path)?;
    let pool = match &ctx.cfg.eval.exemplars {
        Some(p) => {
            let p = ctx.cfg.existing(p, "exemplar file")?;
            m.input(&p);
            load_exams(&p)?
        }
        None => questions.clone(),
    };
    Ok((questions, pool))
}

async fn eval_exams(ctx: &Ctx) -> Result<(), CliError> {
    let mut m = ctx.manifest("eval-exams");
    let (questions, pool) = load_exam_inputs(ctx, &mut m)?;
    let client = ctx.client(ctx.endpoint.as_deref(), &ctx.cfg.eval.endpoint, "evaluation")?;
    let answers = run_exams(&questions, &pool, &client, &ctx.eval_options()).await?;
    let report = evalbench::score(&answers, &questions)?;
    jsonl::write_jsonl(&m.output("exam_answers.jsonl"), &answers)?;
    write_json(&m.output("exam_score.json"), &report)?;
    m.write()?;
    emit(&report);
    Ok(())
}

#[derive(Serialize)]
struct SwitchEntry<'a> {
    item_id: &'a str,
    #[serde(flatten)]
    result: LanguageSwitch,
}

async fn eval_gazette(ctx: &Ctx) -> Result<(), CliError> {
    let mut m = ctx.manifest("eval-gazette");
    let path = ctx.cfg.existing(ctx.cfg.required(&ctx.cfg.eval.gazette, "eval.gazette")?, "gazette file")?;
    m.input(&path);
    let items = load_gazette(&path)?;
    let client = ctx.client(ctx.endpoint.as_deref(), &ctx.cfg.eval.endpoint, "evaluation")?;
    let answers = run_gazette(&items, &client, &ctx.eval_options()).await?;
    jsonl::write_jsonl(&m.output("gazette_answers.jsonl"), &answers)?;
    let flagged: Vec<SwitchEntry> = answers
        .iter()
        .map(|a| SwitchEntry { item_id: &a.item_id, result: detect_language_switch(&a.raw_text, Language::Tr) })
        .filter(|e| e.result.flagged)
        .collect();
    let summary = json!({"answers": answers.len(), "language_switches": flagged.len()});
    write_json(&m.output("language_switch.json"), &json!({"checked": answers.len(), "flagged": flagged}))?;
    m.write()?;
    emit(&summary);
    Ok(())
}

async fn translate_eval(ctx: &Ctx, external: Option<&str>) -> Result<(), CliError> {
    let mut m = ctx.manifest("translate-eval");
    let (questions, _) = load_exam_inputs(ctx, &mut m)?;
    let model = ctx.client(ctx.endpoint.as_deref(), &ctx.cfg.eval.endpoint, "evaluation")?;
    let model_name = model.endpoint().id.clone();
    let opts = ctx.eval_options();

    let mut runs = Vec::new();
    let mut exclusions = serde_json::Map::new();
    let original = run_exams(&questions, &questions, &model, &opts).await?;
    jsonl::write_jsonl(&m.output("answers_original_tr.jsonl"), &original)?;
    runs.push(NamedRun {
        model: model_name.clone(),
        condition: RunCondition::OriginalTr,
        report: evalbench::score(&original, &questions)?,
    });

    let external_name = external.map(str::to_string).or_else(|| ctx.cfg.translate.external_endpoint.clone());
    let mut conditions = vec![(RunCondition::SelfTranslatedEn, "self", None)];
    if let Some(name) = external_name {
        conditions.push((RunCondition::ExternalTranslatedEn, "external", Some(ctx.client(Some(&name), &None, "translation")?)));
    }
    for (condition, tag, translator) in conditions {
        let translator = translator.as_ref().unwrap_or(&model);
        let outcome = translate_items(&questions, translator, Direction::TrToEn, ctx.parallelism).await?;
        jsonl::write_jsonl(&m.output(&format!("translated_{tag}_en.jsonl")), &outcome.translated)?;
        let answers = run_exams(&outcome.translated, &outcome.translated, &model, &opts).await?;
        jsonl::write_jsonl(&m.output(&format!("answers_{tag}_en.jsonl")), &answers)?;
        exclusions.insert(tag.to_string(), json!(outcome.excluded));
        runs.push(NamedRun {
            model: model_name.clone(),
            condition,
            report: evalbench::score(&answers, &outcome.translated)?,
        });
    }

    let table = compare_runs(&runs);
    write_json(&m.output("translation_exclusions.json"), &exclusions)?;
    write_json(&m.output("comparison.json"), &json!({"table": table, "runs": runs}))?;
    let md = m.output("comparison.md");
    std::fs::write(&md, table.render()).map_err(|e| CliError::io(&md, e))?;
    m.write()?;
    print!("{}", table.render());
    Ok(())
}

fn judging_runs(ctx: &Ctx, m: &mut ManifestBuilder) -> Result<Vec<(String, Vec<ModelAnswer>)>, CliError> {
    let configured = &ctx.cfg.judging.runs;
    let files: Vec<(String, PathBuf)> = if configured.is_empty() {
        vec![("gazette".to_string(), ctx.out.join("gazette_answers.jsonl"))]
    } else {
        configured.iter().map(|(n, p)| (n.clone(), ctx.cfg.resolve(p))).collect()
    };
    files
        .into_iter()
        .map(|(name, path)| {
            must_exist(&path, "answer file")?;
            m.input(&path);
            Ok((name, jsonl::read_jsonl(&path)?))
        })
        .collect()
}

fn gazette_items(ctx: &Ctx, m: &mut ManifestBuilder) -> Result<Vec<GazetteItem>, CliError> {
    let path = ctx.cfg.existing(ctx.cfg.required(&ctx.cfg.eval.gazette, "eval.gazette")?, "gazette file")?;
    m.input(&path);
    Ok(load_gazette(&path)?)
}

fn log_path(ctx: &Ctx) -> PathBuf {
    ctx.cfg.judging.log.as_ref().map(|p| ctx.cfg.resolve(p)).unwrap_or_else(|| ctx.out.join("judgments.jsonl"))
}

fn judge(ctx: &Ctx, action: JudgeAction) -> Result<(), CliError> {
    let mut m = ctx.manifest("judge");
    let runs = judging_runs(ctx, &mut m)?;
    let log = log_path(ctx);
    let mut store = JudgmentStore::open(&log, ReviewState::item_keys(&runs))?;
    match action {
        JudgeAction::Import { file } => {
            must_exist(&file, "judgment file")?;
            m.input(&file);
            let (mut added, mut superseded) = (0, 0);
            for r in import_judgments(&file)? {
                match store.record(r)? {
                    RecordOutcome::Inserted => added += 1,
                    RecordOutcome::Superseded(_) => superseded += 1,
                }
            }
            m.output(log.file_name().and_then(|n| n.to_str()).unwrap_or("judgments.jsonl"));
            emit(&json!({"added": added, "superseded": superseded, "total": store.len()}));
        }
        JudgeAction::Export { file } => {
            export_judgments(&store.records(), &file)?;
            emit(&json!({"exported": store.len(), "path": file}));
        }
    }
    m.write()?;
    Ok(())
}

fn report(ctx: &Ctx) -> Result<(), CliError> {
    let mut m = ctx.manifest("report");
    let runs = judging_runs(ctx, &mut m)?;
    let items = gazette_items(ctx, &mut m)?;
    let log = log_path(ctx);
    must_exist(&log, "judgment log")?;
    m.input(&log);
    let store = JudgmentStore::open(&log, ReviewState::item_keys(&runs))?;
    let single = runs.len() == 1;
    let mut scores: BTreeMap<String, ScoreReport> = BTreeMap::new();
    for (name, answers) in &runs {
        let records = store.records_for_run((!single).then_some(name.as_str()));
        scores.insert(name.clone(), accuracy_from_judgments(&records, answers, &items, Policy::Majority)?);
    }
    let agreement = pairwise_kappa_matrix(&store.records());
    let value = json!({
        "scores": scores,
        "agreement": agreement.as_ref().ok(),
        "agreement_error": agreement.as_ref().err().map(|e| e.to_string()),
    });
    write_json(&m.output("report.json"), &value)?;
    m.write()?;
    emit(&value);
    Ok(())
}

async fn serve_review(ctx: &Ctx, addr: &str, static_dir: Option<PathBuf>) -> Result<(), CliError> {
    let mut m = ctx.manifest("serve-review");
    let runs = judging_runs(ctx, &mut m)?;
    let items = gazette_items(ctx, &mut m)?;
    let store = JudgmentStore::open(&log_path(ctx), ReviewState::item_keys(&runs))?;
    let static_dir = static_dir.or_else(|| ctx.cfg.judging.static_dir.as_ref().map(|p| ctx.cfg.resolve(p)));
    if let Some(d) = &static_dir {
        must_exist(d, "static directory")?;
    }
    let state = Arc::new(ReviewState::new(items, runs, store));
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| CliError::io(Path::new(addr), e))?;
    let local = listener.local_addr().map_err(|e| CliError::io(Path::new(addr), e))?;
    eprintln!("{}", json!({"listening": format!("http://{local}")}));
    axum::serve(listener, review::router(state, static_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| CliError::io(Path::new(addr), e))
}
