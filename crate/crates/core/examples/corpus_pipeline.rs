//! Ingest the bundled fixture corpus, clean and chunk it, and print token
//! totals per category.

use std::path::PathBuf;

use finadapt::corpus::{prepare, ChunkPolicy, CleaningProfile, Corpus, SourceCategory};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus");
    let mut corpus = Corpus::new();
    for (file, category) in [
        ("cpt/academic_article.txt", "cpt:academic"),
        ("cpt/regulation.txt", "cpt:legislation_regulations"),
        ("sft/news.txt", "sft:news"),
        ("sft/central_bank.txt", "sft:central_bank"),
    ] {
        corpus.load_text_file(&root.join(file), category.parse::<SourceCategory>()?)?;
    }

    let prepared = prepare(corpus.documents(), &CleaningProfile::default(), &ChunkPolicy::new(256, 512)?);
    println!("{} documents -> {} chunks", corpus.len(), prepared.chunks.len());
    for (category, tokens) in prepared.stats.per_category() {
        println!("{:<32} {tokens:>8}", category.to_string());
    }
    println!("{:<32} {:>8}", "total", prepared.stats.grand_total());
    Ok(())
}
