use std::fmt::Write as _;

use rand::seq::index::sample;

use super::{EvalError, ExamQuestion, Language};
use crate::seeding::{derive_seed, rng_for};

pub const DEFAULT_SHOTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FewShotPrompt {
    pub text: String,
    pub exemplar_ids: Vec<String>,
}

struct Labels {
    header: &'static str,
    question: &'static str,
    answer: &'static str,
}

fn labels(language: Language) -> Labels {
    match language {
        Language::Tr => Labels {
            header: "Aşağıda finans alanında çoktan seçmeli sorular yer almaktadır. Son sorunun doğru seçeneğinin harfini yazınız.",
            question: "Soru",
            answer: "Cevap",
        },
        Language::En => Labels {
            header: "The following are multiple-choice questions about finance. Answer the last question with the letter of the correct option.",
            question: "Question",
            answer: "Answer",
        },
    }
}

fn write_block(out: &mut String, q: &ExamQuestion, l: &Labels, solved: bool) {
    let _ = writeln!(out, "{}: {}", l.question, q.stem.trim());
    for (label, text) in &q.options {
        let _ = writeln!(out, "{label}) {}", text.trim());
    }
    if solved {
        let _ = writeln!(out, "{}: {}", l.answer, q.key);
    } else {
        let _ = write!(out, "{}:", l.answer);
    }
}

/// Builds a k-shot prompt: k solved exemplars, then the target unanswered.
///
/// Exemplars come from the target's own domain when at least k candidates
/// exist there, otherwise from the whole pool. The draw is seeded by
/// `(rng_seed, q.id)` and never picks the target itself.
pub fn build_fewshot_prompt(
    q: &ExamQuestion,
    pool: &[ExamQuestion],
    k: usize,
    rng_seed: u64,
) -> Result<FewShotPrompt, EvalError> {
    let global: Vec<&ExamQuestion> = pool.iter().filter(|p| p.id != q.id).collect();
    let same: Vec<&ExamQuestion> = global.iter().copied().filter(|p| p.domain == q.domain).collect();
    let candidates = if same.len() >= k { same } else { global };
    if candidates.len() < k {
        return Err(EvalError::InsufficientExemplars {
            item_id: q.id.clone(),
            needed: k,
            available: candidates.len(),
        });
    }

    let mut rng = rng_for(derive_seed(rng_seed, &q.id));
    let picked: Vec<&ExamQuestion> = sample(&mut rng, candidates.len(), k).into_iter().map(|i| candidates[i]).collect();

    let l = labels(q.language);
    let mut text = String::new();
    let _ = writeln!(text, "{}\n", l.header);
    for ex in &picked {
        write_block(&mut text, ex, &l, true);
        text.push('\n');
    }
    write_block(&mut text, q, &l, false);

    Ok(FewShotPrompt {
        text,
        exemplar_ids: picked.iter().map(|p| p.id.clone()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evalbench::{Choice, ExamDomain};

    pub(crate) fn question(i: usize, domain: ExamDomain) -> ExamQuestion {
        ExamQuestion {
            id: format!("q{i:03}"),
            domain,
            stem: format!("{i} numaralı soru hangisidir?"),
            options: vec![
                (Choice::A, format!("seçenek {i}a")),
                (Choice::B, format!("seçenek {i}b")),
                (Choice::C, format!("seçenek {i}c")),
            ],
            key: Choice::ALL[i % 3],
            language: Language::Tr,
        }
    }

    #[test]
    fn five_exemplars_then_target() {
        let pool: Vec<_> = (0..20).map(|i| question(i, ExamDomain::ALL[i % 2])).collect();
        let p = build_fewshot_prompt(&pool[4], &pool, 5, 11).unwrap();
        assert_eq!(p.exemplar_ids.len(), 5);
        assert_eq!(p.text.matches("\nCevap: ").count(), 5);
        assert!(p.text.ends_with(&format!("Soru: {}\nA) seçenek 4a\nB) seçenek 4b\nC) seçenek 4c\nCevap:", pool[4].stem)));
        assert!(!p.exemplar_ids.contains(&pool[4].id));
        // ten same-domain candidates exist, so all exemplars share the domain
        assert!(p.exemplar_ids.iter().all(|id| pool.iter().find(|q| &q.id == id).unwrap().domain == pool[4].domain));
        assert_eq!(build_fewshot_prompt(&pool[4], &pool, 5, 11).unwrap(), p);
    }

    #[test]
    fn zero_shot_is_target_only() {
        let pool: Vec<_> = (0..3).map(|i| question(i, ExamDomain::BI)).collect();
        let p = build_fewshot_prompt(&pool[0], &pool, 0, 1).unwrap();
        assert!(p.exemplar_ids.is_empty());
        assert_eq!(p.text.matches("Soru: ").count(), 1);
    }

    #[test]
    fn small_pool_is_insufficient() {
        let pool: Vec<_> = (0..3).map(|i| question(i, ExamDomain::BI)).collect();
        let target = question(99, ExamDomain::BI);
        let err = build_fewshot_prompt(&target, &pool, 5, 1).unwrap_err();
        assert!(matches!(err, EvalError::InsufficientExemplars { needed: 5, available: 3, .. }));
    }

    #[test]
    fn falls_back_to_global_pool() {
        let mut pool: Vec<_> = (0..8).map(|i| question(i, ExamDomain::ECO)).collect();
        pool.push(question(50, ExamDomain::AFP));
        let p = build_fewshot_prompt(&pool[8], &pool, 5, 3).unwrap();
        assert_eq!(p.exemplar_ids.len(), 5);
        assert!(!p.exemplar_ids.contains(&"q050".to_string()));
    }
}
