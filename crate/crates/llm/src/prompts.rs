//! Prompt templates and their renderers.
//!
//! Placeholders are `{name}` and are substituted in a single left-to-right
//! pass, so braces inside substituted text are never re-expanded.

use serde::{Deserialize, Serialize};
use topicscope_core::model::BetaTensor;
use topicscope_core::Scalar;

use crate::error::LlmError;

pub const LABEL_TEMPLATE: &str = "You are an expert in topic modeling and temporal data analysis. Given the top words for a topic across multiple time points, your task is to return a short, specific, descriptive topic label. Avoid vague, generic, or overly broad labels. Focus on consistent themes in the top words over time. Use concise noun phrases, 2-5 words max. Do not include any explanation, justification, or extra output.

Top words over time: {trajectory}

Return ONLY the label (no quotes, no extra text):";

pub const SUMMARY_TEMPLATE: &str = "Given the following documents from {timestamp} that mention the words: {word_list}, identify the key themes or discussion points from that time. Be concise. Each bullet should capture a distinct theme in 1-2 short sentences. Avoid any elaboration, examples, or justification.

Return no more than 5-7 bullets.

{context_texts}

Summary:";

pub const CHAT_TEMPLATE: &str = "You are an assistant answering questions strictly based on the provided sample documents below.

If the answer is not clearly supported by the text, respond with: \"The information is not available in the documents provided.\"

Documents: {context_texts}

User Question: {user_question}";

pub const REFUSAL_SENTINEL: &str = "The information is not available in the documents provided.";

const TRUNCATION_MARK: &str = " [truncated]";

/// Substitutes `{name}` placeholders. Unknown placeholders are left as is.
pub fn render(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let tail = &rest[open..];
        let hit = tail.find('}').and_then(|close| {
            let name = &tail[1..close];
            vars.iter().find(|(k, _)| *k == name).map(|(_, v)| (close, *v))
        });
        match hit {
            Some((close, value)) => {
                out.push_str(value);
                rest = &tail[close + 1..];
            }
            None => {
                out.push('{');
                rest = &tail[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

/// Top-N words of one topic at every timestamp, in time order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordTrajectory {
    pub topic: usize,
    pub rows: Vec<(String, Vec<String>)>,
}

impl KeywordTrajectory {
    pub fn from_beta<F: Scalar>(beta: &BetaTensor<F>, topic: usize, n: usize) -> Result<Self, LlmError> {
        let rows = (0..beta.num_times())
            .map(|t| {
                let set = beta.top_words(topic, t, n)?;
                let words = set.words.iter().map(|&v| beta.vocab[v].clone()).collect();
                Ok((beta.timestamps[t].clone(), words))
            })
            .collect::<Result<_, LlmError>>()?;
        Ok(Self { topic, rows })
    }

    /// One `label: w1, w2, ...` line per timestamp.
    pub fn render(&self) -> String {
        self.rows
            .iter()
            .map(|(label, words)| format!("{label}: {}", words.join(", ")))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextBudget {
    pub total_chars: usize,
    pub per_doc_chars: usize,
}

impl Default for ContextBudget {
    fn default() -> Self {
        Self { total_chars: 24_000, per_doc_chars: 4_000 }
    }
}

fn truncate_chars(text: &str, cap: usize) -> (&str, bool) {
    match text.char_indices().nth(cap) {
        Some((cut, _)) => (&text[..cut], true),
        None => (text, false),
    }
}

/// Numbers and concatenates documents. Each is cut to the per-document cap
/// (tail dropped, marked); documents past the total budget are omitted with a note.
pub fn render_context(docs: &[String], budget: ContextBudget) -> Result<String, LlmError> {
    if docs.is_empty() {
        return Err(LlmError::NoContext);
    }
    let mut blocks: Vec<String> = Vec::new();
    let mut used = 0usize;
    for (i, doc) in docs.iter().enumerate() {
        let (kept, cut) = truncate_chars(doc.trim(), budget.per_doc_chars);
        let block = format!("Document {}:\n{}{}", i + 1, kept, if cut { TRUNCATION_MARK } else { "" });
        let cost = block.chars().count() + if blocks.is_empty() { 0 } else { 2 };
        if used + cost > budget.total_chars {
            if blocks.is_empty() {
                return Err(LlmError::ContextOverflow { doc: 1, chars: cost, budget: budget.total_chars });
            }
            blocks.push(format!("[{} more documents omitted: context budget reached]", docs.len() - i));
            break;
        }
        used += cost;
        blocks.push(block);
    }
    Ok(blocks.join("\n\n"))
}

pub fn label_prompt(traj: &KeywordTrajectory) -> Result<String, LlmError> {
    if traj.rows.is_empty() {
        return Err(LlmError::EmptyTrajectory);
    }
    Ok(render(LABEL_TEMPLATE, &[("trajectory", &traj.render())]))
}

pub fn summary_prompt(context: &str, words: &[String], timestamp: &str) -> String {
    render(
        SUMMARY_TEMPLATE,
        &[("timestamp", timestamp), ("word_list", &words.join(", ")), ("context_texts", context)],
    )
}

pub fn chat_system_prompt(context: &str, question: &str) -> String {
    render(CHAT_TEMPLATE, &[("context_texts", context), ("user_question", question)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_is_single_pass() {
        let out = render("{a}/{b}/{c}", &[("a", "{b}"), ("b", "x")]);
        assert_eq!(out, "{b}/x/{c}");
        assert_eq!(render("no braces", &[]), "no braces");
        assert_eq!(render("{", &[("a", "1")]), "{");
    }

    #[test]
    fn context_truncation_and_budget() {
        let b = ContextBudget { total_chars: 50, per_doc_chars: 5 };
        let docs = vec!["abcdefgh".to_string(), "xy".to_string(), "zz".to_string()];
        let out = render_context(&docs, b).unwrap();
        assert!(out.starts_with("Document 1:\nabcde [truncated]\n\nDocument 2:\nxy"));
        assert!(out.ends_with("[1 more documents omitted: context budget reached]"));

        let tight = ContextBudget { total_chars: 10, per_doc_chars: 100 };
        assert!(matches!(render_context(&docs, tight), Err(LlmError::ContextOverflow { doc: 1, .. })));
        assert!(matches!(render_context(&[], b), Err(LlmError::NoContext)));
    }

    #[test]
    fn truncation_counts_chars_not_bytes() {
        let (kept, cut) = truncate_chars("naïve café", 4);
        assert_eq!((kept, cut), ("naïv", true));
        assert_eq!(truncate_chars("abc", 3), ("abc", false));
    }
}
