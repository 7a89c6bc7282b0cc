use crate::corpus::punct_trimmed;

/// Word cores of `text`: whitespace tokens with edge punctuation removed.
/// Each entry is `(core_start, core_end, token_start, token_end)` in bytes.
fn cores(text: &str) -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    let push = |s: usize, e: usize, out: &mut Vec<_>| {
        let (a, b) = punct_trimmed(&text[s..e]);
        if a < b {
            out.push((s + a, s + b, s, e));
        }
    };
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                push(s, i, &mut out);
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        push(s, text.len(), &mut out);
    }
    out
}

fn same_word(surface: &str, term: &str) -> bool {
    surface.to_lowercase() == term
}

/// Case-insensitive, token-bounded occurrences of `term` in `text` as sorted,
/// non-overlapping byte spans. An underscore term `a_b` also matches the
/// whitespace-separated surface `a b`.
pub fn highlight(text: &str, term: &str) -> Vec<(usize, usize)> {
    let term = term.to_lowercase();
    if term.is_empty() {
        return Vec::new();
    }
    let parts: Vec<&str> = term.split('_').filter(|p| !p.is_empty()).collect();
    let words = cores(text);
    let mut spans = Vec::new();
    let mut i = 0;
    while i < words.len() {
        let (s, e, _, _) = words[i];
        if same_word(&text[s..e], &term) {
            spans.push((s, e));
            i += 1;
            continue;
        }
        if parts.len() > 1 && i + parts.len() <= words.len() {
            let window = &words[i..i + parts.len()];
            let words_match = window
                .iter()
                .zip(&parts)
                .all(|(w, p)| same_word(&text[w.0..w.1], p));
            // inner joins must be bare whitespace, not "credit, card"
            let clean_joins = window.windows(2).all(|w| {
                w[0].1 == w[0].3 && w[1].0 == w[1].2 && text[w[0].3..w[1].2].chars().all(char::is_whitespace)
            });
            if words_match && clean_joins {
                spans.push((window[0].0, window[parts.len() - 1].1));
                i += parts.len();
                continue;
            }
        }
        i += 1;
    }
    spans
}
