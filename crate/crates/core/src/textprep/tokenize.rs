/// A surface token produced by [`tokenize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surface {
    pub form: String,
    pub is_punct: bool,
}

fn is_joiner(c: char) -> bool {
    matches!(c, '-' | '\'' | '’')
}

/// Split text into word and punctuation tokens.
///
/// Words are maximal alphanumeric runs; a hyphen or apostrophe between two
/// alphanumeric characters stays inside the word (`кто-то`, `по-моему`).
/// Every other non-space character is a one-character punctuation token.
pub fn tokenize(text: &str) -> Vec<Surface> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut word = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let inner_joiner = is_joiner(c)
            && !word.is_empty()
            && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
        if c.is_alphanumeric() || inner_joiner {
            word.push(c);
            continue;
        }
        if !word.is_empty() {
            out.push(Surface {
                form: std::mem::take(&mut word),
                is_punct: false,
            });
        }
        if !c.is_whitespace() {
            out.push(Surface {
                form: c.to_string(),
                is_punct: true,
            });
        }
    }
    if !word.is_empty() {
        out.push(Surface {
            form: word,
            is_punct: false,
        });
    }
    out
}

/// Lowercase and fold `ё` into `е`, the way lemmas are compared everywhere.
pub fn normalize(s: &str) -> String {
    s.chars()
        .flat_map(char::to_lowercase)
        .map(|c| if c == 'ё' { 'е' } else { c })
        .collect()
}

pub fn is_punct_form(form: &str) -> bool {
    !form.is_empty() && form.chars().all(|c| !c.is_alphanumeric() && !c.is_whitespace())
}
