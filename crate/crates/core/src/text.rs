//! Text normalization applied at ingest, and the tokenizer used by the
//! static models.

use unicode_normalization::UnicodeNormalization;

/// NFC, collapse whitespace runs to a single space, trim. No case folding.
pub fn normalize_text(raw: &str) -> String {
    let nfc: String = raw.nfc().collect();
    let mut out = String::with_capacity(nfc.len());
    for word in nfc.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Tokenizer settings. The default keeps tokens of two or more characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TokenizerConfig {
    pub min_token_chars: usize,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self { min_token_chars: 2 }
    }
}

/// Lowercases and splits on every non-alphanumeric character, keeping
/// tokens with at least two characters.
pub fn tokenize(text: &str) -> Vec<String> {
    tokenize_with(text, TokenizerConfig::default())
}

pub fn tokenize_with(text: &str, config: TokenizerConfig) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|piece| piece.chars().count() >= config.min_token_chars)
        .map(|piece| piece.to_lowercase())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizer_examples() {
        assert_eq!(
            tokenize("A glass door, the DOOR!"),
            vec!["glass", "door", "the", "door"]
        );
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("flt-3 ligand"), vec!["flt", "ligand"]);
    }

    #[test]
    fn digit_tokens_are_kept_when_long_enough() {
        assert_eq!(tokenize("amino acids 28-163"), vec!["amino", "acids", "28", "163"]);
    }

    #[test]
    fn normalization_collapses_whitespace() {
        assert_eq!(normalize_text("  a \t b\n\nc  "), "a b c");
        assert_eq!(normalize_text(""), "");
        // e + combining acute composes to a single code point
        assert_eq!(normalize_text("caf\u{0065}\u{0301}"), "caf\u{00e9}");
    }

    #[test]
    fn tokenizer_config_changes_length_rule() {
        let cfg = TokenizerConfig { min_token_chars: 1 };
        assert_eq!(tokenize_with("flt-3", cfg), vec!["flt", "3"]);
    }
}
