use unicode_normalization::UnicodeNormalization;

/// Punctuation split off the edges of words.
pub const EDGE_PUNCTUATION: [char; 6] = ['?', '!', '.', ',', ';', ':'];

pub fn is_edge_punctuation(c: char) -> bool {
    EDGE_PUNCTUATION.contains(&c)
}

/// Canonical composed form (NFC).
pub fn normalize(text: &str) -> String {
    text.nfc().collect()
}

/// A tokenized utterance.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenSeq {
    pub tokens: Vec<String>,
    pub original: String,
}

impl TokenSeq {
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        let original = tokens.join(" ");
        Self { tokens, original }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens joined by single spaces.
    pub fn joined(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Split an utterance into tokens: NFC, whitespace split, edge punctuation
/// detached one character per token. Case is preserved.
pub fn tokenize(utterance: &str) -> TokenSeq {
    let normalized = normalize(utterance);
    let mut tokens = Vec::new();
    for word in normalized.split_whitespace() {
        split_word(word, &mut tokens);
    }
    TokenSeq { tokens, original: utterance.to_string() }
}

/// Split one whitespace-free word into its core and detached punctuation.
pub(crate) fn split_word(word: &str, out: &mut Vec<String>) {
    let core_start = word.find(|c: char| !is_edge_punctuation(c)).unwrap_or(word.len());
    out.extend(word[..core_start].chars().map(String::from));
    let rest = &word[core_start..];
    if rest.is_empty() {
        return;
    }
    let core_end = rest.trim_end_matches(is_edge_punctuation).len();
    out.push(rest[..core_end].to_string());
    out.extend(rest[core_end..].chars().map(String::from));
}

/// Tokens with punctuation-only tokens removed, joined by single spaces.
pub fn punctuation_stripped_key(text: &str) -> String {
    tokenize(text)
        .tokens
        .into_iter()
        .filter(|t| !t.chars().all(is_edge_punctuation))
        .collect::<Vec<_>>()
        .join(" ")
}
