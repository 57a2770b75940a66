use std::fmt;

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use super::parse::ParsedAuthor;
use crate::dataset::Reviewer;

/// Initial used when a reviewer has no usable first name.
pub const PLACEHOLDER_INITIAL: char = 'X';

/// `LASTNAME_F` identifier used to match bibliography authors to reviewers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ReviewerKey {
    pub key: String,
    /// The first name yielded no letter; the key cannot identify anyone.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub placeholder_initial: bool,
}

impl fmt::Display for ReviewerKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key)
    }
}

/// Compatibility-decompose, drop diacritics and every non-alphanumeric
/// character, then uppercase.
pub fn normalize_name(name: &str) -> String {
    name.nfkd()
        .filter(|c| !is_combining_mark(*c))
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_uppercase)
        .collect()
}

fn initial_of(first_name: &str) -> Option<char> {
    let token = first_name.split_whitespace().next()?;
    normalize_name(token).chars().find(|c| c.is_alphabetic())
}

fn compose(last: &str, first: &str) -> ReviewerKey {
    let (initial, placeholder_initial) = match initial_of(first) {
        Some(c) => (c, false),
        None => (PLACEHOLDER_INITIAL, true),
    };
    ReviewerKey {
        key: format!("{}_{}", normalize_name(last), initial),
        placeholder_initial,
    }
}

pub fn build_key(reviewer: &Reviewer) -> ReviewerKey {
    compose(&reviewer.last_name, &reviewer.first_name)
}

pub fn author_key(author: &ParsedAuthor) -> ReviewerKey {
    compose(&author.last_name, &author.first_initial.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(last: &str, first: &str) -> ReviewerKey {
        build_key(&Reviewer {
            id: "r".into(),
            last_name: last.into(),
            first_name: first.into(),
            seniority: 0,
            has_text_profile: false,
        })
    }

    #[test]
    fn documented_examples() {
        assert_eq!(key("Doe", "Jane").key, "DOE_J");
        assert_eq!(key("van Helsing", "Abraham").key, "VANHELSING_A");
        assert_eq!(key("Núñez", "Óscar").key, "NUNEZ_O");
    }

    #[test]
    fn hyphens_apostrophes_and_multi_token_first_names() {
        assert_eq!(key("Smith-Jones", "Jean-Pierre").key, "SMITHJONES_J");
        assert_eq!(key("O'Brien", "K. R.").key, "OBRIEN_K");
        assert_eq!(key("Müller", "  anna maria").key, "MULLER_A");
    }

    #[test]
    fn empty_first_name_gets_placeholder() {
        let k = key("Doe", "");
        assert_eq!(k.key, "DOE_X");
        assert!(k.placeholder_initial);
        assert!(key("Doe", "--").placeholder_initial);
    }

    #[test]
    fn normalization_is_idempotent() {
        for s in ["Núñez", "van Helsing", "Ørsted", "Straße", "ｆｕｌｌ"] {
            let once = normalize_name(s);
            assert_eq!(normalize_name(&once), once);
        }
    }

    #[test]
    fn parsed_author_keys_match_reviewer_keys() {
        let a = ParsedAuthor::new("van Helsing", 'A');
        assert_eq!(author_key(&a), key("van Helsing", "Abraham"));
        let b = ParsedAuthor::new("Núñez", 'Ó');
        assert_eq!(author_key(&b).key, "NUNEZ_O");
    }
}
