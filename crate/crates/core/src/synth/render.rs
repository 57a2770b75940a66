//! Rendering structured author lists as bibliography entries.

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AuthorName {
    pub first: String,
    pub last: String,
}

impl AuthorName {
    pub fn new(first: &str, last: &str) -> Self {
        Self {
            first: first.to_owned(),
            last: last.to_owned(),
        }
    }

    /// `Jean-Pierre` → `J.-P.`
    pub fn initials(&self) -> String {
        self.first
            .split('-')
            .filter_map(|part| part.chars().next())
            .map(|c| format!("{c}."))
            .collect::<Vec<_>>()
            .join("-")
    }

    pub fn initial(&self) -> char {
        self.first.chars().next().unwrap_or('X')
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CitationFormat {
    /// `Doe, J. and Roe, A. Title. Venue, 2020.`
    LastInitialsAnd,
    /// `Doe, J., Roe, A., & Smith, B. (2020). Title. Venue.`
    LastInitialsAmpersand,
    /// `Doe, Jane and Roe, Alex. Title. Venue, 2020.`
    LastFirstAnd,
    /// `Doe, Jane; Roe, Alex. Title. Venue 2020.`
    LastFirstSemicolon,
    /// `J. Doe, A. Roe, and B. Smith. 2020. Title. In Venue.`
    InitialsFirst,
    /// `Jane Doe, Alex Roe, and Bob Smith. Title. Venue, 2020.`
    FirstLast,
}

impl CitationFormat {
    pub const ALL: [CitationFormat; 6] = [
        CitationFormat::LastInitialsAnd,
        CitationFormat::LastInitialsAmpersand,
        CitationFormat::LastFirstAnd,
        CitationFormat::LastFirstSemicolon,
        CitationFormat::InitialsFirst,
        CitationFormat::FirstLast,
    ];
}

/// Join with commas and a final conjunction: `a, b, and c` / `a and b`.
fn serial(names: &[String], conj: &str) -> String {
    match names {
        [] => String::new(),
        [one] => one.clone(),
        [a, b] => format!("{a} {conj} {b}"),
        [rest @ .., last] => format!("{}, {conj} {last}", rest.join(", ")),
    }
}

fn close_block(block: String) -> String {
    if block.ends_with('.') {
        block
    } else {
        format!("{block}.")
    }
}

pub fn render_entry(format: CitationFormat, authors: &[AuthorName], et_al: bool, title: &str, venue: &str, year: u32) -> String {
    use CitationFormat::*;
    let block = match format {
        LastInitialsAnd => {
            let names: Vec<_> = authors.iter().map(|a| format!("{}, {}", a.last, a.initials())).collect();
            let mut s = names.join(" and ");
            if et_al {
                s = if s.is_empty() { "et al.".into() } else { format!("{s} et al.") };
            }
            s
        }
        LastInitialsAmpersand => {
            let names: Vec<_> = authors.iter().map(|a| format!("{}, {}", a.last, a.initials())).collect();
            let s = match (names.as_slice(), et_al) {
                ([], true) => "et al.".into(),
                (_, true) => format!("{}, et al.", names.join(", ")),
                ([one], false) => one.clone(),
                ([rest @ .., last], false) => format!("{}, & {last}", rest.join(", ")),
                ([], false) => String::new(),
            };
            return format!("{s} ({year}). {title}. {venue}.");
        }
        LastFirstAnd => {
            let mut names: Vec<_> = authors.iter().map(|a| format!("{}, {}", a.last, a.first)).collect();
            if et_al {
                names.push("others".into());
            }
            names.join(" and ")
        }
        LastFirstSemicolon => {
            let mut names: Vec<_> = authors.iter().map(|a| format!("{}, {}", a.last, a.first)).collect();
            if et_al {
                names.push("et al.".into());
            }
            names.join("; ")
        }
        InitialsFirst => {
            let names: Vec<_> = authors.iter().map(|a| format!("{} {}", a.initials(), a.last)).collect();
            if et_al {
                let mut all = names;
                all.push("et al.".into());
                all.join(", ")
            } else {
                serial(&names, "and")
            }
        }
        FirstLast => {
            let names: Vec<_> = authors.iter().map(|a| format!("{} {}", a.first, a.last)).collect();
            if et_al {
                let mut all = names;
                all.push("et al.".into());
                all.join(", ")
            } else {
                serial(&names, "and")
            }
        }
    };
    match format {
        InitialsFirst => format!("{} {year}. {title}. In {venue}.", close_block(block)),
        LastFirstSemicolon => format!("{} {title}. {venue} {year}.", close_block(block)),
        _ => format!("{} {title}. {venue}, {year}.", close_block(block)),
    }
}

pub(crate) const FIRST_NAMES: &[&str] = &[
    "Jane", "Alex", "Bob", "Maria", "Wei", "Óscar", "Jean-Pierre", "Zoë", "Ana", "Li", "Priya",
    "Mohammed", "Olga", "Kenji", "Fatima", "Lars", "Émile", "Chiara", "Tomás", "Ingrid", "Noah",
    "Sipho", "Aiko", "Rafael", "Hana", "Dmitri", "Ana-Lucía", "Yusuf", "Grace", "Pavel",
];

pub(crate) const LAST_NAMES: &[&str] = &[
    "Doe", "Roe", "Smith", "van Helsing", "Núñez", "García Márquez", "O'Brien", "Smith-Jones",
    "d'Alembert", "de la Cruz", "Müller", "Nguyen", "Kowalski", "Okafor", "Tanaka", "Rossi",
    "Andersson", "Ivanova", "Haddad", "von Neumann", "Lévy", "Sørensen", "McAllister", "Zhang",
    "Papadopoulos", "Dubois", "ten Berge", "Öztürk", "Fernández", "Kim",
];

const SYLLABLES: &[&str] = &[
    "ka", "ro", "vi", "len", "mar", "to", "shi", "ber", "an", "del", "qu", "ist", "mo", "ran",
    "zel", "fa", "gor", "hu", "tin", "wel",
];

/// A pronounceable surname assembled from syllables.
pub(crate) fn synthetic_surname<R: Rng>(rng: &mut R) -> String {
    let n = rng.random_range(2..=4);
    let raw: String = (0..n).map(|_| *SYLLABLES.choose(rng).unwrap()).collect();
    let mut chars = raw.chars();
    let first = chars.next().unwrap().to_uppercase();
    first.chain(chars).collect()
}

const TITLE_WORDS: &[&str] = &[
    "learning", "sparse", "models", "for", "ranking", "robust", "auctions", "under", "uncertainty",
    "graphs", "optimal", "mechanisms", "neural", "estimation", "of", "the", "with", "bandits",
    "markets", "efficient", "inference", "peer", "review",
];

const LEADING_TITLE_WORDS: &[&str] = &[
    "Learning", "Robust", "Optimal", "Efficient", "Towards", "On", "Sparse", "Neural", "Fair",
    "Scalable",
];

pub(crate) fn random_title<R: Rng>(rng: &mut R) -> String {
    let mut words = vec![LEADING_TITLE_WORDS.choose(rng).unwrap().to_string()];
    for _ in 0..rng.random_range(2..7) {
        words.push(TITLE_WORDS.choose(rng).unwrap().to_string());
    }
    words.join(" ")
}

pub(crate) const VENUES: &[&str] = &[
    "Journal of Things",
    "Proceedings of the Conference on Stuff",
    "Transactions on Methods",
    "Annals of Applied Widgets",
];
