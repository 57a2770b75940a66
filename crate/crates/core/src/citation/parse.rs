//! Author extraction from a single bibliography entry.
//!
//! Recognized author-list shapes:
//!
//! * `Doe, J. and Roe, A.`            last name, initials
//! * `Doe, J., Roe, A., & Smith, B.`  last name, initials, ampersand
//! * `Doe, Jane and Roe, Alex`        last name, full first name
//! * `Doe, Jane; Roe, Alex`           semicolon separated
//! * `J. Doe, A. Roe, and B. Smith`   initials first
//! * `Jane Doe, Alex Roe, et al.`     natural order
//!
//! The author block ends at the first token that cannot continue the list
//! (a title word, a parenthesised year, a name with a closing period).
//! `et al.` and `others` contribute no author.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParsedAuthor {
    pub last_name: String,
    pub first_initial: char,
}

impl ParsedAuthor {
    pub fn new(last_name: impl Into<String>, first_initial: char) -> Self {
        Self {
            last_name: last_name.into(),
            first_initial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedEntry {
    pub authors: Vec<ParsedAuthor>,
    /// Set when no author could be extracted.
    pub warning: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok<'a> {
    Word(&'a str),
    Comma,
    Semi,
    Amp,
    /// Brackets, colons and anything else that closes an author list.
    Stop,
}

fn tokenize(entry: &str) -> Vec<Tok<'_>> {
    let mut toks = Vec::new();
    for chunk in entry.split_whitespace() {
        if chunk == "&" {
            toks.push(Tok::Amp);
            continue;
        }
        let mut word = chunk;
        while let Some(rest) = word.strip_prefix(['(', '[', '"', '“']) {
            toks.push(Tok::Stop);
            word = rest;
        }
        let mut suffix = Vec::new();
        while let Some(last) = word.chars().last() {
            let tok = match last {
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                ':' | ')' | ']' | '"' | '”' => Tok::Stop,
                _ => break,
            };
            suffix.push(tok);
            word = &word[..word.len() - last.len_utf8()];
        }
        if !word.is_empty() {
            toks.push(Tok::Word(word));
        }
        toks.extend(suffix.into_iter().rev());
    }
    toks
}

const PARTICLES: &[&str] = &[
    "van", "von", "der", "den", "de", "del", "della", "dei", "di", "da", "dos", "das", "du", "la",
    "le", "ten", "ter", "bin", "ibn", "zu",
];

fn is_particle(w: &str) -> bool {
    PARTICLES.contains(&w)
}

/// `J.`, `J.R.`, `J.-P.`
fn is_initial(w: &str) -> bool {
    let compact: Vec<char> = w.chars().filter(|&c| c != '-').collect();
    compact.len() >= 2
        && compact.len() % 2 == 0
        && compact
            .chunks(2)
            .all(|p| p[0].is_alphabetic() && p[0].is_uppercase() && p[1] == '.')
}

/// Capitalized name token such as `Doe`, `Núñez`, `O'Brien`, `Smith-Jones`,
/// `d'Alembert`. Must not carry a trailing period.
fn is_name_word(w: &str) -> bool {
    let body = match w.split_once(['\'', '’']) {
        Some((pre, rest)) if !pre.is_empty() && pre.chars().all(|c| c.is_lowercase()) && pre.len() <= 2 => rest,
        _ => w,
    };
    let mut chars = body.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    first.is_alphabetic()
        && first.is_uppercase()
        && body.chars().count() >= 2
        && chars.all(|c| c.is_alphabetic() || matches!(c, '-' | '\'' | '’'))
        && body.chars().any(|c| c.is_lowercase())
}

fn strip_period(w: &str) -> Option<&str> {
    w.strip_suffix('.')
}

fn first_letter(s: &str) -> Option<char> {
    s.chars().find(|c| c.is_alphabetic())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    LastFirst,
    InitialsFirst,
    FirstLast,
}

struct Cursor<'t, 'a> {
    toks: &'t [Tok<'a>],
    pos: usize,
}

impl<'a> Cursor<'_, 'a> {
    fn peek(&self) -> Option<Tok<'a>> {
        self.toks.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<Tok<'a>> {
        self.toks.get(self.pos + offset).copied()
    }

    fn peek_word(&self) -> Option<&'a str> {
        match self.peek() {
            Some(Tok::Word(w)) => Some(w),
            _ => None,
        }
    }

    fn bump(&mut self) {
        self.pos += 1;
    }

    /// Consume `et al.` / `others`; true when the list ends here.
    fn eat_et_al(&mut self) -> bool {
        match (self.peek(), self.peek_at(1)) {
            (Some(Tok::Word("et")), Some(Tok::Word(al))) if al.trim_end_matches('.') == "al" => {
                self.pos += 2;
                true
            }
            (Some(Tok::Word(w)), _) if w.trim_end_matches('.') == "others" => {
                self.bump();
                true
            }
            _ => false,
        }
    }

    /// Separator between two authors. Returns false (consuming nothing) when
    /// the list does not continue.
    fn eat_separator(&mut self) -> bool {
        match self.peek() {
            Some(Tok::Comma) | Some(Tok::Semi) => {
                self.bump();
                if matches!(self.peek(), Some(Tok::Amp) | Some(Tok::Word("and"))) {
                    self.bump();
                }
                true
            }
            Some(Tok::Amp) | Some(Tok::Word("and")) => {
                self.bump();
                true
            }
            _ => false,
        }
    }

    /// Particle/name tokens; the last one may close the block with a period.
    /// Returns (parts, terminal).
    fn name_run(&mut self, allow_terminal: bool) -> Option<(Vec<&'a str>, bool)> {
        let mut parts = Vec::new();
        let mut terminal = false;
        while let Some(w) = self.peek_word() {
            if w == "and" {
                break;
            }
            if is_particle(w) || is_name_word(w) {
                parts.push(w);
                self.bump();
                continue;
            }
            if allow_terminal {
                if let Some(stem) = strip_period(w) {
                    if is_name_word(stem) {
                        parts.push(stem);
                        self.bump();
                        terminal = true;
                    }
                }
            }
            break;
        }
        if parts.iter().any(|p| !is_particle(p)) {
            Some((parts, terminal))
        } else {
            None
        }
    }

    fn last_first(&mut self) -> Option<(ParsedAuthor, bool)> {
        let start = self.pos;
        let result = (|| {
            let (last, _) = self.name_run(false)?;
            if self.peek() != Some(Tok::Comma) {
                return None;
            }
            self.bump();
            let w = self.peek_word()?;
            if is_initial(w) {
                let initial = first_letter(w)?;
                while self.peek_word().is_some_and(is_initial) {
                    self.bump();
                }
                return Some((ParsedAuthor::new(last.join(" "), initial), false));
            }
            let (stem, terminal) = match strip_period(w) {
                Some(stem) => (stem, true),
                None => (w, false),
            };
            if !is_name_word(stem) {
                return None;
            }
            self.bump();
            Some((ParsedAuthor::new(last.join(" "), first_letter(stem)?), terminal))
        })();
        if result.is_none() {
            self.pos = start;
        }
        result
    }

    fn initials_first(&mut self) -> Option<(ParsedAuthor, bool)> {
        let start = self.pos;
        let result = (|| {
            let first = self.peek_word().filter(|w| is_initial(w))?;
            let initial = first_letter(first)?;
            while self.peek_word().is_some_and(is_initial) {
                self.bump();
            }
            let (last, terminal) = self.name_run(true)?;
            Some((ParsedAuthor::new(last.join(" "), initial), terminal))
        })();
        if result.is_none() {
            self.pos = start;
        }
        result
    }

    fn first_last(&mut self) -> Option<(ParsedAuthor, bool)> {
        let start = self.pos;
        let result = (|| {
            let first = self.peek_word().filter(|w| is_name_word(w))?;
            self.bump();
            let (last, terminal) = self.name_run(true)?;
            Some((ParsedAuthor::new(last.join(" "), first_letter(first)?), terminal))
        })();
        if result.is_none() {
            self.pos = start;
        }
        result
    }

    fn author(&mut self, shape: Shape) -> Option<(ParsedAuthor, bool)> {
        match shape {
            Shape::LastFirst => self.last_first(),
            Shape::InitialsFirst => self.initials_first(),
            Shape::FirstLast => self.first_last(),
        }
    }
}

fn parse_shape(toks: &[Tok<'_>], shape: Shape) -> Vec<ParsedAuthor> {
    let mut cur = Cursor { toks, pos: 0 };
    let mut authors = Vec::new();
    loop {
        if cur.eat_et_al() {
            break;
        }
        let Some((author, terminal)) = cur.author(shape) else {
            break;
        };
        authors.push(author);
        if terminal || !cur.eat_separator() {
            break;
        }
    }
    authors
}

fn detect_shape(toks: &[Tok<'_>]) -> Shape {
    match toks.first() {
        Some(Tok::Word(w)) if is_initial(w) => return Shape::InitialsFirst,
        _ => {}
    }
    let mut i = 0;
    while let Some(Tok::Word(w)) = toks.get(i) {
        if !(is_particle(w) || is_name_word(w)) {
            return Shape::FirstLast;
        }
        i += 1;
    }
    if i == 0 || toks.get(i) != Some(&Tok::Comma) {
        return Shape::FirstLast;
    }
    let mut segment = Vec::new();
    for tok in &toks[i + 1..] {
        match tok {
            Tok::Word("and") => break,
            Tok::Word(w) => {
                segment.push(*w);
                if w.ends_with('.') && !is_initial(w) {
                    break;
                }
            }
            _ => break,
        }
    }
    match segment.first() {
        None => Shape::LastFirst,
        Some(&"et") => Shape::FirstLast,
        Some(w) if is_initial(w) => Shape::LastFirst,
        Some(_) if segment.len() == 1 => Shape::LastFirst,
        Some(_) => Shape::FirstLast,
    }
}

/// Extract every author named in one bibliography entry.
///
/// Never fails; an entry without recognizable authors yields an empty list
/// and a warning.
pub fn parse_reference_entry(entry: &str) -> ParsedEntry {
    let toks = tokenize(entry);
    let primary = detect_shape(&toks);
    let mut authors = parse_shape(&toks, primary);
    if authors.is_empty() {
        for shape in [Shape::LastFirst, Shape::InitialsFirst, Shape::FirstLast] {
            if shape != primary {
                authors = parse_shape(&toks, shape);
                if !authors.is_empty() {
                    break;
                }
            }
        }
    }
    let warning = authors
        .is_empty()
        .then(|| format!("no authors recognized in entry: {}", truncate(entry, 80)));
    ParsedEntry { authors, warning }
}

fn truncate(s: &str, max: usize) -> String {
    match s.char_indices().nth(max) {
        Some((idx, _)) => format!("{}…", &s[..idx]),
        None => s.to_owned(),
    }
}
