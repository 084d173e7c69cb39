//! Morpheme phonetic dictionary (exact entries) and morpheme phonetic
//! pattern dictionary (meta-character entries for out-of-vocabulary
//! morphemes).
//!
//! Both files share one line format: `POS <TAB> morpheme <TAB> phonemes
//! <TAB> left label <TAB> right label`, romanized. Pattern morphemes may use
//! the meta-characters `Z` (any consonant), `Y` (any consonant except the
//! silent initial), `V` (any vowel) and `*` (any jamo sequence, possibly
//! empty). Patterns are anchored at both ends of the morpheme.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::format::{data_lines, ResourceError};
use crate::hangul::{self, Coda, Consonant, Jamo, Syllable, Vowel};
use crate::phrasebreak::Tag;

/// Connectivity label on one side of a candidate pronunciation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(String);

impl Label {
    /// "No change": connects to anything.
    pub const NEUTRAL: &'static str = "·";
    /// Phrase edge pseudo-label used in connectivity tables.
    pub const EDGE: &'static str = "#";

    pub fn new(s: impl Into<String>) -> Self {
        Label(s.into())
    }

    pub fn neutral() -> Self {
        Label(Self::NEUTRAL.to_string())
    }

    pub fn edge() -> Self {
        Label(Self::EDGE.to_string())
    }

    pub fn is_neutral(&self) -> bool {
        self.0 == Self::NEUTRAL
    }

    pub fn is_edge(&self) -> bool {
        self.0 == Self::EDGE
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_string())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetaChar {
    Z,
    Y,
    V,
    Star,
}

impl MetaChar {
    fn from_char(c: char) -> Option<Self> {
        Some(match c {
            'Z' => Self::Z,
            'Y' => Self::Y,
            'V' => Self::V,
            '*' => Self::Star,
            _ => return None,
        })
    }

    pub fn accepts(self, jamo: Jamo) -> bool {
        match self {
            MetaChar::Z => jamo.is_consonant(),
            MetaChar::Y => jamo.is_consonant() && jamo != Jamo::Initial(Consonant::IEUNG),
            MetaChar::V => matches!(jamo, Jamo::Vowel(_)),
            MetaChar::Star => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PatternItem {
    Lit(Jamo),
    Meta(MetaChar),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternError {
    UnknownToken(String),
    AmbiguousConsonants(String),
}

impl fmt::Display for PatternError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternError::UnknownToken(t) => write!(f, "unknown token {t:?}"),
            PatternError::AmbiguousConsonants(t) => {
                write!(f, "consonant run {t:?} between vowels needs a '-' separator")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Prev {
    Start,
    Separator,
    Vowel,
    Coda,
    Onset,
}

enum Raw<'a> {
    Meta(MetaChar),
    Separator,
    Consonants(&'a str),
    Vowels(&'a str),
}

fn raw_tokens(text: &str) -> Result<Vec<Raw<'_>>, PatternError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if let Some(m) = MetaChar::from_char(c) {
            out.push(Raw::Meta(m));
        } else if c == '-' {
            out.push(Raw::Separator);
        } else if hangul::is_consonant_letter(c) || hangul::is_vowel_letter(c) {
            let consonant = hangul::is_consonant_letter(c);
            let mut end = i + c.len_utf8();
            while let Some(&(j, d)) = chars.peek() {
                let same = if consonant { hangul::is_consonant_letter(d) } else { hangul::is_vowel_letter(d) };
                if !same {
                    break;
                }
                end = j + d.len_utf8();
                chars.next();
            }
            let run = &text[i..end];
            out.push(if consonant { Raw::Consonants(run) } else { Raw::Vowels(run) });
        } else {
            return Err(PatternError::UnknownToken(c.to_string()));
        }
    }
    Ok(out)
}

/// Parse a romanized pattern into a flat item sequence.
///
/// A consonant run directly before a vowel is an initial; a run after a
/// vowel and not before one is a coda; a run at the start or after `-` that
/// is not followed by a vowel is an initial. A vowel with nothing that can
/// serve as its initial gets the silent initial.
pub fn parse_pattern(text: &str) -> Result<Vec<PatternItem>, PatternError> {
    let raw = raw_tokens(text)?;
    let mut items = Vec::new();
    let mut prev = Prev::Start;
    for (i, token) in raw.iter().enumerate() {
        let next_is_vowel = matches!(raw.get(i + 1), Some(Raw::Vowels(_)) | Some(Raw::Meta(MetaChar::V)));
        match token {
            Raw::Separator => prev = Prev::Separator,
            Raw::Meta(m) => {
                if *m == MetaChar::V && matches!(prev, Prev::Start | Prev::Separator | Prev::Vowel | Prev::Coda) {
                    items.push(PatternItem::Lit(Jamo::Initial(Consonant::IEUNG)));
                }
                items.push(PatternItem::Meta(*m));
                prev = if *m == MetaChar::V { Prev::Vowel } else { Prev::Onset };
            }
            Raw::Vowels(run) => {
                let vowel = Vowel::from_token(run).ok_or_else(|| PatternError::UnknownToken(run.to_string()))?;
                if matches!(prev, Prev::Start | Prev::Separator | Prev::Vowel | Prev::Coda) {
                    items.push(PatternItem::Lit(Jamo::Initial(Consonant::IEUNG)));
                }
                items.push(PatternItem::Lit(Jamo::Vowel(vowel)));
                prev = Prev::Vowel;
            }
            Raw::Consonants(run) => {
                let as_initial = if next_is_vowel {
                    if prev == Prev::Vowel {
                        return Err(PatternError::AmbiguousConsonants(run.to_string()));
                    }
                    true
                } else {
                    matches!(prev, Prev::Start | Prev::Separator)
                };
                if as_initial {
                    let c = Consonant::from_initial_token(run)
                        .ok_or_else(|| PatternError::UnknownToken(run.to_string()))?;
                    items.push(PatternItem::Lit(Jamo::Initial(c)));
                    prev = Prev::Onset;
                } else {
                    let coda = Coda::parse(run).ok_or_else(|| PatternError::UnknownToken(run.to_string()))?;
                    items.extend(coda.consonants().map(|c| PatternItem::Lit(Jamo::Final(c))));
                    prev = Prev::Coda;
                }
            }
        }
    }
    Ok(items)
}

pub fn format_pattern(items: &[PatternItem]) -> String {
    let mut out = String::new();
    for item in items {
        match item {
            PatternItem::Lit(j) => out.push_str(j.token()),
            PatternItem::Meta(MetaChar::Z) => out.push('Z'),
            PatternItem::Meta(MetaChar::Y) => out.push('Y'),
            PatternItem::Meta(MetaChar::V) => out.push('V'),
            PatternItem::Meta(MetaChar::Star) => out.push('*'),
        }
    }
    out
}

/// Meta-character bindings of one successful match.
pub type Bindings = BTreeMap<MetaChar, Vec<Jamo>>;

/// Anchored match of `items` against `jamo`. `*` is non-greedy with
/// backtracking; the first successful assignment is returned.
pub fn match_items(items: &[PatternItem], jamo: &[Jamo]) -> Option<Bindings> {
    let mut bindings = Bindings::new();
    match_from(items, jamo, &mut bindings).then_some(bindings)
}

fn match_from(items: &[PatternItem], jamo: &[Jamo], bindings: &mut Bindings) -> bool {
    let Some((first, rest)) = items.split_first() else {
        return jamo.is_empty();
    };
    match first {
        PatternItem::Lit(lit) => jamo.first() == Some(lit) && match_from(rest, &jamo[1..], bindings),
        PatternItem::Meta(MetaChar::Star) => {
            for take in 0..=jamo.len() {
                let previous = bindings.insert(MetaChar::Star, jamo[..take].to_vec());
                if match_from(rest, &jamo[take..], bindings) {
                    return true;
                }
                restore(bindings, MetaChar::Star, previous);
            }
            false
        }
        PatternItem::Meta(meta) => {
            let Some(&head) = jamo.first() else { return false };
            if !meta.accepts(head) {
                return false;
            }
            let previous = bindings.insert(*meta, vec![head]);
            if match_from(rest, &jamo[1..], bindings) {
                return true;
            }
            restore(bindings, *meta, previous);
            false
        }
    }
}

fn restore(bindings: &mut Bindings, meta: MetaChar, previous: Option<Vec<Jamo>>) {
    match previous {
        Some(v) => bindings.insert(meta, v),
        None => bindings.remove(&meta),
    };
}

/// Substitute bindings into a template; bound jamo are copied verbatim.
pub fn substitute(template: &[PatternItem], bindings: &Bindings) -> Option<Vec<Jamo>> {
    let mut out = Vec::new();
    for item in template {
        match item {
            PatternItem::Lit(j) => out.push(*j),
            PatternItem::Meta(m) => out.extend(bindings.get(m)?.iter().copied()),
        }
    }
    Some(out)
}

/// One row of either dictionary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhoneticEntry {
    pub pos: Tag,
    pub morpheme: Vec<PatternItem>,
    pub template: Vec<PatternItem>,
    pub left: Label,
    pub right: Label,
    /// Literal ASCII key for abbreviations and acronyms (`=KEY` in the file).
    pub foreign: Option<String>,
    /// 1-based line in the source file; also the file-order rank.
    pub line: usize,
}

impl PhoneticEntry {
    pub fn star_count(&self) -> usize {
        self.morpheme.iter().filter(|i| **i == PatternItem::Meta(MetaChar::Star)).count()
    }

    pub fn literal_count(&self) -> usize {
        self.morpheme.iter().filter(|i| matches!(i, PatternItem::Lit(_))).count()
    }

    /// Literal phonemes for meta-free templates.
    pub fn phonemes(&self) -> Option<Vec<Syllable>> {
        let jamo = substitute(&self.template, &Bindings::new())?;
        hangul::syllabify(&jamo).ok()
    }

    pub fn morpheme_text(&self) -> String {
        match &self.foreign {
            Some(key) => format!("={key}"),
            None => format_pattern(&self.morpheme),
        }
    }

    pub fn template_text(&self) -> String {
        format_pattern(&self.template)
    }

    fn metas(items: &[PatternItem]) -> Vec<MetaChar> {
        items
            .iter()
            .filter_map(|i| match i {
                PatternItem::Meta(m) => Some(*m),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("no pattern for {pos} {surface}")]
    NoPatternMatch { pos: String, surface: String },
}

fn parse_entries(file: &str, text: &str, allow_meta: bool) -> Result<Vec<PhoneticEntry>, ResourceError> {
    let mut entries = Vec::new();
    for (line, content) in data_lines(file, text)? {
        let fields: Vec<&str> = content.split('\t').collect();
        let [pos, morpheme, template, left, right] = fields.as_slice() else {
            return Err(ResourceError::parse(file, line, "expected 5 tab-separated fields"));
        };
        let bad = |what: &str, e: PatternError| ResourceError::parse(file, line, format!("{what}: {e}"));
        let (morpheme_items, foreign) = match morpheme.strip_prefix('=') {
            Some(key) if !key.is_empty() => (Vec::new(), Some(key.to_string())),
            Some(_) => return Err(ResourceError::parse(file, line, "empty foreign key")),
            None => (parse_pattern(morpheme).map_err(|e| bad("morpheme", e))?, None),
        };
        let template_items = parse_pattern(template).map_err(|e| bad("phonemes", e))?;
        let pattern_metas = PhoneticEntry::metas(&morpheme_items);
        let template_metas = PhoneticEntry::metas(&template_items);
        if !allow_meta && !(pattern_metas.is_empty() && template_metas.is_empty()) {
            return Err(ResourceError::parse(file, line, "meta-characters are only allowed in the pattern dictionary"));
        }
        for (i, m) in pattern_metas.iter().enumerate() {
            if pattern_metas[..i].contains(m) {
                return Err(ResourceError::parse(file, line, format!("meta-character {m:?} used twice")));
            }
        }
        if let Some(m) = template_metas.iter().find(|m| !pattern_metas.contains(m)) {
            return Err(ResourceError::parse(file, line, format!("template meta-character {m:?} is unbound")));
        }
        if morpheme_items.is_empty() && foreign.is_none() || template_items.is_empty() {
            return Err(ResourceError::parse(file, line, "empty morpheme or phoneme field"));
        }
        let entry = PhoneticEntry {
            pos: Tag::from(*pos),
            morpheme: morpheme_items,
            template: template_items,
            left: Label::from(*left),
            right: Label::from(*right),
            foreign,
            line,
        };
        if template_metas.is_empty() && entry.phonemes().is_none() {
            return Err(ResourceError::parse(file, line, "phoneme field is not syllabifiable"));
        }
        if entry.foreign.is_none() && pattern_metas.is_empty() {
            let jamo = substitute(&entry.morpheme, &Bindings::new()).unwrap_or_default();
            hangul::syllabify(&jamo)
                .map_err(|_| ResourceError::parse(file, line, "morpheme is not syllabifiable"))?;
        }
        entries.push(entry);
    }
    Ok(entries)
}

/// Exact-match dictionary for morphemes the patterns cannot handle.
#[derive(Debug, Clone, Default)]
pub struct PhoneticDictionary {
    entries: Vec<PhoneticEntry>,
    by_surface: HashMap<(Tag, Vec<Syllable>), Vec<usize>>,
    by_foreign: HashMap<String, Vec<usize>>,
}

impl PhoneticDictionary {
    pub fn parse(file: &str, text: &str) -> Result<Self, ResourceError> {
        Ok(Self::from_entries(parse_entries(file, text, false)?))
    }

    pub fn from_entries(entries: Vec<PhoneticEntry>) -> Self {
        let mut by_surface: HashMap<_, Vec<usize>> = HashMap::new();
        let mut by_foreign: HashMap<_, Vec<usize>> = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            match &e.foreign {
                Some(key) => by_foreign.entry(key.clone()).or_default().push(i),
                None => {
                    let jamo = substitute(&e.morpheme, &Bindings::new()).unwrap_or_default();
                    let surface = hangul::syllabify(&jamo).unwrap_or_default();
                    by_surface.entry((e.pos.clone(), surface)).or_default().push(i);
                }
            }
        }
        PhoneticDictionary { entries, by_surface, by_foreign }
    }

    pub fn entries(&self) -> &[PhoneticEntry] {
        &self.entries
    }

    /// All entries with this tag and literal morpheme, in file order.
    pub fn lookup_exact(&self, pos: &Tag, surface: &[Syllable]) -> Vec<&PhoneticEntry> {
        self.by_surface
            .get(&(pos.clone(), surface.to_vec()))
            .map(|ids| ids.iter().map(|&i| &self.entries[i]).collect())
            .unwrap_or_default()
    }

    /// Entries keyed by a literal abbreviation or acronym, any tag.
    pub fn lookup_foreign(&self, key: &str) -> Vec<&PhoneticEntry> {
        self.by_foreign
            .get(key)
            .map(|ids| ids.iter().map(|&i| &self.entries[i]).collect())
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum IndexKey {
    Literal(Jamo),
    Wildcard,
}

#[derive(Debug, Clone)]
pub struct PatternMatch<'a> {
    pub entry: &'a PhoneticEntry,
    pub bindings: Bindings,
    pub phonemes: Vec<Syllable>,
}

/// Pattern dictionary, indexed by (POS, first pattern item).
#[derive(Debug, Clone, Default)]
pub struct PatternDictionary {
    entries: Vec<PhoneticEntry>,
    index: HashMap<(Tag, IndexKey), Vec<usize>>,
}

impl PatternDictionary {
    pub fn parse(file: &str, text: &str) -> Result<Self, ResourceError> {
        let entries = parse_entries(file, text, true)?;
        if let Some(e) = entries.iter().find(|e| e.foreign.is_some()) {
            return Err(ResourceError::parse(file, e.line, "foreign keys belong in the exact dictionary"));
        }
        Ok(Self::from_entries(entries))
    }

    pub fn from_entries(entries: Vec<PhoneticEntry>) -> Self {
        let mut index: HashMap<_, Vec<usize>> = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            let key = match e.morpheme.first() {
                Some(PatternItem::Lit(j)) => IndexKey::Literal(*j),
                _ => IndexKey::Wildcard,
            };
            index.entry((e.pos.clone(), key)).or_default().push(i);
        }
        PatternDictionary { entries, index }
    }

    pub fn entries(&self) -> &[PhoneticEntry] {
        &self.entries
    }

    /// Every entry of this tag whose pattern matches the whole surface,
    /// most specific first: fewer `*`, then more literal jamo, then file
    /// order. Matches whose substituted template is not syllabifiable are
    /// dropped.
    pub fn match_pattern(&self, pos: &Tag, surface: &[Syllable]) -> Result<Vec<PatternMatch<'_>>, LexiconError> {
        let jamo = hangul::flatten(surface);
        let mut ids: Vec<usize> = Vec::new();
        if let Some(first) = jamo.first() {
            for key in [IndexKey::Literal(*first), IndexKey::Wildcard] {
                if let Some(bucket) = self.index.get(&(pos.clone(), key)) {
                    ids.extend(bucket);
                }
            }
        }
        ids.sort_unstable();
        let mut matches: Vec<PatternMatch<'_>> = ids
            .into_iter()
            .filter_map(|i| {
                let entry = &self.entries[i];
                let bindings = match_items(&entry.morpheme, &jamo)?;
                let substituted = substitute(&entry.template, &bindings)?;
                match hangul::syllabify(&substituted) {
                    Ok(phonemes) => Some(PatternMatch { entry, bindings, phonemes }),
                    Err(e) => {
                        log::warn!("pattern at line {} gives {e}", entry.line);
                        None
                    }
                }
            })
            .collect();
        matches.sort_by_key(|m| (m.entry.star_count(), std::cmp::Reverse(m.entry.literal_count()), m.entry.line));
        if matches.is_empty() {
            return Err(LexiconError::NoPatternMatch {
                pos: pos.to_string(),
                surface: hangul::romanize(surface),
            });
        }
        Ok(matches)
    }
}
