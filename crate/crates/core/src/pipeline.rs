//! End-to-end conversion: tagged sentence in, romanized phonemes out.
//!
//! Input is one sentence per line. Words are separated by spaces, morphemes
//! inside a word by `+`, and each morpheme is written `surface/TAG`.
//! Surfaces may be Hangul, romanized Hangul, or non-Korean tokens (digits,
//! dates, acronyms ...) that go through the normalizer.

use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::ccv::{apply_ccv, RuleSet};
use crate::format::{read_file, ResourceError};
use crate::hangul::{self, Jamo, Syllable};
use crate::lattice::{Candidate, ConnectivityTable, LatticeError, Mode, PhonemeLattice, Source};
use crate::lexicon::{Label, PatternDictionary, PhoneticDictionary, PhoneticEntry};
use crate::normalize::{Expansion, Normalizer, Readings, TokenKind};
use crate::phrasebreak::{detect_breaks_lenient, BreakConfig, PhraseLimits, PhraseSegmentation, Tag, TaggedMorpheme};

/// Everything the converter reads from disk.
#[derive(Debug, Clone)]
pub struct Resources {
    pub normalizer: Normalizer,
    pub dictionary: PhoneticDictionary,
    pub patterns: PatternDictionary,
    pub rules: RuleSet,
    pub connectivity: ConnectivityTable,
    pub breaks: BreakConfig,
    pub limits: PhraseLimits,
}

pub const DICTIONARY_FILE: &str = "phonetic.dict";
pub const PATTERN_FILE: &str = "phonetic_pattern.dict";
pub const RULES_FILE: &str = "ccv.rules";
pub const CONNECTIVITY_FILE: &str = "connectivity.tsv";
pub const READINGS_FILE: &str = "readings.tsv";

const BUNDLED_DICTIONARY: &str = include_str!("../../../data/phonetic.dict");
const BUNDLED_PATTERNS: &str = include_str!("../../../data/phonetic_pattern.dict");

impl Resources {
    /// The seed resource set compiled into the crate.
    pub fn bundled() -> Self {
        let resources = Resources {
            normalizer: Normalizer::default(),
            dictionary: PhoneticDictionary::parse(DICTIONARY_FILE, BUNDLED_DICTIONARY).expect("bundled dictionary"),
            patterns: PatternDictionary::parse(PATTERN_FILE, BUNDLED_PATTERNS).expect("bundled patterns"),
            rules: RuleSet::bundled(),
            connectivity: ConnectivityTable::bundled(),
            breaks: BreakConfig::bundled(),
            limits: PhraseLimits::default(),
        };
        resources.validate().expect("bundled labels are consistent");
        resources
    }

    /// Load the five data files from `dir`, and the break-tag file if given
    /// (the bundled one otherwise).
    pub fn load(dir: &Path, break_config: Option<&Path>) -> Result<Self, ResourceError> {
        let load = |name: &str| read_file(&dir.join(name));
        let resources = Resources {
            normalizer: Normalizer::new(Readings::parse(READINGS_FILE, &load(READINGS_FILE)?)?),
            dictionary: PhoneticDictionary::parse(DICTIONARY_FILE, &load(DICTIONARY_FILE)?)?,
            patterns: PatternDictionary::parse(PATTERN_FILE, &load(PATTERN_FILE)?)?,
            rules: RuleSet::parse(RULES_FILE, &load(RULES_FILE)?)?,
            connectivity: ConnectivityTable::parse(CONNECTIVITY_FILE, &load(CONNECTIVITY_FILE)?)?,
            breaks: match break_config {
                Some(path) => BreakConfig::parse(&path.display().to_string(), &read_file(path)?)?,
                None => BreakConfig::bundled(),
            },
            limits: PhraseLimits::default(),
        };
        resources.validate()?;
        Ok(resources)
    }

    /// Every dictionary label must be neutral or known to the connectivity table.
    pub fn validate(&self) -> Result<(), ResourceError> {
        let check = |file: &str, entries: &[PhoneticEntry]| {
            for e in entries {
                for label in [&e.left, &e.right] {
                    if !self.connectivity.knows(label) || label.is_edge() {
                        return Err(ResourceError::parse(file, e.line, format!("unknown label {label:?}")));
                    }
                }
            }
            Ok(())
        };
        check(DICTIONARY_FILE, self.dictionary.entries())?;
        check(PATTERN_FILE, self.patterns.entries())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("morpheme {0:?} has no /TAG")]
    MissingTag(String),
}

/// One morpheme as written in the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputMorpheme {
    pub surface: String,
    pub pos: Tag,
    pub word_index: usize,
}

fn is_tag(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_uppercase())
}

/// Split a tagged sentence into morphemes. A `+` that is not followed by a
/// complete `surface/TAG` belongs to the surface (as in `4+5/SN`).
pub fn parse_sentence(line: &str) -> Result<Vec<InputMorpheme>, InputError> {
    let mut out = Vec::new();
    for (word_index, word) in line.split_whitespace().enumerate() {
        let mut pending = String::new();
        for piece in word.split(hangul::MORPHEME_SEPARATOR) {
            if !pending.is_empty() || piece.is_empty() {
                pending.push(hangul::MORPHEME_SEPARATOR);
            }
            pending.push_str(piece);
            if let Some((surface, tag)) = pending.rsplit_once('/') {
                if is_tag(tag) && !surface.is_empty() {
                    let surface = surface.trim_start_matches(hangul::MORPHEME_SEPARATOR).to_string();
                    out.push(InputMorpheme { surface, pos: Tag::from(tag), word_index });
                    pending.clear();
                }
            }
        }
        if !pending.is_empty() {
            return Err(InputError::MissingTag(pending));
        }
    }
    Ok(out)
}

/// Warnings collected during conversion. Conversion itself never fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    UnknownTag(Tag),
    SpelledOut { surface: String, reason: String },
    NoForeignEntry(String),
    RelaxedJunction { position: usize },
    Lattice(LatticeError),
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::UnknownTag(t) => write!(f, "unknown POS tag {t}; treated as non-trigger"),
            Diagnostic::SpelledOut { surface, reason } => write!(f, "{surface:?} spelled out: {reason}"),
            Diagnostic::NoForeignEntry(key) => write!(f, "no dictionary entry for {key:?}; spelled out"),
            Diagnostic::RelaxedJunction { position } => {
                write!(f, "connectivity relaxed before morpheme {position}")
            }
            Diagnostic::Lattice(e) => write!(f, "lattice: {e}; first candidates used"),
        }
    }
}

/// A morpheme after normalization, with its pronunciation candidates.
#[derive(Debug, Clone)]
pub struct PreparedMorpheme {
    pub input: InputMorpheme,
    pub tagged: TaggedMorpheme,
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone)]
pub struct PreparedSentence {
    pub morphemes: Vec<PreparedMorpheme>,
    pub segmentation: PhraseSegmentation,
    pub diagnostics: Vec<Diagnostic>,
}

/// Which candidate was used for a morpheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub surface: String,
    pub pos: Tag,
    pub source: Source,
    pub phonemes: Vec<Syllable>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConversionResult {
    /// Phrase, then word, then syllables.
    pub phrases: Vec<Vec<Vec<Syllable>>>,
    pub diagnostics: Vec<Diagnostic>,
    pub trace: Vec<TraceEntry>,
}

impl ConversionResult {
    /// Syllables joined by `-`, words by spaces, phrases by ` | `.
    pub fn to_line(&self) -> String {
        let phrases: Vec<String> = self
            .phrases
            .iter()
            .map(|words| words.iter().map(|w| hangul::romanize(w)).collect::<Vec<_>>().join(" "))
            .collect();
        phrases.join(" | ")
    }

    pub fn words(&self) -> Vec<Vec<Syllable>> {
        self.phrases.iter().flatten().cloned().collect()
    }
}

fn looks_romanized(s: &str) -> bool {
    s.chars().all(|c| hangul::is_consonant_letter(c) || hangul::is_vowel_letter(c) || c == '-')
}

fn entry_candidate(entry: &PhoneticEntry, phonemes: Vec<Syllable>, source: Source) -> Candidate {
    Candidate::new(phonemes, entry.left.clone(), entry.right.clone(), source)
}

pub struct Converter<'r> {
    resources: &'r Resources,
}

impl<'r> Converter<'r> {
    pub fn new(resources: &'r Resources) -> Self {
        Converter { resources }
    }

    fn hangul_surface(&self, surface: &str) -> Option<Vec<Syllable>> {
        if surface.chars().all(hangul::is_hangul_syllable) {
            hangul::decompose(surface).ok()
        } else if looks_romanized(surface) {
            hangul::deromanize(surface).ok()
        } else {
            None
        }
    }

    fn is_counter(&self, next: Option<&InputMorpheme>) -> bool {
        let Some(next) = next else { return false };
        self.hangul_surface(&next.surface)
            .and_then(|s| hangul::compose(&s).ok())
            .is_some_and(|h| self.resources.normalizer.readings().is_counter(&h))
    }

    fn spell(&self, surface: &str, diagnostics: &mut Vec<Diagnostic>, reason: String) -> Vec<Syllable> {
        diagnostics.push(Diagnostic::SpelledOut { surface: surface.to_string(), reason });
        let text = self.resources.normalizer.spell_out(surface);
        hangul::decompose(&text).unwrap_or_default()
    }

    /// Surface syllables, possibly retagged, plus foreign-entry candidates.
    fn normalize(
        &self,
        m: &InputMorpheme,
        next: Option<&InputMorpheme>,
        diagnostics: &mut Vec<Diagnostic>,
    ) -> (Vec<Syllable>, Tag, Vec<Candidate>) {
        if let Some(s) = self.hangul_surface(&m.surface) {
            return (s, m.pos.clone(), Vec::new());
        }
        let n = &self.resources.normalizer;
        let token = match n.classify(&m.surface) {
            Ok(t) => t,
            Err(e) => return (self.spell(&m.surface, diagnostics, e.to_string()), m.pos.clone(), Vec::new()),
        };
        let pos = if token.kind == TokenKind::Number { Tag::from("NR") } else { m.pos.clone() };
        match n.expand_token(&token, self.is_counter(next)) {
            Ok(Expansion::Hangul(text)) => (hangul::decompose(&text).unwrap_or_default(), pos, Vec::new()),
            Ok(Expansion::LexiconRequest(key)) => {
                let entries = self.resources.dictionary.lookup_foreign(&key);
                if entries.is_empty() {
                    diagnostics.push(Diagnostic::NoForeignEntry(key.clone()));
                    let text = n.spell_out(&key);
                    return (hangul::decompose(&text).unwrap_or_default(), pos, Vec::new());
                }
                let candidates = entries
                    .iter()
                    .filter_map(|e| Some(entry_candidate(e, e.phonemes()?, Source::Foreign { line: e.line })))
                    .collect();
                (Vec::new(), pos, candidates)
            }
            Err(e) => (self.spell(&m.surface, diagnostics, e.to_string()), pos, Vec::new()),
        }
    }

    /// Exact entries, else pattern matches, else the surface itself; the
    /// last two get morpheme-internal rules applied.
    pub fn candidates(&self, pos: &Tag, surface: &[Syllable]) -> Vec<Candidate> {
        let r = self.resources;
        let exact = r.dictionary.lookup_exact(pos, surface);
        if !exact.is_empty() {
            return exact
                .iter()
                .filter_map(|e| Some(entry_candidate(e, e.phonemes()?, Source::Exact { line: e.line })))
                .collect();
        }
        if let Ok(matches) = r.patterns.match_pattern(pos, surface) {
            return matches
                .into_iter()
                .map(|m| {
                    let phonemes = apply_ccv(&m.phonemes, &r.rules);
                    entry_candidate(m.entry, phonemes, Source::Pattern { line: m.entry.line })
                })
                .collect();
        }
        vec![Candidate::new(apply_ccv(surface, &r.rules), Label::neutral(), Label::neutral(), Source::Identity)]
    }

    pub fn prepare(&self, line: &str) -> Result<PreparedSentence, InputError> {
        let input = parse_sentence(line)?;
        let mut diagnostics = Vec::new();
        let mut morphemes = Vec::with_capacity(input.len());
        for (i, m) in input.iter().enumerate() {
            let (surface, pos, foreign) = self.normalize(m, input.get(i + 1), &mut diagnostics);
            let candidates = if foreign.is_empty() { self.candidates(&pos, &surface) } else { foreign };
            let tagged = TaggedMorpheme::new(surface, pos, m.word_index);
            morphemes.push(PreparedMorpheme { input: m.clone(), tagged, candidates });
        }
        let tagged: Vec<TaggedMorpheme> = morphemes.iter().map(|m| m.tagged.clone()).collect();
        let r = self.resources;
        let (segmentation, unknown) = match detect_breaks_lenient(&tagged, &r.breaks, r.limits) {
            Ok(found) => found,
            Err(_) => (PhraseSegmentation::single(tagged.len()), Vec::new()),
        };
        diagnostics.extend(unknown.into_iter().map(Diagnostic::UnknownTag));
        Ok(PreparedSentence { morphemes, segmentation, diagnostics })
    }

    pub fn lattice<'s>(&'s self, prepared: &PreparedSentence) -> Result<PhonemeLattice<'r>, LatticeError> {
        let columns = prepared.morphemes.iter().map(|m| m.candidates.clone()).collect();
        PhonemeLattice::build(columns, &prepared.segmentation, &self.resources.connectivity, Mode::Relaxed)
    }

    pub fn convert(&self, line: &str) -> Result<ConversionResult, InputError> {
        let prepared = self.prepare(line)?;
        let mut diagnostics = prepared.diagnostics.clone();
        let path = match self.lattice(&prepared).and_then(|l| {
            let path = l.select_path()?;
            Ok((path, l.relaxed.clone(), l.phrases.clone()))
        }) {
            Ok((path, relaxed, phrases)) => {
                for j in relaxed {
                    let position = phrases[j.phrase].start + j.index;
                    diagnostics.push(Diagnostic::RelaxedJunction { position });
                }
                path
            }
            Err(e) => {
                diagnostics.push(Diagnostic::Lattice(e));
                vec![0; prepared.morphemes.len()]
            }
        };
        let mut result = ConversionResult { diagnostics, ..Default::default() };
        for range in prepared.segmentation.phrases() {
            let mut words: Vec<Vec<Syllable>> = Vec::new();
            let mut current_word = None;
            for i in range {
                let m = &prepared.morphemes[i];
                let chosen = &m.candidates[path[i]];
                if current_word != Some(m.input.word_index) {
                    words.push(Vec::new());
                    current_word = Some(m.input.word_index);
                }
                words.last_mut().expect("pushed").extend(chosen.phonemes.iter().copied());
                result.trace.push(TraceEntry {
                    surface: m.input.surface.clone(),
                    pos: m.tagged.pos.clone(),
                    source: chosen.source.clone(),
                    phonemes: chosen.phonemes.clone(),
                });
            }
            result.phrases.push(words);
        }
        Ok(result)
    }

    /// Convert many sentences concurrently; output order follows input.
    pub fn convert_batch<S: AsRef<str> + Sync>(&self, lines: &[S]) -> Vec<Result<ConversionResult, InputError>> {
        lines.par_iter().map(|l| self.convert(l.as_ref())).collect()
    }

    /// Text dump of the pruned lattice of one sentence.
    pub fn inspect(&self, line: &str) -> Result<String, InputError> {
        let prepared = self.prepare(line)?;
        let surfaces: Vec<String> =
            prepared.morphemes.iter().map(|m| format!("{}/{}", m.input.surface, m.tagged.pos)).collect();
        Ok(match self.lattice(&prepared) {
            Ok(l) => l.dump(&surfaces),
            Err(e) => format!("lattice error: {e}\n"),
        })
    }
}

/// One line of an evaluation corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalItem {
    pub line: usize,
    pub input: String,
    pub reference: String,
}

/// Read `tagged sentence <TAB> romanized reference` lines.
pub fn read_eval_corpus(file: &str, text: &str) -> Result<Vec<EvalItem>, ResourceError> {
    crate::format::data_lines(file, text)?
        .map(|(line, content)| {
            let (input, reference) = content
                .split_once('\t')
                .ok_or_else(|| ResourceError::parse(file, line, "expected sentence<TAB>reference"))?;
            Ok(EvalItem { line, input: input.to_string(), reference: reference.to_string() })
        })
        .collect()
}

/// Parse a romanized reference into words of syllables. Phrase marks are
/// skipped; `+` counts as a syllable separator.
pub fn parse_reference(text: &str) -> Result<Vec<Vec<Syllable>>, hangul::HangulError> {
    text.split_whitespace()
        .filter(|w| *w != "|")
        .map(|w| hangul::deromanize(&w.replace(hangul::MORPHEME_SEPARATOR, "-")))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalFailure {
    pub line: usize,
    pub input: String,
    pub expected: String,
    pub got: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub sentences: usize,
    pub correct: usize,
    pub sentence_accuracy: f64,
    pub grapheme_accuracy: f64,
    pub failures: Vec<EvalFailure>,
    /// (line, reason) for lines that could not be evaluated.
    pub skipped: Vec<(usize, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no evaluable sentences")]
    EmptyCorpus { skipped: Vec<(usize, String)> },
}

/// Jamo-level Levenshtein distance.
pub fn jamo_distance(a: &[Jamo], b: &[Jamo]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut row = vec![i + 1];
        for (j, y) in b.iter().enumerate() {
            row.push((prev[j] + usize::from(x != y)).min(prev[j + 1] + 1).min(row[j] + 1));
        }
        prev = row;
    }
    prev[b.len()]
}

/// Words of syllables.
pub type Words = Vec<Vec<Syllable>>;

fn flat(words: &[Vec<Syllable>]) -> Vec<Jamo> {
    words.iter().flat_map(|w| hangul::flatten(w)).collect()
}

/// Score (output, reference) pairs. A sentence is correct when its words
/// equal the reference words exactly.
pub fn score(pairs: &[(Words, Words)]) -> Option<(f64, f64)> {
    if pairs.is_empty() {
        return None;
    }
    let correct = pairs.iter().filter(|(got, want)| got == want).count();
    let (errors, total) = pairs.iter().fold((0, 0), |(e, t), (got, want)| {
        let want = flat(want);
        (e + jamo_distance(&flat(got), &want), t + want.len())
    });
    let grapheme = if total == 0 { 1.0 } else { (1.0 - errors as f64 / total as f64).max(0.0) };
    Some((correct as f64 / pairs.len() as f64, grapheme))
}

pub fn evaluate(corpus: &[EvalItem], resources: &Resources) -> Result<EvalReport, EvalError> {
    let converter = Converter::new(resources);
    let outcomes: Vec<Result<(Words, Words, String), String>> = corpus
        .par_iter()
        .map(|item| {
            let reference = parse_reference(&item.reference).map_err(|e| format!("reference: {e}"))?;
            let result = converter.convert(&item.input).map_err(|e| format!("input: {e}"))?;
            Ok((result.words(), reference, result.to_line()))
        })
        .collect();
    let mut pairs = Vec::new();
    let mut failures = Vec::new();
    let mut skipped = Vec::new();
    for (item, outcome) in corpus.iter().zip(outcomes) {
        match outcome {
            Ok((got, want, line)) => {
                if got != want {
                    failures.push(EvalFailure {
                        line: item.line,
                        input: item.input.clone(),
                        expected: item.reference.clone(),
                        got: line,
                    });
                }
                pairs.push((got, want));
            }
            Err(reason) => skipped.push((item.line, reason)),
        }
    }
    let Some((sentence_accuracy, grapheme_accuracy)) = score(&pairs) else {
        return Err(EvalError::EmptyCorpus { skipped });
    };
    Ok(EvalReport {
        sentences: pairs.len(),
        correct: pairs.len() - failures.len(),
        sentence_accuracy,
        grapheme_accuracy,
        failures,
        skipped,
    })
}
