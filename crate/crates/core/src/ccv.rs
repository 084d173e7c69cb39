//! Morpheme-internal conversion with consonant-consonant-vowel rules, and a
//! learner that extracts such rules from transcribed sentences.
//!
//! A rule is keyed on (final of syllable i, initial of syllable i+1, vowel of
//! syllable i+1) and rewrites the final and the initial. All boundaries of a
//! morpheme are rewritten in one simultaneous pass over the original
//! syllables; vowels, the first initial and the last final are never
//! touched.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::format::{data_lines, ResourceError, HEADER};
use crate::hangul::{self, Coda, Consonant, HangulError, Syllable, Vowel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CcvContext {
    pub coda: Coda,
    pub initial: Consonant,
    pub vowel: Vowel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CcvOutput {
    pub coda: Coda,
    pub initial: Consonant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CcvRule {
    pub context: CcvContext,
    pub output: CcvOutput,
}

impl CcvContext {
    pub fn at(left: &Syllable, right: &Syllable) -> Self {
        CcvContext { coda: left.coda, initial: right.initial, vowel: right.vowel }
    }

    pub fn identity(&self) -> CcvOutput {
        CcvOutput { coda: self.coda, initial: self.initial }
    }
}

fn coda_text(coda: &Coda) -> String {
    if coda.is_empty() {
        "-".to_string()
    } else {
        coda.romanize()
    }
}

fn initial_text(c: Consonant) -> &'static str {
    if c.is_silent() {
        "0"
    } else {
        c.initial_token()
    }
}

impl fmt::Display for CcvContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", coda_text(&self.coda), initial_text(self.initial), self.vowel.token())
    }
}

impl fmt::Display for CcvOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", coda_text(&self.coda), initial_text(self.initial))
    }
}

impl fmt::Display for CcvRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}", self.context, self.output)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleSet {
    rules: BTreeMap<CcvContext, CcvOutput>,
}

const BUNDLED_RULES: &str = include_str!("../../../data/ccv.rules");

impl RuleSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bundled() -> Self {
        Self::parse("ccv.rules", BUNDLED_RULES).expect("bundled ccv.rules is valid")
    }

    pub fn parse(file: &str, text: &str) -> Result<Self, ResourceError> {
        let mut rules = BTreeMap::new();
        for (line, content) in data_lines(file, text)? {
            let err = |m: &str| ResourceError::parse(file, line, m);
            let (lhs, rhs) = content.split_once('\t').ok_or_else(|| err("expected context<TAB>output"))?;
            let lhs: Vec<&str> = lhs.split_whitespace().collect();
            let rhs: Vec<&str> = rhs.split_whitespace().collect();
            let ([coda, initial, vowel], [out_coda, out_initial]) = (lhs.as_slice(), rhs.as_slice()) else {
                return Err(err("expected 'final initial vowel<TAB>final initial'"));
            };
            let coda = parse_coda(coda).filter(|c| c.final_index().is_some());
            let context = CcvContext {
                coda: coda.ok_or_else(|| err("bad context final"))?,
                initial: parse_initial(initial).ok_or_else(|| err("bad context initial"))?,
                vowel: Vowel::from_token(vowel).ok_or_else(|| err("bad context vowel"))?,
            };
            let output = CcvOutput {
                coda: parse_coda(out_coda).ok_or_else(|| err("bad output final"))?,
                initial: parse_initial(out_initial).ok_or_else(|| err("bad output initial"))?,
            };
            if rules.insert(context, output).is_some() {
                return Err(err("duplicate context"));
            }
        }
        Ok(RuleSet { rules })
    }

    pub fn insert(&mut self, rule: CcvRule) -> Option<CcvOutput> {
        self.rules.insert(rule.context, rule.output)
    }

    pub fn get(&self, context: &CcvContext) -> Option<&CcvOutput> {
        self.rules.get(context)
    }

    /// The output for a context, identity when no rule applies.
    pub fn output(&self, context: &CcvContext) -> CcvOutput {
        self.get(context).copied().unwrap_or_else(|| context.identity())
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = CcvRule> + '_ {
        self.rules.iter().map(|(c, o)| CcvRule { context: *c, output: *o })
    }

    /// Serialized rule file, header included.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("{HEADER}\n");
        for rule in self.iter() {
            out.push_str(&format!("{rule}\n"));
        }
        out
    }
}

fn parse_coda(token: &str) -> Option<Coda> {
    if token == "-" {
        Some(Coda::EMPTY)
    } else {
        Coda::parse(token).filter(|c| !c.is_empty())
    }
}

fn parse_initial(token: &str) -> Option<Consonant> {
    if token == "0" {
        Some(Consonant::IEUNG)
    } else {
        Consonant::from_initial_token(token).filter(|c| !c.is_silent())
    }
}

/// Rewrite every internal boundary of one morpheme.
pub fn apply_ccv(morpheme: &[Syllable], rules: &RuleSet) -> Vec<Syllable> {
    let mut out = morpheme.to_vec();
    for (i, pair) in morpheme.windows(2).enumerate() {
        if let Some(o) = rules.get(&CcvContext::at(&pair[0], &pair[1])) {
            out[i].coda = o.coda;
            out[i + 1].initial = o.initial;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CcvError {
    #[error("sentence {index}: {reason}")]
    MisalignedSentence { index: usize, reason: String },
}

/// One transcribed sentence: grapheme words split into morphemes, and the
/// romanized phoneme words. Phoneme syllable separators are optional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedSentence {
    pub graphemes: Vec<Vec<Vec<Syllable>>>,
    pub phonemes: Vec<String>,
}

impl AlignedSentence {
    /// Graphemes are romanized or Hangul, words split on whitespace and
    /// morphemes on `+`; a trailing `/TAG` on a morpheme is ignored.
    /// Phrase marks (`|`) on the phoneme side are skipped.
    pub fn parse(graphemes: &str, phonemes: &str) -> Result<Self, HangulError> {
        let graphemes = graphemes
            .split_whitespace()
            .map(|word| {
                word.split(hangul::MORPHEME_SEPARATOR)
                    .map(|m| hangul::parse_surface(m.rsplit_once('/').map_or(m, |(s, _)| s)))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let phonemes = phonemes.split_whitespace().filter(|w| *w != "|").map(str::to_string).collect();
        Ok(AlignedSentence { graphemes, phonemes })
    }

    pub fn grapheme_syllables(&self) -> Vec<Syllable> {
        self.graphemes.iter().flatten().flatten().copied().collect()
    }

    /// Per-syllable phoneme alignment, one entry per grapheme syllable.
    pub fn align(&self) -> Result<Vec<Syllable>, String> {
        if self.graphemes.len() != self.phonemes.len() {
            return Err(format!("{} grapheme words, {} phoneme words", self.graphemes.len(), self.phonemes.len()));
        }
        let mut out = Vec::new();
        for (word, phon) in self.graphemes.iter().zip(&self.phonemes) {
            let reference: Vec<Syllable> = word.iter().flatten().copied().collect();
            out.extend(segment_phonemes(phon, &reference)?);
        }
        Ok(out)
    }

    /// Indices i of grapheme syllables such that i|i+1 is morpheme-internal.
    pub fn internal_boundaries(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut offset = 0;
        for morpheme in self.graphemes.iter().flatten() {
            out.extend(offset..offset + morpheme.len().saturating_sub(1));
            offset += morpheme.len();
        }
        out
    }

    /// (boundary index, context, observed output) for every internal boundary.
    pub fn observations(&self) -> Result<Vec<(usize, CcvContext, CcvOutput)>, String> {
        let phonemes = self.align()?;
        let graphemes = self.grapheme_syllables();
        Ok(self
            .internal_boundaries()
            .into_iter()
            .map(|i| {
                let context = CcvContext::at(&graphemes[i], &graphemes[i + 1]);
                let observed = CcvOutput { coda: phonemes[i].coda, initial: phonemes[i + 1].initial };
                (i, context, observed)
            })
            .collect())
    }
}

/// Read a learner corpus: `graphemes <TAB> phonemes` per line.
pub fn read_corpus(file: &str, text: &str) -> Result<Vec<AlignedSentence>, ResourceError> {
    data_lines(file, text)?
        .map(|(line, content)| {
            let (g, p) = content
                .split_once('\t')
                .ok_or_else(|| ResourceError::parse(file, line, "expected graphemes<TAB>phonemes"))?;
            AlignedSentence::parse(g, p).map_err(|e| ResourceError::parse(file, line, e.to_string()))
        })
        .collect()
}

const SUBSTITUTION: usize = 2;
const INDEL: usize = 3;

fn consonant_distance(a: &[Consonant], b: &[Consonant]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).map(|j| j * INDEL).collect();
    for (i, x) in a.iter().enumerate() {
        let mut row = vec![(i + 1) * INDEL];
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + if x == y { 0 } else { SUBSTITUTION };
            row.push(sub.min(prev[j + 1] + INDEL).min(row[j] + INDEL));
        }
        prev = row;
    }
    prev[b.len()]
}

fn onset(c: Consonant) -> Vec<Consonant> {
    if c.is_silent() {
        Vec::new()
    } else {
        vec![c]
    }
}

#[derive(Debug)]
struct Gap {
    text: String,
    /// Byte offset of a `-` or `+` inside the gap.
    split: Option<usize>,
}

/// Split a romanized phoneme word into syllables, using the grapheme
/// syllables of the same word as reference. Vowels anchor the alignment;
/// each consonant run between two vowels is split into a final and an
/// initial by minimum consonant edit distance against the reference.
pub fn segment_phonemes(word: &str, reference: &[Syllable]) -> Result<Vec<Syllable>, String> {
    let mut vowels: Vec<Vowel> = Vec::new();
    let mut gaps: Vec<Gap> = vec![Gap { text: String::new(), split: None }];
    let chars: Vec<char> = word.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == hangul::SYLLABLE_SEPARATOR || c == hangul::MORPHEME_SEPARATOR {
            let gap = gaps.last_mut().expect("non-empty");
            if gap.split.replace(gap.text.len()).is_some() {
                return Err(format!("empty syllable in {word:?}"));
            }
            i += 1;
        } else if hangul::is_consonant_letter(c) {
            gaps.last_mut().expect("non-empty").text.push(c);
            i += 1;
        } else if hangul::is_vowel_letter(c) {
            let end = (i..chars.len()).find(|&j| !hangul::is_vowel_letter(chars[j])).unwrap_or(chars.len());
            let run: String = chars[i..end].iter().collect();
            let mut rest = run.as_str();
            let mut first = true;
            while !rest.is_empty() {
                let n = (1..=rest.len().min(3))
                    .rev()
                    .find(|&n| Vowel::from_token(&rest[..n]).is_some())
                    .ok_or_else(|| format!("unknown vowel in {word:?}"))?;
                if !first {
                    gaps.push(Gap { text: String::new(), split: None });
                }
                vowels.push(Vowel::from_token(&rest[..n]).expect("checked"));
                rest = &rest[n..];
                first = false;
            }
            gaps.push(Gap { text: String::new(), split: None });
            i = end;
        } else {
            return Err(format!("unexpected {c:?} in {word:?}"));
        }
    }
    if vowels.len() != reference.len() {
        return Err(format!("{word:?} has {} vowels, graphemes have {}", vowels.len(), reference.len()));
    }
    if vowels.is_empty() {
        return Ok(Vec::new());
    }
    let leading = &gaps[0];
    let first_initial = Consonant::from_initial_token(&leading.text)
        .filter(|_| leading.split.is_none_or(|s| s == 0))
        .ok_or_else(|| format!("bad onset {:?} in {word:?}", leading.text))?;
    let trailing = gaps.last().expect("non-empty");
    let last_coda = Coda::parse(&trailing.text)
        .filter(|_| trailing.split.is_none_or(|s| s == trailing.text.len()))
        .ok_or_else(|| format!("bad final {:?} in {word:?}", trailing.text))?;

    let mut initials = vec![first_initial];
    let mut codas = Vec::new();
    for (k, gap) in gaps[1..gaps.len() - 1].iter().enumerate() {
        let (left, right) = (&reference[k], &reference[k + 1]);
        let splits: Vec<usize> = match gap.split {
            Some(s) => vec![s],
            None => (0..=gap.text.len()).collect(),
        };
        let best = splits
            .into_iter()
            .filter_map(|s| {
                let coda = Coda::parse(&gap.text[..s])?;
                let initial = Consonant::from_initial_token(&gap.text[s..])?;
                let cost = consonant_distance(&left.coda.to_vec(), &coda.to_vec())
                    + consonant_distance(&onset(right.initial), &onset(initial));
                Some((cost, coda, initial))
            })
            .min_by_key(|(cost, _, _)| *cost)
            .ok_or_else(|| format!("cannot split {:?} in {word:?}", gap.text))?;
        codas.push(best.1);
        initials.push(best.2);
    }
    codas.push(last_coda);
    Ok(vowels
        .into_iter()
        .zip(initials)
        .zip(codas)
        .map(|((v, i), c)| Syllable::new(i, v, c))
        .collect())
}

type Counts = BTreeMap<CcvContext, BTreeMap<CcvOutput, usize>>;

fn count_observations(corpus: &[AlignedSentence]) -> (Counts, Vec<CcvError>) {
    let per_sentence: Vec<_> = corpus.par_iter().map(AlignedSentence::observations).collect();
    let mut counts = Counts::new();
    let mut skipped = Vec::new();
    for (index, result) in per_sentence.into_iter().enumerate() {
        match result {
            Ok(observations) => {
                for (_, context, output) in observations {
                    *counts.entry(context).or_default().entry(output).or_default() += 1;
                }
            }
            Err(reason) => skipped.push(CcvError::MisalignedSentence { index, reason }),
        }
    }
    (counts, skipped)
}

fn majority(context: &CcvContext, outputs: &BTreeMap<CcvOutput, usize>) -> (CcvOutput, usize) {
    let identity = context.identity();
    let (output, count) = outputs
        .iter()
        .max_by(|(a, ca), (b, cb)| {
            ca.cmp(cb)
                .then_with(|| (**a == identity).cmp(&(**b == identity)))
                .then_with(|| b.to_string().cmp(&a.to_string()))
        })
        .expect("at least one observation");
    (*output, *count)
}

#[derive(Debug, Clone, Default)]
pub struct LearnedRules {
    pub rules: RuleSet,
    pub skipped: Vec<CcvError>,
}

/// Majority output per context, kept when it is not the identity and was
/// observed at least `min_count` times. Ties go to the identity, then to
/// the lexicographically smaller output.
pub fn learn_ccv(corpus: &[AlignedSentence], min_count: usize) -> LearnedRules {
    let (counts, skipped) = count_observations(corpus);
    let mut rules = RuleSet::new();
    for (context, outputs) in &counts {
        let (output, count) = majority(context, outputs);
        if output != context.identity() && count >= min_count {
            rules.insert(CcvRule { context: *context, output });
        }
    }
    LearnedRules { rules, skipped }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageException {
    pub sentence: usize,
    /// Index of the left syllable of the boundary within the sentence.
    pub boundary: usize,
    pub context: CcvContext,
    pub expected: CcvOutput,
    pub observed: CcvOutput,
}

#[derive(Debug, Clone, Default)]
pub struct CoverageReport {
    pub counts: BTreeMap<CcvContext, BTreeMap<CcvOutput, usize>>,
    pub exceptions: Vec<CoverageException>,
    pub skipped: Vec<CcvError>,
}

/// Per-context output counts and the corpus boundaries the rule set gets
/// wrong.
pub fn coverage_report(rules: &RuleSet, corpus: &[AlignedSentence]) -> CoverageReport {
    let (counts, skipped) = count_observations(corpus);
    let mut exceptions = Vec::new();
    for (sentence, s) in corpus.iter().enumerate() {
        let Ok(observations) = s.observations() else { continue };
        for (boundary, context, observed) in observations {
            let expected = rules.output(&context);
            if expected != observed {
                exceptions.push(CoverageException { sentence, boundary, context, expected, observed });
            }
        }
    }
    CoverageReport { counts, exceptions, skipped }
}
