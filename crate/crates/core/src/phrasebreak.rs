//! Phrase-break detection over POS-tagged morphemes.
//!
//! Breaks go after word-final morphemes whose tag belongs to one of six
//! trigger categories, once the open phrase is long enough. A phrase that
//! reaches the maximum length is closed at the next word boundary.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Range;

use thiserror::Error;

use crate::format::{data_lines, ResourceError};
use crate::hangul::Syllable;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tag(String);

impl Tag {
    pub fn new(tag: impl Into<String>) -> Self {
        Tag(tag.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Tag {
    fn from(s: &str) -> Self {
        Tag(s.to_string())
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedMorpheme {
    pub surface: Vec<Syllable>,
    pub pos: Tag,
    /// Ordinal of the containing word (eojeol); non-decreasing in a sentence.
    pub word_index: usize,
}

impl TaggedMorpheme {
    pub fn new(surface: Vec<Syllable>, pos: impl Into<Tag>, word_index: usize) -> Self {
        TaggedMorpheme { surface, pos: pos.into(), word_index }
    }
}

impl From<String> for Tag {
    fn from(s: String) -> Self {
        Tag(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BreakCategory {
    ConjunctiveEnding,
    AuxiliaryParticle,
    CaseParticle,
    OtherParticle,
    Adverb,
    AdnominalEnding,
}

impl BreakCategory {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "conjunctive_ending" => Self::ConjunctiveEnding,
            "auxiliary_particle" => Self::AuxiliaryParticle,
            "case_particle" => Self::CaseParticle,
            "other_particle" => Self::OtherParticle,
            "adverb" => Self::Adverb,
            "adnominal_ending" => Self::AdnominalEnding,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BreakError {
    #[error("unknown POS tag {0:?}")]
    UnknownTag(String),
    #[error("invalid phrase limits: min {min}, max {max:?}")]
    InvalidLimits { min: usize, max: Option<usize> },
}

/// The declared tag set with each tag's trigger category, if any.
#[derive(Debug, Clone, Default)]
pub struct BreakConfig {
    tags: HashMap<Tag, Option<BreakCategory>>,
}

const BUNDLED_BREAKTAGS: &str = include_str!("../../../config/breaktags.tsv");

impl BreakConfig {
    pub fn bundled() -> Self {
        Self::parse("breaktags.tsv", BUNDLED_BREAKTAGS).expect("bundled breaktags.tsv is valid")
    }

    /// Rows are `category <TAB> tag [tag ...]`; category `other` declares
    /// non-trigger tags.
    pub fn parse(file: &str, text: &str) -> Result<Self, ResourceError> {
        let mut tags = HashMap::new();
        for (line, content) in data_lines(file, text)? {
            let (category, symbols) = content
                .split_once('\t')
                .ok_or_else(|| ResourceError::parse(file, line, "expected category<TAB>tags"))?;
            let category = match category {
                "other" => None,
                name => Some(
                    BreakCategory::from_name(name)
                        .ok_or_else(|| ResourceError::parse(file, line, format!("unknown category {name:?}")))?,
                ),
            };
            for symbol in symbols.split_whitespace() {
                if tags.insert(Tag::from(symbol), category).is_some() {
                    return Err(ResourceError::parse(file, line, format!("tag {symbol:?} declared twice")));
                }
            }
        }
        Ok(BreakConfig { tags })
    }

    pub fn from_tags<I: IntoIterator<Item = (Tag, Option<BreakCategory>)>>(tags: I) -> Self {
        BreakConfig { tags: tags.into_iter().collect() }
    }

    pub fn contains(&self, tag: &Tag) -> bool {
        self.tags.contains_key(tag)
    }

    pub fn is_trigger(&self, tag: &Tag) -> Result<bool, BreakError> {
        self.tags
            .get(tag)
            .map(Option::is_some)
            .ok_or_else(|| BreakError::UnknownTag(tag.to_string()))
    }

    pub fn tags(&self) -> impl Iterator<Item = &Tag> {
        self.tags.keys()
    }

    /// A copy with every trigger category removed.
    pub fn without_triggers(&self) -> Self {
        BreakConfig { tags: self.tags.keys().map(|t| (t.clone(), None)).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhraseLimits {
    pub min_len: usize,
    /// `None` means unbounded.
    pub max_len: Option<usize>,
}

impl Default for PhraseLimits {
    fn default() -> Self {
        PhraseLimits { min_len: 3, max_len: Some(6) }
    }
}

impl PhraseLimits {
    pub fn validate(&self) -> Result<(), BreakError> {
        let bad_max = self.max_len.is_some_and(|m| m < self.min_len);
        if self.min_len == 0 || bad_max {
            return Err(BreakError::InvalidLimits { min: self.min_len, max: self.max_len });
        }
        Ok(())
    }
}

/// Morpheme indices after which a phrase ends. The last morpheme of a
/// non-empty sentence is always included.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PhraseSegmentation {
    pub break_after: BTreeSet<usize>,
}

impl PhraseSegmentation {
    /// A segmentation with one phrase per morpheme range.
    pub fn phrases(&self) -> Vec<Range<usize>> {
        let mut start = 0;
        self.break_after
            .iter()
            .map(|&end| {
                let range = start..end + 1;
                start = end + 1;
                range
            })
            .collect()
    }

    pub fn single(len: usize) -> Self {
        PhraseSegmentation { break_after: (len > 0).then(|| len - 1).into_iter().collect() }
    }
}

pub fn detect_breaks(
    sentence: &[TaggedMorpheme],
    config: &BreakConfig,
    limits: PhraseLimits,
) -> Result<PhraseSegmentation, BreakError> {
    segment(sentence, limits, |tag| config.is_trigger(tag))
}

/// Like [`detect_breaks`] but tags outside the declared set count as
/// non-triggers. Returns the unknown tags alongside the segmentation.
pub fn detect_breaks_lenient(
    sentence: &[TaggedMorpheme],
    config: &BreakConfig,
    limits: PhraseLimits,
) -> Result<(PhraseSegmentation, Vec<Tag>), BreakError> {
    let mut unknown = Vec::new();
    let segmentation = segment(sentence, limits, |tag| {
        Ok(config.is_trigger(tag).unwrap_or_else(|_| {
            if !unknown.contains(tag) {
                unknown.push(tag.clone());
            }
            false
        }))
    })?;
    Ok((segmentation, unknown))
}

fn segment(
    sentence: &[TaggedMorpheme],
    limits: PhraseLimits,
    mut is_trigger: impl FnMut(&Tag) -> Result<bool, BreakError>,
) -> Result<PhraseSegmentation, BreakError> {
    limits.validate()?;
    let mut breaks = BTreeSet::new();
    let mut words = 0;
    for (i, morpheme) in sentence.iter().enumerate() {
        let trigger = is_trigger(&morpheme.pos)?;
        let word_final = sentence.get(i + 1).is_none_or(|next| next.word_index != morpheme.word_index);
        if !word_final {
            continue;
        }
        words += 1;
        let last = i + 1 == sentence.len();
        let forced = limits.max_len.is_some_and(|max| words >= max);
        if last || (trigger && words >= limits.min_len) || forced {
            breaks.insert(i);
            words = 0;
        }
    }
    Ok(PhraseSegmentation { break_after: breaks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> BreakConfig {
        BreakConfig::from_tags([
            (Tag::from("NNG"), None),
            (Tag::from("VV"), None),
            (Tag::from("JKS"), Some(BreakCategory::CaseParticle)),
            (Tag::from("EC"), Some(BreakCategory::ConjunctiveEnding)),
        ])
    }

    fn word(tags: &[&str], index: usize) -> Vec<TaggedMorpheme> {
        tags.iter().map(|t| TaggedMorpheme::new(Vec::new(), *t, index)).collect()
    }

    fn sentence(words: &[&[&str]]) -> Vec<TaggedMorpheme> {
        words.iter().enumerate().flat_map(|(i, w)| word(w, i)).collect()
    }

    fn limits(min: usize, max: Option<usize>) -> PhraseLimits {
        PhraseLimits { min_len: min, max_len: max }
    }

    #[test]
    fn trigger_after_third_word() {
        // Words: NNG | NNG | NNG+JKS | NNG | VV
        let s = sentence(&[&["NNG"], &["NNG"], &["NNG", "JKS"], &["NNG"], &["VV"]]);
        let seg = detect_breaks(&s, &config(), limits(2, None)).unwrap();
        assert_eq!(seg.break_after.into_iter().collect::<Vec<_>>(), vec![3, 5]);
    }

    #[test]
    fn no_trigger_is_one_phrase() {
        let s = sentence(&[&["NNG"], &["VV"], &["NNG"]]);
        let seg = detect_breaks(&s, &config(), limits(1, None)).unwrap();
        assert_eq!(seg.phrases(), vec![0..3]);
    }

    #[test]
    fn short_phrase_blocks_break() {
        let s = sentence(&[&["NNG", "JKS"], &["NNG"], &["VV"]]);
        let seg = detect_breaks(&s, &config(), limits(3, None)).unwrap();
        assert_eq!(seg.break_after.into_iter().collect::<Vec<_>>(), vec![3]);
    }

    #[test]
    fn trigger_must_be_word_final() {
        let s = sentence(&[&["NNG", "JKS", "NNG"], &["VV"]]);
        let seg = detect_breaks(&s, &config(), limits(1, None)).unwrap();
        assert_eq!(seg.break_after.into_iter().collect::<Vec<_>>(), vec![3]);
    }

    #[test]
    fn max_len_forces_break() {
        let s = sentence(&[&["NNG"] as &[&str]; 5]);
        let seg = detect_breaks(&s, &config(), limits(1, Some(2))).unwrap();
        assert_eq!(seg.break_after.into_iter().collect::<Vec<_>>(), vec![1, 3, 4]);
    }

    #[test]
    fn unknown_tag_is_an_error() {
        let s = sentence(&[&["XYZ"]]);
        assert_eq!(
            detect_breaks(&s, &config(), limits(1, None)),
            Err(BreakError::UnknownTag("XYZ".into()))
        );
        let (seg, unknown) = detect_breaks_lenient(&s, &config(), limits(1, None)).unwrap();
        assert_eq!(seg.phrases(), vec![0..1]);
        assert_eq!(unknown, vec![Tag::from("XYZ")]);
    }

    #[test]
    fn limits_are_validated() {
        assert!(detect_breaks(&[], &config(), limits(0, None)).is_err());
        assert!(detect_breaks(&[], &config(), limits(4, Some(3))).is_err());
        assert!(detect_breaks(&[], &config(), limits(1, None)).unwrap().break_after.is_empty());
    }

    #[test]
    fn bundled_config_declares_six_categories() {
        let c = BreakConfig::bundled();
        for tag in ["EC", "JX", "JKS", "JC", "MAG", "ETM"] {
            assert!(c.is_trigger(&Tag::from(tag)).unwrap(), "{tag}");
        }
        assert!(!c.is_trigger(&Tag::from("NNG")).unwrap());
    }
}
