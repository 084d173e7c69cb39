//! Hangul syllable codec and the romanized alphabet used by every rule file.
//!
//! Internally text is a sequence of [`Syllable`]s (initial consonant, vowel,
//! coda). Precomposed syllables decompose arithmetically:
//! `code - 0xAC00 = (initial * 21 + vowel) * 28 + final`.
//!
//! The romanization is position dependent. Plain stops are written voiceless
//! in initial position (`t`, `p`) and voiced in coda position (`d`, `b`),
//! aspirates are `k`, `th`, `ph` initially and `k`, `t`, `p` in the coda.
//! The silent initial ㅇ has no spelling. Syllables are joined with `-`.
//! Consonant letters and vowel letters are disjoint, so a syllable splits into
//! its three slots without lookahead.

use std::fmt;

use thiserror::Error;

pub const SYLLABLE_BASE: u32 = 0xAC00;
pub const INITIAL_COUNT: u32 = 19;
pub const VOWEL_COUNT: u32 = 21;
pub const FINAL_COUNT: u32 = 28;
pub const SYLLABLE_COUNT: u32 = INITIAL_COUNT * VOWEL_COUNT * FINAL_COUNT;

/// Syllable separator in romanized strings.
pub const SYLLABLE_SEPARATOR: char = '-';
/// Morpheme separator in tagged input and test fixtures.
pub const MORPHEME_SEPARATOR: char = '+';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HangulError {
    #[error("non-Hangul character {ch:?} at position {position}")]
    NonHangulCharacter { position: usize, ch: char },
    #[error("syllable {index} is not a composable Hangul syllable")]
    InvalidTriple { index: usize },
    #[error("unknown romanization token {token:?} at byte {position}")]
    UnknownToken { position: usize, token: String },
    #[error("jamo sequence cannot be syllabified: {0}")]
    Unsyllabifiable(String),
}

const INITIAL_TOKENS: [&str; 19] = [
    "g", "gg", "n", "t", "tt", "r", "m", "p", "pp", "s", "ss", "", "j", "jj", "ch", "k", "th",
    "ph", "h",
];

const CODA_TOKENS: [&str; 19] = [
    "g", "gg", "n", "d", "dd", "l", "m", "b", "bb", "s", "ss", "ng", "j", "jj", "ch", "k", "t",
    "p", "h",
];

const COMPAT_CONSONANTS: [char; 19] = [
    'ㄱ', 'ㄲ', 'ㄴ', 'ㄷ', 'ㄸ', 'ㄹ', 'ㅁ', 'ㅂ', 'ㅃ', 'ㅅ', 'ㅆ', 'ㅇ', 'ㅈ', 'ㅉ', 'ㅊ', 'ㅋ', 'ㅌ',
    'ㅍ', 'ㅎ',
];

const VOWEL_TOKENS: [&str; 21] = [
    "a", "ae", "ya", "yae", "eo", "e", "yeo", "ye", "o", "wa", "wae", "oe", "yo", "u", "wo", "we",
    "wi", "yu", "eu", "ui", "i",
];

// Final index (Unicode order) to the consonants it is made of.
const FINALS: [&[u8]; 28] = [
    &[],
    &[0],
    &[1],
    &[0, 9],
    &[2],
    &[2, 12],
    &[2, 18],
    &[3],
    &[5],
    &[5, 0],
    &[5, 6],
    &[5, 7],
    &[5, 9],
    &[5, 16],
    &[5, 17],
    &[5, 18],
    &[6],
    &[7],
    &[7, 9],
    &[9],
    &[10],
    &[11],
    &[12],
    &[14],
    &[15],
    &[16],
    &[17],
    &[18],
];

pub fn is_consonant_letter(c: char) -> bool {
    matches!(
        c,
        'b' | 'c' | 'd' | 'g' | 'h' | 'j' | 'k' | 'l' | 'm' | 'n' | 'p' | 'r' | 's' | 't'
    )
}

pub fn is_vowel_letter(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'w' | 'y')
}

/// One of the 19 basic consonant letters, indexed in Unicode initial order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Consonant(u8);

impl Consonant {
    pub const G: Self = Self(0);
    pub const GG: Self = Self(1);
    pub const N: Self = Self(2);
    pub const D: Self = Self(3);
    pub const DD: Self = Self(4);
    pub const L: Self = Self(5);
    pub const M: Self = Self(6);
    pub const B: Self = Self(7);
    pub const BB: Self = Self(8);
    pub const S: Self = Self(9);
    pub const SS: Self = Self(10);
    /// ㅇ: silent in initial position, `ng` in the coda.
    pub const IEUNG: Self = Self(11);
    pub const J: Self = Self(12);
    pub const JJ: Self = Self(13);
    pub const CH: Self = Self(14);
    pub const K: Self = Self(15);
    pub const T: Self = Self(16);
    pub const P: Self = Self(17);
    pub const H: Self = Self(18);

    pub fn from_index(index: usize) -> Option<Self> {
        (index < INITIAL_COUNT as usize).then_some(Self(index as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> impl Iterator<Item = Consonant> {
        (0..INITIAL_COUNT as u8).map(Consonant)
    }

    pub fn initial_token(self) -> &'static str {
        INITIAL_TOKENS[self.index()]
    }

    pub fn coda_token(self) -> &'static str {
        CODA_TOKENS[self.index()]
    }

    pub fn compat_char(self) -> char {
        COMPAT_CONSONANTS[self.index()]
    }

    pub fn from_initial_token(token: &str) -> Option<Self> {
        INITIAL_TOKENS.iter().position(|t| *t == token).map(|i| Self(i as u8))
    }

    pub fn from_coda_token(token: &str) -> Option<Self> {
        CODA_TOKENS.iter().position(|t| *t == token).map(|i| Self(i as u8))
    }

    pub fn is_silent(self) -> bool {
        self == Self::IEUNG
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vowel(u8);

impl Vowel {
    pub fn from_index(index: usize) -> Option<Self> {
        (index < VOWEL_COUNT as usize).then_some(Self(index as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> impl Iterator<Item = Vowel> {
        (0..VOWEL_COUNT as u8).map(Vowel)
    }

    pub fn token(self) -> &'static str {
        VOWEL_TOKENS[self.index()]
    }

    pub fn from_token(token: &str) -> Option<Self> {
        VOWEL_TOKENS.iter().position(|t| *t == token).map(|i| Self(i as u8))
    }

    pub fn compat_char(self) -> char {
        char::from_u32(0x314F + self.0 as u32).expect("compatibility vowel range")
    }
}

/// Coda slot: zero, one or two consonants.
///
/// On the grapheme side a coda must be one of the 27 composable finals. On
/// the phoneme side any pair is allowed as long as its spelling re-tokenizes
/// to the same pair (so `g`+`g` is rejected in favour of `gg`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coda {
    len: u8,
    items: [u8; 2],
}

impl Coda {
    pub const EMPTY: Coda = Coda { len: 0, items: [0, 0] };

    pub fn single(c: Consonant) -> Self {
        Coda { len: 1, items: [c.0, 0] }
    }

    pub fn pair(first: Consonant, second: Consonant) -> Option<Self> {
        let coda = Coda { len: 2, items: [first.0, second.0] };
        (Coda::parse(&coda.romanize()) == Some(coda)).then_some(coda)
    }

    pub fn from_slice(items: &[Consonant]) -> Option<Self> {
        match items {
            [] => Some(Self::EMPTY),
            [c] => Some(Self::single(*c)),
            [a, b] => Self::pair(*a, *b),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn consonants(&self) -> impl Iterator<Item = Consonant> + '_ {
        self.items[..self.len()].iter().map(|&i| Consonant(i))
    }

    pub fn to_vec(&self) -> Vec<Consonant> {
        self.consonants().collect()
    }

    /// Unicode final index, 0 for an empty coda, `None` when not composable.
    pub fn final_index(&self) -> Option<u32> {
        let items = &self.items[..self.len()];
        FINALS.iter().position(|f| *f == items).map(|i| i as u32)
    }

    pub fn from_final_index(index: u32) -> Option<Self> {
        let items = FINALS.get(index as usize)?;
        let consonants: Vec<Consonant> = items.iter().map(|&i| Consonant(i)).collect();
        Some(Coda {
            len: consonants.len() as u8,
            items: [
                consonants.first().map_or(0, |c| c.0),
                consonants.get(1).map_or(0, |c| c.0),
            ],
        })
    }

    pub fn romanize(&self) -> String {
        self.consonants().map(Consonant::coda_token).collect()
    }

    /// Greedy longest-token parse of a coda spelling.
    pub fn parse(text: &str) -> Option<Self> {
        let mut rest = text;
        let mut out = Vec::with_capacity(2);
        while !rest.is_empty() {
            let token = [2, 1]
                .into_iter()
                .filter(|&n| rest.len() >= n && rest.is_char_boundary(n))
                .find_map(|n| Consonant::from_coda_token(&rest[..n]).map(|c| (c, n)));
            let (c, n) = token?;
            out.push(c);
            rest = &rest[n..];
            if out.len() > 2 {
                return None;
            }
        }
        match out.as_slice() {
            [] => Some(Self::EMPTY),
            [c] => Some(Self::single(*c)),
            [a, b] => Some(Coda { len: 2, items: [a.0, b.0] }),
            _ => None,
        }
    }
}

/// A single jamo in a flat sequence. Coda clusters contribute one
/// `Final` per consonant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Jamo {
    Initial(Consonant),
    Vowel(Vowel),
    Final(Consonant),
}

impl Jamo {
    pub fn is_consonant(self) -> bool {
        !matches!(self, Jamo::Vowel(_))
    }

    pub fn token(self) -> &'static str {
        match self {
            Jamo::Initial(c) => c.initial_token(),
            Jamo::Vowel(v) => v.token(),
            Jamo::Final(c) => c.coda_token(),
        }
    }
}

impl fmt::Display for Jamo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Jamo::Initial(c) if c.is_silent() => f.write_str("0"),
            _ => f.write_str(self.token()),
        }
    }
}

/// Initial consonant, vowel and optional coda of one syllable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub initial: Consonant,
    pub vowel: Vowel,
    pub coda: Coda,
}

impl Syllable {
    pub fn new(initial: Consonant, vowel: Vowel, coda: Coda) -> Self {
        Syllable { initial, vowel, coda }
    }

    pub fn from_char(ch: char) -> Option<Self> {
        let code = ch as u32;
        if !(SYLLABLE_BASE..SYLLABLE_BASE + SYLLABLE_COUNT).contains(&code) {
            return None;
        }
        let offset = code - SYLLABLE_BASE;
        let initial = offset / (VOWEL_COUNT * FINAL_COUNT);
        let vowel = (offset % (VOWEL_COUNT * FINAL_COUNT)) / FINAL_COUNT;
        let fin = offset % FINAL_COUNT;
        Some(Syllable {
            initial: Consonant(initial as u8),
            vowel: Vowel(vowel as u8),
            coda: Coda::from_final_index(fin)?,
        })
    }

    pub fn to_char(&self) -> Option<char> {
        let fin = self.coda.final_index()?;
        let code = SYLLABLE_BASE
            + (self.initial.0 as u32 * VOWEL_COUNT + self.vowel.0 as u32) * FINAL_COUNT
            + fin;
        char::from_u32(code)
    }

    pub fn is_composable(&self) -> bool {
        self.coda.final_index().is_some()
    }

    pub fn jamo(&self) -> impl Iterator<Item = Jamo> + '_ {
        [Jamo::Initial(self.initial), Jamo::Vowel(self.vowel)]
            .into_iter()
            .chain(self.coda.consonants().map(Jamo::Final))
    }

    pub fn romanize(&self) -> String {
        let mut out = String::from(self.initial.initial_token());
        out.push_str(self.vowel.token());
        out.push_str(&self.coda.romanize());
        out
    }
}

impl fmt::Display for Syllable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.romanize())
    }
}

pub fn decompose(text: &str) -> Result<Vec<Syllable>, HangulError> {
    text.chars()
        .enumerate()
        .map(|(position, ch)| {
            Syllable::from_char(ch).ok_or(HangulError::NonHangulCharacter { position, ch })
        })
        .collect()
}

pub fn compose(syllables: &[Syllable]) -> Result<String, HangulError> {
    syllables
        .iter()
        .enumerate()
        .map(|(index, s)| s.to_char().ok_or(HangulError::InvalidTriple { index }))
        .collect()
}

pub fn is_hangul_syllable(ch: char) -> bool {
    Syllable::from_char(ch).is_some()
}

pub fn romanize(syllables: &[Syllable]) -> String {
    let parts: Vec<String> = syllables.iter().map(Syllable::romanize).collect();
    parts.join("-")
}

pub fn deromanize(text: &str) -> Result<Vec<Syllable>, HangulError> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let mut offset = 0;
    let mut out = Vec::new();
    for piece in text.split(SYLLABLE_SEPARATOR) {
        out.push(parse_syllable(piece, offset)?);
        offset += piece.len() + 1;
    }
    Ok(out)
}

fn unknown(position: usize, token: &str) -> HangulError {
    HangulError::UnknownToken { position, token: token.to_string() }
}

/// Parse one romanized syllable. `offset` is only used for error positions.
pub fn parse_syllable(piece: &str, offset: usize) -> Result<Syllable, HangulError> {
    if let Some((i, ch)) = piece
        .char_indices()
        .find(|&(_, c)| !is_consonant_letter(c) && !is_vowel_letter(c))
    {
        return Err(unknown(offset + i, &ch.to_string()));
    }
    let onset_end = piece.find(is_vowel_letter).unwrap_or(piece.len());
    let onset = &piece[..onset_end];
    let initial = Consonant::from_initial_token(onset).ok_or_else(|| unknown(offset, onset))?;
    let nucleus_end = piece[onset_end..]
        .find(is_consonant_letter)
        .map_or(piece.len(), |i| onset_end + i);
    let nucleus = &piece[onset_end..nucleus_end];
    let vowel = Vowel::from_token(nucleus).ok_or_else(|| unknown(offset + onset_end, nucleus))?;
    let tail = &piece[nucleus_end..];
    if let Some(i) = tail.find(is_vowel_letter) {
        return Err(unknown(offset + nucleus_end + i, &tail[i..]));
    }
    let coda = Coda::parse(tail).ok_or_else(|| unknown(offset + nucleus_end, tail))?;
    Ok(Syllable { initial, vowel, coda })
}

pub fn flatten(syllables: &[Syllable]) -> Vec<Jamo> {
    syllables.iter().flat_map(|s| s.jamo().collect::<Vec<_>>()).collect()
}

/// Rebuild syllables from a flat jamo sequence. Every vowel must be preceded
/// by exactly one initial and followed by at most two finals.
pub fn syllabify(jamo: &[Jamo]) -> Result<Vec<Syllable>, HangulError> {
    let describe = || jamo.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    let mut out = Vec::new();
    let mut i = 0;
    while i < jamo.len() {
        let (Some(Jamo::Initial(initial)), Some(Jamo::Vowel(vowel))) = (jamo.get(i), jamo.get(i + 1))
        else {
            return Err(HangulError::Unsyllabifiable(describe()));
        };
        i += 2;
        let mut finals = Vec::new();
        while let Some(Jamo::Final(c)) = jamo.get(i) {
            finals.push(*c);
            i += 1;
        }
        let coda = Coda::from_slice(&finals).ok_or_else(|| HangulError::Unsyllabifiable(describe()))?;
        out.push(Syllable::new(*initial, *vowel, coda));
    }
    Ok(out)
}

/// Parse a surface that is either precomposed Hangul or romanized text.
pub fn parse_surface(text: &str) -> Result<Vec<Syllable>, HangulError> {
    if text.chars().any(is_hangul_syllable) {
        decompose(text)
    } else {
        deromanize(text)
    }
}
