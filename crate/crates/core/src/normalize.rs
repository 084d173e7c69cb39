//! Expansion of non-Korean symbols (numbers, dates, times, scores, math,
//! phone numbers, acronyms) into Hangul.
//!
//! Token grammars are documented in `docs/normalization.md`. Numbers are
//! read by a small positional automaton over digit groups of four (myriad
//! grouping). All reading words come from `data/readings.tsv`.

use std::collections::{HashMap, HashSet};
use std::sync::LazyLock;

use regex::Regex;
use thiserror::Error;

use crate::format::{data_lines, ResourceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizationError {
    #[error("cannot classify token {0:?}")]
    Unclassifiable(String),
    #[error("malformed number {0:?}")]
    MalformedNumber(String),
    #[error("native Korean reading only covers integers 1..99, got {0:?}")]
    NativeOutOfRange(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Number,
    Date,
    Time,
    Score,
    MathExpr,
    Phone,
    Abbreviation,
    SpelledAcronym,
    WordAcronym,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonKoreanToken {
    pub surface: String,
    pub kind: TokenKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NumberStyle {
    SinoKorean,
    /// Attributive native forms (한, 두, 스무 ...), used before counters.
    NativeKorean,
}

/// Result of expanding one token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expansion {
    Hangul(String),
    /// Abbreviations and word acronyms are pronounced through the lexicon.
    LexiconRequest(String),
}

static NUMBER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[+-]?(\d{1,3}(,\d{3})+|\d+)(\.\d+)?$").unwrap());
static SLASH_DATE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(\d{1,2})/(\d{1,2})/(\d{2}|\d{4})$").unwrap());
static NAMED_DATE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(\d{1,2})-([A-Z][a-z]{2})-(\d{2}|\d{4})$").unwrap());
static COLON_PAIR: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^(\d+):(\d+)$").unwrap());
static PHONE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\d+(-\d+)*$").unwrap());
static MATH: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\d+(\.\d+)?([-+*x/=]\d+(\.\d+)?)+$").unwrap());
static OPERAND: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\d+(\.\d+)?").unwrap());

/// Reading tables loaded from `readings.tsv`.
#[derive(Debug, Clone)]
pub struct Readings {
    digits: Vec<String>,
    places: Vec<String>,
    myriads: Vec<String>,
    minus: String,
    plus: String,
    point: String,
    native_units: Vec<String>,
    native_tens: Vec<String>,
    native_round_twenty: String,
    counters: HashSet<String>,
    units: HashMap<String, String>,
    month_names: HashMap<u32, String>,
    month_abbr: HashMap<String, u32>,
    year_pivot: u32,
    score: String,
    fraction: String,
    ops: HashMap<char, String>,
    phone_zero: String,
    phone_separator: String,
    letters: HashMap<char, String>,
    symbols: HashMap<char, String>,
    acronym_spell: HashSet<String>,
    acronym_word: HashSet<String>,
}

const BUNDLED_READINGS: &str = include_str!("../../../data/readings.tsv");

impl Readings {
    pub fn bundled() -> Self {
        Self::parse("readings.tsv", BUNDLED_READINGS).expect("bundled readings.tsv is valid")
    }

    pub fn parse(file: &str, text: &str) -> Result<Self, ResourceError> {
        let mut rows: HashMap<(String, String), (usize, String)> = HashMap::new();
        let mut lists: HashMap<String, HashSet<String>> = HashMap::new();
        for (line, content) in data_lines(file, text)? {
            let fields: Vec<&str> = content.split('\t').collect();
            match fields.as_slice() {
                [kind, key] => {
                    lists.entry(kind.to_string()).or_default().insert(key.to_string());
                }
                [kind, key, value] => {
                    rows.insert((kind.to_string(), key.to_string()), (line, value.to_string()));
                }
                _ => return Err(ResourceError::parse(file, line, "expected 2 or 3 tab-separated fields")),
            }
        }
        let get = |kind: &str, key: &str| -> Result<String, ResourceError> {
            rows.get(&(kind.to_string(), key.to_string()))
                .map(|(_, v)| v.clone())
                .ok_or_else(|| ResourceError::parse(file, 0, format!("missing reading {kind} {key}")))
        };
        let by_kind = |kind: &str| -> Vec<(&String, &(usize, String))> {
            rows.iter().filter(|((k, _), _)| k == kind).map(|((_, key), v)| (key, v)).collect()
        };

        let digits = (0..10).map(|d| get("digit", &d.to_string())).collect::<Result<_, _>>()?;
        let places = ["10", "100", "1000"].iter().map(|p| get("place", p)).collect::<Result<_, _>>()?;
        let myriads = ["10000", "100000000", "1000000000000"]
            .iter()
            .map(|p| get("myriad", p))
            .collect::<Result<_, _>>()?;
        let mut native_units = vec![String::new()];
        for d in 1..10 {
            native_units.push(get("native_unit", &d.to_string())?);
        }
        let mut native_tens = vec![String::new()];
        for d in 1..10 {
            native_tens.push(get("native_ten", &(d * 10).to_string())?);
        }
        let units = ["year", "month", "day", "hour", "minute"]
            .iter()
            .map(|u| get("unit", u).map(|v| (u.to_string(), v)))
            .collect::<Result<_, _>>()?;
        let mut month_names = HashMap::new();
        for (key, (line, value)) in by_kind("month_name") {
            let month = key.parse().map_err(|_| ResourceError::parse(file, *line, "bad month number"))?;
            month_names.insert(month, value.clone());
        }
        let mut month_abbr = HashMap::new();
        for (key, (line, value)) in by_kind("month_abbr") {
            let month = value.parse().map_err(|_| ResourceError::parse(file, *line, "bad month number"))?;
            month_abbr.insert(key.clone(), month);
        }
        let single_char = |line: usize, key: &str| {
            let mut chars = key.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(ResourceError::parse(file, line, "key must be a single character")),
            }
        };
        let mut ops = HashMap::new();
        for (key, (line, value)) in by_kind("op") {
            ops.insert(single_char(*line, key)?, value.clone());
        }
        let mut letters = HashMap::new();
        for (key, (line, value)) in by_kind("letter") {
            letters.insert(single_char(*line, key)?, value.clone());
        }
        let mut symbols = HashMap::new();
        for (key, (line, value)) in by_kind("symbol") {
            symbols.insert(single_char(*line, key)?, value.clone());
        }
        let year_pivot = get("year_pivot", "yy")?
            .parse()
            .map_err(|_| ResourceError::parse(file, 0, "year_pivot must be a number"))?;

        Ok(Readings {
            digits,
            places,
            myriads,
            minus: get("sign", "-")?,
            plus: get("sign", "+")?,
            point: get("point", ".")?,
            native_units,
            native_tens,
            native_round_twenty: get("native_round", "20")?,
            counters: lists.remove("counter").unwrap_or_default(),
            units,
            month_names,
            month_abbr,
            year_pivot,
            score: get("score", ":")?,
            fraction: get("fraction", "/")?,
            ops,
            phone_zero: get("phone", "0")?,
            phone_separator: get("phone", "-")?,
            letters,
            symbols,
            acronym_spell: lists.remove("acronym_spell").unwrap_or_default(),
            acronym_word: lists.remove("acronym_word").unwrap_or_default(),
        })
    }

    pub fn is_counter(&self, hangul: &str) -> bool {
        self.counters.contains(hangul)
    }

    fn unit(&self, name: &str) -> &str {
        &self.units[name]
    }
}

/// The normalizer: classifier plus expansion over a set of reading tables.
#[derive(Debug, Clone)]
pub struct Normalizer {
    readings: Readings,
}

impl Default for Normalizer {
    fn default() -> Self {
        Normalizer { readings: Readings::bundled() }
    }
}

impl Normalizer {
    pub fn new(readings: Readings) -> Self {
        Normalizer { readings }
    }

    pub fn readings(&self) -> &Readings {
        &self.readings
    }

    pub fn classify(&self, token: &str) -> Result<NonKoreanToken, NormalizationError> {
        let kind = self
            .kind_of(token)
            .ok_or_else(|| NormalizationError::Unclassifiable(token.to_string()))?;
        Ok(NonKoreanToken { surface: token.to_string(), kind })
    }

    fn kind_of(&self, token: &str) -> Option<TokenKind> {
        if self.parse_date(token).is_some() {
            return Some(TokenKind::Date);
        }
        if let Some(c) = COLON_PAIR.captures(token) {
            let hour: u64 = c[1].parse().ok()?;
            let minute: u64 = c[2].parse().ok()?;
            return Some(if hour <= 24 && c[2].len() == 2 && minute < 60 {
                TokenKind::Time
            } else {
                TokenKind::Score
            });
        }
        if PHONE.is_match(token) && token.chars().filter(char::is_ascii_digit).count() >= 7 {
            return Some(TokenKind::Phone);
        }
        if NUMBER.is_match(token) {
            return Some(TokenKind::Number);
        }
        if MATH.is_match(token) {
            return Some(TokenKind::MathExpr);
        }
        if !token.is_empty() && token.chars().all(|c| c.is_ascii_uppercase()) {
            return Some(if self.is_word_acronym(token) {
                TokenKind::WordAcronym
            } else {
                TokenKind::SpelledAcronym
            });
        }
        if !token.is_empty() && token.chars().all(|c| c.is_ascii_alphabetic()) {
            return Some(TokenKind::Abbreviation);
        }
        None
    }

    /// Acronyms read as words: overrides first, then a pronounceability test
    /// (at least four letters, two vowels, no run of three consonants, and not
    /// ending in two consonants).
    fn is_word_acronym(&self, token: &str) -> bool {
        if self.readings.acronym_spell.contains(token) {
            return false;
        }
        if self.readings.acronym_word.contains(token) {
            return true;
        }
        let is_vowel = |c: char| matches!(c, 'A' | 'E' | 'I' | 'O' | 'U');
        let letters: Vec<char> = token.chars().collect();
        if letters.len() < 4 || letters.iter().filter(|c| is_vowel(**c)).count() < 2 {
            return false;
        }
        let mut run = 0;
        for &c in &letters {
            run = if is_vowel(c) { 0 } else { run + 1 };
            if run >= 3 {
                return false;
            }
        }
        !letters[letters.len() - 2..].iter().all(|c| !is_vowel(*c))
    }

    fn parse_date(&self, token: &str) -> Option<(u32, u32, u32)> {
        let (day, month, year) = if let Some(c) = SLASH_DATE.captures(token) {
            (c[1].parse().ok()?, c[2].parse().ok()?, c[3].to_string())
        } else {
            let c = NAMED_DATE.captures(token)?;
            (c[1].parse().ok()?, *self.readings.month_abbr.get(&c[2])?, c[3].to_string())
        };
        if !(1..=31).contains(&day) || !(1..=12).contains(&month) {
            return None;
        }
        let mut year_value: u32 = year.parse().ok()?;
        if year.len() == 2 {
            year_value += if year_value < self.readings.year_pivot { 2000 } else { 1900 };
        }
        Some((day, month, year_value))
    }

    pub fn expand_number(&self, digits: &str, style: NumberStyle) -> Result<String, NormalizationError> {
        if !NUMBER.is_match(digits) {
            return Err(NormalizationError::MalformedNumber(digits.to_string()));
        }
        match style {
            NumberStyle::SinoKorean => self.sino_number(digits),
            NumberStyle::NativeKorean => {
                let value: u64 = digits
                    .parse()
                    .map_err(|_| NormalizationError::NativeOutOfRange(digits.to_string()))?;
                if !(1..=99).contains(&value) || digits.starts_with('+') {
                    return Err(NormalizationError::NativeOutOfRange(digits.to_string()));
                }
                Ok(self.native_integer(value as u32))
            }
        }
    }

    fn sino_number(&self, text: &str) -> Result<String, NormalizationError> {
        let r = &self.readings;
        let mut out = String::new();
        let unsigned = match text.as_bytes()[0] {
            b'-' => {
                out.push_str(&r.minus);
                &text[1..]
            }
            b'+' => {
                out.push_str(&r.plus);
                &text[1..]
            }
            _ => text,
        };
        let (integer, fraction) = match unsigned.split_once('.') {
            Some((i, f)) => (i, Some(f)),
            None => (unsigned, None),
        };
        let integer: String = integer.chars().filter(|c| *c != ',').collect();
        out.push_str(&self.sino_integer_digits(&integer).ok_or_else(|| NormalizationError::MalformedNumber(text.to_string()))?);
        if let Some(fraction) = fraction {
            out.push_str(&r.point);
            for d in fraction.bytes() {
                out.push_str(&r.digits[(d - b'0') as usize]);
            }
        }
        Ok(out)
    }

    /// Positional reading of a plain digit string. `None` above 10^16 - 1.
    fn sino_integer_digits(&self, digits: &str) -> Option<String> {
        let r = &self.readings;
        let trimmed = digits.trim_start_matches('0');
        if trimmed.is_empty() {
            return Some(r.digits[0].clone());
        }
        if trimmed.len() > 4 * (r.myriads.len() + 1) {
            return None;
        }
        let values: Vec<usize> = trimmed.bytes().map(|b| (b - b'0') as usize).collect();
        let mut out = String::new();
        let group_count = values.len().div_ceil(4);
        let mut end = values.len();
        let mut groups = Vec::with_capacity(group_count);
        while end > 0 {
            let start = end.saturating_sub(4);
            groups.push(&values[start..end]);
            end = start;
        }
        for (level, group) in groups.iter().enumerate().rev() {
            if group.iter().all(|d| *d == 0) {
                continue;
            }
            let is_bare_one = group.iter().rev().skip(1).all(|d| *d == 0) && group[group.len() - 1] == 1;
            if !(level == 1 && is_bare_one) {
                for (i, &d) in group.iter().enumerate() {
                    let place = group.len() - 1 - i;
                    if d == 0 {
                        continue;
                    }
                    if d != 1 || place == 0 {
                        out.push_str(&r.digits[d]);
                    }
                    if place > 0 {
                        out.push_str(&r.places[place - 1]);
                    }
                }
            }
            if level > 0 {
                out.push_str(&r.myriads[level - 1]);
            }
        }
        Some(out)
    }

    fn native_integer(&self, value: u32) -> String {
        let r = &self.readings;
        let (tens, units) = ((value / 10) as usize, (value % 10) as usize);
        let mut out = String::new();
        if tens == 2 && units == 0 {
            out.push_str(&r.native_round_twenty);
        } else if tens > 0 {
            out.push_str(&r.native_tens[tens]);
        }
        if units > 0 {
            out.push_str(&r.native_units[units]);
        }
        out
    }

    fn sino_value(&self, value: u64) -> String {
        self.sino_integer_digits(&value.to_string()).expect("value fits the reading table")
    }

    /// Expand a classified token. `counter_follows` selects native readings
    /// for integers 1..99.
    pub fn expand_token(
        &self,
        token: &NonKoreanToken,
        counter_follows: bool,
    ) -> Result<Expansion, NormalizationError> {
        let r = &self.readings;
        let s = token.surface.as_str();
        let text = match token.kind {
            TokenKind::Number => {
                let native = counter_follows
                    && s.bytes().all(|b| b.is_ascii_digit())
                    && s.parse::<u32>().is_ok_and(|v| (1..=99).contains(&v));
                let style = if native { NumberStyle::NativeKorean } else { NumberStyle::SinoKorean };
                self.expand_number(s, style)?
            }
            TokenKind::Date => {
                let (day, month, year) = self
                    .parse_date(s)
                    .ok_or_else(|| NormalizationError::Unclassifiable(s.to_string()))?;
                let month_word = r
                    .month_names
                    .get(&month)
                    .cloned()
                    .unwrap_or_else(|| self.sino_value(month as u64) + r.unit("month"));
                format!(
                    "{}{}{}{}{}",
                    self.sino_value(year as u64),
                    r.unit("year"),
                    month_word,
                    self.sino_value(day as u64),
                    r.unit("day")
                )
            }
            TokenKind::Time => {
                let (h, m) = s.split_once(':').expect("time grammar");
                let hour: u32 = h.parse().map_err(|_| NormalizationError::MalformedNumber(s.to_string()))?;
                let minute: u64 = m.parse().map_err(|_| NormalizationError::MalformedNumber(s.to_string()))?;
                let mut out = if hour == 0 { r.digits[0].clone() } else { self.native_integer(hour) };
                out.push_str(r.unit("hour"));
                if minute > 0 {
                    out.push_str(&self.sino_value(minute));
                    out.push_str(r.unit("minute"));
                }
                out
            }
            TokenKind::Score => {
                let (a, b) = s.split_once(':').expect("score grammar");
                format!("{}{}{}", self.sino_number(a)?, r.score, self.sino_number(b)?)
            }
            TokenKind::Phone => s
                .chars()
                .map(|c| match c {
                    '0' => r.phone_zero.clone(),
                    '-' => r.phone_separator.clone(),
                    d => r.digits[d.to_digit(10).expect("phone grammar") as usize].clone(),
                })
                .collect(),
            TokenKind::MathExpr => self.expand_math(s)?,
            TokenKind::SpelledAcronym => s
                .chars()
                .map(|c| r.letters.get(&c).cloned().ok_or_else(|| NormalizationError::Unclassifiable(s.to_string())))
                .collect::<Result<String, _>>()?,
            TokenKind::Abbreviation | TokenKind::WordAcronym => {
                return Ok(Expansion::LexiconRequest(s.to_string()))
            }
        };
        Ok(Expansion::Hangul(text))
    }

    fn expand_math(&self, s: &str) -> Result<String, NormalizationError> {
        let r = &self.readings;
        let operands: Vec<&str> = OPERAND.find_iter(s).map(|m| m.as_str()).collect();
        let operators: Vec<char> = OPERAND.split(s).filter(|p| !p.is_empty()).filter_map(|p| p.chars().next()).collect();
        if operands.len() == 2 && operators == ['/'] && !s.contains('.') {
            return Ok(format!("{}{}{}", self.sino_number(operands[1])?, r.fraction, self.sino_number(operands[0])?));
        }
        let mut out = self.sino_number(operands[0])?;
        for (op, operand) in operators.iter().zip(&operands[1..]) {
            out.push_str(r.ops.get(op).ok_or_else(|| NormalizationError::Unclassifiable(s.to_string()))?);
            out.push_str(&self.sino_number(operand)?);
        }
        Ok(out)
    }

    /// Character-by-character fallback for tokens nothing else accepts.
    /// Characters with no reading are dropped.
    pub fn spell_out(&self, token: &str) -> String {
        let r = &self.readings;
        token
            .chars()
            .filter_map(|c| {
                if let Some(d) = c.to_digit(10) {
                    Some(r.digits[d as usize].clone())
                } else if c.is_ascii_alphabetic() {
                    r.letters.get(&c.to_ascii_uppercase()).cloned()
                } else {
                    r.symbols.get(&c).cloned()
                }
            })
            .collect()
    }
}
