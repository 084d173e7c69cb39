//! Independent oracles and random generators shared by the integration
//! tests and the acceptance suite.
#![allow(dead_code)]

use std::collections::BTreeSet;

use g2p_core::ccv::{CcvContext, CcvOutput, CcvRule, RuleSet};
use g2p_core::hangul::{Coda, Consonant, Jamo, Syllable, Vowel};
use g2p_core::lattice::{Candidate, ConnectivityTable, Source};
use g2p_core::lexicon::{Bindings, Label, MetaChar, PatternItem};
use g2p_core::phrasebreak::{BreakConfig, PhraseSegmentation, TaggedMorpheme};
use rand::seq::SliceRandom;
use rand::Rng;

// ---------------------------------------------------------------- codec

/// Precomposed syllable from indices by code-point arithmetic.
pub fn syllable_char(initial: u32, vowel: u32, fin: u32) -> char {
    char::from_u32(0xAC00 + (initial * 21 + vowel) * 28 + fin).unwrap()
}

/// Final index → consonant indices, written out by hand.
pub const FINAL_CLUSTERS: [&[usize]; 28] = [
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

// ---------------------------------------------------------------- numbers

const DIGITS: [&str; 10] = ["영", "일", "이", "삼", "사", "오", "육", "칠", "팔", "구"];

fn below_myriad(mut n: u64, out: &mut String) {
    for (value, name) in [(1000, "천"), (100, "백"), (10, "십")] {
        let d = n / value;
        if d > 0 {
            if d > 1 {
                out.push_str(DIGITS[d as usize]);
            }
            out.push_str(name);
        }
        n %= value;
    }
    if n > 0 {
        out.push_str(DIGITS[n as usize]);
    }
}

/// Sino-Korean reading by arithmetic on the value.
pub fn sino_integer(mut n: u64) -> String {
    if n == 0 {
        return DIGITS[0].to_string();
    }
    let mut out = String::new();
    for (unit, name) in [(1_000_000_000_000u64, "조"), (100_000_000, "억"), (10_000, "만")] {
        let q = n / unit;
        if q > 0 {
            if !(q == 1 && unit == 10_000) {
                below_myriad(q, &mut out);
            }
            out.push_str(name);
        }
        n %= unit;
    }
    below_myriad(n, &mut out);
    out
}

/// Reading of `[sign]int[.frac]` with fraction digits read one by one.
pub fn sino_decimal(sign: Option<char>, integer: u64, fraction: &str) -> String {
    let mut out = String::new();
    match sign {
        Some('-') => out.push_str("마이너스"),
        Some('+') => out.push_str("플러스"),
        _ => {}
    }
    out.push_str(&sino_integer(integer));
    if !fraction.is_empty() {
        out.push('점');
        for c in fraction.chars() {
            out.push_str(DIGITS[c.to_digit(10).unwrap() as usize]);
        }
    }
    out
}

/// Attributive native reading of 1..=99.
pub fn native_attributive(n: u64) -> String {
    const TENS: [&str; 10] = ["", "열", "스물", "서른", "마흔", "쉰", "예순", "일흔", "여든", "아흔"];
    const UNITS: [&str; 10] = ["", "한", "두", "세", "네", "다섯", "여섯", "일곱", "여덟", "아홉"];
    if n == 20 {
        return "스무".to_string();
    }
    format!("{}{}", TENS[(n / 10) as usize], UNITS[(n % 10) as usize])
}

/// Digits with a comma every three places.
pub fn with_commas(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

// ---------------------------------------------------------------- patterns

/// Brute-force anchored match: try every length for every `*` in order
/// (shortest first, leftmost star varying slowest) and return the bindings
/// of the first assignment that works.
pub fn match_oracle(items: &[PatternItem], jamo: &[Jamo]) -> Option<Bindings> {
    let stars = items.iter().filter(|i| **i == PatternItem::Meta(MetaChar::Star)).count();
    let fixed = items.len() - stars;
    if jamo.len() < fixed {
        return None;
    }
    let spare = jamo.len() - fixed;
    let mut lengths = vec![0; stars];
    loop {
        if lengths.iter().sum::<usize>() == spare {
            if let Some(b) = try_lengths(items, jamo, &lengths) {
                return Some(b);
            }
        }
        // Odometer over star lengths, last star fastest.
        let mut k = stars;
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            if lengths[k] < spare {
                lengths[k] += 1;
                for l in lengths.iter_mut().skip(k + 1) {
                    *l = 0;
                }
                break;
            }
        }
    }
}

fn try_lengths(items: &[PatternItem], jamo: &[Jamo], lengths: &[usize]) -> Option<Bindings> {
    let mut pos = 0;
    let mut star = 0;
    let mut out = Bindings::new();
    for item in items {
        match item {
            PatternItem::Lit(j) => {
                if jamo.get(pos) != Some(j) {
                    return None;
                }
                pos += 1;
            }
            PatternItem::Meta(MetaChar::Star) => {
                out.insert(MetaChar::Star, jamo[pos..pos + lengths[star]].to_vec());
                pos += lengths[star];
                star += 1;
            }
            PatternItem::Meta(m) => {
                let j = *jamo.get(pos)?;
                let ok = match m {
                    MetaChar::Z => !matches!(j, Jamo::Vowel(_)),
                    MetaChar::Y => !matches!(j, Jamo::Vowel(_)) && j != Jamo::Initial(Consonant::IEUNG),
                    MetaChar::V => matches!(j, Jamo::Vowel(_)),
                    MetaChar::Star => unreachable!(),
                };
                if !ok {
                    return None;
                }
                out.insert(*m, vec![j]);
                pos += 1;
            }
        }
    }
    (pos == jamo.len()).then_some(out)
}

pub fn random_jamo<R: Rng>(rng: &mut R) -> Jamo {
    let pool_consonants = [Consonant::G, Consonant::D, Consonant::IEUNG, Consonant::S];
    let c = *pool_consonants.choose(rng).unwrap();
    match rng.gen_range(0..3) {
        0 => Jamo::Initial(c),
        1 => Jamo::Final(c),
        _ => Jamo::Vowel(Vowel::from_index(rng.gen_range(0..2) * 4).unwrap()),
    }
}

/// Random pattern with each meta-character at most once.
pub fn random_pattern<R: Rng>(rng: &mut R) -> Vec<PatternItem> {
    let mut metas = vec![MetaChar::Z, MetaChar::Y, MetaChar::V, MetaChar::Star];
    metas.shuffle(rng);
    let mut metas: Vec<MetaChar> = metas.into_iter().take(rng.gen_range(0..=4)).collect();
    let mut items: Vec<PatternItem> = (0..rng.gen_range(0..4)).map(|_| PatternItem::Lit(random_jamo(rng))).collect();
    for m in metas.drain(..) {
        let at = rng.gen_range(0..=items.len());
        items.insert(at, PatternItem::Meta(m));
    }
    items
}

/// A jamo sequence that often matches `pattern`.
pub fn instance_of<R: Rng>(pattern: &[PatternItem], rng: &mut R) -> Vec<Jamo> {
    let mut out = Vec::new();
    for item in pattern {
        match item {
            PatternItem::Lit(j) => out.push(*j),
            PatternItem::Meta(MetaChar::Star) => {
                for _ in 0..rng.gen_range(0..4) {
                    out.push(random_jamo(rng));
                }
            }
            PatternItem::Meta(_) => out.push(random_jamo(rng)),
        }
    }
    if rng.gen_bool(0.2) && !out.is_empty() {
        let i = rng.gen_range(0..out.len());
        out[i] = random_jamo(rng);
    }
    out
}

// ---------------------------------------------------------------- ccv

/// Syllable from a small pool so contexts repeat.
pub fn pool_syllable<R: Rng>(rng: &mut R) -> Syllable {
    let initials = [Consonant::G, Consonant::N, Consonant::from_index(5).unwrap(), Consonant::IEUNG, Consonant::S];
    let codas = [Coda::EMPTY, Coda::single(Consonant::G), Coda::single(Consonant::N), Coda::single(Consonant::B)];
    Syllable::new(
        *initials.choose(rng).unwrap(),
        Vowel::from_index(rng.gen_range(0..3) * 4).unwrap(),
        *codas.choose(rng).unwrap(),
    )
}

/// Any composable syllable.
pub fn any_syllable<R: Rng>(rng: &mut R) -> Syllable {
    Syllable::from_char(syllable_char(rng.gen_range(0..19), rng.gen_range(0..21), rng.gen_range(0..28))).unwrap()
}

pub fn random_output<R: Rng>(rng: &mut R) -> CcvOutput {
    let coda = match rng.gen_range(0..3) {
        0 => Coda::EMPTY,
        1 => Coda::single(Consonant::from_index(rng.gen_range(0..19)).unwrap()),
        _ => Coda::from_final_index(rng.gen_range(1..28)).unwrap(),
    };
    CcvOutput { coda, initial: Consonant::from_index(rng.gen_range(0..19)).unwrap() }
}

/// Random rules over the contexts of the small syllable pool.
pub fn random_rules<R: Rng>(rng: &mut R) -> RuleSet {
    let mut rules = RuleSet::new();
    for _ in 0..rng.gen_range(0..40) {
        let (a, b) = (pool_syllable(rng), pool_syllable(rng));
        rules.insert(CcvRule { context: CcvContext::at(&a, &b), output: random_output(rng) });
    }
    rules
}

pub fn vowels(s: &[Syllable]) -> Vec<Vowel> {
    s.iter().map(|x| x.vowel).collect()
}

// ---------------------------------------------------------------- lattice

pub const LABELS: [&str; 5] = ["a", "b", "c", "d", Label::NEUTRAL];

pub fn random_table<R: Rng>(rng: &mut R) -> ConnectivityTable {
    let names = ["a", "b", "c", "d", Label::EDGE];
    let mut table = ConnectivityTable::default();
    for n in &names[..4] {
        table.declare(Label::from(*n));
    }
    for r in names {
        for l in names {
            if (r != Label::EDGE || l != Label::EDGE) && rng.gen_bool(0.6) {
                table.insert(Label::from(r), Label::from(l));
            }
        }
    }
    table
}

pub fn random_columns<R: Rng>(rng: &mut R, morphemes: usize, max_candidates: usize) -> Vec<Vec<Candidate>> {
    (0..morphemes)
        .map(|_| {
            (0..rng.gen_range(1..=max_candidates))
                .map(|i| {
                    Candidate::new(
                        Vec::new(),
                        *LABELS.choose(rng).unwrap(),
                        *LABELS.choose(rng).unwrap(),
                        Source::Exact { line: i },
                    )
                })
                .collect()
        })
        .collect()
}

pub fn random_segmentation<R: Rng>(rng: &mut R, len: usize) -> PhraseSegmentation {
    let mut breaks: BTreeSet<usize> = (0..len.saturating_sub(1)).filter(|_| rng.gen_bool(0.25)).collect();
    if len > 0 {
        breaks.insert(len - 1);
    }
    PhraseSegmentation { break_after: breaks }
}

fn joins(table: &ConnectivityTable, right: &Label, left: &Label) -> bool {
    right.is_neutral() || left.is_neutral() || table.connects(right, left).unwrap()
}

/// All valid index vectors of one phrase, in lexicographic order.
pub fn phrase_paths(columns: &[Vec<Candidate>], table: &ConnectivityTable) -> Vec<Vec<usize>> {
    let edge = Label::edge();
    let mut out = Vec::new();
    let mut idx = vec![0; columns.len()];
    if columns.is_empty() {
        return out;
    }
    loop {
        let mut ok = joins(table, &edge, &columns[0][idx[0]].left)
            && joins(table, &columns[columns.len() - 1][idx[columns.len() - 1]].right, &edge);
        for k in 1..columns.len() {
            ok = ok && joins(table, &columns[k - 1][idx[k - 1]].right, &columns[k][idx[k]].left);
        }
        if ok {
            out.push(idx.clone());
        }
        let mut k = columns.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < columns[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// First valid path of every phrase, concatenated; `None` if some phrase
/// has no valid path.
pub fn lattice_oracle(
    columns: &[Vec<Candidate>],
    segmentation: &PhraseSegmentation,
    table: &ConnectivityTable,
) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    for range in segmentation.phrases() {
        out.extend(phrase_paths(&columns[range], table).into_iter().next()?);
    }
    Some(out)
}

// ---------------------------------------------------------------- phrase breaks

/// Breaks with min 1 and no max: every word-final trigger, plus the end.
pub fn break_oracle(sentence: &[TaggedMorpheme], config: &BreakConfig) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for (i, m) in sentence.iter().enumerate() {
        let last = i + 1 == sentence.len();
        let word_final = last || sentence[i + 1].word_index != m.word_index;
        if last || (word_final && config.is_trigger(&m.pos).unwrap()) {
            out.insert(i);
        }
    }
    out
}

pub fn random_sentence<R: Rng>(rng: &mut R, config: &BreakConfig) -> Vec<TaggedMorpheme> {
    let mut tags: Vec<_> = config.tags().cloned().collect();
    tags.sort();
    let mut out = Vec::new();
    for word in 0..rng.gen_range(0..12) {
        for _ in 0..rng.gen_range(1..=3) {
            out.push(TaggedMorpheme::new(Vec::new(), tags.choose(rng).unwrap().clone(), word));
        }
    }
    out
}

// ---------------------------------------------------------------- learner corpora

pub struct PlantedCorpus {
    pub rules: RuleSet,
    pub train: Vec<(String, String)>,
    pub held_out: Vec<(String, String)>,
}

fn planted_output<R: Rng>(rng: &mut R, context: &CcvContext) -> CcvOutput {
    loop {
        let out = random_output(rng);
        if out != context.identity() {
            return out;
        }
    }
}

/// Sentences whose phonemes follow `rules` exactly, except that a fraction
/// `noise` of internal boundaries get a random output.
fn planted_sentences<R: Rng>(
    rng: &mut R,
    pairs: &[(Syllable, Syllable)],
    rules: &RuleSet,
    repeats: usize,
    extra: usize,
    noise: f64,
) -> Vec<(String, String)> {
    let mut words: Vec<Vec<Syllable>> = Vec::new();
    for (a, b) in pairs {
        for _ in 0..repeats {
            let mut w = vec![*a, *b];
            if rng.gen_bool(0.5) {
                w.push(any_syllable(rng));
            }
            words.push(w);
        }
    }
    for _ in 0..extra {
        words.push((0..rng.gen_range(1..4)).map(|_| any_syllable(rng)).collect());
    }
    words.shuffle(rng);
    words
        .chunks(4)
        .map(|chunk| {
            let graphemes: Vec<String> = chunk.iter().map(|w| g2p_core::hangul::compose(w).unwrap()).collect();
            let phonemes: Vec<String> = chunk
                .iter()
                .map(|w| {
                    let mut out = g2p_core::ccv::apply_ccv(w, rules);
                    for i in 0..w.len().saturating_sub(1) {
                        if rng.gen_bool(noise) {
                            let o = random_output(rng);
                            out[i].coda = o.coda;
                            out[i + 1].initial = o.initial;
                        }
                    }
                    g2p_core::hangul::romanize(&out)
                })
                .collect();
            (graphemes.join(" "), phonemes.join(" "))
        })
        .collect()
}

/// `count` planted rules over random contexts, each seen `repeats` times
/// in training.
pub fn planted_corpus<R: Rng>(rng: &mut R, count: usize, repeats: usize, noise: f64) -> PlantedCorpus {
    let mut rules = RuleSet::new();
    let mut pairs = Vec::new();
    while pairs.len() < count {
        let (a, b) = (any_syllable(rng), any_syllable(rng));
        let context = CcvContext::at(&a, &b);
        if rules.get(&context).is_some() {
            continue;
        }
        rules.insert(CcvRule { context, output: planted_output(rng, &context) });
        pairs.push((a, b));
    }
    let train = planted_sentences(rng, &pairs, &rules, repeats, count * repeats, noise);
    let held_out = planted_sentences(rng, &pairs, &rules, 2, count * 2, 0.0);
    PlantedCorpus { rules, train, held_out }
}

/// 1 − Σ jamo edit distance / Σ reference jamo when each word of the
/// grapheme side is converted with `rules` alone.
pub fn rule_accuracy(rules: &RuleSet, sentences: &[(String, String)]) -> f64 {
    use g2p_core::hangul::{decompose, deromanize, flatten};
    let (mut errors, mut total) = (0, 0);
    for (g, p) in sentences {
        for (gw, pw) in g.split_whitespace().zip(p.split_whitespace()) {
            let predicted = g2p_core::ccv::apply_ccv(&decompose(gw).unwrap(), rules);
            let reference = flatten(&deromanize(pw).unwrap());
            errors += g2p_core::pipeline::jamo_distance(&flatten(&predicted), &reference);
            total += reference.len();
        }
    }
    1.0 - errors as f64 / total as f64
}
