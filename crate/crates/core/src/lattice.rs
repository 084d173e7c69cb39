//! Phoneme lattice: one column of pronunciation candidates per morpheme,
//! pruned with the phoneme connectivity table.
//!
//! Each phrase is handled on its own. Junction `k` of a phrase with `n`
//! columns sits before column `k`; junction 0 and junction `n` face the
//! phrase edge, whose label is `#`.

use std::collections::{BTreeSet, HashSet};
use std::fmt::{self, Write as _};
use std::ops::Range;

use thiserror::Error;

use crate::format::{data_lines, ResourceError};
use crate::hangul::{self, Syllable};
use crate::lexicon::Label;
use crate::phrasebreak::PhraseSegmentation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("label {0:?} is not in the connectivity inventory")]
    UnknownLabel(String),
    #[error("no valid path through morpheme {position}")]
    NoValidPath { position: usize },
    #[error("morpheme {position} has no candidates")]
    EmptyColumn { position: usize },
    #[error("segmentation does not cover {columns} morphemes")]
    SegmentationMismatch { columns: usize },
}

/// Ordered (right label of earlier morpheme, left label of later morpheme)
/// pairs that may meet.
#[derive(Debug, Clone, Default)]
pub struct ConnectivityTable {
    pairs: HashSet<(Label, Label)>,
    labels: BTreeSet<Label>,
}

const BUNDLED_CONNECTIVITY: &str = include_str!("../../../data/connectivity.tsv");

impl ConnectivityTable {
    pub fn bundled() -> Self {
        Self::parse("connectivity.tsv", BUNDLED_CONNECTIVITY).expect("bundled connectivity.tsv is valid")
    }

    pub fn parse(file: &str, text: &str) -> Result<Self, ResourceError> {
        let mut table = ConnectivityTable::default();
        for (line, content) in data_lines(file, text)? {
            let fields: Vec<&str> = content.split('\t').collect();
            let [right, left] = fields.as_slice() else {
                return Err(ResourceError::parse(file, line, "expected right<TAB>left"));
            };
            if right.is_empty() || left.is_empty() || *right == Label::NEUTRAL || *left == Label::NEUTRAL {
                return Err(ResourceError::parse(file, line, "labels must be non-empty and not neutral"));
            }
            table.insert(Label::from(*right), Label::from(*left));
        }
        Ok(table)
    }

    pub fn from_pairs<I: IntoIterator<Item = (Label, Label)>>(pairs: I) -> Self {
        let mut table = ConnectivityTable::default();
        for (r, l) in pairs {
            table.insert(r, l);
        }
        table
    }

    pub fn insert(&mut self, right: Label, left: Label) {
        self.labels.insert(right.clone());
        self.labels.insert(left.clone());
        self.pairs.insert((right, left));
    }

    /// Declare a label without giving it any pair.
    pub fn declare(&mut self, label: Label) {
        self.labels.insert(label);
    }

    pub fn knows(&self, label: &Label) -> bool {
        label.is_neutral() || label.is_edge() || self.labels.contains(label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.labels.iter()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn connects(&self, right: &Label, left: &Label) -> Result<bool, LatticeError> {
        for label in [right, left] {
            if !self.knows(label) {
                return Err(LatticeError::UnknownLabel(label.to_string()));
            }
        }
        Ok(self.connects_unchecked(right, left))
    }

    fn connects_unchecked(&self, right: &Label, left: &Label) -> bool {
        right.is_neutral() || left.is_neutral() || self.pairs.contains(&(right.clone(), left.clone()))
    }
}

/// Where a candidate came from; used for tracing and inspection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Exact { line: usize },
    Pattern { line: usize },
    Foreign { line: usize },
    Identity,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Exact { line } => write!(f, "dict:{line}"),
            Source::Pattern { line } => write!(f, "pattern:{line}"),
            Source::Foreign { line } => write!(f, "foreign:{line}"),
            Source::Identity => f.write_str("identity"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub phonemes: Vec<Syllable>,
    pub left: Label,
    pub right: Label,
    pub source: Source,
}

impl Candidate {
    pub fn new(phonemes: Vec<Syllable>, left: impl Into<Label>, right: impl Into<Label>, source: Source) -> Self {
        Candidate { phonemes, left: left.into(), right: right.into(), source }
    }
}

pub fn check_connectivity(prev: &Candidate, next: &Candidate, table: &ConnectivityTable) -> Result<bool, LatticeError> {
    table.connects(&prev.right, &next.left)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Fail with `NoValidPath` when connectivity leaves no path.
    Strict,
    /// Accept any pair at the first junction that leaves no path, and go on.
    Relaxed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Junction {
    pub phrase: usize,
    /// 0 is the phrase start, the column count is the phrase end.
    pub index: usize,
}

#[derive(Debug, Clone)]
pub struct PhonemeLattice<'t> {
    pub columns: Vec<Vec<Candidate>>,
    pub phrases: Vec<Range<usize>>,
    pub alive: Vec<Vec<bool>>,
    pub relaxed: BTreeSet<Junction>,
    table: &'t ConnectivityTable,
}

impl<'t> PhonemeLattice<'t> {
    pub fn build(
        columns: Vec<Vec<Candidate>>,
        segmentation: &PhraseSegmentation,
        table: &'t ConnectivityTable,
        mode: Mode,
    ) -> Result<Self, LatticeError> {
        let phrases = segmentation.phrases();
        let covered = phrases.last().map_or(0, |r| r.end);
        if covered != columns.len() {
            return Err(LatticeError::SegmentationMismatch { columns: columns.len() });
        }
        for (position, column) in columns.iter().enumerate() {
            if column.is_empty() {
                return Err(LatticeError::EmptyColumn { position });
            }
            for c in column {
                table.connects(&c.left, &c.right)?;
            }
        }
        let mut lattice = PhonemeLattice {
            alive: columns.iter().map(|c| vec![false; c.len()]).collect(),
            columns,
            phrases: phrases.clone(),
            relaxed: BTreeSet::new(),
            table,
        };
        for (p, range) in phrases.iter().enumerate() {
            lattice.prune_phrase(p, range.clone(), mode)?;
        }
        Ok(lattice)
    }

    fn open(&self, phrase: usize, index: usize) -> bool {
        self.relaxed.contains(&Junction { phrase, index })
    }

    fn joins(&self, phrase: usize, index: usize, right: &Label, left: &Label) -> bool {
        self.open(phrase, index) || self.table.connects_unchecked(right, left)
    }

    fn relax(&mut self, phrase: usize, index: usize, position: usize, mode: Mode) -> Result<(), LatticeError> {
        match mode {
            Mode::Strict => Err(LatticeError::NoValidPath { position }),
            Mode::Relaxed => {
                log::warn!("no valid path at morpheme {position}; relaxing connectivity");
                self.relaxed.insert(Junction { phrase, index });
                Ok(())
            }
        }
    }

    fn prune_phrase(&mut self, p: usize, range: Range<usize>, mode: Mode) -> Result<(), LatticeError> {
        let n = range.len();
        let edge = Label::edge();
        let mut forward: Vec<Vec<bool>> = Vec::with_capacity(n);
        for k in 0..n {
            let col = range.start + k;
            let compute = |this: &Self, forward: &[Vec<bool>]| -> Vec<bool> {
                this.columns[col]
                    .iter()
                    .map(|c| match k {
                        0 => this.joins(p, 0, &edge, &c.left),
                        _ => this.columns[col - 1]
                            .iter()
                            .zip(&forward[k - 1])
                            .any(|(prev, &ok)| ok && this.joins(p, k, &prev.right, &c.left)),
                    })
                    .collect()
            };
            let mut reach = compute(self, &forward);
            if !reach.contains(&true) {
                self.relax(p, k, col, mode)?;
                reach = compute(self, &forward);
            }
            forward.push(reach);
        }
        let last = range.end - 1;
        let ends = |this: &Self, forward: &[Vec<bool>]| {
            this.columns[last]
                .iter()
                .zip(&forward[n - 1])
                .any(|(c, &ok)| ok && this.joins(p, n, &c.right, &edge))
        };
        if !ends(self, &forward) {
            self.relax(p, n, last, mode)?;
        }
        let mut backward: Vec<bool> = self.columns[last].iter().map(|c| self.joins(p, n, &c.right, &edge)).collect();
        for k in (0..n).rev() {
            let col = range.start + k;
            if k + 1 < n {
                backward = self.columns[col]
                    .iter()
                    .map(|c| {
                        self.columns[col + 1]
                            .iter()
                            .zip(&backward)
                            .any(|(next, &ok)| ok && self.joins(p, k + 1, &c.right, &next.left))
                    })
                    .collect();
            }
            self.alive[col] = forward[k].iter().zip(&backward).map(|(f, b)| *f && *b).collect();
        }
        Ok(())
    }

    pub fn phrase_of(&self, column: usize) -> usize {
        self.phrases.iter().position(|r| r.contains(&column)).expect("column in range")
    }

    /// Surviving candidate indices per column.
    pub fn survivors(&self, column: usize) -> Vec<usize> {
        (0..self.columns[column].len()).filter(|&i| self.alive[column][i]).collect()
    }

    /// Edges between surviving candidates inside phrases.
    pub fn edge_count(&self) -> usize {
        let mut count = 0;
        for (p, range) in self.phrases.iter().enumerate() {
            for col in range.start + 1..range.end {
                let k = col - range.start;
                for a in self.survivors(col - 1) {
                    for b in self.survivors(col) {
                        let (prev, next) = (&self.columns[col - 1][a], &self.columns[col][b]);
                        count += usize::from(self.joins(p, k, &prev.right, &next.left));
                    }
                }
            }
        }
        count
    }

    /// Selected candidate index per column: the first valid path when
    /// columns are compared left to right in candidate order.
    pub fn select_path(&self) -> Result<Vec<usize>, LatticeError> {
        let mut path = Vec::with_capacity(self.columns.len());
        for (p, range) in self.phrases.iter().enumerate() {
            let mut prev: Option<&Candidate> = None;
            for col in range.clone() {
                let k = col - range.start;
                let choice = self.survivors(col).into_iter().find(|&i| {
                    prev.is_none_or(|prev| self.joins(p, k, &prev.right, &self.columns[col][i].left))
                });
                let i = choice.ok_or(LatticeError::NoValidPath { position: col })?;
                prev = Some(&self.columns[col][i]);
                path.push(i);
            }
        }
        Ok(path)
    }

    /// Human-readable dump of the pruned lattice.
    pub fn dump(&self, surfaces: &[String]) -> String {
        let mut out = String::new();
        for (p, range) in self.phrases.iter().enumerate() {
            let _ = writeln!(out, "phrase {p}");
            for col in range.clone() {
                let name = surfaces.get(col).map_or("", String::as_str);
                let _ = writeln!(out, "  [{col}] {name}");
                for (i, c) in self.columns[col].iter().enumerate() {
                    let mark = if self.alive[col][i] { '+' } else { '-' };
                    let _ = writeln!(
                        out,
                        "    {mark} {i}: {}  {} | {}  ({})",
                        hangul::romanize(&c.phonemes),
                        c.left,
                        c.right,
                        c.source
                    );
                }
            }
            for j in self.relaxed.iter().filter(|j| j.phrase == p) {
                let _ = writeln!(out, "  relaxed junction {}", j.index);
            }
        }
        out
    }
}
