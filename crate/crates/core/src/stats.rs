//! 2×2 contingency tables and Loevinger's H on each of their four error cells.
//!
//! For a pair of terms `(a, b)` the table is
//!
//! ```text
//!           b      ¬b
//!   a     n11     n10
//!  ¬a     n01     n00
//! ```
//!
//! and the index of error cell `(i, j)` is `1 − n·n_ij / (row_i · col_j)`:
//! one minus the ratio of observed to independence-expected counter-examples.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::context::{normalize_label, UsageMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub n11: u64,
    pub n10: u64,
    pub n01: u64,
    pub n00: u64,
}

impl ContingencyTable {
    pub const fn new(n11: u64, n10: u64, n01: u64, n00: u64) -> Self {
        ContingencyTable { n11, n10, n01, n00 }
    }

    pub fn n(&self) -> u64 {
        self.n11 + self.n10 + self.n01 + self.n00
    }

    /// Cells in `[n11, n10, n01, n00]` order.
    pub fn cells(&self) -> [u64; 4] {
        [self.n11, self.n10, self.n01, self.n00]
    }

    pub fn from_cells(c: [u64; 4]) -> Self {
        ContingencyTable::new(c[0], c[1], c[2], c[3])
    }

    /// The table of `(b, a)`.
    pub fn transposed(&self) -> Self {
        ContingencyTable::new(self.n11, self.n01, self.n10, self.n00)
    }

    pub fn scaled(&self, k: u64) -> Self {
        ContingencyTable::new(self.n11 * k, self.n10 * k, self.n01 * k, self.n00 * k)
    }

    /// Count in the error cell of `q`.
    pub fn error_count(&self, q: Quadrant) -> u64 {
        self.cells()[q.cell_index()]
    }

    /// Row and column margins that bound the error cell of `q`.
    pub fn margins(&self, q: Quadrant) -> (u64, u64) {
        let na = self.n11 + self.n10;
        let nb = self.n11 + self.n01;
        let n = self.n();
        let row = if q.row_present() { na } else { n - na };
        let col = if q.col_present() { nb } else { n - nb };
        (row, col)
    }

    /// Loevinger's index for one error cell, `None` when a margin is zero.
    pub fn h(&self, q: Quadrant) -> Option<f64> {
        let (row, col) = self.margins(q);
        if row == 0 || col == 0 {
            return None;
        }
        let observed = self.n() as f64 * self.error_count(q) as f64;
        Some(1.0 - observed / (row as f64 * col as f64))
    }
}

/// One of the four error cells of a pair's table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrant {
    /// Error cell `n11`: the two terms should not occur together.
    Exclusion,
    /// Error cell `n10`: `a → b`.
    Forward,
    /// Error cell `n01`: `b → a`.
    Backward,
    /// Error cell `n00`: `¬a → b`.
    Complement,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [
        Quadrant::Exclusion,
        Quadrant::Forward,
        Quadrant::Backward,
        Quadrant::Complement,
    ];

    /// Position of the error cell in `[n11, n10, n01, n00]`.
    pub fn cell_index(self) -> usize {
        match self {
            Quadrant::Exclusion => 0,
            Quadrant::Forward => 1,
            Quadrant::Backward => 2,
            Quadrant::Complement => 3,
        }
    }

    fn row_present(self) -> bool {
        matches!(self, Quadrant::Exclusion | Quadrant::Forward)
    }

    fn col_present(self) -> bool {
        matches!(self, Quadrant::Exclusion | Quadrant::Backward)
    }

    /// The same error cell seen from the transposed table.
    pub fn transposed(self) -> Quadrant {
        match self {
            Quadrant::Forward => Quadrant::Backward,
            Quadrant::Backward => Quadrant::Forward,
            q => q,
        }
    }

    pub fn orientation(self) -> Orientation {
        match self {
            Quadrant::Exclusion => Orientation::Exclusion,
            Quadrant::Forward | Quadrant::Backward => Orientation::Implication,
            Quadrant::Complement => Orientation::Complement,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Quadrant::Exclusion => "exclusion",
            Quadrant::Forward => "forward",
            Quadrant::Backward => "backward",
            Quadrant::Complement => "complement",
        }
    }
}

/// The four indices of one pair. `None` marks an undefined index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HQuadruple {
    pub exclusion: Option<f64>,
    pub forward: Option<f64>,
    pub backward: Option<f64>,
    pub complement: Option<f64>,
}

impl HQuadruple {
    pub fn get(&self, q: Quadrant) -> Option<f64> {
        match q {
            Quadrant::Exclusion => self.exclusion,
            Quadrant::Forward => self.forward,
            Quadrant::Backward => self.backward,
            Quadrant::Complement => self.complement,
        }
    }
}

pub fn loevinger_h(t: &ContingencyTable) -> HQuadruple {
    HQuadruple {
        exclusion: t.h(Quadrant::Exclusion),
        forward: t.h(Quadrant::Forward),
        backward: t.h(Quadrant::Backward),
        complement: t.h(Quadrant::Complement),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationThresholds {
    pub h_tend: f64,
    pub h_quasi: f64,
}

impl ClassificationThresholds {
    pub fn new(h_tend: f64, h_quasi: f64) -> Result<Self> {
        let th = ClassificationThresholds { h_tend, h_quasi };
        th.validate()?;
        Ok(th)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.h_tend && self.h_tend <= self.h_quasi && self.h_quasi <= 1.0) {
            return Err(Error::invalid(format!(
                "thresholds must satisfy 0 ≤ h_tend ≤ h_quasi ≤ 1, got h_tend={} h_quasi={}",
                self.h_tend, self.h_quasi
            )));
        }
        Ok(())
    }
}

impl Default for ClassificationThresholds {
    fn default() -> Self {
        ClassificationThresholds {
            h_tend: 0.40,
            h_quasi: 0.60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strength {
    Absence,
    Tendency,
    Quasi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Implication,
    Exclusion,
    Complement,
}

/// Strength of a relation together with what kind of relation it is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImplicationClass {
    pub strength: Strength,
    pub orientation: Orientation,
}

impl ImplicationClass {
    pub fn of(quadrant: Quadrant, h: Option<f64>, th: &ClassificationThresholds) -> Self {
        ImplicationClass {
            strength: classify(h, th),
            orientation: quadrant.orientation(),
        }
    }
}

impl fmt::Display for ImplicationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.orientation {
            Orientation::Implication => "q-implication",
            Orientation::Exclusion => "q-exclusion",
            Orientation::Complement => "q-complement",
        };
        match self.strength {
            Strength::Absence => write!(f, "absence of {rel}"),
            Strength::Tendency => write!(f, "tendency to {rel}"),
            Strength::Quasi => f.write_str(rel),
        }
    }
}

/// Three-way threshold rule. Undefined indices are `Absence`; `h == h_quasi`
/// is `Quasi`.
pub fn classify(h: Option<f64>, th: &ClassificationThresholds) -> Strength {
    match h {
        Some(h) if h >= th.h_quasi => Strength::Quasi,
        Some(h) if h >= th.h_tend => Strength::Tendency,
        _ => Strength::Absence,
    }
}

/// The table of `(a, b)` over every user in the population.
pub fn contingency(usage: &UsageMatrix, a: &str, b: &str) -> Result<ContingencyTable> {
    let ia = usage.term_index(a)?;
    let ib = usage.term_index(b)?;
    if ia == ib {
        return Err(Error::Precondition(format!(
            "contingency needs two distinct terms, got `{a}` twice"
        )));
    }
    Ok(contingency_by_index(usage, ia, ib))
}

fn contingency_by_index(usage: &UsageMatrix, ia: usize, ib: usize) -> ContingencyTable {
    let ua = usage.users_of(ia);
    let ub = usage.users_of(ib);
    let n11 = ua.intersection_count(ub) as u64;
    let n10 = ua.count() as u64 - n11;
    let n01 = ub.count() as u64 - n11;
    let n00 = usage.population() as u64 - n11 - n10 - n01;
    ContingencyTable::new(n11, n10, n01, n00)
}

/// A table for each stored pair of terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTables {
    terms: Vec<String>,
    pairs: Vec<(usize, usize, ContingencyTable)>,
    index: HashMap<(usize, usize), usize>,
}

impl PairTables {
    /// `pairs` index into `terms`; each unordered pair may appear once.
    pub fn new(terms: Vec<String>, pairs: Vec<(usize, usize, ContingencyTable)>) -> Result<Self> {
        let mut index = HashMap::new();
        for (k, &(a, b, _)) in pairs.iter().enumerate() {
            if a >= terms.len() || b >= terms.len() {
                return Err(Error::invalid(format!("pair {k} refers to a missing term")));
            }
            if a == b {
                return Err(Error::invalid(format!(
                    "pair {k} crosses `{}` with itself",
                    terms[a]
                )));
            }
            if index.insert((a.min(b), a.max(b)), k).is_some() {
                return Err(Error::invalid(format!(
                    "pair `{}`/`{}` listed twice",
                    terms[a], terms[b]
                )));
            }
        }
        Ok(PairTables {
            terms,
            pairs,
            index,
        })
    }

    /// Every unordered pair of the log's terms, in term order.
    pub fn from_usage(usage: &UsageMatrix) -> Self {
        let m = usage.terms().len();
        let mut pairs = Vec::with_capacity(m * m.saturating_sub(1) / 2);
        for a in 0..m {
            for b in a + 1..m {
                pairs.push((a, b, contingency_by_index(usage, a, b)));
            }
        }
        PairTables::new(usage.terms().to_vec(), pairs).expect("generated pairs are distinct")
    }

    /// Parses `a,b,n11,n10,n01,n00` rows. Terms are ordered by first appearance.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut records = rdr.records();
        let header = match records.next() {
            Some(h) => h?,
            None => return Err(Error::parse(0, "missing header row")),
        };
        let cols: Vec<String> = header.iter().map(normalize_label).collect();
        if cols != ["a", "b", "n11", "n10", "n01", "n00"] {
            return Err(Error::parse(
                0,
                format!(
                    "expected header `a,b,n11,n10,n01,n00`, found `{}`",
                    cols.join(",")
                ),
            ));
        }
        let mut terms: Vec<String> = Vec::new();
        let mut pairs = Vec::new();
        let intern =
            |label: String, terms: &mut Vec<String>| match terms.iter().position(|t| *t == label) {
                Some(i) => i,
                None => {
                    terms.push(label);
                    terms.len() - 1
                }
            };
        for (idx, record) in records.enumerate() {
            let row = idx + 1;
            let record = record?;
            if record.len() == 1 && record.get(0).is_some_and(|s| s.trim().is_empty()) {
                continue;
            }
            if record.len() != 6 {
                return Err(Error::parse(
                    row,
                    format!("expected 6 fields, found {}", record.len()),
                ));
            }
            let a = normalize_label(&record[0]);
            let b = normalize_label(&record[1]);
            if a.is_empty() || b.is_empty() {
                return Err(Error::parse(row, "empty term label"));
            }
            let mut cells = [0u64; 4];
            for (k, cell) in cells.iter_mut().enumerate() {
                let raw = record[k + 2].trim();
                *cell = raw
                    .parse()
                    .map_err(|_| Error::parse(row, format!("`{raw}` is not a count")))?;
            }
            let ia = intern(a, &mut terms);
            let ib = intern(b, &mut terms);
            pairs.push((ia, ib, ContingencyTable::from_cells(cells)));
        }
        PairTables::new(terms, pairs)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(["a", "b", "n11", "n10", "n01", "n00"])?;
        for (a, b, t) in self.iter() {
            let c = t.cells().map(|v| v.to_string());
            w.write_record([a, b, &c[0], &c[1], &c[2], &c[3]])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("utf-8 labels"))
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Stored pairs as `(a, b, table)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, &ContingencyTable)> {
        self.pairs
            .iter()
            .map(|(a, b, t)| (self.terms[*a].as_str(), self.terms[*b].as_str(), t))
    }

    /// Storage index of the pair and whether `(a, b)` is reversed relative to it.
    pub fn locate(&self, a: &str, b: &str) -> Option<(usize, bool)> {
        let ia = self.terms.iter().position(|t| t == a)?;
        let ib = self.terms.iter().position(|t| t == b)?;
        let k = *self.index.get(&(ia.min(ib), ia.max(ib)))?;
        Some((k, self.pairs[k].0 != ia))
    }

    /// The table oriented as `(a, b)`.
    pub fn table(&self, a: &str, b: &str) -> Option<ContingencyTable> {
        let (k, swapped) = self.locate(a, b)?;
        let t = self.pairs[k].2;
        Some(if swapped { t.transposed() } else { t })
    }
}

/// One row of the H matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PairEntry {
    pub a: String,
    pub b: String,
    pub table: ContingencyTable,
    pub h: HQuadruple,
}

/// Loevinger indices for every stored pair.
#[derive(Debug, Clone, PartialEq)]
pub struct HMatrix {
    tables: PairTables,
    entries: Vec<PairEntry>,
}

impl HMatrix {
    pub fn from_tables(tables: PairTables) -> Result<Self> {
        if tables.terms().len() < 2 {
            return Err(Error::Precondition(format!(
                "need ≥ 2 terms, found {}",
                tables.terms().len()
            )));
        }
        let entries = tables
            .iter()
            .map(|(a, b, t)| PairEntry {
                a: a.to_string(),
                b: b.to_string(),
                table: *t,
                h: loevinger_h(t),
            })
            .collect();
        Ok(HMatrix { tables, entries })
    }

    pub fn tables(&self) -> &PairTables {
        &self.tables
    }

    pub fn terms(&self) -> &[String] {
        self.tables.terms()
    }

    pub fn entries(&self) -> &[PairEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Indices of the pair oriented as `(a, b)`: forward means `a → b`.
    pub fn get(&self, a: &str, b: &str) -> Option<HQuadruple> {
        let (k, swapped) = self.tables.locate(a, b)?;
        let h = self.entries[k].h;
        Some(if swapped {
            HQuadruple {
                forward: h.backward,
                backward: h.forward,
                ..h
            }
        } else {
            h
        })
    }

    pub fn to_document(&self, th: &ClassificationThresholds) -> HMatrixDocument {
        HMatrixDocument {
            pairs: self
                .entries
                .iter()
                .map(|e| PairRecord {
                    a: e.a.clone(),
                    b: e.b.clone(),
                    table: e.table.cells(),
                    h: QuadrantValues {
                        exclusion: e.h.exclusion,
                        forward: e.h.forward,
                        backward: e.h.backward,
                        complement: e.h.complement,
                    },
                    class: QuadrantClasses {
                        exclusion: ImplicationClass::of(Quadrant::Exclusion, e.h.exclusion, th),
                        forward: ImplicationClass::of(Quadrant::Forward, e.h.forward, th),
                        backward: ImplicationClass::of(Quadrant::Backward, e.h.backward, th),
                        complement: ImplicationClass::of(Quadrant::Complement, e.h.complement, th),
                    },
                })
                .collect(),
        }
    }

    pub fn to_json(&self, th: &ClassificationThresholds) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document(th))?)
    }

    /// Triangular layout with two rows and two columns per pair:
    /// `exclusion, forward` over `backward, complement`, values to 2 decimals.
    pub fn to_layout_csv(&self) -> String {
        self.layout_csv(|e| {
            let f = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| format!("{x:.2}"));
            [
                [f(e.h.exclusion), f(e.h.forward)],
                [f(e.h.backward), f(e.h.complement)],
            ]
        })
    }

    /// Same layout as [`to_layout_csv`](Self::to_layout_csv) holding the raw counts.
    pub fn counts_layout_csv(&self) -> String {
        self.layout_csv(|e| {
            let t = e.table;
            [
                [t.n11.to_string(), t.n10.to_string()],
                [t.n01.to_string(), t.n00.to_string()],
            ]
        })
    }

    fn layout_csv(&self, block: impl Fn(&PairEntry) -> [[String; 2]; 2]) -> String {
        let terms = self.terms();
        let m = terms.len();
        let mut blocks: HashMap<(usize, usize), [[String; 2]; 2]> = HashMap::new();
        for e in &self.entries {
            let ia = terms.iter().position(|t| *t == e.a).unwrap();
            let ib = terms.iter().position(|t| *t == e.b).unwrap();
            let mut cells = block(e);
            if ia > ib {
                // store in the upper triangle, seen from the earlier term
                cells = [
                    [cells[0][0].clone(), cells[1][0].clone()],
                    [cells[0][1].clone(), cells[1][1].clone()],
                ];
            }
            blocks.insert((ia.min(ib), ia.max(ib)), cells);
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let mut header = vec![String::new()];
        for t in terms.iter().skip(1) {
            header.push(t.clone());
            header.push(String::new());
        }
        w.write_record(&header).expect("in-memory write");
        for (i, term) in terms.iter().enumerate().take(m.saturating_sub(1)) {
            for line in 0..2 {
                let mut rec = vec![if line == 0 {
                    term.clone()
                } else {
                    String::new()
                }];
                for j in 1..m {
                    match blocks.get(&(i, j)) {
                        Some(cells) if j > i => {
                            rec.push(cells[line][0].clone());
                            rec.push(cells[line][1].clone());
                        }
                        _ => {
                            rec.push(String::new());
                            rec.push(String::new());
                        }
                    }
                }
                w.write_record(&rec).expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 labels")
    }
}

/// H matrix of every unordered term pair in a usage log.
pub fn h_matrix(usage: &UsageMatrix) -> Result<HMatrix> {
    HMatrix::from_tables(PairTables::from_usage(usage))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HMatrixDocument {
    pub pairs: Vec<PairRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub a: String,
    pub b: String,
    /// `[n11, n10, n01, n00]`
    pub table: [u64; 4],
    pub h: QuadrantValues,
    pub class: QuadrantClasses,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrantValues {
    pub exclusion: Option<f64>,
    pub forward: Option<f64>,
    pub backward: Option<f64>,
    pub complement: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrantClasses {
    pub exclusion: ImplicationClass,
    pub forward: ImplicationClass,
    pub backward: ImplicationClass,
    pub complement: ImplicationClass,
}
