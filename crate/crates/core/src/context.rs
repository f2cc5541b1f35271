//! Symbolic tables, formal contexts and per-user usage logs.
//!
//! Labels are compared after trimming surrounding whitespace and applying
//! Unicode NFC normalization. Case is preserved and significant.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use unicode_normalization::UnicodeNormalization;

use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// Canonical form of a label read from an input file.
pub fn normalize_label(raw: &str) -> String {
    raw.trim().nfc().collect()
}

// Separators that would indicate several terms packed into one cell.
const MULTI_TERM_SEPARATORS: [char; 4] = [';', '|', '\n', '\r'];

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes())
}

fn ensure_unique(labels: &[String], kind: &str) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::invalid(format!("duplicate {kind} label `{l}`")));
        }
    }
    Ok(())
}

/// An object × informant table where each cell names the term one informant
/// used for one system object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicTable {
    system_objects: Vec<String>,
    informants: Vec<String>,
    cells: Vec<Vec<String>>,
}

impl SymbolicTable {
    pub fn new(
        system_objects: Vec<String>,
        informants: Vec<String>,
        cells: Vec<Vec<String>>,
    ) -> Result<Self> {
        if cells.len() != system_objects.len() {
            return Err(Error::invalid(format!(
                "{} cell rows for {} system objects",
                cells.len(),
                system_objects.len()
            )));
        }
        ensure_unique(&system_objects, "system object")?;
        ensure_unique(&informants, "informant")?;
        for (o, row) in system_objects.iter().zip(&cells) {
            if row.len() != informants.len() {
                return Err(Error::invalid(format!(
                    "row `{o}` has {} cells, expected {}",
                    row.len(),
                    informants.len()
                )));
            }
            if row.iter().any(|c| c.is_empty()) {
                return Err(Error::invalid(format!("row `{o}` has an empty cell")));
            }
        }
        Ok(SymbolicTable {
            system_objects,
            informants,
            cells,
        })
    }

    pub fn system_objects(&self) -> &[String] {
        &self.system_objects
    }

    pub fn informants(&self) -> &[String] {
        &self.informants
    }

    pub fn cells(&self) -> &[Vec<String>] {
        &self.cells
    }

    /// The term `informant` used for `object`, if both labels exist.
    pub fn cell(&self, object: &str, informant: &str) -> Option<&str> {
        let o = self.system_objects.iter().position(|x| x == object)?;
        let i = self.informants.iter().position(|x| x == informant)?;
        Some(&self.cells[o][i])
    }
}

/// Parses a symbolic table from CSV.
///
/// The header is `object,<informant>,...` (the first cell may also be blank)
/// and each following row starts with a system-object label.
pub fn parse_symbolic_table(text: &str) -> Result<SymbolicTable> {
    let mut records = csv_reader(text).into_records();
    let header = match records.next() {
        Some(r) => r?,
        None => return Err(Error::parse(0, "missing header row")),
    };
    let first = normalize_label(header.get(0).unwrap_or(""));
    if !(first.is_empty() || first.eq_ignore_ascii_case("object")) {
        return Err(Error::parse(
            0,
            format!("first header cell must be blank or `object`, found `{first}`"),
        ));
    }
    let informants: Vec<String> = header.iter().skip(1).map(normalize_label).collect();
    if informants.is_empty() {
        return Err(Error::parse(0, "no informant columns"));
    }
    if let Some(pos) = informants.iter().position(|s| s.is_empty()) {
        return Err(Error::parse(
            0,
            format!("informant column {} is unnamed", pos + 1),
        ));
    }

    let mut objects = Vec::new();
    let mut cells = Vec::new();
    for (idx, record) in records.enumerate() {
        let row = idx + 1;
        let record = record?;
        if record.len() == 1 && record.get(0).is_some_and(|s| s.trim().is_empty()) {
            continue;
        }
        if record.len() != header.len() {
            return Err(Error::parse(
                row,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        let object = normalize_label(&record[0]);
        if object.is_empty() {
            return Err(Error::parse(row, "missing system-object label"));
        }
        let mut terms = Vec::with_capacity(informants.len());
        for (col, raw) in record.iter().enumerate().skip(1) {
            let term = normalize_label(raw);
            if term.is_empty() {
                return Err(Error::parse(
                    row,
                    format!("empty cell for informant `{}`", informants[col - 1]),
                ));
            }
            if term.contains(MULTI_TERM_SEPARATORS) {
                return Err(Error::parse(
                    row,
                    format!("cell `{term}` holds more than one term"),
                ));
            }
            terms.push(term);
        }
        objects.push(object);
        cells.push(terms);
    }
    SymbolicTable::new(objects, informants, cells)
}

/// Binary incidence between objects and attributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalContext {
    objects: Vec<String>,
    attributes: Vec<String>,
    // rows[o] holds the attributes of object o; columns[a] the objects of attribute a.
    rows: Vec<BitSet>,
    columns: Vec<BitSet>,
}

impl FormalContext {
    pub fn new(
        objects: Vec<String>,
        attributes: Vec<String>,
        incidence: Vec<Vec<bool>>,
    ) -> Result<Self> {
        if incidence.len() != objects.len() {
            return Err(Error::invalid(format!(
                "{} incidence rows for {} objects",
                incidence.len(),
                objects.len()
            )));
        }
        let m = attributes.len();
        let mut rows = Vec::with_capacity(objects.len());
        for (o, row) in objects.iter().zip(&incidence) {
            if row.len() != m {
                return Err(Error::invalid(format!(
                    "object `{o}` has {} incidence entries, expected {m}",
                    row.len()
                )));
            }
            rows.push(BitSet::from_indices(
                m,
                row.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i),
            ));
        }
        Self::from_rows(objects, attributes, rows)
    }

    pub(crate) fn from_rows(
        objects: Vec<String>,
        attributes: Vec<String>,
        rows: Vec<BitSet>,
    ) -> Result<Self> {
        ensure_unique(&objects, "object")?;
        ensure_unique(&attributes, "attribute")?;
        let n = objects.len();
        let mut columns = vec![BitSet::new(n); attributes.len()];
        for (o, row) in rows.iter().enumerate() {
            for a in row.iter() {
                columns[a].insert(o);
            }
        }
        Ok(FormalContext {
            objects,
            attributes,
            rows,
            columns,
        })
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }

    pub fn incident(&self, object: usize, attribute: usize) -> bool {
        self.rows[object].contains(attribute)
    }

    /// Attributes of one object.
    pub fn row(&self, object: usize) -> &BitSet {
        &self.rows[object]
    }

    /// Objects of one attribute.
    pub fn column(&self, attribute: usize) -> &BitSet {
        &self.columns[attribute]
    }

    pub fn object_index(&self, label: &str) -> Result<usize> {
        let label = normalize_label(label);
        self.objects
            .iter()
            .position(|o| *o == label)
            .ok_or(Error::UnknownLabel {
                kind: "object",
                label,
            })
    }

    pub fn attribute_index(&self, label: &str) -> Result<usize> {
        let label = normalize_label(label);
        self.attributes
            .iter()
            .position(|a| *a == label)
            .ok_or(Error::UnknownLabel {
                kind: "attribute",
                label,
            })
    }

    pub fn attribute_set<S: AsRef<str>>(&self, labels: &[S]) -> Result<BitSet> {
        let mut set = BitSet::new(self.attribute_count());
        for l in labels {
            set.insert(self.attribute_index(l.as_ref())?);
        }
        Ok(set)
    }

    pub fn object_set<S: AsRef<str>>(&self, labels: &[S]) -> Result<BitSet> {
        let mut set = BitSet::new(self.object_count());
        for l in labels {
            set.insert(self.object_index(l.as_ref())?);
        }
        Ok(set)
    }

    pub fn object_labels(&self, set: &BitSet) -> Vec<String> {
        set.iter().map(|i| self.objects[i].clone()).collect()
    }

    pub fn attribute_labels(&self, set: &BitSet) -> Vec<String> {
        set.iter().map(|i| self.attributes[i].clone()).collect()
    }

    /// Objects having every attribute in `attrs`.
    pub fn extent_of(&self, attrs: &BitSet) -> BitSet {
        let mut out = BitSet::full(self.object_count());
        for a in attrs.iter() {
            out.intersect_with(&self.columns[a]);
        }
        out
    }

    /// Attributes shared by every object in `objs`.
    pub fn intent_of(&self, objs: &BitSet) -> BitSet {
        let mut out = BitSet::full(self.attribute_count());
        for o in objs.iter() {
            out.intersect_with(&self.rows[o]);
        }
        out
    }

    /// `intent(extent(attrs))`
    pub fn attribute_closure(&self, attrs: &BitSet) -> BitSet {
        self.intent_of(&self.extent_of(attrs))
    }

    /// Label-level extent, reported in context object order.
    pub fn extent<S: AsRef<str>>(&self, attrs: &[S]) -> Result<Vec<String>> {
        let set = self.attribute_set(attrs)?;
        Ok(self.object_labels(&self.extent_of(&set)))
    }

    /// Label-level intent, reported in context attribute order.
    pub fn intent<S: AsRef<str>>(&self, objs: &[S]) -> Result<Vec<String>> {
        let set = self.object_set(objs)?;
        Ok(self.attribute_labels(&self.intent_of(&set)))
    }

    /// The same context with its attribute columns permuted into `order`,
    /// which must list every attribute exactly once.
    pub fn reorder_attributes<S: AsRef<str>>(&self, order: &[S]) -> Result<FormalContext> {
        if order.len() != self.attribute_count() {
            return Err(Error::invalid(format!(
                "attribute order lists {} labels, the context has {}",
                order.len(),
                self.attribute_count()
            )));
        }
        let perm = order
            .iter()
            .map(|l| self.attribute_index(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let m = perm.len();
        let rows = self
            .rows
            .iter()
            .map(|row| BitSet::from_indices(m, (0..m).filter(|&k| row.contains(perm[k]))))
            .collect();
        let attributes = perm.iter().map(|&i| self.attributes[i].clone()).collect();
        FormalContext::from_rows(self.objects.clone(), attributes, rows)
    }

    /// Renders the context as `object,<attr>,...` CSV with `0`/`1` cells.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let mut header = vec!["object"];
        header.extend(self.attributes.iter().map(String::as_str));
        w.write_record(&header)?;
        for (o, row) in self.objects.iter().zip(&self.rows) {
            let mut rec = vec![o.as_str()];
            rec.extend(
                (0..self.attribute_count()).map(|a| if row.contains(a) { "1" } else { "0" }),
            );
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output of utf-8 labels"))
    }
}

/// Builds the binary context of a symbolic table: one attribute per distinct
/// term, in row-major first-appearance order.
pub fn binarize(table: &SymbolicTable) -> FormalContext {
    let mut attributes: Vec<String> = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for row in &table.cells {
        for term in row {
            if !index.contains_key(term.as_str()) {
                index.insert(term, attributes.len());
                attributes.push(term.clone());
            }
        }
    }
    let m = attributes.len();
    let rows = table
        .cells
        .iter()
        .map(|row| BitSet::from_indices(m, row.iter().map(|t| index[t.as_str()])))
        .collect();
    FormalContext::from_rows(table.system_objects.clone(), attributes, rows)
        .expect("symbolic table labels are unique")
}

/// Parses a `object,<attr>,...` context CSV with `0`/`1` cells.
pub fn parse_context_csv(text: &str) -> Result<FormalContext> {
    let mut records = csv_reader(text).into_records();
    let header = match records.next() {
        Some(r) => r?,
        None => return Err(Error::parse(0, "missing header row")),
    };
    let first = normalize_label(header.get(0).unwrap_or(""));
    if !(first.is_empty() || first.eq_ignore_ascii_case("object")) {
        return Err(Error::parse(
            0,
            format!("first header cell must be blank or `object`, found `{first}`"),
        ));
    }
    let attributes: Vec<String> = header.iter().skip(1).map(normalize_label).collect();
    if attributes.iter().any(|a| a.is_empty()) {
        return Err(Error::parse(0, "unnamed attribute column"));
    }
    let mut objects = Vec::new();
    let mut incidence = Vec::new();
    for (idx, record) in records.enumerate() {
        let row = idx + 1;
        let record = record?;
        if record.len() == 1 && record.get(0).is_some_and(|s| s.trim().is_empty()) {
            continue;
        }
        if record.len() != header.len() {
            return Err(Error::parse(
                row,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        let object = normalize_label(&record[0]);
        if object.is_empty() {
            return Err(Error::parse(row, "missing object label"));
        }
        let mut bits = Vec::with_capacity(attributes.len());
        for cell in record.iter().skip(1) {
            bits.push(match cell.trim() {
                "1" => true,
                "0" => false,
                other => {
                    return Err(Error::parse(
                        row,
                        format!("incidence cell must be 0 or 1, found `{other}`"),
                    ))
                }
            });
        }
        objects.push(object);
        incidence.push(bits);
    }
    FormalContext::new(objects, attributes, incidence)
}

/// Which terms each user has used, plus the size of the surveyed population.
///
/// Users counted in `population` but absent from `users` used no term at all.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageMatrix {
    users: Vec<String>,
    terms: Vec<String>,
    // columns[t] = users who used term t
    columns: Vec<BitSet>,
    population: usize,
}

impl UsageMatrix {
    /// `used[u][t]` tells whether user `u` used term `t`.
    pub fn new(
        users: Vec<String>,
        terms: Vec<String>,
        used: Vec<Vec<bool>>,
        population: usize,
    ) -> Result<Self> {
        ensure_unique(&users, "user")?;
        ensure_unique(&terms, "term")?;
        if used.len() != users.len() {
            return Err(Error::invalid(format!(
                "{} usage rows for {} users",
                used.len(),
                users.len()
            )));
        }
        let mut columns = vec![BitSet::new(users.len()); terms.len()];
        let mut active = 0;
        for (u, row) in used.iter().enumerate() {
            if row.len() != terms.len() {
                return Err(Error::invalid(format!(
                    "user `{}` has {} usage entries, expected {}",
                    users[u],
                    row.len(),
                    terms.len()
                )));
            }
            let mut any = false;
            for (t, &b) in row.iter().enumerate() {
                if b {
                    columns[t].insert(u);
                    any = true;
                }
            }
            active += usize::from(any);
        }
        if population < active {
            return Err(Error::invalid(format!(
                "population {population} is smaller than the {active} users with recorded usage"
            )));
        }
        Ok(UsageMatrix {
            users,
            terms,
            columns,
            population,
        })
    }

    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn population(&self) -> usize {
        self.population
    }

    /// The same usage over a different population size.
    pub fn with_population(mut self, population: usize) -> Result<Self> {
        let active = (0..self.users.len())
            .filter(|&u| self.columns.iter().any(|c| c.contains(u)))
            .count();
        if population < active {
            return Err(Error::invalid(format!(
                "population {population} is smaller than the {active} users with recorded usage"
            )));
        }
        self.population = population;
        Ok(self)
    }

    pub fn term_index(&self, term: &str) -> Result<usize> {
        let term = normalize_label(term);
        self.terms
            .iter()
            .position(|t| *t == term)
            .ok_or(Error::UnknownLabel {
                kind: "term",
                label: term,
            })
    }

    /// Users (by index into [`users`](Self::users)) who used `term`.
    pub fn users_of(&self, term: usize) -> &BitSet {
        &self.columns[term]
    }

    pub fn is_used(&self, user: usize, term: usize) -> bool {
        self.columns[term].contains(user)
    }
}

/// Reads a long-form `user_id,term` log. Duplicate rows collapse; users and
/// terms are kept in sorted order so row order never matters.
pub fn parse_observations(text: &str, population: usize) -> Result<UsageMatrix> {
    let mut records = csv_reader(text).into_records();
    match records.next() {
        None => return UsageMatrix::new(Vec::new(), Vec::new(), Vec::new(), population),
        Some(header) => {
            let header = header?;
            let cols: Vec<String> = header.iter().map(normalize_label).collect();
            if cols != ["user_id", "term"] {
                return Err(Error::parse(
                    0,
                    format!("expected header `user_id,term`, found `{}`", cols.join(",")),
                ));
            }
        }
    }
    let mut pairs: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut terms = BTreeSet::new();
    for (idx, record) in records.enumerate() {
        let row = idx + 1;
        let record = record?;
        if record.len() == 1 && record.get(0).is_some_and(|s| s.trim().is_empty()) {
            continue;
        }
        if record.len() != 2 {
            return Err(Error::parse(
                row,
                format!("expected 2 fields, found {}", record.len()),
            ));
        }
        let user = normalize_label(&record[0]);
        let term = normalize_label(&record[1]);
        if user.is_empty() {
            return Err(Error::parse(row, "empty user_id"));
        }
        if term.is_empty() {
            return Err(Error::parse(row, "empty term"));
        }
        terms.insert(term.clone());
        pairs.entry(user).or_default().insert(term);
    }
    let terms: Vec<String> = terms.into_iter().collect();
    let mut users = Vec::with_capacity(pairs.len());
    let mut used = Vec::with_capacity(pairs.len());
    for (user, set) in pairs {
        used.push(terms.iter().map(|t| set.contains(t)).collect());
        users.push(user);
    }
    UsageMatrix::new(users, terms, used, population)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SYMBOLIC: &str = include_str!("../../../fixtures/novice_symbolic.csv");

    const NOVICE_ORDER: [&str; 6] = [
        "The number",
        "The Sign",
        "The letters",
        "The numbers",
        "The Characters",
        "Substantive",
    ];

    fn novice() -> FormalContext {
        binarize(&parse_symbolic_table(SYMBOLIC).unwrap())
            .reorder_attributes(&NOVICE_ORDER)
            .unwrap()
    }

    #[test]
    fn symbolic_cells() {
        let t = parse_symbolic_table(SYMBOLIC).unwrap();
        assert_eq!(t.system_objects(), ["Char", "Word", "Key"]);
        assert_eq!(t.informants().len(), 5);
        assert_eq!(t.cell("Char", "Novice User 1"), Some("The number"));
        assert_eq!(t.cell("Key", "Novice User 5"), Some("The letters"));
    }

    #[test]
    fn minimal_table() {
        let t = parse_symbolic_table("object,i\no, x \n").unwrap();
        assert_eq!(t.cells(), [vec!["x".to_string()]]);
        let ctx = binarize(&t);
        assert_eq!(ctx.attributes(), ["x"]);
        assert!(ctx.incident(0, 0));
    }

    #[test]
    fn blank_corner_and_quoted_fields() {
        let t = parse_symbolic_table(",\"a, b\",c\nobj,\"x, y\",z\n");
        // a comma inside quotes is one label, not a multi-term cell
        let t = t.unwrap();
        assert_eq!(t.informants(), ["a, b", "c"]);
        assert_eq!(t.cell("obj", "a, b"), Some("x, y"));
    }

    #[test]
    fn ragged_row_names_row() {
        let err = parse_symbolic_table("object,a,b\np,x,y\nq,x\n").unwrap_err();
        match err {
            Error::Parse { row, .. } => assert_eq!(row, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_cell_rejected() {
        let err = parse_symbolic_table("object,a,b\np,x,  \n").unwrap_err();
        assert!(matches!(err, Error::Parse { row: 1, .. }), "{err}");
    }

    #[test]
    fn multi_term_cell_rejected() {
        let err = parse_symbolic_table("object,a\np,x;y\n").unwrap_err();
        assert!(matches!(err, Error::Parse { row: 1, .. }));
    }

    #[test]
    fn bad_header() {
        assert!(matches!(
            parse_symbolic_table("thing,a\np,x\n"),
            Err(Error::Parse { row: 0, .. })
        ));
        assert!(parse_symbolic_table("").is_err());
    }

    #[test]
    fn nfc_normalization_merges_labels() {
        // "é" precomposed vs. "e" + combining acute
        let t = parse_symbolic_table("object,a,b\np,caf\u{e9},cafe\u{301}\n").unwrap();
        let ctx = binarize(&t);
        assert_eq!(ctx.attribute_count(), 1);
    }

    #[test]
    fn binarize_uses_row_major_first_appearance() {
        let ctx = binarize(&parse_symbolic_table(SYMBOLIC).unwrap());
        // Substantive shows up in the Word row, before The Characters in the Key row
        assert_eq!(
            ctx.attributes(),
            [
                "The number",
                "The Sign",
                "The letters",
                "The numbers",
                "Substantive",
                "The Characters"
            ]
        );
        assert_eq!(ctx.reorder_attributes(&NOVICE_ORDER).unwrap(), novice());
    }

    #[test]
    fn reorder_rejects_incomplete_order() {
        let ctx = novice();
        assert!(ctx.reorder_attributes(&NOVICE_ORDER[..5]).is_err());
        let mut dup = NOVICE_ORDER;
        dup[5] = "The number";
        assert!(ctx.reorder_attributes(&dup).is_err());
    }

    #[test]
    fn binarize_novice_rows() {
        let ctx = novice();
        assert_eq!(ctx.attributes(), NOVICE_ORDER);
        let row = |o: usize| (0..6).map(|a| ctx.incident(o, a) as u8).collect::<Vec<_>>();
        assert_eq!(row(0), [1, 1, 1, 1, 0, 0]);
        assert_eq!(row(1), [0, 1, 1, 1, 0, 1]);
        assert_eq!(row(2), [0, 0, 1, 0, 1, 1]);
    }

    #[test]
    fn binarize_single_term() {
        let t = parse_symbolic_table("object,a,b\np,t,t\nq,t,t\n").unwrap();
        let ctx = binarize(&t);
        assert_eq!(ctx.attributes(), ["t"]);
        assert_eq!(ctx.column(0).count(), 2);
    }

    #[test]
    fn derivations_on_novice() {
        let ctx = novice();
        assert_eq!(
            ctx.extent(&["The letters"]).unwrap(),
            ["Char", "Word", "Key"]
        );
        assert_eq!(ctx.extent(&["The Sign", "Substantive"]).unwrap(), ["Word"]);
        assert_eq!(ctx.extent::<&str>(&[]).unwrap().len(), 3);
        assert_eq!(
            ctx.intent(&["Char", "Word"]).unwrap(),
            ["The Sign", "The letters", "The numbers"]
        );
        assert_eq!(
            ctx.intent(&["Key"]).unwrap(),
            ["The letters", "The Characters", "Substantive"]
        );
        assert_eq!(ctx.intent::<&str>(&[]).unwrap().len(), 6);
    }

    #[test]
    fn unknown_labels() {
        let ctx = novice();
        assert!(matches!(
            ctx.extent(&["nope"]),
            Err(Error::UnknownLabel {
                kind: "attribute",
                ..
            })
        ));
        assert!(matches!(
            ctx.intent(&["nope"]),
            Err(Error::UnknownLabel { kind: "object", .. })
        ));
    }

    #[test]
    fn context_csv_round_trip() {
        let ctx = novice();
        let csv = ctx.to_csv().unwrap();
        assert_eq!(csv, include_str!("../../../fixtures/novice_context.csv"));
        assert_eq!(parse_context_csv(&csv).unwrap(), ctx);
    }

    #[test]
    fn context_csv_rejects_bad_cell() {
        let err = parse_context_csv("object,a\np,2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { row: 1, .. }));
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(parse_context_csv("object,a,a\np,1,0\n").is_err());
        assert!(parse_symbolic_table("object,a\np,x\np,y\n").is_err());
    }

    #[test]
    fn observations_basic() {
        let log = "user_id,term\nu2,b\nu1,a\nu1,b\n";
        let m = parse_observations(log, 10).unwrap();
        assert_eq!(m.users(), ["u1", "u2"]);
        assert_eq!(m.terms(), ["a", "b"]);
        assert!(m.is_used(0, 0) && m.is_used(0, 1) && m.is_used(1, 1) && !m.is_used(1, 0));
        assert_eq!(m.population(), 10);
    }

    #[test]
    fn observations_empty_file() {
        let m = parse_observations("", 0).unwrap();
        assert!(m.users().is_empty() && m.terms().is_empty());
        let m = parse_observations("user_id,term\n", 0).unwrap();
        assert_eq!(m.population(), 0);
    }

    #[test]
    fn observations_duplicates_collapse() {
        let once = parse_observations("user_id,term\nu,a\n", 3).unwrap();
        let five = parse_observations(&format!("user_id,term\n{}", "u,a\n".repeat(5)), 3).unwrap();
        assert_eq!(once, five);
    }

    #[test]
    fn observations_errors() {
        assert!(matches!(
            parse_observations("user_id,term\nu1,a\nu2,a\n", 1),
            Err(Error::Invalid(_))
        ));
        assert!(matches!(
            parse_observations("user_id,term\nu1, \n", 5),
            Err(Error::Parse { row: 1, .. })
        ));
        assert!(matches!(
            parse_observations("user,word\n", 5),
            Err(Error::Parse { row: 0, .. })
        ));
    }

    #[test]
    fn number_sign_log_fixture() {
        let log = include_str!("../../../fixtures/number_sign_log.csv");
        let m = parse_observations(log, 768).unwrap();
        assert_eq!(m.users().len(), 215);
        assert_eq!(m.terms(), ["The Sign", "The number"]);
    }

    #[test]
    fn population_can_be_replaced() {
        let m = parse_observations("user_id,term\nu1,a\nu2,b\n", 2).unwrap();
        assert_eq!(m.clone().with_population(10).unwrap().population(), 10);
        assert!(matches!(m.with_population(1), Err(Error::Invalid(_))));
    }
}
