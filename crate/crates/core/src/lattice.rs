//! Concept enumeration (NextClosure), Hasse diagrams and pairwise implications.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::context::FormalContext;
use crate::error::{Error, Result};

/// A pair of mutually closed object and attribute sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormalConcept {
    pub extent: BitSet,
    pub intent: BitSet,
}

impl FormalConcept {
    /// True when both components are closed in `ctx`.
    pub fn is_closed_in(&self, ctx: &FormalContext) -> bool {
        ctx.intent_of(&self.extent) == self.intent && ctx.extent_of(&self.intent) == self.extent
    }
}

/// Every formal concept of `ctx`, in lectic order of intents.
///
/// Attributes are ordered as in the context; the first concept is the top
/// (intent = closure of the empty set) and the last is the bottom
/// (intent = all attributes).
pub fn concepts(ctx: &FormalContext) -> Vec<FormalConcept> {
    let m = ctx.attribute_count();
    let mut out = Vec::new();
    let mut current = ctx.attribute_closure(&BitSet::new(m));
    loop {
        out.push(FormalConcept {
            extent: ctx.extent_of(&current),
            intent: current.clone(),
        });
        match next_closure(ctx, &current) {
            Some(next) => current = next,
            None => break,
        }
    }
    out
}

// Lectically next closed attribute set after `closed`, or None after the last one.
fn next_closure(ctx: &FormalContext, closed: &BitSet) -> Option<BitSet> {
    let m = ctx.attribute_count();
    let mut prefix = closed.clone();
    for i in (0..m).rev() {
        if prefix.contains(i) {
            prefix.remove(i);
            continue;
        }
        let mut candidate = prefix.clone();
        candidate.insert(i);
        let closure = ctx.attribute_closure(&candidate);
        // accept only if the closure adds nothing below i
        let adds_smaller = closure
            .iter()
            .take_while(|&j| j < i)
            .any(|j| !prefix.contains(j));
        if !adds_smaller {
            return Some(closure);
        }
    }
    None
}

/// Concepts together with the cover relation of their extent-inclusion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptLattice {
    concepts: Vec<FormalConcept>,
    /// `(child, parent)` index pairs with `extent(child) ⊂ extent(parent)` and
    /// nothing in between. Sorted.
    covers: Vec<(usize, usize)>,
}

impl ConceptLattice {
    pub fn from_context(ctx: &FormalContext) -> Self {
        hasse(concepts(ctx)).expect("enumerated concepts form a lattice")
    }

    pub fn concepts(&self) -> &[FormalConcept] {
        &self.concepts
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    /// Index of the concept with the largest extent.
    pub fn top(&self) -> usize {
        self.extremum(|c| c.extent.count())
    }

    /// Index of the concept with the largest intent.
    pub fn bottom(&self) -> usize {
        self.extremum(|c| c.intent.count())
    }

    fn extremum(&self, key: impl Fn(&FormalConcept) -> usize) -> usize {
        self.concepts
            .iter()
            .enumerate()
            .max_by_key(|(_, c)| key(c))
            .map(|(i, _)| i)
            .expect("lattice is never empty")
    }

    /// Index of the concept whose extent equals `extent`.
    pub fn find_by_extent(&self, extent: &BitSet) -> Option<usize> {
        self.concepts.iter().position(|c| c.extent == *extent)
    }

    /// Attribute concept of attribute `a`: the largest concept whose intent contains it.
    pub fn attribute_concept(&self, ctx: &FormalContext, a: usize) -> usize {
        self.find_by_extent(ctx.column(a))
            .expect("attribute concepts belong to the lattice")
    }

    /// Object concept of object `o`: the smallest concept whose extent contains it.
    pub fn object_concept(&self, ctx: &FormalContext, o: usize) -> usize {
        let extent = ctx.extent_of(ctx.row(o));
        self.find_by_extent(&extent)
            .expect("object concepts belong to the lattice")
    }

    pub fn to_document(&self, ctx: &FormalContext) -> LatticeDocument {
        LatticeDocument {
            concepts: self
                .concepts
                .iter()
                .map(|c| ConceptLabels {
                    extent: ctx.object_labels(&c.extent),
                    intent: ctx.attribute_labels(&c.intent),
                })
                .collect(),
            covers: self.covers.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    pub fn to_json(&self, ctx: &FormalContext) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document(ctx))?)
    }

    /// Graphviz rendering with reduced labeling: each node shows the attributes
    /// introduced there above the line and the objects introduced there below it.
    pub fn to_dot(&self, ctx: &FormalContext) -> String {
        let mut introduced_attrs = vec![Vec::new(); self.len()];
        for a in 0..ctx.attribute_count() {
            introduced_attrs[self.attribute_concept(ctx, a)].push(ctx.attributes()[a].as_str());
        }
        let mut introduced_objs = vec![Vec::new(); self.len()];
        for o in 0..ctx.object_count() {
            introduced_objs[self.object_concept(ctx, o)].push(ctx.objects()[o].as_str());
        }

        let mut out = String::from("digraph lattice {\n  rankdir=BT;\n  node [shape=record];\n");
        for i in 0..self.len() {
            let attrs = introduced_attrs[i]
                .iter()
                .map(|s| record_escape(s))
                .collect::<Vec<_>>();
            let objs = introduced_objs[i]
                .iter()
                .map(|s| record_escape(s))
                .collect::<Vec<_>>();
            let _ = writeln!(
                out,
                "  c{i} [label=\"{{{}|{}}}\"];",
                attrs.join("\\n"),
                objs.join("\\n")
            );
        }
        for &(child, parent) in &self.covers {
            let _ = writeln!(out, "  c{child} -> c{parent} [arrowhead=none];");
        }
        out.push_str("}\n");
        out
    }
}

fn record_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        if matches!(ch, '{' | '}' | '|' | '<' | '>' | '"' | '\\') {
            out.push('\\');
        }
        out.push(ch);
    }
    out
}

/// Serialized lattice: label lists plus cover pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeDocument {
    pub concepts: Vec<ConceptLabels>,
    pub covers: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptLabels {
    pub extent: Vec<String>,
    pub intent: Vec<String>,
}

/// Builds the Hasse diagram of a closed concept set. The input order is kept.
///
/// Fails if the set is empty, holds duplicates, is not antitone between
/// extents and intents, or is missing a meet or join of two of its members.
pub fn hasse(concepts: Vec<FormalConcept>) -> Result<ConceptLattice> {
    if concepts.is_empty() {
        return Err(Error::invalid(
            "a concept lattice needs at least one concept",
        ));
    }
    let extents: HashSet<&BitSet> = concepts.iter().map(|c| &c.extent).collect();
    let intents: HashSet<&BitSet> = concepts.iter().map(|c| &c.intent).collect();
    if extents.len() != concepts.len() || intents.len() != concepts.len() {
        return Err(Error::invalid("duplicate concepts"));
    }
    for (i, a) in concepts.iter().enumerate() {
        for b in &concepts[i + 1..] {
            if a.extent.is_subset(&b.extent) != b.intent.is_subset(&a.intent)
                || b.extent.is_subset(&a.extent) != a.intent.is_subset(&b.intent)
            {
                return Err(Error::invalid(
                    "extent and intent orders disagree; concepts are not closed",
                ));
            }
            if !extents.contains(&a.extent.intersection(&b.extent)) {
                return Err(Error::invalid("concept set is not closed under meets"));
            }
            if !intents.contains(&a.intent.intersection(&b.intent)) {
                return Err(Error::invalid("concept set is not closed under joins"));
            }
        }
    }

    let mut covers = Vec::new();
    for (i, child) in concepts.iter().enumerate() {
        let uppers: Vec<usize> = (0..concepts.len())
            .filter(|&j| child.extent.is_proper_subset(&concepts[j].extent))
            .collect();
        for &j in &uppers {
            let between = uppers
                .iter()
                .any(|&k| k != j && concepts[k].extent.is_proper_subset(&concepts[j].extent));
            if !between {
                covers.push((i, j));
            }
        }
    }
    covers.sort_unstable();
    Ok(ConceptLattice { concepts, covers })
}

/// `antecedent → consequent`: every object with the antecedent also has the consequent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AttributeImplication {
    pub antecedent: String,
    pub consequent: String,
}

/// All single-premise implications between distinct attributes,
/// antecedent-major in attribute order.
pub fn pairwise_implications(ctx: &FormalContext) -> Vec<AttributeImplication> {
    let m = ctx.attribute_count();
    let mut out = Vec::new();
    for a in 0..m {
        for b in 0..m {
            if a != b && ctx.column(a).is_subset(ctx.column(b)) {
                out.push(AttributeImplication {
                    antecedent: ctx.attributes()[a].clone(),
                    consequent: ctx.attributes()[b].clone(),
                });
            }
        }
    }
    out
}
