//! Descriptive and inductive implicative graphs, with DOT and JSON export.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::stats::{ClassificationThresholds, HMatrix, ImplicationClass, Quadrant, Strength};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Implication,
    Exclusion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Descriptive,
    Inductive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: String,
    pub target: String,
    pub kind: EdgeKind,
    pub point_h: f64,
    pub eta_low: Option<f64>,
    pub class: ImplicationClass,
    pub stage: Stage,
}

impl Edge {
    /// The value the class was derived from.
    pub fn governing_value(&self) -> f64 {
        match self.stage {
            Stage::Descriptive => self.point_h,
            Stage::Inductive => self.eta_low.unwrap_or(f64::NEG_INFINITY),
        }
    }

    fn same_relation(&self, other: &Edge) -> bool {
        self.source == other.source && self.target == other.target && self.kind == other.kind
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ImplicativeGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DotOptions {
    /// Draw a mutual pair of implication edges as one double-headed edge.
    pub merge_equivalences: bool,
}

/// Edges for every index at or above `h_floor`: `a → b` from the forward
/// index, `b → a` from the backward index, and one exclusion edge per pair
/// with its lexicographically smaller label as source. Complement indices
/// never produce edges.
pub fn build_descriptive_graph(
    hm: &HMatrix,
    th: &ClassificationThresholds,
    h_floor: f64,
) -> ImplicativeGraph {
    let mut edges = Vec::new();
    for e in hm.entries() {
        let mut push = |source: &str, target: &str, kind: EdgeKind, q: Quadrant| {
            if let Some(h) = e.h.get(q).filter(|&h| h >= h_floor) {
                edges.push(Edge {
                    source: source.to_string(),
                    target: target.to_string(),
                    kind,
                    point_h: h,
                    eta_low: None,
                    class: ImplicationClass::of(q, Some(h), th),
                    stage: Stage::Descriptive,
                });
            }
        };
        push(&e.a, &e.b, EdgeKind::Implication, Quadrant::Forward);
        push(&e.b, &e.a, EdgeKind::Implication, Quadrant::Backward);
        let (lo, hi) = if e.a <= e.b {
            (&e.a, &e.b)
        } else {
            (&e.b, &e.a)
        };
        push(lo, hi, EdgeKind::Exclusion, Quadrant::Exclusion);
    }
    ImplicativeGraph {
        nodes: hm.terms().to_vec(),
        edges,
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn edge_label(e: &Edge) -> String {
    match e.eta_low {
        Some(eta) => format!("H={:.2}\nη̲={:.2}", e.point_h, eta),
        None => format!("H={:.2}", e.point_h),
    }
}

fn edge_attrs(e: &Edge, label: String) -> String {
    match (e.kind, e.class.strength) {
        (EdgeKind::Exclusion, _) => format!("label={}, dir=none, style=dashed", quote(&label)),
        (EdgeKind::Implication, Strength::Quasi) => format!("label={}, style=solid", quote(&label)),
        (EdgeKind::Implication, Strength::Tendency) => {
            format!("label={}, style=dotted", quote(&label))
        }
        (EdgeKind::Implication, Strength::Absence) => {
            format!("label={}, style=solid, color=gray", quote(&label))
        }
    }
}

impl ImplicativeGraph {
    /// True when `edge`'s relation (endpoints and kind) is present.
    pub fn contains_relation(&self, edge: &Edge) -> bool {
        self.edges.iter().any(|e| e.same_relation(edge))
    }

    pub fn find(&self, source: &str, target: &str, kind: EdgeKind) -> Option<&Edge> {
        self.edges
            .iter()
            .find(|e| e.source == source && e.target == target && e.kind == kind)
    }

    pub fn to_dot(&self) -> String {
        self.to_dot_with(DotOptions::default())
    }

    pub fn to_dot_with(&self, opts: DotOptions) -> String {
        let mut out = String::from("digraph implicative {\n");
        for n in &self.nodes {
            let _ = writeln!(out, "  {};", quote(n));
        }
        let mut position: HashMap<(&str, &str), usize> = HashMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.kind == EdgeKind::Implication {
                position.insert((e.source.as_str(), e.target.as_str()), i);
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            let reverse = if opts.merge_equivalences && e.kind == EdgeKind::Implication {
                position
                    .get(&(e.target.as_str(), e.source.as_str()))
                    .copied()
            } else {
                None
            };
            match reverse {
                // the later edge of a mutual pair is emitted with the earlier one
                Some(j) if j < i => continue,
                Some(j) => {
                    let back = &self.edges[j];
                    let weaker = if back.class.strength < e.class.strength {
                        back
                    } else {
                        e
                    };
                    let label = format!("{} / {}", edge_label(e), edge_label(back));
                    let _ = writeln!(
                        out,
                        "  {} -> {} [{}, dir=both];",
                        quote(&e.source),
                        quote(&e.target),
                        edge_attrs(weaker, label)
                    );
                }
                None => {
                    let _ = writeln!(
                        out,
                        "  {} -> {} [{}];",
                        quote(&e.source),
                        quote(&e.target),
                        edge_attrs(e, edge_label(e))
                    );
                }
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{Orientation, PairTables};

    fn printed_hmatrix() -> HMatrix {
        let tables =
            PairTables::parse_csv(include_str!("../../../fixtures/term_pairs.csv")).unwrap();
        HMatrix::from_tables(tables).unwrap()
    }

    fn edge(source: &str, target: &str, kind: EdgeKind, h: f64, strength: Strength) -> Edge {
        Edge {
            source: source.into(),
            target: target.into(),
            kind,
            point_h: h,
            eta_low: None,
            class: ImplicationClass {
                strength,
                orientation: match kind {
                    EdgeKind::Implication => Orientation::Implication,
                    EdgeKind::Exclusion => Orientation::Exclusion,
                },
            },
            stage: Stage::Descriptive,
        }
    }

    #[test]
    fn printed_descriptive_edges() {
        let g = build_descriptive_graph(
            &printed_hmatrix(),
            &ClassificationThresholds::default(),
            0.20,
        );
        let e = g
            .find("The number", "The Sign", EdgeKind::Implication)
            .unwrap();
        assert_eq!((e.point_h * 100.0).round() / 100.0, 0.70);
        assert_eq!(e.class.strength, Strength::Quasi);
        let a = g
            .find("The number", "Substantive", EdgeKind::Implication)
            .unwrap();
        let b = g
            .find("Substantive", "The number", EdgeKind::Implication)
            .unwrap();
        assert_eq!(a.class.strength, Strength::Tendency);
        assert_eq!(b.class.strength, Strength::Tendency);
        assert!(g
            .find("The Sign", "The numbers", EdgeKind::Implication)
            .is_none());
        assert!(g.edges.iter().all(|e| e.point_h >= 0.20));
    }

    #[test]
    fn exclusion_edges_are_canonical() {
        let tables = PairTables::parse_csv("a,b,n11,n10,n01,n00\nz,y,0,5,5,10\n").unwrap();
        let hm = HMatrix::from_tables(tables).unwrap();
        let g = build_descriptive_graph(&hm, &ClassificationThresholds::default(), 0.20);
        let ex: Vec<_> = g
            .edges
            .iter()
            .filter(|e| e.kind == EdgeKind::Exclusion)
            .collect();
        assert_eq!(ex.len(), 1);
        assert_eq!((ex[0].source.as_str(), ex[0].target.as_str()), ("y", "z"));
    }

    #[test]
    fn absence_matrix_has_no_edges() {
        let tables = PairTables::parse_csv("a,b,n11,n10,n01,n00\nx,y,10,10,10,10\n").unwrap();
        let hm = HMatrix::from_tables(tables).unwrap();
        let g = build_descriptive_graph(&hm, &ClassificationThresholds::default(), 0.20);
        assert_eq!(g.nodes, ["x", "y"]);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn dot_styles() {
        let g = ImplicativeGraph {
            nodes: vec!["The number".into(), "The Sign".into()],
            edges: vec![edge(
                "The number",
                "The Sign",
                EdgeKind::Implication,
                0.696,
                Strength::Quasi,
            )],
        };
        let dot = g.to_dot();
        assert!(
            dot.contains("\"The number\" -> \"The Sign\" [label=\"H=0.70\", style=solid];"),
            "{dot}"
        );

        let g = ImplicativeGraph {
            nodes: vec!["a".into(), "b".into()],
            edges: vec![edge("a", "b", EdgeKind::Exclusion, 0.5, Strength::Tendency)],
        };
        assert!(g.to_dot().contains("dir=none, style=dashed"));

        let g = ImplicativeGraph {
            nodes: vec!["a".into(), "b".into()],
            edges: vec![edge(
                "a",
                "b",
                EdgeKind::Implication,
                0.5,
                Strength::Tendency,
            )],
        };
        assert!(g.to_dot().contains("style=dotted"));
    }

    #[test]
    fn dot_inductive_label() {
        let mut e = edge("a", "b", EdgeKind::Implication, 0.696, Strength::Quasi);
        e.eta_low = Some(0.634);
        e.stage = Stage::Inductive;
        let g = ImplicativeGraph {
            nodes: vec!["a".into(), "b".into()],
            edges: vec![e],
        };
        assert!(g.to_dot().contains("H=0.70\\nη̲=0.63"));
    }

    #[test]
    fn dot_empty_graph() {
        let g = ImplicativeGraph {
            nodes: vec!["a".into(), "b".into()],
            edges: vec![],
        };
        assert_eq!(g.to_dot(), "digraph implicative {\n  \"a\";\n  \"b\";\n}\n");
    }

    #[test]
    fn merged_equivalences() {
        let g = ImplicativeGraph {
            nodes: vec!["a".into(), "b".into()],
            edges: vec![
                edge("a", "b", EdgeKind::Implication, 0.75, Strength::Quasi),
                edge("b", "a", EdgeKind::Implication, 0.45, Strength::Tendency),
            ],
        };
        assert_eq!(g.to_dot().matches(" -> ").count(), 2);
        let merged = g.to_dot_with(DotOptions {
            merge_equivalences: true,
        });
        assert_eq!(merged.matches(" -> ").count(), 1);
        assert!(merged.contains("dir=both"));
        assert!(merged.contains("style=dotted"));
    }

    #[test]
    fn json_empty_and_round_trip() {
        assert_eq!(
            ImplicativeGraph::default().to_json().unwrap(),
            r#"{"nodes":[],"edges":[]}"#
        );
        let g = build_descriptive_graph(
            &printed_hmatrix(),
            &ClassificationThresholds::default(),
            0.20,
        );
        let back = ImplicativeGraph::from_json(&g.to_json().unwrap()).unwrap();
        assert_eq!(back, g);
    }
}
