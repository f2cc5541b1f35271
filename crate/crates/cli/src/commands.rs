use std::path::{Path, PathBuf};

use galimp::bayes::BoundReport;
use galimp::{
    binarize as binarize_table, build_descriptive_graph, induce as induce_graph, parse_context_csv,
    parse_observations, parse_symbolic_table, ConceptLattice, DotOptions, FormalContext, HMatrix,
    ImplicativeGraph, PairTables,
};
use serde::{Deserialize, Serialize};

use crate::config::{Format, PipelineConfig};
use crate::{read_text, write_text, CliError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub stage: String,
    pub format: Format,
    /// Relative to the output directory.
    pub path: String,
    pub bytes: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub versions: Versions,
    pub config: PipelineConfig,
    pub artifacts: Vec<Artifact>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Versions {
    pub galimp: String,
    pub cli: String,
}

struct Output<'a> {
    dir: &'a Path,
    emit: &'a [Format],
    artifacts: Vec<Artifact>,
}

impl<'a> Output<'a> {
    fn new(cfg: &'a PipelineConfig) -> Result<Self, CliError> {
        Ok(Output {
            dir: cfg.out_dir()?,
            emit: &cfg.emit,
            artifacts: Vec::new(),
        })
    }

    fn write(
        &mut self,
        stage: &str,
        format: Format,
        name: &str,
        text: impl FnOnce() -> Result<String, CliError>,
    ) -> Result<(), CliError> {
        if !self.emit.contains(&format) {
            return Ok(());
        }
        let mut text = text()?;
        if !text.ends_with('\n') {
            text.push('\n');
        }
        write_text(&self.dir.join(name), &text)?;
        self.artifacts.push(Artifact {
            stage: stage.into(),
            format,
            path: name.into(),
            bytes: text.len(),
        });
        Ok(())
    }
}

fn reorder(ctx: FormalContext, order: Option<&[String]>) -> Result<FormalContext, CliError> {
    Ok(match order {
        Some(order) => ctx.reorder_attributes(order)?,
        None => ctx,
    })
}

fn symbolic_to_context(path: &Path, order: Option<&[String]>) -> Result<FormalContext, CliError> {
    let table = parse_symbolic_table(&read_text(path)?)?;
    reorder(binarize_table(&table), order)
}

pub fn binarize(input: &Path, output: &Path, order: Option<&[String]>) -> Result<(), CliError> {
    let ctx = symbolic_to_context(input, order)?;
    write_text(output, &ctx.to_csv()?)?;
    println!(
        "{} objects × {} attributes",
        ctx.object_count(),
        ctx.attribute_count()
    );
    Ok(())
}

pub fn lattice(context: &Path, json: Option<&Path>, dot: Option<&Path>) -> Result<(), CliError> {
    let ctx = parse_context_csv(&read_text(context)?)?;
    let lattice = ConceptLattice::from_context(&ctx);
    if let Some(p) = json {
        write_text(p, &with_newline(lattice.to_json(&ctx)?))?;
    }
    if let Some(p) = dot {
        write_text(p, &lattice.to_dot(&ctx))?;
    }
    if json.is_none() && dot.is_none() {
        println!("{}", lattice.to_json(&ctx)?);
    } else {
        println!(
            "{} concepts, {} covers",
            lattice.len(),
            lattice.covers().len()
        );
    }
    Ok(())
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn load_tables(cfg: &PipelineConfig) -> Result<PairTables, CliError> {
    let tables = match (&cfg.observations, &cfg.tables) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "pass either observations or tables, not both".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Usage(
                "no usage input: pass --observations or --tables".into(),
            ))
        }
        (None, Some(path)) => {
            if cfg.population.is_some() {
                return Err(CliError::Usage(
                    "population only applies to an observation log".into(),
                ));
            }
            PairTables::parse_csv(&read_text(path)?)?
        }
        (Some(path), None) => {
            let text = read_text(path)?;
            let usage = match cfg.population {
                Some(n) => parse_observations(&text, n)?,
                None => {
                    let usage = parse_observations(&text, usize::MAX)?;
                    let n = usage.users().len();
                    eprintln!(
                        "warning: no population given; using the {n} distinct users of the log, \
                         so no user counts as using neither term"
                    );
                    usage.with_population(n)?
                }
            };
            PairTables::from_usage(&usage)
        }
    };
    if tables.terms().len() < 2 {
        return Err(CliError::Usage(format!(
            "need ≥ 2 terms, found {}",
            tables.terms().len()
        )));
    }
    Ok(tables)
}

struct Described {
    tables: PairTables,
    graph: ImplicativeGraph,
}

fn describe_into(
    cfg: &PipelineConfig,
    tables: PairTables,
    out: &mut Output,
) -> Result<Described, CliError> {
    let th = cfg.thresholds()?;
    if !cfg.h_floor.is_finite() {
        return Err(CliError::Usage(format!(
            "h-floor must be finite, got {}",
            cfg.h_floor
        )));
    }
    let hm = HMatrix::from_tables(tables.clone())?;
    let graph = build_descriptive_graph(&hm, &th, cfg.h_floor);
    out.write("describe", Format::Csv, "contingency.csv", || {
        Ok(tables.to_csv()?)
    })?;
    out.write("describe", Format::Csv, "h_matrix.csv", || {
        Ok(hm.to_layout_csv())
    })?;
    out.write("describe", Format::Json, "h_matrix.json", || {
        Ok(hm.to_json(&th)?)
    })?;
    out.write("describe", Format::Json, "descriptive_graph.json", || {
        Ok(graph.to_json()?)
    })?;
    let opts = DotOptions {
        merge_equivalences: cfg.merge_equivalences,
    };
    out.write("describe", Format::Dot, "descriptive_graph.dot", || {
        Ok(graph.to_dot_with(opts))
    })?;
    Ok(Described { tables, graph })
}

fn induce_into(
    cfg: &PipelineConfig,
    described: &Described,
    out: &mut Output,
) -> Result<(), CliError> {
    let th = cfg.thresholds()?;
    let bayes = cfg.bayes()?;
    let induction = induce_graph(&described.graph, &described.tables, &bayes, &th)?;
    let report = induction.report(&described.tables, &bayes);
    out.write("induce", Format::Json, "bounds.json", || {
        Ok(report.to_json()?)
    })?;
    out.write("induce", Format::Csv, "bounds.csv", || bounds_csv(&report))?;
    out.write("induce", Format::Json, "inductive_graph.json", || {
        Ok(induction.graph.to_json()?)
    })?;
    let opts = DotOptions {
        merge_equivalences: cfg.merge_equivalences,
    };
    out.write("induce", Format::Dot, "inductive_graph.dot", || {
        Ok(induction.graph.to_dot_with(opts))
    })?;
    let retained = induction.evaluations.iter().filter(|e| e.retained).count();
    println!(
        "{retained} of {} evaluated relations retained",
        induction.evaluations.len()
    );
    Ok(())
}

fn bounds_csv(report: &BoundReport) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Usage(e.to_string());
    w.write_record([
        "a",
        "b",
        "quadrant",
        "point_h",
        "eta_low",
        "mc_stderr",
        "retained",
        "class",
    ])
    .map_err(csv_err)?;
    for p in &report.pairs {
        for (q, c) in &p.quadrants {
            w.write_record([
                p.a.clone(),
                p.b.clone(),
                q.name().to_string(),
                c.point_h.to_string(),
                c.eta_low.to_string(),
                c.mc_stderr.to_string(),
                c.retained.to_string(),
                c.class.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("labels are UTF-8"))
}

pub fn describe(cfg: &PipelineConfig) -> Result<Vec<Artifact>, CliError> {
    let tables = load_tables(cfg)?;
    let mut out = Output::new(cfg)?;
    let d = describe_into(cfg, tables, &mut out)?;
    println!(
        "{} terms, {} descriptive edges",
        d.tables.terms().len(),
        d.graph.edges.len()
    );
    Ok(out.artifacts)
}

pub fn induce(cfg: &PipelineConfig) -> Result<Vec<Artifact>, CliError> {
    cfg.bayes()?;
    let tables = load_tables(cfg)?;
    let th = cfg.thresholds()?;
    let hm = HMatrix::from_tables(tables.clone())?;
    let graph = build_descriptive_graph(&hm, &th, cfg.h_floor);
    let mut out = Output::new(cfg)?;
    induce_into(cfg, &Described { tables, graph }, &mut out)?;
    Ok(out.artifacts)
}

fn absolute(p: &Option<PathBuf>) -> Result<Option<PathBuf>, CliError> {
    p.as_ref()
        .map(|p| {
            std::path::absolute(p).map_err(|source| CliError::Io {
                path: p.clone(),
                source,
            })
        })
        .transpose()
}

pub fn pipeline(cfg: &PipelineConfig) -> Result<(), CliError> {
    // validate everything before writing anything
    cfg.thresholds()?;
    cfg.bayes()?;
    let mut out = Output::new(cfg)?;
    if cfg.symbolic.is_some() && cfg.context.is_some() {
        return Err(CliError::Usage(
            "pass either a symbolic table or a context, not both".into(),
        ));
    }
    let has_usage = cfg.observations.is_some() || cfg.tables.is_some();
    if cfg.symbolic.is_none() && cfg.context.is_none() && (cfg.skip_stats || !has_usage) {
        return Err(CliError::Usage(
            "nothing to do: no context input and no usage input".into(),
        ));
    }
    let order = cfg.attribute_order.as_deref();
    let ctx = match (&cfg.symbolic, &cfg.context) {
        (Some(p), _) => {
            let ctx = symbolic_to_context(p, order)?;
            out.write("binarize", Format::Csv, "context.csv", || Ok(ctx.to_csv()?))?;
            Some(ctx)
        }
        (_, Some(p)) => Some(reorder(parse_context_csv(&read_text(p)?)?, order)?),
        _ => None,
    };
    if let Some(ctx) = &ctx {
        let lattice = ConceptLattice::from_context(ctx);
        out.write("lattice", Format::Json, "lattice.json", || {
            Ok(lattice.to_json(ctx)?)
        })?;
        out.write("lattice", Format::Dot, "lattice.dot", || {
            Ok(lattice.to_dot(ctx))
        })?;
        println!(
            "{} concepts, {} covers",
            lattice.len(),
            lattice.covers().len()
        );
    }
    if !cfg.skip_stats {
        let tables = load_tables(cfg)?;
        let described = describe_into(cfg, tables, &mut out)?;
        induce_into(cfg, &described, &mut out)?;
    }

    let mut recorded = cfg.clone();
    recorded.symbolic = absolute(&cfg.symbolic)?;
    recorded.context = absolute(&cfg.context)?;
    recorded.observations = absolute(&cfg.observations)?;
    recorded.tables = absolute(&cfg.tables)?;
    recorded.out_dir = absolute(&cfg.out_dir)?;
    let manifest = Manifest {
        tool: "galimp".into(),
        versions: Versions {
            galimp: galimp::VERSION.into(),
            cli: env!("CARGO_PKG_VERSION").into(),
        },
        config: recorded,
        artifacts: out.artifacts,
    };
    let text =
        serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Usage(e.to_string()))?;
    write_text(&out.dir.join("manifest.json"), &with_newline(text))?;
    println!(
        "{} artifacts and manifest.json in {}",
        manifest.artifacts.len(),
        out.dir.display()
    );
    Ok(())
}

pub fn manifest_config(path: &Path) -> Result<PipelineConfig, CliError> {
    let manifest: Manifest = serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(manifest.config)
}
