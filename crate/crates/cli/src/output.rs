use std::io::Write;

use serde::Serialize;

use embedfair_core::pipeline::artifact::round_sig9;
use embedfair_core::{Graph, GroupScoreTable, IndividualScoreTable, SummaryReport};

use crate::{internal, Failure};

pub fn json<T: Serialize>(out: &mut impl Write, value: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(internal)?;
    writeln!(out).map_err(internal)
}

pub fn summary_json(s: &SummaryReport) -> SummaryReport {
    let mut s = s.clone();
    s.density = round_sig9(s.density);
    s.average_degree = round_sig9(s.average_degree);
    s.clustering_coefficient = round_sig9(s.clustering_coefficient);
    s
}

pub fn summary_table(out: &mut impl Write, s: &SummaryReport) -> std::io::Result<()> {
    writeln!(out, "nodes                   {}", s.n)?;
    writeln!(out, "edges                   {}", s.m)?;
    writeln!(out, "density                 {:.6}", s.density)?;
    writeln!(out, "average degree          {:.4}", s.average_degree)?;
    writeln!(out, "clustering coefficient  {:.6}", s.clustering_coefficient)?;
    writeln!(out, "triangles               {}", s.triangle_count)?;
    writeln!(out, "components              {}", s.component_count)?;
    writeln!(out, "max degree              {}", s.max_degree)?;
    writeln!(out)?;
    writeln!(out, "degrees            count")?;
    let last = s.degree_histogram.len().saturating_sub(1);
    for (i, b) in s.degree_histogram.iter().enumerate() {
        let close = if i == last { ']' } else { ')' };
        let range = format!("[{:.2}, {:.2}{close}", b.lower, b.upper);
        writeln!(out, "{range:<18} {}", b.count)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct IndividualRow<'a> {
    id: &'a str,
    raw: f64,
    normalized: f64,
}

#[derive(Serialize)]
struct IndividualOutput<'a> {
    notion: &'static str,
    k: usize,
    rows: Vec<IndividualRow<'a>>,
}

pub fn individual(out: &mut impl Write, csv: bool, g: &Graph, t: &IndividualScoreTable) -> Result<(), Failure> {
    let rows: Vec<IndividualRow> = g
        .node_ids()
        .iter()
        .enumerate()
        .map(|(u, id)| IndividualRow {
            id,
            raw: round_sig9(t.raw[u]),
            normalized: round_sig9(t.normalized[u]),
        })
        .collect();
    if !csv {
        return json(
            out,
            &IndividualOutput {
                notion: "individual",
                k: t.hops,
                rows,
            },
        );
    }
    let mut w = || -> std::io::Result<()> {
        writeln!(out, "id,raw,normalized")?;
        for r in &rows {
            writeln!(out, "{},{},{}", csv_field(r.id), r.raw, r.normalized)?;
        }
        Ok(())
    };
    w().map_err(internal)
}

#[derive(Serialize)]
struct GroupRow<'a> {
    id: &'a str,
    score: f64,
}

#[derive(Serialize)]
struct GroupOutput<'a> {
    notion: &'static str,
    k: usize,
    attribute: &'a str,
    value: &'a str,
    attribute_bias: f64,
    network_bias: f64,
    rows: Vec<GroupRow<'a>>,
}

/// In CSV mode the two aggregate biases go to stderr so stdout stays a
/// plain table.
pub fn group(out: &mut impl Write, csv: bool, g: &Graph, t: &GroupScoreTable) -> Result<(), Failure> {
    let rows: Vec<GroupRow> = g
        .node_ids()
        .iter()
        .zip(&t.scores)
        .map(|(id, &s)| GroupRow {
            id,
            score: round_sig9(s),
        })
        .collect();
    let attribute_bias = round_sig9(t.attribute_bias);
    let network_bias = round_sig9(t.network.bias);
    if !csv {
        return json(
            out,
            &GroupOutput {
                notion: "group",
                k: t.k,
                attribute: &t.attribute,
                value: &t.value,
                attribute_bias,
                network_bias,
                rows,
            },
        );
    }
    let mut w = || -> std::io::Result<()> {
        writeln!(out, "id,score")?;
        for r in &rows {
            writeln!(out, "{},{}", csv_field(r.id), r.score)?;
        }
        Ok(())
    };
    w().map_err(internal)?;
    eprintln!("attribute_bias {attribute_bias}");
    eprintln!("network_bias {network_bias}");
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
