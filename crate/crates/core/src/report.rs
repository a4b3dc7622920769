//! Report rendering: an aligned text table, or JSON with a fixed key order
//! and every float printed with 12 significant digits.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::experiment::{CatReport, ComparisonSummary, Empirical, Report, RestrictedMeasure};
use crate::observable::OutcomeDistribution;
use crate::rng::RNG_ALGORITHM;
use crate::verify::PropertyOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Format::Table),
            "json" => Ok(Format::Json),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros dropped,
/// exponent notation outside [1e-5, 1e12).
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        // JSON has no infinities; reports never carry them in practice
        return "null".to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn json_array(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|&x| format_number(x)).collect();
    format!("[{}]", items.join(", "))
}

fn json_nested(xs: &[Vec<f64>]) -> String {
    let items: Vec<String> = xs.iter().map(|x| json_array(x)).collect();
    format!("[{}]", items.join(", "))
}

fn report_json_body(r: &Report, out: &mut String) {
    let _ = writeln!(out, "  \"born\": {{");
    let _ = writeln!(out, "    \"outcomes\": {},", json_array(&r.born.outcomes));
    let _ = writeln!(out, "    \"probabilities\": {}", json_array(&r.born.probabilities));
    let _ = writeln!(out, "  }},");
    let _ = writeln!(out, "  \"collapsed_diag\": {},", json_array(&r.collapsed_diag));
    let _ = writeln!(out, "  \"restricted\": {{");
    let _ = writeln!(out, "    \"characters\": {},", json_nested(&r.restricted.characters));
    let _ = writeln!(out, "    \"weights\": {}", json_array(&r.restricted.weights));
    let _ = writeln!(out, "  }},");
    if let Some(e) = &r.empirical {
        let counts: Vec<String> = e.counts.iter().map(u64::to_string).collect();
        let _ = writeln!(out, "  \"empirical\": {{");
        let _ = writeln!(out, "    \"rng\": \"{RNG_ALGORITHM}\",");
        let _ = writeln!(out, "    \"trials\": {},", e.trials);
        let _ = writeln!(out, "    \"counts\": [{}],", counts.join(", "));
        let _ = writeln!(out, "    \"frequencies\": {}", json_array(&e.frequencies));
        let _ = writeln!(out, "  }},");
    }
    let _ = writeln!(out, "  \"max_deviation\": {},", format_number(r.max_deviation));
    let _ = write!(out, "  \"cross_terms\": {}", json_array(&r.cross_terms));
}

fn report_table(r: &Report, out: &mut String) {
    let _ = writeln!(out, "{:<20} {:>20} {:>20}", "outcome", "born", "collapsed");
    // outcomes are stored ascending; sort defensively for reports parsed from elsewhere
    let mut order: Vec<usize> = (0..r.born.outcomes.len()).collect();
    order.sort_by(|&a, &b| r.born.outcomes[a].total_cmp(&r.born.outcomes[b]));
    for k in order {
        let _ = writeln!(
            out,
            "{:<20} {:>20} {:>20}",
            format_number(r.born.outcomes[k]),
            format_number(r.born.probabilities[k]),
            r.collapsed_diag.get(k).map_or(String::new(), |&x| format_number(x)),
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<41} {:>20}", "restricted (spectrum point)", "weight");
    for (c, w) in r.restricted.characters.iter().zip(&r.restricted.weights) {
        let label: Vec<String> = c.iter().map(|&x| format_number(x)).collect();
        let _ = writeln!(
            out,
            "{:<41} {:>20}",
            format!("({})", label.join(", ")),
            format_number(*w)
        );
    }
    if let Some(e) = &r.empirical {
        let _ = writeln!(out);
        let _ = writeln!(out, "empirical: {} trials, rng {}", e.trials, RNG_ALGORITHM);
        for (k, (c, f)) in e.counts.iter().zip(&e.frequencies).enumerate() {
            let _ = writeln!(
                out,
                "{:<20} {:>20} {:>20}",
                format_number(r.born.outcomes[k]),
                c,
                format_number(*f)
            );
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "max_deviation {}", format_number(r.max_deviation));
    let worst = r.cross_terms.iter().copied().fold(0.0, f64::max);
    let _ = write!(
        out,
        "cross_terms   {} values, max {}",
        r.cross_terms.len(),
        format_number(worst)
    );
}

pub fn emit_report(r: &Report, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Json => {
            out.push_str("{\n");
            report_json_body(r, &mut out);
            out.push_str("\n}\n");
        }
        Format::Table => {
            report_table(r, &mut out);
            out.push('\n');
        }
    }
    out
}

pub fn emit_cat_report(r: &CatReport, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Json => {
            out.push_str("{\n");
            report_json_body(&r.report, &mut out);
            let checks: Vec<String> = r
                .expectation
                .iter()
                .map(|e| {
                    format!(
                        "{{\"superposition\": {}, \"mixture\": {}}}",
                        format_number(e.superposition),
                        format_number(e.mixture)
                    )
                })
                .collect();
            let _ = writeln!(out, ",\n  \"cat\": {{");
            let _ = writeln!(out, "    \"labels\": [\"{}\", \"{}\"],", r.labels[0], r.labels[1]);
            let _ = writeln!(out, "    \"weights\": {},", json_array(&r.weights));
            let _ = writeln!(out, "    \"expectation\": [{}],", checks.join(", "));
            let _ = writeln!(
                out,
                "    \"max_expectation_gap\": {}",
                format_number(r.max_expectation_gap)
            );
            out.push_str("  }\n}\n");
        }
        Format::Table => {
            report_table(&r.report, &mut out);
            let _ = writeln!(out);
            let _ = writeln!(out);
            for (label, w) in r.labels.iter().zip(r.weights) {
                let _ = writeln!(out, "{:<20} {:>20}", label, format_number(w));
            }
            let _ = writeln!(out, "max_expectation_gap {}", format_number(r.max_expectation_gap));
        }
    }
    out
}

pub fn emit_comparison(c: &ComparisonSummary, format: Format) -> String {
    match format {
        Format::Json => format!(
            "{{\n  \"dim\": {},\n  \"n_random\": {},\n  \"seed\": {},\n  \"rng\": \"{}\",\n  \"scenario_deviation\": {},\n  \"worst_deviation\": {},\n  \"mean_deviation\": {},\n  \"worst_case\": {}\n}}\n",
            c.dim,
            c.n_random,
            c.seed,
            RNG_ALGORITHM,
            format_number(c.scenario_deviation),
            format_number(c.worst_deviation),
            format_number(c.mean_deviation),
            c.worst_case
        ),
        Format::Table => format!(
            "dim                 {}\nrandom cases        {}\nseed                {}\nscenario deviation  {}\nworst deviation     {} (case {})\nmean deviation      {}\n",
            c.dim,
            c.n_random,
            c.seed,
            format_number(c.scenario_deviation),
            format_number(c.worst_deviation),
            c.worst_case,
            format_number(c.mean_deviation)
        ),
    }
}

pub fn emit_verify(results: &[PropertyOutcome], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Json => {
            let items: Vec<String> = results
                .iter()
                .map(|p| {
                    format!(
                        "  {{\"name\": \"{}\", \"passed\": {}, \"worst\": {}, \"bound\": {}}}",
                        p.name,
                        p.passed,
                        format_number(p.worst),
                        format_number(p.bound)
                    )
                })
                .collect();
            let _ = writeln!(out, "[\n{}\n]", items.join(",\n"));
        }
        Format::Table => {
            for p in results {
                let _ = writeln!(
                    out,
                    "{} {:<40} worst {:>20}  bound {}",
                    if p.passed { "PASS" } else { "FAIL" },
                    p.name,
                    format_number(p.worst),
                    format_number(p.bound)
                );
            }
        }
    }
    out
}

#[derive(Deserialize)]
struct BornDoc {
    outcomes: Vec<f64>,
    probabilities: Vec<f64>,
}

#[derive(Deserialize)]
struct RestrictedDoc {
    characters: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct EmpiricalDoc {
    trials: u64,
    counts: Vec<u64>,
    frequencies: Vec<f64>,
}

#[derive(Deserialize)]
struct ReportDoc {
    born: BornDoc,
    collapsed_diag: Vec<f64>,
    restricted: RestrictedDoc,
    #[serde(default)]
    empirical: Option<EmpiricalDoc>,
    max_deviation: f64,
    cross_terms: Vec<f64>,
}

/// Reads back the JSON produced by [`emit_report`] (extra keys are ignored,
/// so cat reports parse too).
pub fn parse_report(text: &str) -> Result<Report> {
    let doc: ReportDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(Report {
        born: OutcomeDistribution::new(doc.born.outcomes, doc.born.probabilities)?,
        collapsed_diag: doc.collapsed_diag,
        restricted: RestrictedMeasure {
            characters: doc.restricted.characters,
            weights: doc.restricted.weights,
        },
        empirical: doc.empirical.map(|e| Empirical {
            trials: e.trials,
            counts: e.counts,
            frequencies: e.frequencies,
        }),
        max_deviation: doc.max_deviation,
        cross_terms: doc.cross_terms,
    })
}
