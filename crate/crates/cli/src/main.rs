//! `dragon`: generate, render and verify paperfolding polygons.

mod svg;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use dragon_core::checks::{
    condition_catalog, condition_roots, format_lemma11_row, lemma11_default_alphas, lemma11_table,
    verify_hull_invariance, verify_polygon_in_hull, verify_separation, LEMMA11_HEADER,
};
use dragon_core::hull::{boundary_polyline, build_hull, transform_hull};
use dragon_core::intersect::{
    empirical_critical_angle, find_contacts, theorem1_boundary_checks, ContactKind, DEFAULT_CONTACT_TOL,
};
use dragon_core::polygon::{make_pi0, make_pi1};
use dragon_core::{generate_recursive, params_from_alpha, AngleParams, Point};
use log::warn;
use serde::Serialize;
use serde_json::json;

use crate::svg::{Layer, LayerKind};

/// Exit status for a verification that ran but did not pass.
const EXIT_VERIFY_FAILED: u8 = 2;
/// Exit status for bad arguments and runtime errors.
const EXIT_USAGE: u8 = 1;

#[derive(Parser, Debug)]
#[command(name = "dragon", version, about = "Paperfolding polygons for arbitrary unfolding angles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the vertices of Q_n.
    Generate {
        /// Unfolding angle in degrees.
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        /// Iteration level n (2^n segments).
        #[arg(long)]
        level: u32,
        #[arg(long, value_enum, default_value_t = DataFormat::Tsv)]
        format: DataFormat,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw Q_n as SVG.
    Render {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        level: u32,
        /// Overlay the hull boundary.
        #[arg(long)]
        hull: bool,
        /// Overlay the two half-hulls pi_0(hull) and pi_1(hull).
        #[arg(long)]
        split: bool,
        /// Mark contacts between non-adjacent segments.
        #[arg(long)]
        contacts: bool,
        /// Boundary samples per spiral turn.
        #[arg(long, default_value_t = 180)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites; exit 0 on pass, 2 on failure.
    Verify {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Boundary samples per spiral turn.
        #[arg(long, default_value_t = 720)]
        samples: usize,
        /// Level used by the containment suite.
        #[arg(long, default_value_t = 12)]
        level: u32,
        /// Level used by the end-segment suite.
        #[arg(long, default_value_t = 10)]
        theorem_level: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover the critical angles of every catalogued condition.
    Thresholds {
        #[arg(long, value_enum, default_value_t = TextFormat::Text)]
        format: TextFormat,
        /// Skip the empirical level-10 crossing search.
        #[arg(long)]
        no_empirical: bool,
    },
    /// Print the gap-condition table around 96.24 degrees.
    TableLemma11 {
        #[arg(long, value_enum, default_value_t = TextFormat::Text)]
        format: TextFormat,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum DataFormat {
    Tsv,
    Json,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum TextFormat {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Suite {
    HullInvariance,
    Containment,
    Separation,
    Theorem1,
    All,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn,dragon_core=error"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                // A closed reader (e.g. `| head`) is not an error.
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                r => Ok(r?),
            }
        }
    }
}

/// Returns whether the command passed (only `verify` can fail softly).
fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Generate {
            alpha,
            level,
            format,
            out,
        } => {
            let params = params_from_alpha(alpha)?;
            let poly = generate_recursive(level, &params)?;
            let text = match format {
                DataFormat::Tsv => vertices_tsv(&poly.vertices),
                DataFormat::Json => {
                    let doc = json!({
                        "config": { "command": "generate", "alpha_deg": alpha, "level": level },
                        "params": params,
                        "vertices": poly.vertices.iter().map(|p| [clean(p.x), clean(p.y)]).collect::<Vec<_>>(),
                    });
                    serde_json::to_string_pretty(&doc)? + "\n"
                }
            };
            emit(out.as_ref(), &text)?;
            Ok(true)
        }
        Command::Render {
            alpha,
            level,
            hull,
            split,
            contacts,
            samples,
            out,
        } => {
            let params = params_from_alpha(alpha)?;
            let text = render(&params, level, hull, split, contacts, samples)?;
            emit(out.as_ref(), &text)?;
            Ok(true)
        }
        Command::Verify {
            alpha,
            suite,
            samples,
            level,
            theorem_level,
            out,
        } => {
            let params = params_from_alpha(alpha)?;
            if !params.in_hull_window() {
                warn!("alpha = {alpha} is outside [90, 108]; hull results are not meaningful there");
            }
            let (doc, pass) = verify(&params, suite, samples, level, theorem_level)?;
            emit(out.as_ref(), &(serde_json::to_string_pretty(&doc)? + "\n"))?;
            Ok(pass)
        }
        Command::Thresholds { format, no_empirical } => {
            emit(None, &thresholds(format, !no_empirical)?)?;
            Ok(true)
        }
        Command::TableLemma11 { format } => {
            let rows = lemma11_table(&lemma11_default_alphas())?;
            let text = match format {
                TextFormat::Text => {
                    let mut text = format!("{LEMMA11_HEADER}\n");
                    for r in &rows {
                        text += &format_lemma11_row(r);
                        text.push('\n');
                    }
                    text
                }
                TextFormat::Json => serde_json::to_string_pretty(&rows)? + "\n",
            };
            emit(None, &text)?;
            Ok(true)
        }
    }
}

/// Maps negative zero to zero.
fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

/// `%.17g`: 17 significant digits, trailing zeros dropped.
fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    } else {
        let m = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn vertices_tsv(vertices: &[Point]) -> String {
    let mut s = String::with_capacity(vertices.len() * 48);
    for (i, p) in vertices.iter().enumerate() {
        s.push_str(&format!("{i}\t{}\t{}\n", fmt_g17(p.x), fmt_g17(p.y)));
    }
    s
}

fn render(params: &AngleParams, level: u32, hull: bool, split: bool, contacts: bool, samples: usize) -> Result<String> {
    let poly = generate_recursive(level, params)?;
    let base = build_hull(params);
    let min_radius = 1e-4;
    let mut layers = Vec::new();
    if hull {
        layers.push(Layer {
            class: "hull",
            kind: LayerKind::ClosedPath {
                points: boundary_polyline(&base, samples, min_radius),
                stroke: "#1f5fa8",
                fill: "#9cc3ea",
            },
        });
    }
    if split {
        for (class, map, colour) in [
            ("hull-pi0", make_pi0(params), "#2e8b57"),
            ("hull-pi1", make_pi1(params), "#c0504d"),
        ] {
            layers.push(Layer {
                class,
                kind: LayerKind::ClosedPath {
                    points: boundary_polyline(&transform_hull(&base, &map), samples, min_radius),
                    stroke: colour,
                    fill: colour,
                },
            });
        }
    }
    layers.push(Layer {
        class: "curve",
        kind: LayerKind::Polyline {
            points: poly.vertices.clone(),
            stroke: "black",
        },
    });
    if contacts && level >= 1 {
        let report = find_contacts(&poly, DEFAULT_CONTACT_TOL)?;
        for (kind, class, fill) in [
            (ContactKind::ProperCrossing, "crossing", "red"),
            (ContactKind::EndpointOnInterior, "touch", "orange"),
            (ContactKind::VertexCoincidence, "coincidence", "purple"),
        ] {
            let points: Vec<Point> = report.events.iter().filter(|e| e.kind == kind).map(|e| e.location).collect();
            if !points.is_empty() {
                layers.push(Layer {
                    class,
                    kind: LayerKind::Markers { points, fill },
                });
            }
        }
    }
    let title = format!("Q_{level} at alpha = {}", params.alpha_deg);
    Ok(svg::render(&layers, &title))
}

fn verify(
    params: &AngleParams,
    suite: Suite,
    samples: usize,
    level: u32,
    theorem_level: u32,
) -> Result<(serde_json::Value, bool)> {
    let wants = |s: Suite| suite == Suite::All || suite == s;
    let mut reports = Vec::new();
    let mut pass = true;
    if wants(Suite::HullInvariance) {
        let r = verify_hull_invariance(params, samples);
        pass &= r.pass;
        reports.push(json!({ "suite": Suite::HullInvariance, "pass": r.pass, "min_margin": r.min_margin, "report": r }));
    }
    if wants(Suite::Containment) {
        let r = verify_polygon_in_hull(level, params)?;
        pass &= r.pass;
        reports.push(json!({ "suite": Suite::Containment, "pass": r.pass, "min_margin": r.min_margin, "report": r }));
    }
    if wants(Suite::Separation) {
        let r = verify_separation(params, samples);
        pass &= r.pass;
        reports.push(json!({ "suite": Suite::Separation, "pass": r.pass, "min_margin": r.min_margin, "report": r }));
    }
    if wants(Suite::Theorem1) {
        let r = theorem1_boundary_checks(theorem_level, params)?;
        let min = r.checks.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);
        pass &= r.pass;
        reports.push(json!({ "suite": Suite::Theorem1, "pass": r.pass, "min_margin": min, "report": r }));
    }
    let doc = json!({
        "config": {
            "command": "verify",
            "alpha_deg": params.alpha_deg,
            "suite": suite,
            "samples_per_turn": samples,
            "containment_level": level,
            "theorem_level": theorem_level,
        },
        "params": params,
        "pass": pass,
        "reports": reports,
    });
    Ok((doc, pass))
}

#[derive(Serialize)]
struct ThresholdRow {
    id: &'static str,
    quoted: Option<&'static str>,
    roots: Vec<(f64, f64)>,
}

fn thresholds(format: TextFormat, empirical: bool) -> Result<String> {
    let mut rows = Vec::new();
    for c in condition_catalog() {
        let roots = condition_roots(c.id, 75.0, 170.0, 0.25, 1e-6)?
            .into_iter()
            .map(|t| (t.critical_alpha_deg, t.critical_q))
            .collect();
        rows.push(ThresholdRow {
            id: c.id,
            quoted: c.quoted.map(|q| q.text),
            roots,
        });
    }
    let crossing = if empirical {
        Some(empirical_critical_angle(10, [93.0, 97.0], 1e-3)?)
    } else {
        None
    };
    let root_of = |id: &str| {
        rows.iter()
            .find(|r| r.id == id)
            .and_then(|r| r.roots.iter().map(|x| x.0).find(|a| (90.0..=108.0).contains(a)))
    };
    let proven = root_of("P3-main");
    let gap = root_of("L11");

    if let TextFormat::Json = format {
        let doc = json!({
            "config": { "command": "thresholds", "scan": [75.0, 170.0, 0.25], "tol": 1e-6 },
            "conditions": rows,
            "empirical_level10": crossing,
        });
        return Ok(serde_json::to_string_pretty(&doc)? + "\n");
    }

    let mut s = String::new();
    s.push_str(&format!("{:<10} {:<26} {}\n", "condition", "quoted", "sign changes (alpha deg, q)"));
    for r in &rows {
        let roots = if r.roots.is_empty() {
            "none in [75, 170]".to_string()
        } else {
            r.roots
                .iter()
                .map(|(a, q)| format!("{a:.3} ({q:.7})"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        s.push_str(&format!("{:<10} {:<26} {}\n", r.id, r.quoted.unwrap_or("-"), roots));
    }
    if let Some(b) = crossing {
        s.push_str(&format!(
            "{:<10} {:<26} crossing onset at level 10 in [{:.3}, {:.3}]\n",
            "empirical", "-", b.alpha_lo, b.alpha_hi
        ));
    }
    s.push('\n');
    let fmt = |x: Option<f64>| x.map_or("?".to_string(), |v| format!("{v:.3}"));
    let onset = crossing.map(|b| b.alpha_hi);
    s.push_str("bands:\n");
    for (range, label) in [
        (format!("[90, {}]", fmt(onset)), "crossings found at level 10"),
        (format!("({}, {})", fmt(onset), fmt(gap)), "undecided"),
        (format!("[{}, {})", fmt(gap), fmt(proven)), "gap condition holds (not a proof)"),
        (format!("[{}, 108]", fmt(proven)), "proven free of intersections"),
    ] {
        s.push_str(&format!("  {range:<18} {label}\n"));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_formatting() {
        assert_eq!(fmt_g17(0.0), "0");
        assert_eq!(fmt_g17(-0.0), "0");
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(0.5), "0.5");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(-0.25), "-0.25");
        assert_eq!(fmt_g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(fmt_g17(123456.0), "123456");
        assert_eq!(fmt_g17(1e20), "1e+20");
    }

    #[test]
    fn g17_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-12, 0.6715514, 1e300, 5e-324] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }
}
