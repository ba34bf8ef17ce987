//! Text and machine renderings of reports.
//!
//! Text output prints probabilities with 9 decimals and matrices with 6.
//! Machine output is a `key=value` block followed by `# <name>` sections,
//! each a complete state file with 17 significant digits.

use std::fmt::Write;

use qstate_core::io::{format_density, format_number, format_state};
use qstate_core::{CMatrix, CheckReport, Complex64, DensityOperator, ScenarioReport};

pub fn probability(p: f64) -> String {
    format!("{p:.9}")
}

fn deviation(d: f64) -> String {
    format!("{d:.3e}")
}

/// Rounds to the printed precision so tiny negatives do not print as `-0`.
fn clean(x: f64) -> f64 {
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn entry(z: Complex64) -> String {
    format!("{:9.6}{:+.6}i", clean(z.re), clean(z.im))
}

pub fn matrix(m: &CMatrix, indent: &str) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| entry(m[(r, c)])).collect();
        let _ = writeln!(out, "{indent}[{} ]", row.join(" "));
    }
    out
}

pub fn check_text(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in reports {
        let _ = write!(
            out,
            "{} {:width$}  trials={} max_deviation={} tolerance={:e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.trials,
            deviation(r.max_deviation),
            r.tolerance,
        );
        if let Some(seed) = r.failing_seed {
            let _ = write!(
                out,
                " failing_seed={seed} (rerun with --trials 1 --seed {seed})"
            );
        }
        out.push('\n');
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    let _ = writeln!(out, "{passed}/{} checks passed", reports.len());
    out
}

pub fn check_machine(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(out, "check={}", r.name);
        let _ = writeln!(out, "{}.trials={}", r.name, r.trials);
        let _ = writeln!(
            out,
            "{}.max_deviation={}",
            r.name,
            format_number(r.max_deviation)
        );
        let _ = writeln!(out, "{}.tolerance={}", r.name, format_number(r.tolerance));
        let _ = writeln!(out, "{}.pass={}", r.name, r.pass);
        let seed = r.failing_seed.map_or("none".to_string(), |s| s.to_string());
        let _ = writeln!(out, "{}.failing_seed={seed}", r.name);
    }
    let _ = writeln!(out, "all_pass={}", reports.iter().all(|r| r.pass));
    out
}

fn verdict(report: &ScenarioReport) -> &'static str {
    if report.equivalence_verdict {
        "EQUIVALENT"
    } else {
        "NOT EQUIVALENT"
    }
}

fn branch_state(out: &mut String, title: &str, state: Option<&DensityOperator>) {
    match state {
        Some(rho) => {
            let _ = writeln!(out, "    {title}:");
            out.push_str(&matrix(rho.matrix(), "      "));
        }
        None => {
            let _ = writeln!(out, "    {title}: none (event cannot occur)");
        }
    }
}

pub fn scenario_text(report: &ScenarioReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario: {}", report.scenario);
    let _ = writeln!(
        out,
        "composite dims: {}",
        report.composite_state.structure()
    );
    out.push_str("branch weights:\n");
    for (label, w) in report.branch_labels.iter().zip(&report.branch_weights) {
        let _ = writeln!(out, "  weight({label}) = {}", probability(*w));
    }
    out.push_str("detector distribution:\n");
    for (label, p) in &report.detector_distribution {
        let _ = writeln!(out, "  P({label}) = {}", probability(*p));
    }
    for (k, label) in report.branch_labels.iter().enumerate() {
        let _ = writeln!(out, "branch {label}:");
        branch_state(
            &mut out,
            "collapse object state",
            report.cqm_object_states[k].as_ref(),
        );
        branch_state(
            &mut out,
            "relative object state",
            report.rsqm_object_states[k].as_ref(),
        );
    }
    out.push_str("unconditioned object state:\n");
    out.push_str(&matrix(report.object_state.matrix(), "  "));
    if !report.timeline.is_empty() {
        out.push_str("timeline:\n");
        for entry in &report.timeline {
            let _ = writeln!(out, "  {}: {}", entry.instant, entry.narrative);
            out.push_str(&matrix(entry.state.matrix(), "    "));
        }
    }
    let _ = writeln!(
        out,
        "reconstruction deviation = {}",
        deviation(report.reconstruction_deviation)
    );
    let _ = writeln!(out, "max deviation = {}", deviation(report.max_deviation));
    let _ = writeln!(
        out,
        "verdict: {} (tolerance {:e})",
        verdict(report),
        report.tolerance
    );
    out
}

pub fn scenario_machine(report: &ScenarioReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario={}", report.scenario);
    for (label, w) in report.branch_labels.iter().zip(&report.branch_weights) {
        let _ = writeln!(out, "weight.{label}={}", format_number(*w));
    }
    for (label, p) in &report.detector_distribution {
        let _ = writeln!(out, "probability.{label}={}", format_number(*p));
    }
    let _ = writeln!(
        out,
        "reconstruction_deviation={}",
        format_number(report.reconstruction_deviation)
    );
    let _ = writeln!(out, "max_deviation={}", format_number(report.max_deviation));
    let _ = writeln!(out, "tolerance={}", format_number(report.tolerance));
    let _ = writeln!(out, "verdict={}", verdict(report).replace(' ', "_"));
    out.push_str("# composite\n");
    out.push_str(&format_state(&report.composite_state));
    for (k, label) in report.branch_labels.iter().enumerate() {
        for (side, state) in [
            ("cqm", &report.cqm_object_states[k]),
            ("rsqm", &report.rsqm_object_states[k]),
        ] {
            if let Some(rho) = state {
                let _ = writeln!(out, "# {side}.{label}");
                out.push_str(&format_density(rho));
            }
        }
    }
    out.push_str("# object\n");
    out.push_str(&format_density(&report.object_state));
    for (i, entry) in report.timeline.iter().enumerate() {
        let _ = writeln!(out, "# timeline.{i} {}", entry.instant);
        out.push_str(&format_density(&entry.state));
    }
    out
}

/// Relative state computed by both paths.
pub struct RelativeReport {
    pub subject: usize,
    pub object: usize,
    pub probability: f64,
    pub direct: DensityOperator,
    pub via_pair: DensityOperator,
    pub max_deviation: f64,
}

pub fn relative_text(r: &RelativeReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "subject event on subsystem {}: probability = {}",
        r.subject + 1,
        probability(r.probability)
    );
    let _ = writeln!(
        out,
        "relative state of subsystem {} (direct):",
        r.object + 1
    );
    out.push_str(&matrix(r.direct.matrix(), "  "));
    let _ = writeln!(
        out,
        "relative state of subsystem {} (via object-subject pair):",
        r.object + 1
    );
    out.push_str(&matrix(r.via_pair.matrix(), "  "));
    let _ = writeln!(out, "max deviation = {}", deviation(r.max_deviation));
    out
}

pub fn relative_machine(r: &RelativeReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "subject={}", r.subject + 1);
    let _ = writeln!(out, "object={}", r.object + 1);
    let _ = writeln!(out, "probability={}", format_number(r.probability));
    let _ = writeln!(out, "max_deviation={}", format_number(r.max_deviation));
    out.push_str("# direct\n");
    out.push_str(&format_density(&r.direct));
    out.push_str("# via_pair\n");
    out.push_str(&format_density(&r.via_pair));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_zero_is_printed_as_zero() {
        assert_eq!(entry(Complex64::new(-1e-17, -3e-9)), " 0.000000+0.000000i");
        assert_eq!(entry(Complex64::new(0.5, -0.25)), " 0.500000-0.250000i");
    }

    #[test]
    fn probabilities_have_nine_decimals() {
        assert_eq!(probability(1.0), "1.000000000");
        assert_eq!(probability(0.5), "0.500000000");
    }
}
