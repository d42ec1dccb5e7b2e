//! Byte-deterministic report serialization.
//!
//! Emitted artifacts (JSON reports, CSV tables) must be reproducible byte
//! for byte from the same inputs, so floats are written with a fixed
//! 12-significant-digit scientific format and struct keys in a fixed
//! order, instead of going through a general-purpose serializer.

use crate::bunching::BunchingResult;
use crate::capability::CapabilityReport;
use crate::photon_stats::{PhotonNumberDistribution, SourceSummary};
use crate::wigner::{AttenuationFit, NegativeRegionStructure};

/// Fixed 12-significant-digit float format used in every emitted artifact.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

fn float_array(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|&v| fmt_float(v)).collect();
    format!("[{}]", items.join(","))
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// `{"probs": [...], "normalized": true}`
pub fn distribution_json(d: &PhotonNumberDistribution) -> String {
    format!(
        "{{\"probs\":{},\"normalized\":{}}}",
        float_array(d.probs()),
        d.is_normalized()
    )
}

/// `{"Q": [...], "success": s, "output": [...]}`
pub fn bunching_json(b: &BunchingResult) -> String {
    format!(
        "{{\"Q\":{},\"success\":{},\"output\":{}}}",
        float_array(b.q()),
        fmt_float(b.success_probability()),
        float_array(b.output().probs())
    )
}

pub fn regions_json(r: &NegativeRegionStructure) -> String {
    format!(
        "{{\"region_count\":{},\"origin_negative\":{},\"root_radii\":{}}}",
        r.region_count,
        r.origin_negative,
        float_array(&r.root_radii)
    )
}

pub fn capability_json(r: &CapabilityReport) -> String {
    let passes: Vec<String> = r.passes.iter().map(|p| p.to_string()).collect();
    let regions: Vec<String> = r.region_counts.iter().map(regions_json).collect();
    let diagnostics: Vec<String> = r
        .diagnostics
        .iter()
        .map(|d| format!("\"{}\"", escape(d)))
        .collect();
    format!(
        "{{\"capability\":{},\"n_max\":{},\"choices\":{},\"seed\":{},\"passes\":[{}],\"region_counts\":[{}],\"diagnostics\":[{}]}}",
        r.capability,
        r.n_max,
        r.choices,
        r.seed,
        passes.join(","),
        regions.join(","),
        diagnostics.join(",")
    )
}

/// Human-readable capability table.
pub fn capability_table(r: &CapabilityReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("capability: {}\n", r.capability));
    out.push_str(&format!(
        "n_max: {}  choices: {}  seed: {}\n",
        r.n_max, r.choices, r.seed
    ));
    out.push_str("   n  pass  regions  origin\n");
    for (i, pass) in r.passes.iter().enumerate() {
        let regions = &r.region_counts[i];
        out.push_str(&format!(
            "{:4}  {:4}  {:7}  {}\n",
            i + 1,
            if *pass { "yes" } else { "no" },
            regions.region_count,
            if regions.origin_negative { "negative" } else { "positive" }
        ));
    }
    for d in &r.diagnostics {
        out.push_str(&format!("note: {d}\n"));
    }
    out
}

/// CSV rows `eta,capability`.
pub fn sweep_csv(rows: &[(f64, usize)]) -> String {
    let mut out = String::from("eta,capability\n");
    for (eta, cap) in rows {
        out.push_str(&format!("{},{cap}\n", fmt_float(*eta)));
    }
    out
}

/// CSV rows `r,2piW` of a radial Wigner cut.
pub fn wigner_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("r,2piW\n");
    for (r, w) in points {
        out.push_str(&format!("{},{}\n", fmt_float(*r), fmt_float(*w)));
    }
    out
}

pub fn fit_json(fit: &AttenuationFit, n: usize) -> String {
    format!(
        "{{\"n\":{},\"eta\":{},\"residual\":{}}}",
        n,
        fmt_float(fit.eta),
        fmt_float(fit.residual)
    )
}

pub fn g2_json(g2: f64) -> String {
    format!("{{\"g2\":{}}}", fmt_float(g2))
}

pub fn summary_json(s: &SourceSummary) -> String {
    format!(
        "{{\"p1\":{},\"p2plus\":{},\"g2\":{},\"origin_negativity\":{}}}",
        fmt_float(s.p1),
        fmt_float(s.p2plus),
        fmt_float(s.g2),
        fmt_float(s.origin_negativity)
    )
}
