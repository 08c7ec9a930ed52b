//! CSV rendering with a `#`-prefixed metadata block, plus atomic writes.
//! Plots are not rendered here; the CSV is the contract.

use std::fs;
use std::io::Write;
use std::path::Path;

use hylink_core::link::HandoverEvent;
use hylink_core::sweep::SweepResult;

use crate::CliError;

/// Grid (first-column) values print as trimmed fixed-point; metric columns
/// print shortest round-trip so no precision is lost.
fn fmt_grid(v: f64) -> String {
    let s = format!("{v:.9}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn fmt_metric(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v}")
    }
}

/// The `#`-prefixed metadata block every emitted file carries; it holds
/// everything `verify` needs to recompute the fingerprint.
pub fn metadata_block(meta: &hylink_core::sweep::SweepMeta) -> String {
    let modes: Vec<&str> = meta.modes.iter().map(|m| m.name()).collect();
    let mut block = String::new();
    block.push_str(&format!("# {}\n", meta.tool_version));
    block.push_str(&format!("# kind: {}\n", meta.kind.name()));
    block.push_str(&format!("# seed: {}\n", meta.seed));
    block.push_str(&format!("# modes: {}\n", modes.join(",")));
    block.push_str(&format!(
        "# range: {}:{}:{}\n",
        fmt_grid(meta.range.start),
        fmt_grid(meta.range.stop),
        fmt_grid(meta.range.step)
    ));
    block.push_str(&format!(
        "# fading: {}\n",
        match meta.fading {
            hylink_core::rf::FadingMode::Deterministic => "deterministic",
            hylink_core::rf::FadingMode::Rayleigh => "rayleigh",
        }
    ));
    if let Some(h) = meta.config_hash {
        block.push_str(&format!("# config_hash: {h:016x}\n"));
    }
    block
}

/// Render a sweep result; includes the metadata block and the header line.
pub fn render_csv(result: &SweepResult) -> String {
    let mut out = metadata_block(&result.meta);
    out.push_str(&result.header.join(","));
    out.push('\n');
    for row in &result.rows {
        let mut first = true;
        for (i, v) in row.iter().enumerate() {
            if !first {
                out.push(',');
            }
            first = false;
            if i == 0 {
                out.push_str(&fmt_grid(*v));
            } else {
                out.push_str(&fmt_metric(*v));
            }
        }
        out.push('\n');
    }
    out
}

/// Render the handover event log under its parent sweep's metadata.
pub fn render_handover_csv(
    events: &[HandoverEvent],
    meta: &hylink_core::sweep::SweepMeta,
) -> String {
    let mut out = metadata_block(meta);
    out.push_str("time_s,ue_id,from,to,reason,sinr_before_db,sinr_after_db\n");
    for e in events {
        let from = e
            .from
            .as_ref()
            .map(|s| s.to_string())
            .unwrap_or_else(|| "none".to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt_grid(e.time_s),
            e.ue_id,
            from,
            e.to,
            e.reason,
            fmt_metric(e.sinr_before_db),
            fmt_metric(e.sinr_after_db),
        ));
    }
    out
}

/// Write through a sibling temp file and rename, so readers never observe a
/// half-written table.
pub fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    let tmp = path.with_extension("csv.tmp");
    {
        let mut f = fs::File::create(&tmp)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", tmp.display())))?;
        f.write_all(content.as_bytes())
            .map_err(|e| CliError::Runtime(format!("write failed: {e}")))?;
    }
    fs::rename(&tmp, path)
        .map_err(|e| CliError::Runtime(format!("cannot move into place: {e}")))?;
    Ok(())
}

/// Parse one `# key: value` metadata entry out of a rendered file.
pub fn metadata_value<'a>(content: &'a str, key: &str) -> Option<&'a str> {
    let prefix = format!("# {key}: ");
    content
        .lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.strip_prefix(prefix.as_str()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_formatting_trims_noise() {
        assert_eq!(fmt_grid(0.0), "0");
        assert_eq!(fmt_grid(150.0), "150");
        assert_eq!(fmt_grid(3.0 * 0.02), "0.06");
        assert_eq!(fmt_grid(12.8), "12.8");
    }

    #[test]
    fn metric_formatting_round_trips() {
        let v = 2.848788743727226e-6;
        assert_eq!(fmt_metric(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn metadata_lookup() {
        let doc = "# hylink 0.1.0\n# seed: 42\n# config_hash: 00ff\nx,y\n1,2\n";
        assert_eq!(metadata_value(doc, "seed"), Some("42"));
        assert_eq!(metadata_value(doc, "config_hash"), Some("00ff"));
        assert_eq!(metadata_value(doc, "missing"), None);
    }
}
