use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};

use crate::config::RunConfig;

/// First line of every table this tool writes.
pub fn header_comment(cfg: &RunConfig, extra: &[(&str, String)]) -> String {
    let mut line = format!(
        "# ppp config_sha256={} entropy_policy={} context_scope={}",
        cfg.hash(),
        cfg.entropy_policy,
        cfg.context_scope
    );
    for (k, v) in extra {
        line.push_str(&format!(" {k}={v}"));
    }
    line
}

/// Shortest round-trip form; scientific notation outside [1e-4, 1e6).
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "NA".into();
    }
    let a = x.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) || a.is_infinite() {
        format!("{}", x + 0.0)
    } else {
        format!("{x:e}")
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".into(), num)
}

/// Keeps free text on one cell of a tab- or comma-separated line.
pub fn cell(s: &str) -> String {
    s.chars()
        .map(|c| if matches!(c, '\t' | '\n' | '\r' | ',') { ' ' } else { c })
        .collect()
}

/// Writes a comment line, a column header and rows.
pub fn write_table(path: &Path, comment: &str, sep: char, columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    let sep_s = sep.to_string();
    writeln!(out, "{comment}")?;
    writeln!(out, "{}", columns.join(&sep_s))?;
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        writeln!(out, "{}", row.join(&sep_s))?;
    }
    out.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Reader for the tables written by [`write_table`] and for input TSVs.
pub fn tsv_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .comment(Some(b'#'))
        .from_reader(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(6.938353e-8), "6.938353e-8");
        assert_eq!(num(f64::NAN), "NA");
        assert_eq!(num(1234.5), "1234.5");
        for x in [1.0 / 3.0, 2.5e-17, 7.0e9, -0.0012] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn cells_stay_single() {
        assert_eq!(cell("a\tb,c\nd"), "a b c d");
    }
}
