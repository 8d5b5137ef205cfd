use anyhow::Result;
use ppp_core::metrics::{alignment_report, read_dump, Metric};

use crate::config::RunConfig;
use crate::inputs::load_corpus;

/// Findings of a validation run, one tab-separated line each.
#[derive(Debug, Default)]
pub struct Report {
    pub lines: Vec<String>,
    pub errors: usize,
    pub warnings: usize,
}

impl Report {
    fn error(&mut self, line: String) {
        self.errors += 1;
        self.lines.push(format!("error\t{line}"));
    }

    fn warn(&mut self, line: String) {
        self.warnings += 1;
        self.lines.push(format!("warning\t{line}"));
    }

    pub fn is_ok(&self) -> bool {
        self.errors == 0
    }
}

/// Checks every dump against the corpus: format and version, declared
/// context restriction, and key and surface coverage.
pub fn validate(cfg: &RunConfig) -> Result<Report> {
    cfg.check_paths()?;
    let corpus = load_corpus(cfg)?;
    let mut report = Report::default();
    report
        .lines
        .push(format!("corpus\t{}\ttokens\t{}", cfg.corpus_name, corpus.tokens.len()));
    for p in &cfg.dumps {
        let shown = p.display().to_string();
        let dump = match read_dump(&cfg.resolve(p)) {
            Ok(d) => d,
            Err(e) => {
                report.error(format!("{shown}\t{e}"));
                continue;
            }
        };
        let h = &dump.header;
        report.lines.push(format!(
            "dump\t{shown}\tmodel\t{}\tprompt\t{}\trecords\t{}",
            h.model_id,
            h.prompt_id,
            dump.records.len()
        ));
        match h.intra_sentential {
            None => report.warn(format!("{shown}\theader does not declare intra_sentential")),
            Some(false) => report.warn(format!("{shown}\tscores use context beyond the current sentence")),
            Some(true) => {}
        }
        for m in &cfg.metrics {
            if let Metric::Renyi(a) = m {
                if !h.alphas.contains(a) {
                    report.warn(format!("{shown}\theader does not declare Rényi order {a}"));
                }
            }
        }
        let align = alignment_report(&dump.records, &corpus.tokens);
        for key in &align.missing {
            report.error(format!("{shown}\tmissing\t{key}"));
        }
        for (key, corpus_surface, dump_surface) in &align.mismatched {
            report.error(format!(
                "{shown}\tsurface\t{key}\tcorpus={corpus_surface:?}\tdump={dump_surface:?}"
            ));
        }
        if align.extra > 0 {
            report.warn(format!("{shown}\t{} record(s) outside the corpus", align.extra));
        }
    }
    report.lines.push(format!(
        "summary\terrors\t{}\twarnings\t{}",
        report.errors, report.warnings
    ));
    Ok(report)
}
