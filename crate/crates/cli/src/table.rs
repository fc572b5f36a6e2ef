//! Deterministic table rendering. Every cell is a preformatted string —
//! numbers carry 17 significant digits — so CSV and JSON output are
//! byte-identical across runs for the same configuration.

/// A rectangular result table with a command tag.
#[derive(Clone, Debug)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Self {
            command,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.render_csv(),
            OutputFormat::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&join_csv(self.columns.iter().map(|c| c.to_string())));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&join_csv(row.iter().cloned()));
            out.push('\n');
        }
        out
    }

    fn render_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\"command\":");
        push_json_string(&mut out, self.command);
        out.push_str(",\"columns\":[");
        for (i, c) in self.columns.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            push_json_string(&mut out, c);
        }
        out.push_str("],\"rows\":[");
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('[');
            for (j, cell) in row.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                push_json_string(&mut out, cell);
            }
            out.push(']');
        }
        out.push_str("]}\n");
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

fn join_csv<I: Iterator<Item = String>>(cells: I) -> String {
    cells
        .map(|c| csv_escape(&c))
        .collect::<Vec<_>>()
        .join(",")
}

fn csv_escape(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

fn push_json_string(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

/// 17 significant digits; enough to reconstruct the f64 bit pattern.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        }
    } else {
        format!("{x:.16e}")
    }
}

pub fn fmt_bool(b: bool) -> String {
    if b { "true" } else { "false" }.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_escapes_commas_and_quotes() {
        assert_eq!(csv_escape("plain"), "plain");
        assert_eq!(csv_escape("a,b"), "\"a,b\"");
        assert_eq!(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn float_formatting_is_17_digits() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.5), "-5.0000000000000000e-1");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }

    #[test]
    fn json_rendering_round_trips_structure() {
        let mut t = Table::new("demo", vec!["a", "b"]);
        t.push_row(vec!["1".into(), "x\"y".into()]);
        let json = t.render(OutputFormat::Json);
        assert!(json.starts_with("{\"command\":\"demo\""));
        assert!(json.contains("\\\""));
        assert!(json.ends_with("]}\n"));
    }
}
