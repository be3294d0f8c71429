use crate::Format;

/// Rows rendered either space-aligned or tab-separated.
#[derive(Debug, Default)]
pub struct Table {
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Table {
        Table {
            rows: vec![header.into_iter().map(Into::into).collect()],
        }
    }

    pub fn push<S: Into<String>>(&mut self, row: impl IntoIterator<Item = S>) {
        self.rows.push(row.into_iter().map(Into::into).collect());
    }

    pub fn len(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Tsv => {
                for row in &self.rows[1..] {
                    out.push_str(&row.join("\t"));
                    out.push('\n');
                }
            }
            Format::Human => {
                let ncols = self.rows.iter().map(Vec::len).max().unwrap_or(0);
                let widths: Vec<usize> = (0..ncols)
                    .map(|c| {
                        self.rows
                            .iter()
                            .filter_map(|r| r.get(c))
                            .map(|s| s.chars().count())
                            .max()
                            .unwrap_or(0)
                    })
                    .collect();
                for row in &self.rows {
                    let cells: Vec<String> = row
                        .iter()
                        .enumerate()
                        .map(|(c, s)| format!("{s:<w$}", w = widths[c]))
                        .collect();
                    out.push_str(cells.join("  ").trim_end());
                    out.push('\n');
                }
            }
        }
        out
    }
}
