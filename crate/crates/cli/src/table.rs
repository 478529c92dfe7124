use crate::error::CliError;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // 17 significant digits round-trip every f64
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    /// Appends a constant column.
    pub fn with_column(mut self, name: &str, value: Cell) -> Self {
        self.header.push(name.to_owned());
        for r in &mut self.rows {
            r.push(value.clone());
        }
        self
    }
}

/// RFC 4180 text with a header row; floats carry 17 significant digits.
pub fn emit_csv(table: &Table) -> Result<String, CliError> {
    for (i, r) in table.rows.iter().enumerate() {
        if r.len() != table.header.len() {
            return Err(CliError::RaggedTable {
                row: i,
                expected: table.header.len(),
                found: r.len(),
            });
        }
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::config("table", e.to_string());
    w.write_record(&table.header).map_err(io)?;
    for r in &table.rows {
        w.write_record(r.iter().map(Cell::render)).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::config("table", e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
