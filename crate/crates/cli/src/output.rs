//! CSV tables with a `#`-prefixed header block.

use std::io::{self, Write};

use crate::scenario::Row;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const NA: &str = "NA";

pub struct Table<'a> {
    /// Name of the swept column, if any.
    pub sweep: Option<&'a str>,
    /// Header lines without the leading `#`.
    pub header: Vec<String>,
    pub rows: &'a [Row],
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn clean(flag: &str) -> String {
    flag.chars().map(|c| if matches!(c, ',' | '\n' | '\r' | ';') { ' ' } else { c }).collect()
}

impl Table<'_> {
    pub fn write<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "# entangle {VERSION}")?;
        for line in &self.header {
            for l in line.lines() {
                writeln!(out, "# {l}")?;
            }
        }
        let mut columns = Vec::new();
        if let Some(s) = self.sweep {
            columns.push(s);
        }
        columns.extend(["P1", "P2", "absE", "absF", "N", "K", "flags"]);
        writeln!(out, "{}", columns.join(","))?;
        for row in self.rows {
            let mut cells = Vec::with_capacity(columns.len());
            if self.sweep.is_some() {
                cells.push(row.x.map_or(NA.to_string(), num));
            }
            match &row.values {
                Some(v) => {
                    cells.extend([num(v.p1), num(v.p2)]);
                    cells.push(v.e.map_or(NA.to_string(), num));
                    cells.extend([num(v.f), num(v.n), num(v.k)]);
                }
                None => cells.extend(std::iter::repeat_n(NA.to_string(), 6)),
            }
            cells.push(row.flags.iter().map(|f| clean(f)).collect::<Vec<_>>().join(";"));
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        buf
    }
}
