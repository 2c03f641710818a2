//! CSV output of run records.

use std::io::{Read, Write};

use fce_core::field::FceKind;
use fce_core::solver::CollocationKind;
use fce_core::{Error, Result};

use crate::runner::RunRecord;

/// Column names, in order.
pub const HEADER: [&str; 13] =
    ["case", "fce_kind", "Nx", "Ny", "p", "m", "q", "colloc", "linf", "l2", "residual", "cond_est", "wall_ms"];

/// One CSV line. Failed runs carry NaN metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub case: String,
    pub kind: FceKind,
    pub nx: usize,
    pub ny: usize,
    pub p: usize,
    pub m: usize,
    pub q: usize,
    pub colloc: CollocationKind,
    pub linf: f64,
    pub l2: f64,
    pub residual: f64,
    pub cond_est: f64,
    pub wall_ms: f64,
}

impl From<&RunRecord> for CsvRow {
    fn from(r: &RunRecord) -> Self {
        Self {
            case: r.case.clone(),
            kind: r.kind,
            nx: r.nx,
            ny: r.ny,
            p: r.p,
            m: r.m,
            q: r.q,
            colloc: r.colloc,
            linf: r.linf,
            l2: r.l2,
            residual: r.residual,
            cond_est: r.cond_est,
            wall_ms: r.wall_ms,
        }
    }
}

impl CsvRow {
    /// Bitwise comparison, so NaN rows compare equal to themselves.
    pub fn same_bits(&self, o: &CsvRow) -> bool {
        let f = |a: f64, b: f64| a.to_bits() == b.to_bits();
        self.case == o.case
            && self.kind == o.kind
            && (self.nx, self.ny, self.p, self.m, self.q) == (o.nx, o.ny, o.p, o.m, o.q)
            && self.colloc == o.colloc
            && f(self.linf, o.linf)
            && f(self.l2, o.l2)
            && f(self.residual, o.residual)
            && f(self.cond_est, o.cond_est)
            && f(self.wall_ms, o.wall_ms)
    }
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Data(format!("csv: {e}"))
}

fn float(v: f64) -> String {
    format!("{v:.14e}")
}

/// Writes the header and one line per row, LF-terminated.
pub fn write_csv<W: Write>(out: W, rows: &[CsvRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.case.clone(),
            r.kind.name().to_string(),
            r.nx.to_string(),
            r.ny.to_string(),
            r.p.to_string(),
            r.m.to_string(),
            r.q.to_string(),
            r.colloc.name().to_string(),
            float(r.linf),
            float(r.l2),
            float(r.residual),
            float(r.cond_est),
            float(r.wall_ms),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}

/// Parses CSV written by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(Error::Data(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let int = |i: usize| rec[i].parse::<usize>().map_err(csv_err);
        let num = |i: usize| rec[i].parse::<f64>().map_err(csv_err);
        rows.push(CsvRow {
            case: rec[0].to_string(),
            kind: FceKind::parse(&rec[1]).ok_or_else(|| csv_err(format!("bad kind '{}'", &rec[1])))?,
            nx: int(2)?,
            ny: int(3)?,
            p: int(4)?,
            m: int(5)?,
            q: int(6)?,
            colloc: CollocationKind::parse(&rec[7]).ok_or_else(|| csv_err(format!("bad collocation '{}'", &rec[7])))?,
            linf: num(8)?,
            l2: num(9)?,
            residual: num(10)?,
            cond_est: num(11)?,
            wall_ms: num(12)?,
        });
    }
    Ok(rows)
}
