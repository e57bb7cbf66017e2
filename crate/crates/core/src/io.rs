//! Plain-text formats for edge lists, event logs, labels and matrices.
//!
//! * edge list: one `u v` pair per line, 0-indexed
//! * event log: one `t u v` triple per line
//! * labels: a single line of space-separated `1` / `-1`
//! * matrix: first line `n`, then `n` rows of `n` whitespace-separated reals
//!
//! Readers skip blank lines and lines starting with `#`.

use std::io::{BufRead, Write};

use crate::community::Labels;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::ScheduleEvent;

fn content_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Ok(l) => {
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                None
            } else {
                Some(Ok((i + 1, t.to_string())))
            }
        }
        Err(e) => Some(Err(e.into())),
    })
}

fn parse_field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad {what}: {tok:?}"),
    })
}

fn expect_end<'a>(mut it: impl Iterator<Item = &'a str>, line: usize) -> Result<()> {
    match it.next() {
        None => Ok(()),
        Some(extra) => Err(Error::Parse {
            line,
            msg: format!("unexpected trailing field {extra:?}"),
        }),
    }
}

pub fn write_edge_list<W: Write>(mut w: W, edges: &[(usize, usize)]) -> Result<()> {
    for &(u, v) in edges {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(r: R) -> Result<Vec<(usize, usize)>> {
    let mut edges = Vec::new();
    for item in content_lines(r) {
        let (line, text) = item?;
        let mut it = text.split_whitespace();
        let u = parse_field(it.next(), line, "node")?;
        let v = parse_field(it.next(), line, "node")?;
        expect_end(it, line)?;
        edges.push((u, v));
    }
    Ok(edges)
}

pub fn write_event_log<W: Write>(mut w: W, events: &[ScheduleEvent]) -> Result<()> {
    for ev in events {
        writeln!(w, "{} {} {}", ev.t, ev.u, ev.v)?;
    }
    Ok(())
}

pub fn read_event_log<R: BufRead>(r: R) -> Result<Vec<ScheduleEvent>> {
    let mut events = Vec::new();
    for item in content_lines(r) {
        let (line, text) = item?;
        let mut it = text.split_whitespace();
        let t = parse_field(it.next(), line, "round")?;
        let u: usize = parse_field(it.next(), line, "node")?;
        let v: usize = parse_field(it.next(), line, "node")?;
        expect_end(it, line)?;
        if u == v {
            return Err(Error::Parse {
                line,
                msg: "event pairs a node with itself".into(),
            });
        }
        events.push(ScheduleEvent { u, v, t });
    }
    Ok(events)
}

pub fn write_labels<W: Write>(mut w: W, labels: &Labels) -> Result<()> {
    let line: Vec<String> = labels.values.iter().map(|x| x.to_string()).collect();
    writeln!(w, "{}", line.join(" "))?;
    Ok(())
}

pub fn read_labels<R: BufRead>(r: R) -> Result<Labels> {
    let mut values = Vec::new();
    for item in content_lines(r) {
        let (line, text) = item?;
        for tok in text.split_whitespace() {
            let x: i8 = parse_field(Some(tok), line, "label")?;
            values.push(x);
        }
    }
    Labels::new(values)
}

pub fn write_matrix<W: Write>(mut w: W, m: &Matrix) -> Result<()> {
    writeln!(w, "{}", m.rows())?;
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|x| x.to_string()).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

/// Reads a square matrix; symmetry is left to the consumer.
pub fn read_matrix<R: BufRead>(r: R) -> Result<Matrix> {
    let mut lines = content_lines(r);
    let (line, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        msg: "empty matrix file".into(),
    })??;
    let mut it = header.split_whitespace();
    let n: usize = parse_field(it.next(), line, "dimension")?;
    expect_end(it, line)?;
    let mut data = Vec::with_capacity(n * n);
    let mut rows = 0;
    for item in lines {
        let (line, text) = item?;
        let before = data.len();
        for tok in text.split_whitespace() {
            data.push(parse_field::<f64>(Some(tok), line, "entry")?);
        }
        if data.len() - before != n {
            return Err(Error::Parse {
                line,
                msg: format!("expected {n} entries, got {}", data.len() - before),
            });
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::Parse {
            line: 0,
            msg: format!("expected {n} rows, got {rows}"),
        });
    }
    Matrix::from_row_major(n, n, data)
}
