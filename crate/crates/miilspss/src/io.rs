//! Plain-text instance files.
//!
//! Lot-sizing instances use the `MIILSPSS 1` format: a header line, a
//! dimension line `NJ NI NT`, the transaction costs, the holding costs,
//! one price row per item, and one demand row per item. Lines starting
//! with `#` are comments, tokens are whitespace-separated, and values may
//! be decimal. Facility-location instances use the analogous `UFL 1`
//! format with dimensions `NF NC`, open costs, and one service-cost row
//! per client.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::instance::{Instance, InstanceError};
use crate::ufl::UflInstance;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected header `{expected}`")]
    BadHeader { line: usize, expected: &'static str },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: {source}")]
    InvalidInstance {
        line: usize,
        source: InstanceError,
    },
    #[error("unexpected end of file: {missing}")]
    Truncated { missing: String },
}

/// Iterator over non-comment, non-blank lines, tracking line numbers.
struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last_line: 0,
        }
    }

    fn next_data(&mut self) -> Option<(usize, &'a str)> {
        for (idx, raw) in self.inner.by_ref() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            self.last_line = idx + 1;
            return Some((idx + 1, line));
        }
        None
    }

    fn expect_row(&mut self, count: usize, what: &str) -> Result<(usize, Vec<f64>), ParseError> {
        let (line, text) = self.next_data().ok_or_else(|| ParseError::Truncated {
            missing: what.to_string(),
        })?;
        let values = parse_numbers(line, text)?;
        if values.len() != count {
            return Err(ParseError::Malformed {
                line,
                message: format!("{what}: expected {count} values, found {}", values.len()),
            });
        }
        Ok((line, values))
    }
}

fn parse_numbers(line: usize, text: &str) -> Result<Vec<f64>, ParseError> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>().map_err(|_| ParseError::Malformed {
                line,
                message: format!("invalid number `{tok}`"),
            })
        })
        .collect()
}

fn parse_dims(line: usize, text: &str, names: &[&str]) -> Result<Vec<usize>, ParseError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() != names.len() {
        return Err(ParseError::Malformed {
            line,
            message: format!("expected dimensions `{}`", names.join(" ")),
        });
    }
    tokens
        .iter()
        .zip(names)
        .map(|(tok, name)| {
            tok.parse::<usize>().map_err(|_| ParseError::Malformed {
                line,
                message: format!("invalid {name} `{tok}`"),
            })
        })
        .collect()
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = Lines::new(text);
    let (line, header) = lines.next_data().ok_or(ParseError::Truncated {
        missing: "header".into(),
    })?;
    if header.split_whitespace().collect::<Vec<_>>() != ["MIILSPSS", "1"] {
        return Err(ParseError::BadHeader {
            line,
            expected: "MIILSPSS 1",
        });
    }
    let (dim_line, dims_text) = lines.next_data().ok_or(ParseError::Truncated {
        missing: "dimension line".into(),
    })?;
    let dims = parse_dims(dim_line, dims_text, &["NJ", "NI", "NT"])?;
    let (nj, ni, nt) = (dims[0], dims[1], dims[2]);
    if nj == 0 || ni == 0 || nt == 0 {
        return Err(ParseError::Malformed {
            line: dim_line,
            message: format!("dimensions must be positive (got {nj} {ni} {nt})"),
        });
    }
    let (_, transaction) = lines.expect_row(nj, "transaction cost row")?;
    let (_, holding) = lines.expect_row(ni, "holding cost row")?;
    let mut price = Vec::with_capacity(ni * nj);
    let mut last_line = 0;
    for i in 0..ni {
        let (line, row) = lines.expect_row(nj, &format!("price row for item {}", i + 1))?;
        last_line = line;
        price.extend(row);
    }
    let mut demand = Vec::with_capacity(ni * nt);
    for i in 0..ni {
        let (line, row) = lines.expect_row(nt, &format!("demand row for item {}", i + 1))?;
        last_line = line;
        demand.extend(row);
    }
    Instance::new(nj, ni, nt, transaction, holding, price, demand)
        .map_err(|source| ParseError::InvalidInstance {
            line: last_line,
            source,
        })
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance, ParseError> {
    parse_instance(&std::fs::read_to_string(path)?)
}

fn push_row(out: &mut String, values: impl Iterator<Item = f64>) {
    let mut first = true;
    for v in values {
        if !first {
            out.push(' ');
        }
        first = false;
        if v.fract() == 0.0 && v.abs() < 1e15 {
            let _ = write!(out, "{}", v as i64);
        } else {
            let _ = write!(out, "{v}");
        }
    }
    out.push('\n');
}

pub fn format_instance(inst: &Instance) -> String {
    let (nj, ni, nt) = (
        inst.num_suppliers(),
        inst.num_items(),
        inst.num_periods(),
    );
    let mut out = String::new();
    out.push_str("MIILSPSS 1\n");
    let _ = writeln!(out, "{nj} {ni} {nt}");
    push_row(&mut out, inst.transaction_costs().iter().copied());
    push_row(&mut out, inst.holding_costs().iter().copied());
    for i in 0..ni {
        push_row(&mut out, (0..nj).map(|j| inst.price(i, j)));
    }
    for i in 0..ni {
        push_row(&mut out, (0..nt).map(|t| inst.demand(i, t)));
    }
    out
}

pub fn write_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<(), std::io::Error> {
    std::fs::write(path, format_instance(inst))
}

pub fn parse_ufl(text: &str) -> Result<UflInstance, ParseError> {
    let mut lines = Lines::new(text);
    let (line, header) = lines.next_data().ok_or(ParseError::Truncated {
        missing: "header".into(),
    })?;
    if header.split_whitespace().collect::<Vec<_>>() != ["UFL", "1"] {
        return Err(ParseError::BadHeader {
            line,
            expected: "UFL 1",
        });
    }
    let (dim_line, dims_text) = lines.next_data().ok_or(ParseError::Truncated {
        missing: "dimension line".into(),
    })?;
    let dims = parse_dims(dim_line, dims_text, &["NF", "NC"])?;
    let (nf, nc) = (dims[0], dims[1]);
    if nf == 0 || nc == 0 {
        return Err(ParseError::Malformed {
            line: dim_line,
            message: format!("dimensions must be positive (got {nf} {nc})"),
        });
    }
    let (_, open_cost) = lines.expect_row(nf, "open cost row")?;
    let mut serve_cost = Vec::with_capacity(nc * nf);
    let mut last_line = 0;
    for c in 0..nc {
        let (line, row) = lines.expect_row(nf, &format!("service cost row for client {}", c + 1))?;
        last_line = line;
        serve_cost.extend(row);
    }
    UflInstance::new(nf, nc, open_cost, serve_cost).map_err(|source| {
        ParseError::InvalidInstance {
            line: last_line,
            source,
        }
    })
}

pub fn read_ufl(path: impl AsRef<Path>) -> Result<UflInstance, ParseError> {
    parse_ufl(&std::fs::read_to_string(path)?)
}

pub fn format_ufl(u: &UflInstance) -> String {
    let mut out = String::new();
    out.push_str("UFL 1\n");
    let _ = writeln!(out, "{} {}", u.num_facilities(), u.num_clients());
    push_row(&mut out, u.open_costs().iter().copied());
    for c in 0..u.num_clients() {
        push_row(&mut out, (0..u.num_facilities()).map(|f| u.serve_cost(c, f)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::test_fixtures::e1;
    use crate::instance::{generate_instance, Family};

    #[test]
    fn round_trips_e1() {
        let inst = e1();
        let parsed = parse_instance(&format_instance(&inst)).unwrap();
        assert_eq!(parsed, inst);
    }

    #[test]
    fn round_trips_generated_instances() {
        for family in Family::ALL {
            let inst = generate_instance(3, 2, 7, family, 11);
            let parsed = parse_instance(&format_instance(&inst)).unwrap();
            assert_eq!(parsed, inst);
        }
    }

    #[test]
    fn comments_and_blanks_are_skipped() {
        let text = "# header comment\nMIILSPSS 1\n\n1 1 2\n# costs\n5\n3\n1\n4 4\n";
        let parsed = parse_instance(text).unwrap();
        assert_eq!(parsed, e1());
    }

    #[test]
    fn rejects_zero_dimension() {
        let text = "MIILSPSS 1\n0 1 2\n";
        match parse_instance(text) {
            Err(ParseError::Malformed { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected malformed error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_short_demand_row_with_line_number() {
        let text = "MIILSPSS 1\n1 1 2\n5\n3\n1\n4\n";
        match parse_instance(text) {
            Err(ParseError::Malformed { line, message }) => {
                assert_eq!(line, 6);
                assert!(message.contains("demand row"));
            }
            other => panic!("expected malformed error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_negative_value() {
        let text = "MIILSPSS 1\n1 1 2\n-5\n3\n1\n4 4\n";
        assert!(matches!(
            parse_instance(text),
            Err(ParseError::InvalidInstance { .. })
        ));
    }

    #[test]
    fn rejects_bad_header() {
        assert!(matches!(
            parse_instance("LOTSIZE 1\n"),
            Err(ParseError::BadHeader { line: 1, .. })
        ));
    }

    #[test]
    fn accepts_decimal_values() {
        let text = "MIILSPSS 1\n1 1 2\n5.5\n3.25\n1\n4 4\n";
        let parsed = parse_instance(text).unwrap();
        assert_eq!(parsed.transaction_cost(0), 5.5);
        assert_eq!(parsed.holding_cost(0), 3.25);
    }

    #[test]
    fn ufl_round_trips() {
        let u = UflInstance::new(2, 1, vec![10.0, 1.0], vec![1.0, 100.0]).unwrap();
        let parsed = parse_ufl(&format_ufl(&u)).unwrap();
        assert_eq!(parsed, u);
    }
}
