//! The `QRC1` text format for colorings.
//!
//! ```text
//! QRC1
//! m=<ground size>
//! scheme=<label>
//! <2^m symbols from {R, B}, 64 per line, in encoded order>
//! ```
//!
//! Lines end in `\n`, including the last one.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;

use crate::bits::BitTable;
use crate::coloring::Coloring;
use crate::error::{Error, Result};
use crate::lattice::{CubeSpace, MAX_GROUND};

pub const MAGIC: &str = "QRC1";
pub const SYMBOLS_PER_LINE: usize = 64;

pub fn write_coloring<W: Write>(c: &Coloring, out: &mut W) -> Result<()> {
    let scheme = c.scheme();
    if scheme.contains(['\n', '\r']) || scheme.ends_with(char::is_whitespace) {
        return Err(Error::Usage(format!(
            "scheme label {scheme:?} contains a newline or trailing whitespace"
        )));
    }
    let mut buf = Vec::with_capacity(c.space().len() as usize * 65 / 64 + 64);
    writeln!(buf, "{MAGIC}")?;
    writeln!(buf, "m={}", c.space().ground_size())?;
    writeln!(buf, "scheme={scheme}")?;
    for (i, symbol) in c.symbols().enumerate() {
        buf.push(symbol as u8);
        if (i + 1) % SYMBOLS_PER_LINE == 0 {
            buf.push(b'\n');
        }
    }
    if !c.space().len().is_multiple_of(SYMBOLS_PER_LINE as u64) {
        buf.push(b'\n');
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn coloring_to_string(c: &Coloring) -> Result<String> {
    let mut buf = Vec::new();
    write_coloring(c, &mut buf)?;
    Ok(String::from_utf8(buf).expect("QRC1 output is ASCII"))
}

pub fn save_coloring(c: &Coloring, path: &Path) -> Result<()> {
    let mut file = io::BufWriter::new(fs::File::create(path)?);
    write_coloring(c, &mut file)?;
    file.flush()?;
    Ok(())
}

pub fn load_coloring(path: &Path) -> Result<Coloring> {
    let file = fs::File::open(path)?;
    read_coloring(io::BufReader::new(file))
}

pub fn parse_coloring(text: &str) -> Result<Coloring> {
    read_coloring(text.as_bytes())
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

pub fn read_coloring<R: BufRead>(reader: R) -> Result<Coloring> {
    let mut lines = reader.split(b'\n');
    let mut next_line = |number: usize| -> Result<Option<Vec<u8>>> {
        match lines.next() {
            None => Ok(None),
            Some(line) => {
                let line = line?;
                if let Some(col) = line.iter().position(|&b| b == b'\r') {
                    return Err(parse_err(number, col + 1, "carriage return is not allowed"));
                }
                Ok(Some(line))
            }
        }
    };

    let header = next_line(1)?.ok_or_else(|| parse_err(1, 1, "empty input"))?;
    if header != MAGIC.as_bytes() {
        return Err(parse_err(1, 1, format!("expected header {MAGIC:?}")));
    }

    let m_line = next_line(2)?.ok_or_else(|| parse_err(2, 1, "missing m= line"))?;
    let m_text = m_line
        .strip_prefix(b"m=")
        .ok_or_else(|| parse_err(2, 1, "expected \"m=<integer>\""))?;
    let m: u32 = std::str::from_utf8(m_text)
        .ok()
        .filter(|t| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit()))
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(2, 3, "ground size is not a decimal integer"))?;
    if m == 0 || m > MAX_GROUND {
        return Err(parse_err(2, 3, format!("ground size {m} outside [1, {MAX_GROUND}]")));
    }

    let scheme_line = next_line(3)?.ok_or_else(|| parse_err(3, 1, "missing scheme= line"))?;
    let scheme_bytes = scheme_line
        .strip_prefix(b"scheme=")
        .ok_or_else(|| parse_err(3, 1, "expected \"scheme=<label>\""))?;
    let scheme = String::from_utf8(scheme_bytes.to_vec())
        .map_err(|_| parse_err(3, 8, "scheme label is not UTF-8"))?;

    let space = CubeSpace::plain(m)?;
    let total = space.len();
    let mut red = BitTable::zeros(total);
    let mut seen: u64 = 0;
    let mut line_no = 3;
    loop {
        line_no += 1;
        let Some(line) = next_line(line_no)? else { break };
        if line.is_empty() {
            return Err(parse_err(line_no, 1, "blank line in payload"));
        }
        if seen >= total {
            return Err(parse_err(
                line_no,
                1,
                format!("payload longer than 2^{m} = {total} symbols"),
            ));
        }
        let remaining = total - seen;
        let expected = remaining.min(SYMBOLS_PER_LINE as u64) as usize;
        for (col, &b) in line.iter().enumerate() {
            if col >= expected {
                let message = if remaining <= SYMBOLS_PER_LINE as u64 {
                    format!("payload longer than 2^{m} = {total} symbols")
                } else {
                    format!("payload lines must hold {SYMBOLS_PER_LINE} symbols")
                };
                return Err(parse_err(line_no, col + 1, message));
            }
            match b {
                b'R' => red.set(seen, true),
                b'B' => {}
                _ => {
                    return Err(parse_err(
                        line_no,
                        col + 1,
                        format!("illegal character {:?}", b as char),
                    ))
                }
            }
            seen += 1;
        }
        if line.len() < expected {
            return Err(parse_err(
                line_no,
                line.len() + 1,
                if remaining <= SYMBOLS_PER_LINE as u64 {
                    format!("payload shorter than 2^{m} = {total} symbols")
                } else {
                    format!("payload lines must hold {SYMBOLS_PER_LINE} symbols")
                },
            ));
        }
    }
    if seen != total {
        return Err(parse_err(
            line_no,
            1,
            format!("payload has {seen} symbols, expected 2^{m} = {total}"),
        ));
    }
    Ok(Coloring::from_table(space, red, scheme))
}
