//! Line-based text formats for scalar and fractional codes, mirroring the
//! network format: `#` comments, whitespace-separated tokens, deterministic
//! output ordering, line-numbered parse errors.
//!
//! Scalar code (block length implied by the coefficient strings):
//! ```text
//! kernel <in-edge-index> <out-edge-index> <L-bit coefficient string>
//! ```
//!
//! Fractional code:
//! ```text
//! code <L> <Lprime>
//! kernel <d> <e> <L-bit circulant coefficient string>
//! gs <source-index> <row-bits> ...          # units*Lprime rows of units*L bits
//! decoder <receiver-index> <row-bits> ...   # dense, |In(t)|*L rows
//! decoder_staged <receiver-index> <in-units> <out-units> <block-bits> ...
//! ```

use thiserror::Error;

use crate::bits::{BitMatrix, BitVector};
use crate::circulant::Circulant;
use crate::field::{FieldCtx, WeightBoundedPoly};
use crate::lift::{Decoder, FractionalCode, Kernel};
use crate::network::Network;
use crate::scalar::ScalarCode;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TextError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("cannot serialize: {0}")]
    Unrepresentable(String),
}

fn syntax(line: usize, message: impl Into<String>) -> TextError {
    TextError::Syntax { line, message: message.into() }
}

fn parse_index(line: usize, token: &str, what: &str) -> Result<usize, TextError> {
    token.parse().map_err(|_| syntax(line, format!("invalid {what} '{token}'")))
}

fn parse_bits(line: usize, token: &str, len: usize, what: &str) -> Result<BitVector, TextError> {
    let v = BitVector::from_bitstring(token)
        .ok_or_else(|| syntax(line, format!("{what} must be a 0/1 string, got '{token}'")))?;
    if v.len() != len {
        return Err(syntax(line, format!("{what} must have {len} bits, got {}", v.len())));
    }
    Ok(v)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            None
        } else {
            Some((i + 1, line.split_whitespace().collect()))
        }
    })
}

/// One `kernel` line per nonzero kernel, in canonical edge-pair order.
pub fn write_scalar_code(code: &ScalarCode) -> String {
    let mut out = String::new();
    for (d, e, g) in code.kernels() {
        out.push_str(&format!("kernel {} {} {}\n", d.index(), e.index(), g.bits().to_bitstring()));
    }
    out
}

pub fn parse_scalar_code(
    net: &Network,
    ctx: &FieldCtx,
    text: &str,
) -> Result<ScalarCode, TextError> {
    let mut code = ScalarCode::new(net.clone(), ctx.clone());
    let l = ctx.l();
    for (line, tokens) in content_lines(text) {
        match tokens.as_slice() {
            ["kernel", d, e, bits] => {
                let d = edge(net, line, d)?;
                let e = edge(net, line, e)?;
                let bits = parse_bits(line, bits, l, "kernel coefficients")?;
                if bits.weight() > (l - 1) / 2 {
                    return Err(syntax(
                        line,
                        format!("kernel weight {} exceeds bound {}", bits.weight(), (l - 1) / 2),
                    ));
                }
                code.set_kernel(d, e, WeightBoundedPoly::new(bits))
                    .map_err(|err| syntax(line, err.to_string()))?;
            }
            [directive, ..] => {
                return Err(syntax(line, format!("unknown directive '{directive}'")));
            }
            [] => unreachable!("blank lines are filtered"),
        }
    }
    Ok(code)
}

fn edge(net: &Network, line: usize, token: &str) -> Result<crate::network::EdgeId, TextError> {
    let idx = parse_index(line, token, "edge index")?;
    net.edge_id(idx)
        .ok_or_else(|| syntax(line, format!("edge index {idx} out of range")))
}

/// Header, kernels, generators, and decoders, in deterministic order.
/// Only circulant kernels are representable — the only kind the toolchain
/// writes to files.
pub fn write_fractional_code(code: &FractionalCode) -> Result<String, TextError> {
    let mut out = format!("code {} {}\n", code.l(), code.lprime());
    for (d, e, k) in code.kernels() {
        match k {
            Kernel::Circulant(c) => {
                out.push_str(&format!(
                    "kernel {} {} {}\n",
                    d.index(),
                    e.index(),
                    c.coeffs().to_bitstring()
                ));
            }
            other => {
                return Err(TextError::Unrepresentable(format!(
                    "kernel on ({}, {}) is not circulant: {other:?}",
                    d.index(),
                    e.index()
                )));
            }
        }
    }
    for s in 0..code.network().sources().len() {
        let g = code.generator(s);
        out.push_str(&format!("gs {s}"));
        for r in 0..g.rows() {
            out.push_str(&format!(" {}", g.row(r).to_bitstring()));
        }
        out.push('\n');
    }
    for t in 0..code.network().receivers().len() {
        match code.decoder(t) {
            None => {}
            Some(Decoder::Staged { in_units, out_units, blocks }) => {
                out.push_str(&format!("decoder_staged {t} {in_units} {out_units}"));
                for b in blocks {
                    out.push_str(&format!(" {}", b.coeffs().to_bitstring()));
                }
                out.push('\n');
            }
            Some(Decoder::Dense(m)) => {
                out.push_str(&format!("decoder {t}"));
                for r in 0..m.rows() {
                    out.push_str(&format!(" {}", m.row(r).to_bitstring()));
                }
                out.push('\n');
            }
        }
    }
    Ok(out)
}

pub fn parse_fractional_code(net: &Network, text: &str) -> Result<FractionalCode, TextError> {
    let mut lines = content_lines(text);
    let (header_line, l, lprime) = match lines.next() {
        Some((line, tokens)) => match tokens.as_slice() {
            ["code", l, lprime] => (
                line,
                parse_index(line, l, "unit size")?,
                parse_index(line, lprime, "source unit size")?,
            ),
            _ => return Err(syntax(line, "expected header 'code <L> <Lprime>'")),
        },
        None => return Err(syntax(1, "empty code file")),
    };
    let mut code = FractionalCode::new(net.clone(), l, lprime)
        .map_err(|e| syntax(header_line, e.to_string()))?;

    for (line, tokens) in lines {
        match tokens.as_slice() {
            ["kernel", d, e, bits] => {
                let d = edge(net, line, d)?;
                let e = edge(net, line, e)?;
                let bits = parse_bits(line, bits, l, "kernel coefficients")?;
                code.set_kernel(d, e, Kernel::Circulant(Circulant::from_coeffs(bits)))
                    .map_err(|err| syntax(line, err.to_string()))?;
            }
            ["gs", s, rows @ ..] => {
                let s = parse_index(line, s, "source index")?;
                if s >= net.sources().len() {
                    return Err(syntax(line, format!("source index {s} out of range")));
                }
                let units = net.out_edges(net.sources()[s]).len();
                let g = parse_matrix(line, rows, units * lprime, units * l, "generator")?;
                code.set_generator(s, g).map_err(|err| syntax(line, err.to_string()))?;
            }
            ["decoder", t, rows @ ..] => {
                let t = parse_index(line, t, "receiver index")?;
                let r = net
                    .receivers()
                    .get(t)
                    .ok_or_else(|| syntax(line, format!("receiver index {t} out of range")))?;
                let in_units = net.in_edges(r.node).len();
                let m =
                    parse_matrix(line, rows, in_units * l, net.omega_t(r) * lprime, "decoder")?;
                code.set_decoder(t, Decoder::Dense(m))
                    .map_err(|err| syntax(line, err.to_string()))?;
            }
            ["decoder_staged", t, in_units, out_units, blocks @ ..] => {
                let t = parse_index(line, t, "receiver index")?;
                let in_units = parse_index(line, in_units, "input unit count")?;
                let out_units = parse_index(line, out_units, "output unit count")?;
                if blocks.len() != in_units * out_units {
                    return Err(syntax(
                        line,
                        format!(
                            "expected {} blocks, got {}",
                            in_units * out_units,
                            blocks.len()
                        ),
                    ));
                }
                let blocks = blocks
                    .iter()
                    .map(|b| {
                        parse_bits(line, b, l, "decoder block").map(Circulant::from_coeffs)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                code.set_decoder(t, Decoder::Staged { in_units, out_units, blocks })
                    .map_err(|err| syntax(line, err.to_string()))?;
            }
            [directive, ..] => {
                return Err(syntax(line, format!("unknown directive '{directive}'")));
            }
            [] => unreachable!("blank lines are filtered"),
        }
    }
    Ok(code)
}

fn parse_matrix(
    line: usize,
    rows: &[&str],
    want_rows: usize,
    want_cols: usize,
    what: &str,
) -> Result<BitMatrix, TextError> {
    if rows.len() != want_rows {
        return Err(syntax(line, format!("{what} must have {want_rows} rows, got {}", rows.len())));
    }
    let mut m = BitMatrix::zero(want_rows, want_cols);
    for (r, token) in rows.iter().enumerate() {
        m.set_row(r, &parse_bits(line, token, want_cols, what)?);
    }
    Ok(m)
}

/// Message units for simulation: omega whitespace-separated L'-bit strings
/// (newlines allowed).
pub fn parse_messages(text: &str, omega: usize, lprime: usize) -> Result<Vec<BitVector>, TextError> {
    let mut units = Vec::new();
    for (line, tokens) in content_lines(text) {
        for t in tokens {
            units.push(parse_bits(line, t, lprime, "message unit")?);
        }
    }
    if units.len() != omega {
        return Err(syntax(1, format!("expected {omega} message units, got {}", units.len())));
    }
    Ok(units)
}

pub fn write_messages(units: &[BitVector]) -> String {
    let mut out = String::new();
    for u in units {
        out.push_str(&u.to_bitstring());
        out.push('\n');
    }
    out
}
