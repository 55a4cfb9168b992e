//! NumPy `.npy` version 1.0 codec for little-endian, C-order `<f4`, `<f8`
//! and `<i8` arrays of rank 1 or 2.
//!
//! Headers are written the way current NumPy writes them: keys in sorted
//! order, 21-digit growth padding for the leading axis, then space padding
//! to a 64-byte boundary terminated by `\n`.

use crate::error::FormatError;

use super::{Array, ArrayData, Dtype};

pub(crate) const MAGIC: &[u8; 6] = b"\x93NUMPY";
const ALIGN: usize = 64;
const GROWTH_AXIS_MAX_DIGITS: usize = 21;

impl Dtype {
    fn descr(self) -> &'static str {
        match self {
            Dtype::F32 => "<f4",
            Dtype::F64 => "<f8",
            Dtype::I64 => "<i8",
        }
    }

    fn from_descr(descr: &str) -> Result<Self, FormatError> {
        match descr {
            "<f4" => Ok(Dtype::F32),
            "<f8" => Ok(Dtype::F64),
            "<i8" => Ok(Dtype::I64),
            other => Err(FormatError::UnsupportedDtype(other.to_string())),
        }
    }

    fn width(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::F64 | Dtype::I64 => 8,
        }
    }
}

fn shape_repr(shape: &[usize]) -> String {
    match shape {
        [n] => format!("({n},)"),
        dims => {
            let parts: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
            format!("({})", parts.join(", "))
        }
    }
}

pub(crate) fn encode(array: &Array) -> Vec<u8> {
    let shape = array.shape();
    let mut header = format!(
        "{{'descr': '{}', 'fortran_order': False, 'shape': {}, }}",
        array.dtype().descr(),
        shape_repr(shape)
    );
    let lead_digits = shape[0].to_string().len();
    header.push_str(&" ".repeat(GROWTH_AXIS_MAX_DIGITS.saturating_sub(lead_digits)));
    let unpadded = MAGIC.len() + 2 + 2 + header.len() + 1;
    let pad = ALIGN - unpadded % ALIGN;
    header.push_str(&" ".repeat(pad));
    header.push('\n');

    let mut out = Vec::with_capacity(MAGIC.len() + 4 + header.len() + array.byte_len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&(header.len() as u16).to_le_bytes());
    out.extend_from_slice(header.as_bytes());
    match array.data() {
        ArrayData::F32(v) => v
            .iter()
            .for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        ArrayData::F64(v) => v
            .iter()
            .for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        ArrayData::I64(v) => v
            .iter()
            .for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
    }
    out
}

pub(crate) fn decode(bytes: &[u8]) -> Result<Array, FormatError> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(FormatError::BadMagic);
    }
    if bytes.len() < 10 {
        return Err(FormatError::MalformedHeader(
            "file ends inside the preamble".into(),
        ));
    }
    let (major, minor) = (bytes[6], bytes[7]);
    if (major, minor) != (1, 0) {
        return Err(FormatError::UnsupportedVersion(major, minor));
    }
    let header_len = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
    let body_start = 10 + header_len;
    if bytes.len() < body_start {
        return Err(FormatError::MalformedHeader(
            "file ends inside the header".into(),
        ));
    }
    let header = std::str::from_utf8(&bytes[10..body_start])
        .map_err(|_| FormatError::MalformedHeader("header is not ASCII".into()))?;
    let dict = parse_header(header)?;
    let dtype = Dtype::from_descr(&dict.descr)?;
    if dict.fortran_order {
        return Err(FormatError::UnsupportedLayout);
    }
    if dict.shape.is_empty() || dict.shape.len() > 2 {
        return Err(FormatError::UnsupportedShape(dict.shape));
    }
    let count = dict
        .shape
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| FormatError::UnsupportedShape(dict.shape.clone()))?;
    let payload = &bytes[body_start..];
    let expected = count
        .checked_mul(dtype.width())
        .ok_or_else(|| FormatError::UnsupportedShape(dict.shape.clone()))?;
    if payload.len() < expected {
        return Err(FormatError::Truncated {
            expected,
            found: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(FormatError::TrailingBytes(payload.len() - expected));
    }
    let data = match dtype {
        Dtype::F32 => ArrayData::F32(
            payload
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        ),
        Dtype::F64 => ArrayData::F64(
            payload
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        ),
        Dtype::I64 => ArrayData::I64(
            payload
                .chunks_exact(8)
                .map(|c| i64::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        ),
    };
    Ok(Array::from_parts(dict.shape, data))
}

#[derive(Debug)]
struct HeaderDict {
    descr: String,
    fortran_order: bool,
    shape: Vec<usize>,
}

/// Minimal parser for the Python dict literal in an npy header.
struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, what: &str) -> FormatError {
        FormatError::MalformedHeader(format!("{what} at byte {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), FormatError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn string(&mut self) -> Result<String, FormatError> {
        let quote = match self.peek() {
            Some(q @ (b'\'' | b'"')) => q,
            _ => return Err(self.err("expected string")),
        };
        self.pos += 1;
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos] != quote {
            self.pos += 1;
        }
        if self.pos >= self.s.len() {
            return Err(self.err("unterminated string"));
        }
        let out = String::from_utf8_lossy(&self.s[start..self.pos]).into_owned();
        self.pos += 1;
        Ok(out)
    }

    fn word(&mut self) -> &'a [u8] {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        &self.s[start..self.pos]
    }

    fn boolean(&mut self) -> Result<bool, FormatError> {
        match self.word() {
            b"True" => Ok(true),
            b"False" => Ok(false),
            _ => Err(self.err("expected True or False")),
        }
    }

    fn tuple(&mut self) -> Result<Vec<usize>, FormatError> {
        self.expect(b'(')?;
        let mut dims = Vec::new();
        loop {
            if self.peek() == Some(b')') {
                self.pos += 1;
                return Ok(dims);
            }
            let digits = self.word();
            let text = std::str::from_utf8(digits).unwrap_or("");
            let dim = text
                .parse::<usize>()
                .map_err(|_| self.err("expected a non-negative integer"))?;
            dims.push(dim);
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b')') => {}
                _ => return Err(self.err("expected ',' or ')'")),
            }
        }
    }
}

fn parse_header(header: &str) -> Result<HeaderDict, FormatError> {
    if !header.ends_with('\n') {
        return Err(FormatError::MalformedHeader(
            "header must end with a newline".into(),
        ));
    }
    let mut cur = Cursor {
        s: header.as_bytes(),
        pos: 0,
    };
    let (mut descr, mut fortran, mut shape) = (None, None, None);
    cur.expect(b'{')?;
    loop {
        if cur.peek() == Some(b'}') {
            cur.pos += 1;
            break;
        }
        let key = cur.string()?;
        cur.expect(b':')?;
        match key.as_str() {
            "descr" if descr.is_none() => descr = Some(cur.string()?),
            "fortran_order" if fortran.is_none() => fortran = Some(cur.boolean()?),
            "shape" if shape.is_none() => shape = Some(cur.tuple()?),
            other => {
                return Err(FormatError::MalformedHeader(format!(
                    "unexpected or repeated key {other:?}"
                )))
            }
        }
        match cur.peek() {
            Some(b',') => cur.pos += 1,
            Some(b'}') => {}
            _ => return Err(cur.err("expected ',' or '}'")),
        }
    }
    if cur.peek().is_some() {
        return Err(cur.err("trailing characters after dict"));
    }
    match (descr, fortran, shape) {
        (Some(descr), Some(fortran_order), Some(shape)) => Ok(HeaderDict {
            descr,
            fortran_order,
            shape,
        }),
        _ => Err(FormatError::MalformedHeader(
            "header must define descr, fortran_order and shape".into(),
        )),
    }
}
