//! GloVe text, word2vec text and word2vec binary embedding files.

use std::fmt;
use std::io::{BufRead, ErrorKind, Write};
use std::str::FromStr;

use wordpca_core::EmbeddingSet;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbeddingFormat {
    /// `token v1 … vd` per line, no header.
    GloveText,
    /// `N d` header line, then records as in GloVe text.
    Word2vecText,
    /// `N d\n` header, then `token ` followed by `d` little-endian `f32`s
    /// and an optional `\n`.
    Word2vecBinary,
}

impl EmbeddingFormat {
    pub const ALL: [EmbeddingFormat; 3] =
        [EmbeddingFormat::GloveText, EmbeddingFormat::Word2vecText, EmbeddingFormat::Word2vecBinary];

    pub fn as_str(self) -> &'static str {
        match self {
            EmbeddingFormat::GloveText => "glove-text",
            EmbeddingFormat::Word2vecText => "word2vec-text",
            EmbeddingFormat::Word2vecBinary => "word2vec-binary",
        }
    }
}

impl fmt::Display for EmbeddingFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EmbeddingFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EmbeddingFormat::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown embedding format {s:?}")))
    }
}

/// Reads a complete embedding file.
///
/// Rows keep file order. A repeated token is an error. Trailing `\r` and
/// spaces at the end of a text line are ignored.
pub fn parse_embeddings<R: BufRead>(mut reader: R, format: EmbeddingFormat) -> Result<EmbeddingSet> {
    match format {
        EmbeddingFormat::GloveText => parse_text(&mut reader, None),
        EmbeddingFormat::Word2vecText => {
            let header = read_header(&mut reader)?;
            parse_text(&mut reader, Some(header))
        }
        EmbeddingFormat::Word2vecBinary => parse_binary(&mut reader),
    }
}

struct Parsed {
    words: Vec<Vec<u8>>,
    dim: usize,
    data: Vec<f32>,
    /// line (or record) number of row 0
    first_line: usize,
}

impl Parsed {
    fn finish(self) -> Result<EmbeddingSet> {
        let first = self.first_line;
        EmbeddingSet::new(self.words, self.dim, self.data).map_err(|e| match e {
            wordpca_core::Error::DuplicateToken { row } => Error::DuplicateToken { line: first + row },
            wordpca_core::Error::NonFiniteValue { row, .. } => Error::NonFiniteValue { line: first + row },
            other => Error::Core(other),
        })
    }
}

fn read_header<R: BufRead>(reader: &mut R) -> Result<(usize, usize)> {
    let mut buf = Vec::new();
    reader.read_until(b'\n', &mut buf)?;
    if buf.last() != Some(&b'\n') {
        return Err(Error::MalformedHeader("missing header line".into()));
    }
    let text = std::str::from_utf8(&buf).map_err(|_| Error::MalformedHeader("header is not ASCII".into()))?;
    let mut fields = text.split_ascii_whitespace();
    let mut next = |what: &str| -> Result<usize> {
        fields
            .next()
            .and_then(|f| f.parse::<usize>().ok())
            .ok_or_else(|| Error::MalformedHeader(format!("expected {what} in {:?}", text.trim_end())))
    };
    let n = next("row count")?;
    let d = next("dimension")?;
    if fields.next().is_some() {
        return Err(Error::MalformedHeader(format!("extra fields in {:?}", text.trim_end())));
    }
    if n == 0 || d == 0 {
        return Err(Error::MalformedHeader(format!("row count and dimension must be positive, got {n} {d}")));
    }
    if d > MAX_DIM {
        return Err(Error::MalformedHeader(format!("dimension {d} exceeds the supported maximum {MAX_DIM}")));
    }
    Ok((n, d))
}

/// Upper bound on header dimensions, so a corrupt header cannot trigger a
/// huge allocation.
const MAX_DIM: usize = 1 << 20;
/// Rows reserved up front from a header count.
const MAX_PREALLOC_ROWS: usize = 1 << 16;

fn trim_line(mut line: &[u8]) -> &[u8] {
    if let [rest @ .., b'\n'] = line {
        line = rest;
    }
    if let [rest @ .., b'\r'] = line {
        line = rest;
    }
    while let [rest @ .., b' '] = line {
        line = rest;
    }
    line
}

fn parse_value(field: &[u8], line: usize) -> Result<f32> {
    let text = std::str::from_utf8(field)
        .map_err(|_| Error::MalformedNumber { line, text: String::from_utf8_lossy(field).into_owned() })?;
    let v: f32 = text.parse().map_err(|_| Error::MalformedNumber { line, text: text.to_owned() })?;
    if !v.is_finite() {
        return Err(Error::NonFiniteValue { line });
    }
    Ok(v)
}

fn parse_text<R: BufRead>(reader: &mut R, header: Option<(usize, usize)>) -> Result<EmbeddingSet> {
    let first_line = if header.is_some() { 2 } else { 1 };
    let mut out = Parsed {
        words: Vec::with_capacity(header.map_or(0, |h| h.0.min(MAX_PREALLOC_ROWS))),
        dim: header.map_or(0, |h| h.1),
        data: Vec::new(),
        first_line,
    };
    let mut buf = Vec::new();
    let mut line_no = first_line - 1;
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        if let Some((n, _)) = header {
            if out.words.len() == n {
                return Err(Error::TrailingData(n));
            }
        }
        let line = trim_line(&buf);
        if line.is_empty() {
            return Err(Error::MalformedRecord { line: line_no, reason: "empty line".into() });
        }
        let (token, rest) = match line.iter().position(|&b| b == b' ') {
            Some(0) => return Err(Error::MalformedRecord { line: line_no, reason: "empty token".into() }),
            Some(p) => (&line[..p], &line[p + 1..]),
            None => (line, &line[line.len()..]),
        };
        let start = out.data.len();
        if !rest.is_empty() {
            for field in rest.split(|&b| b == b' ') {
                out.data.push(parse_value(field, line_no)?);
            }
        }
        let found = out.data.len() - start;
        if out.dim == 0 {
            if found == 0 {
                return Err(Error::MalformedRecord { line: line_no, reason: "record has no values".into() });
            }
            out.dim = found;
        } else if found != out.dim {
            return Err(Error::DimensionMismatch { line: line_no, expected: out.dim, found });
        }
        out.words.push(token.to_vec());
    }
    if let Some((n, _)) = header {
        if out.words.len() < n {
            return Err(Error::TruncatedInput(format!("header announces {n} records, found {}", out.words.len())));
        }
    }
    if out.words.is_empty() {
        return Err(Error::TruncatedInput("no records".into()));
    }
    out.finish()
}

fn parse_binary<R: BufRead>(reader: &mut R) -> Result<EmbeddingSet> {
    let (n, d) = read_header(reader)?;
    let rows = n.min(MAX_PREALLOC_ROWS);
    let mut out = Parsed { words: Vec::with_capacity(rows), dim: d, data: Vec::with_capacity(rows * d), first_line: 1 };
    let mut token = Vec::new();
    let mut raw = vec![0u8; 4 * d];
    for record in 1..=n {
        token.clear();
        reader.read_until(b' ', &mut token)?;
        if token.pop() != Some(b' ') {
            return Err(Error::TruncatedInput(format!("record {record}: missing token terminator")));
        }
        if token.is_empty() {
            return Err(Error::MalformedRecord { line: record, reason: "empty token".into() });
        }
        reader.read_exact(&mut raw).map_err(|e| match e.kind() {
            ErrorKind::UnexpectedEof => Error::TruncatedInput(format!("record {record}: expected {d} values")),
            _ => Error::Io(e),
        })?;
        for chunk in raw.chunks_exact(4) {
            let v = f32::from_le_bytes(chunk.try_into().unwrap());
            if !v.is_finite() {
                return Err(Error::NonFiniteValue { line: record });
            }
            out.data.push(v);
        }
        if reader.fill_buf()?.first() == Some(&b'\n') {
            reader.consume(1);
        }
        out.words.push(token.clone());
    }
    if !reader.fill_buf()?.is_empty() {
        return Err(Error::TrailingData(n));
    }
    out.finish()
}

fn check_token(token: &[u8], format: EmbeddingFormat) -> Result<()> {
    let bad = token.is_empty()
        || token.contains(&b' ')
        || match format {
            EmbeddingFormat::Word2vecBinary => token[0] == b'\n',
            _ => token.contains(&b'\n'),
        };
    if bad {
        return Err(Error::UnencodableToken {
            token: String::from_utf8_lossy(token).into_owned(),
            format: format.as_str(),
        });
    }
    Ok(())
}

/// Writes `e` in `format`. Text formats use the shortest decimal that
/// round-trips each `f32`.
pub fn serialize_embeddings<W: Write>(e: &EmbeddingSet, format: EmbeddingFormat, mut w: W) -> Result<()> {
    for token in e.words() {
        check_token(token, format)?;
    }
    if format != EmbeddingFormat::GloveText {
        writeln!(w, "{} {}", e.len(), e.dim())?;
    }
    let mut line = Vec::new();
    for (token, row) in e.words().iter().zip(e.rows()) {
        line.clear();
        line.extend_from_slice(token);
        match format {
            EmbeddingFormat::Word2vecBinary => {
                line.push(b' ');
                for v in row {
                    line.extend_from_slice(&v.to_le_bytes());
                }
            }
            _ => {
                for v in row {
                    write!(line, " {v}")?;
                }
            }
        }
        line.push(b'\n');
        w.write_all(&line)?;
    }
    w.flush()?;
    Ok(())
}

/// [`serialize_embeddings`] into a fresh buffer.
pub fn serialize_to_vec(e: &EmbeddingSet, format: EmbeddingFormat) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    serialize_embeddings(e, format, &mut buf)?;
    Ok(buf)
}
