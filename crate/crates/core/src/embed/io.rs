//! Model files.
//!
//! Binary layout (all integers little-endian):
//!
//! ```text
//! magic      8 bytes  "LSEMBED\0"
//! version    u32      1
//! dim        u32
//! vocab      u64      number of entries
//! config     u32 length + UTF-8 JSON of EmbedConfig
//! entries    vocab × (u32 length + UTF-8 key, tokens separated by one space)
//! vectors    vocab × dim × f32
//! ```
//!
//! The text export is a `<entries> <dim>` header line followed by one
//! `key v1 ... v_dim` line per entry. Keys of bigrams and trigrams contain
//! spaces; the last `dim` fields of a line are always the vector.

use std::io::{BufRead, Read, Write};

use super::vocab::{NgramKey, Vocab};
use super::{EmbedConfig, EmbeddingModel};
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"LSEMBED\0";
const VERSION: u32 = 1;

fn werr(e: std::io::Error) -> Error {
    Error::io("<model>", e)
}

pub fn write_model<W: Write>(model: &EmbeddingModel, mut w: W) -> Result<()> {
    let config = serde_json::to_vec(&model.config)?;
    w.write_all(MAGIC).map_err(werr)?;
    w.write_all(&VERSION.to_le_bytes()).map_err(werr)?;
    w.write_all(&(model.dim as u32).to_le_bytes()).map_err(werr)?;
    w.write_all(&(model.vocab.len() as u64).to_le_bytes())
        .map_err(werr)?;
    w.write_all(&(config.len() as u32).to_le_bytes())
        .map_err(werr)?;
    w.write_all(&config).map_err(werr)?;
    for key in model.vocab.keys() {
        let s = key.to_string();
        w.write_all(&(s.len() as u32).to_le_bytes()).map_err(werr)?;
        w.write_all(s.as_bytes()).map_err(werr)?;
    }
    let mut buf = Vec::with_capacity(model.vectors.len() * 4);
    for x in &model.vectors {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    w.write_all(&buf).map_err(werr)?;
    w.flush().map_err(werr)
}

fn read_exact<R: Read>(r: &mut R, n: usize) -> Result<Vec<u8>> {
    let mut buf = vec![0u8; n];
    r.read_exact(&mut buf)
        .map_err(|e| Error::ModelFormat(format!("truncated file: {e}")))?;
    Ok(buf)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let b = read_exact(r, 4)?;
    Ok(u32::from_le_bytes(b.try_into().expect("4 bytes")))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let b = read_exact(r, 8)?;
    Ok(u64::from_le_bytes(b.try_into().expect("8 bytes")))
}

fn read_string<R: Read>(r: &mut R) -> Result<String> {
    let n = read_u32(r)? as usize;
    String::from_utf8(read_exact(r, n)?)
        .map_err(|_| Error::ModelFormat("key is not UTF-8".into()))
}

pub fn read_model<R: Read>(mut r: R) -> Result<EmbeddingModel> {
    if read_exact(&mut r, 8)? != MAGIC {
        return Err(Error::ModelFormat("bad magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::ModelFormat(format!("unsupported version {version}")));
    }
    let dim = read_u32(&mut r)? as usize;
    let n = read_u64(&mut r)? as usize;
    let config_len = read_u32(&mut r)? as usize;
    let config: EmbedConfig = serde_json::from_slice(&read_exact(&mut r, config_len)?)?;
    if config.dim != dim {
        return Err(Error::ModelFormat(format!(
            "header dim {dim} disagrees with config dim {}",
            config.dim
        )));
    }
    let mut keys = Vec::with_capacity(n.min(1 << 24));
    for _ in 0..n {
        keys.push(NgramKey::parse(&read_string(&mut r)?));
    }
    let vocab = Vocab::from_keys(keys)?;
    let raw = read_exact(&mut r, n * dim * 4)?;
    let vectors = raw
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect();
    let mut rest = [0u8; 1];
    if r.read(&mut rest).map_err(werr)? != 0 {
        return Err(Error::ModelFormat("trailing bytes after vectors".into()));
    }
    Ok(EmbeddingModel {
        dim,
        vocab,
        vectors,
        config,
    })
}

pub fn write_text_export<W: Write>(model: &EmbeddingModel, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", model.vocab.len(), model.dim).map_err(werr)?;
    for (i, key) in model.vocab.keys().iter().enumerate() {
        write!(w, "{key}").map_err(werr)?;
        for x in model.vector(i) {
            write!(w, " {x}").map_err(werr)?;
        }
        writeln!(w).map_err(werr)?;
    }
    w.flush().map_err(werr)
}

/// Reads a text export back into `(key, vector)` pairs.
pub fn read_text_export<R: BufRead>(r: R) -> Result<Vec<(String, Vec<f32>)>> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::ModelFormat("empty text export".into()))?
        .map_err(werr)?;
    let mut it = header.split_whitespace();
    let parse = |s: Option<&str>| -> Result<usize> {
        s.and_then(|x| x.parse().ok())
            .ok_or_else(|| Error::ModelFormat(format!("bad header {header:?}")))
    };
    let n = parse(it.next())?;
    let dim = parse(it.next())?;
    let mut out = Vec::with_capacity(n);
    for line in lines {
        let line = line.map_err(werr)?;
        let fields: Vec<&str> = line.split(' ').collect();
        if fields.len() <= dim {
            return Err(Error::ModelFormat(format!("short line {line:?}")));
        }
        let split = fields.len() - dim;
        let vec = fields[split..]
            .iter()
            .map(|f| {
                f.parse::<f32>()
                    .map_err(|_| Error::ModelFormat(format!("bad number {f:?}")))
            })
            .collect::<Result<Vec<f32>>>()?;
        out.push((fields[..split].join(" "), vec));
    }
    if out.len() != n {
        return Err(Error::ModelFormat(format!(
            "header says {n} entries, found {}",
            out.len()
        )));
    }
    Ok(out)
}
