//! Binary persistence for [`PcaModel`].
//!
//! Layout, all little-endian: the magic `PCAM`, the dimension `d` as `u64`,
//! then `d` means, `d × d` component entries (component after component,
//! i.e. the component matrix column-major) and `d` variances, all `f64`.

use std::io::{ErrorKind, Read, Write};

use wordpca_core::PcaModel;

use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"PCAM";
const MAX_DIM: u64 = 1 << 16;

pub fn write_model<W: Write>(model: &PcaModel, mut w: W) -> Result<()> {
    let mut buf = Vec::with_capacity(12 + 8 * (model.dim() * (model.dim() + 2)));
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(model.dim() as u64).to_le_bytes());
    for v in model.mean().iter().chain(model.components()).chain(model.variances()) {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

pub fn read_model<R: Read>(mut r: R) -> Result<PcaModel> {
    let mut head = [0u8; 12];
    r.read_exact(&mut head).map_err(|e| truncated(e, "header"))?;
    if &head[..4] != MAGIC {
        return Err(Error::MalformedHeader("missing PCAM magic".into()));
    }
    let d = u64::from_le_bytes(head[4..].try_into().unwrap());
    if d == 0 || d > MAX_DIM {
        return Err(Error::MalformedHeader(format!("implausible dimension {d}")));
    }
    let d = d as usize;
    let mut read_block = |len: usize, what: &str| -> Result<Vec<f64>> {
        let mut raw = vec![0u8; 8 * len];
        r.read_exact(&mut raw).map_err(|e| truncated(e, what))?;
        Ok(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    };
    let mean = read_block(d, "mean")?;
    let components = read_block(d * d, "components")?;
    let variances = read_block(d, "variances")?;
    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(Error::TrailingData(1));
    }
    Ok(PcaModel::from_parts(d, mean, components, variances)?)
}

fn truncated(e: std::io::Error, what: &str) -> Error {
    match e.kind() {
        ErrorKind::UnexpectedEof => Error::TruncatedInput(format!("model file ends inside {what}")),
        _ => Error::Io(e),
    }
}
