//! On-disk cache of residue Kloosterman tables.
//!
//! File layout: `TFS1`, a version byte, then `p, e, tag, d, ℓ` as
//! little-endian `u64`, then one little-endian `u64` residue per entry.
//! For Kloosterman tables the tag is the rank `n` and the entries cover
//! `F_q^×` in index order.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::cyclotomic::PrimeIdealDeg1;
use crate::field::FiniteField;
use crate::trace::{self, Domain, Embedding, Family, TraceError, TraceTable, TraceValues};

pub const MAGIC: &[u8; 4] = b"TFS1";
pub const VERSION: u8 = 1;
pub const CACHE_DIR_ENV: &str = "FROBSIEVE_CACHE_DIR";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache I/O: {0}")]
    Io(#[from] io::Error),
    #[error("BadMagic")]
    BadMagic,
    #[error("UnsupportedVersion({0})")]
    UnsupportedVersion(u8),
    #[error("Truncated: expected {expected} entries, found {found}")]
    Truncated { expected: u64, found: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CacheHeader {
    pub p: u64,
    pub e: u64,
    pub tag: u64,
    pub d: u64,
    pub ell: u64,
}

pub fn write_table<W: Write>(mut w: W, h: &CacheHeader, values: &[u64]) -> io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&[VERSION])?;
    for v in [h.p, h.e, h.tag, h.d, h.ell] {
        w.write_all(&v.to_le_bytes())?;
    }
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()
}

/// Reads a table, checking that exactly `expected` entries follow the header.
pub fn read_table<R: Read>(mut r: R, expected: u64) -> Result<(CacheHeader, Vec<u64>), CacheError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(CacheError::BadMagic);
    }
    let mut version = [0u8; 1];
    r.read_exact(&mut version)?;
    if version[0] != VERSION {
        return Err(CacheError::UnsupportedVersion(version[0]));
    }
    let mut word = [0u8; 8];
    let mut fields = [0u64; 5];
    for f in fields.iter_mut() {
        r.read_exact(&mut word)?;
        *f = u64::from_le_bytes(word);
    }
    let [p, e, tag, d, ell] = fields;
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    let found = (body.len() / 8) as u64;
    if body.len() % 8 != 0 || found != expected {
        return Err(CacheError::Truncated { expected, found });
    }
    let values = body
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((CacheHeader { p, e, tag, d, ell }, values))
}

/// A directory of cached tables, one file per `(p, e, n, d, ℓ)`.
#[derive(Clone, Debug)]
pub struct TraceCache {
    dir: PathBuf,
}

impl TraceCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        TraceCache { dir: dir.into() }
    }

    /// Uses `$FROBSIEVE_CACHE_DIR` when set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_DIR_ENV).map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, h: &CacheHeader) -> PathBuf {
        self.dir.join(format!(
            "kl_p{}_e{}_n{}_d{}_l{}.tfs",
            h.p, h.e, h.tag, h.d, h.ell
        ))
    }

    fn load(&self, h: &CacheHeader, expected: u64) -> Option<Vec<u64>> {
        let file = fs::File::open(self.path(h)).ok()?;
        match read_table(io::BufReader::new(file), expected) {
            Ok((found, values)) if found == *h && values.iter().all(|&v| v < h.ell) => Some(values),
            _ => None,
        }
    }

    fn store(&self, h: &CacheHeader, values: &[u64]) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(h);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        write_table(io::BufWriter::new(fs::File::create(&tmp)?), h, values)?;
        fs::rename(tmp, path)
    }
}

/// Unnormalized residue Kloosterman table, read from or written to `cache`
/// when the ideal uses the canonical `ω`.
pub fn kloosterman_table_cached(
    n: u32,
    field: &FiniteField,
    ideal: &PrimeIdealDeg1,
    cache: Option<&TraceCache>,
) -> Result<TraceTable, TraceError> {
    let emb = Embedding::Residue(ideal.clone());
    let canonical = PrimeIdealDeg1::canonical(ideal.d, ideal.ell).ok().as_ref() == Some(ideal);
    let Some(cache) = cache.filter(|_| canonical) else {
        return trace::kloosterman_table(n, field, &emb);
    };
    emb.validate(field.p())?;
    let header = CacheHeader {
        p: field.p(),
        e: field.e() as u64,
        tag: n as u64,
        d: ideal.d,
        ell: ideal.ell,
    };
    if let Some(values) = cache.load(&header, field.order() - 1) {
        return Ok(TraceTable {
            family: Family::Kloosterman { n },
            p: field.p(),
            e: field.e(),
            embedding: emb,
            domain: Domain::Units,
            normalized: false,
            values: TraceValues::Residue(values),
        });
    }
    let table = trace::kloosterman_table(n, field, &emb)?;
    // a failed write only costs a recomputation next time
    let _ = cache.store(&header, table.residues().unwrap());
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    #[test]
    fn header_layout() {
        let h = CacheHeader {
            p: 5,
            e: 2,
            tag: 3,
            d: 20,
            ell: 41,
        };
        let mut buf = Vec::new();
        write_table(&mut buf, &h, &[1, 40]).unwrap();
        assert_eq!(&buf[..4], b"TFS1");
        assert_eq!(buf[4], VERSION);
        assert_eq!(buf.len(), 5 + 5 * 8 + 2 * 8);
        assert_eq!(u64::from_le_bytes(buf[5..13].try_into().unwrap()), 5);
        assert_eq!(u64::from_le_bytes(buf[37..45].try_into().unwrap()), 41);
        let (h2, v) = read_table(&buf[..], 2).unwrap();
        assert_eq!(h2, h);
        assert_eq!(v, vec![1, 40]);
        assert!(matches!(read_table(&buf[..buf.len() - 3], 2), Err(CacheError::Truncated { .. })));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_table(&bad[..], 2), Err(CacheError::BadMagic)));
    }

    #[test]
    fn cached_tables_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TraceCache::new(dir.path());
        let field = make_field(5, 2).unwrap();
        let ideal = PrimeIdealDeg1::canonical(20, 41).unwrap();
        let fresh = kloosterman_table_cached(2, &field, &ideal, Some(&cache)).unwrap();
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
        let again = kloosterman_table_cached(2, &field, &ideal, Some(&cache)).unwrap();
        assert_eq!(fresh, again);
        let direct = trace::kloosterman_table(2, &field, &Embedding::Residue(ideal.clone())).unwrap();
        assert_eq!(direct, again);

        let twisted = ideal.conjugate(3).unwrap();
        kloosterman_table_cached(2, &field, &twisted, Some(&cache)).unwrap();
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
