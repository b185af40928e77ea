//! On-disk store of saturation pieces.
//!
//! One file per key, named by the SHA-256 of the key's JSON. Layout:
//! magic `CNRM`, format version (u32), payload length (u64), payload,
//! SHA-256 of the payload. The payload repeats the key JSON so a hash
//! collision cannot return a foreign entry. All integers are little endian.
//! Entries that fail any check are ignored and later overwritten.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use sha2::{Digest, Sha256};

use conormal_core::conormal::{PieceKey, PieceStore, StoredPiece};
use conormal_core::exactalg::{Field, SparseVec, Subspace};

use crate::CliError;

const MAGIC: &[u8; 4] = b"CNRM";
pub const FORMAT_VERSION: u32 = 1;

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

#[derive(Debug)]
pub struct DiskCache {
    dir: PathBuf,
    hits: AtomicU64,
    misses: AtomicU64,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        if self.buf.len() < n {
            return None;
        }
        let (a, b) = self.buf.split_at(n);
        self.buf = b;
        Some(a)
    }

    fn u32(&mut self) -> Option<u32> {
        Some(u32::from_le_bytes(self.take(4)?.try_into().ok()?))
    }

    fn u64(&mut self) -> Option<u64> {
        Some(u64::from_le_bytes(self.take(8)?.try_into().ok()?))
    }

    fn len(&mut self) -> Option<usize> {
        usize::try_from(self.u64()?).ok()
    }
}

fn encode(key_json: &[u8], piece: &StoredPiece) -> Vec<u8> {
    let mut p = Vec::new();
    p.extend((key_json.len() as u64).to_le_bytes());
    p.extend(key_json);
    p.extend(piece.stabilization_m.to_le_bytes());
    p.extend((piece.chain_dims.len() as u64).to_le_bytes());
    for &d in &piece.chain_dims {
        p.extend((d as u64).to_le_bytes());
    }
    let sat = &piece.sat;
    p.extend((sat.ambient_dim() as u64).to_le_bytes());
    p.extend((sat.dim() as u64).to_le_bytes());
    for (row, &pivot) in sat.rows().iter().zip(sat.pivot_cols()) {
        let sv = row.to_sparse();
        p.extend((pivot as u64).to_le_bytes());
        p.extend((sv.nnz() as u64).to_le_bytes());
        for (i, v) in sv.iter() {
            p.extend((i as u32).to_le_bytes());
            p.extend(v.to_le_bytes());
        }
    }
    p
}

fn decode(field: &Field, key_json: &[u8], payload: &[u8]) -> Option<StoredPiece> {
    let mut r = Reader { buf: payload };
    let klen = r.len()?;
    if r.take(klen)? != key_json {
        return None;
    }
    let stabilization_m = r.u32()?;
    let n_chain = r.len()?;
    let mut chain_dims = Vec::with_capacity(n_chain.min(64));
    for _ in 0..n_chain {
        chain_dims.push(r.len()?);
    }
    let ambient = r.len()?;
    let dim = r.len()?;
    let mut pivots = Vec::with_capacity(dim.min(ambient));
    let mut rows = Vec::with_capacity(dim.min(ambient));
    for _ in 0..dim {
        pivots.push(r.len()?);
        let nnz = r.len()?;
        let mut pairs = Vec::with_capacity(nnz.min(ambient));
        for _ in 0..nnz {
            pairs.push((r.u32()?, r.u32()?));
        }
        rows.push(SparseVec::from_pairs(field, pairs));
    }
    if !r.buf.is_empty() {
        return None;
    }
    let sat = Subspace::from_echelon(field, ambient, pivots, rows).ok()?;
    Some(StoredPiece { sat, stabilization_m, chain_dims })
}

impl DiskCache {
    pub fn open(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(DiskCache { dir: dir.to_path_buf(), hits: AtomicU64::new(0), misses: AtomicU64::new(0) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// `(hits, misses)` since the cache was opened.
    pub fn stats(&self) -> (u64, u64) {
        (self.hits.load(Ordering::Relaxed), self.misses.load(Ordering::Relaxed))
    }

    fn key_json(key: &PieceKey) -> Vec<u8> {
        serde_json::to_vec(key).expect("keys serialize")
    }

    pub fn path_for(&self, key: &PieceKey) -> PathBuf {
        let digest = Sha256::digest(Self::key_json(key));
        self.dir.join(format!("{}.bin", hex(&digest)))
    }

    fn read(&self, key: &PieceKey) -> Option<StoredPiece> {
        let bytes = fs::read(self.path_for(key)).ok()?;
        let mut r = Reader { buf: &bytes };
        if r.take(4)? != MAGIC || r.u32()? != FORMAT_VERSION {
            return None;
        }
        let len = r.len()?;
        let payload = r.take(len)?;
        let sum = r.take(32)?;
        if !r.buf.is_empty() || Sha256::digest(payload).as_slice() != sum {
            return None;
        }
        decode(&Field::new(key.prime), &Self::key_json(key), payload)
    }

    fn write(&self, key: &PieceKey, piece: &StoredPiece) -> std::io::Result<()> {
        let payload = encode(&Self::key_json(key), piece);
        let path = self.path_for(key);
        let tmp = self.dir.join(format!(
            ".{}.{}.{}.tmp",
            path.file_name().and_then(|s| s.to_str()).unwrap_or("entry"),
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        let mut f = fs::File::create(&tmp)?;
        f.write_all(MAGIC)?;
        f.write_all(&FORMAT_VERSION.to_le_bytes())?;
        f.write_all(&(payload.len() as u64).to_le_bytes())?;
        f.write_all(&payload)?;
        f.write_all(&Sha256::digest(&payload))?;
        f.sync_all()?;
        fs::rename(&tmp, &path)
    }
}

impl PieceStore for DiskCache {
    fn load(&self, key: &PieceKey) -> Option<StoredPiece> {
        let got = self.read(key);
        let counter = if got.is_some() { &self.hits } else { &self.misses };
        counter.fetch_add(1, Ordering::Relaxed);
        got
    }

    fn save(&self, key: &PieceKey, piece: &StoredPiece) {
        // A failed write only costs a recomputation later.
        let _ = self.write(key, piece);
    }
}
