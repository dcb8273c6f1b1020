//! On-disk RDM storage: one binary tensor file per tensor plus a JSON
//! sidecar.
//!
//! Tensor layout (little endian): magic `QRDMTNSR`, `u32` format version,
//! `u32` rank, `u32` orbital count, then `n^rank` `f64` values row-major.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RdmSet;
use crate::error::{Error, Result};
use crate::tensor::Tensor;

const MAGIC: &[u8; 8] = b"QRDMTNSR";
const VERSION: u32 = 1;

pub fn write_tensor(mut w: impl Write, t: &Tensor) -> Result<()> {
    w.write_all(MAGIC)?;
    for v in [VERSION, t.rank() as u32, t.n() as u32] {
        w.write_all(&v.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(8 * t.len());
    for x in t.data() {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_tensor(mut r: impl Read) -> Result<Tensor> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Header("not a tensor file (bad magic)".into()));
    }
    let mut word = [0u8; 4];
    let mut next = |r: &mut dyn Read| -> Result<u32> {
        r.read_exact(&mut word)?;
        Ok(u32::from_le_bytes(word))
    };
    let version = next(&mut r)?;
    if version != VERSION {
        return Err(Error::Header(format!("unsupported tensor format version {version}")));
    }
    let rank = next(&mut r)? as usize;
    let n = next(&mut r)? as usize;
    let len = n.checked_pow(rank as u32).filter(|&l| l <= 1 << 31).ok_or_else(|| Error::Header("tensor too large".into()))?;
    let mut bytes = vec![0u8; 8 * len];
    r.read_exact(&mut bytes)?;
    let data = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect();
    Ok(Tensor::from_vec(n, rank, data))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdmMeta {
    pub n_active: usize,
    pub n_electrons: usize,
    /// Ranks of the Γ tensors stored.
    pub ranks: Vec<usize>,
    pub pdm4: bool,
    /// `exact`, `shots` or `oracle`.
    pub provenance: String,
    pub seed: Option<u64>,
    pub shots: Option<u64>,
    pub pmsv_retention: Option<f64>,
}

impl RdmMeta {
    pub fn describe(rdms: &RdmSet, provenance: &str) -> Self {
        let ranks = (1..=4).filter(|&k| rdms.gamma(k).is_some()).collect();
        RdmMeta {
            n_active: rdms.n_active,
            n_electrons: rdms.n_electrons,
            ranks,
            pdm4: rdms.pdm4.is_some(),
            provenance: provenance.to_string(),
            seed: None,
            shots: None,
            pmsv_retention: None,
        }
    }
}

/// Write `gamma{k}.bin`, optional `pdm4.bin` and `rdms.json` into `dir`.
pub fn save_rdms(dir: &Path, rdms: &RdmSet, meta: &RdmMeta) -> Result<()> {
    fs::create_dir_all(dir)?;
    for k in 1..=4 {
        if let Some(t) = rdms.gamma(k) {
            write_tensor(fs::File::create(dir.join(format!("gamma{k}.bin")))?, t)?;
        }
    }
    if let Some(p) = &rdms.pdm4 {
        write_tensor(fs::File::create(dir.join("pdm4.bin"))?, p)?;
    }
    fs::write(dir.join("rdms.json"), serde_json::to_string_pretty(meta)?)?;
    Ok(())
}

pub fn load_rdms(dir: &Path) -> Result<(RdmSet, RdmMeta)> {
    let meta: RdmMeta = serde_json::from_str(&fs::read_to_string(dir.join("rdms.json"))?)?;
    let load = |name: &str| -> Result<Tensor> {
        let t = read_tensor(std::io::BufReader::new(fs::File::open(dir.join(name))?))?;
        if t.n() != meta.n_active {
            return Err(Error::Header(format!("{name}: {} orbitals, sidecar says {}", t.n(), meta.n_active)));
        }
        Ok(t)
    };
    let opt = |k: usize| -> Result<Option<Tensor>> {
        if meta.ranks.contains(&k) {
            Ok(Some(load(&format!("gamma{k}.bin"))?))
        } else {
            Ok(None)
        }
    };
    let rdms = RdmSet {
        n_active: meta.n_active,
        n_electrons: meta.n_electrons,
        gamma1: load("gamma1.bin")?,
        gamma2: load("gamma2.bin")?,
        gamma3: opt(3)?,
        gamma4: opt(4)?,
        pdm4: if meta.pdm4 { Some(load("pdm4.bin")?) } else { None },
    };
    Ok((rdms, meta))
}
