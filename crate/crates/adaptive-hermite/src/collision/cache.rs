//! Binary on-disk cache of assembled collision tensors.
//!
//! Layout (little endian): magic `HBCT`, `u32` version, `u8` kernel tag,
//! two `f64` kernel parameters, `u32` N0, three `u32` quadrature orders,
//! `f64` relaxation rate, then `term_count(N0)^3` `f64` entries in `[k][i][j]`
//! order. Only tensors assembled at scaling 1 are stored.

use super::assembly::QuadOrders;
use super::kernel::KernelSpec;
use super::tensor::{assemble_tensor, CollisionTensor};
use crate::error::{Error, Result};
use crate::hermite::{rank, term_count, BasisSpec};
use crate::moments::moment_weights;
use sha2::{Digest, Sha256};
use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

const MAGIC: &[u8; 4] = b"HBCT";
const VERSION: u32 = 1;

fn kernel_fields(k: &KernelSpec) -> (u8, f64, f64) {
    match *k {
        KernelSpec::IsotropicMaxwell { strength } => (0, 0.0, strength),
        KernelSpec::Vhs { exponent, strength } => (1, exponent, strength),
        KernelSpec::InversePower { eta, strength } => (2, eta, strength),
    }
}

fn kernel_from_fields(tag: u8, p: f64, strength: f64) -> Result<KernelSpec> {
    let k = match tag {
        0 => KernelSpec::IsotropicMaxwell { strength },
        1 => KernelSpec::Vhs { exponent: p, strength },
        2 => KernelSpec::InversePower { eta: p, strength },
        _ => return Err(Error::Cache(format!("unknown kernel tag {tag}"))),
    };
    k.validate().map_err(|e| Error::Cache(e.to_string()))?;
    Ok(k)
}

/// Content-addressed file name for a tensor configuration.
pub fn cache_file_name(kernel: &KernelSpec, n0: u32, orders: QuadOrders) -> String {
    let (tag, p, s) = kernel_fields(kernel);
    let mut h = Sha256::new();
    h.update([tag]);
    h.update(p.to_bits().to_le_bytes());
    h.update(s.to_bits().to_le_bytes());
    h.update(n0.to_le_bytes());
    for o in [orders.velocity, orders.radial, orders.sphere] {
        h.update(o.to_le_bytes());
    }
    let digest = h.finalize();
    let hex: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
    format!("tensor-n{n0}-{hex}.hbct")
}

/// Writes `tensor` to `path`.
pub fn save_tensor(tensor: &CollisionTensor, path: &Path) -> Result<()> {
    if tensor.beta() != 1.0 {
        return Err(Error::Cache("only tensors assembled at scaling 1 can be cached".into()));
    }
    let mut w = BufWriter::new(fs::File::create(path)?);
    let (tag, p, s) = kernel_fields(tensor.kernel());
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[tag])?;
    w.write_all(&p.to_le_bytes())?;
    w.write_all(&s.to_le_bytes())?;
    w.write_all(&tensor.n0().to_le_bytes())?;
    let o = tensor.orders();
    for v in [o.velocity, o.radial, o.sphere] {
        w.write_all(&v.to_le_bytes())?;
    }
    w.write_all(&tensor.nu().to_le_bytes())?;
    for x in tensor.entries() {
        w.write_all(&x.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(f64::from_le_bytes(b))
}

fn truncated(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::Cache("file is truncated".into())
    } else {
        Error::Io(e)
    }
}

/// Reads a tensor written by [`save_tensor`] and checks that it conserves
/// mass, momentum and energy.
pub fn load_tensor(path: &Path) -> Result<CollisionTensor> {
    let mut r = BufReader::new(fs::File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(truncated)?;
    if &magic != MAGIC {
        return Err(Error::Cache(format!("{} is not a tensor cache file", path.display())));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::Cache(format!("unsupported cache version {version}")));
    }
    let mut tag = [0u8; 1];
    r.read_exact(&mut tag).map_err(truncated)?;
    let p = read_f64(&mut r)?;
    let s = read_f64(&mut r)?;
    let kernel = kernel_from_fields(tag[0], p, s)?;
    let n0 = read_u32(&mut r)?;
    if n0 > 40 {
        return Err(Error::Cache(format!("implausible order N0 = {n0}")));
    }
    let orders = QuadOrders { velocity: read_u32(&mut r)?, radial: read_u32(&mut r)?, sphere: read_u32(&mut r)? };
    let nu = read_f64(&mut r)?;
    let tc = term_count(n0);
    let mut bytes = vec![0u8; tc * tc * tc * 8];
    r.read_exact(&mut bytes).map_err(truncated)?;
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Cache("trailing bytes after tensor entries".into()));
    }
    let entries: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let tensor = CollisionTensor::from_entries(kernel, n0, 1.0, orders, nu, entries)
        .map_err(|e| Error::Cache(e.to_string()))?;
    let defect = conservation_defect(&tensor);
    if defect > 1e-10 {
        return Err(Error::Cache(format!(
            "tensor violates conservation (relative defect {defect:.3e}); the file is corrupt"
        )));
    }
    Ok(tensor)
}

/// Largest violation of mass, momentum and energy conservation over all
/// input pairs, relative to the largest entry.
pub fn conservation_defect(tensor: &CollisionTensor) -> f64 {
    let n0 = tensor.n0();
    if n0 < 2 {
        return 0.0;
    }
    let spec = BasisSpec { order: n0, beta: tensor.beta(), zeta: [0.0; 3] };
    let mut functionals = vec![vec![(0usize, 1.0)]];
    for d in 0..3 {
        let mut e = [0u32; 3];
        e[d] = 1;
        functionals.push(vec![(rank(e), 1.0)]);
    }
    let mut energy = Vec::new();
    for d in 0..3 {
        let mut a = [0u32; 3];
        a[d] = 2;
        energy.extend(moment_weights(&spec, a, [0.0; 3]));
    }
    functionals.push(energy);
    let max = tensor.entries().iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let tc = tensor.term_count();
    let mut worst = 0.0f64;
    for i in 0..tc {
        for j in 0..tc {
            for f in &functionals {
                let v: f64 = f.iter().map(|&(k, w)| w * tensor.entry(k, i, j)).sum();
                worst = worst.max(v.abs() / max);
            }
        }
    }
    worst
}

/// Loads the tensor for this configuration from `dir`, assembling and
/// storing it on a miss.
pub fn load_or_assemble(dir: &Path, kernel: &KernelSpec, n0: u32, orders: QuadOrders) -> Result<CollisionTensor> {
    let path: PathBuf = dir.join(cache_file_name(kernel, n0, orders));
    if path.exists() {
        let t = load_tensor(&path)?;
        if t.kernel() != kernel || t.n0() != n0 || t.orders() != orders {
            return Err(Error::Cache(format!(
                "{} holds a tensor for a different configuration",
                path.display()
            )));
        }
        log::info!("loaded collision tensor from {}", path.display());
        return Ok(t);
    }
    let t = assemble_tensor(kernel, n0, orders)?;
    fs::create_dir_all(dir)?;
    save_tensor(&t, &path)?;
    log::info!("stored collision tensor in {}", path.display());
    Ok(t)
}
