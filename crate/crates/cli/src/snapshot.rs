//! Self-describing binary field snapshots.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! 8 bytes   magic "BENJSNAP"
//! u32       format version (1)
//! u32       header length H
//! H bytes   UTF-8 header, one `key=value` per line
//! u32       number of samples N
//! N × f64   physical-space values at x_j = L(-π + 2πj/N)
//! ```
//!
//! Floating-point header values use Rust's shortest round-trip formatting,
//! so a snapshot read back reproduces grid, time and parameters exactly.

use std::collections::BTreeMap;
use std::io::{self, Read, Write};
use std::path::Path;

use benjamin_core::spectral::make_grid;
use benjamin_core::{Model, RealField};

pub const MAGIC: &[u8; 8] = b"BENJSNAP";
pub const VERSION: u32 = 1;
pub const NORMALIZATION: &str = "fourier_series_1_over_n_origin_at_index_n_over_2";

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub header: BTreeMap<String, String>,
    pub values: Vec<f64>,
}

impl Snapshot {
    pub fn new(field: &RealField, t: f64, model: &Model, velocity: Option<f64>) -> Snapshot {
        let g = field.grid();
        let mut h = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            h.insert(k.to_string(), v);
        };
        put("format_version", VERSION.to_string());
        put("n", g.n_modes().to_string());
        put("l", format!("{:?}", g.scale()));
        put("t", format!("{t:?}"));
        put("family", model.family().to_string());
        put("alpha", format!("{:?}", model.alpha()));
        put("beta", format!("{:?}", model.beta()));
        put("delta", format!("{:?}", model.delta()));
        put("delta1", format!("{:?}", model.delta1()));
        put("delta2", format!("{:?}", model.delta2()));
        put("normalization", NORMALIZATION.to_string());
        if let Some(c) = velocity {
            put("c", format!("{c:?}"));
        }
        Snapshot {
            header: h,
            values: field.values().to_vec(),
        }
    }

    pub fn get_f64(&self, key: &str) -> io::Result<f64> {
        self.header
            .get(key)
            .ok_or_else(|| invalid(format!("header lacks {key}")))?
            .parse()
            .map_err(|e| invalid(format!("header {key}: {e}")))
    }

    pub fn n(&self) -> io::Result<usize> {
        self.header
            .get("n")
            .ok_or_else(|| invalid("header lacks n".into()))?
            .parse()
            .map_err(|e| invalid(format!("header n: {e}")))
    }

    pub fn field(&self) -> io::Result<RealField> {
        let g = make_grid(self.n()?, self.get_f64("l")?).map_err(|e| invalid(e.to_string()))?;
        RealField::new(g, self.values.clone()).map_err(|e| invalid(e.to_string()))
    }

    pub fn write_to(&self, w: &mut impl Write) -> io::Result<()> {
        let mut text = String::new();
        for (k, v) in &self.header {
            if k.contains(['=', '\n']) || v.contains('\n') {
                return Err(invalid(format!("header entry {k} cannot be encoded")));
            }
            text.push_str(k);
            text.push('=');
            text.push_str(v);
            text.push('\n');
        }
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&len32(text.len())?.to_le_bytes())?;
        w.write_all(text.as_bytes())?;
        w.write_all(&len32(self.values.len())?.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> io::Result<Snapshot> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(invalid("not a snapshot file".into()));
        }
        let version = read_u32(r)?;
        if version != VERSION {
            return Err(invalid(format!("unsupported snapshot version {version}")));
        }
        let hlen = read_u32(r)? as usize;
        let mut text = vec![0u8; hlen];
        r.read_exact(&mut text)?;
        let text = String::from_utf8(text).map_err(|e| invalid(e.to_string()))?;
        let mut header = BTreeMap::new();
        for line in text.lines() {
            let (k, v) = line.split_once('=').ok_or_else(|| invalid(format!("bad header line {line:?}")))?;
            header.insert(k.to_string(), v.to_string());
        }
        let n = read_u32(r)? as usize;
        let mut bytes = vec![0u8; 8 * n];
        r.read_exact(&mut bytes)?;
        let values = bytes.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
        let s = Snapshot { header, values };
        if s.n()? != n {
            return Err(invalid(format!("header says n = {}, payload has {n} values", s.n()?)));
        }
        Ok(s)
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut w = io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()
    }

    pub fn read(path: &Path) -> io::Result<Snapshot> {
        Snapshot::read_from(&mut io::BufReader::new(std::fs::File::open(path)?))
    }
}

fn invalid(msg: String) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg)
}

fn len32(n: usize) -> io::Result<u32> {
    u32::try_from(n).map_err(|_| invalid(format!("length {n} exceeds the 32-bit limit")))
}

fn read_u32(r: &mut impl Read) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}
