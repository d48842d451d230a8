//! Field dumps and small tables.
//!
//! CSV dumps start with one `#` line recording the box and resolution,
//! then a header `x1,…,xd,re,im` and one row per grid point in row-major
//! order (first axis slowest). Numbers use the shortest representation that
//! parses back to the same `f64`.
//!
//! Binary dumps are little-endian:
//!
//! ```text
//! magic   8 bytes  "TLFIELD1"
//! dims    u32
//! res     u32      points per axis
//! box     dims × (lo f64, hi f64)
//! count   u64      = res^dims
//! payload count × (re f64, im f64), row-major
//! ```

use std::io::{self, BufRead, BufWriter, Read, Write};

use thiserror::Error;
use torsionlab_core::exponents::TableRow;
use torsionlab_core::{Complex64, GridSpec};

pub const MAGIC: &[u8; 8] = b"TLFIELD1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("malformed field dump: {0}")]
    Malformed(String),
}

fn malformed(msg: impl Into<String>) -> FormatError {
    FormatError::Malformed(msg.into())
}

/// A complex field sampled on a cell-centred grid over a box.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldDump {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub resolution: usize,
    pub values: Vec<Complex64>,
}

impl FieldDump {
    pub fn from_grid(grid: &GridSpec, values: Vec<Complex64>) -> Self {
        FieldDump { lo: grid.lo.clone(), hi: grid.hi.clone(), resolution: grid.resolution, values }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Cell-centred coordinates of point `idx`.
    pub fn point(&self, mut idx: usize) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d];
        for axis in (0..d).rev() {
            let i = idx % self.resolution;
            idx /= self.resolution;
            let h = (self.hi[axis] - self.lo[axis]) / self.resolution as f64;
            out[axis] = self.lo[axis] + (i as f64 + 0.5) * h;
        }
        out
    }

    fn check(&self) -> Result<(), FormatError> {
        let expected = self.resolution.checked_pow(self.dim() as u32).ok_or_else(|| malformed("grid size overflows"))?;
        if self.values.len() != expected {
            return Err(malformed(format!("{} values for a {}^{} grid", self.values.len(), self.resolution, self.dim())));
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), FormatError> {
        self.check()?;
        let mut w = BufWriter::new(out);
        let boxes: Vec<String> = self.lo.iter().zip(&self.hi).map(|(a, b)| format!("{a}:{b}")).collect();
        writeln!(w, "# dims={} resolution={} box={}", self.dim(), self.resolution, boxes.join(","))?;
        let mut header: Vec<String> = (1..=self.dim()).map(|i| format!("x{i}")).collect();
        header.extend(["re".into(), "im".into()]);
        writeln!(w, "{}", header.join(","))?;
        for (idx, v) in self.values.iter().enumerate() {
            for x in self.point(idx) {
                write!(w, "{x},")?;
            }
            writeln!(w, "{},{}", v.re, v.im)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self, FormatError> {
        let mut lines = input.lines();
        let meta = lines.next().ok_or_else(|| malformed("empty file"))??;
        let meta = meta.strip_prefix("# ").ok_or_else(|| malformed("missing metadata line"))?;
        let (mut dims, mut resolution, mut lo, mut hi) = (None, None, Vec::new(), Vec::new());
        for field in meta.split_whitespace() {
            let (k, v) = field.split_once('=').ok_or_else(|| malformed(format!("bad metadata field {field:?}")))?;
            match k {
                "dims" => dims = Some(v.parse::<usize>().map_err(|_| malformed("bad dims"))?),
                "resolution" => resolution = Some(v.parse::<usize>().map_err(|_| malformed("bad resolution"))?),
                "box" => {
                    for side in v.split(',') {
                        let (a, b) = side.split_once(':').ok_or_else(|| malformed("bad box"))?;
                        lo.push(a.parse::<f64>().map_err(|_| malformed("bad box"))?);
                        hi.push(b.parse::<f64>().map_err(|_| malformed("bad box"))?);
                    }
                }
                _ => return Err(malformed(format!("unknown metadata key {k:?}"))),
            }
        }
        let dims = dims.ok_or_else(|| malformed("missing dims"))?;
        let resolution = resolution.ok_or_else(|| malformed("missing resolution"))?;
        if lo.len() != dims {
            return Err(malformed("box does not match dims"));
        }
        lines.next().ok_or_else(|| malformed("missing header"))??;
        let mut values = Vec::new();
        for line in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != dims + 2 {
                return Err(malformed(format!("row with {} columns", cols.len())));
            }
            let re = cols[dims].parse::<f64>().map_err(|_| malformed("bad value"))?;
            let im = cols[dims + 1].parse::<f64>().map_err(|_| malformed("bad value"))?;
            values.push(Complex64::new(re, im));
        }
        let dump = FieldDump { lo, hi, resolution, values };
        dump.check()?;
        Ok(dump)
    }

    pub fn write_binary<W: Write>(&self, out: W) -> Result<(), FormatError> {
        self.check()?;
        let mut w = BufWriter::new(out);
        w.write_all(MAGIC)?;
        w.write_all(&(self.dim() as u32).to_le_bytes())?;
        w.write_all(&(self.resolution as u32).to_le_bytes())?;
        for (a, b) in self.lo.iter().zip(&self.hi) {
            w.write_all(&a.to_le_bytes())?;
            w.write_all(&b.to_le_bytes())?;
        }
        w.write_all(&(self.values.len() as u64).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Self, FormatError> {
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(malformed("bad magic"));
        }
        let mut u32buf = [0u8; 4];
        input.read_exact(&mut u32buf)?;
        let dims = u32::from_le_bytes(u32buf) as usize;
        input.read_exact(&mut u32buf)?;
        let resolution = u32::from_le_bytes(u32buf) as usize;
        let mut f = || -> Result<f64, FormatError> {
            let mut b = [0u8; 8];
            input.read_exact(&mut b)?;
            Ok(f64::from_le_bytes(b))
        };
        let mut lo = Vec::with_capacity(dims);
        let mut hi = Vec::with_capacity(dims);
        for _ in 0..dims {
            lo.push(f()?);
            hi.push(f()?);
        }
        let mut u64buf = [0u8; 8];
        input.read_exact(&mut u64buf)?;
        let count = u64::from_le_bytes(u64buf) as usize;
        let expected = resolution.checked_pow(dims as u32).ok_or_else(|| malformed("grid size overflows"))?;
        if count != expected {
            return Err(malformed(format!("count {count} does not match {resolution}^{dims}")));
        }
        let mut payload = vec![0u8; count * 16];
        input.read_exact(&mut payload)?;
        let values = payload
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                Complex64::new(re, im)
            })
            .collect();
        Ok(FieldDump { lo, hi, resolution, values })
    }
}

/// `q,p,p_prime,admissible,weight_exponent` with exact rationals.
pub fn write_exponent_table<W: Write>(rows: &[TableRow], out: W) -> io::Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "q,p,p_prime,admissible,weight_exponent")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{}", r.q, r.p, r.p_prime, r.admissible, r.weight_exponent)?;
    }
    w.flush()
}
