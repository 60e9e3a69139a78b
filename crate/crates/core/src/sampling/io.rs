//! Angle export: one-column CSV or a little-endian `f64` array behind a
//! 16-byte header (`CDSP`, `u32` version, `u64` count).

use std::io::{Read, Write};

use crate::error::{Error, Result};

pub const BINARY_MAGIC: [u8; 4] = *b"CDSP";
pub const BINARY_VERSION: u32 = 1;

pub fn write_csv<W: Write>(thetas: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta"])?;
    for t in thetas {
        w.write_record([format!("{t:?}")])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().collect::<Vec<_>>() != ["theta"] {
        return Err(Error::Format("expected a single `theta` column".into()));
    }
    r.records()
        .map(|rec| {
            let rec = rec?;
            rec[0]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("bad angle {:?}: {e}", &rec[0])))
        })
        .collect()
}

pub fn write_binary<W: Write>(thetas: &[f64], mut out: W) -> Result<()> {
    out.write_all(&BINARY_MAGIC)?;
    out.write_all(&BINARY_VERSION.to_le_bytes())?;
    out.write_all(&(thetas.len() as u64).to_le_bytes())?;
    for t in thetas {
        out.write_all(&t.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<Vec<f64>> {
    let mut header = [0u8; 16];
    input.read_exact(&mut header)?;
    if header[..4] != BINARY_MAGIC {
        return Err(Error::Format("missing CDSP magic".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().expect("4 bytes"));
    if version != BINARY_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let count = u64::from_le_bytes(header[8..16].try_into().expect("8 bytes"));
    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    if body.len() as u64 != count.saturating_mul(8) {
        return Err(Error::Format(format!("header says {count} values, body has {} bytes", body.len())));
    }
    Ok(body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip_and_layout() {
        let v = [0.0, 1.5, std::f64::consts::PI];
        let mut buf = Vec::new();
        write_binary(&v, &mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 24);
        assert_eq!(&buf[..4], b"CDSP");
        assert_eq!(read_binary(&buf[..]).unwrap(), v);
        assert!(read_binary(&buf[..30]).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let v = [0.1 + 0.2, 1e-300, 3.0];
        let mut buf = Vec::new();
        write_csv(&v, &mut buf).unwrap();
        assert_eq!(read_csv(&buf[..]).unwrap(), v);
        assert!(read_csv(&b"phi\n1\n"[..]).is_err());
    }
}
