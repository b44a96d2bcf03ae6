//! NSFLD1 snapshot files.
//!
//! Layout: 8-byte magic `NSFLD1\0\0`, then little-endian header
//! `{version u32, nx u32, ny u32, lx f64, h f64, time f64, nu f64, bc u8, beta f64, alpha0 f64}`,
//! then `u` and `v` as row-major `f64` (`[i * ny + j]`).

use std::fs;
use std::path::Path;

use super::report::sha256_hex;
use crate::error::{Error, Result};
use crate::fields::{BcKind, DomainSpec, ScalarField, VelocityField};

pub const MAGIC: [u8; 8] = *b"NSFLD1\0\0";
pub const VERSION: u32 = 1;
/// Bytes before the payload.
pub const HEADER_LEN: usize = 8 + 4 * 3 + 8 * 4 + 1 + 8 * 2;

pub fn encode(vel: &VelocityField) -> Vec<u8> {
    let d = vel.domain();
    let mut b = Vec::with_capacity(HEADER_LEN + 16 * d.len());
    b.extend_from_slice(&MAGIC);
    b.extend_from_slice(&VERSION.to_le_bytes());
    b.extend_from_slice(&(d.nx as u32).to_le_bytes());
    b.extend_from_slice(&(d.ny as u32).to_le_bytes());
    for x in [d.lx, d.h, vel.time(), vel.nu] {
        b.extend_from_slice(&x.to_le_bytes());
    }
    b.push(d.bc.as_u8());
    b.extend_from_slice(&d.beta.to_le_bytes());
    b.extend_from_slice(&d.alpha0.to_le_bytes());
    for x in vel.u.data.iter().chain(&vel.v.data) {
        b.extend_from_slice(&x.to_le_bytes());
    }
    b
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize, what: &str) -> Result<&[u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::Format {
                offset: self.buf.len(),
                msg: format!("truncated while reading {what}: need {n} bytes at offset {}", self.pos),
            });
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

/// Decodes a snapshot; `t_final` of the returned domain is set to the snapshot time.
pub fn decode(buf: &[u8]) -> Result<VelocityField> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(8, "magic")? != MAGIC {
        return Err(Error::Format {
            offset: 0,
            msg: "magic mismatch (not an NSFLD1 file)".into(),
        });
    }
    let version = r.u32("version")?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let nx = r.u32("nx")? as usize;
    let ny = r.u32("ny")? as usize;
    let lx = r.f64("lx")?;
    let h = r.f64("h")?;
    let time = r.f64("time")?;
    let nu = r.f64("nu")?;
    let bc_off = r.pos;
    let bc_tag = r.take(1, "bc")?[0];
    let bc = BcKind::from_u8(bc_tag).ok_or(Error::Format {
        offset: bc_off,
        msg: format!("unknown boundary tag {bc_tag}"),
    })?;
    let beta = r.f64("beta")?;
    let alpha0 = r.f64("alpha0")?;
    let domain = DomainSpec {
        lx,
        h,
        nx,
        ny,
        t_final: time.max(0.0),
        bc,
        alpha0,
        beta,
    };
    domain.validate().map_err(|e| Error::Format {
        offset: 8,
        msg: e.to_string(),
    })?;
    let n = nx * ny;
    let expected = HEADER_LEN + 16 * n;
    if buf.len() != expected {
        return Err(Error::Format {
            offset: buf.len().min(expected),
            msg: format!("payload size {} does not match header ({} bytes expected)", buf.len(), expected),
        });
    }
    let mut read_comp = |name: &str| -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let off = r.pos;
            let v = r.f64(name)?;
            if !v.is_finite() {
                return Err(Error::Format {
                    offset: off,
                    msg: format!("non-finite value in {name}"),
                });
            }
            out.push(v);
        }
        Ok(out)
    };
    let u = read_comp("u")?;
    let v = read_comp("v")?;
    Ok(VelocityField {
        u: ScalarField { domain, time, data: u },
        v: ScalarField { domain, time, data: v },
        nu,
    })
}

pub fn save_snapshot(path: &Path, vel: &VelocityField) -> Result<()> {
    fs::write(path, encode(vel)).map_err(|e| Error::io(path, e))
}

pub fn load_snapshot(path: &Path) -> Result<VelocityField> {
    let buf = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&buf)
}

/// Every `*.nsfld` file in `dir`, ordered by file name, with the SHA-256 of its bytes.
/// Decode errors name the offending file.
pub fn load_series(dir: &Path) -> Result<Vec<(String, String, VelocityField)>> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".nsfld"))
        .collect();
    names.sort();
    if names.is_empty() {
        return Err(Error::io(
            dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no .nsfld snapshots"),
        ));
    }
    let mut out = Vec::with_capacity(names.len());
    for n in names {
        let p = dir.join(&n);
        let buf = fs::read(&p).map_err(|e| Error::io(&p, e))?;
        let vel = decode(&buf).map_err(|e| match e {
            Error::Format { offset, msg } => Error::Format {
                offset,
                msg: format!("{}: {msg}", p.display()),
            },
            other => other,
        })?;
        out.push((n, sha256_hex(&buf), vel));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> VelocityField {
        let d = DomainSpec::navier_friction(2.0, 1.0, 8, 9, 1.0, 0.3, 0.5).unwrap();
        let mut v = VelocityField {
            u: ScalarField::from_fn(&d, |x, y| x * 1.1 - y / 3.0),
            v: ScalarField::from_fn(&d, |x, y| (x * y).sin()),
            nu: 1.25e-3,
        };
        v.set_time(0.3);
        v
    }

    #[test]
    fn round_trip_is_bitwise() {
        let a = sample();
        let b = decode(&encode(&a)).unwrap();
        assert_eq!(encode(&a), encode(&b));
        for (x, y) in a.u.data.iter().zip(&b.u.data) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        assert_eq!(b.nu.to_bits(), a.nu.to_bits());
    }

    #[test]
    fn truncation_reports_offset() {
        let bytes = encode(&sample());
        let cut = &bytes[..bytes.len() - 5];
        match decode(cut) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, cut.len()),
            other => panic!("unexpected {other:?}"),
        }
        match decode(&bytes[..20]) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 20),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn version_and_magic_checked() {
        let mut bytes = encode(&sample());
        bytes[8] = 2;
        assert!(matches!(decode(&bytes), Err(Error::UnsupportedVersion(2))));
        let mut bytes = encode(&sample());
        bytes[0] = b'X';
        assert!(matches!(decode(&bytes), Err(Error::Format { offset: 0, .. })));
    }

    #[test]
    fn nan_payload_rejected() {
        let mut bytes = encode(&sample());
        let off = HEADER_LEN + 8 * 3;
        bytes[off..off + 8].copy_from_slice(&f64::NAN.to_le_bytes());
        match decode(&bytes) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, off),
            other => panic!("unexpected {other:?}"),
        }
    }
}
