//! Deterministic report emission: sorted-key JSON, CSV tables and content hashes.
//! Column layouts are documented in `docs/csv_schema.md`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analysis::{SweepArtifacts, SweepReport};
use crate::error::{Error, Result};
use crate::norms::StructureFunctionTable;

pub const TOOL_NAME: &str = "nslab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Pretty JSON with object keys in lexicographic order and a trailing newline.
pub fn sorted_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::InvalidArgument(format!("serialization: {e}")))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::InvalidArgument(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn hash_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// A JSON summary together with the exact configuration, tool version and input hashes.
#[derive(Clone, Debug, Serialize)]
pub struct ReportBundle<T> {
    pub tool: String,
    pub version: String,
    /// Resolved configuration text.
    pub config: String,
    pub config_sha256: String,
    /// SHA-256 of input files, keyed by file name.
    pub inputs: BTreeMap<String, String>,
    pub report: T,
}

impl<T: Serialize> ReportBundle<T> {
    pub fn new(config_text: &str, report: T) -> Self {
        ReportBundle {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            config: config_text.to_string(),
            config_sha256: sha256_hex(config_text.as_bytes()),
            inputs: BTreeMap::new(),
            report,
        }
    }

    pub fn with_input(mut self, name: impl Into<String>, sha256: String) -> Self {
        self.inputs.insert(name.into(), sha256);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        sorted_json(self)
    }
}

/// One row per shift plus one `avg` row per magnitude.
pub fn s2_csv(table: &StructureFunctionTable) -> String {
    let mut s = String::from("direction,dir_x,dir_y,magnitude,r_x,r_y,r_norm,s2\n");
    for (sh, v) in table.shifts.shifts.iter().zip(&table.values) {
        let d = table.shifts.directions[sh.direction];
        let _ = writeln!(
            s,
            "{},{:.17e},{:.17e},{},{:.17e},{:.17e},{:.17e},{:.17e}",
            sh.direction,
            d[0],
            d[1],
            sh.magnitude,
            sh.r[0],
            sh.r[1],
            sh.norm(),
            v
        );
    }
    for (m, (r, v)) in table.radii.iter().zip(&table.averaged).enumerate() {
        let _ = writeln!(s, "avg,,,{m},,,{r:.17e},{v:.17e}");
    }
    s
}

pub fn residuals_csv(report: &SweepReport) -> String {
    let mut s = String::from("nu,field,euler,viscous,grad_phi_l2l2,phi_w1_inf,scaled_defect\n");
    for rec in &report.records {
        let Some(res) = &rec.residuals else { continue };
        let defects = res.scaled_defects();
        for j in 0..res.euler.len() {
            let _ = writeln!(
                s,
                "{:.17e},{j},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                rec.nu, res.euler[j], res.viscous[j], res.grad_phi_l2l2[j], res.phi_w1_inf[j], defects[j]
            );
        }
    }
    s
}

/// Writes `sweep_report.json`, `config.cfg`, `residuals.csv`, and `s2_nu_<k>.csv` plus
/// `energy_nu_<k>.csv` for every viscosity that produced data (`k` indexes the viscosities
/// in decreasing order). Returns the written paths.
pub fn emit_sweep(
    out_dir: &Path,
    bundle: &ReportBundle<SweepReport>,
    artifacts: &SweepArtifacts,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut put = |name: String, contents: String| -> Result<()> {
        let p = out_dir.join(name);
        write_file(&p, contents)?;
        written.push(p);
        Ok(())
    };
    put("sweep_report.json".into(), bundle.to_json()?)?;
    put("config.cfg".into(), bundle.config.clone())?;
    put("residuals.csv".into(), residuals_csv(&bundle.report))?;
    for (k, t) in artifacts.tables.iter().enumerate() {
        if let Some(t) = t {
            put(format!("s2_nu_{k}.csv"), s2_csv(t))?;
        }
    }
    for (k, l) in artifacts.ledgers.iter().enumerate() {
        if let Some(l) = l {
            put(format!("energy_nu_{k}.csv"), l.to_csv())?;
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{run_sweep, SweepConfig};

    #[test]
    fn json_keys_are_sorted() {
        #[derive(Serialize)]
        struct S {
            zeta: u8,
            alpha: u8,
            mid: BTreeMap<String, u8>,
        }
        let s = sorted_json(&S {
            zeta: 1,
            alpha: 2,
            mid: BTreeMap::new(),
        })
        .unwrap();
        let a = s.find("alpha").unwrap();
        let m = s.find("mid").unwrap();
        let z = s.find("zeta").unwrap();
        assert!(a < m && m < z);
    }

    #[test]
    fn sha256_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn empty_sweep_reports_insufficient_data() {
        let mut cfg = SweepConfig::reference();
        cfg.nus.clear();
        let (rep, art) = run_sweep(&cfg).unwrap();
        let bundle = ReportBundle::new("nus =\n", rep);
        let json = bundle.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["report"]["cross"]["zeta2_common"], "insufficient data");
        assert_eq!(v["report"]["cross"]["anomaly"], "insufficient data");
        assert_eq!(v["version"], TOOL_VERSION);

        let dir = std::env::temp_dir().join(format!("nslab_empty_{}", std::process::id()));
        let files = emit_sweep(&dir, &bundle, &art).unwrap();
        assert_eq!(files.len(), 3);
        let first = fs::read(dir.join("sweep_report.json")).unwrap();
        emit_sweep(&dir, &bundle, &art).unwrap();
        assert_eq!(first, fs::read(dir.join("sweep_report.json")).unwrap());
        fs::remove_dir_all(&dir).unwrap();
    }
}
