//! Flat `key = value` configuration files.
//!
//! Every key has a default except `nu` (single runs) and `nus` (sweeps). Unknown and
//! duplicate keys are errors. Environment variables `NSLAB_<KEY>` (upper case) override
//! file values. The key reference with units lives in `docs/config.md`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::analysis::{InertialThresholds, NestedRegions, SweepConfig};
use crate::error::{Error, Result};
use crate::fields::random::{Band, RandomSpectrum};
use crate::fields::{BcKind, DomainSpec, Subdomain};
use crate::solver::{AdvectionForm, ForcingKind, ForcingSpec, InitSpec, RunConfig};

pub const ENV_PREFIX: &str = "NSLAB_";

/// `(key, default)`; an empty default marks a key without one.
pub const KEYS: &[(&str, &str)] = &[
    ("lx", "6.283185307179586"),
    ("h", "3.141592653589793"),
    ("nx", "256"),
    ("ny", "129"),
    ("t_final", "1"),
    ("bc", "navier_friction"),
    ("alpha0", "0.01"),
    ("beta", "1"),
    ("nu", ""),
    ("nus", ""),
    ("dt", "0.0005"),
    ("snapshot_every", "50"),
    ("energy_fix", "true"),
    ("advection", "skew_symmetric"),
    ("init", "random"),
    ("init_zeta", "0.6666666666666666"),
    ("init_kmin", "1"),
    ("init_kmax", "12"),
    ("seed", "5"),
    ("stokes_mode", "1"),
    ("init_file", ""),
    ("forcing", "none"),
    ("forcing_amplitude", "0"),
    ("forcing_kx", "1"),
    ("forcing_ky", "1"),
    ("region_u", "0.25,0.75"),
    ("region_w", "0.3,0.7"),
    ("region_v", "0.35,0.65"),
    ("shift_directions", "eight"),
    ("shift_magnitudes", "12"),
    ("fit_magnitudes", "12"),
    ("tol_growth", "3"),
    ("zeta_floor", "0.1"),
    ("zeta_spread", "0.15"),
    ("eps", "0.05"),
    ("test_rho", "0.3"),
    ("test_tau", "0.2"),
];

#[derive(Clone, Debug, PartialEq)]
enum Source {
    File(usize),
    Env(String),
}

#[derive(Clone, Debug, PartialEq)]
struct Entry {
    value: String,
    source: Source,
}

/// Parsed configuration: explicitly set keys with their origin.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    path: Option<PathBuf>,
    entries: BTreeMap<String, Entry>,
}

fn is_known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

impl ConfigFile {
    /// Syntax pass: `key = value` lines, `#` comments, no unknown or repeated keys.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut errs = Vec::new();
        let mut lines_of: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                errs.push(format!("line {line_no}: expected `key = value`, got `{line}`"));
                continue;
            };
            let key = k.trim().to_string();
            if !is_known(&key) {
                errs.push(format!("line {line_no}: unknown key `{key}`"));
                continue;
            }
            lines_of.entry(key.clone()).or_default().push(line_no);
            entries.insert(
                key,
                Entry {
                    value: v.trim().to_string(),
                    source: Source::File(line_no),
                },
            );
        }
        for (key, lines) in &lines_of {
            if lines.len() > 1 {
                let list: Vec<String> = lines.iter().map(|l| l.to_string()).collect();
                errs.push(format!("duplicate key `{key}` on lines {}", list.join(", ")));
            }
        }
        if errs.is_empty() {
            Ok(ConfigFile { path: None, entries })
        } else {
            Err(Error::Config(errs))
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse_str(&text)?;
        cfg.path = Some(path.to_path_buf());
        Ok(cfg)
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// Sets `key` programmatically (command-line overrides such as `--seed`).
    pub fn set(&mut self, key: &str, value: impl Into<String>, origin: &str) -> Result<()> {
        if !is_known(key) {
            return Err(Error::Config(vec![format!("{origin}: unknown key `{key}`")]));
        }
        self.entries.insert(
            key.to_string(),
            Entry {
                value: value.into(),
                source: Source::Env(origin.to_string()),
            },
        );
        Ok(())
    }

    /// Applies `NSLAB_<KEY>` overrides. Variables with the prefix that name no key are
    /// left alone (the command-line front end reads a few of its own).
    pub fn apply_env<I, K, V>(&mut self, vars: I)
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        for (k, v) in vars {
            let Some(rest) = k.as_ref().strip_prefix(ENV_PREFIX) else {
                continue;
            };
            let key = rest.to_ascii_lowercase();
            if is_known(&key) {
                self.entries.insert(
                    key,
                    Entry {
                        value: v.as_ref().trim().to_string(),
                        source: Source::Env(k.as_ref().to_string()),
                    },
                );
            }
        }
    }

    fn raw(&self, key: &str) -> &str {
        match self.entries.get(key) {
            Some(e) => &e.value,
            None => KEYS.iter().find(|(k, _)| *k == key).map(|(_, d)| *d).unwrap_or(""),
        }
    }

    fn whence(&self, key: &str) -> String {
        match self.entries.get(key).map(|e| &e.source) {
            Some(Source::File(l)) => format!("line {l}: "),
            Some(Source::Env(v)) => format!("{v}: "),
            None => String::new(),
        }
    }

    /// Resolved configuration as text, every key listed (the echo-back file).
    pub fn resolved_text(&self) -> String {
        let mut out = String::from("# resolved configuration\n");
        for (k, _) in KEYS {
            let _ = writeln!(out, "{k} = {}", self.raw(k));
        }
        out
    }

    pub fn write_echo(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.resolved_text()).map_err(|e| Error::io(path, e))
    }

    pub fn run_config(&self) -> Result<RunConfig> {
        let mut r = Reader::new(self);
        let cfg = self.common(&mut r).map(|c| RunConfig {
            domain: c.domain,
            nu: 0.0,
            dt: c.dt,
            forcing: c.forcing,
            init: c.init,
            snapshot_every: c.snapshot_every,
            out_dir: None,
            energy_fix: c.energy_fix,
            advection: c.advection,
        });
        let nu: Option<f64> = r.get("nu");
        let mut cfg = r.finish(cfg)?;
        cfg.nu = nu.expect("checked by finish");
        if let Err(e) = cfg.validate() {
            return Err(Error::Config(vec![e.to_string()]));
        }
        Ok(cfg)
    }

    pub fn sweep_config(&self) -> Result<SweepConfig> {
        let mut r = Reader::new(self);
        let common = self.common(&mut r);
        let nus = r.list("nus");
        let fit_magnitudes = r.get("fit_magnitudes");
        let thresholds = (r.get("tol_growth"), r.get("zeta_floor"), r.get("zeta_spread"));
        let eps = r.get("eps");
        let test_rho = r.get("test_rho");
        let test_tau = r.get("test_tau");
        let strips = (r.pair("region_u"), r.pair("region_w"), r.pair("region_v"));
        let cfg = (|| {
            let c = common?;
            let strip = |p: [f64; 2]| Subdomain::strip(&c.domain, p[0] * c.domain.h, p[1] * c.domain.h);
            Some(SweepConfig {
                domain: c.domain,
                nus: nus?,
                dt: c.dt,
                snapshot_every: c.snapshot_every,
                init: c.init,
                forcing: c.forcing,
                energy_fix: c.energy_fix,
                advection: c.advection,
                regions: NestedRegions {
                    u: strip(strips.0?),
                    w: strip(strips.1?),
                    v: strip(strips.2?),
                },
                fit_magnitudes: fit_magnitudes?,
                thresholds: InertialThresholds {
                    tol_growth: thresholds.0?,
                    zeta_floor: thresholds.1?,
                    zeta_spread: thresholds.2?,
                },
                eps: eps?,
                test_rho: test_rho?,
                test_tau: test_tau?,
                snapshot_dir: None,
            })
        })();
        let cfg = r.finish(cfg)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Shift directions and magnitude count for post-processing.
    pub fn shift_params(&self) -> Result<(String, usize)> {
        let mut r = Reader::new(self);
        let dirs: Option<String> = r.choice("shift_directions", &["axis", "eight"]);
        let n: Option<usize> = r.get("shift_magnitudes");
        let out = dirs.zip(n);
        r.finish(out)
    }

    /// `eps` of `δ = ζ₂/2 − eps`.
    pub fn eps(&self) -> Result<f64> {
        let mut r = Reader::new(self);
        let e: Option<f64> = r.get("eps");
        if let Some(v) = e {
            if !(v > 0.0 && v < 0.5) {
                r.errs.push(format!("{}eps must lie in (0, 0.5), got {v}", self.whence("eps")));
            }
        }
        r.finish(e)
    }

    fn common(&self, r: &mut Reader) -> Option<Common> {
        let lx = r.get("lx");
        let h = r.get("h");
        let nx = r.get("nx");
        let ny = r.get("ny");
        let t_final = r.get("t_final");
        let bc = r.choice("bc", &["no_slip", "navier_friction"]);
        let alpha0 = r.get("alpha0");
        let beta: Option<f64> = r.get("beta");
        if let Some(b) = beta {
            if !(0.0..=1.0).contains(&b) {
                r.errs.push(format!("{}beta ∈ [0,1] required, got {b}", self.whence("beta")));
            }
        }
        let dt = r.get("dt");
        let snapshot_every = r.get("snapshot_every");
        let energy_fix = r.get("energy_fix");
        let advection = r.choice("advection", &["skew_symmetric", "conservative"]);
        let init_kind = r.choice("init", &["random", "stokes", "file"]);
        let init = match init_kind.as_deref() {
            Some("random") => {
                let zeta = r.get("init_zeta");
                let kmin = r.get("init_kmin");
                let kmax = r.get("init_kmax");
                let seed = r.get("seed");
                (|| {
                    Some(InitSpec::RandomSpectrum(RandomSpectrum {
                        zeta: zeta?,
                        band: Band::new(kmin?, kmax?),
                        seed: seed?,
                    }))
                })()
            }
            Some("stokes") => r.get("stokes_mode").map(InitSpec::StokesMode),
            Some("file") => r.get::<PathBuf>("init_file").map(InitSpec::FileSnapshot),
            _ => None,
        };
        let forcing_kind = r.choice("forcing", &["none", "steady"]);
        let amp = r.get("forcing_amplitude");
        let kx = r.get("forcing_kx");
        let ky = r.get("forcing_ky");
        let forcing = (|| {
            Some(ForcingSpec {
                kind: if forcing_kind? == "steady" {
                    ForcingKind::SteadySolenoidal
                } else {
                    ForcingKind::None
                },
                amplitude: amp?,
                mode: (kx?, ky?),
            })
        })();

        let bc = bc.map(|b| {
            if b == "no_slip" {
                BcKind::NoSlip
            } else {
                BcKind::NavierFriction
            }
        });
        let domain = (|| {
            Some(DomainSpec {
                lx: lx?,
                h: h?,
                nx: nx?,
                ny: ny?,
                t_final: t_final?,
                bc: bc?,
                alpha0: alpha0?,
                beta: beta?,
            })
        })();
        if let Some(d) = &domain {
            if let Err(Error::Domain(msg)) = d.validate() {
                for m in msg.split("; ").filter(|m| !m.starts_with("beta")) {
                    let key = m.split_whitespace().next().unwrap_or_default();
                    r.errs.push(format!("{}{m}", self.whence(key)));
                }
            }
            if let Some(f) = &forcing {
                if let Err(e) = f.validate(d) {
                    r.errs.push(e.to_string());
                }
            }
        }
        Some(Common {
            domain: domain?,
            dt: dt?,
            snapshot_every: snapshot_every?,
            energy_fix: energy_fix?,
            advection: advection.map(|a| {
                if a == "conservative" {
                    AdvectionForm::Conservative
                } else {
                    AdvectionForm::SkewSymmetric
                }
            })?,
            init: init?,
            forcing: forcing?,
        })
    }
}

struct Common {
    domain: DomainSpec,
    dt: f64,
    snapshot_every: usize,
    energy_fix: bool,
    advection: AdvectionForm,
    init: InitSpec,
    forcing: ForcingSpec,
}

/// Typed access that collects every error instead of stopping at the first.
struct Reader<'a> {
    cfg: &'a ConfigFile,
    errs: Vec<String>,
}

impl<'a> Reader<'a> {
    fn new(cfg: &'a ConfigFile) -> Self {
        Reader { cfg, errs: Vec::new() }
    }

    fn get<T: FromStr>(&mut self, key: &str) -> Option<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.cfg.raw(key);
        if raw.is_empty() {
            self.errs.push(format!("missing required key `{key}`"));
            return None;
        }
        match raw.parse::<T>() {
            Ok(v) => Some(v),
            Err(e) => {
                self.errs.push(format!("{}{key}: cannot parse `{raw}`: {e}", self.cfg.whence(key)));
                None
            }
        }
    }

    fn choice(&mut self, key: &str, options: &[&str]) -> Option<String> {
        let raw = self.cfg.raw(key).to_string();
        if options.contains(&raw.as_str()) {
            Some(raw)
        } else {
            self.errs.push(format!(
                "{}{key}: expected one of {}, got `{raw}`",
                self.cfg.whence(key),
                options.join(" | ")
            ));
            None
        }
    }

    fn list(&mut self, key: &str) -> Option<Vec<f64>> {
        let raw = self.cfg.raw(key).to_string();
        if raw.is_empty() && !self.cfg.entries.contains_key(key) {
            self.errs.push(format!("missing required key `{key}`"));
            return None;
        }
        let mut out = Vec::new();
        for part in raw.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.parse::<f64>() {
                Ok(v) => out.push(v),
                Err(e) => {
                    self.errs.push(format!("{}{key}: cannot parse `{part}`: {e}", self.cfg.whence(key)));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn pair(&mut self, key: &str) -> Option<[f64; 2]> {
        let v = self.list(key)?;
        if v.len() == 2 && v[0] < v[1] {
            Some([v[0], v[1]])
        } else {
            self.errs.push(format!(
                "{}{key}: expected `lo,hi` fractions of H with lo < hi",
                self.cfg.whence(key)
            ));
            None
        }
    }

    fn finish<T>(self, value: Option<T>) -> Result<T> {
        match value {
            Some(v) if self.errs.is_empty() => Ok(v),
            _ if !self.errs.is_empty() => Err(Error::Config(self.errs)),
            _ => Err(Error::Config(vec!["incomplete configuration".into()])),
        }
    }
}
