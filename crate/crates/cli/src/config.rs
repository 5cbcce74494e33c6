use crate::CliError;
use illiquid_core::{DayCount, HwParams, MarketDate};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// A time-to-liquidate as written in the config and its Act/365 length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ttl {
    pub label: String,
    pub years: f64,
}

/// `<n>d`, `<n>w` (7n days), `<n>m` (calendar months) or `<n>y`, measured
/// from `settle` in Act/365.
pub fn parse_ttl(text: &str, settle: MarketDate) -> Result<Ttl, CliError> {
    let t = text.trim();
    let bad = || CliError::Input(format!("bad ttl '{t}', expected <n>d|w|m|y"));
    let unit = t.chars().last().ok_or_else(bad)?;
    let n: u32 = t[..t.len() - unit.len_utf8()].parse().map_err(|_| bad())?;
    let end = match unit {
        'd' => settle.add_days(n as i64),
        'w' => settle.add_days(7 * n as i64),
        'm' => settle.add_months(n as i32),
        'y' => settle.add_years(n as i32),
        _ => return Err(bad()),
    }
    .map_err(|e| CliError::Input(e.to_string()))?;
    let years = DayCount::Act365
        .year_fraction(settle, end)
        .map_err(|e| CliError::Input(e.to_string()))?;
    Ok(Ttl { label: t.to_string(), years })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub value_date: MarketDate,
    pub settlement_lag: u32,
    pub params: HwParams,
    pub ttl: Vec<String>,
    pub ois_file: PathBuf,
    pub bonds_files: Vec<PathBuf>,
    pub out_dir: PathBuf,
    pub format: String,
    pub seed: u64,
    pub paths: usize,
    pub steps: usize,
    pub ois_provenance: String,
    pub bonds_provenance: String,
}

const KEYS: &[&str] = &[
    "value_date",
    "settlement_lag",
    "a_hat",
    "sigma_hat",
    "gamma_hat",
    "ttl",
    "ois_file",
    "bonds_file",
    "out_dir",
    "format",
    "seed",
    "paths",
    "steps",
    "ois_provenance",
    "bonds_provenance",
];

fn list(v: &str) -> Vec<String> {
    v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

impl RunConfig {
    pub fn settlement(&self) -> Result<MarketDate, CliError> {
        self.value_date
            .add_business_days(self.settlement_lag)
            .map_err(|e| CliError::Input(e.to_string()))
    }

    pub fn ttls(&self) -> Result<Vec<Ttl>, CliError> {
        let settle = self.settlement()?;
        self.ttl.iter().map(|t| parse_ttl(t, settle)).collect()
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Parses `key = value` lines; `#` starts a comment. Relative file paths
    /// resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut kv = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Input(format!("config line {}: expected key = value", no + 1)))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(CliError::Input(format!("config line {}: unknown key '{k}'", no + 1)));
            }
            if kv.insert(k.to_string(), v.trim().to_string()).is_some() {
                return Err(CliError::Input(format!("config line {}: duplicate key '{k}'", no + 1)));
            }
        }
        let required = |k: &str| {
            kv.get(k)
                .cloned()
                .ok_or_else(|| CliError::Input(format!("config is missing '{k}'")))
        };
        fn num<T: std::str::FromStr>(kv: &BTreeMap<String, String>, k: &str, default: T) -> Result<T, CliError> {
            match kv.get(k) {
                None => Ok(default),
                Some(v) => v
                    .parse()
                    .map_err(|_| CliError::Input(format!("config key '{k}': cannot parse '{v}'"))),
            }
        }
        let value_date: MarketDate = required("value_date")?
            .parse()
            .map_err(|e: illiquid_core::DateError| CliError::Input(e.to_string()))?;
        let d = HwParams::default();
        let params = HwParams::new(
            num(&kv, "a_hat", d.a_hat)?,
            num(&kv, "sigma_hat", d.sigma_hat)?,
            num(&kv, "gamma_hat", d.gamma_hat)?,
        )
        .map_err(|e| CliError::Input(e.to_string()))?;
        let resolve = |p: &str| {
            let p = PathBuf::from(p);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };
        let bonds_files: Vec<PathBuf> = list(&required("bonds_file")?).iter().map(|p| resolve(p)).collect();
        if bonds_files.is_empty() {
            return Err(CliError::Input("config key 'bonds_file' is empty".into()));
        }
        let cfg = RunConfig {
            value_date,
            settlement_lag: num(&kv, "settlement_lag", 2)?,
            params,
            ttl: list(kv.get("ttl").map(String::as_str).unwrap_or("2w, 2m")),
            ois_file: resolve(&required("ois_file")?),
            bonds_files,
            out_dir: resolve(kv.get("out_dir").map(String::as_str).unwrap_or("out")),
            format: kv.get("format").cloned().unwrap_or_else(|| "csv".into()),
            seed: num(&kv, "seed", 20150914)?,
            paths: num(&kv, "paths", 100_000)?,
            steps: num(&kv, "steps", 32)?,
            ois_provenance: kv.get("ois_provenance").cloned().unwrap_or_else(|| "unspecified".into()),
            bonds_provenance: kv.get("bonds_provenance").cloned().unwrap_or_else(|| "unspecified".into()),
        };
        if cfg.ttl.is_empty() {
            return Err(CliError::Input("config key 'ttl' is empty".into()));
        }
        cfg.ttls()?;
        Ok(cfg)
    }
}
