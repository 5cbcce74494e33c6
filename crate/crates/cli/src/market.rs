use crate::config::RunConfig;
use crate::CliError;
use illiquid_core::{bootstrap_discount, bootstrap_zeta, BondSpec, DiscountCurve, IssuerCurve, MarketDate, OisQuote};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Deserialize)]
struct OisRow {
    date: String,
    rate: f64,
}

#[derive(Debug, Deserialize)]
struct BondRow {
    issuer: String,
    maturity: String,
    coupon_pct: f64,
    clean_price: f64,
}

fn date(s: &str, file: &Path) -> Result<MarketDate, CliError> {
    s.trim()
        .parse()
        .map_err(|e: illiquid_core::DateError| CliError::Input(format!("{}: {e}", file.display())))
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>, CliError> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn read_ois(path: &Path) -> Result<Vec<OisQuote>, CliError> {
    let mut out = Vec::new();
    for row in reader(path)?.deserialize::<OisRow>() {
        let row = row.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        out.push(OisQuote { maturity: date(&row.date, path)?, rate: row.rate });
    }
    if out.is_empty() {
        return Err(CliError::Input(format!("{}: no OIS quotes", path.display())));
    }
    out.sort_by_key(|q| q.maturity);
    Ok(out)
}

pub fn read_bonds(path: &Path, settle: MarketDate) -> Result<Vec<BondSpec>, CliError> {
    let mut out = Vec::new();
    for row in reader(path)?.deserialize::<BondRow>() {
        let row = row.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        out.push(BondSpec::annual(
            row.issuer,
            date(&row.maturity, path)?,
            row.coupon_pct / 100.0,
            settle,
            Some(row.clean_price),
        )?);
    }
    if out.is_empty() {
        return Err(CliError::Input(format!("{}: no bonds", path.display())));
    }
    Ok(out)
}

/// One issuer's calibration bonds, sorted by maturity, and its curve.
#[derive(Debug, Clone)]
pub struct IssuerSet {
    pub bonds: Vec<BondSpec>,
    pub curve: IssuerCurve,
}

#[derive(Debug, Clone)]
pub struct Market {
    pub settle: MarketDate,
    pub quotes: Vec<OisQuote>,
    pub discount: DiscountCurve,
    /// In order of first appearance in the bond files.
    pub issuers: Vec<IssuerSet>,
}

pub fn load_market(cfg: &RunConfig) -> Result<Market, CliError> {
    let settle = cfg.settlement()?;
    let quotes = read_ois(&cfg.ois_file)?;
    let discount = bootstrap_discount(&quotes, settle)?;
    let mut groups: Vec<(String, Vec<BondSpec>)> = Vec::new();
    for f in &cfg.bonds_files {
        for b in read_bonds(f, settle)? {
            match groups.iter_mut().find(|g| g.0 == b.issuer) {
                Some(g) => g.1.push(b),
                None => groups.push((b.issuer.clone(), vec![b])),
            }
        }
    }
    let mut issuers = Vec::with_capacity(groups.len());
    for (_, mut bonds) in groups {
        bonds.sort_by_key(|b| b.maturity);
        let curve = bootstrap_zeta(&bonds, &discount, settle)?;
        issuers.push(IssuerSet { bonds, curve });
    }
    Ok(Market { settle, quotes, discount, issuers })
}
