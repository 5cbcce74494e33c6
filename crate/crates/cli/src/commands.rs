use crate::config::{RunConfig, Ttl};
use crate::market::Market;
use crate::CliError;
use illiquid_core::{
    invoice_price, liquidity_report, premium_bounds, price_liquid_bond, vol_bundle, HwParams,
};
use illiquid_mc::{simulate_max_forward, SimConfig};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Input(format!("unknown format '{other}', expected csv or json"))),
        }
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Input(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Input(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn prepare(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::Input(format!("{}: {e}", out.display())))
}

fn slug(issuer: &str) -> String {
    issuer
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscountKnotRow {
    pub date: String,
    pub time_years: f64,
    pub discount_factor: f64,
    pub zero_rate_pct: f64,
    pub provenance: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZetaKnotRow {
    pub issuer: String,
    pub date: String,
    pub time_years: f64,
    pub zeta_bp: f64,
    pub provenance: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualRow {
    pub kind: String,
    pub instrument: String,
    pub residual_per_100_notional: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BootstrapOutput {
    pub settlement: String,
    pub discount_knots: Vec<DiscountKnotRow>,
    pub zeta_knots: Vec<ZetaKnotRow>,
    pub residuals: Vec<ResidualRow>,
}

pub fn bootstrap_tables(cfg: &RunConfig, m: &Market) -> Result<BootstrapOutput, CliError> {
    let discount_knots = m
        .discount
        .knots()
        .into_iter()
        .map(|(d, df)| {
            let t = illiquid_core::year_fraction(m.settle, d, illiquid_core::DayCount::Act365)
                .map_err(|e| CliError::Input(e.to_string()))?;
            Ok(DiscountKnotRow {
                date: d.to_string(),
                time_years: t,
                discount_factor: df,
                zero_rate_pct: 100.0 * m.discount.zero_rate_time(t),
                provenance: cfg.ois_provenance.clone(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut zeta_knots = Vec::new();
    let mut residuals = Vec::new();
    for (q, r) in m.quotes.iter().zip(m.discount.par_residuals(&m.quotes)?) {
        residuals.push(ResidualRow {
            kind: "ois".into(),
            instrument: format!("OIS {}", q.maturity),
            residual_per_100_notional: 100.0 * r,
        });
    }
    for set in &m.issuers {
        for (d, z) in set.curve.knots() {
            let t = illiquid_core::year_fraction(m.settle, d, illiquid_core::DayCount::Act365)
                .map_err(|e| CliError::Input(e.to_string()))?;
            zeta_knots.push(ZetaKnotRow {
                issuer: set.curve.issuer().to_string(),
                date: d.to_string(),
                time_years: t,
                zeta_bp: 1e4 * z,
                provenance: cfg.bonds_provenance.clone(),
            });
        }
        for b in &set.bonds {
            residuals.push(ResidualRow {
                kind: "bond".into(),
                instrument: b.id(),
                residual_per_100_notional: price_liquid_bond(b, &set.curve)? - invoice_price(b, m.settle)?,
            });
        }
    }
    Ok(BootstrapOutput { settlement: m.settle.to_string(), discount_knots, zeta_knots, residuals })
}

/// Writes discount knots, Zeta knots and repricing residuals.
pub fn bootstrap(cfg: &RunConfig, m: &Market, out: &Path, format: Format) -> Result<Vec<PathBuf>, CliError> {
    prepare(out)?;
    let t = bootstrap_tables(cfg, m)?;
    Ok(match format {
        Format::Csv => {
            let files = [
                out.join("discount_knots.csv"),
                out.join("zeta_knots.csv"),
                out.join("bootstrap_residuals.csv"),
            ];
            write_csv(&files[0], &t.discount_knots)?;
            write_csv(&files[1], &t.zeta_knots)?;
            write_csv(&files[2], &t.residuals)?;
            files.to_vec()
        }
        Format::Json => {
            let f = out.join("bootstrap.json");
            write_json(&f, &t)?;
            vec![f]
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PriceRow {
    pub issuer: String,
    pub bond_id: String,
    pub maturity: String,
    pub ttl_label: String,
    pub ttl_years: f64,
    pub survival_prob: f64,
    pub default_prob: f64,
    pub delta_lower_per_100_face: f64,
    pub delta_upper_per_100_face: f64,
    pub bound_gap_per_100_face: f64,
    pub liquid_price_per_100_face: f64,
    pub illiquid_price_per_100_face: f64,
    pub liquid_yield_pct: f64,
    pub illiquid_yield_pct: f64,
    pub liquidity_spread_bp: f64,
    pub ois_provenance: String,
    pub bonds_provenance: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SheerSpreadRow {
    pub issuer: String,
    pub bond_id: String,
    pub ttl_label: String,
    pub payment_date: String,
    pub time_years: f64,
    pub sheer_spread_bp: f64,
}

pub fn price_tables(
    cfg: &RunConfig,
    m: &Market,
    params: &HwParams,
    ttls: &[Ttl],
) -> Result<(Vec<PriceRow>, Vec<SheerSpreadRow>), CliError> {
    let mut rows = Vec::new();
    let mut spreads = Vec::new();
    for set in &m.issuers {
        for ttl in ttls {
            for b in &set.bonds {
                let r = liquidity_report(b, &set.curve, params, ttl.years)
                    .map_err(|e| CliError::from(e).context(&b.id()))?;
                for (d, l) in &r.sheer_spreads {
                    spreads.push(SheerSpreadRow {
                        issuer: r.issuer.clone(),
                        bond_id: r.bond_id.clone(),
                        ttl_label: ttl.label.clone(),
                        payment_date: d.to_string(),
                        time_years: illiquid_core::year_fraction(m.settle, *d, illiquid_core::DayCount::Act365)
                            .map_err(|e| CliError::Input(e.to_string()))?,
                        sheer_spread_bp: 1e4 * l,
                    });
                }
                rows.push(PriceRow {
                    issuer: r.issuer,
                    bond_id: r.bond_id,
                    maturity: r.maturity.to_string(),
                    ttl_label: ttl.label.clone(),
                    ttl_years: ttl.years,
                    survival_prob: r.survival,
                    default_prob: 1.0 - r.survival,
                    delta_lower_per_100_face: r.delta_lower,
                    delta_upper_per_100_face: r.delta_upper,
                    bound_gap_per_100_face: r.bound_gap,
                    liquid_price_per_100_face: r.liquid_price,
                    illiquid_price_per_100_face: r.illiquid_price,
                    liquid_yield_pct: 100.0 * r.liquid_yield,
                    illiquid_yield_pct: 100.0 * r.illiquid_yield,
                    liquidity_spread_bp: 1e4 * r.liquidity_yield_spread,
                    ois_provenance: cfg.ois_provenance.clone(),
                    bonds_provenance: cfg.bonds_provenance.clone(),
                });
            }
        }
    }
    Ok((rows, spreads))
}

#[derive(Serialize)]
struct PriceJson<'a> {
    reports: &'a [PriceRow],
    sheer_spreads: &'a [SheerSpreadRow],
}

/// One liquidity report per (bond, ttl) plus per-flow sheer spreads.
pub fn price(cfg: &RunConfig, m: &Market, out: &Path, format: Format) -> Result<Vec<PriceRow>, CliError> {
    prepare(out)?;
    let (rows, spreads) = price_tables(cfg, m, &cfg.params, &cfg.ttls()?)?;
    match format {
        Format::Csv => {
            write_csv(&out.join("reports.csv"), &rows)?;
            write_csv(&out.join("sheer_spreads.csv"), &spreads)?;
        }
        Format::Json => write_json(&out.join("reports.json"), &PriceJson { reports: &rows, sheer_spreads: &spreads })?,
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub paths: usize,
    pub steps: usize,
    pub seed: u64,
    /// Negative control: report the bounds with the two factors exchanged.
    pub swap_bounds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyRow {
    pub issuer: String,
    pub bond_id: String,
    pub ttl_label: String,
    pub ttl_years: f64,
    pub paths: usize,
    pub steps: usize,
    pub seed: u64,
    pub delta_lower_per_100_face: f64,
    pub delta_upper_per_100_face: f64,
    pub mc_premium_per_100_face: f64,
    pub mc_std_error_per_100_face: f64,
    pub argmax_coincidence: f64,
    pub pass: bool,
}

#[derive(Serialize)]
struct VerifyJson<'a> {
    ois_provenance: &'a str,
    bonds_provenance: &'a str,
    self_test_swap: bool,
    all_pass: bool,
    rows: &'a [VerifyRow],
}

/// Monte-Carlo sandwich check per (bond, ttl): PASS when the bounds are
/// ordered and the simulated premium lies within 3 SE of [lower, upper].
pub fn verify_rows(m: &Market, params: &HwParams, ttls: &[Ttl], opts: &VerifyOptions) -> Result<Vec<VerifyRow>, CliError> {
    let mut rows = Vec::new();
    let mut index = 0u64;
    for set in &m.issuers {
        for ttl in ttls {
            for b in &set.bonds {
                let bounds = premium_bounds(b, &set.curve, params, ttl.years)
                    .map_err(|e| CliError::from(e).context(&b.id()))?;
                let seed = opts.seed.wrapping_add(index);
                index += 1;
                let (mean, se, coincidence) = if ttl.years == 0.0 {
                    (0.0, 0.0, 1.0)
                } else {
                    let times: Vec<f64> = bounds.retained.iter().map(|f| f.time).collect();
                    let weights: Vec<f64> = bounds.retained.iter().map(|f| f.amount * f.defaultable_df).collect();
                    let bundle = vol_bundle(params, ttl.years, &times).map_err(|e| CliError::Calibration(e.to_string()))?;
                    let sim = SimConfig::new(opts.paths, opts.steps, seed);
                    let r = simulate_max_forward(&bundle, &weights, &sim)?;
                    (r.estimate.mean - bounds.survival * bounds.retained_value(), r.estimate.std_error, r.argmax_coincidence)
                };
                let (lower, upper) = if opts.swap_bounds {
                    (bounds.upper, bounds.lower)
                } else {
                    (bounds.lower, bounds.upper)
                };
                let pass = lower <= upper && mean >= lower - 3.0 * se && mean <= upper + 3.0 * se;
                rows.push(VerifyRow {
                    issuer: b.issuer.clone(),
                    bond_id: b.id(),
                    ttl_label: ttl.label.clone(),
                    ttl_years: ttl.years,
                    paths: opts.paths,
                    steps: opts.steps,
                    seed,
                    delta_lower_per_100_face: lower,
                    delta_upper_per_100_face: upper,
                    mc_premium_per_100_face: mean,
                    mc_std_error_per_100_face: se,
                    argmax_coincidence: coincidence,
                    pass,
                });
            }
        }
    }
    Ok(rows)
}

/// Writes `verify.json`; fails with a verification error if any row fails.
pub fn verify(cfg: &RunConfig, m: &Market, out: &Path, opts: &VerifyOptions) -> Result<Vec<VerifyRow>, CliError> {
    prepare(out)?;
    let rows = verify_rows(m, &cfg.params, &cfg.ttls()?, opts)?;
    let all_pass = rows.iter().all(|r| r.pass);
    write_json(
        &out.join("verify.json"),
        &VerifyJson {
            ois_provenance: &cfg.ois_provenance,
            bonds_provenance: &cfg.bonds_provenance,
            self_test_swap: opts.swap_bounds,
            all_pass,
            rows: &rows,
        },
    )?;
    if !all_pass {
        let failed: Vec<String> = rows
            .iter()
            .filter(|r| !r.pass)
            .map(|r| format!("{} @ {}", r.bond_id, r.ttl_label))
            .collect();
        return Err(CliError::Verification(failed.join(", ")));
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct GapFigureRow {
    pub maturity: String,
    pub series: String,
    pub bound_gap_per_100_face: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct YieldFigureRow {
    pub maturity: String,
    pub series: String,
    pub yield_pct: f64,
}

/// Plot data per issuer: bound gap against maturity for each ttl, and the
/// liquid yield with the illiquid yield for each ttl.
pub fn figures(cfg: &RunConfig, m: &Market, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    prepare(out)?;
    let ttls = cfg.ttls()?;
    let (rows, _) = price_tables(cfg, m, &cfg.params, &ttls)?;
    let mut files = Vec::new();
    for set in &m.issuers {
        let issuer = set.curve.issuer();
        let mine: Vec<&PriceRow> = rows.iter().filter(|r| r.issuer == issuer).collect();
        let mut gap = Vec::new();
        let mut yields = Vec::new();
        for ttl in &ttls {
            for r in mine.iter().filter(|r| r.ttl_label == ttl.label) {
                gap.push(GapFigureRow {
                    maturity: r.maturity.clone(),
                    series: format!("ttl_{}", ttl.label),
                    bound_gap_per_100_face: r.bound_gap_per_100_face,
                });
            }
        }
        if let Some(first) = ttls.first() {
            for r in mine.iter().filter(|r| r.ttl_label == first.label) {
                yields.push(YieldFigureRow {
                    maturity: r.maturity.clone(),
                    series: "liquid".into(),
                    yield_pct: r.liquid_yield_pct,
                });
            }
        }
        for ttl in &ttls {
            for r in mine.iter().filter(|r| r.ttl_label == ttl.label) {
                yields.push(YieldFigureRow {
                    maturity: r.maturity.clone(),
                    series: format!("illiquid_{}", ttl.label),
                    yield_pct: r.illiquid_yield_pct,
                });
            }
        }
        let g = out.join(format!("bound_gap_{}.csv", slug(issuer)));
        let y = out.join(format!("yields_{}.csv", slug(issuer)));
        write_csv(&g, &gap)?;
        write_csv(&y, &yields)?;
        files.push(g);
        files.push(y);
    }
    Ok(files)
}
