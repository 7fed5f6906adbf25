//! `det`, `sweep` and `spectrum`: computations and their renderings.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use rayon::prelude::*;
use serde::Serialize;
use specdet::oracle::product_comparison;
use specdet::{det_real_line, DeterminantResult, ProductEstimate};

use crate::config::{Format, RunConfig, SweepParameter};

/// Columns of the sweep table, in order.
pub const CSV_HEADER: [&str; 8] = ["parameter", "ratio", "det", "W_alpha", "W_zero", "constancy_residual", "method", "error"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub parameter: f64,
    pub ratio: Option<f64>,
    pub det: Option<f64>,
    #[serde(rename = "W_alpha")]
    pub w_alpha: Option<f64>,
    #[serde(rename = "W_zero")]
    pub w_zero: Option<f64>,
    pub constancy_residual: Option<f64>,
    pub method: Option<String>,
    pub error: Option<String>,
}

impl Row {
    fn from_result(parameter: f64, r: &DeterminantResult) -> Self {
        Row {
            parameter,
            ratio: Some(r.ratio),
            det: r.det,
            w_alpha: Some(r.w_alpha.w),
            w_zero: Some(r.w_zero.w),
            constancy_residual: Some(r.max_constancy_residual()),
            method: Some(r.method.as_str().to_string()),
            error: None,
        }
    }

    fn failed(parameter: f64, err: impl std::fmt::Display) -> Self {
        Row {
            parameter,
            ratio: None,
            det: None,
            w_alpha: None,
            w_zero: None,
            constancy_residual: None,
            method: None,
            error: Some(err.to_string()),
        }
    }
}

/// Seventeen significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn det(cfg: &RunConfig) -> Result<DeterminantResult> {
    if cfg.sweep.is_some() {
        bail!("config has a sweep block; use the sweep command");
    }
    Ok(det_real_line(&cfg.potential_spec()?, &cfg.det_options())?)
}

pub fn det_summary(r: &DeterminantResult) -> String {
    let mut s = String::new();
    let o = |x: Option<f64>| x.map(fmt_f64).unwrap_or_else(|| "n/a".into());
    writeln!(s, "method              {}", r.method.as_str()).unwrap();
    writeln!(s, "ratio W(a)/W(0)     {}", fmt_f64(r.ratio)).unwrap();
    writeln!(s, "det                 {}", o(r.det)).unwrap();
    writeln!(s, "det0                {}", o(r.det0)).unwrap();
    writeln!(s, "W(alpha)            {}", fmt_f64(r.w_alpha.w)).unwrap();
    writeln!(s, "W(0)                {}", fmt_f64(r.w_zero.w)).unwrap();
    if let Some(n) = &r.normalized {
        writeln!(s, "W normalized        {}", fmt_f64(n.w)).unwrap();
    }
    writeln!(s, "constancy W(alpha)  {:.3e}", r.w_alpha.constancy_residual).unwrap();
    writeln!(s, "constancy W(0)      {:.3e}", r.w_zero.constancy_residual).unwrap();
    s
}

pub fn det_row(cfg: &RunConfig, r: &DeterminantResult) -> Row {
    Row::from_result(cfg.potential.alpha, r)
}

/// One row per sweep value, in input order; failures are recorded in the row.
pub fn sweep(cfg: &RunConfig) -> Result<(SweepParameter, Vec<Row>)> {
    let Some(sw) = cfg.sweep else { bail!("config has no sweep block") };
    let opts = cfg.det_options();
    let rows = sw
        .values()
        .par_iter()
        .map(|&v| match cfg.spec_at(sw.parameter, v) {
            Ok(spec) => match det_real_line(&spec, &opts) {
                Ok(r) => Row::from_result(v, &r),
                Err(e) => Row::failed(v, e),
            },
            Err(e) => Row::failed(v, e),
        })
        .collect();
    Ok((sw.parameter, rows))
}

pub fn rows_csv(rows: &[Row]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            fmt_f64(r.parameter),
            opt(r.ratio),
            opt(r.det),
            opt(r.w_alpha),
            opt(r.w_zero),
            opt(r.constancy_residual),
            r.method.clone().unwrap_or_default(),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn rows_json(cfg: &RunConfig, parameter: &str, rows: &[Row]) -> Result<String> {
    let doc = serde_json::json!({ "meta": { "config": cfg, "parameter": parameter }, "rows": rows });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

pub fn render_rows(cfg: &RunConfig, parameter: &str, rows: &[Row], format: Format) -> Result<String> {
    match format {
        Format::Csv => rows_csv(rows),
        Format::Json => rows_json(cfg, parameter, rows),
    }
}

pub fn spectrum(cfg: &RunConfig) -> Result<ProductEstimate> {
    Ok(product_comparison(&cfg.potential_spec()?, &cfg.oracle_options(), &[])?)
}

pub fn spectrum_summary(p: &ProductEstimate) -> String {
    let fit = p.perturbed.asym_fit;
    let mut s = String::new();
    writeln!(s, "N                   {}", p.perturbed.n).unwrap();
    writeln!(s, "L                   {}", fmt_f64(p.perturbed.half_width)).unwrap();
    writeln!(s, "fit c               {}", fmt_f64(fit.c)).unwrap();
    writeln!(s, "fit tau             {}", fmt_f64(fit.tau)).unwrap();
    match fit.eps_proxy {
        Some(e) => writeln!(s, "eps proxy           {}", fmt_f64(e)).unwrap(),
        None => writeln!(s, "eps proxy           n/a").unwrap(),
    }
    writeln!(s, "product f_N         {}", fmt_f64(p.value)).unwrap();
    s
}

pub fn render_spectrum(cfg: &RunConfig, p: &ProductEstimate, format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["k", "lambda", "lambda_zero", "ratio"])?;
            for (i, (a, z)) in p.perturbed.eigenvalues.iter().zip(&p.unperturbed.eigenvalues).enumerate() {
                w.write_record([(i + 1).to_string(), fmt_f64(*a), fmt_f64(*z), fmt_f64(a / z)])?;
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
        Format::Json => {
            let doc = serde_json::json!({
                "meta": { "config": cfg },
                "half_width": p.perturbed.half_width,
                "eigenvalues": p.perturbed.eigenvalues,
                "unperturbed": p.unperturbed.eigenvalues,
                "fit": p.perturbed.asym_fit,
                "product": p.value,
            });
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
    }
}
