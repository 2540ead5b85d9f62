//! Family sweeps: L1 against N1 with a log-log exponent fit.

use crate::config::RunConfig;
use crate::families;
use lenscale::error::Error;
use lenscale::scales::compute_l1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Constant,
    TriangleExample,
    Trapezoid,
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "constant" => Ok(Family::Constant),
            "triangle_example" => Ok(Family::TriangleExample),
            "trapezoid" => Ok(Family::Trapezoid),
            other => Err(format!(
                "unknown family '{other}' (constant | triangle_example | trapezoid)"
            )),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub n1: f64,
    pub n2: f64,
    pub l1: f64,
    pub l1_tilde: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepResult {
    pub family: Family,
    pub rows: Vec<SweepRow>,
    /// OLS slope of log L1 against log N1.
    pub slope: f64,
    pub intercept: f64,
}

fn family_config(family: Family, n1: f64) -> (RunConfig, f64) {
    match family {
        Family::Constant => (families::constant_square_config(n1), 2.0 * n1),
        Family::TriangleExample => (families::triangle_config(n1, n1 * n1), n1 * n1),
        Family::Trapezoid => (families::trapezoid_config(n1, n1 * n1, 0.5), n1 * n1),
    }
}

/// Run compute_l1 per parameter (in parallel, results ordered by the
/// parameter list) and fit the scaling exponent.
pub fn sweep_scaling(family: Family, params: &[f64]) -> Result<SweepResult, Error> {
    if params.len() < 3 {
        return Err(Error::SweepTooSmall(params.len()));
    }
    let rows: Vec<SweepRow> = params
        .par_iter()
        .map(|&n1| {
            let (cfg, n2) = family_config(family, n1);
            let domain = cfg.domain.build()?;
            let potential = cfg.build_potential(&domain)?;
            let r = compute_l1(&domain, &potential, &cfg.scales)?;
            Ok(SweepRow {
                n1,
                n2,
                l1: r.l1,
                l1_tilde: r.l1_tilde,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let n = rows.len() as f64;
    let sx: f64 = rows.iter().map(|r| r.n1.ln()).sum();
    let sy: f64 = rows.iter().map(|r| r.l1.ln()).sum();
    let sxx: f64 = rows.iter().map(|r| r.n1.ln().powi(2)).sum();
    let sxy: f64 = rows.iter().map(|r| r.n1.ln() * r.l1.ln()).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    Ok(SweepResult {
        family,
        rows,
        slope,
        intercept,
    })
}

pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from("n1,n2,l1,l1_tilde\n");
    for r in &result.rows {
        out.push_str(&format!("{},{},{},{}\n", r.n1, r.n2, r.l1, r.l1_tilde));
    }
    out
}
