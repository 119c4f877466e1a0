use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::scenarios::{sweep, ScenarioConfig, ScenarioName};
use crate::error::{Error, Result};
use crate::measures::CorrelationRecord;

/// Location and height of the first maximum of a sampled series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstMaximum {
    pub t: f64,
    pub value: f64,
    /// False when the series has no interior local maximum and the global
    /// maximum was returned instead.
    pub interior: bool,
}

/// First interior sample strictly above both neighbours, refined by the
/// vertex of the parabola through the three points.
pub fn first_maximum(times: &[f64], values: &[f64]) -> Result<FirstMaximum> {
    if times.len() != values.len() {
        return Err(Error::Dimension(format!("{} times but {} values", times.len(), values.len())));
    }
    if values.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 samples to locate a maximum, got {}",
            values.len()
        )));
    }
    for i in 1..values.len() - 1 {
        let (y0, y1, y2) = (values[i - 1], values[i], values[i + 1]);
        if y1 > y0 && y1 > y2 {
            let (t, value) = parabola_vertex([times[i - 1], times[i], times[i + 1]], [y0, y1, y2]);
            return Ok(FirstMaximum { t, value, interior: true });
        }
    }
    let (i, _) = values.iter().enumerate().fold((0, f64::NEG_INFINITY), |best, (i, &v)| {
        if v > best.1 {
            (i, v)
        } else {
            best
        }
    });
    Ok(FirstMaximum { t: times[i], value: values[i], interior: false })
}

fn parabola_vertex(t: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    // y = a (t − t1)² + b (t − t1) + y1
    let (h0, h2) = (t[0] - t[1], t[2] - t[1]);
    let (d0, d2) = (y[0] - y[1], y[2] - y[1]);
    let det = h0 * h2 * (h0 - h2);
    let a = (d0 * h2 - d2 * h0) / det;
    let b = (d2 * h0 * h0 - d0 * h2 * h2) / det;
    if a >= 0.0 {
        return (t[1], y[1]);
    }
    let dt = -b / (2.0 * a);
    (t[1] + dt, y[1] - b * b / (4.0 * a))
}

/// Least-squares fit of `log v = exponent · log k + log_amplitude`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub exponent_stderr: f64,
    pub log_amplitude: f64,
}

pub const MIN_FIT_POINTS: usize = 4;

pub fn fit_power_law(ks: &[f64], values: &[f64]) -> Result<PowerFit> {
    if ks.len() != values.len() {
        return Err(Error::Dimension(format!(
            "{} k values but {} amplitudes",
            ks.len(),
            values.len()
        )));
    }
    let n = ks.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::Fit(format!(
            "need at least {MIN_FIT_POINTS} points for a power-law fit, got {n}"
        )));
    }
    if let Some((k, v)) = ks.iter().zip(values).find(|(&k, &v)| !(k > 0.0 && v > 0.0)) {
        return Err(Error::Fit(format!("power-law fit needs positive data, got ({k}, {v})")));
    }
    let x: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let nf = n as f64;
    let (mx, my) = (x.iter().sum::<f64>() / nf, y.iter().sum::<f64>() / nf);
    let sxx: f64 = x.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("power-law fit needs at least two distinct k values".into()));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ssr: f64 = x.iter().zip(&y).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum();
    Ok(PowerFit {
        exponent: slope,
        exponent_stderr: (ssr / (nf - 2.0) / sxx).sqrt(),
        log_amplitude: icpt,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Negativity,
    HsParticipation,
}

impl Quantity {
    pub fn of(self, r: &CorrelationRecord) -> f64 {
        match self {
            Quantity::Negativity => r.negativity,
            Quantity::HsParticipation => r.hs_participation,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::Negativity => "negativity",
            Quantity::HsParticipation => "hs_participation",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "negativity" => Ok(Quantity::Negativity),
            "hs_participation" => Ok(Quantity::HsParticipation),
            _ => Err(Error::InvalidSpec(format!(
                "unknown quantity '{s}', expected negativity or hs_participation"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub k: u32,
    pub t: f64,
    pub value: f64,
    pub interior: bool,
}

/// Power law fitted to first-maximum amplitudes across `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub scenario: ScenarioName,
    pub quantity: Quantity,
    pub exponent: f64,
    pub exponent_stderr: f64,
    pub log_amplitude: f64,
    pub amplitudes: Vec<Amplitude>,
}

/// First maximum of `quantity` along one trajectory.
pub fn amplitude(k: u32, quantity: Quantity, records: &[CorrelationRecord]) -> Result<Amplitude> {
    let times: Vec<f64> = records.iter().map(|r| r.t).collect();
    let values: Vec<f64> = records.iter().map(|r| quantity.of(r)).collect();
    let m = first_maximum(&times, &values)?;
    Ok(Amplitude { k, t: m.t, value: m.value, interior: m.interior })
}

/// Upper half of a k-list, widened to at least [`MIN_FIT_POINTS`] entries.
pub fn default_fit_window(k_list: &[u32]) -> Vec<u32> {
    let mut ks = k_list.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let take = ks.len().div_ceil(2).max(MIN_FIT_POINTS).min(ks.len());
    ks[ks.len() - take..].to_vec()
}

pub fn scaling_from_runs(
    scenario: ScenarioName,
    quantity: Quantity,
    runs: &[(u32, Vec<CorrelationRecord>)],
) -> Result<ScalingFit> {
    let amplitudes =
        runs.iter().map(|(k, recs)| amplitude(*k, quantity, recs)).collect::<Result<Vec<_>>>()?;
    let ks: Vec<f64> = amplitudes.iter().map(|a| a.k as f64).collect();
    let vs: Vec<f64> = amplitudes.iter().map(|a| a.value).collect();
    let fit = fit_power_law(&ks, &vs)?;
    Ok(ScalingFit {
        scenario,
        quantity,
        exponent: fit.exponent,
        exponent_stderr: fit.exponent_stderr,
        log_amplitude: fit.log_amplitude,
        amplitudes,
    })
}

/// Runs `ks` (default: [`default_fit_window`] of the k-list) and fits
/// each requested quantity.
pub fn scaling(
    cfg: &ScenarioConfig,
    quantities: &[Quantity],
    ks: Option<&[u32]>,
) -> Result<Vec<ScalingFit>> {
    let window = match ks {
        Some(ks) => ks.to_vec(),
        None => default_fit_window(&cfg.k_list),
    };
    let runs = sweep(cfg, &window)?;
    quantities.iter().map(|&q| scaling_from_runs(cfg.name, q, &runs)).collect()
}
