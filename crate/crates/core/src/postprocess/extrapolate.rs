//! Weighted least-squares fit of `value(m) = E_inf + A · r^m` over check counts.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub m: f64,
    pub value: f64,
    #[serde(default)]
    pub stderr: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedParams {
    pub e_inf: f64,
    pub amplitude: f64,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationResult {
    pub model: String,
    pub fitted_params: FittedParams,
    /// Unweighted sum of squared residuals at the fitted parameters.
    pub residual: f64,
    pub estimate: f64,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ExtrapolationError {
    #[error("need at least 3 distinct check counts, got {0}")]
    TooFewPoints(usize),
    #[error("non-finite input at point {0}")]
    NonFinite(usize),
}

const GRID: usize = 100;
const MAX_ITER: usize = 100;
const TOL: f64 = 1e-10;
const MIN_RATE: f64 = 1e-12;

pub fn extrapolate_checks(
    series: &[SeriesPoint],
) -> Result<ExtrapolationResult, ExtrapolationError> {
    for (i, p) in series.iter().enumerate() {
        if !p.m.is_finite() || !p.value.is_finite() || p.stderr.is_some_and(|s| !s.is_finite()) {
            return Err(ExtrapolationError::NonFinite(i));
        }
    }
    let mut ms: Vec<f64> = series.iter().map(|p| p.m).collect();
    ms.sort_by(f64::total_cmp);
    ms.dedup();
    if ms.len() < 3 {
        return Err(ExtrapolationError::TooFewPoints(ms.len()));
    }
    let xs: Vec<f64> = series.iter().map(|p| p.m).collect();
    let ys: Vec<f64> = series.iter().map(|p| p.value).collect();
    let ws: Vec<f64> = series
        .iter()
        .map(|p| match p.stderr {
            Some(s) if s > 0.0 => 1.0 / (s * s),
            _ => 1.0,
        })
        .collect();

    let first = ys[0];
    if ys.iter().all(|&y| y == first) {
        return Ok(result(
            FittedParams {
                e_inf: first,
                amplitude: 0.0,
                rate: 1.0,
            },
            &xs,
            &ys,
        ));
    }

    let sse = |p: &FittedParams| -> f64 {
        xs.iter()
            .zip(&ys)
            .zip(&ws)
            .map(|((&x, &y), &w)| {
                let r = y - (p.e_inf + p.amplitude * p.rate.powf(x));
                w * r * r
            })
            .sum()
    };

    let mut best: Option<(f64, FittedParams)> = None;
    for i in 1..=GRID {
        let rate = i as f64 / GRID as f64;
        let params = linear_fit(&xs, &ys, &ws, rate);
        let s = sse(&params);
        if best.is_none_or(|(bs, _)| s < bs) {
            best = Some((s, params));
        }
    }
    let (mut cur_sse, mut p) = best.expect("grid is non-empty");

    for _ in 0..MAX_ITER {
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        for ((&x, &y), &w) in xs.iter().zip(&ys).zip(&ws) {
            let rx = p.rate.powf(x);
            let d_rate = if x == 0.0 {
                0.0
            } else {
                p.amplitude * x * p.rate.powf(x - 1.0)
            };
            let j = Vector3::new(1.0, rx, d_rate);
            let r = y - (p.e_inf + p.amplitude * rx);
            jtj += w * j * j.transpose();
            jtr += w * r * j;
        }
        let Some(step) = jtj.lu().solve(&jtr) else {
            break;
        };
        let mut scale = 1.0;
        let mut improved = None;
        for _ in 0..30 {
            let cand = FittedParams {
                e_inf: p.e_inf + scale * step[0],
                amplitude: p.amplitude + scale * step[1],
                rate: (p.rate + scale * step[2]).clamp(MIN_RATE, 1.0),
            };
            let s = sse(&cand);
            if s.is_finite() && s <= cur_sse {
                improved = Some((s, cand));
                break;
            }
            scale /= 2.0;
        }
        let Some((s, cand)) = improved else { break };
        let moved = (cand.e_inf - p.e_inf).abs()
            + (cand.amplitude - p.amplitude).abs()
            + (cand.rate - p.rate).abs();
        p = cand;
        cur_sse = s;
        if moved < TOL {
            break;
        }
    }
    Ok(result(p, &xs, &ys))
}

/// Weighted linear solve for `(E_inf, A)` at a fixed rate; at `rate = 1` the
/// two basis functions coincide and `A` is pinned to zero.
fn linear_fit(xs: &[f64], ys: &[f64], ws: &[f64], rate: f64) -> FittedParams {
    let mut ata = Matrix2::zeros();
    let mut aty = Vector2::zeros();
    for ((&x, &y), &w) in xs.iter().zip(ys).zip(ws) {
        let a = Vector2::new(1.0, rate.powf(x));
        ata += w * a * a.transpose();
        aty += w * y * a;
    }
    match ata.lu().solve(&aty) {
        Some(sol) if rate < 1.0 && sol.iter().all(|v| v.is_finite()) => FittedParams {
            e_inf: sol[0],
            amplitude: sol[1],
            rate,
        },
        _ => {
            let wsum: f64 = ws.iter().sum();
            let mean = xs
                .iter()
                .zip(ys)
                .zip(ws)
                .map(|((_, &y), &w)| w * y)
                .sum::<f64>()
                / wsum;
            FittedParams {
                e_inf: mean,
                amplitude: 0.0,
                rate,
            }
        }
    }
}

fn result(p: FittedParams, xs: &[f64], ys: &[f64]) -> ExtrapolationResult {
    let residual = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (y - (p.e_inf + p.amplitude * p.rate.powf(x))).powi(2))
        .sum();
    ExtrapolationResult {
        model: "exponential".to_string(),
        fitted_params: p,
        residual,
        estimate: p.e_inf,
    }
}
