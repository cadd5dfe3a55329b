//! The doubled-variable integrals
//!
//! ```text
//! I₁ = ∫∫ ω_ε(t−s) ρ_ε(x−y) |u(x,t) − v(y,s)|
//! I₂ = ∫∫ ω_ε(t−s) ρ_ε(x−y) q(x, u(x,t), v(y,s))
//! I₃ = ∫∫ ω_ε(t−s) ρ_ε(x−y) sign(u(x,t) − v(y,s)) (div_y f(y, u(x,t)) − div_x f(x, v(y,s)))
//! I₄ = ∫∫ ω_ε(t−s) ∇_yρ_ε(x−y) · (q(y, u(x,t), v(y,s)) − q(x, u(x,t), v(y,s)))
//! ```
//!
//! with q(x,a,b) = sign(a − b)(f(x,a) − f(x,b)), against their ε → 0 limits
//! |u − v|, q(x,u,v), div_x q(x,u,v) and −div_x q(x,u,v).
//!
//! In time v(·, s) is the stored level nearest to s, and the ω_ε weight of
//! each level's interval is exact. In space each cell is integrated with a
//! 4-point Gauss rule per axis.

use serde::Serialize;
use serde_json::Value;

use super::{json_list, Criterion, ReportKind, ResidualReport};
use crate::entropy::{kruzkov_div, kruzkov_flux};
use crate::flux::{lipschitz_constant, FluxSpec};
use crate::mollifier::{alpha, Mollifier};
use crate::quadrature::gl4;
use crate::solver::GridField;
use crate::{Error, Result, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoublingOptions {
    /// Slope scale L in the jump threshold 10·Δx·L; defaults to
    /// max(1, N) with N the flux Lipschitz bound over the domain.
    pub lip_estimate: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoublingRow {
    pub x: Vector,
    pub t: f64,
    pub eps: f64,
    pub values: [f64; 4],
    pub limits: [f64; 4],
    /// |I_j − limit_j|; I₂ uses the Euclidean norm of the vector difference.
    pub deviations: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingTable {
    pub eps_list: Vec<f64>,
    pub rows: Vec<DoublingRow>,
    /// max over samples of each deviation, one entry per ε.
    pub max_deviation: Vec<[f64; 4]>,
}

impl DoublingTable {
    /// Worst ratio of successive max deviations over I₁–I₄ (≤ 1 when every
    /// max deviation is non-increasing), as a report.
    pub fn report(&self, flux: &FluxSpec) -> ResidualReport {
        let mut worst: f64 = 0.0;
        for w in self.max_deviation.windows(2) {
            for j in 0..4 {
                let r = if w[1][j] == 0.0 {
                    0.0
                } else if w[0][j] == 0.0 {
                    f64::INFINITY
                } else {
                    w[1][j] / w[0][j]
                };
                worst = worst.max(r);
            }
        }
        let per_sample: Vec<bool> = (0..4).map(|j| self.decreasing_at_every_sample(j)).collect();
        let maxes: Vec<Value> = self.max_deviation.iter().map(|d| json_list(d)).collect();
        ResidualReport::new(ReportKind::Doubling, worst, 1.0, Criterion::AtMostTol)
            .with("flux", flux.name.clone())
            .with("eps_list", json_list(&self.eps_list))
            .with("samples", (self.rows.len() / self.eps_list.len().max(1)) as u64)
            .with("max_deviation", Value::from(maxes))
            .with("decreasing_at_every_sample", Value::from(per_sample))
    }

    /// Whether the max deviation of I_j is non-increasing along the ε list.
    pub fn decreasing(&self, j: usize) -> bool {
        self.max_deviation.windows(2).all(|w| w[1][j] <= w[0][j])
    }

    /// Per-sample monotonicity of deviation j along the ε list.
    pub fn decreasing_at_every_sample(&self, j: usize) -> bool {
        let m = self.eps_list.len();
        self.rows
            .chunks(m)
            .all(|c| c.windows(2).all(|w| w[1].deviations[j] <= w[0].deviations[j]))
    }
}

/// Errors with `SampleNearShock` if any adjacent-cell jump within reach of
/// the kernel exceeds the threshold.
fn check_smooth(field: &GridField, x: &Vector, t: f64, reach: f64, threshold: f64) -> Result<()> {
    let g = &field.grid;
    let dx = g.dx();
    let span = (reach / dx).ceil() as isize + 1;
    let center = g.locate(x).ok_or_else(|| Error::InvalidArgument(format!("{x:?} outside the grid")))?;
    let ci = (center % g.nx) as isize;
    let cj = (center / g.nx) as isize;
    let nx = g.nx as isize;
    let in_range = |i: isize| (0..nx).contains(&i);
    for (level, &tl) in field.times.iter().enumerate() {
        if (tl - t).abs() > reach + field.max_dt() {
            continue;
        }
        let s = field.slab(level);
        let jr = if g.dim == 2 { cj - span..=cj + span } else { 0..=0 };
        for j in jr {
            for i in ci - span..=ci + span {
                if !in_range(i) || (g.dim == 2 && !in_range(j)) {
                    continue;
                }
                let idx = (i + j * nx) as usize;
                if in_range(i + 1) && (s[idx + 1] - s[idx]).abs() > threshold {
                    return Err(Error::SampleNearShock { x: *x, t });
                }
                if g.dim == 2 && in_range(j + 1) && (s[idx + g.nx] - s[idx]).abs() > threshold {
                    return Err(Error::SampleNearShock { x: *x, t });
                }
            }
        }
    }
    Ok(())
}

/// Weights ∫ ω_ε(t − s) ds over the s-interval where each stored level is the
/// nearest one, for levels whose interval meets [t − ε, t + ε].
fn time_weights(field: &GridField, t: f64, eps: f64) -> Vec<(usize, f64)> {
    let times = &field.times;
    let mut out = Vec::new();
    for n in 0..times.len() {
        let a = if n == 0 { f64::NEG_INFINITY } else { 0.5 * (times[n - 1] + times[n]) };
        let b = if n + 1 == times.len() { f64::INFINITY } else { 0.5 * (times[n] + times[n + 1]) };
        if b <= t - eps || a >= t + eps {
            continue;
        }
        let w = alpha(eps, t - a) - alpha(eps, t - b);
        if w != 0.0 {
            out.push((n, w));
        }
    }
    out
}

/// I₁–I₄ at each sample point for each ε, with their limits.
pub fn doubling_diagnostics(
    u: &GridField,
    v: &GridField,
    flux: &FluxSpec,
    eps_list: &[f64],
    samples: &[(Vector, f64)],
    opts: &DoublingOptions,
) -> Result<DoublingTable> {
    u.check_compatible(v)?;
    if eps_list.is_empty() || eps_list.windows(2).any(|w| !(w[1] < w[0])) || !(eps_list[0] > 0.0) {
        return Err(Error::InvalidArgument("eps_list must be positive and decreasing".into()));
    }
    let g = u.grid;
    let dim = g.dim;
    let dx = g.dx();
    let eps_max = eps_list[0];
    let bound = u.bound_m.max(v.bound_m);
    let lip = match opts.lip_estimate {
        Some(l) => l,
        None => {
            let r = g.lower.abs().max(g.upper.abs()) * (dim as f64).sqrt();
            lipschitz_constant(flux, r, bound.max(1e-12))?.max(1.0)
        }
    };
    let threshold = 10.0 * dx * lip;
    let rule = gl4();
    let mut rows = Vec::with_capacity(samples.len() * eps_list.len());
    for &(x, t) in samples {
        for i in 0..dim {
            if x[i] - eps_max < g.lower || x[i] + eps_max > g.upper {
                return Err(Error::SupportExceedsDomain(format!(
                    "kernel around {x:?} with eps {eps_max} leaves the domain"
                )));
            }
        }
        if t - eps_max < u.times[0] || t + eps_max > u.t_end() {
            return Err(Error::MissingTimeLevels(format!(
                "kernel around t = {t} with eps {eps_max} leaves the stored times"
            )));
        }
        check_smooth(u, &x, t, eps_max, threshold)?;
        check_smooth(v, &x, t, eps_max, threshold)?;
        let level = u.nearest_level(t);
        let cell = g.locate(&x).expect("checked inside");
        let ux = u.slab(level)[cell];
        let vx = v.slab(level)[cell];
        let q_lim = kruzkov_flux(flux, &x, ux, vx);
        let d_lim = kruzkov_div(flux, &x, ux, vx);
        let limits = [(ux - vx).abs(), q_lim[0].hypot(q_lim[1]), d_lim, -d_lim];
        let div_fx_u_cache = |y: &Vector| flux.div_x(y, ux);
        for &eps in eps_list {
            let moll = Mollifier::new(dim, eps)?;
            let tw = time_weights(v, t, eps);
            let lo = |axis: usize| ((((x[axis] - eps) - g.lower) / dx).floor().max(0.0)) as usize;
            let hi = |axis: usize| ((((x[axis] + eps) - g.lower) / dx).ceil() as usize).min(g.nx);
            let (i0, i1) = (lo(0), hi(0));
            let (j0, j1) = if dim == 2 { (lo(1), hi(1)) } else { (0, 1) };
            let mut acc = [0.0f64; 5];
            for j in j0..j1 {
                for i in i0..i1 {
                    let idx = i + j * g.nx;
                    let cx = g.lower + i as f64 * dx;
                    let cy = g.lower + j as f64 * dx;
                    let ny = if dim == 2 { rule.nodes.len() } else { 1 };
                    for b in 0..ny {
                        for a in 0..rule.nodes.len() {
                            let mut y = [cx + 0.5 * dx * (1.0 + rule.nodes[a]), 0.0];
                            let mut w = 0.5 * dx * rule.weights[a];
                            if dim == 2 {
                                y[1] = cy + 0.5 * dx * (1.0 + rule.nodes[b]);
                                w *= 0.5 * dx * rule.weights[b];
                            }
                            let z = [x[0] - y[0], x[1] - y[1]];
                            let rho = moll.value(&z);
                            if rho == 0.0 {
                                continue;
                            }
                            let gz = moll.gradient(&z);
                            let grad_y = [-gz[0], -gz[1]];
                            let div_y_u = div_fx_u_cache(&y);
                            for &(n, wt) in &tw {
                                let vy = v.slab(n)[idx];
                                let ww = w * wt;
                                let s = crate::sign(ux - vy);
                                acc[0] += ww * rho * (ux - vy).abs();
                                let qx = kruzkov_flux(flux, &x, ux, vy);
                                acc[1] += ww * rho * qx[0];
                                acc[2] += ww * rho * qx[1];
                                if s != 0.0 {
                                    acc[3] += ww * rho * s * (div_y_u - flux.div_x(&x, vy));
                                }
                                let qy = kruzkov_flux(flux, &y, ux, vy);
                                acc[4] += ww * (grad_y[0] * (qy[0] - qx[0]) + grad_y[1] * (qy[1] - qx[1]));
                            }
                        }
                    }
                }
            }
            let i2 = [acc[1], acc[2]];
            let values = [acc[0], i2[0].hypot(i2[1]), acc[3], acc[4]];
            let deviations = [
                (acc[0] - limits[0]).abs(),
                (i2[0] - q_lim[0]).hypot(i2[1] - q_lim[1]),
                (acc[3] - limits[2]).abs(),
                (acc[4] - limits[3]).abs(),
            ];
            rows.push(DoublingRow {
                x,
                t,
                eps,
                values,
                limits,
                deviations,
            });
        }
    }
    let m = eps_list.len();
    let max_deviation = (0..m)
        .map(|e| {
            let mut d = [0.0f64; 4];
            for row in rows.iter().skip(e).step_by(m) {
                for j in 0..4 {
                    d[j] = d[j].max(row.deviations[j]);
                }
            }
            d
        })
        .collect();
    Ok(DoublingTable {
        eps_list: eps_list.to_vec(),
        rows,
        max_deviation,
    })
}
