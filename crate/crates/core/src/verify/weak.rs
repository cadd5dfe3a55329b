//! Space-time quadrature of weak-form integrands on grid fields.
//!
//! The fields are piecewise constant: cell i and slab [t_n, t_{n+1}) carry
//! u_i^n. Under [`QuadratureRule::Telescoping`] the test-function derivatives
//! are replaced by their exact cell and slab averages
//!
//! ```text
//! ∂ₜφ ≈ (φ(x_i, t_{n+1}) − φ(x_i, t_n)) / Δt
//! ∂_jφ ≈ (φ(x_i + Δx e_j/2, t_mid) − φ(x_i − Δx e_j/2, t_mid)) / Δx
//! ```
//!
//! so sums of divergence terms telescope and constant fields give exactly
//! zero up to rounding. [`QuadratureRule::Pointwise`] uses the analytic
//! derivatives at (x_i, t_mid).

use std::collections::HashMap;

use rayon::prelude::*;
use serde_json::Value;

use super::{json_list, Criterion, ReportKind, ResidualReport, DEFAULT_TOL_FACTOR};
use crate::entropy::{k0_sweep, kruzkov_flux, make_kruzkov_pair, make_smooth_pair, EntropyPair};
use crate::flux::FluxSpec;
use crate::mollifier::TestFunction;
use crate::solver::GridField;
use crate::{Error, Result, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadratureRule {
    #[default]
    Telescoping,
    Pointwise,
}

impl QuadratureRule {
    fn as_str(&self) -> &'static str {
        match self {
            QuadratureRule::Telescoping => "telescoping",
            QuadratureRule::Pointwise => "pointwise",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WeakFormOptions {
    pub rule: QuadratureRule,
    /// Overrides C in tol = C·(Δx + Δt)·|support|.
    pub c_tol: Option<f64>,
}

/// Local integrand data (η, q, source) at a cell.
#[derive(Clone, Copy)]
pub(crate) struct Integrand {
    pub eta: f64,
    pub q: Vector,
    pub source: f64,
}

/// Test-function weights (∂ₜφ, ∇φ, φ) on the nonzero cells of one slab.
struct SlabWeights {
    level: usize,
    /// Δt·Δx^d
    scale: f64,
    cells: Vec<(usize, f64, Vector, f64)>,
}

/// The discrete test-function weights over the support of φ, computed once
/// and reused for every integrand.
pub(crate) struct Weights {
    slabs: Vec<SlabWeights>,
    n_fields: usize,
}

impl Weights {
    pub(crate) fn new(fields: &[&GridField], phi: &dyn TestFunction, rule: QuadratureRule) -> Result<Self> {
        let u = fields[0];
        let grid = u.grid;
        let dim = grid.dim;
        if phi.dim() != dim {
            return Err(Error::InvalidArgument(format!(
                "test function is {}-d, field is {dim}-d",
                phi.dim()
            )));
        }
        let sb = phi.support();
        let slack = 1e-12 * (grid.upper - grid.lower);
        for i in 0..dim {
            if sb.lower[i] < grid.lower - slack || sb.upper[i] > grid.upper + slack {
                return Err(Error::SupportExceedsDomain(format!(
                    "support [{}, {}] on axis {i} leaves the domain [{}, {}]",
                    sb.lower[i], sb.upper[i], grid.lower, grid.upper
                )));
            }
        }
        let (t0, t1) = (u.times[0], u.t_end());
        if sb.t_lower < t0 - 1e-12 || sb.t_upper > t1 + 1e-12 {
            return Err(Error::MissingTimeLevels(format!(
                "support times [{}, {}] not covered by stored levels [{t0}, {t1}]",
                sb.t_lower, sb.t_upper
            )));
        }
        let dx = grid.dx();
        let nx = grid.nx;
        let axis_range = |lo: f64, hi: f64| {
            let a = (((lo - grid.lower) / dx).floor().max(0.0) as usize).min(nx - 1);
            let b = (((hi - grid.lower) / dx).ceil().max(0.0) as usize).min(nx);
            (a, b)
        };
        let (ia, ib) = axis_range(sb.lower[0], sb.upper[0]);
        let (ja, jb) = if dim == 2 {
            axis_range(sb.lower[1], sb.upper[1])
        } else {
            (0, 1)
        };
        let cells: Vec<usize> = (ja..jb)
            .flat_map(|j| (ia..ib).map(move |i| i + j * nx))
            .collect();
        let vol = dx.powi(dim as i32);
        let half = 0.5 * dx;
        let mut slabs = Vec::new();
        let mut phi_prev: Vec<f64> = Vec::new();
        for n in 0..u.n_levels() - 1 {
            let (ta, tb) = (u.times[n], u.times[n + 1]);
            if tb <= sb.t_lower || ta >= sb.t_upper {
                phi_prev.clear();
                continue;
            }
            let dt = tb - ta;
            let tm = 0.5 * (ta + tb);
            if rule == QuadratureRule::Telescoping && phi_prev.is_empty() {
                phi_prev = cells.iter().map(|&c| phi.value(&grid.center(c), ta)).collect();
            }
            let phi_next: Vec<f64> = if rule == QuadratureRule::Telescoping {
                cells.iter().map(|&c| phi.value(&grid.center(c), tb)).collect()
            } else {
                Vec::new()
            };
            let mut slab = SlabWeights {
                level: n,
                scale: dt * vol,
                cells: Vec::new(),
            };
            for (m, &c) in cells.iter().enumerate() {
                let x = grid.center(c);
                let p = phi.value(&x, tm);
                let (dphi_t, grad) = match rule {
                    QuadratureRule::Telescoping => {
                        let dphi_t = (phi_next[m] - phi_prev[m]) / dt;
                        let mut g = [0.0; 2];
                        for (axis, gi) in g.iter_mut().enumerate().take(dim) {
                            let mut xp = x;
                            let mut xm = x;
                            xp[axis] += half;
                            xm[axis] -= half;
                            *gi = (phi.value(&xp, tm) - phi.value(&xm, tm)) / dx;
                        }
                        (dphi_t, g)
                    }
                    QuadratureRule::Pointwise => (phi.dt(&x, tm), phi.grad_x(&x, tm)),
                };
                if p == 0.0 && dphi_t == 0.0 && grad == [0.0, 0.0] {
                    continue;
                }
                slab.cells.push((c, dphi_t, grad, p));
            }
            slabs.push(slab);
            if rule == QuadratureRule::Telescoping {
                phi_prev = phi_next;
            }
        }
        Ok(Self {
            slabs,
            n_fields: fields.len(),
        })
    }

    /// ∫∫ [∂ₜφ η + ∇φ·q + φ·source].
    pub(crate) fn integrate(
        &self,
        fields: &[&GridField],
        mut integrand: impl FnMut(&Vector, &[f64]) -> Result<Integrand>,
    ) -> Result<f64> {
        debug_assert_eq!(fields.len(), self.n_fields);
        let grid = fields[0].grid;
        let mut values = vec![0.0; fields.len()];
        let mut total = 0.0;
        for slab in &self.slabs {
            let mut slab_sum = 0.0;
            for &(c, dphi_t, grad, p) in &slab.cells {
                for (val, f) in values.iter_mut().zip(fields) {
                    *val = f.data[slab.level][c];
                }
                let it = integrand(&grid.center(c), &values)?;
                slab_sum += dphi_t * it.eta + grad[0] * it.q[0] + grad[1] * it.q[1] + p * it.source;
            }
            total += slab_sum * slab.scale;
        }
        Ok(total)
    }
}

/// ∫∫ [∂ₜφ η + ∇φ·q + φ·source] over the support of φ.
pub(crate) fn weak_integral(
    fields: &[&GridField],
    phi: &dyn TestFunction,
    rule: QuadratureRule,
    integrand: impl FnMut(&Vector, &[f64]) -> Result<Integrand>,
) -> Result<f64> {
    Weights::new(fields, phi, rule)?.integrate(fields, integrand)
}

/// Entropy integrand of `pair`. For a homogeneous flux the integrand depends
/// on the state only, so it is memoized on the state bits.
fn entropy_integral(u: &GridField, flux: &FluxSpec, pair: &EntropyPair, weights: &Weights) -> Result<f64> {
    let eval = |x: &Vector, k: f64| -> Result<Integrand> {
        Ok(Integrand {
            eta: pair.eta(k),
            q: pair.q(x, k)?,
            source: pair.div_x_q(x, k)? - pair.eta_prime(k) * flux.div_x(x, k),
        })
    };
    if flux.is_homogeneous() {
        let mut memo: HashMap<u64, Integrand> = HashMap::new();
        weights.integrate(&[u], |x, v| {
            let key = v[0].to_bits();
            if let Some(it) = memo.get(&key) {
                return Ok(*it);
            }
            let it = eval(x, v[0])?;
            memo.insert(key, it);
            Ok(it)
        })
    } else {
        weights.integrate(&[u], |x, v| eval(x, v[0]))
    }
}

/// ∫∫ [∂ₜφ η(u) + φ(div_x q(x,u) − η′(u) div_x f(x,u)) + ∇φ·q(x,u)] dx dt.
pub fn entropy_residual(
    u: &GridField,
    flux: &FluxSpec,
    pair: &EntropyPair,
    phi: &dyn TestFunction,
    opts: &WeakFormOptions,
) -> Result<ResidualReport> {
    let weights = Weights::new(&[u], phi, opts.rule)?;
    residual_report(u, flux, pair, phi, opts, &weights)
}

fn residual_report(
    u: &GridField,
    flux: &FluxSpec,
    pair: &EntropyPair,
    phi: &dyn TestFunction,
    opts: &WeakFormOptions,
    weights: &Weights,
) -> Result<ResidualReport> {
    let value = entropy_integral(u, flux, pair, weights)?;
    let (tol, c) = tolerance(&[u], phi, opts);
    let r = ResidualReport::new(ReportKind::EntropyInequality, value, tol, Criterion::AtLeastNegTol)
        .with("entropy", pair.label());
    Ok(base_metadata(r, u, flux, phi, opts, c))
}

fn tolerance(fields: &[&GridField], phi: &dyn TestFunction, opts: &WeakFormOptions) -> (f64, f64) {
    let m = fields.iter().fold(0.0f64, |a, f| a.max(f.bound_m));
    let c = opts
        .c_tol
        .unwrap_or(DEFAULT_TOL_FACTOR * phi.lipschitz_bound() * m);
    let u = fields[0];
    (c * (u.dx() + u.max_dt()) * phi.support().measure(), c)
}

fn base_metadata(r: ResidualReport, u: &GridField, flux: &FluxSpec, phi: &dyn TestFunction, opts: &WeakFormOptions, c: f64) -> ResidualReport {
    r.with("flux", flux.name.clone())
        .with("test_function", phi.describe())
        .with("dx", u.dx())
        .with("dt", u.max_dt())
        .with("nx", u.grid.nx as u64)
        .with("quadrature", opts.rule.as_str())
        .with("c_tol", c)
}

/// ∫∫ [∂ₜψ |u − v| + ∇ψ·sign(u − v)(f(x,u) − f(x,v))] dx dt.
pub fn kato_lhs(
    u: &GridField,
    v: &GridField,
    flux: &FluxSpec,
    psi: &dyn TestFunction,
    opts: &WeakFormOptions,
) -> Result<ResidualReport> {
    u.check_compatible(v)?;
    let value = weak_integral(&[u, v], psi, opts.rule, |x, w| {
        Ok(Integrand {
            eta: (w[0] - w[1]).abs(),
            q: kruzkov_flux(flux, x, w[0], w[1]),
            source: 0.0,
        })
    })?;
    let (tol, c) = tolerance(&[u, v], psi, opts);
    let r = ResidualReport::new(ReportKind::Kato, value, tol, Criterion::AtLeastNegTol);
    Ok(base_metadata(r, u, flux, psi, opts, c))
}

/// Default entropy sweep: 9 Kruzkov pairs with k₀ uniform in [−M, M] and the
/// smooth pairs n ∈ {4, 16, 64} at k₀ = 0.
pub fn entropy_sweep(
    u: &GridField,
    flux: &FluxSpec,
    phi: &dyn TestFunction,
    opts: &WeakFormOptions,
) -> Result<Vec<ResidualReport>> {
    entropy_sweep_with(u, flux, phi, opts, 9, &[4, 16, 64])
}

/// `k0_count` Kruzkov pairs uniform in [−M, M] plus smooth pairs at k₀ = 0
/// for each n in `smooth_n`.
pub fn entropy_sweep_with(
    u: &GridField,
    flux: &FluxSpec,
    phi: &dyn TestFunction,
    opts: &WeakFormOptions,
    k0_count: usize,
    smooth_n: &[u32],
) -> Result<Vec<ResidualReport>> {
    let m = u.bound_m;
    let mut pairs: Vec<EntropyPair> = k0_sweep(m, k0_count)
        .into_iter()
        .map(|k| make_kruzkov_pair(flux, k))
        .collect();
    for &n in smooth_n {
        pairs.push(make_smooth_pair(flux, 0.0, n)?);
    }
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("empty entropy sweep".into()));
    }
    let weights = Weights::new(&[u], phi, opts.rule)?;
    pairs
        .par_iter()
        .map(|p| {
            residual_report(u, flux, p, phi, opts, &weights)
                .map(|r| r.with("k0", p.k0).with("sweep_bound", m))
        })
        .collect()
}

/// Smallest value over a sweep, with every value recorded.
pub fn sweep_summary(reports: &[ResidualReport]) -> Option<ResidualReport> {
    let worst = reports
        .iter()
        .min_by(|a, b| (a.value + a.tolerance).total_cmp(&(b.value + b.tolerance)))?;
    let values: Vec<f64> = reports.iter().map(|r| r.value).collect();
    let labels: Vec<Value> = reports
        .iter()
        .map(|r| r.metadata.get("entropy").cloned().unwrap_or(Value::Null))
        .collect();
    let mut out = worst.clone().with("sweep_values", json_list(&values));
    out.metadata.insert("sweep_entropies".into(), Value::from(labels));
    out.passed = reports.iter().all(|r| r.passed);
    Some(out)
}
