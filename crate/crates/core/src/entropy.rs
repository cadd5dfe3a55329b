//! Entropy pairs (η, q) for a catalog flux.
//!
//! For a convex η and a reference state k₀ the entropy flux is
//!
//! ```text
//! q(x, k) = ∫_{k₀}^{k} η′(ω) ∂_ω f(x, ω) dω
//! ```
//!
//! and, for η ∈ C², the integration-by-parts form
//!
//! ```text
//! q(x, k) = −∫_{k₀}^{k} η″(ω) f(x, ω) dω + η′(k) f(x, k) − η′(k₀) f(x, k₀).
//! ```
//!
//! Both routes are implemented independently; their agreement is tested.
//! The Kruzkov pair η = |k − k₀|, q = sign(k − k₀)(f(x,k) − f(x,k₀)) is the
//! limit of the smooth family η_n(k) = √((k − k₀)² + 1/n).

use std::fmt::Debug;

use crate::flux::FluxSpec;
use crate::quadrature::integrate;
use crate::{sign, Error, Result, Vector};

/// A C² convex entropy with its first two derivatives.
pub trait SmoothEntropy: Debug + Send + Sync {
    fn value(&self, k: f64) -> f64;
    fn d1(&self, k: f64) -> f64;
    fn d2(&self, k: f64) -> f64;
}

/// η_n(k) = √((k − k₀)² + 1/n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizedAbs {
    pub k0: f64,
    pub n: u32,
}

impl SmoothEntropy for RegularizedAbs {
    fn value(&self, k: f64) -> f64 {
        let s = k - self.k0;
        (s * s + 1.0 / self.n as f64).sqrt()
    }

    fn d1(&self, k: f64) -> f64 {
        let s = k - self.k0;
        s / (s * s + 1.0 / self.n as f64).sqrt()
    }

    fn d2(&self, k: f64) -> f64 {
        let s = k - self.k0;
        let a = 1.0 / self.n as f64;
        a / (s * s + a).powf(1.5)
    }
}

/// η(k) = a k², a ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic {
    pub a: f64,
}

impl SmoothEntropy for Quadratic {
    fn value(&self, k: f64) -> f64 {
        self.a * k * k
    }

    fn d1(&self, k: f64) -> f64 {
        2.0 * self.a * k
    }

    fn d2(&self, _k: f64) -> f64 {
        2.0 * self.a
    }
}

/// η(k) = cosh(k − k₀).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoshEntropy {
    pub k0: f64,
}

impl SmoothEntropy for CoshEntropy {
    fn value(&self, k: f64) -> f64 {
        (k - self.k0).cosh()
    }

    fn d1(&self, k: f64) -> f64 {
        (k - self.k0).sinh()
    }

    fn d2(&self, k: f64) -> f64 {
        (k - self.k0).cosh()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropyKind {
    /// η_n from [`RegularizedAbs`].
    Smooth { n: u32 },
    /// η = |k − k₀|.
    Kruzkov,
}

/// An entropy η bundled with its flux q for a given flux and reference state.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyPair {
    pub flux: FluxSpec,
    pub k0: f64,
    pub kind: EntropyKind,
}

impl EntropyPair {
    pub fn eta(&self, k: f64) -> f64 {
        match self.kind {
            EntropyKind::Smooth { n } => RegularizedAbs { k0: self.k0, n }.value(k),
            EntropyKind::Kruzkov => (k - self.k0).abs(),
        }
    }

    /// η′ with the convention η′(k₀) = 0 for the Kruzkov entropy.
    pub fn eta_prime(&self, k: f64) -> f64 {
        match self.kind {
            EntropyKind::Smooth { n } => RegularizedAbs { k0: self.k0, n }.d1(k),
            EntropyKind::Kruzkov => sign(k - self.k0),
        }
    }

    /// Entropy flux q(x, k).
    pub fn q(&self, x: &Vector, k: f64) -> Result<Vector> {
        match self.kind {
            EntropyKind::Smooth { n } => {
                let eta = RegularizedAbs { k0: self.k0, n };
                q_build_quadrature(&self.flux, &|w| eta.d1(w), self.k0, x, k)
            }
            EntropyKind::Kruzkov => Ok(kruzkov_flux(&self.flux, x, k, self.k0)),
        }
    }

    /// div_x q(x, k) at frozen k.
    pub fn div_x_q(&self, x: &Vector, k: f64) -> Result<f64> {
        match self.kind {
            EntropyKind::Smooth { n } => {
                div_x_q_ibp(&self.flux, &RegularizedAbs { k0: self.k0, n }, self.k0, x, k)
            }
            EntropyKind::Kruzkov => Ok(kruzkov_div(&self.flux, x, k, self.k0)),
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            EntropyKind::Smooth { n } => format!("smooth(n={n}, k0={})", self.k0),
            EntropyKind::Kruzkov => format!("kruzkov(k0={})", self.k0),
        }
    }
}

/// The pair (η_n, q_n) with η_n(k) = √((k − k₀)² + 1/n).
pub fn make_smooth_pair(flux: &FluxSpec, k0: f64, n: u32) -> Result<EntropyPair> {
    if n == 0 {
        return Err(Error::InvalidArgument("smooth entropy index n must be >= 1".into()));
    }
    if !k0.is_finite() {
        return Err(Error::InvalidArgument(format!("k0 must be finite, got {k0}")));
    }
    Ok(EntropyPair {
        flux: flux.clone(),
        k0,
        kind: EntropyKind::Smooth { n },
    })
}

/// Kruzkov's pair η = |k − k₀|, q = sign(k − k₀)(f(x,k) − f(x,k₀)).
pub fn make_kruzkov_pair(flux: &FluxSpec, k0: f64) -> EntropyPair {
    EntropyPair {
        flux: flux.clone(),
        k0,
        kind: EntropyKind::Kruzkov,
    }
}

/// Two-argument Kruzkov flux sign(a − b)(f(x,a) − f(x,b)).
#[inline]
pub fn kruzkov_flux(flux: &FluxSpec, x: &Vector, a: f64, b: f64) -> Vector {
    let s = sign(a - b);
    if s == 0.0 {
        return [0.0; 2];
    }
    let fa = flux.eval(x, a);
    let fb = flux.eval(x, b);
    [s * (fa[0] - fb[0]), s * (fa[1] - fb[1])]
}

/// sign(a − b)(div_x f(x,a) − div_x f(x,b)).
#[inline]
pub fn kruzkov_div(flux: &FluxSpec, x: &Vector, a: f64, b: f64) -> f64 {
    let s = sign(a - b);
    if s == 0.0 {
        return 0.0;
    }
    s * (flux.div_x(x, a) - flux.div_x(x, b))
}

/// q(x, k) = ∫_{k₀}^{k} η′(ω) ∂_ω f(x, ω) dω by adaptive Gauss–Legendre.
pub fn q_build_quadrature(
    flux: &FluxSpec,
    eta_prime: &dyn Fn(f64) -> f64,
    k0: f64,
    x: &Vector,
    k: f64,
) -> Result<Vector> {
    let mut out = [0.0; 2];
    for (i, slot) in out.iter_mut().enumerate().take(flux.dim) {
        *slot = integrate(|w| eta_prime(w) * flux.dk(x, w)[i], k0, k)?;
    }
    Ok(out)
}

/// q(x, k) by integration by parts:
/// −∫_{k₀}^{k} η″ f dω + η′(k) f(x,k) − η′(k₀) f(x,k₀).
pub fn q_build_ibp(
    flux: &FluxSpec,
    eta: &dyn SmoothEntropy,
    k0: f64,
    x: &Vector,
    k: f64,
) -> Result<Vector> {
    let fk = flux.eval(x, k);
    let f0 = flux.eval(x, k0);
    let mut out = [0.0; 2];
    for (i, slot) in out.iter_mut().enumerate().take(flux.dim) {
        let inner = integrate(|w| eta.d2(w) * flux.eval(x, w)[i], k0, k)?;
        *slot = -inner + eta.d1(k) * fk[i] - eta.d1(k0) * f0[i];
    }
    Ok(out)
}

/// div_x q(x, k) for a smooth entropy, from the integration-by-parts form
/// with D_x f in place of f.
pub fn div_x_q_ibp(
    flux: &FluxSpec,
    eta: &dyn SmoothEntropy,
    k0: f64,
    x: &Vector,
    k: f64,
) -> Result<f64> {
    let inner = integrate(|w| eta.d2(w) * flux.div_x(x, w), k0, k)?;
    Ok(-inner + eta.d1(k) * flux.div_x(x, k) - eta.d1(k0) * flux.div_x(x, k0))
}

/// |q_n(x, k) − q(x, k)| for the smooth family against the Kruzkov flux.
pub fn kruzkov_limit_deficit(
    flux: &FluxSpec,
    k0: f64,
    x: &Vector,
    k: f64,
    n_list: &[u32],
) -> Result<Vec<f64>> {
    check_increasing(n_list)?;
    let exact = kruzkov_flux(flux, x, k, k0);
    n_list
        .iter()
        .map(|&n| {
            let qn = make_smooth_pair(flux, k0, n)?.q(x, k)?;
            Ok(crate::norm(&[qn[0] - exact[0], qn[1] - exact[1]]))
        })
        .collect()
}

/// |div_x q_n(x, k) − div_x q(x, k)| for the smooth family against the
/// Kruzkov pair.
pub fn kruzkov_div_limit_deficit(
    flux: &FluxSpec,
    k0: f64,
    x: &Vector,
    k: f64,
    n_list: &[u32],
) -> Result<Vec<f64>> {
    check_increasing(n_list)?;
    let exact = kruzkov_div(flux, x, k, k0);
    n_list
        .iter()
        .map(|&n| Ok((make_smooth_pair(flux, k0, n)?.div_x_q(x, k)? - exact).abs()))
        .collect()
}

fn check_increasing(n_list: &[u32]) -> Result<()> {
    if n_list.windows(2).any(|w| w[1] <= w[0]) || n_list.first() == Some(&0) {
        return Err(Error::InvalidArgument(
            "n_list must be positive and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Differentiation under the integral sign: compares the central difference
/// of x ↦ ∫_B ξ(ω) f(x, ω) dω (divergence over the spatial axes) with
/// ∫_B ξ(ω) div_x f(x, ω) dω, one discrepancy per step in `h_list`.
pub fn leibniz_check(
    flux: &FluxSpec,
    xi: &dyn Fn(f64) -> f64,
    interval: (f64, f64),
    x: &Vector,
    h_list: &[f64],
) -> Result<Vec<f64>> {
    let (lo, hi) = interval;
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("bad interval [{lo}, {hi}]")));
    }
    if h_list.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::InvalidArgument("steps must be positive".into()));
    }
    let x = flux.off_singular(x);
    let moment = |y: &Vector, i: usize| integrate(|w| xi(w) * flux.eval(y, w)[i], lo, hi);
    let exact = integrate(|w| xi(w) * flux.div_x(&x, w), lo, hi)?;
    h_list
        .iter()
        .map(|&h| {
            let mut fd = 0.0;
            for i in 0..flux.dim {
                let mut xp = x;
                let mut xm = x;
                xp[i] += h;
                xm[i] -= h;
                fd += (moment(&xp, i)? - moment(&xm, i)?) / (2.0 * h);
            }
            Ok((fd - exact).abs())
        })
        .collect()
}

/// `count` reference states uniform in [−M, M] (9 by default in sweeps).
pub fn k0_sweep(bound: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..count)
            .map(|j| -bound + 2.0 * bound * j as f64 / (count - 1) as f64)
            .collect(),
    }
}
