//! Smooth entropy pairs η_n(k) = sqrt((k − k₀)² + 1/n) approaching the
//! Kruzkov pair |k − k₀|, and differentiation under the integral sign.

use entropy_lab::entropy::{
    kruzkov_div_limit_deficit, kruzkov_limit_deficit, leibniz_check, make_kruzkov_pair, make_smooth_pair,
};
use entropy_lab::flux::catalog_lookup;

fn main() -> entropy_lab::Result<()> {
    let f = catalog_lookup("product1d")?;
    let (k0, x, k) = (0.2, [0.7, 0.0], 0.9);

    let kr = make_kruzkov_pair(&f, k0);
    println!("{}: eta={:.6} q={:.6?} div_x q={:.6}", kr.label(), kr.eta(k), kr.q(&x, k)?, kr.div_x_q(&x, k)?);
    for n in [1, 16, 256, 4096] {
        let p = make_smooth_pair(&f, k0, n)?;
        println!("{}: eta={:.6} q={:.6?} div_x q={:.6}", p.label(), p.eta(k), p.q(&x, k)?, p.div_x_q(&x, k)?);
    }

    let n_list = [1, 4, 16, 64, 256, 1024];
    println!("|q_n - q|        {}", sci(&kruzkov_limit_deficit(&f, k0, &x, k, &n_list)?));
    println!("|div q_n - div q| {}", sci(&kruzkov_div_limit_deficit(&f, k0, &x, k, &n_list)?));

    let xi = |w: f64| (1.0 - w * w).max(0.0);
    let h = [1e-2, 1e-3, 1e-4];
    println!("Leibniz discrepancy at h={h:?}: {}", sci(&leibniz_check(&f, &xi, (-1.0, 1.0), &x, &h)?));
    Ok(())
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" ")
}
