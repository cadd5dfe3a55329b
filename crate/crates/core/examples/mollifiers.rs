//! Standard mollifiers, the integrated kernel α_h, the cone cutoff χ_ε and
//! the contraction test function ψ.

use entropy_lab::mollifier::{
    alpha, alpha_quadrature, chi_epsilon, contraction_test_function, normalization, omega_mass, ConeSpec,
    Mollifier, TestFunction,
};

fn main() -> entropy_lab::Result<()> {
    println!("C_1 = {:.6}, C_2 = {:.6}", normalization(1), normalization(2));
    let h = 0.1;
    for s in [-0.1, -0.05, 0.0, 0.03, 0.1] {
        println!("alpha_h({s:+.2}) = {:.12} (quadrature {:.12})", alpha(h, s), alpha_quadrature(h, s)?);
    }
    println!("mass of omega_h on [-0.02, 0.05] = {:.6}", omega_mass(h, -0.02, 0.05));

    let m = Mollifier::new(2, 0.25)?;
    println!("2-d mollifier sup = {:.4}, value at (0.1, 0.1) = {:.4}", m.sup_norm(), m.value(&[0.1, 0.1]));

    let cone = ConeSpec::new(2.0, 1.0)?.with_horizon(1.5);
    for (x, t) in [(0.0, 0.5), (1.45, 0.5), (1.6, 0.5)] {
        println!("chi_eps({x}, {t}) = {:.4}  (ball radius {:.2})", chi_epsilon(&cone, 0.1, &[x, 0.0], t), cone.ball_radius(t));
    }

    let psi = contraction_test_function(1, cone, 0.3, 1.0, 0.1, 0.1)?;
    println!("{}: support {:?}", psi.describe(), psi.support());
    for t in [0.1, 0.3, 0.65, 1.0, 1.2] {
        println!("psi(0, {t}) = {:.4}  dt psi = {:+.4}", psi.value(&[0.0, 0.0], t), psi.dt(&[0.0, 0.0], t));
    }
    Ok(())
}
