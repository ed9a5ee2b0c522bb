//! Haar measure of balls and spheres, character integrals and |x|^s over balls.

use madic::haar::*;

fn main() -> madic::Result<()> {
    let m = 3;
    for r in -2..=2 {
        println!("mu(B_{r}) = {:<8} mu(S_{r}) = {}", ball_measure(m, r), sphere_measure(m, r));
    }

    // the character integral over B_r is mu(B_r) when |k| m^r <= 1 and 0 otherwise
    for e in -1..=2 {
        let k = KNorm::Power(e);
        println!("|k| = 3^{e}: int_B1 chi = {:.6}, int_S1 chi = {:.6}", character_ball_integral(m, k, 1), character_sphere_integral(m, k, 1));
    }

    let f = RadialFunction::power(m, 1.0, -0.5)?;
    let whole = integrate_radial(&f, 0)?;
    println!("int_Z3 |x|^-1/2 dx = {:.15} (tail bound {:.1e})", whole.value.re, whole.tail_bound);
    let fourier = radial_character_integral(&f, KNorm::Power(2), 0)?;
    println!("int_Z3 chi(kx) |x|^-1/2 dx at |k| = 9: {:.15}", fourier.value.re);
    Ok(())
}
