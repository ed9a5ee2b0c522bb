//! The Vladimirov kernel against its symbol -|k|^alpha, and a master equation check.

use madic::fractional::{FractionalSolution, Initial, WalkParams};
use madic::haar::{KNorm, RadialFunction};
use madic::levy::*;

fn main() -> madic::Result<()> {
    let (m, alpha) = (3, 1.5);
    println!("Gamma_{m}(-{alpha}) = {:.10}", gamma_m(m, alpha)?);
    let kernel = LevyKernel::vladimirov(m, alpha)?;
    for e in -3..=3 {
        let psi = levy_symbol(&kernel, KNorm::Power(e))?;
        let exact = -(m as f64).powf(e as f64 * alpha);
        println!("|k| = 3^{e:<3} psi = {psi:<22.15e} rel err {:.1e}", (psi / exact - 1.0).abs());
    }

    let times: Vec<f64> = (0..64).map(|n| 10f64.powf(-1.0 + n as f64 / 31.5)).collect();
    let sol = FractionalSolution::tabulate(WalkParams::new(m, alpha, 1.0)?, Initial::UnitBall, &times)?;
    let snaps = (0..times.len()).map(|n| sol.radial(n)).collect::<madic::Result<Vec<RadialFunction>>>()?;
    let shells: Vec<i64> = (-3..=6).collect();
    println!("master equation residual {:.2e}", master_equation_residual(&kernel, &times, &snaps, &shells)?);
    Ok(())
}
