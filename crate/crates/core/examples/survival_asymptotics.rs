//! Probability of staying in Z_m, its two-sided bounds and the long-time rate.

use madic::fractional::*;

fn main() -> madic::Result<()> {
    for alpha in [0.5, 1.0, 2.0] {
        let p = WalkParams::new(3, alpha, 0.8)?;
        println!("alpha = {alpha}");
        for e in [1, 3, 5, 7] {
            let t = 10f64.powi(e);
            let s = survival(p, t)?;
            let (lo, hi) = sandwich_bounds(p, t)?;
            let (rate, branch) = asymptotic_rate(p, t)?;
            println!("  t = 1e{e}: {lo:.3e} <= S = {s:.3e} <= {hi:.3e}  S / rate = {:.3} ({})", s / rate, branch.name());
        }
    }
    Ok(())
}
