//! Monte Carlo shell histogram of a CTRW against its exact marginal.

use madic::ctrw::*;

fn main() -> madic::Result<()> {
    let model = CtrwModel {
        waiting: WaitingTimeModel::mittag_leffler(0.7, 1.0)?,
        jumps: JumpModel::stable(3, 1.0)?,
    };
    let t = 2.0;
    let hist = simulate(&model, t, 50_000, 42)?;
    let exact = model.shell_pmf(t, -40..=40)?;

    println!("mean jumps {:.3}", hist.mean_jumps());
    println!("zero: freq {:.4}, exact {:.4}", hist.frequency(Bin::Zero), exact.zero);
    for j in -4..=4 {
        let (lo, hi) = hist.interval(Bin::Shell(j));
        println!("|x| = 3^{j:<3} freq {:.4} in [{lo:.4}, {hi:.4}], exact {:.4}", hist.frequency(Bin::Shell(j)), exact.shells[&j]);
    }
    println!("total variation {:.4}", hist.tv_distance(&exact));
    Ok(())
}
