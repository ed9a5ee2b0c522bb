//! Fourier transform of a locally constant function on a finite grid.

use madic::fourier::*;
use num_complex::Complex64;

fn main() -> madic::Result<()> {
    // |x| on B_1 with constancy radius 3^-2, zero outside
    let f = LocallyConstantFunction::from_fn(3, 1, -2, |x| Complex64::new(x.pseudonorm(), 0.0))?;
    let g = forward(&f)?;
    println!("{} cells -> spectrum on B_{} with constancy {}", f.len(), g.support(), g.constancy());

    let maps = coset_index_maps(3, g.support(), g.constancy())?;
    for j in 0..9 {
        let k = x_representative(&maps, j)?;
        println!("|k| = {:<10.6} fhat = {:.6}", k.pseudonorm(), g.values()[j].re);
    }

    let back = inverse(&g)?;
    let err = f.values().iter().zip(back.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    println!("round trip error {err:.1e}, energy {:.6} vs {:.6}", f.energy(), g.energy());

    let ball = LocallyConstantFunction::ball_indicator(3, 0, 1.0)?.embed(1, -2)?;
    let smooth = convolve(&f, &ball)?;
    println!("int (f * 1_Z3) = {:.6} = int f * int 1_Z3 = {:.6}", smooth.integral().re, f.integral().re);
    Ok(())
}
