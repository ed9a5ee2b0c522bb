//! Shell profile of the fractional-time walk from a point mass.

use madic::fractional::*;

fn main() -> madic::Result<()> {
    let p = WalkParams::new(2, 1.0, 0.6)?;
    let times = [0.1, 1.0, 10.0];
    let sol = FractionalSolution::tabulate(p, Initial::PointMass, &times)?;
    println!("shells [{}, {}], mass defect {:.1e}", sol.j_min, sol.j_max, sol.max_mass_defect());
    for (n, t) in times.iter().enumerate() {
        let profile: Vec<String> = (-3..=3).map(|g| format!("{:.4}", green_shell_mass(p, g, *t).unwrap())).collect();
        println!("t = {t:<5} P(|X| = 2^g), g = -3..3: {}", profile.join(" "));
        println!("         u at |x| = 1: {:.6}", sol.value(n, 0));
    }

    // Caputo residual of the tabulated solution on a graded mesh
    let mesh = graded_mesh(10.0, 64);
    let graded = FractionalSolution::tabulate(p, Initial::UnitBall, &mesh)?;
    println!("Caputo residual at t = 10: {:.2e}", caputo_residual(&graded, &[-2, -1, 0, 1, 2], 1.0)?);
    Ok(())
}
