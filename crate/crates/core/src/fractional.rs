//! The fractional-time random walk
//! `D_t^beta u = -(1/Gamma_m(-alpha)) int (u(y) - u(x)) / |x - y|^(alpha+1) dy`
//! with Caputo time derivative, its closed-form radial solutions and the
//! large-time behaviour of the mass left in `Z_m`.
//!
//! With `E(y) = E_beta(-y)`, the solution started from a point mass is, at
//! `|x| = m^g`,
//!
//! `u = (1 - 1/m) m^-g sum_{n >= 0} m^-n (E(m^(-n alpha) a) - E(m^alpha a))`,
//! `a = m^(-g alpha) t^beta`,
//!
//! a sum of nonnegative terms. Started from `Omega(|x| <= 1)` the solution is
//! constant on `Z_m`, equal to the survival probability `S(t)`, and agrees
//! with the point-mass solution outside.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::haar::{RadialFunction, Tail};
use crate::levy::{radial_kernel_apply, LevyKernel};
use crate::quadrature::{integrate, integrate_with_breaks};
use crate::special::{gamma, mittag_leffler, ml_unchecked};

/// Exponents of the walk: `alpha` in space, `beta` in time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkParams {
    pub base: u32,
    pub alpha: f64,
    pub beta: f64,
}

impl WalkParams {
    pub fn new(base: u32, alpha: f64, beta: f64) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidBase(base));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidParameter(format!("beta must lie in (0, 1], got {beta}")));
        }
        Ok(WalkParams { base, alpha, beta })
    }

    fn m(&self) -> f64 {
        self.base as f64
    }

    fn e(&self, y: f64) -> f64 {
        ml_unchecked(self.beta, y)
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || t.is_nan() {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    Ok(())
}

/// `sum_{n >= 0} m^-n f(n)` for `f` in `[0, 1]`, stopped once the remaining
/// weight cannot change the sum in the 17th digit.
fn weighted_sum(m: f64, f: impl Fn(i64) -> f64) -> f64 {
    let mut acc = 0.0;
    let mut w = 1.0;
    for n in 0..100_000 {
        acc += w * f(n);
        w /= m;
        if (acc > 0.0 && w < 1e-17 * acc) || w < 1e-300 {
            break;
        }
    }
    acc
}

/// Density at `|x| = m^g` of the solution started from a point mass.
pub fn green_function(p: WalkParams, g: i64, t: f64) -> Result<f64> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let m = p.m();
    let a = m.powf(-(g as f64) * p.alpha) * t.powf(p.beta);
    let far = p.e(m.powf(p.alpha) * a);
    let s = weighted_sum(m, |n| (p.e(m.powf(-(n as f64) * p.alpha) * a) - far).max(0.0));
    Ok((1.0 - 1.0 / m) * m.powi(-g as i32) * s)
}

/// `P(|X(t)| = m^g)` for the point-mass solution.
pub fn green_shell_mass(p: WalkParams, g: i64, t: f64) -> Result<f64> {
    let m = p.m();
    Ok(green_function(p, g, t)? * m.powi(g as i32) * (1.0 - 1.0 / m))
}

/// `S(t) = int_{Z_m} u = (1 - 1/m) sum_{i >= 0} m^-i E(m^(-alpha i) t^beta)`
/// for the solution started from `Omega(|x| <= 1)`.
pub fn survival(p: WalkParams, t: f64) -> Result<f64> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(1.0);
    }
    let m = p.m();
    let tb = t.powf(p.beta);
    Ok((1.0 - 1.0 / m) * weighted_sum(m, |i| p.e(m.powf(-p.alpha * i as f64) * tb)))
}

/// Density at `|x| = m^g` of the solution started from `Omega(|x| <= 1)`.
pub fn indicator_solution(p: WalkParams, g: i64, t: f64) -> Result<f64> {
    if g <= 0 {
        survival(p, t)
    } else {
        green_function(p, g, t)
    }
}

/// `Theta_beta(alpha, t) = int_0^{t^beta} E_beta(-y) y^(1/alpha - 1) dy`,
/// computed as `alpha int_0^{t^(beta/alpha)} E_beta(-w^alpha) dw`. `t` may be
/// infinite when `alpha > 1`. Returns the value and an error estimate.
pub fn theta(beta: f64, alpha: f64, t: f64) -> Result<(f64, f64)> {
    check_time(t)?;
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    mittag_leffler(beta, 0.0)?;
    if t == 0.0 {
        return Ok((0.0, 0.0));
    }
    let f = |w: f64| ml_unchecked(beta, w.powf(alpha));
    if t.is_infinite() {
        if alpha <= 1.0 {
            return Err(Error::Divergent(format!("Theta_beta(alpha) diverges for alpha = {alpha} <= 1")));
        }
        // the asymptotic series is accurate from y = 1e4 on
        let y_cut: f64 = 1e4;
        let w_cut = y_cut.powf(1.0 / alpha);
        let q = integrate_with_breaks(f, &log_breaks(w_cut), 1e-14, 1e-13);
        let mut tail = 0.0;
        for k in 1..40 {
            let c = crate::special::rgamma(1.0 - beta * k as f64);
            let term = if k % 2 == 1 { c } else { -c } * w_cut.powf(1.0 - alpha * k as f64) / (alpha * k as f64 - 1.0);
            tail += term;
            if term.abs() < 1e-18 * tail.abs() {
                break;
            }
        }
        return Ok((alpha * (q.value + tail), alpha * q.error));
    }
    let upper = t.powf(beta / alpha);
    let q = integrate_with_breaks(f, &log_breaks(upper), 1e-14, 1e-13);
    Ok((alpha * q.value, alpha * q.error))
}

fn log_breaks(upper: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    let mut x = 1e-3;
    while x < upper {
        b.push(x);
        x *= 10.0;
    }
    b.push(upper);
    b
}

/// `C = sin(beta pi) Gamma(beta) / pi`, the coefficient of `1/y` in
/// `E_beta(-y)` as `y -> infinity`.
pub fn tail_coefficient(beta: f64) -> f64 {
    (beta * PI).sin() * gamma(beta) / PI
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `alpha > 1`: `R = t^(-beta/alpha) Theta_beta(alpha)`.
    Convergent,
    /// `alpha < 1`: `R = C t^-beta / (1/alpha - 1)`.
    PowerLaw,
    /// `alpha = 1`: `R = C beta t^-beta ln t`.
    Logarithmic,
}

impl Branch {
    pub fn of(alpha: f64) -> Self {
        if alpha > 1.0 {
            Branch::Convergent
        } else if alpha < 1.0 {
            Branch::PowerLaw
        } else {
            Branch::Logarithmic
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Convergent => "alpha>1",
            Branch::PowerLaw => "alpha<1",
            Branch::Logarithmic => "alpha=1",
        }
    }
}

/// The sandwich factors `1 / (alpha m ln m)` and `m / (alpha ln m)`.
pub fn sandwich_factors(p: WalkParams) -> (f64, f64) {
    let lm = p.m().ln();
    (1.0 / (p.alpha * p.m() * lm), p.m() / (p.alpha * lm))
}

/// `lower <= S(t) <= upper` with `t^(-beta/alpha) Theta_beta(alpha, t)` times
/// the sandwich factors.
pub fn sandwich_bounds(p: WalkParams, t: f64) -> Result<(f64, f64)> {
    let (th, _) = theta(p.beta, p.alpha, t)?;
    let core = t.powf(-p.beta / p.alpha) * th;
    let (lo, hi) = sandwich_factors(p);
    Ok((lo * core, hi * core))
}

/// Leading large-`t` form of `t^(-beta/alpha) Theta_beta(alpha, t)`.
pub fn asymptotic_rate(p: WalkParams, t: f64) -> Result<(f64, Branch)> {
    check_time(t)?;
    let branch = Branch::of(p.alpha);
    let c = tail_coefficient(p.beta);
    let r = match branch {
        Branch::Convergent => t.powf(-p.beta / p.alpha) * theta(p.beta, p.alpha, f64::INFINITY)?.0,
        Branch::PowerLaw => c * t.powf(-p.beta) / (1.0 / p.alpha - 1.0),
        Branch::Logarithmic => c * p.beta * t.ln() * t.powf(-p.beta),
    };
    Ok((r, branch))
}

/// Which solution a [`FractionalSolution`] tabulates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Initial {
    PointMass,
    UnitBall,
}

/// Shell values `u(|x| = m^j, t)` on a window of shells and a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalSolution {
    pub params: WalkParams,
    pub initial: Initial,
    pub times: Vec<f64>,
    pub j_min: i64,
    pub j_max: i64,
    /// `values[n][j - j_min]` at `times[n]`.
    pub values: Vec<Vec<f64>>,
}

/// Largest mass defect accepted before the shell window is widened.
pub const MASS_TOLERANCE: f64 = 1e-6;
const DEFAULT_HALF_WIDTH: i64 = 40;
const MAX_HALF_WIDTH: i64 = 400;

fn density(p: WalkParams, initial: Initial, j: i64, t: f64) -> Result<f64> {
    match initial {
        Initial::PointMass => green_function(p, j, t),
        Initial::UnitBall => indicator_solution(p, j, t),
    }
}

impl FractionalSolution {
    /// Tabulates on `[j_min, j_max]` exactly as given.
    pub fn tabulate_window(p: WalkParams, initial: Initial, times: &[f64], j_min: i64, j_max: i64) -> Result<Self> {
        if j_min > j_max {
            return Err(Error::Grid(format!("empty shell window [{j_min}, {j_max}]")));
        }
        for &t in times {
            check_time(t)?;
        }
        let values = times
            .par_iter()
            .map(|&t| (j_min..=j_max).map(|j| density(p, initial, j, t)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(FractionalSolution { params: p, initial, times: times.to_vec(), j_min, j_max, values })
    }

    /// Tabulates on `[-40, 40]`, widening by 20 shells a side until the mass
    /// defect is below [`MASS_TOLERANCE`] at every time.
    pub fn tabulate(p: WalkParams, initial: Initial, times: &[f64]) -> Result<Self> {
        let mut half = DEFAULT_HALF_WIDTH;
        loop {
            let sol = Self::tabulate_window(p, initial, times, -half, half)?;
            if sol.max_mass_defect() < MASS_TOLERANCE {
                return Ok(sol);
            }
            if half >= MAX_HALF_WIDTH {
                return Err(Error::Grid(format!(
                    "mass defect {:e} remains above {MASS_TOLERANCE:e} on [-{half}, {half}]",
                    sol.max_mass_defect()
                )));
            }
            half += 20;
        }
    }

    pub fn value(&self, n: usize, j: i64) -> f64 {
        self.values[n][(j - self.j_min) as usize]
    }

    /// `sum_j mu(S_j) u_j` over the window plus, for the unit-ball start,
    /// the exact mass of the constant part below the window.
    pub fn mass(&self, n: usize) -> f64 {
        let m = self.params.m();
        let mut total: f64 = (self.j_min..=self.j_max)
            .map(|j| self.value(n, j) * m.powi(j as i32) * (1.0 - 1.0 / m))
            .sum();
        if self.initial == Initial::UnitBall && self.j_min <= 0 {
            total += self.value(n, self.j_min) * m.powi((self.j_min - 1) as i32);
        }
        if self.times[n] == 0.0 && self.initial == Initial::PointMass {
            total = 1.0;
        }
        total
    }

    pub fn max_mass_defect(&self) -> f64 {
        (0..self.times.len()).map(|n| (self.mass(n) - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Shell values at time index `n` as a radial function. The unit-ball
    /// solution is continued inward by its constant value; otherwise the
    /// inner tail follows the ratio of the two innermost shells. Outward the
    /// density decays like `|x|^(-alpha-1)`.
    pub fn radial(&self, n: usize) -> Result<RadialFunction> {
        let m = self.params.m();
        let vals: Vec<Complex64> = self.values[n].iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let inner = match self.initial {
            Initial::UnitBall if self.j_min <= 0 => Tail::Geometric(Complex64::new(1.0, 0.0)),
            _ => {
                let (a, b) = (self.values[n][0], self.values[n].get(1).copied().unwrap_or(0.0));
                if a > 0.0 && b > 0.0 && a / b < m {
                    Tail::Geometric(Complex64::new(a / b, 0.0))
                } else {
                    Tail::Zero
                }
            }
        };
        let outer = Tail::Geometric(Complex64::new(m.powf(-self.params.alpha - 1.0), 0.0));
        RadialFunction::new(self.params.base, self.j_min, vals, inner, outer)
    }
}

/// `-(1/Gamma_m(-alpha)) int (u(y) - u(x)) / |x - y|^(alpha+1) dy` on every
/// shell of `u`'s window (tails of the result are zero).
pub fn vladimirov_apply_radial(u: &RadialFunction, alpha: f64) -> Result<RadialFunction> {
    let kernel = LevyKernel::vladimirov(u.base(), alpha)?;
    let vals = (u.j_min()..=u.j_max())
        .map(|j| radial_kernel_apply(&kernel, u, j).map(|v| Complex64::new(v, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    RadialFunction::new(u.base(), u.j_min(), vals, Tail::Zero, Tail::Zero)
}

/// `t_k = horizon (k / steps)^2`, `k = 0 ..= steps`.
pub fn graded_mesh(horizon: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|k| horizon * (k as f64 / steps as f64).powi(2)).collect()
}

/// L1 approximation of the Caputo derivative of `f` at `times[n]`.
pub fn caputo_l1(times: &[f64], f: &[f64], n: usize, beta: f64) -> f64 {
    if beta == 1.0 {
        return (f[n] - f[n - 1]) / (times[n] - times[n - 1]);
    }
    let tn = times[n];
    let e = 1.0 - beta;
    let mut acc = 0.0;
    for k in 0..n {
        let slope = (f[k + 1] - f[k]) / (times[k + 1] - times[k]);
        acc += slope * ((tn - times[k]).powf(e) - (tn - times[k + 1]).powf(e));
    }
    acc / gamma(2.0 - beta)
}

/// Largest `|D_t^beta u - RHS|` over `shells` and the grid times in
/// `[from * T, T]`; the grid must start at 0 and be graded (finer near 0).
pub fn caputo_residual(sol: &FractionalSolution, shells: &[i64], from: f64) -> Result<f64> {
    let t = &sol.times;
    if t.len() < 3 || t[0] != 0.0 {
        return Err(Error::Grid("the time grid must start at t = 0 with at least two steps".into()));
    }
    let (first, last) = (t[1] - t[0], t[t.len() - 1] - t[t.len() - 2]);
    if !(first < last) {
        return Err(Error::Grid("the time grid is not graded toward t = 0".into()));
    }
    let kernel = LevyKernel::vladimirov(sol.params.base, sol.params.alpha)?;
    let horizon = t[t.len() - 1];
    let columns: Vec<usize> = (1..t.len()).filter(|&n| t[n] >= from * horizon).collect();
    let worst = columns
        .par_iter()
        .map(|&n| {
            let u = sol.radial(n)?;
            let mut w = 0.0f64;
            for &j in shells {
                let series: Vec<f64> = (0..=n).map(|k| sol.value(k, j)).collect();
                let lhs = caputo_l1(t, &series, n, sol.params.beta);
                let rhs = radial_kernel_apply(&kernel, &u, j)?;
                w = w.max((lhs - rhs).abs());
            }
            Ok(w)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}

/// `int_0^inf e^(-s t) E_beta(-a t^beta) dt` by quadrature (the exact value
/// is `s^(beta-1) / (s^beta + a)`).
pub fn laplace_of_mittag_leffler(beta: f64, a: f64, s: f64) -> Result<f64> {
    mittag_leffler(beta, 0.0)?;
    if !(s > 0.0 && a >= 0.0) {
        return Err(Error::InvalidParameter("need s > 0 and a >= 0".into()));
    }
    let upper = 60.0 / s;
    let q = integrate(|t: f64| (-s * t).exp() * ml_unchecked(beta, a * t.powf(beta)), 0.0, upper, 1e-13, 1e-12);
    Ok(q.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(m: u32, a: f64, b: f64) -> WalkParams {
        WalkParams::new(m, a, b).unwrap()
    }

    #[test]
    fn survival_starts_at_one_and_decreases() {
        let q = p(3, 1.0, 0.5);
        assert_eq!(survival(q, 0.0).unwrap(), 1.0);
        let mut prev = 1.0;
        for t in [0.01, 0.1, 1.0, 10.0, 100.0] {
            let s = survival(q, t).unwrap();
            assert!(s < prev);
            prev = s;
        }
    }

    #[test]
    fn indicator_at_time_zero() {
        let q = p(2, 1.5, 0.7);
        assert_eq!(indicator_solution(q, 0, 0.0).unwrap(), 1.0);
        assert_eq!(indicator_solution(q, -3, 0.0).unwrap(), 1.0);
        assert_eq!(indicator_solution(q, 1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn green_decays_pointwise() {
        let q = p(3, 1.0, 0.6);
        assert!(green_function(q, 2, 1e4).unwrap() < green_function(q, 2, 1e2).unwrap());
    }

    #[test]
    fn theta_special_cases() {
        assert_eq!(theta(0.5, 2.0, 0.0).unwrap().0, 0.0);
        let (v, _) = theta(1.0, 1.0, 3.0).unwrap();
        assert!((v - (1.0 - (-3.0f64).exp())).abs() < 1e-12);
        assert!(theta(0.5, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn graded_mesh_shape() {
        let t = graded_mesh(2.0, 4);
        assert_eq!(t, vec![0.0, 0.125, 0.5, 1.125, 2.0]);
    }

    #[test]
    fn l1_is_exact_for_linear_functions() {
        let t = graded_mesh(1.0, 16);
        let f: Vec<f64> = t.iter().map(|&s| 3.0 * s).collect();
        let d = caputo_l1(&t, &f, 16, 0.4);
        let exact = 3.0 / gamma(2.0 - 0.4);
        assert!((d - exact).abs() < 1e-12);
    }
}
