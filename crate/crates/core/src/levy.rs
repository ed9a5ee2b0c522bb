//! Levy-Khinchine symbols, characteristic functions and the master equation
//! for radial jump kernels.
//!
//! A radial kernel is given by its shell weights `W_j = W(|x| = m^j)`. With
//! `|k| = m^e` the sphere integrals of the character collapse the symbol to
//!
//! `psi(k) = -W_{1-e} m^{1-e} - (1 - 1/m) sum_{j >= 2-e} W_j m^j`,
//!
//! since every shell `j <= -e` contributes `chi - 1 = 0`. The origin therefore
//! never needs a principal value for radial kernels.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::haar::{radial_character_integral, KNorm, RadialFunction, Tail};
use crate::number::{character, MadicNumber};

/// `Gamma_m(-alpha) = (1 - m^(-alpha-1)) / (1 - m^alpha)`.
pub fn gamma_m(m: u32, alpha: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidBase(m));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("Gamma_m(-alpha) needs alpha > 0, got {alpha}")));
    }
    let m = m as f64;
    Ok((1.0 - m.powf(-alpha - 1.0)) / (1.0 - m.powf(alpha)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelTag {
    /// `-|x|^(-alpha-1) / Gamma_m(-alpha)`.
    Vladimirov { alpha: f64 },
    Tabulated,
}

/// Shells tabulated explicitly by [`LevyKernel::vladimirov`].
pub const VLADIMIROV_WINDOW: usize = 60;

/// A radial jump kernel on `Q_m \ {0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevyKernel {
    weights: RadialFunction,
    tag: KernelTag,
}

impl LevyKernel {
    /// Shell weights `W_j` for `j_min ..`, zero outside.
    pub fn tabulated(m: u32, j_min: i64, weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter("kernel weights must be finite and nonnegative".into()));
        }
        Ok(LevyKernel { weights: RadialFunction::from_real(m, j_min, weights)?, tag: KernelTag::Tabulated })
    }

    /// Weights on an explicit window continued geometrically: each shell
    /// inward multiplies by `inner`, each shell outward by `outer`.
    pub fn with_tails(m: u32, j_min: i64, weights: &[f64], inner: f64, outer: f64) -> Result<Self> {
        let mut k = Self::tabulated(m, j_min, weights)?;
        if !(inner >= 0.0 && outer >= 0.0) {
            return Err(Error::InvalidParameter("tail ratios must be nonnegative".into()));
        }
        let values = k.weights.values().to_vec();
        k.weights = RadialFunction::new(
            m,
            j_min,
            values,
            Tail::Geometric(Complex64::new(inner, 0.0)),
            Tail::Geometric(Complex64::new(outer, 0.0)),
        )?;
        Ok(k)
    }

    /// The Vladimirov kernel of order `alpha`, tabulated on 60 shells
    /// centred on `|x| = 1` and continued by its exact power law.
    pub fn vladimirov(m: u32, alpha: f64) -> Result<Self> {
        Self::vladimirov_window(m, alpha, VLADIMIROV_WINDOW)
    }

    pub fn vladimirov_window(m: u32, alpha: f64, shells: usize) -> Result<Self> {
        let c = -1.0 / gamma_m(m, alpha)?;
        let mf = m as f64;
        let j_min = -(shells as i64) / 2;
        let w: Vec<f64> = (0..shells as i64).map(|n| c * mf.powf(-(j_min + n) as f64 * (alpha + 1.0))).collect();
        let mut k = Self::with_tails(m, j_min, &w, mf.powf(alpha + 1.0), mf.powf(-alpha - 1.0))?;
        k.tag = KernelTag::Vladimirov { alpha };
        Ok(k)
    }

    /// `lambda * phi` with `phi` the uniform density on the unit sphere `S_0`.
    pub fn uniform_unit_sphere(m: u32, lambda: f64) -> Result<Self> {
        let density = 1.0 / (1.0 - 1.0 / m as f64);
        Self::tabulated(m, 0, &[lambda * density])
    }

    pub fn base(&self) -> u32 {
        self.weights.base()
    }
    pub fn tag(&self) -> KernelTag {
        self.tag
    }
    pub fn weights(&self) -> &RadialFunction {
        &self.weights
    }

    /// `W_j`.
    pub fn weight(&self, j: i64) -> f64 {
        self.weights.at(j).re
    }

    /// `sum_{i > j} W_i mu(S_i)`, the rate of jumps longer than `m^j`.
    pub fn mass_beyond(&self, j: i64) -> Result<f64> {
        let m = self.base() as f64;
        let hi = self.weights.j_max();
        let mut sum = 0.0;
        for i in (j + 1)..=hi {
            sum += self.weight(i) * shell_volume(self.base(), i);
        }
        if let Tail::Geometric(q) = self.weights.outer_tail() {
            let rho = q.re * m;
            let start = (j + 1).max(hi + 1);
            let first = self.weight(start) * shell_volume(self.base(), start);
            if first > 0.0 {
                if rho >= 1.0 {
                    return Err(Error::Divergent(format!(
                        "kernel mass outside B_{j} diverges (shell ratio {rho})"
                    )));
                }
                sum += first / (1.0 - rho);
            }
        }
        Ok(sum)
    }

    /// `psi(k) = int (chi(kx) - 1) W(x) dx` for `|k| = norm`.
    pub fn symbol(&self, norm: KNorm) -> Result<f64> {
        let e = match norm {
            KNorm::Zero => return Ok(0.0),
            KNorm::Power(e) => e,
        };
        let m = self.base() as f64;
        let j = 1 - e;
        let near = self.weight(j) * m.powi(j as i32);
        Ok(-near - self.mass_beyond(j)?)
    }

    /// Total jump rate `int W`, finite only for kernels without an inner tail.
    pub fn total_rate(&self) -> Result<f64> {
        match self.weights.inner_tail() {
            Tail::Zero => self.mass_beyond(self.weights.j_min() - 1),
            Tail::Geometric(_) => Err(Error::Divergent("kernel has infinite total mass".into())),
        }
    }
}

fn shell_volume(m: u32, j: i64) -> f64 {
    crate::haar::sphere_measure(m, j)
}

/// `psi(k)` of a radial kernel.
pub fn levy_symbol(kernel: &LevyKernel, norm: KNorm) -> Result<f64> {
    kernel.symbol(norm)
}

/// The infinitely divisible law with drift `x_0`, an optional uniform
/// component on `B_{-r}` (the factor `Omega(|k| <= m^r)`) and jump kernel `W`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevyCharacteristic {
    pub drift: MadicNumber,
    pub ball_index: Option<i64>,
    pub kernel: LevyKernel,
}

impl LevyCharacteristic {
    pub fn pure_jump(kernel: LevyKernel) -> Result<Self> {
        let drift = MadicNumber::zero(kernel.base())?;
        Ok(LevyCharacteristic { drift, ball_index: None, kernel })
    }

    /// `chi(k x_0) Omega(|k| <= m^r) exp(t psi(k))`. The drift and ball
    /// factors are applied once, not evolved with `t`.
    pub fn at(&self, k: &MadicNumber, t: f64) -> Result<Complex64> {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
        }
        if t == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let norm = KNorm::of(k)?;
        if let Some(r) = self.ball_index {
            if !norm.at_most(r) {
                return Ok(Complex64::new(0.0, 0.0));
            }
        }
        let shift = character(k, &self.drift)?.to_complex();
        Ok(shift * (t * self.kernel.symbol(norm)?).exp())
    }
}

/// `f^(k, t)` for a pure-jump radial law given by `|k|` alone.
pub fn characteristic_at(kernel: &LevyKernel, norm: KNorm, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    Ok((t * kernel.symbol(norm)?).exp())
}

/// `int W(|y - x|) (u(y) - u(x)) dy` at `|x| = m^j` for radial `u`:
///
/// `sum_{i > j} W_i mu(S_i) (u_i - u_j) + W_j (int_{B_{j-1}} u - m^(j-1) u_j)`.
pub fn radial_kernel_apply(kernel: &LevyKernel, u: &RadialFunction, j: i64) -> Result<f64> {
    if u.base() != kernel.base() {
        return Err(Error::BaseMismatch(u.base(), kernel.base()));
    }
    let m = kernel.base();
    let uj = u.at(j).re;
    let inner = crate::haar::integrate_radial(u, j - 1)?.value.re;
    let mut out = kernel.weight(j) * (inner - (m as f64).powi((j - 1) as i32) * uj);
    out -= uj * kernel.mass_beyond(j)?;
    // sum_{i > j} W_i mu(S_i) u_i, truncated once terms are negligible
    let mut acc = 0.0;
    let hi = kernel.weights().j_max().max(u.j_max()) + 1;
    let mut i = j + 1;
    loop {
        let term = kernel.weight(i) * shell_volume(m, i) * u.at(i).re;
        acc += term;
        if i >= hi && (term.abs() <= 1e-17 * acc.abs() || term == 0.0) {
            break;
        }
        if i > hi + 2000 {
            return Err(Error::Divergent("outer shell sum did not settle".into()));
        }
        i += 1;
    }
    Ok(out + acc)
}

/// `u(|x| = m^j, t)` for the initial condition `Omega(|x| <= m^s)` under the
/// semigroup `exp(t psi)`, by radial Fourier inversion of
/// `m^s Omega(|k| <= m^-s) exp(t psi(k))`.
pub fn evolve_ball_indicator(kernel: &LevyKernel, s: i64, t: f64, j: i64) -> Result<f64> {
    let g = evolved_indicator_transform(kernel, s, t)?;
    let r = radial_character_integral(&g, KNorm::Power(j), -s)?;
    Ok(r.value.re)
}

/// Shells of `m^s Omega(|k| <= m^-s) exp(t psi(k))`, with the constant
/// continuation `exp(t psi) -> 1` below a deep window.
fn evolved_indicator_transform(kernel: &LevyKernel, s: i64, t: f64) -> Result<RadialFunction> {
    const DEPTH: i64 = 120;
    let m = kernel.base();
    let scale = (m as f64).powi(s as i32);
    let lo = -s - DEPTH;
    let vals = (lo..=-s)
        .map(|i| Ok(Complex64::new(scale * (t * kernel.symbol(KNorm::Power(i))?).exp(), 0.0)))
        .collect::<Result<Vec<_>>>()?;
    RadialFunction::new(m, lo, vals, Tail::Geometric(Complex64::new(1.0, 0.0)), Tail::Zero)
}

/// Maximum over interior times and the given shells of
/// `|du/dt - int W(y - x)(u(y) - u(x)) dy|`, with the time derivative from
/// the three-point formula on the (possibly nonuniform) grid.
pub fn master_equation_residual(
    kernel: &LevyKernel,
    times: &[f64],
    snapshots: &[RadialFunction],
    shells: &[i64],
) -> Result<f64> {
    if times.len() != snapshots.len() {
        return Err(Error::Grid("one snapshot per time is required".into()));
    }
    if times.len() < 3 {
        return Err(Error::Grid("at least three times are needed for a derivative".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Grid("times must increase strictly".into()));
    }
    let mut worst = 0.0f64;
    for n in 1..times.len() - 1 {
        let (hm, hp) = (times[n] - times[n - 1], times[n + 1] - times[n]);
        for &j in shells {
            let (a, b, c) = (snapshots[n - 1].at(j).re, snapshots[n].at(j).re, snapshots[n + 1].at(j).re);
            let dudt = (hm * hm * c - hp * hp * a + (hp * hp - hm * hm) * b) / (hm * hp * (hm + hp));
            let rhs = radial_kernel_apply(kernel, &snapshots[n], j)?;
            worst = worst.max((dudt - rhs).abs());
        }
    }
    Ok(worst)
}
