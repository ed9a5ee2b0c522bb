//! Haar measure on `Q_m` and integrals of radial and character integrands.
//!
//! The measure is normalised by `mu(Z_m) = 1`, so `mu(B_r) = m^r` and the
//! sphere `S_r = {|x| = m^r}` has measure `m^r (1 - 1/m)`.

use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::number::MadicNumber;

/// Closed ball `{x : |x - center|_m <= m^radius_index}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: MadicNumber,
    pub radius_index: i64,
}

impl Ball {
    pub fn new(center: MadicNumber, radius_index: i64) -> Self {
        Ball { center, radius_index }
    }

    /// Membership test. Fails when `x - center` is not known to enough
    /// digits to decide.
    pub fn contains(&self, x: &MadicNumber) -> Result<bool> {
        let d = x.sub(&self.center)?;
        if d.is_exact_zero() {
            return Ok(true);
        }
        let threshold = -self.radius_index;
        match (d.valuation(), d.zero_precision()) {
            (Some(v), _) => Ok(v >= threshold),
            (None, Some(a)) if a >= threshold => Ok(true),
            (None, Some(a)) => Err(Error::InsufficientPrecision { position: a }),
            (None, None) => Ok(true),
        }
    }

    pub fn measure(&self) -> f64 {
        ball_measure(self.center.base(), self.radius_index)
    }
}

fn mpow(m: u32, e: i64) -> f64 {
    (m as f64).powi(e as i32)
}

pub fn ball_measure(m: u32, r: i64) -> f64 {
    mpow(m, r)
}

pub fn sphere_measure(m: u32, r: i64) -> f64 {
    mpow(m, r) - mpow(m, r - 1)
}

/// Extrapolation rule for shells outside the tabulated window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tail {
    Zero,
    /// Each further shell away from the window multiplies the value by `q`.
    Geometric(Complex64),
}

/// A function of `|x|_m`, tabulated on the shells `j_min ..= j_max` and
/// extended by declared tails.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialFunction {
    base: u32,
    j_min: i64,
    values: Vec<Complex64>,
    inner: Tail,
    outer: Tail,
}

impl RadialFunction {
    pub fn new(base: u32, j_min: i64, values: Vec<Complex64>, inner: Tail, outer: Tail) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidBase(base));
        }
        if values.is_empty() {
            return Err(Error::InvalidParameter("radial function needs at least one shell".into()));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter("radial function values must be finite".into()));
        }
        Ok(RadialFunction { base, j_min, values, inner, outer })
    }

    /// Real shell values with zero tails on both sides.
    pub fn from_real(base: u32, j_min: i64, values: &[f64]) -> Result<Self> {
        let values = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::new(base, j_min, values, Tail::Zero, Tail::Zero)
    }

    /// `f(m^j) = c * m^(exponent * j)` on every shell.
    pub fn power(base: u32, c: f64, exponent: f64) -> Result<Self> {
        let m = base as f64;
        let values = (-2..=2).map(|j| Complex64::new(c * m.powf(exponent * j as f64), 0.0)).collect();
        let q_out = Complex64::new(m.powf(exponent), 0.0);
        let q_in = Complex64::new(m.powf(-exponent), 0.0);
        Self::new(base, -2, values, Tail::Geometric(q_in), Tail::Geometric(q_out))
    }

    /// The constant function.
    pub fn constant(base: u32, c: f64) -> Result<Self> {
        Self::power(base, c, 0.0)
    }

    pub fn base(&self) -> u32 {
        self.base
    }
    pub fn j_min(&self) -> i64 {
        self.j_min
    }
    pub fn j_max(&self) -> i64 {
        self.j_min + self.values.len() as i64 - 1
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
    pub fn inner_tail(&self) -> Tail {
        self.inner
    }
    pub fn outer_tail(&self) -> Tail {
        self.outer
    }

    /// `f(m^j)`.
    pub fn at(&self, j: i64) -> Complex64 {
        if j < self.j_min {
            match self.inner {
                Tail::Zero => Complex64::new(0.0, 0.0),
                Tail::Geometric(q) => self.values[0] * q.powi((self.j_min - j) as i32),
            }
        } else if j > self.j_max() {
            match self.outer {
                Tail::Zero => Complex64::new(0.0, 0.0),
                Tail::Geometric(q) => self.values[self.values.len() - 1] * q.powi((j - self.j_max()) as i32),
            }
        } else {
            self.values[(j - self.j_min) as usize]
        }
    }
}

/// An integral with a bound on the error of its summed tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// `sum_{j <= top} m^j f(m^j)`, tail included.
fn inward_shell_sum(f: &RadialFunction, top: i64) -> Result<Integral> {
    let m = f.base as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    let lowest_tabulated = f.j_min.min(top + 1);
    for j in (lowest_tabulated..=top).rev() {
        sum += mpow(f.base, j) * f.at(j);
    }
    let start = lowest_tabulated - 1;
    let q = match f.inner {
        Tail::Zero => return Ok(Integral { value: sum, tail_bound: 0.0 }),
        Tail::Geometric(q) => q,
    };
    let rho = q.norm() / m;
    if rho >= 1.0 {
        return Err(Error::Divergent(format!(
            "inner shell terms shrink by a factor {rho} per shell; the sum does not converge"
        )));
    }
    // the declared tail is exactly geometric with ratio q/m per shell
    let first = mpow(f.base, start) * f.at(start);
    let tail = first / (Complex64::new(1.0, 0.0) - q / m);
    Ok(Integral { value: sum + tail, tail_bound: f64::EPSILON * tail.norm() })
}

/// `int_{B_r} f(|x|) dx = (1 - 1/m) sum_{i <= r} m^i f(m^i)`.
pub fn integrate_radial(f: &RadialFunction, r: i64) -> Result<Integral> {
    let s = inward_shell_sum(f, r)?;
    let w = 1.0 - 1.0 / f.base as f64;
    Ok(Integral { value: s.value * w, tail_bound: s.tail_bound * w })
}

/// `|k|_m` as an exact power of `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KNorm {
    Zero,
    /// `|k|_m = m^e`.
    Power(i64),
}

impl KNorm {
    /// Fails for a zero known only to finite precision, whose norm is not
    /// determined.
    pub fn of(k: &MadicNumber) -> Result<Self> {
        if k.is_exact_zero() {
            return Ok(KNorm::Zero);
        }
        match (k.valuation(), k.zero_precision()) {
            (Some(v), _) => Ok(KNorm::Power(-v)),
            (None, Some(a)) => Err(Error::InsufficientPrecision { position: a }),
            (None, None) => Ok(KNorm::Zero),
        }
    }

    /// True when `|k|_m <= m^e`.
    pub fn at_most(self, e: i64) -> bool {
        match self {
            KNorm::Zero => true,
            KNorm::Power(p) => p <= e,
        }
    }

    pub fn value(self, m: u32) -> f64 {
        match self {
            KNorm::Zero => 0.0,
            KNorm::Power(p) => mpow(m, p),
        }
    }
}

/// `int_{B_r} chi(kx) dx`: `m^r` when `|k| <= m^-r`, else 0.
pub fn character_ball_integral(m: u32, k: KNorm, r: i64) -> f64 {
    if k.at_most(-r) {
        mpow(m, r)
    } else {
        0.0
    }
}

/// `int_{S_r} chi(kx) dx`: `m^r (1 - 1/m)` when `|k| <= m^-r`,
/// `-m^(r-1)` when `|k| = m^(1-r)`, else 0.
pub fn character_sphere_integral(m: u32, k: KNorm, r: i64) -> f64 {
    if k.at_most(-r) {
        sphere_measure(m, r)
    } else if k == KNorm::Power(1 - r) {
        -mpow(m, r - 1)
    } else {
        0.0
    }
}

/// `int_{B_r} f(|x|) chi(kx) dx` for radial `f`.
///
/// With `|k| = m^e` the integral reduces to
/// `(1 - 1/m) sum_{i <= min(r, -e)} m^i f(m^i) - m^-e f(m^(1-e))`,
/// the last term present only when `1 - e <= r`.
pub fn radial_character_integral(f: &RadialFunction, k: KNorm, r: i64) -> Result<Integral> {
    let e = match k {
        KNorm::Zero => return integrate_radial(f, r),
        KNorm::Power(e) => e,
    };
    let mut out = integrate_radial(f, r.min(-e))?;
    if 1 - e <= r {
        out.value -= mpow(f.base, -e) * f.at(1 - e);
    }
    Ok(out)
}

/// Largest residue table enumerated by [`image_measure_enumerate`].
pub const MAX_ENUMERATION: u64 = 1 << 24;

/// `|{c x mod m^n : 0 <= x < m^n}| / m^n`: the Haar measure of `c Z_m`
/// resolved to the ball `m^n Z_m`.
pub fn image_measure_enumerate(c: i64, m: u32, n: u32) -> Result<Ratio<u64>> {
    if m < 2 {
        return Err(Error::InvalidBase(m));
    }
    let size = (m as u64)
        .checked_pow(n)
        .filter(|&s| s <= MAX_ENUMERATION)
        .ok_or(Error::SizeOverflow { cells: (m as u64).saturating_pow(n), limit: MAX_ENUMERATION })?;
    let modulus = size as i128;
    let c = (c as i128).rem_euclid(modulus);
    let mut hit = vec![false; size as usize];
    let mut count = 0u64;
    for x in 0..modulus {
        let y = (c * x % modulus) as usize;
        if !hit[y] {
            hit[y] = true;
            count += 1;
        }
    }
    Ok(Ratio::new(count, size))
}
