//! Continuous-time random walks on `Q_m`: Monte Carlo endpoints and the
//! Laplace-Fourier identities they satisfy.
//!
//! Jumps are radial: a shell `j` is drawn from a finite pmf and the jump is
//! uniform on `S_j`. Waiting times are exponential or Mittag-Leffler with
//! `psi^(s) = 1 / (1 + (c s)^beta)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::haar::{character_sphere_integral, sphere_measure, KNorm};
use crate::number::{MadicNumber, DEFAULT_PRECISION};
use crate::special::mittag_leffler;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WaitingTimeModel {
    Exponential { rate: f64 },
    /// Laplace transform `1 / (1 + (scale s)^beta)`.
    MittagLeffler { beta: f64, scale: f64 },
}

impl WaitingTimeModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!("rate must be positive, got {rate}")));
        }
        Ok(WaitingTimeModel::Exponential { rate })
    }

    pub fn mittag_leffler(beta: f64, scale: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidParameter(format!("beta must lie in (0, 1], got {beta}")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {scale}")));
        }
        Ok(WaitingTimeModel::MittagLeffler { beta, scale })
    }

    /// `psi^(s)`.
    pub fn laplace(&self, s: f64) -> f64 {
        match *self {
            WaitingTimeModel::Exponential { rate } => rate / (rate + s),
            WaitingTimeModel::MittagLeffler { beta, scale } => 1.0 / (1.0 + (scale * s).powf(beta)),
        }
    }

    /// `P(T > t)`.
    pub fn survival(&self, t: f64) -> Result<f64> {
        match *self {
            WaitingTimeModel::Exponential { rate } => Ok((-rate * t).exp()),
            WaitingTimeModel::MittagLeffler { beta, scale } => mittag_leffler(beta, (t / scale).powf(beta)),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let e = -(1.0 - rng.random::<f64>()).ln();
        match *self {
            WaitingTimeModel::Exponential { rate } => e / rate,
            WaitingTimeModel::MittagLeffler { beta, scale } => {
                if beta == 1.0 {
                    return scale * e;
                }
                let v = 1.0 - rng.random::<f64>();
                let (s, c) = (beta * PI).sin_cos();
                let w = s / (beta * PI * v).tan() - c;
                scale * e * w.powf(1.0 / beta)
            }
        }
    }

    /// `f^(k, t)` of the walk when the jump characteristic at `k` is `phi`.
    fn marginal_given_phi(&self, phi: f64, t: f64) -> Result<f64> {
        match *self {
            WaitingTimeModel::Exponential { rate } => Ok((rate * t * (phi - 1.0)).exp()),
            WaitingTimeModel::MittagLeffler { beta, scale } => {
                mittag_leffler(beta, (1.0 - phi).max(0.0) * (t / scale).powf(beta))
            }
        }
    }
}

/// Jump law: shell `j` with probability `p_j`, then uniform on `S_j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JumpModel {
    pub base: u32,
    pub j_min: i64,
    pub pmf: Vec<f64>,
    #[serde(skip)]
    cdf: Vec<f64>,
}

/// Truncation level for the stable jump law.
pub const STABLE_TAIL: f64 = 1e-13;

impl JumpModel {
    pub fn new(base: u32, j_min: i64, pmf: Vec<f64>) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidBase(base));
        }
        if pmf.is_empty() || pmf.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidParameter("shell pmf must be nonempty, finite and nonnegative".into()));
        }
        let total: f64 = pmf.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidParameter("shell pmf has zero mass".into()));
        }
        let pmf: Vec<f64> = pmf.iter().map(|p| p / total).collect();
        let mut acc = 0.0;
        let cdf = pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(JumpModel { base, j_min, pmf, cdf })
    }

    /// Every jump on the unit sphere.
    pub fn unit_sphere(base: u32) -> Result<Self> {
        Self::new(base, 0, vec![1.0])
    }

    /// Shell masses of the law with characteristic function
    /// `exp(-|k|^alpha)`, truncated where the neglected mass on either side
    /// falls below [`STABLE_TAIL`] and renormalised.
    pub fn stable(base: u32, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        let m = base as f64;
        let g = |i: i64| -m.powf(i as f64 * alpha);
        let mass = |j: i64| radial_shell_mass_log(base, &g, j);
        let ratio_out = m.powf(-alpha);
        let mut hi = 0;
        while mass(hi) * ratio_out / (1.0 - ratio_out) > STABLE_TAIL && hi < 4000 {
            hi += 1;
        }
        let mut lo = 0;
        while mass(lo) / (m - 1.0) > STABLE_TAIL && lo > -4000 {
            lo -= 1;
        }
        Self::new(base, lo, (lo..=hi).map(mass).collect())
    }

    /// The law of `h xi` with `|h| = m^-eta`.
    pub fn scaled(&self, eta: i64) -> Self {
        JumpModel { j_min: self.j_min - eta, ..self.clone() }
    }

    pub fn j_max(&self) -> i64 {
        self.j_min + self.pmf.len() as i64 - 1
    }

    pub fn shell_probability(&self, j: i64) -> f64 {
        if j < self.j_min || j > self.j_max() {
            0.0
        } else {
            self.pmf[(j - self.j_min) as usize]
        }
    }

    /// `phi~(k) = sum_j p_j int_{S_j} chi(kx) dx / mu(S_j)`.
    pub fn characteristic(&self, k: KNorm) -> f64 {
        let mut acc = 0.0;
        for (n, &p) in self.pmf.iter().enumerate() {
            let j = self.j_min + n as i64;
            let s = character_sphere_integral(self.base, k, j) / sphere_measure(self.base, j);
            acc += p * s;
        }
        acc
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<MadicNumber> {
        let u: f64 = rng.random();
        let n = self.cdf.partition_point(|&c| c <= u).min(self.pmf.len() - 1);
        let j = self.j_min + n as i64;
        let mut digits = Vec::with_capacity(DEFAULT_PRECISION);
        digits.push(rng.random_range(1..self.base));
        for _ in 1..DEFAULT_PRECISION {
            digits.push(rng.random_range(0..self.base));
        }
        MadicNumber::from_digits(self.base, -j, digits)
    }
}

/// `P(|X| = m^j)` for a radial law whose characteristic function is
/// `exp(g(i))` at `|k| = m^i`, `g` nonincreasing in `i`:
/// `(1 - 1/m)^2 sum_{n >= 0} m^-n (e^{g(-j-n)} - e^{g(1-j)})`, every term
/// nonnegative.
fn radial_shell_mass_log(base: u32, g: &dyn Fn(i64) -> f64, j: i64) -> f64 {
    let m = base as f64;
    let w = 1.0 - 1.0 / m;
    let outer = g(1 - j);
    let mut acc = 0.0;
    let mut scale = 1.0;
    for n in 0..8000 {
        let inner = g(-j - n);
        acc += scale * inner.exp() * -(outer - inner).exp_m1();
        // each later term is at most `scale / m^k`
        if (acc > 0.0 && scale < 1e-17 * acc) || scale < 1e-300 {
            break;
        }
        scale /= m;
    }
    w * w * acc
}

/// `P(X in B_s) = m^s (1 - 1/m) sum_{i <= -s} m^i f^(m^i)` for a radial law
/// with characteristic function `fhat`, evaluated at `|k| = m^i`. Shells are
/// added inward until the remaining weight `m^(i+s)` is below `1e-17`.
pub fn radial_inverse_ball_prob(base: u32, fhat: &dyn Fn(KNorm) -> Result<f64>, s: i64) -> Result<f64> {
    let m = base as f64;
    let mut acc = 0.0;
    let mut weight = 1.0 - 1.0 / m;
    let mut i = -s;
    while weight > 1e-17 {
        acc += weight * fhat(KNorm::Power(i))?;
        weight /= m;
        i -= 1;
    }
    // the remaining shells carry total weight `weight * m / (m - 1)` with fhat ~ fhat(0)
    acc += weight * m / (m - 1.0) * fhat(KNorm::Zero)?;
    Ok(acc)
}

/// Waiting law and jump law of an uncoupled CTRW.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CtrwModel {
    pub waiting: WaitingTimeModel,
    pub jumps: JumpModel,
}

impl CtrwModel {
    /// Diffusive scaling: jumps `h xi` with `|h| = m^-eta` and waiting times
    /// `r T` with `r^beta = |h|^alpha`.
    pub fn diffusive(base: u32, alpha: f64, beta: f64, eta: i64) -> Result<Self> {
        let r = (base as f64).powf(-(eta as f64) * alpha / beta);
        Ok(CtrwModel {
            waiting: WaitingTimeModel::mittag_leffler(beta, r)?,
            jumps: JumpModel::stable(base, alpha)?.scaled(eta),
        })
    }

    /// `f^(k, t)` of `X(t)`: `exp(lambda t (phi - 1))` or
    /// `E_beta(-(1 - phi) (t / c)^beta)`.
    pub fn marginal_characteristic(&self, k: KNorm, t: f64) -> Result<f64> {
        self.waiting.marginal_given_phi(self.jumps.characteristic(k), t)
    }

    /// `P(X(t) = 0) = P(N(t) = 0)`.
    pub fn atom_at_zero(&self, t: f64) -> Result<f64> {
        self.waiting.survival(t)
    }

    /// Exact shell pmf of `X(t)` over `shells`, with the atom at zero.
    pub fn shell_pmf(&self, t: f64, shells: std::ops::RangeInclusive<i64>) -> Result<ShellPmf> {
        let atom = self.atom_at_zero(t)?;
        let fhat = |k: KNorm| Ok(self.marginal_characteristic(k, t)? - atom);
        ball_pmf(self.jumps.base, atom, &fhat, shells)
    }
}

/// Shell pmf from ball probabilities `P(B_s) = atom + inversion of fhat`,
/// where `fhat` excludes the atom.
pub fn ball_pmf(
    base: u32,
    atom: f64,
    fhat: &dyn Fn(KNorm) -> Result<f64>,
    shells: std::ops::RangeInclusive<i64>,
) -> Result<ShellPmf> {
    let (lo, hi) = (*shells.start(), *shells.end());
    let mut balls = Vec::new();
    for s in (lo - 1)..=hi {
        balls.push(radial_inverse_ball_prob(base, fhat, s)?);
    }
    let mut out = BTreeMap::new();
    for (n, j) in (lo..=hi).enumerate() {
        out.insert(j, (balls[n + 1] - balls[n]).max(0.0));
    }
    Ok(ShellPmf { base, zero: atom, shells: out, outside: (1.0 - atom - balls[balls.len() - 1]).max(0.0) + balls[0] })
}

/// A shell pmf: `P(X = 0)`, `P(|X| = m^j)` on a window, and the mass outside.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShellPmf {
    pub base: u32,
    pub zero: f64,
    pub shells: BTreeMap<i64, f64>,
    pub outside: f64,
}

/// One simulated path, reduced to what the histograms need.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSample {
    pub index: u64,
    pub jumps: usize,
    pub endpoint: MadicNumber,
    pub event_times: Vec<f64>,
    /// Set when a jump fell entirely below the known digits of the sum.
    pub precision_warning: bool,
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Simulates `X(t)` on the random substream `index` of `seed`.
pub fn sample_endpoint(model: &CtrwModel, t: f64, seed: u64, index: u64) -> Result<PathSample> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    let mut rng = stream(seed, index);
    let mut x = MadicNumber::zero(model.jumps.base)?;
    let mut clock = 0.0;
    let mut times = Vec::new();
    let mut warn = false;
    loop {
        clock += model.waiting.sample(&mut rng);
        if clock > t {
            break;
        }
        times.push(clock);
        let xi = model.jumps.sample(&mut rng)?;
        if let (Some(v), Some(a)) = (xi.valuation(), x.absolute_precision()) {
            if v >= a {
                warn = true;
            }
        }
        x = x.add(&xi)?;
    }
    Ok(PathSample { index, jumps: times.len(), endpoint: x, event_times: times, precision_warning: warn })
}

/// Where an endpoint landed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bin {
    Zero,
    Shell(i64),
    /// Cancellation left no known nonzero digit.
    Unresolved,
}

pub fn bin_of(x: &MadicNumber) -> Bin {
    if x.is_exact_zero() {
        Bin::Zero
    } else if let Some(v) = x.valuation() {
        Bin::Shell(-v)
    } else {
        Bin::Unresolved
    }
}

/// Integer bin counts of simulated endpoints.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ShellHistogram {
    pub samples: u64,
    pub zero: u64,
    pub unresolved: u64,
    pub shells: BTreeMap<i64, u64>,
    pub precision_warnings: u64,
    /// Jumps summed over all paths; an integer so merges are order free.
    pub total_jumps: u64,
}

/// Wilson score interval for `count` successes in `n` trials.
pub fn wilson(count: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = count as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = z / denom * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

impl ShellHistogram {
    pub fn from_samples<'a, I: IntoIterator<Item = &'a PathSample>>(samples: I) -> Self {
        let mut h = ShellHistogram::default();
        for s in samples {
            h.record(bin_of(&s.endpoint), s.precision_warning);
            h.total_jumps += s.jumps as u64;
        }
        h
    }

    fn record(&mut self, bin: Bin, warn: bool) {
        self.samples += 1;
        self.precision_warnings += warn as u64;
        match bin {
            Bin::Zero => self.zero += 1,
            Bin::Unresolved => self.unresolved += 1,
            Bin::Shell(j) => *self.shells.entry(j).or_default() += 1,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.samples += other.samples;
        self.total_jumps += other.total_jumps;
        self.zero += other.zero;
        self.unresolved += other.unresolved;
        self.precision_warnings += other.precision_warnings;
        for (j, c) in other.shells {
            *self.shells.entry(j).or_default() += c;
        }
        self
    }

    pub fn mean_jumps(&self) -> f64 {
        self.total_jumps as f64 / self.samples.max(1) as f64
    }

    pub fn frequency(&self, bin: Bin) -> f64 {
        self.count(bin) as f64 / self.samples.max(1) as f64
    }

    pub fn count(&self, bin: Bin) -> u64 {
        match bin {
            Bin::Zero => self.zero,
            Bin::Unresolved => self.unresolved,
            Bin::Shell(j) => self.shells.get(&j).copied().unwrap_or(0),
        }
    }

    /// 95% Wilson interval of a bin frequency.
    pub fn interval(&self, bin: Bin) -> (f64, f64) {
        wilson(self.count(bin), self.samples, 1.959_963_984_540_054)
    }

    /// Total variation distance to an exact shell pmf; mass the pmf puts
    /// outside its window and unresolved samples count fully.
    pub fn tv_distance(&self, exact: &ShellPmf) -> f64 {
        let mut d = (self.frequency(Bin::Zero) - exact.zero).abs() + self.frequency(Bin::Unresolved);
        let mut empirical_outside = 0.0;
        for (&j, &c) in &self.shells {
            if !exact.shells.contains_key(&j) {
                empirical_outside += c as f64 / self.samples as f64;
            }
        }
        for (&j, &p) in &exact.shells {
            d += (self.frequency(Bin::Shell(j)) - p).abs();
        }
        d += (empirical_outside - exact.outside).abs();
        0.5 * d
    }
}

/// Simulates `samples` endpoints in parallel; the result depends only on
/// `seed`, not on the worker count.
pub fn simulate(model: &CtrwModel, t: f64, samples: u64, seed: u64) -> Result<ShellHistogram> {
    (0..samples)
        .into_par_iter()
        .map(|i| sample_endpoint(model, t, seed, i).map(|s| ShellHistogram::from_samples([&s])))
        .try_reduce(ShellHistogram::default, |a, b| Ok(a.merge(b)))
}

/// `p^(s, n) = psi^(s)^n (1 - psi^(s)) / s`.
pub fn counting_pmf_laplace(w: &WaitingTimeModel, s: f64, n: u32) -> Result<f64> {
    check_s(s)?;
    let p = w.laplace(s);
    Ok(p.powi(n as i32) * (1.0 - p) / s)
}

fn check_s(s: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("Laplace variable must be positive, got {s}")));
    }
    Ok(())
}

/// `f^~(k, s) = (1 - psi^) / s / (1 - psi^ phi~)`.
pub fn montroll_weiss(w: &WaitingTimeModel, j: &JumpModel, k: KNorm, s: f64) -> Result<f64> {
    check_s(s)?;
    let p = w.laplace(s);
    Ok((1.0 - p) / s / (1.0 - p * j.characteristic(k)))
}

/// The same transform solved from
/// `Phi(s) (s f - 1) = (phi~ - 1) f`, `Phi = (1 - psi^) / (s psi^)`.
pub fn montroll_weiss_alternative(w: &WaitingTimeModel, j: &JumpModel, k: KNorm, s: f64) -> Result<f64> {
    check_s(s)?;
    let p = w.laplace(s);
    let big_phi = (1.0 - p) / (s * p);
    Ok(big_phi / (s * big_phi + 1.0 - j.characteristic(k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_jumps_have_stable_characteristic() {
        for (m, alpha) in [(3, 1.0), (2, 0.5), (5, 1.7)] {
            let j = JumpModel::stable(m, alpha).unwrap();
            for e in -4..=4 {
                let phi = j.characteristic(KNorm::Power(e));
                let exact = (-(m as f64).powf(alpha * e as f64)).exp();
                assert!((phi - exact).abs() < 1e-11, "m={m} alpha={alpha} e={e}: {phi} vs {exact}");
            }
        }
    }

    #[test]
    fn zero_time_path() {
        let model = CtrwModel {
            waiting: WaitingTimeModel::exponential(1.0).unwrap(),
            jumps: JumpModel::unit_sphere(3).unwrap(),
        };
        let p = sample_endpoint(&model, 0.0, 7, 0).unwrap();
        assert_eq!(p.jumps, 0);
        assert!(p.endpoint.is_exact_zero());
        let a = sample_endpoint(&model, 5.0, 7, 3).unwrap();
        let b = sample_endpoint(&model, 5.0, 7, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.event_times.iter().all(|&s| s <= 5.0));
    }

    #[test]
    fn counting_normalisation() {
        for w in [WaitingTimeModel::exponential(2.0).unwrap(), WaitingTimeModel::mittag_leffler(0.6, 1.0).unwrap()] {
            for s in [0.3, 1.0, 4.0] {
                let total: f64 = (0..5000).map(|n| counting_pmf_laplace(&w, s, n).unwrap()).sum();
                assert!((total - 1.0 / s).abs() < 1e-10);
            }
        }
        let w = WaitingTimeModel::exponential(1.5).unwrap();
        let v = counting_pmf_laplace(&w, 0.5, 3).unwrap();
        assert!((v - 1.5f64.powi(3) / 2.0f64.powi(4)).abs() < 1e-15);
    }

    #[test]
    fn resolvent_forms() {
        let w = WaitingTimeModel::exponential(1.3).unwrap();
        let j = JumpModel::stable(3, 1.0).unwrap();
        for e in -2..=2 {
            let k = KNorm::Power(e);
            let direct = 1.0 / (0.7 - 1.3 * (j.characteristic(k) - 1.0));
            assert!((montroll_weiss(&w, &j, k, 0.7).unwrap() - direct).abs() < 1e-13);
        }
        assert!((montroll_weiss(&w, &j, KNorm::Zero, 0.7).unwrap() - 1.0 / 0.7).abs() < 1e-14);
    }

    #[test]
    fn ball_probability_of_uniform_unit_ball() {
        let f = |k: KNorm| Ok(if k.at_most(0) { 1.0 } else { 0.0 });
        assert!((radial_inverse_ball_prob(3, &f, 0).unwrap() - 1.0).abs() < 1e-15);
        assert!((radial_inverse_ball_prob(3, &f, 2).unwrap() - 1.0).abs() < 1e-15);
        assert!((radial_inverse_ball_prob(3, &f, -2).unwrap() - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn wilson_interval_contains_estimate() {
        let (lo, hi) = wilson(30, 100, 1.96);
        assert!(lo < 0.3 && 0.3 < hi);
        let (lo, hi) = wilson(0, 100, 1.96);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0);
    }
}
