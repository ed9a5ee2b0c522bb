//! Fourier analysis of locally constant functions.
//!
//! `D_r^l` is the space of functions supported in `B_r` and constant on the
//! cosets of `B_l` (`l <= r`). Such a function is a vector over the cyclic
//! group `B_r / B_l` of order `M = m^(r-l)`. The x-side cosets are represented
//! by `x = sum_{i=-r}^{-l-1} a_i m^i`; on the k-side the transform lives in
//! `D_{-l}^{-r}` with representatives `k = sum_{i=l}^{r-1} b_i m^i`.
//!
//! Writing `n_x = x m^r` and `n_k = k m^-l` (both integers in `[0, M)`) gives
//! `{kx} = (n_x n_k mod M) / M`, so the transform is a size-`M` DFT.
//!
//! Values are stored in lexicographic order of the digit tuple, lowest
//! position first and most significant: `(a_{-r}, ..., a_{-l-1})` for x and
//! `(b_l, ..., b_{r-1})` for k. The flat index is therefore `n` with its
//! base-m digits reversed.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::haar::{character_ball_integral, KNorm};
use crate::number::MadicNumber;

/// Largest number of cells a transform will allocate.
pub const MAX_CELLS: u64 = 1 << 20;

/// Number of cosets of `B_l` in `B_r`, checked against `limit`.
pub fn cell_count(m: u32, r: i64, l: i64, limit: u64) -> Result<usize> {
    if m < 2 {
        return Err(Error::InvalidBase(m));
    }
    if l > r {
        return Err(Error::Grid(format!("constancy index {l} exceeds support index {r}")));
    }
    let width = (r - l) as u64;
    let cells = if width >= 64 { None } else { (m as u64).checked_pow(width as u32) };
    match cells {
        Some(c) if c <= limit => Ok(c as usize),
        _ => Err(Error::SizeOverflow { cells: cells.unwrap_or(u64::MAX), limit }),
    }
}

/// Index bijections for the x-side and k-side of `B_r / B_l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetMaps {
    pub base: u32,
    pub support: i64,
    pub constancy: i64,
    /// `natural[i]` is `n = x m^r` (resp. `k m^-l`) for flat index `i`;
    /// the same permutation serves both sides.
    pub natural: Vec<usize>,
    /// Inverse permutation.
    pub flat: Vec<usize>,
}

impl CosetMaps {
    pub fn size(&self) -> usize {
        self.natural.len()
    }

    /// `sigma` with `chi(k_j x_i) = exp(2 pi i sigma / M)`.
    pub fn phase_numerator(&self, i: usize, j: usize) -> usize {
        let m = self.size() as u128;
        ((self.natural[i] as u128 * self.natural[j] as u128) % m) as usize
    }

    /// Digit tuple of flat index `i`.
    pub fn digits(&self, i: usize) -> Vec<u32> {
        let width = (self.support - self.constancy) as usize;
        let mut d = vec![0; width];
        let mut n = i;
        for slot in d.iter_mut().rev() {
            *slot = (n % self.base as usize) as u32;
            n /= self.base as usize;
        }
        d
    }

    /// Flat index of a digit tuple.
    pub fn index_of(&self, digits: &[u32]) -> Result<usize> {
        let width = (self.support - self.constancy) as usize;
        if digits.len() != width {
            return Err(Error::Grid(format!("expected {width} digits, got {}", digits.len())));
        }
        let mut i = 0usize;
        for &d in digits {
            if d >= self.base {
                return Err(Error::InvalidDigit { digit: d, base: self.base });
            }
            i = i * self.base as usize + d as usize;
        }
        Ok(i)
    }
}

fn digit_reverse(mut n: usize, m: usize, width: usize) -> usize {
    let mut out = 0;
    for _ in 0..width {
        out = out * m + n % m;
        n /= m;
    }
    out
}

pub fn coset_index_maps(m: u32, r: i64, l: i64) -> Result<CosetMaps> {
    let size = cell_count(m, r, l, MAX_CELLS)?;
    let width = (r - l) as usize;
    let natural: Vec<usize> = (0..size).map(|i| digit_reverse(i, m as usize, width)).collect();
    let mut flat = vec![0; size];
    for (i, &n) in natural.iter().enumerate() {
        flat[n] = i;
    }
    Ok(CosetMaps { base: m, support: r, constancy: l, natural, flat })
}

/// A function in `D_r^l`, stored per coset of `B_l` in `B_r`.
///
/// The Fourier transform of an element of `D_r^l` lies in `D_{-l}^{-r}` and
/// is represented by the same type; [`SpectralFunction`] names that use.
#[derive(Clone, Debug, PartialEq)]
pub struct LocallyConstantFunction {
    base: u32,
    support: i64,
    constancy: i64,
    values: Vec<Complex64>,
}

pub type SpectralFunction = LocallyConstantFunction;

impl LocallyConstantFunction {
    pub fn new(base: u32, support: i64, constancy: i64, values: Vec<Complex64>) -> Result<Self> {
        let size = cell_count(base, support, constancy, MAX_CELLS)?;
        if values.len() != size {
            return Err(Error::Grid(format!("expected {size} values, got {}", values.len())));
        }
        Ok(LocallyConstantFunction { base, support, constancy, values })
    }

    pub fn zero(base: u32, support: i64, constancy: i64) -> Result<Self> {
        let size = cell_count(base, support, constancy, MAX_CELLS)?;
        Self::new(base, support, constancy, vec![Complex64::new(0.0, 0.0); size])
    }

    /// `f(x)` evaluated at the coset representatives.
    pub fn from_fn<F: Fn(&MadicNumber) -> Complex64>(base: u32, support: i64, constancy: i64, f: F) -> Result<Self> {
        let maps = coset_index_maps(base, support, constancy)?;
        let values = (0..maps.size())
            .map(|i| representative(&maps, i, -support).map(|x| f(&x)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(base, support, constancy, values)
    }

    /// `c * Omega(|x| <= m^r)` as an element of `D_r^r`.
    pub fn ball_indicator(base: u32, r: i64, c: f64) -> Result<Self> {
        Self::new(base, r, r, vec![Complex64::new(c, 0.0)])
    }

    pub fn base(&self) -> u32 {
        self.base
    }
    pub fn support(&self) -> i64 {
        self.support
    }
    pub fn constancy(&self) -> i64 {
        self.constancy
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `m^l sum |f|^2`, the squared `L^2` norm.
    pub fn energy(&self) -> f64 {
        let cell = (self.base as f64).powi(self.constancy as i32);
        cell * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// `int f`.
    pub fn integral(&self) -> Complex64 {
        let cell = (self.base as f64).powi(self.constancy as i32);
        self.values.iter().sum::<Complex64>() * cell
    }

    /// Value at an arbitrary point, read from its digits at positions
    /// `-r ..= -l-1`. For a transform in `D_{-l}^{-r}` these are the
    /// positions `l ..= r-1` of `k`.
    pub fn evaluate(&self, x: &MadicNumber) -> Result<Complex64> {
        self.evaluate_with_positions(x, -self.support)
    }

    fn evaluate_with_positions(&self, x: &MadicNumber, low: i64) -> Result<Complex64> {
        if x.base() != self.base {
            return Err(Error::BaseMismatch(x.base(), self.base));
        }
        let width = self.support - self.constancy;
        for p in (x.valuation().unwrap_or(low)).min(low)..low {
            match x.digit_at(p) {
                Some(0) => {}
                Some(_) => return Ok(Complex64::new(0.0, 0.0)),
                None => return Err(Error::InsufficientPrecision { position: p }),
            }
        }
        let mut i = 0usize;
        for p in low..low + width {
            let d = x.digit_at(p).ok_or(Error::InsufficientPrecision { position: p })?;
            i = i * self.base as usize + d as usize;
        }
        Ok(self.values[i])
    }

    /// The same function viewed in `D_R^L` with `R >= r`, `L <= l`.
    pub fn embed(&self, support: i64, constancy: i64) -> Result<Self> {
        if support < self.support || constancy > self.constancy {
            return Err(Error::Grid(format!(
                "D_{}^{} does not contain D_{}^{}",
                support, constancy, self.support, self.constancy
            )));
        }
        let maps = coset_index_maps(self.base, support, constancy)?;
        let own = coset_index_maps(self.base, self.support, self.constancy)?;
        let m = self.base as usize;
        let outer = m.pow((support - self.support) as u32);
        let own_size = own.size();
        let mut values = vec![Complex64::new(0.0, 0.0); maps.size()];
        for (i, v) in values.iter_mut().enumerate() {
            let n = maps.natural[i];
            if n % outer == 0 {
                *v = self.values[own.flat[(n / outer) % own_size]];
            }
        }
        Self::new(self.base, support, constancy, values)
    }

    fn natural_order(&self, maps: &CosetMaps) -> Vec<Complex64> {
        maps.natural_inverse_apply(&self.values)
    }
}

impl CosetMaps {
    fn natural_inverse_apply(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
        for (i, &v) in values.iter().enumerate() {
            out[self.natural[i]] = v;
        }
        out
    }

    fn to_flat(&self, natural: &[Complex64]) -> Vec<Complex64> {
        self.natural.iter().map(|&n| natural[n]).collect()
    }
}

/// Coset representative for flat index `i`, lowest digit at `low`.
fn representative(maps: &CosetMaps, i: usize, low: i64) -> Result<MadicNumber> {
    MadicNumber::from_digits(maps.base, low, maps.digits(i))
}

/// x-side coset representative of `D_r^l`.
pub fn x_representative(maps: &CosetMaps, i: usize) -> Result<MadicNumber> {
    representative(maps, i, -maps.support)
}

/// k-side coset representative of `D_{-l}^{-r}`.
pub fn k_representative(maps: &CosetMaps, j: usize) -> Result<MadicNumber> {
    representative(maps, j, maps.constancy)
}

fn unit(sigma: usize, size: usize, sign: f64) -> Complex64 {
    let (s, c) = (2.0 * PI * sigma as f64 / size as f64).sin_cos();
    Complex64::new(c, sign * s)
}

fn naive(values: &[Complex64], maps: &CosetMaps, sign: f64, scale: f64) -> Vec<Complex64> {
    let size = maps.size();
    (0..size)
        .into_par_iter()
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &v) in values.iter().enumerate() {
                acc += v * unit(maps.phase_numerator(i, j), size, sign);
            }
            acc * scale
        })
        .collect()
}

fn fast(values: &[Complex64], maps: &CosetMaps, sign: f64, scale: f64) -> Vec<Complex64> {
    let mut buf = maps.natural_inverse_apply(values);
    let mut planner = FftPlanner::new();
    let plan: Arc<dyn Fft<f64>> = if sign > 0.0 {
        planner.plan_fft_inverse(buf.len())
    } else {
        planner.plan_fft_forward(buf.len())
    };
    plan.process(&mut buf);
    for v in buf.iter_mut() {
        *v *= scale;
    }
    maps.to_flat(&buf)
}

fn transform(
    f: &LocallyConstantFunction,
    out_support: i64,
    out_constancy: i64,
    sign: f64,
    scale: f64,
    use_fast: bool,
) -> Result<LocallyConstantFunction> {
    let maps = coset_index_maps(f.base, f.support, f.constancy)?;
    let values = if use_fast { fast(&f.values, &maps, sign, scale) } else { naive(&f.values, &maps, sign, scale) };
    LocallyConstantFunction::new(f.base, out_support, out_constancy, values)
}

/// `f~(k) = int chi(kx) f(x) dx = m^l sum_i chi(k x_i) f(x_i)`.
pub fn forward(f: &LocallyConstantFunction) -> Result<SpectralFunction> {
    let scale = (f.base as f64).powi(f.constancy as i32);
    transform(f, -f.constancy, -f.support, 1.0, scale, true)
}

/// Reference O(M^2) evaluation of [`forward`].
pub fn forward_naive(f: &LocallyConstantFunction) -> Result<SpectralFunction> {
    let scale = (f.base as f64).powi(f.constancy as i32);
    transform(f, -f.constancy, -f.support, 1.0, scale, false)
}

/// `f(x) = int chi(-kx) g(k) dk = m^(-r) sum_j chi(-k_j x) g(k_j)` for `g`
/// in `D_{-l}^{-r}`; the result lies in `D_r^l`.
pub fn inverse(g: &SpectralFunction) -> Result<LocallyConstantFunction> {
    let scale = (g.base as f64).powi(g.constancy as i32);
    transform(g, -g.constancy, -g.support, -1.0, scale, true)
}

/// Reference O(M^2) evaluation of [`inverse`].
pub fn inverse_naive(g: &SpectralFunction) -> Result<LocallyConstantFunction> {
    let scale = (g.base as f64).powi(g.constancy as i32);
    transform(g, -g.constancy, -g.support, -1.0, scale, false)
}

/// `f~(k)` at an arbitrary `k`: `sum_i f(x_i) chi(k x_i) int_{B_l} chi(kx) dx`.
pub fn forward_at(f: &LocallyConstantFunction, k: &MadicNumber) -> Result<Complex64> {
    let norm = KNorm::of(k)?;
    let cell = character_ball_integral(f.base, norm, f.constancy);
    if cell == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let maps = coset_index_maps(f.base, f.support, f.constancy)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &v) in f.values.iter().enumerate() {
        if v == Complex64::new(0.0, 0.0) {
            continue;
        }
        let x = x_representative(&maps, i)?;
        acc += v * crate::number::character(k, &x)?.to_complex();
    }
    Ok(acc * cell)
}

/// `(f * g)(x) = int f(y) g(x - y) dy`, by direct coset summation on the
/// common grid `D_R^L`, `R = max(r)`, `L = min(l)`.
pub fn convolve(f: &LocallyConstantFunction, g: &LocallyConstantFunction) -> Result<LocallyConstantFunction> {
    if f.base != g.base {
        return Err(Error::BaseMismatch(f.base, g.base));
    }
    let r = f.support.max(g.support);
    let l = f.constancy.min(g.constancy);
    let (fe, ge) = (f.embed(r, l)?, g.embed(r, l)?);
    let maps = coset_index_maps(f.base, r, l)?;
    let size = maps.size();
    let fn_ = fe.natural_order(&maps);
    let gn = ge.natural_order(&maps);
    let cell = (f.base as f64).powi(l as i32);
    let out: Vec<Complex64> = (0..size)
        .into_par_iter()
        .map(|x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (y, &fy) in fn_.iter().enumerate() {
                acc += fy * gn[(x + size - y) % size];
            }
            acc * cell
        })
        .collect();
    LocallyConstantFunction::new(f.base, r, l, maps.to_flat(&out))
}

/// Pointwise product of two functions on the same grid.
pub fn pointwise_product(f: &LocallyConstantFunction, g: &LocallyConstantFunction) -> Result<LocallyConstantFunction> {
    if f.base != g.base {
        return Err(Error::BaseMismatch(f.base, g.base));
    }
    if (f.support, f.constancy) != (g.support, g.constancy) {
        return Err(Error::Grid("pointwise product needs a common grid".into()));
    }
    let values = f.values.iter().zip(&g.values).map(|(a, b)| a * b).collect();
    LocallyConstantFunction::new(f.base, f.support, f.constancy, values)
}

/// Rows `digits,re,im` with the digit tuple joined by `:`.
pub fn to_csv(f: &LocallyConstantFunction) -> Result<String> {
    let maps = coset_index_maps(f.base, f.support, f.constancy)?;
    let mut out = String::from("digits,re,im\n");
    for (i, v) in f.values.iter().enumerate() {
        let d: Vec<String> = maps.digits(i).iter().map(u32::to_string).collect();
        out.push_str(&format!("{},{:.17e},{:.17e}\n", d.join(":"), v.re, v.im));
    }
    Ok(out)
}

/// Parses the [`to_csv`] schema; cells not listed are zero.
pub fn from_csv(base: u32, support: i64, constancy: i64, text: &str) -> Result<LocallyConstantFunction> {
    let maps = coset_index_maps(base, support, constancy)?;
    let mut values = vec![Complex64::new(0.0, 0.0); maps.size()];
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (n == 0 && line.starts_with("digits")) {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(Error::Parse(format!("line {}: expected 3 columns", n + 1)));
        }
        let digits = if cols[0].is_empty() {
            Vec::new()
        } else {
            cols[0]
                .split(':')
                .map(|d| d.parse::<u32>().map_err(|e| Error::Parse(format!("line {}: {e}", n + 1))))
                .collect::<Result<Vec<_>>>()?
        };
        let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)));
        values[maps.index_of(&digits)?] = Complex64::new(num(cols[1])?, num(cols[2])?);
    }
    LocallyConstantFunction::new(base, support, constancy, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn unit_ball_is_self_dual() {
        for m in [2, 3, 5] {
            let f = LocallyConstantFunction::ball_indicator(m, 0, 1.0).unwrap();
            let g = forward(&f).unwrap();
            assert_eq!((g.support(), g.constancy()), (0, 0));
            assert_eq!(g.values(), &[c(1.0)]);
            assert_eq!(inverse(&g).unwrap(), f);
        }
    }

    #[test]
    fn scaled_small_ball() {
        let m = 3;
        let f = LocallyConstantFunction::ball_indicator(m, -1, m as f64).unwrap();
        let g = forward(&f).unwrap();
        assert_eq!((g.support(), g.constancy()), (1, 1));
        assert!((g.values()[0] - c(1.0)).norm() < 1e-15);
        let spike = LocallyConstantFunction::ball_indicator(m, -2, 9.0).unwrap();
        assert_eq!(inverse(&forward(&spike).unwrap()).unwrap(), spike);
    }

    #[test]
    fn phases_match_characters() {
        for (m, r, l) in [(2, 1, 0), (3, 1, -1), (4, 0, -2)] {
            let maps = coset_index_maps(m, r, l).unwrap();
            let size = maps.size();
            for i in 0..size {
                for j in 0..size {
                    let x = x_representative(&maps, i).unwrap();
                    let k = k_representative(&maps, j).unwrap();
                    let direct = crate::number::character(&k, &x).unwrap().to_complex();
                    let via = unit(maps.phase_numerator(i, j), size, 1.0);
                    assert!((direct - via).norm() < 1e-14);
                }
            }
        }
        let single = coset_index_maps(5, 2, 2).unwrap();
        assert_eq!(single.natural, vec![0]);
    }

    #[test]
    fn embedding_keeps_values() {
        let m = 2;
        let f = LocallyConstantFunction::new(m, 1, 0, vec![c(1.0), c(2.0)]).unwrap();
        let e = f.embed(2, -1).unwrap();
        for i in 0..e.len() {
            let maps = coset_index_maps(m, 2, -1).unwrap();
            let x = x_representative(&maps, i).unwrap();
            assert_eq!(e.values()[i], f.evaluate(&x).unwrap());
        }
        assert_eq!(e.integral(), f.integral());
    }

    #[test]
    fn csv_round_trip() {
        let f = LocallyConstantFunction::new(3, 1, 0, vec![c(1.0), Complex64::new(0.5, -2.0), c(0.0)]).unwrap();
        let text = to_csv(&f).unwrap();
        assert_eq!(from_csv(3, 1, 0, &text).unwrap(), f);
    }

    #[test]
    fn size_guard() {
        assert!(matches!(LocallyConstantFunction::zero(2, 21, 0), Err(Error::SizeOverflow { .. })));
        assert!(LocallyConstantFunction::zero(2, 0, 1).is_err());
    }
}
