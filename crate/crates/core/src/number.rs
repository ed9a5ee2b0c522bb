//! Truncated m-adic numbers.
//!
//! A nonzero value is stored as `m^v * (d_0 + d_1 m + ... + d_{N-1} m^{N-1})`
//! with `d_0 != 0`. Only the `N` listed digits are known; everything at or
//! above position `v + N` (the absolute precision) is unknown. Precision is
//! tracked per value: a sum knows only the positions both operands know.
//!
//! Exact zero and "zero to absolute precision `A`" are different values. The
//! latter appears when a sum cancels every known digit.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Number of digits carried by values built from integers.
pub const DEFAULT_PRECISION: usize = 48;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Zero,
    /// Congruent to zero modulo `m^A`.
    ZeroTo(i64),
    Digits { valuation: i64, digits: Vec<u32> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MadicNumber {
    base: u32,
    repr: Repr,
}

fn check_base(base: u32) -> Result<()> {
    if base < 2 {
        return Err(Error::InvalidBase(base));
    }
    Ok(())
}

impl MadicNumber {
    pub fn zero(base: u32) -> Result<Self> {
        check_base(base)?;
        Ok(Self { base, repr: Repr::Zero })
    }

    /// Zero known only modulo `m^absolute_precision`.
    pub fn zero_to(base: u32, absolute_precision: i64) -> Result<Self> {
        check_base(base)?;
        Ok(Self { base, repr: Repr::ZeroTo(absolute_precision) })
    }

    pub fn one(base: u32) -> Result<Self> {
        Self::from_i64(base, 1)
    }

    /// `n` written in base `m` with [`DEFAULT_PRECISION`] digits.
    pub fn from_i64(base: u32, n: i64) -> Result<Self> {
        Self::from_i64_with_precision(base, n, DEFAULT_PRECISION)
    }

    pub fn from_i64_with_precision(base: u32, n: i64, precision: usize) -> Result<Self> {
        check_base(base)?;
        if n == 0 {
            return Ok(Self { base, repr: Repr::Zero });
        }
        let m = base as u128;
        let mut rest = n.unsigned_abs() as u128;
        let mut raw = Vec::with_capacity(precision);
        while raw.len() < precision {
            raw.push((rest % m) as u32);
            rest /= m;
        }
        let magnitude = Self::from_digits(base, 0, raw)?;
        Ok(if n < 0 { magnitude.neg() } else { magnitude })
    }

    /// `m^exponent` with [`DEFAULT_PRECISION`] digits.
    pub fn m_power(base: u32, exponent: i64) -> Result<Self> {
        Ok(Self::one(base)?.shift(exponent))
    }

    /// Builds `m^valuation * sum digits[i] m^i`. Leading zero digits are
    /// absorbed into the valuation; an all-zero list yields a zero known to
    /// `valuation + digits.len()`.
    pub fn from_digits(base: u32, valuation: i64, digits: Vec<u32>) -> Result<Self> {
        check_base(base)?;
        if let Some(&digit) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::InvalidDigit { digit, base });
        }
        Ok(Self::normalized(base, valuation, digits))
    }

    fn normalized(base: u32, valuation: i64, mut digits: Vec<u32>) -> Self {
        let len = digits.len() as i64;
        match digits.iter().position(|&d| d != 0) {
            None => Self { base, repr: Repr::ZeroTo(valuation + len) },
            Some(z) => {
                digits.drain(..z);
                Self { base, repr: Repr::Digits { valuation: valuation + z as i64, digits } }
            }
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Index of the lowest nonzero digit; `None` for zeros.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Digits { valuation, .. } => Some(*valuation),
            _ => None,
        }
    }

    /// Known digits, lowest first. Empty for zeros.
    pub fn digits(&self) -> &[u32] {
        match &self.repr {
            Repr::Digits { digits, .. } => digits,
            _ => &[],
        }
    }

    /// Number of known digits counted from the valuation.
    pub fn precision(&self) -> usize {
        self.digits().len()
    }

    /// First unknown position; `None` for exact zero.
    pub fn absolute_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero => None,
            Repr::ZeroTo(a) => Some(*a),
            Repr::Digits { valuation, digits } => Some(valuation + digits.len() as i64),
        }
    }

    pub fn is_zero(&self) -> bool {
        !matches!(self.repr, Repr::Digits { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    /// `Some(A)` when the value is zero only modulo `m^A`.
    pub fn zero_precision(&self) -> Option<i64> {
        match self.repr {
            Repr::ZeroTo(a) => Some(a),
            _ => None,
        }
    }

    /// Digit at `position`: `Some(0)` below the valuation, `None` when unknown.
    pub fn digit_at(&self, position: i64) -> Option<u32> {
        match &self.repr {
            Repr::Zero => Some(0),
            Repr::ZeroTo(a) => (position < *a).then_some(0),
            Repr::Digits { valuation, digits } => {
                if position < *valuation {
                    Some(0)
                } else {
                    digits.get((position - valuation) as usize).copied()
                }
            }
        }
    }

    /// Multiplication by `m^exponent`.
    pub fn shift(&self, exponent: i64) -> Self {
        let repr = match &self.repr {
            Repr::Zero => Repr::Zero,
            Repr::ZeroTo(a) => Repr::ZeroTo(a + exponent),
            Repr::Digits { valuation, digits } => {
                Repr::Digits { valuation: valuation + exponent, digits: digits.clone() }
            }
        };
        Self { base: self.base, repr }
    }

    /// Truncates to at most `precision` known digits.
    pub fn truncate(&self, precision: usize) -> Self {
        match &self.repr {
            Repr::Digits { valuation, digits } if digits.len() > precision => {
                Self::normalized(self.base, *valuation, digits[..precision].to_vec())
            }
            _ => self.clone(),
        }
    }

    fn same_base(&self, other: &Self) -> Result<()> {
        if self.base != other.base {
            return Err(Error::BaseMismatch(self.base, other.base));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_base(other)?;
        if self.is_exact_zero() {
            return Ok(other.clone());
        }
        if other.is_exact_zero() {
            return Ok(self.clone());
        }
        let a = self.absolute_precision().unwrap();
        let b = other.absolute_precision().unwrap();
        let top = a.min(b);
        let low = match (self.valuation(), other.valuation()) {
            (Some(x), Some(y)) => x.min(y),
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => top,
        };
        if low >= top {
            return Ok(Self { base: self.base, repr: Repr::ZeroTo(top) });
        }
        let m = self.base as u64;
        let mut carry = 0u64;
        let mut out = Vec::with_capacity((top - low) as usize);
        for p in low..top {
            let s = self.digit_at(p).unwrap() as u64 + other.digit_at(p).unwrap() as u64 + carry;
            out.push((s % m) as u32);
            carry = s / m;
        }
        Ok(Self::normalized(self.base, low, out))
    }

    /// Additive inverse by digit complement.
    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Digits { valuation, digits } => {
                let m = self.base;
                let out = digits
                    .iter()
                    .enumerate()
                    .map(|(i, &d)| if i == 0 { m - d } else { m - 1 - d })
                    .collect();
                Self { base: m, repr: Repr::Digits { valuation: *valuation, digits: out } }
            }
            _ => self.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_base(other)?;
        let base = self.base;
        match (&self.repr, &other.repr) {
            (Repr::Zero, _) | (_, Repr::Zero) => Ok(Self { base, repr: Repr::Zero }),
            (Repr::ZeroTo(a), Repr::ZeroTo(b)) => Ok(Self { base, repr: Repr::ZeroTo(a + b) }),
            (Repr::ZeroTo(a), Repr::Digits { valuation, .. })
            | (Repr::Digits { valuation, .. }, Repr::ZeroTo(a)) => {
                Ok(Self { base, repr: Repr::ZeroTo(a + valuation) })
            }
            (
                Repr::Digits { valuation: vx, digits: dx },
                Repr::Digits { valuation: vy, digits: dy },
            ) => {
                let n = dx.len().min(dy.len());
                let m = base as u128;
                let mut out = Vec::with_capacity(n);
                let mut carry = 0u128;
                for k in 0..n {
                    let mut acc = carry;
                    for i in 0..=k {
                        acc += dx[i] as u128 * dy[k - i] as u128;
                    }
                    out.push((acc % m) as u32);
                    carry = acc / m;
                }
                Ok(Self::normalized(base, vx + vy, out))
            }
        }
    }

    /// Multiplicative inverse, defined when the leading digit is coprime to m.
    pub fn inverse(&self) -> Result<Self> {
        let (valuation, digits) = match &self.repr {
            Repr::Digits { valuation, digits } => (*valuation, digits),
            _ => return Err(Error::DivisionByZero),
        };
        let m = self.base as u64;
        let lead_inv = mod_inverse(digits[0] as u64, m).ok_or(Error::NotInvertible(self.base))?;
        let n = digits.len();
        // Digit-wise lifting: pick w_k so that digit k of u*w matches 1, 0, 0, ...
        let mut w = vec![0u32; n];
        for k in 0..n {
            let mut carry = 0u128;
            let mut digit_k = 0u64;
            for j in 0..=k {
                let mut acc = carry;
                for i in 0..=j {
                    acc += digits[i] as u128 * w[j - i] as u128;
                }
                if j == k {
                    digit_k = (acc % m as u128) as u64;
                }
                carry = acc / m as u128;
            }
            let target = u64::from(k == 0);
            let need = (target + m - digit_k) % m;
            w[k] = ((need * lead_inv) % m) as u32;
        }
        Ok(Self::normalized(self.base, -valuation, w))
    }

    /// `|x|_m = m^{-v}`, and 0 for zeros.
    pub fn pseudonorm(&self) -> f64 {
        match self.valuation() {
            Some(v) => (self.base as f64).powf(-(v as f64)),
            None => 0.0,
        }
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.pseudonorm())
    }

    /// `{x}`: the digits at negative positions, as an exact fraction.
    pub fn fractional_part(&self) -> Result<FractionalPart> {
        let low = match &self.repr {
            Repr::Zero => return Ok(FractionalPart::zero(self.base)),
            Repr::ZeroTo(a) => *a,
            Repr::Digits { valuation, .. } => *valuation,
        };
        if low >= 0 {
            return Ok(FractionalPart::zero(self.base));
        }
        let mut below = Vec::new();
        for p in low..0 {
            match self.digit_at(p) {
                Some(d) => below.push(d),
                None => return Err(Error::InsufficientPrecision { position: p }),
            }
        }
        below.reverse();
        Ok(FractionalPart::from_digits(self.base, below))
    }
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m as i128) as u64)
}

impl std::ops::Neg for &MadicNumber {
    type Output = MadicNumber;
    fn neg(self) -> MadicNumber {
        MadicNumber::neg(self)
    }
}

/// An element of `[0, 1)` with denominator a power of m, stored by its
/// base-m digits after the radix point (`digits[i]` is the coefficient of
/// `m^{-(i+1)}`, trailing zeros trimmed).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FractionalPart {
    base: u32,
    digits: Vec<u32>,
}

impl FractionalPart {
    pub fn zero(base: u32) -> Self {
        Self { base, digits: Vec::new() }
    }

    pub fn from_digits(base: u32, mut digits: Vec<u32>) -> Self {
        while digits.last() == Some(&0) {
            digits.pop();
        }
        Self { base, digits }
    }

    /// `numerator / m^exponent`, reduced modulo 1.
    pub fn from_ratio(base: u32, numerator: u64, exponent: u32) -> Self {
        let m = base as u64;
        let mut n = numerator;
        let mut digits = vec![0u32; exponent as usize];
        for slot in digits.iter_mut().rev() {
            *slot = (n % m) as u32;
            n /= m;
        }
        Self::from_digits(base, digits)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// `(numerator, m^j)` when both fit in 128 bits.
    pub fn as_ratio(&self) -> Option<(u128, u128)> {
        let m = self.base as u128;
        let mut num = 0u128;
        let mut den = 1u128;
        for &d in &self.digits {
            num = num.checked_mul(m)?.checked_add(d as u128)?;
            den = den.checked_mul(m)?;
        }
        Some((num, den))
    }

    pub fn to_f64(&self) -> f64 {
        let m = self.base as f64;
        self.digits.iter().rev().fold(0.0, |acc, &d| (acc + d as f64) / m)
    }

    /// Sum modulo 1.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.base != other.base {
            return Err(Error::BaseMismatch(self.base, other.base));
        }
        let len = self.digits.len().max(other.digits.len());
        let m = self.base;
        let mut out = vec![0u32; len];
        let mut carry = 0u32;
        for i in (0..len).rev() {
            let s = self.digits.get(i).copied().unwrap_or(0)
                + other.digits.get(i).copied().unwrap_or(0)
                + carry;
            out[i] = s % m;
            carry = s / m;
        }
        Ok(Self::from_digits(m, out))
    }
}

impl fmt::Display for FractionalPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_ratio() {
            Some((n, d)) => write!(f, "{n}/{d}"),
            None => write!(f, "{}", self.to_f64()),
        }
    }
}

/// A point on the unit circle `exp(2 pi i theta)` with `theta` kept exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnitComplex {
    angle: FractionalPart,
}

impl UnitComplex {
    pub fn one(base: u32) -> Self {
        Self { angle: FractionalPart::zero(base) }
    }

    pub fn from_angle(angle: FractionalPart) -> Self {
        Self { angle }
    }

    pub fn angle(&self) -> &FractionalPart {
        &self.angle
    }

    pub fn is_one(&self) -> bool {
        self.angle.is_zero()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Ok(Self { angle: self.angle.add(&other.angle)? })
    }

    pub fn to_complex(&self) -> num_complex::Complex64 {
        if self.angle.is_zero() {
            return num_complex::Complex64::new(1.0, 0.0);
        }
        let phase = std::f64::consts::TAU * self.angle.to_f64();
        num_complex::Complex64::new(phase.cos(), phase.sin())
    }
}

/// `chi_m(kx) = exp(2 pi i {kx})`.
pub fn character(k: &MadicNumber, x: &MadicNumber) -> Result<UnitComplex> {
    Ok(UnitComplex::from_angle(k.mul(x)?.fractional_part()?))
}

const DIGIT_CHARS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

impl fmt::Display for MadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.base;
        if m as usize > DIGIT_CHARS.len() {
            return write!(f, "{:?}", self);
        }
        match &self.repr {
            Repr::Zero => return write!(f, "0 (base {m})"),
            Repr::ZeroTo(a) => return write!(f, "O({m}^{a}) (base {m})"),
            Repr::Digits { .. } => {}
        }
        let v = self.valuation().unwrap();
        let top = self.absolute_precision().unwrap();
        let hi = (top - 1).max(0);
        let lo = v.min(0);
        let mut s = String::new();
        for p in (lo..=hi).rev() {
            if p == -1 {
                s.push('.');
            }
            s.push(match self.digit_at(p) {
                Some(d) => DIGIT_CHARS[d as usize] as char,
                None => '?',
            });
        }
        write!(f, "{s} (base {m})")
    }
}

impl FromStr for MadicNumber {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("{why}: {text:?}"));
        let text = text.trim();
        let open = text.rfind("(base ").ok_or_else(|| bad("missing \"(base m)\" suffix"))?;
        let base: u32 = text[open + 6..]
            .strip_suffix(')')
            .ok_or_else(|| bad("unterminated base suffix"))?
            .trim()
            .parse()
            .map_err(|_| bad("bad base"))?;
        check_base(base)?;
        if base as usize > DIGIT_CHARS.len() {
            return Err(bad("text form supports bases up to 36"));
        }
        let body = text[..open].trim();
        if body == "0" {
            return Self::zero(base);
        }
        if let Some(rest) = body.strip_prefix("O(") {
            let inner = rest.strip_suffix(')').ok_or_else(|| bad("bad O() term"))?;
            let (b, a) = inner.split_once('^').ok_or_else(|| bad("bad O() term"))?;
            if b.trim().parse::<u32>().ok() != Some(base) {
                return Err(bad("O() base differs from suffix"));
            }
            let a: i64 = a.trim().parse().map_err(|_| bad("bad O() exponent"))?;
            return Self::zero_to(base, a);
        }
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() {
            return Err(bad("empty integer part"));
        }
        // (position, digit or None for '?'), highest position first
        let mut cells = Vec::new();
        let n_int = int_part.len() as i64;
        for (i, c) in int_part.chars().enumerate() {
            cells.push((n_int - 1 - i as i64, c));
        }
        for (i, c) in frac_part.chars().enumerate() {
            cells.push((-1 - i as i64, c));
        }
        let mut known_started = false;
        let mut hi = None;
        let mut values = Vec::new();
        for (p, c) in cells {
            if c == '?' {
                if known_started {
                    return Err(bad("'?' after a known digit"));
                }
                continue;
            }
            let d = DIGIT_CHARS
                .iter()
                .position(|&x| x as char == c.to_ascii_lowercase())
                .filter(|&d| (d as u32) < base)
                .ok_or_else(|| bad("invalid digit"))? as u32;
            known_started = true;
            hi.get_or_insert(p);
            values.push(d);
        }
        let hi = hi.ok_or_else(|| bad("no digits"))?;
        values.reverse();
        let lo = hi + 1 - values.len() as i64;
        Self::from_digits(base, lo, values)
    }
}
