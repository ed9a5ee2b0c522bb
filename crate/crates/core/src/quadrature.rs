//! Globally adaptive Gauss-Kronrod (10/21 point) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_351_996,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
    /// Whether the requested tolerance was reached.
    pub converged: bool,
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    for j in 0..5 {
        let x = h * XGK[2 * j + 1];
        let pair = f(c - x) + f(c + x);
        gauss += WG[j] * pair;
        kronrod += WGK[2 * j + 1] * pair;
    }
    for j in 0..5 {
        let x = h * XGK[2 * j];
        kronrod += WGK[2 * j] * (f(c - x) + f(c + x));
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over `[a, b]`, bisecting the worst interval until the
/// summed error estimate drops below `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Quadrature {
    integrate_with_breaks(f, &[a, b], abs_tol, rel_tol)
}

/// As [`integrate`], with the initial partition given by `points`
/// (ascending, at least two).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Quadrature {
    const MAX_PIECES: usize = 4000;
    let mut heap = BinaryHeap::new();
    let (mut value, mut error) = (0.0, 0.0);
    for w in points.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = kronrod21(&f, w[0], w[1]);
        value += v;
        error += e;
        heap.push(Piece { a: w[0], b: w[1], value: v, error: e });
    }
    let mut pieces = heap.len();
    loop {
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Quadrature { value, error, converged: true };
        }
        if pieces >= MAX_PIECES {
            return Quadrature { value, error, converged: false };
        }
        let Some(worst) = heap.pop() else {
            return Quadrature { value, error, converged: true };
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine resolution
            heap.push(Piece { error: 0.0, ..worst });
            continue;
        }
        let (v1, e1) = kronrod21(&f, worst.a, mid);
        let (v2, e2) = kronrod21(&f, mid, worst.b);
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
        pieces += 1;
        // resum periodically to keep cancellation drift out of the totals
        if pieces % 64 == 0 {
            value = heap.iter().map(|p| p.value).sum();
            error = heap.iter().map(|p| p.error).sum();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x| x.powi(7) - 3.0 * x * x, -1.0, 2.0, 1e-14, 1e-14);
        let exact = (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0);
        assert!((q.value - exact).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        let q = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-12, 1e-12);
        assert!(q.converged);
        assert!((q.value - 2.0).abs() < 1e-9, "{}", q.value);
    }

    #[test]
    fn exponential_decay() {
        let q = integrate(|x: f64| (-x).exp(), 0.0, 50.0, 1e-15, 1e-14);
        assert!((q.value - (1.0 - (-50f64).exp())).abs() < 1e-13);
    }
}
