//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 48;

#[derive(Debug, Clone, Copy)]
pub(crate) struct QuadResult {
    pub value: f64,
    pub error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> QuadResult {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    QuadResult {
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]` to an absolute tolerance `abs_tol`,
/// bisecting intervals whose Gauss/Kronrod disagreement is too large.
pub(crate) fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            error: 0.0,
        };
    }
    let mut total = QuadResult {
        value: 0.0,
        error: 0.0,
    };
    let mut stack = vec![(a, b, gk15(f, a, b), 0u32, abs_tol)];
    while let Some((lo, hi, est, depth, tol)) = stack.pop() {
        if est.error <= tol || depth >= MAX_DEPTH || (hi - lo).abs() <= f64::EPSILON * lo.abs().max(1.0) {
            total.value += est.value;
            total.error += est.error;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        stack.push((lo, mid, gk15(f, lo, mid), depth + 1, 0.5 * tol));
        stack.push((mid, hi, gk15(f, mid, hi), depth + 1, 0.5 * tol));
    }
    total
}

/// Integrates over `[a, b]` with `0 <= a < b`, splitting the range into
/// geometric blocks `[a_i, 2 a_i]` so that very long ranges stay accurate.
pub(crate) fn integrate_geometric<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> f64 {
    debug_assert!(a <= b);
    let mut value = 0.0;
    let mut lo = a;
    if lo < 1.0 {
        let hi = b.min(1.0);
        value += integrate(f, lo, hi, abs_tol * 0.5).value;
        lo = hi;
    }
    let blocks = ((b / lo).log2().ceil().max(1.0)) as usize;
    let per_block = abs_tol * 0.5 / blocks as f64;
    while lo < b {
        let hi = (2.0 * lo).min(b);
        value += integrate(f, lo, hi, per_block).value;
        lo = hi;
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(&|x: f64| 3.0 * x * x, 0.0, 2.0, 1e-12);
        assert!((r.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn peaked_integrand_needs_subdivision() {
        let r = integrate(&|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-10);
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((r.value - exact).abs() < 1e-7, "{} vs {}", r.value, exact);
    }

    #[test]
    fn geometric_blocks_cover_long_ranges() {
        let v = integrate_geometric(&|t: f64| 1.0 / (t * t), 1.0, 1e9, 1e-13);
        assert!((v - (1.0 - 1e-9)).abs() < 1e-11);
    }
}
