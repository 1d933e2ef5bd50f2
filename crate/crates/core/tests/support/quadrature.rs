//! Adaptive Gauss–Kronrod (7/15) quadrature used as an independent oracle
//! for the exponential integral.

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
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * h, (kronrod - gauss).abs() * h)
}

fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (value, err) = gk15(f, a, b);
    if err <= tol || depth == 0 {
        return value;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, tol / 2.0, depth - 1) + adapt(f, m, b, tol / 2.0, depth - 1)
}

/// `∫_a^b f` to roughly `rel_tol` relative accuracy.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let panels = 32;
    let width = (b - a) / panels as f64;
    let rough: f64 = (0..panels)
        .map(|i| gk15(f, a + i as f64 * width, a + (i + 1) as f64 * width).0)
        .sum();
    let tol = rel_tol * rough.abs() / panels as f64;
    (0..panels)
        .map(|i| adapt(f, a + i as f64 * width, a + (i + 1) as f64 * width, tol, 40))
        .sum()
}

/// `e^x E1(x) = ∫_0^∞ e^{-u}/(x+u) du`, integrated in `s = ln u`.
pub fn scaled_e1_quadrature(x: f64) -> f64 {
    let f = move |s: f64| {
        let u = s.exp();
        (-u).exp() * u / (x + u)
    };
    let lo = x.ln().min(0.0) - 40.0;
    let hi = 760f64.ln();
    integrate(&f, lo, hi, 1e-14)
}

/// `E1(x)` by quadrature.
pub fn e1_quadrature(x: f64) -> f64 {
    (-x).exp() * scaled_e1_quadrature(x)
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
