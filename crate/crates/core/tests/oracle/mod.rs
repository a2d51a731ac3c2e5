//! Brute-force reference values for the graphene tensor.
//!
//! Everything here is deliberately naive: fixed-grid composite Gauss-Legendre on
//! the `u`-integrals as they are usually written (Fermi weight
//! `1/(e^{βu}+1)`, `β = ħc/k_BT`), with square-root edges removed by
//! `2cu − ω = v_F k sinθ` inside the band and `2cu − ω = ∓v_F k cosh t`
//! outside it. No adaptivity, no shared code with the library.

#![allow(dead_code)]

use num_complex::Complex64;

pub const C: f64 = 299_792_458.0;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const KB: f64 = 1.380_649e-23;
pub const ALPHA: f64 = 7.297_352_569_3e-3;
pub const VF: f64 = C / 300.0;

/// Panels per piece; three Gauss-Legendre nodes each, so the endpoints
/// (where some integrands are `0 · ∞` before substitution) are never sampled.
pub const PANELS: usize = 100_000;

pub fn gauss<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    const X: f64 = 0.774_596_669_241_483_4;
    const W0: f64 = 8.0 / 9.0;
    const W1: f64 = 5.0 / 9.0;
    let h = (b - a) / n as f64;
    let mut s = 0.0;
    for i in 0..n {
        let m = a + (i as f64 + 0.5) * h;
        let d = 0.5 * h * X;
        s += W0 * f(m) + W1 * (f(m - d) + f(m + d));
    }
    s * 0.5 * h
}

fn gauss_c<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, n: usize) -> Complex64 {
    let re = gauss(|x| f(x).re, a, b, n);
    let im = gauss(|x| f(x).im, a, b, n);
    Complex64::new(re, im)
}

fn fermi(x: f64) -> f64 {
    1.0 / (x.exp() + 1.0)
}

/// Thermal corrections `(Π₀₀⁽¹⁾, Π⁽¹⁾)` for `v_F k < ω`.
pub fn plasmonic_thermal(omega: f64, k: f64, t: f64) -> (Complex64, Complex64) {
    let v = VF * k;
    let cp = (omega * omega - v * v).sqrt();
    let p = cp / C;
    let beta = HBAR * C / (KB * t);
    let b1 = |x: f64| (x * x - v * v).sqrt();
    let b2 = |x: f64| x * x / (x * x - v * v).sqrt();
    let wt = |y: f64| fermi(beta * (y + omega) / (2.0 * C));

    // [0, u⁻]: y = −v cosh t, du = v sinh t dt / 2c.
    let t1 = (omega / v).acosh();
    let i1 = 2.0
        * gauss(
            |t| {
                let (y, sh) = (-v * t.cosh(), v * t.sinh());
                wt(y) * (sh - (b1(y + 2.0 * omega) * sh + sh * sh) / (2.0 * cp)) / (2.0 * C)
            },
            0.0,
            t1,
            PANELS,
        );
    let j1 = 2.0
        * gauss(
            |t| {
                let (y, sh) = (-v * t.cosh(), v * t.sinh());
                wt(y) * (sh - cp / (2.0 * omega * omega) * (b2(y + 2.0 * omega) * sh + y * y)) / (2.0 * C)
            },
            0.0,
            t1,
            PANELS,
        );

    // [u⁻, u⁺]: y = v sinθ, du = v cosθ dθ / 2c.
    let h = std::f64::consts::FRAC_PI_2;
    let i2 = 2.0
        * gauss(
            |th| {
                let (y, cs) = (v * th.sin(), v * th.cos());
                wt(y) * cs * (1.0 - b1(y + 2.0 * omega) / (2.0 * cp)) / (2.0 * C)
            },
            -h,
            h,
            PANELS,
        );
    let j2 = 2.0
        * gauss(
            |th| {
                let (y, cs) = (v * th.sin(), v * th.cos());
                wt(y) * cs * (1.0 - cp / (2.0 * omega * omega) * b2(y + 2.0 * omega)) / (2.0 * C)
            },
            -h,
            h,
            PANELS,
        );
    let im00 = gauss(
        |th| {
            let (y, cs) = (v * th.sin(), v * th.cos());
            wt(y) * cs * cs / (2.0 * C)
        },
        -h,
        h,
        PANELS,
    );
    let impi = gauss(
        |th| {
            let y = v * th.sin();
            wt(y) * y * y / (2.0 * C)
        },
        -h,
        h,
        PANELS,
    );

    // [u⁺, ∞): y = v cosh t, cut where the weight is below 1e-18.
    let y_max = 2.0 * C * 42.0 / beta - omega;
    let (i3, j3) = if y_max > v {
        let t3 = (y_max / v).acosh();
        let i3 = 2.0
            * gauss(
                |t| {
                    let (y, sh) = (v * t.cosh(), v * t.sinh());
                    wt(y) * (sh - (b1(y + 2.0 * omega) * sh - sh * sh) / (2.0 * cp)) / (2.0 * C)
                },
                0.0,
                t3,
                PANELS,
            );
        let j3 = 2.0
            * gauss(
                |t| {
                    let (y, sh) = (v * t.cosh(), v * t.sinh());
                    wt(y) * (sh - cp / (2.0 * omega * omega) * (b2(y + 2.0 * omega) * sh - y * y)) / (2.0 * C)
                },
                0.0,
                t3,
                PANELS,
            );
        (i3, j3)
    } else {
        (0.0, 0.0)
    };

    let pre = 8.0 * ALPHA * HBAR / (VF * VF);
    let pi00 = Complex64::new(pre * C * C * (i1 + i2 + i3), -pre * C / p * im00);
    let pi = Complex64::new(pre * omega * omega * (j1 + j2 + j3), pre * C * p * impi);
    (pi00, pi)
}

/// `S_λ` on the real axis, continued past its zero as `−iλ sqrt(|·|)`.
fn s_lambda(radicand: f64, lambda: f64) -> Complex64 {
    if radicand >= 0.0 {
        Complex64::new(radicand.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, -lambda * (-radicand).sqrt())
    }
}

/// Thermal corrections for `v_F k > ω` (real `ω ≥ 0`).
pub fn far_thermal(omega: f64, k: f64, t: f64) -> (Complex64, Complex64) {
    let cpt = ((VF * k).powi(2) - omega * omega).sqrt();
    let pt = cpt / C;
    let d = HBAR * cpt / (2.0 * KB * t);
    let g = omega / cpt;
    let vp = 1.0 / ((1.0 + g * g).sqrt() + g);
    let vm = (1.0 + g * g).sqrt() + g;
    let integrand = |v: f64| -> (Complex64, Complex64) {
        let f = fermi(d * v);
        let mut s00 = Complex64::new(0.0, 0.0);
        let mut spi = Complex64::new(0.0, 0.0);
        for lambda in [1.0, -1.0] {
            let s = s_lambda(1.0 - v * v - 2.0 * lambda * g * v, lambda);
            s00 += s;
            spi += (cpt * v + lambda * omega).powi(2) / s;
        }
        ((Complex64::new(1.0, 0.0) - s00 * 0.5) * f, (Complex64::new(omega * omega, 0.0) - spi * 0.5) * f)
    };
    let v_max = 42.0 / d;
    let mut a00 = Complex64::new(0.0, 0.0);
    let mut api = Complex64::new(0.0, 0.0);
    let mut add = |w: &dyn Fn(f64) -> (f64, f64), a: f64, b: f64| {
        a00 += gauss_c(|s| integrand(w(s).0).0 * w(s).1, a, b, PANELS);
        api += gauss_c(|s| integrand(w(s).0).1 * w(s).1, a, b, PANELS);
    };
    // [0, v₊]: v = v₊(1 − s²).
    add(&|s| (vp * (1.0 - s * s), 2.0 * vp * s), 0.0, 1.0);
    // [v₊, v₋]: v = mid + half sinθ.
    if vm > vp {
        let (mid, half) = (0.5 * (vm + vp), 0.5 * (vm - vp));
        add(
            &|th: f64| (mid + half * th.sin(), half * th.cos()),
            -std::f64::consts::FRAC_PI_2,
            std::f64::consts::FRAC_PI_2,
        );
    }
    // [v₋, v_max]: v = v₋ + s².
    if v_max > vm {
        add(&|s| (vm + s * s, 2.0 * s), 0.0, (v_max - vm).sqrt());
    }
    let pre = 8.0 * ALPHA * HBAR / (VF * VF);
    (a00 * (pre * C * C * pt), api * (pre * pt))
}

/// Full tensor at `ω = iξ`, as a complex pair so the caller can inspect the
/// imaginary residue.
pub fn imaginary_axis(xi: f64, k: f64, t: f64) -> (Complex64, Complex64) {
    let cpt = ((VF * k).powi(2) + xi * xi).sqrt();
    let pt = cpt / C;
    let zero00 = std::f64::consts::PI * ALPHA * HBAR * k * k / pt;
    let zeropi = std::f64::consts::PI * ALPHA * HBAR * k * k * pt;
    if t == 0.0 {
        return (Complex64::new(zero00, 0.0), Complex64::new(zeropi, 0.0));
    }
    let d = HBAR * cpt / (2.0 * KB * t);
    let w = Complex64::new(0.0, xi);
    let integrand = |v: f64| -> (Complex64, Complex64) {
        let f = fermi(d * v);
        let mut s00 = Complex64::new(0.0, 0.0);
        let mut spi = Complex64::new(0.0, 0.0);
        for lambda in [1.0, -1.0] {
            let s = (Complex64::new(1.0 - v * v, 0.0) - w * (2.0 * lambda * v / cpt)).sqrt();
            s00 += s;
            let num = Complex64::new(cpt * v, 0.0) + w * lambda;
            spi += num * num / s;
        }
        ((Complex64::new(1.0, 0.0) - s00 * 0.5) * f, (w * w - spi * 0.5) * f)
    };
    let v_max = 42.0 / d;
    let mut a00 = Complex64::new(0.0, 0.0);
    let mut api = Complex64::new(0.0, 0.0);
    // [0, 1]: v = 1 − s²; [1, v_max]: v = 1 + s².
    a00 += gauss_c(|s| integrand(1.0 - s * s).0 * (2.0 * s), 0.0, 1.0, PANELS);
    api += gauss_c(|s| integrand(1.0 - s * s).1 * (2.0 * s), 0.0, 1.0, PANELS);
    if v_max > 1.0 {
        let smax = (v_max - 1.0).sqrt();
        a00 += gauss_c(|s| integrand(1.0 + s * s).0 * (2.0 * s), 0.0, smax, PANELS);
        api += gauss_c(|s| integrand(1.0 + s * s).1 * (2.0 * s), 0.0, smax, PANELS);
    }
    let pre = 8.0 * ALPHA * HBAR / (VF * VF);
    let pi00 = a00 * (pre * C * C * pt) + zero00;
    if xi == 0.0 {
        // The vacuum term equals ∫₀¹ ½ v²/sqrt(1 − v²) dv in these units;
        // merging it pointwise avoids a large cancellation at high T.
        let merged = gauss(
            |s| {
                let v = 1.0 - s * s;
                v * v / (s * (2.0 - s * s).sqrt()) * (0.5 - fermi(d * v)) * 2.0 * s
            },
            0.0,
            1.0,
            PANELS,
        );
        let pi = pre * C * C * pt * pt * pt * merged;
        return (pi00, Complex64::new(pi, 0.0));
    }
    (pi00, api * (pre * pt) + zeropi)
}
