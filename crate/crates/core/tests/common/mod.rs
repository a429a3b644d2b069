//! Independent numerical oracles shared by the integration tests.

#![allow(clippy::excessive_precision)]
#![allow(dead_code)]

use swamp_core::model::{gen_gaussian_iid, gen_signal, measure, seeded_rng};
use swamp_core::{OutputChannel, PriorParams, ProblemInstance};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive Gauss-Kronrod quadrature of `f` over the partition
/// given by the sorted `breaks`: keeps bisecting the piece with the largest
/// error estimate until the total estimate is below `rel_tol * |I|` or
/// `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, breaks: &[f64], rel_tol: f64, abs_tol: f64) -> f64 {
    let mut parts: Vec<(f64, f64, (f64, f64))> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[0], w[1], gk15(&f, w[0], w[1])))
        .collect();
    for _ in 0..20_000 {
        let total: f64 = parts.iter().map(|p| p.2 .0).sum();
        let err: f64 = parts.iter().map(|p| p.2 .1).sum();
        if err <= rel_tol * total.abs() || err <= abs_tol {
            break;
        }
        let idx = (0..parts.len())
            .max_by(|&x, &y| parts[x].2 .1.total_cmp(&parts[y].2 .1))
            .unwrap();
        let (lo, hi, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        parts.push((lo, mid, gk15(&f, lo, mid)));
        parts.push((mid, hi, gk15(&f, mid, hi)));
    }
    parts.iter().map(|p| p.2 .0).sum()
}

/// Sorted breakpoints at `centre + k * scale` for a few multiples `k`.
pub fn breakpoints(centres: &[(f64, f64)]) -> Vec<f64> {
    let mut out = Vec::new();
    for &(c, s) in centres {
        for k in [-40.0, -16.0, -8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 40.0] {
            out.push(c + k * s);
        }
    }
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

fn normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    (-(x - mean) * (x - mean) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

/// Posterior mean and variance of a Bernoulli-Gaussian coefficient seen
/// through `N(r, sigma2)`, by quadrature of the slab plus the exact spike term.
pub fn prior_moments_by_quadrature(p: &PriorParams, sigma2: f64, r: f64) -> (f64, f64) {
    let br = breakpoints(&[(p.mean, p.var.sqrt()), (r, sigma2.sqrt())]);
    let weight = |x: f64| p.rho * normal_pdf(x, p.mean, p.var) * normal_pdf(x, r, sigma2);
    let z_slab = integrate(weight, &br, 1e-14, 0.0);
    let tol = 1e-14 * z_slab;
    let m1 = integrate(|x| x * weight(x), &br, 1e-14, tol);
    let m2 = integrate(|x| x * x * weight(x), &br, 1e-14, tol);
    let z = z_slab + (1.0 - p.rho) * normal_pdf(0.0, r, sigma2);
    let mean = m1 / z;
    (mean, m2 / z - mean * mean)
}

/// `(E[z | sign(z) = y] - omega) / v` for `z ~ N(omega, v)`, by quadrature in
/// standardized coordinates.
pub fn sign_gout_by_quadrature(y: f64, omega: f64, v: f64) -> f64 {
    let sd = v.sqrt();
    let s = if y < 0.0 { -1.0 } else { 1.0 };
    // u = s (z - omega) / sd is standard normal restricted to [c, inf) with
    // c = -s * omega / sd; all integrands below are kept sign-definite
    let c = -s * omega / sd;
    let (z, m1) = if c >= 0.0 {
        // weight rescaled by exp(c^2 / 2) so deep tails do not underflow
        let w = |u: f64| (-(u - c) * (u + c) / 2.0).exp();
        let br: Vec<f64> = breakpoints(&[(c, 1.0)]).into_iter().filter(|&u| u >= c).collect();
        (integrate(w, &br, 1e-14, 0.0), integrate(|u| u * w(u), &br, 1e-14, 0.0))
    } else {
        // the first moment over [c, inf) equals minus the one over (-inf, c]
        let w = |u: f64| (-u * u / 2.0).exp();
        let br: Vec<f64> = breakpoints(&[(c, 1.0)]).into_iter().filter(|&u| u <= c).collect();
        let tail = integrate(w, &br, 1e-14, 0.0);
        let z = (2.0 * std::f64::consts::PI).sqrt() - tail;
        (z, integrate(|u| -u * w(u), &br, 1e-14, 0.0))
    };
    s * (m1 / z) / sd
}

/// A zero-mean Gaussian instance with Bernoulli-Gaussian signal.
pub fn gaussian_instance(m: usize, n: usize, gamma: f64, rho: f64, delta: f64, seed: u64) -> ProblemInstance {
    let mut rng = seeded_rng(seed);
    let prior = PriorParams::new(rho, 0.0, 1.0).unwrap();
    let phi = gen_gaussian_iid(m, n, gamma, &mut rng).unwrap();
    let x = gen_signal(n, &prior, &mut rng).unwrap();
    let ch = OutputChannel::Awgn { delta };
    let y = measure(&phi, &x, &ch, &mut rng).unwrap();
    ProblemInstance::new(phi, y, Some(x), ch, prior).unwrap()
}
