#[allow(unused_imports)]
use num_traits::Float;

/// Largest exponent accepted in exponential weights before reporting a range error.
pub(crate) const EXP_LIMIT: f64 = 700.0;

/// `log(1 + e^x)` without overflow.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 36.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `(e^z - 1) / z`
pub(crate) fn phi1(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        z.exp_m1() / z
    }
}

/// `(e^z - 1 - z) / z^2`
pub(crate) fn phi2(z: f64) -> f64 {
    if z.abs() < 1e-2 {
        // 1/2 + z/6 + z^2/24 + z^3/120 + z^4/720
        0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z * (1.0 / 120.0 + z / 720.0)))
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

/// `sqrt(Σ x_i^2)` with scaling so that large entries do not overflow the squares.
pub(crate) fn norm2(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let scale = xs.clone().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let s: f64 = xs.map(|x| (x / scale) * (x / scale)).sum();
    scale * s.sqrt()
}

pub(crate) fn steps_for(horizon: f64, dt: f64) -> Option<usize> {
    if !(dt > 0.0) || !(horizon > 0.0) {
        return None;
    }
    let n = (horizon / dt).round();
    if !(1.0..=1e9).contains(&n) {
        return None;
    }
    if ((n * dt) - horizon).abs() > 1e-9 * horizon {
        return None;
    }
    Some(n as usize)
}
