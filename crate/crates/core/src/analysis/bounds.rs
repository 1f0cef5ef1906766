use crate::filter::FilterParams;
#[allow(unused_imports)]
use num_traits::Float;

/// Constants entering the error bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    /// `‖Q u‖ ≤ C0 γ⁻¹ ‖u‖_𝕎`; `1/T` for the diagonal filter.
    pub c0: f64,
    /// `1/2 + 2 L_F²`
    pub c2: f64,
}

impl BoundConstants {
    pub fn new(params: &FilterParams, l_f: f64) -> Self {
        BoundConstants {
            c0: 1.0 / params.horizon,
            c2: 0.5 + 2.0 * l_f * l_f,
        }
    }
}

/// `γ^{-C1 t} (K + √(2T) C0 γ^{C1T - 1} ‖u‖_𝕎) e^{T C}` with `C` the growth
/// constant; shared by the bounds below.
fn core_bound(t: f64, params: &FilterParams, gevrey_u: f64, c0: f64, growth: f64) -> f64 {
    let p = params;
    let lg = p.log_gamma;
    let lead = (-p.c1 * t * lg).exp();
    let smooth = (2.0 * p.horizon).sqrt() * c0 * ((p.c1 * p.horizon - 1.0) * lg).exp() * gevrey_u;
    lead * (p.k + smooth) * (p.horizon * growth).exp()
}

/// `L²` error bound at `0 < t ≤ T` for a globally Lipschitz source with
/// constant `l_f`, where `gevrey_u = sup_t ‖u(t)‖_𝕎` of the exact solution.
pub fn error_bound(t: f64, params: &FilterParams, gevrey_u: f64, l_f: f64) -> f64 {
    let c = BoundConstants::new(params, l_f);
    core_bound(t, params, gevrey_u, c.c0, c.c2)
}

/// Bound on `‖u^ε(t^ε) - u(0)‖`: the bound at `t^ε` plus the drift
/// `t^ε sup_t ‖u_t‖` of the exact solution.
pub fn tstar_error_bound(
    t_eps: f64,
    params: &FilterParams,
    gevrey_u: f64,
    l_f: f64,
    ut_sup: f64,
) -> f64 {
    error_bound(t_eps, params, gevrey_u, l_f) + t_eps * ut_sup
}

/// Bound for a cut-off source chosen by the schedule: the growth constant
/// becomes `(M̲ + 1)/4` and the price is a factor `log^κ γ`.
pub fn cutoff_error_bound(
    t: f64,
    params: &FilterParams,
    gevrey_u: f64,
    kappa: f64,
    m_lower: f64,
) -> f64 {
    let c0 = 1.0 / params.horizon;
    let c3 = (m_lower + 1.0) / 4.0;
    params.log_gamma.powf(kappa) * core_bound(t, params, gevrey_u, c0, c3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminal_time_reduces_to_noise_level() {
        let p = FilterParams::from_epsilon(1e-3, 1.0, 1.0, 1.0, 1.0).unwrap();
        // at t = T the leading term is ε e^{T C2}
        let b = error_bound(1.0, &p, 0.0, 0.0);
        assert!((b - 1e-3 * 0.5f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn midpoint_value_independent_formula() {
        let p = FilterParams::from_epsilon(1e-3, 1.0, 1.0, 1.0, 1.0).unwrap();
        let gamma: f64 = 1000.0;
        let expect =
            gamma.powf(-0.5) * (1.0 + 2.0f64.sqrt() * 1.0 * gamma.powf(0.0) * 1.0) * 0.5f64.exp();
        let got = error_bound(0.5, &p, 1.0, 0.0);
        assert!((got - expect).abs() < 1e-12 * expect);
        // L_F = 1 raises C2 to 5/2
        let got = error_bound(0.5, &p, 1.0, 1.0);
        assert!((got / expect - 2.0f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn tstar_and_cutoff_variants() {
        let p = FilterParams::from_epsilon(1e-4, 1.0, 1.0, 1.0, 1.0).unwrap();
        let base = error_bound(0.2, &p, 2.0, 0.0);
        assert!((tstar_error_bound(0.2, &p, 2.0, 0.0, 3.0) - base - 0.6).abs() < 1e-14);
        let c = cutoff_error_bound(0.2, &p, 2.0, 0.5, 1.0);
        let expect = p.log_gamma.sqrt() * base;
        assert!((c - expect).abs() < 1e-12 * expect);
    }
}
