use crate::McError;
use illiquid_core::math::{adaptive_gauss_kronrod, norm_cdf};
use std::f64::consts::PI;

/// Joint density of the first time θ at which a Brownian motion with drift
/// `c` attains its maximum over [0, T], and the value y of that maximum.
pub fn shepp_density(theta: f64, y: f64, c: f64, horizon: f64) -> Result<f64, McError> {
    if !(theta > 0.0 && theta < horizon) {
        return Err(McError::Domain(format!("theta {theta} outside (0, {horizon})")));
    }
    if !(y > 0.0) {
        return Err(McError::Domain(format!("maximum must be > 0, got {y}")));
    }
    let rest = horizon - theta;
    let lead = y / (PI * rest.sqrt() * theta.powf(1.5));
    let expo = (-0.5 * c * c * horizon - y * y / (2.0 * theta) + c * y).exp();
    let tail = 1.0 - (2.0 * PI * rest).sqrt() * c * (0.5 * c * c * rest).exp() * norm_cdf(-c * rest.sqrt());
    Ok(lead * expo * tail)
}

/// ∫∫ p(θ, y; c, T) g(θ, y) over θ ∈ (θ_lo, θ_hi), y ∈ (y_lo, y_hi) with
/// θ = T sin²u and y = sqrt(θ) s, which removes both endpoint singularities.
/// `growth` bounds the exponential rate of `g` in y and widens the y range.
pub fn shepp_integral<G: Fn(f64, f64) -> f64>(
    c: f64,
    horizon: f64,
    theta: (f64, f64),
    y: (f64, f64),
    growth: f64,
    g: G,
) -> Result<f64, McError> {
    if !(horizon > 0.0) {
        return Err(McError::Domain(format!("horizon must be > 0, got {horizon}")));
    }
    let u_of = |t: f64| (t / horizon).sqrt().clamp(0.0, 1.0).asin();
    let s_cap = 12.0 + 2.0 * (c.abs() + growth) * horizon.sqrt();
    let outer = |u: f64| {
        let (su, cu) = u.sin_cos();
        let th = horizon * su * su;
        if th <= 0.0 || th >= horizon {
            return 0.0;
        }
        let r = th.sqrt();
        let s_lo = y.0 / r;
        let s_hi = (y.1 / r).min(s_cap);
        if s_hi <= s_lo {
            return 0.0;
        }
        // an unconverged inner integral surfaces as NaN in the outer one
        let inner = adaptive_gauss_kronrod(
            |s| {
                let yy = r * s;
                if yy <= 0.0 {
                    0.0
                } else {
                    shepp_density(th, yy, c, horizon).unwrap_or(f64::NAN) * r * g(th, yy)
                }
            },
            s_lo,
            s_hi,
            1e-13,
            2000,
        )
        .unwrap_or(f64::NAN);
        inner * 2.0 * horizon * su * cu
    };
    let v = adaptive_gauss_kronrod(outer, u_of(theta.0), u_of(theta.1), 1e-11, 2000)
        .map_err(|e| McError::Domain(e.to_string()))?;
    if v.is_nan() {
        return Err(McError::Domain("inner quadrature did not converge".into()));
    }
    Ok(v)
}
