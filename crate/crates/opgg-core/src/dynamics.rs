//! Replicator vector field, its derivatives, and the punishment threshold
//! that stabilizes full cooperation.

use crate::error::Result;
use crate::params::GameParams;
use crate::payoff::{check_control, helper_ab_prime_raw, helper_ab_raw, payoffs_raw};
use crate::state::SimplexState;

/// Replicator dynamics: each share grows at its payoff advantage over the
/// population average, `dw_i/dt = w_i (p_i - p_bar)`.
pub fn vector_field(w: &SimplexState, v: f64, params: &GameParams) -> Result<[f64; 3]> {
    check_control(v)?;
    params.validate()?;
    Ok(field_raw(w.to_array(), v, params))
}

/// [`vector_field`] evaluated at raw coordinates, skipping the simplex
/// membership check. The right side is polynomial in the coordinates, so
/// points a small distance off the simplex (Runge-Kutta stage values,
/// finite-difference probes) evaluate smoothly; the control and parameters
/// are still validated.
pub fn vector_field_at(w: [f64; 3], v: f64, params: &GameParams) -> Result<[f64; 3]> {
    check_control(v)?;
    params.validate()?;
    Ok(field_raw(w, v, params))
}

/// The vector field on raw coordinates, used by the integrator at RK stage
/// points that may sit a rounding error off the simplex.
pub(crate) fn field_raw(w: [f64; 3], v: f64, params: &GameParams) -> [f64; 3] {
    let (p_x, p_y, p_z, p_bar) = payoffs_raw(w, v, params);
    [
        w[0] * (p_x - p_bar),
        w[1] * (p_y - p_bar),
        w[2] * (p_z - p_bar),
    ]
}

/// Jacobian of the vector field in the three population coordinates,
/// treating them as independent; row `i`, column `k` is `df_i / dw_k`.
pub fn vector_field_jacobian(
    w: &SimplexState,
    v: f64,
    params: &GameParams,
) -> Result<[[f64; 3]; 3]> {
    check_control(v)?;
    params.validate()?;
    Ok(jacobian_raw(w.to_array(), v, params))
}

pub(crate) fn jacobian_raw(w: [f64; 3], v: f64, params: &GameParams) -> [[f64; 3]; 3] {
    let [x, y, z] = w;
    let GameParams { n, r, sigma } = *params;
    let (p_x, p_y, p_z, p_bar) = payoffs_raw(w, v, params);
    let (_, b) = helper_ab_raw(z, n);
    let (da, db) = helper_ab_prime_raw(z, n);
    // Derivative of z^(n-1), the probability of drawing only loners.
    let dz_alone = (n as f64 - 1.0) * z.powi(n as i32 - 2);

    let dp_x = [
        r * b,
        0.0,
        (sigma + 1.0 - r) * dz_alone + r * da + r * x * db,
    ];
    let dp_y = [
        (1.0 - v) * r * b,
        0.0,
        sigma * dz_alone + (1.0 - v) * r * x * db,
    ];
    let dp_z = [0.0, 0.0, 0.0];

    let p = [p_x, p_y, p_z];
    let dp = [dp_x, dp_y, dp_z];
    let mut dp_bar = [p_x, p_y, p_z];
    for k in 0..3 {
        dp_bar[k] += x * dp_x[k] + y * dp_y[k] + z * dp_z[k];
    }

    let mut jac = [[0.0; 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            let kronecker = if i == k { p[i] - p_bar } else { 0.0 };
            jac[i][k] = kronecker + w[i] * (dp[i][k] - dp_bar[k]);
        }
    }
    jac
}

/// Sensitivity of the vector field to the punishment fraction,
/// `df/dv = (r x^2 y b, -r x y b (1 - y), r x y z b)`.
///
/// The fine only moves money away from defectors, so the middle component
/// is computed as the exact negative of the other two rather than from its
/// own formula, keeping the vector tangent to the simplex to rounding.
pub fn control_sensitivity(w: &SimplexState, params: &GameParams) -> Result<[f64; 3]> {
    params.validate()?;
    Ok(control_sensitivity_raw(w.to_array(), params))
}

pub(crate) fn control_sensitivity_raw(w: [f64; 3], params: &GameParams) -> [f64; 3] {
    let [x, y, z] = w;
    let (_, b) = helper_ab_raw(z, params.n);
    let t = params.r * x * y * b;
    let fx = t * x;
    let fz = t * z;
    [fx, -(fx + fz), fz]
}

/// Smallest constant punishment fraction that makes the full-cooperation
/// vertex an attractor.
///
/// At `x = 1` a would-be defector earns `(1 - v) r (n-1) / n` against the
/// cooperator's `r - 1`; requiring the defector to do worse and solving for
/// `v` gives `v_c = 1 - n (r - 1) / (r (n - 1))`, evaluated here in the
/// cancellation-free form `(n - r) / (r (n - 1))`. The result is clamped to
/// `[0, 1]`, although it is interior for every valid parameter set.
pub fn critical_punishment(params: &GameParams) -> f64 {
    let n = params.n as f64;
    let v_c = (n - params.r) / (params.r * (n - 1.0));
    v_c.clamp(0.0, 1.0)
}
