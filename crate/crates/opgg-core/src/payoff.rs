//! Expected payoffs of the three strategies under graduated punishment.
//!
//! Groups of `n` players are sampled from an infinite well-mixed population.
//! Participants share a pool multiplied by `r`; defectors keep their
//! endowment but are fined a fraction `v` of their gross gain; loners take
//! the fixed payoff `sigma`. Averaging the group payoff rules over the
//! multinomial distribution of co-players gives closed forms in the loner
//! share `z`, which this module evaluates as explicit polynomial sums so
//! that nothing degenerates at `z = 1`. A literal group-enumeration average
//! is provided as an independent cross-check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::GameParams;
use crate::state::SimplexState;

/// Largest group size the brute-force enumeration accepts.
pub const ENUMERATION_CAP: u32 = 20;

/// What the focal player does.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    Cooperator,
    Defector,
    Loner,
}

/// Expected payoffs of the three strategies and their population average.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PayoffVector {
    /// Expected payoff of a cooperator.
    pub p_x: f64,
    /// Expected payoff of a defector, net of the fine.
    pub p_y: f64,
    /// Payoff of a loner, always `sigma`.
    pub p_z: f64,
    /// Population average `x p_x + y p_y + z p_z`.
    pub p_bar: f64,
}

/// Evaluates the two averaging kernels
///
/// ```text
/// a(z) = (1/n) * sum_{k=0}^{n-1} z^k
/// b(z) = (1/n) * sum_{k=0}^{n-2} (n-1-k) z^k
/// ```
///
/// that express expected shares of the pool in terms of the loner fraction.
/// The sums are evaluated directly rather than through the equivalent
/// `(1 - z^n) / (n (1 - z))` quotients, which are 0/0 at `z = 1`.
pub fn helper_ab(z: f64, n: u32) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::ControlOutOfRange {
            value: z,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(helper_ab_raw(z, n))
}

/// Polynomial sums behind [`helper_ab`], without the domain check. The
/// integrator evaluates these at intermediate stage states that may sit a
/// rounding error outside the simplex, where the polynomials extend smoothly.
pub(crate) fn helper_ab_raw(z: f64, n: u32) -> (f64, f64) {
    let n_usize = n as usize;
    let mut a = 0.0;
    let mut b = 0.0;
    let mut zk = 1.0;
    for k in 0..n_usize {
        a += zk;
        if k + 2 <= n_usize {
            b += (n_usize - 1 - k) as f64 * zk;
        }
        zk *= z;
    }
    (a / n as f64, b / n as f64)
}

/// Derivatives of the averaging kernels with respect to `z`, again as plain
/// polynomial sums.
pub(crate) fn helper_ab_prime_raw(z: f64, n: u32) -> (f64, f64) {
    let n_usize = n as usize;
    let mut da = 0.0;
    let mut db = 0.0;
    let mut zk = 1.0;
    for k in 1..n_usize {
        da += k as f64 * zk;
        if k + 2 <= n_usize {
            db += ((n_usize - 1 - k) * k) as f64 * zk;
        }
        zk *= z;
    }
    (da / n as f64, db / n as f64)
}

/// Closed-form payoffs without input validation, on raw coordinates.
pub(crate) fn payoffs_raw(w: [f64; 3], v: f64, params: &GameParams) -> (f64, f64, f64, f64) {
    let [x, y, z] = w;
    let GameParams { n, r, sigma } = *params;
    let (a, b) = helper_ab_raw(z, n);
    let z_alone = z.powi(n as i32 - 1);

    // With probability z^(n-1) all co-players are loners and the focal
    // participant pockets sigma instead of playing. Otherwise a cooperator
    // earns the expected pool share r(a + x b) minus the unit contribution,
    // corrected by (1 - r) z^(n-1) for the no-game branch folded into a and
    // b; a defector earns the share fed by cooperating co-players, scaled
    // down by the retained fraction (1 - v).
    let p_x = sigma * z_alone + r * a + r * x * b + (1.0 - r) * z_alone - 1.0;
    let p_y = sigma * z_alone + (1.0 - v) * r * x * b;
    let p_z = sigma;
    let p_bar = x * p_x + y * p_y + z * p_z;
    (p_x, p_y, p_z, p_bar)
}

/// Expected payoffs of all strategies at population state `w` under
/// punishment fraction `v`.
pub fn expected_payoffs(w: &SimplexState, v: f64, params: &GameParams) -> Result<PayoffVector> {
    check_control(v)?;
    let (p_x, p_y, p_z, p_bar) = payoffs_raw(w.to_array(), v, params);
    Ok(PayoffVector {
        p_x,
        p_y,
        p_z,
        p_bar,
    })
}

pub(crate) fn check_control(v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::ControlOutOfRange {
            value: v,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}

/// Payoff of the focal player in one concrete group.
///
/// `n_c` and `n_d` count cooperators and defectors among all `n` sampled
/// players, the focal player included; the remaining `n - n_c - n_d` are
/// loners. A group with at most one participant does not play and everyone
/// in it receives `sigma`. Otherwise the pool `r * n_c` is split among the
/// `s = n_c + n_d` participants, cooperators pay their unit contribution,
/// and defectors keep only `(1 - v)` of their gross share.
pub fn group_payoff(
    strategy: Strategy,
    n_c: u32,
    n_d: u32,
    v: f64,
    params: &GameParams,
) -> Result<f64> {
    check_control(v)?;
    let n = params.n;
    if n_c + n_d > n {
        return Err(Error::InvalidComposition(format!(
            "{n_c} cooperators + {n_d} defectors exceed the group size {n}"
        )));
    }
    let counted = match strategy {
        Strategy::Cooperator => n_c >= 1,
        Strategy::Defector => n_d >= 1,
        Strategy::Loner => n_c + n_d < n,
    };
    if !counted {
        return Err(Error::InvalidComposition(format!(
            "focal {strategy:?} is not part of the composition ({n_c}, {n_d}) of {n}"
        )));
    }

    let s = n_c + n_d;
    let payoff = match strategy {
        Strategy::Loner => params.sigma,
        _ if s <= 1 => params.sigma,
        Strategy::Cooperator => params.r * n_c as f64 / s as f64 - 1.0,
        Strategy::Defector => (1.0 - v) * params.r * n_c as f64 / s as f64,
    };
    Ok(payoff)
}

/// Expected payoff by literal enumeration of all co-player compositions,
/// weighted by their multinomial probabilities. Exponentially slower than
/// the closed form and capped at [`ENUMERATION_CAP`] players, but free of
/// the algebra that produced [`expected_payoffs`]; the two must agree to
/// near machine precision.
pub fn expected_payoff_bruteforce(
    w: &SimplexState,
    v: f64,
    params: &GameParams,
    strategy: Strategy,
) -> Result<f64> {
    check_control(v)?;
    w.validate()?;
    params.validate()?;
    let n = params.n;
    if n > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            n,
            cap: ENUMERATION_CAP,
        });
    }

    let others = n - 1;
    let mut total = 0.0;
    for c in 0..=others {
        for d in 0..=(others - c) {
            let l = others - c - d;
            let weight = multinomial(others, c, d)
                * pow_count(w.x, c)
                * pow_count(w.y, d)
                * pow_count(w.z, l);
            if weight == 0.0 {
                continue;
            }
            let (n_c, n_d) = match strategy {
                Strategy::Cooperator => (c + 1, d),
                Strategy::Defector => (c, d + 1),
                Strategy::Loner => (c, d),
            };
            total += weight * group_payoff(strategy, n_c, n_d, v, params)?;
        }
    }
    Ok(total)
}

/// `p^k` with the convention `0^0 = 1`, so absent strategies do not wipe
/// out the weight of compositions that never sample them.
fn pow_count(p: f64, k: u32) -> f64 {
    if k == 0 {
        1.0
    } else {
        p.powi(k as i32)
    }
}

/// Multinomial coefficient `m! / (c! d! (m-c-d)!)` as an exactly
/// representable float; group sizes are capped well below factorial
/// overflow.
fn multinomial(m: u32, c: u32, d: u32) -> f64 {
    let l = m - c - d;
    (factorial(m) / (factorial(c) * factorial(d) * factorial(l))) as f64
}

fn factorial(k: u32) -> u128 {
    (1..=k as u128).product()
}
