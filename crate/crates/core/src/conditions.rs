//! Mean-field condition statistics built from the non-backtracking return
//! profile, plus the closed-form bounds used to check them on expander and
//! Hamming families without running the walk.
//!
//! Both statistics need the percolation parameters to sit in their intended
//! regime: the window statistic is scaled for p near 1/(d-1), the
//! supercritical one for p = (1+eps)/(d-1) with eps in (0, 1/2).

use crate::graph::Graph;
use crate::nbrw::average_return_profile;
use crate::{Error, Result};

/// floor(n^{1/3}) computed exactly: round the floating cube root, then nudge.
pub fn integer_cube_root(n: u64) -> u64 {
    let mut r = (n as f64).cbrt().round() as u64;
    while r > 0 && (r as u128).pow(3) > n as u128 {
        r -= 1;
    }
    while ((r + 1) as u128).pow(3) <= n as u128 {
        r += 1;
    }
    r
}

/// Window statistic n^{1/3} * sum_{t=1}^{floor(n^{1/3})} t R[t], where R is
/// the (vertex-averaged) non-backtracking return profile. Requires a regular
/// graph of degree at least 3. Values below 1 indicate the walk loses memory
/// fast enough for the critical window to have the mean-field shape.
pub fn window_condition_statistic(g: &Graph) -> Result<f64> {
    g.require_regular(3)?;
    let n = g.n() as u64;
    let horizon = integer_cube_root(n) as usize;
    let profile = average_return_profile(g, horizon.max(1))?;
    let mut sum = 0.0;
    for t in 1..=horizon {
        sum += t as f64 * profile.at(t);
    }
    Ok((n as f64).cbrt() * sum)
}

/// Radius r = floor(eps^{-1} (ln x - 3 ln ln x)) with x = n eps^3.
/// Needs eps in (0, 1/2) and x > e; a nonpositive floor means the pair
/// (n, eps) is outside the supercritical regime the radius is built for.
pub fn window_radius(n: usize, eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::OutOfRegime(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    let x = n as f64 * eps.powi(3);
    if x <= std::f64::consts::E {
        return Err(Error::OutOfRegime(format!(
            "n eps^3 = {x} must exceed e for the radius to be defined"
        )));
    }
    let value = (x.ln() - 3.0 * x.ln().ln()) / eps;
    if value < 1.0 {
        return Err(Error::OutOfRegime(format!(
            "radius floor((ln x - 3 ln ln x)/eps) = {} is below 1 at n = {n}, eps = {eps}",
            value.floor()
        )));
    }
    Ok(value.floor() as usize)
}

/// Supercritical statistic
/// eps^{-1} r sum_{t=1}^{2r} ((1+eps)^{min(t,r)} - 1) R[t]
/// with r the window radius for (n, eps).
pub fn supercritical_condition_statistic(g: &Graph, eps: f64) -> Result<f64> {
    let r = window_radius(g.n(), eps)?;
    supercritical_condition_statistic_with_radius(g, eps, r)
}

/// Same statistic with the radius supplied directly, for probing scales the
/// radius formula does not reach on small graphs.
pub fn supercritical_condition_statistic_with_radius(
    g: &Graph,
    eps: f64,
    r: usize,
) -> Result<f64> {
    g.require_regular(3)?;
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    if r == 0 {
        return Err(Error::InvalidParameter("radius must be at least 1".into()));
    }
    let profile = average_return_profile(g, 2 * r)?;
    let mut sum = 0.0;
    for t in 1..=2 * r {
        let weight = (1.0 + eps).powi(t.min(r) as i32) - 1.0;
        sum += weight * profile.at(t);
    }
    Ok(sum * r as f64 / eps)
}

fn check_bound_inputs(d: usize, girth: usize, n: usize, c_mix: f64) -> Result<()> {
    if d < 3 {
        return Err(Error::OutOfModel(format!("degree must be at least 3, got {d}")));
    }
    if girth < 3 {
        return Err(Error::InvalidParameter(format!("girth must be at least 3, got {girth}")));
    }
    if n < 4 {
        return Err(Error::InvalidParameter(format!("need n >= 4, got {n}")));
    }
    if !(c_mix > 0.0) {
        return Err(Error::InvalidParameter(format!("mixing constant must be positive, got {c_mix}")));
    }
    Ok(())
}

/// Return-probability bound for a d-regular graph with the given girth whose
/// walk mixes by c_mix ln n steps: zero below the girth, (d-1)^{-floor(g/2)}
/// until the mixing time, 4/n afterwards. The girth branch wins when both
/// apply.
pub fn expander_return_bound(d: usize, girth: usize, n: usize, c_mix: f64, t: usize) -> Result<f64> {
    check_bound_inputs(d, girth, n, c_mix)?;
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    if t < girth {
        return Ok(0.0);
    }
    if t as f64 >= c_mix * (n as f64).ln() {
        return Ok(4.0 / n as f64);
    }
    Ok((d as f64 - 1.0).powi(-((girth / 2) as i32)))
}

/// Closed-form bound on the window statistic implied by
/// `expander_return_bound`: c_mix^2 n^{1/3} ln^2 n (d-1)^{-floor(g/2)} + 2.
pub fn expander_window_statistic_bound(d: usize, girth: usize, n: usize, c_mix: f64) -> Result<f64> {
    check_bound_inputs(d, girth, n, c_mix)?;
    let nf = n as f64;
    let geometric = (d as f64 - 1.0).powi(-((girth / 2) as i32));
    Ok(c_mix * c_mix * nf.cbrt() * nf.ln().powi(2) * geometric + 2.0)
}

/// Return-probability bound for the Hamming graph H(3, m), degree d = 3(m-1)
/// on n = m^3 vertices: zero below t = 3, then
/// (3/(d-1)) ((2/3)^{t-1} + t/(d-1)) until mixing, 2/n afterwards.
pub fn hamming3_return_bound(m: usize, c_mix: f64, t: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("need m >= 2, got {m}")));
    }
    let d = 3 * (m - 1);
    let n = m * m * m;
    check_bound_inputs(d, 3, n, c_mix)?;
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    if t < 3 {
        return Ok(0.0);
    }
    if t as f64 >= c_mix * (n as f64).ln() {
        return Ok(2.0 / n as f64);
    }
    let dm1 = d as f64 - 1.0;
    Ok(3.0 / dm1 * ((2.0f64 / 3.0).powi(t as i32 - 1) + t as f64 / dm1))
}

/// Geometric side of the girth criterion:
/// (d-1)^{-floor(g/2)} n^{1/3} ln^2 n. When this is small the window
/// statistic is automatically controlled for any graph with that girth.
pub fn girth_condition_lhs(d: usize, girth: usize, n: usize) -> Result<f64> {
    check_bound_inputs(d, girth, n, 1.0)?;
    let nf = n as f64;
    Ok((d as f64 - 1.0).powi(-((girth / 2) as i32)) * nf.cbrt() * nf.ln().powi(2))
}

/// Empirical mixing constant: smallest C with R[t] <= 4/n for all
/// t > C ln n within the horizon, i.e. (t_last + 1)/ln n where t_last is the
/// last profile entry above 4/n (0 if the profile never exceeds it).
pub fn fit_mixing_constant(g: &Graph, horizon: usize) -> Result<f64> {
    if g.n() < 3 {
        return Err(Error::InvalidParameter("need at least 3 vertices".into()));
    }
    let profile = average_return_profile(g, horizon)?;
    let threshold = 4.0 / g.n() as f64;
    let mut t_last = 0usize;
    for t in 1..=horizon {
        if profile.at(t) > threshold {
            t_last = t;
        }
    }
    Ok((t_last as f64 + 1.0) / (g.n() as f64).ln())
}
