//! Analytical performance expressions.
//!
//! All EWSAoI values use the `1/N` normalization of the time-averaged
//! weighted sum of ages. Where the published constants are approximations,
//! the exact renewal constant `3/2` per cycle is used by default:
//!
//! ```text
//! per-source average age = E[(W+S)^2] / (2 E[W+S]) + E[S_prev (W+S)] / E[W+S] + 3/2
//! ```
//!
//! With `W`, `S` the waiting and service time of an update, this is exact for
//! any policy under which the first packet of an update is sent fresh.

use crate::error::{Error, Result};
use crate::model::{validate_params, SourceParams};

/// Moments of the waiting, service and busy-interval times under a
/// no-switching randomized policy, seen from one source.
#[derive(Debug, Clone, PartialEq)]
pub struct NsrpMoments {
    /// `E[S^2]`, slots squared.
    pub e_s2: f64,
    /// `E[W]`, slots.
    pub e_w: f64,
    /// `E[W^2]`, slots squared.
    pub e_w2: f64,
    /// `E[Y_j^2]` for every source `j`.
    pub e_y2: Vec<f64>,
}

impl NsrpMoments {
    /// `E[S] = (L - 1) / p`.
    pub fn e_s(params: &SourceParams) -> f64 {
        (params.len as f64 - 1.0) / params.p
    }
}

/// Lower bound, its throughput vector and the optimality ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub lower_bound: f64,
    pub q_lb: Vec<f64>,
    pub rho_s: f64,
    pub rho_mw: f64,
    pub psi: f64,
}

fn n_f64(params: &[SourceParams]) -> f64 {
    params.len() as f64
}

fn sum_alpha(params: &[SourceParams]) -> f64 {
    params.iter().map(|s| s.alpha).sum()
}

/// `sqrt(alpha_i * L_i / p_i)`.
fn lb_weight(s: &SourceParams) -> f64 {
    (s.alpha * s.len as f64 / s.p).sqrt()
}

/// `sqrt(alpha_i * (3 L_i - 1) / (2 p_i))`.
fn srp_weight(s: &SourceParams) -> f64 {
    (s.alpha * (3.0 * s.len as f64 - 1.0) / (2.0 * s.p)).sqrt()
}

fn check_mu(params: &[SourceParams], mu: &[f64]) -> Result<()> {
    if mu.len() != params.len() {
        return Err(Error::LengthMismatch { expected: params.len(), actual: mu.len() });
    }
    if let Some(i) = mu.iter().position(|&m| !(m > 0.0) || !m.is_finite()) {
        return Err(Error::Domain(format!("mu[{i}] = {} must be positive", mu[i])));
    }
    if mu.iter().any(|&m| m > 1.0) {
        return Err(Error::Domain("scheduling probabilities must not exceed 1".into()));
    }
    let total: f64 = mu.iter().sum();
    if total > 1.0 + 1e-9 {
        return Err(Error::Domain(format!("scheduling probabilities sum to {total} > 1")));
    }
    Ok(())
}

/// Universal lower bound on the EWSAoI of any admissible policy:
/// `(1/N) [ (1/2) (sum_i sqrt(alpha_i L_i / p_i))^2 + sum_i alpha_i ]`.
pub fn lower_bound(params: &[SourceParams]) -> Result<f64> {
    validate_params(params)?;
    let s: f64 = params.iter().map(lb_weight).sum();
    Ok((0.5 * s * s + sum_alpha(params)) / n_f64(params))
}

/// Per-source packet throughput attaining the lower bound,
/// `q_i = sqrt(alpha_i L_i p_i / 2) / sum_j sqrt(alpha_j L_j / (2 p_j))`.
/// Satisfies `sum_i q_i / p_i = 1`.
pub fn q_lb(params: &[SourceParams]) -> Result<Vec<f64>> {
    validate_params(params)?;
    let denom: f64 = params.iter().map(|s| (s.alpha * s.len as f64 / (2.0 * s.p)).sqrt()).sum();
    Ok(params.iter().map(|s| (s.alpha * s.len as f64 * s.p / 2.0).sqrt() / denom).collect())
}

/// EWSAoI of a switching randomized policy with probabilities `mu`:
/// `(1/N) sum_i alpha_i ((3 L_i - 1) / (2 p_i mu_i) + 1)`.
pub fn srp_ewsaoi(params: &[SourceParams], mu: &[f64]) -> Result<f64> {
    validate_params(params)?;
    check_mu(params, mu)?;
    let total: f64 = params
        .iter()
        .zip(mu)
        .map(|(s, &m)| s.alpha * ((3.0 * s.len as f64 - 1.0) / (2.0 * s.p * m) + 1.0))
        .sum();
    Ok(total / n_f64(params))
}

/// Optimal switching randomized policy, `mu_i ∝ sqrt(alpha_i (3 L_i - 1) / (2 p_i))`.
pub fn optimal_srp(params: &[SourceParams]) -> Result<Vec<f64>> {
    validate_params(params)?;
    let w: Vec<f64> = params.iter().map(srp_weight).collect();
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / total).collect())
}

/// EWSAoI of the optimal switching randomized policy,
/// `(1/N) sum_i alpha_i + (1/N) (sum_i sqrt(alpha_i (3 L_i - 1) / (2 p_i)))^2`.
pub fn optimal_srp_ewsaoi(params: &[SourceParams]) -> Result<f64> {
    validate_params(params)?;
    let s: f64 = params.iter().map(srp_weight).sum();
    Ok((sum_alpha(params) + s * s) / n_f64(params))
}

/// Optimality ratio of the optimal switching randomized policy.
pub fn rho_srp(params: &[SourceParams]) -> Result<f64> {
    Ok(optimal_srp_ewsaoi(params)? / lower_bound(params)?)
}

/// Waiting, service and busy-interval moments for source `i` under a
/// no-switching randomized policy with probabilities `mu`.
pub fn nsrp_moments(params: &[SourceParams], mu: &[f64], i: usize) -> Result<NsrpMoments> {
    validate_params(params)?;
    check_mu(params, mu)?;
    let n = params.len();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    let e_y2: Vec<f64> = params.iter().map(busy_second_moment).collect();
    let mu_len: f64 = params.iter().zip(mu).map(|(s, &m)| m * s.len as f64).sum();
    let mu_y2: f64 = e_y2.iter().zip(mu).map(|(y, &m)| m * y).sum();
    let mu_sum: f64 = mu.iter().sum();
    let (e_s2, e_w, e_w2) = source_moments(&params[i], mu[i], &e_y2[i], mu_len, mu_y2, mu_sum);
    Ok(NsrpMoments { e_s2, e_w, e_w2, e_y2 })
}

/// `E[Y^2] = 2L - 1 + (L - 1)(L - p) / p`.
fn busy_second_moment(s: &SourceParams) -> f64 {
    let l = s.len as f64;
    2.0 * l - 1.0 + (l - 1.0) * (l - s.p) / s.p
}

/// Moments of one source given the network-wide sums `sum mu_j L_j`,
/// `sum mu_j E[Y_j^2]` and `sum mu_j`; the `j != i` sums are obtained by
/// removing source `i`'s own term, which keeps a full evaluation `O(N)`.
fn source_moments(
    s: &SourceParams,
    mu_i: f64,
    e_y2_i: &f64,
    mu_len: f64,
    mu_y2: f64,
    mu_sum: f64,
) -> (f64, f64, f64) {
    let l = s.len as f64;
    let p = s.p;
    let e_s2 = (l - 1.0) * (l - p) / (p * p);
    let e_w = (mu_len - mu_i * (l - 1.0)) / (mu_i * p);
    let others_len = mu_len - mu_i * l;
    let others_y2 = mu_y2 - mu_i * e_y2_i;
    let numer = mu_i * (1.0 + 2.0 * (1.0 - p) * e_w) + others_y2 + 2.0 * others_len * e_w;
    let e_w2 = numer / (1.0 - mu_sum + p * mu_i);
    (e_s2, e_w, e_w2)
}

/// EWSAoI of a no-switching randomized policy.
///
/// With `corrected` the cross term is `2 E[W] (L - 1) / p` and the per-cycle
/// constant is `3/2`, which is what the renewal identity gives for
/// independent waiting and service times. Without it the expression uses
/// `2 E[W^2] (L - 1) / p` and `+1`, as originally printed.
pub fn nsrp_ewsaoi(params: &[SourceParams], mu: &[f64], corrected: bool) -> Result<f64> {
    validate_params(params)?;
    check_mu(params, mu)?;
    Ok(nsrp_ewsaoi_unchecked(params, mu, corrected))
}

/// Same as [`nsrp_ewsaoi`] without input validation; returns a non-finite
/// value outside the domain. Used in the optimizer's inner loop.
pub(crate) fn nsrp_ewsaoi_unchecked(params: &[SourceParams], mu: &[f64], corrected: bool) -> f64 {
    let e_y2: Vec<f64> = params.iter().map(busy_second_moment).collect();
    let mu_len: f64 = params.iter().zip(mu).map(|(s, &m)| m * s.len as f64).sum();
    let mu_y2: f64 = e_y2.iter().zip(mu).map(|(y, &m)| m * y).sum();
    let mu_sum: f64 = mu.iter().sum();
    let mut total = 0.0;
    for ((s, &m), y2) in params.iter().zip(mu).zip(&e_y2) {
        let (e_s2, e_w, e_w2) = source_moments(s, m, y2, mu_len, mu_y2, mu_sum);
        let e_s = (s.len as f64 - 1.0) / s.p;
        let (cross, constant) = if corrected { (e_w, 1.5) } else { (e_w2, 1.0) };
        let inner = (e_w2 + e_s2) / 2.0 + e_s * e_s + 2.0 * cross * e_s;
        total += s.alpha * (m * s.p / mu_len * inner + constant);
    }
    total / n_f64(params)
}

/// Optimality ratio guaranteed for Max-Weight with throughput targets `q_bar`.
/// Returns `(rho, psi)` with `rho = 6 + sqrt(psi) / (N L_B)`.
pub fn rho_mw(params: &[SourceParams], q_bar: &[f64]) -> Result<(f64, f64)> {
    validate_params(params)?;
    if q_bar.len() != params.len() {
        return Err(Error::LengthMismatch { expected: params.len(), actual: q_bar.len() });
    }
    if let Some(i) = q_bar.iter().position(|&q| !(q > 0.0)) {
        return Err(Error::Domain(format!("q_bar[{i}] = {} must be positive", q_bar[i])));
    }
    let bracket: f64 = params
        .iter()
        .zip(q_bar)
        .map(|(s, &q)| {
            let l = s.len as f64;
            let sp = s.p.sqrt();
            let terms = 5.0 * l * l * sp / (q * q) - l / q - l * sp / q
                + 2.0 * l * l / (q * q)
                + 2.0 * l * l / q
                + (-l * l + 8.0 * l + 24.0) / 2.0;
            s.alpha / sp * terms
        })
        .sum();
    let psi = sum_alpha(params) * bracket;
    let rho = 6.0 + psi.sqrt() / (n_f64(params) * lower_bound(params)?);
    Ok((rho, psi))
}

/// Bound report using the given Max-Weight throughput targets.
pub fn bound_report(params: &[SourceParams], q_bar: &[f64]) -> Result<BoundReport> {
    let (rho_mw, psi) = rho_mw(params, q_bar)?;
    Ok(BoundReport {
        lower_bound: lower_bound(params)?,
        q_lb: q_lb(params)?,
        rho_s: rho_srp(params)?,
        rho_mw,
        psi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p(items: &[(f64, f64, u32)]) -> Vec<SourceParams> {
        items.iter().map(|&(a, p, l)| SourceParams::new(a, p, l).unwrap()).collect()
    }

    /// Probability mass of the waiting time of source `i` under a
    /// no-switching policy, by forward propagation of the selection chain.
    /// Independent of the recurrence-based moments above.
    fn waiting_pmf(params: &[SourceParams], mu: &[f64], i: usize, horizon: usize) -> Vec<f64> {
        // Service time after the first packet: sum of L-1 geometric(p) slots.
        let service_pmf = |s: &SourceParams| -> Vec<f64> {
            let mut pmf = vec![0.0; horizon + 1];
            pmf[0] = 1.0;
            for _ in 1..s.len {
                let mut next = vec![0.0; horizon + 1];
                for (t, &mass) in pmf.iter().enumerate() {
                    if mass == 0.0 {
                        continue;
                    }
                    let mut q = s.p;
                    for k in 1..=horizon - t {
                        next[t + k] += mass * q;
                        q *= 1.0 - s.p;
                        if q < 1e-300 {
                            break;
                        }
                    }
                }
                pmf = next;
            }
            pmf
        };
        let services: Vec<Vec<f64>> = params.iter().map(service_pmf).collect();
        let mut selecting = vec![0.0; horizon + 1];
        let mut done = vec![0.0; horizon + 1];
        selecting[0] = 1.0;
        for t in 0..horizon {
            let mass = selecting[t];
            if mass == 0.0 {
                continue;
            }
            selecting[t + 1] += mass * (1.0 - mu.iter().sum::<f64>());
            for (j, s) in params.iter().enumerate() {
                let m = mass * mu[j];
                if j == i {
                    done[t + 1] += m * s.p;
                    selecting[t + 1] += m * (1.0 - s.p);
                } else {
                    selecting[t + 1] += m * (1.0 - s.p);
                    for (k, &ps) in services[j].iter().enumerate() {
                        if t + 1 + k <= horizon {
                            selecting[t + 1 + k] += m * s.p * ps;
                        }
                    }
                }
            }
        }
        done
    }

    fn moments(pmf: &[f64]) -> (f64, f64) {
        pmf.iter().enumerate().fold((0.0, 0.0), |(m1, m2), (t, &q)| {
            (m1 + t as f64 * q, m2 + (t * t) as f64 * q)
        })
    }

    #[test]
    fn lower_bound_examples() {
        assert_relative_eq!(lower_bound(&p(&[(1.0, 1.0, 1)])).unwrap(), 1.5);
        let lb = lower_bound(&p(&[(1.0, 1.0, 100), (1.0, 1.0, 2)])).unwrap();
        let expected = 0.5 * (0.5 * (10.0 + 2f64.sqrt()).powi(2) + 2.0);
        assert_relative_eq!(lb, expected, max_relative = 1e-14);
        assert_relative_eq!(lb, 33.571, epsilon = 1e-3);
    }

    #[test]
    fn q_lb_examples() {
        assert_eq!(q_lb(&p(&[(1.0, 1.0, 1), (1.0, 1.0, 1)])).unwrap(), vec![0.5, 0.5]);
        assert_eq!(q_lb(&p(&[(3.0, 0.7, 9)])).unwrap(), vec![0.7]);
        let q = q_lb(&p(&[(1.0, 1.0, 100), (1.0, 1.0, 2)])).unwrap();
        let s50 = 50f64.sqrt();
        assert_relative_eq!(q[0], s50 / (s50 + 1.0), max_relative = 1e-14);
        assert_relative_eq!(q[1], 1.0 / (s50 + 1.0), max_relative = 1e-14);
        assert_relative_eq!(q[0], 0.8761, epsilon = 1e-4);
    }

    #[test]
    fn srp_examples() {
        assert_relative_eq!(srp_ewsaoi(&p(&[(1.0, 1.0, 1)]), &[1.0]).unwrap(), 2.0);
        assert_relative_eq!(srp_ewsaoi(&p(&[(1.0, 0.5, 1)]), &[1.0]).unwrap(), 3.0);
        let sym = p(&[(1.0, 1.0, 1), (1.0, 1.0, 1)]);
        assert_relative_eq!(srp_ewsaoi(&sym, &[0.5, 0.5]).unwrap(), 3.0);
        assert_relative_eq!(optimal_srp_ewsaoi(&sym).unwrap(), 3.0);
        assert!(matches!(srp_ewsaoi(&sym, &[0.0, 1.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn optimal_srp_examples() {
        let mu = optimal_srp(&p(&[(2.0, 0.3, 5); 4])).unwrap();
        for m in &mu {
            assert_relative_eq!(*m, 0.25, max_relative = 1e-14);
        }
        let mu = optimal_srp(&p(&[(1.0, 1.0, 100), (1.0, 1.0, 2)])).unwrap();
        let (a, b) = (149.5f64.sqrt(), 2.5f64.sqrt());
        assert_relative_eq!(mu[0], a / (a + b), max_relative = 1e-14);
        assert_relative_eq!(mu[0], 0.8855, epsilon = 1e-4);
        assert_relative_eq!(mu[1], 0.1145, epsilon = 1e-4);
        assert!((mu.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_source_ratio() {
        let one = p(&[(1.0, 1.0, 1)]);
        assert_relative_eq!(optimal_srp_ewsaoi(&one).unwrap(), 2.0);
        assert_relative_eq!(rho_srp(&one).unwrap(), 4.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn srp_matches_renewal_identity() {
        // Geometric waiting time and negative-binomial service time plugged
        // into the exact per-cycle identity.
        for &(alpha, prob, len, mu) in &[(1.0, 0.5, 1, 1.0), (2.0, 0.3, 7, 0.4), (1.0, 0.9, 30, 0.05)]
        {
            let a: f64 = prob * mu;
            let l = len as f64;
            let (ew, ew2) = (1.0 / a, (2.0 - a) / (a * a));
            let (es, es2) = ((l - 1.0) / a, (l - 1.0) * (l - a) / (a * a));
            let per = (ew2 + 2.0 * ew * es + es2) / (2.0 * (ew + es)) + es + 1.5;
            let closed = srp_ewsaoi(&p(&[(alpha, prob, len)]), &[mu]).unwrap();
            assert_relative_eq!(alpha * per, closed, max_relative = 1e-9);
        }
    }

    #[test]
    fn single_packet_srp_reduces_to_known_formula() {
        let params = p(&[(1.0, 0.4, 1), (3.0, 0.9, 1), (0.5, 0.2, 1)]);
        let mu = [0.3, 0.3, 0.4];
        let known: f64 =
            params.iter().zip(&mu).map(|(s, m)| s.alpha * (1.0 / (s.p * m) + 1.0)).sum::<f64>() / 3.0;
        assert_relative_eq!(srp_ewsaoi(&params, &mu).unwrap(), known, max_relative = 1e-14);
    }

    #[test]
    fn nsrp_moment_examples() {
        let m = nsrp_moments(&p(&[(1.0, 0.3, 1)]), &[1.0], 0).unwrap();
        assert_eq!(m.e_s2, 0.0);
        assert_eq!(m.e_y2, vec![1.0]);

        let m = nsrp_moments(&p(&[(1.0, 0.5, 2)]), &[1.0], 0).unwrap();
        assert_relative_eq!(m.e_s2, 6.0);
        assert_relative_eq!(m.e_w, 2.0);

        let sym = p(&[(1.0, 0.5, 2), (1.0, 0.5, 2)]);
        let m = nsrp_moments(&sym, &[0.5, 0.5], 0).unwrap();
        assert_relative_eq!(m.e_w, 6.0);
        assert_relative_eq!(m.e_y2[1], 6.0);
        assert_relative_eq!(m.e_w2, 74.0);
    }

    #[test]
    fn nsrp_moments_match_chain_propagation() {
        let cases: Vec<(Vec<SourceParams>, Vec<f64>)> = vec![
            (p(&[(1.0, 0.5, 2), (1.0, 0.5, 2)]), vec![0.5, 0.5]),
            (p(&[(1.0, 0.5, 2)]), vec![1.0]),
            (p(&[(1.0, 0.7, 4), (2.0, 0.4, 2), (1.0, 0.9, 3)]), vec![0.2, 0.5, 0.3]),
        ];
        for (params, mu) in cases {
            for i in 0..params.len() {
                let pmf = waiting_pmf(&params, &mu, i, 4000);
                let (m1, m2) = moments(&pmf);
                let closed = nsrp_moments(&params, &mu, i).unwrap();
                assert_relative_eq!(closed.e_w, m1, max_relative = 1e-9);
                assert_relative_eq!(closed.e_w2, m2, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn nsrp_ewsaoi_examples() {
        let one = p(&[(1.0, 1.0, 1)]);
        assert_relative_eq!(nsrp_ewsaoi(&one, &[1.0], true).unwrap(), 2.0);
        assert_relative_eq!(nsrp_ewsaoi(&one, &[1.0], false).unwrap(), 1.5);

        let sym = p(&[(1.0, 0.5, 2), (1.0, 0.5, 2)]);
        assert_relative_eq!(nsrp_ewsaoi(&sym, &[0.5, 0.5], true).unwrap(), 10.0, max_relative = 1e-12);
        assert_relative_eq!(optimal_srp_ewsaoi(&sym).unwrap(), 11.0, max_relative = 1e-12);
        assert!(nsrp_ewsaoi(&sym, &[0.0, 1.0], true).is_err());
    }

    #[test]
    fn nsrp_matches_identity_with_independent_moments() {
        let params = p(&[(1.0, 0.7, 4), (2.0, 0.4, 2), (1.0, 0.9, 3)]);
        let mu = [0.2, 0.5, 0.3];
        let mut total = 0.0;
        for (i, s) in params.iter().enumerate() {
            let (ew, ew2) = moments(&waiting_pmf(&params, &mu, i, 4000));
            let l = s.len as f64;
            let es = (l - 1.0) / s.p;
            let es2 = (l - 1.0) * (l - s.p) / (s.p * s.p);
            total += s.alpha * ((ew2 + 2.0 * ew * es + es2) / (2.0 * (ew + es)) + es + 1.5);
        }
        let closed = nsrp_ewsaoi(&params, &mu, true).unwrap();
        assert_relative_eq!(closed, total / 3.0, max_relative = 1e-9);
    }

    #[test]
    fn rho_mw_single_source() {
        let one = p(&[(1.0, 1.0, 1)]);
        let q = 0.999;
        let (rho, psi) = rho_mw(&one, &[q]).unwrap();
        let expected_psi = 5.0 / (q * q) - 1.0 / q - 1.0 / q + 2.0 / (q * q) + 2.0 / q + 31.0 / 2.0;
        assert_relative_eq!(psi, expected_psi, max_relative = 1e-14);
        assert_relative_eq!(rho, 6.0 + psi.sqrt() / 1.5, max_relative = 1e-14);
        assert!(rho_mw(&one, &[0.0]).is_err());
    }

    fn arb_params(max_n: usize, max_len: u32) -> impl Strategy<Value = Vec<SourceParams>> {
        prop::collection::vec((0.1f64..10.0, 0.05f64..=1.0, 1u32..=max_len), 1..=max_n).prop_map(
            |v| v.into_iter().map(|(a, p, l)| SourceParams::new(a, p, l).unwrap()).collect(),
        )
    }

    proptest! {
        #[test]
        fn q_lb_saturates_capacity(params in arb_params(20, 100)) {
            let q = q_lb(&params).unwrap();
            let load: f64 = q.iter().zip(&params).map(|(q, s)| q / s.p).sum();
            prop_assert!((load - 1.0).abs() < 1e-12);
        }

        #[test]
        fn srp_sandwich(params in arb_params(20, 100)) {
            let lb = lower_bound(&params).unwrap();
            let opt = srp_ewsaoi(&params, &optimal_srp(&params).unwrap()).unwrap();
            let rho = rho_srp(&params).unwrap();
            prop_assert!(lb <= opt);
            prop_assert!(opt <= rho * lb * (1.0 + 1e-12));
            prop_assert!(rho > 1.0 && rho < 3.0);
            prop_assert!((optimal_srp_ewsaoi(&params).unwrap() - opt).abs() <= 1e-10 * opt);
        }

        #[test]
        fn optimal_srp_beats_perturbations(
            params in arb_params(8, 50),
            noise in prop::collection::vec(0.0f64..1.0, 8),
        ) {
            let opt = optimal_srp(&params).unwrap();
            let best = srp_ewsaoi(&params, &opt).unwrap();
            let n = params.len();
            let raw: Vec<f64> = opt.iter().zip(&noise).map(|(m, e)| m * (0.5 + e)).collect();
            let total: f64 = raw.iter().sum();
            let perturbed: Vec<f64> = raw.iter().map(|r| r / total).collect();
            prop_assert_eq!(perturbed.len(), n);
            prop_assert!(srp_ewsaoi(&params, &perturbed).unwrap() >= best - 1e-12 * best);
        }

        #[test]
        fn waiting_jensen(params in arb_params(6, 30), seed in prop::collection::vec(0.05f64..1.0, 6)) {
            let n = params.len();
            let total: f64 = seed[..n].iter().sum();
            let mu: Vec<f64> = seed[..n].iter().map(|s| s / total).collect();
            for i in 0..n {
                let m = nsrp_moments(&params, &mu, i).unwrap();
                prop_assert!(m.e_w >= 1.0 - 1e-12);
                prop_assert!(m.e_w2 >= m.e_w * m.e_w * (1.0 - 1e-12));
                prop_assert!(m.e_s2 >= 0.0);
            }
        }

        #[test]
        fn symmetric_nsrp_not_worse_than_srp(
            alpha in 0.1f64..10.0, prob in 0.05f64..=1.0, len in 1u32..100, n in 1usize..20,
        ) {
            let params = vec![SourceParams::new(alpha, prob, len).unwrap(); n];
            let uniform = vec![1.0 / n as f64; n];
            let ns = nsrp_ewsaoi(&params, &uniform, true).unwrap();
            let s = srp_ewsaoi(&params, &uniform).unwrap();
            prop_assert!(ns <= s * (1.0 + 1e-12));
        }

        #[test]
        fn rho_mw_exceeds_six(params in arb_params(20, 100)) {
            let q: Vec<f64> = q_lb(&params).unwrap().iter().map(|q| q * (1.0 - 1e-3)).collect();
            let (rho, psi) = rho_mw(&params, &q).unwrap();
            prop_assert!(psi > 0.0);
            prop_assert!(rho > 6.0 && rho.is_finite());
        }
    }
}
