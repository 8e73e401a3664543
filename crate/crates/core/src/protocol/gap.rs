use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::ProtocolParams;

/// Grid step of the `q` scan that cross-checks `q*`.
const GRID_STEP: f64 = 1e-5;
/// Grid step of the strict-test (failed protocol) scan.
const FAILED_GRID_STEP: f64 = 1e-3;

/// Completeness and soundness quantities at one branch probability `q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapPoint<T> {
    pub q: T,
    pub alpha: T,
    pub beta1: T,
    pub beta2: T,
    pub beta3: T,
    pub delta1: T,
    pub delta2: T,
    pub delta3: T,
    /// `min(Δ1, Δ2, Δ3)`.
    pub min_gap: T,
}

struct Constants<T> {
    a: T,
    b: T,
    two_s: T,
    epsilon: T,
    delta: T,
    sqrt_term: T,
}

impl<T: Scalar> Constants<T> {
    fn new(p: &ProtocolParams) -> Result<Self> {
        if !(p.epsilon > 0.0 && p.epsilon <= 0.5) {
            return Err(Error::AnalyticDomain(format!("epsilon = {} outside (0, 1/2]", p.epsilon)));
        }
        let epsilon = T::of(p.epsilon);
        let four = T::of(4.0);
        Ok(Self {
            a: T::of(p.a()),
            b: T::of(p.b()),
            two_s: T::of(2f64.powi(-(p.s as i32))),
            epsilon,
            delta: T::of(p.delta),
            sqrt_term: (four * epsilon - four * epsilon * epsilon).sqrt(),
        })
    }

    fn point(&self, q: T) -> GapPoint<T> {
        let one = T::one();
        let half = T::of(0.5);
        let alpha = q * (one - self.two_s) * self.a + (one - q) * (one - self.delta);
        let beta1 = q + (one - q) * (one - self.epsilon * half);
        let beta2 = q + (one - q) * (one - self.epsilon);
        let beta3 = q * ((one - self.two_s) * self.b + self.two_s + self.sqrt_term) + one - q;
        let (delta1, delta2, delta3) = (alpha - beta1, alpha - beta2, alpha - beta3);
        GapPoint { q, alpha, beta1, beta2, beta3, delta1, delta2, delta3, min_gap: delta1.min(delta2).min(delta3) }
    }

    fn q_star(&self) -> Result<T> {
        let one = T::one();
        let half_eps = self.epsilon * T::of(0.5);
        let denom = one + half_eps - (one - self.two_s) * self.b - self.two_s - self.sqrt_term;
        if denom <= T::zero() {
            return Err(Error::AnalyticDomain(format!("q* denominator {denom} is not positive")));
        }
        let q = half_eps / denom;
        if q > one {
            return Err(Error::AnalyticDomain(format!("q* = {q} exceeds 1")));
        }
        Ok(q)
    }
}

/// Analytic gap report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport<T> {
    pub a: T,
    pub b: T,
    pub s: u32,
    pub t: u32,
    pub epsilon: T,
    pub delta: T,
    pub r: u32,
    /// Quantities at the configured `q`.
    pub at_q: GapPoint<T>,
    pub q_star: T,
    pub at_q_star: GapPoint<T>,
    /// `25/(64²·2 + 64) − δ`, the closed-form lower bound for `ε = 1/64`.
    pub gap_bound: T,
    /// `ε = 1/64`, `s ≥ 3`, `t ≥ 4`: the setting the closed form covers.
    pub bound_applies: bool,
    /// `Δ3(q*) ≥ gap_bound`.
    pub bound_holds: bool,
    pub grid_step: T,
    pub grid_argmax: T,
    pub grid_max: T,
    /// Maximum over `q` of the gap achievable with the strict test.
    pub failed_max_delta: T,
    pub failed_argmax: T,
}

pub fn q_star<T: Scalar>(params: &ProtocolParams) -> Result<T> {
    Constants::new(params)?.q_star()
}

pub fn gap_bound<T: Scalar>(delta: T) -> T {
    T::of(25.0) / T::of(64.0 * 64.0 * 2.0 + 64.0) - delta
}

/// Gap of the protocol that uses the strict stabilizer test instead:
/// `q[(1−2^{-s})(1−2^{-t}) − 1] + (1−q)(ε − 1/2)`.
pub fn failed_protocol_delta<T: Scalar>(s: u32, t: u32, epsilon: T, q: T) -> T {
    let one = T::one();
    let ps = T::of(2f64.powi(-(s as i32)));
    let pt = T::of(2f64.powi(-(t as i32)));
    q * ((one - ps) * (one - pt) - one) + (one - q) * (epsilon - T::of(0.5))
}

fn grid(step: f64) -> impl Iterator<Item = f64> {
    let n = (1.0 / step).round() as usize;
    (0..=n).map(move |i| i as f64 / n as f64)
}

pub fn gap_analysis<T: Scalar>(params: &ProtocolParams) -> Result<GapReport<T>> {
    let c = Constants::<T>::new(params)?;
    let q_star = c.q_star()?;

    let (mut grid_argmax, mut grid_max) = (T::zero(), T::neg_infinity());
    for q in grid(GRID_STEP) {
        let g = c.point(T::of(q)).min_gap;
        if g > grid_max {
            grid_max = g;
            grid_argmax = T::of(q);
        }
    }

    let (mut failed_argmax, mut failed_max_delta) = (T::zero(), T::neg_infinity());
    for q in grid(FAILED_GRID_STEP) {
        let d = failed_protocol_delta(params.s, params.t, c.epsilon, T::of(q));
        if d > failed_max_delta {
            failed_max_delta = d;
            failed_argmax = T::of(q);
        }
    }

    let at_q_star = c.point(q_star);
    let gap_bound = gap_bound(c.delta);
    Ok(GapReport {
        a: c.a,
        b: c.b,
        s: params.s,
        t: params.t,
        epsilon: c.epsilon,
        delta: c.delta,
        r: params.r,
        at_q: c.point(T::of(params.q)),
        q_star,
        at_q_star,
        gap_bound,
        bound_applies: params.epsilon == 1.0 / 64.0 && params.s >= 3 && params.t >= 4,
        bound_holds: at_q_star.delta3 >= gap_bound,
        grid_step: T::of(GRID_STEP),
        grid_argmax,
        grid_max,
        failed_max_delta,
        failed_argmax,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow<T> {
    pub epsilon: T,
    pub q_star: T,
    pub delta3_at_q_star: T,
}

/// `(ε, q*, Δ3(q*))` over a list of `ε` values, other parameters fixed.
pub fn gap_sweep<T: Scalar>(params: &ProtocolParams, epsilons: &[f64]) -> Result<Vec<SweepRow<T>>> {
    epsilons
        .iter()
        .map(|&epsilon| {
            let c = Constants::<T>::new(&ProtocolParams { epsilon, ..params.clone() })?;
            let q = c.q_star()?;
            Ok(SweepRow { epsilon: c.epsilon, q_star: q, delta3_at_q_star: c.point(q).delta3 })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_two_dominates_delta_one() {
        let c = Constants::<f64>::new(&ProtocolParams::default()).unwrap();
        for i in 0..=100 {
            let p = c.point(i as f64 / 100.0);
            assert!(p.delta2 >= p.delta1 - 1e-15);
        }
    }

    #[test]
    fn large_epsilon_breaks_the_denominator() {
        let p = ProtocolParams { epsilon: 0.5, s: 1, t: 2, ..ProtocolParams::default() };
        assert!(matches!(gap_analysis::<f64>(&p), Err(Error::AnalyticDomain(_))));
    }

    #[test]
    fn works_in_single_precision() {
        let r = gap_analysis::<f32>(&ProtocolParams::default()).unwrap();
        assert!(r.bound_holds);
    }
}
