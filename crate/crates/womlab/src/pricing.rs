//! Market primitives: the equal-profit mixed price law and its moments.
//!
//! Given the markup ratio `eta` (captive demand relative to price-comparing
//! demand) and the search cost `s`, firms mix over `[p_lo, p_hi]` with CDF
//! `F(p) = 1 + eta - eta * p_hi / p`. The upper support point equals the
//! reservation price `r` pinned down by `r - E[p] = s`, which gives
//! `p_hi = s / (1 - eta * ln(1 + 1/eta))`.

use crate::error::{Error, Result};
use crate::network::DegreeDistribution;

/// Validated market parameters: good value `v`, search cost `s`, discount
/// factor `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    v: f64,
    s: f64,
    delta: f64,
}

impl MarketParams {
    /// Requires `v > 0`, `0 < s < v`, and `0 < delta < 1` (the boundary
    /// discount factors degenerate: no consumer ever waits, or waiting is
    /// free and the search market unravels).
    pub fn new(v: f64, s: f64, delta: f64) -> Result<Self> {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::invalid(format!("v must be positive (got {v})")));
        }
        if !s.is_finite() || s <= 0.0 || s >= v {
            return Err(Error::invalid(format!(
                "s must satisfy 0 < s < v (got s = {s}, v = {v})"
            )));
        }
        if !delta.is_finite() || delta <= 0.0 || delta >= 1.0 {
            return Err(Error::invalid(format!(
                "delta must lie strictly between 0 and 1 (got {delta})"
            )));
        }
        Ok(MarketParams { v, s, delta })
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// `ln(1 + 1/eta)` without cancellation for large `eta`.
pub fn ln1p_recip(eta: f64) -> f64 {
    (1.0 / eta).ln_1p()
}

/// `1 - eta * ln(1 + 1/eta)`, the ratio `s / p_hi`.
///
/// Direct evaluation cancels catastrophically once `eta` is large (the value
/// decays like `1/(2 eta)`), so beyond `eta = 1e4` this switches to the
/// alternating series `x/2 - x^2/3 + x^3/4 - ...` in `x = 1/eta`.
pub fn one_minus_eta_ln1p_recip(eta: f64) -> f64 {
    if eta >= 1e4 {
        let x = 1.0 / eta;
        let inner =
            0.5 + x * (-1.0 / 3.0 + x * (0.25 + x * (-0.2 + x * (1.0 / 6.0 + x * (-1.0 / 7.0)))));
        x * inner
    } else {
        1.0 - eta * ln1p_recip(eta)
    }
}

/// `(1 + 2*eta) * ln(1 + 1/eta) - 2`, the coefficient in
/// `E[p] - E[min p] = eta * p_hi * min_gap_coeff(eta)`.
///
/// Decays like `1/(6 eta^2)`; evaluated by its series
/// `sum_{n>=2} (-1)^n (n-1)/(n(n+1)) x^n` for large `eta`.
pub fn min_gap_coeff(eta: f64) -> f64 {
    if eta >= 1e3 {
        let x = 1.0 / eta;
        let inner = 1.0 / 6.0
            + x * (-1.0 / 6.0
                + x * (0.15
                    + x * (-2.0 / 15.0 + x * (5.0 / 42.0 + x * (-3.0 / 28.0 + x * (7.0 / 72.0))))));
        x * x * inner
    } else {
        (1.0 + 2.0 * eta) * ln1p_recip(eta) - 2.0
    }
}

/// Markup ratio: captive demand over price-comparing demand when a fraction
/// `q` of consumers searches immediately and the rest wait one period.
pub fn eta_baseline(dist: &DegreeDistribution, q: f64, delta: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::invalid(format!(
            "search probability must lie strictly inside (0, 1) (got {q})"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!(
            "delta must lie strictly between 0 and 1 (got {delta})"
        )));
    }
    let tau_tilde = dist.tau_tilde(q)?;
    let denom = delta * (1.0 - q) * tau_tilde;
    if denom <= 0.0 {
        return Err(Error::NoComparison(format!(
            "two-price weight vanishes at q = {q} (t(1) = {})",
            dist.t1()
        )));
    }
    let single = dist.pgf(1.0 - 0.5 * q)? - 0.5 * dist.pgf(1.0 - q)?;
    let num = 0.5 * q + delta * (1.0 - q) * single;
    let eta = num / denom;
    if !eta.is_finite() {
        return Err(Error::Diverged(format!("eta diverged at q = {q}")));
    }
    Ok(eta)
}

/// Equal-profit price law on `[p_lo, p_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceLaw {
    eta: f64,
    p_hi: f64,
    p_lo: f64,
    e_p: f64,
    e_pmin: f64,
}

impl PriceLaw {
    /// Builds the law implied by markup ratio `eta` and search cost `s`.
    pub fn from_eta(eta: f64, s: f64) -> Result<Self> {
        if !eta.is_finite() || eta <= 0.0 {
            return Err(Error::invalid(format!("eta must be positive (got {eta})")));
        }
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::invalid(format!("s must be positive (got {s})")));
        }
        let l = ln1p_recip(eta);
        let p_hi = s / one_minus_eta_ln1p_recip(eta);
        let e_p = eta * p_hi * l;
        let e_pmin = e_p - eta * p_hi * min_gap_coeff(eta);
        let law = PriceLaw {
            eta,
            p_hi,
            p_lo: eta / (1.0 + eta) * p_hi,
            e_p,
            e_pmin,
        };
        if !(law.p_hi.is_finite() && law.e_p.is_finite() && law.e_pmin.is_finite()) {
            return Err(Error::Diverged(format!(
                "price law diverged at eta = {eta}, s = {s}"
            )));
        }
        Ok(law)
    }

    /// Markup ratio the law was built from.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Upper support point; equals the reservation price `r`.
    pub fn p_hi(&self) -> f64 {
        self.p_hi
    }

    /// Lower support point `eta / (1 + eta) * p_hi`.
    pub fn p_lo(&self) -> f64 {
        self.p_lo
    }

    /// Mean posted price.
    pub fn e_p(&self) -> f64 {
        self.e_p
    }

    /// Mean of the minimum of two independent posted prices.
    pub fn e_pmin(&self) -> f64 {
        self.e_pmin
    }

    /// Support width `p_hi - p_lo`.
    pub fn dispersion(&self) -> f64 {
        self.p_hi - self.p_lo
    }

    /// `(p_hi - p_lo) / p_hi = 1 / (1 + eta)`.
    pub fn relative_dispersion(&self) -> f64 {
        1.0 / (1.0 + self.eta)
    }

    /// CDF `F(p) = 1 + eta - eta * p_hi / p`, clamped to 0 below the support
    /// and 1 above it.
    pub fn cdf(&self, p: f64) -> f64 {
        if p < self.p_lo {
            0.0
        } else if p >= self.p_hi {
            1.0
        } else {
            (1.0 + self.eta - self.eta * self.p_hi / p).clamp(0.0, 1.0)
        }
    }

    /// Quantile `p = eta * p_hi / (1 + eta - u)`; `u` is clamped to `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        self.eta * self.p_hi / (1.0 + self.eta - u)
    }

    /// `integral of F from p_lo to upper`, extended linearly above `p_hi`
    /// (where `F = 1`). Uses the antiderivative
    /// `(1 + eta) p - eta * p_hi * ln p`.
    pub fn cdf_integral(&self, upper: f64) -> f64 {
        if upper <= self.p_lo {
            return 0.0;
        }
        if upper >= self.p_hi {
            return (self.p_hi - self.e_p) + (upper - self.p_hi);
        }
        (1.0 + self.eta) * (upper - self.p_lo) - self.eta * self.p_hi * (upper / self.p_lo).ln()
    }
}

/// Mean posted price `s * eta * ln(1 + 1/eta) / (1 - eta * ln(1 + 1/eta))`;
/// strictly increasing in `eta`.
pub fn expected_price(eta: f64, s: f64) -> f64 {
    s * eta * ln1p_recip(eta) / one_minus_eta_ln1p_recip(eta)
}

/// Per-firm discounted profit from posting `p` inside the support while the
/// rival plays `law`.
pub fn firm_profit_baseline(
    dist: &DegreeDistribution,
    q: f64,
    delta: f64,
    law: &PriceLaw,
    p: f64,
) -> Result<f64> {
    if p < law.p_lo() || p > law.p_hi() {
        return Err(Error::invalid(format!(
            "price {p} outside the support [{}, {}]",
            law.p_lo(),
            law.p_hi()
        )));
    }
    let single = dist.pgf(1.0 - 0.5 * q)? - 0.5 * dist.pgf(1.0 - q)?;
    let comparers = dist.tau_tilde(q)? * (1.0 - law.cdf(p));
    Ok((0.5 * q + delta * (1.0 - q) * (single + comparers)) * p)
}

#[cfg(test)]
// Expected values are frozen verbatim from an independent high-precision
// computation; keep every digit rather than hand-rounding to shortest form.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn params_validation() {
        assert!(MarketParams::new(1.0, 0.05, 0.9).is_ok());
        assert!(MarketParams::new(0.0, 0.05, 0.9).is_err());
        assert!(MarketParams::new(1.0, 0.0, 0.9).is_err());
        assert!(MarketParams::new(1.0, 1.0, 0.9).is_err());
        assert!(MarketParams::new(1.0, 2.0, 0.9).is_err());
        assert!(MarketParams::new(1.0, 0.05, 0.0).is_err());
        assert!(MarketParams::new(1.0, 0.05, 1.0).is_err());
        assert!(MarketParams::new(1.0, 0.05, f64::NAN).is_err());
    }

    #[test]
    fn eta_of_two_friend_network_at_half() {
        // t(2) = 1, q = 0.5, delta = 0.5: numerator 0.25 + 0.25 * 0.4375,
        // denominator 0.25 * 0.125.
        let d = DegreeDistribution::single(2).unwrap();
        let eta = eta_baseline(&d, 0.5, 0.5).unwrap();
        assert_relative_eq!(eta, 11.5, max_relative = 1e-12);
    }

    #[test]
    fn eta_frozen_value_on_harmonic_network() {
        let d = DegreeDistribution::power_law(-1.0, 100).unwrap();
        let eta = eta_baseline(&d, 0.5, 0.9).unwrap();
        assert_relative_eq!(eta, 1.261_801_143_866_068_8, max_relative = 1e-12);
    }

    #[test]
    fn eta_rejects_degenerate_inputs() {
        let d = DegreeDistribution::single(2).unwrap();
        assert!(eta_baseline(&d, 0.0, 0.5).is_err());
        assert!(eta_baseline(&d, 1.0, 0.5).is_err());
        let lonely = DegreeDistribution::single(1).unwrap();
        assert!(matches!(
            eta_baseline(&lonely, 0.5, 0.5),
            Err(Error::NoComparison(_))
        ));
    }

    #[test]
    fn law_moments_frozen_at_eta_one() {
        let law = PriceLaw::from_eta(1.0, 0.05).unwrap();
        assert_relative_eq!(law.p_hi(), 0.162_944_567_663_546_48, max_relative = 1e-13);
        assert_relative_eq!(law.e_p(), 0.112_944_567_663_546_48, max_relative = 1e-13);
        assert_relative_eq!(law.e_pmin(), 0.1, max_relative = 1e-12);
        assert_relative_eq!(law.p_lo(), 0.5 * law.p_hi(), max_relative = 1e-14);
    }

    #[test]
    fn reservation_consistency_and_ordering() {
        for &eta in &[0.05, 0.3, 1.0, 4.0419075083407465, 11.5, 250.0] {
            let s = 0.05;
            let law = PriceLaw::from_eta(eta, s).unwrap();
            // r - E[p] = s: the marginal searcher is exactly compensated.
            assert_relative_eq!(law.p_hi() - law.e_p(), s, max_relative = 1e-12);
            assert!(law.p_lo() < law.e_pmin());
            assert!(law.e_pmin() < law.e_p());
            assert!(law.e_p() < law.p_hi());
        }
    }

    /// Simpson-rule moments from the closed-form CDF, used as an oracle:
    /// `E[p] = p_hi - int F` and `E[min p] = p_hi - 2 int F + int F^2`.
    fn moments_by_quadrature(law: &PriceLaw) -> (f64, f64) {
        let n = 200_000;
        let h = (law.p_hi() - law.p_lo()) / n as f64;
        let (mut int_f, mut int_f2) = (0.0, 0.0);
        for i in 0..=n {
            let p = law.p_lo() + i as f64 * h;
            let f = law.cdf(p);
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            int_f += w * f;
            int_f2 += w * f * f;
        }
        int_f *= h / 3.0;
        int_f2 *= h / 3.0;
        (law.p_hi() - int_f, law.p_hi() - 2.0 * int_f + int_f2)
    }

    #[test]
    fn closed_form_moments_match_quadrature() {
        for &eta in &[0.2, 1.0, 11.5] {
            let law = PriceLaw::from_eta(eta, 0.05).unwrap();
            let (e_p, e_pmin) = moments_by_quadrature(&law);
            assert_relative_eq!(law.e_p(), e_p, max_relative = 1e-8);
            assert_relative_eq!(law.e_pmin(), e_pmin, max_relative = 1e-8);
        }
    }

    #[test]
    fn quantile_round_trips_through_cdf() {
        let law = PriceLaw::from_eta(1.0, 0.05).unwrap();
        assert_relative_eq!(
            law.quantile(0.5),
            0.108_629_711_775_697_65,
            max_relative = 1e-13
        );
        for &eta in &[0.3, 1.0, 7.7] {
            let law = PriceLaw::from_eta(eta, 0.4).unwrap();
            for i in 0..=100 {
                let u = i as f64 / 100.0;
                assert!((law.cdf(law.quantile(u)) - u).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cdf_clamps_outside_support() {
        let law = PriceLaw::from_eta(2.0, 0.1).unwrap();
        assert_eq!(law.cdf(0.0), 0.0);
        assert_eq!(law.cdf(law.p_lo() * 0.999), 0.0);
        assert_eq!(law.cdf(law.p_hi() * 1.001), 1.0);
        assert_eq!(law.cdf(f64::INFINITY), 1.0);
    }

    #[test]
    fn expected_price_frozen_and_increasing_in_eta() {
        assert_relative_eq!(
            expected_price(1.0, 1.0),
            2.258_891_353_270_929_2, // ln 2 / (1 - ln 2)
            max_relative = 1e-13
        );
        let mut last = 0.0;
        for i in 1..=60 {
            let eta = 10f64.powf(-3.0 + 0.1 * i as f64);
            let e = expected_price(eta, 0.05);
            assert!(e > last, "E[p] must increase in eta (eta = {eta})");
            last = e;
        }
    }

    #[test]
    fn large_eta_series_agree_with_direct_evaluation() {
        // Near the switch points both branches are accurate; they must agree.
        for &eta in &[9.0e3, 9.99e3, 1.0e4, 1.01e4] {
            let direct = 1.0 - eta * ln1p_recip(eta);
            assert_relative_eq!(one_minus_eta_ln1p_recip(eta), direct, max_relative = 1e-10);
        }
        for &eta in &[900.0, 999.0, 1000.0, 1010.0] {
            let direct = (1.0 + 2.0 * eta) * ln1p_recip(eta) - 2.0;
            assert_relative_eq!(min_gap_coeff(eta), direct, max_relative = 1e-8);
        }
    }

    #[test]
    fn min_gap_ratio_approaches_one_third() {
        // eta * min_gap_coeff / one_minus_eta_ln1p_recip -> 1/3 as eta grows.
        let eta = 1e6;
        let ratio = eta * min_gap_coeff(eta) / one_minus_eta_ln1p_recip(eta);
        assert!((ratio - 1.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn profit_is_constant_on_the_support() {
        let d = DegreeDistribution::single(2).unwrap();
        let (q, delta, s) = (0.5, 0.5, 0.05);
        let eta = eta_baseline(&d, q, delta).unwrap();
        let law = PriceLaw::from_eta(eta, s).unwrap();
        let at_top = firm_profit_baseline(&d, q, delta, &law, law.p_hi()).unwrap();
        // Frozen: 0.359375 * p_hi(11.5, 0.05).
        assert_relative_eq!(at_top, 0.437_073_597_981_272_27, max_relative = 1e-12);
        for i in 0..=100 {
            let p = law.p_lo() + (law.p_hi() - law.p_lo()) * i as f64 / 100.0;
            let pi = firm_profit_baseline(&d, q, delta, &law, p).unwrap();
            assert_relative_eq!(pi, at_top, max_relative = 1e-9);
        }
        assert!(firm_profit_baseline(&d, q, delta, &law, law.p_lo() * 0.99).is_err());
        assert!(firm_profit_baseline(&d, q, delta, &law, law.p_hi() * 1.01).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn quantile_cdf_round_trip(
                eta in 0.01f64..100.0,
                s in 0.001f64..10.0,
                u in 0.0f64..=1.0,
            ) {
                let law = PriceLaw::from_eta(eta, s).unwrap();
                let p = law.quantile(u);
                prop_assert!(p >= law.p_lo() * (1.0 - 1e-12));
                prop_assert!(p <= law.p_hi() * (1.0 + 1e-12));
                prop_assert!((law.cdf(p) - u).abs() < 1e-10);
            }

            #[test]
            fn moment_ordering(eta in 0.01f64..1000.0, s in 0.001f64..10.0) {
                let law = PriceLaw::from_eta(eta, s).unwrap();
                prop_assert!(law.p_lo() > 0.0);
                prop_assert!(law.p_lo() <= law.e_pmin());
                prop_assert!(law.e_pmin() <= law.e_p());
                prop_assert!(law.e_p() <= law.p_hi());
            }
        }
    }
}
