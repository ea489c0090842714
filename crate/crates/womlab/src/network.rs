//! Degree distributions of the social network and their generating-function
//! transforms.
//!
//! Consumers have `k in 1..=kmax` friends with probability `t(k)`. Everything
//! the pricing layer needs from the network is carried by the probability
//! generating function `tau(x) = sum_k t(k) x^k` and by the two-price weight
//! `tau_tilde(q) = 1 + tau(1-q) - 2*tau(1-q/2)`: the chance that a
//! non-searching consumer hears at least two distinct prices when each friend
//! searches independently with probability `q` and picks a firm uniformly.

use crate::error::{Error, Result};

const MASS_SUM_TOL: f64 = 1e-12;

/// Use the exact even-order binomial expansion of the two-price weight below
/// this search probability. The direct three-power form cancels to a result
/// of order `k^2 w^2 / 4`, so its relative error blows up as `w` shrinks;
/// above the cutover the weight is large enough that the direct form keeps
/// full precision and costs O(1) instead of O(k).
const SMALL_W: f64 = 0.25;

/// Metadata kept when a distribution was built from a power law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawMeta {
    /// Exponent of `t(k) ~ k^gamma`.
    pub gamma: f64,
    /// Normalizing constant `n = 1 / sum_j j^gamma`, so `t(k) = n * k^gamma`.
    pub normalizer: f64,
}

/// Immutable degree distribution on `1..=kmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    mass: Vec<f64>,
    meta: Option<PowerLawMeta>,
}

impl DegreeDistribution {
    /// Builds a distribution from raw masses for `k = 1..=mass.len()`.
    ///
    /// Masses must be finite, non-negative, and sum to 1 within 1e-12.
    pub fn from_mass(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::invalid("degree distribution needs kmax >= 1"));
        }
        if mass.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::invalid(
                "degree masses must be finite and non-negative",
            ));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_SUM_TOL {
            return Err(Error::invalid(format!(
                "degree masses must sum to 1 (got {total:.17})"
            )));
        }
        Ok(DegreeDistribution { mass, meta: None })
    }

    /// Power-law distribution `t(k) = n * k^gamma` on `1..=kmax`.
    pub fn power_law(gamma: f64, kmax: usize) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::invalid("power-law exponent must be finite"));
        }
        if kmax == 0 {
            return Err(Error::invalid("power law needs kmax >= 1"));
        }
        let weights: Vec<f64> = (1..=kmax).map(|k| (k as f64).powf(gamma)).collect();
        let total: f64 = weights.iter().sum();
        if !total.is_finite() || total <= 0.0 {
            return Err(Error::Diverged(format!(
                "power-law weights overflow for gamma = {gamma}"
            )));
        }
        let mut dist = Self::from_mass(weights.iter().map(|w| w / total).collect())?;
        dist.meta = Some(PowerLawMeta {
            gamma,
            normalizer: 1.0 / total,
        });
        Ok(dist)
    }

    /// Degenerate distribution with all mass on degree `k`.
    pub fn single(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("degree must be >= 1"));
        }
        let mut mass = vec![0.0; k];
        mass[k - 1] = 1.0;
        Self::from_mass(mass)
    }

    /// Largest degree carried by the distribution.
    pub fn kmax(&self) -> usize {
        self.mass.len()
    }

    /// Mass vector for `k = 1..=kmax`.
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// `t(k)`; zero outside `1..=kmax`.
    pub fn t(&self, k: usize) -> f64 {
        if k == 0 || k > self.mass.len() {
            0.0
        } else {
            self.mass[k - 1]
        }
    }

    /// Mass of degree-1 consumers (they can never compare prices by waiting).
    pub fn t1(&self) -> f64 {
        self.mass[0]
    }

    /// Power-law metadata, if the distribution was built by [`Self::power_law`].
    pub fn meta(&self) -> Option<&PowerLawMeta> {
        self.meta.as_ref()
    }

    /// Probability generating function `tau(x) = sum_k t(k) x^k` on `[0, 1]`.
    pub fn pgf(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::invalid(format!("pgf argument {x} outside [0, 1]")));
        }
        let mut acc = 0.0;
        for &tk in self.mass.iter().rev() {
            acc = acc * x + tk;
        }
        Ok(acc * x)
    }

    /// Two-price weight `1 + tau(1-q) - 2*tau(1-q/2)`: the probability that a
    /// waiting consumer hears two distinct prices.
    ///
    /// Zero exactly when `q = 0` or `t(1) = 1`; strictly positive otherwise.
    pub fn tau_tilde(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::invalid(format!(
                "search probability {q} outside [0, 1]"
            )));
        }
        let mut total = 0.0;
        for (i, &tk) in self.mass.iter().enumerate() {
            if tk > 0.0 {
                total += tk * two_price_weight(i + 1, q);
            }
        }
        Ok(total)
    }

    /// Mean degree `sum_k k * t(k)`.
    pub fn mean_degree(&self) -> f64 {
        self.mass
            .iter()
            .enumerate()
            .map(|(i, &tk)| (i + 1) as f64 * tk)
            .sum()
    }

    /// Writes the distribution as a `k,t_k` text table.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,t_k\n");
        for (i, &tk) in self.mass.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, crate::textio::fmt_real(tk)));
        }
        out
    }

    /// Parses a table written by [`Self::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "k,t_k" => {}
            _ => return Err(Error::invalid("expected header line `k,t_k`")),
        }
        let mut mass = Vec::new();
        for (row, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (k_cell, t_cell) = line
                .split_once(',')
                .ok_or_else(|| Error::invalid(format!("row {}: expected two cells", row + 1)))?;
            let k: usize = k_cell
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("row {}: bad degree", row + 1)))?;
            if k != row + 1 {
                return Err(Error::invalid(format!(
                    "row {}: degrees must run 1..=kmax in order",
                    row + 1
                )));
            }
            let tk = crate::textio::parse_real(t_cell)
                .filter(|t| t.is_finite())
                .ok_or_else(|| Error::invalid(format!("row {}: bad mass", row + 1)))?;
            mass.push(tk);
        }
        Self::from_mass(mass)
    }
}

/// `1 + (1-w)^k - 2*(1-w/2)^k` evaluated without cancellation.
///
/// For small `w` this uses the exact binomial identity
/// `(a+h)^k + (a-h)^k - 2 a^k = 2 * sum_{j even >= 2} C(k,j) a^(k-j) h^j`
/// with `a = 1 - w/2`, `h = w/2`; every term is positive, so the result is
/// accurate (and non-negative) down to `w = 0`.
pub(crate) fn two_price_weight(k: usize, w: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&w));
    if k < 2 || w == 0.0 {
        return 0.0;
    }
    if w < SMALL_W {
        let a = 1.0 - 0.5 * w;
        let h = 0.5 * w;
        let ratio = (h / a) * (h / a);
        let kf = k as f64;
        // j = 2 term: C(k,2) a^(k-2) h^2.
        let mut term = 0.5 * kf * (kf - 1.0) * a.powi(k as i32 - 2) * h * h;
        let mut sum = 0.0;
        let mut j = 2usize;
        while j <= k {
            sum += term;
            let jf = j as f64;
            term *= (kf - jf) * (kf - jf - 1.0) / ((jf + 1.0) * (jf + 2.0)) * ratio;
            if term < sum * 1e-18 {
                break;
            }
            j += 2;
        }
        2.0 * sum
    } else {
        1.0 + (1.0 - w).powi(k as i32) - 2.0 * (1.0 - 0.5 * w).powi(k as i32)
    }
}
