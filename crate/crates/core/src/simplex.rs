//! Points on the open simplex and the ratio / additive log-ratio charts.
//!
//! Both maps drop the last coordinate: a composition `x` of length `n` is
//! represented by its first `n - 1` coordinates, and every Jacobian here is
//! the Jacobian of the inverse map into those `n - 1` coordinates.

use crate::error::{contract, domain, Result};
use crate::numeric::ln_sum_exp;

/// Entries at or below this are treated as lying on the simplex boundary.
pub const BOUNDARY_FLOOR: f64 = 1e-300;

/// Largest tolerated `|sum - 1|` before renormalization is refused.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// A point on the open simplex: `n >= 2` positive entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Composition(Vec<f64>);

impl Composition {
    /// Validates and renormalizes `entries`.
    ///
    /// Entries must be finite and greater than [`BOUNDARY_FLOOR`]; the raw sum
    /// must be within [`SUM_TOLERANCE`] of one. The stored vector is divided
    /// by its sum.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(contract(format!(
                "a composition needs at least 2 parts, got {}",
                entries.len()
            )));
        }
        for (i, &x) in entries.iter().enumerate() {
            if !x.is_finite() || x <= BOUNDARY_FLOOR {
                return Err(domain(format!(
                    "part {} = {x} is not an interior simplex coordinate",
                    i + 1
                )));
            }
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(contract(format!("parts sum to {sum}, not 1")));
        }
        Ok(Self::normalized(entries))
    }

    /// Builds a composition from positive weights with any total.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(contract("a composition needs at least 2 parts"));
        }
        if weights.iter().any(|&w| !w.is_finite() || w <= 0.0) {
            return Err(domain("weights must be finite and positive"));
        }
        Ok(Self::normalized(weights))
    }

    fn normalized(mut entries: Vec<f64>) -> Self {
        let sum: f64 = entries.iter().sum();
        entries.iter_mut().for_each(|x| *x /= sum);
        Composition(entries)
    }

    /// For results of exact inverse maps: positive entries that already sum
    /// to one up to rounding. Underflow to zero is reported as a domain error.
    fn from_inverse_map(entries: Vec<f64>) -> Result<Self> {
        if let Some(i) = entries.iter().position(|&x| !(x > 0.0)) {
            return Err(domain(format!(
                "part {} underflowed to the simplex boundary",
                i + 1
            )));
        }
        Ok(Self::normalized(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    fn last(&self) -> f64 {
        self.0[self.0.len() - 1]
    }
}

/// Ratio coordinates `y_i = x_i / x_n`, `i < n`, with `z = 1 + sum y`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioVector {
    entries: Vec<f64>,
    z: f64,
}

impl RatioVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(contract("ratio vector must have at least one entry"));
        }
        if let Some(i) = entries
            .iter()
            .position(|&y| !y.is_finite() || y < f64::MIN_POSITIVE)
        {
            return Err(domain(format!(
                "ratio entry {} = {} must be positive and finite",
                i + 1,
                entries[i]
            )));
        }
        let z = 1.0 + entries.iter().sum::<f64>();
        if !z.is_finite() {
            return Err(domain("ratio entries overflow 1 + sum"));
        }
        Ok(RatioVector { entries, z })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `1 + sum y_i`.
    pub fn z(&self) -> f64 {
        self.z
    }

    /// `ln z`, computed as `ln_1p(sum y)`.
    pub fn ln_z(&self) -> f64 {
        self.entries.iter().sum::<f64>().ln_1p()
    }
}

/// Additive log-ratio coordinates `y_i = ln(x_i / x_n)`, `i < n`.
///
/// Stores `ln k` where `k = 1 + sum exp(y_i)`, so very large entries do not
/// overflow.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRatioVector {
    entries: Vec<f64>,
    ln_k: f64,
}

impl LogRatioVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(contract("log-ratio vector must have at least one entry"));
        }
        if let Some(i) = entries.iter().position(|y| !y.is_finite()) {
            return Err(domain(format!("log-ratio entry {} is not finite", i + 1)));
        }
        let ln_k = ln_sum_exp(std::iter::once(0.0).chain(entries.iter().copied()));
        Ok(LogRatioVector { entries, ln_k })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `k = 1 + sum exp(y_i)`; infinite if it overflows, see [`Self::ln_k`].
    pub fn k(&self) -> f64 {
        self.ln_k.exp()
    }

    pub fn ln_k(&self) -> f64 {
        self.ln_k
    }
}

pub fn ratio_forward(x: &Composition) -> RatioVector {
    let last = x.last();
    let entries: Vec<f64> = x.0[..x.len() - 1].iter().map(|&xi| xi / last).collect();
    let z = 1.0 + entries.iter().sum::<f64>();
    RatioVector { entries, z }
}

/// `x_i = y_i / z` for `i < n`, `x_n = 1 / z`.
pub fn ratio_inverse(y: &RatioVector) -> Result<Composition> {
    let z = y.z;
    let mut entries: Vec<f64> = y.entries.iter().map(|&yi| yi / z).collect();
    entries.push(1.0 / z);
    Composition::from_inverse_map(entries)
}

pub fn log_ratio_forward(x: &Composition) -> LogRatioVector {
    let ln_last = x.last().ln();
    let entries: Vec<f64> = x.0[..x.len() - 1]
        .iter()
        .map(|&xi| xi.ln() - ln_last)
        .collect();
    let ln_k = ln_sum_exp(std::iter::once(0.0).chain(entries.iter().copied()));
    LogRatioVector { entries, ln_k }
}

/// Softmax with the reference coordinate pinned at zero.
pub fn log_ratio_inverse(y: &LogRatioVector) -> Result<Composition> {
    let shift = y.entries.iter().copied().fold(0.0, f64::max);
    let mut entries: Vec<f64> = y.entries.iter().map(|&yi| (yi - shift).exp()).collect();
    entries.push((-shift).exp());
    Composition::from_inverse_map(entries)
}

/// `ln |det J|` of the inverse ratio map, first `n - 1` coordinates:
/// `-n ln z` with `n = y.len() + 1`.
pub fn log_det_jacobian_ratio_inverse(y: &RatioVector) -> f64 {
    let n = (y.len() + 1) as f64;
    -n * y.ln_z()
}

/// `ln |det J|` of the inverse log-ratio map: `sum y_i - n ln k`.
pub fn log_det_jacobian_log_ratio_inverse(y: &LogRatioVector) -> f64 {
    let n = (y.len() + 1) as f64;
    y.entries.iter().sum::<f64>() - n * y.ln_k
}
