use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Entries more negative than this are an error rather than round-off.
pub const NEGATIVE_TOL: f64 = 1e-10;
/// Allowed deviation of the total probability from one.
pub const NORMALISATION_TOL: f64 = 1e-9;

/// Single-detector counting distribution `p(0..=P)` with its first two moments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingDistribution {
    pub probabilities: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
}

impl CountingDistribution {
    /// Checks the invariants, clamps round-off negatives to zero and derives
    /// the moments from the table.
    pub fn from_probabilities(mut probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::Invariant("empty distribution".into()));
        }
        clamp_checked(&mut probabilities)?;
        let (mean, variance) = table_moments(&probabilities);
        Ok(Self { probabilities, mean, variance })
    }

    /// Like [`Self::from_probabilities`], but keeps externally known exact
    /// moments after checking them against the table. Table moments carry
    /// an absolute error of order `1e-15`, which swamps tiny variances.
    pub fn with_moments(probabilities: Vec<f64>, mean: f64, variance: f64) -> Result<Self> {
        let mut dist = Self::from_probabilities(probabilities)?;
        dist.mean = mean;
        dist.variance = variance;
        dist.check_moments()?;
        Ok(dist)
    }

    /// Poisson distribution with mean `mu`, truncated once the neglected
    /// mass drops below `1e-12`.
    pub fn poisson(mu: f64) -> Result<Self> {
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::Domain(format!("Poisson mean must be finite and non-negative, got {mu}")));
        }
        const MAX_MEAN: f64 = 1e7;
        if mu > MAX_MEAN {
            return Err(Error::Capacity { what: "Poisson mean", got: mu as usize, limit: MAX_MEAN as usize });
        }
        if mu == 0.0 {
            return Ok(Self { probabilities: vec![1.0], mean: 0.0, variance: 0.0 });
        }
        // unnormalised weights relative to the mode, walked outwards so that
        // large means neither overflow nor underflow
        let mode = mu.floor() as usize;
        let cutoff = 1e-17;
        let mut up = vec![1.0];
        let mut w = 1.0;
        let mut k = mode;
        loop {
            k += 1;
            w *= mu / k as f64;
            if w < cutoff && k as f64 > mu + 1.0 {
                break;
            }
            up.push(w);
        }
        let mut down = Vec::new();
        let mut w = 1.0;
        let mut k = mode;
        while k > 0 {
            w *= k as f64 / mu;
            k -= 1;
            if w < cutoff {
                break;
            }
            down.push(w);
        }
        let lo = mode - down.len();
        let mut probabilities = vec![0.0; lo];
        probabilities.extend(down.iter().rev());
        probabilities.extend(&up);
        let total: f64 = probabilities.iter().sum();
        for p in &mut probabilities {
            *p /= total;
        }
        let dist = Self { probabilities, mean: mu, variance: mu };
        dist.check_moments()?;
        Ok(dist)
    }

    pub fn max_count(&self) -> usize {
        self.probabilities.len() - 1
    }

    pub fn get(&self, m: usize) -> f64 {
        self.probabilities.get(m).copied().unwrap_or(0.0)
    }

    /// `Q(λ) = Σ_m p(m) (1-λ)^m`.
    pub fn generating(&self, lambda: f64) -> f64 {
        let x = 1.0 - lambda;
        self.probabilities.iter().rev().fold(0.0, |acc, &p| acc * x + p)
    }

    pub fn fano_factor(&self) -> f64 {
        self.variance / self.mean
    }

    /// Stored moments agree with the table.
    pub fn check_moments(&self) -> Result<()> {
        let (mean, variance) = table_moments(&self.probabilities);
        let scale = self.mean.abs().max(self.variance.abs()).max(1.0);
        if (mean - self.mean).abs() > NORMALISATION_TOL * scale
            || (variance - self.variance).abs() > NORMALISATION_TOL * scale
        {
            return Err(Error::Invariant(format!(
                "moments ({}, {}) disagree with table ({mean}, {variance})",
                self.mean, self.variance
            )));
        }
        Ok(())
    }
}

/// Total variation distance `½ Σ |p - q|`.
pub fn total_variation(p: &CountingDistribution, q: &CountingDistribution) -> f64 {
    let n = p.probabilities.len().max(q.probabilities.len());
    0.5 * (0..n).map(|m| (p.get(m) - q.get(m)).abs()).sum::<f64>()
}

fn clamp_checked(values: &mut [f64]) -> Result<()> {
    let mut total = 0.0;
    for (m, p) in values.iter_mut().enumerate() {
        if !p.is_finite() {
            return Err(Error::Invariant(format!("p[{m}] is not finite")));
        }
        if *p < -NEGATIVE_TOL {
            return Err(Error::Invariant(format!("p[{m}] = {p:e} is negative")));
        }
        total += *p;
        *p = p.max(0.0);
    }
    if (total - 1.0).abs() > NORMALISATION_TOL {
        return Err(Error::Invariant(format!("probabilities sum to {total}")));
    }
    Ok(())
}

fn table_moments(p: &[f64]) -> (f64, f64) {
    let mean: f64 = p.iter().enumerate().map(|(m, &x)| m as f64 * x).sum();
    let variance: f64 = p.iter().enumerate().map(|(m, &x)| (m as f64 - mean).powi(2) * x).sum();
    (mean, variance)
}

/// Joint distribution `p(m, n)` of counts at two detectors; rows index `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    pub probabilities: DMatrix<f64>,
    pub first: CountingDistribution,
    pub second: CountingDistribution,
    pub covariance: f64,
    /// See [`JointMoments::normalised_covariance`].
    pub normalised_covariance: f64,
}

impl JointDistribution {
    pub fn from_table(mut probabilities: DMatrix<f64>) -> Result<Self> {
        clamp_checked(probabilities.as_mut_slice())?;
        let first = CountingDistribution::from_probabilities(probabilities.column_sum().iter().copied().collect())?;
        let second = CountingDistribution::from_probabilities(probabilities.row_sum().iter().copied().collect())?;
        let mut cross = 0.0;
        for n in 0..probabilities.ncols() {
            for m in 0..probabilities.nrows() {
                cross += (m as f64 - first.mean) * (n as f64 - second.mean) * probabilities[(m, n)];
            }
        }
        let normalised_covariance = cross / first.variance / second.variance;
        Ok(Self { probabilities, first, second, covariance: cross, normalised_covariance })
    }

    /// Table plus exact moments, checked against the table as in
    /// [`CountingDistribution::with_moments`].
    pub fn with_moments(probabilities: DMatrix<f64>, moments: JointMoments) -> Result<Self> {
        let mut joint = Self::from_table(probabilities)?;
        let scale = moments.mean.iter().chain(&moments.variance).fold(1.0f64, |a, b| a.max(b.abs()));
        if (joint.covariance - moments.covariance).abs() > NORMALISATION_TOL * scale {
            return Err(Error::Invariant(format!(
                "covariance {} disagrees with table {}",
                moments.covariance, joint.covariance
            )));
        }
        joint.first = CountingDistribution::with_moments(joint.first.probabilities, moments.mean[0], moments.variance[0])?;
        joint.second =
            CountingDistribution::with_moments(joint.second.probabilities, moments.mean[1], moments.variance[1])?;
        joint.covariance = moments.covariance;
        joint.normalised_covariance = moments.normalised_covariance;
        Ok(joint)
    }

    /// Product measure of two independent marginals; covariance is exactly 0.
    pub fn independent(first: CountingDistribution, second: CountingDistribution) -> Self {
        let probabilities = DMatrix::from_fn(first.probabilities.len(), second.probabilities.len(), |m, n| {
            first.probabilities[m] * second.probabilities[n]
        });
        let normalised_covariance = 0.0 / first.variance / second.variance;
        Self { probabilities, first, second, covariance: 0.0, normalised_covariance }
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        if m < self.probabilities.nrows() && n < self.probabilities.ncols() {
            self.probabilities[(m, n)]
        } else {
            0.0
        }
    }

    pub fn moments(&self) -> JointMoments {
        JointMoments {
            mean: [self.first.mean, self.second.mean],
            variance: [self.first.variance, self.second.variance],
            covariance: self.covariance,
            normalised_covariance: self.normalised_covariance,
        }
    }

    /// Non-zero entries as `(m, n, p)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let (rows, cols) = self.probabilities.shape();
        (0..rows).flat_map(move |m| (0..cols).map(move |n| (m, n, self.probabilities[(m, n)])))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointMoments {
    pub mean: [f64; 2],
    pub variance: [f64; 2],
    pub covariance: f64,
    /// `cov / (σ₁² σ₂²)`, computed so that it survives when the covariance
    /// itself underflows (detectors deep in the tails of the cloud).
    pub normalised_covariance: f64,
}

impl JointMoments {
    pub fn new(mean: [f64; 2], variance: [f64; 2], covariance: f64) -> Self {
        let normalised_covariance = covariance / variance[0] / variance[1];
        Self { mean, variance, covariance, normalised_covariance }
    }

    /// `cov(m,n) / (σ²(m) σ²(n))` — normalised by the product of the
    /// variances, not of the standard deviations.
    pub fn corr(&self) -> Result<f64> {
        self.nonzero_variances()?;
        Ok(self.normalised_covariance)
    }

    /// Pearson coefficient `cov / (σ(m) σ(n))`, bounded by one.
    pub fn pearson(&self) -> Result<f64> {
        self.nonzero_variances()?;
        Ok(self.normalised_covariance * self.variance[0].sqrt() * self.variance[1].sqrt())
    }

    fn nonzero_variances(&self) -> Result<()> {
        if self.variance[0] <= 0.0 {
            return Err(Error::UndefinedCorrelation("first detector"));
        }
        if self.variance[1] <= 0.0 {
            return Err(Error::UndefinedCorrelation("second detector"));
        }
        Ok(())
    }
}

/// Means, variances, covariance and `corr` of a joint distribution.
pub fn moments_and_corr(joint: &JointDistribution) -> (JointMoments, Result<f64>) {
    let moments = joint.moments();
    (moments, moments.corr())
}
