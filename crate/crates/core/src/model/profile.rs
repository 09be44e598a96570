use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// A named exogenous time series. The forecast spans the simulation; the
/// nowcast, when present, is a better short-term estimate consulted for the
/// first steps of each planning window.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Profile {
    pub forecast: Vec<f64>,
    pub nowcast: Option<Vec<f64>>,
}

impl Profile {
    pub fn forecast_only(values: Vec<f64>) -> Self {
        Profile {
            forecast: values,
            nowcast: None,
        }
    }
}

/// Profiles keyed by name. BTreeMap keeps iteration deterministic.
pub type TimeSeriesSet = BTreeMap<String, Profile>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProfileError {
    #[error("profile '{name}' has no value at step {index} (series length {len})")]
    OutOfData {
        name: String,
        index: usize,
        len: usize,
    },
    #[error("unknown profile '{name}'")]
    Unknown { name: String },
    #[error("forecast noise level must be nonnegative, got {sigma}")]
    NegativeSigma { sigma: f64 },
}

/// Value of the named profile at step `t + offset`, where `t` is a planning
/// window's start and `offset` the position within the window. Within the
/// nowcast window the nowcast series is used when available; beyond it, or
/// when the profile has no nowcast, the forecast applies.
pub fn profile_value(
    profiles: &TimeSeriesSet,
    name: &str,
    t: usize,
    offset: usize,
    nowcast_window: usize,
) -> Result<f64, ProfileError> {
    let profile = profiles.get(name).ok_or_else(|| ProfileError::Unknown {
        name: name.to_string(),
    })?;
    let series = match &profile.nowcast {
        Some(nowcast) if offset < nowcast_window => nowcast,
        _ => &profile.forecast,
    };
    let index = t + offset;
    series
        .get(index)
        .copied()
        .ok_or_else(|| ProfileError::OutOfData {
            name: name.to_string(),
            index,
            len: series.len(),
        })
}

/// Derive a synthetic forecast from a nowcast series by adding seeded
/// Gaussian noise, clipped at zero so profile values stay admissible.
/// The same seed always yields the same series.
pub fn generate_forecast_from_nowcast(
    nowcast: &[f64],
    sigma: f64,
    seed: u64,
) -> Result<Vec<f64>, ProfileError> {
    if sigma < 0.0 {
        return Err(ProfileError::NegativeSigma { sigma });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("finite nonnegative sigma");
    Ok(nowcast
        .iter()
        .map(|v| (v + normal.sample(&mut rng)).max(0.0))
        .collect())
}
