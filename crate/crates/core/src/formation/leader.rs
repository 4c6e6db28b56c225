use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Common velocity profile applied to every leader.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LeaderMotion {
    #[default]
    Stationary,
    Constant { velocity: Vec<f64> },
    /// Per axis `v_c(t) = amplitude_c sin(frequency_c t + phase_c)`.
    Sinusoidal { amplitude: Vec<f64>, frequency: Vec<f64>, phase: Vec<f64> },
}

impl LeaderMotion {
    pub fn validate(&self, d: usize) -> Result<()> {
        let check = |name: &str, v: &[f64]| {
            if v.len() != d {
                return Err(Error::InvalidConfig(format!(
                    "leader {name} has {} components, expected {d}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidConfig(format!("leader {name} is not finite")));
            }
            Ok(())
        };
        match self {
            Self::Stationary => Ok(()),
            Self::Constant { velocity } => check("velocity", velocity),
            Self::Sinusoidal { amplitude, frequency, phase } => {
                check("amplitude", amplitude)?;
                check("frequency", frequency)?;
                check("phase", phase)
            }
        }
    }

    pub fn is_stationary(&self) -> bool {
        match self {
            Self::Stationary => true,
            Self::Constant { velocity } => velocity.iter().all(|&v| v == 0.0),
            Self::Sinusoidal { amplitude, .. } => amplitude.iter().all(|&a| a == 0.0),
        }
    }

    pub fn velocity(&self, t: f64, d: usize) -> Vec<f64> {
        match self {
            Self::Stationary => vec![0.0; d],
            Self::Constant { velocity } => velocity.clone(),
            Self::Sinusoidal { amplitude, frequency, phase } => (0..d)
                .map(|c| amplitude[c] * (frequency[c] * t + phase[c]).sin())
                .collect(),
        }
    }

    pub fn acceleration(&self, t: f64, d: usize) -> Vec<f64> {
        match self {
            Self::Stationary | Self::Constant { .. } => vec![0.0; d],
            Self::Sinusoidal { amplitude, frequency, phase } => (0..d)
                .map(|c| amplitude[c] * frequency[c] * (frequency[c] * t + phase[c]).cos())
                .collect(),
        }
    }
}
