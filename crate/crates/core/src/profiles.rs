//! Radial profile families used for initial data and as search
//! dictionaries for well depths and embedding constants. Every profile
//! vanishes at `r = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::RadialMesh;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `A(1 − r²)`
    Parabola { amplitude: f64 },
    /// `A(1 − r²)^m`
    Power { amplitude: f64, exponent: f64 },
    /// `A(e^{−r²/w²} − e^{−1/w²})`
    Gaussian { amplitude: f64, width: f64 },
    /// `A(1 − r^b)`
    Flat { amplitude: f64, sharpness: f64 },
    /// `A cos(πr/2)`
    Cosine { amplitude: f64 },
    /// `A((r² + ε²)^{−β/2} − (1 + ε²)^{−β/2})`, close to Hardy extremals
    /// when `β → (n−2)/2` and `ε → 0`.
    Singular {
        amplitude: f64,
        exponent: f64,
        core: f64,
    },
}

impl Profile {
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            Profile::Parabola { amplitude } => amplitude * (1.0 - r * r),
            Profile::Power {
                amplitude,
                exponent,
            } => amplitude * (1.0 - r * r).max(0.0).powf(exponent),
            Profile::Gaussian { amplitude, width } => {
                let w2 = width * width;
                amplitude * ((-r * r / w2).exp() - (-1.0 / w2).exp())
            }
            Profile::Flat {
                amplitude,
                sharpness,
            } => amplitude * (1.0 - r.powf(sharpness)),
            Profile::Cosine { amplitude } => amplitude * (0.5 * std::f64::consts::PI * r).cos(),
            Profile::Singular {
                amplitude,
                exponent,
                core,
            } => {
                let e2 = core * core;
                amplitude * ((r * r + e2).powf(-0.5 * exponent) - (1.0 + e2).powf(-0.5 * exponent))
            }
        }
    }

    pub fn amplitude(&self) -> f64 {
        match *self {
            Profile::Parabola { amplitude }
            | Profile::Power { amplitude, .. }
            | Profile::Gaussian { amplitude, .. }
            | Profile::Flat { amplitude, .. }
            | Profile::Cosine { amplitude }
            | Profile::Singular { amplitude, .. } => amplitude,
        }
    }

    pub fn with_amplitude(mut self, a: f64) -> Self {
        match &mut self {
            Profile::Parabola { amplitude }
            | Profile::Power { amplitude, .. }
            | Profile::Gaussian { amplitude, .. }
            | Profile::Flat { amplitude, .. }
            | Profile::Cosine { amplitude }
            | Profile::Singular { amplitude, .. } => *amplitude = a,
        }
        self
    }

    /// Shape parameters other than the amplitude, for coordinate search.
    pub fn shape_params(&self) -> Vec<f64> {
        match *self {
            Profile::Parabola { .. } | Profile::Cosine { .. } => vec![],
            Profile::Power { exponent, .. } => vec![exponent],
            Profile::Gaussian { width, .. } => vec![width],
            Profile::Flat { sharpness, .. } => vec![sharpness],
            Profile::Singular { exponent, core, .. } => vec![exponent, core],
        }
    }

    /// Rebuilds the profile with new shape parameters, clamped to the
    /// admissible range `[lo, hi]` of each family.
    pub fn with_shape_params(self, params: &[f64]) -> Self {
        let clamp = |x: f64, lo: f64, hi: f64| x.clamp(lo, hi);
        match self {
            Profile::Parabola { .. } | Profile::Cosine { .. } => self,
            Profile::Power { amplitude, .. } => Profile::Power {
                amplitude,
                exponent: clamp(params[0], 1.0, 40.0),
            },
            Profile::Gaussian { amplitude, .. } => Profile::Gaussian {
                amplitude,
                width: clamp(params[0], 0.02, 5.0),
            },
            Profile::Flat { amplitude, .. } => Profile::Flat {
                amplitude,
                sharpness: clamp(params[0], 1.0, 60.0),
            },
            Profile::Singular { amplitude, .. } => Profile::Singular {
                amplitude,
                exponent: clamp(params[0], 0.01, 4.0),
                core: clamp(params[1], 1e-4, 2.0),
            },
        }
    }

    pub fn sample(&self, mesh: &RadialMesh) -> Vec<f64> {
        mesh.sample(|r| self.value(r))
    }
}

/// Named profile dictionaries.
pub fn dictionary(id: &str) -> Result<Vec<Profile>> {
    match id {
        "parabola" => Ok(vec![Profile::Parabola { amplitude: 1.0 }]),
        "standard" => Ok(standard_dictionary()),
        other => Err(Error::Config(format!("unknown dictionary id {other:?}"))),
    }
}

pub fn standard_dictionary() -> Vec<Profile> {
    let mut d = vec![
        Profile::Parabola { amplitude: 1.0 },
        Profile::Cosine { amplitude: 1.0 },
    ];
    for &m in &[2.0, 3.0, 5.0] {
        d.push(Profile::Power {
            amplitude: 1.0,
            exponent: m,
        });
    }
    for &w in &[0.15, 0.3, 0.6] {
        d.push(Profile::Gaussian {
            amplitude: 1.0,
            width: w,
        });
    }
    for &b in &[4.0, 8.0] {
        d.push(Profile::Flat {
            amplitude: 1.0,
            sharpness: b,
        });
    }
    d.push(Profile::Singular {
        amplitude: 1.0,
        exponent: 0.3,
        core: 0.05,
    });
    d
}
