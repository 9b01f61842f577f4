//! TOML experiment definitions. The schema is documented in `docs/config.md`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::RadialMesh;
use crate::model::{ExponentField, InitialDatum, Model, ModulationCurve, SourceModulation};
use crate::profiles::{dictionary, Profile};
use crate::solver::SolverConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default = "default_exponent")]
    pub exponent: ExponentField,
    #[serde(default)]
    pub modulation: ModulationSection,
    #[serde(default = "default_initial")]
    pub initial: Profile,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub bounds: BoundsSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

fn default_exponent() -> ExponentField {
    ExponentField::Constant { p: 3.0 }
}

fn default_initial() -> Profile {
    Profile::Parabola { amplitude: 1.0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshSection {
    pub dimension: usize,
    pub nodes: usize,
    pub grading: f64,
}

impl Default for MeshSection {
    fn default() -> Self {
        Self {
            dimension: 3,
            nodes: 512,
            grading: 1.0,
        }
    }
}

/// `model = "constant"` takes `k`; `model = "saturating"` takes `k0` and
/// `k_limit`. `k_inf` defaults to the curve's limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationSection {
    pub model: String,
    pub k: Option<f64>,
    pub k0: Option<f64>,
    pub k_limit: Option<f64>,
    pub k_inf: Option<f64>,
}

impl Default for ModulationSection {
    fn default() -> Self {
        Self {
            model: "constant".into(),
            k: Some(1.0),
            k0: None,
            k_limit: None,
            k_inf: None,
        }
    }
}

impl ModulationSection {
    pub fn build(&self) -> Result<SourceModulation> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| {
                Error::Config(format!("modulation model {:?} needs `{name}`", self.model))
            })
        };
        let forbid = |v: Option<f64>, name: &str| match v {
            Some(_) => Err(Error::Config(format!(
                "modulation model {:?} does not take `{name}`",
                self.model
            ))),
            None => Ok(()),
        };
        let curve = match self.model.as_str() {
            "constant" => {
                forbid(self.k0, "k0")?;
                forbid(self.k_limit, "k_limit")?;
                ModulationCurve::Constant {
                    k: need(self.k, "k")?,
                }
            }
            "saturating" => {
                forbid(self.k, "k")?;
                ModulationCurve::Saturating {
                    k0: need(self.k0, "k0")?,
                    k_limit: need(self.k_limit, "k_limit")?,
                }
            }
            other => return Err(Error::Config(format!("unknown modulation model {other:?}"))),
        };
        Ok(match self.k_inf {
            Some(k_inf) => SourceModulation::new(curve, k_inf),
            None => SourceModulation::from_curve(curve),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsSection {
    pub t0: f64,
    pub dictionary: String,
    pub delta: f64,
}

impl Default for BoundsSection {
    fn default() -> Self {
        Self {
            t0: 0.0,
            dictionary: "standard".into(),
            delta: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    /// Drops the exponent-rate term from the energy identity check.
    pub disable_p_term: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Initial amplitude.
    Amplitude,
    /// Constant exponent value.
    P,
    /// Constant modulation value.
    K,
}

impl SweepParameter {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParameter::Amplitude => "amplitude",
            SweepParameter::P => "p",
            SweepParameter::K => "k",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn mesh(&self) -> Result<RadialMesh> {
        RadialMesh::new(self.mesh.dimension, self.mesh.nodes, self.mesh.grading)
    }

    pub fn model(&self) -> Result<Model> {
        Ok(Model::new(self.exponent, self.modulation.build()?))
    }

    pub fn initial_datum(&self, mesh: &RadialMesh) -> Result<InitialDatum> {
        InitialDatum::from_profile(mesh, &self.initial)
    }

    pub fn dictionary(&self) -> Result<Vec<Profile>> {
        dictionary(&self.bounds.dictionary)
    }

    /// Copy with one sweep parameter replaced.
    pub fn with_parameter(&self, parameter: SweepParameter, value: f64) -> Result<Self> {
        let mut c = self.clone();
        match parameter {
            SweepParameter::Amplitude => c.initial = c.initial.with_amplitude(value),
            SweepParameter::P => match c.exponent {
                ExponentField::Constant { .. } => c.exponent = ExponentField::Constant { p: value },
                _ => return Err(Error::Config("sweeping p needs a constant exponent".into())),
            },
            SweepParameter::K => {
                if c.modulation.model != "constant" {
                    return Err(Error::Config(
                        "sweeping k needs a constant modulation".into(),
                    ));
                }
                c.modulation.k = Some(value);
                if c.modulation.k_inf.is_some() {
                    c.modulation.k_inf = Some(value);
                }
            }
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_full_schema() {
        let c = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(c.seed, 0);
        assert_eq!(c.mesh, MeshSection::default());
        assert!(c.sweep.is_none());
        let text = r#"
            seed = 7
            [mesh]
            dimension = 4
            nodes = 256
            grading = 1.5
            [exponent]
            model = "separable"
            a = 2.5
            b = 0.1
            c = 0.2
            [modulation]
            model = "saturating"
            k0 = 1.0
            k_limit = 2.0
            [initial]
            family = "gaussian"
            amplitude = 3.0
            width = 0.4
            [solver]
            tau0 = 0.01
            t_end = 2.0
            [bounds]
            t0 = 0.5
            dictionary = "parabola"
            [verify]
            disable_p_term = true
            [sweep]
            parameter = "amplitude"
            values = [1.0, 2.0]
        "#;
        let c = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(
            c.exponent,
            ExponentField::Separable {
                a: 2.5,
                b: 0.1,
                c: 0.2
            }
        );
        let m = c.model().unwrap();
        assert_eq!(m.modulation.k_inf, 2.0);
        assert_eq!(c.solver.tau0, 0.01);
        assert_eq!(c.solver.growth_cap, 1.5);
        assert!(c.verify.disable_p_term);
        assert_eq!(c.sweep.unwrap().values, vec![1.0, 2.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ExperimentConfig::from_toml("[mesh]\nnodez = 3").is_err());
        assert!(ExperimentConfig::from_toml("bogus = 1").is_err());
        assert!(ExperimentConfig::from_toml("[exponent]\nmodel = \"cubic\"").is_err());
        let c =
            ExperimentConfig::from_toml("[modulation]\nmodel = \"saturating\"\nk0 = 1.0").unwrap();
        assert!(c.model().is_err());
        let c = ExperimentConfig::from_toml("[modulation]\nmodel = \"wave\"\nk = 1.0").unwrap();
        assert!(c.model().is_err());
    }

    #[test]
    fn parameter_substitution() {
        let c = ExperimentConfig::from_toml("").unwrap();
        let a = c.with_parameter(SweepParameter::Amplitude, 5.0).unwrap();
        assert_eq!(a.initial.amplitude(), 5.0);
        let p = c.with_parameter(SweepParameter::P, 2.5).unwrap();
        assert_eq!(p.exponent, ExponentField::Constant { p: 2.5 });
        let k = c.with_parameter(SweepParameter::K, 0.5).unwrap();
        assert_eq!(k.model().unwrap().modulation.value(3.0), 0.5);
    }
}
