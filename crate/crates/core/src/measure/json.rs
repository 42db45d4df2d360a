//! JSON-compatible measure specification documents.
//!
//! Accepted shapes (field names are fixed):
//!
//! ```json
//! {"family":"semicircle","variance":0.25}
//! {"family":"marchenko_pastur","ratio":0.5,"scale":1.0}
//! {"family":"point_mass","a":0.0}
//! {"family":"bernoulli_symmetric"}
//! {"family":"empirical","points":[0.1,-0.4,2.0]}
//! {"atoms":[[-1,0.5],[1,0.5]]}
//! {"density":{"intervals":[{"a":-1,"b":1,"nodes":[-1,0,1],"values":[0.5,0.5,0.5]}]}}
//! ```
//!
//! `atoms` and `density` may be combined into a mixed measure.

use serde::{Deserialize, Serialize};

use super::{DensityInterval, SpectralMeasure};
use crate::error::{Error, Result};

/// Parsed (but not yet validated) measure document.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<(f64, f64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<DensitySpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DensitySpec {
    pub intervals: Vec<IntervalSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IntervalSpec {
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

impl MeasureSpec {
    pub fn from_json(text: &str) -> Result<MeasureSpec> {
        serde_json::from_str(text).map_err(|e| Error::Measure(format!("bad measure document: {e}")))
    }

    /// Validate and build the measure.
    pub fn build(&self) -> Result<SpectralMeasure> {
        if let Some(name) = &self.family {
            if self.atoms.is_some() || self.density.is_some() {
                return Err(Error::Measure(
                    "a measure document carries either a family or atoms/density parts, not both".into(),
                ));
            }
            let need = |field: Option<f64>, what: &str| {
                field.ok_or_else(|| Error::Measure(format!("family '{name}' requires field '{what}'")))
            };
            return match name.as_str() {
                "semicircle" => SpectralMeasure::semicircle(need(self.variance, "variance")?),
                "marchenko_pastur" => SpectralMeasure::marchenko_pastur(
                    need(self.ratio, "ratio")?,
                    need(self.scale, "scale")?,
                ),
                "point_mass" => Ok(SpectralMeasure::point_mass(need(self.a, "a")?)),
                "bernoulli_symmetric" => Ok(SpectralMeasure::bernoulli_symmetric()),
                "empirical" => {
                    let pts = self
                        .points
                        .as_ref()
                        .ok_or_else(|| Error::Measure("family 'empirical' requires field 'points'".into()))?;
                    SpectralMeasure::empirical(pts)
                }
                other => Err(Error::Measure(format!("unknown family '{other}'"))),
            };
        }
        let atoms = self.atoms.clone().unwrap_or_default();
        let density: Vec<DensityInterval> = self
            .density
            .as_ref()
            .map(|d| {
                d.intervals
                    .iter()
                    .map(|i| DensityInterval {
                        a: i.a,
                        b: i.b,
                        nodes: i.nodes.clone(),
                        values: i.values.clone(),
                    })
                    .collect()
            })
            .unwrap_or_default();
        if atoms.is_empty() && density.is_empty() {
            return Err(Error::Measure("empty measure document".into()));
        }
        SpectralMeasure::from_parts(atoms, density)
    }

    pub fn parse_and_build(text: &str) -> Result<SpectralMeasure> {
        Self::from_json(text)?.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_documents_round_trip() {
        let m = MeasureSpec::parse_and_build(r#"{"family":"semicircle","variance":0.25}"#).unwrap();
        assert_eq!(m.support().hull(), (-1.0, 1.0));

        let m = MeasureSpec::parse_and_build(r#"{"family":"point_mass","a":2.5}"#).unwrap();
        assert_eq!(m.point_mass_position(), Some(2.5));

        let m = MeasureSpec::parse_and_build(r#"{"family":"marchenko_pastur","ratio":2.0,"scale":1.0}"#)
            .unwrap();
        assert_eq!(m.atoms().len(), 1); // atom at zero for ratio > 1
    }

    #[test]
    fn atom_document() {
        let m = MeasureSpec::parse_and_build(r#"{"atoms":[[-1,0.5],[1,0.5]]}"#).unwrap();
        assert_eq!(m.atoms(), &[(-1.0, 0.5), (1.0, 0.5)]);
    }

    #[test]
    fn density_document_and_mass_check() {
        let ok = r#"{"density":{"intervals":[{"a":0,"b":2,"nodes":[0,1,2],"values":[0.5,0.5,0.5]}]}}"#;
        let m = MeasureSpec::parse_and_build(ok).unwrap();
        assert!((m.mass() - 1.0).abs() < 1e-12);

        let bad = r#"{"density":{"intervals":[{"a":0,"b":2,"nodes":[0,1,2],"values":[0.9,0.9,0.9]}]}}"#;
        assert!(MeasureSpec::parse_and_build(bad).is_err());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(MeasureSpec::from_json(r#"{"famly":"semicircle"}"#).is_err());
    }
}
