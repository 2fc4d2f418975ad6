//! Versioned JSON document for [`CurveModel`].
//!
//! Samples are not stored; they are regenerated from the plane, the
//! coefficients and the u-domain, and the stored arc length must agree with
//! the regenerated polyline.

use super::{CurveModel, Provenance};
use crate::error::{Error, Result};
use crate::spectral::{PlanarityMeasure, PlaneFrame};
use serde::{Deserialize, Serialize};

pub const MODEL_VERSION: u32 = 1;

/// Largest accepted gap between stored and recomputed arc length.
const ARC_LENGTH_TOLERANCE: f64 = 1e-6;
const ORTHONORMAL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ModelDocument {
    version: u32,
    plane: PlaneFrame,
    coefficients: [f64; 4],
    u_domain: [f64; 2],
    sample_count: usize,
    arc_length: f64,
    planarity: PlanarityMeasure,
    provenance: Option<Provenance>,
}

/// Pretty-printed JSON, byte-stable for identical models.
pub fn serialize_model(model: &CurveModel) -> String {
    let doc = ModelDocument {
        version: MODEL_VERSION,
        plane: model.plane,
        coefficients: model.coefficients,
        u_domain: model.u_domain,
        sample_count: model.samples.len(),
        arc_length: model.arc_length,
        planarity: model.planarity,
        provenance: model.provenance.clone(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("model document serializes");
    s.push('\n');
    s
}

pub fn deserialize_model(text: &str) -> Result<CurveModel> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::MalformedDocument(e.to_string()))?;
    let version = value
        .get("version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Error::MalformedDocument("missing version".into()))?;
    if version != MODEL_VERSION as u64 {
        return Err(Error::VersionMismatch {
            found: version as u32,
            expected: MODEL_VERSION,
        });
    }
    let doc: ModelDocument =
        serde_json::from_value(value).map_err(|e| Error::MalformedDocument(e.to_string()))?;
    check_frame(&doc.plane)?;
    let model = CurveModel::from_parts(
        doc.plane,
        doc.coefficients,
        doc.u_domain,
        doc.sample_count,
        doc.planarity,
        doc.provenance,
    )
    .map_err(|e| Error::MalformedDocument(e.to_string()))?;
    if !((model.arc_length - doc.arc_length).abs() <= ARC_LENGTH_TOLERANCE) {
        return Err(Error::MalformedDocument(format!(
            "stored arc length {} disagrees with recomputed {}",
            doc.arc_length, model.arc_length
        )));
    }
    Ok(model)
}

fn check_frame(p: &PlaneFrame) -> Result<()> {
    let axes = [p.axis_u, p.axis_v, p.normal];
    for (i, a) in axes.iter().enumerate() {
        if (a.norm() - 1.0).abs() > ORTHONORMAL_TOLERANCE {
            return Err(Error::MalformedDocument(format!(
                "plane axis {i} is not unit length"
            )));
        }
        for b in &axes[i + 1..] {
            if a.dot(*b).abs() > ORTHONORMAL_TOLERANCE {
                return Err(Error::MalformedDocument(
                    "plane axes are not orthogonal".into(),
                ));
            }
        }
    }
    if !p.origin.is_finite() {
        return Err(Error::MalformedDocument("non-finite plane origin".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::RgbPoint;
    use crate::curve::{fit_curve_points, CurveConfig};

    fn model() -> CurveModel {
        let pts: Vec<_> = (0..50)
            .map(|i| {
                let t = i as f64 / 49.0;
                RgbPoint::new(
                    40.0 + 170.0 * t,
                    25.0 + 120.0 * t * t,
                    15.0 + 50.0 * t - 20.0 * t * t * t,
                )
            })
            .collect();
        fit_curve_points(&pts, None, &CurveConfig::default()).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let m = model().with_provenance(Provenance {
            source_hash: "abc".into(),
            quantizer: "minimum-variance".into(),
            palette_size: 50,
        });
        let text = serialize_model(&m);
        let back = deserialize_model(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(serialize_model(&back), text);
    }

    #[test]
    fn missing_coefficients_is_malformed() {
        let mut v: serde_json::Value = serde_json::from_str(&serialize_model(&model())).unwrap();
        v.as_object_mut().unwrap().remove("coefficients");
        let r = deserialize_model(&v.to_string());
        assert!(matches!(r, Err(Error::MalformedDocument(_))), "{r:?}");
    }

    #[test]
    fn inconsistent_arc_length_is_malformed() {
        let m = model();
        let mut v: serde_json::Value = serde_json::from_str(&serialize_model(&m)).unwrap();
        v["arcLength"] = serde_json::json!(m.arc_length() + 2e-6);
        assert!(matches!(
            deserialize_model(&v.to_string()),
            Err(Error::MalformedDocument(_))
        ));
        v["arcLength"] = serde_json::json!(m.arc_length() + 5e-7);
        assert!(deserialize_model(&v.to_string()).is_ok());
    }

    #[test]
    fn other_versions_are_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(&serialize_model(&model())).unwrap();
        v["version"] = serde_json::json!(2);
        assert_eq!(
            deserialize_model(&v.to_string()),
            Err(Error::VersionMismatch {
                found: 2,
                expected: 1
            })
        );
        assert!(matches!(
            deserialize_model("not json"),
            Err(Error::MalformedDocument(_))
        ));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(&serialize_model(&model())).unwrap();
        v["extra"] = serde_json::json!(1);
        assert!(matches!(
            deserialize_model(&v.to_string()),
            Err(Error::MalformedDocument(_))
        ));
    }
}
