//! Model files.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};
use crate::graded::{sym_dim, EvaluationModel, Generator, ModelMeta, PresentationModel};

use super::CanonicalModel;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct RawGenerator {
    degree: usize,
    coeffs: Value,
}

#[derive(Serialize, Deserialize)]
struct RawModel {
    format_version: u32,
    field: FieldSpec,
    n: usize,
    variables: Vec<String>,
    monomial_order: String,
    generators: Vec<RawGenerator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Value>>,
    expected_hilbert: BTreeMap<String, usize>,
    meta: ModelMeta,
}

impl CanonicalModel {
    pub fn to_json(&self) -> Value {
        let m = &self.presentation;
        let f = &m.field;
        let raw = RawModel {
            format_version: FORMAT_VERSION,
            field: f.spec().clone(),
            n: m.n,
            variables: m.variables.clone(),
            monomial_order: "grlex".into(),
            generators: m
                .generators
                .iter()
                .map(|g| RawGenerator {
                    degree: g.degree,
                    coeffs: f.encode_vec(&g.coeffs),
                })
                .collect(),
            points: self
                .points
                .as_ref()
                .map(|pts| pts.points().iter().map(|p| f.encode_vec(p)).collect()),
            expected_hilbert: m
                .expected_hilbert
                .iter()
                .map(|(q, d)| (q.to_string(), *d))
                .collect(),
            meta: m.meta.clone(),
        };
        serde_json::to_value(raw).expect("serializable")
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let version = v
            .get("format_version")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::MalformedFile("missing format_version".into()))?;
        if version != FORMAT_VERSION as u64 {
            return Err(Error::FormatVersionMismatch {
                found: version as u32,
                expected: FORMAT_VERSION,
            });
        }
        let raw: RawModel =
            serde_json::from_value(v.clone()).map_err(|e| Error::MalformedFile(e.to_string()))?;
        if raw.monomial_order != "grlex" {
            return Err(Error::MalformedFile(format!(
                "unsupported monomial order {:?}",
                raw.monomial_order
            )));
        }
        if raw.n == 0 || raw.variables.len() != raw.n {
            return Err(Error::MalformedFile("variable count".into()));
        }
        let field = Field::new(raw.field)?;
        let generators = raw
            .generators
            .iter()
            .map(|g| {
                let coeffs = field.decode_vec(&g.coeffs)?;
                if coeffs.len() != sym_dim(raw.n, g.degree) {
                    return Err(Error::MalformedFile(format!(
                        "generator of degree {} has {} coefficients",
                        g.degree,
                        coeffs.len()
                    )));
                }
                Ok(Generator {
                    degree: g.degree,
                    coeffs,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut presentation = PresentationModel::new(&field, raw.n, generators)?;
        presentation.variables = raw.variables;
        presentation.meta = raw.meta;
        presentation.expected_hilbert = raw
            .expected_hilbert
            .iter()
            .map(|(q, d)| {
                q.parse::<usize>()
                    .map(|q| (q, *d))
                    .map_err(|_| Error::MalformedFile(format!("Hilbert degree {q:?}")))
            })
            .collect::<Result<_>>()?;
        let points = raw
            .points
            .map(|pts| {
                let pts = pts
                    .iter()
                    .map(|p| field.decode_vec(p))
                    .collect::<Result<Vec<_>>>()?;
                EvaluationModel::from_points(&field, raw.n, &pts)
                    .map_err(|e| Error::MalformedFile(format!("points: {e}")))
            })
            .transpose()?;
        Ok(CanonicalModel {
            presentation,
            points,
        })
    }
}

pub fn save_model(path: &Path, model: &CanonicalModel) -> Result<()> {
    let text = serde_json::to_string_pretty(&model.to_json())?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<CanonicalModel> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::MalformedFile(e.to_string()))?;
    CanonicalModel::from_json(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::Representation;
    use crate::koszul::betti_table;
    use crate::models::{gen_canonical, Variant};

    #[test]
    fn round_trip_preserves_everything() {
        let f = Field::prime(101).unwrap();
        let m = gen_canonical(4, Variant::Ci, &f, 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g4.json");
        save_model(&path, &m).unwrap();
        let back = load_model(&path).unwrap();
        assert_eq!(back.presentation.generators, m.presentation.generators);
        assert_eq!(
            back.presentation.expected_hilbert,
            m.presentation.expected_hilbert
        );
        assert_eq!(back.presentation.meta, m.presentation.meta);
        assert_eq!(back.to_json(), m.to_json());
        let row = |m: &CanonicalModel| {
            let r = m.ring(Representation::Presentation).unwrap();
            betti_table(&r, (0, 2), (1, 1)).unwrap().grid
        };
        assert_eq!(row(&back), row(&m));
    }

    #[test]
    fn extension_field_models_round_trip() {
        let f = Field::new(FieldSpec {
            p: 7,
            m: 2,
            min_poly: vec![1, 0, 1],
        })
        .unwrap();
        let m = gen_canonical(4, Variant::Ci, &f, 1).unwrap();
        let back = CanonicalModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back.to_json(), m.to_json());
    }

    #[test]
    fn bad_files_are_rejected() {
        let f = Field::prime(101).unwrap();
        let m = gen_canonical(4, Variant::Ci, &f, 3).unwrap();
        let mut v = m.to_json();
        v["field"]["p"] = 100.into();
        assert!(matches!(
            CanonicalModel::from_json(&v),
            Err(Error::InvalidField(_))
        ));
        let mut v = m.to_json();
        v["format_version"] = 2.into();
        assert!(matches!(
            CanonicalModel::from_json(&v),
            Err(Error::FormatVersionMismatch {
                found: 2,
                expected: 1
            })
        ));
        let mut v = m.to_json();
        v["generators"][0]["coeffs"] = serde_json::json!([1, 2]);
        assert!(matches!(
            CanonicalModel::from_json(&v),
            Err(Error::MalformedFile(_))
        ));
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_model(&dir.path().join("missing.json")),
            Err(Error::Io(_))
        ));
    }
}
