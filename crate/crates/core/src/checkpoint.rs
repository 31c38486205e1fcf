//! Self-describing JSON model files shared by the hybrid model and the
//! baselines.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::BaselineModel;
use crate::classifier::BinaryClassifier;
use crate::error::{Error, Result};
use crate::qnn::QnnModel;

pub const FORMAT: &str = "mqml-checkpoint";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnyModel {
    Qnn(QnnModel),
    Baseline(BaselineModel),
}

impl AnyModel {
    pub fn classifier(&self) -> &dyn BinaryClassifier {
        match self {
            AnyModel::Qnn(m) => m,
            AnyModel::Baseline(m) => m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Checkpoint {
    format: String,
    version: u32,
    model: AnyModel,
}

pub fn to_json(model: &AnyModel) -> Result<String> {
    let c = Checkpoint {
        format: FORMAT.into(),
        version: VERSION,
        model: model.clone(),
    };
    Ok(serde_json::to_string_pretty(&c)? + "\n")
}

pub fn from_json(text: &str) -> Result<AnyModel> {
    let c: Checkpoint = serde_json::from_str(text)?;
    if c.format != FORMAT || c.version != VERSION {
        return Err(Error::invalid(format!(
            "unsupported checkpoint {} v{}",
            c.format, c.version
        )));
    }
    Ok(c.model)
}

pub fn save(path: impl AsRef<Path>, model: &AnyModel) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_json(model)?).map_err(|e| Error::io(path, e))
}

pub fn load(path: impl AsRef<Path>) -> Result<AnyModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json(&text)
}

#[cfg(test)]
mod tests {
    use ndarray::Array2;

    use super::*;
    use crate::omics_io::LabeledDataset;
    use crate::qnn::{QnnConfig, QnnParams};
    use crate::scaling::{Scaler, ScalerKind};

    #[test]
    fn qnn_round_trip_is_bit_exact() {
        let cfg = QnnConfig::new(8, 2, 4).unwrap();
        let x = Array2::from_shape_fn((4, 8), |(i, j)| (i as f64 + 0.1) / (j as f64 + 3.0));
        let scaler = Scaler::fit(ScalerKind::MinMax, x.view()).unwrap();
        let m =
            AnyModel::Qnn(QnnModel::new(cfg.clone(), scaler, QnnParams::init(&cfg, 7)).unwrap());
        let text = to_json(&m).unwrap();
        let back = from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(to_json(&back).unwrap(), text);
        assert!(from_json(&text.replace(FORMAT, "other")).is_err());
    }

    #[test]
    fn baseline_round_trip() {
        let d = LabeledDataset::new(
            vec!["a".into(), "b".into()],
            (0..6).map(|i| format!("s{i}")).collect(),
            Array2::from_shape_fn((6, 2), |(i, j)| (i * (j + 1)) as f64 / 7.0),
            vec![0, 0, 0, 1, 1, 1],
        )
        .unwrap();
        let m = AnyModel::Baseline(
            crate::baselines::rf_train(&d, &crate::baselines::RfConfig::default()).unwrap(),
        );
        assert_eq!(from_json(&to_json(&m).unwrap()).unwrap(), m);
    }
}
