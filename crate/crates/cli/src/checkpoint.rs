//! Model checkpoints: the architecture plus every parameter as one flat
//! row-major array, serialized to JSON. Reloading reproduces the model
//! bit-exactly.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use normbench_core::rnn::{NetSpec, RnnModel};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelCheckpoint {
    pub spec: NetSpec,
    /// Flat parameters in the model's documented order: per layer the
    /// input weights (row-major), recurrent weights (row-major), and bias,
    /// then the output weights and output bias.
    pub params: Vec<f64>,
}

impl ModelCheckpoint {
    pub fn from_model(model: &RnnModel) -> Self {
        Self { spec: model.spec().clone(), params: model.flat_params() }
    }

    pub fn into_model(self) -> Result<RnnModel, io::Error> {
        RnnModel::from_flat_params(self.spec, &self.params)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))
    }
}

pub fn save_model(model: &RnnModel, path: &Path) -> io::Result<()> {
    let mut json = serde_json::to_string_pretty(&ModelCheckpoint::from_model(model))
        .expect("checkpoint serializes");
    json.push('\n');
    fs::write(path, json)
}

pub fn load_model(path: &Path) -> io::Result<RnnModel> {
    let text = fs::read_to_string(path)?;
    let checkpoint: ModelCheckpoint =
        serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    checkpoint.into_model()
}

#[cfg(test)]
mod tests {
    use super::*;
    use normbench_core::rnn::OutputMode;
    use normbench_core::scale::{self, Method, ScalerParams};

    #[test]
    fn checkpoints_reload_bit_exactly() {
        let spec = NetSpec::new(3, vec![7, 4], 1, OutputMode::Linear).unwrap();
        let model = RnnModel::init(spec, 123).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_model(&model, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(loaded, model);
    }

    #[test]
    fn truncated_checkpoints_are_rejected() {
        let spec = NetSpec::new(1, vec![2], 1, OutputMode::Linear).unwrap();
        let model = RnnModel::init(spec, 1).unwrap();
        let mut checkpoint = ModelCheckpoint::from_model(&model);
        checkpoint.params.pop();
        assert!(checkpoint.into_model().is_err());
    }

    #[test]
    fn scaler_params_serialize_as_a_tagged_object() {
        let params = scale::fit(Method::MinMax, &[10.0, 30.0]).unwrap();
        let json = serde_json::to_value(&params).unwrap();
        assert_eq!(json["method"], "MinMax");
        assert_eq!(json["data_min"], 10.0);
        assert_eq!(json["data_max"], 30.0);

        let back: ScalerParams = serde_json::from_value(json).unwrap();
        assert_eq!(back, params);
    }

    #[test]
    fn fitted_scalers_reload_bit_exactly() {
        // an irrational-ish statistic exercises the float encoding
        let column = [2.0, 4.0, 6.0, 7.3];
        for method in Method::ALL {
            let params = scale::fit(method, &column).unwrap();
            let json = serde_json::to_string(&params).unwrap();
            let back: ScalerParams = serde_json::from_str(&json).unwrap();
            assert_eq!(back, params, "{method} params changed across JSON");
        }
    }
}
