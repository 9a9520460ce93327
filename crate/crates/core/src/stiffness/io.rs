//! Characterization CSV (`theta_deg,torque_nm`) and fitted-model JSON.
//! Files carry degrees; the in-memory types carry radians.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{StiffnessError, StiffnessModel, TorqueAngleSample};

#[derive(Debug, Deserialize, Serialize)]
struct Row {
    theta_deg: f64,
    torque_nm: f64,
}

pub fn samples_from_csv<R: std::io::Read>(
    reader: R,
) -> Result<Vec<TorqueAngleSample>, StiffnessError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| StiffnessError::Format(e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["theta_deg", "torque_nm"] {
        return Err(StiffnessError::Format(format!(
            "expected header 'theta_deg,torque_nm', found '{}'",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for (line, rec) in rdr.deserialize::<Row>().enumerate() {
        let row = rec.map_err(|e| StiffnessError::Format(format!("row {}: {e}", line + 2)))?;
        if !(row.theta_deg >= 0.0 && row.torque_nm.is_finite()) {
            return Err(StiffnessError::Format(format!(
                "row {}: invalid sample ({}, {})",
                line + 2,
                row.theta_deg,
                row.torque_nm
            )));
        }
        out.push(TorqueAngleSample::new(
            row.theta_deg.to_radians(),
            row.torque_nm,
        ));
    }
    Ok(out)
}

pub fn read_samples_csv(path: &Path) -> Result<Vec<TorqueAngleSample>, StiffnessError> {
    samples_from_csv(std::fs::File::open(path)?)
}

pub fn samples_to_csv(samples: &[TorqueAngleSample]) -> String {
    let mut s = String::from("theta_deg,torque_nm\n");
    for p in samples {
        s.push_str(&format!("{},{}\n", p.theta.to_degrees(), p.torque));
    }
    s
}

/// On-disk form of a [`StiffnessModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub alpha: [f64; 4],
    pub operating_max_deg: f64,
    pub safety_max_deg: f64,
    pub r_squared: f64,
}

impl From<&StiffnessModel> for ModelFile {
    fn from(m: &StiffnessModel) -> Self {
        ModelFile {
            alpha: m.alpha,
            operating_max_deg: m.operating_max.to_degrees(),
            safety_max_deg: m.safety_max.to_degrees(),
            r_squared: m.r_squared,
        }
    }
}

impl TryFrom<ModelFile> for StiffnessModel {
    type Error = StiffnessError;

    fn try_from(f: ModelFile) -> Result<Self, Self::Error> {
        StiffnessModel::new(
            f.alpha,
            f.operating_max_deg.to_radians(),
            f.safety_max_deg.to_radians(),
            f.r_squared,
        )
    }
}
