//! Long-format marker CSV, `t_s,marker_id,x_mm,y_mm,z_mm`, one marker per
//! row, and the body-map JSON `{body_id: [marker_id; 3]}`.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::Point3;
use serde::Deserialize;

use super::{MarkerFrame, MocapError};

/// Body id to its three marker ids, in a fixed order.
pub type BodyMap = BTreeMap<String, [String; 3]>;

const HEADER: [&str; 5] = ["t_s", "marker_id", "x_mm", "y_mm", "z_mm"];

#[derive(Debug, Deserialize)]
struct Row {
    t_s: f64,
    marker_id: String,
    x_mm: f64,
    y_mm: f64,
    z_mm: f64,
}

/// Rows sharing a timestamp form one frame; timestamps must not decrease.
pub fn frames_from_csv<R: std::io::Read>(reader: R) -> Result<Vec<MarkerFrame>, MocapError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| MocapError::Format(e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(MocapError::Format(format!(
            "expected header '{}'",
            HEADER.join(",")
        )));
    }
    let mut frames: Vec<MarkerFrame> = Vec::new();
    for (i, rec) in rdr.deserialize::<Row>().enumerate() {
        let row = rec.map_err(|e| MocapError::Format(format!("row {}: {e}", i + 2)))?;
        let p = Point3::new(row.x_mm, row.y_mm, row.z_mm);
        if !(row.t_s.is_finite() && p.iter().all(|c| c.is_finite())) {
            return Err(MocapError::Format(format!(
                "row {}: non-finite value",
                i + 2
            )));
        }
        match frames.last_mut() {
            Some(f) if f.t == row.t_s => {
                if f.markers.insert(row.marker_id.clone(), p).is_some() {
                    return Err(MocapError::Format(format!(
                        "row {}: marker '{}' repeated at t = {}",
                        i + 2,
                        row.marker_id,
                        row.t_s
                    )));
                }
            }
            Some(f) if f.t > row.t_s => {
                return Err(MocapError::Format(format!(
                    "row {}: time goes backwards",
                    i + 2
                )));
            }
            _ => frames.push(MarkerFrame {
                t: row.t_s,
                markers: BTreeMap::from([(row.marker_id, p)]),
            }),
        }
    }
    Ok(frames)
}

pub fn read_frames(path: &Path) -> Result<Vec<MarkerFrame>, MocapError> {
    frames_from_csv(std::fs::File::open(path)?)
}

pub fn frames_to_csv(frames: &[MarkerFrame]) -> String {
    let mut s = HEADER.join(",");
    s.push('\n');
    for f in frames {
        for (id, p) in &f.markers {
            s.push_str(&format!(
                "{:.6},{id},{:.6},{:.6},{:.6}\n",
                f.t, p.x, p.y, p.z
            ));
        }
    }
    s
}

pub fn read_body_map(path: &Path) -> Result<BodyMap, MocapError> {
    parse_body_map(&std::fs::read_to_string(path)?)
}

pub(crate) fn parse_body_map(json: &str) -> Result<BodyMap, MocapError> {
    let raw: BTreeMap<String, Vec<String>> =
        serde_json::from_str(json).map_err(|e| MocapError::Format(format!("body map: {e}")))?;
    raw.into_iter()
        .map(|(body, ids)| {
            let found = ids.len();
            let ids: [String; 3] = ids.try_into().map_err(|_| MocapError::BadBody {
                body: body.clone(),
                found,
            })?;
            Ok((body, ids))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_grouping() {
        let text = "t_s,marker_id,x_mm,y_mm,z_mm\n0.0,a,1,2,3\n0.0,b,4,5,6\n0.01,a,1,2,3.5\n";
        let frames = frames_from_csv(text.as_bytes()).unwrap();
        assert_eq!(frames.len(), 2);
        assert_eq!(frames[0].markers.len(), 2);
        let again = frames_from_csv(frames_to_csv(&frames).as_bytes()).unwrap();
        assert_eq!(again, frames);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(frames_from_csv("t,id,x,y,z\n".as_bytes()).is_err());
        let back = "t_s,marker_id,x_mm,y_mm,z_mm\n0.1,a,1,2,3\n0.0,a,1,2,3\n";
        assert!(frames_from_csv(back.as_bytes()).is_err());
        let dup = "t_s,marker_id,x_mm,y_mm,z_mm\n0.1,a,1,2,3\n0.1,a,1,2,3\n";
        assert!(frames_from_csv(dup.as_bytes()).is_err());
    }

    #[test]
    fn body_map_needs_triples() {
        assert!(parse_body_map(r#"{"trunk": ["a","b","c"]}"#).is_ok());
        let err = parse_body_map(r#"{"trunk": ["a","b"]}"#).unwrap_err();
        assert!(matches!(err, MocapError::BadBody { found: 2, .. }));
    }
}
