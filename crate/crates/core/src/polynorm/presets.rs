//! Shipped polygon presets and the polygon file format.

use serde::{Deserialize, Serialize};

use super::PolygonalNorm;
use crate::error::{Error, Result};
use crate::io::{elem_from_nums, elem_to_nums, parse_json, Num, RingSpec};

/// `{ "name": ..., "field": <ring>, "vertices": [[[q...], [q...]], ...] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolygonFile {
    #[serde(default)]
    pub name: String,
    pub field: RingSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub vertices: Vec<[Vec<Num>; 2]>,
}

impl PolygonFile {
    pub fn build(&self) -> Result<PolygonalNorm> {
        let ring = self.field.build()?;
        let vertices = self
            .vertices
            .iter()
            .map(|[x, y]| Ok([elem_from_nums(&ring, x)?, elem_from_nums(&ring, y)?]))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolygonalNorm::new(ring, vertices)?.with_name(self.name.clone()))
    }

    pub fn of(p: &PolygonalNorm, field: RingSpec) -> PolygonFile {
        PolygonFile {
            name: p.name().to_string(),
            field,
            note: None,
            vertices: p
                .vertices()
                .iter()
                .map(|[x, y]| [elem_to_nums(x), elem_to_nums(y)])
                .collect(),
        }
    }
}

const PRESETS: &[(&str, &str)] = &[
    ("linf", include_str!("../../presets/linf.json")),
    ("l1", include_str!("../../presets/l1.json")),
    ("octagon", include_str!("../../presets/octagon.json")),
    ("hex01", include_str!("../../presets/hex01.json")),
    ("hexpi", include_str!("../../presets/hexpi.json")),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

pub fn preset_file(name: &str) -> Result<PolygonFile> {
    let text = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::Parse(format!("unknown polygon preset {name:?}")))?;
    parse_json(text)
}

pub fn preset(name: &str) -> Result<PolygonalNorm> {
    preset_file(name)?.build()
}

/// A preset name, or else a path to a polygon file.
pub fn load(source: &str) -> Result<PolygonalNorm> {
    if PRESETS.iter().any(|(n, _)| *n == source) {
        return preset(source);
    }
    let text =
        std::fs::read_to_string(source).map_err(|e| Error::Parse(format!("cannot read polygon file {source}: {e}")))?;
    parse_json::<PolygonFile>(&text)?.build()
}
