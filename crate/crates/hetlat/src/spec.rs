//! JSON lattice spec documents.

use std::fmt;

use hetlat_core::conformal::CylindricalMap;
use hetlat_core::expr::ParseError;
use hetlat_core::field::{CellTopology, FieldError, LatticeConfig, DEFAULT_NODE_SCALE};
use hetlat_core::{CellGrid, Expr, FieldMode, ParamKey, ParameterField, ProfileShape};
use serde::{Deserialize, Serialize};

use crate::stl::StlFormat;

pub const DEFAULT_BEAM_RESOLUTION: usize = 48;
pub const DEFAULT_TPMS_RESOLUTION: usize = 64;

/// A validated spec with defaults applied.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSpec {
    pub topology: CellTopology,
    pub u: f64,
    pub counts: [usize; 3],
    pub profile: ProfileShape,
    pub params: ParameterField,
    pub mode: FieldMode,
    pub resolution: usize,
    pub inner_radius: Option<f64>,
    pub format: StlFormat,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpecError {
    /// Malformed JSON or a document that does not fit the schema.
    Schema { path: String, message: String },
    Expression { path: String, error: ParseError, source: String },
    /// A parameter key or variable that the topology does not accept.
    Field(FieldError),
}

impl SpecError {
    fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        SpecError::Schema { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecError::Schema { path, message } if path.is_empty() => f.write_str(message),
            SpecError::Schema { path, message } => write!(f, "{path}: {message}"),
            SpecError::Expression { path, error, source } => {
                write!(f, "{path}: {error}\n  {source}\n  {:width$}^", "", width = error.offset)
            }
            SpecError::Field(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for SpecError {}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum ExprText {
    Text(String),
    Number(f64),
}

impl ExprText {
    fn text(&self) -> String {
        match self {
            ExprText::Text(s) => s.clone(),
            ExprText::Number(v) => format!("{v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Cylindrical {
    inner_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Transform {
    cylindrical: Cylindrical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    topology: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    u: f64,
    #[serde(rename = "N")]
    counts: [i64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    profile: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    thickness: Option<ExprText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beam_diameter: Option<ExprText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    node_scale: Option<ExprText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fillet_ratio: Option<ExprText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trunc: Option<ExprText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    resolution: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    transform: Option<Transform>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    format: Option<String>,
}

impl RawSpec {
    fn param(&self, key: ParamKey) -> Option<&ExprText> {
        match key {
            ParamKey::Thickness => self.thickness.as_ref(),
            ParamKey::BeamDiameter => self.beam_diameter.as_ref(),
            ParamKey::NodeScale => self.node_scale.as_ref(),
            ParamKey::FilletRatio => self.fillet_ratio.as_ref(),
            ParamKey::Trunc => self.trunc.as_ref(),
        }
    }

    fn param_mut(&mut self, key: ParamKey) -> &mut Option<ExprText> {
        match key {
            ParamKey::Thickness => &mut self.thickness,
            ParamKey::BeamDiameter => &mut self.beam_diameter,
            ParamKey::NodeScale => &mut self.node_scale,
            ParamKey::FilletRatio => &mut self.fillet_ratio,
            ParamKey::Trunc => &mut self.trunc,
        }
    }
}

fn field_error(e: FieldError) -> SpecError {
    let path = match &e {
        FieldError::UnknownVariable { .. }
        | FieldError::MissingParameter { .. }
        | FieldError::UnexpectedParameter { .. } => return SpecError::Field(e),
        FieldError::Conformal(_) | FieldError::Unsupported(_) => "transform".into(),
        FieldError::EmptyGrid(_) => "N".into(),
        FieldError::CellSize(_) => "u".into(),
        _ => String::new(),
    };
    SpecError::schema(path, e.to_string())
}

/// Parse, validate and apply defaults.
pub fn load_spec(text: &str) -> Result<LatticeSpec, SpecError> {
    let raw: RawSpec = serde_json::from_str(text).map_err(|e| SpecError::schema("", e.to_string()))?;

    let topology: CellTopology =
        raw.topology.parse().map_err(|e: hetlat_core::topology::TopologyError| {
            SpecError::schema("topology", e.to_string())
        })?;
    if let Some(kind) = &raw.kind {
        if kind != "beam" && kind != "tpms" {
            return Err(SpecError::schema("kind", format!("expected `beam` or `tpms`, got `{kind}`")));
        }
        if kind != topology.kind() {
            return Err(SpecError::schema(
                "kind",
                format!("`{}` is a {} topology, not {kind}", topology.id(), topology.kind()),
            ));
        }
    }
    if !(raw.u > 0.0 && raw.u.is_finite()) {
        return Err(SpecError::schema("u", format!("must be a positive length, got {}", raw.u)));
    }
    let mut counts = [0usize; 3];
    for (a, &n) in raw.counts.iter().enumerate() {
        if n < 1 {
            return Err(SpecError::schema(format!("N[{a}]"), format!("must be at least 1, got {n}")));
        }
        counts[a] = n as usize;
    }
    let profile = match (&raw.profile, topology) {
        (None, _) => ProfileShape::Circle,
        (Some(_), CellTopology::Tpms(_)) => {
            return Err(SpecError::schema("profile", "TPMS topologies take no beam profile"))
        }
        (Some(p), _) => ProfileShape::from_id(p).ok_or_else(|| {
            SpecError::schema("profile", format!("unknown profile `{p}`, expected circle, square or rounded_square"))
        })?,
    };
    let mode = match &raw.mode {
        None => FieldMode::PerCell,
        Some(m) => m.parse().map_err(|e: String| SpecError::schema("mode", e))?,
    };
    let resolution = match raw.resolution {
        None => match topology {
            CellTopology::Beam(_) => DEFAULT_BEAM_RESOLUTION,
            CellTopology::Tpms(_) => DEFAULT_TPMS_RESOLUTION,
        },
        Some(r) if r >= hetlat_core::mesher::MIN_LATTICE_RESOLUTION as i64 && r <= 4096 => r as usize,
        Some(r) => {
            return Err(SpecError::schema(
                "resolution",
                format!("must lie in [{}, 4096], got {r}", hetlat_core::mesher::MIN_LATTICE_RESOLUTION),
            ))
        }
    };
    let format = match &raw.format {
        None => StlFormat::Binary,
        Some(f) => f.parse().map_err(|e: String| SpecError::schema("format", e))?,
    };
    let inner_radius = raw.transform.as_ref().map(|t| t.cylindrical.inner_radius);

    let mut params = ParameterField::new();
    for key in ParamKey::ALL {
        let Some(v) = raw.param(key) else { continue };
        let source = v.text();
        let expr = Expr::parse(&source).map_err(|error| SpecError::Expression {
            path: key.id().into(),
            error,
            source: source.clone(),
        })?;
        params.set(key, expr).map_err(field_error)?;
    }
    if matches!(topology, CellTopology::Beam(_)) && params.get(ParamKey::NodeScale).is_none() {
        params.set(ParamKey::NodeScale, Expr::constant(DEFAULT_NODE_SCALE)).map_err(field_error)?;
    }

    let spec = LatticeSpec { topology, u: raw.u, counts, profile, params, mode, resolution, inner_radius, format };
    spec.lattice_config()?.check_keys().map_err(field_error)?;
    if let Some(r) = inner_radius {
        let map = CylindricalMap::new(r).map_err(|e| SpecError::schema("transform.cylindrical.inner_radius", e.to_string()))?;
        map.check(&spec.grid()?).map_err(|e| SpecError::schema("N[1]", e.to_string()))?;
    }
    Ok(spec)
}

impl LatticeSpec {
    pub fn grid(&self) -> Result<CellGrid, SpecError> {
        CellGrid::new(self.counts, self.u, self.mode).map_err(field_error)
    }

    pub fn lattice_config(&self) -> Result<LatticeConfig, SpecError> {
        let cylindrical = match self.inner_radius {
            None => None,
            Some(r) => Some(
                CylindricalMap::new(r)
                    .map_err(|e| SpecError::schema("transform.cylindrical.inner_radius", e.to_string()))?,
            ),
        };
        Ok(LatticeConfig {
            topology: self.topology,
            profile: self.profile,
            params: self.params.clone(),
            grid: self.grid()?,
            cylindrical,
        })
    }
}

/// Serialize with every default spelled out.
pub fn emit_spec(spec: &LatticeSpec) -> String {
    let mut raw = RawSpec {
        topology: spec.topology.id().into(),
        kind: Some(spec.topology.kind().into()),
        u: spec.u,
        counts: spec.counts.map(|n| n as i64),
        profile: matches!(spec.topology, CellTopology::Beam(_)).then(|| spec.profile.id().into()),
        thickness: None,
        beam_diameter: None,
        node_scale: None,
        fillet_ratio: None,
        trunc: None,
        mode: Some(spec.mode.id().into()),
        resolution: Some(spec.resolution as i64),
        transform: spec.inner_radius.map(|r| Transform { cylindrical: Cylindrical { inner_radius: r } }),
        format: Some(spec.format.id().into()),
    };
    for (key, expr) in spec.params.iter() {
        *raw.param_mut(key) = Some(ExprText::Text(expr.source().into()));
    }
    serde_json::to_string_pretty(&raw).expect("spec serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expression_errors_point_at_the_offset() {
        let e = load_spec(r#"{"topology":"cubic","u":10,"N":[1,1,1],"beam_diameter":"2*(x +"}"#).unwrap_err();
        let SpecError::Expression { path, error, .. } = &e else { panic!("{e}") };
        assert_eq!(path, "beam_diameter");
        assert_eq!(error.offset, 6);
        assert!(e.to_string().contains("      ^"));
    }

    #[test]
    fn numbers_are_accepted_as_constants() {
        let s = load_spec(r#"{"topology":"gyroid","u":20,"N":[1,1,1],"thickness":2.5}"#).unwrap();
        assert_eq!(s.params.get(ParamKey::Thickness).unwrap().as_constant(), Some(2.5));
        assert_eq!(s.resolution, DEFAULT_TPMS_RESOLUTION);
    }
}
