//! Heterogeneous lattice fields: a topology composed with a parameter field
//! over a grid of unit cells.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::conformal::{ConformalError, CylindricalMap};
use crate::expr::{EvalError, Expr, Scope};
use crate::math::{floor, Aabb, Vec3};
use crate::mesher::{BeamCell, TpmsCell};
use crate::section::{Profile, ProfileError, ProfileShape};
use crate::topology::{BeamTopology, ImplicitSolid, SkeletalGraph, TopologyError, TpmsKind};

/// How parameters vary inside a cell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum FieldMode {
    /// Evaluated once per cell at the cell's normalized coordinates.
    #[default]
    PerCell,
    /// Evaluated at every query point.
    Continuous,
}

impl FieldMode {
    pub fn id(self) -> &'static str {
        match self {
            FieldMode::PerCell => "per_cell",
            FieldMode::Continuous => "continuous",
        }
    }
}

impl FromStr for FieldMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "per_cell" => Ok(FieldMode::PerCell),
            "continuous" => Ok(FieldMode::Continuous),
            _ => Err(alloc::format!("unknown mode `{s}`, expected per_cell or continuous")),
        }
    }
}

impl fmt::Display for FieldMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// `Nx x Ny x Nz` cells of edge `u`. Cell indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellGrid {
    counts: [usize; 3],
    u: f64,
    mode: FieldMode,
}

impl CellGrid {
    pub fn new(counts: [usize; 3], u: f64, mode: FieldMode) -> Result<Self, FieldError> {
        if counts.contains(&0) {
            return Err(FieldError::EmptyGrid(counts));
        }
        if !(u > 0.0 && u.is_finite()) {
            return Err(FieldError::CellSize(u));
        }
        Ok(CellGrid { counts, u, mode })
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn cell_size(&self) -> f64 {
        self.u
    }

    pub fn mode(&self) -> FieldMode {
        self.mode
    }

    pub fn with_mode(mut self, mode: FieldMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn cell_count(&self) -> usize {
        self.counts.iter().product()
    }

    /// Cartesian domain `[0, N u]` per axis.
    pub fn domain(&self) -> Aabb {
        let [nx, ny, nz] = self.counts;
        Aabb::new(Vec3::ZERO, Vec3::new(nx as f64, ny as f64, nz as f64) * self.u)
    }

    pub fn contains(&self, cell: [usize; 3]) -> bool {
        (0..3).all(|a| (1..=self.counts[a]).contains(&cell[a]))
    }

    /// `(i-1) / max(N-1, 1)` per axis.
    pub fn normalized_coords(&self, cell: [usize; 3]) -> Result<[f64; 3], FieldError> {
        if !self.contains(cell) {
            return Err(FieldError::CellOutOfRange(cell));
        }
        Ok(core::array::from_fn(|a| {
            (cell[a] - 1) as f64 / (self.counts[a].max(2) - 1) as f64
        }))
    }

    /// Cells in x-fastest order.
    pub fn cells(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        let [nx, ny, nz] = self.counts;
        (1..=nz).flat_map(move |k| (1..=ny).flat_map(move |j| (1..=nx).map(move |i| [i, j, k])))
    }

    fn linear(&self, cell: [usize; 3]) -> usize {
        ((cell[2] - 1) * self.counts[1] + cell[1] - 1) * self.counts[0] + cell[0] - 1
    }

    /// Containing cell of fractional lattice coordinates, clamped to the grid.
    fn cell_of(&self, xi: [f64; 3], periodic_y: bool) -> [usize; 3] {
        core::array::from_fn(|a| {
            let n = self.counts[a] as i64;
            let mut c = floor(xi[a]) as i64;
            if a == 1 && periodic_y {
                c = c.rem_euclid(n);
            }
            (c.clamp(0, n - 1) + 1) as usize
        })
    }

    /// Continuous counterpart of [`normalized_coords`](Self::normalized_coords):
    /// cell centres map to the per-cell values.
    fn continuous_coords(&self, xi: [f64; 3]) -> [f64; 3] {
        core::array::from_fn(|a| {
            let n = self.counts[a];
            if n == 1 {
                0.0
            } else {
                ((xi[a] - 0.5) / (n - 1) as f64).clamp(0.0, 1.0)
            }
        })
    }
}

/// Recognized parameter-field keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParamKey {
    Thickness,
    BeamDiameter,
    NodeScale,
    FilletRatio,
    Trunc,
}

impl ParamKey {
    pub const ALL: [ParamKey; 5] = [
        ParamKey::Thickness,
        ParamKey::BeamDiameter,
        ParamKey::NodeScale,
        ParamKey::FilletRatio,
        ParamKey::Trunc,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ParamKey::Thickness => "thickness",
            ParamKey::BeamDiameter => "beam_diameter",
            ParamKey::NodeScale => "node_scale",
            ParamKey::FilletRatio => "fillet_ratio",
            ParamKey::Trunc => "trunc",
        }
    }

    pub fn from_id(s: &str) -> Option<ParamKey> {
        ParamKey::ALL.into_iter().find(|k| k.id() == s)
    }
}

impl fmt::Display for ParamKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Variables a parameter expression may reference.
pub const VARIABLES: [&str; 12] = ["x", "y", "z", "i", "j", "k", "u", "nx", "ny", "nz", "rho", "phi"];

/// Node diameter over beam diameter when `node_scale` is absent.
pub const DEFAULT_NODE_SCALE: f64 = 1.1;

/// Expressions keyed by parameter.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParameterField {
    exprs: BTreeMap<ParamKey, Expr>,
}

impl ParameterField {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rejects expressions with variables outside [`VARIABLES`].
    pub fn set(&mut self, key: ParamKey, expr: Expr) -> Result<(), FieldError> {
        if let Some(name) = expr.free_variables().into_iter().find(|v| !VARIABLES.contains(&v.as_str())) {
            return Err(FieldError::UnknownVariable { key, name });
        }
        self.exprs.insert(key, expr);
        Ok(())
    }

    pub fn with(mut self, key: ParamKey, expr: Expr) -> Result<Self, FieldError> {
        self.set(key, expr)?;
        Ok(self)
    }

    pub fn get(&self, key: ParamKey) -> Option<&Expr> {
        self.exprs.get(&key)
    }

    pub fn keys(&self) -> impl Iterator<Item = ParamKey> + '_ {
        self.exprs.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ParamKey, &Expr)> {
        self.exprs.iter().map(|(k, v)| (*k, v))
    }

    /// Resolve every expression under `bindings` and validate the values.
    pub fn evaluate(&self, bindings: &Bindings, cell: [usize; 3]) -> Result<Resolved, FieldError> {
        let mut set = ParameterSet { node_scale: DEFAULT_NODE_SCALE, ..ParameterSet::default() };
        let mut warnings = Vec::new();
        for (&key, expr) in &self.exprs {
            let v = expr.evaluate(bindings).map_err(|error| FieldError::Evaluation { cell, key, error })?;
            let bad = |expected: &'static str| FieldError::OutOfRange { cell, key, value: v, expected };
            match key {
                ParamKey::Thickness if v > 0.0 => set.thickness = Some(v),
                ParamKey::Thickness => return Err(bad("> 0")),
                ParamKey::BeamDiameter if v > 0.0 => set.beam_diameter = Some(v),
                ParamKey::BeamDiameter => return Err(bad("> 0")),
                ParamKey::NodeScale if v >= 1.0 => set.node_scale = v,
                ParamKey::NodeScale if v > 0.0 => {
                    warnings.push(Warning::NodeScaleRaised { cell, value: v });
                    set.node_scale = 1.0;
                }
                ParamKey::NodeScale => return Err(bad("> 0")),
                ParamKey::FilletRatio if (0.0..=1.0).contains(&v) => set.fillet_ratio = Some(v),
                ParamKey::FilletRatio => return Err(bad("in [0, 1]")),
                ParamKey::Trunc if (0.0..=0.5).contains(&v) => set.trunc = Some(v),
                ParamKey::Trunc => return Err(bad("in [0, 0.5]")),
            }
        }
        Ok(Resolved { set, warnings })
    }
}

/// Numeric parameter values at one evaluation point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ParameterSet {
    pub thickness: Option<f64>,
    pub beam_diameter: Option<f64>,
    pub node_scale: f64,
    pub fillet_ratio: Option<f64>,
    pub trunc: Option<f64>,
}

impl ParameterSet {
    pub fn get(&self, key: ParamKey) -> Option<f64> {
        match key {
            ParamKey::Thickness => self.thickness,
            ParamKey::BeamDiameter => self.beam_diameter,
            ParamKey::NodeScale => Some(self.node_scale),
            ParamKey::FilletRatio => self.fillet_ratio,
            ParamKey::Trunc => self.trunc,
        }
    }

    /// Node sphere radius `node_scale * D / 2`.
    pub fn node_radius(&self) -> f64 {
        self.node_scale * self.beam_diameter.unwrap_or(0.0) / 2.0
    }
}

/// A validated set plus any non-fatal adjustments made on the way.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub set: ParameterSet,
    pub warnings: Vec<Warning>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Warning {
    /// Node spheres must cover the flat beam ends.
    NodeScaleRaised { cell: [usize; 3], value: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::NodeScaleRaised { cell: [i, j, k], value } => {
                write!(f, "cell ({i}, {j}, {k}): node_scale {value} raised to 1")
            }
        }
    }
}

/// Expression variables for one evaluation point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bindings {
    values: [f64; 10],
    conformal: Option<(f64, f64)>,
}

impl Bindings {
    pub fn new(coords: [f64; 3], cell: [usize; 3], grid: &CellGrid) -> Self {
        let [nx, ny, nz] = grid.counts;
        Bindings {
            values: [
                coords[0],
                coords[1],
                coords[2],
                cell[0] as f64,
                cell[1] as f64,
                cell[2] as f64,
                grid.u,
                nx as f64,
                ny as f64,
                nz as f64,
            ],
            conformal: None,
        }
    }

    /// Per-cell bindings at the cell's normalized coordinates.
    pub fn for_cell(cell: [usize; 3], grid: &CellGrid) -> Result<Self, FieldError> {
        Ok(Bindings::new(grid.normalized_coords(cell)?, cell, grid))
    }

    pub fn with_conformal(mut self, rho: f64, phi: f64) -> Self {
        self.conformal = Some((rho, phi));
        self
    }
}

impl Scope for Bindings {
    fn lookup(&self, name: &str) -> Option<f64> {
        match name {
            "rho" => self.conformal.map(|c| c.0),
            "phi" => self.conformal.map(|c| c.1),
            _ => VARIABLES[..10].iter().position(|v| *v == name).map(|i| self.values[i]),
        }
    }
}

/// Either family of unit-cell topology.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellTopology {
    Beam(BeamTopology),
    Tpms(TpmsKind),
}

impl CellTopology {
    pub fn id(self) -> &'static str {
        match self {
            CellTopology::Beam(b) => b.id(),
            CellTopology::Tpms(t) => t.id(),
        }
    }

    pub fn kind(self) -> &'static str {
        match self {
            CellTopology::Beam(_) => "beam",
            CellTopology::Tpms(_) => "tpms",
        }
    }
}

impl FromStr for CellTopology {
    type Err = TopologyError;
    fn from_str(s: &str) -> Result<Self, TopologyError> {
        s.parse::<BeamTopology>()
            .map(CellTopology::Beam)
            .or_else(|_| s.parse::<TpmsKind>().map(CellTopology::Tpms))
    }
}

impl fmt::Display for CellTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldError {
    EmptyGrid([usize; 3]),
    CellSize(f64),
    CellOutOfRange([usize; 3]),
    UnknownVariable { key: ParamKey, name: String },
    MissingParameter { key: ParamKey, topology: &'static str },
    /// A key that does not apply to this topology or profile.
    UnexpectedParameter { key: ParamKey, topology: &'static str },
    Evaluation { cell: [usize; 3], key: ParamKey, error: EvalError },
    OutOfRange { cell: [usize; 3], key: ParamKey, value: f64, expected: &'static str },
    Profile { cell: [usize; 3], error: ProfileError },
    Topology { cell: [usize; 3], error: TopologyError },
    Conformal(ConformalError),
    Unsupported(&'static str),
}

impl FieldError {
    /// Failures caused by a parameter value rather than the document shape.
    pub fn is_parameter_error(&self) -> bool {
        matches!(
            self,
            FieldError::OutOfRange { .. } | FieldError::Profile { .. } | FieldError::Topology { .. }
        )
    }

    pub fn is_expression_error(&self) -> bool {
        matches!(self, FieldError::Evaluation { .. } | FieldError::UnknownVariable { .. })
    }
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::EmptyGrid(c) => write!(f, "cell counts {c:?} must all be at least 1"),
            FieldError::CellSize(u) => write!(f, "cell size must be positive, got {u}"),
            FieldError::CellOutOfRange([i, j, k]) => write!(f, "cell ({i}, {j}, {k}) is outside the grid"),
            FieldError::UnknownVariable { key, name } => write!(
                f,
                "{key}: unknown variable `{name}` (allowed: {})",
                VARIABLES.join(", ")
            ),
            FieldError::MissingParameter { key, topology } => write!(f, "{topology} requires `{key}`"),
            FieldError::UnexpectedParameter { key, topology } => {
                write!(f, "`{key}` does not apply to {topology}")
            }
            FieldError::Evaluation { cell: [i, j, k], key, error } => {
                write!(f, "cell ({i}, {j}, {k}), {key}: {error}")
            }
            FieldError::OutOfRange { cell: [i, j, k], key, value, expected } => {
                write!(f, "cell ({i}, {j}, {k}): {key} = {value} must be {expected}")
            }
            FieldError::Profile { cell: [i, j, k], error } => write!(f, "cell ({i}, {j}, {k}): {error}"),
            FieldError::Topology { cell: [i, j, k], error } => write!(f, "cell ({i}, {j}, {k}): {error}"),
            FieldError::Conformal(e) => e.fmt(f),
            FieldError::Unsupported(what) => f.write_str(what),
        }
    }
}

impl core::error::Error for FieldError {}

impl From<ConformalError> for FieldError {
    fn from(e: ConformalError) -> Self {
        FieldError::Conformal(e)
    }
}

/// Everything [`compose`] needs.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeConfig {
    pub topology: CellTopology,
    pub profile: ProfileShape,
    pub params: ParameterField,
    pub grid: CellGrid,
    pub cylindrical: Option<CylindricalMap>,
}

#[derive(Clone, Debug, PartialEq)]
enum CellShape {
    Beam { cell: BeamCell, profile: Profile, node_radius: f64 },
    Tpms { cell: TpmsCell, thickness: f64 },
}

/// Global implicit solid of a composed lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeField {
    config: LatticeConfig,
    shapes: Vec<CellShape>,
    resolved: Vec<ParameterSet>,
    warnings: Vec<Warning>,
    bounds: Aabb,
}

/// Sub-samples per axis used to validate continuous fields at compose time.
const CONTINUOUS_CHECKS: usize = 5;

fn check_keys(cfg: &LatticeConfig) -> Result<(), FieldError> {
    let has = |k| cfg.params.get(k).is_some();
    let name = cfg.topology.id();
    match cfg.topology {
        CellTopology::Tpms(_) => {
            if let Some(key) = cfg.params.keys().find(|&k| k != ParamKey::Thickness) {
                return Err(FieldError::UnexpectedParameter { key, topology: name });
            }
            if !has(ParamKey::Thickness) {
                return Err(FieldError::MissingParameter { key: ParamKey::Thickness, topology: name });
            }
            if cfg.cylindrical.is_some() {
                return Err(FieldError::Unsupported("cylindrical placement is only available for beam topologies"));
            }
        }
        CellTopology::Beam(b) => {
            if has(ParamKey::Thickness) {
                return Err(FieldError::UnexpectedParameter { key: ParamKey::Thickness, topology: name });
            }
            if !has(ParamKey::BeamDiameter) {
                return Err(FieldError::MissingParameter { key: ParamKey::BeamDiameter, topology: name });
            }
            match (b.takes_truncation(), has(ParamKey::Trunc)) {
                (true, false) => {
                    return Err(FieldError::MissingParameter { key: ParamKey::Trunc, topology: name })
                }
                (false, true) => {
                    return Err(FieldError::UnexpectedParameter { key: ParamKey::Trunc, topology: name })
                }
                _ => {}
            }
            let rounded = cfg.profile == ProfileShape::RoundedSquare;
            match (rounded, has(ParamKey::FilletRatio)) {
                (true, false) => {
                    return Err(FieldError::MissingParameter {
                        key: ParamKey::FilletRatio,
                        topology: "rounded_square profile",
                    })
                }
                (false, true) => {
                    return Err(FieldError::UnexpectedParameter {
                        key: ParamKey::FilletRatio,
                        topology: cfg.profile.id(),
                    })
                }
                _ => {}
            }
        }
    }
    Ok(())
}

impl LatticeConfig {
    /// Parameter keys against topology kind, profile and placement.
    pub fn check_keys(&self) -> Result<(), FieldError> {
        check_keys(self)
    }

    fn bindings_at(&self, xi: [f64; 3], cell: [usize; 3], continuous: bool) -> Bindings {
        let grid = &self.grid;
        let coords = if continuous {
            grid.continuous_coords(xi)
        } else {
            grid.normalized_coords(cell).unwrap()
        };
        let b = Bindings::new(coords, cell, grid);
        match self.cylindrical {
            None => b,
            Some(_) => {
                let ny = grid.counts[1] as f64;
                let phi = if continuous {
                    let t = (xi[1] - 0.5) / ny;
                    t - floor(t)
                } else {
                    (cell[1] - 1) as f64 / ny
                };
                b.with_conformal(coords[0], phi)
            }
        }
    }

    /// Fractional lattice coordinates of a world point.
    fn lattice_coords(&self, p: Vec3) -> [f64; 3] {
        match &self.cylindrical {
            Some(m) => m.lattice_coords(p, &self.grid),
            None => {
                let u = self.grid.u;
                [p.x / u, p.y / u, p.z / u]
            }
        }
    }

    fn shape_params(&self, set: &ParameterSet, cell: [usize; 3]) -> Result<(Profile, f64), FieldError> {
        let d = set.beam_diameter.unwrap_or(0.0);
        let profile = self
            .profile
            .profile(d, set.fillet_ratio.unwrap_or(0.0))
            .map_err(|error| FieldError::Profile { cell, error })?;
        Ok((profile, set.node_radius()))
    }

    fn check_thickness(&self, set: &ParameterSet, cell: [usize; 3]) -> Result<f64, FieldError> {
        let t = set.thickness.unwrap_or(0.0);
        if t >= self.grid.u / 2.0 {
            return Err(FieldError::OutOfRange {
                cell,
                key: ParamKey::Thickness,
                value: t,
                expected: "below u/2",
            });
        }
        Ok(t)
    }
}

/// Compose topology and parameters into one global field.
pub fn compose(config: LatticeConfig) -> Result<LatticeField, FieldError> {
    check_keys(&config)?;
    if let Some(m) = &config.cylindrical {
        m.check(&config.grid)?;
    }
    let grid = config.grid;
    let u = grid.u;
    let continuous = grid.mode == FieldMode::Continuous;
    let mut shapes = Vec::with_capacity(grid.cell_count());
    let mut resolved = Vec::with_capacity(grid.cell_count());
    let mut warnings = Vec::new();
    let mut graphs: BTreeMap<u64, SkeletalGraph> = BTreeMap::new();
    let mut bounds = Aabb::empty();
    let domain = grid.domain();

    for cell in grid.cells() {
        let r = config.params.evaluate(&config.bindings_at([0.0; 3], cell, false), cell)?;
        warnings.extend(r.warnings.iter().copied());
        let set = r.set;
        // widest primitive reached anywhere in the cell
        let mut reach = 0.0f64;
        let mut account = |s: &ParameterSet| -> Result<(), FieldError> {
            match config.topology {
                CellTopology::Beam(_) => {
                    let (p, n) = config.shape_params(s, cell)?;
                    reach = reach.max(p.bound().max(n));
                }
                CellTopology::Tpms(_) => {
                    config.check_thickness(s, cell)?;
                }
            }
            Ok(())
        };
        account(&set)?;
        if continuous {
            let m = CONTINUOUS_CHECKS;
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        let f = |n: usize, i: usize| (i - 1) as f64 + n as f64 / (m - 1) as f64;
                        let xi = [f(a, cell[0]), f(b, cell[1]), f(c, cell[2])];
                        let s = config.params.evaluate(&config.bindings_at(xi, cell, true), cell)?.set;
                        account(&s)?;
                    }
                }
            }
        }

        match config.topology {
            CellTopology::Beam(b) => {
                let key = set.trunc.map_or(u64::MAX, f64::to_bits);
                let graph = match graphs.entry(key) {
                    Entry::Occupied(e) => e.into_mut(),
                    Entry::Vacant(e) => {
                        e.insert(b.graph(u, set.trunc).map_err(|error| FieldError::Topology { cell, error })?)
                    }
                };
                let placed = match &config.cylindrical {
                    Some(m) => m.map_graph(graph, cell, &grid)?,
                    None => {
                        let o = Vec3::new((cell[0] - 1) as f64, (cell[1] - 1) as f64, (cell[2] - 1) as f64) * u;
                        graph.map_vertices(|v| v + o)
                    }
                };
                let (profile, node_radius) = config.shape_params(&set, cell)?;
                let beam = BeamCell::new(&placed, u / 8.0);
                let mut b = placed.bounds().expanded(reach);
                if continuous {
                    b = b.expanded(reach * 0.25);
                }
                bounds = bounds.union(&b);
                shapes.push(CellShape::Beam { cell: beam, profile, node_radius });
            }
            CellTopology::Tpms(kind) => {
                let surface = kind.surface(u).map_err(|error| FieldError::Topology { cell, error })?;
                let thickness = config.check_thickness(&set, cell)?;
                shapes.push(CellShape::Tpms { cell: TpmsCell::new(surface, domain), thickness });
                bounds = domain;
            }
        }
        resolved.push(set);
    }

    Ok(LatticeField { config, shapes, resolved, warnings, bounds })
}

impl LatticeField {
    pub fn config(&self) -> &LatticeConfig {
        &self.config
    }

    pub fn cells(&self) -> &CellGrid {
        &self.config.grid
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    /// Parameters resolved at the cell's normalized coordinates.
    pub fn cell_parameters(&self, cell: [usize; 3]) -> Option<&ParameterSet> {
        self.config.grid.contains(cell).then(|| &self.resolved[self.config.grid.linear(cell)])
    }

    /// Containing cell of a world point; points outside the grid use the
    /// nearest boundary cell.
    pub fn cell_at(&self, p: Vec3) -> [usize; 3] {
        let xi = self.config.lattice_coords(p);
        self.config.grid.cell_of(xi, self.config.cylindrical.is_some())
    }

    fn value_at(&self, p: Vec3) -> f64 {
        let cfg = &self.config;
        let xi = cfg.lattice_coords(p);
        let cell = cfg.grid.cell_of(xi, cfg.cylindrical.is_some());
        let n = cfg.grid.linear(cell);
        let shape = &self.shapes[n];
        if cfg.grid.mode == FieldMode::PerCell {
            return match shape {
                CellShape::Beam { cell, profile, node_radius } => cell.value(p, profile, *node_radius),
                CellShape::Tpms { cell, thickness } => cell.value(p, *thickness),
            };
        }
        // Continuous: fall back to the cell values if a point fails validation.
        let local = cfg.params.evaluate(&cfg.bindings_at(xi, cell, true), cell).ok().map(|r| r.set);
        match shape {
            CellShape::Beam { cell: beam, profile, node_radius } => {
                let (prof, nr) = local
                    .and_then(|s| cfg.shape_params(&s, cell).ok())
                    .unwrap_or((*profile, *node_radius));
                beam.value(p, &prof, nr)
            }
            CellShape::Tpms { cell: shell, thickness } => {
                let t = local
                    .and_then(|s| cfg.check_thickness(&s, cell).ok())
                    .unwrap_or(*thickness);
                shell.value(p, t)
            }
        }
    }
}

impl ImplicitSolid for LatticeField {
    fn value(&self, p: Vec3) -> f64 {
        self.value_at(p)
    }

    fn bounds(&self) -> Option<Aabb> {
        (!self.bounds.is_empty()).then_some(self.bounds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expr(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    fn grid(n: [usize; 3], u: f64) -> CellGrid {
        CellGrid::new(n, u, FieldMode::PerCell).unwrap()
    }

    fn beam_config(t: BeamTopology, d: &str, n: [usize; 3]) -> LatticeConfig {
        LatticeConfig {
            topology: CellTopology::Beam(t),
            profile: ProfileShape::Circle,
            params: ParameterField::new().with(ParamKey::BeamDiameter, expr(d)).unwrap(),
            grid: grid(n, 10.0),
            cylindrical: None,
        }
    }

    #[test]
    fn normalized_coordinate_examples() {
        let g = grid([10, 10, 10], 1.0);
        assert_eq!(g.normalized_coords([1, 1, 1]), Ok([0.0, 0.0, 0.0]));
        assert_eq!(g.normalized_coords([10, 10, 10]), Ok([1.0, 1.0, 1.0]));
        assert_eq!(grid([1, 1, 1], 1.0).normalized_coords([1, 1, 1]), Ok([0.0, 0.0, 0.0]));
        assert!(g.normalized_coords([0, 1, 1]).is_err());
        assert!(g.normalized_coords([11, 1, 1]).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let g = grid([1, 1, 10], 20.0);
        let pf = ParameterField::new().with(ParamKey::Thickness, expr("6.9*z+0.1")).unwrap();
        let r = pf.evaluate(&Bindings::for_cell([1, 1, 1], &g).unwrap(), [1, 1, 1]).unwrap();
        assert_eq!(r.set.thickness, Some(0.1));
        assert_eq!(r.set.node_scale, DEFAULT_NODE_SCALE);

        let g = grid([3, 1, 1], 20.0);
        let pf = ParameterField::new()
            .with(ParamKey::BeamDiameter, expr("-4*6*(x-0.5)^2+6+1"))
            .unwrap();
        let mid = pf.evaluate(&Bindings::for_cell([2, 1, 1], &g).unwrap(), [2, 1, 1]).unwrap();
        assert_eq!(mid.set.beam_diameter, Some(7.0));

        let pf = ParameterField::new().with(ParamKey::Thickness, expr("3*sin(6*pi*x)+4")).unwrap();
        let (mut lo, mut hi) = (f64::MAX, f64::MIN);
        let g = grid([1, 1, 1], 20.0);
        for n in 0..=1200 {
            let b = Bindings::new([n as f64 / 1200.0, 0.0, 0.0], [1, 1, 1], &g);
            let t = pf.evaluate(&b, [1, 1, 1]).unwrap().set.thickness.unwrap();
            lo = lo.min(t);
            hi = hi.max(t);
        }
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 7.0).abs() < 1e-12);
    }

    #[test]
    fn invariant_violations_name_cell_and_key() {
        let g = grid([1, 1, 3], 20.0);
        let pf = ParameterField::new().with(ParamKey::Thickness, expr("z - 0.5")).unwrap();
        let err = pf.evaluate(&Bindings::for_cell([1, 1, 1], &g).unwrap(), [1, 1, 1]).unwrap_err();
        assert!(matches!(err, FieldError::OutOfRange { cell: [1, 1, 1], key: ParamKey::Thickness, .. }));
        let pf = ParameterField::new().with(ParamKey::Trunc, expr("0.6")).unwrap();
        assert!(pf.evaluate(&Bindings::for_cell([1, 1, 1], &g).unwrap(), [1, 1, 1]).is_err());
        let pf = ParameterField::new().with(ParamKey::FilletRatio, expr("-0.1")).unwrap();
        assert!(pf.evaluate(&Bindings::for_cell([1, 1, 1], &g).unwrap(), [1, 1, 1]).is_err());
        let pf = ParameterField::new().with(ParamKey::NodeScale, expr("0.5")).unwrap();
        let r = pf.evaluate(&Bindings::for_cell([1, 1, 1], &g).unwrap(), [1, 1, 1]).unwrap();
        assert_eq!(r.set.node_scale, 1.0);
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn variables_are_restricted() {
        let err = ParameterField::new().with(ParamKey::Thickness, expr("w + 1")).unwrap_err();
        assert_eq!(err, FieldError::UnknownVariable { key: ParamKey::Thickness, name: "w".into() });
        assert!(ParameterField::new().with(ParamKey::Thickness, expr("x+y+z+i+j+k+u+nx+ny+nz+rho+phi")).is_ok());
        // rho without a cylindrical map is unbound at evaluation
        let g = grid([1, 1, 1], 1.0);
        let pf = ParameterField::new().with(ParamKey::Thickness, expr("rho + 1")).unwrap();
        let err = pf.evaluate(&Bindings::for_cell([1, 1, 1], &g).unwrap(), [1, 1, 1]).unwrap_err();
        assert!(matches!(err, FieldError::Evaluation { error: EvalError::UnboundVariable(_), .. }));
    }

    #[test]
    fn keys_must_match_the_topology_kind() {
        let mut c = beam_config(BeamTopology::Cubic, "1", [1, 1, 1]);
        c.params.set(ParamKey::Thickness, expr("1")).unwrap();
        assert!(matches!(compose(c), Err(FieldError::UnexpectedParameter { key: ParamKey::Thickness, .. })));

        let c = LatticeConfig {
            topology: CellTopology::Tpms(TpmsKind::Gyroid),
            profile: ProfileShape::Circle,
            params: ParameterField::new().with(ParamKey::BeamDiameter, expr("1")).unwrap(),
            grid: grid([1, 1, 1], 10.0),
            cylindrical: None,
        };
        assert!(matches!(compose(c), Err(FieldError::UnexpectedParameter { .. })));

        let c = beam_config(BeamTopology::Rhombicuboctahedron, "1", [1, 1, 1]);
        assert!(matches!(compose(c), Err(FieldError::MissingParameter { key: ParamKey::Trunc, .. })));

        let mut c = beam_config(BeamTopology::Cubic, "1", [1, 1, 1]);
        c.profile = ProfileShape::RoundedSquare;
        assert!(matches!(compose(c), Err(FieldError::MissingParameter { key: ParamKey::FilletRatio, .. })));

        let mut c = beam_config(BeamTopology::Cubic, "1", [1, 1, 1]);
        c.params.set(ParamKey::FilletRatio, expr("0.5")).unwrap();
        assert!(matches!(compose(c), Err(FieldError::UnexpectedParameter { key: ParamKey::FilletRatio, .. })));
    }

    #[test]
    fn single_cell_equals_the_plain_cell_field() {
        let field = compose(beam_config(BeamTopology::Cubic, "1", [1, 1, 1])).unwrap();
        let graph = BeamTopology::Cubic.graph(10.0, None).unwrap();
        let plain = BeamCell::new(&graph, 10.0 / 8.0);
        let prof = Profile::circle(0.5).unwrap();
        for n in 0..500 {
            let t = n as f64 * 0.754_877_666_246_692_7;
            let p = Vec3::new((t * 13.0) % 11.0 - 0.5, (t * 7.0) % 11.0 - 0.5, (t * 3.0) % 11.0 - 0.5);
            assert_eq!(field.value(p), plain.value(p, &prof, 0.55));
        }
        // corner of the cube: node sphere radius
        assert!((field.value(Vec3::ZERO) - 0.55).abs() < 1e-15);
    }

    #[test]
    fn per_cell_parameters_are_constant_within_a_cell() {
        let c = LatticeConfig {
            topology: CellTopology::Tpms(TpmsKind::SchwarzP),
            profile: ProfileShape::Circle,
            params: ParameterField::new().with(ParamKey::Thickness, expr("6.9*z+0.1")).unwrap(),
            grid: grid([1, 1, 10], 20.0),
            cylindrical: None,
        };
        let f = compose(c).unwrap();
        for k in 1..=10 {
            let want = 6.9 * ((k - 1) as f64 / 9.0) + 0.1;
            assert_eq!(f.cell_parameters([1, 1, k]).unwrap().thickness, Some(want));
        }
        assert_eq!(f.cell_at(Vec3::new(3.0, 3.0, 25.0)), [1, 1, 2]);
        assert_eq!(f.cell_at(Vec3::new(-3.0, 30.0, 250.0)), [1, 1, 10]);
    }

    #[test]
    fn thickness_must_stay_below_half_the_cell() {
        let c = LatticeConfig {
            topology: CellTopology::Tpms(TpmsKind::Gyroid),
            profile: ProfileShape::Circle,
            params: ParameterField::new().with(ParamKey::Thickness, expr("10")).unwrap(),
            grid: grid([1, 1, 1], 20.0),
            cylindrical: None,
        };
        assert!(matches!(compose(c), Err(FieldError::OutOfRange { .. })));
    }

    #[test]
    fn continuous_mode_matches_per_cell_at_centres() {
        let mut c = beam_config(BeamTopology::Cubic, "0.5 + x", [4, 1, 1]);
        let per = compose(c.clone()).unwrap();
        c.grid = c.grid.with_mode(FieldMode::Continuous);
        let cont = compose(c).unwrap();
        let axis = |x: f64| Vec3::new(x, 0.0, 0.0);
        assert_eq!(per.value(axis(15.0)), cont.value(axis(15.0)));
        assert_eq!(per.value(axis(12.0)), per.value(axis(18.0)));
        // radius D/2 on the beam axis, D = 0.5 + (X/u - 0.5)/3
        assert!((cont.value(axis(12.0)) - (0.5 + 0.7 / 3.0) / 2.0).abs() < 1e-12);
        assert!((cont.value(axis(18.0)) - (0.5 + 1.3 / 3.0) / 2.0).abs() < 1e-12);
        assert_eq!(per.cell_parameters([3, 1, 1]), cont.cell_parameters([3, 1, 1]));
    }

    #[test]
    fn cylindrical_tpms_is_rejected() {
        let c = LatticeConfig {
            topology: CellTopology::Tpms(TpmsKind::Gyroid),
            profile: ProfileShape::Circle,
            params: ParameterField::new().with(ParamKey::Thickness, expr("1")).unwrap(),
            grid: grid([1, 4, 1], 20.0),
            cylindrical: Some(CylindricalMap::new(10.0).unwrap()),
        };
        assert!(matches!(compose(c), Err(FieldError::Unsupported(_))));
    }

    #[test]
    fn ring_diameters_run_from_one_to_three() {
        let mut c = beam_config(BeamTopology::Cubic, "1+2*rho", [3, 24, 2]);
        c.cylindrical = Some(CylindricalMap::new(40.0).unwrap());
        let f = compose(c).unwrap();
        for j in 1..=24 {
            assert_eq!(f.cell_parameters([1, j, 1]).unwrap().beam_diameter, Some(1.0));
            assert_eq!(f.cell_parameters([3, j, 2]).unwrap().beam_diameter, Some(3.0));
        }
        let b = f.bounds().unwrap();
        assert!(b.max.x > 70.0 && b.min.x < -70.0);
    }

    #[test]
    fn topology_names() {
        assert_eq!("bcc".parse::<CellTopology>(), Ok(CellTopology::Beam(BeamTopology::Bcc)));
        assert_eq!("gyroid".parse::<CellTopology>(), Ok(CellTopology::Tpms(TpmsKind::Gyroid)));
        assert!("kagome".parse::<CellTopology>().is_err());
        assert_eq!("continuous".parse::<FieldMode>(), Ok(FieldMode::Continuous));
    }
}
