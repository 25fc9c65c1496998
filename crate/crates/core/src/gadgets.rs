//! Gadget configurations: roofs, caps, capped roofs, layer-confining
//! sandwiches, a super-rigid configuration and a rigid-but-unlockable pair.
//!
//! The cap and the two fixed configurations ship as data files. They were
//! found by search against the move catalog and are checked by the test
//! suite (rigidity, super-rigidity, the unlock move).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::config::{ConfigFile, Configuration, CoordSystem};
use crate::analysis::layer_confinement;
use crate::error::{Error, Result};
use crate::moves::{Catalog, MoveModel, Rules};
use crate::lattice::{
    HexLayerCoord, NeighborClass, Position, SymmetryOp, DOWN_OFFSETS, IN_LAYER_OFFSETS, UP_OFFSETS,
};

pub const CAP_FILE: &str = include_str!("../data/cap.json");
pub const SUPER_RIGID_FILE: &str = include_str!("../data/fig5.json");
pub const FREE_RIGID_FILE: &str = include_str!("../data/fig6.json");

/// Path length used for the roofs of [`sandwich`].
pub const SANDWICH_PATH_LENGTH: i32 = 4;

/// Extra roof radius beyond the sandwiched footprint.
pub const SANDWICH_ROOF_MARGIN: i32 = 3;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GadgetFile {
    #[serde(default)]
    coords: CoordSystem,
    modules: Vec<[i32; 3]>,
    #[serde(default)]
    labels: BTreeMap<String, [i32; 3]>,
    #[serde(default)]
    added: Option<[i32; 3]>,
    #[serde(default)]
    terminal: Option<[i32; 3]>,
}

struct Gadget {
    configuration: Configuration,
    labels: BTreeMap<String, Position>,
    added: Option<Position>,
    terminal: Option<Position>,
}

fn load(text: &str) -> Result<Gadget> {
    let file: GadgetFile = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    let point = |c: [i32; 3]| match file.coords {
        CoordSystem::Xyz => Position::try_from(c),
        CoordSystem::Hex => Ok(HexLayerCoord::new(c[0], c[1], c[2]).to_position()),
    };
    let configuration = ConfigFile {
        coords: file.coords,
        modules: file.modules.clone(),
    }
    .to_configuration()?;
    Ok(Gadget {
        configuration,
        labels: file
            .labels
            .iter()
            .map(|(k, &v)| Ok((k.clone(), point(v)?)))
            .collect::<Result<_>>()?,
        added: file.added.map(point).transpose()?,
        terminal: file.terminal.map(point).transpose()?,
    })
}

/// Cells of the centered hexagonal disk of `radius` around `center`, in
/// the layer of `center`.
pub fn hex_disk(center: Position, radius: i32) -> Vec<Position> {
    let mut out = Vec::new();
    for q in -radius..=radius {
        for r in -radius..=radius {
            if (q - r).abs() <= radius {
                out.push(center + HexLayerCoord::new(q, r, 0).to_position());
            }
        }
    }
    out.sort_unstable();
    out
}

/// The ring at hex distance `radius` around `center`, in cyclic order
/// starting at `center + radius * d4` and walking counter-clockwise.
pub fn hex_ring(center: Position, radius: i32) -> Vec<Position> {
    if radius == 0 {
        return vec![center];
    }
    let mut cell = center + IN_LAYER_OFFSETS[4] * radius;
    let mut out = Vec::with_capacity(6 * radius as usize);
    for d in IN_LAYER_OFFSETS {
        for _ in 0..radius {
            out.push(cell);
            cell = cell + d;
        }
    }
    out
}

/// Hex distance between two cells of the same layer.
pub fn hex_distance(a: Position, b: Position) -> i32 {
    let h = (b - a).to_hex();
    h.q.abs().max(h.r.abs()).max((h.q - h.r).abs())
}

/// Solid hexagonal disk of `radius` centered above the origin in `layer`.
pub fn roof(radius: i32, layer: i32) -> Result<Configuration> {
    if radius < 1 {
        return Err(Error::InvalidParameter(format!("roof radius must be at least 1, got {radius}")));
    }
    Configuration::new(hex_disk(HexLayerCoord::new(0, 0, layer).to_position(), radius))
}

struct CapPattern {
    cells: Vec<Position>,
    terminal: Position,
}

fn cap_pattern() -> &'static CapPattern {
    static CAP: OnceLock<CapPattern> = OnceLock::new();
    CAP.get_or_init(|| {
        let g = load(CAP_FILE).expect("shipped cap is valid");
        CapPattern {
            cells: g.configuration.positions().to_vec(),
            terminal: g.terminal.expect("cap file names its terminal"),
        }
    })
}

/// Incoming steps, in the cap's own frame, for which a straight path
/// arriving at the anchor keeps the cap rigid: the reference in-layer
/// direction and two of the up offsets.
const CAP_ENTRIES: [Position; 3] = [
    Position::raw(1, -1, 0),
    Position::raw(1, 1, 0),
    Position::raw(1, 0, 1),
];

/// Symmetries under which the cap accepts a path arriving along `step`.
pub fn cap_orientations(step: Position) -> Vec<SymmetryOp> {
    SymmetryOp::all()
        .into_iter()
        .filter(|op| CAP_ENTRIES.contains(&op.inverse().apply(step)))
        .collect()
}

fn placed_cap(anchor: Position, op: SymmetryOp) -> (Vec<Position>, Position) {
    let pattern = cap_pattern();
    (
        pattern.cells.iter().map(|&c| anchor + op.apply(c)).collect(),
        anchor + op.apply(pattern.terminal),
    )
}

/// The layer-preserving symmetry taking the cap's reference direction
/// `(1, -1, 0)` to `direction`.
pub fn cap_orientation(direction: Position) -> Result<SymmetryOp> {
    if !IN_LAYER_OFFSETS.contains(&direction) {
        return Err(Error::InvalidDirection(direction));
    }
    Ok(SymmetryOp::all()
        .into_iter()
        .find(|op| !op.flips_layers() && op.apply(IN_LAYER_OFFSETS[0]) == direction)
        .expect("layer-preserving ops act transitively on in-layer directions"))
}

/// Cap modules for a path whose last module is `anchor` and which arrives
/// at `anchor` travelling along the in-layer `direction`. The anchor itself
/// is not included.
///
/// The terminal module ([`cap_terminal`]) has modules directly above and
/// below it on opposite sides.
pub fn cap(anchor: Position, direction: Position) -> Result<Configuration> {
    let op = cap_orientation(direction)?;
    Configuration::new(cap_pattern().cells.iter().map(|&c| anchor + op.apply(c)))
}

pub fn cap_terminal(anchor: Position, direction: Position) -> Result<Position> {
    Ok(anchor + cap_orientation(direction)?.apply(cap_pattern().terminal))
}

/// A capped roof with its parts labeled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CappedRoof {
    pub configuration: Configuration,
    /// Disk cells.
    pub roof: Vec<Position>,
    /// Ring cells, in the order paths were attached.
    pub boundary: Vec<Position>,
    /// Per boundary cell: the path cells, nearest the roof first.
    pub paths: Vec<Vec<Position>>,
    /// Per boundary cell: the cap cells (none for a bridge arm).
    pub caps: Vec<Vec<Position>>,
    /// Per boundary cell: the cap's terminal module.
    pub terminals: Vec<Option<Position>>,
}

impl CappedRoof {
    /// Roof cells not on the boundary ring.
    pub fn interior(&self) -> Vec<Position> {
        self.roof.iter().copied().filter(|p| !self.boundary.contains(p)).collect()
    }

    fn map(&self, f: impl Fn(Position) -> Position) -> CappedRoof {
        let all = |v: &[Position]| v.iter().map(|&p| f(p)).collect::<Vec<_>>();
        CappedRoof {
            configuration: Configuration::new(self.configuration.iter().map(&f)).expect("bijective image"),
            roof: all(&self.roof),
            boundary: all(&self.boundary),
            paths: self.paths.iter().map(|p| all(p)).collect(),
            caps: self.caps.iter().map(|c| all(c)).collect(),
            terminals: self.terminals.iter().map(|t| t.map(&f)).collect(),
        }
    }

    pub fn transform(&self, op: SymmetryOp) -> CappedRoof {
        self.map(|p| op.apply(p))
    }

    pub fn translate(&self, v: Position) -> CappedRoof {
        self.map(|p| p + v)
    }
}

fn dot(a: Position, b: Position) -> i32 {
    a.x() * b.x() + a.y() * b.y() + a.z() * b.z()
}

/// One candidate path with its cap.
#[derive(Clone)]
struct Arm {
    path: Vec<Position>,
    cap: Vec<Position>,
    terminal: Option<Position>,
    /// Cells kept clear of other arms but not occupied by this one.
    reserve: Vec<Position>,
}

impl Arm {
    fn cells(&self) -> impl Iterator<Item = Position> + '_ {
        self.path.iter().chain(&self.cap).copied()
    }

    fn footprint(&self) -> impl Iterator<Item = Position> + '_ {
        self.cells().chain(self.reserve.iter().copied())
    }
}

/// Backtracking budget for [`build_capped_roof`].
const ARM_SEARCH_BUDGET: usize = 1 << 18;

/// How much longer than requested an arm may be made.
pub const MAX_EXTRA_PATH_LENGTH: i32 = 2;

/// Depth-first arm placement with forward checking. `near` counts, per
/// cell, the placed cells at or next to it.
struct ArmLayout<'a> {
    candidates: &'a [Vec<Arm>],
    near: FxHashMap<Position, u32>,
    choice: Vec<Option<usize>>,
    budget: usize,
}

impl ArmLayout<'_> {
    fn fits(&self, arm: &Arm) -> bool {
        arm.footprint().all(|p| !self.near.contains_key(&p))
    }

    fn mark(&mut self, arm: &Arm, add: bool) {
        for p in arm.footprint() {
            for q in p.neighbors().into_iter().chain([p]) {
                let n = self.near.entry(q).or_insert(0);
                if add {
                    *n += 1;
                } else {
                    *n -= 1;
                    if *n == 0 {
                        self.near.remove(&q);
                    }
                }
            }
        }
    }

    /// Assigns the open ring cell with the fewest fitting arms next.
    fn place(&mut self) -> Result<bool> {
        let mut next: Option<(usize, usize)> = None;
        for (i, arms) in self.candidates.iter().enumerate() {
            if self.choice[i].is_some() {
                continue;
            }
            let n = arms.iter().filter(|a| self.fits(a)).count();
            if n == 0 {
                return Ok(false);
            }
            if next.is_none_or(|(_, best)| n < best) {
                next = Some((i, n));
            }
        }
        let Some((i, _)) = next else {
            return Ok(true);
        };
        for (k, arm) in self.candidates[i].iter().enumerate() {
            if !self.fits(arm) {
                continue;
            }
            self.budget = self
                .budget
                .checked_sub(1)
                .ok_or_else(|| Error::Overlap("arm layout search budget exhausted".into()))?;
            self.mark(arm, true);
            self.choice[i] = Some(k);
            if self.place()? {
                return Ok(true);
            }
            self.choice[i] = None;
            self.mark(arm, false);
        }
        Ok(false)
    }
}

/// Roof of `radius` in layer 0 around the origin with a straight path and
/// a cap (together an "arm") at every boundary module.
///
/// Going around the ring, boundary modules alternate between in-layer
/// paths and vertical paths; vertical paths alternate between up and down
/// where possible. Arms are placed by deterministic backtracking so that no
/// two arms collide or touch. Paths have `path_length` modules unless the
/// ring is too crowded for that, in which case some are lengthened by at
/// most [`MAX_EXTRA_PATH_LENGTH`] (the smallest allowance that fits wins).
pub fn build_capped_roof(radius: i32, path_length: i32) -> Result<CappedRoof> {
    build_capped_roof_with(radius, path_length, VerticalArms::Alternate)
}

/// Which way vertical arms of a capped roof may leave the roof layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerticalArms {
    /// Alternate up and down around the ring, falling back to either.
    #[default]
    Alternate,
    /// Up only, keeping the layers below the roof free.
    UpOnly,
}

pub fn build_capped_roof_with(radius: i32, path_length: i32, vertical: VerticalArms) -> Result<CappedRoof> {
    build_roof(radius, path_length, vertical, false)
}

/// Direction of the bridge arm of a sandwich roof: radial at ring index 0.
const BRIDGE_DIRECTION: Position = IN_LAYER_OFFSETS[4];

/// Axis of the sandwich column. With [`bridge_mirror`] it maps to its own
/// negative, and neither end of the column touches the bridge arm beyond
/// its last cell.
const COLUMN_AXIS: Position = UP_OFFSETS[1];

/// Maps the top sandwich roof onto the bottom one (up to translation). It
/// fixes [`BRIDGE_DIRECTION`] and exchanges up and down.
fn bridge_mirror() -> SymmetryOp {
    SymmetryOp::new([2, 1, 0], -1).expect("valid symmetry")
}

/// With `bridge`, the arm at ring index 0 is an uncapped radial path whose
/// end is kept free below for a vertical column (see [`sandwich`]).
fn build_roof(radius: i32, path_length: i32, vertical: VerticalArms, bridge: bool) -> Result<CappedRoof> {
    if radius < 1 {
        return Err(Error::InvalidParameter(format!("roof radius must be at least 1, got {radius}")));
    }
    if path_length < 2 {
        return Err(Error::InvalidParameter(format!("path length must be at least 2, got {path_length}")));
    }
    let center = Position::ORIGIN;
    let roof = hex_disk(center, radius);
    let boundary = hex_ring(center, radius);
    let in_roof = |p: Position| p.layer() == 0 && hex_distance(center, p) <= radius;

    let mut candidates: Vec<Vec<Arm>> = boundary
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let mut steps: Vec<Position> = if i % 2 == 0 {
                let mut h: Vec<Position> = IN_LAYER_OFFSETS.iter().copied().filter(|&d| !in_roof(b + d)).collect();
                h.sort_by_key(|&d| (std::cmp::Reverse(dot(d, b)), d));
                h
            } else {
                let (first, second): (&[Position], &[Position]) = match vertical {
                    VerticalArms::UpOnly => (&UP_OFFSETS, &[]),
                    VerticalArms::Alternate if i % 4 == 1 => (&UP_OFFSETS, &DOWN_OFFSETS),
                    VerticalArms::Alternate => (&DOWN_OFFSETS, &UP_OFFSETS),
                };
                let lean = |u: Position| {
                    IN_LAYER_OFFSETS
                        .iter()
                        .filter(|&&d| (u - d).is_neighbor_offset() && !in_roof(b + d))
                        .count()
                };
                let mut v: Vec<Position> = first.to_vec();
                v.sort_by_key(|&u| (std::cmp::Reverse(lean(u)), u));
                let mut w: Vec<Position> = second.to_vec();
                w.sort_by_key(|&u| (std::cmp::Reverse(lean(u)), u));
                v.extend(w);
                v
            };
            steps.dedup();
            let mut arms = Vec::new();
            let paths = (0..=MAX_EXTRA_PATH_LENGTH)
                .flat_map(|extra| steps.iter().map(move |&step| (extra, step)))
                .map(|(extra, step)| ((1..=path_length + extra).map(|k| b + step * k).collect::<Vec<_>>(), step));
            for (path, step) in paths {
                let anchor = *path.last().expect("nonempty path");
                let mut ops = cap_orientations(step);
                let outward = |op: &SymmetryOp| std::cmp::Reverse(dot(op.apply(cap_pattern().terminal), b));
                ops.sort_by_key(|op| (outward(op), *op));
                for op in ops {
                    let (cap, terminal) = placed_cap(anchor, op);
                    let arm = Arm {
                        path: path.clone(),
                        cap,
                        terminal: Some(terminal),
                        reserve: Vec::new(),
                    };
                    if arm.cells().all(|p| !in_roof(p)) {
                        arms.push(arm);
                    }
                }
            }
            arms
        })
        .collect();
    if bridge {
        let b = boundary[0];
        let path: Vec<Position> = (1..=path_length).map(|k| b + BRIDGE_DIRECTION * k).collect();
        let end = *path.last().expect("nonempty path");
        // Column cells below the end, for this roof and for its mirror image.
        let u = COLUMN_AXIS;
        candidates[0] = vec![Arm {
            path,
            cap: Vec::new(),
            terminal: None,
            reserve: vec![end - u, end + bridge_mirror().apply(u)],
        }];
    }

    // Lengthen arms only when the ring is too crowded at the exact length.
    let mut found = None;
    for extra in 0..=MAX_EXTRA_PATH_LENGTH {
        let allowed: Vec<Vec<Arm>> = candidates
            .iter()
            .map(|arms| {
                arms.iter()
                    .filter(|a| a.path.len() as i32 <= path_length + extra)
                    .cloned()
                    .collect()
            })
            .collect();
        let mut layout = ArmLayout {
            candidates: &allowed,
            near: FxHashMap::default(),
            choice: vec![None; boundary.len()],
            budget: ARM_SEARCH_BUDGET,
        };
        if let Ok(true) = layout.place() {
            found = Some(
                layout
                    .choice
                    .iter()
                    .zip(&allowed)
                    .map(|(&c, arms)| arms[c.expect("complete layout")].clone())
                    .collect::<Vec<_>>(),
            );
            break;
        }
    }
    let arms = found.ok_or_else(|| {
        Error::Overlap(format!("no arm layout found (radius {radius}, path length {path_length})"))
    })?;
    let configuration = Configuration::new(
        roof.iter()
            .copied()
            .chain(arms.iter().flat_map(|a| a.path.iter().chain(&a.cap).copied())),
    )
    .map_err(|e| match e {
        Error::DuplicateModule(p) => Error::Overlap(format!("cell {p} used twice")),
        e => e,
    })?;
    configuration.require_connected()?;
    Ok(CappedRoof {
        configuration,
        roof,
        boundary,
        paths: arms.iter().map(|a| a.path.clone()).collect(),
        caps: arms.iter().map(|a| a.cap.clone()).collect(),
        terminals: arms.iter().map(|a| a.terminal).collect(),
    })
}

pub fn capped_roof(radius: i32, path_length: i32) -> Result<Configuration> {
    Ok(build_capped_roof(radius, path_length)?.configuration)
}

/// A single-layer configuration between two capped roofs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sandwich {
    pub configuration: Configuration,
    /// The confined input.
    pub confined: Configuration,
    /// Layer interval the confined modules must stay in.
    pub band: (i32, i32),
    /// In-layer path from the input to the column, nearest the input first.
    pub tether: Vec<Position>,
    /// Vertical column from the top roof's bridge arm down to the bottom
    /// one's, top first; its middle cell ends the tether.
    pub column: [Position; 3],
    pub top: CappedRoof,
    pub bottom: CappedRoof,
    /// Whether no single legal move (in either model) takes a module of the
    /// band out of it.
    pub confinement_verified: bool,
}

impl Sandwich {
    /// Modules in the band: the input and the tether.
    pub fn band_modules(&self) -> Vec<Position> {
        self.confined.iter().chain(self.tether.iter().copied()).collect()
    }
}

/// Places capped roofs two layers above and below a single-layer
/// configuration.
///
/// Both roofs are centered over the most central input module `c`, with
/// radius equal to the input's extent around `c` plus `margin`; their
/// vertical arms point away from the input. The roofs are joined through
/// the band at one place only, far from the input: the top roof's arm at
/// ring index 0 runs radially without a cap and continues as a straight
/// vertical column down to the matching arm of the bottom roof, which is
/// the top roof's image under `(x, y, z) -> (-z, -y, -x)`. A straight
/// in-layer tether connects the input to the column's middle cell along
/// the same radial direction.
///
/// Every tether and column module has two opposite neighbors or is a cut
/// vertex, and nothing lies in the layers next to the band except that
/// column and the roofs' outer caps, so input modules have no pivot for
/// leaving the band until they wander past the roof edge.
pub fn sandwich(c2d: &Configuration) -> Result<Sandwich> {
    sandwich_with(c2d, SANDWICH_PATH_LENGTH, SANDWICH_ROOF_MARGIN)
}

pub fn sandwich_with(c2d: &Configuration, path_length: i32, margin: i32) -> Result<Sandwich> {
    let (lo, hi) = c2d.layer_range();
    if lo != hi {
        return Err(Error::InputNotSingleLayer);
    }
    if margin < 1 {
        return Err(Error::InvalidParameter(format!("roof margin must be at least 1, got {margin}")));
    }
    let extent = |s: Position| c2d.iter().map(|p| hex_distance(s, p)).max().unwrap_or(0);
    let c = c2d.iter().min_by_key(|&p| (extent(p), p)).expect("nonempty");
    let radius = extent(c) + margin;
    let u = COLUMN_AXIS;

    let roof = build_roof(radius, path_length, VerticalArms::UpOnly, true)?;
    let reach = radius + path_length;
    let top = roof.translate(c + u * 2);
    let bottom = roof.transform(bridge_mirror()).translate(c - u * 2);
    let joint = c + BRIDGE_DIRECTION * reach;
    let column = [joint + u, joint, joint - u];
    debug_assert!(top.configuration.contains(joint + u * 2));
    debug_assert!(bottom.configuration.contains(joint - u * 2));
    let last_input = (0..reach)
        .rev()
        .find(|&k| c2d.contains(c + BRIDGE_DIRECTION * k))
        .expect("c is on the ray");
    let tether: Vec<Position> = (last_input + 1..reach).map(|k| c + BRIDGE_DIRECTION * k).collect();

    let mut cells: Vec<Position> = c2d.iter().collect();
    cells.extend(&tether);
    cells.extend(column);
    cells.extend(top.configuration.iter());
    cells.extend(bottom.configuration.iter());
    let configuration = Configuration::new(cells).map_err(|e| match e {
        Error::DuplicateModule(p) => Error::Overlap(format!("sandwich parts collide at {p}")),
        e => e,
    })?;
    configuration.require_connected()?;
    let band = (lo, hi);
    let catalog = Catalog::shipped();
    let confinement_verified = MoveModel::ALL
        .iter()
        .all(|&m| layer_confinement(&configuration, band, &Rules::new(catalog, m)).unwrap_or(false));
    Ok(Sandwich {
        configuration,
        confined: c2d.clone(),
        band,
        tether,
        column,
        top,
        bottom,
        confinement_verified,
    })
}

fn super_rigid_gadget() -> &'static Gadget {
    static G: OnceLock<Gadget> = OnceLock::new();
    G.get_or_init(|| load(SUPER_RIGID_FILE).expect("shipped super-rigid configuration is valid"))
}

fn free_rigid_gadget() -> &'static Gadget {
    static G: OnceLock<Gadget> = OnceLock::new();
    G.get_or_init(|| load(FREE_RIGID_FILE).expect("shipped rigid pair is valid"))
}

/// A 19-module, three-layer configuration that is super rigid in both
/// models. The middle layer is mapped to itself and the outer layers onto
/// each other by `(x, y, z) -> (-z, -y, -x)`.
pub fn super_rigid_config() -> Configuration {
    super_rigid_gadget().configuration.clone()
}

/// Named modules of [`super_rigid_config`]: `A`, `B`, `C` in the middle
/// layer and `1`, `2`, `3` in the layer above. `C` and `1` each have two
/// opposite neighbors.
pub fn super_rigid_labels() -> BTreeMap<String, Position> {
    super_rigid_gadget().labels.clone()
}

/// A rigid configuration and the same configuration plus one module, in
/// which a module of the original becomes mobile.
pub fn free_rigid_pair() -> (Configuration, Configuration) {
    let g = free_rigid_gadget();
    let added = g.added.expect("pair file names the added module");
    (g.configuration.clone(), g.configuration.with_added([added]))
}

/// The module whose addition unlocks the first configuration of
/// [`free_rigid_pair`].
pub fn free_rigid_added() -> Position {
    free_rigid_gadget().added.expect("pair file names the added module")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetKind {
    Roof,
    Cap,
    CappedRoof,
    Sandwich,
    SuperRigid,
    FreeRigidA,
    FreeRigidB,
}

impl GadgetKind {
    pub const ALL: [GadgetKind; 7] = [
        GadgetKind::Roof,
        GadgetKind::Cap,
        GadgetKind::CappedRoof,
        GadgetKind::Sandwich,
        GadgetKind::SuperRigid,
        GadgetKind::FreeRigidA,
        GadgetKind::FreeRigidB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GadgetKind::Roof => "roof",
            GadgetKind::Cap => "cap",
            GadgetKind::CappedRoof => "capped-roof",
            GadgetKind::Sandwich => "sandwich",
            GadgetKind::SuperRigid => "super-rigid",
            GadgetKind::FreeRigidA => "free-rigid-a",
            GadgetKind::FreeRigidB => "free-rigid-b",
        }
    }
}

impl fmt::Display for GadgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GadgetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GadgetKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown gadget {s:?}")))
    }
}

/// Parameters for [`build`]. Unused fields are ignored by kinds that do not
/// take them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetSpec {
    pub kind: GadgetKind,
    /// Roof radius (roof, capped roof; disk radius for sandwich).
    pub radius: i32,
    pub path_length: i32,
    /// Translation applied last.
    pub anchor: Position,
    /// Applied before translation.
    pub orientation: SymmetryOp,
    /// Layer of the roof; in-layer direction of the cap.
    pub layer: i32,
    pub direction: Position,
}

impl GadgetSpec {
    pub fn new(kind: GadgetKind) -> Self {
        Self {
            kind,
            radius: 1,
            path_length: 2,
            anchor: Position::ORIGIN,
            orientation: SymmetryOp::IDENTITY,
            layer: 0,
            direction: IN_LAYER_OFFSETS[0],
        }
    }
}

pub fn build(spec: &GadgetSpec) -> Result<Configuration> {
    if spec.radius < 1 && matches!(spec.kind, GadgetKind::Roof | GadgetKind::CappedRoof) {
        return Err(Error::InvalidParameter(format!("radius must be at least 1, got {}", spec.radius)));
    }
    let c = match spec.kind {
        GadgetKind::Roof => roof(spec.radius, spec.layer)?,
        GadgetKind::Cap => cap(Position::ORIGIN, spec.direction)?.with_added([Position::ORIGIN]),
        GadgetKind::CappedRoof => capped_roof(spec.radius, spec.path_length)?,
        GadgetKind::Sandwich => {
            if spec.radius < 0 {
                return Err(Error::InvalidParameter("disk radius must be non-negative".into()));
            }
            sandwich(&Configuration::new(hex_disk(Position::ORIGIN, spec.radius))?)?.configuration
        }
        GadgetKind::SuperRigid => super_rigid_config(),
        GadgetKind::FreeRigidA => free_rigid_pair().0,
        GadgetKind::FreeRigidB => free_rigid_pair().1,
    };
    Ok(c.transform(spec.orientation).translate(spec.anchor))
}

/// Class of `d` if it is a neighbor offset, for assertions on caps.
pub fn offset_class(d: Position) -> Option<NeighborClass> {
    crate::lattice::classify_offset(d).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roof_sizes() {
        for (r, n) in [(1, 7), (2, 19), (3, 37)] {
            let c = roof(r, 3).unwrap();
            assert_eq!(c.len(), n);
            assert_eq!(c.layer_range(), (3, 3));
            assert!(c.is_connected());
        }
        assert!(roof(0, 0).is_err());
    }

    #[test]
    fn ring_is_cyclic_and_at_distance() {
        for r in 1..4 {
            let ring = hex_ring(Position::ORIGIN, r);
            assert_eq!(ring.len(), 6 * r as usize);
            for (i, &p) in ring.iter().enumerate() {
                assert_eq!(hex_distance(Position::ORIGIN, p), r);
                assert!(p.is_adjacent(ring[(i + 1) % ring.len()]));
            }
        }
    }

    #[test]
    fn cap_terminal_is_held_from_above_and_below() {
        for d in IN_LAYER_OFFSETS {
            let anchor = Position::new(2, 0, 0).unwrap();
            let c = cap(anchor, d).unwrap();
            let t = cap_terminal(anchor, d).unwrap();
            assert!(c.contains(t));
            let held = UP_OFFSETS.iter().any(|&u| c.contains(t + u) && c.contains(t - u));
            assert!(held);
            assert!(c.with_added([anchor]).is_connected());
            assert!(c.is_connected());
        }
        assert_eq!(
            cap(Position::ORIGIN, UP_OFFSETS[0]),
            Err(Error::InvalidDirection(UP_OFFSETS[0]))
        );
    }

    #[test]
    fn capped_roof_is_deterministic() {
        assert_eq!(capped_roof(2, 3).unwrap().serialize(), capped_roof(2, 3).unwrap().serialize());
    }

    #[test]
    fn capped_roof_parameter_checks() {
        assert!(matches!(capped_roof(0, 2), Err(Error::InvalidParameter(_))));
        assert!(matches!(capped_roof(1, 1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn sandwich_rejects_multi_layer_input() {
        let c = Configuration::new([Position::ORIGIN, UP_OFFSETS[0]]).unwrap();
        assert_eq!(sandwich(&c), Err(Error::InputNotSingleLayer));
    }

    #[test]
    fn super_rigid_config_shape() {
        let g = super_rigid_config();
        assert_eq!(g.len(), 19);
        assert!(g.is_connected());
        let (lo, hi) = g.layer_range();
        assert_eq!(hi - lo, 2);
        let mirror = |p: Position| Position::new(-p.z(), -p.y(), -p.x()).unwrap();
        assert!(g.iter().all(|p| g.contains(mirror(p))));
        let labels = super_rigid_labels();
        assert_eq!(labels.len(), 6);
        assert!(labels.values().all(|&p| g.contains(p)));
    }

    #[test]
    fn free_rigid_pair_differs_by_one() {
        let (a, b) = free_rigid_pair();
        assert_eq!(a.len() + 1, b.len());
        assert!(b.contains(free_rigid_added()));
        assert!(a.is_connected() && b.is_connected());
    }
}
