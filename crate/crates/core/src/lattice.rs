//! Integer coordinates for the rhombic-dodecahedral (FCC) lattice.
//!
//! Module centers are integer triples `(x, y, z)` with `x + y + z` even.
//! Every center has 12 nearest neighbors at the permutations of
//! `(±1, ±1, 0)`. Planes of constant `(x + y + z) / 2` are the hexagonal
//! layers: a neighbor offset with coordinate sum 0 stays in the layer, sum
//! +2 goes one layer up and sum -2 one layer down.
//!
//! Because the layer index is a linear function of the coordinates, the
//! up/down neighbor offsets are the same for every position. The ABC
//! stacking of the layers only shows up when a position is written in
//! per-layer axial coordinates ([`HexLayerCoord`]).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A lattice point, also used for lattice vectors (offsets between points).
///
/// The parity invariant (`x + y + z` even) is enforced on construction, so
/// every `Position` in circulation is valid. Ordering is lexicographic on
/// `(x, y, z)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Position {
    x: i32,
    y: i32,
    z: i32,
}

impl Position {
    pub const ORIGIN: Position = Position { x: 0, y: 0, z: 0 };

    pub fn new(x: i32, y: i32, z: i32) -> Result<Self> {
        if (x + y + z).rem_euclid(2) != 0 {
            return Err(Error::InvalidPosition(x, y, z));
        }
        Ok(Self { x, y, z })
    }

    /// Constructor for compile-time tables; the caller guarantees parity.
    pub(crate) const fn raw(x: i32, y: i32, z: i32) -> Self {
        Self { x, y, z }
    }

    pub fn x(self) -> i32 {
        self.x
    }

    pub fn y(self) -> i32 {
        self.y
    }

    pub fn z(self) -> i32 {
        self.z
    }

    pub fn coords(self) -> [i32; 3] {
        [self.x, self.y, self.z]
    }

    /// Layer index `(x + y + z) / 2`.
    pub fn layer(self) -> i32 {
        (self.x + self.y + self.z) / 2
    }

    pub fn is_neighbor_offset(self) -> bool {
        let mut a = [self.x.abs(), self.y.abs(), self.z.abs()];
        a.sort_unstable();
        a == [0, 1, 1]
    }

    pub fn is_adjacent(self, other: Position) -> bool {
        (other - self).is_neighbor_offset()
    }

    /// The 12 neighbors in [`NEIGHBOR_OFFSETS`] order.
    pub fn neighbors(self) -> [Position; 12] {
        NEIGHBOR_OFFSETS.map(|d| self + d)
    }

    pub fn to_hex(self) -> HexLayerCoord {
        let layer = self.layer();
        HexLayerCoord {
            q: self.x - layer,
            r: -self.z,
            layer,
        }
    }
}

impl TryFrom<[i32; 3]> for Position {
    type Error = Error;

    fn try_from(c: [i32; 3]) -> Result<Self> {
        Position::new(c[0], c[1], c[2])
    }
}

impl From<Position> for [i32; 3] {
    fn from(p: Position) -> Self {
        p.coords()
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for Position {
    type Output = Position;

    fn add(self, o: Position) -> Position {
        Position::raw(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Position {
    type Output = Position;

    fn sub(self, o: Position) -> Position {
        Position::raw(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Position {
    type Output = Position;

    fn neg(self) -> Position {
        Position::raw(-self.x, -self.y, -self.z)
    }
}

impl Mul<i32> for Position {
    type Output = Position;

    fn mul(self, k: i32) -> Position {
        Position::raw(self.x * k, self.y * k, self.z * k)
    }
}

impl Serialize for Position {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Position {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let c = <[i32; 3]>::deserialize(d)?;
        Position::try_from(c).map_err(serde::de::Error::custom)
    }
}

/// Which way a neighbor offset points relative to the layer structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NeighborClass {
    InLayer,
    Up,
    Down,
}

/// The 12 neighbor offsets: the six in-layer offsets in counter-clockwise
/// order around the hexagon (seen from above), then the three up offsets,
/// then the three down offsets. Index `i` and `i + 3` of the in-layer block
/// are opposite; `UP[i]` and `DOWN[i]` are opposite.
pub const NEIGHBOR_OFFSETS: [Position; 12] = [
    Position::raw(1, -1, 0),
    Position::raw(1, 0, -1),
    Position::raw(0, 1, -1),
    Position::raw(-1, 1, 0),
    Position::raw(-1, 0, 1),
    Position::raw(0, -1, 1),
    Position::raw(1, 1, 0),
    Position::raw(1, 0, 1),
    Position::raw(0, 1, 1),
    Position::raw(-1, -1, 0),
    Position::raw(-1, 0, -1),
    Position::raw(0, -1, -1),
];

pub const IN_LAYER_OFFSETS: [Position; 6] = [
    NEIGHBOR_OFFSETS[0],
    NEIGHBOR_OFFSETS[1],
    NEIGHBOR_OFFSETS[2],
    NEIGHBOR_OFFSETS[3],
    NEIGHBOR_OFFSETS[4],
    NEIGHBOR_OFFSETS[5],
];

pub const UP_OFFSETS: [Position; 3] = [NEIGHBOR_OFFSETS[6], NEIGHBOR_OFFSETS[7], NEIGHBOR_OFFSETS[8]];

pub const DOWN_OFFSETS: [Position; 3] = [NEIGHBOR_OFFSETS[9], NEIGHBOR_OFFSETS[10], NEIGHBOR_OFFSETS[11]];

/// One representative from each of the six opposite pairs `{d, -d}`.
pub const AXES: [Position; 6] = [
    NEIGHBOR_OFFSETS[0],
    NEIGHBOR_OFFSETS[1],
    NEIGHBOR_OFFSETS[2],
    NEIGHBOR_OFFSETS[6],
    NEIGHBOR_OFFSETS[7],
    NEIGHBOR_OFFSETS[8],
];

/// The neighbors of `p`, in [`NEIGHBOR_OFFSETS`] order.
pub fn neighbors(p: Position) -> [Position; 12] {
    p.neighbors()
}

pub fn classify_offset(d: Position) -> Result<NeighborClass> {
    if !d.is_neighbor_offset() {
        return Err(Error::NotANeighbor(d));
    }
    Ok(match d.x + d.y + d.z {
        0 => NeighborClass::InLayer,
        2 => NeighborClass::Up,
        _ => NeighborClass::Down,
    })
}

/// Axial coordinates within a hexagonal layer.
///
/// `(x, y, z) = layer·(1,1,0) + q·(1,-1,0) + r·(0,1,-1)`. In-layer
/// neighbors differ by `±(1,0)`, `±(0,1)` or `±(1,1)` in `(q, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HexLayerCoord {
    pub q: i32,
    pub r: i32,
    pub layer: i32,
}

impl HexLayerCoord {
    pub fn new(q: i32, r: i32, layer: i32) -> Self {
        Self { q, r, layer }
    }

    pub fn to_position(self) -> Position {
        Position::raw(self.layer + self.q, self.layer - self.q + self.r, -self.r)
    }
}

pub fn hex_layer(p: Position) -> HexLayerCoord {
    p.to_hex()
}

pub fn from_hex_layer(h: HexLayerCoord) -> Position {
    h.to_position()
}

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [2, 0, 1], [1, 2, 0], [1, 0, 2], [0, 2, 1], [2, 1, 0]];

/// A layer-preserving point symmetry of the lattice: permute the axes, then
/// multiply every coordinate by `sign`.
///
/// Output coordinate `i` is `sign * input[perm[i]]`. The twelve operations
/// fix the `(1,1,1)` direction up to sign, so they map layers to layers;
/// `sign = -1` exchanges up and down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "SymmetryOpRepr")]
pub struct SymmetryOp {
    perm: [usize; 3],
    sign: i32,
}

#[derive(Deserialize)]
struct SymmetryOpRepr {
    perm: [usize; 3],
    sign: i32,
}

impl TryFrom<SymmetryOpRepr> for SymmetryOp {
    type Error = Error;

    fn try_from(r: SymmetryOpRepr) -> Result<Self> {
        SymmetryOp::new(r.perm, r.sign)
    }
}

impl SymmetryOp {
    pub const IDENTITY: SymmetryOp = SymmetryOp {
        perm: [0, 1, 2],
        sign: 1,
    };

    /// All 12 operations; identity first, then the remaining sign +1
    /// elements, then their sign -1 counterparts.
    pub fn all() -> [SymmetryOp; 12] {
        let mut out = [Self::IDENTITY; 12];
        for (i, sign) in [1, -1].into_iter().enumerate() {
            for (j, perm) in PERMUTATIONS.into_iter().enumerate() {
                out[i * 6 + j] = SymmetryOp { perm, sign };
            }
        }
        out
    }

    pub fn new(perm: [usize; 3], sign: i32) -> Result<Self> {
        let mut seen = [false; 3];
        for &i in &perm {
            if i > 2 || seen[i] {
                return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation")));
            }
            seen[i] = true;
        }
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidParameter(format!("sign must be ±1, got {sign}")));
        }
        Ok(Self { perm, sign })
    }

    /// The point inversion `p -> -p`.
    pub fn inversion() -> SymmetryOp {
        SymmetryOp {
            perm: [0, 1, 2],
            sign: -1,
        }
    }

    pub fn perm(self) -> [usize; 3] {
        self.perm
    }

    pub fn sign(self) -> i32 {
        self.sign
    }

    pub fn flips_layers(self) -> bool {
        self.sign < 0
    }

    pub fn apply(self, p: Position) -> Position {
        let c = p.coords();
        Position::raw(
            self.sign * c[self.perm[0]],
            self.sign * c[self.perm[1]],
            self.sign * c[self.perm[2]],
        )
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(self, other: SymmetryOp) -> SymmetryOp {
        // out[i] = s1 * (s2 * in[p2[p1[i]]])
        SymmetryOp {
            perm: [other.perm[self.perm[0]], other.perm[self.perm[1]], other.perm[self.perm[2]]],
            sign: self.sign * other.sign,
        }
    }

    pub fn inverse(self) -> SymmetryOp {
        let mut perm = [0; 3];
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p] = i;
        }
        SymmetryOp { perm, sign: self.sign }
    }
}

pub fn apply_symmetry(op: SymmetryOp, p: Position) -> Position {
    op.apply(p)
}
