//! Configurations: finite sets of occupied lattice positions.

use std::fmt;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::occupancy::IndexGrid;
use crate::lattice::{HexLayerCoord, Position, SymmetryOp, NEIGHBOR_OFFSETS};

/// A robot state: a nonempty set of distinct module positions.
///
/// Positions are kept sorted lexicographically, which makes equality,
/// hashing and serialization canonical for a fixed placement.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    modules: Vec<Position>,
}

impl Configuration {
    pub fn new(positions: impl IntoIterator<Item = Position>) -> Result<Self> {
        let mut modules: Vec<Position> = positions.into_iter().collect();
        if modules.is_empty() {
            return Err(Error::EmptyConfiguration);
        }
        modules.sort_unstable();
        if let Some(w) = modules.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateModule(w[0]));
        }
        Ok(Self { modules })
    }

    /// Like [`Configuration::new`] but also requires connectivity.
    pub fn new_connected(positions: impl IntoIterator<Item = Position>) -> Result<Self> {
        let c = Self::new(positions)?;
        c.require_connected()?;
        Ok(c)
    }

    /// Builds from raw triples, checking parity.
    pub fn from_coords(coords: &[[i32; 3]]) -> Result<Self> {
        let positions = coords.iter().map(|&c| Position::try_from(c)).collect::<Result<Vec<_>>>()?;
        Self::new(positions)
    }

    pub fn single(p: Position) -> Self {
        Self { modules: vec![p] }
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    /// Always false; kept for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn positions(&self) -> &[Position] {
        &self.modules
    }

    pub fn iter(&self) -> impl Iterator<Item = Position> + '_ {
        self.modules.iter().copied()
    }

    pub fn contains(&self, p: Position) -> bool {
        self.modules.binary_search(&p).is_ok()
    }

    pub fn index_of(&self, p: Position) -> Option<usize> {
        self.modules.binary_search(&p).ok()
    }

    /// Lexicographically smallest module.
    pub fn min_position(&self) -> Position {
        self.modules[0]
    }

    /// Inclusive (min, max) corners of the axis-aligned bounding box.
    pub fn bounding_box(&self) -> ([i32; 3], [i32; 3]) {
        let mut lo = [i32::MAX; 3];
        let mut hi = [i32::MIN; 3];
        for p in &self.modules {
            for (i, c) in p.coords().into_iter().enumerate() {
                lo[i] = lo[i].min(c);
                hi[i] = hi[i].max(c);
            }
        }
        (lo, hi)
    }

    /// Inclusive range of layer indices touched.
    pub fn layer_range(&self) -> (i32, i32) {
        let lo = self.modules.iter().map(|p| p.layer()).min().unwrap_or(0);
        let hi = self.modules.iter().map(|p| p.layer()).max().unwrap_or(0);
        (lo, hi)
    }

    pub fn translate(&self, v: Position) -> Configuration {
        Configuration {
            modules: self.modules.iter().map(|&p| p + v).collect(),
        }
    }

    pub fn transform(&self, op: SymmetryOp) -> Configuration {
        let mut modules: Vec<Position> = self.modules.iter().map(|&p| op.apply(p)).collect();
        modules.sort_unstable();
        Configuration { modules }
    }

    /// Adds modules; duplicates of existing modules are ignored.
    pub fn with_added(&self, extra: impl IntoIterator<Item = Position>) -> Configuration {
        let mut modules = self.modules.clone();
        modules.extend(extra);
        modules.sort_unstable();
        modules.dedup();
        Configuration { modules }
    }

    /// The configuration minus `p`; `None` if `p` is the only module.
    pub fn without(&self, p: Position) -> Result<Option<Configuration>> {
        let i = self.index_of(p).ok_or(Error::PositionNotInConfiguration(p))?;
        if self.modules.len() == 1 {
            return Ok(None);
        }
        let mut modules = self.modules.clone();
        modules.remove(i);
        Ok(Some(Configuration { modules }))
    }

    /// Relocates the module at `source` to the empty cell `target`.
    pub fn relocate(&self, source: Position, target: Position) -> Result<Configuration> {
        let i = self.index_of(source).ok_or(Error::PositionNotInConfiguration(source))?;
        if self.contains(target) {
            return Err(Error::DuplicateModule(target));
        }
        let mut modules = self.modules.clone();
        modules.remove(i);
        let j = modules.binary_search(&target).unwrap_err();
        modules.insert(j, target);
        Ok(Configuration { modules })
    }

    /// Position -> index map for repeated membership queries.
    pub fn index(&self) -> FxHashMap<Position, usize> {
        let mut map = FxHashMap::with_capacity_and_hasher(self.modules.len(), Default::default());
        for (i, &p) in self.modules.iter().enumerate() {
            map.insert(p, i);
        }
        map
    }

    /// Neighbor lists by module index.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let grid = IndexGrid::new(self);
        self.modules
            .iter()
            .map(|&p| NEIGHBOR_OFFSETS.iter().filter_map(|&d| grid.get(p + d)).collect())
            .collect()
    }

    /// Adjacency in compressed form: neighbors of `i` are
    /// `targets[offsets[i]..offsets[i + 1]]`.
    fn compressed_adjacency(&self) -> (Vec<u32>, Vec<u32>) {
        let grid = IndexGrid::new(self);
        let mut offsets = Vec::with_capacity(self.modules.len() + 1);
        let mut targets = Vec::with_capacity(self.modules.len() * 6);
        offsets.push(0);
        for &p in &self.modules {
            targets.extend(NEIGHBOR_OFFSETS.iter().filter_map(|&d| grid.get(p + d)).map(|j| j as u32));
            offsets.push(targets.len() as u32);
        }
        (offsets, targets)
    }

    pub fn is_connected(&self) -> bool {
        self.reachable_count(None) == self.modules.len()
    }

    pub fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }

    /// Whether the configuration minus `p` is connected.
    ///
    /// A single remaining module counts as connected. Removing the only
    /// module of a one-module configuration is rejected by the precondition
    /// `|C| ≥ 2` and reported as `true` (nothing left to disconnect).
    pub fn is_connected_without(&self, p: Position) -> Result<bool> {
        let skip = self.index_of(p).ok_or(Error::PositionNotInConfiguration(p))?;
        if self.modules.len() <= 2 {
            return Ok(true);
        }
        Ok(self.reachable_count(Some(skip)) == self.modules.len() - 1)
    }

    fn reachable_count(&self, skip: Option<usize>) -> usize {
        let grid = IndexGrid::new(self);
        let n = self.modules.len();
        let start = match skip {
            Some(0) if n > 1 => 1,
            _ => 0,
        };
        let mut seen = vec![false; n];
        if let Some(s) = skip {
            seen[s] = true;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for d in NEIGHBOR_OFFSETS {
                if let Some(j) = grid.get(self.modules[i] + d) {
                    if !seen[j] {
                        seen[j] = true;
                        count += 1;
                        stack.push(j);
                    }
                }
            }
        }
        count
    }

    /// Cut vertices of the module adjacency graph, as a flag per module
    /// index. Linear-time (iterative Tarjan low-link).
    pub fn articulation_points(&self) -> Vec<bool> {
        let (offsets, targets) = self.compressed_adjacency();
        articulation_points_csr(&offsets, &targets)
    }

    /// Translates so that the lexicographically smallest module sits at
    /// the origin.
    pub fn canonicalize(&self) -> Configuration {
        self.translate(-self.min_position())
    }

    pub fn is_canonical(&self) -> bool {
        self.min_position() == Position::ORIGIN
    }

    /// Canonical form modulo translations and the 12 layer-preserving
    /// point symmetries: the smallest canonicalized image.
    pub fn canonicalize_up_to_symmetry(&self) -> Configuration {
        SymmetryOp::all()
            .into_iter()
            .map(|op| self.transform(op).canonicalize())
            .min()
            .expect("twelve images")
    }

    /// Whether `other` is a translate of `self`.
    pub fn equal_up_to_translation(&self, other: &Configuration) -> bool {
        self.len() == other.len() && self.canonicalize() == other.canonicalize()
    }

    pub fn to_file(&self, coords: CoordSystem) -> ConfigFile {
        let modules = self
            .modules
            .iter()
            .map(|&p| match coords {
                CoordSystem::Xyz => p.coords(),
                CoordSystem::Hex => {
                    let h = p.to_hex();
                    [h.q, h.r, h.layer]
                }
            })
            .collect();
        ConfigFile { coords, modules }
    }

    /// JSON text in the `xyz` convention with modules sorted.
    pub fn serialize(&self) -> String {
        serde_json::to_string(&self.to_file(CoordSystem::Xyz)).expect("plain data serializes")
    }

    pub fn serialize_with(&self, coords: CoordSystem, pretty: bool) -> String {
        let file = self.to_file(coords);
        if pretty {
            serde_json::to_string_pretty(&file)
        } else {
            serde_json::to_string(&file)
        }
        .expect("plain data serializes")
    }

    /// Parses the JSON configuration format. With `strict`, disconnected
    /// input is rejected.
    pub fn parse(text: &str, strict: bool) -> Result<Configuration> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let c = file.to_configuration()?;
        if strict {
            c.require_connected()?;
        }
        Ok(c)
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.modules.iter()).finish()
    }
}

impl Serialize for Configuration {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file(CoordSystem::Xyz).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ConfigFile::deserialize(d)?.to_configuration().map_err(serde::de::Error::custom)
    }
}

impl<'a> IntoIterator for &'a Configuration {
    type Item = &'a Position;
    type IntoIter = std::slice::Iter<'a, Position>;

    fn into_iter(self) -> Self::IntoIter {
        self.modules.iter()
    }
}

/// Coordinate convention used in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CoordSystem {
    #[default]
    Xyz,
    /// `(q, r, layer)` axial triples.
    Hex,
}

/// On-disk configuration: `{"coords": "xyz"|"hex", "modules": [[a,b,c], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub coords: CoordSystem,
    pub modules: Vec<[i32; 3]>,
}

impl ConfigFile {
    pub fn to_configuration(&self) -> Result<Configuration> {
        let positions = self
            .modules
            .iter()
            .map(|&[a, b, c]| match self.coords {
                CoordSystem::Xyz => Position::new(a, b, c),
                CoordSystem::Hex => Ok(HexLayerCoord::new(a, b, c).to_position()),
            })
            .collect::<Result<Vec<_>>>()?;
        Configuration::new(positions)
    }
}

/// Iterative Tarjan articulation points over a compressed adjacency.
fn articulation_points_csr(offsets: &[u32], targets: &[u32]) -> Vec<bool> {
    const UNSEEN: u32 = u32::MAX;
    let n = offsets.len() - 1;
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut cut = vec![false; n];
    let mut timer = 0u32;
    // (vertex, parent, next neighbor slot)
    let mut stack: Vec<(u32, u32, u32)> = Vec::new();
    for root in 0..n {
        if disc[root] != UNSEEN {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        let mut root_children = 0;
        stack.push((root as u32, UNSEEN, offsets[root]));
        while let Some(frame) = stack.last_mut() {
            let (v, parent, slot) = *frame;
            let v = v as usize;
            if slot < offsets[v + 1] {
                frame.2 += 1;
                let w = targets[slot as usize];
                if w == parent {
                    continue;
                }
                let w = w as usize;
                if disc[w] == UNSEEN {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w as u32, v as u32, offsets[w]));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent != UNSEEN {
                    let parent = parent as usize;
                    low[parent] = low[parent].min(low[v]);
                    if parent != root && low[v] >= disc[parent] {
                        cut[parent] = true;
                    }
                }
            }
        }
        if root_children > 1 {
            cut[root] = true;
        }
    }
    cut
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i32, y: i32, z: i32) -> Position {
        Position::new(x, y, z).unwrap()
    }

    fn conf(ps: &[[i32; 3]]) -> Configuration {
        Configuration::from_coords(ps).unwrap()
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Configuration::new(Vec::new()), Err(Error::EmptyConfiguration));
        assert_eq!(
            Configuration::new([p(0, 0, 0), p(1, 1, 0), p(0, 0, 0)]),
            Err(Error::DuplicateModule(p(0, 0, 0)))
        );
        assert_eq!(Configuration::from_coords(&[[0, 0, 1]]), Err(Error::InvalidPosition(0, 0, 1)));
    }

    #[test]
    fn connectivity_examples() {
        assert!(conf(&[[0, 0, 0]]).is_connected());
        assert!(conf(&[[0, 0, 0], [1, 1, 0]]).is_connected());
        assert!(!conf(&[[0, 0, 0], [4, 0, 0]]).is_connected());
    }

    #[test]
    fn connected_without_examples() {
        let path = conf(&[[0, 0, 0], [1, -1, 0], [2, -2, 0]]);
        assert!(path.is_connected_without(p(0, 0, 0)).unwrap());
        assert!(!path.is_connected_without(p(1, -1, 0)).unwrap());
        let tri = conf(&[[0, 0, 0], [1, -1, 0], [1, 0, -1]]);
        for q in tri.iter() {
            assert!(tri.is_connected_without(q).unwrap());
        }
        assert_eq!(
            path.is_connected_without(p(2, 0, 0)),
            Err(Error::PositionNotInConfiguration(p(2, 0, 0)))
        );
    }

    #[test]
    fn articulation_points_of_a_path_and_a_star() {
        let path = conf(&[[0, 0, 0], [1, -1, 0], [2, -2, 0], [3, -3, 0]]);
        assert_eq!(path.articulation_points(), vec![false, true, true, false]);
        let star = conf(&[[0, 0, 0], [1, -1, 0], [-1, 1, 0], [1, 1, 0]]);
        let cut = star.articulation_points();
        assert!(cut[star.index_of(p(0, 0, 0)).unwrap()]);
        assert_eq!(cut.iter().filter(|&&c| c).count(), 1);
    }

    #[test]
    fn canonicalize_examples() {
        let c = conf(&[[2, 0, 0], [3, 1, 0]]);
        assert_eq!(c.canonicalize(), conf(&[[0, 0, 0], [1, 1, 0]]));
        assert!(c.canonicalize().is_canonical());
    }

    #[test]
    fn relocate_and_without() {
        let c = conf(&[[0, 0, 0], [1, 1, 0]]);
        let moved = c.relocate(p(0, 0, 0), p(2, 0, 0)).unwrap();
        assert_eq!(moved, conf(&[[1, 1, 0], [2, 0, 0]]));
        assert_eq!(c.relocate(p(0, 0, 0), p(1, 1, 0)), Err(Error::DuplicateModule(p(1, 1, 0))));
        assert_eq!(c.without(p(1, 1, 0)).unwrap(), Some(conf(&[[0, 0, 0]])));
        assert_eq!(conf(&[[0, 0, 0]]).without(p(0, 0, 0)).unwrap(), None);
    }

    #[test]
    fn parse_examples() {
        let c = Configuration::parse(r#"{"coords":"xyz","modules":[[0,0,0],[1,1,0]]}"#, true).unwrap();
        assert_eq!(c.len(), 2);
        let h = Configuration::parse(r#"{"coords":"hex","modules":[[0,0,1]]}"#, true).unwrap();
        assert_eq!(h.positions(), &[p(1, 1, 0)]);
        assert_eq!(
            Configuration::parse(r#"{"coords":"xyz","modules":[[0,0,1]]}"#, false),
            Err(Error::InvalidPosition(0, 0, 1))
        );
        assert_eq!(
            Configuration::parse(r#"{"coords":"xyz","modules":[[0,0,0],[0,0,0]]}"#, false),
            Err(Error::DuplicateModule(p(0, 0, 0)))
        );
        assert!(matches!(Configuration::parse("{]", false), Err(Error::Malformed(_))));
        assert!(matches!(
            Configuration::parse(r#"{"coords":"abc","modules":[]}"#, false),
            Err(Error::Malformed(_))
        ));
        let far = r#"{"coords":"xyz","modules":[[0,0,0],[4,0,0]]}"#;
        assert!(Configuration::parse(far, false).is_ok());
        assert_eq!(Configuration::parse(far, true), Err(Error::Disconnected));
    }

    #[test]
    fn serializer_emits_sorted_xyz() {
        let c = conf(&[[3, 1, 0], [2, 0, 0]]);
        assert_eq!(c.serialize(), r#"{"coords":"xyz","modules":[[2,0,0],[3,1,0]]}"#);
    }
}
