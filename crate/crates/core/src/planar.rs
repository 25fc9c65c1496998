//! Comparison of in-layer templates with the planar hexagonal moves.
//!
//! Restricted to the source layer, an in-layer move of a rhombic
//! dodecahedron is a move of a hexagon in the triangular lattice. This
//! module slices the catalog's in-layer classes and compares them with a
//! separately written hexagon catalog in axial `(q, r)` coordinates.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{HexLayerCoord, Position, SymmetryOp};
use crate::moves::{Catalog, MoveClass, MoveModel, MoveTemplate};

pub const SHIPPED_HEX_MOVES: &str = include_str!("../data/hex_moves.json");

pub type Axial = [i32; 2];

/// A planar hexagon move in axial coordinates, mover at `[0, 0]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HexTemplate {
    pub class: MoveClass,
    pub base: Vec<Axial>,
    pub empty: Vec<Axial>,
    pub target: Axial,
}

impl HexTemplate {
    fn normalized(mut self) -> Self {
        self.base.sort_unstable();
        self.base.dedup();
        self.empty.sort_unstable();
        self.empty.dedup();
        self
    }

    /// Applies a lattice symmetry through the layer-0 embedding. All 12
    /// operations fix layer 0, acting there as the hexagon's dihedral group.
    pub fn transform(&self, op: SymmetryOp) -> HexTemplate {
        let f = |a: Axial| to_axial(op.apply(from_axial(a)));
        HexTemplate {
            class: self.class,
            base: self.base.iter().map(|&a| f(a)).collect(),
            empty: self.empty.iter().map(|&a| f(a)).collect(),
            target: f(self.target),
        }
        .normalized()
    }
}

fn from_axial([q, r]: Axial) -> Position {
    HexLayerCoord::new(q, r, 0).to_position()
}

fn to_axial(p: Position) -> Axial {
    let h = p.to_hex();
    [h.q, h.r]
}

/// Source-layer slice of an in-layer template; `None` for other classes.
pub fn slice(t: &MoveTemplate) -> Option<HexTemplate> {
    if t.target().layer() != 0 || t.class() == MoveClass::Face {
        return None;
    }
    let in_layer = |ps: &[Position]| ps.iter().filter(|p| p.layer() == 0).map(|&p| to_axial(p)).collect();
    Some(
        HexTemplate {
            class: t.class(),
            base: in_layer(t.base()),
            empty: in_layer(t.empty()),
            target: to_axial(t.target()),
        }
        .normalized(),
    )
}

pub fn parse_hex_catalog(text: &str) -> Result<Vec<HexTemplate>> {
    let list: Vec<HexTemplate> =
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("hex catalog: {e}")))?;
    Ok(list.into_iter().map(HexTemplate::normalized).collect())
}

/// Per-class outcome of [`check_2d_equivalence`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassComparison {
    pub class: MoveClass,
    pub matched: bool,
    /// Orientations of the hexagon moves of this class.
    pub hex_orientations: usize,
    /// Distinct slices of the lattice templates of this class.
    pub slice_orientations: usize,
    pub missing_from_catalog: Vec<HexTemplate>,
    pub extra_in_catalog: Vec<HexTemplate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub all_matched: bool,
    pub classes: Vec<ClassComparison>,
}

/// Compares in-layer slices of `catalog` against `hex` (both closed under
/// the dihedral group), class by class.
pub fn compare(catalog: &Catalog, hex: &[HexTemplate]) -> EquivalenceReport {
    let mut classes = Vec::new();
    for class in [MoveClass::InLayer, MoveClass::InLayerMonkey] {
        let hex_set: BTreeSet<HexTemplate> = hex
            .iter()
            .filter(|h| h.class == class)
            .flat_map(|h| SymmetryOp::all().map(|op| h.transform(op)))
            .collect();
        let slice_set: BTreeSet<HexTemplate> = catalog
            .templates(MoveModel::Monkey)
            .iter()
            .filter(|t| t.class() == class)
            .filter_map(slice)
            .collect();
        let missing: Vec<_> = hex_set.difference(&slice_set).cloned().collect();
        let extra: Vec<_> = slice_set.difference(&hex_set).cloned().collect();
        classes.push(ClassComparison {
            class,
            matched: missing.is_empty() && extra.is_empty() && !hex_set.is_empty(),
            hex_orientations: hex_set.len(),
            slice_orientations: slice_set.len(),
            missing_from_catalog: missing,
            extra_in_catalog: extra,
        });
    }
    EquivalenceReport {
        all_matched: classes.iter().all(|c| c.matched),
        classes,
    }
}

/// [`compare`] with the shipped hexagon catalog.
pub fn check_2d_equivalence(catalog: &Catalog) -> EquivalenceReport {
    let hex = parse_hex_catalog(SHIPPED_HEX_MOVES).expect("shipped hex catalog is valid");
    compare(catalog, &hex)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_catalogs_agree() {
        let report = check_2d_equivalence(Catalog::shipped());
        assert!(report.all_matched, "{report:#?}");
        assert_eq!(report.classes[0].hex_orientations, 12);
        assert_eq!(report.classes[1].hex_orientations, 12);
    }

    #[test]
    fn perturbed_hex_move_is_reported() {
        let mut hex = parse_hex_catalog(SHIPPED_HEX_MOVES).unwrap();
        hex[0].empty.pop();
        let report = compare(Catalog::shipped(), &hex);
        assert!(!report.all_matched);
        assert!(!report.classes[0].matched);
        assert!(report.classes[1].matched);
    }

    #[test]
    fn slice_of_planar_template_is_itself() {
        // A template with nothing outside the source layer slices to itself.
        let hex = &parse_hex_catalog(SHIPPED_HEX_MOVES).unwrap()[0];
        let lift = |v: &[Axial]| v.iter().map(|&a| from_axial(a)).collect::<Vec<_>>();
        let t = MoveTemplate::new(MoveClass::InLayer, lift(&hex.base), lift(&hex.empty), from_axial(hex.target)).unwrap();
        assert_eq!(slice(&t).as_ref(), Some(hex));
    }
}
