//! Move templates, the move catalog, legality and application.
//!
//! A template describes one pivoting move relative to the mover, which
//! sits at the zero offset: the `base` cells must hold modules (the pivot),
//! the `empty` cells must be free, and the mover ends at `target`. The
//! catalog file holds one orientation per move family; loading closes it
//! under the 12 layer-preserving symmetries.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::lattice::{Position, SymmetryOp, AXES};
use crate::occupancy::Occupancy;

/// The shipped catalog in canonical orientation.
pub const SHIPPED_CATALOG: &str = include_str!("../data/catalog.json");

/// Largest coordinate magnitude of any template offset the dense occupancy
/// grid must cover without falling off the box.
const TEMPLATE_REACH: i32 = 4;

/// Which move families are available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveModel {
    Restricted,
    /// Restricted moves plus monkey moves.
    Monkey,
}

impl MoveModel {
    pub const ALL: [MoveModel; 2] = [MoveModel::Restricted, MoveModel::Monkey];

    pub fn name(self) -> &'static str {
        match self {
            MoveModel::Restricted => "restricted",
            MoveModel::Monkey => "monkey",
        }
    }

    /// Whether templates of tier `class_model` are available in this model.
    pub fn includes(self, class_model: MoveModel) -> bool {
        class_model <= self
    }
}

impl fmt::Display for MoveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MoveModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "restricted" => Ok(MoveModel::Restricted),
            "monkey" => Ok(MoveModel::Monkey),
            other => Err(Error::InvalidParameter(format!("unknown move model {other:?}"))),
        }
    }
}

/// Move family of a template.
///
/// Restricted moves are single 120° rotations about an edge shared with the
/// pivot. They split by where the mover starts and ends relative to the
/// layers of the source, target and pivot:
///
/// | class | target layer | pivot layer |
/// |---|---|---|
/// | `InLayer` | source | source |
/// | `Face` | source | adjacent |
/// | `OutOfLayerTargetBase` | adjacent | target |
/// | `OutOfLayerSourceBase` | adjacent | source |
///
/// Monkey moves chain two such rotations about the same pivot and land on a
/// cell that is not adjacent to the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveClass {
    InLayer,
    Face,
    OutOfLayerTargetBase,
    OutOfLayerSourceBase,
    InLayerMonkey,
    OutOfLayerMonkey,
}

impl MoveClass {
    pub const ALL: [MoveClass; 6] = [
        MoveClass::InLayer,
        MoveClass::Face,
        MoveClass::OutOfLayerTargetBase,
        MoveClass::OutOfLayerSourceBase,
        MoveClass::InLayerMonkey,
        MoveClass::OutOfLayerMonkey,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MoveClass::InLayer => "in-layer",
            MoveClass::Face => "face",
            MoveClass::OutOfLayerTargetBase => "out-of-layer-target-base",
            MoveClass::OutOfLayerSourceBase => "out-of-layer-source-base",
            MoveClass::InLayerMonkey => "in-layer-monkey",
            MoveClass::OutOfLayerMonkey => "out-of-layer-monkey",
        }
    }

    /// The least model that includes this class.
    pub fn model(self) -> MoveModel {
        match self {
            MoveClass::InLayerMonkey | MoveClass::OutOfLayerMonkey => MoveModel::Monkey,
            _ => MoveModel::Restricted,
        }
    }

    /// Class of the reversed move. Running an out-of-layer move backwards
    /// swaps which end shares a layer with the pivot.
    pub fn reversed(self) -> MoveClass {
        match self {
            MoveClass::OutOfLayerTargetBase => MoveClass::OutOfLayerSourceBase,
            MoveClass::OutOfLayerSourceBase => MoveClass::OutOfLayerTargetBase,
            c => c,
        }
    }

    /// Whether the target lies in the source layer.
    pub fn is_in_layer(self) -> bool {
        matches!(self, MoveClass::InLayer | MoveClass::Face | MoveClass::InLayerMonkey)
    }
}

impl fmt::Display for MoveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MoveClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MoveClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidTemplate(format!("unknown move class {s:?}")))
    }
}

/// One pivoting move as offsets from the mover.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MoveTemplate {
    class: MoveClass,
    base: Vec<Position>,
    empty: Vec<Position>,
    target: Position,
}

impl MoveTemplate {
    /// Builds and validates a template. Offset lists are sorted.
    pub fn new(class: MoveClass, base: Vec<Position>, empty: Vec<Position>, target: Position) -> Result<Self> {
        let t = Self::new_unchecked(class, base, empty, target);
        t.validate()?;
        Ok(t)
    }

    /// Sorts but skips validation; meant for negative tests and oracles.
    pub fn new_unchecked(class: MoveClass, mut base: Vec<Position>, mut empty: Vec<Position>, target: Position) -> Self {
        base.sort_unstable();
        base.dedup();
        empty.sort_unstable();
        empty.dedup();
        Self { class, base, empty, target }
    }

    pub fn class(&self) -> MoveClass {
        self.class
    }

    pub fn base(&self) -> &[Position] {
        &self.base
    }

    pub fn empty(&self) -> &[Position] {
        &self.empty
    }

    pub fn target(&self) -> Position {
        self.target
    }

    /// Checks the structural invariants every catalog entry must satisfy.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidTemplate(format!("{} template to {}: {msg}", self.class, self.target)));
        if self.base.is_empty() {
            return bad("no base cells".into());
        }
        if self.base.contains(&Position::ORIGIN) || self.empty.contains(&Position::ORIGIN) {
            return bad("the mover's own cell is listed".into());
        }
        if !self.empty.contains(&self.target) {
            return bad("target is not required empty".into());
        }
        if let Some(b) = self.base.iter().find(|b| self.empty.binary_search(b).is_ok()) {
            return bad(format!("{b} is both base and empty"));
        }
        if !self.base.iter().any(|&b| b.is_adjacent(self.target)) {
            return bad("target is not adjacent to any base cell".into());
        }
        let (lo, hi) = self.layer_range();
        if hi - lo > 2 {
            return bad(format!("touches layers {lo}..={hi}, more than three"));
        }
        let monkey = self.class.model() == MoveModel::Monkey;
        if monkey == self.target.is_neighbor_offset() {
            return bad("monkey targets must be non-adjacent, restricted targets adjacent".into());
        }
        if self.class.is_in_layer() != (self.target.layer() == 0) {
            return bad("target layer does not match the class".into());
        }
        Ok(())
    }

    /// Inclusive layer range touched by the mover, base and empty cells.
    pub fn layer_range(&self) -> (i32, i32) {
        let layers = self.base.iter().chain(&self.empty).map(|p| p.layer()).chain([0]);
        let lo = layers.clone().min().unwrap_or(0);
        let hi = layers.max().unwrap_or(0);
        (lo, hi)
    }

    pub fn transform(&self, op: SymmetryOp) -> MoveTemplate {
        Self::new_unchecked(
            self.class,
            self.base.iter().map(|&p| op.apply(p)).collect(),
            self.empty.iter().map(|&p| op.apply(p)).collect(),
            op.apply(self.target),
        )
    }

    /// The same motion run backwards, expressed relative to the old target.
    pub fn reversed(&self) -> MoveTemplate {
        let t = self.target;
        Self::new_unchecked(
            self.class.reversed(),
            self.base.iter().map(|&p| p - t).collect(),
            self.empty.iter().map(|&p| if p == t { -t } else { p - t }).collect(),
            -t,
        )
    }

    /// Whether every pair of opposite neighbor cells has a member in
    /// `empty`; a module with two opposite neighbors then cannot use this
    /// template.
    pub fn blocks_opposite_pairs(&self) -> bool {
        AXES.iter()
            .all(|&d| self.empty.binary_search(&d).is_ok() || self.empty.binary_search(&-d).is_ok())
    }

    /// Base present and empty cells free for a mover at `p`.
    #[inline]
    pub fn fits(&self, occ: &Occupancy, p: Position) -> bool {
        self.base.iter().all(|&b| occ.contains(p + b)) && !self.empty.iter().any(|&e| occ.contains(p + e))
    }

    pub fn to_record(&self) -> TemplateRecord {
        TemplateRecord {
            class: self.class,
            model: self.class.model(),
            base: self.base.clone(),
            empty: self.empty.clone(),
            target: self.target,
        }
    }
}

impl Serialize for MoveTemplate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

/// Catalog file entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateRecord {
    pub class: MoveClass,
    pub model: MoveModel,
    pub base: Vec<Position>,
    pub empty: Vec<Position>,
    pub target: Position,
}

impl TemplateRecord {
    pub fn to_template(&self) -> Result<MoveTemplate> {
        if self.model != self.class.model() {
            return Err(Error::InvalidTemplate(format!(
                "class {} belongs to the {} model, not {}",
                self.class,
                self.class.model(),
                self.model
            )));
        }
        MoveTemplate::new(self.class, self.base.clone(), self.empty.clone(), self.target)
    }
}

/// Canonical templates plus their closure under the symmetry group.
#[derive(Debug, Clone)]
pub struct Catalog {
    canonical: Vec<MoveTemplate>,
    /// Closure, sorted; restricted classes sort first.
    templates: Vec<MoveTemplate>,
    restricted_len: usize,
    reverse: Vec<Option<usize>>,
    sandwich: [bool; 2],
    /// Per model: template indices grouped by their first base offset.
    by_base: [Vec<(Position, Vec<usize>)>; 2],
    /// Bitmask form of the templates when all their cells fit in 128 offsets.
    masks: Option<MaskTable>,
}

/// Every offset a template inspects, plus each template's base and empty
/// cells as bit sets over that list.
#[derive(Debug, Clone)]
struct MaskTable {
    offsets: Vec<Position>,
    /// (base, empty) per template.
    templates: Vec<(u128, u128)>,
}

impl MaskTable {
    fn new(templates: &[MoveTemplate]) -> Option<Self> {
        let offsets: Vec<Position> = templates
            .iter()
            .flat_map(|t| t.base.iter().chain(&t.empty).copied())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if offsets.len() > 128 {
            return None;
        }
        let mask = |cells: &[Position]| {
            cells
                .iter()
                .map(|c| 1u128 << offsets.binary_search(c).expect("collected above"))
                .fold(0, |a, b| a | b)
        };
        let templates = templates.iter().map(|t| (mask(&t.base), mask(&t.empty))).collect();
        Some(Self { offsets, templates })
    }

    #[inline]
    fn neighborhood(&self, occ: &Occupancy, p: Position) -> u128 {
        let mut m = 0u128;
        for (i, &d) in self.offsets.iter().enumerate() {
            m |= (occ.contains(p + d) as u128) << i;
        }
        m
    }
}

impl Catalog {
    pub fn from_templates(canonical: Vec<MoveTemplate>) -> Result<Self> {
        for t in &canonical {
            t.validate()?;
        }
        let closure: BTreeSet<MoveTemplate> = canonical
            .iter()
            .flat_map(|t| SymmetryOp::all().into_iter().map(move |op| t.transform(op)))
            .collect();
        let templates: Vec<MoveTemplate> = closure.into_iter().collect();
        let restricted_len = templates.iter().take_while(|t| t.class.model() == MoveModel::Restricted).count();
        let lookup: FxHashMap<&MoveTemplate, usize> = templates.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let reverse = templates.iter().map(|t| lookup.get(&t.reversed()).copied()).collect();
        let sandwich = [
            templates[..restricted_len].iter().all(MoveTemplate::blocks_opposite_pairs),
            templates.iter().all(MoveTemplate::blocks_opposite_pairs),
        ];
        let group = |len: usize| {
            let mut groups: Vec<(Position, Vec<usize>)> = Vec::new();
            for (i, t) in templates[..len].iter().enumerate() {
                let key = t.base[0];
                match groups.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, v)) => v.push(i),
                    None => groups.push((key, vec![i])),
                }
            }
            groups
        };
        let by_base = [group(restricted_len), group(templates.len())];
        let masks = MaskTable::new(&templates);
        Ok(Self {
            canonical,
            templates,
            restricted_len,
            reverse,
            sandwich,
            by_base,
            masks,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let records: Vec<TemplateRecord> =
            serde_json::from_str(text).map_err(|e| Error::Malformed(format!("catalog: {e}")))?;
        if records.is_empty() {
            return Err(Error::InvalidTemplate("catalog is empty".into()));
        }
        Self::from_templates(records.iter().map(TemplateRecord::to_template).collect::<Result<_>>()?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The catalog bundled with the library.
    pub fn shipped() -> &'static Catalog {
        static CATALOG: OnceLock<Catalog> = OnceLock::new();
        CATALOG.get_or_init(|| Catalog::from_json(SHIPPED_CATALOG).expect("shipped catalog is valid"))
    }

    /// Canonical-orientation templates available in `model`.
    pub fn canonical(&self, model: MoveModel) -> Vec<&MoveTemplate> {
        self.canonical.iter().filter(|t| model.includes(t.class.model())).collect()
    }

    /// Full symmetry closure available in `model`, in index order.
    pub fn templates(&self, model: MoveModel) -> &[MoveTemplate] {
        match model {
            MoveModel::Restricted => &self.templates[..self.restricted_len],
            MoveModel::Monkey => &self.templates,
        }
    }

    pub fn template(&self, index: usize) -> &MoveTemplate {
        &self.templates[index]
    }

    pub fn index_of(&self, t: &MoveTemplate) -> Option<usize> {
        self.templates.binary_search(t).ok()
    }

    /// Index of the reversed template, if the catalog contains it.
    pub fn reverse_index(&self, index: usize) -> Option<usize> {
        self.reverse[index]
    }

    pub fn is_reversal_closed(&self) -> bool {
        self.reverse.iter().all(Option::is_some)
    }

    pub fn is_symmetry_closed(&self) -> bool {
        self.templates
            .iter()
            .all(|t| SymmetryOp::all().into_iter().all(|op| self.index_of(&t.transform(op)).is_some()))
    }

    /// Whether every template of `model` blocks all opposite neighbor pairs.
    pub fn sandwich_lemma_holds(&self, model: MoveModel) -> bool {
        self.sandwich[model as usize]
    }

    pub fn to_json(&self) -> String {
        let records: Vec<TemplateRecord> = self.canonical.iter().map(MoveTemplate::to_record).collect();
        serde_json::to_string_pretty(&records).expect("plain data serializes")
    }

    pub fn rules(&self, model: MoveModel) -> Rules<'_> {
        Rules::new(self, model)
    }
}

/// Connectivity side condition on moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Connectivity {
    /// The configuration minus the mover stays connected.
    #[default]
    Backbone,
    /// Only the configurations before and after the move are connected.
    Endpoints,
}

/// A template instantiated at a module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LegalMove {
    pub source: Position,
    pub target: Position,
    pub class: MoveClass,
    /// Index into the catalog's full template list.
    pub template: usize,
}

/// A catalog restricted to one model plus a connectivity rule.
#[derive(Debug, Clone, Copy)]
pub struct Rules<'a> {
    catalog: &'a Catalog,
    model: MoveModel,
    connectivity: Connectivity,
}

impl<'a> Rules<'a> {
    pub fn new(catalog: &'a Catalog, model: MoveModel) -> Self {
        Self {
            catalog,
            model,
            connectivity: Connectivity::Backbone,
        }
    }

    pub fn with_connectivity(mut self, connectivity: Connectivity) -> Self {
        self.connectivity = connectivity;
        self
    }

    pub fn catalog(&self) -> &'a Catalog {
        self.catalog
    }

    pub fn model(&self) -> MoveModel {
        self.model
    }

    pub fn connectivity(&self) -> Connectivity {
        self.connectivity
    }

    pub fn templates(&self) -> &'a [MoveTemplate] {
        self.catalog.templates(self.model)
    }

    /// Occupancy grid sized for template lookups around `c`.
    pub fn occupancy(c: &Configuration) -> Occupancy {
        Occupancy::new(c, TEMPLATE_REACH)
    }

    /// Templates whose base and empty cells are satisfied at `p`, ignoring
    /// connectivity.
    pub fn fitting_templates(&self, occ: &Occupancy, p: Position) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_fit(occ, p, |i| out.push(i));
        out.sort_unstable();
        out
    }

    fn for_each_fit(&self, occ: &Occupancy, p: Position, mut f: impl FnMut(usize)) {
        if self.catalog.sandwich_lemma_holds(self.model) && is_sandwiched(occ, p) {
            return;
        }
        if let Some(masks) = &self.catalog.masks {
            let here = masks.neighborhood(occ, p);
            let len = self.templates().len();
            for (i, &(base, empty)) in masks.templates[..len].iter().enumerate() {
                if here & base == base && here & empty == 0 {
                    f(i);
                }
            }
            return;
        }
        for (b, group) in &self.catalog.by_base[self.model as usize] {
            if !occ.contains(p + *b) {
                continue;
            }
            for &i in group {
                if self.catalog.templates[i].fits(occ, p) {
                    f(i);
                }
            }
        }
    }

    /// All legal moves of `c`, ordered by source module then template index.
    pub fn legal_moves(&self, c: &Configuration) -> Result<Vec<LegalMove>> {
        c.require_connected()?;
        Ok(self.legal_moves_unchecked(c))
    }

    /// [`Rules::legal_moves`] without the input connectivity check.
    pub fn legal_moves_unchecked(&self, c: &Configuration) -> Vec<LegalMove> {
        let mut out = Vec::new();
        if c.len() < 2 {
            return out;
        }
        let occ = Self::occupancy(c);
        let cut = match self.connectivity {
            Connectivity::Backbone => c.articulation_points(),
            Connectivity::Endpoints => vec![false; c.len()],
        };
        for (i, p) in c.iter().enumerate() {
            if cut[i] {
                continue;
            }
            let mut fits = self.fitting_templates(&occ, p);
            if self.connectivity == Connectivity::Endpoints {
                fits.retain(|&t| {
                    c.relocate(p, p + self.catalog.templates[t].target)
                        .map(|d| d.is_connected())
                        .unwrap_or(false)
                });
            }
            out.extend(fits.into_iter().map(|t| self.instantiate(p, t)));
        }
        out
    }

    fn instantiate(&self, source: Position, template: usize) -> LegalMove {
        let t = &self.catalog.templates[template];
        LegalMove {
            source,
            target: source + t.target,
            class: t.class,
            template,
        }
    }

    /// Legal moves of the single module at `p`.
    pub fn moves_of(&self, c: &Configuration, p: Position) -> Result<Vec<LegalMove>> {
        c.index_of(p).ok_or(Error::PositionNotInConfiguration(p))?;
        Ok(self.legal_moves_unchecked(c).into_iter().filter(|m| m.source == p).collect())
    }

    /// Checks legality of `m` in `c` from scratch.
    pub fn check_legal(&self, c: &Configuration, m: &LegalMove) -> Result<()> {
        let illegal = |reason: &str| {
            Err(Error::IllegalMove {
                module: m.source,
                target: m.target,
                reason: reason.to_string(),
            })
        };
        let Some(t) = self.templates().get(m.template) else {
            return illegal("template not available in this model");
        };
        if m.source + t.target != m.target || m.class != t.class {
            return illegal("move does not match its template");
        }
        if !c.contains(m.source) {
            return illegal("no module at the source");
        }
        let occ = Self::occupancy(c);
        if let Some(b) = t.base.iter().find(|&&b| !occ.contains(m.source + b)) {
            return illegal(&format!("base cell {} is empty", m.source + *b));
        }
        if let Some(e) = t.empty.iter().find(|&&e| occ.contains(m.source + e)) {
            return illegal(&format!("required free cell {} is occupied", m.source + *e));
        }
        let connected = match self.connectivity {
            Connectivity::Backbone => c.is_connected_without(m.source)?,
            Connectivity::Endpoints => c.relocate(m.source, m.target)?.is_connected(),
        };
        if !connected {
            return illegal("the move disconnects the configuration");
        }
        Ok(())
    }

    pub fn is_legal(&self, c: &Configuration, m: &LegalMove) -> bool {
        self.check_legal(c, m).is_ok()
    }

    /// Applies `m` after re-checking legality.
    pub fn apply_move(&self, c: &Configuration, m: &LegalMove) -> Result<Configuration> {
        self.check_legal(c, m)?;
        c.relocate(m.source, m.target)
    }

    /// The move that undoes `m`, as a move in the configuration after `m`.
    pub fn reverse(&self, m: &LegalMove) -> Option<LegalMove> {
        let r = self.catalog.reverse_index(m.template)?;
        if r >= self.templates().len() {
            return None;
        }
        Some(self.instantiate(m.target, r))
    }
}

/// Whether `p` has modules on two opposite sides.
pub fn is_sandwiched(occ: &Occupancy, p: Position) -> bool {
    AXES.iter().any(|&d| occ.contains(p + d) && occ.contains(p - d))
}

/// Legal moves under the shipped catalog with the backbone rule.
pub fn legal_moves(c: &Configuration, model: MoveModel) -> Result<Vec<LegalMove>> {
    Catalog::shipped().rules(model).legal_moves(c)
}

/// Applies a move under the shipped catalog with the backbone rule.
pub fn apply_move(c: &Configuration, m: &LegalMove, model: MoveModel) -> Result<Configuration> {
    Catalog::shipped().rules(model).apply_move(c, m)
}
