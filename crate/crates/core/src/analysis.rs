//! Mobility, rigidity and super-rigidity.
//!
//! A configuration `G` is super rigid when no module of `G` can move in any
//! configuration containing `G`. Modules outside `G` never vacate cells of
//! `G`, so the first module of `G` to move does so with all of `G` in place;
//! checking single moves against `G` alone therefore decides the property.
//! A template can be enabled at `m` exactly when none of its required free
//! cells holds a module of `G`: missing base cells can always be added, and
//! [`witness_superconfiguration`] builds a superset that makes the move
//! legal, connectivity included.

use std::collections::VecDeque;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::lattice::{Position, AXES, NEIGHBOR_OFFSETS};
use crate::moves::{LegalMove, MoveModel, MoveTemplate, Rules};
use crate::occupancy::Occupancy;

/// Default inflation of the bounding box searched for witness connectors.
pub const WITNESS_MARGIN: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MobilityVerdict {
    /// Has at least one legal move.
    Mobile,
    /// Some template's cell requirements hold, but every such move breaks
    /// connectivity.
    Disconnecting,
    /// No template's cell requirements hold.
    Blocked,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuleMobility {
    pub position: Position,
    pub verdict: MobilityVerdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub moves: Vec<LegalMove>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MobilityReport {
    pub mobile: usize,
    pub disconnecting: usize,
    pub blocked: usize,
    pub modules: Vec<ModuleMobility>,
}

impl MobilityReport {
    pub fn verdict_of(&self, p: Position) -> Option<MobilityVerdict> {
        self.modules.iter().find(|m| m.position == p).map(|m| m.verdict)
    }

    pub fn mobile_positions(&self) -> Vec<Position> {
        self.modules
            .iter()
            .filter(|m| m.verdict == MobilityVerdict::Mobile)
            .map(|m| m.position)
            .collect()
    }
}

/// Per-module verdicts; the mobile set equals the sources of
/// `rules.legal_moves(c)`.
pub fn mobility(c: &Configuration, rules: &Rules) -> Result<MobilityReport> {
    let legal = rules.legal_moves(c)?;
    let occ = Rules::occupancy(c);
    let mut by_source: FxHashMap<Position, Vec<LegalMove>> = FxHashMap::default();
    for m in legal {
        by_source.entry(m.source).or_default().push(m);
    }
    let modules: Vec<ModuleMobility> = c
        .iter()
        .map(|p| match by_source.remove(&p) {
            Some(moves) => ModuleMobility {
                position: p,
                verdict: MobilityVerdict::Mobile,
                moves,
            },
            None => ModuleMobility {
                position: p,
                verdict: if rules.fitting_templates(&occ, p).is_empty() {
                    MobilityVerdict::Blocked
                } else {
                    MobilityVerdict::Disconnecting
                },
                moves: Vec::new(),
            },
        })
        .collect();
    let count = |v| modules.iter().filter(|m| m.verdict == v).count();
    Ok(MobilityReport {
        mobile: count(MobilityVerdict::Mobile),
        disconnecting: count(MobilityVerdict::Disconnecting),
        blocked: count(MobilityVerdict::Blocked),
        modules,
    })
}

pub fn is_rigid(c: &Configuration, rules: &Rules) -> Result<bool> {
    Ok(rules.legal_moves(c)?.is_empty())
}

/// Indices of templates some superconfiguration of `g` could enable at `m`.
pub fn enabling_templates(g: &Configuration, m: Position, rules: &Rules) -> Result<Vec<usize>> {
    if !g.contains(m) {
        return Err(Error::PositionNotInConfiguration(m));
    }
    let occ = Rules::occupancy(g);
    Ok(enabling_with(&occ, m, rules.templates()))
}

fn enabling_with(occ: &Occupancy, m: Position, templates: &[MoveTemplate]) -> Vec<usize> {
    templates
        .iter()
        .enumerate()
        .filter(|(_, t)| t.empty().iter().all(|&e| !occ.contains(m + e)))
        .map(|(i, _)| i)
        .collect()
}

/// Why a module of `G` cannot be made mobile, or that it can.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum ModuleReason {
    /// Two modules of `G` on opposite sides; with a catalog satisfying the
    /// sandwich lemma this rules out every template.
    Sandwiched { pair: [Position; 2] },
    /// Every template has a required free cell occupied by `G`.
    Blocked,
    /// Some template has all its required free cells outside `G`.
    Enablable { templates: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuleAnalysis {
    pub position: Position,
    #[serde(flatten)]
    pub reason: ModuleReason,
}

/// A superconfiguration in which a module of `G` has a legal move.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub module: Position,
    #[serde(rename = "move")]
    pub legal_move: LegalMove,
    pub configuration: Configuration,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuperRigidityVerdict {
    pub super_rigid: bool,
    pub model: MoveModel,
    pub modules: Vec<ModuleAnalysis>,
    /// One witness per enablable module for which construction succeeded.
    pub witnesses: Vec<Witness>,
    /// Enablable modules for which no witness was found within the box.
    pub witness_failures: Vec<Position>,
}

impl SuperRigidityVerdict {
    pub fn reason_of(&self, p: Position) -> Option<&ModuleReason> {
        self.modules.iter().find(|m| m.position == p).map(|m| &m.reason)
    }
}

/// Decides super-rigidity of `g`; negative verdicts carry witnesses.
pub fn is_super_rigid(g: &Configuration, rules: &Rules) -> Result<SuperRigidityVerdict> {
    super_rigidity(g, rules, true)
}

/// As [`is_super_rigid`], optionally skipping witness construction.
pub fn super_rigidity(g: &Configuration, rules: &Rules, with_witnesses: bool) -> Result<SuperRigidityVerdict> {
    g.require_connected()?;
    let occ = Rules::occupancy(g);
    let sandwich = rules.catalog().sandwich_lemma_holds(rules.model());
    let mut modules = Vec::with_capacity(g.len());
    let mut witnesses = Vec::new();
    let mut witness_failures = Vec::new();
    for m in g.iter() {
        let pair = AXES.iter().find(|&&d| occ.contains(m + d) && occ.contains(m - d));
        let reason = match pair {
            Some(&d) if sandwich => ModuleReason::Sandwiched { pair: [m + d, m - d] },
            _ => {
                let templates = enabling_with(&occ, m, rules.templates());
                if templates.is_empty() {
                    ModuleReason::Blocked
                } else {
                    if with_witnesses {
                        match templates
                            .iter()
                            .find_map(|&t| witness_superconfiguration(g, m, t, rules, WITNESS_MARGIN).ok())
                        {
                            Some(w) => witnesses.push(w),
                            None => witness_failures.push(m),
                        }
                    }
                    ModuleReason::Enablable { templates }
                }
            }
        };
        modules.push(ModuleAnalysis { position: m, reason });
    }
    let super_rigid = modules.iter().all(|a| !matches!(a.reason, ModuleReason::Enablable { .. }));
    Ok(SuperRigidityVerdict {
        super_rigid,
        model: rules.model(),
        modules,
        witnesses,
        witness_failures,
    })
}

/// Builds `C ⊇ g` in which module `m` can make the move of `template`.
///
/// Adds the template's base cells, then joins the components of `C \ {m}`
/// with shortest lattice paths that avoid `m` and the move's free cells,
/// inside `g`'s bounding box inflated by `margin`. The result is checked
/// against the move rules before it is returned.
pub fn witness_superconfiguration(
    g: &Configuration,
    m: Position,
    template: usize,
    rules: &Rules,
    margin: i32,
) -> Result<Witness> {
    let fail = |reason: String| Error::NoWitnessFound { module: m, reason };
    if !g.contains(m) {
        return Err(Error::PositionNotInConfiguration(m));
    }
    let t = rules
        .templates()
        .get(template)
        .ok_or_else(|| fail(format!("template {template} is not in the {} model", rules.model())))?;
    let forbidden: FxHashSet<Position> = t.empty().iter().map(|&e| m + e).chain([m]).collect();
    if let Some(e) = t.empty().iter().find(|&&e| g.contains(m + e)) {
        return Err(fail(format!("required free cell {} is occupied", m + *e)));
    }
    let mut rest: FxHashSet<Position> = g.iter().filter(|&p| p != m).collect();
    rest.extend(t.base().iter().map(|&b| m + b));

    let (mut lo, mut hi) = g.bounding_box();
    for p in &rest {
        for (i, c) in p.coords().into_iter().enumerate() {
            lo[i] = lo[i].min(c);
            hi[i] = hi[i].max(c);
        }
    }
    let inside = |p: Position| (0..3).all(|i| p.coords()[i] >= lo[i] - margin && p.coords()[i] <= hi[i] + margin);

    loop {
        let comps = components(&rest);
        if comps.len() <= 1 {
            break;
        }
        // Grow the first component through free cells until another is hit.
        let main: FxHashSet<Position> = comps[0].iter().copied().collect();
        let mut parent: FxHashMap<Position, Position> = FxHashMap::default();
        let mut queue: VecDeque<Position> = comps[0].iter().copied().collect();
        let mut seen: FxHashSet<Position> = main.clone();
        let mut hit = None;
        'bfs: while let Some(cur) = queue.pop_front() {
            for d in NEIGHBOR_OFFSETS {
                let next = cur + d;
                if seen.contains(&next) {
                    continue;
                }
                if rest.contains(&next) {
                    hit = Some(cur);
                    break 'bfs;
                }
                if forbidden.contains(&next) || !inside(next) {
                    continue;
                }
                seen.insert(next);
                parent.insert(next, cur);
                queue.push_back(next);
            }
        }
        let Some(mut cell) = hit else {
            return Err(fail(format!("no connector inside the box inflated by {margin}")));
        };
        while !main.contains(&cell) {
            rest.insert(cell);
            cell = parent[&cell];
        }
    }

    let configuration = Configuration::new(rest.into_iter().chain([m]))?;
    let legal_move = LegalMove {
        source: m,
        target: m + t.target(),
        class: t.class(),
        template,
    };
    rules
        .check_legal(&configuration, &legal_move)
        .map_err(|e| fail(format!("constructed superset rejected: {e}")))?;
    Ok(Witness {
        module: m,
        legal_move,
        configuration,
    })
}

fn components(cells: &FxHashSet<Position>) -> Vec<Vec<Position>> {
    let mut sorted: Vec<Position> = cells.iter().copied().collect();
    sorted.sort_unstable();
    let mut seen: FxHashSet<Position> = FxHashSet::default();
    let mut out = Vec::new();
    for &start in &sorted {
        if !seen.insert(start) {
            continue;
        }
        let mut comp = vec![start];
        let mut stack = vec![start];
        while let Some(cur) = stack.pop() {
            for d in NEIGHBOR_OFFSETS {
                let next = cur + d;
                if cells.contains(&next) && seen.insert(next) {
                    comp.push(next);
                    stack.push(next);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Whether each template has a required free cell on at least one side of
/// every opposite neighbor pair.
pub fn sandwich_lemma(templates: &[MoveTemplate]) -> bool {
    templates.iter().all(MoveTemplate::blocks_opposite_pairs)
}

/// [`sandwich_lemma`] over the full catalog of `rules`' model, recomputed.
pub fn verify_sandwich_lemma(rules: &Rules) -> bool {
    sandwich_lemma(rules.templates())
}

/// Legal moves of `c` whose source lies in layers `band` but whose target
/// does not.
pub fn confinement_violations(c: &Configuration, band: (i32, i32), rules: &Rules) -> Result<Vec<LegalMove>> {
    let inside = |p: Position| p.layer() >= band.0 && p.layer() <= band.1;
    Ok(rules
        .legal_moves(c)?
        .into_iter()
        .filter(|m| inside(m.source) && !inside(m.target))
        .collect())
}

/// True when no legal move takes a module from inside `band` to outside.
pub fn layer_confinement(c: &Configuration, band: (i32, i32), rules: &Rules) -> Result<bool> {
    Ok(confinement_violations(c, band, rules)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::{Catalog, MoveClass};

    fn p(x: i32, y: i32, z: i32) -> Position {
        Position::new(x, y, z).unwrap()
    }

    fn rules(model: MoveModel) -> Rules<'static> {
        Catalog::shipped().rules(model)
    }

    #[test]
    fn path_of_three() {
        // Straight: the middle is sandwiched between the ends.
        let c = Configuration::new([p(0, 0, 0), p(1, -1, 0), p(2, -2, 0)]).unwrap();
        let r = mobility(&c, &rules(MoveModel::Restricted)).unwrap();
        assert_eq!(r.verdict_of(p(1, -1, 0)), Some(MobilityVerdict::Blocked));
        assert_eq!(r.verdict_of(p(0, 0, 0)), Some(MobilityVerdict::Mobile));
        assert_eq!(r.verdict_of(p(2, -2, 0)), Some(MobilityVerdict::Mobile));
        assert_eq!(r.mobile + r.disconnecting + r.blocked, 3);

        // Bent out of the layer: the middle has room but is a cut vertex.
        let c = Configuration::new([p(0, 0, 0), p(1, -1, 0), p(2, -1, 1)]).unwrap();
        for model in MoveModel::ALL {
            let r = mobility(&c, &rules(model)).unwrap();
            assert_eq!(r.verdict_of(p(1, -1, 0)), Some(MobilityVerdict::Disconnecting));
            assert_eq!(r.mobile, 2);
        }
    }

    #[test]
    fn rigidity_examples() {
        let single = Configuration::single(Position::ORIGIN);
        assert!(is_rigid(&single, &rules(MoveModel::Restricted)).unwrap());
        let pair = Configuration::new([p(0, 0, 0), p(1, 1, 0)]).unwrap();
        assert!(!is_rigid(&pair, &rules(MoveModel::Restricted)).unwrap());
    }

    #[test]
    fn sandwiched_module_has_no_enabling_template() {
        let c = Configuration::new([p(-1, 1, 0), p(0, 0, 0), p(1, -1, 0)]).unwrap();
        for model in MoveModel::ALL {
            assert!(enabling_templates(&c, Position::ORIGIN, &rules(model)).unwrap().is_empty());
        }
    }

    #[test]
    fn surrounded_module_has_no_enabling_template() {
        let c = Configuration::new(Position::ORIGIN.neighbors().into_iter().chain([Position::ORIGIN])).unwrap();
        assert!(enabling_templates(&c, Position::ORIGIN, &rules(MoveModel::Monkey)).unwrap().is_empty());
    }

    #[test]
    fn every_template_needs_a_neighbor_cell_free() {
        for t in rules(MoveModel::Monkey).templates() {
            assert!(t.empty().iter().any(|e| e.is_neighbor_offset()));
        }
    }

    #[test]
    fn pair_is_not_super_rigid_and_witness_replays() {
        let g = Configuration::new([p(0, 0, 0), p(1, 1, 0)]).unwrap();
        let rules = rules(MoveModel::Restricted);
        let v = is_super_rigid(&g, &rules).unwrap();
        assert!(!v.super_rigid);
        assert_eq!(v.witnesses.len(), 2);
        for w in &v.witnesses {
            assert!(rules.is_legal(&w.configuration, &w.legal_move));
            assert!(g.iter().all(|q| w.configuration.contains(q)));
        }
    }

    #[test]
    fn witness_adds_nothing_when_base_present() {
        let g = Configuration::new([p(0, 0, 0), p(1, 1, 0)]).unwrap();
        let rules = rules(MoveModel::Restricted);
        let m = rules.legal_moves(&g).unwrap()[0];
        let w = witness_superconfiguration(&g, m.source, m.template, &rules, WITNESS_MARGIN).unwrap();
        assert_eq!(w.configuration, g);
    }

    #[test]
    fn witness_connects_around_forbidden_cells() {
        // Mover far from the rest: its base must be joined back by a path.
        let g = Configuration::new([p(0, 0, 0), p(1, 1, 0), p(2, 2, 0)]).unwrap();
        let rules = rules(MoveModel::Monkey);
        let m = p(0, 0, 0);
        for t in enabling_templates(&g, m, &rules).unwrap() {
            let w = witness_superconfiguration(&g, m, t, &rules, WITNESS_MARGIN).unwrap();
            assert!(rules.is_legal(&w.configuration, &w.legal_move));
        }
    }

    #[test]
    fn sandwich_lemma_negative_control() {
        let rules = rules(MoveModel::Restricted);
        assert!(verify_sandwich_lemma(&rules));
        let t = &rules.templates()[0];
        // Drop every empty cell except the target: opposite pairs go unguarded.
        let broken = MoveTemplate::new_unchecked(MoveClass::InLayer, t.base().to_vec(), vec![t.target()], t.target());
        assert!(!sandwich_lemma(&[broken]));
    }

    #[test]
    fn confinement_of_empty_move_set_is_vacuous() {
        let single = Configuration::single(Position::ORIGIN);
        assert!(layer_confinement(&single, (0, 0), &rules(MoveModel::Monkey)).unwrap());
    }

    #[test]
    fn free_pair_is_not_confined() {
        let pair = Configuration::new([p(0, 0, 0), p(1, -1, 0)]).unwrap();
        let rules = rules(MoveModel::Restricted);
        assert!(!layer_confinement(&pair, (0, 0), &rules).unwrap());
        assert!(confinement_violations(&pair, (0, 0), &rules)
            .unwrap()
            .iter()
            .all(|m| m.target.layer() != 0));
    }
}
