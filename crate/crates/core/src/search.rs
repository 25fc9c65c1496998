//! Breadth-first search over configurations reachable by legal moves.
//!
//! States are deduplicated by their translation-canonical form (or, with
//! symmetry reduction, by their canonical form modulo the 12 point
//! symmetries). Each BFS level is expanded in parallel and merged in
//! frontier order, so results do not depend on scheduling.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use indexmap::IndexSet;
use rayon::prelude::*;
use rustc_hash::FxBuildHasher;
use serde::{Deserialize, Serialize};

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::lattice::Position;
use crate::moves::{LegalMove, MoveClass, Rules};

/// Resource limits; `None` means unbounded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchLimits {
    pub max_states: Option<usize>,
    pub max_depth: Option<usize>,
    pub max_seconds: Option<f64>,
}

impl SearchLimits {
    pub const UNLIMITED: SearchLimits = SearchLimits {
        max_states: None,
        max_depth: None,
        max_seconds: None,
    };

    pub fn depth(max_depth: usize) -> Self {
        Self {
            max_depth: Some(max_depth),
            ..Self::UNLIMITED
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("{what} limit must be positive")));
        if self.max_states == Some(0) {
            return bad("state");
        }
        if self.max_depth == Some(0) {
            return bad("depth");
        }
        if let Some(s) = self.max_seconds {
            if s.is_nan() || s <= 0.0 {
                return bad("time");
            }
        }
        Ok(())
    }

    fn deadline(&self, start: Instant) -> Option<Instant> {
        self.max_seconds.map(|s| start + Duration::from_secs_f64(s))
    }
}

/// Parses `states:depth:seconds`; an empty field or `-` leaves that limit
/// unbounded, and trailing fields may be omitted.
impl FromStr for SearchLimits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fields: Vec<&str> = s.split(':').collect();
        if fields.len() > 3 {
            return Err(Error::InvalidParameter(format!("expected states:depth:seconds, got {s:?}")));
        }
        let field = |i: usize| fields.get(i).map(|f| f.trim()).filter(|f| !f.is_empty() && *f != "-");
        let int = |i: usize| {
            field(i)
                .map(|f| f.parse::<usize>().map_err(|e| Error::InvalidParameter(format!("{f:?}: {e}"))))
                .transpose()
        };
        let limits = SearchLimits {
            max_states: int(0)?,
            max_depth: int(1)?,
            max_seconds: field(2)
                .map(|f| f.parse::<f64>().map_err(|e| Error::InvalidParameter(format!("{f:?}: {e}"))))
                .transpose()?,
        };
        limits.validate()?;
        Ok(limits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Reached,
    /// The whole component was enumerated without reaching the goal.
    Exhausted,
    LimitHit,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Reached => "reached",
            Outcome::Exhausted => "exhausted",
            Outcome::LimitHit => "limit_hit",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub outcome: Outcome,
    /// Moves from the start configuration, in its own coordinates. Empty
    /// unless the outcome is `Reached`.
    pub moves: Vec<LegalMove>,
    /// The configuration the moves end in.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reached: Option<Configuration>,
    pub states_explored: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Deduplicate states modulo the 12 point symmetries as well. Verdicts
    /// are unchanged: a positive reduced answer is confirmed by an exact
    /// search, which also supplies the move sequence.
    pub symmetry: bool,
    /// Worker threads for level expansion: `1` runs inline, `0` uses the
    /// global pool.
    pub threads: usize,
}

impl SearchOptions {
    pub fn sequential() -> Self {
        Self {
            symmetry: false,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExploreStats {
    /// Distinct states found (orbits, under symmetry reduction).
    pub states: usize,
    /// Number of new states first found at each depth; entry 0 is the start.
    pub depth_profile: Vec<usize>,
    pub complete: bool,
    pub outcome: Outcome,
}

/// One step of an emitted trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub source: Position,
    pub target: Position,
    pub class: MoveClass,
}

pub fn trace(moves: &[LegalMove]) -> Vec<TraceStep> {
    moves
        .iter()
        .map(|m| TraceStep {
            source: m.source,
            target: m.target,
            class: m.class,
        })
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Keying {
    Translation,
    Symmetry,
}

impl Keying {
    /// Key and the translation taking the key back to `c`.
    fn key(self, c: &Configuration) -> (Configuration, Position) {
        match self {
            Keying::Translation => (c.canonicalize(), c.min_position()),
            Keying::Symmetry => (c.canonicalize_up_to_symmetry(), Position::ORIGIN),
        }
    }
}

struct Node {
    parent: u32,
    /// Move from the parent, in the parent's stored coordinates.
    step: Option<LegalMove>,
    /// Stored coordinates are the key translated by this.
    offset: Position,
}

const ROOT: u32 = u32::MAX;

/// Frontier states expanded per batch.
const EXPAND_CHUNK: usize = 1024;

enum Stop {
    Goal(usize),
    Exhausted,
    Limit,
}

struct Bfs {
    keys: IndexSet<Configuration, FxBuildHasher>,
    nodes: Vec<Node>,
    depth_profile: Vec<usize>,
    stop: Stop,
}

impl Bfs {
    fn stored(&self, i: usize) -> Configuration {
        self.keys[i].translate(self.nodes[i].offset)
    }

    /// Moves from the root to state `i`, in root coordinates.
    fn path_to(&self, mut i: usize) -> Vec<LegalMove> {
        let mut out = Vec::new();
        while let Some(m) = self.nodes[i].step {
            out.push(m);
            i = self.nodes[i].parent as usize;
        }
        out.reverse();
        out
    }
}

/// `None` for inline (1) or global-pool (0) execution.
fn thread_pool(threads: usize) -> Result<Option<rayon::ThreadPool>> {
    if threads <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map(Some)
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

/// Level-synchronous BFS from `start` until `goal` holds for a state (given
/// in stored coordinates) or a limit is hit.
fn bfs(
    start: &Configuration,
    rules: &Rules,
    limits: &SearchLimits,
    threads: usize,
    keying: Keying,
    goal: &(dyn Fn(&Configuration) -> bool + Sync),
) -> Result<Bfs> {
    limits.validate()?;
    start.require_connected()?;
    let pool = thread_pool(threads)?;
    let begin = Instant::now();
    let deadline = limits.deadline(begin);
    let timed_out = || deadline.is_some_and(|d| Instant::now() >= d);

    let (key, offset) = keying.key(start);
    let mut bfs = Bfs {
        keys: IndexSet::with_hasher(FxBuildHasher),
        nodes: vec![Node {
            parent: ROOT,
            step: None,
            offset,
        }],
        depth_profile: vec![1],
        stop: Stop::Exhausted,
    };
    bfs.keys.insert(key);
    // Under symmetry keying the stored form of state 0 is a symmetric
    // image of `start`; test the goal on `start` itself.
    if goal(start) {
        bfs.stop = Stop::Goal(0);
        return Ok(bfs);
    }

    let mut frontier: Vec<usize> = vec![0];
    let mut depth = 0usize;
    while !frontier.is_empty() {
        if timed_out() {
            bfs.stop = Stop::Limit;
            return Ok(bfs);
        }
        let at_depth_limit = limits.max_depth.is_some_and(|d| depth >= d);
        let expand = |bfs: &Bfs, i: usize| -> Vec<(Configuration, Position, LegalMove)> {
            let c = bfs.stored(i);
            rules
                .legal_moves_unchecked(&c)
                .into_iter()
                .map(|m| {
                    let child = c.relocate(m.source, m.target).expect("legal move targets an empty cell");
                    let (k, o) = keying.key(&child);
                    (k, o, m)
                })
                .collect()
        };
        let mut next = Vec::new();
        // Expand in chunks so only a bounded slice of successors is held.
        for chunk in frontier.chunks(EXPAND_CHUNK) {
            let successors: Vec<Vec<(Configuration, Position, LegalMove)>> = match (&pool, threads) {
                (_, 1) => chunk.iter().map(|&i| expand(&bfs, i)).collect(),
                (Some(pool), _) => pool.install(|| chunk.par_iter().map(|&i| expand(&bfs, i)).collect()),
                (None, _) => chunk.par_iter().map(|&i| expand(&bfs, i)).collect(),
            };
            if at_depth_limit {
                if successors.iter().flatten().any(|(k, _, _)| !bfs.keys.contains(k)) {
                    bfs.stop = Stop::Limit;
                    return Ok(bfs);
                }
                continue;
            }
            for (&parent, succ) in chunk.iter().zip(successors) {
                for (k, offset, m) in succ {
                    if bfs.keys.contains(&k) {
                        continue;
                    }
                    if limits.max_states.is_some_and(|n| bfs.keys.len() >= n) {
                        bfs.stop = Stop::Limit;
                        return Ok(bfs);
                    }
                    let (i, _) = bfs.keys.insert_full(k);
                    bfs.nodes.push(Node {
                        parent: parent as u32,
                        step: Some(m),
                        offset,
                    });
                    if bfs.depth_profile.len() <= depth + 1 {
                        bfs.depth_profile.push(0);
                    }
                    bfs.depth_profile[depth + 1] += 1;
                    if goal(&bfs.stored(i)) {
                        bfs.stop = Stop::Goal(i);
                        return Ok(bfs);
                    }
                    next.push(i);
                }
            }
            if timed_out() {
                bfs.stop = Stop::Limit;
                return Ok(bfs);
            }
        }
        if at_depth_limit {
            return Ok(bfs);
        }
        frontier = next;
        depth += 1;
    }
    Ok(bfs)
}

fn finish(bfs: &Bfs, keying: Keying) -> SearchResult {
    let states_explored = bfs.keys.len();
    match bfs.stop {
        Stop::Goal(i) => SearchResult {
            outcome: Outcome::Reached,
            moves: if keying == Keying::Translation { bfs.path_to(i) } else { Vec::new() },
            reached: Some(bfs.stored(i)),
            states_explored,
        },
        Stop::Exhausted => SearchResult {
            outcome: Outcome::Exhausted,
            moves: Vec::new(),
            reached: None,
            states_explored,
        },
        Stop::Limit => SearchResult {
            outcome: Outcome::LimitHit,
            moves: Vec::new(),
            reached: None,
            states_explored,
        },
    }
}

/// Whether `t` (up to translation) is reachable from `s`.
///
/// On `Reached`, replaying `moves` from `s` ends in a translate of `t`.
/// `Exhausted` means the whole component of `s` was enumerated.
pub fn reachable(
    s: &Configuration,
    t: &Configuration,
    rules: &Rules,
    limits: &SearchLimits,
    options: &SearchOptions,
) -> Result<SearchResult> {
    if s.len() != t.len() {
        return Err(Error::SizeMismatch(s.len(), t.len()));
    }
    t.require_connected()?;
    if options.symmetry {
        let target = t.canonicalize_up_to_symmetry();
        let reduced = bfs(s, rules, limits, options.threads, Keying::Symmetry, &|c: &Configuration| {
            c.canonicalize_up_to_symmetry() == target
        })?;
        // A reduced miss is a miss; a reduced hit may be a symmetric image
        // of t, so confirm exactly.
        if !matches!(reduced.stop, Stop::Goal(_)) {
            return Ok(finish(&reduced, Keying::Symmetry));
        }
    }
    let target = t.canonicalize();
    let exact = bfs(s, rules, limits, options.threads, Keying::Translation, &|c: &Configuration| {
        c.canonicalize() == target
    })?;
    Ok(finish(&exact, Keying::Translation))
}

/// BFS from `s` for a configuration satisfying `goal`, evaluated in the
/// coordinates reached by actually applying the moves to `s`.
pub fn find(
    s: &Configuration,
    rules: &Rules,
    limits: &SearchLimits,
    threads: usize,
    goal: &(dyn Fn(&Configuration) -> bool + Sync),
) -> Result<SearchResult> {
    let found = bfs(s, rules, limits, threads, Keying::Translation, goal)?;
    Ok(finish(&found, Keying::Translation))
}

/// Result of [`band_escape`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EscapeSearch {
    /// `Reached` when some sequence ends with a module leaving the band.
    pub outcome: Outcome,
    /// The escaping sequence, last move leaving the band.
    pub moves: Vec<LegalMove>,
    /// States expanded, the start included.
    pub states_explored: usize,
}

/// Configuration as a difference from the start, both lists sorted.
#[derive(Clone, PartialEq, Eq, Hash)]
struct Delta {
    removed: Vec<Position>,
    added: Vec<Position>,
}

impl Delta {
    fn after(&self, m: &LegalMove) -> Delta {
        let mut d = self.clone();
        match d.added.binary_search(&m.source) {
            Ok(i) => {
                d.added.remove(i);
            }
            Err(_) => {
                let i = d.removed.binary_search(&m.source).unwrap_err();
                d.removed.insert(i, m.source);
            }
        }
        match d.removed.binary_search(&m.target) {
            Ok(i) => {
                d.removed.remove(i);
            }
            Err(_) => {
                let i = d.added.binary_search(&m.target).unwrap_err();
                d.added.insert(i, m.target);
            }
        }
        d
    }
}

/// Searches for a sequence of at most `limits.max_depth` legal moves from
/// `s` whose last move takes a module from inside the layer interval
/// `band` to outside it.
///
/// States are kept in the coordinates of `s` (no translation folding,
/// since the band is fixed in space) as small differences from `s`, so
/// large configurations searched to shallow depth stay cheap in memory.
pub fn band_escape(s: &Configuration, band: (i32, i32), rules: &Rules, limits: &SearchLimits) -> Result<EscapeSearch> {
    limits.validate()?;
    let Some(max_depth) = limits.max_depth else {
        return Err(Error::InvalidParameter("band_escape needs a depth limit".into()));
    };
    s.require_connected()?;
    let deadline = limits.deadline(Instant::now());
    let inside = |p: Position| p.layer() >= band.0 && p.layer() <= band.1;

    let mut keys: IndexSet<Delta, FxBuildHasher> = IndexSet::with_hasher(FxBuildHasher);
    let mut nodes = vec![(ROOT, None::<LegalMove>)];
    keys.insert(Delta {
        removed: Vec::new(),
        added: Vec::new(),
    });
    let path_to = |nodes: &[(u32, Option<LegalMove>)], mut i: usize| {
        let mut out = Vec::new();
        while let Some(m) = nodes[i].1 {
            out.push(m);
            i = nodes[i].0 as usize;
        }
        out.reverse();
        out
    };
    let result = |outcome, moves, states| Ok(EscapeSearch {
        outcome,
        moves,
        states_explored: states,
    });

    let mut frontier = vec![0usize];
    let mut limit_hit = false;
    for depth in 0..max_depth {
        let mut next = Vec::new();
        for &i in &frontier {
            if deadline.is_some_and(|d| Instant::now() >= d) {
                return result(Outcome::LimitHit, Vec::new(), keys.len());
            }
            let path = path_to(&nodes, i);
            let mut c = s.clone();
            for m in &path {
                c = c.relocate(m.source, m.target).expect("recorded moves replay");
            }
            let moves = rules.legal_moves_unchecked(&c);
            if let Some(m) = moves.iter().find(|m| inside(m.source) && !inside(m.target)) {
                let mut path = path;
                path.push(*m);
                return result(Outcome::Reached, path, keys.len());
            }
            for m in moves {
                let d = keys[i].after(&m);
                if keys.contains(&d) {
                    continue;
                }
                if depth + 1 == max_depth || limits.max_states.is_some_and(|n| keys.len() >= n) {
                    limit_hit = true;
                    continue;
                }
                let (j, _) = keys.insert_full(d);
                nodes.push((i as u32, Some(m)));
                next.push(j);
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    let outcome = if limit_hit || !frontier.is_empty() { Outcome::LimitHit } else { Outcome::Exhausted };
    result(outcome, Vec::new(), keys.len())
}

/// Enumerates the component of `s` within `limits`.
pub fn explore(
    s: &Configuration,
    rules: &Rules,
    limits: &SearchLimits,
    options: &SearchOptions,
) -> Result<ExploreStats> {
    let keying = if options.symmetry { Keying::Symmetry } else { Keying::Translation };
    let all = bfs(s, rules, limits, options.threads, keying, &|_: &Configuration| false)?;
    let complete = matches!(all.stop, Stop::Exhausted);
    Ok(ExploreStats {
        states: all.keys.len(),
        depth_profile: all.depth_profile,
        complete,
        outcome: if complete { Outcome::Exhausted } else { Outcome::LimitHit },
    })
}

/// The component of `s` as translation-canonical configurations, in BFS
/// order. `None` if `limits` cut the enumeration short.
pub fn component(s: &Configuration, rules: &Rules, limits: &SearchLimits) -> Result<Option<Vec<Configuration>>> {
    let all = bfs(s, rules, limits, 1, Keying::Translation, &|_: &Configuration| false)?;
    Ok(matches!(all.stop, Stop::Exhausted).then(|| all.keys.into_iter().collect()))
}

/// Iterative-deepening depth-first search. Memory is proportional to the
/// depth, but it can only report `Reached` or `LimitHit`; a depth limit is
/// required.
pub fn reachable_iddfs(s: &Configuration, t: &Configuration, rules: &Rules, limits: &SearchLimits) -> Result<SearchResult> {
    limits.validate()?;
    if s.len() != t.len() {
        return Err(Error::SizeMismatch(s.len(), t.len()));
    }
    s.require_connected()?;
    t.require_connected()?;
    let max_depth = limits
        .max_depth
        .ok_or_else(|| Error::InvalidParameter("iterative deepening needs a depth limit".into()))?;
    let deadline = limits.deadline(Instant::now());
    let target = t.canonicalize();

    struct Dfs<'a> {
        rules: &'a Rules<'a>,
        target: &'a Configuration,
        on_path: rustc_hash::FxHashSet<Configuration>,
        moves: Vec<LegalMove>,
        visited: usize,
        max_states: Option<usize>,
        deadline: Option<Instant>,
    }

    impl Dfs<'_> {
        /// `Some(true)` on reaching the target, `None` on a state or time limit.
        fn go(&mut self, c: &Configuration, budget: usize) -> Option<bool> {
            self.visited += 1;
            if self.max_states.is_some_and(|n| self.visited > n) || self.deadline.is_some_and(|d| Instant::now() >= d) {
                return None;
            }
            if c.canonicalize() == *self.target {
                return Some(true);
            }
            if budget == 0 {
                return Some(false);
            }
            for m in self.rules.legal_moves_unchecked(c) {
                let child = c.relocate(m.source, m.target).expect("legal move targets an empty cell");
                let key = child.canonicalize();
                if !self.on_path.insert(key.clone()) {
                    continue;
                }
                self.moves.push(m);
                let found = self.go(&child, budget - 1);
                if found != Some(false) {
                    return found;
                }
                self.moves.pop();
                self.on_path.remove(&key);
            }
            Some(false)
        }
    }

    let mut dfs = Dfs {
        rules,
        target: &target,
        on_path: Default::default(),
        moves: Vec::new(),
        visited: 0,
        max_states: limits.max_states,
        deadline,
    };
    for depth in 0..=max_depth {
        dfs.on_path.clear();
        dfs.on_path.insert(s.canonicalize());
        dfs.moves.clear();
        match dfs.go(s, depth) {
            Some(true) => {
                let mut c = s.clone();
                for m in &dfs.moves {
                    c = c.relocate(m.source, m.target)?;
                }
                return Ok(SearchResult {
                    outcome: Outcome::Reached,
                    moves: dfs.moves,
                    reached: Some(c),
                    states_explored: dfs.visited,
                });
            }
            Some(false) => {}
            None => break,
        }
    }
    Ok(SearchResult {
        outcome: Outcome::LimitHit,
        moves: Vec::new(),
        reached: None,
        states_explored: dfs.visited,
    })
}

/// Replays `moves` from `s`, re-checking legality at every step.
pub fn replay(s: &Configuration, moves: &[LegalMove], rules: &Rules) -> Result<Configuration> {
    moves.iter().try_fold(s.clone(), |c, m| rules.apply_move(&c, m))
}
