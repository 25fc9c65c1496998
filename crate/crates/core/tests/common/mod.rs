//! Naive reference implementations shared by the integration tests. None
//! of these reuse the library's occupancy grids, articulation points or
//! search code.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;

use rd_pivot::{Catalog, Configuration, MoveModel, MoveTemplate, Position};

pub type Cell = [i32; 3];

/// The twelve (±1, ±1, 0)-type vectors, listed from scratch.
pub fn unit_offsets() -> Vec<Cell> {
    let mut out = Vec::new();
    for zero in 0..3 {
        for a in [-1, 1] {
            for b in [-1, 1] {
                let mut v = [0; 3];
                let others: Vec<usize> = (0..3).filter(|&i| i != zero).collect();
                v[others[0]] = a;
                v[others[1]] = b;
                out.push(v);
            }
        }
    }
    out
}

pub fn add(a: Cell, b: Cell) -> Cell {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn cells(c: &Configuration) -> HashSet<Cell> {
    c.iter().map(|p| p.coords()).collect()
}

pub fn config(set: &HashSet<Cell>) -> Configuration {
    Configuration::from_coords(&set.iter().copied().collect::<Vec<_>>()).unwrap()
}

pub fn pos(c: Cell) -> Position {
    Position::new(c[0], c[1], c[2]).unwrap()
}

/// Breadth-first connectivity over a hash set.
pub fn connected(set: &HashSet<Cell>) -> bool {
    let Some(&start) = set.iter().next() else {
        return true;
    };
    let offsets = unit_offsets();
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        for &d in &offsets {
            let n = add(c, d);
            if set.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen.len() == set.len()
}

/// Legal moves by checking every (module, template) pair directly:
/// (source, target, template index).
pub fn naive_moves(set: &HashSet<Cell>, catalog: &Catalog, model: MoveModel) -> BTreeSet<(Cell, Cell, usize)> {
    let mut out = BTreeSet::new();
    if set.len() < 2 {
        return out;
    }
    for &m in set {
        let mut rest = set.clone();
        rest.remove(&m);
        let backbone = connected(&rest);
        for (i, t) in catalog.templates(model).iter().enumerate() {
            if fits(set, m, t) && backbone {
                out.insert((m, add(m, t.target().coords()), i));
            }
        }
    }
    out
}

pub fn fits(set: &HashSet<Cell>, m: Cell, t: &MoveTemplate) -> bool {
    t.base().iter().all(|b| set.contains(&add(m, b.coords())))
        && t.empty().iter().all(|e| !set.contains(&add(m, e.coords())))
}

/// Translation normal form: shift so the lexicographically smallest cell
/// is at the origin.
pub fn normal(set: &HashSet<Cell>) -> BTreeSet<Cell> {
    let min = *set.iter().min().unwrap();
    set.iter().map(|c| [c[0] - min[0], c[1] - min[1], c[2] - min[2]]).collect()
}

/// All connected n-cell shapes up to translation, grown cell by cell.
pub fn polyforms(n: usize) -> Vec<BTreeSet<Cell>> {
    let mut level: BTreeSet<BTreeSet<Cell>> = BTreeSet::from([BTreeSet::from([[0, 0, 0]])]);
    let offsets = unit_offsets();
    for _ in 1..n {
        let mut next = BTreeSet::new();
        for shape in &level {
            for c in shape {
                for &d in &offsets {
                    let cell = add(*c, d);
                    if shape.contains(&cell) {
                        continue;
                    }
                    let mut grown: HashSet<Cell> = shape.iter().copied().collect();
                    grown.insert(cell);
                    next.insert(normal(&grown));
                }
            }
        }
        level = next;
    }
    level.into_iter().collect()
}

/// Connected components of the move graph on `shapes`, as a map from
/// shape to component id.
pub fn brute_components(
    shapes: &[BTreeSet<Cell>],
    catalog: &Catalog,
    model: MoveModel,
) -> HashMap<BTreeSet<Cell>, usize> {
    let index: HashMap<&BTreeSet<Cell>, usize> = shapes.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut parent: Vec<usize> = (0..shapes.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (i, shape) in shapes.iter().enumerate() {
        let set: HashSet<Cell> = shape.iter().copied().collect();
        for (src, dst, _) in naive_moves(&set, catalog, model) {
            let mut next = set.clone();
            next.remove(&src);
            next.insert(dst);
            let j = index[&normal(&next)];
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a] = b;
        }
    }
    (0..shapes.len()).map(|i| (shapes[i].clone(), find(&mut parent, i))).collect()
}

/// A connected configuration of `n` modules grown from the origin by
/// attaching random neighbors.
pub fn random_connected(rng: &mut impl Rng, n: usize) -> Configuration {
    let offsets = unit_offsets();
    let mut set = HashSet::from([[0, 0, 0]]);
    let mut list = vec![[0, 0, 0]];
    while set.len() < n {
        let c = *list.choose(rng).unwrap();
        let cell = add(c, *offsets.choose(rng).unwrap());
        if set.insert(cell) {
            list.push(cell);
        }
    }
    config(&set)
}

/// A random connected superset of `g` with `extra` added modules, each
/// attached to a module already present.
pub fn random_superset(rng: &mut impl Rng, g: &Configuration, extra: usize) -> Configuration {
    let offsets = unit_offsets();
    let mut set = cells(g);
    let mut list: Vec<Cell> = set.iter().copied().collect();
    list.sort();
    let target = set.len() + extra;
    while set.len() < target {
        let c = *list.choose(rng).unwrap();
        let cell = add(c, *offsets.choose(rng).unwrap());
        if set.insert(cell) {
            list.push(cell);
        }
    }
    config(&set)
}
