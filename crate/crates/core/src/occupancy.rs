//! Fast cell-occupancy lookup for legality scans.

use rustc_hash::{FxHashMap, FxHashSet};

use crate::config::Configuration;
use crate::lattice::Position;

/// Dense bounding volumes above this many cells fall back to hashing.
const DENSE_LIMIT: i64 = 1 << 24;

/// Occupied-cell set, dense over an inflated bounding box when that box
/// is small enough, hashed otherwise.
#[derive(Debug, Clone)]
pub enum Occupancy {
    Dense {
        lo: [i32; 3],
        dims: [i32; 3],
        bits: Vec<u64>,
    },
    Sparse(FxHashSet<Position>),
}

impl Occupancy {
    /// Occupancy of `c`; queries within `margin` of the bounding box stay
    /// on the dense path.
    pub fn new(c: &Configuration, margin: i32) -> Self {
        let (lo, hi) = c.bounding_box();
        let lo = lo.map(|v| v - margin);
        let dims = [0, 1, 2].map(|i| hi[i] + margin - lo[i] + 1);
        let volume = dims.iter().map(|&d| d as i64).product::<i64>();
        if volume > DENSE_LIMIT {
            return Occupancy::Sparse(c.iter().collect());
        }
        let mut occ = Occupancy::Dense {
            lo,
            dims,
            bits: vec![0; (volume as usize).div_ceil(64)],
        };
        for p in c.iter() {
            occ.set(p, true);
        }
        occ
    }

    #[inline]
    fn slot(lo: &[i32; 3], dims: &[i32; 3], p: Position) -> Option<usize> {
        let [x, y, z] = p.coords();
        let (dx, dy, dz) = (x - lo[0], y - lo[1], z - lo[2]);
        if dx < 0 || dy < 0 || dz < 0 || dx >= dims[0] || dy >= dims[1] || dz >= dims[2] {
            return None;
        }
        Some(((dx as usize * dims[1] as usize) + dy as usize) * dims[2] as usize + dz as usize)
    }

    #[inline]
    pub fn contains(&self, p: Position) -> bool {
        match self {
            Occupancy::Dense { lo, dims, bits } => match Self::slot(lo, dims, p) {
                Some(i) => bits[i / 64] >> (i % 64) & 1 == 1,
                None => false,
            },
            Occupancy::Sparse(set) => set.contains(&p),
        }
    }

    /// Marks `p` occupied or free. Positions outside a dense box promote
    /// the structure to the hashed form.
    pub fn set(&mut self, p: Position, occupied: bool) {
        if let Occupancy::Dense { lo, dims, bits } = self {
            match Self::slot(lo, dims, p) {
                Some(i) => {
                    if occupied {
                        bits[i / 64] |= 1 << (i % 64);
                    } else {
                        bits[i / 64] &= !(1 << (i % 64));
                    }
                    return;
                }
                None if !occupied => return,
                None => {
                    let set = self.positions().collect();
                    *self = Occupancy::Sparse(set);
                }
            }
        }
        if let Occupancy::Sparse(set) = self {
            if occupied {
                set.insert(p);
            } else {
                set.remove(&p);
            }
        }
    }

    fn positions(&self) -> Box<dyn Iterator<Item = Position> + '_> {
        match self {
            Occupancy::Dense { lo, dims, bits } => {
                let (lo, dims) = (*lo, *dims);
                Box::new((0..bits.len() * 64).filter(move |&i| bits[i / 64] >> (i % 64) & 1 == 1).map(
                    move |i| {
                        let dz = (i % dims[2] as usize) as i32;
                        let rest = i / dims[2] as usize;
                        let dy = (rest % dims[1] as usize) as i32;
                        let dx = (rest / dims[1] as usize) as i32;
                        Position::raw(lo[0] + dx, lo[1] + dy, lo[2] + dz)
                    },
                ))
            }
            Occupancy::Sparse(set) => Box::new(set.iter().copied()),
        }
    }
}

/// Module index per occupied cell, dense over the bounding box when that
/// is small enough.
#[derive(Debug, Clone)]
pub enum IndexGrid {
    Dense { lo: [i32; 3], dims: [i32; 3], slots: Vec<u32> },
    Sparse(FxHashMap<Position, u32>),
}

const NO_MODULE: u32 = u32::MAX;

impl IndexGrid {
    pub fn new(c: &Configuration) -> Self {
        let (lo, hi) = c.bounding_box();
        let dims = [0, 1, 2].map(|i| hi[i] - lo[i] + 1);
        let volume = dims.iter().map(|&d| d as i64).product::<i64>();
        if volume > DENSE_LIMIT / 4 {
            return IndexGrid::Sparse(c.iter().enumerate().map(|(i, p)| (p, i as u32)).collect());
        }
        let mut slots = vec![NO_MODULE; volume as usize];
        for (i, p) in c.iter().enumerate() {
            let s = Occupancy::slot(&lo, &dims, p).expect("inside bounding box");
            slots[s] = i as u32;
        }
        IndexGrid::Dense { lo, dims, slots }
    }

    #[inline]
    pub fn get(&self, p: Position) -> Option<usize> {
        match self {
            IndexGrid::Dense { lo, dims, slots } => Occupancy::slot(lo, dims, p)
                .map(|s| slots[s])
                .filter(|&i| i != NO_MODULE)
                .map(|i| i as usize),
            IndexGrid::Sparse(map) => map.get(&p).map(|&i| i as usize),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_and_sparse_agree() {
        let c = Configuration::from_coords(&[[0, 0, 0], [1, 1, 0], [2, 0, 0], [3, 1, 0]]).unwrap();
        let mut occ = Occupancy::new(&c, 2);
        assert!(matches!(occ, Occupancy::Dense { .. }));
        let q = Position::new(1, -1, 0).unwrap();
        assert!(!occ.contains(q));
        occ.set(q, true);
        assert!(occ.contains(q));
        let far = Position::new(100, 0, 0).unwrap();
        occ.set(far, true);
        assert!(matches!(occ, Occupancy::Sparse(_)));
        for p in c.iter().chain([q, far]) {
            assert!(occ.contains(p));
        }
        occ.set(q, false);
        assert!(!occ.contains(q));
    }
}
