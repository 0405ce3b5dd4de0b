//! Orbit classification for near-bijections.
//!
//! Residue classes mod `m` are permuted by the tail; each cycle of that
//! permutation is a *family* with a net displacement `D` (a multiple of `m`).
//! A family with `D = 0` consists, far enough out, of infinitely many cycles
//! of one fixed length.  A family with `D ≠ 0` carries `|D|/m` drift threads,
//! each the tail of one infinite orbit; threads are resolved through the
//! finite exceptional region to decide which orbits are one-sided rays and
//! which pair up into bi-infinite orbits.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::arith::rem_euclid;
use crate::setspec::{SetSpec, Universe};

use super::NearBijection;

const TRACE_CAP: u64 = 20_000_000;

/// Summary counts of the orbit structure.
///
/// `fwd_rays` and `bwd_rays` count *infinite* one-sided orbits.  A finite path
/// (an orbit that both starts at a point outside the range and stops at a
/// point outside the domain) is counted in `finite_paths` instead, so
/// `fwd_rays + finite_paths = |ℕ∖ran|` and `bwd_rays + finite_paths = |ℕ∖dom|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitCensus {
    /// Exact count of cycles per length, for the lengths with finitely many.
    pub finite_cycles: BTreeMap<u64, u64>,
    /// Lengths that occur with infinitely many cycles.
    pub omega_lengths: SetSpec,
    /// Bi-infinite orbits.
    pub z_orbits: u64,
    /// Forward rays: orbits starting outside the range, infinite forward.
    pub fwd_rays: u64,
    /// Backward rays: orbits ending outside the domain, infinite backward.
    pub bwd_rays: u64,
    /// Finite non-cyclic orbits.
    pub finite_paths: u64,
}

impl OrbitCensus {
    /// `2·z_orbits + fwd_rays + bwd_rays`: the number of one-sided infinite
    /// tails, invariant under finite modification.
    pub fn end_count(&self) -> u64 {
        2 * self.z_orbits + self.fwd_rays + self.bwd_rays
    }
}

/// The arithmetic tail of one drift thread: all points `≥ a` congruent to `a`
/// mod `step`, for each per-class anchor `a`.
#[derive(Debug, Clone)]
pub struct ThreadTail {
    pub step: u64,
    pub anchors: Vec<u64>,
}

/// One infinite one-sided orbit.
#[derive(Debug, Clone)]
pub struct RayOrbit {
    /// Forward ray: the start point (outside the range).  Backward ray: the
    /// end point (outside the domain).
    pub endpoint: u64,
    pub thread: ThreadTail,
}

/// One bi-infinite orbit: a backward-ascending thread, an explicit middle
/// segment in orbit order, and a forward-ascending thread.
#[derive(Debug, Clone)]
pub struct ZOrbit {
    pub bwd_thread: ThreadTail,
    pub fwd_thread: ThreadTail,
    pub segment: Vec<u64>,
}

/// Full orbit inventory; [`OrbitCensus`] is its summary.
#[derive(Debug, Clone)]
pub struct OrbitInventory {
    /// Cycle length of each zero-displacement family.
    pub omega_cycle_lengths: Vec<u64>,
    /// Cycles that intersect the exceptional region, in cycle order.
    pub finite_cycles: Vec<Vec<u64>>,
    /// Finite non-cyclic orbits, from start to end.
    pub finite_paths: Vec<Vec<u64>>,
    pub fwd_rays: Vec<RayOrbit>,
    pub bwd_rays: Vec<RayOrbit>,
    pub z_orbits: Vec<ZOrbit>,
}

impl OrbitInventory {
    pub fn summarize(&self) -> OrbitCensus {
        let mut finite_cycles: BTreeMap<u64, u64> = BTreeMap::new();
        for c in &self.finite_cycles {
            *finite_cycles.entry(c.len() as u64).or_insert(0) += 1;
        }
        let omega: BTreeSet<i64> = self.omega_cycle_lengths.iter().map(|&k| k as i64).collect();
        OrbitCensus {
            finite_cycles,
            omega_lengths: SetSpec::finite(Universe::Nat, omega)
                .expect("cycle lengths are natural numbers"),
            z_orbits: self.z_orbits.len() as u64,
            fwd_rays: self.fwd_rays.len() as u64,
            bwd_rays: self.bwd_rays.len() as u64,
            finite_paths: self.finite_paths.len() as u64,
        }
    }
}

struct Family {
    classes: Vec<u64>,
    disp: i64,
}

pub(super) fn build_inventory(f: &NearBijection) -> OrbitInventory {
    let m = f.modulus;
    let t = f.threshold;

    // Families: cycles of the residue permutation, with net displacement.
    let mut class_family = vec![usize::MAX; m as usize];
    let mut families: Vec<Family> = Vec::new();
    for r in 0..m {
        if class_family[r as usize] != usize::MAX {
            continue;
        }
        let mut classes = Vec::new();
        let mut disp = 0i64;
        let mut cur = r;
        loop {
            class_family[cur as usize] = families.len();
            classes.push(cur);
            disp += f.shifts[cur as usize];
            cur = rem_euclid(cur as i64 + f.shifts[cur as usize], m);
            if cur == r {
                break;
            }
        }
        debug_assert_eq!(disp.unsigned_abs() % m, 0);
        families.push(Family { classes, disp });
    }

    let value_to_key: BTreeMap<u64, u64> = f
        .exceptions
        .iter()
        .filter_map(|(&a, &v)| v.map(|b| (b, a)))
        .collect();
    let mut class_src = vec![0u64; m as usize];
    for r in 0..m {
        class_src[rem_euclid(r as i64 + f.shifts[r as usize], m) as usize] = r;
    }

    // Everything at or above `b` is pure tail: above every exception value,
    // above every missing range point, and deep enough that orbit dips cannot
    // reach the exceptional region.
    let sum_abs: u64 = f.shifts.iter().map(|c| c.unsigned_abs()).sum();
    let max_val = value_to_key.keys().next_back().copied().unwrap_or(0);
    let max_gap = f.ran_complement().iter().next_back().copied().unwrap_or(0);
    let b = t
        .max(max_val + 1)
        .max(max_gap + 1)
        .saturating_add(sum_abs)
        .saturating_add(m);

    let pred = |x: u64| -> Option<u64> {
        if let Some(&a) = value_to_key.get(&x) {
            return Some(a);
        }
        let r = class_src[(x % m) as usize];
        let n = x as i64 - f.shifts[r as usize];
        (n >= t as i64).then(|| n as u64)
    };

    // Anchors of the thread through `pt`, walking in the ascending direction.
    let thread_fwd = |pt: u64, fi: usize| -> ThreadTail {
        let fam = &families[fi];
        let mut anchors = vec![pt];
        let mut cur = pt;
        for _ in 1..fam.classes.len() {
            cur = (cur as i64 + f.shifts[(cur % m) as usize]) as u64;
            anchors.push(cur);
        }
        ThreadTail {
            step: fam.disp.unsigned_abs(),
            anchors,
        }
    };
    let thread_bwd = |pt: u64, fi: usize| -> ThreadTail {
        let fam = &families[fi];
        let mut anchors = vec![pt];
        let mut cur = pt;
        for _ in 1..fam.classes.len() {
            let r = class_src[(cur % m) as usize];
            cur = (cur as i64 - f.shifts[r as usize]) as u64;
            anchors.push(cur);
        }
        ThreadTail {
            step: fam.disp.unsigned_abs(),
            anchors,
        }
    };
    // Canonical identity of the thread through a pure-tail point.
    let thread_key = |pt: u64, fi: usize| -> u64 {
        let fam = &families[fi];
        let mut cur = pt;
        while (cur % m) != fam.classes[0] {
            cur = (cur as i64 + f.shifts[(cur % m) as usize]) as u64;
        }
        cur % fam.disp.unsigned_abs()
    };

    let mut visited: BTreeSet<u64> = BTreeSet::new();
    let mut consumed_bwd: BTreeSet<(usize, u64)> = BTreeSet::new();
    let mut fwd_rays = Vec::new();
    let mut bwd_rays = Vec::new();
    let mut z_orbits = Vec::new();

    // Forward-infinite threads, resolved backward.
    for (fi, fam) in families.iter().enumerate() {
        if fam.disp <= 0 {
            continue;
        }
        let threads = fam.disp as u64 / m;
        let base = b + rem_euclid(fam.classes[0] as i64 - b as i64, m);
        for j in 0..threads {
            let rep = base + j * m;
            let mut trace = vec![rep];
            let mut cur = rep;
            let mut z_hit: Option<usize> = None;
            let mut steps = 0u64;
            loop {
                match pred(cur) {
                    None => break,
                    Some(p) => {
                        trace.push(p);
                        cur = p;
                        let pfi = class_family[(p % m) as usize];
                        if p >= b && families[pfi].disp < 0 {
                            z_hit = Some(pfi);
                            break;
                        }
                    }
                }
                steps += 1;
                assert!(steps < TRACE_CAP, "orbit trace exceeded cap");
            }
            visited.extend(trace.iter().copied());
            match z_hit {
                None => fwd_rays.push(RayOrbit {
                    endpoint: cur,
                    thread: thread_fwd(rep, fi),
                }),
                Some(bfi) => {
                    let key = thread_key(cur, bfi);
                    let fresh = consumed_bwd.insert((bfi, key));
                    debug_assert!(fresh, "backward thread consumed twice");
                    trace.reverse();
                    z_orbits.push(ZOrbit {
                        bwd_thread: thread_bwd(cur, bfi),
                        fwd_thread: thread_fwd(rep, fi),
                        segment: trace,
                    });
                }
            }
        }
    }

    // Backward-infinite threads not already paired, resolved forward.
    for (fi, fam) in families.iter().enumerate() {
        if fam.disp >= 0 {
            continue;
        }
        let threads = fam.disp.unsigned_abs() / m;
        let base = b + rem_euclid(fam.classes[0] as i64 - b as i64, m);
        for j in 0..threads {
            let rep = base + j * m;
            if consumed_bwd.contains(&(fi, thread_key(rep, fi))) {
                continue;
            }
            let mut trace = vec![rep];
            let mut cur = rep;
            let mut steps = 0u64;
            loop {
                match f.apply(cur) {
                    None => break,
                    Some(v) => {
                        let vfi = class_family[(v % m) as usize];
                        debug_assert!(
                            !(v >= b && families[vfi].disp > 0),
                            "unpaired backward thread climbed a forward thread"
                        );
                        trace.push(v);
                        cur = v;
                    }
                }
                steps += 1;
                assert!(steps < TRACE_CAP, "orbit trace exceeded cap");
            }
            visited.extend(trace.iter().copied());
            bwd_rays.push(RayOrbit {
                endpoint: cur,
                thread: thread_bwd(rep, fi),
            });
        }
    }

    // Finite orbits all pass through the exceptional region, so seeding from
    // unvisited exception keys finds each exactly once.  Cycles that never
    // dip below the threshold belong to the zero-displacement reservoirs and
    // are counted as lengths with infinitely many cycles instead.
    let mut finite_cycles = Vec::new();
    let mut finite_paths = Vec::new();
    for &a in f.exceptions.keys() {
        if visited.contains(&a) {
            continue;
        }
        let mut fwd_pts = vec![a];
        let mut cur = a;
        let mut cycle = false;
        let mut steps = 0u64;
        loop {
            match f.apply(cur) {
                None => break,
                Some(v) => {
                    if v == a {
                        cycle = true;
                        break;
                    }
                    fwd_pts.push(v);
                    cur = v;
                }
            }
            steps += 1;
            assert!(steps < TRACE_CAP, "orbit trace exceeded cap");
        }
        if cycle {
            visited.extend(fwd_pts.iter().copied());
            finite_cycles.push(fwd_pts);
        } else {
            let mut back = Vec::new();
            let mut cur = a;
            while let Some(p) = pred(cur) {
                back.push(p);
                cur = p;
                assert!(back.len() < TRACE_CAP as usize, "orbit trace exceeded cap");
            }
            back.reverse();
            back.extend(fwd_pts);
            visited.extend(back.iter().copied());
            finite_paths.push(back);
        }
    }

    let omega_cycle_lengths: Vec<u64> = families
        .iter()
        .filter(|fam| fam.disp == 0)
        .map(|fam| fam.classes.len() as u64)
        .collect();

    let inv = OrbitInventory {
        omega_cycle_lengths,
        finite_cycles,
        finite_paths,
        fwd_rays,
        bwd_rays,
        z_orbits,
    };
    debug_assert_eq!(
        inv.fwd_rays.len() + inv.finite_paths.len(),
        f.ran_complement().len(),
        "forward rays plus paths must account for every missing range point"
    );
    debug_assert_eq!(
        inv.bwd_rays.len() + inv.finite_paths.len(),
        f.dom_complement().len(),
        "backward rays plus paths must account for every missing domain point"
    );
    inv
}
