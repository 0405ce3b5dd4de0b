//! Near-bijections of ℕ: bijections between cofinite subsets of ℕ given by a
//! finite exception table plus an eventually periodic affine tail.
//!
//! The representation class is closed under composition and inversion,
//! contains the two shifts `n ↦ n ± 1` and every finite-support permutation,
//! and keeps mod-finite equality, the integer index, and the full orbit
//! census decidable.
//!
//! Normal form: the modulus is minimal, every point below the threshold has
//! an explicit entry (`a → b`, or `a → ⊥` removing `a` from the domain), no
//! entry is tail-consistent at the top, and exception keys all lie below the
//! threshold.  Equality of normal forms is structural equality.

mod census;

pub use census::{OrbitCensus, OrbitInventory, ThreadTail, ZOrbit};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::arith::{lcm, rem_euclid};
use crate::PointMap;

/// A bijection between cofinite subsets of ℕ.
///
/// For `n ≥ threshold` the map is `n ↦ n + shifts[n mod modulus]`; below the
/// threshold the exception table decides (`None` removes the point from the
/// domain).  Use [`RawNearBijection::validate`] or the constructors to build
/// values; all operations assume and preserve normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NearBijection {
    modulus: u64,
    threshold: u64,
    shifts: Vec<i64>,
    exceptions: BTreeMap<u64, Option<u64>>,
}

/// An unvalidated candidate.  Keys may sit above the threshold (they override
/// the tail there); points below the threshold without an entry are treated
/// as removed from the domain.
#[derive(Debug, Clone)]
pub struct RawNearBijection {
    pub modulus: u64,
    pub threshold: u64,
    pub shifts: Vec<i64>,
    pub exceptions: BTreeMap<u64, Option<u64>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValidateError {
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("expected {expected} tail shifts, found {found}")]
    ShiftCountMismatch { expected: u64, found: usize },
    #[error("residue classes {0} and {1} land in the same class; the tail is not injective")]
    InvalidResiduePermutation(u64, u64),
    #[error("points {0} and {1} map to the same image")]
    InjectivityViolation(u64, u64),
    #[error("tail maps {0} below zero")]
    NegativeImage(u64),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("no backward/forward ray pair to join")]
pub struct NoRayPair;

/// Outcome of a mod-finite comparison of two near-bijections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModFiniteCmp {
    /// The maps agree except on the listed finite set (which may be empty).
    AgreeOffFinite(BTreeSet<u64>),
    /// The maps disagree on every point of a whole residue class.
    DisagreeOnClass {
        residue: u64,
        modulus: u64,
        from: u64,
    },
}

impl ModFiniteCmp {
    pub fn agrees(&self) -> bool {
        matches!(self, ModFiniteCmp::AgreeOffFinite(_))
    }
}

impl fmt::Display for ModFiniteCmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModFiniteCmp::AgreeOffFinite(d) if d.is_empty() => write!(f, "agree everywhere"),
            ModFiniteCmp::AgreeOffFinite(d) => {
                let pts: Vec<String> = d.iter().map(|n| n.to_string()).collect();
                write!(f, "agree off {{{}}}", pts.join(","))
            }
            ModFiniteCmp::DisagreeOnClass {
                residue,
                modulus,
                from,
            } => {
                if *modulus == 1 {
                    write!(f, "disagree on all n >= {from}")
                } else {
                    write!(f, "disagree on all n == {residue} (mod {modulus}), n >= {from}")
                }
            }
        }
    }
}

impl RawNearBijection {
    /// Check the four representation invariants and return the normal form.
    pub fn validate(self) -> Result<NearBijection, ValidateError> {
        let m = self.modulus;
        if m == 0 {
            return Err(ValidateError::ZeroModulus);
        }
        if self.shifts.len() != m as usize {
            return Err(ValidateError::ShiftCountMismatch {
                expected: m,
                found: self.shifts.len(),
            });
        }
        // Residue permutation.
        let mut image_class: BTreeMap<u64, u64> = BTreeMap::new();
        for r in 0..m {
            let s = rem_euclid(r as i64 + self.shifts[r as usize], m);
            if let Some(&r0) = image_class.get(&s) {
                return Err(ValidateError::InvalidResiduePermutation(r0, r));
            }
            image_class.insert(s, r);
        }

        let t = self.threshold;
        let is_key = |n: u64| self.exceptions.contains_key(&n);
        let tail_at = |n: u64| n as i64 + self.shifts[(n % m) as usize];

        // Tail non-negativity on the first unexcepted point of each class.
        for r in 0..m {
            let mut n = t + rem_euclid(r as i64 - t as i64, m);
            while is_key(n) {
                n += m;
            }
            if tail_at(n) < 0 {
                return Err(ValidateError::NegativeImage(n));
            }
        }

        // Exception values pairwise distinct.
        let mut value_src: BTreeMap<u64, u64> = BTreeMap::new();
        for (&a, &v) in &self.exceptions {
            if let Some(b) = v {
                if let Some(&a0) = value_src.get(&b) {
                    return Err(ValidateError::InjectivityViolation(a0.min(a), a0.max(a)));
                }
                value_src.insert(b, a);
            }
        }

        // Exception values must not collide with the tail image.
        for (&b, &a) in &value_src {
            for r in 0..m {
                let n = b as i64 - self.shifts[r as usize];
                if n >= t as i64 && rem_euclid(n, m) == r && !is_key(n as u64) {
                    let n = n as u64;
                    return Err(ValidateError::InjectivityViolation(a.min(n), a.max(n)));
                }
            }
        }

        Ok(self.normalize())
    }

    fn normalize(self) -> NearBijection {
        let m = self.modulus;
        let t_raw = self.threshold;
        // Threshold beyond every key, then a fully covered table below it.
        let t1 = self
            .exceptions
            .keys()
            .next_back()
            .map_or(t_raw, |&k| t_raw.max(k + 1));
        let mut table: BTreeMap<u64, Option<u64>> = BTreeMap::new();
        for n in 0..t1 {
            let entry = match self.exceptions.get(&n) {
                Some(&v) => v,
                None if n >= t_raw => {
                    Some((n as i64 + self.shifts[(n % m) as usize]) as u64)
                }
                None => None,
            };
            table.insert(n, entry);
        }
        // Minimal modulus.
        let mut modulus = m;
        let mut shifts = self.shifts.clone();
        for d in 1..m {
            if m % d == 0 && (0..m).all(|r| self.shifts[r as usize] == self.shifts[(r % d) as usize])
            {
                modulus = d;
                shifts = self.shifts[..d as usize].to_vec();
                break;
            }
        }
        // Minimal threshold: shave tail-consistent top entries.
        let mut threshold = t1;
        while threshold > 0 {
            let p = threshold - 1;
            let tail = p as i64 + shifts[(p % modulus) as usize];
            if tail >= 0 && table.get(&p) == Some(&Some(tail as u64)) {
                table.remove(&p);
                threshold -= 1;
            } else {
                break;
            }
        }
        NearBijection {
            modulus,
            threshold,
            shifts,
            exceptions: table,
        }
    }
}

impl NearBijection {
    /// The shift `n ↦ n + k` (partial for negative `k`).
    pub fn shift(k: i64) -> NearBijection {
        RawNearBijection {
            modulus: 1,
            threshold: k.min(0).unsigned_abs(),
            shifts: vec![k],
            exceptions: BTreeMap::new(),
        }
        .validate()
        .expect("shift maps are always valid")
    }

    pub fn identity() -> NearBijection {
        NearBijection::shift(0)
    }

    /// The involution swapping `2k ↔ 2k+1`.
    pub fn pairing() -> NearBijection {
        RawNearBijection {
            modulus: 2,
            threshold: 0,
            shifts: vec![1, -1],
            exceptions: BTreeMap::new(),
        }
        .validate()
        .expect("pairing is valid")
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn shifts(&self) -> &[i64] {
        &self.shifts
    }

    pub fn exceptions(&self) -> &BTreeMap<u64, Option<u64>> {
        &self.exceptions
    }

    /// `f(n)`, or `None` when `n` is outside the domain.
    pub fn apply(&self, n: u64) -> Option<u64> {
        if n < self.threshold {
            self.exceptions.get(&n).copied().flatten()
        } else {
            Some((n as i64 + self.shifts[(n % self.modulus) as usize]) as u64)
        }
    }

    /// The finite set ℕ ∖ dom.
    pub fn dom_complement(&self) -> BTreeSet<u64> {
        self.exceptions
            .iter()
            .filter_map(|(&a, &v)| v.is_none().then_some(a))
            .collect()
    }

    /// The finite set ℕ ∖ ran.
    pub fn ran_complement(&self) -> BTreeSet<u64> {
        let m = self.modulus;
        let values: BTreeSet<u64> = self.exceptions.values().flatten().copied().collect();
        // Per residue class, the tail image covers an arithmetic tail; what is
        // missing lies below its start.
        let mut out = BTreeSet::new();
        for r in 0..m {
            let first = self.threshold + rem_euclid(r as i64 - self.threshold as i64, m);
            let start = first as i64 + self.shifts[r as usize];
            debug_assert!(start >= 0);
            let class = rem_euclid(start, m);
            let mut x = class;
            while (x as i64) < start {
                if !values.contains(&x) {
                    out.insert(x);
                }
                x += m;
            }
        }
        out
    }

    /// The index `h(f) = |ℕ ∖ ran f| − |ℕ ∖ dom f|`.
    pub fn h_index(&self) -> i64 {
        self.ran_complement().len() as i64 - self.dom_complement().len() as i64
    }

    /// Exact composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &NearBijection) -> NearBijection {
        let f = self;
        let g = other;
        let l = lcm(f.modulus, g.modulus).expect("modulus alignment overflow");
        let min_cg = *g.shifts.iter().min().expect("nonempty shifts");
        let t0 = g
            .threshold
            .max((f.threshold as i64 - min_cg).max(0) as u64);
        let shifts: Vec<i64> = (0..l)
            .map(|rho| {
                let cg = g.shifts[(rho % g.modulus) as usize];
                let mid = rho as i64 + cg;
                cg + f.shifts[rem_euclid(mid, f.modulus) as usize]
            })
            .collect();
        let mut exceptions = BTreeMap::new();
        for n in 0..t0 {
            exceptions.insert(n, g.apply(n).and_then(|v| f.apply(v)));
        }
        RawNearBijection {
            modulus: l,
            threshold: t0,
            shifts,
            exceptions,
        }
        .validate()
        .expect("composition stays in the class")
    }

    /// Exact inverse.
    pub fn invert(&self) -> NearBijection {
        let m = self.modulus;
        let mut class_src = vec![0u64; m as usize];
        for r in 0..m {
            class_src[rem_euclid(r as i64 + self.shifts[r as usize], m) as usize] = r;
        }
        let shifts: Vec<i64> = (0..m)
            .map(|s| -self.shifts[class_src[s as usize] as usize])
            .collect();
        // The inverse tail is valid beyond every tail-image start.
        let mut t_inv = 0u64;
        for r in 0..m {
            let first = self.threshold + rem_euclid(r as i64 - self.threshold as i64, m);
            t_inv = t_inv.max((first as i64 + self.shifts[r as usize]) as u64);
        }
        let mut exceptions: BTreeMap<u64, Option<u64>> = BTreeMap::new();
        let mut values: BTreeMap<u64, u64> = BTreeMap::new();
        for (&a, &v) in &self.exceptions {
            if let Some(b) = v {
                values.insert(b, a);
            }
        }
        for y in 0..t_inv {
            if let Some(&a) = values.get(&y) {
                exceptions.insert(y, Some(a));
            } else {
                let r = class_src[(y % m) as usize];
                let n = y as i64 - self.shifts[r as usize];
                if n >= self.threshold as i64 {
                    exceptions.insert(y, Some(n as u64));
                } else {
                    exceptions.insert(y, None);
                }
            }
        }
        for (&b, &a) in values.range(t_inv..) {
            exceptions.insert(b, Some(a));
        }
        RawNearBijection {
            modulus: m,
            threshold: t_inv,
            shifts,
            exceptions,
        }
        .validate()
        .expect("inversion stays in the class")
    }

    /// Do `self` and `other` agree off a finite set?  Decided by aligning the
    /// tails to the least common modulus.
    pub fn equal_mod_finite(&self, other: &NearBijection) -> ModFiniteCmp {
        let l = lcm(self.modulus, other.modulus).expect("modulus alignment overflow");
        let t = self.threshold.max(other.threshold);
        for rho in 0..l {
            let a = self.shifts[(rho % self.modulus) as usize];
            let b = other.shifts[(rho % other.modulus) as usize];
            if a != b {
                let from = t + rem_euclid(rho as i64 - t as i64, l);
                return ModFiniteCmp::DisagreeOnClass {
                    residue: rho,
                    modulus: l,
                    from,
                };
            }
        }
        let diff: BTreeSet<u64> = (0..t)
            .filter(|&n| self.apply(n) != other.apply(n))
            .collect();
        ModFiniteCmp::AgreeOffFinite(diff)
    }

    /// Does `tau` conjugate `psi` to `phi` up to a finite set, i.e. is
    /// `phi ∘ tau = tau ∘ psi` off a finite set?  Returns the comparison as
    /// evidence either way.
    pub fn verify_conjugation(
        phi: &NearBijection,
        psi: &NearBijection,
        tau: &NearBijection,
    ) -> (bool, ModFiniteCmp) {
        let lhs = phi.compose(tau);
        let rhs = tau.compose(psi);
        let cmp = lhs.equal_mod_finite(&rhs);
        (cmp.agrees(), cmp)
    }

    /// Complete orbit classification.
    pub fn orbit_census(&self) -> OrbitCensus {
        self.inventory().summarize()
    }

    /// Detailed orbit inventory (threads, segments, endpoints).
    pub fn inventory(&self) -> OrbitInventory {
        census::build_inventory(self)
    }

    /// Join one backward ray to one forward ray by a single finite
    /// modification: the largest backward-ray endpoint is mapped to the
    /// smallest forward-ray start.  The result is mod-finite equal to `self`,
    /// has one more bi-infinite orbit and one ray fewer on each side.
    pub fn splice(&self) -> Result<NearBijection, NoRayPair> {
        let inv = self.inventory();
        let end = inv.bwd_rays.iter().map(|r| r.endpoint).max().ok_or(NoRayPair)?;
        let start = inv.fwd_rays.iter().map(|r| r.endpoint).min().ok_or(NoRayPair)?;
        let mut exceptions = self.exceptions.clone();
        exceptions.insert(end, Some(start));
        Ok(RawNearBijection {
            modulus: self.modulus,
            threshold: self.threshold,
            shifts: self.shifts.clone(),
            exceptions,
        }
        .validate()
        .expect("splice adds a fresh edge between complement points"))
    }
}

impl PointMap for NearBijection {
    fn image(&self, n: u64) -> Option<u64> {
        self.apply(n)
    }
}

impl fmt::Display for NearBijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "nearbij {{ ")?;
        if !self.exceptions.is_empty() {
            write!(f, "except {{ ")?;
            for (a, v) in &self.exceptions {
                match v {
                    Some(b) => write!(f, "{a} -> {b}; ")?,
                    None => write!(f, "{a} -> !; ")?,
                }
            }
            write!(f, "}} ")?;
        }
        let entries: Vec<String> = self
            .shifts
            .iter()
            .enumerate()
            .map(|(r, c)| format!("{r}: {c:+}"))
            .collect();
        write!(
            f,
            "tail from {} mod {} {{ {} }} }}",
            self.threshold,
            self.modulus,
            entries.join("; ")
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(
        modulus: u64,
        threshold: u64,
        shifts: Vec<i64>,
        exceptions: &[(u64, Option<u64>)],
    ) -> RawNearBijection {
        RawNearBijection {
            modulus,
            threshold,
            shifts,
            exceptions: exceptions.iter().copied().collect(),
        }
    }

    /// 2k ↦ 2k+2 and 2k+1 ↦ 2k−1, with 1 removed from the domain.
    fn evens_up_odds_down() -> NearBijection {
        raw(2, 2, vec![2, -2], &[(0, Some(2)), (1, None)])
            .validate()
            .unwrap()
    }

    #[test]
    fn validate_residue_collision() {
        let err = raw(2, 10, vec![2, -1], &[]).validate().unwrap_err();
        assert_eq!(err, ValidateError::InvalidResiduePermutation(0, 1));
    }

    #[test]
    fn validate_forward_shift() {
        let sigma = NearBijection::shift(1);
        assert_eq!(sigma.modulus(), 1);
        assert_eq!(sigma.threshold(), 0);
        assert!(sigma.exceptions().is_empty());
    }

    #[test]
    fn validate_value_collision() {
        let err = raw(1, 3, vec![0], &[(0, Some(1)), (2, Some(1))])
            .validate()
            .unwrap_err();
        assert_eq!(err, ValidateError::InjectivityViolation(0, 2));
    }

    #[test]
    fn validate_tail_value_collision() {
        // Key 0 → 5 collides with the tail image of 4 under n ↦ n+1.
        let err = raw(1, 1, vec![1], &[(0, Some(5))]).validate().unwrap_err();
        assert_eq!(err, ValidateError::InjectivityViolation(0, 4));
    }

    #[test]
    fn validate_negative_tail() {
        let err = raw(1, 0, vec![-1], &[]).validate().unwrap_err();
        assert_eq!(err, ValidateError::NegativeImage(0));
    }

    #[test]
    fn apply_examples() {
        let sigma = NearBijection::shift(1);
        let sigma_inv = NearBijection::shift(-1);
        let pairing = NearBijection::pairing();
        assert_eq!(sigma.apply(7), Some(8));
        assert_eq!(sigma_inv.apply(0), None);
        assert_eq!(sigma_inv.apply(5), Some(4));
        assert_eq!(pairing.apply(6), Some(7));
        assert_eq!(pairing.apply(7), Some(6));
    }

    #[test]
    fn normal_form_minimal() {
        // An unreduced modulus and tail-consistent entries normalize away.
        let f = raw(
            2,
            4,
            vec![1, 1],
            &[(0, Some(1)), (1, Some(2)), (2, Some(3)), (3, Some(4))],
        )
        .validate()
        .unwrap();
        assert_eq!(f, NearBijection::shift(1));
        // A removed point forces the threshold above it.
        let g = NearBijection::shift(-1);
        assert_eq!(g.threshold(), 1);
        assert_eq!(g.exceptions().get(&0), Some(&None));
    }

    #[test]
    fn compose_shift_with_inverse() {
        let sigma = NearBijection::shift(1);
        let sigma_inv = NearBijection::shift(-1);
        let c = sigma.compose(&sigma_inv);
        assert_eq!(c.apply(0), None);
        for n in 1..100 {
            assert_eq!(c.apply(n), Some(n));
        }
        assert!(c.equal_mod_finite(&NearBijection::identity()).agrees());
    }

    #[test]
    fn compose_shift_twice() {
        let sigma = NearBijection::shift(1);
        let c = sigma.compose(&sigma);
        assert_eq!(c, NearBijection::shift(2));
        assert_eq!(c.h_index(), 2);
        assert_eq!(c.ran_complement(), BTreeSet::from([0, 1]));
    }

    #[test]
    fn compose_pairing_involution() {
        let p = NearBijection::pairing();
        assert_eq!(p.compose(&p), NearBijection::identity());
    }

    #[test]
    fn invert_examples() {
        let sigma = NearBijection::shift(1);
        assert!(sigma
            .invert()
            .equal_mod_finite(&NearBijection::shift(-1))
            .agrees());
        assert_eq!(sigma.invert(), NearBijection::shift(-1));
        let p = NearBijection::pairing();
        assert_eq!(p.invert(), p);
        let two = NearBijection::shift(2);
        assert_eq!(two.invert(), NearBijection::shift(-2));
        assert_eq!(two.invert().h_index(), -2);
    }

    #[test]
    fn invert_round_trips_pointwise() {
        for f in [
            NearBijection::shift(3),
            NearBijection::shift(-2),
            NearBijection::pairing(),
            evens_up_odds_down(),
        ] {
            let g = f.invert();
            for n in 0..200u64 {
                if let Some(v) = f.apply(n) {
                    assert_eq!(g.apply(v), Some(n), "inverse failed at {n}");
                }
                if let Some(v) = g.apply(n) {
                    assert_eq!(f.apply(v), Some(n), "inverse failed at {n}");
                }
            }
            assert_eq!(g.h_index(), -f.h_index());
        }
    }

    #[test]
    fn equal_mod_finite_examples() {
        let sigma = NearBijection::shift(1);
        // A finite perturbation of the shift: 0 → 5, 4 → 1, rest shifted.
        let perturbed = raw(1, 5, vec![1], &[(0, Some(5)), (4, Some(1)), (1, Some(2)), (2, Some(3)), (3, Some(4))])
            .validate()
            .unwrap();
        match sigma.equal_mod_finite(&perturbed) {
            ModFiniteCmp::AgreeOffFinite(d) => assert_eq!(d, BTreeSet::from([0, 4])),
            other => panic!("expected finite agreement, got {other:?}"),
        }
        match sigma.equal_mod_finite(&NearBijection::shift(-1)) {
            ModFiniteCmp::DisagreeOnClass {
                residue,
                modulus,
                from,
            } => {
                assert_eq!((residue, modulus, from), (0, 1, 1));
            }
            other => panic!("expected class disagreement, got {other:?}"),
        }
        match sigma.equal_mod_finite(&sigma) {
            ModFiniteCmp::AgreeOffFinite(d) => assert!(d.is_empty()),
            other => panic!("expected empty diff, got {other:?}"),
        }
    }

    #[test]
    fn h_index_examples() {
        assert_eq!(NearBijection::shift(1).h_index(), 1);
        assert_eq!(NearBijection::shift(-1).h_index(), -1);
        assert_eq!(NearBijection::identity().h_index(), 0);
        // The index is onto ℤ: witnessed by the shifts n ↦ n + k.
        for k in -6..=6 {
            assert_eq!(NearBijection::shift(k).h_index(), k);
        }
    }

    #[test]
    fn census_forward_shift() {
        let c = NearBijection::shift(1).orbit_census();
        assert_eq!((c.fwd_rays, c.bwd_rays, c.z_orbits, c.finite_paths), (1, 0, 0, 0));
        assert!(c.finite_cycles.is_empty());
        assert!(!c.omega_lengths.is_infinite());
        assert!(c.omega_lengths.include().is_empty());
        assert_eq!(c.end_count(), 1);
    }

    #[test]
    fn census_pairing() {
        let c = NearBijection::pairing().orbit_census();
        assert_eq!(c.omega_lengths.include().iter().copied().collect::<Vec<_>>(), vec![2]);
        assert_eq!((c.fwd_rays, c.bwd_rays, c.z_orbits, c.finite_paths), (0, 0, 0, 0));
        assert!(c.finite_cycles.is_empty());
    }

    #[test]
    fn census_swap_with_identity_tail() {
        let f = raw(1, 0, vec![0], &[(0, Some(1)), (1, Some(0))])
            .validate()
            .unwrap();
        let c = f.orbit_census();
        assert_eq!(c.finite_cycles, BTreeMap::from([(2, 1)]));
        assert_eq!(
            c.omega_lengths.include().iter().copied().collect::<Vec<_>>(),
            vec![1]
        );
        assert_eq!((c.fwd_rays, c.bwd_rays, c.z_orbits), (0, 0, 0));
    }

    #[test]
    fn census_isolated_point_is_a_path() {
        // Identity with 0 removed from the domain: {0} is a one-point path,
        // not a ray; the end count stays 0.
        let f = raw(1, 1, vec![0], &[(0, None)]).validate().unwrap();
        let c = f.orbit_census();
        assert_eq!((c.fwd_rays, c.bwd_rays, c.z_orbits, c.finite_paths), (0, 0, 0, 1));
        assert_eq!(c.end_count(), 0);
        assert_eq!(f.h_index(), 0);
    }

    #[test]
    fn census_consistency_on_corpus() {
        let corpus = vec![
            NearBijection::identity(),
            NearBijection::shift(1),
            NearBijection::shift(-3),
            NearBijection::shift(5),
            NearBijection::pairing(),
            evens_up_odds_down(),
            raw(3, 4, vec![1, 1, -2], &[]).validate().unwrap(),
            raw(2, 3, vec![3, -1], &[(0, Some(0))]).validate().unwrap(),
        ];
        for f in &corpus {
            let c = f.orbit_census();
            assert_eq!(
                c.fwd_rays as i64 - c.bwd_rays as i64,
                f.h_index(),
                "ray imbalance must equal the index for {f}"
            );
            assert_eq!(
                c.fwd_rays + c.finite_paths,
                f.ran_complement().len() as u64
            );
            assert_eq!(
                c.bwd_rays + c.finite_paths,
                f.dom_complement().len() as u64
            );
        }
    }

    #[test]
    fn verify_conjugation_reflexive_cases() {
        let sigma = NearBijection::shift(1);
        let (ok, _) =
            NearBijection::verify_conjugation(&sigma, &sigma, &NearBijection::identity());
        assert!(ok);
        let (ok, _) = NearBijection::verify_conjugation(&sigma, &sigma, &sigma);
        assert!(ok, "a map commutes with itself");
        let p = NearBijection::pairing();
        let (ok, _) = NearBijection::verify_conjugation(&p, &p, &NearBijection::identity());
        assert!(ok);
    }

    #[test]
    fn verify_conjugation_shift_obstruction() {
        let sigma = NearBijection::shift(1);
        let sigma_inv = NearBijection::shift(-1);
        for tau in [
            NearBijection::identity(),
            NearBijection::shift(4),
            NearBijection::shift(-2),
            NearBijection::pairing(),
        ] {
            let (ok, _) = NearBijection::verify_conjugation(&sigma, &sigma_inv, &tau);
            assert!(!ok, "{tau} cannot conjugate the two shifts");
        }
    }

    #[test]
    fn splice_evens_up_odds_down() {
        let f = evens_up_odds_down();
        let before = f.orbit_census();
        assert_eq!((before.fwd_rays, before.bwd_rays, before.z_orbits), (1, 1, 0));
        let g = f.splice().unwrap();
        assert!(f.equal_mod_finite(&g).agrees());
        assert_eq!(g.apply(1), Some(0), "the ray ends 1 and 0 are joined");
        let after = g.orbit_census();
        assert_eq!((after.fwd_rays, after.bwd_rays, after.z_orbits), (0, 0, 1));
        assert_eq!(after.end_count(), before.end_count());
        assert_eq!(g.h_index(), f.h_index());
    }

    #[test]
    fn splice_needs_a_ray_pair() {
        assert_eq!(NearBijection::shift(1).splice().unwrap_err(), NoRayPair);
    }

    #[test]
    fn splice_twice_on_two_ray_pairs() {
        // Classes 0,1 drift up by 4; classes 2,3 drift down by 4; the points
        // 0 and 1 are fixed, 2 and 3 are removed from the domain.
        let f = raw(
            4,
            4,
            vec![4, 4, -4, -4],
            &[(0, Some(0)), (1, Some(1)), (2, None), (3, None)],
        )
        .validate()
        .unwrap();
        let c = f.orbit_census();
        assert_eq!((c.fwd_rays, c.bwd_rays, c.z_orbits), (2, 2, 0));
        assert_eq!(c.finite_cycles, BTreeMap::from([(1, 2)]));
        let once = f.splice().unwrap();
        let c1 = once.orbit_census();
        assert_eq!((c1.fwd_rays, c1.bwd_rays, c1.z_orbits), (1, 1, 1));
        let twice = once.splice().unwrap();
        let c2 = twice.orbit_census();
        assert_eq!((c2.fwd_rays, c2.bwd_rays, c2.z_orbits), (0, 0, 2));
        assert_eq!(c2.end_count(), c.end_count());
        assert!(f.equal_mod_finite(&twice).agrees());
    }

    #[test]
    fn display_round_trips_structure() {
        let f = evens_up_odds_down();
        assert_eq!(
            f.to_string(),
            "nearbij { except { 0 -> 2; 1 -> !; } tail from 2 mod 2 { 0: +2; 1: -2 } }"
        );
    }
}
