//! Symbolic subsets of ℕ and ℤ with decidable membership, infinitude, and
//! finite-vs-infinite symmetric difference.
//!
//! A [`SetSpec`] denotes `(union of atoms ∖ exclude) ∪ include`.  Atoms are
//! either eventually periodic residue classes or geometric sequences
//! `{a·b^k : k ≥ 0}`.  Construction canonicalizes: all periodic atoms of a
//! side are merged into one minimal-modulus, minimal-threshold core atom,
//! geometric atoms are stripped of the part already covered by the core, and
//! the exclude set is rewritten away.  Canonical structural equality therefore
//! coincides with extensional equality for the periodic fragment.

mod compare;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::arith::{lcm, rem_euclid};

/// Which ambient set the spec lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Universe {
    /// Subsets of ℕ = {0, 1, 2, …}.
    Nat,
    /// Subsets of ℤ.
    Int,
}

/// Direction of an eventually periodic atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Side {
    /// `{n ≥ t : n mod m ∈ R}`.
    Up,
    /// `{n ≤ −t : n mod m ∈ R}`; only meaningful in the int universe.
    Down,
}

/// One symbolic generator of a [`SetSpec`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Atom {
    Periodic {
        side: Side,
        threshold: u64,
        modulus: u64,
        residues: BTreeSet<u64>,
    },
    /// `{base·ratio^k : k ≥ 0}` with `base ≥ 1`, `ratio ≥ 2`.
    Geometric { base: u64, ratio: u64 },
}

impl Atom {
    pub fn periodic(threshold: u64, modulus: u64, residues: impl IntoIterator<Item = u64>) -> Atom {
        Atom::Periodic {
            side: Side::Up,
            threshold,
            modulus,
            residues: residues.into_iter().collect(),
        }
    }

    pub fn periodic_down(
        threshold: u64,
        modulus: u64,
        residues: impl IntoIterator<Item = u64>,
    ) -> Atom {
        Atom::Periodic {
            side: Side::Down,
            threshold,
            modulus,
            residues: residues.into_iter().collect(),
        }
    }

    pub fn geometric(base: u64, ratio: u64) -> Atom {
        Atom::Geometric { base, ratio }
    }

    fn contains(&self, n: i64) -> bool {
        match self {
            Atom::Periodic {
                side: Side::Up,
                threshold,
                modulus,
                residues,
            } => n >= *threshold as i64 && residues.contains(&rem_euclid(n, *modulus)),
            Atom::Periodic {
                side: Side::Down,
                threshold,
                modulus,
                residues,
            } => n <= -(*threshold as i64) && residues.contains(&rem_euclid(n, *modulus)),
            Atom::Geometric { base, ratio } => {
                if n <= 0 {
                    return false;
                }
                let mut v = n as u64;
                if v % base != 0 {
                    return false;
                }
                v /= base;
                while v % ratio == 0 {
                    v /= ratio;
                }
                v == 1
            }
        }
    }

    fn describe(&self) -> String {
        match self {
            Atom::Periodic {
                side,
                threshold,
                modulus,
                residues,
            } => {
                let dir = match side {
                    Side::Up => format!("n >= {threshold}"),
                    Side::Down => format!("n <= -{threshold}"),
                };
                let rs: Vec<String> = residues.iter().map(|r| r.to_string()).collect();
                format!("{{{dir}, n mod {modulus} in {{{}}}}}", rs.join(","))
            }
            Atom::Geometric { base, ratio } => format!("{{{base}*{ratio}^k}}"),
        }
    }
}

/// Classification of a symmetric difference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SetComparison {
    Equal,
    /// The exact, possibly empty-after-normalization, finite difference.
    FiniteSymDiff(BTreeSet<i64>),
    /// An infinite difference: a human-readable rule describing one infinite
    /// family of differing points, plus one explicit member of it.
    InfiniteSymDiff { rule: String, witness: i64 },
}

impl SetComparison {
    fn finite(diff: BTreeSet<i64>) -> SetComparison {
        if diff.is_empty() {
            SetComparison::Equal
        } else {
            SetComparison::FiniteSymDiff(diff)
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            SetComparison::Equal => "equal",
            SetComparison::FiniteSymDiff(_) => "finite",
            SetComparison::InfiniteSymDiff { .. } => "infinite",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SetSpecError {
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("residue {0} out of range for modulus {1}")]
    ResidueOutOfRange(u64, u64),
    #[error("geometric base must be at least 1")]
    BadGeometricBase,
    #[error("geometric ratio must be at least 2, got {0}")]
    BadGeometricRatio(u64),
    #[error("downward periodic atoms require the int universe")]
    DownwardInNat,
    #[error("include and exclude overlap at {0}")]
    IncludeExcludeOverlap(i64),
    #[error("point {0} lies outside the nat universe")]
    NegativeInNat(i64),
    #[error("universe mismatch between operands")]
    UniverseMismatch,
    #[error("unsupported atom combination: {lhs} vs {rhs}")]
    Unsupported { lhs: String, rhs: String },
    #[error("disjoint family of size {0} exceeds the representable range")]
    FamilyTooLarge(u32),
}

/// A finitely-represented subset of ℕ or ℤ.
///
/// Membership rule: `n ∈ S` iff `n ∈ include`, or `n` lies in some atom and
/// `n ∉ exclude`.  Values are canonical after construction: one periodic core
/// atom per side, geometric tails disjoint from the core, an include set
/// disjoint from all atoms, and an empty exclude set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetSpec {
    universe: Universe,
    atoms: Vec<Atom>,
    include: BTreeSet<i64>,
    exclude: BTreeSet<i64>,
}

/// Caps the common modulus that comparison and canonicalization will align to.
const MODULUS_CAP: u64 = 1 << 22;

impl SetSpec {
    pub fn new(
        universe: Universe,
        atoms: Vec<Atom>,
        include: impl IntoIterator<Item = i64>,
        exclude: impl IntoIterator<Item = i64>,
    ) -> Result<SetSpec, SetSpecError> {
        let include: BTreeSet<i64> = include.into_iter().collect();
        let exclude: BTreeSet<i64> = exclude.into_iter().collect();
        for atom in &atoms {
            match atom {
                Atom::Periodic {
                    side,
                    modulus,
                    residues,
                    ..
                } => {
                    if *modulus == 0 {
                        return Err(SetSpecError::ZeroModulus);
                    }
                    if let Some(&r) = residues.iter().find(|&&r| r >= *modulus) {
                        return Err(SetSpecError::ResidueOutOfRange(r, *modulus));
                    }
                    if *side == Side::Down && universe == Universe::Nat {
                        return Err(SetSpecError::DownwardInNat);
                    }
                }
                Atom::Geometric { base, ratio } => {
                    if *base == 0 {
                        return Err(SetSpecError::BadGeometricBase);
                    }
                    if *ratio < 2 {
                        return Err(SetSpecError::BadGeometricRatio(*ratio));
                    }
                }
            }
        }
        if let Some(&n) = include.intersection(&exclude).next() {
            return Err(SetSpecError::IncludeExcludeOverlap(n));
        }
        if universe == Universe::Nat {
            if let Some(&n) = include.iter().chain(exclude.iter()).find(|&&n| n < 0) {
                return Err(SetSpecError::NegativeInNat(n));
            }
        }
        let raw = SetSpec {
            universe,
            atoms,
            include,
            exclude,
        };
        raw.canonicalize()
    }

    /// The empty set in the given universe.
    pub fn empty(universe: Universe) -> SetSpec {
        SetSpec {
            universe,
            atoms: Vec::new(),
            include: BTreeSet::new(),
            exclude: BTreeSet::new(),
        }
    }

    /// A finite set given by its elements.
    pub fn finite(
        universe: Universe,
        elems: impl IntoIterator<Item = i64>,
    ) -> Result<SetSpec, SetSpecError> {
        SetSpec::new(universe, Vec::new(), elems, [])
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn include(&self) -> &BTreeSet<i64> {
        &self.include
    }

    pub fn exclude(&self) -> &BTreeSet<i64> {
        &self.exclude
    }

    /// Decidable membership.
    pub fn contains(&self, n: i64) -> bool {
        if self.universe == Universe::Nat && n < 0 {
            return false;
        }
        if self.include.contains(&n) {
            return true;
        }
        if self.exclude.contains(&n) {
            return false;
        }
        self.atoms.iter().any(|a| a.contains(n))
    }

    /// True iff the denoted set is infinite.  Decidable because canonical
    /// atoms always denote infinite sets and the include set is finite.
    pub fn is_infinite(&self) -> bool {
        !self.atoms.is_empty()
    }

    /// Union, exact.  Both operands must share a universe.
    pub fn union(&self, other: &SetSpec) -> Result<SetSpec, SetSpecError> {
        if self.universe != other.universe {
            return Err(SetSpecError::UniverseMismatch);
        }
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        let include = self.include.iter().chain(other.include.iter()).copied();
        SetSpec::new(self.universe, atoms, include, [])
    }

    /// Classify the symmetric difference with `other` as empty, finite (with
    /// the exact set) or infinite (with a rule and a witness element).
    pub fn compare(&self, other: &SetSpec) -> Result<SetComparison, SetSpecError> {
        compare::compare(self, other)
    }

    /// `k` pairwise disjoint infinite periodic sets
    /// `x_i = {n ≥ 2^i : n ≡ 2^(i−1) (mod 2^i)}`.
    pub fn disjoint_family(k: u32) -> Result<Vec<SetSpec>, SetSpecError> {
        if k > 60 {
            return Err(SetSpecError::FamilyTooLarge(k));
        }
        (1..=k)
            .map(|i| {
                SetSpec::new(
                    Universe::Nat,
                    vec![Atom::periodic(1 << i, 1 << i, [1u64 << (i - 1)])],
                    [],
                    [],
                )
            })
            .collect()
    }

    /// Ascending members of a nat-universe spec.  Unbounded for infinite sets;
    /// the stream stops if values would overflow `i64`.
    pub fn iter_members(&self) -> MemberIter {
        debug_assert_eq!(self.universe, Universe::Nat);
        let mut streams: Vec<Stream> = Vec::new();
        for atom in &self.atoms {
            match atom {
                Atom::Periodic {
                    side: Side::Up,
                    threshold,
                    modulus,
                    residues,
                } => {
                    for &r in residues {
                        let t = *threshold as i64;
                        let first = t + rem_euclid(r as i64 - t, *modulus) as i64;
                        streams.push(Stream::Arith {
                            next: Some(first),
                            step: *modulus as i64,
                        });
                    }
                }
                Atom::Geometric { base, ratio } => streams.push(Stream::Geo {
                    next: Some(*base as i64),
                    ratio: *ratio,
                }),
                Atom::Periodic {
                    side: Side::Down, ..
                } => {}
            }
        }
        streams.push(Stream::List {
            items: self.include.iter().copied().collect(),
            pos: 0,
        });
        MemberIter {
            streams,
            last: None,
        }
    }

    // ----- canonicalization ------------------------------------------------

    fn canonicalize(&self) -> Result<SetSpec, SetSpecError> {
        let up = self.canonical_core(Side::Up)?;
        let down = if self.universe == Universe::Int {
            self.canonical_core(Side::Down)?
        } else {
            None
        };

        let mut geoms: Vec<(u64, u64)> = Vec::new();
        let mut low_points: BTreeSet<i64> = BTreeSet::new();
        for atom in &self.atoms {
            if let Atom::Geometric { base, ratio } = atom {
                self.strip_geometric(*base, *ratio, up.as_ref(), &mut geoms, &mut low_points);
            }
        }
        // Split geometric tails around excluded points so the canonical atoms
        // cover members only.
        let mut changed = true;
        while changed {
            changed = false;
            for &e in &self.exclude {
                if e <= 0 {
                    continue;
                }
                if let Some(pos) = geoms.iter().position(|&(a, b)| {
                    Atom::Geometric { base: a, ratio: b }.contains(e)
                }) {
                    let (a, b) = geoms.remove(pos);
                    let mut v = a;
                    while (v as i64) < e {
                        low_points.insert(v as i64);
                        match v.checked_mul(b) {
                            Some(nv) => v = nv,
                            None => break,
                        }
                    }
                    // v == e here; the tail resumes one step later.
                    if let Some(tail) = v.checked_mul(b) {
                        if tail <= i64::MAX as u64 {
                            geoms.push((tail, b));
                        }
                    }
                    changed = true;
                }
            }
        }
        absorb_geometrics(&mut geoms);
        geoms.sort_unstable();

        let mut atoms: Vec<Atom> = Vec::new();
        let mut core_up = up;
        let mut core_down = down;

        // Collect candidate include points: declared includes, sub-threshold
        // window points, and geometric strays.
        let mut candidates: BTreeSet<i64> = self.include.clone();
        candidates.extend(low_points.iter().copied());
        if let Some(c) = &core_up {
            for n in 0..c.threshold as i64 {
                candidates.insert(n);
            }
        }
        if let Some(c) = &core_down {
            for n in 0..c.threshold as i64 {
                candidates.insert(-n);
            }
        }

        let covered = |n: i64, cu: &Option<Core>, cd: &Option<Core>, gs: &[(u64, u64)]| {
            cu.as_ref().is_some_and(|c| c.contains(n))
                || cd.as_ref().is_some_and(|c| c.contains(n))
                || gs
                    .iter()
                    .any(|&(a, b)| Atom::Geometric { base: a, ratio: b }.contains(n))
        };

        let mut include: BTreeSet<i64> = candidates
            .into_iter()
            .filter(|&n| self.contains(n) && !covered(n, &core_up, &core_down, &geoms))
            .collect();

        // Minimal thresholds: absorb include points adjacent to the core and
        // slide past residues the core does not mention.
        if let Some(c) = &mut core_up {
            loop {
                if c.threshold == 0 {
                    break;
                }
                let p = (c.threshold - 1) as i64;
                if c.residues.contains(&rem_euclid(p, c.modulus)) {
                    if include.contains(&p) {
                        include.remove(&p);
                        c.threshold -= 1;
                    } else {
                        break;
                    }
                } else {
                    c.threshold -= 1;
                }
            }
        }
        if let Some(c) = &mut core_down {
            loop {
                if c.threshold == 0 {
                    break;
                }
                let p = -((c.threshold - 1) as i64);
                if c.residues.contains(&rem_euclid(p, c.modulus)) {
                    if include.contains(&p) {
                        include.remove(&p);
                        c.threshold -= 1;
                    } else {
                        break;
                    }
                } else {
                    c.threshold -= 1;
                }
            }
        }

        if let Some(c) = core_up {
            atoms.push(Atom::Periodic {
                side: Side::Up,
                threshold: c.threshold,
                modulus: c.modulus,
                residues: c.residues,
            });
        }
        if let Some(c) = core_down {
            atoms.push(Atom::Periodic {
                side: Side::Down,
                threshold: c.threshold,
                modulus: c.modulus,
                residues: c.residues,
            });
        }
        for (a, b) in geoms {
            atoms.push(Atom::Geometric { base: a, ratio: b });
        }

        Ok(SetSpec {
            universe: self.universe,
            atoms,
            include,
            exclude: BTreeSet::new(),
        })
    }

    /// Merge all periodic atoms of one side into a single minimal core.
    fn canonical_core(&self, side: Side) -> Result<Option<Core>, SetSpecError> {
        let mut modulus = 1u64;
        let mut max_threshold = 0u64;
        let mut any = false;
        for atom in &self.atoms {
            if let Atom::Periodic {
                side: s,
                threshold,
                modulus: m,
                residues,
            } = atom
            {
                if *s == side && !residues.is_empty() {
                    any = true;
                    modulus = lcm(modulus, *m)
                        .filter(|&l| l <= MODULUS_CAP)
                        .ok_or_else(|| SetSpecError::Unsupported {
                            lhs: atom.describe(),
                            rhs: format!("modulus alignment beyond {MODULUS_CAP}"),
                        })?;
                    max_threshold = max_threshold.max(*threshold);
                }
            }
        }
        if !any {
            return Ok(None);
        }
        // The eventual structure is valid beyond every atom threshold and
        // every excluded point of this side.
        for &e in &self.exclude {
            let mag = match side {
                Side::Up => {
                    if e < 0 {
                        continue;
                    }
                    e as u64
                }
                Side::Down => {
                    if e > 0 {
                        continue;
                    }
                    e.unsigned_abs()
                }
            };
            max_threshold = max_threshold.max(mag + 1);
        }

        let sign = match side {
            Side::Up => 1i64,
            Side::Down => -1i64,
        };
        let mut residues: BTreeSet<u64> = BTreeSet::new();
        for c in 0..modulus {
            let probe = sign * (max_threshold as i64 + c as i64);
            let in_class = self.atoms.iter().any(|a| {
                matches!(a, Atom::Periodic { side: s, .. } if *s == side) && a.contains(probe)
            });
            if in_class {
                residues.insert(rem_euclid(probe, modulus));
            }
        }
        if residues.is_empty() {
            return Ok(None);
        }
        let (modulus, residues) = reduce_modulus(modulus, &residues);
        Ok(Some(Core {
            side,
            threshold: max_threshold,
            modulus,
            residues,
        }))
    }

    /// Remove from a geometric atom the exponents already covered by the up
    /// core; strays below the effective start become explicit points.
    fn strip_geometric(
        &self,
        base: u64,
        ratio: u64,
        core: Option<&Core>,
        geoms: &mut Vec<(u64, u64)>,
        low_points: &mut BTreeSet<i64>,
    ) {
        let Some(core) = core else {
            geoms.push((base, ratio));
            return;
        };
        let m = core.modulus;
        // Exponent residues of base·ratio^k mod m are eventually periodic.
        let mut seen: Vec<u64> = Vec::new();
        let mut cur = base % m;
        let (pre, period) = loop {
            if let Some(i) = seen.iter().position(|&x| x == cur) {
                break (i, seen.len() - i);
            }
            seen.push(cur);
            cur = (cur as u128 * ratio as u128 % m as u128) as u64;
            if seen.len() > MODULUS_CAP as usize {
                geoms.push((base, ratio));
                return;
            }
        };
        // First exponent whose value clears the core threshold.
        let mut k0 = 0usize;
        let mut v = base;
        while v < core.threshold {
            match v.checked_mul(ratio) {
                Some(nv) => {
                    v = nv;
                    k0 += 1;
                }
                None => break,
            }
        }
        let start = k0.max(pre);
        // Explicit low exponents.
        let mut val = base;
        for _ in 0..start {
            if !core.residues.contains(&(val % m)) || (val as i64) < core.threshold as i64 {
                if val <= i64::MAX as u64 {
                    low_points.insert(val as i64);
                }
            }
            match val.checked_mul(ratio) {
                Some(nv) => val = nv,
                None => return,
            }
        }
        // Tail: one sub-sequence per out-of-core exponent class mod `period`.
        let step_ratio = match (0..period).try_fold(1u64, |acc, _| acc.checked_mul(ratio)) {
            Some(r) if r <= i64::MAX as u64 => r,
            _ => {
                // Cannot materialize the split; keep the original atom.  Its
                // in-core part is then covered twice, which is harmless for
                // membership but skipped for canonical splitting.
                geoms.push((base, ratio));
                // Remove the low points we speculatively added.
                let mut val = base;
                for _ in 0..start {
                    low_points.remove(&(val as i64));
                    val = match val.checked_mul(ratio) {
                        Some(nv) => nv,
                        None => break,
                    };
                }
                return;
            }
        };
        let mut first = val; // value at exponent `start`
        for _ in 0..period {
            let class = first % m;
            if !core.residues.contains(&class) && first <= i64::MAX as u64 {
                geoms.push((first, step_ratio));
            }
            first = match first.checked_mul(ratio) {
                Some(nv) => nv,
                None => break,
            };
        }
    }
}

struct Core {
    side: Side,
    threshold: u64,
    modulus: u64,
    residues: BTreeSet<u64>,
}

impl Core {
    fn contains(&self, n: i64) -> bool {
        let in_range = match self.side {
            Side::Up => n >= self.threshold as i64,
            Side::Down => n <= -(self.threshold as i64),
        };
        in_range && self.residues.contains(&rem_euclid(n, self.modulus))
    }
}

/// Minimal modulus representing a residue set: the smallest divisor `d` of
/// `m` such that `R` is a union of full classes mod `d`.
fn reduce_modulus(m: u64, residues: &BTreeSet<u64>) -> (u64, BTreeSet<u64>) {
    for d in 1..=m {
        if m % d != 0 {
            continue;
        }
        let factors = (0..m).all(|c| residues.contains(&c) == residues.contains(&(c % d)));
        if factors {
            let reduced: BTreeSet<u64> = residues.iter().map(|&r| r % d).collect();
            return (d, reduced);
        }
    }
    (m, residues.clone())
}

fn absorb_geometrics(geoms: &mut Vec<(u64, u64)>) {
    geoms.sort_unstable();
    geoms.dedup();
    let snapshot = geoms.clone();
    geoms.retain(|&(a, b)| {
        !snapshot.iter().any(|&(a2, b2)| {
            (a2, b2) != (a, b) && geo_subset(a, b, a2, b2)
        })
    });
}

/// Is `{a·b^k}` ⊆ `{c·d^k}`?
fn geo_subset(a: u64, b: u64, c: u64, d: u64) -> bool {
    use crate::arith::common_base;
    let Some((rho, sb, sd)) = common_base(b, d) else {
        return false;
    };
    // Exponent lattices in base rho: {va + sb·k} ⊆ {vc + sd·k} requires the
    // rho-free parts to match.
    let (mut va, mut aa) = (0u32, a);
    while aa % rho == 0 {
        aa /= rho;
        va += 1;
    }
    let (mut vc, mut cc) = (0u32, c);
    while cc % rho == 0 {
        cc /= rho;
        vc += 1;
    }
    if aa != cc {
        return false;
    }
    if sd == 0 {
        return false;
    }
    // every va + sb·k must be ≥ vc, ≡ vc (mod sd)
    if va < vc {
        return false;
    }
    (va - vc) % sd == 0 && sb % sd == 0
}

/// Merge iterator over the ascending members of a nat-universe spec.
pub struct MemberIter {
    streams: Vec<Stream>,
    last: Option<i64>,
}

enum Stream {
    Arith { next: Option<i64>, step: i64 },
    Geo { next: Option<i64>, ratio: u64 },
    List { items: Vec<i64>, pos: usize },
}

impl Stream {
    fn peek(&self) -> Option<i64> {
        match self {
            Stream::Arith { next, .. } => *next,
            Stream::Geo { next, .. } => *next,
            Stream::List { items, pos } => items.get(*pos).copied(),
        }
    }

    fn advance(&mut self) {
        match self {
            Stream::Arith { next, step } => *next = next.and_then(|v| v.checked_add(*step)),
            Stream::Geo { next, ratio } => {
                *next = next.and_then(|v| v.checked_mul(*ratio as i64));
            }
            Stream::List { pos, .. } => *pos += 1,
        }
    }
}

impl Iterator for MemberIter {
    type Item = i64;

    fn next(&mut self) -> Option<i64> {
        loop {
            let (idx, val) = self
                .streams
                .iter()
                .enumerate()
                .filter_map(|(i, s)| s.peek().map(|v| (i, v)))
                .min_by_key(|&(_, v)| v)?;
            self.streams[idx].advance();
            if self.last == Some(val) {
                continue;
            }
            self.last = Some(val);
            return Some(val);
        }
    }
}

impl fmt::Display for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.universe {
            Universe::Nat => write!(f, "set {{ ")?,
            Universe::Int => write!(f, "set in int {{ ")?,
        }
        let mut items: Vec<String> = Vec::new();
        for atom in &self.atoms {
            match atom {
                Atom::Periodic {
                    side,
                    threshold,
                    modulus,
                    residues,
                } => {
                    let rs: Vec<String> = residues.iter().map(|r| r.to_string()).collect();
                    let dir = if *side == Side::Down { "down " } else { "" };
                    items.push(format!(
                        "periodic {dir}from {threshold} mod {modulus} {{{}}}",
                        rs.join(",")
                    ));
                }
                Atom::Geometric { base, ratio } => {
                    items.push(format!("geometric {base} * {ratio}^k"));
                }
            }
        }
        if !self.include.is_empty() {
            let es: Vec<String> = self.include.iter().map(|n| n.to_string()).collect();
            items.push(format!("finite {{{}}}", es.join(",")));
        }
        write!(f, "{} }}", items.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_x() -> SetSpec {
        // {2,5} ∪ {n ≥ 10}
        SetSpec::new(
            Universe::Nat,
            vec![Atom::periodic(10, 1, [0])],
            [2, 5],
            [],
        )
        .unwrap()
    }

    fn paper_y() -> SetSpec {
        // {3,4} ∪ {n ≥ 10}
        SetSpec::new(
            Universe::Nat,
            vec![Atom::periodic(10, 1, [0])],
            [3, 4],
            [],
        )
        .unwrap()
    }

    fn geometric(base: u64, ratio: u64) -> SetSpec {
        SetSpec::new(Universe::Nat, vec![Atom::geometric(base, ratio)], [], []).unwrap()
    }

    #[test]
    fn contains_examples() {
        assert!(paper_x().contains(5));
        assert!(!geometric(1, 2).contains(7));
        let evens_without_4 = SetSpec::new(
            Universe::Nat,
            vec![Atom::periodic(0, 2, [0])],
            [],
            [4],
        )
        .unwrap();
        assert!(!evens_without_4.contains(4));
        assert!(evens_without_4.contains(6));
        assert!(evens_without_4.contains(0));
    }

    #[test]
    fn infinitude_examples() {
        assert!(paper_x().is_infinite());
        assert!(!SetSpec::finite(Universe::Nat, [1, 2, 3]).unwrap().is_infinite());
        assert!(geometric(1, 3).is_infinite());
    }

    #[test]
    fn compare_finite_diff_paper_pair() {
        let cmp = paper_x().compare(&paper_y()).unwrap();
        assert_eq!(
            cmp,
            SetComparison::FiniteSymDiff(BTreeSet::from([2, 3, 4, 5]))
        );
    }

    #[test]
    fn compare_powers_of_two_vs_four() {
        let u = geometric(1, 2);
        let v = geometric(1, 4);
        match u.compare(&v).unwrap() {
            SetComparison::InfiniteSymDiff { witness, rule } => {
                assert_eq!(witness, 2);
                assert!(rule.contains("2^e"), "rule was {rule}");
            }
            other => panic!("expected infinite diff, got {other:?}"),
        }
    }

    #[test]
    fn compare_identical_is_equal() {
        let x = paper_x();
        assert_eq!(x.compare(&x).unwrap(), SetComparison::Equal);
        let g = geometric(3, 2);
        assert_eq!(g.compare(&g).unwrap(), SetComparison::Equal);
    }

    #[test]
    fn compare_powers_of_two_vs_three() {
        let u = geometric(1, 2);
        let v = geometric(1, 3);
        match u.compare(&v).unwrap() {
            SetComparison::InfiniteSymDiff { witness, .. } => {
                // 1 lies in both sets; the first genuine difference is 2.
                assert_eq!(witness, 2);
            }
            other => panic!("expected infinite diff, got {other:?}"),
        }
    }

    #[test]
    fn compare_is_symmetric_in_tag() {
        let pairs = [
            (paper_x(), paper_y()),
            (geometric(1, 2), geometric(1, 4)),
            (geometric(1, 2), geometric(1, 3)),
            (paper_x(), geometric(1, 2)),
        ];
        for (a, b) in pairs {
            let ab = a.compare(&b).unwrap();
            let ba = b.compare(&a).unwrap();
            assert_eq!(ab.tag(), ba.tag());
        }
    }

    #[test]
    fn compare_agrees_with_scan_oracle() {
        // compare(x,y) = Equal iff membership agrees on [0, 10^4] and the
        // symbolic procedure reports nothing beyond the scan.
        let specs = vec![
            paper_x(),
            paper_y(),
            geometric(1, 2),
            geometric(1, 4),
            geometric(2, 2),
            SetSpec::new(Universe::Nat, vec![Atom::periodic(0, 2, [0])], [], []).unwrap(),
            SetSpec::new(Universe::Nat, vec![Atom::periodic(0, 2, [0])], [1], [4]).unwrap(),
            SetSpec::new(Universe::Nat, vec![Atom::periodic(3, 6, [0, 3])], [], []).unwrap(),
            SetSpec::new(Universe::Nat, vec![Atom::periodic(9, 3, [0])], [], []).unwrap(),
            SetSpec::finite(Universe::Nat, [1, 2, 3]).unwrap(),
        ];
        for a in &specs {
            for b in &specs {
                let cmp = a.compare(b).unwrap();
                let scan_diff: Vec<i64> =
                    (0..=10_000).filter(|&n| a.contains(n) != b.contains(n)).collect();
                match cmp {
                    SetComparison::Equal => assert!(scan_diff.is_empty()),
                    SetComparison::FiniteSymDiff(d) => {
                        let in_window: Vec<i64> =
                            d.iter().copied().filter(|&n| (0..=10_000).contains(&n)).collect();
                        assert_eq!(scan_diff, in_window);
                    }
                    SetComparison::InfiniteSymDiff { witness, .. } => {
                        assert_ne!(a.contains(witness), b.contains(witness));
                    }
                }
            }
        }
    }

    #[test]
    fn disjoint_family_examples() {
        // Pairwise disjointness verified by brute-force membership scan.
        for k in [1u32, 2, 6] {
            let fam = SetSpec::disjoint_family(k).unwrap();
            assert_eq!(fam.len(), k as usize);
            for s in &fam {
                assert!(s.is_infinite());
            }
            for i in 0..fam.len() {
                for j in 0..fam.len() {
                    if i == j {
                        continue;
                    }
                    for n in 0..=10_000i64 {
                        assert!(
                            !(fam[i].contains(n) && fam[j].contains(n)),
                            "family members {i} and {j} overlap at {n}"
                        );
                    }
                    match fam[i].compare(&fam[j]).unwrap() {
                        SetComparison::InfiniteSymDiff { .. } => {}
                        other => panic!("expected infinite diff, got {other:?}"),
                    }
                }
            }
        }
        // First member: odd numbers from 2 on, i.e. {3, 5, 7, ...}.
        let fam = SetSpec::disjoint_family(2).unwrap();
        assert!(!fam[0].contains(1));
        assert!(fam[0].contains(3));
        assert!(fam[0].contains(9999));
        assert!(fam[1].contains(6));
        assert!(fam[1].contains(10));
        assert!(!fam[1].contains(4));
    }

    #[test]
    fn canonicalization_strips_redundancy() {
        // A geometric atom entirely inside a periodic core collapses to the
        // core plus a stray point.
        let s = SetSpec::new(
            Universe::Nat,
            vec![Atom::periodic(0, 2, [0]), Atom::geometric(1, 2)],
            [],
            [],
        )
        .unwrap();
        assert_eq!(s.atoms().len(), 1);
        assert!(s.include().contains(&1));
        assert!(s.contains(1));
        assert!(s.contains(1024));
        assert!(!s.contains(3));
    }

    #[test]
    fn canonicalization_rewrites_excludes() {
        let s = SetSpec::new(
            Universe::Nat,
            vec![Atom::periodic(0, 2, [0])],
            [],
            [4],
        )
        .unwrap();
        assert!(s.exclude().is_empty());
        assert!(!s.contains(4));
        assert!(s.contains(2));
        assert!(s.contains(6));
        let g = SetSpec::new(Universe::Nat, vec![Atom::geometric(1, 2)], [], [8]).unwrap();
        assert!(g.exclude().is_empty());
        assert!(!g.contains(8));
        assert!(g.contains(4));
        assert!(g.contains(16));
    }

    #[test]
    fn canonical_threshold_is_minimal() {
        let s = SetSpec::new(Universe::Nat, vec![Atom::periodic(10, 1, [0])], [8, 9], []).unwrap();
        match &s.atoms()[0] {
            Atom::Periodic { threshold, .. } => assert_eq!(*threshold, 8),
            other => panic!("unexpected atom {other:?}"),
        }
        assert!(s.include().is_empty());
    }

    #[test]
    fn union_is_exact() {
        let a = paper_x();
        let b = geometric(1, 3);
        let u = a.union(&b).unwrap();
        for n in 0..=2000 {
            assert_eq!(u.contains(n), a.contains(n) || b.contains(n), "at {n}");
        }
    }

    #[test]
    fn member_iteration_ascending() {
        let x = paper_x();
        let got: Vec<i64> = x.iter_members().take(8).collect();
        assert_eq!(got, vec![2, 5, 10, 11, 12, 13, 14, 15]);
        let g = geometric(3, 2);
        let got: Vec<i64> = g.iter_members().take(4).collect();
        assert_eq!(got, vec![3, 6, 12, 24]);
    }

    #[test]
    fn int_universe_mirrored_atoms() {
        // L = {n < 0} and R = {n ≥ 0}.
        let l = SetSpec::new(Universe::Int, vec![Atom::periodic_down(1, 1, [0])], [], []).unwrap();
        let r = SetSpec::new(Universe::Int, vec![Atom::periodic(0, 1, [0])], [], []).unwrap();
        assert!(l.contains(-1) && l.contains(-100) && !l.contains(0));
        assert!(r.contains(0) && r.contains(77) && !r.contains(-1));
        match l.compare(&r).unwrap() {
            SetComparison::InfiniteSymDiff { .. } => {}
            other => panic!("expected infinite diff, got {other:?}"),
        }
    }

    #[test]
    fn display_round_trips_membership() {
        let s = paper_x();
        assert_eq!(s.to_string(), "set { periodic from 10 mod 1 {0}; finite {2,5} }");
    }
}
