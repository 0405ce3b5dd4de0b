//! Decision procedure for the symmetric difference of two symbolic sets.
//!
//! Periodic parts are aligned to a common modulus; geometric parts are
//! compared in exponent space over a common primitive base.  Multiplicatively
//! independent bases always force an infinite difference; sporadic cross-base
//! coincidences are finite (for each pair of sequences the valuation system
//! pins at most one common element), so witness candidates are filtered
//! through exact full-set membership.  Witness searches are capped at
//! exponent 64; growth separation rules out later sporadic solutions.

use std::collections::{BTreeMap, BTreeSet};

use crate::arith::{lcm, rem_euclid};

use super::{Atom, SetComparison, SetSpec, SetSpecError, Side, Universe};

const WITNESS_SCAN_CAP: u64 = 1 << 14;
const EXPONENT_CAP: u64 = 64;
const STEP_LCM_CAP: u64 = 1 << 20;

pub(super) fn compare(x: &SetSpec, y: &SetSpec) -> Result<SetComparison, SetSpecError> {
    if x.universe != y.universe {
        return Err(SetSpecError::UniverseMismatch);
    }

    let mut sides = vec![Side::Up];
    if x.universe == Universe::Int {
        sides.push(Side::Down);
    }

    let mut sweep_bound = 2i64;
    for side in sides {
        let cx = core_of(x, side);
        let cy = core_of(y, side);
        let l = lcm(cx.modulus, cy.modulus)
            .filter(|&l| l <= super::MODULUS_CAP)
            .ok_or_else(|| unsupported(x, y))?;
        let t = cx.threshold.max(cy.threshold);
        for class in 0..l {
            let in_x = cx.residues.contains(&(class % cx.modulus));
            let in_y = cy.residues.contains(&(class % cy.modulus));
            if in_x != in_y {
                return infinite_core_witness(x, y, side, class, l, t);
            }
        }
        sweep_bound = sweep_bound.max(t as i64 + l as i64 + 1);
    }

    // Periodic structure agrees; compare geometric tails in exponent space.
    let gx = exponent_classes(x)?;
    let gy = exponent_classes(y)?;
    let mut extra_candidates: BTreeSet<i64> = BTreeSet::new();
    let keys: BTreeSet<(u64, u64)> = gx.keys().chain(gy.keys()).copied().collect();
    for key in keys {
        let ex = gx.get(&key).cloned().unwrap_or_default();
        let ey = gy.get(&key).cloned().unwrap_or_default();
        match compare_ap_sets(&ex, &ey).ok_or_else(|| unsupported(x, y))? {
            ApCmp::InfiniteDiff {
                class,
                modulus,
                from,
            } => {
                return infinite_geo_witness(x, y, key, class, modulus, from);
            }
            ApCmp::FiniteDiff(exps) => {
                for e in exps {
                    let Some(v) = checked_value(key.1, key.0, e) else {
                        return Err(unsupported(x, y));
                    };
                    extra_candidates.insert(v);
                }
            }
        }
    }

    // Exact finite difference by bounded sweep plus explicit candidates.
    let mut diff: BTreeSet<i64> = BTreeSet::new();
    let mut candidates: BTreeSet<i64> = extra_candidates;
    candidates.extend(x.include.iter().copied());
    candidates.extend(y.include.iter().copied());
    let lo = if x.universe == Universe::Int {
        -sweep_bound
    } else {
        0
    };
    for n in lo..sweep_bound {
        candidates.insert(n);
    }
    for n in candidates {
        if x.contains(n) != y.contains(n) {
            diff.insert(n);
        }
    }
    Ok(SetComparison::finite(diff))
}

struct CoreView {
    threshold: u64,
    modulus: u64,
    residues: BTreeSet<u64>,
}

fn core_of(s: &SetSpec, side: Side) -> CoreView {
    for atom in &s.atoms {
        if let Atom::Periodic {
            side: sd,
            threshold,
            modulus,
            residues,
        } = atom
        {
            if *sd == side {
                return CoreView {
                    threshold: *threshold,
                    modulus: *modulus,
                    residues: residues.clone(),
                };
            }
        }
    }
    CoreView {
        threshold: 0,
        modulus: 1,
        residues: BTreeSet::new(),
    }
}

fn unsupported(x: &SetSpec, y: &SetSpec) -> SetSpecError {
    SetSpecError::Unsupported {
        lhs: x.to_string(),
        rhs: y.to_string(),
    }
}

fn infinite_core_witness(
    x: &SetSpec,
    y: &SetSpec,
    side: Side,
    class: u64,
    l: u64,
    t: u64,
) -> Result<SetComparison, SetSpecError> {
    let sign = match side {
        Side::Up => 1i64,
        Side::Down => -1i64,
    };
    let mut probe = sign * t as i64;
    // Align the probe to the class.
    while rem_euclid(probe, l) != class {
        probe += sign;
    }
    for _ in 0..WITNESS_SCAN_CAP {
        if x.contains(probe) != y.contains(probe) {
            let range = match side {
                Side::Up => format!("n >= {t}"),
                Side::Down => format!("n <= -{t}"),
            };
            return Ok(SetComparison::InfiniteSymDiff {
                rule: format!(
                    "all but finitely many n with n == {class} (mod {l}) and {range}"
                ),
                witness: probe,
            });
        }
        probe += sign * l as i64;
    }
    Err(unsupported(x, y))
}

fn infinite_geo_witness(
    x: &SetSpec,
    y: &SetSpec,
    key: (u64, u64),
    class: u64,
    modulus: u64,
    from: u64,
) -> Result<SetComparison, SetSpecError> {
    let (mu, alpha) = key;
    let mut e = from;
    while rem_euclid(e as i64, modulus) != class {
        e += 1;
    }
    while e <= from + EXPONENT_CAP * modulus {
        if let Some(v) = checked_value(alpha, mu, e) {
            if x.contains(v) != y.contains(v) {
                let coeff = if alpha == 1 {
                    String::new()
                } else {
                    format!("{alpha}*")
                };
                let rule = if modulus == 1 {
                    format!("all but finitely many {coeff}{mu}^e with e >= {from}")
                } else {
                    format!(
                        "all but finitely many {coeff}{mu}^e with e == {class} (mod {modulus}), e >= {from}"
                    )
                };
                return Ok(SetComparison::InfiniteSymDiff { rule, witness: v });
            }
        }
        e += modulus;
    }
    Err(unsupported(x, y))
}

fn checked_value(alpha: u64, mu: u64, e: u64) -> Option<i64> {
    let mut v = alpha;
    for _ in 0..e {
        v = v.checked_mul(mu)?;
    }
    (v <= i64::MAX as u64).then_some(v as i64)
}

/// Exponent arithmetic progressions `{start + k·step : k ≥ 0}`.
#[derive(Debug, Clone, Default)]
struct ApSet {
    aps: Vec<(u64, u64)>,
}

impl ApSet {
    fn contains(&self, e: u64) -> bool {
        self.aps
            .iter()
            .any(|&(start, step)| e >= start && (e - start) % step == 0)
    }
}

enum ApCmp {
    InfiniteDiff { class: u64, modulus: u64, from: u64 },
    FiniteDiff(Vec<u64>),
}

fn compare_ap_sets(ex: &ApSet, ey: &ApSet) -> Option<ApCmp> {
    if ex.aps.is_empty() && ey.aps.is_empty() {
        return Some(ApCmp::FiniteDiff(Vec::new()));
    }
    let mut l = 1u64;
    for &(_, step) in ex.aps.iter().chain(ey.aps.iter()) {
        l = lcm(l, step).filter(|&v| v <= STEP_LCM_CAP)?;
    }
    let b = ex
        .aps
        .iter()
        .chain(ey.aps.iter())
        .map(|&(start, _)| start)
        .max()
        .unwrap_or(0);
    for class in 0..l {
        // Beyond `b` membership of a class is all-or-nothing per side.
        let probe = b + rem_euclid(class as i64 - b as i64, l);
        let evx = ex.contains(probe);
        let evy = ey.contains(probe);
        if evx != evy {
            return Some(ApCmp::InfiniteDiff {
                class,
                modulus: l,
                from: probe,
            });
        }
    }
    let mut diffs = Vec::new();
    for e in 0..(b + l) {
        if ex.contains(e) != ey.contains(e) {
            diffs.push(e);
        }
    }
    Some(ApCmp::FiniteDiff(diffs))
}

/// Decompose geometric atoms into exponent progressions over primitive bases.
/// Key: `(mu, alpha)` with `mu` primitive (not a perfect power) and
/// `mu ∤ alpha`; member values are `alpha·mu^e`.
fn exponent_classes(s: &SetSpec) -> Result<BTreeMap<(u64, u64), ApSet>, SetSpecError> {
    let mut out: BTreeMap<(u64, u64), ApSet> = BTreeMap::new();
    for atom in &s.atoms {
        if let Atom::Geometric { base, ratio } = atom {
            let (mu, s_exp) = crate::arith::primitive_root_power(*ratio);
            let mut alpha = *base;
            let mut v = 0u64;
            while alpha % mu == 0 {
                alpha /= mu;
                v += 1;
            }
            out.entry((mu, alpha))
                .or_default()
                .aps
                .push((v, s_exp as u64));
        }
    }
    Ok(out)
}
