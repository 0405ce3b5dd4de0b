//! Small exact integer helpers shared by the symbolic set machinery.

use std::collections::BTreeMap;

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Least common multiple, `None` on overflow.
pub fn lcm(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}

/// Euclidean remainder of a signed value by an unsigned modulus.
pub fn rem_euclid(n: i64, m: u64) -> u64 {
    n.rem_euclid(m as i64) as u64
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    // Deterministic Miller-Rabin for u64 with the standard witness set.
    let d = (n - 1) >> (n - 1).trailing_zeros();
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        let mut r = d;
        while r != n - 1 {
            x = mul_mod(x, x, n);
            r <<= 1;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Full prime factorization of `n ≥ 1` as prime → exponent.
pub fn factorize(n: u64) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m <= 1 {
            continue;
        }
        if is_prime(m) {
            *out.entry(m).or_insert(0) += 1;
        } else {
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    out
}

/// Writes `n ≥ 2` as `root^exp` with `root` not a perfect power.
pub fn primitive_root_power(n: u64) -> (u64, u32) {
    let fac = factorize(n);
    let e = fac.values().fold(0u32, |g, &v| gcd(g as u64, v as u64) as u32);
    if e <= 1 {
        return (n, 1);
    }
    let mut root = 1u64;
    for (&p, &v) in &fac {
        root *= p.pow(v / e);
    }
    (root, e)
}

/// Multiplicative dependence: `Some((rho, s, u))` with `a = rho^s`,
/// `b = rho^u` and `rho` primitive, or `None` when no common base exists.
pub fn common_base(a: u64, b: u64) -> Option<(u64, u32, u32)> {
    debug_assert!(a >= 2 && b >= 2);
    let (ra, ea) = primitive_root_power(a);
    let (rb, eb) = primitive_root_power(b);
    (ra == rb).then_some((ra, ea, eb))
}

/// `base^exp` in checked u64 arithmetic.
pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_small() {
        assert_eq!(factorize(1).len(), 0);
        assert_eq!(factorize(12), BTreeMap::from([(2, 2), (3, 1)]));
        assert_eq!(factorize(97), BTreeMap::from([(97, 1)]));
        assert_eq!(factorize(2u64.pow(40)), BTreeMap::from([(2, 40)]));
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root_power(8), (2, 3));
        assert_eq!(primitive_root_power(36), (6, 2));
        assert_eq!(primitive_root_power(12), (12, 1));
    }

    #[test]
    fn dependence() {
        assert_eq!(common_base(4, 8), Some((2, 2, 3)));
        assert_eq!(common_base(2, 3), None);
        assert_eq!(common_base(6, 36), Some((6, 1, 2)));
    }

    #[test]
    fn primality_spot_checks() {
        assert!(is_prime(2));
        assert!(is_prime((1u64 << 61) - 1));
        assert!(!is_prime(1));
        assert!(!is_prime(3215031751));
    }
}
