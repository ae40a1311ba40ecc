//! Word-size number theory helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::Rational;

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &s in &SMALL {
        if n % s == 0 {
            return n == s;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    let m = n as u128;
    'witness: for &a in &SMALL {
        let mut x = powmod(a as u128, d as u128, m);
        if x == 1 || x == m - 1 {
            continue;
        }
        for _ in 1..r {
            x = mulmod(x, x, m);
            if x == m - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `p^k` if it fits below 2^127 (the limit of the residue kernels).
pub fn prime_power(p: u64, k: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..k {
        acc = acc.checked_mul(p as u128)?;
        if acc >= 1u128 << 127 {
            return None;
        }
    }
    Some(acc)
}

fn addmod(a: u128, b: u128, m: u128) -> u128 {
    let (s, overflow) = a.overflowing_add(b);
    if overflow || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

/// `a * b mod m` for any `m < 2^128`, `a, b < m`.
pub fn mulmod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return (a * b) % m;
    }
    let mut r = 0u128;
    for bit in (0..128).rev() {
        r = addmod(r, r, m);
        if (b >> bit) & 1 == 1 {
            r = addmod(r, a, m);
        }
    }
    r
}

pub fn powmod(mut base: u128, mut e: u128, m: u128) -> u128 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        e >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m` (`m < 2^127`), if it exists.
pub fn inv_mod(a: u128, m: u128) -> Option<u128> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u128)
}

/// Legendre symbol by Euler's criterion. `p` must be an odd prime.
pub fn legendre(q: i128, p: u64) -> i8 {
    assert!(p % 2 == 1, "legendre symbol needs an odd prime");
    let m = p as u128;
    let r = q.rem_euclid(p as i128) as u128;
    match powmod(r, (m - 1) / 2, m) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = 1u128 << ((128 - n.leading_zeros()).div_ceil(2));
    loop {
        let y = (x + n / x) / 2;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// Recovers `u/v` from `residue ≡ u/v (mod p^k)` with `|u|, v ≤ sqrt(p^k / 2)`.
///
/// Returns `None` when no fraction within the height bound exists.
pub fn rational_reconstruct(residue: u128, p: u64, k: u32) -> Option<Rational> {
    let m = prime_power(p, k)?;
    reconstruct_mod(residue, m, p)
}

pub(crate) fn reconstruct_mod(residue: u128, m: u128, p: u64) -> Option<Rational> {
    if residue >= m {
        return None;
    }
    let bound = isqrt(m / 2) as i128;
    let (mut r0, mut r1) = (m as i128, residue as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 > bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() > bound {
        return None;
    }
    let (mut u, mut v) = (r1, t1);
    if v < 0 {
        u = -u;
        v = -v;
    }
    if u.gcd(&v) != 1 || v % (p as i128) == 0 {
        return None;
    }
    Some(Rational::new(BigInt::from(u), BigInt::from(v)))
}

/// p-adic valuation of a nonzero integer.
pub fn valuation_int(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut v = 0;
    let mut n = n.abs();
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a rational; `None` for zero.
pub fn valuation(r: &Rational, p: u64) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    Some(valuation_int(r.numer(), p) as i64 - valuation_int(r.denom(), p) as i64)
}

/// Image of a p-integral rational in `Z / m`.
pub fn reduce_rational(r: &Rational, m: u128) -> Option<u128> {
    let mm = BigInt::from(m);
    let num = r.numer().mod_floor(&mm);
    let den = r.denom().mod_floor(&mm);
    let num: u128 = num.try_into().ok()?;
    let den: u128 = den.try_into().ok()?;
    let den_inv = if m == 1 { 0 } else { inv_mod(den, m)? };
    Some(mulmod(num, den_inv, m))
}

/// `q^e` over the rationals.
pub fn rational_pow(q: &Rational, e: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= q;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime(3215031751));
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(1, 7), 1);
        assert_eq!(legendre(2, 7), 1);
        assert_eq!(legendre(2, 3), -1);
        assert_eq!(legendre(9, 3), 0);
        assert_eq!(legendre(-1, 5), 1);
        assert_eq!(legendre(-1, 7), -1);
    }

    #[test]
    fn inverse_mod_27() {
        assert_eq!(inv_mod(2, 27), Some(14));
        assert_eq!(inv_mod(3, 27), None);
    }

    #[test]
    fn mulmod_wide_matches_bigint() {
        let m: u128 = 7u128.pow(40);
        let a = m - 12345;
        let b = m / 3 + 17;
        let expect = (BigInt::from(a) * BigInt::from(b)) % BigInt::from(m);
        assert_eq!(BigInt::from(mulmod(a, b, m)), expect);
    }

    #[test]
    fn reconstruct_examples() {
        assert_eq!(
            rational_reconstruct(122, 3, 5),
            Some(Rational::new(1.into(), 2.into()))
        );
        assert_eq!(
            rational_reconstruct(7, 5, 6),
            Some(Rational::from_integer(7.into()))
        );
        assert_eq!(rational_reconstruct(0, 5, 6), Some(Rational::zero()));
        // -1 mod 3^5
        assert_eq!(
            rational_reconstruct(242, 3, 5),
            Some(Rational::from_integer((-1).into()))
        );
    }

    #[test]
    fn reconstruct_rejects_large_height() {
        // 100 exceeds sqrt(243 / 2) = 11
        assert_eq!(rational_reconstruct(100, 3, 5), None);
    }

    #[test]
    fn isqrt_exact() {
        for n in 0u128..2000 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n, "n = {n}");
        }
        let big = (1u128 << 126) + 12345;
        let r = isqrt(big);
        assert!(r * r <= big && (r + 1) * (r + 1) > big);
    }

    #[test]
    fn valuations() {
        let r = Rational::new(BigInt::from(18), BigInt::from(5));
        assert_eq!(valuation(&r, 3), Some(2));
        assert_eq!(valuation(&r, 5), Some(-1));
        assert_eq!(valuation(&Rational::zero(), 5), None);
    }
}
