//! Residue rings Z/W: factorization, squares, CRT and square-root counts.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

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

/// Inverse of `a` modulo `m`, if `gcd(a, m) == 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller–Rabin; the witness set is exact for all of u64.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A positive modulus together with its prime factorization.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModulusFactorization {
    modulus: u64,
    /// `(p, e)` with `p` strictly increasing and `e >= 1`.
    factors: Vec<(u64, u32)>,
}

impl ModulusFactorization {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// The prime-power components `p^e`, in factor order.
    pub fn prime_powers(&self) -> Vec<u64> {
        self.factors.iter().map(|&(p, e)| p.pow(e)).collect()
    }

    pub fn smallest_prime(&self) -> Option<u64> {
        self.factors.first().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }

    pub fn euler_phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }
}

pub fn factorize(w: u64) -> Result<ModulusFactorization> {
    if w == 0 {
        return Err(invalid("modulus must be positive"));
    }
    let mut factors = Vec::new();
    let mut rest = w;
    let mut p = 2u64;
    while p * p <= rest {
        if is_prime(rest) {
            break;
        }
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        debug_assert!(is_prime(rest));
        match factors.last_mut() {
            Some((q, e)) if *q == rest => *e += 1,
            _ => factors.push((rest, 1)),
        }
    }
    Ok(ModulusFactorization { modulus: w, factors })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SquareKind {
    AllSquares,
    UnitSquares,
}

/// `(Z/W)^(2)` or `(Z/W)^(x)(2)` as sorted residues.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareSet {
    modulus: u64,
    kind: SquareKind,
    elements: Vec<u64>,
}

impl SquareSet {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn kind(&self) -> SquareKind {
        self.kind
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&(x % self.modulus)).is_ok()
    }

    pub fn indicator(&self) -> Vec<bool> {
        let mut v = vec![false; self.modulus as usize];
        for &x in &self.elements {
            v[x as usize] = true;
        }
        v
    }
}

pub fn squares_mod(w: u64, kind: SquareKind) -> Result<SquareSet> {
    if w == 0 {
        return Err(invalid("modulus must be positive"));
    }
    let n = usize::try_from(w).map_err(|_| invalid("modulus too large to enumerate"))?;
    let mut hit = vec![false; n];
    for y in 0..w {
        if kind == SquareKind::UnitSquares && y.gcd(&w) != 1 {
            continue;
        }
        hit[mul_mod(y, y, w) as usize] = true;
    }
    let elements = (0..w).filter(|&x| hit[x as usize]).collect();
    Ok(SquareSet { modulus: w, kind, elements })
}

/// Closed-form `S(p^n)` for odd primes.
pub fn count_squares(p: u64, n: u32) -> Result<BigUint> {
    if p == 2 || !is_prime(p) {
        return Err(invalid(format!("{p} is not an odd prime")));
    }
    if n == 0 {
        return Err(invalid("exponent must be positive"));
    }
    let pb = BigUint::from(p);
    let pn = pb.pow(n);
    let num = if n % 2 == 1 {
        &pn * &pb - 1u32
    } else {
        &pb * (&pn - 1u32)
    };
    let den = BigUint::from(2u32) * (&pb + 1u32);
    let (q, r) = num.div_rem(&den);
    assert!(r.is_zero(), "inexact division in square count");
    Ok(q + BigUint::one())
}

pub fn crt_split(x: u64, f: &ModulusFactorization) -> Vec<u64> {
    f.prime_powers().into_iter().map(|q| x % q).collect()
}

pub fn crt_combine(parts: &[u64], f: &ModulusFactorization) -> Result<u64> {
    let qs = f.prime_powers();
    if parts.len() != qs.len() {
        return Err(invalid(format!(
            "expected {} CRT components, got {}",
            qs.len(),
            parts.len()
        )));
    }
    let w = f.modulus();
    let mut x = 0u64;
    for (&r, &q) in parts.iter().zip(&qs) {
        let m = w / q;
        let inv = inv_mod(m % q, q).expect("coprime CRT components");
        let term = mul_mod(mul_mod(r % q, inv, q), m, w);
        x = (x + term) % w;
    }
    Ok(x)
}

/// Number of units `x` mod W with `x^2 == b`.
pub fn sigma(w: u64, b: u64) -> Result<u64> {
    if w == 0 {
        return Err(invalid("modulus must be positive"));
    }
    let b = b % w;
    let count = (0..w)
        .filter(|&x| x.gcd(&w) == 1 && mul_mod(x, x, w) == b)
        .count() as u64;
    if count == 0 {
        return Err(Error::NotUnitSquare { residue: b, modulus: w });
    }
    Ok(count)
}
