//! Exact arithmetic in GF(p^e).
//!
//! Elements are stored as integer codes in `0..q`: the base-`p` digits of the
//! code are the polynomial coefficients, lowest degree first. The modulus is
//! the lexicographically smallest monic irreducible polynomial of degree `e`
//! (coefficients compared low-degree-first), so codes are reproducible across
//! runs and implementations.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

/// Fields up to this order multiply through log/antilog tables.
const LOG_TABLE_LIMIT: u32 = 1 << 12;

/// Fields up to this order keep a full addition table.
const ADD_TABLE_LIMIT: u32 = 1 << 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1, got {0}")]
    BadDegree(u32),
    #[error("field order {p}^{e} exceeds the supported maximum {max}")]
    TooLarge { p: u32, e: u32, max: u32 },
    #[error("element code {code} out of range for a field of order {q}")]
    OutOfRange { code: u32, q: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("Frobenius exponent {j} out of range for extension degree {e}")]
    BadAutomorphism { j: u32, e: u32 },
}

/// A field element, identified by its integer code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElem(pub u16);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    #[inline]
    pub fn code(self) -> u32 {
        u32::from(self.0)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The field automorphism `a -> a^(p^j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct FieldAut {
    pub j: u32,
}

impl FieldAut {
    pub const IDENTITY: FieldAut = FieldAut { j: 0 };

    pub fn is_identity(self) -> bool {
        self.j == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[derive(Clone)]
enum MulStrategy {
    /// `log[a]` for nonzero `a`, `exp` has length `2(q-1)` to skip a reduction.
    Log { log: Vec<u32>, exp: Vec<u16> },
    Schoolbook,
}

/// A finite field GF(p^e) with a fixed polynomial representation.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    pow_p: Vec<u32>,
    add_table: Option<Vec<u16>>,
    neg: Vec<u16>,
    mul: MulStrategy,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// If `n = p^e` for a prime `p` and `e >= 1`, returns `(p, e)`.
pub fn prime_power(n: u64) -> Option<(u32, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= n && n % p != 0 {
        p += 1;
    }
    if n % p != 0 {
        p = n;
    }
    let mut m = n;
    let mut e = 0;
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p as u32, e))
}

// Polynomials over GF(p), coefficient vectors low degree first.

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = mod_inverse(m[dm], p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let factor = r[r.len() - 1] * lead_inv % p;
        for (i, &c) in m.iter().enumerate() {
            let idx = shift + i;
            r[idx] = (r[idx] + p - factor * c % p) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn mod_inverse(a: u32, p: u32) -> u32 {
    // p is prime and small; Fermat.
    let mut result = 1u64;
    let mut base = u64::from(a % p);
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % u64::from(p);
        }
        base = base * base % u64::from(p);
        exp >>= 1;
    }
    result as u32
}

/// Monic polynomials of degree `d` over GF(p) in lexicographic order (low degree first).
fn monic_polys(p: u32, d: u32) -> impl Iterator<Item = Vec<u32>> {
    let count = (p as u64).pow(d);
    (0..count).map(move |mut idx| {
        let mut coeffs = Vec::with_capacity(d as usize + 1);
        for _ in 0..d {
            coeffs.push((idx % u64::from(p)) as u32);
            idx /= u64::from(p);
        }
        coeffs.push(1);
        coeffs
    })
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = (f.len() - 1) as u32;
    if deg <= 1 {
        return deg == 1;
    }
    (1..=deg / 2).all(|d| monic_polys(p, d).all(|g| !poly_rem(f, &g, p).is_empty()))
}

impl FieldSpec {
    /// Builds GF(p^e) with its canonical modulus.
    pub fn new(p: u32, e: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if e < 1 {
            return Err(FieldError::BadDegree(e));
        }
        let q = (p as u64)
            .checked_pow(e)
            .filter(|&q| q <= u64::from(MAX_ORDER))
            .ok_or(FieldError::TooLarge { p, e, max: MAX_ORDER })? as u32;

        // Lowest-first ordering of monic_polys is exactly the required lexicographic order.
        let modulus = monic_polys(p, e)
            .find(|f| is_irreducible(f, p))
            .expect("an irreducible polynomial exists in every degree");

        let mut pow_p = Vec::with_capacity(e as usize);
        let mut acc = 1u32;
        for _ in 0..e {
            pow_p.push(acc);
            acc = acc.wrapping_mul(p);
        }

        let mut field = FieldSpec {
            p,
            e,
            q,
            modulus,
            pow_p,
            add_table: None,
            neg: Vec::new(),
            mul: MulStrategy::Schoolbook,
        };
        field.neg = (0..q).map(|a| field.neg_digits(a) as u16).collect();
        if q <= ADD_TABLE_LIMIT {
            let mut table = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = field.add_digits(a, b) as u16;
                }
            }
            field.add_table = Some(table);
        }
        if q <= LOG_TABLE_LIMIT && q > 2 {
            field.mul = field.build_log_tables();
        }
        Ok(field)
    }

    fn build_log_tables(&self) -> MulStrategy {
        let n = self.q - 1;
        for g in 2..self.q {
            let mut exp = Vec::with_capacity(2 * n as usize);
            let mut log = vec![u32::MAX; self.q as usize];
            let mut x = 1u32;
            let mut primitive = true;
            for i in 0..n {
                if log[x as usize] != u32::MAX {
                    primitive = false;
                    break;
                }
                log[x as usize] = i;
                exp.push(x as u16);
                x = self.mul_schoolbook(x, g);
            }
            if primitive {
                let head = exp.clone();
                exp.extend(head);
                return MulStrategy::Log { log, exp };
            }
        }
        MulStrategy::Schoolbook
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    /// The field order `q = p^e`.
    pub fn order(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients, low degree first, length `e + 1`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    pub fn one(&self) -> FieldElem {
        FieldElem::ONE
    }

    pub fn elem(&self, code: u32) -> Result<FieldElem, FieldError> {
        if code < self.q {
            Ok(FieldElem(code as u16))
        } else {
            Err(FieldError::OutOfRange { code, q: self.q })
        }
    }

    pub fn from_digits(&self, digits: &[u32]) -> Result<FieldElem, FieldError> {
        if digits.len() > self.e as usize {
            return Err(FieldError::OutOfRange { code: u32::MAX, q: self.q });
        }
        let mut code = 0u32;
        for (i, &d) in digits.iter().enumerate() {
            if d >= self.p {
                return Err(FieldError::OutOfRange { code: d, q: self.p });
            }
            code += d * self.pow_p[i];
        }
        Ok(FieldElem(code as u16))
    }

    pub fn digits(&self, a: FieldElem) -> Vec<u32> {
        let mut code = a.code();
        (0..self.e)
            .map(|_| {
                let d = code % self.p;
                code /= self.p;
                d
            })
            .collect()
    }

    /// All elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(|c| FieldElem(c as u16))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElem> {
        (1..self.q).map(|c| FieldElem(c as u16))
    }

    /// The image of an integer under `Z -> GF(p)`.
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(i64::from(self.p)) as u16)
    }

    fn add_digits(&self, mut a: u32, mut b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let mut out = 0;
        for &w in &self.pow_p {
            out += (a % self.p + b % self.p) % self.p * w;
            a /= self.p;
            b /= self.p;
        }
        out
    }

    fn neg_digits(&self, mut a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let mut out = 0;
        for &w in &self.pow_p {
            out += (self.p - a % self.p) % self.p * w;
            a /= self.p;
        }
        out
    }

    fn mul_schoolbook(&self, a: u32, b: u32) -> u32 {
        let da = self.digits(FieldElem(a as u16));
        let db = self.digits(FieldElem(b as u16));
        let mut prod = vec![0u32; 2 * self.e as usize];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        let r = poly_rem(&prod, &self.modulus, self.p);
        r.iter().enumerate().map(|(i, &c)| c * self.pow_p[i]).sum()
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        match &self.add_table {
            Some(t) => FieldElem(t[(a.code() * self.q + b.code()) as usize]),
            None => FieldElem(self.add_digits(a.code(), b.code()) as u16),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.is_zero() || b.is_zero() {
            return FieldElem::ZERO;
        }
        match &self.mul {
            MulStrategy::Log { log, exp } => {
                FieldElem(exp[(log[a.0 as usize] + log[b.0 as usize]) as usize])
            }
            MulStrategy::Schoolbook => {
                if self.e == 1 {
                    FieldElem((a.code() * b.code() % self.p) as u16)
                } else {
                    FieldElem(self.mul_schoolbook(a.code(), b.code()) as u16)
                }
            }
        }
    }

    /// Checked binary operation on possibly untrusted elements.
    pub fn arith(&self, op: ArithOp, a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
        self.elem(a.code())?;
        self.elem(b.code())?;
        Ok(match op {
            ArithOp::Add => self.add(a, b),
            ArithOp::Sub => self.sub(a, b),
            ArithOp::Mul => self.mul(a, b),
        })
    }

    pub fn pow(&self, a: FieldElem, mut n: u64) -> FieldElem {
        let mut result = FieldElem::ONE;
        let mut base = a;
        while n > 0 {
            if n & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        result
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        self.elem(a.code())?;
        Ok(match &self.mul {
            MulStrategy::Log { log, exp } => {
                let n = self.q - 1;
                FieldElem(exp[((n - log[a.0 as usize]) % n) as usize])
            }
            MulStrategy::Schoolbook => self.pow(a, u64::from(self.q) - 2),
        })
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// The `e` Frobenius powers, identity first.
    pub fn list_auts(&self) -> Vec<FieldAut> {
        (0..self.e).map(|j| FieldAut { j }).collect()
    }

    pub fn check_aut(&self, pi: FieldAut) -> Result<(), FieldError> {
        if pi.j < self.e {
            Ok(())
        } else {
            Err(FieldError::BadAutomorphism { j: pi.j, e: self.e })
        }
    }

    pub fn apply_aut(&self, pi: FieldAut, a: FieldElem) -> FieldElem {
        if pi.j == 0 {
            return a;
        }
        self.pow(a, (self.p as u64).pow(pi.j % self.e))
    }

    /// Composition `pi . rho` (apply `rho` first).
    pub fn compose_auts(&self, pi: FieldAut, rho: FieldAut) -> FieldAut {
        FieldAut { j: (pi.j + rho.j) % self.e }
    }

    pub fn inverse_aut(&self, pi: FieldAut) -> FieldAut {
        FieldAut { j: (self.e - pi.j % self.e) % self.e }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent irreducibility oracle: a monic quadratic or cubic is
    /// irreducible iff it has no root.
    fn has_root(coeffs: &[u32], p: u32) -> bool {
        (0..p).any(|x| {
            let v = coeffs.iter().rev().fold(0u32, |acc, &c| (acc * x + c) % p);
            v == 0
        })
    }

    #[test]
    fn prime_field_modulus_is_x() {
        let f = FieldSpec::new(2, 1).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.order(), 2);
    }

    #[test]
    fn gf4_modulus() {
        let f = FieldSpec::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
    }

    #[test]
    fn gf9_modulus_is_smallest_rootless_quadratic() {
        let oracle = (0..9u32)
            .map(|i| vec![i % 3, i / 3, 1])
            .find(|c| !has_root(c, 3))
            .unwrap();
        let f = FieldSpec::new(3, 2).unwrap();
        assert_eq!(f.modulus(), oracle.as_slice());
        assert_eq!(oracle, vec![1, 0, 1]);
    }

    #[test]
    fn construction_is_deterministic() {
        for (p, e) in [(2, 3), (3, 2), (5, 2), (2, 8)] {
            let a = FieldSpec::new(p, e).unwrap();
            let b = FieldSpec::new(p, e).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FieldSpec::new(4, 1).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(FieldSpec::new(1, 1).unwrap_err(), FieldError::NotPrime(1));
        assert_eq!(FieldSpec::new(3, 0).unwrap_err(), FieldError::BadDegree(0));
        assert!(matches!(FieldSpec::new(2, 17), Err(FieldError::TooLarge { .. })));
        assert!(FieldSpec::new(2, 16).is_ok());
    }

    #[test]
    fn arith_examples() {
        let f5 = FieldSpec::new(5, 1).unwrap();
        assert_eq!(f5.mul(FieldElem(2), FieldElem(3)), FieldElem(1));
        let f4 = FieldSpec::new(2, 2).unwrap();
        let x = FieldElem(2);
        assert_eq!(f4.mul(x, x), FieldElem(3));
        let f2 = FieldSpec::new(2, 1).unwrap();
        assert_eq!(f2.add(FieldElem(1), FieldElem(1)), FieldElem(0));
        assert!(f4.arith(ArithOp::Add, FieldElem(4), FieldElem(0)).is_err());
    }

    #[test]
    fn inverse_examples() {
        let f5 = FieldSpec::new(5, 1).unwrap();
        assert_eq!(f5.inv(FieldElem(2)).unwrap(), FieldElem(3));
        let f2 = FieldSpec::new(2, 1).unwrap();
        assert_eq!(f2.inv(FieldElem(1)).unwrap(), FieldElem(1));
        let f4 = FieldSpec::new(2, 2).unwrap();
        let brute = f4
            .nonzero_elements()
            .find(|&y| f4.mul(FieldElem(2), y) == FieldElem::ONE)
            .unwrap();
        assert_eq!(brute, FieldElem(3));
        assert_eq!(f4.inv(FieldElem(2)).unwrap(), brute);
        assert_eq!(f4.inv(FieldElem(0)), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn field_axioms_exhaustive() {
        for (p, e) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
            let f = FieldSpec::new(p, e).unwrap();
            let els: Vec<_> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), FieldElem::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElem::ONE);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn log_tables_agree_with_schoolbook() {
        for (p, e) in [(2, 4), (3, 3), (5, 2), (2, 12)] {
            let f = FieldSpec::new(p, e).unwrap();
            assert!(matches!(f.mul, MulStrategy::Log { .. }));
            for a in (0..f.order()).step_by(7) {
                for b in (0..f.order()).step_by(11) {
                    let expected = if a == 0 || b == 0 { 0 } else { f.mul_schoolbook(a, b) };
                    assert_eq!(f.mul(FieldElem(a as u16), FieldElem(b as u16)).code(), expected);
                }
            }
        }
    }

    #[test]
    fn large_field_uses_schoolbook() {
        let f = FieldSpec::new(2, 13).unwrap();
        assert!(matches!(f.mul, MulStrategy::Schoolbook));
        let a = FieldElem(1234);
        assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElem::ONE);
        let f = FieldSpec::new(65521, 1).unwrap();
        assert_eq!(f.mul(FieldElem(65520), FieldElem(65520)), FieldElem::ONE);
    }

    #[test]
    fn automorphisms() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        assert_eq!(f2.list_auts(), vec![FieldAut::IDENTITY]);
        let f4 = FieldSpec::new(2, 2).unwrap();
        let auts = f4.list_auts();
        assert_eq!(auts.len(), 2);
        assert!(auts[0].is_identity());
        assert_eq!(f4.apply_aut(auts[1], FieldElem(0)), FieldElem(0));
        assert_eq!(f4.apply_aut(auts[1], FieldElem(2)), FieldElem(3));
        let f9 = FieldSpec::new(3, 2).unwrap();
        assert_eq!(f9.list_auts().len(), 2);
    }

    #[test]
    fn frobenius_is_ring_automorphism_of_period_e() {
        for (p, e) in [(3, 2), (2, 3), (2, 2), (5, 2)] {
            let f = FieldSpec::new(p, e).unwrap();
            for pi in f.list_auts() {
                for a in f.elements() {
                    assert_eq!(f.apply_aut(pi, a), f.pow(a, (p as u64).pow(pi.j)));
                    // e applications of the same map is the identity
                    let mut x = a;
                    for _ in 0..e {
                        x = f.apply_aut(pi, x);
                    }
                    assert_eq!(x, a);
                    for b in f.elements() {
                        assert_eq!(f.apply_aut(pi, f.add(a, b)), f.add(f.apply_aut(pi, a), f.apply_aut(pi, b)));
                        assert_eq!(f.apply_aut(pi, f.mul(a, b)), f.mul(f.apply_aut(pi, a), f.apply_aut(pi, b)));
                    }
                }
                // fixes the prime subfield
                for c in 0..p {
                    assert_eq!(f.apply_aut(pi, FieldElem(c as u16)), FieldElem(c as u16));
                }
            }
        }
    }

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
    }
}
