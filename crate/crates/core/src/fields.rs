//! Exact arithmetic in prime fields `F_p` and single-step extensions `F_{p^k}`.
//!
//! An extension is described by a monic irreducible modulus of degree `k` over
//! `F_p`; elements are coefficient vectors in the generator `w`, little-endian.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::Rng;

use crate::error::{Error, Result};
use crate::poly::Poly;

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

pub(crate) fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(p as i128) as u64)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
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

/// Minimal dense polynomial arithmetic over `F_p` on raw residues, used to
/// validate and search for moduli before any [`Field`] exists.
mod fp {
    use super::*;

    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p).expect("nonzero leading coefficient");
        while r.len() > dm {
            let shift = r.len() - 1 - dm;
            let c = mul_mod(*r.last().unwrap(), lead_inv, p);
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = sub_mod(r[shift + i], mul_mod(c, mi, p), p);
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul_rem(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = add_mod(prod[i + j], mul_mod(x, y, p), p);
            }
        }
        rem(&prod, m, p)
    }

    pub fn pow_rem(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut result = rem(&[1], m, p);
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mul_rem(&result, &b, m, p);
            }
            b = mul_rem(&b, &b, m, p);
            e >>= 1;
        }
        result
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    /// Ben-Or irreducibility test for a monic polynomial.
    pub fn is_irreducible(m: &[u64], p: u64) -> bool {
        let n = m.len() - 1;
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let x = vec![0, 1];
        let mut h = rem(&x, m, p);
        for _ in 1..=n / 2 {
            h = pow_rem(&h, p, m, p);
            let mut diff = h.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = sub_mod(diff[1], 1, p);
            trim(&mut diff);
            let g = gcd(m, &diff, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}

/// First monic irreducible polynomial of degree `n` over `F_p` in a fixed
/// enumeration order (constant term varies fastest).
pub fn first_irreducible(p: u64, n: usize) -> Vec<u64> {
    assert!(n >= 1);
    if n == 1 {
        return vec![0, 1];
    }
    let mut counter: Vec<u64> = vec![0; n];
    loop {
        // advance the base-p counter over the low coefficients
        let mut i = 0;
        loop {
            counter[i] += 1;
            if counter[i] < p {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
        if counter[0] == 0 {
            continue;
        }
        let mut m = counter.clone();
        m.push(1);
        if fp::is_irreducible(&m, p) {
            return m;
        }
    }
}

/// Immutable description of `F_{p^k}`.
pub struct FieldDescriptor {
    p: u64,
    k: usize,
    modulus: Vec<u64>,
    frobenius_images: OnceLock<Vec<Vec<u64>>>,
    nonresidue: OnceLock<Vec<u64>>,
}

impl FieldDescriptor {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
}

impl PartialEq for FieldDescriptor {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for FieldDescriptor {}

impl fmt::Debug for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldDescriptor({})", spec_string(self))
    }
}

fn spec_string(d: &FieldDescriptor) -> String {
    if d.k == 1 {
        d.p.to_string()
    } else {
        let m: Vec<String> = d.modulus.iter().map(|c| c.to_string()).collect();
        format!("{}^{}:{}", d.p, d.k, m.join(","))
    }
}

/// Shared handle to a [`FieldDescriptor`].
#[derive(Clone)]
pub struct Field(Arc<FieldDescriptor>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.spec())
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec())
    }
}

impl Field {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Field> {
        Self::new(p, vec![0, 1])
    }

    /// `F_p[w]/(modulus)`. The modulus is little-endian, monic, irreducible.
    pub fn new(p: u64, modulus: Vec<u64>) -> Result<Field> {
        if p >= 1 << 61 {
            return Err(Error::InvalidField(format!("characteristic {p} exceeds 2^61")));
        }
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if p <= 3 {
            return Err(Error::InvalidField("characteristic must exceed 3".into()));
        }
        if modulus.len() < 2 {
            return Err(Error::InvalidField("modulus must have degree at least 1".into()));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField("modulus coefficients must lie in [0,p)".into()));
        }
        let k = modulus.len() - 1;
        let modulus = if k == 1 { vec![0, 1] } else { modulus };
        if k > 1 && !fp::is_irreducible(&modulus, p) {
            return Err(Error::InvalidField("modulus is reducible".into()));
        }
        Ok(Field(Arc::new(FieldDescriptor {
            p,
            k,
            modulus,
            frobenius_images: OnceLock::new(),
            nonresidue: OnceLock::new(),
        })))
    }

    /// Parses `p`, `p^k:m0,...,mk`, or `p^k` (first irreducible modulus).
    pub fn parse(spec: &str) -> Result<Field> {
        let bad = |m: &str| Error::InvalidField(format!("{m}: {spec:?}"));
        let spec = spec.trim();
        let (head, modulus) = match spec.split_once(':') {
            Some((h, m)) => (h, Some(m)),
            None => (spec, None),
        };
        let (p, k) = match head.split_once('^') {
            Some((p, k)) => (
                p.trim().parse::<u64>().map_err(|_| bad("bad characteristic"))?,
                k.trim().parse::<usize>().map_err(|_| bad("bad degree"))?,
            ),
            None => (head.trim().parse::<u64>().map_err(|_| bad("bad characteristic"))?, 1),
        };
        if k == 0 {
            return Err(bad("degree must be positive"));
        }
        let modulus = match modulus {
            Some(m) => {
                let coeffs: std::result::Result<Vec<u64>, _> =
                    m.split(',').map(|c| c.trim().parse::<u64>()).collect();
                coeffs.map_err(|_| bad("bad modulus coefficient"))?
            }
            None if k == 1 => vec![0, 1],
            None => {
                if !is_prime(p) || p <= 3 {
                    return Err(bad("bad characteristic"));
                }
                first_irreducible(p, k)
            }
        };
        if modulus.len() != k + 1 {
            return Err(bad("modulus must have k+1 coefficients"));
        }
        Field::new(p, modulus)
    }

    /// Canonical spec string, inverse of [`Field::parse`].
    pub fn spec(&self) -> String {
        spec_string(&self.0)
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.0
    }

    pub fn characteristic(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> usize {
        self.0.k
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.k == 1
    }

    /// Number of elements `p^k`.
    pub fn order(&self) -> BigUint {
        BigUint::from(self.0.p).pow(self.0.k as u32)
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.order().to_u64()
    }

    pub fn zero(&self) -> Fe {
        Fe { field: self.clone(), c: vec![0; self.0.k] }
    }

    pub fn one(&self) -> Fe {
        self.from_u64(1)
    }

    pub fn from_u64(&self, n: u64) -> Fe {
        let mut c = vec![0; self.0.k];
        c[0] = n % self.0.p;
        Fe { field: self.clone(), c }
    }

    pub fn from_i64(&self, n: i64) -> Fe {
        let p = self.0.p as i128;
        self.from_u64((n as i128).rem_euclid(p) as u64)
    }

    pub fn from_bigint(&self, n: &BigInt) -> Fe {
        let p = BigInt::from(self.0.p);
        let r = n.mod_floor(&p);
        self.from_u64(r.to_u64().expect("residue fits"))
    }

    /// Builds an element from residues; every coefficient must lie in `[0,p)`.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<Fe> {
        if coeffs.len() > self.0.k || coeffs.iter().any(|&c| c >= self.0.p) {
            return Err(Error::InvalidArgument(format!(
                "element coefficients {coeffs:?} invalid for field {self}"
            )));
        }
        let mut c = coeffs.to_vec();
        c.resize(self.0.k, 0);
        Ok(Fe { field: self.clone(), c })
    }

    /// The generator `w` (the class of `x` modulo the defining polynomial).
    pub fn generator(&self) -> Fe {
        if self.0.k == 1 {
            return self.zero();
        }
        let mut c = vec![0; self.0.k];
        c[1] = 1;
        Fe { field: self.clone(), c }
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        let p = self.0.p;
        let c = (0..self.0.k).map(|_| rng.gen_range(0..p)).collect();
        Fe { field: self.clone(), c }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        loop {
            let a = self.random(rng);
            if !a.is_zero() {
                return a;
            }
        }
    }

    /// Element with the given index in the canonical enumeration
    /// (`index = c0 + c1 p + c2 p^2 + ...`).
    pub fn element_from_index(&self, mut index: u64) -> Fe {
        let p = self.0.p;
        let c = (0..self.0.k)
            .map(|_| {
                let d = index % p;
                index /= p;
                d
            })
            .collect();
        Fe { field: self.clone(), c }
    }

    /// Parses a decimal, a bracketed residue list `[c0,c1,...]`, or an
    /// expression in `w` such as `134w+93`.
    pub fn parse_element(&self, s: &str) -> Result<Fe> {
        let bad = |m: &str| Error::InvalidArgument(format!("cannot parse element {s:?}: {m}"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(bad("empty"));
        }
        if let Some(inner) = t.strip_prefix('[') {
            let inner = inner.strip_suffix(']').ok_or_else(|| bad("missing ]"))?;
            let parts: Vec<&str> = inner.split(',').collect();
            if parts.len() != self.0.k {
                return Err(bad("wrong number of coefficients"));
            }
            let mut out = self.zero();
            for (i, part) in parts.iter().enumerate() {
                let n: BigInt = part.parse().map_err(|_| bad("bad coefficient"))?;
                out.c[i] = self.from_bigint(&n).c[0];
            }
            return Ok(out);
        }
        // sum of signed terms: [coef][*]w[^e] or coef
        let mut acc = self.zero();
        let mut rest = t.as_str();
        while !rest.is_empty() {
            let (neg, body) = match rest.as_bytes()[0] {
                b'+' => (false, &rest[1..]),
                b'-' => (true, &rest[1..]),
                _ => (false, rest),
            };
            let end = body.find(['+', '-']).unwrap_or(body.len());
            let term = &body[..end];
            rest = &body[end..];
            if term.is_empty() {
                return Err(bad("empty term"));
            }
            let value = match term.find('w') {
                Some(pos) => {
                    if self.0.k == 1 {
                        return Err(bad("prime field has no generator w"));
                    }
                    let coef = term[..pos].trim_end_matches('*');
                    let coef = if coef.is_empty() {
                        self.one()
                    } else {
                        let n: BigInt = coef.parse().map_err(|_| bad("bad coefficient"))?;
                        self.from_bigint(&n)
                    };
                    let exp_str = &term[pos + 1..];
                    let exp = if exp_str.is_empty() {
                        1
                    } else {
                        exp_str
                            .strip_prefix('^')
                            .and_then(|e| e.parse::<u64>().ok())
                            .ok_or_else(|| bad("bad exponent"))?
                    };
                    &coef * &self.generator().pow_u64(exp)
                }
                None => {
                    let n: BigInt = term.parse().map_err(|_| bad("bad integer"))?;
                    self.from_bigint(&n)
                }
            };
            acc = if neg { &acc - &value } else { &acc + &value };
        }
        Ok(acc)
    }

    /// A fixed quadratic non-residue, found by scanning the canonical enumeration.
    fn nonresidue(&self) -> Fe {
        let c = self.0.nonresidue.get_or_init(|| {
            let half = (self.order() - 1u32) >> 1;
            let minus_one = -self.one();
            let mut idx = 2u64;
            loop {
                let z = self.element_from_index(idx);
                if z.pow_big(&half) == minus_one {
                    return z.c;
                }
                idx += 1;
            }
        });
        Fe { field: self.clone(), c: c.clone() }
    }

    fn frobenius_images(&self) -> &Vec<Vec<u64>> {
        self.0.frobenius_images.get_or_init(|| {
            let wp = self.generator().pow_u64(self.0.p);
            let mut images = Vec::with_capacity(self.0.k);
            let mut cur = self.one();
            for _ in 0..self.0.k {
                images.push(cur.c.clone());
                cur = &cur * &wp;
            }
            images
        })
    }

    /// Degree-`d` extension `F_{p^{kd}}` with its canonical modulus, together with an embedding of `self`.
    pub fn extension<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> Result<(Field, Embedding)> {
        if d == 0 {
            return Err(Error::InvalidArgument("extension degree must be positive".into()));
        }
        if d == 1 {
            return Ok((self.clone(), Embedding::identity(self)));
        }
        let n = self.0.k * d;
        let target = Field::new(self.0.p, first_irreducible(self.0.p, n))?;
        let emb = Embedding::new(self, &target, rng)?;
        Ok((target, emb))
    }

    /// Reduces a product vector of length up to `2k-1` modulo the defining polynomial.
    fn reduce(&self, mut prod: Vec<u64>) -> Vec<u64> {
        let k = self.0.k;
        let p = self.0.p;
        let m = &self.0.modulus;
        for i in (k..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..k {
                prod[i - k + j] = sub_mod(prod[i - k + j], mul_mod(c, m[j], p), p);
            }
        }
        prod.truncate(k);
        prod.resize(k, 0);
        prod
    }
}

/// An element of a finite field, always fully reduced.
#[derive(Clone)]
pub struct Fe {
    field: Field,
    c: Vec<u64>,
}

pub type FieldElement = Fe;

impl Fe {
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Residues in the power basis of `w`, little-endian, length `k`.
    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|&x| x == 0)
    }

    /// Whether the element lies in the prime subfield.
    pub fn in_prime_field(&self) -> bool {
        self.c[1..].iter().all(|&x| x == 0)
    }

    /// Index in the canonical enumeration, when it fits in 64 bits.
    pub fn index(&self) -> Option<u64> {
        let p = self.field.0.p;
        let mut acc: u64 = 0;
        for &d in self.c.iter().rev() {
            acc = acc.checked_mul(p)?.checked_add(d)?;
        }
        Some(acc)
    }

    pub fn square(&self) -> Fe {
        self * self
    }

    pub fn double(&self) -> Fe {
        self + self
    }

    pub fn scale_u64(&self, n: u64) -> Fe {
        let p = self.field.0.p;
        let n = n % p;
        Fe { field: self.field.clone(), c: self.c.iter().map(|&x| mul_mod(x, n, p)).collect() }
    }

    pub fn inv(&self) -> Result<Fe> {
        if self.is_zero() {
            return Err(Error::ZeroInversion);
        }
        let p = self.field.0.p;
        if self.field.0.k == 1 {
            let v = inv_mod(self.c[0], p).ok_or(Error::ZeroInversion)?;
            return Ok(Fe { field: self.field.clone(), c: vec![v] });
        }
        // extended Euclid on (modulus, a) over F_p, tracking the cofactor of a
        let mut r0 = self.field.0.modulus.clone();
        let mut r1 = self.c.clone();
        fp::trim(&mut r1);
        let mut t0: Vec<u64> = Vec::new();
        let mut t1: Vec<u64> = vec![1];
        while r1.len() > 1 {
            // divide r0 by r1
            let mut q = vec![0u64; r0.len() - r1.len() + 1];
            let lead_inv = inv_mod(*r1.last().unwrap(), p).unwrap();
            let mut r = r0.clone();
            while r.len() >= r1.len() {
                let shift = r.len() - r1.len();
                let c = mul_mod(*r.last().unwrap(), lead_inv, p);
                q[shift] = c;
                for (i, &x) in r1.iter().enumerate() {
                    r[shift + i] = sub_mod(r[shift + i], mul_mod(c, x, p), p);
                }
                fp::trim(&mut r);
                if r.is_empty() {
                    break;
                }
            }
            // t_new = t0 - q t1
            let mut qt = vec![0u64; q.len() + t1.len().max(1) - 1];
            for (i, &a) in q.iter().enumerate() {
                for (j, &b) in t1.iter().enumerate() {
                    qt[i + j] = add_mod(qt[i + j], mul_mod(a, b, p), p);
                }
            }
            let len = qt.len().max(t0.len());
            let mut tn = vec![0u64; len];
            for (i, slot) in tn.iter_mut().enumerate() {
                let a = t0.get(i).copied().unwrap_or(0);
                let b = qt.get(i).copied().unwrap_or(0);
                *slot = sub_mod(a, b, p);
            }
            fp::trim(&mut tn);
            r0 = std::mem::replace(&mut r1, r);
            t0 = std::mem::replace(&mut t1, tn);
        }
        // r1 is a nonzero constant since the modulus is irreducible
        let c_inv = inv_mod(r1[0], p).ok_or(Error::ZeroInversion)?;
        let mut out: Vec<u64> = t1.iter().map(|&x| mul_mod(x, c_inv, p)).collect();
        out.resize(self.field.0.k, 0);
        Ok(Fe { field: self.field.clone(), c: out })
    }

    pub fn div(&self, other: &Fe) -> Result<Fe> {
        Ok(self * &other.inv()?)
    }

    pub fn pow_u64(&self, mut e: u64) -> Fe {
        let mut result = self.field.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = base.square();
            e >>= 1;
        }
        result
    }

    pub fn pow_big(&self, e: &BigUint) -> Fe {
        let mut result = self.field.one();
        for i in (0..e.bits()).rev() {
            result = result.square();
            if e.bit(i) {
                result = &result * self;
            }
        }
        result
    }

    /// `self^n`, negative exponents meaning powers of the inverse.
    pub fn pow(&self, n: i64) -> Result<Fe> {
        if n >= 0 {
            Ok(self.pow_u64(n as u64))
        } else {
            Ok(self.inv()?.pow_u64(n.unsigned_abs()))
        }
    }

    /// `self^(p^i)`.
    pub fn frobenius(&self, i: usize) -> Fe {
        let k = self.field.0.k;
        if k == 1 {
            return self.clone();
        }
        let images = self.field.frobenius_images();
        let p = self.field.0.p;
        let mut cur = self.c.clone();
        for _ in 0..(i % k) {
            let mut acc = vec![0u64; k];
            for (j, &a) in cur.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (t, &b) in images[j].iter().enumerate() {
                    acc[t] = add_mod(acc[t], mul_mod(a, b, p), p);
                }
            }
            cur = acc;
        }
        Fe { field: self.field.clone(), c: cur }
    }

    pub fn is_square(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        let half = (self.field.order() - 1u32) >> 1;
        self.pow_big(&half).is_one()
    }

    /// A square root, or `None` for non-squares. Of the two roots the
    /// smaller in canonical order is returned.
    pub fn sqrt(&self) -> Option<Fe> {
        if self.is_zero() {
            return Some(self.clone());
        }
        if !self.is_square() {
            return None;
        }
        let q_minus_1 = self.field.order() - 1u32;
        let s = q_minus_1.trailing_zeros().unwrap_or(0);
        let t = &q_minus_1 >> s;
        let z = self.field.nonresidue();
        let mut m = s;
        let mut c = z.pow_big(&t);
        let mut tt = self.pow_big(&t);
        let mut r = self.pow_big(&((&t + 1u32) >> 1));
        while !tt.is_one() {
            let mut i = 0;
            let mut probe = tt.clone();
            while !probe.is_one() {
                probe = probe.square();
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = b.square();
            }
            m = i;
            c = b.square();
            tt = &tt * &c;
            r = &r * &b;
        }
        let neg = -&r;
        Some(if neg < r { neg } else { r })
    }

    /// Canonical text encoding: a bare decimal in a prime field, else `[c0,c1,...]`.
    pub fn encode(&self) -> String {
        if self.field.0.k == 1 {
            self.c[0].to_string()
        } else {
            let parts: Vec<String> = self.c.iter().map(|c| c.to_string()).collect();
            format!("[{}]", parts.join(","))
        }
    }

    fn assert_same_field(&self, other: &Fe) {
        assert!(self.field == other.field, "field mismatch: {} vs {}", self.field, other.field);
    }
}

impl PartialEq for Fe {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c && self.field == other.field
    }
}

impl Eq for Fe {}

impl Hash for Fe {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.c.hash(state);
    }
}

/// Canonical order: numeric value of `c0 + c1 p + ...`.
impl Ord for Fe {
    fn cmp(&self, other: &Self) -> Ordering {
        self.c.len().cmp(&other.c.len()).then_with(|| self.c.iter().rev().cmp(other.c.iter().rev()))
    }
}

impl PartialOrd for Fe {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

impl<'a> Add<&'a Fe> for &'a Fe {
    type Output = Fe;
    fn add(self, rhs: &Fe) -> Fe {
        self.assert_same_field(rhs);
        let p = self.field.0.p;
        let c = self.c.iter().zip(&rhs.c).map(|(&a, &b)| add_mod(a, b, p)).collect();
        Fe { field: self.field.clone(), c }
    }
}

impl<'a> Sub<&'a Fe> for &'a Fe {
    type Output = Fe;
    fn sub(self, rhs: &Fe) -> Fe {
        self.assert_same_field(rhs);
        let p = self.field.0.p;
        let c = self.c.iter().zip(&rhs.c).map(|(&a, &b)| sub_mod(a, b, p)).collect();
        Fe { field: self.field.clone(), c }
    }
}

impl<'a> Mul<&'a Fe> for &'a Fe {
    type Output = Fe;
    fn mul(self, rhs: &Fe) -> Fe {
        self.assert_same_field(rhs);
        let d = &self.field.0;
        let p = d.p;
        if d.k == 1 {
            return Fe { field: self.field.clone(), c: vec![mul_mod(self.c[0], rhs.c[0], p)] };
        }
        let k = d.k;
        let mut prod = vec![0u64; 2 * k - 1];
        if p < (1 << 32) {
            // products fit in 64 bits; accumulate each output coefficient in u128
            for (t, slot) in prod.iter_mut().enumerate() {
                let lo = t.saturating_sub(k - 1);
                let hi = t.min(k - 1);
                let mut acc: u128 = 0;
                for i in lo..=hi {
                    acc += (self.c[i] * rhs.c[t - i]) as u128;
                }
                *slot = (acc % p as u128) as u64;
            }
        } else {
            for i in 0..k {
                for j in 0..k {
                    prod[i + j] = add_mod(prod[i + j], mul_mod(self.c[i], rhs.c[j], p), p);
                }
            }
        }
        Fe { field: self.field.clone(), c: self.field.reduce(prod) }
    }
}

impl Neg for &Fe {
    type Output = Fe;
    fn neg(self) -> Fe {
        let p = self.field.0.p;
        let c = self.c.iter().map(|&a| if a == 0 { 0 } else { p - a }).collect();
        Fe { field: self.field.clone(), c }
    }
}

impl Neg for Fe {
    type Output = Fe;
    fn neg(self) -> Fe {
        -&self
    }
}

macro_rules! forward_owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Fe> for Fe {
            type Output = Fe;
            fn $m(self, rhs: Fe) -> Fe { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a Fe> for Fe {
            type Output = Fe;
            fn $m(self, rhs: &Fe) -> Fe { (&self).$m(rhs) }
        }
        impl<'a> $tr<Fe> for &'a Fe {
            type Output = Fe;
            fn $m(self, rhs: Fe) -> Fe { self.$m(&rhs) }
        }
    )*};
}

forward_owned_ops!(Add add, Sub sub, Mul mul);

impl AddAssign<&Fe> for Fe {
    fn add_assign(&mut self, rhs: &Fe) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Fe> for Fe {
    fn sub_assign(&mut self, rhs: &Fe) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Fe> for Fe {
    fn mul_assign(&mut self, rhs: &Fe) {
        *self = &*self * rhs;
    }
}

/// Solves `sum_i x_i * columns[i] = rhs` over `F_p` for residue vectors.
fn solve_mod_p(columns: &[Vec<u64>], rhs: &[u64], p: u64) -> Option<Vec<u64>> {
    let n = rhs.len();
    let k = columns.len();
    let mut rows: Vec<Vec<u64>> = (0..n)
        .map(|r| {
            let mut row: Vec<u64> = columns.iter().map(|c| c[r]).collect();
            row.push(rhs[r]);
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..k {
        let Some(pr) = (row..n).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(row, pr);
        let inv = inv_mod(rows[row][col], p).unwrap();
        for x in rows[row].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        for r in 0..n {
            if r != row && rows[r][col] != 0 {
                let f = rows[r][col];
                for c in 0..=k {
                    let v = mul_mod(f, rows[row][c], p);
                    rows[r][c] = sub_mod(rows[r][c], v, p);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if rows[row..].iter().any(|r| r[k] != 0) {
        return None;
    }
    let mut x = vec![0u64; k];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = rows[i][k];
    }
    Some(x)
}

/// A field homomorphism `F_{p^a} -> F_{p^b}` fixed by the image of the generator.
#[derive(Clone, Debug)]
pub struct Embedding {
    source: Field,
    target: Field,
    /// Images of `1, w, w^2, ...` in the target.
    basis_images: Vec<Fe>,
}

impl Embedding {
    pub fn identity(field: &Field) -> Embedding {
        let basis_images = (0..field.degree())
            .map(|i| {
                let mut c = vec![0; field.degree()];
                c[i] = 1;
                Fe { field: field.clone(), c }
            })
            .collect();
        Embedding { source: field.clone(), target: field.clone(), basis_images }
    }

    /// Embedding determined by sending `w` to `image`, which must be a root of the source modulus.
    pub fn from_generator_image(source: &Field, image: Fe) -> Result<Embedding> {
        let target = image.field().clone();
        if source.characteristic() != target.characteristic() {
            return Err(Error::NoEmbedding);
        }
        let k = source.degree();
        if k == 1 {
            return Ok(Embedding {
                source: source.clone(),
                target: target.clone(),
                basis_images: vec![target.one()],
            });
        }
        let mut basis_images = Vec::with_capacity(k);
        let mut cur = target.one();
        for _ in 0..k {
            basis_images.push(cur.clone());
            cur = &cur * &image;
        }
        // cur = image^k; check the modulus relation
        let mut acc = cur;
        for (i, &m) in source.modulus()[..k].iter().enumerate() {
            acc = &acc + &basis_images[i].scale_u64(m);
        }
        if !acc.is_zero() {
            return Err(Error::NoEmbedding);
        }
        Ok(Embedding { source: source.clone(), target, basis_images })
    }

    /// All embeddings of `source` into `target`, ordered by the canonical order of the generator image.
    pub fn all<R: Rng + ?Sized>(source: &Field, target: &Field, rng: &mut R) -> Result<Vec<Embedding>> {
        if source.characteristic() != target.characteristic()
            || !target.degree().is_multiple_of(source.degree())
        {
            return Err(Error::NoEmbedding);
        }
        if source.degree() == 1 {
            return Ok(vec![Self::from_generator_image(source, target.zero())?]);
        }
        let coeffs: Vec<Fe> = source.modulus().iter().map(|&c| target.from_u64(c)).collect();
        let modulus = Poly::from_coeffs(target, coeffs);
        let roots = modulus.roots_in_field(rng);
        roots.into_iter().map(|(r, _)| Self::from_generator_image(source, r)).collect()
    }

    pub fn new<R: Rng + ?Sized>(source: &Field, target: &Field, rng: &mut R) -> Result<Embedding> {
        if source == target {
            return Ok(Self::identity(source));
        }
        Self::all(source, target, rng)?.into_iter().next().ok_or(Error::NoEmbedding)
    }

    pub fn source(&self) -> &Field {
        &self.source
    }

    pub fn target(&self) -> &Field {
        &self.target
    }

    pub fn generator_image(&self) -> Fe {
        if self.source.degree() == 1 {
            self.target.zero()
        } else {
            self.basis_images[1].clone()
        }
    }

    pub fn map(&self, a: &Fe) -> Fe {
        assert!(a.field() == &self.source, "embedding applied to foreign element");
        let p = self.target.characteristic();
        let mut c = vec![0u64; self.target.degree()];
        for (i, &ai) in a.c.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (t, &b) in self.basis_images[i].c.iter().enumerate() {
                c[t] = add_mod(c[t], mul_mod(ai, b, p), p);
            }
        }
        Fe { field: self.target.clone(), c }
    }

    /// The source element mapping to `b`, if `b` lies in the image.
    pub fn preimage(&self, b: &Fe) -> Option<Fe> {
        assert!(b.field() == &self.target, "preimage of foreign element");
        let columns: Vec<Vec<u64>> = self.basis_images.iter().map(|e| e.c.clone()).collect();
        let x = solve_mod_p(&columns, &b.c, self.target.characteristic())?;
        Some(Fe { field: self.source.clone(), c: x })
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Embedding) -> Result<Embedding> {
        if next.source != self.target {
            return Err(Error::FieldMismatch);
        }
        let image = next.map(&self.generator_image());
        Self::from_generator_image(&self.source, image)
    }
}

impl PartialEq for Embedding {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.basis_images == other.basis_images
    }
}

/// Binomial coefficient `C(n, k)` reduced into `field`.
pub fn binomial_in(field: &Field, n: u64, k: u64) -> Fe {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= n - i;
        den *= i + 1;
    }
    let value = num / den;
    field.from_bigint(&BigInt::from(value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f137_2() -> Field {
        Field::parse("137^2:3,131,1").unwrap()
    }

    #[test]
    fn inverse_prime_field() {
        let f = Field::prime(137).unwrap();
        assert_eq!(f.from_u64(125).inv().unwrap(), f.from_u64(57));
        assert_eq!(f.one().inv().unwrap(), f.one());
        assert_eq!(f.zero().inv(), Err(Error::ZeroInversion));
    }

    #[test]
    fn inverse_extension_generator() {
        let f = f137_2();
        let w = f.generator();
        assert!((&w.inv().unwrap() * &w).is_one());
    }

    #[test]
    fn generator_square_reduces_by_modulus() {
        let f = f137_2();
        let w = f.generator();
        assert_eq!(w.square(), f.from_coeffs(&[134, 6]).unwrap());
    }

    #[test]
    fn powers() {
        let f = Field::prime(137).unwrap();
        assert!(f.from_u64(3).pow(136).unwrap().is_one());
        assert!(f.from_u64(5).pow(0).unwrap().is_one());
        assert_eq!(f.zero().pow(-1), Err(Error::ZeroInversion));
        let a = f.from_u64(7);
        assert_eq!(a.pow(-2).unwrap(), a.square().inv().unwrap());
        let g = f137_2();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let a = g.random(&mut rng);
            assert_eq!(a.pow_big(&g.order()), a);
        }
    }

    #[test]
    fn frobenius_behaviour() {
        let f = f137_2();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let a = f.random(&mut rng);
            assert_eq!(a.frobenius(0), a);
            assert_eq!(a.frobenius(1).frobenius(1), a);
            assert_eq!(a.frobenius(1), a.pow_u64(137));
        }
        let c = f.from_u64(55);
        assert_eq!(c.frobenius(1), c);
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(Field::prime(3).is_err());
        assert!(Field::prime(91).is_err());
        // x^2 - 1 is reducible
        assert!(Field::new(137, vec![136, 0, 1]).is_err());
        assert!(Field::new(137, vec![3, 131, 2]).is_err());
    }

    #[test]
    fn parse_forms() {
        let f = f137_2();
        let a = f.parse_element("134w+93").unwrap();
        assert_eq!(a.coeffs(), &[93, 134]);
        assert_eq!(f.parse_element("[93,134]").unwrap(), a);
        assert_eq!(f.parse_element("134*w + 93").unwrap(), a);
        assert_eq!(f.parse_element("-1").unwrap(), f.from_u64(136));
        assert_eq!(f.parse_element("w^2").unwrap(), f.from_coeffs(&[134, 6]).unwrap());
        assert!(f.parse_element("[1,2,3]").is_err());
        assert_eq!(Field::parse("137").unwrap().parse_element("22").unwrap().encode(), "22");
        assert_eq!(f.spec(), "137^2:3,131,1");
        assert_eq!(Field::parse(&f.spec()).unwrap(), f);
    }

    #[test]
    fn sqrt_roundtrip() {
        let f = f137_2();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = f.random(&mut rng);
            let s = a.square();
            let r = s.sqrt().unwrap();
            assert_eq!(r.square(), s);
        }
        let p = Field::prime(137).unwrap();
        // -1 is a square mod 137 since 137 = 1 mod 4
        assert_eq!(p.from_i64(-1).sqrt().unwrap(), p.from_u64(37));
    }

    #[test]
    fn embedding_and_descent() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let k = f137_2();
        let (l, emb) = k.extension(3, &mut rng).unwrap();
        assert_eq!(l.degree(), 6);
        for _ in 0..10 {
            let a = k.random(&mut rng);
            let b = k.random(&mut rng);
            assert_eq!(emb.map(&(&a * &b)), &emb.map(&a) * &emb.map(&b));
            assert_eq!(emb.preimage(&emb.map(&a)).unwrap(), a);
        }
        // an element of degree 3 over k has no preimage
        let t = l.generator();
        assert!(emb.preimage(&t).is_none() || t.frobenius(2) == t);
    }

    #[test]
    fn canonical_order_and_index() {
        let f = f137_2();
        for i in [0u64, 1, 136, 137, 500, 18768] {
            assert_eq!(f.element_from_index(i).index(), Some(i));
        }
        assert!(f.element_from_index(5) < f.element_from_index(137));
    }
}
