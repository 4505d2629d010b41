//! Dense univariate polynomials over a [`Field`], also used as truncated power series.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;
use rand::Rng;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fields::{Embedding, Fe, Field};

/// Truncation order of a power series: the series is known modulo `x^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeriesPrec(usize);

impl SeriesPrec {
    pub fn new(n: usize) -> Result<SeriesPrec> {
        if n == 0 {
            return Err(Error::InvalidArgument("series precision must be at least 1".into()));
        }
        Ok(SeriesPrec(n))
    }

    pub fn n(self) -> usize {
        self.0
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    /// Little-endian, no trailing zeros.
    coeffs: Vec<Fe>,
}

impl Poly {
    pub fn zero(field: &Field) -> Poly {
        Poly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &Field) -> Poly {
        Poly::constant(field.one())
    }

    pub fn x(field: &Field) -> Poly {
        Poly { field: field.clone(), coeffs: vec![field.zero(), field.one()] }
    }

    pub fn constant(c: Fe) -> Poly {
        let field = c.field().clone();
        Poly::from_coeffs(&field, vec![c])
    }

    /// `c * x^n`.
    pub fn monomial(c: Fe, n: usize) -> Poly {
        let field = c.field().clone();
        let mut coeffs = vec![field.zero(); n];
        coeffs.push(c);
        Poly::from_coeffs(&field, coeffs)
    }

    pub fn from_coeffs(field: &Field, mut coeffs: Vec<Fe>) -> Poly {
        debug_assert!(coeffs.iter().all(|c| c.field() == field));
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { field: field.clone(), coeffs }
    }

    pub fn from_u64s(field: &Field, coeffs: &[u64]) -> Poly {
        Poly::from_coeffs(field, coeffs.iter().map(|&c| field.from_u64(c)).collect())
    }

    /// `prod (x - r)`.
    pub fn from_roots(field: &Field, roots: &[Fe]) -> Poly {
        let mut out = Poly::one(field);
        for r in roots {
            out = &out * &Poly::from_coeffs(field, vec![-r, field.one()]);
        }
        out
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn leading(&self) -> Option<&Fe> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn scale(&self, c: &Fe) -> Poly {
        Poly::from_coeffs(&self.field, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiplies by `x^n`.
    pub fn shift(&self, n: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.field.zero(); n];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { field: self.field.clone(), coeffs }
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some(l) if l.is_one() => self.clone(),
            Some(l) => self.scale(&l.inv().expect("nonzero leading coefficient")),
        }
    }

    pub fn derivative(&self) -> Poly {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.scale_u64(i as u64)).collect();
        Poly::from_coeffs(&self.field, coeffs)
    }

    pub fn eval(&self, x: &Fe) -> Fe {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// Keeps the terms of degree below `n`.
    pub fn truncate(&self, n: usize) -> Poly {
        Poly::from_coeffs(&self.field, self.coeffs.iter().take(n).cloned().collect())
    }

    /// `x^(len-1) * self(1/x)` for a polynomial of degree below `len`.
    pub fn reverse(&self, len: usize) -> Poly {
        let coeffs = (0..len).map(|i| self.coeff(len - 1 - i)).collect();
        Poly::from_coeffs(&self.field, coeffs)
    }

    /// Quotient and remainder. Panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let Some(n) = self.degree() else {
            return (Poly::zero(&self.field), Poly::zero(&self.field));
        };
        if n < dd {
            return (Poly::zero(&self.field), self.clone());
        }
        let lead_inv = d.coeffs[dd].inv().expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        let mut q = vec![self.field.zero(); n - dd + 1];
        for i in (dd..=n).rev() {
            if r[i].is_zero() {
                continue;
            }
            let c = &r[i] * &lead_inv;
            let shift = i - dd;
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[shift + j] = &r[shift + j] - &(&c * dj);
            }
            q[shift] = c;
        }
        r.truncate(dd);
        (Poly::from_coeffs(&self.field, q), Poly::from_coeffs(&self.field, r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    /// Exact quotient; `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.rem(self).is_zero()
    }

    pub fn mul_mod(&self, other: &Poly, m: &Poly) -> Poly {
        (self * other).rem(m)
    }

    pub fn pow_mod(&self, e: &BigUint, m: &Poly) -> Poly {
        let base = self.rem(m);
        let mut result = Poly::one(&self.field).rem(m);
        for i in (0..e.bits()).rev() {
            result = result.mul_mod(&result, m);
            if e.bit(i) {
                result = result.mul_mod(&base, m);
            }
        }
        result
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut result = Poly::one(&self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        result
    }

    /// Full composition `self(g(x))`.
    pub fn compose(&self, g: &Poly) -> Poly {
        let mut acc = Poly::zero(&self.field);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * g) + &Poly::constant(c.clone());
        }
        acc
    }

    /// Applies a field embedding to every coefficient.
    pub fn map(&self, emb: &Embedding) -> Poly {
        Poly::from_coeffs(emb.target(), self.coeffs.iter().map(|c| emb.map(c)).collect())
    }

    /// Pulls coefficients back through an embedding, if all lie in its image.
    pub fn descend(&self, emb: &Embedding) -> Option<Poly> {
        let coeffs: Option<Vec<Fe>> = self.coeffs.iter().map(|c| emb.preimage(c)).collect();
        Some(Poly::from_coeffs(emb.source(), coeffs?))
    }

    /// Applies `a -> a^(p^i)` to every coefficient.
    pub fn frobenius(&self, i: usize) -> Poly {
        Poly::from_coeffs(&self.field, self.coeffs.iter().map(|c| c.frobenius(i)).collect())
    }

    /// Number of times `(x - r)` divides `self`.
    pub fn root_multiplicity(&self, r: &Fe) -> usize {
        let mut f = self.clone();
        let mut m = 0;
        while !f.is_zero() {
            let (q, rem) = synthetic_div(&f, r);
            if !rem.is_zero() {
                break;
            }
            f = q;
            m += 1;
        }
        m
    }

    /// Canonical order: by degree, then coefficients from the top down.
    pub fn canonical_cmp(&self, other: &Poly) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }

    /// Text form `c0 + c1*x + c2*x^2`, nonzero terms only, `0` for the zero polynomial.
    pub fn encode(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => c.encode(),
                1 => format!("{}*x", c.encode()),
                _ => format!("{}*x^{}", c.encode(), i),
            })
            .collect();
        terms.join(" + ")
    }

    pub fn parse(field: &Field, s: &str) -> Result<Poly> {
        let bad = |m: &str| Error::InvalidArgument(format!("cannot parse polynomial {s:?}: {m}"));
        let s = s.trim();
        if s == "0" {
            return Ok(Poly::zero(field));
        }
        let mut acc = Poly::zero(field);
        for term in s.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(bad("empty term"));
            }
            let (coef, power) = match term.split_once('*') {
                Some((c, xpart)) => (field.parse_element(c)?, parse_power(xpart).ok_or_else(|| bad("bad power"))?),
                None if term.starts_with('x') => (field.one(), parse_power(term).ok_or_else(|| bad("bad power"))?),
                None => (field.parse_element(term)?, 0),
            };
            acc = &acc + &Poly::monomial(coef, power);
        }
        Ok(acc)
    }

    /// JSON array of coefficient encodings, little-endian.
    pub fn to_json(&self) -> Value {
        Value::Array(self.coeffs.iter().map(|c| Value::String(c.encode())).collect())
    }

    pub fn from_json(field: &Field, v: &Value) -> Result<Poly> {
        let arr = v.as_array().ok_or_else(|| Error::InvalidArgument("polynomial JSON must be an array".into()))?;
        let coeffs: Result<Vec<Fe>> = arr
            .iter()
            .map(|c| match c {
                Value::String(s) => field.parse_element(s),
                Value::Number(n) => field.parse_element(&n.to_string()),
                _ => Err(Error::InvalidArgument("bad coefficient in polynomial JSON".into())),
            })
            .collect();
        Ok(Poly::from_coeffs(field, coeffs?))
    }
}

fn parse_power(xpart: &str) -> Option<usize> {
    let rest = xpart.trim().strip_prefix('x')?;
    if rest.is_empty() {
        Some(1)
    } else {
        rest.strip_prefix('^')?.parse().ok()
    }
}

/// Divides by `(x - r)`, returning quotient and remainder value.
fn synthetic_div(f: &Poly, r: &Fe) -> (Poly, Fe) {
    let n = f.coeffs.len();
    if n == 0 {
        return (f.clone(), f.field.zero());
    }
    let mut q = vec![f.field.zero(); n - 1];
    let mut acc = f.field.zero();
    for i in (0..n).rev() {
        acc = &(&acc * r) + &f.coeffs[i];
        if i > 0 {
            q[i - 1] = acc.clone();
        }
    }
    (Poly::from_coeffs(&f.field, q), acc)
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) + &rhs.coeff(i)).collect();
        Poly::from_coeffs(&self.field, coeffs)
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) - &rhs.coeff(i)).collect();
        Poly::from_coeffs(&self.field, coeffs)
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(&self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Poly::from_coeffs(&self.field, out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_coeffs(&self.field, self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Monic gcd; `gcd(0, 0) = 0`.
pub fn gcd(f: &Poly, g: &Poly) -> Poly {
    let mut a = f.clone();
    let mut b = g.clone();
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r;
    }
    a.monic()
}

/// Monic gcd of two polynomials, not both zero.
pub fn poly_gcd(f: &Poly, g: &Poly) -> Poly {
    gcd(f, g)
}

impl Poly {
    /// `f = g(x^p)` implies `f = h^p` with `h` obtained coefficientwise.
    fn pth_root(&self) -> Poly {
        let p = self.field.characteristic() as usize;
        let k = self.field.degree();
        let coeffs = self
            .coeffs
            .iter()
            .step_by(p)
            .map(|c| c.frobenius(k - 1))
            .collect();
        Poly::from_coeffs(&self.field, coeffs)
    }

    /// Square-free decomposition of a monic polynomial: pairs `(g_i, e_i)` with
    /// pairwise coprime square-free `g_i` and `self = prod g_i^e_i`.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, usize)> {
        let f = self.monic();
        if f.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let p = self.field.characteristic() as usize;
        let fprime = f.derivative();
        let mut out = Vec::new();
        if fprime.is_zero() {
            for (h, e) in f.pth_root().squarefree_decomposition() {
                out.push((h, e * p));
            }
            return out;
        }
        let mut c = gcd(&f, &fprime);
        let mut w = f.exact_div(&c).unwrap();
        let mut i = 1;
        while w.degree().unwrap_or(0) > 0 {
            let y = gcd(&w, &c);
            let z = w.exact_div(&y).unwrap();
            if z.degree().unwrap_or(0) > 0 {
                out.push((z, i));
            }
            i += 1;
            c = c.exact_div(&y).unwrap();
            w = y;
        }
        if c.degree().unwrap_or(0) > 0 {
            for (h, e) in c.pth_root().squarefree_decomposition() {
                out.push((h, e * p));
            }
        }
        out
    }

    /// Distinct-degree factorization of a monic square-free polynomial.
    pub fn distinct_degree_factorization(&self) -> Vec<(usize, Poly)> {
        let q = self.field.order();
        let x = Poly::x(&self.field);
        let mut f = self.monic();
        let mut out = Vec::new();
        let mut h = x.rem(&f);
        let mut d = 0;
        while f.degree().unwrap_or(0) >= 2 * (d + 1) {
            d += 1;
            h = h.pow_mod(&q, &f);
            let g = gcd(&f, &(&h - &x));
            if !g.is_one() {
                f = f.exact_div(&g).unwrap();
                h = h.rem(&f);
                out.push((d, g));
            }
        }
        if f.degree().unwrap_or(0) > 0 {
            out.push((f.degree().unwrap(), f));
        }
        out
    }

    /// Splits a monic square-free product of irreducibles of degree `d` (Cantor-Zassenhaus).
    pub fn equal_degree_split<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> Vec<Poly> {
        let n = self.degree().unwrap_or(0);
        if n == 0 {
            return Vec::new();
        }
        if n == d {
            return vec![self.monic()];
        }
        let e = (self.field.order().pow(d as u32) - 1u32) >> 1;
        loop {
            let coeffs: Vec<Fe> = (0..n).map(|_| self.field.random(rng)).collect();
            let a = Poly::from_coeffs(&self.field, coeffs);
            if a.degree().unwrap_or(0) == 0 {
                continue;
            }
            let b = &a.pow_mod(&e, self) - &Poly::one(&self.field);
            let g = gcd(self, &b);
            let dg = g.degree().unwrap_or(0);
            if dg > 0 && dg < n {
                let other = self.exact_div(&g).unwrap().monic();
                let mut out = g.equal_degree_split(d, rng);
                out.extend(other.equal_degree_split(d, rng));
                return out;
            }
        }
    }

    /// Factorization into monic irreducibles with exponents, in canonical order.
    pub fn factor<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<(Poly, usize)> {
        assert!(!self.is_zero(), "cannot factor the zero polynomial");
        let mut out = Vec::new();
        for (g, e) in self.squarefree_decomposition() {
            for (d, h) in g.distinct_degree_factorization() {
                for irr in h.equal_degree_split(d, rng) {
                    out.push((irr, e));
                }
            }
        }
        out.sort_by(|a, b| a.0.canonical_cmp(&b.0).then(a.1.cmp(&b.1)));
        out
    }

    pub fn is_irreducible(&self) -> bool {
        let Some(n) = self.degree() else { return false };
        if n == 0 {
            return false;
        }
        let sqf = self.squarefree_decomposition();
        if sqf.len() != 1 || sqf[0].1 != 1 {
            return false;
        }
        let ddf = sqf[0].0.distinct_degree_factorization();
        ddf.len() == 1 && ddf[0].0 == n
    }

    /// All roots lying in the coefficient field, with multiplicities, in canonical order.
    pub fn roots_in_field<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<(Fe, usize)> {
        assert!(!self.is_zero(), "the zero polynomial has every element as a root");
        let f = self.monic();
        if f.degree() == Some(0) {
            return Vec::new();
        }
        let x = Poly::x(&self.field);
        let xq = x.pow_mod(&self.field.order(), &f);
        let g = gcd(&f, &(&xq - &x));
        let mut roots: Vec<(Fe, usize)> = g
            .equal_degree_split(1, rng)
            .into_iter()
            .map(|lin| {
                let r = -&lin.coeffs[0];
                let m = f.root_multiplicity(&r);
                (r, m)
            })
            .collect();
        roots.sort();
        roots
    }

    /// Monic `h` with `h^2 = self`, for a monic polynomial of even degree.
    pub fn sqrt(&self) -> Result<Poly> {
        let n = self.degree().ok_or(Error::NotASquare)?;
        if n % 2 == 1 || !self.is_monic() {
            return Err(Error::NotASquare);
        }
        let d = n / 2;
        let two_inv = self.field.from_u64(2).inv()?;
        let mut h = vec![self.field.zero(); d + 1];
        h[d] = self.field.one();
        for i in 1..=d {
            // coefficient of x^(2d-i) in h^2 is 2 h_d h_{d-i} + sum over the interior pairs
            let mut acc = self.coeff(n - i);
            for j in 1..i {
                acc -= &(&h[d - j] * &h[d - i + j]);
            }
            h[d - i] = &acc * &two_inv;
        }
        let h = Poly::from_coeffs(&self.field, h);
        if &(&h * &h) != self {
            return Err(Error::NotASquare);
        }
        Ok(h)
    }
}

/// Padé approximant by the extended Euclidean scheme on `(x^n, series)`.
///
/// Returns `(N, D)` with `D` monic, `deg N <= dn`, `deg D <= dd`, `D(0) != 0`,
/// `gcd(N, D) = 1` and `N = series * D mod x^n`.
pub fn pade(series: &Poly, prec: SeriesPrec, dn: usize, dd: usize) -> Result<(Poly, Poly)> {
    let n = prec.n();
    if dn + dd >= n {
        return Err(Error::InvalidArgument(format!(
            "Padé degrees ({dn},{dd}) need precision above {}",
            dn + dd
        )));
    }
    let field = series.field();
    let mut r0 = Poly::monomial(field.one(), n);
    let mut r1 = series.truncate(n);
    let mut t0 = Poly::zero(field);
    let mut t1 = Poly::one(field);
    while r1.degree().is_some_and(|d| d > dn) {
        let (q, r) = r0.div_rem(&r1);
        let tn = &t0 - &(&q * &t1);
        r0 = std::mem::replace(&mut r1, r);
        t0 = std::mem::replace(&mut t1, tn);
    }
    let (num, den) = (r1, t1);
    if den.degree().is_none_or(|d| d > dd) || den.coeff(0).is_zero() {
        return Err(Error::ReconstructionFailure);
    }
    if !gcd(&num, &den).is_one() {
        return Err(Error::ReconstructionFailure);
    }
    let c = den.leading().unwrap().inv()?;
    let (num, den) = (num.scale(&c), den.scale(&c));
    if !(&num - &mul_trunc(series, &den, n)).truncate(n).is_zero() {
        return Err(Error::ReconstructionFailure);
    }
    Ok((num, den))
}

/// Product truncated modulo `x^n`.
pub fn mul_trunc(a: &Poly, b: &Poly, n: usize) -> Poly {
    let field = a.field();
    let mut out = vec![field.zero(); n];
    for (i, ai) in a.coeffs.iter().enumerate().take(n) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.coeffs.iter().enumerate().take(n - i) {
            out[i + j] += &(ai * bj);
        }
    }
    Poly::from_coeffs(field, out)
}

/// Inverse of a series with unit constant term.
pub fn series_inv(a: &Poly, prec: SeriesPrec) -> Result<Poly> {
    let field = a.field();
    let a0_inv = a.coeff(0).inv().map_err(|_| Error::NonUnitConstantTerm)?;
    let n = prec.n();
    let mut out: Vec<Fe> = Vec::with_capacity(n);
    out.push(a0_inv.clone());
    for i in 1..n {
        let mut acc = field.zero();
        for j in 1..=i {
            acc += &(&a.coeff(j) * &out[i - j]);
        }
        out.push(-&(&acc * &a0_inv));
    }
    Ok(Poly::from_coeffs(field, out))
}

/// Square root of a series whose constant term is a nonzero square.
/// The branch has constant term 1 when `a(0) = 1`, else the smaller root in canonical order.
pub fn series_sqrt(a: &Poly, prec: SeriesPrec) -> Result<Poly> {
    let field = a.field();
    let a0 = a.coeff(0);
    if a0.is_zero() {
        return Err(Error::NonUnitConstantTerm);
    }
    let s0 = if a0.is_one() { field.one() } else { a0.sqrt().ok_or(Error::NonUnitConstantTerm)? };
    let inv2s0 = s0.double().inv()?;
    let n = prec.n();
    let mut s: Vec<Fe> = vec![s0];
    for i in 1..n {
        let mut acc = a.coeff(i);
        for j in 1..i {
            acc -= &(&s[j] * &s[i - j]);
        }
        s.push(&acc * &inv2s0);
    }
    Ok(Poly::from_coeffs(field, s))
}

/// `f(g(x)) mod x^n`.
pub fn series_compose(f: &Poly, g: &Poly, prec: SeriesPrec) -> Poly {
    let n = prec.n();
    let field = f.field();
    let mut acc = Poly::zero(field);
    for c in f.coeffs.iter().rev() {
        acc = &mul_trunc(&acc, g, n) + &Poly::constant(c.clone());
    }
    acc.truncate(n)
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn field() -> Field {
        Field::prime(101).unwrap()
    }

    fn poly(max_deg: usize) -> impl Strategy<Value = Poly> {
        proptest::collection::vec(0u64..101, 0..=max_deg + 1).prop_map(|c| Poly::from_u64s(&field(), &c))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn division_roundtrip(f in poly(8), g in poly(5)) {
            prop_assume!(!g.is_zero());
            let (q, r) = f.div_rem(&g);
            prop_assert_eq!(&(&q * &g) + &r, f);
            prop_assert!(r.degree().is_none_or(|d| d < g.degree().unwrap()));
        }

        #[test]
        fn product_degree(f in poly(6), g in poly(6)) {
            prop_assume!(!f.is_zero() && !g.is_zero());
            prop_assert_eq!((&f * &g).degree(), Some(f.degree().unwrap() + g.degree().unwrap()));
        }

        #[test]
        fn factorization_reassembles(f in poly(7), seed in any::<u64>()) {
            prop_assume!(f.degree().unwrap_or(0) > 0);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fac = f.factor(&mut rng);
            let mut prod = Poly::one(&field());
            for (g, e) in &fac {
                prop_assert!(g.is_monic() && g.is_irreducible());
                prod = &prod * &g.pow(*e as u32);
            }
            prop_assert_eq!(prod, f.monic());
        }

        #[test]
        fn roots_of_product_contain_roots(f in poly(5), g in poly(5), seed in any::<u64>()) {
            prop_assume!(f.degree().unwrap_or(0) > 0 && g.degree().unwrap_or(0) > 0);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rf = f.roots_in_field(&mut rng);
            let rg = g.roots_in_field(&mut rng);
            let rfg = (&f * &g).roots_in_field(&mut rng);
            for (r, m) in &rf {
                let mg = rg.iter().find(|(s, _)| s == r).map_or(0, |(_, m)| *m);
                let mfg = rfg.iter().find(|(s, _)| s == r).map(|(_, m)| *m);
                prop_assert_eq!(mfg, Some(m + mg));
            }
        }

        #[test]
        fn pade_inverts_series_expansion(num in poly(3), den in poly(3)) {
            prop_assume!(!den.is_zero() && !den.coeff(0).is_zero());
            let g = gcd(&num, &den);
            prop_assume!(g.is_one());
            let prec = SeriesPrec::new(8).unwrap();
            let series = mul_trunc(&num, &series_inv(&den, prec).unwrap(), 8);
            let (n, d) = pade(&series, prec, 3, 3).unwrap();
            let c = den.leading().unwrap().inv().unwrap();
            prop_assert_eq!(d, den.scale(&c));
            prop_assert_eq!(n, num.scale(&c));
        }
    }
}
