//! Classical modular polynomials Φ_ℓ: the shipped database, validation, and
//! evaluation of iterated partial derivatives over finite fields.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fields::{Fe, Field};
use crate::poly::Poly;

pub const SUPPORTED_ELLS: [u64; 6] = [2, 3, 5, 7, 11, 13];

const BUILTIN: [(u64, &str); 6] = [
    (2, include_str!("../data/modpoly/phi_2.txt")),
    (3, include_str!("../data/modpoly/phi_3.txt")),
    (5, include_str!("../data/modpoly/phi_5.txt")),
    (7, include_str!("../data/modpoly/phi_7.txt")),
    (11, include_str!("../data/modpoly/phi_11.txt")),
    (13, include_str!("../data/modpoly/phi_13.txt")),
];

/// Exact integer coefficients of Φ_ℓ, stored for `u >= v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularPolyTable {
    ell: u64,
    entries: BTreeMap<(u32, u32), BigInt>,
}

/// Outcome of one structural check on a table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
}

impl ModularPolyTable {
    /// Parses a table without validating it.
    pub fn parse(text: &str) -> Result<ModularPolyTable> {
        let perr = |line: usize, message: &str| Error::Parse { line, message: message.to_string() };
        if text.is_empty() {
            return Err(perr(1, "empty file"));
        }
        if !text.ends_with('\n') {
            return Err(perr(text.lines().count().max(1), "missing trailing newline"));
        }
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| perr(1, "missing header"))?;
        let ell: u64 = header
            .strip_prefix("modpoly ell=")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| perr(1, "expected header `modpoly ell=<prime>`"))?;
        if ell < 2 || !crate::fields::is_prime(ell) {
            return Err(perr(1, "ell must be prime"));
        }
        let mut entries: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
        let mut mirrored: Vec<((u32, u32), BigInt, usize)> = Vec::new();
        for (i, line) in lines {
            let lineno = i + 1;
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(perr(lineno, "expected `<u> <v> <coefficient>`"));
            }
            let u: u32 = parts[0].parse().map_err(|_| perr(lineno, "bad exponent u"))?;
            let v: u32 = parts[1].parse().map_err(|_| perr(lineno, "bad exponent v"))?;
            let c: BigInt = parts[2].parse().map_err(|_| perr(lineno, "bad coefficient"))?;
            if c.is_zero() {
                return Err(perr(lineno, "zero coefficients must be omitted"));
            }
            if u < v {
                mirrored.push(((v, u), c, lineno));
                continue;
            }
            if entries.insert((u, v), c).is_some() {
                return Err(perr(lineno, "duplicate monomial"));
            }
        }
        let mut table = ModularPolyTable { ell, entries };
        for (key, c, lineno) in mirrored {
            match table.entries.get(&key) {
                Some(existing) if *existing == c => {}
                Some(_) => return Err(Error::Validation(format!("symmetry: line {lineno} disagrees with its mirror"))),
                None => {
                    table.entries.insert(key, c);
                }
            }
        }
        Ok(table)
    }

    /// Parses and validates; `ell` must match the header.
    pub fn load_table(ell: u64, text: &str) -> Result<ModularPolyTable> {
        let table = Self::parse(text)?;
        if table.ell != ell {
            return Err(Error::Validation(format!("header declares ell={} but {} was requested", table.ell, ell)));
        }
        table.validate()?;
        Ok(table)
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// Stored entries, keyed by `(u, v)` with `u >= v`.
    pub fn entries(&self) -> &BTreeMap<(u32, u32), BigInt> {
        &self.entries
    }

    /// Coefficient of `X^u Y^v`.
    pub fn coefficient(&self, u: u32, v: u32) -> BigInt {
        let key = if u >= v { (u, v) } else { (v, u) };
        self.entries.get(&key).cloned().unwrap_or_default()
    }

    pub fn checks(&self) -> Vec<CheckResult> {
        vec![
            CheckResult { name: "symmetry", passed: self.check_symmetry() },
            CheckResult { name: "degree", passed: self.check_degree() },
            CheckResult { name: "kronecker", passed: self.check_kronecker() },
        ]
    }

    pub fn validate(&self) -> Result<()> {
        match self.checks().into_iter().find(|c| !c.passed) {
            Some(c) => Err(Error::Validation(format!("{} check failed for ell={}", c.name, self.ell))),
            None => Ok(()),
        }
    }

    fn check_symmetry(&self) -> bool {
        self.entries.keys().all(|&(u, v)| u >= v)
    }

    fn check_degree(&self) -> bool {
        let top = self.ell as u32 + 1;
        self.entries.keys().all(|&(u, _)| u <= top) && self.coefficient(top, 0) == BigInt::from(1)
    }

    fn check_kronecker(&self) -> bool {
        let l = self.ell as u32;
        let modulus = BigInt::from(self.ell);
        let expected = |u: u32, v: u32| -> i64 {
            match (u, v) {
                (a, 0) if a == l + 1 => 1,
                (a, b) if a == l && b == l => -1,
                (1, 1) => -1,
                _ => 0,
            }
        };
        let keys = [(l + 1, 0), (l, l), (1, 1)];
        let mut all_keys: Vec<(u32, u32)> = self.entries.keys().copied().collect();
        all_keys.extend(keys);
        all_keys.into_iter().all(|(u, v)| {
            let diff = self.coefficient(u, v) - BigInt::from(expected(u, v));
            (diff % &modulus).is_zero()
        })
    }

    /// Serializes in the data file format.
    pub fn to_text(&self) -> String {
        let mut out = format!("modpoly ell={}\n", self.ell);
        for ((u, v), c) in self.entries.iter().rev() {
            out.push_str(&format!("{u} {v} {c}\n"));
        }
        out
    }

    /// Largest coefficient size in bits.
    pub fn max_coefficient_bits(&self) -> u64 {
        self.entries.values().map(|c| c.abs().bits()).max().unwrap_or(0)
    }

    /// Reduces all coefficients into `field`.
    pub fn reduce(&self, field: &Field) -> ReducedModularPoly {
        let n = self.ell as usize + 2;
        let mut c = vec![vec![field.zero(); n]; n];
        for (&(u, v), coef) in &self.entries {
            let x = field.from_bigint(coef);
            c[u as usize][v as usize] = x.clone();
            c[v as usize][u as usize] = x;
        }
        ReducedModularPoly { field: field.clone(), ell: self.ell, c }
    }
}

/// A collection of validated tables keyed by ℓ.
#[derive(Clone, Debug)]
pub struct ModularPolyDatabase {
    tables: BTreeMap<u64, Arc<ModularPolyTable>>,
}

impl ModularPolyDatabase {
    /// The tables compiled into the library.
    pub fn builtin() -> ModularPolyDatabase {
        let tables = SUPPORTED_ELLS.iter().map(|&ell| (ell, builtin_table(ell).unwrap())).collect();
        ModularPolyDatabase { tables }
    }

    /// Loads every `phi_<ell>.txt` present in `dir`.
    pub fn from_dir(dir: &Path) -> Result<ModularPolyDatabase> {
        let mut tables = BTreeMap::new();
        for &ell in &SUPPORTED_ELLS {
            let path = dir.join(format!("phi_{ell}.txt"));
            if !path.exists() {
                continue;
            }
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
            tables.insert(ell, Arc::new(ModularPolyTable::load_table(ell, &text)?));
        }
        Ok(ModularPolyDatabase { tables })
    }

    /// Honours `MODPOLY_DB_DIR`, falling back to the builtin tables.
    pub fn from_env() -> Result<ModularPolyDatabase> {
        match std::env::var_os("MODPOLY_DB_DIR") {
            Some(dir) => Self::from_dir(Path::new(&dir)),
            None => Ok(Self::builtin()),
        }
    }

    pub fn get(&self, ell: u64) -> Result<Arc<ModularPolyTable>> {
        self.tables.get(&ell).cloned().ok_or(Error::UnsupportedEll(ell))
    }

    pub fn ells(&self) -> Vec<u64> {
        self.tables.keys().copied().collect()
    }
}

/// The builtin table for `ell`, parsed and validated once per process.
pub fn builtin_table(ell: u64) -> Result<Arc<ModularPolyTable>> {
    static CACHE: OnceLock<BTreeMap<u64, Arc<ModularPolyTable>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| {
        BUILTIN
            .iter()
            .map(|&(l, text)| (l, Arc::new(ModularPolyTable::load_table(l, text).expect("builtin table is valid"))))
            .collect()
    });
    cache.get(&ell).cloned().ok_or(Error::UnsupportedEll(ell))
}

/// Raw text of a builtin table.
pub fn builtin_text(ell: u64) -> Option<&'static str> {
    BUILTIN.iter().find(|(l, _)| *l == ell).map(|(_, t)| *t)
}

/// Φ_ℓ with coefficients reduced into a finite field.
#[derive(Clone, Debug)]
pub struct ReducedModularPoly {
    field: Field,
    ell: u64,
    /// Dense `(ℓ+2) x (ℓ+2)` matrix, `c[u][v]` the coefficient of `X^u Y^v`.
    c: Vec<Vec<Fe>>,
}

impl ReducedModularPoly {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn eval(&self, j1: &Fe, j2: &Fe) -> Fe {
        self.partial_eval(0, 0, j1, j2)
    }

    /// Iterated formal partial `∂^(u+v) Φ / ∂X^u ∂Y^v` at `(j1, j2)`.
    pub fn partial_eval(&self, u: usize, v: usize, j1: &Fe, j2: &Fe) -> Fe {
        let n = self.c.len();
        let mut acc = self.field.zero();
        if u >= n || v >= n {
            return acc;
        }
        let p1 = powers(j1, n);
        let p2 = powers(j2, n);
        for a in u..n {
            let fa = falling(a, u, &self.field);
            if fa.is_zero() {
                continue;
            }
            let mut row = self.field.zero();
            for b in v..n {
                if self.c[a][b].is_zero() {
                    continue;
                }
                let t = &(&self.c[a][b] * &falling(b, v, &self.field)) * &p2[b - v];
                row += &t;
            }
            acc += &(&(&row * &fa) * &p1[a - u]);
        }
        acc
    }

    /// All partials of total order at most `order`.
    pub fn partials_up_to(&self, order: usize, j1: &Fe, j2: &Fe) -> BTreeMap<(usize, usize), Fe> {
        let mut out = BTreeMap::new();
        for total in 0..=order {
            for u in 0..=total {
                out.insert((u, total - u), self.partial_eval(u, total - u, j1, j2));
            }
        }
        out
    }

    /// `φ(Y) = Φ(j1, Y)`.
    pub fn instantiate_y(&self, j1: &Fe) -> Poly {
        let n = self.c.len();
        let p1 = powers(j1, n);
        let coeffs = (0..n)
            .map(|b| {
                let mut acc = self.field.zero();
                for (a, pa) in p1.iter().enumerate() {
                    acc += &(&self.c[a][b] * pa);
                }
                acc
            })
            .collect();
        Poly::from_coeffs(&self.field, coeffs)
    }

    /// Multiplicity of `(j1, j2)` on Y₀(ℓ), with the vanishing pattern of the partials verified.
    pub fn multiplicity_of_point(&self, j1: &Fe, j2: &Fe) -> Result<SingularPointData> {
        check_j(j1)?;
        check_j(j2)?;
        if !self.eval(j1, j2).is_zero() {
            return Err(Error::NotOnCurve);
        }
        let m = self.instantiate_y(j1).root_multiplicity(j2);
        let p = self.field.characteristic();
        if m as u64 >= p {
            return Err(Error::CharacteristicTooSmall(format!("multiplicity {m} is not below p={p}")));
        }
        let partials = self.partials_up_to(m, j1, j2);
        let low_vanish = partials.iter().all(|(&(u, v), x)| u + v >= m || x.is_zero());
        if !low_vanish {
            return Err(Error::InternalInconsistency(format!(
                "a partial of order below {m} is nonzero at ({j1}, {j2})"
            )));
        }
        if partials[&(m, 0)].is_zero() || partials[&(0, m)].is_zero() {
            return Err(Error::InternalInconsistency(format!(
                "pure partials of order {m} vanish at ({j1}, {j2})"
            )));
        }
        Ok(SingularPointData { j1: j1.clone(), j2: j2.clone(), m, partials })
    }
}

/// Rejects j = 0 and j = 1728.
pub fn check_j(j: &Fe) -> Result<()> {
    if j.is_zero() || *j == j.field().from_u64(1728) {
        Err(Error::ForbiddenJInvariant)
    } else {
        Ok(())
    }
}

fn powers(x: &Fe, n: usize) -> Vec<Fe> {
    let mut out = Vec::with_capacity(n);
    let mut cur = x.field().one();
    for _ in 0..n {
        out.push(cur.clone());
        cur = &cur * x;
    }
    out
}

/// `a (a-1) ... (a-k+1)` in the field.
fn falling(a: usize, k: usize, field: &Field) -> Fe {
    let mut acc = field.one();
    for i in 0..k {
        acc = acc.scale_u64((a - i) as u64);
    }
    acc
}

/// A point of Y₀(ℓ) with its multiplicity and partials up to that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularPointData {
    pub j1: Fe,
    pub j2: Fe,
    pub m: usize,
    pub partials: BTreeMap<(usize, usize), Fe>,
}

impl SingularPointData {
    pub fn partial(&self, u: usize, v: usize) -> Option<&Fe> {
        self.partials.get(&(u, v))
    }

    pub fn to_json(&self) -> Value {
        let partials: serde_json::Map<String, Value> = self
            .partials
            .iter()
            .map(|(&(u, v), x)| (format!("{u},{v}"), Value::String(x.encode())))
            .collect();
        json!({
            "j1": self.j1.encode(),
            "j2": self.j2.encode(),
            "m": self.m,
            "partials": partials,
        })
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn evaluation_is_symmetric(a in 0u64..1009, b in 0u64..1009, u in 0usize..4, v in 0usize..4, ell_idx in 0usize..4) {
            let f = Field::prime(1009).unwrap();
            let r = builtin_table(SUPPORTED_ELLS[ell_idx]).unwrap().reduce(&f);
            let (x, y) = (f.from_u64(a), f.from_u64(b));
            prop_assert_eq!(r.partial_eval(u, v, &x, &y), r.partial_eval(v, u, &y, &x));
        }

        #[test]
        fn root_multiplicities_sum_to_degree(a in 2u64..211, ell_idx in 0usize..4) {
            use rand::SeedableRng;
            let ell = SUPPORTED_ELLS[ell_idx];
            let f = Field::prime(211).unwrap();
            let r = builtin_table(ell).unwrap().reduce(&f);
            let phi = r.instantiate_y(&f.from_u64(a));
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a);
            let total: usize = phi.factor(&mut rng).iter().map(|(g, e)| g.degree().unwrap() * e).sum();
            prop_assert_eq!(total as u64, ell + 1);
        }
    }
}
