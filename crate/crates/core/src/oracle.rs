//! Brute-force enumeration of every cyclic ℓ-isogeny from a curve, by
//! factoring the division polynomial and applying Vélu over the field of
//! definition of each kernel.

use rand::Rng;
use serde_json::{json, Value};

use crate::curves::{velu_codomain_from_x, CurveModel};
use crate::error::{Error, Result};
use crate::fields::{is_prime, Embedding, Fe, Field};
use crate::modpoly::{builtin_table, ModularPolyTable};
use crate::multipoint::{isogenous_models_with, FiberReport, MultipointOptions};
use crate::poly::Poly;

#[derive(Clone, Debug)]
pub struct IsogenyCatalogEntry {
    /// Over the base field when `rational`, otherwise over `embedding.target()`.
    pub kernel_poly: Poly,
    pub codomain: CurveModel,
    pub j_codomain: Fe,
    pub rational: bool,
    /// From the curve's field into the field of `kernel_poly`.
    pub embedding: Embedding,
}

impl IsogenyCatalogEntry {
    pub fn field(&self) -> &Field {
        self.kernel_poly.field()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "field": self.field().spec(),
            "kernel_poly": self.kernel_poly.to_json(),
            "codomain": {"A": self.codomain.a().encode(), "B": self.codomain.b().encode()},
            "j_codomain": self.j_codomain.encode(),
            "rational": self.rational,
        })
    }
}

/// A field holding a root of the irreducible `g` over `base`, with the root.
fn root_field<R: Rng + ?Sized>(base: &Field, g: &Poly, rng: &mut R) -> Result<(Field, Embedding, Fe)> {
    let d = g.degree().unwrap();
    if d == 1 {
        return Ok((base.clone(), Embedding::identity(base), -&g.monic().coeff(0)));
    }
    if base.degree() == 1 {
        let modulus: Vec<u64> = g.monic().coeffs().iter().map(|c| c.coeffs()[0]).collect();
        let l = Field::new(base.characteristic(), modulus)?;
        let emb = Embedding::new(base, &l, rng)?;
        let x0 = l.generator();
        return Ok((l, emb, x0));
    }
    let (l, emb) = base.extension(d, rng)?;
    let roots = g.map(&emb).roots_in_field(rng);
    let x0 = roots.into_iter().next().map(|(r, _)| r).ok_or_else(|| {
        Error::InternalInconsistency("irreducible factor has no root in its splitting field".into())
    })?;
    Ok((l, emb, x0))
}

fn sorted(mut v: Vec<Fe>) -> Vec<Fe> {
    v.sort();
    v
}

/// All `ℓ + 1` cyclic subgroups of order ℓ with their Vélu codomains, sorted by
/// field degree and kernel encoding.
pub fn enumerate_codomains<R: Rng + ?Sized>(e: &CurveModel, ell: u64, rng: &mut R) -> Result<Vec<IsogenyCatalogEntry>> {
    let base = e.field();
    let p = base.characteristic();
    if !is_prime(ell) {
        return Err(Error::InvalidArgument(format!("ell={ell} is not prime")));
    }
    if p == ell {
        return Err(Error::UnsupportedCharacteristic(format!("p = ell = {ell}")));
    }
    let target = if ell == 2 { e.rhs_poly() } else { e.division_polynomial(ell as usize) };
    let factors = target.factor(rng);
    if factors.iter().any(|(_, m)| *m != 1) {
        return Err(Error::InternalInconsistency("division polynomial is not square-free".into()));
    }
    let factors: Vec<Poly> = factors.into_iter().map(|(g, _)| g).collect();
    let max_degree = 2 * (ell * ell - 1) as usize;
    let mut consumed = vec![false; factors.len()];
    let mut entries = Vec::new();
    for i in 0..factors.len() {
        if consumed[i] {
            continue;
        }
        let g = &factors[i];
        if g.degree().unwrap() > max_degree {
            return Err(Error::BudgetExceeded(format!("torsion field degree {} over the base", g.degree().unwrap())));
        }
        let (l, emb, x0) = root_field(base, g, rng)?;
        let el = e.base_change(&emb);
        let xs: Vec<Fe> = if ell == 2 {
            vec![x0]
        } else {
            (1..=(ell as usize - 1) / 2)
                .map(|k| {
                    el.x_multiple(&x0, k)
                        .ok_or_else(|| Error::InternalInconsistency("torsion point of unexpected order".into()))
                })
                .collect::<Result<_>>()?
        };
        let xs = sorted(xs);
        let mut orbit = vec![xs.clone()];
        if l.degree() > base.degree() {
            loop {
                let next = sorted(orbit.last().unwrap().iter().map(|x| x.frobenius(base.degree())).collect());
                if next == xs {
                    break;
                }
                orbit.push(next);
            }
        }
        for (j, other) in factors.iter().enumerate().skip(i) {
            if consumed[j] {
                continue;
            }
            let mapped = other.map(&emb);
            if orbit.iter().flatten().any(|x| mapped.eval(x).is_zero()) {
                consumed[j] = true;
            }
        }
        let rational = orbit.len() == 1;
        for xs in &orbit {
            let h = Poly::from_roots(&l, xs);
            let cod = velu_codomain_from_x(&el, xs)?;
            let entry = if rational {
                let bad = || Error::InternalInconsistency("Frobenius-stable kernel does not descend".into());
                let kernel_poly = h.descend(&emb).ok_or_else(bad)?;
                let codomain = cod.descend(&emb).ok_or_else(bad)?;
                IsogenyCatalogEntry {
                    j_codomain: codomain.j_invariant(),
                    kernel_poly,
                    codomain,
                    rational: true,
                    embedding: Embedding::identity(base),
                }
            } else {
                IsogenyCatalogEntry {
                    j_codomain: cod.j_invariant(),
                    kernel_poly: h,
                    codomain: cod,
                    rational: false,
                    embedding: emb.clone(),
                }
            };
            entries.push(entry);
        }
    }
    if entries.len() as u64 != ell + 1 {
        return Err(Error::InternalInconsistency(format!(
            "found {} subgroups of order {ell}, expected {}",
            entries.len(),
            ell + 1
        )));
    }
    entries.sort_by(|a, b| {
        (a.field().degree(), a.kernel_poly.encode()).cmp(&(b.field().degree(), b.kernel_poly.encode()))
    });
    Ok(entries)
}

/// Number of cyclic ℓ-isogenies from `e` whose codomain has j-invariant `j2`.
pub fn count_isogenies_to<R: Rng + ?Sized>(e: &CurveModel, ell: u64, j2: &Fe, rng: &mut R) -> Result<usize> {
    if j2.field() != e.field() {
        return Err(Error::FieldMismatch);
    }
    let entries = enumerate_codomains(e, ell, rng)?;
    Ok(entries.iter().filter(|c| c.embedding.map(j2) == c.j_codomain).count())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossCheckStatus {
    SetEqual,
    Mismatch,
    Incomplete,
}

impl CrossCheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CrossCheckStatus::SetEqual => "SET_EQUAL",
            CrossCheckStatus::Mismatch => "MISMATCH",
            CrossCheckStatus::Incomplete => "INCOMPLETE",
        }
    }
}

/// Comparison of the fiber-polynomial models with the oracle's codomains.
#[derive(Clone, Debug)]
pub struct CrossCheckReport {
    pub status: CrossCheckStatus,
    pub report: FiberReport,
    /// Oracle entries whose codomain has j-invariant `j2`.
    pub entries: Vec<IsogenyCatalogEntry>,
    /// For each entry, the index of the model it equals.
    pub matches: Vec<Option<usize>>,
    /// For each entry, whether its kernel equals the kernel attached to the matched model.
    pub kernel_agreement: Vec<bool>,
    pub unmatched_models: Vec<usize>,
}

impl CrossCheckReport {
    pub fn to_json(&self) -> Value {
        json!({
            "schema": "v1",
            "status": self.status.as_str(),
            "models": self.report.to_json(),
            "oracle": self.entries.iter().map(|e| e.to_json()).collect::<Vec<_>>(),
            "matches": self.matches,
            "kernel_agreement": self.kernel_agreement,
            "unmatched_models": self.unmatched_models,
        })
    }
}

/// Pairs of embeddings `W -> M`, `L -> M` that agree on the common base field.
fn common_embeddings<R: Rng + ?Sized>(
    to_w: &Embedding,
    to_l: &Embedding,
    rng: &mut R,
) -> Result<Vec<(Embedding, Embedding)>> {
    let (w, l) = (to_w.target(), to_l.target());
    if l.degree() % w.degree() == 0 {
        let into_l = Embedding::identity(l);
        let out = Embedding::all(w, l, rng)?
            .into_iter()
            .filter(|phi| to_w.then(phi).ok().as_ref() == Some(to_l))
            .map(|phi| (phi, into_l.clone()))
            .collect();
        return Ok(out);
    }
    let base = to_w.source();
    let n = num_integer::lcm(w.degree(), l.degree()) / base.degree();
    let (m, to_m) = base.extension(n, rng)?;
    let compatible = |src: &Embedding, rng: &mut R| -> Result<Vec<Embedding>> {
        Ok(Embedding::all(src.target(), &m, rng)?
            .into_iter()
            .filter(|phi| src.then(phi).ok().as_ref() == Some(&to_m))
            .collect())
    };
    let l_to_m = compatible(to_l, rng)?.into_iter().next().ok_or(Error::NoEmbedding)?;
    Ok(compatible(to_w, rng)?.into_iter().map(|phi| (phi, l_to_m.clone())).collect())
}

/// Runs the fiber-polynomial method (with quadratic lifting and kernels) and
/// the oracle at `(j(e), j2)`, and compares the two.
pub fn cross_check<R: Rng + ?Sized>(
    e: &CurveModel,
    ell: u64,
    j2: &Fe,
    opts: &MultipointOptions,
    rng: &mut R,
) -> Result<CrossCheckReport> {
    cross_check_with(builtin_table(ell)?.as_ref(), e, j2, opts, rng)
}

pub fn cross_check_with<R: Rng + ?Sized>(
    table: &ModularPolyTable,
    e: &CurveModel,
    j2: &Fe,
    opts: &MultipointOptions,
    rng: &mut R,
) -> Result<CrossCheckReport> {
    let ell = table.ell();
    let opts = MultipointOptions { auto_quadratic: true, with_kernels: true, ..opts.clone() };
    let report = isogenous_models_with(table, e, j2, &opts, rng)?;
    let entries: Vec<IsogenyCatalogEntry> = enumerate_codomains(e, ell, rng)?
        .into_iter()
        .filter(|c| c.embedding.map(j2) == c.j_codomain)
        .collect();
    let kernels = report.kernels.clone().unwrap_or_default();
    let mut matches = Vec::with_capacity(entries.len());
    let mut kernel_agreement = Vec::with_capacity(entries.len());
    for entry in &entries {
        let mut best: Option<(usize, bool)> = None;
        for (to_m_w, to_m_l) in common_embeddings(&report.embedding, &entry.embedding, rng)? {
            let cod = entry.codomain.base_change(&to_m_l);
            let Some(i) = report.models.iter().position(|m| m.base_change(&to_m_w) == cod) else { continue };
            let agree = kernels
                .get(i)
                .and_then(|k| k.as_ref())
                .is_some_and(|k| k.map(&to_m_w) == entry.kernel_poly.map(&to_m_l));
            if best.is_none() || (agree && !best.unwrap().1) {
                best = Some((i, agree));
            }
            if agree {
                break;
            }
        }
        matches.push(best.map(|(i, _)| i));
        kernel_agreement.push(best.is_some_and(|(_, a)| a));
    }
    let unmatched_models: Vec<usize> =
        (0..report.models.len()).filter(|i| !matches.contains(&Some(*i))).collect();
    let mut distinct: Vec<usize> = matches.iter().flatten().copied().collect();
    distinct.sort_unstable();
    distinct.dedup();
    let status = if !report.unsplit.is_empty() {
        CrossCheckStatus::Incomplete
    } else if entries.len() == report.models.len()
        && matches.iter().all(Option::is_some)
        && distinct.len() == entries.len()
        && unmatched_models.is_empty()
        && kernel_agreement.iter().all(|&a| a)
    {
        CrossCheckStatus::SetEqual
    } else {
        CrossCheckStatus::Mismatch
    };
    Ok(CrossCheckReport { status, report, entries, matches, kernel_agreement, unmatched_models })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modpoly::check_j;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn k() -> Field {
        Field::parse("137^2:3,131,1").unwrap()
    }

    #[test]
    fn example_catalog() {
        let k = k();
        let e = CurveModel::from_u64(&k, 19, 65).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let entries = enumerate_codomains(&e, 5, &mut rng).unwrap();
        assert_eq!(entries.len(), 6);
        let j22: Vec<&IsogenyCatalogEntry> =
            entries.iter().filter(|c| c.embedding.map(&k.from_u64(22)) == c.j_codomain).collect();
        assert_eq!(j22.len(), 2);
        assert!(j22.iter().all(|c| c.rational));
        let mut models: Vec<String> = j22.iter().map(|c| format!("{:?}", c.codomain)).collect();
        models.sort();
        let m1 = CurveModel::new(k.parse_element("32w+118").unwrap(), k.parse_element("15w+136").unwrap()).unwrap();
        let m2 = CurveModel::new(k.parse_element("105w+36").unwrap(), k.parse_element("122w+89").unwrap()).unwrap();
        let mut expected = vec![format!("{m1:?}"), format!("{m2:?}")];
        expected.sort();
        assert_eq!(models, expected);
        let phi = builtin_table(5).unwrap();
        for c in &entries {
            let red = phi.reduce(c.field());
            assert!(red.eval(&c.embedding.map(&e.j_invariant()), &c.j_codomain).is_zero());
        }
        assert_eq!(count_isogenies_to(&e, 5, &k.from_u64(22), &mut rng).unwrap(), 2);
        assert_eq!(count_isogenies_to(&e, 5, &k.from_u64(23), &mut rng).unwrap(), 0);
    }

    #[test]
    fn catalog_is_seed_independent() {
        let f = Field::prime(211).unwrap();
        let e = CurveModel::from_u64(&f, 3, 7).unwrap();
        let a = enumerate_codomains(&e, 7, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b = enumerate_codomains(&e, 7, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let enc = |v: &[IsogenyCatalogEntry]| v.iter().map(|c| c.to_json()).collect::<Vec<_>>();
        assert_eq!(enc(&a), enc(&b));
    }

    #[test]
    fn every_supported_ell_gives_ell_plus_one_subgroups() {
        let f = Field::prime(1009).unwrap();
        let e = CurveModel::from_u64(&f, 5, 11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for ell in [2u64, 3, 5, 7] {
            let entries = enumerate_codomains(&e, ell, &mut rng).unwrap();
            assert_eq!(entries.len() as u64, ell + 1);
        }
    }

    #[test]
    fn p_equal_ell_is_unsupported() {
        let f = Field::prime(5).unwrap();
        let e = CurveModel::from_u64(&f, 1, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(enumerate_codomains(&e, 5, &mut rng), Err(Error::UnsupportedCharacteristic(_))));
    }

    #[test]
    fn random_nonsingular_pair_counts_one() {
        let f = Field::prime(1009).unwrap();
        let phi = builtin_table(3).unwrap().reduce(&f);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut done = 0;
        while done < 3 {
            let Ok(e) = CurveModel::new(f.random(&mut rng), f.random(&mut rng)) else { continue };
            let j1 = e.j_invariant();
            if check_j(&j1).is_err() {
                continue;
            }
            let roots = phi.instantiate_y(&j1).roots_in_field(&mut rng);
            let Some((j2, _)) = roots.into_iter().find(|(j, m)| *m == 1 && check_j(j).is_ok()) else { continue };
            assert_eq!(count_isogenies_to(&e, 3, &j2, &mut rng).unwrap(), 1);
            done += 1;
        }
    }

    #[test]
    fn example_cross_check_is_set_equal() {
        let k = k();
        let e = CurveModel::from_u64(&k, 19, 65).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = cross_check(&e, 5, &k.from_u64(22), &MultipointOptions::default(), &mut rng).unwrap();
        assert_eq!(r.status, CrossCheckStatus::SetEqual);
        assert_eq!(r.entries.len(), 2);
    }

    #[test]
    fn prime_field_example_cross_check_lifts() {
        let f = Field::prime(137).unwrap();
        let e = CurveModel::from_u64(&f, 19, 65).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let r = cross_check(&e, 5, &f.from_u64(22), &MultipointOptions::default(), &mut rng).unwrap();
        assert_eq!(r.report.field.degree(), 2);
        assert_eq!(r.status, CrossCheckStatus::SetEqual);
    }
}
