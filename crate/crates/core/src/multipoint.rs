//! Normalized isogenous models at a point of Y₀(ℓ) of any multiplicity, via
//! the fiber polynomial F_P.

use rand::Rng;
use serde_json::{json, Value};

use crate::curves::CurveModel;
use crate::elkies::{j_prime_of_model, model_from_jtilde_prime, JPrime};
use crate::error::{Error, Result};
use crate::fields::{binomial_in, Embedding, Fe, Field};
use crate::kernelpoly::{kernel_polynomial, kernel_polynomials_all};
use crate::modpoly::{builtin_table, check_j, ModularPolyTable, ReducedModularPoly, SingularPointData};
use crate::poly::Poly;

pub use crate::elkies::root_of_model;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MultipointOptions {
    /// Skip the `p > 4ℓ` gate.
    pub allow_unchecked: bool,
    /// Split quadratic factors of F_P by moving to the quadratic extension.
    pub auto_quadratic: bool,
    /// Attach a kernel polynomial to every model.
    pub with_kernels: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberPolynomial {
    pub point: SingularPointData,
    pub ell: u64,
    pub j1prime: JPrime,
    /// `F_P(t)`, of degree `m`.
    pub poly: Poly,
}

impl FiberPolynomial {
    pub fn m(&self) -> usize {
        self.point.m
    }
}

fn gate(field: &Field, ell: u64, allow_unchecked: bool) -> Result<()> {
    let p = field.characteristic();
    if p == ell {
        return Err(Error::UnsupportedCharacteristic(format!("p = ell = {ell}")));
    }
    if !allow_unchecked && p <= 4 * ell {
        return Err(Error::CharacteristicTooSmall(format!(
            "p={p} does not exceed 4*ell={}; pass the unchecked override to proceed",
            4 * ell
        )));
    }
    Ok(())
}

/// `F_P(t) = Σ_u C(m,u) ℓ^(m-u) (j₁′)^u Φ_{X^u Y^(m-u)}(P) t^(m-u)`.
pub fn fiber_polynomial(
    phi: &ReducedModularPoly,
    j1: &Fe,
    j2: &Fe,
    j1prime: &JPrime,
    allow_unchecked: bool,
) -> Result<FiberPolynomial> {
    let field = phi.field();
    let ell = phi.ell();
    gate(field, ell, allow_unchecked)?;
    let point = phi.multiplicity_of_point(j1, j2)?;
    let m = point.m;
    let mut coeffs = vec![field.zero(); m + 1];
    let ell_fe = field.from_u64(ell);
    for u in 0..=m {
        let c = &(&binomial_in(field, m as u64, u as u64) * &ell_fe.pow_u64((m - u) as u64))
            * &j1prime.value.pow_u64(u as u64);
        coeffs[m - u] = &c * &point.partials[&(u, m - u)];
    }
    let poly = Poly::from_coeffs(field, coeffs);
    if poly.degree() != Some(m) {
        return Err(Error::InternalInconsistency("F_P has degree below the multiplicity".into()));
    }
    Ok(FiberPolynomial { point, ell, j1prime: j1prime.clone(), poly })
}

/// All normalized models found at `(j(E), j2)`, in the working field.
#[derive(Clone, Debug)]
pub struct FiberReport {
    /// Working field: the curve's field, or its quadratic extension after lifting.
    pub field: Field,
    /// From the curve's field into the working field.
    pub embedding: Embedding,
    pub ell: u64,
    pub j1: Fe,
    pub j2: Fe,
    pub m: usize,
    pub j1prime: Fe,
    pub fiber: Poly,
    pub roots: Vec<Fe>,
    pub root_multiplicities: Vec<usize>,
    pub models: Vec<CurveModel>,
    pub unsplit: Vec<Poly>,
    /// One entry per model when requested; `None` marks a model with no
    /// normalized isogeny from E (possible only below the characteristic gate).
    pub kernels: Option<Vec<Option<Poly>>>,
}

impl FiberReport {
    pub fn to_json(&self) -> Value {
        let kernels = self.kernels.as_ref().map(|ks| {
            ks.iter().map(|k| k.as_ref().map_or(Value::Null, Poly::to_json)).collect::<Vec<_>>()
        });
        json!({
            "schema": "v1",
            "field": self.field.spec(),
            "j1": self.j1.encode(),
            "j2": self.j2.encode(),
            "ell": self.ell,
            "m": self.m,
            "j1prime": self.j1prime.encode(),
            "F_P": self.fiber.to_json(),
            "roots": self.roots.iter().map(Fe::encode).collect::<Vec<_>>(),
            "root_multiplicities": self.root_multiplicities,
            "models": self.models.iter().map(|m| json!({"A": m.a().encode(), "B": m.b().encode()})).collect::<Vec<_>>(),
            "unsplit": self.unsplit.iter().map(Poly::to_json).collect::<Vec<_>>(),
            "kernels": kernels,
        })
    }
}

/// Models at `(j(E), j2)` using the builtin Φ_ℓ.
pub fn isogenous_models<R: Rng + ?Sized>(
    e: &CurveModel,
    ell: u64,
    j2: &Fe,
    opts: &MultipointOptions,
    rng: &mut R,
) -> Result<FiberReport> {
    isogenous_models_with(builtin_table(ell)?.as_ref(), e, j2, opts, rng)
}

pub fn isogenous_models_with<R: Rng + ?Sized>(
    table: &ModularPolyTable,
    e: &CurveModel,
    j2: &Fe,
    opts: &MultipointOptions,
    rng: &mut R,
) -> Result<FiberReport> {
    let base = e.field();
    if j2.field() != base {
        return Err(Error::FieldMismatch);
    }
    let ell = table.ell();
    gate(base, ell, opts.allow_unchecked)?;
    let j1 = e.j_invariant();
    check_j(&j1)?;
    check_j(j2)?;
    let phi = table.reduce(base);
    let jp = j_prime_of_model(e)?;
    let fp = fiber_polynomial(&phi, &j1, j2, &jp, opts.allow_unchecked)?;

    let mut factors = fp.poly.factor(rng);
    let mut emb = Embedding::identity(base);
    if opts.auto_quadratic && factors.iter().any(|(g, _)| g.degree() == Some(2)) {
        let (_, up) = base.extension(2, rng)?;
        factors = fp.poly.map(&up).factor(rng);
        emb = up;
    }
    let work = emb.target().clone();

    let mut pairs: Vec<(Fe, usize)> = Vec::new();
    let mut unsplit = Vec::new();
    for (g, mult) in factors {
        if g.degree() == Some(1) {
            pairs.push((-&g.coeff(0), mult));
        } else {
            unsplit.extend(std::iter::repeat_n(g, mult));
        }
    }
    pairs.sort();
    let repeated = pairs.iter().any(|(_, m)| *m > 1) || unsplit.windows(2).any(|w| w[0] == w[1]);
    if repeated && !opts.allow_unchecked {
        return Err(Error::DegenerateFiber);
    }

    let j2w = emb.map(j2);
    let models: Vec<CurveModel> =
        pairs.iter().map(|(r, _)| model_from_jtilde_prime(r, &j2w, ell)).collect::<Result<_>>()?;
    for (i, a) in models.iter().enumerate() {
        if models[..i].contains(a) {
            return Err(Error::InternalInconsistency("two roots of F_P give the same model".into()));
        }
    }

    let kernels = if opts.with_kernels {
        let ew = e.base_change(&emb);
        let small = base.characteristic() <= 4 * ell;
        let mut out = Vec::with_capacity(models.len());
        for model in &models {
            let k = if small {
                kernel_polynomials_all(&ew, model, ell, rng)?.into_iter().next()
            } else {
                Some(kernel_polynomial(&ew, model, ell)?)
            };
            out.push(k);
        }
        Some(out)
    } else {
        None
    };

    Ok(FiberReport {
        field: work,
        ell,
        j1: emb.map(&j1),
        j2: j2w,
        m: fp.m(),
        j1prime: emb.map(&jp.value),
        fiber: fp.poly.map(&emb),
        roots: pairs.iter().map(|(r, _)| r.clone()).collect(),
        root_multiplicities: pairs.iter().map(|(_, m)| *m).collect(),
        models,
        unsplit,
        kernels,
        embedding: emb,
    })
}
