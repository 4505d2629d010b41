//! The nonsingular Elkies step and the correspondence between values of j̃′
//! and normalized codomain models.

use crate::curves::CurveModel;
use crate::error::{Error, Result};
use crate::fields::Fe;
use crate::modpoly::{check_j, ReducedModularPoly};

/// The reduction of j′ attached to a model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JPrime {
    pub value: Fe,
}

/// `j′ = 18 B j / A`.
pub fn j_prime_of_model(e: &CurveModel) -> Result<JPrime> {
    if e.a().is_zero() || e.b().is_zero() {
        return Err(Error::ForbiddenJInvariant);
    }
    let j = e.j_invariant();
    let value = &(&e.b().scale_u64(18) * &j) * &e.a().inv()?;
    Ok(JPrime { value })
}

fn ell_power(j2: &Fe, ell: u64, k: u32) -> Result<Fe> {
    let field = j2.field();
    if field.characteristic() == ell {
        return Err(Error::UnsupportedCharacteristic(format!("p = ell = {ell}")));
    }
    Ok(field.from_u64(ell).pow_u64(k as u64))
}

/// `Ã = -ℓ^4 r^2 / (48 j₂(j₂-1728))`, `B̃ = -ℓ^6 r^3 / (864 j₂^2 (j₂-1728))`.
pub fn model_from_jtilde_prime(r: &Fe, j2: &Fe, ell: u64) -> Result<CurveModel> {
    check_j(j2)?;
    let field = j2.field();
    let shifted = j2 - &field.from_u64(1728);
    let den_a = (&j2.scale_u64(48) * &shifted).inv()?;
    let den_b = (&j2.square() * &shifted).scale_u64(864).inv()?;
    let r2 = r.square();
    let a = -&(&(&ell_power(j2, ell, 4)? * &r2) * &den_a);
    let b = -&(&(&ell_power(j2, ell, 6)? * &(&r2 * r)) * &den_b);
    CurveModel::new(a, b)
}

/// `r̃ = 18 B̃ j₂ / (ℓ^2 Ã)`, inverse of [`model_from_jtilde_prime`].
pub fn root_of_model(et: &CurveModel, j2: &Fe, ell: u64) -> Result<Fe> {
    check_j(j2)?;
    if et.a().is_zero() {
        return Err(Error::ForbiddenJInvariant);
    }
    let den = (&ell_power(j2, ell, 2)? * et.a()).inv()?;
    Ok(&(&et.b().scale_u64(18) * j2) * &den)
}

/// `j̃′ = -j′ Φ_X / (ℓ Φ_Y)` at a nonsingular point.
pub fn elkies_quotient(phi: &ReducedModularPoly, j1: &Fe, j2: &Fe, j1prime: &JPrime) -> Result<Fe> {
    let px = phi.partial_eval(1, 0, j1, j2);
    let py = phi.partial_eval(0, 1, j1, j2);
    if py.is_zero() {
        return Err(Error::SingularPoint);
    }
    let ell = phi.ell();
    let den = (&ell_power(j2, ell, 1)? * &py).inv()?;
    Ok(-&(&(&j1prime.value * &px) * &den))
}

/// Codomain model of the normalized ℓ-isogeny from `e` to j-invariant `j2`,
/// at a point of multiplicity one.
pub fn nonsingular_isogenous_model(phi: &ReducedModularPoly, e: &CurveModel, j2: &Fe) -> Result<CurveModel> {
    if phi.field() != e.field() || j2.field() != e.field() {
        return Err(Error::FieldMismatch);
    }
    let j1 = e.j_invariant();
    check_j(&j1)?;
    check_j(j2)?;
    if !phi.eval(&j1, j2).is_zero() {
        return Err(Error::NotOnCurve);
    }
    let jp = j_prime_of_model(e)?;
    let r = elkies_quotient(phi, &j1, j2, &jp)?;
    model_from_jtilde_prime(&r, j2, phi.ell())
}
