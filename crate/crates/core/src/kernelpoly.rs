//! Kernel polynomials of normalized isogenies from the differential equation
//! `f(x) η′(x)^2 = g(η(x))` solved as a power series, followed by Padé
//! reconstruction of the x-map.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curves::{codomain_from_kernel_polynomial, CurveModel};
use crate::error::{Error, Result};
use crate::fields::Fe;
use crate::oracle::enumerate_codomains;
use crate::poly::{pade, Poly, SeriesPrec};

/// The x-map `η(x) = x + c₀ + c₁/x + c₂/x^2 + ...` of a normalized isogeny,
/// known to a given precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsogenySeries {
    pub prec: SeriesPrec,
    /// `c₀, c₁, ...`; `prec.n() - 1` terms.
    pub eta_coeffs: Vec<Fe>,
}

impl IsogenySeries {
    /// `P(u) = u η(1/u) = 1 + c₀u + c₁u^2 + ...`, a series in `u = 1/x`.
    pub fn p_series(&self) -> Poly {
        let field = self.eta_coeffs.first().map(|c| c.field().clone());
        let Some(field) = field else {
            unreachable!("precision is at least 2 here")
        };
        let mut coeffs = vec![field.one()];
        coeffs.extend(self.eta_coeffs.iter().cloned());
        Poly::from_coeffs(&field, coeffs)
    }
}

fn max_precision(p: u64) -> usize {
    ((p - 1) / 2) as usize
}

/// Solves `(1 + Au^2 + Bu^3) Q^2 = P^3 + Ãu^2 P + B̃u^3` with `Q = P - uP′`,
/// `P(0) = 1`, one coefficient at a time.
pub fn solve_isogeny_ode(e: &CurveModel, et: &CurveModel, ell: u64, prec: SeriesPrec) -> Result<IsogenySeries> {
    let field = e.field();
    if et.field() != field {
        return Err(Error::FieldMismatch);
    }
    let p = field.characteristic();
    let n = prec.n();
    if n < 2 {
        return Err(Error::InvalidArgument("precision must be at least 2".into()));
    }
    if ell > 1 && p <= 4 * ell {
        return Err(Error::CharacteristicTooSmall(format!("need p > 4*ell, got p={p}, ell={ell}")));
    }
    if n > max_precision(p) {
        return Err(Error::CharacteristicTooSmall(format!("precision {n} exceeds (p-1)/2 for p={p}")));
    }
    let (a, b, at, bt) = (e.a(), e.b(), et.a(), et.b());
    let zero = field.zero();
    let mut pc: Vec<Fe> = vec![field.one()];
    let mut qc: Vec<Fe> = vec![field.one()];
    let mut p2: Vec<Fe> = vec![field.one()];
    let mut q2: Vec<Fe> = vec![field.one()];
    let mut p3: Vec<Fe> = vec![field.one()];
    let at_or_zero = |v: &Vec<Fe>, i: isize| if i < 0 { zero.clone() } else { v[i as usize].clone() };
    for k in 1..n {
        // coefficient k of each product with p_k = 0
        let mut p2k = zero.clone();
        let mut q2k = zero.clone();
        for i in 1..k {
            p2k += &(&pc[i] * &pc[k - i]);
            q2k += &(&qc[i] * &qc[k - i]);
        }
        let mut p3k = p2k.clone();
        for j in 1..k {
            p3k += &(&p2[k - j] * &pc[j]);
        }
        let ki = k as isize;
        let mut lhs = q2k.clone();
        lhs += &(a * &at_or_zero(&q2, ki - 2));
        lhs += &(b * &at_or_zero(&q2, ki - 3));
        let mut rhs = p3k.clone();
        rhs += &(at * &at_or_zero(&pc, ki - 2));
        if k == 3 {
            rhs += bt;
        }
        let rest = &lhs - &rhs;
        let pk = &rest * &field.from_u64(2 * k as u64 + 1).inv()?;
        let qk = &pk * &field.from_i64(1 - k as i64);
        p2.push(&p2k + &pk.double());
        q2.push(&q2k + &qk.double());
        p3.push(&p3k + &pk.scale_u64(3));
        pc.push(pk);
        qc.push(qk);
    }
    Ok(IsogenySeries { prec, eta_coeffs: pc[1..].to_vec() })
}

/// Rebuilds the kernel polynomial from the series and checks it against `e` and `et`.
fn reconstruct(e: &CurveModel, et: &CurveModel, ell: u64, series: &IsogenySeries) -> Result<Poly> {
    let l = ell as usize;
    let (_num, den) = pade(&series.p_series(), series.prec, l, l - 1)?;
    let c0 = den.coeff(0).inv().map_err(|_| Error::ReconstructionFailure)?;
    let d = den.scale(&c0).reverse(l);
    let h = d.sqrt()?;
    if h.degree() != Some((l - 1) / 2) {
        return Err(Error::ReconstructionFailure);
    }
    verify_kernel(e, et, ell, &h)?;
    Ok(h)
}

/// Checks that `h` divides ψ_ℓ and that Vélu from `h` gives exactly `et`.
pub fn verify_kernel(e: &CurveModel, et: &CurveModel, ell: u64, h: &Poly) -> Result<()> {
    let psi = if ell == 2 { e.rhs_poly() } else { e.division_polynomial(ell as usize) };
    if !h.divides(&psi) {
        return Err(Error::ReconstructionFailure);
    }
    match codomain_from_kernel_polynomial(e, h) {
        Ok(c) if c == *et => Ok(()),
        _ => Err(Error::ReconstructionFailure),
    }
}

/// Monic kernel polynomial of the normalized ℓ-isogeny `e -> et`.
pub fn kernel_polynomial(e: &CurveModel, et: &CurveModel, ell: u64) -> Result<Poly> {
    if e.field() != et.field() {
        return Err(Error::FieldMismatch);
    }
    let p = e.field().characteristic();
    if p <= 4 * ell {
        return Err(Error::CharacteristicTooSmall(format!("need p > 4*ell, got p={p}, ell={ell}")));
    }
    if ell == 2 {
        return two_isogeny_kernel(e, et);
    }
    let cap = max_precision(p);
    let first = (2 * ell as usize + 2).min(cap);
    let second = (4 * ell as usize).min(cap);
    let mut last = Error::ReconstructionFailure;
    for n in [first, second] {
        if n == second && second <= first {
            break;
        }
        let series = solve_isogeny_ode(e, et, ell, SeriesPrec::new(n)?)?;
        match reconstruct(e, et, ell, &series) {
            Ok(h) => return Ok(h),
            Err(err) => last = err,
        }
    }
    Err(last)
}

fn two_isogeny_kernel(e: &CurveModel, et: &CurveModel) -> Result<Poly> {
    let field = e.field();
    let f = e.rhs_poly();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for (x0, _) in f.roots_in_field(&mut rng) {
        let h = Poly::from_coeffs(field, vec![-&x0, field.one()]);
        if codomain_from_kernel_polynomial(e, &h).ok().as_ref() == Some(et) {
            return Ok(h);
        }
    }
    Err(Error::ReconstructionFailure)
}

/// Every kernel polynomial over the base field of a normalized ℓ-isogeny
/// `e -> et`, found by exhaustive enumeration; valid in any characteristic other than ℓ.
pub fn kernel_polynomials_all<R: Rng + ?Sized>(e: &CurveModel, et: &CurveModel, ell: u64, rng: &mut R) -> Result<Vec<Poly>> {
    if e.field() != et.field() {
        return Err(Error::FieldMismatch);
    }
    let entries = enumerate_codomains(e, ell, rng)?;
    let mut out: Vec<Poly> = entries
        .into_iter()
        .filter(|c| c.rational && c.codomain == *et)
        .map(|c| c.kernel_poly)
        .collect();
    out.sort_by(|a, b| a.canonical_cmp(b));
    Ok(out)
}
