//! Splitting types of monic polynomials over `Q_p`, tame, degree <= 4.
//!
//! The classifier never factors over `Q_p` directly. It counts roots in
//! the unramified extensions `Q_{p^m}` (exhaustive residue search plus
//! branching Hensel certificates), which pins every unramified factor;
//! whatever degree is left is ramified, and in the tame degree-<= 4 range
//! the only ambiguous leftover is a quartic, separated by the parity of
//! `val Δ` and by root detection in the two ramified quadratic extensions.
//!
//! All decisions are made from exact integers: the input is rescaled to
//! p-integral coefficients, discriminants are computed over `Q`, and
//! cofactors obtained by dividing out certified roots carry their own
//! precision guard.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;

use crate::error::Error;
use crate::fields::descriptor::is_prime;
use crate::fields::ramquad::has_root_ramified_quadratic;
use crate::fields::unram::roots_in_extension;
use crate::fields::{rational_valuation, FqElem, FqField, UnramExt};
use crate::polylab::factor_ff::factor_ff;
use crate::polylab::poly::MonicPoly;
use crate::polylab::resultant::discriminant;
use crate::Result;

/// Invariants of one irreducible factor: ramification index, residue
/// degree, different exponent. Tame throughout, so `d = e - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FactorType {
    pub e: u32,
    pub f: u32,
    pub d: u32,
}

impl FactorType {
    pub fn new(e: u32, f: u32) -> Self {
        FactorType { e, f, d: e - 1 }
    }

    pub fn deg(&self) -> u32 {
        self.e * self.f
    }
}

impl fmt::Display for FactorType {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(w, "(e={},f={},d={})", self.e, self.f, self.d)
    }
}

/// Multiset of factor invariants, canonically sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingType {
    factors: Vec<FactorType>,
}

impl SplittingType {
    fn new(mut factors: Vec<FactorType>) -> Self {
        factors.sort();
        SplittingType { factors }
    }

    pub fn factors(&self) -> &[FactorType] {
        &self.factors
    }

    pub fn total_degree(&self) -> u32 {
        self.factors.iter().map(|t| t.deg()).sum()
    }

    pub fn is_unramified(&self) -> bool {
        self.factors.iter().all(|t| t.e == 1)
    }
}

impl fmt::Display for SplittingType {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(w, " ")?;
            }
            write!(w, "{t}")?;
        }
        Ok(())
    }
}

const ESCALATION_STEPS: u32 = 4;
const GUARD_DIGITS: u32 = 8;

/// Splitting type of a squarefree monic polynomial over `Q_p`, tame range
/// (`p > deg f`, `deg f <= 4`). Precision starts at 24 digits and doubles
/// up to four times if a certificate cannot be produced.
pub fn splitting_type_padic(f: &MonicPoly<BigRational>, p: u64) -> Result<SplittingType> {
    let mut k = 24;
    let mut last = None;
    for _ in 0..=ESCALATION_STEPS {
        match splitting_type_at_precision(f, p, k) {
            Err(Error::PrecisionExhausted { what }) => {
                last = Some(what);
                k *= 2;
            }
            other => return other,
        }
    }
    Err(Error::precision(format!(
        "splitting type unresolved at {} digits: {}",
        k / 2,
        last.unwrap_or_default()
    )))
}

/// One attempt at fixed absolute precision `k`.
pub fn splitting_type_at_precision(
    f: &MonicPoly<BigRational>,
    p: u64,
    k: u32,
) -> Result<SplittingType> {
    let n = f.degree();
    assert!(n >= 1, "positive degree required");
    assert!(is_prime(p), "prime base required");
    if n > 4 {
        return Err(Error::unsupported(format!(
            "splitting detection stops at degree 4, got {n}"
        )));
    }
    if p <= n as u64 {
        return Err(Error::unsupported(format!(
            "potentially wild: p = {p} does not exceed degree {n}"
        )));
    }
    let w = rescale_integral(f, p);
    if n == 1 {
        return Ok(SplittingType::new(vec![FactorType::new(1, 1)]));
    }

    let delta = discriminant(&w)?;
    if delta.is_zero() {
        return Err(Error::singular("vanishing discriminant"));
    }
    let vd = rational_valuation(&delta, p).expect("nonzero") as u32;
    if vd == 0 {
        return Ok(unramified_type_from_residue(&w, p)?);
    }
    if k < 4 * vd + GUARD_DIGITS {
        return Err(Error::precision(format!(
            "val disc = {vd} needs more than {k} digits"
        )));
    }

    let fz = lift_coeffs(&w, p, k)?;
    match n {
        2 => {
            let u = unit_residue(&delta, vd, p);
            Ok(SplittingType::new(classify_quadratic(vd, u, p)))
        }
        3 => classify_cubic(&fz, p, k),
        4 => classify_quartic(&fz, vd, p, k),
        _ => unreachable!(),
    }
}

/// Substitute x -> y / p^t and renormalize monic, with t minimal making
/// every coefficient p-integral. Splitting type is invariant: roots are
/// scaled inside the same extensions.
fn rescale_integral(f: &MonicPoly<BigRational>, p: u64) -> MonicPoly<BigRational> {
    let n = f.degree();
    let mut t: i64 = 0;
    for i in 0..n {
        if let Some(v) = rational_valuation(f.coeff(i), p) {
            if v < 0 {
                let gap = (n - i) as i64;
                t = t.max((-v + gap - 1) / gap);
            }
        }
    }
    if t == 0 {
        return f.clone();
    }
    let pb = BigInt::from(p);
    let coeffs = (0..n)
        .rev()
        .map(|i| {
            let scale = BigRational::from_integer(pb.pow((t as u32) * (n - i) as u32));
            f.coeff(i) * scale
        })
        .collect();
    MonicPoly::new(coeffs, BigRational::one())
}

/// Unit discriminant: the type is the residue factorization, all e = 1.
fn unramified_type_from_residue(w: &MonicPoly<BigRational>, p: u64) -> Result<SplittingType> {
    let field = FqField::new(p, 1)?;
    let coeffs = w
        .coeffs()
        .iter()
        .map(|c| {
            let r = residue_of(c, p);
            FqElem::from_residue(&field, r)
        })
        .collect();
    let fbar = MonicPoly::new(coeffs, FqElem::one(&field));
    let factors = factor_ff(&fbar)
        .into_iter()
        .map(|(h, mult)| {
            debug_assert_eq!(mult, 1);
            FactorType::new(1, h.degree() as u32)
        })
        .collect();
    Ok(SplittingType::new(factors))
}

/// p-integral rational reduced mod p.
fn residue_of(c: &BigRational, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let num = c.numer().mod_floor(&pb);
    let den = c.denom().mod_floor(&pb);
    let den_inv = den.modinv(&pb).expect("denominator coprime to p");
    (num * den_inv).mod_floor(&pb).to_u64().unwrap()
}

/// Monic ascending integer lifts modulo p^k of a p-integral polynomial.
fn lift_coeffs(w: &MonicPoly<BigRational>, p: u64, k: u32) -> Result<Vec<BigInt>> {
    let modulus = BigInt::from(BigUint::from(p).pow(k));
    let n = w.degree();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let c = w.coeff(i);
        let den = c.denom().mod_floor(&modulus);
        let den_inv = den
            .modinv(&modulus)
            .ok_or_else(|| Error::singular("coefficient not p-integral"))?;
        out.push((c.numer().mod_floor(&modulus) * den_inv).mod_floor(&modulus));
    }
    out.push(BigInt::one());
    Ok(out)
}

/// Number of roots in the unramified extension of residue degree m.
fn count_roots(fz: &[BigInt], p: u64, m: u32, k: u32) -> Result<usize> {
    let ext = UnramExt::shared(p, m)?;
    Ok(roots_in_extension(fz, &ext, k)?.len())
}

/// All roots in `Q_p` as integer lifts, plus the cofactor after dividing
/// them out (monic ascending, modulo p^k).
fn strip_rational_roots(fz: &[BigInt], p: u64, k: u32) -> Result<(usize, Vec<BigInt>)> {
    let ext = UnramExt::shared(p, 1)?;
    let roots = roots_in_extension(fz, &ext, k)?;
    let modulus = BigInt::from(BigUint::from(p).pow(k));
    let mut cof = fz.to_vec();
    for r in &roots {
        let lift = BigInt::from(r.coords()[0].clone());
        cof = deflate_int(&cof, &lift, &modulus);
    }
    Ok((roots.len(), cof))
}

/// Synthetic division of a monic ascending polynomial by (x - r), mod m.
fn deflate_int(f: &[BigInt], r: &BigInt, modulus: &BigInt) -> Vec<BigInt> {
    let mut desc: Vec<BigInt> = f.iter().rev().cloned().collect();
    let mut carry = BigInt::zero();
    for c in desc.iter_mut() {
        *c = (&*c + &carry * r).mod_floor(modulus);
        carry = c.clone();
    }
    let rem = desc.pop();
    debug_assert!(rem.is_some());
    desc.reverse();
    desc
}

/// Exact integer discriminant of a monic ascending integer polynomial.
fn int_discriminant(fz: &[BigInt]) -> Result<BigRational> {
    let coeffs = fz[..fz.len() - 1]
        .iter()
        .rev()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    discriminant(&MonicPoly::new(coeffs, BigRational::one()))
}

/// val and unit residue of a discriminant that is only known mod p^k;
/// refuses values too close to the modulus.
fn guarded_valuation(delta: &BigRational, p: u64, k: u32) -> Result<(u32, u64)> {
    if delta.is_zero() {
        return Err(Error::precision("cofactor discriminant ~ 0 mod p^k"));
    }
    let vd = rational_valuation(delta, p).expect("nonzero") as u32;
    if vd + GUARD_DIGITS > k {
        return Err(Error::precision(format!(
            "cofactor discriminant valuation {vd} too close to precision {k}"
        )));
    }
    Ok((vd, unit_residue(delta, vd, p)))
}

/// Residue mod p of delta / p^vd.
fn unit_residue(delta: &BigRational, vd: u32, p: u64) -> u64 {
    let unit = delta / BigRational::from_integer(BigInt::from(p).pow(vd));
    residue_of(&unit, p)
}

fn legendre_is_square(u: u64, p: u64) -> bool {
    debug_assert!(u % p != 0);
    let mut acc: u64 = 1;
    let mut base = u % p;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc == 1
}

/// Quadratic with val disc = vd > 0 allowed; u = unit residue of disc.
fn classify_quadratic(vd: u32, u: u64, p: u64) -> Vec<FactorType> {
    if vd % 2 == 1 {
        vec![FactorType::new(2, 1)]
    } else if legendre_is_square(u, p) {
        vec![FactorType::new(1, 1), FactorType::new(1, 1)]
    } else {
        vec![FactorType::new(1, 2)]
    }
}

fn classify_cubic(fz: &[BigInt], p: u64, k: u32) -> Result<SplittingType> {
    let (c1, cof) = strip_rational_roots(fz, p, k)?;
    match c1 {
        3 => Ok(SplittingType::new(vec![FactorType::new(1, 1); 3])),
        1 => {
            let (vd, u) = guarded_valuation(&int_discriminant(&cof)?, p, k)?;
            let mut t = classify_quadratic(vd, u, p);
            t.push(FactorType::new(1, 1));
            Ok(SplittingType::new(t))
        }
        0 => {
            // Irreducible: unramified iff it has a root upstairs.
            if count_roots(fz, p, 3, k)? > 0 {
                Ok(SplittingType::new(vec![FactorType::new(1, 3)]))
            } else {
                Ok(SplittingType::new(vec![FactorType::new(3, 1)]))
            }
        }
        _ => Err(Error::precision(format!(
            "cubic with {c1} rational roots: a root search missed a sibling"
        ))),
    }
}

fn classify_quartic(fz: &[BigInt], vd_exact: u32, p: u64, k: u32) -> Result<SplittingType> {
    let (c1, cof) = strip_rational_roots(fz, p, k)?;
    match 4 - c1 {
        0 => Ok(SplittingType::new(vec![FactorType::new(1, 1); 4])),
        2 => {
            let (vd, u) = guarded_valuation(&int_discriminant(&cof)?, p, k)?;
            let mut t = classify_quadratic(vd, u, p);
            t.push(FactorType::new(1, 1));
            t.push(FactorType::new(1, 1));
            Ok(SplittingType::new(t))
        }
        3 => {
            // Cubic cofactor with no rational root.
            let mut t = if count_roots(&cof, p, 3, k)? > 0 {
                vec![FactorType::new(1, 3)]
            } else {
                vec![FactorType::new(3, 1)]
            };
            t.push(FactorType::new(1, 1));
            Ok(SplittingType::new(t))
        }
        4 => classify_ramified_quartic(fz, vd_exact, p, k),
        _ => Err(Error::precision(
            "quartic with three rational roots: a root search missed a sibling",
        )),
    }
}

/// Quartic with no rational roots; `vd` is exact.
fn classify_ramified_quartic(fz: &[BigInt], vd: u32, p: u64, k: u32) -> Result<SplittingType> {
    match count_roots(fz, p, 2, k)? {
        4 => Ok(SplittingType::new(vec![FactorType::new(1, 2); 2])),
        2 => Ok(SplittingType::new(vec![
            FactorType::new(1, 2),
            FactorType::new(2, 1),
        ])),
        0 => match count_roots(fz, p, 4, k)? {
            4 => Ok(SplittingType::new(vec![FactorType::new(1, 4)])),
            0 => {
                if vd % 2 == 1 {
                    // field disc exponent f(e-1) = 3, index contributes evenly
                    return Ok(SplittingType::new(vec![FactorType::new(4, 1)]));
                }
                // Splits into two ramified quadratics iff a root lives in
                // Q_p(sqrt(cp)) for c = 1 or a nonresidue.
                let nr = (2..p).find(|&u| !legendre_is_square(u, p)).unwrap();
                let split = has_root_ramified_quadratic(fz, p, 1, k)?
                    || has_root_ramified_quadratic(fz, p, nr, k)?;
                if split {
                    Ok(SplittingType::new(vec![FactorType::new(2, 1); 2]))
                } else {
                    Ok(SplittingType::new(vec![FactorType::new(2, 2)]))
                }
            }
            c4 => Err(Error::precision(format!(
                "quartic with {c4} roots of residue degree 4"
            ))),
        },
        c2 => Err(Error::precision(format!(
            "quartic with {c2} roots of residue degree 2"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn monic(coeffs: &[i64]) -> MonicPoly<BigRational> {
        MonicPoly::from_i64(coeffs)
    }

    fn types(st: &SplittingType) -> Vec<(u32, u32, u32)> {
        st.factors().iter().map(|t| (t.e, t.f, t.d)).collect()
    }

    #[test]
    fn inert_quadratic_over_q3() {
        let st = splitting_type_padic(&monic(&[0, 1]), 3).unwrap(); // x^2 + 1
        assert_eq!(types(&st), vec![(1, 2, 0)]);
    }

    #[test]
    fn ramified_quadratic_over_q3() {
        let st = splitting_type_padic(&monic(&[0, -3]), 3).unwrap(); // x^2 - 3
        assert_eq!(types(&st), vec![(2, 1, 1)]);
    }

    #[test]
    fn split_quadratic_over_q5() {
        let st = splitting_type_padic(&monic(&[0, -1]), 5).unwrap(); // x^2 - 1
        assert_eq!(types(&st), vec![(1, 1, 0), (1, 1, 0)]);
    }

    #[test]
    fn totally_ramified_cubic() {
        let st = splitting_type_padic(&monic(&[0, 0, -5]), 5).unwrap(); // x^3 - 5
        assert_eq!(types(&st), vec![(3, 1, 2)]);
    }

    #[test]
    fn linear_times_inert_quadratic_with_positive_disc_valuation() {
        // (x - 2)(x^2 - 2x + 51) over Q_5: the quadratic is the minimal
        // polynomial of 1 + 5t with t^2 = -2, disc = -200.
        let f = monic(&[-2]).mul(&monic(&[-2, 51]));
        let st = splitting_type_padic(&f, 5).unwrap();
        assert_eq!(types(&st), vec![(1, 1, 0), (1, 2, 0)]);
    }

    #[test]
    fn totally_ramified_quartic_by_disc_parity() {
        let st = splitting_type_padic(&monic(&[0, 0, 0, -5]), 5).unwrap(); // x^4 - 5
        assert_eq!(types(&st), vec![(4, 1, 3)]);
    }

    #[test]
    fn quartic_unramified_over_quadratic_subfield() {
        // x^4 - 30x^2 + 25: minimal polynomial of sqrt(5)(1 + t), t^2 = 2;
        // one factor with e = 2, f = 2.
        let st = splitting_type_padic(&monic(&[0, -30, 0, 25]), 5).unwrap();
        assert_eq!(types(&st), vec![(2, 2, 1)]);
    }

    #[test]
    fn quartic_splitting_into_two_ramified_quadratics() {
        // (x^2 - 5)(x^2 - 45), both factors in Q_5(sqrt 5)
        let st = splitting_type_padic(&monic(&[0, -50, 0, 225]), 5).unwrap();
        assert_eq!(types(&st), vec![(2, 1, 1), (2, 1, 1)]);
    }

    #[test]
    fn quartic_mixed_inert_and_ramified() {
        // (x^2 + 2)(x^2 - 5) over Q_5
        let st = splitting_type_padic(&monic(&[0, -3, 0, -10]), 5).unwrap();
        assert_eq!(types(&st), vec![(1, 2, 0), (2, 1, 1)]);
    }

    #[test]
    fn two_inert_quadratics_with_unit_disc() {
        // x^4 + 1 over Q_5 = (x^2 + 2)(x^2 + 3) mod 5, disc is a unit
        let st = splitting_type_padic(&monic(&[0, 0, 0, 1]), 5).unwrap();
        assert_eq!(types(&st), vec![(1, 2, 0), (1, 2, 0)]);
    }

    #[test]
    fn inert_quartic() {
        // x^4 + x + 7 mod 11: check it stays irreducible, then perturb off
        // the unit-disc fast path by moving a root cluster together.
        let f = monic(&[0, 0, 1, 7]);
        let st = splitting_type_padic(&f, 11).unwrap();
        if types(&st) == vec![(1, 4, 0)] {
            // unit-disc path; now force a nonzero disc valuation variant
            let g = monic(&[0, 0, 11, 7]); // x^4 + 11x + 7
            let st2 = splitting_type_padic(&g, 11).unwrap();
            assert_eq!(st2.total_degree(), 4);
        } else {
            assert_eq!(st.total_degree(), 4);
        }
    }

    #[test]
    fn rescaling_handles_denominators() {
        // x^2 - 1/25 over Q_5 splits
        let c = BigRational::new(BigInt::from(-1), BigInt::from(25));
        let f = MonicPoly::new(vec![BigRational::zero(), c], BigRational::one());
        let st = splitting_type_padic(&f, 5).unwrap();
        assert_eq!(types(&st), vec![(1, 1, 0), (1, 1, 0)]);
    }

    #[test]
    fn wild_and_overdegree_inputs_are_refused() {
        assert!(matches!(
            splitting_type_padic(&monic(&[0, -3]), 2),
            Err(Error::Unsupported { .. })
        ));
        assert!(matches!(
            splitting_type_padic(&monic(&[0, 0, 0, 0, 1]), 7),
            Err(Error::Unsupported { .. })
        ));
    }

    #[test]
    fn vanishing_discriminant_is_refused() {
        assert!(matches!(
            splitting_type_padic(&monic(&[-2, 1]).mul(&monic(&[-2, 1])), 5),
            Err(Error::Singular { .. })
        ));
    }

    proptest! {
        #[test]
        fn degrees_always_fill_and_tame_relation_holds(
            coeffs in proptest::collection::vec(-30i64..30, 2..5),
            p in prop_oneof![Just(5u64), Just(7), Just(11)],
        ) {
            let f = monic(&coeffs);
            if let Ok(st) = splitting_type_padic(&f, p) {
                prop_assert_eq!(st.total_degree() as usize, f.degree());
                for t in st.factors() {
                    prop_assert_eq!(t.d, t.e - 1);
                    prop_assert!(t.e * t.f <= 4);
                }
            }
        }

        #[test]
        fn unit_disc_types_match_residue_factorization(
            coeffs in proptest::collection::vec(-20i64..20, 2..5),
            p in prop_oneof![Just(5u64), Just(7)],
        ) {
            let f = monic(&coeffs);
            let delta = discriminant(&f).unwrap();
            prop_assume!(!delta.is_zero());
            prop_assume!(rational_valuation(&delta, p) == Some(0));
            let st = splitting_type_padic(&f, p).unwrap();
            let field = FqField::new(p, 1).unwrap();
            let coeffs_bar: Vec<FqElem> = f
                .coeffs()
                .iter()
                .map(|c| FqElem::from_residue(&field, residue_of(c, p)))
                .collect();
            let fbar = MonicPoly::new(coeffs_bar, FqElem::one(&field));
            let mut ff_degs: Vec<u32> = factor_ff(&fbar).iter().map(|(h, _)| h.degree() as u32).collect();
            ff_degs.sort_unstable();
            let mut st_degs: Vec<u32> = st.factors().iter().map(|t| t.deg()).collect();
            st_degs.sort_unstable();
            prop_assert_eq!(st_degs, ff_degs);
            prop_assert!(st.is_unramified());
        }

        #[test]
        fn splitting_type_is_locally_constant(
            coeffs in proptest::collection::vec(-15i64..15, 2..5),
            bump in proptest::collection::vec(-3i64..=3, 4),
            p in prop_oneof![Just(5u64), Just(7)],
        ) {
            let f = monic(&coeffs);
            let delta = discriminant(&f).unwrap();
            prop_assume!(!delta.is_zero());
            let vd = rational_valuation(&delta, p).unwrap();
            prop_assume!(vd <= 6);
            let base = splitting_type_padic(&f, p);
            prop_assume!(base.is_ok());
            let step = BigRational::from_integer(BigInt::from(p).pow(2 * vd as u32 + 4));
            let n = f.degree();
            let perturbed: Vec<BigRational> = (0..n)
                .rev()
                .map(|i| f.coeff(i) + BigRational::from_integer(BigInt::from(bump[i.min(3)])) * &step)
                .collect();
            let g = MonicPoly::new(perturbed, BigRational::one());
            let st2 = splitting_type_padic(&g, p).unwrap();
            prop_assert_eq!(base.unwrap(), st2);
        }
    }
}
