//! Complete factorization of monic polynomials over F_q.
//!
//! Squarefree decomposition (with p-th-root descent in characteristic p),
//! distinct-degree splitting by Frobenius powers, then equal-degree
//! splitting. Splitting candidates are enumerated in a fixed order rather
//! than drawn from an RNG, so factorizations are deterministic; for the
//! field sizes in scope the expected number of tries stays tiny.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::sync::Arc;

use crate::fields::{FqElem, FqField};
use crate::polylab::poly::MonicPoly;

/// Ascending coefficients, trimmed; empty vector is the zero polynomial.
type Fp = Vec<FqElem>;

fn trim(mut v: Fp) -> Fp {
    while v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
    v
}

fn deg(v: &Fp) -> usize {
    debug_assert!(!v.is_empty());
    v.len() - 1
}

fn is_one(v: &Fp) -> bool {
    v.len() == 1 && v[0].index() == 1
}

fn poly_one(field: &Arc<FqField>) -> Fp {
    vec![FqElem::one(field)]
}

fn mul(a: &Fp, b: &Fp, field: &Arc<FqField>) -> Fp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![FqElem::zero(field); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    trim(out)
}

fn sub(a: &Fp, b: &Fp, field: &Arc<FqField>) -> Fp {
    let n = a.len().max(b.len());
    let zero = FqElem::zero(field);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).unwrap_or(&zero);
        let y = b.get(i).unwrap_or(&zero);
        out.push(x.sub(y));
    }
    trim(out)
}

/// Division with remainder; divisor nonzero.
fn divrem(a: &Fp, b: &Fp, field: &Arc<FqField>) -> (Fp, Fp) {
    assert!(!b.is_empty());
    if a.len() < b.len() {
        return (Vec::new(), a.clone());
    }
    let lead_inv = b.last().unwrap().inv().expect("nonzero leading coefficient");
    let mut rem = a.clone();
    let mut quo = vec![FqElem::zero(field); a.len() - b.len() + 1];
    while rem.len() >= b.len() {
        let k = rem.len() - b.len();
        let c = rem.last().unwrap().mul(&lead_inv);
        quo[k] = c.clone();
        for (j, y) in b.iter().enumerate() {
            rem[k + j] = rem[k + j].sub(&c.mul(y));
        }
        rem = trim(rem);
        if rem.is_empty() {
            break;
        }
        if rem.len() > k + b.len() - 1 {
            // leading term failed to cancel; cannot happen
            unreachable!("division leading term survived");
        }
    }
    (trim(quo), rem)
}

fn make_monic(v: Fp) -> Fp {
    if v.is_empty() {
        return v;
    }
    let inv = v.last().unwrap().inv().expect("nonzero leading coefficient");
    v.into_iter().map(|c| c.mul(&inv)).collect()
}

fn gcd(a: &Fp, b: &Fp, field: &Arc<FqField>) -> Fp {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_empty() {
        let (_, r) = divrem(&x, &y, field);
        x = y;
        y = r;
    }
    make_monic(x)
}

fn powmod(base: &Fp, mut e: BigUint, modulus: &Fp, field: &Arc<FqField>) -> Fp {
    let mut acc = poly_one(field);
    let mut b = divrem(base, modulus, field).1;
    let two = BigUint::from(2u32);
    while !e.is_zero() {
        if (&e % &two).is_one() {
            acc = divrem(&mul(&acc, &b, field), modulus, field).1;
        }
        b = divrem(&mul(&b, &b, field), modulus, field).1;
        e /= &two;
    }
    acc
}

fn derivative(v: &Fp, field: &Arc<FqField>) -> Fp {
    if v.len() <= 1 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(v.len() - 1);
    for (i, c) in v.iter().enumerate().skip(1) {
        let mut k = FqElem::zero(field);
        for _ in 0..(i as u64 % field.p()) {
            k = k.add(&FqElem::one(field));
        }
        out.push(c.mul(&k));
    }
    trim(out)
}

/// p-th root of a polynomial all of whose exponents are multiples of p.
fn pth_root(v: &Fp, field: &Arc<FqField>) -> Fp {
    let p = field.p() as usize;
    let e = field.order() / field.p();
    let mut out = Vec::with_capacity(v.len() / p + 1);
    for (i, c) in v.iter().enumerate() {
        if i % p == 0 {
            out.push(c.pow(e));
        } else {
            debug_assert!(c.is_zero());
        }
    }
    trim(out)
}

/// Squarefree decomposition: pairwise-coprime squarefree parts with their
/// multiplicities, product over (part^mult) = input.
fn squarefree_decomp(f: &Fp, field: &Arc<FqField>) -> Vec<(Fp, u32)> {
    let mut out = Vec::new();
    let fp = derivative(f, field);
    if fp.is_empty() {
        // f = g(x^p)
        let root = pth_root(f, field);
        for (part, m) in squarefree_decomp(&root, field) {
            out.push((part, m * field.p() as u32));
        }
        return out;
    }
    let mut g = gcd(f, &fp, field);
    let mut w = divrem(f, &g, field).0;
    let mut i = 1u32;
    while !is_one(&w) {
        let y = gcd(&w, &g, field);
        let z = divrem(&w, &y, field).0;
        if !is_one(&z) {
            out.push((z, i));
        }
        w = y;
        g = divrem(&g, &w, field).0;
        i += 1;
    }
    if !is_one(&g) {
        // leftover is a p-th power
        let root = pth_root(&g, field);
        for (part, m) in squarefree_decomp(&root, field) {
            out.push((part, m * field.p() as u32));
        }
    }
    out
}

/// Distinct-degree splitting of a squarefree monic polynomial: list of
/// (product of irreducible factors of degree d, d).
fn ddf(f: &Fp, field: &Arc<FqField>) -> Vec<(Fp, usize)> {
    let mut out = Vec::new();
    let mut f = f.clone();
    let x = vec![FqElem::zero(field), FqElem::one(field)];
    let mut h = x.clone();
    let mut d = 0usize;
    while deg(&f) > 0 {
        d += 1;
        if 2 * d > deg(&f) {
            out.push((f.clone(), deg(&f)));
            break;
        }
        h = powmod(&h, BigUint::from(field.order()), &f, field);
        let g = gcd(&sub(&h, &x, field), &f, field);
        if !is_one(&g) {
            out.push((g.clone(), d));
            f = divrem(&f, &g, field).0;
            h = divrem(&h, &f, field).1;
        }
    }
    out
}

/// Equal-degree splitting: factor a squarefree product of degree-d
/// irreducibles. Candidates come from a deterministic enumeration.
fn edf(f: &Fp, d: usize, field: &Arc<FqField>) -> Vec<Fp> {
    if deg(f) == d {
        return vec![f.clone()];
    }
    let q = field.order();
    let mut counter: u64 = 1;
    loop {
        counter += 1;
        // candidate of degree < deg f from the counter digits, base q
        let mut c = counter;
        let mut h: Fp = Vec::new();
        let mut i = 0usize;
        while c > 0 && i < deg(f) {
            h.push(FqElem::from_index(field, c % q));
            c /= q;
            i += 1;
        }
        let h = trim(h);
        if h.is_empty() || deg(&h) == 0 {
            continue;
        }
        let g0 = gcd(&h, f, field);
        if !is_one(&g0) && deg(&g0) < deg(f) {
            let rest = divrem(f, &g0, field).0;
            let mut out = edf(&g0, d, field);
            out.extend(edf(&rest, d, field));
            return out;
        }
        let split = if field.p() == 2 {
            // absolute-trace map over F_2; add = sub in characteristic 2
            let mut t = divrem(&h, f, field).1;
            let mut pow = t.clone();
            let bits = (field.order().trailing_zeros() as usize) * d;
            for _ in 1..bits {
                pow = divrem(&mul(&pow, &pow, field), f, field).1;
                t = sub(&t, &pow, field);
            }
            t
        } else {
            let e = (BigUint::from(q).pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
            let pw = powmod(&h, e, f, field);
            sub(&pw, &poly_one(field), field)
        };
        let g = gcd(&split, f, field);
        if !is_one(&g) && deg(&g) < deg(f) {
            let rest = divrem(f, &g, field).0;
            let mut out = edf(&g, d, field);
            out.extend(edf(&rest, d, field));
            return out;
        }
    }
}

/// Complete factorization into monic irreducibles with multiplicities,
/// sorted by degree then coefficient indices. The product of the factors
/// (with multiplicity) reproduces the input exactly.
pub fn factor_ff(f: &MonicPoly<FqElem>) -> Vec<(MonicPoly<FqElem>, u32)> {
    assert!(f.degree() >= 1, "factor_ff needs positive degree");
    let field = f.one_exemplar().field().clone();
    // to ascending order
    let mut asc: Fp = f.coeffs().iter().rev().cloned().collect();
    asc.push(FqElem::one(&field));

    let mut out: Vec<(MonicPoly<FqElem>, u32)> = Vec::new();
    for (part, mult) in squarefree_decomp(&asc, &field) {
        for (same_deg, d) in ddf(&part, &field) {
            for irred in edf(&same_deg, d, &field) {
                let coeffs: Vec<FqElem> = irred[..irred.len() - 1].iter().rev().cloned().collect();
                out.push((MonicPoly::new(coeffs, FqElem::one(&field)), mult));
            }
        }
    }
    out.sort_by(|a, b| {
        let ka = (a.0.degree(), a.0.coeffs().iter().map(|c| c.index()).collect::<Vec<_>>());
        let kb = (b.0.degree(), b.0.coeffs().iter().map(|c| c.index()).collect::<Vec<_>>());
        ka.cmp(&kb)
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reassemble(factors: &[(MonicPoly<FqElem>, u32)], field: &Arc<FqField>) -> MonicPoly<FqElem> {
        let mut acc = MonicPoly::new(Vec::new(), FqElem::one(field));
        for (h, m) in factors {
            for _ in 0..*m {
                acc = acc.mul(h);
            }
        }
        acc
    }

    #[test]
    fn splits_x2_minus_1_over_f3() {
        let field = FqField::new(3, 1).unwrap();
        let f = MonicPoly::from_residues(&field, &[0, 2]); // x^2 - 1
        let fs = factor_ff(&f);
        assert_eq!(fs.len(), 2);
        assert!(fs.iter().all(|(h, m)| h.degree() == 1 && *m == 1));
    }

    #[test]
    fn x2_plus_1_is_irreducible_over_f3() {
        let field = FqField::new(3, 1).unwrap();
        let f = MonicPoly::from_residues(&field, &[0, 1]);
        let fs = factor_ff(&f);
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].0.degree(), 2);
        assert_eq!(fs[0].1, 1);
    }

    #[test]
    fn perfect_cube_in_characteristic_three() {
        // x^3 - 1 = (x - 1)^3 over F_3
        let field = FqField::new(3, 1).unwrap();
        let f = MonicPoly::from_residues(&field, &[0, 0, 2]);
        let fs = factor_ff(&f);
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].0.degree(), 1);
        assert_eq!(fs[0].1, 3);
    }

    #[test]
    fn mixed_multiplicities() {
        // (x - 1)^2 (x + 1) over F_5
        let field = FqField::new(5, 1).unwrap();
        let lin1 = MonicPoly::from_residues(&field, &[4]);
        let lin2 = MonicPoly::from_residues(&field, &[1]);
        let f = lin1.mul(&lin1).mul(&lin2);
        let fs = factor_ff(&f);
        let mults: Vec<u32> = fs.iter().map(|(_, m)| *m).collect();
        assert_eq!(fs.len(), 2);
        assert!(mults.contains(&2) && mults.contains(&1));
    }

    #[test]
    fn works_over_extension_fields_even_char() {
        // x^2 + x + t over F_4 = F_2(t): brute check against reassembly
        let field = FqField::new(2, 2).unwrap();
        for idx in 0..4u64 {
            let f = MonicPoly::new(
                vec![FqElem::one(&field), FqElem::from_index(&field, idx)],
                FqElem::one(&field),
            );
            let fs = factor_ff(&f);
            let back = reassemble(&fs, &field);
            assert_eq!(back.coeffs().iter().map(|c| c.index()).collect::<Vec<_>>(),
                       f.coeffs().iter().map(|c| c.index()).collect::<Vec<_>>());
        }
    }

    proptest! {
        #[test]
        fn factorization_reassembles_and_degrees_add_up(
            pf in prop_oneof![Just((2u64, 1u32)), Just((3, 1)), Just((5, 1)), Just((3, 2)), Just((2, 2))],
            idxs in proptest::collection::vec(0u64..25, 1..6),
        ) {
            let (p, e) = pf;
            let field = FqField::new(p, e).unwrap();
            let q = field.order();
            let coeffs: Vec<FqElem> = idxs.iter().map(|&i| FqElem::from_index(&field, i % q)).collect();
            let f = MonicPoly::new(coeffs, FqElem::one(&field));
            let fs = factor_ff(&f);
            let total: usize = fs.iter().map(|(h, m)| h.degree() * (*m as usize)).sum();
            prop_assert_eq!(total, f.degree());
            let back = reassemble(&fs, &field);
            prop_assert_eq!(
                back.coeffs().iter().map(|c| c.index()).collect::<Vec<_>>(),
                f.coeffs().iter().map(|c| c.index()).collect::<Vec<_>>()
            );
        }
    }
}
