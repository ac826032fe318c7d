//! Multiplicative characters of finite fields, Gauss and Jacobi sums.
//!
//! A character is stored as an index against the field's fixed generator, so
//! evaluation is a discrete log lookup and a root of unity.  The convention
//! `chi(0) = 0` (including the trivial character) is load-bearing: it makes
//! the finite-field gamma factor `-g(chi)` satisfy the lifting relation with
//! no correction factor, and every sum below quietly relies on it.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Error;
use crate::fields::ff::{all_elements, FqElem, FqField};
use crate::Result;

/// Multiplicative character `g^k -> e^{2 pi i j k / (q - 1)}`, extended by
/// `chi(0) = 0`.
#[derive(Debug, Clone)]
pub struct MultCharacter {
    field: Arc<FqField>,
    j: u64,
}

impl MultCharacter {
    pub fn new(field: &Arc<FqField>, j: u64) -> Self {
        MultCharacter {
            field: field.clone(),
            j: j % (field.order() - 1),
        }
    }

    pub fn trivial(field: &Arc<FqField>) -> Self {
        Self::new(field, 0)
    }

    pub fn field(&self) -> &Arc<FqField> {
        &self.field
    }

    /// Index against the field's fixed generator.
    pub fn index(&self) -> u64 {
        self.j
    }

    pub fn is_trivial(&self) -> bool {
        self.j == 0
    }

    /// Order in the character group.
    pub fn order(&self) -> u64 {
        let m = self.field.order() - 1;
        m / gcd(self.j, m)
    }

    pub fn eval(&self, x: &FqElem) -> Complex64 {
        match x.dlog() {
            None => Complex64::new(0.0, 0.0),
            Some(k) => {
                let m = self.field.order() - 1;
                root_of_unity((self.j % m) * (k % m) % m, m)
            }
        }
    }

    /// Pointwise product (indices add).
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.field.order(), other.field.order(), "character fields differ");
        Self::new(&self.field, self.j + other.j)
    }

    /// Complex conjugate character (the inverse on nonzero values).
    pub fn conj(&self) -> Self {
        let m = self.field.order() - 1;
        Self::new(&self.field, (m - self.j) % m)
    }

    /// Composite with the norm map down from the degree-`m` extension: a
    /// multiplicative character of the extension field.
    ///
    /// The norm image is identified with this character's field through an
    /// honest field embedding (a root of the base defining polynomial inside
    /// the extension); matching generators instead would compose with a
    /// power map and evaluate a different character.
    pub fn compose_norm(&self, m: u32) -> Result<MultCharacter> {
        let big = FqField::new(self.field.p(), self.field.degree() * m)?;
        let embed = subfield_embedding(&self.field, &big)?;
        let q = self.field.order();
        // Index of chi∘N against the big field's generator: evaluate on the
        // generator once and read off the root-of-unity exponent.
        let g_big = FqElem::generator(&big);
        let norm_in_big = g_big.norm_to_subfield(q);
        let preimage = embed
            .invert(&norm_in_big)
            .expect("norm lands in the embedded subfield");
        let t = preimage.dlog().expect("norm of a generator is nonzero");
        let big_order = big.order() - 1;
        let step = big_order / (q - 1);
        Ok(MultCharacter::new(&big, (self.j * t) % (q - 1) * step))
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn root_of_unity(k: u64, m: u64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * (k as f64) / (m as f64))
}

/// All `q - 1` multiplicative characters of the field, trivial one first.
pub fn all_mult_characters(field: &Arc<FqField>) -> Vec<MultCharacter> {
    (0..field.order() - 1).map(|j| MultCharacter::new(field, j)).collect()
}

/// The canonical additive character `x -> e^{2 pi i Tr(x) / p}`.
pub fn additive_char(x: &FqElem) -> Complex64 {
    let p = x.field().p();
    root_of_unity(x.trace_to_prime() % p, p)
}

/// Gauss sum `sum_x chi(x) psi(x)`; the trivial character gives `-1`.
pub fn gauss_sum(chi: &MultCharacter) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for x in all_elements(chi.field()) {
        if x.is_zero() {
            continue;
        }
        acc += chi.eval(&x) * additive_char(&x);
    }
    acc
}

/// Finite-field gamma factor, `-g(chi)`.
///
/// The sign is the whole point: with it, the gamma factor of a degree-`m`
/// extension at a lifted character is exactly the `m`-th power of the base
/// one, so extension corrections in product formulas collapse to `1`.
pub fn gamma_ff(chi: &MultCharacter) -> Complex64 {
    -gauss_sum(chi)
}

/// Jacobi sum `sum_x a(x) b(1 - x)`.
pub fn jacobi_sum(a: &MultCharacter, b: &MultCharacter) -> Complex64 {
    assert_eq!(a.field().order(), b.field().order(), "character fields differ");
    let field = a.field();
    let one = FqElem::one(field);
    let mut acc = Complex64::new(0.0, 0.0);
    for x in all_elements(field) {
        acc += a.eval(&x) * b.eval(&one.sub(&x));
    }
    acc
}

/// A field embedding of `small` into `big`, tabulated element by element.
pub struct SubfieldEmbedding {
    small: Arc<FqField>,
    big: Arc<FqField>,
    forward: Vec<u64>,
    backward: HashMap<u64, u64>,
}

impl SubfieldEmbedding {
    /// Image of a small-field element.
    pub fn image(&self, x: &FqElem) -> FqElem {
        FqElem::from_index(&self.big, self.forward[x.index() as usize])
    }

    /// Preimage of a big-field element, if it lies in the embedded subfield.
    pub fn invert(&self, y: &FqElem) -> Option<FqElem> {
        self.backward
            .get(&y.index())
            .map(|&idx| FqElem::from_index(&self.small, idx))
    }
}

/// Embed `small` into `big` by sending the residue class of `x` to a root of
/// the small field's defining polynomial found inside `big`.
///
/// Any root works: the choices differ by Frobenius, which fixes norms, so
/// every consumer here is insensitive to it.
pub fn subfield_embedding(small: &Arc<FqField>, big: &Arc<FqField>) -> Result<SubfieldEmbedding> {
    if small.p() != big.p() || big.degree() % small.degree() != 0 {
        return Err(Error::unsupported(format!(
            "F_{} is not a subfield of F_{}",
            small.order(),
            big.order()
        )));
    }
    let defining: Vec<FqElem> = small
        .defining_poly()
        .iter()
        .map(|&c| FqElem::from_residue(big, c))
        .collect();
    let root = all_elements(big)
        .find(|cand| eval_ff(&defining, cand).is_zero())
        .expect("defining polynomial splits in any extension of its field");

    let f = small.degree() as usize;
    let mut forward = Vec::with_capacity(small.order() as usize);
    let mut backward = HashMap::with_capacity(small.order() as usize);
    let mut powers = Vec::with_capacity(f);
    let mut acc = FqElem::one(big);
    for _ in 0..f {
        powers.push(acc.clone());
        acc = acc.mul(&root);
    }
    for idx in 0..small.order() {
        let x = FqElem::from_index(small, idx);
        let mut img = FqElem::zero(big);
        for (i, c) in x.coeffs().into_iter().enumerate() {
            let scaled = powers[i].mul(&FqElem::from_residue(big, c));
            img = img.add(&scaled);
        }
        forward.push(img.index());
        backward.insert(img.index(), idx);
    }
    Ok(SubfieldEmbedding {
        small: small.clone(),
        big: big.clone(),
        forward,
        backward,
    })
}

fn eval_ff(coeffs: &[FqElem], x: &FqElem) -> FqElem {
    let field = x.field();
    let mut acc = FqElem::zero(field);
    for c in coeffs.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn quadratic_character_mod_three_gives_i_sqrt_three() {
        let f3 = FqField::new(3, 1).unwrap();
        let chi = MultCharacter::new(&f3, 1);
        assert_eq!(chi.order(), 2);
        let g = gauss_sum(&chi);
        assert!(close(g, Complex64::new(0.0, f64::sqrt(3.0)), 1e-12), "{g}");
    }

    #[test]
    fn trivial_character_sums_to_minus_one() {
        for (p, f) in [(2u64, 1u32), (3, 1), (5, 1), (3, 2), (2, 3)] {
            let field = FqField::new(p, f).unwrap();
            let g = gauss_sum(&MultCharacter::trivial(&field));
            assert!(close(g, Complex64::new(-1.0, 0.0), 1e-10));
        }
    }

    #[test]
    fn nontrivial_gauss_sums_have_magnitude_sqrt_q() {
        for (p, f) in [
            (2u64, 1u32),
            (3, 1),
            (5, 1),
            (7, 1),
            (11, 1),
            (13, 1),
            (2, 2),
            (2, 3),
            (2, 4),
            (2, 5),
            (3, 2),
            (3, 3),
            (5, 2),
            (7, 2),
        ] {
            let field = FqField::new(p, f).unwrap();
            let q = field.order() as f64;
            for chi in all_mult_characters(&field).iter().skip(1) {
                let g = gauss_sum(chi);
                assert!(
                    (g.norm() - q.sqrt()).abs() < 1e-9,
                    "q = {q}, j = {}: |g| = {}",
                    chi.index(),
                    g.norm()
                );
            }
        }
    }

    #[test]
    fn jacobi_matches_gauss_ratio() {
        let field = FqField::new(7, 1).unwrap();
        let chars = all_mult_characters(&field);
        for a in chars.iter().skip(1) {
            for b in chars.iter().skip(1) {
                if a.mul(b).is_trivial() {
                    continue;
                }
                let lhs = jacobi_sum(a, b);
                let rhs = gauss_sum(a) * gauss_sum(b) / gauss_sum(&a.mul(b));
                assert!(close(lhs, rhs, 1e-9), "a={} b={}", a.index(), b.index());
            }
        }
    }

    #[test]
    fn conjugate_pairs_multiply_to_q_times_sign() {
        // g(chi) g(conj chi) = chi(-1) q for nontrivial chi.
        let field = FqField::new(5, 1).unwrap();
        let minus_one = FqElem::from_residue(&field, 4);
        for chi in all_mult_characters(&field).iter().skip(1) {
            let prod = gauss_sum(chi) * gauss_sum(&chi.conj());
            let expect = chi.eval(&minus_one) * 5.0;
            assert!(close(prod, expect, 1e-10));
        }
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let small = FqField::new(3, 1).unwrap();
        let big = FqField::new(3, 3).unwrap();
        let emb = subfield_embedding(&small, &big).unwrap();
        for a in all_elements(&small) {
            for b in all_elements(&small) {
                let sum = emb.image(&a.add(&b));
                let lhs = emb.image(&a).add(&emb.image(&b));
                assert_eq!(sum.index(), lhs.index());
                let prod = emb.image(&a.mul(&b));
                let rhs = emb.image(&a).mul(&emb.image(&b));
                assert_eq!(prod.index(), rhs.index());
            }
        }
    }

    #[test]
    fn norm_composite_agrees_with_pointwise_norm() {
        // The index arithmetic in compose_norm must match evaluating chi on
        // the pulled-back norm element by element.
        let small = FqField::new(5, 1).unwrap();
        let big = FqField::new(5, 2).unwrap();
        let emb = subfield_embedding(&small, &big).unwrap();
        for chi in all_mult_characters(&small) {
            let lifted = chi.compose_norm(2).unwrap();
            for y in all_elements(&big) {
                let via_index = lifted.eval(&y);
                let direct = match emb.invert(&y.norm_to_subfield(5)) {
                    Some(n) => chi.eval(&n),
                    None => panic!("norm escaped the subfield"),
                };
                assert!(close(via_index, direct, 1e-12));
            }
        }
    }

    #[test]
    fn hasse_davenport_lifting() {
        // -g(chi∘N) = (-g(chi))^m, exhaustively for small fields.
        for (p, f) in [(2u64, 1u32), (3, 1), (5, 1), (7, 1), (2, 2), (3, 2)] {
            let field = FqField::new(p, f).unwrap();
            for m in 2..=3u32 {
                if field.order().pow(m) > 3000 {
                    continue;
                }
                for chi in all_mult_characters(&field) {
                    let lifted = chi.compose_norm(m).unwrap();
                    let lhs = gamma_ff(&lifted);
                    let rhs = gamma_ff(&chi).powu(m);
                    assert!(
                        close(lhs, rhs, 1e-9),
                        "q={} m={m} j={}: {lhs} vs {rhs}",
                        field.order(),
                        chi.index()
                    );
                }
            }
        }
    }
}
