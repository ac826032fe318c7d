//! Small finite fields `F_{p^f}` with full discrete-log tables.
//!
//! Elements are indexed by packing their coefficient vector over `F_p` in
//! base `p`; multiplication goes through exp/log tables for a fixed
//! generator. Intended for the enumeration backend (fields up to a few
//! thousand elements), not for cryptographic sizes.

use std::sync::Arc;

use crate::{error::Error, fields::descriptor::is_prime, Result};

/// Hard cap on table size; enumeration workloads stay far below it.
const MAX_Q: u64 = 1 << 21;

/// A finite field with precomputed multiplicative tables.
#[derive(Debug)]
pub struct FqField {
    p: u64,
    f: u32,
    q: u64,
    /// Monic defining polynomial, coefficients low-to-high, length `f + 1`.
    /// For `f = 1` this is `x` and elements are plain residues.
    irred: Vec<u64>,
    /// `exp[i]` = packed index of `g^i`, `i < q - 1`.
    exp: Vec<u32>,
    /// `log[packed]` for nonzero packed indices; `log[0]` is a sentinel.
    log: Vec<u32>,
}

/// An element of an [`FqField`], by packed index.
#[derive(Debug, Clone)]
pub struct FqElem {
    pub(crate) field: Arc<FqField>,
    pub(crate) idx: u32,
}

impl PartialEq for FqElem {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.field, &other.field) && self.idx == other.idx
    }
}
impl Eq for FqElem {}

// -- dense polynomial helpers over F_p (coefficients 0..p) --

fn poly_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    poly_rem(&mut prod, modulus, p);
    prod
}

/// Remainder of `a` modulo the monic polynomial `m`, in place.
fn poly_rem(a: &mut Vec<u64>, m: &[u64], p: u64) {
    let dm = m.len() - 1;
    while a.len() > dm {
        let lead = *a.last().unwrap() % p;
        let shift = a.len() - 1 - dm;
        if lead != 0 {
            for (i, &mi) in m.iter().enumerate() {
                let k = shift + i;
                let sub = (lead * mi) % p;
                a[k] = (a[k] + p * p - sub) % p;
            }
        }
        a.pop();
        poly_trim(a);
        if a.is_empty() {
            return;
        }
    }
    poly_trim(a);
}

fn poly_pow_mod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = base.to_vec();
    poly_rem(&mut b, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mul_mod(&acc, &b, m, p);
        }
        b = poly_mul_mod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn pow_mod_u64(mut a: u64, mut e: u64, p: u64) -> u64 {
    a %= p;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    acc
}

/// Degree of `gcd(a, b)` over `F_p`; `0` means coprime.  Both inputs must be
/// nonzero after trimming.
fn poly_gcd_degree(a: &[u64], b: &[u64], p: u64) -> usize {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        // poly_rem needs a monic divisor; scaling does not change the gcd.
        let lead = *b.last().unwrap() % p;
        if lead != 1 {
            let inv = pow_mod_u64(lead, p - 2, p);
            for c in b.iter_mut() {
                *c = *c * inv % p;
            }
        }
        poly_rem(&mut a, &b, p);
        std::mem::swap(&mut a, &mut b);
    }
    a.len() - 1
}

/// Is the monic polynomial `g` (low-to-high, degree `f`) irreducible over
/// `F_p`? Rabin's criterion: `x^{p^f} = x (mod g)` and
/// `gcd(x^{p^{f/l}} - x, g) = 1` for every prime `l | f`.  The gcd is
/// essential: for composite `f` a product of factors of distinct proper
/// degrees moves `x` under every sub-Frobenius yet still divides some
/// `x^{p^{f/l}} - x` partially.
fn is_irreducible(g: &[u64], p: u64) -> bool {
    let f = (g.len() - 1) as u32;
    let x = vec![0u64, 1];
    // x^{p^f} mod g by repeated p-th powering.
    let frob_iter = |start: &[u64], times: u32| -> Vec<u64> {
        let mut cur = start.to_vec();
        for _ in 0..times {
            cur = poly_pow_mod(&cur, p, g, p);
        }
        cur
    };
    let mut full = frob_iter(&x, f);
    poly_trim(&mut full);
    if full != x {
        return false;
    }
    for l in prime_divisors(f as u64) {
        let part = frob_iter(&x, f / l as u32);
        // part - x mod p, then gcd with g.
        let mut diff = part;
        if diff.len() < 2 {
            diff.resize(2, 0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        poly_trim(&mut diff);
        if diff.is_empty() || poly_gcd_degree(g, &diff, p) != 0 {
            return false;
        }
    }
    true
}

/// The canonical defining polynomial of `F_{p^f}`: the lexicographically
/// smallest monic irreducible, comparing coefficient tuples from the
/// highest-degree coefficient down.
pub fn canonical_irreducible(p: u64, f: u32) -> Vec<u64> {
    if f == 1 {
        return vec![0, 1];
    }
    let deg = f as usize;
    // Enumerate (c_{f-1}, .., c_0) in lexicographic order: counter in base p
    // with c_{f-1} as the most significant digit.
    let total = p.pow(f);
    for n in 0..total {
        let mut coeffs = vec![0u64; deg + 1];
        coeffs[deg] = 1;
        let mut m = n;
        // Least significant digit of the counter is c_0.
        for c in coeffs.iter_mut().take(deg) {
            *c = m % p;
            m /= p;
        }
        // Counter order must match tuple order (c_{f-1},..,c_0): the counter
        // increments c_0 fastest, which is exactly the lexicographic
        // successor for tuples read high-to-low.
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials of every degree exist");
}

impl FqField {
    pub fn new(p: u64, f: u32) -> Result<Arc<FqField>> {
        if !is_prime(p) {
            return Err(Error::config(format!("{p} is not prime")));
        }
        let q = p
            .checked_pow(f)
            .filter(|&q| q <= MAX_Q)
            .ok_or_else(|| Error::unsupported(format!("field size {p}^{f} too large")))?;
        let irred = canonical_irreducible(p, f);
        let mut field = FqField {
            p,
            f,
            q,
            irred,
            exp: Vec::new(),
            log: vec![u32::MAX; q as usize],
        };
        field.build_tables()?;
        Ok(Arc::new(field))
    }

    fn pack(&self, coeffs: &[u64]) -> u32 {
        let mut idx = 0u64;
        for &c in coeffs.iter().rev() {
            idx = idx * self.p + c;
        }
        idx as u32
    }

    fn unpack(&self, idx: u32) -> Vec<u64> {
        let mut coeffs = vec![0u64; self.f as usize];
        let mut m = idx as u64;
        for c in coeffs.iter_mut() {
            *c = m % self.p;
            m /= self.p;
        }
        coeffs
    }

    fn mul_packed(&self, a: u32, b: u32) -> u32 {
        let pa = self.unpack(a);
        let pb = self.unpack(b);
        let mut prod = poly_mul_mod(&pa, &pb, &self.irred, self.p);
        prod.resize(self.f as usize, 0);
        self.pack(&prod)
    }

    fn build_tables(&mut self) -> Result<()> {
        let order = self.q - 1;
        let divisors = prime_divisors(order);
        // Find a generator by order testing.
        let mut generator = None;
        'outer: for cand in 1..self.q {
            let cand = cand as u32;
            for &l in &divisors {
                if self.pow_packed(cand, order / l) == self.pack_one() {
                    continue 'outer;
                }
            }
            generator = Some(cand);
            break;
        }
        let generator =
            generator.ok_or_else(|| Error::unsupported("no generator found (not a field?)"))?;
        let mut exp = Vec::with_capacity(order as usize);
        let mut cur = self.pack_one();
        for i in 0..order {
            exp.push(cur);
            self.log[cur as usize] = i as u32;
            cur = self.mul_packed(cur, generator);
        }
        debug_assert_eq!(cur, self.pack_one(), "generator order mismatch");
        self.exp = exp;
        Ok(())
    }

    fn pack_one(&self) -> u32 {
        1
    }

    /// Slow packed power, used only while bootstrapping the tables.
    fn pow_packed(&self, a: u32, mut e: u64) -> u32 {
        let mut acc = self.pack_one();
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_packed(acc, b);
            }
            b = self.mul_packed(b, b);
            e >>= 1;
        }
        acc
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn degree(&self) -> u32 {
        self.f
    }
    pub fn order(&self) -> u64 {
        self.q
    }
    /// Defining polynomial, low-to-high coefficients.
    pub fn defining_poly(&self) -> &[u64] {
        &self.irred
    }
}

impl FqElem {
    pub fn zero(field: &Arc<FqField>) -> Self {
        FqElem {
            field: field.clone(),
            idx: 0,
        }
    }

    pub fn one(field: &Arc<FqField>) -> Self {
        FqElem {
            field: field.clone(),
            idx: 1,
        }
    }

    /// Embed a residue 0..p into the prime subfield.
    pub fn from_residue(field: &Arc<FqField>, r: u64) -> Self {
        FqElem {
            field: field.clone(),
            idx: (r % field.p) as u32,
        }
    }

    /// Element from packed index (coefficient vector in base p).
    pub fn from_index(field: &Arc<FqField>, idx: u64) -> Self {
        assert!(idx < field.q);
        FqElem {
            field: field.clone(),
            idx: idx as u32,
        }
    }

    pub fn index(&self) -> u64 {
        self.idx as u64
    }

    pub fn field(&self) -> &Arc<FqField> {
        &self.field
    }

    pub fn coeffs(&self) -> Vec<u64> {
        self.field.unpack(self.idx)
    }

    pub fn is_zero(&self) -> bool {
        self.idx == 0
    }

    /// Discrete log with respect to the field's fixed generator.
    pub fn dlog(&self) -> Option<u64> {
        if self.idx == 0 {
            None
        } else {
            Some(self.field.log[self.idx as usize] as u64)
        }
    }

    /// The fixed generator of the multiplicative group.
    pub fn generator(field: &Arc<FqField>) -> Self {
        FqElem {
            field: field.clone(),
            idx: field.exp[1],
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert!(Arc::ptr_eq(&self.field, &other.field));
        let f = &self.field;
        let a = f.unpack(self.idx);
        let b = f.unpack(other.idx);
        let sum: Vec<u64> = a.iter().zip(&b).map(|(x, y)| (x + y) % f.p).collect();
        FqElem {
            field: self.field.clone(),
            idx: f.pack(&sum),
        }
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        let a = f.unpack(self.idx);
        let neg: Vec<u64> = a.iter().map(|x| (f.p - x) % f.p).collect();
        FqElem {
            field: self.field.clone(),
            idx: f.pack(&neg),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert!(Arc::ptr_eq(&self.field, &other.field));
        if self.idx == 0 || other.idx == 0 {
            return Self::zero(&self.field);
        }
        let f = &self.field;
        let order = f.q - 1;
        let l = (f.log[self.idx as usize] as u64 + f.log[other.idx as usize] as u64) % order;
        FqElem {
            field: self.field.clone(),
            idx: f.exp[l as usize],
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.idx == 0 {
            return Err(Error::singular("inverse of zero in F_q"));
        }
        let f = &self.field;
        let order = f.q - 1;
        let l = (order - f.log[self.idx as usize] as u64) % order;
        Ok(FqElem {
            field: self.field.clone(),
            idx: f.exp[l as usize],
        })
    }

    pub fn pow(&self, e: u64) -> Self {
        if self.idx == 0 {
            return if e == 0 {
                Self::one(&self.field)
            } else {
                Self::zero(&self.field)
            };
        }
        let f = &self.field;
        let order = (f.q - 1) as u128;
        let l = (f.log[self.idx as usize] as u128 * e as u128) % order;
        FqElem {
            field: self.field.clone(),
            idx: f.exp[l as usize],
        }
    }

    /// Absolute trace to the prime field, as a residue `0..p`.
    pub fn trace_to_prime(&self) -> u64 {
        let f = &self.field;
        let mut acc = Self::zero(&self.field);
        let mut term = self.clone();
        for _ in 0..f.f {
            acc = acc.add(&term);
            term = term.pow(f.p);
        }
        let coeffs = acc.coeffs();
        debug_assert!(coeffs.iter().skip(1).all(|&c| c == 0), "trace not in F_p");
        coeffs[0]
    }

    /// Norm down to the subfield of order `q_sub` (which must satisfy
    /// `q_sub^m = q`): `x^{(q - 1) / (q_sub - 1)}` for nonzero `x`.
    pub fn norm_to_subfield(&self, q_sub: u64) -> Self {
        let q = self.field.q;
        debug_assert!(subfield_exponent(q, q_sub).is_some());
        if self.idx == 0 {
            return Self::zero(&self.field);
        }
        self.pow((q - 1) / (q_sub - 1))
    }
}

/// If `q = q_sub^m`, return `m`.
pub fn subfield_exponent(q: u64, q_sub: u64) -> Option<u32> {
    let mut acc = 1u64;
    let mut m = 0u32;
    while acc < q {
        acc = acc.checked_mul(q_sub)?;
        m += 1;
    }
    (acc == q).then_some(m)
}

/// All elements of the field in index order (starting with 0).
pub fn all_elements(field: &Arc<FqField>) -> impl Iterator<Item = FqElem> + '_ {
    (0..field.q).map(move |i| FqElem::from_index(field, i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_polys_are_smallest() {
        // x^2 + 1 is irreducible mod 3 and smallest; mod 5 the smallest is
        // x^2 + 2 (x^2 and x^2 + 1 both split).
        assert_eq!(canonical_irreducible(3, 2), vec![1, 0, 1]);
        assert_eq!(canonical_irreducible(5, 2), vec![2, 0, 1]);
        assert_eq!(canonical_irreducible(2, 3), vec![1, 1, 0, 1]);
    }

    #[test]
    fn field_axioms_smoke() {
        let f = FqField::new(3, 2).unwrap();
        for a in all_elements(&f) {
            for b in all_elements(&f) {
                assert_eq!(a.mul(&b), b.mul(&a));
                assert_eq!(a.add(&b), b.add(&a));
            }
            if !a.is_zero() {
                let ai = a.inv().unwrap();
                assert_eq!(a.mul(&ai), FqElem::one(&f));
            }
        }
    }

    #[test]
    fn distributivity_spot() {
        let f = FqField::new(2, 4).unwrap();
        for a in all_elements(&f) {
            for b in all_elements(&f) {
                let c = FqElem::from_index(&f, 7);
                let lhs = a.add(&b).mul(&c);
                let rhs = a.mul(&c).add(&b.mul(&c));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn trace_surjects_onto_prime_field() {
        let f = FqField::new(5, 2).unwrap();
        let mut seen = [false; 5];
        for a in all_elements(&f) {
            seen[a.trace_to_prime() as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn norm_lands_in_subfield_and_surjects() {
        // F_64 over F_4: norm x -> x^{63/3 = 21}; image generates F_4*.
        let f = FqField::new(2, 6).unwrap();
        let mut orders = std::collections::HashSet::new();
        for a in all_elements(&f) {
            if a.is_zero() {
                continue;
            }
            let n = a.norm_to_subfield(4);
            // In the subfield of order 4: n^4 = n.
            assert_eq!(n.pow(4), n);
            orders.insert(n.index());
        }
        assert_eq!(orders.len(), 3);
    }

    #[test]
    fn dlog_consistency() {
        let f = FqField::new(7, 1).unwrap();
        let g = FqElem::generator(&f);
        for a in all_elements(&f) {
            if let Some(l) = a.dlog() {
                assert_eq!(g.pow(l), a);
            }
        }
    }

    #[test]
    fn composite_degree_moduli_are_really_irreducible() {
        // Degree 6 once accepted a product of degree 1, 2, 3 factors because
        // the sub-Frobenius check skipped the gcd; a reducible modulus shows
        // up as an element of multiplicative order below q - 1.
        for (p, f) in [(2u64, 6u32), (3, 6), (5, 4), (7, 4)] {
            let field = FqField::new(p, f).unwrap();
            let g = FqElem::generator(&field);
            let order = field.order() - 1;
            assert_eq!(g.pow(order), FqElem::one(&field));
            for l in [2u64, 3, 5, 7] {
                if order % l == 0 {
                    assert_ne!(g.pow(order / l), FqElem::one(&field), "p={p} f={f} l={l}");
                }
            }
        }
    }
}
