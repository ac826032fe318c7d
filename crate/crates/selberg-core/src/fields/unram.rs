//! Integral elements of unramified extensions of `Q_p`.
//!
//! The extension of residue degree `m` is presented as `Z_p[x]/(g)` where
//! `g` is the canonical (lexicographically smallest) monic irreducible of
//! degree `m` over `F_p`, lifted with digit coefficients. Elements carry
//! coordinates modulo `p^K` for a shared absolute precision `K`; since the
//! extension is unramified and `g` stays irreducible mod `p`, the ring of
//! integers is exactly `Z_p[theta]` and the element valuation is the
//! minimum coordinate valuation.
//!
//! The module also hosts the exhaustive residue search + Hensel lifting
//! used to find all roots of a squarefree integral polynomial in the
//! extension; splitting-type detection builds on it.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::fields::ff::{all_elements, FqElem, FqField};
use crate::fields::padic::PAdicNum;
use crate::{error::Error, Result};

/// An unramified extension `Q_{p^m} / Q_p` presented by its canonical
/// defining polynomial.
#[derive(Debug)]
pub struct UnramExt {
    p: u64,
    m: u32,
    /// Monic defining polynomial, low-to-high integer coefficients.
    g: Vec<BigInt>,
    /// Residue field with the same defining polynomial.
    ff: Arc<FqField>,
    /// Power sums `Tr(theta^j)` for `j < m`, exact integers.
    trace_powers: Vec<BigInt>,
}

/// Integral element of an [`UnramExt`], coordinates modulo `p^K`.
#[derive(Debug, Clone)]
pub struct OElem {
    ext: Arc<UnramExt>,
    /// Absolute precision: coordinates are known modulo `p^k_abs`.
    k_abs: u32,
    coords: Vec<BigUint>,
}

impl UnramExt {
    pub fn new(p: u64, m: u32) -> Result<Arc<UnramExt>> {
        let ff = FqField::new(p, m)?;
        let g: Vec<BigInt> = ff.defining_poly().iter().map(|&c| BigInt::from(c)).collect();
        let trace_powers = power_sums(&g, m as usize);
        Ok(Arc::new(UnramExt {
            p,
            m,
            g,
            ff,
            trace_powers,
        }))
    }

    /// Process-wide cache: the tables behind an extension depend only on
    /// `(p, m)` (precision lives on elements), and splitting-type detection
    /// requests the same few extensions millions of times.
    pub fn shared(p: u64, m: u32) -> Result<Arc<UnramExt>> {
        use std::collections::HashMap;
        use std::sync::{Mutex, OnceLock};
        static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Arc<UnramExt>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(ext) = cache.lock().unwrap().get(&(p, m)) {
            return Ok(ext.clone());
        }
        let ext = UnramExt::new(p, m)?;
        cache.lock().unwrap().insert((p, m), ext.clone());
        Ok(ext)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn degree(&self) -> u32 {
        self.m
    }
    pub fn residue_field(&self) -> &Arc<FqField> {
        &self.ff
    }
    /// Defining polynomial with exact integer coefficients, low-to-high.
    pub fn defining_poly(&self) -> &[BigInt] {
        &self.g
    }
    /// `Tr(theta^j)` for `j < m`.
    pub fn trace_of_powers(&self) -> &[BigInt] {
        &self.trace_powers
    }

    /// Trace of an element given by exact rational coordinates.
    pub fn trace_rational(&self, coords: &[BigRational]) -> BigRational {
        assert_eq!(coords.len(), self.m as usize);
        coords
            .iter()
            .zip(&self.trace_powers)
            .map(|(c, s)| c * BigRational::from_integer(s.clone()))
            .sum()
    }

    fn modulus(&self, k_abs: u32) -> BigUint {
        BigUint::from(self.p).pow(k_abs)
    }
}

/// Power sums of the roots of a monic integer polynomial via Newton's
/// identities; returns `s_0 .. s_{count-1}`.
fn power_sums(g: &[BigInt], count: usize) -> Vec<BigInt> {
    let m = g.len() - 1;
    // Elementary symmetric functions with signs: e_k = (-1)^k g_{m-k}.
    let e = |k: usize| -> BigInt {
        if k > m {
            BigInt::zero()
        } else {
            let c = g[m - k].clone();
            if k % 2 == 0 {
                c
            } else {
                -c
            }
        }
    };
    let mut s = vec![BigInt::from(m as i64)];
    for k in 1..count {
        // s_k = e_1 s_{k-1} - e_2 s_{k-2} + .. + (-1)^{k-1} k e_k   (k <= m)
        let mut acc = BigInt::zero();
        for i in 1..=k.min(m) {
            let sign = if i % 2 == 1 { BigInt::one() } else { -BigInt::one() };
            if i < k {
                acc += sign * e(i) * &s[k - i];
            } else {
                acc += sign * e(k) * BigInt::from(k as i64);
            }
        }
        s.push(acc);
    }
    s
}

impl OElem {
    pub fn zero(ext: &Arc<UnramExt>, k_abs: u32) -> Self {
        OElem {
            ext: ext.clone(),
            k_abs,
            coords: vec![BigUint::zero(); ext.m as usize],
        }
    }

    /// Lift a residue-field element with zero higher digits.
    pub fn from_residue(ext: &Arc<UnramExt>, r: &FqElem, k_abs: u32) -> Self {
        let coords = r.coeffs().into_iter().map(BigUint::from).collect();
        OElem {
            ext: ext.clone(),
            k_abs,
            coords,
        }
    }

    /// Element from integer coordinates.
    pub fn from_int_coords(ext: &Arc<UnramExt>, coords: &[BigInt], k_abs: u32) -> Self {
        assert_eq!(coords.len(), ext.m as usize);
        let modulus = ext.modulus(k_abs);
        let coords = coords
            .iter()
            .map(|c| {
                let r = c % BigInt::from(modulus.clone());
                let r = if r.is_negative() {
                    r + BigInt::from(modulus.clone())
                } else {
                    r
                };
                r.to_biguint().unwrap()
            })
            .collect();
        OElem {
            ext: ext.clone(),
            k_abs,
            coords,
        }
    }

    pub fn precision(&self) -> u32 {
        self.k_abs
    }

    pub fn coords(&self) -> &[BigUint] {
        &self.coords
    }

    /// Coordinates as p-adic numbers (relative precision clipped at the
    /// element's absolute precision).
    pub fn coords_padic(&self) -> Vec<PAdicNum> {
        self.coords
            .iter()
            .map(|c| {
                PAdicNum::from_rational(
                    &BigRational::from_integer(BigInt::from(c.clone())),
                    self.ext.p,
                    self.k_abs.max(1),
                )
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Valuation = minimum coordinate valuation; `None` when zero mod p^K.
    pub fn valuation(&self) -> Option<u32> {
        let p = BigUint::from(self.ext.p);
        let mut best: Option<u32> = None;
        for c in &self.coords {
            if c.is_zero() {
                continue;
            }
            let mut v = 0u32;
            let mut m = c.clone();
            while (&m % &p).is_zero() {
                v += 1;
                m /= &p;
            }
            best = Some(best.map_or(v, |b| b.min(v)));
        }
        best
    }

    pub fn residue(&self) -> FqElem {
        let p = self.ext.p;
        let coeffs: Vec<u64> = self
            .coords
            .iter()
            .map(|c| (c % BigUint::from(p)).to_u64().unwrap())
            .collect();
        let mut idx = 0u64;
        for &c in coeffs.iter().rev() {
            idx = idx * p + c;
        }
        FqElem::from_index(&self.ext.ff, idx)
    }

    fn binop(&self, other: &Self, f: impl Fn(&BigUint, &BigUint, &BigUint) -> BigUint) -> Self {
        assert!(Arc::ptr_eq(&self.ext, &other.ext));
        let k_abs = self.k_abs.min(other.k_abs);
        let modulus = self.ext.modulus(k_abs);
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| f(&(a % &modulus), &(b % &modulus), &modulus))
            .collect();
        OElem {
            ext: self.ext.clone(),
            k_abs,
            coords,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.binop(other, |a, b, m| (a + b) % m)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.binop(other, |a, b, m| ((a + m) - b) % m)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert!(Arc::ptr_eq(&self.ext, &other.ext));
        let k_abs = self.k_abs.min(other.k_abs);
        let modulus = self.ext.modulus(k_abs);
        let m = self.ext.m as usize;
        let mut prod = vec![BigUint::zero(); 2 * m - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                prod[i + j] = (&prod[i + j] + a * b) % &modulus;
            }
        }
        // Reduce by the monic defining polynomial.
        let g = &self.ext.g;
        for k in (m..2 * m - 1).rev() {
            let lead = prod[k].clone();
            if !lead.is_zero() {
                for i in 0..m {
                    // prod[k - m + i] -= lead * g[i]  (mod p^K)
                    let gi = &g[i];
                    let term = if gi.is_negative() {
                        // g has digit coefficients, but stay defensive.
                        let mag = (-gi).to_biguint().unwrap() % &modulus;
                        (&lead * mag) % &modulus
                    } else {
                        (&modulus - (&lead * gi.to_biguint().unwrap()) % &modulus) % &modulus
                    };
                    prod[k - m + i] = (&prod[k - m + i] + term) % &modulus;
                }
            }
            prod.pop();
        }
        OElem {
            ext: self.ext.clone(),
            k_abs,
            coords: prod,
        }
    }

    pub fn scalar_mul_int(&self, c: &BigInt) -> Self {
        let modulus = self.ext.modulus(self.k_abs);
        let cm = {
            let r = c % BigInt::from(modulus.clone());
            let r = if r.is_negative() {
                r + BigInt::from(modulus.clone())
            } else {
                r
            };
            r.to_biguint().unwrap()
        };
        let coords = self.coords.iter().map(|a| (a * &cm) % &modulus).collect();
        OElem {
            ext: self.ext.clone(),
            k_abs: self.k_abs,
            coords,
        }
    }

    /// Inverse of a unit (valuation 0), by residue-field inversion followed
    /// by Newton refinement `x <- x(2 - ax)`.
    pub fn inv(&self) -> Result<Self> {
        if self.valuation() != Some(0) {
            return Err(Error::singular("inverse requires a unit"));
        }
        let r_inv = self.residue().inv()?;
        let mut x = OElem::from_residue(&self.ext, &r_inv, self.k_abs);
        let two = OElem::from_int_coords(
            &self.ext,
            &{
                let mut v = vec![BigInt::zero(); self.ext.m as usize];
                v[0] = BigInt::from(2);
                v
            },
            self.k_abs,
        );
        // Each step doubles the number of correct digits.
        let mut correct = 1u32;
        while correct < self.k_abs {
            x = x.mul(&two.sub(&self.mul(&x)));
            correct *= 2;
        }
        Ok(x)
    }

    /// Divide by `p^e` exactly; fails if some coordinate is not divisible.
    pub fn shift_down(&self, e: u32) -> Result<Self> {
        let pe = BigUint::from(self.ext.p).pow(e);
        if self.k_abs <= e {
            return Err(Error::precision("shift_down exhausts precision"));
        }
        let mut coords = Vec::with_capacity(self.coords.len());
        for c in &self.coords {
            let (q, r) = num_integer::Integer::div_rem(c, &pe);
            if !r.is_zero() {
                return Err(Error::singular("not divisible by p^e"));
            }
            coords.push(q);
        }
        Ok(OElem {
            ext: self.ext.clone(),
            k_abs: self.k_abs - e,
            coords,
        })
    }

    /// Reinterpret at a higher modulus, padding unknown digits with zero.
    /// Only sound when the caller tracks accuracy separately.
    pub fn lift_to(&self, k_abs: u32) -> Self {
        debug_assert!(k_abs >= self.k_abs);
        OElem {
            ext: self.ext.clone(),
            k_abs,
            coords: self.coords.clone(),
        }
    }

    /// Truncate to a lower absolute precision.
    pub fn truncate(&self, k_abs: u32) -> Self {
        let modulus = self.ext.modulus(k_abs);
        OElem {
            ext: self.ext.clone(),
            k_abs,
            coords: self.coords.iter().map(|c| c % &modulus).collect(),
        }
    }

    /// Trace to `Q_p` as an integer modulo `p^K`.
    pub fn trace(&self) -> BigUint {
        let modulus = self.ext.modulus(self.k_abs);
        let mut acc = BigUint::zero();
        for (c, s) in self.coords.iter().zip(&self.ext.trace_powers) {
            let sm = {
                let r = s % BigInt::from(modulus.clone());
                let r = if r.is_negative() {
                    r + BigInt::from(modulus.clone())
                } else {
                    r
                };
                r.to_biguint().unwrap()
            };
            acc = (acc + c * sm) % &modulus;
        }
        acc
    }

    /// Norm to `Q_p` as an integer modulo `p^K`, via the determinant of the
    /// multiplication matrix (cofactor expansion; degrees are tiny).
    pub fn norm(&self) -> BigUint {
        let m = self.ext.m as usize;
        let modulus = self.ext.modulus(self.k_abs);
        // Columns: coordinates of x * theta^j.
        let mut cols = Vec::with_capacity(m);
        let mut cur = self.clone();
        let theta = {
            let mut v = vec![BigInt::zero(); m];
            if m > 1 {
                v[1] = BigInt::one();
            }
            OElem::from_int_coords(&self.ext, &v, self.k_abs)
        };
        for _ in 0..m {
            cols.push(cur.coords.clone());
            cur = cur.mul(&theta);
        }
        det_mod(&cols, &modulus)
    }
}

/// Determinant modulo `n` by cofactor expansion over the first row of the
/// column-major matrix; dimensions are at most 4.
fn det_mod(cols: &[Vec<BigUint>], n: &BigUint) -> BigUint {
    let dim = cols.len();
    if dim == 1 {
        return cols[0][0].clone() % n;
    }
    let mut acc = BigUint::zero();
    for (j, col) in cols.iter().enumerate() {
        if col[0].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigUint>> = cols
            .iter()
            .enumerate()
            .filter(|&(jj, _)| jj != j)
            .map(|(_, c)| c[1..].to_vec())
            .collect();
        let term = (&col[0] * det_mod(&minor, n)) % n;
        if j % 2 == 0 {
            acc = (acc + term) % n;
        } else {
            acc = (acc + (n - term)) % n;
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Root search
// ---------------------------------------------------------------------------

/// All roots of a squarefree monic integer polynomial in the ring of
/// integers of `ext`, each to absolute precision about
/// `k_abs - val f'(root)`.
///
/// Exhaustive residue search followed by branching Hensel lifting: a branch
/// certifies a root as soon as `val f(a) > 2 val f'(a)` (which guarantees a
/// unique root in the Newton basin of `a`). A certified root is divided out
/// and the search restarts on the quotient, so clusters of roots sharing
/// many digits are all found. Branch depth beyond `k_abs / 2 - 1` reports
/// precision exhaustion so the caller can escalate.
pub fn roots_in_extension(f: &[BigInt], ext: &Arc<UnramExt>, k_abs: u32) -> Result<Vec<OElem>> {
    assert!(f.last().map(|c| c.is_one()).unwrap_or(false), "monic input");
    let fe: Vec<OElem> = f
        .iter()
        .map(|c| {
            let mut v = vec![BigInt::zero(); ext.degree() as usize];
            v[0] = c.clone();
            OElem::from_int_coords(ext, &v, k_abs)
        })
        .collect();
    let mut roots = Vec::new();
    roots_rec(&fe, ext, k_abs, &mut roots)?;
    Ok(roots)
}

fn eval_poly(coeffs: &[OElem], a: &OElem, ext: &Arc<UnramExt>, k_abs: u32) -> OElem {
    let mut acc = OElem::zero(ext, k_abs);
    for c in coeffs.iter().rev() {
        acc = acc.mul(a).add(c);
    }
    acc
}

fn roots_rec(
    f: &[OElem],
    ext: &Arc<UnramExt>,
    k_abs: u32,
    roots: &mut Vec<OElem>,
) -> Result<()> {
    let deg = f.len() - 1;
    if deg == 0 {
        return Ok(());
    }
    let fq = ext.residue_field();
    let p = ext.p();
    let fprime: Vec<OElem> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.scalar_mul_int(&BigInt::from(i as i64)))
        .collect();
    let depth_cap = (k_abs / 2).saturating_sub(1);

    // Residue-level candidates.
    let mut stack: Vec<(OElem, u32)> = Vec::new();
    for r in all_elements(fq) {
        let mut v = FqElem::zero(fq);
        for c in f.iter().rev() {
            v = v.mul(&r).add(&c.residue());
        }
        if v.is_zero() {
            stack.push((OElem::from_residue(ext, &r, k_abs), 1));
        }
    }

    while let Some((a, level)) = stack.pop() {
        let fa = eval_poly(f, &a, ext, k_abs);
        let va = fa.valuation().unwrap_or(k_abs);
        if va < level {
            continue; // the digit guess does not extend to a root
        }
        let fpa = eval_poly(&fprime, &a, ext, k_abs);
        let vfp = fpa.valuation().unwrap_or(k_abs);
        if va > 2 * vfp && 2 * vfp < k_abs {
            let root = newton_refine(f, &fprime, a, ext, k_abs)?;
            roots.push(root.clone());
            // Divide out (x - root) and restart: any remaining roots,
            // including ones sharing digits with this root, live in the
            // quotient. Synthetic division is exact at this modulus.
            let mut quo: Vec<OElem> = Vec::with_capacity(deg);
            let mut carry = OElem::zero(ext, k_abs);
            for c in f.iter().rev() {
                carry = carry.mul(&root).add(c);
                quo.push(carry.clone());
            }
            quo.pop(); // remainder f(root) ~ 0
            quo.reverse();
            return roots_rec(&quo, ext, k_abs, roots);
        }
        if level > depth_cap {
            return Err(Error::precision(format!(
                "root search branch exceeded depth {depth_cap} at precision {k_abs}"
            )));
        }
        // Branch on the next digit.
        for r in all_elements(fq) {
            let mut bump = OElem::from_residue(ext, &r, k_abs);
            for _ in 0..level {
                bump = bump.scalar_mul_int(&BigInt::from(p));
            }
            let child = a.add(&bump);
            let fc = eval_poly(f, &child, ext, k_abs);
            if fc.valuation().unwrap_or(k_abs) >= level + 1 {
                stack.push((child, level + 1));
            }
        }
    }
    Ok(())
}

/// Newton iteration from a certified seed. All arithmetic stays at the
/// fixed modulus `p^k_abs`; the result is accurate to `k_abs - val f'`.
fn newton_refine(
    f: &[OElem],
    fprime: &[OElem],
    mut x: OElem,
    ext: &Arc<UnramExt>,
    k_abs: u32,
) -> Result<OElem> {
    let p = ext.p();
    loop {
        let fx = eval_poly(f, &x, ext, k_abs);
        let vx = fx.valuation().unwrap_or(k_abs);
        if vx >= k_abs {
            return Ok(x);
        }
        let fpx = eval_poly(fprime, &x, ext, k_abs);
        let vpx = fpx.valuation().unwrap_or(k_abs);
        if vpx >= vx {
            // Stalled: cannot improve at this precision.
            return Ok(x);
        }
        // step = p^{vx - vpx} * (unit(fx) / unit(fpx)), exact mod p^k up to
        // the top vpx digits.
        let num = fx.shift_down(vx)?.truncate(k_abs - vpx).lift_to(k_abs);
        let den = fpx.shift_down(vpx)?.truncate(k_abs - vpx).lift_to(k_abs);
        let mut step = num.mul(&den.inv()?);
        for _ in 0..(vx - vpx) {
            step = step.scalar_mul_int(&BigInt::from(p));
        }
        let next = x.sub(&step);
        if next.sub(&x).is_zero() {
            return Ok(next);
        }
        x = next;
    }
}
