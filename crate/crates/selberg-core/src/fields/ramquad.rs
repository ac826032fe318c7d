//! Root detection in the tame ramified quadratic extensions of `Q_p`.
//!
//! For odd `p` there are exactly two: `Q_p(pi)` with `pi^2 = c p`, where
//! `c` is 1 or a fixed quadratic nonresidue. Integral elements are
//! `a + b pi` with coordinates modulo `p^k`, so the element is pinned
//! modulo `pi^{2k}`; the pi-adic valuation is `min(2 val a, 2 val b + 1)`.
//!
//! Splitting-type detection only ever needs to know whether a quartic
//! with no unramified roots has a root here (it does iff it splits into
//! two ramified quadratics), so the search certifies existence and stops:
//! `val f(a) > 2 val f'(a)` already guarantees a root near `a` without
//! running the refinement.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;

use crate::{error::Error, Result};

#[derive(Clone, Debug)]
struct RqElem {
    p: u64,
    /// pi^2 = c * p
    c: u64,
    /// coordinates known modulo p^k
    k: u32,
    a: BigUint,
    b: BigUint,
}

fn val_p(x: &BigUint, p: u64, cap: u32) -> u32 {
    if x.is_zero() {
        return cap;
    }
    let p = BigUint::from(p);
    let mut v = 0;
    let mut x = x.clone();
    while v < cap {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            break;
        }
        x = q;
        v += 1;
    }
    v
}

impl RqElem {
    fn from_residue(p: u64, c: u64, k: u32, r: u64) -> Self {
        RqElem {
            p,
            c,
            k,
            a: BigUint::from(r),
            b: BigUint::zero(),
        }
    }

    fn modulus(&self) -> BigUint {
        BigUint::from(self.p).pow(self.k)
    }

    /// pi-adic valuation, capped at 2k.
    fn val_pi(&self) -> u32 {
        let va = 2 * val_p(&self.a, self.p, self.k);
        let vb = 2 * val_p(&self.b, self.p, self.k) + 1;
        va.min(vb).min(2 * self.k)
    }

    fn mul(&self, rhs: &Self) -> Self {
        let m = self.modulus();
        let cp = BigUint::from(self.c) * BigUint::from(self.p);
        RqElem {
            a: (&self.a * &rhs.a + &self.b * &rhs.b * cp) % &m,
            b: (&self.a * &rhs.b + &self.b * &rhs.a) % &m,
            ..self.clone()
        }
    }

    fn add_int(&self, n: &BigInt) -> Self {
        let m = self.modulus();
        let r = n.mod_floor(&BigInt::from(m.clone()));
        RqElem {
            a: (&self.a + r.to_biguint().unwrap()) % &m,
            ..self.clone()
        }
    }

    /// a + r * pi^j
    fn bump(&self, r: u64, j: u32) -> Self {
        let m = self.modulus();
        let shift = BigUint::from(self.p).pow(j / 2) * BigUint::from(r);
        let mut out = self.clone();
        if j % 2 == 0 {
            out.a = (&out.a + shift) % &m;
        } else {
            out.b = (&out.b + shift) % &m;
        }
        out
    }
}

fn eval(f: &[BigInt], x: &RqElem) -> RqElem {
    let mut acc = RqElem {
        a: BigUint::zero(),
        b: BigUint::zero(),
        ..x.clone()
    };
    for c in f.iter().rev() {
        acc = acc.mul(x).add_int(c);
    }
    acc
}

/// Whether the monic squarefree integer polynomial `f` (low-to-high
/// coefficients) has a root in `Q_p(sqrt(c p))`, decided at coordinate
/// precision `k`.
pub fn has_root_ramified_quadratic(f: &[BigInt], p: u64, c: u64, k: u32) -> Result<bool> {
    assert!(
        f.last().map(|h| *h == BigInt::from(1)).unwrap_or(false),
        "monic input"
    );
    let fprime: Vec<BigInt> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, a)| a * BigInt::from(i as i64))
        .collect();
    let depth_cap = k.saturating_sub(2);

    let mut stack: Vec<(RqElem, u32)> = Vec::new();
    for r in 0..p {
        stack.push((RqElem::from_residue(p, c, k, r), 1));
    }
    while let Some((x, level)) = stack.pop() {
        let vf = eval(f, &x).val_pi();
        if vf < level {
            continue;
        }
        let vfp = eval(&fprime, &x).val_pi();
        if vf > 2 * vfp && 2 * vfp < k {
            return Ok(true);
        }
        if level > depth_cap {
            return Err(Error::precision(format!(
                "ramified root search exceeded depth {depth_cap} at precision {k}"
            )));
        }
        for r in 0..p {
            let child = x.bump(r, level);
            if eval(f, &child).val_pi() >= level + 1 {
                stack.push((child, level + 1));
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn sqrt_p_lives_in_the_right_extension() {
        // x^2 - 5 has a root for pi^2 = 5, none for pi^2 = 2*5.
        assert!(has_root_ramified_quadratic(&ints(&[-5, 0, 1]), 5, 1, 24).unwrap());
        assert!(!has_root_ramified_quadratic(&ints(&[-5, 0, 1]), 5, 2, 24).unwrap());
        assert!(has_root_ramified_quadratic(&ints(&[-10, 0, 1]), 5, 2, 24).unwrap());
    }

    #[test]
    fn quartic_split_into_two_ramified_quadratics_is_seen() {
        // (x^2 - 5)(x^2 - 45): all roots in Q_5(sqrt 5), residues collide.
        let f = ints(&[225, 0, -50, 0, 1]);
        assert!(has_root_ramified_quadratic(&f, 5, 1, 32).unwrap());
        assert!(!has_root_ramified_quadratic(&f, 5, 2, 32).unwrap());
    }

    #[test]
    fn e2f2_quartic_has_no_quadratic_root() {
        // x^4 - 30x^2 + 25: roots sqrt(5)(±1±t), t^2 = 2; the field is the
        // ramified quadratic over Q_25, degree 4 over Q_5.
        let f = ints(&[25, 0, -30, 0, 1]);
        assert!(!has_root_ramified_quadratic(&f, 5, 1, 32).unwrap());
        assert!(!has_root_ramified_quadratic(&f, 5, 2, 32).unwrap());
    }

    #[test]
    fn unit_roots_are_found_too() {
        // x^2 - 4 has the rational (hence integral) root 2.
        assert!(has_root_ramified_quadratic(&ints(&[-4, 0, 1]), 5, 1, 24).unwrap());
    }
}
