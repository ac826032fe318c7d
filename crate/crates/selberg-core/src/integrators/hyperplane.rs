//! Certified integrals over the trace hyperplane of a product of
//! unramified extensions.
//!
//! The domain is `S = {(x_1, .., x_k) : sum_i Tr(a_i x_i) = 1}` inside
//! `E_1 x .. x E_k`. In power-basis coordinates the constraint is a single
//! affine equation `sum kappa_j y_j = 1`; solving it for the coordinate
//! whose `kappa` has minimal valuation parameterizes `S` by the remaining
//! `d - 1` coordinates, and the invariant measure normalized against the
//! self-dual measures upstairs is the coordinate measure divided by
//! `|kappa_drop|`. Each component then contributes `|x_i|_{E_i}^{s_i - 1}`
//! as a norm factor (an affine factor when `E_i` is the base field), and
//! the stratified engine integrates the product over the whole parameter
//! space.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::fields::rational_valuation;
use crate::fields::UnramExt;
use crate::integrators::cells::{padic_full_integrate, EngineConfig, PadicIntegrand};
use crate::integrators::estimate::IntegralEstimate;
use crate::integrators::factors::{qc, AffineFactor, NormFactor};
use crate::{C64, Result};

/// One unramified component `E_i` of the hyperplane domain.
pub struct HyperplaneComponent {
    /// Residue degree of `E_i` over the base; 1 is the base field itself.
    pub f: u32,
    /// Exponent `s_i` of the unramified character `|.|_{E_i}^{s_i}`
    /// weighting this component.
    pub exponent: C64,
    /// Twist `a_i` in power-basis coordinates; empty means untwisted.
    pub twist: Vec<BigRational>,
}

impl HyperplaneComponent {
    pub fn new(f: u32, exponent: C64) -> Self {
        HyperplaneComponent {
            f,
            exponent,
            twist: Vec::new(),
        }
    }

    pub fn twisted(mut self, twist: Vec<BigRational>) -> Self {
        self.twist = twist;
        self
    }

    fn twist_coords(&self) -> Result<Vec<BigRational>> {
        if self.twist.is_empty() {
            let mut t = vec![BigRational::zero(); self.f as usize];
            t[0] = BigRational::one();
            return Ok(t);
        }
        if self.twist.len() != self.f as usize {
            return Err(Error::config(format!(
                "twist has {} coordinates for a degree {} component",
                self.twist.len(),
                self.f
            )));
        }
        if self.twist.iter().all(|c| c.is_zero()) {
            return Err(Error::config("twist must be a unit of the component, not zero"));
        }
        Ok(self.twist.clone())
    }
}

/// Multiply an element in power-basis coordinates by the generator,
/// reducing by the monic defining polynomial.
fn times_theta(ext: &UnramExt, coords: &[BigRational]) -> Vec<BigRational> {
    let m = ext.degree() as usize;
    let g = ext.defining_poly();
    let top = coords[m - 1].clone();
    let mut out = vec![BigRational::zero(); m];
    for i in 1..m {
        out[i] = coords[i - 1].clone();
    }
    for (i, gi) in g.iter().take(m).enumerate() {
        out[i] -= &top * BigRational::from_integer(gi.clone());
    }
    out
}

/// `chi_i(a_i^{-1})` for the unramified character of exponent `s_i`: the
/// covariance factor the twisted integral picks up relative to the
/// untwisted one.
pub fn inverse_twist_character(p: u64, comp: &HyperplaneComponent) -> Result<C64> {
    let coords = comp.twist_coords()?;
    let v = coords
        .iter()
        .filter_map(|c| rational_valuation(c, p))
        .min()
        .expect("twist has a nonzero coordinate");
    Ok(qc(p, comp.exponent * (comp.f as i64 * v) as f64))
}

/// Integrate `prod_i c_i(x_i) |x_i|_{E_i}^{-1}` over the twisted trace
/// hyperplane `sum_i Tr(a_i x_i) = 1`.
///
/// Requires total degree at least 2, `re s_i > 0` for every component and
/// `sum_i f_i re s_i < 1`, the convergence region of the integral.
pub fn trace_hyperplane_integrate(
    p: u64,
    comps: &[HyperplaneComponent],
    cfg: &EngineConfig,
) -> Result<IntegralEstimate> {
    let d: u32 = comps.iter().map(|c| c.f).sum();
    if comps.is_empty() || d < 2 {
        return Err(Error::config(
            "the hyperplane integral needs total degree at least 2",
        ));
    }
    let mut load = 0.0;
    for comp in comps {
        if !(comp.exponent.re > 0.0) {
            return Err(Error::region(format!(
                "component exponent re {} <= 0",
                comp.exponent.re
            )));
        }
        load += comp.f as f64 * comp.exponent.re;
    }
    if !(load < 1.0) {
        return Err(Error::region(format!(
            "sum of f_i re s_i = {load} >= 1; the hyperplane integral diverges"
        )));
    }

    // One kappa per global power-basis coordinate: the trace pairing of
    // the twist against that basis vector.
    let mut kappa: Vec<BigRational> = Vec::with_capacity(d as usize);
    for comp in comps {
        let ext = UnramExt::shared(p, comp.f)?;
        let mut a = comp.twist_coords()?;
        for _ in 0..comp.f {
            kappa.push(ext.trace_rational(&a));
            a = times_theta(&ext, &a);
        }
    }
    let drop = kappa
        .iter()
        .enumerate()
        .filter_map(|(j, k)| rational_valuation(k, p).map(|v| (v, j)))
        .min()
        .map(|(_, j)| j)
        .ok_or_else(|| Error::singular("the trace form vanishes on the whole product"))?;
    let v_drop = rational_valuation(&kappa[drop], p).expect("dropped kappa is nonzero");

    // Ambient dimension index of each kept global coordinate.
    let dim = d as usize - 1;
    let ambient: Vec<Option<usize>> = {
        let mut next = 0;
        (0..d as usize)
            .map(|j| {
                if j == drop {
                    None
                } else {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect()
    };
    // Affine map of global coordinate j in the kept parameters.
    let coord_map = |j: usize| -> (BigRational, Vec<BigRational>) {
        let mut slopes = vec![BigRational::zero(); dim];
        match ambient[j] {
            Some(t) => {
                slopes[t] = BigRational::one();
                (BigRational::zero(), slopes)
            }
            None => {
                for (g, k) in kappa.iter().enumerate() {
                    if let Some(t) = ambient[g] {
                        slopes[t] = -k / &kappa[drop];
                    }
                }
                (BigRational::one() / &kappa[drop], slopes)
            }
        }
    };

    let mut integrand = PadicIntegrand::new(p, dim);
    let mut base = 0usize;
    for comp in comps {
        let theta = comp.exponent - 1.0;
        if comp.f == 1 {
            let (w0, slopes) = coord_map(base);
            let mut weights = vec![w0];
            weights.extend(slopes);
            integrand.push(Box::new(AffineFactor::new(p, weights, theta)?));
        } else {
            let coords: Vec<(BigRational, Vec<BigRational>)> =
                (0..comp.f as usize).map(|l| coord_map(base + l)).collect();
            integrand.push(Box::new(NormFactor::new(p, comp.f, coords, theta)?));
        }
        base += comp.f as usize;
    }
    integrand.scale_prefactor(qc(p, C64::new(v_drop as f64, 0.0)));
    padic_full_integrate(&integrand, cfg)
}
