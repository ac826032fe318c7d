//! The case catalog: which identity, over which backend, at which
//! parameters, and the admissibility check every case passes before any
//! engine runs.

use crate::error::Error;
use crate::fields::descriptor::is_prime;
use crate::Result;

/// Factor `q = p^k` with `p` prime, or report why it is not a prime power.
pub fn prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::config(format!("{q} is not a prime power")));
    }
    let mut p = q;
    for d in 2..=q {
        if d * d > q {
            break;
        }
        if q % d == 0 {
            p = d;
            break;
        }
    }
    if !is_prime(p) {
        return Err(Error::config(format!("{q} is not a prime power")));
    }
    let mut k = 0u32;
    let mut rest = q;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    if rest != 1 {
        return Err(Error::config(format!("{q} is not a prime power")));
    }
    Ok((p, k))
}

/// One unramified component of a trace-hyperplane case: residue degree,
/// real character exponent, and an optional twist given by integer
/// coordinates in the power basis of the component's extension.
#[derive(Clone, Debug, PartialEq)]
pub struct GenBetaComponent {
    pub f: u32,
    pub s: f64,
    pub twist: Vec<i64>,
}

impl GenBetaComponent {
    pub fn new(f: u32, s: f64) -> Self {
        GenBetaComponent { f, s, twist: Vec::new() }
    }

    pub fn twisted(f: u32, s: f64, twist: Vec<i64>) -> Self {
        GenBetaComponent { f, s, twist }
    }
}

/// How a p-adic coefficient-space integral is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PadicMode {
    /// Stratified cells with a certified error interval.
    Certified,
    /// Importance-sampled Monte Carlo; pass/fail leans on `mc_sigma`.
    Mc { samples: u64, seed: u64 },
}

/// One verifiable identity instance.
///
/// Every variant carries real character exponents; the catalog covers the
/// unramified quasi-characters `|.|^s` the identities are stated for.
#[derive(Clone, Debug, PartialEq)]
pub enum IdentityCase {
    /// Closed-form p-adic gamma against its defining shell-sum integral,
    /// residue cardinality `q`, different exponent `d`, exponent `s`.
    GammaIntegral { q: u64, d: u32, s: f64 },
    /// Two-gamma ratio for the one-dimensional beta integral over `Q_p`.
    Beta { p: u64, a: f64, b: f64 },
    /// Trace-hyperplane integral over a product of unramified extensions.
    GenBeta { p: u64, components: Vec<GenBetaComponent> },
    /// Resultant-character integral over monic `f` of degree `deg G - 1`.
    /// `g` holds the coefficients of monic `G` below the leading one,
    /// highest degree first.
    Prop1 { p: u64, g: Vec<i64>, s: f64 },
    /// Three-character integral over monic `f` of degree `deg G + 1`,
    /// same `g` encoding as `Prop1`.
    Prop2 { p: u64, g: Vec<i64>, a: f64, b: f64, c: f64 },
    /// The Selberg identity over `Q_p` in dimension `n`.
    Theorem { p: u64, n: u32, a: f64, b: f64, c: f64, mode: PadicMode },
    /// Independent evaluations of `S_n` and `S_{n-1}(a+c, b+c, c)` against
    /// the five-gamma reduction factor.
    Recursion { p: u64, n: u32, a: f64, b: f64, c: f64 },
    /// The complex Selberg identity in root coordinates, Monte Carlo.
    ComplexAomoto { n: u32, a: f64, b: f64, c: f64, samples: u64, seed: u64 },
    /// The finite-field Selberg sum against its pinned Gauss-sum product;
    /// `ia, ib, ic` index the multiplicative characters.
    FfSelberg { q: u64, n: u32, ia: u64, ib: u64, ic: u64 },
}

fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::region(what.to_string()))
    }
}

fn require_prime(p: u64) -> Result<()> {
    require(is_prime(p), &format!("{p} is not prime"))
}

/// `re a, re b, re c > 0` and `re a + re b + 2(n-1) re c < 1`.
fn require_rn(n: u32, a: f64, b: f64, c: f64) -> Result<()> {
    require(
        a > 0.0 && b > 0.0 && c > 0.0,
        &format!("exponents must be positive, got ({a}, {b}, {c})"),
    )?;
    let edge = a + b + 2.0 * (n as f64 - 1.0) * c;
    require(
        edge < 1.0,
        &format!("a + b + 2(n-1)c = {edge} leaves the convergence region"),
    )
}

impl IdentityCase {
    pub fn id(&self) -> &'static str {
        match self {
            IdentityCase::GammaIntegral { .. } => "gamma_integral",
            IdentityCase::Beta { .. } => "beta",
            IdentityCase::GenBeta { .. } => "gen_beta",
            IdentityCase::Prop1 { .. } => "prop1",
            IdentityCase::Prop2 { .. } => "prop2",
            IdentityCase::Theorem { .. } => "theorem",
            IdentityCase::Recursion { .. } => "recursion",
            IdentityCase::ComplexAomoto { .. } => "complex_aomoto",
            IdentityCase::FfSelberg { .. } => "ff_selberg",
        }
    }

    pub fn backend(&self) -> String {
        match self {
            IdentityCase::GammaIntegral { q, d, .. } => format!("padic(q={q},d={d})"),
            IdentityCase::Beta { p, .. }
            | IdentityCase::GenBeta { p, .. }
            | IdentityCase::Prop1 { p, .. }
            | IdentityCase::Prop2 { p, .. }
            | IdentityCase::Theorem { p, .. }
            | IdentityCase::Recursion { p, .. } => format!("padic(p={p})"),
            IdentityCase::ComplexAomoto { .. } => "complex".to_string(),
            IdentityCase::FfSelberg { q, .. } => format!("ff(q={q})"),
        }
    }

    /// Canonical parameter string, stable across runs for a given case.
    pub fn params(&self) -> String {
        match self {
            IdentityCase::GammaIntegral { s, .. } => format!("s={s}"),
            IdentityCase::Beta { a, b, .. } => format!("a={a} b={b}"),
            IdentityCase::GenBeta { components, .. } => {
                let parts: Vec<String> = components
                    .iter()
                    .map(|c| {
                        if c.twist.is_empty() {
                            format!("(f={},s={})", c.f, c.s)
                        } else {
                            format!("(f={},s={},twist={:?})", c.f, c.s, c.twist)
                        }
                    })
                    .collect();
                parts.join(" ")
            }
            IdentityCase::Prop1 { g, s, .. } => format!("g={g:?} s={s}"),
            IdentityCase::Prop2 { g, a, b, c, .. } => format!("g={g:?} a={a} b={b} c={c}"),
            IdentityCase::Theorem { n, a, b, c, mode, .. } => {
                let m = match mode {
                    PadicMode::Certified => "certified".to_string(),
                    PadicMode::Mc { samples, .. } => format!("mc(N={samples})"),
                };
                format!("n={n} a={a} b={b} c={c} {m}")
            }
            IdentityCase::Recursion { n, a, b, c, .. } => format!("n={n} a={a} b={b} c={c}"),
            IdentityCase::ComplexAomoto { n, a, b, c, samples, .. } => {
                format!("n={n} a={a} b={b} c={c} N={samples}")
            }
            IdentityCase::FfSelberg { n, ia, ib, ic, .. } => {
                format!("n={n} chi=({ia},{ib},{ic})")
            }
        }
    }

    /// Seed used by the case's sampler, if it has one.
    pub fn seed(&self) -> Option<u64> {
        match self {
            IdentityCase::Theorem { mode: PadicMode::Mc { seed, .. }, .. } => Some(*seed),
            IdentityCase::ComplexAomoto { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    /// Admissibility: the convergence region of the identity plus the
    /// structural requirements cheap enough to check without any engine.
    pub fn region_check(&self) -> Result<()> {
        match self {
            IdentityCase::GammaIntegral { q, s, .. } => {
                prime_power(*q).map_err(|_| Error::region(format!("{q} is not a prime power")))?;
                require(
                    *s > 0.0 && *s < 1.0,
                    &format!("gamma integral needs 0 < s < 1, got {s}"),
                )
            }
            IdentityCase::Beta { p, a, b } => {
                require_prime(*p)?;
                require(
                    *a > 0.0 && *b > 0.0,
                    &format!("exponents must be positive, got ({a}, {b})"),
                )?;
                require(a + b < 1.0, &format!("a + b = {} must stay below 1", a + b))
            }
            IdentityCase::GenBeta { p, components } => {
                require_prime(*p)?;
                let degree: u32 = components.iter().map(|c| c.f).sum();
                require(degree >= 2, "need total degree at least 2")?;
                let mut total = 0.0;
                for comp in components {
                    require(comp.f >= 1, "component residue degree must be positive")?;
                    require(
                        comp.s > 0.0,
                        &format!("component exponents must be positive, got {}", comp.s),
                    )?;
                    if !comp.twist.is_empty() {
                        require(
                            comp.twist.len() == comp.f as usize,
                            "twist coordinates must match the component degree",
                        )?;
                        require(comp.twist.iter().any(|&t| t != 0), "twist must be nonzero")?;
                    }
                    total += comp.f as f64 * comp.s;
                }
                require(
                    total < 1.0,
                    &format!("sum of deg * s = {total} must stay below 1"),
                )
            }
            IdentityCase::Prop1 { p, g, s } => {
                require_prime(*p)?;
                require(!g.is_empty(), "G must have positive degree")?;
                squarefree_check(g)?;
                let n = g.len() as f64;
                require(
                    *s > 0.0 && n * s < 1.0,
                    &format!("need 0 < {n} * s < 1, got s = {s}"),
                )
            }
            IdentityCase::Prop2 { p, g, a, b, c } => {
                require_prime(*p)?;
                require(!g.is_empty(), "G must have positive degree")?;
                squarefree_check(g)?;
                let gp = crate::polylab::MonicPoly::from_i64(g);
                let zero = num_rational::BigRational::from_integer(0.into());
                let one = num_rational::BigRational::from_integer(1.into());
                require(
                    !num_traits::Zero::is_zero(&gp.eval(&zero))
                        && !num_traits::Zero::is_zero(&gp.eval(&one)),
                    "G(0) and G(1) must be nonzero",
                )?;
                require(
                    *a > 0.0 && *b > 0.0 && *c > 0.0,
                    &format!("exponents must be positive, got ({a}, {b}, {c})"),
                )?;
                let n = g.len() as f64 + 1.0;
                let edge = a + b + (n - 1.0) * c;
                require(
                    edge < 1.0,
                    &format!("a + b + (n-1)c = {edge} leaves the convergence region"),
                )
            }
            IdentityCase::Theorem { p, n, a, b, c, mode } => {
                require_prime(*p)?;
                require(*n >= 1, "dimension must be positive")?;
                if let PadicMode::Mc { samples, .. } = mode {
                    require(*samples > 0, "sample count must be positive")?;
                    require(*n >= 2, "the Monte Carlo map needs n >= 2")?;
                }
                require_rn(*n, *a, *b, *c)
            }
            IdentityCase::Recursion { p, n, a, b, c } => {
                require_prime(*p)?;
                require(*n >= 2, "recursion steps down from n >= 2")?;
                // R_n for (a,b,c) implies R_{n-1} for (a+c, b+c, c): the
                // edge sums coincide.
                require_rn(*n, *a, *b, *c)
            }
            IdentityCase::ComplexAomoto { n, a, b, c, samples, .. } => {
                require(*n >= 1, "dimension must be positive")?;
                require(*samples > 0, "sample count must be positive")?;
                require_rn(*n, *a, *b, *c)
            }
            IdentityCase::FfSelberg { q, n, ia, ib, ic } => {
                let (p, _) = prime_power(*q)
                    .map_err(|_| Error::region(format!("{q} is not a prime power")))?;
                require(*n >= 1, "degree must be positive")?;
                require(
                    (*n as u64) < p,
                    &format!("degree {n} must stay below the characteristic {p}"),
                )?;
                let m = q - 1;
                let nontrivial = |j: u64, what: &str| {
                    require(j % m != 0, &format!("{what} must be a nontrivial character"))
                };
                for j in 0..*n as u64 {
                    nontrivial(ia + j * ic, "A C^j")?;
                    nontrivial(ib + j * ic, "B C^j")?;
                    nontrivial((j + 1) * ic, "C^(j+1)")?;
                    nontrivial(ia + ib + (*n as u64 + j - 1) * ic, "A B C^(n+j-1)")?;
                }
                Ok(())
            }
        }
    }
}

/// Squarefree guard shared by the resultant-character cases: a repeated
/// factor of `G` makes both sides meaningless, so it is rejected up front
/// with the region errors.
fn squarefree_check(g: &[i64]) -> Result<()> {
    let gp = crate::polylab::MonicPoly::from_i64(g);
    let delta = crate::polylab::discriminant(&gp)
        .map_err(|e| Error::region(format!("G is degenerate: {e}")))?;
    if num_traits::Zero::is_zero(&delta) {
        return Err(Error::region("G must be squarefree"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_powers_factor_and_composites_fail() {
        assert_eq!(prime_power(2).unwrap(), (2, 1));
        assert_eq!(prime_power(27).unwrap(), (3, 3));
        assert_eq!(prime_power(25).unwrap(), (5, 2));
        assert!(prime_power(1).is_err());
        assert!(prime_power(12).is_err());
        assert!(prime_power(100).is_err());
    }

    #[test]
    fn region_boundaries_are_rejected() {
        let ok = IdentityCase::Theorem {
            p: 5,
            n: 2,
            a: 0.25,
            b: 0.25,
            c: 0.1,
            mode: PadicMode::Certified,
        };
        assert!(ok.region_check().is_ok());
        let edge = IdentityCase::Theorem {
            p: 5,
            n: 2,
            a: 0.4,
            b: 0.4,
            c: 0.1,
            mode: PadicMode::Certified,
        };
        assert!(matches!(edge.region_check(), Err(Error::RegionViolation { .. })));
        let neg = IdentityCase::Beta { p: 5, a: -0.1, b: 0.4 };
        assert!(neg.region_check().is_err());
        let comp = IdentityCase::Beta { p: 6, a: 0.3, b: 0.4 };
        assert!(comp.region_check().is_err());
    }

    #[test]
    fn prop_regions_follow_the_degree() {
        let p1 = IdentityCase::Prop1 { p: 3, g: vec![0, 1], s: 0.3 };
        assert!(p1.region_check().is_ok());
        let p1_wide = IdentityCase::Prop1 { p: 3, g: vec![0, 1], s: 0.6 };
        assert!(p1_wide.region_check().is_err());
        let square = IdentityCase::Prop1 { p: 3, g: vec![2, 1], s: 0.3 };
        assert!(square.region_check().is_err());
        let p2_at_one = IdentityCase::Prop2 { p: 5, g: vec![-1], a: 0.2, b: 0.2, c: 0.1 };
        assert!(p2_at_one.region_check().is_err());
    }

    #[test]
    fn ff_catalog_rejects_trivial_product_arguments() {
        let ok = IdentityCase::FfSelberg { q: 5, n: 2, ia: 2, ib: 2, ic: 1 };
        assert!(ok.region_check().is_ok());
        // C^2 is trivial for the order-2 character at q = 5
        let c2 = IdentityCase::FfSelberg { q: 5, n: 2, ia: 1, ib: 1, ic: 2 };
        assert!(c2.region_check().is_err());
        let deep = IdentityCase::FfSelberg { q: 5, n: 5, ia: 1, ib: 1, ic: 1 };
        assert!(deep.region_check().is_err());
    }
}
