//! Exponent algebra: criticality thresholds, critical Sobolev index and
//! Strichartz admissible pairs.
//!
//! Rational inputs are handled exactly so that the equality cases
//! (mass-critical, energy-critical, the admissibility identity) are decidable.
//! Real inputs fall back to floating comparison with a `1e-12` tolerance.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Rational64;

use crate::error::{Error, Result};

const FLOAT_TOL: f64 = 1e-12;

/// An exponent in `[0, ∞]`, exact when rational.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Rational(Rational64),
    Real(f64),
    Infinite,
}

impl Exponent {
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Exponent::Rational(Rational64::new(numer, denom))
    }

    pub fn integer(n: i64) -> Self {
        Exponent::Rational(Rational64::from_integer(n))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Exponent::Rational(r) => *r.numer() as f64 / *r.denom() as f64,
            Exponent::Real(x) => x,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite) || matches!(self, Exponent::Real(x) if x.is_infinite())
    }

    pub fn is_exact(self) -> bool {
        !matches!(self, Exponent::Real(_))
    }

    /// `1/x` with `1/∞ = 0` and `1/0 = ∞`.
    pub fn recip(self) -> Self {
        match self {
            Exponent::Infinite => Exponent::integer(0),
            Exponent::Rational(r) if *r.numer() == 0 => Exponent::Infinite,
            Exponent::Rational(r) => Exponent::Rational(r.recip()),
            Exponent::Real(x) if x == 0.0 => Exponent::Infinite,
            Exponent::Real(x) if x.is_infinite() => Exponent::integer(0),
            Exponent::Real(x) => Exponent::Real(1.0 / x),
        }
    }

    /// Comparison, exact for rationals and with a relative tolerance of
    /// `1e-12` whenever a real operand is involved.
    pub fn compare(self, other: Exponent) -> Ordering {
        match (self, other) {
            (Exponent::Rational(a), Exponent::Rational(b)) => a.cmp(&b),
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                if a.is_infinite() || b.is_infinite() {
                    return a.partial_cmp(&b).unwrap_or(Ordering::Equal);
                }
                if (a - b).abs() <= FLOAT_TOL * a.abs().max(b.abs()).max(1.0) {
                    Ordering::Equal
                } else {
                    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
                }
            }
        }
    }

    fn binary(
        self,
        other: Exponent,
        exact: impl Fn(Rational64, Rational64) -> Rational64,
        real: impl Fn(f64, f64) -> f64,
    ) -> Exponent {
        match (self, other) {
            (Exponent::Rational(a), Exponent::Rational(b)) => Exponent::Rational(exact(a, b)),
            _ => Exponent::Real(real(self.to_f64(), other.to_f64())),
        }
    }

    fn sub(self, o: Exponent) -> Exponent {
        self.binary(o, |a, b| a - b, |a, b| a - b)
    }

    fn mul(self, o: Exponent) -> Exponent {
        self.binary(o, |a, b| a * b, |a, b| a * b)
    }

    fn div(self, o: Exponent) -> Exponent {
        self.binary(o, |a, b| a / b, |a, b| a / b)
    }
}

impl From<f64> for Exponent {
    fn from(x: f64) -> Self {
        if x.is_infinite() && x > 0.0 {
            Exponent::Infinite
        } else {
            Exponent::Real(x)
        }
    }
}

impl From<i64> for Exponent {
    fn from(n: i64) -> Self {
        Exponent::integer(n)
    }
}

impl From<Rational64> for Exponent {
    fn from(r: Rational64) -> Self {
        Exponent::Rational(r)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Rational(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Exponent::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Exponent::Real(x) => write!(f, "{x}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalityTag {
    MassSubcritical,
    MassCritical,
    Intermediate,
    EnergyCritical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Criticality {
    pub tag: CriticalityTag,
    /// `p_* = 1 + 4/N`.
    pub p_star_lower: Exponent,
    /// `p^* = N/(N-2)` for `N > 2`, infinite otherwise.
    pub p_star_upper: Exponent,
}

/// Which scaling the critical index refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingKind {
    /// `i u_t + Δu = ±|u|^{p-1} u`, invariant under `λ^{2/(p-1)} u(λ²t, λx)`.
    SingleEquation,
    /// The coupled system, whose nonlinearity has degree `2p - 1`; invariant
    /// under `λ^{1/(p-1)} u(λ²t, λx)`.
    System,
}

impl ScalingKind {
    /// Amplitude exponent `α` of the dilation `λ^α u(λ x)`.
    pub fn amplitude_exponent(self, p: Exponent) -> Exponent {
        let numer = match self {
            ScalingKind::SingleEquation => Exponent::integer(2),
            ScalingKind::System => Exponent::integer(1),
        };
        if p.is_infinite() {
            return Exponent::integer(0);
        }
        numer.div(p.sub(Exponent::integer(1)))
    }
}

pub fn mass_critical_exponent(dim: usize) -> Exponent {
    Exponent::ratio(dim as i64 + 4, dim as i64)
}

pub fn energy_critical_exponent(dim: usize) -> Exponent {
    if dim > 2 {
        Exponent::ratio(dim as i64, dim as i64 - 2)
    } else {
        Exponent::Infinite
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if (1..=4).contains(&dim) {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("dimension must be in 1..=4, got {dim}")))
    }
}

fn check_p(p: Exponent) -> Result<()> {
    if p.compare(Exponent::integer(1)) != Ordering::Greater || matches!(p, Exponent::Real(x) if x.is_nan()) {
        return Err(Error::Domain(format!("exponent p must exceed 1, got {p}")));
    }
    Ok(())
}

/// Places `p` relative to the mass-critical and energy-critical thresholds.
///
/// When both thresholds coincide (`N = 4`, `p = 2`) the energy-critical tag wins.
pub fn classify_exponent(p: Exponent, dim: usize) -> Result<Criticality> {
    check_dim(dim)?;
    check_p(p)?;
    let lower = mass_critical_exponent(dim);
    let upper = energy_critical_exponent(dim);
    let tag = match p.compare(upper) {
        Ordering::Greater => {
            return Err(Error::OutOfRange(format!(
                "p = {p} exceeds p^* = {upper} for N = {dim}"
            )))
        }
        Ordering::Equal => CriticalityTag::EnergyCritical,
        Ordering::Less => match p.compare(lower) {
            Ordering::Less => CriticalityTag::MassSubcritical,
            Ordering::Equal => CriticalityTag::MassCritical,
            Ordering::Greater => CriticalityTag::Intermediate,
        },
    };
    Ok(Criticality {
        tag,
        p_star_lower: lower,
        p_star_upper: upper,
    })
}

/// Exact critical index as an [`Exponent`] (negative values allowed).
pub fn critical_index_exact(p: Exponent, dim: usize, kind: ScalingKind) -> Exponent {
    Exponent::ratio(dim as i64, 2).sub(kind.amplitude_exponent(p))
}

/// `s_c = N/2 - 2/(p-1)` (single equation) or `N/2 - 1/(p-1)` (system).
pub fn critical_index(p: Exponent, dim: usize, kind: ScalingKind) -> Result<f64> {
    check_p(p)?;
    Ok(critical_index_exact(p, dim, kind).to_f64())
}

/// Strichartz admissibility: `2 ≤ q, r ≤ ∞`, `(q, r, N) ≠ (2, ∞, 2)` and
/// `2/q = N (1/2 - 1/r)`.
pub fn is_admissible(q: Exponent, r: Exponent, dim: usize) -> bool {
    let two = Exponent::integer(2);
    if q.compare(two) == Ordering::Less || r.compare(two) == Ordering::Less {
        return false;
    }
    if dim == 2 && q.compare(two) == Ordering::Equal && r.is_infinite() {
        return false;
    }
    let lhs = two.mul(q.recip());
    let rhs = Exponent::integer(dim as i64).mul(Exponent::ratio(1, 2).sub(r.recip()));
    lhs.compare(rhs) == Ordering::Equal
}

/// The pair `(4p/(N(p-1)), 2p)`; rejected when it fails the admissibility identity
/// (which happens exactly for `p > p^*`).
pub fn strichartz_pair(p: Exponent, dim: usize) -> Result<(Exponent, Exponent)> {
    check_dim(dim)?;
    check_p(p)?;
    let (q, r) = if p.is_infinite() {
        (Exponent::ratio(4, dim as i64), Exponent::Infinite)
    } else {
        let q = Exponent::integer(4)
            .mul(p)
            .div(Exponent::integer(dim as i64).mul(p.sub(Exponent::integer(1))));
        (q, Exponent::integer(2).mul(p))
    };
    if is_admissible(q, r, dim) {
        Ok((q, r))
    } else {
        Err(Error::OutOfRange(format!(
            "pair (q, r) = ({q}, {r}) for p = {p}, N = {dim} is not admissible"
        )))
    }
}
