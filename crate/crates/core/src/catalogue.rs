//! The catalogue of face-centered quad equations and their four-leg forms.
//!
//! Each [`FaceEquation`] is a family tag plus a δ-regime; [`evaluate`] returns
//! the exact value of the polynomial at a [`FacePoint`].  The leg functions
//! give the equivalent multiplicative (or additive) four-leg expressions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{s, NumError, Scalar, SurdKind, SurdParam};

/// Errors raised while building or evaluating catalogue entries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogueError {
    #[error("δ-regime {deltas} is not admissible for {family}")]
    InadmissibleDeltas { family: Family, deltas: String },
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("leg for {0} needs a surd parametrisation of x")]
    MissingSurd(String),
    #[error("{0} has no {1:?}-leg")]
    NoLeg(String, LegRole),
    #[error("unknown equation identifier {0:?}")]
    UnknownEquation(String),
    #[error(transparent)]
    Num(#[from] NumError),
}

/// The eight equation families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A3,
    A2,
    B3,
    B2,
    C3,
    C2,
    C1,
    D1,
}

/// The role an equation plays in a CAFCC configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EqType {
    A,
    B,
    C,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::A3,
        Family::A2,
        Family::B3,
        Family::B2,
        Family::C3,
        Family::C2,
        Family::C1,
        Family::D1,
    ];

    pub fn eq_type(self) -> EqType {
        match self {
            Family::A3 | Family::A2 => EqType::A,
            Family::B3 | Family::B2 | Family::D1 => EqType::B,
            Family::C3 | Family::C2 | Family::C1 => EqType::C,
        }
    }

    /// Families whose formulas divide by the parameters.
    pub fn multiplicative(self) -> bool {
        matches!(self, Family::A3 | Family::B3 | Family::C3)
    }

    /// The admissible δ-regimes, in the order they are listed in the catalogue.
    pub fn regimes(self) -> Vec<Deltas> {
        let h = Scalar::half;
        let t = |a: Scalar, b: Scalar, c: Scalar| Deltas { d1: a, d2: b, d3: c };
        match self {
            Family::A3 => vec![t(s(0), s(0), s(0)), t(s(1), s(0), s(0))],
            Family::A2 => vec![
                t(s(0), s(0), s(0)),
                t(s(1), s(0), s(0)),
                t(s(1), s(1), s(0)),
            ],
            Family::B3 | Family::C3 => vec![
                t(s(0), s(0), s(0)),
                t(s(1), s(0), s(0)),
                t(h(), s(0), h()),
                t(h(), h(), s(0)),
            ],
            Family::B2 | Family::C2 => vec![
                t(s(0), s(0), s(0)),
                t(s(1), s(0), s(0)),
                t(s(1), s(0), s(1)),
                t(s(1), s(1), s(0)),
            ],
            Family::C1 | Family::D1 => vec![Deltas::none()],
        }
    }

    /// Number of δ parameters the family takes.
    pub fn arity(self) -> usize {
        match self {
            Family::A3 => 1,
            Family::A2 => 2,
            Family::B3 | Family::B2 | Family::C3 | Family::C2 => 3,
            Family::C1 | Family::D1 => 0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Family::A3 => "A3",
            Family::A2 => "A2",
            Family::B3 => "B3",
            Family::B2 => "B2",
            Family::C3 => "C3",
            Family::C2 => "C2",
            Family::C1 => "C1",
            Family::D1 => "D1",
        };
        f.write_str(name)
    }
}

impl FromStr for Family {
    type Err = CatalogueError;

    fn from_str(st: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.to_string() == st.trim())
            .ok_or_else(|| CatalogueError::UnknownEquation(st.to_string()))
    }
}

/// Up to three δ parameters; unused slots are zero.  A3's single δ lives in
/// `d1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Deltas {
    pub d1: Scalar,
    pub d2: Scalar,
    pub d3: Scalar,
}

impl Deltas {
    pub fn none() -> Self {
        Deltas {
            d1: s(0),
            d2: s(0),
            d3: s(0),
        }
    }

    pub fn one(d: Scalar) -> Self {
        Deltas {
            d1: d,
            d2: s(0),
            d3: s(0),
        }
    }

    pub fn two(d1: Scalar, d2: Scalar) -> Self {
        Deltas { d1, d2, d3: s(0) }
    }

    pub fn three(d1: Scalar, d2: Scalar, d3: Scalar) -> Self {
        Deltas { d1, d2, d3 }
    }

    fn render(&self, arity: usize) -> String {
        let all = [&self.d1, &self.d2, &self.d3];
        all[..arity]
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// A pair of lattice parameters `(first, second)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamPair {
    pub first: Scalar,
    pub second: Scalar,
}

impl ParamPair {
    pub fn new(first: Scalar, second: Scalar) -> Self {
        ParamPair { first, second }
    }

    /// The pair with its components exchanged.
    pub fn hat(&self) -> ParamPair {
        ParamPair {
            first: self.second.clone(),
            second: self.first.clone(),
        }
    }
}

/// A face: the centre variable, four corner variables `(x_a, x_b, x_c, x_d)`
/// and the two parameter pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacePoint {
    pub x: Scalar,
    pub corners: [Scalar; 4],
    pub alpha: ParamPair,
    pub beta: ParamPair,
}

impl FacePoint {
    pub fn new(x: Scalar, corners: [Scalar; 4], alpha: ParamPair, beta: ParamPair) -> Self {
        FacePoint {
            x,
            corners,
            alpha,
            beta,
        }
    }

    /// The same point with one corner replaced.
    pub fn with_corner(&self, slot: Slot, value: Scalar) -> FacePoint {
        let mut p = self.clone();
        p.corners[slot.index()] = value;
        p
    }
}

/// A corner slot of a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    A,
    B,
    C,
    D,
}

impl Slot {
    pub const ALL: [Slot; 4] = [Slot::A, Slot::B, Slot::C, Slot::D];

    pub fn index(self) -> usize {
        match self {
            Slot::A => 0,
            Slot::B => 1,
            Slot::C => 2,
            Slot::D => 3,
        }
    }
}

impl FromStr for Slot {
    type Err = CatalogueError;

    fn from_str(st: &str) -> Result<Self, Self::Err> {
        match st.trim() {
            "a" => Ok(Slot::A),
            "b" => Ok(Slot::B),
            "c" => Ok(Slot::C),
            "d" => Ok(Slot::D),
            other => Err(CatalogueError::DomainViolation(format!(
                "unknown corner slot {other:?}"
            ))),
        }
    }
}

/// An evaluable face-centered quad equation: a family in one of its
/// admissible δ-regimes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FaceEquation {
    family: Family,
    deltas: Deltas,
}

/// Builds the equation for `family` in regime `deltas`.
pub fn make_equation(family: Family, deltas: Deltas) -> Result<FaceEquation, CatalogueError> {
    if family.regimes().contains(&deltas) {
        Ok(FaceEquation { family, deltas })
    } else {
        Err(CatalogueError::InadmissibleDeltas {
            family,
            deltas: deltas.render(3),
        })
    }
}

impl FaceEquation {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn deltas(&self) -> &Deltas {
        &self.deltas
    }

    pub fn eq_type(&self) -> EqType {
        self.family.eq_type()
    }

    /// Power of `x` that clears the `x⁻¹` terms of the Laurent family B3.
    pub fn laurent_offset(&self) -> u32 {
        match self.family {
            Family::B3 => 1,
            _ => 0,
        }
    }

    /// Every admissible equation in the catalogue.
    pub fn all() -> Vec<FaceEquation> {
        Family::ALL
            .into_iter()
            .flat_map(|f| {
                f.regimes()
                    .into_iter()
                    .map(move |d| FaceEquation { family: f, deltas: d })
            })
            .collect()
    }

    /// Canonical identifier such as `A3:d=1`, `B3:1/2,0,1/2` or `C1`.
    pub fn id(&self) -> String {
        match self.family {
            Family::A3 => format!("A3:d={}", self.deltas.d1),
            Family::C1 | Family::D1 => self.family.to_string(),
            f => format!("{}:{}", f, self.deltas.render(f.arity())),
        }
    }

    /// A constructor helper for tests and tables: parses [`FaceEquation::id`].
    pub fn parse(id: &str) -> Result<FaceEquation, CatalogueError> {
        id.parse()
    }
}

impl fmt::Display for FaceEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for FaceEquation {
    type Err = CatalogueError;

    fn from_str(st: &str) -> Result<Self, Self::Err> {
        let unknown = || CatalogueError::UnknownEquation(st.to_string());
        let st = st.trim();
        let (fam, rest) = match st.split_once(':') {
            Some((f, r)) => (f, Some(r)),
            None => (st, None),
        };
        let family: Family = fam.parse()?;
        let rest = rest.map(|r| r.strip_prefix("d=").unwrap_or(r));
        let values: Vec<Scalar> = match rest {
            None | Some("") => vec![],
            Some(r) => r
                .split(',')
                .map(|v| v.parse::<Scalar>().map_err(|_| unknown()))
                .collect::<Result<_, _>>()?,
        };
        if values.len() != family.arity() {
            return Err(CatalogueError::InadmissibleDeltas {
                family,
                deltas: rest.unwrap_or("").to_string(),
            });
        }
        let mut it = values.into_iter();
        let mut next = || it.next().unwrap_or_else(|| s(0));
        let deltas = Deltas::three(next(), next(), next());
        make_equation(family, deltas)
    }
}

/// `δ ∈ {0, 1}` as an integer exponent.
fn bit(d: &Scalar) -> i32 {
    if d.is_zero() {
        0
    } else {
        1
    }
}

/// `e^δ` for `δ ∈ {0, 1}`.
fn pw(e: Scalar, d: &Scalar) -> Scalar {
    if d.is_zero() {
        s(1)
    } else {
        e
    }
}

/// `u/v − v/u`; both arguments are nonzero by the multiplicative-family
/// domain check.
fn f(u: &Scalar, v: &Scalar) -> Scalar {
    u / v - v / u
}

fn powi(e: &Scalar, k: i32) -> Scalar {
    e.pow(k).expect("nonnegative exponent")
}

/// Differences `θ_ij = θ_i − θ_j` of `(θ1, θ2, θ3, θ4) = (α1, α2, β1, β2)`.
pub(crate) struct Theta([Scalar; 4]);

impl Theta {
    pub(crate) fn new(alpha: &ParamPair, beta: &ParamPair) -> Self {
        Theta([
            alpha.first.clone(),
            alpha.second.clone(),
            beta.first.clone(),
            beta.second.clone(),
        ])
    }

    pub(crate) fn t(&self, i: usize, j: usize) -> Scalar {
        &self.0[i - 1] - &self.0[j - 1]
    }
}

/// Borrowed view of a face point used by the formula transcriptions.
struct V<'a> {
    x: &'a Scalar,
    xa: &'a Scalar,
    xb: &'a Scalar,
    xc: &'a Scalar,
    xd: &'a Scalar,
    a1: &'a Scalar,
    a2: &'a Scalar,
    b1: &'a Scalar,
    b2: &'a Scalar,
}

impl<'a> V<'a> {
    fn of(p: &'a FacePoint) -> Self {
        V {
            x: &p.x,
            xa: &p.corners[0],
            xb: &p.corners[1],
            xc: &p.corners[2],
            xd: &p.corners[3],
            a1: &p.alpha.first,
            a2: &p.alpha.second,
            b1: &p.beta.first,
            b2: &p.beta.second,
        }
    }
}

fn check_domain(eq: &FaceEquation, p: &FacePoint) -> Result<(), CatalogueError> {
    if eq.family.multiplicative() {
        let params = [&p.alpha.first, &p.alpha.second, &p.beta.first, &p.beta.second];
        if params.iter().any(|v| v.is_zero()) {
            return Err(CatalogueError::DomainViolation(format!(
                "{} needs nonzero parameters",
                eq.family
            )));
        }
    }
    if eq.family == Family::B3 && p.x.is_zero() {
        return Err(CatalogueError::DomainViolation(
            "B3 needs a nonzero face variable".into(),
        ));
    }
    Ok(())
}

/// Exact value of the equation's polynomial (raw Laurent form for B3).
pub fn evaluate(eq: &FaceEquation, p: &FacePoint) -> Result<Scalar, CatalogueError> {
    check_domain(eq, p)?;
    let v = V::of(p);
    let d = &eq.deltas;
    Ok(match eq.family {
        Family::A3 => a3(&d.d1, &v),
        Family::B3 => b3(d, &v),
        Family::C3 => c3(d, &v),
        Family::A2 => a2(d, &v),
        Family::B2 => b2(d, &v),
        Family::C2 => c2(d, &v),
        Family::C1 => c1(&v),
        Family::D1 => v.xa - v.xb - v.xc + v.xd,
    })
}

/// `x^k · evaluate`, the polynomial form with Laurent terms cleared.
pub fn evaluate_cleared(eq: &FaceEquation, p: &FacePoint) -> Result<Scalar, CatalogueError> {
    let v = evaluate(eq, p)?;
    Ok(v * powi(&p.x, eq.laurent_offset() as i32))
}

fn a3(delta: &Scalar, v: &V) -> Scalar {
    let V {
        x,
        xa,
        xb,
        xc,
        xd,
        a1,
        a2,
        b1,
        b2,
    } = *v;
    // The δ-terms carry an overall factor 1/4 relative to the printed form;
    // only with it do the four-leg form and the B3/C3 systems close.
    let d = delta / s(4);
    let x2 = x * x;
    let a12 = a1 * a2;
    let b12 = b1 * b2;
    x * (f(b1, b2) * (xa * xb - xc * xd) + f(a1, a2) * (xa * xc - xb * xd)
        - f(&a12, &b12) * (xa * xd - xb * xc))
        + f(a2, b1) * (xa * &x2 - xb * xc * xd)
        - f(a2, b2) * (xb * &x2 - xa * xc * xd)
        - f(a1, b1) * (xc * &x2 - xa * xb * xd)
        + f(a1, b2) * (xd * &x2 - xa * xb * xc)
        - &d * f(a1, a2) * f(b1, b2) * f(&a12, &b12) * x
        + &d * (f(a1, b1) * f(a2, b2) * (f(a1, b2) * xa + f(a2, b1) * xd)
            - f(a1, b2) * f(a2, b1) * (f(a1, b1) * xb + f(a2, b2) * xc))
}

fn b3(d: &Deltas, v: &V) -> Scalar {
    let V {
        x,
        xa,
        xb,
        xc,
        xd,
        a1,
        a2,
        b1,
        b2,
    } = *v;
    let (d1, d2, d3) = (&d.d1, &d.d2, &d.d3);
    xb * xc - xa * xd
        + d2 / s(2) * f(a2, a1) * f(b1, b2)
        + d2 * (a1 / b2 * xa - a1 / b1 * xb - a2 / b2 * xc + a2 / b1 * xd) * x
        + d1 * (b2 / a1 * xa - b1 / a1 * xb - b2 / a2 * xc + b1 / a2 * xd) / x
        + d3 * (xa * xb * a2 * (xd / b2 - xc / b1) + xc * xd * a1 * (xa / b1 - xb / b2)) / x
}

fn c3(d: &Deltas, v: &V) -> Scalar {
    let V {
        x,
        xa,
        xb,
        xc,
        xd,
        a1,
        a2,
        b1,
        b2,
    } = *v;
    let (d1, d2, d3) = (&d.d1, &d.d2, &d.d3);
    let a22 = a2 * a2;
    let b12 = b1 * b2;
    (a2 * (b1 * xd - b2 * xc) - d3 * (&a22 * (b1 * xb - b2 * xa) + &b12 * (b1 * xa - b2 * xb)) / a1)
        * (x * x)
        + (&a22 * (xb * xc - xa * xd)
            + &b12 * (xa * xc - xb * xd)
            + a2 * f(b2, b1)
                * (d1 * a1 - d3 * &b12 / a1 * xa * xb + d2 * &b12 / a1 * xc * xd))
            * x
        + a2 * xa * xb * (b2 * xd - b1 * xc)
        + d1 * a1 * (b1 * xb - b2 * xa + &a22 * (xa / b2 - xb / b1))
        + d2 * ((&a22 - b1 * b1) * (&a22 - b2 * b2) / (s(2) * a2 * b1 * b2) * (b2 * xd - b1 * xc)
            + xc * xd / a1 * (&b12 * (b1 * xb - b2 * xa) + &a22 * (b1 * xa - b2 * xb)))
}

fn a2(d: &Deltas, v: &V) -> Scalar {
    let V {
        x,
        xa,
        xb,
        xc,
        xd,
        a1,
        a2,
        b1,
        b2,
    } = *v;
    let (d1, d2) = (&d.d1, &d.d2);
    let th = Theta::new(&ParamPair::new(a1.clone(), a2.clone()), &ParamPair::new(b1.clone(), b2.clone()));
    let t = |i, j| th.t(i, j);
    let x2 = x * x;
    let mut prod = s(1);
    for i in 1..=4 {
        for j in (i + 1)..=4 {
            prod *= t(i, j);
        }
    }
    t(2, 3) * (xa * &x2 - xb * xc * xd) - t(2, 4) * (xb * &x2 - xa * xc * xd)
        - t(1, 3) * (xc * &x2 - xa * xb * xd)
        + t(1, 4) * (xd * &x2 - xa * xb * xc)
        + (t(3, 4) * (xa * xb - xc * xd) + t(1, 2) * (xa * xc - xb * xd)
            - (t(1, 3) + t(2, 4)) * (xa * xd - xb * xc))
            * x
        // The x_a coefficient here is θ14 (printed as θ13); only θ14 makes the
        // four-leg form and the CAFCC systems close.
        + d1 * (t(1, 4) * t(2, 3) * (t(1, 3) * xb + t(2, 4) * xc)
            * pw(s(2) * x - t(1, 2) * t(3, 4), d2)
            - t(1, 3) * t(2, 4) * (t(1, 4) * xa + t(2, 3) * xd)
                * pw(s(2) * x + t(1, 2) * t(3, 4), d2))
        + d1 * x * t(1, 2) * t(3, 4) * (t(1, 3) + t(2, 4))
            * pw(
                x + xa + xb + xc + xd - t(1, 2) * t(1, 2) - t(1, 3) * t(2, 3) - t(1, 4) * t(2, 4),
                d2,
            )
        + d2 * (xa * t(1, 3) * t(1, 4) * (t(2, 4) * t(1, 4) * t(1, 4) - t(3, 4) * xb)
            - xb * t(1, 3) * t(2, 3) * (t(1, 4) * t(1, 3) * t(1, 3) - t(1, 2) * xd)
            - xc * t(1, 4) * t(2, 4) * (t(2, 3) * t(2, 4) * t(2, 4) + t(1, 2) * xa)
            + xd * t(2, 3) * t(2, 4) * (t(1, 3) * t(2, 3) * t(2, 3) + t(3, 4) * xc)
            + (xa * xd * t(1, 3) * t(4, 2) + xb * xc * t(2, 3) * t(1, 4) + prod)
                * (t(1, 3) + t(2, 4)))
}

fn b2(d: &Deltas, v: &V) -> Scalar {
    let V {
        x,
        xa,
        xb,
        xc,
        xd,
        a1,
        a2,
        b1,
        b2,
    } = *v;
    let (d1, d2, d3) = (&d.d1, &d.d2, &d.d3);
    let th = Theta::new(&ParamPair::new(a1.clone(), a2.clone()), &ParamPair::new(b1.clone(), b2.clone()));
    let t = |i, j| th.t(i, j);
    let e = 1 + bit(d2);
    let sign2 = if bit(d2) == 1 { s(-1) } else { s(1) };
    d1 * (t(1, 2) * t(4, 3)
        * pw(t(1, 2) * t(1, 2) - t(1, 3) * t(1, 4) - t(2, 3) * t(2, 4), d2)
        * pw(-xa - xb - xc - xd, d3)
        + xa * powi(&(x + t(1, 4) * pw(t(4, 1), d3)), e)
        - xb * powi(&(x + t(1, 3) * pw(t(3, 1), d3)), e)
        - xc * powi(&(x + t(2, 4) * pw(t(4, 2), d3)), e)
        + xd * powi(&(x + t(2, 3) * pw(t(3, 2), d3)), e))
        // This block enters with a minus sign (printed as plus); only the
        // minus sign makes the (1,0,1) system and its four-leg form close.
        - d3 * ((xa * xc - xb * xd) * t(1, 2) + (xa * xb - xc * xd) * t(3, 4)
            - xb * xc * (xa + xd)
            + xa * xd * (xb + xc))
        + s(2) * d2 * t(1, 2) * t(3, 4) * (x * x)
        + (s(2) * d2 * x + d3) * t(1, 2) * t(3, 4) * (t(1, 3) + t(2, 4))
        + (xa * xd - xb * xc) * pw(t(3, 1) + t(4, 2), d3) * sign2
}

fn c2(d: &Deltas, v: &V) -> Scalar {
    let V {
        x,
        xa,
        xb,
        xc,
        xd,
        a1,
        a2,
        b1,
        b2,
    } = *v;
    let (d1, d2, d3) = (&d.d1, &d.d2, &d.d3);
    let th = Theta::new(&ParamPair::new(a1.clone(), a2.clone()), &ParamPair::new(b1.clone(), b2.clone()));
    let t = |i, j| th.t(i, j);
    let k = 1 + bit(d2) + bit(d3);
    let x2 = x * x;
    (xd - xc) * (&x2 + xa * xb)
        + t(3, 4) * (&x2 - xa * xb) * pw(t(1, 3) + t(1, 4), d3)
        + s(2) * d3 * (t(2, 3) * xa - t(2, 4) * xb) * &x2
        + ((xa + xb + s(2) * d2 * t(2, 3) * t(2, 4)) * (xc - xd)
            - (xa - xb) * (t(2, 3) + t(2, 4)) * pw(t(1, 3) + t(1, 4), d3)
            + s(2) * d3 * t(3, 4) * xa * xb)
            * x
        + d1 * (xa * t(2, 4) - xb * t(2, 3) + t(3, 4) * (d2 * t(2, 3) * t(2, 4) - x))
            * (powi(&t(1, 3), k) + powi(&t(1, 4), k) + s(2) * d2 * xc * xd
                - (xc + xd) * pw(t(1, 3) + t(1, 4), d2))
        + d1 * t(2, 3) * t(2, 4)
            * (xc - xd + t(3, 4) * pw(t(1, 3) + t(1, 4) - s(2) * x, d3))
            * pw(xa + xb - t(3, 4) * t(3, 4) - t(2, 3) * t(2, 4), d2)
}

fn c1(v: &V) -> Scalar {
    let V {
        x,
        xa,
        xb,
        xc,
        xd,
        a2,
        b1,
        b2,
        ..
    } = *v;
    (xc + xd) * (x * x)
        + (s(2) * (b1 + b2 - s(2) * a2) - (xa + xb) * (xc + xd)) * x
        + s(2) * (a2 * (xa + xb) - b2 * xa - b1 * xb)
        + xa * xb * (xc + xd)
}

// ---------------------------------------------------------------------------
// Four-leg forms
// ---------------------------------------------------------------------------

/// Which leg function of a four-leg expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LegRole {
    /// `a(x; y; α, β)` of a type-A equation.
    A,
    /// `b(x; y; α, β)` of a type-B equation.
    B,
    /// `c(x; y; α, β)` of a type-C equation.
    C,
}

/// How four legs combine into an equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Combine {
    /// `leg(a)·leg(d) / (leg(b)·leg(c)) = 1`.
    Multiplicative,
    /// `leg(a) + leg(d) − leg(b) − leg(c) = 0`.
    Additive,
}

/// The face variable of a leg, optionally carrying a rational surd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LegArg {
    Plain(Scalar),
    Surd(SurdParam),
}

impl LegArg {
    pub fn value(&self) -> &Scalar {
        match self {
            LegArg::Plain(v) => v,
            LegArg::Surd(p) => &p.value,
        }
    }

    fn surd(&self, kind: SurdKind, who: &FaceEquation) -> Result<&SurdParam, CatalogueError> {
        match self {
            LegArg::Surd(p) if p.kind == kind => Ok(p),
            _ => Err(CatalogueError::MissingSurd(who.id())),
        }
    }
}

/// Static description of a leg: how it combines and which surd it needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegSpec {
    pub combine: Combine,
    pub surd: Option<SurdKind>,
}

fn key(eq: &FaceEquation) -> (Family, i32, i32, i32) {
    // Regimes are distinguished by doubling δ so that ½ becomes an integer.
    let dbl = |d: &Scalar| (d * s(2)).to_i64().unwrap_or(-1) as i32;
    (eq.family, dbl(&eq.deltas.d1), dbl(&eq.deltas.d2), dbl(&eq.deltas.d3))
}

/// Describes the `role` leg of `eq`, or `None` when the table has no such leg.
pub fn leg_spec(eq: &FaceEquation, role: LegRole) -> Option<LegSpec> {
    use Combine::*;
    use Family::*;
    let expected = match eq.family.eq_type() {
        EqType::A => LegRole::A,
        EqType::B => LegRole::B,
        EqType::C => LegRole::C,
    };
    if role != expected {
        return None;
    }
    let spec = |combine, surd| Some(LegSpec { combine, surd });
    match key(eq) {
        (A3, 2, _, _) => spec(Multiplicative, Some(SurdKind::Hyperbolic)),
        (A3, 0, _, _) => spec(Multiplicative, None),
        (A2, 2, 2, _) => spec(Multiplicative, Some(SurdKind::Square)),
        (A2, 2, 0, _) => spec(Multiplicative, None),
        (A2, 0, 0, _) => spec(Additive, None),
        (B3, 1, 0, 1) => spec(Multiplicative, Some(SurdKind::Hyperbolic)),
        (B3, ..) => spec(Multiplicative, None),
        (B2, 2, 0, 2) => spec(Multiplicative, Some(SurdKind::Square)),
        (B2, ..) => spec(Multiplicative, None),
        (D1, ..) => spec(Additive, None),
        (C3, 1, 1, 0) => spec(Multiplicative, Some(SurdKind::Hyperbolic)),
        (C3, ..) => spec(Multiplicative, None),
        (C2, 2, 2, 0) => spec(Multiplicative, Some(SurdKind::Square)),
        (C2, 0, 0, 0) => spec(Additive, None),
        (C2, ..) => spec(Multiplicative, None),
        (C1, ..) => spec(Additive, None),
        _ => None,
    }
}

/// The type-A equation whose `a`-legs pair with the `c`-legs of a type-C
/// equation in its four-leg form.
pub fn paired_a_equation(eq: &FaceEquation) -> Option<FaceEquation> {
    let d = &eq.deltas;
    let a = match eq.family {
        Family::C3 => FaceEquation {
            family: Family::A3,
            deltas: Deltas::one(&d.d2 * s(2)),
        },
        Family::C2 => FaceEquation {
            family: Family::A2,
            deltas: Deltas::two(d.d1.clone(), d.d2.clone()),
        },
        Family::C1 => FaceEquation {
            family: Family::A2,
            deltas: Deltas::none(),
        },
        _ => return None,
    };
    Some(a)
}

fn nz(v: Scalar, what: &str) -> Result<Scalar, CatalogueError> {
    if v.is_zero() {
        Err(CatalogueError::DomainViolation(format!("vanishing {what}")))
    } else {
        Ok(v)
    }
}

fn ratio(num: Scalar, den: Scalar) -> Result<Scalar, CatalogueError> {
    let den = nz(den, "leg denominator")?;
    Ok(num / den)
}

/// Exact value of the `role` leg of `eq` at `(x; y; a, b)`.
pub fn leg(
    eq: &FaceEquation,
    role: LegRole,
    x: &LegArg,
    y: &Scalar,
    a: &Scalar,
    b: &Scalar,
) -> Result<Scalar, CatalogueError> {
    use Family::*;
    leg_spec(eq, role).ok_or_else(|| CatalogueError::NoLeg(eq.id(), role))?;
    let xv = x.value();
    let bar = || -> Result<Scalar, CatalogueError> { Ok(x.surd(SurdKind::Hyperbolic, eq)?.bar()) };
    let sqrt = || -> Result<Scalar, CatalogueError> { Ok(x.surd(SurdKind::Square, eq)?.root.clone()) };
    match key(eq) {
        (A3, 2, _, _) => {
            let xb = bar()?;
            let cross = s(2) * a * b * &xb * y;
            ratio(a * a + b * b * &xb * &xb - &cross, b * b + a * a * &xb * &xb - cross)
        }
        (A3, 0, _, _) => ratio(b * xv - a * y, a * xv - b * y),
        (A2, 2, 2, _) => {
            let r = sqrt()?;
            let p = &r + a - b;
            let m = &r - a + b;
            ratio(&p * &p - y, &m * &m - y)
        }
        (A2, 2, 0, _) => ratio(-xv + y + a - b, xv - y + a - b),
        (A2, 0, 0, _) => ratio(a - b, xv - y),
        (B3, 1, 1, 0) => Ok(b * b + a * a * xv * xv - s(2) * a * b * xv * y),
        (B3, 1, 0, 1) => {
            let xb = bar()?;
            ratio(a * y - b * &xb, a * &xb * y - b)
        }
        (B3, 2, 0, 0) => Ok(b - a * xv * y),
        (B3, 0, 0, 0) => Ok(y.clone()),
        (B2, 2, 2, 0) => {
            let p = xv + a - b;
            Ok(&p * &p - y)
        }
        (B2, 2, 0, 2) => {
            let r = sqrt()?;
            ratio(&r + y + a - b, -&r + y + a - b)
        }
        (B2, 2, 0, 0) => Ok(xv + y + a - b),
        (B2, 0, 0, 0) => Ok(y.clone()),
        (D1, ..) => Ok(y.clone()),
        (C3, 1, 1, 0) => {
            let xb = bar()?;
            ratio(a - b * &xb * y, a * &xb - b * y)
        }
        (C3, 1, 0, 1) => Ok(a * a / nz(b.clone(), "β")? + b * xv * xv - s(2) * a * xv * y),
        (C3, 2, 0, 0) => Ok(xv * y - a / nz(b.clone(), "β")?),
        (C3, 0, 0, 0) => Ok(y.clone()),
        (C2, 2, 2, 0) => {
            let r = sqrt()?;
            ratio(-&r + y - a + b, &r + y - a + b)
        }
        (C2, 2, 0, 2) => {
            let p = xv - a + b;
            Ok(&p * &p - y)
        }
        (C2, 2, 0, 0) => Ok(xv + y - a + b),
        (C2, 0, 0, 0) => ratio(-(y + b), s(2) * xv),
        (C1, ..) => Ok(y.clone()),
        _ => Err(CatalogueError::NoLeg(eq.id(), role)),
    }
}

/// The four-leg residual of `eq` at `p`: `(leg product) − 1` for
/// multiplicative forms and the signed leg sum for additive ones.
///
/// Surd-bearing legs take the face variable from `surd`, whose `value` must
/// equal `p.x`.
pub fn fourleg_residual(
    eq: &FaceEquation,
    p: &FacePoint,
    surd: Option<&SurdParam>,
) -> Result<Scalar, CatalogueError> {
    let (outer_eq, outer_role, inner_role) = match eq.eq_type() {
        EqType::A => (eq.clone(), LegRole::A, LegRole::A),
        EqType::B => (eq.clone(), LegRole::B, LegRole::B),
        EqType::C => (
            paired_a_equation(eq).expect("type-C equations have a paired type-A equation"),
            LegRole::A,
            LegRole::C,
        ),
    };
    let x = match surd {
        Some(sp) => {
            if sp.value != p.x {
                return Err(CatalogueError::DomainViolation(
                    "surd value differs from the face variable".into(),
                ));
            }
            LegArg::Surd(sp.clone())
        }
        None => LegArg::Plain(p.x.clone()),
    };
    let [xa, xb, xc, xd] = &p.corners;
    let (a1, a2) = (&p.alpha.first, &p.alpha.second);
    let (b1, b2) = (&p.beta.first, &p.beta.second);
    let lo = |y: &Scalar, a: &Scalar, b: &Scalar| leg(&outer_eq, outer_role, &x, y, a, b);
    let li = |y: &Scalar, a: &Scalar, b: &Scalar| leg(eq, inner_role, &x, y, a, b);
    let combine = leg_spec(eq, inner_role)
        .expect("every catalogue equation has legs")
        .combine;
    let la = lo(xa, a2, b1)?;
    let ld = li(xd, a1, b2)?;
    let lb = lo(xb, a2, b2)?;
    let lc = li(xc, a1, b1)?;
    match combine {
        Combine::Multiplicative => Ok(la * ld / nz(lb * lc, "leg product")? - s(1)),
        Combine::Additive => Ok(la + ld - lb - lc),
    }
}

/// The relation `a(x;y;α,β)·a(x;y;β,α) = 1` for multiplicative type-A legs,
/// or its additive analogue `a(x;y;α,β) + a(x;y;β,α) = 0`; returns the
/// deviation from the identity.
pub fn leg_unit_residual(
    eq: &FaceEquation,
    x: &LegArg,
    y: &Scalar,
    a: &Scalar,
    b: &Scalar,
) -> Result<Scalar, CatalogueError> {
    let spec = leg_spec(eq, LegRole::A).ok_or_else(|| CatalogueError::NoLeg(eq.id(), LegRole::A))?;
    let l1 = leg(eq, LegRole::A, x, y, a, b)?;
    let l2 = leg(eq, LegRole::A, x, y, b, a)?;
    Ok(match spec.combine {
        Combine::Multiplicative => l1 * l2 - s(1),
        Combine::Additive => l1 + l2,
    })
}

// ---------------------------------------------------------------------------
// Symmetries
// ---------------------------------------------------------------------------

/// The three reflection symmetries of a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symmetry {
    /// Reflection bisecting the β edges: `(x_b, x_a, x_d, x_c; α, β̂)`.
    BetaReflection,
    /// Reflection bisecting the α edges: `(x_c, x_d, x_a, x_b; α̂, β)`.
    AlphaReflection,
    /// Reflection on the `x_b x_c` diagonal: `(x_d, x_b, x_c, x_a; β, α)`.
    Diagonal,
}

impl Symmetry {
    pub const ALL: [Symmetry; 3] = [
        Symmetry::BetaReflection,
        Symmetry::AlphaReflection,
        Symmetry::Diagonal,
    ];

    /// Whether equations of this type are odd under the reflection.
    pub fn expected_for(self, t: EqType) -> bool {
        match self {
            Symmetry::BetaReflection => true,
            Symmetry::AlphaReflection => matches!(t, EqType::A | EqType::B),
            Symmetry::Diagonal => t == EqType::A,
        }
    }

    pub fn apply(self, p: &FacePoint) -> FacePoint {
        let [xa, xb, xc, xd] = p.corners.clone();
        match self {
            Symmetry::BetaReflection => FacePoint::new(p.x.clone(), [xb, xa, xd, xc], p.alpha.clone(), p.beta.hat()),
            Symmetry::AlphaReflection => FacePoint::new(p.x.clone(), [xc, xd, xa, xb], p.alpha.hat(), p.beta.clone()),
            Symmetry::Diagonal => FacePoint::new(p.x.clone(), [xd, xb, xc, xa], p.beta.clone(), p.alpha.clone()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Symmetry::BetaReflection => "beta-reflection",
            Symmetry::AlphaReflection => "alpha-reflection",
            Symmetry::Diagonal => "diagonal",
        }
    }
}

/// `evaluate(p) + evaluate(reflected p)`, zero when the equation is odd under
/// the reflection.
pub fn symmetry_residual(eq: &FaceEquation, p: &FacePoint, sym: Symmetry) -> Result<Scalar, CatalogueError> {
    Ok(evaluate(eq, p)? + evaluate(eq, &sym.apply(p))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(a: i64, b: i64) -> ParamPair {
        ParamPair::new(s(a), s(b))
    }

    #[test]
    fn identifiers_round_trip() {
        for eq in FaceEquation::all() {
            let back: FaceEquation = eq.id().parse().unwrap();
            assert_eq!(back, eq);
        }
        assert_eq!(FaceEquation::all().len(), 23);
        assert_eq!(FaceEquation::parse("B3:1/2,0,1/2").unwrap().laurent_offset(), 1);
    }

    #[test]
    fn inadmissible_regimes_rejected() {
        assert!(matches!(
            "A2:1,1,0".parse::<FaceEquation>(),
            Err(CatalogueError::InadmissibleDeltas { .. })
        ));
        assert!(matches!(
            make_equation(Family::A2, Deltas::two(s(0), s(1))),
            Err(CatalogueError::InadmissibleDeltas { .. })
        ));
        assert!("Q4".parse::<FaceEquation>().is_err());
    }

    #[test]
    fn d1_telescopes() {
        let eq = FaceEquation::parse("D1").unwrap();
        let p = FacePoint::new(s(0), [s(1), s(2), s(3), s(4)], pp(1, 2), pp(3, 5));
        assert_eq!(evaluate(&eq, &p).unwrap(), s(0));
        assert_eq!(fourleg_residual(&eq, &p, None).unwrap(), s(0));
    }

    #[test]
    fn a3_vanishes_on_the_diagonal() {
        let eq = FaceEquation::parse("A3:d=0").unwrap();
        let x = Scalar::ratio(7, 3).unwrap();
        let p = FacePoint::new(x.clone(), [x.clone(), x.clone(), x.clone(), x], pp(2, 3), pp(5, 7));
        assert_eq!(evaluate(&eq, &p).unwrap(), s(0));
    }

    #[test]
    fn a2_vanishes_when_all_variables_agree() {
        let eq = FaceEquation::parse("A2:0,0").unwrap();
        let p = FacePoint::new(s(4), [s(4), s(4), s(4), s(4)], pp(2, 3), pp(5, 7));
        assert_eq!(evaluate(&eq, &p).unwrap(), s(0));
    }

    #[test]
    fn a3_delta_one_golden_value() {
        let eq = FaceEquation::parse("A3:d=1").unwrap();
        let p = FacePoint::new(s(1), [s(2), s(3), s(4), s(5)], pp(1, 2), pp(3, 5));
        assert_eq!(evaluate(&eq, &p).unwrap(), Scalar::ratio(491, 150).unwrap());
    }

    #[test]
    fn b3_rejects_zero_face_variable() {
        let eq = FaceEquation::parse("B3:1,0,0").unwrap();
        let p = FacePoint::new(s(0), [s(1), s(2), s(3), s(4)], pp(1, 2), pp(3, 5));
        assert!(matches!(evaluate(&eq, &p), Err(CatalogueError::DomainViolation(_))));
        let p = FacePoint::new(s(1), [s(1), s(2), s(3), s(4)], pp(0, 2), pp(3, 5));
        assert!(matches!(evaluate(&eq, &p), Err(CatalogueError::DomainViolation(_))));
    }

    #[test]
    fn a3_leg_examples() {
        let eq = FaceEquation::parse("A3:d=0").unwrap();
        let x = LegArg::Plain(s(2));
        assert_eq!(
            leg(&eq, LegRole::A, &x, &s(3), &s(1), &s(5)).unwrap(),
            Scalar::ratio(-7, 13).unwrap()
        );
        assert_eq!(leg(&eq, LegRole::A, &x, &s(3), &s(4), &s(4)).unwrap(), s(1));
        let a2 = FaceEquation::parse("A2:0,0").unwrap();
        assert_eq!(leg(&a2, LegRole::A, &x, &s(3), &s(4), &s(4)).unwrap(), s(0));
    }

    #[test]
    fn surd_legs_require_surds() {
        let eq = FaceEquation::parse("A3:d=1").unwrap();
        let r = leg(&eq, LegRole::A, &LegArg::Plain(s(2)), &s(3), &s(1), &s(5));
        assert!(matches!(r, Err(CatalogueError::MissingSurd(_))));
    }

    #[test]
    fn wrong_role_has_no_leg() {
        let eq = FaceEquation::parse("B2:1,0,0").unwrap();
        let r = leg(&eq, LegRole::A, &LegArg::Plain(s(2)), &s(3), &s(1), &s(5));
        assert!(matches!(r, Err(CatalogueError::NoLeg(..))));
    }

    #[test]
    fn pairing_rule() {
        let c3 = FaceEquation::parse("C3:1/2,1/2,0").unwrap();
        assert_eq!(paired_a_equation(&c3).unwrap().id(), "A3:d=1");
        let c2 = FaceEquation::parse("C2:1,1,0").unwrap();
        assert_eq!(paired_a_equation(&c2).unwrap().id(), "A2:1,1");
        let c1 = FaceEquation::parse("C1").unwrap();
        assert_eq!(paired_a_equation(&c1).unwrap().id(), "A2:0,0");
    }

    #[test]
    fn hat_is_an_involution() {
        let p = pp(3, 8);
        assert_eq!(p.hat().hat(), p);
        assert_eq!(p.hat(), pp(8, 3));
    }
}
