//! Lax matrices: the two generic constructions, the closed-form catalogue
//! matrices and determinants, the normalisations that make the Lax equation
//! hold exactly, and the closed-form compatibility residuals.
//!
//! Approach A transports the `c`-corner of a type-A or type-C equation to its
//! `d`-corner ([`build_lax_a`]); approach B transports the `d`-corner of a
//! type-C equation to its `b`-corner ([`build_lax_b`]).  Four such matrices
//! around the central face form a [`LaxQuadruple`] whose [`residual`]
//! `L4·L2 − L3·L1` vanishes on solutions of the central equation.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::catalogue::{
    evaluate, evaluate_cleared, make_equation, CatalogueError, Deltas, EqType, FaceEquation, FacePoint,
    Family, ParamPair, Theta,
};
use crate::cube::{assemble_system, CubeError, CubeParams, EquationSystem, SystemConfig, Vertex};
use crate::exactnum::{s, NumError, Scalar, SurdKind, SurdParam};

/// Errors raised by Lax constructions and oracles.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaxError {
    #[error("{0} is type-B; approach A needs a type-A or type-C equation")]
    TypeBNotAllowed(String),
    #[error("{0} is not a type-C equation")]
    NotTypeC(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("no closed-form catalogue entry for {0}")]
    NoCatalogueEntry(String),
    #[error("{prop} does not cover {detail}")]
    RegimeMismatch { prop: String, detail: String },
    #[error("{0} needs a surd parametrisation of the shared corner")]
    MissingSurd(String),
    #[error("degenerate point: {0}")]
    Degenerate(String),
    #[error("point is missing vertex {0}")]
    MissingVertex(Vertex),
    #[error(transparent)]
    Catalogue(#[from] CatalogueError),
    #[error(transparent)]
    Cube(#[from] CubeError),
    #[error(transparent)]
    Num(#[from] NumError),
}

/// Checked division reporting a vanishing denominator as a degenerate point.
fn dv(num: Scalar, den: Scalar, what: &str) -> Result<Scalar, LaxError> {
    if den.is_zero() {
        Err(LaxError::Degenerate(format!("vanishing {what}")))
    } else {
        Ok(num / den)
    }
}

fn sq(v: &Scalar) -> Scalar {
    v * v
}

fn pw(e: Scalar, d: &Scalar) -> Scalar {
    if d.is_zero() {
        s(1)
    } else {
        e
    }
}

fn bit(d: &Scalar) -> i32 {
    if d.is_zero() {
        0
    } else {
        1
    }
}

fn powi(e: &Scalar, k: i32) -> Scalar {
    e.pow(k).expect("nonnegative exponent")
}

/// `u/v − v/u`.
fn f(u: &Scalar, v: &Scalar) -> Scalar {
    u / v - v / u
}

// ---------------------------------------------------------------------------
// Matrix2
// ---------------------------------------------------------------------------

/// A 2×2 matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix2 {
    pub e11: Scalar,
    pub e12: Scalar,
    pub e21: Scalar,
    pub e22: Scalar,
}

impl Matrix2 {
    pub fn new(e11: Scalar, e12: Scalar, e21: Scalar, e22: Scalar) -> Self {
        Matrix2 { e11, e12, e21, e22 }
    }

    pub fn identity() -> Self {
        Matrix2::new(s(1), s(0), s(0), s(1))
    }

    pub fn zero() -> Self {
        Matrix2::new(s(0), s(0), s(0), s(0))
    }

    /// `u ⊗ v`, the rank-one matrix with entries `u_i v_j`.
    pub fn outer(u: [&Scalar; 2], v: [&Scalar; 2]) -> Self {
        Matrix2::new(u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1])
    }

    pub fn det(&self) -> Scalar {
        &self.e11 * &self.e22 - &self.e12 * &self.e21
    }

    pub fn trace(&self) -> Scalar {
        &self.e11 + &self.e22
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|e| e.is_zero())
    }

    pub fn entries(&self) -> [&Scalar; 4] {
        [&self.e11, &self.e12, &self.e21, &self.e22]
    }

    pub fn scale(&self, k: &Scalar) -> Matrix2 {
        Matrix2::new(k * &self.e11, k * &self.e12, k * &self.e21, k * &self.e22)
    }

    /// Applies the matrix to the column vector `(v, 1)`.
    pub fn apply(&self, v: &Scalar) -> [Scalar; 2] {
        [&self.e11 * v + &self.e12, &self.e21 * v + &self.e22]
    }

    /// Whether `self = λ·I` for some scalar `λ`, returning `λ`.
    pub fn as_scalar_multiple_of_identity(&self) -> Option<Scalar> {
        (self.e12.is_zero() && self.e21.is_zero() && self.e11 == self.e22)
            .then(|| self.e11.clone())
    }

    /// `x²·m2 + x·m1 + m0`.
    pub fn quadratic(x: &Scalar, m2: &Matrix2, m1: &Matrix2, m0: &Matrix2) -> Matrix2 {
        &(&m2.scale(&sq(x)) + &m1.scale(x)) + m0
    }
}

/// The exact inverse of `m`.
pub fn invert(m: &Matrix2) -> Result<Matrix2, LaxError> {
    let d = m.det();
    if d.is_zero() {
        return Err(LaxError::SingularMatrix);
    }
    let k = s(1) / d;
    Ok(Matrix2::new(&m.e22 * &k, -(&m.e12 * &k), -(&m.e21 * &k), &m.e11 * &k))
}

impl Add for &Matrix2 {
    type Output = Matrix2;
    fn add(self, o: &Matrix2) -> Matrix2 {
        Matrix2::new(
            &self.e11 + &o.e11,
            &self.e12 + &o.e12,
            &self.e21 + &o.e21,
            &self.e22 + &o.e22,
        )
    }
}

impl Sub for &Matrix2 {
    type Output = Matrix2;
    fn sub(self, o: &Matrix2) -> Matrix2 {
        Matrix2::new(
            &self.e11 - &o.e11,
            &self.e12 - &o.e12,
            &self.e21 - &o.e21,
            &self.e22 - &o.e22,
        )
    }
}

impl Mul for &Matrix2 {
    type Output = Matrix2;
    fn mul(self, o: &Matrix2) -> Matrix2 {
        Matrix2::new(
            &self.e11 * &o.e11 + &self.e12 * &o.e21,
            &self.e11 * &o.e12 + &self.e12 * &o.e22,
            &self.e21 * &o.e11 + &self.e22 * &o.e21,
            &self.e21 * &o.e12 + &self.e22 * &o.e22,
        )
    }
}

impl Neg for &Matrix2 {
    type Output = Matrix2;
    fn neg(self) -> Matrix2 {
        self.scale(&s(-1))
    }
}

impl fmt::Display for Matrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.e11, self.e12, self.e21, self.e22)
    }
}

impl Serialize for Matrix2 {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut seq = ser.serialize_seq(Some(2))?;
        seq.serialize_element(&[&self.e11, &self.e12])?;
        seq.serialize_element(&[&self.e21, &self.e22])?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Matrix2 {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let [[a, b], [c, d]] = <[[Scalar; 2]; 2]>::deserialize(de)?;
        Ok(Matrix2::new(a, b, c, d))
    }
}

// ---------------------------------------------------------------------------
// Generic builders
// ---------------------------------------------------------------------------

/// The approach-A Lax matrix of `eq`, with unit normalisation.
///
/// With `E(c, d)` the value of `eq` at corners `(x_a, x_b, c, d)`, the matrix
/// maps `(x_c, 1)` projectively to `(x_d, 1)` where `x_d` solves `eq = 0`.
pub fn build_lax_a(
    eq: &FaceEquation,
    x: &Scalar,
    xa: &Scalar,
    xb: &Scalar,
    alpha: &ParamPair,
    beta: &ParamPair,
) -> Result<Matrix2, LaxError> {
    if eq.eq_type() == EqType::B {
        return Err(LaxError::TypeBNotAllowed(eq.id()));
    }
    let e = |c: i64, d: i64| {
        evaluate_cleared(
            eq,
            &FacePoint::new(
                x.clone(),
                [xa.clone(), xb.clone(), s(c), s(d)],
                alpha.clone(),
                beta.clone(),
            ),
        )
    };
    let (e00, e01, e10, e11) = (e(0, 0)?, e(0, 1)?, e(1, 0)?, e(1, 1)?);
    Ok(Matrix2::new(
        &e10 - &e00,
        e00.clone(),
        -&e00 + &e01 + &e10 - &e11,
        &e00 - &e01,
    ))
}

/// The approach-B Lax matrix of the type-C equation `eq`, with unit
/// normalisation.
///
/// With `E(b, d)` the value of `eq` at corners `(x_a, b, x_c, d)`, the matrix
/// maps `(x_d, 1)` projectively to `(x_b, 1)` where `x_b` solves `eq = 0`.
pub fn build_lax_b(
    eq: &FaceEquation,
    x: &Scalar,
    xa: &Scalar,
    xc: &Scalar,
    alpha: &ParamPair,
    beta: &ParamPair,
) -> Result<Matrix2, LaxError> {
    if eq.eq_type() != EqType::C {
        return Err(LaxError::NotTypeC(eq.id()));
    }
    let e = |b: i64, d: i64| {
        evaluate_cleared(
            eq,
            &FacePoint::new(
                x.clone(),
                [xa.clone(), s(b), xc.clone(), s(d)],
                alpha.clone(),
                beta.clone(),
            ),
        )
    };
    let (e00, e01, e10, e11) = (e(0, 0)?, e(0, 1)?, e(1, 0)?, e(1, 1)?);
    Ok(Matrix2::new(
        &e01 - &e00,
        e00.clone(),
        -&e00 + &e01 + &e10 - &e11,
        &e00 - &e10,
    ))
}

/// Recovers `(m2, m1, m0)` with `m(x) = x²·m2 + x·m1 + m0` by exact
/// interpolation at `x = 0, 1, −1`.
pub fn coefficients_in_x<F>(m: F) -> Result<[Matrix2; 3], LaxError>
where
    F: Fn(&Scalar) -> Result<Matrix2, LaxError>,
{
    let m0 = m(&s(0))?;
    let p = m(&s(1))?;
    let n = m(&s(-1))?;
    let half = Scalar::half();
    let m2 = (&(&(&p + &n) - &m0) - &m0).scale(&half);
    let m1 = (&p - &n).scale(&half);
    Ok([m2, m1, m0])
}

// ---------------------------------------------------------------------------
// Catalogue entries
// ---------------------------------------------------------------------------

/// Which construction a Lax matrix comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Approach {
    A,
    B,
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Approach::A => "A",
            Approach::B => "B",
        })
    }
}

/// The closed-form Lax matrices, named after the equation whose Lax pair they
/// are: approach A for A3, A2 and the C-equations, approach B for B3, B2 and
/// D1 (built from the matching C-equation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LaxEntry {
    A3,
    A2,
    C3,
    C2,
    C1,
    B3,
    B2,
    D1,
}

impl LaxEntry {
    pub const ALL: [LaxEntry; 8] = [
        LaxEntry::A3,
        LaxEntry::A2,
        LaxEntry::C3,
        LaxEntry::C2,
        LaxEntry::C1,
        LaxEntry::B3,
        LaxEntry::B2,
        LaxEntry::D1,
    ];

    pub fn approach(self) -> Approach {
        match self {
            LaxEntry::B3 | LaxEntry::B2 | LaxEntry::D1 => Approach::B,
            _ => Approach::A,
        }
    }

    /// The family fed to the generic builder.
    pub fn builder_family(self) -> Family {
        match self {
            LaxEntry::A3 => Family::A3,
            LaxEntry::A2 => Family::A2,
            LaxEntry::C3 | LaxEntry::B3 => Family::C3,
            LaxEntry::C2 | LaxEntry::B2 => Family::C2,
            LaxEntry::C1 | LaxEntry::D1 => Family::C1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LaxEntry::A3 => "A3",
            LaxEntry::A2 => "A2",
            LaxEntry::C3 => "C3",
            LaxEntry::C2 => "C2",
            LaxEntry::C1 => "C1",
            LaxEntry::B3 => "B3",
            LaxEntry::B2 => "B2",
            LaxEntry::D1 => "D1",
        }
    }
}

impl fmt::Display for LaxEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A catalogue entry in a specific δ-regime.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LaxKey {
    pub entry: LaxEntry,
    /// The builder equation (A3, A2, C3, C2 or C1) in its regime.
    pub equation: FaceEquation,
}

impl LaxKey {
    /// Key for `entry` with the builder equation in regime `deltas`.
    pub fn new(entry: LaxEntry, deltas: Deltas) -> Result<LaxKey, LaxError> {
        let equation = make_equation(entry.builder_family(), deltas)?;
        Ok(LaxKey { entry, equation })
    }

    /// Every catalogue key, one per entry and admissible regime.
    pub fn all() -> Vec<LaxKey> {
        LaxEntry::ALL
            .into_iter()
            .flat_map(|e| {
                e.builder_family()
                    .regimes()
                    .into_iter()
                    .map(move |d| LaxKey::new(e, d).expect("admissible"))
            })
            .collect()
    }

    pub fn deltas(&self) -> &Deltas {
        self.equation.deltas()
    }

    /// Identifier such as `B3:1/2,0,1/2` (the entry name with the builder
    /// equation's regime).
    pub fn id(&self) -> String {
        let eq = self.equation.id();
        match eq.split_once(':') {
            Some((_, ds)) => format!("{}:{}", self.entry, ds),
            None => self.entry.to_string(),
        }
    }

    /// Whether a closed-form determinant is listed.
    pub fn has_det(&self) -> bool {
        !matches!(self.entry, LaxEntry::C1 | LaxEntry::D1)
    }

    /// The generic builder output for this entry.
    pub fn builder(
        &self,
        x: &Scalar,
        x1: &Scalar,
        x2: &Scalar,
        alpha: &ParamPair,
        beta: &ParamPair,
    ) -> Result<Matrix2, LaxError> {
        match self.entry.approach() {
            Approach::A => build_lax_a(&self.equation, x, x1, x2, alpha, beta),
            Approach::B => build_lax_b(&self.equation, x, x1, x2, alpha, beta),
        }
    }
}

impl fmt::Display for LaxKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for LaxKey {
    type Err = LaxError;

    fn from_str(st: &str) -> Result<Self, Self::Err> {
        LaxKey::all()
            .into_iter()
            .find(|k| k.id() == st.trim())
            .ok_or_else(|| LaxError::NoCatalogueEntry(st.to_string()))
    }
}

/// The parameter-only factor `κ` with `catalogue_lax = κ · builder`.
pub fn catalogue_scale(key: &LaxKey, alpha: &ParamPair, beta: &ParamPair) -> Scalar {
    let d = key.deltas();
    match key.entry {
        LaxEntry::A3 => s(4) * &alpha.first * &alpha.second * &beta.first * &beta.second,
        LaxEntry::B3 => s(-1),
        LaxEntry::B2 if !d.d3.is_zero() || !d.d2.is_zero() => s(-1),
        _ => s(1),
    }
}

fn require_nonzero_params(alpha: &ParamPair, beta: &ParamPair) -> Result<(), LaxError> {
    if [&alpha.first, &alpha.second, &beta.first, &beta.second]
        .iter()
        .any(|v| v.is_zero())
    {
        return Err(LaxError::Catalogue(CatalogueError::DomainViolation(
            "closed forms need nonzero parameters".into(),
        )));
    }
    Ok(())
}

/// The closed-form Lax matrix of `key` at `(x; x1, x2; α, β)`, where
/// `(x1, x2) = (x_a, x_b)` for approach A and `(x_a, x_c)` for approach B.
pub fn catalogue_lax(
    key: &LaxKey,
    x: &Scalar,
    x1: &Scalar,
    x2: &Scalar,
    alpha: &ParamPair,
    beta: &ParamPair,
) -> Result<Matrix2, LaxError> {
    let d = key.deltas();
    match key.entry {
        LaxEntry::A3 => {
            require_nonzero_params(alpha, beta)?;
            Ok(cat_a3(&d.d1, x, x1, x2, alpha, beta))
        }
        LaxEntry::C3 => {
            require_nonzero_params(alpha, beta)?;
            Ok(cat_c3a(d, x, x1, x2, alpha, beta))
        }
        LaxEntry::A2 => Ok(cat_a2(d, x, x1, x2, alpha, beta)),
        LaxEntry::C2 => Ok(cat_c2a(d, x, x1, x2, alpha, beta)),
        LaxEntry::C1 => Ok(cat_c1a(x, x1, x2, alpha, beta)),
        LaxEntry::B3 => {
            require_nonzero_params(alpha, beta)?;
            Ok(cat_b3(d, x, x1, x2, alpha, beta))
        }
        LaxEntry::B2 => Ok(cat_b2(d, x, x1, x2, alpha, beta)),
        LaxEntry::D1 => Ok(cat_d1(x, x1, x2, alpha, beta)),
    }
}

/// The closed-form determinant of [`catalogue_lax`].
pub fn catalogue_det(
    key: &LaxKey,
    x: &Scalar,
    x1: &Scalar,
    x2: &Scalar,
    alpha: &ParamPair,
    beta: &ParamPair,
) -> Result<Scalar, LaxError> {
    let d = key.deltas();
    match key.entry {
        LaxEntry::A3 => {
            require_nonzero_params(alpha, beta)?;
            Ok(det_a3(&d.d1, x, x1, x2, alpha, beta))
        }
        LaxEntry::C3 => {
            require_nonzero_params(alpha, beta)?;
            Ok(det_c3a(d, x, x1, x2, alpha, beta))
        }
        LaxEntry::A2 => Ok(det_a2(d, x, x1, x2, alpha, beta)),
        LaxEntry::C2 => Ok(det_c2a(d, x, x1, x2, alpha, beta)),
        LaxEntry::B3 => {
            require_nonzero_params(alpha, beta)?;
            Ok(det_b3(d, x, x1, x2, alpha, beta))
        }
        LaxEntry::B2 => Ok(det_b2(d, x, x1, x2, alpha, beta)),
        LaxEntry::C1 | LaxEntry::D1 => Err(LaxError::NoCatalogueEntry(key.id())),
    }
}

fn m(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Matrix2 {
    Matrix2::new(a, b, c, d)
}

/// `x²·m2 + x·m1 + m0 + δ·(x²·d2 + x·d1 + d0)`.
fn assemble(
    x: &Scalar,
    l: [Matrix2; 3],
    delta: &Scalar,
    dl: [Matrix2; 3],
) -> Matrix2 {
    let [l2, l1, l0] = l;
    let [d2, d1, d0] = dl;
    let base = Matrix2::quadratic(x, &l2, &l1, &l0);
    let corr = Matrix2::quadratic(x, &d2, &d1, &d0);
    &base + &corr.scale(delta)
}

fn cat_a3(d: &Scalar, x: &Scalar, xa: &Scalar, xb: &Scalar, al: &ParamPair, be: &ParamPair) -> Matrix2 {
    let (a1, a2, b1, b2) = (&al.first, &al.second, &be.first, &be.second);
    let k = s(4) * a1 * a2 * b1 * b2;
    let a12 = a1 * a2;
    let b12 = b1 * b2;
    let lx2 = m(
        f(b1, a1),
        f(a2, b1) * xa + f(b2, a2) * xb,
        s(0),
        f(b2, a1),
    )
    .scale(&k);
    let lx1 = m(
        f(a1, a2) * xa + f(&a12, &b12) * xb,
        f(b1, b2) * xa * xb,
        f(b1, b2),
        f(&a12, &b12) * xa + f(a1, a2) * xb,
    )
    .scale(&k);
    let lx0 = m(
        f(b2, a1) * xa * xb,
        s(0),
        f(b2, a2) * xa + f(a2, b1) * xb,
        f(b1, a1) * xa * xb,
    )
    .scale(&k);
    let d1m = m(
        s(0),
        (sq(a2) - sq(a1)) * (sq(b1) - sq(b2)) * f(&a12, &b12),
        s(0),
        s(0),
    );
    let d0m = m(
        (sq(a2) - sq(b1)) * (sq(a2) - sq(b2)) * (sq(b2) - sq(a1)) / (a2 * b2),
        (sq(a1) - sq(b1)) * (sq(a1) - sq(b2)) * (b1 * (sq(a2) - sq(b2)) * xa + b2 * (sq(b1) - sq(a2)) * xb)
            / (a1 * b1 * b2),
        s(0),
        (sq(a2) - sq(b1)) * (sq(b1) - sq(a1)) * (sq(a2) - sq(b2)) / (a2 * b1),
    );
    assemble(x, [lx2, lx1, lx0], d, [Matrix2::zero(), d1m, d0m])
}

fn det_a3(d: &Scalar, x: &Scalar, xa: &Scalar, xb: &Scalar, al: &ParamPair, be: &ParamPair) -> Scalar {
    let (a1, a2, b1, b2) = (&al.first, &al.second, &be.first, &be.second);
    let q1 = (b1 * x - a2 * xa) * (b1 * xa - a2 * x) - d * a2 * b1 / s(4) * sq(&f(a2, b1));
    let q2 = (b2 * x - a2 * xb) * (b2 * xb - a2 * x) - d * a2 * b2 / s(4) * sq(&f(a2, b2));
    s(16) * (a1 + b1) * (a1 - b1) * q1 * (a1 + b2) * (a1 - b2) * q2
}

fn cat_c3a(ds: &Deltas, x: &Scalar, xa: &Scalar, xb: &Scalar, al: &ParamPair, be: &ParamPair) -> Matrix2 {
    let (d1, d2, d3) = (&ds.d1, &ds.d2, &ds.d3);
    let (a1, a2, b1, b2) = (&al.first, &al.second, &be.first, &be.second);
    let a22 = sq(a2);
    let b12 = b1 * b2;
    let lx2 = m(-(a2 * b2), s(0), s(0), -(a2 * b1));
    let lx1 = m(&b12 * xa + &a22 * xb, s(0), s(0), &a22 * xa + &b12 * xb);
    let lx0 = m(-(a2 * xa * xb * b1), s(0), s(0), -(a2 * xa * xb * b2));
    let d2m = m(
        s(0),
        &a22 * (xa / b1 - xb / b2) + (b2 * xb - b1 * xa),
        s(0),
        s(0),
    )
    .scale(&(s(2) * d3 * &b12 / a1));
    let d1m = m(
        s(0),
        d3 * xa * xb - sq(a1) / (s(2) * &b12),
        d2.clone(),
        s(0),
    )
    .scale(&(s(2) * (sq(b1) - sq(b2)) * a2 / a1));
    let d0m = m(
        -(d2 * (&a22 - sq(b1)) * f(a2, b2)),
        a1 * (b1 * xb - b2 * xa + &a22 * (xa / b2 - xb / b1)),
        s(2) * d2 / a1 * (&b12 * (b2 * xa - b1 * xb) + &a22 * (b2 * xb - b1 * xa)),
        -(d2 * f(a2, b1) * (&a22 - sq(b2))),
    );
    assemble(x, [lx2, lx1, lx0], d1, [d2m, d1m, d0m])
}

fn det_c3a(ds: &Deltas, x: &Scalar, xa: &Scalar, xb: &Scalar, al: &ParamPair, be: &ParamPair) -> Scalar {
    let d2 = &ds.d2;
    let (a2, b1, b2) = (&al.second, &be.first, &be.second);
    let q1 = (b1 * x - a2 * xa) * (b1 * xa - a2 * x) - d2 * a2 * b1 / s(2) * sq(&f(a2, b1));
    let q2 = (b2 * x - a2 * xb) * (b2 * xb - a2 * x) - d2 * a2 * b2 / s(2) * sq(&f(a2, b2));
    q1 * q2
}

fn cat_a2(ds: &Deltas, x: &Scalar, xa: &Scalar, xb: &Scalar, al: &ParamPair, be: &ParamPair) -> Matrix2 {
    let (d1, d2) = (&ds.d1, &ds.d2);
    let th = Theta::new(al, be);
    let t = |i, j| th.t(i, j);
    let lx2 = m(t(3, 1), t(2, 3) * xa - t(2, 4) * xb, s(0), t(4, 1));
    let lx1 = m(
        xa * t(1, 2) + xb * (t(1, 3) + t(2, 4)),
        t(3, 4) * xa * xb,
        t(3, 4),
        xb * t(1, 2) + xa * (t(1, 3) + t(2, 4)),
    );
    let lx0 = m(xa * xb * t(4, 1), s(0), xa * t(4, 2) + xb * t(2, 3), xa * xb * t(3, 1));
    let d2m = m(s(0), d2 * t(1, 2) * t(3, 4) * (t(1, 3) + t(2, 4)), s(0), s(0));
    let d1m = m(
        d2 * (s(2) * t(1, 3) * sq(&t(2, 4)) + t(1, 2) * t(3, 4) * (t(1, 2) - t(3, 4))),
        t(1, 2) * t(3, 4) * (t(1, 3) + t(2, 4))
            * pw(xa + xb - sq(&t(1, 3)) - sq(&t(2, 4)) - t(1, 2) * t(3, 4), d2)
            - s(2) * d2 * t(1, 3) * t(1, 4) * (xa * t(2, 4) + xb * t(3, 2)),
        s(0),
        d2 * (s(2) * t(1, 4) * sq(&t(2, 3)) - t(1, 2) * t(3, 4) * (t(1, 2) + t(3, 4))),
    );
    let d0m = m(
        t(1, 4) * t(2, 3) * t(2, 4) * pw(xb - t(1, 2) * t(3, 4) - sq(&t(2, 4)), d2)
            - d2 * t(1, 4) * (xa * t(1, 2) * t(2, 4) - xb * t(2, 3) * t(1, 3)),
        t(1, 3)
            * t(1, 4)
            * (xb * t(2, 3) * pw(t(1, 2) * t(4, 3) - sq(&t(1, 3)), d2)
                - xa * t(2, 4) * pw(t(1, 2) * t(3, 4) - sq(&t(1, 4)), d2)
                - d2 * t(3, 4) * (xa * xb - (t(1, 3) + t(2, 4)) * t(1, 2) * t(2, 3) * t(2, 4))),
        d2 * t(2, 3) * t(2, 4) * t(4, 3),
        t(1, 3) * t(2, 3) * t(2, 4) * pw(xa + t(1, 2) * t(3, 4) - sq(&t(2, 3)), d2)
            + d2 * t(1, 3) * (xa * t(1, 4) * t(2, 4) - xb * t(1, 2) * t(2, 3)),
    );
    assemble(x, [lx2, lx1, lx0], d1, [d2m, d1m, d0m])
}

/// `(x − y)² − δ1·θ²·(2(x + y) − θ²)^δ2`, the quadric factor of the
/// additive determinants.
fn add_quadric(x: &Scalar, y: &Scalar, th: &Scalar, d1: &Scalar, d2: &Scalar) -> Scalar {
    sq(&(x - y)) - d1 * sq(th) * pw(s(2) * (x + y) - sq(th), d2)
}

fn det_a2(ds: &Deltas, x: &Scalar, xa: &Scalar, xb: &Scalar, al: &ParamPair, be: &ParamPair) -> Scalar {
    let th = Theta::new(al, be);
    let t = |i, j| th.t(i, j);
    t(1, 3)
        * t(1, 4)
        * add_quadric(x, xa, &t(2, 3), &ds.d1, &ds.d2)
        * add_quadric(x, xb, &t(2, 4), &ds.d1, &ds.d2)
}

fn cat_c2a(ds: &Deltas, x: &Scalar, xa: &Scalar, xb: &Scalar, al: &ParamPair, be: &ParamPair) -> Matrix2 {
    let (d1, d2, d3) = (&ds.d1, &ds.d2, &ds.d3);
    let th = Theta::new(al, be);
    let t = |i, j| th.t(i, j);
    let k = 1 + bit(d2) + bit(d3);
    let tk = powi(&t(1, 3), k) + powi(&t(1, 4), k);
    let lx2 = m(s(-1), -t(4, 3), s(0), s(-1));
    let lx1 = m(xa + xb, (t(2, 3) + t(2, 4)) * (xb - xa), s(0), xa + xb);
    let lx0 = m(s(1), t(3, 4), s(0), s(1)).scale(&-(xa * xb));
    let d2m = m(
        s(0),
        d3 * (t(3, 4) * (t(1, 3) + t(1, 4) - 1) + s(2) * (xa * t(2, 3) - xb * t(2, 4))),
        s(0),
        s(0),
    );
    let d1m = m(
        t(3, 4) * pw(s(2) * t(1, 3), d2) + d2 * (sq(&t(2, 3)) + sq(&t(2, 4))),
        t(4, 3) * (&tk + s(2) * d3 * (t(2, 3) * t(2, 4) - xa * xb))
            - d3 * (t(1, 3) + t(1, 4) - 1) * (t(2, 3) + t(2, 4)) * (xa - xb),
        s(2) * d2 * t(3, 4),
        t(4, 3) * pw(s(2) * t(1, 4), d2) + d2 * (sq(&t(2, 3)) + sq(&t(2, 4))),
    );
    let d0m = m(
        t(2, 3) * t(2, 4) * pw(xb - s(2) * t(1, 4) * t(3, 4) - t(2, 3) * t(2, 4), d2)
            - xa * t(2, 4) * pw(t(1, 2) + t(1, 4), d2)
            + xb * t(2, 3) * pw(t(1, 3) + t(1, 4), d2),
        t(2, 3) * t(2, 4) * t(3, 4)
            * pw(s(2) * t(1, 3) * t(1, 4) - t(2, 3) * t(2, 4) + xa + xb, d2)
            * pw(t(1, 3) + t(1, 4), d3)
            + &tk * (xa * t(2, 4) - xb * t(2, 3))
            + d3 * t(3, 4) * (s(1) - t(1, 3) - t(1, 4)) * xa * xb,
        s(2) * d2 * (t(4, 2) * xa + t(2, 3) * xb - t(2, 3) * t(2, 4) * t(3, 4)),
        t(2, 3) * t(2, 4) * pw(xa + s(2) * t(1, 3) * t(3, 4) - t(2, 3) * t(2, 4), d2)
            + xa * t(2, 4) * pw(t(1, 3) + t(1, 4), d2)
            - xb * t(2, 3) * pw(t(1, 2) + t(1, 3), d2),
    );
    assemble(x, [lx2, lx1, lx0], d1, [d2m, d1m, d0m])
}

fn det_c2a(ds: &Deltas, x: &Scalar, xa: &Scalar, xb: &Scalar, al: &ParamPair, be: &ParamPair) -> Scalar {
    let th = Theta::new(al, be);
    let t = |i, j| th.t(i, j);
    add_quadric(x, xa, &t(2, 3), &ds.d1, &ds.d2) * add_quadric(x, xb, &t(2, 4), &ds.d1, &ds.d2)
}

fn cat_c1a(x: &Scalar, xa: &Scalar, xb: &Scalar, al: &ParamPair, be: &ParamPair) -> Matrix2 {
    let (a2, b1, b2) = (&al.second, &be.first, &be.second);
    let p = (x - xa) * (x - xb);
    m(
        p.clone(),
        s(2) * (b2 * (x - xa) + b1 * (x - xb) + a2 * (xa + xb - s(2) * x)),
        s(0),
        -p,
    )
}

fn cat_b3(ds: &Deltas, x: &Scalar, xa: &Scalar, xc: &Scalar, al: &ParamPair, be: &ParamPair) -> Matrix2 {
    let (d1, d2, d3) = (&ds.d1, &ds.d2, &ds.d3);
    let (a1, a2, b1, b2) = (&al.first, &al.second, &be.first, &be.second);
    let a22 = sq(a2);
    let lx2 = m(-b1.clone(), b2 * xc, s(0), s(0)).scale(a2);
    let lx1 = m(-(&a22 * xa), b1 * b2 * xa * xc, b1 * b2, -(&a22 * xc)).scale(&s(-1));
    let lx0 = m(s(0), s(0), b2.clone(), -(b1 * xc)).scale(&(a2 * xa));
    let d2m = m(
        s(0),
        (sq(b1) - &a22) * b2 * xa,
        s(0),
        (sq(b2) - &a22) * b1,
    )
    .scale(&(s(2) * d3 / a1));
    let d1m = m(s(2) * d2 * xc, sq(a1) / (b1 * b2), s(0), s(2) * d3 * xa)
        .scale(&(a2 * (sq(b1) - sq(b2)) / a1));
    let d0m = m(
        -(d2 * (&a22 - sq(b2)) * (a1 * (&a22 - sq(b1)) + s(2) * a2 * sq(b1) * xa * xc) / (a1 * a2 * b1)),
        (b2 - &a22 / b2) * (a1 * xa - d2 * (a2 - sq(b1) / a2) * xc),
        s(2) * d2 * (sq(b1) - &a22) * xc * b2 / a1,
        a1 * (b1 - &a22 / b1),
    );
    assemble(x, [lx2, lx1, lx0], d1, [d2m, d1m, d0m])
}

fn det_b3(ds: &Deltas, x: &Scalar, xa: &Scalar, xc: &Scalar, al: &ParamPair, be: &ParamPair) -> Scalar {
    let (d1, d2, d3) = (&ds.d1, &ds.d2, &ds.d3);
    let (a1, a2, b1, b2) = (&al.first, &al.second, &be.first, &be.second);
    (sq(a2) - sq(b2))
        * ((a2 * x - b1 * xa) * (a2 * xa - b1 * x) - d2 * a2 * b1 / s(2) * sq(&f(a2, b1)))
        * (x * xc - d1 * a1 / b1 - d2 * b1 / a1 * sq(xc) - d3 * b1 / a1 * sq(x))
}

fn cat_b2(ds: &Deltas, x: &Scalar, xa: &Scalar, xc: &Scalar, al: &ParamPair, be: &ParamPair) -> Matrix2 {
    let (d1, d2, d3) = (&ds.d1, &ds.d2, &ds.d3);
    let th = Theta::new(al, be);
    let t = |i, j| th.t(i, j);
    let k = 1 + bit(d2) + bit(d3);
    let sg = if bit(d3) == 1 { s(-1) } else { s(1) };
    let e2 = 1 + bit(d2);
    let d23 = d2 + d3;
    let lx2 = m(s(1), t(3, 4) - xc, s(0), s(0));
    let lx1 = m(
        -xa.clone(),
        -(xa * (t(2, 3) + t(2, 4) - xc)),
        s(1),
        -(t(2, 3) + t(2, 4) + xc),
    );
    let lx0 = m(s(0), s(0), -xa.clone(), xa * (xc + t(3, 4)));
    let d2m = m(
        s(-2) * &d23,
        s(2) * d2 * (xc - t(3, 4)) + d3 * (s(2) * (xc - xa * t(2, 3)) - t(3, 4) * (t(1, 3) + t(1, 4) + 1)),
        s(0),
        s(-2) * d3 * t(2, 4),
    );
    let d1m = m(
        t(3, 4) * pw(s(2) * (xc - t(1, 4)), d2) * &sg + &d23 * s(2) * xa + d2 * (sq(&t(2, 3)) + sq(&t(2, 4))),
        (t(3, 4) + d3 * xa)
            * (xc * pw(t(3, 1) + t(4, 1), d2) * &sg
                + s(2) * d3 * sq(&t(1, 2))
                + (powi(&t(3, 1), e2) + powi(&t(4, 1), e2)) * pw(t(3, 2) + t(4, 2), d3))
            + s(2) * d2 * (xa * (t(2, 4) - xc) + t(2, 3) * (xa - xc * t(2, 4)))
            - d3 * xa * (xc + s(2) * sq(&t(1, 2)) - (t(2, 3) + t(2, 4))),
        s(-2) * &d23,
        s(2) * &d23 * xc
            + s(2) * d3 * xa * t(3, 4)
            + (s(2) * d2 + d3) * (t(2, 3) + t(2, 4)) * pw(t(1, 3) + t(1, 4) + 1, d3),
    );
    let d0m = m(
        t(4, 2)
            * (t(2, 3) * pw(t(4, 3) * (t(1, 2) + t(1, 3) - s(2) * xc) + sq(&t(2, 3)) - xa, d2)
                + xa * pw(s(2) * xc - t(1, 3) - t(1, 4), d2))
            * &sg,
        t(4, 2)
            * (t(2, 3)
                * (t(4, 3)
                    * pw(t(2, 3) * t(2, 4) - s(2) * t(1, 3) * t(1, 4), d2)
                    * pw(t(3, 1) + t(4, 1), d3)
                    - xc * pw(s(2) * t(1, 4) * t(3, 4) + t(2, 3) * t(2, 4), d2) * &sg)
                + xa * (powi(&(t(3, 1) + t(4, 1)), k) + d2 * t(2, 3) * t(3, 4)
                    - &d23 * s(2) * t(1, 3) * t(1, 4)
                    + xc * pw(t(2, 1) + t(4, 1), d2) * &sg)),
        t(3, 2) * pw(s(2) * xc - t(1, 2) - t(1, 3), d2) * &sg + &d23 * s(2) * xa,
        t(2, 3)
            * (-(powi(&t(3, 1), k) + powi(&t(4, 1), k)) - xc * pw(s(2) * t(4, 1) - t(2, 3), d2) * &sg
                + d2 * t(2, 4) * t(3, 4))
            - (s(2) * d2 + d3) * (xc + t(3, 4)) * xa
            - d3 * (xc + t(3, 4) * (t(1, 3) + t(1, 4))) * xa,
    );
    assemble(x, [lx2, lx1, lx0], d1, [d2m, d1m, d0m])
}

fn det_b2(ds: &Deltas, x: &Scalar, xa: &Scalar, xc: &Scalar, al: &ParamPair, be: &ParamPair) -> Scalar {
    let (d1, d2, d3) = (&ds.d1, &ds.d2, &ds.d3);
    let th = Theta::new(al, be);
    let t = |i, j| th.t(i, j);
    let k = 1 + bit(d2) + bit(d3);
    s(2) * t(2, 4)
        * (x * pw(s(2) * t(1, 3) - x, d3) + d1 * xc * pw(s(2) * t(1, 3) - xc, d2)
            - d1 * powi(&t(1, 3), k))
        * -add_quadric(x, xa, &t(2, 3), d1, d2)
}

fn cat_d1(x: &Scalar, xa: &Scalar, xc: &Scalar, al: &ParamPair, be: &ParamPair) -> Matrix2 {
    let (a2, b1, b2) = (&al.second, &be.first, &be.second);
    m(
        x * (x - xa),
        (x - xa) * x * xc - s(2) * b2 * xa + s(2) * (b1 + b2) * x + s(2) * a2 * (xa - s(2) * x),
        x - xa,
        (x - xa) * xc + s(2) * (b1 - a2),
    )
}

// ---------------------------------------------------------------------------
// Propositions and normalisations
// ---------------------------------------------------------------------------

/// The eight Lax-pair propositions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PropId {
    P4_1,
    P4_2,
    P4_3,
    P4_4,
    P4_5,
    P4_6,
    P4_7,
    P4_8,
}

impl PropId {
    pub const ALL: [PropId; 8] = [
        PropId::P4_1,
        PropId::P4_2,
        PropId::P4_3,
        PropId::P4_4,
        PropId::P4_5,
        PropId::P4_6,
        PropId::P4_7,
        PropId::P4_8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropId::P4_1 => "P4.1",
            PropId::P4_2 => "P4.2",
            PropId::P4_3 => "P4.3",
            PropId::P4_4 => "P4.4",
            PropId::P4_5 => "P4.5",
            PropId::P4_6 => "P4.6",
            PropId::P4_7 => "P4.7",
            PropId::P4_8 => "P4.8",
        }
    }

    /// The catalogue entry whose matrices form the Lax pair.
    pub fn entry(self) -> LaxEntry {
        match self {
            PropId::P4_1 => LaxEntry::A3,
            PropId::P4_2 => LaxEntry::C3,
            PropId::P4_3 => LaxEntry::A2,
            PropId::P4_4 => LaxEntry::C2,
            PropId::P4_5 => LaxEntry::C1,
            PropId::P4_6 => LaxEntry::B3,
            PropId::P4_7 => LaxEntry::B2,
            PropId::P4_8 => LaxEntry::D1,
        }
    }

    pub fn approach(self) -> Approach {
        self.entry().approach()
    }

    /// The builder-equation regimes the proposition covers.
    pub fn regimes(self) -> Vec<Deltas> {
        let h = Scalar::half;
        let t = |a, b, c| Deltas::three(a, b, c);
        match self {
            PropId::P4_1 => vec![Deltas::one(s(0))],
            PropId::P4_3 => vec![Deltas::two(s(0), s(0)), Deltas::two(s(1), s(0))],
            PropId::P4_2 | PropId::P4_6 => vec![
                t(s(0), s(0), s(0)),
                t(s(1), s(0), s(0)),
                t(h(), s(0), h()),
            ],
            PropId::P4_4 | PropId::P4_7 => vec![
                t(s(0), s(0), s(0)),
                t(s(1), s(0), s(0)),
                t(s(1), s(0), s(1)),
            ],
            PropId::P4_5 | PropId::P4_8 => vec![Deltas::none()],
        }
    }

    /// The CAFCC configuration whose equations the Lax pair is built from.
    pub fn system(self, deltas: &Deltas) -> Result<SystemConfig, LaxError> {
        let eq = make_equation(self.entry().builder_family(), deltas.clone())?;
        let cfg = match self {
            PropId::P4_1 | PropId::P4_3 => SystemConfig::TypeA(eq),
            _ => SystemConfig::admissible()
                .into_iter()
                .find(|c| matches!(c, SystemConfig::Abc { c, .. } if *c == eq))
                .ok_or_else(|| LaxError::RegimeMismatch {
                    prop: self.name().into(),
                    detail: eq.id(),
                })?,
        };
        Ok(cfg)
    }

    /// Relation between the computed residual and the displayed closed form:
    /// `residual = proof_sign · proof_residual`.
    pub fn proof_sign(self) -> i64 {
        match self {
            PropId::P4_5 | PropId::P4_8 => 1,
            _ => -1,
        }
    }
}

impl fmt::Display for PropId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropId {
    type Err = LaxError;

    fn from_str(st: &str) -> Result<Self, Self::Err> {
        PropId::ALL
            .into_iter()
            .find(|p| p.name() == st.trim())
            .ok_or_else(|| LaxError::RegimeMismatch {
                prop: st.to_string(),
                detail: "unknown proposition".into(),
            })
    }
}

/// Choice of square-root branch for surd-bearing normalisations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

impl FromStr for Branch {
    type Err = LaxError;

    fn from_str(st: &str) -> Result<Self, Self::Err> {
        match st.trim() {
            "plus" | "+" => Ok(Branch::Plus),
            "minus" | "-" => Ok(Branch::Minus),
            other => Err(LaxError::RegimeMismatch {
                prop: "branch".into(),
                detail: other.to_string(),
            }),
        }
    }
}

/// One displayed normalisation: a proposition, a regime, and the choice of
/// variant, signs and branch that selects the formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalizationRule {
    pub prop: PropId,
    pub deltas: Deltas,
    /// Which of two displayed formulas (P4.1, P4.2); 1 otherwise.
    pub variant: u8,
    /// ε (P4.1, P4.4, P4.7) or ε1 (P4.3); +1 otherwise.
    pub eps: i8,
    /// ε2 (P4.3); +1 otherwise.
    pub eps2: i8,
    /// Surd branch (P4.6); plus otherwise.
    pub branch: Branch,
}

impl NormalizationRule {
    /// The default rule of `prop` in its first regime.
    pub fn new(prop: PropId) -> Self {
        NormalizationRule {
            prop,
            deltas: prop.regimes().remove(0),
            variant: 1,
            eps: 1,
            eps2: 1,
            branch: Branch::Plus,
        }
    }

    pub fn with_deltas(mut self, deltas: Deltas) -> Self {
        self.deltas = deltas;
        self
    }

    pub fn with_variant(mut self, variant: u8) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_eps(mut self, eps: i8) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_eps2(mut self, eps2: i8) -> Self {
        self.eps2 = eps2;
        self
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    /// Every case listed in the propositions.
    pub fn all() -> Vec<NormalizationRule> {
        let mut out = Vec::new();
        let signs = [1i8, -1];
        for prop in PropId::ALL {
            for d in prop.regimes() {
                let base = NormalizationRule::new(prop).with_deltas(d);
                match prop {
                    PropId::P4_1 => {
                        for v in [1, 2] {
                            for e in signs {
                                out.push(base.clone().with_variant(v).with_eps(e));
                            }
                        }
                    }
                    PropId::P4_2 => {
                        for v in [1, 2] {
                            out.push(base.clone().with_variant(v));
                        }
                    }
                    PropId::P4_3 => {
                        for e1 in signs {
                            for e2 in signs {
                                out.push(base.clone().with_eps(e1).with_eps2(e2));
                            }
                        }
                    }
                    PropId::P4_4 | PropId::P4_7 => {
                        for e in signs {
                            out.push(base.clone().with_eps(e));
                        }
                    }
                    PropId::P4_6 => {
                        for b in [Branch::Plus, Branch::Minus] {
                            out.push(base.clone().with_branch(b));
                        }
                    }
                    PropId::P4_5 | PropId::P4_8 => out.push(base),
                }
            }
        }
        out
    }

    /// Human-readable label, unique among [`NormalizationRule::all`].
    pub fn label(&self) -> String {
        let key = self.key().map(|k| k.id()).unwrap_or_default();
        let sgn = |e: i8| if e > 0 { "+1" } else { "-1" };
        match self.prop {
            PropId::P4_1 => format!("{} {} v{} eps={}", self.prop, key, self.variant, sgn(self.eps)),
            PropId::P4_2 => format!("{} {} v{}", self.prop, key, self.variant),
            PropId::P4_3 => format!(
                "{} {} eps1={} eps2={}",
                self.prop,
                key,
                sgn(self.eps),
                sgn(self.eps2)
            ),
            PropId::P4_4 | PropId::P4_7 => format!("{} {} eps={}", self.prop, key, sgn(self.eps)),
            PropId::P4_6 => format!("{} {} branch={}", self.prop, key, self.branch.name()),
            PropId::P4_5 | PropId::P4_8 => format!("{} {}", self.prop, key),
        }
    }

    /// The catalogue key of the Lax matrices.
    pub fn key(&self) -> Result<LaxKey, LaxError> {
        LaxKey::new(self.prop.entry(), self.deltas.clone())
    }

    /// Checks that the rule is one of the displayed cases.
    pub fn validate(&self) -> Result<(), LaxError> {
        let mismatch = |detail: String| LaxError::RegimeMismatch {
            prop: self.prop.name().into(),
            detail,
        };
        if !self.prop.regimes().contains(&self.deltas) {
            let d = &self.deltas;
            return Err(mismatch(format!("regime ({},{},{})", d.d1, d.d2, d.d3)));
        }
        let two_variants = matches!(self.prop, PropId::P4_1 | PropId::P4_2);
        if !(self.variant == 1 || (two_variants && self.variant == 2)) {
            return Err(mismatch(format!("variant {}", self.variant)));
        }
        if self.eps.abs() != 1 || self.eps2.abs() != 1 {
            return Err(mismatch("signs must be ±1".into()));
        }
        Ok(())
    }

    /// The surd kind the rule needs for the shared corner `z_n`, if any.
    pub fn surd_kind(&self) -> Option<SurdKind> {
        match self.prop {
            PropId::P4_6 if !self.deltas.d3.is_zero() => Some(SurdKind::Hyperbolic),
            PropId::P4_7 if !self.deltas.d3.is_zero() => Some(SurdKind::Square),
            _ => None,
        }
    }
}

fn sgn(e: i8) -> Scalar {
    s(e as i64)
}

fn surd_for<'a>(
    rule: &NormalizationRule,
    surd: Option<&'a SurdParam>,
    corner: &Scalar,
) -> Result<&'a SurdParam, LaxError> {
    let kind = rule.surd_kind().expect("caller checked the rule needs a surd");
    match surd {
        Some(p) if p.kind == kind && &p.value == corner => Ok(p),
        _ => Err(LaxError::MissingSurd(rule.label())),
    }
}

/// The displayed normalisation factor `D_L` of one Lax matrix with arguments
/// `(x; x1, x2; α, β)` (`x2 = x_b` for approach A, `x_c` for approach B).
///
/// Surd-bearing rules need `surd` to parametrise `x2`.
pub fn normalization(
    rule: &NormalizationRule,
    x: &Scalar,
    x1: &Scalar,
    x2: &Scalar,
    alpha: &ParamPair,
    beta: &ParamPair,
    surd: Option<&SurdParam>,
) -> Result<Scalar, LaxError> {
    rule.validate()?;
    let (a1, a2, b1, b2) = (&alpha.first, &alpha.second, &beta.first, &beta.second);
    let (xa, xb) = (x1, x2);
    let d = &rule.deltas;
    let eps = sgn(rule.eps);
    let den = match rule.prop {
        PropId::P4_1 => {
            let pre = (a1 - &eps * b1) * (a1 + &eps * b2);
            if rule.variant == 1 {
                pre * (a2 * x - b1 * xa) * (b2 * x - a2 * xb)
            } else {
                pre * (a2 * x - b2 * xb) * (b1 * x - a2 * xa)
            }
        }
        PropId::P4_2 => {
            if rule.variant == 1 {
                (b1 * x - a2 * xa) * (b2 * xb - a2 * x)
            } else {
                (b1 * xa - a2 * x) * (b2 * x - a2 * xb)
            }
        }
        PropId::P4_3 => {
            let th = Theta::new(alpha, beta);
            let e1 = &eps;
            let e2 = sgn(rule.eps2);
            (a1 + (e1 - 1) / s(2) * b1 - (e1 + 1) / s(2) * b2)
                * (xa - x - &e2 * &d.d1 * th.t(2, 3))
                * (xb - x + &e2 * &d.d1 * th.t(2, 4))
        }
        PropId::P4_4 => {
            let th = Theta::new(alpha, beta);
            (x - xa - &eps * &d.d1 * th.t(2, 3)) * (x - xb + &eps * &d.d1 * th.t(2, 4))
        }
        PropId::P4_5 => (x - xa) * (x - xb),
        PropId::P4_6 => {
            if d.d3.is_zero() {
                s(1)
            } else {
                let p = surd_for(rule, surd, x2)?;
                let bar = match rule.branch {
                    Branch::Plus => p.bar(),
                    Branch::Minus => p.bar_conjugate(),
                };
                // Exponent −2δ3 = −1 in the (½, 0, ½) regime.
                b1 * x - a1 * bar
            }
        }
        PropId::P4_7 => {
            if d.d3.is_zero() {
                s(1)
            } else {
                let p = surd_for(rule, surd, x2)?;
                x + b1 - a1 + &eps * &p.root
            }
        }
        PropId::P4_8 => x - xa,
    };
    dv(s(1), den, "normalisation denominator")
}

// ---------------------------------------------------------------------------
// Quadruples
// ---------------------------------------------------------------------------

/// Values on the cube vertices, parameters, and an optional surd
/// parametrising `z_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaxPoint {
    pub values: BTreeMap<Vertex, Scalar>,
    pub params: CubeParams,
    pub surd: Option<SurdParam>,
}

impl LaxPoint {
    pub fn get(&self, v: Vertex) -> Result<&Scalar, LaxError> {
        self.values.get(&v).ok_or(LaxError::MissingVertex(v))
    }
}

/// The four Lax matrices around the central face.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaxQuadruple {
    pub l: [Matrix2; 4],
    pub approach: Approach,
    pub central: FaceEquation,
    pub central_point: FacePoint,
    pub spectral: Scalar,
}

/// The central face of each approach: equation index, and the corner vertex
/// solved to put a point on shell.
pub fn central_of(approach: Approach) -> (u8, Vertex) {
    match approach {
        Approach::A => (2, Vertex::Xc),
        Approach::B => (3, Vertex::Xb),
    }
}

/// Solves the central equation for its on-shell corner and stores it.
pub fn put_on_shell(
    system: &EquationSystem,
    approach: Approach,
    point: &mut LaxPoint,
) -> Result<(), LaxError> {
    let (index, v) = central_of(approach);
    let val = system.solve_for(index, v, &point.values, &point.params)?;
    point.values.insert(v, val);
    Ok(())
}

/// Assembles the four Lax matrices of `system` at `point`.
///
/// Approach A uses the corner equations centred on `x_a, x_c, y_a, y_c`;
/// approach B those centred on `x_a, x_b, y_a, y_b`, inverting the latter
/// two.  With `norm`, each matrix is the displayed one (`κ · builder`) times
/// its normalisation factor; without, the raw builder output is used.
pub fn assemble_quadruple(
    system: &EquationSystem,
    approach: Approach,
    point: &LaxPoint,
    norm: Option<&NormalizationRule>,
) -> Result<LaxQuadruple, LaxError> {
    let corner_eq = &system.equation(7).equation;
    match norm {
        None => assemble_quadruple_with(system, approach, point, |_, _, _, _, _| Ok(s(1))),
        Some(rule) => {
            rule.validate()?;
            let key = rule.key()?;
            if key.equation != *corner_eq || rule.prop.approach() != approach {
                return Err(LaxError::RegimeMismatch {
                    prop: rule.prop.name().into(),
                    detail: format!("{} via approach {}", system.config, approach),
                });
            }
            assemble_quadruple_with(system, approach, point, |x, x1, x2, al, be| {
                let kappa = catalogue_scale(&key, al, be);
                Ok(kappa * normalization(rule, x, x1, x2, al, be, point.surd.as_ref())?)
            })
        }
    }
}

/// [`assemble_quadruple`] with an arbitrary scalar factor applied to each
/// builder output; `factor` receives the matrix arguments `(x, x1, x2, α, β)`.
pub fn assemble_quadruple_with<F>(
    system: &EquationSystem,
    approach: Approach,
    point: &LaxPoint,
    factor: F,
) -> Result<LaxQuadruple, LaxError>
where
    F: Fn(&Scalar, &Scalar, &Scalar, &ParamPair, &ParamPair) -> Result<Scalar, LaxError>,
{
    let corner_eq = system.equation(7).equation.clone();
    if approach == Approach::B && corner_eq.eq_type() != EqType::C {
        return Err(LaxError::NotTypeC(corner_eq.id()));
    }
    let p = &point.params;
    let (a1, a2) = (&p.alpha.first, &p.alpha.second);
    let (b1, b2) = (&p.beta.first, &p.beta.second);
    let (g1, g2) = (&p.gamma.first, &p.gamma.second);
    let pp = |u: &Scalar, v: &Scalar| ParamPair::new(u.clone(), v.clone());
    let v = |w: Vertex| point.get(w);
    let lax = |x: &Scalar, x1: &Scalar, x2: &Scalar, al: ParamPair, be: ParamPair| -> Result<Matrix2, LaxError> {
        let raw = match approach {
            Approach::A => build_lax_a(&corner_eq, x, x1, x2, &al, &be)?,
            Approach::B => build_lax_b(&corner_eq, x, x1, x2, &al, &be)?,
        };
        Ok(raw.scale(&factor(x, x1, x2, &al, &be)?))
    };
    use Vertex::*;
    let (l, central_index, spectral) = match approach {
        Approach::A => {
            let l1 = lax(v(Xa)?, v(Zw)?, v(Ya)?, pp(b1, g2), pp(a2, g1))?;
            let l2 = lax(v(Xc)?, v(Zw)?, v(Yc)?, pp(b1, g2), pp(a1, g1))?;
            let l3 = lax(v(Ya)?, v(Xa)?, v(Zw)?, pp(b1, g1), pp(g2, a2))?;
            let l4 = lax(v(Yc)?, v(Xc)?, v(Zw)?, pp(b1, g1), pp(g2, a1))?;
            ([l1, l2, l3, l4], 2u8, b1.clone())
        }
        Approach::B => {
            let l1 = lax(v(Xb)?, v(Yb)?, v(Zn)?, pp(b2, g2), pp(g1, a2))?;
            let l2 = lax(v(Xa)?, v(Ya)?, v(Zn)?, pp(b1, g2), pp(g1, a2))?;
            let l3 = invert(&lax(v(Yb)?, v(Xb)?, v(Zn)?, pp(b2, g1), pp(g2, a2))?)?;
            let l4 = invert(&lax(v(Ya)?, v(Xa)?, v(Zn)?, pp(b1, g1), pp(g2, a2))?)?;
            ([l1, l2, l3, l4], 3u8, a2.clone())
        }
    };
    let central_point = system
        .face_point(central_index, &point.values, p)
        .ok_or(LaxError::MissingVertex(Vertex::Zn))?;
    Ok(LaxQuadruple {
        l,
        approach,
        central: system.equation(central_index).equation.clone(),
        central_point,
        spectral,
    })
}

/// `L4·L2 − L3·L1`.
pub fn residual(q: &LaxQuadruple) -> Matrix2 {
    let [l1, l2, l3, l4] = &q.l;
    &(l4 * l2) - &(l3 * l1)
}

/// Assembles the normalised quadruple of `rule` at `point` and returns its
/// residual.
pub fn rule_residual(rule: &NormalizationRule, point: &LaxPoint) -> Result<Matrix2, LaxError> {
    let system = assemble_system(&rule.prop.system(&rule.deltas)?)?;
    let q = assemble_quadruple(&system, rule.prop.approach(), point, Some(rule))?;
    Ok(residual(&q))
}

/// The closed-form right-hand side displayed in each proposition's proof,
/// evaluated at `point`.  It is proportional to the value of the central
/// equation; see [`PropId::proof_sign`] for its relation to [`residual`].
pub fn proof_residual(rule: &NormalizationRule, point: &LaxPoint) -> Result<Matrix2, LaxError> {
    rule.validate()?;
    let p = &point.params;
    let (a1, a2) = (&p.alpha.first, &p.alpha.second);
    let (b1, b2) = (&p.beta.first, &p.beta.second);
    let (g1, g2) = (&p.gamma.first, &p.gamma.second);
    use Vertex::*;
    let (xa, xb, xc) = (point.get(Xa)?, point.get(Xb)?, point.get(Xc)?);
    let (ya, yb, yc) = (point.get(Ya)?, point.get(Yb)?, point.get(Yc)?);
    let (zw, zn) = (point.get(Zw)?, point.get(Zn)?);
    let d = &rule.deltas;
    let (d1, d3) = (&d.d1, &d.d3);
    let eps = sgn(rule.eps);
    let system = assemble_system(&rule.prop.system(d)?)?;
    let (ci, _) = central_of(rule.prop.approach());
    let cp = system
        .face_point(ci, &point.values, p)
        .ok_or(LaxError::MissingVertex(Zn))?;
    let central = evaluate(&system.equation(ci).equation, &cp)?;
    let half = Scalar::half();

    let out = match rule.prop {
        PropId::P4_1 => {
            let pre = dv(
                s(16) * a1 * a2 * g1 * g2 * &central,
                (b1 + &eps * g1) * (b1 - &eps * g2),
                "prefactor",
            )?;
            if rule.variant == 1 {
                let mm = m(-(g1 * g2 * zw), b1 * g1 * sq(zw), -(b1 * g2), sq(b1) * zw);
                let den = (a1 * zw - g2 * xc) * (a2 * zw - g2 * xa) * (g1 * zw - a2 * ya) * (g1 * zw - a1 * yc);
                mm.scale(&dv(pre, den, "proof denominator")?)
            } else {
                let mm = m(-(sq(b1) * zw), b1 * g2 * sq(zw), -(b1 * g1), g1 * g2 * zw);
                let den = (a1 * zw - g1 * yc) * (a2 * zw - g1 * ya) * (g2 * zw - a2 * xa) * (g2 * zw - a1 * xc);
                mm.scale(&dv(pre, den, "proof denominator")?)
            }
        }
        PropId::P4_2 => {
            let pre = a1 * a2 * g1 * g2 * &central;
            if rule.variant == 1 {
                let e12 = dv(d1 * b1, g2.clone(), "γ2")? + dv(d3 * g2 * sq(zw), b1.clone(), "β1")?;
                let mm = m(-zw.clone(), e12, s(0), s(0));
                let den = (a1 * zw - g1 * yc) * (a2 * zw - g1 * ya) * (g2 * zw - a2 * xa) * (g2 * zw - a1 * xc);
                mm.scale(&dv(pre, den, "proof denominator")?)
            } else {
                let e12 = dv(d1 * b1, g1.clone(), "γ1")? + dv(d3 * g1 * sq(zw), b1.clone(), "β1")?;
                let mm = m(s(0), e12, s(0), zw.clone());
                let den = (a1 * zw - g2 * xc) * (a2 * zw - g2 * xa) * (g1 * zw - a2 * ya) * (g1 * zw - a1 * yc);
                mm.scale(&dv(pre, den, "proof denominator")?)
            }
        }
        PropId::P4_3 => {
            let e1 = &eps;
            let e2 = sgn(rule.eps2);
            let u0 = d1 * &e2 * (g1 - b1) + zw;
            let v1 = d1 * &e2 * (g2 - b1) - zw;
            let uv = Matrix2::outer([&u0, &s(1)], [&s(1), &v1]);
            let den = (b1 - (e1 + 1) * &half * g1 + (e1 - 1) * &half * g2)
                * (zw - xa + d1 * &e2 * (a2 - g2))
                * (zw - xc + d1 * &e2 * (a1 - g2))
                * (zw - ya + d1 * &e2 * (g1 - a2))
                * (zw - yc + d1 * &e2 * (g1 - a1));
            uv.scale(&dv(-central, den, "proof denominator")?)
        }
        PropId::P4_4 => {
            let base = (b1 + (&eps - 1) * &half * g1 - (&eps + 1) * &half * g2) * d1 - zw;
            let e12 = powi(&base, 1 + bit(d3));
            let mm = m(-(d1 * (&eps + 1) * &half), e12, s(0), d1 * (s(1) - &eps) * &half);
            let den = (zw - xa + (g2 - a2) * d1 * &eps)
                * (zw - xc + (g2 - a1) * d1 * &eps)
                * (zw - ya + (a2 - g1) * d1 * &eps)
                * (zw - yc + (a1 - g1) * d1 * &eps);
            mm.scale(&dv(s(2) * central, den, "proof denominator")?)
        }
        PropId::P4_5 => {
            let den = (zw - xa) * (zw - xc) * (zw - ya) * (zw - yc);
            m(s(0), s(1), s(0), s(0)).scale(&dv(s(-2) * central, den, "proof denominator")?)
        }
        PropId::P4_6 => {
            if d3.is_zero() {
                let u0 = g2 * zn;
                let v1 = a2 * zn;
                let uv = Matrix2::outer([&u0, a2], [&-g1.clone(), &v1]);
                let t1 = ya - dv(d1 * b1, g2 * zn, "γ2 z_n")?;
                let t2 = yb - dv(d1 * b2, g2 * zn, "γ2 z_n")?;
                let den = zn * (sq(a2) - sq(g1)) * t1 * t2;
                uv.scale(&dv(central, den, "proof denominator")?)
            } else {
                let sp = surd_for(rule, point.surd.as_ref(), zn)?;
                let zb = match rule.branch {
                    Branch::Plus => sp.bar(),
                    Branch::Minus => sp.bar_conjugate(),
                };
                let (a22, g12, g22) = (sq(a2), sq(g1), sq(g2));
                let b12 = b1 * b2;
                let yy = ya * yb * &g22 - &b12;
                let lin = g2 * (b2 * ya + b1 * yb) - s(2) * &b12 * zn;
                let e11 = dv(s(2) * g1, a2.clone(), "α2")?
                    * ((&zb * (&a22 - &g22) - s(2) * &a22 * zn) * &yy + &lin * (&g22 * sq(&zb) + &a22));
                let e12 = (&a22 + dv(&g12 * &g22, a22.clone(), "α2")?) * (g2 * ya - b1 * &zb) * (g2 * yb - b2 * &zb)
                    + &g12 * ((b1 - s(2) * g2 * ya * zn) * (b2 - s(2) * g2 * yb * zn) - s(2) * ya * yb * &g22)
                    + g2 * &zb
                        * ((&g12 - &g22 * sq(&zb)) * (b2 * ya + b1 * yb)
                            + g2 * (&g22 - &g12) * ya * yb * &zb
                            + &b12 * g2 * powi(&zb, 3));
                let e21 = s(4) * g1 * g2 * (&b12 + g2 * ya * (b2 * &zb - g2 * yb) + b1 * &zb * (g2 * yb - s(2) * b2 * zn));
                let e22 = dv(s(2) * g2, a2.clone(), "α2")?
                    * ((&zb * (&a22 - &g12) + s(2) * &g12 * zn) * &yy - &lin * (&a22 * sq(&zb) + &g12));
                let den = (&a22 - &g12)
                    * (g1 * xa - b1 * &zb)
                    * (g1 * xb - b2 * &zb)
                    * (sq(b1) + &g22 * sq(ya) - s(2) * b1 * g2 * ya * zn)
                    * (sq(b2) + &g22 * sq(yb) - s(2) * b2 * g2 * yb * zn);
                m(e11, e12, e21, e22).scale(&dv(&b12 * a2 * g2 * zn * central, den, "proof denominator")?)
            }
        }
        PropId::P4_7 => {
            let k = 1 + bit(d3);
            let (w, den2) = if d3.is_zero() {
                (zn.clone(), s(2) * (a2 - g1))
            } else {
                let sp = surd_for(rule, point.surd.as_ref(), zn)?;
                let zb = -(&eps * &sp.root);
                let den2 = s(2) * (a2 - g1) * (xa + g1 - b1 - &zb) * (xb + g1 - b2 - &zb);
                (zb, den2)
            };
            let u0 = powi(&(g2 - a2 + &w), k);
            let v1 = -powi(&(a2 - g1 + &w), k);
            let uv = Matrix2::outer([&u0, &s(1)], [&s(1), &v1]);
            let den = (ya + d1 * (g2 - b1 + &w)) * (yb + d1 * (g2 - b2 + &w)) * den2;
            uv.scale(&dv(central, den, "proof denominator")?)
        }
        PropId::P4_8 => {
            let e12 = dv(s(8) * sq(&(g1 - g2)), (xa - ya) * (xb - yb), "proof denominator")? - sq(zn);
            let mm = m(-zn.clone(), e12, s(1), zn.clone());
            mm.scale(&dv(central, s(2) * (g1 - a2), "γ1 − α2")?)
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::ratio(p, d).unwrap()
    }

    fn pp(a: i64, b: i64) -> ParamPair {
        ParamPair::new(s(a), s(b))
    }

    #[test]
    fn invert_examples() {
        assert_eq!(invert(&Matrix2::identity()).unwrap(), Matrix2::identity());
        let a = Matrix2::new(s(1), s(2), s(3), s(4));
        assert_eq!(
            invert(&a).unwrap(),
            Matrix2::new(s(-2), s(1), q(3, 2), q(-1, 2))
        );
        let sing = Matrix2::new(s(1), s(2), s(2), s(4));
        assert_eq!(invert(&sing), Err(LaxError::SingularMatrix));
    }

    #[test]
    fn matrix_json_is_nested_strings() {
        let a = Matrix2::new(q(1, 2), s(2), s(-3), s(0));
        let js = serde_json::to_string(&a).unwrap();
        assert_eq!(js, r#"[["1/2","2"],["-3","0"]]"#);
        let back: Matrix2 = serde_json::from_str(&js).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn a3_leading_entry_and_scale() {
        let key: LaxKey = "A3:d=0".parse().unwrap();
        let (al, be) = (pp(2, 3), pp(5, 7));
        let (xa, xb) = (q(1, 3), q(-2, 5));
        let cat = coefficients_in_x(|x| catalogue_lax(&key, x, &xa, &xb, &al, &be)).unwrap();
        assert_eq!(cat[0].e11, s(1764));
        let bld = coefficients_in_x(|x| key.builder(x, &xa, &xb, &al, &be)).unwrap();
        assert_eq!(bld[0].e11, q(21, 10));
        assert_eq!(catalogue_scale(&key, &al, &be), s(840));
    }

    #[test]
    fn p41_normalisation_example() {
        let rule = NormalizationRule::new(PropId::P4_1);
        let d = normalization(&rule, &s(1), &s(2), &s(3), &pp(2, 3), &pp(5, 7), None).unwrap();
        let expect = s(1) / (s(2 - 5) * s(2 + 7) * s(3 - 10) * s(7 - 9));
        assert_eq!(d, expect);
    }

    #[test]
    fn p46_trivial_normalisation_and_p44_mismatch() {
        let rule = NormalizationRule::new(PropId::P4_6);
        let d = normalization(&rule, &s(1), &s(2), &s(3), &pp(2, 3), &pp(5, 7), None).unwrap();
        assert_eq!(d, s(1));
        let bad = NormalizationRule::new(PropId::P4_4)
            .with_deltas(Deltas::three(Scalar::half(), Scalar::half(), s(0)));
        assert!(matches!(
            normalization(&bad, &s(1), &s(2), &s(3), &pp(2, 3), &pp(5, 7), None),
            Err(LaxError::RegimeMismatch { .. })
        ));
    }

    #[test]
    fn builders_reject_wrong_types() {
        let b3 = FaceEquation::parse("B3:1,0,0").unwrap();
        assert!(matches!(
            build_lax_a(&b3, &s(1), &s(2), &s(3), &pp(1, 2), &pp(3, 4)),
            Err(LaxError::TypeBNotAllowed(_))
        ));
        let a3 = FaceEquation::parse("A3:d=0").unwrap();
        assert!(matches!(
            build_lax_b(&a3, &s(1), &s(2), &s(3), &pp(1, 2), &pp(3, 4)),
            Err(LaxError::NotTypeC(_))
        ));
    }

    #[test]
    fn rule_enumeration() {
        let all = NormalizationRule::all();
        assert_eq!(all.len(), 38);
        let labels: std::collections::BTreeSet<_> = all.iter().map(|r| r.label()).collect();
        assert_eq!(labels.len(), all.len());
        for r in &all {
            r.validate().unwrap();
        }
    }

    #[test]
    fn approach_b_on_type_a_system_fails() {
        let system = assemble_system(&"A3:d=0".parse().unwrap()).unwrap();
        let point = LaxPoint {
            values: Vertex::ALL.iter().map(|v| (*v, s(1))).collect(),
            params: CubeParams {
                alpha: pp(1, 2),
                beta: pp(3, 4),
                gamma: pp(5, 6),
            },
            surd: None,
        };
        assert!(matches!(
            assemble_quadruple(&system, Approach::B, &point, None),
            Err(LaxError::NotTypeC(_))
        ));
    }

    fn small(rng: &mut rand_chacha::ChaCha8Rng) -> Scalar {
        use rand::Rng;
        loop {
            let v = q(rng.random_range(-9..=9), rng.random_range(1..=4));
            if !v.is_zero() {
                return v;
            }
        }
    }

    fn sample(rule: &NormalizationRule, seed: u64, on_shell: bool) -> Option<LaxPoint> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let params = CubeParams {
            alpha: ParamPair::new(small(&mut rng), small(&mut rng)),
            beta: ParamPair::new(small(&mut rng), small(&mut rng)),
            gamma: ParamPair::new(small(&mut rng), small(&mut rng)),
        };
        let mut values: BTreeMap<Vertex, Scalar> =
            Vertex::ALL.iter().map(|v| (*v, small(&mut rng))).collect();
        let surd = match rule.surd_kind() {
            Some(kind) => {
                let sp = crate::exactnum::make_surd(kind, small(&mut rng)).ok()?;
                values.insert(Vertex::Zn, sp.value.clone());
                Some(sp)
            }
            None => None,
        };
        let mut point = LaxPoint { values, params, surd };
        if on_shell {
            let system = assemble_system(&rule.prop.system(&rule.deltas).ok()?).ok()?;
            put_on_shell(&system, rule.prop.approach(), &mut point).ok()?;
        }
        Some(point)
    }

    #[test]
    fn every_rule_vanishes_on_shell_and_matches_proof_off_shell() {
        for rule in NormalizationRule::all() {
            let mut checked = 0;
            for seed in 0..40u64 {
                if checked == 3 {
                    break;
                }
                let Some(on) = sample(&rule, seed, true) else { continue };
                let Some(off) = sample(&rule, seed, false) else { continue };
                let (Ok(r_on), Ok(r_off), Ok(pr)) = (
                    rule_residual(&rule, &on),
                    rule_residual(&rule, &off),
                    proof_residual(&rule, &off),
                ) else {
                    continue;
                };
                assert!(r_on.is_zero(), "{}: on-shell residual {}", rule.label(), r_on);
                let sign = s(rule.prop.proof_sign());
                assert_eq!(r_off, pr.scale(&sign), "{}: off-shell", rule.label());
                checked += 1;
            }
            assert_eq!(checked, 3, "{}: too many degenerate samples", rule.label());
        }
    }

    #[test]
    fn catalogue_equals_scaled_builder() {
        let (al, be) = (pp(2, 3), pp(5, 7));
        let (x, x1, x2) = (q(1, 3), q(-2, 5), q(7, 4));
        for key in LaxKey::all() {
            let bld = key.builder(&x, &x1, &x2, &al, &be).unwrap();
            let cat = catalogue_lax(&key, &x, &x1, &x2, &al, &be).unwrap();
            let kappa = catalogue_scale(&key, &al, &be);
            assert_eq!(cat, bld.scale(&kappa), "{}", key.id());
            if key.has_det() {
                let det = catalogue_det(&key, &x, &x1, &x2, &al, &be).unwrap();
                assert_eq!(det, cat.det(), "det {}", key.id());
            }
        }
    }
}
