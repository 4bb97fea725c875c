//! The face-centered cube: fourteen centered equations and the six-step
//! consistency check.
//!
//! Six equations are centred on the face vertices `x, y, z_n, z_s, z_e, z_w`
//! and eight on the corner vertices.  [`run_cafcc`] starts from six initial
//! values, solves for the remaining eight vertices along two independent
//! routes wherever the system is overdetermined, and compares the results
//! exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalogue::{
    evaluate, make_equation, CatalogueError, Deltas, EqType, FaceEquation, FacePoint, Family,
    ParamPair, Slot,
};
use crate::exactnum::{s, Scalar};

/// Errors raised while assembling or running a CAFCC system.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CubeError {
    #[error("configuration {0} is not one of the admissible CAFCC systems")]
    InadmissibleConfig(String),
    #[error("the linear coefficient of slot {slot:?} vanishes")]
    DegenerateSlot { slot: Slot },
    #[error("degenerate solve in step {step} (equation {index})")]
    DegenerateSolve { step: u8, index: u8 },
    #[error("vertex {0} does not occur as a corner of equation {1}")]
    NotACorner(Vertex, u8),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("bad fault specification {0:?}")]
    BadFault(String),
    #[error(transparent)]
    Catalogue(#[from] CatalogueError),
}

/// The fourteen vertices of the face-centered cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vertex {
    X,
    Xa,
    Xb,
    Xc,
    Xd,
    Y,
    Ya,
    Yb,
    Yc,
    Yd,
    Zn,
    Zs,
    Ze,
    Zw,
}

impl Vertex {
    pub const ALL: [Vertex; 14] = [
        Vertex::X,
        Vertex::Xa,
        Vertex::Xb,
        Vertex::Xc,
        Vertex::Xd,
        Vertex::Y,
        Vertex::Ya,
        Vertex::Yb,
        Vertex::Yc,
        Vertex::Yd,
        Vertex::Zn,
        Vertex::Zs,
        Vertex::Ze,
        Vertex::Zw,
    ];

    /// Whether the vertex sits at the centre of a cube face.
    pub fn is_face(self) -> bool {
        matches!(
            self,
            Vertex::X | Vertex::Y | Vertex::Zn | Vertex::Zs | Vertex::Ze | Vertex::Zw
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Vertex::X => "x",
            Vertex::Xa => "xa",
            Vertex::Xb => "xb",
            Vertex::Xc => "xc",
            Vertex::Xd => "xd",
            Vertex::Y => "y",
            Vertex::Ya => "ya",
            Vertex::Yb => "yb",
            Vertex::Yc => "yc",
            Vertex::Yd => "yd",
            Vertex::Zn => "zn",
            Vertex::Zs => "zs",
            Vertex::Ze => "ze",
            Vertex::Zw => "zw",
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Vertex {
    type Err = CubeError;

    fn from_str(st: &str) -> Result<Self, Self::Err> {
        Vertex::ALL
            .into_iter()
            .find(|v| v.name() == st.trim())
            .ok_or_else(|| CubeError::UnknownVertex(st.to_string()))
    }
}

/// A single lattice-parameter component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Param {
    A1,
    A2,
    B1,
    B2,
    G1,
    G2,
}

/// The three parameter pairs `α, β, γ` of a cube.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeParams {
    pub alpha: ParamPair,
    pub beta: ParamPair,
    pub gamma: ParamPair,
}

impl CubeParams {
    pub fn get(&self, p: Param) -> &Scalar {
        match p {
            Param::A1 => &self.alpha.first,
            Param::A2 => &self.alpha.second,
            Param::B1 => &self.beta.first,
            Param::B2 => &self.beta.second,
            Param::G1 => &self.gamma.first,
            Param::G2 => &self.gamma.second,
        }
    }

    pub fn pair(&self, p: (Param, Param)) -> ParamPair {
        ParamPair::new(self.get(p.0).clone(), self.get(p.1).clone())
    }

    pub fn all(&self) -> [&Scalar; 6] {
        [
            &self.alpha.first,
            &self.alpha.second,
            &self.beta.first,
            &self.beta.second,
            &self.gamma.first,
            &self.gamma.second,
        ]
    }
}

/// One of the fourteen equations: its centre, corner arguments in slot order
/// `(a, b, c, d)` and parameter assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenteredEquation {
    pub index: u8,
    pub center: Vertex,
    pub corners: [Vertex; 4],
    pub alpha: (Param, Param),
    pub beta: (Param, Param),
    pub equation: FaceEquation,
}

impl CenteredEquation {
    /// The slot in which `v` occurs, if it is a corner of this equation.
    pub fn slot_of(&self, v: Vertex) -> Option<Slot> {
        self.corners
            .iter()
            .position(|&c| c == v)
            .map(|i| Slot::ALL[i])
    }
}

/// Centre, corners `(a, b, c, d)`, α-assignment and β-assignment of one
/// centered equation.
type LayoutRow = (Vertex, [Vertex; 4], (Param, Param), (Param, Param));

/// The vertex/parameter layout of the fourteen equations.
fn layout() -> [LayoutRow; 14] {
    use Param::*;
    use Vertex::*;
    let al = (A1, A2);
    let be = (B1, B2);
    let ga = (G1, G2);
    [
        (X, [Xa, Xb, Xc, Xd], al, be),
        (Zw, [Ya, Xa, Yc, Xc], al, ga),
        (Zn, [Ya, Yb, Xa, Xb], ga, be),
        (Y, [Ya, Yb, Yc, Yd], al, be),
        (Ze, [Yb, Xb, Yd, Xd], al, ga),
        (Zs, [Yc, Yd, Xc, Xd], ga, be),
        (Xa, [Zw, Ya, X, Zn], (B1, G2), (A2, G1)),
        (Xb, [Ze, Yb, X, Zn], (B2, G2), (A2, G1)),
        (Xc, [Zw, Yc, X, Zs], (B1, G2), (A1, G1)),
        (Xd, [Ze, Yd, X, Zs], (B2, G2), (A1, G1)),
        (Ya, [Zw, Xa, Y, Zn], (B1, G1), (A2, G2)),
        (Yb, [Ze, Xb, Y, Zn], (B2, G1), (A2, G2)),
        (Yc, [Zw, Xc, Y, Zs], (B1, G1), (A1, G2)),
        (Yd, [Ze, Xd, Y, Zs], (B2, G1), (A1, G2)),
    ]
}

/// A CAFCC configuration: one equation everywhere, or a type-A/B/C triple.
#[allow(clippy::large_enum_variant)] // configurations are few and short-lived
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SystemConfig {
    TypeA(FaceEquation),
    Abc {
        a: FaceEquation,
        b: FaceEquation,
        c: FaceEquation,
    },
}

impl SystemConfig {
    /// The fourteen admissible systems.
    pub fn admissible() -> Vec<SystemConfig> {
        let eq = |st: &str| FaceEquation::parse(st).expect("catalogue identifier");
        let mut out = vec![
            SystemConfig::TypeA(eq("A3:d=0")),
            SystemConfig::TypeA(eq("A3:d=1")),
            SystemConfig::TypeA(eq("A2:0,0")),
            SystemConfig::TypeA(eq("A2:1,0")),
            SystemConfig::TypeA(eq("A2:1,1")),
        ];
        for d in Family::B3.regimes() {
            let a = make_equation(Family::A3, Deltas::one(&d.d2 * s(2))).expect("admissible");
            out.push(SystemConfig::Abc {
                a,
                b: make_equation(Family::B3, d.clone()).expect("admissible"),
                c: make_equation(Family::C3, d).expect("admissible"),
            });
        }
        for d in Family::B2.regimes() {
            let a = make_equation(Family::A2, Deltas::two(d.d1.clone(), d.d2.clone()))
                .expect("admissible");
            out.push(SystemConfig::Abc {
                a,
                b: make_equation(Family::B2, d.clone()).expect("admissible"),
                c: make_equation(Family::C2, d).expect("admissible"),
            });
        }
        out.push(SystemConfig::Abc {
            a: eq("A2:0,0"),
            b: eq("D1"),
            c: eq("C1"),
        });
        out
    }

    /// Canonical identifier such as `A3:d=0` or `ABC:A2,B2,C2:1,0,1`.
    pub fn id(&self) -> String {
        match self {
            SystemConfig::TypeA(e) => e.id(),
            SystemConfig::Abc { a, b, c } => {
                let fams = format!("ABC:{},{},{}", a.family(), b.family(), c.family());
                match c.id().split_once(':') {
                    Some((_, ds)) => format!("{fams}:{ds}"),
                    None => fams,
                }
            }
        }
    }

    /// The equation used at position `index` (1..=14).
    pub fn equation_for(&self, index: u8) -> &FaceEquation {
        match self {
            SystemConfig::TypeA(e) => e,
            SystemConfig::Abc { a, b, c } => match index {
                2 | 5 => a,
                1 | 3 | 4 | 6 => b,
                _ => c,
            },
        }
    }

    /// Every family occurring in the system.
    pub fn families(&self) -> Vec<Family> {
        match self {
            SystemConfig::TypeA(e) => vec![e.family()],
            SystemConfig::Abc { a, b, c } => vec![a.family(), b.family(), c.family()],
        }
    }

    /// Whether any equation divides by a parameter.
    pub fn multiplicative(&self) -> bool {
        self.families().iter().any(|f| f.multiplicative())
    }
}

impl fmt::Display for SystemConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for SystemConfig {
    type Err = CubeError;

    fn from_str(st: &str) -> Result<Self, Self::Err> {
        let st = st.trim();
        let bad = || CubeError::InadmissibleConfig(st.to_string());
        SystemConfig::admissible()
            .into_iter()
            .find(|c| c.id() == st)
            .ok_or_else(bad)
    }
}

/// A deliberate corruption of one equation, used for negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FaultKind {
    /// Exchange the components of the α-assignment.
    UnhatAlpha,
    /// Exchange the components of the β-assignment.
    UnhatBeta,
    /// Exchange the α- and β-assignments.
    SwapAlphaBeta,
    /// Add one to the polynomial.
    Offset,
}

impl FaultKind {
    pub const ALL: [FaultKind; 4] = [
        FaultKind::UnhatAlpha,
        FaultKind::UnhatBeta,
        FaultKind::SwapAlphaBeta,
        FaultKind::Offset,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FaultKind::UnhatAlpha => "unhat-alpha",
            FaultKind::UnhatBeta => "unhat-beta",
            FaultKind::SwapAlphaBeta => "swap-alpha-beta",
            FaultKind::Offset => "offset",
        }
    }
}

/// A fault applied to equation `index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fault {
    pub index: u8,
    pub kind: FaultKind,
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.index, self.kind.name())
    }
}

impl FromStr for Fault {
    type Err = CubeError;

    /// Parses `INDEX:KIND`, e.g. `14:unhat-beta`.
    fn from_str(st: &str) -> Result<Self, Self::Err> {
        let bad = || CubeError::BadFault(st.to_string());
        let (i, k) = st.split_once(':').ok_or_else(bad)?;
        let index: u8 = i.trim().parse().map_err(|_| bad())?;
        if !(1..=14).contains(&index) {
            return Err(bad());
        }
        let kind = FaultKind::ALL
            .into_iter()
            .find(|f| f.name() == k.trim())
            .ok_or_else(bad)?;
        Ok(Fault { index, kind })
    }
}

/// The fourteen centered equations of a configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationSystem {
    pub config: SystemConfig,
    pub equations: Vec<CenteredEquation>,
    pub fault: Option<Fault>,
}

/// Builds the fourteen centered equations of an admissible configuration.
pub fn assemble_system(config: &SystemConfig) -> Result<EquationSystem, CubeError> {
    if !SystemConfig::admissible().contains(config) {
        return Err(CubeError::InadmissibleConfig(config.id()));
    }
    let equations = layout()
        .into_iter()
        .enumerate()
        .map(|(i, (center, corners, alpha, beta))| {
            let index = i as u8 + 1;
            CenteredEquation {
                index,
                center,
                corners,
                alpha,
                beta,
                equation: config.equation_for(index).clone(),
            }
        })
        .collect();
    Ok(EquationSystem {
        config: config.clone(),
        equations,
        fault: None,
    })
}

impl EquationSystem {
    /// The same system with `fault` injected.
    pub fn with_fault(mut self, fault: Fault) -> Self {
        self.fault = Some(fault);
        self
    }

    pub fn equation(&self, index: u8) -> &CenteredEquation {
        &self.equations[index as usize - 1]
    }

    fn fault_for(&self, index: u8) -> Option<FaultKind> {
        self.fault.filter(|f| f.index == index).map(|f| f.kind)
    }

    /// The face point of equation `index` under `values` and `params`, with
    /// any injected parameter fault applied.
    pub fn face_point(
        &self,
        index: u8,
        values: &BTreeMap<Vertex, Scalar>,
        params: &CubeParams,
    ) -> Option<FacePoint> {
        let ce = self.equation(index);
        let get = |v: Vertex| values.get(&v).cloned();
        let corners = [
            get(ce.corners[0])?,
            get(ce.corners[1])?,
            get(ce.corners[2])?,
            get(ce.corners[3])?,
        ];
        let (mut a, mut b) = (ce.alpha, ce.beta);
        match self.fault_for(index) {
            Some(FaultKind::UnhatAlpha) => a = (a.1, a.0),
            Some(FaultKind::UnhatBeta) => b = (b.1, b.0),
            Some(FaultKind::SwapAlphaBeta) => std::mem::swap(&mut a, &mut b),
            _ => {}
        }
        Some(FacePoint::new(get(ce.center)?, corners, params.pair(a), params.pair(b)))
    }

    /// Value of equation `index`, including an injected offset fault.
    pub fn evaluate_at(&self, index: u8, p: &FacePoint) -> Result<Scalar, CatalogueError> {
        let v = evaluate(&self.equation(index).equation, p)?;
        Ok(match self.fault_for(index) {
            Some(FaultKind::Offset) => v + s(1),
            _ => v,
        })
    }

    /// Solves equation `index` for the corner vertex `unknown`.
    pub fn solve_for(
        &self,
        index: u8,
        unknown: Vertex,
        values: &BTreeMap<Vertex, Scalar>,
        params: &CubeParams,
    ) -> Result<Scalar, CubeError> {
        let ce = self.equation(index);
        let slot = ce
            .slot_of(unknown)
            .ok_or(CubeError::NotACorner(unknown, index))?;
        let mut vals = values.clone();
        vals.insert(unknown, s(0));
        let p = self
            .face_point(index, &vals, params)
            .ok_or(CubeError::UnknownVertex(unknown.to_string()))?;
        solve_affine(slot, &p, |q| self.evaluate_at(index, q))
    }
}

fn solve_affine(
    slot: Slot,
    p: &FacePoint,
    f: impl Fn(&FacePoint) -> Result<Scalar, CatalogueError>,
) -> Result<Scalar, CubeError> {
    let f0 = f(&p.with_corner(slot, s(0)))?;
    let f1 = f(&p.with_corner(slot, s(1)))?;
    let lin = &f1 - &f0;
    if lin.is_zero() {
        return Err(CubeError::DegenerateSlot { slot });
    }
    Ok(-f0 / lin)
}

/// Solves `eq = 0` for the corner in `slot`, the other corners of `p` fixed.
/// The value currently stored in that slot is ignored.
pub fn solve_corner(eq: &FaceEquation, slot: Slot, p: &FacePoint) -> Result<Scalar, CubeError> {
    solve_affine(slot, p, |q| evaluate(eq, q))
}

/// The six initial values of a CAFCC run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CafccInit {
    pub x: Scalar,
    pub xa: Scalar,
    pub xb: Scalar,
    pub xc: Scalar,
    pub zn: Scalar,
    pub zw: Scalar,
}

/// The outcome of one six-step run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CafccReport {
    pub config: String,
    pub seed: u64,
    pub fault: Option<String>,
    pub params: CubeParams,
    pub solved: BTreeMap<Vertex, Scalar>,
    pub step3_values: [Scalar; 2],
    pub step3_agree: bool,
    pub step4_values: [Scalar; 2],
    pub step4_agree: bool,
    pub step5_values: [Scalar; 4],
    pub step5_agree: bool,
    pub step6_residual: Scalar,
    pub pass: bool,
}

/// Runs the six-step consistency check from the given initial data.
///
/// Every unknown is solved in whichever corner slot it occupies, so the step
/// list is keyed on centre vertices: step 5 uses the `z_e`-, `y`-, `z_s`- and
/// `x_d`-centred equations.
pub fn run_cafcc(
    system: &EquationSystem,
    init: &CafccInit,
    params: &CubeParams,
    seed: u64,
) -> Result<CafccReport, CubeError> {
    use Vertex::*;
    let mut v: BTreeMap<Vertex, Scalar> = BTreeMap::new();
    v.insert(X, init.x.clone());
    v.insert(Xa, init.xa.clone());
    v.insert(Xb, init.xb.clone());
    v.insert(Xc, init.xc.clone());
    v.insert(Zn, init.zn.clone());
    v.insert(Zw, init.zw.clone());

    let solve = |step: u8, index: u8, unknown: Vertex, v: &BTreeMap<Vertex, Scalar>| {
        system
            .solve_for(index, unknown, v, params)
            .map_err(|_| CubeError::DegenerateSolve { step, index })
    };

    // Step 1.
    let ya = solve(1, 7, Ya, &v)?;
    v.insert(Ya, ya);
    let xd = solve(1, 1, Xd, &v)?;
    v.insert(Xd, xd);
    // Step 2.
    let yc = solve(2, 2, Yc, &v)?;
    v.insert(Yc, yc);
    let yb = solve(2, 3, Yb, &v)?;
    v.insert(Yb, yb);
    let y = solve(2, 11, Y, &v)?;
    v.insert(Y, y);
    // Step 3.
    let ze8 = solve(3, 8, Ze, &v)?;
    let ze12 = solve(3, 12, Ze, &v)?;
    v.insert(Ze, ze8.clone());
    // Step 4.
    let zs13 = solve(4, 13, Zs, &v)?;
    let zs9 = solve(4, 9, Zs, &v)?;
    v.insert(Zs, zs13.clone());
    // Step 5: the z_e-, y-, z_s- and x_d-centred equations.
    let mut yd = Vec::with_capacity(4);
    for index in [5u8, 4, 6, 10] {
        yd.push(solve(5, index, Yd, &v)?);
    }
    v.insert(Yd, yd[0].clone());
    // Step 6.
    let p14 = system
        .face_point(14, &v, params)
        .expect("every vertex is assigned after step 5");
    let r14 = system
        .evaluate_at(14, &p14)
        .map_err(|_| CubeError::DegenerateSolve { step: 6, index: 14 })?;

    let step3_agree = ze8 == ze12;
    let step4_agree = zs13 == zs9;
    let step5_agree = yd.iter().all(|w| *w == yd[0]);
    let pass = step3_agree && step4_agree && step5_agree && r14.is_zero();
    let yd: [Scalar; 4] = yd.try_into().expect("four values");
    Ok(CafccReport {
        config: system.config.id(),
        seed,
        fault: system.fault.map(|f| f.to_string()),
        params: params.clone(),
        solved: v,
        step3_values: [ze8, ze12],
        step3_agree,
        step4_values: [zs13, zs9],
        step4_agree,
        step5_values: yd,
        step5_agree,
        step6_residual: r14,
        pass,
    })
}

/// The configuration's equations indexed by type, for reporting.
pub fn type_of_index(index: u8) -> EqType {
    match index {
        2 | 5 => EqType::A,
        1 | 3 | 4 | 6 => EqType::B,
        _ => EqType::C,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::ratio(p, d).unwrap()
    }

    fn params() -> CubeParams {
        CubeParams {
            alpha: ParamPair::new(q(2, 3), q(-5, 7)),
            beta: ParamPair::new(q(3, 2), q(7, 4)),
            gamma: ParamPair::new(q(-4, 9), q(5, 3)),
        }
    }

    fn init() -> CafccInit {
        CafccInit {
            x: q(1, 3),
            xa: q(-2, 5),
            xb: q(7, 3),
            xc: q(5, 11),
            zn: q(3, 8),
            zw: q(-9, 4),
        }
    }

    #[test]
    fn fourteen_admissible_systems_with_unique_ids() {
        let all = SystemConfig::admissible();
        assert_eq!(all.len(), 14);
        for c in &all {
            assert_eq!(&c.id().parse::<SystemConfig>().unwrap(), c);
        }
        assert_eq!(all[11].id(), "ABC:A2,B2,C2:1,0,1");
        assert_eq!(all[13].id(), "ABC:A2,D1,C1");
    }

    #[test]
    fn abc_positions() {
        let cfg: SystemConfig = "ABC:A3,B3,C3:1/2,0,1/2".parse().unwrap();
        let sys = assemble_system(&cfg).unwrap();
        for ce in &sys.equations {
            let expect = match ce.index {
                2 | 5 => "A3:d=0",
                1 | 3 | 4 | 6 => "B3:1/2,0,1/2",
                _ => "C3:1/2,0,1/2",
            };
            assert_eq!(ce.equation.id(), expect);
        }
        let cfg: SystemConfig = "ABC:A3,B3,C3:1/2,1/2,0".parse().unwrap();
        assert_eq!(cfg.equation_for(2).id(), "A3:d=1");
    }

    #[test]
    fn mismatched_config_rejected() {
        let cfg = SystemConfig::Abc {
            a: FaceEquation::parse("A3:d=0").unwrap(),
            b: FaceEquation::parse("B3:0,0,0").unwrap(),
            c: FaceEquation::parse("C2:0,0,0").unwrap(),
        };
        assert!(matches!(assemble_system(&cfg), Err(CubeError::InadmissibleConfig(_))));
    }

    #[test]
    fn gamma_components_exchanged_across_corner_equations() {
        let cfg: SystemConfig = "A2:0,0".parse().unwrap();
        let sys = assemble_system(&cfg).unwrap();
        for ce in &sys.equations[6..] {
            assert!(ce.alpha.1 == Param::G1 || ce.alpha.1 == Param::G2);
            assert_ne!(ce.alpha.1, ce.beta.1);
        }
    }

    #[test]
    fn d1_solve_example() {
        let eq = FaceEquation::parse("D1").unwrap();
        let p = FacePoint::new(
            s(0),
            [s(1), s(2), s(3), s(0)],
            ParamPair::new(s(1), s(2)),
            ParamPair::new(s(3), s(4)),
        );
        assert_eq!(solve_corner(&eq, Slot::D, &p).unwrap(), s(4));
    }

    #[test]
    fn degenerate_slot_detected() {
        // With x_a = x_b = x_c = 0 the x_d coefficient of A3 (δ=0) reduces to
        // (α1/β2 − β2/α1)·x², which vanishes for α1 = β2.
        let eq = FaceEquation::parse("A3:d=0").unwrap();
        let p = FacePoint::new(
            s(1),
            [s(0), s(0), s(0), s(0)],
            ParamPair::new(s(1), s(2)),
            ParamPair::new(s(3), s(1)),
        );
        assert!(matches!(
            solve_corner(&eq, Slot::D, &p),
            Err(CubeError::DegenerateSlot { slot: Slot::D })
        ));
    }

    #[test]
    fn every_system_passes_at_a_fixed_point() {
        for cfg in SystemConfig::admissible() {
            let sys = assemble_system(&cfg).unwrap();
            let r = run_cafcc(&sys, &init(), &params(), 0).unwrap();
            assert!(r.pass, "{} failed: {:?}", cfg, r);
        }
    }

    #[test]
    fn unhatting_the_last_beta_breaks_consistency() {
        let cfg: SystemConfig = "A3:d=0".parse().unwrap();
        let sys = assemble_system(&cfg).unwrap().with_fault(Fault {
            index: 14,
            kind: FaultKind::UnhatBeta,
        });
        let r = run_cafcc(&sys, &init(), &params(), 0).unwrap();
        assert!(!r.pass);
        assert!(!r.step6_residual.is_zero());
    }

    #[test]
    fn fault_round_trip() {
        let f: Fault = "14:unhat-beta".parse().unwrap();
        assert_eq!(f.to_string(), "14:unhat-beta");
        assert!("15:offset".parse::<Fault>().is_err());
        assert!("3:bogus".parse::<Fault>().is_err());
    }
}
