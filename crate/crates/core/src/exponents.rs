//! Scaling exponents of the background potential.
//!
//! The well is taken of the form `phi_x = gamma L^{c2-c1-1} + L^{c2} q~(x L^{c1})`.
//! Delocalized test functions force `c2 >= c1 + 1`, localized ones force
//! `c2 <= 4 c1` (fourth order) or `c2 <= 2 c1` (second order), and the
//! absorbing-ball radius grows like `L^{c2 + c1/2}`. All exponent algebra is
//! exact.

use std::fmt;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::potential::CompactShape;
use crate::quadrature::GaussLegendre;

pub type Rational = Ratio<i64>;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn to_f64(r: Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExponentPair {
    c1: Rational,
    c2: Rational,
}

impl ExponentPair {
    pub fn new(c1: Rational, c2: Rational) -> Result<Self> {
        if c1 <= Rational::zero() || c2 <= Rational::zero() {
            return Err(Error::Parameter(format!("exponents must be positive, got ({c1}, {c2})")));
        }
        Ok(Self { c1, c2 })
    }

    /// `(1/3, 4/3)`.
    pub fn critical() -> Self {
        Self { c1: rat(1, 3), c2: rat(4, 3) }
    }

    pub fn c1(&self) -> Rational {
        self.c1
    }

    pub fn c2(&self) -> Rational {
        self.c2
    }

    pub fn c1_f64(&self) -> f64 {
        to_f64(self.c1)
    }

    pub fn c2_f64(&self) -> f64 {
        to_f64(self.c2)
    }

    /// Radius exponent `c2 + c1/2`.
    pub fn objective(&self) -> Rational {
        self.c2 + self.c1 / 2
    }

    /// Exponent of the constant (mean) term, `c2 - c1 - 1`.
    pub fn mean_exponent(&self) -> Rational {
        self.c2 - self.c1 - 1
    }

    pub fn is_feasible(&self, order: OperatorOrder) -> bool {
        self.c2 >= self.c1 + 1 && self.c2 <= order.kinetic_ratio() * self.c1
    }
}

impl fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.c1, self.c2)
    }
}

#[derive(Serialize, Deserialize)]
struct PairRepr {
    c1: String,
    c2: String,
}

impl Serialize for ExponentPair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PairRepr { c1: self.c1.to_string(), c2: self.c2.to_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExponentPair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = PairRepr::deserialize(d)?;
        let c1: Rational = r.c1.parse().map_err(D::Error::custom)?;
        let c2: Rational = r.c2.parse().map_err(D::Error::custom)?;
        ExponentPair::new(c1, c2).map_err(D::Error::custom)
    }
}

/// Order of the kinetic part: `K = ∂⁴ + ∂² + phi_x` or `K~ = -∂² - 1 + phi_x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorOrder {
    Fourth,
    Second,
}

impl OperatorOrder {
    /// `4` for the fourth-order form, `2` for the second-order one.
    pub fn kinetic_ratio(self) -> Rational {
        match self {
            OperatorOrder::Fourth => rat(4, 1),
            OperatorOrder::Second => rat(2, 1),
        }
    }
}

impl std::str::FromStr for OperatorOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fourth" | "4" => Ok(Self::Fourth),
            "second" | "2" => Ok(Self::Second),
            other => Err(Error::Parameter(format!("unknown operator order '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialClass {
    Weak,
    Critical,
    Strong,
}

/// Sign of `c2 - 4 c1`.
pub fn classify(pair: &ExponentPair) -> PotentialClass {
    classify_for(pair, OperatorOrder::Fourth)
}

/// Sign of `c2 - k c1` with `k` the kinetic ratio of `order`.
pub fn classify_for(pair: &ExponentPair, order: OperatorOrder) -> PotentialClass {
    let d = pair.c2 - order.kinetic_ratio() * pair.c1;
    if d < Rational::zero() {
        PotentialClass::Weak
    } else if d.is_zero() {
        PotentialClass::Critical
    } else {
        PotentialClass::Strong
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalExponents {
    pub order: OperatorOrder,
    pub pair: ExponentPair,
    #[serde(serialize_with = "serialize_rational")]
    pub objective: Rational,
}

fn serialize_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Half-plane `n1 c1 + n2 c2 >= rhs`.
#[derive(Debug, Clone, Copy)]
struct HalfPlane {
    n1: Rational,
    n2: Rational,
    rhs: Rational,
}

impl HalfPlane {
    fn contains(&self, c1: Rational, c2: Rational) -> bool {
        self.n1 * c1 + self.n2 * c2 >= self.rhs
    }
}

/// Minimize `c2 + c1/2` subject to `c2 >= c1 + 1` and `c2 <= k c1` by vertex enumeration.
pub fn solve_critical_exponents(order: OperatorOrder) -> CriticalExponents {
    let k = order.kinetic_ratio();
    let one = rat(1, 1);
    let zero = Rational::zero();
    let planes = [
        HalfPlane { n1: -one, n2: one, rhs: one },
        HalfPlane { n1: k, n2: -one, rhs: zero },
        HalfPlane { n1: one, n2: zero, rhs: zero },
        HalfPlane { n1: zero, n2: one, rhs: zero },
    ];
    let objective = |c1: Rational, c2: Rational| c2 + c1 / 2;

    // Recession directions of the wedge are (1, 1) and (1, k); the objective
    // grows along both, so the minimum is attained at a vertex.
    debug_assert!(objective(one, one) > zero && objective(one, k) > zero);

    let mut best: Option<(Rational, Rational, Rational)> = None;
    for i in 0..planes.len() {
        for j in (i + 1)..planes.len() {
            let (p, q) = (planes[i], planes[j]);
            let det = p.n1 * q.n2 - p.n2 * q.n1;
            if det.is_zero() {
                continue;
            }
            let c1 = (p.rhs * q.n2 - p.n2 * q.rhs) / det;
            let c2 = (p.n1 * q.rhs - p.rhs * q.n1) / det;
            if !planes.iter().all(|h| h.contains(c1, c2)) {
                continue;
            }
            let val = objective(c1, c2);
            if best.map_or(true, |b| val < b.2) {
                best = Some((c1, c2, val));
            }
        }
    }
    let (c1, c2, objective) = best.expect("feasible region is nonempty for k > 1");
    CriticalExponents {
        order,
        pair: ExponentPair { c1, c2 },
        objective,
    }
}

const QUAD_ORDER: usize = 16;
const QUAD_MAX_REFINE: u32 = 14;
const QUAD_RTOL: f64 = 1e-13;

/// Refine `eval(panels)` by doubling until successive values agree.
fn refine<F: Fn(usize) -> f64>(eval: F, start: usize, what: &str) -> Result<f64> {
    let mut panels = start.max(1);
    let mut prev = eval(panels);
    for _ in 0..QUAD_MAX_REFINE {
        panels *= 2;
        let next = eval(panels);
        if (next - prev).abs() <= QUAD_RTOL * (1.0 + next.abs()) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature(format!("{what}: no convergence at {panels} panels")))
}

/// Integrate `g` over `[0, w]` split at the shape's breakpoints.
fn integrate_on_shape<S: CompactShape + ?Sized, G: Fn(f64) -> f64>(
    shape: &S,
    limit: f64,
    g: G,
    panels: usize,
) -> f64 {
    let gl = GaussLegendre::new(QUAD_ORDER);
    let mut cuts: Vec<f64> = shape
        .breakpoints()
        .into_iter()
        .filter(|&b| b > 0.0 && b < limit)
        .collect();
    cuts.push(limit.min(shape.half_width()));
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();
    let mut lo = 0.0;
    let mut total = 0.0;
    for hi in cuts {
        if hi > lo {
            total += gl.integrate(&g, lo, hi, panels);
            lo = hi;
        }
    }
    total
}

/// `<u, K u>` for `u = L^{-1/2} sin(k pi x / L)` against
/// `phi_x = gamma L^{c2-c1-1} + L^{c2} q~(x L^{c1})`, by quadrature.
pub fn delocalized_test_value<S: CompactShape + ?Sized>(
    pair: &ExponentPair,
    gamma_prefactor: f64,
    l: f64,
    k: u32,
    shape: &S,
) -> Result<f64> {
    if !(l > 0.0) || k == 0 {
        return Err(Error::Parameter(format!("need L > 0 and k >= 1 (L = {l}, k = {k})")));
    }
    let kappa = k as f64 * std::f64::consts::PI / l;
    let norm = l.powf(-0.5);
    let constant = gamma_prefactor * l.powf(to_f64(pair.mean_exponent()));
    let gl = GaussLegendre::new(QUAD_ORDER);

    let periodic = refine(
        |panels| {
            gl.integrate(
                |x| {
                    let s = (kappa * x).sin();
                    let c = (kappa * x).cos();
                    let u = norm * s;
                    let ux = norm * kappa * c;
                    let uxx = -norm * kappa * kappa * s;
                    uxx * uxx - ux * ux + constant * u * u
                },
                -l,
                l,
                panels,
            )
        },
        4 * k as usize,
        "delocalized kinetic term",
    )?;

    // ∫ L^{c2} q~(x L^{c1}) u(x)² dx = L^{c2-c1} ∫ q~(y) u(y L^{-c1})² dy, y in [-L^{1+c1}, L^{1+c1}]
    let (c1, c2) = (pair.c1_f64(), pair.c2_f64());
    let limit = l.powf(1.0 + c1);
    let back = l.powf(-c1);
    let well = if shape.half_width() > 0.0 {
        let half = refine(
            |panels| {
                integrate_on_shape(
                    shape,
                    limit,
                    |y| {
                        let u = norm * (kappa * y * back).sin();
                        shape.value(y) * u * u
                    },
                    panels,
                )
            },
            8,
            "delocalized potential term",
        )?;
        2.0 * l.powf(c2 - c1) * half
    } else {
        0.0
    };
    Ok(periodic + well)
}

/// Breakdown of `<u, K u>` for a compactly supported bump `u(x) = b(x L^{c1})`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LocalizedTest {
    pub total: f64,
    /// `L^{c2-c1} ∫ q~ b²`, exponent `c2 - c1`.
    pub potential: f64,
    /// `L^{3c1} ∫ b''²`.
    pub bending: f64,
    /// `-L^{c1} ∫ b'²`.
    pub stretching: f64,
    /// `gamma L^{c2-c1-1} ||u||²`.
    pub mean: f64,
    pub potential_exponent: f64,
    pub bending_exponent: f64,
    pub stretching_exponent: f64,
    pub mean_exponent: f64,
}

/// Exponential bump `exp(-1/(1-t²))` on `(lo, hi)` and its first two derivatives.
#[derive(Debug, Clone, Copy)]
pub struct Bump {
    center: f64,
    half: f64,
}

impl Bump {
    pub fn on(lo: f64, hi: f64) -> Self {
        Self { center: 0.5 * (lo + hi), half: 0.5 * (hi - lo) }
    }

    /// `(b, b', b'')` at `y`.
    pub fn eval(&self, y: f64) -> (f64, f64, f64) {
        let t = (y - self.center) / self.half;
        if t.abs() >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let s = 1.0 - t * t;
        let b = (-1.0 / s).exp();
        let g1 = -2.0 * t / (s * s);
        let g2 = -(2.0 + 6.0 * t * t) / (s * s * s);
        (b, b * g1 / self.half, b * (g2 + g1 * g1) / (self.half * self.half))
    }
}

/// Evaluate the bump test on an explicit interval of the `y` axis.
pub fn bump_test_value<S: CompactShape + ?Sized>(
    pair: &ExponentPair,
    gamma_prefactor: f64,
    l: f64,
    shape: &S,
    interval: (f64, f64),
) -> Result<LocalizedTest> {
    let (lo, hi) = interval;
    if !(hi > lo) {
        return Err(Error::Precondition("empty bump interval".into()));
    }
    let bump = Bump::on(lo, hi);
    let gl = GaussLegendre::new(QUAD_ORDER);
    let integral = |g: &dyn Fn(f64) -> f64, what: &str| refine(|p| gl.integrate(g, lo, hi, p), 8, what);
    let i2 = integral(&|y| bump.eval(y).2.powi(2), "bump b''")?;
    let i1 = integral(&|y| bump.eval(y).1.powi(2), "bump b'")?;
    let i0 = integral(&|y| bump.eval(y).0.powi(2), "bump b")?;
    let iq = integral(&|y| shape.value(y) * bump.eval(y).0.powi(2), "bump potential")?;

    let (c1, c2) = (pair.c1_f64(), pair.c2_f64());
    let potential_exponent = c2 - c1;
    let bending_exponent = 3.0 * c1;
    let stretching_exponent = c1;
    let mean_exponent = to_f64(pair.mean_exponent());
    let potential = l.powf(potential_exponent) * iq;
    let bending = l.powf(bending_exponent) * i2;
    let stretching = -l.powf(stretching_exponent) * i1;
    let mean = gamma_prefactor * l.powf(mean_exponent) * l.powf(-c1) * i0;
    Ok(LocalizedTest {
        total: potential + bending + stretching + mean,
        potential,
        bending,
        stretching,
        mean,
        potential_exponent,
        bending_exponent,
        stretching_exponent,
        mean_exponent,
    })
}

/// Bump test with the bump placed on the middle half of the shape's negative region.
pub fn localized_test_value<S: CompactShape + ?Sized>(
    pair: &ExponentPair,
    gamma_prefactor: f64,
    l: f64,
    shape: &S,
) -> Result<LocalizedTest> {
    let (lo, hi) = shape
        .negative_region()
        .filter(|(lo, hi)| hi > lo)
        .ok_or_else(|| Error::Precondition("shape has no negative region".into()))?;
    let quarter = 0.25 * (hi - lo);
    bump_test_value(pair, gamma_prefactor, l, shape, (lo + quarter, hi - quarter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::ZeroShape;

    #[test]
    fn fourth_order_critical_pair() {
        let sol = solve_critical_exponents(OperatorOrder::Fourth);
        assert_eq!(sol.pair.c1(), rat(1, 3));
        assert_eq!(sol.pair.c2(), rat(4, 3));
        assert_eq!(sol.objective, rat(3, 2));
        // both constraints active
        assert_eq!(sol.pair.c2() - sol.pair.c1() - 1, Rational::zero());
        assert_eq!(sol.pair.c2() - sol.pair.c1() * 4, Rational::zero());
    }

    #[test]
    fn second_order_critical_pair() {
        let sol = solve_critical_exponents(OperatorOrder::Second);
        assert_eq!(sol.pair.c1(), rat(1, 1));
        assert_eq!(sol.pair.c2(), rat(2, 1));
        assert_eq!(sol.objective, rat(5, 2));
        assert_eq!(sol.pair.c2() - sol.pair.c1() * 2, Rational::zero());
    }

    #[test]
    fn classification() {
        let p = |a, b, c, d| ExponentPair::new(rat(a, b), rat(c, d)).unwrap();
        assert_eq!(classify(&p(1, 1, 2, 1)), PotentialClass::Weak);
        assert_eq!(classify(&p(2, 5, 7, 5)), PotentialClass::Weak);
        assert_eq!(classify(&p(1, 3, 4, 3)), PotentialClass::Critical);
        assert_eq!(classify(&p(1, 1, 5, 1)), PotentialClass::Strong);
        assert_eq!(classify(&solve_critical_exponents(OperatorOrder::Fourth).pair), PotentialClass::Critical);
        // the fourth-order critical pair is strong for the second-order form
        assert_eq!(classify_for(&ExponentPair::critical(), OperatorOrder::Second), PotentialClass::Strong);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(ExponentPair::new(rat(0, 1), rat(1, 1)).is_err());
        assert!(ExponentPair::new(rat(1, 1), rat(-1, 2)).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let p = ExponentPair::critical();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"c1":"1/3","c2":"4/3"}"#);
        let back: ExponentPair = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn delocalized_without_potential_matches_symbol() {
        let pair = ExponentPair::critical();
        // kappa = k pi / L; symbol kappa^4 - kappa^2
        for &(l, k) in &[(10.0, 2u32), (40.0, 9), (std::f64::consts::FRAC_PI_2, 1)] {
            let v = delocalized_test_value(&pair, 0.0, l, k, &ZeroShape).unwrap();
            let kappa = k as f64 * std::f64::consts::PI / l;
            assert!((v - (kappa.powi(4) - kappa.powi(2))).abs() < 1e-10, "{v}");
        }
    }

    #[test]
    fn delocalized_constant_term_is_gamma_at_critical_pair() {
        let pair = ExponentPair::critical();
        let base = delocalized_test_value(&pair, 0.0, 50.0, 3, &ZeroShape).unwrap();
        let with = delocalized_test_value(&pair, 1.0, 50.0, 3, &ZeroShape).unwrap();
        assert!((with - base - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let b = Bump::on(0.125, 0.375);
        let h = 1e-5;
        for &y in &[0.2, 0.25, 0.31] {
            let (_, d1, d2) = b.eval(y);
            let fd1 = (b.eval(y + h).0 - b.eval(y - h).0) / (2.0 * h);
            let fd2 = (b.eval(y + h).1 - b.eval(y - h).1) / (2.0 * h);
            assert!((d1 - fd1).abs() < 1e-6 * (1.0 + d1.abs()));
            assert!((d2 - fd2).abs() < 1e-5 * (1.0 + d2.abs()));
        }
    }

    #[test]
    fn localized_requires_negative_region() {
        let err = localized_test_value(&ExponentPair::critical(), 1.0, 10.0, &ZeroShape).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn only_kinetic_terms_without_potential() {
        let pair = ExponentPair::critical();
        let t = bump_test_value(&pair, 1.0, 1.0, &ZeroShape, (0.125, 0.375)).unwrap();
        assert_eq!(t.potential, 0.0);
        assert!(t.total > 0.0);
    }
}
