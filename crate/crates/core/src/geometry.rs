//! Marschak–Machina triangles and two-prize indifference curves.
//!
//! In a triangle over prizes `H > M > L` a lottery is the point
//! `(p_L, p_H)`, the remaining mass sitting on `M`. Within a fixed context
//! an ECU is expected utility, so its indifference curves are straight
//! lines with slope `(u(M) - u(L)) / (u(H) - u(M))`; crossing the threshold
//! line swaps the utility function and the map fans out.
//!
//! On the threshold line itself the optimistic context applies, so each
//! optimistic segment includes its boundary point.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::lottery::{Lottery, LotteryError, OutcomeSpace};
use crate::math::bisect_increasing;
use crate::model::{EcuModel, Family, CONTEXT_SLACK};

/// Curve points in the triangle must reproduce the level this closely.
const LEVEL_TOLERANCE: f64 = 1e-9;
/// Samples closer than this to the threshold are left to the optimistic
/// side.
const REGION_MARGIN: f64 = 1e-9;
pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("triangle prizes must satisfy H > M > L inside the outcome space")]
    BadPrizes,
    #[error("point ({x}, {y}) is outside the triangle")]
    OutsideTriangle { x: f64, y: f64 },
    #[error("u(H) = u(M) makes the indifference slope undefined")]
    DegenerateSlope,
    #[error("a binary family is required")]
    NotBinary,
    #[error("need p < tau < 0.5, got p = {p}, tau = {tau}")]
    BadProbability { p: f64, tau: f64 },
    #[error("step must be positive")]
    BadStep,
    #[error(transparent)]
    Lottery(#[from] LotteryError),
}

/// A plotted point. In a triangle `x = p_L` and `y = p_H`; for two-prize
/// curves `x` is the prize won with probability `p` and `y` the prize won
/// with `1 - p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// A curve made of continuous pieces. Consecutive segments are separated
/// by a discontinuity; `breaks` marks where each one occurs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub segments: Vec<Vec<Point>>,
    pub breaks: Vec<Point>,
}

impl Polyline {
    pub fn points(&self) -> impl Iterator<Item = &Point> {
        self.segments.iter().flatten()
    }
}

/// Three prizes `H > M > L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleSpec {
    pub high: f64,
    pub mid: f64,
    pub low: f64,
}

impl TriangleSpec {
    pub fn new(high: f64, mid: f64, low: f64, space: OutcomeSpace) -> Result<Self, GeometryError> {
        if !(high > mid && mid > low && space.contains(high) && space.contains(low)) {
            return Err(GeometryError::BadPrizes);
        }
        Ok(Self { high, mid, low })
    }

    /// `(H, p_H; M, 1 - p_L - p_H; L, p_L)`.
    pub fn lottery(&self, at: Point, space: OutcomeSpace) -> Result<Lottery, GeometryError> {
        let (pl, ph) = (at.x, at.y);
        if !(pl >= -1e-12 && ph >= -1e-12 && pl + ph <= 1.0 + 1e-12) {
            return Err(GeometryError::OutsideTriangle { x: pl, y: ph });
        }
        let (pl, ph) = (pl.max(0.0), ph.max(0.0));
        let pm = (1.0 - pl - ph).max(0.0);
        Ok(Lottery::new([(self.high, ph), (self.mid, pm), (self.low, pl)], space)?)
    }
}

/// Where `d` sits relative to the three prizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriangleCase {
    /// `d < L`: no prize disappoints, every lottery uses `u_0`.
    AllAbove,
    /// `d >= H`: every prize disappoints, every lottery uses `u_1`.
    AllBelow,
    /// `H > M > d >= L`: disappointment mass is `p_L`.
    LowOnly,
    /// `H > d >= M > L`: disappointment mass is `1 - p_H`.
    LowAndMid,
}

impl TriangleCase {
    pub fn is_expected_utility(&self) -> bool {
        matches!(self, TriangleCase::AllAbove | TriangleCase::AllBelow)
    }
}

pub fn classify_case(spec: &TriangleSpec, d: f64) -> TriangleCase {
    if spec.mid > d && d >= spec.low {
        TriangleCase::LowOnly
    } else if spec.high > d && d >= spec.mid {
        TriangleCase::LowAndMid
    } else if d < spec.low {
        TriangleCase::AllAbove
    } else {
        TriangleCase::AllBelow
    }
}

/// The line where the disappointment mass equals `τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "orientation", rename_all = "snake_case")]
pub enum ThresholdLine {
    /// `p_L = value`.
    Vertical { value: f64 },
    /// `p_H = value`.
    Horizontal { value: f64 },
}

pub fn threshold_line(case: TriangleCase, tau: f64) -> Option<ThresholdLine> {
    match case {
        TriangleCase::LowOnly => Some(ThresholdLine::Vertical { value: tau }),
        TriangleCase::LowAndMid => Some(ThresholdLine::Horizontal { value: 1.0 - tau }),
        _ => None,
    }
}

/// Disappointment mass at a triangle point.
fn mass(case: TriangleCase, at: Point) -> f64 {
    match case {
        TriangleCase::AllAbove => 0.0,
        TriangleCase::AllBelow => 1.0,
        TriangleCase::LowOnly => at.x,
        TriangleCase::LowAndMid => 1.0 - at.y,
    }
}

/// A region where one utility function applies, with its utilities at
/// `(H, M, L)`.
#[derive(Debug, Clone, Copy)]
struct Region {
    uh: f64,
    um: f64,
    ul: f64,
    optimistic: bool,
}

impl Region {
    fn slope(&self) -> f64 {
        (self.um - self.ul) / (self.uh - self.um)
    }

    /// `p_H` on the level line at `p_L`.
    fn p_high(&self, level: f64, pl: f64) -> f64 {
        (level - self.um + pl * (self.um - self.ul)) / (self.uh - self.um)
    }
}

/// Closed-form slope `dp_H/dp_L` of each region, optimistic first.
pub fn region_slopes(model: &EcuModel, spec: &TriangleSpec) -> Result<Vec<f64>, GeometryError> {
    Ok(binary_regions(model, spec)?.iter().map(Region::slope).collect())
}

fn binary_regions(model: &EcuModel, spec: &TriangleSpec) -> Result<Vec<Region>, GeometryError> {
    let Family::Binary { tau, .. } = &model.family else { return Err(GeometryError::NotBinary) };
    let case = classify_case(spec, model.d);
    let at = |pi: f64, optimistic: bool| -> Result<Region, GeometryError> {
        let f = |x: f64| model.family.utility(pi, x, model.space).ok_or(GeometryError::BadPrizes);
        let r = Region { uh: f(spec.high)?, um: f(spec.mid)?, ul: f(spec.low)?, optimistic };
        if !(r.uh > r.um) {
            return Err(GeometryError::DegenerateSlope);
        }
        Ok(r)
    };
    let optimistic = at(0.0, true)?;
    Ok(match case {
        TriangleCase::AllAbove => vec![optimistic],
        TriangleCase::AllBelow => vec![at(1.0, *tau >= 1.0)?],
        _ if *tau >= 1.0 => vec![optimistic],
        _ => vec![optimistic, at(1.0, false)?],
    })
}

fn in_region(case: TriangleCase, tau: f64, optimistic: bool, at: Point) -> bool {
    let m = mass(case, at);
    if optimistic {
        m <= tau + CONTEXT_SLACK
    } else {
        m > tau + REGION_MARGIN
    }
}

fn sample_range(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut out = vec![lo];
    let mut k = libm::floor(lo / step) + 1.0;
    while k * step < hi {
        out.push(k * step);
        k += 1.0;
    }
    if hi > lo {
        out.push(hi);
    }
    out
}

/// Level curve `V = level` of a binary model, one straight segment per
/// region, sampled every `step` in `p_L` with exact endpoints.
fn binary_level_curve(model: &EcuModel, spec: &TriangleSpec, level: f64, step: f64) -> Result<Polyline, GeometryError> {
    let case = classify_case(spec, model.d);
    let tau = model.tau().ok_or(GeometryError::NotBinary)?;
    let mut curve = Polyline::default();
    for region in binary_regions(model, spec)? {
        // Feasible p_L: p_H >= 0 and p_L + p_H <= 1 on the line
        // p_H = a + s p_L, intersected with [0, 1].
        let a = region.p_high(level, 0.0);
        let s = region.slope();
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        // a + s p_L >= 0
        if s > 0.0 {
            lo = lo.max(-a / s);
        } else if a < 0.0 {
            continue;
        }
        // a + (1 + s) p_L <= 1, with 1 + s > 0
        hi = hi.min((1.0 - a) / (1.0 + s));
        if case == TriangleCase::LowOnly {
            if region.optimistic {
                hi = hi.min(tau);
            } else {
                lo = lo.max(tau);
            }
        }
        if case == TriangleCase::LowAndMid {
            // optimistic iff p_H >= 1 - tau
            let cross = (1.0 - tau - a) / s;
            if region.optimistic {
                lo = lo.max(cross);
            } else {
                hi = hi.min(cross);
            }
        }
        if !(lo <= hi) {
            continue;
        }
        let segment: Vec<Point> = sample_range(lo, hi, step)
            .into_iter()
            .map(|pl| Point::new(pl, region.p_high(level, pl)))
            .map(|p| Point::new(p.x, p.y.clamp(0.0, 1.0 - p.x)))
            .filter(|&p| in_region(case, tau, region.optimistic, p) || case.is_expected_utility() || tau >= 1.0)
            .collect();
        if !segment.is_empty() {
            if !curve.segments.is_empty() {
                let last = *curve.segments.last().and_then(|s| s.last()).expect("nonempty");
                curve.breaks.push(last);
            }
            curve.segments.push(segment);
        }
    }
    Ok(curve)
}

/// Numeric tracing for families without a closed form: for each sampled
/// `p_L`, bisect on `p_H` (valuation is monotone in `p_H` under the FOSD
/// conditions). Samples where the level is unreachable split the curve.
fn traced_level_curve(model: &EcuModel, spec: &TriangleSpec, level: f64, step: f64) -> Result<Polyline, GeometryError> {
    let mut curve = Polyline::default();
    let mut current: Vec<Point> = Vec::new();
    for pl in sample_range(0.0, 1.0, step) {
        let value = |ph: f64| {
            spec.lottery(Point::new(pl, ph), model.space)
                .ok()
                .and_then(|l| model.evaluate(&l).ok())
                .unwrap_or(f64::NAN)
        };
        let root = bisect_increasing(value, level, 0.0, 1.0 - pl, 1e-12, 200).ok().filter(|r| r.residual.abs() <= LEVEL_TOLERANCE);
        match root {
            Some(r) => current.push(Point::new(pl, r.x)),
            None if !current.is_empty() => {
                curve.breaks.push(*current.last().expect("nonempty"));
                curve.segments.push(core::mem::take(&mut current));
            }
            None => {}
        }
    }
    if !current.is_empty() {
        curve.segments.push(current);
    }
    Ok(curve)
}

/// Indifference curve at a given value level.
pub fn level_curve(model: &EcuModel, spec: &TriangleSpec, level: f64, step: f64) -> Result<Polyline, GeometryError> {
    if !(step > 0.0) {
        return Err(GeometryError::BadStep);
    }
    match model.family {
        Family::Binary { .. } => binary_level_curve(model, spec, level, step),
        _ => traced_level_curve(model, spec, level, step),
    }
}

/// Indifference curve through a triangle point.
pub fn indifference_curve(model: &EcuModel, spec: &TriangleSpec, through: Point, step: f64) -> Result<Polyline, GeometryError> {
    let level = model.evaluate(&spec.lottery(through, model.space)?).map_err(|_| GeometryError::BadPrizes)?;
    level_curve(model, spec, level, step)
}

/// A triangle with its threshold line and level curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleMap {
    pub spec: TriangleSpec,
    pub case: TriangleCase,
    pub threshold: Option<ThresholdLine>,
    pub levels: Vec<f64>,
    pub curves: Vec<Polyline>,
}

pub fn triangle_map(model: &EcuModel, spec: &TriangleSpec, levels: &[f64], step: f64) -> Result<TriangleMap, GeometryError> {
    let case = classify_case(spec, model.d);
    let threshold = model.tau().and_then(|tau| threshold_line(case, tau));
    let curves = levels.iter().map(|&l| level_curve(model, spec, l, step)).collect::<Result<Vec<_>, _>>()?;
    Ok(TriangleMap { spec: *spec, case, threshold, levels: levels.to_vec(), curves })
}

/// A two-prize indifference curve with its discontinuity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GulCurve {
    pub p: f64,
    pub level: f64,
    pub curve: Polyline,
    /// Grid prizes at which no `y` attains the level.
    pub unreachable: Vec<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Branch {
    Above,
    Below,
}

/// Curve of `(x, y)` with `(x, p; y, 1 - p)` at value `level`, for a
/// binary model with `p < τ < 0.5`.
///
/// For `y > d` the disappointment mass is at most `p < τ` and `u` applies;
/// for `y <= d` it is at least `1 - p > τ` and `v` applies. The two
/// branches are solved separately and a break is emitted where the curve
/// leaves the first for the second.
pub fn gul_curve(model: &EcuModel, p: f64, level: f64, x_grid: &[f64]) -> Result<GulCurve, GeometryError> {
    let Family::Binary { tau, .. } = &model.family else { return Err(GeometryError::NotBinary) };
    let tau = *tau;
    if !(p > 0.0 && p < tau && tau < 0.5) {
        return Err(GeometryError::BadProbability { p, tau });
    }
    let (w, b, d) = (model.space.worst(), model.space.best(), model.d);
    let value = |x: f64, y: f64, branch: Branch| -> f64 {
        let x_mass = if x <= d { p } else { 0.0 };
        let pi = match branch {
            Branch::Above => x_mass,
            Branch::Below => x_mass + 1.0 - p,
        };
        let f = |z: f64| model.family.utility(pi, z, model.space).unwrap_or(f64::NAN);
        p * f(x) + (1.0 - p) * f(y)
    };
    let solve = |x: f64| -> Option<(f64, Branch)> {
        if d < b {
            if let Ok(r) = bisect_increasing(|y| value(x, y, Branch::Above), level, d, b, 1e-12, 200) {
                if r.x > d && r.residual.abs() <= LEVEL_TOLERANCE {
                    return Some((r.x, Branch::Above));
                }
            }
        }
        let r = bisect_increasing(|y| value(x, y, Branch::Below), level, w, d, 1e-12, 200).ok()?;
        (r.residual.abs() <= LEVEL_TOLERANCE).then_some((r.x, Branch::Below))
    };

    let mut curve = Polyline::default();
    let mut unreachable = Vec::new();
    let mut current: Vec<Point> = Vec::new();
    let mut prev: Option<(f64, Branch)> = None;
    for &x in x_grid {
        match solve(x) {
            None => unreachable.push(x),
            Some((y, branch)) => {
                if let Some((px, pb)) = prev {
                    if pb != branch {
                        // The upper branch reaches y = d between px and x.
                        let x_star = bisect_increasing(|t| value(t, d, Branch::Above), level, px, x, 1e-12, 200)
                            .map(|r| r.x)
                            .unwrap_or(px);
                        let jump = value(x_star, d, Branch::Above) - value(x_star, d, Branch::Below);
                        if jump.abs() > LEVEL_TOLERANCE {
                            curve.breaks.push(Point::new(x_star, d));
                            curve.segments.push(core::mem::take(&mut current));
                        }
                    }
                }
                current.push(Point::new(x, y));
                prev = Some((x, branch));
            }
        }
    }
    if !current.is_empty() {
        curve.segments.push(current);
    }
    Ok(GulCurve { p, level, curve, unreachable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::UtilityCurve;
    use crate::reference;

    fn ex1_spec() -> (EcuModel, TriangleSpec) {
        let m = reference::disappointment_reversal();
        let s = TriangleSpec::new(200.0, 100.0, 0.0, m.space).unwrap();
        (m, s)
    }

    fn level_of(m: &EcuModel, s: &TriangleSpec, p: Point) -> f64 {
        m.evaluate(&s.lottery(p, m.space).unwrap()).unwrap()
    }

    #[test]
    fn case_classification() {
        let space = OutcomeSpace::new(0.0, 300.0).unwrap();
        let s = TriangleSpec::new(200.0, 100.0, 0.0, space).unwrap();
        assert_eq!(classify_case(&s, 20.0), TriangleCase::LowOnly);
        let s3 = TriangleSpec::new(200.0, 25.0, 0.0, space).unwrap();
        assert_eq!(classify_case(&s3, 30.0), TriangleCase::LowAndMid);
        let s4 = TriangleSpec::new(200.0, 100.0, 50.0, space).unwrap();
        assert_eq!(classify_case(&s4, 20.0), TriangleCase::AllAbove);
        assert_eq!(classify_case(&s4, 250.0), TriangleCase::AllBelow);
        assert!(TriangleSpec::new(100.0, 100.0, 0.0, space).is_err());
    }

    #[test]
    fn threshold_lines() {
        assert_eq!(threshold_line(TriangleCase::LowOnly, 0.75), Some(ThresholdLine::Vertical { value: 0.75 }));
        let Some(ThresholdLine::Horizontal { value }) = threshold_line(TriangleCase::LowAndMid, 0.3) else { panic!() };
        assert!((value - 0.7).abs() < 1e-15);
        assert_eq!(threshold_line(TriangleCase::AllAbove, 0.3), None);
    }

    #[test]
    fn reference_slopes() {
        let (m, s) = ex1_spec();
        assert_eq!(region_slopes(&m, &s).unwrap(), vec![0.5, 0.25]);
    }

    #[test]
    fn level_curve_points_reproduce_level() {
        let (m, s) = ex1_spec();
        for through in [Point::new(0.2, 0.1), Point::new(0.9, 0.05), Point::new(0.5, 0.3)] {
            let level = level_of(&m, &s, through);
            let c = indifference_curve(&m, &s, through, 1e-2).unwrap();
            assert!(c.points().count() > 0);
            for p in c.points() {
                assert!((level_of(&m, &s, *p) - level).abs() <= 1e-8, "{p:?}");
            }
        }
    }

    #[test]
    fn curve_through_v_region_point() {
        let (m, s) = ex1_spec();
        let through = Point::new(0.9, 0.05);
        let c = indifference_curve(&m, &s, through, 1e-2).unwrap();
        let seg = c.segments.last().unwrap();
        assert!(seg.iter().all(|p| p.x > 0.75));
        for w in seg.windows(2) {
            assert!(((w[1].y - w[0].y) / (w[1].x - w[0].x) - 0.25).abs() < 1e-9);
        }
    }

    #[test]
    fn expected_utility_gives_single_segment() {
        let space = OutcomeSpace::new(0.0, 300.0).unwrap();
        let eu = EcuModel::expected_utility(space, UtilityCurve::table(alloc::vec![(0.0, 0.0), (300.0, 1.0)])).unwrap();
        let s = TriangleSpec::new(200.0, 100.0, 0.0, space).unwrap();
        let c = indifference_curve(&eu, &s, Point::new(0.3, 0.3), 1e-2).unwrap();
        assert_eq!(c.segments.len(), 1);
        assert!(c.breaks.is_empty());
    }

    #[test]
    fn low_and_mid_case_curves() {
        let m = reference::betweenness_violation(reference::Reading::AsComputed);
        let s = TriangleSpec::new(200.0, 25.0, 0.0, m.space).unwrap();
        assert_eq!(classify_case(&s, m.d), TriangleCase::LowAndMid);
        for through in [Point::new(0.1, 0.8), Point::new(0.3, 0.2)] {
            let level = level_of(&m, &s, through);
            let c = indifference_curve(&m, &s, through, 1e-2).unwrap();
            for p in c.points() {
                assert!((level_of(&m, &s, *p) - level).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn traced_curve_for_parametric_family() {
        let space = OutcomeSpace::new(0.0, 1.0).unwrap();
        let m = EcuModel::parametric(space, 0.3).unwrap();
        let s = TriangleSpec::new(1.0, 0.5, 0.0, space).unwrap();
        let level = level_of(&m, &s, Point::new(0.2, 0.3));
        let c = level_curve(&m, &s, level, 1e-2).unwrap();
        assert!(c.points().count() > 5);
        for p in c.points() {
            assert!((level_of(&m, &s, *p) - level).abs() <= 1e-8);
        }
    }

    fn gul_model() -> EcuModel {
        let space = OutcomeSpace::new(0.0, 100.0).unwrap();
        EcuModel::binary(
            space,
            40.0,
            0.3,
            UtilityCurve::Power { low: 0.0, high: 1.0, exponent: 0.5 },
            UtilityCurve::Power { low: 0.0, high: 1.0, exponent: 1.0 },
        )
        .unwrap()
    }

    #[test]
    fn gul_curve_breaks_at_threshold() {
        let m = gul_model();
        let xs: Vec<f64> = (0..=100).map(|i| i as f64).collect();
        let p = 0.2;
        // Just above the u-value of (0, p; d, 1 - p), so the u-branch meets
        // y = d almost at once and the v-branch resumes near x = 95.
        let level = 0.51;
        let g = gul_curve(&m, p, level, &xs).unwrap();
        assert_eq!(g.curve.breaks.len(), 1);
        assert_eq!(g.curve.breaks[0].y, 40.0);
        assert!(!g.unreachable.is_empty());
        for seg in &g.curve.segments {
            for pt in seg {
                let l = Lottery::new([(pt.x, p), (pt.y, 1.0 - p)], m.space).unwrap();
                assert!((m.evaluate(&l).unwrap() - level).abs() < 1e-8, "{pt:?}");
            }
        }
        let high = gul_curve(&m, p, 0.95, &xs).unwrap();
        assert!(high.curve.breaks.is_empty());
    }

    #[test]
    fn gul_curve_rejects_bad_probabilities() {
        let m = gul_model();
        assert!(matches!(gul_curve(&m, 0.35, 0.5, &[1.0]), Err(GeometryError::BadProbability { .. })));
    }

    #[test]
    fn gul_curve_of_expected_utility_is_smooth() {
        let space = OutcomeSpace::new(0.0, 100.0).unwrap();
        let u = UtilityCurve::Power { low: 0.0, high: 1.0, exponent: 0.5 };
        let eu = EcuModel::new(space, 40.0, Family::Binary { tau: 0.3, u: u.clone(), v: u }).unwrap();
        let xs: Vec<f64> = (0..=100).map(|i| i as f64).collect();
        let g = gul_curve(&eu, 0.2, 0.8 * libm::sqrt(0.6), &xs).unwrap();
        assert!(g.curve.breaks.is_empty());
        assert_eq!(g.curve.segments.len(), 1);
    }
}
