//! Black-box audit of a preference functional against the ECU axioms.
//!
//! Everything here sees a preference only through [`PreferenceOracle`],
//! so the same checks run on an [`EcuModel`], a closure or a reconstructed
//! table. All checks are restricted to finite grids: a failed check carries
//! a witness that can be re-checked through the oracle, while a pass only
//! certifies the grid.
//!
//! Reconstruction follows the constructive route: recover `d̃` from
//! worst-mixture substitutions, solve `φ_x^α` by bisection in every
//! `(α, x)` cell and tabulate `u_α(x) = φ_x^α`, normalized to
//! `u(w) = 0`, `u(b) = 1`.

use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::lottery::{Lottery, LotteryError, OutcomeSpace};
use crate::math::{bisect_to_width, NotBracketed};
use crate::model::{EcuModel, Family, ModelError, Preference, TabulatedFamily};

/// Value slack at the bracket ends of every weight bisection.
pub const BISECTION_TOLERANCE: f64 = 1e-10;
/// Weights are bisected down to this bracket width.
pub const WEIGHT_RESOLUTION: f64 = 1e-15;
pub const BISECTION_MAX_ITER: usize = 200;

/// A deterministic lottery valuation.
pub trait PreferenceOracle {
    fn space(&self) -> OutcomeSpace;
    fn value(&self, p: &Lottery) -> f64;
}

impl PreferenceOracle for EcuModel {
    fn space(&self) -> OutcomeSpace {
        self.space
    }

    /// `NaN` for an ill-formed family, which every check treats as failing.
    fn value(&self, p: &Lottery) -> f64 {
        self.evaluate(p).unwrap_or(f64::NAN)
    }
}

impl<O: PreferenceOracle + ?Sized> PreferenceOracle for &O {
    fn space(&self) -> OutcomeSpace {
        (**self).space()
    }

    fn value(&self, p: &Lottery) -> f64 {
        (**self).value(p)
    }
}

/// Wraps a closure as an oracle.
pub struct FnOracle<F> {
    space: OutcomeSpace,
    f: F,
}

impl<F: Fn(&Lottery) -> f64> FnOracle<F> {
    pub fn new(space: OutcomeSpace, f: F) -> Self {
        Self { space, f }
    }
}

impl<F: Fn(&Lottery) -> f64> PreferenceOracle for FnOracle<F> {
    fn space(&self) -> OutcomeSpace {
        self.space
    }

    fn value(&self, p: &Lottery) -> f64 {
        (self.f)(p)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AuditError {
    #[error(transparent)]
    Lottery(#[from] LotteryError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no best/worst mixture matches value {value}: range is [{lo}, {hi}]")]
    NotSolvable { value: f64, lo: f64, hi: f64 },
    #[error("phi_x^alpha needs alpha in (0, 1] for x <= d~ and in [0, 1) above it (x = {x}, alpha = {alpha})")]
    DomainMismatch { x: f64, alpha: f64 },
    #[error("worst-mixture substitution holds at {member} but fails at the smaller prize {gap}")]
    NotAnInterval { gap: f64, member: f64 },
    #[error("grid is empty or unsorted")]
    BadGrid,
    #[error("families are tabulated on different grids")]
    GridMismatch,
    #[error("degenerate family: u(b) = u(w)")]
    Degenerate,
}

impl From<NotBracketed> for AuditError {
    fn from(e: NotBracketed) -> Self {
        AuditError::NotSolvable { value: e.target, lo: e.f_lo, hi: e.f_hi }
    }
}

/// Grids and tolerance for an audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditGrids {
    /// Prizes at which `φ`, `𝒟` and the reconstruction are evaluated.
    pub x_grid: Vec<f64>,
    /// Mixing weights (contexts), ascending.
    pub alpha_grid: Vec<f64>,
    /// Best/worst weights for the monotonicity check.
    pub t_grid: Vec<f64>,
    pub tol: f64,
}

impl AuditGrids {
    /// Prizes `w, w + step, …, b` and weights `0, 1/n, …, 1`.
    pub fn uniform(space: OutcomeSpace, prize_step: f64, alpha_steps: usize, tol: f64) -> Self {
        let (w, b) = (space.worst(), space.best());
        let n = libm::ceil((b - w) / prize_step) as usize;
        let mut x_grid: Vec<f64> = (0..n).map(|i| w + prize_step * i as f64).filter(|&x| x < b).collect();
        x_grid.push(b);
        let alpha_grid: Vec<f64> = (0..=alpha_steps).map(|i| i as f64 / alpha_steps as f64).collect();
        Self { x_grid, t_grid: alpha_grid.clone(), alpha_grid, tol }
    }

    pub fn validate(&self) -> Result<(), AuditError> {
        let sorted = |g: &[f64]| !g.is_empty() && g.windows(2).all(|p| p[0] < p[1]);
        let unit = |g: &[f64]| g.iter().all(|a| (0.0..=1.0).contains(a));
        if !sorted(&self.x_grid) || !sorted(&self.alpha_grid) || !sorted(&self.t_grid) {
            return Err(AuditError::BadGrid);
        }
        if !unit(&self.alpha_grid) || !unit(&self.t_grid) || !(self.tol > 0.0) {
            return Err(AuditError::BadGrid);
        }
        Ok(())
    }
}

/// A concrete counterexample, re-checkable through the oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `t_high > t_low` but the best/worst mixture with weight `t_high` is
    /// not strictly better.
    Monotonicity { t_high: f64, t_low: f64, v_high: f64, v_low: f64 },
    /// Replacing `w` by `x` (or `b` by `x`) in a mixture moved the value the
    /// wrong way by more than the tolerance.
    Replacement { x: f64, alpha: f64, better: f64, worse: f64 },
    /// `p` and its best/worst substitution differ in value.
    Substitution { lottery: Vec<(f64, f64)>, direct: f64, substituted: f64 },
    /// A value could not be matched by any best/worst mixture.
    Solvability { lottery: Vec<(f64, f64)>, value: f64 },
    /// `φ_x^α` does not vary over the interior contexts.
    NoContextVariation { x: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub passed: bool,
    pub witnesses: Vec<Witness>,
}

impl CheckResult {
    fn from_witnesses(witnesses: Vec<Witness>) -> Self {
        Self { passed: witnesses.is_empty(), witnesses }
    }
}

fn bw(t: f64, space: OutcomeSpace) -> Lottery {
    Lottery::two_point(space.best(), space.worst(), t.clamp(0.0, 1.0), space).expect("weight in [0, 1]")
}

/// Monotonicity: `t ↦ oracle(t δ_b + (1 - t) δ_w)` strictly increasing on the
/// grid. Only adjacent grid points are compared.
pub fn check_monotonicity<O: PreferenceOracle + ?Sized>(oracle: &O, t_grid: &[f64]) -> CheckResult {
    let space = oracle.space();
    let values: Vec<f64> = t_grid.iter().map(|&t| oracle.value(&bw(t, space))).collect();
    let witnesses = t_grid
        .windows(2)
        .zip(values.windows(2))
        .filter(|(_, v)| !(v[1] > v[0]))
        .map(|(t, v)| Witness::Monotonicity { t_high: t[1], t_low: t[0], v_high: v[1], v_low: v[0] })
        .collect();
    CheckResult::from_witnesses(witnesses)
}

/// Replacement monotonicity on every `(x, α)` of the grids.
pub fn check_replacement_monotonicity<O: PreferenceOracle + ?Sized>(
    oracle: &O,
    x_grid: &[f64],
    alpha_grid: &[f64],
    tol: f64,
) -> CheckResult {
    let space = oracle.space();
    let (w, b) = (space.worst(), space.best());
    let mut witnesses = Vec::new();
    for &x in x_grid {
        for &alpha in alpha_grid {
            let bx = oracle.value(&Lottery::two_point(b, x, alpha, space).expect("grid inside space"));
            let bw_ = oracle.value(&Lottery::two_point(b, w, alpha, space).expect("grid inside space"));
            let xw = oracle.value(&Lottery::two_point(x, w, alpha, space).expect("grid inside space"));
            if !(bx >= bw_ - tol) {
                witnesses.push(Witness::Replacement { x, alpha, better: bx, worse: bw_ });
            }
            if !(bw_ >= xw - tol) {
                witnesses.push(Witness::Replacement { x, alpha, better: bw_, worse: xw });
            }
        }
    }
    CheckResult::from_witnesses(witnesses)
}

/// Solves `oracle(make(φ)) = target` for `φ ∈ [0, 1]` where `make` moves
/// mass from `w` to `b` as `φ` grows.
fn solve_weight<O, F>(oracle: &O, target: f64, make: F) -> Result<f64, AuditError>
where
    O: PreferenceOracle + ?Sized,
    F: Fn(f64) -> Lottery,
{
    let root = bisect_to_width(
        |phi| oracle.value(&make(phi)),
        target,
        0.0,
        1.0,
        BISECTION_TOLERANCE,
        WEIGHT_RESOLUTION,
        BISECTION_MAX_ITER,
    )?;
    Ok(root.x)
}

/// Solvability: the weight `γ` with `p ~ γ δ_b + (1 - γ) δ_w`.
pub fn bw_solve<O: PreferenceOracle + ?Sized>(oracle: &O, p: &Lottery) -> Result<f64, AuditError> {
    let space = oracle.space();
    solve_weight(oracle, oracle.value(p), |t| bw(t, space))
}

/// `φ_x`: the weight making `δ_x` indifferent to a best/worst mixture.
pub fn phi<O: PreferenceOracle + ?Sized>(oracle: &O, x: f64) -> Result<f64, AuditError> {
    bw_solve(oracle, &Lottery::dirac(x, oracle.space())?)
}

/// Whether `x` passes the worst-mixture substitution at every grid weight:
/// `α δ_x + (1 - α) δ_w ~ α φ_x δ_b + (1 - α φ_x) δ_w`.
///
/// A grid can refute membership in `𝒟` but never confirm it.
pub fn in_script_d<O: PreferenceOracle + ?Sized>(oracle: &O, x: f64, alpha_grid: &[f64], tol: f64) -> Result<bool, AuditError> {
    let space = oracle.space();
    let w = space.worst();
    if x == w {
        return Ok(true);
    }
    let phi_x = phi(oracle, x)?;
    for &alpha in alpha_grid {
        let direct = oracle.value(&Lottery::two_point(x, w, alpha, space)?);
        let substituted = oracle.value(&bw(alpha * phi_x, space));
        if !((direct - substituted).abs() <= tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The recovered threshold as a grid interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DTilde {
    /// Largest grid prize in `𝒟`, or `b` when every grid prize below `b`
    /// is a member.
    pub lower: f64,
    /// Next grid prize after `lower`; `d̃` lies in `[lower, upper)`. Equal
    /// to `b` when every grid prize is a member.
    pub upper: f64,
    pub all_members: bool,
}

impl DTilde {
    /// Builds `d̃` from per-prize membership on an ascending grid of prizes
    /// below `b`. Membership must be a prefix of the grid.
    pub fn from_membership(x_grid: &[f64], membership: &[bool], b: f64) -> Result<Self, AuditError> {
        if x_grid.is_empty() || x_grid.len() != membership.len() {
            return Err(AuditError::BadGrid);
        }
        let k = membership.iter().take_while(|&&m| m).count();
        if let Some(j) = membership[k..].iter().position(|&m| m) {
            return Err(AuditError::NotAnInterval { gap: x_grid[k], member: x_grid[k + j] });
        }
        if k == 0 {
            // w is always a member; a grid that misses it starts above w.
            return Err(AuditError::NotAnInterval { gap: x_grid[0], member: x_grid[0] });
        }
        if k == x_grid.len() {
            return Ok(Self { lower: b, upper: b, all_members: true });
        }
        Ok(Self { lower: x_grid[k - 1], upper: x_grid[k], all_members: false })
    }

    /// The threshold used by downstream consumers.
    pub fn value(&self) -> f64 {
        self.lower
    }
}

/// Prizes of `x_grid` strictly below `b`, where membership is tested.
pub fn membership_grid(x_grid: &[f64], space: OutcomeSpace) -> Vec<f64> {
    x_grid.iter().copied().filter(|&x| x < space.best()).collect()
}

/// Largest prefix of the grid inside `𝒟`.
pub fn recover_dtilde<O: PreferenceOracle + ?Sized>(
    oracle: &O,
    x_grid: &[f64],
    alpha_grid: &[f64],
    tol: f64,
) -> Result<DTilde, AuditError> {
    let space = oracle.space();
    let xs = membership_grid(x_grid, space);
    let membership = xs.iter().map(|&x| in_script_d(oracle, x, alpha_grid, tol)).collect::<Result<Vec<_>, _>>()?;
    DTilde::from_membership(&xs, &membership, space.best())
}

/// `φ_x^α`, solved from the best-mixture indifference for `x <= d̃` and
/// from the worst-mixture one above it.
pub fn phi_alpha<O: PreferenceOracle + ?Sized>(oracle: &O, x: f64, alpha: f64, dtilde: f64) -> Result<f64, AuditError> {
    let space = oracle.space();
    let (w, b) = (space.worst(), space.best());
    if x <= dtilde {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(AuditError::DomainMismatch { x, alpha });
        }
        let lhs = Lottery::two_point(x, b, alpha, space)?;
        let target = oracle.value(&lhs);
        solve_weight(oracle, target, |phi| bw(alpha * phi + 1.0 - alpha, space))
    } else {
        if !(0.0..1.0).contains(&alpha) {
            return Err(AuditError::DomainMismatch { x, alpha });
        }
        let lhs = Lottery::two_point(w, x, alpha, space)?;
        let target = oracle.value(&lhs);
        solve_weight(oracle, target, |phi| bw((1.0 - alpha) * phi, space))
    }
}

/// Contextual substitutability on a sample: each `p` against
/// `Σ_x p(x) [φ_x^α δ_b + (1 - φ_x^α) δ_w]` with `α = p([w, d̃])`.
pub fn check_contextual_substitutability<O: PreferenceOracle + ?Sized>(
    oracle: &O,
    sample: &[Lottery],
    dtilde: f64,
    tol: f64,
) -> Result<CheckResult, AuditError> {
    let space = oracle.space();
    let mut witnesses = Vec::new();
    for p in sample {
        let alpha = p.disappointment_mass(dtilde).clamp(0.0, 1.0);
        let mut weight = 0.0;
        for &(x, px) in p.support() {
            weight += px * phi_alpha(oracle, x, alpha, dtilde)?;
        }
        let direct = oracle.value(p);
        let substituted = oracle.value(&bw(weight, space));
        if !((direct - substituted).abs() <= tol) {
            witnesses.push(Witness::Substitution { lottery: p.support().to_vec(), direct, substituted });
        }
    }
    Ok(CheckResult::from_witnesses(witnesses))
}

/// The cell layout of a reconstruction: contexts × prizes with the domain
/// rules applied relative to `d̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionPlan {
    pub space: OutcomeSpace,
    pub dtilde: DTilde,
    pub contexts: Vec<f64>,
    pub prizes: Vec<f64>,
}

impl ReconstructionPlan {
    /// Contexts are `{0} ∪ alpha_grid ∪ {1}`; prizes are `x_grid` with `w`
    /// and `b` added.
    pub fn new(space: OutcomeSpace, dtilde: DTilde, grids: &AuditGrids) -> Self {
        let mut contexts = Vec::with_capacity(grids.alpha_grid.len() + 2);
        contexts.push(0.0);
        contexts.extend(grids.alpha_grid.iter().copied());
        contexts.push(1.0);
        contexts.sort_by(f64::total_cmp);
        contexts.dedup();
        let mut prizes = Vec::with_capacity(grids.x_grid.len() + 2);
        prizes.push(space.worst());
        prizes.extend(grids.x_grid.iter().copied().filter(|&x| space.contains(x)));
        prizes.push(space.best());
        prizes.sort_by(f64::total_cmp);
        prizes.dedup();
        Self { space, dtilde, contexts, prizes }
    }

    pub fn len(&self) -> usize {
        self.contexts.len() * self.prizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coords(&self, cell: usize) -> (f64, f64) {
        (self.contexts[cell / self.prizes.len()], self.prizes[cell % self.prizes.len()])
    }

    /// The normalized utility of one cell, `None` outside the domain.
    pub fn cell<O: PreferenceOracle + ?Sized>(&self, oracle: &O, cell: usize) -> Result<Option<f64>, AuditError> {
        let (alpha, x) = self.coords(cell);
        let d = self.dtilde.value();
        if (alpha == 0.0 && x <= d) || (alpha == 1.0 && x > d) {
            return Ok(None);
        }
        if x == self.space.worst() {
            return Ok(Some(0.0));
        }
        if x == self.space.best() {
            return Ok(Some(1.0));
        }
        phi_alpha(oracle, x, alpha, d).map(Some)
    }

    /// Assembles cell values (in cell order) into a tabulated model.
    pub fn finish(self, values: Vec<Option<f64>>) -> Result<EcuModel, AuditError> {
        let table = TabulatedFamily::new(self.contexts, self.prizes, values)?;
        Ok(EcuModel::new(self.space, self.dtilde.value(), Family::Tabulated(table))?)
    }
}

/// A reconstructed representation and the threshold it was built on.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub dtilde: DTilde,
    pub model: EcuModel,
}

/// Builds a tabulated ECU from the oracle.
pub fn reconstruct_ecu<O: PreferenceOracle + ?Sized>(oracle: &O, grids: &AuditGrids) -> Result<Reconstruction, AuditError> {
    grids.validate()?;
    let space = oracle.space();
    let dtilde = recover_dtilde(oracle, &grids.x_grid, &grids.alpha_grid, grids.tol)?;
    let plan = ReconstructionPlan::new(space, dtilde, grids);
    let values = (0..plan.len()).map(|i| plan.cell(oracle, i)).collect::<Result<Vec<_>, _>>()?;
    Ok(Reconstruction { dtilde, model: plan.finish(values)? })
}

/// Interior contexts at which `φ_x^α` is constant, one witness per prize.
/// Only meaningful when `d̃ < b`.
pub fn check_context_variation(table: &TabulatedFamily, space: OutcomeSpace) -> CheckResult {
    let (w, b) = (space.worst(), space.best());
    let mut witnesses = Vec::new();
    for (j, &x) in table.prizes().iter().enumerate() {
        if x <= w || x >= b {
            continue;
        }
        let mut values = table
            .contexts()
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0.0 && a < 1.0)
            .filter_map(|(i, _)| table.cell(i, j));
        let varies = match values.next() {
            Some(first) => values.any(|v| v != first),
            None => false,
        };
        if !varies {
            witnesses.push(Witness::NoContextVariation { x });
        }
    }
    CheckResult::from_witnesses(witnesses)
}

fn endpoint(table: &TabulatedFamily, j: usize) -> Option<f64> {
    (0..table.contexts().len()).find_map(|i| table.cell(i, j))
}

/// Finds `k > 0`, `c` with `B = k·A + c` cell by cell, or `None`.
///
/// `k` and `c` are solved from the worst and best prize values; every
/// other cell must match within `tol` and the two tables must agree on
/// which cells are defined.
pub fn affine_match(a: &TabulatedFamily, b: &TabulatedFamily, tol: f64) -> Result<Option<(f64, f64)>, AuditError> {
    if a.contexts() != b.contexts() || a.prizes() != b.prizes() {
        return Err(AuditError::GridMismatch);
    }
    let last = a.prizes().len() - 1;
    let (aw, ab) = (endpoint(a, 0).ok_or(AuditError::Degenerate)?, endpoint(a, last).ok_or(AuditError::Degenerate)?);
    let (bw_, bb) = (endpoint(b, 0).ok_or(AuditError::Degenerate)?, endpoint(b, last).ok_or(AuditError::Degenerate)?);
    if ab == aw || bb == bw_ {
        return Err(AuditError::Degenerate);
    }
    let k = (bb - bw_) / (ab - aw);
    let c = bw_ - k * aw;
    if !(k > 0.0) {
        return Ok(None);
    }
    for i in 0..a.contexts().len() {
        for j in 0..a.prizes().len() {
            match (a.cell(i, j), b.cell(i, j)) {
                (None, None) => {}
                (Some(u), Some(v)) if (v - (k * u + c)).abs() <= tol => {}
                _ => return Ok(None),
            }
        }
    }
    Ok(Some((k, c)))
}

/// Grid weights `α` at which betweenness fails for `p` and `q`.
///
/// With `p ≻ q` betweenness requires `p ≻ αp + (1 - α)q ≻ q`; a weight is
/// reported when the mixture is strictly better than `p` or strictly worse
/// than `q`. With `p ~ q` every mixture must be indifferent to both.
/// The symmetric case `q ≻ p` is handled by swapping roles.
pub fn detect_betweenness_violation<O: PreferenceOracle + ?Sized>(
    oracle: &O,
    p: &Lottery,
    q: &Lottery,
    alpha_grid: &[f64],
    tol: f64,
) -> Vec<f64> {
    let (vp, vq) = (oracle.value(p), oracle.value(q));
    let (hi, lo) = if vp >= vq { (vp, vq) } else { (vq, vp) };
    let strict = hi - lo > tol;
    alpha_grid
        .iter()
        .copied()
        .filter(|&alpha| alpha > 0.0 && alpha < 1.0)
        .filter(|&alpha| {
            let Ok(m) = Lottery::mix(p, q, alpha) else { return true };
            let vm = oracle.value(&m);
            if strict {
                vm > hi + tol || vm < lo - tol
            } else {
                (vm - vp).abs() > tol
            }
        })
        .collect()
}

/// Choice pattern across two pairs `(A1, B1)`, `(A2, B2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllaisClass {
    NoReversal,
    /// `A` chosen in the first pair, `B` in the second.
    ReversalAb,
    /// `B` chosen in the first pair, `A` in the second.
    ReversalBa,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllaisOutcome {
    pub class: AllaisClass,
    pub first: Preference,
    pub second: Preference,
    /// Set when either pair is indifferent; the class is then `NoReversal`.
    pub indifferent: bool,
}

/// Compares the strict choices of the oracle across two pairs.
pub fn detect_allais<O: PreferenceOracle + ?Sized>(
    oracle: &O,
    pair1: (&Lottery, &Lottery),
    pair2: (&Lottery, &Lottery),
    tol: f64,
) -> AllaisOutcome {
    let first = Preference::from_values(oracle.value(pair1.0), oracle.value(pair1.1), tol);
    let second = Preference::from_values(oracle.value(pair2.0), oracle.value(pair2.1), tol);
    let indifferent = first == Preference::Indifferent || second == Preference::Indifferent;
    let class = match (first, second) {
        (Preference::First, Preference::Second) => AllaisClass::ReversalAb,
        (Preference::Second, Preference::First) => AllaisClass::ReversalBa,
        _ => AllaisClass::NoReversal,
    };
    AllaisOutcome { class, first, second, indifferent }
}

/// Random lotteries with at most `max_support` prizes drawn from
/// `prizes` and probabilities that are multiples of `1 / resolution`.
pub fn sample_lotteries<R: Rng + ?Sized>(
    rng: &mut R,
    space: OutcomeSpace,
    prizes: &[f64],
    max_support: usize,
    resolution: u32,
    count: usize,
) -> Vec<Lottery> {
    (0..count).map(|_| sample_lottery(rng, space, prizes, max_support, resolution)).collect()
}

pub fn sample_lottery<R: Rng + ?Sized>(
    rng: &mut R,
    space: OutcomeSpace,
    prizes: &[f64],
    max_support: usize,
    resolution: u32,
) -> Lottery {
    let n = rng.random_range(1..=max_support.max(1));
    // n - 1 cut points over {1, …, resolution - 1}, possibly repeated;
    // repeated cuts give zero masses, which Lottery::new drops.
    let mut cuts: Vec<u32> = (0..n - 1).map(|_| rng.random_range(1..resolution)).collect();
    cuts.push(0);
    cuts.push(resolution);
    cuts.sort_unstable();
    let pairs = cuts.windows(2).map(|c| {
        let x = prizes[rng.random_range(0..prizes.len())];
        (x, (c[1] - c[0]) as f64 / resolution as f64)
    });
    Lottery::new(pairs.collect::<Vec<_>>(), space).expect("sampled lottery is valid")
}

/// Full audit output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub monotonicity: CheckResult,
    pub replacement: CheckResult,
    pub solvability: CheckResult,
    pub dtilde: Option<DTilde>,
    pub dtilde_error: Option<alloc::string::String>,
    pub substitutability: Option<CheckResult>,
    pub context_variation: Option<CheckResult>,
    /// `(x, φ_x)` on the prize grid.
    pub phi: Vec<(f64, Option<f64>)>,
    /// Grid-limited confidence: passes certify only the grids used.
    pub grid_limited: bool,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.monotonicity.passed
            && self.replacement.passed
            && self.solvability.passed
            && self.dtilde.is_some()
            && self.substitutability.as_ref().is_some_and(|c| c.passed)
    }
}

/// Runs every check on the grids and a lottery sample.
pub fn audit<O: PreferenceOracle + ?Sized>(oracle: &O, grids: &AuditGrids, sample: &[Lottery]) -> Result<AuditReport, AuditError> {
    grids.validate()?;
    let space = oracle.space();
    let monotonicity = check_monotonicity(oracle, &grids.t_grid);
    let replacement = check_replacement_monotonicity(oracle, &grids.x_grid, &grids.alpha_grid, grids.tol);

    let mut solvability = Vec::new();
    for p in sample {
        if bw_solve(oracle, p).is_err() {
            solvability.push(Witness::Solvability { lottery: p.support().to_vec(), value: oracle.value(p) });
        }
    }
    let phi = grids.x_grid.iter().map(|&x| (x, phi(oracle, x).ok())).collect();

    let (dtilde, dtilde_error) = match recover_dtilde(oracle, &grids.x_grid, &grids.alpha_grid, grids.tol) {
        Ok(d) => (Some(d), None),
        Err(e) => (None, Some(alloc::format!("{e}"))),
    };
    let mut substitutability = None;
    let mut context_variation = None;
    if let Some(d) = dtilde {
        substitutability = check_contextual_substitutability(oracle, sample, d.value(), grids.tol).ok();
        if !d.all_members {
            let plan = ReconstructionPlan::new(space, d, grids);
            let values: Result<Vec<_>, _> = (0..plan.len()).map(|i| plan.cell(oracle, i)).collect();
            if let Ok(values) = values {
                if let Ok(table) = TabulatedFamily::new(plan.contexts, plan.prizes, values) {
                    context_variation = Some(check_context_variation(&table, space));
                }
            }
        }
    }
    Ok(AuditReport {
        monotonicity,
        replacement,
        solvability: CheckResult::from_witnesses(solvability),
        dtilde,
        dtilde_error,
        substitutability,
        context_variation,
        phi,
        grid_limited: true,
    })
}
