//! A two-variable problem whose Pareto front is concave, solved per
//! preference cone by a quadratic penalty method and by linear
//! scalarization for comparison.
//!
//! `f1 = 1 - exp(-|x - c|^2)` and `f2 = 1 - exp(-|x + c|^2)` with
//! `c = (1/sqrt 2, 1/sqrt 2)` on the box `[-1, 1]^2`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::baselines::ConvexWeight;
use crate::decomposition::{generate_preferences, PreferenceVector};
use crate::error::{invalid, Error, Result};
use crate::objective::ObjectiveVector;

const LO: f64 = -1.0;
const HI: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcavePoint {
    x: [f64; 2],
}

impl ConcavePoint {
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        if !((LO..=HI).contains(&x1) && (LO..=HI).contains(&x2)) {
            return invalid(format!("({x1}, {x2}) outside [-1, 1]^2"));
        }
        Ok(Self { x: [x1, x2] })
    }

    pub fn x(&self) -> [f64; 2] {
        self.x
    }
}

pub fn eval_concave(p: &ConcavePoint) -> ObjectiveVector {
    let (f, _) = value_and_jacobian(p.x);
    f
}

/// Objectives and the rows `grad f1`, `grad f2`.
fn value_and_jacobian(x: [f64; 2]) -> (ObjectiveVector, [[f64; 2]; 2]) {
    let c = FRAC_1_SQRT_2;
    let (a, b) = ([x[0] - c, x[1] - c], [x[0] + c, x[1] + c]);
    let e1 = (-(a[0] * a[0] + a[1] * a[1])).exp();
    let e2 = (-(b[0] * b[0] + b[1] * b[1])).exp();
    let f = ObjectiveVector::new(1.0 - e1, 1.0 - e2);
    (f, [[2.0 * e1 * a[0], 2.0 * e1 * a[1]], [2.0 * e2 * b[0], 2.0 * e2 * b[1]]])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConcaveConfig {
    pub mu0: f64,
    pub doublings: usize,
    /// Doubling stops at the first stage inside the cone. These further
    /// doublings are allowed when `doublings` is not enough.
    pub extra_doublings: usize,
    /// Multistart points per axis.
    pub grid: usize,
    pub epsilon_g: f64,
    /// Projected-gradient norm at which a descent stage stops.
    pub tolerance: f64,
    pub max_iters: usize,
}

impl Default for ConcaveConfig {
    fn default() -> Self {
        Self {
            mu0: 1.0,
            doublings: 12,
            extra_doublings: 20,
            grid: 4,
            epsilon_g: 1e-3,
            tolerance: 1e-6,
            max_iters: 20_000,
        }
    }
}

impl ConcaveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu0 > 0.0 && self.mu0.is_finite()) || self.grid == 0 || self.max_iters == 0 {
            return invalid("mu0, grid and max_iters must be positive");
        }
        if !(self.epsilon_g > 0.0 && self.tolerance > 0.0) {
            return invalid("epsilon_g and tolerance must be positive");
        }
        Ok(())
    }

    fn starts(&self) -> Vec<[f64; 2]> {
        let step = (HI - LO) / self.grid as f64;
        let at = |i: usize| LO + (i as f64 + 0.5) * step;
        (0..self.grid * self.grid).map(|k| [at(k / self.grid), at(k % self.grid)]).collect()
    }
}

fn project(x: [f64; 2]) -> [f64; 2] {
    [x[0].clamp(LO, HI), x[1].clamp(LO, HI)]
}

/// Projected gradient descent with Armijo backtracking. Returns the final
/// point and whether the projected-gradient norm fell below tolerance.
fn descend(f: impl Fn([f64; 2]) -> (f64, [f64; 2]), mut x: [f64; 2], cfg: &ConcaveConfig) -> ([f64; 2], bool) {
    let (mut val, mut grad) = f(x);
    let mut step: f64 = 1.0;
    for _ in 0..cfg.max_iters {
        let pg = project([x[0] - grad[0], x[1] - grad[1]]);
        if (pg[0] - x[0]).hypot(pg[1] - x[1]) <= cfg.tolerance {
            return (x, true);
        }
        step = (step * 2.0).min(1.0);
        loop {
            let cand = project([x[0] - step * grad[0], x[1] - step * grad[1]]);
            let (cv, cg) = f(cand);
            let decrease = grad[0] * (x[0] - cand[0]) + grad[1] * (x[1] - cand[1]);
            if cv <= val - 1e-4 * decrease {
                x = cand;
                val = cv;
                grad = cg;
                break;
            }
            step *= 0.5;
            if step < 1e-20 {
                return (x, true);
            }
        }
    }
    (x, false)
}

/// `|F| + mu * g^2` and its gradient.
fn penalized(x: [f64; 2], w: &PreferenceVector, mu: f64) -> (f64, [f64; 2]) {
    let (f, jac) = value_and_jacobian(x);
    let norm = f.norm();
    let dot = w.dot(&f);
    let g = 1.0 - dot / norm;
    let fv = [f.f1, f.f2];
    let wv = [w.w1(), w.w2()];
    // d|F|/dF and dg/dF
    let dn = [fv[0] / norm, fv[1] / norm];
    let dg = [-(wv[0] / norm - dot * fv[0] / norm.powi(3)), -(wv[1] / norm - dot * fv[1] / norm.powi(3))];
    let coef = [dn[0] + 2.0 * mu * g * dg[0], dn[1] + 2.0 * mu * g * dg[1]];
    let grad = [coef[0] * jac[0][0] + coef[1] * jac[1][0], coef[0] * jac[0][1] + coef[1] * jac[1][1]];
    (norm + mu * g * g, grad)
}

fn cone_g(f: &ObjectiveVector, w: &PreferenceVector) -> f64 {
    1.0 - w.dot(f) / f.norm()
}

/// Minimum-norm point on the preference ray, by a doubling quadratic penalty
/// from every multistart point. Among the runs that end inside the cone the
/// smallest norm wins.
pub fn solve_concave_preference(w: &PreferenceVector, cfg: &ConcaveConfig) -> Result<(ConcavePoint, ObjectiveVector)> {
    cfg.validate()?;
    let mut best: Option<(f64, [f64; 2], ObjectiveVector)> = None;
    for start in cfg.starts() {
        let mut x = start;
        let mut mu = cfg.mu0;
        let mut converged = false;
        for _ in 0..=cfg.doublings + cfg.extra_doublings {
            let (nx, ok) = descend(|y| penalized(y, w, mu), x, cfg);
            x = nx;
            converged = ok;
            let f = eval_concave(&ConcavePoint { x });
            if cone_g(&f, w) <= cfg.epsilon_g {
                break;
            }
            mu *= 2.0;
        }
        let f = eval_concave(&ConcavePoint { x });
        if converged && cone_g(&f, w) <= cfg.epsilon_g && best.as_ref().is_none_or(|b| f.norm() < b.0) {
            best = Some((f.norm(), x, f));
        }
    }
    match best {
        Some((_, x, f)) => Ok((ConcavePoint { x }, f)),
        None => Err(Error::Numerical(format!(
            "no start reached g <= {} for preference at {:.4} rad",
            cfg.epsilon_g,
            w.angle()
        ))),
    }
}

/// Multistart projected gradient descent on `a1 f1 + a2 f2`.
pub fn linear_scalarization_concave(alpha: &ConvexWeight, cfg: &ConcaveConfig) -> Result<(ConcavePoint, ObjectiveVector)> {
    cfg.validate()?;
    let objective = |x: [f64; 2]| {
        let (f, jac) = value_and_jacobian(x);
        let (a1, a2) = (alpha.a1(), alpha.a2());
        (a1 * f.f1 + a2 * f.f2, [a1 * jac[0][0] + a2 * jac[1][0], a1 * jac[0][1] + a2 * jac[1][1]])
    };
    let mut best: Option<(f64, [f64; 2])> = None;
    for start in cfg.starts() {
        let (x, _) = descend(objective, start, cfg);
        let v = objective(x).0;
        if best.is_none_or(|b| v < b.0) {
            best = Some((v, x));
        }
    }
    let (_, x) = best.expect("at least one start");
    Ok((ConcavePoint { x }, eval_concave(&ConcavePoint { x })))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConcaveMethod {
    Decomposition,
    Scalarization,
}

/// One solved subproblem. `w_or_alpha` is the first weight component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcaveRow {
    pub method: ConcaveMethod,
    pub w_or_alpha: f64,
    pub x1: f64,
    pub x2: f64,
    pub f1: f64,
    pub f2: f64,
}

pub const CONCAVE_CSV_HEADER: &str = "method,w_or_alpha,x1,x2,f1,f2";

/// `k` midpoint preferences solved by decomposition, then `weights` interior
/// convex weights `a1 = (i + 1) / (weights + 1)` solved by scalarization.
pub fn concave_demo(k: usize, weights: usize, cfg: &ConcaveConfig) -> Result<Vec<ConcaveRow>> {
    let row = |method, w: f64, (p, f): (ConcavePoint, ObjectiveVector)| ConcaveRow {
        method,
        w_or_alpha: w,
        x1: p.x[0],
        x2: p.x[1],
        f1: f.f1,
        f2: f.f2,
    };
    let prefs = generate_preferences(k)?;
    let mut rows = Vec::with_capacity(k + weights);
    for w in prefs.iter() {
        rows.push(row(ConcaveMethod::Decomposition, w.w1(), solve_concave_preference(w, cfg)?));
    }
    for i in 0..weights {
        let a1 = (i + 1) as f64 / (weights + 1) as f64;
        let a = ConvexWeight::new(a1, 1.0 - a1)?;
        rows.push(row(ConcaveMethod::Scalarization, a1, linear_scalarization_concave(&a, cfg)?));
    }
    Ok(rows)
}

pub fn write_concave_csv<W: Write>(rows: &[ConcaveRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}
