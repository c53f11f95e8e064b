//! The two partial flows of a splitting step.
//!
//! Linear flow: `v' = L v + s(t)` with homogeneous Dirichlet values, where the
//! source is `f(z) - dz/dt` for the modified splitting and `-dz/dt` (after
//! shifting by the lifting) for the classical one. Reaction flow: the pointwise
//! ODE `w' = f(w)` (classical) or `w' = f(w + z(t)) - f(z(t))` (modified).

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::lifting::{modified_with, Lifting};
use crate::operators::{phi1, CnSolver, DirichletLaplacian};

/// Default RK4 substeps per reaction flow.
pub const DEFAULT_REACTION_SUBSTEPS: usize = 10;
/// Default Crank–Nicolson substeps per linear flow.
pub const DEFAULT_CN_SUBSTEPS: usize = 10;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// `(w0, z, t) -> w(t)` for `w' = f(w + z) - f(z)` with `z` frozen; `None`
/// when the solution leaves the reals before `t`.
type ShiftedFlow = Arc<dyn Fn(f64, f64, f64) -> Option<f64> + Send + Sync>;

/// A pointwise reaction `f: R -> R`.
#[derive(Clone)]
pub struct ReactionTerm {
    name: String,
    f: ScalarFn,
    exact: Option<ShiftedFlow>,
}

impl fmt::Debug for ReactionTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReactionTerm")
            .field("name", &self.name)
            .field("closed_form", &self.exact.is_some())
            .finish()
    }
}

impl ReactionTerm {
    pub fn new<F>(name: impl Into<String>, f: F) -> ReactionTerm
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ReactionTerm {
            name: name.into(),
            f: Arc::new(f),
            exact: None,
        }
    }

    /// `f(u) = u^2`.
    ///
    /// With frozen `z` the shifted flow is the Bernoulli equation
    /// `w' = w^2 + 2 z w`, solved by `w0 e^{2zt} / (1 - w0 t phi_1(2zt))`.
    pub fn quadratic() -> ReactionTerm {
        ReactionTerm {
            name: "quadratic".into(),
            f: Arc::new(|u| u * u),
            exact: Some(Arc::new(|w0, z, t| {
                let denom = 1.0 - w0 * t * phi1(2.0 * z * t);
                (denom > 0.0).then(|| w0 * (2.0 * z * t).exp() / denom)
            })),
        }
    }

    /// `f(u) = c u`.
    pub fn linear(c: f64) -> ReactionTerm {
        ReactionTerm {
            name: format!("linear({c})"),
            f: Arc::new(move |u| c * u),
            exact: Some(Arc::new(move |w0, _, t| Some(w0 * (c * t).exp()))),
        }
    }

    pub fn zero() -> ReactionTerm {
        ReactionTerm {
            name: "zero".into(),
            f: Arc::new(|_| 0.0),
            exact: Some(Arc::new(|w0, _, _| Some(w0))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    pub fn has_closed_form(&self) -> bool {
        self.exact.is_some()
    }

    fn shifted_rhs(&self, w: f64, z: f64) -> f64 {
        if z == 0.0 {
            (self.f)(w)
        } else {
            (self.f)(w + z) - (self.f)(z)
        }
    }
}

impl FromStr for ReactionTerm {
    type Err = Error;

    /// Accepts `quadratic`, `zero` and `linear(c)`.
    fn from_str(s: &str) -> Result<ReactionTerm> {
        let s = s.trim();
        match s {
            "quadratic" | "u^2" => return Ok(ReactionTerm::quadratic()),
            "zero" | "0" => return Ok(ReactionTerm::zero()),
            _ => {}
        }
        if let Some(arg) = s.strip_prefix("linear(").and_then(|r| r.strip_suffix(')')) {
            let c = arg
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad coefficient in `{s}`")))?;
            return Ok(ReactionTerm::linear(c));
        }
        Err(Error::InvalidArgument(format!("unknown reaction term `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearMethod {
    /// `e^{tL} v0 + t phi_1(tL) s` with the source frozen at the start.
    ExpEuler,
    /// Same formula with the source taken at the midpoint of the step.
    #[default]
    ExpMidpoint,
    CrankNicolson,
}

impl LinearMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            LinearMethod::ExpEuler => "exp",
            LinearMethod::ExpMidpoint => "midpoint",
            LinearMethod::CrankNicolson => "cn",
        }
    }
}

impl FromStr for LinearMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<LinearMethod> {
        match s.trim() {
            "exp" | "exp-euler" => Ok(LinearMethod::ExpEuler),
            "midpoint" | "exp-midpoint" => Ok(LinearMethod::ExpMidpoint),
            "cn" | "crank-nicolson" => Ok(LinearMethod::CrankNicolson),
            other => Err(Error::InvalidArgument(format!("unknown linear method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearFlowConfig {
    pub method: LinearMethod,
    pub cn_substeps: usize,
    pub cn_solver: CnSolver,
}

impl Default for LinearFlowConfig {
    fn default() -> Self {
        LinearFlowConfig {
            method: LinearMethod::default(),
            cn_substeps: DEFAULT_CN_SUBSTEPS,
            cn_solver: CnSolver::Direct,
        }
    }
}

impl LinearFlowConfig {
    pub fn with_method(method: LinearMethod) -> Self {
        LinearFlowConfig {
            method,
            ..Default::default()
        }
    }
}

fn check_step(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("step size must be positive, got {tau}")))
    }
}

fn solve_linear<S>(
    cfg: &LinearFlowConfig,
    op: &DirichletLaplacian,
    time_dependent: bool,
    v0: &Field,
    source: S,
    t0: f64,
    tau: f64,
) -> Result<Field>
where
    S: Fn(f64) -> Field,
{
    match cfg.method {
        LinearMethod::ExpEuler => {
            if time_dependent {
                return Err(Error::TimeDependentBoundary);
            }
            op.exp_euler(v0, &source(t0), tau)
        }
        LinearMethod::ExpMidpoint => op.exp_euler(v0, &source(t0 + 0.5 * tau), tau),
        LinearMethod::CrankNicolson => {
            op.crank_nicolson(v0, source, t0, tau, cfg.cn_substeps, cfg.cn_solver)
        }
    }
}

/// Advances `v' = L v + f(z(t)) - dz/dt` over `[t0, t0 + tau]`.
pub fn linear_flow_modified(
    cfg: &LinearFlowConfig,
    op: &DirichletLaplacian,
    lifting: &Lifting,
    f: &ReactionTerm,
    v0: &Field,
    t0: f64,
    tau: f64,
) -> Result<Field> {
    check_step(tau)?;
    let source = |t: f64| {
        let z = lifting.z_at(t);
        let mut s = z.map(|zi| f.eval(zi));
        if lifting.is_time_dependent() {
            s.axpy(-1.0, &lifting.dz_at(t));
        }
        s
    };
    solve_linear(cfg, op, lifting.is_time_dependent(), v0, source, t0, tau)
}

/// Advances `v' = D v` with `v = b(t)` on the boundary over `[t0, t0 + tau]`,
/// via `w = v - z(t)`, `w' = L w - dz/dt`.
pub fn linear_flow_classical(
    cfg: &LinearFlowConfig,
    op: &DirichletLaplacian,
    lifting: &Lifting,
    v0: &Field,
    t0: f64,
    tau: f64,
) -> Result<Field> {
    check_step(tau)?;
    let w0 = v0 - &lifting.z_at(t0);
    let w = if lifting.is_time_dependent() {
        let source = |t: f64| -1.0 * lifting.dz_at(t).as_ref();
        solve_linear(cfg, op, true, &w0, source, t0, tau)?
    } else {
        match cfg.method {
            LinearMethod::CrankNicolson => {
                let zero = Field::zeros(v0.grid());
                op.crank_nicolson(&w0, |_| zero.clone(), t0, tau, cfg.cn_substeps, cfg.cn_solver)?
            }
            _ => op.propagate(&w0, tau)?,
        }
    };
    Ok(&w + &lifting.z_at(t0 + tau))
}

fn pole_check(f: &ReactionTerm, w0: &Field, z: Option<&Field>, t0: f64, tau: f64) -> Result<()> {
    if let Some(exact) = &f.exact {
        for (i, &w) in w0.values().iter().enumerate() {
            let zi = z.map_or(0.0, |z| z.values()[i]);
            if exact(w, zi, tau).is_none() {
                return Err(Error::BlowUp {
                    node: i,
                    value: w + zi,
                    time: t0 + tau,
                });
            }
        }
    }
    Ok(())
}

fn check_finite(w: &Field, time: f64) -> Result<()> {
    match w.first_non_finite() {
        Some(node) => Err(Error::NonFinite { node, time }),
        None => Ok(()),
    }
}

/// Classical fourth-order Runge–Kutta for one scalar `w' = f(w + z(t)) - f(z(t))`
/// where `z` is known at the substep nodes and midpoints: `zs[2k]`,
/// `zs[2k+1]`, `zs[2k+2]` for substep `k`.
fn rk4_scalar<Z>(f: &ReactionTerm, w0: f64, dt: f64, substeps: usize, z_at: Z) -> f64
where
    Z: Fn(usize) -> f64,
{
    let mut w = w0;
    for k in 0..substeps {
        let (z0, zh, z1) = (z_at(2 * k), z_at(2 * k + 1), z_at(2 * k + 2));
        let k1 = f.shifted_rhs(w, z0);
        let k2 = f.shifted_rhs(w + 0.5 * dt * k1, zh);
        let k3 = f.shifted_rhs(w + 0.5 * dt * k2, zh);
        let k4 = f.shifted_rhs(w + dt * k3, z1);
        w += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    w
}

/// Integrates `w' = f(w)` pointwise with `substeps` RK4 steps.
pub fn reaction_flow_classical(
    f: &ReactionTerm,
    w0: &Field,
    tau: f64,
    substeps: usize,
) -> Result<Field> {
    check_step(tau)?;
    if substeps == 0 {
        return Err(Error::InvalidArgument("reaction substeps must be >= 1".into()));
    }
    pole_check(f, w0, None, 0.0, tau)?;
    let dt = tau / substeps as f64;
    let w = w0.map(|w| rk4_scalar(f, w, dt, substeps, |_| 0.0));
    check_finite(&w, tau)?;
    Ok(w)
}

/// The closed-form classical reaction flow, when `f` has one.
pub fn reaction_flow_exact(f: &ReactionTerm, w0: &Field, tau: f64) -> Result<Field> {
    check_step(tau)?;
    let exact = f
        .exact
        .as_ref()
        .ok_or_else(|| Error::NoClosedForm(f.name.clone()))?;
    pole_check(f, w0, None, 0.0, tau)?;
    Ok(w0.map(|w| exact(w, 0.0, tau).expect("pole checked")))
}

/// Integrates `w' = f(w + z(t)) - f(z(t))` pointwise over `[t0, t0 + tau]`
/// with RK4, sampling `z` at the stage times.
pub fn reaction_flow_modified(
    f: &ReactionTerm,
    lifting: &Lifting,
    w0: &Field,
    t0: f64,
    tau: f64,
    substeps: usize,
) -> Result<Field> {
    check_step(tau)?;
    if substeps == 0 {
        return Err(Error::InvalidArgument("reaction substeps must be >= 1".into()));
    }
    let dt = tau / substeps as f64;
    let w = if lifting.is_time_dependent() {
        let zs: Vec<Cow<'_, Field>> = (0..=2 * substeps)
            .map(|j| lifting.z_at(t0 + 0.5 * dt * j as f64))
            .collect();
        let values = w0
            .values()
            .iter()
            .enumerate()
            .map(|(i, &w)| rk4_scalar(f, w, dt, substeps, |j| zs[j].values()[i]))
            .collect();
        Field::from_values(w0.grid(), values)?
    } else {
        let z = lifting.z_at(t0);
        pole_check(f, w0, Some(&z), t0, tau)?;
        w0.zip_map(&z, |w, zi| rk4_scalar(f, w, dt, substeps, |_| zi))
    };
    check_finite(&w, t0 + tau)?;
    Ok(w)
}

/// Closed-form modified reaction flow for time-independent liftings.
pub fn reaction_flow_modified_exact(
    f: &ReactionTerm,
    lifting: &Lifting,
    w0: &Field,
    t0: f64,
    tau: f64,
) -> Result<Field> {
    check_step(tau)?;
    let exact = f
        .exact
        .as_ref()
        .ok_or_else(|| Error::NoClosedForm(f.name.clone()))?;
    if lifting.is_time_dependent() {
        return Err(Error::TimeDependentBoundary);
    }
    let z = lifting.z_at(t0);
    pole_check(f, w0, Some(&z), t0, tau)?;
    Ok(w0.zip_map(&z, |w, zi| exact(w, zi, tau).expect("pole checked")))
}

/// Evaluates the modified reaction field `g(t, w)`; re-exported helper for
/// callers that already hold `z(t)`.
pub fn modified_reaction_field(f: &ReactionTerm, z: &Field, w: &Field) -> Field {
    modified_with(f, z, w)
}
