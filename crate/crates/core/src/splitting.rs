//! Lie and Strang splitting, classical and boundary-corrected.
//!
//! The classical schemes alternate `u' = f(u)` with `u' = D u`, `u = b(t)` on
//! the boundary. The modified schemes work on `u - z(t)` instead, with the
//! reaction `f(w + z) - f(z)` and the linear source `f(z) - dz/dt`, so both
//! partial flows see homogeneous boundary values.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::flows::{
    linear_flow_classical, linear_flow_modified, reaction_flow_classical, reaction_flow_exact,
    reaction_flow_modified, reaction_flow_modified_exact, LinearFlowConfig, ReactionTerm,
    DEFAULT_REACTION_SUBSTEPS,
};
use crate::grid::{Field, Grid};
use crate::lifting::{BoundaryData, Lifting};
use crate::operators::DirichletLaplacian;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Splitting {
    Lie,
    Strang,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Classical,
    Modified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scheme {
    pub splitting: Splitting,
    pub variant: Variant,
}

impl Scheme {
    pub const LIE: Scheme = Scheme::new(Splitting::Lie, Variant::Classical);
    pub const LIE_MODIFIED: Scheme = Scheme::new(Splitting::Lie, Variant::Modified);
    pub const STRANG: Scheme = Scheme::new(Splitting::Strang, Variant::Classical);
    pub const STRANG_MODIFIED: Scheme = Scheme::new(Splitting::Strang, Variant::Modified);
    pub const ALL: [Scheme; 4] = [
        Scheme::LIE,
        Scheme::LIE_MODIFIED,
        Scheme::STRANG,
        Scheme::STRANG_MODIFIED,
    ];

    pub const fn new(splitting: Splitting, variant: Variant) -> Scheme {
        Scheme { splitting, variant }
    }

    pub fn is_modified(&self) -> bool {
        self.variant == Variant::Modified
    }

    /// Command-line name: `lie`, `lie-mod`, `strang`, `strang-mod`.
    pub fn tag(&self) -> &'static str {
        match (self.splitting, self.variant) {
            (Splitting::Lie, Variant::Classical) => "lie",
            (Splitting::Lie, Variant::Modified) => "lie-mod",
            (Splitting::Strang, Variant::Classical) => "strang",
            (Splitting::Strang, Variant::Modified) => "strang-mod",
        }
    }

    pub fn label(&self) -> &'static str {
        match (self.splitting, self.variant) {
            (Splitting::Lie, Variant::Classical) => "Lie",
            (Splitting::Lie, Variant::Modified) => "Lie (modified)",
            (Splitting::Strang, Variant::Classical) => "Strang",
            (Splitting::Strang, Variant::Modified) => "Strang (modified)",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Scheme> {
        let key = s.trim().to_ascii_lowercase();
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.tag() == key || sc.label().to_ascii_lowercase() == key)
            .or(match key.as_str() {
                "lie-modified" => Some(Scheme::LIE_MODIFIED),
                "strang-modified" => Some(Scheme::STRANG_MODIFIED),
                _ => None,
            })
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scheme `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub linear: LinearFlowConfig,
    pub reaction_substeps: usize,
    /// Use the closed-form reaction flow instead of RK4 (time-independent
    /// lifting only for the modified schemes).
    pub exact_reaction: bool,
    /// Diffusion first for Lie, reaction halves around a full linear step for
    /// Strang.
    pub reversed: bool,
}

impl SchemeConfig {
    pub fn new(scheme: Scheme) -> SchemeConfig {
        SchemeConfig {
            scheme,
            linear: LinearFlowConfig::default(),
            reaction_substeps: DEFAULT_REACTION_SUBSTEPS,
            exact_reaction: false,
            reversed: false,
        }
    }

    pub fn with_linear(mut self, linear: LinearFlowConfig) -> SchemeConfig {
        self.linear = linear;
        self
    }

    pub fn with_reaction_substeps(mut self, substeps: usize) -> SchemeConfig {
        self.reaction_substeps = substeps;
        self
    }
}

/// `u' = D u + f(u)` on the unit interval or square with `u = b(t)` on the
/// boundary and `u(0) = u0`.
#[derive(Debug, Clone)]
pub struct Problem {
    pub name: String,
    pub grid: Grid,
    pub op: DirichletLaplacian,
    pub f: ReactionTerm,
    pub bd: BoundaryData,
    pub lifting: Lifting,
    pub u0: Field,
    pub t_final: f64,
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        grid: &Grid,
        f: ReactionTerm,
        bd: BoundaryData,
        u0: Field,
        t_final: f64,
    ) -> Result<Problem> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::InvalidArgument(format!("final time must be positive, got {t_final}")));
        }
        grid.check(u0.grid())?;
        let lifting = Lifting::new(grid, &bd)?;
        Ok(Problem {
            name: name.into(),
            grid: *grid,
            op: DirichletLaplacian::new(grid),
            f,
            bd,
            lifting,
            u0,
            t_final,
        })
    }

    /// Replaces the Laplacian, e.g. with the scalar test hook.
    pub fn with_operator(mut self, op: DirichletLaplacian) -> Result<Problem> {
        self.grid.check(op.grid())?;
        self.op = op;
        Ok(self)
    }

    /// Largest mismatch between `b(0)` and `u0` linearly extrapolated to the
    /// boundary nodes. Large values mean incompatible initial data.
    pub fn compatibility_residual(&self) -> f64 {
        let g = &self.grid;
        let n = g.n();
        if n < 2 {
            return 0.0;
        }
        let u = self.u0.values();
        let h = g.h();
        let b = |p: &[f64]| self.bd.value(0.0, p);
        if g.dim() == 1 {
            let left = (2.0 * u[0] - u[1] - b(&[0.0])).abs();
            let right = (2.0 * u[n - 1] - u[n - 2] - b(&[1.0])).abs();
            return left.max(right);
        }
        let mut worst = 0.0f64;
        for k in 0..n {
            let s = (k + 1) as f64 * h;
            let pairs = [
                (u[k * n], u[k * n + 1], [0.0, s]),
                (u[k * n + n - 1], u[k * n + n - 2], [1.0, s]),
                (u[k], u[n + k], [s, 0.0]),
                (u[(n - 1) * n + k], u[(n - 2) * n + k], [s, 1.0]),
            ];
            for (near, far, p) in pairs {
                worst = worst.max((2.0 * near - far - b(&p)).abs());
            }
        }
        worst
    }
}

fn reaction_classical(cfg: &SchemeConfig, prob: &Problem, u: &Field, tau: f64) -> Result<Field> {
    if cfg.exact_reaction {
        reaction_flow_exact(&prob.f, u, tau)
    } else {
        reaction_flow_classical(&prob.f, u, tau, cfg.reaction_substeps)
    }
}

fn reaction_modified(
    cfg: &SchemeConfig,
    prob: &Problem,
    w: &Field,
    t0: f64,
    tau: f64,
) -> Result<Field> {
    if cfg.exact_reaction {
        reaction_flow_modified_exact(&prob.f, &prob.lifting, w, t0, tau)
    } else {
        reaction_flow_modified(&prob.f, &prob.lifting, w, t0, tau, cfg.reaction_substeps)
    }
}

fn linear_classical(cfg: &SchemeConfig, prob: &Problem, u: &Field, t0: f64, tau: f64) -> Result<Field> {
    linear_flow_classical(&cfg.linear, &prob.op, &prob.lifting, u, t0, tau)
}

fn linear_modified(cfg: &SchemeConfig, prob: &Problem, v: &Field, t0: f64, tau: f64) -> Result<Field> {
    linear_flow_modified(&cfg.linear, &prob.op, &prob.lifting, &prob.f, v, t0, tau)
}

pub fn step_classical_lie(
    cfg: &SchemeConfig,
    prob: &Problem,
    u_n: &Field,
    t_n: f64,
    tau: f64,
) -> Result<Field> {
    if cfg.reversed {
        let v = linear_classical(cfg, prob, u_n, t_n, tau)?;
        reaction_classical(cfg, prob, &v, tau)
    } else {
        let w = reaction_classical(cfg, prob, u_n, tau)?;
        linear_classical(cfg, prob, &w, t_n, tau)
    }
}

pub fn step_classical_strang(
    cfg: &SchemeConfig,
    prob: &Problem,
    u_n: &Field,
    t_n: f64,
    tau: f64,
) -> Result<Field> {
    let half = 0.5 * tau;
    if cfg.reversed {
        let w = reaction_classical(cfg, prob, u_n, half)?;
        let v = linear_classical(cfg, prob, &w, t_n, tau)?;
        reaction_classical(cfg, prob, &v, half)
    } else {
        let v = linear_classical(cfg, prob, u_n, t_n, half)?;
        let w = reaction_classical(cfg, prob, &v, tau)?;
        linear_classical(cfg, prob, &w, t_n + half, half)
    }
}

pub fn step_modified_lie(
    cfg: &SchemeConfig,
    prob: &Problem,
    u_n: &Field,
    t_n: f64,
    tau: f64,
) -> Result<Field> {
    let z = &prob.lifting;
    let w0 = u_n - &z.z_at(t_n);
    let v = if cfg.reversed {
        let v = linear_modified(cfg, prob, &w0, t_n, tau)?;
        reaction_modified(cfg, prob, &v, t_n, tau)?
    } else {
        let w = reaction_modified(cfg, prob, &w0, t_n, tau)?;
        linear_modified(cfg, prob, &w, t_n, tau)?
    };
    Ok(&v + &z.z_at(t_n + tau))
}

pub fn step_modified_strang(
    cfg: &SchemeConfig,
    prob: &Problem,
    u_n: &Field,
    t_n: f64,
    tau: f64,
) -> Result<Field> {
    let z = &prob.lifting;
    let half = 0.5 * tau;
    let v0 = u_n - &z.z_at(t_n);
    let v = if cfg.reversed {
        let w = reaction_modified(cfg, prob, &v0, t_n, half)?;
        let v = linear_modified(cfg, prob, &w, t_n, tau)?;
        reaction_modified(cfg, prob, &v, t_n + half, half)?
    } else {
        let v = linear_modified(cfg, prob, &v0, t_n, half)?;
        let w = reaction_modified(cfg, prob, &v, t_n, tau)?;
        linear_modified(cfg, prob, &w, t_n + half, half)?
    };
    Ok(&v + &z.z_at(t_n + tau))
}

/// One step of the configured scheme from `u_n` at `t_n`.
pub fn step(cfg: &SchemeConfig, prob: &Problem, u_n: &Field, t_n: f64, tau: f64) -> Result<Field> {
    match (cfg.scheme.splitting, cfg.scheme.variant) {
        (Splitting::Lie, Variant::Classical) => step_classical_lie(cfg, prob, u_n, t_n, tau),
        (Splitting::Lie, Variant::Modified) => step_modified_lie(cfg, prob, u_n, t_n, tau),
        (Splitting::Strang, Variant::Classical) => step_classical_strang(cfg, prob, u_n, t_n, tau),
        (Splitting::Strang, Variant::Modified) => step_modified_strang(cfg, prob, u_n, t_n, tau),
    }
}

/// `n_steps` steps of size `T / n_steps` from `u0`.
pub fn integrate(cfg: &SchemeConfig, prob: &Problem, n_steps: usize) -> Result<Field> {
    integrate_from(cfg, prob, &prob.u0, 0.0, prob.t_final, n_steps)
}

/// `n_steps` equal steps covering `[t0, t1]` from `u`.
pub fn integrate_from(
    cfg: &SchemeConfig,
    prob: &Problem,
    u: &Field,
    t0: f64,
    t1: f64,
    n_steps: usize,
) -> Result<Field> {
    if n_steps == 0 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    let tau = (t1 - t0) / n_steps as f64;
    let mut u = u.clone();
    for k in 0..n_steps {
        let t = t0 + k as f64 * tau;
        u = step(cfg, prob, &u, t, tau).map_err(|e| e.at_step(k, t))?;
    }
    Ok(u)
}
