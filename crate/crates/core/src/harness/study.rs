//! Global convergence and single-step (local error) studies.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flows::{LinearFlowConfig, LinearMethod, DEFAULT_REACTION_SUBSTEPS};
use crate::grid::{Field, Norm};
use crate::splitting::{integrate, integrate_from, step, Problem, Scheme, SchemeConfig};

use super::table::ResultTable;

/// Substeps of the same-scheme reference in single-step studies.
pub const LOCAL_REFERENCE_SUBSTEPS: usize = 100;

/// Reference step `tau_ref` must be at least this factor below the smallest
/// step of a study.
pub const MIN_REFERENCE_FACTOR: f64 = 4.0;

/// How the reference solution of a study is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferencePolicy {
    /// Modified Strang with step `tau`; `None` means a sixteenth of the
    /// smallest study step.
    ModifiedStrang { tau: Option<f64> },
    /// Each scheme is compared with itself at step `tau`.
    PerScheme { tau: f64 },
    /// Each cell is compared with the same scheme using `k` times as many
    /// steps.
    Substep { k: usize },
}

impl ReferencePolicy {
    /// Parses `modstrang[:TAU]`, `same:TAU` or `substep:K`; `auto` gives `None`.
    pub fn parse(s: &str) -> Result<Option<ReferencePolicy>> {
        let s = s.trim();
        if s == "auto" {
            return Ok(None);
        }
        let bad = || Error::InvalidArgument(format!("bad reference policy `{s}`"));
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let tau = |a: Option<&str>| -> Result<f64> {
            let v: f64 = a.ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(bad())
            }
        };
        match kind {
            "modstrang" => Ok(Some(ReferencePolicy::ModifiedStrang {
                tau: arg.map(|a| tau(Some(a))).transpose()?,
            })),
            "same" => Ok(Some(ReferencePolicy::PerScheme { tau: tau(arg)? })),
            "substep" => {
                let k: usize = arg.ok_or_else(bad)?.parse().map_err(|_| bad())?;
                Ok(Some(ReferencePolicy::Substep { k }))
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for ReferencePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReferencePolicy::ModifiedStrang { tau: Some(t) } => write!(f, "modified Strang, tau = {t:e}"),
            ReferencePolicy::ModifiedStrang { tau: None } => write!(f, "modified Strang, tau = min step / 16"),
            ReferencePolicy::PerScheme { tau } => write!(f, "same scheme, tau = {tau:e}"),
            ReferencePolicy::Substep { k } => write!(f, "same scheme, {k} substeps per step"),
        }
    }
}

impl FromStr for ReferencePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<ReferencePolicy> {
        ReferencePolicy::parse(s)?
            .ok_or_else(|| Error::InvalidArgument("`auto` depends on the problem".into()))
    }
}

/// Parses `START:halve:COUNT` (e.g. `2e-2:halve:7`) or a comma-separated list.
pub fn parse_steps(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("bad step list `{s}`"));
    let steps: Vec<f64> = if let Some((start, rest)) = s.split_once(":halve:") {
        let start: f64 = start.trim().parse().map_err(|_| bad())?;
        let count: usize = rest.trim().parse().map_err(|_| bad())?;
        (0..count).map(|i| start / 2f64.powi(i as i32)).collect()
    } else {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if steps.is_empty() || steps.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(bad());
    }
    Ok(steps)
}

/// Number of steps of size `tau` in `[0, t_final]`, if it is whole.
pub fn whole_steps(t_final: f64, tau: f64) -> Option<usize> {
    let n = t_final / tau;
    let rounded = n.round();
    (rounded >= 1.0 && (n - rounded).abs() <= 1e-9 * rounded).then_some(rounded as usize)
}

/// Everything a convergence or local-error study needs.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub problem: Problem,
    pub schemes: Vec<Scheme>,
    pub steps: Vec<f64>,
    pub norms: Vec<Norm>,
    pub reference: ReferencePolicy,
    pub linear: LinearFlowConfig,
    pub reaction_substeps: usize,
    pub exact_reaction: bool,
    /// Reaction-first Strang and diffusion-first Lie.
    pub reversed: bool,
}

impl ExperimentSpec {
    /// All four schemes in the inf norm, midpoint linear flows, RK4 reaction.
    pub fn new(problem: Problem, steps: Vec<f64>, reference: ReferencePolicy) -> ExperimentSpec {
        ExperimentSpec {
            problem,
            schemes: Scheme::ALL.to_vec(),
            steps,
            norms: vec![Norm::Inf],
            reference,
            linear: LinearFlowConfig::default(),
            reaction_substeps: DEFAULT_REACTION_SUBSTEPS,
            exact_reaction: false,
            reversed: false,
        }
    }

    pub fn config(&self, scheme: Scheme) -> SchemeConfig {
        SchemeConfig {
            scheme,
            linear: self.linear,
            reaction_substeps: self.reaction_substeps,
            exact_reaction: self.exact_reaction,
            reversed: self.reversed,
        }
    }

    fn validate_common(&self) -> Result<()> {
        if self.steps.is_empty() {
            return Err(Error::InvalidArgument("no step sizes".into()));
        }
        if self.norms.is_empty() {
            return Err(Error::InvalidArgument("no norms".into()));
        }
        if self.reaction_substeps == 0 || self.linear.cn_substeps == 0 {
            return Err(Error::InvalidArgument("substep counts must be >= 1".into()));
        }
        if self.linear.method == LinearMethod::ExpEuler && self.problem.lifting.is_time_dependent() {
            return Err(Error::TimeDependentBoundary);
        }
        Ok(())
    }

    fn min_step(&self) -> f64 {
        self.steps.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn reference_tau(&self) -> Option<f64> {
        match self.reference {
            ReferencePolicy::ModifiedStrang { tau } => Some(tau.unwrap_or(self.min_step() / 16.0)),
            ReferencePolicy::PerScheme { tau } => Some(tau),
            ReferencePolicy::Substep { .. } => None,
        }
    }

    fn validate_global(&self) -> Result<()> {
        self.validate_common()?;
        let t_final = self.problem.t_final;
        for &tau in &self.steps {
            if whole_steps(t_final, tau).is_none() {
                return Err(Error::InvalidArgument(format!(
                    "step size {tau} does not divide the final time {t_final}"
                )));
            }
        }
        match self.reference {
            ReferencePolicy::Substep { k } => {
                if (k as f64) < MIN_REFERENCE_FACTOR {
                    return Err(Error::InvalidArgument(format!(
                        "reference needs at least {MIN_REFERENCE_FACTOR} substeps, got {k}"
                    )));
                }
            }
            _ => {
                let tau_ref = self.reference_tau().expect("step-size policy");
                if tau_ref * MIN_REFERENCE_FACTOR > self.min_step() * (1.0 + 1e-12) {
                    return Err(Error::InvalidArgument(format!(
                        "reference step {tau_ref} must be at most a quarter of the smallest step {}",
                        self.min_step()
                    )));
                }
                if whole_steps(t_final, tau_ref).is_none() {
                    return Err(Error::InvalidArgument(format!(
                        "reference step {tau_ref} does not divide the final time {t_final}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn metadata(&self, scheme: Scheme, kind: &str, reference: String) -> Vec<(String, String)> {
        let p = &self.problem;
        let linear = match self.linear.method {
            LinearMethod::CrankNicolson => format!("Crank-Nicolson, {} substeps", self.linear.cn_substeps),
            LinearMethod::ExpEuler => "exponential Euler (sine modes)".to_string(),
            LinearMethod::ExpMidpoint => "exponential midpoint (sine modes)".to_string(),
        };
        let reaction = if self.exact_reaction {
            "closed form".to_string()
        } else {
            format!("RK4, {} substeps", self.reaction_substeps)
        };
        let mut meta = vec![
            ("study".into(), kind.to_string()),
            ("scheme".into(), scheme.label().to_string()),
            ("problem".into(), p.name.clone()),
            ("grid".into(), p.grid.to_string()),
            ("t_final".into(), p.t_final.to_string()),
            ("reaction".into(), format!("{} ({reaction})", p.f.name())),
            ("linear flow".into(), linear),
            ("reference".into(), reference),
        ];
        if p.bd.has_numeric_rate() {
            meta.push(("boundary rate".into(), "centred difference".into()));
        }
        meta
    }
}

fn errors_in(norms: &[Norm], u: &Field, reference: &Field) -> Vec<f64> {
    let diff = u - reference;
    norms.iter().map(|&n| diff.norm(n)).collect()
}

/// One table per scheme with the errors at the final time.
pub fn run_convergence(spec: &ExperimentSpec) -> Result<Vec<ResultTable>> {
    spec.validate_global()?;
    let prob = &spec.problem;
    let t_final = prob.t_final;

    // references first, one per policy target
    let ref_schemes: Vec<Scheme> = match spec.reference {
        ReferencePolicy::ModifiedStrang { .. } => vec![Scheme::STRANG_MODIFIED],
        ReferencePolicy::PerScheme { .. } => spec.schemes.clone(),
        ReferencePolicy::Substep { .. } => Vec::new(),
    };
    let references: Vec<std::result::Result<Field, String>> = ref_schemes
        .par_iter()
        .map(|&s| {
            let n = whole_steps(t_final, spec.reference_tau().expect("step-size policy")).expect("validated");
            integrate(&spec.config(s), prob, n).map_err(|e| format!("reference: {e}"))
        })
        .collect();
    let reference_for = |i: usize| match spec.reference {
        ReferencePolicy::ModifiedStrang { .. } => Some(&references[0]),
        ReferencePolicy::PerScheme { .. } => Some(&references[i]),
        ReferencePolicy::Substep { .. } => None,
    };

    let cells: Vec<(usize, f64)> = (0..spec.schemes.len())
        .flat_map(|i| spec.steps.iter().map(move |&tau| (i, tau)))
        .collect();
    let results: Vec<(std::result::Result<Vec<f64>, String>, f64)> = cells
        .par_iter()
        .map(|&(i, tau)| {
            let start = Instant::now();
            let cfg = spec.config(spec.schemes[i]);
            let n = whole_steps(t_final, tau).expect("validated");
            let cell = (|| {
                let u = integrate(&cfg, prob, n).map_err(|e| e.to_string())?;
                let reference = match reference_for(i) {
                    Some(r) => r.clone()?,
                    None => {
                        let ReferencePolicy::Substep { k } = spec.reference else { unreachable!() };
                        integrate(&cfg, prob, n * k).map_err(|e| format!("reference: {e}"))?
                    }
                };
                Ok(errors_in(&spec.norms, &u, &reference))
            })();
            (cell, start.elapsed().as_secs_f64())
        })
        .collect();

    Ok(assemble(spec, "global error", results, spec.reference.to_string()))
}

/// Errors after a single step from `u0`, against a finer reference started
/// from the same data. `Substep { k }` uses `k` steps of the same scheme;
/// the step-size policies use steps of (at most) the given size.
pub fn run_local_error(spec: &ExperimentSpec) -> Result<Vec<ResultTable>> {
    spec.validate_common()?;
    let prob = &spec.problem;
    let cells: Vec<(usize, f64)> = (0..spec.schemes.len())
        .flat_map(|i| spec.steps.iter().map(move |&tau| (i, tau)))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(i, tau)| {
            let start = Instant::now();
            let cfg = spec.config(spec.schemes[i]);
            let (ref_cfg, k) = match spec.reference {
                ReferencePolicy::Substep { k } => (cfg, k),
                ReferencePolicy::PerScheme { tau: r } => (cfg, (tau / r).ceil() as usize),
                ReferencePolicy::ModifiedStrang { tau: r } => (
                    spec.config(Scheme::STRANG_MODIFIED),
                    r.map_or(LOCAL_REFERENCE_SUBSTEPS, |r| (tau / r).ceil() as usize),
                ),
            };
            let cell = (|| {
                let u = step(&cfg, prob, &prob.u0, 0.0, tau).map_err(|e| e.to_string())?;
                let reference = integrate_from(&ref_cfg, prob, &prob.u0, 0.0, tau, k.max(1))
                    .map_err(|e| format!("reference: {e}"))?;
                Ok(errors_in(&spec.norms, &u, &reference))
            })();
            (cell, start.elapsed().as_secs_f64())
        })
        .collect();
    Ok(assemble(spec, "local error (one step)", results, spec.reference.to_string()))
}

fn assemble(
    spec: &ExperimentSpec,
    kind: &str,
    mut results: Vec<(std::result::Result<Vec<f64>, String>, f64)>,
    reference: String,
) -> Vec<ResultTable> {
    let per_scheme = spec.steps.len();
    spec.schemes
        .iter()
        .map(|&scheme| {
            let rest = results.split_off(per_scheme);
            let chunk = std::mem::replace(&mut results, rest);
            let wall: f64 = chunk.iter().map(|(_, t)| t).sum();
            let cells = chunk.into_iter().map(|(c, _)| c).collect();
            let mut table = ResultTable::from_cells(scheme.tag(), scheme.label(), &spec.norms, &spec.steps, cells);
            table.metadata = spec.metadata(scheme, kind, reference.clone());
            table.metadata.push(("wall time".into(), format!("{wall:.3} s")));
            table
        })
        .collect()
}
