//! Plain-text problem files.
//!
//! One `key = value` per line, `#` starts a comment:
//!
//! ```text
//! name = bump
//! dim = 1
//! n = 199
//! t_final = 0.1
//! reaction = quadratic          # quadratic | zero | linear(c)
//! initial = sin2(1, 1)
//! boundary = initial            # or an expression
//! boundary_right = harmonic_time(1, 1, 62.83)   # 1D only, overrides one end
//! reference = same:5e-5         # optional, as on the command line
//! ```
//!
//! Expressions come from a fixed catalog; arguments are numbers:
//!
//! | expression | value |
//! |---|---|
//! | `const(c)` | `c` |
//! | `affine(a, bx, by)` | `a + bx x + by y` (`by` optional) |
//! | `sin2(a, amp)` | `a + amp sin^2(pi x) [sin^2(pi y)]` |
//! | `harmonic_time(a, amp, omega)` | `a + amp sin(omega t)` |
//! | `ridges(base, amp)` | the three-Gaussian field, `base + amp (g1 + g2 - g3)` |

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::flows::ReactionTerm;
use crate::grid::{eval_on_grid, make_grid};
use crate::lifting::{BoundaryData, BoundaryFn};
use crate::splitting::Problem;

use super::problems::ridge_bumps;
use super::study::ReferencePolicy;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expr {
    Const(f64),
    Affine { a: f64, bx: f64, by: f64 },
    Sin2 { a: f64, amp: f64 },
    HarmonicTime { a: f64, amp: f64, omega: f64 },
    Ridges { base: f64, amp: f64 },
}

impl Expr {
    pub fn parse(s: &str) -> std::result::Result<Expr, String> {
        let s = s.trim();
        let (name, args) = match s.split_once('(') {
            Some((name, rest)) => {
                let inner = rest
                    .trim_end()
                    .strip_suffix(')')
                    .ok_or_else(|| format!("missing `)` in `{s}`"))?;
                let args = if inner.trim().is_empty() {
                    Vec::new()
                } else {
                    inner
                        .split(',')
                        .map(|a| a.trim().parse::<f64>().map_err(|_| format!("bad number `{}`", a.trim())))
                        .collect::<std::result::Result<Vec<_>, _>>()?
                };
                (name.trim(), args)
            }
            None => (s, Vec::new()),
        };
        let arity = |lo: usize, hi: usize| {
            if (lo..=hi).contains(&args.len()) {
                Ok(())
            } else {
                Err(format!("`{name}` takes {lo}..={hi} arguments, got {}", args.len()))
            }
        };
        match name {
            "const" => {
                arity(1, 1)?;
                Ok(Expr::Const(args[0]))
            }
            "affine" => {
                arity(2, 3)?;
                Ok(Expr::Affine {
                    a: args[0],
                    bx: args[1],
                    by: args.get(2).copied().unwrap_or(0.0),
                })
            }
            "sin2" => {
                arity(2, 2)?;
                Ok(Expr::Sin2 { a: args[0], amp: args[1] })
            }
            "harmonic_time" => {
                arity(3, 3)?;
                Ok(Expr::HarmonicTime {
                    a: args[0],
                    amp: args[1],
                    omega: args[2],
                })
            }
            "ridges" => {
                arity(0, 2)?;
                Ok(Expr::Ridges {
                    base: args.first().copied().unwrap_or(0.5),
                    amp: args.get(1).copied().unwrap_or(2.0),
                })
            }
            other => Err(format!("unknown expression `{other}`")),
        }
    }

    pub fn is_time_dependent(&self) -> bool {
        matches!(self, Expr::HarmonicTime { amp, omega, .. } if *amp != 0.0 && *omega != 0.0)
    }

    pub fn eval(&self, t: f64, p: &[f64]) -> f64 {
        match *self {
            Expr::Const(c) => c,
            Expr::Affine { a, bx, by } => a + bx * p[0] + by * p.get(1).copied().unwrap_or(0.0),
            Expr::Sin2 { a, amp } => a + amp * p.iter().map(|x| (PI * x).sin().powi(2)).product::<f64>(),
            Expr::HarmonicTime { a, amp, omega } => a + amp * (omega * t).sin(),
            Expr::Ridges { base, amp } => {
                let y = p.get(1).copied().unwrap_or(0.5);
                base + amp * ridge_bumps(p[0], y)
            }
        }
    }

    pub fn rate(&self, t: f64, _p: &[f64]) -> f64 {
        match *self {
            Expr::HarmonicTime { amp, omega, .. } => amp * omega * (omega * t).cos(),
            _ => 0.0,
        }
    }
}

/// A parsed problem file.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub name: String,
    pub dim: usize,
    pub n: Option<usize>,
    pub t_final: f64,
    pub reaction: String,
    pub initial: Expr,
    /// `None` means "the initial value restricted to the boundary".
    pub boundary: Option<Expr>,
    pub boundary_left: Option<Expr>,
    pub boundary_right: Option<Expr>,
    pub reference: Option<ReferencePolicy>,
}

impl ProblemConfig {
    pub fn parse(text: &str) -> Result<ProblemConfig> {
        let mut name = "custom".to_string();
        let mut dim = None;
        let mut n = None;
        let mut t_final = 0.1;
        let mut reaction = "quadratic".to_string();
        let mut initial = None;
        let mut boundary = None;
        let mut boundary_left = None;
        let mut boundary_right = None;
        let mut reference = None;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| Error::Config { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let expr = |v: &str| Expr::parse(v).map_err(&err);
            match key {
                "name" => name = value.to_string(),
                "dim" => {
                    dim = Some(match value {
                        "1" => 1,
                        "2" => 2,
                        _ => return Err(err(format!("dim must be 1 or 2, got `{value}`"))),
                    })
                }
                "n" => {
                    n = Some(
                        value
                            .parse::<usize>()
                            .ok()
                            .filter(|&v| v > 0)
                            .ok_or_else(|| err(format!("n must be a positive integer, got `{value}`")))?,
                    )
                }
                "t_final" => {
                    t_final = value
                        .parse::<f64>()
                        .ok()
                        .filter(|v| *v > 0.0 && v.is_finite())
                        .ok_or_else(|| err(format!("t_final must be positive, got `{value}`")))?
                }
                "reaction" => {
                    value.parse::<ReactionTerm>().map_err(|e| err(e.to_string()))?;
                    reaction = value.to_string();
                }
                "initial" => initial = Some(expr(value)?),
                "boundary" => boundary = if value == "initial" { None } else { Some(expr(value)?) },
                "boundary_left" => boundary_left = Some(expr(value)?),
                "boundary_right" => boundary_right = Some(expr(value)?),
                "reference" => {
                    reference = ReferencePolicy::parse(value).map_err(|e| err(e.to_string()))?
                }
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }

        let missing = |what: &str| Error::Config {
            line: 0,
            message: format!("missing `{what}`"),
        };
        let dim = dim.ok_or_else(|| missing("dim"))?;
        let initial = initial.ok_or_else(|| missing("initial"))?;
        if dim == 2 && (boundary_left.is_some() || boundary_right.is_some()) {
            return Err(Error::Config {
                line: 0,
                message: "boundary_left/boundary_right apply to 1D problems only".into(),
            });
        }
        if initial.is_time_dependent() {
            return Err(Error::Config {
                line: 0,
                message: "the initial value cannot depend on time".into(),
            });
        }
        Ok(ProblemConfig {
            name,
            dim,
            n,
            t_final,
            reaction,
            initial,
            boundary,
            boundary_left,
            boundary_right,
            reference,
        })
    }

    fn boundary_data(&self) -> BoundaryData {
        let whole = self.boundary.unwrap_or(self.initial);
        let left = self.boundary_left.unwrap_or(whole);
        let right = self.boundary_right.unwrap_or(whole);
        let time_dependent = left.is_time_dependent() || right.is_time_dependent();
        if !time_dependent {
            return BoundaryData::time_independent(self.dim, move |p| {
                if p[0] == 1.0 { right.eval(0.0, p) } else { left.eval(0.0, p) }
            });
        }
        // left covers every side except x = 1, which only exists in 1D here
        let value: BoundaryFn = Arc::new(move |t, p| if p[0] == 1.0 { right.eval(t, p) } else { left.eval(t, p) });
        let rate: BoundaryFn = Arc::new(move |t, p| if p[0] == 1.0 { right.rate(t, p) } else { left.rate(t, p) });
        BoundaryData::new(self.dim, value, Some(rate), true)
    }

    /// Builds the problem; `n` overrides the file's grid size.
    pub fn build(&self, n: Option<usize>) -> Result<Problem> {
        let default_n = if self.dim == 2 { 99 } else { 499 };
        let grid = make_grid(self.dim, n.or(self.n).unwrap_or(default_n))?;
        let initial = self.initial;
        let u0 = eval_on_grid(move |p| initial.eval(0.0, p), &grid);
        let f: ReactionTerm = self.reaction.parse()?;
        Problem::new(self.name.clone(), &grid, f, self.boundary_data(), u0, self.t_final)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::problems::ridges;
    use crate::harness::problems::{builtin_problem, ProblemId};

    #[test]
    fn expressions() {
        assert_eq!(Expr::parse("const(2.5)").unwrap().eval(0.3, &[0.1]), 2.5);
        let aff = Expr::parse("affine(0.5, 0.5)").unwrap();
        assert_eq!(aff.eval(0.0, &[0.5]), 0.75);
        let aff2 = Expr::parse("affine(1, 2, 3)").unwrap();
        assert_eq!(aff2.eval(0.0, &[0.5, 0.25]), 2.75);
        let s = Expr::parse("sin2(1, 1)").unwrap();
        assert!((s.eval(0.0, &[0.5]) - 2.0).abs() < 1e-15);
        let h = Expr::parse("harmonic_time(1, 1, 5)").unwrap();
        assert!(h.is_time_dependent());
        assert!((h.rate(0.2, &[0.0]) - 5.0 * 1.0f64.cos()).abs() < 1e-15);
        assert_eq!(Expr::parse("ridges()").unwrap().eval(0.0, &[0.3, 0.6]), ridges(0.3, 0.6));
        for bad in ["const()", "sin2(1)", "wave(1)", "const(1", "const(x)"] {
            assert!(Expr::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn file_reproducing_p3() {
        let text = "\
# mixed boundary example
name = mixed
dim = 1
n = 31
t_final = 0.1
reaction = quadratic
initial = affine(0.5, 0.5)
boundary_left = const(0.5)
boundary_right = harmonic_time(1, 1, 62.83185307179586)
";
        let cfg = ProblemConfig::parse(text).unwrap();
        let p = cfg.build(None).unwrap();
        let q = builtin_problem(ProblemId::P3, Some(31)).unwrap();
        assert_eq!(p.name, "mixed");
        assert_eq!(p.u0, q.u0);
        for t in [0.0, 0.013, 0.07] {
            assert_eq!(p.lifting.z_at(t).values(), q.lifting.z_at(t).values());
            let a = p.lifting.dz_at(t);
            let b = q.lifting.dz_at(t);
            assert!(a.max_abs_diff(&b) < 1e-9);
        }
    }

    #[test]
    fn boundary_from_initial_in_2d() {
        let text = "dim = 2\nn = 9\ninitial = ridges(0.5, 2)\nboundary = initial\nreference = modstrang:1e-4\n";
        let cfg = ProblemConfig::parse(text).unwrap();
        assert_eq!(cfg.reference, Some(ReferencePolicy::ModifiedStrang { tau: Some(1e-4) }));
        let p = cfg.build(None).unwrap();
        let q = builtin_problem(ProblemId::P5, Some(9)).unwrap();
        assert_eq!(p.u0, q.u0);
        assert!(p.lifting.z_at(0.0).max_abs_diff(&q.lifting.z_at(0.0)) < 1e-14);
        assert_eq!(cfg.build(Some(5)).unwrap().grid.n(), 5);
    }

    #[test]
    fn errors_name_the_line() {
        let e = ProblemConfig::parse("dim = 1\ninitial = const(1)\nfoo = 3\n").unwrap_err();
        assert_eq!(e, Error::Config { line: 3, message: "unknown key `foo`".into() });
        let e = ProblemConfig::parse("dim = 3\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 1, .. }));
        assert!(ProblemConfig::parse("dim = 1\n").is_err());
        assert!(ProblemConfig::parse("dim = 1\ninitial = harmonic_time(1,1,1)\n").is_err());
        assert!(ProblemConfig::parse("dim = 1\ninitial = const(1)\nreaction = cubic\n").is_err());
        assert!(ProblemConfig::parse("dim = 2\ninitial = const(1)\nboundary_left = const(1)\n").is_err());
    }
}
