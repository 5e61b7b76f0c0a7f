//! Command-line front end: one JSON object on stdout per invocation.
//!
//! Exit codes: 0 on success, 1 when the input is well-formed but rejected by
//! the mathematics (unbounded, empty interior, singular head, failed
//! verification), 2 for unreadable input or bad usage.

use std::fs;
use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::center::{center_closed_form, center_newton, cross_check_center, CenterResult, SolverConfig};
use crate::construct::{enumerate_vertices, make_equal_gamma_simplex, random_bounded_simplex, GeneratorConfig};
use crate::error::Error;
use crate::gamma::{check_bounded, compute_gamma, evaluate_invariant, Boundedness, Warning};
use crate::io::{parse_simplex_doc, to_json_string, SimplexDoc};
use crate::probe::{harmonic_point_on_line, last_facet_distance, probe_line};
use crate::simplex::{Point, Simplex};
use crate::verify::verify_simplex;

#[derive(Debug, Parser)]
#[command(name = "harmonic-simplex", version, about = "Harmonic center of an n-simplex given as A x <= b")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Input {
    /// Simplex JSON file, or "-" for standard input
    #[arg(default_value = "-")]
    pub input: String,
}

#[derive(Debug, Args)]
pub struct Line {
    /// Base point as comma-separated coordinates (default: vertex average)
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Line direction as comma-separated components; normalized before use
    #[arg(long, allow_hyphen_values = true, conflicts_with = "axis")]
    pub direction: Option<String>,
    /// Coordinate axis (1-based) to use as the direction
    #[arg(long)]
    pub axis: Option<usize>,
}

#[derive(Debug, Args)]
pub struct Solver {
    /// Relative tolerance on the center residual relation
    #[arg(long)]
    pub tol: Option<f64>,
    /// Newton iteration cap
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
}

impl Solver {
    fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::default();
        if let Some(tol) = self.tol {
            cfg.eq24_tol = tol;
        }
        if let Some(cap) = self.max_iter {
            cfg.max_iterations = cap;
        }
        cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    ClosedForm,
    Newton,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize rows and echo the simplex
    Normalize(Input),
    /// Row multipliers, b0 and the invariant constant
    Gamma(Input),
    /// Boundedness certificate (exit 1 with a witness when unbounded)
    CheckBounded(Input),
    /// Harmonic center
    Center {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
        #[command(flatten)]
        solver: Solver,
    },
    /// Value of the invariant residual expression at a point or random points
    Invariant {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Evaluate at this many random interior points and report the spread
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Signed facet distances along a line
    Probe {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        line: Line,
    },
    /// Harmonic point of a line
    HarmonicPoint {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        line: Line,
    },
    /// Vertex i solves every row except row i
    Vertices(Input),
    /// Random bounded simplex
    Generate {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Equal-multiplier simplex from the first n rows of the input
    EqualGamma {
        #[command(flatten)]
        input: Input,
        /// Right-hand side of the new last row (default: the input's b_{n+1})
        #[arg(long = "last-b", allow_hyphen_values = true)]
        last_b: Option<f64>,
    },
    /// Run every identity check on one simplex
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        solver: Solver,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: Option<String>,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Outcome {
            exit_code: 0,
            stdout: to_json_string(&value),
            stderr: None,
        }
    }

    fn with_code(exit_code: i32, value: Value) -> Self {
        Outcome {
            exit_code,
            stdout: to_json_string(&value),
            stderr: None,
        }
    }

    fn usage(detail: impl Into<String>) -> Self {
        let detail = detail.into();
        Outcome {
            exit_code: 2,
            stdout: to_json_string(&json!({"error": "Usage", "detail": detail})),
            stderr: Some(detail),
        }
    }
}

/// Input that failed before any computation.
enum Failure {
    Input { code: &'static str, detail: String },
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl Failure {
    fn into_outcome(self) -> Outcome {
        match self {
            Failure::Input { code, detail } => Outcome {
                exit_code: 2,
                stdout: to_json_string(&json!({"error": code, "detail": detail})),
                stderr: Some(detail),
            },
            Failure::Domain(e) => Outcome {
                exit_code: e.exit_code(),
                stdout: to_json_string(&error_value(&e)),
                stderr: Some(e.to_string()),
            },
        }
    }
}

fn vec_of(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

fn center_value(c: &CenterResult) -> Value {
    json!({
        "center": c.center.to_vec(),
        "residuals": c.residuals_at_h.to_vec(),
        "eq24_residual": c.eq24_residual,
        "method": c.method.as_str(),
        "iterations": c.iterations,
    })
}

/// JSON error object for a library error.
pub fn error_value(e: &Error) -> Value {
    let mut obj = json!({"error": e.code(), "detail": e.to_string()});
    let map = obj.as_object_mut().expect("object literal");
    match e {
        Error::Unbounded {
            offending_index,
            witness_direction,
        } => {
            map.insert("witness_direction".into(), json!(witness_direction));
            map.insert("offending_row".into(), json!(offending_index.map(|k| k + 1)));
        }
        Error::ZeroRow(i) | Error::DegenerateFacetSystem(i) => {
            map.insert("row".into(), json!(i + 1));
        }
        Error::MaxIterations(best) | Error::LineSearchFailed(best) => {
            map.insert("best".into(), center_value(best));
        }
        Error::CrossCheckFailed {
            closed_form,
            newton,
            discrepancy,
        } => {
            map.insert("discrepancy".into(), json!(discrepancy));
            map.insert("closed_form".into(), center_value(closed_form));
            map.insert("newton".into(), center_value(newton));
        }
        _ => {}
    }
    obj
}

fn read_text(path: &str, stdin: &mut dyn Read) -> Result<String, Failure> {
    let mut text = String::new();
    let res = if path == "-" {
        stdin.read_to_string(&mut text).map(|_| ())
    } else {
        fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Failure::Input {
        code: "Io",
        detail: format!("cannot read {path}: {e}"),
    })?;
    Ok(text)
}

fn load_doc(input: &Input, stdin: &mut dyn Read) -> Result<SimplexDoc, Failure> {
    let text = read_text(&input.input, stdin)?;
    parse_simplex_doc(&text).map_err(|e| Failure::Input {
        code: "Parse",
        detail: e.to_string(),
    })
}

fn load(input: &Input, stdin: &mut dyn Read) -> Result<Simplex, Failure> {
    Ok(load_doc(input, stdin)?.to_simplex()?)
}

fn parse_coords(text: &str, what: &str, dim: usize) -> Result<DVector<f64>, Failure> {
    let values = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Input {
            code: "Usage",
            detail: format!("--{what}: {e}"),
        })?;
    if values.len() != dim {
        return Err(Failure::Input {
            code: "Usage",
            detail: format!("--{what} needs {dim} values, got {}", values.len()),
        });
    }
    Ok(DVector::from_vec(values))
}

fn base_point(s: &Simplex, point: &Option<String>) -> Result<Point, Failure> {
    match point {
        Some(text) => Ok(Point::from_vector(parse_coords(text, "point", s.dim())?)),
        None => Ok(enumerate_vertices(s)?.average()),
    }
}

fn line_direction(s: &Simplex, line: &Line) -> Result<DVector<f64>, Failure> {
    let n = s.dim();
    match (&line.direction, line.axis) {
        (Some(text), _) => {
            let v = parse_coords(text, "direction", n)?;
            let norm = v.norm();
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(Failure::Input {
                    code: "Usage",
                    detail: "--direction must be a nonzero finite vector".into(),
                });
            }
            Ok(v / norm)
        }
        (None, Some(axis)) => {
            if axis == 0 || axis > n {
                return Err(Error::AxisOutOfRange { axis, dim: n }.into());
            }
            let mut v = DVector::zeros(n);
            v[axis - 1] = 1.0;
            Ok(v)
        }
        (None, None) => Err(Failure::Input {
            code: "Usage",
            detail: "one of --direction or --axis is required".into(),
        }),
    }
}

fn execute(cmd: &Command, stdin: &mut dyn Read) -> Result<Outcome, Failure> {
    let out = match cmd {
        Command::Normalize(input) => {
            let s = load(input, stdin)?;
            Outcome::ok(SimplexDoc::from_simplex(&s).to_value())
        }
        Command::Gamma(input) => {
            let s = load(input, stdin)?;
            let g = compute_gamma(&s)?;
            Outcome::ok(json!({
                "gamma": vec_of(&g.gamma),
                "b0": g.b0,
                "invariant_constant": g.invariant_constant,
                "bounded_by_gamma": g.bounded_by_gamma,
                "reconstruction_error": g.reconstruction_error(&s),
            }))
        }
        Command::CheckBounded(input) => {
            let s = load(input, stdin)?;
            match check_bounded(&s)? {
                Boundedness::Bounded { gamma } => {
                    Outcome::ok(json!({"bounded": true, "gamma": vec_of(&gamma)}))
                }
                Boundedness::Unbounded {
                    offending_index,
                    witness_direction,
                    warnings,
                } => {
                    let err = Error::Unbounded {
                        offending_index,
                        witness_direction: witness_direction.as_ref().map(vec_of),
                    };
                    let mut value = error_value(&err);
                    let warnings: Vec<Value> = warnings
                        .iter()
                        .map(|w| match w {
                            Warning::DegenerateGamma { index, value } => json!({
                                "warning": "DegenerateGamma",
                                "row": index + 1,
                                "gamma": value,
                            }),
                        })
                        .collect();
                    value["warnings"] = json!(warnings);
                    Outcome {
                        exit_code: err.exit_code(),
                        stdout: to_json_string(&value),
                        stderr: Some(err.to_string()),
                    }
                }
            }
        }
        Command::Center {
            input,
            method,
            solver,
        } => {
            let s = load(input, stdin)?;
            let cfg = solver.config();
            let result = match method {
                MethodArg::ClosedForm => {
                    check_bounded(&s)?.into_result()?;
                    center_closed_form(&s, &compute_gamma(&s)?)?
                }
                MethodArg::Newton => center_newton(&s, &cfg, None)?,
                MethodArg::Both => cross_check_center(&s, &cfg)?,
            };
            Outcome::ok(center_value(&result))
        }
        Command::Invariant {
            input,
            point,
            samples,
            seed,
        } => {
            let s = load(input, stdin)?;
            let g = compute_gamma(&s)?;
            let p = base_point(&s, point)?;
            let value = evaluate_invariant(&s, &g, &p)?;
            let mut out = json!({
                "point": p.to_vec(),
                "value": value,
                "invariant_constant": g.invariant_constant,
            });
            if let Some(count) = samples {
                let vertices = enumerate_vertices(&s)?;
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let (mut lo, mut hi) = (value, value);
                for _ in 0..*count {
                    let v = evaluate_invariant(&s, &g, &vertices.sample_interior(&mut rng))?;
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                out["samples"] = json!(count);
                out["min"] = json!(lo);
                out["max"] = json!(hi);
                out["spread"] = json!(hi - lo);
            }
            Outcome::ok(out)
        }
        Command::Probe { input, line } => {
            let s = load(input, stdin)?;
            let p = base_point(&s, &line.point)?;
            let v = line_direction(&s, line)?;
            let probe = probe_line(&s, &p, &v)?;
            let g = compute_gamma(&s)?;
            let last = match last_facet_distance(&s, &g, &p, &probe) {
                Ok(d) => Some(d),
                Err(Error::ParallelToLastFacet) => None,
                Err(e) => return Err(e.into()),
            };
            Outcome::ok(json!({
                "base": p.to_vec(),
                "direction": vec_of(&v),
                "distances": probe.distances,
                "betas": vec_of(&probe.betas),
                "reciprocal_sum": probe.reciprocal_sum(),
                "last_facet_distance": last,
            }))
        }
        Command::HarmonicPoint { input, line } => {
            let s = load(input, stdin)?;
            let p = base_point(&s, &line.point)?;
            let v = line_direction(&s, line)?;
            let (q, t) = harmonic_point_on_line(&s, &p, &v)?;
            let residual = probe_line(&s, &q, &v)?.reciprocal_sum();
            Outcome::ok(json!({
                "base": p.to_vec(),
                "direction": vec_of(&v),
                "point": q.to_vec(),
                "t": t,
                "reciprocal_sum": residual,
            }))
        }
        Command::Vertices(input) => {
            let s = load(input, stdin)?;
            let vs = enumerate_vertices(&s)?;
            let list: Vec<Vec<f64>> = vs.vertices.iter().map(Point::to_vec).collect();
            Outcome::ok(json!({"vertices": list}))
        }
        Command::Generate { dim, seed } => {
            let s = random_bounded_simplex(&GeneratorConfig::new(*dim, *seed))?;
            Outcome::ok(SimplexDoc::from_simplex(&s).to_value())
        }
        Command::EqualGamma { input, last_b } => {
            let doc = load_doc(input, stdin)?;
            let rows = doc.a.len();
            let n = doc.a.first().map_or(0, Vec::len);
            let (head_rows, head_b, last) = if rows == n + 1 {
                (&doc.a[..n], &doc.b[..n.min(doc.b.len())], last_b.or(doc.b.get(n).copied()))
            } else {
                (&doc.a[..], &doc.b[..], *last_b)
            };
            let Some(last) = last else {
                return Err(Failure::Input {
                    code: "Usage",
                    detail: "--last-b is required when the input has only n rows".into(),
                });
            };
            let (s, gamma) = make_equal_gamma_simplex(head_rows, head_b, last)?;
            Outcome::ok(json!({
                "simplex": SimplexDoc::from_simplex(&s).to_value(),
                "gamma": gamma,
            }))
        }
        Command::Verify {
            input,
            samples,
            seed,
            solver,
        } => {
            let s = load(input, stdin)?;
            let report = verify_simplex(&s, *samples, *seed, &solver.config())?;
            let passed = report.all_passed();
            let mut value = serde_json::to_value(&report).expect("plain data serializes");
            value["all_passed"] = json!(passed);
            Outcome::with_code(if passed { 0 } else { 1 }, value)
        }
    };
    Ok(out)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    exit_code: 0,
                    stdout: e.to_string(),
                    stderr: None,
                },
                _ => Outcome::usage(e.to_string()),
            };
        }
    };
    execute(&cli.command, stdin).unwrap_or_else(Failure::into_outcome)
}
