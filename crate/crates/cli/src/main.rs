use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use geomeas::eigen::{self, EigenSearchConfig, RealSymTensor};
use geomeas::hermitian::{projector, CMatrix, DensityMatrix};
use geomeas::mixed::{self, Witness};
use geomeas::num_complex::Complex64;
use geomeas::relax::{ppt_upper_bound, PptSolverConfig};
use geomeas::sampling;
use geomeas::search::{self, SearchConfig};
use geomeas::{io, Bipartition, ComplexTensor, NamedState, PureState, SeeSawConfig, Shape};
use serde_json::{json, Map, Value};

const EXIT_INPUT: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "geomeas", version, about = "Geometric measure of entanglement toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the report to FILE instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct Solver {
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
}

impl Solver {
    fn config(&self) -> SeeSawConfig {
        SeeSawConfig {
            max_iters: self.max_iters,
            tol: self.tol,
            restarts: self.restarts,
            seed: self.seed,
            ..SeeSawConfig::default()
        }
    }
}

#[derive(Args, Clone)]
struct Input {
    /// Tensor file (JSON).
    file: Option<PathBuf>,
    /// Registry state: ghzN, ghzN-D, wN, v, dickeN-K, antisymN, transinv4.
    #[arg(long)]
    named: Option<String>,
}

impl Input {
    fn state(&self) -> geomeas::Result<PureState> {
        match (&self.file, &self.named) {
            (Some(path), None) => io::read_state(path),
            (None, Some(name)) => name.parse::<NamedState>()?.build(),
            _ => Err(geomeas::Error::Parse("give exactly one of FILE or --named".into())),
        }
    }

    fn tensor(&self) -> geomeas::Result<ComplexTensor> {
        match &self.file {
            Some(path) if self.named.is_none() => io::read_tensor(path),
            _ => Ok(self.state()?.tensor().clone()),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EigenKindArg {
    Z,
    H,
    Us,
}

#[derive(Subcommand)]
enum Command {
    /// Maximal product overlap and geometric measure.
    Gm {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        solver: Solver,
        /// Use the symmetric power iteration (symmetric states only).
        #[arg(long)]
        symmetric: bool,
    },
    /// Schmidt decomposition across a cut.
    Schmidt {
        #[command(flatten)]
        input: Input,
        /// Parties on the left of the cut, e.g. 0 or 0,1.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        cut: Vec<usize>,
    },
    /// Tensor eigenpairs.
    Eigen {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        kind: EigenKindArg,
        #[arg(long, default_value_t = 200)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Upper bound on Lambda^2 from the PPT relaxation.
    PptBound {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 5000)]
        max_iters: usize,
    },
    /// Ascent towards a maximally entangled state.
    Search {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 0.1)]
        eps0: f64,
        #[arg(long, default_value_t = 0.9)]
        decay: f64,
        #[arg(long, default_value_t = 2000)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        /// Also write the final state as a tensor file.
        #[arg(long)]
        save_state: Option<PathBuf>,
    },
    /// Lambda^2 statistics of Haar-random qubit states.
    Sample {
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Mixed-state quantities.
    Mixed {
        #[command(subcommand)]
        op: MixedOp,
    },
    /// Demonstrations.
    Demo {
        #[command(subcommand)]
        op: DemoOp,
    },
}

#[derive(Args, Clone)]
struct DensityInput {
    /// Tensor files; pure states unless --density is given.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Files hold density matrices with dims [D, D].
    #[arg(long)]
    density: bool,
}

#[derive(Subcommand)]
enum MixedOp {
    /// Closed-form two-qubit geometric measure.
    Gm2q {
        #[command(flatten)]
        input: DensityInput,
    },
    /// Uhlmann fidelity of two states.
    Fidelity {
        #[command(flatten)]
        input: DensityInput,
    },
    /// Lower bound on the measure from the fidelity with the given state.
    Legendre {
        #[command(flatten)]
        input: Input,
        /// Observed fidelity.
        #[arg(long)]
        w: f64,
        #[arg(long, default_value_t = 1e-2)]
        grid_min: f64,
        #[arg(long, default_value_t = 1e2)]
        grid_max: f64,
        #[arg(long, default_value_t = 50)]
        grid_points: usize,
        #[command(flatten)]
        solver: Solver,
    },
    /// Discrimination capacity sum over an orthogonal set.
    Discriminate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        solver: Solver,
    },
}

#[derive(Subcommand)]
enum DemoOp {
    /// Overlap of W with the rank-two family phi_eps.
    WRank2 {
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001,0.0001")]
        eps_list: Vec<f64>,
    },
}

/// A finished command: JSON report, CSV view and convergence flag.
struct Report {
    json: Value,
    csv: Vec<Vec<String>>,
    converged: bool,
}

impl Report {
    fn new(json: Value, csv: Vec<Vec<String>>) -> Self {
        Report {
            json,
            csv,
            converged: true,
        }
    }
}

fn complex_json(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|z| json!([z.re, z.im])).collect())
}

fn meta(seed: u64, restarts: usize, tol: f64) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("seed".into(), json!(seed));
    m.insert("restarts".into(), json!(restarts));
    m.insert("tol".into(), json!(tol));
    m.insert("version".into(), json!(geomeas::VERSION));
    m
}

fn with_meta(mut body: Value, m: Map<String, Value>) -> Value {
    if let Value::Object(obj) = &mut body {
        for (k, v) in m {
            obj.entry(k).or_insert(v);
        }
    }
    body
}

fn read_density(path: &PathBuf, density: bool) -> geomeas::Result<DensityMatrix> {
    if !density {
        return Ok(DensityMatrix::pure(&io::read_state(path)?));
    }
    let t = io::read_tensor(path)?;
    let dims = t.dims();
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(geomeas::Error::Shape(format!("density file needs dims [D, D], got {dims:?}")));
    }
    let d = dims[0];
    DensityMatrix::new(CMatrix::from_fn(d, d, |r, c| t.data()[r * d + c]))
}

fn run(cli: &Cli) -> geomeas::Result<Report> {
    match &cli.command {
        Command::Gm { input, solver, symmetric } => {
            let psi = input.state()?;
            let cfg = solver.config();
            let r = if *symmetric {
                geomeas::symmetric_power(&psi, &cfg)?
            } else {
                geomeas::seesaw(&psi, &cfg)?
            };
            let closest: Vec<Value> = r.closest.locals().iter().map(|v| complex_json(v)).collect();
            let body = json!({
                "dims": psi.dims(),
                "lambda": r.lambda,
                "lambda_sq": r.lambda_sq,
                "measure": r.measure,
                "log_measure": r.log_measure(),
                "converged": r.converged,
                "iters": r.iters,
                "residual": r.residual,
                "closest": closest,
            });
            let csv = vec![
                vec!["lambda".into(), "lambda_sq".into(), "measure".into(), "converged".into()],
                vec![r.lambda.to_string(), r.lambda_sq.to_string(), r.measure.to_string(), r.converged.to_string()],
            ];
            Ok(Report {
                json: with_meta(body, meta(cfg.seed, cfg.restarts, cfg.tol)),
                csv,
                converged: r.converged,
            })
        }
        Command::Schmidt { input, cut } => {
            let psi = input.state()?;
            let cut = Bipartition::new(cut, psi.parties())?;
            let dec = geomeas::schmidt(&psi, &cut, geomeas::schmidt::DEFAULT_RANK_TOL);
            let body = json!({
                "left": cut.left(),
                "right": cut.right(),
                "coefficients": dec.coefficients(),
                "rank": dec.rank(),
                "left_vectors": dec.left_vectors().iter().map(|v| complex_json(v)).collect::<Vec<_>>(),
                "right_vectors": dec.right_vectors().iter().map(|v| complex_json(v)).collect::<Vec<_>>(),
            });
            let mut csv = vec![vec!["index".into(), "coefficient".into()]];
            csv.extend(dec.coefficients().iter().enumerate().map(|(i, s)| vec![i.to_string(), s.to_string()]));
            Ok(Report::new(with_meta(body, meta(0, 0, geomeas::schmidt::DEFAULT_RANK_TOL)), csv))
        }
        Command::Eigen { input, kind, starts, seed } => {
            let cfg = EigenSearchConfig {
                starts: *starts,
                seed: *seed,
                ..EigenSearchConfig::default()
            };
            let pairs = match kind {
                EigenKindArg::Z => eigen::z_eigen_search(&input.tensor()?, &cfg)?,
                EigenKindArg::Us => eigen::us_eigen_search(&input.state()?, &cfg)?,
                EigenKindArg::H => {
                    let t = RealSymTensor::new(&input.tensor()?)?;
                    let d = t.dim();
                    eigen::h_eigen_diagonal(&t)?
                        .into_iter()
                        .enumerate()
                        .map(|(i, lambda)| {
                            let mut x = vec![0.0; d];
                            x[i] = 1.0;
                            eigen::EigenPair {
                                kind: eigen::EigenKind::H,
                                lambda,
                                residual: eigen::h_eigen_residual(&t, lambda, &x),
                                vector: x.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
                            }
                        })
                        .collect()
                }
            };
            let list: Vec<Value> = pairs
                .iter()
                .map(|p| json!({"lambda": p.lambda, "residual": p.residual, "vector": complex_json(&p.vector)}))
                .collect();
            let mut csv = vec![vec!["index".into(), "lambda".into(), "residual".into()]];
            csv.extend(
                pairs
                    .iter()
                    .enumerate()
                    .map(|(i, p)| vec![i.to_string(), p.lambda.to_string(), p.residual.to_string()]),
            );
            let body = json!({"kind": format!("{:?}", pairs.first().map_or(eigen::EigenKind::Z, |p| p.kind)), "pairs": list});
            Ok(Report::new(with_meta(body, meta(*seed, *starts, eigen::RESIDUAL_TOL)), csv))
        }
        Command::PptBound { input, max_iters } => {
            let psi = input.state()?;
            let cfg = PptSolverConfig {
                max_iters: *max_iters,
                ..PptSolverConfig::default()
            };
            let r = ppt_upper_bound(&psi, &cfg)?;
            let residuals: Vec<Value> = r
                .primal_residuals
                .iter()
                .map(|(p, v)| json!({"transposed": p, "min_eigenvalue": v}))
                .collect();
            let body = json!({
                "upper_bound": r.upper_bound,
                "repaired_objective": r.repaired_objective,
                "iterations": r.iterations,
                "converged": r.converged,
                "min_eigenvalue": r.min_eigenvalue,
                "trace_error": r.trace_error,
                "primal_residuals": residuals,
                "objective_trace": r.objective_trace,
            });
            let mut csv = vec![vec!["iteration".into(), "objective".into(), "infeasibility".into()]];
            csv.extend(
                r.objective_trace
                    .iter()
                    .zip(&r.infeasibility_trace)
                    .enumerate()
                    .map(|(i, (o, e))| vec![(i + 1).to_string(), o.to_string(), e.to_string()]),
            );
            Ok(Report {
                json: with_meta(body, meta(0, 0, cfg.tol)),
                csv,
                converged: r.converged,
            })
        }
        Command::Search {
            dims,
            eps0,
            decay,
            steps,
            seed,
            restarts,
            save_state,
        } => {
            let shape = Shape::new(dims.clone())?;
            let cfg = search::inner_config().with_restarts(*restarts).with_seed(*seed);
            let s = SearchConfig {
                eps0: *eps0,
                decay: *decay,
                steps: *steps,
                seed: *seed,
            };
            let r = search::max_entangled_search(&shape, &s, &cfg)?;
            if let Some(path) = save_state {
                io::write_tensor(path, r.state.tensor())?;
            }
            let body = json!({
                "dims": dims,
                "measure": r.measure,
                "accepted": r.accepted,
                "steps": r.steps,
                "converged": r.converged,
                "trace": r.trace,
                "state": serde_json::from_str::<Value>(&io::tensor_to_json(r.state.tensor())).expect("valid json"),
            });
            let mut csv = vec![vec!["step".into(), "measure".into()]];
            csv.extend(r.trace.iter().enumerate().map(|(i, e)| vec![i.to_string(), e.to_string()]));
            Ok(Report {
                json: with_meta(body, meta(*seed, *restarts, cfg.tol)),
                csv,
                converged: r.converged,
            })
        }
        Command::Sample {
            qubits,
            samples,
            restarts,
            seed,
        } => {
            let cfg = sampling::sampling_config().with_restarts(*restarts);
            let g = sampling::gross_fraction(*qubits, *samples, *seed, &cfg)?;
            let st = &g.stats;
            let body = json!({
                "n_qubits": st.n_qubits,
                "n_samples": st.n_samples,
                "mean": st.mean,
                "min": st.min,
                "max": st.max,
                "q05": st.q05,
                "q50": st.q50,
                "q95": st.q95,
                "floor": 0.5f64.powi(*qubits as i32),
                "gross_threshold": g.threshold,
                "gross_fraction": g.fraction,
                "spot_residuals": st.spot_residuals,
                "values": st.values,
            });
            let mut csv = vec![vec!["index".into(), "lambda_sq".into()]];
            csv.extend(st.values.iter().enumerate().map(|(i, v)| vec![i.to_string(), v.to_string()]));
            Ok(Report::new(with_meta(body, meta(*seed, *restarts, cfg.tol)), csv))
        }
        Command::Mixed { op } => run_mixed(op),
        Command::Demo {
            op: DemoOp::WRank2 { eps_list },
        } => {
            let rows: Vec<(f64, f64)> = eps_list
                .iter()
                .map(|&e| geomeas::w_rank_two_overlap(e).map(|o| (e, o)))
                .collect::<geomeas::Result<_>>()?;
            let body = json!({
                "points": rows.iter().map(|(e, o)| json!({"eps": e, "overlap": o})).collect::<Vec<_>>(),
            });
            let mut csv = vec![vec!["eps".into(), "overlap".into()]];
            csv.extend(rows.iter().map(|(e, o)| vec![e.to_string(), o.to_string()]));
            Ok(Report::new(with_meta(body, meta(0, 0, 0.0)), csv))
        }
    }
}

fn run_mixed(op: &MixedOp) -> geomeas::Result<Report> {
    match op {
        MixedOp::Gm2q { input } => {
            let mut items = Vec::new();
            let mut csv = vec![vec!["file".into(), "concurrence".into(), "measure".into()]];
            for f in &input.files {
                let rho = read_density(f, input.density)?;
                let c = mixed::concurrence_2q(&rho)?;
                let e = mixed::gm_2q(&rho)?;
                items.push(json!({"file": f.display().to_string(), "concurrence": c, "measure": e}));
                csv.push(vec![f.display().to_string(), c.to_string(), e.to_string()]);
            }
            Ok(Report::new(with_meta(json!({"results": items}), meta(0, 0, 0.0)), csv))
        }
        MixedOp::Fidelity { input } => {
            if input.files.len() != 2 {
                return Err(geomeas::Error::Parse("fidelity needs exactly two files".into()));
            }
            let a = read_density(&input.files[0], input.density)?;
            let b = read_density(&input.files[1], input.density)?;
            let f = mixed::uhlmann_fidelity(&a, &b)?;
            let csv = vec![vec!["fidelity".into()], vec![f.to_string()]];
            Ok(Report::new(with_meta(json!({"fidelity": f}), meta(0, 0, 0.0)), csv))
        }
        MixedOp::Legendre {
            input,
            w,
            grid_min,
            grid_max,
            grid_points,
            solver,
        } => {
            let psi = input.state()?;
            if !(*grid_min > 0.0 && grid_max >= grid_min && *grid_points > 0) {
                return Err(geomeas::Error::Parse("grid needs 0 < min <= max and at least one point".into()));
            }
            let grid = mixed::log_grid(*grid_min, *grid_max, *grid_points);
            let witness = Witness::new(projector(psi.amplitudes()), "fidelity")?;
            let cfg = solver.config();
            let b = mixed::legendre_lower_bound(&witness, psi.shape(), *w, &grid, &cfg)?;
            let body = json!({"w": w, "bound": b.bound, "best_lambda": b.best_lambda, "grid": grid, "transform": b.transform});
            let mut csv = vec![vec!["lambda".into(), "transform".into()]];
            csv.extend(grid.iter().zip(&b.transform).map(|(l, t)| vec![l.to_string(), t.to_string()]));
            Ok(Report::new(with_meta(body, meta(cfg.seed, cfg.restarts, cfg.tol)), csv))
        }
        MixedOp::Discriminate { files, solver } => {
            let states = files.iter().map(io::read_state).collect::<geomeas::Result<Vec<_>>>()?;
            let cfg = solver.config();
            let r = mixed::discrimination_capacity(&states, &cfg)?;
            let body = json!({"sum_inv": r.sum_inv, "feasible": r.feasible, "dimension": states[0].total(), "lambda_sq": r.lambda_sq});
            let mut csv = vec![vec!["file".into(), "lambda_sq".into()]];
            csv.extend(files.iter().zip(&r.lambda_sq).map(|(f, l)| vec![f.display().to_string(), l.to_string()]));
            Ok(Report::new(with_meta(body, meta(cfg.seed, cfg.restarts, cfg.tol)), csv))
        }
    }
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &report.csv {
                w.write_record(row).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INPUT),
            };
        }
    };
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let text = render(&report, cli.format);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(EXIT_INPUT);
            }
        }
        None => print!("{text}"),
    }
    if report.converged {
        ExitCode::SUCCESS
    } else {
        eprintln!("warning: did not converge");
        ExitCode::from(EXIT_NOT_CONVERGED)
    }
}
