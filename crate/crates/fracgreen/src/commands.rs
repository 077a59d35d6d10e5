//! The six commands and the exit-code contract.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use fracgreen_core::solver::{
    default_lambda_grid, liouville_cascade, moving_plane_sweep, nonlinear_power_solve,
    CascadeReport, GreenOperator, PowerSolution,
};
use fracgreen_core::verify::{run_suite_with, SuiteReport};
use fracgreen_core::{
    adaptive_quad, DomainKind, Error as CoreError, Field, GreenConstants, Grid, Kernel, ModelParams,
};
use serde::Serialize;

use crate::config::{Config, KernelDomain};
use crate::output::{
    prepare_dir, write_field_csv, write_json, write_scan_csv, write_summary_csv, write_sweep_csv,
    OutputError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    KernelEval,
    SolveBall,
    MovingPlane,
    LiouvilleScan,
    Verify,
    All,
}

/// How a command ended when it ran to completion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Success,
    /// A suite violation, sweep violation, failed cascade check or
    /// non-convergence. The message is printed to standard error.
    Failed(String),
}

impl Status {
    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Failed(_) => 1,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Runs commands against one config, caching the power solution so that
/// `all` solves once.
pub struct Runner {
    cfg: Config,
    solution: Option<PowerSolution>,
}

impl Runner {
    pub fn new(cfg: Config) -> Self {
        Self {
            cfg,
            solution: None,
        }
    }

    pub fn config(&self) -> &Config {
        &self.cfg
    }

    fn out(&self, name: &str) -> PathBuf {
        self.cfg.output_dir.join(name)
    }

    /// Kernel with the configured node count and, under fault injection, a
    /// scaled `B`.
    fn kernel(&self, params: ModelParams) -> Result<Kernel, CoreError> {
        let nodes = self.cfg.quad.nodes;
        let scale = self.cfg.fault_injection.b_scale;
        if scale == 1.0 {
            return Kernel::with_nodes(params, nodes);
        }
        let c = GreenConstants::for_params(&params);
        Kernel::with_constants(
            params,
            GreenConstants {
                a: c.a,
                b: c.b * scale,
            },
            nodes,
        )
    }

    fn ball_grid(&self) -> Result<Arc<Grid>, CoreError> {
        let b = &self.cfg.grid.ball;
        Ok(Arc::new(Grid::ball(
            self.cfg.n,
            b.radial,
            b.angular,
            self.cfg.ball_scheme(),
        )?))
    }

    pub fn run(&mut self, cmd: Command) -> Result<Status, RunError> {
        prepare_dir(&self.cfg.output_dir)?;
        match cmd {
            Command::KernelEval => self.kernel_eval(),
            Command::SolveBall => self.solve_ball(),
            Command::MovingPlane => self.moving_plane(),
            Command::LiouvilleScan => self.liouville_scan(),
            Command::Verify => self.verify(),
            Command::All => {
                for step in [
                    Command::Verify,
                    Command::SolveBall,
                    Command::MovingPlane,
                    Command::LiouvilleScan,
                ] {
                    let status = self.run(step)?;
                    if status != Status::Success {
                        return Ok(status);
                    }
                }
                Ok(Status::Success)
            }
        }
    }

    fn kernel_eval(&mut self) -> Result<Status, RunError> {
        #[derive(Serialize)]
        struct KernelSummary<'a> {
            params: ModelParams,
            domain: &'static str,
            pole: &'a [f64],
            a: f64,
            b: f64,
            b_scale: f64,
            nodes: usize,
            tol: f64,
            /// `B ∫_0^∞ b^{-α/2}/(1+b) db`, equal to 1 for the true constant.
            b_normalization: f64,
            points: usize,
        }

        let params = self.cfg.params();
        let kernel = self.kernel(params)?;
        let n = self.cfg.n;
        let (domain, grid, default_pole, label) = match self.cfg.kernel.domain {
            KernelDomain::UnitBall => (
                DomainKind::UnitBall,
                self.ball_grid()?,
                vec![0.0; n],
                "unit_ball",
            ),
            KernelDomain::HalfSpace => {
                let (lo, hi, counts) = self.cfg.slab();
                let mut e = vec![0.0; n];
                e[n - 1] = 1.0;
                (
                    DomainKind::HalfSpace,
                    Arc::new(Grid::slab(lo, hi, counts)?),
                    e,
                    "half_space",
                )
            }
        };
        let pole = self.cfg.kernel.pole.clone().unwrap_or(default_pole);
        let values = grid
            .points()
            .map(|x| kernel.green(domain, x, &pole))
            .collect::<Result<Vec<_>, _>>()?;
        let field = Field::new(grid.clone(), values)?;
        write_field_csv(&self.out("kernel_field.csv"), &field)?;

        let alpha = self.cfg.alpha;
        let mass = adaptive_quad(
            |b| b.powf(-alpha / 2.0) / (1.0 + b),
            0.0,
            f64::INFINITY,
            self.cfg.quad.tol,
        )?;
        let c = kernel.constants();
        write_json(
            &self.out("kernel_constants.json"),
            &KernelSummary {
                params,
                domain: label,
                pole: &pole,
                a: c.a,
                b: c.b,
                b_scale: self.cfg.fault_injection.b_scale,
                nodes: kernel.nodes(),
                tol: self.cfg.quad.tol,
                b_normalization: c.b * mass,
                points: grid.len(),
            },
        )?;
        Ok(Status::Success)
    }

    fn solution(&mut self) -> Result<Result<&PowerSolution, String>, RunError> {
        if self.solution.is_none() {
            let p = self.cfg.solve_exponent();
            let kernel = self.kernel(self.cfg.params())?;
            let op = GreenOperator::assemble(&kernel, self.ball_grid()?)?;
            match nonlinear_power_solve(&op, p, &self.cfg.solver) {
                Ok(sol) => self.solution = Some(sol),
                Err(e @ (CoreError::NonConvergence { .. } | CoreError::Degenerate(_))) => {
                    return Ok(Err(e.to_string()))
                }
                Err(e) => return Err(e.into()),
            }
        }
        Ok(Ok(self.solution.as_ref().expect("solution cached above")))
    }

    fn solve_ball(&mut self) -> Result<Status, RunError> {
        #[derive(Serialize)]
        struct SolveSummary<'a> {
            params: ModelParams,
            p: f64,
            radial: usize,
            angular: usize,
            lambda_star: f64,
            u_max: f64,
            iterations: usize,
            residual: f64,
            radial_fallback_used: bool,
            residuals: &'a [f64],
        }

        let p = self.cfg.solve_exponent();
        let params = self.cfg.params();
        let (radial, angular) = (self.cfg.grid.ball.radial, self.cfg.grid.ball.angular);
        let field_path = self.out("solution.csv");
        let report_path = self.out("solve_report.json");
        let sol = match self.solution()? {
            Ok(sol) => sol,
            Err(msg) => return Ok(Status::Failed(format!("solve-ball: {msg}"))),
        };
        write_field_csv(&field_path, &sol.u)?;
        write_json(
            &report_path,
            &SolveSummary {
                params,
                p,
                radial,
                angular,
                lambda_star: sol.lambda_star,
                u_max: sol.u.max_abs(),
                iterations: sol.iterations,
                residual: sol.residual,
                radial_fallback_used: sol.radial_fallback_used,
                residuals: &sol.residuals,
            },
        )?;
        Ok(Status::Success)
    }

    fn moving_plane(&mut self) -> Result<Status, RunError> {
        let sweep = self.cfg.sweep.clone();
        let axes = self.cfg.sweep_axes();
        let dir = self.cfg.output_dir.clone();
        let sol = match self.solution()? {
            Ok(sol) => sol,
            Err(msg) => return Ok(Status::Failed(format!("moving-plane: {msg}"))),
        };
        let lambdas = default_lambda_grid(sweep.lo, sweep.hi, sweep.count);
        let mut bad = Vec::new();
        for axis in axes {
            let rep = moving_plane_sweep(&sol.u, axis, &lambdas, &sweep.options)?;
            write_sweep_csv(&dir.join(format!("sweep_axis{axis}.csv")), &rep)?;
            write_json(&dir.join(format!("sweep_axis{axis}.json")), &rep)?;
            if rep.total_violations() > 0 {
                bad.push(format!(
                    "axis {axis}: {} violations",
                    rep.total_violations()
                ));
            }
        }
        if bad.is_empty() {
            Ok(Status::Success)
        } else {
            Ok(Status::Failed(format!("moving-plane: {}", bad.join("; "))))
        }
    }

    fn liouville_scan(&mut self) -> Result<Status, RunError> {
        let scan = &self.cfg.liouville;
        let mut reports: Vec<CascadeReport> = Vec::new();
        let mut failures = 0usize;
        for &n in &scan.dims {
            for &alpha in &scan.alphas {
                let crit = (n as f64 + alpha) / (n as f64 - alpha);
                for k in 1..=scan.p_count {
                    // The last point is the critical exponent itself, exactly.
                    let p = if k == scan.p_count {
                        crit
                    } else {
                        1.0 + (crit - 1.0) * k as f64 / scan.p_count as f64
                    };
                    let rep = liouville_cascade(&ModelParams::with_exponent(n, alpha, p)?)?;
                    if !rep.passes() {
                        failures += 1;
                    }
                    reports.push(rep);
                }
            }
        }
        write_scan_csv(&self.out("liouville_scan.csv"), &reports)?;

        let own = self
            .cfg
            .p
            .unwrap_or_else(|| self.cfg.params().critical_exponent());
        let rep = liouville_cascade(&ModelParams::with_exponent(
            self.cfg.n,
            self.cfg.alpha,
            own,
        )?)?;
        write_json(&self.out("cascade.json"), &rep)?;
        if !rep.passes() {
            failures += 1;
        }
        if failures == 0 {
            Ok(Status::Success)
        } else {
            Ok(Status::Failed(format!(
                "liouville-scan: {failures} parameter combinations fail the cascade checks"
            )))
        }
    }

    fn verify(&mut self) -> Result<Status, RunError> {
        let kernel = self.kernel(self.cfg.params())?;
        let mut reports: Vec<SuiteReport> = Vec::new();
        for spec in &self.cfg.suites {
            let start = Instant::now();
            let mut rep = run_suite_with(&spec.name, &kernel, spec.samples, self.cfg.seed)?;
            rep.runtime_ms = start.elapsed().as_millis() as u64;
            write_json(&self.out(&format!("suite_{}.json", spec.name)), &rep)?;
            reports.push(rep);
        }
        write_summary_csv(&self.out("summary.csv"), &reports)?;
        let failed: Vec<String> = reports
            .iter()
            .filter(|r| !r.passed())
            .map(|r| format!("{} ({} violations)", r.suite, r.violations))
            .collect();
        if failed.is_empty() {
            Ok(Status::Success)
        } else {
            Ok(Status::Failed(format!("verify: {}", failed.join(", "))))
        }
    }
}

/// Files a run wrote into `dir`, sorted by name.
pub fn output_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    Ok(files)
}
