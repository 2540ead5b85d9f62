use clap::{Parser, Subcommand};
use lenscale_cli::config::RunConfig;
use lenscale_cli::pipeline;
use lenscale_cli::sweep::{self, Family};
use std::path::PathBuf;
use std::process::ExitCode;

/// Length scales and Dirichlet ground states of -Δ + V on convex planar
/// domains with concave V^(-1/2).
#[derive(Parser)]
#[command(name = "lenscale", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute L1, the orientation, the μ profile and L2.
    Scales { config: PathBuf },
    /// Solve the 2D eigenproblem and dump the field artifacts.
    Solve { config: PathBuf },
    /// Full pipeline plus every verification check.
    Verify { config: PathBuf },
    /// Family sweep of L1 against N1 with an exponent fit.
    Sweep {
        /// constant | triangle_example | trapezoid
        family: Family,
        /// Comma-separated N1 values, e.g. 16,32,64,128
        params: String,
        /// Output CSV path (defaults to sweep.csv in the output dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dense-vs-iterative eigensolver cross-check.
    Oracle { config: PathBuf },
}

fn output_dir(cfg: Option<&str>) -> PathBuf {
    if let Ok(dir) = std::env::var("LENSCALE_OUT_DIR") {
        return PathBuf::from(dir);
    }
    cfg.map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn load_config(path: &PathBuf) -> Result<RunConfig, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
    RunConfig::from_json(&text).map_err(|e| e.to_string())
}

fn error_json(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": { "kind": kind, "message": message } }).to_string()
}

fn fail(kind: &str, message: &str) -> ExitCode {
    println!("{}", error_json(kind, message));
    ExitCode::from(1)
}

fn run_scales(config: &PathBuf) -> ExitCode {
    let cfg = match load_config(config) {
        Ok(c) => c,
        Err(e) => return fail("InvalidConfig", &e),
    };
    match pipeline::compute_scaled_instance(&cfg) {
        Ok(scaled) => {
            let dir = output_dir(cfg.output_dir.as_deref());
            if let Err(e) = std::fs::create_dir_all(&dir) {
                return fail("Io", &e.to_string());
            }
            let payload = serde_json::json!({
                "scales": scaled.report,
                "mu_star": scaled.mu_profile.mu_star,
                "x_star": scaled.mu_profile.x_star,
                "mu": scaled.mu_a,
            });
            let json = serde_json::to_string_pretty(&payload).unwrap();
            if let Err(e) = std::fs::write(dir.join("scales.json"), format!("{json}\n")) {
                return fail("Io", &e.to_string());
            }
            let mut mu_csv = String::from("x,mu\n");
            for (x, m) in scaled.mu_profile.xs.iter().zip(&scaled.mu_profile.mu) {
                mu_csv.push_str(&format!("{x},{m}\n"));
            }
            if let Err(e) = std::fs::write(dir.join("mu.csv"), mu_csv) {
                return fail("Io", &e.to_string());
            }
            println!("{json}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.kind(), &e.to_string()),
    }
}

fn run_solve_or_verify(config: &PathBuf, verify: bool) -> ExitCode {
    let cfg = match load_config(config) {
        Ok(c) => c,
        Err(e) => return fail("InvalidConfig", &e),
    };
    match pipeline::run_pipeline(&cfg) {
        Ok(out) => {
            let artifacts = pipeline::render_artifacts(&out);
            let dir = output_dir(cfg.output_dir.as_deref());
            if let Err(e) = pipeline::write_artifacts(&dir, &artifacts) {
                return fail("Io", &e.to_string());
            }
            for check in &out.report.checks {
                let tag = match &check.status {
                    lenscale::CheckStatus::Pass => "PASS",
                    lenscale::CheckStatus::Fail => "FAIL",
                    lenscale::CheckStatus::Skipped(_) => "SKIP",
                };
                println!("[{tag}] {}", check.name);
            }
            println!(
                "lambda = {:.9}, mu = {:.9}, L1 = {:.4}, L2 = {:.4}, report: {}",
                out.report.lambda,
                out.report.mu,
                out.report.scales.l1,
                out.report.scales.l2,
                dir.join("report.json").display()
            );
            if verify && !out.report.all_passed {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => fail(e.kind(), &e.to_string()),
    }
}

fn run_sweep(family: Family, params: &str, out: Option<PathBuf>) -> ExitCode {
    let parsed: Result<Vec<f64>, _> = params.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let parsed = match parsed {
        Ok(p) => p,
        Err(e) => return fail("InvalidConfig", &format!("bad parameter list: {e}")),
    };
    match sweep::sweep_scaling(family, &parsed) {
        Ok(res) => {
            let csv = sweep::sweep_csv(&res);
            let path = out.unwrap_or_else(|| output_dir(None).join("sweep.csv"));
            if let Some(parent) = path.parent() {
                let _ = std::fs::create_dir_all(parent);
            }
            if let Err(e) = std::fs::write(&path, csv) {
                return fail("Io", &e.to_string());
            }
            println!("{}", serde_json::to_string_pretty(&res).unwrap());
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.kind(), &e.to_string()),
    }
}

fn run_oracle(config: &PathBuf) -> ExitCode {
    let cfg = match load_config(config) {
        Ok(c) => c,
        Err(e) => return fail("InvalidConfig", &e),
    };
    match pipeline::run_oracle(&cfg) {
        Ok(rep) => {
            println!("{}", serde_json::to_string_pretty(&rep).unwrap());
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.kind(), &e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Scales { config } => run_scales(&config),
        Command::Solve { config } => run_solve_or_verify(&config, false),
        Command::Verify { config } => run_solve_or_verify(&config, true),
        Command::Sweep {
            family,
            params,
            out,
        } => run_sweep(family, &params, out),
        Command::Oracle { config } => run_oracle(&config),
    }
}
