use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dynacp::closedform::MollifierFamily;
use dynacp::sweep::{export, run_certify, run_sweep, write_json, write_to, Format, Spacing, SweepConfig};
use dynacp::{Engine, Error, ProfileCoefficients};

/// Light-cone profiles of vacuum energy densities and Casimir-Polder
/// potential changes after a sudden atomic frequency shift.
#[derive(Parser)]
#[command(name = "dynacp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate densities, potential and force on an (r, t) grid.
    Sweep(SweepArgs),
    /// Compare the closed forms against the quadrature engine on the grid.
    Certify(SweepArgs),
    /// Print the exact profile coefficient table.
    Coeffs {
        #[arg(long, default_value = "csv")]
        format: Format,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// JSON configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    engine: Option<Engine>,
    /// Mollifier width and regulator length.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    mollifier: Option<MollifierFamily>,
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    r_count: Option<usize>,
    /// Log-spaced r grid.
    #[arg(long)]
    r_log: bool,
    /// Comma-separated times.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    t: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    delta_omega0: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    allow_near_zone: bool,
}

impl SweepArgs {
    fn into_config(self) -> Result<SweepConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => SweepConfig::from_json_file(path)?,
            None => SweepConfig::default(),
        };
        if let Some(e) = self.engine {
            cfg.engine = e;
        }
        if let Some(eta) = self.eta {
            cfg.set_eta(eta);
        }
        if let Some(m) = self.mollifier {
            cfg.mollifier.family = m;
        }
        if let Some(v) = self.r_min {
            cfg.r_grid.min = v;
        }
        if let Some(v) = self.r_max {
            cfg.r_grid.max = v;
        }
        if let Some(v) = self.r_count {
            cfg.r_grid.count = v;
        }
        if self.r_log {
            cfg.r_grid.spacing = Spacing::Log;
        }
        if let Some(t) = self.t {
            cfg.t_values = t;
        }
        if let Some(v) = self.delta_omega0 {
            cfg.params.delta_omega0 = v;
        }
        if let Some(v) = self.alpha {
            cfg.params.alpha_test = v;
        }
        if let Some(p) = self.output {
            cfg.output.path = Some(p);
        }
        if let Some(f) = self.format {
            cfg.output.format = f;
        }
        if let Some(n) = self.threads {
            cfg.threads = Some(n);
        }
        if self.allow_near_zone {
            cfg.allow_near_zone = true;
        }
        Ok(cfg)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) | Error::Config(_) => 1,
        Error::Convergence { .. } | Error::ExtrapolationUnreliable(_) => 2,
        Error::Io { .. } => 3,
    }
}

fn coefficient_table(format: Format) -> Result<(), Error> {
    let rows = [
        ("electric", ProfileCoefficients::electric()),
        ("magnetic", ProfileCoefficients::magnetic()),
        ("total", ProfileCoefficients::total()),
    ];
    write_to(None, |w| match format {
        Format::Csv => {
            writeln!(w, "field,overall_sign,theta,delta,delta1,delta2,delta3,delta4")?;
            for (name, c) in &rows {
                let cols: Vec<String> = c.coefficients.iter().map(|q| q.to_string()).collect();
                writeln!(w, "{name},{},{}", c.overall_sign, cols.join(","))?;
            }
            writeln!(w, "# radial powers 7,6,5,4,3,2; prefactor dw0 c |d|^2 / (24 pi^2 omega0^2)")
        }
        Format::Json => {
            let value: serde_json::Map<String, serde_json::Value> = rows
                .iter()
                .map(|(name, c)| {
                    let entry = serde_json::json!({
                        "overall_sign": c.overall_sign,
                        "coefficients": c.coefficients.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
                        "radial_powers": ProfileCoefficients::RADIAL_POWERS,
                    });
                    (name.to_string(), entry)
                })
                .collect();
            write_json(&value, w)
        }
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Coeffs { format } => coefficient_table(format),
        Command::Sweep(args) => {
            let cfg = args.into_config()?;
            if let Some(w) = cfg.params.perturbative_warning() {
                eprintln!("warning: {w}");
            }
            let grid = run_sweep(&cfg)?;
            let flagged = grid.rows.iter().filter(|r| !r.valid).count();
            if flagged > 0 {
                eprintln!("{flagged} of {} rows flagged invalid", grid.rows.len());
            }
            export(&grid, cfg.output.format, cfg.output.path.as_deref())
        }
        Command::Certify(args) => {
            let mut cfg = args.into_config()?;
            if cfg.engine == Engine::ClosedForm {
                cfg.engine = Engine::Both;
            }
            let report = run_certify(&cfg)?;
            eprintln!(
                "certification at eta = {}: {}",
                report.eta,
                if report.pass { "pass" } else { "fail" }
            );
            write_to(cfg.output.path.as_deref(), |w| write_json(&report, w))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
