//! Parameter sweeps over `(r, t)` grids and their CSV/JSON export.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closedform::{
    certify_against_oracle, static_value, total_energy_density, CertificationReport, MollifierSpec,
    ProfileCoefficients,
};
use crate::error::{Error, Result};
use crate::model::{Engine, ModelParams, SpacetimePoint};
use crate::potential::cp_potential_delta;
use crate::quad::{delta_energy_quad_both, OraclePath, RegulatorSpec};

pub const CSV_HEADER: &str = "r,t,eta,electric,magnetic,total,delta_v,force,valid,engine";
const CSV_BOTH_EXTRA: &str = ",electric_quad,magnetic_quad,rel_deviation";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl RGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let f = i as f64 / n;
                if i == 0 {
                    return self.min;
                }
                if i + 1 == self.count {
                    return self.max;
                }
                match self.spacing {
                    Spacing::Linear => self.min + f * (self.max - self.min),
                    Spacing::Log => (self.min.ln() + f * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

impl Default for RGrid {
    fn default() -> Self {
        Self {
            min: 12.0,
            max: 40.0,
            count: 8,
            spacing: Spacing::Linear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown output format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OutputSpec {
    /// Standard output when absent.
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// Echo-only SI annotation; never used in computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiAnnotation {
    pub omega0_rad_per_s: f64,
    pub dipole_c_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub params: ModelParams,
    pub r_grid: RGrid,
    pub t_values: Vec<f64>,
    pub mollifier: MollifierSpec,
    pub regulator: RegulatorSpec,
    pub engine: Engine,
    pub output: OutputSpec,
    /// Worker threads; all cores when absent.
    pub threads: Option<usize>,
    pub allow_near_zone: bool,
    pub si_annotation: Option<SiAnnotation>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            params: ModelParams::default(),
            r_grid: RGrid::default(),
            t_values: vec![0.0, 20.0, 40.0, 80.0],
            mollifier: MollifierSpec::default(),
            regulator: RegulatorSpec::default(),
            engine: Engine::ClosedForm,
            output: OutputSpec::default(),
            threads: None,
            allow_near_zone: false,
            si_annotation: None,
        }
    }
}

impl SweepConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Sets the mollifier width and the regulator together, keeping them matched.
    pub fn set_eta(&mut self, eta: f64) {
        self.mollifier.width = eta;
        self.regulator = RegulatorSpec {
            rel_tol: self.regulator.rel_tol,
            abs_tol: self.regulator.abs_tol,
            ..RegulatorSpec::new(eta)
        };
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        self.params.validate().map_err(to_config)?;
        self.mollifier.validate().map_err(to_config)?;
        if matches!(self.engine, Engine::Quadrature | Engine::Both) {
            self.regulator.validate().map_err(to_config)?;
        }
        let g = &self.r_grid;
        if g.count < 2 {
            return cfg(format!("r grid needs at least 2 points, got {}", g.count));
        }
        if !(g.min > 0.0 && g.max >= g.min && g.max.is_finite()) {
            return cfg(format!("invalid r range [{}, {}]", g.min, g.max));
        }
        if !self.allow_near_zone && self.params.rho(g.min) < crate::FAR_ZONE_MIN_RHO {
            return cfg(format!(
                "r_min = {} is inside the near zone (omega0 r / c < {}); pass --allow-near-zone to flag instead",
                g.min,
                crate::FAR_ZONE_MIN_RHO
            ));
        }
        if self.t_values.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return cfg("t values must be finite and non-negative".into());
        }
        if self.threads == Some(0) {
            return cfg("threads must be at least 1".into());
        }
        Ok(())
    }
}

fn to_config(e: Error) -> Error {
    match e {
        Error::InvalidArgument(m) => Error::Config(m),
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub r: f64,
    pub t: f64,
    pub eta: f64,
    pub electric: f64,
    pub magnetic: f64,
    pub total: f64,
    pub delta_v: f64,
    pub force: f64,
    pub valid: bool,
    pub engine: Engine,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub electric_quad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub magnetic_quad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_deviation: Option<f64>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub config: SweepConfig,
    pub tool_version: String,
    pub wall_time_s: f64,
    pub units: String,
    pub potential_note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileGrid {
    pub rows: Vec<ProfileRow>,
    pub metadata: RunMetadata,
}

pub fn grid_points(config: &SweepConfig) -> Vec<(f64, f64)> {
    let rs = config.r_grid.values();
    rs.iter()
        .flat_map(|&r| config.t_values.iter().map(move |&t| (r, t)))
        .collect()
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Evaluates every `(r, t)` point, r-major. Per-point numerical failures
/// are recorded on the row and never abort the run.
pub fn run_sweep(config: &SweepConfig) -> Result<ProfileGrid> {
    config.validate()?;
    let start = Instant::now();
    let points = grid_points(config);
    let rows = with_pool(config.threads, || {
        points
            .par_iter()
            .map(|&(r, t)| evaluate_row(config, r, t))
            .collect::<Vec<_>>()
    })?;
    Ok(ProfileGrid {
        rows,
        metadata: RunMetadata {
            config: config.clone(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: start.elapsed().as_secs_f64(),
            units: "reduced: hbar = 1, lengths omega0 r / c, times omega0 t".into(),
            potential_note: "delta_v and force are changes relative to the pre-shift (t < 0) interaction".into(),
        },
    })
}

fn evaluate_row(config: &SweepConfig, r: f64, t: f64) -> ProfileRow {
    let params = &config.params;
    let eta = config.mollifier.width;
    let mut row = ProfileRow {
        r,
        t,
        eta,
        electric: f64::NAN,
        magnetic: f64::NAN,
        total: f64::NAN,
        delta_v: f64::NAN,
        force: f64::NAN,
        valid: true,
        engine: config.engine,
        electric_quad: None,
        magnetic_quad: None,
        rel_deviation: None,
        flags: Vec::new(),
    };
    let point = match SpacetimePoint::new(r, t, params) {
        Ok(p) => p,
        Err(e) => {
            row.valid = false;
            row.flags.push(e.to_string());
            return row;
        }
    };
    if !point.far_zone {
        row.valid = false;
        row.flags.push("near zone".into());
    }
    let fail = |row: &mut ProfileRow, e: Error| {
        row.valid = false;
        row.flags.push(e.to_string());
    };

    if matches!(config.engine, Engine::ClosedForm | Engine::Both) {
        match total_energy_density(&point, params, &config.mollifier)
            .and_then(|d| Ok((d, cp_potential_delta(&point, params, &config.mollifier)?)))
        {
            Ok((d, v)) => {
                row.electric = d.electric;
                row.magnetic = d.magnetic;
                row.total = d.total;
                row.delta_v = v.delta_v;
                row.force = v.force;
            }
            Err(e) => fail(&mut row, e),
        }
    }
    if matches!(config.engine, Engine::Quadrature | Engine::Both) {
        let quad = delta_energy_quad_both(&point, params, &config.regulator, OraclePath::default());
        let (qe, qm) = match quad {
            Ok((e, m)) => (e.value, m.value),
            Err(e) => {
                fail(&mut row, e);
                (f64::NAN, f64::NAN)
            }
        };
        if config.engine == Engine::Quadrature {
            row.eta = config.regulator.eta;
            row.electric = qe;
            row.magnetic = qm;
            row.total = qe + qm;
            row.delta_v = -4.0 * std::f64::consts::PI * params.alpha_test * qe;
        } else {
            row.electric_quad = Some(qe);
            row.magnetic_quad = Some(qm);
            let dev = |cf: f64, q: f64, c: ProfileCoefficients| {
                (cf - q).abs() / q.abs().max(static_value(&c, r, params).abs())
            };
            row.rel_deviation = Some(
                dev(row.electric, qe, ProfileCoefficients::electric())
                    .max(dev(row.magnetic, qm, ProfileCoefficients::magnetic())),
            );
        }
    }
    row
}

/// Certification report over the sweep grid at the configured `eta`.
pub fn run_certify(config: &SweepConfig) -> Result<CertificationReport> {
    config.validate()?;
    let points: Vec<SpacetimePoint> = grid_points(config)
        .into_iter()
        .map(|(r, t)| SpacetimePoint::new(r, t, &config.params))
        .collect::<Result<_>>()?;
    let chunks: Vec<Result<CertificationReport>> = with_pool(config.threads, || {
        points
            .par_iter()
            .map(|p| {
                certify_against_oracle(std::slice::from_ref(p), &config.params, &config.mollifier, &config.regulator)
            })
            .collect()
    })?;
    let mut out = Vec::with_capacity(points.len());
    for c in chunks {
        out.extend(c?.points);
    }
    let pass = out.iter().all(|p| p.pass);
    Ok(CertificationReport {
        eta: config.regulator.eta,
        tolerance: crate::closedform::CERTIFY_TOLERANCE,
        points: out,
        pass,
    })
}

fn has_quad_columns(grid: &ProfileGrid) -> bool {
    grid.metadata.config.engine == Engine::Both
}

pub fn write_csv<W: Write>(grid: &ProfileGrid, mut w: W) -> io::Result<()> {
    let both = has_quad_columns(grid);
    write!(w, "{CSV_HEADER}")?;
    if both {
        write!(w, "{CSV_BOTH_EXTRA}")?;
    }
    writeln!(w)?;
    for row in &grid.rows {
        write!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            row.r,
            row.t,
            row.eta,
            row.electric,
            row.magnetic,
            row.total,
            row.delta_v,
            row.force,
            row.valid,
            row.engine.as_str()
        )?;
        if both {
            let opt = |v: Option<f64>| v.unwrap_or(f64::NAN);
            write!(
                w,
                ",{:.16e},{:.16e},{:.16e}",
                opt(row.electric_quad),
                opt(row.magnetic_quad),
                opt(row.rel_deviation)
            )?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_json<W: Write, T: Serialize>(value: &T, mut w: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)
}

/// Writes the grid to `path`, or to standard output when `path` is `None`.
pub fn export(grid: &ProfileGrid, format: Format, path: Option<&Path>) -> Result<()> {
    let write = |w: &mut dyn Write| match format {
        Format::Csv => write_csv(grid, w),
        Format::Json => write_json(grid, w),
    };
    write_to(path, write)
}

pub fn write_to(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    let io_err = |source: io::Error| Error::Io {
        path: path.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("<stdout>")),
        source,
    };
    match path {
        Some(p) => {
            let file = File::create(p).map_err(io_err)?;
            let mut w = BufWriter::new(file);
            f(&mut w).and_then(|_| w.flush()).map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w).and_then(|_| w.flush()).map_err(io_err)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small(engine: Engine, ts: Vec<f64>) -> SweepConfig {
        SweepConfig {
            r_grid: RGrid {
                min: 12.0,
                max: 14.0,
                count: 2,
                spacing: Spacing::Linear,
            },
            t_values: ts,
            engine,
            threads: Some(1),
            ..SweepConfig::default()
        }
    }

    #[test]
    fn grid_values() {
        let g = RGrid {
            min: 10.0,
            max: 1000.0,
            count: 3,
            spacing: Spacing::Log,
        };
        let v = g.values();
        assert_relative_eq!(v[1], 100.0, max_relative = 1e-14);
        assert_eq!((v[0], v[2]), (10.0, 1000.0));
    }

    #[test]
    fn rows_are_r_major() {
        let grid = run_sweep(&small(Engine::ClosedForm, vec![1.0, 2.0, 3.0])).unwrap();
        let order: Vec<(f64, f64)> = grid.rows.iter().map(|r| (r.r, r.t)).collect();
        assert_eq!(order, vec![(12.0, 1.0), (12.0, 2.0), (12.0, 3.0), (14.0, 1.0), (14.0, 2.0), (14.0, 3.0)]);
        assert!(grid.rows.iter().all(|r| r.total == r.electric + r.magnetic));
    }

    #[test]
    fn causal_points_are_quiet() {
        let mut cfg = small(Engine::ClosedForm, vec![0.0, 1.0]);
        cfg.mollifier = MollifierSpec::gaussian(0.1);
        let grid = run_sweep(&cfg).unwrap();
        for row in &grid.rows {
            let floor = static_value(&ProfileCoefficients::electric(), row.r, &cfg.params).abs();
            assert!(row.electric.abs() < 1e-12 * floor && row.magnetic.abs() < 1e-12 * floor);
            assert!(row.valid);
        }
    }

    #[test]
    fn static_row_reproduces_electric_value() {
        let mut cfg = small(Engine::ClosedForm, vec![60.0]);
        cfg.mollifier = MollifierSpec::gaussian(0.1);
        let grid = run_sweep(&cfg).unwrap();
        let row = &grid.rows[0];
        let k = cfg.params.profile_prefactor();
        assert_relative_eq!(row.electric, -cfg.params.delta_omega0 * k * 6.5 / 12f64.powi(7), max_relative = 1e-9);
    }

    #[test]
    fn near_zone_needs_opt_in_and_is_flagged() {
        let mut cfg = small(Engine::ClosedForm, vec![1.0]);
        cfg.r_grid.min = 5.0;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        cfg.allow_near_zone = true;
        let grid = run_sweep(&cfg).unwrap();
        assert!(!grid.rows[0].valid);
        assert!(grid.rows[1].valid);
    }

    #[test]
    fn config_validation() {
        let mut cfg = small(Engine::ClosedForm, vec![1.0]);
        cfg.r_grid.count = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = small(Engine::ClosedForm, vec![-1.0]);
        assert!(cfg.validate().is_err());
        cfg.t_values = vec![1.0];
        cfg.threads = Some(0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn empty_grid_gives_header_only() {
        let grid = run_sweep(&small(Engine::ClosedForm, vec![])).unwrap();
        let mut buf = Vec::new();
        write_csv(&grid, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_round_trips_bit_exactly() {
        let grid = run_sweep(&small(Engine::ClosedForm, vec![11.9, 12.05, 30.0])).unwrap();
        let mut buf = Vec::new();
        write_csv(&grid, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for (line, row) in text.lines().skip(1).zip(&grid.rows) {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols.len(), 10);
            let parsed: Vec<f64> = cols[..8].iter().map(|c| c.parse().unwrap()).collect();
            let want = [row.r, row.t, row.eta, row.electric, row.magnetic, row.total, row.delta_v, row.force];
            for (p, w) in parsed.iter().zip(want) {
                assert_eq!(p.to_bits(), w.to_bits());
            }
            assert_eq!(cols[9], "closedform");
        }
    }

    #[test]
    fn json_metadata_echoes_config() {
        let cfg = small(Engine::ClosedForm, vec![1.0]);
        let grid = run_sweep(&cfg).unwrap();
        let value = serde_json::to_value(&grid).unwrap();
        let meta = &value["metadata"]["config"];
        for key in [
            "params", "r_grid", "t_values", "mollifier", "regulator", "engine", "output", "threads",
            "allow_near_zone", "si_annotation",
        ] {
            assert!(meta.get(key).is_some(), "missing {key}");
        }
        let back: SweepConfig = serde_json::from_value(meta.clone()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn both_engine_appends_comparison_columns() {
        let mut cfg = small(Engine::Both, vec![36.0]);
        cfg.set_eta(0.5);
        let grid = run_sweep(&cfg).unwrap();
        assert!(grid.rows.iter().all(|r| r.rel_deviation.is_some()));
        let mut buf = Vec::new();
        write_csv(&grid, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(&format!("{CSV_HEADER}{CSV_BOTH_EXTRA}\n")));
    }

    #[test]
    fn set_eta_keeps_engines_matched() {
        let mut cfg = SweepConfig::default();
        cfg.set_eta(0.05);
        assert_eq!(cfg.mollifier.width, 0.05);
        assert_eq!(cfg.regulator.eta, 0.05);
        assert_relative_eq!(cfg.regulator.k_max, 1200.0);
    }
}
