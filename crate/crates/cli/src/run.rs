use crate::args::*;
use chordlab::distribution::{
    cdf_curve, density_endpoints, region_probability, transform_curve, DistributionError, ModelCdf,
    Provenance, QuadratureSpec,
};
use chordlab::measures::{RadialMeasure, TabulatedCdf};
use chordlab::montecarlo::{ks_statistic, run_mc, run_mc_histogram};
use chordlab::ngon::{self, NgonError};
use chordlab::serialize::fmt_g17;
use chordlab::Model;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum CliError {
    /// Bad flag combination or value: exit 2.
    Usage(String),
    /// Unreadable or malformed input file: exit 2.
    Input(String),
    /// Quadrature, series, or domain failure at run time: exit 3.
    Numerical(String),
    /// Output could not be written: exit 3.
    Io(std::io::Error),
    /// N-gon dedup could not separate clusters: exit 4.
    Ambiguous(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
            CliError::Ambiguous(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Input(m) => write!(f, "{m}"),
            CliError::Numerical(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "cannot write output: {e}"),
            CliError::Ambiguous(m) => write!(f, "{m}"),
        }
    }
}

impl From<DistributionError> for CliError {
    fn from(e: DistributionError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<NgonError> for CliError {
    fn from(e: NgonError) -> Self {
        match e {
            NgonError::AmbiguousDedup { .. } => CliError::Ambiguous(e.to_string()),
            NgonError::Domain(_) => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    let threads = cli.threads.or_else(|| {
        std::env::var("CHORDLAB_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    match threads {
        Some(t) if t >= 1 => rayon_pool(t).install(|| run_command(cli.command)),
        Some(_) => Err(CliError::Usage("--threads must be at least 1".into())),
        None => run_command(cli.command),
    }
}

fn rayon_pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool construction cannot fail for positive sizes")
}

fn run_command(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Cdf(a) => cmd_cdf(a),
        Command::Density(a) => cmd_density(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Kstest(a) => cmd_kstest(a),
        Command::Ngon(a) => cmd_ngon(a),
        Command::Transform(a) => cmd_transform(a),
        Command::Region(a) => cmd_region(a),
    }
}

fn build_grid(g: &GridArgs) -> Result<Vec<f64>, CliError> {
    if !(g.rmin >= 0.0 && g.rmax > g.rmin) {
        return Err(CliError::Usage(format!(
            "need 0 <= rmin < rmax, got rmin={} rmax={}",
            g.rmin, g.rmax
        )));
    }
    if g.steps < 2 {
        return Err(CliError::Usage(format!(
            "need at least 2 grid steps, got {}",
            g.steps
        )));
    }
    let n = g.steps;
    let grid = match g.spacing {
        Spacing::Linear => (0..n)
            .map(|i| g.rmin + (g.rmax - g.rmin) * i as f64 / (n - 1) as f64)
            .collect(),
        Spacing::Log => {
            if g.rmin <= 0.0 {
                return Err(CliError::Usage("log spacing needs rmin > 0".into()));
            }
            let (lo, hi) = (g.rmin.ln(), g.rmax.ln());
            (0..n)
                .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    };
    Ok(grid)
}

fn quad_spec(tol: f64) -> Result<QuadratureSpec, CliError> {
    if !(tol > 0.0) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    Ok(QuadratureSpec {
        abs_tol: tol,
        ..QuadratureSpec::default()
    })
}

/// Writes `data` to `out` (file) or stdout, and the summary to the other
/// channel so piped data stays clean.
fn emit(out: &Option<PathBuf>, data: &str, summary: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            write_file(path, data)?;
            println!("{summary} -> {}", path.display());
        }
        None => {
            std::io::stdout().write_all(data.as_bytes())?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn write_file(path: &Path, data: &str) -> Result<(), CliError> {
    std::fs::write(path, data).map_err(CliError::Io)
}

fn cmd_cdf(a: CurveArgs) -> Result<(), CliError> {
    let grid = build_grid(&a.grid)?;
    let q = quad_spec(a.tol)?;
    let model: Model = a.model.into();
    let curve = cdf_curve(model, &grid, &q)?;
    let data = match a.output.format {
        Format::Csv => curve.to_csv(),
        Format::Json => {
            let mut s = curve.to_json();
            s.push('\n');
            s
        }
    };
    let summary = format!("cdf model={model} points={}", curve.points.len());
    emit(&a.output.out, &data, &summary)
}

fn cmd_density(a: CurveArgs) -> Result<(), CliError> {
    if a.model != ModelArg::Endpoints {
        return Err(CliError::Usage(
            "density is available for --model endpoints only".into(),
        ));
    }
    let grid = build_grid(&a.grid)?;
    let q = quad_spec(a.tol)?;
    let mut points = Vec::with_capacity(grid.len());
    let mut skipped = 0usize;
    for &r in &grid {
        // The density has a pole at r = 1; skip that grid point.
        if r == 1.0 {
            skipped += 1;
            continue;
        }
        points.push((r, density_endpoints(r, &q)?));
    }
    let data = match a.output.format {
        Format::Csv => {
            let mut s = String::from("r,value\n");
            for &(r, v) in &points {
                s.push_str(&format!("{},{}\n", fmt_g17(r), fmt_g17(v)));
            }
            s
        }
        Format::Json => {
            let pts: Vec<serde_json::Value> = points
                .iter()
                .map(|&(r, v)| serde_json::json!([r, v]))
                .collect();
            let provenance = if points.iter().any(|&(r, _)| r > 1.0) {
                Provenance::Quadrature
            } else {
                Provenance::ClosedForm
            };
            let mut s = serde_json::json!({
                "model": "endpoints",
                "provenance": provenance.name(),
                "points": pts,
            })
            .to_string();
            s.push('\n');
            s
        }
    };
    let summary = format!(
        "density model=endpoints points={} skipped_singular={skipped}",
        points.len()
    );
    emit(&a.output.out, &data, &summary)
}

fn cmd_sample(a: SampleArgs) -> Result<(), CliError> {
    if a.n < 1 {
        return Err(CliError::Usage("need --n >= 1".into()));
    }
    let model: Model = a.model.into();
    if a.histogram {
        if a.output.format == Format::Csv {
            return Err(CliError::Usage(
                "--histogram exports JSON; pass --format json".into(),
            ));
        }
        let hist = run_mc_histogram(model, a.n, a.seed);
        let mut data = hist.to_json();
        data.push('\n');
        let summary = format!(
            "sample model={model} n={} seed={} retained={} parallel_skips={}",
            a.n, a.seed, hist.count, hist.parallel_skips
        );
        return emit(&a.output.out, &data, &summary);
    }
    if a.output.format == Format::Json {
        return Err(CliError::Usage(
            "distance export is CSV; use --histogram for JSON".into(),
        ));
    }
    let sample = run_mc(model, a.n, a.seed);
    let summary = format!(
        "sample model={model} n={} seed={} retained={} parallel_skips={}",
        a.n, a.seed, sample.count, sample.parallel_skips
    );
    emit(&a.output.out, &sample.to_csv(), &summary)
}

fn cmd_kstest(a: KstestArgs) -> Result<(), CliError> {
    if a.n < 1 {
        return Err(CliError::Usage("need --n >= 1".into()));
    }
    if !(a.threshold > 0.0) {
        return Err(CliError::Usage("--threshold must be positive".into()));
    }
    let model: Model = a.model.into();
    let q = quad_spec(a.tol)?;
    let sample = run_mc(model, a.n, a.seed);
    if sample.count == 0 {
        return Err(CliError::Numerical(
            "every trial was numerically parallel; nothing to test".into(),
        ));
    }
    let r_max = sample.distances.last().copied().unwrap_or(1.0).max(2.0);
    let cdf = ModelCdf::new(model, r_max, &q)?;
    let d = ks_statistic(&sample, |r| cdf.eval(r));
    let verdict = if d <= a.threshold { "PASS" } else { "FAIL" };
    println!(
        "kstest model={model} n={} seed={} D={d:.6} threshold={} {verdict}",
        a.n, a.seed, a.threshold
    );
    Ok(())
}

fn cmd_ngon(a: NgonArgs) -> Result<(), CliError> {
    if !(a.multiplicity || a.lines || a.distinct) {
        return Err(CliError::Usage(
            "choose at least one of --multiplicity, --lines, --distinct".into(),
        ));
    }
    if (a.multiplicity || a.lines) && a.radii.is_empty() {
        return Err(CliError::Usage(
            "--multiplicity and --lines need --radii".into(),
        ));
    }

    let mut report = ngon::NgonReport {
        n: a.n,
        radii: a.radii.clone(),
        total_pairs: 0,
        ..Default::default()
    };
    let mut summary = format!("ngon n={}", a.n);

    if a.multiplicity {
        let part = ngon::count_with_multiplicity(a.n, &a.radii)?;
        summary.push_str(&format!(
            " pairs={} within={:?}",
            part.total_pairs, part.with_multiplicity
        ));
        report.total_pairs = part.total_pairs;
        report.with_multiplicity = part.with_multiplicity;
    }
    if a.lines {
        let part = ngon::lines_histogram(a.n, &a.radii)?;
        summary.push_str(&format!(
            " lines_within={:?} nonparallel={} parallel={}",
            part.lines, part.nonparallel_pairs, part.parallel_pairs
        ));
        report.total_pairs = part.total_pairs;
        report.lines = part.lines;
        report.nonparallel_pairs = part.nonparallel_pairs;
        report.parallel_pairs = part.parallel_pairs;
    }

    let pr = ngon::poonen_rubinstein(a.n)?;
    report.pr_formula_value = Some(pr);
    if a.distinct {
        let distinct = ngon::distinct_count(a.n, a.snap_tol)?;
        report.distinct_interior = Some(distinct);
        summary.push_str(&format!(
            " distinct={distinct} pr={pr} matches PR formula: {}",
            distinct as i128 == pr
        ));
    } else {
        summary.push_str(&format!(" pr={pr}"));
    }

    match (&a.output.out, a.output.format) {
        (None, Format::Csv) => {
            // Summary-only invocation; the report serialization is JSON.
            println!("{summary}");
            Ok(())
        }
        (out, _) => {
            let mut data = report.to_json();
            data.push('\n');
            emit(out, &data, &summary)
        }
    }
}

fn cmd_transform(a: TransformArgs) -> Result<(), CliError> {
    let grid = build_grid(&a.grid)?;
    let q = quad_spec(a.tol)?;
    let measure = match (&a.model, &a.measure_file) {
        (Some(m), None) => Model::from(*m).measure(),
        (None, Some(path)) => {
            let tab = TabulatedCdf::from_csv_path(path)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            RadialMeasure::Custom(tab)
        }
        _ => {
            return Err(CliError::Usage(
                "pass exactly one of --model or --measure-file".into(),
            ))
        }
    };
    let curve = transform_curve(&measure, &grid, &q)?;
    let data = match a.output.format {
        Format::Csv => curve.to_csv(),
        Format::Json => {
            let mut s = curve.to_json();
            s.push('\n');
            s
        }
    };
    let summary = format!(
        "transform measure={} points={}",
        curve.model_label,
        curve.points.len()
    );
    emit(&a.output.out, &data, &summary)
}

fn cmd_region(a: RegionArgs) -> Result<(), CliError> {
    let q = quad_spec(a.tol)?;
    let model: Model = a.model.into();
    let p = match region_probability(model, a.rlo, a.rhi, a.thlo, a.thhi, &q) {
        Ok(p) => p,
        Err(DistributionError::Domain { .. }) => {
            return Err(CliError::Usage(
                "need 0 <= rlo <= rhi and 0 <= thhi - thlo <= 2*pi".into(),
            ))
        }
        Err(e) => return Err(e.into()),
    };
    println!(
        "region model={model} r=[{},{}] theta=[{},{}] P={}",
        a.rlo,
        a.rhi,
        a.thlo,
        a.thhi,
        fmt_g17(p)
    );
    Ok(())
}
