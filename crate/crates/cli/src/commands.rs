use std::path::Path;

use ncdegree::algebra::Observable;
use ncdegree::bounds::{bound_family, optimize_bound, quadrature_observable, BoundResult};
use ncdegree::spec::{BoundCache, ComplexSpec, ObservableSpec, StateSpec, SCHEMA_VERSION};
use ncdegree::witness::{
    certify_bounds, check_monotone, check_nesting, pure_state_distance, squeezing_db, variance_from_db,
    CertificationResult, Measurement,
};
use ncdegree::{Direction, C64};
use serde::Serialize;

use crate::args::{BoundArgs, CertifyArgs, Format, OptimizerArgs, OutputArgs, PureBoundArgs, Table1Args};
use crate::cache;
use crate::manifest::RunManifest;
use crate::CliError;

/// Largest rank accepted by `table1`.
pub const MAX_TABLE_R: usize = 9;

/// Rendered command output. `failure` is set when the body is partial.
#[derive(Debug)]
pub struct Report {
    pub body: String,
    pub format: Format,
    pub manifest: RunManifest,
    pub failure: Option<CliError>,
}

/// Fixed-point formatting that never prints a negative zero.
pub fn fmt_fixed(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

fn csv_body<R: AsRef<[u8]>>(header: &[&str], rows: impl IntoIterator<Item = Vec<R>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Spec(format!("cannot read {}: {e}", path.display())))
}

fn validate_overrides(opt: &OptimizerArgs) -> Result<(), CliError> {
    opt.base_config().validate().map_err(|e| CliError::Usage(e.to_string()))
}

/// Writes the body to `out` (or stdout). CSV files get a sidecar
/// `<out>.manifest.json` since CSV has no place for the manifest.
pub fn emit(report: &Report, out: Option<&Path>) -> Result<(), CliError> {
    use std::io::Write;
    match out {
        Some(path) => {
            std::fs::write(path, &report.body).map_err(|e| CliError::io(path, e))?;
            if report.format == Format::Csv {
                let mut side = path.as_os_str().to_owned();
                side.push(".manifest.json");
                std::fs::write(&side, to_json(&report.manifest)).map_err(|e| CliError::io(&side, e))?;
            }
            Ok(())
        }
        None => std::io::stdout()
            .write_all(report.body.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn quadrature_db(observable: &Observable, bound: f64) -> Option<f64> {
    (*observable == quadrature_observable()).then(|| squeezing_db(bound).ok()).flatten()
}

// ---------------------------------------------------------------- table1

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub r: usize,
    pub bound: Option<f64>,
    pub squeezing_db: Option<f64>,
    pub seed: u64,
    pub status: String,
}

#[derive(Debug)]
pub struct Table1Outcome {
    pub rows: Vec<TableRow>,
    pub results: Vec<BoundResult>,
    pub failure: Option<CliError>,
}

/// `b'_r` of x(0)² for `r = 1..=max_r`. An optimizer failure keeps the rows
/// computed so far and appends an error row; a non-monotone family is an error.
pub fn compute_table1(max_r: usize, opt: &OptimizerArgs) -> Result<Table1Outcome, CliError> {
    if !(1..=MAX_TABLE_R).contains(&max_r) {
        return Err(CliError::Usage(format!("--max-r must be in 1..={MAX_TABLE_R}, got {max_r}")));
    }
    validate_overrides(opt)?;
    let obs = quadrature_observable();
    let ranks: Vec<usize> = (1..=max_r).collect();
    let family = bound_family(&obs, &ranks, 1, Direction::Inf, |r| opt.config_for_rank(r));
    let pairs: Vec<(usize, f64)> = family.results.iter().map(|b| (b.r, b.bound)).collect();
    check_nesting(Direction::Inf, &pairs)?;

    let mut rows: Vec<TableRow> = family
        .results
        .iter()
        .map(|b| TableRow {
            r: b.r,
            bound: Some(b.bound),
            squeezing_db: squeezing_db(b.bound).ok(),
            seed: opt.config_for_rank(b.r).seed,
            status: if b.is_stationary() { "ok" } else { "nonstationary" }.to_string(),
        })
        .collect();
    let failure = family.failure.map(|(r, e)| {
        rows.push(TableRow {
            r,
            bound: None,
            squeezing_db: None,
            seed: opt.config_for_rank(r).seed,
            status: format!("error: {e}"),
        });
        CliError::from(e)
    });
    Ok(Table1Outcome {
        rows,
        results: family.results,
        failure,
    })
}

pub const TABLE1_HEADER: [&str; 5] = ["r", "bound", "squeezing_db", "seed", "status"];

pub fn table1_csv(rows: &[TableRow]) -> String {
    csv_body(
        &TABLE1_HEADER,
        rows.iter().map(|row| {
            vec![
                row.r.to_string(),
                row.bound.map(|b| fmt_fixed(b, 6)).unwrap_or_default(),
                row.squeezing_db.map(|d| fmt_fixed(d, 2)).unwrap_or_default(),
                row.seed.to_string(),
                row.status.clone(),
            ]
        }),
    )
}

#[derive(Serialize)]
struct Table1Json<'a> {
    schema_version: u32,
    manifest: &'a RunManifest,
    observable: ObservableSpec,
    direction: Direction,
    rows: &'a [TableRow],
    results: &'a [BoundResult],
}

pub fn run_table1(args: &Table1Args) -> Result<Report, CliError> {
    let outcome = compute_table1(args.max_r, &args.optimizer)?;
    let manifest =
        RunManifest::new("table1", &args.optimizer, args.output.out.as_deref()).with("max_r", args.max_r);
    let format = args.output.format.unwrap_or(Format::Csv);
    let body = match format {
        Format::Csv => table1_csv(&outcome.rows),
        Format::Json => to_json(&Table1Json {
            schema_version: SCHEMA_VERSION,
            manifest: &manifest,
            observable: ObservableSpec::from_observable(&quadrature_observable()),
            direction: Direction::Inf,
            rows: &outcome.rows,
            results: &outcome.results,
        }),
    };
    Ok(Report {
        body,
        format,
        manifest,
        failure: outcome.failure,
    })
}

// ---------------------------------------------------------------- pure-bound

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PureRow {
    pub parameter: &'static str,
    pub value: Option<f64>,
    pub r: usize,
    pub bound: f64,
    /// `2(1 − b_r)`, squared distance to the closest r-term superposition.
    pub distance: f64,
    pub seed: u64,
}

/// `start:stop:count` (inclusive, evenly spaced) or a comma-separated list.
pub fn parse_sweep(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |what: &str| CliError::Usage(format!("invalid sweep `{text}`: {what}"));
    let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let values: Vec<f64> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(bad("expected start:stop:count"));
        };
        let (start, stop) = (number(start)?, number(stop)?);
        let count: usize = count.trim().parse().map_err(|_| bad("count must be a positive integer"))?;
        match count {
            0 => return Err(bad("count must be a positive integer")),
            1 => vec![start],
            n => (0..n).map(|k| start + (stop - start) * k as f64 / (n - 1) as f64).collect(),
        }
    } else {
        text.split(',').map(number).collect::<Result<_, _>>()?
    };
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(bad("values must be finite and nonnegative"));
    }
    Ok(values)
}

/// Swept parameter of a state spec and its current value.
fn sweep_parameter(spec: &StateSpec) -> Option<(&'static str, f64)> {
    match spec {
        StateSpec::Compass { beta, .. } => Some(("beta", *beta)),
        StateSpec::Squeezed { xi } => Some(("xi", C64::from(*xi).norm())),
        _ => None,
    }
}

/// Replaces β, or |ξ| keeping the phase of ξ.
fn with_parameter(spec: &StateSpec, value: f64) -> Result<StateSpec, CliError> {
    match spec {
        StateSpec::Compass { components, .. } => Ok(StateSpec::Compass {
            components: *components,
            beta: value,
        }),
        StateSpec::Squeezed { xi } => {
            let phase = C64::from(*xi).arg();
            Ok(StateSpec::Squeezed {
                xi: ComplexSpec::from(C64::from_polar(value, phase)),
            })
        }
        _ => Err(CliError::Usage(
            "--sweep needs a compass (cat) or squeezed state spec".into(),
        )),
    }
}

pub fn compute_pure_bound(
    spec: &StateSpec,
    ranks: &[usize],
    sweep: Option<&[f64]>,
    opt: &OptimizerArgs,
) -> Result<(Vec<PureRow>, Vec<BoundResult>), CliError> {
    validate_overrides(opt)?;
    let mut ranks = ranks.to_vec();
    ranks.sort_unstable();
    ranks.dedup();
    if ranks.first().is_none_or(|&r| r == 0) {
        return Err(CliError::Usage("--r needs positive ranks".into()));
    }
    let points: Vec<(Option<(&'static str, f64)>, StateSpec)> = match sweep {
        Some(values) => {
            let name = sweep_parameter(spec).map(|p| p.0).unwrap_or("none");
            values
                .iter()
                .map(|&v| Ok((Some((name, v)), with_parameter(spec, v)?)))
                .collect::<Result<_, CliError>>()?
        }
        None => vec![(sweep_parameter(spec), spec.clone())],
    };

    let mut rows = Vec::new();
    let mut results = Vec::new();
    for (param, point) in points {
        let psi = point.to_state()?;
        let modes = psi.modes();
        let family = bound_family(&Observable::Projector(psi), &ranks, modes, Direction::Sup, |r| {
            opt.config_for_rank(r)
        });
        if let Some((_, e)) = family.failure {
            return Err(e.into());
        }
        let pairs: Vec<(usize, f64)> = family.results.iter().map(|b| (b.r, b.bound)).collect();
        check_monotone(Direction::Sup, &pairs)?;
        for b in family.results {
            rows.push(PureRow {
                parameter: param.map_or("none", |p| p.0),
                value: param.map(|p| p.1),
                r: b.r,
                bound: b.bound,
                distance: pure_state_distance(b.bound)?,
                seed: opt.config_for_rank(b.r).seed,
            });
            results.push(b);
        }
    }
    Ok((rows, results))
}

pub const PURE_HEADER: [&str; 6] = ["parameter", "value", "r", "bound", "distance", "seed"];

pub fn pure_bound_csv(rows: &[PureRow]) -> String {
    csv_body(
        &PURE_HEADER,
        rows.iter().map(|row| {
            vec![
                row.parameter.to_string(),
                row.value.map(|v| fmt_fixed(v, 6)).unwrap_or_default(),
                row.r.to_string(),
                fmt_fixed(row.bound, 6),
                fmt_fixed(row.distance, 6),
                row.seed.to_string(),
            ]
        }),
    )
}

#[derive(Serialize)]
struct PureJson<'a> {
    schema_version: u32,
    manifest: &'a RunManifest,
    state: &'a StateSpec,
    rows: &'a [PureRow],
    results: &'a [BoundResult],
}

pub fn run_pure_bound(args: &PureBoundArgs) -> Result<Report, CliError> {
    let mut manifest = RunManifest::new("pure-bound", &args.optimizer, args.output.out.as_deref())
        .with("r", &args.r)
        .with("sweep", &args.sweep);
    let text = match (&args.spec, &args.state) {
        (Some(path), _) => {
            let text = read_input(path)?;
            manifest = manifest.with_input(path, &text);
            text
        }
        (None, Some(inline)) => {
            manifest = manifest.with("state", inline);
            inline.clone()
        }
        (None, None) => return Err(CliError::Usage("pass a state with --spec or --state".into())),
    };
    let spec: StateSpec = serde_json::from_str(&text).map_err(|e| CliError::Spec(e.to_string()))?;
    let sweep = args.sweep.as_deref().map(parse_sweep).transpose()?;
    let (rows, results) = compute_pure_bound(&spec, &args.r, sweep.as_deref(), &args.optimizer)?;
    let format = args.output.format.unwrap_or(Format::Csv);
    let body = match format {
        Format::Csv => pure_bound_csv(&rows),
        Format::Json => to_json(&PureJson {
            schema_version: SCHEMA_VERSION,
            manifest: &manifest,
            state: &spec,
            rows: &rows,
            results: &results,
        }),
    };
    Ok(Report {
        body,
        format,
        manifest,
        failure: None,
    })
}

// ---------------------------------------------------------------- certify

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub r: usize,
    pub bound: f64,
    pub db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasuredValue {
    pub value: f64,
    pub std_error: Option<f64>,
    pub db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyReport {
    pub schema_version: u32,
    pub manifest: RunManifest,
    pub observable: ObservableSpec,
    pub direction: Direction,
    pub bounds: Vec<BoundRow>,
    pub measured: MeasuredValue,
    pub violated_r: Vec<usize>,
    pub degree_exceeds: Option<usize>,
    pub statement: String,
    pub margin: f64,
    pub margin_in_std_errors: Option<f64>,
    pub max_r_checked: usize,
    pub seed: u64,
}

/// Bound family `r = 1..=max_r`, from the cache when it covers the request.
/// Families are deterministic, so a cached prefix equals a fresh computation.
pub fn bound_family_cached(
    observable: &ObservableSpec,
    direction: Direction,
    max_r: usize,
    opt: &OptimizerArgs,
    cache_dir: &Path,
    no_recompute: bool,
) -> Result<Vec<BoundResult>, CliError> {
    if max_r == 0 {
        return Err(CliError::Usage("--max-r must be at least 1".into()));
    }
    validate_overrides(opt)?;
    let obs = observable.to_observable()?;
    let key = cache::cache_key(observable, direction, opt);
    let path = cache::cache_path(cache_dir, &key);
    let cached = cache::load(&path, &key);
    if cached.len() >= max_r {
        return Ok(cached[..max_r].to_vec());
    }
    if no_recompute {
        return Err(CliError::Usage(format!(
            "cache {} holds bounds up to r = {}, need r = {max_r}, and --no-recompute is set",
            path.display(),
            cached.len()
        )));
    }
    let ranks: Vec<usize> = (1..=max_r).collect();
    let family = bound_family(&obs, &ranks, obs.modes(), direction, |r| opt.config_for_rank(r));
    let pairs: Vec<(usize, f64)> = family.results.iter().map(|b| (b.r, b.bound)).collect();
    check_nesting(direction, &pairs)?;
    if family.results.len() > cached.len() {
        let entry = BoundCache {
            schema_version: SCHEMA_VERSION,
            key,
            observable: observable.clone(),
            direction,
            config: opt.base_config(),
            results: family.results.clone(),
        };
        if let Err(e) = cache::store(&path, &entry) {
            eprintln!("warning: could not write bounds cache: {e}");
        }
    }
    match family.failure {
        Some((_, e)) => Err(e.into()),
        None => Ok(family.results),
    }
}

pub fn certify_report(
    args: &CertifyArgs,
    observable: ObservableSpec,
    manifest: RunManifest,
    cache_dir: &Path,
) -> Result<CertifyReport, CliError> {
    let direction = Direction::from(args.direction);
    let value = match (args.value, args.db) {
        (Some(v), None) => v,
        (None, Some(db)) => variance_from_db(db)?,
        _ => return Err(CliError::Usage("pass exactly one of --value and --db".into())),
    };
    let measured = Measurement {
        value,
        std_error: args.std_error,
    };
    let family = bound_family_cached(
        &observable,
        direction,
        args.max_r,
        &args.optimizer,
        cache_dir,
        args.no_recompute,
    )?;
    let pairs: Vec<(usize, f64)> = family.iter().map(|b| (b.r, b.bound)).collect();
    let result: CertificationResult = certify_bounds(direction, &pairs, measured)?;
    let obs = observable.to_observable()?;
    Ok(CertifyReport {
        schema_version: SCHEMA_VERSION,
        seed: manifest.seed,
        manifest,
        direction,
        bounds: pairs
            .iter()
            .map(|&(r, bound)| BoundRow {
                r,
                bound,
                db: quadrature_db(&obs, bound),
            })
            .collect(),
        measured: MeasuredValue {
            value,
            std_error: args.std_error,
            db: args.db,
        },
        degree_exceeds: result.degree_exceeds(),
        violated_r: result.violated_r,
        statement: result.certified_statement,
        margin: result.margin,
        margin_in_std_errors: result.margin_in_std_errors,
        max_r_checked: result.max_r_checked,
        observable,
    })
}

fn json_only(output: &OutputArgs, command: &str) -> Result<Format, CliError> {
    match output.format {
        None | Some(Format::Json) => Ok(Format::Json),
        Some(Format::Csv) => Err(CliError::Usage(format!("{command} only writes JSON"))),
    }
}

pub fn run_certify(args: &CertifyArgs) -> Result<Report, CliError> {
    let format = json_only(&args.output, "certify")?;
    let mut manifest = RunManifest::new("certify", &args.optimizer, args.output.out.as_deref())
        .with("direction", Direction::from(args.direction))
        .with("max_r", args.max_r)
        .with("value", args.value)
        .with("db", args.db)
        .with("std_error", args.std_error)
        .with("no_recompute", args.no_recompute);
    let observable = match &args.spec {
        Some(path) => {
            let text = read_input(path)?;
            manifest = manifest.with_input(path, &text);
            serde_json::from_str::<ObservableSpec>(&text).map_err(|e| CliError::Spec(e.to_string()))?
        }
        None => ObservableSpec::from_observable(&quadrature_observable()),
    };
    let report = certify_report(args, observable, manifest.clone(), &cache::cache_dir())?;
    Ok(Report {
        body: to_json(&report),
        format,
        manifest,
        failure: None,
    })
}

// ---------------------------------------------------------------- bound

#[derive(Serialize)]
struct BoundJson<'a> {
    schema_version: u32,
    manifest: &'a RunManifest,
    observable: &'a ObservableSpec,
    seed: u64,
    result: &'a BoundResult,
}

pub fn run_bound(args: &BoundArgs) -> Result<Report, CliError> {
    let format = json_only(&args.output, "bound")?;
    validate_overrides(&args.optimizer)?;
    let direction = Direction::from(args.direction);
    let text = read_input(&args.spec)?;
    let manifest = RunManifest::new("bound", &args.optimizer, args.output.out.as_deref())
        .with("r", args.r)
        .with("direction", direction)
        .with("modes", args.modes)
        .with_input(&args.spec, &text);
    let spec: ObservableSpec = serde_json::from_str(&text).map_err(|e| CliError::Spec(e.to_string()))?;
    let obs = spec.to_observable()?;
    let modes = args.modes.unwrap_or(obs.modes());
    if modes != obs.modes() {
        return Err(CliError::Spec(format!(
            "--modes {modes} does not match the {}-mode spec",
            obs.modes()
        )));
    }
    if args.r == 0 {
        return Err(CliError::Usage("--r must be at least 1".into()));
    }
    let config = args.optimizer.config_for_rank(args.r);
    let result = optimize_bound(&obs, args.r, modes, direction, &config)?;
    if !result.is_stationary() {
        eprintln!(
            "warning: commutator residual {:?} at the optimum exceeds the stationarity limit",
            result.stationarity
        );
    }
    let body = to_json(&BoundJson {
        schema_version: SCHEMA_VERSION,
        manifest: &manifest,
        observable: &spec,
        seed: config.seed,
        result: &result,
    });
    Ok(Report {
        body,
        format,
        manifest,
        failure: None,
    })
}
