use std::fs::File;
use std::io::{self, Write};
use std::path::Path;
use std::time::Instant;

use gprace_core::decomp::{write_angle_row, ANGLE_CSV_HEADER};
use gprace_core::fmt::sig9;
use gprace_core::fourier::FourierError;
use gprace_core::hecke::{mean_value, write_signs_csv};
use gprace_core::pipeline::{for_each_angle_prime, for_each_prime_event, PipelineStats};
use gprace_core::race::{
    write_race_csv, write_signchanges_csv, AngleHistogram, AngleKind, Predicate, RaceReport, RaceSeries,
};
use gprace_core::zdist::{aggregate_ord_with, load_zeros, simulate_distribution, variance_formula, write_dist_csv, write_summary};
use gprace_core::{FourierSpec, HistogramSpec, RaceConfig, RaceRunner, RankModel, SieveConfig};

use crate::output::{ensure_dir, io_err, write_atomic, Manifest};
use crate::{AngleChoice, CliError, DecomposeArgs, DistArgs, HistArgs, MeanArgs, PhiArgs, PhiChoice, RaceArgs, SieveArgs, SignsArgs};

const MIN_RACE_LIMIT: u64 = 100;
const DEFAULT_TRUNCATION: u64 = 10_000;

fn sieve_config(args: &SieveArgs, min_limit: u64) -> Result<SieveConfig, CliError> {
    if args.limit < min_limit {
        return Err(CliError::Config(format!("--limit must be at least {min_limit}, got {}", args.limit)));
    }
    SieveConfig::with_segment_size(args.limit, args.segment_size).map_err(|e| CliError::Config(e.to_string()))
}

fn record_sieve(manifest: &mut Manifest, args: &SieveArgs, stats: &PipelineStats) {
    manifest.set("limit", args.limit);
    manifest.set("segment_size", args.segment_size);
    manifest.set("primes", stats.primes);
    manifest.set("split_primes", stats.split_primes);
}

fn print_lines(lines: &[(String, String)]) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for (k, v) in lines {
        writeln!(out, "{k}={v}").map_err(io_err(Path::new("<stdout>")))?;
    }
    Ok(())
}

fn density_lines(name: &str, series: &RaceSeries, predicate: Predicate, lines: &mut Vec<(String, String)>) -> Result<(), CliError> {
    let (lo, hi) = series.log_density(predicate).map_err(|e| CliError::Config(e.to_string()))?;
    lines.push((format!("{name}_lower"), sig9(lo)));
    lines.push((format!("{name}_upper"), sig9(hi)));
    Ok(())
}

fn race_summary(r: &RaceReport) -> Result<Vec<(String, String)>, CliError> {
    let mut lines = vec![
        ("limit".to_string(), r.limit.to_string()),
        ("primes".to_string(), r.primes.to_string()),
        ("split_primes".to_string(), r.split_primes.to_string()),
        ("checkpoints".to_string(), r.checkpoints.len().to_string()),
        ("D1".to_string(), r.d1.value().to_string()),
        ("D2".to_string(), r.d2.value().to_string()),
        ("E_phi1".to_string(), sig9(r.final_e_phi1)),
        ("F_phi2".to_string(), sig9(r.final_f_phi2)),
        ("min_D1".to_string(), r.d1.min_value().to_string()),
        ("max_D1".to_string(), r.d1.max_value().to_string()),
        ("min_D2".to_string(), r.d2.min_value().to_string()),
        ("max_D2".to_string(), r.d2.max_value().to_string()),
        ("sign_changes_D1".to_string(), r.d1.sign_changes().len().to_string()),
        ("sign_changes_D2".to_string(), r.d2.sign_changes().len().to_string()),
    ];
    density_lines("logdensity_D1_negative", &r.d1, Predicate::Negative, &mut lines)?;
    density_lines("logdensity_D2_nonnegative", &r.d2, Predicate::NonNegative, &mut lines)?;
    let opt = |v: Option<f64>| v.map(sig9).unwrap_or_else(|| "undefined".into());
    lines.push(("log_average_E_phi1".into(), opt(r.log_average_e_phi1)));
    lines.push(("log_average_F_phi2".into(), opt(r.log_average_f_phi2)));
    Ok(lines)
}

pub fn race(args: &RaceArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let config = sieve_config(&args.sieve, MIN_RACE_LIMIT)?;
    let race_config = RaceConfig { checkpoint_ratio: args.checkpoint_ratio, ..RaceConfig::default() };
    let mut runner = RaceRunner::new(race_config).map_err(|e| CliError::Config(e.to_string()))?;
    let out_dir = &args.sieve.out_dir;
    ensure_dir(out_dir)?;

    let stats = for_each_prime_event(&config, |event| Ok(runner.update(event)?))?;
    let report = runner.finish(args.sieve.limit).map_err(gprace_core::Error::from)?;

    let files = vec![
        write_atomic(out_dir, "race.csv", |w| write_race_csv(w, &report.checkpoints))?,
        write_atomic(out_dir, "signchanges.csv", |w| write_signchanges_csv(w, &report.d1, &report.d2))?,
    ];
    let mut manifest = Manifest::new("race");
    record_sieve(&mut manifest, &args.sieve, &stats);
    manifest.set("checkpoint_start", race_config.checkpoint_start);
    manifest.set("checkpoint_ratio", race_config.checkpoint_ratio);
    manifest.set("average_from", race_config.average_from);
    manifest.write(out_dir, started.elapsed(), &files)?;
    print_lines(&race_summary(&report)?)
}

pub fn hist(args: &HistArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let config = sieve_config(&args.sieve, MIN_RACE_LIMIT)?;
    let kinds: &[(AngleKind, &str)] = match args.angle {
        AngleChoice::Theta => &[(AngleKind::Theta, "hist.csv")],
        AngleChoice::ThetaTilde => &[(AngleKind::ThetaTilde, "hist_tilde.csv")],
        AngleChoice::Both => &[(AngleKind::Theta, "hist.csv"), (AngleKind::ThetaTilde, "hist_tilde.csv")],
    };
    let mut hists = kinds
        .iter()
        .map(|&(kind, _)| {
            HistogramSpec::new(args.bins, kind).and_then(AngleHistogram::new).map_err(|e| CliError::Config(e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let out_dir = &args.sieve.out_dir;
    ensure_dir(out_dir)?;

    let stats = for_each_angle_prime(&config, |ap| {
        hists.iter_mut().for_each(|h| h.add(ap));
        Ok(())
    })?;

    let mut files = Vec::new();
    let mut lines = vec![("split_primes".to_string(), stats.split_primes.to_string())];
    for (h, &(kind, name)) in hists.iter().zip(kinds) {
        files.push(write_atomic(out_dir, name, |w| h.write_csv(w))?);
        let label = match kind {
            AngleKind::Theta => "theta",
            AngleKind::ThetaTilde => "theta_tilde",
        };
        for (pole, below, above) in h.pole_signatures() {
            lines.push((format!("{label}_pole_{}", sig9(pole)), format!("{},{}", sig9(below), sig9(above))));
        }
        let corr = h.overlay_correlation().map(sig9).unwrap_or_else(|| "undefined".into());
        lines.push((format!("{label}_overlay_correlation"), corr));
    }
    let mut manifest = Manifest::new("hist");
    record_sieve(&mut manifest, &args.sieve, &stats);
    manifest.set("bins", args.bins);
    manifest.write(out_dir, started.elapsed(), &files)?;
    print_lines(&lines)
}

fn rank_model(path: Option<&Path>) -> Result<RankModel, CliError> {
    match path {
        None => Ok(RankModel::Hypothesis),
        Some(p) => {
            let file = File::open(p).map_err(io_err(p))?;
            RankModel::from_csv(file).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        }
    }
}

pub fn signs(args: &SignsArgs) -> Result<(), CliError> {
    let model = rank_model(args.ranks.as_deref())?;
    let mut buf = Vec::new();
    write_signs_csv(&mut buf, args.family, args.max_m, &model).map_err(gprace_core::Error::from)?;
    io::stdout().lock().write_all(&buf).map_err(io_err(Path::new("<stdout>")))
}

fn test_function(phi: &PhiArgs) -> Result<(FourierSpec, String), CliError> {
    let n = phi.n.unwrap_or(DEFAULT_TRUNCATION);
    match (phi.phi, &phi.coeffs) {
        (Some(PhiChoice::Phi1), None) => Ok((FourierSpec::phi1(n), "phi1".into())),
        (Some(PhiChoice::Phi2), None) => Ok((FourierSpec::phi2(n), "phi2".into())),
        (None, Some(path)) => {
            let file = File::open(path).map_err(io_err(path))?;
            let spec = FourierSpec::from_csv(file).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let spec = match phi.n {
                Some(n) => spec.truncated(n),
                None => spec,
            };
            Ok((spec, path.display().to_string()))
        }
        _ => Err(CliError::Config("give exactly one of --phi or --coeffs".into())),
    }
}

fn theorem_text(theorem: &Option<Result<f64, FourierError>>) -> String {
    match theorem {
        None => "unavailable".into(),
        Some(Ok(v)) => sig9(*v),
        Some(Err(FourierError::Divergent { direction, .. })) => {
            format!("divergent({})", if *direction >= 0.0 { "+inf" } else { "-inf" })
        }
        Some(Err(e)) => format!("error({e})"),
    }
}

pub fn mean(args: &MeanArgs) -> Result<(), CliError> {
    let (spec, name) = test_function(&args.phi)?;
    let model = rank_model(args.ranks.as_deref())?;
    let mv = mean_value(args.family, &spec, &model);
    print_lines(&[
        ("family".into(), args.family.to_string()),
        ("phi".into(), name),
        ("N".into(), spec.truncation().to_string()),
        ("mean".into(), sig9(mv.value)),
        ("partial_sum".into(), sig9(mv.partial_sum)),
        ("theorem".into(), theorem_text(&mv.theorem)),
    ])
}

pub fn dist(args: &DistArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let (spec, name) = test_function(&args.phi)?;
    if args.merge_tol.is_nan() || args.merge_tol < 0.0 {
        return Err(CliError::Config("--merge-tol must be non-negative".into()));
    }
    let zeros = load_zeros(&args.zeros).map_err(|e| match e {
        gprace_core::zdist::ZdistError::Io(source) => CliError::Io { path: args.zeros.clone(), source },
        other => CliError::Config(format!("{}: {other}", args.zeros.display())),
    })?;
    let mut agg = aggregate_ord_with(&zeros, |m| spec.coeff(m), args.merge_tol);
    if let Some(t) = args.t_max {
        agg = agg.truncate(t);
    }
    let mean = match args.mean {
        Some(m) => m,
        None => mean_value(args.family, &spec, &rank_model(args.ranks.as_deref())?).value,
    };
    let summary = simulate_distribution(&agg, mean, args.y_max, args.samples, args.bins).map_err(gprace_core::Error::from)?;
    ensure_dir(&args.out_dir)?;
    let files = vec![write_atomic(&args.out_dir, "dist.csv", |w| write_dist_csv(w, &summary))?];

    let mut manifest = Manifest::new("dist");
    manifest.set("zeros", args.zeros.display());
    manifest.set("zeros_loaded", zeros.len());
    manifest.set("aggregated_ordinates", agg.len());
    manifest.set("family", args.family);
    manifest.set("phi", &name);
    manifest.set("N", spec.truncation());
    manifest.set("T", args.t_max.map(|t| t.to_string()).unwrap_or_else(|| "inf".into()));
    manifest.set("merge_tol", args.merge_tol);
    manifest.set("Y", args.y_max);
    manifest.set("samples", args.samples);
    manifest.set("bins", args.bins);
    manifest.set("mean_parameter", sig9(mean));
    manifest.write(&args.out_dir, started.elapsed(), &files)?;

    let mut out = Vec::new();
    write_summary(&mut out, &summary).map_err(io_err(Path::new("<stdout>")))?;
    writeln!(out, "variance_formula={}", sig9(variance_formula(&agg))).map_err(io_err(Path::new("<stdout>")))?;
    writeln!(out, "ordinates={}", agg.len()).map_err(io_err(Path::new("<stdout>")))?;
    io::stdout().lock().write_all(&out).map_err(io_err(Path::new("<stdout>")))
}

pub fn decompose(args: &DecomposeArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let config = sieve_config(&args.sieve, 2)?;
    let out_dir = &args.sieve.out_dir;
    ensure_dir(out_dir)?;
    let mut stats = None;
    let mut failure = None;
    let path = write_atomic(out_dir, "angles.csv", |w| {
        writeln!(w, "{ANGLE_CSV_HEADER}")?;
        let result = for_each_angle_prime(&config, |ap| Ok(write_angle_row(w, ap)?));
        match result {
            Ok(s) => stats = Some(s),
            Err(gprace_core::Error::Io(e)) => return Err(e),
            Err(e) => {
                failure = Some(e);
                return Err(io::Error::other("decomposition failed"));
            }
        }
        Ok(())
    });
    if let Some(e) = failure {
        return Err(e.into());
    }
    let files = vec![path?];
    let mut manifest = Manifest::new("decompose");
    record_sieve(&mut manifest, &args.sieve, &stats.unwrap_or_default());
    manifest.write(out_dir, started.elapsed(), &files)?;
    Ok(())
}
