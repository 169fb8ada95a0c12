use std::fs;
use std::io::{self, Write};
use std::path::Path;

use fselect_core::synth::{benchmark_dataset, BenchmarkSpec};
use fselect_core::{
    cv_curve, discretize, load_csv, measure, score_curve, select, CvOptions, DiscreteDataset,
    DiscretizerSpec, EngineConfig, LabelColumn, Objective, ObjectiveKind, ParallelEngine,
    RawDataset,
};

use crate::args::{BenchArgs, Cli, Command, CommonArgs, KArg, Method};
use crate::render;
use crate::report::{
    BenchRun, CvPoint, CvReport, CvSummary, DatasetInfo, RankReport, Settings, TimingReport,
    FORMAT_VERSION,
};
use crate::CliError;

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let (bytes, warnings, output) = match &cli.command {
        Command::Rank(args) => {
            let report = rank(args)?;
            (render::rank(&report, args.format)?, report.warnings, &args.output)
        }
        Command::Cv(args) => {
            let report = cv(args)?;
            (render::cv(&report, args.format)?, report.warnings, &args.output)
        }
        Command::Bench(args) => {
            let report = bench(args)?;
            (render::bench(&report, args.common.format)?, report.warnings, &args.common.output)
        }
    };
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    match output {
        Some(path) => fs::write(path, &bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => io::stdout()
            .lock()
            .write_all(&bytes)
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

pub fn rank(args: &CommonArgs) -> Result<RankReport, CliError> {
    let objective = objective(args)?;
    if args.k == Some(KArg::Count(0)) {
        return Err(CliError::Config("k must be ≥ 1 or auto".into()));
    }
    if args.k == Some(KArg::Auto) && args.folds < 2 {
        return Err(CliError::Config("k = auto requires --folds ≥ 2".into()));
    }
    let engine = engine(args, args.threads)?;
    let loaded = load(args)?;
    let data = &loaded.data;
    let mut warnings = loaded.warnings;

    let k = resolve_k(args.k, data);
    let mut report = select(data, &objective, k, &engine)?;
    warnings.append(&mut report.warnings);

    let mut cv = None;
    if args.k == Some(KArg::Auto) && !report.ranking.is_empty() {
        let mut curve = cv_curve(data, &report, &cv_options(args), &engine)?;
        warnings.append(&mut curve.warnings);
        report.ranking.truncate(curve.best_k);
        cv = Some(CvSummary {
            accuracy: curve.accuracy,
            best_k: curve.best_k,
            stratified: curve.stratified,
        });
    }

    Ok(RankReport {
        format_version: FORMAT_VERSION,
        command: "rank".into(),
        dataset: loaded.info,
        settings: settings(args, objective, args.k.unwrap_or(KArg::Count(k))),
        curve: score_curve(&report),
        ranking: report.ranking,
        cv,
        warnings,
    })
}

pub fn cv(args: &CommonArgs) -> Result<CvReport, CliError> {
    let objective = objective(args)?;
    if args.k == Some(KArg::Count(0)) {
        return Err(CliError::Config("k must be ≥ 1 or auto".into()));
    }
    if args.folds < 2 {
        return Err(CliError::Config(format!("folds must be ≥ 2, got {}", args.folds)));
    }
    let engine = engine(args, args.threads)?;
    let loaded = load(args)?;
    let data = &loaded.data;
    let mut warnings = loaded.warnings;

    let k = resolve_k(args.k, data);
    let mut report = select(data, &objective, k, &engine)?;
    warnings.append(&mut report.warnings);
    if report.ranking.is_empty() {
        return Err(CliError::Config("no non-constant features to cross-validate".into()));
    }
    let mut curve = cv_curve(data, &report, &cv_options(args), &engine)?;
    warnings.append(&mut curve.warnings);

    let names: Vec<String> = report.ranking.iter().map(|r| r.feature_name.clone()).collect();
    Ok(CvReport {
        format_version: FORMAT_VERSION,
        command: "cv".into(),
        dataset: loaded.info,
        settings: settings(args, objective, args.k.unwrap_or(KArg::Count(k))),
        curve: curve
            .accuracy
            .iter()
            .zip(&names)
            .enumerate()
            .map(|(i, (&accuracy, feature))| CvPoint {
                k: i + 1,
                accuracy,
                feature: feature.clone(),
            })
            .collect(),
        best_k: curve.best_k,
        best_features: names[..curve.best_k].to_vec(),
        stratified: curve.stratified,
        fold_accuracies: curve.fold_accuracies,
        warnings,
    })
}

pub fn bench(args: &BenchArgs) -> Result<TimingReport, CliError> {
    let common = &args.common;
    let objective = objective(common)?;
    if args.repeats == 0 {
        return Err(CliError::Config("repeats must be ≥ 1".into()));
    }
    if args.workers_list.is_empty() || args.workers_list.contains(&0) {
        return Err(CliError::Config("workers list must be nonempty and every entry ≥ 1".into()));
    }
    if common.k == Some(KArg::Count(0)) {
        return Err(CliError::Config("k must be ≥ 1 or auto".into()));
    }
    let mut workers_list = args.workers_list.clone();
    if !workers_list.contains(&1) {
        workers_list.insert(0, 1);
    }

    let loaded = match &common.input {
        Some(_) => load(common)?,
        None => {
            let spec = BenchmarkSpec {
                rows: args.synth_rows,
                features: args.synth_features,
                classes: args.synth_classes,
                informative: args.synth_informative.min(args.synth_features),
                seed: common.seed,
            };
            if spec.rows < 2 || spec.features == 0 || spec.classes < 2 {
                return Err(CliError::Config(
                    "synthetic dataset needs ≥ 2 rows, ≥ 1 feature and ≥ 2 classes".into(),
                ));
            }
            prepare(&benchmark_dataset(&spec), "synthetic".into(), &discretizer(common)?)?
        }
    };
    let data = &loaded.data;
    let mut warnings = loaded.warnings;
    let k = resolve_k(common.k, data);

    let mut runs: Vec<BenchRun> = Vec::with_capacity(workers_list.len());
    let mut rankings = Vec::with_capacity(workers_list.len());
    for &workers in &workers_list {
        let engine = engine(common, Some(workers))?;
        let m = measure(workers, args.repeats, || {
            engine.reset_stats();
            select(data, &objective, k, &engine)
        })?;
        let report = m.last_report.expect("repeats ≥ 1");
        if rankings.is_empty() {
            warnings.extend(report.warnings.iter().cloned());
        }
        rankings.push(report.ranking);
        runs.push(BenchRun {
            workers,
            samples: m.samples,
            median_seconds: m.median_seconds,
            speedup: 1.0,
            cvtest_calls: engine.stats().cvtest_calls,
        });
    }
    let base = runs
        .iter()
        .find(|r| r.workers == 1)
        .map(|r| r.median_seconds)
        .expect("one worker is always measured");
    for run in runs.iter_mut().filter(|r| r.workers != 1) {
        run.speedup = base / run.median_seconds;
    }

    Ok(TimingReport {
        format_version: FORMAT_VERSION,
        command: "bench".into(),
        dataset: loaded.info,
        settings: settings(common, objective, common.k.unwrap_or(KArg::Count(k))),
        k,
        repeats: args.repeats,
        runs,
        rankings_identical: rankings.windows(2).all(|w| w[0] == w[1]),
        warnings,
    })
}

struct Loaded {
    data: DiscreteDataset,
    info: DatasetInfo,
    warnings: Vec<String>,
}

fn load(args: &CommonArgs) -> Result<Loaded, CliError> {
    let spec = discretizer(args)?;
    let path = args
        .input
        .as_deref()
        .ok_or_else(|| CliError::Config("--input is required".into()))?;
    let label = match &args.label_col {
        Some(name) => LabelColumn::Name(name.clone()),
        None => LabelColumn::Last,
    };
    let raw = load_csv(path, &label, args.delimiter)?;
    prepare(&raw, file_name(path), &spec)
}

fn prepare(raw: &RawDataset, source: String, spec: &DiscretizerSpec) -> Result<Loaded, CliError> {
    let out = discretize(raw, spec)?;
    let info = DatasetInfo {
        source,
        rows: out.data.rows(),
        features: out.data.n_features(),
        classes: out.data.n_classes(),
    };
    Ok(Loaded {
        data: out.data,
        info,
        warnings: out.warnings,
    })
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn resolve_k(k: Option<KArg>, data: &DiscreteDataset) -> usize {
    match k {
        Some(KArg::Count(k)) => k,
        Some(KArg::Auto) | None => data.n_features(),
    }
}

fn objective(args: &CommonArgs) -> Result<Objective, CliError> {
    let objective = Objective {
        kind: match args.method {
            Method::Mmaiq => ObjectiveKind::Mmaiq,
            Method::Mmais => ObjectiveKind::Mmais,
        },
        lambda: args.lambda,
    };
    objective.validate()?;
    Ok(objective)
}

fn discretizer(args: &CommonArgs) -> Result<DiscretizerSpec, CliError> {
    Ok(DiscretizerSpec::new(args.discretizer.into(), args.bins)?)
}

fn engine(args: &CommonArgs, workers: Option<usize>) -> Result<ParallelEngine, CliError> {
    let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    Ok(ParallelEngine::new(EngineConfig {
        workers,
        par_threshold: args.par_threshold,
        ..EngineConfig::default()
    })?)
}

fn cv_options(args: &CommonArgs) -> CvOptions {
    CvOptions {
        folds: args.folds,
        seed: args.seed,
        stratified: true,
        reselect: args.cv_reselect,
    }
}

fn settings(args: &CommonArgs, objective: Objective, k: KArg) -> Settings {
    Settings {
        objective,
        k,
        discretizer: DiscretizerSpec {
            method: args.discretizer.into(),
            bins: args.bins,
        },
        folds: args.folds,
        seed: args.seed,
        cv_reselect: args.cv_reselect,
    }
}
