use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::config::Resolved;
use super::output::{digest_file, InputDigest, RunDir};
use super::*;
use crate::dataio::{
    cosine_similarity, default_monomial_ground_truth, gen_gaussian_benchmark,
    gen_monomial_benchmark, load_csv, load_csv_matrix, write_bundle_csv, BundleMetadata,
    ColumnRoles, DatasetBundle, GroundTruth, GAUSSIAN_GT_WEIGHTS,
};
use crate::math::gradcheck::{GradCheckInstance, GradCheckReport};
use crate::math::{
    classic_imbalance_from_distances, compute_weighted_distances, dii_gradient, evaluate,
    RankMatrix, SoftmaxCoefficients, WeightVector,
};
use crate::optimizer::{optimize_dii, OptimizationTrace, Schedule};
use crate::rng::{stream_rng, Stream};
use crate::sparsify::{
    block_cross_validate, default_p_grid, exhaustive_search, greedy_backward, lasso_search,
    subsample_rows, BlockSplit, SparsityPath,
};

/// Schedule used by L1 runs unless `--schedule` says otherwise. Exponential
/// decay settles the support early, before strong shrinkage drains every
/// weight.
pub const LASSO_DEFAULT_SCHEDULE: Schedule = Schedule::Exponential;
/// Schedule for unpenalized runs.
pub const DEFAULT_SCHEDULE: Schedule = Schedule::Cosine;

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate(args) => generate(args),
        Command::Gradcheck(args) => gradcheck(args),
        Command::Optimize(args) => {
            let default = if args.settings.l1.unwrap_or(0.0) > 0.0 {
                LASSO_DEFAULT_SCHEDULE
            } else {
                DEFAULT_SCHEDULE
            };
            with_settings(args.settings, default, optimize)
        }
        Command::Lasso(args) => {
            with_settings(args.settings, LASSO_DEFAULT_SCHEDULE, |r| lasso(r, args.grid))
        }
        Command::Greedy(args) => with_settings(args.settings, DEFAULT_SCHEDULE, greedy),
        Command::Exhaustive(args) => with_settings(args.settings, DEFAULT_SCHEDULE, |r| {
            exhaustive(r, args.max_features)
        }),
        Command::Eval(args) => with_settings(args.settings, DEFAULT_SCHEDULE, |r| eval(r, args.weights)),
        Command::Crossval(args) => with_settings(args.settings, DEFAULT_SCHEDULE, |r| {
            crossval(r, args.blocks, args.stride)
        }),
    }
}

/// Resolves settings and runs `body` on a pool of `--jobs` threads.
fn with_settings<F>(settings: Settings, default_schedule: Schedule, body: F) -> Result<(), CliError>
where
    F: FnOnce(Resolved) -> Result<(), CliError> + Send,
{
    let resolved = settings.with_config_file()?.resolve(default_schedule)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = resolved.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| body(resolved))
}

/// Everything read from disk, validated before any output is created.
struct Inputs {
    bundle: DatasetBundle,
    digests: Vec<InputDigest>,
}

fn load_inputs(r: &Resolved) -> Result<Inputs, CliError> {
    let data = r
        .data
        .as_deref()
        .ok_or_else(|| CliError::Usage("--data is required".into()))?;
    if !data.is_file() {
        return Err(CliError::Usage(format!("{}: no such file", data.display())));
    }
    let mut digests = vec![digest_file(data)?];
    let sidecar = BundleMetadata::sidecar_path(data);
    let meta = if sidecar.is_file() {
        Some(BundleMetadata::read(&sidecar)?)
    } else {
        None
    };
    let gt_cols = match (&r.gt_cols, &r.gt_data, &meta) {
        (Some(cols), _, _) => cols.clone(),
        (None, None, Some(m)) => m.roles.ground_truth.clone(),
        _ => Vec::new(),
    };
    let roles = ColumnRoles {
        ground_truth: gt_cols,
        ignore: r.ignore_cols.clone(),
    };
    let mut bundle = load_csv(data, &roles)?;
    if let Some(gt_path) = &r.gt_data {
        if !gt_path.is_file() {
            return Err(CliError::Usage(format!("{}: no such file", gt_path.display())));
        }
        digests.push(digest_file(gt_path)?);
        let (names, matrix) = load_csv_matrix(gt_path)?;
        bundle.gt_names = names;
        bundle.ground_truth = Some(GroundTruth::Data(matrix));
    }
    if let Some(m) = meta {
        if m.feature_names == bundle.feature_names {
            bundle.gt_weights = m.gt_weights.map(WeightVector::new).transpose()?;
        }
    }
    bundle.validate()?;
    if bundle.ground_truth.is_none() {
        log::info!("no ground truth given; using the standardized inputs");
    }
    Ok(Inputs { bundle, digests })
}

fn anchor_ranks(r: &Resolved, bundle: &DatasetBundle) -> Result<RankMatrix, CliError> {
    let rows = subsample_rows(bundle.features.n_points(), r.rows, r.seed)?;
    Ok(bundle.ground_truth_ranks(&rows)?)
}

fn start_run(r: &Resolved, command: &str, inputs: &Inputs, extra: impl Serialize) -> Result<RunDir, CliError> {
    #[derive(Serialize)]
    struct Config<'a, E> {
        #[serde(flatten)]
        settings: &'a Resolved,
        #[serde(flatten)]
        command: E,
    }
    RunDir::create(
        r.out_dir()?,
        command,
        &Config {
            settings: r,
            command: extra,
        },
        inputs.digests.clone(),
        r.seed,
    )
}

/// Runs `body` against the open run directory. Pair with [`finish`], which
/// records a failure in the manifest before passing it on.
fn guarded<T>(run: &mut RunDir, body: impl FnOnce(&mut RunDir) -> Result<T, CliError>) -> Result<T, CliError> {
    body(run)
}

fn finish(run: RunDir, result: Result<(), CliError>) -> Result<(), CliError> {
    match result {
        Ok(()) => run.finish("ok"),
        Err(e) => {
            run.finish(&format!("failed: {e}"))?;
            Err(e)
        }
    }
}

fn cosine_to_gt(bundle: &DatasetBundle, w: &WeightVector) -> Option<f64> {
    let gt = bundle.gt_weights.as_ref()?;
    cosine_similarity(w.as_slice(), gt.as_slice()).ok()
}

#[derive(Serialize)]
struct NoExtra {}

fn optimize(r: Resolved) -> Result<(), CliError> {
    let inputs = load_inputs(&r)?;
    let ranks = anchor_ranks(&r, &inputs.bundle)?;
    let mut run = start_run(&r, "optimize", &inputs, NoExtra {})?;
    run.phase_done("load");
    let result = guarded(&mut run, |run| {
        let trace = optimize_dii(&inputs.bundle.features, &ranks, &r.optimizer)?;
        run.phase_done("optimize");
        write_optimize_outputs(run, &inputs.bundle, &trace)?;
        run.phase_done("write");
        Ok(())
    });
    finish(run, result)
}

#[derive(Serialize)]
struct OptimizeSummary {
    schedule: Schedule,
    eta0: f64,
    best_epoch: usize,
    best_dii: f64,
    final_dii: f64,
    n_nonzero: usize,
    cosine_to_ground_truth: Option<f64>,
}

fn write_optimize_outputs(run: &mut RunDir, bundle: &DatasetBundle, trace: &OptimizationTrace) -> Result<(), CliError> {
    run.write("trace.jsonl", |out| trace.write_jsonl(out))?;
    let best = trace.best_weights();
    let last = trace.final_weights();
    let gt = bundle.gt_weights.as_ref();
    run.write("weights.csv", |out| {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["feature", "best", "final"];
        if gt.is_some() {
            header.push("ground_truth");
        }
        w.write_record(&header)?;
        for (a, name) in bundle.feature_names.iter().enumerate() {
            let mut rec = vec![name.clone(), best[a].to_string(), last[a].to_string()];
            if let Some(g) = gt {
                rec.push(g[a].to_string());
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    })?;
    let summary = OptimizeSummary {
        schedule: trace.schedule,
        eta0: trace.eta0,
        best_epoch: trace.best_epoch,
        best_dii: trace.best_dii(),
        final_dii: trace.final_record().dii,
        n_nonzero: best.n_nonzero(),
        cosine_to_ground_truth: cosine_to_gt(bundle, best),
    };
    println!("{}", serde_json::to_string(&summary).map_err(DiiError::from)?);
    run.write_json("summary.json", &summary)
}

#[derive(Serialize)]
struct CardinalityRow {
    n_nonzero: usize,
    control: f64,
    dii: f64,
    cosine_to_ground_truth: Option<f64>,
}

/// `path.csv`, `path.json`, `weights.csv` (best entry per nonzero count),
/// `cardinality.csv` (plot table) and `summary.json`.
fn write_path_outputs(run: &mut RunDir, bundle: &DatasetBundle, path: &SparsityPath) -> Result<(), CliError> {
    let names = &bundle.feature_names;
    run.write("path.csv", |out| path.write_csv(out, names))?;
    run.write_json("path.json", path)?;
    let bests = SparsityPath::new(
        path.kind,
        path.best_per_cardinality().into_values().cloned().collect(),
    );
    run.write("weights.csv", |out| bests.write_csv(out, names))?;
    run.write("cardinality.csv", |out| path.write_plot_table(out))?;
    let rows: Vec<CardinalityRow> = bests
        .entries
        .iter()
        .map(|e| CardinalityRow {
            n_nonzero: e.n_nonzero,
            control: e.control,
            dii: e.dii.expect("bests have a DII"),
            cosine_to_ground_truth: cosine_to_gt(bundle, &e.weights),
        })
        .collect();
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "n_nonzero,best_dii");
    for row in &rows {
        let _ = writeln!(stdout, "{},{}", row.n_nonzero, row.dii);
    }
    run.write_json("summary.json", &rows)
}

fn path_command<E: Serialize>(
    r: &Resolved,
    command: &str,
    extra: E,
    search: impl FnOnce(&DatasetBundle, &RankMatrix) -> crate::Result<SparsityPath>,
) -> Result<(), CliError> {
    let inputs = load_inputs(r)?;
    let ranks = anchor_ranks(r, &inputs.bundle)?;
    let mut run = start_run(r, command, &inputs, extra)?;
    run.phase_done("load");
    let result = guarded(&mut run, |run| {
        let path = search(&inputs.bundle, &ranks)?;
        run.phase_done("search");
        write_path_outputs(run, &inputs.bundle, &path)?;
        run.phase_done("write");
        Ok(())
    });
    finish(run, result)
}

fn lasso(r: Resolved, grid: Option<Vec<f64>>) -> Result<(), CliError> {
    let grid = grid.unwrap_or_else(default_p_grid);
    if grid.is_empty() || grid.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
        return Err(CliError::Usage("--grid needs nonnegative finite values".into()));
    }
    #[derive(Serialize)]
    struct Extra<'a> {
        grid: &'a [f64],
    }
    let cfg = r.optimizer.clone();
    path_command(&r, "lasso", Extra { grid: &grid }, |b, ranks| {
        lasso_search(&b.features, ranks, &cfg, &grid)
    })
}

fn greedy(r: Resolved) -> Result<(), CliError> {
    let cfg = r.optimizer.clone();
    path_command(&r, "greedy", NoExtra {}, |b, ranks| {
        greedy_backward(&b.features, ranks, &cfg)
    })
}

fn exhaustive(r: Resolved, max_features: usize) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Extra {
        max_features: usize,
    }
    // refuse before touching the output directory
    let inputs = load_inputs(&r)?;
    let d = inputs.bundle.features.n_features();
    if d > max_features {
        return Err(DiiError::TooManyFeatures {
            n_features: d,
            bound: max_features,
        }
        .into());
    }
    let cfg = r.optimizer.clone();
    path_command(&r, "exhaustive", Extra { max_features }, |b, ranks| {
        exhaustive_search(&b.features, ranks, &cfg, max_features)
    })
}

/// Weights from an inline list or a CSV file.
fn read_weights(arg: &str, names: &[String]) -> Result<WeightVector, CliError> {
    let path = Path::new(arg);
    if !path.is_file() {
        let values = arg
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| CliError::Usage(format!("--weights: '{arg}' is neither a file nor a list of numbers")))?;
        if values.len() != names.len() {
            return Err(CliError::Usage(format!(
                "--weights has {} values for {} features",
                values.len(),
                names.len()
            )));
        }
        return Ok(WeightVector::new(values)?);
    }
    let mut reader = csv::Reader::from_path(path).map_err(DiiError::from)?;
    let header: Vec<String> = reader.headers().map_err(DiiError::from)?.iter().map(str::to_owned).collect();
    let records: Vec<csv::StringRecord> = reader
        .records()
        .collect::<Result<_, _>>()
        .map_err(DiiError::from)?;
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("--weights: bad number '{s}'")))
    };
    let mut by_name = std::collections::HashMap::new();
    let (feat, best) = (
        header.iter().position(|h| h == "feature"),
        header.iter().position(|h| h == "best"),
    );
    if let (Some(f), Some(b)) = (feat, best) {
        for rec in &records {
            by_name.insert(rec[f].to_string(), parse(&rec[b])?);
        }
    } else {
        let rec = records
            .first()
            .ok_or_else(|| CliError::Usage("--weights: empty file".into()))?;
        for (h, v) in header.iter().zip(rec.iter()) {
            by_name.insert(h.clone(), parse(v)?);
        }
    }
    let w = names
        .iter()
        .map(|n| {
            by_name
                .get(n)
                .copied()
                .ok_or_else(|| CliError::Usage(format!("--weights: no weight for feature '{n}'")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(WeightVector::new(w)?)
}

fn eval(r: Resolved, weights: Option<String>) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Report {
        dii: f64,
        classic_imbalance: f64,
        lambda: f64,
        n_rows: usize,
        cosine_to_ground_truth: Option<f64>,
    }
    let inputs = load_inputs(&r)?;
    let names = &inputs.bundle.feature_names;
    let w = match &weights {
        Some(arg) => read_weights(arg, names)?,
        None => WeightVector::ones(names.len()),
    };
    let ranks = anchor_ranks(&r, &inputs.bundle)?;
    let compute = || -> Result<Report, CliError> {
        let ev = evaluate(&inputs.bundle.features, &w, &ranks, r.optimizer.lambda)?;
        let d = compute_weighted_distances(&inputs.bundle.features, &w, ranks.row_ids())?;
        Ok(Report {
            dii: ev.dii,
            classic_imbalance: classic_imbalance_from_distances(&d, &ranks)?,
            lambda: ev.lambda,
            n_rows: ranks.n_rows(),
            cosine_to_ground_truth: cosine_to_gt(&inputs.bundle, &w),
        })
    };
    if r.out.is_none() {
        let report = compute()?;
        println!("{}", serde_json::to_string(&report).map_err(DiiError::from)?);
        return Ok(());
    }
    #[derive(Serialize)]
    struct Extra<'a> {
        weights: &'a [f64],
    }
    let mut run = start_run(&r, "eval", &inputs, Extra { weights: w.as_slice() })?;
    let result = guarded(&mut run, |run| {
        let report = compute()?;
        run.phase_done("evaluate");
        println!("{}", serde_json::to_string(&report).map_err(DiiError::from)?);
        run.write_json("eval.json", &report)
    });
    finish(run, result)
}

fn crossval(r: Resolved, blocks: usize, stride: usize) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Extra {
        blocks: usize,
        stride: usize,
    }
    let inputs = load_inputs(&r)?;
    let split = BlockSplit::new(inputs.bundle.features.n_points(), blocks, stride)?;
    let data_b = inputs.bundle.ground_truth_data()?;
    if r.rows != crate::sparsify::RowMode::All {
        log::warn!("--rows is ignored by crossval; blocks are used whole after striding");
    }
    let mut run = start_run(&r, "crossval", &inputs, Extra { blocks, stride })?;
    run.phase_done("load");
    let result = guarded(&mut run, |run| {
        let cv = block_cross_validate(&inputs.bundle.features, &data_b, &split, &r.optimizer)?;
        run.phase_done("crossval");
        run.write("weights.csv", |out| {
            let mut w = csv::Writer::from_writer(out);
            let mut header = vec!["train_block".to_string(), "train_dii".into(), "validation_dii".into()];
            header.extend(inputs.bundle.feature_names.iter().cloned());
            w.write_record(&header)?;
            for f in &cv.folds {
                let val = f.validation.iter().map(|v| v.1).sum::<f64>() / f.validation.len() as f64;
                let mut rec = vec![f.train_block.to_string(), f.train_dii.to_string(), val.to_string()];
                rec.extend(f.weights.as_slice().iter().map(f64::to_string));
                w.write_record(&rec)?;
            }
            w.flush()?;
            Ok(())
        })?;
        println!(
            "train DII {:.6} +- {:.6}, validation DII {:.6} +- {:.6}",
            cv.train_mean, cv.train_std, cv.validation_mean, cv.validation_std
        );
        run.write_json("crossval.json", &cv)
    });
    finish(run, result)
}

fn generate(args: GenerateArgs) -> Result<(), CliError> {
    let bundle = match args.benchmark.as_str() {
        "gaussian" => {
            let w = args.gt_weights.clone().unwrap_or_else(|| GAUSSIAN_GT_WEIGHTS.to_vec());
            gen_gaussian_benchmark(args.n, &w, args.seed)?
        }
        _ => gen_monomial_benchmark(
            args.n,
            args.base_features,
            args.order,
            &default_monomial_ground_truth(),
            args.seed,
        )?,
    };
    #[derive(Serialize)]
    struct Config<'a> {
        benchmark: &'a str,
        n: usize,
        gt_weights: Option<&'a [f64]>,
        base_features: usize,
        order: usize,
    }
    let mut run = RunDir::create(
        &args.out,
        "generate",
        &Config {
            benchmark: &args.benchmark,
            n: args.n,
            gt_weights: bundle.gt_weights.as_ref().map(|w| w.as_slice()),
            base_features: args.base_features,
            order: args.order,
        },
        Vec::new(),
        args.seed,
    )?;
    let data_path = args.out.join("data.csv");
    let result = guarded(&mut run, |run| {
        write_bundle_csv(&data_path, &bundle)?;
        bundle
            .metadata(Some(&args.benchmark))
            .write(&BundleMetadata::sidecar_path(&data_path))?;
        run.phase_done("generate");
        Ok(())
    });
    finish(run, result)
}

fn flipped_gradient(
    data: &crate::math::DataMatrix,
    w: &WeightVector,
    c: &SoftmaxCoefficients,
    ranks_b: &RankMatrix,
    lambda: f64,
) -> crate::Result<Vec<f64>> {
    let mut g = dii_gradient(data, w, c, ranks_b, lambda)?;
    g[0] = -g[0];
    Ok(g)
}

fn gradcheck(args: GradcheckArgs) -> Result<(), CliError> {
    if args.points < 3 || args.points > 200 || args.features < 1 || args.features > 20 {
        return Err(CliError::Usage(
            "gradcheck needs 3 <= --points <= 200 and 1 <= --features <= 20".into(),
        ));
    }
    let grad_fn: crate::math::gradcheck::GradientFn = match args.mutate.as_deref() {
        Some(_) => flipped_gradient,
        None => dii_gradient,
    };
    let mut rng = stream_rng(args.seed, Stream::GradCheck);
    let reports = (0..args.instances)
        .map(|_| GradCheckInstance::random(args.points, args.features, &mut rng)?.check(grad_fn))
        .collect::<crate::Result<Vec<GradCheckReport>>>()?;
    let worst = reports.iter().map(|r| r.max_rel_error).fold(0.0, f64::max);
    for (k, r) in reports.iter().enumerate() {
        println!("instance {k}: max relative error {:.3e}", r.max_rel_error);
    }
    println!("worst: {worst:.3e} (tolerance {GRADCHECK_TOLERANCE:e})");
    if let Some(out) = &args.out {
        #[derive(Serialize)]
        struct Config {
            instances: usize,
            points: usize,
            features: usize,
            tolerance: f64,
        }
        let mut run = RunDir::create(
            out,
            "gradcheck",
            &Config {
                instances: args.instances,
                points: args.points,
                features: args.features,
                tolerance: GRADCHECK_TOLERANCE,
            },
            Vec::new(),
            args.seed,
        )?;
        run.write_json("gradcheck.json", &reports)?;
        run.finish(if worst < GRADCHECK_TOLERANCE { "ok" } else { "check failed" })?;
    }
    if worst < GRADCHECK_TOLERANCE {
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "gradient differs from finite differences by {worst:.3e}"
        )))
    }
}
