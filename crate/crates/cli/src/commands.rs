use std::fmt::Write as _;
use std::path::Path;

use clap::Args;
use doodler_core::data::{ImageDataset, NoiseKind, StreamSource};
use doodler_core::detector::{
    ood_heatmap, pixel_posterior_map, stream_test, DetectionProfile, Priors, Verdict,
    DEFAULT_SIGNIFICANCE,
};
use doodler_core::io::GrayImage;
use doodler_core::metrics::{evaluate, metrics_table_csv, MetricsReport};
use doodler_core::nn::{train, TrainConfig};
use doodler_core::stats::{
    fit_chi_square, histogram, moments, pixel_sq_errors, recon_errors, reconstruct_dataset,
    write_histogram_csv, ChiSquareParams, FittedStats, GammaRecord, PriorsRecord,
};
use doodler_core::{Error, Execution};

use crate::artifacts::{encode_png, load_data, load_image, load_model, load_stats, write_file, LoadedModel};
use crate::config::{named_source, Config};
use crate::error::{CliError, Context};

type Result<T> = std::result::Result<T, CliError>;

const EXEC: Execution = Execution::Parallel;

#[derive(Args, Debug, Default)]
pub struct TrainArgs {
    /// Training images: IDX file or raw directory
    #[arg(long)]
    pub data: Option<String>,
    /// Output model file
    #[arg(long)]
    pub model: Option<String>,
    /// Per-epoch loss CSV [default: <model>.loss.csv]
    #[arg(long)]
    pub loss_log: Option<String>,
    /// Fraction at the end of the data withheld from training [default: 0.1]
    #[arg(long)]
    pub holdout: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub beta2: Option<f64>,
    #[arg(long)]
    pub eps_adam: Option<f64>,
    /// Stop once the parameter update norm is at most this
    #[arg(long)]
    pub convergence_eps: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Hidden encoder widths, comma separated [default: 256,64]
    #[arg(long)]
    pub hidden: Option<String>,
    #[arg(long)]
    pub latent_dim: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct FitArgs {
    #[arg(long)]
    pub model: Option<String>,
    /// In-distribution images used for the fit
    #[arg(long)]
    pub id_data: Option<String>,
    /// Optional OOD images; needed later by `detect` and `segment`
    #[arg(long)]
    pub ood_data: Option<String>,
    /// Output statistics JSON
    #[arg(long)]
    pub stats: Option<String>,
    /// Fraction at the end of the ID data to fit on [default: 0.1]
    #[arg(long)]
    pub id_tail: Option<f64>,
    /// Fraction at the end of the OOD data to fit on [default: 1]
    #[arg(long)]
    pub ood_tail: Option<f64>,
    /// Prior probability of in-distribution [default: 0.5]
    #[arg(long)]
    pub p_id: Option<f64>,
    /// Directory for error histogram CSVs
    #[arg(long)]
    pub hist_dir: Option<String>,
    /// Histogram bin count [default: 50]
    #[arg(long)]
    pub bins: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct DetectArgs {
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub stats: Option<String>,
    /// Images to classify
    #[arg(long)]
    pub input: Option<String>,
    /// Posterior threshold T_p [default: 0.5]
    #[arg(long)]
    pub t_p: Option<f64>,
    /// Overrides the prior stored in the statistics
    #[arg(long)]
    pub p_id: Option<f64>,
    /// JSON-lines verdict file [default: stdout]
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct SegmentArgs {
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub stats: Option<String>,
    /// A P5 PGM image or a dataset
    #[arg(long)]
    pub input: Option<String>,
    /// Image index when the input is a dataset [default: 0]
    #[arg(long)]
    pub index: Option<usize>,
    /// Output PGM heatmap of the OOD posterior
    #[arg(long)]
    pub out: Option<String>,
    /// Optional PNG copy of the heatmap
    #[arg(long)]
    pub png: Option<String>,
    /// Optional PGM of the reconstruction
    #[arg(long)]
    pub recon: Option<String>,
    #[arg(long)]
    pub p_id: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct StreamArgs {
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub stats: Option<String>,
    /// Dataset path, `gaussian` or `uniform`
    #[arg(long)]
    pub source: Option<String>,
    /// Stream length [default: 100]
    #[arg(long)]
    pub n: Option<usize>,
    /// Test level [default: 0.01]
    #[arg(long)]
    pub significance: Option<f64>,
    /// Shuffle seed for datasets, generator seed for noise
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: Option<String>,
    /// In-distribution test images, `name=path` or a path
    #[arg(long)]
    pub id_data: Option<String>,
    /// Comma-separated OOD test sets, each `name=path` or a path
    #[arg(long)]
    pub ood_data: Option<String>,
    /// Comma-separated noise baselines: gaussian, uniform
    #[arg(long)]
    pub noise: Option<String>,
    /// Images per noise baseline [default: size of the ID set]
    #[arg(long)]
    pub noise_count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for metrics.csv and metrics.json
    #[arg(long)]
    pub out_dir: Option<String>,
}

fn unit_fraction(name: &str, v: f64, allow_zero: bool, allow_one: bool) -> Result<f64> {
    let lo_ok = if allow_zero { v >= 0.0 } else { v > 0.0 };
    let hi_ok = if allow_one { v <= 1.0 } else { v < 1.0 };
    if lo_ok && hi_ok {
        Ok(v)
    } else {
        let (l, r) = (if allow_zero { "[0" } else { "(0" }, if allow_one { "1]" } else { "1)" });
        Err(CliError::Usage(format!("{name} = {v} outside {l}, {r}")))
    }
}

fn parse_widths(raw: &str) -> Result<Vec<usize>> {
    raw.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|e| CliError::Usage(format!("hidden width {s:?}: {e}"))))
        .collect()
}

fn tail(ds: ImageDataset, fraction: f64) -> Result<ImageDataset> {
    if fraction == 1.0 {
        return Ok(ds);
    }
    let (_, tail) = ds.split_tail(fraction)?;
    Ok(tail)
}

pub fn run_train(cfg: &Config, a: TrainArgs) -> Result<()> {
    let s = cfg.section("train");
    let data = s.require("data", a.data)?;
    let model_path: String = s.require("model", a.model)?;
    let loss_log = s.or("loss_log", a.loss_log, format!("{model_path}.loss.csv"))?;
    let holdout = unit_fraction("holdout", s.or("holdout", a.holdout, 0.1)?, true, false)?;
    let d = TrainConfig::default();
    let hidden = match s.get::<String>("hidden", a.hidden)? {
        Some(raw) => parse_widths(&raw)?,
        None => d.hidden.clone(),
    };
    let tc = TrainConfig {
        batch_size: s.or("batch_size", a.batch_size, d.batch_size)?,
        epochs: s.or("epochs", a.epochs, d.epochs)?,
        learning_rate: s.or("learning_rate", a.learning_rate, d.learning_rate)?,
        beta1: s.or("beta1", a.beta1, d.beta1)?,
        beta2: s.or("beta2", a.beta2, d.beta2)?,
        eps_adam: s.or("eps_adam", a.eps_adam, d.eps_adam)?,
        seed: s.seed(a.seed)?,
        convergence_eps: s.or("convergence_eps", a.convergence_eps, d.convergence_eps)?,
        max_steps: s.or("max_steps", a.max_steps, d.max_steps)?,
        hidden,
        latent_dim: s.or("latent_dim", a.latent_dim, d.latent_dim)?,
    };
    tc.validate()?;

    let ds = load_data(&data)?;
    let (head, _) = ds.split_tail(holdout)?;
    let trained = train(&head, &tc).context(|| format!("training on {data}"))?;
    let bytes = trained.params.to_bytes();
    write_file(&model_path, &bytes)?;

    let mut log = String::from("epoch,loss\n");
    for (k, loss) in trained.log.epoch_losses.iter().enumerate() {
        let _ = writeln!(log, "{},{loss}", k + 1);
    }
    write_file(&loss_log, log.as_bytes())?;

    let last = trained.log.epoch_losses.last().copied().unwrap_or(f64::NAN);
    println!(
        "trained on {} images: {} steps, stop {:?}, final epoch loss {last:.6}",
        head.len(),
        trained.log.steps,
        trained.log.stop
    );
    println!("model {model_path} (id {})", crate::artifacts::model_id(&bytes));
    println!("loss log {loss_log}");
    Ok(())
}

struct SideFit {
    gamma: GammaRecord,
    chi: ChiSquareParams,
    errors: Vec<f64>,
}

fn fit_side(model: &LoadedModel, ds: &ImageDataset) -> Result<SideFit> {
    let name = ds.name().to_string();
    let ctx = || format!("fitting {name}");
    let errors = recon_errors(&model.model, ds, EXEC).context(ctx)?.values;
    let gamma = moments(&errors).and_then(|m| GammaRecord::fit(&m)).context(ctx)?;
    let maps = pixel_sq_errors(&model.model, ds, EXEC).context(ctx)?;
    let t: Vec<f64> = maps.into_iter().flat_map(|m| m.values).collect();
    let chi = fit_chi_square(&t).context(ctx)?;
    Ok(SideFit { gamma, chi, errors })
}

pub fn run_fit(cfg: &Config, a: FitArgs) -> Result<()> {
    let s = cfg.section("fit");
    let model = load_model(&s.require::<String>("model", a.model)?)?;
    let id_path: String = s.require("id_data", a.id_data)?;
    let ood_path: Option<String> = s.get("ood_data", a.ood_data)?;
    let stats_path: String = s.require("stats", a.stats)?;
    let id_tail = unit_fraction("id_tail", s.or("id_tail", a.id_tail, 0.1)?, false, true)?;
    let ood_tail = unit_fraction("ood_tail", s.or("ood_tail", a.ood_tail, 1.0)?, false, true)?;
    let priors = Priors::new(s.or("p_id", a.p_id, 0.5)?)?;
    let hist_dir: Option<String> = s.get("hist_dir", a.hist_dir)?;
    let bins = s.or("bins", a.bins, 50usize)?;
    if bins == 0 {
        return Err(CliError::Usage("bins must be positive".into()));
    }

    let id = fit_side(&model, &tail(load_data(&id_path)?, id_tail)?)?;
    let ood = match &ood_path {
        Some(p) => Some(fit_side(&model, &tail(load_data(p)?, ood_tail)?)?),
        None => None,
    };
    let stats = FittedStats {
        model_id: model.id.clone(),
        id_gamma: id.gamma,
        ood_gamma: ood.as_ref().map(|o| o.gamma),
        id_chi: id.chi,
        ood_chi: ood.as_ref().map(|o| o.chi),
        priors: PriorsRecord {
            p_id: priors.p_id(),
            p_ood: priors.p_ood(),
        },
    };
    write_file(&stats_path, stats.to_json()?.as_bytes())?;

    if let Some(dir) = &hist_dir {
        let mut sides = vec![("id_errors.csv", &id.errors)];
        if let Some(o) = &ood {
            sides.push(("ood_errors.csv", &o.errors));
        }
        std::fs::create_dir_all(dir).map_err(Error::from).context(|| format!("creating {dir}"))?;
        for (file, errors) in sides {
            let path = Path::new(dir).join(file);
            write_histogram_csv(&histogram(errors, bins)?, &path)
                .context(|| format!("writing {}", path.display()))?;
        }
    }

    let show = |label: &str, f: &SideFit| {
        println!(
            "{label}: n={} mean={:.6e} var={:.6e} gamma(alpha={:.4}, beta={:.4}) chi2 scale={:.6e}",
            f.gamma.n, f.gamma.mu, f.gamma.sigma2, f.gamma.alpha, f.gamma.beta, f.chi.scale
        )
    };
    show("id", &id);
    if let Some(o) = &ood {
        show("ood", o);
    }
    println!("statistics {stats_path} (model {})", model.id);
    Ok(())
}

fn priors_for(stats: &FittedStats, flag: Option<f64>) -> Result<Priors> {
    Ok(Priors::new(flag.unwrap_or(stats.priors.p_id))?)
}

pub fn run_detect(cfg: &Config, a: DetectArgs) -> Result<()> {
    let s = cfg.section("detect");
    let model = load_model(&s.require::<String>("model", a.model)?)?;
    let stats_path: String = s.require("stats", a.stats)?;
    let stats = load_stats(&stats_path, &model)?;
    let input: String = s.require("input", a.input)?;
    let t_p = s.or("t_p", a.t_p, 0.5)?;
    let priors = priors_for(&stats, s.get("p_id", a.p_id)?)?;
    let out: Option<String> = s.get("out", a.out)?;

    let profile = DetectionProfile::from_stats(&stats, t_p, priors)?;
    let ds = load_data(&input)?;
    let errors = recon_errors(&model.model, &ds, EXEC).context(|| format!("scoring {input}"))?;
    let verdicts = profile.verdicts(&errors.values)?;
    let mut lines = String::new();
    for v in &verdicts {
        lines.push_str(&serde_json::to_string(v).map_err(Error::from)?);
        lines.push('\n');
    }
    let positive = verdicts.iter().filter(|v| v.verdict == Verdict::Positive).count();
    let summary = format!(
        "{} samples: {positive} positive (OOD), {} negative; T_p = {t_p}, T_v = {:.6e}, posterior monotone: {}",
        verdicts.len(),
        verdicts.len() - positive,
        profile.t_v,
        profile.monotone
    );
    match out {
        Some(path) => {
            write_file(&path, lines.as_bytes())?;
            println!("{summary}");
            println!("verdicts {path}");
        }
        None => {
            print!("{lines}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

pub fn run_segment(cfg: &Config, a: SegmentArgs) -> Result<()> {
    let s = cfg.section("segment");
    let model = load_model(&s.require::<String>("model", a.model)?)?;
    let stats_path: String = s.require("stats", a.stats)?;
    let stats = load_stats(&stats_path, &model)?;
    let input: String = s.require("input", a.input)?;
    let index = s.or("index", a.index, 0usize)?;
    let out: String = s.require("out", a.out)?;
    let png: Option<String> = s.get("png", a.png)?;
    let recon: Option<String> = s.get("recon", a.recon)?;
    let priors = priors_for(&stats, s.get("p_id", a.p_id)?)?;
    let ood_chi = stats.ood_chi.ok_or_else(|| {
        CliError::Usage(format!("{stats_path} has no OOD fit; run `fit` with --ood-data first"))
    })?;

    let img = load_image(&input, index)?;
    let maps = pixel_sq_errors(&model.model, &img, Execution::Sequential)
        .context(|| format!("reconstructing {input}"))?;
    let post = pixel_posterior_map(&maps[0], &stats.id_chi, &ood_chi, &priors)?;
    let heat = ood_heatmap(&post)?;
    write_file(&out, &heat.to_pgm())?;
    if let Some(path) = &png {
        write_file(path, &encode_png(&heat)?)?;
    }
    if let Some(path) = &recon {
        let r = reconstruct_dataset(&model.model, &img, Execution::Sequential)?;
        let shape = r.shape();
        let plane = shape.height * shape.width;
        let gray: Vec<f64> = (0..plane)
            .map(|p| {
                (0..shape.channels).map(|c| r.pixels()[c * plane + p] as f64).sum::<f64>()
                    / shape.channels as f64
            })
            .collect();
        write_file(path, &GrayImage::from_unit(shape.width, shape.height, &gray)?.to_pgm())?;
    }
    println!(
        "{}x{} map: mean OOD posterior {:.6}, {} undefined pixels; heatmap {out}",
        post.height,
        post.width,
        post.mean_ood(),
        post.undefined
    );
    Ok(())
}

fn noise_kind(name: &str) -> Option<NoiseKind> {
    match name.to_ascii_lowercase().as_str() {
        "gaussian" => Some(NoiseKind::default_gaussian()),
        "uniform" => Some(NoiseKind::Uniform),
        _ => None,
    }
}

pub fn run_stream(cfg: &Config, a: StreamArgs) -> Result<()> {
    let s = cfg.section("stream");
    let model = load_model(&s.require::<String>("model", a.model)?)?;
    let stats = load_stats(&s.require::<String>("stats", a.stats)?, &model)?;
    let source: String = s.require("source", a.source)?;
    let n = s.or("n", a.n, 100usize)?;
    let significance = s.or("significance", a.significance, DEFAULT_SIGNIFICANCE)?;
    let seed = s.seed(a.seed)?;

    let shape = doodler_core::data::ImageShape::from_array(model.model.input_shape());
    let mut src = match noise_kind(&source) {
        Some(kind) => StreamSource::from_noise(kind, shape, seed)?,
        None => StreamSource::from_dataset(load_data(&source)?, Some(seed)),
    };
    let batch = src.take(n).context(|| format!("drawing {n} samples from {source}"))?;
    let errors = recon_errors(&model.model, &batch, EXEC)?;
    let id = stats.id_gamma;
    let r = stream_test(&errors.values, id.mu, id.sigma2.sqrt(), significance)?;
    println!("source       {source}");
    println!("n            {}", r.n);
    println!("mean error   {:.6e}", r.mean);
    println!("mu_l         {:.6e}", id.mu);
    println!("Z            {:.6e}", r.z);
    println!("s            {:.6e}", r.s);
    println!("t            {:.4}", r.t_stat);
    println!("p-value      {:.6e}", r.p_value);
    println!(
        "decision     {} at significance {}",
        if r.reject { "reject H0: stream is OOD" } else { "accept H0: stream is in-distribution" },
        r.significance
    );
    Ok(())
}

pub fn run_eval(cfg: &Config, a: EvalArgs) -> Result<()> {
    let s = cfg.section("eval");
    let model_path: String = s.require("model", a.model)?;
    let (id_name, id_path) = named_source(&s.require::<String>("id_data", a.id_data)?);
    let oods: Vec<(String, String)> = s.list("ood_data", a.ood_data)?.iter().map(|i| named_source(i)).collect();
    let noises = s.list("noise", a.noise)?;
    let out_dir: String = s.require("out_dir", a.out_dir)?;
    let seed = s.seed(a.seed)?;
    let kinds = noises
        .iter()
        .map(|n| noise_kind(n).ok_or_else(|| CliError::Usage(format!("unknown noise baseline `{n}`"))))
        .collect::<Result<Vec<_>>>()?;
    if oods.is_empty() && kinds.is_empty() {
        return Err(CliError::Usage("nothing to evaluate: give ood_data or noise".into()));
    }
    for path in std::iter::once(&model_path).chain(std::iter::once(&id_path)).chain(oods.iter().map(|(_, p)| p)) {
        if !Path::new(path).exists() {
            return Err(CliError::Context {
                context: format!("manifest entry {path}"),
                source: Error::Io(std::io::Error::new(std::io::ErrorKind::NotFound, "no such file")),
            });
        }
    }

    let model = load_model(&model_path)?;
    let id_ds = load_data(&id_path)?;
    let id_scores = recon_errors(&model.model, &id_ds, EXEC).context(|| format!("scoring {id_name}"))?.values;
    let noise_count = s.or("noise_count", a.noise_count, id_ds.len())?;
    let mut reports: Vec<MetricsReport> = Vec::new();
    for (name, path) in &oods {
        let ds = load_data(path)?;
        let scores = recon_errors(&model.model, &ds, EXEC).context(|| format!("scoring {name}"))?.values;
        reports.push(evaluate(&id_scores, &scores, &id_name, name).context(|| format!("evaluating {name}"))?);
    }
    for kind in kinds {
        let ds = kind.generate(noise_count, id_ds.shape(), seed, EXEC)?;
        let scores = recon_errors(&model.model, &ds, EXEC)?.values;
        reports.push(evaluate(&id_scores, &scores, &id_name, kind.label())?);
    }

    let dir = Path::new(&out_dir);
    let csv = metrics_table_csv(&reports);
    write_file(&dir.join("metrics.csv").to_string_lossy(), csv.as_bytes())?;
    let json = serde_json::to_string_pretty(&reports).map_err(Error::from)? + "\n";
    write_file(&dir.join("metrics.json").to_string_lossy(), json.as_bytes())?;

    println!("{:<16} {:<16} {:>9} {:>7} {:>7} {:>9} {:>8}", "id", "ood", "FPR@95", "DetErr", "AUROC", "AUPR-Out", "AUPR-In");
    for r in &reports {
        println!(
            "{:<16} {:<16} {:>9.4} {:>7.4} {:>7.4} {:>9.4} {:>8.4}",
            r.id_name, r.ood_name, r.fpr_at_95_tpr, r.detection_error, r.auroc, r.aupr_out, r.aupr_in
        );
    }
    println!("metrics {}", dir.join("metrics.csv").display());
    Ok(())
}
