use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use oamnet::config::RunConfig;
use oamnet::distortion::{robustness_sweep, DistortionKind};
use oamnet::holography::{phase_shift_reconstruct, preprocess_frames, Image, Reference};
use oamnet::interpret::{graph_evolution, occlusion_scan, random_probes, reduced_readout_benchmark, CharacteristicGraph};
use oamnet::io::{
    fmt_f64, load_checkpoint, load_dataset, read_field, read_pgm, save_checkpoint, save_dataset, write_csv, write_field, write_pgm16, Manifest,
};
use oamnet::model::HybridModel;
use oamnet::modes::{default_waist, synthesize};
use oamnet::training::dataset::mixed_probe_set;
use oamnet::training::trainer::logspace;
use oamnet::training::{evaluate, generate_dataset, temperature_sweep, train, Split};
use oamnet::{ComplexSpectrum, Error, GridSpec, Result, SpectrumBasis};

const THREADS_ENV: &str = "OAMNET_THREADS";

#[derive(Parser)]
#[command(name = "oamnet", version, about = "Hybrid diffractive/electronic OAM spectrum analyzer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// JSON run configuration; unset sections keep their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base configuration when no file is given: desk or paper.
    #[arg(long, default_value = "desk")]
    preset: String,
    /// Overrides every seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => match self.preset.as_str() {
                "desk" => RunConfig::default(),
                "paper" => RunConfig::paper(),
                other => return Err(Error::InvalidParameter(format!("unknown preset '{other}'"))),
            },
        };
        if let Some(s) = self.seed {
            cfg.dataset.seed = s;
            cfg.training.seed = s;
            cfg.distortion.seed = s;
            cfg.interpretation.seed = s;
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a simulated dataset of multiplexed beams.
    Dataset {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a model on a saved dataset.
    Train {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the configured epoch count.
        #[arg(long)]
        epochs: Option<usize>,
        /// Keep a checkpoint of every epoch under `epochs/`.
        #[arg(long)]
        snapshots: bool,
        /// Train one model per temperature instead (comma list, or `auto` for 11 values in [0.01, 1]).
        #[arg(long)]
        temperature_sweep: Option<String>,
    },
    /// Metrics of a checkpoint on one dataset split.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value = "test")]
        split: String,
        /// Writes metrics.csv and a manifest here; prints JSON otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Predict spectra of field files.
    Infer {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(required = true)]
        fields: Vec<PathBuf>,
        /// CSV destination; prints JSON otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthesize a beam from `charge:weight` pairs.
    Synth {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Comma-separated `charge:weight[:phase]` entries.
        #[arg(long, allow_hyphen_values = true)]
        modes: String,
        #[arg(long)]
        waist: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep one distortion and record the three error curves.
    Robustness {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        checkpoint: PathBuf,
        /// tr, ts, as, ls or at.
        #[arg(long)]
        kind: String,
        /// Comma-separated magnitudes; defaults to the kind's standard range.
        #[arg(long, allow_hyphen_values = true)]
        magnitudes: Option<String>,
        #[arg(long)]
        waist: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Occlusion graph, reduced-readout table, and optional graph evolution.
    Interpret {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        checkpoint: PathBuf,
        /// Directory of per-epoch checkpoints (as written by `train --snapshots`).
        #[arg(long)]
        evolution: Option<PathBuf>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        probes: Option<usize>,
        #[arg(long)]
        waist: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover a field from four phase-stepped interferograms.
    Reconstruct {
        /// Frames I1..I4 as PGM files.
        #[arg(long, num_args = 4, required = true)]
        frames: Vec<PathBuf>,
        /// Plane-wave reference amplitude, in frame units.
        #[arg(long, default_value_t = 1.0)]
        reference: f64,
        /// Recorded reference amplitude map; overrides `--reference`.
        #[arg(long)]
        reference_map: Option<PathBuf>,
        /// Multiplies raw counts before inversion.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = 600)]
        crop: usize,
        #[arg(long, default_value_t = 200)]
        size: usize,
        #[arg(long, default_value_t = 0.0)]
        blur: f64,
        /// Sample pitch of the output field.
        #[arg(long, default_value_t = 0.5)]
        pitch: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(e) = init_threads().and_then(|_| run(cli.command)) {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    ExitCode::SUCCESS
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("{THREADS_ENV}='{v}' is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Dataset { cfg, out } => cmd_dataset(&cfg.load()?, &out),
        Command::Train {
            cfg,
            dataset,
            out,
            epochs,
            snapshots,
            temperature_sweep,
        } => {
            let mut run = cfg.load()?;
            if let Some(e) = epochs {
                run.training.epochs = e;
            }
            match temperature_sweep {
                Some(t) => cmd_sweep(&run, &dataset, &out, &t),
                None => cmd_train(&run, &dataset, &out, snapshots),
            }
        }
        Command::Eval {
            checkpoint,
            dataset,
            split,
            out,
        } => cmd_eval(&checkpoint, &dataset, &split, out.as_deref()),
        Command::Infer { checkpoint, fields, out } => cmd_infer(&checkpoint, &fields, out.as_deref()),
        Command::Synth { cfg, modes, waist, out } => cmd_synth(&cfg.load()?, &modes, waist, &out),
        Command::Robustness {
            cfg,
            checkpoint,
            kind,
            magnitudes,
            waist,
            out,
        } => cmd_robustness(&cfg.load()?, &checkpoint, &kind, magnitudes.as_deref(), waist, &out),
        Command::Interpret {
            cfg,
            checkpoint,
            evolution,
            window,
            probes,
            waist,
            out,
        } => {
            let mut run = cfg.load()?;
            if let Some(w) = window {
                run.interpretation.window = w;
            }
            if let Some(p) = probes {
                run.interpretation.probes = p;
            }
            cmd_interpret(&run, &checkpoint, evolution.as_deref(), waist, &out)
        }
        Command::Reconstruct {
            frames,
            reference,
            reference_map,
            scale,
            crop,
            size,
            blur,
            pitch,
            out,
        } => cmd_reconstruct(&frames, reference, reference_map.as_deref(), scale, crop, size, blur, pitch, &out),
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("'{t}' is not a number")))
        })
        .collect()
}

fn cmd_dataset(run: &RunConfig, out: &Path) -> Result<()> {
    let model = run.model_config();
    let ds = generate_dataset(&run.dataset, model.grid()?, model.basis()?)?;
    save_dataset(out, &ds, &run.dataset)?;
    Manifest::new("dataset", run, run.dataset.seed, vec!["dataset.json".into(), "fields/".into()])?.write(out)?;
    log::info!("wrote {} samples to {}", ds.samples.len(), out.display());
    Ok(())
}

fn check_dataset_fits(model: &HybridModel, grid: GridSpec, basis: SpectrumBasis) -> Result<()> {
    model.grid().ensure_same(&grid)?;
    if model.basis() != basis {
        return Err(Error::InvalidParameter(format!(
            "model basis {:?} differs from dataset basis {basis:?}",
            model.basis()
        )));
    }
    Ok(())
}

fn cmd_train(run: &RunConfig, dataset: &Path, out: &Path, snapshots: bool) -> Result<()> {
    let ds = load_dataset(dataset)?;
    let mut rng = ChaCha8Rng::seed_from_u64(run.training.seed);
    let mut model = HybridModel::new(&run.model_config(), &mut rng)?;
    check_dataset_fits(&model, ds.grid, ds.basis)?;
    fs::create_dir_all(out)?;
    let seed = run.training.seed;
    let mut rows = Vec::new();
    let outcome = train(&mut model, &run.training, &ds.split(Split::Train), &ds.split(Split::Val), |rec, m| {
        rows.push(vec![
            rec.epoch.to_string(),
            fmt_f64(rec.train_loss),
            fmt_f64(rec.val_loss),
            fmt_f64(rec.learning_rate),
        ]);
        if snapshots {
            save_checkpoint(out.join("epochs").join(format!("epoch_{:04}", rec.epoch)), m, seed, Some(rec.epoch))?;
        }
        Ok(())
    });
    write_csv(out.join("curves.csv"), &["epoch", "train_loss", "val_loss", "learning_rate"], &rows)?;
    let report = match outcome {
        Ok(r) => r,
        Err(e @ Error::NonFinite { .. }) => {
            save_checkpoint(out.join("nonfinite"), &model, seed, None)?;
            log::error!("last finite parameters saved to {}", out.join("nonfinite").display());
            return Err(e);
        }
        Err(e) => return Err(e),
    };
    log::info!(
        "best epoch {} val {:.3e} in {:.1}s",
        report.best_epoch,
        report.best_val_loss,
        report.wall_clock_s
    );
    save_checkpoint(out, &model, seed, Some(report.best_epoch))?;
    // Metrics come from the stored checkpoint so they match a later `eval`.
    let (reloaded, _) = load_checkpoint(out)?;
    let mut metric_rows = Vec::new();
    for split in [Split::Val, Split::Test] {
        let samples = ds.split(split);
        if samples.is_empty() {
            continue;
        }
        let r = evaluate(&reloaded, &samples)?;
        metric_rows.push(vec![
            split.name().into(),
            r.count.to_string(),
            fmt_f64(r.mean_mse),
            r.mean_r2.map_or_else(String::new, fmt_f64),
            r.r2_undefined.to_string(),
        ]);
    }
    write_csv(
        out.join("metrics.csv"),
        &["split", "count", "mean_mse", "mean_r2", "r2_undefined"],
        &metric_rows,
    )?;
    let mut outputs = vec!["model.json".into(), "model.tensors".into(), "curves.csv".into(), "metrics.csv".into()];
    if snapshots {
        outputs.push("epochs/".into());
    }
    Manifest::new("train", run, seed, outputs)?.write(out)
}

fn cmd_sweep(run: &RunConfig, dataset: &Path, out: &Path, temps: &str) -> Result<()> {
    let temps = if temps == "auto" { logspace(0.01, 1.0, 11) } else { parse_list(temps)? };
    let ds = load_dataset(dataset)?;
    let model_cfg = run.model_config();
    let basis = model_cfg.basis()?;
    if basis != ds.basis {
        return Err(Error::InvalidParameter("model basis differs from dataset basis".into()));
    }
    let mixed = mixed_probe_set(ds.grid, ds.basis, ds.waist, run.interpretation.probes, run.training.seed)?;
    let mixed: Vec<_> = mixed.iter().collect();
    let rows = temperature_sweep(&model_cfg, &run.training, &temps, &ds.split(Split::Train), &ds.split(Split::Val), &mixed)?;
    fs::create_dir_all(out)?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.temperature),
                r.converged.to_string(),
                r.degraded.to_string(),
                r.best_epoch.to_string(),
                fmt_f64(r.val_mse),
                fmt_f64(r.mixed_mse),
            ]
        })
        .collect();
    write_csv(
        out.join("sweep.csv"),
        &["temperature", "converged", "degraded", "best_epoch", "val_mse", "mixed_mse"],
        &table,
    )?;
    Manifest::new("train --temperature-sweep", run, run.training.seed, vec!["sweep.csv".into()])?.write(out)
}

fn parse_split(s: &str) -> Result<Split> {
    match s {
        "train" => Ok(Split::Train),
        "val" => Ok(Split::Val),
        "test" => Ok(Split::Test),
        other => Err(Error::InvalidParameter(format!("unknown split '{other}'"))),
    }
}

fn cmd_eval(checkpoint: &Path, dataset: &Path, split: &str, out: Option<&Path>) -> Result<()> {
    let split = parse_split(split)?;
    let (model, meta) = load_checkpoint(checkpoint)?;
    let ds = load_dataset(dataset)?;
    check_dataset_fits(&model, ds.grid, ds.basis)?;
    let samples = ds.split(split);
    if samples.is_empty() {
        return Err(Error::InvalidParameter(format!("dataset has no {} samples", split.name())));
    }
    let r = evaluate(&model, &samples)?;
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            write_csv(
                dir.join("metrics.csv"),
                &["split", "count", "mean_mse", "mean_r2", "r2_undefined"],
                &[vec![
                    split.name().into(),
                    r.count.to_string(),
                    fmt_f64(r.mean_mse),
                    r.mean_r2.map_or_else(String::new, fmt_f64),
                    r.r2_undefined.to_string(),
                ]],
            )?;
            let rows: Vec<Vec<String>> = r
                .per_sample_mse
                .iter()
                .enumerate()
                .map(|(i, m)| vec![i.to_string(), fmt_f64(*m)])
                .collect();
            write_csv(dir.join("per_sample.csv"), &["index", "mse"], &rows)?;
            Manifest::new("eval", &meta, meta.seed, vec!["metrics.csv".into(), "per_sample.csv".into()])?.write(dir)
        }
        None => {
            let json = serde_json::json!({
                "split": split.name(),
                "count": r.count,
                "mean_mse": r.mean_mse,
                "mean_r2": r.mean_r2,
                "r2_undefined": r.r2_undefined,
            });
            println!("{}", serde_json::to_string_pretty(&json)?);
            Ok(())
        }
    }
}

fn cmd_infer(checkpoint: &Path, fields: &[PathBuf], out: Option<&Path>) -> Result<()> {
    let (model, _) = load_checkpoint(checkpoint)?;
    // Everything is read and predicted before anything is written.
    let mut results = Vec::with_capacity(fields.len());
    for path in fields {
        let field = read_field(path)?;
        let spec = model.predict_spectrum(&field)?;
        results.push((path.display().to_string(), spec));
    }
    let basis = model.basis();
    match out {
        Some(p) => {
            let mut header = vec!["file".to_string(), "argmax_charge".to_string()];
            header.extend(basis.charges().map(|l| format!("w{l}")));
            let rows: Vec<Vec<String>> = results
                .iter()
                .map(|(f, s)| {
                    let mut r = vec![f.clone(), basis.charge(s.argmax()).to_string()];
                    r.extend(s.weights.iter().map(|w| fmt_f64(*w)));
                    r
                })
                .collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            write_csv(p, &header, &rows)
        }
        None => {
            let json: Vec<_> = results
                .iter()
                .map(|(f, s)| {
                    serde_json::json!({
                        "file": f,
                        "charges": basis.charges().collect::<Vec<_>>(),
                        "weights": s.weights,
                        "argmax_charge": basis.charge(s.argmax()),
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&json)?);
            Ok(())
        }
    }
}

fn cmd_synth(run: &RunConfig, modes: &str, waist: Option<f64>, out: &Path) -> Result<()> {
    let model = run.model_config();
    let (grid, basis) = (model.grid()?, model.basis()?);
    let mut amps = vec![0.0; basis.count()];
    let mut phases = vec![0.0; basis.count()];
    for entry in modes.split(',') {
        let parts: Vec<&str> = entry.trim().split(':').collect();
        let bad = || Error::InvalidParameter(format!("mode entry '{entry}' is not charge:weight[:phase]"));
        if parts.len() < 2 || parts.len() > 3 {
            return Err(bad());
        }
        let l: i32 = parts[0].parse().map_err(|_| bad())?;
        let w: f64 = parts[1].parse().map_err(|_| bad())?;
        let i = basis
            .index_of(l)
            .ok_or_else(|| Error::InvalidParameter(format!("charge {l} is outside the basis")))?;
        if !(w >= 0.0 && w.is_finite()) {
            return Err(bad());
        }
        amps[i] = w;
        if parts.len() == 3 {
            phases[i] = parts[2].parse().map_err(|_| bad())?;
        }
    }
    let total: f64 = amps.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidParameter("mode weights sum to zero".into()));
    }
    let amps: Vec<f64> = amps.iter().map(|w| (w / total).sqrt()).collect();
    let spec = ComplexSpectrum::new(basis, amps, phases)?;
    let field = synthesize(&spec, waist.unwrap_or_else(|| default_waist(&grid)), grid)?;
    write_field(out, &field)
}

fn cmd_robustness(run: &RunConfig, checkpoint: &Path, kind: &str, magnitudes: Option<&str>, waist: Option<f64>, out: &Path) -> Result<()> {
    let kind: DistortionKind = kind.parse()?;
    let magnitudes = match magnitudes {
        Some(m) => parse_list(m)?,
        None => kind.default_magnitudes(),
    };
    let (model, _) = load_checkpoint(checkpoint)?;
    let waist = waist.unwrap_or_else(|| default_waist(&model.grid()));
    let report = robustness_sweep(&model, kind, &magnitudes, waist, &run.distortion)?;
    fs::create_dir_all(out)?;
    let rows: Vec<Vec<String>> = report
        .points
        .iter()
        .map(|p| {
            vec![
                kind.code().into(),
                fmt_f64(p.magnitude),
                fmt_f64(p.mse_vs_before),
                fmt_f64(p.mse_vs_after),
                fmt_f64(p.mse_after_vs_before),
            ]
        })
        .collect();
    write_csv(
        out.join("robustness.csv"),
        &["kind", "magnitude", "mse_vs_before", "mse_vs_after", "mse_after_vs_before"],
        &rows,
    )?;
    let mut probe_rows = Vec::new();
    for p in &report.points {
        for (i, m) in p.per_probe.iter().enumerate() {
            probe_rows.push(vec![fmt_f64(p.magnitude), i.to_string(), fmt_f64(*m)]);
        }
    }
    write_csv(out.join("per_probe.csv"), &["magnitude", "probe", "mse_vs_before"], &probe_rows)?;
    Manifest::new(
        &format!("robustness {}", kind.code()),
        &(run, &magnitudes),
        run.distortion.seed,
        vec!["robustness.csv".into(), "per_probe.csv".into()],
    )?
    .write(out)
}

fn graph_rows(g: &CharacteristicGraph) -> Vec<Vec<String>> {
    (0..g.labels.len())
        .map(|c| {
            let votes: Vec<String> = g.votes[c].iter().map(u32::to_string).collect();
            vec![
                (c / g.cells).to_string(),
                (c % g.cells).to_string(),
                g.labels[c].to_string(),
                votes.join(";"),
            ]
        })
        .collect()
}

const GRAPH_HEADER: [&str; 4] = ["cell_row", "cell_col", "label", "votes"];

/// Labels mapped to gray levels, one pixel per cell.
fn graph_image(g: &CharacteristicGraph, basis: SpectrumBasis) -> Result<(Image, f64, f64)> {
    let data = g.labels.iter().map(|l| f64::from(*l)).collect();
    Ok((Image::new(g.cells, g.cells, data)?, f64::from(basis.k_n), f64::from(basis.k_p)))
}

fn cmd_interpret(run: &RunConfig, checkpoint: &Path, evolution: Option<&Path>, waist: Option<f64>, out: &Path) -> Result<()> {
    let ic = &run.interpretation;
    let (model, _) = load_checkpoint(checkpoint)?;
    let grid = model.grid();
    let basis = model.basis();
    let waist = waist.unwrap_or_else(|| default_waist(&grid));
    let probes = random_probes(grid, basis, waist, ic.probes, ic.seed)?;
    let stride = ic.stride.unwrap_or(ic.window);
    let graph = occlusion_scan(&model, &probes, ic.window, stride, ic.rule)?;
    fs::create_dir_all(out)?;
    write_csv(out.join("graph.csv"), &GRAPH_HEADER, &graph_rows(&graph))?;
    let (img, lo, hi) = graph_image(&graph, basis)?;
    write_pgm16(out.join("graph.pgm"), &img, lo, hi)?;
    let bench = reduced_readout_benchmark(&model, &graph, &ic.budgets, waist, &probes)?;
    let rows: Vec<Vec<String>> = bench
        .iter()
        .map(|r| {
            vec![
                r.budget.map_or_else(|| "own_charge".into(), fmt_f64),
                fmt_f64(r.fraction),
                fmt_f64(r.accuracy),
                fmt_f64(r.mse_vs_full),
            ]
        })
        .collect();
    write_csv(
        out.join("reduced.csv"),
        &["selection", "pixel_fraction", "single_mode_accuracy", "mse_vs_full"],
        &rows,
    )?;
    let mut outputs = vec!["graph.csv".to_string(), "graph.pgm".into(), "reduced.csv".into()];
    if let Some(dir) = evolution {
        let mut dirs: Vec<PathBuf> = fs::read_dir(dir)?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<Vec<_>>>()?
            .into_iter()
            .filter(|p| p.join("model.json").is_file())
            .collect();
        dirs.sort();
        let models = dirs
            .iter()
            .map(|d| {
                let (m, meta) = load_checkpoint(d)?;
                Ok((meta.epoch.unwrap_or(0), m))
            })
            .collect::<Result<Vec<_>>>()?;
        let (graphs, changes) = graph_evolution(&models, &probes, ic.window, ic.rule)?;
        fs::create_dir_all(out.join("graphs"))?;
        let mut rows = Vec::new();
        for (i, g) in graphs.iter().enumerate() {
            let epoch = g.epoch.unwrap_or(0);
            write_csv(out.join("graphs").join(format!("epoch_{epoch:04}.csv")), &GRAPH_HEADER, &graph_rows(g))?;
            let change = if i == 0 { String::new() } else { fmt_f64(changes[i - 1]) };
            rows.push(vec![epoch.to_string(), g.distinct_labels().len().to_string(), change]);
        }
        write_csv(out.join("evolution.csv"), &["epoch", "distinct_labels", "change_fraction"], &rows)?;
        outputs.extend(["evolution.csv".into(), "graphs/".into()]);
    }
    Manifest::new("interpret", ic, ic.seed, outputs)?.write(out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_reconstruct(
    frames: &[PathBuf],
    reference: f64,
    reference_map: Option<&Path>,
    scale: f64,
    crop: usize,
    size: usize,
    blur: f64,
    pitch: f64,
    out: &Path,
) -> Result<()> {
    if frames.len() != 4 {
        return Err(Error::InvalidParameter(format!("need 4 frames, got {}", frames.len())));
    }
    let prep = |p: &Path| -> Result<Image> {
        let mut img = read_pgm(p)?;
        img.data.iter_mut().for_each(|v| *v *= scale);
        preprocess_frames(&img, crop, size, blur)
    };
    let imgs = frames.iter().map(|p| prep(p)).collect::<Result<Vec<_>>>()?;
    let imgs: [Image; 4] = imgs.try_into().map_err(|_| Error::InvalidParameter("need 4 frames".into()))?;
    let reference = match reference_map {
        Some(p) => Reference::Map(prep(p)?),
        None => Reference::Uniform(reference),
    };
    let field = phase_shift_reconstruct(&imgs, &reference, pitch)?;
    write_field(out, &field)
}
