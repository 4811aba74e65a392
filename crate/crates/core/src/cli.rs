//! Command-line front end: `saliency`, `augment` and `bench`.
//!
//! Standard output is line oriented:
//!
//! * `saliency` prints `<name> <x> <y>` per image (peak column, then row).
//! * `augment` prints nothing on success.
//! * `bench` prints one `key=value` line per run:
//!   `method=<tag> threads=<n> samples=<count> seconds=<s> samples_per_sec=<r>`.
//!
//! Exit status is 0 on success, 2 for usage errors and unreadable inputs,
//! 1 for any other failure.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::io::{
    is_image_file, load_cifar_files, load_image_dir, read_image, write_image, write_saliency_png,
    write_soft_label_line, CifarVariant, ManifestRecord, ManifestWriter,
};
use crate::mixer::{augment_batch_with, BatchConfig, Pairing, Scheme};
use crate::saliency::{detect, peak, MethodTag};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "saliencymix",
    version,
    about = "Saliency-guided patch mixing augmentation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write `<name>.saliency.png` for each image and print its peak.
    Saliency(SaliencyArgs),
    /// Generate augmented samples, a manifest and a soft-label file.
    Augment(AugmentArgs),
    /// Measure augmentation throughput per saliency method.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct SaliencyArgs {
    /// Image file, or a directory of .png/.pgm/.ppm files.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "fine_grained")]
    pub method: MethodTag,
    /// Output directory; defaults to the input's directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DatasetKind {
    Cifar10,
    Cifar100,
    Imagedir,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairingArg {
    Random,
    Permutation,
}

impl From<PairingArg> for Pairing {
    fn from(p: PairingArg) -> Self {
        match p {
            PairingArg::Random => Pairing::Random,
            PairingArg::Permutation => Pairing::Permutation,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DatasetArgs {
    #[arg(long, value_enum, default_value = "cifar10")]
    pub dataset: DatasetKind,
    /// CIFAR batch file(s), or the image directory root.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    /// Labels file for `imagedir`; defaults to `<input>/labels.csv`.
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct MixArgs {
    #[arg(long, default_value = "fine_grained")]
    pub method: MethodTag,
    #[arg(long, default_value = "sal2corr")]
    pub scheme: Scheme,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, value_enum, default_value = "random")]
    pub pairing: PairingArg,
    #[arg(long, default_value_t = 1.0)]
    pub apply_probability: f64,
    /// Memoize each dataset image's saliency map across samples.
    #[arg(long)]
    pub cache_saliency: bool,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[command(flatten)]
    pub mix: MixArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Defaults to `<out>/manifest.jsonl`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Defaults to `<out>/soft_labels.txt`.
    #[arg(long)]
    pub soft_labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[arg(long, default_value = "sal2corr")]
    pub scheme: Scheme,
    /// Restrict to one method; all methods by default.
    #[arg(long)]
    pub method: Option<MethodTag>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    /// Thread count for the second run (the first is always single-threaded).
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long)]
    pub cache_saliency: bool,
    /// Write the manifest of the last run of the first benchmarked method.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = match cli.command {
        Command::Saliency(a) => cmd_saliency(&a, &mut out),
        Command::Augment(a) => cmd_augment(&a),
        Command::Bench(a) => cmd_bench(&a, &mut out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotFound(_)
        | Error::CorruptFile { .. }
        | Error::InvalidArgument(_)
        | Error::EmptyInput(_) => EXIT_INPUT,
        _ => EXIT_FAILURE,
    }
}

pub fn cmd_saliency(args: &SaliencyArgs, out: &mut impl Write) -> Result<()> {
    let input = &args.input;
    let meta = fs::metadata(input).map_err(|e| Error::io_at(input, e))?;
    let files: Vec<PathBuf> = if meta.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(input)?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        files.retain(|p| p.is_file() && is_image_file(p) && !is_saliency_output(p));
        files.sort();
        if files.is_empty() {
            return Err(Error::EmptyInput(format!(
                "{} contains no images",
                input.display()
            )));
        }
        files
    } else {
        vec![input.clone()]
    };
    let out_dir = match &args.out {
        Some(d) => d.clone(),
        None if meta.is_dir() => input.clone(),
        None => input.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    if !out_dir.as_os_str().is_empty() {
        fs::create_dir_all(&out_dir)?;
    }
    let method = args.method.into();
    for file in files {
        let img = read_image(&file)?;
        let map = detect(&method, &img)?;
        let name = file
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("image")
            .to_string();
        write_saliency_png(&map, out_dir.join(format!("{name}.saliency.png")))?;
        let p = peak(&map);
        writeln!(out, "{name} {} {}", p.x, p.y)?;
    }
    Ok(())
}

fn is_saliency_output(p: &Path) -> bool {
    p.file_name()
        .and_then(|n| n.to_str())
        .is_some_and(|n| n.ends_with(".saliency.png"))
}

pub fn load_dataset(args: &DatasetArgs) -> Result<Dataset> {
    match args.dataset {
        DatasetKind::Cifar10 => load_cifar_files(&args.input, CifarVariant::Cifar10),
        DatasetKind::Cifar100 => load_cifar_files(&args.input, CifarVariant::Cifar100Fine),
        DatasetKind::Imagedir => {
            let [root] = args.input.as_slice() else {
                return Err(Error::InvalidArgument(
                    "imagedir takes exactly one --input directory".into(),
                ));
            };
            let labels = args
                .labels
                .clone()
                .unwrap_or_else(|| root.join("labels.csv"));
            load_image_dir(root, labels)
        }
    }
}

fn batch_config(mix: &MixArgs) -> BatchConfig {
    BatchConfig {
        count: mix.count,
        seed: mix.seed,
        scheme: mix.scheme,
        method: mix.method.into(),
        pairing: mix.pairing.into(),
        apply_probability: mix.apply_probability,
        cache_saliency: mix.cache_saliency,
        threads: mix.threads.max(1),
    }
}

pub fn cmd_augment(args: &AugmentArgs) -> Result<()> {
    let dataset = load_dataset(&args.data)?;
    let config = batch_config(&args.mix);
    fs::create_dir_all(&args.out)?;
    let manifest_path = args
        .manifest
        .clone()
        .unwrap_or_else(|| args.out.join("manifest.jsonl"));
    let labels_path = args
        .soft_labels
        .clone()
        .unwrap_or_else(|| args.out.join("soft_labels.txt"));

    let result = write_augmented(&dataset, &config, &args.out, &manifest_path, &labels_path);
    if result.is_err() {
        let _ = fs::remove_file(&manifest_path);
        let _ = fs::remove_file(&labels_path);
    }
    result
}

fn write_augmented(
    dataset: &Dataset,
    config: &BatchConfig,
    out_dir: &Path,
    manifest_path: &Path,
    labels_path: &Path,
) -> Result<()> {
    let mut manifest = ManifestWriter::create(manifest_path)?;
    let mut labels =
        BufWriter::new(File::create(labels_path).map_err(|e| Error::io_at(labels_path, e))?);
    augment_batch_with(dataset, config, |s| {
        write_image(
            &s.sample.image,
            out_dir.join(format!("aug_{}.png", s.index)),
        )?;
        manifest.push(&ManifestRecord::from_sample(&s, dataset, config.seed))?;
        write_soft_label_line(&mut labels, s.index, &s.sample.label)
    })?;
    manifest.finish()?;
    labels.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub method: MethodTag,
    pub threads: usize,
    pub samples: usize,
    pub seconds: f64,
}

impl BenchReport {
    pub fn samples_per_sec(&self) -> f64 {
        if self.samples == 0 || self.seconds <= 0.0 {
            0.0
        } else {
            self.samples as f64 / self.seconds
        }
    }
}

impl std::fmt::Display for BenchReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "method={} threads={} samples={} seconds={:.6} samples_per_sec={:.1}",
            self.method,
            self.threads,
            self.samples,
            self.seconds,
            self.samples_per_sec()
        )
    }
}

/// Times `config.count` augmentations, discarding the images. Returns the
/// report and the manifest records produced.
pub fn bench_once(
    dataset: &Dataset,
    config: &BatchConfig,
) -> Result<(BenchReport, Vec<ManifestRecord>)> {
    let mut records = Vec::with_capacity(config.count);
    let start = Instant::now();
    augment_batch_with(dataset, config, |s| {
        records.push(ManifestRecord::from_sample(&s, dataset, config.seed));
        Ok(())
    })?;
    let seconds = start.elapsed().as_secs_f64();
    let report = BenchReport {
        method: config.method.tag(),
        threads: config.threads,
        samples: records.len(),
        seconds,
    };
    Ok((report, records))
}

pub fn cmd_bench(args: &BenchArgs, out: &mut impl Write) -> Result<()> {
    let dataset = load_dataset(&args.data)?;
    let color = dataset.shape().is_some_and(|(_, _, c)| c == 3);
    let methods: Vec<MethodTag> = match args.method {
        Some(m) => vec![m],
        None => MethodTag::ALL
            .into_iter()
            .filter(|&m| color || m != MethodTag::FrequencyTuned)
            .collect(),
    };
    let mut thread_counts = vec![1];
    if args.threads > 1 {
        thread_counts.push(args.threads);
    }
    let mut first_manifest = None;
    for &method in &methods {
        for &threads in &thread_counts {
            let config = BatchConfig {
                count: args.count,
                seed: args.seed,
                scheme: args.scheme,
                method: method.into(),
                cache_saliency: args.cache_saliency,
                threads,
                ..BatchConfig::default()
            };
            let (report, records) = bench_once(&dataset, &config)?;
            writeln!(out, "{report}")?;
            if method == methods[0] {
                first_manifest = Some(records);
            }
        }
    }
    if let (Some(path), Some(records)) = (&args.manifest, first_manifest) {
        crate::io::write_manifest(&records, path)?;
    }
    Ok(())
}
