//! Command line for the wordpca toolkit.
//!
//! Every subcommand writes a report. Settings come from flags, optionally
//! layered over a flat JSON object given with `--config`; flags win. The
//! merged settings, with defaults filled in, are echoed into the report.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use wordpca::core::{
    fit_pca, ppa, ppa_pca_reduce_with, project, split_projection, train_logreg, ComponentRange, EmbeddingSet,
    LogRegConfig, PcaModel, PpaConfig, SplitBand,
};
use wordpca::datasets::{read_labeled_file, read_similarity_file, LoadOptions, Split};
use wordpca::formats::{logreg, pcam, read_embeddings_file, write_embeddings_file};
use wordpca::harness::{self, EvalConfig, Task, DEFAULT_PROBE_MAX_ITERS};
use wordpca::report::{EvalReport, Provenance, ReportFormat, ResultRow};
use wordpca::{EmbeddingFormat, Error, Result};

#[derive(Parser)]
#[command(name = "wordpca", version, about = "Principal-component analysis and post-processing of word embeddings")]
struct Cli {
    /// JSON object of settings; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert embeddings between file formats.
    Convert(ConvertArgs),
    /// Fit a PCA model or project embeddings onto a component range.
    #[command(subcommand)]
    Pca(PcaCommand),
    /// Remove the mean and top principal directions, or compare against the original.
    Ppa(PpaArgs),
    /// PPA, PCA reduction to a smaller dimension, PPA again.
    Reduce(ReduceArgs),
    /// Top, middle and bottom variance bands: variance shares, band embeddings, evaluation.
    Split(SplitArgs),
    /// Evaluate embeddings on similarity or classification datasets.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Evaluate on the top k components for k = step, 2·step, ..., d.
    Sweep(SweepArgs),
    /// Train one classifier per principal component.
    Probe(ProbeArgs),
    /// Re-render a saved JSON report.
    Report(ReportArgs),
}

#[derive(Subcommand)]
enum PcaCommand {
    /// Fit a model and save it.
    Fit(PcaFitArgs),
    /// Project embeddings onto components [start, end).
    Project(PcaProjectArgs),
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Word similarity: Spearman rho of cosines against human scores.
    Sim(EvalSimArgs),
    /// Sentence classification with averaged word vectors.
    Cls(EvalClsArgs),
}

fn is_false(b: &bool) -> bool {
    !b
}

#[derive(Args, Serialize, Deserialize, Default, Clone)]
#[serde(default)]
struct InputOpts {
    /// Embedding file.
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    embeddings: Option<PathBuf>,
    /// Format of the embedding file [default: glove-text].
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    format: Option<EmbeddingFormat>,
}

#[derive(Args, Serialize, Deserialize, Default, Clone)]
#[serde(default)]
struct ReportOpts {
    /// Report format [default: json].
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<ReportFormat>,
    /// Where to write the report [default: stdout].
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    report_out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default, Clone)]
#[serde(default)]
struct ModelOpts {
    /// Saved PCA model; fitted on the embeddings when absent.
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default, Clone)]
#[serde(default)]
struct OutputOpts {
    /// Output file.
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
    /// Format of written embeddings [default: the input format].
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    out_format: Option<EmbeddingFormat>,
}

#[derive(Args, Serialize, Deserialize, Default, Clone)]
#[serde(default)]
struct DatasetOpts {
    /// Word similarity TSV (repeatable).
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    sim: Vec<PathBuf>,
    /// Labeled sentence TSV (repeatable).
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    cls: Vec<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default, Clone)]
#[serde(default)]
struct ClassifierOpts {
    /// L2 penalty on non-bias weights [default: 1 / training rows].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    l2: Option<f64>,
    /// Gradient descent iteration cap [default: 1000, 200 for probes].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    max_iters: Option<usize>,
    /// Stop when the gradient norm falls below this [default: 1e-6].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
    /// First line-search step [default: 1].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    initial_step: Option<f64>,
    /// Standardize features with training-set statistics.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    standardize: bool,
    /// k-fold cross-validation over all records; 1 uses the file's split [default: 1].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    folds: Option<usize>,
    /// Treat `dev` records as training data instead of rejecting them.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    dev_as_train: bool,
}

impl ClassifierOpts {
    fn fill_defaults(&mut self, max_iters: usize) {
        let d = LogRegConfig::default();
        self.max_iters.get_or_insert(max_iters);
        self.tol.get_or_insert(d.tolerance);
        self.initial_step.get_or_insert(d.initial_step);
        self.folds.get_or_insert(1);
    }

    fn eval_config(&self) -> EvalConfig {
        let d = LogRegConfig::default();
        EvalConfig {
            classifier: LogRegConfig {
                l2_strength: self.l2,
                max_iters: self.max_iters.unwrap_or(d.max_iters),
                tolerance: self.tol.unwrap_or(d.tolerance),
                initial_step: self.initial_step.unwrap_or(d.initial_step),
                standardize: self.standardize,
            },
            folds: self.folds.unwrap_or(1),
        }
    }

    fn load_options(&self) -> LoadOptions {
        LoadOptions { dev_as_train: self.dev_as_train }
    }
}

#[derive(Args, Serialize, Deserialize, Default, Clone)]
#[serde(default)]
struct ConvertArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpts,
    /// Target format.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    to: Option<EmbeddingFormat>,
    /// Output file.
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    report: ReportOpts,
}

#[derive(Args, Serialize, Deserialize, Default, Clone)]
#[serde(default)]
struct PcaFitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpts,
    /// Where to save the model.
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    report: ReportOpts,
}

#[derive(Args, Serialize, Deserialize, Default, Clone)]
#[serde(default)]
struct PcaProjectArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpts,
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelOpts,
    /// First component [default: 0].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    start: Option<usize>,
    /// One past the last component [default: d].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    end: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputOpts,
    #[command(flatten)]
    #[serde(flatten)]
    report: ReportOpts,
}

#[derive(Args, Serialize, Deserialize, Default, Clone)]
#[serde(default)]
struct PpaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpts,
    /// Number of top directions removed [default: 5].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    d_top: Option<usize>,
    /// Evaluate original, PPA and mean-only embeddings on the datasets.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    compare: bool,
    #[command(flatten)]
    #[serde(flatten)]
    datasets: DatasetOpts,
    #[command(flatten)]
    #[serde(flatten)]
    classifier: ClassifierOpts,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputOpts,
    #[command(flatten)]
    #[serde(flatten)]
    report: ReportOpts,
}

#[derive(Args, Serialize, Deserialize, Default, Clone)]
#[serde(default)]
struct ReduceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpts,
    /// Directions removed before reduction [default: 5].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    d_top: Option<usize>,
    /// Directions removed after reduction [default: --d-top].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    second_d_top: Option<usize>,
    /// Target dimension.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputOpts,
    #[command(flatten)]
    #[serde(flatten)]
    report: ReportOpts,
}

#[derive(Args, Serialize, Deserialize, Default, Clone)]
#[serde(default)]
struct SplitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpts,
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelOpts,
    /// Band written to --out: T, M or B.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    band: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    datasets: DatasetOpts,
    #[command(flatten)]
    #[serde(flatten)]
    classifier: ClassifierOpts,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputOpts,
    #[command(flatten)]
    #[serde(flatten)]
    report: ReportOpts,
}

#[derive(Args, Serialize, Deserialize, Default, Clone)]
#[serde(default)]
struct EvalSimArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpts,
    /// Word similarity TSV (repeatable).
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    dataset: Vec<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    report: ReportOpts,
}

#[derive(Args, Serialize, Deserialize, Default, Clone)]
#[serde(default)]
struct EvalClsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpts,
    /// Labeled sentence TSV (repeatable).
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    dataset: Vec<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    classifier: ClassifierOpts,
    /// Save the classifier trained on the training split (one dataset only).
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    model_out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    report: ReportOpts,
}

#[derive(Args, Serialize, Deserialize, Default, Clone)]
#[serde(default)]
struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpts,
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelOpts,
    /// Component increment; must divide d [default: 10].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    step: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    datasets: DatasetOpts,
    #[command(flatten)]
    #[serde(flatten)]
    classifier: ClassifierOpts,
    #[command(flatten)]
    #[serde(flatten)]
    report: ReportOpts,
}

#[derive(Args, Serialize, Deserialize, Default, Clone)]
#[serde(default)]
struct ProbeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputOpts,
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelOpts,
    /// Labeled probing TSV.
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    dataset: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    classifier: ClassifierOpts,
    #[command(flatten)]
    #[serde(flatten)]
    report: ReportOpts,
}

#[derive(Args, Serialize, Deserialize, Default, Clone)]
#[serde(default)]
struct ReportArgs {
    /// Saved JSON report.
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    report: ReportOpts,
}

/// Flags layered over the config file.
fn merge<T: Serialize + DeserializeOwned>(args: &T, file: &Map<String, Value>) -> Result<T> {
    let mut merged = file.clone();
    if let Value::Object(flags) = serde_json::to_value(args)? {
        merged.extend(flags);
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| Error::InvalidArgument(format!("config: {e}")))
}

fn load_config(path: Option<&Path>) -> Result<Map<String, Value>> {
    let Some(path) = path else { return Ok(Map::new()) };
    match serde_json::from_slice(&fs::read(path)?)? {
        Value::Object(m) => Ok(m),
        _ => Err(Error::InvalidArgument("config file must hold a JSON object".into())),
    }
}

fn required<'a, T>(v: &'a Option<T>, flag: &str) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| Error::InvalidArgument(format!("missing --{flag}")))
}

/// Collects inputs, provenance and the report destination of one run.
struct Run {
    provenance: Provenance,
    embedding: String,
}

impl Run {
    fn new(config: Option<&Path>) -> Result<Self> {
        let mut run = Run { provenance: Provenance::now(), embedding: String::new() };
        if let Some(p) = config {
            run.provenance.add_input(p)?;
        }
        Ok(run)
    }

    fn embeddings(&mut self, input: &mut InputOpts) -> Result<EmbeddingSet> {
        let path = required(&input.embeddings, "embeddings")?.clone();
        let format = *input.format.get_or_insert(EmbeddingFormat::GloveText);
        self.provenance.add_input(&path)?;
        self.embedding = path.display().to_string();
        read_embeddings_file(&path, format)
    }

    fn model(&mut self, opts: &ModelOpts, e: &EmbeddingSet) -> Result<PcaModel> {
        match &opts.model {
            Some(path) => {
                self.provenance.add_input(path)?;
                pcam::read_model(BufReader::new(File::open(path)?))
            }
            None => Ok(fit_pca(e)?),
        }
    }

    fn tasks(&mut self, sim: &[PathBuf], cls: &[PathBuf], opts: LoadOptions) -> Result<Vec<Task>> {
        let mut tasks = Vec::new();
        for p in sim {
            self.provenance.add_input(p)?;
            tasks.push(Task::Similarity(read_similarity_file(p)?));
        }
        for p in cls {
            self.provenance.add_input(p)?;
            tasks.push(Task::Classification(read_labeled_file(p, opts)?));
        }
        if tasks.is_empty() {
            return Err(Error::InvalidArgument("no datasets given".into()));
        }
        Ok(tasks)
    }

    /// Stamps the report and writes it to `--report-out`, else `fallback`,
    /// else stdout.
    fn finish<T: Serialize>(
        self,
        mut report: EvalReport,
        args: &T,
        opts: &ReportOpts,
        fallback: Option<&Path>,
    ) -> Result<()> {
        let mut config = match report.config {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        let mut cli = serde_json::to_value(args)?;
        if let Value::Object(ref mut m) = cli {
            m.insert("report".into(), serde_json::to_value(opts.report.unwrap_or(ReportFormat::Json))?);
        }
        config.insert("cli".into(), cli);
        report.config = Value::Object(config);
        report.embedding = self.embedding;
        report.provenance = self.provenance;
        let text = report.render(opts.report.unwrap_or(ReportFormat::Json))?;
        match opts.report_out.as_deref().or(fallback) {
            Some(path) => fs::write(path, text)?,
            None => io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn write_embeddings(e: &EmbeddingSet, output: &mut OutputOpts, input_format: EmbeddingFormat) -> Result<()> {
    let format = *output.out_format.get_or_insert(input_format);
    if let Some(path) = &output.out {
        write_embeddings_file(e, format, path)?;
    }
    Ok(())
}

fn shape_rows(report: &mut EvalReport, e: &EmbeddingSet) {
    report.push(ResultRow::new("embeddings", "rows", e.len() as f64));
    report.push(ResultRow::new("embeddings", "dim", e.dim() as f64));
}

fn convert(args: ConvertArgs, file: &Map<String, Value>, run: &mut Run) -> Result<(EvalReport, ConvertArgs)> {
    let mut args = merge(&args, file)?;
    let e = run.embeddings(&mut args.input)?;
    let to = *required(&args.to, "to")?;
    write_embeddings_file(&e, to, required(&args.out, "out")?)?;
    let mut report = EvalReport::new("convert");
    shape_rows(&mut report, &e);
    Ok((report, args))
}

fn pca_fit(args: PcaFitArgs, file: &Map<String, Value>, run: &mut Run) -> Result<(EvalReport, PcaFitArgs)> {
    let mut args = merge(&args, file)?;
    let e = run.embeddings(&mut args.input)?;
    let model = fit_pca(&e)?;
    if let Some(path) = &args.out {
        pcam::write_model(&model, BufWriter::new(File::create(path)?))?;
    }
    let mut report = EvalReport::new("pca_fit");
    shape_rows(&mut report, &e);
    let total = model.total_variance();
    for (i, &v) in model.variances().iter().enumerate() {
        report.push(ResultRow::point("variance", "value", i as f64, v));
        report.push(ResultRow::point("variance", "ratio", i as f64, if total > 0.0 { v / total } else { 0.0 }));
    }
    Ok((report, args))
}

fn pca_project(args: PcaProjectArgs, file: &Map<String, Value>, run: &mut Run) -> Result<(EvalReport, PcaProjectArgs)> {
    let mut args = merge(&args, file)?;
    let e = run.embeddings(&mut args.input)?;
    let model = run.model(&args.model, &e)?;
    let start = *args.start.get_or_insert(0);
    let end = *args.end.get_or_insert(model.dim());
    let range = ComponentRange::new(start, end, model.dim())?;
    let projected = project(&e, &model, range)?;
    write_embeddings(&projected, &mut args.output, args.input.format.unwrap())?;
    let mut report = EvalReport::new("pca_project");
    shape_rows(&mut report, &projected);
    report.push(ResultRow::new("variance", "ratio", wordpca::core::explained_variance_ratio(&model, range)));
    Ok((report, args))
}

fn ppa_cmd(args: PpaArgs, file: &Map<String, Value>, run: &mut Run) -> Result<(EvalReport, PpaArgs)> {
    let mut args = merge(&args, file)?;
    let e = run.embeddings(&mut args.input)?;
    let cfg = PpaConfig::new(*args.d_top.get_or_insert(PpaConfig::DEFAULT_D_TOP));
    let processed = ppa(&e, cfg)?;
    write_embeddings(&processed, &mut args.output, args.input.format.unwrap())?;
    let report = if args.compare {
        args.classifier.fill_defaults(LogRegConfig::default().max_iters);
        let tasks = run.tasks(&args.datasets.sim, &args.datasets.cls, args.classifier.load_options())?;
        harness::ppa_compare(&e, cfg, &tasks, &args.classifier.eval_config())?
    } else {
        let mut r = EvalReport::new("ppa");
        shape_rows(&mut r, &processed);
        r.config = json!({ "d_top": cfg.d_top });
        r
    };
    Ok((report, args))
}

fn reduce(args: ReduceArgs, file: &Map<String, Value>, run: &mut Run) -> Result<(EvalReport, ReduceArgs)> {
    let mut args = merge(&args, file)?;
    let e = run.embeddings(&mut args.input)?;
    let first = *args.d_top.get_or_insert(PpaConfig::DEFAULT_D_TOP);
    let second = *args.second_d_top.get_or_insert(first);
    let k = *required(&args.dim, "dim")?;
    let reduced = ppa_pca_reduce_with(&e, PpaConfig::new(first), k, PpaConfig::new(second))?;
    write_embeddings(&reduced, &mut args.output, args.input.format.unwrap())?;
    let mut report = EvalReport::new("reduce");
    shape_rows(&mut report, &reduced);
    Ok((report, args))
}

fn split(args: SplitArgs, file: &Map<String, Value>, run: &mut Run) -> Result<(EvalReport, SplitArgs)> {
    let mut args = merge(&args, file)?;
    let e = run.embeddings(&mut args.input)?;
    let model = run.model(&args.model, &e)?;
    if let Some(band) = &args.band {
        let band: SplitBand = band.parse()?;
        let part = split_projection(&e, &model, band)?;
        write_embeddings(&part, &mut args.output, args.input.format.unwrap())?;
    } else if args.output.out.is_some() {
        return Err(Error::InvalidArgument("--out needs --band".into()));
    }
    let report = if args.datasets.sim.is_empty() && args.datasets.cls.is_empty() {
        let mut r = EvalReport::new("split");
        for band in SplitBand::ALL {
            let ratio = wordpca::core::explained_variance_ratio(&model, band.range(model.dim())?);
            r.push(ResultRow::new("variance", band.letter(), ratio));
        }
        r
    } else {
        args.classifier.fill_defaults(LogRegConfig::default().max_iters);
        let tasks = run.tasks(&args.datasets.sim, &args.datasets.cls, args.classifier.load_options())?;
        harness::split_eval(&e, &model, &tasks, &args.classifier.eval_config())?
    };
    Ok((report, args))
}

fn eval_sim(args: EvalSimArgs, file: &Map<String, Value>, run: &mut Run) -> Result<(EvalReport, EvalSimArgs)> {
    let mut args = merge(&args, file)?;
    let e = run.embeddings(&mut args.input)?;
    let tasks = run.tasks(&args.dataset, &[], LoadOptions::default())?;
    Ok((harness::evaluate_all(&e, &tasks, &EvalConfig::default())?, args))
}

fn eval_cls(args: EvalClsArgs, file: &Map<String, Value>, run: &mut Run) -> Result<(EvalReport, EvalClsArgs)> {
    let mut args = merge(&args, file)?;
    let e = run.embeddings(&mut args.input)?;
    args.classifier.fill_defaults(LogRegConfig::default().max_iters);
    let cfg = args.classifier.eval_config();
    let tasks = run.tasks(&[], &args.dataset, args.classifier.load_options())?;
    let mut report = harness::evaluate_all(&e, &tasks, &cfg)?;
    if let Some(path) = &args.model_out {
        let [Task::Classification(ds)] = &tasks[..] else {
            return Err(Error::InvalidArgument("--model-out needs exactly one dataset".into()));
        };
        let train: Vec<_> = ds.split(Split::Train).collect();
        let mut features = wordpca::core::Matrix::zeros(train.len(), e.dim());
        for (i, r) in train.iter().enumerate() {
            features.row_mut(i).copy_from_slice(&wordpca::core::compose_sentence(&r.tokens, &e));
        }
        let labels: Vec<&str> = train.iter().map(|r| r.label.as_str()).collect();
        let model = train_logreg(&features, &labels, &cfg.classifier)?;
        fs::write(path, logreg::to_json(&model)?)?;
        report.push(ResultRow::new(&ds.name, "train_iterations", model.summary().iterations as f64));
        report.push(ResultRow::new(&ds.name, "train_loss", model.summary().final_loss));
    }
    Ok((report, args))
}

fn sweep(args: SweepArgs, file: &Map<String, Value>, run: &mut Run) -> Result<(EvalReport, SweepArgs)> {
    let mut args = merge(&args, file)?;
    let e = run.embeddings(&mut args.input)?;
    let model = run.model(&args.model, &e)?;
    let step = *args.step.get_or_insert(10);
    args.classifier.fill_defaults(LogRegConfig::default().max_iters);
    let tasks = run.tasks(&args.datasets.sim, &args.datasets.cls, args.classifier.load_options())?;
    Ok((harness::dimension_sweep(&e, &model, &tasks, step, &args.classifier.eval_config())?, args))
}

fn probe(args: ProbeArgs, file: &Map<String, Value>, run: &mut Run) -> Result<(EvalReport, ProbeArgs)> {
    let mut args = merge(&args, file)?;
    let e = run.embeddings(&mut args.input)?;
    let model = run.model(&args.model, &e)?;
    args.classifier.fill_defaults(DEFAULT_PROBE_MAX_ITERS);
    let path = required(&args.dataset, "dataset")?.clone();
    run.provenance.add_input(&path)?;
    let ds = read_labeled_file(&path, args.classifier.load_options())?;
    Ok((harness::probe_components(&e, &model, &ds, &args.classifier.eval_config())?, args))
}

/// Re-renders a saved report unchanged.
fn rerender(args: ReportArgs, file: &Map<String, Value>) -> Result<()> {
    let args = merge(&args, file)?;
    let input = required(&args.input, "input")?;
    let report = EvalReport::from_json(&fs::read_to_string(input)?)?;
    let text = report.render(args.report.report.unwrap_or(ReportFormat::Json))?;
    match &args.report.report_out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let config = cli.config.as_deref();
    let file = load_config(config)?;
    let mut run = Run::new(config)?;
    macro_rules! dispatch {
        ($f:ident, $args:expr) => {{
            let (report, args) = $f($args, &file, &mut run)?;
            let opts = args.report.clone();
            run.finish(report, &args, &opts, None)
        }};
    }
    match cli.command {
        Command::Convert(a) => dispatch!(convert, a),
        Command::Pca(PcaCommand::Fit(a)) => dispatch!(pca_fit, a),
        Command::Pca(PcaCommand::Project(a)) => dispatch!(pca_project, a),
        Command::Ppa(a) => dispatch!(ppa_cmd, a),
        Command::Reduce(a) => dispatch!(reduce, a),
        Command::Split(a) => dispatch!(split, a),
        Command::Eval(EvalCommand::Sim(a)) => dispatch!(eval_sim, a),
        Command::Eval(EvalCommand::Cls(a)) => dispatch!(eval_cls, a),
        Command::Sweep(a) => dispatch!(sweep, a),
        Command::Probe(a) => dispatch!(probe, a),
        Command::Report(a) => rerender(a, &file),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}: {e}", e.name());
            ExitCode::FAILURE
        }
    }
}
