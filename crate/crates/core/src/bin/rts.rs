use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::panic;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ranked_shapes::frechet::{
    frechet_mean_exact, frechet_mean_genealogy, frechet_mean_hetero, frechet_mean_sa, frechet_variance, medoid_by,
    CoolingSchedule, Objective, SaConfig, SearchMethod, TargetMatrix, TimeSummary,
};
use ranked_shapes::io::{
    classical_mds, genealogy_to_tree, hetero_to_tree, parse_trees, shape_to_tree, write_code, write_fmatrix,
    write_genealogy, write_hetero, write_real_matrix, RankOptions, TreeSet,
};
use ranked_shapes::metrics::{
    align_heterochronous, d_aligned, d_genealogy, d_shape, pairwise_distance_matrix, DistanceMatrix, Metric,
};
use ranked_shapes::models::{
    blum_francois_pmf, sample_blum_francois, sample_coalescent_genealogy, BetaSplit, KingmanMoments, PopSize,
};
use ranked_shapes::order::{credible_ball, entropy, kingman_reference, sort_by_total_order, SignedKey};
use ranked_shapes::shape::{enumerate_shapes_capped, FMatrix, DEFAULT_ENUMERATION_CAP};
use ranked_shapes::{Error, Result};

#[derive(Parser)]
#[command(name = "rts", version, about = "Ranked tree shapes: distances, Fréchet means, orders and models")]
struct Cli {
    /// Run every kernel on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two trees, or the pairwise distance matrix as CSV.
    Distance {
        #[arg(long, default_value = "d2")]
        metric: Metric,
        #[arg(long, value_enum, default_value_t = Mode::Shape)]
        mode: Mode,
        #[command(flatten)]
        input: Input,
    },
    /// Fréchet mean of a corpus or of a model distribution.
    Mean {
        #[arg(long, default_value = "d2")]
        metric: Metric,
        /// Summary of branching times for timed input.
        #[arg(long, default_value = "mean")]
        times: TimeSummary,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        source: Source,
    },
    /// Fréchet variance around the Fréchet mean.
    Variance {
        #[arg(long, default_value = "d2")]
        metric: Metric,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        source: Source,
    },
    /// The sample tree minimizing the sum of squared distances.
    Medoid {
        #[arg(long, default_value = "d2")]
        metric: Metric,
        #[arg(long, value_enum, default_value_t = Mode::Shape)]
        mode: Mode,
        #[command(flatten)]
        input: Input,
    },
    /// Shannon entropy (nats) of the empirical or model distribution.
    Entropy {
        #[command(flatten)]
        source: Source,
    },
    /// Smallest ball around a center holding the requested mass.
    Ball {
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[arg(long, default_value = "d2")]
        metric: Metric,
        /// File whose first tree is the center (default: the Fréchet mean).
        #[arg(long)]
        center: Option<PathBuf>,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        source: Source,
    },
    /// Distribution sorted by the total order, as CSV.
    Order {
        /// `kingman`, or a file whose first tree is the reference.
        #[arg(long = "ref", default_value = "kingman")]
        reference: String,
        #[arg(long, default_value = "d2")]
        metric: Metric,
        #[command(flatten)]
        source: Source,
    },
    /// Draw a corpus from a model.
    Sample {
        /// `yule`, `bf:<beta>` or `coalescent:<constant|exponential|logistic|N>`.
        #[arg(long)]
        model: Model,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Code)]
        format: Format,
    },
    /// List every ranked tree shape with `n` leaves.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
        #[arg(long, value_enum, default_value_t = Format::Code)]
        format: Format,
    },
    /// Kingman mean (and optionally variance) of the F-matrix entries.
    Moments {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        variance: bool,
    },
    /// Classical MDS coordinates of a distance matrix CSV.
    Mds {
        #[arg(long, default_value_t = 2)]
        k: usize,
        file: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Shape,
    Genealogy,
    Hetero,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Code,
    Fmatrix,
    Newick,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Exact,
    Sa,
}

#[derive(Clone, Debug)]
enum Model {
    BetaSplit(BetaSplit),
    Coalescent(PopSize),
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown model '{s}' (use yule, bf:<beta> or coalescent:<pop>)"));
        match s.split_once(':') {
            None if s == "yule" => Ok(Model::BetaSplit(BetaSplit::YULE)),
            Some(("bf", beta)) => match beta {
                "inf" => Ok(Model::BetaSplit(BetaSplit::infinite())),
                b => Ok(Model::BetaSplit(BetaSplit::new(b.parse().map_err(|_| bad())?)?)),
            },
            Some(("coalescent", pop)) => match pop.parse::<f64>() {
                Ok(size) if size > 0.0 => Ok(Model::Coalescent(PopSize::Constant(size))),
                Ok(_) => Err(bad()),
                Err(_) => Ok(Model::Coalescent(PopSize::builtin(pop)?)),
            },
            _ => Err(bad()),
        }
    }
}

impl Model {
    /// Splitting model of the ranked shape.
    fn beta(&self) -> BetaSplit {
        match self {
            Model::BetaSplit(b) => *b,
            Model::Coalescent(_) => BetaSplit::YULE,
        }
    }
}

#[derive(Args)]
struct Input {
    /// Tree files: Newick, code lines, F-matrix blocks or t:/sigma: blocks.
    files: Vec<PathBuf>,
    /// Node heights closer than this fraction of the tree height are tied.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    /// Separator before a YYYY-MM-DD tip date.
    #[arg(long, default_value_t = '|')]
    date_delimiter: char,
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

impl Input {
    fn options(&self) -> RankOptions {
        RankOptions { tolerance: self.tolerance, date_delimiter: self.date_delimiter }
    }

    fn read(&self) -> Result<TreeSet> {
        if self.files.is_empty() {
            return Err(Error::InvalidParameter("no input files".into()));
        }
        let mut sets = Vec::new();
        for path in &self.files {
            let text = read_file(path)?;
            let set = parse_trees(&text, &self.options()).map_err(|e| match e {
                Error::Format { line, message } => Error::Format { line, message: format!("{}: {message}", path.display()) },
                e => e,
            })?;
            sets.push(set);
        }
        if sets.len() == 1 {
            return Ok(sets.pop().unwrap());
        }
        if sets.iter().all(|s| matches!(s, TreeSet::Shapes(_))) {
            return Ok(TreeSet::Shapes(sets.iter().map(|s| s.shapes()).collect::<Result<Vec<_>>>()?.concat()));
        }
        if sets.iter().any(|s| matches!(s, TreeSet::Shapes(_))) {
            return Err(Error::Heterogeneous("input mixes shapes with timed trees".into()));
        }
        if sets.iter().all(|s| matches!(s, TreeSet::Genealogies(_))) {
            return Ok(TreeSet::Genealogies(sets.iter().map(|s| s.genealogies()).collect::<Result<Vec<_>>>()?.concat()));
        }
        Ok(TreeSet::Hetero(sets.iter().map(|s| s.hetero()).collect::<Result<Vec<_>>>()?.concat()))
    }
}

#[derive(Args)]
struct Source {
    #[command(flatten)]
    input: Input,
    /// Use the exact distribution of this model (with --n) instead of files.
    #[arg(long, requires = "n", conflicts_with = "files")]
    model: Option<Model>,
    #[arg(long)]
    n: Option<usize>,
    /// Largest `n` for exhaustive enumeration.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: usize,
}

/// A distribution on ranked shapes with distinct support points.
struct Distribution {
    support: Vec<FMatrix>,
    weights: Vec<f64>,
}

impl Distribution {
    fn empirical(sample: &[FMatrix]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut counts: BTreeMap<&FMatrix, usize> = BTreeMap::new();
        for f in sample {
            *counts.entry(f).or_default() += 1;
        }
        let m = sample.len() as f64;
        let (support, weights) = counts.into_iter().map(|(f, c)| (f.clone(), c as f64 / m)).unzip();
        Ok(Self { support, weights })
    }

    fn model(model: &Model, n: usize, cap: usize) -> Result<Self> {
        let support = enumerate_shapes_capped(n, cap)?;
        let beta = model.beta();
        let mut weights: Vec<f64> = support.iter().map(|f| blum_francois_pmf(&f.to_code(), beta)).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Self { support, weights })
    }

    fn objective(&self, metric: Metric) -> Result<Objective> {
        Ok(match metric {
            Metric::L2 => Objective::L2(TargetMatrix::from_weighted(&self.support, &self.weights)?),
            Metric::L1 => Objective::l1_weighted(self.support.clone(), self.weights.clone())?,
        })
    }
}

impl Source {
    fn distribution(&self) -> Result<Distribution> {
        match &self.model {
            Some(model) => Distribution::model(model, self.n.unwrap(), self.cap),
            None => Distribution::empirical(&self.input.read()?.shapes()?),
        }
    }
}

#[derive(Args)]
struct Search {
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    method: Method,
    /// Master seed for annealing (required with --method sa).
    #[arg(long)]
    seed: Option<u64>,
    /// Cooling schedule `kind:R0:alpha` with kind exp, lin or log.
    #[arg(long, default_value = "exp:1000:0.9995")]
    schedule: CoolingSchedule,
    #[arg(long, default_value_t = 50_000)]
    iters: usize,
    #[arg(long, default_value_t = 4)]
    chains: usize,
    /// Write the annealing trace of the winning chain to this CSV file.
    #[arg(long)]
    trace: Option<PathBuf>,
}

impl Search {
    fn config(&self, parallel: bool) -> Result<SaConfig> {
        let seed = self.seed.ok_or_else(|| Error::InvalidParameter("--seed is required with --method sa".into()))?;
        Ok(SaConfig {
            schedule: self.schedule,
            iterations: self.iters,
            chains: self.chains,
            seed,
            parallel,
            trace: self.trace.is_some(),
        })
    }

    fn method(&self, cap: usize, parallel: bool) -> Result<SearchMethod> {
        if self.trace.is_some() {
            return Err(Error::InvalidParameter("--trace is only available for shape means".into()));
        }
        Ok(match self.method {
            Method::Exact => SearchMethod::Exact { cap },
            Method::Sa => SearchMethod::Anneal(self.config(parallel)?),
        })
    }
}

struct ShapeMean {
    mean: FMatrix,
    energy: f64,
    ties: usize,
}

fn shape_mean(objective: &Objective, search: &Search, cap: usize, parallel: bool) -> Result<ShapeMean> {
    match search.method {
        Method::Exact => {
            if search.trace.is_some() {
                return Err(Error::InvalidParameter("--trace needs --method sa".into()));
            }
            let m = frechet_mean_exact(objective, cap, parallel)?;
            Ok(ShapeMean { mean: m.first().clone(), energy: m.energy, ties: m.means.len() })
        }
        Method::Sa => {
            let r = frechet_mean_sa(objective, None, &search.config(parallel)?)?;
            if let Some(path) = &search.trace {
                r.write_trace_csv(create(path)?)?;
            }
            Ok(ShapeMean { mean: r.best.to_fmatrix(), energy: r.best_energy, ties: 1 })
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn first_tree(path: &Path, opts: &RankOptions) -> Result<FMatrix> {
    let set = parse_trees(&read_file(path)?, opts)?;
    Ok(set.shapes()?.swap_remove(0))
}

fn tree_ids(m: usize) -> Vec<String> {
    (1..=m).map(|k| format!("tree{k}")).collect()
}

fn emit(out: &mut impl Write, text: impl AsRef<str>) -> Result<()> {
    out.write_all(text.as_ref().as_bytes()).map_err(|e| Error::Io(e.to_string()))
}

fn distance_matrix(set: &TreeSet, mode: Mode, metric: Metric, parallel: bool) -> Result<DistanceMatrix> {
    match mode {
        Mode::Shape => pairwise_distance_matrix(&set.shapes()?, parallel, |a, b| d_shape(a, b, metric)),
        Mode::Genealogy => {
            pairwise_distance_matrix(&set.genealogies()?, parallel, |a, b| d_genealogy(a, b, metric))
        }
        Mode::Hetero => {
            let aligned = align_heterochronous(&set.hetero()?)?;
            pairwise_distance_matrix(&aligned, parallel, |a, b| d_aligned(a, b, metric))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let parallel = !cli.sequential;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.command {
        Command::Distance { metric, mode, input } => {
            let set = input.read()?;
            let d = distance_matrix(&set, mode, metric, parallel)?;
            if d.size() == 2 {
                emit(&mut out, format!("{}\n", d.get(0, 1)))?;
            } else {
                d.write_csv(&tree_ids(d.size()), &mut out)?;
            }
        }
        Command::Mean { metric, times, search, source } => {
            let timed = match source.model {
                Some(_) => None,
                None => match source.input.read()? {
                    TreeSet::Shapes(_) => None,
                    set => Some(set),
                },
            };
            match timed {
                None => {
                    let dist = source.distribution()?;
                    let m = shape_mean(&dist.objective(metric)?, &search, source.cap, parallel)?;
                    let code = m.mean.to_code();
                    emit(&mut out, format!("code: {}\nenergy: {}\nties: {}\n", write_code(&code), m.energy, m.ties))?;
                    emit(&mut out, write_fmatrix(&m.mean))?;
                    emit(&mut out, format!("newick: {}\n", shape_to_tree(&code).to_newick()))?;
                }
                Some(set) => {
                    if metric != Metric::L2 {
                        return Err(Error::InvalidParameter("means of timed trees are defined under d2".into()));
                    }
                    let method = search.method(source.cap, parallel)?;
                    if let TreeSet::Genealogies(sample) = &set {
                        let g = frechet_mean_genealogy(sample, times, &method)?;
                        emit(&mut out, format!("code: {}\n", write_genealogy(&g)))?;
                        emit(&mut out, write_fmatrix(g.fmatrix()))?;
                        emit(&mut out, format!("newick: {}\n", genealogy_to_tree(&g).to_newick()))?;
                    } else {
                        let g = frechet_mean_hetero(&set.hetero()?, times, &method)?;
                        emit(&mut out, write_hetero(g.code(), Some(g.times())))?;
                        emit(&mut out, format!("newick: {}\n", hetero_to_tree(&g).to_newick()))?;
                    }
                }
            }
        }
        Command::Variance { metric, search, source } => {
            let dist = source.distribution()?;
            let m = shape_mean(&dist.objective(metric)?, &search, source.cap, parallel)?;
            let v = frechet_variance(&dist.support, Some(&dist.weights), &m.mean, metric)?;
            emit(&mut out, format!("variance: {v}\nmean: {}\n", write_code(&m.mean.to_code())))?;
        }
        Command::Medoid { metric, mode, input } => {
            let set = input.read()?;
            let d = distance_matrix(&set, mode, metric, parallel)?;
            let idx: Vec<usize> = (0..d.size()).collect();
            let (k, sum) = medoid_by(&idx, parallel, |&a, &b| Ok(d.get(a, b) * d.get(a, b)))?;
            let tree = match &set {
                TreeSet::Shapes(v) => write_code(&v[k].to_code()),
                TreeSet::Genealogies(v) => write_genealogy(&v[k]),
                TreeSet::Hetero(v) => write_hetero(v[k].code(), Some(v[k].times())).trim_end().replace('\n', "; "),
            };
            emit(&mut out, format!("index: {}\nsum: {sum}\ntree: {tree}\n", k + 1))?;
        }
        Command::Entropy { source } => {
            let dist = source.distribution()?;
            emit(&mut out, format!("{}\n", entropy(&dist.weights)?))?;
        }
        Command::Ball { level, metric, center, search, source } => {
            let dist = source.distribution()?;
            let center = match &center {
                Some(path) => first_tree(path, &source.input.options())?,
                None => shape_mean(&dist.objective(metric)?, &search, source.cap, parallel)?.mean,
            };
            let ball = credible_ball(&dist.support, Some(&dist.weights), &center, level, metric)?;
            emit(
                &mut out,
                format!(
                    "center: {}\nradius: {}\nmass: {}\nmembers: {}\n",
                    write_code(&center.to_code()),
                    ball.radius,
                    ball.mass,
                    ball.members.len()
                ),
            )?;
            for &b in &ball.boundary {
                let key = SignedKey::new(&dist.support[b], &center, metric)?;
                emit(&mut out, format!("boundary: {}\t{}\n", write_code(&dist.support[b].to_code()), key.value()))?;
            }
        }
        Command::Order { reference, metric, source } => {
            let dist = source.distribution()?;
            let n = dist.support[0].leaves();
            let reference = if reference == "kingman" {
                kingman_reference(n, parallel)?
            } else {
                first_tree(Path::new(&reference), &source.input.options())?
            };
            let order = sort_by_total_order(&dist.support, &reference, metric)?;
            let mut w = csv::Writer::from_writer(&mut out);
            let io = |e: csv::Error| Error::Io(e.to_string());
            w.write_record(["rank", "code", "frequency", "signed_distance"]).map_err(io)?;
            for (rank, &i) in order.iter().enumerate() {
                let key = SignedKey::new(&dist.support[i], &reference, metric)?;
                w.write_record([
                    (rank + 1).to_string(),
                    write_code(&dist.support[i].to_code()),
                    dist.weights[i].to_string(),
                    key.value().to_string(),
                ])
                .map_err(io)?;
            }
            w.flush().map_err(|e| Error::Io(e.to_string()))?;
        }
        Command::Sample { model, n, m, seed, format } => {
            if n < 2 {
                return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..m {
                let line = match &model {
                    Model::BetaSplit(beta) => {
                        let code = sample_blum_francois(n, *beta, &mut rng);
                        match format {
                            Format::Code => write_code(&code),
                            Format::Fmatrix => write_fmatrix(&code.to_fmatrix()).trim_end().to_string(),
                            Format::Newick => shape_to_tree(&code).to_newick(),
                        }
                    }
                    Model::Coalescent(pop) => {
                        let g = sample_coalescent_genealogy(n, pop, &mut rng)?;
                        match format {
                            Format::Code => write_genealogy(&g),
                            Format::Fmatrix => write_fmatrix(g.fmatrix()).trim_end().to_string(),
                            Format::Newick => genealogy_to_tree(&g).to_newick(),
                        }
                    }
                };
                emit(&mut out, format!("{line}\n"))?;
            }
        }
        Command::Enumerate { n, cap, format } => {
            for f in enumerate_shapes_capped(n, cap)? {
                let code = f.to_code();
                let text = match format {
                    Format::Code => format!("{}\n", write_code(&code)),
                    Format::Fmatrix => write_fmatrix(&f),
                    Format::Newick => format!("{}\n", shape_to_tree(&code).to_newick()),
                };
                emit(&mut out, text)?;
            }
        }
        Command::Moments { n, variance } => {
            let k = KingmanMoments::new(n)?;
            emit(&mut out, "# mean\n")?;
            emit(&mut out, write_real_matrix(n, k.mean_entries()))?;
            if variance {
                let var: Vec<f64> = (1..n).flat_map(|i| (1..=i).map(move |j| (i, j))).map(|(i, j)| k.var(i, j)).collect();
                emit(&mut out, "# variance\n")?;
                emit(&mut out, write_real_matrix(n, &var))?;
            }
        }
        Command::Mds { k, file } => {
            let f = File::open(&file).map_err(|e| Error::Io(format!("{}: {e}", file.display())))?;
            let (ids, d) = DistanceMatrix::read_csv(f)?;
            let e = classical_mds(&d, k)?;
            e.write_csv(&ids, &mut out)?;
            eprintln!("explained: {}", e.explained);
        }
    }
    out.flush().map_err(|e| Error::Io(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match panic::catch_unwind(panic::AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Numerical(_)) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
        Err(_) => ExitCode::from(2),
    }
}
