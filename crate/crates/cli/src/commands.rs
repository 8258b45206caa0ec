use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use log::info;
use phonetic_mt::augment::{noise_augment, perturb_corpus, NoiseSpec, PerturbationSpec, Rounding};
use phonetic_mt::clustering::{
    derive_size_distribution, format_cluster_model, group_by_code, kmeans_fit, random_cluster, random_cluster_uniform,
    read_assignment, read_cluster_model, write_assignment, write_centroids,
};
use phonetic_mt::codecs::{encode_or_pass, phonetic_by_name, CodeTable, Codec, Granularity, TableCodec, TableKind};
use phonetic_mt::corpus::{format_corpus, parse_corpus, tokenize, vocabulary, Sentence};
use phonetic_mt::evaluate::{bleu_multi, BleuOptions, VocabReport};
use phonetic_mt::geometry::{
    concentration_factor, coverage_curve, density_profile, load_embeddings, mean_coverage_curve, pca_project,
    smooth_hull, train_embeddings, volume_cdf, CdfReport, CoverageReport, DensityParams, EmbeddingParams,
    GeometryError, Grouping, HullParams, Point, Report,
};
use phonetic_mt::pipeline::{run_pipeline, EncoderConfig, PipelineConfig};
use phonetic_mt::subword::{bpe_apply_corpus, bpe_decode, bpe_learn, BpeModel};

use crate::args::*;
use crate::failure::Failure;

/// Settings shared by every command.
pub struct Context {
    pub seed: Option<SeedArg>,
    pub format: Format,
}

impl Context {
    /// The seed of a randomized command. `auto` draws one and reports it.
    fn seed(&self, command: &str) -> Result<u64, Failure> {
        match self.seed {
            Some(SeedArg::Fixed(n)) => Ok(n),
            Some(SeedArg::Auto) => {
                let n = auto_seed();
                eprintln!("seed: {n}");
                Ok(n)
            }
            None => Err(Failure::Usage(format!(
                "`{command}` is randomized: pass --seed N, or --seed auto to draw one"
            ))),
        }
    }
}

fn auto_seed() -> u64 {
    use std::hash::BuildHasher;
    let now = std::time::SystemTime::now();
    std::collections::hash_map::RandomState::new().hash_one((now, std::process::id()))
}

fn read_input(path: Option<&Path>) -> Result<String, Failure> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| Failure::data(format!("{}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(Failure::data)?;
            Ok(s)
        }
    }
}

fn read_corpus_arg(path: Option<&Path>) -> Result<Vec<Sentence>, Failure> {
    Ok(parse_corpus(&read_input(path)?))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::data(format!("{}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(Failure::data)
        }
    }
}

fn render<R: Report>(ctx: &Context, report: &R, text: impl FnOnce() -> String) -> String {
    match ctx.format {
        Format::Text => text(),
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    }
}

pub fn run(command: Command, ctx: &Context) -> Result<(), Failure> {
    match command {
        Command::Encode(a) => encode(a),
        Command::Cluster(a) => cluster(a, ctx),
        Command::Bpe(c) => bpe(c),
        Command::Pipeline(c) => pipeline(c, ctx),
        Command::Geometry(c) => geometry(c, ctx),
        Command::Augment(c) => augment(c, ctx),
        Command::Eval(c) => eval(c, ctx),
    }
}

fn table_codec(path: Option<&Path>, kind: TableKind, letters: bool) -> Result<TableCodec, Failure> {
    let path = path.ok_or_else(|| Failure::Usage("pinyin and wubi need --table".into()))?;
    let table = CodeTable::load(path, kind).map_err(Failure::data)?;
    let granularity = if letters {
        Granularity::Letters
    } else {
        Granularity::PerCharacter
    };
    Ok(TableCodec::new(Arc::new(table), granularity))
}

fn phonetic(name: &str) -> Result<phonetic_mt::codecs::Phonetic, Failure> {
    phonetic_by_name(name).map_err(|e| Failure::Usage(e.to_string()))
}

fn encode(a: EncodeArgs) -> Result<(), Failure> {
    let codec: Box<dyn Codec> = match a.codec.as_str() {
        "pinyin" => Box::new(table_codec(a.table.as_deref(), TableKind::Pinyin, a.letters)?),
        "wubi" => Box::new(table_codec(a.table.as_deref(), TableKind::Wubi, a.letters)?),
        "cluster" => {
            let path = a
                .clusters
                .ok_or_else(|| Failure::Usage("the cluster codec needs --clusters".into()))?;
            Box::new(read_cluster_model(path).map_err(Failure::data)?)
        }
        name => Box::new(phonetic(name)?),
    };
    let reader: Box<dyn BufRead> = match &a.io.input {
        Some(p) => Box::new(io::BufReader::new(
            fs::File::open(p).map_err(|e| Failure::data(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdin().lock()),
    };
    let sink: Box<dyn Write> = match &a.io.output {
        Some(p) => Box::new(fs::File::create(p).map_err(|e| Failure::data(format!("{}: {e}", p.display())))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut out = BufWriter::new(sink);
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Failure::data(format!("line {}: {e}", idx + 1)))?;
        let mut codes = Vec::new();
        for tok in tokenize(&line) {
            let (c, _) =
                encode_or_pass(codec.as_ref(), &tok).map_err(|e| Failure::data(format!("line {}: {e}", idx + 1)))?;
            codes.extend(c);
        }
        writeln!(out, "{}", codes.join(" ")).map_err(Failure::data)?;
    }
    out.flush().map_err(Failure::data)
}

fn units_arg(corpus: Option<&Path>, units: Option<&Path>) -> Result<Vec<String>, Failure> {
    match (corpus, units) {
        (_, Some(u)) => {
            let text = read_input(Some(u))?;
            let mut list: Vec<String> = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(String::from)
                .collect();
            list.sort();
            list.dedup();
            Ok(list)
        }
        (Some(c), None) => Ok(vocabulary(&read_corpus_arg(Some(c))?)),
        (None, None) => Err(Failure::Usage("give --corpus or --units".into())),
    }
}

fn cluster(a: ClusterArgs, ctx: &Context) -> Result<(), Failure> {
    let seed = ctx.seed("cluster")?;
    match a.method {
        ClusterMethod::Random | ClusterMethod::Uniform => {
            let units = units_arg(a.corpus.as_deref(), a.units.as_deref())?;
            let model = if a.method == ClusterMethod::Random {
                let dist = derive_size_distribution(&units, &phonetic(&a.baseline)?).map_err(Failure::data)?;
                random_cluster(&units, &dist, seed).map_err(Failure::data)?
            } else {
                let f = a
                    .fraction
                    .ok_or_else(|| Failure::Usage("--method uniform needs --fraction".into()))?;
                random_cluster_uniform(&units, f, seed).map_err(|e| Failure::Usage(e.to_string()))?
            };
            info!("{} units in {} clusters", model.num_units(), model.num_clusters());
            emit(a.output.as_deref(), &format_cluster_model(&model))
        }
        ClusterMethod::Kmeans => {
            let path = a
                .vectors
                .ok_or_else(|| Failure::Usage("--method kmeans needs --vectors".into()))?;
            let table = load_embeddings(&path).map_err(Failure::data)?;
            let k = match a.k {
                Some(k) => k,
                None => group_by_code(table.units(), &phonetic(&a.baseline)?)
                    .map_err(Failure::data)?
                    .len(),
            };
            let points: Vec<Vec<f64>> = table.iter().map(|(_, v)| v.to_vec()).collect();
            let model = kmeans_fit(&points, k, seed, a.max_iter).map_err(Failure::data)?;
            info!("k {k}, {} iterations, cost {}", model.iterations, model.cost());
            if let Some(c) = &a.centroids {
                write_centroids(c, &model).map_err(Failure::data)?;
            }
            match &a.output {
                Some(p) => write_assignment(p, table.units(), &model.assignment).map_err(Failure::data),
                None => {
                    let lines: String = table
                        .units()
                        .iter()
                        .zip(&model.assignment)
                        .map(|(u, k)| format!("{u}\tG{}\n", k + 1))
                        .collect();
                    emit(None, &lines)
                }
            }
        }
    }
}

fn load_merges(path: &Path, marker: &str) -> Result<BpeModel, Failure> {
    BpeModel::load(path)
        .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?
        .with_continuation(marker)
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn bpe(c: BpeCommand) -> Result<(), Failure> {
    match c {
        BpeCommand::Learn { operations, io } => {
            let corpus = read_corpus_arg(io.input.as_deref())?;
            let model = bpe_learn(&corpus, operations).map_err(Failure::data)?;
            info!("{} merges learned", model.merges().len());
            emit(io.output.as_deref(), &model.to_merge_file())
        }
        BpeCommand::Apply { merges, marker, io } => {
            let model = load_merges(&merges, &marker)?;
            let corpus = read_corpus_arg(io.input.as_deref())?;
            emit(io.output.as_deref(), &format_corpus(&bpe_apply_corpus(&corpus, &model)))
        }
        BpeCommand::Decode { merges, marker, io } => {
            let model = load_merges(&merges, &marker)?;
            let corpus = read_corpus_arg(io.input.as_deref())?;
            let mut words = Vec::with_capacity(corpus.len());
            for (i, s) in corpus.iter().enumerate() {
                words.push(bpe_decode(s, &model).map_err(|e| Failure::data(format!("line {}: {e}", i + 1)))?);
            }
            emit(io.output.as_deref(), &format_corpus(&words))
        }
    }
}

fn pipeline(c: PipelineCommand, ctx: &Context) -> Result<(), Failure> {
    let PipelineCommand::Run { from, out } = c;
    let mut config = PipelineConfig::load(&from).map_err(|e| Failure::data(format!("{}: {e}", from.display())))?;
    // Paths in a config are relative to the config file.
    let base = from.parent().map(Path::to_path_buf).unwrap_or_default();
    for path in config.splits.values_mut() {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
    if let EncoderConfig::Table { table, .. } = &mut config.encoder {
        if table.is_relative() {
            *table = base.join(&*table);
        }
    }
    if let EncoderConfig::RandomCluster { seed, .. } | EncoderConfig::UniformCluster { seed, .. } = &mut config.encoder
    {
        if ctx.seed.is_some() {
            *seed = ctx.seed("pipeline run")?;
        }
    }
    config.output_dir = out;
    let run = run_pipeline(&config).map_err(Failure::data)?;
    info!("artifacts in {}", run.dir.display());
    let text = match ctx.format {
        Format::Csv => run.vocab.to_csv(),
        Format::Json => serde_json::to_string_pretty(&run.vocab).map_err(Failure::internal)? + "\n",
        Format::Text => run
            .vocab
            .streams
            .iter()
            .map(|(name, s)| format!("{name}\t{}\t{}\n", s.unique, s.total))
            .collect(),
    };
    emit(None, &text)
}

fn read_points(path: &Path) -> Result<BTreeMap<String, Point>, Failure> {
    let text = read_input(Some(path))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        let bad = || Failure::data(format!("{}: line {}: expected unit<TAB>x<TAB>y", path.display(), i + 1));
        if f.len() != 3 {
            return Err(bad());
        }
        let x: f64 = f[1].trim().parse().map_err(|_| bad())?;
        let y: f64 = f[2].trim().parse().map_err(|_| bad())?;
        if !(x.is_finite() && y.is_finite()) {
            return Err(bad());
        }
        out.insert(f[0].to_string(), [x, y]);
    }
    Ok(out)
}

fn grouping(a: &GroupArgs) -> Result<(BTreeMap<String, Point>, Grouping, String), Failure> {
    let points = read_points(&a.points)?;
    let (pairs, label): (Vec<(String, String)>, String) = match (&a.groups, &a.codec) {
        (Some(g), _) => (
            read_assignment(g).map_err(|e| Failure::data(format!("{}: {e}", g.display())))?,
            g.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
        ),
        (None, Some(name)) => {
            let codec = phonetic(name)?;
            let mut pairs = Vec::with_capacity(points.len());
            for unit in points.keys() {
                let (codes, _) = encode_or_pass(&codec, unit).map_err(Failure::data)?;
                pairs.push((unit.clone(), codes.join(" ")));
            }
            (pairs, name.clone())
        }
        (None, None) => return Err(Failure::Usage("give --groups or --codec".into())),
    };
    let g = phonetic_mt::geometry::group_points(&points, pairs.iter().map(|(u, k)| (u.as_str(), k)));
    if g.is_empty() {
        return Err(Failure::data("no grouped unit has a point"));
    }
    Ok((points, g, label))
}

fn hull_params(h: &HullArgs) -> Result<HullParams, Failure> {
    match (h.beta, h.radius) {
        (Some(b), Some(r)) => HullParams::new(b, r).map_err(|e| Failure::Usage(e.to_string())),
        _ => Ok(HullParams::unsmoothed()),
    }
}

fn geo(e: GeometryError) -> Failure {
    Failure::data(e)
}

fn geometry(c: GeometryCommand, ctx: &Context) -> Result<(), Failure> {
    match c {
        GeometryCommand::Embed { dim, window, io } => {
            let seed = ctx.seed("geometry embed")?;
            let corpus = read_corpus_arg(io.input.as_deref())?;
            let table = train_embeddings(&corpus, &EmbeddingParams::new(dim, window, seed)).map_err(geo)?;
            emit(io.output.as_deref(), &table.to_text())
        }
        GeometryCommand::Project { vectors, output } => {
            let table = load_embeddings(&vectors).map_err(geo)?;
            let (_, coords) = pca_project(&table).map_err(geo)?;
            let text: String = table
                .units()
                .iter()
                .map(|u| {
                    let p = coords[u];
                    format!("{u}\t{}\t{}\n", p[0], p[1])
                })
                .collect();
            emit(output.as_deref(), &text)
        }
        GeometryCommand::Gamma { groups } => {
            let (_, g, _) = grouping(&groups)?;
            let report = concentration_factor(&g.groups).map_err(geo)?;
            emit(None, &render(ctx, &report, || format!("{}\n", report.gamma)))
        }
        GeometryCommand::Density {
            groups,
            hull,
            neighbors,
            budget,
            threshold,
        } => {
            let seed = ctx.seed("geometry density")?;
            let (points, g, _) = grouping(&groups)?;
            let mut params = DensityParams::new(hull_params(&hull)?, seed);
            params.budget = budget;
            params.threshold = threshold;
            let all: Vec<Point> = points.values().copied().collect();
            let report = density_profile(&all, &g.groups, &neighbors, &params).map_err(geo)?;
            emit(
                None,
                &render(ctx, &report, || {
                    let mut s = String::from("neighbor\tmax\tsum\tmean\n");
                    for r in &report.rows {
                        s += &format!(
                            "{}\t{}\t{}\t{}\n",
                            r.neighbor, r.max_density, r.sum_density, r.mean_density
                        );
                    }
                    s
                }),
            )
        }
        GeometryCommand::Cdf { groups, hull } => {
            let (_, g, label) = grouping(&groups)?;
            let cdf = volume_cdf(&g.groups, &hull_params(&hull)?).map_err(geo)?;
            let report = CdfReport::new(label, &cdf);
            emit(
                None,
                &render(ctx, &report, || {
                    report.points.iter().map(|(v, f)| format!("{v}\t{f}\n")).collect()
                }),
            )
        }
        GeometryCommand::Coverage { groups, hull, orders } => {
            let seed = ctx.seed("geometry coverage")?;
            let (_, g, label) = grouping(&groups)?;
            let params = hull_params(&hull)?;
            let curve = match orders {
                0 => return Err(Failure::Usage("--orders must be at least 1".into())),
                1 => coverage_curve(&g.groups, seed, &params),
                n => mean_coverage_curve(&g.groups, seed, n, &params),
            }
            .map_err(geo)?;
            let union: Vec<Point> = g.groups.iter().flatten().copied().collect();
            let total = smooth_hull(&union, &params).map_or(0.0, |h| h.volume);
            let report = CoverageReport::new(label, seed, total, curve);
            emit(
                None,
                &render(ctx, &report, || {
                    report.curve.iter().map(|(t, v)| format!("{t}\t{v}\n")).collect()
                }),
            )
        }
    }
}

fn augment(c: AugmentCommand, ctx: &Context) -> Result<(), Failure> {
    match c {
        AugmentCommand::Noise {
            vectors,
            fraction,
            top_n,
            rounding,
            manifest,
            io,
        } => {
            let seed = ctx.seed("augment noise")?;
            let rounding = match rounding {
                RoundingArg::Stochastic => Rounding::Stochastic,
                RoundingArg::Ceil => Rounding::Ceil,
            };
            let spec = NoiseSpec::new(fraction, seed)
                .and_then(|s| s.with_top_n(top_n))
                .map_err(|e| Failure::Usage(e.to_string()))?
                .with_rounding(rounding);
            let table = load_embeddings(&vectors).map_err(geo)?;
            let corpus = read_corpus_arg(io.input.as_deref())?;
            let out = noise_augment(&corpus, &table, &spec).map_err(Failure::data)?;
            info!(
                "replaced {} of {} tokens (rate {:.4})",
                out.stats.replaced_tokens, out.stats.tokens, out.stats.realized_rate
            );
            if let Some(m) = &manifest {
                out.write_manifest(m, &spec).map_err(Failure::data)?;
            }
            emit(io.output.as_deref(), &format_corpus(&out.corpus))
        }
        AugmentCommand::Perturb { k, vocab, weights, io } => {
            let seed = ctx.seed("augment perturb")?;
            let mut spec = PerturbationSpec::new(k, seed);
            if let Some(w) = weights {
                let total: f64 = w.iter().sum();
                if total.is_nan() || total <= 0.0 || w.iter().any(|x| x.is_nan() || *x < 0.0) {
                    return Err(Failure::Usage(
                        "--weights must be non-negative with a positive sum".into(),
                    ));
                }
                spec = spec
                    .with_weights([w[0] / total, w[1] / total, w[2] / total])
                    .map_err(|e| Failure::Usage(e.to_string()))?;
            }
            let corpus = read_corpus_arg(io.input.as_deref())?;
            let words = match &vocab {
                Some(p) => read_input(Some(p))?.split_whitespace().map(String::from).collect(),
                None => vocabulary(&corpus),
            };
            let out = perturb_corpus(&corpus, &words, &spec).map_err(Failure::data)?;
            let lines: Vec<Sentence> = out.into_iter().map(|p| p.tokens).collect();
            emit(io.output.as_deref(), &format_corpus(&lines))
        }
    }
}

fn stream_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn eval(c: EvalCommand, ctx: &Context) -> Result<(), Failure> {
    match c {
        EvalCommand::Bleu { hyp, refs, smooth } => {
            let h = read_corpus_arg(Some(&hyp))?;
            let r: Vec<Vec<Sentence>> = refs
                .iter()
                .map(|p| read_corpus_arg(Some(p)))
                .collect::<Result<_, _>>()?;
            let views: Vec<&[Sentence]> = r.iter().map(Vec::as_slice).collect();
            let report = bleu_multi(&h, &views, BleuOptions { smooth }).map_err(Failure::data)?;
            let text = match ctx.format {
                Format::Text => format!("{report}\n"),
                Format::Json => serde_json::to_string_pretty(&report).map_err(Failure::internal)? + "\n",
                Format::Csv => {
                    let p = report.precisions;
                    format!(
                        "bleu,p1,p2,p3,p4,brevity_penalty,ratio,hyp_length,ref_length\n{},{},{},{},{},{},{},{},{}\n",
                        report.bleu,
                        p[0],
                        p[1],
                        p[2],
                        p[3],
                        report.brevity_penalty,
                        report.ratio,
                        report.hyp_length,
                        report.ref_length
                    )
                }
            };
            emit(None, &text)
        }
        EvalCommand::Vocab { input } => {
            let mut report = VocabReport::new();
            for p in &input {
                report.add(stream_name(p), &read_corpus_arg(Some(p))?);
            }
            let text = match ctx.format {
                Format::Csv => report.to_csv(),
                Format::Json => serde_json::to_string_pretty(&report).map_err(Failure::internal)? + "\n",
                Format::Text => report
                    .streams
                    .iter()
                    .map(|(n, s)| format!("{n}\t{}\t{}\n", s.unique, s.total))
                    .collect(),
            };
            emit(None, &text)
        }
    }
}
