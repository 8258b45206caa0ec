use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::json;
use sha2::{Digest, Sha256};

use super::{
    combine, encode_corpus, CombineMode, Combined, EncodedCorpus, EncoderConfig, PipelineConfig, PipelineError,
};
use crate::clustering::{derive_size_distribution, format_cluster_model, random_cluster, random_cluster_uniform};
use crate::codecs::{phonetic_by_name, CodeTable, Codec, Granularity, TableCodec, TableKind};
use crate::corpus::{format_corpus, tokenize, vocabulary, Sentence};
use crate::evaluate::VocabReport;
use crate::rng;
use crate::subword::{bpe_apply_corpus, bpe_learn, BpeModel};

const LAYOUT: [&str; 4] = ["inputs", "models", "streams", "reports"];

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub dir: PathBuf,
    pub manifest: serde_json::Value,
    /// Vocabulary statistics of the training split.
    pub vocab: VocabReport,
}

fn read_lines(path: &Path) -> Result<Vec<Sentence>, PipelineError> {
    let bytes = fs::read(path).map_err(|e| PipelineError::Stage {
        stage: "read",
        line: None,
        message: format!("{}: {e}", path.display()),
    })?;
    let mut out = Vec::new();
    if bytes.is_empty() {
        return Ok(out);
    }
    let body = bytes.strip_suffix(b"\n").unwrap_or(&bytes);
    for (i, raw) in body.split(|&b| b == b'\n').enumerate() {
        let line = std::str::from_utf8(raw).map_err(|e| PipelineError::Stage {
            stage: "read",
            line: Some(i + 1),
            message: format!("{}: {e}", path.display()),
        })?;
        out.push(tokenize(line));
    }
    Ok(out)
}

fn write(dir: &Path, rel: &str, contents: impl AsRef<[u8]>) -> Result<(), PipelineError> {
    fs::write(dir.join(rel), contents)?;
    Ok(())
}

/// SHA-256 of every file under `dir`, keyed by `/`-separated relative path.
pub fn hash_directory(dir: impl AsRef<Path>) -> Result<BTreeMap<String, String>, std::io::Error> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, String>) -> std::io::Result<()> {
        for entry in fs::read_dir(dir)? {
            let path = entry?.path();
            if path.is_dir() {
                walk(root, &path, out)?;
            } else {
                let rel = path.strip_prefix(root).expect("under root");
                let key = rel
                    .components()
                    .map(|c| c.as_os_str().to_string_lossy())
                    .collect::<Vec<_>>()
                    .join("/");
                out.insert(key, hex::encode(Sha256::digest(fs::read(&path)?)));
            }
        }
        Ok(())
    }
    let mut out = BTreeMap::new();
    walk(dir.as_ref(), dir.as_ref(), &mut out)?;
    Ok(out)
}

fn build_codec(
    config: &PipelineConfig,
    train: &[Sentence],
    dir: &Path,
) -> Result<(Box<dyn Codec>, serde_json::Value), PipelineError> {
    let stage = |e: &dyn std::fmt::Display| PipelineError::stage("encode", e);
    Ok(match &config.encoder {
        EncoderConfig::Phonetic { codec } => {
            let c = phonetic_by_name(codec).map_err(|e| stage(&e))?;
            (Box::new(c), json!({}))
        }
        EncoderConfig::Table {
            table,
            table_kind,
            letters,
        } => {
            let kind = match table_kind.as_str() {
                "pinyin" => TableKind::Pinyin,
                "wubi" => TableKind::Wubi,
                other => return Err(PipelineError::Config(format!("unknown table kind {other:?}"))),
            };
            fs::copy(table, dir.join("inputs/table.tsv"))?;
            let t = CodeTable::load(table, kind).map_err(|e| stage(&e))?;
            let gran = if *letters {
                Granularity::Letters
            } else {
                Granularity::PerCharacter
            };
            (Box::new(TableCodec::new(Arc::new(t), gran)), json!({}))
        }
        EncoderConfig::RandomCluster { baseline, seed } => {
            let base = phonetic_by_name(baseline).map_err(|e| stage(&e))?;
            let vocab = vocabulary(train);
            let dist = derive_size_distribution(&vocab, &base).map_err(|e| stage(&e))?;
            let model = random_cluster(&vocab, &dist, *seed).map_err(|e| stage(&e))?;
            write(dir, "models/clusters.tsv", format_cluster_model(&model))?;
            let info = json!({"cluster_seed": seed, "clusters": model.num_clusters()});
            (Box::new(model), info)
        }
        EncoderConfig::UniformCluster { fraction, seed } => {
            let vocab = vocabulary(train);
            let model = random_cluster_uniform(&vocab, *fraction, *seed).map_err(|e| stage(&e))?;
            write(dir, "models/clusters.tsv", format_cluster_model(&model))?;
            let info = json!({"cluster_seed": seed, "clusters": model.num_clusters()});
            (Box::new(model), info)
        }
    })
}

fn learn(stream: &[Sentence], operations: usize, dir: &Path, rel: &str) -> Result<BpeModel, PipelineError> {
    let model = if stream.iter().all(Vec::is_empty) {
        BpeModel::new(Vec::new(), operations)
    } else {
        bpe_learn(stream, operations).map_err(|e| PipelineError::stage("bpe", e))?
    };
    write(dir, rel, model.to_merge_file())?;
    Ok(model)
}

fn union_vocab(a: &[Sentence], b: &[Sentence]) -> usize {
    a.iter().chain(b).flatten().collect::<HashSet<_>>().len()
}

/// Runs every stage and writes the artifact directory `config.output_dir`.
/// Models are learned on the `train` split and applied unchanged to the
/// others. Identical configs and inputs give byte-identical directories.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineRun, PipelineError> {
    config.validate()?;
    let dir = config.output_dir.clone();
    fs::create_dir_all(&dir)?;
    for sub in LAYOUT {
        let p = dir.join(sub);
        if p.exists() {
            fs::remove_dir_all(&p)?;
        }
        fs::create_dir(&p)?;
    }
    let manifest_path = dir.join("manifest.json");
    if manifest_path.exists() {
        fs::remove_file(&manifest_path)?;
    }

    let mut splits: BTreeMap<&str, Vec<Sentence>> = BTreeMap::new();
    for (name, path) in &config.splits {
        let corpus = read_lines(path)?;
        fs::copy(path, dir.join(format!("inputs/{name}.txt")))?;
        splits.insert(name, corpus);
    }
    let train = &splits["train"];
    let (codec, encoder_info) = build_codec(config, train, &dir)?;

    let encoded: BTreeMap<&str, EncodedCorpus> = splits
        .iter()
        .map(|(&name, c)| (name, encode_corpus(c, codec.as_ref())))
        .collect();

    let uses_words = config.combine != CombineMode::CodesOnly;
    let code_model = learn(
        &encoded["train"].codes,
        config.code_bpe_operations,
        &dir,
        "models/codes.bpe",
    )?;
    let word_model = if uses_words {
        Some(learn(
            &encoded["train"].words,
            config.word_bpe_operations,
            &dir,
            "models/words.bpe",
        )?)
    } else {
        None
    };

    let separator = config.use_separator.then_some(config.separator.as_str());
    let mut stage_info = serde_json::Map::new();
    let mut vocab = VocabReport::new();
    for (&name, enc) in &encoded {
        write(&dir, &format!("streams/{name}.codes.txt"), format_corpus(&enc.codes))?;
        let codes_bpe = bpe_apply_corpus(&enc.codes, &code_model);
        write(
            &dir,
            &format!("streams/{name}.codes.bpe.txt"),
            format_corpus(&codes_bpe),
        )?;
        let words_bpe = match &word_model {
            Some(m) => {
                let w = bpe_apply_corpus(&enc.words, m);
                write(&dir, &format!("streams/{name}.words.bpe.txt"), format_corpus(&w))?;
                w
            }
            None => Vec::new(),
        };
        match combine(
            if uses_words { &words_bpe } else { &codes_bpe },
            &codes_bpe,
            config.combine,
            separator,
        )? {
            Combined::Single(lines) => write(&dir, &format!("streams/{name}.input.txt"), format_corpus(&lines))?,
            Combined::Paired(a, b) => {
                write(&dir, &format!("streams/{name}.input.words.txt"), format_corpus(&a))?;
                write(&dir, &format!("streams/{name}.input.codes.txt"), format_corpus(&b))?;
            }
        }
        stage_info.insert(
            name.to_string(),
            json!({
                "sentences": enc.words.len(),
                "token_aligned": enc.token_aligned,
                "passed_through": enc.passed_through,
                "failed": enc.failed,
            }),
        );
        if name == "train" {
            vocab.add("words", &enc.words);
            vocab.add("codes", &enc.codes);
            if uses_words {
                vocab.add("words_bpe", &words_bpe);
            }
            vocab.add("codes_bpe", &codes_bpe);
            if uses_words {
                let combined = union_vocab(&words_bpe, &codes_bpe);
                vocab.streams.push((
                    "combined".to_string(),
                    crate::evaluate::VocabStats {
                        unique: combined,
                        total: words_bpe.iter().chain(&codes_bpe).map(Vec::len).sum(),
                    },
                ));
            }
        }
    }
    if config.combine == CombineMode::MultiSource {
        let pairs: BTreeMap<&str, [String; 2]> = encoded
            .keys()
            .map(|&n| (n, [format!("{n}.input.words.txt"), format!("{n}.input.codes.txt")]))
            .collect();
        let doc = json!({"schema": "phonetic-mt/multi-source/v1", "sources": ["words", "codes"], "pairs": pairs});
        write(
            &dir,
            "streams/multi_source.json",
            serde_json::to_string_pretty(&doc).expect("json") + "\n",
        )?;
    }
    write(
        &dir,
        "reports/vocab.json",
        serde_json::to_string_pretty(&vocab).expect("json") + "\n",
    )?;
    write(&dir, "reports/vocab.csv", vocab.to_csv())?;

    let bpe_info = json!({
        "codes": {"requested": config.code_bpe_operations, "learned": code_model.merges().len()},
        "words": word_model.as_ref().map(|m| json!({"requested": config.word_bpe_operations, "learned": m.merges().len()})),
    });
    let manifest = json!({
        "schema": "phonetic-mt/pipeline-manifest/v1",
        "tool": {"name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION")},
        "rng": rng::RNG_NAME,
        "config": config,
        "encoder": {"name": codec.name(), "details": encoder_info},
        "encode": stage_info,
        "bpe": bpe_info,
        "files": hash_directory(&dir)?,
    });
    write(
        &dir,
        "manifest.json",
        serde_json::to_string_pretty(&manifest).expect("json") + "\n",
    )?;
    Ok(PipelineRun { dir, manifest, vocab })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(text: &str) -> (tempfile::TempDir, PathBuf) {
        let tmp = tempfile::tempdir().unwrap();
        let input = tmp.path().join("train.txt");
        fs::write(&input, text).unwrap();
        (tmp, input)
    }

    #[test]
    fn codes_only_zero_ops_is_character_segmented() {
        let (tmp, input) = setup("body but\nspeak 42\n");
        let mut c = PipelineConfig::new(
            &input,
            EncoderConfig::Phonetic {
                codec: "soundex".into(),
            },
            CombineMode::CodesOnly,
        );
        c.output_dir = tmp.path().join("out");
        let run = run_pipeline(&c).unwrap();
        let text = fs::read_to_string(run.dir.join("streams/train.input.txt")).unwrap();
        assert_eq!(text, "B@@ 3@@ 0@@ 0 B@@ 3@@ 0@@ 0\nS@@ 1@@ 2@@ 0 4@@ 2\n");
        assert!(!run.dir.join("streams/train.words.bpe.txt").exists());
    }

    #[test]
    fn rerun_is_byte_identical() {
        let (tmp, input) = setup("the cat sat\nthe dog sat on the mat\n\n3 cats\n");
        let mut c = PipelineConfig::new(
            &input,
            EncoderConfig::RandomCluster {
                baseline: "metaphone".into(),
                seed: 5,
            },
            CombineMode::Concat,
        );
        c.word_bpe_operations = 5;
        c.code_bpe_operations = 5;
        c.output_dir = tmp.path().join("a");
        run_pipeline(&c).unwrap();
        let first = hash_directory(&c.output_dir).unwrap();
        c.output_dir = tmp.path().join("b");
        run_pipeline(&c).unwrap();
        assert_eq!(first, hash_directory(&c.output_dir).unwrap());
        run_pipeline(&c).unwrap();
        assert_eq!(first, hash_directory(&c.output_dir).unwrap());
        let lines = fs::read_to_string(c.output_dir.join("streams/train.input.txt")).unwrap();
        assert_eq!(lines.lines().nth(2), Some("<sep>"));
    }

    #[test]
    fn config_reloads_from_manifest() {
        let (tmp, input) = setup("a b\n");
        let mut c = PipelineConfig::new(
            &input,
            EncoderConfig::Phonetic { codec: "nysiis".into() },
            CombineMode::MultiSource,
        );
        c.output_dir = tmp.path().join("o");
        run_pipeline(&c).unwrap();
        let mut again = PipelineConfig::load(c.output_dir.join("manifest.json")).unwrap();
        again.output_dir = c.output_dir.clone();
        assert_eq!(again, c);
        assert!(c.output_dir.join("streams/multi_source.json").exists());
    }

    #[test]
    fn invalid_utf8_reports_line() {
        let tmp = tempfile::tempdir().unwrap();
        let input = tmp.path().join("t.txt");
        fs::write(&input, b"ok\nbad \xff\n").unwrap();
        let mut c = PipelineConfig::new(
            &input,
            EncoderConfig::Phonetic {
                codec: "soundex".into(),
            },
            CombineMode::Concat,
        );
        c.output_dir = tmp.path().join("o");
        let err = run_pipeline(&c).unwrap_err();
        assert!(
            matches!(
                err,
                PipelineError::Stage {
                    stage: "read",
                    line: Some(2),
                    ..
                }
            ),
            "{err}"
        );
    }
}
