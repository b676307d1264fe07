//! Pipeline stages. Each reads its inputs, writes outputs atomically and
//! leaves a `.manifest.json` sidecar beside every output file.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use idiomforge_core::annotation::{agreement_report, merge, AnnotationRecord, Label};
use idiomforge_core::augment::{augment_dataset, Augmenter, TfidfMode, TfidfStats};
use idiomforge_core::corpus::ContextSentence;
use idiomforge_core::enrich::{
    enrich, AttachmentKind, ContextMode, EnrichConfig, InferenceCount, Knowledge, KnowledgeSources, LocalContext,
};
use idiomforge_core::lexicon::Lexicon;
use idiomforge_core::sts::{evaluate, CosineScorer, EvalDataset, EvalRecord, HashingEmbedder, Scorer, StsPair};
use idiomforge_core::tiering::{random_sample, sort_ranked, structural_filter, tier_size, FilterConfig, RankedEntry};
use idiomforge_core::triplet::{triplets_for_sentence, Triplet};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::backend::ProcessEmbedder;
use crate::config::Config;
use crate::error::{ForgeError, Result};
use crate::formats;
use crate::jsonl::{self, AtomicFile};
use crate::manifest::{write_manifest, PipelineManifest, TOOL_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Bronze,
    Silver,
    GoldMerge,
    Augment,
    Enrich,
    Evaluate,
    Stats,
    Sample,
}

impl Stage {
    pub const ALL: [Stage; 9] = [
        Stage::Ingest,
        Stage::Bronze,
        Stage::Silver,
        Stage::GoldMerge,
        Stage::Augment,
        Stage::Enrich,
        Stage::Evaluate,
        Stage::Stats,
        Stage::Sample,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Bronze => "bronze",
            Stage::Silver => "silver",
            Stage::GoldMerge => "gold-merge",
            Stage::Augment => "augment",
            Stage::Enrich => "enrich",
            Stage::Evaluate => "evaluate",
            Stage::Stats => "stats",
            Stage::Sample => "sample",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = ForgeError;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| ForgeError::Config(format!("unknown stage {s:?}")))
    }
}

pub const DEFAULT_SEED: u64 = 42;
const BRONZE_CHUNK: usize = 8192;

/// Resolved run settings shared by all stages.
struct Run<'a> {
    config: &'a Config,
    stage: Stage,
    out: PathBuf,
    seed: u64,
    hash: String,
    started: Instant,
}

impl<'a> Run<'a> {
    fn new(stage: Stage, config: &'a Config) -> Result<Self> {
        let out = config.path(&["out"]).unwrap_or_else(|| config.resolve("."));
        std::fs::create_dir_all(&out).map_err(|e| ForgeError::io(&out, e))?;
        Ok(Run {
            config,
            stage,
            out,
            seed: config.parse_or("seed", DEFAULT_SEED)?,
            hash: config.hash(),
            started: Instant::now(),
        })
    }

    fn out_file(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    /// `<section>.input` relative to the config, else `<section>.from`
    /// naming a file in the output directory, else `default` there.
    fn input(&self, section: &str, default: &str) -> Result<PathBuf> {
        let path = match self.config.path(&[&format!("{section}.input")]) {
            Some(p) => p,
            None => self.out_file(self.config.get(&format!("{section}.from")).unwrap_or(default)),
        };
        require_exists(&path)?;
        Ok(path)
    }

    fn required_input(&self, keys: &[&str]) -> Result<PathBuf> {
        let path = self.config.require_path(keys)?;
        require_exists(&path)?;
        Ok(path)
    }

    fn display(&self, path: &Path) -> String {
        path.strip_prefix(&self.out)
            .or_else(|_| path.strip_prefix(self.config.base_dir()))
            .unwrap_or(path)
            .display()
            .to_string()
    }

    fn manifest(&self, inputs: &[&Path], outputs: &[&Path], records_in: usize, records_out: usize) -> PipelineManifest {
        PipelineManifest {
            stage: self.stage.as_str().to_string(),
            config_hash: self.hash.clone(),
            inputs: inputs.iter().map(|p| self.display(p)).collect(),
            outputs: outputs.iter().map(|p| self.display(p)).collect(),
            records_in,
            records_out,
            seed: self.seed,
            tool_version: TOOL_VERSION.to_string(),
            details: BTreeMap::new(),
            duration_ms: self.started.elapsed().as_millis() as u64,
        }
    }
}

fn require_exists(path: &Path) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(ForgeError::Input(format!("missing input {}", path.display())))
    }
}

fn parse_bool(config: &Config, key: &str, default: bool) -> Result<bool> {
    match config.get(key) {
        None => Ok(default),
        Some("true" | "yes" | "on" | "1") => Ok(true),
        Some("false" | "no" | "off" | "0") => Ok(false),
        Some(v) => Err(ForgeError::Config(format!("`{key}` = {v:?} is not a boolean"))),
    }
}

/// Runs one stage. Returns one manifest per output file, already written.
pub fn run_stage(stage: Stage, config: &Config) -> Result<Vec<PipelineManifest>> {
    let run = Run::new(stage, config)?;
    match stage {
        Stage::Ingest => ingest(&run),
        Stage::Bronze => bronze(&run),
        Stage::Silver => silver(&run),
        Stage::GoldMerge => gold_merge(&run),
        Stage::Augment => augment(&run),
        Stage::Enrich => enrich_stage(&run),
        Stage::Evaluate => evaluate_stage(&run),
        Stage::Stats => stats(&run),
        Stage::Sample => sample(&run),
    }
}

fn finish(outputs: &[&Path], manifest: PipelineManifest) -> Result<Vec<PipelineManifest>> {
    for out in outputs {
        write_manifest(out, &manifest)?;
    }
    Ok(vec![manifest])
}

fn ingest(run: &Run<'_>) -> Result<Vec<PipelineManifest>> {
    let dir = run.config.require_path(&["ingest.input", "corpus"])?;
    let result = crate::ingest::ingest_dir(&dir)?;
    let out = run.out_file("sentences.jsonl");
    jsonl::write(&out, &result.sentences)?;
    let m = run
        .manifest(&[&dir], &[&out], result.documents, result.sentences.len())
        .detail("skipped_empty", result.skipped_empty);
    finish(&[&out], m)
}

fn load_lexicon(run: &Run<'_>, stage_key: &str) -> Result<(PathBuf, Lexicon)> {
    let path = run.required_input(&[stage_key, "lexicon"])?;
    let lexicon = formats::load_lexicon(&path)?;
    Ok((path, lexicon))
}

fn bronze(run: &Run<'_>) -> Result<Vec<PipelineManifest>> {
    let input = run.input("bronze", "sentences.jsonl")?;
    let (lex_path, lexicon) = load_lexicon(run, "bronze.lexicon")?;
    let out = run.out_file("bronze.jsonl");
    let mut file = AtomicFile::create(&out)?;
    let mut records = jsonl::records::<ContextSentence>(&input)?;
    let (mut n_in, mut n_out) = (0usize, 0usize);
    let mut last: Option<(String, usize)> = None;
    loop {
        let mut chunk = Vec::with_capacity(BRONZE_CHUNK);
        for r in records.by_ref().take(BRONZE_CHUNK) {
            let (line, s) = r?;
            let key = (s.doc_id.clone(), s.index);
            if last.as_ref().is_some_and(|prev| *prev >= key) {
                return Err(ForgeError::parse(&input, line, "sentences are not sorted by (doc_id, index)"));
            }
            last = Some(key);
            chunk.push(s);
        }
        if chunk.is_empty() {
            break;
        }
        n_in += chunk.len();
        let triplets: Vec<Vec<Triplet>> = chunk.par_iter().map(|s| triplets_for_sentence(s, &lexicon)).collect();
        for t in triplets.iter().flatten() {
            file.write_record(t)?;
            n_out += 1;
        }
    }
    file.commit()?;
    let m = run
        .manifest(&[&input, &lex_path], &[&out], n_in, n_out)
        .detail("lexicon_entries", lexicon.len());
    finish(&[&out], m)
}

fn percent_label(p: f64) -> String {
    format!("{p}")
}

fn filter_config(config: &Config) -> Result<FilterConfig> {
    let d = FilterConfig::default();
    Ok(FilterConfig {
        min_tokens: config.parse_or("silver.min_tokens", d.min_tokens)?,
        max_tokens: config.parse_or("silver.max_tokens", d.max_tokens)?,
        min_alpha_ratio: config.parse_or("silver.min_alpha_ratio", d.min_alpha_ratio)?,
    })
}

fn silver(run: &Run<'_>) -> Result<Vec<PipelineManifest>> {
    let cfg = run.config;
    let percents: Vec<f64> = cfg
        .list("silver.percents")
        .unwrap_or_else(|| vec!["1".into(), "5".into(), "10".into()])
        .iter()
        .map(|p| p.parse().map_err(|e| ForgeError::Config(format!("silver.percents: {p:?}: {e}"))))
        .collect::<Result<_>>()?;
    for &p in &percents {
        tier_size(0, p)?;
    }
    let use_filter = parse_bool(cfg, "silver.filter", true)?;
    let filter = filter_config(cfg)?;
    let input = run.input("silver", "bronze.jsonl")?;
    let reference = run.required_input(&["silver.reference"])?;
    let (profiles, reference_rows) = formats::load_reference_profiles(&reference)?;

    let bronze: Vec<Triplet> = jsonl::read(&input)?;
    let n = bronze.len();
    let kept: Vec<Triplet> = if use_filter {
        bronze.into_par_iter().filter(|t| structural_filter(t, &filter)).collect()
    } else {
        bronze
    };
    let rejected = n - kept.len();
    let mut ranked: Vec<RankedEntry> = kept.into_par_iter().map(|t| profiles.rank(t)).collect();
    sort_ranked(&mut ranked);

    let mut manifests = Vec::new();
    for &p in &percents {
        let size = tier_size(ranked.len(), p)?;
        let out = run.out_file(&format!("silver_{}.jsonl", percent_label(p)));
        jsonl::write(&out, &ranked[..size])?;
        let m = run
            .manifest(&[&input, &reference], &[&out], n, size)
            .detail("percent", p)
            .detail("filter", use_filter)
            .detail("filter_rejected", rejected)
            .detail("ranked", ranked.len())
            .detail("reference_rows", reference_rows);
        m.check_filtering()?;
        manifests.extend(finish(&[&out], m)?);
    }
    Ok(manifests)
}

fn gold_merge(run: &Run<'_>) -> Result<Vec<PipelineManifest>> {
    let input = run.required_input(&["gold.annotations"])?;
    let annotations: Vec<AnnotationRecord> = jsonl::read(&input)?;
    if annotations.is_empty() {
        return Err(ForgeError::Input(format!("{}: no annotation records", input.display())));
    }
    let merged = merge(&annotations)?;
    let report = agreement_report(&annotations)?;

    let labels_out = run.out_file("gold_labels.jsonl");
    let agreement_out = run.out_file("agreement.json");
    jsonl::write(&labels_out, &merged)?;
    jsonl::write_json(&agreement_out, &report)?;
    let accepted: BTreeSet<&str> = merged
        .iter()
        .filter(|m| m.label == Label::Accept)
        .map(|m| m.triplet_id.as_str())
        .collect();
    let base = run
        .manifest(&[&input], &[&labels_out, &agreement_out], annotations.len(), merged.len())
        .detail("accepted", accepted.len())
        .detail("percent_agreement", report.percent_agreement)
        .detail("kappa", report.kappa);
    base.check_filtering()?;
    let mut manifests = finish(&[&labels_out, &agreement_out], base)?;

    if let Some(triplets_path) = run.config.path(&["gold.triplets"]) {
        require_exists(&triplets_path)?;
        let triplets: Vec<Triplet> = jsonl::read(&triplets_path)?;
        let gold: Vec<&Triplet> = triplets.iter().filter(|t| accepted.contains(t.id().as_str())).collect();
        let gold_out = run.out_file("gold.jsonl");
        jsonl::write(&gold_out, &gold)?;
        let m = run.manifest(&[&triplets_path, &input], &[&gold_out], triplets.len(), gold.len());
        m.check_filtering()?;
        manifests.extend(finish(&[&gold_out], m)?);
    }
    Ok(manifests)
}

fn augment(run: &Run<'_>) -> Result<Vec<PipelineManifest>> {
    let cfg = run.config;
    let method = cfg.require("augment.method")?;
    let rate: f64 = cfg.parse_or("augment.rate", 0.1)?;
    let k: usize = cfg.parse_or("augment.k", 1)?;
    let keep = parse_bool(cfg, "augment.keep_originals", true)?;
    let input = run.input("augment", "bronze.jsonl")?;
    let records: Vec<Triplet> = jsonl::read(&input)?;
    let mut inputs = vec![input.clone()];

    let dictionary;
    let table;
    let stats;
    let augmenter = match method {
        "spelling" => {
            let path = run.required_input(&["augment.dictionary"])?;
            dictionary = formats::load_spelling_dictionary(&path)?;
            inputs.push(path);
            Augmenter::Spelling { dictionary: &dictionary, rate }
        }
        "embed" => {
            let path = run.required_input(&["augment.embeddings"])?;
            table = formats::load_embedding_table(&path)?;
            inputs.push(path);
            Augmenter::Embedding { table: &table, rate }
        }
        "tfidf-insert" | "tfidf-replace" => {
            stats = match cfg.path(&["augment.tfidf_corpus"]) {
                Some(path) => {
                    require_exists(&path)?;
                    let sentences: Vec<ContextSentence> = jsonl::read(&path)?;
                    inputs.push(path);
                    TfidfStats::fit(sentences.iter().map(|s| s.text.as_str()))
                }
                None => TfidfStats::fit(records.iter().map(|t| t.e_c.as_str())),
            };
            let mode = if method == "tfidf-insert" {
                TfidfMode::Insert
            } else {
                TfidfMode::Replace
            };
            Augmenter::Tfidf { stats: &stats, mode, k }
        }
        other => return Err(ForgeError::Config(format!("unknown augmentation method {other:?}"))),
    };

    let augmented = augment_dataset(&records, &augmenter, run.seed, keep)?;
    let out = run.out_file(&format!("augmented_{method}.jsonl"));
    jsonl::write(&out, &augmented.records)?;
    let input_refs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    let m = run
        .manifest(&input_refs, &[&out], records.len(), augmented.records.len())
        .detail("method", method)
        .detail("rate", rate)
        .detail("k", k)
        .detail("keep_originals", keep)
        .detail("infeasible", augmented.infeasible)
        .detail("augmented_members", json!(["e", "e_c", "e_i"]));
    let expected = if keep { 2 * records.len() } else { records.len() };
    if m.records_out != expected {
        return Err(ForgeError::Invariant(format!(
            "augment produced {} records from {}, expected {expected}",
            m.records_out, m.records_in
        )));
    }
    finish(&[&out], m)
}

/// Triplet plus the rendered model inputs for each of its sentences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnrichedRow {
    #[serde(flatten)]
    pub triplet: Triplet,
    pub rendered: String,
    pub rendered_e_c: String,
    pub rendered_e_i: String,
    pub context_mode: ContextMode,
    pub attachment_kinds: Vec<AttachmentKind>,
}

fn enrich_config(config: &Config) -> Result<EnrichConfig> {
    let context = match config.get("enrich.context").unwrap_or("sentence") {
        "sentence" => ContextMode::Sentence,
        "paragraph" => ContextMode::Paragraph,
        other => return Err(ForgeError::Config(format!("unknown enrich.context {other:?}"))),
    };
    let knowledge = match config.get("enrich.knowledge").unwrap_or("none") {
        "none" => Knowledge::None,
        "gloss" => Knowledge::Gloss {
            n: config.parse_or("enrich.glosses", 5)?,
        },
        "inference" => Knowledge::Inference {
            k: InferenceCount::try_from(config.parse_or("enrich.inferences", 12usize)?)?,
        },
        other => return Err(ForgeError::Config(format!("unknown enrich.knowledge {other:?}"))),
    };
    let ec = EnrichConfig { context, knowledge };
    ec.validate()?;
    Ok(ec)
}

fn enrich_stage(run: &Run<'_>) -> Result<Vec<PipelineManifest>> {
    let ec = enrich_config(run.config)?;
    let input = run.input("enrich", "bronze.jsonl")?;
    let mut inputs = vec![input.clone()];
    let glosses = match ec.knowledge {
        Knowledge::Gloss { .. } => {
            let p = run.required_input(&["enrich.glosses_path"])?;
            let store = formats::load_gloss_store(&p)?;
            inputs.push(p);
            Some(store)
        }
        _ => None,
    };
    let inferences = match ec.knowledge {
        Knowledge::Inference { .. } => {
            let p = run.required_input(&["enrich.inferences_path"])?;
            let store = formats::load_inference_store(&p)?;
            inputs.push(p);
            Some(store)
        }
        _ => None,
    };
    let sources = KnowledgeSources {
        glosses: glosses.as_ref(),
        inferences: inferences.as_ref(),
    };

    let triplets: Vec<Triplet> = jsonl::read(&input)?;
    let rows: Vec<EnrichedRow> = triplets
        .into_par_iter()
        .map(|t| {
            let render = |text: &str| {
                let ctx = LocalContext::new(text, t.prev.as_deref(), t.next.as_deref());
                enrich(&ctx, &t.mwe, &t.doc_id, t.index, &ec, &sources)
            };
            let e = render(&t.e)?;
            let e_c = render(&t.e_c)?;
            let e_i = render(&t.e_i)?;
            Ok(EnrichedRow {
                attachment_kinds: e.attachment_kinds(),
                rendered: e.rendered,
                rendered_e_c: e_c.rendered,
                rendered_e_i: e_i.rendered,
                context_mode: ec.context,
                triplet: t,
            })
        })
        .collect::<idiomforge_core::Result<_>>()?;

    let out = run.out_file("enriched.jsonl");
    jsonl::write(&out, &rows)?;
    let input_refs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    let m = run
        .manifest(&input_refs, &[&out], rows.len(), rows.len())
        .detail("context", json!(ec.context))
        .detail("knowledge", json!(ec.knowledge));
    finish(&[&out], m)
}

#[derive(Deserialize)]
struct EvalTripletRow {
    #[serde(flatten)]
    triplet: Triplet,
    #[serde(default)]
    rendered: Option<String>,
    #[serde(default)]
    rendered_e_c: Option<String>,
    #[serde(default)]
    rendered_e_i: Option<String>,
}

/// Reads either scored pairs or (possibly enriched) triplets. With
/// `use_rendered`, rendered variants replace the raw sentences.
pub fn load_eval_dataset(path: &Path, use_rendered: bool) -> Result<EvalDataset> {
    let values: Vec<(usize, Value)> = jsonl::records(path)?.collect::<Result<_>>()?;
    let is_pairs = values.first().is_some_and(|(_, v)| v.get("sentence_1").is_some());
    let parse_err = |line: usize, e: serde_json::Error| ForgeError::parse(path, line, e);
    if is_pairs {
        let pairs = values
            .into_iter()
            .map(|(line, v)| serde_json::from_value::<StsPair>(v).map_err(|e| parse_err(line, e)))
            .collect::<Result<_>>()?;
        return Ok(EvalDataset::Pairs(pairs));
    }
    let triplets = values
        .into_iter()
        .map(|(line, v)| {
            let row: EvalTripletRow = serde_json::from_value(v).map_err(|e| parse_err(line, e))?;
            let mut t = row.triplet;
            if use_rendered {
                if let (Some(e), Some(c), Some(i)) = (row.rendered, row.rendered_e_c, row.rendered_e_i) {
                    t.e = e;
                    t.e_c = c;
                    t.e_i = i;
                }
            }
            Ok(t)
        })
        .collect::<Result<_>>()?;
    Ok(EvalDataset::Triplets(triplets))
}

fn dataset_texts(dataset: &EvalDataset) -> Vec<&str> {
    match dataset {
        EvalDataset::Triplets(ts) => ts.iter().flat_map(|t| [t.e.as_str(), t.e_c.as_str(), t.e_i.as_str()]).collect(),
        EvalDataset::Pairs(ps) => ps.iter().flat_map(|p| [p.sentence_1.as_str(), p.sentence_2.as_str()]).collect(),
    }
}

pub fn write_records_tsv(path: &Path, records: &[EvalRecord]) -> Result<()> {
    let mut file = AtomicFile::create(path)?;
    file.write_str("pair_id\tpredicted\tgold\n")?;
    for r in records {
        file.write_str(&format!("{}\t{:?}\t{:?}\n", r.pair_id, r.predicted_sim, r.gold_sim))?;
    }
    file.commit()
}

fn evaluate_stage(run: &Run<'_>) -> Result<Vec<PipelineManifest>> {
    let cfg = run.config;
    let backend = cfg
        .get("evaluate.backend")
        .ok_or_else(|| ForgeError::Config("no evaluation backend configured (`evaluate.backend`)".into()))?;
    let use_rendered = parse_bool(cfg, "evaluate.use_rendered", true)?;
    let input = run.input("evaluate", "enriched.jsonl")?;
    let dataset = load_eval_dataset(&input, use_rendered)?;
    if dataset.is_empty() {
        return Err(ForgeError::Input(format!("{}: evaluation dataset is empty", input.display())));
    }
    let mut inputs = vec![input.clone()];

    let (records, report) = match backend {
        "hashing" => {
            let lexicon = match cfg.path(&["evaluate.lexicon", "lexicon"]) {
                Some(p) => {
                    require_exists(&p)?;
                    let lex = formats::load_lexicon(&p)?;
                    inputs.push(p);
                    lex
                }
                None => Lexicon::new(Vec::new())?,
            };
            let mut embedder = HashingEmbedder::fit(dataset_texts(&dataset), &lexicon)?;
            if let Some(d) = cfg.get("evaluate.dimension") {
                let d: usize = d
                    .parse()
                    .ok()
                    .filter(|&d| d > 0)
                    .ok_or_else(|| ForgeError::Config(format!("evaluate.dimension = {d:?}")))?;
                embedder = embedder.with_dimension(d);
            }
            run_eval(&dataset, &CosineScorer(embedder))?
        }
        "process" => {
            let command = cfg.require("evaluate.command")?;
            run_eval(&dataset, &CosineScorer(ProcessEmbedder::spawn(command)?))?
        }
        other => return Err(ForgeError::Config(format!("unknown evaluation backend {other:?}"))),
    };

    let report_out = run.out_file("report.json");
    let tsv_out = run.out_file("records.tsv");
    jsonl::write_json(&report_out, &report)?;
    write_records_tsv(&tsv_out, &records)?;
    let input_refs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    let m = run
        .manifest(&input_refs, &[&report_out, &tsv_out], dataset.len(), records.len())
        .detail("backend", backend)
        .detail("rho_overall", report.rho_overall);
    finish(&[&report_out, &tsv_out], m)
}

fn run_eval<S: Scorer>(dataset: &EvalDataset, scorer: &S) -> Result<(Vec<EvalRecord>, idiomforge_core::sts::EvalReport)> {
    Ok(evaluate(dataset, scorer)?)
}

/// Record count, distinct MWEs and sentence-length histogram of one file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DatasetStats {
    pub records: usize,
    pub distinct_mwes: usize,
    /// Word count of `e` bucketed by tens: key `b` counts lengths in
    /// `[10b, 10b + 9]`.
    pub length_histogram: BTreeMap<usize, usize>,
}

#[derive(Deserialize)]
struct StatsRow {
    #[serde(default)]
    mwe: Option<String>,
    #[serde(default)]
    e: Option<String>,
    #[serde(default)]
    text: Option<String>,
}

pub fn dataset_stats(path: &Path) -> Result<DatasetStats> {
    let mut stats = DatasetStats::default();
    let mut mwes = BTreeSet::new();
    for r in jsonl::records::<StatsRow>(path)? {
        let (_, row) = r?;
        stats.records += 1;
        if let Some(m) = row.mwe {
            mwes.insert(m);
        }
        if let Some(s) = row.e.or(row.text) {
            let words = idiomforge_core::text::words(&s).count();
            *stats.length_histogram.entry(words / 10).or_default() += 1;
        }
    }
    stats.distinct_mwes = mwes.len();
    Ok(stats)
}

fn stats(run: &Run<'_>) -> Result<Vec<PipelineManifest>> {
    let inputs: Vec<PathBuf> = match run.config.list("stats.input") {
        Some(list) => list.iter().map(|p| run.config.resolve(p)).collect(),
        None => vec![run.out_file("bronze.jsonl")],
    };
    let mut files = BTreeMap::new();
    let mut total = 0;
    for path in &inputs {
        require_exists(path)?;
        let s = dataset_stats(path)?;
        total += s.records;
        files.insert(run.display(path), s);
    }
    let tiers: BTreeMap<&String, usize> = files.iter().map(|(k, v)| (k, v.records)).collect();
    let summary = json!({ "files": files, "tier_counts": tiers, "total_records": total });
    let out = run.out_file("stats.json");
    jsonl::write_json(&out, &summary)?;
    let input_refs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    let m = run.manifest(&input_refs, &[&out], total, total);
    finish(&[&out], m)
}

fn sample(run: &Run<'_>) -> Result<Vec<PipelineManifest>> {
    let cfg = run.config;
    let input = run.required_input(&["sample.input"])?;
    let mut inputs = vec![input.clone()];
    let k = match (cfg.get("sample.k"), cfg.path(&["sample.size_of"])) {
        (Some(_), _) => cfg.parse_or("sample.k", 0usize)?,
        (None, Some(p)) => {
            require_exists(&p)?;
            let k = jsonl::count_records(&p)?;
            inputs.push(p);
            k
        }
        (None, None) => return Err(ForgeError::Config("sample needs `sample.k` or `sample.size_of`".into())),
    };
    let rows: Vec<Value> = jsonl::read(&input)?;
    let picked = random_sample(&rows, k, run.seed)?;
    let out = run.out_file("sample.jsonl");
    jsonl::write(&out, &picked)?;
    let input_refs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    let m = run.manifest(&input_refs, &[&out], rows.len(), picked.len()).detail("k", k);
    m.check_filtering()?;
    finish(&[&out], m)
}
