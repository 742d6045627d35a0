//! Corpus handling and the batch operations behind the `docmine` commands.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use docmine::crf::{save_model, LabeledSequence, TrainConfig};
use docmine::eval::{score_document, EvalReport, GroundTruth};
use docmine::ingest::parse_rich_xml_with;
use docmine::model::Document;
use docmine::pipeline::{train_task, training_sequences, ExtractionResult, Extractor, PipelineConfig, Task};
use docmine::synth::{generate_corpus, generate_document, Style};
use docmine::tei::export_tei;
use docmine::usecases::{curate_dataset_links, section_citation_distribution, CitationHistogram, DatasetReport, SectionMap};
use docmine::CrfModel;
use rayon::prelude::*;

/// Suffix of ground-truth files stored next to `<id>.xml`.
pub const GT_SUFFIX: &str = ".gt.txt";
pub const TEI_SUFFIX: &str = ".tei.xml";

/// Exit code for usage and configuration errors.
pub const EXIT_USAGE: i32 = 1;
/// Exit code when some inputs of a batch failed.
pub const EXIT_PARTIAL: i32 = 2;

fn is_input(p: &Path) -> bool {
    let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
    name.ends_with(".xml") && !name.ends_with(TEI_SUFFIX)
}

/// Rich-XML inputs: files as given, directories expanded to their `.xml`
/// files (TEI outputs excluded), sorted by path.
pub fn list_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            for e in std::fs::read_dir(p).with_context(|| format!("reading {}", p.display()))? {
                let path = e?.path();
                if path.is_file() && is_input(&path) {
                    out.push(path);
                }
            }
        } else {
            out.push(p.clone());
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// File stem without the `.xml` extension.
pub fn doc_id(path: &Path) -> String {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("document");
    name.strip_suffix(".xml").unwrap_or(name).to_string()
}

pub fn gt_path(xml: &Path) -> PathBuf {
    xml.with_file_name(format!("{}{GT_SUFFIX}", doc_id(xml)))
}

/// Writes `<id>.xml` and `<id>.gt.txt` for each generated article.
pub fn write_synthetic_corpus(dir: &Path, n: usize, seed: u64, style: Option<Style>) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let docs = match style {
        Some(s) => (0..n).map(|i| (format!("doc-{i:04}"), generate_document(s, seed.wrapping_add(i as u64)))).collect(),
        None => generate_corpus(n, seed),
    };
    let mut written = Vec::new();
    for (id, d) in docs {
        let xml = dir.join(format!("{id}.xml"));
        std::fs::write(&xml, &d.xml).with_context(|| format!("writing {}", xml.display()))?;
        std::fs::write(gt_path(&xml), d.ground_truth.write())?;
        written.push(xml);
    }
    Ok(written)
}

/// An annotated document of a corpus directory.
#[derive(Debug, Clone)]
pub struct Annotated {
    pub id: String,
    pub path: PathBuf,
    pub document: Document,
    pub ground_truth: GroundTruth,
}

/// Reads every input with ground truth. Inputs without ground truth are
/// skipped and reported in the returned warnings; unreadable ones fail.
pub fn load_annotated(paths: &[PathBuf], config: &PipelineConfig) -> Result<(Vec<Annotated>, Vec<String>)> {
    let mut docs = Vec::new();
    let mut warnings = Vec::new();
    for path in list_inputs(paths)? {
        let gt = gt_path(&path);
        if !gt.exists() {
            warnings.push(format!("{}: no ground truth, skipped", path.display()));
            continue;
        }
        let bytes = std::fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
        let (mut document, _) = parse_rich_xml_with(&bytes, &config.ingest).with_context(|| format!("parsing {}", path.display()))?;
        let id = doc_id(&path);
        document.source_id = id.clone();
        let text = std::fs::read_to_string(&gt).with_context(|| format!("reading {}", gt.display()))?;
        let ground_truth = GroundTruth::parse(&text).with_context(|| format!("parsing {}", gt.display()))?;
        docs.push(Annotated { id, path, document, ground_truth });
    }
    Ok((docs, warnings))
}

/// Outcome of extracting one input file.
#[derive(Debug)]
pub struct FileOutcome {
    pub input: PathBuf,
    pub result: Result<(ExtractionResult, PathBuf, Vec<String>)>,
}

impl FileOutcome {
    /// One line: counts of what was found, or the error.
    pub fn summary(&self) -> String {
        match &self.result {
            Ok((r, out, warnings)) => format!(
                "{}: ok -> {} title={} authors={} emails={} affiliations={} sections={} captions={} footnotes={} urls={} references={} citations={} warnings={}",
                self.input.display(),
                out.display(),
                !r.title.is_empty(),
                r.authors.len(),
                r.emails.len(),
                r.affiliations.len(),
                r.sections.len(),
                r.captions.len(),
                r.footnotes.len(),
                r.urls.len(),
                r.references.len(),
                r.citation_instances.len(),
                warnings.len()
            ),
            Err(e) => format!("{}: error: {e:#}", self.input.display()),
        }
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

/// Extracts each input and writes `<id>.tei.xml` into `out_dir`, with up
/// to `jobs` documents in flight. Outcomes keep the input order.
pub fn extract_batch(extractor: &Extractor, inputs: &[PathBuf], out_dir: &Path, jobs: usize) -> Result<Vec<FileOutcome>> {
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let run = |input: &PathBuf| -> Result<(ExtractionResult, PathBuf, Vec<String>)> {
        let bytes = std::fs::read(input).with_context(|| format!("reading {}", input.display()))?;
        let id = doc_id(input);
        let (result, report) = extractor.extract_bytes(&bytes, &id)?;
        let out = out_dir.join(format!("{id}{TEI_SUFFIX}"));
        std::fs::write(&out, export_tei(&result)).with_context(|| format!("writing {}", out.display()))?;
        Ok((result, out, report.warnings))
    };
    Ok(pool(jobs)?.install(|| inputs.par_iter().map(|i| FileOutcome { input: i.clone(), result: run(i) }).collect()))
}

/// Extracts annotated documents in parallel, in corpus order.
pub fn extract_all(extractor: &Extractor, docs: &[Annotated], jobs: usize) -> Result<Vec<ExtractionResult>> {
    pool(jobs)?.install(|| {
        docs.par_iter().map(|d| extractor.extract(&d.document).with_context(|| format!("extracting {}", d.id))).collect()
    })
}

/// Micro-averaged scores of extraction results against their ground truth.
pub fn evaluate(results: &[ExtractionResult], docs: &[Annotated]) -> Result<EvalReport> {
    if docs.is_empty() {
        bail!("empty corpus");
    }
    let per_doc: Vec<_> = results.iter().zip(docs).map(|(r, d)| score_document(&r.to_ground_truth(), &d.ground_truth)).collect();
    Ok(EvalReport::from_documents(&per_doc))
}

/// A trained model with its training summary.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: CrfModel,
    pub objective: f64,
    pub heldout_accuracy: Option<f64>,
    pub train_docs: usize,
    pub heldout_docs: usize,
}

fn token_accuracy(model: &CrfModel, data: &[LabeledSequence]) -> Option<f64> {
    let (mut right, mut total) = (0usize, 0usize);
    for s in data {
        let predicted = model.viterbi_decode(&s.features()).ok()?;
        right += predicted.iter().zip(&s.items).filter(|(p, (_, gold))| *p == gold).count();
        total += s.len();
    }
    (total > 0).then(|| right as f64 / total as f64)
}

/// Trains one task on all but every tenth document, which is held out for
/// a token-accuracy estimate.
pub fn train(task: Task, docs: &[Annotated], config: &PipelineConfig, train_config: &TrainConfig) -> Result<TrainOutcome> {
    if docs.is_empty() {
        bail!("empty training corpus");
    }
    let lex = config.lexicons()?;
    let is_held = |i: usize| docs.len() >= 10 && i % 10 == 9;
    let held: Vec<&Annotated> = docs.iter().enumerate().filter(|(i, _)| is_held(*i)).map(|(_, d)| d).collect();
    let fit: Vec<&Annotated> = docs.iter().enumerate().filter(|(i, _)| !is_held(*i)).map(|(_, d)| d).collect();
    let corpus: Vec<(Document, GroundTruth)> = fit.iter().map(|d| (d.document.clone(), d.ground_truth.clone())).collect();
    let model = train_task(task, &corpus, config, &lex, train_config)?;
    let train_seqs: Vec<LabeledSequence> =
        corpus.iter().flat_map(|(d, g)| training_sequences(task, d, g, config, &lex)).filter(|s| !s.is_empty()).collect();
    let (objective, _) = model.log_likelihood_and_gradient(&train_seqs, train_config.l2_lambda)?;
    let held_seqs: Vec<LabeledSequence> = held
        .iter()
        .flat_map(|d| training_sequences(task, &d.document, &d.ground_truth, config, &lex))
        .filter(|s| !s.is_empty())
        .collect();
    Ok(TrainOutcome {
        heldout_accuracy: token_accuracy(&model, &held_seqs),
        model,
        objective,
        train_docs: fit.len(),
        heldout_docs: held.len(),
    })
}

/// Writes a model in the text model format.
pub fn write_model(model: &CrfModel, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, save_model(model)).with_context(|| format!("writing {}", path.display()))
}

pub fn section_map(config: &PipelineConfig) -> Result<SectionMap> {
    match &config.section_map {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(SectionMap::parse(&text).with_context(|| format!("parsing {}", p.display()))?)
        }
        None => Ok(SectionMap::default()),
    }
}

/// Dataset links over a set of extraction results.
pub fn usecase_datasets(results: &[ExtractionResult], map: &SectionMap) -> DatasetReport {
    curate_dataset_links(results, map)
}

/// Citation counts per generic section, summed over documents.
pub fn usecase_citedist(results: &[ExtractionResult], map: &SectionMap) -> CitationHistogram {
    let mut total = CitationHistogram::default();
    for r in results {
        total.merge(&section_citation_distribution(r, map));
    }
    total
}
