use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{SplitFiles, DEFAULT_RATIOS};
use crate::embeddings::{SkipgramConfig, WalkConfig};
use crate::error::{Error, Result};
use crate::matcher::{ModelKind, ModelSpec, TrainConfig};
use crate::name_index::NormalizationPolicy;
use crate::rdf::{DisambiguationFilter, FOAF_NAME, OWL_SAME_AS, RDFS_LABEL, RDF_TYPE};

/// Input files and the directory that receives every derived artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Paths {
    /// N-Triples files (optionally gzipped) of the source graph.
    pub source: Vec<PathBuf>,
    pub target: Vec<PathBuf>,
    /// Files holding the alignment triples.
    pub alignment: Vec<PathBuf>,
    /// `iri<TAB>label` type file; defaults to the one written by ingest.
    pub types: Option<PathBuf>,
    pub work_dir: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Paths { source: Vec::new(), target: Vec::new(), alignment: Vec::new(), types: None, work_dir: "work".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NameConfig {
    pub source_predicates: Vec<String>,
    pub target_predicates: Vec<String>,
    /// Accepted language tags; empty accepts all. Untagged literals always pass.
    pub languages: Vec<String>,
    pub policy: NormalizationPolicy,
}

impl Default for NameConfig {
    fn default() -> Self {
        let preds = vec![FOAF_NAME.to_string(), RDFS_LABEL.to_string()];
        NameConfig { source_predicates: preds.clone(), target_predicates: preds, languages: Vec::new(), policy: NormalizationPolicy::Exact }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlignmentConfig {
    pub predicates: Vec<String>,
    pub disambiguation: DisambiguationFilter,
}

impl Default for AlignmentConfig {
    fn default() -> Self {
        AlignmentConfig { predicates: vec![OWL_SAME_AS.to_string()], disambiguation: DisambiguationFilter::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GraphConfig {
    /// When set, only these predicates are kept.
    pub keep_predicates: Option<Vec<String>>,
    /// Dropped in addition to the alignment predicates.
    pub drop_predicates: Vec<String>,
    pub type_predicate: String,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig { keep_predicates: None, drop_predicates: Vec::new(), type_predicate: RDF_TYPE.to_string() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MatcherSection {
    pub model: ModelKind,
    pub hidden: usize,
    #[serde(flatten)]
    pub train: TrainConfig,
}

impl Default for MatcherSection {
    fn default() -> Self {
        MatcherSection { model: ModelKind::Mlp, hidden: 750, train: TrainConfig::default() }
    }
}

impl MatcherSection {
    pub fn spec(&self) -> ModelSpec {
        match self.model {
            ModelKind::Mlp => ModelSpec::mlp(self.hidden),
            ModelKind::LogReg => ModelSpec::logreg(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetSection {
    pub ratios: [f64; 3],
}

impl Default for DatasetSection {
    fn default() -> Self {
        DatasetSection { ratios: DEFAULT_RATIOS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalSection {
    /// Candidate-count bucket edges; powers of two when unset.
    pub bucket_edges: Option<Vec<usize>>,
    pub sweep_percents: Vec<f64>,
    /// One count per percentage; the default policy when unset.
    pub sweep_repeats: Option<Vec<usize>>,
}

impl Default for EvalSection {
    fn default() -> Self {
        EvalSection { bucket_edges: None, sweep_percents: crate::eval::DEFAULT_PERCENTS.to_vec(), sweep_repeats: None }
    }
}

/// Whole-pipeline configuration, read from TOML. Seeds inside the stage
/// sections are ignored: every stage derives its seed from `seed`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub seed: u64,
    pub paths: Paths,
    pub names: NameConfig,
    pub alignment: AlignmentConfig,
    pub graph: GraphConfig,
    pub dataset: DatasetSection,
    pub walks: WalkConfig,
    pub skipgram: SkipgramConfig,
    pub matcher: MatcherSection,
    pub eval: EvalSection,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.walks.validate()?;
        self.skipgram.validate()?;
        self.matcher.train.validate()?;
        crate::dataset::split_sizes(0, self.dataset.ratios)?;
        if self.matcher.model == ModelKind::Mlp && self.matcher.hidden == 0 {
            return Err(Error::Config("MLP hidden size must be at least 1".into()));
        }
        if self.paths.work_dir.as_os_str().is_empty() {
            return Err(Error::Config("work_dir must not be empty".into()));
        }
        Ok(())
    }

    pub fn layout(&self) -> Layout {
        Layout { root: self.paths.work_dir.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphRole {
    Source,
    Target,
}

impl GraphRole {
    pub fn name(self) -> &'static str {
        match self {
            GraphRole::Source => "source",
            GraphRole::Target => "target",
        }
    }

    pub fn other(self) -> Self {
        match self {
            GraphRole::Source => GraphRole::Target,
            GraphRole::Target => GraphRole::Source,
        }
    }
}

/// `Forward` queries source entities against the target graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Reverse,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Reverse => "reverse",
        }
    }

    /// `(query graph, candidate graph)`.
    pub fn roles(self) -> (GraphRole, GraphRole) {
        match self {
            Direction::Forward => (GraphRole::Source, GraphRole::Target),
            Direction::Reverse => (GraphRole::Target, GraphRole::Source),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Direction::Forward => "source->target",
            Direction::Reverse => "target->source",
        }
    }
}

/// File names of the artifacts under the work directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn graph(&self, role: GraphRole) -> PathBuf {
        self.root.join(format!("{}.kg", role.name()))
    }

    pub fn name_index(&self, role: GraphRole) -> PathBuf {
        self.root.join(format!("{}.names.idx", role.name()))
    }

    pub fn name_index_tsv(&self, role: GraphRole) -> PathBuf {
        self.root.join(format!("{}.names.tsv", role.name()))
    }

    pub fn types(&self) -> PathBuf {
        self.root.join("types.tsv")
    }

    pub fn split(&self, dir: Direction) -> SplitFiles {
        SplitFiles::new(&self.root.join("datasets"), dir.name())
    }

    pub fn embeddings(&self, role: GraphRole) -> PathBuf {
        self.root.join("embeddings").join(format!("{}.vec", role.name()))
    }

    pub fn model(&self, dir: Direction, kind: ModelKind) -> PathBuf {
        self.root.join("models").join(format!("{}.{}.bin", dir.name(), kind.name()))
    }

    pub fn training_log(&self, dir: Direction, kind: ModelKind) -> PathBuf {
        self.root.join("models").join(format!("{}.{}.log.json", dir.name(), kind.name()))
    }

    /// Report stem; `.json`, `.buckets.csv` and `.types.csv` are appended.
    pub fn report(&self, dir: Direction, scorer: &str, split: &str) -> PathBuf {
        self.root.join("reports").join(format!("{}.{scorer}.{split}", dir.name()))
    }

    pub fn sweep(&self, dir: Direction, kind: ModelKind) -> PathBuf {
        self.root.join("reports").join(format!("{}.{}.sweep", dir.name(), kind.name()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_and_defaults() {
        let cfg = PipelineConfig::default();
        assert_eq!(PipelineConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        let parsed = PipelineConfig::from_toml(
            r#"
            seed = 7
            [paths]
            source = ["a.nt"]
            work_dir = "out"
            [walks]
            walks_per_entity = 3
            [matcher]
            model = "logreg"
            batch_size = 64
            "#,
        )
        .unwrap();
        assert_eq!(parsed.seed, 7);
        assert_eq!(parsed.walks.walks_per_entity, 3);
        assert_eq!(parsed.walks.depth, 4);
        assert_eq!(parsed.matcher.model, ModelKind::LogReg);
        assert_eq!(parsed.matcher.train.batch_size, 64);
        assert_eq!(parsed.layout().graph(GraphRole::Source), PathBuf::from("out/source.kg"));
        parsed.validate().unwrap();
    }

    #[test]
    fn invalid_configs() {
        assert!(PipelineConfig::from_toml("seed = \"x\"").is_err());
        let mut cfg = PipelineConfig::default();
        cfg.walks.walks_per_entity = 0;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }
}
