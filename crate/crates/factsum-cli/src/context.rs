//! Resolved run configuration shared by all subcommands.

use factsum::entities::{
    ingest_annotations, AnnotationLocator, EntityExtractor, EntityInventory, HeuristicExtractor,
};
use factsum::matching::MatchPolicy;
use factsum::textproc::{tokenize, StopwordSet, TokenizedText};

use crate::args::{CommonArgs, ExtractorArg};
use crate::errors::CliError;
use crate::io::validate_output_path;

/// Validated, resolved common configuration. Constructing this performs all
/// environment checks (paths, stop-word file) so commands fail before any
/// output is created.
pub struct Context {
    pub stopwords: StopwordSet,
    pub policy: MatchPolicy,
    pub extractor_mode: ExtractorArg,
    pub heuristic: HeuristicExtractor,
    pub strict: bool,
    pub jobs: usize,
}

impl Context {
    pub fn resolve(common: &CommonArgs) -> Result<Self, CliError> {
        if common.jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        if !common.input.is_file() {
            return Err(CliError::Usage(format!(
                "input {} is not a readable file",
                common.input.display()
            )));
        }
        if let Some(output) = &common.output {
            validate_output_path(output)?;
        }
        let stopwords = match &common.stopwords {
            Some(path) => {
                StopwordSet::from_file(path).map_err(|e| CliError::Usage(e.to_string()))?
            }
            None => StopwordSet::default_english(),
        };
        let policy = MatchPolicy {
            unigram_stopword_block: !common.allow_stopword_unigrams,
            numeric_unigram_block: common.block_numeric_unigrams,
            target_match_mode: common.target_match.into(),
        };
        Ok(Self {
            stopwords: stopwords.clone(),
            policy,
            extractor_mode: common.extractor,
            heuristic: HeuristicExtractor::new(stopwords),
            strict: common.strict,
            jobs: common.jobs,
        })
    }

    /// The configuration block echoed into artifact `_meta` headers.
    /// `--jobs` is deliberately absent: it never affects output bytes, and
    /// echoing it would make otherwise-identical runs differ.
    pub fn config_echo(&self, common: &CommonArgs) -> serde_json::Value {
        serde_json::json!({
            "input": common.input.display().to_string(),
            "output": common.output.as_ref().map(|p| p.display().to_string()),
            "extractor": common.extractor.echo(),
            "stopwords": common.stopwords.as_ref().map(|p| p.display().to_string()),
            "strict": common.strict,
            "policy": self.policy,
        })
    }

    /// Whole-record entity inventory for a field's text, per extractor mode.
    /// In annotations mode the inventory is the ingested annotation list
    /// (`annotations`); missing annotations are a per-record error.
    pub fn record_inventory(
        &self,
        text: &TokenizedText,
        annotations: Option<&Vec<String>>,
        field: &str,
    ) -> Result<EntityInventory, String> {
        match self.extractor_mode {
            ExtractorArg::Heuristic => Ok(self.heuristic.extract(text)),
            ExtractorArg::Annotations => match annotations {
                Some(strings) => Ok(ingest_annotations(strings)),
                None => Err(format!("annotations extractor requires entities_{field}")),
            },
        }
    }

    /// Extractor for per-sentence operations (sentence filtering): in
    /// annotations mode, a locator that finds the record's annotations
    /// inside whatever sentence it is handed.
    pub fn sentence_extractor(
        &self,
        annotations: Option<&Vec<String>>,
        field: &str,
    ) -> Result<RecordExtractor<'_>, String> {
        match self.extractor_mode {
            ExtractorArg::Heuristic => Ok(RecordExtractor::Heuristic(&self.heuristic)),
            ExtractorArg::Annotations => match annotations {
                Some(strings) => Ok(RecordExtractor::Located(AnnotationLocator::new(strings))),
                None => Err(format!("annotations extractor requires entities_{field}")),
            },
        }
    }

    /// Extractor for whole-record operations that take the text as input
    /// (pair filtering, augmentation): in annotations mode the text is
    /// ignored and the annotation list is the inventory.
    pub fn record_extractor(
        &self,
        annotations: Option<&Vec<String>>,
        field: &str,
    ) -> Result<RecordExtractor<'_>, String> {
        match self.extractor_mode {
            ExtractorArg::Heuristic => Ok(RecordExtractor::Heuristic(&self.heuristic)),
            ExtractorArg::Annotations => match annotations {
                Some(strings) => Ok(RecordExtractor::Fixed(strings.clone())),
                None => Err(format!("annotations extractor requires entities_{field}")),
            },
        }
    }
}

/// Per-record extractor dispatch. `Fixed` returns the ingested annotation
/// list regardless of the text; `Located` finds annotations inside the text.
pub enum RecordExtractor<'a> {
    Heuristic(&'a HeuristicExtractor),
    Located(AnnotationLocator),
    Fixed(Vec<String>),
}

impl EntityExtractor for RecordExtractor<'_> {
    fn extract(&self, text: &TokenizedText) -> EntityInventory {
        match self {
            RecordExtractor::Heuristic(h) => h.extract(text),
            RecordExtractor::Located(locator) => locator.extract(text),
            RecordExtractor::Fixed(strings) => ingest_annotations(strings),
        }
    }
}

/// Tokenizes an optional text field: `None`/empty string mean "absent".
pub fn tokenize_optional(text: &str) -> Option<TokenizedText> {
    let trimmed = text.trim();
    (!trimmed.is_empty()).then(|| tokenize(text))
}
