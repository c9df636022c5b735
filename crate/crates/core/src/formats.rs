//! On-disk JSON formats and their loaders.
//!
//! Loaders keep two failure modes apart because callers report them
//! differently: an *input* problem (unreadable file, malformed JSON,
//! unknown keys, bad rational strings) versus *invalid content* (the file
//! parsed fine but its mathematics fails validation, with the library
//! error preserved as the witness).
//!
//! Files may reference other files; relative paths resolve against the
//! directory of the referencing file. Rational numbers are always JSON
//! strings ("3/4", "2", "0.25") so that no reader ever sees a binary
//! float where exact arithmetic is intended.

use crate::category::{CategoryError, CategorySpec, FinCategory, ObjectId};
use crate::functor::{CatFunctor, FunctorError};
use crate::multimodal::{ChainSpec, FeatureAlignedMap, MultimodalError};
use crate::presheaf::{ActionTables, PresheafError, SetFunctor, ValueTables, Variance};
use crate::pretext::{MarkovLM, MaskSpec, MaskSplit, PretextError, WeightedGraph};
use crate::rational::parse_rational;
use num_rational::BigRational;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// A validation failure inside an otherwise well-formed file.
#[derive(Debug, Error)]
pub enum ContentError {
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Functor(#[from] FunctorError),
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error(transparent)]
    Pretext(#[from] PretextError),
    #[error(transparent)]
    Multimodal(#[from] MultimodalError),
}

#[derive(Debug, Error)]
pub enum FormatError {
    /// The file cannot be read or does not deserialize as its kind.
    #[error("{path}: {detail}")]
    Input { path: PathBuf, detail: String },
    /// The file deserialized but its content fails validation.
    #[error("{path}: {source}")]
    Invalid {
        path: PathBuf,
        #[source]
        source: Box<ContentError>,
    },
}

impl FormatError {
    /// True for unreadable or malformed files, false for mathematical
    /// failures inside well-formed ones.
    pub fn is_input_error(&self) -> bool {
        matches!(self, FormatError::Input { .. })
    }

    fn input(path: &Path, detail: impl Into<String>) -> FormatError {
        FormatError::Input {
            path: path.to_path_buf(),
            detail: detail.into(),
        }
    }

    fn invalid(path: &Path, source: impl Into<ContentError>) -> FormatError {
        FormatError::Invalid {
            path: path.to_path_buf(),
            source: Box::new(source.into()),
        }
    }
}

/// A category given inline or by path to a category file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CategoryRef {
    Path(String),
    Inline(CategorySpec),
}

/// Functor file: source and target categories plus both assignment maps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorFile {
    pub source: CategoryRef,
    pub target: CategoryRef,
    pub on_objects: BTreeMap<String, String>,
    #[serde(default)]
    pub on_morphisms: BTreeMap<String, String>,
}

/// Task file: a Set-valued functor with explicit variance. Identity
/// actions and actions out of empty values may be omitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskFile {
    pub base: CategoryRef,
    pub variance: Variance,
    pub on_objects: ValueTables,
    #[serde(default)]
    pub on_morphisms: ActionTables,
}

/// One functor inside a chain file: inline assignment maps (source and
/// target are fixed by position) or a path to a full functor file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctorRef {
    Path(String),
    Inline {
        on_objects: BTreeMap<String, String>,
        #[serde(default)]
        on_morphisms: BTreeMap<String, String>,
    },
}

/// Chain file: n category refs joined by n-1 functor refs, with an
/// optional training subset (objects of the final category) for novelty
/// reporting. Each functor must be a full embedding; its feature tables
/// are the canonical embedded ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    pub categories: Vec<CategoryRef>,
    pub functors: Vec<FunctorRef>,
    #[serde(default)]
    pub training_subset: Option<Vec<String>>,
}

/// Weighted-graph file: node list and symmetric weight entries, rationals
/// as strings. Omitted pairs weigh zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedGraphFile {
    pub nodes: Vec<String>,
    #[serde(default)]
    pub weights: Vec<WeightEntry>,
    #[serde(default)]
    pub allow_self_loops: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightEntry {
    pub a: String,
    pub b: String,
    pub w: String,
}

/// Mask-spec file: the list of (full, revealed, mask) splits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskSpecFile {
    pub splits: Vec<MaskSplit>,
}

/// Markov language-model file. Sentence keys follow one convention:
/// whitespace-separated tokens when whitespace is present, one character
/// per token when every token is a single character, otherwise the whole
/// key is a single token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkovLmFile {
    pub tokens: Vec<String>,
    #[serde(rename = "N")]
    pub window: usize,
    pub next: BTreeMap<String, BTreeMap<String, String>>,
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| FormatError::input(path, format!("cannot read: {e}")))?;
    serde_json::from_str(&text).map_err(|e| FormatError::input(path, e.to_string()))
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn parse_weight(path: &Path, entry: &WeightEntry) -> Result<BigRational, FormatError> {
    parse_rational(&entry.w).map_err(|e| {
        FormatError::input(path, format!("weight for ({}, {}): {e}", entry.a, entry.b))
    })
}

/// Splits a sentence key into tokens; see [`MarkovLmFile`] for the rules.
pub fn split_sentence_key(key: &str, tokens: &[String]) -> Vec<String> {
    if key.contains(char::is_whitespace) {
        key.split_whitespace().map(str::to_string).collect()
    } else if tokens.iter().all(|t| t.chars().count() == 1) {
        key.chars().map(|c| c.to_string()).collect()
    } else {
        vec![key.to_string()]
    }
}

/// Builds a validated category from a reference, resolving paths against
/// `dir`.
pub fn resolve_category_ref(r: &CategoryRef, dir: &Path) -> Result<FinCategory, FormatError> {
    match r {
        CategoryRef::Path(p) => load_category(&dir.join(p)),
        CategoryRef::Inline(spec) => {
            let here = dir.join("<inline>");
            crate::category::validate_category(spec).map_err(|e| FormatError::invalid(&here, e))
        }
    }
}

pub fn load_category(path: &Path) -> Result<FinCategory, FormatError> {
    let spec: CategorySpec = read_json(path)?;
    crate::category::validate_category(&spec).map_err(|e| FormatError::invalid(path, e))
}

pub fn load_functor(path: &Path) -> Result<CatFunctor, FormatError> {
    let file: FunctorFile = read_json(path)?;
    functor_from_file(path, &file)
}

fn functor_from_file(path: &Path, file: &FunctorFile) -> Result<CatFunctor, FormatError> {
    let dir = base_dir(path);
    let source = resolve_category_ref(&file.source, &dir)?;
    let target = resolve_category_ref(&file.target, &dir)?;
    CatFunctor::new(source, target, &file.on_objects, &file.on_morphisms)
        .map_err(|e| FormatError::invalid(path, e))
}

pub fn load_task(path: &Path) -> Result<SetFunctor, FormatError> {
    let file: TaskFile = read_json(path)?;
    let base = resolve_category_ref(&file.base, &base_dir(path))?;
    SetFunctor::from_tables(base, file.variance, &file.on_objects, &file.on_morphisms)
        .map_err(|e| FormatError::invalid(path, e))
}

pub fn load_chain(path: &Path) -> Result<ChainSpec, FormatError> {
    let file: ChainFile = read_json(path)?;
    let dir = base_dir(path);
    if file.categories.len() < 2 || file.functors.len() + 1 != file.categories.len() {
        return Err(FormatError::input(
            path,
            format!(
                "{} categories require {} functors, found {}",
                file.categories.len(),
                file.categories.len().max(1) - 1,
                file.functors.len()
            ),
        ));
    }
    let categories: Vec<FinCategory> = file
        .categories
        .iter()
        .map(|r| resolve_category_ref(r, &dir))
        .collect::<Result<_, _>>()?;
    let mut links = Vec::with_capacity(file.functors.len());
    for (i, fref) in file.functors.iter().enumerate() {
        let functor = match fref {
            FunctorRef::Inline {
                on_objects,
                on_morphisms,
            } => CatFunctor::new(
                categories[i].clone(),
                categories[i + 1].clone(),
                on_objects,
                on_morphisms,
            )
            .map_err(|e| FormatError::invalid(path, e))?,
            FunctorRef::Path(p) => {
                let fpath = dir.join(p);
                let loaded = load_functor(&fpath)?;
                if loaded.source().to_spec() != categories[i].to_spec()
                    || loaded.target().to_spec() != categories[i + 1].to_spec()
                {
                    return Err(FormatError::input(
                        path,
                        format!("functor {i} ({}) does not join categories {i} and {}", p, i + 1),
                    ));
                }
                loaded
            }
        };
        let link = FeatureAlignedMap::build_feature_aligned(&functor)
            .map_err(|e| FormatError::invalid(path, e))?;
        links.push(link);
    }
    let training_subset = file
        .training_subset
        .as_ref()
        .map(|names| names.iter().cloned().map(ObjectId::new).collect());
    ChainSpec::new(categories, links, training_subset).map_err(|e| FormatError::invalid(path, e))
}

pub fn load_weighted_graph(path: &Path) -> Result<WeightedGraph, FormatError> {
    let file: WeightedGraphFile = read_json(path)?;
    let mut entries = Vec::with_capacity(file.weights.len());
    for entry in &file.weights {
        entries.push((entry.a.clone(), entry.b.clone(), parse_weight(path, entry)?));
    }
    WeightedGraph::new(file.nodes, entries, file.allow_self_loops)
        .map_err(|e| FormatError::invalid(path, e))
}

pub fn load_mask_spec(path: &Path) -> Result<MaskSpec, FormatError> {
    let file: MaskSpecFile = read_json(path)?;
    MaskSpec::new(file.splits).map_err(|e| FormatError::invalid(path, e))
}

pub fn load_markov_lm(path: &Path) -> Result<MarkovLM, FormatError> {
    let file: MarkovLmFile = read_json(path)?;
    let mut next = BTreeMap::new();
    for (key, dist) in &file.next {
        let sentence = split_sentence_key(key, &file.tokens);
        let mut parsed = BTreeMap::new();
        for (token, mass) in dist {
            let p = parse_rational(mass).map_err(|e| {
                FormatError::input(path, format!("next({key}) entry {token:?}: {e}"))
            })?;
            parsed.insert(token.clone(), p);
        }
        if next.insert(sentence, parsed).is_some() {
            return Err(FormatError::input(
                path,
                format!("next({key}) repeats an earlier sentence"),
            ));
        }
    }
    MarkovLM::new(file.tokens, file.window, next).map_err(|e| FormatError::invalid(path, e))
}

/// Everything a file can hold, for kind-sniffing entry points.
#[derive(Debug, Clone)]
pub enum LoadedInput {
    Category(FinCategory),
    Functor(Box<CatFunctor>),
    Task(Box<SetFunctor>),
    Chain(ChainSpec),
    WeightedGraph(WeightedGraph),
    MaskSpec(MaskSpec),
    MarkovLm(MarkovLM),
}

impl LoadedInput {
    pub fn kind(&self) -> &'static str {
        match self {
            LoadedInput::Category(_) => "category",
            LoadedInput::Functor(_) => "functor",
            LoadedInput::Task(_) => "task",
            LoadedInput::Chain(_) => "chain",
            LoadedInput::WeightedGraph(_) => "weighted-graph",
            LoadedInput::MaskSpec(_) => "mask-spec",
            LoadedInput::MarkovLm(_) => "markov-lm",
        }
    }
}

/// Loads any supported file, deciding its kind from its top-level keys.
pub fn load_any(path: &Path) -> Result<LoadedInput, FormatError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| FormatError::input(path, format!("cannot read: {e}")))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| FormatError::input(path, e.to_string()))?;
    let keys: Vec<&str> = value
        .as_object()
        .map(|o| o.keys().map(String::as_str).collect())
        .unwrap_or_default();
    let has = |k: &str| keys.contains(&k);
    if has("objects") {
        load_category(path).map(LoadedInput::Category)
    } else if has("source") && has("target") {
        load_functor(path).map(|f| LoadedInput::Functor(Box::new(f)))
    } else if has("base") && has("variance") {
        load_task(path).map(|t| LoadedInput::Task(Box::new(t)))
    } else if has("categories") && has("functors") {
        load_chain(path).map(LoadedInput::Chain)
    } else if has("nodes") {
        load_weighted_graph(path).map(LoadedInput::WeightedGraph)
    } else if has("splits") {
        load_mask_spec(path).map(LoadedInput::MaskSpec)
    } else if has("tokens") && has("next") {
        load_markov_lm(path).map(LoadedInput::MarkovLm)
    } else {
        Err(FormatError::input(
            path,
            "unrecognized file kind (expected a category, functor, task, chain, \
             weighted-graph, mask-spec, or markov-lm file)",
        ))
    }
}
