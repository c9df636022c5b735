//! Finite category theory on explicit composition tables.
//!
//! The crate represents categories, functors, and set-valued functors as
//! concrete finite tables, validates every axiom exhaustively, and decides
//! structural questions (representability, hom preservation, extension
//! identities) by bounded enumeration with certified witnesses. All searches
//! are deterministic: given equal inputs they produce byte-identical output.

pub mod category;
pub mod extension;
pub mod finset;
pub mod functor;
pub mod generator;
pub mod multimodal;
pub mod formats;
pub mod presheaf;
pub mod pretext;
pub mod rational;
pub mod rkhs;
pub mod yoneda;

pub use category::{
    validate_category, CategoryBuilder, CategoryError, CategorySpec, FinCategory, Morphism,
    MorphismId, ObjectId,
};
pub use extension::{
    category_of_elements, check_fine_tuning_theorem, colimit_finset, kan_extend, kan_extend_map,
    CategoryOfElements, ColimitResult, ExtensionError, FineTuningReport, MergeSchedule,
};
pub use finset::{FinSet, SetError, SetFunction};
pub use functor::{
    classify_functor, compose_functors, factor_full_embedding, full_subcategory,
    image_full_subcategory, is_isomorphism_of_categories, CatFunctor, Factorization,
    FullEmbeddingObstruction, FunctorClassification, FunctorError, SubcategoryWitness,
};
pub use generator::{generate_random_category, generate_random_category_capped, DEFAULT_MORPHISM_CAP};
pub use multimodal::{
    check_chain, check_generalization, decode_object, is_feature_aligned, AlignmentVerdict,
    ChainReport, ChainSpec, DecodeResult, FeatureAlignedMap, GeneralizationVerdict,
    MultimodalError, PairBijection,
};
pub use formats::{
    load_any, load_category, load_chain, load_functor, load_markov_lm, load_mask_spec,
    load_task, load_weighted_graph, resolve_category_ref, split_sentence_key, CategoryRef,
    ChainFile, ContentError, FormatError, FunctorFile, FunctorRef, LoadedInput, MarkovLmFile,
    MaskSpecFile, TaskFile, WeightEntry, WeightedGraphFile,
};
pub use pretext::{
    build_contrastive_category, build_language_category, build_masked_category,
    build_rotation_category, canonical_successor, recover_mask_spec, ContrastiveCategory,
    DistObject, LanguageCategory, MarkovLM, MaskSpec, MaskSplit, PretextError, WeightedGraph,
};
pub use rational::{parse_rational, rational_to_f64, RationalParseError};
pub use rkhs::{rkhs_factor, RkhsError, RkhsFactorization};
pub use presheaf::{
    are_naturally_isomorphic, constant_functor, coproduct_functor, enumerate_nat_transformations,
    product_functor, relabel_functor, ActionTables, NatTransformation, PresheafError, SetFunctor,
    ValueTables, Variance,
};
pub use yoneda::{
    check_prompt_theorem, corepresentable, find_representative, prompt_solve, yoneda_bijection,
    yoneda_embed, yoneda_embed_morphism, FeatureToken, IdealModel, PromptVerdict,
    UnsolvableWitness, YonedaBijection, YonedaError,
};

/// Default ceiling for brute-force searches over natural transformation
/// component families. Searches refuse to start above it rather than sample.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1_000_000;
