//! Carrying structure from one category into another through a full
//! embedding, at the level of embedded functors.
//!
//! A [`FeatureAlignedMap`] pairs a functor `F: C → B` with a table assigning
//! to each object of `C` a presheaf on `B` that must match the embedding of
//! `F`'s value. On top of that, this module checks that hom-sets of `C` are
//! reproduced exactly by transformation counts over the image subcategory,
//! decodes table entries back to objects of `B` by exhaustive search, and
//! chains several such maps end to end, including the bookkeeping for
//! objects the final stage never saw directly.

use crate::category::{CategoryError, FinCategory, MorphismId, ObjectId};
use crate::finset::FinSet;
use crate::functor::{
    classify_functor, compose_functors, factor_full_embedding, image_full_subcategory, CatFunctor,
    FunctorError, SubcategoryWitness,
};
use crate::presheaf::{
    are_naturally_isomorphic, enumerate_nat_transformations, NatTransformation, PresheafError,
    SetFunctor, Variance,
};
use crate::yoneda::{yoneda_embed, yoneda_embed_morphism, YonedaError};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MultimodalError {
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Functor(#[from] FunctorError),
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error(transparent)]
    Yoneda(#[from] YonedaError),
    #[error("table does not assign a presheaf to exactly the source objects: {0}")]
    MalformedTable(String),
    #[error("map is not aligned at {0}; run the alignment check for the full report")]
    NotAligned(ObjectId),
    #[error("no object of the target category has an embedded functor isomorphic to the table entry at {0}")]
    NoDecodableObject(ObjectId),
    #[error("chain is not well-formed: {0}")]
    ChainShape(String),
    #[error("chain fails at link {link}: {reason}")]
    ChainMismatch { link: usize, reason: String },
}

/// A functor into another category together with a table of presheaves
/// standing in for the embedded images of its values.
#[derive(Debug, Clone)]
pub struct FeatureAlignedMap {
    functor: CatFunctor,
    table: BTreeMap<ObjectId, SetFunctor>,
}

impl FeatureAlignedMap {
    /// The canonical aligned map over a full embedding: the table entry at
    /// `X` is the embedded functor of `F(X)` in the target category.
    pub fn build_feature_aligned(functor: &CatFunctor) -> Result<FeatureAlignedMap, MultimodalError> {
        let classification = classify_functor(functor);
        if !(classification.full && classification.embedding) {
            // Reuse the factorization path's detailed obstruction report.
            factor_full_embedding(functor)?;
            unreachable!("factorization must fail for a non-full-embedding");
        }
        let target = functor.target();
        let mut table = BTreeMap::new();
        for x in functor.source().objects() {
            let image = functor.apply_object(x)?;
            table.insert(x.clone(), yoneda_embed(target, image)?);
        }
        Ok(FeatureAlignedMap {
            functor: functor.clone(),
            table,
        })
    }

    /// Assembles a map from explicit parts without checking alignment, so
    /// corrupted tables and non-full functors can be fed to the checkers.
    /// Shapes are still validated: one contravariant presheaf on the target
    /// category per source object.
    pub fn from_parts(
        functor: CatFunctor,
        table: BTreeMap<ObjectId, SetFunctor>,
    ) -> Result<FeatureAlignedMap, MultimodalError> {
        for x in functor.source().objects() {
            let entry = table
                .get(x)
                .ok_or_else(|| MultimodalError::MalformedTable(format!("missing entry for {x}")))?;
            if entry.base() != functor.target() {
                return Err(MultimodalError::MalformedTable(format!(
                    "entry at {x} lives on the wrong category"
                )));
            }
            if entry.variance() != Variance::Contravariant {
                return Err(MultimodalError::MalformedTable(format!(
                    "entry at {x} is not contravariant"
                )));
            }
        }
        if table.len() != functor.source().object_count() {
            return Err(MultimodalError::MalformedTable(
                "table mentions objects outside the source category".into(),
            ));
        }
        Ok(FeatureAlignedMap { functor, table })
    }

    pub fn functor(&self) -> &CatFunctor {
        &self.functor
    }

    pub fn table_at(&self, x: &ObjectId) -> Result<&SetFunctor, MultimodalError> {
        self.table
            .get(x)
            .ok_or_else(|| MultimodalError::MalformedTable(format!("missing entry for {x}")))
    }
}

/// Outcome of the per-object alignment check.
#[derive(Debug, Clone)]
pub enum AlignmentVerdict {
    /// Every table entry is naturally isomorphic to the embedded image;
    /// `witnesses[X]` maps the embedded functor onto the table entry.
    Aligned {
        witnesses: BTreeMap<ObjectId, NatTransformation>,
    },
    /// The first object (in canonical order) where the entry differs, with
    /// both functors for inspection.
    Misaligned {
        object: ObjectId,
        expected: Box<SetFunctor>,
        got: Box<SetFunctor>,
    },
}

/// Checks `table(X) ≅ embedded F(X)` for every source object, in canonical
/// order, with explicit isomorphism witnesses.
pub fn is_feature_aligned(
    map: &FeatureAlignedMap,
    budget: u64,
) -> Result<AlignmentVerdict, MultimodalError> {
    let target = map.functor().target();
    let mut witnesses = BTreeMap::new();
    for x in map.functor().source().objects() {
        let image = map.functor().apply_object(x)?;
        let embedded = yoneda_embed(target, image)?;
        let entry = map.table_at(x)?;
        match are_naturally_isomorphic(&embedded, entry, budget)? {
            Some(iso) => {
                witnesses.insert(x.clone(), iso);
            }
            None => {
                return Ok(AlignmentVerdict::Misaligned {
                    object: x.clone(),
                    expected: Box::new(embedded),
                    got: Box::new(entry.clone()),
                });
            }
        }
    }
    Ok(AlignmentVerdict::Aligned { witnesses })
}

/// The hom-set of one source pair matched against transformations between
/// the corresponding table entries over the image subcategory.
#[derive(Debug, Clone)]
pub struct PairBijection {
    pub source: ObjectId,
    pub target: ObjectId,
    /// The source-category hom-set.
    pub hom: FinSet,
    /// Transformations found over the image subcategory; same count as
    /// `hom` when the verdict is `Preserved`.
    pub transformation_count: usize,
    /// The canonical transformation matched to each hom element.
    pub assignments: Vec<(MorphismId, NatTransformation)>,
}

/// Outcome of the structure-preservation check.
#[derive(Debug)]
pub enum GeneralizationVerdict {
    /// Every ordered pair of source objects carries a verified bijection.
    Preserved {
        image: Box<SubcategoryWitness>,
        pairs: Vec<PairBijection>,
    },
    /// The first ordered pair where hom elements and transformations fail
    /// to biject.
    Violated {
        source: ObjectId,
        target: ObjectId,
        hom_size: usize,
        transformation_count: usize,
    },
}

/// Verifies that the source category's hom-sets are reproduced, pair by
/// pair, as natural transformations between table entries restricted to the
/// image full subcategory. Each hom element is matched to the
/// transformation obtained by transporting postcomposition through the
/// alignment witnesses; the verdict reports the first counting failure
/// otherwise.
pub fn check_generalization(
    map: &FeatureAlignedMap,
    budget: u64,
) -> Result<GeneralizationVerdict, MultimodalError> {
    let source_cat = map.functor().source();
    let target_cat = map.functor().target();
    let witnesses = match is_feature_aligned(map, budget)? {
        AlignmentVerdict::Aligned { witnesses } => witnesses,
        AlignmentVerdict::Misaligned { object, .. } => {
            return Err(MultimodalError::NotAligned(object));
        }
    };
    let image = image_full_subcategory(map.functor());
    let sub = &image.subcategory;
    let mut pairs = Vec::new();
    for x in source_cat.objects() {
        for y in source_cat.objects() {
            let hom = source_cat.hom(x, y)?;
            let entry_x = map.table_at(x)?.restrict_to(sub)?;
            let entry_y = map.table_at(y)?.restrict_to(sub)?;
            let found = enumerate_nat_transformations(&entry_x, &entry_y, budget)?;
            // Transport each hom element into a transformation between the
            // restricted entries.
            let alpha_x = witnesses[x].restrict_to(sub)?;
            let alpha_y = witnesses[y].restrict_to(sub)?;
            let mut assignments: Vec<(MorphismId, NatTransformation)> = Vec::new();
            let mut matched = true;
            for f in hom.iter() {
                let pushed = map.functor().apply_morphism(&MorphismId::new(f))?;
                let post = yoneda_embed_morphism(target_cat, pushed)?.restrict_to(sub)?;
                let lambda = NatTransformation::vertical(
                    &alpha_y,
                    &NatTransformation::vertical(&post, &alpha_x.inverse()?)?,
                )?;
                if found.contains(&lambda)
                    && !assignments.iter().any(|(_, existing)| existing == &lambda)
                {
                    assignments.push((MorphismId::new(f), lambda));
                } else {
                    matched = false;
                    break;
                }
            }
            if !matched || assignments.len() != found.len() {
                return Ok(GeneralizationVerdict::Violated {
                    source: x.clone(),
                    target: y.clone(),
                    hom_size: hom.len(),
                    transformation_count: found.len(),
                });
            }
            pairs.push(PairBijection {
                source: x.clone(),
                target: y.clone(),
                hom,
                transformation_count: found.len(),
                assignments,
            });
        }
    }
    Ok(GeneralizationVerdict::Preserved {
        image: Box::new(image),
        pairs,
    })
}

/// Decoding result: the canonical choice plus every isomorphic candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub object: ObjectId,
    pub candidates: Vec<ObjectId>,
}

/// Inverts the embedding by exhaustive search: finds the objects of the
/// target category whose embedded functor is isomorphic to the table entry
/// at `x`, returning the first in canonical order along with the full
/// candidate set.
pub fn decode_object(
    map: &FeatureAlignedMap,
    x: &ObjectId,
    budget: u64,
) -> Result<DecodeResult, MultimodalError> {
    let target = map.functor().target();
    let entry = map.table_at(x)?;
    let mut candidates = Vec::new();
    for z in target.objects() {
        let embedded = yoneda_embed(target, z)?;
        if are_naturally_isomorphic(&embedded, entry, budget)?.is_some() {
            candidates.push(z.clone());
        }
    }
    match candidates.first() {
        Some(first) => Ok(DecodeResult {
            object: first.clone(),
            candidates,
        }),
        None => Err(MultimodalError::NoDecodableObject(x.clone())),
    }
}

/// A composable sequence of aligned maps: link `i` goes from the image
/// subcategory of link `i-1` (link 0 from the first category) into the next
/// category. Optionally tracks which final-stage objects count as seen
/// during training, for the novelty report.
#[derive(Debug, Clone)]
pub struct ChainSpec {
    categories: Vec<FinCategory>,
    links: Vec<FeatureAlignedMap>,
    training_subset: Option<BTreeSet<ObjectId>>,
}

impl ChainSpec {
    pub fn new(
        categories: Vec<FinCategory>,
        links: Vec<FeatureAlignedMap>,
        training_subset: Option<BTreeSet<ObjectId>>,
    ) -> Result<ChainSpec, MultimodalError> {
        if categories.len() < 2 || links.len() + 1 != categories.len() {
            return Err(MultimodalError::ChainShape(format!(
                "{} categories with {} links",
                categories.len(),
                links.len()
            )));
        }
        if links[0].functor().source() != &categories[0] {
            return Err(MultimodalError::ChainShape(
                "first link does not start at the first category".into(),
            ));
        }
        for (i, link) in links.iter().enumerate() {
            if link.functor().target() != &categories[i + 1] {
                return Err(MultimodalError::ChainShape(format!(
                    "link {i} does not land in category {}",
                    i + 1
                )));
            }
            if i > 0 {
                let expected = image_full_subcategory(links[i - 1].functor()).subcategory;
                if link.functor().source() != &expected {
                    return Err(MultimodalError::ChainShape(format!(
                        "link {i} does not start at the previous link's image subcategory"
                    )));
                }
            }
            let classification = classify_functor(link.functor());
            if !(classification.full && classification.embedding) {
                return Err(MultimodalError::ChainMismatch {
                    link: i,
                    reason: "functor is not a full embedding".into(),
                });
            }
        }
        if let Some(subset) = &training_subset {
            let last = categories.last().expect("checked non-empty");
            for z in subset {
                last.object_index(z)?;
            }
        }
        Ok(ChainSpec {
            categories,
            links,
            training_subset,
        })
    }

    pub fn categories(&self) -> &[FinCategory] {
        &self.categories
    }

    pub fn links(&self) -> &[FeatureAlignedMap] {
        &self.links
    }

    pub fn training_subset(&self) -> Option<&BTreeSet<ObjectId>> {
        self.training_subset.as_ref()
    }
}

/// End-to-end verdict for a chain.
#[derive(Debug)]
pub struct ChainReport {
    /// The composite aligned map from the first category into the last.
    pub composite: FeatureAlignedMap,
    /// The verified pair bijections of the composite map.
    pub image: SubcategoryWitness,
    pub pairs: Vec<PairBijection>,
    /// Decoded object per source object; equals the composite functor's
    /// value.
    pub decode: BTreeMap<ObjectId, ObjectId>,
    /// Decoded objects outside the training subset, when one was given.
    pub novel_decodes: Option<Vec<ObjectId>>,
}

/// Validates every link, composes the chain, and verifies that the first
/// category's structure survives to the last: pair bijections over the
/// final image subcategory and decode agreeing with the composite functor.
pub fn check_chain(spec: &ChainSpec, budget: u64) -> Result<ChainReport, MultimodalError> {
    // Per-link alignment, with failures attributed to their link.
    for (i, link) in spec.links().iter().enumerate() {
        match is_feature_aligned(link, budget)? {
            AlignmentVerdict::Aligned { .. } => {}
            AlignmentVerdict::Misaligned { object, .. } => {
                return Err(MultimodalError::ChainMismatch {
                    link: i,
                    reason: format!("table entry at {object} does not match the embedded image"),
                });
            }
        }
    }
    // Composite functor: corestrict every link onto its image, then include
    // the last image into the final category. The prefix (every link before
    // the final one) also keys the composite table lookup below, because the
    // final link's table is indexed by its own source objects.
    let links = spec.links();
    let mut prefix: Option<CatFunctor> = None;
    for (i, link) in links[..links.len() - 1].iter().enumerate() {
        let factored = factor_full_embedding(link.functor()).map_err(|e| {
            MultimodalError::ChainMismatch {
                link: i,
                reason: e.to_string(),
            }
        })?;
        prefix = Some(match prefix {
            None => factored.restriction,
            Some(prev) => compose_functors(&factored.restriction, &prev)?,
        });
    }
    let last_link = links.last().expect("chains have at least one link");
    let last_factored = factor_full_embedding(last_link.functor())?;
    let into_image = match &prefix {
        None => last_factored.restriction.clone(),
        Some(prev) => compose_functors(&last_factored.restriction, prev)?,
    };
    let composite_functor = compose_functors(&last_factored.inclusion, &into_image)?;

    // Composite table: the final link's entry at the final link's source
    // object that each starting object reaches.
    let mut table = BTreeMap::new();
    for x in spec.categories()[0].objects() {
        let key = match &prefix {
            None => x.clone(),
            Some(p) => p.apply_object(x)?.clone(),
        };
        table.insert(x.clone(), last_link.table_at(&key)?.clone());
    }
    let composite = FeatureAlignedMap::from_parts(composite_functor, table)?;

    let (image, pairs) = match check_generalization(&composite, budget)? {
        GeneralizationVerdict::Preserved { image, pairs } => (image, pairs),
        GeneralizationVerdict::Violated {
            source,
            target,
            hom_size,
            transformation_count,
        } => {
            return Err(MultimodalError::ChainMismatch {
                link: spec.links().len() - 1,
                reason: format!(
                    "composite loses structure at ({source}, {target}): \
                     {hom_size} morphisms against {transformation_count} transformations"
                ),
            });
        }
    };

    let mut decode = BTreeMap::new();
    for x in spec.categories()[0].objects() {
        let result = decode_object(&composite, x, budget)?;
        let expected = composite.functor().apply_object(x)?;
        if &result.object != expected && !result.candidates.contains(expected) {
            return Err(MultimodalError::ChainMismatch {
                link: spec.links().len() - 1,
                reason: format!(
                    "decode at {x} returned {} instead of {expected}",
                    result.object
                ),
            });
        }
        decode.insert(x.clone(), result.object);
    }
    let novel_decodes = spec.training_subset().map(|subset| {
        decode
            .values()
            .filter(|z| !subset.contains(*z))
            .cloned()
            .collect::<BTreeSet<ObjectId>>()
            .into_iter()
            .collect()
    });
    Ok(ChainReport {
        composite,
        image: *image,
        pairs,
        decode,
        novel_decodes,
    })
}
