//! Functors between finite categories, their classification, and the
//! factorization of full embeddings through their image.
//!
//! A functor is stored as total index maps on objects and morphisms,
//! validated on construction: endpoints, identities, and all composites
//! must be preserved. `factor_full_embedding` realizes the equivalence
//! between "full embedding" and "isomorphism onto a full subcategory
//! followed by its inclusion": it either returns both factors with the
//! composite identity checked, or the concrete obstruction.

use crate::category::{CategoryError, FinCategory, Morphism, MorphismId, ObjectId, ID_PREFIX};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FunctorError {
    #[error("no assignment for {role} {name:?}")]
    MissingAssignment { role: &'static str, name: String },
    #[error("{role} {name:?} is not in the {side} category")]
    UnknownName { role: &'static str, side: &'static str, name: String },
    #[error("morphism {f} maps to {image}, whose endpoints differ from the image of dom/cod of {f}")]
    EndpointMismatch { f: MorphismId, image: MorphismId },
    #[error("identity of {0} does not map to the identity of its image")]
    IdentityNotPreserved(ObjectId),
    #[error("composition not preserved on ({g} ∘ {f})")]
    CompositionNotPreserved { g: MorphismId, f: MorphismId },
    #[error("functors are not composable: inner target differs from outer source")]
    NotComposable,
    #[error("functor is not a full embedding: {0}")]
    NotFullEmbedding(FullEmbeddingObstruction),
    #[error(transparent)]
    Category(#[from] CategoryError),
}

/// Concrete reason a functor fails to be a full embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FullEmbeddingObstruction {
    /// Two distinct morphisms share an image.
    NotInjective { a: MorphismId, b: MorphismId, image: MorphismId },
    /// A morphism between image objects has no preimage.
    NotFull { x: ObjectId, y: ObjectId, missing: MorphismId },
}

impl std::fmt::Display for FullEmbeddingObstruction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FullEmbeddingObstruction::NotInjective { a, b, image } => {
                write!(f, "morphisms {a} and {b} both map to {image}")
            }
            FullEmbeddingObstruction::NotFull { x, y, missing } => {
                write!(f, "{missing} ∈ hom({x}, {y}) has no preimage")
            }
        }
    }
}

/// A validated functor between finite categories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatFunctor {
    source: FinCategory,
    target: FinCategory,
    on_objects: Vec<usize>,
    on_morphisms: Vec<usize>,
}

impl CatFunctor {
    /// Builds a functor from name tables and checks all functor laws.
    /// Assignments for identity morphisms may be omitted; they are filled
    /// in as the identities of the image objects.
    pub fn new(
        source: FinCategory,
        target: FinCategory,
        on_objects: &BTreeMap<String, String>,
        on_morphisms: &BTreeMap<String, String>,
    ) -> Result<CatFunctor, FunctorError> {
        for key in on_objects.keys() {
            if source.object_index(&ObjectId::new(key.clone())).is_err() {
                return Err(FunctorError::UnknownName {
                    role: "object",
                    side: "source",
                    name: key.clone(),
                });
            }
        }
        for key in on_morphisms.keys() {
            if source.morphism_index(&MorphismId::new(key.clone())).is_err() {
                return Err(FunctorError::UnknownName {
                    role: "morphism",
                    side: "source",
                    name: key.clone(),
                });
            }
        }

        let mut obj_map = Vec::with_capacity(source.object_count());
        for x in source.objects() {
            let image = on_objects.get(x.as_str()).ok_or(FunctorError::MissingAssignment {
                role: "object",
                name: x.as_str().to_string(),
            })?;
            let idx = target
                .object_index(&ObjectId::new(image.clone()))
                .map_err(|_| FunctorError::UnknownName {
                    role: "object",
                    side: "target",
                    name: image.clone(),
                })?;
            obj_map.push(idx);
        }

        let mut mor_map = Vec::with_capacity(source.morphism_count());
        for m in source.morphisms() {
            let image_name = match on_morphisms.get(m.name.as_str()) {
                Some(name) => name.clone(),
                None if source.is_identity(&m.name)? => {
                    let xi = obj_map[source.object_index(&m.dom)?];
                    format!("{ID_PREFIX}{}", target.objects()[xi])
                }
                None => {
                    return Err(FunctorError::MissingAssignment {
                        role: "morphism",
                        name: m.name.as_str().to_string(),
                    })
                }
            };
            let idx = target
                .morphism_index(&MorphismId::new(image_name.clone()))
                .map_err(|_| FunctorError::UnknownName {
                    role: "morphism",
                    side: "target",
                    name: image_name,
                })?;
            mor_map.push(idx);
        }

        let f = CatFunctor {
            source,
            target,
            on_objects: obj_map,
            on_morphisms: mor_map,
        };
        f.check_laws()?;
        Ok(f)
    }

    pub fn identity(c: FinCategory) -> CatFunctor {
        CatFunctor {
            on_objects: (0..c.object_count()).collect(),
            on_morphisms: (0..c.morphism_count()).collect(),
            source: c.clone(),
            target: c,
        }
    }

    fn check_laws(&self) -> Result<(), FunctorError> {
        for m in self.source.morphisms() {
            let image = self.apply_morphism_record(m);
            let want_dom = self.apply_object_unchecked(&m.dom);
            let want_cod = self.apply_object_unchecked(&m.cod);
            if &image.dom != want_dom || &image.cod != want_cod {
                return Err(FunctorError::EndpointMismatch {
                    f: m.name.clone(),
                    image: image.name.clone(),
                });
            }
        }
        for x in self.source.objects() {
            let id = self.source.identity_of(x)?;
            let image = self.apply_morphism_unchecked(id);
            let target_id = self.target.identity_of(self.apply_object_unchecked(x))?;
            if image != target_id {
                return Err(FunctorError::IdentityNotPreserved(x.clone()));
            }
        }
        for f in self.source.morphisms() {
            for g in self.source.morphisms() {
                if f.cod != g.dom {
                    continue;
                }
                let gf = self.source.compose(&g.name, &f.name)?;
                let lhs = self.apply_morphism_unchecked(gf);
                let rhs = self
                    .target
                    .compose(self.apply_morphism_unchecked(&g.name), self.apply_morphism_unchecked(&f.name))?;
                if lhs != rhs {
                    return Err(FunctorError::CompositionNotPreserved {
                        g: g.name.clone(),
                        f: f.name.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &FinCategory {
        &self.source
    }

    pub fn target(&self) -> &FinCategory {
        &self.target
    }

    fn apply_object_unchecked(&self, x: &ObjectId) -> &ObjectId {
        let i = self.source.object_index(x).expect("object of the source category");
        &self.target.objects()[self.on_objects[i]]
    }

    fn apply_morphism_unchecked(&self, f: &MorphismId) -> &MorphismId {
        let i = self.source.morphism_index(f).expect("morphism of the source category");
        &self.target.morphisms()[self.on_morphisms[i]].name
    }

    fn apply_morphism_record(&self, m: &Morphism) -> &Morphism {
        let i = self.source.morphism_index(&m.name).expect("morphism of the source category");
        &self.target.morphisms()[self.on_morphisms[i]]
    }

    pub fn apply_object(&self, x: &ObjectId) -> Result<&ObjectId, FunctorError> {
        let i = self.source.object_index(x)?;
        Ok(&self.target.objects()[self.on_objects[i]])
    }

    pub fn apply_morphism(&self, f: &MorphismId) -> Result<&MorphismId, FunctorError> {
        let i = self.source.morphism_index(f)?;
        Ok(&self.target.morphisms()[self.on_morphisms[i]].name)
    }

    pub fn object_map(&self) -> BTreeMap<String, String> {
        self.source
            .objects()
            .iter()
            .enumerate()
            .map(|(i, x)| {
                (x.as_str().to_string(), self.target.objects()[self.on_objects[i]].as_str().to_string())
            })
            .collect()
    }

    pub fn morphism_map(&self) -> BTreeMap<String, String> {
        self.source
            .morphisms()
            .iter()
            .enumerate()
            .map(|(i, m)| {
                (
                    m.name.as_str().to_string(),
                    self.target.morphisms()[self.on_morphisms[i]].name.as_str().to_string(),
                )
            })
            .collect()
    }
}

/// `compose_functors(outer, inner)` is outer ∘ inner; the inner target must
/// equal the outer source exactly.
pub fn compose_functors(outer: &CatFunctor, inner: &CatFunctor) -> Result<CatFunctor, FunctorError> {
    if inner.target != outer.source {
        return Err(FunctorError::NotComposable);
    }
    Ok(CatFunctor {
        source: inner.source.clone(),
        target: outer.target.clone(),
        on_objects: inner.on_objects.iter().map(|&i| outer.on_objects[i]).collect(),
        on_morphisms: inner.on_morphisms.iter().map(|&i| outer.on_morphisms[i]).collect(),
    })
}

/// Structural properties of a functor, with concrete counterexamples for
/// the properties that fail.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctorClassification {
    pub faithful: bool,
    pub full: bool,
    pub embedding: bool,
    pub injective_on_objects: bool,
    /// Distinct parallel morphisms with equal image, if faithfulness fails.
    pub faithfulness_witness: Option<(MorphismId, MorphismId)>,
    /// Unreached morphism between image objects, if fullness fails.
    pub fullness_witness: Option<(ObjectId, ObjectId, MorphismId)>,
    /// Distinct (not necessarily parallel) morphisms with equal image, if
    /// global injectivity fails.
    pub embedding_witness: Option<(MorphismId, MorphismId)>,
}

pub fn classify_functor(f: &CatFunctor) -> FunctorClassification {
    let src = &f.source;
    let tgt = &f.target;

    let mut embedding_witness = None;
    for (i, a) in src.morphisms().iter().enumerate() {
        for (j, b) in src.morphisms().iter().enumerate().skip(i + 1) {
            if f.on_morphisms[i] == f.on_morphisms[j] {
                embedding_witness = Some((a.name.clone(), b.name.clone()));
                break;
            }
        }
        if embedding_witness.is_some() {
            break;
        }
    }

    let mut faithfulness_witness = None;
    'faithful: for (i, a) in src.morphisms().iter().enumerate() {
        for (j, b) in src.morphisms().iter().enumerate().skip(i + 1) {
            if a.dom == b.dom && a.cod == b.cod && f.on_morphisms[i] == f.on_morphisms[j] {
                faithfulness_witness = Some((a.name.clone(), b.name.clone()));
                break 'faithful;
            }
        }
    }

    let mut fullness_witness = None;
    'full: for x in src.objects() {
        for y in src.objects() {
            let fx = f.apply_object_unchecked(x);
            let fy = f.apply_object_unchecked(y);
            let hom_src = src.hom(x, y).expect("source object");
            let image: Vec<&MorphismId> = hom_src
                .iter()
                .map(|name| f.apply_morphism_unchecked(&MorphismId::new(name)))
                .collect();
            let hom_tgt = tgt.hom(fx, fy).expect("target object");
            for h in hom_tgt.iter() {
                if !image.iter().any(|m| m.as_str() == h) {
                    fullness_witness = Some((x.clone(), y.clone(), MorphismId::new(h)));
                    break 'full;
                }
            }
        }
    }

    let mut injective_on_objects = true;
    for i in 0..src.object_count() {
        for j in (i + 1)..src.object_count() {
            if f.on_objects[i] == f.on_objects[j] {
                injective_on_objects = false;
            }
        }
    }

    FunctorClassification {
        faithful: faithfulness_witness.is_none(),
        full: fullness_witness.is_none(),
        embedding: embedding_witness.is_none(),
        injective_on_objects,
        faithfulness_witness,
        fullness_witness,
        embedding_witness,
    }
}

/// A subcategory presented with its inclusion into the ambient category.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcategoryWitness {
    pub ambient: FinCategory,
    pub subcategory: FinCategory,
    pub inclusion: CatFunctor,
    pub full: bool,
}

/// The full subcategory of `ambient` spanned by `objects` (every ambient
/// morphism between chosen objects is kept, in ambient declaration order).
pub fn full_subcategory(
    ambient: &FinCategory,
    objects: &[ObjectId],
) -> Result<SubcategoryWitness, CategoryError> {
    let mut keep = vec![false; ambient.object_count()];
    for x in objects {
        keep[ambient.object_index(x)?] = true;
    }
    let mut b = crate::category::CategoryBuilder::new();
    for (i, x) in ambient.objects().iter().enumerate() {
        if keep[i] {
            b = b.object(x.as_str());
        }
    }
    let kept_morphism = |m: &Morphism| -> bool {
        keep[ambient.object_index(&m.dom).expect("ambient object")]
            && keep[ambient.object_index(&m.cod).expect("ambient object")]
    };
    for m in ambient.morphisms() {
        if kept_morphism(m) && !ambient.is_identity(&m.name)? {
            b = b.morphism(m.name.as_str(), m.dom.as_str(), m.cod.as_str());
        }
    }
    for (g, f, h) in ambient.composition_entries() {
        if kept_morphism(g)
            && kept_morphism(f)
            && !ambient.is_identity(&g.name)?
            && !ambient.is_identity(&f.name)?
        {
            b = b.composite(f.name.as_str(), g.name.as_str(), h.name.as_str());
        }
    }
    let subcategory = b.build()?;
    let on_objects: BTreeMap<String, String> = subcategory
        .objects()
        .iter()
        .map(|x| (x.as_str().to_string(), x.as_str().to_string()))
        .collect();
    let on_morphisms: BTreeMap<String, String> = subcategory
        .morphisms()
        .iter()
        .map(|m| (m.name.as_str().to_string(), m.name.as_str().to_string()))
        .collect();
    let inclusion = CatFunctor::new(subcategory.clone(), ambient.clone(), &on_objects, &on_morphisms)
        .expect("inclusion of a full subcategory is a functor");
    Ok(SubcategoryWitness {
        ambient: ambient.clone(),
        subcategory,
        inclusion,
        full: true,
    })
}

/// The full subcategory of the target spanned by the image objects of `f`.
pub fn image_full_subcategory(f: &CatFunctor) -> SubcategoryWitness {
    let mut image: Vec<ObjectId> = Vec::new();
    for x in f.target.objects() {
        let hit = f
            .source
            .objects()
            .iter()
            .any(|s| f.apply_object_unchecked(s) == x);
        if hit {
            image.push(x.clone());
        }
    }
    full_subcategory(&f.target, &image).expect("image objects live in the target")
}

/// Splits a full embedding `F` as `E ∘ G` with `G` an isomorphism onto the
/// image full subcategory and `E` its inclusion. The composite identity is
/// re-checked before returning.
pub fn factor_full_embedding(f: &CatFunctor) -> Result<Factorization, FunctorError> {
    let classification = classify_functor(f);
    if let Some((a, b)) = classification.embedding_witness {
        let image = f.apply_morphism(&a)?.clone();
        return Err(FunctorError::NotFullEmbedding(FullEmbeddingObstruction::NotInjective {
            a,
            b,
            image,
        }));
    }
    if let Some((x, y, missing)) = classification.fullness_witness {
        return Err(FunctorError::NotFullEmbedding(FullEmbeddingObstruction::NotFull {
            x,
            y,
            missing,
        }));
    }

    let witness = image_full_subcategory(f);
    let on_objects = f.object_map();
    let on_morphisms = f.morphism_map();
    let restriction = CatFunctor::new(
        f.source.clone(),
        witness.subcategory.clone(),
        &on_objects,
        &on_morphisms,
    )?;
    let inclusion = witness.inclusion.clone();
    let composite = compose_functors(&inclusion, &restriction)?;
    debug_assert_eq!(&composite, f);
    if &composite != f {
        return Err(FunctorError::NotComposable);
    }
    Ok(Factorization {
        restriction,
        inclusion,
        witness,
    })
}

/// The two factors of a full embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    /// Isomorphism of categories onto the image full subcategory.
    pub restriction: CatFunctor,
    /// Inclusion of the image full subcategory into the target.
    pub inclusion: CatFunctor,
    pub witness: SubcategoryWitness,
}

/// If `f` is bijective on objects and morphisms, returns its inverse
/// functor (validated); otherwise `None`.
pub fn is_isomorphism_of_categories(f: &CatFunctor) -> Option<CatFunctor> {
    let obj_bij = {
        let mut hit = vec![false; f.target.object_count()];
        for &i in &f.on_objects {
            if hit[i] {
                return None;
            }
            hit[i] = true;
        }
        hit.iter().all(|&h| h)
    };
    let mor_bij = {
        let mut hit = vec![false; f.target.morphism_count()];
        for &i in &f.on_morphisms {
            if hit[i] {
                return None;
            }
            hit[i] = true;
        }
        hit.iter().all(|&h| h)
    };
    if !obj_bij || !mor_bij {
        return None;
    }
    let on_objects: BTreeMap<String, String> = f
        .source
        .objects()
        .iter()
        .enumerate()
        .map(|(i, x)| {
            (
                f.target.objects()[f.on_objects[i]].as_str().to_string(),
                x.as_str().to_string(),
            )
        })
        .collect();
    let on_morphisms: BTreeMap<String, String> = f
        .source
        .morphisms()
        .iter()
        .enumerate()
        .map(|(i, m)| {
            (
                f.target.morphisms()[f.on_morphisms[i]].name.as_str().to_string(),
                m.name.as_str().to_string(),
            )
        })
        .collect();
    CatFunctor::new(f.target.clone(), f.source.clone(), &on_objects, &on_morphisms).ok()
}
