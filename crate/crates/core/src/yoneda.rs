//! Representable set-valued functors and what they decide.
//!
//! The embedding sends an object X to the functor `hom(-, X)` acting by
//! precomposition. This module certifies, by exhaustive enumeration, the
//! bijection between transformations out of an embedded object and the
//! target functor's value at that object, then uses it to answer concrete
//! questions: which functors are representable, what a representing object
//! recovers on each input, and whether a hom-preserving feature assignment
//! really preserves every hom-set.
//!
//! Theorems are never assumed: every certified record is rebuilt from both
//! directions and cross-checked, and a failed cross-check surfaces as an
//! error that signals a bug in this crate rather than a property of the
//! input.

use crate::category::{CategoryError, FinCategory, MorphismId, ObjectId};
use crate::finset::{FinSet, SetFunction};
use crate::presheaf::{
    are_naturally_isomorphic, enumerate_nat_transformations, NatTransformation, PresheafError,
    SetFunctor, Variance,
};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum YonedaError {
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error("the functor must be contravariant over the given category")]
    TaskNotContravariant,
    #[error("bijection certificate failed at {object}: {reason} (implementation bug)")]
    BijectionBroken { object: ObjectId, reason: String },
    #[error(
        "answer routes disagree for prompt {prompt} on input {input}: \
         enumeration gave {via_enumeration:?}, hom lookup gave {via_hom:?} (implementation bug)"
    )]
    InternalDisagreement {
        prompt: ObjectId,
        input: ObjectId,
        via_enumeration: FinSet,
        via_hom: FinSet,
    },
    #[error("feature assignment is not hom-preserving at ({x}, {y}): expected {expected:?}, got {got:?}")]
    NotIdeal {
        x: ObjectId,
        y: ObjectId,
        expected: FinSet,
        got: FinSet,
    },
    #[error("feature token is not one the model issued: {0}")]
    UnknownToken(String),
}

/// The contravariant functor `hom(-, X)`: value `hom(Y, X)` at each object
/// `Y`, morphisms acting by precomposition.
pub fn yoneda_embed(c: &FinCategory, x: &ObjectId) -> Result<SetFunctor, YonedaError> {
    c.object_index(x)?;
    let mut on_objects = Vec::with_capacity(c.object_count());
    for y in c.objects() {
        on_objects.push(c.hom(y, x)?);
    }
    let mut on_morphisms = Vec::with_capacity(c.morphism_count());
    for m in c.morphisms() {
        let src = &on_objects[c.object_index(&m.cod)?];
        let tgt = &on_objects[c.object_index(&m.dom)?];
        let mut map = Vec::with_capacity(src.len());
        for g in src.iter() {
            let composite = c.compose(&MorphismId::new(g), &m.name)?;
            let idx = tgt.index_of(composite.as_str()).ok_or_else(|| {
                YonedaError::BijectionBroken {
                    object: x.clone(),
                    reason: format!("precomposite {composite} escaped its hom-set"),
                }
            })?;
            map.push(idx);
        }
        on_morphisms.push(
            SetFunction::from_indices(src.clone(), tgt.clone(), map)
                .expect("precomposition maps are total"),
        );
    }
    Ok(SetFunctor::from_parts(
        c.clone(),
        Variance::Contravariant,
        on_objects,
        on_morphisms,
    )?)
}

/// The embedding's action on a morphism `w: X → X'`: the natural
/// transformation `hom(-, X) → hom(-, X')` whose components postcompose
/// with `w`.
pub fn yoneda_embed_morphism(
    c: &FinCategory,
    w: &MorphismId,
) -> Result<NatTransformation, YonedaError> {
    let m = &c.morphisms()[c.morphism_index(w)?];
    let (dom, cod) = (m.dom.clone(), m.cod.clone());
    let h_dom = yoneda_embed(c, &dom)?;
    let h_cod = yoneda_embed(c, &cod)?;
    let mut components = Vec::with_capacity(c.object_count());
    for y in c.objects() {
        let src = h_dom.value(y)?;
        let tgt = h_cod.value(y)?;
        let mut map = Vec::with_capacity(src.len());
        for g in src.iter() {
            let composite = c.compose(w, &MorphismId::new(g))?;
            let idx = tgt.index_of(composite.as_str()).ok_or_else(|| {
                YonedaError::BijectionBroken {
                    object: y.clone(),
                    reason: format!("postcomposite {composite} escaped its hom-set"),
                }
            })?;
            map.push(idx);
        }
        components.push(
            SetFunction::from_indices(src.clone(), tgt.clone(), map)
                .expect("postcomposition maps are total"),
        );
    }
    Ok(NatTransformation::new(h_dom, h_cod, components)?)
}

/// The covariant functor `hom(X, -)`: value `hom(X, Y)` at each object `Y`,
/// morphisms acting by postcomposition.
pub fn corepresentable(c: &FinCategory, x: &ObjectId) -> Result<SetFunctor, YonedaError> {
    c.object_index(x)?;
    let mut on_objects = Vec::with_capacity(c.object_count());
    for y in c.objects() {
        on_objects.push(c.hom(x, y)?);
    }
    let mut on_morphisms = Vec::with_capacity(c.morphism_count());
    for m in c.morphisms() {
        let src = &on_objects[c.object_index(&m.dom)?];
        let tgt = &on_objects[c.object_index(&m.cod)?];
        let mut map = Vec::with_capacity(src.len());
        for g in src.iter() {
            let composite = c.compose(&m.name, &MorphismId::new(g))?;
            let idx = tgt.index_of(composite.as_str()).ok_or_else(|| {
                YonedaError::BijectionBroken {
                    object: x.clone(),
                    reason: format!("postcomposite {composite} escaped its hom-set"),
                }
            })?;
            map.push(idx);
        }
        on_morphisms.push(
            SetFunction::from_indices(src.clone(), tgt.clone(), map)
                .expect("postcomposition maps are total"),
        );
    }
    Ok(SetFunctor::from_parts(
        c.clone(),
        Variance::Covariant,
        on_objects,
        on_morphisms,
    )?)
}

/// A certified one-to-one correspondence between the transformations out of
/// an embedded object and the target functor's value at that object.
/// Construction re-derives both directions and cross-checks them.
#[derive(Debug, Clone)]
pub struct YonedaBijection {
    object: ObjectId,
    pairs: Vec<(NatTransformation, String)>,
}

impl YonedaBijection {
    pub fn object(&self) -> &ObjectId {
        &self.object
    }

    /// Transformation/element pairs in canonical enumeration order.
    pub fn pairs(&self) -> &[(NatTransformation, String)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The element a transformation corresponds to.
    pub fn element_for(&self, t: &NatTransformation) -> Option<&str> {
        self.pairs.iter().find(|(u, _)| u == t).map(|(_, e)| e.as_str())
    }

    /// The transformation an element corresponds to.
    pub fn transformation_for(&self, element: &str) -> Option<&NatTransformation> {
        self.pairs.iter().find(|(_, e)| e == element).map(|(t, _)| t)
    }
}

/// The transformation `hom(-, X) → A` induced by an element of `A(X)`:
/// component at `Y` sends `g` to `A(g)(element)`.
fn induced_transformation(
    c: &FinCategory,
    x: &ObjectId,
    h_x: &SetFunctor,
    a: &SetFunctor,
    element: &str,
) -> Result<NatTransformation, YonedaError> {
    let elem_idx = a
        .value(x)?
        .index_of(element)
        .ok_or_else(|| YonedaError::BijectionBroken {
            object: x.clone(),
            reason: format!("element {element} is not in the functor's value at {x}"),
        })?;
    let mut components = Vec::with_capacity(c.object_count());
    for y in c.objects() {
        let src = h_x.value(y)?;
        let tgt = a.value(y)?;
        let mut map = Vec::with_capacity(src.len());
        for g in src.iter() {
            map.push(a.action(&MorphismId::new(g))?.apply_index(elem_idx));
        }
        components.push(
            SetFunction::from_indices(src.clone(), tgt.clone(), map)
                .expect("actions land in the functor's values"),
        );
    }
    Ok(NatTransformation::new(h_x.clone(), a.clone(), components)?)
}

/// Certifies that evaluation at the identity is a bijection between
/// transformations `hom(-, X) → A` and `A(X)`, returning the full pairing.
/// A broken certificate reports an implementation bug, not an input
/// property.
pub fn yoneda_bijection(
    c: &FinCategory,
    x: &ObjectId,
    a: &SetFunctor,
    budget: u64,
) -> Result<YonedaBijection, YonedaError> {
    if a.base() != c {
        return Err(PresheafError::BaseMismatch.into());
    }
    if a.variance() != Variance::Contravariant {
        return Err(YonedaError::TaskNotContravariant);
    }
    let h_x = yoneda_embed(c, x)?;
    let id_x = c.identity_of(x)?.clone();
    let transformations = enumerate_nat_transformations(&h_x, a, budget)?;
    let broken = |reason: String| YonedaError::BijectionBroken {
        object: x.clone(),
        reason,
    };
    let mut pairs = Vec::with_capacity(transformations.len());
    let mut seen: Vec<&str> = Vec::new();
    for t in &transformations {
        let image = t.component(x)?.apply(id_x.as_str()).map_err(|e| broken(e.to_string()))?;
        pairs.push((t.clone(), image.to_string()));
    }
    for (_, image) in &pairs {
        if seen.contains(&image.as_str()) {
            return Err(broken(format!("two transformations evaluate to {image}")));
        }
        seen.push(image);
    }
    let value = a.value(x)?;
    if pairs.len() != value.len() {
        return Err(broken(format!(
            "{} transformations against {} elements",
            pairs.len(),
            value.len()
        )));
    }
    for e in value.iter() {
        let induced = induced_transformation(c, x, &h_x, a, e)?;
        match pairs.iter().find(|(t, _)| t == &induced) {
            Some((_, image)) if image == e => {}
            Some((_, image)) => {
                return Err(broken(format!(
                    "inverse of {e} evaluates back to {image}"
                )));
            }
            None => {
                return Err(broken(format!(
                    "transformation induced by {e} was not enumerated"
                )));
            }
        }
    }
    Ok(YonedaBijection {
        object: x.clone(),
        pairs,
    })
}

/// Searches, in canonical object order, for an object whose embedded functor
/// is naturally isomorphic to `t`; returns the first hit with its witness.
pub fn find_representative(
    c: &FinCategory,
    t: &SetFunctor,
    budget: u64,
) -> Result<Option<(ObjectId, NatTransformation)>, YonedaError> {
    if t.base() != c {
        return Err(PresheafError::BaseMismatch.into());
    }
    if t.variance() != Variance::Contravariant {
        return Err(YonedaError::TaskNotContravariant);
    }
    for x in c.objects() {
        let h_x = yoneda_embed(c, x)?;
        if let Some(iso) = are_naturally_isomorphic(&h_x, t, budget)? {
            return Ok(Some((x.clone(), iso)));
        }
    }
    Ok(None)
}

/// The answer a representable model gives on `input` when prompted with
/// `prompt`: computed by enumerating transformations between the two
/// embedded functors and relabeling through the certified bijection, then
/// cross-checked against the direct hom-set. The two routes disagreeing is
/// an implementation bug, surfaced as an error.
pub fn prompt_solve(
    c: &FinCategory,
    prompt: &ObjectId,
    input: &ObjectId,
    budget: u64,
) -> Result<FinSet, YonedaError> {
    let h_prompt = yoneda_embed(c, prompt)?;
    let bijection = yoneda_bijection(c, input, &h_prompt, budget)?;
    let names: Vec<String> = bijection.pairs().iter().map(|(_, e)| e.clone()).collect();
    let via_hom = c.hom(input, prompt)?;
    let via_enumeration = FinSet::new(names).map_err(|_| YonedaError::InternalDisagreement {
        prompt: prompt.clone(),
        input: input.clone(),
        via_enumeration: FinSet::empty(),
        via_hom: via_hom.clone(),
    })?;
    if !via_enumeration.same_elements(&via_hom) {
        return Err(YonedaError::InternalDisagreement {
            prompt: prompt.clone(),
            input: input.clone(),
            via_enumeration,
            via_hom,
        });
    }
    Ok(via_hom)
}

/// Why a candidate prompt fails to solve a task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnsolvableWitness {
    /// The embedded functor and the task have different value sizes at
    /// `object`; no isomorphism can exist there.
    CardinalityMismatch {
        object: ObjectId,
        task_size: usize,
        prompt_size: usize,
    },
    /// Value sizes agree everywhere, yet the exhaustive isomorphism search
    /// over component families came back empty.
    NoNaturalIso,
}

/// Verdict of the prompt-solvability decision.
#[derive(Debug, Clone)]
pub enum PromptVerdict {
    /// `prompt` represents the task; `iso` is the natural isomorphism from
    /// the embedded functor onto it.
    Solvable {
        prompt: ObjectId,
        iso: Box<NatTransformation>,
    },
    /// No object represents the task; every candidate prompt carries an
    /// independently checkable witness.
    Unsolvable {
        witnesses: BTreeMap<ObjectId, UnsolvableWitness>,
    },
}

/// Decides whether some object's embedded functor is naturally isomorphic
/// to the task. Solvable verdicts re-verify the answer on every input
/// through both computation routes; unsolvable verdicts exhibit one witness
/// per candidate prompt.
pub fn check_prompt_theorem(
    c: &FinCategory,
    task: &SetFunctor,
    budget: u64,
) -> Result<PromptVerdict, YonedaError> {
    match find_representative(c, task, budget)? {
        Some((prompt, iso)) => {
            for input in c.objects() {
                let answer = prompt_solve(c, &prompt, input, budget)?;
                let component = iso.component(input)?;
                if !component.is_bijection() || !component.source().same_elements(&answer) {
                    return Err(YonedaError::BijectionBroken {
                        object: input.clone(),
                        reason: "representative's witness does not match the prompt answer".into(),
                    });
                }
            }
            Ok(PromptVerdict::Solvable {
                prompt,
                iso: Box::new(iso),
            })
        }
        None => {
            let mut witnesses = BTreeMap::new();
            for p in c.objects() {
                let witness = c
                    .objects()
                    .iter()
                    .find_map(|y| {
                        let prompt_size = c.hom(y, p).ok()?.len();
                        let task_size = task.value(y).ok()?.len();
                        (task_size != prompt_size).then(|| UnsolvableWitness::CardinalityMismatch {
                            object: y.clone(),
                            task_size,
                            prompt_size,
                        })
                    })
                    .unwrap_or(UnsolvableWitness::NoNaturalIso);
                witnesses.insert(p.clone(), witness);
            }
            Ok(PromptVerdict::Unsolvable { witnesses })
        }
    }
}

/// What a model hands out for an object: either a set-valued functor (the
/// embedded image) or an opaque identifier carrying the incoming hom-sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeatureToken {
    Presheaf(Box<SetFunctor>),
    Table {
        id: String,
        hom_in: BTreeMap<ObjectId, FinSet>,
    },
}

/// A feature assignment over a category together with the pairing that
/// recovers hom-sets from tokens.
#[derive(Debug, Clone)]
pub struct IdealModel {
    category: FinCategory,
    tokens: Vec<FeatureToken>,
}

impl IdealModel {
    /// The embedding-backed model: every token is the object's embedded
    /// functor, and the pairing enumerates transformations between tokens.
    pub fn yoneda(c: &FinCategory) -> Result<IdealModel, YonedaError> {
        let tokens = c
            .objects()
            .iter()
            .map(|x| Ok(FeatureToken::Presheaf(Box::new(yoneda_embed(c, x)?))))
            .collect::<Result<Vec<_>, YonedaError>>()?;
        Ok(IdealModel {
            category: c.clone(),
            tokens,
        })
    }

    /// The table-backed model: every token stores its object's incoming
    /// hom-sets directly.
    pub fn tabular(c: &FinCategory) -> Result<IdealModel, YonedaError> {
        let tokens = c
            .objects()
            .iter()
            .map(|x| {
                let hom_in = c
                    .objects()
                    .iter()
                    .map(|y| Ok((y.clone(), c.hom(y, x)?)))
                    .collect::<Result<BTreeMap<_, _>, YonedaError>>()?;
                Ok(FeatureToken::Table {
                    id: x.as_str().to_string(),
                    hom_in,
                })
            })
            .collect::<Result<Vec<_>, YonedaError>>()?;
        Ok(IdealModel {
            category: c.clone(),
            tokens,
        })
    }

    /// Replaces the token issued for one object, for fault injection in
    /// tests and demos.
    pub fn with_override(mut self, x: &ObjectId, token: FeatureToken) -> Result<IdealModel, YonedaError> {
        let i = self.category.object_index(x)?;
        self.tokens[i] = token;
        Ok(self)
    }

    pub fn category(&self) -> &FinCategory {
        &self.category
    }

    pub fn token(&self, x: &ObjectId) -> Result<&FeatureToken, YonedaError> {
        Ok(&self.tokens[self.category.object_index(x)?])
    }

    /// Which object a token was issued for, by literal comparison against
    /// the model's own assignment.
    fn issuing_object(&self, token: &FeatureToken) -> Result<&ObjectId, YonedaError> {
        self.tokens
            .iter()
            .position(|t| t == token)
            .map(|i| &self.category.objects()[i])
            .ok_or_else(|| match token {
                FeatureToken::Presheaf(_) => {
                    YonedaError::UnknownToken("a functor token the model never issued".into())
                }
                FeatureToken::Table { id, .. } => YonedaError::UnknownToken(id.clone()),
            })
    }

    /// The pairing: evaluates the second token at the first token's issuing
    /// object, recovering a hom-set candidate.
    pub fn hom_eval(
        &self,
        first: &FeatureToken,
        second: &FeatureToken,
        budget: u64,
    ) -> Result<FinSet, YonedaError> {
        let x = self.issuing_object(first)?.clone();
        match second {
            FeatureToken::Presheaf(p) => {
                let bijection = yoneda_bijection(&self.category, &x, p, budget)?;
                let names: Vec<String> =
                    bijection.pairs().iter().map(|(_, e)| e.clone()).collect();
                FinSet::new(names).map_err(|e| YonedaError::BijectionBroken {
                    object: x,
                    reason: e.to_string(),
                })
            }
            FeatureToken::Table { id, hom_in } => hom_in.get(&x).cloned().ok_or_else(|| {
                YonedaError::UnknownToken(format!("token {id} carries no entry for {x}"))
            }),
        }
    }

    /// Checks that the pairing recovers `hom(X, Y)` on every ordered pair of
    /// objects, up to element names.
    pub fn verify_ideal(&self, budget: u64) -> Result<(), YonedaError> {
        for x in self.category.objects() {
            for y in self.category.objects() {
                let got = self.hom_eval(self.token(x)?, self.token(y)?, budget)?;
                let expected = self.category.hom(x, y)?;
                if !got.same_elements(&expected) {
                    return Err(YonedaError::NotIdeal {
                        x: x.clone(),
                        y: y.clone(),
                        expected,
                        got,
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::CategoryBuilder;
    use crate::presheaf::{constant_functor, relabel_functor};
    use crate::DEFAULT_ENUMERATION_BUDGET as BUDGET;

    fn arrow() -> FinCategory {
        CategoryBuilder::new()
            .object("A")
            .object("B")
            .morphism("f", "A", "B")
            .build()
            .unwrap()
    }

    fn involution() -> FinCategory {
        CategoryBuilder::new()
            .object("Z")
            .morphism("e", "Z", "Z")
            .composite("e", "e", "id_Z")
            .build()
            .unwrap()
    }

    #[test]
    fn embedding_reads_off_hom_sets() {
        let c = arrow();
        let ha = yoneda_embed(&c, &"A".into()).unwrap();
        assert_eq!(ha.value(&"A".into()).unwrap().elements(), ["id_A"]);
        assert!(ha.value(&"B".into()).unwrap().is_empty());
        let hb = yoneda_embed(&c, &"B".into()).unwrap();
        assert_eq!(hb.value(&"A".into()).unwrap().elements(), ["f"]);
        assert_eq!(hb.value(&"B".into()).unwrap().elements(), ["id_B"]);
        assert_eq!(hb.action(&"f".into()).unwrap().apply("id_B").unwrap(), "f");
        assert!(yoneda_embed(&c, &"C".into()).is_err());
    }

    #[test]
    fn bijection_certificate_on_the_arrow_category() {
        let c = arrow();
        let hb = yoneda_embed(&c, &"B".into()).unwrap();
        let record = yoneda_bijection(&c, &"A".into(), &hb, BUDGET).unwrap();
        assert_eq!(record.len(), 1);
        assert_eq!(record.pairs()[0].1, "f");
    }

    #[test]
    fn bijection_sends_the_identity_transformation_to_the_identity() {
        let c = involution();
        let hz = yoneda_embed(&c, &"Z".into()).unwrap();
        let record = yoneda_bijection(&c, &"Z".into(), &hz, BUDGET).unwrap();
        assert_eq!(record.len(), 2);
        let ident = NatTransformation::identity(&hz);
        assert_eq!(record.element_for(&ident), Some("id_Z"));
    }

    #[test]
    fn prompt_answers_agree_with_hom_sets() {
        let c = arrow();
        let answer = prompt_solve(&c, &"B".into(), &"A".into(), BUDGET).unwrap();
        assert_eq!(answer.elements(), ["f"]);
        let reflexive = prompt_solve(&c, &"A".into(), &"A".into(), BUDGET).unwrap();
        assert!(reflexive.contains("id_A"));
    }

    #[test]
    fn representative_search_walks_canonical_order() {
        let c = arrow();
        let hb = yoneda_embed(&c, &"B".into()).unwrap();
        let (object, iso) = find_representative(&c, &hb, BUDGET).unwrap().unwrap();
        assert_eq!(object, "B".into());
        assert!(iso.is_iso());
        let relabeled = relabel_functor(&hb, |_, e| format!("elem_{e}")).unwrap();
        let (object, _) = find_representative(&c, &relabeled, BUDGET).unwrap().unwrap();
        assert_eq!(object, "B".into());
    }

    #[test]
    fn unrepresentable_task_with_a_cardinality_obstruction() {
        let c = arrow();
        // Values A↦{x,y}, B↦{z}, action of f sends z ↦ x.
        let values = [
            ("A".to_string(), vec!["x".to_string(), "y".to_string()]),
            ("B".to_string(), vec!["z".to_string()]),
        ]
        .into_iter()
        .collect();
        let actions = [(
            "f".to_string(),
            [("z".to_string(), "x".to_string())].into_iter().collect(),
        )]
        .into_iter()
        .collect();
        let task =
            SetFunctor::from_tables(c.clone(), Variance::Contravariant, &values, &actions).unwrap();
        assert!(find_representative(&c, &task, BUDGET).unwrap().is_none());
        let verdict = check_prompt_theorem(&c, &task, BUDGET).unwrap();
        let PromptVerdict::Unsolvable { witnesses } = verdict else {
            panic!("task must be unsolvable");
        };
        assert_eq!(witnesses.len(), 2);
        assert_eq!(
            witnesses[&"A".into()],
            UnsolvableWitness::CardinalityMismatch {
                object: "A".into(),
                task_size: 2,
                prompt_size: 1,
            }
        );
        match &witnesses[&"B".into()] {
            UnsolvableWitness::CardinalityMismatch { task_size, prompt_size, .. } => {
                assert_ne!(task_size, prompt_size);
            }
            w => panic!("expected a cardinality witness, got {w:?}"),
        }
    }

    #[test]
    fn unrepresentable_task_needs_the_exhaustive_witness() {
        // Trivial two-element action on the involution category: sizes match
        // the embedded functor everywhere, yet no natural isomorphism exists.
        let c = involution();
        let two = FinSet::new(["0", "1"]).unwrap();
        let task = constant_functor(c.clone(), Variance::Contravariant, two).unwrap();
        let verdict = check_prompt_theorem(&c, &task, BUDGET).unwrap();
        let PromptVerdict::Unsolvable { witnesses } = verdict else {
            panic!("task must be unsolvable");
        };
        assert_eq!(witnesses[&"Z".into()], UnsolvableWitness::NoNaturalIso);
        // The witness re-checks: the exhaustive search really is empty.
        let hz = yoneda_embed(&c, &"Z".into()).unwrap();
        assert!(are_naturally_isomorphic(&hz, &task, BUDGET).unwrap().is_none());
    }

    #[test]
    fn solvable_verdict_returns_the_representing_prompt() {
        let c = arrow();
        let ha = yoneda_embed(&c, &"A".into()).unwrap();
        let verdict = check_prompt_theorem(&c, &ha, BUDGET).unwrap();
        let PromptVerdict::Solvable { prompt, iso } = verdict else {
            panic!("embedded functors are solvable");
        };
        assert_eq!(prompt, "A".into());
        assert!(iso.is_iso());
    }

    #[test]
    fn both_ideal_models_verify_and_faults_are_localized() {
        let c = arrow();
        IdealModel::yoneda(&c).unwrap().verify_ideal(BUDGET).unwrap();
        IdealModel::tabular(&c).unwrap().verify_ideal(BUDGET).unwrap();

        let corrupted_token = FeatureToken::Table {
            id: "B".into(),
            hom_in: [
                (ObjectId::new("A"), FinSet::empty()),
                (ObjectId::new("B"), FinSet::new(["id_B"]).unwrap()),
            ]
            .into_iter()
            .collect(),
        };
        let corrupted = IdealModel::tabular(&c)
            .unwrap()
            .with_override(&"B".into(), corrupted_token)
            .unwrap();
        let err = corrupted.verify_ideal(BUDGET).unwrap_err();
        assert_eq!(
            err,
            YonedaError::NotIdeal {
                x: "A".into(),
                y: "B".into(),
                expected: FinSet::new(["f"]).unwrap(),
                got: FinSet::empty(),
            }
        );
    }

    #[test]
    fn mixed_token_kinds_still_pair() {
        let c = arrow();
        let tabular_b = IdealModel::tabular(&c).unwrap().token(&"B".into()).unwrap().clone();
        let mixed = IdealModel::yoneda(&c)
            .unwrap()
            .with_override(&"B".into(), tabular_b)
            .unwrap();
        mixed.verify_ideal(BUDGET).unwrap();
        let err = mixed
            .hom_eval(
                &FeatureToken::Table {
                    id: "stray".into(),
                    hom_in: BTreeMap::new(),
                },
                mixed.token(&"A".into()).unwrap(),
                BUDGET,
            )
            .unwrap_err();
        assert_eq!(err, YonedaError::UnknownToken("stray".into()));
    }
}
