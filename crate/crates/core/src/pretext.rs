//! Builders that turn self-supervision setups into finite categories:
//! rotation orbits, similarity graphs, masked splits, and bounded-window
//! language models.
//!
//! Every builder output goes through the full category validator, so the
//! constructions either satisfy all axioms or fail loudly. Probability mass
//! is exact rational arithmetic throughout; nothing here rounds.

use crate::category::{CategoryBuilder, CategoryError, FinCategory, MorphismId, ObjectId};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PretextError {
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error("input must contain {0}")]
    EmptyInput(&'static str),
    #[error("weight for ({a}, {b}) conflicts with the weight for ({b}, {a})")]
    AsymmetricWeight { a: String, b: String },
    #[error("weight for ({a}, {b}) is negative")]
    NegativeWeight { a: String, b: String },
    #[error("self-similarity weight at {0} is not allowed here")]
    SelfLoopDisallowed(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("a composable pair from {from} through {via} has no morphism to land on in hom({from}, {to})")]
    ComposabilityConflict {
        from: ObjectId,
        via: ObjectId,
        to: ObjectId,
    },
    #[error("part name {0} appears both as a revealed part and as a mask")]
    PartNameOnBothSides(String),
    #[error("full object {0} splits into two identical parts")]
    DegenerateSplit(String),
    #[error("full object {0} is declared twice")]
    DuplicateFullObject(String),
    #[error("category does not have the revealed-to-mask shape: {0}")]
    NotMaskShaped(String),
    #[error("unknown token {0:?}")]
    UnknownToken(String),
    #[error("sentence {sentence:?} does not have window length {expected}")]
    WrongSentenceLength { sentence: String, expected: usize },
    #[error("distribution for {context} has mass {mass} instead of exactly 1")]
    MassNotOne { context: String, mass: String },
    #[error("distribution entry {0:?} has non-positive mass")]
    NonPositiveMass(String),
    #[error("no transition distribution is defined for sentence {0:?}")]
    UndefinedTransition(String),
    #[error("successor sequence returns to an earlier distribution (object {object_index}); the path category would be infinite")]
    SuccessorCycle { object_index: usize },
    #[error("object budget exceeded: the closure needs at least {required} objects, cap is {cap}")]
    ObjectBudgetExceeded { required: usize, cap: usize },
}

const DEGREES: [u16; 4] = [0, 90, 180, 270];

/// A groupoid of image rotations: `n_base_images` disjoint orbits of four
/// objects each, one morphism per rotation within an orbit, composition by
/// adding angles mod 360.
pub fn build_rotation_category(n_base_images: usize) -> Result<FinCategory, PretextError> {
    if n_base_images == 0 {
        return Err(PretextError::EmptyInput("at least one base image"));
    }
    let object = |i: usize, d: u16| format!("img{i}_deg{d}");
    let rotation = |i: usize, delta: u16, at: u16| format!("img{i}_rot{delta}_at{at}");
    let mut b = CategoryBuilder::new();
    for i in 0..n_base_images {
        for d in DEGREES {
            b = b.object(object(i, d));
        }
    }
    for i in 0..n_base_images {
        for d1 in DEGREES {
            for delta in [90u16, 180, 270] {
                b = b.morphism(rotation(i, delta, d1), object(i, d1), object(i, (d1 + delta) % 360));
            }
        }
    }
    for i in 0..n_base_images {
        for d1 in DEGREES {
            for delta1 in [90u16, 180, 270] {
                for delta2 in [90u16, 180, 270] {
                    let d2 = (d1 + delta1) % 360;
                    let total = (delta1 + delta2) % 360;
                    let equals = if total == 0 {
                        format!("id_{}", object(i, d1))
                    } else {
                        rotation(i, total, d1)
                    };
                    b = b.composite(rotation(i, delta1, d1), rotation(i, delta2, d2), equals);
                }
            }
        }
    }
    Ok(b.build()?)
}

/// A symmetric, non-negatively weighted graph over named nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    nodes: Vec<String>,
    // Key (i, j) with i <= j over node indices.
    weights: BTreeMap<(usize, usize), BigRational>,
    allow_self_loops: bool,
}

impl WeightedGraph {
    pub fn new(
        nodes: Vec<String>,
        entries: impl IntoIterator<Item = (String, String, BigRational)>,
        allow_self_loops: bool,
    ) -> Result<WeightedGraph, PretextError> {
        if nodes.is_empty() {
            return Err(PretextError::EmptyInput("at least one node"));
        }
        let index: BTreeMap<&str, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        if index.len() != nodes.len() {
            return Err(PretextError::EmptyInput("distinct node names"));
        }
        let mut weights = BTreeMap::new();
        for (a, b, w) in entries {
            let ia = *index.get(a.as_str()).ok_or_else(|| PretextError::UnknownNode(a.clone()))?;
            let ib = *index.get(b.as_str()).ok_or_else(|| PretextError::UnknownNode(b.clone()))?;
            if w < BigRational::zero() {
                return Err(PretextError::NegativeWeight { a, b });
            }
            if ia == ib && !allow_self_loops && !w.is_zero() {
                return Err(PretextError::SelfLoopDisallowed(a));
            }
            let key = (ia.min(ib), ia.max(ib));
            match weights.get(&key) {
                Some(existing) if existing != &w => {
                    return Err(PretextError::AsymmetricWeight { a, b });
                }
                _ => {
                    weights.insert(key, w);
                }
            }
        }
        Ok(WeightedGraph {
            nodes,
            weights,
            allow_self_loops,
        })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn allow_self_loops(&self) -> bool {
        self.allow_self_loops
    }

    pub(crate) fn weight_by_index(&self, i: usize, j: usize) -> BigRational {
        self.weights
            .get(&(i.min(j), i.max(j)))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn weight(&self, a: &str, b: &str) -> Result<BigRational, PretextError> {
        let ia = self
            .nodes
            .iter()
            .position(|n| n == a)
            .ok_or_else(|| PretextError::UnknownNode(a.to_string()))?;
        let ib = self
            .nodes
            .iter()
            .position(|n| n == b)
            .ok_or_else(|| PretextError::UnknownNode(b.to_string()))?;
        Ok(self.weight_by_index(ia, ib))
    }
}

/// A category built from a similarity graph, with the edge weights carried
/// as labels beside the singleton hom-sets.
#[derive(Debug, Clone)]
pub struct ContrastiveCategory {
    pub category: FinCategory,
    pub weights: BTreeMap<MorphismId, BigRational>,
}

/// One object per node and one morphism per direction of every positive
/// edge. Closure under composition forces connected components to be
/// cliques: a return trip composes to the identity and a two-edge path must
/// land on the direct edge, so a missing direct edge is reported as a
/// conflict. A positive self-similarity entry becomes an idempotent loop
/// and is only consistent on isolated nodes.
pub fn build_contrastive_category(g: &WeightedGraph) -> Result<ContrastiveCategory, PretextError> {
    let n = g.nodes().len();
    let edge_name = |a: &str, b: &str| format!("{a}_to_{b}");
    let loop_name = |a: &str| format!("{a}_loop");
    let mut b = CategoryBuilder::new();
    for node in g.nodes() {
        b = b.object(node.clone());
    }
    let mut weights = BTreeMap::new();
    let positive = |i: usize, j: usize| !g.weight_by_index(i, j).is_zero();
    for i in 0..n {
        for j in 0..n {
            if !positive(i, j) {
                continue;
            }
            let (a, bn) = (&g.nodes()[i], &g.nodes()[j]);
            if i == j {
                for k in 0..n {
                    if k != i && positive(i, k) {
                        return Err(PretextError::ComposabilityConflict {
                            from: ObjectId::new(a.clone()),
                            via: ObjectId::new(a.clone()),
                            to: ObjectId::new(g.nodes()[k].clone()),
                        });
                    }
                }
                b = b.morphism(loop_name(a), a.clone(), a.clone());
                weights.insert(MorphismId::new(loop_name(a)), g.weight_by_index(i, j));
            } else {
                b = b.morphism(edge_name(a, bn), a.clone(), bn.clone());
                weights.insert(MorphismId::new(edge_name(a, bn)), g.weight_by_index(i, j));
            }
        }
    }
    // Forced composites: loops are idempotent, return trips are identities,
    // and two-edge paths must land on the direct edge.
    for i in 0..n {
        if positive(i, i) {
            let a = &g.nodes()[i];
            b = b.composite(loop_name(a), loop_name(a), loop_name(a));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j || !positive(i, j) {
                continue;
            }
            for k in 0..n {
                if k == j || !positive(j, k) {
                    continue;
                }
                let (a, via, c) = (&g.nodes()[i], &g.nodes()[j], &g.nodes()[k]);
                let first = edge_name(a, via);
                let then = edge_name(via, c);
                if k == i {
                    b = b.composite(first, then, format!("id_{a}"));
                } else if positive(i, k) {
                    b = b.composite(first, then, edge_name(a, c));
                } else {
                    return Err(PretextError::ComposabilityConflict {
                        from: ObjectId::new(a.clone()),
                        via: ObjectId::new(via.clone()),
                        to: ObjectId::new(c.clone()),
                    });
                }
            }
        }
    }
    Ok(ContrastiveCategory {
        category: b.build()?,
        weights,
    })
}

/// How one full object splits into a revealed part and a masked part.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskSplit {
    pub full: String,
    pub revealed: String,
    pub mask: String,
}

/// A collection of splits with disjoint revealed/mask roles, so the derived
/// category is unambiguous.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskSpec {
    splits: Vec<MaskSplit>,
}

impl MaskSpec {
    pub fn new(splits: Vec<MaskSplit>) -> Result<MaskSpec, PretextError> {
        if splits.is_empty() {
            return Err(PretextError::EmptyInput("at least one split"));
        }
        let mut fulls = BTreeSet::new();
        let mut revealed = BTreeSet::new();
        let mut masks = BTreeSet::new();
        for s in &splits {
            if !fulls.insert(s.full.clone()) {
                return Err(PretextError::DuplicateFullObject(s.full.clone()));
            }
            if s.revealed == s.mask {
                return Err(PretextError::DegenerateSplit(s.full.clone()));
            }
            revealed.insert(s.revealed.clone());
            masks.insert(s.mask.clone());
        }
        if let Some(shared) = revealed.intersection(&masks).next() {
            return Err(PretextError::PartNameOnBothSides(shared.clone()));
        }
        Ok(MaskSpec { splits })
    }

    pub fn splits(&self) -> &[MaskSplit] {
        &self.splits
    }
}

/// A bipartite category: one object per part name, and `hom(revealed, mask)`
/// holding the full objects realizing that split.
pub fn build_masked_category(spec: &MaskSpec) -> Result<FinCategory, PretextError> {
    let mut b = CategoryBuilder::new();
    let mut seen = BTreeSet::new();
    for s in spec.splits() {
        for part in [&s.revealed, &s.mask] {
            if seen.insert(part.clone()) {
                b = b.object(part.clone());
            }
        }
    }
    for s in spec.splits() {
        b = b.morphism(s.full.clone(), s.revealed.clone(), s.mask.clone());
    }
    // Revealed and mask roles are disjoint, so no non-identity pair is
    // composable and the composition table is exactly the forced one.
    Ok(b.build()?)
}

/// Reads the splits back out of a category built by
/// [`build_masked_category`]; the round trip is lossless.
pub fn recover_mask_spec(c: &FinCategory) -> Result<MaskSpec, PretextError> {
    let mut splits = Vec::new();
    for m in c.morphisms() {
        if c.is_identity(&m.name)? {
            continue;
        }
        splits.push(MaskSplit {
            full: m.name.as_str().to_string(),
            revealed: m.dom.as_str().to_string(),
            mask: m.cod.as_str().to_string(),
        });
    }
    if splits.is_empty() {
        return Err(PretextError::NotMaskShaped(
            "category has no non-identity morphisms".into(),
        ));
    }
    MaskSpec::new(splits).map_err(|e| PretextError::NotMaskShaped(e.to_string()))
}

fn format_sentence(sentence: &[String]) -> String {
    sentence.join(" ")
}

fn check_mass_one(
    context: impl Fn() -> String,
    entries: &BTreeMap<Vec<String>, BigRational>,
) -> Result<(), PretextError> {
    let mass: BigRational = entries.values().cloned().sum();
    if !mass.is_one() {
        return Err(PretextError::MassNotOne {
            context: context(),
            mass: mass.to_string(),
        });
    }
    Ok(())
}

/// A bounded-window language model: for every sentence of exactly `window`
/// tokens, an exact rational distribution over the next token.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovLM {
    tokens: Vec<String>,
    window: usize,
    next: BTreeMap<Vec<String>, BTreeMap<String, BigRational>>,
}

impl MarkovLM {
    pub fn new(
        tokens: Vec<String>,
        window: usize,
        next: BTreeMap<Vec<String>, BTreeMap<String, BigRational>>,
    ) -> Result<MarkovLM, PretextError> {
        if tokens.is_empty() {
            return Err(PretextError::EmptyInput("at least one token"));
        }
        if window == 0 {
            return Err(PretextError::EmptyInput("a positive window"));
        }
        let alphabet: BTreeSet<&str> = tokens.iter().map(String::as_str).collect();
        if alphabet.len() != tokens.len() {
            return Err(PretextError::EmptyInput("distinct token names"));
        }
        for (sentence, dist) in &next {
            if sentence.len() != window {
                return Err(PretextError::WrongSentenceLength {
                    sentence: format_sentence(sentence),
                    expected: window,
                });
            }
            for t in sentence {
                if !alphabet.contains(t.as_str()) {
                    return Err(PretextError::UnknownToken(t.clone()));
                }
            }
            let mut mass = BigRational::zero();
            for (t, p) in dist {
                if !alphabet.contains(t.as_str()) {
                    return Err(PretextError::UnknownToken(t.clone()));
                }
                if p <= &BigRational::zero() {
                    return Err(PretextError::NonPositiveMass(t.clone()));
                }
                mass += p;
            }
            if !mass.is_one() {
                return Err(PretextError::MassNotOne {
                    context: format!("next({})", format_sentence(sentence)),
                    mass: mass.to_string(),
                });
            }
        }
        Ok(MarkovLM {
            tokens,
            window,
            next,
        })
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn transition(&self, sentence: &[String]) -> Option<&BTreeMap<String, BigRational>> {
        self.next.get(sentence)
    }

    pub fn transition_count(&self) -> usize {
        self.next.len()
    }
}

/// An exact probability distribution over sentences, with positive masses
/// summing to exactly one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DistObject {
    support: BTreeMap<Vec<String>, BigRational>,
}

impl DistObject {
    pub fn new(support: BTreeMap<Vec<String>, BigRational>) -> Result<DistObject, PretextError> {
        if support.is_empty() {
            return Err(PretextError::EmptyInput("a non-empty support"));
        }
        for (sentence, mass) in &support {
            if mass <= &BigRational::zero() {
                return Err(PretextError::NonPositiveMass(format_sentence(sentence)));
            }
        }
        check_mass_one(|| "the distribution".to_string(), &support)?;
        Ok(DistObject { support })
    }

    /// The distribution putting all mass on one sentence.
    pub fn point(sentence: Vec<String>) -> DistObject {
        DistObject {
            support: [(sentence, BigRational::one())].into_iter().collect(),
        }
    }

    pub fn support(&self) -> &BTreeMap<Vec<String>, BigRational> {
        &self.support
    }
}

/// The exact one-step evolution of a sentence distribution: mass flows from
/// each supported sentence to its continuations, the window sliding by one
/// token. Total mass is conserved exactly.
pub fn canonical_successor(lm: &MarkovLM, z: &DistObject) -> Result<DistObject, PretextError> {
    let mut out: BTreeMap<Vec<String>, BigRational> = BTreeMap::new();
    for (sentence, mass) in z.support() {
        let dist = lm
            .transition(sentence)
            .ok_or_else(|| PretextError::UndefinedTransition(format_sentence(sentence)))?;
        for (token, p) in dist {
            let mut shifted: Vec<String> = sentence[1..].to_vec();
            shifted.push(token.clone());
            *out.entry(shifted).or_insert_with(BigRational::zero) += mass * p;
        }
    }
    DistObject::new(out)
}

/// A path category over the successor graph of a set of seed distributions,
/// together with the distribution standing behind each object.
#[derive(Debug, Clone)]
pub struct LanguageCategory {
    category: FinCategory,
    distributions: Vec<DistObject>,
    successors: Vec<Option<usize>>,
}

impl LanguageCategory {
    pub fn category(&self) -> &FinCategory {
        &self.category
    }

    /// The distribution an object stands for.
    pub fn distribution_of(&self, x: &ObjectId) -> Result<&DistObject, PretextError> {
        Ok(&self.distributions[self.category.object_index(x)?])
    }

    /// The successor object, when the object was expanded.
    pub fn successor_of(&self, x: &ObjectId) -> Result<Option<&ObjectId>, PretextError> {
        let i = self.category.object_index(x)?;
        Ok(self.successors[i].map(|j| &self.category.objects()[j]))
    }

    /// The sentence probabilities a morphism points at: the distribution of
    /// its codomain, read as "how likely each sentence is after following
    /// the successor steps".
    pub fn morphism_label(&self, f: &MorphismId) -> Result<&DistObject, PretextError> {
        let cod = self.category.morphisms()[self.category.morphism_index(f)?].cod.clone();
        self.distribution_of(&cod)
    }

    pub fn distributions(&self) -> &[DistObject] {
        &self.distributions
    }
}

/// Closes the seeds under the canonical successor up to `depth` steps,
/// deduplicating by exact distribution equality, and builds the path
/// category: objects `Z0, Z1, ...` in discovery order, one morphism per
/// successor path, composition by path concatenation. A successor cycle
/// would make the path category infinite and is reported as an error.
pub fn build_language_category(
    lm: &MarkovLM,
    seeds: &[DistObject],
    depth: usize,
    max_objects: usize,
) -> Result<LanguageCategory, PretextError> {
    if seeds.is_empty() {
        return Err(PretextError::EmptyInput("at least one seed distribution"));
    }
    let mut distributions: Vec<DistObject> = Vec::new();
    let mut index: BTreeMap<DistObject, usize> = BTreeMap::new();
    let mut remaining: Vec<usize> = Vec::new();
    let mut successors: Vec<Option<usize>> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut admit = |d: DistObject,
                     distributions: &mut Vec<DistObject>,
                     remaining: &mut Vec<usize>,
                     successors: &mut Vec<Option<usize>>|
     -> Result<usize, PretextError> {
        if let Some(&i) = index.get(&d) {
            return Ok(i);
        }
        if distributions.len() == max_objects {
            return Err(PretextError::ObjectBudgetExceeded {
                required: distributions.len() + 1,
                cap: max_objects,
            });
        }
        let i = distributions.len();
        index.insert(d.clone(), i);
        distributions.push(d);
        remaining.push(0);
        successors.push(None);
        Ok(i)
    };
    for seed in seeds {
        let i = admit(seed.clone(), &mut distributions, &mut remaining, &mut successors)?;
        if remaining[i] < depth || (remaining[i] == 0 && depth == 0) {
            remaining[i] = remaining[i].max(depth);
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        if remaining[i] == 0 {
            continue;
        }
        let next = canonical_successor(lm, &distributions[i])?;
        let j = admit(next, &mut distributions, &mut remaining, &mut successors)?;
        successors[i] = Some(j);
        let budget_after_step = remaining[i] - 1;
        if budget_after_step > remaining[j] || (successors[j].is_none() && budget_after_step > 0) {
            remaining[j] = remaining[j].max(budget_after_step);
            queue.push_back(j);
        }
    }
    // A cycle in the successor graph means unboundedly many paths.
    for start in 0..distributions.len() {
        let (mut slow, mut fast) = (start, start);
        loop {
            let step = |k: usize| successors[k];
            fast = match step(fast).and_then(step) {
                Some(f) => f,
                None => break,
            };
            slow = step(slow).expect("slow pointer trails fast");
            if slow == fast {
                return Err(PretextError::SuccessorCycle { object_index: slow });
            }
        }
    }

    let name = |i: usize| format!("Z{i}");
    let mut b = CategoryBuilder::new();
    for i in 0..distributions.len() {
        b = b.object(name(i));
    }
    // One morphism per successor path, named by source and length.
    let path_name = |i: usize, len: usize| format!("{}_next{}", name(i), len);
    let mut path_target: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for i in 0..distributions.len() {
        let mut k = 0usize;
        let mut at = i;
        while let Some(j) = successors[at] {
            k += 1;
            b = b.morphism(path_name(i, k), name(i), name(j));
            path_target.insert((i, k), j);
            at = j;
        }
    }
    for (&(i, k), &mid) in &path_target {
        let mut l = 0usize;
        let mut at = mid;
        while let Some(j) = successors[at] {
            l += 1;
            b = b.composite(path_name(i, k), path_name(mid, l), path_name(i, k + l));
            at = j;
        }
    }
    Ok(LanguageCategory {
        category: b.build()?,
        distributions,
        successors,
    })
}
