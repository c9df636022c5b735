//! Set-valued functors on a finite category and natural transformations
//! between them.
//!
//! A [`SetFunctor`] stores one finite set per object and one total function
//! per morphism, with the functor laws checked exhaustively on
//! construction. [`enumerate_nat_transformations`] lists every natural
//! transformation between two functors over the same base by backtracking
//! over component families in lexicographic order, pruning with naturality
//! squares as soon as both endpoints of a square are assigned. The search
//! is complete and canonically ordered; it refuses to start (rather than
//! sample) when the family space exceeds the caller's budget.

use crate::category::{CategoryError, FinCategory, MorphismId, ObjectId};
use crate::finset::{FinSet, SetError, SetFunction};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresheafError {
    #[error("functors live on different base categories")]
    BaseMismatch,
    #[error("functors have different variance")]
    VarianceMismatch,
    #[error("no value set for object {0}")]
    MissingObjectValue(ObjectId),
    #[error("no action for morphism {0}")]
    MissingMorphismAction(MorphismId),
    #[error("action of {f} does not have the required source and target sets")]
    ActionShapeMismatch { f: MorphismId },
    #[error("action of morphism {f} is ill-formed: {source}")]
    BadAction { f: MorphismId, source: SetError },
    #[error("identity action at {0} is not the identity function")]
    IdentityActionNotIdentity(ObjectId),
    #[error("actions violate functoriality on ({g} ∘ {f})")]
    CompositionActionMismatch { g: MorphismId, f: MorphismId },
    #[error("component at {0} does not have the required source and target sets")]
    ComponentShapeMismatch(ObjectId),
    #[error("family is not natural: square for morphism {0} does not commute")]
    NotNatural(MorphismId),
    #[error("enumeration budget exceeded: {required} component families")]
    EnumerationBudgetExceeded { required: u128 },
    #[error(transparent)]
    Category(#[from] CategoryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Covariant,
    Contravariant,
}

/// Object values by object name, in the file-format shape.
pub type ValueTables = BTreeMap<String, Vec<String>>;

/// Morphism actions by morphism name, each an element-to-element map.
pub type ActionTables = BTreeMap<String, BTreeMap<String, String>>;

/// A functor from a finite category (or its opposite) into finite sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFunctor {
    base: FinCategory,
    variance: Variance,
    on_objects: Vec<FinSet>,
    on_morphisms: Vec<SetFunction>,
}

impl SetFunctor {
    /// Builds and validates a functor from per-object sets and per-morphism
    /// actions, both indexed in base declaration order.
    pub fn from_parts(
        base: FinCategory,
        variance: Variance,
        on_objects: Vec<FinSet>,
        on_morphisms: Vec<SetFunction>,
    ) -> Result<SetFunctor, PresheafError> {
        if on_objects.len() != base.object_count() {
            let missing = base.objects().get(on_objects.len()).cloned();
            return Err(PresheafError::MissingObjectValue(
                missing.unwrap_or_else(|| ObjectId::new("<surplus value>")),
            ));
        }
        if on_morphisms.len() != base.morphism_count() {
            let missing = base.morphisms().get(on_morphisms.len()).map(|m| m.name.clone());
            return Err(PresheafError::MissingMorphismAction(
                missing.unwrap_or_else(|| MorphismId::new("<surplus action>")),
            ));
        }
        let f = SetFunctor {
            base,
            variance,
            on_objects,
            on_morphisms,
        };
        f.check_laws()?;
        Ok(f)
    }

    /// Builds a functor from name tables (the file-format shape). Actions
    /// for identities may be omitted, as may actions whose source set is
    /// empty; everything else must be present.
    pub fn from_tables(
        base: FinCategory,
        variance: Variance,
        values: &BTreeMap<String, Vec<String>>,
        actions: &BTreeMap<String, BTreeMap<String, String>>,
    ) -> Result<SetFunctor, PresheafError> {
        for key in values.keys() {
            base.object_index(&ObjectId::new(key.clone()))?;
        }
        for key in actions.keys() {
            base.morphism_index(&MorphismId::new(key.clone()))?;
        }
        let mut on_objects = Vec::with_capacity(base.object_count());
        for x in base.objects() {
            let elems = values
                .get(x.as_str())
                .ok_or_else(|| PresheafError::MissingObjectValue(x.clone()))?;
            let set = FinSet::new(elems.iter().cloned()).map_err(|source| PresheafError::BadAction {
                f: MorphismId::new(format!("value at {x}")),
                source,
            })?;
            on_objects.push(set);
        }
        let value_of = |x: &ObjectId| -> &FinSet { &on_objects[base.object_index(x).expect("validated")] };
        let mut on_morphisms = Vec::with_capacity(base.morphism_count());
        for m in base.morphisms() {
            let (src, tgt) = match variance {
                Variance::Covariant => (value_of(&m.dom), value_of(&m.cod)),
                Variance::Contravariant => (value_of(&m.cod), value_of(&m.dom)),
            };
            let action = match actions.get(m.name.as_str()) {
                Some(table) => SetFunction::from_map(src.clone(), tgt.clone(), table)
                    .map_err(|source| PresheafError::BadAction {
                        f: m.name.clone(),
                        source,
                    })?,
                None if base.is_identity(&m.name)? => SetFunction::identity(src.clone()),
                None if src.is_empty() => {
                    SetFunction::from_indices(FinSet::empty(), tgt.clone(), vec![])
                        .expect("empty function")
                }
                None => return Err(PresheafError::MissingMorphismAction(m.name.clone())),
            };
            on_morphisms.push(action);
        }
        SetFunctor::from_parts(base, variance, on_objects, on_morphisms)
    }

    fn check_laws(&self) -> Result<(), PresheafError> {
        for (i, m) in self.base.morphisms().iter().enumerate() {
            let action = &self.on_morphisms[i];
            let (src, tgt) = self.action_shape(m.dom.clone(), m.cod.clone());
            if action.source() != src || action.target() != tgt {
                return Err(PresheafError::ActionShapeMismatch { f: m.name.clone() });
            }
        }
        for (i, x) in self.base.objects().iter().enumerate() {
            let id = self.base.identity_of(x)?;
            let action = self.action(id)?;
            if action != &SetFunction::identity(self.on_objects[i].clone()) {
                return Err(PresheafError::IdentityActionNotIdentity(x.clone()));
            }
        }
        for f in self.base.morphisms() {
            for g in self.base.morphisms() {
                if f.cod != g.dom {
                    continue;
                }
                let h = self.base.compose(&g.name, &f.name)?;
                let composite = match self.variance {
                    Variance::Covariant => self.action(&g.name)?.after(self.action(&f.name)?),
                    Variance::Contravariant => self.action(&f.name)?.after(self.action(&g.name)?),
                }
                .expect("shapes were checked");
                if &composite != self.action(h)? {
                    return Err(PresheafError::CompositionActionMismatch {
                        g: g.name.clone(),
                        f: f.name.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    fn action_shape(&self, dom: ObjectId, cod: ObjectId) -> (&FinSet, &FinSet) {
        let d = &self.on_objects[self.base.object_index(&dom).expect("own morphism endpoints")];
        let c = &self.on_objects[self.base.object_index(&cod).expect("own morphism endpoints")];
        match self.variance {
            Variance::Covariant => (d, c),
            Variance::Contravariant => (c, d),
        }
    }

    pub fn base(&self) -> &FinCategory {
        &self.base
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn value(&self, x: &ObjectId) -> Result<&FinSet, PresheafError> {
        Ok(&self.on_objects[self.base.object_index(x)?])
    }

    pub fn action(&self, f: &MorphismId) -> Result<&SetFunction, PresheafError> {
        Ok(&self.on_morphisms[self.base.morphism_index(f)?])
    }

    pub(crate) fn action_at(&self, i: usize) -> &SetFunction {
        &self.on_morphisms[i]
    }

    /// The same assignments over a smaller base; `sub` must be a subcategory
    /// of this functor's base (shared names).
    pub fn restrict_to(&self, sub: &FinCategory) -> Result<SetFunctor, PresheafError> {
        let mut on_objects = Vec::with_capacity(sub.object_count());
        for x in sub.objects() {
            on_objects.push(self.value(x)?.clone());
        }
        let mut on_morphisms = Vec::with_capacity(sub.morphism_count());
        for m in sub.morphisms() {
            on_morphisms.push(self.action(&m.name)?.clone());
        }
        SetFunctor::from_parts(sub.clone(), self.variance, on_objects, on_morphisms)
    }

    /// Name tables in the file-format shape (identities included).
    pub fn to_tables(&self) -> (ValueTables, ActionTables) {
        let values = self
            .base
            .objects()
            .iter()
            .enumerate()
            .map(|(i, x)| (x.as_str().to_string(), self.on_objects[i].elements().to_vec()))
            .collect();
        let actions = self
            .base
            .morphisms()
            .iter()
            .enumerate()
            .map(|(i, m)| (m.name.as_str().to_string(), self.on_morphisms[i].to_name_map()))
            .collect();
        (values, actions)
    }
}

/// A natural transformation, validated on construction: one component per
/// base object, every naturality square checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NatTransformation {
    source: SetFunctor,
    target: SetFunctor,
    components: Vec<SetFunction>,
}

impl NatTransformation {
    pub fn new(
        source: SetFunctor,
        target: SetFunctor,
        components: Vec<SetFunction>,
    ) -> Result<NatTransformation, PresheafError> {
        if source.base != target.base {
            return Err(PresheafError::BaseMismatch);
        }
        if source.variance != target.variance {
            return Err(PresheafError::VarianceMismatch);
        }
        if components.len() != source.base.object_count() {
            let missing = source.base.objects().get(components.len()).cloned();
            return Err(PresheafError::ComponentShapeMismatch(
                missing.unwrap_or_else(|| ObjectId::new("<surplus component>")),
            ));
        }
        for (i, x) in source.base.objects().iter().enumerate() {
            let c = &components[i];
            if c.source() != &source.on_objects[i] || c.target() != &target.on_objects[i] {
                return Err(PresheafError::ComponentShapeMismatch(x.clone()));
            }
        }
        let t = NatTransformation {
            source,
            target,
            components,
        };
        t.check_naturality()?;
        Ok(t)
    }

    fn check_naturality(&self) -> Result<(), PresheafError> {
        let base = &self.source.base;
        for (i, m) in base.morphisms().iter().enumerate() {
            let xd = base.object_index(&m.dom).expect("own morphism");
            let xc = base.object_index(&m.cod).expect("own morphism");
            // Component indices on the action's source and target side.
            let (src_comp, tgt_comp) = match self.source.variance {
                Variance::Covariant => (xd, xc),
                Variance::Contravariant => (xc, xd),
            };
            let f1 = &self.source.on_morphisms[i];
            let f2 = &self.target.on_morphisms[i];
            for k in 0..f1.source().len() {
                let via_action = self.components[tgt_comp].apply_index(f1.apply_index(k));
                let via_component = f2.apply_index(self.components[src_comp].apply_index(k));
                if via_action != via_component {
                    return Err(PresheafError::NotNatural(m.name.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &SetFunctor {
        &self.source
    }

    pub fn target(&self) -> &SetFunctor {
        &self.target
    }

    pub fn component(&self, x: &ObjectId) -> Result<&SetFunction, PresheafError> {
        Ok(&self.components[self.source.base.object_index(x)?])
    }

    pub fn components(&self) -> &[SetFunction] {
        &self.components
    }

    pub fn is_iso(&self) -> bool {
        self.components.iter().all(SetFunction::is_bijection)
    }

    pub fn inverse(&self) -> Result<NatTransformation, PresheafError> {
        let components: Result<Vec<SetFunction>, SetError> =
            self.components.iter().map(SetFunction::inverse).collect();
        let components = components.map_err(|_| PresheafError::NotNatural(MorphismId::new("<inverse>")))?;
        NatTransformation::new(self.target.clone(), self.source.clone(), components)
    }

    pub fn identity(f: &SetFunctor) -> NatTransformation {
        let components = f.on_objects.iter().map(|s| SetFunction::identity(s.clone())).collect();
        NatTransformation {
            source: f.clone(),
            target: f.clone(),
            components,
        }
    }

    /// The same components over a smaller base; `sub` must be a subcategory
    /// of this transformation's base (shared names).
    pub fn restrict_to(&self, sub: &FinCategory) -> Result<NatTransformation, PresheafError> {
        let source = self.source.restrict_to(sub)?;
        let target = self.target.restrict_to(sub)?;
        let components = sub
            .objects()
            .iter()
            .map(|x| self.component(x).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        NatTransformation::new(source, target, components)
    }

    /// Vertical composite `second ∘ first`.
    pub fn vertical(second: &NatTransformation, first: &NatTransformation) -> Result<NatTransformation, PresheafError> {
        if first.target != second.source {
            return Err(PresheafError::BaseMismatch);
        }
        let components: Vec<SetFunction> = first
            .components
            .iter()
            .zip(&second.components)
            .map(|(a, b)| b.after(a).expect("validated component shapes"))
            .collect();
        NatTransformation::new(first.source.clone(), second.target.clone(), components)
    }

    /// Component tables keyed by object, for reports.
    pub fn to_tables(&self) -> BTreeMap<String, BTreeMap<String, String>> {
        self.source
            .base
            .objects()
            .iter()
            .enumerate()
            .map(|(i, x)| (x.as_str().to_string(), self.components[i].to_name_map()))
            .collect()
    }
}

/// The exact number of raw component families between two functors, used
/// for budget checks (saturating).
fn family_space(f1: &SetFunctor, f2: &SetFunctor) -> u128 {
    let mut product: u128 = 1;
    for i in 0..f1.base.object_count() {
        let base = f2.on_objects[i].len() as u128;
        let exp = f1.on_objects[i].len() as u32;
        let factor = base.checked_pow(exp).unwrap_or(u128::MAX);
        product = product.saturating_mul(factor);
    }
    product
}

fn check_same_shape(f1: &SetFunctor, f2: &SetFunctor) -> Result<(), PresheafError> {
    if f1.base != f2.base {
        return Err(PresheafError::BaseMismatch);
    }
    if f1.variance != f2.variance {
        return Err(PresheafError::VarianceMismatch);
    }
    Ok(())
}

/// Per-object candidate component maps, in lexicographic order.
type Candidates = Vec<Vec<Vec<usize>>>;

fn backtrack_families(
    f1: &SetFunctor,
    f2: &SetFunctor,
    candidates: &Candidates,
    first_only: bool,
) -> Vec<Vec<Vec<usize>>> {
    let base = &f1.base;
    let n = base.object_count();
    // Naturality squares checked as soon as both components exist: square
    // for morphism m is scheduled at the larger of its two object indices.
    let mut squares_at: Vec<Vec<usize>> = vec![Vec::new(); n.max(1)];
    for (mi, m) in base.morphisms().iter().enumerate() {
        let xd = base.object_index(&m.dom).expect("own morphism");
        let xc = base.object_index(&m.cod).expect("own morphism");
        squares_at[xd.max(xc)].push(mi);
    }
    let square_ok = |assigned: &[Vec<usize>], mi: usize| -> bool {
        let m = &base.morphisms()[mi];
        let xd = base.object_index(&m.dom).expect("own morphism");
        let xc = base.object_index(&m.cod).expect("own morphism");
        let (src_comp, tgt_comp) = match f1.variance {
            Variance::Covariant => (xd, xc),
            Variance::Contravariant => (xc, xd),
        };
        let a1 = f1.action_at(mi);
        let a2 = f2.action_at(mi);
        (0..a1.source().len()).all(|k| {
            assigned[tgt_comp][a1.apply_index(k)] == a2.apply_index(assigned[src_comp][k])
        })
    };

    let mut found: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut assigned: Vec<Vec<usize>> = Vec::with_capacity(n);
    // Iterative depth-first search over candidate indices in lex order.
    let mut choice: Vec<usize> = vec![0; n];
    let mut depth = 0usize;
    loop {
        if depth == n {
            found.push(assigned.clone());
            if first_only {
                return found;
            }
            if depth == 0 {
                return found;
            }
            depth -= 1;
            assigned.pop();
            choice[depth] += 1;
            continue;
        }
        if choice[depth] >= candidates[depth].len() {
            if depth == 0 {
                return found;
            }
            choice[depth] = 0;
            depth -= 1;
            assigned.pop();
            choice[depth] += 1;
            continue;
        }
        assigned.push(candidates[depth][choice[depth]].clone());
        if squares_at[depth].iter().all(|&mi| square_ok(&assigned, mi)) {
            depth += 1;
        } else {
            assigned.pop();
            choice[depth] += 1;
        }
    }
}

/// Lists every natural transformation from `f1` to `f2`, duplicate-free, in
/// lexicographic component order. Errors out if the raw family space
/// exceeds `budget`; it never samples.
pub fn enumerate_nat_transformations(
    f1: &SetFunctor,
    f2: &SetFunctor,
    budget: u64,
) -> Result<Vec<NatTransformation>, PresheafError> {
    check_same_shape(f1, f2)?;
    let required = family_space(f1, f2);
    if required > budget as u128 {
        return Err(PresheafError::EnumerationBudgetExceeded { required });
    }
    let n = f1.base.object_count();
    let mut candidates: Candidates = Vec::with_capacity(n);
    for i in 0..n {
        candidates.push(all_maps(f1.on_objects[i].len(), f2.on_objects[i].len()));
    }
    let families = backtrack_families(f1, f2, &candidates, false);
    Ok(families
        .into_iter()
        .map(|family| materialize(f1, f2, family))
        .collect())
}

/// Decides natural isomorphism: prunes on value cardinalities, then searches
/// bijective component families only, returning the lexicographically first
/// natural isomorphism if one exists.
pub fn are_naturally_isomorphic(
    f1: &SetFunctor,
    f2: &SetFunctor,
    budget: u64,
) -> Result<Option<NatTransformation>, PresheafError> {
    check_same_shape(f1, f2)?;
    let n = f1.base.object_count();
    for i in 0..n {
        if f1.on_objects[i].len() != f2.on_objects[i].len() {
            return Ok(None);
        }
    }
    let mut required: u128 = 1;
    for i in 0..n {
        required = required.saturating_mul(factorial(f1.on_objects[i].len()));
    }
    if required > budget as u128 {
        return Err(PresheafError::EnumerationBudgetExceeded { required });
    }
    let mut candidates: Candidates = Vec::with_capacity(n);
    for i in 0..n {
        candidates.push(lex_permutations(f1.on_objects[i].len()));
    }
    let families = backtrack_families(f1, f2, &candidates, true);
    Ok(families.into_iter().next().map(|family| materialize(f1, f2, family)))
}

fn materialize(f1: &SetFunctor, f2: &SetFunctor, family: Vec<Vec<usize>>) -> NatTransformation {
    let components: Vec<SetFunction> = family
        .into_iter()
        .enumerate()
        .map(|(i, map)| {
            SetFunction::from_indices(f1.on_objects[i].clone(), f2.on_objects[i].clone(), map)
                .expect("search assigns well-formed maps")
        })
        .collect();
    NatTransformation::new(f1.clone(), f2.clone(), components)
        .expect("search only yields natural families")
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// All maps from an m-element set to a k-element set, lexicographically.
fn all_maps(m: usize, k: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    if k == 0 {
        return vec![];
    }
    let mut out = Vec::new();
    let mut current = vec![0usize; m];
    loop {
        out.push(current.clone());
        let mut pos = m;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            current[pos] += 1;
            if current[pos] < k {
                break;
            }
            current[pos] = 0;
        }
    }
}

/// All permutations of {0..n}, lexicographically.
fn lex_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // Next permutation in lex order.
        if n < 2 {
            return out;
        }
        let mut i = n - 1;
        while i > 0 && current[i - 1] >= current[i] {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        let mut j = n - 1;
        while current[j] <= current[i - 1] {
            j -= 1;
        }
        current.swap(i - 1, j);
        current[i..].reverse();
    }
}

/// The constant functor: the same value set everywhere, identity actions.
pub fn constant_functor(
    base: FinCategory,
    variance: Variance,
    value: FinSet,
) -> Result<SetFunctor, PresheafError> {
    let on_objects = vec![value.clone(); base.object_count()];
    let on_morphisms = vec![SetFunction::identity(value); base.morphism_count()];
    SetFunctor::from_parts(base, variance, on_objects, on_morphisms)
}

/// Object-wise disjoint union, elements tagged `l.` and `r.`.
pub fn coproduct_functor(f: &SetFunctor, g: &SetFunctor) -> Result<SetFunctor, PresheafError> {
    check_same_shape(f, g)?;
    let tag = |prefix: &str, set: &FinSet| -> Vec<String> {
        set.iter().map(|e| format!("{prefix}{e}")).collect()
    };
    let mut on_objects = Vec::with_capacity(f.base.object_count());
    for i in 0..f.base.object_count() {
        let mut elems = tag("l.", &f.on_objects[i]);
        elems.extend(tag("r.", &g.on_objects[i]));
        on_objects.push(FinSet::new(elems).expect("tags keep names distinct"));
    }
    let mut on_morphisms = Vec::with_capacity(f.base.morphism_count());
    for (mi, m) in f.base.morphisms().iter().enumerate() {
        let (src_obj, tgt_obj) = {
            let xd = f.base.object_index(&m.dom)?;
            let xc = f.base.object_index(&m.cod)?;
            match f.variance {
                Variance::Covariant => (xd, xc),
                Variance::Contravariant => (xc, xd),
            }
        };
        let fa = &f.on_morphisms[mi];
        let ga = &g.on_morphisms[mi];
        let left_len = f.on_objects[src_obj].len();
        let left_tgt = f.on_objects[tgt_obj].len();
        let mut map = Vec::with_capacity(left_len + g.on_objects[src_obj].len());
        for k in 0..left_len {
            map.push(fa.apply_index(k));
        }
        for k in 0..g.on_objects[src_obj].len() {
            map.push(left_tgt + ga.apply_index(k));
        }
        on_morphisms.push(
            SetFunction::from_indices(on_objects[src_obj].clone(), on_objects[tgt_obj].clone(), map)
                .expect("coproduct maps are well-formed"),
        );
    }
    SetFunctor::from_parts(f.base.clone(), f.variance, on_objects, on_morphisms)
}

/// Object-wise cartesian product, elements named `(a,b)`.
pub fn product_functor(f: &SetFunctor, g: &SetFunctor) -> Result<SetFunctor, PresheafError> {
    check_same_shape(f, g)?;
    let mut on_objects = Vec::with_capacity(f.base.object_count());
    for i in 0..f.base.object_count() {
        let mut elems = Vec::new();
        for a in f.on_objects[i].iter() {
            for b in g.on_objects[i].iter() {
                elems.push(format!("({a},{b})"));
            }
        }
        on_objects.push(FinSet::new(elems).expect("pairs of distinct names are distinct"));
    }
    let mut on_morphisms = Vec::with_capacity(f.base.morphism_count());
    for (mi, m) in f.base.morphisms().iter().enumerate() {
        let (src_obj, tgt_obj) = {
            let xd = f.base.object_index(&m.dom)?;
            let xc = f.base.object_index(&m.cod)?;
            match f.variance {
                Variance::Covariant => (xd, xc),
                Variance::Contravariant => (xc, xd),
            }
        };
        let gsrc = g.on_objects[src_obj].len();
        let gtgt = g.on_objects[tgt_obj].len();
        let fa = &f.on_morphisms[mi];
        let ga = &g.on_morphisms[mi];
        let mut map = Vec::with_capacity(f.on_objects[src_obj].len() * gsrc);
        for ka in 0..f.on_objects[src_obj].len() {
            for kb in 0..gsrc {
                map.push(fa.apply_index(ka) * gtgt + ga.apply_index(kb));
            }
        }
        on_morphisms.push(
            SetFunction::from_indices(on_objects[src_obj].clone(), on_objects[tgt_obj].clone(), map)
                .expect("product maps are well-formed"),
        );
    }
    SetFunctor::from_parts(f.base.clone(), f.variance, on_objects, on_morphisms)
}

/// Renames every element through `scheme`; the scheme must stay injective
/// on each value set.
pub fn relabel_functor(
    f: &SetFunctor,
    scheme: impl Fn(&ObjectId, &str) -> String,
) -> Result<SetFunctor, PresheafError> {
    let mut on_objects = Vec::with_capacity(f.base.object_count());
    for (i, x) in f.base.objects().iter().enumerate() {
        let elems: Vec<String> = f.on_objects[i].iter().map(|e| scheme(x, e)).collect();
        let set = FinSet::new(elems).map_err(|source| PresheafError::BadAction {
            f: MorphismId::new(format!("relabeling at {x}")),
            source,
        })?;
        on_objects.push(set);
    }
    let mut on_morphisms = Vec::with_capacity(f.base.morphism_count());
    for (mi, m) in f.base.morphisms().iter().enumerate() {
        let (src_obj, tgt_obj) = {
            let xd = f.base.object_index(&m.dom)?;
            let xc = f.base.object_index(&m.cod)?;
            match f.variance {
                Variance::Covariant => (xd, xc),
                Variance::Contravariant => (xc, xd),
            }
        };
        let indices = (0..f.on_objects[src_obj].len())
            .map(|k| f.on_morphisms[mi].apply_index(k))
            .collect();
        on_morphisms.push(
            SetFunction::from_indices(on_objects[src_obj].clone(), on_objects[tgt_obj].clone(), indices)
                .expect("relabeling preserves shape"),
        );
    }
    SetFunctor::from_parts(f.base.clone(), f.variance, on_objects, on_morphisms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::CategoryBuilder;

    fn arrow() -> FinCategory {
        CategoryBuilder::new()
            .object("A")
            .object("B")
            .morphism("f", "A", "B")
            .build()
            .unwrap()
    }

    /// The contravariant hom-into-A presheaf of the arrow category, by hand.
    fn hom_into_a(c: &FinCategory) -> SetFunctor {
        let values = [
            ("A".to_string(), vec!["id_A".to_string()]),
            ("B".to_string(), vec![]),
        ]
        .into_iter()
        .collect();
        let actions = BTreeMap::new();
        SetFunctor::from_tables(c.clone(), Variance::Contravariant, &values, &actions).unwrap()
    }

    fn hom_into_b(c: &FinCategory) -> SetFunctor {
        let values = [
            ("A".to_string(), vec!["f".to_string()]),
            ("B".to_string(), vec!["id_B".to_string()]),
        ]
        .into_iter()
        .collect();
        let actions = [(
            "f".to_string(),
            [("id_B".to_string(), "f".to_string())].into_iter().collect(),
        )]
        .into_iter()
        .collect();
        SetFunctor::from_tables(c.clone(), Variance::Contravariant, &values, &actions).unwrap()
    }

    #[test]
    fn functor_laws_are_checked() {
        let c = CategoryBuilder::new()
            .object("Z")
            .morphism("e", "Z", "Z")
            .composite("e", "e", "id_Z")
            .build()
            .unwrap();
        // e acts as a non-involution: functoriality on e∘e = id must fail.
        let values = [("Z".to_string(), vec!["0".to_string(), "1".to_string()])]
            .into_iter()
            .collect();
        let actions = [(
            "e".to_string(),
            [
                ("0".to_string(), "1".to_string()),
                ("1".to_string(), "1".to_string()),
            ]
            .into_iter()
            .collect(),
        )]
        .into_iter()
        .collect();
        let err = SetFunctor::from_tables(c, Variance::Covariant, &values, &actions).unwrap_err();
        assert_eq!(
            err,
            PresheafError::CompositionActionMismatch {
                g: "e".into(),
                f: "e".into()
            }
        );
    }

    #[test]
    fn representable_shapes_enumerate_as_expected() {
        let c = arrow();
        let ha = hom_into_a(&c);
        let hb = hom_into_b(&c);
        let forward = enumerate_nat_transformations(&ha, &hb, 1_000_000).unwrap();
        assert_eq!(forward.len(), 1, "exactly one transformation out of the smaller shape");
        let backward = enumerate_nat_transformations(&hb, &ha, 1_000_000).unwrap();
        assert_eq!(backward.len(), 0, "no map from a nonempty value into an empty one");
    }

    #[test]
    fn enumeration_respects_the_budget() {
        let c = arrow();
        let three = FinSet::new(["0", "1", "2"]).unwrap();
        let f = constant_functor(c.clone(), Variance::Contravariant, three.clone()).unwrap();
        let g = constant_functor(c, Variance::Contravariant, three).unwrap();
        // Family space is 3^3 · 3^3 = 729.
        let err = enumerate_nat_transformations(&f, &g, 728).unwrap_err();
        assert_eq!(err, PresheafError::EnumerationBudgetExceeded { required: 729 });
        let ok = enumerate_nat_transformations(&f, &g, 729).unwrap();
        // Naturality along f forces equal components, 27 families survive.
        assert_eq!(ok.len(), 27);
    }

    #[test]
    fn constructor_rejects_non_natural_families() {
        let c = arrow();
        let two = FinSet::new(["0", "1"]).unwrap();
        let f = constant_functor(c.clone(), Variance::Contravariant, two.clone()).unwrap();
        let swap = SetFunction::from_indices(two.clone(), two.clone(), vec![1, 0]).unwrap();
        let ident = SetFunction::identity(two);
        let err = NatTransformation::new(f.clone(), f.clone(), vec![swap, ident]).unwrap_err();
        assert_eq!(err, PresheafError::NotNatural("f".into()));
    }

    #[test]
    fn identity_transformation_is_found_by_enumeration() {
        let c = arrow();
        let hb = hom_into_b(&c);
        let all = enumerate_nat_transformations(&hb, &hb, 1_000_000).unwrap();
        assert!(all.contains(&NatTransformation::identity(&hb)));
    }

    #[test]
    fn natural_isomorphism_search_prunes_and_finds() {
        let c = arrow();
        let hb = hom_into_b(&c);
        let relabeled = relabel_functor(&hb, |_, e| format!("t_{e}")).unwrap();
        let iso = are_naturally_isomorphic(&hb, &relabeled, 1_000_000).unwrap().unwrap();
        assert!(iso.is_iso());
        assert_eq!(iso.component(&"A".into()).unwrap().apply("f").unwrap(), "t_f");
        let ha = hom_into_a(&c);
        assert!(are_naturally_isomorphic(&ha, &hb, 1_000_000).unwrap().is_none());
    }

    #[test]
    fn equal_cardinalities_do_not_imply_natural_isomorphism() {
        // One object with an involution e; two 2-element value sets: the free
        // action (swap) vs the trivial action. Pointwise sizes agree, yet no
        // natural isomorphism exists.
        let c = CategoryBuilder::new()
            .object("Z")
            .morphism("e", "Z", "Z")
            .composite("e", "e", "id_Z")
            .build()
            .unwrap();
        let two = FinSet::new(["0", "1"]).unwrap();
        let swap = SetFunction::from_indices(two.clone(), two.clone(), vec![1, 0]).unwrap();
        let free = SetFunctor::from_parts(
            c.clone(),
            Variance::Contravariant,
            vec![two.clone()],
            vec![swap, SetFunction::identity(two.clone())],
        )
        .unwrap();
        let trivial = constant_functor(c, Variance::Contravariant, two).unwrap();
        assert_eq!(free.value(&"Z".into()).unwrap().len(), trivial.value(&"Z".into()).unwrap().len());
        assert!(are_naturally_isomorphic(&free, &trivial, 1_000_000).unwrap().is_none());
    }

    #[test]
    fn coproduct_and_product_sizes_and_laws() {
        let c = arrow();
        let ha = hom_into_a(&c);
        let hb = hom_into_b(&c);
        let sum = coproduct_functor(&ha, &hb).unwrap();
        assert_eq!(sum.value(&"A".into()).unwrap().len(), 2);
        assert_eq!(sum.value(&"B".into()).unwrap().len(), 1);
        let prod = product_functor(&hb, &hb).unwrap();
        assert_eq!(prod.value(&"A".into()).unwrap().elements(), ["(f,f)"]);
        // Both constructions already passed functor-law validation.
    }

    #[test]
    fn vertical_composition_chains_components() {
        let c = arrow();
        let hb = hom_into_b(&c);
        let relabeled = relabel_functor(&hb, |_, e| format!("t_{e}")).unwrap();
        let up = are_naturally_isomorphic(&hb, &relabeled, 1_000_000).unwrap().unwrap();
        let down = up.inverse().unwrap();
        let round = NatTransformation::vertical(&down, &up).unwrap();
        assert_eq!(round, NatTransformation::identity(&hb));
    }
}
