//! Finite categories presented by explicit composition tables.
//!
//! A category here is fully extensional: a finite list of named objects, a
//! finite list of named morphisms with domain and codomain, and a total
//! composition table over all composable pairs. [`validate_category`] checks
//! every axiom (identity laws, closure, associativity) exhaustively and
//! rejects a presentation on the first violation, naming the offending
//! morphisms. Everything downstream consumes only validated values.
//!
//! Identity morphisms carry the reserved name `id_<object>`. Presentations
//! may declare them explicitly or omit them; omitted identities are appended
//! automatically, and the unit laws force every composite that involves one.

use crate::finset::FinSet;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Reserved prefix for identity morphism names.
pub const ID_PREFIX: &str = "id_";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectId(String);

impl ObjectId {
    pub fn new(name: impl Into<String>) -> Self {
        ObjectId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ObjectId {
    fn from(s: &str) -> Self {
        ObjectId(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MorphismId(String);

impl MorphismId {
    pub fn new(name: impl Into<String>) -> Self {
        MorphismId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for MorphismId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for MorphismId {
    fn from(s: &str) -> Self {
        MorphismId(s.to_string())
    }
}

/// A named morphism with its endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Morphism {
    pub name: MorphismId,
    pub dom: ObjectId,
    pub cod: ObjectId,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CategoryError {
    #[error("empty names are not allowed ({0})")]
    EmptyName(&'static str),
    #[error("duplicate object {0}")]
    DuplicateObject(ObjectId),
    #[error("duplicate morphism {0}")]
    DuplicateMorphism(MorphismId),
    #[error("{referrer} refers to unknown name {missing:?}")]
    DanglingReference { referrer: String, missing: String },
    #[error("morphism name {0} is reserved for the identity of object {1:?} (identities must have matching domain and codomain)")]
    ReservedIdentityName(MorphismId, String),
    #[error("object {0} has no valid identity morphism")]
    MissingIdentity(ObjectId),
    #[error("unit law violated at morphism {0}: composing with an identity must return the morphism itself")]
    UnitLawViolation(MorphismId),
    #[error("composition entry ({then} ∘ {first}) is ill-typed: {reason}")]
    IllTypedComposite { first: MorphismId, then: MorphismId, reason: String },
    #[error("conflicting composites declared for ({then} ∘ {first}): {a} vs {b}")]
    ConflictingComposite { first: MorphismId, then: MorphismId, a: MorphismId, b: MorphismId },
    #[error("composition undefined for composable pair ({g} ∘ {f})")]
    CompositionUndefined { g: MorphismId, f: MorphismId },
    #[error("associativity violated on ({h}, {g}, {f}): (h∘g)∘f ≠ h∘(g∘f)")]
    AssociativityViolation { h: MorphismId, g: MorphismId, f: MorphismId },
    #[error("morphisms {g} and {f} are not composable")]
    NotComposable { g: MorphismId, f: MorphismId },
    #[error("unknown object {0}")]
    UnknownObject(ObjectId),
    #[error("unknown morphism {0}")]
    UnknownMorphism(MorphismId),
    #[error("construction budget exceeded: {required} morphisms over cap {cap}")]
    BudgetExceeded { required: usize, cap: usize },
}

/// Raw category presentation, exactly mirroring the JSON file format.
///
/// `composition` entries read forward: `equals` is `then ∘ first`, the
/// morphism obtained by applying `first` and then `then`. Entries whose
/// operands include an identity may be omitted (unit laws force them), as
/// may the identities themselves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategorySpec {
    pub objects: Vec<String>,
    #[serde(default)]
    pub morphisms: Vec<MorphismSpec>,
    #[serde(default)]
    pub composition: Vec<CompositionSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    pub name: String,
    pub dom: String,
    pub cod: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositionSpec {
    pub first: String,
    pub then: String,
    pub equals: String,
}

/// Checks every category axiom on a presentation and returns the validated,
/// immutable category, or the first violation found.
pub fn validate_category(spec: &CategorySpec) -> Result<FinCategory, CategoryError> {
    let mut b = CategoryBuilder::new();
    for o in &spec.objects {
        b = b.object(o.clone());
    }
    for m in &spec.morphisms {
        b = b.morphism(m.name.clone(), m.dom.clone(), m.cod.clone());
    }
    for c in &spec.composition {
        b = b.composite(c.first.clone(), c.then.clone(), c.equals.clone());
    }
    b.build()
}

/// Incremental presentation of a finite category; `build` validates it.
#[derive(Debug, Clone, Default)]
pub struct CategoryBuilder {
    objects: Vec<String>,
    morphisms: Vec<MorphismSpec>,
    composites: Vec<CompositionSpec>,
}

impl CategoryBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn object(mut self, name: impl Into<String>) -> Self {
        self.objects.push(name.into());
        self
    }

    pub fn morphism(
        mut self,
        name: impl Into<String>,
        dom: impl Into<String>,
        cod: impl Into<String>,
    ) -> Self {
        self.morphisms.push(MorphismSpec {
            name: name.into(),
            dom: dom.into(),
            cod: cod.into(),
        });
        self
    }

    /// Declares `equals = then ∘ first`.
    pub fn composite(
        mut self,
        first: impl Into<String>,
        then: impl Into<String>,
        equals: impl Into<String>,
    ) -> Self {
        self.composites.push(CompositionSpec {
            first: first.into(),
            then: then.into(),
            equals: equals.into(),
        });
        self
    }

    pub fn build(self) -> Result<FinCategory, CategoryError> {
        let mut obj_idx: HashMap<String, usize> = HashMap::new();
        for (i, name) in self.objects.iter().enumerate() {
            if name.is_empty() {
                return Err(CategoryError::EmptyName("object"));
            }
            if obj_idx.insert(name.clone(), i).is_some() {
                return Err(CategoryError::DuplicateObject(ObjectId::new(name.clone())));
            }
        }

        let mut morphisms: Vec<Morphism> = Vec::new();
        let mut mor_idx: HashMap<String, usize> = HashMap::new();
        for m in &self.morphisms {
            if m.name.is_empty() {
                return Err(CategoryError::EmptyName("morphism"));
            }
            if mor_idx.contains_key(&m.name) {
                return Err(CategoryError::DuplicateMorphism(MorphismId::new(m.name.clone())));
            }
            if !obj_idx.contains_key(&m.dom) {
                return Err(CategoryError::DanglingReference {
                    referrer: format!("morphism {}", m.name),
                    missing: m.dom.clone(),
                });
            }
            if !obj_idx.contains_key(&m.cod) {
                return Err(CategoryError::DanglingReference {
                    referrer: format!("morphism {}", m.name),
                    missing: m.cod.clone(),
                });
            }
            if let Some(suffix) = m.name.strip_prefix(ID_PREFIX) {
                if !(obj_idx.contains_key(suffix) && m.dom == suffix && m.cod == suffix) {
                    return Err(CategoryError::ReservedIdentityName(
                        MorphismId::new(m.name.clone()),
                        suffix.to_string(),
                    ));
                }
            }
            mor_idx.insert(m.name.clone(), morphisms.len());
            morphisms.push(Morphism {
                name: MorphismId::new(m.name.clone()),
                dom: ObjectId::new(m.dom.clone()),
                cod: ObjectId::new(m.cod.clone()),
            });
        }

        // Identities: adopt declared ones, append the rest.
        let mut identities = Vec::with_capacity(self.objects.len());
        for name in &self.objects {
            let id_name = format!("{ID_PREFIX}{name}");
            let idx = match mor_idx.get(&id_name) {
                Some(&i) => i,
                None => {
                    let i = morphisms.len();
                    mor_idx.insert(id_name.clone(), i);
                    morphisms.push(Morphism {
                        name: MorphismId::new(id_name),
                        dom: ObjectId::new(name.clone()),
                        cod: ObjectId::new(name.clone()),
                    });
                    i
                }
            };
            identities.push(idx);
        }

        let resolve = |name: &str| -> Result<usize, CategoryError> {
            mor_idx.get(name).copied().ok_or_else(|| CategoryError::DanglingReference {
                referrer: "composition entry".to_string(),
                missing: name.to_string(),
            })
        };

        let mut table: HashMap<(usize, usize), usize> = HashMap::new();
        for entry in &self.composites {
            let f = resolve(&entry.first)?;
            let g = resolve(&entry.then)?;
            let h = resolve(&entry.equals)?;
            let (mf, mg, mh) = (&morphisms[f], &morphisms[g], &morphisms[h]);
            if mf.cod != mg.dom {
                return Err(CategoryError::IllTypedComposite {
                    first: mf.name.clone(),
                    then: mg.name.clone(),
                    reason: format!(
                        "codomain {} of {} differs from domain {} of {}",
                        mf.cod, mf.name, mg.dom, mg.name
                    ),
                });
            }
            if mh.dom != mf.dom || mh.cod != mg.cod {
                return Err(CategoryError::IllTypedComposite {
                    first: mf.name.clone(),
                    then: mg.name.clone(),
                    reason: format!("declared composite {} has the wrong endpoints", mh.name),
                });
            }
            if let Some(&prev) = table.get(&(g, f)) {
                if prev != h {
                    return Err(CategoryError::ConflictingComposite {
                        first: mf.name.clone(),
                        then: mg.name.clone(),
                        a: morphisms[prev].name.clone(),
                        b: mh.name.clone(),
                    });
                }
            }
            table.insert((g, f), h);
        }

        // Unit laws force every identity composite.
        for (fi, m) in morphisms.iter().enumerate() {
            let id_dom = identities[obj_idx[m.dom.as_str()]];
            let id_cod = identities[obj_idx[m.cod.as_str()]];
            for key in [(fi, id_dom), (id_cod, fi)] {
                if let Some(&prev) = table.get(&key) {
                    if prev != fi {
                        return Err(CategoryError::UnitLawViolation(m.name.clone()));
                    }
                }
                table.insert(key, fi);
            }
        }

        // Closure: every composable pair has a composite.
        for (fi, mf) in morphisms.iter().enumerate() {
            for (gi, mg) in morphisms.iter().enumerate() {
                if mf.cod == mg.dom && !table.contains_key(&(gi, fi)) {
                    return Err(CategoryError::CompositionUndefined {
                        g: mg.name.clone(),
                        f: mf.name.clone(),
                    });
                }
            }
        }

        // Associativity over all composable triples.
        for (fi, mf) in morphisms.iter().enumerate() {
            for (gi, mg) in morphisms.iter().enumerate() {
                if mf.cod != mg.dom {
                    continue;
                }
                let gf = table[&(gi, fi)];
                for (hi, mh) in morphisms.iter().enumerate() {
                    if mg.cod != mh.dom {
                        continue;
                    }
                    let hg = table[&(hi, gi)];
                    if table[&(hi, gf)] != table[&(hg, fi)] {
                        return Err(CategoryError::AssociativityViolation {
                            h: mh.name.clone(),
                            g: mg.name.clone(),
                            f: mf.name.clone(),
                        });
                    }
                }
            }
        }

        let objects = self.objects.into_iter().map(ObjectId::new).collect();
        Ok(FinCategory {
            objects,
            morphisms,
            obj_idx,
            mor_idx,
            identities,
            table,
        })
    }
}

/// A validated finite category. Immutable; every accessor is total over the
/// category's own names and every composable pair has a composite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCategory {
    objects: Vec<ObjectId>,
    morphisms: Vec<Morphism>,
    obj_idx: HashMap<String, usize>,
    mor_idx: HashMap<String, usize>,
    identities: Vec<usize>,
    table: HashMap<(usize, usize), usize>,
}

impl FinCategory {
    pub fn objects(&self) -> &[ObjectId] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn object_index(&self, x: &ObjectId) -> Result<usize, CategoryError> {
        self.obj_idx
            .get(x.as_str())
            .copied()
            .ok_or_else(|| CategoryError::UnknownObject(x.clone()))
    }

    pub fn morphism_index(&self, f: &MorphismId) -> Result<usize, CategoryError> {
        self.mor_idx
            .get(f.as_str())
            .copied()
            .ok_or_else(|| CategoryError::UnknownMorphism(f.clone()))
    }

    pub fn morphism(&self, f: &MorphismId) -> Result<&Morphism, CategoryError> {
        Ok(&self.morphisms[self.morphism_index(f)?])
    }

    pub fn identity_of(&self, x: &ObjectId) -> Result<&MorphismId, CategoryError> {
        let i = self.object_index(x)?;
        Ok(&self.morphisms[self.identities[i]].name)
    }

    pub fn is_identity(&self, f: &MorphismId) -> Result<bool, CategoryError> {
        let i = self.morphism_index(f)?;
        Ok(self.identities.contains(&i))
    }

    /// `compose(g, f)` is g∘f: apply `f` first, then `g`.
    pub fn compose(&self, g: &MorphismId, f: &MorphismId) -> Result<&MorphismId, CategoryError> {
        let gi = self.morphism_index(g)?;
        let fi = self.morphism_index(f)?;
        match self.table.get(&(gi, fi)) {
            Some(&h) => Ok(&self.morphisms[h].name),
            None => Err(CategoryError::NotComposable {
                g: g.clone(),
                f: f.clone(),
            }),
        }
    }

    /// Morphism names from `x` to `y` in declaration order.
    pub fn hom(&self, x: &ObjectId, y: &ObjectId) -> Result<FinSet, CategoryError> {
        self.object_index(x)?;
        self.object_index(y)?;
        let names: Vec<String> = self
            .morphisms
            .iter()
            .filter(|m| &m.dom == x && &m.cod == y)
            .map(|m| m.name.as_str().to_string())
            .collect();
        Ok(FinSet::new(names).expect("morphism names are unique"))
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    /// Composable pairs `(g, f)` with their composites, in index order.
    pub fn composition_entries(&self) -> impl Iterator<Item = (&Morphism, &Morphism, &Morphism)> {
        let mut keys: Vec<(usize, usize)> = self.table.keys().copied().collect();
        keys.sort_unstable();
        keys.into_iter().map(move |(g, f)| {
            (&self.morphisms[g], &self.morphisms[f], &self.morphisms[self.table[&(g, f)]])
        })
    }

    /// The opposite category: same names, reversed arrows, transposed table.
    pub fn opposite(&self) -> FinCategory {
        let morphisms: Vec<Morphism> = self
            .morphisms
            .iter()
            .map(|m| Morphism {
                name: m.name.clone(),
                dom: m.cod.clone(),
                cod: m.dom.clone(),
            })
            .collect();
        let table = self.table.iter().map(|(&(g, f), &h)| ((f, g), h)).collect();
        FinCategory {
            objects: self.objects.clone(),
            morphisms,
            obj_idx: self.obj_idx.clone(),
            mor_idx: self.mor_idx.clone(),
            identities: self.identities.clone(),
            table,
        }
    }

    /// Searches for an isomorphism pair between two objects.
    pub fn iso_objects(
        &self,
        x: &ObjectId,
        y: &ObjectId,
    ) -> Result<Option<(MorphismId, MorphismId)>, CategoryError> {
        let id_x = self.identity_of(x)?.clone();
        let id_y = self.identity_of(y)?.clone();
        for f in self.hom(x, y)?.iter() {
            let f = MorphismId::new(f);
            for g in self.hom(y, x)?.iter() {
                let g = MorphismId::new(g);
                if self.compose(&g, &f)? == &id_x && self.compose(&f, &g)? == &id_y {
                    return Ok(Some((f, g)));
                }
            }
        }
        Ok(None)
    }

    /// Canonical presentation: all objects and morphisms in declaration
    /// order (identities included), composition entries for every pair of
    /// non-identity operands, sorted. Round-trips through
    /// [`validate_category`] to an equal category.
    pub fn to_spec(&self) -> CategorySpec {
        let objects = self.objects.iter().map(|o| o.as_str().to_string()).collect();
        let morphisms = self
            .morphisms
            .iter()
            .map(|m| MorphismSpec {
                name: m.name.as_str().to_string(),
                dom: m.dom.as_str().to_string(),
                cod: m.cod.as_str().to_string(),
            })
            .collect();
        let mut keys: Vec<(usize, usize)> = self
            .table
            .keys()
            .copied()
            .filter(|&(g, f)| !self.identities.contains(&g) && !self.identities.contains(&f))
            .collect();
        keys.sort_unstable_by_key(|&(g, f)| (f, g));
        let composition = keys
            .into_iter()
            .map(|(g, f)| CompositionSpec {
                first: self.morphisms[f].name.as_str().to_string(),
                then: self.morphisms[g].name.as_str().to_string(),
                equals: self.morphisms[self.table[&(g, f)]].name.as_str().to_string(),
            })
            .collect();
        CategorySpec {
            objects,
            morphisms,
            composition,
        }
    }

    /// Deterministic serialized form of the canonical presentation.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("category specs serialize")
    }
}
