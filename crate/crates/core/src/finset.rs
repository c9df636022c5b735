//! Finite sets with named elements, and total functions between them.
//!
//! Element order is significant: it is the canonical enumeration order used
//! by every search and every serialized report, so two sets with the same
//! elements in different orders compare unequal. Use [`FinSet::same_elements`]
//! for order-insensitive comparison.

use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetError {
    #[error("duplicate element {0:?}")]
    DuplicateElement(String),
    #[error("empty element names are not allowed")]
    EmptyElement,
    #[error("element {element:?} is not a member of the {role} set")]
    UnknownElement { role: &'static str, element: String },
    #[error("function is not total: no image for {0:?}")]
    NotTotal(String),
    #[error("functions are not composable: inner target differs from outer source")]
    NotComposable,
    #[error("function is not a bijection")]
    NotBijective,
}

/// An ordered finite set of distinct, non-empty element names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct FinSet {
    elements: Vec<String>,
}

impl FinSet {
    pub fn new<I, S>(elements: I) -> Result<Self, SetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let elements: Vec<String> = elements.into_iter().map(Into::into).collect();
        let mut seen = HashMap::new();
        for (i, e) in elements.iter().enumerate() {
            if e.is_empty() {
                return Err(SetError::EmptyElement);
            }
            if seen.insert(e.clone(), i).is_some() {
                return Err(SetError::DuplicateElement(e.clone()));
            }
        }
        Ok(FinSet { elements })
    }

    pub fn empty() -> Self {
        FinSet { elements: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn contains(&self, element: &str) -> bool {
        self.elements.iter().any(|e| e == element)
    }

    pub fn index_of(&self, element: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == element)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.elements.iter().map(String::as_str)
    }

    /// Order-insensitive equality of the underlying element sets.
    pub fn same_elements(&self, other: &FinSet) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let mut a: Vec<&String> = self.elements.iter().collect();
        let mut b: Vec<&String> = other.elements.iter().collect();
        a.sort();
        b.sort();
        a == b
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.elements.join(", "))
    }
}

/// A total function between two finite sets, stored as an index map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFunction {
    source: FinSet,
    target: FinSet,
    map: Vec<usize>,
}

impl SetFunction {
    /// Builds a function from an element-name table. The table must mention
    /// every source element exactly once and map into the target set.
    pub fn from_map(
        source: FinSet,
        target: FinSet,
        table: &BTreeMap<String, String>,
    ) -> Result<Self, SetError> {
        for key in table.keys() {
            if !source.contains(key) {
                return Err(SetError::UnknownElement {
                    role: "source",
                    element: key.clone(),
                });
            }
        }
        let mut map = Vec::with_capacity(source.len());
        for e in source.iter() {
            let image = table.get(e).ok_or_else(|| SetError::NotTotal(e.to_string()))?;
            let idx = target.index_of(image).ok_or_else(|| SetError::UnknownElement {
                role: "target",
                element: image.clone(),
            })?;
            map.push(idx);
        }
        Ok(SetFunction { source, target, map })
    }

    /// Builds a function from source-index to target-index assignments.
    pub fn from_indices(source: FinSet, target: FinSet, map: Vec<usize>) -> Result<Self, SetError> {
        if map.len() != source.len() {
            return Err(SetError::NotTotal(format!(
                "expected {} assignments, got {}",
                source.len(),
                map.len()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&i| i >= target.len()) {
            return Err(SetError::UnknownElement {
                role: "target",
                element: format!("index {bad}"),
            });
        }
        Ok(SetFunction { source, target, map })
    }

    pub fn identity(set: FinSet) -> Self {
        let map = (0..set.len()).collect();
        SetFunction { source: set.clone(), target: set, map }
    }

    pub fn source(&self) -> &FinSet {
        &self.source
    }

    pub fn target(&self) -> &FinSet {
        &self.target
    }

    pub fn apply_index(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn apply(&self, element: &str) -> Result<&str, SetError> {
        let i = self.source.index_of(element).ok_or_else(|| SetError::UnknownElement {
            role: "source",
            element: element.to_string(),
        })?;
        Ok(&self.target.elements()[self.map[i]])
    }

    /// `g.after(f)` is the composite g∘f; requires `f.target == g.source`.
    pub fn after(&self, f: &SetFunction) -> Result<SetFunction, SetError> {
        if f.target != self.source {
            return Err(SetError::NotComposable);
        }
        let map = f.map.iter().map(|&i| self.map[i]).collect();
        Ok(SetFunction {
            source: f.source.clone(),
            target: self.target.clone(),
            map,
        })
    }

    pub fn is_bijection(&self) -> bool {
        if self.source.len() != self.target.len() {
            return false;
        }
        let mut hit = vec![false; self.target.len()];
        for &i in &self.map {
            if hit[i] {
                return false;
            }
            hit[i] = true;
        }
        true
    }

    pub fn inverse(&self) -> Result<SetFunction, SetError> {
        if !self.is_bijection() {
            return Err(SetError::NotBijective);
        }
        let mut map = vec![0; self.target.len()];
        for (i, &j) in self.map.iter().enumerate() {
            map[j] = i;
        }
        Ok(SetFunction {
            source: self.target.clone(),
            target: self.source.clone(),
            map,
        })
    }

    /// The element-name table of the function, for reports.
    pub fn to_name_map(&self) -> BTreeMap<String, String> {
        self.source
            .iter()
            .enumerate()
            .map(|(i, e)| (e.to_string(), self.target.elements()[self.map[i]].clone()))
            .collect()
    }
}
