//! Extending a covariant set-valued functor along the embedding, evaluated
//! one presheaf at a time.
//!
//! The extension's value at a presheaf is the colimit of the covariant
//! functor over the presheaf's category of elements. Colimits of finite
//! sets are computed by union-find over the disjoint union of the
//! participating sets, with class representatives chosen lexicographically
//! so the output is independent of merge order. [`check_fine_tuning_theorem`]
//! verifies that evaluating the extension at an embedded object recovers
//! the functor's original value, with an explicit natural family of
//! bijections; a failure there indicates a bug in this crate, not a
//! property of the input.

use crate::category::{CategoryBuilder, CategoryError, FinCategory, MorphismId, ObjectId};
use crate::finset::{FinSet, SetError, SetFunction};
use crate::functor::{CatFunctor, FunctorError};
use crate::presheaf::{NatTransformation, PresheafError, SetFunctor, Variance};
use crate::yoneda::{yoneda_embed, yoneda_embed_morphism, YonedaError};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExtensionError {
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Functor(#[from] FunctorError),
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error(transparent)]
    Yoneda(#[from] YonedaError),
    #[error("expected a {expected:?} functor")]
    WrongVariance { expected: Variance },
    #[error("the functors live on different base categories")]
    BaseMismatch,
    #[error("induced map is not constant on colimit classes: {detail} (implementation bug)")]
    NotWellDefined { detail: String },
    #[error("extension value at {0} does not reproduce the functor value (implementation bug)")]
    ExtensionMismatch(ObjectId),
}

/// The category of elements of a presheaf: objects are pairs of a base
/// object with an element of the presheaf's value there, morphisms are base
/// morphisms whose presheaf action carries the target element back to the
/// source element. Comes with the projection onto the base category.
#[derive(Debug, Clone)]
pub struct CategoryOfElements {
    category: FinCategory,
    projection: CatFunctor,
    pairs: Vec<(ObjectId, String)>,
}

fn pair_name(x: &ObjectId, element: &str) -> String {
    format!("({x},{element})")
}

/// Builds the category of elements of a contravariant functor. Object names
/// are `(X,a)` and morphism names `f[a=>b]`; the builder's uniqueness checks
/// reject the (pathological) input names that would make these collide.
pub fn category_of_elements(a: &SetFunctor) -> Result<CategoryOfElements, ExtensionError> {
    if a.variance() != Variance::Contravariant {
        return Err(ExtensionError::WrongVariance {
            expected: Variance::Contravariant,
        });
    }
    let base = a.base();
    let mut builder = CategoryBuilder::new();
    let mut pairs: Vec<(ObjectId, String)> = Vec::new();
    for x in base.objects() {
        for e in a.value(x)?.iter() {
            builder = builder.object(pair_name(x, e));
            pairs.push((x.clone(), e.to_string()));
        }
    }
    // One morphism (X, A(f)(b)) → (Y, b) per non-identity f: X → Y and
    // element b of A(Y).
    struct Conn {
        name: String,
        base_morphism: MorphismId,
        src: (ObjectId, String),
        tgt: (ObjectId, String),
    }
    let mut connections: Vec<Conn> = Vec::new();
    for m in base.morphisms() {
        if base.is_identity(&m.name)? {
            continue;
        }
        let action = a.action(&m.name)?;
        for b in a.value(&m.cod)?.iter() {
            let e = action.apply(b)?;
            let name = format!("{}[{}=>{}]", m.name, e, b);
            builder = builder.morphism(&name, pair_name(&m.dom, e), pair_name(&m.cod, b));
            connections.push(Conn {
                name,
                base_morphism: m.name.clone(),
                src: (m.dom.clone(), e.to_string()),
                tgt: (m.cod.clone(), b.to_string()),
            });
        }
    }
    // Composition inherited from the base; composites with one identity leg
    // are forced by the builder itself.
    let mut declared = builder;
    for m1 in &connections {
        for m2 in &connections {
            if m1.tgt != m2.src {
                continue;
            }
            let h = base.compose(&m2.base_morphism, &m1.base_morphism)?.clone();
            let composite = if base.is_identity(&h)? {
                format!("id_{}", pair_name(&m1.src.0, &m1.src.1))
            } else {
                format!("{h}[{}=>{}]", m1.src.1, m2.tgt.1)
            };
            declared = declared.composite(m1.name.clone(), m2.name.clone(), composite);
        }
    }
    let category = declared.build()?;
    let on_objects: BTreeMap<String, String> = pairs
        .iter()
        .map(|(x, e)| (pair_name(x, e), x.as_str().to_string()))
        .collect();
    let on_morphisms: BTreeMap<String, String> = connections
        .iter()
        .map(|c| (c.name.clone(), c.base_morphism.as_str().to_string()))
        .collect();
    let projection = CatFunctor::new(category.clone(), base.clone(), &on_objects, &on_morphisms)?;
    Ok(CategoryOfElements {
        category,
        projection,
        pairs,
    })
}

impl CategoryOfElements {
    pub fn category(&self) -> &FinCategory {
        &self.category
    }

    pub fn projection(&self) -> &CatFunctor {
        &self.projection
    }

    /// Base object and element per diagram object, in declaration order.
    pub fn pairs(&self) -> &[(ObjectId, String)] {
        &self.pairs
    }

    pub fn base(&self) -> &FinCategory {
        self.projection.target()
    }
}

/// The order in which generating relations are fed to the union-find; the
/// resulting partition and all canonical output must not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MergeSchedule {
    #[default]
    Forward,
    Reverse,
}

/// A finite-set colimit: the partition of the disjoint union, canonical
/// lexicographically-least representatives, and the injection of every
/// participating set into the classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColimitResult {
    representatives: FinSet,
    classes: Vec<Vec<String>>,
    injections: Vec<SetFunction>,
}

impl ColimitResult {
    /// One canonical representative per class, lexicographically sorted.
    pub fn representatives(&self) -> &FinSet {
        &self.representatives
    }

    /// Full class membership, parallel to `representatives`, each class
    /// sorted.
    pub fn classes(&self) -> &[Vec<String>] {
        &self.classes
    }

    /// The map from the value set at diagram object `i` into the classes.
    pub fn injections(&self) -> &[SetFunction] {
        &self.injections
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }

    fn union(&mut self, i: usize, j: usize) {
        let (ri, rj) = (self.find(i), self.find(j));
        if ri != rj {
            let (lo, hi) = (ri.min(rj), ri.max(rj));
            self.parent[hi] = lo;
        }
    }
}

/// Colimit of `f` over the category of elements, by union-find over the
/// disjoint union of the values of `f` at the projected objects.
pub fn colimit_finset(
    diagram: &CategoryOfElements,
    f: &SetFunctor,
    schedule: MergeSchedule,
) -> Result<ColimitResult, ExtensionError> {
    if f.variance() != Variance::Covariant {
        return Err(ExtensionError::WrongVariance {
            expected: Variance::Covariant,
        });
    }
    if f.base() != diagram.base() {
        return Err(ExtensionError::BaseMismatch);
    }
    let pairs = diagram.pairs();
    let mut offsets = Vec::with_capacity(pairs.len());
    let mut total = 0usize;
    for (x, _) in pairs {
        offsets.push(total);
        total += f.value(x)?.len();
    }
    let member_name = |pair_idx: usize, u: usize| -> Result<String, ExtensionError> {
        let (x, e) = &pairs[pair_idx];
        let u_name = &f.value(x)?.elements()[u];
        Ok(format!("{}|{}", pair_name(x, e), u_name))
    };

    let elements_cat = diagram.category();
    let mut relations: Vec<(usize, usize)> = Vec::new();
    for m in elements_cat.morphisms() {
        if elements_cat.is_identity(&m.name)? {
            continue;
        }
        let src_pair = elements_cat.object_index(&m.dom)?;
        let tgt_pair = elements_cat.object_index(&m.cod)?;
        let base_morphism = diagram.projection().apply_morphism(&m.name)?;
        let action = f.action(base_morphism)?;
        for u in 0..action.source().len() {
            relations.push((offsets[src_pair] + u, offsets[tgt_pair] + action.apply_index(u)));
        }
    }
    if schedule == MergeSchedule::Reverse {
        relations.reverse();
    }
    let mut uf = UnionFind::new(total);
    for (i, j) in relations {
        uf.union(i, j);
    }

    // Group members by root, name them, and pick lexicographic leaders.
    let mut by_root: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    let mut names = Vec::with_capacity(total);
    for (pair_idx, (x, _)) in pairs.iter().enumerate() {
        let count = f.value(x)?.len();
        for u in 0..count {
            names.push(member_name(pair_idx, u)?);
        }
    }
    for (idx, name) in names.iter().enumerate() {
        by_root.entry(uf.find(idx)).or_default().push(name.clone());
    }
    let mut classes: Vec<Vec<String>> = by_root
        .into_values()
        .map(|mut members| {
            members.sort();
            members
        })
        .collect();
    classes.sort_by(|a, b| a[0].cmp(&b[0]));
    let representatives = FinSet::new(classes.iter().map(|c| c[0].clone()))?;

    let mut member_class: BTreeMap<&str, usize> = BTreeMap::new();
    for (ci, class) in classes.iter().enumerate() {
        for member in class {
            member_class.insert(member, ci);
        }
    }
    let mut injections = Vec::with_capacity(pairs.len());
    for (pair_idx, (x, _)) in pairs.iter().enumerate() {
        let value = f.value(x)?;
        let map: Vec<usize> = (0..value.len())
            .map(|u| member_class[names[offsets[pair_idx] + u].as_str()])
            .collect();
        injections.push(SetFunction::from_indices(
            value.clone(),
            representatives.clone(),
            map,
        )?);
    }
    Ok(ColimitResult {
        representatives,
        classes,
        injections,
    })
}

/// The extension of `f` evaluated at the presheaf `at`: the colimit of `f`
/// over the presheaf's category of elements, as a set of canonical class
/// representatives.
pub fn kan_extend(f: &SetFunctor, at: &SetFunctor) -> Result<FinSet, ExtensionError> {
    let diagram = category_of_elements(at)?;
    Ok(colimit_finset(&diagram, f, MergeSchedule::Forward)?
        .representatives()
        .clone())
}

/// The extension's action on a natural transformation between presheaves:
/// the induced map between the two colimits. Checked to be constant on
/// classes; a violation is an implementation bug.
pub fn kan_extend_map(
    f: &SetFunctor,
    theta: &NatTransformation,
) -> Result<SetFunction, ExtensionError> {
    let src_diagram = category_of_elements(theta.source())?;
    let tgt_diagram = category_of_elements(theta.target())?;
    let src = colimit_finset(&src_diagram, f, MergeSchedule::Forward)?;
    let tgt = colimit_finset(&tgt_diagram, f, MergeSchedule::Forward)?;

    let tgt_pair_index: BTreeMap<(&ObjectId, &str), usize> = tgt_diagram
        .pairs()
        .iter()
        .enumerate()
        .map(|(i, (x, e))| ((x, e.as_str()), i))
        .collect();

    // Member-level image: ((X,a),u) goes to ((X, θ_X(a)), u).
    let mut rep_image: Vec<Option<usize>> = vec![None; src.representatives().len()];
    for (pair_idx, (x, a)) in src_diagram.pairs().iter().enumerate() {
        let component = theta.component(x)?;
        let image_elem = component.apply(a)?;
        let tgt_pair = *tgt_pair_index
            .get(&(x, image_elem))
            .ok_or_else(|| ExtensionError::NotWellDefined {
                detail: format!("no diagram object for ({x},{image_elem})"),
            })?;
        let value = f.value(x)?;
        for u in 0..value.len() {
            let src_class = src.injections()[pair_idx].apply_index(u);
            let tgt_class = tgt.injections()[tgt_pair].apply_index(u);
            match rep_image[src_class] {
                None => rep_image[src_class] = Some(tgt_class),
                Some(existing) if existing == tgt_class => {}
                Some(existing) => {
                    return Err(ExtensionError::NotWellDefined {
                        detail: format!(
                            "class {} maps to both {} and {}",
                            src.representatives().elements()[src_class],
                            tgt.representatives().elements()[existing],
                            tgt.representatives().elements()[tgt_class]
                        ),
                    });
                }
            }
        }
    }
    let map: Result<Vec<usize>, ExtensionError> = rep_image
        .into_iter()
        .enumerate()
        .map(|(ci, img)| {
            img.ok_or_else(|| ExtensionError::NotWellDefined {
                detail: format!(
                    "class {} has no members to transport",
                    src.representatives().elements()[ci]
                ),
            })
        })
        .collect();
    Ok(SetFunction::from_indices(
        src.representatives().clone(),
        tgt.representatives().clone(),
        map?,
    )?)
}

/// The natural family of bijections witnessing that the extension restricts
/// back to the original functor on embedded objects.
#[derive(Debug, Clone)]
pub struct FineTuningReport {
    bijections: BTreeMap<ObjectId, SetFunction>,
}

impl FineTuningReport {
    /// The bijection from the extension's value at the embedded object onto
    /// the functor's own value.
    pub fn bijection_at(&self, x: &ObjectId) -> Option<&SetFunction> {
        self.bijections.get(x)
    }

    pub fn bijections(&self) -> &BTreeMap<ObjectId, SetFunction> {
        &self.bijections
    }
}

/// Verifies, object by object, that extending `f` and evaluating at the
/// embedded object reproduces `f`'s value, and that the family of bijections
/// is natural against every base morphism. The underlying identity is a
/// theorem, so any mismatch is reported as an implementation bug.
pub fn check_fine_tuning_theorem(
    c: &FinCategory,
    f: &SetFunctor,
) -> Result<FineTuningReport, ExtensionError> {
    if f.variance() != Variance::Covariant {
        return Err(ExtensionError::WrongVariance {
            expected: Variance::Covariant,
        });
    }
    if f.base() != c {
        return Err(ExtensionError::BaseMismatch);
    }
    let mut colimits: BTreeMap<ObjectId, ColimitResult> = BTreeMap::new();
    let mut bijections: BTreeMap<ObjectId, SetFunction> = BTreeMap::new();
    for x in c.objects() {
        let h_x = yoneda_embed(c, x)?;
        let diagram = category_of_elements(&h_x)?;
        let colim = colimit_finset(&diagram, f, MergeSchedule::Forward)?;
        // Collapse map: member ((Y,g), u) evaluates to F(g)(u) in F(X).
        let value_x = f.value(x)?.clone();
        let mut rep_value: Vec<Option<usize>> = vec![None; colim.representatives().len()];
        for (pair_idx, (y, g)) in diagram.pairs().iter().enumerate() {
            let action = f.action(&MorphismId::new(g.clone()))?;
            let len = f.value(y)?.len();
            for u in 0..len {
                let class = colim.injections()[pair_idx].apply_index(u);
                let v = action.apply_index(u);
                match rep_value[class] {
                    None => rep_value[class] = Some(v),
                    Some(existing) if existing == v => {}
                    Some(_) => return Err(ExtensionError::ExtensionMismatch(x.clone())),
                }
            }
        }
        let map: Vec<usize> = rep_value
            .into_iter()
            .map(|v| v.ok_or_else(|| ExtensionError::ExtensionMismatch(x.clone())))
            .collect::<Result<_, _>>()?;
        let beta = SetFunction::from_indices(colim.representatives().clone(), value_x, map)?;
        if !beta.is_bijection() {
            return Err(ExtensionError::ExtensionMismatch(x.clone()));
        }
        colimits.insert(x.clone(), colim);
        bijections.insert(x.clone(), beta);
    }
    // Naturality of the family against every base morphism.
    for m in c.morphisms() {
        let transported = kan_extend_map(f, &yoneda_embed_morphism(c, &m.name)?)?;
        let beta_dom = &bijections[&m.dom];
        let beta_cod = &bijections[&m.cod];
        let action = f.action(&m.name)?;
        for r in 0..beta_dom.source().len() {
            let via_transport = beta_cod.apply_index(transported.apply_index(r));
            let via_value = action.apply_index(beta_dom.apply_index(r));
            if via_transport != via_value {
                return Err(ExtensionError::ExtensionMismatch(m.dom.clone()));
            }
        }
    }
    Ok(FineTuningReport { bijections })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::CategoryBuilder;
    use crate::presheaf::{constant_functor, SetFunctor};
    use crate::yoneda::corepresentable;

    fn arrow() -> FinCategory {
        CategoryBuilder::new()
            .object("A")
            .object("B")
            .morphism("f", "A", "B")
            .build()
            .unwrap()
    }

    /// F(A)={0}, F(B)={0,1}, F(f)(0)=0, covariant on the arrow category.
    fn arrow_task(c: &FinCategory) -> SetFunctor {
        let values = [
            ("A".to_string(), vec!["0".to_string()]),
            ("B".to_string(), vec!["0".to_string(), "1".to_string()]),
        ]
        .into_iter()
        .collect();
        let actions = [(
            "f".to_string(),
            [("0".to_string(), "0".to_string())].into_iter().collect(),
        )]
        .into_iter()
        .collect();
        SetFunctor::from_tables(c.clone(), Variance::Covariant, &values, &actions).unwrap()
    }

    #[test]
    fn elements_of_embedded_objects() {
        let c = arrow();
        let ha = yoneda_embed(&c, &"A".into()).unwrap();
        let ea = category_of_elements(&ha).unwrap();
        assert_eq!(ea.category().object_count(), 1);
        assert_eq!(ea.category().objects()[0], "(A,id_A)".into());

        let hb = yoneda_embed(&c, &"B".into()).unwrap();
        let eb = category_of_elements(&hb).unwrap();
        assert_eq!(eb.category().object_count(), 2);
        let non_identities = eb
            .category()
            .morphisms()
            .iter()
            .filter(|m| !eb.category().is_identity(&m.name).unwrap())
            .count();
        assert_eq!(non_identities, 1);
        assert_eq!(
            eb.projection().apply_morphism(&"f[f=>id_B]".into()).unwrap(),
            &"f".into()
        );
    }

    #[test]
    fn empty_presheaf_gives_the_empty_category() {
        let c = arrow();
        let empty = constant_functor(c, Variance::Contravariant, FinSet::empty()).unwrap();
        let e = category_of_elements(&empty).unwrap();
        assert_eq!(e.category().object_count(), 0);
        assert_eq!(e.category().morphism_count(), 0);
    }

    #[test]
    fn colimit_over_a_single_object_is_the_value_itself() {
        let c = CategoryBuilder::new().object("X").build().unwrap();
        let hx = yoneda_embed(&c, &"X".into()).unwrap();
        let diagram = category_of_elements(&hx).unwrap();
        let f = constant_functor(c, Variance::Covariant, FinSet::new(["u", "v"]).unwrap()).unwrap();
        let colim = colimit_finset(&diagram, &f, MergeSchedule::Forward).unwrap();
        assert_eq!(colim.representatives().len(), 2);
        assert!(colim.injections()[0].is_bijection());
    }

    #[test]
    fn discrete_diagram_gives_the_disjoint_union() {
        let c = CategoryBuilder::new().object("X").object("Y").build().unwrap();
        let point = constant_functor(
            c.clone(),
            Variance::Contravariant,
            FinSet::new(["*"]).unwrap(),
        )
        .unwrap();
        let diagram = category_of_elements(&point).unwrap();
        let values = [
            ("X".to_string(), vec!["a".to_string(), "b".to_string()]),
            ("Y".to_string(), vec!["c".to_string(), "d".to_string(), "e".to_string()]),
        ]
        .into_iter()
        .collect();
        let f = SetFunctor::from_tables(c, Variance::Covariant, &values, &BTreeMap::new()).unwrap();
        let colim = colimit_finset(&diagram, &f, MergeSchedule::Forward).unwrap();
        assert_eq!(colim.representatives().len(), 5);
        assert!(colim.classes().iter().all(|cl| cl.len() == 1));
    }

    #[test]
    fn connected_diagram_merges_along_the_action() {
        let c = arrow();
        let f = arrow_task(&c);
        let hb = yoneda_embed(&c, &"B".into()).unwrap();
        let diagram = category_of_elements(&hb).unwrap();
        let colim = colimit_finset(&diagram, &f, MergeSchedule::Forward).unwrap();
        // (A,f)|0 merges with (B,id_B)|0; (B,id_B)|1 stays alone.
        assert_eq!(colim.representatives().len(), 2);
        assert_eq!(
            colim.classes(),
            [
                vec!["(A,f)|0".to_string(), "(B,id_B)|0".to_string()],
                vec!["(B,id_B)|1".to_string()],
            ]
        );
    }

    #[test]
    fn merge_order_does_not_change_the_canonical_output() {
        let c = arrow();
        let f = arrow_task(&c);
        let hb = yoneda_embed(&c, &"B".into()).unwrap();
        let diagram = category_of_elements(&hb).unwrap();
        let forward = colimit_finset(&diagram, &f, MergeSchedule::Forward).unwrap();
        let reverse = colimit_finset(&diagram, &f, MergeSchedule::Reverse).unwrap();
        assert_eq!(forward, reverse);
    }

    #[test]
    fn extension_at_embedded_objects_recovers_the_values() {
        let c = arrow();
        let f = arrow_task(&c);
        let at_a = kan_extend(&f, &yoneda_embed(&c, &"A".into()).unwrap()).unwrap();
        assert_eq!(at_a.len(), 1);
        let at_b = kan_extend(&f, &yoneda_embed(&c, &"B".into()).unwrap()).unwrap();
        assert_eq!(at_b.len(), 2);
    }

    #[test]
    fn constant_singleton_collapses_connected_diagrams() {
        let c = arrow();
        let f = constant_functor(c.clone(), Variance::Covariant, FinSet::new(["*"]).unwrap()).unwrap();
        let hb = yoneda_embed(&c, &"B".into()).unwrap();
        assert_eq!(kan_extend(&f, &hb).unwrap().len(), 1);
    }

    #[test]
    fn extension_map_respects_identities_and_composition() {
        let c = arrow();
        let f = arrow_task(&c);
        let hb = yoneda_embed(&c, &"B".into()).unwrap();
        let ident = NatTransformation::identity(&hb);
        let on_classes = kan_extend_map(&f, &ident).unwrap();
        assert_eq!(on_classes, SetFunction::identity(kan_extend(&f, &hb).unwrap()));

        let along = yoneda_embed_morphism(&c, &"f".into()).unwrap();
        let composite_transform = NatTransformation::vertical(&ident, &along).unwrap();
        let lhs = kan_extend_map(&f, &composite_transform).unwrap();
        let rhs = on_classes.after(&kan_extend_map(&f, &along).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn fine_tuning_identity_holds_on_handmade_functors() {
        let c = arrow();
        let report = check_fine_tuning_theorem(&c, &arrow_task(&c)).unwrap();
        assert_eq!(report.bijection_at(&"A".into()).unwrap().target().len(), 1);
        assert_eq!(report.bijection_at(&"B".into()).unwrap().target().len(), 2);

        let from_a = corepresentable(&c, &"A".into()).unwrap();
        check_fine_tuning_theorem(&c, &from_a).unwrap();

        let involution = CategoryBuilder::new()
            .object("Z")
            .morphism("e", "Z", "Z")
            .composite("e", "e", "id_Z")
            .build()
            .unwrap();
        let classifier = constant_functor(
            involution.clone(),
            Variance::Covariant,
            FinSet::new(["yes", "no"]).unwrap(),
        )
        .unwrap();
        check_fine_tuning_theorem(&involution, &classifier).unwrap();
    }
}
