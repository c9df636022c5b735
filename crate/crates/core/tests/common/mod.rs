//! Fixtures and independent oracles shared by the integration suites.
//!
//! The oracles re-derive searched quantities by a different method than the
//! engine uses (odometer enumeration instead of pruned depth-first search,
//! sweep refinement instead of union-find), so agreement between the two is
//! evidence rather than tautology.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use fincat::{
    build_contrastive_category, build_language_category, build_masked_category,
    build_rotation_category, constant_functor, coproduct_functor, corepresentable,
    generate_random_category, product_functor, relabel_functor, yoneda_embed, CatFunctor,
    CategoryBuilder, CategoryOfElements, ColimitResult, DistObject, FinCategory, FinSet, MarkovLM,
    MaskSpec, MaskSplit, ObjectId, SetFunctor, UnsolvableWitness, Variance, WeightedGraph,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BUDGET: u64 = fincat::DEFAULT_ENUMERATION_BUDGET;

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn sentence(s: &str) -> Vec<String> {
    s.chars().map(|c| c.to_string()).collect()
}

/// The linear order on `n + 1` objects: `v0 -> v1 -> ... -> vn`, one
/// morphism `e{i}_{j}` per pair `i < j`. Thin and skeletal.
pub fn linear_category(n: usize) -> FinCategory {
    let mut b = CategoryBuilder::new();
    for i in 0..=n {
        b = b.object(format!("v{i}"));
    }
    for i in 0..=n {
        for j in (i + 1)..=n {
            b = b.morphism(format!("e{i}_{j}"), format!("v{i}"), format!("v{j}"));
        }
    }
    for i in 0..=n {
        for j in (i + 1)..=n {
            for k in (j + 1)..=n {
                b = b.composite(format!("e{i}_{j}"), format!("e{j}_{k}"), format!("e{i}_{k}"));
            }
        }
    }
    b.build().expect("linear orders satisfy the category laws")
}

/// Two objects joined by `k` parallel morphisms.
pub fn parallel_category(k: usize) -> FinCategory {
    let mut b = CategoryBuilder::new().object("A").object("B");
    for i in 0..k {
        b = b.morphism(format!("f{i}"), "A", "B");
    }
    b.build()
        .expect("parallel morphisms need no composition entries")
}

/// One object carrying a self-inverse symmetry.
pub fn involution_category() -> FinCategory {
    CategoryBuilder::new()
        .object("s")
        .morphism("swap", "s", "s")
        .composite("swap", "swap", "id_s")
        .build()
        .expect("the involution table is associative")
}

/// A weighted triangle whose similarity structure is a clique.
pub fn triangle_graph() -> WeightedGraph {
    WeightedGraph::new(
        vec!["x".into(), "y".into(), "z".into()],
        [
            ("x".to_string(), "y".to_string(), rat(1, 2)),
            ("y".to_string(), "z".to_string(), rat(1, 4)),
            ("x".to_string(), "z".to_string(), rat(1, 3)),
        ],
        false,
    )
    .expect("triangle weights are symmetric and positive")
}

pub fn sample_mask_spec() -> MaskSpec {
    MaskSpec::new(vec![
        MaskSplit {
            full: "img1".into(),
            revealed: "left-half".into(),
            mask: "right-half".into(),
        },
        MaskSplit {
            full: "img2".into(),
            revealed: "left-half".into(),
            mask: "bottom-corner".into(),
        },
    ])
    .expect("distinct roles per split")
}

/// The two-token window-2 model behind the worked successor example.
pub fn two_token_lm() -> MarkovLM {
    let next: BTreeMap<Vec<String>, BTreeMap<String, BigRational>> = [
        (sentence("aa"), [("a".to_string(), rat(1, 1))].into_iter().collect()),
        (
            sentence("ab"),
            [("a".to_string(), rat(1, 2)), ("b".to_string(), rat(1, 2))]
                .into_iter()
                .collect(),
        ),
        (
            sentence("ba"),
            [("a".to_string(), rat(1, 4)), ("b".to_string(), rat(3, 4))]
                .into_iter()
                .collect(),
        ),
        (sentence("bb"), [("b".to_string(), rat(1, 1))].into_iter().collect()),
    ]
    .into_iter()
    .collect();
    MarkovLM::new(vec!["a".into(), "b".into()], 2, next).expect("rows sum to one")
}

/// One representative category per dedicated builder.
pub fn builder_categories() -> Vec<FinCategory> {
    let lm = two_token_lm();
    let seed = DistObject::new(
        [(sentence("ba"), rat(1, 2)), (sentence("ab"), rat(1, 2))]
            .into_iter()
            .collect(),
    )
    .expect("masses sum to one");
    vec![
        build_rotation_category(1).expect("one base image"),
        build_rotation_category(2).expect("two base images"),
        build_contrastive_category(&triangle_graph())
            .expect("the triangle is a clique")
            .category,
        build_masked_category(&sample_mask_spec()).expect("bipartite splits"),
        build_language_category(&lm, std::slice::from_ref(&seed), 3, 64)
            .expect("bounded closure terminates")
            .category()
            .clone(),
        linear_category(3),
        parallel_category(2),
        involution_category(),
    ]
}

/// The fixed verification suite: every builder category plus small seeded
/// random categories kept enumeration-friendly.
pub fn suite_categories() -> Vec<FinCategory> {
    let mut suite = builder_categories();
    for seed in 0..10u64 {
        suite.push(generate_random_category(seed, 4, 2).expect("generator output is valid"));
    }
    suite
}

/// A spread of lawful presheaves on `c`: every representable, constants,
/// and combinator mixes of the representables.
pub fn presheaf_menu(c: &FinCategory) -> Vec<SetFunctor> {
    let mut menu: Vec<SetFunctor> = c
        .objects()
        .iter()
        .map(|x| yoneda_embed(c, x).expect("embedding exists"))
        .collect();
    let first = menu[0].clone();
    let last = menu[menu.len() - 1].clone();
    menu.push(
        constant_functor(
            c.clone(),
            Variance::Contravariant,
            FinSet::new(["c0"]).expect("distinct elements"),
        )
        .expect("constants are lawful"),
    );
    menu.push(
        constant_functor(
            c.clone(),
            Variance::Contravariant,
            FinSet::new(["c0", "c1"]).expect("distinct elements"),
        )
        .expect("constants are lawful"),
    );
    menu.push(product_functor(&first, &last).expect("same base and variance"));
    menu.push(coproduct_functor(&first, &last).expect("same base and variance"));
    menu.push(relabel_functor(&first, |_, e| format!("r.{e}")).expect("prefixing keeps names distinct"));
    menu
}

/// At least five covariant functors on `c`: constants, corepresentables,
/// and combinator mixes.
pub fn covariant_menu(c: &FinCategory) -> Vec<SetFunctor> {
    let objects = c.objects();
    let first = corepresentable(c, &objects[0]).expect("object exists");
    let last = corepresentable(c, &objects[objects.len() - 1]).expect("object exists");
    vec![
        constant_functor(
            c.clone(),
            Variance::Covariant,
            FinSet::new(["t0"]).expect("distinct elements"),
        )
        .expect("constants are lawful"),
        constant_functor(
            c.clone(),
            Variance::Covariant,
            FinSet::new(["t0", "t1"]).expect("distinct elements"),
        )
        .expect("constants are lawful"),
        first.clone(),
        last.clone(),
        coproduct_functor(&first, &last).expect("same base and variance"),
        relabel_functor(&last, |_, e| format!("r.{e}")).expect("prefixing keeps names distinct"),
    ]
}

/// The raw family-space size of transformations from the embedding of `x`
/// into `f`, before any pruning; used to keep generated suites within the
/// enumeration budget by construction.
pub fn family_space_bound(c: &FinCategory, x: &ObjectId, f: &SetFunctor) -> u128 {
    let mut total: u128 = 1;
    for w in c.objects() {
        let exponent = c.hom(w, x).expect("objects exist").len();
        let base = f.value(w).expect("object exists").len() as u128;
        for _ in 0..exponent {
            total = total.saturating_mul(base);
        }
    }
    total
}

/// Independent oracle: counts natural transformations by odometer
/// enumeration over every raw component family, no pruning, checking each
/// candidate against the naturality square of every morphism. Exponential;
/// keep the shapes small.
pub fn naive_transformation_count(f1: &SetFunctor, f2: &SetFunctor) -> usize {
    naive_families(f1, f2, false)
}

/// The same odometer restricted to bijective families: whether any natural
/// isomorphism exists.
pub fn naive_iso_exists(f1: &SetFunctor, f2: &SetFunctor) -> bool {
    naive_families(f1, f2, true) > 0
}

fn naive_families(f1: &SetFunctor, f2: &SetFunctor, bijections_only: bool) -> usize {
    assert_eq!(f1.base(), f2.base(), "oracle inputs share a base");
    assert_eq!(f1.variance(), f2.variance(), "oracle inputs share a variance");
    let base = f1.base();
    let objects = base.objects();
    let values1: Vec<&FinSet> = objects
        .iter()
        .map(|x| f1.value(x).expect("object exists"))
        .collect();
    let values2: Vec<&FinSet> = objects
        .iter()
        .map(|x| f2.value(x).expect("object exists"))
        .collect();
    if values1
        .iter()
        .zip(&values2)
        .any(|(v1, v2)| !v1.is_empty() && v2.is_empty())
    {
        return 0;
    }

    // One digit per (object, source element); the digit selects the image
    // among the target elements at the same object.
    let mut slots: Vec<(usize, String)> = Vec::new();
    for (i, v) in values1.iter().enumerate() {
        for e in v.iter() {
            slots.push((i, e.to_string()));
        }
    }
    let mut slot_index: BTreeMap<(usize, &str), usize> = BTreeMap::new();
    for (k, (i, e)) in slots.iter().enumerate() {
        slot_index.insert((*i, e.as_str()), k);
    }
    let element_at = |object: usize, digit: usize| -> &str {
        values2[object].iter().nth(digit).expect("digit below radix")
    };
    let apply = |digits: &[usize], object: usize, element: &str| -> &str {
        element_at(object, digits[slot_index[&(object, element)]])
    };

    let bijective = |digits: &[usize]| -> bool {
        for (i, v1) in values1.iter().enumerate() {
            if v1.len() != values2[i].len() {
                return false;
            }
            let images: BTreeSet<usize> = slots
                .iter()
                .enumerate()
                .filter(|(_, (obj, _))| *obj == i)
                .map(|(k, _)| digits[k])
                .collect();
            if images.len() != v1.len() {
                return false;
            }
        }
        true
    };

    let natural = |digits: &[usize]| -> bool {
        for m in base.morphisms() {
            let dom = base.object_index(&m.dom).expect("morphism endpoints exist");
            let cod = base.object_index(&m.cod).expect("morphism endpoints exist");
            let action1 = f1.action(&m.name).expect("total action");
            let action2 = f2.action(&m.name).expect("total action");
            match f1.variance() {
                Variance::Contravariant => {
                    // Both paths F1(cod) -> F2(dom) must agree.
                    for b in values1[cod].iter() {
                        let via_source = apply(digits, dom, action1.apply(b).expect("total"));
                        let via_target = action2
                            .apply(apply(digits, cod, b))
                            .expect("total");
                        if via_source != via_target {
                            return false;
                        }
                    }
                }
                Variance::Covariant => {
                    // Both paths F1(dom) -> F2(cod) must agree.
                    for a in values1[dom].iter() {
                        let via_source = apply(digits, cod, action1.apply(a).expect("total"));
                        let via_target = action2
                            .apply(apply(digits, dom, a))
                            .expect("total");
                        if via_source != via_target {
                            return false;
                        }
                    }
                }
            }
        }
        true
    };

    let mut digits = vec![0usize; slots.len()];
    let mut count = 0;
    loop {
        if (!bijections_only || bijective(&digits)) && natural(&digits) {
            count += 1;
        }
        let mut pos = slots.len();
        loop {
            if pos == 0 {
                return count;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < values2[slots[pos].0].len() {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Independent oracle for finite colimits: sweep refinement to a fixpoint
/// instead of union-find. Returns the partition of
/// `(diagram object index, element)` members.
pub fn refinement_colimit(
    diagram: &CategoryOfElements,
    f: &SetFunctor,
) -> Vec<BTreeSet<(usize, String)>> {
    let base_pairs = diagram.pairs();
    let mut members: Vec<(usize, String)> = Vec::new();
    for (i, (x, _)) in base_pairs.iter().enumerate() {
        for u in f.value(x).expect("pair object exists").iter() {
            members.push((i, u.to_string()));
        }
    }
    let mut index: BTreeMap<(usize, String), usize> = BTreeMap::new();
    for (k, m) in members.iter().enumerate() {
        index.insert(m.clone(), k);
    }

    let cat = diagram.category();
    let mut relations: Vec<(usize, usize)> = Vec::new();
    for m in cat.morphisms() {
        let dom_idx = cat.object_index(&m.dom).expect("diagram object exists");
        let cod_idx = cat.object_index(&m.cod).expect("diagram object exists");
        let projected = diagram
            .projection()
            .apply_morphism(&m.name)
            .expect("projection is total");
        let action = f.action(projected).expect("base morphism acts");
        let (x, _) = &base_pairs[dom_idx];
        for u in f.value(x).expect("object exists").iter() {
            let v = action.apply(u).expect("action is total");
            relations.push((
                index[&(dom_idx, u.to_string())],
                index[&(cod_idx, v.to_string())],
            ));
        }
    }

    let mut class: Vec<usize> = (0..members.len()).collect();
    loop {
        let mut changed = false;
        for &(a, b) in &relations {
            let (ca, cb) = (class[a], class[b]);
            if ca != cb {
                let (lo, hi) = if ca < cb { (ca, cb) } else { (cb, ca) };
                for c in class.iter_mut() {
                    if *c == hi {
                        *c = lo;
                    }
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut grouped: BTreeMap<usize, BTreeSet<(usize, String)>> = BTreeMap::new();
    for (k, m) in members.iter().enumerate() {
        grouped.entry(class[k]).or_default().insert(m.clone());
    }
    grouped.into_values().collect()
}

/// Asserts the engine colimit and the refinement oracle partition the same
/// members identically, without relying on member naming conventions.
pub fn assert_colimit_matches_oracle(
    diagram: &CategoryOfElements,
    f: &SetFunctor,
    result: &ColimitResult,
) {
    let oracle = refinement_colimit(diagram, f);
    let mut rep_of: BTreeMap<(usize, String), String> = BTreeMap::new();
    for (i, (x, _)) in diagram.pairs().iter().enumerate() {
        let injection = &result.injections()[i];
        for u in f.value(x).expect("object exists").iter() {
            rep_of.insert(
                (i, u.to_string()),
                injection.apply(u).expect("injection is total").to_string(),
            );
        }
    }
    let oracle_members: usize = oracle.iter().map(|c| c.len()).sum();
    assert_eq!(rep_of.len(), oracle_members, "same member universe");
    for class in &oracle {
        let reps: BTreeSet<&String> = class.iter().map(|m| &rep_of[m]).collect();
        assert_eq!(reps.len(), 1, "each oracle class maps onto one representative");
    }
    assert_eq!(
        oracle.len(),
        result.representatives().len(),
        "same class count, so the partitions coincide"
    );
}

/// Re-derives an unsolvability witness from scratch: cardinality clashes
/// are recounted against the hom-sets; no-isomorphism verdicts are
/// re-established by unpruned bijection search.
pub fn verify_unsolvable_witness(
    c: &FinCategory,
    task: &SetFunctor,
    prompt: &ObjectId,
    witness: &UnsolvableWitness,
) {
    match witness {
        UnsolvableWitness::CardinalityMismatch {
            object,
            task_size,
            prompt_size,
        } => {
            assert_eq!(
                *task_size,
                task.value(object).expect("witness object exists").len(),
                "recounted task value at {object}"
            );
            assert_eq!(
                *prompt_size,
                c.hom(object, prompt).expect("witness objects exist").len(),
                "recounted hom-set into {prompt}"
            );
            assert_ne!(task_size, prompt_size, "the sizes must actually differ");
        }
        UnsolvableWitness::NoNaturalIso => {
            let embedded = yoneda_embed(c, prompt).expect("prompt exists");
            assert!(
                !naive_iso_exists(&embedded, task),
                "odometer search confirms no natural isomorphism onto the task"
            );
        }
    }
}

/// Seeded random model over 2-3 tokens with window 1-2; every context gets
/// a full exact-rational transition row.
pub fn random_lm(seed: u64) -> MarkovLM {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let token_count = rng.gen_range(2..=3usize);
    let tokens: Vec<String> = (0..token_count).map(|i| format!("t{i}")).collect();
    let window = rng.gen_range(1..=2usize);
    let mut next = BTreeMap::new();
    for ctx in contexts(&tokens, window) {
        let mut weights: Vec<i64> = (0..token_count).map(|_| rng.gen_range(0..=4i64)).collect();
        if weights.iter().all(|&w| w == 0) {
            weights[0] = 1;
        }
        let total: i64 = weights.iter().sum();
        let row: BTreeMap<String, BigRational> = tokens
            .iter()
            .zip(&weights)
            .filter(|(_, &w)| w > 0)
            .map(|(t, &w)| (t.clone(), rat(w, total)))
            .collect();
        next.insert(ctx, row);
    }
    MarkovLM::new(tokens, window, next).expect("normalized rows sum to one")
}

/// All token sequences of the given length, in lexicographic order.
pub fn contexts(tokens: &[String], window: usize) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..window {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                tokens.iter().map(move |t| {
                    let mut s = prefix.clone();
                    s.push(t.clone());
                    s
                })
            })
            .collect();
    }
    out
}

/// Seeded random exact distribution supported on full-window contexts.
pub fn random_dist(seed: u64, lm: &MarkovLM) -> DistObject {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let ctxs = contexts(lm.tokens(), lm.window());
    let mut weights: Vec<i64> = ctxs.iter().map(|_| rng.gen_range(0..=5i64)).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[0] = 1;
    }
    let total: i64 = weights.iter().sum();
    let support: BTreeMap<Vec<String>, BigRational> = ctxs
        .into_iter()
        .zip(weights)
        .filter(|(_, w)| *w > 0)
        .map(|(s, w)| (s, rat(w, total)))
        .collect();
    DistObject::new(support).expect("positive masses summing to one")
}

/// Seeded symmetric PSD matrix with strictly positive entries (a product
/// `A^T A` of an entrywise-positive random matrix), as a graph plus the raw
/// matrix for independent comparison.
pub fn random_psd_graph(seed: u64) -> (WeightedGraph, Vec<Vec<f64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = rng.gen_range(1..=8usize);
    let gram = positive_gram(&mut rng, size);
    (graph_from_gram(&gram, true), gram)
}

/// The same construction with the diagonal removed: positive off-diagonal
/// entries and zero trace, hence never PSD for size >= 2.
pub fn random_hollow_graph(seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = rng.gen_range(2..=8usize);
    let mut gram = positive_gram(&mut rng, size);
    for (i, row) in gram.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    graph_from_gram(&gram, false)
}

fn positive_gram(rng: &mut ChaCha8Rng, size: usize) -> Vec<Vec<f64>> {
    let a: Vec<Vec<f64>> = (0..size)
        .map(|_| (0..size).map(|_| rng.gen_range(0.05..1.0)).collect())
        .collect();
    let mut gram = vec![vec![0.0f64; size]; size];
    for i in 0..size {
        for j in 0..size {
            gram[i][j] = (0..size).map(|k| a[k][i] * a[k][j]).sum();
        }
    }
    gram
}

pub fn graph_from_gram(gram: &[Vec<f64>], allow_self_loops: bool) -> WeightedGraph {
    let size = gram.len();
    let nodes: Vec<String> = (0..size).map(|i| format!("v{i}")).collect();
    let mut entries = Vec::new();
    for i in 0..size {
        for j in i..size {
            if gram[i][j] != 0.0 {
                entries.push((
                    nodes[i].clone(),
                    nodes[j].clone(),
                    BigRational::from_float(gram[i][j]).expect("finite weight"),
                ));
            }
        }
    }
    WeightedGraph::new(nodes, entries, allow_self_loops).expect("symmetric non-negative entries")
}

/// Inclusion of the interval `[offset, offset + len]` into the linear order
/// on `n + 1` objects; a full embedding between skeletal categories.
pub fn interval_embedding(len: usize, n: usize, offset: usize) -> CatFunctor {
    assert!(offset + len <= n, "interval must fit");
    let small = linear_category(len);
    let big = linear_category(n);
    let mut on_objects = BTreeMap::new();
    let mut on_morphisms = BTreeMap::new();
    for i in 0..=len {
        on_objects.insert(format!("v{i}"), format!("v{}", i + offset));
        for j in (i + 1)..=len {
            on_morphisms.insert(
                format!("e{i}_{j}"),
                format!("e{}_{}", i + offset, j + offset),
            );
        }
    }
    CatFunctor::new(small, big, &on_objects, &on_morphisms)
        .expect("interval inclusion preserves composition")
}

/// An embedding that is deliberately not full: the single arrow lands on
/// `f{hit}` among `k >= 2` parallel arrows, leaving the others uncovered.
pub fn non_full_arrow_embedding(k: usize, hit: usize) -> CatFunctor {
    assert!(k >= 2 && hit < k);
    let source = linear_category(1);
    let target = parallel_category(k);
    let on_objects: BTreeMap<String, String> = [
        ("v0".to_string(), "A".to_string()),
        ("v1".to_string(), "B".to_string()),
    ]
    .into_iter()
    .collect();
    let on_morphisms: BTreeMap<String, String> =
        [("e0_1".to_string(), format!("f{hit}"))].into_iter().collect();
    CatFunctor::new(source, target, &on_objects, &on_morphisms)
        .expect("a single-arrow assignment is functorial")
}

/// A functor defined by matching names: every object and morphism of `src`
/// must exist verbatim in `dst`.
pub fn name_inclusion(src: &FinCategory, dst: &FinCategory) -> CatFunctor {
    let on_objects: BTreeMap<String, String> = src
        .objects()
        .iter()
        .map(|o| (o.as_str().to_string(), o.as_str().to_string()))
        .collect();
    let on_morphisms: BTreeMap<String, String> = src
        .morphisms()
        .iter()
        .map(|m| (m.name.as_str().to_string(), m.name.as_str().to_string()))
        .collect();
    CatFunctor::new(src.clone(), dst.clone(), &on_objects, &on_morphisms)
        .expect("shared names carry the structure across")
}

/// The canonical table for any functor: the target embedding of each image
/// object. Unlike the checked constructor this never rejects, so corrupted
/// and non-full shapes can be assembled for the checkers.
pub fn canonical_table(functor: &CatFunctor) -> BTreeMap<ObjectId, SetFunctor> {
    functor
        .source()
        .objects()
        .iter()
        .map(|x| {
            let image = functor.apply_object(x).expect("functor is total");
            (
                x.clone(),
                yoneda_embed(functor.target(), image).expect("embedding exists"),
            )
        })
        .collect()
}

/// Whether no two distinct objects are isomorphic.
pub fn is_skeletal(c: &FinCategory) -> bool {
    let objects = c.objects();
    for (i, x) in objects.iter().enumerate() {
        for y in objects.iter().skip(i + 1) {
            if c.iso_objects(x, y).expect("objects are valid").is_some() {
                return false;
            }
        }
    }
    true
}
