//! Seeded random generation of valid finite categories.
//!
//! The construction is: sample a DAG on the chosen objects (edges only go
//! from lower to higher index, so the path category is finite), take the
//! free category of all paths, then quotient by randomly chosen
//! identifications of parallel paths. Identifications are closed into a
//! congruence before the quotient is taken, so the result always satisfies
//! the category axioms; the final `CategoryBuilder::build` re-checks them
//! all. Hom-sets are shrunk to `max_hom` by further identifications.
//!
//! Everything is driven by a ChaCha stream cipher seeded from the caller's
//! integer, so equal inputs produce byte-identical categories.

use crate::category::{CategoryBuilder, CategoryError, FinCategory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashMap};

/// Cap on the size of the intermediate free category.
pub const DEFAULT_MORPHISM_CAP: usize = 10_000;

const EDGE_PROB: f64 = 0.45;
const PARALLEL_PROB: f64 = 0.15;

pub fn generate_random_category(
    seed: u64,
    max_objects: usize,
    max_hom: usize,
) -> Result<FinCategory, CategoryError> {
    generate_random_category_capped(seed, max_objects, max_hom, DEFAULT_MORPHISM_CAP)
}

pub fn generate_random_category_capped(
    seed: u64,
    max_objects: usize,
    max_hom: usize,
    morphism_cap: usize,
) -> Result<FinCategory, CategoryError> {
    if max_objects == 0 {
        return Err(CategoryError::EmptyName("generator object bound"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_objects);
    let object_names: Vec<String> = (0..n).map(|i| format!("X{i}")).collect();

    let mut edges: Vec<(usize, usize)> = Vec::new();
    if max_hom > 0 {
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_bool(EDGE_PROB) {
                    edges.push((i, j));
                    if max_hom >= 2 && rng.gen_bool(PARALLEL_PROB) {
                        edges.push((i, j));
                    }
                }
            }
        }
    }

    let paths = enumerate_paths(n, &edges, morphism_cap)?;
    let mut quotient = Quotient::new(&paths);

    // A few random identifications of parallel non-identity paths.
    for _ in 0..rng.gen_range(0..=2u32) {
        let groups = quotient.parallel_groups();
        let candidates: Vec<&Vec<usize>> = groups.values().filter(|g| g.len() >= 2).collect();
        if candidates.is_empty() {
            break;
        }
        let group = candidates[rng.gen_range(0..candidates.len())];
        let a = rng.gen_range(0..group.len());
        let b = loop {
            let b = rng.gen_range(0..group.len());
            if b != a {
                break b;
            }
        };
        quotient.union_and_saturate(group[a], group[b]);
    }

    // Enforce the hom-set bound by merging surplus parallel classes.
    loop {
        let groups = quotient.parallel_groups();
        let Some(group) = groups.values().find(|g| g.len() > max_hom) else {
            break;
        };
        let a = rng.gen_range(0..group.len());
        let b = loop {
            let b = rng.gen_range(0..group.len());
            if b != a {
                break b;
            }
        };
        quotient.union_and_saturate(group[a], group[b]);
    }

    quotient.into_category(&object_names)
}

struct PathSet {
    /// Paths as generator-edge sequences, enumerated shortest-first.
    seqs: Vec<Vec<u32>>,
    ends: Vec<(usize, usize)>,
    by_seq: HashMap<Vec<u32>, usize>,
}

fn enumerate_paths(
    objects: usize,
    edges: &[(usize, usize)],
    cap: usize,
) -> Result<PathSet, CategoryError> {
    let mut set = PathSet {
        seqs: Vec::new(),
        ends: Vec::new(),
        by_seq: HashMap::new(),
    };
    for (k, &(a, b)) in edges.iter().enumerate() {
        set.by_seq.insert(vec![k as u32], set.seqs.len());
        set.seqs.push(vec![k as u32]);
        set.ends.push((a, b));
    }
    let mut cursor = 0;
    while cursor < set.seqs.len() {
        if objects + set.seqs.len() > cap {
            return Err(CategoryError::BudgetExceeded {
                required: objects + set.seqs.len(),
                cap,
            });
        }
        let (src, dst) = set.ends[cursor];
        let base = set.seqs[cursor].clone();
        for (k, &(a, b)) in edges.iter().enumerate() {
            if a == dst {
                let mut seq = base.clone();
                seq.push(k as u32);
                set.by_seq.insert(seq.clone(), set.seqs.len());
                set.seqs.push(seq);
                set.ends.push((src, b));
            }
        }
        cursor += 1;
    }
    if objects + set.seqs.len() > cap {
        return Err(CategoryError::BudgetExceeded {
            required: objects + set.seqs.len(),
            cap,
        });
    }
    Ok(set)
}

/// Union-find over paths, kept closed under the composition congruence:
/// whenever two classes are merged, composites built from them are merged
/// as well, so the induced composition table on classes is well defined.
struct Quotient<'a> {
    paths: &'a PathSet,
    parent: Vec<usize>,
}

impl<'a> Quotient<'a> {
    fn new(paths: &'a PathSet) -> Self {
        Quotient {
            parent: (0..paths.seqs.len()).collect(),
            paths,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Lowest-index root wins, keeping class names deterministic.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    fn concat(&self, p: usize, q: usize) -> usize {
        let mut seq = self.paths.seqs[p].clone();
        seq.extend(&self.paths.seqs[q]);
        self.paths.by_seq[&seq]
    }

    fn union_and_saturate(&mut self, a: usize, b: usize) {
        debug_assert_eq!(self.paths.ends[a], self.paths.ends[b]);
        if !self.union(a, b) {
            return;
        }
        // Fixpoint: the induced table on classes must be single-valued.
        loop {
            let mut induced: HashMap<(usize, usize), usize> = HashMap::new();
            let mut pending: Vec<(usize, usize)> = Vec::new();
            for p in 0..self.paths.seqs.len() {
                for q in 0..self.paths.seqs.len() {
                    if self.paths.ends[p].1 != self.paths.ends[q].0 {
                        continue;
                    }
                    let key = (self.find(p), self.find(q));
                    let c = self.find(self.concat(p, q));
                    match induced.get(&key) {
                        Some(&prev) if prev != c => pending.push((prev, c)),
                        Some(_) => {}
                        None => {
                            induced.insert(key, c);
                        }
                    }
                }
            }
            if pending.is_empty() {
                break;
            }
            for (x, y) in pending {
                self.union(x, y);
            }
        }
    }

    /// Classes grouped by endpoints, members sorted, deterministic order.
    fn parallel_groups(&mut self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for p in 0..self.paths.seqs.len() {
            let r = self.find(p);
            if r == p {
                groups.entry(self.paths.ends[p]).or_default().push(p);
            }
        }
        groups
    }

    fn path_name(&self, p: usize) -> String {
        let names: Vec<String> = self.paths.seqs[p].iter().map(|&k| format!("g{k}")).collect();
        names.join(">")
    }

    fn into_category(mut self, object_names: &[String]) -> Result<FinCategory, CategoryError> {
        let n_paths = self.paths.seqs.len();
        let mut roots: Vec<usize> = (0..n_paths).filter(|&p| self.find(p) == p).collect();
        roots.sort_unstable();

        let mut b = CategoryBuilder::new();
        for name in object_names {
            b = b.object(name.clone());
        }
        for &r in &roots {
            let (src, dst) = self.paths.ends[r];
            b = b.morphism(self.path_name(r), object_names[src].clone(), object_names[dst].clone());
        }
        for &p in &roots {
            for &q in &roots {
                if self.paths.ends[p].1 != self.paths.ends[q].0 {
                    continue;
                }
                let c = self.find(self.concat(p, q));
                b = b.composite(self.path_name(p), self.path_name(q), self.path_name(c));
            }
        }
        b.build()
    }
}
