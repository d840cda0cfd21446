//! Breadth-first exploration of a seed's mutation class.
//!
//! Seeds are considered equal up to relabeling of directions: the
//! canonical key of a seed is the lexicographically smallest rendering of
//! the relabeled seed over all relabelings that sort the frame strings,
//! trying every order within groups of equal strings. Relabeling renames
//! directions only, so frame elements keep their coordinates in the
//! shared ambient torus and the key is comparable across a whole
//! mutation class. Traversal itself works on raw, unrelabeled seeds, so a
//! fixed mutation word means the same directions on the quantum seed and
//! on its classical twin; canonical keys only deduplicate.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde_json::{json, Value};

use crate::error::EngineError;
use crate::seeds::Seed;

/// Exploration budgets. Exceeding one stops growth and clears the
/// `complete` flag instead of erroring.
#[derive(Clone, Copy, Debug)]
pub struct GraphLimits {
    pub max_nodes: usize,
    pub max_depth: usize,
    pub safety: u64,
}

impl Default for GraphLimits {
    fn default() -> Self {
        GraphLimits {
            max_nodes: 256,
            max_depth: 32,
            safety: crate::torus::DEFAULT_DIVISION_SAFETY,
        }
    }
}

/// One mutation class in the graph, represented by the first seed that
/// reached it.
#[derive(Clone, Debug)]
pub struct GraphNode {
    pub key: String,
    pub seed: Seed,
    pub depth: usize,
}

/// An undirected edge between two classes, labeled by the mutation
/// direction as seen from the representative of `from`. Parallel
/// connections between the same pair collapse into one edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    pub direction: usize,
}

/// The explored part of an exchange graph.
#[derive(Clone, Debug)]
pub struct ExchangeGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
    pub complete: bool,
}

/// The canonical key of a seed under relabeling of directions.
pub fn canonical_key(seed: &Seed) -> String {
    let rendered = seed.render_frame();
    let n = rendered.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| rendered[a].cmp(&rendered[b]));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        match groups.last_mut() {
            Some(group) if rendered[group[0]] == rendered[idx] => group.push(idx),
            _ => groups.push(vec![idx]),
        }
    }

    let mut best: Option<String> = None;
    let mut candidate = Vec::with_capacity(n);
    enumerate_group_orders(&groups, 0, &mut candidate, &mut |perm| {
        let key = render_key(&seed.relabel_directions(perm));
        if best.as_ref().map_or(true, |b| key < *b) {
            best = Some(key);
        }
    });
    best.expect("at least one relabeling candidate")
}

/// Walks every permutation that reorders directions within groups of
/// equal frame strings, keeping the groups themselves in sorted order.
fn enumerate_group_orders(
    groups: &[Vec<usize>],
    depth: usize,
    prefix: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if depth == groups.len() {
        visit(prefix);
        return;
    }
    let mut members = groups[depth].clone();
    permute_in_place(&mut members, 0, &mut |arrangement| {
        let len = arrangement.len();
        prefix.extend_from_slice(arrangement);
        enumerate_group_orders(groups, depth + 1, prefix, visit);
        prefix.truncate(prefix.len() - len);
    });
}

fn permute_in_place(items: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start + 1 >= items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute_in_place(items, start + 1, visit);
        items.swap(start, i);
    }
}

fn render_key(seed: &Seed) -> String {
    let frames = seed.render_frame().join(" ; ");
    let lambda: Vec<String> = seed
        .lambda()
        .residues()
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    let b: Vec<String> = seed
        .btilde()
        .entries()
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    let ex: Vec<String> = seed.exchangeable().iter().map(|k| k.to_string()).collect();
    let inv: Vec<String> = seed.inverted().iter().map(|k| k.to_string()).collect();
    format!(
        "F[{frames}] L[{}] B[{}] E[{}] I[{}]",
        lambda.join(";"),
        b.join(";"),
        ex.join(","),
        inv.join(",")
    )
}

/// Explores the mutation class of a seed breadth-first.
pub fn explore(seed: &Seed, limits: &GraphLimits) -> Result<ExchangeGraph, EngineError> {
    let mut nodes = Vec::new();
    let mut by_key: BTreeMap<String, usize> = BTreeMap::new();
    let mut edge_pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut edges = Vec::new();
    let mut complete = true;

    let key0 = canonical_key(seed);
    nodes.push(GraphNode {
        key: key0.clone(),
        seed: seed.clone(),
        depth: 0,
    });
    by_key.insert(key0, 0);
    let mut queue: VecDeque<usize> = VecDeque::from([0]);

    while let Some(idx) = queue.pop_front() {
        let depth = nodes[idx].depth;
        if depth >= limits.max_depth {
            complete = false;
            continue;
        }
        let directions: Vec<usize> = nodes[idx].seed.exchangeable().to_vec();
        for k in directions {
            let neighbor = nodes[idx].seed.mutate(k, limits.safety)?;
            let key = canonical_key(&neighbor);
            let to = match by_key.get(&key) {
                Some(&existing) => existing,
                None => {
                    if nodes.len() >= limits.max_nodes {
                        complete = false;
                        continue;
                    }
                    let new_idx = nodes.len();
                    nodes.push(GraphNode {
                        key: key.clone(),
                        seed: neighbor,
                        depth: depth + 1,
                    });
                    by_key.insert(key, new_idx);
                    queue.push_back(new_idx);
                    new_idx
                }
            };
            let pair = (idx.min(to), idx.max(to));
            if idx != to && edge_pairs.insert(pair) {
                edges.push(GraphEdge {
                    from: idx,
                    to,
                    direction: k,
                });
            }
        }
    }

    Ok(ExchangeGraph {
        nodes,
        edges,
        complete,
    })
}

impl ExchangeGraph {
    /// Renders the graph in DOT format, one line per node with its frame,
    /// and one undirected edge per connection labeled by direction
    /// (1-based).
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph exchange {\n");
        for (i, node) in self.nodes.iter().enumerate() {
            let label = node
                .seed
                .render_frame()
                .join("\\n")
                .replace('"', "\\\"");
            out.push_str(&format!("  s{i} [label=\"s{i}\\n{label}\"];\n"));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  s{} -- s{} [label=\"{}\"];\n",
                e.from,
                e.to,
                e.direction + 1
            ));
        }
        out.push_str("}\n");
        out
    }

    /// A JSON summary: node count, edge list (1-based directions), depths
    /// and the completeness flag.
    pub fn to_json(&self) -> Value {
        json!({
            "nodes": self.nodes.len(),
            "edges": self.edges.len(),
            "complete": self.complete,
            "depths": self.nodes.iter().map(|n| n.depth).collect::<Vec<_>>(),
            "keys": self.nodes.iter().map(|n| n.key.clone()).collect::<Vec<_>>(),
            "edge_list": self
                .edges
                .iter()
                .map(|e| json!({"from": e.from, "to": e.to, "direction": e.direction + 1}))
                .collect::<Vec<_>>(),
        })
    }
}

/// The outcome of the lockstep comparison between a seed's mutation class
/// and the class of its classical twin at order one.
#[derive(Clone, Debug)]
pub struct ShadowComparison {
    pub isomorphic: bool,
    pub quantum_nodes: usize,
    pub classical_nodes: usize,
    pub complete: bool,
    /// A mutation word separating the two graphs, when one exists.
    pub witness: Option<Vec<usize>>,
}

/// Compares the mutation class of a seed with the class of its classical
/// twin: the standard seed at order one with the same exchange matrix.
///
/// Both sides are traversed by the same mutation words, so classes must
/// match one to one; the first word where the pairing fails is returned
/// as a witness. Requires the coprimality assumption, since without it
/// the classical comparison is not meaningful.
pub fn classical_shadow_comparison(
    seed: &Seed,
    limits: &GraphLimits,
) -> Result<ShadowComparison, EngineError> {
    seed.ensure_coprime()?;
    let classical = seed.classical_twin()?;

    let mut q_ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut c_ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut q_to_c: BTreeMap<usize, usize> = BTreeMap::new();
    let mut c_to_q: BTreeMap<usize, usize> = BTreeMap::new();
    let mut complete = true;

    struct PairNode {
        quantum: Seed,
        classical: Seed,
        word: Vec<usize>,
    }

    let mut queue: VecDeque<PairNode> = VecDeque::new();
    q_ids.insert(canonical_key(seed), 0);
    c_ids.insert(canonical_key(&classical), 0);
    q_to_c.insert(0, 0);
    c_to_q.insert(0, 0);
    queue.push_back(PairNode {
        quantum: seed.clone(),
        classical,
        word: Vec::new(),
    });

    while let Some(node) = queue.pop_front() {
        if node.word.len() >= limits.max_depth {
            complete = false;
            continue;
        }
        for &k in &node.quantum.exchangeable().to_vec() {
            let q_next = node.quantum.mutate(k, limits.safety)?;
            let c_next = node.classical.mutate(k, limits.safety)?;
            let q_key = canonical_key(&q_next);
            let c_key = canonical_key(&c_next);
            let mut word = node.word.clone();
            word.push(k);

            let q_known = q_ids.get(&q_key).copied();
            let c_known = c_ids.get(&c_key).copied();
            match (q_known, c_known) {
                (Some(qi), Some(ci)) => {
                    if q_to_c.get(&qi) != Some(&ci) {
                        return Ok(ShadowComparison {
                            isomorphic: false,
                            quantum_nodes: q_ids.len(),
                            classical_nodes: c_ids.len(),
                            complete,
                            witness: Some(word),
                        });
                    }
                }
                (None, None) => {
                    if q_ids.len() >= limits.max_nodes {
                        complete = false;
                        continue;
                    }
                    let qi = q_ids.len();
                    let ci = c_ids.len();
                    q_ids.insert(q_key, qi);
                    c_ids.insert(c_key, ci);
                    q_to_c.insert(qi, ci);
                    c_to_q.insert(ci, qi);
                    queue.push_back(PairNode {
                        quantum: q_next,
                        classical: c_next,
                        word,
                    });
                }
                _ => {
                    // One side closed a cycle the other side did not.
                    return Ok(ShadowComparison {
                        isomorphic: false,
                        quantum_nodes: q_ids.len(),
                        classical_nodes: c_ids.len(),
                        complete,
                        witness: Some(word),
                    });
                }
            }
        }
    }

    Ok(ShadowComparison {
        isomorphic: true,
        quantum_nodes: q_ids.len(),
        classical_nodes: c_ids.len(),
        complete,
        witness: None,
    })
}

/// Applies a mutation word left to right.
pub fn apply_word(seed: &Seed, word: &[usize], safety: u64) -> Result<Seed, EngineError> {
    let mut current = seed.clone();
    for &k in word {
        current = current.mutate(k, safety)?;
    }
    Ok(current)
}
