//! Weighted Louvain community detection and modularity.
//!
//! Determinism contract: node visitation order is shuffled once per level
//! from a seeded ChaCha8 stream and fixed for all sweeps of that level;
//! candidate communities are examined in first-encounter order (never hash
//! order); moves require strictly positive modularity gain. Identical
//! (network, seed, resolution) inputs therefore produce identical
//! partitions on every platform.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytics::node_strength;
use crate::network::KeywordNetwork;

/// Safety cap on move sweeps within one level; convergence normally takes
/// a handful because every move strictly increases Q.
const MAX_SWEEPS: usize = 100;

/// A node-to-community assignment with its modularity and the Q trace
/// after each aggregation level (nondecreasing by construction).
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub assignment: BTreeMap<String, usize>,
    pub modularity: f64,
    pub level_modularity: Vec<f64>,
}

/// Classic weighted modularity
/// Q = (1/2m) Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j),
/// computed per community as Σ_c [L_c/m − (D_c/2m)²]. Returns 0 when the
/// network has no edge weight. Panics if a node is missing from the
/// assignment (the partition must cover all nodes).
pub fn modularity(net: &KeywordNetwork, assignment: &BTreeMap<String, usize>) -> f64 {
    let m = net.total_edge_weight();
    if m == 0.0 {
        return 0.0;
    }
    let comm_of = |label: &String| -> usize {
        *assignment
            .get(label)
            .unwrap_or_else(|| panic!("partition does not cover node `{label}`"))
    };
    let mut internal: BTreeMap<usize, f64> = BTreeMap::new();
    for ((a, b), w) in &net.edges {
        if comm_of(a) == comm_of(b) {
            *internal.entry(comm_of(a)).or_insert(0.0) += w;
        }
    }
    let strength = node_strength(net).values;
    let mut degree_sum: BTreeMap<usize, f64> = BTreeMap::new();
    for (label, k) in &strength {
        *degree_sum.entry(comm_of(label)).or_insert(0.0) += k;
    }
    let mut q = 0.0;
    for (comm, d) in &degree_sum {
        let l = internal.get(comm).copied().unwrap_or(0.0);
        q += l / m - (d / (2.0 * m)).powi(2);
    }
    q
}

/// Working graph for one aggregation level. `adj` excludes self-loops,
/// which live in `self_w`; `k` includes twice the self weight; `m` is the
/// invariant total weight.
#[derive(Clone)]
struct LevelGraph {
    adj: Vec<Vec<(usize, f64)>>,
    self_w: Vec<f64>,
    k: Vec<f64>,
    m: f64,
}

impl LevelGraph {
    fn len(&self) -> usize {
        self.adj.len()
    }

    fn from_network(net: &KeywordNetwork) -> (Vec<String>, LevelGraph) {
        let labels: Vec<String> = net.nodes.keys().cloned().collect();
        let index: HashMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let mut adj = vec![Vec::new(); labels.len()];
        let mut m = 0.0;
        for ((a, b), w) in &net.edges {
            let (i, j) = (index[a.as_str()], index[b.as_str()]);
            adj[i].push((j, *w));
            adj[j].push((i, *w));
            m += w;
        }
        let self_w = vec![0.0; labels.len()];
        let k = degrees(&adj, &self_w);
        (labels, LevelGraph { adj, self_w, k, m })
    }
}

fn degrees(adj: &[Vec<(usize, f64)>], self_w: &[f64]) -> Vec<f64> {
    adj.iter()
        .enumerate()
        .map(|(i, nbrs)| nbrs.iter().map(|(_, w)| w).sum::<f64>() + 2.0 * self_w[i])
        .collect()
}

/// Q of `membership` (original node -> community) on the level-0 graph.
fn q_of(g: &LevelGraph, membership: &[usize]) -> f64 {
    if g.m == 0.0 {
        return 0.0;
    }
    let nc = membership.iter().copied().max().map_or(0, |c| c + 1);
    let mut internal = vec![0.0; nc];
    let mut degree_sum = vec![0.0; nc];
    for i in 0..g.len() {
        internal[membership[i]] += g.self_w[i];
        degree_sum[membership[i]] += g.k[i];
        for &(j, w) in &g.adj[i] {
            if j > i && membership[i] == membership[j] {
                internal[membership[i]] += w;
            }
        }
    }
    (0..nc)
        .map(|c| internal[c] / g.m - (degree_sum[c] / (2.0 * g.m)).powi(2))
        .sum()
}

/// Phase 1: greedy local moves. Returns the node-to-community map and
/// whether any node moved.
fn one_level(g: &LevelGraph, resolution: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
    let n = g.len();
    let mut comm: Vec<usize> = (0..n).collect();
    let mut sum_tot = g.k.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let inv_2m = 1.0 / (2.0 * g.m);
    let mut moved_any = false;
    let mut neigh_w: HashMap<usize, f64> = HashMap::new();
    let mut comm_order: Vec<usize> = Vec::new();
    for _ in 0..MAX_SWEEPS {
        let mut moved = false;
        for &node in &order {
            let cur = comm[node];
            neigh_w.clear();
            comm_order.clear();
            for &(nb, w) in &g.adj[node] {
                let c = comm[nb];
                match neigh_w.entry(c) {
                    std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += w,
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(w);
                        comm_order.push(c);
                    }
                }
            }
            sum_tot[cur] -= g.k[node];
            let gain = |c: usize| -> f64 {
                neigh_w.get(&c).copied().unwrap_or(0.0)
                    - resolution * g.k[node] * sum_tot[c] * inv_2m
            };
            let mut best = cur;
            let mut best_gain = gain(cur);
            for &c in &comm_order {
                if c == cur {
                    continue;
                }
                let g = gain(c);
                if g > best_gain {
                    best = c;
                    best_gain = g;
                }
            }
            sum_tot[best] += g.k[node];
            comm[node] = best;
            if best != cur {
                moved = true;
                moved_any = true;
            }
        }
        if !moved {
            break;
        }
    }
    (comm, moved_any)
}

/// Renumbers community ids to 0..k by first appearance; returns k.
fn renumber(comm: &mut [usize]) -> usize {
    let mut map: HashMap<usize, usize> = HashMap::new();
    for c in comm.iter_mut() {
        let next = map.len();
        *c = *map.entry(*c).or_insert(next);
    }
    map.len()
}

/// Phase 2: collapse communities into nodes; intra-community weight becomes
/// self-loop weight, preserving total weight and degrees.
fn aggregate(g: &LevelGraph, comm: &[usize], nc: usize) -> LevelGraph {
    let mut self_w = vec![0.0; nc];
    let mut maps: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); nc];
    for i in 0..g.len() {
        self_w[comm[i]] += g.self_w[i];
        for &(j, w) in &g.adj[i] {
            if j <= i {
                continue;
            }
            let (ci, cj) = (comm[i], comm[j]);
            if ci == cj {
                self_w[ci] += w;
            } else {
                *maps[ci].entry(cj).or_insert(0.0) += w;
                *maps[cj].entry(ci).or_insert(0.0) += w;
            }
        }
    }
    let adj: Vec<Vec<(usize, f64)>> = maps.into_iter().map(|m| m.into_iter().collect()).collect();
    let k = degrees(&adj, &self_w);
    LevelGraph {
        adj,
        self_w,
        k,
        m: g.m,
    }
}

/// Two-phase weighted Louvain. A zero-edge network yields singletons with
/// modularity 0. Community ids are contiguous from 0, numbered by first
/// appearance over lexicographically ordered node labels.
pub fn louvain(net: &KeywordNetwork, seed: u64, resolution: f64) -> Partition {
    let (labels, g0) = LevelGraph::from_network(net);
    let n = labels.len();
    let mut membership: Vec<usize> = (0..n).collect();
    let mut level_modularity = Vec::new();
    if n > 0 && g0.m > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = g0.clone();
        loop {
            let (mut comm, moved) = one_level(&g, resolution, &mut rng);
            if !moved {
                break;
            }
            let nc = renumber(&mut comm);
            for slot in membership.iter_mut() {
                *slot = comm[*slot];
            }
            level_modularity.push(q_of(&g0, &membership));
            if nc == g.len() {
                break;
            }
            g = aggregate(&g, &comm, nc);
        }
    }
    renumber(&mut membership);
    let assignment: BTreeMap<String, usize> = labels.into_iter().zip(membership).collect();
    let q = if net.total_edge_weight() == 0.0 {
        0.0
    } else {
        modularity(net, &assignment)
    };
    Partition {
        assignment,
        modularity: q,
        level_modularity,
    }
}

/// One community in a report: its size and its `top_k` nodes by strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityEntry {
    pub id: usize,
    pub size: usize,
    pub top_nodes: Vec<String>,
}

/// Communities in decreasing size, listed until their cumulative node share
/// strictly exceeds `coverage`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityReport {
    pub coverage: f64,
    pub top_k: usize,
    pub total_nodes: usize,
    pub communities: Vec<CommunityEntry>,
}

pub fn community_report(
    net: &KeywordNetwork,
    partition: &Partition,
    coverage: f64,
    top_k: usize,
) -> CommunityReport {
    let strength = node_strength(net).values;
    let mut members: BTreeMap<usize, Vec<&String>> = BTreeMap::new();
    for (label, comm) in &partition.assignment {
        members.entry(*comm).or_default().push(label);
    }
    let mut ordered: Vec<(usize, usize)> = members
        .iter()
        .map(|(id, labels)| (*id, labels.len()))
        .collect();
    ordered.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let total_nodes = partition.assignment.len();
    let mut communities = Vec::new();
    let mut covered = 0usize;
    for (id, size) in ordered {
        let mut labels: Vec<&String> = members[&id].clone();
        labels.sort_by(|a, b| {
            strength[b.as_str()]
                .partial_cmp(&strength[a.as_str()])
                .expect("finite strength")
                .then(a.cmp(b))
        });
        communities.push(CommunityEntry {
            id,
            size,
            top_nodes: labels.into_iter().take(top_k).cloned().collect(),
        });
        covered += size;
        if covered as f64 / total_nodes as f64 > coverage {
            break;
        }
    }
    CommunityReport {
        coverage,
        top_k,
        total_nodes,
        communities,
    }
}
