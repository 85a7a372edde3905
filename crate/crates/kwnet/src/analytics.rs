//! Global network properties, per-node metrics, and CDF data for plots.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::network::{KeywordNetwork, NetworkError};

/// The headline per-network numbers (one table row per configuration).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkProperties {
    pub num_nodes: usize,
    pub num_edges: usize,
    pub total_edge_weight: f64,
    pub largest_component: usize,
}

/// Computes node/edge counts, total edge weight, and the node count of the
/// largest connected component (isolated nodes are size-1 components).
pub fn properties(net: &KeywordNetwork) -> NetworkProperties {
    let labels: Vec<&String> = net.nodes.keys().collect();
    let index: BTreeMap<&str, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let mut dsu: Vec<usize> = (0..labels.len()).collect();
    fn find(dsu: &mut [usize], mut x: usize) -> usize {
        while dsu[x] != x {
            dsu[x] = dsu[dsu[x]];
            x = dsu[x];
        }
        x
    }
    for (a, b) in net.edges.keys() {
        let (ra, rb) = (
            find(&mut dsu, index[a.as_str()]),
            find(&mut dsu, index[b.as_str()]),
        );
        if ra != rb {
            dsu[ra] = rb;
        }
    }
    let mut component_size: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..labels.len() {
        let root = find(&mut dsu, i);
        *component_size.entry(root).or_insert(0) += 1;
    }
    NetworkProperties {
        num_nodes: net.num_nodes(),
        num_edges: net.num_edges(),
        total_edge_weight: net.total_edge_weight(),
        largest_component: component_size.values().copied().max().unwrap_or(0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    DegreeCentrality,
    NodeStrength,
    Count,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::DegreeCentrality => "degree_centrality",
            MetricKind::NodeStrength => "node_strength",
            MetricKind::Count => "count",
        })
    }
}

impl FromStr for MetricKind {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "degree_centrality" => Ok(MetricKind::DegreeCentrality),
            "node_strength" => Ok(MetricKind::NodeStrength),
            "count" => Ok(MetricKind::Count),
            other => Err(NetworkError::Malformed {
                path: String::new(),
                reason: format!("unknown metric `{other}`"),
            }),
        }
    }
}

/// One value per node for a given metric; ordered by label.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMetricVector {
    pub kind: MetricKind,
    pub values: BTreeMap<String, f64>,
}

/// Unweighted degree over n-1 (0 by convention when n <= 1), so values are
/// comparable across corpus sizes.
pub fn degree_centrality(net: &KeywordNetwork) -> NodeMetricVector {
    let mut degree: BTreeMap<String, f64> = net.nodes.keys().map(|l| (l.clone(), 0.0)).collect();
    for (a, b) in net.edges.keys() {
        *degree.get_mut(a).expect("edge endpoint exists") += 1.0;
        *degree.get_mut(b).expect("edge endpoint exists") += 1.0;
    }
    let n = net.num_nodes();
    if n > 1 {
        let denom = (n - 1) as f64;
        for v in degree.values_mut() {
            *v /= denom;
        }
    }
    NodeMetricVector {
        kind: MetricKind::DegreeCentrality,
        values: degree,
    }
}

/// Weighted degree: the sum of incident edge weights.
pub fn node_strength(net: &KeywordNetwork) -> NodeMetricVector {
    let mut strength: BTreeMap<String, f64> = net.nodes.keys().map(|l| (l.clone(), 0.0)).collect();
    for ((a, b), w) in &net.edges {
        *strength.get_mut(a).expect("edge endpoint exists") += w;
        *strength.get_mut(b).expect("edge endpoint exists") += w;
    }
    NodeMetricVector {
        kind: MetricKind::NodeStrength,
        values: strength,
    }
}

/// The per-node document count as a metric (all zeros in author mode,
/// where counts are unused).
pub fn count_metric(net: &KeywordNetwork) -> NodeMetricVector {
    NodeMetricVector {
        kind: MetricKind::Count,
        values: net
            .nodes
            .iter()
            .map(|(l, info)| (l.clone(), info.count as f64))
            .collect(),
    }
}

pub fn metric(net: &KeywordNetwork, kind: MetricKind) -> NodeMetricVector {
    match kind {
        MetricKind::DegreeCentrality => degree_centrality(net),
        MetricKind::NodeStrength => node_strength(net),
        MetricKind::Count => count_metric(net),
    }
}

/// Empirical CDF: distinct ascending values paired with P(X <= v); the last
/// fraction is exactly 1.0. Empty input yields empty output.
pub fn cdf(metrics: &NodeMetricVector) -> Vec<(f64, f64)> {
    let mut values: Vec<f64> = metrics.values.values().copied().collect();
    if values.is_empty() {
        return Vec::new();
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("metric values are finite"));
    let n = values.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut seen = 0usize;
    for v in values {
        seen += 1;
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 = seen as f64 / n,
            _ => out.push((v, seen as f64 / n)),
        }
    }
    if let Some(last) = out.last_mut() {
        last.1 = 1.0;
    }
    out
}

/// min/max/mean over a metric vector (zeros when empty); part of the
/// per-configuration metrics summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

pub fn summarize(metrics: &NodeMetricVector) -> MetricSummary {
    if metrics.values.is_empty() {
        return MetricSummary {
            min: 0.0,
            max: 0.0,
            mean: 0.0,
        };
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for &v in metrics.values.values() {
        min = min.min(v);
        max = max.max(v);
        sum += v;
    }
    MetricSummary {
        min,
        max,
        mean: sum / metrics.values.len() as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkMode;
    use crate::testutil::net_from;

    #[test]
    fn properties_of_empty_network() {
        let net = KeywordNetwork::empty(NetworkMode::Cooccurrence);
        let p = properties(&net);
        assert_eq!(
            (
                p.num_nodes,
                p.num_edges,
                p.total_edge_weight,
                p.largest_component
            ),
            (0, 0, 0.0, 0)
        );
    }

    #[test]
    fn properties_counts_components() {
        let net = net_from(&[("a", "b", 1.0), ("c", "d", 1.0)], &["e"]);
        let p = properties(&net);
        assert_eq!((p.num_nodes, p.num_edges, p.largest_component), (5, 2, 2));
    }

    #[test]
    fn properties_of_triangle() {
        let net = net_from(&[("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 1.0)], &[]);
        let p = properties(&net);
        assert_eq!(
            (
                p.num_nodes,
                p.num_edges,
                p.total_edge_weight,
                p.largest_component
            ),
            (3, 3, 3.0, 3)
        );
    }

    #[test]
    fn largest_component_equals_n_iff_connected() {
        let connected = net_from(&[("a", "b", 1.0), ("b", "c", 1.0)], &[]);
        assert_eq!(properties(&connected).largest_component, 3);
        let split = net_from(&[("a", "b", 1.0)], &["z"]);
        assert!(properties(&split).largest_component < split.num_nodes());
    }

    #[test]
    fn degree_centrality_examples() {
        let triangle = net_from(&[("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 1.0)], &[]);
        assert!(degree_centrality(&triangle)
            .values
            .values()
            .all(|&v| v == 1.0));

        let path = net_from(&[("a", "b", 1.0), ("b", "c", 1.0)], &[]);
        let dc = degree_centrality(&path).values;
        assert_eq!((dc["a"], dc["b"], dc["c"]), (0.5, 1.0, 0.5));

        let with_isolate = net_from(&[("a", "b", 1.0), ("b", "c", 1.0)], &["d"]);
        assert_eq!(degree_centrality(&with_isolate).values["d"], 0.0);

        let lone = net_from(&[], &["only"]);
        assert_eq!(degree_centrality(&lone).values["only"], 0.0);
    }

    #[test]
    fn node_strength_examples() {
        let net = net_from(&[("a", "b", 2.0), ("b", "c", 3.0)], &["d"]);
        let s = node_strength(&net).values;
        assert_eq!((s["a"], s["b"], s["c"], s["d"]), (2.0, 5.0, 3.0, 0.0));
    }

    #[test]
    fn unit_weights_make_strength_match_degree() {
        let net = net_from(&[("a", "b", 1.0), ("b", "c", 1.0), ("c", "d", 1.0)], &["e"]);
        let s = node_strength(&net).values;
        let dc = degree_centrality(&net).values;
        let denom = (net.num_nodes() - 1) as f64;
        for (label, strength) in s {
            assert_eq!(strength / denom, dc[&label]);
        }
    }

    #[test]
    fn cdf_examples() {
        let v = NodeMetricVector {
            kind: MetricKind::Count,
            values: [("a", 1.0), ("b", 1.0), ("c", 2.0)]
                .into_iter()
                .map(|(l, x)| (l.to_string(), x))
                .collect(),
        };
        assert_eq!(cdf(&v), vec![(1.0, 2.0 / 3.0), (2.0, 1.0)]);

        let single = NodeMetricVector {
            kind: MetricKind::Count,
            values: [("a".to_string(), 7.0)].into_iter().collect(),
        };
        assert_eq!(cdf(&single), vec![(7.0, 1.0)]);

        let equal = NodeMetricVector {
            kind: MetricKind::Count,
            values: [("a", 3.0), ("b", 3.0)]
                .into_iter()
                .map(|(l, x)| (l.to_string(), x))
                .collect(),
        };
        assert_eq!(cdf(&equal), vec![(3.0, 1.0)]);

        let empty = NodeMetricVector {
            kind: MetricKind::Count,
            values: BTreeMap::new(),
        };
        assert!(cdf(&empty).is_empty());
    }

    #[test]
    fn cdf_is_monotone_and_ends_at_one() {
        let net = net_from(
            &[
                ("a", "b", 2.0),
                ("b", "c", 1.0),
                ("c", "d", 4.0),
                ("a", "d", 1.0),
            ],
            &["e", "f"],
        );
        for kind in [
            MetricKind::DegreeCentrality,
            MetricKind::NodeStrength,
            MetricKind::Count,
        ] {
            let points = cdf(&metric(&net, kind));
            assert_eq!(points.last().unwrap().1, 1.0);
            for pair in points.windows(2) {
                assert!(pair[0].0 < pair[1].0);
                assert!(pair[0].1 <= pair[1].1);
            }
        }
    }

    #[test]
    fn summary_min_max_mean() {
        let net = net_from(&[("a", "b", 2.0), ("b", "c", 3.0)], &[]);
        let s = summarize(&node_strength(&net));
        assert_eq!((s.min, s.max), (2.0, 5.0));
        assert!((s.mean - 10.0 / 3.0).abs() < 1e-12);
        let empty = summarize(&node_strength(&KeywordNetwork::empty(
            NetworkMode::Cooccurrence,
        )));
        assert_eq!((empty.min, empty.max, empty.mean), (0.0, 0.0, 0.0));
    }

    #[test]
    fn metric_kind_round_trips_names() {
        for kind in [
            MetricKind::DegreeCentrality,
            MetricKind::NodeStrength,
            MetricKind::Count,
        ] {
            assert_eq!(kind.to_string().parse::<MetricKind>().unwrap(), kind);
        }
        assert!("pagerank".parse::<MetricKind>().is_err());
    }
}
