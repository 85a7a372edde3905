//! Hand-built networks for unit tests.

use crate::network::{KeywordNetwork, NetworkMode, NodeInfo};

/// Assembles a co-occurrence network from explicit weighted edges plus
/// isolated nodes, normalising edge keys to (smaller, larger) label order.
pub(crate) fn net_from(edges: &[(&str, &str, f64)], isolates: &[&str]) -> KeywordNetwork {
    let mut net = KeywordNetwork::empty(NetworkMode::Cooccurrence);
    let info = NodeInfo {
        count: 1,
        min_relevance_seen: 1.0,
        occurrences: 1,
    };
    for &(a, b, w) in edges {
        assert_ne!(a, b, "test networks must not contain self-loops");
        net.nodes.insert(a.to_string(), info);
        net.nodes.insert(b.to_string(), info);
        let key = if a < b { (a, b) } else { (b, a) };
        net.edges.insert((key.0.to_string(), key.1.to_string()), w);
    }
    for &l in isolates {
        net.nodes.insert(l.to_string(), info);
    }
    net
}
