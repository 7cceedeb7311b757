//! Bundled sample topologies. They match the sizes of well-known research
//! networks but are synthetic, not copies of them.

use crate::error::{Error, Result};
use crate::maxflow::FlowNetwork;
use crate::mcvc::VcGraph;

/// Flow networks: (name, vertices, edges).
pub const NETWORKS: [(&str, usize, usize); 3] = [("polska", 12, 18), ("usanet", 24, 43), ("geant", 40, 61)];

/// Vertex-cover graphs: (name, vertices, edges).
pub const GRAPHS: [(&str, usize, usize); 2] = [("abilene", 12, 15), ("pdh", 11, 34)];

fn network_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "polska" => include_str!("../data/polska.json"),
        "usanet" => include_str!("../data/usanet.json"),
        "geant" => include_str!("../data/geant.json"),
        _ => return None,
    })
}

fn graph_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "abilene" => include_str!("../data/abilene.json"),
        "pdh" => include_str!("../data/pdh.json"),
        _ => return None,
    })
}

pub fn network(name: &str) -> Result<FlowNetwork> {
    let text = network_text(&name.to_ascii_lowercase())
        .ok_or_else(|| Error::InvalidArgument(format!("unknown network `{name}`")))?;
    FlowNetwork::from_json(text)
}

pub fn graph(name: &str) -> Result<VcGraph> {
    let text = graph_text(&name.to_ascii_lowercase())
        .ok_or_else(|| Error::InvalidArgument(format!("unknown graph `{name}`")))?;
    VcGraph::from_json(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_sizes() {
        for (name, n, m) in NETWORKS {
            let net = network(name).unwrap();
            assert_eq!((net.n, net.num_edges()), (n, m), "{name}");
        }
        for (name, n, m) in GRAPHS {
            let g = graph(name).unwrap();
            assert_eq!((g.n, g.edges.len()), (n, m), "{name}");
        }
        assert!(network("nowhere").is_err());
    }
}
