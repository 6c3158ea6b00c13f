//! Brute-force oracles over integer endpoints, shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tempdx_core::sia::{BasicRelation, RelationSet, SiaNetwork};
use tempdx_core::Time;

pub type Iv = (i64, i64);

/// Allen relation of two proper integer intervals, from the textbook definitions.
pub fn allen(x: Iv, y: Iv) -> BasicRelation {
    use BasicRelation::*;
    let (a, b) = x;
    let (c, d) = y;
    if b < c {
        Before
    } else if b == c {
        Meets
    } else if d < a {
        After
    } else if d == a {
        MetBy
    } else if a == c && b == d {
        Equals
    } else if a == c {
        if b < d { Starts } else { StartedBy }
    } else if b == d {
        if a > c { Finishes } else { FinishedBy }
    } else if a < c {
        if b < d { Overlaps } else { Contains }
    } else if b > d {
        OverlappedBy
    } else {
        During
    }
}

/// All proper intervals with endpoints in `0..=max`.
pub fn intervals(max: i64) -> Vec<Iv> {
    let mut out = Vec::new();
    for a in 0..=max {
        for b in (a + 1)..=max {
            out.push((a, b));
        }
    }
    out
}

/// Some `y` with `allen((2, 6), y) == r`.
fn witness(r: BasicRelation) -> Iv {
    intervals(8)
        .into_iter()
        .find(|&y| allen((2, 6), y) == r)
        .expect("every basic relation has a witness on the grid")
}

/// Converse of a basic relation by swapping the operands of a witness.
pub fn converse_by_swap(r: BasicRelation) -> BasicRelation {
    let y = witness(r);
    allen(y, (2, 6))
}

/// Composition of two basic relations by exhaustive search over three
/// intervals with endpoints in `0..=8`.
pub fn compose_by_search(r1: BasicRelation, r2: BasicRelation) -> RelationSet {
    let ivs = intervals(8);
    let mut out = RelationSet::EMPTY;
    for &x in &ivs {
        for &y in &ivs {
            if allen(x, y) != r1 {
                continue;
            }
            for &z in &ivs {
                if allen(y, z) == r2 {
                    out = out | RelationSet::single(allen(x, z));
                }
            }
        }
    }
    out
}

/// Is `r` exactly the set of basics satisfying some conjunction of convex
/// endpoint constraints? Decided from sampled interval pairs: collect the
/// observed signs of the four endpoint comparisons, close each to a convex
/// range, and see which pairs the closed conjunction admits.
pub fn sia_by_sampling(r: RelationSet) -> bool {
    let ivs = intervals(8);
    let comps = |x: Iv, y: Iv| [x.0.cmp(&y.0), x.0.cmp(&y.1), x.1.cmp(&y.0), x.1.cmp(&y.1)];
    let mut seen = [[false; 3]; 4];
    for &x in &ivs {
        for &y in &ivs {
            if r.contains(allen(x, y)) {
                for (k, c) in comps(x, y).iter().enumerate() {
                    seen[k][(*c as i8 + 1) as usize] = true;
                }
            }
        }
    }
    for s in &mut seen {
        if s[0] && s[2] {
            s[1] = true;
        }
    }
    for &x in &ivs {
        for &y in &ivs {
            let admitted = comps(x, y)
                .iter()
                .enumerate()
                .all(|(k, c)| seen[k][(*c as i8 + 1) as usize]);
            if admitted != r.contains(allen(x, y)) {
                return false;
            }
        }
    }
    true
}

/// A node of an oracle network: free, or pinned to fixed grid endpoints.
#[derive(Clone, Copy, Debug)]
pub enum OracleNode {
    Free,
    Fixed(Iv),
}

/// Backtracking search for an assignment of grid intervals satisfying every
/// `(i, j, rel)` edge.
pub fn satisfiable(nodes: &[OracleNode], edges: &[(usize, usize, RelationSet)], max: i64) -> bool {
    let ivs = intervals(max);
    let mut assign: Vec<Iv> = Vec::with_capacity(nodes.len());
    search(nodes, edges, &ivs, &mut assign)
}

fn search(nodes: &[OracleNode], edges: &[(usize, usize, RelationSet)], ivs: &[Iv], assign: &mut Vec<Iv>) -> bool {
    let k = assign.len();
    if k == nodes.len() {
        return true;
    }
    let choices: Vec<Iv> = match nodes[k] {
        OracleNode::Free => ivs.to_vec(),
        OracleNode::Fixed(iv) => vec![iv],
    };
    for iv in choices {
        assign.push(iv);
        let ok = edges.iter().all(|&(i, j, r)| {
            if i.max(j) != k {
                return true;
            }
            r.contains(allen(assign[i], assign[j]))
        });
        if ok && search(nodes, edges, ivs, assign) {
            return true;
        }
        assign.pop();
    }
    false
}

/// Feasible basics between `i` and `j`, one existence search per basic.
pub fn minimal_by_search(
    nodes: &[OracleNode],
    edges: &[(usize, usize, RelationSet)],
    i: usize,
    j: usize,
    max: i64,
) -> RelationSet {
    let mut out = RelationSet::EMPTY;
    for b in BasicRelation::ALL {
        let mut e = edges.to_vec();
        e.push((i, j, RelationSet::single(b)));
        if satisfiable(nodes, &e, max) {
            out = out | RelationSet::single(b);
        }
    }
    out
}

/// Every feasible basic relation per node pair, found by enumerating all
/// solutions; `None` when the network has no solution on the grid.
pub fn labels_by_enumeration(
    nodes: &[OracleNode],
    edges: &[(usize, usize, RelationSet)],
    max: i64,
) -> Option<Vec<Vec<RelationSet>>> {
    let ivs = intervals(max);
    let n = nodes.len();
    let mut seen = vec![vec![RelationSet::EMPTY; n]; n];
    let mut assign = Vec::with_capacity(n);
    let mut any = false;
    enumerate(nodes, edges, &ivs, &mut assign, &mut seen, &mut any);
    any.then_some(seen)
}

fn enumerate(
    nodes: &[OracleNode],
    edges: &[(usize, usize, RelationSet)],
    ivs: &[Iv],
    assign: &mut Vec<Iv>,
    seen: &mut [Vec<RelationSet>],
    any: &mut bool,
) {
    let k = assign.len();
    if k == nodes.len() {
        *any = true;
        for i in 0..k {
            for j in 0..k {
                seen[i][j] = seen[i][j] | RelationSet::single(allen(assign[i], assign[j]));
            }
        }
        return;
    }
    let choices: Vec<Iv> = match nodes[k] {
        OracleNode::Free => ivs.to_vec(),
        OracleNode::Fixed(iv) => vec![iv],
    };
    for iv in choices {
        assign.push(iv);
        let ok = edges
            .iter()
            .all(|&(i, j, r)| i.max(j) != k || r.contains(allen(assign[i], assign[j])));
        if ok {
            enumerate(nodes, edges, ivs, assign, seen, any);
        }
        assign.pop();
    }
}

pub struct Case {
    pub nodes: Vec<OracleNode>,
    pub edges: Vec<(usize, usize, RelationSet)>,
    pub max: i64,
}

pub fn sia_sets() -> Vec<RelationSet> {
    (1u16..0x2000).map(RelationSet::from_bits).filter(|r| r.is_sia()).collect()
}

/// Random networks of up to four intervals. Grounded nodes sit on multiples
/// of five so that four free endpoints fit between any two grounded values.
pub fn random_case(rng: &mut ChaCha8Rng, sia: &[RelationSet]) -> Case {
    let n = rng.gen_range(2..=4);
    let grounded = if rng.gen_bool(0.4) { rng.gen_range(1..=2.min(n - 1)) } else { 0 };
    let mut nodes = Vec::new();
    for k in 0..n {
        if k < grounded {
            let a = rng.gen_range(1..=3);
            let b = rng.gen_range(a + 1..=4);
            nodes.push(OracleNode::Fixed((a * 5, b * 5)));
        } else {
            nodes.push(OracleNode::Free);
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(0.7) {
                edges.push((i, j, sia[rng.gen_range(0..sia.len())]));
            }
        }
    }
    let max = if grounded > 0 { 25 } else { 8 };
    Case { nodes, edges, max }
}

pub fn to_network(case: &Case) -> SiaNetwork {
    let mut net = SiaNetwork::new();
    for (k, node) in case.nodes.iter().enumerate() {
        match node {
            OracleNode::Free => net.add_variable(format!("v{k}")).unwrap(),
            OracleNode::Fixed((a, b)) => net.add_grounded(format!("g{k}"), Time::int(*a), Time::int(*b)).unwrap(),
        };
    }
    for &(i, j, r) in &case.edges {
        net.constrain(i, j, r).unwrap();
    }
    net
}

/// Oracle form of a network without endpoint bounds. Grounded values keep
/// their order on a grid spaced widely enough for every free endpoint to
/// fall between any two of them. Returns nodes, edges, grid size and the
/// oracle index of each network node.
pub fn oracle_of(net: &SiaNetwork) -> (Vec<OracleNode>, Vec<(usize, usize, RelationSet)>, i64, Vec<usize>) {
    use tempdx_core::sia::NodeKind;
    assert!(net.bounds().is_empty(), "endpoint bounds have no oracle form");
    let mut values: Vec<Time> = net
        .nodes()
        .iter()
        .filter_map(|n| match n.kind {
            NodeKind::Grounded { lo, hi } => Some([lo, hi]),
            NodeKind::Variable => None,
        })
        .flatten()
        .collect();
    values.sort();
    values.dedup();
    assert!(values.iter().all(Time::is_finite), "infinite anchors have no oracle form");
    let free = net.nodes().iter().filter(|n| !n.is_grounded()).count() as i64;
    let spacing = 2 * free + 1;
    let pos = |t: Time| (values.iter().position(|v| *v == t).unwrap() as i64 + 1) * spacing;
    let mut order: Vec<usize> = (0..net.nodes().len()).collect();
    order.sort_by_key(|&k| !net.node(k).is_grounded());
    let mut index = vec![0; order.len()];
    let nodes = order
        .iter()
        .enumerate()
        .map(|(o, &k)| {
            index[k] = o;
            match net.node(k).kind {
                NodeKind::Grounded { lo, hi } => OracleNode::Fixed((pos(lo), pos(hi))),
                NodeKind::Variable => OracleNode::Free,
            }
        })
        .collect();
    let edges = net.edges().map(|(i, j, r)| (index[i], index[j], r)).collect();
    (nodes, edges, (values.len() as i64 + 1) * spacing, index)
}

pub fn hepatitis() -> tempdx_core::model::KnowledgeBase {
    tempdx_core::model::parse_model(include_str!("../../data/hepatitis.tdx")).unwrap()
}

pub fn dense() -> tempdx_core::observations::ObservationTable {
    tempdx_core::observations::ObservationTable::from_csv_str(include_str!("../../data/hepatitis_dense.csv")).unwrap()
}

pub fn sparse() -> tempdx_core::observations::ObservationTable {
    tempdx_core::observations::ObservationTable::from_csv_str(include_str!("../../data/hepatitis_sparse.csv")).unwrap()
}
