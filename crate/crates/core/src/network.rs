//! Network data model, validation, and incidence structures.
//!
//! A network is built from a [`NetworkSpec`] carrying raw input units
//! (demands in L/s, diameters in mm). Construction validates topology and
//! normalizes everything to SI; the resulting [`Network`] is immutable.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::BuildError;
use crate::{GRAVITY, SPECIFIC_WEIGHT_WATER};

const DEMAND_BALANCE_TOL: f64 = 1e-9;

/// Head-loss model applied to every pipe in the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeadlossModel {
    /// Hazen-Williams: k = 10.67 L / (C^1.85 D^4.87), n = 1.85.
    HazenWilliams,
    /// Darcy-Weisbach: k = 8 f L / (D^5 π² g), n = 2.
    DarcyWeisbach,
}

impl HeadlossModel {
    /// Head-loss exponent n in Δh = k·Q·|Q|^(n−1).
    pub fn exponent(self) -> f64 {
        match self {
            HeadlossModel::HazenWilliams => 1.85,
            HeadlossModel::DarcyWeisbach => 2.0,
        }
    }
}

/// Tank data for a fixed-head node (raw input units, meters).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TankSpec {
    /// Water depth h_r above the tank bottom, m.
    pub water_depth: f64,
    /// Height of the tank bottom above the ground, m.
    pub height_above_ground: f64,
    /// Stored volume, m³; derivable from demand when absent.
    pub volume: Option<f64>,
}

/// Raw node as parsed from input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeSpec {
    pub id: String,
    /// Ground elevation z, m.
    pub elevation: f64,
    /// Demand in L/s; positive = withdrawal, negative = supply.
    pub demand_lps: f64,
    /// Present for tanks (fixed-head nodes).
    pub tank: Option<TankSpec>,
}

/// Raw pipe as parsed from input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipeSpec {
    pub id: String,
    pub from: String,
    pub to: String,
    /// Length, m.
    pub length: f64,
    /// Diameter, mm.
    pub diameter_mm: f64,
    /// Hazen-Williams C (dimensionless) or Darcy-Weisbach rugosity in mm,
    /// depending on the network head-loss model.
    pub roughness: f64,
}

/// Raw pump description; one pump fills one tank.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PumpSpec {
    pub tank: String,
    /// Pump elevation z_p, m. Defaults to 5 m below the tank ground.
    pub elevation: Option<f64>,
    /// Length of the pipe from pump to tank, m.
    pub supply_length: f64,
    /// Supply pipe diameter in mm; sized from a catalog when absent.
    pub supply_diameter_mm: Option<f64>,
    /// Roughness of the supply pipe (same convention as pipes); defaults to
    /// the first network pipe's roughness when absent.
    pub roughness: Option<f64>,
    /// Pump operating hours per day used for energy cost, n_h.
    pub daily_hours: f64,
    /// Duration per day the pump fills the tank, n_p.
    pub operating_hours: f64,
    /// Pump efficiency in (0, 1].
    pub efficiency: f64,
    /// Explicit head-loss resistance k_p of the supply line; derived from
    /// the supply pipe when absent.
    pub resistance: Option<f64>,
}

/// Raw network: everything the hydraulic model needs, in input units.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub headloss: HeadlossModel,
    /// Kinematic viscosity ν, m²/s.
    pub viscosity: f64,
    /// Fluid density ρ, kg/m³.
    pub density: f64,
    /// Day peak factor k1.
    pub day_factor: f64,
    /// Hour peak factor k2.
    pub hour_factor: f64,
    /// Hours per day the network operates, n_WDN.
    pub network_hours: f64,
    pub nodes: Vec<NodeSpec>,
    pub pipes: Vec<PipeSpec>,
    pub pumps: Vec<PumpSpec>,
}

impl Default for NetworkSpec {
    fn default() -> Self {
        NetworkSpec {
            headloss: HeadlossModel::HazenWilliams,
            viscosity: 1e-6,
            density: 1000.0,
            day_factor: 1.2,
            hour_factor: 1.5,
            network_hours: 24.0,
            nodes: Vec::new(),
            pipes: Vec::new(),
            pumps: Vec::new(),
        }
    }
}

/// Validated node, SI units.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub elevation: f64,
    /// Demand in m³/s; for tanks this is the expected supply, used for
    /// post-solve verification only.
    pub demand: f64,
    pub tank: Option<TankSpec>,
}

impl Node {
    pub fn is_tank(&self) -> bool {
        self.tank.is_some()
    }

    /// Fixed head z + h_b + h_r for tanks.
    pub fn fixed_head(&self) -> Option<f64> {
        self.tank
            .as_ref()
            .map(|t| self.elevation + t.height_above_ground + t.water_depth)
    }
}

/// Pipe roughness under the network's head-loss model, SI.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum Roughness {
    /// Hazen-Williams coefficient C.
    HazenWilliams(f64),
    /// Darcy-Weisbach rugosity ε, m.
    DarcyWeisbach(f64),
}

/// Validated pipe, SI units; endpoints are node indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Pipe {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub length: f64,
    pub diameter: f64,
    pub roughness: Roughness,
}

/// Validated pump, SI units; `tank` is a node index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Pump {
    pub tank: usize,
    pub elevation: f64,
    pub supply_length: f64,
    pub supply_diameter: Option<f64>,
    pub roughness: Option<Roughness>,
    pub daily_hours: f64,
    pub operating_hours: f64,
    pub efficiency: f64,
    pub resistance: Option<f64>,
}

/// Immutable, validated network in SI units.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Network {
    pub headloss: HeadlossModel,
    pub viscosity: f64,
    pub density: f64,
    pub gravity: f64,
    /// Specific weight γ, N/m³.
    pub specific_weight: f64,
    pub day_factor: f64,
    pub hour_factor: f64,
    pub network_hours: f64,
    nodes: Vec<Node>,
    pipes: Vec<Pipe>,
    pumps: Vec<Pump>,
    /// Node index -> junction row (tanks excluded).
    junction_rows: Vec<Option<usize>>,
    junction_count: usize,
}

impl Network {
    /// Validates a raw spec and normalizes units to SI.
    pub fn build(spec: &NetworkSpec) -> Result<Network, BuildError> {
        let mut index = HashMap::new();
        for (i, n) in spec.nodes.iter().enumerate() {
            if index.insert(n.id.clone(), i).is_some() {
                return Err(BuildError::DuplicateNode(n.id.clone()));
            }
            if !n.demand_lps.is_finite() {
                return Err(BuildError::InvalidNode {
                    node: n.id.clone(),
                    what: "demand is not finite".into(),
                });
            }
            if let Some(t) = &n.tank {
                if t.water_depth <= 0.0 {
                    return Err(BuildError::InvalidNode {
                        node: n.id.clone(),
                        what: format!("tank water depth must be > 0 (got {})", t.water_depth),
                    });
                }
                if t.height_above_ground < 0.0 {
                    return Err(BuildError::InvalidNode {
                        node: n.id.clone(),
                        what: format!(
                            "tank height above ground must be >= 0 (got {})",
                            t.height_above_ground
                        ),
                    });
                }
            }
        }

        let mut pipe_ids = HashMap::new();
        let mut pipes = Vec::with_capacity(spec.pipes.len());
        for p in &spec.pipes {
            if pipe_ids.insert(p.id.clone(), ()).is_some() {
                return Err(BuildError::DuplicatePipe(p.id.clone()));
            }
            let from = *index
                .get(&p.from)
                .ok_or_else(|| BuildError::DanglingEndpoint {
                    pipe: p.id.clone(),
                    node: p.from.clone(),
                })?;
            let to = *index
                .get(&p.to)
                .ok_or_else(|| BuildError::DanglingEndpoint {
                    pipe: p.id.clone(),
                    node: p.to.clone(),
                })?;
            if from == to {
                return Err(BuildError::SelfLoop(p.id.clone()));
            }
            if p.length <= 0.0 {
                return Err(BuildError::NonPositive {
                    pipe: p.id.clone(),
                    what: "length",
                    value: p.length,
                });
            }
            if p.diameter_mm <= 0.0 {
                return Err(BuildError::NonPositive {
                    pipe: p.id.clone(),
                    what: "diameter",
                    value: p.diameter_mm,
                });
            }
            let roughness = match spec.headloss {
                HeadlossModel::HazenWilliams => {
                    if p.roughness <= 0.0 {
                        return Err(BuildError::NonPositive {
                            pipe: p.id.clone(),
                            what: "Hazen-Williams C",
                            value: p.roughness,
                        });
                    }
                    Roughness::HazenWilliams(p.roughness)
                }
                HeadlossModel::DarcyWeisbach => {
                    if p.roughness < 0.0 {
                        return Err(BuildError::NonPositive {
                            pipe: p.id.clone(),
                            what: "rugosity",
                            value: p.roughness,
                        });
                    }
                    Roughness::DarcyWeisbach(p.roughness / 1000.0)
                }
            };
            pipes.push(Pipe {
                id: p.id.clone(),
                from,
                to,
                length: p.length,
                diameter: p.diameter_mm / 1000.0,
                roughness,
            });
        }

        let nodes: Vec<Node> = spec
            .nodes
            .iter()
            .map(|n| Node {
                id: n.id.clone(),
                elevation: n.elevation,
                demand: n.demand_lps / 1000.0,
                tank: n.tank,
            })
            .collect();

        if !nodes.iter().any(|n| n.is_tank()) {
            return Err(BuildError::NoTank);
        }

        // connectivity over the undirected pipe graph
        if !nodes.is_empty() {
            let mut adj = vec![Vec::new(); nodes.len()];
            for p in &pipes {
                adj[p.from].push(p.to);
                adj[p.to].push(p.from);
            }
            let mut seen = vec![false; nodes.len()];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            if let Some(i) = seen.iter().position(|s| !s) {
                return Err(BuildError::Disconnected(nodes[i].id.clone()));
            }
        }

        let sum: f64 = nodes.iter().map(|n| n.demand).sum();
        if sum.abs() > DEMAND_BALANCE_TOL {
            return Err(BuildError::UnbalancedDemand {
                sum,
                tol: DEMAND_BALANCE_TOL,
            });
        }

        let mut pumps = Vec::with_capacity(spec.pumps.len());
        for pm in &spec.pumps {
            let tank = *index
                .get(&pm.tank)
                .ok_or_else(|| BuildError::UnknownPumpTank(pm.tank.clone()))?;
            if !nodes[tank].is_tank() {
                return Err(BuildError::InvalidPump {
                    tank: pm.tank.clone(),
                    what: "node is not a tank".into(),
                });
            }
            if !(pm.efficiency > 0.0 && pm.efficiency <= 1.0) {
                return Err(BuildError::InvalidPump {
                    tank: pm.tank.clone(),
                    what: format!("efficiency must be in (0, 1] (got {})", pm.efficiency),
                });
            }
            if !(pm.operating_hours > 0.0 && pm.operating_hours <= 24.0) {
                return Err(BuildError::InvalidPump {
                    tank: pm.tank.clone(),
                    what: format!(
                        "operating hours must be in (0, 24] (got {})",
                        pm.operating_hours
                    ),
                });
            }
            let roughness = match (pm.roughness, spec.headloss) {
                (Some(r), HeadlossModel::HazenWilliams) => Some(Roughness::HazenWilliams(r)),
                (Some(r), HeadlossModel::DarcyWeisbach) => {
                    Some(Roughness::DarcyWeisbach(r / 1000.0))
                }
                (None, _) => pipes.first().map(|p| p.roughness),
            };
            pumps.push(Pump {
                tank,
                elevation: pm.elevation.unwrap_or(nodes[tank].elevation - 5.0),
                supply_length: pm.supply_length,
                supply_diameter: pm.supply_diameter_mm.map(|d| d / 1000.0),
                roughness,
                daily_hours: pm.daily_hours,
                operating_hours: pm.operating_hours,
                efficiency: pm.efficiency,
                resistance: pm.resistance,
            });
        }

        let mut junction_rows = vec![None; nodes.len()];
        let mut junction_count = 0;
        for (i, n) in nodes.iter().enumerate() {
            if !n.is_tank() {
                junction_rows[i] = Some(junction_count);
                junction_count += 1;
            }
        }

        Ok(Network {
            headloss: spec.headloss,
            viscosity: spec.viscosity,
            density: spec.density,
            gravity: GRAVITY,
            specific_weight: SPECIFIC_WEIGHT_WATER,
            day_factor: spec.day_factor,
            hour_factor: spec.hour_factor,
            network_hours: spec.network_hours,
            nodes,
            pipes,
            pumps,
            junction_rows,
            junction_count,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn pipes(&self) -> &[Pipe] {
        &self.pipes
    }

    pub fn pumps(&self) -> &[Pump] {
        &self.pumps
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn pipe_index(&self, id: &str) -> Option<usize> {
        self.pipes.iter().position(|p| p.id == id)
    }

    pub fn junction_count(&self) -> usize {
        self.junction_count
    }

    /// Junction row of a node, if it is not a tank.
    pub fn junction_row(&self, node: usize) -> Option<usize> {
        self.junction_rows[node]
    }

    /// Node indices of all tanks, in declaration order.
    pub fn tank_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].is_tank())
            .collect()
    }

    /// The reference tank: lowest id, numerically when ids parse as
    /// integers, lexicographically otherwise.
    pub fn root_tank(&self) -> usize {
        let mut tanks = self.tank_nodes();
        tanks.sort_by(|&a, &b| id_order(&self.nodes[a].id, &self.nodes[b].id));
        tanks[0]
    }

    /// Total junction withdrawal, m³/s.
    pub fn total_demand(&self) -> f64 {
        self.nodes
            .iter()
            .filter(|n| !n.is_tank())
            .map(|n| n.demand.max(0.0))
            .sum()
    }

    /// Junction incidence matrix F_d: one row per junction (tanks excluded),
    /// entry −1 when the pipe leaves the junction, +1 when it enters.
    pub fn junction_incidence(&self) -> Incidence {
        let mut rows = vec![Vec::new(); self.junction_count];
        for (j, p) in self.pipes.iter().enumerate() {
            if let Some(r) = self.junction_rows[p.from] {
                rows[r].push((j, -1i8));
            }
            if let Some(r) = self.junction_rows[p.to] {
                rows[r].push((j, 1i8));
            }
        }
        Incidence {
            cols: self.pipes.len(),
            rows,
        }
    }

    /// A copy of the network with tank water depth / elevation replaced,
    /// tank by tank in declaration order.
    pub fn with_tank_design(&self, design: &[(f64, f64)]) -> Network {
        let mut out = self.clone();
        for (k, &node) in self.tank_nodes().iter().enumerate() {
            if let Some((h_r, h_b)) = design.get(k) {
                let t = out.nodes[node].tank.as_mut().expect("tank node");
                t.water_depth = *h_r;
                t.height_above_ground = *h_b;
            }
        }
        out
    }
}

fn id_order(a: &str, b: &str) -> std::cmp::Ordering {
    match (a.parse::<i64>(), b.parse::<i64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        _ => a.cmp(b),
    }
}

/// Signed sparse incidence matrix, stored by rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incidence {
    cols: usize,
    rows: Vec<Vec<(usize, i8)>>,
}

impl Incidence {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[(usize, i8)] {
        &self.rows[i]
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.cols]; self.rows.len()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, s) in row {
                m[i][j] = s as f64;
            }
        }
        m
    }
}

/// One conservation loop: a signed pipe walk. Closed loops start and end at
/// the same node; pseudo-loops run between two fixed-head nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Loop {
    /// Pipe walk as (pipe index, +1 along declared direction / −1 against).
    pub pipes: Vec<(usize, i8)>,
    pub start: usize,
    pub end: usize,
}

impl Loop {
    pub fn is_pseudo(&self) -> bool {
        self.start != self.end
    }

    /// Fixed head difference head(start) − head(end); zero for closed loops.
    pub fn fixed_head_difference(&self, network: &Network) -> f64 {
        if self.start == self.end {
            return 0.0;
        }
        let hs = network.nodes()[self.start]
            .fixed_head()
            .expect("pseudo-loop start is a tank");
        let he = network.nodes()[self.end]
            .fixed_head()
            .expect("pseudo-loop end is a tank");
        hs - he
    }
}

/// A full loop basis: fundamental cycles plus one pseudo-loop per
/// additional fixed-head node. Together with the junction rows these make
/// the residual system square.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSet {
    pub loops: Vec<Loop>,
}

impl LoopSet {
    /// Loop incidence matrix F_l (loop rows × pipe columns).
    pub fn incidence(&self, pipe_count: usize) -> Incidence {
        let rows = self
            .loops
            .iter()
            .map(|l| {
                let mut row: Vec<(usize, i8)> = Vec::with_capacity(l.pipes.len());
                for &(j, s) in &l.pipes {
                    match row.iter_mut().find(|(k, _)| *k == j) {
                        Some(entry) => entry.1 += s,
                        None => row.push((j, s)),
                    }
                }
                row.retain(|&(_, s)| s != 0);
                row.sort_by_key(|&(j, _)| j);
                row
            })
            .collect();
        Incidence {
            cols: pipe_count,
            rows,
        }
    }

    pub fn len(&self) -> usize {
        self.loops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loops.is_empty()
    }
}

/// Deterministic spanning tree: pipes taken in declaration order (ascending
/// id for the conventional numeric ids), Kruskal-style.
pub(crate) fn spanning_tree(network: &Network) -> Vec<usize> {
    let n = network.nodes().len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for (j, p) in network.pipes().iter().enumerate() {
        let (a, b) = (find(&mut parent, p.from), find(&mut parent, p.to));
        if a != b {
            parent[a] = b;
            tree.push(j);
        }
    }
    tree
}

/// Tree adjacency: node -> (neighbor, pipe index, +1 if pipe leaves node).
fn tree_adjacency(network: &Network, tree: &[usize]) -> Vec<Vec<(usize, usize, i8)>> {
    let mut adj = vec![Vec::new(); network.nodes().len()];
    for &j in tree {
        let p = &network.pipes()[j];
        adj[p.from].push((p.to, j, 1));
        adj[p.to].push((p.from, j, -1));
    }
    adj
}

/// Signed pipe walk from `from` to `to` along the spanning tree.
fn tree_path(
    network: &Network,
    adj: &[Vec<(usize, usize, i8)>],
    from: usize,
    to: usize,
) -> Vec<(usize, i8)> {
    // BFS parents
    let n = network.nodes().len();
    let mut prev: Vec<Option<(usize, usize, i8)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(from);
    seen[from] = true;
    while let Some(u) = queue.pop_front() {
        if u == to {
            break;
        }
        for &(v, j, s) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                prev[v] = Some((u, j, s));
                queue.push_back(v);
            }
        }
    }
    let mut walk = Vec::new();
    let mut cur = to;
    while cur != from {
        let (u, j, s) = prev[cur].expect("tree connects all nodes");
        walk.push((j, s));
        cur = u;
    }
    walk.reverse();
    walk
}

/// Fundamental cycles from the deterministic spanning tree plus one
/// pseudo-loop per non-root tank.
///
/// Closed loops are oriented by their defining non-tree pipe; pseudo-loops
/// run from the root tank to the other tank along the tree.
pub fn cycle_basis(network: &Network) -> LoopSet {
    let tree = spanning_tree(network);
    let adj = tree_adjacency(network, &tree);
    let in_tree = {
        let mut v = vec![false; network.pipes().len()];
        for &j in &tree {
            v[j] = true;
        }
        v
    };

    let mut loops = Vec::new();
    for (j, p) in network.pipes().iter().enumerate() {
        if in_tree[j] {
            continue;
        }
        // non-tree pipe traversed forward, then back along the tree
        let mut pipes = vec![(j, 1i8)];
        pipes.extend(tree_path(network, &adj, p.to, p.from));
        loops.push(Loop {
            pipes,
            start: p.from,
            end: p.from,
        });
    }

    let root = network.root_tank();
    let mut others = network.tank_nodes();
    others.retain(|&t| t != root);
    others.sort_by(|&a, &b| id_order(&network.nodes()[a].id, &network.nodes()[b].id));
    for t in others {
        loops.push(Loop {
            pipes: tree_path(network, &adj, root, t),
            start: root,
            end: t,
        });
    }

    LoopSet { loops }
}

/// Validates user-supplied loops: each signed pipe sequence must form a
/// closed walk or a tank-to-tank path, rows must be linearly independent,
/// and the count must equal pipes − junctions.
pub fn accept_explicit_loops(
    network: &Network,
    user_loops: &[Vec<(usize, i8)>],
) -> Result<LoopSet, BuildError> {
    let need = network.pipes().len() - network.junction_count();
    if user_loops.len() != need {
        return Err(BuildError::WrongLoopCount {
            got: user_loops.len(),
            need,
        });
    }

    let mut loops = Vec::with_capacity(user_loops.len());
    for (index, walk) in user_loops.iter().enumerate() {
        if walk.is_empty() {
            return Err(BuildError::OpenWalk {
                index,
                what: "empty walk".into(),
            });
        }
        let ends = |&(j, s): &(usize, i8)| {
            let p = &network.pipes()[j];
            if s >= 0 {
                (p.from, p.to)
            } else {
                (p.to, p.from)
            }
        };
        let (start, mut cur) = ends(&walk[0]);
        for step in &walk[1..] {
            let (a, b) = ends(step);
            if a != cur {
                return Err(BuildError::OpenWalk {
                    index,
                    what: format!(
                        "pipe `{}` does not continue from node `{}`",
                        network.pipes()[step.0].id,
                        network.nodes()[cur].id
                    ),
                });
            }
            cur = b;
        }
        let closed = cur == start;
        let tank_path = network.nodes()[start].is_tank() && network.nodes()[cur].is_tank();
        if !closed && !tank_path {
            return Err(BuildError::OpenWalk {
                index,
                what: format!(
                    "walk runs `{}` -> `{}` and neither closes nor joins two tanks",
                    network.nodes()[start].id,
                    network.nodes()[cur].id
                ),
            });
        }
        loops.push(Loop {
            pipes: walk.clone(),
            start,
            end: cur,
        });
    }

    let set = LoopSet { loops };
    let rank = row_rank(&set.incidence(network.pipes().len()));
    if rank < set.len() {
        return Err(BuildError::RankDeficient {
            rank,
            count: set.len(),
        });
    }
    Ok(set)
}

/// Row rank by Gaussian elimination.
fn row_rank(inc: &Incidence) -> usize {
    let mut m = inc.to_dense();
    let (nr, nc) = (m.len(), inc.ncols());
    let mut rank = 0;
    for col in 0..nc {
        if rank == nr {
            break;
        }
        let pivot = (rank..nr).max_by(|&a, &b| {
            m[a][col]
                .abs()
                .partial_cmp(&m[b][col].abs())
                .expect("finite")
        });
        let Some(p) = pivot else { break };
        if m[p][col].abs() < 1e-12 {
            continue;
        }
        m.swap(rank, p);
        for r in rank + 1..nr {
            let f = m[r][col] / m[rank][col];
            if f != 0.0 {
                for c in col..nc {
                    m[r][c] -= f * m[rank][c];
                }
            }
        }
        rank += 1;
    }
    rank
}
