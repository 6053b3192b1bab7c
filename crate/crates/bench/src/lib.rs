//! Shared network builders for the benchmarks.

use wdn_core::network::{NodeSpec, PipeSpec, TankSpec};
use wdn_core::{HeadlossModel, Network, NetworkSpec};

/// The two-loop, 5-node Hazen-Williams benchmark network.
pub fn two_loop_network() -> Network {
    let mut spec = NetworkSpec {
        headloss: HeadlossModel::HazenWilliams,
        ..NetworkSpec::default()
    };
    let node = |id: &str, z: f64, d: f64| NodeSpec {
        id: id.into(),
        elevation: z,
        demand_lps: d,
        tank: None,
    };
    spec.nodes = vec![
        node("1", 100.0, 0.0),
        node("2", 110.0, 0.2),
        node("3", 110.0, 0.0),
        node("4", 100.0, 0.3),
        NodeSpec {
            id: "5".into(),
            elevation: 100.0,
            demand_lps: -0.5,
            tank: Some(TankSpec {
                water_depth: 20.84,
                height_above_ground: 0.0,
                volume: Some(17.28),
            }),
        },
    ];
    let pipe = |id: &str, from: &str, to: &str| PipeSpec {
        id: id.into(),
        from: from.into(),
        to: to.into(),
        length: 100.0,
        diameter_mm: 40.0,
        roughness: 130.0,
    };
    spec.pipes = vec![
        pipe("1", "1", "2"),
        pipe("2", "2", "3"),
        pipe("3", "4", "3"),
        pipe("4", "1", "4"),
        pipe("5", "2", "4"),
        pipe("6", "5", "1"),
    ];
    Network::build(&spec).expect("valid benchmark network")
}

/// A synthetic n×n Darcy-Weisbach grid fed by one corner tank; demands at
/// the far corner and grid midpoints.
pub fn grid_network(n: usize) -> Network {
    let mut spec = NetworkSpec {
        headloss: HeadlossModel::DarcyWeisbach,
        ..NetworkSpec::default()
    };
    let id = |r: usize, c: usize| format!("n{r}x{c}");
    let demand_nodes = [(n - 1, n - 1), (n / 2, n / 2), (0, n - 1), (n - 1, 0)];
    let total = 40.0;
    let each = total / demand_nodes.len() as f64;
    for r in 0..n {
        for c in 0..n {
            let d = if demand_nodes.contains(&(r, c)) { each } else { 0.0 };
            spec.nodes.push(NodeSpec {
                id: id(r, c),
                elevation: 0.0,
                demand_lps: d,
                tank: None,
            });
        }
    }
    spec.nodes.push(NodeSpec {
        id: "tank".into(),
        elevation: 0.0,
        demand_lps: -total,
        tank: Some(TankSpec {
            water_depth: 45.0,
            height_above_ground: 0.0,
            volume: None,
        }),
    });
    let mut k = 0;
    let mut pipe = |from: String, to: String| {
        k += 1;
        PipeSpec {
            id: format!("p{k}"),
            from,
            to,
            length: 300.0,
            diameter_mm: 150.0,
            roughness: 0.26,
        }
    };
    let mut pipes = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if c + 1 < n {
                pipes.push(pipe(id(r, c), id(r, c + 1)));
            }
            if r + 1 < n {
                pipes.push(pipe(id(r, c), id(r + 1, c)));
            }
        }
    }
    pipes.push(pipe("tank".into(), id(0, 0)));
    spec.pipes = pipes;
    Network::build(&spec).expect("valid grid")
}
