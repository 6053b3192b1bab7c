//! Shared fixture networks for the integration tests.

use wdn_core::network::{NodeSpec, PipeSpec, PumpSpec, TankSpec};
use wdn_core::{HeadlossModel, Network, NetworkSpec};

pub fn node(id: &str, z: f64, d: f64) -> NodeSpec {
    NodeSpec {
        id: id.into(),
        elevation: z,
        demand_lps: d,
        tank: None,
    }
}

pub fn tank(id: &str, z: f64, d: f64, h_r: f64) -> NodeSpec {
    NodeSpec {
        id: id.into(),
        elevation: z,
        demand_lps: d,
        tank: Some(TankSpec {
            water_depth: h_r,
            height_above_ground: 0.0,
            volume: None,
        }),
    }
}

pub fn hw_pipe(id: &str, from: &str, to: &str, l: f64, d_mm: f64) -> PipeSpec {
    PipeSpec {
        id: id.into(),
        from: from.into(),
        to: to.into(),
        length: l,
        diameter_mm: d_mm,
        roughness: 130.0,
    }
}

pub fn dw_pipe(id: &str, from: &str, to: &str, l: f64, d_mm: f64) -> PipeSpec {
    PipeSpec {
        id: id.into(),
        from: from.into(),
        to: to.into(),
        length: l,
        diameter_mm: d_mm,
        roughness: 0.0015,
    }
}

/// The two-loop, 5-node, single-tank Hazen-Williams network.
pub fn two_loop_network() -> Network {
    Network::build(&two_loop_spec()).unwrap()
}

pub fn two_loop_spec() -> NetworkSpec {
    NetworkSpec {
        headloss: HeadlossModel::HazenWilliams,
        nodes: vec![
            node("1", 100.0, 0.0),
            node("2", 110.0, 0.2),
            node("3", 110.0, 0.0),
            node("4", 100.0, 0.3),
            {
                let mut t = tank("5", 100.0, -0.5, 20.84);
                t.tank.as_mut().unwrap().volume = Some(17.28);
                t
            },
        ],
        pipes: vec![
            hw_pipe("1", "1", "2", 100.0, 40.0),
            hw_pipe("2", "2", "3", 100.0, 40.0),
            hw_pipe("3", "4", "3", 100.0, 40.0),
            hw_pipe("4", "1", "4", 100.0, 40.0),
            hw_pipe("5", "2", "4", 100.0, 40.0),
            hw_pipe("6", "5", "1", 100.0, 40.0),
        ],
        pumps: vec![PumpSpec {
            tank: "5".into(),
            elevation: None,
            supply_length: 500.0,
            supply_diameter_mm: Some(40.0),
            roughness: None,
            daily_hours: 12.0,
            operating_hours: 12.0,
            efficiency: 0.85,
            resistance: None,
        }],
        ..NetworkSpec::default()
    }
}

/// The 8-node, 9-pipe, single-tank Darcy-Weisbach network.
pub fn porto_network() -> Network {
    Network::build(&porto_spec()).unwrap()
}

pub fn porto_spec() -> NetworkSpec {
    NetworkSpec {
        headloss: HeadlossModel::DarcyWeisbach,
        nodes: vec![
            node("1", 463.20, 0.0),
            node("2", 460.20, 10.0),
            node("3", 468.90, 8.0),
            node("4", 471.20, 5.0),
            node("5", 467.70, 10.0),
            node("6", 463.20, 5.0),
            node("7", 459.20, 2.0),
            {
                let mut t = tank("8", 463.20, -40.0, 28.70);
                t.tank.as_mut().unwrap().volume = Some(1382.4);
                t
            },
        ],
        pipes: vec![
            dw_pipe("1", "1", "2", 1850.0, 150.0),
            dw_pipe("2", "2", "3", 790.0, 125.0),
            dw_pipe("3", "7", "3", 700.0, 100.0),
            dw_pipe("4", "4", "7", 600.0, 100.0),
            dw_pipe("5", "5", "4", 980.0, 100.0),
            dw_pipe("6", "2", "5", 850.0, 100.0),
            dw_pipe("7", "6", "5", 650.0, 200.0),
            dw_pipe("8", "1", "6", 850.0, 200.0),
            dw_pipe("9", "8", "1", 520.0, 250.0),
        ],
        pumps: vec![PumpSpec {
            tank: "8".into(),
            elevation: None,
            supply_length: 500.0,
            supply_diameter_mm: Some(200.0),
            roughness: None,
            daily_hours: 12.0,
            operating_hours: 12.0,
            efficiency: 0.85,
            resistance: Some(3655.84),
        }],
        ..NetworkSpec::default()
    }
}
