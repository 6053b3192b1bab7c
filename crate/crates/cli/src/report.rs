//! Result rendering: human tables and a machine-readable JSON mirror.

use serde::{Deserialize, Serialize};

use wdn_core::costing::CostBreakdown;
use wdn_core::design::{CostDeltas, DesignSolution};
use wdn_core::hydraulics::FlowSolution;
use wdn_core::Network;

/// Per-pipe result row.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PipeRow {
    pub id: String,
    pub from: String,
    pub to: String,
    /// Flow, L/s (signed against the declared direction).
    pub flow_lps: f64,
    /// Mean velocity, m/s.
    pub velocity: f64,
    /// Friction head loss, m (signed).
    pub headloss: f64,
    pub reynolds: f64,
    pub friction_factor: Option<f64>,
}

/// Per-node result row.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct NodeRow {
    pub id: String,
    pub elevation: f64,
    /// Piezometric head, m.
    pub head: f64,
    /// Pressure head h − z, m H₂O.
    pub pressure: f64,
    pub is_tank: bool,
}

/// MAE comparison block.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MaeBlock {
    pub flow_mae_lps: Option<f64>,
    pub pressure_mae_m: Option<f64>,
    pub flow_count: usize,
    pub pressure_count: usize,
}

/// Full solve/cost report; serializes losslessly to JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub converged: bool,
    pub iterations: usize,
    pub residual_mass: f64,
    pub residual_energy: f64,
    pub pipes: Vec<PipeRow>,
    pub nodes: Vec<NodeRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostBreakdown>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mae: Option<MaeBlock>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

impl Report {
    pub fn from_solution(network: &Network, flow: &FlowSolution) -> Report {
        let pipes = network
            .pipes()
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let q = flow.flows[j];
                let area = std::f64::consts::PI * p.diameter * p.diameter / 4.0;
                let state = &flow.pipe_state[j];
                PipeRow {
                    id: p.id.clone(),
                    from: network.nodes()[p.from].id.clone(),
                    to: network.nodes()[p.to].id.clone(),
                    flow_lps: q * 1000.0,
                    velocity: q.abs() / area,
                    headloss: wdn_core::hydraulics::headloss(state.resistance, state.exponent, q),
                    reynolds: state.reynolds,
                    friction_factor: state.friction_factor,
                }
            })
            .collect();
        let nodes = network
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, n)| NodeRow {
                id: n.id.clone(),
                elevation: n.elevation,
                head: flow.heads[i],
                pressure: flow.pressures[i],
                is_tank: n.is_tank(),
            })
            .collect();
        Report {
            converged: flow.converged,
            iterations: flow.iterations,
            residual_mass: flow.residual_mass,
            residual_energy: flow.residual_energy,
            pipes,
            nodes,
            cost: None,
            mae: None,
            warnings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "converged: {} after {} iterations (mass {:.2e} m3/s, energy {:.2e} m)\n\n",
            if self.converged { "yes" } else { "NO" },
            self.iterations,
            self.residual_mass,
            self.residual_energy,
        ));
        out.push_str("pipes:\n");
        out.push_str(&format!(
            "  {:<6} {:>8} {:>9} {:>9} {:>10} {:>8}\n",
            "id", "Q [L/s]", "v [m/s]", "dh [m]", "Re", "f"
        ));
        for p in &self.pipes {
            out.push_str(&format!(
                "  {:<6} {:>8.3} {:>9.3} {:>9.4} {:>10.3e} {:>8}\n",
                p.id,
                p.flow_lps,
                p.velocity,
                p.headloss,
                p.reynolds,
                p.friction_factor
                    .map_or("-".to_string(), |f| format!("{f:.4}")),
            ));
        }
        out.push_str("\nnodes:\n");
        out.push_str(&format!(
            "  {:<6} {:>9} {:>10} {:>10}\n",
            "id", "z [m]", "head [m]", "p [mH2O]"
        ));
        for n in &self.nodes {
            out.push_str(&format!(
                "  {:<6} {:>9.2} {:>10.3} {:>10.3}{}\n",
                n.id,
                n.elevation,
                n.head,
                n.pressure,
                if n.is_tank { "  (tank)" } else { "" }
            ));
        }
        if let Some(mae) = &self.mae {
            out.push_str("\nreference comparison:\n");
            if let Some(f) = mae.flow_mae_lps {
                out.push_str(&format!(
                    "  flow MAE: {:.4} L/s over {} pipes\n",
                    f, mae.flow_count
                ));
            }
            if let Some(p) = mae.pressure_mae_m {
                out.push_str(&format!(
                    "  pressure MAE: {:.4} m over {} nodes\n",
                    p, mae.pressure_count
                ));
            }
        }
        if let Some(cost) = &self.cost {
            out.push_str(&render_cost(cost));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}

pub fn render_cost(cost: &CostBreakdown) -> String {
    let mut out = String::new();
    out.push_str("\ncosts [USD]:\n");
    out.push_str(&format!("  pipeline:        {:>14.2}\n", cost.pipeline));
    out.push_str(&format!("  tank material:   {:>14.2}\n", cost.tank_material));
    out.push_str(&format!("  tank foundation: {:>14.2}\n", cost.tank_foundation));
    out.push_str(&format!("  pump energy NPV: {:>14.2}\n", cost.pump_npv));
    out.push_str(&format!("  total:           {:>14.2}\n", cost.total));
    if !cost.tanks.is_empty() {
        out.push_str("\ntanks:\n");
        out.push_str(&format!(
            "  {:<6} {:>9} {:>7} {:>7} {:>7} {:>11} {:>9}\n",
            "id", "V [m3]", "D [m]", "h_r", "h_b", "M_k [kNm]", "H_k [kN]"
        ));
        for t in &cost.tanks {
            out.push_str(&format!(
                "  {:<6} {:>9.2} {:>7.2} {:>7.2} {:>7.2} {:>11.2} {:>9.2}\n",
                t.tank_id,
                t.volume,
                t.diameter,
                t.water_depth,
                t.height_above_ground,
                t.wind_moment,
                t.wind_force
            ));
        }
    }
    if !cost.pumps.is_empty() {
        out.push_str("\npumps:\n");
        out.push_str(&format!(
            "  {:<6} {:>11} {:>8} {:>9} {:>9} {:>9} {:>12}\n",
            "tank", "Q_p [L/s]", "h_g [m]", "H_p [m]", "P [kW]", "E [kWh]", "NPV [USD]"
        ));
        for p in &cost.pumps {
            out.push_str(&format!(
                "  {:<6} {:>11.2} {:>8.2} {:>9.2} {:>9.2} {:>9.1} {:>12.2}\n",
                p.tank_id,
                p.flow * 1000.0,
                p.static_head,
                p.total_head,
                p.power_kw,
                p.daily_energy,
                p.npv
            ));
        }
    }
    for w in &cost.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    out
}

/// Design result rendering.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignReport {
    pub tanks: Vec<DesignTankRow>,
    pub cost: CostBreakdown,
    pub feasible: bool,
    pub min_pressure_margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas_vs_baseline: Option<CostDeltas>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignTankRow {
    pub id: String,
    pub water_depth: f64,
    pub height_above_ground: f64,
}

impl DesignReport {
    pub fn new(
        network: &Network,
        solution: &DesignSolution,
        deltas: Option<CostDeltas>,
    ) -> DesignReport {
        let tank_ids: Vec<String> = network
            .tank_nodes()
            .into_iter()
            .map(|t| network.nodes()[t].id.clone())
            .collect();
        DesignReport {
            tanks: solution
                .variables
                .tanks
                .iter()
                .zip(tank_ids)
                .map(|(t, id)| DesignTankRow {
                    id,
                    water_depth: t.water_depth,
                    height_above_ground: t.height_above_ground,
                })
                .collect(),
            cost: solution.cost.clone(),
            feasible: solution.constraints.feasible,
            min_pressure_margin: solution
                .constraints
                .pressure_margins
                .iter()
                .map(|(_, lo, hi)| lo.min(*hi))
                .fold(f64::INFINITY, f64::min),
            deltas_vs_baseline: deltas,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str("optimized tank design:\n");
        for t in &self.tanks {
            out.push_str(&format!(
                "  tank {}: h_r = {:.3} m, h_b = {:.3} m\n",
                t.id, t.water_depth, t.height_above_ground
            ));
        }
        out.push_str(&format!(
            "feasible: {} (min pressure margin {:.4} m)\n",
            self.feasible, self.min_pressure_margin
        ));
        out.push_str(&render_cost(&self.cost));
        if let Some(d) = &self.deltas_vs_baseline {
            out.push_str("\nvs baseline (positive = reduction):\n");
            out.push_str(&format!("  pump energy: {:+.1}%\n", d.pump_npv_pct));
            out.push_str(&format!("  material:    {:+.1}%\n", d.tank_material_pct));
            out.push_str(&format!("  foundation:  {:+.1}%\n", d.tank_foundation_pct));
            out.push_str(&format!("  capital:     {:+.1}%\n", d.capital_pct));
            out.push_str(&format!("  total:       {:+.1}%\n", d.total_pct));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_round_trips_through_json() {
        let r = Report {
            converged: true,
            iterations: 7,
            residual_mass: 1e-12,
            residual_energy: 3.3e-9,
            pipes: vec![PipeRow {
                id: "1".into(),
                from: "a".into(),
                to: "b".into(),
                flow_lps: 0.249,
                velocity: 0.198,
                headloss: 0.1812,
                reynolds: 7921.0,
                friction_factor: None,
            }],
            nodes: vec![NodeRow {
                id: "a".into(),
                elevation: 100.0,
                head: 120.84,
                pressure: 20.84,
                is_tank: true,
            }],
            cost: None,
            mae: None,
            warnings: Vec::new(),
        };
        let json = r.to_json();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back.pipes, r.pipes);
        assert_eq!(back.nodes, r.nodes);
        assert_eq!(back.to_json(), json);
    }
}
