//! The `validate` command: runs the bundled benchmark cases and checks
//! solved flows, pressures, and reference MAEs against fixed thresholds.

use std::time::Instant;

use crate::input::{extract_scenario, parse_input, ReferenceEntry};
use crate::{CaseFilter, EXIT_ACCEPTANCE, EXIT_VALIDATION};
use wdn_core::hydraulics::{mae, solve_wfp, SolverOptions};
use wdn_core::network::cycle_basis;
use wdn_core::Network;

pub const CASE_A: &str = include_str!("../fixtures/case_a.wdn");
pub const CASE_B: &str = include_str!("../fixtures/case_b.wdn");
pub const CASE_C: &str = include_str!("../fixtures/case_c.wdn");

/// Published per-pipe flows for each case, L/s, in pipe order.
pub const CASE_A_FLOWS: [f64; 6] = [0.249, 0.020, -0.020, 0.251, 0.029, 0.500];
pub const CASE_B_FLOWS: [f64; 9] = [
    13.97, 8.72, -0.72, 1.28, 6.28, -4.74, 21.03, 26.03, 40.00,
];
pub const CASE_C_FLOWS: [f64; 21] = [
    55.5, 39.8, 16.4, -10.4, -8.7, 12.5, 14.9, 9.6, 47.8, 0.3, 10.7, -7.6, -16.3, 5.3, 15.7,
    -2.4, 23.5, 4.0, -4.7, 103.4, 35.4,
];

pub struct CaseCheck {
    pub name: &'static str,
    pub text: &'static str,
    /// Per-pipe reference flows, L/s.
    pub flows: &'static [f64],
    /// Allowed per-pipe deviation, L/s.
    pub flow_tolerance: f64,
    /// MAE threshold against the [REFERENCE] series, L/s.
    pub mae_threshold: f64,
    /// Junction pressure window, when enforced (m H₂O).
    pub pressure_window: Option<(f64, f64)>,
    /// Wall-clock budget, seconds.
    pub time_budget: f64,
}

pub fn cases() -> Vec<CaseCheck> {
    vec![
        CaseCheck {
            name: "a",
            text: CASE_A,
            flows: &CASE_A_FLOWS,
            flow_tolerance: 0.005,
            mae_threshold: 0.074,
            pressure_window: Some((10.0, 30.0)),
            time_budget: 1.0,
        },
        CaseCheck {
            name: "b",
            text: CASE_B,
            flows: &CASE_B_FLOWS,
            flow_tolerance: 0.02,
            mae_threshold: 0.01,
            pressure_window: None,
            time_budget: 5.0,
        },
        CaseCheck {
            name: "c",
            text: CASE_C,
            flows: &CASE_C_FLOWS,
            flow_tolerance: 0.5,
            mae_threshold: 0.2,
            pressure_window: None,
            time_budget: 5.0,
        },
    ]
}

pub struct Metric {
    pub case: &'static str,
    pub what: String,
    pub pass: bool,
}

/// Pressure comparisons run at the centimeter resolution results are
/// reported at.
const PRESSURE_RESOLUTION: f64 = 0.01;

pub fn check_case(case: &CaseCheck) -> Result<Vec<Metric>, String> {
    let doc = parse_input(case.text).map_err(|e| format!("case {}: {e}", case.name))?;
    let scenario = extract_scenario(&doc).map_err(|e| format!("case {}: {e}", case.name))?;
    let network =
        Network::build(&scenario.network).map_err(|e| format!("case {}: {e}", case.name))?;
    let loops = cycle_basis(&network);

    let started = Instant::now();
    let flow = solve_wfp(&network, &loops, &SolverOptions::default())
        .map_err(|e| format!("case {}: {e}", case.name))?;
    let elapsed = started.elapsed().as_secs_f64();

    let mut metrics = Vec::new();
    metrics.push(Metric {
        case: case.name,
        what: format!("converged in {} iterations", flow.iterations),
        pass: flow.converged,
    });

    let mut worst = 0.0f64;
    let mut worst_pipe = String::new();
    for (j, &expect) in case.flows.iter().enumerate() {
        let got = flow.flows[j] * 1000.0;
        let dev = (got - expect).abs();
        if dev > worst {
            worst = dev;
            worst_pipe = network.pipes()[j].id.clone();
        }
    }
    metrics.push(Metric {
        case: case.name,
        what: format!(
            "per-pipe flow deviation {:.4} L/s (pipe `{}`) <= {}",
            worst, worst_pipe, case.flow_tolerance
        ),
        pass: worst <= case.flow_tolerance,
    });

    let mut model = Vec::new();
    let mut reference = Vec::new();
    for entry in &scenario.reference {
        if let ReferenceEntry::Flow(id, v) = entry {
            let j = network
                .pipe_index(id)
                .ok_or_else(|| format!("case {}: reference pipe `{id}` unknown", case.name))?;
            model.push(flow.flows[j] * 1000.0);
            reference.push(*v);
        }
    }
    if !model.is_empty() {
        let value = mae(&model, &reference).expect("lengths match");
        metrics.push(Metric {
            case: case.name,
            what: format!("flow MAE {:.4} L/s <= {}", value, case.mae_threshold),
            pass: value <= case.mae_threshold,
        });
    }

    if let Some((lo, hi)) = case.pressure_window {
        let mut min_p = f64::INFINITY;
        let mut max_p = f64::NEG_INFINITY;
        for (i, node) in network.nodes().iter().enumerate() {
            if !node.is_tank() {
                min_p = min_p.min(flow.pressures[i]);
                max_p = max_p.max(flow.pressures[i]);
            }
        }
        metrics.push(Metric {
            case: case.name,
            what: format!(
                "junction pressures {:.3}..{:.3} within [{lo}, {hi}] mH2O",
                min_p, max_p
            ),
            pass: min_p >= lo - PRESSURE_RESOLUTION && max_p <= hi + PRESSURE_RESOLUTION,
        });
    }

    metrics.push(Metric {
        case: case.name,
        what: format!("runtime {:.3} s < {} s", elapsed, case.time_budget),
        pass: elapsed < case.time_budget,
    });

    Ok(metrics)
}

pub fn cmd_validate(filter: Option<CaseFilter>) -> u8 {
    let wanted = |name: &str| match filter {
        None => true,
        Some(CaseFilter::A) => name == "a",
        Some(CaseFilter::B) => name == "b",
        Some(CaseFilter::C) => name == "c",
    };
    let mut failures = Vec::new();
    for case in cases() {
        if !wanted(case.name) {
            continue;
        }
        match check_case(&case) {
            Ok(metrics) => {
                for m in metrics {
                    println!(
                        "[{}] case {}: {}",
                        if m.pass { "PASS" } else { "FAIL" },
                        m.case,
                        m.what
                    );
                    if !m.pass {
                        failures.push(format!("case {}: {}", m.case, m.what));
                    }
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_VALIDATION;
            }
        }
    }
    if failures.is_empty() {
        0
    } else {
        eprintln!("acceptance failures:");
        for f in &failures {
            eprintln!("  {f}");
        }
        EXIT_ACCEPTANCE
    }
}
