//! Flow-solver behavior on small reference networks.

mod common;

use common::{node, porto_network, tank, two_loop_network};
use wdn_core::hydraulics::{assemble_residuals, solve_wfp, SolverOptions};
use wdn_core::network::{accept_explicit_loops, cycle_basis, PipeSpec};
use wdn_core::{HeadlossModel, Network, NetworkSpec};

#[test]
fn two_loop_flows_match_reference_to_half_percent_lps() {
    let net = two_loop_network();
    let loops = cycle_basis(&net);
    let sol = solve_wfp(&net, &loops, &SolverOptions::default()).unwrap();
    assert!(sol.converged);
    let expected_lps = [0.249, 0.020, -0.020, 0.251, 0.029, 0.500];
    for (j, &e) in expected_lps.iter().enumerate() {
        assert!(
            (sol.flows[j] * 1000.0 - e).abs() <= 0.005,
            "pipe {} flow {} vs {}",
            j + 1,
            sol.flows[j] * 1000.0,
            e
        );
    }
    // the residual with the published (rounded) flows is small as well
    let q_pub: Vec<f64> = expected_lps.iter().map(|q| q / 1000.0).collect();
    let r = assemble_residuals(&net, &loops, &q_pub, 1e-6);
    for i in 0..net.junction_count() {
        assert!(r[i].abs() <= 1e-5, "mass row {i}: {}", r[i]);
    }
    for i in net.junction_count()..r.len() {
        assert!(r[i].abs() <= 5e-3, "loop row {i}: {}", r[i]);
    }
}

#[test]
fn two_loop_heads_match_reference() {
    let net = two_loop_network();
    let loops = cycle_basis(&net);
    let sol = solve_wfp(&net, &loops, &SolverOptions::default()).unwrap();
    // node 1: tank head minus the supply-pipe loss
    assert!((sol.heads[0] - 120.182).abs() < 5e-3);
    assert!((sol.pressures[0] - 20.182).abs() < 5e-3);
    // tank node reports its fixed head
    assert!((sol.heads[4] - 120.84).abs() < 1e-12);
    // supply equals total demand
    let (tank_node, outflow) = sol.tank_outflows[0];
    assert_eq!(tank_node, 4);
    assert!((outflow - 0.5e-3).abs() < 1e-9);
}

#[test]
fn porto_flows_match_reference() {
    let net = porto_network();
    let loops = cycle_basis(&net);
    let sol = solve_wfp(&net, &loops, &SolverOptions::default()).unwrap();
    assert!(sol.converged);
    let expected = [13.97, 8.72, -0.72, 1.28, 6.28, -4.74, 21.03, 26.03, 40.00];
    for (j, &e) in expected.iter().enumerate() {
        assert!(
            (sol.flows[j] * 1000.0 - e).abs() <= 0.02,
            "pipe {}: {} vs {}",
            j + 1,
            sol.flows[j] * 1000.0,
            e
        );
    }
}

#[test]
fn explicit_loops_give_the_same_solution() {
    let net = porto_network();
    let auto = cycle_basis(&net);
    let manual = accept_explicit_loops(
        &net,
        &[
            vec![(0, 1), (5, 1), (6, -1), (7, -1)],
            vec![(1, 1), (2, -1), (3, -1), (4, -1), (5, -1)],
        ],
    )
    .unwrap();
    let opts = SolverOptions::default();
    let a = solve_wfp(&net, &auto, &opts).unwrap();
    let b = solve_wfp(&net, &manual, &opts).unwrap();
    for j in 0..net.pipes().len() {
        assert!((a.flows[j] - b.flows[j]).abs() < 1e-9);
    }
}

#[test]
fn solver_is_deterministic() {
    let net = porto_network();
    let loops = cycle_basis(&net);
    let opts = SolverOptions::default();
    let a = solve_wfp(&net, &loops, &opts).unwrap();
    let b = solve_wfp(&net, &loops, &opts).unwrap();
    assert_eq!(a.flows, b.flows);
    assert_eq!(a.heads, b.heads);
    assert_eq!(a.iterations, b.iterations);
}

#[test]
fn mass_closure_tanks_balance_junction_demands() {
    let net = porto_network();
    let loops = cycle_basis(&net);
    let sol = solve_wfp(&net, &loops, &SolverOptions::default()).unwrap();
    let supplied: f64 = sol.tank_outflows.iter().map(|&(_, q)| q).sum();
    let demanded: f64 = net
        .nodes()
        .iter()
        .filter(|n| !n.is_tank())
        .map(|n| n.demand)
        .sum();
    assert!((supplied - demanded).abs() <= 1e-9);
}

#[test]
fn two_tank_pseudo_loop_network_solves() {
    // two tanks with a 1 m head difference joined through a junction
    let spec = NetworkSpec {
        headloss: HeadlossModel::DarcyWeisbach,
        nodes: vec![
            tank("hi", 10.0, -1.6, 5.0),
            node("mid", 0.0, 1.0),
            tank("lo", 10.0, 0.6, 4.0),
        ],
        pipes: vec![
            PipeSpec {
                id: "1".into(),
                from: "hi".into(),
                to: "mid".into(),
                length: 100.0,
                diameter_mm: 100.0,
                roughness: 0.1,
            },
            PipeSpec {
                id: "2".into(),
                from: "mid".into(),
                to: "lo".into(),
                length: 100.0,
                diameter_mm: 100.0,
                roughness: 0.1,
            },
        ],
        ..NetworkSpec::default()
    };
    let net = Network::build(&spec).unwrap();
    let loops = cycle_basis(&net);
    assert_eq!(loops.len(), 1); // one pseudo-loop makes the system square
    let sol = solve_wfp(&net, &loops, &SolverOptions::default()).unwrap();
    assert!(sol.converged);
    // junction balance: 1 L/s withdrawal between the two tank legs
    let q_in = sol.flows[0];
    let q_out = sol.flows[1];
    assert!((q_in - q_out - 1.0e-3).abs() < 1e-9);
    // heads honor both fixed heads
    assert!((sol.heads[0] - 15.0).abs() < 1e-12);
    assert!((sol.heads[2] - 14.0).abs() < 1e-6);
}

#[test]
fn nonconvergence_is_reported_not_erred() {
    let net = porto_network();
    let loops = cycle_basis(&net);
    let opts = SolverOptions {
        max_iterations: 1,
        tol_energy: 1e-12,
        ..SolverOptions::default()
    };
    let sol = solve_wfp(&net, &loops, &opts).unwrap();
    assert!(!sol.converged);
    assert_eq!(sol.iterations, 1);
    assert!(sol.residual_energy > 1e-12);
}
