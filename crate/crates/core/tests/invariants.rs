//! Property suites: Jacobian correctness, direction anti-symmetry, head
//! path-independence, energy closure on non-basis cycles, and the loop
//! count law on random connected graphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wdn_core::hydraulics::{
    jacobian, node_heads_for_flows, pipe_hydraulics, residuals_frozen, solve_wfp, SolverOptions,
};
use wdn_core::network::{cycle_basis, NodeSpec, PipeSpec, TankSpec};
use wdn_core::{HeadlossModel, Network, NetworkSpec};

mod common;

use common::{porto_network, porto_spec, two_loop_network};

#[test]
fn jacobian_matches_finite_differences() {
    for net in [two_loop_network(), porto_network()] {
        let loops = cycle_basis(&net);
        let sol = solve_wfp(&net, &loops, &SolverOptions::default()).unwrap();
        let q = sol.flows.clone();
        let q_eps = 1e-6;
        let state = pipe_hydraulics(&net, &q, q_eps);
        let jac = jacobian(&net, &loops, &q, &state, q_eps);
        let scale: f64 = q.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let step = 1e-7 * scale;
        for j in 0..q.len() {
            // stay clear of the smoothing band
            if q[j].abs() < 10.0 * q_eps {
                continue;
            }
            let mut plus = q.clone();
            plus[j] += step;
            let mut minus = q.clone();
            minus[j] -= step;
            let fd = (residuals_frozen(&net, &loops, &plus, &state)
                - residuals_frozen(&net, &loops, &minus, &state))
                / (2.0 * step);
            for i in 0..q.len() {
                let a = jac[(i, j)];
                let d = fd[i];
                let denom = a.abs().max(d.abs());
                if denom > 1e-9 {
                    assert!(
                        (a - d).abs() / denom <= 1e-4,
                        "J[{i},{j}] analytic {a} vs fd {d}"
                    );
                }
            }
        }
    }
}

#[test]
fn reversing_a_pipe_negates_its_flow_and_keeps_heads() {
    let base = porto_network();
    let loops = cycle_basis(&base);
    let sol = solve_wfp(&base, &loops, &SolverOptions::default()).unwrap();

    for flip in 0..9 {
        let mut spec = porto_spec();
        let (f, t) = (spec.pipes[flip].from.clone(), spec.pipes[flip].to.clone());
        spec.pipes[flip].from = t;
        spec.pipes[flip].to = f;
        let net = Network::build(&spec).unwrap();
        let loops = cycle_basis(&net);
        let flipped = solve_wfp(&net, &loops, &SolverOptions::default()).unwrap();
        assert!(flipped.converged);
        for j in 0..9 {
            let expect = if j == flip { -sol.flows[j] } else { sol.flows[j] };
            assert!(
                (flipped.flows[j] - expect).abs() < 1e-9,
                "flip {flip}, pipe {j}"
            );
        }
        for i in 0..net.nodes().len() {
            assert!((flipped.heads[i] - sol.heads[i]).abs() < 1e-7);
        }
    }
}

#[test]
fn head_path_independence() {
    let tol_energy = SolverOptions::default().tol_energy;
    for net in [two_loop_network(), porto_network()] {
        let loops = cycle_basis(&net);
        let sol = solve_wfp(&net, &loops, &SolverOptions::default()).unwrap();
        let (_, _, closure) = node_heads_for_flows(&net, &sol.flows, 1e-6, tol_energy);
        assert!(
            closure <= 10.0 * tol_energy,
            "closure {closure} exceeds 10x energy tolerance"
        );
    }
}

#[test]
fn energy_closes_around_random_non_basis_cycles() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let net = porto_network();
    let loops = cycle_basis(&net);
    let opts = SolverOptions::default();
    let sol = solve_wfp(&net, &loops, &opts).unwrap();
    let state = pipe_hydraulics(&net, &sol.flows, opts.smoothing_threshold);

    // random cycles: random spanning tree (random pipe order) + a chord
    for _ in 0..50 {
        let n = net.nodes().len();
        let mut order: Vec<usize> = (0..net.pipes().len()).collect();
        for i in (1..order.len()).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut tree = Vec::new();
        let mut chords = Vec::new();
        for &j in &order {
            let e = &net.pipes()[j];
            let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
            if a != b {
                parent[a] = b;
                tree.push(j);
            } else {
                chords.push(j);
            }
        }
        if chords.is_empty() {
            continue;
        }
        let chord = chords[rng.gen_range(0..chords.len())];
        // walk the tree from chord.to back to chord.from
        let mut adj = vec![Vec::new(); n];
        for &j in &tree {
            let p = &net.pipes()[j];
            adj[p.from].push((p.to, j, 1i8));
            adj[p.to].push((p.from, j, -1i8));
        }
        let (from, to) = (net.pipes()[chord].from, net.pipes()[chord].to);
        let mut prev: Vec<Option<(usize, usize, i8)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[to] = true;
        let mut queue = std::collections::VecDeque::from([to]);
        while let Some(u) = queue.pop_front() {
            for &(v, j, s) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    prev[v] = Some((u, j, s));
                    queue.push_back(v);
                }
            }
        }
        let mut sum = wdn_core::hydraulics::headloss(
            state[chord].resistance,
            state[chord].exponent,
            sol.flows[chord],
        );
        let mut cur = from;
        while cur != to {
            let (u, j, s) = prev[cur].expect("tree path");
            sum += s as f64
                * wdn_core::hydraulics::headloss(
                    state[j].resistance,
                    state[j].exponent,
                    sol.flows[j],
                );
            cur = u;
        }
        assert!(
            sum.abs() <= opts.tol_energy,
            "random cycle closure {sum} via chord {chord}"
        );
    }
}

/// Exact cycle rank oracle: pipes − rank of the full signed node incidence
/// matrix, computed by fraction-free integer elimination.
fn cycle_rank_oracle(n_nodes: usize, edges: &[(usize, usize)]) -> usize {
    let mut m: Vec<Vec<i64>> = vec![vec![0; edges.len()]; n_nodes];
    for (j, &(a, b)) in edges.iter().enumerate() {
        m[a][j] -= 1;
        m[b][j] += 1;
    }
    let mut rank = 0;
    let mut row = 0;
    for col in 0..edges.len() {
        if row == n_nodes {
            break;
        }
        let Some(p) = (row..n_nodes).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(row, p);
        for r in 0..n_nodes {
            if r != row && m[r][col] != 0 {
                let (a, b) = (m[row][col], m[r][col]);
                for c in 0..edges.len() {
                    m[r][c] = m[r][c] * a - m[row][c] * b;
                }
            }
        }
        rank += 1;
        row += 1;
    }
    edges.len() - rank
}

#[test]
fn loop_count_is_pipes_minus_junctions_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for trial in 0..100 {
        let n = rng.gen_range(3..=30);
        // random spanning tree, then extra chords
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for v in 1..n {
            edges.push((rng.gen_range(0..v), v));
        }
        let extra = rng.gen_range(0..=n);
        for _ in 0..extra {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b && !edges.contains(&(a, b)) && !edges.contains(&(b, a)) {
                edges.push((a, b));
            }
        }
        let tank_count = rng.gen_range(1..=3.min(n));
        // demands: junctions draw 1 L/s, first tank supplies the balance
        let mut nodes: Vec<NodeSpec> = (0..n)
            .map(|i| {
                let is_tank = i < tank_count;
                NodeSpec {
                    id: format!("n{i}"),
                    elevation: 0.0,
                    demand_lps: if is_tank { 0.0 } else { 1.0 },
                    tank: is_tank.then_some(TankSpec {
                        water_depth: 10.0 + i as f64,
                        height_above_ground: 0.0,
                        volume: None,
                    }),
                }
            })
            .collect();
        nodes[0].demand_lps = -((n - tank_count) as f64);
        let pipes = edges
            .iter()
            .enumerate()
            .map(|(j, &(a, b))| PipeSpec {
                id: format!("p{j}"),
                from: format!("n{a}"),
                to: format!("n{b}"),
                length: 100.0,
                diameter_mm: 100.0,
                roughness: 130.0,
            })
            .collect();
        let spec = NetworkSpec {
            headloss: HeadlossModel::HazenWilliams,
            nodes,
            pipes,
            ..NetworkSpec::default()
        };
        let net = Network::build(&spec).unwrap();
        let loops = cycle_basis(&net);

        let junctions = n - tank_count;
        assert_eq!(
            loops.len(),
            net.pipes().len() - junctions,
            "trial {trial}: count must equal pipes - junctions"
        );
        let oracle = cycle_rank_oracle(n, &edges) + (tank_count - 1);
        assert_eq!(loops.len(), oracle, "trial {trial}: vs rank oracle");

        // every closed loop closes; every pseudo-loop joins two tanks
        for l in &loops.loops {
            if l.is_pseudo() {
                assert!(net.nodes()[l.start].is_tank() && net.nodes()[l.end].is_tank());
            } else {
                assert_eq!(l.fixed_head_difference(&net), 0.0);
            }
        }
    }
}

#[test]
fn cycle_basis_is_deterministic() {
    let net = porto_network();
    let a = cycle_basis(&net);
    let b = cycle_basis(&net);
    assert_eq!(a, b);
}
