//! Friction models, residual assembly, and the steady-state flow solver.
//!
//! The flow problem is square: one mass-balance row per junction plus one
//! energy row per loop (fundamental cycles and tank-to-tank pseudo-loops).
//! It is solved by damped Newton iteration with a backtracking line search;
//! for Darcy-Weisbach pipes the friction factor is recomputed from the
//! current flows but held fixed inside each Jacobian (quasi-Newton).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::network::{spanning_tree, LoopSet, Network, Roughness};

/// Reynolds number from volumetric flow: Re = 4|Q|/(π D ν).
pub fn reynolds(flow: f64, diameter: f64, viscosity: f64) -> f64 {
    4.0 * flow.abs() / (std::f64::consts::PI * diameter * viscosity)
}

/// Explicit full-range friction factor
/// f = ((64/Re)^8 + 9.5 [ln(ε/3.7D + 5.74/Re^0.9) − 2500/Re]^(−16))^(1/8).
///
/// Valid for Re > 0; the caller linearizes below the smoothing threshold
/// instead of passing Re = 0.
pub fn friction_factor(reynolds: f64, rugosity: f64, diameter: f64) -> f64 {
    debug_assert!(reynolds > 0.0);
    let laminar = (64.0 / reynolds).powi(8);
    let bracket =
        (rugosity / (3.7 * diameter) + 5.74 / reynolds.powf(0.9)).ln() - 2500.0 / reynolds;
    (laminar + 9.5 * bracket.powi(-16)).powf(0.125)
}

/// Hazen-Williams resistance k = 10.67 L / (C^1.85 D^4.87), SI.
pub fn resistance_hw(length: f64, c: f64, diameter: f64) -> f64 {
    10.67 * length / (c.powf(1.85) * diameter.powf(4.87))
}

/// Darcy-Weisbach resistance k = 8 f L / (D^5 π² g).
pub fn resistance_dw(length: f64, diameter: f64, friction: f64) -> f64 {
    8.0 * friction * length
        / (diameter.powi(5) * std::f64::consts::PI.powi(2) * crate::GRAVITY)
}

/// Signed friction head loss Δh = k·Q·|Q|^(n−1).
pub fn headloss(resistance: f64, exponent: f64, flow: f64) -> f64 {
    resistance * flow * flow.abs().powf(exponent - 1.0)
}

/// dΔh/dQ with a secant floor below the smoothing threshold, where the
/// true derivative vanishes (n < 2) and would stall Newton.
pub fn headloss_derivative(resistance: f64, exponent: f64, flow: f64, q_eps: f64) -> f64 {
    let q = flow.abs().max(q_eps);
    exponent * resistance * q.powf(exponent - 1.0)
}

/// Per-pipe hydraulic state at a given flow.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PipeHydraulics {
    /// Resistance k with head in m and flow in m³/s.
    pub resistance: f64,
    /// Head-loss exponent n (1.85 Hazen-Williams, 2 Darcy-Weisbach).
    pub exponent: f64,
    /// Friction factor, Darcy-Weisbach only.
    pub friction_factor: Option<f64>,
    /// Reynolds number at the evaluated flow.
    pub reynolds: f64,
}

/// Resistance state for every pipe at flows `q`. Darcy-Weisbach pipes get
/// their friction factor from the current flow, clamped at the smoothing
/// threshold so Re never reaches zero.
pub fn pipe_hydraulics(network: &Network, q: &[f64], q_eps: f64) -> Vec<PipeHydraulics> {
    network
        .pipes()
        .iter()
        .zip(q)
        .map(|(p, &flow)| {
            let re = reynolds(flow, p.diameter, network.viscosity);
            match p.roughness {
                Roughness::HazenWilliams(c) => PipeHydraulics {
                    resistance: resistance_hw(p.length, c, p.diameter),
                    exponent: 1.85,
                    friction_factor: None,
                    reynolds: re,
                },
                Roughness::DarcyWeisbach(eps) => {
                    let re_eff = reynolds(flow.abs().max(q_eps), p.diameter, network.viscosity);
                    let f = friction_factor(re_eff, eps, p.diameter);
                    PipeHydraulics {
                        resistance: resistance_dw(p.length, p.diameter, f),
                        exponent: 2.0,
                        friction_factor: Some(f),
                        reynolds: re,
                    }
                }
            }
        })
        .collect()
}

/// Mass residuals (junction rows, m³/s) followed by loop-energy residuals
/// (m). Darcy-Weisbach resistances are refreshed from `q` before the head
/// losses are summed.
pub fn assemble_residuals(
    network: &Network,
    loops: &LoopSet,
    q: &[f64],
    q_eps: f64,
) -> DVector<f64> {
    let state = pipe_hydraulics(network, q, q_eps);
    residuals_with_state(network, loops, q, &state)
}

fn residuals_with_state(
    network: &Network,
    loops: &LoopSet,
    q: &[f64],
    state: &[PipeHydraulics],
) -> DVector<f64> {
    let nj = network.junction_count();
    let mut r = DVector::zeros(nj + loops.len());

    for (row, node) in network
        .nodes()
        .iter()
        .enumerate()
        .filter_map(|(i, n)| network.junction_row(i).map(|r| (r, n)))
    {
        r[row] = -node.demand;
    }
    for (j, p) in network.pipes().iter().enumerate() {
        if let Some(row) = network.junction_row(p.from) {
            r[row] -= q[j];
        }
        if let Some(row) = network.junction_row(p.to) {
            r[row] += q[j];
        }
    }

    for (li, l) in loops.loops.iter().enumerate() {
        let mut sum = 0.0;
        for &(j, s) in &l.pipes {
            sum += s as f64 * headloss(state[j].resistance, state[j].exponent, q[j]);
        }
        r[nj + li] = sum - l.fixed_head_difference(network);
    }
    r
}

/// Flow-solver options.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Mass residual tolerance, m³/s.
    pub tol_mass: f64,
    /// Loop-energy residual tolerance, m.
    pub tol_energy: f64,
    pub max_iterations: usize,
    /// Smoothing threshold Q_eps, m³/s: below it the head-loss derivative
    /// is floored and Darcy-Weisbach friction uses Re(Q_eps).
    pub smoothing_threshold: f64,
    /// Initial flow on every pipe as a fraction of total demand.
    pub initial_flow_fraction: f64,
    /// Line-search backtracking factor.
    pub damping: f64,
    /// Maximum step halvings per iteration.
    pub max_halvings: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol_mass: 1e-9,
            tol_energy: 1e-7,
            max_iterations: 200,
            smoothing_threshold: 1e-6,
            initial_flow_fraction: 0.10,
            damping: 0.5,
            max_halvings: 30,
        }
    }
}

/// Converged (or best-effort) steady-state solution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowSolution {
    /// Pipe flows, m³/s, signed against each pipe's declared direction.
    pub flows: Vec<f64>,
    /// Node heads, m.
    pub heads: Vec<f64>,
    /// Node pressure heads h − z, m H₂O.
    pub pressures: Vec<f64>,
    /// Net outflow per tank node index, m³/s.
    pub tank_outflows: Vec<(usize, f64)>,
    /// Per-pipe resistance/friction state at the solution.
    pub pipe_state: Vec<PipeHydraulics>,
    /// Max |mass residual|, m³/s.
    pub residual_mass: f64,
    /// Max |loop residual|, m.
    pub residual_energy: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Worst head-closure error over non-tree pipes (path independence).
    pub head_closure: f64,
}

/// Newton matrix of the residual system at flows `q`: junction rows are the
/// constant incidence, loop rows carry the head-loss derivative with the
/// friction factor frozen at `state` (quasi-Newton for Darcy-Weisbach).
pub fn jacobian(
    network: &Network,
    loops: &LoopSet,
    q: &[f64],
    state: &[PipeHydraulics],
    q_eps: f64,
) -> DMatrix<f64> {
    let np = network.pipes().len();
    let nj = network.junction_count();
    let mut jac = DMatrix::zeros(np, np);
    for (j, p) in network.pipes().iter().enumerate() {
        if let Some(row) = network.junction_row(p.from) {
            jac[(row, j)] = -1.0;
        }
        if let Some(row) = network.junction_row(p.to) {
            jac[(row, j)] = 1.0;
        }
    }
    for (li, l) in loops.loops.iter().enumerate() {
        for &(j, s) in &l.pipes {
            jac[(nj + li, j)] += s as f64
                * headloss_derivative(state[j].resistance, state[j].exponent, q[j], q_eps);
        }
    }
    jac
}

/// Residuals at `q` with a prescribed (frozen) pipe state: the function the
/// Newton Jacobian linearizes.
pub fn residuals_frozen(
    network: &Network,
    loops: &LoopSet,
    q: &[f64],
    state: &[PipeHydraulics],
) -> DVector<f64> {
    residuals_with_state(network, loops, q, state)
}

fn residual_split(network: &Network, r: &DVector<f64>) -> (f64, f64) {
    let nj = network.junction_count();
    let mass = r.iter().take(nj).fold(0.0f64, |m, &x| m.max(x.abs()));
    let energy = r.iter().skip(nj).fold(0.0f64, |m, &x| m.max(x.abs()));
    (mass, energy)
}

/// Solves the flow problem by damped Newton on the square residual system.
///
/// Non-convergence is not an error: the best iterate is returned with
/// `converged = false`. A singular Jacobian is an error and names the
/// pipes with vanishing resistance.
pub fn solve_wfp(
    network: &Network,
    loops: &LoopSet,
    options: &SolverOptions,
) -> Result<FlowSolution, SolveError> {
    let np = network.pipes().len();
    let nj = network.junction_count();
    debug_assert_eq!(nj + loops.len(), np, "residual system must be square");

    let q0 = options.initial_flow_fraction * network.total_demand();
    let mut q = vec![q0; np];
    let mut state = pipe_hydraulics(network, &q, options.smoothing_threshold);
    let mut r = residuals_with_state(network, loops, &q, &state);
    let (mut res_mass, mut res_energy) = residual_split(network, &r);
    let mut iterations = 0;

    while iterations < options.max_iterations
        && !(res_mass <= options.tol_mass && res_energy <= options.tol_energy)
    {
        iterations += 1;

        let jac = jacobian(network, loops, &q, &state, options.smoothing_threshold);
        let lu = jac.lu();
        let Some(step) = lu.solve(&(-&r)) else {
            let suspects = network
                .pipes()
                .iter()
                .zip(&state)
                .filter(|(_, s)| s.resistance == 0.0)
                .map(|(p, _)| p.id.clone())
                .collect();
            return Err(SolveError::SingularJacobian {
                iteration: iterations,
                suspects,
            });
        };

        // backtracking line search on the residual 2-norm
        let norm0 = r.norm();
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..=options.max_halvings {
            let trial: Vec<f64> = q.iter().zip(step.iter()).map(|(&x, &d)| x + alpha * d).collect();
            let trial_state = pipe_hydraulics(network, &trial, options.smoothing_threshold);
            let trial_r = residuals_with_state(network, loops, &trial, &trial_state);
            if trial_r.norm() < norm0 {
                q = trial;
                state = trial_state;
                r = trial_r;
                accepted = true;
                break;
            }
            alpha *= options.damping;
        }
        if !accepted {
            break; // stalled; report best iterate below
        }
        (res_mass, res_energy) = residual_split(network, &r);
    }

    let converged = res_mass <= options.tol_mass && res_energy <= options.tol_energy;
    let (heads, pressures, head_closure) = node_heads(network, &q, &state, options.tol_energy);

    let tank_outflows = network
        .tank_nodes()
        .into_iter()
        .map(|t| {
            let mut out = 0.0;
            for (j, p) in network.pipes().iter().enumerate() {
                if p.from == t {
                    out += q[j];
                }
                if p.to == t {
                    out -= q[j];
                }
            }
            (t, out)
        })
        .collect();

    Ok(FlowSolution {
        flows: q,
        heads,
        pressures,
        tank_outflows,
        pipe_state: state,
        residual_mass: res_mass,
        residual_energy: res_energy,
        iterations,
        converged,
        head_closure,
    })
}

/// Node heads by spanning-tree traversal from the root tank, plus pressure
/// heads p = h − z. The returned closure error is the worst disagreement
/// |h_from − h_to − Δh| over pipes outside the tree; with flows satisfying
/// the loop residuals it stays within 10× the energy tolerance.
pub fn node_heads_for_flows(
    network: &Network,
    q: &[f64],
    q_eps: f64,
    tol_energy: f64,
) -> (Vec<f64>, Vec<f64>, f64) {
    let state = pipe_hydraulics(network, q, q_eps);
    node_heads(network, q, &state, tol_energy)
}

fn node_heads(
    network: &Network,
    q: &[f64],
    state: &[PipeHydraulics],
    _tol_energy: f64,
) -> (Vec<f64>, Vec<f64>, f64) {
    let n = network.nodes().len();
    let tree = spanning_tree(network);
    let mut adj = vec![Vec::new(); n];
    for &j in &tree {
        let p = &network.pipes()[j];
        adj[p.from].push((p.to, j, 1i8));
        adj[p.to].push((p.from, j, -1i8));
    }

    let root = network.root_tank();
    let mut heads = vec![f64::NAN; n];
    heads[root] = network.nodes()[root].fixed_head().expect("root is a tank");
    let mut stack = vec![root];
    while let Some(u) = stack.pop() {
        for &(v, j, s) in &adj[u] {
            if heads[v].is_nan() {
                let drop = headloss(state[j].resistance, state[j].exponent, q[j]);
                // s = +1 when the pipe leaves u: head falls along the flow
                heads[v] = heads[u] - s as f64 * drop;
                stack.push(v);
            }
        }
    }

    // path independence: every non-tree pipe must agree with the tree heads
    let in_tree = {
        let mut v = vec![false; network.pipes().len()];
        for &j in &tree {
            v[j] = true;
        }
        v
    };
    let mut closure = 0.0f64;
    for (j, p) in network.pipes().iter().enumerate() {
        if in_tree[j] {
            continue;
        }
        let drop = headloss(state[j].resistance, state[j].exponent, q[j]);
        closure = closure.max((heads[p.from] - heads[p.to] - drop).abs());
    }
    // fixed heads of non-root tanks close through their pseudo-path
    for t in network.tank_nodes() {
        if t != root {
            let fixed = network.nodes()[t].fixed_head().expect("tank");
            closure = closure.max((heads[t] - fixed).abs());
        }
    }

    let pressures = network
        .nodes()
        .iter()
        .zip(&heads)
        .map(|(node, &h)| h - node.elevation)
        .collect();
    (heads, pressures, closure)
}

/// Mean absolute error between two equally long series.
pub fn mae(modeled: &[f64], reference: &[f64]) -> Result<f64, SolveError> {
    if modeled.len() != reference.len() {
        return Err(SolveError::LengthMismatch {
            left: modeled.len(),
            right: reference.len(),
        });
    }
    debug_assert!(!modeled.is_empty());
    let sum: f64 = modeled
        .iter()
        .zip(reference)
        .map(|(m, r)| (m - r).abs())
        .sum();
    Ok(sum / modeled.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // oracle values computed independently by direct evaluation (scipy)
    #[test]
    fn reynolds_values() {
        assert_relative_eq!(reynolds(0.040, 0.25, 1e-6), 2.03718327e5, max_relative = 1e-8);
        assert_eq!(reynolds(0.0, 0.25, 1e-6), 0.0);
        assert_relative_eq!(reynolds(0.0005, 0.04, 1e-6), 1.59154943e4, max_relative = 1e-8);
    }

    #[test]
    fn friction_factor_regimes() {
        // laminar limit: 64/Re dominates
        assert_relative_eq!(friction_factor(500.0, 0.25e-5, 0.25), 0.1280, epsilon = 1e-4);
        // turbulent smooth-ish, cross-checked against Swamee-Jain
        let f = friction_factor(2.037e5, 1.5e-6, 0.25);
        assert_relative_eq!(f, 0.015486, epsilon = 2e-5);
        let sj = 0.25 / (1.5e-6 / (3.7 * 0.25) + 5.74 / 2.037e5f64.powf(0.9)).log10().powi(2);
        assert!((f - sj).abs() / sj < 0.02);
        // fully rough asymptote vs Colebrook limit
        let fr = friction_factor(1e8, 0.01 * 0.25, 0.25);
        let colebrook = 0.25 / (0.01f64 / 3.7).log10().powi(2);
        assert!((fr - colebrook).abs() / colebrook < 0.03);
    }

    #[test]
    fn hazen_williams_resistance() {
        // published worked value, ±0.1%
        assert_relative_eq!(resistance_hw(100.0, 130.0, 0.04), 842_048.4, max_relative = 1e-3);
        assert_relative_eq!(resistance_hw(500.0, 130.0, 0.04), 4_210_242.0, max_relative = 1e-3);
        assert_relative_eq!(resistance_hw(1.0, 130.0, 0.04), 8_420.48, max_relative = 1e-3);
    }

    #[test]
    fn darcy_weisbach_resistance() {
        // direct evaluation with g = 9.80665
        assert_relative_eq!(resistance_dw(100.0, 0.1, 0.02), 16_531.0, max_relative = 1e-4);
        assert_eq!(resistance_dw(100.0, 0.1, 0.0), 0.0);
        // power-law scaling
        let k = resistance_dw(100.0, 0.1, 0.02);
        assert_relative_eq!(resistance_dw(200.0, 0.1, 0.02), 2.0 * k, max_relative = 1e-12);
        assert_relative_eq!(resistance_dw(100.0, 0.2, 0.02), k / 32.0, max_relative = 1e-12);
    }

    #[test]
    fn headloss_values_and_oddness() {
        assert_relative_eq!(headloss(842_048.4, 1.85, 2.49e-4), 0.181262, epsilon = 1e-5);
        assert_eq!(headloss(842_048.4, 1.85, 0.0), 0.0);
        // matches the pump table: 44.10 - 33.70
        assert_relative_eq!(headloss(3655.84, 2.0, 0.05333), 10.3975, epsilon = 1e-3);
        let h = headloss(1000.0, 1.85, 0.01);
        assert_relative_eq!(headloss(1000.0, 1.85, -0.01), -h, max_relative = 1e-12);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let q_eps = 1e-6;
        for &(k, n) in &[(842_048.4, 1.85), (3655.84, 2.0)] {
            let q = 10.0 * q_eps;
            let h = 1e-9;
            let fd = (headloss(k, n, q + h) - headloss(k, n, q - h)) / (2.0 * h);
            let an = headloss_derivative(k, n, q, q_eps);
            assert_relative_eq!(an, fd, max_relative = 1e-6);
        }
        // regularized floor at zero flow
        let d0 = headloss_derivative(842_048.4, 1.85, 0.0, 1e-6);
        assert!(d0 > 0.0);
        assert_relative_eq!(d0, 1.85 * 842_048.4 * 1e-6f64.powf(0.85), max_relative = 1e-12);
        // exact for n = 2 above the floor
        assert_relative_eq!(
            headloss_derivative(100.0, 2.0, 0.5, 1e-6),
            2.0 * 100.0 * 0.5,
            max_relative = 1e-12
        );
    }

    #[test]
    fn mae_basics() {
        assert_eq!(mae(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(mae(&[0.0, 2.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert!(matches!(
            mae(&[1.0], &[1.0, 2.0]),
            Err(SolveError::LengthMismatch { .. })
        ));
    }
}
