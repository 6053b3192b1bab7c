//! Tank design optimization: choose per-tank water depth and elevation
//! above ground minimizing total network cost under node-pressure
//! constraints, with the flow solver nested inside each evaluation.
//!
//! The outer search is derivative-free: low-discrepancy multi-start over
//! the (h_r, h_b) box followed by Nelder-Mead refinement of an
//! exact-penalty objective, with the penalty weight escalated until the
//! incumbent is feasible. Everything is deterministic for a fixed seed.

use serde::{Deserialize, Serialize};

use crate::costing::{total_cost, CostBreakdown, EconomicParams, FoundationParams, WindParams};
use crate::error::DesignError;
use crate::hydraulics::{solve_wfp, FlowSolution, SolverOptions};
use crate::network::{LoopSet, Network};

/// Designed state of one tank.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TankDesign {
    /// Water depth h_r, m.
    pub water_depth: f64,
    /// Height of the tank bottom above ground h_b, m.
    pub height_above_ground: f64,
}

/// Decision vector: one [`TankDesign`] per tank, in network tank order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignVariables {
    pub tanks: Vec<TankDesign>,
}

impl DesignVariables {
    /// Current tank geometry of a network as a starting design.
    pub fn from_network(network: &Network) -> Self {
        DesignVariables {
            tanks: network
                .tank_nodes()
                .into_iter()
                .map(|t| {
                    let tank = network.nodes()[t].tank.expect("tank node");
                    TankDesign {
                        water_depth: tank.water_depth,
                        height_above_ground: tank.height_above_ground,
                    }
                })
                .collect(),
        }
    }

    fn as_pairs(&self) -> Vec<(f64, f64)> {
        self.tanks
            .iter()
            .map(|t| (t.water_depth, t.height_above_ground))
            .collect()
    }
}

/// Box bounds and pressure window for the design problem.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DesignBounds {
    /// Minimum junction pressure head, m H₂O.
    pub p_min: f64,
    /// Maximum junction pressure head, m H₂O.
    pub p_max: f64,
    pub h_r_min: f64,
    pub h_r_max: f64,
    pub h_b_min: f64,
    pub h_b_max: f64,
    /// Window bound on h_b + h_r (tank top above its ground).
    pub z_max: f64,
    /// Pressure margins within this resolution count as satisfied. Matches
    /// the centimeter precision pressures are reported at.
    pub pressure_tolerance: f64,
}

impl Default for DesignBounds {
    fn default() -> Self {
        DesignBounds {
            p_min: 10.0,
            p_max: 30.0,
            h_r_min: 0.25,
            h_r_max: 40.0,
            h_b_min: 0.0,
            h_b_max: 39.5,
            z_max: 79.5,
            pressure_tolerance: 0.01,
        }
    }
}

/// Optimizer controls.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignOptions {
    /// Low-discrepancy starts per tank (h_r, h_b) pair.
    pub starts_per_tank: usize,
    /// Hard cap on total starts.
    pub max_starts: usize,
    pub seed: u64,
    /// Nelder-Mead iterations per start.
    pub refine_iterations: usize,
    /// Initial exact-penalty weight, USD per meter of violation.
    pub penalty_weight: f64,
    /// Penalty escalations (×10 each) until the incumbent is feasible.
    pub penalty_escalations: usize,
    /// Optional user baseline, always evaluated as a start.
    pub baseline: Option<DesignVariables>,
    pub solver: SolverOptions,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions {
            starts_per_tank: 32,
            max_starts: 256,
            seed: 0,
            refine_iterations: 160,
            penalty_weight: 1e4,
            penalty_escalations: 6,
            baseline: None,
            solver: SolverOptions::default(),
        }
    }
}

/// One pressure/geometry constraint violation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub what: String,
    /// Magnitude in meters.
    pub amount: f64,
}

/// Constraint margins of an evaluated design.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintReport {
    /// Junction pressure margins (id, p − p_min, p_max − p), m.
    pub pressure_margins: Vec<(String, f64, f64)>,
    pub violations: Vec<Violation>,
    /// Total violation, m.
    pub total_violation: f64,
    pub feasible: bool,
}

/// A fully evaluated design point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Evaluation {
    pub variables: DesignVariables,
    pub flow: FlowSolution,
    pub cost: CostBreakdown,
    pub constraints: ConstraintReport,
}

/// Per-start record in the optimizer trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StartRecord {
    pub start_index: usize,
    pub objective: f64,
    pub feasible: bool,
}

/// Result of the design optimization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignSolution {
    pub variables: DesignVariables,
    pub flow: FlowSolution,
    pub cost: CostBreakdown,
    pub constraints: ConstraintReport,
    pub trace: Vec<StartRecord>,
}

/// Component-wise percentage deltas, positive = reduction vs baseline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostDeltas {
    pub pump_npv_pct: f64,
    pub tank_material_pct: f64,
    pub tank_foundation_pct: f64,
    pub capital_pct: f64,
    pub total_pct: f64,
}

/// Applies the variables to the network, solves the flow problem, and
/// reports cost plus constraint violations. A non-converged inner solve
/// marks the evaluation infeasible with a diagnostic instead of a penalty.
pub fn evaluate_design(
    network: &Network,
    loops: &LoopSet,
    vars: &DesignVariables,
    bounds: &DesignBounds,
    econ: &EconomicParams,
    wind: &WindParams,
    foundation: &FoundationParams,
    solver: &SolverOptions,
) -> Result<Evaluation, DesignError> {
    let candidate = network.with_tank_design(&vars.as_pairs());
    let flow = solve_wfp(&candidate, loops, solver)?;

    let mut violations = Vec::new();
    let mut pressure_margins = Vec::new();
    let tol = bounds.pressure_tolerance;

    if !flow.converged {
        violations.push(Violation {
            what: format!(
                "flow solver did not converge (mass {:.2e} m³/s, energy {:.2e} m)",
                flow.residual_mass, flow.residual_energy
            ),
            amount: f64::INFINITY,
        });
    }

    for (i, node) in candidate.nodes().iter().enumerate() {
        if node.is_tank() {
            continue;
        }
        let p = flow.pressures[i];
        let low = p - bounds.p_min;
        let high = bounds.p_max - p;
        pressure_margins.push((node.id.clone(), low, high));
        if low < -tol {
            violations.push(Violation {
                what: format!("pressure at `{}` below minimum: {:.3} m", node.id, p),
                amount: -low,
            });
        }
        if high < -tol {
            violations.push(Violation {
                what: format!("pressure at `{}` above maximum: {:.3} m", node.id, p),
                amount: -high,
            });
        }
    }

    for (k, t) in vars.tanks.iter().enumerate() {
        let band = t.water_depth + t.height_above_ground;
        if band > bounds.z_max + tol {
            violations.push(Violation {
                what: format!("tank {k}: h_b + h_r = {band:.2} m exceeds z_max"),
                amount: band - bounds.z_max,
            });
        }
        if band < -tol {
            violations.push(Violation {
                what: format!("tank {k}: h_b + h_r = {band:.2} m negative"),
                amount: -band,
            });
        }
    }

    let total_violation = violations.iter().map(|v| v.amount).sum();
    let feasible = violations.is_empty();
    let cost = total_cost(&candidate, &flow.tank_outflows, econ, wind, foundation);

    Ok(Evaluation {
        variables: vars.clone(),
        flow,
        cost,
        constraints: ConstraintReport {
            pressure_margins,
            violations,
            total_violation,
            feasible,
        },
    })
}

// Halton low-discrepancy point in [0,1)^d with a seeded rotation.
fn halton(index: usize, dim: usize, shift: &[f64]) -> Vec<f64> {
    const PRIMES: [usize; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    (0..dim)
        .map(|d| {
            let base = PRIMES[d % PRIMES.len()];
            let mut f = 1.0;
            let mut r = 0.0;
            let mut i = index + 1;
            while i > 0 {
                f /= base as f64;
                r += f * (i % base) as f64;
                i /= base;
            }
            (r + shift[d]).fract()
        })
        .collect()
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Solves the design problem by seeded multi-start Nelder-Mead on an
/// exact-penalty objective. The returned design never costs more than any
/// feasible baseline supplied in the options.
pub fn solve_dom(
    network: &Network,
    loops: &LoopSet,
    bounds: &DesignBounds,
    econ: &EconomicParams,
    wind: &WindParams,
    foundation: &FoundationParams,
    options: &DesignOptions,
) -> Result<DesignSolution, DesignError> {
    let tank_count = network.tank_nodes().len();
    if tank_count == 0 {
        return Err(DesignError::NoTanks);
    }
    let dim = 2 * tank_count;

    let lo: Vec<f64> = (0..dim)
        .map(|i| if i % 2 == 0 { bounds.h_r_min } else { bounds.h_b_min })
        .collect();
    let hi: Vec<f64> = (0..dim)
        .map(|i| if i % 2 == 0 { bounds.h_r_max } else { bounds.h_b_max })
        .collect();

    let to_vars = |x: &[f64]| DesignVariables {
        tanks: (0..tank_count)
            .map(|k| TankDesign {
                water_depth: x[2 * k].clamp(bounds.h_r_min, bounds.h_r_max),
                height_above_ground: x[2 * k + 1].clamp(bounds.h_b_min, bounds.h_b_max),
            })
            .collect(),
    };

    let evaluate = |x: &[f64]| -> Result<Evaluation, DesignError> {
        evaluate_design(
            network,
            loops,
            &to_vars(x),
            bounds,
            econ,
            wind,
            foundation,
            &options.solver,
        )
    };

    // start set: current geometry, optional baseline, then Halton points
    let mut rng = options.seed.wrapping_add(0xA076_1D64_78BD_642F);
    let shift: Vec<f64> = (0..dim)
        .map(|_| (splitmix64(&mut rng) >> 11) as f64 / (1u64 << 53) as f64)
        .collect();
    let n_starts = (options.starts_per_tank * tank_count).min(options.max_starts);
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(n_starts + 2);
    starts.push(
        DesignVariables::from_network(network)
            .as_pairs()
            .iter()
            .flat_map(|&(r, b)| [r, b])
            .collect(),
    );
    if let Some(base) = &options.baseline {
        starts.push(base.as_pairs().iter().flat_map(|&(r, b)| [r, b]).collect());
    }
    for s in 0..n_starts {
        let u = halton(s, dim, &shift);
        starts.push(
            (0..dim)
                .map(|d| lo[d] + u[d] * (hi[d] - lo[d]))
                .collect(),
        );
    }

    let mut trace = Vec::with_capacity(starts.len());
    let mut best: Option<(f64, Evaluation)> = None;
    let mut least_violation: Option<(f64, Evaluation)> = None;
    let mut penalty = options.penalty_weight;

    for escalation in 0..=options.penalty_escalations {
        for (start_index, x0) in starts.iter().enumerate() {
            let refined = nelder_mead(
                |x| {
                    evaluate(x).map(|ev| {
                        let viol = if ev.constraints.feasible {
                            0.0
                        } else if ev.constraints.total_violation.is_finite() {
                            ev.constraints.total_violation
                        } else {
                            1e9
                        };
                        (ev.cost.total + penalty * viol, ev)
                    })
                },
                x0,
                &lo,
                &hi,
                options.refine_iterations,
            )?;
            if let Some((obj, ev)) = refined {
                if escalation == 0 {
                    trace.push(StartRecord {
                        start_index,
                        objective: obj,
                        feasible: ev.constraints.feasible,
                    });
                }
                if ev.constraints.feasible {
                    let cost = ev.cost.total;
                    if best.as_ref().map_or(true, |(b, _)| cost < *b) {
                        best = Some((cost, ev));
                    }
                } else if ev.constraints.total_violation.is_finite() {
                    let v = ev.constraints.total_violation;
                    if least_violation.as_ref().map_or(true, |(b, _)| v < *b) {
                        least_violation = Some((v, ev));
                    }
                }
            }
        }
        if best.is_some() {
            break;
        }
        penalty *= 10.0;
    }

    // A feasible baseline is also a candidate in its own right: guarantee
    // the returned cost never exceeds it.
    if let Some(base) = &options.baseline {
        let x: Vec<f64> = base.as_pairs().iter().flat_map(|&(r, b)| [r, b]).collect();
        let ev = evaluate(&x)?;
        if ev.constraints.feasible
            && best
                .as_ref()
                .map_or(true, |(b, _)| ev.cost.total < *b)
        {
            best = Some((ev.cost.total, ev));
        }
    }

    match best {
        Some((_, ev)) => Ok(DesignSolution {
            variables: ev.variables,
            flow: ev.flow,
            cost: ev.cost,
            constraints: ev.constraints,
            trace,
        }),
        None => {
            let (violation, ev) = least_violation.ok_or(DesignError::Infeasible {
                starts: starts.len(),
                violation: f64::INFINITY,
                water_depth: f64::NAN,
                height: f64::NAN,
            })?;
            Err(DesignError::Infeasible {
                starts: starts.len(),
                violation,
                water_depth: ev.variables.tanks[0].water_depth,
                height: ev.variables.tanks[0].height_above_ground,
            })
        }
    }
}

/// Percentage deltas (baseline − optimized)/baseline per component;
/// positive values mean the optimization reduced cost.
pub fn compare_designs(
    baseline: &DesignSolution,
    optimized: &DesignSolution,
) -> Result<CostDeltas, DesignError> {
    if baseline.variables.tanks.len() != optimized.variables.tanks.len() {
        return Err(DesignError::ScenarioMismatch(format!(
            "tank counts differ: {} vs {}",
            baseline.variables.tanks.len(),
            optimized.variables.tanks.len()
        )));
    }
    let pct = |b: f64, o: f64| if b != 0.0 { (b - o) / b * 100.0 } else { 0.0 };
    let cap_b = baseline.cost.total - baseline.cost.pump_npv;
    let cap_o = optimized.cost.total - optimized.cost.pump_npv;
    Ok(CostDeltas {
        pump_npv_pct: pct(baseline.cost.pump_npv, optimized.cost.pump_npv),
        tank_material_pct: pct(baseline.cost.tank_material, optimized.cost.tank_material),
        tank_foundation_pct: pct(baseline.cost.tank_foundation, optimized.cost.tank_foundation),
        capital_pct: pct(cap_b, cap_o),
        total_pct: pct(baseline.cost.total, optimized.cost.total),
    })
}

/// Bounded Nelder-Mead; returns the best evaluated point, or None when no
/// start evaluation succeeded.
fn nelder_mead<F>(
    mut f: F,
    x0: &[f64],
    lo: &[f64],
    hi: &[f64],
    max_iterations: usize,
) -> Result<Option<(f64, Evaluation)>, DesignError>
where
    F: FnMut(&[f64]) -> Result<(f64, Evaluation), DesignError>,
{
    let dim = x0.len();
    let clamp = |x: &mut Vec<f64>| {
        for d in 0..dim {
            x[d] = x[d].clamp(lo[d], hi[d]);
        }
    };

    let mut simplex: Vec<(f64, Vec<f64>, Evaluation)> = Vec::with_capacity(dim + 1);
    {
        let mut x = x0.to_vec();
        clamp(&mut x);
        let (v, ev) = f(&x)?;
        simplex.push((v, x, ev));
    }
    for d in 0..dim {
        let mut x = x0.to_vec();
        let span = hi[d] - lo[d];
        x[d] += 0.05 * span;
        clamp(&mut x);
        let (v, ev) = f(&x)?;
        simplex.push((v, x, ev));
    }

    for _ in 0..max_iterations {
        simplex.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite objective"));
        let worst = simplex.len() - 1;
        if (simplex[worst].0 - simplex[0].0).abs()
            <= 1e-6 * (1.0 + simplex[0].0.abs())
        {
            break;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|d| simplex[..worst].iter().map(|(_, x, _)| x[d]).sum::<f64>() / worst as f64)
            .collect();

        let point = |coef: f64| -> Vec<f64> {
            let mut x: Vec<f64> = (0..dim)
                .map(|d| centroid[d] + coef * (centroid[d] - simplex[worst].1[d]))
                .collect();
            clamp(&mut x);
            x
        };

        let xr = point(1.0);
        let (vr, er) = f(&xr)?;
        if vr < simplex[0].0 {
            let xe = point(2.0);
            let (ve, ee) = f(&xe)?;
            simplex[worst] = if ve < vr { (ve, xe, ee) } else { (vr, xr, er) };
        } else if vr < simplex[worst - 1].0 {
            simplex[worst] = (vr, xr, er);
        } else {
            let xc = point(-0.5);
            let (vc, ec) = f(&xc)?;
            if vc < simplex[worst].0 {
                simplex[worst] = (vc, xc, ec);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].1.clone();
                for k in 1..simplex.len() {
                    let mut x: Vec<f64> = simplex[k]
                        .1
                        .iter()
                        .zip(&best)
                        .map(|(xi, bi)| bi + 0.5 * (xi - bi))
                        .collect();
                    clamp(&mut x);
                    let (v, ev) = f(&x)?;
                    simplex[k] = (v, x, ev);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite objective"));
    let (v, _, ev) = simplex.swap_remove(0);
    Ok(Some((v, ev)))
}
