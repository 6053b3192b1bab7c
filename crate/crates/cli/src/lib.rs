pub mod input;
pub mod report;
pub mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use input::{design_options, extract_scenario, parse_input, resolve_loops, ReferenceEntry, Scenario};
use report::{DesignReport, MaeBlock, Report};
use wdn_core::design::{compare_designs, evaluate_design, solve_dom};
use wdn_core::hydraulics::{mae, solve_wfp, SolverOptions};
use wdn_core::network::{accept_explicit_loops, cycle_basis};
use wdn_core::{DesignError, LoopSet, Network};

// exit codes: 1 parse, 2 validation, 3 non-convergence, 4 infeasible design,
// 5 acceptance failure
pub const EXIT_PARSE: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NONCONVERGENCE: u8 = 3;
pub const EXIT_INFEASIBLE: u8 = 4;
pub const EXIT_ACCEPTANCE: u8 = 5;

#[derive(Parser)]
#[command(name = "wdn", version, about = "Steady-state solver and tank design optimizer for looped water distribution networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LoopMode {
    /// Derive the loop basis from a spanning tree.
    Auto,
    /// Use the [LOOPS] section of the input file.
    Explicit,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Machine,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseFilter {
    A,
    B,
    C,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the water flow problem and report flows, heads, and pressures.
    Solve {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = LoopMode::Auto)]
        loops: LoopMode,
        /// Compare against the [REFERENCE] series and print MAE.
        #[arg(long)]
        reference: bool,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Mass-balance tolerance override, m³/s.
        #[arg(long)]
        tolerance_mass: Option<f64>,
        /// Loop-energy tolerance override, m.
        #[arg(long)]
        tolerance_energy: Option<f64>,
    },
    /// Optimize tank water depth and elevation against total network cost.
    Design {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = LoopMode::Auto)]
        loops: LoopMode,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long)]
        tolerance_mass: Option<f64>,
        #[arg(long)]
        tolerance_energy: Option<f64>,
    },
    /// Solve and report the full cost breakdown.
    Cost {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = LoopMode::Auto)]
        loops: LoopMode,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long)]
        tolerance_mass: Option<f64>,
        #[arg(long)]
        tolerance_energy: Option<f64>,
    },
    /// Run the bundled benchmark cases and check them against references.
    Validate {
        #[arg(long, value_enum)]
        case: Option<CaseFilter>,
    },
}

/// Parses argv and dispatches; returns the process exit code.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve {
            input,
            loops,
            reference,
            format,
            tolerance_mass,
            tolerance_energy,
        } => cmd_solve(&input, loops, reference, format, tolerance_mass, tolerance_energy),
        Command::Design {
            input,
            seed,
            loops,
            format,
            tolerance_mass,
            tolerance_energy,
        } => cmd_design(&input, seed, loops, format, tolerance_mass, tolerance_energy),
        Command::Cost {
            input,
            loops,
            format,
            tolerance_mass,
            tolerance_energy,
        } => cmd_cost(&input, loops, format, tolerance_mass, tolerance_energy),
        Command::Validate { case } => validate::cmd_validate(case),
    };
    ExitCode::from(code)
}

struct Prepared {
    scenario: Scenario,
    network: Network,
    loops: LoopSet,
    solver: SolverOptions,
}

fn prepare(
    path: &PathBuf,
    loop_mode: LoopMode,
    tolerance_mass: Option<f64>,
    tolerance_energy: Option<f64>,
) -> Result<Prepared, u8> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_PARSE
    })?;
    let doc = parse_input(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_PARSE
    })?;
    let scenario = extract_scenario(&doc).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_PARSE
    })?;
    for w in &scenario.warnings {
        eprintln!("warning: {w}");
    }
    let network = Network::build(&scenario.network).map_err(|e| {
        eprintln!("error: invalid network: {e}");
        EXIT_VALIDATION
    })?;
    let loops = match loop_mode {
        LoopMode::Auto => cycle_basis(&network),
        LoopMode::Explicit => {
            let Some(walks) = &scenario.loops else {
                eprintln!("error: --loops explicit requires a [LOOPS] section");
                return Err(EXIT_VALIDATION);
            };
            let resolved = resolve_loops(&network, walks).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_VALIDATION
            })?;
            accept_explicit_loops(&network, &resolved).map_err(|e| {
                eprintln!("error: invalid loops: {e}");
                EXIT_VALIDATION
            })?
        }
    };
    let mut solver = SolverOptions::default();
    if let Some(t) = tolerance_mass {
        solver.tol_mass = t;
    }
    if let Some(t) = tolerance_energy {
        solver.tol_energy = t;
    }
    Ok(Prepared {
        scenario,
        network,
        loops,
        solver,
    })
}

fn mae_block(p: &Prepared, flows: &[f64], pressures: &[f64]) -> MaeBlock {
    let mut flow_model = Vec::new();
    let mut flow_ref = Vec::new();
    let mut press_model = Vec::new();
    let mut press_ref = Vec::new();
    for entry in &p.scenario.reference {
        match entry {
            ReferenceEntry::Flow(id, v) => {
                if let Some(j) = p.network.pipe_index(id) {
                    flow_model.push(flows[j] * 1000.0);
                    flow_ref.push(*v);
                }
            }
            ReferenceEntry::Pressure(id, v) => {
                if let Some(i) = p.network.node_index(id) {
                    press_model.push(pressures[i]);
                    press_ref.push(*v);
                }
            }
        }
    }
    MaeBlock {
        flow_mae_lps: (!flow_model.is_empty())
            .then(|| mae(&flow_model, &flow_ref).expect("equal lengths")),
        pressure_mae_m: (!press_model.is_empty())
            .then(|| mae(&press_model, &press_ref).expect("equal lengths")),
        flow_count: flow_model.len(),
        pressure_count: press_model.len(),
    }
}

fn emit(report: &Report, format: Format) {
    match format {
        Format::Table => print!("{}", report.render_table()),
        Format::Machine => println!("{}", report.to_json()),
    }
}

fn cmd_solve(
    path: &PathBuf,
    loop_mode: LoopMode,
    reference: bool,
    format: Format,
    tolerance_mass: Option<f64>,
    tolerance_energy: Option<f64>,
) -> u8 {
    let p = match prepare(path, loop_mode, tolerance_mass, tolerance_energy) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let flow = match solve_wfp(&p.network, &p.loops, &p.solver) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_NONCONVERGENCE;
        }
    };
    let mut report = Report::from_solution(&p.network, &flow);
    if reference {
        report.mae = Some(mae_block(&p, &flow.flows, &flow.pressures));
    }
    emit(&report, format);
    if flow.converged {
        0
    } else {
        eprintln!(
            "error: no convergence after {} iterations (mass {:.2e}, energy {:.2e})",
            flow.iterations, flow.residual_mass, flow.residual_energy
        );
        EXIT_NONCONVERGENCE
    }
}

fn cmd_cost(
    path: &PathBuf,
    loop_mode: LoopMode,
    format: Format,
    tolerance_mass: Option<f64>,
    tolerance_energy: Option<f64>,
) -> u8 {
    let p = match prepare(path, loop_mode, tolerance_mass, tolerance_energy) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let Some(econ) = p.scenario.economics.clone() else {
        eprintln!("error: cost requires an [ECONOMICS] section");
        return EXIT_VALIDATION;
    };
    let flow = match solve_wfp(&p.network, &p.loops, &p.solver) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_NONCONVERGENCE;
        }
    };
    if !flow.converged {
        eprintln!("error: flow solution did not converge; costs not evaluated");
        return EXIT_NONCONVERGENCE;
    }
    let cost = wdn_core::costing::total_cost(
        &p.network,
        &flow.tank_outflows,
        &econ,
        &p.scenario.wind,
        &p.scenario.foundation,
    );
    let mut report = Report::from_solution(&p.network, &flow);
    report.warnings = cost.warnings.clone();
    report.cost = Some(cost);
    emit(&report, format);
    0
}

fn cmd_design(
    path: &PathBuf,
    seed: u64,
    loop_mode: LoopMode,
    format: Format,
    tolerance_mass: Option<f64>,
    tolerance_energy: Option<f64>,
) -> u8 {
    let p = match prepare(path, loop_mode, tolerance_mass, tolerance_energy) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let Some(econ) = p.scenario.economics.clone() else {
        eprintln!("error: design requires an [ECONOMICS] section");
        return EXIT_VALIDATION;
    };
    let mut options = match design_options(&p.scenario, &p.network, seed) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    options.solver = p.solver;

    let solution = match solve_dom(
        &p.network,
        &p.loops,
        &p.scenario.bounds,
        &econ,
        &p.scenario.wind,
        &p.scenario.foundation,
        &options,
    ) {
        Ok(s) => s,
        Err(DesignError::Infeasible {
            starts,
            violation,
            water_depth,
            height,
        }) => {
            eprintln!(
                "error: no feasible design in {starts} starts; least violation {violation:.4} m at h_r={water_depth:.3}, h_b={height:.3}"
            );
            return EXIT_INFEASIBLE;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_NONCONVERGENCE;
        }
    };

    // baseline comparison when the input supplies one
    let deltas = options.baseline.as_ref().and_then(|base| {
        evaluate_design(
            &p.network,
            &p.loops,
            base,
            &p.scenario.bounds,
            &econ,
            &p.scenario.wind,
            &p.scenario.foundation,
            &options.solver,
        )
        .ok()
        .map(|ev| {
            let baseline_solution = wdn_core::design::DesignSolution {
                variables: ev.variables,
                flow: ev.flow,
                cost: ev.cost,
                constraints: ev.constraints,
                trace: Vec::new(),
            };
            compare_designs(&baseline_solution, &solution).expect("same scenario")
        })
    });

    let report = DesignReport::new(&p.network, &solution, deltas);
    match format {
        Format::Table => print!("{}", report.render_table()),
        Format::Machine => println!("{}", report.to_json()),
    }
    0
}
