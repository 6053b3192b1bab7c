//! The `.wdn` sectioned input format.
//!
//! Line-oriented: `[SECTION]` headers, `#` comments, whitespace-separated
//! fields. Units are fixed per column: elevations and lengths in m, demands
//! in L/s, diameters in mm, roughness as Hazen-Williams C or rugosity in mm
//! depending on the `headloss` option.

use std::collections::HashSet;
use std::fmt;

use wdn_core::network::{NodeSpec, PipeSpec, PumpSpec, TankSpec};
use wdn_core::{
    DesignBounds, DesignOptions, DesignVariables, EconomicParams, FoundationParams,
    HeadlossModel, NetworkSpec, TankDesign, WindParams,
};

pub const SECTION_ORDER: [&str; 11] = [
    "OPTIONS",
    "JUNCTIONS",
    "TANKS",
    "PIPES",
    "PUMPS",
    "ECONOMICS",
    "WIND",
    "FOUNDATION",
    "DESIGN",
    "LOOPS",
    "REFERENCE",
];

/// Parse failure with a line-precise location.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

/// One `[NAME]` section: rows of whitespace-separated tokens, each tagged
/// with its source line for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub rows: Vec<(usize, Vec<String>)>,
}

/// Structural view of an input file: sections in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct InputDocument {
    pub sections: Vec<Section>,
}

impl InputDocument {
    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    /// Renders back to text; reparsing the result yields an equal document.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            out.push('[');
            out.push_str(&s.name);
            out.push_str("]\n");
            for (_, row) in &s.rows {
                out.push_str(&row.join(" "));
                out.push('\n');
            }
            out.push('\n');
        }
        out
    }

    /// Structural equality ignoring source line numbers.
    pub fn same_structure(&self, other: &InputDocument) -> bool {
        self.sections.len() == other.sections.len()
            && self
                .sections
                .iter()
                .zip(&other.sections)
                .all(|(a, b)| {
                    a.name == b.name
                        && a.rows.len() == b.rows.len()
                        && a.rows
                            .iter()
                            .zip(&b.rows)
                            .all(|((_, x), (_, y))| x == y)
                })
    }
}

/// Splits text into sections; rejects unknown section names and content
/// outside any section.
pub fn parse_input(text: &str) -> Result<InputDocument, ParseError> {
    let mut sections: Vec<Section> = Vec::new();
    let mut seen = HashSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(line, "unterminated section header"))?
                .trim()
                .to_uppercase();
            if !SECTION_ORDER.contains(&name.as_str()) {
                return Err(err(line, format!("unknown section `[{name}]`")));
            }
            if !seen.insert(name.clone()) {
                return Err(err(line, format!("duplicate section `[{name}]`")));
            }
            sections.push(Section {
                name,
                rows: Vec::new(),
            });
        } else {
            let Some(current) = sections.last_mut() else {
                return Err(err(line, "content before any [SECTION] header"));
            };
            current
                .rows
                .push((line, content.split_whitespace().map(str::to_owned).collect()));
        }
    }
    if sections.iter().all(|s| s.name != "OPTIONS") {
        return Err(err(0, "missing required section [OPTIONS]"));
    }
    if sections
        .iter()
        .all(|s| s.name != "JUNCTIONS" && s.name != "TANKS")
    {
        return Err(err(0, "missing required section [JUNCTIONS] or [TANKS]"));
    }
    let pipes_ok = sections
        .iter()
        .any(|s| s.name == "PIPES" && !s.rows.is_empty());
    if !pipes_ok {
        return Err(err(0, "no pipes: section [PIPES] is missing or empty"));
    }
    Ok(InputDocument { sections })
}

/// Reference series entry.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceEntry {
    /// Expected pipe flow, L/s.
    Flow(String, f64),
    /// Expected node pressure head, m.
    Pressure(String, f64),
}

/// Everything a command needs, extracted and typed.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub network: NetworkSpec,
    pub economics: Option<EconomicParams>,
    pub wind: WindParams,
    pub foundation: FoundationParams,
    pub bounds: DesignBounds,
    pub design_starts: Option<usize>,
    pub baseline: Option<Vec<(String, f64, f64)>>,
    /// Explicit loops as signed pipe-id walks.
    pub loops: Option<Vec<Vec<(String, i8)>>>,
    pub reference: Vec<ReferenceEntry>,
    /// Accepted-but-unused inputs and similar notices.
    pub warnings: Vec<String>,
}

fn num(line: usize, tok: &str, what: &str) -> Result<f64, ParseError> {
    tok.parse::<f64>()
        .map_err(|_| err(line, format!("{what}: `{tok}` is not a number")))
}

fn arity(line: usize, row: &[String], min: usize, max: usize, what: &str) -> Result<(), ParseError> {
    if row.len() < min || row.len() > max {
        return Err(err(
            line,
            format!(
                "{what}: expected {} fields, got {}",
                if min == max {
                    min.to_string()
                } else {
                    format!("{min}..{max}")
                },
                row.len()
            ),
        ));
    }
    Ok(())
}

fn opt_field(tok: &str, line: usize, what: &str) -> Result<Option<f64>, ParseError> {
    if tok.eq_ignore_ascii_case("auto") || tok == "-" {
        Ok(None)
    } else {
        num(line, tok, what).map(Some)
    }
}

/// Typed extraction from a parsed document.
pub fn extract_scenario(doc: &InputDocument) -> Result<Scenario, ParseError> {
    let mut network = NetworkSpec::default();
    let mut warnings = Vec::new();

    if let Some(opts) = doc.section("OPTIONS") {
        for (line, row) in &opts.rows {
            let key = row[0].to_lowercase();
            match key.as_str() {
                "headloss" => {
                    arity(*line, row, 2, 2, "headloss")?;
                    network.headloss = match row[1].to_uppercase().as_str() {
                        "HW" => HeadlossModel::HazenWilliams,
                        "DW" => HeadlossModel::DarcyWeisbach,
                        other => {
                            return Err(err(
                                *line,
                                format!("headloss: expected HW or DW, got `{other}`"),
                            ))
                        }
                    };
                }
                "viscosity" => {
                    arity(*line, row, 2, 2, "viscosity")?;
                    network.viscosity = num(*line, &row[1], "viscosity")?;
                }
                "density" => {
                    arity(*line, row, 2, 2, "density")?;
                    network.density = num(*line, &row[1], "density")?;
                }
                "k1" => {
                    arity(*line, row, 2, 2, "k1")?;
                    network.day_factor = num(*line, &row[1], "k1")?;
                }
                "k2" => {
                    arity(*line, row, 2, 2, "k2")?;
                    network.hour_factor = num(*line, &row[1], "k2")?;
                }
                "wdn_hours" => {
                    arity(*line, row, 2, 2, "wdn_hours")?;
                    network.network_hours = num(*line, &row[1], "wdn_hours")?;
                }
                // accepted for completeness of the parameter sheet; no
                // equation consumes them
                "alpha" | "operational_cost_rate" | "d_tr" | "fill_duration" => {
                    arity(*line, row, 2, 2, &key)?;
                    num(*line, &row[1], &key)?;
                    warnings.push(format!(
                        "option `{key}` is accepted but unused by the model"
                    ));
                }
                other => return Err(err(*line, format!("unknown option `{other}`"))),
            }
        }
    }

    if let Some(junctions) = doc.section("JUNCTIONS") {
        for (line, row) in &junctions.rows {
            arity(*line, row, 3, 3, "junction row (id elevation demand)")?;
            network.nodes.push(NodeSpec {
                id: row[0].clone(),
                elevation: num(*line, &row[1], "elevation")?,
                demand_lps: num(*line, &row[2], "demand")?,
                tank: None,
            });
        }
    }

    if let Some(tanks) = doc.section("TANKS") {
        for (line, row) in &tanks.rows {
            arity(*line, row, 5, 6, "tank row (id elevation demand h_r h_b [volume])")?;
            network.nodes.push(NodeSpec {
                id: row[0].clone(),
                elevation: num(*line, &row[1], "elevation")?,
                demand_lps: num(*line, &row[2], "demand")?,
                tank: Some(TankSpec {
                    water_depth: num(*line, &row[3], "water depth")?,
                    height_above_ground: num(*line, &row[4], "height above ground")?,
                    volume: row.get(5).map(|v| num(*line, v, "volume")).transpose()?,
                }),
            });
        }
    }

    if let Some(pipes) = doc.section("PIPES") {
        for (line, row) in &pipes.rows {
            arity(*line, row, 6, 6, "pipe row (id from to length diameter roughness)")?;
            network.pipes.push(PipeSpec {
                id: row[0].clone(),
                from: row[1].clone(),
                to: row[2].clone(),
                length: num(*line, &row[3], "length")?,
                diameter_mm: num(*line, &row[4], "diameter")?,
                roughness: num(*line, &row[5], "roughness")?,
            });
        }
    }

    if let Some(pumps) = doc.section("PUMPS") {
        for (line, row) in &pumps.rows {
            arity(
                *line,
                row,
                7,
                8,
                "pump row (tank z_p length diameter n_h n_p efficiency [k_p])",
            )?;
            network.pumps.push(PumpSpec {
                tank: row[0].clone(),
                elevation: opt_field(&row[1], *line, "pump elevation")?,
                supply_length: num(*line, &row[2], "supply length")?,
                supply_diameter_mm: opt_field(&row[3], *line, "supply diameter")?,
                roughness: None,
                daily_hours: num(*line, &row[4], "daily hours")?,
                operating_hours: num(*line, &row[5], "operating hours")?,
                efficiency: num(*line, &row[6], "efficiency")?,
                resistance: match row.get(7) {
                    Some(tok) => opt_field(tok, *line, "pump resistance")?,
                    None => None,
                },
            });
        }
    }

    let mut economics = None;
    if let Some(econ) = doc.section("ECONOMICS") {
        let mut e = EconomicParams::default();
        for (line, row) in &econ.rows {
            let key = row[0].to_lowercase();
            match key.as_str() {
                "energy_price" => e.energy_price = num(*line, &row[1], &key)?,
                "interest_rate" => e.interest_rate = num(*line, &row[1], &key)?,
                "energy_escalation" => e.energy_escalation = num(*line, &row[1], &key)?,
                "lifespan" => e.lifespan = num(*line, &row[1], &key)?,
                "tank_material_cost" => e.tank_material_unit_cost = num(*line, &row[1], &key)?,
                "pipeline_coeffs" => {
                    if row.len() > 9 {
                        return Err(err(*line, "pipeline_coeffs: at most degree 7 (8 terms)"));
                    }
                    e.pipeline_coefficients = row[1..]
                        .iter()
                        .map(|t| num(*line, t, "pipeline coefficient"))
                        .collect::<Result<_, _>>()?;
                }
                "alpha" | "operational_cost_rate" | "d_tr" | "fill_duration" => {
                    num(*line, &row[1], &key)?;
                    warnings.push(format!(
                        "economics `{key}` is accepted but unused by the model"
                    ));
                }
                other => return Err(err(*line, format!("unknown economics key `{other}`"))),
            }
        }
        economics = Some(e);
    }

    let mut wind = WindParams::default();
    if let Some(w) = doc.section("WIND") {
        for (line, row) in &w.rows {
            match row[0].to_lowercase().as_str() {
                "speed" => wind.wind_speed = num(*line, &row[1], "wind speed")?,
                "exponent" => wind.exponent = num(*line, &row[1], "wind exponent")?,
                other => return Err(err(*line, format!("unknown wind key `{other}`"))),
            }
        }
    }

    let mut foundation = FoundationParams::default();
    if let Some(f) = doc.section("FOUNDATION") {
        for (line, row) in &f.rows {
            let v = num(*line, &row[1], &row[0])?;
            match row[0].to_lowercase().as_str() {
                "alpha_volume" => foundation.alpha_volume = v,
                "beta_volume" => foundation.beta_volume = v,
                "alpha_moment" => foundation.alpha_moment = v,
                "beta_moment" => foundation.beta_moment = v,
                "alpha_force" => foundation.alpha_force = v,
                "beta_force" => foundation.beta_force = v,
                other => return Err(err(*line, format!("unknown foundation key `{other}`"))),
            }
        }
    }

    let mut bounds = DesignBounds::default();
    let mut design_starts = None;
    let mut baseline = None;
    if let Some(d) = doc.section("DESIGN") {
        for (line, row) in &d.rows {
            match row[0].to_lowercase().as_str() {
                "p_min" => bounds.p_min = num(*line, &row[1], "p_min")?,
                "p_max" => bounds.p_max = num(*line, &row[1], "p_max")?,
                "h_r_min" => bounds.h_r_min = num(*line, &row[1], "h_r_min")?,
                "h_r_max" => bounds.h_r_max = num(*line, &row[1], "h_r_max")?,
                "h_b_min" => bounds.h_b_min = num(*line, &row[1], "h_b_min")?,
                "h_b_max" => bounds.h_b_max = num(*line, &row[1], "h_b_max")?,
                "z_max" => bounds.z_max = num(*line, &row[1], "z_max")?,
                "starts" => {
                    design_starts = Some(num(*line, &row[1], "starts")? as usize);
                }
                "baseline" => {
                    arity(*line, row, 4, 4, "baseline (tank h_r h_b)")?;
                    baseline.get_or_insert_with(Vec::new).push((
                        row[1].clone(),
                        num(*line, &row[2], "baseline h_r")?,
                        num(*line, &row[3], "baseline h_b")?,
                    ));
                }
                other => return Err(err(*line, format!("unknown design key `{other}`"))),
            }
        }
    }

    let loops = doc.section("LOOPS").map(|l| {
        l.rows
            .iter()
            .map(|(line, row)| {
                row.iter()
                    .map(|tok| {
                        let (sign, id) = match tok.strip_prefix('-') {
                            Some(rest) => (-1i8, rest),
                            None => (1i8, tok.strip_prefix('+').unwrap_or(tok)),
                        };
                        if id.is_empty() {
                            Err(err(*line, format!("bad loop entry `{tok}`")))
                        } else {
                            Ok((id.to_string(), sign))
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()
    });
    let loops = match loops {
        Some(Ok(l)) => Some(l),
        Some(Err(e)) => return Err(e),
        None => None,
    };

    let mut reference = Vec::new();
    if let Some(r) = doc.section("REFERENCE") {
        for (line, row) in &r.rows {
            arity(*line, row, 3, 3, "reference row (kind id value)")?;
            let value = num(*line, &row[2], "reference value")?;
            match row[0].to_lowercase().as_str() {
                "flow" => reference.push(ReferenceEntry::Flow(row[1].clone(), value)),
                "pressure" => reference.push(ReferenceEntry::Pressure(row[1].clone(), value)),
                other => {
                    return Err(err(
                        *line,
                        format!("reference kind must be flow or pressure, got `{other}`"),
                    ))
                }
            }
        }
    }

    Ok(Scenario {
        network,
        economics,
        wind,
        foundation,
        bounds,
        design_starts,
        baseline,
        loops,
        reference,
        warnings,
    })
}

/// Resolves explicit loop walks (pipe ids) against a built network and the
/// design baseline against its tanks.
pub fn resolve_loops(
    network: &wdn_core::Network,
    loops: &[Vec<(String, i8)>],
) -> Result<Vec<Vec<(usize, i8)>>, String> {
    loops
        .iter()
        .map(|walk| {
            walk.iter()
                .map(|(id, s)| {
                    network
                        .pipe_index(id)
                        .map(|j| (j, *s))
                        .ok_or_else(|| format!("loop references unknown pipe `{id}`"))
                })
                .collect()
        })
        .collect()
}

/// Baseline rows (tank id, h_r, h_b) to a decision vector in tank order.
pub fn resolve_baseline(
    network: &wdn_core::Network,
    rows: &[(String, f64, f64)],
) -> Result<DesignVariables, String> {
    let tanks = network.tank_nodes();
    let mut vars = DesignVariables::from_network(network);
    for (id, h_r, h_b) in rows {
        let node = network
            .node_index(id)
            .ok_or_else(|| format!("baseline references unknown tank `{id}`"))?;
        let k = tanks
            .iter()
            .position(|&t| t == node)
            .ok_or_else(|| format!("baseline node `{id}` is not a tank"))?;
        vars.tanks[k] = TankDesign {
            water_depth: *h_r,
            height_above_ground: *h_b,
        };
    }
    Ok(vars)
}

/// Design options assembled from the scenario plus CLI flags.
pub fn design_options(
    scenario: &Scenario,
    network: &wdn_core::Network,
    seed: u64,
) -> Result<DesignOptions, String> {
    let mut opts = DesignOptions {
        seed,
        ..DesignOptions::default()
    };
    if let Some(starts) = scenario.design_starts {
        opts.starts_per_tank = starts;
    }
    if let Some(rows) = &scenario.baseline {
        opts.baseline = Some(resolve_baseline(network, rows)?);
    }
    Ok(opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINI: &str = "\
# demo
[OPTIONS]
headloss HW
[JUNCTIONS]
j1 5.0 1.0
[TANKS]
t1 10.0 -1.0 4.0 0.0
[PIPES]
p1 t1 j1 100 50 130
";

    #[test]
    fn parses_sections_and_extracts() {
        let doc = parse_input(MINI).unwrap();
        assert_eq!(doc.sections.len(), 4);
        let sc = extract_scenario(&doc).unwrap();
        assert_eq!(sc.network.nodes.len(), 2);
        assert_eq!(sc.network.pipes.len(), 1);
        assert_eq!(sc.network.pipes[0].diameter_mm, 50.0);
    }

    #[test]
    fn rejects_unknown_section_and_stray_content() {
        let bad = "[OPTIONS]\nheadloss HW\n[NOPE]\nx\n";
        let e = parse_input(bad).unwrap_err();
        assert!(e.message.contains("unknown section"));
        assert_eq!(e.line, 3);

        let stray = "headloss HW\n";
        assert!(parse_input(stray).is_err());
    }

    #[test]
    fn rejects_empty_pipes() {
        let no_pipes = "[OPTIONS]\nheadloss HW\n[JUNCTIONS]\nj 0 0\n[PIPES]\n";
        let e = parse_input(no_pipes).unwrap_err();
        assert!(e.message.contains("no pipes"));
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let bad = "[OPTIONS]\nheadloss HW\n[JUNCTIONS]\nj1 five 0\n[PIPES]\np j1 j1 1 1 1\n";
        let e = parse_input(bad).and_then(|d| extract_scenario(&d)).unwrap_err();
        assert_eq!(e.line, 4);
        assert!(e.message.contains("not a number"));
    }

    #[test]
    fn unused_parameters_warn() {
        let text = "[OPTIONS]\nheadloss HW\nalpha 0.1\nd_tr 2\n[JUNCTIONS]\nj 0 0\n[PIPES]\np j j2 1 1 1\n[TANKS]\nj2 0 0 1 0\n";
        let doc = parse_input(text).unwrap();
        let sc = extract_scenario(&doc).unwrap();
        assert_eq!(sc.warnings.len(), 2);
    }

    #[test]
    fn render_round_trips() {
        let doc = parse_input(MINI).unwrap();
        let again = parse_input(&doc.render()).unwrap();
        assert!(doc.same_structure(&again));
    }
}
