//! `build`, `derive`, `classify` and `export`.

use std::collections::BTreeMap;
use std::sync::Arc;

use matsuo_core::deriv::{self, DerBasis};
use matsuo_core::fischer::LineClass;
use matsuo_core::{Field, FieldElement, FischerSpace, MatsuoAlgebra, TranspoGroup};
use serde_json::{json, Value};

use crate::report::{RunReport, Table};
use crate::{CliError, Common, SystemChoice};

pub fn parse_field(desc: &str) -> Result<Field, CliError> {
    Ok(Field::parse(desc).map_err(matsuo_core::Error::from)?)
}

pub fn parse_group(desc: &str) -> Result<TranspoGroup, CliError> {
    Ok(TranspoGroup::parse(desc).map_err(matsuo_core::Error::from)?)
}

fn parse_eta(field: &Field, s: &str) -> Result<FieldElement, CliError> {
    Ok(field.parse_element(s).map_err(matsuo_core::Error::from)?)
}

fn matsuo(group: TranspoGroup, field: &Field, eta: &FieldElement) -> Result<MatsuoAlgebra, CliError> {
    Ok(MatsuoAlgebra::of_group(group, eta, field).map_err(matsuo_core::Error::from)?)
}

fn vertical_count(fs: &FischerSpace) -> Option<usize> {
    let mut count = 0;
    for l in fs.lines() {
        match fs.line_orbit_class(l) {
            Ok(LineClass::Vertical) => count += 1,
            Ok(LineClass::Horizontal) => {}
            Err(_) => return None,
        }
    }
    Some(count)
}

pub fn build(group: &str, common: &Common) -> Result<RunReport, CliError> {
    let field = parse_field(&common.field)?;
    let g = parse_group(group)?;
    let eta = parse_eta(&field, &common.eta)?;
    let m = matsuo(g, &field, &eta)?;
    let fs = m.space();
    let census: BTreeMap<String, usize> = fs
        .plane_census()
        .into_iter()
        .map(|(t, n)| (t.to_string(), n))
        .collect();
    let components = fs.components().len();
    let vertical = vertical_count(fs);

    let mut r = RunReport::new("build", common.seed);
    r.group = Some(m.group().label().to_string());
    r.field = Some(field.to_string());
    r.line("points", fs.num_points());
    r.line("lines", fs.lines().len());
    r.line("components", components);
    if let Some(v) = vertical {
        r.line("vertical_lines", v);
    }
    r.line("algebra_dim", m.dim());
    r.line("eta", &eta);
    r.line("connected_algebra", m.is_connected_algebra());
    r.table = Table {
        header: vec!["plane_type", "count"],
        rows: census.iter().map(|(k, v)| vec![k.clone(), v.to_string()]).collect(),
    };
    r.results = json!({
        "points": fs.num_points(),
        "lines": fs.lines().len(),
        "components": components,
        "vertical_lines": vertical,
        "plane_census": census,
        "algebra": {
            "dim": m.dim(),
            "eta": eta.to_string(),
            "idempotent_basis": m.algebra().basis_idempotent(),
            "connected": m.is_connected_algebra(),
        },
    });
    Ok(r)
}

fn basis_json(m: &MatsuoAlgebra, basis: &DerBasis) -> (Value, Vec<Vec<String>>) {
    let mut rows = Vec::new();
    let maps: Vec<Value> = basis
        .maps()
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let entries: Vec<Value> = d
                .nonzero_entries()
                .into_iter()
                .map(|(a, b, v)| {
                    rows.push(vec![
                        k.to_string(),
                        m.group().name(a).to_string(),
                        m.group().name(b).to_string(),
                        v.to_string(),
                    ]);
                    json!([m.group().name(a), m.group().name(b), v.to_string()])
                })
                .collect();
            Value::Array(entries)
        })
        .collect();
    (Value::Array(maps), rows)
}

pub fn derive(group: &str, system: SystemChoice, common: &Common) -> Result<RunReport, CliError> {
    let field = parse_field(&common.field)?;
    let g = parse_group(group)?;
    let eta = parse_eta(&field, &common.eta)?;
    let m = matsuo(g, &field, &eta)?;
    let r_basis = || deriv::derivations_r(&m).map_err(matsuo_core::Error::from);
    let (basis, leibniz_dim, r_dim, agree) = match system {
        SystemChoice::Leibniz => {
            let b = deriv::derivations(m.algebra());
            let d = b.dim();
            (b, Some(d), None, None)
        }
        SystemChoice::R => {
            let b = r_basis()?;
            let d = b.dim();
            (b, None, Some(d), None)
        }
        SystemChoice::Both => {
            let l = deriv::derivations(m.algebra());
            let rb = r_basis()?;
            let agree = l.dim() == rb.dim() && l.same_span(&rb);
            let (ld, rd) = (l.dim(), rb.dim());
            (l, Some(ld), Some(rd), Some(agree))
        }
    };

    let fs = m.space();
    let table = fs.near_solid_table();
    let vanishing = deriv::vanishing_report(&m, &basis, &table);
    let nonzero: Vec<String> = vanishing
        .nonzero_lines()
        .iter()
        .map(|&l| fs.line_name(&fs.lines()[l]))
        .collect();
    let consistent = vanishing.consistent_with_near_solid();
    let forced = vanishing.entries.iter().filter(|e| e.forced_zero).count();
    let (basis_value, rows) = basis_json(&m, &basis);

    let mut r = RunReport::new("derive", common.seed);
    r.group = Some(m.group().label().to_string());
    r.field = Some(field.to_string());
    r.passed = agree.unwrap_or(true) && consistent;
    r.line("dim", basis.dim());
    if let Some(d) = leibniz_dim {
        r.line("leibniz_dim", d);
    }
    if let Some(d) = r_dim {
        r.line("r_system_dim", d);
    }
    if let Some(a) = agree {
        r.line("systems_agree", a);
    }
    r.line("lines_with_nonzero_coefficients", nonzero.len());
    r.line("nonzero_only_on_near_solid_lines", consistent);
    let vertical_sums = deriv::vertical_sums_vanish(&m, &basis);
    let simple_rank = deriv::simple_root_evaluation_rank(&m, &basis);
    if let Some(v) = vertical_sums {
        r.line("vertical_sums_vanish", v);
    }
    if let Some(k) = simple_rank {
        r.line("simple_root_evaluation_rank", k);
    }
    r.table = Table {
        header: vec!["map", "argument", "image", "coefficient"],
        rows,
    };
    r.results = json!({
        "group": m.group().label().to_string(),
        "field": field.to_string(),
        "eta": eta.to_string(),
        "system": system.as_str(),
        "dim": basis.dim(),
        "dims": { "leibniz": leibniz_dim, "r": r_dim },
        "systems_agree": agree,
        "basis": basis_value,
        "vanishing_report": {
            "collinear_pairs": vanishing.entries.len(),
            "forced_zero_pairs": forced,
            "nonzero_lines": nonzero,
            "consistent_with_near_solid": consistent,
            "vertical_sums_vanish": vertical_sums,
            "simple_root_evaluation_rank": simple_rank,
        },
    });
    Ok(r)
}

pub fn classify(group: &str, common: &Common) -> Result<RunReport, CliError> {
    let g = parse_group(group)?;
    let fs = FischerSpace::from_arc(Arc::new(g));
    let verdicts = fs.near_solid_table();
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut near_solid = Vec::new();
    for (l, v) in fs.lines().iter().zip(&verdicts) {
        let class = fs.line_orbit_class(l).ok().map(|c| match c {
            LineClass::Vertical => "vertical",
            LineClass::Horizontal => "horizontal",
        });
        let witness = v.witness.as_ref().map(|(pts, t)| {
            let names: Vec<&str> = pts.iter().map(|&p| fs.group().name(p)).collect();
            json!({ "type": t.to_string(), "points": names })
        });
        if v.near_solid {
            near_solid.push(*l);
        }
        rows.push(vec![
            fs.line_name(l),
            class.unwrap_or("-").to_string(),
            v.near_solid.to_string(),
            v.vacuous.to_string(),
            v.witness.as_ref().map(|(_, t)| t.to_string()).unwrap_or_default(),
        ]);
        lines.push(json!({
            "line": fs.line_name(l),
            "orbit_class": class,
            "near_solid": v.near_solid,
            "vacuous": v.vacuous,
            "witness": witness,
        }));
    }
    let spread = !near_solid.is_empty() && fs.is_spread(&near_solid);
    let vacuous = verdicts.iter().filter(|v| v.vacuous).count();

    let mut r = RunReport::new("classify-lines", common.seed);
    r.group = Some(fs.group().label().to_string());
    r.line("lines", fs.lines().len());
    r.line("near_solid", near_solid.len());
    r.line("vacuously_near_solid", vacuous);
    r.line("near_solid_lines_form_spread", spread);
    r.table = Table {
        header: vec!["line", "orbit_class", "near_solid", "vacuous", "witness"],
        rows,
    };
    r.results = json!({
        "lines": lines,
        "near_solid_count": near_solid.len(),
        "vacuous_count": vacuous,
        "spread": spread,
    });
    Ok(r)
}

pub fn export(group: &str, common: &Common) -> Result<RunReport, CliError> {
    let field = parse_field(&common.field)?;
    let g = parse_group(group)?;
    let eta = parse_eta(&field, &common.eta)?;
    let m = matsuo(g, &field, &eta)?;
    let mut rows = Vec::new();
    for i in 0..m.dim() {
        for j in i..m.dim() {
            for (k, c) in m.algebra().product(i, j) {
                rows.push(vec![
                    m.algebra().name(i).to_string(),
                    m.algebra().name(j).to_string(),
                    m.algebra().name(*k as usize).to_string(),
                    c.to_string(),
                ]);
            }
        }
    }
    let mut r = RunReport::new("export", common.seed);
    r.group = Some(m.group().label().to_string());
    r.field = Some(field.to_string());
    r.line("dim", m.dim());
    r.line("nonzero_structure_constants", rows.len());
    r.table = Table {
        header: vec!["left", "right", "term", "coefficient"],
        rows,
    };
    r.results = m.to_json();
    Ok(r)
}
