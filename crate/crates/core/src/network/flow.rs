//! Edge variables and flow-model rows.

use crate::assembly::{EdgeVars, WindowBuilder};
use crate::lp::{LinExpr, VarId};
use crate::model::{FlowModel, Terminal};
use crate::network::pipeline::{
    darcy_coefficients, darcy_flow, weymouth_coefficients, weymouth_linear_terms,
};

pub fn emit_edges(b: &mut WindowBuilder) {
    assert!(b.edges.is_empty(), "edges already emitted");
    for e in 0..b.model.edges.len() {
        let vars = allocate_edge(b, e);
        b.edges.push(vars);
        emit_loss_split(b, e);
        emit_flow_model(b, e);
    }
}

fn allocate_edge(b: &mut WindowBuilder, e: usize) -> EdgeVars {
    let edge = &b.model.edges[e];
    let id = &edge.id;
    let bound = edge
        .q_max
        .unwrap_or_else(|| b.model.carrier_sanity_bound(edge.carrier));
    let lo = if edge.bidirectional { -bound } else { 0.0 };

    let q: Vec<VarId> = (0..b.steps)
        .map(|k| b.problem.add_continuous(format!("e_{id}_q_t{k}"), lo, bound))
        .collect();

    let (mut q_plus, mut q_minus, mut loss_plus, mut loss_minus) = (None, None, None, None);
    if edge.has_losses() {
        let make = |b: &mut WindowBuilder, tag: &str| -> Vec<VarId> {
            (0..b.steps)
                .map(|k| b.problem.add_continuous(format!("e_{id}_{tag}_t{k}"), 0.0, bound))
                .collect()
        };
        q_plus = Some(make(b, "qp"));
        loss_plus = Some(make(b, "lossp"));
        if edge.bidirectional {
            q_minus = Some(make(b, "qm"));
            loss_minus = Some(make(b, "lossm"));
        }
    }

    EdgeVars {
        q,
        q_plus,
        q_minus,
        loss_plus,
        loss_minus,
    }
}

/// Direction split and piecewise-linear losses via convex combinations of
/// the table's breakpoints, one set per direction.
fn emit_loss_split(b: &mut WindowBuilder, e: usize) {
    let edge = &b.model.edges[e];
    let Some(table) = edge.loss_table.clone() else {
        return;
    };
    let id = edge.id.clone();
    let bidirectional = edge.bidirectional;

    for t in 0..b.steps {
        let q = b.edges[e].q[t];
        let q_plus = b.edges[e].q_plus.as_ref().unwrap()[t];
        let mut split = LinExpr::var(q).term(q_plus, -1.0);
        if bidirectional {
            split.add(b.edges[e].q_minus.as_ref().unwrap()[t], 1.0);
        }
        b.problem.equal(format!("e_{id}_split_t{t}"), split, 0.0);

        let sides: Vec<(char, VarId, VarId)> = if bidirectional {
            vec![
                ('p', q_plus, b.edges[e].loss_plus.as_ref().unwrap()[t]),
                (
                    'm',
                    b.edges[e].q_minus.as_ref().unwrap()[t],
                    b.edges[e].loss_minus.as_ref().unwrap()[t],
                ),
            ]
        } else {
            vec![('p', q_plus, b.edges[e].loss_plus.as_ref().unwrap()[t])]
        };
        for (tag, q_dir, loss) in sides {
            let lambdas: Vec<VarId> = (0..table.len())
                .map(|i| {
                    b.problem
                        .add_continuous(format!("e_{id}_l{tag}{i}_t{t}"), 0.0, 1.0)
                })
                .collect();
            let mut sum = LinExpr::new();
            let mut flow = LinExpr::var(q_dir);
            let mut value = LinExpr::var(loss);
            for (i, (x, y)) in table.iter().enumerate() {
                sum.add(lambdas[i], 1.0);
                flow.add(lambdas[i], -x);
                value.add(lambdas[i], -y);
            }
            b.problem.equal(format!("e_{id}_lsum{tag}_t{t}"), sum, 1.0);
            b.problem.equal(format!("e_{id}_lflow{tag}_t{t}"), flow, 0.0);
            b.problem.equal(format!("e_{id}_lval{tag}_t{t}"), value, 0.0);
        }
    }
}

fn emit_flow_model(b: &mut WindowBuilder, e: usize) {
    let model = b.model;
    let edge = &model.edges[e];
    let id = &edge.id;
    let from = model.node_index(&edge.from).unwrap();
    let to = model.node_index(&edge.to).unwrap();

    match &edge.flow_model {
        FlowModel::Transport => {}
        FlowModel::DcPower { reactance } => {
            let susceptance = b.config.s_base_mva / reactance;
            for t in 0..b.steps {
                let q = b.edges[e].q[t];
                let theta_from = b.angle(from, t);
                let theta_to = b.angle(to, t);
                b.problem.equal(
                    format!("e_{id}_dc_t{t}"),
                    LinExpr::var(q)
                        .term(theta_from, susceptance)
                        .term(theta_to, -susceptance),
                    0.0,
                );
            }
        }
        FlowModel::Weymouth {
            diameter_mm,
            length_km,
            base_temperature_k,
            base_pressure_mpa,
        } => {
            let gas = model.carriers.gas.as_ref().unwrap();
            let elevation = model.nodes[to].elevation - model.nodes[from].elevation;
            let pipe = weymouth_coefficients(
                gas,
                *diameter_mm,
                *length_km,
                *base_temperature_k,
                *base_pressure_mpa,
                elevation,
            );
            let p1_nom = model.nodes[from]
                .pressure_spec(edge.carrier, Terminal::Out)
                .unwrap()
                .nominal;
            let p2_nom = model.nodes[to]
                .pressure_spec(edge.carrier, Terminal::In)
                .unwrap()
                .nominal;
            let (a1, a2) = weymouth_linear_terms(&pipe, p1_nom, p2_nom);
            for t in 0..b.steps {
                let q = b.edges[e].q[t];
                let p1 = b.pressure(from, edge.carrier, Terminal::Out, t);
                let p2 = b.pressure(to, edge.carrier, Terminal::In, t);
                b.problem.equal(
                    format!("e_{id}_wey_t{t}"),
                    LinExpr::var(q).term(p1, -a1).term(p2, a2),
                    0.0,
                );
            }
        }
        FlowModel::Darcy {
            diameter_mm,
            length_km,
        } => {
            let liquid = model.carriers.liquid(edge.carrier).unwrap();
            let elevation = model.nodes[to].elevation - model.nodes[from].elevation;
            let pipe = darcy_coefficients(liquid, *diameter_mm, *length_km, elevation);
            let p1_nom = model.nodes[from]
                .pressure_spec(edge.carrier, Terminal::Out)
                .unwrap()
                .nominal;
            let p2_nom = model.nodes[to]
                .pressure_spec(edge.carrier, Terminal::In)
                .unwrap()
                .nominal;
            let x = (p1_nom - p2_nom - pipe.head).sqrt();
            let q_nom = darcy_flow(&pipe, p1_nom, p2_nom);
            let slope = 2.0 * x / pipe.k;
            for t in 0..b.steps {
                let q = b.edges[e].q[t];
                let p1 = b.pressure(from, edge.carrier, Terminal::Out, t);
                let p2 = b.pressure(to, edge.carrier, Terminal::In, t);
                // p1 - p2 = nominal drop + slope * (q - q_nom)
                b.problem.equal(
                    format!("e_{id}_darcy_t{t}"),
                    LinExpr::var(p1).term(p2, -1.0).term(q, -slope),
                    (p1_nom - p2_nom) - slope * q_nom,
                );
            }
        }
    }
}
