//! Case-tree notation and JSON export for explored regions.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use super::{CaseNode, Expr, NVar, Procedure};

#[derive(Default)]
struct Names {
    map: HashMap<u64, String>,
    next: usize,
}

impl Names {
    fn bind(&mut self, x: &NVar) -> String {
        let name = format!("x{}", self.next);
        self.next += 1;
        self.map.insert(x.id, name.clone());
        name
    }

    fn get(&self, x: &NVar) -> String {
        self.map.get(&x.id).cloned().unwrap_or_else(|| match &x.hint {
            Some(h) => h.to_string(),
            None => format!("v{}", x.id),
        })
    }
}

fn shown_indices(node: &CaseNode, branches: usize) -> Vec<BigUint> {
    let mut v: Vec<BigUint> = (0..branches as u64).map(BigUint::from).collect();
    v.extend(node.branches.known_indices());
    v.sort();
    v.dedup();
    v
}

/// Prints `p` down to `depth` nested nodes, showing branch indices
/// `0..branches` plus any explicit or already forced ones.
pub fn pretty(p: &Procedure, depth: usize, branches: usize) -> String {
    let mut names = Names::default();
    let mut out = String::new();
    proc_str(p, depth, branches, &mut names, &mut out);
    out
}

pub fn pretty_expr(e: &Expr, depth: usize, branches: usize) -> String {
    let mut out = String::new();
    expr_str(e, depth, branches, &mut Names::default(), &mut out);
    out
}

fn proc_str(p: &Procedure, depth: usize, branches: usize, names: &mut Names, out: &mut String) {
    out.push('λ');
    let ps: Vec<String> = p.params().iter().map(|x| names.bind(x)).collect();
    out.push_str(&ps.join(" "));
    out.push_str(". ");
    expr_str(p.body(), depth, branches, names, out);
}

fn expr_str(e: &Expr, depth: usize, branches: usize, names: &mut Names, out: &mut String) {
    match e {
        Expr::Bot => out.push('⊥'),
        Expr::Unresolved => out.push('?'),
        Expr::Num(n) => out.push_str(&n.to_string()),
        Expr::Case(node) => {
            if depth == 0 {
                out.push('…');
                return;
            }
            let mut app = String::new();
            app.push_str(&names.get(&node.head));
            app.push('(');
            for (k, q) in node.args.iter().enumerate() {
                if k > 0 {
                    app.push_str(", ");
                }
                proc_str(q, depth - 1, branches, names, &mut app);
            }
            app.push(')');
            if node.bare {
                out.push_str(&app);
                return;
            }
            out.push_str("case ");
            out.push_str(&app);
            out.push_str(" of (");
            for (k, i) in shown_indices(node, branches).iter().enumerate() {
                if k > 0 {
                    out.push_str(" | ");
                }
                out.push_str(&format!("{i} ⇒ "));
                expr_str(&node.branch(i), depth - 1, branches, names, out);
            }
            out.push_str(" | …)");
        }
    }
}

fn num_json(n: &BigUint) -> Value {
    match n.to_u64() {
        Some(k) => json!(k),
        None => json!(n.to_string()),
    }
}

/// `{kind: "procedure", params, body}` with expression nodes
/// `{kind, value?, scrutinee?, branches, default: "elided"}`.
pub fn to_json(p: &Procedure, depth: usize, branches: usize) -> Value {
    proc_json(p, depth, branches, &mut Names::default())
}

pub fn expr_to_json(e: &Expr, depth: usize, branches: usize) -> Value {
    node_json(e, depth, branches, &mut Names::default())
}

fn proc_json(p: &Procedure, depth: usize, branches: usize, names: &mut Names) -> Value {
    let ps: Vec<String> = p.params().iter().map(|x| names.bind(x)).collect();
    json!({"kind": "procedure", "params": ps, "body": node_json(p.body(), depth, branches, names)})
}

fn node_json(e: &Expr, depth: usize, branches: usize, names: &mut Names) -> Value {
    match e {
        Expr::Bot => json!({"kind": "bottom"}),
        Expr::Unresolved => json!({"kind": "unresolved"}),
        Expr::Num(n) => json!({"kind": "value", "value": num_json(n)}),
        Expr::Case(_) if depth == 0 => json!({"kind": "elided"}),
        Expr::Case(node) => {
            let args: Vec<Value> = node.args.iter().map(|q| proc_json(q, depth - 1, branches, names)).collect();
            let mut br = Map::new();
            for i in shown_indices(node, branches) {
                br.insert(i.to_string(), node_json(&node.branch(&i), depth - 1, branches, names));
            }
            json!({
                "kind": "case",
                "scrutinee": {"head": names.get(&node.head), "args": args},
                "branches": br,
                "default": "elided",
            })
        }
    }
}
