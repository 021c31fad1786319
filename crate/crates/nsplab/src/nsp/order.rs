//! Bounded checks of the orders on procedures and of left-well-foundedness.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::Serialize;

use super::machine::apply_budget;
use super::{CaseNode, Expr, ExplorationBudget, Ground, Procedure};

/// A three-valued verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl Tri {
    fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::Unknown, _) | (_, Tri::Unknown) => Tri::Unknown,
            _ => Tri::True,
        }
    }
}

/// Indices examined at a case node: the window `0..b` plus any explicit or
/// already forced indices.
fn indices(node: &CaseNode, b: usize) -> Vec<BigUint> {
    let mut v: Vec<BigUint> = (0..b as u64).map(BigUint::from).collect();
    v.extend(node.branches.known_indices());
    v.sort();
    v.dedup();
    v
}

/// `p ⊑ q` on the region within `budget`. `False` is only returned for a
/// node of `p` that is neither `⊥` nor equal to the matching node of `q`.
pub fn syntactic_leq(p: &Procedure, q: &Procedure, budget: &ExplorationBudget) -> Tri {
    if p.ty() != q.ty() {
        return Tri::False;
    }
    let mut ren = HashMap::new();
    proc_leq(p, q, &mut ren, budget, 0)
}

fn proc_leq(p: &Procedure, q: &Procedure, ren: &mut HashMap<u64, u64>, budget: &ExplorationBudget, depth: usize) -> Tri {
    for (x, y) in p.params().iter().zip(q.params()) {
        ren.insert(x.id, y.id);
    }
    expr_leq(p.body(), q.body(), ren, budget, depth)
}

fn expr_leq(e: &Expr, f: &Expr, ren: &mut HashMap<u64, u64>, budget: &ExplorationBudget, depth: usize) -> Tri {
    match (e, f) {
        (Expr::Bot, _) => Tri::True,
        (Expr::Unresolved, _) | (_, Expr::Unresolved) => Tri::Unknown,
        (Expr::Num(a), Expr::Num(b)) => {
            if a == b {
                Tri::True
            } else {
                Tri::False
            }
        }
        (Expr::Case(a), Expr::Case(b)) => {
            let head = ren.get(&a.head.id).copied().unwrap_or(a.head.id);
            if head != b.head.id || a.args.len() != b.args.len() {
                return Tri::False;
            }
            if depth >= budget.depth {
                return Tri::True;
            }
            let mut verdict = Tri::True;
            for (x, y) in a.args.iter().zip(&b.args) {
                verdict = verdict.and(proc_leq(x, y, ren, budget, depth + 1));
                if verdict == Tri::False {
                    return verdict;
                }
            }
            for i in indices(a, budget.branches) {
                verdict = verdict.and(expr_leq(&a.branch(&i), &b.branch(&i), ren, budget, depth + 1));
                if verdict == Tri::False {
                    return verdict;
                }
            }
            verdict
        }
        _ => Tri::False,
    }
}

/// `p ⪯ q` tested on a finite grid of argument vectors: wherever `p`
/// yields a number, `q` must yield the same one.
pub fn extensional_leq_on_grid(p: &Procedure, q: &Procedure, grid: &[Vec<Procedure>], steps: u64) -> Tri {
    let mut verdict = Tri::True;
    for args in grid {
        let (Ok(a), Ok(b)) = (apply_budget(p, args, steps), apply_budget(q, args, steps)) else {
            return Tri::False;
        };
        let step = match (a.ground(), b.ground()) {
            (Ground::Bottom, _) => Tri::True,
            (Ground::Value(x), Ground::Value(y)) if x == y => Tri::True,
            (Ground::Value(_), Ground::Value(_) | Ground::Bottom) => Tri::False,
            _ => Tri::Unknown,
        };
        verdict = verdict.and(step);
        if verdict == Tri::False {
            break;
        }
    }
    verdict
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LwfVerdict {
    /// No chain of nested applications longer than the bound was found.
    CertifiedUpTo(usize),
    /// A chain of this length was found.
    ChainFound(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct LwfReport {
    pub verdict: LwfVerdict,
    /// Longest chain of nested applications seen.
    pub max_nesting: usize,
    pub nodes: usize,
    /// Set when the procedure is LWF because of where it came from.
    pub by_construction: Option<String>,
}

const NODE_CAP: usize = 200_000;

/// Explores the application tree of `p`. Nesting is counted over
/// applications with at least one argument; a nullary application `x()`
/// has nothing inside it and is always a leaf of the application tree.
pub fn lwf_probe(p: &Procedure, bound: usize, budget: &ExplorationBudget) -> LwfReport {
    enum Item {
        Body(Procedure),
        Branch(Arc<CaseNode>, BigUint),
    }
    let depth_cap = budget.depth.max(4 * bound + 4);
    let mut stack: Vec<(Item, usize, usize)> = vec![(Item::Body(p.clone()), 0, 0)];
    let mut max_nesting = 0;
    let mut nodes = 0;
    let by_construction = p.lwf_certificate().map(str::to_string);
    while let Some((item, nesting, depth)) = stack.pop() {
        nodes += 1;
        if nodes > NODE_CAP {
            break;
        }
        let e = match item {
            Item::Body(q) => q.body().clone(),
            Item::Branch(node, i) => node.branch(&i),
        };
        let Expr::Case(node) = e else { continue };
        let level = if node.args.is_empty() { nesting } else { nesting + 1 };
        max_nesting = max_nesting.max(level);
        if level > bound {
            return LwfReport { verdict: LwfVerdict::ChainFound(level), max_nesting, nodes, by_construction };
        }
        if depth >= depth_cap {
            continue;
        }
        for i in indices(&node, budget.branches).into_iter().rev() {
            stack.push((Item::Branch(node.clone(), i), nesting, depth + 1));
        }
        for q in node.args.iter().rev() {
            stack.push((Item::Body(q.clone()), level, depth + 1));
        }
    }
    LwfReport { verdict: LwfVerdict::CertifiedUpTo(bound), max_nesting, nodes, by_construction }
}
