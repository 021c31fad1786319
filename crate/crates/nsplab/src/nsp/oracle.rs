//! Running procedures against host-level arguments.
//!
//! A procedure of type 2 applied to a host function is evaluated by walking
//! its tree: each `case f(a) of …` evaluates `a` to a number `z`, asks the
//! host for `f(z)` and follows the branch.

use std::collections::HashMap;

use num_bigint::BigUint;

use super::{Expr, Procedure};
use crate::error::{Error, Result};

/// A host-level value for a variable of type `nat` or `nat → nat`.
pub enum HostVal<'a> {
    Num(BigUint),
    Fun(&'a dyn Fn(&BigUint) -> Result<BigUint>),
}

/// Evaluates `e` with its free variables bound to host values.
pub fn eval_with(e: &Expr, env: &HashMap<u64, HostVal<'_>>) -> Result<BigUint> {
    let mut cur = e.clone();
    loop {
        match cur {
            Expr::Num(n) => return Ok(n),
            Expr::Bot => return Err(Error::Undefined("the computation reaches ⊥".into())),
            Expr::Unresolved => return Err(Error::Undefined("the computation exceeds its step budget".into())),
            Expr::Case(node) => {
                let answer = match env.get(&node.head.id) {
                    Some(HostVal::Num(n)) if node.args.is_empty() => n.clone(),
                    Some(HostVal::Fun(f)) if node.args.len() == 1 && node.args[0].arity() == 0 => {
                        let z = eval_with(node.args[0].body(), env)?;
                        f(&z)?
                    }
                    _ => {
                        return Err(Error::Undefined(format!(
                            "no host value for {:?} applied to {} arguments",
                            node.head,
                            node.args.len()
                        )))
                    }
                };
                cur = node.branch(&answer);
            }
        }
    }
}

/// `p · z` for a closed `p : nat → nat`.
pub fn call_type1(p: &Procedure, z: &BigUint) -> Result<BigUint> {
    check_arity(p, 1)?;
    let mut env = HashMap::new();
    env.insert(p.params()[0].id, HostVal::Num(z.clone()));
    eval_with(p.body(), &env)
}

/// `p · f` for a closed `p : (nat → nat) → nat` and a host function `f`.
pub fn call_type2(p: &Procedure, f: &dyn Fn(&BigUint) -> Result<BigUint>) -> Result<BigUint> {
    check_arity(p, 1)?;
    let mut env = HashMap::new();
    env.insert(p.params()[0].id, HostVal::Fun(f));
    eval_with(p.body(), &env)
}

fn check_arity(p: &Procedure, k: usize) -> Result<()> {
    if p.arity() == k {
        Ok(())
    } else {
        Err(Error::Type { msg: format!("expected {k} parameters, found type {}", p.ty()), subterm: "procedure".into() })
    }
}
