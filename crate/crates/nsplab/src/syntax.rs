//! S-expression concrete syntax.
//!
//! ```text
//! type ::= nat | (-> type type …) | (* type type)
//! term ::= x | n | (lam (x type) … term) | (app term term …) | (term term …)
//!        | (pair term term) | (fst term) | (snd term)
//!        | suc | pre | ifzero | (ifzero type) | (Y type) | (while type)
//!        | (rec type) | min | (byval (type …) type) | (rec-str type)
//!        | (while-str type) | plus | monus | times | neq | lt | add | len | basic
//! ```
//! `;` starts a comment running to the end of the line.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::term::{Const, LibFn, Term, TermKind, Var};
use crate::types::Type;

#[derive(Debug, Clone)]
enum Sexp {
    Atom(String, (usize, usize)),
    List(Vec<Sexp>, (usize, usize)),
}

impl Sexp {
    fn pos(&self) -> (usize, usize) {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

fn err_at(pos: (usize, usize), msg: impl Into<String>) -> Error {
    Error::Syntax { line: pos.0, col: pos.1, msg: msg.into() }
}

fn read_all(text: &str) -> Result<Vec<Sexp>> {
    let mut stack: Vec<(Vec<Sexp>, (usize, usize))> = vec![(Vec::new(), (1, 1))];
    let (mut line, mut col) = (1usize, 1usize);
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        let pos = (line, col);
        match ch {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                chars.next();
                col += 1;
                stack.push((Vec::new(), pos));
            }
            ')' => {
                chars.next();
                col += 1;
                if stack.len() == 1 {
                    return Err(err_at(pos, "unbalanced ')'"));
                }
                let (items, p) = stack.pop().expect("non-empty");
                stack.last_mut().expect("non-empty").0.push(Sexp::List(items, p));
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                    col += 1;
                }
                stack.last_mut().expect("non-empty").0.push(Sexp::Atom(s, pos));
            }
        }
    }
    if stack.len() != 1 {
        let (_, p) = stack.pop().expect("non-empty");
        return Err(err_at(p, "unclosed '('"));
    }
    Ok(stack.pop().expect("non-empty").0)
}

const KEYWORDS: &[&str] = &[
    "lam", "app", "pair", "fst", "snd", "suc", "pre", "ifzero", "Y", "while", "rec", "min", "byval",
    "rec-str", "while-str", "nat", "->", "*",
];

fn is_reserved(s: &str) -> bool {
    KEYWORDS.contains(&s) || LibFn::from_name(s).is_some()
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    match cs.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    cs.all(|c| c.is_alphanumeric() || c == '_' || c == '\'' || c == '-')
}

fn parse_type(s: &Sexp) -> Result<Type> {
    match s {
        Sexp::Atom(a, p) => {
            if a == "nat" {
                Ok(Type::Nat)
            } else {
                Err(err_at(*p, format!("expected a type, found '{a}'")))
            }
        }
        Sexp::List(items, p) => {
            let head = match items.first() {
                Some(Sexp::Atom(h, _)) => h.as_str(),
                _ => return Err(err_at(*p, "expected a type")),
            };
            let parts: Vec<Type> = items[1..].iter().map(parse_type).collect::<Result<_>>()?;
            match head {
                "->" if parts.len() >= 2 => {
                    let mut parts = parts;
                    let cod = parts.pop().expect("len >= 2");
                    Ok(Type::arrows(parts, cod))
                }
                "*" if parts.len() == 2 => {
                    let mut it = parts.into_iter();
                    let l = it.next().expect("two");
                    Ok(Type::product(l, it.next().expect("two")))
                }
                _ => Err(err_at(*p, format!("malformed type form '{head}'"))),
            }
        }
    }
}

fn looks_like_type(s: &Sexp) -> bool {
    match s {
        Sexp::Atom(a, _) => a == "nat",
        Sexp::List(items, _) => {
            matches!(items.first(), Some(Sexp::Atom(h, _)) if h == "->" || h == "*")
        }
    }
}

struct Parser {
    scope: Vec<Var>,
}

impl Parser {
    fn term(&mut self, s: &Sexp) -> Result<Term> {
        match s {
            Sexp::Atom(a, p) => self.atom(a, *p),
            Sexp::List(items, p) => self.list(items, *p),
        }
    }

    fn atom(&mut self, a: &str, p: (usize, usize)) -> Result<Term> {
        if a.chars().all(|c| c.is_ascii_digit()) {
            let n: BigUint = a.parse().map_err(|_| err_at(p, "bad numeral"))?;
            return Ok(Term::num(n));
        }
        let k = match a {
            "suc" => Some(Const::Suc),
            "pre" => Some(Const::Pre),
            "ifzero" => Some(Const::ifzero()),
            "min" => Some(Const::Min),
            _ => LibFn::from_name(a).map(Const::Lib),
        };
        if let Some(k) = k {
            return Ok(Term::constant(k));
        }
        if is_reserved(a) {
            return Err(err_at(p, format!("'{a}' cannot be used on its own")));
        }
        match self.scope.iter().rev().find(|v| &*v.name == a) {
            Some(v) => Ok(Term::var(v.clone())),
            None => Err(err_at(p, format!("unbound variable '{a}'"))),
        }
    }

    fn one_type(&self, items: &[Sexp], p: (usize, usize), what: &str) -> Result<Type> {
        if items.len() != 2 {
            return Err(err_at(p, format!("({what} σ) takes exactly one type")));
        }
        parse_type(&items[1])
    }

    fn list(&mut self, items: &[Sexp], p: (usize, usize)) -> Result<Term> {
        let head = match items.first() {
            None => return Err(err_at(p, "empty list")),
            Some(h) => h,
        };
        if let Sexp::Atom(h, _) = head {
            match h.as_str() {
                "lam" => return self.lam(items, p),
                "app" => {
                    if items.len() < 3 {
                        return Err(err_at(p, "(app M N …) needs at least two terms"));
                    }
                    return self.application(&items[1..]);
                }
                "pair" => {
                    if items.len() != 3 {
                        return Err(err_at(p, "(pair M N) takes two terms"));
                    }
                    let a = self.term(&items[1])?;
                    let b = self.term(&items[2])?;
                    return Ok(Term::pair(a, b));
                }
                "fst" | "snd" => {
                    if items.len() != 2 {
                        return Err(err_at(p, format!("({h} M) takes one term")));
                    }
                    let m = self.term(&items[1])?;
                    return if h == "fst" { Term::fst(m) } else { Term::snd(m) };
                }
                "Y" => return Ok(Term::constant(Const::Y(self.one_type(items, p, "Y")?))),
                "while" => return Ok(Term::constant(Const::While(self.one_type(items, p, "while")?))),
                "rec" => return Ok(Term::constant(Const::Rec(self.one_type(items, p, "rec")?))),
                "rec-str" => {
                    return Ok(Term::constant(Const::RecStr(self.one_type(items, p, "rec-str")?)))
                }
                "while-str" => {
                    return Ok(Term::constant(Const::WhileStr(self.one_type(items, p, "while-str")?)))
                }
                "byval" => {
                    if items.len() != 3 {
                        return Err(err_at(p, "(byval (σ…) τ) takes a type list and a type"));
                    }
                    let ss = match &items[1] {
                        Sexp::List(ts, _) => ts.iter().map(parse_type).collect::<Result<Vec<_>>>()?,
                        other => return Err(err_at(other.pos(), "expected a list of types")),
                    };
                    let t = parse_type(&items[2])?;
                    return Ok(Term::constant(Const::Byval(ss, t)));
                }
                "ifzero" if items.len() == 2 && looks_like_type(&items[1]) => {
                    return Ok(Term::constant(Const::Ifzero(parse_type(&items[1])?)));
                }
                _ => {}
            }
        }
        if items.len() < 2 {
            return Err(err_at(p, "application needs at least one argument"));
        }
        self.application(items)
    }

    fn application(&mut self, items: &[Sexp]) -> Result<Term> {
        let mut t = self.term(&items[0])?;
        for a in &items[1..] {
            let arg = self.term(a)?;
            t = Term::app(t, arg)?;
        }
        Ok(t)
    }

    fn binder(&self, s: &Sexp) -> Result<Var> {
        match s {
            Sexp::List(b, bp) if b.len() == 2 => match &b[0] {
                Sexp::Atom(name, np) => {
                    if !is_ident(name) || is_reserved(name) {
                        return Err(err_at(*np, format!("'{name}' is not a valid variable name")));
                    }
                    Ok(Var::new(name, parse_type(&b[1])?))
                }
                _ => Err(err_at(*bp, "binder must be (name type)")),
            },
            other => Err(err_at(other.pos(), "binder must be (name type)")),
        }
    }

    fn lam(&mut self, items: &[Sexp], p: (usize, usize)) -> Result<Term> {
        if items.len() < 3 {
            return Err(err_at(p, "(lam (x σ) … M) needs a binder and a body"));
        }
        let binders: Vec<Var> =
            items[1..items.len() - 1].iter().map(|b| self.binder(b)).collect::<Result<_>>()?;
        let depth = self.scope.len();
        self.scope.extend(binders.iter().cloned());
        let body = self.term(&items[items.len() - 1]);
        self.scope.truncate(depth);
        Ok(Term::lams(&binders, body?))
    }
}

/// Parses one closed term.
pub fn parse(text: &str) -> Result<Term> {
    let forms = read_all(text)?;
    match forms.len() {
        0 => Err(err_at((1, 1), "empty input")),
        1 => Parser { scope: Vec::new() }.term(&forms[0]),
        _ => Err(err_at(forms[1].pos(), "trailing input after the term")),
    }
}

/// Parses a term whose free variables are drawn from `scope`.
pub fn parse_open(text: &str, scope: &[Var]) -> Result<Term> {
    let forms = read_all(text)?;
    match forms.len() {
        1 => Parser { scope: scope.to_vec() }.term(&forms[0]),
        _ => Err(err_at((1, 1), "expected exactly one term")),
    }
}

/// Parses one type.
pub fn parse_type_str(text: &str) -> Result<Type> {
    let forms = read_all(text)?;
    match forms.as_slice() {
        [one] => parse_type(one),
        _ => Err(err_at((1, 1), "expected exactly one type")),
    }
}

pub fn print_const(k: &Const) -> String {
    match k {
        Const::Suc => "suc".into(),
        Const::Pre => "pre".into(),
        Const::Ifzero(Type::Nat) => "ifzero".into(),
        Const::Ifzero(s) => format!("(ifzero {s})"),
        Const::Y(s) => format!("(Y {s})"),
        Const::While(s) => format!("(while {s})"),
        Const::Rec(s) => format!("(rec {s})"),
        Const::Min => "min".into(),
        Const::Byval(ss, t) => {
            let ss: Vec<String> = ss.iter().map(|s| s.to_string()).collect();
            format!("(byval ({}) {t})", ss.join(" "))
        }
        Const::RecStr(s) => format!("(rec-str {s})"),
        Const::WhileStr(s) => format!("(while-str {s})"),
        Const::Lib(f) => f.name().into(),
    }
}

pub fn print(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, &mut out);
    out
}

fn write_term(t: &Term, out: &mut String) {
    match t.kind() {
        TermKind::Var(v) => out.push_str(&v.name),
        TermKind::Num(n) => out.push_str(&n.to_string()),
        TermKind::Const(k) => out.push_str(&print_const(k)),
        TermKind::Lam(x, b) => {
            out.push_str(&format!("(lam ({} {}) ", x.name, x.ty));
            write_term(b, out);
            out.push(')');
        }
        TermKind::App(..) => {
            let (h, args) = t.spine();
            out.push('(');
            write_term(h, out);
            for a in args {
                out.push(' ');
                write_term(a, out);
            }
            out.push(')');
        }
        TermKind::Pair(a, b) => {
            out.push_str("(pair ");
            write_term(a, out);
            out.push(' ');
            write_term(b, out);
            out.push(')');
        }
        TermKind::Fst(a) => {
            out.push_str("(fst ");
            write_term(a, out);
            out.push(')');
        }
        TermKind::Snd(a) => {
            out.push_str("(snd ");
            write_term(a, out);
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_suc() {
        let id = parse("(lam (x nat) x)").unwrap();
        assert_eq!(id.ty(), &Type::pure(1));
        let s = parse("(app suc 3)").unwrap();
        assert_eq!(s.ty(), &Type::Nat);
        assert_eq!(print(&s), "(suc 3)");
    }

    #[test]
    fn sugar_and_typed_constants() {
        let t = parse("((rec nat) 0 (lam (x nat) (n nat) (suc x)) 3)").unwrap();
        assert_eq!(t.ty(), &Type::Nat);
        let t = parse("(ifzero (-> nat nat))").unwrap();
        assert_eq!(t.ty().arity(), 4);
        let t = parse("(ifzero 0 1 2)").unwrap();
        assert_eq!(t.ty(), &Type::Nat);
        let t = parse("(byval ((-> nat nat)) nat)").unwrap();
        assert_eq!(t.ty().arity(), 3);
    }

    #[test]
    fn errors_carry_positions() {
        match parse("(lam (x nat)\n  (suc y))") {
            Err(Error::Syntax { line: 2, col: 8, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("(suc (lam (x nat) x))"), Err(Error::Type { .. })));
        assert!(matches!(parse("(suc 1"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn round_trip() {
        for src in [
            "(lam (f (-> nat nat)) (lam (n nat) (min f n)))",
            "((Y (-> nat nat)) (lam (r (-> nat nat)) (lam (x nat) (ifzero x 0 (r (pre x))))))",
            "(fst (pair 4 (lam (x (* nat nat)) (snd x))))",
            "((byval () nat) (lam (n nat) n) 3)",
            "(basic (add 0 5) 9 1)",
        ] {
            let t = parse(src).unwrap();
            let back = parse(&print(&t)).unwrap();
            assert!(t.alpha_eq(&back), "{src}");
        }
    }
}
