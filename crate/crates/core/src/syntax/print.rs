use super::parser::occurs_in_rel;
use super::{Binder, Context, Formula, Sequent, Term, Theory};
use std::fmt::Write;

fn is_plain(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

pub fn print_term(t: &Term) -> String {
    match t {
        Term::Var(v) => v.clone(),
        Term::Param(p) if is_plain(p) => format!("${p}"),
        Term::Param(p) => {
            let escaped = p.replace('\\', "\\\\").replace('"', "\\\"");
            format!("$\"{escaped}\"")
        }
        Term::App(f, args) => {
            let args: Vec<String> = args.iter().map(print_term).collect();
            format!("{f}({})", args.join(", "))
        }
    }
}

fn binders(bs: &[Binder], body: &[&Formula]) -> String {
    bs.iter()
        .map(|b| {
            if body.iter().any(|f| occurs_in_rel(&b.name, f)) {
                b.name.clone()
            } else {
                format!("{}:{}", b.name, b.sort)
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Prec {
    Implies,
    Or,
    And,
    Unary,
}

fn prec(f: &Formula) -> Prec {
    match f {
        Formula::Implies(..) => Prec::Implies,
        Formula::Or(fs) if fs.len() > 1 => Prec::Or,
        Formula::And(fs) if fs.len() > 1 => Prec::And,
        Formula::Or(fs) | Formula::And(fs) if fs.len() == 1 => prec(&fs[0]),
        _ => Prec::Unary,
    }
}

fn is_quantifier(f: &Formula) -> bool {
    match f {
        Formula::Exists(..) | Formula::Forall(..) => true,
        Formula::And(fs) | Formula::Or(fs) if fs.len() == 1 => is_quantifier(&fs[0]),
        _ => false,
    }
}

/// Operand printing: parenthesize quantifiers and anything binding looser
/// than (or, for flattening-sensitive n-ary nodes, as loose as) `min`.
fn operand(f: &Formula, min: Prec, out: &mut String) {
    let p = prec(f);
    let needs = is_quantifier(f) || p < min || (p == min && min != Prec::Unary);
    if needs {
        out.push('(');
        go(f, out);
        out.push(')');
    } else {
        go(f, out);
    }
}

fn go(f: &Formula, out: &mut String) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Rel(r, args) => {
            let args: Vec<String> = args.iter().map(print_term).collect();
            let _ = write!(out, "{r}({})", args.join(", "));
        }
        Formula::Eq(a, b) => {
            let _ = write!(out, "{} = {}", print_term(a), print_term(b));
        }
        Formula::And(fs) | Formula::Or(fs) if fs.is_empty() => {
            out.push_str(if matches!(f, Formula::And(_)) { "true" } else { "false" })
        }
        Formula::And(fs) | Formula::Or(fs) if fs.len() == 1 => go(&fs[0], out),
        Formula::And(fs) => {
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" & ");
                }
                operand(g, Prec::And, out);
            }
        }
        Formula::Or(fs) => {
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" | ");
                }
                operand(g, Prec::Or, out);
            }
        }
        Formula::Not(b) => {
            out.push('~');
            operand(b, Prec::Unary, out);
        }
        Formula::Implies(a, b) => {
            operand(a, Prec::Implies, out);
            out.push_str(" -> ");
            if prec(b) == Prec::Implies && !is_quantifier(b) {
                go(b, out);
            } else {
                operand(b, Prec::Implies, out);
            }
        }
        Formula::Exists(bs, b) | Formula::Forall(bs, b) => {
            if bs.is_empty() {
                go(b, out);
                return;
            }
            let kw = if matches!(f, Formula::Exists(..)) { "exists" } else { "forall" };
            let _ = write!(out, "{kw} {}. ", binders(bs, &[b]));
            go(b, out);
        }
    }
}

/// Canonical concrete syntax; parsing the output yields `f.normalize()`.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    go(f, &mut out);
    out
}

fn print_context(ctx: &Context, body: &[&Formula]) -> String {
    let bs: Vec<Binder> = ctx.vars.iter().map(|(v, s)| Binder::new(v, s)).collect();
    binders(&bs, body)
}

pub fn print_sequent(s: &Sequent) -> String {
    format!(
        "[{}] {} => {}",
        print_context(&s.context, &[&s.premise, &s.conclusion]),
        print_formula(&s.premise),
        print_formula(&s.conclusion)
    )
}

/// Prints a theory in the DSL, one declaration per line.
pub fn print_theory(t: &Theory) -> String {
    let sig = &t.signature;
    let mut out = String::new();
    for s in &sig.sorts {
        let _ = writeln!(out, "sort {s}");
    }
    for r in &sig.relations {
        let _ = writeln!(out, "rel {}({})", r.name, sig.arity_names(r).join(", "));
    }
    for f in &sig.functions {
        let args: Vec<&str> = f.args.iter().map(|&s| sig.sort_name(s)).collect();
        let _ = writeln!(out, "fun {}({}) : {}", f.name, args.join(", "), sig.sort_name(f.result));
    }
    for a in &t.axioms {
        let _ = writeln!(out, "axiom {} {}", a.name, print_sequent(&a.sequent));
    }
    for s in &t.schemes {
        let _ = writeln!(out, "scheme {} {} bound {}", s.name, s.generator, s.bound);
    }
    out
}
