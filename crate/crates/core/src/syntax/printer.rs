use std::fmt::Write;

use crate::ast::{Atom, Formula, Term};

const IFF: u8 = 1;
const IMP: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;

/// Renders a formula in the concrete syntax accepted by [`super::parse`].
pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f, 0);
    out
}

/// Renders a term as a Boolean-ring polynomial, e.g. `1 + x + x.y`.
pub fn print_term(t: &Term) -> String {
    if t.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, m) in t.monomials().enumerate() {
        if i > 0 {
            out.push_str(" + ");
        }
        if m.is_empty() {
            out.push('1');
        }
        for (j, v) in m.iter().enumerate() {
            if j > 0 {
                out.push('.');
            }
            out.push_str(v.as_str());
        }
    }
    out
}

/// Predicate arguments are delimited, so products of literals can use the
/// lattice form (`x & ~y`), which reads better than its expansion.
fn print_arg(t: &Term) -> String {
    match t.as_cube() {
        Some((pos, neg)) if !neg.is_empty() => {
            let lits: Vec<String> = pos
                .iter()
                .map(|v| v.to_string())
                .chain(neg.iter().map(|v| format!("~{v}")))
                .collect();
            lits.join(" & ")
        }
        _ => print_term(t),
    }
}

fn write_atom(out: &mut String, a: &Atom) {
    match a {
        Atom::IsZero(t) => {
            let _ = write!(out, "{} = 0", print_term(t));
        }
        Atom::AtLeast(k, t) => {
            let _ = write!(out, "C[{k}]({})", print_arg(t));
        }
        Atom::Fin(t) => {
            let _ = write!(out, "Fin({})", print_arg(t));
        }
        Atom::Res {
            modulus,
            residue,
            term,
        } => {
            let _ = write!(out, "Res[{modulus},{residue}]({})", print_arg(term));
        }
    }
}

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => IFF,
        Formula::Implies(..) => IMP,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        // Quantifiers extend to the right as far as possible.
        Formula::Exists(..) | Formula::Forall(..) => 0,
        _ => 5,
    }
}

/// Writes `f` in a context that needs precedence at least `min`.
fn write_formula(out: &mut String, f: &Formula, min: u8) {
    let p = prec(f);
    let paren = p < min || (p == 0 && min > 0);
    if paren {
        out.push('(');
    }
    match f {
        Formula::Const(true) => out.push_str("true"),
        Formula::Const(false) => out.push_str("false"),
        Formula::Atom(a) => write_atom(out, a),
        Formula::Not(g) => match &**g {
            Formula::Atom(Atom::IsZero(t)) => {
                let _ = write!(out, "{} != 0", print_term(t));
            }
            _ => {
                out.push('~');
                write_formula(out, g, 5);
            }
        },
        Formula::And(a, b) => binary(out, a, b, " & ", AND, AND + 1),
        Formula::Or(a, b) => binary(out, a, b, " | ", OR, OR + 1),
        Formula::Implies(a, b) => binary(out, a, b, " -> ", IMP + 1, IMP),
        Formula::Iff(a, b) => binary(out, a, b, " <-> ", IFF, IFF + 1),
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            out.push(if matches!(f, Formula::Exists(..)) { 'E' } else { 'A' });
            let _ = write!(out, " {v} ");
            let body_is_binary = matches!(prec(g), IFF..=AND);
            if body_is_binary {
                out.push('(');
                write_formula(out, g, 0);
                out.push(')');
            } else {
                write_formula(out, g, 0);
            }
        }
    }
    if paren {
        out.push(')');
    }
}

fn binary(out: &mut String, a: &Formula, b: &Formula, op: &str, left_min: u8, right_min: u8) {
    write_formula(out, a, left_min.max(1));
    out.push_str(op);
    write_formula(out, b, right_min.max(1));
}
