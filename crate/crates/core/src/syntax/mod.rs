//! Concrete syntax.
//!
//! ```text
//! formula := "E" var formula | "A" var formula | iff
//! iff     := imp { "<->" imp }
//! imp     := or [ "->" imp ]
//! or      := and { "|" and }
//! and     := unary { "&" unary }
//! unary   := "~" unary | "E" var formula | "A" var formula | relation
//! relation:= sum [ ("=" | "!=" | "<" | "<=") sum ]
//! sum     := product { ("+" | "-") product }
//! product := primary { "." primary }
//! primary := "0" | "1" | var | "true" | "false"
//!          | "C[" nat "](" term ")" | "Fin(" term ")" | "Res[" nat "," int "](" term ")"
//!          | "(" formula ")"
//! ```
//!
//! A quantifier body extends as far right as possible, so a quantified
//! formula needs parentheses unless it is the last operand.
//! `&`, `|` and `~` act on terms (meet, join, complement) or on formulas
//! (and, or, not) depending on their operands. They bind more loosely than
//! the relations, so a lattice term next to `=` needs parentheses:
//! `(x & y) = 0`. Inside predicate arguments no parentheses are needed.
//! `s - t` is `s.(1 + t)`, `s <= t` is `s.t = s`, `s < t` is `s <= t & s != t`.
//! Comments run from `#` to the end of the line; a file holds one or more
//! formulas separated by `;`.

mod lexer;
mod parser;
mod printer;

use std::fmt;

use thiserror::Error;

use crate::ast::{Formula, Level};

pub use parser::{parse, parse_file, parse_term};
pub use printer::{print, print_term};

/// A located diagnostic. Every variant carries a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: error[E_SYNTAX]: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: error[E_TYPE]: {message}")]
    Type {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: error[E_NUMBER]: number `{text}` is out of range")]
    Number {
        line: usize,
        col: usize,
        text: String,
    },
    #[error("{line}:{col}: error[E_C_INDEX_ZERO]: the index of C[k] must be at least 1")]
    CountIndexZero { line: usize, col: usize },
    #[error("{line}:{col}: error[E_RES_MODULUS_ZERO]: the modulus of Res[n,r] must be at least 1")]
    ResModulusZero { line: usize, col: usize },
}

impl ParseError {
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "E_SYNTAX",
            ParseError::Type { .. } => "E_TYPE",
            ParseError::Number { .. } => "E_NUMBER",
            ParseError::CountIndexZero { .. } => "E_C_INDEX_ZERO",
            ParseError::ResModulusZero { .. } => "E_RES_MODULUS_ZERO",
        }
    }

    pub fn location(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, col, .. }
            | ParseError::Type { line, col, .. }
            | ParseError::Number { line, col, .. }
            | ParseError::CountIndexZero { line, col }
            | ParseError::ResModulusZero { line, col } => (*line, *col),
        }
    }
}

/// A formula read from a file, with where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFormula {
    pub text: String,
    pub formula: Formula,
    pub level: Level,
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{Atom, Term, Var};

    fn x() -> Term {
        Term::var("x")
    }

    #[test]
    fn fin_of_one() {
        assert_eq!(parse("Fin(1)").unwrap(), Formula::Atom(Atom::Fin(Term::one())));
    }

    #[test]
    fn residues_are_reduced() {
        assert_eq!(
            parse("Res[2,5](x)").unwrap(),
            Formula::Atom(Atom::res(2, 1, x()).unwrap())
        );
        assert_eq!(
            parse("Res[3,-1](x)").unwrap(),
            Formula::Atom(Atom::res(3, 2, x()).unwrap())
        );
    }

    #[test]
    fn main_axiom_sugar() {
        let f = parse("A x (~Fin(x) -> E y (y < x & ~Fin(y) & ~Fin(x - y)))").unwrap();
        let (xv, yv) = (Term::var("x"), Term::var("y"));
        let lt = Formula::and(Formula::le(&yv, &xv), Formula::ne(&yv, &xv));
        let body = Formula::and(
            Formula::and(lt, Formula::not(Atom::Fin(yv.clone()).into())),
            Formula::not(Atom::Fin(&xv + &(&xv * &yv)).into()),
        );
        let expected = Formula::forall(
            "x",
            Formula::implies(
                Formula::not(Atom::Fin(xv.clone()).into()),
                Formula::exists("y", body),
            ),
        );
        assert_eq!(f, expected);
        assert_eq!(f.level(), Level::L2);
    }

    #[test]
    fn printing() {
        let r = Formula::Atom(Atom::res(3, 2, x()).unwrap());
        assert_eq!(print(&r), "Res[3,2](x)");
        let c = parse("C[2](x & y)").unwrap();
        assert_eq!(parse(&print(&c)).unwrap(), c);
        let q = parse("E x (C[1](x . y) & C[1]((1+x) . y))").unwrap();
        assert_eq!(print(&q), "E x (C[1](x.y) & C[1](y & ~x))");
        assert_eq!(parse(&print(&q)).unwrap(), q);
    }

    #[test]
    fn quantifier_operands_are_parenthesized() {
        let f = Formula::and(
            Formula::exists("y", Atom::Fin(Term::var("y")).into()),
            Atom::Fin(x()).into(),
        );
        let s = print(&f);
        assert_eq!(s, "(E y Fin(y)) & Fin(x)");
        assert_eq!(parse(&s).unwrap(), f);
    }

    #[test]
    fn lattice_terms_next_to_relations_need_parentheses() {
        let e = parse("x & y = 0").unwrap_err();
        assert_eq!(e.code(), "E_TYPE");
        let f = parse("(x & y) = 0").unwrap();
        assert_eq!(f, Formula::Atom(Atom::IsZero(&x() * &Term::var("y"))));
    }

    #[test]
    fn parameter_errors_are_named() {
        let e = parse("Res[0,1](x)").unwrap_err();
        assert_eq!(e.code(), "E_RES_MODULUS_ZERO");
        assert_eq!(e.location(), (1, 5));
        let e = parse("C[0](x)").unwrap_err();
        assert_eq!(e.code(), "E_C_INDEX_ZERO");
    }

    #[test]
    fn syntax_errors_are_located() {
        let e = parse("Fin(x) &\n  & Fin(y)").unwrap_err();
        assert_eq!(e.code(), "E_SYNTAX");
        assert_eq!(e.location(), (2, 3));
        assert!(parse("E x").is_err());
        assert!(parse("C[2](x").is_err());
        assert!(parse("x $ y").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn files_with_comments() {
        let src = "# axioms\nFin(0); # trivially\n~Fin(1);\n\nA x (Res[2,0](x) -> Fin(x))";
        let fs = parse_file(src).unwrap();
        assert_eq!(fs.len(), 3);
        assert_eq!(fs[1].text, "~Fin(1)");
        assert_eq!(fs[2].line, 4 - 0 + 1);
        assert_eq!(fs[2].level, Level::L3);
    }

    #[test]
    fn rectified_on_parse() {
        let f = parse("(E x Fin(x)) & C[1](x)").unwrap();
        let Formula::And(a, _) = &f else { panic!() };
        let Formula::Exists(v, _) = &**a else { panic!() };
        assert_ne!(v, &Var::new("x"));
    }
}
