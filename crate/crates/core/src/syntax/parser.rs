use crate::ast::{Atom, AtomError, Formula, Term, Var};

use super::lexer::{tokenize, Pos, Spanned, Tok};
use super::{ParseError, SourceFormula};

/// Intermediate result: the grammar shares `&`, `|`, `~` between terms and
/// formulas, so each operand is resolved once both sides are known.
enum Node {
    Term(Term),
    Formula(Formula),
}

struct Parser {
    toks: Vec<Spanned>,
    at: usize,
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    if p.peek() == &Tok::Semi {
        p.bump();
    }
    p.expect_eof()?;
    Ok(f.rectify())
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    let pos = p.pos();
    let node = p.iff()?;
    p.expect_eof()?;
    p.want_term(node, pos)
}

/// Parses `;`-separated formulas. Empty segments are skipped.
pub fn parse_file(text: &str) -> Result<Vec<SourceFormula>, ParseError> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    loop {
        while p.peek() == &Tok::Semi {
            p.bump();
        }
        if p.peek() == &Tok::Eof {
            break;
        }
        let start = p.pos();
        let start_tok = p.at;
        let formula = p.formula()?.rectify();
        let end_tok = p.at;
        match p.peek() {
            Tok::Semi | Tok::Eof => {}
            other => return Err(p.unexpected(other.clone(), "`;` or end of input")),
        }
        let text = source_slice(text, &p.toks[start_tok..end_tok]);
        out.push(SourceFormula {
            level: formula.level(),
            formula,
            text,
            line: start.line,
            col: start.col,
        });
    }
    Ok(out)
}

fn source_slice(text: &str, toks: &[Spanned]) -> String {
    let (Some(first), Some(_)) = (toks.first(), toks.last()) else {
        return String::new();
    };
    // Reconstructing from line/column keeps comments out of the slice.
    let lines: Vec<&str> = text.lines().collect();
    let last = toks.last().unwrap();
    let mut out = String::new();
    for line_no in first.pos.line..=last.pos.line {
        let line = lines.get(line_no - 1).copied().unwrap_or("");
        let line = line.split('#').next().unwrap_or("");
        let chars: Vec<char> = line.chars().collect();
        let from = if line_no == first.pos.line { first.pos.col - 1 } else { 0 };
        let to = if line_no == last.pos.line {
            (last.pos.col - 1 + tok_width(&last.tok)).min(chars.len())
        } else {
            chars.len()
        };
        if !out.is_empty() {
            out.push(' ');
        }
        out.extend(chars[from.min(to)..to].iter());
    }
    out.trim().to_string()
}

fn tok_width(t: &Tok) -> usize {
    match t {
        Tok::Ident(s) => s.chars().count(),
        Tok::Nat(n) => n.to_string().len(),
        Tok::Fin | Tok::Res => 3,
        Tok::True => 4,
        Tok::False => 5,
        Tok::Ne | Tok::Le | Tok::Arrow => 2,
        Tok::DArrow => 3,
        Tok::Eof => 0,
        _ => 1,
    }
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: tokenize(text)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, found: Tok, wanted: &str) -> ParseError {
        let pos = self.pos();
        ParseError::Syntax {
            line: pos.line,
            col: pos.col,
            message: format!("expected {wanted}, found {}", found.describe()),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(self.peek().clone(), &tok.describe()))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            other => Err(self.unexpected(other.clone(), "end of input")),
        }
    }

    fn want_formula(&self, node: Node, pos: Pos) -> Result<Formula, ParseError> {
        match node {
            Node::Formula(f) => Ok(f),
            Node::Term(_) => Err(ParseError::Type {
                line: pos.line,
                col: pos.col,
                message: "expected a formula, found a term".into(),
            }),
        }
    }

    fn want_term(&self, node: Node, pos: Pos) -> Result<Term, ParseError> {
        match node {
            Node::Term(t) => Ok(t),
            Node::Formula(_) => Err(ParseError::Type {
                line: pos.line,
                col: pos.col,
                message: "expected a term, found a formula (parenthesize lattice terms next to relations)"
                    .into(),
            }),
        }
    }

    /// formula := "E" var formula | "A" var formula | iff
    fn formula(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.peek() {
            Tok::Exists | Tok::Forall => {
                let exists = self.bump() == Tok::Exists;
                let v = self.variable()?;
                let body = self.formula()?;
                Ok(if exists {
                    Formula::exists(v, body)
                } else {
                    Formula::forall(v, body)
                })
            }
            _ => {
                let node = self.iff()?;
                self.want_formula(node, pos)
            }
        }
    }

    fn variable(&mut self) -> Result<Var, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(Var::new(&name))
            }
            other => Err(self.unexpected(other, "a variable name")),
        }
    }

    fn iff(&mut self) -> Result<Node, ParseError> {
        let pos = self.pos();
        let mut lhs = self.imp()?;
        while self.peek() == &Tok::DArrow {
            self.bump();
            let rpos = self.pos();
            let rhs = self.imp()?;
            let a = self.want_formula(lhs, pos)?;
            let b = self.want_formula(rhs, rpos)?;
            lhs = Node::Formula(Formula::iff(a, b));
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Node, ParseError> {
        let pos = self.pos();
        let lhs = self.or()?;
        if self.peek() == &Tok::Arrow {
            self.bump();
            let rpos = self.pos();
            let rhs = self.imp()?;
            let a = self.want_formula(lhs, pos)?;
            let b = self.want_formula(rhs, rpos)?;
            return Ok(Node::Formula(Formula::implies(a, b)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Node, ParseError> {
        let pos = self.pos();
        let mut lhs = self.and()?;
        while self.peek() == &Tok::Bar {
            self.bump();
            let rhs = self.and()?;
            lhs = self.combine(lhs, rhs, pos, Term::join, Formula::or, "|")?;
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Node, ParseError> {
        let pos = self.pos();
        let mut lhs = self.unary()?;
        while self.peek() == &Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = self.combine(lhs, rhs, pos, |a, b| a * b, Formula::and, "&")?;
        }
        Ok(lhs)
    }

    fn combine(
        &self,
        lhs: Node,
        rhs: Node,
        pos: Pos,
        on_terms: impl Fn(&Term, &Term) -> Term,
        on_formulas: impl Fn(Formula, Formula) -> Formula,
        op: &str,
    ) -> Result<Node, ParseError> {
        match (lhs, rhs) {
            (Node::Term(a), Node::Term(b)) => Ok(Node::Term(on_terms(&a, &b))),
            (Node::Formula(a), Node::Formula(b)) => Ok(Node::Formula(on_formulas(a, b))),
            _ => Err(ParseError::Type {
                line: pos.line,
                col: pos.col,
                message: format!(
                    "`{op}` joins a term and a formula; parenthesize the term, e.g. `(x {op} y) = 0`"
                ),
            }),
        }
    }

    /// A quantifier in operand position extends as far right as possible.
    fn unary(&mut self) -> Result<Node, ParseError> {
        if matches!(self.peek(), Tok::Exists | Tok::Forall) {
            return Ok(Node::Formula(self.formula()?));
        }
        if self.peek() == &Tok::Tilde {
            self.bump();
            return Ok(match self.unary()? {
                Node::Term(t) => Node::Term(t.complement()),
                Node::Formula(f) => Node::Formula(Formula::not(f)),
            });
        }
        self.relation()
    }

    fn relation(&mut self) -> Result<Node, ParseError> {
        let pos = self.pos();
        let lhs = self.sum()?;
        let op = self.peek().clone();
        if !matches!(op, Tok::Eq | Tok::Ne | Tok::Lt | Tok::Le) {
            return Ok(lhs);
        }
        self.bump();
        let rpos = self.pos();
        let rhs = self.sum()?;
        let s = self.want_term(lhs, pos)?;
        let t = self.want_term(rhs, rpos)?;
        Ok(Node::Formula(match op {
            Tok::Eq => Formula::eq(&s, &t),
            Tok::Ne => Formula::ne(&s, &t),
            Tok::Lt => Formula::lt(&s, &t),
            _ => Formula::le(&s, &t),
        }))
    }

    fn sum(&mut self) -> Result<Node, ParseError> {
        let pos = self.pos();
        let mut lhs = self.product()?;
        while matches!(self.peek(), Tok::Plus | Tok::Minus) {
            let minus = self.bump() == Tok::Minus;
            let rpos = self.pos();
            let rhs = self.product()?;
            let a = self.want_term(lhs, pos)?;
            let b = self.want_term(rhs, rpos)?;
            lhs = Node::Term(if minus { a.minus(&b) } else { &a + &b });
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Node, ParseError> {
        let pos = self.pos();
        let mut lhs = self.primary()?;
        while self.peek() == &Tok::Dot {
            self.bump();
            let rpos = self.pos();
            let rhs = self.primary()?;
            let a = self.want_term(lhs, pos)?;
            let b = self.want_term(rhs, rpos)?;
            lhs = Node::Term(&a * &b);
        }
        Ok(lhs)
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Nat(0) => {
                self.bump();
                Ok(Node::Term(Term::zero()))
            }
            Tok::Nat(1) => {
                self.bump();
                Ok(Node::Term(Term::one()))
            }
            Tok::Nat(n) => Err(ParseError::Syntax {
                line: pos.line,
                col: pos.col,
                message: format!("`{n}` is not a term; only the constants 0 and 1 exist"),
            }),
            Tok::Ident(name) => {
                self.bump();
                Ok(Node::Term(Term::var(Var::new(&name))))
            }
            Tok::True => {
                self.bump();
                Ok(Node::Formula(Formula::Const(true)))
            }
            Tok::False => {
                self.bump();
                Ok(Node::Formula(Formula::Const(false)))
            }
            Tok::Count => {
                self.bump();
                self.expect(Tok::LBracket)?;
                let kpos = self.pos();
                let k = self.nat()?;
                self.expect(Tok::RBracket)?;
                let t = self.argument()?;
                let k = u32::try_from(k).map_err(|_| number_error(kpos, k))?;
                let atom = Atom::at_least(k, t).map_err(|e| atom_error(e, kpos))?;
                Ok(Node::Formula(Formula::Atom(atom)))
            }
            Tok::Fin => {
                self.bump();
                let t = self.argument()?;
                Ok(Node::Formula(Formula::Atom(Atom::Fin(t))))
            }
            Tok::Res => {
                self.bump();
                self.expect(Tok::LBracket)?;
                let npos = self.pos();
                let n = self.nat()?;
                self.expect(Tok::Comma)?;
                let rpos = self.pos();
                let negative = if self.peek() == &Tok::Minus {
                    self.bump();
                    true
                } else {
                    false
                };
                let r = self.nat()?;
                self.expect(Tok::RBracket)?;
                let t = self.argument()?;
                let n = u32::try_from(n).map_err(|_| number_error(npos, n))?;
                let r = i64::try_from(r).map_err(|_| number_error(rpos, r))?;
                let r = if negative { -r } else { r };
                let atom = Atom::res(n, r, t).map_err(|e| atom_error(e, npos))?;
                Ok(Node::Formula(Formula::Atom(atom)))
            }
            Tok::LParen => {
                self.bump();
                let node = if matches!(self.peek(), Tok::Exists | Tok::Forall) {
                    Node::Formula(self.formula()?)
                } else {
                    self.iff()?
                };
                self.expect(Tok::RParen)?;
                Ok(node)
            }
            Tok::Exists | Tok::Forall => Err(ParseError::Syntax {
                line: pos.line,
                col: pos.col,
                message: "a quantified formula used as an operand must be parenthesized".into(),
            }),
            other => Err(self.unexpected(other, "a term or an atom")),
        }
    }

    /// `( term )` after a predicate symbol.
    fn argument(&mut self) -> Result<Term, ParseError> {
        self.expect(Tok::LParen)?;
        let pos = self.pos();
        let node = self.iff()?;
        self.expect(Tok::RParen)?;
        self.want_term(node, pos)
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        match self.peek().clone() {
            Tok::Nat(n) => {
                self.bump();
                Ok(n)
            }
            other => Err(self.unexpected(other, "a natural number")),
        }
    }
}

fn number_error(pos: Pos, n: u64) -> ParseError {
    ParseError::Number {
        line: pos.line,
        col: pos.col,
        text: n.to_string(),
    }
}

fn atom_error(e: AtomError, pos: Pos) -> ParseError {
    match e {
        AtomError::ZeroCountIndex => ParseError::CountIndexZero {
            line: pos.line,
            col: pos.col,
        },
        AtomError::ZeroModulus => ParseError::ResModulusZero {
            line: pos.line,
            col: pos.col,
        },
    }
}
