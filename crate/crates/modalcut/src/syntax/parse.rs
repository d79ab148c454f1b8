use thiserror::Error;

use super::expr::{Binder, Calculus, Class, Expr, ExprError};
use super::name::{Mode, Name, Namespace};
use super::ty::TypeExpr;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("parse error at {line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Upper(String),
    Sigiled(Namespace, String),
    Backslash,
    Dot,
    Lt,
    Gt,
    Bar,
    Turnstile,
    ConsOp,
    LParen,
    RParen,
    HoleTok,
    Eq,
    Colon,
    Comma,
    Arrow,
    Tilde,
    KwMu,
    KwMt,
    KwRet,
    KwLet,
    KwSub,
    KwBind,
    KwIn,
    KwM,
    KwBot,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Upper(s) => format!("identifier {s:?}"),
            Tok::Sigiled(ns, s) => format!("{} {}{s}", ns.describe(), ns.sigil()),
            Tok::Backslash => "'\\'".into(),
            Tok::Dot => "'.'".into(),
            Tok::Lt => "'<'".into(),
            Tok::Gt => "'>'".into(),
            Tok::Bar => "'|'".into(),
            Tok::Turnstile => "'|-'".into(),
            Tok::ConsOp => "'::'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::HoleTok => "'[]'".into(),
            Tok::Eq => "'='".into(),
            Tok::Colon => "':'".into(),
            Tok::Comma => "','".into(),
            Tok::Arrow => "'->'".into(),
            Tok::Tilde => "'~'".into(),
            Tok::KwMu => "'mu'".into(),
            Tok::KwMt => "'mt'".into(),
            Tok::KwRet => "'ret'".into(),
            Tok::KwLet => "'let'".into(),
            Tok::KwSub => "'sub'".into(),
            Tok::KwBind => "'bind'".into(),
            Tok::KwIn => "'in'".into(),
            Tok::KwM => "'M'".into(),
            Tok::KwBot => "'Bot'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(input: &str) -> Result<Vec<Token>, ParseError> {
    let mut toks = Vec::new();
    let mut chars = input.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if let Some(c) = c {
                if c == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
            }
            c
        }};
    }

    loop {
        let (tline, tcol) = (line, col);
        let c = match chars.peek().copied() {
            None => break,
            Some(c) => c,
        };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        let err = |msg: String| ParseError { line: tline, col: tcol, msg };
        let tok = match c {
            '-' => {
                bump!();
                match chars.peek() {
                    Some('-') => {
                        while let Some(&c) = chars.peek() {
                            if c == '\n' {
                                break;
                            }
                            bump!();
                        }
                        continue;
                    }
                    Some('>') => {
                        bump!();
                        Tok::Arrow
                    }
                    _ => return Err(err("stray '-' (expected '->' or a '--' comment)".into())),
                }
            }
            '\\' => {
                bump!();
                Tok::Backslash
            }
            '.' => {
                bump!();
                Tok::Dot
            }
            '<' => {
                bump!();
                Tok::Lt
            }
            '>' => {
                bump!();
                Tok::Gt
            }
            '|' => {
                bump!();
                if chars.peek() == Some(&'-') {
                    bump!();
                    Tok::Turnstile
                } else {
                    Tok::Bar
                }
            }
            ':' => {
                bump!();
                if chars.peek() == Some(&':') {
                    bump!();
                    Tok::ConsOp
                } else {
                    Tok::Colon
                }
            }
            '(' => {
                bump!();
                Tok::LParen
            }
            ')' => {
                bump!();
                Tok::RParen
            }
            '[' => {
                bump!();
                if chars.peek() == Some(&']') {
                    bump!();
                    Tok::HoleTok
                } else {
                    return Err(err("stray '[' (the hole is written '[]')".into()));
                }
            }
            ']' => return Err(err("stray ']'".into())),
            '=' => {
                bump!();
                Tok::Eq
            }
            ',' => {
                bump!();
                Tok::Comma
            }
            '~' => {
                bump!();
                Tok::Tilde
            }
            '%' | '#' | '@' => {
                let ns = match c {
                    '%' => Namespace::Value,
                    '#' => Namespace::Comp,
                    _ => Namespace::Co,
                };
                bump!();
                let mut ident = String::new();
                match chars.peek() {
                    Some(&c) if is_ident_start(c) => {}
                    _ => {
                        return Err(err(format!(
                            "the sigil '{}' must be followed by a name",
                            ns.sigil()
                        )))
                    }
                }
                while let Some(&c) = chars.peek() {
                    if is_ident_char(c) {
                        ident.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                Tok::Sigiled(ns, ident)
            }
            c if is_ident_start(c) => {
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if is_ident_char(c) {
                        ident.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                match ident.as_str() {
                    "mu" => Tok::KwMu,
                    "mt" => Tok::KwMt,
                    "ret" => Tok::KwRet,
                    "let" => Tok::KwLet,
                    "sub" => Tok::KwSub,
                    "bind" => Tok::KwBind,
                    "in" => Tok::KwIn,
                    "M" => Tok::KwM,
                    "Bot" => Tok::KwBot,
                    _ => {
                        if ident.chars().next().unwrap().is_ascii_uppercase() {
                            Tok::Upper(ident)
                        } else {
                            Tok::Ident(ident)
                        }
                    }
                }
            }
            c => return Err(err(format!("unexpected character {c:?}"))),
        };
        toks.push(Token { tok, line: tline, col: tcol });
    }
    toks.push(Token { tok: Tok::Eof, line, col });
    Ok(toks)
}

/// A parsed sequent: `Γ |- subject [: A] [| Δ]`. Γ declares (co-)variables
/// with their sigils, Δ declares co-variables; the stated type is absent
/// for command subjects.
#[derive(Debug, Clone, PartialEq)]
pub struct SequentSyntax {
    pub gamma: Vec<(Name, TypeExpr)>,
    pub subject: Expr,
    pub stated: Option<TypeExpr>,
    pub delta: Vec<(Name, TypeExpr)>,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    calculus: Calculus,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError { line, col, msg: msg.into() })
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            self.fail(format!("expected {}, found {}", want.describe(), self.peek().describe()))
        }
    }

    /// Attach the position of the construct being built to a grammar
    /// violation from `Expr::new`.
    fn build(&self, at: (usize, usize), r: Result<Expr, ExprError>) -> Result<Expr, ParseError> {
        r.map_err(|e| ParseError { line: at.0, col: at.1, msg: e.to_string() })
    }

    // ---- types ----

    fn ty(&mut self) -> Result<TypeExpr, ParseError> {
        let lhs = self.ty_operand()?;
        if *self.peek() == Tok::Arrow {
            self.next();
            let mode = match self.peek() {
                Tok::Ident(s) if s == "v" => {
                    self.next();
                    Some(Mode::V)
                }
                Tok::Ident(s) if s == "n" => {
                    self.next();
                    Some(Mode::N)
                }
                _ => None,
            };
            let rhs = self.ty()?;
            Ok(TypeExpr::Imp(mode, Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn ty_operand(&mut self) -> Result<TypeExpr, ParseError> {
        match self.peek().clone() {
            Tok::KwM => {
                self.next();
                Ok(TypeExpr::monad(self.ty_atom()?))
            }
            Tok::Tilde => {
                self.next();
                Ok(TypeExpr::neg(self.ty_atom()?))
            }
            _ => self.ty_atom(),
        }
    }

    fn ty_atom(&mut self) -> Result<TypeExpr, ParseError> {
        match self.peek().clone() {
            Tok::Upper(s) => {
                self.next();
                Ok(TypeExpr::Var(s))
            }
            Tok::KwBot => {
                self.next();
                Ok(TypeExpr::Bot)
            }
            Tok::LParen => {
                self.next();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            t => self.fail(format!("expected a type, found {}", t.describe())),
        }
    }

    // ---- binders ----

    fn var_name(&mut self, what: &str, co: bool) -> Result<Name, ParseError> {
        match self.peek().clone() {
            Tok::Sigiled(ns, s) => {
                if co != (ns == Namespace::Co) {
                    return self.fail(format!(
                        "{what} cannot be a {}",
                        ns.describe()
                    ));
                }
                self.next();
                Ok(Name::parse_ident(ns, &s))
            }
            Tok::Ident(s) => {
                if co {
                    return self.fail(format!("{what} must be a co-variable (@name)"));
                }
                self.next();
                Ok(Name::parse_ident(Namespace::Plain, &s))
            }
            t => self.fail(format!("expected {what}, found {}", t.describe())),
        }
    }

    fn binder(&mut self, what: &str, co: bool) -> Result<Binder, ParseError> {
        let name = self.var_name(what, co)?;
        let ann = if *self.peek() == Tok::Colon {
            self.next();
            Some(self.ty()?)
        } else {
            None
        };
        Ok(Binder { name, ann })
    }

    // ---- expressions ----

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let piece = match self.peek() {
            Tok::Lt => self.command()?,
            Tok::KwLet | Tok::KwSub | Tok::KwBind => self.let_form()?,
            Tok::KwMt => self.mt_form()?,
            Tok::Sigiled(Namespace::Co, _) => match self.calculus {
                Calculus::Lmmt | Calculus::LmmtVn => {
                    let at = self.here();
                    let name = self.var_name("a co-variable", true)?;
                    self.build(at, Expr::covar(self.calculus, name))?
                }
                _ => self.coapp_form()?,
            },
            _ => self.term_full()?,
        };
        self.maybe_cons(piece)
    }

    fn maybe_cons(&mut self, head: Expr) -> Result<Expr, ParseError> {
        if *self.peek() != Tok::ConsOp {
            return Ok(head);
        }
        let at = self.here();
        self.next();
        let mode = if self.calculus == Calculus::LmmtVn {
            match self.peek().clone() {
                Tok::Ident(s) if s == "v" => {
                    self.next();
                    Some(Mode::V)
                }
                Tok::Ident(s) if s == "n" => {
                    self.next();
                    Some(Mode::N)
                }
                _ => return self.fail("stacks in lmmt-vn are written '::v' or '::n'"),
            }
        } else {
            None
        };
        let tail = self.coterm()?;
        self.build(at, Expr::cons(self.calculus, mode, head, tail))
    }

    fn coterm(&mut self) -> Result<Expr, ParseError> {
        let at = self.here();
        let e = self.expr()?;
        if e.class() == Class::CoTerm {
            Ok(e)
        } else {
            Err(ParseError {
                line: at.0,
                col: at.1,
                msg: format!("expected a co-term here, found a {}", e.class()),
            })
        }
    }

    fn command(&mut self) -> Result<Expr, ParseError> {
        let at = self.here();
        self.expect(Tok::Lt)?;
        let t = self.expr()?;
        self.expect(Tok::Bar)?;
        let e = self.expr()?;
        self.expect(Tok::Gt)?;
        self.build(at, Expr::command(self.calculus, t, e))
    }

    fn coapp_form(&mut self) -> Result<Expr, ParseError> {
        let at = self.here();
        let name = self.var_name("a co-variable", true)?;
        let arg = self.term_full()?;
        self.build(at, Expr::coapp(self.calculus, name, arg))
    }

    fn let_form(&mut self) -> Result<Expr, ParseError> {
        let at = self.here();
        let kw = self.next();
        let what = match kw {
            Tok::KwLet => "the binder of a let",
            Tok::KwSub => "the binder of a sub",
            Tok::KwBind => "the binder of a bind",
            _ => unreachable!(),
        };
        let binder = self.binder(what, false)?;
        self.expect(Tok::Eq)?;
        let bound = if *self.peek() == Tok::HoleTok {
            self.next();
            Expr::hole(self.calculus)
        } else {
            self.term_full()?
        };
        self.expect(Tok::KwIn)?;
        let body = match (self.calculus, &kw) {
            (Calculus::Ivc, _) => self.term_full()?,
            _ => self.expr()?,
        };
        let node = match kw {
            Tok::KwLet => Expr::let_(self.calculus, bound, binder, body),
            Tok::KwSub => Expr::sub(self.calculus, bound, binder, body),
            Tok::KwBind => Expr::bind(self.calculus, bound, binder, body),
            _ => unreachable!(),
        };
        self.build(at, node)
    }

    fn mt_form(&mut self) -> Result<Expr, ParseError> {
        let at = self.here();
        self.expect(Tok::KwMt)?;
        let binder = self.binder("the binder of mt", false)?;
        self.expect(Tok::Dot)?;
        let body = self.expr()?;
        self.build(at, Expr::mu_tilde(self.calculus, binder, body))
    }

    fn term_full(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Backslash => {
                let at = self.here();
                self.next();
                let binder = self.binder("a lambda binder", false)?;
                self.expect(Tok::Dot)?;
                let body = self.term_full()?;
                self.build(at, Expr::lam(self.calculus, binder, body))
            }
            Tok::KwMu => {
                let at = self.here();
                self.next();
                let binder = self.binder("the binder of mu", true)?;
                self.expect(Tok::Dot)?;
                let body = self.expr()?;
                self.build(at, Expr::mu(self.calculus, binder, body))
            }
            Tok::KwRet => {
                let at = self.here();
                self.next();
                let arg = self.term_full()?;
                self.build(at, Expr::ret(self.calculus, arg))
            }
            Tok::KwLet | Tok::KwSub if self.calculus == Calculus::Ivc => self.let_form(),
            _ => self.app_chain(),
        }
    }

    fn app_chain(&mut self) -> Result<Expr, ParseError> {
        let at = self.here();
        let mut head = self.atom()?;
        loop {
            let more = matches!(
                self.peek(),
                Tok::Ident(_)
                    | Tok::Sigiled(Namespace::Value, _)
                    | Tok::Sigiled(Namespace::Comp, _)
                    | Tok::LParen
                    | Tok::HoleTok
            );
            if !more {
                return Ok(head);
            }
            let arg = self.atom()?;
            head = self.build(at, Expr::app(self.calculus, head, arg))?;
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.here();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                self.build(at, Expr::var(self.calculus, Name::parse_ident(Namespace::Plain, &s)))
            }
            Tok::Sigiled(ns @ (Namespace::Value | Namespace::Comp), s) => {
                self.next();
                self.build(at, Expr::var(self.calculus, Name::parse_ident(ns, &s)))
            }
            Tok::Sigiled(Namespace::Co, _) => {
                self.fail("a co-variable cannot appear in term position")
            }
            Tok::HoleTok => {
                self.next();
                if matches!(self.calculus, Calculus::LmM | Calculus::Vc) {
                    Ok(Expr::hole(self.calculus))
                } else {
                    self.build(at, Err(ExprError::HolePlacement("an expression of this calculus")))
                }
            }
            Tok::LParen => {
                self.next();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            t => self.fail(format!("expected an expression, found {}", t.describe())),
        }
    }

    // ---- sequents ----

    fn decls(&mut self, co_side: bool) -> Result<Vec<(Name, TypeExpr)>, ParseError> {
        let mut out = Vec::new();
        loop {
            // Names right of '|' are co-variables by position, so the '@'
            // sigil may be dropped there.
            let name = if co_side {
                match self.peek().clone() {
                    Tok::Ident(s) => {
                        self.next();
                        Name::parse_ident(Namespace::Co, &s)
                    }
                    _ => self.var_name("a co-variable declaration", true)?,
                }
            } else {
                self.var_name("a variable declaration", false)?
            };
            self.expect(Tok::Colon)?;
            let ty = self.ty()?;
            out.push((name, ty));
            if *self.peek() == Tok::Comma {
                self.next();
            } else {
                return Ok(out);
            }
        }
    }

    fn sequent(&mut self) -> Result<SequentSyntax, ParseError> {
        let gamma = if *self.peek() == Tok::Turnstile {
            Vec::new()
        } else {
            self.decls(false)?
        };
        self.expect(Tok::Turnstile)?;
        let subject = self.expr()?;
        let stated = if *self.peek() == Tok::Colon {
            self.next();
            Some(self.ty()?)
        } else {
            None
        };
        let delta = if *self.peek() == Tok::Bar {
            self.next();
            self.decls(true)?
        } else {
            Vec::new()
        };
        Ok(SequentSyntax { gamma, subject, stated, delta })
    }
}

fn finish<T>(p: &mut Parser, value: T) -> Result<T, ParseError> {
    if *p.peek() == Tok::Eof {
        Ok(value)
    } else {
        p.fail(format!("unexpected {} after the expression", p.peek().describe()))
    }
}

/// Parse an expression of the given calculus. The syntactic class is
/// inferred from the shape; grammar violations carry source positions.
pub fn parse_expr(calculus: Calculus, input: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(input)?, pos: 0, calculus };
    let e = p.expr()?;
    finish(&mut p, e)
}

/// Parse a type.
pub fn parse_type(input: &str) -> Result<TypeExpr, ParseError> {
    let mut p = Parser { toks: lex(input)?, pos: 0, calculus: Calculus::Lmmt };
    let t = p.ty()?;
    finish(&mut p, t)
}

/// Parse a sequent `Γ |- subject [: A] [| Δ]`.
pub fn parse_sequent(calculus: Calculus, input: &str) -> Result<SequentSyntax, ParseError> {
    let mut p = Parser { toks: lex(input)?, pos: 0, calculus };
    let s = p.sequent()?;
    finish(&mut p, s)
}
