use super::scheme::{Generator, Scheme};
use super::{check_formula, check_sequent, Binder, Context, Formula, Mode, Sequent, Signature, Term, Theory};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Param(String),
    Num(usize),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Colon,
    Eq,
    And,
    Or,
    Not,
    Arrow,
    Turnstile,
    Sep,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    // Newlines inside brackets are whitespace.
    let mut depth = 0usize;
    let err = |line, col, message: String| Error::Syntax { line, column: col, message };
    while i < chars.len() {
        let c = chars[i];
        let (l, k) = (line, col);
        let mut push = |tok: Tok| out.push(Token { tok, line: l, col: k });
        match c {
            '\n' => {
                if depth == 0 {
                    push(Tok::Sep);
                }
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {}
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            ';' => push(Tok::Sep),
            '(' => {
                depth += 1;
                push(Tok::LParen)
            }
            ')' => {
                depth = depth.saturating_sub(1);
                push(Tok::RParen)
            }
            '[' => {
                depth += 1;
                push(Tok::LBrack)
            }
            ']' => {
                depth = depth.saturating_sub(1);
                push(Tok::RBrack)
            }
            ',' => push(Tok::Comma),
            '.' => push(Tok::Dot),
            ':' => push(Tok::Colon),
            '&' => push(Tok::And),
            '|' => push(Tok::Or),
            '~' => push(Tok::Not),
            '-' if chars.get(i + 1) == Some(&'>') => {
                push(Tok::Arrow);
                i += 2;
                col += 2;
                continue;
            }
            '=' if chars.get(i + 1) == Some(&'>') => {
                push(Tok::Turnstile);
                i += 2;
                col += 2;
                continue;
            }
            '=' => push(Tok::Eq),
            '$' => {
                let start = i;
                i += 1;
                let name = if chars.get(i) == Some(&'"') {
                    i += 1;
                    let mut s = String::new();
                    loop {
                        match chars.get(i) {
                            None | Some('\n') => {
                                return Err(err(l, k, "unterminated quoted parameter".into()))
                            }
                            Some('"') => break,
                            Some('\\') if matches!(chars.get(i + 1), Some('"') | Some('\\')) => {
                                s.push(chars[i + 1]);
                                i += 2;
                            }
                            Some(&ch) => {
                                s.push(ch);
                                i += 1;
                            }
                        }
                    }
                    i += 1;
                    s
                } else {
                    let s: String = chars[i..].iter().take_while(|c| is_ident_char(**c)).collect();
                    i += s.chars().count();
                    if s.is_empty() {
                        return Err(err(l, k, "expected parameter name after `$`".into()));
                    }
                    s
                };
                col += i - start;
                out.push(Token { tok: Tok::Param(name), line: l, col: k });
                continue;
            }
            c if is_ident_char(c) => {
                let s: String = chars[i..].iter().take_while(|c| is_ident_char(**c)).collect();
                let n = s.chars().count();
                i += n;
                col += n;
                let tok = if s.chars().all(|c| c.is_ascii_digit()) {
                    match s.parse() {
                        Ok(v) => Tok::Num(v),
                        Err(_) => Tok::Ident(s),
                    }
                } else {
                    Tok::Ident(s)
                };
                out.push(Token { tok, line: l, col: k });
                continue;
            }
            other => return Err(err(l, k, format!("unexpected character `{other}`"))),
        }
        i += 1;
        col += 1;
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

const KEYWORDS: &[&str] = &["true", "false", "exists", "forall"];

/// Name, context, premise, conclusion and source position of an axiom
/// awaiting resolution against the final signature.
type PendingAxiom = (Option<String>, Vec<Binder>, Formula, Formula, usize, usize);

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    mode: Mode,
}

impl Parser {
    fn new(src: &str, mode: Mode) -> Result<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            mode,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let t = &self.toks[self.pos];
        Error::Syntax {
            line: t.line,
            column: t.col,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.next();
                Ok(s)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn skip_seps(&mut self) {
        while *self.peek() == Tok::Sep {
            self.next();
        }
    }

    fn end_of_decl(&mut self) -> Result<()> {
        match self.peek() {
            Tok::Sep => {
                self.next();
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => Err(self.error("expected end of declaration")),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            if self.mode != Mode::Classical {
                return Err(self.error("`->` is only accepted in classical input"));
            }
            self.next();
            let rhs = self.formula()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut parts = vec![self.conjunction()?];
        while *self.peek() == Tok::Or {
            self.next();
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::Or(parts) })
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::And {
            self.next();
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::And(parts) })
    }

    fn unary(&mut self) -> Result<Formula> {
        if *self.peek() == Tok::Not {
            if self.mode != Mode::Classical {
                return Err(self.error("`~` is only accepted in classical input"));
            }
            self.next();
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        if self.keyword("exists") || self.keyword("forall") {
            let universal = self.keyword("forall");
            if universal && self.mode != Mode::Classical {
                return Err(self.error("`forall` is only accepted in classical input"));
            }
            self.next();
            let binders = self.binders(Tok::Dot)?;
            self.expect(Tok::Dot, "`.` after binders")?;
            let body = self.formula()?;
            return Ok(if universal {
                Formula::Forall(binders, Box::new(body))
            } else {
                Formula::Exists(binders, Box::new(body))
            });
        }
        self.atom()
    }

    /// Comma-separated `name` or `name:Sort`; unannotated sorts are left empty.
    fn binders(&mut self, end: Tok) -> Result<Vec<Binder>> {
        let mut out = Vec::new();
        if *self.peek() == end {
            return Ok(out);
        }
        loop {
            let name = self.ident("variable name")?;
            let sort = if *self.peek() == Tok::Colon {
                self.next();
                self.ident("sort name")?
            } else {
                String::new()
            };
            out.push(Binder { name, sort });
            if *self.peek() == Tok::Comma {
                self.next();
            } else {
                return Ok(out);
            }
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        if self.keyword("true") {
            self.next();
            return Ok(Formula::True);
        }
        if self.keyword("false") {
            self.next();
            return Ok(Formula::False);
        }
        if *self.peek() == Tok::LParen {
            self.next();
            let f = self.formula()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(f);
        }
        if let (Tok::Ident(name), Tok::LParen) = (self.peek().clone(), self.peek_at(1).clone()) {
            self.next();
            let args = self.arguments()?;
            if *self.peek() == Tok::Eq {
                let lhs = Term::App(name, args);
                return self.equation(lhs);
            }
            return Ok(Formula::Rel(name, args));
        }
        let lhs = self.term()?;
        self.equation(lhs)
    }

    fn equation(&mut self, lhs: Term) -> Result<Formula> {
        self.expect(Tok::Eq, "`=`")?;
        let rhs = self.term()?;
        Ok(Formula::Eq(lhs, rhs))
    }

    fn arguments(&mut self) -> Result<Vec<Term>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                args.push(self.term()?);
                if *self.peek() == Tok::Comma {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(args)
    }

    fn term(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Param(p) => {
                self.next();
                Ok(Term::Param(p))
            }
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                self.next();
                if *self.peek() == Tok::LParen {
                    if self.mode != Mode::Functional {
                        return Err(self.error("function terms are only accepted by relationalize"));
                    }
                    let args = self.arguments()?;
                    return Ok(Term::App(name, args));
                }
                Ok(Term::Var(name))
            }
            _ => Err(self.error("expected a term")),
        }
    }

    fn sort_list(&mut self) -> Result<Vec<String>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut sorts = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                sorts.push(self.ident("sort name")?);
                if *self.peek() == Tok::Comma {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(sorts)
    }

    fn theory(&mut self) -> Result<Theory> {
        let mut th = Theory::new(Signature::new());
        // Axioms are resolved against the final signature in a second pass,
        // so declarations may appear in any order.
        let mut pending: Vec<PendingAxiom> = Vec::new();
        let mut schemes: Vec<(String, String, Vec<String>, usize, usize, usize)> = Vec::new();
        loop {
            self.skip_seps();
            let (line, col) = (self.toks[self.pos].line, self.toks[self.pos].col);
            let kw = match self.peek().clone() {
                Tok::Eof => break,
                Tok::Ident(s) => s,
                _ => return Err(self.error("expected a declaration")),
            };
            self.next();
            match kw.as_str() {
                "sort" => {
                    let name = self.ident("sort name")?;
                    th.signature.add_sort(&name).map_err(|e| at(e, line, col))?;
                }
                "rel" => {
                    let name = self.ident("relation name")?;
                    let sorts = self.sort_list()?;
                    let refs: Vec<&str> = sorts.iter().map(String::as_str).collect();
                    th.signature.add_relation(&name, &refs)?;
                }
                "fun" => {
                    if self.mode != Mode::Functional {
                        return Err(Error::Syntax {
                            line,
                            column: col,
                            message: "`fun` declarations are only accepted by relationalize".into(),
                        });
                    }
                    let name = self.ident("function name")?;
                    let sorts = self.sort_list()?;
                    self.expect(Tok::Colon, "`:` before result sort")?;
                    let result = self.ident("result sort")?;
                    let refs: Vec<&str> = sorts.iter().map(String::as_str).collect();
                    th.signature.add_function(&name, &refs, &result)?;
                }
                "axiom" => {
                    let named = matches!(self.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()))
                        && matches!(self.peek_at(1), Tok::LBrack | Tok::Ident(_));
                    let name = if named { Some(self.ident("axiom name")?) } else { None };
                    let vars = if *self.peek() == Tok::LBrack {
                        self.next();
                        let vs = self.binders(Tok::RBrack)?;
                        self.expect(Tok::RBrack, "`]`")?;
                        vs
                    } else {
                        Vec::new()
                    };
                    let premise = self.formula()?;
                    self.expect(Tok::Turnstile, "`=>`")?;
                    let conclusion = self.formula()?;
                    pending.push((name, vars, premise, conclusion, line, col));
                }
                "scheme" => {
                    let name = self.ident("scheme name")?;
                    if *self.peek() == Tok::LBrack {
                        self.next();
                        self.expect(Tok::RBrack, "`]` (schemes take no context)")?;
                    }
                    let generator = self.ident("generator name")?;
                    let args = self.sort_list()?;
                    if !self.keyword("bound") {
                        return Err(self.error("expected `bound`"));
                    }
                    self.next();
                    let bound = match self.next().tok {
                        Tok::Num(k) => k,
                        _ => {
                            self.pos -= 1;
                            return Err(self.error("expected a numeric bound"));
                        }
                    };
                    schemes.push((name, generator, args, bound, line, col));
                }
                other => {
                    return Err(Error::Syntax {
                        line,
                        column: col,
                        message: format!("unknown declaration `{other}`"),
                    })
                }
            }
            self.end_of_decl()?;
        }
        for (name, vars, premise, conclusion, line, col) in pending {
            let seq = resolve_sequent(&th.signature, vars, premise, conclusion)
                .map_err(|e| at(e, line, col))?;
            check_sequent(&th.signature, &seq, self.mode)?;
            if let Some(n) = &name {
                if th.axioms.iter().any(|a| &a.name == n) {
                    return Err(Error::Syntax {
                        line,
                        column: col,
                        message: format!("axiom `{n}` declared twice"),
                    });
                }
            }
            th.push_axiom_unchecked(name.as_deref(), seq);
        }
        for (name, generator, args, bound, line, col) in schemes {
            let generator = Generator::from_parts(&generator, &args).map_err(|e| at(e, line, col))?;
            let scheme = Scheme { name, generator, bound };
            scheme.validate(&th.signature)?;
            th.schemes.push(scheme);
        }
        Ok(th)
    }
}

/// Attaches a position to errors that lack one.
fn at(e: Error, line: usize, col: usize) -> Error {
    match e {
        Error::Invalid(message) => Error::Syntax { line, column: col, message },
        e => e,
    }
}

/// Sort of `var` read off its first unshadowed relation-atom occurrence.
pub(crate) fn rel_sort(sig: &Signature, var: &str, f: &Formula) -> Option<String> {
    match f {
        Formula::Rel(r, args) => {
            let (_, sym) = sig.relation(r)?;
            args.iter()
                .zip(&sym.arity)
                .find(|(t, _)| matches!(t, Term::Var(v) if v == var))
                .map(|(_, &s)| sig.sort_name(s).to_string())
        }
        Formula::And(fs) | Formula::Or(fs) => fs.iter().find_map(|g| rel_sort(sig, var, g)),
        Formula::Exists(bs, b) | Formula::Forall(bs, b) => {
            if bs.iter().any(|x| x.name == var) {
                None
            } else {
                rel_sort(sig, var, b)
            }
        }
        Formula::Not(b) => rel_sort(sig, var, b),
        Formula::Implies(a, b) => rel_sort(sig, var, a).or_else(|| rel_sort(sig, var, b)),
        _ => None,
    }
}

/// Syntactic test matching [`rel_sort`]: does `var` occur unshadowed in a relation atom?
pub(crate) fn occurs_in_rel(var: &str, f: &Formula) -> bool {
    match f {
        Formula::Rel(_, args) => args.iter().any(|t| matches!(t, Term::Var(v) if v == var)),
        Formula::And(fs) | Formula::Or(fs) => fs.iter().any(|g| occurs_in_rel(var, g)),
        Formula::Exists(bs, b) | Formula::Forall(bs, b) => {
            !bs.iter().any(|x| x.name == var) && occurs_in_rel(var, b)
        }
        Formula::Not(b) => occurs_in_rel(var, b),
        Formula::Implies(a, b) => occurs_in_rel(var, a) || occurs_in_rel(var, b),
        _ => false,
    }
}

/// Sort of `var` from an equation with an already-sorted term.
fn eq_sort(
    var: &str,
    f: &Formula,
    scope: &[(String, String)],
    params: &BTreeMap<String, String>,
) -> Option<String> {
    let known = |t: &Term| match t {
        Term::Var(v) if v != var => scope
            .iter()
            .rev()
            .find(|(n, s)| n == v && !s.is_empty())
            .map(|(_, s)| s.clone()),
        Term::Param(p) => params.get(p).cloned(),
        _ => None,
    };
    match f {
        Formula::Eq(a, b) => {
            let is = |t: &Term| matches!(t, Term::Var(v) if v == var);
            if is(a) {
                known(b)
            } else if is(b) {
                known(a)
            } else {
                None
            }
        }
        Formula::And(fs) | Formula::Or(fs) => fs.iter().find_map(|g| eq_sort(var, g, scope, params)),
        Formula::Exists(bs, b) | Formula::Forall(bs, b) => {
            if bs.iter().any(|x| x.name == var) {
                None
            } else {
                eq_sort(var, b, scope, params)
            }
        }
        Formula::Not(b) => eq_sort(var, b, scope, params),
        Formula::Implies(a, b) => {
            eq_sort(var, a, scope, params).or_else(|| eq_sort(var, b, scope, params))
        }
        _ => None,
    }
}

fn infer(
    sig: &Signature,
    var: &str,
    bodies: &[&Formula],
    scope: &[(String, String)],
    params: &BTreeMap<String, String>,
) -> Result<String> {
    if let Some(s) = bodies.iter().find_map(|b| rel_sort(sig, var, b)) {
        return Ok(s);
    }
    if let Some(s) = bodies.iter().find_map(|b| eq_sort(var, b, scope, params)) {
        return Ok(s);
    }
    if sig.sorts.len() == 1 {
        return Ok(sig.sorts[0].clone());
    }
    Err(Error::sort(var, "cannot infer sort; annotate as `name:Sort`"))
}

fn resolve(
    sig: &Signature,
    f: Formula,
    scope: &mut Vec<(String, String)>,
    params: &BTreeMap<String, String>,
) -> Result<Formula> {
    Ok(match f {
        Formula::And(fs) => Formula::And(
            fs.into_iter().map(|g| resolve(sig, g, scope, params)).collect::<Result<_>>()?,
        ),
        Formula::Or(fs) => Formula::Or(
            fs.into_iter().map(|g| resolve(sig, g, scope, params)).collect::<Result<_>>()?,
        ),
        Formula::Not(b) => Formula::Not(Box::new(resolve(sig, *b, scope, params)?)),
        Formula::Implies(a, b) => Formula::Implies(
            Box::new(resolve(sig, *a, scope, params)?),
            Box::new(resolve(sig, *b, scope, params)?),
        ),
        Formula::Exists(bs, body) => resolve_quantifier(sig, false, bs, *body, scope, params)?,
        Formula::Forall(bs, body) => resolve_quantifier(sig, true, bs, *body, scope, params)?,
        f => f,
    })
}

fn resolve_quantifier(
    sig: &Signature,
    universal: bool,
    mut bs: Vec<Binder>,
    body: Formula,
    scope: &mut Vec<(String, String)>,
    params: &BTreeMap<String, String>,
) -> Result<Formula> {
    let depth = scope.len();
    for b in bs.iter_mut() {
        if b.sort.is_empty() {
            match infer(sig, &b.name, &[&body], scope, params) {
                Ok(s) => b.sort = s,
                Err(e) => {
                    scope.truncate(depth);
                    return Err(e);
                }
            }
        }
        scope.push((b.name.clone(), b.sort.clone()));
    }
    let body = resolve(sig, body, scope, params);
    scope.truncate(depth);
    let body = Box::new(body?);
    Ok(if universal {
        Formula::Forall(bs, body)
    } else {
        Formula::Exists(bs, body)
    })
}

fn resolve_sequent(
    sig: &Signature,
    vars: Vec<Binder>,
    premise: Formula,
    conclusion: Formula,
) -> Result<Sequent> {
    let none = BTreeMap::new();
    let mut scope: Vec<(String, String)> = Vec::new();
    for b in &vars {
        let sort = if b.sort.is_empty() {
            infer(sig, &b.name, &[&premise, &conclusion], &scope, &none)?
        } else {
            b.sort.clone()
        };
        scope.push((b.name.clone(), sort));
    }
    let context = Context::new(scope.clone())?;
    let premise = resolve(sig, premise, &mut scope, &none)?;
    let conclusion = resolve(sig, conclusion, &mut scope, &none)?;
    Ok(Sequent::new(context, premise, conclusion))
}

fn parse_with_mode(text: &str, mode: Mode) -> Result<Theory> {
    Parser::new(text, mode)?.theory()
}

/// Parses a geometric theory in the DSL.
pub fn parse_theory(text: &str) -> Result<Theory> {
    parse_with_mode(text, Mode::Geometric)
}

/// Parses a classical finitary theory (`~`, `->`, `forall` allowed).
pub fn parse_classical_theory(text: &str) -> Result<Theory> {
    parse_with_mode(text, Mode::Classical)
}

/// Parses a theory with `fun` declarations and function terms.
pub fn parse_functional_theory(text: &str) -> Result<Theory> {
    parse_with_mode(text, Mode::Functional)
}

/// Parses a parameter-free geometric formula in `ctx`.
pub fn parse_formula(sig: &Signature, ctx: &Context, text: &str) -> Result<Formula> {
    parse_formula_with_params(sig, ctx, text, &BTreeMap::new())
}

/// Parses a geometric formula whose `$name` parameters are sorted by `params`.
pub fn parse_formula_with_params(
    sig: &Signature,
    ctx: &Context,
    text: &str,
    params: &BTreeMap<String, String>,
) -> Result<Formula> {
    let mut p = Parser::new(text, Mode::Geometric)?;
    p.skip_seps();
    let f = p.formula()?;
    p.skip_seps();
    if *p.peek() != Tok::Eof {
        return Err(p.error("trailing input after formula"));
    }
    let mut scope = ctx.vars.clone();
    let f = resolve(sig, f, &mut scope, params)?;
    check_formula(sig, ctx, &f, params, Mode::Geometric)?;
    Ok(f)
}
