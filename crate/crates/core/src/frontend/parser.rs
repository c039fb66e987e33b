//! Recursive-descent parser for PADL descriptions.

use super::ast::*;
use super::diagnostic::Diagnostic;
use super::lexer::{tokenize, Tok, Token};

const KEYWORDS: &[&str] = &[
    "ARCHI_TYPE",
    "ARCHI_BEHAVIOR",
    "ARCHI_ELEM_TYPE",
    "BEHAVIOR",
    "INPUT_INTERACTIONS",
    "OUTPUT_INTERACTIONS",
    "ARCHI_TOPOLOGY",
    "ARCHI_ELEM_INSTANCES",
    "ARCHI_INTERACTIONS",
    "ARCHI_ATTACHMENTS",
    "END",
    "FROM",
    "TO",
    "UNI",
    "AND",
    "OR",
    "DEP",
    "SYNC",
    "SSYNC",
    "ASYNC",
    "void",
    "stop",
    "choice",
    "cond",
    "boolean",
    "int",
    "const",
    "true",
    "false",
    "and",
    "or",
    "not",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

type PResult<T> = Result<T, Diagnostic>;

/// Parses a complete architectural description.
pub fn parse(src: &str) -> Result<ArchiDescription, Vec<Diagnostic>> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0 };
    p.archi().map_err(|d| vec![d])
}

/// Parses a `;`-separated sequence of behavioral equations, as found
/// inside a `BEHAVIOR` section.
pub fn parse_equations(src: &str) -> Result<Vec<Equation>, Vec<Diagnostic>> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0 };
    let eqs = p.equations().map_err(|d| vec![d])?;
    p.expect(&Tok::Eof).map_err(|d| vec![d])?;
    Ok(eqs)
}

/// Parses a standalone expression.
pub fn parse_expr(src: &str) -> Result<Expr, Vec<Diagnostic>> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr().map_err(|d| vec![d])?;
    p.expect(&Tok::Eof).map_err(|d| vec![d])?;
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let idx = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[idx].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        let tok = self.peek();
        let code = if *tok == Tok::Eof { "E_EOF" } else { "E_SYNTAX" };
        Err(Diagnostic::error(
            code,
            self.span(),
            format!("expected {expected}, found {}", tok.describe()),
        ))
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(w) if w == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Span> {
        if self.at_kw(kw) {
            Ok(self.bump().span)
        } else {
            self.error(&format!("`{kw}`"))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok) -> PResult<Span> {
        if self.peek() == tok {
            Ok(self.bump().span)
        } else {
            self.error(&tok.describe())
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.peek() {
            Tok::Ident(w) if !is_keyword(w) => {
                let w = w.clone();
                let span = self.bump().span;
                Ok((w, span))
            }
            _ => self.error(what),
        }
    }

    fn archi(&mut self) -> PResult<ArchiDescription> {
        self.expect_kw("ARCHI_TYPE")?;
        let (name, _) = self.ident("architectural type name")?;
        self.expect(&Tok::LParen)?;
        let params = self.params()?;
        self.expect(&Tok::RParen)?;

        self.expect_kw("ARCHI_BEHAVIOR")?;
        let mut aets = Vec::new();
        while self.at_kw("ARCHI_ELEM_TYPE") {
            aets.push(self.aet()?);
        }
        if aets.is_empty() {
            return self.error("`ARCHI_ELEM_TYPE`");
        }

        self.expect_kw("ARCHI_TOPOLOGY")?;
        self.expect_kw("ARCHI_ELEM_INSTANCES")?;
        let mut instances = vec![self.instance()?];
        while self.eat(&Tok::Semi) {
            instances.push(self.instance()?);
        }

        self.expect_kw("ARCHI_INTERACTIONS")?;
        let mut archi_interactions = Vec::new();
        if !self.eat_kw("void") {
            loop {
                let span = self.span();
                let endpoint = self.endpoint()?;
                archi_interactions.push(ArchInteraction { endpoint, span });
                if !self.eat(&Tok::Semi) {
                    break;
                }
            }
        }

        self.expect_kw("ARCHI_ATTACHMENTS")?;
        let mut attachments = Vec::new();
        if !self.eat_kw("void") {
            loop {
                let span = self.expect_kw("FROM")?;
                let from = self.endpoint()?;
                self.expect_kw("TO")?;
                let to = self.endpoint()?;
                attachments.push(Attachment { from, to, span });
                if !self.eat(&Tok::Semi) {
                    break;
                }
            }
        }

        self.expect_kw("END")?;
        self.expect(&Tok::Eof)?;
        Ok(ArchiDescription { name, params, aets, instances, archi_interactions, attachments })
    }

    fn aet(&mut self) -> PResult<AetDef> {
        let span = self.expect_kw("ARCHI_ELEM_TYPE")?;
        let (name, _) = self.ident("element type name")?;
        self.expect(&Tok::LParen)?;
        let params = self.params()?;
        self.expect(&Tok::RParen)?;
        self.expect_kw("BEHAVIOR")?;
        let equations = self.equations()?;
        self.expect_kw("INPUT_INTERACTIONS")?;
        let mut interactions = self.interactions(Direction::Input)?;
        self.expect_kw("OUTPUT_INTERACTIONS")?;
        interactions.extend(self.interactions(Direction::Output)?);
        Ok(AetDef { name, params, equations, interactions, span })
    }

    /// `void` or a comma-separated list of typed parameters.
    fn params(&mut self) -> PResult<Vec<Param>> {
        if self.eat_kw("void") {
            return Ok(Vec::new());
        }
        let mut out = vec![self.param()?];
        while self.eat(&Tok::Comma) {
            out.push(self.param()?);
        }
        Ok(out)
    }

    fn param(&mut self) -> PResult<Param> {
        self.eat_kw("const");
        let span = self.span();
        let ty = self.ty()?;
        let (name, _) = self.ident("parameter name")?;
        let default = if self.eat(&Tok::Assign) { Some(self.expr()?) } else { None };
        Ok(Param { name, ty, default, span })
    }

    fn ty(&mut self) -> PResult<Type> {
        if self.eat_kw("boolean") {
            return Ok(Type::Bool);
        }
        if self.eat_kw("int") {
            self.expect(&Tok::LParen)?;
            let lo = self.signed_int()?;
            self.expect(&Tok::DotDot)?;
            let hi = self.signed_int()?;
            self.expect(&Tok::RParen)?;
            return Ok(Type::Int { lo, hi });
        }
        self.error("a type (`boolean` or `int(lo..hi)`)")
    }

    fn signed_int(&mut self) -> PResult<i64> {
        let neg = self.eat(&Tok::Minus);
        match *self.peek() {
            Tok::Int(v) => {
                self.bump();
                Ok(if neg { -v } else { v })
            }
            _ => self.error("an integer literal"),
        }
    }

    fn equations(&mut self) -> PResult<Vec<Equation>> {
        let mut out = vec![self.equation()?];
        while self.eat(&Tok::Semi) {
            out.push(self.equation()?);
        }
        Ok(out)
    }

    fn equation(&mut self) -> PResult<Equation> {
        let (name, span) = self.ident("equation name")?;
        self.expect(&Tok::LParen)?;
        let params = self.params()?;
        self.expect(&Tok::Semi)?;
        self.expect_kw("void")?;
        self.expect(&Tok::RParen)?;
        self.expect(&Tok::Eq)?;
        let body = self.process()?;
        Ok(Equation { name, params, body, span })
    }

    fn process(&mut self) -> PResult<Process> {
        if self.eat_kw("stop") {
            return Ok(Process::Stop);
        }
        if self.eat_kw("choice") {
            self.expect(&Tok::LBrace)?;
            let mut branches = vec![self.branch()?];
            while self.eat(&Tok::Comma) {
                if *self.peek() == Tok::RBrace {
                    break;
                }
                branches.push(self.branch()?);
            }
            self.expect(&Tok::RBrace)?;
            return Ok(Process::Choice(branches));
        }
        let (name, span) = self.ident("`stop`, `choice`, an action or an invocation")?;
        match self.peek() {
            Tok::LParen => {
                self.bump();
                let args = self.args()?;
                self.expect(&Tok::RParen)?;
                Ok(Process::Invoke { equation: name, args, span })
            }
            Tok::Dot => {
                self.bump();
                let then = self.process()?;
                Ok(Process::Prefix { action: name, then: Box::new(then), span })
            }
            _ => self.error("`.` or `(`"),
        }
    }

    fn branch(&mut self) -> PResult<Branch> {
        let guard = if self.eat_kw("cond") {
            self.expect(&Tok::LParen)?;
            let g = self.expr()?;
            self.expect(&Tok::RParen)?;
            self.expect(&Tok::Arrow)?;
            Some(g)
        } else {
            None
        };
        let body = self.process()?;
        Ok(Branch { guard, body })
    }

    /// Actual parameters: empty, `void`, or a comma-separated expression list.
    fn args(&mut self) -> PResult<Vec<Expr>> {
        if *self.peek() == Tok::RParen || self.eat_kw("void") {
            return Ok(Vec::new());
        }
        let mut out = vec![self.expr()?];
        while self.eat(&Tok::Comma) {
            out.push(self.expr()?);
        }
        Ok(out)
    }

    fn interactions(&mut self, direction: Direction) -> PResult<Vec<InteractionDecl>> {
        if self.eat_kw("void") {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let mut sync = Synchronicity::Sync;
        loop {
            if let Some(s) = self.sync_qualifier() {
                sync = s;
            }
            let multiplicity = match self.mult_qualifier() {
                Some(m) => m,
                None => return self.error("`UNI`, `AND` or `OR`"),
            };
            loop {
                let (name, span) = self.ident("interaction name")?;
                let dep_on = if self.eat_kw("DEP") { Some(self.ident("interaction name")?.0) } else { None };
                out.push(InteractionDecl { name, direction, multiplicity, synchronicity: sync, dep_on, span });
                if !self.eat(&Tok::Semi) {
                    break;
                }
                if self.at_qualifier() {
                    break;
                }
            }
            if !self.at_qualifier() {
                break;
            }
        }
        Ok(out)
    }

    fn at_qualifier(&self) -> bool {
        ["SYNC", "SSYNC", "ASYNC", "UNI", "AND", "OR"].iter().any(|k| self.at_kw(k))
    }

    fn sync_qualifier(&mut self) -> Option<Synchronicity> {
        let s = match self.peek() {
            Tok::Ident(w) if w == "SYNC" => Synchronicity::Sync,
            Tok::Ident(w) if w == "SSYNC" => Synchronicity::Ssync,
            Tok::Ident(w) if w == "ASYNC" => Synchronicity::Async,
            _ => return None,
        };
        self.bump();
        Some(s)
    }

    fn mult_qualifier(&mut self) -> Option<Multiplicity> {
        let m = match self.peek() {
            Tok::Ident(w) if w == "UNI" => Multiplicity::Uni,
            Tok::Ident(w) if w == "AND" => Multiplicity::And,
            Tok::Ident(w) if w == "OR" => Multiplicity::Or,
            _ => return None,
        };
        self.bump();
        Some(m)
    }

    fn instance(&mut self) -> PResult<Instance> {
        let (name, span) = self.ident("instance name")?;
        self.expect(&Tok::Colon)?;
        let (aet, _) = self.ident("element type name")?;
        self.expect(&Tok::LParen)?;
        let args = self.args()?;
        self.expect(&Tok::RParen)?;
        Ok(Instance { name, aet, args, span })
    }

    fn endpoint(&mut self) -> PResult<Endpoint> {
        let (aei, _) = self.ident("instance name")?;
        self.expect(&Tok::Dot)?;
        let (interaction, _) = self.ident("interaction name")?;
        Ok(Endpoint { aei, interaction })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_expr()?;
        while self.eat_kw("or") {
            let rhs = self.and_expr()?;
            lhs = Expr::binary(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.not_expr()?;
        while self.eat_kw("and") {
            let rhs = self.not_expr()?;
            lhs = Expr::binary(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        if self.eat_kw("not") {
            let e = self.not_expr()?;
            return Ok(Expr::Unary(UnOp::Not, Box::new(e)));
        }
        self.cmp_expr()
    }

    fn cmp_expr(&mut self) -> PResult<Expr> {
        let lhs = self.add_expr()?;
        let op = match self.peek() {
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.add_expr()?;
        Ok(Expr::binary(op, lhs, rhs))
    }

    fn add_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary_expr()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary_expr(&mut self) -> PResult<Expr> {
        if self.eat(&Tok::Minus) {
            let e = self.unary_expr()?;
            return Ok(Expr::Unary(UnOp::Neg, Box::new(e)));
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(w) if w == "true" => {
                self.bump();
                Ok(Expr::Bool(true))
            }
            Tok::Ident(w) if w == "false" => {
                self.bump();
                Ok(Expr::Bool(false))
            }
            Tok::Ident(w) if !is_keyword(&w) => {
                self.bump();
                if *self.peek() == Tok::Dot && matches!(self.peek_at(1), Tok::Ident(s) if s == "success") {
                    self.bump();
                    self.bump();
                    Ok(Expr::Success(w))
                } else {
                    Ok(Expr::Var(w))
                }
            }
            _ => self.error("an expression"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expression_precedence() {
        let e = parse_expr("not a = 1 + 2 and b or c").unwrap();
        let expected = Expr::binary(
            BinOp::Or,
            Expr::binary(
                BinOp::And,
                Expr::Unary(
                    UnOp::Not,
                    Box::new(Expr::binary(
                        BinOp::Eq,
                        Expr::Var("a".into()),
                        Expr::binary(BinOp::Add, Expr::Int(1), Expr::Int(2)),
                    )),
                ),
                Expr::Var("b".into()),
            ),
            Expr::Var("c".into()),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn success_reference() {
        assert_eq!(parse_expr("x.success").unwrap(), Expr::Success("x".into()));
    }

    #[test]
    fn equations_with_choice_and_trailing_comma() {
        let eqs = parse_equations(
            "Checking(boolean success; void) = choice { cond(success = true) -> update . Active(), \
             cond(success = false) -> beep . Active(), }; Active(void; void) = stop",
        )
        .unwrap();
        assert_eq!(eqs.len(), 2);
        match &eqs[0].body {
            Process::Choice(b) => assert_eq!(b.len(), 2),
            other => panic!("unexpected body {other:?}"),
        }
    }

    #[test]
    fn keyword_is_not_an_identifier() {
        let err = parse_equations("choice(void; void) = stop").unwrap_err();
        assert_eq!(err[0].code, "E_SYNTAX");
    }
}
