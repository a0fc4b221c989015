use super::lexer::{tokenize, Tok};
use super::*;

const BUILTINS: &[&str] = &[
    "L", "O", "I", "eps", "omega", "pi", "rho", "syq", "pair", "vec", "rel", "inj",
];
const KEYWORDS: &[&str] = &["carrier", "let", "eval", "pow", "unit"];

pub fn is_reserved(s: &str) -> bool {
    BUILTINS.contains(&s) || KEYWORDS.contains(&s)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(ParseError {
            span: self.span(),
            found: self.peek().describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect(&mut self, t: Tok) -> PResult<Span> {
        if *self.peek() == t {
            Ok(self.bump().1)
        } else {
            self.error(&[&format!("`{}`", t.symbol())])
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek() {
            Tok::Ident(s) if !is_reserved(s) => {
                let s = s.clone();
                Ok((s, self.bump().1))
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn script(&mut self) -> PResult<Script> {
        let mut stmts = Vec::new();
        loop {
            if self.is_kw("carrier") {
                let span = self.bump().1;
                let (name, _) = self.ident()?;
                self.expect(Tok::Eq)?;
                let def = match self.peek() {
                    Tok::Nat(n) => {
                        let n = *n;
                        self.bump();
                        CarrierDef::Size(n)
                    }
                    _ => CarrierDef::Expr(self.cexpr_or(&["number", "carrier expression"])?),
                };
                self.expect(Tok::Semi)?;
                stmts.push(Stmt::Carrier { name, def, span });
            } else if self.is_kw("let") {
                let span = self.bump().1;
                let (name, _) = self.ident()?;
                let ty = if *self.peek() == Tok::Colon {
                    self.bump();
                    Some(self.rtype()?)
                } else {
                    None
                };
                if *self.peek() != Tok::Eq {
                    return self.error(if ty.is_none() { &["`:`", "`=`"] } else { &["`=`"] });
                }
                self.bump();
                let value = self.expr()?;
                self.expect(Tok::Semi)?;
                stmts.push(Stmt::Let { name, ty, value, span });
            } else if self.is_kw("eval") {
                self.bump();
                let result = self.expr()?;
                if *self.peek() == Tok::Semi {
                    self.bump();
                }
                if *self.peek() != Tok::Eof {
                    return self.error(&["end of input"]);
                }
                return Ok(Script { stmts, result });
            } else {
                return self.error(&["`carrier`", "`let`", "`eval`"]);
            }
        }
    }

    fn rtype(&mut self) -> PResult<RelTypeExpr> {
        let src = self.cexpr()?;
        self.expect(Tok::Arrow)?;
        let tgt = self.cexpr()?;
        Ok(RelTypeExpr { src, tgt })
    }

    fn cexpr(&mut self) -> PResult<CExpr> {
        self.cexpr_or(&["carrier expression"])
    }

    fn cexpr_or(&mut self, expected: &[&str]) -> PResult<CExpr> {
        let mut left = self.cterm(expected)?;
        while *self.peek() == Tok::Star {
            let span = self.bump().1;
            let right = self.cterm(&["carrier expression"])?;
            left = CExpr::Product(Box::new(left), Box::new(right), span);
        }
        Ok(left)
    }

    fn cterm(&mut self, expected: &[&str]) -> PResult<CExpr> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "pow" => {
                let span = self.bump().1;
                Ok(CExpr::Pow(Box::new(self.cterm(&["carrier expression"])?), span))
            }
            Tok::Ident(s) if s == "unit" => Ok(CExpr::Unit(self.bump().1)),
            Tok::Ident(s) if !is_reserved(&s) => Ok(CExpr::Name(s, self.bump().1)),
            Tok::LParen => {
                self.bump();
                let c = self.cexpr()?;
                self.expect(Tok::RParen)?;
                Ok(c)
            }
            _ => self.error(expected),
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut left = self.inter()?;
        while *self.peek() == Tok::Bar {
            let span = self.bump().1;
            let right = self.inter()?;
            left = Expr::new(ExprKind::Union(Box::new(left), Box::new(right)), span);
        }
        Ok(left)
    }

    fn inter(&mut self) -> PResult<Expr> {
        let mut left = self.comp()?;
        while *self.peek() == Tok::Amp {
            let span = self.bump().1;
            let right = self.comp()?;
            left = Expr::new(ExprKind::Inter(Box::new(left), Box::new(right)), span);
        }
        Ok(left)
    }

    fn comp(&mut self) -> PResult<Expr> {
        let mut left = self.unary()?;
        while *self.peek() == Tok::Dot {
            let span = self.bump().1;
            let right = self.unary()?;
            left = Expr::new(ExprKind::Compose(Box::new(left), Box::new(right)), span);
        }
        Ok(left)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Minus {
            let span = self.bump().1;
            let inner = self.unary()?;
            return Ok(Expr::new(ExprKind::Complement(Box::new(inner)), span));
        }
        let mut e = self.atom()?;
        while *self.peek() == Tok::Caret {
            let span = self.bump().1;
            e = Expr::new(ExprKind::Transpose(Box::new(e)), span);
        }
        Ok(e)
    }

    fn bracket_carrier(&mut self) -> PResult<CExpr> {
        self.expect(Tok::LBrack)?;
        let c = self.cexpr()?;
        self.expect(Tok::RBrack)?;
        Ok(c)
    }

    fn args2(&mut self) -> PResult<(Box<Expr>, Box<Expr>)> {
        self.expect(Tok::LParen)?;
        let a = self.expr()?;
        self.expect(Tok::Comma)?;
        let b = self.expr()?;
        self.expect(Tok::RParen)?;
        Ok((Box::new(a), Box::new(b)))
    }

    fn arg1(&mut self) -> PResult<Box<Expr>> {
        self.expect(Tok::LParen)?;
        let a = self.expr()?;
        self.expect(Tok::RParen)?;
        Ok(Box::new(a))
    }

    fn atom(&mut self) -> PResult<Expr> {
        let span = self.span();
        let kind = match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                return Ok(e);
            }
            Tok::Ident(s) => {
                self.bump();
                match s.as_str() {
                    "L" | "O" => {
                        self.expect(Tok::LBrack)?;
                        let t = self.rtype()?;
                        self.expect(Tok::RBrack)?;
                        if s == "L" {
                            ExprKind::Universal(t)
                        } else {
                            ExprKind::Empty(t)
                        }
                    }
                    "I" => ExprKind::Identity(self.bracket_carrier()?),
                    "eps" => ExprKind::Eps(self.bracket_carrier()?),
                    "omega" => ExprKind::Omega(self.bracket_carrier()?),
                    "pi" => ExprKind::Pi(self.bracket_carrier()?),
                    "rho" => ExprKind::Rho(self.bracket_carrier()?),
                    "syq" => {
                        let (a, b) = self.args2()?;
                        ExprKind::Syq(a, b)
                    }
                    "pair" => {
                        let (a, b) = self.args2()?;
                        ExprKind::Pair(a, b)
                    }
                    "vec" => ExprKind::Vec(self.arg1()?),
                    "rel" => ExprKind::Rel(self.arg1()?),
                    "inj" => ExprKind::Inj(self.arg1()?),
                    _ if is_reserved(&s) => {
                        self.pos -= 1;
                        return self.error(&["expression"]);
                    }
                    _ => ExprKind::Var(s),
                }
            }
            _ => return self.error(&["expression"]),
        };
        Ok(Expr::new(kind, span))
    }
}

pub fn parse(text: &str) -> Result<Script, ParseError> {
    let toks = tokenize(text)?;
    Parser { toks, pos: 0 }.script()
}
