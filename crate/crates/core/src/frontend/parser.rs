use super::ast::*;
use super::lexer::{lex, Comment, TokKind, Token};
use crate::error::{Error, Result, Span};

pub fn parse(src: &str) -> Result<Program> {
    let lexed = lex(src)?;
    parse_tokens(lexed.tokens, lexed.comments)
}

pub fn parse_tokens(tokens: Vec<Token>, comments: Vec<Comment>) -> Result<Program> {
    let mut p = Parser { tokens, pos: 0 };
    let mut comments = comments.into_iter().peekable();
    let mut stmts = Vec::new();
    while !p.at_end() {
        if p.eat(&TokKind::Newline) {
            continue;
        }
        let line = p.peek_span().line;
        let mut leading = Vec::new();
        while let Some(c) = comments.next_if(|c| c.line <= line) {
            leading.push(c.text);
        }
        let mut stmt = p.statement()?;
        stmt.comments = leading;
        stmts.push(stmt);
        if !p.at_end() && !p.eat(&TokKind::Newline) {
            return Err(p.error("expected end of statement"));
        }
    }
    Ok(Program { stmts, trailing: comments.map(|c| c.text).collect() })
}

/// Parses a single expression.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = Parser { tokens: lex(src)?.tokens, pos: 0 };
    let e = p.expr(0)?;
    if !p.at_end() {
        return Err(p.error("unexpected input after expression"));
    }
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

fn join(a: Span, b: Span) -> Span {
    if a.line == b.line && b.col >= a.col {
        Span { len: b.col + b.len - a.col, ..a }
    } else {
        a
    }
}

fn describe(k: &TokKind) -> String {
    match k {
        TokKind::Ident(s) => format!("`{s}`"),
        TokKind::Int(i) => format!("`{i}`"),
        TokKind::Float(f) => format!("`{f:?}`"),
        TokKind::Char(c) => format!("`'{c}'`"),
        TokKind::Newline => "end of line".into(),
        other => format!("`{}`", symbol(other)),
    }
}

fn symbol(k: &TokKind) -> &'static str {
    match k {
        TokKind::KwSpace => "space",
        TokKind::KwList => "list",
        TokKind::KwTol => "tol",
        TokKind::Eq => "=",
        TokKind::Assign => ":=",
        TokKind::Colon => ":",
        TokKind::Dot => ".",
        TokKind::Comma => ",",
        TokKind::Bar => "|",
        TokKind::Prime => "'",
        TokKind::LBrack => "[",
        TokKind::RBrack => "]",
        TokKind::LParen => "(",
        TokKind::RParen => ")",
        TokKind::Plus => "+",
        TokKind::Minus => "-",
        TokKind::Star => "*",
        TokKind::Slash => "/",
        TokKind::Percent => "%",
        TokKind::Caret => "^",
        TokKind::Lt => "<",
        TokKind::Gt => ">",
        TokKind::Le => "<=",
        TokKind::Ge => ">=",
        TokKind::EqEq => "==",
        TokKind::Ne => "!=",
        _ => "?",
    }
}

impl Parser {
    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&TokKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, n: usize) -> Option<&TokKind> {
        self.tokens.get(self.pos + n).map(|t| &t.kind)
    }

    fn peek_span(&self) -> Span {
        match self.tokens.get(self.pos) {
            Some(t) => t.span,
            None => self.tokens.last().map(|t| Span { col: t.span.col + t.span.len, len: 0, ..t.span }).unwrap_or_default(),
        }
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn error(&self, msg: &str) -> Error {
        let found = match self.peek() {
            Some(k) => describe(k),
            None => "end of input".into(),
        };
        Error::Parse { span: self.peek_span(), msg: format!("{msg}, found {found}") }
    }

    fn eat(&mut self, k: &TokKind) -> bool {
        if self.peek() == Some(k) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, k: &TokKind) -> Result<Span> {
        if self.eat(k) {
            Ok(self.prev_span())
        } else {
            Err(self.error(&format!("expected `{}`", symbol(k))))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(TokKind::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("expected a name")),
        }
    }

    /// Whether the next token starts right where the previous one ended.
    fn adjacent(&self) -> bool {
        match (self.pos.checked_sub(1).and_then(|i| self.tokens.get(i)), self.tokens.get(self.pos)) {
            (Some(a), Some(b)) => a.span.line == b.span.line && a.span.col + a.span.len == b.span.col,
            _ => false,
        }
    }

    fn statement(&mut self) -> Result<Stmt> {
        let start = self.peek_span();
        let kind = match self.peek() {
            Some(TokKind::KwSpace) => {
                self.pos += 1;
                let name = self.ident()?;
                self.expect(&TokKind::Colon)?;
                let space = self.space_name()?;
                let bounds = if self.eat(&TokKind::LBrack) {
                    let lo = self.expr(0)?;
                    self.expect(&TokKind::Comma)?;
                    let hi = self.expr(0)?;
                    self.expect(&TokKind::RBrack)?;
                    Some((lo, hi))
                } else {
                    None
                };
                StmtKind::Space { name, space, bounds }
            }
            Some(TokKind::KwList) => {
                self.pos += 1;
                let name = self.ident()?;
                self.expect(&TokKind::Colon)?;
                let items = self.type_items()?;
                if self.peek() == Some(&TokKind::LBrack) {
                    return Err(self.error("a list declaration takes no shape"));
                }
                StmtKind::List { name, items }
            }
            Some(TokKind::KwTol) => {
                self.pos += 1;
                let name = self.ident()?;
                if self.eat(&TokKind::Eq) {
                    self.expect(&TokKind::LBrack)?;
                    let shape = self.expr_list(&TokKind::RBrack)?;
                    StmtKind::TolShape { name, shape }
                } else {
                    self.expect(&TokKind::Colon)?;
                    let items = self.type_items()?;
                    let shape = if self.eat(&TokKind::LBrack) { Some(self.expr_list(&TokKind::RBrack)?) } else { None };
                    StmtKind::Tol { name, items, shape }
                }
            }
            Some(TokKind::Ident(_)) => {
                let name = self.ident()?;
                let params = if self.eat(&TokKind::LParen) {
                    let mut ps = Vec::new();
                    if !self.eat(&TokKind::RParen) {
                        loop {
                            ps.push(self.ident()?);
                            if self.eat(&TokKind::RParen) {
                                break;
                            }
                            self.expect(&TokKind::Comma)?;
                        }
                    }
                    Some(ps)
                } else {
                    None
                };
                let output = if self.eat(&TokKind::Assign) {
                    true
                } else if self.eat(&TokKind::Eq) {
                    false
                } else {
                    return Err(self.error("expected `=` or `:=`"));
                };
                let body = self.expr(0)?;
                StmtKind::Def { name, params, body, output }
            }
            _ => return Err(self.error("expected a declaration or definition")),
        };
        Ok(Stmt { kind, span: join(start, self.prev_span()), comments: vec![] })
    }

    /// A space or list name, with `*`, `+` or `-` attached when adjacent.
    fn space_name(&mut self) -> Result<String> {
        let mut name = self.ident()?;
        if self.adjacent() {
            let suffix = match self.peek() {
                Some(TokKind::Star) => Some('*'),
                Some(TokKind::Plus) => Some('+'),
                Some(TokKind::Minus) => Some('-'),
                _ => None,
            };
            if let Some(s) = suffix {
                self.pos += 1;
                name.push(s);
            }
        }
        Ok(name)
    }

    fn type_items(&mut self) -> Result<Vec<TypeItem>> {
        let mut items = vec![self.type_item()?];
        while self.eat(&TokKind::Comma) {
            items.push(self.type_item()?);
        }
        Ok(items)
    }

    fn type_item(&mut self) -> Result<TypeItem> {
        if self.eat(&TokKind::LBrack) {
            let mut names = vec![self.space_name()?];
            while self.eat(&TokKind::Comma) {
                names.push(self.space_name()?);
            }
            self.expect(&TokKind::RBrack)?;
            Ok(TypeItem::Group(names))
        } else {
            Ok(TypeItem::Name(self.space_name()?))
        }
    }

    fn expr_list(&mut self, close: &TokKind) -> Result<Vec<Expr>> {
        let mut xs = Vec::new();
        if self.eat(close) {
            return Ok(xs);
        }
        loop {
            xs.push(self.expr(0)?);
            if self.eat(close) {
                return Ok(xs);
            }
            if !self.eat(&TokKind::Comma) {
                return Err(self.error(&format!("expected `,` or `{}`", symbol(close))));
            }
        }
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek()? {
            TokKind::Plus => BinOp::Add,
            TokKind::Minus => BinOp::Sub,
            TokKind::Star => BinOp::Mul,
            TokKind::Slash => BinOp::Div,
            TokKind::Percent => BinOp::Mod,
            TokKind::Caret => BinOp::Pow,
            TokKind::Lt => BinOp::Lt,
            TokKind::Gt => BinOp::Gt,
            TokKind::Le => BinOp::Le,
            TokKind::Ge => BinOp::Ge,
            TokKind::EqEq => BinOp::Eq,
            TokKind::Ne => BinOp::Ne,
            _ => return None,
        })
    }

    pub(crate) fn expr(&mut self, min_prec: u8) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            let rhs = self.expr(if op.right_assoc() { prec } else { prec + 1 })?;
            let span = join(lhs.span, rhs.span);
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        let start = self.peek_span();
        match self.peek() {
            Some(TokKind::Minus) => {
                self.pos += 1;
                let x = self.expr(PREC_POW)?;
                let span = join(start, x.span);
                Ok(match x.kind {
                    ExprKind::Int(i) => Expr::new(ExprKind::Int(-i), span),
                    ExprKind::Float(f) if !f.is_sign_negative() => Expr::new(ExprKind::Float(-f), span),
                    ExprKind::Inf(false) => Expr::new(ExprKind::Inf(true), span),
                    _ => Expr::new(ExprKind::Neg(Box::new(x)), span),
                })
            }
            Some(TokKind::Plus) if matches!(self.peek_at(1), Some(TokKind::Ident(s)) if s == "Inf") => {
                self.pos += 2;
                Ok(Expr::new(ExprKind::Inf(false), join(start, self.prev_span())))
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> Result<Expr> {
        let mut e = self.primary()?;
        while self.peek() == Some(&TokKind::LBrack) {
            self.pos += 1;
            let index = self.expr_list(&TokKind::RBrack)?;
            let slot = index.len() == 1 && self.eat(&TokKind::Prime);
            let span = join(e.span, self.prev_span());
            e = Expr::new(ExprKind::Index { target: Box::new(e), index, slot }, span);
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr> {
        let start = self.peek_span();
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error("expected an expression"));
        };
        self.pos += 1;
        let kind = match tok {
            TokKind::Int(i) => ExprKind::Int(i),
            TokKind::Float(f) => ExprKind::Float(f),
            TokKind::Char(c) => ExprKind::Char(c),
            TokKind::Star => ExprKind::Star,
            TokKind::Ident(name) => match name.as_str() {
                "true" => ExprKind::Bool(true),
                "false" => ExprKind::Bool(false),
                "Inf" => ExprKind::Inf(false),
                _ => return self.name_tail(name, start),
            },
            TokKind::KwSpace if self.peek() == Some(&TokKind::LParen) => {
                return self.name_tail("space".into(), start);
            }
            TokKind::KwTol => {
                self.expect(&TokKind::LBrack)?;
                ExprKind::ConstTol(self.expr_list(&TokKind::RBrack)?)
            }
            TokKind::Bar => {
                if self.peek() == Some(&TokKind::Bar) && self.adjacent() {
                    self.pos += 1;
                    let x = self.expr(0)?;
                    self.expect(&TokKind::Bar)?;
                    self.expect(&TokKind::Bar)?;
                    ExprKind::Dim(Box::new(x))
                } else {
                    let x = self.expr(0)?;
                    self.expect(&TokKind::Bar)?;
                    if self.eat(&TokKind::Prime) {
                        ExprKind::Cap(Box::new(x))
                    } else {
                        ExprKind::Shape(Box::new(x))
                    }
                }
            }
            TokKind::LParen => {
                let first = self.expr(0)?;
                if self.eat(&TokKind::RParen) {
                    // parentheses only group
                    return Ok(first);
                }
                self.expect(&TokKind::Comma)?;
                let mut items = vec![first];
                items.extend(self.expr_list(&TokKind::RParen)?);
                ExprKind::Tuple(items)
            }
            TokKind::LBrack => {
                let items = self.expr_list(&TokKind::RBrack)?;
                if items.is_empty() {
                    return Err(Error::Parse { span: start, msg: "empty bracket literal".into() });
                }
                ExprKind::Bracket(items)
            }
            other => {
                self.pos -= 1;
                return Err(self.error(&format!("unexpected {} in expression", describe(&other))));
            }
        };
        Ok(Expr::new(kind, join(start, self.prev_span())))
    }

    fn name_tail(&mut self, name: String, start: Span) -> Result<Expr> {
        if self.peek() == Some(&TokKind::Prime) && self.peek_at(1) == Some(&TokKind::LParen) {
            self.pos += 2;
            let args = self.expr_list(&TokKind::RParen)?;
            return Ok(Expr::new(ExprKind::Call { name, prime: true, args }, join(start, self.prev_span())));
        }
        if self.peek() == Some(&TokKind::Dot) && matches!(self.peek_at(1), Some(TokKind::Ident(_))) {
            let mut names = vec![name];
            while self.eat(&TokKind::Dot) {
                names.push(self.ident()?);
            }
            self.expect(&TokKind::LParen)?;
            let args = self.expr_list(&TokKind::RParen)?;
            return Ok(Expr::new(ExprKind::Chain { names, args }, join(start, self.prev_span())));
        }
        if self.eat(&TokKind::LParen) {
            let args = self.expr_list(&TokKind::RParen)?;
            return Ok(Expr::new(ExprKind::Call { name, prime: false, args }, join(start, self.prev_span())));
        }
        Ok(Expr::new(ExprKind::Name(name), start))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(src: &str) -> ExprKind {
        parse_expr(src).unwrap().kind
    }

    #[test]
    fn matmul_listing() {
        let p = parse(
            "tol result=[|a|[1],|b|[2]]\nvec(i,j)=map(a[i],mul(*,b[*,j]))\nelem(i,j)=reduce(vec(i,j),add,0)\nresult:=map(result,elem(i,j),[i,j])\n",
        )
        .unwrap();
        assert_eq!(p.stmts.len(), 4);
        assert!(matches!(p.stmts[0].kind, StmtKind::TolShape { .. }));
        assert!(matches!(p.stmts[1].kind, StmtKind::Def { output: false, .. }));
        assert!(matches!(p.stmts[3].kind, StmtKind::Def { output: true, params: None, .. }));
    }

    #[test]
    fn space_call_in_expressions() {
        let p = parse("y:=convert(x,space(z))").unwrap();
        assert_eq!(crate::frontend::format_program(&p), "y:=convert(x,space(z))\n");
        assert!(parse("y:=space").is_err());
    }

    #[test]
    fn declarations() {
        let p = parse("tol x: R [3]").unwrap();
        match &p.stmts[0].kind {
            StmtKind::Tol { items, shape: Some(s), .. } => {
                assert_eq!(items, &vec![TypeItem::Name("R".into())]);
                assert_eq!(s.len(), 1);
            }
            k => panic!("{k:?}"),
        }
        let p = parse("list l: [Z, R], R").unwrap();
        match &p.stmts[0].kind {
            StmtKind::List { items, .. } => {
                assert_eq!(items, &vec![TypeItem::Group(vec!["Z".into(), "R".into()]), TypeItem::Name("R".into())])
            }
            k => panic!("{k:?}"),
        }
        let p = parse("space s: R+ [0, 1]\ntol y: N* [2,2]\ntol z: l").unwrap();
        assert!(matches!(&p.stmts[0].kind, StmtKind::Space { space, bounds: Some(_), .. } if space == "R+"));
        assert!(matches!(&p.stmts[1].kind, StmtKind::Tol { items, .. } if items[0] == TypeItem::Name("N*".into())));
    }

    #[test]
    fn precedence() {
        let ExprKind::Binary(BinOp::Add, _, r) = e("1+2*3") else { panic!() };
        assert!(matches!(r.kind, ExprKind::Binary(BinOp::Mul, ..)));
        let ExprKind::Binary(BinOp::Pow, _, r) = e("2^3^2") else { panic!() };
        assert!(matches!(r.kind, ExprKind::Binary(BinOp::Pow, ..)));
        assert!(matches!(e("-2^2"), ExprKind::Neg(_)));
        assert_eq!(e("-2"), ExprKind::Int(-2));
        assert_eq!(e("-Inf"), ExprKind::Inf(true));
        assert_eq!(e("+Inf"), ExprKind::Inf(false));
        assert!(matches!(e("a<b+1"), ExprKind::Binary(BinOp::Lt, ..)));
    }

    #[test]
    fn star_prefix_and_infix() {
        let ExprKind::Binary(BinOp::Div, l, _) = e("*/shape(*)") else { panic!() };
        assert_eq!(l.kind, ExprKind::Star);
        let ExprKind::Binary(BinOp::Mul, ..) = e("a*b") else { panic!() };
        let ExprKind::Call { args, .. } = e("mul(*,b[*,j])") else { panic!() };
        assert_eq!(args[0].kind, ExprKind::Star);
    }

    #[test]
    fn bars_and_postfix() {
        assert!(matches!(e("|a|[1]"), ExprKind::Index { .. }));
        assert!(matches!(e("||a||"), ExprKind::Dim(_)));
        assert!(matches!(e("|a|'"), ExprKind::Cap(_)));
        assert!(matches!(e("t[2]'"), ExprKind::Index { slot: true, .. }));
        assert!(matches!(e("part'(t,2)"), ExprKind::Call { prime: true, .. }));
        assert!(matches!(e("tol[p,2*p+|in|]"), ExprKind::ConstTol(_)));
        assert!(matches!(e("(1,2.5)"), ExprKind::Tuple(_)));
        assert!(matches!(e("(1)"), ExprKind::Int(1)));
    }

    #[test]
    fn chain() {
        let ExprKind::Chain { names, args } = e("conv.bn.relu.conv.bn(in)") else { panic!() };
        assert_eq!(names.len(), 5);
        assert_eq!(args.len(), 1);
    }

    #[test]
    fn errors_have_spans() {
        let err = parse("x = (1,").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        let err = parse("x := 1 2").unwrap_err();
        match err {
            Error::Parse { span, .. } => assert_eq!((span.line, span.col), (1, 8)),
            e => panic!("{e}"),
        }
        assert_eq!(parse("y = ").unwrap_err(), parse("y = ").unwrap_err());
    }

    #[test]
    fn comments_attach() {
        let p = parse("# head\nx := 1\n# tail").unwrap();
        assert_eq!(p.stmts[0].comments, vec![" head".to_string()]);
        assert_eq!(p.trailing, vec![" tail".to_string()]);
    }
}
