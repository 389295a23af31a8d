use crate::error::{Error, Result, Span};

#[derive(Clone, Debug, PartialEq)]
pub enum TokKind {
    Ident(String),
    Int(i64),
    Float(f64),
    Char(char),
    KwSpace,
    KwList,
    KwTol,
    /// `=`
    Eq,
    /// `:=`
    Assign,
    Colon,
    Dot,
    Comma,
    Bar,
    Prime,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Caret,
    Lt,
    Gt,
    Le,
    Ge,
    EqEq,
    Ne,
    Newline,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub kind: TokKind,
    pub span: Span,
}

/// A `#` comment on a line of its own or after code.
#[derive(Clone, Debug, PartialEq)]
pub struct Comment {
    pub line: u32,
    pub text: String,
}

pub struct Lexed {
    pub tokens: Vec<Token>,
    pub comments: Vec<Comment>,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>> {
    Ok(lex(src)?.tokens)
}

pub fn lex(src: &str) -> Result<Lexed> {
    let chars: Vec<char> = src.chars().collect();
    let mut tokens: Vec<Token> = Vec::new();
    let mut comments = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let mut depth = 0i32;

    while i < chars.len() {
        let c = chars[i];
        let start = Span { line, col, len: 1 };
        let push = |tokens: &mut Vec<Token>, kind: TokKind, len: usize| {
            tokens.push(Token { kind, span: Span { len: len as u32, ..start } });
        };
        match c {
            '\n' => {
                if depth <= 0 && tokens.last().is_some_and(|t| t.kind != TokKind::Newline) {
                    push(&mut tokens, TokKind::Newline, 1);
                }
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j] != '\n' {
                    j += 1;
                }
                let text: String = chars[i + 1..j].iter().collect();
                comments.push(Comment { line, text: text.trim_end().to_string() });
                col += (j - i) as u32;
                i = j;
                continue;
            }
            _ => {}
        }

        let (kind, len) = if c.is_ascii_digit() {
            lex_number(&chars, i, start)?
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            let kind = match word.as_str() {
                "space" => TokKind::KwSpace,
                "list" => TokKind::KwList,
                "tol" => TokKind::KwTol,
                _ => TokKind::Ident(word),
            };
            (kind, j - i)
        } else if c == '\'' && char_allowed(tokens.last()) && i + 2 < chars.len() && chars[i + 2] == '\'' {
            (TokKind::Char(chars[i + 1]), 3)
        } else {
            let next = chars.get(i + 1).copied();
            match (c, next) {
                (':', Some('=')) => (TokKind::Assign, 2),
                ('=', Some('=')) => (TokKind::EqEq, 2),
                ('!', Some('=')) => (TokKind::Ne, 2),
                ('<', Some('=')) => (TokKind::Le, 2),
                ('>', Some('=')) => (TokKind::Ge, 2),
                ('=', _) => (TokKind::Eq, 1),
                (':', _) => (TokKind::Colon, 1),
                ('.', _) => (TokKind::Dot, 1),
                (',', _) => (TokKind::Comma, 1),
                ('|', _) => (TokKind::Bar, 1),
                ('\'', _) => (TokKind::Prime, 1),
                ('[', _) => {
                    depth += 1;
                    (TokKind::LBrack, 1)
                }
                (']', _) => {
                    depth -= 1;
                    (TokKind::RBrack, 1)
                }
                ('(', _) => {
                    depth += 1;
                    (TokKind::LParen, 1)
                }
                (')', _) => {
                    depth -= 1;
                    (TokKind::RParen, 1)
                }
                ('+', _) => (TokKind::Plus, 1),
                ('-', _) => (TokKind::Minus, 1),
                ('*', _) => (TokKind::Star, 1),
                ('/', _) => (TokKind::Slash, 1),
                ('%', _) => (TokKind::Percent, 1),
                ('^', _) => (TokKind::Caret, 1),
                ('<', _) => (TokKind::Lt, 1),
                ('>', _) => (TokKind::Gt, 1),
                _ => return Err(Error::Lex { span: start, msg: format!("unexpected character `{c}`") }),
            }
        };
        push(&mut tokens, kind, len);
        i += len;
        col += len as u32;
    }
    if tokens.last().is_some_and(|t| t.kind == TokKind::Newline) {
        tokens.pop();
    }
    Ok(Lexed { tokens, comments })
}

/// A quote starts a character literal unless it can be a postfix prime.
fn char_allowed(prev: Option<&Token>) -> bool {
    !matches!(
        prev.map(|t| &t.kind),
        Some(TokKind::Bar | TokKind::RBrack | TokKind::RParen | TokKind::Ident(_))
    )
}

fn lex_number(chars: &[char], i: usize, start: Span) -> Result<(TokKind, usize)> {
    let mut j = i;
    while j < chars.len() && chars[j].is_ascii_digit() {
        j += 1;
    }
    let mut float = false;
    // `1.` is a float, `1.5` too, but `x.f` style chains never start with a digit
    if j < chars.len() && chars[j] == '.' && !chars.get(j + 1).is_some_and(|c| c.is_ascii_alphabetic() || *c == '_') {
        float = true;
        j += 1;
        while j < chars.len() && chars[j].is_ascii_digit() {
            j += 1;
        }
    }
    if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
        let mut k = j + 1;
        if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
            k += 1;
        }
        if k < chars.len() && chars[k].is_ascii_digit() {
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            float = true;
            j = k;
        }
    }
    let text: String = chars[i..j].iter().collect();
    let span = Span { len: (j - i) as u32, ..start };
    let kind = if float {
        TokKind::Float(text.parse().map_err(|_| Error::Lex { span, msg: format!("bad number `{text}`") })?)
    } else {
        TokKind::Int(text.parse().map_err(|_| Error::Lex { span, msg: format!("integer `{text}` out of range") })?)
    };
    Ok((kind, j - i))
}
