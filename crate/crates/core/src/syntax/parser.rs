use super::lexer::{tokenize, Tok};
use crate::error::ParseError;
use crate::model::{Conjunct, LabelAtom, LabelSet, NodeLabel, PathExpr, RelationAtom, Ucqt, Var};

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn new(input: &str) -> Result<Self, ParseError> {
        if input.trim().is_empty() {
            return Err(ParseError::new(0, "empty input"));
        }
        Ok(Parser {
            toks: tokenize(input)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        ParseError::new(
            self.offset(),
            format!("expected {what}, found {}", self.peek().describe()),
        )
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn int(&mut self) -> Result<u32, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    // union := conj ('|' conj)*
    fn union(&mut self) -> Result<PathExpr, ParseError> {
        let mut acc = self.conj()?;
        while self.eat(&Tok::Pipe) {
            acc = PathExpr::union(acc, self.conj()?);
        }
        Ok(acc)
    }

    // conj := concat ('&' concat)*
    fn conj(&mut self) -> Result<PathExpr, ParseError> {
        let mut acc = self.concat()?;
        while self.eat(&Tok::Amp) {
            acc = PathExpr::conj(acc, self.concat()?);
        }
        Ok(acc)
    }

    // concat := branch ('/' ['{' labels '}'] branch)*
    fn concat(&mut self) -> Result<PathExpr, ParseError> {
        let mut acc = self.branch()?;
        while self.eat(&Tok::Slash) {
            if self.eat(&Tok::LBrace) {
                let labels = self.label_list()?;
                acc = PathExpr::ann_concat(acc, labels, self.branch()?);
            } else {
                acc = PathExpr::concat(acc, self.branch()?);
            }
        }
        Ok(acc)
    }

    // branch := '[' union ']' branch | postfix ('[' union ']')*
    fn branch(&mut self) -> Result<PathExpr, ParseError> {
        if self.eat(&Tok::LBracket) {
            let test = self.union()?;
            self.expect(&Tok::RBracket, "`]`")?;
            let main = self.branch()?;
            return Ok(PathExpr::branch_left(test, main));
        }
        let mut acc = self.postfix()?;
        while self.eat(&Tok::LBracket) {
            let test = self.union()?;
            self.expect(&Tok::RBracket, "`]`")?;
            acc = PathExpr::branch_right(acc, test);
        }
        Ok(acc)
    }

    // postfix := primary ('+' | '{' int [',' int] '}')*
    fn postfix(&mut self) -> Result<PathExpr, ParseError> {
        let mut acc = self.primary()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = PathExpr::plus(acc);
            } else if *self.peek() == Tok::LBrace {
                let at = self.offset();
                self.bump();
                let min = self.int()?;
                let max = if self.eat(&Tok::Comma) { self.int()? } else { min };
                self.expect(&Tok::RBrace, "`}`")?;
                if min == 0 || min > max {
                    return Err(ParseError::new(
                        at,
                        format!("repetition bounds must satisfy 1 <= min <= max, got {{{min},{max}}}"),
                    ));
                }
                acc = PathExpr::repeat(acc, min, max);
            } else {
                return Ok(acc);
            }
        }
    }

    // primary := ident | '-' ident | '(' union ')'
    fn primary(&mut self) -> Result<PathExpr, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(PathExpr::label(name))
            }
            Tok::Minus => {
                self.bump();
                match self.peek().clone() {
                    Tok::Ident(name) => {
                        self.bump();
                        Ok(PathExpr::reverse(name))
                    }
                    _ => Err(ParseError::new(
                        self.offset(),
                        "reverse `-` applies only to a single edge label",
                    )),
                }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.union()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.unexpected("an edge label, `-`, `(` or `[`")),
        }
    }

    // labels := ident (',' ident)* '}'   (opening brace already consumed)
    fn label_list(&mut self) -> Result<LabelSet, ParseError> {
        let mut labels = LabelSet::new();
        loop {
            labels.insert(NodeLabel::new(self.ident("a node label")?));
            if self.eat(&Tok::RBrace) {
                return Ok(labels);
            }
            self.expect(&Tok::Comma, "`,` or `}`")?;
        }
    }

    // query := [ident (',' ident)*] '<-' body
    fn query(&mut self) -> Result<Ucqt, ParseError> {
        let mut head = Vec::new();
        if *self.peek() != Tok::Arrow {
            loop {
                head.push(Var::new(self.ident("a head variable")?));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(&Tok::Arrow, "`<-`")?;
        let body_at = self.offset();

        if *self.peek() == Tok::Ident("false".into())
            && self.toks.get(self.pos + 1).map(|t| &t.0) == Some(&Tok::Eof)
        {
            self.bump();
            return Ok(Ucqt::empty(head));
        }

        let mut disjuncts = vec![self.conjunct()?];
        while self.eat(&Tok::OrOr) {
            disjuncts.push(self.conjunct()?);
        }
        self.finish()?;
        Ucqt::new(head, disjuncts).map_err(|e| ParseError::new(body_at, e.to_string()))
    }

    fn conjunct(&mut self) -> Result<Conjunct, ParseError> {
        let mut c = Conjunct::default();
        loop {
            if self.eat(&Tok::LParen) {
                let src = self.ident("a variable")?;
                self.expect(&Tok::Comma, "`,`")?;
                let expr = self.union()?;
                self.expect(&Tok::Comma, "`,`")?;
                let trg = self.ident("a variable")?;
                self.expect(&Tok::RParen, "`)`")?;
                c.relations.push(RelationAtom::new(src, expr, trg));
            } else {
                let var = self.ident("`(` or a variable")?;
                self.expect(&Tok::Colon, "`:`")?;
                self.expect(&Tok::LBrace, "`{`")?;
                let labels = self.label_list()?;
                c.labels.push(LabelAtom {
                    var: Var::new(var),
                    labels,
                });
            }
            if !self.eat(&Tok::AndAnd) {
                return Ok(c);
            }
        }
    }
}

/// Parses a path expression.
///
/// Precedence from tightest to loosest: postfix `+` and `{m,n}`, branch
/// brackets, `/`, `&`, `|`. Concatenation is left-associative, `-label`
/// reverses a single edge label and `p /{A,B} q` is an annotated
/// concatenation.
pub fn parse_path_expr(text: &str) -> Result<PathExpr, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.union()?;
    p.finish()?;
    Ok(e)
}

/// Parses a UCQT query such as
/// `x,y <- (x, livesIn/isLocatedIn+, y) && y:{REGION} || (x, owns, y)`.
///
/// The body `false` denotes the empty union.
pub fn parse_ucqt(text: &str) -> Result<Ucqt, ParseError> {
    Parser::new(text)?.query()
}
