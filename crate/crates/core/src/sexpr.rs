//! Minimal S-expression reader with source positions, used by the domain,
//! state, diagram, and background file formats. Atoms are any run of
//! characters other than whitespace, parentheses, and `;` (which starts a
//! line comment).

use crate::error::{FoddError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Sexpr {
    Atom { text: String, line: usize, col: usize },
    List { items: Vec<Sexpr>, line: usize, col: usize },
}

impl Sexpr {
    pub fn pos(&self) -> (usize, usize) {
        match self {
            Sexpr::Atom { line, col, .. } => (*line, *col),
            Sexpr::List { line, col, .. } => (*line, *col),
        }
    }

    pub fn atom(&self) -> Result<&str> {
        match self {
            Sexpr::Atom { text, .. } => Ok(text),
            Sexpr::List { line, col, .. } => Err(FoddError::Parse {
                line: *line,
                col: *col,
                msg: "expected an atom, found a list".into(),
            }),
        }
    }

    pub fn list(&self) -> Result<&[Sexpr]> {
        match self {
            Sexpr::List { items, .. } => Ok(items),
            Sexpr::Atom { text, line, col } => Err(FoddError::Parse {
                line: *line,
                col: *col,
                msg: format!("expected a list, found '{text}'"),
            }),
        }
    }

    pub fn error(&self, msg: impl Into<String>) -> FoddError {
        let (line, col) = self.pos();
        FoddError::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }

    /// Non-empty list whose head is the atom `tag`; returns the tail.
    pub fn tagged(&self, tag: &str) -> Result<&[Sexpr]> {
        let items = self.list()?;
        match items.first() {
            Some(head) if head.atom().map(|t| t == tag).unwrap_or(false) => Ok(&items[1..]),
            _ => Err(self.error(format!("expected a ({tag} ...) form"))),
        }
    }
}

struct Scanner<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Scanner {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.chars.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some(';') => {
                    while let Some(&c) = self.chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn parse_one(&mut self) -> Result<Sexpr> {
        self.skip_trivia();
        let (line, col) = (self.line, self.col);
        match self.chars.peek() {
            None => Err(FoddError::Parse {
                line,
                col,
                msg: "unexpected end of input".into(),
            }),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        Some(')') => {
                            self.bump();
                            return Ok(Sexpr::List { items, line, col });
                        }
                        None => {
                            return Err(FoddError::Parse {
                                line: self.line,
                                col: self.col,
                                msg: "unclosed '('".into(),
                            })
                        }
                        _ => items.push(self.parse_one()?),
                    }
                }
            }
            Some(')') => Err(FoddError::Parse {
                line,
                col,
                msg: "unexpected ')'".into(),
            }),
            Some(_) => {
                let mut text = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    text.push(c);
                    self.bump();
                }
                Ok(Sexpr::Atom { text, line, col })
            }
        }
    }
}

/// Parse a single S-expression; trailing content is an error.
pub fn parse(text: &str) -> Result<Sexpr> {
    let mut scanner = Scanner::new(text);
    let expr = scanner.parse_one()?;
    scanner.skip_trivia();
    if scanner.chars.peek().is_some() {
        return Err(FoddError::Parse {
            line: scanner.line,
            col: scanner.col,
            msg: "trailing content after expression".into(),
        });
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_lists_and_comments() {
        let e = parse("; header\n(a (b c) 1.5)\n").unwrap();
        let items = e.list().unwrap();
        assert_eq!(items.len(), 3);
        assert_eq!(items[0].atom().unwrap(), "a");
        assert_eq!(items[2].atom().unwrap(), "1.5");
    }

    #[test]
    fn reports_positions() {
        let err = parse("(a\n  b))").unwrap_err();
        match err {
            FoddError::Parse { line, .. } => assert_eq!(line, 2),
            _ => panic!(),
        }
    }
}
