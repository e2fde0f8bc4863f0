//! Tokenizer and generic tree reader for the bracketed key/value text format
//! shared by graph and rule files.
//!
//! The format is a list of `key value` pairs where a value is a nonnegative
//! integer, a double-quoted string, or a nested `[ ... ]` list. `#` starts a
//! comment that runs to the end of the line.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(u64),
    Str(String),
    List(Vec<Entry>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: Value,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Open,
    Close,
    Word(String),
    Int(u64),
    Str(String),
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1;
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '[' => {
                chars.next();
                out.push((Token::Open, line));
            }
            ']' => {
                chars.next();
                out.push((Token::Close, line));
            }
            '"' => {
                let start = line;
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        None => {
                            return Err(Error::Parse {
                                line: start,
                                reason: "unterminated string".into(),
                            })
                        }
                        Some('"') => break,
                        Some('\\') => match chars.next() {
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            Some(c @ ('"' | '\\')) => s.push(c),
                            Some(c) => {
                                return Err(Error::Parse {
                                    line,
                                    reason: format!("unknown escape '\\{c}'"),
                                })
                            }
                            None => {
                                return Err(Error::Parse {
                                    line: start,
                                    reason: "unterminated string".into(),
                                })
                            }
                        },
                        Some(c) => {
                            if c == '\n' {
                                line += 1;
                            }
                            s.push(c)
                        }
                    }
                }
                out.push((Token::Str(s), start));
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if !c.is_ascii_digit() {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                let n = s.parse::<u64>().map_err(|e| Error::Parse {
                    line,
                    reason: format!("bad integer '{s}': {e}"),
                })?;
                out.push((Token::Int(n), line));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if !(c.is_ascii_alphanumeric() || c == '_') {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                out.push((Token::Word(s), line));
            }
            c => {
                return Err(Error::Parse {
                    line,
                    reason: format!("unexpected character '{c}'"),
                })
            }
        }
    }
    Ok(out)
}

/// Reads a whole document as a list of top-level entries.
pub fn read(text: &str) -> Result<Vec<Entry>> {
    let tokens = tokenize(text)?;
    let mut pos = 0;
    let entries = read_list(&tokens, &mut pos, false)?;
    Ok(entries)
}

fn read_list(tokens: &[(Token, usize)], pos: &mut usize, nested: bool) -> Result<Vec<Entry>> {
    let mut entries = Vec::new();
    loop {
        let Some((tok, line)) = tokens.get(*pos) else {
            if nested {
                let line = tokens.last().map_or(1, |t| t.1);
                return Err(Error::Parse {
                    line,
                    reason: "missing ']'".into(),
                });
            }
            return Ok(entries);
        };
        let line = *line;
        match tok {
            Token::Close if nested => {
                *pos += 1;
                return Ok(entries);
            }
            Token::Word(key) => {
                *pos += 1;
                let value = match tokens.get(*pos) {
                    Some((Token::Int(n), _)) => {
                        *pos += 1;
                        Value::Int(*n)
                    }
                    Some((Token::Str(s), _)) => {
                        *pos += 1;
                        Value::Str(s.clone())
                    }
                    Some((Token::Open, _)) => {
                        *pos += 1;
                        Value::List(read_list(tokens, pos, true)?)
                    }
                    Some((_, l)) => {
                        return Err(Error::Parse {
                            line: *l,
                            reason: format!("expected a value after '{key}'"),
                        })
                    }
                    None => {
                        return Err(Error::Parse {
                            line,
                            reason: format!("expected a value after '{key}'"),
                        })
                    }
                };
                entries.push(Entry {
                    key: key.clone(),
                    value,
                    line,
                });
            }
            other => {
                return Err(Error::Parse {
                    line,
                    reason: format!("expected a key, found {}", describe(other)),
                })
            }
        }
    }
}

fn describe(tok: &Token) -> String {
    match tok {
        Token::Open => "'['".into(),
        Token::Close => "']'".into(),
        Token::Word(w) => format!("'{w}'"),
        Token::Int(n) => format!("integer {n}"),
        Token::Str(s) => format!("string {s:?}"),
    }
}

/// Quotes a string with the escapes understood by the tokenizer.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Fields of a `node [...]` or `edge [...]` item, each required exactly once.
pub(crate) struct Fields<'a> {
    entries: &'a [Entry],
    line: usize,
}

impl<'a> Fields<'a> {
    pub(crate) fn new(entries: &'a [Entry], line: usize, allowed: &[&str]) -> Result<Self> {
        for (i, e) in entries.iter().enumerate() {
            if !allowed.contains(&e.key.as_str()) {
                return Err(Error::Parse {
                    line: e.line,
                    reason: format!("unexpected key '{}'", e.key),
                });
            }
            if entries[..i].iter().any(|p| p.key == e.key) {
                return Err(Error::Parse {
                    line: e.line,
                    reason: format!("duplicate key '{}'", e.key),
                });
            }
        }
        Ok(Fields { entries, line })
    }

    fn get(&self, key: &str) -> Result<&'a Entry> {
        self.entries
            .iter()
            .find(|e| e.key == key)
            .ok_or_else(|| Error::Parse {
                line: self.line,
                reason: format!("missing '{key}'"),
            })
    }

    pub(crate) fn int(&self, key: &str) -> Result<u64> {
        let e = self.get(key)?;
        match &e.value {
            Value::Int(n) => Ok(*n),
            _ => Err(Error::Parse {
                line: e.line,
                reason: format!("'{key}' must be an integer"),
            }),
        }
    }

    pub(crate) fn string(&self, key: &str) -> Result<&'a str> {
        let e = self.get(key)?;
        match &e.value {
            Value::Str(s) => Ok(s),
            _ => Err(Error::Parse {
                line: e.line,
                reason: format!("'{key}' must be a string"),
            }),
        }
    }
}
