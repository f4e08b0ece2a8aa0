//! Line-delimited records: `key=value` pairs separated by tabs. Values that
//! are empty or contain whitespace, `"`, `\` or `=` are double-quoted with
//! backslash escapes.

use std::fmt;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Record {
    pub fields: Vec<(String, String)>,
}

impl Record {
    pub fn new() -> Self {
        Record::default()
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.push(key, value);
        self
    }

    pub fn push(&mut self, key: &str, value: impl fmt::Display) {
        debug_assert!(valid_key(key));
        self.fields.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

fn valid_key(k: &str) -> bool {
    !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn needs_quotes(v: &str) -> bool {
    v.is_empty() || v.chars().any(|c| c.is_whitespace() || matches!(c, '"' | '\\' | '='))
}

fn quote(v: &str) -> String {
    let mut s = String::with_capacity(v.len() + 2);
    s.push('"');
    for c in v.chars() {
        match c {
            '"' => s.push_str("\\\""),
            '\\' => s.push_str("\\\\"),
            '\t' => s.push_str("\\t"),
            '\n' => s.push_str("\\n"),
            '\r' => s.push_str("\\r"),
            c => s.push(c),
        }
    }
    s.push('"');
    s
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.fields.iter().enumerate() {
            if i > 0 {
                f.write_str("\t")?;
            }
            if needs_quotes(v) {
                write!(f, "{k}={}", quote(v))?;
            } else {
                write!(f, "{k}={v}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed record at byte {pos}: {msg}")]
pub struct RecordError {
    pub pos: usize,
    pub msg: &'static str,
}

/// Parses one record line (without the trailing newline).
pub fn parse_record(line: &str) -> Result<Record, RecordError> {
    let b: Vec<char> = line.chars().collect();
    let mut i = 0;
    let mut rec = Record::new();
    let err = |pos, msg| RecordError { pos, msg };
    if b.is_empty() {
        return Ok(rec);
    }
    loop {
        let start = i;
        while i < b.len() && b[i] != '=' {
            i += 1;
        }
        let key: String = b[start..i].iter().collect();
        if i == b.len() || !valid_key(&key) {
            return Err(err(start, "expected key="));
        }
        i += 1;
        let mut value = String::new();
        if i < b.len() && b[i] == '"' {
            i += 1;
            loop {
                match b.get(i) {
                    None => return Err(err(i, "unterminated quote")),
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => {
                        let c = match b.get(i + 1) {
                            Some('"') => '"',
                            Some('\\') => '\\',
                            Some('t') => '\t',
                            Some('n') => '\n',
                            Some('r') => '\r',
                            _ => return Err(err(i, "bad escape")),
                        };
                        value.push(c);
                        i += 2;
                    }
                    Some(&c) => {
                        value.push(c);
                        i += 1;
                    }
                }
            }
        } else {
            while i < b.len() && b[i] != '\t' {
                if matches!(b[i], '"' | '\\' | '=') || b[i].is_whitespace() {
                    return Err(err(i, "unquoted special character"));
                }
                value.push(b[i]);
                i += 1;
            }
            if value.is_empty() {
                return Err(err(i, "empty unquoted value"));
            }
        }
        rec.fields.push((key, value));
        match b.get(i) {
            None => return Ok(rec),
            Some('\t') => i += 1,
            Some(_) => return Err(err(i, "expected tab")),
        }
    }
}
