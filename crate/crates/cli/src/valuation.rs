//! Reading valuations given on the command line, e.g. `x=1, y="a"`.

use htc_core::{DomainDecl, Valuation, Value, Var};

pub fn parse_valuation(text: &str, decl: &DomainDecl) -> Result<Valuation, String> {
    let mut v = decl.empty_valuation();
    let mut chars = text.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        if chars.peek().is_none() {
            break;
        }
        let name: String = chars.by_ref().take_while(|c| *c != '=').collect();
        let name = name.trim();
        if name.is_empty() {
            return Err(format!("missing variable name in `{text}`"));
        }
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        let value = if chars.peek() == Some(&'"') {
            chars.next();
            let mut s = String::new();
            loop {
                match chars.next() {
                    None => return Err(format!("unterminated string in `{text}`")),
                    Some('"') => break,
                    Some('\\') => match chars.next() {
                        Some('n') => s.push('\n'),
                        Some('t') => s.push('\t'),
                        Some(c @ ('"' | '\\')) => s.push(c),
                        _ => return Err(format!("bad escape in `{text}`")),
                    },
                    Some(c) => s.push(c),
                }
            }
            Value::Str(s)
        } else {
            let raw: String = chars
                .clone()
                .take_while(|c| *c != ',' && !c.is_whitespace())
                .collect();
            for _ in 0..raw.chars().count() {
                chars.next();
            }
            Value::Int(
                raw.parse()
                    .map_err(|_| format!("`{raw}` is neither an integer nor a string"))?,
            )
        };
        v.bind(Var::new(name), value).map_err(|e| e.to_string())?;
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        match chars.next() {
            None => break,
            Some(',') => {}
            Some(c) => return Err(format!("unexpected `{c}` in `{text}`")),
        }
    }
    Ok(v)
}
