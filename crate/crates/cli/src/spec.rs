//! The system description language.
//!
//! ```text
//! phi = shift(<const>) | dilation(<const>);
//! A = diag(<expr>, ...);
//! <option> = <integer>;
//! ```
//!
//! `#` starts a comment running to the end of the line. Options are
//! `window`, `index_bound`, `support` and `degree`.

use std::fmt;

use realpv_core::funcfield::{parse_constant, parse_ratfunc, Automorphism, ParseError};
use realpv_core::pv::{DiffSystem, RealSystem};
use realpv_core::{RatFunc, RealAlgebraic};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Syntax,
    Semantic,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Syntax => "syntax",
            ErrorKind::Semantic => "semantic",
        })
    }
}

/// A diagnostic with a 1-based line and column (in characters).
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {kind} error: {message}")]
pub struct SpecError {
    pub line: usize,
    pub column: usize,
    pub kind: ErrorKind,
    pub message: String,
}

/// Values set by option statements; unset ones fall back to the config.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecOptions {
    pub window: Option<usize>,
    pub index_bound: Option<i64>,
    pub support: Option<usize>,
    pub degree: Option<i64>,
}

const OPTION_NAMES: [&str; 4] = ["window", "index_bound", "support", "degree"];

#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub phi: Automorphism<RealAlgebraic>,
    pub entries: Vec<RatFunc>,
    pub options: SpecOptions,
}

impl SystemSpec {
    pub fn system(&self) -> RealSystem {
        DiffSystem::new(self.phi.clone(), self.entries.clone()).expect("entries checked nonzero")
    }
}

/// The canonical form: one statement per line, `phi`, `A`, then the set
/// options in a fixed order.
impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "phi = {};", self.phi)?;
        let entries: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        writeln!(f, "A = diag({});", entries.join(", "))?;
        let o = &self.options;
        let values = [
            o.window.map(|v| v as i64),
            o.index_bound,
            o.support.map(|v| v as i64),
            o.degree,
        ];
        for (name, v) in OPTION_NAMES.iter().zip(values) {
            if let Some(v) = v {
                writeln!(f, "{name} = {v};")?;
            }
        }
        Ok(())
    }
}

struct Source<'a> {
    text: &'a str,
}

impl Source<'_> {
    fn error(&self, offset: usize, kind: ErrorKind, message: impl Into<String>) -> SpecError {
        let offset = offset.min(self.text.len());
        let before = &self.text[..offset];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        let column = self.text[line_start..offset].chars().count() + 1;
        SpecError {
            line,
            column,
            kind,
            message: message.into(),
        }
    }

    fn syntax(&self, offset: usize, message: impl Into<String>) -> SpecError {
        self.error(offset, ErrorKind::Syntax, message)
    }

    fn semantic(&self, offset: usize, message: impl Into<String>) -> SpecError {
        self.error(offset, ErrorKind::Semantic, message)
    }

    fn expr_error(&self, base: usize, e: ParseError) -> SpecError {
        self.syntax(base + e.offset, e.message)
    }
}

/// A slice of the source with its absolute offset.
#[derive(Clone, Copy)]
struct Span<'a> {
    text: &'a str,
    at: usize,
}

impl<'a> Span<'a> {
    fn trim(self) -> Span<'a> {
        let lead = self.text.len() - self.text.trim_start().len();
        Span {
            text: self.text.trim(),
            at: self.at + lead,
        }
    }

    fn slice(self, from: usize, to: usize) -> Span<'a> {
        Span {
            text: &self.text[from..to],
            at: self.at + from,
        }
    }
}

/// Splits at `sep` outside brackets; returns the pieces and, for each
/// unbalanced closing bracket, its offset.
fn split_top(span: Span<'_>, sep: char) -> Result<Vec<Span<'_>>, usize> {
    let mut depth = 0i32;
    let mut pieces = Vec::new();
    let mut start = 0;
    for (i, c) in span.text.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(span.at + i);
                }
            }
            c if c == sep && depth == 0 => {
                pieces.push(span.slice(start, i));
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    pieces.push(span.slice(start, span.text.len()));
    Ok(pieces)
}

/// `name(inner)` with nothing after the closing parenthesis.
fn call<'a>(src: &Source<'_>, span: Span<'a>) -> Result<(&'a str, Span<'a>), SpecError> {
    let open = span
        .text
        .find('(')
        .ok_or_else(|| src.syntax(span.at, format!("expected a call, found '{}'", span.text)))?;
    let name = span.text[..open].trim();
    if !span.text.ends_with(')') {
        return Err(src.syntax(span.at + span.text.len(), "expected ')'"));
    }
    Ok((name, span.slice(open + 1, span.text.len() - 1)))
}

fn blank_comments(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut in_comment = false;
    for c in text.chars() {
        if c == '#' {
            in_comment = true;
        } else if c == '\n' {
            in_comment = false;
        }
        if in_comment {
            out.extend(std::iter::repeat_n(' ', c.len_utf8()));
        } else {
            out.push(c);
        }
    }
    out
}

pub fn parse_spec(text: &str) -> Result<SystemSpec, SpecError> {
    let src = Source { text };
    let clean = blank_comments(text);
    let whole = Span { text: &clean, at: 0 };
    let statements = split_top(whole, ';').map_err(|at| src.syntax(at, "unbalanced ')'"))?;
    let (last, body) = statements.split_last().unwrap();
    let tail = last.trim();
    if !tail.text.is_empty() {
        return Err(src.syntax(tail.at + tail.text.len(), "expected ';' after statement"));
    }
    let mut phi: Option<Automorphism<RealAlgebraic>> = None;
    let mut entries: Option<Vec<RatFunc>> = None;
    let mut options = SpecOptions::default();
    for st in body {
        let st = st.trim();
        if st.text.is_empty() {
            continue;
        }
        let eq = st
            .text
            .find('=')
            .ok_or_else(|| src.syntax(st.at, "expected '<name> = <value>'"))?;
        let name = st.slice(0, eq).trim();
        let value = st.slice(eq + 1, st.text.len()).trim();
        if value.text.is_empty() {
            return Err(src.syntax(st.at + eq + 1, "missing value after '='"));
        }
        match name.text {
            "phi" => {
                if phi.is_some() {
                    return Err(src.semantic(name.at, "phi is set twice"));
                }
                phi = Some(parse_phi(&src, value)?);
            }
            "A" => {
                if entries.is_some() {
                    return Err(src.semantic(name.at, "A is set twice"));
                }
                entries = Some(parse_diag(&src, value)?);
            }
            other if OPTION_NAMES.contains(&other) => {
                let v: i64 = value.text.parse().map_err(|_| {
                    src.syntax(value.at, format!("expected an integer, found '{}'", value.text))
                })?;
                if v <= 0 {
                    return Err(src.semantic(value.at, format!("{other} must be positive")));
                }
                let slot_set = match other {
                    "window" => options.window.replace(v as usize).is_some(),
                    "index_bound" => options.index_bound.replace(v).is_some(),
                    "support" => options.support.replace(v as usize).is_some(),
                    _ => options.degree.replace(v).is_some(),
                };
                if slot_set {
                    return Err(src.semantic(name.at, format!("{other} is set twice")));
                }
            }
            "" => return Err(src.syntax(name.at, "missing name before '='")),
            other => {
                return Err(src.semantic(name.at, format!("unknown statement '{other}'")));
            }
        }
    }
    let end = text.len();
    let phi = phi.ok_or_else(|| src.semantic(end, "missing 'phi = ...;' statement"))?;
    let entries = entries.ok_or_else(|| src.semantic(end, "missing 'A = diag(...);' statement"))?;
    Ok(SystemSpec {
        phi,
        entries,
        options,
    })
}

fn parse_phi(src: &Source<'_>, value: Span<'_>) -> Result<Automorphism<RealAlgebraic>, SpecError> {
    let (kind, inner) = call(src, value)?;
    let inner = inner.trim();
    let c = parse_constant(inner.text).map_err(|e| src.expr_error(inner.at, e))?;
    match kind {
        "shift" => {
            Automorphism::shift(c).map_err(|_| src.semantic(inner.at, "shift step must be nonzero"))
        }
        "dilation" => Automorphism::dilation(c)
            .map_err(|_| src.semantic(inner.at, "dilation factor must not be 0, 1 or -1")),
        other => Err(src.syntax(
            value.at,
            format!("expected shift(...) or dilation(...), found '{other}'"),
        )),
    }
}

fn parse_diag(src: &Source<'_>, value: Span<'_>) -> Result<Vec<RatFunc>, SpecError> {
    let (kind, inner) = call(src, value)?;
    if kind != "diag" {
        return Err(src.syntax(value.at, format!("expected diag(...), found '{kind}'")));
    }
    let args = split_top(inner, ',').map_err(|at| src.syntax(at, "unbalanced ')'"))?;
    let mut out = Vec::with_capacity(args.len());
    for arg in args {
        let arg = arg.trim();
        if arg.text.is_empty() {
            return Err(src.syntax(arg.at, "empty diagonal entry"));
        }
        let f = parse_ratfunc(arg.text).map_err(|e| src.expr_error(arg.at, e))?;
        if f == RatFunc::from_i64(0) {
            return Err(src.semantic(arg.at, "diagonal entry must be nonzero"));
        }
        out.push(f);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ex1() {
        let s = parse_spec("phi = dilation(2); A = diag(algebraic([−2,0,1],1,2));").unwrap();
        assert_eq!(s.phi.to_string(), "dilation(2)");
        let a = &s.entries[0];
        assert_eq!(a * a, RatFunc::from_i64(2));
    }

    #[test]
    fn trivial_system_and_options() {
        let s = parse_spec("phi = shift(1);\nA = diag(1); # identity\nwindow = 10;").unwrap();
        assert_eq!(s.entries, vec![RatFunc::from_i64(1)]);
        assert_eq!(s.options.window, Some(10));
        assert_eq!(s.to_string(), "phi = shift(1);\nA = diag(1);\nwindow = 10;\n");
    }

    #[test]
    fn zero_entry_is_semantic() {
        let e = parse_spec("A = diag(0);").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Semantic);
        assert_eq!(e.message, "diagonal entry must be nonzero");
        assert_eq!((e.line, e.column), (1, 10));
    }

    #[test]
    fn unit_dilation_is_semantic() {
        let e = parse_spec("phi = dilation(-1);\nA = diag(x);").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Semantic);
        assert!(e.message.contains("dilation factor"));
    }

    #[test]
    fn positions_point_into_expressions() {
        let e = parse_spec("phi = shift(1);\nA = diag(x, x + * 2);").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Syntax);
        assert_eq!((e.line, e.column), (2, 17));
        let e = parse_spec("phi = shift(1);\nA = diag(x)").unwrap_err();
        assert_eq!(e.message, "expected ';' after statement");
        assert_eq!((e.line, e.column), (2, 12));
        let e = parse_spec("phi = rotate(2);").unwrap_err();
        assert_eq!((e.line, e.column), (1, 7));
    }

    #[test]
    fn missing_statements() {
        let e = parse_spec("phi = shift(1);").unwrap_err();
        assert!(e.message.contains("A = diag"));
        let e = parse_spec("phi = shift(1); phi = shift(2); A = diag(1);").unwrap_err();
        assert_eq!(e.message, "phi is set twice");
        let e = parse_spec("phi = shift(1); A = diag(1); speed = 3;").unwrap_err();
        assert_eq!(e.message, "unknown statement 'speed'");
    }
}
