//! Membership certificates: expression DAGs over generator names, brackets
//! and `Q[n]`-linear combinations, with a line-oriented text form.
//!
//! ```text
//! #0 = "c"
//! #1 = "d"
//! #2 = (bracket #0 #1)
//! #3 = (comb "2" ("1" #2) ("-n" #0))
//! root = #3
//! ```
//!
//! A `comb` node stands for `(Σ coef_i · child_i) / den`. Nested
//! expressions are accepted anywhere a `#k` reference is.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::parse_npoly;
use crate::npoly::NPoly;

#[derive(Debug, PartialEq, Eq)]
pub enum Certificate {
    Leaf(String),
    Bracket(Arc<Certificate>, Arc<Certificate>),
    Combination { terms: Vec<(NPoly, Arc<Certificate>)>, denominator: NPoly },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("reference #{0} is used before it is defined")]
    Undefined(usize),
    #[error("no `root = ...` line")]
    NoRoot,
}

impl Certificate {
    pub fn leaf(name: &str) -> Arc<Certificate> {
        Arc::new(Certificate::Leaf(name.to_string()))
    }

    pub fn bracket(a: &Arc<Certificate>, b: &Arc<Certificate>) -> Arc<Certificate> {
        Arc::new(Certificate::Bracket(a.clone(), b.clone()))
    }

    pub fn combination(terms: Vec<(NPoly, Arc<Certificate>)>, denominator: NPoly) -> Arc<Certificate> {
        Arc::new(Certificate::Combination { terms, denominator })
    }

    fn children(&self) -> Vec<&Arc<Certificate>> {
        match self {
            Certificate::Leaf(_) => Vec::new(),
            Certificate::Bracket(a, b) => vec![a, b],
            Certificate::Combination { terms, .. } => terms.iter().map(|(_, c)| c).collect(),
        }
    }

    /// Number of distinct nodes.
    pub fn node_count(self: &Arc<Self>) -> usize {
        topological(self).len()
    }

    /// Number of bracket nodes along the deepest path.
    pub fn bracket_depth(self: &Arc<Self>) -> usize {
        let order = topological(self);
        let mut depth: HashMap<*const Certificate, usize> = HashMap::new();
        for node in &order {
            let below = node.children().iter().map(|c| depth[&Arc::as_ptr(c)]).max().unwrap_or(0);
            let d = if matches!(**node, Certificate::Bracket(..)) { below + 1 } else { below };
            depth.insert(Arc::as_ptr(node), d);
        }
        depth[&Arc::as_ptr(self)]
    }

    /// Generator names used, sorted and deduplicated.
    pub fn leaves(self: &Arc<Self>) -> Vec<String> {
        let mut out: Vec<String> = topological(self)
            .into_iter()
            .filter_map(|n| match &*n {
                Certificate::Leaf(s) => Some(s.clone()),
                _ => None,
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Line form with one node per line, children first.
    pub fn to_text(self: &Arc<Self>) -> String {
        let order = topological(self);
        let ids: HashMap<*const Certificate, usize> =
            order.iter().enumerate().map(|(i, n)| (Arc::as_ptr(n), i)).collect();
        let r = |c: &Arc<Certificate>| format!("#{}", ids[&Arc::as_ptr(c)]);
        let mut out = String::new();
        for (i, node) in order.iter().enumerate() {
            let body = match &**node {
                Certificate::Leaf(name) => quote(name),
                Certificate::Bracket(a, b) => format!("(bracket {} {})", r(a), r(b)),
                Certificate::Combination { terms, denominator } => {
                    let mut s = format!("(comb {}", quote(&denominator.to_string()));
                    for (c, child) in terms {
                        let _ = write!(s, " ({} {})", quote(&c.to_string()), r(child));
                    }
                    s.push(')');
                    s
                }
            };
            let _ = writeln!(out, "#{i} = {body}");
        }
        let _ = writeln!(out, "root = #{}", order.len() - 1);
        out
    }

    /// Nested single-line form; shared nodes are written out each time, so
    /// this is only meant for small certificates.
    pub fn to_inline(&self) -> String {
        match self {
            Certificate::Leaf(name) => quote(name),
            Certificate::Bracket(a, b) => format!("(bracket {} {})", a.to_inline(), b.to_inline()),
            Certificate::Combination { terms, denominator } => {
                let mut s = format!("(comb {}", quote(&denominator.to_string()));
                for (c, child) in terms {
                    let _ = write!(s, " ({} {})", quote(&c.to_string()), child.to_inline());
                }
                s.push(')');
                s
            }
        }
    }

    /// Parses the line form produced by [`Certificate::to_text`]; a single
    /// nested expression without `#k =` lines is accepted as well.
    pub fn parse(text: &str) -> Result<Arc<Certificate>, CertParseError> {
        let mut defs: HashMap<usize, Arc<Certificate>> = HashMap::new();
        let mut root = None;
        let mut bare = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let line_no = lineno + 1;
            if line.is_empty() || line.starts_with("//") {
                continue;
            }
            let err = |msg: String| CertParseError::Syntax { line: line_no, msg };
            if let Some((lhs, rhs)) = split_definition(line) {
                let value = parse_node(rhs, &defs).map_err(|e| e.into_error(line_no))?;
                if lhs == "root" {
                    root = Some(value);
                } else {
                    let id = lhs
                        .strip_prefix('#')
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| err(format!("bad label `{lhs}`")))?;
                    defs.insert(id, value);
                }
            } else if bare.is_none() {
                bare = Some(parse_node(line, &defs).map_err(|e| e.into_error(line_no))?);
            } else {
                return Err(err("more than one bare expression".into()));
            }
        }
        root.or(bare).ok_or(CertParseError::NoRoot)
    }
}

fn quote(s: &str) -> String {
    format!("\"{s}\"")
}

fn split_definition(line: &str) -> Option<(&str, &str)> {
    if line.starts_with('"') || line.starts_with('(') {
        return None;
    }
    let (lhs, rhs) = line.split_once('=')?;
    Some((lhs.trim(), rhs.trim()))
}

/// Children-first ordering of the distinct nodes; the root comes last.
fn topological(root: &Arc<Certificate>) -> Vec<Arc<Certificate>> {
    let mut seen: HashMap<*const Certificate, ()> = HashMap::new();
    let mut out = Vec::new();
    let mut stack: Vec<(Arc<Certificate>, bool)> = vec![(root.clone(), false)];
    while let Some((node, expanded)) = stack.pop() {
        let key = Arc::as_ptr(&node);
        if seen.contains_key(&key) {
            continue;
        }
        if expanded {
            seen.insert(key, ());
            out.push(node);
        } else {
            stack.push((node.clone(), true));
            for c in node.children().into_iter().rev() {
                if !seen.contains_key(&Arc::as_ptr(c)) {
                    stack.push((c.clone(), false));
                }
            }
        }
    }
    out
}

enum NodeError {
    Syntax(String),
    Undefined(usize),
}

impl NodeError {
    fn into_error(self, line: usize) -> CertParseError {
        match self {
            NodeError::Syntax(msg) => CertParseError::Syntax { line, msg },
            NodeError::Undefined(k) => CertParseError::Undefined(k),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum STok {
    Open,
    Close,
    Str(String),
    Ref(usize),
    Sym(String),
}

fn stokenize(s: &str) -> Result<Vec<STok>, NodeError> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                out.push(STok::Open);
            }
            ')' => {
                chars.next();
                out.push(STok::Close);
            }
            '"' => {
                chars.next();
                let mut lit = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some(ch) => lit.push(ch),
                        None => return Err(NodeError::Syntax("unterminated string".into())),
                    }
                }
                out.push(STok::Str(lit));
            }
            '#' => {
                chars.next();
                let mut digits = String::new();
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    digits.push(*d);
                    chars.next();
                }
                let k = digits.parse().map_err(|_| NodeError::Syntax("bad reference".into()))?;
                out.push(STok::Ref(k));
            }
            _ => {
                let mut sym = String::new();
                while let Some(ch) = chars.peek().filter(|ch| ch.is_alphanumeric() || **ch == '_') {
                    sym.push(*ch);
                    chars.next();
                }
                if sym.is_empty() {
                    return Err(NodeError::Syntax(format!("unexpected character `{c}`")));
                }
                out.push(STok::Sym(sym));
            }
        }
    }
    Ok(out)
}

fn parse_node(s: &str, defs: &HashMap<usize, Arc<Certificate>>) -> Result<Arc<Certificate>, NodeError> {
    let toks = stokenize(s)?;
    let mut pos = 0;
    let node = parse_stok(&toks, &mut pos, defs)?;
    if pos != toks.len() {
        return Err(NodeError::Syntax("trailing input".into()));
    }
    Ok(node)
}

fn coefficient(s: &str) -> Result<NPoly, NodeError> {
    parse_npoly(s).map_err(|e| NodeError::Syntax(format!("bad coefficient `{s}`: {e}")))
}

fn parse_stok(
    toks: &[STok],
    pos: &mut usize,
    defs: &HashMap<usize, Arc<Certificate>>,
) -> Result<Arc<Certificate>, NodeError> {
    let tok = toks.get(*pos).ok_or_else(|| NodeError::Syntax("unexpected end of input".into()))?;
    *pos += 1;
    match tok {
        STok::Str(name) => Ok(Certificate::leaf(name)),
        STok::Ref(k) => defs.get(k).cloned().ok_or(NodeError::Undefined(*k)),
        STok::Open => {
            let head = match toks.get(*pos) {
                Some(STok::Sym(h)) => h.clone(),
                _ => return Err(NodeError::Syntax("expected `bracket` or `comb`".into())),
            };
            *pos += 1;
            let node = match head.as_str() {
                "bracket" => {
                    let a = parse_stok(toks, pos, defs)?;
                    let b = parse_stok(toks, pos, defs)?;
                    Certificate::bracket(&a, &b)
                }
                "comb" => {
                    let den = match toks.get(*pos) {
                        Some(STok::Str(d)) => coefficient(d)?,
                        _ => return Err(NodeError::Syntax("expected quoted denominator".into())),
                    };
                    *pos += 1;
                    let mut terms = Vec::new();
                    while toks.get(*pos) == Some(&STok::Open) {
                        *pos += 1;
                        let c = match toks.get(*pos) {
                            Some(STok::Str(c)) => coefficient(c)?,
                            _ => return Err(NodeError::Syntax("expected quoted coefficient".into())),
                        };
                        *pos += 1;
                        let child = parse_stok(toks, pos, defs)?;
                        if toks.get(*pos) != Some(&STok::Close) {
                            return Err(NodeError::Syntax("expected `)` after term".into()));
                        }
                        *pos += 1;
                        terms.push((c, child));
                    }
                    if den.is_zero() {
                        return Err(NodeError::Syntax("zero denominator".into()));
                    }
                    Certificate::combination(terms, den)
                }
                other => return Err(NodeError::Syntax(format!("unknown node `{other}`"))),
            };
            if toks.get(*pos) != Some(&STok::Close) {
                return Err(NodeError::Syntax("expected `)`".into()));
            }
            *pos += 1;
            Ok(node)
        }
        other => Err(NodeError::Syntax(format!("unexpected {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip_preserves_sharing() {
        let c = Certificate::leaf("c");
        let d = Certificate::leaf("d");
        let e = Certificate::bracket(&c, &d);
        let top = Certificate::combination(vec![(NPoly::one(), e.clone()), (-NPoly::n(), c.clone())], NPoly::from_int(2));
        let outer = Certificate::bracket(&top, &e);
        let text = outer.to_text();
        assert_eq!(outer.node_count(), 5);
        let back = Certificate::parse(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back, outer);
        assert_eq!(outer.bracket_depth(), 2);
        assert_eq!(outer.leaves(), vec!["c".to_string(), "d".to_string()]);
    }

    #[test]
    fn inline_form_parses() {
        let cert = Certificate::parse("(bracket \"tr(X^3)\" (bracket \"tr(Y^2)\" \"tr(Y)\"))").unwrap();
        assert_eq!(cert.to_inline(), "(bracket \"tr(X^3)\" (bracket \"tr(Y^2)\" \"tr(Y)\"))");
    }

    #[test]
    fn errors_are_reported() {
        assert!(matches!(Certificate::parse("root = #4"), Err(CertParseError::Undefined(4))));
        assert!(matches!(Certificate::parse("(bracket \"a\""), Err(CertParseError::Syntax { line: 1, .. })));
        assert!(matches!(Certificate::parse(""), Err(CertParseError::NoRoot)));
        assert!(Certificate::parse("(comb \"0\" (\"1\" \"a\"))").is_err());
    }
}
