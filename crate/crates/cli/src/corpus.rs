//! Corpus files: ordered definitions `name = term;`, optionally followed by a
//! bare term without a trailing `;`.
//!
//! `@name` inside a body refers to another definition of the same file and is
//! inlined when the file is loaded. Names not defined in the file fall back to
//! the standard catalogue, and so does a definition's own name inside its
//! body (`add = @add 2 3;`). References must be acyclic and resolve to closed
//! terms.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::path::Path;

use lrec_core::pcf::{parse_pcf, programs, PcfTerm};
use lrec_core::stdlib::Catalog;
use lrec_core::syntax::{parse_term, ParseOptions};
use lrec_core::{Calculus, Term};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{line}:{col}: {message}")]
    Layout { line: usize, col: usize, message: String },
    #[error("in '{name}': {message}")]
    Definition { name: String, message: String },
    #[error("the file is empty")]
    Empty,
    #[error("no definition named '{0}'")]
    NoSuchEntry(String),
}

/// One `name = body;` item, or the trailing bare term (named `main`).
#[derive(Debug, Clone)]
pub struct Item {
    pub name: String,
    /// Byte range of the body in the file.
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone)]
pub struct Source {
    pub text: String,
    pub items: Vec<Item>,
}

/// What kind of file a path names, by extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Lrec,
    Llcim,
    Pcf,
}

impl Kind {
    pub fn of(path: &Path) -> Option<Kind> {
        match path.extension()?.to_str()? {
            "lrec" => Some(Kind::Lrec),
            "llcim" => Some(Kind::Llcim),
            "pcf" => Some(Kind::Pcf),
            _ => None,
        }
    }
}

pub fn read(path: &Path) -> Result<String, CorpusError> {
    std::fs::read_to_string(path).map_err(|e| CorpusError::Io { path: path.display().to_string(), message: e.to_string() })
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

/// Splits a file into items. `;` ends an item; `--` starts a comment.
pub fn split(text: &str) -> Result<Source, CorpusError> {
    let mut items = Vec::new();
    let mut chunk_start = 0;
    let mut chars = text.char_indices().peekable();
    let mut bounds = Vec::new();
    while let Some((i, c)) = chars.next() {
        match c {
            '-' if chars.peek().map(|&(_, c)| c) == Some('-') => {
                while chars.next_if(|&(_, c)| c != '\n').is_some() {}
            }
            ';' => {
                bounds.push((chunk_start, i, true));
                chunk_start = i + 1;
            }
            _ => {}
        }
    }
    bounds.push((chunk_start, text.len(), false));
    for (start, end, terminated) in bounds {
        let chunk = &text[start..end];
        let Some(body_at) = first_code(chunk) else {
            if terminated {
                let (line, col) = line_col(text, end);
                return Err(CorpusError::Layout { line, col, message: "empty definition".into() });
            }
            continue;
        };
        let head = &chunk[body_at..];
        match definition_head(head) {
            Some((name, skip)) => {
                if !terminated {
                    let (line, col) = line_col(text, start + body_at);
                    return Err(CorpusError::Layout { line, col, message: format!("definition '{name}' is missing its ';'") });
                }
                if items.iter().any(|it: &Item| it.name == name) {
                    let (line, col) = line_col(text, start + body_at);
                    return Err(CorpusError::Layout { line, col, message: format!("'{name}' is defined twice") });
                }
                items.push(Item { name, start: start + body_at + skip, end });
            }
            None if terminated => {
                let (line, col) = line_col(text, start + body_at);
                return Err(CorpusError::Layout { line, col, message: "expected 'name = term;'".into() });
            }
            None => items.push(Item { name: "main".into(), start: start + body_at, end }),
        }
    }
    if items.is_empty() {
        return Err(CorpusError::Empty);
    }
    Ok(Source { text: text.to_string(), items })
}

/// Offset of the first character that is neither blank nor in a comment.
fn first_code(chunk: &str) -> Option<usize> {
    let mut rest = chunk;
    let mut at = 0;
    loop {
        let trimmed = rest.trim_start();
        at += rest.len() - trimmed.len();
        if trimmed.is_empty() {
            return None;
        }
        if let Some(comment) = trimmed.strip_prefix("--") {
            let skip = comment.find('\n').map_or(comment.len(), |n| n + 1) + 2;
            at += skip;
            rest = &trimmed[skip..];
        } else {
            return Some(at);
        }
    }
}

/// `ident =` at the start of `s` (but not `==` or a keyword). Returns the
/// name and the length of the head.
fn definition_head(s: &str) -> Option<(String, usize)> {
    let mut end = 0;
    for (i, c) in s.char_indices() {
        let ok = if i == 0 { c.is_alphabetic() || c == '_' } else { c.is_alphanumeric() || c == '_' || c == '\'' };
        if !ok {
            break;
        }
        end = i + c.len_utf8();
    }
    if end == 0 {
        return None;
    }
    let name = &s[..end];
    if matches!(name, "let" | "rec" | "iter" | "min" | "fun" | "S") {
        return None;
    }
    let after = &s[end..];
    let eq = after.len() - after.trim_start().len();
    let after = after.trim_start();
    if after.starts_with('=') && !after.starts_with("==") {
        Some((name.to_string(), end + eq + 1))
    } else {
        None
    }
}

impl Source {
    /// The body of an item, padded so that positions in parse errors match
    /// the file.
    fn padded(&self, item: &Item) -> String {
        let mut s: String = self.text[..item.start].chars().map(|c| if c == '\n' { '\n' } else { ' ' }).collect();
        s.push_str(&self.text[item.start..item.end]);
        s
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(|i| i.name.as_str())
    }

    /// The item a single-term command acts on: `entry` if given, otherwise
    /// `main`, otherwise the last definition.
    pub fn subject(&self, entry: Option<&str>) -> Result<&Item, CorpusError> {
        match entry {
            Some(n) => self.items.iter().find(|i| i.name == n).ok_or_else(|| CorpusError::NoSuchEntry(n.into())),
            None => Ok(self.items.iter().find(|i| i.name == "main").unwrap_or_else(|| self.items.last().unwrap())),
        }
    }
}

/// Resolves definitions on demand, with cycle detection.
struct Loader<'s, T> {
    source: &'s Source,
    done: RefCell<BTreeMap<String, Result<T, String>>>,
    active: RefCell<Vec<String>>,
}

impl<'s, T: Clone> Loader<'s, T> {
    fn new(source: &'s Source) -> Self {
        Loader { source, done: RefCell::new(BTreeMap::new()), active: RefCell::new(Vec::new()) }
    }

    /// `Some` if `name` is defined in the file.
    fn get(&self, name: &str, parse: &dyn Fn(&str) -> Result<T, String>) -> Option<Result<T, String>> {
        let item = self.source.items.iter().find(|i| i.name == name)?;
        // inside its own definition a name means the catalogue entry
        if self.active.borrow().last().is_some_and(|n| n == name) {
            return None;
        }
        if let Some(r) = self.done.borrow().get(name) {
            return Some(r.clone());
        }
        if self.active.borrow().iter().any(|n| n == name) {
            let mut chain = self.active.borrow().clone();
            chain.push(name.to_string());
            return Some(Err(format!("cyclic reference {}", chain.join(" -> "))));
        }
        self.active.borrow_mut().push(name.to_string());
        let r = parse(&self.source.padded(item));
        self.active.borrow_mut().pop();
        self.done.borrow_mut().insert(name.to_string(), r.clone());
        Some(r)
    }
}

/// Loads every item of a λ-rec or minimiser-calculus file, in file order.
pub fn load_terms(source: &Source, calculus: Calculus) -> Vec<(String, Result<Term, String>)> {
    let loader: Loader<Term> = Loader::new(source);
    let catalog = Catalog::new(calculus);
    let opts = ParseOptions::for_calculus(calculus);
    fn parse_with(loader: &Loader<Term>, catalog: &Catalog, opts: &ParseOptions, text: &str) -> Result<Term, String> {
        let resolve = |name: &str, arg: Option<&str>| -> Result<Term, String> {
            if arg.is_none() {
                if let Some(r) = loader.get(name, &|t| parse_with(loader, catalog, opts, t)) {
                    return r.map_err(|e| format!("@{name}: {e}"));
                }
            }
            lrec_core::syntax::Resolve::resolve(catalog, name, arg)
        };
        parse_term(text, opts, &resolve).map_err(|e| e.to_string())
    }
    source
        .items
        .iter()
        .map(|item| {
            let r = loader.get(&item.name, &|t| parse_with(&loader, &catalog, &opts, t)).expect("item is defined");
            (item.name.clone(), r)
        })
        .collect()
}

/// Built-in PCF programs addressable as `@name` in `.pcf` files.
pub fn pcf_builtin(name: &str) -> Option<PcfTerm> {
    Some(match name {
        "rep" => programs::rep(),
        "add" => programs::add(),
        "mult" => programs::mult(),
        "fact" | "factorial" => programs::factorial(),
        "omega" => programs::omega(),
        _ => return None,
    })
}

/// Loads every item of a PCF file, in file order.
pub fn load_pcf(source: &Source) -> Vec<(String, Result<PcfTerm, String>)> {
    let loader: Loader<PcfTerm> = Loader::new(source);
    fn parse_with(loader: &Loader<PcfTerm>, text: &str) -> Result<PcfTerm, String> {
        let resolve = |name: &str, arg: Option<&str>| -> Result<PcfTerm, String> {
            if arg.is_some() {
                return Err(format!("@{name} takes no argument"));
            }
            if let Some(r) = loader.get(name, &|t| parse_with(loader, t)) {
                return r.map_err(|e| format!("@{name}: {e}"));
            }
            pcf_builtin(name).ok_or_else(|| format!("unknown reference @{name}"))
        };
        parse_pcf(text, &resolve).map_err(|e| e.to_string())
    }
    source
        .items
        .iter()
        .map(|item| (item.name.clone(), loader.get(&item.name, &|t| parse_with(&loader, t)).expect("item is defined")))
        .collect()
}

/// Loads one item, reporting failures as errors.
pub fn load_term(source: &Source, calculus: Calculus, entry: Option<&str>) -> Result<(String, Term), CorpusError> {
    let want = source.subject(entry)?.name.clone();
    let (name, r) = load_terms(source, calculus).into_iter().find(|(n, _)| *n == want).expect("subject exists");
    r.map(|t| (name.clone(), t)).map_err(|message| CorpusError::Definition { name, message })
}

pub fn load_pcf_term(source: &Source, entry: Option<&str>) -> Result<(String, PcfTerm), CorpusError> {
    let want = source.subject(entry)?.name.clone();
    let (name, r) = load_pcf(source).into_iter().find(|(n, _)| *n == want).expect("subject exists");
    r.map(|t| (name.clone(), t)).map_err(|message| CorpusError::Definition { name, message })
}

#[cfg(test)]
mod tests {
    use super::*;
    use lrec_core::eval::force_numeral;
    use lrec_core::pcf::pcf_eval;
    use lrec_core::Fuel;

    #[test]
    fn bare_term() {
        let s = split("-- identity\n\\x. x\n").unwrap();
        assert_eq!(s.names().collect::<Vec<_>>(), ["main"]);
        let (_, t) = load_term(&s, Calculus::Lrec, None).unwrap();
        assert_eq!(t.to_string(), "\\x. x");
    }

    #[test]
    fn definitions_and_references() {
        let s = split("two = S (S 0);\nfour = @add @two @two;\n-- a comment; with a semicolon\n").unwrap();
        assert_eq!(s.names().collect::<Vec<_>>(), ["two", "four"]);
        let (name, t) = load_term(&s, Calculus::Lrec, None).unwrap();
        assert_eq!(name, "four");
        assert_eq!(force_numeral(&t, &mut Fuel::new(10_000)).nat(), Some(4));
    }

    #[test]
    fn forward_references_and_cycles() {
        let s = split("a = @b; b = 0;").unwrap();
        assert!(load_terms(&s, Calculus::Lrec).iter().all(|(_, r)| r.is_ok()));
        let s = split("add = @add 1 2;").unwrap();
        assert!(load_terms(&s, Calculus::Lrec)[0].1.is_ok());
        let s = split("a = @b; b = @a;").unwrap();
        let errs = load_terms(&s, Calculus::Lrec);
        assert!(errs[0].1.as_ref().unwrap_err().contains("cyclic"), "{errs:?}");
    }

    #[test]
    fn layout_errors() {
        assert!(matches!(split("x = 0"), Err(CorpusError::Layout { .. })));
        assert!(matches!(split("x = 0; x = 1;"), Err(CorpusError::Layout { .. })));
        assert!(matches!(split(";"), Err(CorpusError::Layout { .. })));
        assert!(matches!(split("-- nothing\n"), Err(CorpusError::Empty)));
        // let is a keyword, not a definition
        let s = split("let <a, b> = <0, 0> in @erase[Nat] a b").unwrap();
        assert_eq!(s.items[0].name, "main");
    }

    #[test]
    fn positions_refer_to_the_file() {
        let s = split("ok = 0;\n\nbad = \\x. x x;").unwrap();
        let loaded = load_terms(&s, Calculus::Lrec);
        assert!(loaded[0].1.is_ok());
        assert!(loaded[1].1.as_ref().unwrap_err().contains("linearity"));
        let s = split("ok = 0;\n\nbad = (0;").unwrap();
        assert!(load_terms(&s, Calculus::Lrec)[1].1.as_ref().unwrap_err().starts_with("3:"));
    }

    #[test]
    fn pcf_files() {
        let s = split("three = 3;\nsix = @add @three @three;").unwrap();
        let (_, t) = load_pcf_term(&s, None).unwrap();
        assert_eq!(pcf_eval(&t, &mut Fuel::new(100_000)).nat(), Some(6));
    }
}
