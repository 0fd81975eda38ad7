use alloc::string::String;
use core::fmt::Write;

use super::{numeral_value, Term, TermKind};

/// Renders a term in the concrete syntax accepted by the parser.
pub fn pretty(t: &Term) -> String {
    let mut out = String::new();
    term(t, &mut out);
    out
}

fn term(t: &Term, out: &mut String) {
    match t.kind() {
        TermKind::Lam(..) => {
            out.push('\\');
            let mut t = t;
            let mut first = true;
            while let TermKind::Lam(x, b) = t.kind() {
                if !first {
                    out.push(' ');
                }
                out.push_str(x.as_str());
                first = false;
                t = b;
            }
            out.push_str(". ");
            term(t, out);
        }
        TermKind::LetPair(s, x, y, b) => {
            let _ = write!(out, "let <{x}, {y}> = ");
            term(s, out);
            out.push_str(" in ");
            term(b, out);
        }
        TermKind::App(..) => app(t, out),
        _ => atom(t, out),
    }
}

fn app(t: &Term, out: &mut String) {
    let mut spine = alloc::vec::Vec::new();
    let mut head = t;
    while let TermKind::App(f, a) = head.kind() {
        spine.push(a);
        head = f;
    }
    match head.kind() {
        TermKind::Lam(..) | TermKind::LetPair(..) => paren(head, out),
        _ => atom(head, out),
    }
    for a in spine.into_iter().rev() {
        out.push(' ');
        match a.kind() {
            TermKind::App(..) | TermKind::Lam(..) | TermKind::LetPair(..) => paren(a, out),
            TermKind::Suc(_) if numeral_value(a).is_none() => paren(a, out),
            _ => atom(a, out),
        }
    }
}

fn paren(t: &Term, out: &mut String) {
    out.push('(');
    term(t, out);
    out.push(')');
}

fn atom(t: &Term, out: &mut String) {
    match t.kind() {
        TermKind::Zero => out.push('0'),
        TermKind::Suc(b) => match numeral_value(t) {
            Some(n) => {
                let _ = write!(out, "{n}");
            }
            None => {
                out.push_str("S ");
                match b.kind() {
                    TermKind::Suc(_) if numeral_value(b).is_some() => atom(b, out),
                    TermKind::Suc(_) | TermKind::App(..) | TermKind::Lam(..) | TermKind::LetPair(..) => {
                        paren(b, out)
                    }
                    _ => atom(b, out),
                }
            }
        },
        TermKind::Var(x) => out.push_str(x.as_str()),
        TermKind::Pair(a, b) => {
            out.push('<');
            term(a, out);
            out.push_str(", ");
            term(b, out);
            out.push('>');
        }
        TermKind::Rec(..) => call("rec", t, out),
        TermKind::Iter(..) => call("iter", t, out),
        TermKind::Min(..) => call("min", t, out),
        TermKind::App(..) | TermKind::Lam(..) | TermKind::LetPair(..) => paren(t, out),
    }
}

fn call(name: &str, t: &Term, out: &mut String) {
    out.push_str(name);
    out.push('(');
    for (i, c) in t.children().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        term(c, out);
    }
    out.push(')');
}
