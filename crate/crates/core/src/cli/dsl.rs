//! Text syntax for tensor terms.
//!
//! ```text
//! expr    := ["-"] product (("+" | "-") product)*
//! product := factor ("*" factor)*
//! factor  := rational | atom
//! atom    := "T(" e "," e ")" | "R(" e "," e ";" e ")" | "nabla(" e ";" e ")"
//!          | "bracket(" e "," e ")" | "Tr_" k "(" e ")" | "X" k | "_" | "_" k
//!          | "(" expr ")" | extensions
//! ```
//!
//! `nabla(d; X_k)` is the covariant derivative of a field, `nabla(d; e)` for
//! a compound `e` the derivative of the tensor `e` with its arguments held
//! fixed. `_` is the slot bound by the innermost `Tr_k`, `_k` the one bound
//! by `Tr_k`. Extensions cover every term shape: `cov(d; e)`, `tnabla(d; e)`,
//! `symnabla(d_1, …; X_k)`, `Phi<id>(…)`, `subst(e, X_k := e)`,
//! `perm[i_1, …](e)`, the `…sym` variants for the symmetrized connection,
//! and `0`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph_space::bridge::TRACE_BASE;
use crate::jet_calculus::term::{self, Conn, TensorTerm};
use crate::perm_algebra::Permutation;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    start: usize,
    end: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Int(i) => format!("'{i}'"),
        Tok::Sym(s) => format!("'{s}'"),
        Tok::End => "end of input".into(),
    }
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(src[start..i].to_string()), start, end: i });
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let v = src[start..i].parse::<i64>().map_err(|_| Error::Parse {
                start,
                end: i,
                message: "integer out of range".into(),
                expected: vec![],
            })?;
            out.push(Token { tok: Tok::Int(v), start, end: i });
            continue;
        }
        if src[i..].starts_with(":=") {
            out.push(Token { tok: Tok::Sym(":="), start, end: i + 2 });
            i += 2;
            continue;
        }
        let sym = match c {
            '(' => "(",
            ')' => ")",
            '[' => "[",
            ']' => "]",
            ',' => ",",
            ';' => ";",
            '+' => "+",
            '-' => "-",
            '*' => "*",
            '/' => "/",
            _ => {
                return Err(Error::Parse {
                    start,
                    end: start + c.len_utf8(),
                    message: format!("unexpected character '{c}'"),
                    expected: vec![],
                })
            }
        };
        out.push(Token { tok: Tok::Sym(sym), start, end: i + 1 });
        i += 1;
    }
    out.push(Token { tok: Tok::End, start: src.len(), end: src.len() });
    Ok(out)
}

struct Parser<F: Scalar> {
    toks: Vec<Token>,
    pos: usize,
    traces: Vec<usize>,
    _f: std::marker::PhantomData<F>,
}

/// Arguments of a call, with the separator that preceded each one.
struct Args<F: Scalar> {
    items: Vec<TensorTerm<F>>,
    seps: Vec<&'static str>,
}

impl<F: Scalar> Parser<F> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl Into<String>, expected: &[&str]) -> Result<T> {
        let t = self.peek();
        Err(Error::Parse {
            start: t.start,
            end: t.end,
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn expect(&mut self, sym: &'static str) -> Result<()> {
        if self.peek().tok == Tok::Sym(sym) {
            self.bump();
            Ok(())
        } else {
            let found = describe(&self.peek().tok);
            self.fail(format!("found {found}"), &[sym])
        }
    }

    fn at(&self, sym: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(s) if *s == sym)
    }

    fn expr(&mut self) -> Result<TensorTerm<F>> {
        let mut terms = Vec::new();
        let mut sign = F::one();
        if self.at("-") {
            self.bump();
            sign = -F::one();
        }
        loop {
            let (c, t) = self.product()?;
            terms.push((sign.clone() * c, t));
            if self.at("+") {
                sign = F::one();
            } else if self.at("-") {
                sign = -F::one();
            } else {
                break;
            }
            self.bump();
        }
        if terms.len() == 1 && terms[0].0.is_one() {
            return Ok(terms.pop().unwrap().1);
        }
        Ok(term::combo(terms))
    }

    /// `(p/q)`, `(-p/q)` or a bare integer at the cursor.
    fn rational(&mut self) -> Option<F> {
        match (self.peek_at(0), self.peek_at(1), self.peek_at(2), self.peek_at(3), self.peek_at(4), self.peek_at(5)) {
            (Tok::Int(p), _, _, _, _, _) => {
                let v = F::int(*p);
                self.bump();
                Some(v)
            }
            (Tok::Sym("("), Tok::Int(p), Tok::Sym("/"), Tok::Int(q), Tok::Sym(")"), _) if *q != 0 => {
                let v = F::frac(*p, *q);
                for _ in 0..5 {
                    self.bump();
                }
                Some(v)
            }
            (Tok::Sym("("), Tok::Sym("-"), Tok::Int(p), Tok::Sym("/"), Tok::Int(q), Tok::Sym(")")) if *q != 0 => {
                let v = F::frac(-*p, *q);
                for _ in 0..6 {
                    self.bump();
                }
                Some(v)
            }
            _ => None,
        }
    }

    fn product(&mut self) -> Result<(F, TensorTerm<F>)> {
        let mut coeff = F::one();
        let mut factors: Vec<TensorTerm<F>> = Vec::new();
        loop {
            if let Some(c) = self.rational() {
                coeff = coeff * c;
            } else {
                factors.push(self.atom()?);
            }
            if !self.at("*") {
                break;
            }
            self.bump();
        }
        let Some(last) = factors.pop() else {
            if coeff.is_zero() {
                return Ok((F::one(), TensorTerm::LinearCombo(Vec::new())));
            }
            return self.fail("a bare number is not a term", &["term"]);
        };
        let t = factors.into_iter().rev().fold(last, |acc, s| term::scalar_mul(s, acc));
        Ok((coeff, t))
    }

    fn args(&mut self) -> Result<Args<F>> {
        self.expect("(")?;
        let mut items = vec![self.expr()?];
        let mut seps = vec![""];
        while self.at(",") || self.at(";") {
            let sep = if self.at(",") { "," } else { ";" };
            self.bump();
            items.push(self.expr()?);
            seps.push(sep);
        }
        if !self.at(")") {
            let found = describe(&self.peek().tok);
            return self.fail(format!("found {found}"), &[",", ";", ")", "+", "-", "*"]);
        }
        self.bump();
        Ok(Args { items, seps })
    }

    fn shape(&self, name: &str, args: &Args<F>, want: &[&str], start: usize) -> Result<()> {
        if args.seps != want {
            let pattern: String = want.iter().skip(1).fold("e".to_string(), |acc, s| format!("{acc}{s} e"));
            return Err(Error::Parse {
                start,
                end: self.toks[self.pos.saturating_sub(1)].end,
                message: format!("{name} takes arguments ({pattern}), got {}", args.items.len()),
                expected: vec![format!("{name}({pattern})")],
            });
        }
        Ok(())
    }

    fn index_of(name: &str, prefix: &str) -> Option<usize> {
        name.strip_prefix(prefix).filter(|r| !r.is_empty() && r.bytes().all(|b| b.is_ascii_digit())).and_then(|r| r.parse().ok())
    }

    fn atom(&mut self) -> Result<TensorTerm<F>> {
        let tok = self.peek().clone();
        let start = tok.start;
        match tok.tok {
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Tok::Ident(ref name) => {
                self.bump();
                self.named(name, start)
            }
            ref other => self.fail(format!("found {}", describe(other)), &["term", "'('", "X<k>"]),
        }
    }

    fn named(&mut self, name: &str, start: usize) -> Result<TensorTerm<F>> {
        if let Some(k) = Self::index_of(name, "X") {
            return Ok(term::x(k));
        }
        if name == "_" {
            return match self.traces.last() {
                Some(&s) => Ok(term::x(s)),
                None => Err(Error::Parse { start, end: start + 1, message: "'_' outside of a trace".into(), expected: vec![] }),
            };
        }
        if let Some(k) = Self::index_of(name, "_") {
            return Ok(term::x(TRACE_BASE + k));
        }
        if let Some(k) = Self::index_of(name, "Tr_") {
            let slot = TRACE_BASE + k;
            self.expect("(")?;
            self.traces.push(slot);
            let body = self.expr();
            self.traces.pop();
            let body = body?;
            self.expect(")")?;
            return term::trace(body, slot).map_err(|e| match e {
                Error::OrderZeroViolation { .. } => Error::Parse {
                    start,
                    end: self.toks[self.pos - 1].end,
                    message: format!("the slot traced by Tr_{k} is differentiated; a trace needs differential order 0 there"),
                    expected: vec![],
                },
                other => other,
            });
        }
        if let Some(id) = Self::index_of(name, "Phi") {
            if self.peek_at(1) == &Tok::Sym(")") {
                self.expect("(")?;
                self.expect(")")?;
                return Ok(term::generic(id, Vec::new()));
            }
            let a = self.args()?;
            if a.seps.iter().skip(1).any(|s| *s != ",") {
                return self.fail("Phi arguments are separated by ','", &[","]);
            }
            return Ok(term::generic(id, a.items));
        }
        let (base, conn) = match name.strip_suffix("sym") {
            Some(b) if !b.is_empty() => (b, Conn::Sym),
            _ => (name, Conn::Full),
        };
        match base {
            "T" if conn == Conn::Full => {
                let a = self.args()?;
                self.shape("T", &a, &["", ","], start)?;
                let mut it = a.items.into_iter();
                Ok(term::torsion(it.next().unwrap(), it.next().unwrap()))
            }
            "R" => {
                let a = self.args()?;
                self.shape(name, &a, &["", ",", ";"], start)?;
                let mut it = a.items.into_iter();
                Ok(term::curvature_with(conn, it.next().unwrap(), it.next().unwrap(), it.next().unwrap()))
            }
            "bracket" if conn == Conn::Full => {
                let a = self.args()?;
                self.shape("bracket", &a, &["", ","], start)?;
                let mut it = a.items.into_iter();
                Ok(term::bracket(it.next().unwrap(), it.next().unwrap()))
            }
            "nabla" | "cov" | "tnabla" => {
                let a = self.args()?;
                self.shape(name, &a, &["", ";"], start)?;
                let mut it = a.items.into_iter();
                let (d, e) = (it.next().unwrap(), it.next().unwrap());
                let field = base == "cov" || (base == "nabla" && matches!(e, TensorTerm::Slot(_)));
                Ok(if field { term::vnabla_with(conn, d, e) } else { term::tnabla_with(conn, d, e) })
            }
            "symnabla" => {
                let a = self.args()?;
                let n = a.items.len();
                if n < 2 || a.seps[n - 1] != ";" || a.seps[1..n - 1].iter().any(|s| *s != ",") {
                    return self.fail("symnabla takes (d_1, ..., d_k; e)", &["symnabla(e, ...; e)"]);
                }
                let mut items = a.items;
                let field = items.pop().unwrap();
                Ok(TensorTerm::SymNabla { conn, dirs: items, field: Box::new(field) })
            }
            "subst" if conn == Conn::Full => {
                self.expect("(")?;
                let outer = self.expr()?;
                self.expect(",")?;
                let slot = match self.bump().tok {
                    Tok::Ident(s) => Self::index_of(&s, "X"),
                    _ => None,
                };
                let Some(slot) = slot else {
                    self.pos -= 1;
                    return self.fail("expected the substituted slot", &["X<k>"]);
                };
                self.expect(":=")?;
                let inner = self.expr()?;
                self.expect(")")?;
                term::compose(outer, slot, inner)
            }
            "perm" if conn == Conn::Full => {
                self.expect("[")?;
                let mut images = Vec::new();
                loop {
                    match self.bump().tok {
                        Tok::Int(i) if i > 0 => images.push(i as usize),
                        _ => {
                            self.pos -= 1;
                            return self.fail("expected a positive image", &["integer"]);
                        }
                    }
                    if self.at("]") {
                        self.bump();
                        break;
                    }
                    self.expect(",")?;
                }
                let p = Permutation::new(&images).map_err(|e| Error::Parse {
                    start,
                    end: self.toks[self.pos - 1].end,
                    message: e.to_string(),
                    expected: vec![],
                })?;
                self.expect("(")?;
                let body = self.expr()?;
                self.expect(")")?;
                Ok(term::permute(body, p))
            }
            _ => Err(Error::Parse {
                start,
                end: start + name.len(),
                message: format!("unknown name '{name}'"),
                expected: ["T", "R", "nabla", "bracket", "Tr_<k>", "X<k>", "_"].iter().map(|s| s.to_string()).collect(),
            }),
        }
    }
}

/// Parses a term.
pub fn parse<F: Scalar>(src: &str) -> Result<TensorTerm<F>> {
    let mut p = Parser { toks: lex(src)?, pos: 0, traces: Vec::new(), _f: std::marker::PhantomData };
    let e = p.expr()?;
    if p.peek().tok != Tok::End {
        let found = describe(&p.peek().tok);
        return p.fail(format!("trailing input: {found}"), &["'+'", "'-'", "'*'", "end of input"]);
    }
    Ok(e)
}

struct Printer {
    traces: Vec<usize>,
}

impl Printer {
    fn trace_index(slot: usize) -> usize {
        if slot > TRACE_BASE {
            slot - TRACE_BASE
        } else {
            slot
        }
    }

    fn conn(conn: Conn) -> &'static str {
        match conn {
            Conn::Full => "",
            Conn::Sym => "sym",
        }
    }

    fn coeff<F: Scalar>(c: &F) -> String {
        let pq = c.to_pq();
        match pq.strip_suffix("/1") {
            Some(int) => int.to_string(),
            None => format!("({pq})"),
        }
    }

    fn term<F: Scalar>(&mut self, t: &TensorTerm<F>, out: &mut String) {
        use TensorTerm as T;
        match t {
            T::Slot(k) => {
                if self.traces.last() == Some(k) {
                    out.push('_');
                } else if self.traces.contains(k) {
                    let _ = write!(out, "_{}", Self::trace_index(*k));
                } else {
                    let _ = write!(out, "X{k}");
                }
            }
            T::Torsion(a, b) => self.call("T", &[a, b], &[","], out),
            T::Bracket(a, b) => self.call("bracket", &[a, b], &[","], out),
            T::Curvature { conn, a, b, c } => self.call(&format!("R{}", Self::conn(*conn)), &[a, b, c], &[",", ";"], out),
            T::CovDerivVF { conn, dir, arg } => {
                let name = if matches!(**arg, T::Slot(_)) { "nabla" } else { "cov" };
                self.call(&format!("{name}{}", Self::conn(*conn)), &[dir, arg], &[";"], out)
            }
            T::CovDerivTensor { conn, dir, body } => {
                let name = if matches!(**body, T::Slot(_)) { "tnabla" } else { "nabla" };
                self.call(&format!("{name}{}", Self::conn(*conn)), &[dir, body], &[";"], out)
            }
            T::Generic { id, args } => {
                let refs: Vec<&TensorTerm<F>> = args.iter().collect();
                let seps = vec![","; args.len().saturating_sub(1)];
                self.call(&format!("Phi{id}"), &refs, &seps, out)
            }
            T::SymNabla { conn, dirs, field } => {
                let mut refs: Vec<&TensorTerm<F>> = dirs.iter().collect();
                refs.push(field);
                let mut seps = vec![","; dirs.len().saturating_sub(1)];
                seps.push(";");
                self.call(&format!("symnabla{}", Self::conn(*conn)), &refs, &seps, out)
            }
            T::LinearCombo(v) => {
                if v.is_empty() {
                    out.push('0');
                }
                for (i, (c, t)) in v.iter().enumerate() {
                    let neg = c.to_pq().starts_with('-');
                    let mag = if neg { -c.clone() } else { c.clone() };
                    match (i, neg) {
                        (0, true) => out.push('-'),
                        (0, false) => {}
                        (_, true) => out.push_str(" - "),
                        (_, false) => out.push_str(" + "),
                    }
                    if !mag.is_one() {
                        out.push_str(&Self::coeff(&mag));
                        out.push_str(" * ");
                    }
                    self.factor(t, out);
                }
            }
            T::ScalarMul(s, v) => {
                self.factor(s, out);
                out.push_str(" * ");
                self.factor(v, out);
            }
            T::Trace { slot, body } => {
                let _ = write!(out, "Tr_{}(", Self::trace_index(*slot));
                self.traces.push(*slot);
                self.term(body, out);
                self.traces.pop();
                out.push(')');
            }
            T::Compose { slot, outer, inner } => {
                out.push_str("subst(");
                self.term(outer, out);
                let _ = write!(out, ", X{slot} := ");
                self.term(inner, out);
                out.push(')');
            }
            T::Permute { perm, body } => {
                let imgs: Vec<String> = perm.images_one_based().iter().map(|i| i.to_string()).collect();
                let _ = write!(out, "perm[{}](", imgs.join(", "));
                self.term(body, out);
                out.push(')');
            }
        }
    }

    /// A product operand: sums and products are parenthesized.
    fn factor<F: Scalar>(&mut self, t: &TensorTerm<F>, out: &mut String) {
        let wrap = matches!(t, TensorTerm::LinearCombo(v) if !v.is_empty()) || matches!(t, TensorTerm::ScalarMul(..));
        if wrap {
            out.push('(');
        }
        self.term(t, out);
        if wrap {
            out.push(')');
        }
    }

    fn call<F: Scalar>(&mut self, name: &str, args: &[&TensorTerm<F>], seps: &[&str], out: &mut String) {
        out.push_str(name);
        out.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                out.push_str(seps[i - 1]);
                out.push(' ');
            }
            self.term(a, out);
        }
        out.push(')');
    }
}

/// Canonical text of a term.
pub fn print<F: Scalar>(t: &TensorTerm<F>) -> String {
    let mut out = String::new();
    Printer { traces: Vec::new() }.term(t, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet_calculus::term::{curvature, torsion, tnabla, x};
    use crate::scalar::One;
    use crate::Q;

    #[test]
    fn nabla_of_torsion() {
        let t: TensorTerm<Q> = parse("nabla(X1; T(X2, X3))").unwrap();
        assert_eq!(t, tnabla(x(1), torsion(x(2), x(3))));
        assert_eq!(t.degree(), 3);
    }

    #[test]
    fn linear_combination() {
        let t: TensorTerm<Q> = parse("R(X1, X2; X3) + (1/2)*T(T(X1,X2), X3)").unwrap();
        let want = term::combo(vec![
            (Q::one(), curvature(x(1), x(2), x(3))),
            (Q::frac(1, 2), torsion(torsion(x(1), x(2)), x(3))),
        ]);
        assert_eq!(t, want);
    }

    #[test]
    fn trace_times_slot() {
        let t: TensorTerm<Q> = parse("Tr_1(nabla(_; X1)) * X2").unwrap();
        assert!(matches!(t, TensorTerm::ScalarMul(..)));
        assert_eq!(print(&t), "Tr_1(nabla(_; X1)) * X2");
    }

    #[test]
    fn trace_needs_order_zero() {
        match parse::<Q>("Tr_1(nabla(X1; _))") {
            Err(Error::Parse { start, end, .. }) => assert_eq!((start, end), (0, 18)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_spans() {
        match parse::<Q>("T(X1, X2") {
            Err(Error::Parse { start, expected, .. }) => {
                assert_eq!(start, 8);
                assert!(expected.contains(&")".to_string()));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse::<Q>("T(X1; X2)"), Err(Error::Parse { .. })));
        assert!(matches!(parse::<Q>("_"), Err(Error::Parse { .. })));
    }

    #[test]
    fn round_trips() {
        for src in [
            "nabla(X1; T(X2, X3))",
            "R(X1, X2; X3) - (1/2) * T(T(X1, X2), X3)",
            "Tr_1(nabla(_; X1)) * X2",
            "Tr_1(T(_, Tr_2(T(_, _1)) * X2)) * X1",
            "symnabla(X1, X2; X3) + cov(X1; nabla(X2; X3))",
            "Rsym(X1, X2; X3) - nablasym(X1; T(X2, X3))",
            "perm[2, 1](T(X1, X2)) + Phi0(X1, X2)",
            "subst(T(X1, X100), X100 := bracket(X2, X3))",
            "-3 * X1 + 0 * X2",
        ] {
            let t: TensorTerm<Q> = parse(src).unwrap();
            let again: TensorTerm<Q> = parse(&print(&t)).unwrap();
            assert_eq!(again, t, "{src} printed as {}", print(&t));
        }
    }
}
