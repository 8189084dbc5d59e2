//! Small expression language for polynomials and tensor polynomials.
//!
//! ```text
//! sum     := tensor (('+' | '-') tensor)*
//! tensor  := product ('⊗' product)*          ('&' is accepted for '⊗')
//! product := factor (('*' | '/')? factor)*    juxtaposition multiplies
//! factor  := '-' factor | atom ('^' uint)?
//! atom    := number | 'x' | 'x0' | 'x1' … | 'pi' | basis label | 'I(' sum ')' | '(' sum ')'
//! ```
//!
//! `xK` is the K-th real coordinate of the variable, so expressions using it are only evaluable,
//! not convertible to a [`NoncommPoly`]. Division requires a constant divisor.

use crate::algebra::{Algebra, Element};
use crate::calculus::{NoncommPoly, TensorPoly};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Basis(usize),
    X,
    Coord(usize),
    Conj(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Tensor(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Pi,
    Basis(usize),
    X,
    Coord(usize),
    Conj,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Tensor,
}

fn lex<T: Scalar>(src: &str, alg: &Algebra<T>) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut words: Vec<(String, Tok)> = vec![("pi".into(), Tok::Pi), ("π".into(), Tok::Pi), ("x".into(), Tok::X)];
    for (k, l) in alg.labels().iter().enumerate() {
        if l.chars().all(char::is_alphabetic) && !l.is_empty() {
            words.push((l.clone(), Tok::Basis(k)));
        }
    }
    words.sort_by_key(|(w, _)| std::cmp::Reverse(w.chars().count()));
    let mut out = vec![];
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '+' => Some(Tok::Plus),
            '-' | '−' => Some(Tok::Minus),
            '*' | '·' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '⊗' | '&' => Some(Tok::Tensor),
            _ => None,
        };
        if let Some(t) = simple {
            out.push(t);
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Num(s.parse().map_err(|_| Error::Parse(format!("bad number '{s}'")))?));
            continue;
        }
        if c == 'I' && chars.get(i + 1) == Some(&'(') {
            out.push(Tok::Conj);
            i += 1;
            continue;
        }
        if c == 'x' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
            let start = i + 1;
            i = start;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let k: usize = chars[start..i].iter().collect::<String>().parse().expect("digits");
            if k >= alg.dim() {
                return Err(Error::Parse(format!("coordinate x{k} out of range for dimension {}", alg.dim())));
            }
            out.push(Tok::Coord(k));
            continue;
        }
        let rest: String = chars[i..].iter().collect();
        match words.iter().find(|(w, _)| rest.starts_with(w.as_str())) {
            Some((w, t)) => {
                out.push(t.clone());
                i += w.chars().count();
            }
            None => return Err(Error::Parse(format!("unexpected '{c}' at position {i}"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        match self.next() {
            Some(ref got) if *got == t => Ok(()),
            got => Err(Error::Parse(format!("expected {t:?}, found {got:?}"))),
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut e = self.tensor()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    e = Expr::Add(Box::new(e), Box::new(self.tensor()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    e = Expr::Sub(Box::new(e), Box::new(self.tensor()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn tensor(&mut self) -> Result<Expr> {
        let mut parts = vec![self.product()?];
        while self.peek() == Some(&Tok::Tensor) {
            self.pos += 1;
            parts.push(self.product()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Expr::Tensor(parts) })
    }

    fn product(&mut self) -> Result<Expr> {
        let mut e = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    e = Expr::Mul(Box::new(e), Box::new(self.factor()?));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    e = Expr::Div(Box::new(e), Box::new(self.factor()?));
                }
                Some(Tok::Num(_) | Tok::Pi | Tok::Basis(_) | Tok::X | Tok::Coord(_) | Tok::Conj | Tok::LParen) => {
                    e = Expr::Mul(Box::new(e), Box::new(self.factor()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let a = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.next() {
                Some(Tok::Num(n)) if n >= 0.0 && n.fract() == 0.0 && n <= u32::MAX as f64 => return Ok(Expr::Pow(Box::new(a), n as u32)),
                got => return Err(Error::Parse(format!("exponent must be a non-negative integer, found {got:?}"))),
            }
        }
        Ok(a)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::Pi) => Ok(Expr::Pi),
            Some(Tok::Basis(k)) => Ok(Expr::Basis(k)),
            Some(Tok::X) => Ok(Expr::X),
            Some(Tok::Coord(k)) => Ok(Expr::Coord(k)),
            Some(Tok::Conj) => {
                self.expect(Tok::LParen)?;
                let e = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::Conj(Box::new(e)))
            }
            Some(Tok::LParen) => {
                let e = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            got => Err(Error::Parse(format!("unexpected token {got:?}"))),
        }
    }
}

pub fn parse_expr<T: Scalar>(src: &str, alg: &Algebra<T>) -> Result<Expr> {
    let toks = lex(src, alg)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0 };
    let e = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(e)
}

fn conj_slot<T: Scalar>(alg: &Algebra<T>) -> Result<crate::algebra::SlotMap> {
    alg.slot_map("I").map_err(|_| Error::Parse(format!("algebra '{}' has no basis map I", alg.name())))
}

impl Expr {
    pub fn depends_on_x(&self) -> bool {
        match self {
            Expr::X | Expr::Coord(_) => true,
            Expr::Num(_) | Expr::Pi | Expr::Basis(_) => false,
            Expr::Conj(e) | Expr::Neg(e) | Expr::Pow(e, _) => e.depends_on_x(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.depends_on_x() || b.depends_on_x(),
            Expr::Tensor(ps) => ps.iter().any(Expr::depends_on_x),
        }
    }

    pub fn is_tensor(&self) -> bool {
        match self {
            Expr::Tensor(_) => true,
            Expr::Add(a, b) | Expr::Sub(a, b) => a.is_tensor() || b.is_tensor(),
            Expr::Neg(e) => e.is_tensor(),
            _ => false,
        }
    }

    /// Value at `x`.
    pub fn eval<T: Scalar>(&self, alg: &Algebra<T>, x: &Element<T>) -> Result<Element<T>> {
        Ok(match self {
            Expr::Num(v) => Element::scalar(alg, T::lit(*v)),
            Expr::Pi => Element::scalar(alg, T::lit(std::f64::consts::PI)),
            Expr::Basis(k) => Element::basis(alg, *k),
            Expr::X => x.clone(),
            Expr::Coord(k) => Element::scalar(alg, x.coords()[*k]),
            Expr::Conj(e) => e.eval(alg, x)?.apply_slot(conj_slot(alg)?),
            Expr::Neg(e) => e.eval(alg, x)?.scale(-T::one()),
            Expr::Add(a, b) => &a.eval(alg, x)? + &b.eval(alg, x)?,
            Expr::Sub(a, b) => &a.eval(alg, x)? - &b.eval(alg, x)?,
            Expr::Mul(a, b) => &a.eval(alg, x)? * &b.eval(alg, x)?,
            Expr::Div(a, b) => &a.eval(alg, x)? * &b.eval(alg, x)?.inv()?,
            Expr::Pow(e, n) => e.eval(alg, x)?.pow(*n),
            Expr::Tensor(_) => return Err(Error::Parse("a tensor expression has no pointwise value".into())),
        })
    }

    /// Constant value, for expressions free of the variable.
    pub fn constant<T: Scalar>(&self, alg: &Algebra<T>) -> Result<Element<T>> {
        if self.depends_on_x() {
            return Err(Error::Parse("expected a constant".into()));
        }
        self.eval(alg, &Element::zero(alg))
    }

    pub fn to_poly<T: Scalar>(&self, alg: &Algebra<T>) -> Result<NoncommPoly<T>> {
        if !self.depends_on_x() {
            return Ok(NoncommPoly::constant(self.constant(alg)?));
        }
        Ok(match self {
            Expr::X => NoncommPoly::x(alg),
            Expr::Coord(_) => return Err(Error::Parse("coordinates x0, x1, … are not polynomial in x".into())),
            Expr::Conj(e) if **e == Expr::X => NoncommPoly::slot_var(alg, conj_slot(alg)?),
            Expr::Conj(_) => return Err(Error::Parse("I(…) applies to x or to constants".into())),
            Expr::Neg(e) => e.to_poly(alg)?.scale(-T::one()),
            Expr::Add(a, b) => a.to_poly(alg)?.add(&b.to_poly(alg)?),
            Expr::Sub(a, b) => a.to_poly(alg)?.sub(&b.to_poly(alg)?),
            Expr::Mul(a, b) => a.to_poly(alg)?.mul(&b.to_poly(alg)?),
            Expr::Div(a, b) => a.to_poly(alg)?.mul(&NoncommPoly::constant(b.constant(alg)?.inv()?)),
            Expr::Pow(e, n) => e.to_poly(alg)?.pow(*n),
            Expr::Tensor(_) => return Err(Error::Parse("'⊗' is only allowed between summands".into())),
            Expr::Num(_) | Expr::Pi | Expr::Basis(_) => unreachable!("constant"),
        }
        .compact())
    }

    /// Sum of `p₀ ⊗ p₁ ⊗ … ⊗ p_n` terms; a plain polynomial gives degree 0.
    pub fn to_tensor_poly<T: Scalar>(&self, alg: &Algebra<T>) -> Result<TensorPoly<T>> {
        match self {
            Expr::Add(a, b) => a.to_tensor_poly(alg)?.add(&b.to_tensor_poly(alg)?),
            Expr::Sub(a, b) => a.to_tensor_poly(alg)?.add(&b.to_tensor_poly(alg)?.scale(-T::one())),
            Expr::Neg(e) if e.is_tensor() => Ok(e.to_tensor_poly(alg)?.scale(-T::one())),
            Expr::Tensor(parts) => TensorPoly::simple(parts.iter().map(|p| p.to_poly(alg)).collect::<Result<_>>()?),
            e => TensorPoly::simple(vec![e.to_poly(alg)?]),
        }
    }
}

pub fn parse_poly<T: Scalar>(src: &str, alg: &Algebra<T>) -> Result<NoncommPoly<T>> {
    parse_expr(src, alg)?.to_poly(alg)
}

pub fn parse_tensor_poly<T: Scalar>(src: &str, alg: &Algebra<T>) -> Result<TensorPoly<T>> {
    parse_expr(src, alg)?.to_tensor_poly(alg)
}

/// Constant element, e.g. `1+i` or `pi/2*i`.
pub fn parse_element<T: Scalar>(src: &str, alg: &Algebra<T>) -> Result<Element<T>> {
    parse_expr(src, alg)?.constant(alg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{complex, quaternion};

    #[test]
    fn elements() {
        let qa = quaternion::<f64>();
        let e = parse_element("1+i - 2k", &qa).unwrap();
        assert_eq!(e.coords(), &[1.0, 1.0, 0.0, -2.0]);
        let e = parse_element("pi/2*i", &qa).unwrap();
        assert!((e.coords()[1] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(parse_element("ij", &qa).unwrap(), Element::basis(&qa, 3));
    }

    #[test]
    fn polynomials() {
        let qa = quaternion::<f64>();
        let p = parse_poly("x^3 - 2 i x j + (x)/2", &qa).unwrap();
        let x = Element::from_f64(&qa, &[0.3, -1.0, 0.5, 2.0]);
        let (i, j) = (Element::basis(&qa, 1), Element::basis(&qa, 2));
        let want = &(&x.pow(3) - &(&(&i * &x) * &j).scale(2.0)) + &x.scale(0.5);
        assert!(p.eval(&x).unwrap().approx_eq(&want, 1e-12));
    }

    #[test]
    fn tensors() {
        let qa = quaternion::<f64>();
        let t = parse_tensor_poly("1⊗x^2 + x⊗x + x^2&1", &qa).unwrap();
        assert_eq!(t.degree(), 1);
        let t2 = parse_tensor_poly("3⊗x^2", &qa).unwrap();
        let x = Element::from_f64(&qa, &[0.1, 0.2, 0.3, 0.4]);
        let a = Element::basis(&qa, 2);
        assert!(t2.apply_at(&x, std::slice::from_ref(&a)).unwrap().approx_eq(&(&a * &x.pow(2)).scale(3.0), 1e-14));
        assert!(t.apply_at(&x, &[a]).is_ok());
    }

    #[test]
    fn coordinates_and_conjugation() {
        let c = complex::<f64>();
        let e = parse_expr("3x0^2+6x0x1 i", &c).unwrap();
        let z = Element::from_f64(&c, &[2.0, -1.0]);
        assert_eq!(e.eval(&c, &z).unwrap().coords(), &[12.0, -12.0]);
        assert!(e.to_poly(&c).is_err());
        let p = parse_poly("x I(x)^2", &c).unwrap();
        let zb = Element::from_f64(&c, &[2.0, 1.0]);
        assert!(p.eval(&z).unwrap().approx_eq(&(&z * &(&zb * &zb)), 1e-14));
    }

    #[test]
    fn errors() {
        let qa = quaternion::<f64>();
        for bad in ["x^", "x +", "(x", "q", "x^-1", "", "x/x", "2(1⊗x)"] {
            assert!(matches!(parse_tensor_poly(bad, &qa), Err(Error::Parse(_)) | Err(Error::SingularElement)), "{bad}");
        }
    }
}
