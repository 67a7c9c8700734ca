//! Exact multivariate polynomials over the rationals with an even
//! positive grading, plus ring homomorphisms given on generators.
//!
//! Monomials are exponent vectors against a fixed [`RingSignature`];
//! the cohomological degree of a monomial is the sum of exponent times
//! generator degree. Polynomials never store zero coefficients, so
//! structural equality is mathematical equality. The ASCII grammar is
//! `3/2*x^2*y - y^3`: rational coefficients, explicit `*`, `^` powers.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

/// Ordered list of generators with even degrees `>= 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingSignature {
    vars: Vec<(String, u32)>,
}

impl RingSignature {
    pub fn new(vars: Vec<(impl Into<String>, u32)>) -> Result<Arc<Self>> {
        let vars: Vec<(String, u32)> = vars.into_iter().map(|(n, d)| (n.into(), d)).collect();
        for (name, degree) in &vars {
            if *degree < 2 || degree % 2 != 0 {
                return Err(Error::invalid(format!(
                    "generator `{name}` has degree {degree}; degrees must be even and >= 2"
                )));
            }
            if !is_valid_ident(name) {
                return Err(Error::invalid(format!("bad generator name `{name}`")));
            }
        }
        for i in 0..vars.len() {
            for j in i + 1..vars.len() {
                if vars[i].0 == vars[j].0 {
                    return Err(Error::invalid(format!("duplicate generator `{}`", vars[i].0)));
                }
            }
        }
        Ok(Arc::new(RingSignature { vars }))
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.vars[i].0
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.vars[i].1
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|(n, _)| n == name)
    }

    /// Cohomological degree of an exponent vector.
    pub fn monomial_degree(&self, expo: &[u32]) -> u32 {
        expo.iter()
            .zip(&self.vars)
            .map(|(e, (_, d))| e * d)
            .sum()
    }

    /// All exponent vectors of the given degree, in ascending
    /// variable-precedence lex order.
    pub fn monomials_of_degree(&self, d: u32) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut current = vec![0u32; self.arity()];
        self.enumerate(0, d, &mut current, &mut out);
        out.sort();
        out
    }

    fn enumerate(&self, i: usize, remaining: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == self.arity() {
            if remaining == 0 {
                out.push(current.clone());
            }
            return;
        }
        let step = self.vars[i].1;
        let max = remaining / step;
        for e in 0..=max {
            current[i] = e;
            self.enumerate(i + 1, remaining - e * step, current, out);
        }
        current[i] = 0;
    }
}

fn is_valid_ident(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn same_signature(a: &Arc<RingSignature>, b: &Arc<RingSignature>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Divisibility of exponent vectors.
pub fn monomial_divides(divisor: &[u32], multiple: &[u32]) -> bool {
    divisor.iter().zip(multiple).all(|(a, b)| a <= b)
}

/// Graded polynomial: a map from exponent vectors to nonzero rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPolynomial {
    sig: Arc<RingSignature>,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl GradedPolynomial {
    pub fn zero(sig: &Arc<RingSignature>) -> Self {
        GradedPolynomial {
            sig: Arc::clone(sig),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(sig: &Arc<RingSignature>, c: Rational) -> Self {
        let mut p = Self::zero(sig);
        if !c.is_zero() {
            p.terms.insert(vec![0; sig.arity()], c);
        }
        p
    }

    pub fn one(sig: &Arc<RingSignature>) -> Self {
        Self::constant(sig, Rational::one())
    }

    /// The generator `x_i` as a polynomial.
    pub fn var(sig: &Arc<RingSignature>, i: usize) -> Self {
        Self::var_pow(sig, i, 1)
    }

    pub fn var_pow(sig: &Arc<RingSignature>, i: usize, e: u32) -> Self {
        let mut expo = vec![0; sig.arity()];
        expo[i] = e;
        Self::monomial(sig, expo, Rational::one())
    }

    pub fn monomial(sig: &Arc<RingSignature>, expo: Vec<u32>, c: Rational) -> Self {
        assert_eq!(expo.len(), sig.arity());
        let mut p = Self::zero(sig);
        if !c.is_zero() {
            p.terms.insert(expo, c);
        }
        p
    }

    pub fn from_terms(
        sig: &Arc<RingSignature>,
        terms: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Self {
        let mut p = Self::zero(sig);
        for (expo, c) in terms {
            p.add_term(expo, c);
        }
        p
    }

    pub fn signature(&self) -> &Arc<RingSignature> {
        &self.sig
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending exponent-vector lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, expo: &[u32]) -> Rational {
        self.terms.get(expo).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, expo: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(expo) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn check_same_sig(&self, other: &Self, op: &str) -> Result<()> {
        if same_signature(&self.sig, &other.sig) {
            Ok(())
        } else {
            Err(Error::mismatch(format!("`{op}` on polynomials over different rings")))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_sig(other, "add")?;
        let mut out = self.clone();
        for (expo, c) in &other.terms {
            out.add_term(expo.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        GradedPolynomial {
            sig: Arc::clone(&self.sig),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.sig);
        }
        GradedPolynomial {
            sig: Arc::clone(&self.sig),
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    /// Exact product.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same_sig(other, "multiply")?;
        let mut out = Self::zero(&self.sig);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let expo: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(expo, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(&self.sig);
        for _ in 0..e {
            out = out.multiply(self).expect("same signature");
        }
        out
    }

    /// Largest cohomological degree among terms; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms
            .keys()
            .map(|e| self.sig.monomial_degree(e))
            .max()
    }

    /// Common degree of all terms; `None` means inhomogeneous.
    /// The zero polynomial reports `Some(0)`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|e| self.sig.monomial_degree(e));
        let first = match it.next() {
            None => return Some(0),
            Some(d) => d,
        };
        if it.all(|d| d == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous_degree().is_some()
    }

    /// Sum of the terms of degree exactly `d`.
    pub fn graded_component(&self, d: u32) -> Self {
        GradedPolynomial {
            sig: Arc::clone(&self.sig),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| self.sig.monomial_degree(e) == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Degrees carrying at least one term, ascending.
    pub fn degrees(&self) -> Vec<u32> {
        let mut ds: Vec<u32> = self
            .terms
            .keys()
            .map(|e| self.sig.monomial_degree(e))
            .collect();
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    /// Parse the ASCII grammar over the given signature.
    pub fn parse(sig: &Arc<RingSignature>, input: &str) -> Result<Self> {
        parse_polynomial(sig, input)
    }
}

impl fmt::Display for GradedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Descending exponent-lex in variable precedence, which matches
        // the usual leading-term-first reading for lex presentations.
        for (i, (expo, coeff)) in self.terms.iter().rev().enumerate() {
            let negative = coeff.is_negative();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{}", format_term(&self.sig, expo, &coeff.abs()))?;
        }
        Ok(())
    }
}

fn format_term(sig: &RingSignature, expo: &[u32], abs_coeff: &Rational) -> String {
    let mut factors: Vec<String> = Vec::new();
    if !abs_coeff.is_one() || expo.iter().all(|&e| e == 0) {
        factors.push(format_rational(abs_coeff));
    }
    for (i, &e) in expo.iter().enumerate() {
        match e {
            0 => {}
            1 => factors.push(sig.name(i).to_string()),
            _ => factors.push(format!("{}^{}", sig.name(i), e)),
        }
    }
    factors.join("*")
}

/// Degree-preserving ring homomorphism given by generator images.
#[derive(Debug, Clone)]
pub struct RingMap {
    source: Arc<RingSignature>,
    target: Arc<RingSignature>,
    images: Vec<GradedPolynomial>,
}

impl RingMap {
    /// Each image must be homogeneous of the source generator's degree
    /// (a zero image is allowed: the generator dies under the map).
    pub fn new(
        source: &Arc<RingSignature>,
        target: &Arc<RingSignature>,
        images: Vec<GradedPolynomial>,
    ) -> Result<Self> {
        if images.len() != source.arity() {
            return Err(Error::invalid(format!(
                "map needs {} generator images, got {}",
                source.arity(),
                images.len()
            )));
        }
        for (i, img) in images.iter().enumerate() {
            if !same_signature(img.signature(), target) {
                return Err(Error::mismatch(format!(
                    "image of `{}` is not over the target ring",
                    source.name(i)
                )));
            }
            match img.homogeneous_degree() {
                Some(_) if img.is_zero() => {}
                Some(d) if d == source.degree(i) => {}
                _ => {
                    return Err(Error::invalid(format!(
                        "image of `{}` must be homogeneous of degree {}",
                        source.name(i),
                        source.degree(i)
                    )));
                }
            }
        }
        Ok(RingMap {
            source: Arc::clone(source),
            target: Arc::clone(target),
            images,
        })
    }

    pub fn identity(sig: &Arc<RingSignature>) -> Self {
        let images = (0..sig.arity())
            .map(|i| GradedPolynomial::var(sig, i))
            .collect();
        RingMap::new(sig, sig, images).expect("identity map is degree-preserving")
    }

    pub fn source(&self) -> &Arc<RingSignature> {
        &self.source
    }

    pub fn target(&self) -> &Arc<RingSignature> {
        &self.target
    }

    pub fn image(&self, i: usize) -> &GradedPolynomial {
        &self.images[i]
    }

    /// Substitution homomorphism; preserves degree of homogeneous input.
    pub fn apply(&self, p: &GradedPolynomial) -> Result<GradedPolynomial> {
        if !same_signature(p.signature(), &self.source) {
            return Err(Error::mismatch("apply_map: polynomial not over the source ring"));
        }
        let mut out = GradedPolynomial::zero(&self.target);
        for (expo, c) in p.terms() {
            let mut term = GradedPolynomial::constant(&self.target, c.clone());
            for (i, &e) in expo.iter().enumerate() {
                if e > 0 {
                    if self.images[i].is_zero() {
                        term = GradedPolynomial::zero(&self.target);
                        break;
                    }
                    term = term.multiply(&self.images[i].pow(e))?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Parser for the ASCII grammar.

struct Lexer<'a> {
    input: &'a [u8],
    pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    Integer(String),
    Ident(String),
}

impl<'a> Lexer<'a> {
    fn new(input: &'a str) -> Self {
        Lexer {
            input: input.as_bytes(),
            pos: 0,
        }
    }

    fn tokens(mut self) -> Result<Vec<Token>> {
        let mut out = Vec::new();
        while self.pos < self.input.len() {
            let c = self.input[self.pos];
            match c {
                b' ' | b'\t' => self.pos += 1,
                b'+' => {
                    out.push(Token::Plus);
                    self.pos += 1;
                }
                b'-' => {
                    out.push(Token::Minus);
                    self.pos += 1;
                }
                b'*' => {
                    out.push(Token::Star);
                    self.pos += 1;
                }
                b'^' => {
                    out.push(Token::Caret);
                    self.pos += 1;
                }
                b'/' => {
                    out.push(Token::Slash);
                    self.pos += 1;
                }
                b'0'..=b'9' => {
                    let start = self.pos;
                    while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    out.push(Token::Integer(
                        std::str::from_utf8(&self.input[start..self.pos])
                            .unwrap()
                            .to_string(),
                    ));
                }
                c if c.is_ascii_alphabetic() => {
                    let start = self.pos;
                    while self.pos < self.input.len()
                        && (self.input[self.pos].is_ascii_alphanumeric()
                            || self.input[self.pos] == b'_')
                    {
                        self.pos += 1;
                    }
                    out.push(Token::Ident(
                        std::str::from_utf8(&self.input[start..self.pos])
                            .unwrap()
                            .to_string(),
                    ));
                }
                other => {
                    return Err(Error::invalid(format!(
                        "unexpected character `{}` in polynomial",
                        other as char
                    )));
                }
            }
        }
        Ok(out)
    }
}

fn parse_polynomial(sig: &Arc<RingSignature>, input: &str) -> Result<GradedPolynomial> {
    let tokens = Lexer::new(input).tokens()?;
    if tokens.is_empty() {
        return Err(Error::invalid("empty polynomial"));
    }
    let mut out = GradedPolynomial::zero(sig);
    let mut pos = 0;
    let mut first = true;
    while pos < tokens.len() {
        let mut sign = Rational::one();
        loop {
            match tokens.get(pos) {
                Some(Token::Plus) => {
                    pos += 1;
                    if first {
                        return Err(Error::invalid("polynomial cannot start with `+`"));
                    }
                }
                Some(Token::Minus) => {
                    sign = -sign;
                    pos += 1;
                }
                _ => break,
            }
            if first {
                break;
            }
        }
        first = false;
        let (coeff, expo, next) = parse_term(sig, &tokens, pos)?;
        pos = next;
        out.add_term(expo, coeff * sign);
    }
    Ok(out)
}

fn parse_term(
    sig: &Arc<RingSignature>,
    tokens: &[Token],
    mut pos: usize,
) -> Result<(Rational, Vec<u32>, usize)> {
    let mut coeff = Rational::one();
    let mut expo = vec![0u32; sig.arity()];
    loop {
        match tokens.get(pos) {
            Some(Token::Integer(n)) => {
                pos += 1;
                let mut text = n.clone();
                if let Some(Token::Slash) = tokens.get(pos) {
                    match tokens.get(pos + 1) {
                        Some(Token::Integer(d)) => {
                            text = format!("{n}/{d}");
                            pos += 2;
                        }
                        _ => return Err(Error::invalid("`/` must be followed by an integer")),
                    }
                }
                coeff *= parse_rational(&text)?;
            }
            Some(Token::Ident(name)) => {
                pos += 1;
                let idx = sig
                    .var_index(name)
                    .ok_or_else(|| Error::invalid(format!("unknown variable `{name}`")))?;
                let mut power = 1u32;
                if let Some(Token::Caret) = tokens.get(pos) {
                    match tokens.get(pos + 1) {
                        Some(Token::Integer(e)) => {
                            power = e
                                .parse()
                                .map_err(|_| Error::invalid(format!("bad exponent `{e}`")))?;
                            pos += 2;
                        }
                        _ => return Err(Error::invalid("`^` must be followed by an integer")),
                    }
                }
                expo[idx] += power;
            }
            _ => return Err(Error::invalid("expected a coefficient or variable")),
        }
        match tokens.get(pos) {
            Some(Token::Star) => pos += 1,
            _ => break,
        }
    }
    Ok((coeff, expo, pos))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn xr() -> Arc<RingSignature> {
        RingSignature::new(vec![("xi", 2), ("rho", 2)]).unwrap()
    }

    fn p(sig: &Arc<RingSignature>, s: &str) -> GradedPolynomial {
        GradedPolynomial::parse(sig, s).unwrap()
    }

    #[test]
    fn signature_rejects_odd_or_duplicate() {
        assert!(RingSignature::new(vec![("a", 3)]).is_err());
        assert!(RingSignature::new(vec![("a", 0)]).is_err());
        assert!(RingSignature::new(vec![("a", 2), ("a", 2)]).is_err());
        assert!(RingSignature::new(vec![("1a", 2)]).is_err());
    }

    #[test]
    fn difference_of_squares() {
        let sig = xr();
        let prod = p(&sig, "xi - rho").multiply(&p(&sig, "xi + rho")).unwrap();
        assert_eq!(prod, p(&sig, "xi^2 - rho^2"));
    }

    #[test]
    fn binomial_expansion() {
        // xi^2*(xi - rho)^3 expands with alternating binomial coefficients.
        let sig = xr();
        let lhs = p(&sig, "xi^2").multiply(&p(&sig, "xi - rho").pow(3)).unwrap();
        assert_eq!(lhs, p(&sig, "xi^5 - 3*xi^4*rho + 3*xi^3*rho^2 - xi^2*rho^3"));
    }

    #[test]
    fn monomial_product() {
        let sig = xr();
        let prod = p(&sig, "rho").multiply(&p(&sig, "xi^2*rho^3")).unwrap();
        assert_eq!(prod, p(&sig, "xi^2*rho^4"));
    }

    #[test]
    fn multiply_signature_mismatch() {
        let a = xr();
        let b = RingSignature::new(vec![("u", 2)]).unwrap();
        let err = GradedPolynomial::one(&a).multiply(&GradedPolynomial::one(&b));
        assert!(matches!(err, Err(Error::SignatureMismatch(_))));
    }

    #[test]
    fn graded_component_picks_degree() {
        let sig = xr();
        let q = p(&sig, "1 + xi + xi^2");
        assert_eq!(q.graded_component(4), p(&sig, "xi^2"));
        assert!(q.graded_component(6).is_zero());
        // Homogeneous polynomial is its own component at its degree.
        let h = p(&sig, "xi^2*rho^4");
        assert_eq!(h.homogeneous_degree(), Some(12));
        assert_eq!(h.graded_component(12), h);
    }

    #[test]
    fn apply_map_substitutes() {
        let sig = xr();
        let target = RingSignature::new(vec![("rho", 2)]).unwrap();
        let rho = GradedPolynomial::var(&target, 0);
        let m = RingMap::new(&sig, &target, vec![rho.clone(), rho]).unwrap();
        // xi_j -> rho sends xi^2 to rho^2.
        assert_eq!(m.apply(&p(&sig, "xi^2")).unwrap(), p(&target, "rho^2"));
        // Identity and renaming.
        let id = RingMap::identity(&sig);
        assert_eq!(id.apply(&p(&sig, "xi")).unwrap(), p(&sig, "xi"));
        let prime = RingSignature::new(vec![("xip", 2), ("rho", 2)]).unwrap();
        let rename = RingMap::new(
            &sig,
            &prime,
            vec![GradedPolynomial::var(&prime, 0), GradedPolynomial::var(&prime, 1)],
        )
        .unwrap();
        assert_eq!(rename.apply(&p(&sig, "xi^3*rho")).unwrap(), p(&prime, "xip^3*rho"));
    }

    #[test]
    fn ring_map_rejects_degree_shift() {
        let sig = xr();
        let target = RingSignature::new(vec![("u", 4)]).unwrap();
        let err = RingMap::new(&sig, &target, vec![
            GradedPolynomial::var(&target, 0),
            GradedPolynomial::var(&target, 0),
        ]);
        assert!(err.is_err());
        // A degree-4 source generator may map to u.
        let src = RingSignature::new(vec![("q", 4)]).unwrap();
        assert!(RingMap::new(&src, &target, vec![GradedPolynomial::var(&target, 0)]).is_ok());
    }

    #[test]
    fn display_round_trips() {
        let sig = xr();
        for s in [
            "xi^4*rho + 1/3*xi^2*rho^3",
            "-1/3",
            "0",
            "xi^5 - 3*xi^4*rho + 3*xi^3*rho^2 - xi^2*rho^3",
            "rho",
        ] {
            let q = p(&sig, s);
            assert_eq!(q.to_string(), s);
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        let sig = xr();
        assert!(GradedPolynomial::parse(&sig, "xi +").is_err());
        assert!(GradedPolynomial::parse(&sig, "zeta").is_err());
        assert!(GradedPolynomial::parse(&sig, "xi^").is_err());
        assert!(GradedPolynomial::parse(&sig, "").is_err());
        assert!(GradedPolynomial::parse(&sig, "3/").is_err());
    }

    #[test]
    fn exact_scale_round_trip() {
        let sig = xr();
        let q = p(&sig, "2/3*xi^2 - 7*rho^2 + xi*rho");
        let c = rat(-35) / rat(12);
        assert_eq!(q.scale(&c).scale(&(rat(1) / c.clone())), q);
    }

    #[test]
    fn monomial_enumeration_by_degree() {
        let sig = xr();
        // Degree 6 in two degree-2 variables: exponent pairs summing to 3.
        let monos = sig.monomials_of_degree(6);
        assert_eq!(monos, vec![vec![0, 3], vec![1, 2], vec![2, 1], vec![3, 0]]);
        let mixed = RingSignature::new(vec![("a", 2), ("q", 4)]).unwrap();
        assert_eq!(
            mixed.monomials_of_degree(8),
            vec![vec![0, 2], vec![2, 1], vec![4, 0]]
        );
    }
}
