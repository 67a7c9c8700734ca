//! Exact rational-function arithmetic in one variable `t`, Morse-style
//! series assembly, palindrome checks and the preset series generators
//! for the two worked example families (a circle acting on projective
//! space, and the Moebius action on ordered point tuples).
//!
//! Series are stored as reduced fractions of integer-indexed
//! coefficient vectors, so closed forms print exactly; expansion to any
//! order is on demand and exact.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, rat, Rational};

/// Dense univariate polynomial over the rationals, indexed by power of t.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UniPoly::from_coeffs(vec![rat(1)])
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        let mut p = UniPoly { coeffs };
        p.trim();
        p
    }

    /// `c * t^k`.
    pub fn term(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        UniPoly::from_coeffs(coeffs)
    }

    /// `1 + t^step + t^(2 step) + ... + t^(count-1 step)`, a finite
    /// geometric sum.
    pub fn finite_geometric(step: usize, count: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); step * count.saturating_sub(1) + 1];
        for k in 0..count {
            coeffs[k * step] = rat(1);
        }
        UniPoly::from_coeffs(coeffs)
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        UniPoly::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return UniPoly::zero();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|k| k * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(coeffs)
    }

    /// Euclidean division: `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let mut rem = self.clone();
        let mut quot = vec![Rational::zero(); self.coeffs.len().saturating_sub(divisor.coeffs.len()) + 1];
        let dlead = divisor.coeffs.last().unwrap().clone();
        let ddeg = divisor.coeffs.len() - 1;
        while let Some(rdeg) = rem.degree() {
            if rdeg < ddeg {
                break;
            }
            let factor = rem.coeffs.last().unwrap() / &dlead;
            let shift = rdeg - ddeg;
            quot[shift] = factor.clone();
            rem = rem.sub(&divisor.mul(&UniPoly::term(factor, shift)));
        }
        (UniPoly::from_coeffs(quot), rem)
    }

    fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => UniPoly::zero(),
            Some(lead) => self.scale(&(Rational::one() / lead.clone())),
        }
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Parse `1 + 3*t^2 - t^4` (rational coefficients, explicit `*`,
    /// `^` powers, variable `t`).
    pub fn parse(input: &str) -> Result<Self> {
        let mut coeffs: Vec<Rational> = Vec::new();
        let mut rest = input.trim();
        if rest.is_empty() {
            return Err(Error::invalid("empty series polynomial"));
        }
        let mut first = true;
        while !rest.is_empty() {
            let mut sign = Rational::one();
            loop {
                if let Some(r) = rest.strip_prefix('-') {
                    sign = -sign;
                    rest = r.trim_start();
                    if !first {
                        break;
                    }
                } else if let Some(r) = rest.strip_prefix('+') {
                    if first {
                        return Err(Error::invalid("series cannot start with `+`"));
                    }
                    rest = r.trim_start();
                    break;
                } else {
                    break;
                }
            }
            first = false;
            let (coeff, power, remaining) = parse_series_term(rest)?;
            rest = remaining.trim_start();
            if coeffs.len() <= power {
                coeffs.resize(power + 1, Rational::zero());
            }
            coeffs[power] += sign * coeff;
        }
        Ok(UniPoly::from_coeffs(coeffs))
    }
}

fn parse_series_term(input: &str) -> Result<(Rational, usize, &str)> {
    let mut rest = input;
    let mut coeff = Rational::one();
    let mut power = 0usize;
    loop {
        rest = rest.trim_start();
        if let Some(r) = rest.strip_prefix('t') {
            let mut r = r;
            let mut p = 1usize;
            if let Some(after) = r.strip_prefix('^') {
                let digits: String = after.chars().take_while(|c| c.is_ascii_digit()).collect();
                if digits.is_empty() {
                    return Err(Error::invalid("`^` must be followed by an exponent"));
                }
                p = digits.parse().map_err(|_| Error::invalid("exponent overflow"))?;
                r = &after[digits.len()..];
            }
            power += p;
            rest = r;
        } else {
            let token: String = rest
                .chars()
                .take_while(|c| c.is_ascii_digit() || *c == '/')
                .collect();
            if token.is_empty() {
                return Err(Error::invalid(format!("expected a series term near `{rest}`")));
            }
            coeff *= crate::rational::parse_rational(&token)?;
            rest = &rest[token.len()..];
        }
        let trimmed = rest.trim_start();
        if let Some(r) = trimmed.strip_prefix('*') {
            rest = r;
        } else {
            rest = trimmed;
            break;
        }
    }
    Ok((coeff, power, rest))
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            if first {
                if negative {
                    write!(f, "-")?;
                }
                first = false;
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let abs = c.abs();
            match (k, abs.is_one()) {
                (0, _) => write!(f, "{}", format_rational(&abs))?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{}*t", format_rational(&abs))?,
                (_, true) => write!(f, "t^{k}")?,
                (_, false) => write!(f, "{}*t^{k}", format_rational(&abs))?,
            }
        }
        Ok(())
    }
}

/// Reduced rational function in `t` whose denominator has constant
/// term 1, with exact power-series expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoincareSeries {
    num: UniPoly,
    den: UniPoly,
}

impl PoincareSeries {
    pub fn new(num: UniPoly, den: UniPoly) -> Result<Self> {
        if den.coeff(0).is_zero() {
            return Err(Error::invalid(
                "series denominator must have a nonzero constant term",
            ));
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.degree().unwrap_or(0) > 0 {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        } else {
            (num, den)
        };
        // Normalize the denominator's constant term to 1.
        let c0 = den.coeff(0);
        if !c0.is_one() {
            let inv = Rational::one() / c0;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(PoincareSeries { num, den })
    }

    pub fn from_polynomial(p: UniPoly) -> Self {
        PoincareSeries {
            num: p,
            den: UniPoly::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_polynomial(UniPoly::zero())
    }

    pub fn numerator(&self) -> &UniPoly {
        &self.num
    }

    pub fn denominator(&self) -> &UniPoly {
        &self.den
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        PoincareSeries::new(num, den).expect("denominator constant terms are 1")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        PoincareSeries {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        PoincareSeries::new(self.num.scale(c), self.den.clone()).expect("denominator unchanged")
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        PoincareSeries::new(self.num.mul(&UniPoly::term(rat(1), k)), self.den.clone())
            .expect("denominator unchanged")
    }

    /// Taylor coefficients at 0 through `t^order`, exact.
    pub fn expand(&self, order: usize) -> Vec<Rational> {
        let mut out: Vec<Rational> = Vec::with_capacity(order + 1);
        // den has constant term 1: c_k = num_k - sum_{j>=1} den_j c_{k-j}.
        for k in 0..=order {
            let mut c = self.num.coeff(k);
            for j in 1..=k.min(self.den.coeffs().len().saturating_sub(1)) {
                c -= self.den.coeff(j) * out[k - j].clone();
            }
            out.push(c);
        }
        out
    }

    /// The exact polynomial this series equals, if the denominator
    /// reduced to 1.
    pub fn as_polynomial(&self) -> Option<&UniPoly> {
        (self.den == UniPoly::one()).then_some(&self.num)
    }

    /// Parse `(num) / (den)` or a bare polynomial.
    pub fn parse(input: &str) -> Result<Self> {
        let s = input.trim();
        if let Some(rest) = s.strip_prefix('(') {
            let close = matching_paren(rest)
                .ok_or_else(|| Error::invalid(format!("unbalanced parenthesis in `{s}`")))?;
            let num = UniPoly::parse(&rest[..close])?;
            let tail = rest[close + 1..].trim_start();
            if tail.is_empty() {
                return PoincareSeries::new(num, UniPoly::one());
            }
            let tail = tail
                .strip_prefix('/')
                .ok_or_else(|| Error::invalid(format!("expected `/` in series `{s}`")))?
                .trim_start();
            let tail = tail
                .strip_prefix('(')
                .ok_or_else(|| Error::invalid("series denominator must be parenthesized"))?;
            let close = matching_paren(tail)
                .ok_or_else(|| Error::invalid(format!("unbalanced parenthesis in `{s}`")))?;
            if !tail[close + 1..].trim().is_empty() {
                return Err(Error::invalid(format!("trailing input after series `{s}`")));
            }
            let den = UniPoly::parse(&tail[..close])?;
            PoincareSeries::new(num, den)
        } else {
            PoincareSeries::new(UniPoly::parse(s)?, UniPoly::one())
        }
    }
}

fn matching_paren(after_open: &str) -> Option<usize> {
    let mut depth = 1usize;
    for (i, c) in after_open.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

impl fmt::Display for PoincareSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == UniPoly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Betti numbers by even degree (finite, nonnegative).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiPolynomial {
    coeffs: Vec<u64>,
}

impl BettiPolynomial {
    pub fn new(mut coeffs: Vec<u64>) -> Self {
        while matches!(coeffs.last(), Some(0)) {
            coeffs.pop();
        }
        BettiPolynomial { coeffs }
    }

    /// Read off a polynomial supported in even degrees with nonnegative
    /// integer coefficients.
    pub fn from_unipoly(p: &UniPoly) -> Result<Self> {
        let mut coeffs = Vec::new();
        for (k, c) in p.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if k % 2 != 0 {
                return Err(Error::integrity(format!(
                    "Betti polynomial has an odd-degree term t^{k}"
                )));
            }
            if !c.denom().is_one() || c.is_negative() {
                return Err(Error::integrity(format!(
                    "Betti coefficient at t^{k} is {} (must be a nonnegative integer)",
                    format_rational(c)
                )));
            }
        }
        let top = p.degree().unwrap_or(0);
        for d in (0..=top).step_by(2) {
            coeffs.push(p.coeff(d).numer().to_u64().ok_or_else(|| {
                Error::integrity(format!("Betti coefficient at t^{d} does not fit in u64"))
            })?);
        }
        Ok(BettiPolynomial::new(coeffs))
    }

    /// Coefficient of `t^degree` (even degrees only carry data).
    pub fn coeff(&self, degree: u32) -> u64 {
        if degree % 2 != 0 {
            return 0;
        }
        self.coeffs.get((degree / 2) as usize).copied().unwrap_or(0)
    }

    /// Coefficients by even degree: `[b0, b2, b4, ...]`.
    pub fn by_even_degree(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn top_degree(&self) -> Option<u32> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(2 * (self.coeffs.len() as u32 - 1))
        }
    }
}

impl fmt::Display for BettiPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}]",
            self.coeffs
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        )
    }
}

/// `ambient - sum t^codim * factor`, reduced. Codimensions must be
/// positive and even (real codimensions of complex strata).
pub fn morse_assemble(
    ambient: &PoincareSeries,
    strata: &[(u32, PoincareSeries)],
) -> Result<PoincareSeries> {
    let mut out = ambient.clone();
    for (codim, factor) in strata {
        if *codim == 0 || codim % 2 != 0 {
            return Err(Error::invalid(format!(
                "stratum codimension {codim} must be positive and even"
            )));
        }
        out = out.sub(&factor.shift(*codim as usize));
    }
    Ok(out)
}

/// True iff `coefficient(d) == coefficient(dim - d)` for all `d` and
/// the polynomial does not exceed degree `dim`.
pub fn palindrome_check(b: &BettiPolynomial, dim: u32) -> bool {
    match b.top_degree() {
        None => true,
        Some(top) if top > dim => false,
        Some(_) => (0..=dim).step_by(2).all(|d| b.coeff(d) == b.coeff(dim - d)),
    }
}

/// Exact binomial coefficient.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut out = BigInt::one();
    for i in 0..k.min(n - k) {
        out = out * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    out
}

fn one_minus_t2() -> UniPoly {
    UniPoly::from_coeffs(vec![rat(1), rat(0), rat(-1)])
}

/// Equivariant series of the ambient projective space for a rank-one
/// circle action with the given weight counts: every stratum datum the
/// assembly needs, bundled for the series route.
///
/// Weight counts must be balanced (`n_plus == n_minus`) and there must
/// be at least one zero weight; otherwise the instance is rejected.
pub fn preset_pn_cstar(
    n_plus: u32,
    n_zero: u32,
    n_minus: u32,
) -> Result<(PoincareSeries, BettiPolynomial)> {
    let (equivariant, tail) = pn_cstar_series(n_plus, n_zero, n_minus)?;
    let intersection = equivariant.sub(&tail);
    let poly = intersection.as_polynomial().ok_or_else(|| {
        Error::integrity("intersection series did not reduce to a polynomial")
    })?;
    Ok((equivariant, BettiPolynomial::from_unipoly(poly)?))
}

/// Ambient, strata and truncation-tail data for the circle-on-P^n
/// family, shared between the series generator and the full preset.
pub fn pn_cstar_parts(
    n_plus: u32,
    n_zero: u32,
    n_minus: u32,
) -> Result<(PoincareSeries, Vec<(u32, PoincareSeries)>, PoincareSeries)> {
    if n_plus != n_minus || n_plus < 1 {
        return Err(Error::invalid(format!(
            "weight counts ({n_plus}, {n_zero}, {n_minus}) are unbalanced: \
             the positive and negative counts must agree and be at least 1"
        )));
    }
    if n_zero < 1 {
        return Err(Error::invalid(
            "at least one zero weight is required (the fixed locus must be nonempty)",
        ));
    }
    let n = n_plus + n_zero + n_minus - 1; // ambient projective dimension
    let den = one_minus_t2();
    let ambient = PoincareSeries::new(UniPoly::finite_geometric(2, n as usize + 1), den.clone())?;
    let codim = 2 * (n_zero + n_plus);
    let stratum_plus = PoincareSeries::new(
        UniPoly::finite_geometric(2, n_minus as usize),
        den.clone(),
    )?;
    let stratum_minus = PoincareSeries::new(
        UniPoly::finite_geometric(2, n_plus as usize),
        den.clone(),
    )?;
    let strata = vec![(codim, stratum_plus), (codim, stratum_minus)];
    let tail = PoincareSeries::new(UniPoly::finite_geometric(2, n_zero as usize), den)?
        .shift(2 * n_minus as usize);
    Ok((ambient, strata, tail))
}

fn pn_cstar_series(
    n_plus: u32,
    n_zero: u32,
    n_minus: u32,
) -> Result<(PoincareSeries, PoincareSeries)> {
    let (ambient, strata, tail) = pn_cstar_parts(n_plus, n_zero, n_minus)?;
    let equivariant = morse_assemble(&ambient, &strata)?;
    Ok((equivariant, tail))
}

/// Equivariant and intersection series for the diagonal Moebius action
/// on ordered `2n`-tuples of points on the line.
pub fn preset_p1_sl2(n: u32) -> Result<(PoincareSeries, BettiPolynomial)> {
    let (ambient, strata, tail) = p1_sl2_parts(n)?;
    let equivariant = morse_assemble(&ambient, &strata)?;
    let intersection = equivariant.sub(&tail);
    let poly = intersection.as_polynomial().ok_or_else(|| {
        Error::integrity("intersection series did not reduce to a polynomial")
    })?;
    Ok((equivariant, BettiPolynomial::from_unipoly(poly)?))
}

/// Ambient, strata and truncation-tail data for the tuple family.
pub fn p1_sl2_parts(
    n: u32,
) -> Result<(PoincareSeries, Vec<(u32, PoincareSeries)>, PoincareSeries)> {
    if n < 2 {
        return Err(Error::invalid(format!("tuple preset needs n >= 2, got {n}")));
    }
    let two_n = 2 * n;
    // (1 + t^2)^{2n} / (1 - t^4)
    let mut num = UniPoly::one();
    let base = UniPoly::from_coeffs(vec![rat(1), rat(0), rat(1)]);
    for _ in 0..two_n {
        num = num.mul(&base);
    }
    let den = UniPoly::from_coeffs(vec![rat(1), rat(0), rat(0), rat(0), rat(-1)]);
    let ambient = PoincareSeries::new(num, den)?;
    let mut strata = Vec::new();
    for r in n + 1..=two_n {
        let count = Rational::from_integer(binomial(two_n, r));
        let factor = PoincareSeries::new(UniPoly::term(count, 0), one_minus_t2())?;
        strata.push((2 * (r - 1), factor));
    }
    let half_central = Rational::from_integer(binomial(two_n, n)) / rat(2);
    let tail = PoincareSeries::new(UniPoly::term(half_central, 0), one_minus_t2())?
        .shift(2 * n as usize - 2);
    Ok((ambient, strata, tail))
}
