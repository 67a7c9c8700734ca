//! Buchberger-style reduced Groebner bases for homogeneous ideals,
//! normal forms, normal-monomial bases of graded pieces and graded
//! dimension counting.
//!
//! Everything is degree-graded: inputs must be homogeneous, so the
//! computation may be truncated at a degree bound without affecting
//! normal forms at or below the bound (S-polynomials are homogeneous
//! of the lcm degree, and reduction never lowers degree).

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::{monomial_divides, same_signature, GradedPolynomial, RingSignature};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderKind {
    Lex,
    Grlex,
}

impl OrderKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "lex" => Ok(OrderKind::Lex),
            "grlex" => Ok(OrderKind::Grlex),
            other => Err(Error::invalid(format!("unknown monomial order `{other}`"))),
        }
    }
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderKind::Lex => write!(f, "lex"),
            OrderKind::Grlex => write!(f, "grlex"),
        }
    }
}

/// Total order on monomials: lex in a variable precedence, or grlex
/// (total exponent first, ties broken by the same lex).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialOrder {
    kind: OrderKind,
    /// `precedence[0]` is the index of the highest variable.
    precedence: Vec<usize>,
}

impl MonomialOrder {
    pub fn new(sig: &RingSignature, kind: OrderKind, precedence: Vec<usize>) -> Result<Self> {
        let n = sig.arity();
        let mut seen = vec![false; n];
        if precedence.len() != n {
            return Err(Error::invalid("monomial order precedence must list every variable"));
        }
        for &i in &precedence {
            if i >= n || seen[i] {
                return Err(Error::invalid("monomial order precedence must be a permutation"));
            }
            seen[i] = true;
        }
        Ok(MonomialOrder { kind, precedence })
    }

    /// Variables in their listed order, highest first.
    pub fn natural(sig: &RingSignature, kind: OrderKind) -> Self {
        MonomialOrder {
            kind,
            precedence: (0..sig.arity()).collect(),
        }
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        if self.kind == OrderKind::Grlex {
            let ta: u32 = a.iter().sum();
            let tb: u32 = b.iter().sum();
            match ta.cmp(&tb) {
                Ordering::Equal => {}
                other => return other,
            }
        }
        for &i in &self.precedence {
            match a[i].cmp(&b[i]) {
                Ordering::Equal => {}
                other => return other,
            }
        }
        Ordering::Equal
    }

    /// Leading exponent vector of a nonzero polynomial.
    pub fn leading_monomial(&self, p: &GradedPolynomial) -> Option<Vec<u32>> {
        p.terms()
            .map(|(e, _)| e.clone())
            .max_by(|a, b| self.cmp(a, b))
    }

    pub fn leading_term(&self, p: &GradedPolynomial) -> Option<(Vec<u32>, Rational)> {
        let lm = self.leading_monomial(p)?;
        let c = p.coefficient(&lm);
        Some((lm, c))
    }

    /// Sort monomials ascending in this order.
    pub fn sort_ascending(&self, monos: &mut [Vec<u32>]) {
        monos.sort_by(|a, b| self.cmp(a, b));
    }
}

/// Reduced monic Groebner basis. If `complete_up_to` is set, the basis
/// is only guaranteed correct for queries of degree at most that bound.
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    sig: Arc<RingSignature>,
    order: MonomialOrder,
    elements: Vec<GradedPolynomial>,
    leading: Vec<Vec<u32>>,
    complete_up_to: Option<u32>,
}

impl GroebnerBasis {
    pub fn signature(&self) -> &Arc<RingSignature> {
        &self.sig
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    /// Basis elements, sorted descending by leading monomial.
    pub fn elements(&self) -> &[GradedPolynomial] {
        &self.elements
    }

    pub fn leading_monomials(&self) -> &[Vec<u32>] {
        &self.leading
    }

    pub fn complete_up_to(&self) -> Option<u32> {
        self.complete_up_to
    }

    fn check_degree(&self, d: u32) -> Result<()> {
        if let Some(bound) = self.complete_up_to {
            if d > bound {
                return Err(Error::invalid(format!(
                    "query at degree {d} exceeds the basis truncation bound {bound}"
                )));
            }
        }
        Ok(())
    }
}

/// Reduced Groebner basis of a homogeneous ideal; unique for the order.
pub fn buchberger(relations: &[GradedPolynomial], order: MonomialOrder) -> Result<GroebnerBasis> {
    buchberger_impl(relations, order, None)
}

/// Degree-truncated variant: only S-pairs of lcm degree at most `bound`
/// are processed, which is sound for all queries of degree `<= bound`.
pub fn buchberger_bounded(
    relations: &[GradedPolynomial],
    order: MonomialOrder,
    bound: u32,
) -> Result<GroebnerBasis> {
    buchberger_impl(relations, order, Some(bound))
}

fn buchberger_impl(
    relations: &[GradedPolynomial],
    order: MonomialOrder,
    bound: Option<u32>,
) -> Result<GroebnerBasis> {
    let sig = match relations.first() {
        Some(p) => Arc::clone(p.signature()),
        None => return Err(Error::invalid("buchberger needs at least one relation")),
    };
    let mut basis: Vec<GradedPolynomial> = Vec::new();
    for r in relations {
        if !same_signature(r.signature(), &sig) {
            return Err(Error::mismatch("relations live over different rings"));
        }
        if r.is_zero() {
            continue;
        }
        if r.homogeneous_degree().is_none() {
            return Err(Error::invalid(format!("relation `{r}` is not homogeneous")));
        }
        basis.push(make_monic(r, &order));
    }

    let mut leading: Vec<Vec<u32>> = basis
        .iter()
        .map(|p| order.leading_monomial(p).expect("nonzero"))
        .collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..basis.len() {
        for j in 0..i {
            pairs.push((j, i));
        }
    }

    while !pairs.is_empty() {
        // Normal selection: smallest lcm in the active order.
        let mut best = 0;
        let mut best_lcm = exp_lcm(&leading[pairs[0].0], &leading[pairs[0].1]);
        for (k, &(i, j)) in pairs.iter().enumerate().skip(1) {
            let lcm = exp_lcm(&leading[i], &leading[j]);
            if order.cmp(&lcm, &best_lcm) == Ordering::Less {
                best = k;
                best_lcm = lcm;
            }
        }
        let (i, j) = pairs.swap_remove(best);
        let lm_i = &leading[i];
        let lm_j = &leading[j];
        let lcm = exp_lcm(lm_i, lm_j);
        if let Some(b) = bound {
            if sig.monomial_degree(&lcm) > b {
                continue;
            }
        }
        // Product criterion: coprime leading monomials give a useless pair.
        if lm_i.iter().zip(lm_j).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        let s = s_polynomial(&basis[i], &basis[j], lm_i, lm_j, &lcm, &sig);
        let remainder = reduce_full(&s, &basis, &order);
        if !remainder.is_zero() {
            let new = make_monic(&remainder, &order);
            leading.push(order.leading_monomial(&new).expect("nonzero"));
            basis.push(new);
            let n = basis.len() - 1;
            for k in 0..n {
                pairs.push((k, n));
            }
        }
    }

    let reduced = interreduce(basis, &order);
    let leading: Vec<Vec<u32>> = reduced
        .iter()
        .map(|p| order.leading_monomial(p).expect("reduced basis has no zero"))
        .collect();
    Ok(GroebnerBasis {
        sig,
        order,
        elements: reduced,
        leading,
        complete_up_to: bound,
    })
}

fn exp_lcm(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn s_polynomial(
    f: &GradedPolynomial,
    g: &GradedPolynomial,
    lm_f: &[u32],
    lm_g: &[u32],
    lcm: &[u32],
    sig: &Arc<RingSignature>,
) -> GradedPolynomial {
    // f and g are monic, so the S-polynomial is u*f - v*g with
    // u = lcm/lm(f), v = lcm/lm(g).
    let u: Vec<u32> = lcm.iter().zip(lm_f).map(|(l, m)| l - m).collect();
    let v: Vec<u32> = lcm.iter().zip(lm_g).map(|(l, m)| l - m).collect();
    let uf = GradedPolynomial::monomial(sig, u, Rational::one())
        .multiply(f)
        .expect("same signature");
    let vg = GradedPolynomial::monomial(sig, v, Rational::one())
        .multiply(g)
        .expect("same signature");
    uf.sub(&vg).expect("same signature")
}

fn make_monic(p: &GradedPolynomial, order: &MonomialOrder) -> GradedPolynomial {
    let (_, lc) = order.leading_term(p).expect("monic normalization of zero polynomial");
    p.scale(&(Rational::one() / lc))
}

/// Full reduction of `p` modulo `basis`: every term of the remainder is
/// irreducible.
fn reduce_full(
    p: &GradedPolynomial,
    basis: &[GradedPolynomial],
    order: &MonomialOrder,
) -> GradedPolynomial {
    let sig = Arc::clone(p.signature());
    let mut work = p.clone();
    let mut remainder = GradedPolynomial::zero(&sig);
    while let Some((lm, lc)) = order.leading_term(&work) {
        let mut reduced = false;
        for g in basis {
            let lm_g = order
                .leading_monomial(g)
                .expect("basis elements are nonzero");
            if monomial_divides(&lm_g, &lm) {
                let quot: Vec<u32> = lm.iter().zip(&lm_g).map(|(a, b)| a - b).collect();
                // g is monic, so subtract lc * quot * g.
                let factor = GradedPolynomial::monomial(&sig, quot, lc.clone());
                let sub = factor.multiply(g).expect("same signature");
                work = work.sub(&sub).expect("same signature");
                reduced = true;
                break;
            }
        }
        if !reduced {
            let mono = GradedPolynomial::monomial(&sig, lm, lc);
            remainder = remainder.add(&mono).expect("same signature");
            work = work.sub(&mono).expect("same signature");
        }
    }
    remainder
}

/// Interreduce to the unique reduced basis: minimal leading monomials,
/// fully reduced tails, monic, sorted descending by leading monomial.
fn interreduce(mut basis: Vec<GradedPolynomial>, order: &MonomialOrder) -> Vec<GradedPolynomial> {
    basis.retain(|p| !p.is_zero());
    // Minimality: drop any element whose leading monomial is divisible
    // by another element's leading monomial.
    let mut keep = vec![true; basis.len()];
    for i in 0..basis.len() {
        if !keep[i] {
            continue;
        }
        let lm_i = order.leading_monomial(&basis[i]).unwrap();
        for j in 0..basis.len() {
            if i == j || !keep[j] {
                continue;
            }
            let lm_j = order.leading_monomial(&basis[j]).unwrap();
            if monomial_divides(&lm_j, &lm_i) && !(lm_i == lm_j && j > i) {
                keep[i] = false;
                break;
            }
        }
    }
    let minimal: Vec<GradedPolynomial> = basis
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect();
    // Tail reduction against the other elements.
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<GradedPolynomial> = minimal
            .iter()
            .enumerate()
            .filter_map(|(j, p)| (j != i).then(|| p.clone()))
            .collect();
        let r = reduce_full(&minimal[i], &others, order);
        reduced.push(make_monic(&r, order));
    }
    reduced.sort_by(|a, b| {
        let la = order.leading_monomial(a).unwrap();
        let lb = order.leading_monomial(b).unwrap();
        order.cmp(&lb, &la)
    });
    reduced
}

/// Fully reduced remainder of `p` modulo the basis; zero iff `p` lies
/// in the ideal (up to the truncation bound), and idempotent.
pub fn normal_form(p: &GradedPolynomial, gb: &GroebnerBasis) -> Result<GradedPolynomial> {
    if !same_signature(p.signature(), &gb.sig) {
        return Err(Error::mismatch("normal_form: polynomial over a different ring"));
    }
    if let Some(d) = p.degree() {
        gb.check_degree(d)?;
    }
    Ok(reduce_full(p, &gb.elements, &gb.order))
}

/// Generators, relations and the reduced Groebner basis of a graded
/// quotient ring.
#[derive(Debug, Clone)]
pub struct QuotientRingPresentation {
    sig: Arc<RingSignature>,
    relations: Vec<GradedPolynomial>,
    groebner: GroebnerBasis,
}

impl QuotientRingPresentation {
    pub fn new(
        sig: &Arc<RingSignature>,
        relations: Vec<GradedPolynomial>,
        order: MonomialOrder,
    ) -> Result<Self> {
        Self::build(sig, relations, order, None)
    }

    pub fn new_bounded(
        sig: &Arc<RingSignature>,
        relations: Vec<GradedPolynomial>,
        order: MonomialOrder,
        bound: u32,
    ) -> Result<Self> {
        Self::build(sig, relations, order, Some(bound))
    }

    fn build(
        sig: &Arc<RingSignature>,
        relations: Vec<GradedPolynomial>,
        order: MonomialOrder,
        bound: Option<u32>,
    ) -> Result<Self> {
        for r in &relations {
            if !same_signature(r.signature(), sig) {
                return Err(Error::mismatch("relation over a different ring"));
            }
            if r.homogeneous_degree().is_none() {
                return Err(Error::invalid(format!("relation `{r}` is not homogeneous")));
            }
        }
        let nonzero: Vec<GradedPolynomial> =
            relations.iter().filter(|r| !r.is_zero()).cloned().collect();
        let groebner = if nonzero.is_empty() {
            GroebnerBasis {
                sig: Arc::clone(sig),
                order,
                elements: Vec::new(),
                leading: Vec::new(),
                complete_up_to: bound,
            }
        } else {
            match bound {
                Some(b) => buchberger_bounded(&nonzero, order, b)?,
                None => buchberger(&nonzero, order)?,
            }
        };
        // Every relation must normal-form to zero against the basis.
        for r in &nonzero {
            let nf = normal_form(r, &groebner)?;
            if !nf.is_zero() {
                return Err(Error::integrity(format!(
                    "relation `{r}` does not reduce to zero against its own basis"
                )));
            }
        }
        Ok(QuotientRingPresentation {
            sig: Arc::clone(sig),
            relations,
            groebner,
        })
    }

    /// Free ring: no relations.
    pub fn free(sig: &Arc<RingSignature>, order: MonomialOrder) -> Self {
        Self::new(sig, Vec::new(), order).expect("free presentation is always valid")
    }

    pub fn signature(&self) -> &Arc<RingSignature> {
        &self.sig
    }

    pub fn relations(&self) -> &[GradedPolynomial] {
        &self.relations
    }

    pub fn groebner(&self) -> &GroebnerBasis {
        &self.groebner
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.groebner.order
    }

    pub fn normal_form(&self, p: &GradedPolynomial) -> Result<GradedPolynomial> {
        normal_form(p, &self.groebner)
    }

    /// Vector-space basis of the degree-`d` piece: monomials of degree
    /// `d` not divisible by any leading monomial, ascending in the
    /// active order.
    pub fn normal_monomials(&self, d: u32) -> Result<Vec<Vec<u32>>> {
        self.groebner.check_degree(d)?;
        let mut monos: Vec<Vec<u32>> = self
            .sig
            .monomials_of_degree(d)
            .into_iter()
            .filter(|m| !self.groebner.leading.iter().any(|lm| monomial_divides(lm, m)))
            .collect();
        self.groebner.order.sort_ascending(&mut monos);
        Ok(monos)
    }

    /// Dimensions of the graded pieces for even degrees `0..=bound`.
    pub fn graded_dimensions(&self, bound: u32) -> Result<Vec<usize>> {
        (0..=bound)
            .step_by(2)
            .map(|d| Ok(self.normal_monomials(d)?.len()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn sig_xr() -> Arc<RingSignature> {
        RingSignature::new(vec![("xi", 2), ("rho", 2)]).unwrap()
    }

    fn p(sig: &Arc<RingSignature>, s: &str) -> GradedPolynomial {
        GradedPolynomial::parse(sig, s).unwrap()
    }

    fn strata_relations(sig: &Arc<RingSignature>) -> Vec<GradedPolynomial> {
        let xi2 = p(sig, "xi^2");
        vec![
            xi2.multiply(&p(sig, "xi - rho").pow(3)).unwrap(),
            xi2.multiply(&p(sig, "xi + rho").pow(3)).unwrap(),
        ]
    }

    fn presentation() -> QuotientRingPresentation {
        let sig = sig_xr();
        let order = MonomialOrder::natural(&sig, OrderKind::Lex);
        QuotientRingPresentation::new(&sig, strata_relations(&sig), order).unwrap()
    }

    #[test]
    fn groebner_basis_of_two_strata_ideal() {
        let q = presentation();
        let sig = q.signature().clone();
        let expected = vec![
            p(&sig, "xi^5 + 3*xi^3*rho^2"),
            p(&sig, "xi^4*rho + 1/3*xi^2*rho^3"),
            p(&sig, "xi^3*rho^3"),
            p(&sig, "xi^2*rho^5"),
        ];
        assert_eq!(q.groebner().elements(), expected.as_slice());
    }

    #[test]
    fn principal_monomial_ideal() {
        let sig = sig_xr();
        let order = MonomialOrder::natural(&sig, OrderKind::Lex);
        let gb = buchberger(&[p(&sig, "xi")], order).unwrap();
        assert_eq!(gb.elements(), &[p(&sig, "xi")]);
    }

    #[test]
    fn sum_difference_halves() {
        let sig = sig_xr();
        let order = MonomialOrder::natural(&sig, OrderKind::Lex);
        let gb = buchberger(&[p(&sig, "xi^2 - rho^2"), p(&sig, "xi^2 + rho^2")], order).unwrap();
        assert_eq!(gb.elements(), &[p(&sig, "xi^2"), p(&sig, "rho^2")]);
    }

    #[test]
    fn rejects_inhomogeneous_input() {
        let sig = sig_xr();
        let order = MonomialOrder::natural(&sig, OrderKind::Lex);
        assert!(buchberger(&[p(&sig, "xi^2 + rho")], order).is_err());
    }

    #[test]
    fn normal_forms_match_hand_reduction() {
        let q = presentation();
        let sig = q.signature().clone();
        // A defining relation reduces to zero.
        let rel = p(&sig, "xi^2").multiply(&p(&sig, "xi - rho").pow(3)).unwrap();
        assert!(q.normal_form(&rel).unwrap().is_zero());
        // xi^4*rho^2 = -1/3 xi^2*rho^4 in the quotient.
        assert_eq!(
            q.normal_form(&p(&sig, "xi^4*rho^2")).unwrap(),
            p(&sig, "xi^2*rho^4").scale(&ratio(-1, 3))
        );
        assert!(q.normal_form(&p(&sig, "xi^3*rho^3")).unwrap().is_zero());
        // Idempotence.
        let nf = q.normal_form(&p(&sig, "xi^4*rho^2")).unwrap();
        assert_eq!(q.normal_form(&nf).unwrap(), nf);
    }

    #[test]
    fn normal_monomials_of_graded_pieces() {
        let q = presentation();
        let monos12 = q.normal_monomials(12).unwrap();
        // rho^6, xi*rho^5, xi^2*rho^4 ascending in lex xi > rho.
        assert_eq!(monos12, vec![vec![0, 6], vec![1, 5], vec![2, 4]]);
        assert_eq!(q.normal_monomials(0).unwrap(), vec![vec![0, 0]]);
        assert_eq!(q.normal_monomials(2).unwrap(), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn graded_dimensions_of_presets() {
        let q = presentation();
        // Normal-monomial counts of the quotient (not yet truncated).
        assert_eq!(q.graded_dimensions(16).unwrap(), vec![1, 2, 3, 4, 5, 4, 3, 2, 2]);

        let free = RingSignature::new(vec![("rho", 2)]).unwrap();
        let fq = QuotientRingPresentation::free(&free, MonomialOrder::natural(&free, OrderKind::Lex));
        assert_eq!(fq.graded_dimensions(6).unwrap(), vec![1, 1, 1, 1]);

        let xonly = RingSignature::new(vec![("xi", 2)]).unwrap();
        let tq = QuotientRingPresentation::new(
            &xonly,
            vec![p(&xonly, "xi^2")],
            MonomialOrder::natural(&xonly, OrderKind::Lex),
        )
        .unwrap();
        assert_eq!(tq.graded_dimensions(6).unwrap(), vec![1, 1, 0, 0]);
    }

    #[test]
    fn truncated_basis_matches_full_basis_below_bound() {
        let sig = sig_xr();
        let order = MonomialOrder::natural(&sig, OrderKind::Lex);
        let full = buchberger(&strata_relations(&sig), order.clone()).unwrap();
        let cut = buchberger_bounded(&strata_relations(&sig), order, 14).unwrap();
        assert_eq!(full.elements(), cut.elements());
        let q = QuotientRingPresentation::new_bounded(
            &sig,
            strata_relations(&sig),
            MonomialOrder::natural(&sig, OrderKind::Lex),
            12,
        )
        .unwrap();
        assert!(q.normal_monomials(14).is_err());
    }

    #[test]
    fn grlex_orders_by_total_exponent_first() {
        let sig = sig_xr();
        let lex = MonomialOrder::natural(&sig, OrderKind::Lex);
        let grlex = MonomialOrder::natural(&sig, OrderKind::Grlex);
        // xi vs rho^3: lex prefers xi, grlex prefers rho^3.
        let a = vec![1, 0];
        let b = vec![0, 3];
        assert_eq!(lex.cmp(&a, &b), Ordering::Greater);
        assert_eq!(grlex.cmp(&a, &b), Ordering::Less);
    }
}
