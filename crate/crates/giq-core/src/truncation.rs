//! The truncated subspace of the equivariant cohomology of the
//! semistable locus: per-degree kernels of restriction-then-truncation
//! maps, yielding intersection Betti numbers and explicit bases.
//!
//! Each constraint restricts classes to a fixed-locus presentation
//! whose generators are split into base and fiber variables; a class
//! survives when its image has no component of fiber degree at or
//! above the truncation threshold `2 ceil(n_h / 2)` (fiber cohomology
//! lives in even degrees, so the odd threshold rounds up).

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::groebner::QuotientRingPresentation;
use crate::linalg::{self, Matrix};
use crate::poly::{same_signature, GradedPolynomial, RingMap};
use crate::rational::Rational;
use crate::series::BettiPolynomial;

/// A restriction map to one fixed-locus target, with the base/fiber
/// split of the target generators and the truncation level.
#[derive(Debug, Clone)]
pub struct TruncationConstraint {
    label: String,
    restriction: RingMap,
    target: QuotientRingPresentation,
    fiber_vars: Vec<usize>,
    n_h: u32,
}

impl TruncationConstraint {
    pub fn new(
        label: impl Into<String>,
        restriction: RingMap,
        target: QuotientRingPresentation,
        fiber_vars: Vec<usize>,
        n_h: u32,
    ) -> Result<Self> {
        if !same_signature(restriction.target(), target.signature()) {
            return Err(Error::mismatch(
                "constraint restriction does not land in its target ring",
            ));
        }
        let arity = target.signature().arity();
        let mut seen = vec![false; arity];
        for &i in &fiber_vars {
            if i >= arity {
                return Err(Error::invalid("fiber variable index out of range"));
            }
            if seen[i] {
                return Err(Error::invalid("duplicate fiber variable in split"));
            }
            seen[i] = true;
        }
        Ok(TruncationConstraint {
            label: label.into(),
            restriction,
            target,
            fiber_vars,
            n_h,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn restriction(&self) -> &RingMap {
        &self.restriction
    }

    pub fn target(&self) -> &QuotientRingPresentation {
        &self.target
    }

    pub fn fiber_vars(&self) -> &[usize] {
        &self.fiber_vars
    }

    pub fn n_h(&self) -> u32 {
        self.n_h
    }

    /// Smallest even degree killed by the truncation.
    pub fn fiber_threshold(&self) -> u32 {
        2 * self.n_h.div_ceil(2)
    }

    /// Fiber part of a target monomial's degree.
    pub fn fiber_degree(&self, expo: &[u32]) -> u32 {
        self.fiber_vars
            .iter()
            .map(|&i| expo[i] * self.target.signature().degree(i))
            .sum()
    }

    /// Target normal monomials of degree `d` whose fiber degree reaches
    /// the threshold (the rows the kernel must annihilate).
    pub fn truncated_rows(&self, d: u32) -> Result<Vec<Vec<u32>>> {
        Ok(self
            .target
            .normal_monomials(d)?
            .into_iter()
            .filter(|m| self.fiber_degree(m) >= self.fiber_threshold())
            .collect())
    }
}

/// Matrix of the truncated restriction in degree `d`: rows are target
/// normal monomials at or above the fiber threshold, columns are
/// source normal monomials, entries the normal-form coefficients.
pub fn restriction_matrix(
    ring: &QuotientRingPresentation,
    constraint: &TruncationConstraint,
    d: u32,
) -> Result<Matrix> {
    let rows = constraint.truncated_rows(d)?;
    restriction_rows(ring, constraint, d, &rows)
}

fn restriction_rows(
    ring: &QuotientRingPresentation,
    constraint: &TruncationConstraint,
    d: u32,
    rows: &[Vec<u32>],
) -> Result<Matrix> {
    if !same_signature(constraint.restriction.source(), ring.signature()) {
        return Err(Error::mismatch(
            "constraint restriction is not defined on the main ring",
        ));
    }
    let cols = ring.normal_monomials(d)?;
    let mut matrix = vec![vec![Rational::zero(); cols.len()]; rows.len()];
    for (j, col) in cols.iter().enumerate() {
        let source = GradedPolynomial::monomial(ring.signature(), col.clone(), num_traits::One::one());
        let image = constraint.target.normal_form(&constraint.restriction.apply(&source)?)?;
        if image.is_zero() {
            continue;
        }
        for (i, row) in rows.iter().enumerate() {
            let c = image.coefficient(row);
            if !c.is_zero() {
                matrix[i][j] = c;
            }
        }
    }
    Ok(matrix)
}

/// The truncated subspace: per-degree kernel bases in normal-monomial
/// coordinates, and the resulting Betti numbers.
#[derive(Debug, Clone)]
pub struct VSpace {
    ring: QuotientRingPresentation,
    constraints: Vec<TruncationConstraint>,
    bound: u32,
    bases: BTreeMap<u32, Vec<GradedPolynomial>>,
    betti: BettiPolynomial,
}

impl VSpace {
    pub fn ring(&self) -> &QuotientRingPresentation {
        &self.ring
    }

    pub fn constraints(&self) -> &[TruncationConstraint] {
        &self.constraints
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn basis(&self, d: u32) -> &[GradedPolynomial] {
        self.bases.get(&d).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn bases(&self) -> &BTreeMap<u32, Vec<GradedPolynomial>> {
        &self.bases
    }

    pub fn betti(&self) -> &BettiPolynomial {
        &self.betti
    }

    /// Largest degree up to the bound with a nonzero piece.
    pub fn top_nonzero_degree(&self) -> Option<u32> {
        self.bases
            .iter()
            .rev()
            .find(|(_, b)| !b.is_empty())
            .map(|(d, _)| *d)
    }
}

/// Kernel of the stacked truncated restrictions in each even degree up
/// to `bound`. Basis vectors come out of the reduced row echelon form,
/// one per free column, so they are reproducible and reduce to
/// themselves in the quotient ring.
pub fn compute_v(
    ring: &QuotientRingPresentation,
    constraints: &[TruncationConstraint],
    bound: u32,
) -> Result<VSpace> {
    if bound % 2 != 0 {
        return Err(Error::invalid("degree bound must be even"));
    }
    let mut bases = BTreeMap::new();
    let mut dims = Vec::new();
    for d in (0..=bound).step_by(2) {
        let cols = ring.normal_monomials(d)?;
        let mut stacked: Matrix = Vec::new();
        for c in constraints {
            stacked.extend(restriction_matrix(ring, c, d)?);
        }
        let kernel = linalg::kernel_basis(&stacked, cols.len());
        let basis: Vec<GradedPolynomial> = kernel
            .into_iter()
            .map(|v| {
                GradedPolynomial::from_terms(
                    ring.signature(),
                    cols.iter().cloned().zip(v).filter(|(_, c)| !c.is_zero()),
                )
            })
            .collect();
        dims.push(basis.len() as u64);
        bases.insert(d, basis);
    }
    Ok(VSpace {
        ring: ring.clone(),
        constraints: constraints.to_vec(),
        bound,
        bases,
        betti: BettiPolynomial::new(dims),
    })
}

/// True iff the full (untruncated) stacked restriction matrix has full
/// row rank in every degree `2k` for `k` in the given range.
pub fn verify_restriction_surjectivity(
    ring: &QuotientRingPresentation,
    constraints: &[TruncationConstraint],
    k_from: u32,
    k_to: u32,
) -> Result<bool> {
    for k in k_from..=k_to {
        let d = 2 * k;
        let mut stacked: Matrix = Vec::new();
        let mut nrows = 0;
        for c in constraints {
            let rows = c.target.normal_monomials(d)?;
            nrows += rows.len();
            stacked.extend(restriction_rows(ring, c, d, &rows)?);
        }
        if linalg::rank(&stacked) != nrows {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::{MonomialOrder, OrderKind};
    use crate::poly::RingSignature;
    use crate::rational::rat;

    fn p(sig: &std::sync::Arc<RingSignature>, s: &str) -> GradedPolynomial {
        GradedPolynomial::parse(sig, s).unwrap()
    }

    /// Main ring and constraint of the eight-dimensional circle example.
    fn circle_example() -> (QuotientRingPresentation, TruncationConstraint) {
        let sig = RingSignature::new(vec![("xi", 2), ("rho", 2)]).unwrap();
        let xi2 = p(&sig, "xi^2");
        let relations = vec![
            xi2.multiply(&p(&sig, "xi - rho").pow(3)).unwrap(),
            xi2.multiply(&p(&sig, "xi + rho").pow(3)).unwrap(),
        ];
        let ring = QuotientRingPresentation::new(
            &sig,
            relations,
            MonomialOrder::natural(&sig, OrderKind::Lex),
        )
        .unwrap();

        let tsig = RingSignature::new(vec![("xip", 2), ("rho", 2)]).unwrap();
        let target = QuotientRingPresentation::new(
            &tsig,
            vec![p(&tsig, "xip^2")],
            MonomialOrder::natural(&tsig, OrderKind::Lex),
        )
        .unwrap();
        let restriction = RingMap::new(
            &sig,
            &tsig,
            vec![GradedPolynomial::var(&tsig, 0), GradedPolynomial::var(&tsig, 1)],
        )
        .unwrap();
        let constraint =
            TruncationConstraint::new("S1", restriction, target, vec![1], 5).unwrap();
        (ring, constraint)
    }

    #[test]
    fn threshold_rounds_odd_levels_up() {
        let (_, c) = circle_example();
        assert_eq!(c.n_h(), 5);
        assert_eq!(c.fiber_threshold(), 6);
    }

    #[test]
    fn restriction_matrix_degree_six() {
        let (ring, c) = circle_example();
        let m = restriction_matrix(&ring, &c, 6).unwrap();
        // Columns rho^3, xi*rho^2, xi^2*rho, xi^3; single row rho^3.
        assert_eq!(m, vec![vec![rat(1), rat(0), rat(0), rat(0)]]);
        // Below the threshold there are no rows at all.
        assert!(restriction_matrix(&ring, &c, 4).unwrap().is_empty());
    }

    #[test]
    fn kernel_bases_match_listed_monomials() {
        let (ring, c) = circle_example();
        let v = compute_v(&ring, &[c], 12).unwrap();
        assert_eq!(v.betti().by_even_degree(), &[1, 2, 3, 3, 3, 2, 1]);
        let sig = ring.signature();
        let expect: &[(u32, &[&str])] = &[
            (0, &["1"]),
            (2, &["rho", "xi"]),
            (4, &["rho^2", "xi*rho", "xi^2"]),
            (6, &["xi*rho^2", "xi^2*rho", "xi^3"]),
            (8, &["xi^2*rho^2", "xi^3*rho", "xi^4"]),
            (10, &["xi^2*rho^3", "xi^3*rho^2"]),
            (12, &["xi^2*rho^4"]),
        ];
        for (d, monos) in expect {
            let basis: Vec<String> = v.basis(*d).iter().map(|b| b.to_string()).collect();
            let want: Vec<String> = monos.iter().map(|s| s.to_string()).collect();
            assert_eq!(basis, want, "degree {d}");
            for b in v.basis(*d) {
                assert_eq!(&ring.normal_form(b).unwrap(), b);
            }
        }
        let _ = p(sig, "1");
    }

    #[test]
    fn no_constraints_gives_the_full_ring() {
        let (ring, _) = circle_example();
        let v = compute_v(&ring, &[], 8).unwrap();
        let dims: Vec<u64> = ring
            .graded_dimensions(8)
            .unwrap()
            .into_iter()
            .map(|d| d as u64)
            .collect();
        assert_eq!(v.betti().by_even_degree(), dims.as_slice());
    }

    #[test]
    fn truncated_images_vanish_above_threshold() {
        let (ring, c) = circle_example();
        let v = compute_v(&ring, std::slice::from_ref(&c), 12).unwrap();
        for d in (0..=12u32).step_by(2) {
            for b in v.basis(d) {
                let image = c.target().normal_form(&c.restriction().apply(b).unwrap()).unwrap();
                for (expo, coeff) in image.terms() {
                    assert!(
                        c.fiber_degree(expo) < c.fiber_threshold() || coeff.is_zero(),
                        "degree {d}: image escapes the truncation"
                    );
                }
            }
        }
    }

    #[test]
    fn zero_map_is_not_surjective() {
        let (ring, c) = circle_example();
        let zero_map = RingMap::new(
            ring.signature(),
            c.target().signature(),
            vec![
                GradedPolynomial::zero(c.target().signature()),
                GradedPolynomial::zero(c.target().signature()),
            ],
        )
        .unwrap();
        let zero_c = TruncationConstraint::new(
            "zero",
            zero_map,
            c.target().clone(),
            c.fiber_vars().to_vec(),
            c.n_h(),
        )
        .unwrap();
        assert!(!verify_restriction_surjectivity(&ring, &[zero_c], 1, 2).unwrap());
    }

    #[test]
    fn odd_bound_rejected() {
        let (ring, c) = circle_example();
        assert!(compute_v(&ring, &[c], 7).is_err());
    }
}
