//! Intersection pairings on the truncated subspace: cup products
//! normal-formed into the top degree, read off against the top class,
//! with exact determinants and signatures by congruence
//! diagonalization.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::poly::GradedPolynomial;
use crate::rational::Rational;
use crate::truncation::VSpace;

/// Pairing data for one complementary-degree block.
#[derive(Debug, Clone)]
pub struct PairingBlock {
    pub degree: u32,
    pub matrix: Matrix,
    /// Present for square blocks.
    pub determinant: Option<Rational>,
    /// Present for square symmetric nondegenerate blocks.
    pub signature: Option<i64>,
}

/// All pairing blocks of a truncated subspace, in units of the top
/// class.
#[derive(Debug, Clone)]
pub struct PairingReport {
    pub top_degree: u32,
    pub top_class: GradedPolynomial,
    pub blocks: Vec<PairingBlock>,
}

/// The normalized generator of the top piece. The top degree is the
/// largest degree up to the bound with a nonzero piece, which must be
/// one-dimensional; the basis element is normalized monic in the
/// ring's monomial order so all pairings are reported in its units.
pub fn top_class(v: &VSpace) -> Result<GradedPolynomial> {
    let top = v
        .top_nonzero_degree()
        .ok_or_else(|| Error::invalid("the truncated subspace is zero in every degree"))?;
    let basis = v.basis(top);
    if basis.len() != 1 {
        return Err(Error::invalid(format!(
            "top piece (degree {top}) has dimension {}, expected 1 \
             (wrong degree bound, or a disconnected quotient)",
            basis.len()
        )));
    }
    let class = &basis[0];
    let (_, lc) = v
        .ring()
        .order()
        .leading_term(class)
        .expect("top basis element is nonzero");
    Ok(class.scale(&(Rational::one() / lc)))
}

/// Entry `(a, b)` is the coefficient of the top class in the normal
/// form of `basis_a(V^i) * basis_b(V^(top-i))`. Products must land in
/// the line spanned by the top class; anything else is an integrity
/// error.
pub fn pairing_matrix(v: &VSpace, i: u32) -> Result<Matrix> {
    let top = v
        .top_nonzero_degree()
        .ok_or_else(|| Error::invalid("the truncated subspace is zero in every degree"))?;
    if i > top {
        return Err(Error::invalid(format!("degree {i} exceeds the top degree {top}")));
    }
    let tau = top_class(v)?;
    let (tau_lm, _) = v.ring().order().leading_term(&tau).expect("top class is nonzero");
    let left = v.basis(i);
    let right = v.basis(top - i);
    let mut matrix = vec![vec![Rational::zero(); right.len()]; left.len()];
    for (a, pa) in left.iter().enumerate() {
        for (b, pb) in right.iter().enumerate() {
            let product = v.ring().normal_form(&pa.multiply(pb)?)?;
            if product.is_zero() {
                continue;
            }
            let lambda = product.coefficient(&tau_lm);
            let residue = product.sub(&tau.scale(&lambda))?;
            if !residue.is_zero() {
                return Err(Error::integrity(format!(
                    "product of degree-{i} and degree-{} classes lands outside \
                     the top-class line: {product}",
                    top - i
                )));
            }
            matrix[a][b] = lambda;
        }
    }
    Ok(matrix)
}

/// Signature of a symmetric nondegenerate matrix: positive minus
/// negative inertia, by exact symmetric congruence. Zero diagonals are
/// repaired by adding a row/column with a nonzero off-diagonal entry,
/// which is again a congruence.
pub fn signature(m: &Matrix) -> Result<i64> {
    let n = m.len();
    for row in m {
        if row.len() != n {
            return Err(Error::invalid("signature requires a square matrix"));
        }
    }
    for i in 0..n {
        for j in 0..i {
            if m[i][j] != m[j][i] {
                return Err(Error::invalid("signature requires a symmetric matrix"));
            }
        }
    }
    let mut a = m.clone();
    let mut sig = 0i64;
    for k in 0..n {
        if a[k][k].is_zero() {
            // Prefer a later index with a nonzero diagonal: swapping
            // index k and i is a congruence by a permutation.
            if let Some(i) = (k + 1..n).find(|&i| !a[i][i].is_zero()) {
                swap_symmetric(&mut a, k, i);
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // All remaining diagonals vanish: add row/col j to k,
                // making a[k][k] = 2 a[k][j] != 0.
                add_symmetric(&mut a, k, j);
            } else {
                return Err(Error::invalid(
                    "degenerate symmetric matrix has no signature",
                ));
            }
        }
        let pivot = a[k][k].clone();
        sig += if pivot.is_positive() { 1 } else { -1 };
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &pivot;
            for j in k..n {
                let v = &a[i][j] - &(&a[k][j] * &f);
                a[i][j] = v;
            }
            for j in k..n {
                let v = &a[j][i] - &(&a[j][k] * &f);
                a[j][i] = v;
            }
        }
    }
    Ok(sig)
}

fn swap_symmetric(a: &mut Matrix, i: usize, j: usize) {
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

fn add_symmetric(a: &mut Matrix, k: usize, j: usize) {
    let n = a.len();
    for col in 0..n {
        let v = &a[k][col] + &a[j][col];
        a[k][col] = v;
    }
    for row in 0..n {
        let v = &a[row][k] + &a[row][j];
        a[row][k] = v;
    }
}

fn is_symmetric(m: &Matrix) -> bool {
    let n = m.len();
    m.iter().all(|r| r.len() == n)
        && (0..n).all(|i| (0..i).all(|j| m[i][j] == m[j][i]))
}

/// Blocks for every even degree up to the top, with determinants for
/// square blocks and signatures for symmetric nondegenerate ones.
pub fn pairing_report(v: &VSpace) -> Result<PairingReport> {
    let top = v
        .top_nonzero_degree()
        .ok_or_else(|| Error::invalid("the truncated subspace is zero in every degree"))?;
    let tau = top_class(v)?;
    let mut blocks = Vec::new();
    for i in (0..=top).step_by(2) {
        let matrix = pairing_matrix(v, i)?;
        let square = !matrix.is_empty() && matrix.len() == matrix[0].len();
        let determinant = square.then(|| linalg::determinant(&matrix));
        let signature = if square
            && is_symmetric(&matrix)
            && determinant.as_ref().is_some_and(|d| !d.is_zero())
        {
            Some(signature(&matrix)?)
        } else {
            None
        };
        blocks.push(PairingBlock {
            degree: i,
            matrix,
            determinant,
            signature,
        });
    }
    Ok(PairingReport {
        top_degree: top,
        top_class: tau,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::{MonomialOrder, OrderKind, QuotientRingPresentation};
    use crate::poly::{RingMap, RingSignature};
    use crate::rational::{rat, ratio};
    use crate::truncation::{compute_v, TruncationConstraint};

    fn p(sig: &std::sync::Arc<RingSignature>, s: &str) -> GradedPolynomial {
        GradedPolynomial::parse(sig, s).unwrap()
    }

    fn circle_vspace() -> VSpace {
        let sig = RingSignature::new(vec![("xi", 2), ("rho", 2)]).unwrap();
        let xi2 = p(&sig, "xi^2");
        let ring = QuotientRingPresentation::new(
            &sig,
            vec![
                xi2.multiply(&p(&sig, "xi - rho").pow(3)).unwrap(),
                xi2.multiply(&p(&sig, "xi + rho").pow(3)).unwrap(),
            ],
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
        let c = TruncationConstraint::new("S1", restriction, target, vec![1], 5).unwrap();
        compute_v(&ring, &[c], 12).unwrap()
    }

    #[test]
    fn top_class_is_the_printed_monomial() {
        let v = circle_vspace();
        let tau = top_class(&v).unwrap();
        assert_eq!(tau.to_string(), "xi^2*rho^4");
    }

    #[test]
    fn degree_two_block() {
        let v = circle_vspace();
        let m = pairing_matrix(&v, 2).unwrap();
        assert_eq!(m, vec![vec![rat(1), rat(0)], vec![rat(0), ratio(-1, 3)]]);
        assert_eq!(linalg::determinant(&m), ratio(-1, 3));
        assert_eq!(signature(&m).unwrap(), 0);
    }

    #[test]
    fn degree_four_and_middle_blocks() {
        let v = circle_vspace();
        let expected = vec![
            vec![rat(1), rat(0), ratio(-1, 3)],
            vec![rat(0), ratio(-1, 3), rat(0)],
            vec![ratio(-1, 3), rat(0), rat(1)],
        ];
        for i in [4, 6] {
            let m = pairing_matrix(&v, i).unwrap();
            assert_eq!(m, expected, "degree {i}");
            assert_eq!(linalg::determinant(&m), ratio(-8, 27));
            assert_eq!(signature(&m).unwrap(), 1);
        }
    }

    #[test]
    fn blocks_transpose_across_complementary_degrees() {
        let v = circle_vspace();
        for i in (0..=12u32).step_by(2) {
            let m = pairing_matrix(&v, i).unwrap();
            let t = pairing_matrix(&v, 12 - i).unwrap();
            for (a, row) in m.iter().enumerate() {
                for (b, val) in row.iter().enumerate() {
                    assert_eq!(*val, t[b][a]);
                }
            }
        }
    }

    #[test]
    fn report_collects_all_blocks() {
        let v = circle_vspace();
        let report = pairing_report(&v).unwrap();
        assert_eq!(report.top_degree, 12);
        assert_eq!(report.blocks.len(), 7);
        for block in &report.blocks {
            assert!(block.determinant.as_ref().is_some_and(|d| !d.is_zero()));
        }
        assert_eq!(report.blocks[1].signature, Some(0));
        assert_eq!(report.blocks[2].signature, Some(1));
        assert_eq!(report.blocks[3].signature, Some(1));
    }

    #[test]
    fn signature_basics() {
        let diag = vec![vec![rat(1), rat(0)], vec![rat(0), ratio(-1, 3)]];
        assert_eq!(signature(&diag).unwrap(), 0);
        let id3 = vec![
            vec![rat(1), rat(0), rat(0)],
            vec![rat(0), rat(1), rat(0)],
            vec![rat(0), rat(0), rat(1)],
        ];
        assert_eq!(signature(&id3).unwrap(), 3);
        // Hyperbolic plane: all-zero diagonal still diagonalizes.
        let hyp = vec![vec![rat(0), rat(1)], vec![rat(1), rat(0)]];
        assert_eq!(signature(&hyp).unwrap(), 0);
        let degenerate = vec![vec![rat(0), rat(0)], vec![rat(0), rat(1)]];
        assert!(signature(&degenerate).is_err());
        let asym = vec![vec![rat(0), rat(1)], vec![rat(2), rat(0)]];
        assert!(signature(&asym).is_err());
    }

    #[test]
    fn top_class_of_free_rank_one_ring() {
        // No constraints, bound 0: the top piece is the unit.
        let sig = RingSignature::new(vec![("rho", 2)]).unwrap();
        let ring = QuotientRingPresentation::free(&sig, MonomialOrder::natural(&sig, OrderKind::Lex));
        let v = compute_v(&ring, &[], 0).unwrap();
        assert_eq!(top_class(&v).unwrap().to_string(), "1");
    }
}
