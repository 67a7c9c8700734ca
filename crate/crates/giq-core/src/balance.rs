//! Balance conditions on fixed-locus slice data.
//!
//! A slice records a subgroup acting linearly on the normal space to
//! its fixed locus. The linear condition demands, strictly, that every
//! index point of the slice weights satisfies
//! `2 n(beta) - moved > (dim W - 2 dim H) / 2`,
//! and the full condition closes the check recursively over the listed
//! sub-loci. Equality counts as a violation.

use crate::error::Result;
use crate::rational::{rat, Rational};
use crate::weights::{index_set, RepresentationWeights, RootData, WeightVector};

/// One fixed-locus slice: the acting subgroup's dimension, its weights
/// on the normal space, its root data, and nested refinements.
#[derive(Debug, Clone)]
pub struct SliceSpec {
    pub label: String,
    pub dim_h: u32,
    pub slice_weights: RepresentationWeights,
    pub roots: RootData,
    pub sub_loci: Vec<SliceSpec>,
}

/// A failed instance of the strict inequality.
#[derive(Debug, Clone)]
pub struct Violation {
    pub label: String,
    pub beta: WeightVector,
    pub lhs: i64,
    pub rhs: Rational,
}

#[derive(Debug, Clone)]
pub struct BalanceVerdict {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl BalanceVerdict {
    fn from_violations(violations: Vec<Violation>) -> Self {
        BalanceVerdict {
            passed: violations.is_empty(),
            violations,
        }
    }
}

/// Check the strict inequality for every index point of one slice.
/// The real slice dimension is twice the weight multiplicity sum.
pub fn check_linear_balance(slice: &SliceSpec) -> Result<BalanceVerdict> {
    let mut violations = Vec::new();
    collect_linear_violations(slice, &mut violations)?;
    Ok(BalanceVerdict::from_violations(violations))
}

fn collect_linear_violations(slice: &SliceSpec, out: &mut Vec<Violation>) -> Result<()> {
    if slice.slice_weights.is_empty() {
        return Ok(());
    }
    let dim_w = 2 * slice.slice_weights.multiplicity_sum() as i64;
    let rhs = (rat(dim_w) - rat(2 * slice.dim_h as i64)) / rat(2);
    for point in index_set(&slice.slice_weights, &slice.roots)? {
        let lhs = 2 * point.n_beta as i64 - point.moved_roots as i64;
        if !(rat(lhs) > rhs) {
            out.push(Violation {
                label: slice.label.clone(),
                beta: point.beta,
                lhs,
                rhs: rhs.clone(),
            });
        }
    }
    Ok(())
}

/// Conjunction of the linear check over every slice and, recursively,
/// every listed sub-locus.
pub fn check_weakly_balanced(slices: &[SliceSpec]) -> Result<BalanceVerdict> {
    let mut violations = Vec::new();
    for slice in slices {
        walk(slice, &mut violations)?;
    }
    Ok(BalanceVerdict::from_violations(violations))
}

fn walk(slice: &SliceSpec, out: &mut Vec<Violation>) -> Result<()> {
    collect_linear_violations(slice, out)?;
    for sub in &slice.sub_loci {
        walk(sub, out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::weights::WeightVector;

    fn wv1(c: i64) -> WeightVector {
        WeightVector::new(vec![rat(c)])
    }

    fn circle_slice(n_plus: u32, n_minus: u32, dim_h: u32) -> SliceSpec {
        SliceSpec {
            label: "S1".into(),
            dim_h,
            slice_weights: RepresentationWeights::new(
                1,
                vec![(wv1(1), n_plus), (wv1(-1), n_minus)],
            )
            .unwrap(),
            roots: RootData::abelian(1),
            sub_loci: Vec::new(),
        }
    }

    #[test]
    fn balanced_circle_slice_passes() {
        // n+ = n- = 3: both index points give 6 > 5.
        let verdict = check_linear_balance(&circle_slice(3, 3, 1)).unwrap();
        assert!(verdict.passed);
    }

    #[test]
    fn asymmetric_slice_fails_at_dominated_direction() {
        // Weights {+1 x2, -1 x1}: at beta = 1 the inequality is 2 > 2.
        let verdict = check_linear_balance(&circle_slice(2, 1, 1)).unwrap();
        assert!(!verdict.passed);
        assert_eq!(verdict.violations.len(), 1);
        let v = &verdict.violations[0];
        assert_eq!(v.beta, wv1(1));
        assert_eq!(v.lhs, 2);
        assert_eq!(v.rhs, rat(2));
    }

    #[test]
    fn negation_symmetric_weights_pass() {
        let slice = SliceSpec {
            label: "sym".into(),
            dim_h: 1,
            slice_weights: RepresentationWeights::new(
                2,
                vec![
                    (WeightVector::new(vec![rat(2), rat(-1)]), 2),
                    (WeightVector::new(vec![rat(-2), rat(1)]), 2),
                    (WeightVector::new(vec![rat(1), rat(1)]), 1),
                    (WeightVector::new(vec![rat(-1), rat(-1)]), 1),
                ],
            )
            .unwrap(),
            roots: RootData::abelian(2),
            sub_loci: Vec::new(),
        };
        assert!(check_linear_balance(&slice).unwrap().passed);
    }

    #[test]
    fn weak_check_is_a_conjunction_over_the_tree() {
        let mut parent = circle_slice(3, 3, 1);
        parent.sub_loci.push(circle_slice(2, 1, 1));
        let verdict = check_weakly_balanced(&[parent.clone()]).unwrap();
        assert!(!verdict.passed);
        assert_eq!(verdict.violations[0].label, "S1");
        parent.sub_loci.clear();
        assert!(check_weakly_balanced(&[parent]).unwrap().passed);
    }

    #[test]
    fn empty_slice_passes_trivially() {
        let slice = SliceSpec {
            label: "empty".into(),
            dim_h: 1,
            slice_weights: RepresentationWeights::new(1, vec![]).unwrap(),
            roots: RootData::abelian(1),
            sub_loci: Vec::new(),
        };
        assert!(check_linear_balance(&slice).unwrap().passed);
    }
}
