//! Built-in problem generators for the two worked families. Each
//! preset emits every pipeline input at once: weight data, balance
//! slices, the quotient-ring presentation, restriction constraints and
//! the series data, so one flag drives the whole run.

use std::sync::Arc;

use num_traits::One;

use crate::balance::SliceSpec;
use crate::error::{Error, Result};
use crate::groebner::OrderKind;
use crate::poly::{GradedPolynomial, RingSignature};
use crate::problem::{
    ConstraintSpec, NhSpec, ProblemSpec, RingSpec, SeriesSpec, WeightFamily,
};
use crate::rational::{rat, Rational};
use crate::series::{p1_sl2_parts, pn_cstar_parts};
use crate::weights::{RepresentationWeights, RootData, WeightVector};

/// Build a preset by name: `pn-cstar` takes the three weight counts,
/// `p1-sl2` takes the half-count of points.
pub fn build_preset(name: &str, args: &[u32]) -> Result<ProblemSpec> {
    match name {
        "pn-cstar" => match args {
            [a, b, c] => pn_cstar_problem(*a, *b, *c),
            _ => Err(Error::invalid("pn-cstar takes three arguments: n_plus,n_zero,n_minus")),
        },
        "p1-sl2" => match args {
            [n] => p1_sl2_problem(*n),
            _ => Err(Error::invalid("p1-sl2 takes one argument: n")),
        },
        other => Err(Error::invalid(format!(
            "unknown preset `{other}` (available: pn-cstar, p1-sl2)"
        ))),
    }
}

fn wv1(c: i64) -> WeightVector {
    WeightVector::new(vec![rat(c)])
}

/// Circle action on projective space with `n_plus` positive, `n_zero`
/// zero and `n_minus` negative weights (balance requires
/// `n_plus == n_minus`).
pub fn pn_cstar_problem(n_plus: u32, n_zero: u32, n_minus: u32) -> Result<ProblemSpec> {
    let (ambient, strata, tail) = pn_cstar_parts(n_plus, n_zero, n_minus)?;
    let n = n_plus + n_zero + n_minus - 1;

    let rep = RepresentationWeights::new(
        1,
        vec![
            (wv1(1), n_plus),
            (wv1(0), n_zero),
            (wv1(-1), n_minus),
        ],
    )?;

    let slice = SliceSpec {
        label: "S1".into(),
        dim_h: 1,
        slice_weights: RepresentationWeights::new(
            1,
            vec![(wv1(1), n_plus), (wv1(-1), n_minus)],
        )?,
        roots: RootData::abelian(1),
        sub_loci: Vec::new(),
    };

    let signature = RingSignature::new(vec![("xi", 2), ("rho", 2)])?;
    let xi = GradedPolynomial::var(&signature, 0);
    let rho = GradedPolynomial::var(&signature, 1);
    let xi_pow = xi.pow(n_zero);
    let relations = vec![
        xi_pow.multiply(&xi.sub(&rho)?.pow(n_plus))?,
        xi_pow.multiply(&xi.add(&rho)?.pow(n_minus))?,
    ];

    // Restriction to the fixed projective subspace of the zero-weight
    // block: the hyperplane class survives (truncated when the block is
    // a point), the fiber generator maps to itself.
    let constraint = if n_zero >= 2 {
        let target = RingSignature::new(vec![("xip", 2), ("rho", 2)])?;
        ConstraintSpec {
            label: "S1".into(),
            target_relations: vec![GradedPolynomial::var(&target, 0).pow(n_zero)],
            fiber_vars: vec![1],
            images: vec![
                GradedPolynomial::var(&target, 0),
                GradedPolynomial::var(&target, 1),
            ],
            n_h: NhSpec::DeriveFromSlice("S1".into()),
            target_signature: target,
        }
    } else {
        let target = RingSignature::new(vec![("rho", 2)])?;
        ConstraintSpec {
            label: "S1".into(),
            target_relations: Vec::new(),
            fiber_vars: vec![0],
            images: vec![
                GradedPolynomial::zero(&target),
                GradedPolynomial::var(&target, 0),
            ],
            n_h: NhSpec::DeriveFromSlice("S1".into()),
            target_signature: target,
        }
    };

    Ok(ProblemSpec {
        label: format!("pn-cstar({n_plus},{n_zero},{n_minus})"),
        max_degree: 2 * n,
        order: OrderKind::Lex,
        rank: 1,
        root_data: RootData::abelian(1),
        weight_families: vec![WeightFamily {
            label: "ambient".into(),
            rep,
        }],
        slices: vec![slice],
        ring: Some(RingSpec {
            signature,
            relations,
        }),
        constraints: vec![constraint],
        series: Some(SeriesSpec {
            ambient,
            strata,
            truncation_tail: Some(tail),
        }),
        outputs: Vec::new(),
    })
}

/// Diagonal Moebius action on ordered `2n`-tuples of points of the
/// line. The ring presents the equivariant cohomology of the
/// semistable locus: one degree-2 generator per point and one degree-4
/// generator, the square relations, and one coincidence-locus class for
/// each subset of `n + 1` points (the loci sweeping out the unstable
/// set).
pub fn p1_sl2_problem(n: u32) -> Result<ProblemSpec> {
    let (ambient, strata, tail) = p1_sl2_parts(n)?;
    let two_n = 2 * n;

    // Tangent-direction weight families at a configuration with r
    // coincident points, one per unstable size r.
    let root_data = RootData::new(1, vec![wv1(2), wv1(-2)], vec![wv1(2)])?;
    let mut weight_families = Vec::new();
    for r in n + 1..=two_n {
        weight_families.push(WeightFamily {
            label: format!("r={r}"),
            rep: RepresentationWeights::new(1, vec![(wv1(1), two_n - r), (wv1(-1), r)])?,
        });
    }

    let slice = SliceSpec {
        label: "T".into(),
        dim_h: 1,
        slice_weights: RepresentationWeights::new(
            1,
            vec![(wv1(2), n - 1), (wv1(-2), n - 1)],
        )?,
        roots: RootData::abelian(1),
        sub_loci: Vec::new(),
    };

    // Generators xi1..xi{2n} of degree 2 and rho2 of degree 4.
    let mut vars: Vec<(String, u32)> = (1..=two_n).map(|j| (format!("xi{j}"), 2)).collect();
    vars.push(("rho2".into(), 4));
    let signature = RingSignature::new(vars)?;
    let rho2_idx = two_n as usize;
    let mut relations = Vec::new();
    for j in 0..two_n as usize {
        let sq = GradedPolynomial::var(&signature, j).pow(2);
        relations.push(sq.sub(&GradedPolynomial::var(&signature, rho2_idx))?);
    }
    for subset in subsets_of_size(two_n as usize, n as usize + 1) {
        relations.push(coincidence_class(&signature, &subset)?);
    }

    // One restriction constraint per orbit representative: fixed-point
    // subsets containing the first point.
    let target = RingSignature::new(vec![("rho", 2)])?;
    let rho = GradedPolynomial::var(&target, 0);
    let mut constraints = Vec::new();
    for mut subset in subsets_of_size(two_n as usize - 1, n as usize - 1) {
        for s in &mut subset {
            *s += 1;
        }
        let mut chosen = vec![0usize];
        chosen.extend(subset);
        let mut images = Vec::with_capacity(two_n as usize + 1);
        for j in 0..two_n as usize {
            if chosen.contains(&j) {
                images.push(rho.clone());
            } else {
                images.push(rho.neg());
            }
        }
        images.push(rho.pow(2));
        let label = format!(
            "I={{{}}}",
            chosen
                .iter()
                .map(|j| (j + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        constraints.push(ConstraintSpec {
            label,
            target_signature: Arc::clone(&target),
            target_relations: Vec::new(),
            fiber_vars: vec![0],
            images,
            n_h: NhSpec::DeriveFromSlice("T".into()),
        });
    }

    Ok(ProblemSpec {
        label: format!("p1-sl2({n})"),
        max_degree: 2 * (2 * n - 3) + 2,
        order: OrderKind::Lex,
        rank: 1,
        root_data,
        weight_families,
        slices: vec![slice],
        ring: Some(RingSpec {
            signature,
            relations,
        }),
        constraints,
        series: Some(SeriesSpec {
            ambient,
            strata,
            truncation_tail: Some(tail),
        }),
        outputs: Vec::new(),
    })
}

/// Class of the locus where the points of `subset` coincide: the
/// product over the non-anchor members of (anchor + member), which is
/// symmetric in the subset modulo the square relations.
fn coincidence_class(
    signature: &Arc<RingSignature>,
    subset: &[usize],
) -> Result<GradedPolynomial> {
    let anchor = subset[0];
    let mut class = GradedPolynomial::constant(signature, Rational::one());
    for &j in &subset[1..] {
        let sum = GradedPolynomial::var(signature, anchor)
            .add(&GradedPolynomial::var(signature, j))?;
        class = class.multiply(&sum)?;
    }
    Ok(class)
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn recurse(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            recurse(i + 1, n, k, current, out);
            current.pop();
        }
    }
    recurse(0, n, k, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pn_cstar_preset_is_consistent() {
        let spec = pn_cstar_problem(3, 2, 3).unwrap();
        spec.validate().unwrap();
        assert_eq!(spec.max_degree, 14);
        assert_eq!(spec.resolve_n_h(&spec.constraints[0]).unwrap(), 5);
        assert_eq!(spec.ring.as_ref().unwrap().relations.len(), 2);
        assert!(pn_cstar_problem(2, 1, 1).is_err());
    }

    #[test]
    fn pn_cstar_point_fixed_locus_uses_zero_image() {
        let spec = pn_cstar_problem(1, 1, 1).unwrap();
        spec.validate().unwrap();
        let c = &spec.constraints[0];
        assert!(c.images[0].is_zero());
        assert_eq!(spec.resolve_n_h(c).unwrap(), 1);
    }

    #[test]
    fn p1_sl2_preset_counts() {
        let spec = p1_sl2_problem(2).unwrap();
        spec.validate().unwrap();
        // Three orbit representatives containing point 1.
        assert_eq!(spec.constraints.len(), 3);
        // Four squares plus four triple-coincidence classes.
        assert_eq!(spec.ring.as_ref().unwrap().relations.len(), 8);
        assert_eq!(spec.resolve_n_h(&spec.constraints[0]).unwrap(), 1);
        assert_eq!(spec.weight_families.len(), 2);

        let spec3 = p1_sl2_problem(3).unwrap();
        assert_eq!(spec3.constraints.len(), 10);
        assert_eq!(spec3.ring.as_ref().unwrap().relations.len(), 6 + 15);
        assert_eq!(spec3.resolve_n_h(&spec3.constraints[0]).unwrap(), 3);
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(subsets_of_size(4, 3).len(), 4);
        assert_eq!(subsets_of_size(6, 4).len(), 15);
        assert_eq!(subsets_of_size(3, 3), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn unknown_preset_rejected() {
        assert!(build_preset("nope", &[1]).is_err());
        assert!(build_preset("pn-cstar", &[1, 2]).is_err());
    }
}
