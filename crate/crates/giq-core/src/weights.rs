//! Weight geometry for the unstable-stratum index set: exact min-norm
//! points of convex hulls of weight subsets, dominated-weight counts,
//! moved-root counts from root data and stratum codimensions.
//!
//! The min-norm subproblem is solved by Wolfe's method over exact
//! rationals, which terminates exactly and needs no tolerances. A
//! brute-force face-projection oracle lives in the test suite as an
//! independent second implementation.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{format_rational, Rational};

/// Rational vector in the weight lattice tensored with the rationals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct WeightVector {
    coords: Vec<Rational>,
}

impl WeightVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        WeightVector { coords }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn zero(rank: usize) -> Self {
        WeightVector {
            coords: vec![Rational::zero(); rank],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn dot(&self, other: &Self) -> Rational {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_squared(&self) -> Rational {
        self.dot(self)
    }

    pub fn neg(&self) -> Self {
        WeightVector {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        WeightVector {
            coords: self.coords.iter().map(|k| k * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        WeightVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn format(&self) -> String {
        format!(
            "({})",
            self.coords
                .iter()
                .map(format_rational)
                .collect::<Vec<_>>()
                .join(", ")
        )
    }
}

/// Weight multiset of a unitary representation; total real dimension is
/// twice the multiplicity sum (the weights are complex).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentationWeights {
    rank: usize,
    entries: Vec<(WeightVector, u32)>,
}

impl RepresentationWeights {
    pub fn new(rank: usize, entries: Vec<(WeightVector, u32)>) -> Result<Self> {
        for (w, mult) in &entries {
            if w.rank() != rank {
                return Err(Error::invalid(format!(
                    "weight {} has rank {}, expected {rank}",
                    w.format(),
                    w.rank()
                )));
            }
            if *mult == 0 {
                return Err(Error::invalid("weight multiplicities must be at least 1"));
            }
        }
        Ok(RepresentationWeights { rank, entries })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entries(&self) -> &[(WeightVector, u32)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of multiplicities (complex dimension of the representation).
    pub fn multiplicity_sum(&self) -> u64 {
        self.entries.iter().map(|(_, m)| *m as u64).sum()
    }

    /// Scale every weight by a positive rational.
    pub fn scaled(&self, c: &Rational) -> Self {
        RepresentationWeights {
            rank: self.rank,
            entries: self
                .entries
                .iter()
                .map(|(w, m)| (w.scale(c), *m))
                .collect(),
        }
    }
}

/// Roots of the acting group together with the simple roots cutting the
/// closed positive chamber. Both lists are empty in the abelian case,
/// where the chamber is the whole space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootData {
    rank: usize,
    roots: Vec<WeightVector>,
    chamber: Vec<WeightVector>,
}

impl RootData {
    pub fn new(rank: usize, roots: Vec<WeightVector>, chamber: Vec<WeightVector>) -> Result<Self> {
        for v in roots.iter().chain(&chamber) {
            if v.rank() != rank {
                return Err(Error::invalid(format!(
                    "root datum {} has rank {}, expected {rank}",
                    v.format(),
                    v.rank()
                )));
            }
        }
        for r in &roots {
            if !roots.contains(&r.neg()) {
                return Err(Error::invalid(format!(
                    "root set is not closed under negation: missing {}",
                    r.neg().format()
                )));
            }
        }
        Ok(RootData { rank, roots, chamber })
    }

    pub fn abelian(rank: usize) -> Self {
        RootData {
            rank,
            roots: Vec::new(),
            chamber: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn roots(&self) -> &[WeightVector] {
        &self.roots
    }

    pub fn chamber(&self) -> &[WeightVector] {
        &self.chamber
    }

    /// Closed chamber: nonnegative pairing with every simple root.
    pub fn in_chamber(&self, beta: &WeightVector) -> bool {
        self.chamber.iter().all(|s| beta.dot(s) >= Rational::zero())
    }

    /// Number of roots moved by `beta` (nonzero pairing); this equals
    /// the dimension of the orbit of `beta` under the acting group.
    pub fn moved_roots(&self, beta: &WeightVector) -> usize {
        self.roots.iter().filter(|r| !r.dot(beta).is_zero()).count()
    }
}

/// Convex-combination certificate: pairs of an input weight and its
/// coefficient; coefficients are positive and sum to one.
pub type Certificate = Vec<(WeightVector, Rational)>;

/// One index point: the min-norm point of a weight-subset hull, with
/// its dominated-weight count and stratum codimension.
#[derive(Debug, Clone)]
pub struct IndexPoint {
    pub beta: WeightVector,
    pub n_beta: u64,
    pub moved_roots: usize,
    pub codim: i64,
    pub certificate: Certificate,
}

/// The unique nearest point of the convex hull to the origin, with a
/// convex-combination certificate over the input points.
///
/// Exact Wolfe iteration: maintain an affinely independent corral whose
/// convex minimizer is the current point, add the most violating input
/// point, and walk line segments until a new corral is reached.
pub fn min_norm_point(points: &[WeightVector]) -> Result<(WeightVector, Certificate)> {
    if points.is_empty() {
        return Err(Error::invalid("min_norm_point needs at least one point"));
    }
    let rank = points[0].rank();
    if points.iter().any(|p| p.rank() != rank) {
        return Err(Error::invalid("min_norm_point: mixed ranks"));
    }
    // Deduplicate, remembering the first original index of each value.
    let mut distinct: Vec<(WeightVector, usize)> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if !distinct.iter().any(|(q, _)| q == p) {
            distinct.push((p.clone(), i));
        }
    }
    let q: Vec<&WeightVector> = distinct.iter().map(|(w, _)| w).collect();

    // Start from the input point of smallest norm.
    let start = (0..q.len())
        .min_by(|&a, &b| q[a].norm_squared().cmp(&q[b].norm_squared()))
        .unwrap();
    let mut support = vec![start];
    let mut lambda = vec![Rational::from_integer(1.into())];
    let mut x = q[start].clone();

    for _ in 0..10_000 {
        let xx = x.norm_squared();
        let best = (0..q.len())
            .min_by(|&a, &b| q[a].dot(&x).cmp(&q[b].dot(&x)))
            .unwrap();
        if q[best].dot(&x) >= xx {
            let certificate = support
                .iter()
                .zip(&lambda)
                .map(|(&i, c)| (points[distinct[i].1].clone(), c.clone()))
                .collect();
            return Ok((x, certificate));
        }
        debug_assert!(!support.contains(&best), "violating point already in corral");
        support.push(best);
        lambda.push(Rational::zero());

        // Minor cycles: move toward the affine minimizer of the corral,
        // dropping points whose coefficient hits zero.
        loop {
            let alpha = affine_minimizer(&q, &support)?;
            if alpha.iter().all(|a| *a > Rational::zero()) {
                lambda = alpha;
                x = combine(&q, &support, &lambda);
                break;
            }
            // Largest step along [lambda -> alpha] keeping coefficients
            // nonnegative.
            let mut theta: Option<Rational> = None;
            for (l, a) in lambda.iter().zip(&alpha) {
                if *a <= Rational::zero() {
                    let denom = l - a;
                    debug_assert!(denom > Rational::zero());
                    let t = l / &denom;
                    if theta.as_ref().is_none_or(|cur| t < *cur) {
                        theta = Some(t);
                    }
                }
            }
            let theta = theta.expect("some coefficient is nonpositive");
            let mut new_support = Vec::new();
            let mut new_lambda = Vec::new();
            for ((&i, l), a) in support.iter().zip(&lambda).zip(&alpha) {
                let c = l + &theta * (a - l);
                if !c.is_zero() {
                    new_support.push(i);
                    new_lambda.push(c);
                }
            }
            support = new_support;
            lambda = new_lambda;
            x = combine(&q, &support, &lambda);
        }
    }
    Err(Error::integrity("min_norm_point did not terminate"))
}

fn combine(q: &[&WeightVector], support: &[usize], lambda: &[Rational]) -> WeightVector {
    let rank = q[0].rank();
    let mut x = WeightVector::zero(rank);
    for (&i, c) in support.iter().zip(lambda) {
        x = x.add(&q[i].scale(c));
    }
    x
}

/// Minimizer of the norm over the affine hull of the corral, in
/// barycentric coordinates. The corral is affinely independent, so the
/// bordered Gram system is nonsingular.
fn affine_minimizer(q: &[&WeightVector], support: &[usize]) -> Result<Vec<Rational>> {
    let k = support.len();
    let mut m = vec![vec![Rational::zero(); k + 1]; k + 1];
    for a in 0..k {
        for b in 0..k {
            m[a][b] = q[support[a]].dot(q[support[b]]) * Rational::from_integer(2.into());
        }
        m[a][k] = -Rational::from_integer(1.into());
        m[k][a] = Rational::from_integer(1.into());
    }
    let mut rhs = vec![Rational::zero(); k + 1];
    rhs[k] = Rational::from_integer(1.into());
    let sol = linalg::solve(&m, &rhs)
        .ok_or_else(|| Error::integrity("corral became affinely dependent"))?;
    Ok(sol[..k].to_vec())
}

/// Count (with multiplicity) of weights dominated by `beta`:
/// `<alpha, beta> < <beta, beta>`.
pub fn n_of_beta(rep: &RepresentationWeights, beta: &WeightVector) -> Result<u64> {
    if beta.is_zero() {
        return Err(Error::invalid("n_of_beta requires a nonzero direction"));
    }
    if beta.rank() != rep.rank() {
        return Err(Error::invalid("n_of_beta: rank mismatch"));
    }
    let bb = beta.norm_squared();
    Ok(rep
        .entries()
        .iter()
        .filter(|(w, _)| w.dot(beta) < bb)
        .map(|(_, m)| *m as u64)
        .sum())
}

/// Maximum number of distinct weights accepted by `index_set`; the
/// subset enumeration is exponential.
pub const MAX_DISTINCT_WEIGHTS: usize = 20;

/// The index set: deduplicated nonzero min-norm points over all
/// nonempty subsets of the distinct weights, filtered to the closed
/// positive chamber, each with its dominated count, moved-root count
/// and codimension `2 n(beta) - moved`. Sorted by `beta` ascending.
pub fn index_set(rep: &RepresentationWeights, roots: &RootData) -> Result<Vec<IndexPoint>> {
    if roots.rank() != rep.rank() {
        return Err(Error::invalid("index_set: root data rank mismatch"));
    }
    let mut distinct: Vec<WeightVector> = Vec::new();
    for (w, _) in rep.entries() {
        if !distinct.contains(w) {
            distinct.push(w.clone());
        }
    }
    distinct.sort();
    if distinct.len() > MAX_DISTINCT_WEIGHTS {
        return Err(Error::invalid(format!(
            "{} distinct weights exceed the supported maximum of {MAX_DISTINCT_WEIGHTS} \
             (subset enumeration is exponential)",
            distinct.len()
        )));
    }
    let mut found: BTreeMap<WeightVector, Certificate> = BTreeMap::new();
    for mask in 1u32..(1u32 << distinct.len()) {
        let subset: Vec<WeightVector> = (0..distinct.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| distinct[i].clone())
            .collect();
        let (p, certificate) = min_norm_point(&subset)?;
        if p.is_zero() || !roots.in_chamber(&p) {
            continue;
        }
        found.entry(p).or_insert(certificate);
    }
    let mut out = Vec::new();
    for (beta, certificate) in found {
        let n_beta = n_of_beta(rep, &beta)?;
        let moved = roots.moved_roots(&beta);
        out.push(IndexPoint {
            codim: 2 * n_beta as i64 - moved as i64,
            beta,
            n_beta,
            moved_roots: moved,
            certificate,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    pub fn wv(coords: &[i64]) -> WeightVector {
        WeightVector::new(coords.iter().map(|&c| rat(c)).collect())
    }

    fn rep(rank: usize, entries: &[(&[i64], u32)]) -> RepresentationWeights {
        RepresentationWeights::new(
            rank,
            entries.iter().map(|(w, m)| (wv(w), *m)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn min_norm_single_point() {
        let (p, cert) = min_norm_point(&[wv(&[1])]).unwrap();
        assert_eq!(p, wv(&[1]));
        assert_eq!(cert.len(), 1);
        assert_eq!(cert[0].1, rat(1));
    }

    #[test]
    fn min_norm_symmetric_segment() {
        let (p, _) = min_norm_point(&[wv(&[1]), wv(&[-1])]).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn min_norm_offset_segment() {
        let (p, cert) = min_norm_point(&[wv(&[2, 1]), wv(&[1, 2])]).unwrap();
        assert_eq!(
            p,
            WeightVector::new(vec![ratio(3, 2), ratio(3, 2)])
        );
        // Certificate reconstructs the point.
        let mut rebuilt = WeightVector::zero(2);
        let mut total = rat(0);
        for (w, c) in &cert {
            assert!(*c > rat(0));
            total += c.clone();
            rebuilt = rebuilt.add(&w.scale(c));
        }
        assert_eq!(total, rat(1));
        assert_eq!(rebuilt, p);
    }

    #[test]
    fn min_norm_kkt_holds() {
        let pts = [wv(&[3, 1]), wv(&[1, 3]), wv(&[2, 2]), wv(&[5, -1])];
        let (p, _) = min_norm_point(&pts).unwrap();
        let pp = p.norm_squared();
        for a in &pts {
            assert!(a.dot(&p) >= pp);
        }
    }

    #[test]
    fn n_of_beta_counts_with_multiplicity() {
        let r = rep(1, &[(&[1], 3), (&[0], 2), (&[-1], 3)]);
        assert_eq!(n_of_beta(&r, &wv(&[1])).unwrap(), 5);
        let slice = rep(1, &[(&[1], 3), (&[-1], 3)]);
        assert_eq!(n_of_beta(&slice, &wv(&[1])).unwrap(), 3);
        // A direction dominated by every weight counts nothing.
        let high = rep(1, &[(&[2], 4), (&[3], 1)]);
        assert_eq!(n_of_beta(&high, &wv(&[1])).unwrap(), 0);
        assert!(n_of_beta(&r, &wv(&[0])).is_err());
    }

    #[test]
    fn index_set_projective_circle_example() {
        let r = rep(1, &[(&[1], 3), (&[0], 2), (&[-1], 3)]);
        let points = index_set(&r, &RootData::abelian(1)).unwrap();
        assert_eq!(points.len(), 2);
        assert_eq!(points[0].beta, wv(&[-1]));
        assert_eq!(points[1].beta, wv(&[1]));
        for p in &points {
            assert_eq!(p.n_beta, 5);
            assert_eq!(p.moved_roots, 0);
            assert_eq!(p.codim, 10);
        }
    }

    #[test]
    fn index_set_single_repeated_weight() {
        let r = rep(2, &[(&[1, 1], 4)]);
        let points = index_set(&r, &RootData::abelian(2)).unwrap();
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].beta, wv(&[1, 1]));
        assert_eq!(points[0].n_beta, 0);
        assert_eq!(points[0].codim, 0);
    }

    #[test]
    fn index_set_rank_one_chamber_restriction() {
        // Tangent-weight family for a tuple with r coincident points:
        // one chamber point of codimension 2(r-1).
        let roots = RootData::new(1, vec![wv(&[2]), wv(&[-2])], vec![wv(&[2])]).unwrap();
        for (two_n, r) in [(4u32, 3u32), (4, 4), (6, 4), (6, 5), (6, 6)] {
            let family = rep(1, &[(&[1], two_n - r), (&[-1], r)]);
            let points = index_set(&family, &roots).unwrap();
            assert_eq!(points.len(), 1, "2n={two_n} r={r}");
            assert_eq!(points[0].beta, wv(&[1]));
            assert_eq!(points[0].n_beta, r as u64);
            assert_eq!(points[0].moved_roots, 2);
            assert_eq!(points[0].codim, 2 * (r as i64 - 1));
        }
    }

    #[test]
    fn index_set_invariant_under_weight_permutation() {
        let a = rep(2, &[(&[2, 1], 1), (&[1, 2], 2), (&[-1, -1], 1)]);
        let b = rep(2, &[(&[-1, -1], 1), (&[2, 1], 1), (&[1, 2], 2)]);
        let pa = index_set(&a, &RootData::abelian(2)).unwrap();
        let pb = index_set(&b, &RootData::abelian(2)).unwrap();
        assert_eq!(pa.len(), pb.len());
        for (x, y) in pa.iter().zip(&pb) {
            assert_eq!(x.beta, y.beta);
            assert_eq!(x.n_beta, y.n_beta);
            assert_eq!(x.codim, y.codim);
        }
    }

    #[test]
    fn roots_must_close_under_negation() {
        assert!(RootData::new(1, vec![wv(&[2])], vec![]).is_err());
        assert!(RootData::new(1, vec![wv(&[2]), wv(&[-2])], vec![]).is_ok());
    }
}
