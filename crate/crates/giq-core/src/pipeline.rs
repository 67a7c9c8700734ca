//! Pipeline orchestration: balance first (a failure downgrades the
//! report to uncertified but the run continues, since the truncated
//! subspace and its pairings are defined regardless), then strata,
//! series assembly, kernel computation and pairings, finishing with
//! the series-versus-kernel cross-check.

use serde_json::{json, Map, Value};

use crate::balance::{check_weakly_balanced, BalanceVerdict};
use crate::error::{Error, Result};
use crate::groebner::{MonomialOrder, QuotientRingPresentation};
use crate::pairing::{pairing_report, PairingReport};
use crate::poly::RingMap;
use crate::problem::{OutputKind, ProblemSpec};
use crate::rational::{format_rational, Rational};
use crate::series::{morse_assemble, BettiPolynomial, PoincareSeries};
use crate::truncation::{compute_v, TruncationConstraint, VSpace};
use crate::weights::{index_set, IndexPoint};

#[derive(Debug, Clone)]
pub struct IndexFamilyReport {
    pub label: String,
    pub points: Vec<IndexPoint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CrossCheck {
    /// Series-route and kernel-route Betti numbers agree degreewise.
    Agree,
    Disagree {
        degree: u32,
        series: u64,
        kernel: u64,
    },
    /// One of the two routes was not requested or not available.
    NotAvailable,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub label: String,
    pub order: String,
    pub max_degree: u32,
    pub certified: bool,
    pub balance: BalanceVerdict,
    pub strata: Vec<IndexFamilyReport>,
    pub equivariant: Option<PoincareSeries>,
    pub equivariant_expansion: Option<Vec<Rational>>,
    pub series_betti: Option<BettiPolynomial>,
    pub v_space: Option<VSpace>,
    pub pairing: Option<PairingReport>,
    pub cross_check: CrossCheck,
}

/// Compile one constraint spec against the built main ring.
fn build_constraint(
    spec: &ProblemSpec,
    ring_sig: &std::sync::Arc<crate::poly::RingSignature>,
    c: &crate::problem::ConstraintSpec,
    order_kind: crate::groebner::OrderKind,
    bound: u32,
) -> Result<TruncationConstraint> {
    let order = MonomialOrder::natural(&c.target_signature, order_kind);
    let target = QuotientRingPresentation::new_bounded(
        &c.target_signature,
        c.target_relations.clone(),
        order,
        bound,
    )?;
    let restriction = RingMap::new(ring_sig, &c.target_signature, c.images.clone())?;
    TruncationConstraint::new(
        c.label.clone(),
        restriction,
        target,
        c.fiber_vars.clone(),
        spec.resolve_n_h(c)?,
    )
}

/// Run every stage the spec provides data for and assemble the report.
pub fn run_pipeline(spec: &ProblemSpec) -> Result<Report> {
    spec.validate()?;

    let balance = check_weakly_balanced(&spec.slices)?;
    let certified = balance.passed;

    let mut strata = Vec::new();
    for family in &spec.weight_families {
        strata.push(IndexFamilyReport {
            label: family.label.clone(),
            points: index_set(&family.rep, &spec.root_data)?,
        });
    }

    let mut equivariant = None;
    let mut equivariant_expansion = None;
    let mut series_betti = None;
    if let Some(s) = &spec.series {
        let assembled = morse_assemble(&s.ambient, &s.strata)?;
        equivariant_expansion = Some(assembled.expand(spec.max_degree as usize));
        if let Some(tail) = &s.truncation_tail {
            let intersection = assembled.sub(tail);
            let poly = intersection.as_polynomial().ok_or_else(|| {
                Error::integrity(
                    "intersection series did not reduce to a polynomial; \
                     the truncation tail does not match the equivariant series",
                )
            })?;
            series_betti = Some(BettiPolynomial::from_unipoly(poly)?);
        }
        equivariant = Some(assembled);
    }

    let mut v_space = None;
    let mut pairing = None;
    if let Some(ring_spec) = &spec.ring {
        let order = MonomialOrder::natural(&ring_spec.signature, spec.order);
        let ring = QuotientRingPresentation::new_bounded(
            &ring_spec.signature,
            ring_spec.relations.clone(),
            order,
            spec.max_degree,
        )?;
        let constraints = spec
            .constraints
            .iter()
            .map(|c| build_constraint(spec, &ring_spec.signature, c, spec.order, spec.max_degree))
            .collect::<Result<Vec<_>>>()?;
        let v = compute_v(&ring, &constraints, spec.max_degree)?;
        if v.top_nonzero_degree().is_some() {
            pairing = Some(pairing_report(&v)?);
        }
        v_space = Some(v);
    }

    let cross_check = match (&series_betti, &v_space) {
        (Some(series), Some(v)) => {
            let mut verdict = CrossCheck::Agree;
            for d in (0..=spec.max_degree).step_by(2) {
                let s = series.coeff(d);
                let k = v.betti().coeff(d);
                if s != k {
                    verdict = CrossCheck::Disagree {
                        degree: d,
                        series: s,
                        kernel: k,
                    };
                    break;
                }
            }
            verdict
        }
        _ => CrossCheck::NotAvailable,
    };

    Ok(Report {
        label: spec.label.clone(),
        order: spec.order.to_string(),
        max_degree: spec.max_degree,
        certified,
        balance,
        strata,
        equivariant,
        equivariant_expansion,
        series_betti,
        v_space,
        pairing,
        cross_check,
    })
}

// ---------------------------------------------------------------------------
// Report rendering.

fn rational_strings(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|r| Value::String(format_rational(r))).collect())
}

fn matrix_json(m: &[Vec<Rational>]) -> Value {
    Value::Array(m.iter().map(|row| rational_strings(row)).collect())
}

/// Deterministic JSON rendering of a report, honoring the requested
/// output sections.
pub fn report_json(spec: &ProblemSpec, report: &Report) -> Value {
    let mut root = Map::new();
    root.insert("giq-version".into(), json!(1));
    root.insert("label".into(), json!(report.label));
    root.insert("order".into(), json!(report.order));
    root.insert("max-degree".into(), json!(report.max_degree));
    root.insert("certified".into(), json!(report.certified));

    if spec.wants(OutputKind::Balance) {
        let violations: Vec<Value> = report
            .balance
            .violations
            .iter()
            .map(|v| {
                json!({
                    "label": v.label,
                    "beta": Value::Array(
                        v.beta.coords().iter().map(|c| Value::String(format_rational(c))).collect()
                    ),
                    "lhs": v.lhs,
                    "rhs": format_rational(&v.rhs),
                })
            })
            .collect();
        root.insert(
            "balance".into(),
            json!({ "passed": report.balance.passed, "violations": violations }),
        );
    }

    if spec.wants(OutputKind::Strata) {
        let families: Vec<Value> = report
            .strata
            .iter()
            .map(|family| {
                let points: Vec<Value> = family
                    .points
                    .iter()
                    .map(|p| {
                        let certificate: Vec<Value> = p
                            .certificate
                            .iter()
                            .map(|(w, c)| {
                                json!({
                                    "weight": Value::Array(
                                        w.coords()
                                            .iter()
                                            .map(|x| Value::String(format_rational(x)))
                                            .collect()
                                    ),
                                    "coeff": format_rational(c),
                                })
                            })
                            .collect();
                        json!({
                            "beta": Value::Array(
                                p.beta.coords().iter().map(|c| Value::String(format_rational(c))).collect()
                            ),
                            "n": p.n_beta,
                            "moved-roots": p.moved_roots,
                            "codim": p.codim,
                            "certificate": certificate,
                        })
                    })
                    .collect();
                json!({ "family": family.label, "points": points })
            })
            .collect();
        root.insert("strata".into(), Value::Array(families));
    }

    if spec.wants(OutputKind::Series) || spec.wants(OutputKind::Betti) {
        if let Some(eq) = &report.equivariant {
            let mut series = Map::new();
            if spec.wants(OutputKind::Series) {
                series.insert("equivariant".into(), json!(eq.to_string()));
                if let Some(expansion) = &report.equivariant_expansion {
                    series.insert("expansion".into(), rational_strings(expansion));
                }
            }
            if spec.wants(OutputKind::Betti) {
                if let Some(betti) = &report.series_betti {
                    series.insert(
                        "intersection-betti".into(),
                        json!(betti.by_even_degree().to_vec()),
                    );
                }
            }
            root.insert("series".into(), Value::Object(series));
        }
    }

    if spec.wants(OutputKind::Betti) {
        if let Some(v) = &report.v_space {
            let mut bases = Map::new();
            for (d, basis) in v.bases() {
                bases.insert(
                    d.to_string(),
                    Value::Array(
                        basis
                            .iter()
                            .map(|b| Value::String(b.to_string()))
                            .collect(),
                    ),
                );
            }
            root.insert(
                "v-space".into(),
                json!({
                    "betti": v.betti().by_even_degree().to_vec(),
                    "bases": Value::Object(bases),
                }),
            );
        }
    }

    if spec.wants(OutputKind::Pairing) {
        if let Some(p) = &report.pairing {
            let blocks: Vec<Value> = p
                .blocks
                .iter()
                .map(|b| {
                    let mut block = Map::new();
                    block.insert("i".into(), json!(b.degree));
                    block.insert("matrix".into(), matrix_json(&b.matrix));
                    if let Some(det) = &b.determinant {
                        block.insert("det".into(), json!(format_rational(det)));
                    }
                    if let Some(sig) = b.signature {
                        block.insert("signature".into(), json!(sig));
                    }
                    Value::Object(block)
                })
                .collect();
            root.insert(
                "pairing".into(),
                json!({
                    "top-degree": p.top_degree,
                    "top-class": p.top_class.to_string(),
                    "blocks": blocks,
                }),
            );
        }
    }

    let cross = match &report.cross_check {
        CrossCheck::Agree => json!("agree"),
        CrossCheck::Disagree {
            degree,
            series,
            kernel,
        } => json!({
            "disagree": { "degree": degree, "series": series, "kernel": kernel }
        }),
        CrossCheck::NotAvailable => json!("not-available"),
    };
    root.insert("cross-check".into(), cross);
    Value::Object(root)
}

/// Aligned plain-text rendering.
pub fn report_text(spec: &ProblemSpec, report: &Report) -> String {
    let mut out = String::new();
    let push = |out: &mut String, line: String| {
        out.push_str(&line);
        out.push('\n');
    };
    push(
        &mut out,
        format!(
            "problem: {}   order: {}   max degree: {}",
            report.label, report.order, report.max_degree
        ),
    );
    if spec.wants(OutputKind::Balance) {
        if report.balance.passed {
            push(&mut out, "balance: PASSED (report certified)".into());
        } else {
            push(
                &mut out,
                "balance: FAILED (report NOT certified: the subspace identification \
                 is unsupported on this instance)"
                    .into(),
            );
            for v in &report.balance.violations {
                push(
                    &mut out,
                    format!(
                        "  violation at slice `{}`, beta = {}: {} is not > {}",
                        v.label,
                        v.beta.format(),
                        v.lhs,
                        format_rational(&v.rhs)
                    ),
                );
            }
        }
    }
    if spec.wants(OutputKind::Strata) && !report.strata.is_empty() {
        push(&mut out, "strata:".into());
        for family in &report.strata {
            push(&mut out, format!("  family {}:", family.label));
            for p in &family.points {
                push(
                    &mut out,
                    format!(
                        "    beta = {}: n = {}, moved roots = {}, codim = {}",
                        p.beta.format(),
                        p.n_beta,
                        p.moved_roots,
                        p.codim
                    ),
                );
            }
        }
    }
    if spec.wants(OutputKind::Series) {
        if let Some(eq) = &report.equivariant {
            push(&mut out, format!("equivariant series: {eq}"));
            if let Some(exp) = &report.equivariant_expansion {
                let cs: Vec<String> = exp.iter().map(|c| format_rational(c)).collect();
                push(&mut out, format!("  expansion: [{}]", cs.join(", ")));
            }
        }
    }
    if spec.wants(OutputKind::Betti) {
        if let Some(b) = &report.series_betti {
            push(&mut out, format!("intersection betti (series route): {b}"));
        }
        if let Some(v) = &report.v_space {
            push(&mut out, format!("intersection betti (kernel route): {}", v.betti()));
            for (d, basis) in v.bases() {
                if basis.is_empty() {
                    continue;
                }
                let names: Vec<String> = basis.iter().map(|b| b.to_string()).collect();
                push(&mut out, format!("  V^{d}: {}", names.join(", ")));
            }
        }
    }
    if spec.wants(OutputKind::Pairing) {
        if let Some(p) = &report.pairing {
            push(
                &mut out,
                format!(
                    "pairing (top degree {}, in units of top class {}):",
                    p.top_degree, p.top_class
                ),
            );
            for b in &p.blocks {
                let mut line = format!("  block i={} vs {}:", b.degree, p.top_degree - b.degree);
                if b.matrix.is_empty() {
                    line.push_str(" (empty)");
                    push(&mut out, line);
                    continue;
                }
                push(&mut out, line);
                for row in format_matrix(&b.matrix) {
                    push(&mut out, format!("    {row}"));
                }
                let mut tailparts = Vec::new();
                if let Some(det) = &b.determinant {
                    tailparts.push(format!("det = {}", format_rational(det)));
                }
                if let Some(sig) = b.signature {
                    tailparts.push(format!("signature = {sig}"));
                }
                if !tailparts.is_empty() {
                    push(&mut out, format!("    {}", tailparts.join(", ")));
                }
            }
        }
    }
    let cross = match &report.cross_check {
        CrossCheck::Agree => "agree".to_string(),
        CrossCheck::Disagree {
            degree,
            series,
            kernel,
        } => format!("DISAGREE at degree {degree}: series {series}, kernel {kernel}"),
        CrossCheck::NotAvailable => "not available".to_string(),
    };
    push(&mut out, format!("cross-check (series vs kernel): {cross}"));
    out
}

fn format_matrix(m: &[Vec<Rational>]) -> Vec<String> {
    let cols = m.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut widths = vec![0usize; cols];
    let cells: Vec<Vec<String>> = m
        .iter()
        .map(|row| row.iter().map(|c| format_rational(c)).collect())
        .collect();
    for row in &cells {
        for (j, cell) in row.iter().enumerate() {
            widths[j] = widths[j].max(cell.len());
        }
    }
    cells
        .iter()
        .map(|row| {
            let padded: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(j, cell)| format!("{cell:>width$}", width = widths[j]))
                .collect();
            format!("[ {} ]", padded.join("  "))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{p1_sl2_problem, pn_cstar_problem};

    #[test]
    fn circle_preset_full_pipeline() {
        let spec = pn_cstar_problem(3, 2, 3).unwrap();
        let report = run_pipeline(&spec).unwrap();
        assert!(report.certified);
        assert_eq!(report.cross_check, CrossCheck::Agree);
        let v = report.v_space.as_ref().unwrap();
        assert_eq!(v.betti().by_even_degree(), &[1, 2, 3, 3, 3, 2, 1]);
        let p = report.pairing.as_ref().unwrap();
        assert_eq!(p.top_degree, 12);
        assert_eq!(p.top_class.to_string(), "xi^2*rho^4");
        // Strata: two index points of codimension ten.
        assert_eq!(report.strata.len(), 1);
        assert_eq!(report.strata[0].points.len(), 2);
        assert!(report.strata[0].points.iter().all(|p| p.codim == 10));
    }

    #[test]
    fn tuple_preset_full_pipeline() {
        let spec = p1_sl2_problem(2).unwrap();
        let report = run_pipeline(&spec).unwrap();
        assert!(report.certified);
        assert_eq!(report.cross_check, CrossCheck::Agree);
        let v = report.v_space.as_ref().unwrap();
        assert_eq!(v.betti().by_even_degree(), &[1, 1]);
        let p = report.pairing.as_ref().unwrap();
        assert_eq!(p.top_degree, 2);
        for b in &p.blocks {
            assert!(b.determinant.as_ref().is_some_and(|d| !num_traits::Zero::is_zero(d)));
        }
        // Strata codimensions 2(r-1) for r = 3, 4.
        let codims: Vec<i64> = report
            .strata
            .iter()
            .flat_map(|f| f.points.iter().map(|p| p.codim))
            .collect();
        assert_eq!(codims, vec![4, 6]);
    }

    #[test]
    fn json_report_is_deterministic() {
        let spec = pn_cstar_problem(2, 2, 2).unwrap();
        let a = serde_json::to_string_pretty(&report_json(&spec, &run_pipeline(&spec).unwrap())).unwrap();
        let b = serde_json::to_string_pretty(&report_json(&spec, &run_pipeline(&spec).unwrap())).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"cross-check\": \"agree\""));
    }

    #[test]
    fn uncertified_run_still_computes() {
        // An unbalanced hand-written spec: balance fails, everything
        // else still runs.
        let text = "giq-version: 1\nmax-degree: 4\n\
                    [slice S]\ndim-h: 1\nweight: 1 x 2\nweight: -1 x 1\n\
                    [ring]\nvar: xi 2\nrelation: xi^3\n";
        let spec = crate::problem::parse_problem(text).unwrap();
        let report = run_pipeline(&spec).unwrap();
        assert!(!report.certified);
        assert!(!report.balance.passed);
        let v = report.v_space.as_ref().unwrap();
        assert_eq!(v.betti().by_even_degree(), &[1, 1, 1]);
        let text_out = report_text(&spec, &report);
        assert!(text_out.contains("NOT certified"));
    }
}
