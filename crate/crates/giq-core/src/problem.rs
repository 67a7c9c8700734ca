//! Problem files: a line-oriented text format describing an instance
//! (group data, weights, slices, ring presentation, restriction
//! constraints, series data) or naming a preset, with validation and
//! positional errors.
//!
//! ```text
//! giq-version: 1
//! label: circle on the seven-dimensional projective space
//! max-degree: 12
//! order: lex
//!
//! [group]
//! rank: 1
//!
//! [weights ambient]
//! weight: 1 x 3
//! weight: 0 x 2
//! weight: -1 x 3
//!
//! [slice S1]
//! dim-h: 1
//! weight: 1 x 3
//! weight: -1 x 3
//!
//! [ring]
//! var: xi 2
//! var: rho 2
//! relation: xi^5 - 3*xi^4*rho + 3*xi^3*rho^2 - xi^2*rho^3
//! relation: xi^5 + 3*xi^4*rho + 3*xi^3*rho^2 + xi^2*rho^3
//!
//! [constraint S1]
//! n-h: derive
//! target-var: xip 2 base
//! target-var: rho 2 fiber
//! target-relation: xip^2
//! map: xi -> xip
//! map: rho -> rho
//!
//! [series]
//! ambient: (1 + t^2 + t^4 + t^6 + t^8 + t^10 + t^12 + t^14) / (1 - t^2)
//! stratum: 10 | (1 + t^2 + t^4) / (1 - t^2)
//! truncation-tail: (t^6 + t^8) / (1 - t^2)
//! ```
//!
//! A file may instead say `preset: pn-cstar(3,2,3)` or
//! `preset: p1-sl2(2)` and omit the data sections.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::balance::SliceSpec;
use crate::error::{Error, Result};
use crate::groebner::OrderKind;
use crate::poly::{GradedPolynomial, RingMap, RingSignature};
use crate::rational::parse_rational;
use crate::series::PoincareSeries;
use crate::weights::{RepresentationWeights, RootData, WeightVector};

/// Truncation level: given outright, or derived from a slice as the
/// weight multiplicity sum minus the subgroup dimension.
#[derive(Debug, Clone)]
pub enum NhSpec {
    Given(u32),
    DeriveFromSlice(String),
}

/// Presentation data for the main graded ring.
#[derive(Debug, Clone)]
pub struct RingSpec {
    pub signature: Arc<RingSignature>,
    pub relations: Vec<GradedPolynomial>,
}

/// One restriction constraint, before the maps are compiled.
#[derive(Debug, Clone)]
pub struct ConstraintSpec {
    pub label: String,
    pub target_signature: Arc<RingSignature>,
    pub target_relations: Vec<GradedPolynomial>,
    pub fiber_vars: Vec<usize>,
    /// Per main-ring generator, its image over the target signature.
    pub images: Vec<GradedPolynomial>,
    pub n_h: NhSpec,
}

/// Series inputs for the Morse assembly route.
#[derive(Debug, Clone)]
pub struct SeriesSpec {
    pub ambient: PoincareSeries,
    pub strata: Vec<(u32, PoincareSeries)>,
    pub truncation_tail: Option<PoincareSeries>,
}

/// A labelled weight multiset whose index set the strata stage reports.
#[derive(Debug, Clone)]
pub struct WeightFamily {
    pub label: String,
    pub rep: RepresentationWeights,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    Strata,
    Balance,
    Series,
    Betti,
    Pairing,
}

impl OutputKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "strata" => Ok(OutputKind::Strata),
            "balance" => Ok(OutputKind::Balance),
            "series" => Ok(OutputKind::Series),
            "betti" => Ok(OutputKind::Betti),
            "pairing" => Ok(OutputKind::Pairing),
            other => Err(Error::invalid(format!("unknown output `{other}`"))),
        }
    }
}

/// A validated instance, ready for the pipeline.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub label: String,
    pub max_degree: u32,
    pub order: OrderKind,
    pub rank: usize,
    pub root_data: RootData,
    pub weight_families: Vec<WeightFamily>,
    pub slices: Vec<SliceSpec>,
    pub ring: Option<RingSpec>,
    pub constraints: Vec<ConstraintSpec>,
    pub series: Option<SeriesSpec>,
    /// Empty means all sections.
    pub outputs: Vec<OutputKind>,
}

impl ProblemSpec {
    pub fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.is_empty() || self.outputs.contains(&kind)
    }

    /// Resolve a constraint's truncation level, deriving it from the
    /// named slice when requested: half the real slice dimension minus
    /// the subgroup dimension.
    pub fn resolve_n_h(&self, c: &ConstraintSpec) -> Result<u32> {
        match &c.n_h {
            NhSpec::Given(n) => Ok(*n),
            NhSpec::DeriveFromSlice(label) => {
                let slice = find_slice(&self.slices, label).ok_or_else(|| {
                    Error::invalid(format!(
                        "constraint `{}` derives its level from unknown slice `{label}`",
                        c.label
                    ))
                })?;
                let mult = slice.slice_weights.multiplicity_sum();
                let dim_h = slice.dim_h as u64;
                if mult < dim_h {
                    return Err(Error::invalid(format!(
                        "slice `{label}`: truncation level would be negative \
                         ({mult} weight multiplicities, subgroup dimension {dim_h})"
                    )));
                }
                Ok((mult - dim_h) as u32)
            }
        }
    }

    /// Structural checks that need the whole spec.
    pub fn validate(&self) -> Result<()> {
        if self.max_degree % 2 != 0 {
            return Err(Error::invalid(format!(
                "max-degree {} must be even",
                self.max_degree
            )));
        }
        for family in &self.weight_families {
            if family.rep.rank() != self.rank {
                return Err(Error::invalid(format!(
                    "weight family `{}` has rank {}, group rank is {}",
                    family.label,
                    family.rep.rank(),
                    self.rank
                )));
            }
        }
        if !self.constraints.is_empty() && self.ring.is_none() {
            return Err(Error::invalid(
                "constraints are given but there is no [ring] section",
            ));
        }
        if let Some(ring) = &self.ring {
            for r in &ring.relations {
                if r.homogeneous_degree().is_none() {
                    return Err(Error::invalid(format!("relation `{r}` is not homogeneous")));
                }
            }
            for c in &self.constraints {
                // Degree preservation and signature agreement.
                RingMap::new(&ring.signature, &c.target_signature, c.images.clone())?;
                self.resolve_n_h(c)?;
            }
        }
        Ok(())
    }
}

fn find_slice<'a>(slices: &'a [SliceSpec], label: &str) -> Option<&'a SliceSpec> {
    for s in slices {
        if s.label == label {
            return Some(s);
        }
        if let Some(found) = find_slice(&s.sub_loci, label) {
            return Some(found);
        }
    }
    None
}

// ---------------------------------------------------------------------------
// File parsing.

fn err_at(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

struct RawSection {
    line: usize,
    kind: String,
    arg: String,
    entries: Vec<(usize, String, String)>,
}

/// Parse and validate a problem file.
pub fn parse_problem(text: &str) -> Result<ProblemSpec> {
    let mut header: Vec<(usize, String, String)> = Vec::new();
    let mut sections: Vec<RawSection> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.split_once('#') {
            Some((before, _)) => before.trim(),
            None => raw.trim(),
        };
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let inner = rest
                .strip_suffix(']')
                .ok_or_else(|| err_at(line_no, "unterminated section header"))?
                .trim();
            let (kind, arg) = match inner.split_once(char::is_whitespace) {
                Some((k, a)) => (k.to_string(), a.trim().to_string()),
                None => (inner.to_string(), String::new()),
            };
            if kind.is_empty() {
                return Err(err_at(line_no, "empty section header"));
            }
            sections.push(RawSection {
                line: line_no,
                kind,
                arg,
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| err_at(line_no, format!("expected `key: value`, got `{line}`")))?;
        let entry = (line_no, key.trim().to_string(), value.trim().to_string());
        match sections.last_mut() {
            Some(section) => section.entries.push(entry),
            None => header.push(entry),
        }
    }

    let mut version: Option<u32> = None;
    let mut label: Option<String> = None;
    let mut preset: Option<(usize, String)> = None;
    let mut max_degree: Option<u32> = None;
    let mut order: Option<OrderKind> = None;
    let mut outputs: Vec<OutputKind> = Vec::new();
    for (line, key, value) in &header {
        match key.as_str() {
            "giq-version" => {
                version = Some(
                    value
                        .parse()
                        .map_err(|_| err_at(*line, format!("bad version `{value}`")))?,
                );
            }
            "label" => label = Some(value.clone()),
            "preset" => preset = Some((*line, value.clone())),
            "max-degree" => {
                max_degree = Some(
                    value
                        .parse()
                        .map_err(|_| err_at(*line, format!("bad max-degree `{value}`")))?,
                );
            }
            "order" => {
                order = Some(OrderKind::parse(value).map_err(|e| err_at(*line, e.to_string()))?)
            }
            "outputs" => {
                for token in value.split(',') {
                    outputs.push(
                        OutputKind::parse(token.trim()).map_err(|e| err_at(*line, e.to_string()))?,
                    );
                }
            }
            other => return Err(err_at(*line, format!("unknown header key `{other}`"))),
        }
    }
    match version {
        Some(1) => {}
        Some(v) => return Err(err_at(1, format!("unsupported giq-version {v}"))),
        None => return Err(err_at(1, "missing `giq-version: 1` header")),
    }

    if let Some((line, stanza)) = preset {
        if !sections.is_empty() {
            return Err(err_at(
                line,
                "a preset stanza cannot be combined with data sections",
            ));
        }
        let mut spec = parse_preset_stanza(line, &stanza)?;
        if let Some(label) = label {
            spec.label = label;
        }
        if let Some(d) = max_degree {
            spec.max_degree = d;
        }
        if let Some(o) = order {
            spec.order = o;
        }
        if !outputs.is_empty() {
            spec.outputs = outputs;
        }
        spec.validate()?;
        return Ok(spec);
    }

    let mut builder = SpecBuilder::default();
    for section in &sections {
        match section.kind.as_str() {
            "group" => builder.group(section)?,
            "weights" => builder.weights(section)?,
            "slice" => builder.slice(section)?,
            "ring" => builder.ring(section)?,
            "constraint" => builder.constraint(section)?,
            "series" => builder.series(section)?,
            other => return Err(err_at(section.line, format!("unknown section `{other}`"))),
        }
    }
    let spec = builder.finish(label, max_degree, order, outputs)?;
    spec.validate()?;
    Ok(spec)
}

fn parse_preset_stanza(line: usize, stanza: &str) -> Result<ProblemSpec> {
    let open = stanza
        .find('(')
        .ok_or_else(|| err_at(line, format!("expected `name(args)`, got `{stanza}`")))?;
    let close = stanza
        .rfind(')')
        .ok_or_else(|| err_at(line, format!("unterminated preset arguments in `{stanza}`")))?;
    let name = stanza[..open].trim();
    let args: Vec<u32> = stanza[open + 1..close]
        .split(',')
        .map(|a| {
            a.trim()
                .parse()
                .map_err(|_| err_at(line, format!("bad preset argument `{}`", a.trim())))
        })
        .collect::<Result<_>>()?;
    crate::presets::build_preset(name, &args)
}

#[derive(Default)]
struct SpecBuilder {
    rank: Option<usize>,
    roots: Vec<WeightVector>,
    chamber: Vec<WeightVector>,
    weight_families: Vec<WeightFamily>,
    /// label -> (parent, slice-without-children)
    slices: Vec<(String, Option<String>, SliceSpec)>,
    ring: Option<RingSpec>,
    constraints: Vec<ConstraintSpec>,
    series: Option<SeriesSpec>,
}

fn parse_weight_line(line: usize, value: &str) -> Result<(WeightVector, u32)> {
    let (coords_text, mult) = match value.split_once(" x ") {
        Some((c, m)) => (
            c,
            m.trim()
                .parse::<u32>()
                .map_err(|_| err_at(line, format!("bad multiplicity `{}`", m.trim())))?,
        ),
        None => (value, 1),
    };
    let coords = coords_text
        .split_whitespace()
        .map(|c| parse_rational(c).map_err(|e| err_at(line, e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    if coords.is_empty() {
        return Err(err_at(line, "empty weight vector"));
    }
    Ok((WeightVector::new(coords), mult))
}

fn parse_vector_line(line: usize, value: &str) -> Result<WeightVector> {
    let coords = value
        .split_whitespace()
        .map(|c| parse_rational(c).map_err(|e| err_at(line, e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    if coords.is_empty() {
        return Err(err_at(line, "empty vector"));
    }
    Ok(WeightVector::new(coords))
}

impl SpecBuilder {
    fn group(&mut self, section: &RawSection) -> Result<()> {
        for (line, key, value) in &section.entries {
            match key.as_str() {
                "rank" => {
                    self.rank = Some(
                        value
                            .parse()
                            .map_err(|_| err_at(*line, format!("bad rank `{value}`")))?,
                    )
                }
                "root" => self.roots.push(parse_vector_line(*line, value)?),
                "chamber" => self.chamber.push(parse_vector_line(*line, value)?),
                other => return Err(err_at(*line, format!("unknown [group] key `{other}`"))),
            }
        }
        Ok(())
    }

    fn weights(&mut self, section: &RawSection) -> Result<()> {
        let label = if section.arg.is_empty() {
            "ambient".to_string()
        } else {
            section.arg.clone()
        };
        let mut entries = Vec::new();
        let mut rank = None;
        for (line, key, value) in &section.entries {
            match key.as_str() {
                "weight" => {
                    let (w, m) = parse_weight_line(*line, value)?;
                    if let Some(r) = rank {
                        if w.rank() != r {
                            return Err(err_at(*line, "weights of mixed rank in one family"));
                        }
                    }
                    rank = Some(w.rank());
                    entries.push((w, m));
                }
                other => return Err(err_at(*line, format!("unknown [weights] key `{other}`"))),
            }
        }
        let rank = rank.ok_or_else(|| err_at(section.line, "weight family has no weights"))?;
        let rep = RepresentationWeights::new(rank, entries)
            .map_err(|e| err_at(section.line, e.to_string()))?;
        self.weight_families.push(WeightFamily { label, rep });
        Ok(())
    }

    fn slice(&mut self, section: &RawSection) -> Result<()> {
        if section.arg.is_empty() {
            return Err(err_at(section.line, "slice sections need a label: [slice L]"));
        }
        let label = section.arg.clone();
        let mut dim_h: Option<u32> = None;
        let mut weights: Vec<(WeightVector, u32)> = Vec::new();
        let mut roots = Vec::new();
        let mut chamber = Vec::new();
        let mut parent: Option<String> = None;
        for (line, key, value) in &section.entries {
            match key.as_str() {
                "dim-h" => {
                    dim_h = Some(
                        value
                            .parse()
                            .map_err(|_| err_at(*line, format!("bad dim-h `{value}`")))?,
                    )
                }
                "weight" => weights.push(parse_weight_line(*line, value)?),
                "root" => roots.push(parse_vector_line(*line, value)?),
                "chamber" => chamber.push(parse_vector_line(*line, value)?),
                "parent" => parent = Some(value.clone()),
                other => return Err(err_at(*line, format!("unknown [slice] key `{other}`"))),
            }
        }
        let dim_h = dim_h.ok_or_else(|| err_at(section.line, "slice needs `dim-h`"))?;
        let rank = weights
            .first()
            .map(|(w, _)| w.rank())
            .unwrap_or_else(|| roots.first().map(|r| r.rank()).unwrap_or(1));
        let slice = SliceSpec {
            label: label.clone(),
            dim_h,
            slice_weights: RepresentationWeights::new(rank, weights)
                .map_err(|e| err_at(section.line, e.to_string()))?,
            roots: RootData::new(rank, roots, chamber)
                .map_err(|e| err_at(section.line, e.to_string()))?,
            sub_loci: Vec::new(),
        };
        self.slices.push((label, parent, slice));
        Ok(())
    }

    fn ring(&mut self, section: &RawSection) -> Result<()> {
        let mut vars: Vec<(String, u32)> = Vec::new();
        let mut relation_lines: Vec<(usize, String)> = Vec::new();
        for (line, key, value) in &section.entries {
            match key.as_str() {
                "var" => vars.push(parse_var_line(*line, value)?),
                "relation" => relation_lines.push((*line, value.clone())),
                other => return Err(err_at(*line, format!("unknown [ring] key `{other}`"))),
            }
        }
        let signature =
            RingSignature::new(vars).map_err(|e| err_at(section.line, e.to_string()))?;
        let mut relations = Vec::new();
        for (line, text) in relation_lines {
            let p = GradedPolynomial::parse(&signature, &text)
                .map_err(|e| err_at(line, e.to_string()))?;
            if p.homogeneous_degree().is_none() {
                return Err(err_at(line, format!("relation `{text}` is not homogeneous")));
            }
            relations.push(p);
        }
        self.ring = Some(RingSpec {
            signature,
            relations,
        });
        Ok(())
    }

    fn constraint(&mut self, section: &RawSection) -> Result<()> {
        if section.arg.is_empty() {
            return Err(err_at(section.line, "constraint sections need a label"));
        }
        let ring = self
            .ring
            .as_ref()
            .ok_or_else(|| err_at(section.line, "[constraint] must come after [ring]"))?;
        let mut vars: Vec<(String, u32)> = Vec::new();
        let mut fiber_names: Vec<String> = Vec::new();
        let mut relation_lines: Vec<(usize, String)> = Vec::new();
        let mut map_lines: Vec<(usize, String)> = Vec::new();
        let mut n_h: Option<NhSpec> = None;
        for (line, key, value) in &section.entries {
            match key.as_str() {
                "n-h" => {
                    n_h = Some(if value == "derive" {
                        NhSpec::DeriveFromSlice(section.arg.clone())
                    } else {
                        NhSpec::Given(
                            value
                                .parse()
                                .map_err(|_| err_at(*line, format!("bad n-h `{value}`")))?,
                        )
                    })
                }
                "target-var" => {
                    let (name, degree, role) = parse_target_var(*line, value)?;
                    if role == "fiber" {
                        fiber_names.push(name.clone());
                    } else if role != "base" {
                        return Err(err_at(*line, "target-var role must be `base` or `fiber`"));
                    }
                    vars.push((name, degree));
                }
                "target-relation" => relation_lines.push((*line, value.clone())),
                "map" => map_lines.push((*line, value.clone())),
                other => return Err(err_at(*line, format!("unknown [constraint] key `{other}`"))),
            }
        }
        let n_h = n_h.ok_or_else(|| err_at(section.line, "constraint needs `n-h`"))?;
        let target_signature =
            RingSignature::new(vars).map_err(|e| err_at(section.line, e.to_string()))?;
        let fiber_vars = fiber_names
            .iter()
            .map(|n| target_signature.var_index(n).expect("just inserted"))
            .collect();
        let mut target_relations = Vec::new();
        for (line, text) in relation_lines {
            let p = GradedPolynomial::parse(&target_signature, &text)
                .map_err(|e| err_at(line, e.to_string()))?;
            if p.homogeneous_degree().is_none() {
                return Err(err_at(line, format!("relation `{text}` is not homogeneous")));
            }
            target_relations.push(p);
        }
        let mut images: Vec<Option<GradedPolynomial>> = vec![None; ring.signature.arity()];
        for (line, text) in map_lines {
            let (from, to) = text
                .split_once("->")
                .ok_or_else(|| err_at(line, "map lines look like `map: xi -> xip`"))?;
            let from = from.trim();
            let idx = ring
                .signature
                .var_index(from)
                .ok_or_else(|| err_at(line, format!("unknown main-ring variable `{from}`")))?;
            let image = if to.trim() == "0" {
                GradedPolynomial::zero(&target_signature)
            } else {
                GradedPolynomial::parse(&target_signature, to.trim())
                    .map_err(|e| err_at(line, e.to_string()))?
            };
            images[idx] = Some(image);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, img)| {
                img.ok_or_else(|| {
                    err_at(
                        section.line,
                        format!("missing map for variable `{}`", ring.signature.name(i)),
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        self.constraints.push(ConstraintSpec {
            label: section.arg.clone(),
            target_signature,
            target_relations,
            fiber_vars,
            images,
            n_h,
        });
        Ok(())
    }

    fn series(&mut self, section: &RawSection) -> Result<()> {
        let mut ambient = None;
        let mut strata = Vec::new();
        let mut tail = None;
        for (line, key, value) in &section.entries {
            match key.as_str() {
                "ambient" => {
                    ambient =
                        Some(PoincareSeries::parse(value).map_err(|e| err_at(*line, e.to_string()))?)
                }
                "stratum" => {
                    let (codim, series) = value
                        .split_once('|')
                        .ok_or_else(|| err_at(*line, "stratum lines look like `stratum: 10 | (...) / (...)`"))?;
                    let codim: u32 = codim
                        .trim()
                        .parse()
                        .map_err(|_| err_at(*line, format!("bad codimension `{}`", codim.trim())))?;
                    let series = PoincareSeries::parse(series.trim())
                        .map_err(|e| err_at(*line, e.to_string()))?;
                    strata.push((codim, series));
                }
                "truncation-tail" => {
                    tail =
                        Some(PoincareSeries::parse(value).map_err(|e| err_at(*line, e.to_string()))?)
                }
                other => return Err(err_at(*line, format!("unknown [series] key `{other}`"))),
            }
        }
        let ambient = ambient.ok_or_else(|| err_at(section.line, "series needs `ambient`"))?;
        self.series = Some(SeriesSpec {
            ambient,
            strata,
            truncation_tail: tail,
        });
        Ok(())
    }

    fn finish(
        self,
        label: Option<String>,
        max_degree: Option<u32>,
        order: Option<OrderKind>,
        outputs: Vec<OutputKind>,
    ) -> Result<ProblemSpec> {
        let rank = self.rank.unwrap_or_else(|| {
            self.weight_families
                .first()
                .map(|f| f.rep.rank())
                .unwrap_or(0)
        });
        let root_data = RootData::new(rank, self.roots, self.chamber)?;
        let slices = assemble_slice_tree(self.slices)?;
        let max_degree = match max_degree {
            Some(d) => d,
            None if self.ring.is_some() => {
                return Err(Error::invalid(
                    "max-degree is required when a [ring] section is present",
                ))
            }
            None => 0,
        };
        Ok(ProblemSpec {
            label: label.unwrap_or_else(|| "problem".to_string()),
            max_degree,
            order: order.unwrap_or(OrderKind::Lex),
            rank,
            root_data,
            weight_families: self.weight_families,
            slices,
            ring: self.ring,
            constraints: self.constraints,
            series: self.series,
            outputs,
        })
    }
}

fn parse_var_line(line: usize, value: &str) -> Result<(String, u32)> {
    let mut it = value.split_whitespace();
    let name = it
        .next()
        .ok_or_else(|| err_at(line, "var lines look like `var: xi 2`"))?;
    let degree = it
        .next()
        .ok_or_else(|| err_at(line, format!("variable `{name}` needs a degree")))?
        .parse()
        .map_err(|_| err_at(line, format!("bad degree for `{name}`")))?;
    if it.next().is_some() {
        return Err(err_at(line, "trailing input after variable degree"));
    }
    Ok((name.to_string(), degree))
}

fn parse_target_var(line: usize, value: &str) -> Result<(String, u32, String)> {
    let mut it = value.split_whitespace();
    let name = it
        .next()
        .ok_or_else(|| err_at(line, "target-var lines look like `target-var: rho 2 fiber`"))?;
    let degree: u32 = it
        .next()
        .ok_or_else(|| err_at(line, format!("variable `{name}` needs a degree")))?
        .parse()
        .map_err(|_| err_at(line, format!("bad degree for `{name}`")))?;
    let role = it
        .next()
        .ok_or_else(|| err_at(line, format!("variable `{name}` needs `base` or `fiber`")))?;
    Ok((name.to_string(), degree, role.to_string()))
}

fn assemble_slice_tree(
    flat: Vec<(String, Option<String>, SliceSpec)>,
) -> Result<Vec<SliceSpec>> {
    let mut labels = BTreeMap::new();
    for (i, (label, _, _)) in flat.iter().enumerate() {
        if labels.insert(label.clone(), i).is_some() {
            return Err(Error::invalid(format!("duplicate slice label `{label}`")));
        }
    }
    // Attach children to parents, deepest first, by repeatedly moving
    // slices without unresolved children into their parent.
    let mut nodes: Vec<Option<SliceSpec>> = Vec::new();
    let mut parents: Vec<Option<usize>> = Vec::new();
    for (label, parent, slice) in &flat {
        let parent_idx = match parent {
            Some(p) => Some(*labels.get(p).ok_or_else(|| {
                Error::invalid(format!("slice `{label}` names unknown parent `{p}`"))
            })?),
            None => None,
        };
        parents.push(parent_idx);
        nodes.push(Some(slice.clone()));
    }
    // Children counts for a topological fold.
    let n = nodes.len();
    let mut remaining_children = vec![0usize; n];
    for p in parents.iter().flatten() {
        remaining_children[*p] += 1;
    }
    let mut queue: Vec<usize> = (0..n).filter(|&i| remaining_children[i] == 0).collect();
    let mut processed = 0;
    while let Some(i) = queue.pop() {
        processed += 1;
        if let Some(p) = parents[i] {
            let child = nodes[i].take().expect("child taken once");
            nodes[p]
                .as_mut()
                .expect("parent still present")
                .sub_loci
                .push(child);
            remaining_children[p] -= 1;
            if remaining_children[p] == 0 {
                queue.push(p);
            }
        }
    }
    if processed != n {
        return Err(Error::invalid("slice parent links form a cycle"));
    }
    let mut roots: Vec<SliceSpec> = nodes.into_iter().flatten().collect();
    for r in &mut roots {
        sort_children(r);
    }
    Ok(roots)
}

fn sort_children(slice: &mut SliceSpec) {
    slice.sub_loci.sort_by(|a, b| a.label.cmp(&b.label));
    for c in &mut slice.sub_loci {
        sort_children(c);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXPLICIT: &str = r#"
giq-version: 1
label: explicit circle example
max-degree: 12

[group]
rank: 1

[weights ambient]
weight: 1 x 3
weight: 0 x 2
weight: -1 x 3

[slice S1]
dim-h: 1
weight: 1 x 3
weight: -1 x 3

[ring]
var: xi 2
var: rho 2
relation: xi^5 - 3*xi^4*rho + 3*xi^3*rho^2 - xi^2*rho^3
relation: xi^5 + 3*xi^4*rho + 3*xi^3*rho^2 + xi^2*rho^3

[constraint S1]
n-h: derive
target-var: xip 2 base
target-var: rho 2 fiber
target-relation: xip^2
map: xi -> xip
map: rho -> rho

[series]
ambient: (1 + t^2 + t^4 + t^6 + t^8 + t^10 + t^12 + t^14) / (1 - t^2)
stratum: 10 | (1 + t^2 + t^4) / (1 - t^2)
stratum: 10 | (1 + t^2 + t^4) / (1 - t^2)
truncation-tail: (t^6 + t^8) / (1 - t^2)
"#;

    #[test]
    fn parses_explicit_file() {
        let spec = parse_problem(EXPLICIT).unwrap();
        assert_eq!(spec.max_degree, 12);
        assert_eq!(spec.rank, 1);
        assert_eq!(spec.weight_families.len(), 1);
        assert_eq!(spec.slices.len(), 1);
        assert_eq!(spec.constraints.len(), 1);
        assert_eq!(spec.resolve_n_h(&spec.constraints[0]).unwrap(), 5);
        assert!(spec.series.is_some());
        assert_eq!(spec.series.as_ref().unwrap().strata.len(), 2);
    }

    #[test]
    fn preset_stanza_builds_spec() {
        let text = "giq-version: 1\npreset: pn-cstar(3,2,3)\n";
        let spec = parse_problem(text).unwrap();
        assert!(spec.ring.is_some());
        assert_eq!(spec.constraints.len(), 1);

        let text = "giq-version: 1\npreset: p1-sl2(2)\nmax-degree: 8\n";
        let spec = parse_problem(text).unwrap();
        assert_eq!(spec.max_degree, 8);
        assert_eq!(spec.constraints.len(), 3);
    }

    #[test]
    fn missing_version_is_positional() {
        let err = parse_problem("label: x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn odd_degree_variable_rejected() {
        let text = "giq-version: 1\nmax-degree: 4\n[ring]\nvar: xi 3\n";
        assert!(parse_problem(text).is_err());
    }

    #[test]
    fn inhomogeneous_relation_rejected_with_line() {
        let text =
            "giq-version: 1\nmax-degree: 4\n[ring]\nvar: xi 2\nrelation: xi^2 + xi\n";
        let err = parse_problem(text).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 5),
            other => panic!("expected positional error, got {other}"),
        }
    }

    #[test]
    fn missing_map_rejected() {
        let text = "giq-version: 1\nmax-degree: 4\n\
                    [ring]\nvar: xi 2\nvar: rho 2\n\
                    [constraint C]\nn-h: 1\ntarget-var: rho 2 fiber\nmap: rho -> rho\n";
        assert!(parse_problem(text).is_err());
    }

    #[test]
    fn slice_tree_assembly() {
        let text = "giq-version: 1\n\
                    [slice A]\ndim-h: 2\nweight: 1 x 2\nweight: -1 x 2\n\
                    [slice B]\ndim-h: 1\nweight: 1\nweight: -1\nparent: A\n";
        let spec = parse_problem(text).unwrap();
        assert_eq!(spec.slices.len(), 1);
        assert_eq!(spec.slices[0].label, "A");
        assert_eq!(spec.slices[0].sub_loci.len(), 1);
        assert_eq!(spec.slices[0].sub_loci[0].label, "B");

        let cyclic = "giq-version: 1\n\
                      [slice A]\ndim-h: 1\nweight: 1\nparent: B\n\
                      [slice B]\ndim-h: 1\nweight: 1\nparent: A\n";
        assert!(parse_problem(cyclic).is_err());
    }
}
