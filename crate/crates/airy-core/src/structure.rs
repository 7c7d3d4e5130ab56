//! The central data type: a quadratic Hamiltonian system presented by its
//! four tensors of structure constants, with optional mode grading for
//! truncated loop-space families.
//!
//! An instance over scalar ring `K` holds
//!
//! * `A` — arity 3, fully symmetric (coefficient of the cubic term),
//! * `B` — arity 3, one upper and two asymmetric lower slots,
//! * `C` — arity 3, upper slot plus symmetric lower pair,
//! * `D` — arity 1 (the scalar part),
//!
//! over index labels `0..dim`.  Infinite graded families enter as finite
//! truncations: labels encode a `(mode, color)` pair, a certificate records
//! the mode cap together with the vanishing rule that justifies it, and
//! consumers (validation, the recursion, symmetry checks) restrict their
//! quantifiers accordingly.
//!
//! The JSON form is the interchange format of the command-line tool; the
//! writer is canonical (sorted keys and entries, lowest-terms scalars) so
//! that save → load → save is byte-stable.

use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::error::AiryError;
use crate::nf::{NfElem, NumberField};
use crate::scalar::{format_rat, parse_rat, Rat, Ring};
use crate::tensor::{SparseTensor, Symmetry};

/// Coefficient domain of a structure, as declared in its serialized form.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldSpec {
    Rational,
    /// `Q[z]/(m)` with the defining polynomial lowest-degree first.
    NumberField { modulus: Vec<Rat> },
}

/// Mode grading for truncated loop-space structures.
///
/// Label layout is `label = mode * colors + color`, i.e. labels sorted
/// ascending are sorted by `(mode, color)`.  `max_mode` is the certificate
/// bound: every stored tensor key uses modes `<= max_mode`.  `rule`
/// documents how the bound was derived; when it contains a
/// `window=<w>` fragment, relation validation quantifies its free indices
/// over modes `<= w` (the largest range whose residuals are unaffected by
/// the truncation, given the family's support bounds).
#[derive(Clone, Debug, PartialEq)]
pub struct Grading {
    pub colors: usize,
    pub max_mode: usize,
    pub rule: String,
}

impl Grading {
    pub fn dim(&self) -> usize {
        self.colors * (self.max_mode + 1)
    }

    pub fn label(&self, mode: usize, color: usize) -> u32 {
        debug_assert!(color < self.colors && mode <= self.max_mode);
        (mode * self.colors + color) as u32
    }

    pub fn mode(&self, label: u32) -> usize {
        label as usize / self.colors
    }

    pub fn color(&self, label: u32) -> usize {
        label as usize % self.colors
    }

    /// Free-index mode window for relation validation (0 when the rule
    /// does not declare one).
    pub fn window(&self) -> usize {
        for part in self.rule.split_whitespace() {
            if let Some(w) = part.strip_prefix("window=") {
                if let Ok(w) = w.parse() {
                    return w;
                }
            }
        }
        0
    }
}

/// Structure constants of one quadratic Hamiltonian system.
#[derive(Clone, Debug, PartialEq)]
pub struct AiryStructure<K: Ring> {
    pub name: String,
    dim: usize,
    pub field: FieldSpec,
    pub grading: Option<Grading>,
    pub a: SparseTensor<K>,
    pub b: SparseTensor<K>,
    pub c: SparseTensor<K>,
    pub d: SparseTensor<K>,
}

impl<K: Ring> AiryStructure<K> {
    pub fn new(name: impl Into<String>, dim: usize, field: FieldSpec) -> Self {
        AiryStructure {
            name: name.into(),
            dim,
            field,
            grading: None,
            a: SparseTensor::new(3, dim, Symmetry::Full),
            b: SparseTensor::new(3, dim, Symmetry::None),
            c: SparseTensor::new(3, dim, Symmetry::TailPair),
            d: SparseTensor::new(1, dim, Symmetry::None),
        }
    }

    pub fn new_graded(name: impl Into<String>, grading: Grading, field: FieldSpec) -> Self {
        let mut s = Self::new(name, grading.dim(), field);
        s.grading = Some(grading);
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Mode of a label: the grading degree for certified structures, zero
    /// for plain finite ones.
    pub fn mode_of(&self, label: u32) -> usize {
        self.grading.as_ref().map_or(0, |g| g.mode(label))
    }

    /// Map all coefficients into another ring, preserving shape and name.
    pub fn map_values<L: Ring>(&self, f: impl Fn(&K) -> L) -> AiryStructure<L> {
        AiryStructure {
            name: self.name.clone(),
            dim: self.dim,
            field: self.field.clone(),
            grading: self.grading.clone(),
            a: self.a.map_values(&f),
            b: self.b.map_values(&f),
            c: self.c.map_values(&f),
            d: self.d.map_values(&f),
        }
    }
}

/// A loaded structure: scalars are rational or live in a number field.
#[derive(Clone, Debug)]
pub enum AnyStructure {
    Rational(AiryStructure<Rat>),
    NumberField(AiryStructure<NfElem>),
}

impl AnyStructure {
    pub fn name(&self) -> &str {
        match self {
            AnyStructure::Rational(s) => &s.name,
            AnyStructure::NumberField(s) => &s.name,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            AnyStructure::Rational(s) => s.dim(),
            AnyStructure::NumberField(s) => s.dim(),
        }
    }
}

/// Outcome of parsing: the structure itself plus any symmetry-inconsistent
/// duplicate entries found while canonicalizing keys.  Callers that demand
/// a well-formed input treat a nonempty `duplicate_reports` as a symmetry
/// violation of the fully-symmetric tensor.
pub struct LoadOutcome {
    pub structure: AnyStructure,
    pub duplicate_reports: Vec<String>,
}

// ---------------------------------------------------------------------------
// JSON writer
// ---------------------------------------------------------------------------

fn rat_value(r: &Rat) -> Value {
    Value::String(format_rat(r))
}

fn nf_value(x: &NfElem, degree: usize) -> Value {
    // Pad to the structure's field degree: rational constants carry no
    // field handle of their own and would otherwise print short.
    let mut c = x.coeffs_padded();
    c.resize(degree.max(c.len()), Ring::zero());
    Value::Array(c.iter().map(rat_value).collect())
}

fn entries_value<K: Ring>(t: &SparseTensor<K>, scalar: &impl Fn(&K) -> Value) -> Value {
    let mut rows = Vec::new();
    for (key, val) in t.iter() {
        let mut row: Vec<Value> = key.iter().map(|&i| json!(i)).collect();
        row.push(scalar(val));
        rows.push(Value::Array(row));
    }
    Value::Array(rows)
}

fn field_value(f: &FieldSpec) -> Value {
    match f {
        FieldSpec::Rational => Value::String("rational".into()),
        FieldSpec::NumberField { modulus } => json!({
            "number_field": { "modulus": modulus.iter().map(rat_value).collect::<Vec<_>>() }
        }),
    }
}

fn indices_value(dim: usize, grading: &Option<Grading>) -> Value {
    match grading {
        None => Value::Array((0..dim as u64).map(|i| json!(i)).collect()),
        Some(g) => json!({
            "graded": {
                "colors": g.colors,
                "max_degree": g.max_mode,
                "rule": g.rule,
            }
        }),
    }
}

fn structure_value<K: Ring>(s: &AiryStructure<K>, scalar: impl Fn(&K) -> Value) -> Value {
    let mut m = Map::new();
    m.insert("A".into(), entries_value(&s.a, &scalar));
    m.insert("B".into(), entries_value(&s.b, &scalar));
    m.insert("C".into(), entries_value(&s.c, &scalar));
    m.insert("D".into(), entries_value(&s.d, &scalar));
    m.insert("field".into(), field_value(&s.field));
    m.insert("indices".into(), indices_value(s.dim, &s.grading));
    m.insert("name".into(), Value::String(s.name.clone()));
    Value::Object(m)
}

impl AnyStructure {
    pub fn to_json(&self) -> Value {
        match self {
            AnyStructure::Rational(s) => structure_value(s, |x| rat_value(x)),
            AnyStructure::NumberField(s) => s.to_json(),
        }
    }

    /// Canonical serialized form: pretty JSON with sorted object keys and
    /// sorted tensor entries.  Loading and re-saving reproduces the bytes.
    pub fn to_canonical_string(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.to_json()).expect("serialization");
        out.push('\n');
        out
    }
}

impl AiryStructure<Rat> {
    pub fn to_json(&self) -> Value {
        structure_value(self, |x| rat_value(x))
    }
}

impl AiryStructure<NfElem> {
    pub fn to_json(&self) -> Value {
        let degree = match &self.field {
            FieldSpec::NumberField { modulus } => modulus.len().saturating_sub(1),
            FieldSpec::Rational => 1,
        };
        structure_value(self, |x| nf_value(x, degree))
    }
}

// ---------------------------------------------------------------------------
// JSON loader
// ---------------------------------------------------------------------------

fn parse_rat_value(v: &Value) -> Result<Rat, AiryError> {
    match v {
        Value::String(s) => parse_rat(s),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rat::from_integer(i.into()))
            } else {
                Err(AiryError::Parse(format!(
                    "non-integer numeric literal {n} (use a \"p/q\" string)"
                )))
            }
        }
        other => Err(AiryError::Parse(format!("expected scalar, got {other}"))),
    }
}

fn parse_nf_value(v: &Value, field: &Arc<NumberField>) -> Result<NfElem, AiryError> {
    match v {
        Value::Array(parts) => {
            let coeffs = parts
                .iter()
                .map(parse_rat_value)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(field.elem(&coeffs))
        }
        // Plain rationals are fine in a number-field structure.
        _ => Ok(NfElem::from_rat_const(parse_rat_value(v)?)),
    }
}

fn get<'v>(obj: &'v Value, key: &str) -> Result<&'v Value, AiryError> {
    obj.get(key)
        .ok_or_else(|| AiryError::Parse(format!("missing key {key:?}")))
}

fn parse_field(v: &Value) -> Result<FieldSpec, AiryError> {
    match v {
        Value::String(s) if s == "rational" => Ok(FieldSpec::Rational),
        Value::Object(_) => {
            let modulus = get(get(v, "number_field")?, "modulus")?
                .as_array()
                .ok_or_else(|| AiryError::Parse("modulus must be an array".into()))?
                .iter()
                .map(parse_rat_value)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(FieldSpec::NumberField { modulus })
        }
        other => Err(AiryError::Parse(format!("unrecognized field spec {other}"))),
    }
}

fn parse_indices(v: &Value) -> Result<(usize, Option<Grading>), AiryError> {
    match v {
        Value::Array(list) => {
            for (i, x) in list.iter().enumerate() {
                if x.as_u64() != Some(i as u64) {
                    return Err(AiryError::Parse(
                        "explicit index list must be 0, 1, ..., d-1".into(),
                    ));
                }
            }
            Ok((list.len(), None))
        }
        Value::Object(_) => {
            let g = get(v, "graded")?;
            let colors = get(g, "colors")?
                .as_u64()
                .ok_or_else(|| AiryError::Parse("colors must be a nonnegative integer".into()))?
                as usize;
            let max_mode = get(g, "max_degree")?
                .as_u64()
                .ok_or_else(|| AiryError::Parse("max_degree must be a nonnegative integer".into()))?
                as usize;
            let rule = get(g, "rule")?
                .as_str()
                .ok_or_else(|| AiryError::Parse("rule must be a string".into()))?
                .to_string();
            if colors == 0 {
                return Err(AiryError::Parse("colors must be positive".into()));
            }
            let grading = Grading {
                colors,
                max_mode,
                rule,
            };
            Ok((grading.dim(), Some(grading)))
        }
        other => Err(AiryError::Parse(format!("unrecognized index set {other}"))),
    }
}

fn parse_entries<K: Ring>(
    v: &Value,
    arity: usize,
    dim: usize,
    scalar: &impl Fn(&Value) -> Result<K, AiryError>,
) -> Result<Vec<(Vec<u32>, K)>, AiryError> {
    let rows = v
        .as_array()
        .ok_or_else(|| AiryError::Parse("tensor entries must form an array".into()))?;
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| AiryError::Parse("tensor entry must be an array".into()))?;
        if row.len() != arity + 1 {
            return Err(AiryError::Arity {
                expected: arity + 1,
                got: row.len(),
            });
        }
        let mut key = Vec::with_capacity(arity);
        for x in &row[..arity] {
            let i = x
                .as_u64()
                .ok_or_else(|| AiryError::Parse(format!("bad index {x}")))?;
            if i as usize >= dim {
                return Err(AiryError::IndexRange {
                    index: i as usize,
                    dim,
                });
            }
            key.push(i as u32);
        }
        out.push((key, scalar(&row[arity])?));
    }
    Ok(out)
}

fn load_tensors<K: Ring>(
    obj: &Value,
    s: &mut AiryStructure<K>,
    scalar: impl Fn(&Value) -> Result<K, AiryError>,
) -> Result<Vec<String>, AiryError> {
    let dim = s.dim();
    let mut reports = Vec::new();
    let mut absorb = |t: &mut SparseTensor<K>, tag: &str, v: &Value| -> Result<(), AiryError> {
        let entries = parse_entries(v, t.arity(), dim, &scalar)?;
        for issue in t.absorb_entries(entries) {
            reports.push(format!(
                "{tag}{:?}: {} vs {}",
                issue.key, issue.kept, issue.rejected
            ));
        }
        Ok(())
    };
    absorb(&mut s.a, "A", get(obj, "A")?)?;
    absorb(&mut s.b, "B", get(obj, "B")?)?;
    absorb(&mut s.c, "C", get(obj, "C")?)?;
    absorb(&mut s.d, "D", get(obj, "D")?)?;
    Ok(reports)
}

/// Parse the JSON interchange form.  Inconsistent duplicates do not abort
/// the load — they are returned for the caller to report as violations.
pub fn parse_structure(doc: &Value) -> Result<LoadOutcome, AiryError> {
    let name = get(doc, "name")?
        .as_str()
        .ok_or_else(|| AiryError::Parse("name must be a string".into()))?
        .to_string();
    let field = parse_field(get(doc, "field")?)?;
    let (dim, grading) = parse_indices(get(doc, "indices")?)?;
    match &field {
        FieldSpec::Rational => {
            let mut s = AiryStructure::<Rat>::new(name, dim, field.clone());
            s.grading = grading;
            let duplicate_reports = load_tensors(doc, &mut s, parse_rat_value)?;
            Ok(LoadOutcome {
                structure: AnyStructure::Rational(s),
                duplicate_reports,
            })
        }
        FieldSpec::NumberField { modulus } => {
            let nf = NumberField::new(modulus.clone())?;
            let mut s = AiryStructure::<NfElem>::new(name, dim, field.clone());
            s.grading = grading;
            let duplicate_reports = load_tensors(doc, &mut s, |v| parse_nf_value(v, &nf))?;
            Ok(LoadOutcome {
                structure: AnyStructure::NumberField(s),
                duplicate_reports,
            })
        }
    }
}

/// Parse from serialized text.
pub fn parse_structure_str(text: &str) -> Result<LoadOutcome, AiryError> {
    let doc: Value = serde_json::from_str(text)?;
    parse_structure(&doc)
}
