//! In-memory typed model of an SSA knowledge base.
//!
//! A [`KnowledgeBase`] holds the TBox (class, relation and attribute
//! declarations with their axioms) and the ABox (facts about individuals).
//! Every term is interned to a [`TermId`]; names are unique across all term
//! kinds so each token carries exactly one meaning. The build phase is
//! single-writer; a completed knowledge base is immutable and may be shared
//! across threads for reads.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use chrono::{DateTime, NaiveDate, TimeZone, Utc};
use thiserror::Error;

/// Opaque handle for an interned term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(u32);

impl TermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermKind {
    Class,
    Relation,
    Attribute,
    Individual,
}

impl fmt::Display for TermKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TermKind::Class => "class",
            TermKind::Relation => "relation",
            TermKind::Attribute => "attribute",
            TermKind::Individual => "individual",
        };
        f.write_str(s)
    }
}

/// Where a statement came from: a file and line, or a synthetic origin for
/// programmatic inserts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Origin {
    pub file: String,
    pub line: u32,
}

impl Origin {
    pub fn new(file: impl Into<String>, line: u32) -> Self {
        Origin { file: file.into(), line }
    }

    pub fn synthetic() -> Self {
        Origin { file: "<api>".to_string(), line: 0 }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.line)
    }
}

/// UTC instant with seconds precision. Canonical form is ISO-8601 with a
/// trailing `Z`, e.g. `2016-02-10T00:00:00Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimeStamp(DateTime<Utc>);

impl TimeStamp {
    pub fn parse(s: &str) -> Option<TimeStamp> {
        // Strict: exactly the canonical Z form, no offsets or fractions.
        let dt = chrono::NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%SZ").ok()?;
        Some(TimeStamp(Utc.from_utc_datetime(&dt)))
    }

    pub fn from_ymd_seconds(year: i32, day_of_year: u32, secs_into_day: u32) -> Option<TimeStamp> {
        let date = NaiveDate::from_yo_opt(year, day_of_year)?;
        let dt = date.and_hms_opt(0, 0, 0)?;
        let dt = dt + chrono::Duration::seconds(secs_into_day as i64);
        Some(TimeStamp(Utc.from_utc_datetime(&dt)))
    }
}

impl fmt::Display for TimeStamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%Y-%m-%dT%H:%M:%SZ"))
    }
}

/// Typed attribute value. Decimals compare and hash by bit pattern with
/// negative zero normalized, so facts can live in hash sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AttrValue {
    Decimal(Decimal),
    Integer(i64),
    Text(String),
    Timestamp(TimeStamp),
    EnumToken(String),
}

#[derive(Debug, Clone, Copy)]
pub struct Decimal(f64);

impl Decimal {
    pub fn new(v: f64) -> Decimal {
        // normalize -0.0 so equal values hash equally
        Decimal(if v == 0.0 { 0.0 } else { v })
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl PartialEq for Decimal {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl Eq for Decimal {}

impl std::hash::Hash for Decimal {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state);
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueType {
    Decimal,
    Integer,
    Text,
    Timestamp,
    Enum(Vec<String>),
}

/// One assertion in the ABox.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Fact {
    /// `individual instance_of class`
    Class { individual: TermId, class: TermId },
    /// `relation(subject, object)`, timestamped iff the relation is temporal
    Relation { relation: TermId, subject: TermId, object: TermId, at: Option<TimeStamp> },
    /// `attribute(subject, value)`
    Attribute { attribute: TermId, subject: TermId, value: AttrValue },
    /// classes asserted co-extensional (stored with name-ordered operands)
    Equivalent(TermId, TermId),
    Disjoint(TermId, TermId),
    /// two individual terms naming the same object (name-ordered operands)
    Same(TermId, TermId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CondMode {
    /// the differentia relation must hold to a specific individual
    Value,
    /// the differentia relation must hold to some instance of a class
    Some,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationCondition {
    pub relation: TermId,
    pub mode: CondMode,
    pub target: TermId,
}

/// Genus-and-differentia definition giving necessary-and-sufficient
/// membership conditions for a defined class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefinedClassExpr {
    pub genus: TermId,
    pub differentia: Vec<RelationCondition>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub id: TermId,
    pub supers: BTreeSet<TermId>,
    pub definition: Option<DefinedClassExpr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationDecl {
    pub id: TermId,
    pub domain: TermId,
    pub range: TermId,
    pub temporal: bool,
    pub transitive: bool,
    pub antisymmetric: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeDecl {
    pub id: TermId,
    pub domain: TermId,
    pub valuetype: ValueType,
    pub unit: Option<String>,
}

/// View over whatever `lookup` found for a name.
#[derive(Debug, Clone, Copy)]
pub enum Declaration<'a> {
    Class(&'a ClassDecl),
    Relation(&'a RelationDecl),
    Attribute(&'a AttributeDecl),
    Individual(TermId),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("name `{name}` already declared as {existing}, not {requested}")]
    KindClash { name: String, existing: TermKind, requested: TermKind },
    #[error("`{0}` is not a valid token (expected [A-Za-z][A-Za-z0-9_-]*)")]
    BadToken(String),
    #[error("declaring `{sub}` is_a `{sup}` would create an is_a cycle")]
    CycleError { sub: String, sup: String },
    #[error("relation `{relation}` {details}")]
    TemporalityMismatch { relation: String, details: String },
    #[error("attribute `{attribute}` expects a {expected} value")]
    ValueTypeMismatch { attribute: String, expected: String },
    #[error("`{name}` redeclared with different content")]
    ConflictingRedeclaration { name: String },
    #[error("term `{0}` is not declared")]
    UnknownTerm(String),
    #[error("`{name}` is declared as {kind}, but a {expected} is required here")]
    WrongKind { name: String, kind: TermKind, expected: TermKind },
    #[error("definition of `{class}` is malformed: {details}")]
    BadDefinition { class: String, details: String },
    #[error("relation `{relation}` requires an individual name as its object")]
    BadRelationObject { relation: String },
}

pub fn is_valid_token(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

#[derive(Debug, Clone)]
struct TermInfo {
    name: String,
    kind: TermKind,
}

/// TBox + ABox with provenance for every stored statement.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeBase {
    terms: Vec<TermInfo>,
    by_name: HashMap<String, TermId>,
    classes: BTreeMap<TermId, ClassDecl>,
    relations: BTreeMap<TermId, RelationDecl>,
    attributes: BTreeMap<TermId, AttributeDecl>,
    individuals: BTreeSet<TermId>,
    docs: BTreeMap<TermId, String>,
    facts: Vec<Fact>,
    fact_index: HashMap<Fact, usize>,
    fact_origins: Vec<Origin>,
    decl_origins: HashMap<TermId, Origin>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        KnowledgeBase::default()
    }

    /// Interns a name, creating a declaration stub if it is new. Returns the
    /// existing id when the name is already known with the same kind.
    pub fn intern(&mut self, name: &str, kind: TermKind) -> Result<TermId, ModelError> {
        if !is_valid_token(name) {
            return Err(ModelError::BadToken(name.to_string()));
        }
        if let Some(&id) = self.by_name.get(name) {
            let existing = self.terms[id.index()].kind;
            if existing != kind {
                return Err(ModelError::KindClash {
                    name: name.to_string(),
                    existing,
                    requested: kind,
                });
            }
            return Ok(id);
        }
        let id = TermId(self.terms.len() as u32);
        self.terms.push(TermInfo { name: name.to_string(), kind });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn get(&self, name: &str) -> Option<TermId> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, id: TermId) -> &str {
        &self.terms[id.index()].name
    }

    pub fn kind(&self, id: TermId) -> TermKind {
        self.terms[id.index()].kind
    }

    pub fn lookup(&self, name: &str) -> Option<Declaration<'_>> {
        let id = self.get(name)?;
        match self.kind(id) {
            TermKind::Class => self.classes.get(&id).map(Declaration::Class),
            TermKind::Relation => self.relations.get(&id).map(Declaration::Relation),
            TermKind::Attribute => self.attributes.get(&id).map(Declaration::Attribute),
            TermKind::Individual => {
                if self.individuals.contains(&id) {
                    Some(Declaration::Individual(id))
                } else {
                    None
                }
            }
        }
    }

    fn expect_kind(&self, id: TermId, expected: TermKind) -> Result<(), ModelError> {
        let kind = self.kind(id);
        if kind != expected {
            return Err(ModelError::WrongKind {
                name: self.name(id).to_string(),
                kind,
                expected,
            });
        }
        Ok(())
    }

    fn expect_declared_class(&self, id: TermId) -> Result<(), ModelError> {
        self.expect_kind(id, TermKind::Class)?;
        if !self.classes.contains_key(&id) {
            return Err(ModelError::UnknownTerm(self.name(id).to_string()));
        }
        Ok(())
    }

    /// True when `to` is reachable from `from` along supers edges.
    fn reaches(&self, from: TermId, to: TermId) -> bool {
        if from == to {
            return true;
        }
        let mut stack = vec![from];
        let mut seen = HashSet::new();
        while let Some(c) = stack.pop() {
            if !seen.insert(c) {
                continue;
            }
            if let Some(decl) = self.classes.get(&c) {
                for &s in &decl.supers {
                    if s == to {
                        return true;
                    }
                    stack.push(s);
                }
            }
        }
        false
    }

    pub fn declare_class(
        &mut self,
        name: &str,
        supers: &[TermId],
        definition: Option<DefinedClassExpr>,
        origin: Origin,
    ) -> Result<TermId, ModelError> {
        let id = self.intern(name, TermKind::Class)?;
        let mut super_set = BTreeSet::new();
        for &s in supers {
            self.expect_kind(s, TermKind::Class)?;
            super_set.insert(s);
        }
        if let Some(def) = &definition {
            self.expect_kind(def.genus, TermKind::Class)?;
            if !super_set.contains(&def.genus) {
                return Err(ModelError::BadDefinition {
                    class: name.to_string(),
                    details: "genus must be listed among the superclasses".to_string(),
                });
            }
            if def.differentia.is_empty() {
                return Err(ModelError::BadDefinition {
                    class: name.to_string(),
                    details: "differentia must be non-empty".to_string(),
                });
            }
            for cond in &def.differentia {
                self.expect_kind(cond.relation, TermKind::Relation)?;
                let want = match cond.mode {
                    CondMode::Value => TermKind::Individual,
                    CondMode::Some => TermKind::Class,
                };
                self.expect_kind(cond.target, want)?;
            }
        }
        let mut definition = definition;
        if let Some(def) = &mut definition {
            def.differentia.sort();
            def.differentia.dedup();
        }
        let decl = ClassDecl { id, supers: super_set, definition };
        if let Some(existing) = self.classes.get(&id) {
            if *existing == decl {
                return Ok(id); // idempotent redeclaration
            }
            return Err(ModelError::ConflictingRedeclaration { name: name.to_string() });
        }
        // cycle check before storing the edges
        for &s in &decl.supers {
            if self.reaches(s, id) {
                return Err(ModelError::CycleError {
                    sub: name.to_string(),
                    sup: self.name(s).to_string(),
                });
            }
        }
        self.classes.insert(id, decl);
        self.decl_origins.entry(id).or_insert(origin);
        Ok(id)
    }

    pub fn declare_relation(
        &mut self,
        name: &str,
        domain: TermId,
        range: TermId,
        temporal: bool,
        transitive: bool,
        antisymmetric: bool,
        origin: Origin,
    ) -> Result<TermId, ModelError> {
        let id = self.intern(name, TermKind::Relation)?;
        self.expect_declared_class(domain)?;
        self.expect_declared_class(range)?;
        let decl = RelationDecl { id, domain, range, temporal, transitive, antisymmetric };
        if let Some(existing) = self.relations.get(&id) {
            if *existing == decl {
                return Ok(id);
            }
            return Err(ModelError::ConflictingRedeclaration { name: name.to_string() });
        }
        self.relations.insert(id, decl);
        self.decl_origins.entry(id).or_insert(origin);
        Ok(id)
    }

    pub fn declare_attribute(
        &mut self,
        name: &str,
        domain: TermId,
        valuetype: ValueType,
        unit: Option<String>,
        origin: Origin,
    ) -> Result<TermId, ModelError> {
        if let ValueType::Enum(tokens) = &valuetype {
            if tokens.is_empty() {
                return Err(ModelError::ValueTypeMismatch {
                    attribute: name.to_string(),
                    expected: "non-empty enum token list".to_string(),
                });
            }
        }
        let id = self.intern(name, TermKind::Attribute)?;
        self.expect_declared_class(domain)?;
        let decl = AttributeDecl { id, domain, valuetype, unit };
        if let Some(existing) = self.attributes.get(&id) {
            if *existing == decl {
                return Ok(id);
            }
            return Err(ModelError::ConflictingRedeclaration { name: name.to_string() });
        }
        self.attributes.insert(id, decl);
        self.decl_origins.entry(id).or_insert(origin);
        Ok(id)
    }

    pub fn declare_individual(&mut self, name: &str, origin: Origin) -> Result<TermId, ModelError> {
        let id = self.intern(name, TermKind::Individual)?;
        if self.individuals.insert(id) {
            self.decl_origins.entry(id).or_insert(origin);
        }
        Ok(id)
    }

    pub fn set_doc(&mut self, id: TermId, text: &str) -> Result<(), ModelError> {
        match self.docs.get(&id) {
            Some(existing) if existing == text => Ok(()),
            Some(_) => Err(ModelError::ConflictingRedeclaration {
                name: self.name(id).to_string(),
            }),
            None => {
                self.docs.insert(id, text.to_string());
                Ok(())
            }
        }
    }

    pub fn doc(&self, id: TermId) -> Option<&str> {
        self.docs.get(&id).map(|s| s.as_str())
    }

    /// Orders a symmetric pair by term name so equal facts compare equal.
    pub fn ordered_pair(&self, a: TermId, b: TermId) -> (TermId, TermId) {
        if self.name(a) <= self.name(b) {
            (a, b)
        } else {
            (b, a)
        }
    }

    fn validate_fact(&self, fact: &Fact) -> Result<(), ModelError> {
        match fact {
            Fact::Class { individual, class } => {
                self.expect_kind(*individual, TermKind::Individual)?;
                if !self.individuals.contains(individual) {
                    return Err(ModelError::UnknownTerm(self.name(*individual).to_string()));
                }
                self.expect_declared_class(*class)?;
            }
            Fact::Relation { relation, subject, object, at } => {
                self.expect_kind(*relation, TermKind::Relation)?;
                let decl = self
                    .relations
                    .get(relation)
                    .ok_or_else(|| ModelError::UnknownTerm(self.name(*relation).to_string()))?;
                for t in [*subject, *object] {
                    self.expect_kind(t, TermKind::Individual)?;
                    if !self.individuals.contains(&t) {
                        return Err(ModelError::UnknownTerm(self.name(t).to_string()));
                    }
                }
                if decl.temporal != at.is_some() {
                    let details = if decl.temporal {
                        "is temporal and requires `at TIMESTAMP`".to_string()
                    } else {
                        "is not temporal and must not carry `at`".to_string()
                    };
                    return Err(ModelError::TemporalityMismatch {
                        relation: self.name(*relation).to_string(),
                        details,
                    });
                }
            }
            Fact::Attribute { attribute, subject, value } => {
                self.expect_kind(*attribute, TermKind::Attribute)?;
                let decl = self
                    .attributes
                    .get(attribute)
                    .ok_or_else(|| ModelError::UnknownTerm(self.name(*attribute).to_string()))?;
                self.expect_kind(*subject, TermKind::Individual)?;
                if !self.individuals.contains(subject) {
                    return Err(ModelError::UnknownTerm(self.name(*subject).to_string()));
                }
                let ok = matches!(
                    (&decl.valuetype, value),
                    (ValueType::Decimal, AttrValue::Decimal(_))
                        | (ValueType::Integer, AttrValue::Integer(_))
                        | (ValueType::Text, AttrValue::Text(_))
                        | (ValueType::Timestamp, AttrValue::Timestamp(_))
                        | (ValueType::Enum(_), AttrValue::EnumToken(_))
                );
                if !ok {
                    let expected = match &decl.valuetype {
                        ValueType::Decimal => "decimal",
                        ValueType::Integer => "integer",
                        ValueType::Text => "text",
                        ValueType::Timestamp => "timestamp",
                        ValueType::Enum(_) => "enum token",
                    };
                    return Err(ModelError::ValueTypeMismatch {
                        attribute: self.name(*attribute).to_string(),
                        expected: expected.to_string(),
                    });
                }
            }
            Fact::Equivalent(a, b) | Fact::Disjoint(a, b) => {
                self.expect_declared_class(*a)?;
                self.expect_declared_class(*b)?;
            }
            Fact::Same(a, b) => {
                for t in [*a, *b] {
                    self.expect_kind(t, TermKind::Individual)?;
                    if !self.individuals.contains(&t) {
                        return Err(ModelError::UnknownTerm(self.name(t).to_string()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Stores a fact with provenance. Symmetric facts are normalized so the
    /// same assertion written either way deduplicates. Returns true when the
    /// fact was new.
    pub fn assert_fact(&mut self, fact: Fact, origin: Origin) -> Result<bool, ModelError> {
        let fact = match fact {
            Fact::Equivalent(a, b) => {
                let (a, b) = self.ordered_pair(a, b);
                Fact::Equivalent(a, b)
            }
            Fact::Disjoint(a, b) => {
                let (a, b) = self.ordered_pair(a, b);
                Fact::Disjoint(a, b)
            }
            Fact::Same(a, b) => {
                let (a, b) = self.ordered_pair(a, b);
                Fact::Same(a, b)
            }
            other => other,
        };
        self.validate_fact(&fact)?;
        if self.fact_index.contains_key(&fact) {
            return Ok(false);
        }
        self.fact_index.insert(fact.clone(), self.facts.len());
        self.facts.push(fact);
        self.fact_origins.push(origin);
        Ok(true)
    }

    pub fn has_fact(&self, fact: &Fact) -> bool {
        self.fact_index.contains_key(fact)
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn fact_origin(&self, fact: &Fact) -> Option<&Origin> {
        self.fact_index.get(fact).map(|&i| &self.fact_origins[i])
    }

    pub fn decl_origin(&self, id: TermId) -> Option<&Origin> {
        self.decl_origins.get(&id)
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassDecl> {
        self.classes.values()
    }

    pub fn relations(&self) -> impl Iterator<Item = &RelationDecl> {
        self.relations.values()
    }

    pub fn attributes(&self) -> impl Iterator<Item = &AttributeDecl> {
        self.attributes.values()
    }

    pub fn individuals(&self) -> impl Iterator<Item = TermId> + '_ {
        self.individuals.iter().copied()
    }

    pub fn class_decl(&self, id: TermId) -> Option<&ClassDecl> {
        self.classes.get(&id)
    }

    pub fn relation_decl(&self, id: TermId) -> Option<&RelationDecl> {
        self.relations.get(&id)
    }

    pub fn attribute_decl(&self, id: TermId) -> Option<&AttributeDecl> {
        self.attributes.get(&id)
    }

    pub fn is_individual(&self, id: TermId) -> bool {
        self.individuals.contains(&id)
    }

    /// Asserted class memberships of one individual.
    pub fn asserted_classes_of(&self, ind: TermId) -> Vec<TermId> {
        self.facts
            .iter()
            .filter_map(|f| match f {
                Fact::Class { individual, class } if *individual == ind => Some(*class),
                _ => None,
            })
            .collect()
    }
}
