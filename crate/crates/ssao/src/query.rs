//! Read-only queries over a materialized closure: ground asks, instance
//! retrieval, and single-atom pattern matching.
//!
//! The textual syntax mirrors the fact syntax of the ontology language with
//! `?name` variables added:
//!
//! ```text
//! ask instance_of(SensorA, Sensor)
//! ask is_a(Space-Based_Sensor, Sensor)
//! instances-of Sensor [--direct]
//! match has_orbit(?s, ?o)
//! match is_tracked_by(?x, SensorA, ?t)
//! ```
//!
//! Results are deterministic: rows are rendered, sorted lexicographically,
//! and deduplicated. All operations are pure reads; a `Closure` can be shared
//! across threads freely.

use std::collections::HashSet;

use thiserror::Error;

use crate::dsl::render_attr_value;
use crate::model::{AttrValue, Decimal, TermId, TermKind, TimeStamp, ValueType};
use crate::reasoner::Closure;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("unknown term `{0}`")]
    UnknownTerm(String),
    #[error("bad query: {0}")]
    BadQuery(String),
}

/// A fully ground atom for `ask`.
#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    InstanceOf { individual: TermId, class: TermId },
    IsA { sub: TermId, sup: TermId },
    /// `at: None` on a temporal relation asks whether the relation holds at
    /// any time
    Relation { relation: TermId, subject: TermId, object: TermId, at: Option<TimeStamp> },
    Attribute { attribute: TermId, subject: TermId, value: AttrValue },
    Same(TermId, TermId),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PatternPredicate {
    InstanceOf,
    Relation(TermId),
    Attribute(TermId),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PatternTerm {
    Const(TermId),
    Var(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PatternObject {
    Const(TermId),
    Value(AttrValue),
    Var(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PatternTime {
    At(TimeStamp),
    Var(String),
}

/// A single-atom pattern with at least one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub predicate: PatternPredicate,
    pub subject: PatternTerm,
    pub object: PatternObject,
    pub time: Option<PatternTime>,
}

/// Match results: the variables in order of appearance and one rendered row
/// per substitution, sorted lexicographically with no duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bindings {
    pub vars: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Bindings {
    /// One row per line, values TAB-separated.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&row.join("\t"));
            out.push('\n');
        }
        out
    }
}

/// A parsed query invocation.
#[derive(Debug, Clone, PartialEq)]
pub enum Query {
    Ask(Atom),
    InstancesOf { class: TermId, direct: bool },
    Match(Pattern),
}

/// True iff the atom is asserted or inferred. Class asks consult the
/// subsumption-expanded membership; `is_a` asks consult subsumption itself.
pub fn ask(closure: &Closure<'_>, atom: &Atom) -> bool {
    match atom {
        Atom::InstanceOf { individual, class } => closure.is_member(*individual, *class),
        Atom::IsA { sub, sup } => closure.is_subclass(*sub, *sup),
        Atom::Relation { relation, subject, object, at } => closure
            .relation_tuples(*relation)
            .any(|(s, o, t)| s == subject && o == object && (at.is_none() || at == t)),
        Atom::Attribute { attribute, subject, value } => closure
            .attribute_tuples(*attribute)
            .any(|(s, v)| s == subject && v == value),
        Atom::Same(a, b) => closure.same_as(*a, *b),
    }
}

/// All instances of a class; with `direct`, only individuals that belong to
/// no strict subclass of `class`. Sorted by name.
pub fn instances_of(closure: &Closure<'_>, class: TermId, direct: bool) -> Vec<TermId> {
    let mut out: Vec<TermId> = closure
        .members(class)
        .into_iter()
        .filter(|&x| {
            !direct
                || !closure.classes_of(x).any(|d| {
                    d != class && closure.is_subclass(d, class) && !closure.is_subclass(class, d)
                })
        })
        .collect();
    out.sort_by(|&a, &b| closure.kb().name(a).cmp(closure.kb().name(b)));
    out
}

fn unify_term(pat: &PatternTerm, id: TermId) -> Option<Option<TermId>> {
    match pat {
        PatternTerm::Const(c) => (*c == id).then_some(None),
        PatternTerm::Var(_) => Some(Some(id)),
    }
}

/// All substitutions of the pattern against asserted and inferred facts.
pub fn match_pattern(closure: &Closure<'_>, pattern: &Pattern) -> Result<Bindings, QueryError> {
    let kb = closure.kb();
    let mut vars = Vec::new();
    if let PatternTerm::Var(v) = &pattern.subject {
        vars.push(v.clone());
    }
    if let PatternObject::Var(v) = &pattern.object {
        vars.push(v.clone());
    }
    if let Some(PatternTime::Var(v)) = &pattern.time {
        vars.push(v.clone());
    }
    if vars.is_empty() {
        return Err(QueryError::BadQuery("pattern has no variables".to_string()));
    }
    {
        let mut seen = HashSet::new();
        for v in &vars {
            if !seen.insert(v) {
                return Err(QueryError::BadQuery(format!("duplicate variable ?{v}")));
            }
        }
    }

    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut push_row = |cells: Vec<String>| rows.push(cells);

    match &pattern.predicate {
        PatternPredicate::Relation(rel) => {
            for &(s, o, at) in closure.relation_tuples(*rel) {
                let Some(bind_s) = unify_term(&pattern.subject, s) else { continue };
                let bind_o = match &pattern.object {
                    PatternObject::Const(c) => {
                        if *c != o {
                            continue;
                        }
                        None
                    }
                    PatternObject::Var(_) => Some(o),
                    PatternObject::Value(_) => continue,
                };
                let bind_t = match (&pattern.time, at) {
                    (None, _) => None,
                    (Some(PatternTime::At(t)), Some(at)) if *t == at => None,
                    (Some(PatternTime::Var(_)), Some(at)) => Some(at),
                    _ => continue,
                };
                let mut cells = Vec::new();
                if let Some(id) = bind_s {
                    cells.push(kb.name(id).to_string());
                }
                if let Some(id) = bind_o {
                    cells.push(kb.name(id).to_string());
                }
                if let Some(t) = bind_t {
                    cells.push(t.to_string());
                }
                push_row(cells);
            }
        }
        PatternPredicate::Attribute(attr) => {
            if pattern.time.is_some() {
                return Err(QueryError::BadQuery(
                    "attribute patterns take no timestamp".to_string(),
                ));
            }
            for (s, v) in closure.attribute_tuples(*attr) {
                let Some(bind_s) = unify_term(&pattern.subject, *s) else { continue };
                let bind_v = match &pattern.object {
                    PatternObject::Value(want) => {
                        if want != v {
                            continue;
                        }
                        None
                    }
                    PatternObject::Var(_) => Some(v),
                    PatternObject::Const(_) => continue,
                };
                let mut cells = Vec::new();
                if let Some(id) = bind_s {
                    cells.push(kb.name(id).to_string());
                }
                if let Some(v) = bind_v {
                    cells.push(render_attr_value(v));
                }
                push_row(cells);
            }
        }
        PatternPredicate::InstanceOf => {
            if pattern.time.is_some() {
                return Err(QueryError::BadQuery(
                    "instance_of patterns take no timestamp".to_string(),
                ));
            }
            let classes: Vec<TermId> = match &pattern.object {
                PatternObject::Const(c) => vec![*c],
                PatternObject::Var(_) => kb.classes().map(|c| c.id).collect(),
                PatternObject::Value(_) => {
                    return Err(QueryError::BadQuery(
                        "instance_of object must be a class or variable".to_string(),
                    ))
                }
            };
            for class in classes {
                for x in closure.members(class) {
                    let Some(bind_s) = unify_term(&pattern.subject, x) else { continue };
                    let mut cells = Vec::new();
                    if let Some(id) = bind_s {
                        cells.push(kb.name(id).to_string());
                    }
                    if matches!(pattern.object, PatternObject::Var(_)) {
                        cells.push(kb.name(class).to_string());
                    }
                    push_row(cells);
                }
            }
        }
    }

    rows.sort_unstable();
    rows.dedup();
    Ok(Bindings { vars, rows })
}

// ---------------------------------------------------------------------------
// textual syntax

/// Splits `PRED(ARG, ARG[, ARG])` into the predicate and raw arguments.
/// Arguments are trimmed; double-quoted strings may contain commas.
fn split_call(text: &str) -> Result<(String, Vec<String>), QueryError> {
    let text = text.trim();
    let bad = |m: &str| QueryError::BadQuery(m.to_string());
    let open = text.find('(').ok_or_else(|| bad("expected `predicate(args)`"))?;
    if !text.ends_with(')') {
        return Err(bad("expected closing `)`"));
    }
    let pred = text[..open].trim().to_string();
    if pred.is_empty() {
        return Err(bad("missing predicate name"));
    }
    let inner = &text[open + 1..text.len() - 1];
    let mut args = Vec::new();
    let mut current = String::new();
    let mut in_string = false;
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        match c {
            '"' => {
                in_string = !in_string;
                current.push(c);
            }
            '\\' if in_string => {
                current.push(c);
                if let Some(next) = chars.next() {
                    current.push(next);
                }
            }
            ',' if !in_string => {
                args.push(current.trim().to_string());
                current.clear();
            }
            _ => current.push(c),
        }
    }
    if in_string {
        return Err(bad("unterminated string"));
    }
    let last = current.trim();
    if !last.is_empty() {
        args.push(last.to_string());
    }
    if args.iter().any(String::is_empty) {
        return Err(bad("empty argument"));
    }
    Ok((pred, args))
}

fn resolve(kb: &crate::model::KnowledgeBase, name: &str) -> Result<TermId, QueryError> {
    kb.get(name).ok_or_else(|| QueryError::UnknownTerm(name.to_string()))
}

fn parse_value(raw: &str, vt: &ValueType) -> Result<AttrValue, QueryError> {
    let bad = || QueryError::BadQuery(format!("value `{raw}` does not fit the attribute type"));
    Ok(match vt {
        ValueType::Decimal => {
            AttrValue::Decimal(Decimal::new(raw.parse::<f64>().map_err(|_| bad())?))
        }
        ValueType::Integer => AttrValue::Integer(raw.parse().map_err(|_| bad())?),
        ValueType::Text => {
            if raw.starts_with('"') && raw.ends_with('"') && raw.len() >= 2 {
                AttrValue::Text(raw[1..raw.len() - 1].replace("\\\"", "\"").replace("\\\\", "\\"))
            } else {
                AttrValue::Text(raw.to_string())
            }
        }
        ValueType::Timestamp => AttrValue::Timestamp(TimeStamp::parse(raw).ok_or_else(bad)?),
        ValueType::Enum(_) => AttrValue::EnumToken(raw.to_string()),
    })
}

/// Parses one of the textual query forms against a knowledge base:
/// `ask ATOM`, `instances-of NAME [--direct]`, `match PATTERN`.
pub fn parse_query(kb: &crate::model::KnowledgeBase, text: &str) -> Result<Query, QueryError> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("ask ") {
        return Ok(Query::Ask(parse_atom(kb, rest)?));
    }
    if let Some(rest) = text.strip_prefix("instances-of ") {
        let mut parts = rest.split_whitespace();
        let name = parts
            .next()
            .ok_or_else(|| QueryError::BadQuery("instances-of needs a class name".to_string()))?;
        let direct = match parts.next() {
            None => false,
            Some("--direct") => true,
            Some(other) => {
                return Err(QueryError::BadQuery(format!("unexpected argument `{other}`")))
            }
        };
        let class = resolve(kb, name)?;
        if kb.kind(class) != TermKind::Class {
            return Err(QueryError::BadQuery(format!("`{name}` is not a class")));
        }
        return Ok(Query::InstancesOf { class, direct });
    }
    if let Some(rest) = text.strip_prefix("match ") {
        return Ok(Query::Match(parse_pattern(kb, rest)?));
    }
    Err(QueryError::BadQuery(
        "expected `ask …`, `instances-of …`, or `match …`".to_string(),
    ))
}

/// Parses a fully ground atom, e.g. `instance_of(SensorA, Sensor)` or
/// `is_tracked_by(S, X, 2016-02-10T00:00:00Z)`.
pub fn parse_atom(kb: &crate::model::KnowledgeBase, text: &str) -> Result<Atom, QueryError> {
    let (pred, args) = split_call(text)?;
    if args.iter().any(|a| a.starts_with('?')) {
        return Err(QueryError::BadQuery("ask atoms must be fully ground".to_string()));
    }
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(QueryError::BadQuery(format!(
                "{pred} takes {n} arguments, got {}",
                args.len()
            )))
        }
    };
    match pred.as_str() {
        "instance_of" => {
            arity(2)?;
            Ok(Atom::InstanceOf {
                individual: resolve(kb, &args[0])?,
                class: resolve(kb, &args[1])?,
            })
        }
        "is_a" => {
            arity(2)?;
            Ok(Atom::IsA { sub: resolve(kb, &args[0])?, sup: resolve(kb, &args[1])? })
        }
        "same" => {
            arity(2)?;
            Ok(Atom::Same(resolve(kb, &args[0])?, resolve(kb, &args[1])?))
        }
        name => {
            let id = resolve(kb, name)?;
            match kb.kind(id) {
                TermKind::Relation => {
                    if args.len() != 2 && args.len() != 3 {
                        return Err(QueryError::BadQuery(format!(
                            "{name} takes 2 or 3 arguments, got {}",
                            args.len()
                        )));
                    }
                    let at = match args.get(2) {
                        None => None,
                        Some(raw) => Some(TimeStamp::parse(raw).ok_or_else(|| {
                            QueryError::BadQuery(format!("bad timestamp `{raw}`"))
                        })?),
                    };
                    Ok(Atom::Relation {
                        relation: id,
                        subject: resolve(kb, &args[0])?,
                        object: resolve(kb, &args[1])?,
                        at,
                    })
                }
                TermKind::Attribute => {
                    arity(2)?;
                    let vt = &kb.attribute_decl(id).expect("kind checked").valuetype;
                    Ok(Atom::Attribute {
                        attribute: id,
                        subject: resolve(kb, &args[0])?,
                        value: parse_value(&args[1], vt)?,
                    })
                }
                _ => Err(QueryError::BadQuery(format!(
                    "`{name}` is not a relation or attribute"
                ))),
            }
        }
    }
}

fn parse_pattern_term(kb: &crate::model::KnowledgeBase, raw: &str) -> Result<PatternTerm, QueryError> {
    if let Some(v) = raw.strip_prefix('?') {
        if v.is_empty() {
            return Err(QueryError::BadQuery("empty variable name".to_string()));
        }
        Ok(PatternTerm::Var(v.to_string()))
    } else {
        Ok(PatternTerm::Const(resolve(kb, raw)?))
    }
}

/// Parses a pattern with `?name` variables, e.g. `has_orbit(?s, ?o)`,
/// `has_orbital_inclination(Orbit1, ?v)`, `is_tracked_by(?x, SensorA, ?t)`.
pub fn parse_pattern(
    kb: &crate::model::KnowledgeBase,
    text: &str,
) -> Result<Pattern, QueryError> {
    let (pred, args) = split_call(text)?;
    let bad = |m: String| QueryError::BadQuery(m);
    if args.len() != 2 && args.len() != 3 {
        return Err(bad(format!("{pred} patterns take 2 or 3 arguments, got {}", args.len())));
    }
    let subject = parse_pattern_term(kb, &args[0])?;

    let (predicate, object) = if pred == "instance_of" {
        let object = match parse_pattern_term(kb, &args[1])? {
            PatternTerm::Var(v) => PatternObject::Var(v),
            PatternTerm::Const(id) => {
                if kb.kind(id) != TermKind::Class {
                    return Err(bad(format!("`{}` is not a class", args[1])));
                }
                PatternObject::Const(id)
            }
        };
        (PatternPredicate::InstanceOf, object)
    } else {
        let id = resolve(kb, &pred)?;
        match kb.kind(id) {
            TermKind::Relation => {
                let object = match parse_pattern_term(kb, &args[1])? {
                    PatternTerm::Var(v) => PatternObject::Var(v),
                    PatternTerm::Const(c) => PatternObject::Const(c),
                };
                (PatternPredicate::Relation(id), object)
            }
            TermKind::Attribute => {
                let object = if let Some(v) = args[1].strip_prefix('?') {
                    PatternObject::Var(v.to_string())
                } else {
                    let vt = &kb.attribute_decl(id).expect("kind checked").valuetype;
                    PatternObject::Value(parse_value(&args[1], vt)?)
                };
                (PatternPredicate::Attribute(id), object)
            }
            _ => return Err(bad(format!("`{pred}` is not a relation or attribute"))),
        }
    };

    let time = match args.get(2) {
        None => None,
        Some(raw) => {
            if let Some(v) = raw.strip_prefix('?') {
                Some(PatternTime::Var(v.to_string()))
            } else {
                Some(PatternTime::At(TimeStamp::parse(raw).ok_or_else(|| {
                    bad(format!("bad timestamp `{raw}`"))
                })?))
            }
        }
    };

    Ok(Pattern { predicate, subject, object, time })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::load_documents;
    use crate::model::KnowledgeBase;
    use crate::reasoner::{materialize, Closure, ReasonerConfig};

    const SCENARIO: &str = "\
class Sensor
class Space-Based_Sensor is_a Sensor
class Space_Object
class Satellite is_a Space_Object
class Artificial_Satellite is_a Satellite
class Orbit
relation has_orbit domain Satellite range Orbit
relation is_tracked_by domain Space_Object range Sensor temporal
attribute has_orbital_inclination domain Orbit valuetype decimal unit degree
individual SensorA instance_of Space-Based_Sensor
individual NAVSTAR-66 instance_of Artificial_Satellite
individual Orbit1 instance_of Orbit
fact has_orbit(NAVSTAR-66, Orbit1)
fact has_orbital_inclination(Orbit1, 60.0)
fact is_tracked_by(NAVSTAR-66, SensorA) at 2016-02-10T00:00:00Z
";

    fn scenario() -> KnowledgeBase {
        let (kb, diags) = load_documents(&[("s.ssao".to_string(), SCENARIO.to_string())]);
        assert!(diags.is_empty(), "{diags:?}");
        kb
    }

    fn closed(kb: &KnowledgeBase) -> Closure<'_> {
        materialize(kb, &ReasonerConfig::default()).unwrap()
    }

    #[test]
    fn ask_indirect_instance() {
        let kb = scenario();
        let closure = closed(&kb);
        let atom = parse_atom(&kb, "instance_of(SensorA, Sensor)").unwrap();
        assert!(ask(&closure, &atom));
        let atom = parse_atom(&kb, "instance_of(SensorA, Orbit)").unwrap();
        assert!(!ask(&closure, &atom));
    }

    #[test]
    fn ask_is_a() {
        let kb = scenario();
        let closure = closed(&kb);
        let atom = parse_atom(&kb, "is_a(Space-Based_Sensor, Sensor)").unwrap();
        assert!(ask(&closure, &atom));
        let atom = parse_atom(&kb, "is_a(Sensor, Space-Based_Sensor)").unwrap();
        assert!(!ask(&closure, &atom));
    }

    #[test]
    fn ask_temporal_relation() {
        let kb = scenario();
        let closure = closed(&kb);
        // without a timestamp: true at some time
        let atom = parse_atom(&kb, "is_tracked_by(NAVSTAR-66, SensorA)").unwrap();
        assert!(ask(&closure, &atom));
        let atom =
            parse_atom(&kb, "is_tracked_by(NAVSTAR-66, SensorA, 2016-02-10T00:00:00Z)").unwrap();
        assert!(ask(&closure, &atom));
        let atom =
            parse_atom(&kb, "is_tracked_by(NAVSTAR-66, SensorA, 2017-01-01T00:00:00Z)").unwrap();
        assert!(!ask(&closure, &atom));
    }

    #[test]
    fn instances_direct_vs_all() {
        let kb = scenario();
        let closure = closed(&kb);
        let sensor = kb.get("Sensor").unwrap();
        let sbs = kb.get("Space-Based_Sensor").unwrap();
        let all = instances_of(&closure, sensor, false);
        assert_eq!(all, vec![kb.get("SensorA").unwrap()]);
        // SensorA's direct class is Space-Based_Sensor, so Sensor has no
        // direct instances
        assert!(instances_of(&closure, sensor, true).is_empty());
        assert_eq!(instances_of(&closure, sbs, true), vec![kb.get("SensorA").unwrap()]);
    }

    #[test]
    fn direct_is_subset_of_all() {
        let kb = scenario();
        let closure = closed(&kb);
        for decl in kb.classes() {
            let all = instances_of(&closure, decl.id, false);
            for x in instances_of(&closure, decl.id, true) {
                assert!(all.contains(&x));
            }
        }
    }

    #[test]
    fn match_relation_both_vars() {
        let kb = scenario();
        let closure = closed(&kb);
        let pat = parse_pattern(&kb, "has_orbit(?s, ?o)").unwrap();
        let b = match_pattern(&closure, &pat).unwrap();
        assert_eq!(b.vars, vec!["s", "o"]);
        assert_eq!(b.rows, vec![vec!["NAVSTAR-66".to_string(), "Orbit1".to_string()]]);
    }

    #[test]
    fn match_attribute_value() {
        let kb = scenario();
        let closure = closed(&kb);
        let pat = parse_pattern(&kb, "has_orbital_inclination(Orbit1, ?v)").unwrap();
        let b = match_pattern(&closure, &pat).unwrap();
        assert_eq!(b.rows, vec![vec!["60".to_string()]]);
    }

    #[test]
    fn match_temporal_binds_time() {
        let kb = scenario();
        let closure = closed(&kb);
        let pat = parse_pattern(&kb, "is_tracked_by(?x, SensorA, ?t)").unwrap();
        let b = match_pattern(&closure, &pat).unwrap();
        assert_eq!(
            b.rows,
            vec![vec!["NAVSTAR-66".to_string(), "2016-02-10T00:00:00Z".to_string()]]
        );
    }

    #[test]
    fn match_empty_when_no_facts() {
        let (kb, _) = load_documents(&[(
            "s.ssao".to_string(),
            "class A\nclass B\nrelation r domain A range B\n".to_string(),
        )]);
        let closure = closed(&kb);
        let pat = parse_pattern(&kb, "r(?x, ?y)").unwrap();
        assert!(match_pattern(&closure, &pat).unwrap().rows.is_empty());
    }

    #[test]
    fn ask_iff_ground_match_has_row() {
        let kb = scenario();
        let closure = closed(&kb);
        // ground ask true <=> the one-variable pattern restricted to the
        // constant returns the row
        let atom = parse_atom(&kb, "has_orbit(NAVSTAR-66, Orbit1)").unwrap();
        assert!(ask(&closure, &atom));
        let pat = parse_pattern(&kb, "has_orbit(NAVSTAR-66, ?o)").unwrap();
        let rows = match_pattern(&closure, &pat).unwrap().rows;
        assert!(rows.iter().any(|r| r == &vec!["Orbit1".to_string()]));
    }

    #[test]
    fn match_results_equal_brute_force_scan() {
        let kb = scenario();
        let closure = closed(&kb);
        let rel = kb.get("has_orbit").unwrap();
        let pat = parse_pattern(&kb, "has_orbit(?s, ?o)").unwrap();
        let got = match_pattern(&closure, &pat).unwrap().rows;
        // brute force over asserted + inferred fact lists
        let mut expect: Vec<Vec<String>> = kb
            .facts()
            .iter()
            .chain(closure.inferred_facts())
            .filter_map(|f| match f {
                crate::model::Fact::Relation { relation, subject, object, .. }
                    if *relation == rel =>
                {
                    Some(vec![kb.name(*subject).to_string(), kb.name(*object).to_string()])
                }
                _ => None,
            })
            .collect();
        expect.sort_unstable();
        expect.dedup();
        assert_eq!(got, expect);
    }

    #[test]
    fn parse_query_forms() {
        let kb = scenario();
        assert!(matches!(
            parse_query(&kb, "ask instance_of(SensorA, Sensor)").unwrap(),
            Query::Ask(_)
        ));
        assert!(matches!(
            parse_query(&kb, "instances-of Sensor").unwrap(),
            Query::InstancesOf { direct: false, .. }
        ));
        assert!(matches!(
            parse_query(&kb, "instances-of Sensor --direct").unwrap(),
            Query::InstancesOf { direct: true, .. }
        ));
        assert!(matches!(parse_query(&kb, "match has_orbit(?s, ?o)").unwrap(), Query::Match(_)));
        assert!(parse_query(&kb, "nonsense").is_err());
        assert!(matches!(
            parse_query(&kb, "ask instance_of(Nobody, Sensor)"),
            Err(QueryError::UnknownTerm(_))
        ));
        assert!(parse_query(&kb, "match has_orbit(NAVSTAR-66, Orbit1)").is_err() ||
            match_pattern(&closed(&kb), &parse_pattern(&kb, "has_orbit(NAVSTAR-66, Orbit1)").unwrap()).is_err());
    }

    #[test]
    fn match_instance_of_pattern() {
        let kb = scenario();
        let closure = closed(&kb);
        let pat = parse_pattern(&kb, "instance_of(?x, Sensor)").unwrap();
        let b = match_pattern(&closure, &pat).unwrap();
        assert_eq!(b.rows, vec![vec!["SensorA".to_string()]]);
    }
}
