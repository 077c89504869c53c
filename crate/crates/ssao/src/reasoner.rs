//! Forward-chaining materialization and integrity checking.
//!
//! `materialize` computes the least fixpoint of the monotone rules below over
//! an immutable knowledge base, keeping inferred facts separate from asserted
//! ones and recording rule-plus-premises provenance for every inference:
//!
//! - `R-INH`    class membership propagates up the subsumption hierarchy
//! - `R-TRANS`  transitive relations chain (same timestamp when temporal)
//! - `R-DEF-IN` an individual satisfying a defined class's genus and every
//!   differentia condition is realized as a member of the defined class
//! - `R-DEF-OUT` membership in a defined class yields the genus membership
//!   and, for `value`-mode conditions on atemporal relations, the relation
//! - `R-EQ`     equivalent classes become mutually subsuming
//! - `R-SAME`   facts about one of two same individuals hold of the other
//! - `R-DOMRANGE` (infer mode only) relation arguments acquire the declared
//!   domain and range classes
//!
//! `check` reports integrity violations against the closure. Under the open
//! world assumption these are constraint gaps in the data, not logical
//! contradictions: missing information never makes a knowledge base false.

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::model::{AttrValue, CondMode, Fact, KnowledgeBase, Origin, TermId, TimeStamp, ValueType};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainRangeMode {
    /// missing domain/range memberships are inferred (R-DOMRANGE)
    Infer,
    /// missing domain/range memberships are reported as violations
    Validate,
}

#[derive(Debug, Clone)]
pub struct ReasonerConfig {
    pub domain_range_mode: DomainRangeMode,
    pub max_iterations: u32,
}

impl Default for ReasonerConfig {
    fn default() -> Self {
        ReasonerConfig { domain_range_mode: DomainRangeMode::Validate, max_iterations: 10_000 }
    }
}

#[derive(Debug, Error)]
pub enum ReasonerError {
    #[error("fixpoint not reached within {0} iterations")]
    IterationBoundExceeded(u32),
}

/// How an inferred fact was produced: the rule and its premise facts.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub rule: &'static str,
    pub premises: Vec<Fact>,
}

/// Materialized deductive closure over a knowledge base.
///
/// Inferred facts are disjoint from asserted facts; a union view is available
/// through [`Closure::holds`] and the index accessors.
#[derive(Debug)]
pub struct Closure<'kb> {
    kb: &'kb KnowledgeBase,
    /// reflexive-transitive subsumption, including equivalence-induced edges
    subsumption: HashSet<(TermId, TermId)>,
    inferred: Vec<Fact>,
    inferred_set: HashSet<Fact>,
    provenance: HashMap<Fact, Derivation>,
    /// individual -> all classes it belongs to (asserted or inferred)
    members_of: HashMap<TermId, HashSet<TermId>>,
    /// relation -> all tuples (asserted or inferred)
    rel_facts: HashMap<TermId, HashSet<(TermId, TermId, Option<TimeStamp>)>>,
    /// attribute -> all (subject, value) pairs (asserted or inferred)
    attr_facts: HashMap<TermId, HashSet<(TermId, AttrValue)>>,
    /// normalized same-individual pairs (asserted or inferred)
    same_pairs: HashSet<(TermId, TermId)>,
}

impl<'kb> Closure<'kb> {
    pub fn kb(&self) -> &'kb KnowledgeBase {
        self.kb
    }

    pub fn subsumption(&self) -> &HashSet<(TermId, TermId)> {
        &self.subsumption
    }

    pub fn is_subclass(&self, sub: TermId, sup: TermId) -> bool {
        self.subsumption.contains(&(sub, sup))
    }

    pub fn inferred_facts(&self) -> &[Fact] {
        &self.inferred
    }

    pub fn is_inferred(&self, fact: &Fact) -> bool {
        self.inferred_set.contains(fact)
    }

    /// True when the fact is asserted or inferred.
    pub fn holds(&self, fact: &Fact) -> bool {
        self.kb.has_fact(fact) || self.inferred_set.contains(fact)
    }

    pub fn derivation(&self, fact: &Fact) -> Option<&Derivation> {
        self.provenance.get(fact)
    }

    pub fn classes_of(&self, individual: TermId) -> impl Iterator<Item = TermId> + '_ {
        self.members_of.get(&individual).into_iter().flatten().copied()
    }

    pub fn is_member(&self, individual: TermId, class: TermId) -> bool {
        self.members_of.get(&individual).is_some_and(|s| s.contains(&class))
    }

    pub fn members(&self, class: TermId) -> Vec<TermId> {
        let mut out: Vec<TermId> = self
            .members_of
            .iter()
            .filter(|(_, cs)| cs.contains(&class))
            .map(|(&i, _)| i)
            .collect();
        out.sort_unstable();
        out
    }

    pub fn relation_tuples(
        &self,
        relation: TermId,
    ) -> impl Iterator<Item = &(TermId, TermId, Option<TimeStamp>)> + '_ {
        self.rel_facts.get(&relation).into_iter().flatten()
    }

    pub fn attribute_tuples(
        &self,
        attribute: TermId,
    ) -> impl Iterator<Item = &(TermId, AttrValue)> + '_ {
        self.attr_facts.get(&attribute).into_iter().flatten()
    }

    pub fn same_as(&self, a: TermId, b: TermId) -> bool {
        a == b || self.same_pairs.contains(&(a, b)) || self.same_pairs.contains(&(b, a))
    }

    /// Source locations behind a fact: its own origin when asserted, or the
    /// origins of the asserted leaves of its premise chain.
    pub fn origins(&self, fact: &Fact) -> Vec<Origin> {
        let mut out = BTreeSet::new();
        let mut stack = vec![fact.clone()];
        let mut seen = HashSet::new();
        while let Some(f) = stack.pop() {
            if !seen.insert(f.clone()) {
                continue;
            }
            if let Some(origin) = self.kb.fact_origin(&f) {
                out.insert(origin.clone());
            } else if let Some(d) = self.provenance.get(&f) {
                stack.extend(d.premises.iter().cloned());
            }
        }
        out.into_iter().collect()
    }
}

/// Reflexive-transitive closure of the declared supers edges.
pub fn subsumption_closure(kb: &KnowledgeBase) -> HashSet<(TermId, TermId)> {
    closure_over_edges(kb, |_| {})
}

fn closure_over_edges(
    kb: &KnowledgeBase,
    add_extra: impl Fn(&mut HashMap<TermId, Vec<TermId>>),
) -> HashSet<(TermId, TermId)> {
    let mut edges: HashMap<TermId, Vec<TermId>> = HashMap::new();
    for decl in kb.classes() {
        let e = edges.entry(decl.id).or_default();
        e.extend(decl.supers.iter().copied());
    }
    add_extra(&mut edges);
    let mut out = HashSet::new();
    for decl in kb.classes() {
        // DFS from each class; reflexive by construction
        let mut stack = vec![decl.id];
        let mut seen = HashSet::new();
        while let Some(c) = stack.pop() {
            if !seen.insert(c) {
                continue;
            }
            out.insert((decl.id, c));
            if let Some(sups) = edges.get(&c) {
                stack.extend(sups.iter().copied());
            }
        }
    }
    out
}

fn subsumption_with_equivalences(kb: &KnowledgeBase) -> HashSet<(TermId, TermId)> {
    closure_over_edges(kb, |edges| {
        for fact in kb.facts() {
            if let Fact::Equivalent(a, b) = fact {
                edges.entry(*a).or_default().push(*b);
                edges.entry(*b).or_default().push(*a);
            }
        }
    })
}

struct Engine<'kb> {
    kb: &'kb KnowledgeBase,
    subsumption: HashSet<(TermId, TermId)>,
    /// supers lists per class from the extended subsumption (excl. reflexive)
    strict_supers: HashMap<TermId, Vec<TermId>>,
    all: HashSet<Fact>,
    inferred: Vec<Fact>,
    provenance: HashMap<Fact, Derivation>,
    members_of: HashMap<TermId, HashSet<TermId>>,
    rel_facts: HashMap<TermId, HashSet<(TermId, TermId, Option<TimeStamp>)>>,
    attr_facts: HashMap<TermId, HashSet<(TermId, AttrValue)>>,
    same_pairs: HashSet<(TermId, TermId)>,
}

impl<'kb> Engine<'kb> {
    fn new(kb: &'kb KnowledgeBase) -> Self {
        let subsumption = subsumption_with_equivalences(kb);
        let mut strict_supers: HashMap<TermId, Vec<TermId>> = HashMap::new();
        for &(sub, sup) in &subsumption {
            if sub != sup {
                strict_supers.entry(sub).or_default().push(sup);
            }
        }
        let mut engine = Engine {
            kb,
            subsumption,
            strict_supers,
            all: HashSet::new(),
            inferred: Vec::new(),
            provenance: HashMap::new(),
            members_of: HashMap::new(),
            rel_facts: HashMap::new(),
            attr_facts: HashMap::new(),
            same_pairs: HashSet::new(),
        };
        for fact in kb.facts() {
            engine.index(fact);
            engine.all.insert(fact.clone());
        }
        engine
    }

    fn index(&mut self, fact: &Fact) {
        match fact {
            Fact::Class { individual, class } => {
                self.members_of.entry(*individual).or_default().insert(*class);
            }
            Fact::Relation { relation, subject, object, at } => {
                self.rel_facts.entry(*relation).or_default().insert((*subject, *object, *at));
            }
            Fact::Attribute { attribute, subject, value } => {
                self.attr_facts.entry(*attribute).or_default().insert((*subject, value.clone()));
            }
            Fact::Same(a, b) => {
                self.same_pairs.insert((*a, *b));
            }
            Fact::Equivalent(..) | Fact::Disjoint(..) => {}
        }
    }

    fn emit(&mut self, out: &mut Vec<(Fact, Derivation)>, fact: Fact, rule: &'static str, premises: Vec<Fact>) {
        if !self.all.contains(&fact) {
            out.push((fact, Derivation { rule, premises }));
        }
    }

    fn round(&mut self, cfg: &ReasonerConfig) -> usize {
        let mut new: Vec<(Fact, Derivation)> = Vec::new();

        // R-INH
        let memberships: Vec<(TermId, TermId)> = self
            .members_of
            .iter()
            .flat_map(|(&ind, cs)| cs.iter().map(move |&c| (ind, c)))
            .collect();
        for &(ind, class) in &memberships {
            if let Some(sups) = self.strict_supers.get(&class) {
                for &sup in sups.clone().iter() {
                    self.emit(
                        &mut new,
                        Fact::Class { individual: ind, class: sup },
                        "R-INH",
                        vec![Fact::Class { individual: ind, class }],
                    );
                }
            }
        }

        // R-TRANS
        let transitive: Vec<(TermId, bool)> = self
            .kb
            .relations()
            .filter(|r| r.transitive)
            .map(|r| (r.id, r.temporal))
            .collect();
        for (rel, temporal) in transitive {
            let Some(tuples) = self.rel_facts.get(&rel) else { continue };
            let tuples: Vec<_> = tuples.iter().copied().collect();
            let mut by_subject: HashMap<TermId, Vec<(TermId, Option<TimeStamp>)>> = HashMap::new();
            for &(s, o, at) in &tuples {
                by_subject.entry(s).or_default().push((o, at));
            }
            for &(a, b, at1) in &tuples {
                if let Some(nexts) = by_subject.get(&b) {
                    for &(c, at2) in nexts.clone().iter() {
                        // temporal transitive relations chain only within one instant
                        if temporal && at1 != at2 {
                            continue;
                        }
                        self.emit(
                            &mut new,
                            Fact::Relation { relation: rel, subject: a, object: c, at: at1 },
                            "R-TRANS",
                            vec![
                                Fact::Relation { relation: rel, subject: a, object: b, at: at1 },
                                Fact::Relation { relation: rel, subject: b, object: c, at: at2 },
                            ],
                        );
                    }
                }
            }
        }

        // R-DEF-IN and R-DEF-OUT
        let defined: Vec<(TermId, TermId, Vec<(TermId, CondMode, TermId)>)> = self
            .kb
            .classes()
            .filter_map(|c| {
                c.definition.as_ref().map(|d| {
                    (
                        c.id,
                        d.genus,
                        d.differentia.iter().map(|x| (x.relation, x.mode, x.target)).collect(),
                    )
                })
            })
            .collect();
        for (class, genus, conds) in &defined {
            // R-DEF-IN: realize members of the genus that satisfy every condition
            let candidates: Vec<TermId> = self
                .members_of
                .iter()
                .filter(|(_, cs)| cs.contains(genus))
                .map(|(&i, _)| i)
                .collect();
            'cand: for x in candidates {
                if self.members_of.get(&x).is_some_and(|cs| cs.contains(class)) {
                    continue;
                }
                let mut premises = vec![Fact::Class { individual: x, class: *genus }];
                for &(rel, mode, target) in conds {
                    let Some(tuples) = self.rel_facts.get(&rel) else { continue 'cand };
                    let witness = match mode {
                        CondMode::Value => tuples
                            .iter()
                            .find(|(s, o, _)| *s == x && *o == target)
                            .copied(),
                        CondMode::Some => tuples
                            .iter()
                            .find(|(s, o, _)| {
                                *s == x
                                    && self
                                        .members_of
                                        .get(o)
                                        .is_some_and(|cs| cs.contains(&target))
                            })
                            .copied(),
                    };
                    match witness {
                        Some((s, o, at)) => {
                            premises.push(Fact::Relation { relation: rel, subject: s, object: o, at })
                        }
                        None => continue 'cand,
                    }
                }
                self.emit(&mut new, Fact::Class { individual: x, class: *class }, "R-DEF-IN", premises);
            }

            // R-DEF-OUT: members of the defined class carry the definition
            let members: Vec<TermId> = self
                .members_of
                .iter()
                .filter(|(_, cs)| cs.contains(class))
                .map(|(&i, _)| i)
                .collect();
            for x in members {
                let premise = Fact::Class { individual: x, class: *class };
                self.emit(
                    &mut new,
                    Fact::Class { individual: x, class: *genus },
                    "R-DEF-OUT",
                    vec![premise.clone()],
                );
                for &(rel, mode, target) in conds {
                    if mode != CondMode::Value {
                        continue;
                    }
                    // temporal relations cannot be asserted without an instant
                    let temporal = self.kb.relation_decl(rel).map(|d| d.temporal).unwrap_or(false);
                    if temporal {
                        continue;
                    }
                    self.emit(
                        &mut new,
                        Fact::Relation { relation: rel, subject: x, object: target, at: None },
                        "R-DEF-OUT",
                        vec![premise.clone()],
                    );
                }
            }
        }

        // R-SAME
        let sames: Vec<(TermId, TermId)> = self.same_pairs.iter().copied().collect();
        if !sames.is_empty() {
            // transitive closure over normalized pairs
            for &(a, b) in &sames {
                for &(c, d) in &sames {
                    if (a, b) == (c, d) {
                        continue;
                    }
                    // the pairs share an element; derive the third link
                    let linked: Option<(TermId, TermId)> = if b == c {
                        Some((a, d))
                    } else if b == d {
                        Some((a, c))
                    } else if a == c {
                        Some((b, d))
                    } else if a == d {
                        Some((b, c))
                    } else {
                        None
                    };
                    if let Some((x, y)) = linked {
                        if x != y {
                            let (x, y) = self.kb.ordered_pair(x, y);
                            self.emit(
                                &mut new,
                                Fact::Same(x, y),
                                "R-SAME",
                                vec![Fact::Same(a, b), Fact::Same(c, d)],
                            );
                        }
                    }
                }
            }
            // duplicate facts across each pair, in both directions
            let facts: Vec<Fact> = self.all.iter().cloned().collect();
            for &(a, b) in &sames {
                let same_fact = Fact::Same(a, b);
                for fact in &facts {
                    for (from, to) in [(a, b), (b, a)] {
                        if let Some(dup) = substitute(fact, from, to) {
                            self.emit(&mut new, dup, "R-SAME", vec![same_fact.clone(), fact.clone()]);
                        }
                    }
                }
            }
        }

        // R-DOMRANGE
        if cfg.domain_range_mode == DomainRangeMode::Infer {
            let decls: Vec<(TermId, TermId, TermId)> =
                self.kb.relations().map(|r| (r.id, r.domain, r.range)).collect();
            for (rel, domain, range) in decls {
                let Some(tuples) = self.rel_facts.get(&rel) else { continue };
                let tuples: Vec<_> = tuples.iter().copied().collect();
                for (s, o, at) in tuples {
                    let premise = Fact::Relation { relation: rel, subject: s, object: o, at };
                    self.emit(
                        &mut new,
                        Fact::Class { individual: s, class: domain },
                        "R-DOMRANGE",
                        vec![premise.clone()],
                    );
                    self.emit(
                        &mut new,
                        Fact::Class { individual: o, class: range },
                        "R-DOMRANGE",
                        vec![premise],
                    );
                }
            }
        }

        let mut added = 0;
        for (fact, derivation) in new {
            if self.all.insert(fact.clone()) {
                self.index(&fact);
                self.inferred.push(fact.clone());
                self.provenance.insert(fact, derivation);
                added += 1;
            }
        }
        added
    }
}

/// Substitutes `from` with `to` in individual positions; None when the fact
/// does not mention `from` or is not about individuals.
fn substitute(fact: &Fact, from: TermId, to: TermId) -> Option<Fact> {
    match fact {
        Fact::Class { individual, class } if *individual == from => {
            Some(Fact::Class { individual: to, class: *class })
        }
        Fact::Relation { relation, subject, object, at }
            if *subject == from || *object == from =>
        {
            let s = if *subject == from { to } else { *subject };
            let o = if *object == from { to } else { *object };
            Some(Fact::Relation { relation: *relation, subject: s, object: o, at: *at })
        }
        Fact::Attribute { attribute, subject, value } if *subject == from => {
            Some(Fact::Attribute { attribute: *attribute, subject: to, value: value.clone() })
        }
        _ => None,
    }
}

/// Least fixpoint of the inference rules, with provenance.
pub fn materialize<'kb>(
    kb: &'kb KnowledgeBase,
    cfg: &ReasonerConfig,
) -> Result<Closure<'kb>, ReasonerError> {
    let mut engine = Engine::new(kb);
    let mut rounds = 0u32;
    loop {
        let added = engine.round(cfg);
        if added == 0 {
            break;
        }
        rounds += 1;
        if rounds > cfg.max_iterations {
            return Err(ReasonerError::IterationBoundExceeded(cfg.max_iterations));
        }
    }
    let inferred_set: HashSet<Fact> = engine.inferred.iter().cloned().collect();
    Ok(Closure {
        kb,
        subsumption: engine.subsumption,
        inferred: engine.inferred,
        inferred_set,
        provenance: engine.provenance,
        members_of: engine.members_of,
        rel_facts: engine.rel_facts,
        attr_facts: engine.attr_facts,
        same_pairs: engine.same_pairs,
    })
}

// ---------------------------------------------------------------------------
// integrity checking

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationCode {
    DomainViolation,
    RangeViolation,
    DisjointClash,
    AntisymmetryClash,
    TleCoverageGap,
    EnumViolation,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::DomainViolation => "DOMAIN_VIOLATION",
            ViolationCode::RangeViolation => "RANGE_VIOLATION",
            ViolationCode::DisjointClash => "DISJOINT_CLASH",
            ViolationCode::AntisymmetryClash => "ANTISYMMETRY_CLASH",
            ViolationCode::TleCoverageGap => "TLE_COVERAGE_GAP",
            ViolationCode::EnumViolation => "ENUM_VIOLATION",
        }
    }
}

impl std::fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A constraint gap in the asserted data, citing the facts involved.
#[derive(Debug, Clone)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
    pub facts: Vec<Fact>,
    pub locations: Vec<Origin>,
}

// built-in term names for the A4 coverage constraint
const TRACKED_BY: &str = "is_tracked_by";
const DESCRIBES_ORBIT_OF: &str = "describes_orbit_of";
const TLE_CLASS: &str = "Two-Line_Element_Set";

/// Checks integrity constraints against a materialized closure. Violations
/// are data, not failures; the list is deterministically ordered by
/// (code, location, message).
pub fn check(closure: &Closure<'_>, cfg: &ReasonerConfig) -> Vec<Violation> {
    let kb = closure.kb();
    let mut out: Vec<Violation> = Vec::new();
    let mut push = |closure: &Closure<'_>, code, message, facts: Vec<Fact>| {
        let mut locations = Vec::new();
        for f in &facts {
            locations.extend(closure.origins(f));
        }
        locations.sort();
        locations.dedup();
        out.push(Violation { code, message, facts, locations });
    };

    // DOMAIN / RANGE (validate mode only)
    if cfg.domain_range_mode == DomainRangeMode::Validate {
        for rel in kb.relations() {
            for &(s, o, at) in closure.relation_tuples(rel.id) {
                let fact = Fact::Relation { relation: rel.id, subject: s, object: o, at };
                if !closure.is_member(s, rel.domain) {
                    push(
                        closure,
                        ViolationCode::DomainViolation,
                        format!(
                            "{} subject {} is not an instance of {}",
                            kb.name(rel.id),
                            kb.name(s),
                            kb.name(rel.domain)
                        ),
                        vec![fact.clone()],
                    );
                }
                if !closure.is_member(o, rel.range) {
                    push(
                        closure,
                        ViolationCode::RangeViolation,
                        format!(
                            "{} object {} is not an instance of {}",
                            kb.name(rel.id),
                            kb.name(o),
                            kb.name(rel.range)
                        ),
                        vec![fact],
                    );
                }
            }
        }
    }

    // DISJOINT_CLASH
    for fact in kb.facts() {
        let Fact::Disjoint(a, b) = fact else { continue };
        let members_a: HashSet<TermId> = closure.members(*a).into_iter().collect();
        for x in closure.members(*b) {
            if members_a.contains(&x) {
                push(
                    closure,
                    ViolationCode::DisjointClash,
                    format!(
                        "{} is an instance of both disjoint classes {} and {}",
                        kb.name(x),
                        kb.name(*a),
                        kb.name(*b)
                    ),
                    vec![
                        fact.clone(),
                        Fact::Class { individual: x, class: *a },
                        Fact::Class { individual: x, class: *b },
                    ],
                );
            }
        }
    }

    // ANTISYMMETRY_CLASH
    for rel in kb.relations().filter(|r| r.antisymmetric) {
        let mut reported: HashSet<(TermId, TermId)> = HashSet::new();
        let tuples: Vec<_> = closure.relation_tuples(rel.id).copied().collect();
        let pairs: HashSet<(TermId, TermId)> = tuples.iter().map(|&(s, o, _)| (s, o)).collect();
        for &(s, o, at) in &tuples {
            if s == o || closure.same_as(s, o) {
                continue;
            }
            if pairs.contains(&(o, s)) {
                let key = if s < o { (s, o) } else { (o, s) };
                if !reported.insert(key) {
                    continue;
                }
                let back = tuples.iter().find(|&&(s2, o2, _)| s2 == o && o2 == s).unwrap();
                push(
                    closure,
                    ViolationCode::AntisymmetryClash,
                    format!(
                        "antisymmetric relation {} holds in both directions between {} and {}",
                        kb.name(rel.id),
                        kb.name(key.0),
                        kb.name(key.1)
                    ),
                    vec![
                        Fact::Relation { relation: rel.id, subject: s, object: o, at },
                        Fact::Relation { relation: rel.id, subject: back.0, object: back.1, at: back.2 },
                    ],
                );
            }
        }
    }

    // TLE_COVERAGE_GAP: every tracked satellite must have some TLE describing
    // its orbit at some time
    let tracked_by = kb.get(TRACKED_BY).filter(|&id| kb.relation_decl(id).is_some());
    let describes = kb.get(DESCRIBES_ORBIT_OF).filter(|&id| kb.relation_decl(id).is_some());
    let tle_class = kb.get(TLE_CLASS).filter(|&id| kb.class_decl(id).is_some());
    if let (Some(tracked_by), Some(describes), Some(tle_class)) = (tracked_by, describes, tle_class) {
        let covered: HashSet<TermId> = closure
            .relation_tuples(describes)
            .filter(|(y, _, _)| closure.is_member(*y, tle_class))
            .map(|&(_, x, _)| x)
            .collect();
        let mut reported: HashSet<(TermId, Option<TimeStamp>)> = HashSet::new();
        for &(x, s, at) in closure.relation_tuples(tracked_by) {
            if covered.contains(&x) || !reported.insert((x, at)) {
                continue;
            }
            let when = at.map(|t| t.to_string()).unwrap_or_else(|| "-".to_string());
            push(
                closure,
                ViolationCode::TleCoverageGap,
                format!(
                    "{} is tracked at {} but no Two-Line_Element_Set describes its orbit",
                    kb.name(x),
                    when
                ),
                vec![Fact::Relation { relation: tracked_by, subject: x, object: s, at }],
            );
        }
    }

    // ENUM_VIOLATION
    for attr in kb.attributes() {
        let ValueType::Enum(allowed) = &attr.valuetype else { continue };
        for (s, v) in closure.attribute_tuples(attr.id) {
            if let AttrValue::EnumToken(tok) = v {
                if !allowed.iter().any(|a| a == tok) {
                    push(
                        closure,
                        ViolationCode::EnumViolation,
                        format!(
                            "{} value `{}` on {} is not one of the declared tokens",
                            kb.name(attr.id),
                            tok,
                            kb.name(*s)
                        ),
                        vec![Fact::Attribute {
                            attribute: attr.id,
                            subject: *s,
                            value: v.clone(),
                        }],
                    );
                }
            }
        }
    }

    out.sort_by(|a, b| {
        (a.code, a.locations.first(), &a.message).cmp(&(b.code, b.locations.first(), &b.message))
    });
    out
}

// ---------------------------------------------------------------------------
// closure export

fn export_line(kb: &KnowledgeBase, fact: &Fact, status: &str) -> String {
    match fact {
        Fact::Class { individual, class } => format!(
            "{}\tinstance_of\t{}\t-\t{}",
            kb.name(*individual),
            kb.name(*class),
            status
        ),
        Fact::Relation { relation, subject, object, at } => {
            let when = at.map(|t| t.to_string()).unwrap_or_else(|| "-".to_string());
            format!(
                "{}\t{}\t{}\t{}\t{}",
                kb.name(*subject),
                kb.name(*relation),
                kb.name(*object),
                when,
                status
            )
        }
        Fact::Attribute { attribute, subject, value } => format!(
            "{}\t{}\t{}\t-\t{}",
            kb.name(*subject),
            kb.name(*attribute),
            crate::dsl::render_attr_value(value),
            status
        ),
        Fact::Equivalent(a, b) => {
            format!("{}\tequivalent\t{}\t-\t{}", kb.name(*a), kb.name(*b), status)
        }
        Fact::Disjoint(a, b) => {
            format!("{}\tdisjoint\t{}\t-\t{}", kb.name(*a), kb.name(*b), status)
        }
        Fact::Same(a, b) => format!("{}\tsame\t{}\t-\t{}", kb.name(*a), kb.name(*b), status),
    }
}

/// Line-oriented closure export: one fact per line, TAB-separated
/// `subject predicate object time-or-"-" asserted|inferred`, sorted
/// lexicographically. Bit-exact for golden-file comparison.
pub fn export_closure(closure: &Closure<'_>) -> String {
    let kb = closure.kb();
    let mut lines: Vec<String> = kb
        .facts()
        .iter()
        .map(|f| export_line(kb, f, "asserted"))
        .chain(closure.inferred_facts().iter().map(|f| export_line(kb, f, "inferred")))
        .collect();
    lines.sort_unstable();
    lines.dedup();
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::load_documents;
    use crate::model::Origin;

    fn load(text: &str) -> KnowledgeBase {
        let (kb, diags) = load_documents(&[("test.ssao".to_string(), text.to_string())]);
        assert!(diags.is_empty(), "{diags:?}");
        kb
    }

    fn id(kb: &KnowledgeBase, name: &str) -> TermId {
        kb.get(name).unwrap_or_else(|| panic!("missing term {name}"))
    }

    #[test]
    fn subsumption_is_reflexive_and_transitive() {
        let kb = load("class C\nclass B is_a C\nclass A is_a B\n");
        let subs = subsumption_closure(&kb);
        let (a, b, c) = (id(&kb, "A"), id(&kb, "B"), id(&kb, "C"));
        for x in [a, b, c] {
            assert!(subs.contains(&(x, x)));
        }
        assert!(subs.contains(&(a, c)));
        assert!(!subs.contains(&(c, a)));
    }

    #[test]
    fn single_class_reflexive_only() {
        let kb = load("class C\n");
        let subs = subsumption_closure(&kb);
        assert_eq!(subs.len(), 1);
        assert!(subs.contains(&(id(&kb, "C"), id(&kb, "C"))));
    }

    #[test]
    fn indirect_instance_is_inferred() {
        let kb = load(
            "class Sensor\nclass Space-Based_Sensor is_a Sensor\nindividual SensorA instance_of Space-Based_Sensor\n",
        );
        let closure = materialize(&kb, &ReasonerConfig::default()).unwrap();
        let fact = Fact::Class { individual: id(&kb, "SensorA"), class: id(&kb, "Sensor") };
        assert!(closure.is_inferred(&fact));
        let d = closure.derivation(&fact).unwrap();
        assert_eq!(d.rule, "R-INH");
    }

    #[test]
    fn transitive_relation_chains() {
        let kb = load(
            "class C\nrelation part_of domain C range C transitive antisymmetric\n\
             individual a instance_of C\nindividual b instance_of C\nindividual c instance_of C\n\
             fact part_of(a, b)\nfact part_of(b, c)\n",
        );
        let closure = materialize(&kb, &ReasonerConfig::default()).unwrap();
        let fact = Fact::Relation {
            relation: id(&kb, "part_of"),
            subject: id(&kb, "a"),
            object: id(&kb, "c"),
            at: None,
        };
        assert!(closure.is_inferred(&fact));
    }

    #[test]
    fn defined_class_realization() {
        let kb = load(
            "class Space_Object\nclass Artificial_Satellite is_a Space_Object\n\
             class Satellite_Constellation is_a Space_Object\n\
             relation part_of domain Space_Object range Space_Object transitive antisymmetric\n\
             class GPS_Satellite equiv Artificial_Satellite and part_of value GPS\n\
             individual GPS instance_of Satellite_Constellation\n\
             individual N instance_of Artificial_Satellite\n\
             fact part_of(N, GPS)\n",
        );
        let closure = materialize(&kb, &ReasonerConfig::default()).unwrap();
        let fact = Fact::Class { individual: id(&kb, "N"), class: id(&kb, "GPS_Satellite") };
        assert!(closure.is_inferred(&fact), "R-DEF-IN should realize N as GPS_Satellite");
    }

    #[test]
    fn defined_class_out_direction() {
        let kb = load(
            "class Space_Object\nclass Artificial_Satellite is_a Space_Object\n\
             class Satellite_Constellation is_a Space_Object\n\
             relation part_of domain Space_Object range Space_Object transitive antisymmetric\n\
             class GPS_Satellite equiv Artificial_Satellite and part_of value GPS\n\
             individual GPS instance_of Satellite_Constellation\n\
             individual M instance_of GPS_Satellite\n",
        );
        let closure = materialize(&kb, &ReasonerConfig::default()).unwrap();
        assert!(closure.holds(&Fact::Class {
            individual: id(&kb, "M"),
            class: id(&kb, "Artificial_Satellite")
        }));
        assert!(closure.is_inferred(&Fact::Relation {
            relation: id(&kb, "part_of"),
            subject: id(&kb, "M"),
            object: id(&kb, "GPS"),
            at: None,
        }));
    }

    #[test]
    fn equivalence_is_mutual_subsumption() {
        let kb = load("class A\nclass B\nequivalent A B\nindividual x instance_of A\n");
        let closure = materialize(&kb, &ReasonerConfig::default()).unwrap();
        assert!(closure.is_subclass(id(&kb, "A"), id(&kb, "B")));
        assert!(closure.is_subclass(id(&kb, "B"), id(&kb, "A")));
        assert!(closure.holds(&Fact::Class { individual: id(&kb, "x"), class: id(&kb, "B") }));
    }

    #[test]
    fn same_individual_duplicates_facts() {
        let kb = load(
            "class C\nattribute score domain C valuetype integer\n\
             individual a instance_of C\nindividual b instance_of C\n\
             fact score(a, 5)\nsame a b\n",
        );
        let closure = materialize(&kb, &ReasonerConfig::default()).unwrap();
        assert!(closure.holds(&Fact::Attribute {
            attribute: id(&kb, "score"),
            subject: id(&kb, "b"),
            value: AttrValue::Integer(5),
        }));
    }

    #[test]
    fn empty_abox_infers_nothing() {
        let kb = load("class A\nclass B is_a A\n");
        let closure = materialize(&kb, &ReasonerConfig::default()).unwrap();
        assert!(closure.inferred_facts().is_empty());
    }

    #[test]
    fn materialization_is_idempotent() {
        let kb = load(
            "class Sensor\nclass Space-Based_Sensor is_a Sensor\n\
             individual SensorA instance_of Space-Based_Sensor\n",
        );
        let closure = materialize(&kb, &ReasonerConfig::default()).unwrap();
        // augment the kb with its own inferences; nothing new may appear
        let mut kb2 = kb.clone();
        for f in closure.inferred_facts() {
            kb2.assert_fact(f.clone(), Origin::synthetic()).unwrap();
        }
        let closure2 = materialize(&kb2, &ReasonerConfig::default()).unwrap();
        assert!(closure2.inferred_facts().is_empty());
    }

    #[test]
    fn domain_range_infer_vs_validate() {
        let text = "class Satellite\nclass Orbit\nclass Thing\n\
             relation has_orbit domain Satellite range Orbit\n\
             individual G instance_of Thing\nindividual O instance_of Orbit\n\
             fact has_orbit(G, O)\n";
        let kb = load(text);
        let validate = ReasonerConfig::default();
        let closure = materialize(&kb, &validate).unwrap();
        let violations = check(&closure, &validate);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].code, ViolationCode::DomainViolation);

        let infer = ReasonerConfig { domain_range_mode: DomainRangeMode::Infer, ..validate };
        let closure = materialize(&kb, &infer).unwrap();
        assert!(closure.holds(&Fact::Class {
            individual: id(&kb, "G"),
            class: id(&kb, "Satellite")
        }));
        assert!(check(&closure, &infer).is_empty());
    }

    #[test]
    fn tle_coverage_gap() {
        let text = "class Satellite\nclass Sensor\nclass Two-Line_Element_Set\n\
             relation is_tracked_by domain Satellite range Sensor temporal\n\
             relation describes_orbit_of domain Two-Line_Element_Set range Satellite temporal\n\
             individual S instance_of Satellite\nindividual X instance_of Sensor\n\
             fact is_tracked_by(S, X) at 2016-02-10T00:00:00Z\n";
        let kb = load(text);
        let cfg = ReasonerConfig::default();
        let closure = materialize(&kb, &cfg).unwrap();
        let violations = check(&closure, &cfg);
        let gaps: Vec<_> =
            violations.iter().filter(|v| v.code == ViolationCode::TleCoverageGap).collect();
        assert_eq!(gaps.len(), 1);

        // adding a TLE closes the gap (coverage at any time satisfies A4)
        let text2 = format!(
            "{text}individual T instance_of Two-Line_Element_Set\n\
             fact describes_orbit_of(T, S) at 2016-02-11T12:00:00Z\n"
        );
        let kb2 = load(&text2);
        let closure2 = materialize(&kb2, &cfg).unwrap();
        let violations2 = check(&closure2, &cfg);
        assert!(violations2.iter().all(|v| v.code != ViolationCode::TleCoverageGap));
    }

    #[test]
    fn disjoint_clash_detected() {
        let kb = load(
            "class A\nclass B\ndisjoint A B\nindividual x instance_of A and B\n",
        );
        let cfg = ReasonerConfig::default();
        let closure = materialize(&kb, &cfg).unwrap();
        let violations = check(&closure, &cfg);
        assert!(violations.iter().any(|v| v.code == ViolationCode::DisjointClash));
    }

    #[test]
    fn antisymmetry_clash_respects_same() {
        let base = "class C\nrelation part_of domain C range C transitive antisymmetric\n\
             individual a instance_of C\nindividual b instance_of C\n\
             fact part_of(a, b)\nfact part_of(b, a)\n";
        let cfg = ReasonerConfig { domain_range_mode: DomainRangeMode::Infer, ..Default::default() };
        let kb = load(base);
        let closure = materialize(&kb, &cfg).unwrap();
        let violations = check(&closure, &cfg);
        assert!(violations.iter().any(|v| v.code == ViolationCode::AntisymmetryClash));

        // once a and b are the same individual there is no clash
        let kb2 = load(&format!("{base}same a b\n"));
        let closure2 = materialize(&kb2, &cfg).unwrap();
        let violations2 = check(&closure2, &cfg);
        assert!(violations2.iter().all(|v| v.code != ViolationCode::AntisymmetryClash));
    }

    #[test]
    fn enum_violation_detected() {
        let kb = load(
            "class C\nattribute has_status domain C valuetype enum(Operational,Inactive)\n\
             individual x instance_of C\nfact has_status(x, Broken)\n",
        );
        let cfg = ReasonerConfig::default();
        let closure = materialize(&kb, &cfg).unwrap();
        let violations = check(&closure, &cfg);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].code, ViolationCode::EnumViolation);
        // case-sensitive tokens
        let kb2 = load(
            "class C\nattribute has_status domain C valuetype enum(Operational,Inactive)\n\
             individual x instance_of C\nfact has_status(x, operational)\n",
        );
        let closure2 = materialize(&kb2, &cfg).unwrap();
        assert_eq!(check(&closure2, &cfg).len(), 1);
    }

    #[test]
    fn provenance_premises_reproduce_facts() {
        let kb = load(
            "class Sensor\nclass Space-Based_Sensor is_a Sensor\n\
             individual SensorA instance_of Space-Based_Sensor\n",
        );
        let closure = materialize(&kb, &ReasonerConfig::default()).unwrap();
        for f in closure.inferred_facts() {
            let d = closure.derivation(f).unwrap();
            assert!(!d.rule.is_empty());
            for p in &d.premises {
                assert!(closure.holds(p), "premise must hold: {p:?}");
            }
        }
    }

    #[test]
    fn export_is_sorted_and_tagged() {
        let kb = load(
            "class Sensor\nclass Space-Based_Sensor is_a Sensor\n\
             individual SensorA instance_of Space-Based_Sensor\n",
        );
        let closure = materialize(&kb, &ReasonerConfig::default()).unwrap();
        let text = export_closure(&closure);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let mut sorted = lines.clone();
        sorted.sort_unstable();
        assert_eq!(lines, sorted);
        assert!(text.contains("SensorA\tinstance_of\tSensor\t-\tinferred"));
        assert!(text.contains("SensorA\tinstance_of\tSpace-Based_Sensor\t-\tasserted"));
    }
}
