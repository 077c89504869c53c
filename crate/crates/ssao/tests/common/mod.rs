//! Shared test infrastructure: an independent brute-force reasoning oracle,
//! a random knowledge-base generator, and a random TLE record generator.
//!
//! The oracle re-implements the inference rules as literal one-step scans
//! over the whole fact set with no indexes, shared state, or provenance —
//! deliberately nothing in common with the engine's implementation beyond
//! the rule definitions themselves.
#![allow(dead_code)] // each integration test uses a different subset

use std::collections::HashSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use ssao::model::{
    AttrValue, CondMode, Decimal, DefinedClassExpr, Fact, KnowledgeBase, Origin,
    RelationCondition, TermId, TimeStamp,
};
use ssao::tle::{PackedDecimal, TleRecord};

/// Naive fixpoint: applies every rule to the whole fact set until nothing
/// changes. Returns asserted ∪ inferred facts.
pub fn naive_fixpoint(kb: &KnowledgeBase, infer_domain_range: bool) -> HashSet<Fact> {
    let mut facts: HashSet<Fact> = kb.facts().iter().cloned().collect();
    loop {
        let snapshot: Vec<Fact> = facts.iter().cloned().collect();
        let mut new: Vec<Fact> = Vec::new();

        for f in &snapshot {
            match f {
                // membership propagates one step up declared supers
                Fact::Class { individual, class } => {
                    if let Some(decl) = kb.class_decl(*class) {
                        for &s in &decl.supers {
                            new.push(Fact::Class { individual: *individual, class: s });
                        }
                    }
                }
                // equivalent classes share members, both ways
                Fact::Equivalent(a, b) => {
                    for g in &snapshot {
                        if let Fact::Class { individual, class } = g {
                            if class == a {
                                new.push(Fact::Class { individual: *individual, class: *b });
                            }
                            if class == b {
                                new.push(Fact::Class { individual: *individual, class: *a });
                            }
                        }
                    }
                }
                _ => {}
            }
        }

        // transitive relations chain; temporal ones only within one instant
        for decl in kb.relations().filter(|r| r.transitive) {
            for f in &snapshot {
                let Fact::Relation { relation, subject: a, object: b, at: t1 } = f else {
                    continue;
                };
                if *relation != decl.id {
                    continue;
                }
                for g in &snapshot {
                    let Fact::Relation { relation: r2, subject: b2, object: c, at: t2 } = g
                    else {
                        continue;
                    };
                    if *r2 != decl.id || b2 != b {
                        continue;
                    }
                    if decl.temporal && t1 != t2 {
                        continue;
                    }
                    new.push(Fact::Relation {
                        relation: decl.id,
                        subject: *a,
                        object: *c,
                        at: *t1,
                    });
                }
            }
        }

        // defined classes: in-direction (realize) and out-direction (unfold)
        for decl in kb.classes() {
            let Some(def) = &decl.definition else { continue };
            let individuals: HashSet<TermId> = snapshot
                .iter()
                .filter_map(|f| match f {
                    Fact::Class { individual, .. } => Some(*individual),
                    _ => None,
                })
                .collect();
            for &x in &individuals {
                let has = |f: &Fact| facts.contains(f);
                let genus_ok = has(&Fact::Class { individual: x, class: def.genus });
                let conds_ok = def.differentia.iter().all(|cond| match cond.mode {
                    CondMode::Value => snapshot.iter().any(|f| {
                        matches!(f, Fact::Relation { relation, subject, object, .. }
                            if *relation == cond.relation && *subject == x && *object == cond.target)
                    }),
                    CondMode::Some => snapshot.iter().any(|f| {
                        matches!(f, Fact::Relation { relation, subject, object, .. }
                            if *relation == cond.relation && *subject == x
                                && has(&Fact::Class { individual: *object, class: cond.target }))
                    }),
                });
                if genus_ok && conds_ok {
                    new.push(Fact::Class { individual: x, class: decl.id });
                }
                if has(&Fact::Class { individual: x, class: decl.id }) {
                    new.push(Fact::Class { individual: x, class: def.genus });
                    for cond in &def.differentia {
                        if cond.mode == CondMode::Value
                            && !kb.relation_decl(cond.relation).map(|r| r.temporal).unwrap_or(true)
                        {
                            new.push(Fact::Relation {
                                relation: cond.relation,
                                subject: x,
                                object: cond.target,
                                at: None,
                            });
                        }
                    }
                }
            }
        }

        // same individuals: symmetric-transitive closure plus substitution
        let sames: Vec<(TermId, TermId)> = snapshot
            .iter()
            .filter_map(|f| match f {
                Fact::Same(a, b) => Some((*a, *b)),
                _ => None,
            })
            .collect();
        for &(a, b) in &sames {
            for &(c, d) in &sames {
                for (x, y) in [(a, b), (b, a)] {
                    for (u, v) in [(c, d), (d, c)] {
                        if y == u && x != v {
                            let (p, q) = kb.ordered_pair(x, v);
                            new.push(Fact::Same(p, q));
                        }
                    }
                }
            }
            for f in &snapshot {
                for (from, to) in [(a, b), (b, a)] {
                    match f {
                        Fact::Class { individual, class } if *individual == from => {
                            new.push(Fact::Class { individual: to, class: *class });
                        }
                        Fact::Relation { relation, subject, object, at }
                            if *subject == from || *object == from =>
                        {
                            new.push(Fact::Relation {
                                relation: *relation,
                                subject: if *subject == from { to } else { *subject },
                                object: if *object == from { to } else { *object },
                                at: *at,
                            });
                        }
                        Fact::Attribute { attribute, subject, value } if *subject == from => {
                            new.push(Fact::Attribute {
                                attribute: *attribute,
                                subject: to,
                                value: value.clone(),
                            });
                        }
                        _ => {}
                    }
                }
            }
        }

        if infer_domain_range {
            for f in &snapshot {
                let Fact::Relation { relation, subject, object, .. } = f else { continue };
                if let Some(decl) = kb.relation_decl(*relation) {
                    new.push(Fact::Class { individual: *subject, class: decl.domain });
                    new.push(Fact::Class { individual: *object, class: decl.range });
                }
            }
        }

        let before = facts.len();
        facts.extend(new);
        if facts.len() == before {
            return facts;
        }
    }
}

/// Total fact set (asserted ∪ inferred) produced by the engine.
pub fn engine_facts(kb: &KnowledgeBase, infer_domain_range: bool) -> HashSet<Fact> {
    let cfg = ssao::reasoner::ReasonerConfig {
        domain_range_mode: if infer_domain_range {
            ssao::reasoner::DomainRangeMode::Infer
        } else {
            ssao::reasoner::DomainRangeMode::Validate
        },
        ..Default::default()
    };
    let closure = ssao::reasoner::materialize(kb, &cfg).expect("materialize");
    kb.facts().iter().cloned().chain(closure.inferred_facts().iter().cloned()).collect()
}

/// Name-based rendering of a fact, for comparing fact sets across two
/// knowledge bases whose term ids differ.
pub fn fact_key(kb: &KnowledgeBase, f: &Fact) -> String {
    match f {
        Fact::Class { individual, class } => {
            format!("instance_of {} {}", kb.name(*individual), kb.name(*class))
        }
        Fact::Relation { relation, subject, object, at } => format!(
            "rel {} {} {} {}",
            kb.name(*relation),
            kb.name(*subject),
            kb.name(*object),
            at.map(|t| t.to_string()).unwrap_or_else(|| "-".to_string())
        ),
        Fact::Attribute { attribute, subject, value } => {
            format!("attr {} {} {:?}", kb.name(*attribute), kb.name(*subject), value)
        }
        Fact::Equivalent(a, b) => format!("equivalent {} {}", kb.name(*a), kb.name(*b)),
        Fact::Disjoint(a, b) => format!("disjoint {} {}", kb.name(*a), kb.name(*b)),
        Fact::Same(a, b) => format!("same {} {}", kb.name(*a), kb.name(*b)),
    }
}

/// `fact_key` over a whole set.
pub fn fact_keys<'a>(
    kb: &KnowledgeBase,
    facts: impl IntoIterator<Item = &'a Fact>,
) -> std::collections::BTreeSet<String> {
    facts.into_iter().map(|f| fact_key(kb, f)).collect()
}

const TIMES: [&str; 3] =
    ["2016-02-10T00:00:00Z", "2016-02-11T12:00:00Z", "2020-01-01T00:00:00Z"];

fn o() -> Origin {
    Origin::synthetic()
}

/// Random knowledge base within the documented bounds: at most 30 classes,
/// 20 relations, 50 individuals, 200 facts. Every generated statement is
/// well-formed; integrity violations (disjoint clashes etc.) may occur.
pub fn random_kb(seed: u64) -> KnowledgeBase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kb = KnowledgeBase::new();

    // plain classes; supers point only at earlier classes, so no cycles
    let n_classes = rng.gen_range(1..=26);
    let mut classes: Vec<TermId> = Vec::new();
    for i in 0..n_classes {
        let mut supers = Vec::new();
        if i > 0 && rng.gen_bool(0.6) {
            for _ in 0..rng.gen_range(1..=2usize.min(i)) {
                supers.push(classes[rng.gen_range(0..i)]);
            }
        }
        let id = kb.declare_class(&format!("C{i}"), &supers, None, o()).unwrap();
        classes.push(id);
    }

    let n_rels = rng.gen_range(0..=20);
    let mut relations: Vec<TermId> = Vec::new();
    for i in 0..n_rels {
        let id = kb
            .declare_relation(
                &format!("R{i}"),
                classes[rng.gen_range(0..classes.len())],
                classes[rng.gen_range(0..classes.len())],
                rng.gen_bool(0.3),
                rng.gen_bool(0.3),
                rng.gen_bool(0.2),
                o(),
            )
            .unwrap();
        relations.push(id);
    }

    let mut attributes: Vec<TermId> = Vec::new();
    for (i, vt) in [
        ssao::model::ValueType::Decimal,
        ssao::model::ValueType::Integer,
        ssao::model::ValueType::Text,
        ssao::model::ValueType::Timestamp,
        ssao::model::ValueType::Enum(vec!["Red".into(), "Green".into(), "Blue".into()]),
    ]
    .into_iter()
    .enumerate()
    {
        if rng.gen_bool(0.6) {
            let id = kb
                .declare_attribute(
                    &format!("A{i}"),
                    classes[rng.gen_range(0..classes.len())],
                    vt,
                    None,
                    o(),
                )
                .unwrap();
            attributes.push(id);
        }
    }

    let n_inds = rng.gen_range(1..=50);
    let mut individuals: Vec<TermId> = Vec::new();
    for i in 0..n_inds {
        let id = kb.declare_individual(&format!("x{i}"), o()).unwrap();
        individuals.push(id);
        // every individual gets at least one class, so serialization and
        // reloading are total
        let class = classes[rng.gen_range(0..classes.len())];
        kb.assert_fact(Fact::Class { individual: id, class }, o()).unwrap();
    }

    // a couple of defined classes over already-declared vocabulary
    if !relations.is_empty() {
        let defined = rng.gen_range(0..=2);
        for i in 0..defined {
            let genus = classes[rng.gen_range(0..classes.len())];
            let relation = relations[rng.gen_range(0..relations.len())];
            let (mode, target) = if rng.gen_bool(0.5) {
                (CondMode::Value, individuals[rng.gen_range(0..individuals.len())])
            } else {
                (CondMode::Some, classes[rng.gen_range(0..classes.len())])
            };
            let id = kb
                .declare_class(
                    &format!("D{i}"),
                    &[genus],
                    Some(DefinedClassExpr {
                        genus,
                        differentia: vec![RelationCondition { relation, mode, target }],
                    }),
                    o(),
                )
                .unwrap();
            classes.push(id);
        }
    }

    let n_facts = rng.gen_range(0..=150);
    for _ in 0..n_facts {
        let fact = match rng.gen_range(0..10) {
            0..=3 if !relations.is_empty() => {
                let rel = relations[rng.gen_range(0..relations.len())];
                let temporal = kb.relation_decl(rel).unwrap().temporal;
                Fact::Relation {
                    relation: rel,
                    subject: individuals[rng.gen_range(0..individuals.len())],
                    object: individuals[rng.gen_range(0..individuals.len())],
                    at: temporal
                        .then(|| TimeStamp::parse(TIMES[rng.gen_range(0..TIMES.len())]).unwrap()),
                }
            }
            4..=5 if !attributes.is_empty() => {
                let attr = attributes[rng.gen_range(0..attributes.len())];
                let value = match &kb.attribute_decl(attr).unwrap().valuetype {
                    ssao::model::ValueType::Decimal => {
                        AttrValue::Decimal(Decimal::new(rng.gen_range(-10_000..10_000) as f64 / 100.0))
                    }
                    ssao::model::ValueType::Integer => {
                        AttrValue::Integer(rng.gen_range(-1000..1000))
                    }
                    ssao::model::ValueType::Text => {
                        AttrValue::Text(format!("text {} \"quoted\"", rng.gen_range(0..100)))
                    }
                    ssao::model::ValueType::Timestamp => AttrValue::Timestamp(
                        TimeStamp::parse(TIMES[rng.gen_range(0..TIMES.len())]).unwrap(),
                    ),
                    ssao::model::ValueType::Enum(toks) => {
                        AttrValue::EnumToken(toks[rng.gen_range(0..toks.len())].clone())
                    }
                };
                Fact::Attribute {
                    attribute: attr,
                    subject: individuals[rng.gen_range(0..individuals.len())],
                    value,
                }
            }
            6 => Fact::Class {
                individual: individuals[rng.gen_range(0..individuals.len())],
                class: classes[rng.gen_range(0..classes.len())],
            },
            7 if individuals.len() > 1 && rng.gen_bool(0.3) => {
                let a = individuals[rng.gen_range(0..individuals.len())];
                let b = individuals[rng.gen_range(0..individuals.len())];
                if a == b {
                    continue;
                }
                let (a, b) = kb.ordered_pair(a, b);
                Fact::Same(a, b)
            }
            8 if classes.len() > 1 && rng.gen_bool(0.3) => {
                let a = classes[rng.gen_range(0..classes.len())];
                let b = classes[rng.gen_range(0..classes.len())];
                if a == b {
                    continue;
                }
                let (a, b) = kb.ordered_pair(a, b);
                if rng.gen_bool(0.5) {
                    Fact::Equivalent(a, b)
                } else {
                    Fact::Disjoint(a, b)
                }
            }
            _ => Fact::Class {
                individual: individuals[rng.gen_range(0..individuals.len())],
                class: classes[rng.gen_range(0..classes.len())],
            },
        };
        kb.assert_fact(fact, o()).unwrap();
    }
    kb
}

/// Rebuilds a knowledge base with its facts asserted in a shuffled order.
/// Declarations keep their order (they are order-insensitive by two-pass
/// loading anyway); fact permutation is what the invariance property is
/// about.
pub fn shuffle_facts(kb: &KnowledgeBase, seed: u64) -> KnowledgeBase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let text = ssao::dsl::serialize(kb);
    let mut decls = Vec::new();
    let mut facts = Vec::new();
    for line in text.lines() {
        if line.starts_with("fact ")
            || line.starts_with("same ")
            || line.starts_with("equivalent ")
            || line.starts_with("disjoint ")
        {
            facts.push(line.to_string());
        } else {
            decls.push(line.to_string());
        }
    }
    facts.shuffle(&mut rng);
    let doc = decls.into_iter().chain(facts).collect::<Vec<_>>().join("\n");
    let (kb2, diags) = ssao::dsl::load_documents(&[("shuffled.ssao".to_string(), doc)]);
    assert!(diags.is_empty(), "shuffled reload must parse cleanly: {diags:?}");
    kb2
}

/// A random valid TLE record; serializing it yields a canonical synthetic
/// pair. Field values are quantized to their column precision.
pub fn random_tle(rng: &mut impl Rng) -> TleRecord {
    let q = |v: f64, decimals: i32| {
        let f = 10f64.powi(decimals);
        (v * f).round() / f
    };
    let cospar = format!(
        "{:02}{:03}{}  ",
        rng.gen_range(0..100),
        rng.gen_range(1..999),
        (b'A' + rng.gen_range(0..26)) as char
    );
    TleRecord {
        norad_id: rng.gen_range(1..=99_999),
        classification: *b"UCS".choose(rng).unwrap() as char,
        cospar_id: cospar,
        epoch_year: rng.gen_range(1957..=2056),
        epoch_day: q(rng.gen_range(1.0..366.0), 8),
        mean_motion_dot: q(rng.gen_range(-0.5..0.5), 8),
        mean_motion_ddot: PackedDecimal::new(
            rng.gen_range(-99_999..=99_999),
            rng.gen_range(-9..=9),
        )
        .unwrap(),
        bstar: PackedDecimal::new(rng.gen_range(-99_999..=99_999), rng.gen_range(-9..=9))
            .unwrap(),
        ephemeris_type: '0',
        element_set_no: rng.gen_range(0..=9999),
        inclination_deg: q(rng.gen_range(0.0..=180.0), 4),
        raan_deg: q(rng.gen_range(0.0..360.0), 4).min(359.9999),
        eccentricity: rng.gen_range(0..10_000_000) as f64 / 1e7,
        arg_perigee_deg: q(rng.gen_range(0.0..360.0), 4).min(359.9999),
        mean_anomaly_deg: q(rng.gen_range(0.0..360.0), 4).min(359.9999),
        mean_motion_rev_per_day: q(rng.gen_range(0.5..17.0), 8),
        rev_number: rng.gen_range(0..=99_999),
    }
}
