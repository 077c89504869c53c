//! Parser, canonical serializer, and multi-file loader for the `.ssao`
//! ontology definition language.
//!
//! The language is line-oriented: one statement per non-blank, non-comment
//! line, `#` starts a comment to end of line. Statement forms:
//!
//! ```text
//! class NAME [is_a NAME (and NAME)*]
//! class NAME equiv NAME and REL value NAME (and REL value NAME)*
//! class NAME equiv NAME and REL some NAME (and REL some NAME)*
//! relation NAME domain NAME range NAME [temporal] [transitive] [antisymmetric]
//! attribute NAME domain NAME valuetype (decimal|integer|text|timestamp|enum(TOK,...)) [unit TOK]
//! individual NAME instance_of NAME (and NAME)*
//! fact REL(NAME, NAME) [at TIMESTAMP]
//! fact ATTR(NAME, VALUE)
//! equivalent NAME NAME
//! disjoint NAME NAME
//! same NAME NAME
//! doc NAME "free text"
//! ```
//!
//! A malformed line produces one diagnostic and never suppresses statements
//! from other lines. Loading is two-pass so file and statement order never
//! affect semantics: declarations first, then facts.

use std::fmt::Write as _;
use std::path::Path;

use crate::model::{
    AttrValue, CondMode, Decimal, DefinedClassExpr, Fact, KnowledgeBase, ModelError, Origin,
    RelationCondition, TermId, TermKind, TimeStamp, ValueType, is_valid_token,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// Per-line parse or load problem with a stable code.
#[derive(Debug, Clone)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub file: String,
    pub line: u32,
    pub code: &'static str,
    pub message: String,
}

impl std::fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {} [{}]: {}", self.file, self.line, sev, self.code, self.message)
    }
}

pub const E_UNKNOWN_KEYWORD: &str = "E_UNKNOWN_KEYWORD";
pub const E_BAD_TOKEN: &str = "E_BAD_TOKEN";
pub const E_ARITY: &str = "E_ARITY";
pub const E_BAD_TIMESTAMP: &str = "E_BAD_TIMESTAMP";
pub const E_BAD_VALUE: &str = "E_BAD_VALUE";
pub const E_UNRESOLVED: &str = "E_UNRESOLVED";
pub const E_MODEL: &str = "E_MODEL";

/// Second argument of a `fact` line before the predicate kind is known.
#[derive(Debug, Clone, PartialEq)]
pub enum RawValue {
    Int(i64),
    Float(f64),
    Text(String),
    Timestamp(TimeStamp),
    Token(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtAst {
    Class { name: String, supers: Vec<String> },
    DefinedClass { name: String, genus: String, differentia: Vec<(String, CondMode, String)> },
    Relation {
        name: String,
        domain: String,
        range: String,
        temporal: bool,
        transitive: bool,
        antisymmetric: bool,
    },
    Attribute { name: String, domain: String, valuetype: RawValueType, unit: Option<String> },
    Individual { name: String, classes: Vec<String> },
    FactStmt { pred: String, subject: String, arg: RawValue, at: Option<TimeStamp> },
    Equivalent(String, String),
    Disjoint(String, String),
    Same(String, String),
    Doc { name: String, text: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum RawValueType {
    Decimal,
    Integer,
    Text,
    Timestamp,
    Enum(Vec<String>),
}

/// One parsed statement with its source location.
#[derive(Debug, Clone)]
pub struct Statement {
    pub ast: StmtAst,
    pub file: String,
    pub line: u32,
}

impl Statement {
    pub fn origin(&self) -> Origin {
        Origin::new(self.file.clone(), self.line)
    }
}

// ---------------------------------------------------------------------------
// lexer

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Str(String),
    LParen,
    RParen,
    Comma,
}

fn lex_line(line: &str) -> Result<Vec<Tok>, (&'static str, String)> {
    let mut toks = Vec::new();
    let mut chars = line.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' => {
                chars.next();
            }
            '#' => break,
            '(' => {
                chars.next();
                toks.push(Tok::LParen);
            }
            ')' => {
                chars.next();
                toks.push(Tok::RParen);
            }
            ',' => {
                chars.next();
                toks.push(Tok::Comma);
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                let mut closed = false;
                while let Some(c) = chars.next() {
                    match c {
                        '"' => {
                            closed = true;
                            break;
                        }
                        '\\' => match chars.next() {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            other => {
                                return Err((
                                    E_BAD_VALUE,
                                    format!("bad escape `\\{}`", other.unwrap_or(' ')),
                                ))
                            }
                        },
                        c => s.push(c),
                    }
                }
                if !closed {
                    return Err((E_BAD_VALUE, "unterminated string".to_string()));
                }
                toks.push(Tok::Str(s));
            }
            _ => {
                let mut w = String::new();
                while let Some(&c) = chars.peek() {
                    if c == ' ' || c == '\t' || c == '(' || c == ')' || c == ',' || c == '#' {
                        break;
                    }
                    w.push(c);
                    chars.next();
                }
                toks.push(Tok::Word(w));
            }
        }
    }
    Ok(toks)
}

// ---------------------------------------------------------------------------
// per-line parser

struct LineParser {
    toks: Vec<Tok>,
    pos: usize,
}

type ParseResult<T> = Result<T, (&'static str, String)>;

impl LineParser {
    fn new(toks: Vec<Tok>) -> Self {
        LineParser { toks, pos: 0 }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn expect_end(&self) -> ParseResult<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err((E_ARITY, "unexpected trailing tokens".to_string()))
        }
    }

    fn word(&mut self, what: &str) -> ParseResult<String> {
        match self.next() {
            Some(Tok::Word(w)) => Ok(w),
            _ => Err((E_ARITY, format!("expected {what}"))),
        }
    }

    fn name(&mut self, what: &str) -> ParseResult<String> {
        let w = self.word(what)?;
        if !is_valid_token(&w) {
            return Err((E_BAD_TOKEN, format!("`{w}` is not a valid token")));
        }
        Ok(w)
    }

    fn keyword(&mut self, kw: &str) -> ParseResult<()> {
        match self.next() {
            Some(Tok::Word(w)) if w == kw => Ok(()),
            _ => Err((E_ARITY, format!("expected `{kw}`"))),
        }
    }

    fn punct(&mut self, tok: Tok, show: &str) -> ParseResult<()> {
        match self.next() {
            Some(t) if t == tok => Ok(()),
            _ => Err((E_ARITY, format!("expected `{show}`"))),
        }
    }

    fn peek_word(&self) -> Option<&str> {
        match self.peek() {
            Some(Tok::Word(w)) => Some(w.as_str()),
            _ => None,
        }
    }
}

fn looks_like_timestamp(w: &str) -> bool {
    w.len() == 20 && w.ends_with('Z') && w.as_bytes().get(4) == Some(&b'-')
}

fn parse_value(tok: Tok) -> ParseResult<RawValue> {
    match tok {
        Tok::Str(s) => Ok(RawValue::Text(s)),
        Tok::Word(w) => {
            if is_valid_token(&w) {
                return Ok(RawValue::Token(w));
            }
            if looks_like_timestamp(&w) {
                return match TimeStamp::parse(&w) {
                    Some(ts) => Ok(RawValue::Timestamp(ts)),
                    None => Err((E_BAD_TIMESTAMP, format!("`{w}` is not a valid timestamp"))),
                };
            }
            if let Ok(i) = w.parse::<i64>() {
                return Ok(RawValue::Int(i));
            }
            if let Ok(f) = w.parse::<f64>() {
                if f.is_finite() {
                    return Ok(RawValue::Float(f));
                }
            }
            Err((E_BAD_VALUE, format!("`{w}` is not a valid value")))
        }
        _ => Err((E_BAD_VALUE, "expected a value".to_string())),
    }
}

fn parse_statement_line(toks: Vec<Tok>) -> ParseResult<StmtAst> {
    let mut p = LineParser::new(toks);
    let kw = match p.next() {
        Some(Tok::Word(w)) => w,
        _ => return Err((E_UNKNOWN_KEYWORD, "expected a statement keyword".to_string())),
    };
    match kw.as_str() {
        "class" => {
            let name = p.name("class name")?;
            match p.peek_word() {
                None => {
                    p.expect_end()?;
                    Ok(StmtAst::Class { name, supers: Vec::new() })
                }
                Some("is_a") => {
                    p.next();
                    let mut supers = vec![p.name("superclass name")?];
                    while !p.at_end() {
                        p.keyword("and")?;
                        supers.push(p.name("superclass name")?);
                    }
                    Ok(StmtAst::Class { name, supers })
                }
                Some("equiv") => {
                    p.next();
                    let genus = p.name("genus class name")?;
                    let mut differentia = Vec::new();
                    p.keyword("and")?;
                    loop {
                        let rel = p.name("relation name")?;
                        let mode = match p.word("`value` or `some`")?.as_str() {
                            "value" => CondMode::Value,
                            "some" => CondMode::Some,
                            other => {
                                return Err((E_ARITY, format!("expected `value` or `some`, got `{other}`")))
                            }
                        };
                        let target = p.name("target name")?;
                        differentia.push((rel, mode, target));
                        if p.at_end() {
                            break;
                        }
                        p.keyword("and")?;
                    }
                    Ok(StmtAst::DefinedClass { name, genus, differentia })
                }
                Some(other) => Err((E_ARITY, format!("expected `is_a` or `equiv`, got `{other}`"))),
            }
        }
        "relation" => {
            let name = p.name("relation name")?;
            p.keyword("domain")?;
            let domain = p.name("domain class")?;
            p.keyword("range")?;
            let range = p.name("range class")?;
            let (mut temporal, mut transitive, mut antisymmetric) = (false, false, false);
            while !p.at_end() {
                match p.word("relation flag")?.as_str() {
                    "temporal" => temporal = true,
                    "transitive" => transitive = true,
                    "antisymmetric" => antisymmetric = true,
                    other => return Err((E_ARITY, format!("unknown relation flag `{other}`"))),
                }
            }
            Ok(StmtAst::Relation { name, domain, range, temporal, transitive, antisymmetric })
        }
        "attribute" => {
            let name = p.name("attribute name")?;
            p.keyword("domain")?;
            let domain = p.name("domain class")?;
            p.keyword("valuetype")?;
            let vt = match p.word("value type")?.as_str() {
                "decimal" => RawValueType::Decimal,
                "integer" => RawValueType::Integer,
                "text" => RawValueType::Text,
                "timestamp" => RawValueType::Timestamp,
                "enum" => {
                    p.punct(Tok::LParen, "(")?;
                    let mut toks = vec![p.name("enum token")?];
                    loop {
                        match p.next() {
                            Some(Tok::RParen) => break,
                            Some(Tok::Comma) => toks.push(p.name("enum token")?),
                            _ => return Err((E_ARITY, "expected `,` or `)` in enum list".to_string())),
                        }
                    }
                    RawValueType::Enum(toks)
                }
                other => return Err((E_BAD_VALUE, format!("unknown value type `{other}`"))),
            };
            let unit = if p.at_end() {
                None
            } else {
                p.keyword("unit")?;
                Some(p.name("unit token")?)
            };
            p.expect_end()?;
            Ok(StmtAst::Attribute { name, domain, valuetype: vt, unit })
        }
        "individual" => {
            let name = p.name("individual name")?;
            p.keyword("instance_of")?;
            let mut classes = vec![p.name("class name")?];
            while !p.at_end() {
                p.keyword("and")?;
                classes.push(p.name("class name")?);
            }
            Ok(StmtAst::Individual { name, classes })
        }
        "fact" => {
            let pred = p.name("predicate name")?;
            p.punct(Tok::LParen, "(")?;
            let subject = p.name("subject name")?;
            p.punct(Tok::Comma, ",")?;
            let arg = match p.next() {
                Some(t) => parse_value(t)?,
                None => return Err((E_ARITY, "expected a second argument".to_string())),
            };
            p.punct(Tok::RParen, ")")?;
            let at = if p.at_end() {
                None
            } else {
                p.keyword("at")?;
                let w = p.word("timestamp")?;
                match TimeStamp::parse(&w) {
                    Some(ts) => Some(ts),
                    None => {
                        return Err((E_BAD_TIMESTAMP, format!("`{w}` is not a valid timestamp")))
                    }
                }
            };
            p.expect_end()?;
            Ok(StmtAst::FactStmt { pred, subject, arg, at })
        }
        "equivalent" | "disjoint" | "same" => {
            let a = p.name("first name")?;
            let b = p.name("second name")?;
            p.expect_end()?;
            Ok(match kw.as_str() {
                "equivalent" => StmtAst::Equivalent(a, b),
                "disjoint" => StmtAst::Disjoint(a, b),
                _ => StmtAst::Same(a, b),
            })
        }
        "doc" => {
            let name = p.name("term name")?;
            let text = match p.next() {
                Some(Tok::Str(s)) => s,
                _ => return Err((E_BAD_VALUE, "expected a quoted string".to_string())),
            };
            p.expect_end()?;
            Ok(StmtAst::Doc { name, text })
        }
        other => Err((E_UNKNOWN_KEYWORD, format!("unknown statement keyword `{other}`"))),
    }
}

/// Parses one document. Every non-blank, non-comment line yields exactly one
/// statement or one error diagnostic; parsing always continues.
pub fn parse_document(path: &str, text: &str) -> (Vec<Statement>, Vec<ParseDiagnostic>) {
    let mut statements = Vec::new();
    let mut diagnostics = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = (i + 1) as u32;
        let toks = match lex_line(raw) {
            Ok(t) => t,
            Err((code, message)) => {
                diagnostics.push(ParseDiagnostic {
                    severity: Severity::Error,
                    file: path.to_string(),
                    line: line_no,
                    code,
                    message,
                });
                continue;
            }
        };
        if toks.is_empty() {
            continue; // blank or comment-only line
        }
        match parse_statement_line(toks) {
            Ok(ast) => statements.push(Statement { ast, file: path.to_string(), line: line_no }),
            Err((code, message)) => diagnostics.push(ParseDiagnostic {
                severity: Severity::Error,
                file: path.to_string(),
                line: line_no,
                code,
                message,
            }),
        }
    }
    (statements, diagnostics)
}

// ---------------------------------------------------------------------------
// statement application (two-pass)

fn model_diag(stmt: &Statement, err: &ModelError) -> ParseDiagnostic {
    let code = match err {
        ModelError::UnknownTerm(_) => E_UNRESOLVED,
        ModelError::BadToken(_) => E_BAD_TOKEN,
        _ => E_MODEL,
    };
    ParseDiagnostic {
        severity: Severity::Error,
        file: stmt.file.clone(),
        line: stmt.line,
        code,
        message: err.to_string(),
    }
}

fn resolve(kb: &KnowledgeBase, name: &str) -> Result<TermId, ModelError> {
    kb.get(name).ok_or_else(|| ModelError::UnknownTerm(name.to_string()))
}

fn resolve_kind(kb: &KnowledgeBase, name: &str, kind: TermKind) -> Result<TermId, ModelError> {
    let id = resolve(kb, name)?;
    if kb.kind(id) != kind {
        return Err(ModelError::WrongKind { name: name.to_string(), kind: kb.kind(id), expected: kind });
    }
    Ok(id)
}

fn coerce_value(
    kb: &KnowledgeBase,
    attribute: TermId,
    raw: &RawValue,
) -> Result<AttrValue, ModelError> {
    let decl = kb
        .attribute_decl(attribute)
        .ok_or_else(|| ModelError::UnknownTerm(kb.name(attribute).to_string()))?;
    let mismatch = |expected: &str| ModelError::ValueTypeMismatch {
        attribute: kb.name(attribute).to_string(),
        expected: expected.to_string(),
    };
    match (&decl.valuetype, raw) {
        (ValueType::Decimal, RawValue::Int(i)) => Ok(AttrValue::Decimal(Decimal::new(*i as f64))),
        (ValueType::Decimal, RawValue::Float(f)) => Ok(AttrValue::Decimal(Decimal::new(*f))),
        (ValueType::Decimal, _) => Err(mismatch("decimal")),
        (ValueType::Integer, RawValue::Int(i)) => Ok(AttrValue::Integer(*i)),
        (ValueType::Integer, _) => Err(mismatch("integer")),
        (ValueType::Text, RawValue::Text(s)) => Ok(AttrValue::Text(s.clone())),
        (ValueType::Text, _) => Err(mismatch("text")),
        (ValueType::Timestamp, RawValue::Timestamp(ts)) => Ok(AttrValue::Timestamp(*ts)),
        (ValueType::Timestamp, _) => Err(mismatch("timestamp")),
        (ValueType::Enum(_), RawValue::Token(t)) => Ok(AttrValue::EnumToken(t.clone())),
        (ValueType::Enum(_), _) => Err(mismatch("enum token")),
    }
}

fn apply_fact_stmt(kb: &mut KnowledgeBase, stmt: &Statement) -> Result<(), ModelError> {
    let (pred, subject, arg, at) = match &stmt.ast {
        StmtAst::FactStmt { pred, subject, arg, at } => (pred, subject, arg, at),
        _ => unreachable!(),
    };
    let pred_id = resolve(kb, pred)?;
    let subj = resolve_kind(kb, subject, TermKind::Individual)?;
    match kb.kind(pred_id) {
        TermKind::Relation => {
            let obj_name = match arg {
                RawValue::Token(t) => t,
                _ => return Err(ModelError::BadRelationObject { relation: pred.clone() }),
            };
            let obj = resolve_kind(kb, obj_name, TermKind::Individual)?;
            kb.assert_fact(
                Fact::Relation { relation: pred_id, subject: subj, object: obj, at: *at },
                stmt.origin(),
            )?;
            Ok(())
        }
        TermKind::Attribute => {
            if at.is_some() {
                return Err(ModelError::TemporalityMismatch {
                    relation: pred.clone(),
                    details: "is an attribute; `at` applies only to temporal relations".to_string(),
                });
            }
            let value = coerce_value(kb, pred_id, arg)?;
            kb.assert_fact(
                Fact::Attribute { attribute: pred_id, subject: subj, value },
                stmt.origin(),
            )?;
            Ok(())
        }
        kind => Err(ModelError::WrongKind {
            name: pred.clone(),
            kind,
            expected: TermKind::Relation,
        }),
    }
}

/// Applies parsed statements to a knowledge base in declaration-then-fact
/// order, so cross-file references resolve regardless of statement order.
pub fn apply_statements(kb: &mut KnowledgeBase, statements: &[Statement]) -> Vec<ParseDiagnostic> {
    let mut diagnostics = Vec::new();
    let diag = |stmt: &Statement, err: ModelError, out: &mut Vec<ParseDiagnostic>| {
        out.push(model_diag(stmt, &err));
    };

    // pass 1: intern every declared name so forward references resolve
    for stmt in statements {
        let res = match &stmt.ast {
            StmtAst::Class { name, .. } | StmtAst::DefinedClass { name, .. } => {
                kb.intern(name, TermKind::Class)
            }
            StmtAst::Relation { name, .. } => kb.intern(name, TermKind::Relation),
            StmtAst::Attribute { name, .. } => kb.intern(name, TermKind::Attribute),
            StmtAst::Individual { name, .. } => kb.intern(name, TermKind::Individual),
            _ => continue,
        };
        if let Err(e) = res {
            diag(stmt, e, &mut diagnostics);
        }
    }

    // pass 2a: class declarations
    for stmt in statements {
        let res = match &stmt.ast {
            StmtAst::Class { name, supers } => supers
                .iter()
                .map(|s| resolve_kind(kb, s, TermKind::Class))
                .collect::<Result<Vec<_>, _>>()
                .and_then(|ids| kb.declare_class(name, &ids, None, stmt.origin()).map(|_| ())),
            StmtAst::DefinedClass { name, genus, differentia } => (|| {
                let genus_id = resolve_kind(kb, genus, TermKind::Class)?;
                let mut conds = Vec::new();
                for (rel, mode, target) in differentia {
                    let rel_id = resolve_kind(kb, rel, TermKind::Relation)?;
                    let target_id = resolve(kb, target)?;
                    conds.push(RelationCondition { relation: rel_id, mode: *mode, target: target_id });
                }
                let def = DefinedClassExpr { genus: genus_id, differentia: conds };
                kb.declare_class(name, &[genus_id], Some(def), stmt.origin())?;
                Ok(())
            })(),
            _ => continue,
        };
        if let Err(e) = res {
            diag(stmt, e, &mut diagnostics);
        }
    }

    // pass 2b: relation and attribute declarations (domains resolve against
    // the now-declared classes)
    for stmt in statements {
        let res = match &stmt.ast {
            StmtAst::Relation { name, domain, range, temporal, transitive, antisymmetric } => {
                (|| {
                    let d = resolve_kind(kb, domain, TermKind::Class)?;
                    let r = resolve_kind(kb, range, TermKind::Class)?;
                    kb.declare_relation(name, d, r, *temporal, *transitive, *antisymmetric, stmt.origin())?;
                    Ok(())
                })()
            }
            StmtAst::Attribute { name, domain, valuetype, unit } => (|| {
                let d = resolve_kind(kb, domain, TermKind::Class)?;
                let vt = match valuetype {
                    RawValueType::Decimal => ValueType::Decimal,
                    RawValueType::Integer => ValueType::Integer,
                    RawValueType::Text => ValueType::Text,
                    RawValueType::Timestamp => ValueType::Timestamp,
                    RawValueType::Enum(toks) => ValueType::Enum(toks.clone()),
                };
                kb.declare_attribute(name, d, vt, unit.clone(), stmt.origin())?;
                Ok(())
            })(),
            StmtAst::Individual { name, .. } => {
                kb.declare_individual(name, stmt.origin()).map(|_| ())
            }
            _ => continue,
        };
        if let Err(e) = res {
            diag(stmt, e, &mut diagnostics);
        }
    }

    // pass 3: facts and docs
    for stmt in statements {
        let res = match &stmt.ast {
            StmtAst::Individual { name, classes } => (|| {
                let ind = resolve_kind(kb, name, TermKind::Individual)?;
                for c in classes {
                    let class = resolve_kind(kb, c, TermKind::Class)?;
                    kb.assert_fact(Fact::Class { individual: ind, class }, stmt.origin())?;
                }
                Ok(())
            })(),
            StmtAst::FactStmt { .. } => apply_fact_stmt(kb, stmt),
            StmtAst::Equivalent(a, b) => (|| {
                let a = resolve_kind(kb, a, TermKind::Class)?;
                let b = resolve_kind(kb, b, TermKind::Class)?;
                kb.assert_fact(Fact::Equivalent(a, b), stmt.origin())?;
                Ok(())
            })(),
            StmtAst::Disjoint(a, b) => (|| {
                let a = resolve_kind(kb, a, TermKind::Class)?;
                let b = resolve_kind(kb, b, TermKind::Class)?;
                kb.assert_fact(Fact::Disjoint(a, b), stmt.origin())?;
                Ok(())
            })(),
            StmtAst::Same(a, b) => (|| {
                let a = resolve_kind(kb, a, TermKind::Individual)?;
                let b = resolve_kind(kb, b, TermKind::Individual)?;
                kb.assert_fact(Fact::Same(a, b), stmt.origin())?;
                Ok(())
            })(),
            StmtAst::Doc { name, text } => {
                resolve(kb, name).and_then(|id| kb.set_doc(id, text))
            }
            _ => continue,
        };
        if let Err(e) = res {
            diag(stmt, e, &mut diagnostics);
        }
    }

    diagnostics
}

/// Loads documents given as (path, text) pairs into one knowledge base.
pub fn load_documents(docs: &[(String, String)]) -> (KnowledgeBase, Vec<ParseDiagnostic>) {
    let mut statements = Vec::new();
    let mut diagnostics = Vec::new();
    for (path, text) in docs {
        let (mut stmts, mut diags) = {
            let (s, d) = parse_document(path, text);
            (s, d)
        };
        statements.append(&mut stmts);
        diagnostics.append(&mut diags);
    }
    let mut kb = KnowledgeBase::new();
    diagnostics.extend(apply_statements(&mut kb, &statements));
    (kb, diagnostics)
}

/// Reads and loads `.ssao` files in order.
pub fn load_files<P: AsRef<Path>>(
    paths: &[P],
) -> std::io::Result<(KnowledgeBase, Vec<ParseDiagnostic>)> {
    let mut docs = Vec::new();
    for p in paths {
        let text = std::fs::read_to_string(p)?;
        docs.push((p.as_ref().display().to_string(), text));
    }
    Ok(load_documents(&docs))
}

// ---------------------------------------------------------------------------
// canonical serializer

pub fn quote_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn render_attr_value(v: &AttrValue) -> String {
    match v {
        AttrValue::Decimal(d) => d.to_string(),
        AttrValue::Integer(i) => i.to_string(),
        AttrValue::Text(s) => quote_string(s),
        AttrValue::Timestamp(ts) => ts.to_string(),
        AttrValue::EnumToken(t) => t.clone(),
    }
}

/// Renders a non-class fact as one canonical DSL line. Class assertions are
/// rendered inside `individual` lines instead.
pub fn render_fact(kb: &KnowledgeBase, fact: &Fact) -> Option<String> {
    match fact {
        Fact::Class { .. } => None,
        Fact::Relation { relation, subject, object, at } => {
            let mut line = format!(
                "fact {}({}, {})",
                kb.name(*relation),
                kb.name(*subject),
                kb.name(*object)
            );
            if let Some(ts) = at {
                let _ = write!(line, " at {ts}");
            }
            Some(line)
        }
        Fact::Attribute { attribute, subject, value } => Some(format!(
            "fact {}({}, {})",
            kb.name(*attribute),
            kb.name(*subject),
            render_attr_value(value)
        )),
        Fact::Equivalent(a, b) => Some(format!("equivalent {} {}", kb.name(*a), kb.name(*b))),
        Fact::Disjoint(a, b) => Some(format!("disjoint {} {}", kb.name(*a), kb.name(*b))),
        Fact::Same(a, b) => Some(format!("same {} {}", kb.name(*a), kb.name(*b))),
    }
}

pub fn render_individual(kb: &KnowledgeBase, ind: TermId, classes: &[TermId]) -> String {
    let mut names: Vec<&str> = classes.iter().map(|&c| kb.name(c)).collect();
    names.sort_unstable();
    names.dedup();
    format!("individual {} instance_of {}", kb.name(ind), names.join(" and "))
}

/// Canonical serialization: blocks in the order classes, relations,
/// attributes, individuals, docs, facts; each block sorted by name. Parsing
/// the output reproduces an equal knowledge base, and serializing again is a
/// byte-exact fixpoint.
pub fn serialize(kb: &KnowledgeBase) -> String {
    let mut out = String::new();

    let mut classes: Vec<_> = kb.classes().collect();
    classes.sort_by_key(|c| kb.name(c.id));
    for decl in classes {
        let name = kb.name(decl.id);
        match &decl.definition {
            Some(def) => {
                let mut conds: Vec<String> = def
                    .differentia
                    .iter()
                    .map(|c| {
                        let mode = match c.mode {
                            CondMode::Value => "value",
                            CondMode::Some => "some",
                        };
                        format!("{} {} {}", kb.name(c.relation), mode, kb.name(c.target))
                    })
                    .collect();
                conds.sort_unstable();
                let _ = writeln!(
                    out,
                    "class {} equiv {} and {}",
                    name,
                    kb.name(def.genus),
                    conds.join(" and ")
                );
            }
            None if decl.supers.is_empty() => {
                let _ = writeln!(out, "class {name}");
            }
            None => {
                let mut supers: Vec<&str> = decl.supers.iter().map(|&s| kb.name(s)).collect();
                supers.sort_unstable();
                let _ = writeln!(out, "class {} is_a {}", name, supers.join(" and "));
            }
        }
    }

    let mut relations: Vec<_> = kb.relations().collect();
    relations.sort_by_key(|r| kb.name(r.id));
    for decl in relations {
        let mut line = format!(
            "relation {} domain {} range {}",
            kb.name(decl.id),
            kb.name(decl.domain),
            kb.name(decl.range)
        );
        if decl.temporal {
            line.push_str(" temporal");
        }
        if decl.transitive {
            line.push_str(" transitive");
        }
        if decl.antisymmetric {
            line.push_str(" antisymmetric");
        }
        let _ = writeln!(out, "{line}");
    }

    let mut attributes: Vec<_> = kb.attributes().collect();
    attributes.sort_by_key(|a| kb.name(a.id));
    for decl in attributes {
        let vt = match &decl.valuetype {
            ValueType::Decimal => "decimal".to_string(),
            ValueType::Integer => "integer".to_string(),
            ValueType::Text => "text".to_string(),
            ValueType::Timestamp => "timestamp".to_string(),
            ValueType::Enum(toks) => format!("enum({})", toks.join(",")),
        };
        let mut line = format!(
            "attribute {} domain {} valuetype {}",
            kb.name(decl.id),
            kb.name(decl.domain),
            vt
        );
        if let Some(unit) = &decl.unit {
            let _ = write!(line, " unit {unit}");
        }
        let _ = writeln!(out, "{line}");
    }

    let mut individuals: Vec<TermId> = kb.individuals().collect();
    individuals.sort_by_key(|&i| kb.name(i));
    for ind in individuals {
        let classes = kb.asserted_classes_of(ind);
        if classes.is_empty() {
            continue; // not expressible; DSL-loaded individuals always have a class
        }
        let _ = writeln!(out, "{}", render_individual(kb, ind, &classes));
    }

    let mut doc_lines: Vec<String> = Vec::new();
    let mut ids: Vec<TermId> = kb
        .classes()
        .map(|c| c.id)
        .chain(kb.relations().map(|r| r.id))
        .chain(kb.attributes().map(|a| a.id))
        .chain(kb.individuals())
        .collect();
    ids.sort_by_key(|&i| kb.name(i));
    for id in ids {
        if let Some(text) = kb.doc(id) {
            doc_lines.push(format!("doc {} {}", kb.name(id), quote_string(text)));
        }
    }
    doc_lines.sort_unstable();
    for l in doc_lines {
        let _ = writeln!(out, "{l}");
    }

    let mut fact_lines: Vec<String> = kb.facts().iter().filter_map(|f| render_fact(kb, f)).collect();
    fact_lines.sort_unstable();
    fact_lines.dedup();
    for l in fact_lines {
        let _ = writeln!(out, "{l}");
    }

    out
}
