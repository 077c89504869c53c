//! Catalog ingestion and identity reconciliation.
//!
//! `ingest_tle_text` turns a TLE catalog into annotated knowledge-base
//! individuals: a satellite per catalog number, a TLE individual per element
//! set linked to the satellite through `describes_orbit_of`, and (optionally)
//! an orbit individual per element set carrying the orbital-element
//! attributes plus a regime class (LEO/MEO/GEO/HEO) chosen by configurable
//! thresholds.
//!
//! `reconcile` links externally named individuals to already-ingested ones by
//! catalog keys (NORAD number first, COSPAR designator second), asserting
//! same-individual facts for matches and reporting — never merging —
//! attribute conflicts.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::dsl::{render_fact, render_individual};
use crate::model::{
    AttrValue, Decimal, Fact, KnowledgeBase, ModelError, Origin, TermId, TermKind, TimeStamp,
    ValueType, is_valid_token,
};
use crate::tle::{DerivedElements, TleRecord, derive_orbit, parse_tle_file};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("seed ontology term `{0}` is not declared")]
    UnknownSeedTerm(String),
    #[error("generated name `{0}` is not a valid token")]
    BadGeneratedName(String),
    #[error("key {key}={value} matches two distinct individuals {a} and {b}")]
    AmbiguousKey { key: &'static str, value: String, a: String, b: String },
    #[error("row {row}: {message}")]
    BadRow { row: usize, message: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Templates producing individual names from record fields. `{norad_id}` and
/// `{element_set_no}` are substituted.
#[derive(Debug, Clone)]
pub struct NamingScheme {
    pub satellite: String,
    pub orbit: String,
    pub tle: String,
}

impl Default for NamingScheme {
    fn default() -> Self {
        NamingScheme {
            satellite: "SAT-{norad_id}".to_string(),
            orbit: "ORBIT-{norad_id}-{element_set_no}".to_string(),
            tle: "TLE-{norad_id}-{element_set_no}".to_string(),
        }
    }
}

impl NamingScheme {
    fn expand(template: &str, rec: &TleRecord) -> String {
        template
            .replace("{norad_id}", &rec.norad_id.to_string())
            .replace("{element_set_no}", &rec.element_set_no.to_string())
    }
}

/// Orbit regime boundaries. Defaults: LEO up to a 128-minute period; GEO
/// within 0.99–1.01 rev/day, eccentricity at most 0.01, inclination at most
/// 10°; HEO above eccentricity 0.25; MEO otherwise.
#[derive(Debug, Clone)]
pub struct RegimeThresholds {
    pub leo_max_period_min: f64,
    pub geo_band_rev_per_day: (f64, f64),
    pub geo_max_ecc: f64,
    pub geo_max_inc_deg: f64,
    pub heo_min_ecc: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        RegimeThresholds {
            leo_max_period_min: 128.0,
            geo_band_rev_per_day: (0.99, 1.01),
            geo_max_ecc: 0.01,
            geo_max_inc_deg: 10.0,
            heo_min_ecc: 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Leo,
    Meo,
    Geo,
    Heo,
}

impl Regime {
    pub fn class_name(self) -> &'static str {
        match self {
            Regime::Leo => "LEO_Orbit",
            Regime::Meo => "MEO_Orbit",
            Regime::Geo => "GEO_Orbit",
            Regime::Heo => "HEO_Orbit",
        }
    }
}

/// Precedence is fixed: GEO, then LEO, then HEO, then MEO. Total and
/// single-valued over valid records.
pub fn classify_regime(d: &DerivedElements, rec: &TleRecord, th: &RegimeThresholds) -> Regime {
    let n = rec.mean_motion_rev_per_day;
    if n >= th.geo_band_rev_per_day.0
        && n <= th.geo_band_rev_per_day.1
        && rec.eccentricity <= th.geo_max_ecc
        && rec.inclination_deg <= th.geo_max_inc_deg
    {
        Regime::Geo
    } else if d.period_min <= th.leo_max_period_min {
        Regime::Leo
    } else if rec.eccentricity > th.heo_min_ecc {
        Regime::Heo
    } else {
        Regime::Meo
    }
}

#[derive(Debug, Clone)]
pub struct IngestConfig {
    /// class asserted on satellite individuals; defaults to the seed
    /// `Artificial_Satellite` when unset
    pub satellite_class: Option<TermId>,
    pub create_orbit_individuals: bool,
    /// when set, `is_tracked_by(SAT-n, sensor)` is asserted at each epoch
    pub tracked_by_sensor: Option<TermId>,
    pub naming: NamingScheme,
    pub thresholds: RegimeThresholds,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            satellite_class: None,
            create_orbit_individuals: true,
            tracked_by_sensor: None,
            naming: NamingScheme::default(),
            thresholds: RegimeThresholds::default(),
        }
    }
}

/// Outcome of an ingest run. `Display` renders the line-oriented report with
/// a stable field order.
#[derive(Debug, Default)]
pub struct IngestReport {
    pub records_read: usize,
    pub parsed: usize,
    pub skipped: usize,
    pub facts_added: usize,
    pub diagnostics: Vec<String>,
    /// generated statements in `.ssao` syntax, one per line, in assert order
    pub generated: Vec<String>,
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "records_read: {}", self.records_read)?;
        writeln!(f, "parsed: {}", self.parsed)?;
        writeln!(f, "skipped: {}", self.skipped)?;
        writeln!(f, "facts_added: {}", self.facts_added)?;
        for d in &self.diagnostics {
            writeln!(f, "diagnostic: {d}")?;
        }
        Ok(())
    }
}

// seed ontology terms the ingester asserts against
struct SeedTerms {
    artificial_satellite: TermId,
    tle_class: TermId,
    orbit_class: TermId,
    describes_orbit_of: TermId,
    has_orbit: TermId,
    is_tracked_by: TermId,
    has_orbital_inclination: TermId,
    has_orbital_eccentricity: TermId,
    has_raan: TermId,
    has_arg_perigee: TermId,
    has_mean_motion: TermId,
    has_orbital_period: TermId,
    norad_id: TermId,
    cospar_id: TermId,
    regimes: HashMap<&'static str, TermId>,
}

fn require(kb: &KnowledgeBase, name: &str, kind: TermKind) -> Result<TermId, CatalogError> {
    match kb.get(name) {
        Some(id) if kb.kind(id) == kind => Ok(id),
        _ => Err(CatalogError::UnknownSeedTerm(name.to_string())),
    }
}

impl SeedTerms {
    fn resolve(kb: &KnowledgeBase) -> Result<SeedTerms, CatalogError> {
        let mut regimes = HashMap::new();
        for r in [Regime::Leo, Regime::Meo, Regime::Geo, Regime::Heo] {
            regimes.insert(r.class_name(), require(kb, r.class_name(), TermKind::Class)?);
        }
        Ok(SeedTerms {
            artificial_satellite: require(kb, "Artificial_Satellite", TermKind::Class)?,
            tle_class: require(kb, "Two-Line_Element_Set", TermKind::Class)?,
            orbit_class: require(kb, "Orbit", TermKind::Class)?,
            describes_orbit_of: require(kb, "describes_orbit_of", TermKind::Relation)?,
            has_orbit: require(kb, "has_orbit", TermKind::Relation)?,
            is_tracked_by: require(kb, "is_tracked_by", TermKind::Relation)?,
            has_orbital_inclination: require(kb, "has_orbital_inclination", TermKind::Attribute)?,
            has_orbital_eccentricity: require(kb, "has_orbital_eccentricity", TermKind::Attribute)?,
            has_raan: require(kb, "has_raan", TermKind::Attribute)?,
            has_arg_perigee: require(kb, "has_arg_perigee", TermKind::Attribute)?,
            has_mean_motion: require(kb, "has_mean_motion", TermKind::Attribute)?,
            has_orbital_period: require(kb, "has_orbital_period", TermKind::Attribute)?,
            norad_id: require(kb, "norad_id", TermKind::Attribute)?,
            cospar_id: require(kb, "cospar_id", TermKind::Attribute)?,
            regimes,
        })
    }
}

struct Ingestor<'a> {
    kb: &'a mut KnowledgeBase,
    origin: Origin,
    report: IngestReport,
}

impl Ingestor<'_> {
    fn individual(&mut self, name: &str, classes: &[TermId]) -> Result<TermId, CatalogError> {
        if !is_valid_token(name) {
            return Err(CatalogError::BadGeneratedName(name.to_string()));
        }
        let id = self.kb.declare_individual(name, self.origin.clone())?;
        let mut asserted = Vec::new();
        for &class in classes {
            if self.kb.assert_fact(Fact::Class { individual: id, class }, self.origin.clone())? {
                self.report.facts_added += 1;
                asserted.push(class);
            }
        }
        if !asserted.is_empty() {
            self.report.generated.push(render_individual(self.kb, id, &asserted));
        }
        Ok(id)
    }

    fn fact(&mut self, fact: Fact) -> Result<(), CatalogError> {
        if self.kb.assert_fact(fact.clone(), self.origin.clone())? {
            self.report.facts_added += 1;
            if let Some(line) = render_fact(self.kb, &fact) {
                self.report.generated.push(line);
            }
        }
        Ok(())
    }
}

/// Ingests a TLE catalog (2-line or 3-line variant) into the knowledge base.
/// Unparsable records are skipped with a diagnostic; the file never aborts.
pub fn ingest_tle_text(
    kb: &mut KnowledgeBase,
    text: &str,
    source_name: &str,
    cfg: &IngestConfig,
) -> Result<IngestReport, CatalogError> {
    let seed = SeedTerms::resolve(kb)?;
    let satellite_class = cfg.satellite_class.unwrap_or(seed.artificial_satellite);
    if kb.kind(satellite_class) != TermKind::Class {
        return Err(CatalogError::UnknownSeedTerm(kb.name(satellite_class).to_string()));
    }
    let (records, file_diags) = parse_tle_file(text);
    let mut ing = Ingestor {
        kb,
        origin: Origin::new(source_name, 0),
        report: IngestReport::default(),
    };
    ing.report.records_read = records.len() + file_diags.len();
    ing.report.skipped = file_diags.len();
    ing.report.diagnostics = file_diags.iter().map(|d| d.to_string()).collect();

    for named in &records {
        let rec = &named.record;
        ing.origin = Origin::new(source_name, named.line_number as u32);
        let Some(epoch) = rec.epoch_timestamp() else {
            ing.report.skipped += 1;
            ing.report
                .diagnostics
                .push(format!("line {}: epoch does not map to a UTC instant", named.line_number));
            continue;
        };
        let derived = match derive_orbit(rec) {
            Ok(d) => d,
            Err(e) => {
                ing.report.skipped += 1;
                ing.report.diagnostics.push(format!("line {}: {e}", named.line_number));
                continue;
            }
        };
        ing.report.parsed += 1;

        let sat_name = NamingScheme::expand(&cfg.naming.satellite, rec);
        let tle_name = NamingScheme::expand(&cfg.naming.tle, rec);
        let sat = ing.individual(&sat_name, &[satellite_class])?;
        ing.fact(Fact::Attribute {
            attribute: seed.norad_id,
            subject: sat,
            value: AttrValue::Integer(rec.norad_id as i64),
        })?;
        ing.fact(Fact::Attribute {
            attribute: seed.cospar_id,
            subject: sat,
            value: AttrValue::Text(rec.cospar_trimmed().to_string()),
        })?;

        let tle = ing.individual(&tle_name, &[seed.tle_class])?;
        ing.fact(Fact::Relation {
            relation: seed.describes_orbit_of,
            subject: tle,
            object: sat,
            at: Some(epoch),
        })?;

        if cfg.create_orbit_individuals {
            let orbit_name = NamingScheme::expand(&cfg.naming.orbit, rec);
            let regime = classify_regime(&derived, rec, &cfg.thresholds);
            let regime_class = seed.regimes[regime.class_name()];
            let orbit = ing.individual(&orbit_name, &[seed.orbit_class, regime_class])?;
            ing.fact(Fact::Relation {
                relation: seed.has_orbit,
                subject: sat,
                object: orbit,
                at: None,
            })?;
            for (attr, value) in [
                (seed.has_orbital_inclination, rec.inclination_deg),
                (seed.has_orbital_eccentricity, rec.eccentricity),
                (seed.has_raan, rec.raan_deg),
                (seed.has_arg_perigee, rec.arg_perigee_deg),
                (seed.has_mean_motion, rec.mean_motion_rev_per_day),
                (seed.has_orbital_period, derived.period_min),
            ] {
                ing.fact(Fact::Attribute {
                    attribute: attr,
                    subject: orbit,
                    value: AttrValue::Decimal(Decimal::new(value)),
                })?;
            }
        }

        if let Some(sensor) = cfg.tracked_by_sensor {
            ing.fact(Fact::Relation {
                relation: seed.is_tracked_by,
                subject: sat,
                object: sensor,
                at: Some(epoch),
            })?;
        }
    }
    Ok(ing.report)
}

// ---------------------------------------------------------------------------
// reconciliation

/// One external catalog row: a name, the two identity keys, and any
/// additional attribute columns.
#[derive(Debug, Clone)]
pub struct ExternalRow {
    pub name: String,
    pub norad_id: Option<i64>,
    pub cospar_id: Option<String>,
    pub extra: Vec<(String, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchKey {
    NoradId,
    CosparId,
}

impl fmt::Display for MatchKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchKey::NoradId => "norad_id",
            MatchKey::CosparId => "cospar_id",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Merge {
    pub a: String,
    pub b: String,
    pub key: MatchKey,
}

#[derive(Debug, Clone)]
pub struct Conflict {
    pub individual: String,
    pub attribute: String,
    pub existing: Vec<String>,
    pub incoming: String,
}

#[derive(Debug, Default)]
pub struct ReconciliationReport {
    pub merges: Vec<Merge>,
    pub conflicts: Vec<Conflict>,
    pub created: Vec<String>,
}

/// Parses reconcile input: comma-separated with a `name,norad_id,cospar_id`
/// header prefix; remaining header columns name declared attributes.
pub fn parse_reconcile_csv(text: &str) -> Result<Vec<ExternalRow>, CatalogError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols.len() < 3 || cols[0] != "name" || cols[1] != "norad_id" || cols[2] != "cospar_id" {
        return Err(CatalogError::BadRow {
            row: 1,
            message: "header must begin `name,norad_id,cospar_id`".to_string(),
        });
    }
    let mut rows = Vec::new();
    for (i, result) in reader.records().enumerate() {
        let record = result?;
        let row_no = i + 2;
        let get = |idx: usize| record.get(idx).unwrap_or("").to_string();
        let name = get(0);
        if name.is_empty() {
            return Err(CatalogError::BadRow { row: row_no, message: "empty name".to_string() });
        }
        let norad_id = match get(1).as_str() {
            "" => None,
            s => Some(s.parse::<i64>().map_err(|_| CatalogError::BadRow {
                row: row_no,
                message: format!("bad norad_id `{s}`"),
            })?),
        };
        let cospar = get(2);
        let cospar_id = if cospar.is_empty() { None } else { Some(cospar) };
        let extra = cols[3..]
            .iter()
            .enumerate()
            .filter_map(|(j, &col)| {
                let v = get(j + 3);
                (!v.is_empty()).then(|| (col.to_string(), v))
            })
            .collect();
        rows.push(ExternalRow { name, norad_id, cospar_id, extra });
    }
    Ok(rows)
}

fn individuals_with_value(kb: &KnowledgeBase, attr: TermId, value: &AttrValue) -> Vec<TermId> {
    let mut out: Vec<TermId> = kb
        .facts()
        .iter()
        .filter_map(|f| match f {
            Fact::Attribute { attribute, subject, value: v }
                if *attribute == attr && v == value =>
            {
                Some(*subject)
            }
            _ => None,
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn coerce_csv_value(
    kb: &KnowledgeBase,
    attr: TermId,
    raw: &str,
    row: usize,
) -> Result<AttrValue, CatalogError> {
    let vt = &kb.attribute_decl(attr).expect("attribute checked").valuetype;
    let bad = || CatalogError::BadRow {
        row,
        message: format!("value `{raw}` does not fit attribute {}", kb.name(attr)),
    };
    Ok(match vt {
        ValueType::Decimal => AttrValue::Decimal(Decimal::new(raw.parse().map_err(|_| bad())?)),
        ValueType::Integer => AttrValue::Integer(raw.parse().map_err(|_| bad())?),
        ValueType::Text => AttrValue::Text(raw.to_string()),
        ValueType::Timestamp => AttrValue::Timestamp(TimeStamp::parse(raw).ok_or_else(bad)?),
        ValueType::Enum(_) => AttrValue::EnumToken(raw.to_string()),
    })
}

/// Links rows to existing individuals by norad_id (primary key) then
/// cospar_id (secondary). Matches become same-individual facts; unmatched
/// rows become new individuals; attribute conflicts are reported, not merged.
pub fn reconcile(
    kb: &mut KnowledgeBase,
    rows: &[ExternalRow],
    source_name: &str,
) -> Result<ReconciliationReport, CatalogError> {
    let norad_attr = require(kb, "norad_id", TermKind::Attribute)?;
    let cospar_attr = require(kb, "cospar_id", TermKind::Attribute)?;
    let mut report = ReconciliationReport::default();

    for (i, row) in rows.iter().enumerate() {
        let row_no = i + 2;
        let origin = Origin::new(source_name, row_no as u32);
        if !is_valid_token(&row.name) {
            return Err(CatalogError::BadRow {
                row: row_no,
                message: format!("name `{}` is not a valid token", row.name),
            });
        }

        // primary key first, then secondary
        let mut matched: Option<(TermId, MatchKey)> = None;
        let keys: [(MatchKey, TermId, Option<AttrValue>); 2] = [
            (MatchKey::NoradId, norad_attr, row.norad_id.map(AttrValue::Integer)),
            (MatchKey::CosparId, cospar_attr, row.cospar_id.clone().map(AttrValue::Text)),
        ];
        for (key, attr, value) in keys {
            let Some(value) = value else { continue };
            let hits = individuals_with_value(kb, attr, &value);
            // filter out the row's own individual from a previous run
            let hits: Vec<TermId> =
                hits.into_iter().filter(|&h| kb.name(h) != row.name).collect();
            match hits.len() {
                0 => continue,
                1 => {
                    matched = Some((hits[0], key));
                    break;
                }
                _ => {
                    // distinct individuals sharing a key, unless already same
                    let same = kb.has_fact(&Fact::Same(
                        kb.ordered_pair(hits[0], hits[1]).0,
                        kb.ordered_pair(hits[0], hits[1]).1,
                    ));
                    if same && hits.len() == 2 {
                        matched = Some((hits[0], key));
                        break;
                    }
                    return Err(CatalogError::AmbiguousKey {
                        key: match key {
                            MatchKey::NoradId => "norad_id",
                            MatchKey::CosparId => "cospar_id",
                        },
                        value: match &value {
                            AttrValue::Integer(n) => n.to_string(),
                            AttrValue::Text(s) => s.clone(),
                            _ => unreachable!("keys are integer or text"),
                        },
                        a: kb.name(hits[0]).to_string(),
                        b: kb.name(hits[1]).to_string(),
                    });
                }
            }
        }

        let this = kb.declare_individual(&row.name, origin.clone())?;
        let target = match matched {
            Some((other, key)) => {
                let (a, b) = kb.ordered_pair(this, other);
                if kb.assert_fact(Fact::Same(a, b), origin.clone())? {
                    report.merges.push(Merge {
                        a: kb.name(this).to_string(),
                        b: kb.name(other).to_string(),
                        key,
                    });
                }
                other
            }
            None => {
                report.created.push(row.name.clone());
                for (attr, value) in [
                    (norad_attr, row.norad_id.map(AttrValue::Integer)),
                    (cospar_attr, row.cospar_id.clone().map(AttrValue::Text)),
                ] {
                    if let Some(value) = value {
                        kb.assert_fact(
                            Fact::Attribute { attribute: attr, subject: this, value },
                            origin.clone(),
                        )?;
                    }
                }
                this
            }
        };

        // extra columns: assert when the individual has no value yet,
        // report a conflict when it has a different one
        for (col, raw) in &row.extra {
            let attr = require(kb, col, TermKind::Attribute).map_err(|_| CatalogError::BadRow {
                row: row_no,
                message: format!("column `{col}` is not a declared attribute"),
            })?;
            let value = coerce_csv_value(kb, attr, raw, row_no)?;
            let existing: Vec<AttrValue> = kb
                .facts()
                .iter()
                .filter_map(|f| match f {
                    Fact::Attribute { attribute, subject, value: v }
                        if *attribute == attr && *subject == target =>
                    {
                        Some(v.clone())
                    }
                    _ => None,
                })
                .collect();
            if existing.is_empty() || existing.contains(&value) {
                kb.assert_fact(
                    Fact::Attribute { attribute: attr, subject: target, value },
                    origin.clone(),
                )?;
            } else {
                report.conflicts.push(Conflict {
                    individual: kb.name(target).to_string(),
                    attribute: col.clone(),
                    existing: existing.iter().map(crate::dsl::render_attr_value).collect(),
                    incoming: crate::dsl::render_attr_value(&value),
                });
            }
        }
    }
    Ok(report)
}
