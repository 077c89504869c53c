//! NORAD Two-Line Element set parsing, validation, and serialization.
//!
//! The parser is bit-exact over the fixed 69-column layout: parsing a valid
//! pair and serializing the record reproduces the input bytes. Exponent-packed
//! fields (second derivative of mean motion, B*) keep their raw column text so
//! equivalent spellings such as `-0` and `+0` exponents survive a round trip.
//!
//! `derive_orbit` computes the geometric quantities used for annotation from
//! the standard two-body relations with μ = 398600.4418 km³/s² and an Earth
//! equatorial radius of 6378.137 km (WGS-84-consistent constants). There is no
//! propagation: derivation stops at period, semi-major axis, and apsis
//! altitudes.

use std::fmt;

use thiserror::Error;

use crate::model::TimeStamp;

/// Standard gravitational parameter of Earth, km³/s².
pub const MU_EARTH_KM3_S2: f64 = 398600.4418;
/// Earth equatorial radius, km.
pub const EARTH_RADIUS_KM: f64 = 6378.137;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TleError {
    #[error("line {line} has length {found}, expected 69")]
    BadLength { line: u8, found: usize },
    #[error("line {line} does not begin with `{expected} `")]
    BadLineNumber { line: u8, expected: char },
    #[error("line {line} checksum mismatch: expected {expected}, found {found}")]
    ChecksumMismatch { line: u8, expected: u8, found: char },
    #[error("catalog numbers differ between lines: {line1} vs {line2}")]
    CatalogNumberMismatch { line1: u32, line2: u32 },
    #[error("line {line} columns {start}-{end}: {message}")]
    FieldParseError { line: u8, start: usize, end: usize, message: String },
    #[error("eccentricity {0} >= 1: hyperbolic orbits are unsupported")]
    HyperbolicUnsupported(f64),
    #[error("field {field} cannot represent value `{value}`")]
    FieldOverflow { field: &'static str, value: String },
}

/// An exponent-packed decimal field (`±MMMMM±E` meaning `±0.MMMMM × 10^±E`).
///
/// The raw eight column bytes are kept so serialization is byte-identical even
/// for spellings the canonical writer would not produce (e.g. a `-0`
/// exponent).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedDecimal {
    raw: [u8; 8],
}

impl PackedDecimal {
    /// Canonical form: space or `-` sign, five mantissa digits, explicit
    /// exponent sign (`+` for non-negative).
    pub fn new(mantissa: i32, exponent: i8) -> Result<PackedDecimal, TleError> {
        if mantissa.unsigned_abs() > 99_999 || !(-9..=9).contains(&exponent) {
            return Err(TleError::FieldOverflow {
                field: "packed decimal",
                value: format!("{mantissa}e{exponent}"),
            });
        }
        let text = format!(
            "{}{:05}{}{}",
            if mantissa < 0 { '-' } else { ' ' },
            mantissa.unsigned_abs(),
            if exponent < 0 { '-' } else { '+' },
            exponent.unsigned_abs()
        );
        let mut raw = [0u8; 8];
        raw.copy_from_slice(text.as_bytes());
        Ok(PackedDecimal { raw })
    }

    pub fn zero() -> PackedDecimal {
        PackedDecimal::new(0, 0).unwrap()
    }

    fn parse(field: &str, line: u8, start: usize, end: usize) -> Result<PackedDecimal, TleError> {
        let err = |message: String| TleError::FieldParseError { line, start, end, message };
        let bytes = field.as_bytes();
        if bytes.len() != 8 {
            return Err(err(format!("packed field has width {}, expected 8", bytes.len())));
        }
        if !matches!(bytes[0], b' ' | b'-' | b'+') {
            return Err(err(format!("bad mantissa sign `{}`", bytes[0] as char)));
        }
        if !bytes[1..6].iter().all(u8::is_ascii_digit) {
            return Err(err("mantissa must be five digits".to_string()));
        }
        if !matches!(bytes[6], b'-' | b'+' | b' ') || !bytes[7].is_ascii_digit() {
            return Err(err("bad packed exponent".to_string()));
        }
        let mut raw = [0u8; 8];
        raw.copy_from_slice(bytes);
        Ok(PackedDecimal { raw })
    }

    pub fn mantissa(&self) -> i32 {
        let digits: i32 =
            std::str::from_utf8(&self.raw[1..6]).unwrap().parse().unwrap_or(0);
        if self.raw[0] == b'-' {
            -digits
        } else {
            digits
        }
    }

    pub fn exponent(&self) -> i8 {
        let e = (self.raw[7] - b'0') as i8;
        if self.raw[6] == b'-' {
            -e
        } else {
            e
        }
    }

    pub fn value(&self) -> f64 {
        self.mantissa() as f64 * 10f64.powi(self.exponent() as i32 - 5)
    }

    fn raw_str(&self) -> &str {
        std::str::from_utf8(&self.raw).unwrap()
    }
}

impl fmt::Display for PackedDecimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.raw_str())
    }
}

/// A parsed two-line element set.
#[derive(Debug, Clone, PartialEq)]
pub struct TleRecord {
    pub norad_id: u32,
    pub classification: char,
    /// COSPAR international designator, raw eight columns (launch year,
    /// launch number, piece), right-padded with spaces
    pub cospar_id: String,
    /// full calendar year after the 57/56 pivot (57–99 → 19xx, 00–56 → 20xx)
    pub epoch_year: i32,
    /// fractional day of year, 1-based
    pub epoch_day: f64,
    /// first derivative of mean motion, rev/day²
    pub mean_motion_dot: f64,
    /// second derivative of mean motion, rev/day³ (exponent-packed)
    pub mean_motion_ddot: PackedDecimal,
    /// drag term, 1/earth-radii (exponent-packed)
    pub bstar: PackedDecimal,
    pub ephemeris_type: char,
    pub element_set_no: u32,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    pub eccentricity: f64,
    pub arg_perigee_deg: f64,
    pub mean_anomaly_deg: f64,
    pub mean_motion_rev_per_day: f64,
    pub rev_number: u32,
}

impl TleRecord {
    /// COSPAR designator with column padding removed.
    pub fn cospar_trimmed(&self) -> &str {
        self.cospar_id.trim()
    }

    /// Epoch as a UTC timestamp, rounded to the nearest second.
    pub fn epoch_timestamp(&self) -> Option<TimeStamp> {
        let day = self.epoch_day.floor();
        let secs = ((self.epoch_day - day) * 86_400.0).round() as u32;
        let (day, secs) = if secs >= 86_400 { (day + 1.0, 0) } else { (day, secs) };
        TimeStamp::from_ymd_seconds(self.epoch_year, day as u32, secs)
    }
}

/// Geometric quantities derived from a record by the two-body relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedElements {
    pub period_min: f64,
    pub semi_major_axis_km: f64,
    pub perigee_alt_km: f64,
    pub apogee_alt_km: f64,
}

/// Mod-10 checksum over a 68-character line prefix: digits count their value,
/// each `-` counts one, everything else zero.
pub fn checksum(prefix: &str) -> Result<u8, TleError> {
    if prefix.len() != 68 {
        return Err(TleError::BadLength { line: 0, found: prefix.len() });
    }
    let mut sum: u32 = 0;
    for b in prefix.bytes() {
        if b.is_ascii_digit() {
            sum += (b - b'0') as u32;
        } else if b == b'-' {
            sum += 1;
        }
    }
    Ok((sum % 10) as u8)
}

fn cols(line: &str, start: usize, end: usize) -> &str {
    &line[start - 1..end]
}

/// Numeric field: leading spaces and an optional sign accepted, interior
/// spaces rejected.
fn parse_f64_field(line_no: u8, line: &str, start: usize, end: usize) -> Result<f64, TleError> {
    let field = cols(line, start, end);
    let trimmed = field.trim_start_matches(' ');
    let err = |message: String| TleError::FieldParseError { line: line_no, start, end, message };
    if trimmed.contains(' ') {
        return Err(err(format!("interior space in numeric field `{field}`")));
    }
    trimmed
        .parse::<f64>()
        .map_err(|_| err(format!("bad numeric field `{field}`")))
}

fn parse_u32_field(line_no: u8, line: &str, start: usize, end: usize) -> Result<u32, TleError> {
    let field = cols(line, start, end);
    let trimmed = field.trim_start_matches(' ');
    let err = |message: String| TleError::FieldParseError { line: line_no, start, end, message };
    if trimmed.is_empty() {
        return Ok(0);
    }
    if trimmed.contains(' ') {
        return Err(err(format!("interior space in numeric field `{field}`")));
    }
    trimmed.parse::<u32>().map_err(|_| err(format!("bad integer field `{field}`")))
}

fn check_line(line_no: u8, expected_first: char, line: &str) -> Result<(), TleError> {
    if line.len() != 69 || !line.is_ascii() {
        return Err(TleError::BadLength { line: line_no, found: line.len() });
    }
    let bytes = line.as_bytes();
    if bytes[0] != expected_first as u8 || bytes[1] != b' ' {
        return Err(TleError::BadLineNumber { line: line_no, expected: expected_first });
    }
    let expected = checksum(&line[..68]).expect("prefix length checked");
    let found = bytes[68] as char;
    if found != (b'0' + expected) as char {
        return Err(TleError::ChecksumMismatch { line: line_no, expected, found });
    }
    Ok(())
}

/// Decodes a two-line pair from the fixed column layout, verifying both
/// checksums and the catalog-number agreement between the lines.
pub fn parse_tle_pair(line1: &str, line2: &str) -> Result<TleRecord, TleError> {
    check_line(1, '1', line1)?;
    check_line(2, '2', line2)?;

    let norad1 = parse_u32_field(1, line1, 3, 7)?;
    let norad2 = parse_u32_field(2, line2, 3, 7)?;
    if norad1 != norad2 {
        return Err(TleError::CatalogNumberMismatch { line1: norad1, line2: norad2 });
    }

    // epoch: YYDDD.DDDDDDDD
    let yy = parse_u32_field(1, line1, 19, 20)?;
    let epoch_year = if yy >= 57 { 1900 + yy as i32 } else { 2000 + yy as i32 };
    let epoch_day = parse_f64_field(1, line1, 21, 32)?;
    if !(1.0..367.0).contains(&epoch_day) {
        return Err(TleError::FieldParseError {
            line: 1,
            start: 21,
            end: 32,
            message: format!("epoch day {epoch_day} out of range [1, 367)"),
        });
    }

    // mean motion dot: sign column plus implied leading zero fraction
    let mmdot_field = cols(line1, 34, 43);
    let sign = &mmdot_field[..1];
    let frac = &mmdot_field[1..];
    let mmdot_err = |message: String| TleError::FieldParseError {
        line: 1,
        start: 34,
        end: 43,
        message,
    };
    if !matches!(sign, " " | "-" | "+") {
        return Err(mmdot_err(format!("bad sign `{sign}`")));
    }
    if !frac.starts_with('.') || !frac[1..].bytes().all(|b| b.is_ascii_digit()) {
        return Err(mmdot_err(format!("bad fraction `{frac}`")));
    }
    let mean_motion_dot =
        frac.parse::<f64>().map_err(|_| mmdot_err(format!("bad fraction `{frac}`")))?
            * if sign == "-" { -1.0 } else { 1.0 };

    let mean_motion_ddot = PackedDecimal::parse(cols(line1, 45, 52), 1, 45, 52)?;
    let bstar = PackedDecimal::parse(cols(line1, 54, 61), 1, 54, 61)?;

    let inclination_deg = parse_f64_field(2, line2, 9, 16)?;
    if !(0.0..=180.0).contains(&inclination_deg) {
        return Err(TleError::FieldParseError {
            line: 2,
            start: 9,
            end: 16,
            message: format!("inclination {inclination_deg} out of range [0, 180]"),
        });
    }
    let raan_deg = parse_f64_field(2, line2, 18, 25)?;
    let arg_perigee_deg = parse_f64_field(2, line2, 35, 42)?;
    let mean_anomaly_deg = parse_f64_field(2, line2, 44, 51)?;
    for (name, v, start, end) in [
        ("RAAN", raan_deg, 18, 25),
        ("argument of perigee", arg_perigee_deg, 35, 42),
        ("mean anomaly", mean_anomaly_deg, 44, 51),
    ] {
        if !(0.0..360.0).contains(&v) {
            return Err(TleError::FieldParseError {
                line: 2,
                start,
                end,
                message: format!("{name} {v} out of range [0, 360)"),
            });
        }
    }

    // eccentricity: seven digits with implied leading "0."
    let ecc_field = cols(line2, 27, 33);
    if !ecc_field.bytes().all(|b| b.is_ascii_digit()) {
        return Err(TleError::FieldParseError {
            line: 2,
            start: 27,
            end: 33,
            message: format!("eccentricity field `{ecc_field}` must be seven digits"),
        });
    }
    let eccentricity = ecc_field.parse::<u32>().unwrap() as f64 / 1e7;

    let mean_motion_rev_per_day = parse_f64_field(2, line2, 53, 63)?;
    if mean_motion_rev_per_day <= 0.0 {
        return Err(TleError::FieldParseError {
            line: 2,
            start: 53,
            end: 63,
            message: format!("mean motion {mean_motion_rev_per_day} must be positive"),
        });
    }

    Ok(TleRecord {
        norad_id: norad1,
        classification: line1.as_bytes()[7] as char,
        cospar_id: cols(line1, 10, 17).to_string(),
        epoch_year,
        epoch_day,
        mean_motion_dot,
        mean_motion_ddot,
        bstar,
        ephemeris_type: line1.as_bytes()[62] as char,
        element_set_no: parse_u32_field(1, line1, 65, 68)?,
        inclination_deg,
        raan_deg,
        eccentricity,
        arg_perigee_deg,
        mean_anomaly_deg,
        mean_motion_rev_per_day,
        rev_number: parse_u32_field(2, line2, 64, 68)?,
    })
}

/// Two-body geometric derivation (no propagation).
pub fn derive_orbit(rec: &TleRecord) -> Result<DerivedElements, TleError> {
    if rec.eccentricity >= 1.0 {
        return Err(TleError::HyperbolicUnsupported(rec.eccentricity));
    }
    let n = rec.mean_motion_rev_per_day;
    let period_min = 1440.0 / n;
    let n_rad_s = n * 2.0 * std::f64::consts::PI / 86_400.0;
    let a = (MU_EARTH_KM3_S2 / (n_rad_s * n_rad_s)).cbrt();
    Ok(DerivedElements {
        period_min,
        semi_major_axis_km: a,
        perigee_alt_km: a * (1.0 - rec.eccentricity) - EARTH_RADIUS_KM,
        apogee_alt_km: a * (1.0 + rec.eccentricity) - EARTH_RADIUS_KM,
    })
}

fn fit(field: &'static str, text: String, width: usize) -> Result<String, TleError> {
    if text.len() > width {
        return Err(TleError::FieldOverflow { field, value: text });
    }
    Ok(text)
}

/// Writes the exact fixed-column layout with recomputed checksums.
/// Records obtained from `parse_tle_pair` serialize back to the input bytes.
pub fn serialize_tle(rec: &TleRecord) -> Result<(String, String), TleError> {
    if rec.norad_id == 0 || rec.norad_id > 99_999 {
        return Err(TleError::FieldOverflow {
            field: "catalog number",
            value: rec.norad_id.to_string(),
        });
    }
    if rec.cospar_id.len() != 8 {
        return Err(TleError::FieldOverflow {
            field: "COSPAR designator",
            value: rec.cospar_id.clone(),
        });
    }
    if rec.mean_motion_dot.abs() >= 1.0 {
        return Err(TleError::FieldOverflow {
            field: "mean motion dot",
            value: rec.mean_motion_dot.to_string(),
        });
    }
    if !(0.0..1.0).contains(&rec.eccentricity) {
        return Err(TleError::FieldOverflow {
            field: "eccentricity",
            value: rec.eccentricity.to_string(),
        });
    }
    let mmdot_frac = (rec.mean_motion_dot.abs() * 1e8).round() as u64;
    let mmdot = format!(
        "{}.{:08}",
        if rec.mean_motion_dot < 0.0 { '-' } else { ' ' },
        mmdot_frac
    );
    let elset = fit("element set number", format!("{:4}", rec.element_set_no), 4)?;
    let mut line1 = format!(
        "1 {:05}{} {} {:02}{:012.8} {} {} {} {} {}",
        rec.norad_id,
        rec.classification,
        rec.cospar_id,
        rec.epoch_year.rem_euclid(100),
        rec.epoch_day,
        fit("mean motion dot", mmdot, 10)?,
        rec.mean_motion_ddot,
        rec.bstar,
        rec.ephemeris_type,
        elset,
    );
    debug_assert_eq!(line1.len(), 68);
    line1.push((b'0' + checksum(&line1)?) as char);

    let ecc = (rec.eccentricity * 1e7).round() as u64;
    let mut line2 = format!(
        "2 {:05} {} {} {:07} {} {} {}{}",
        rec.norad_id,
        fit("inclination", format!("{:8.4}", rec.inclination_deg), 8)?,
        fit("RAAN", format!("{:8.4}", rec.raan_deg), 8)?,
        fit("eccentricity", ecc.to_string(), 7).map(|_| ecc)?,
        fit("argument of perigee", format!("{:8.4}", rec.arg_perigee_deg), 8)?,
        fit("mean anomaly", format!("{:8.4}", rec.mean_anomaly_deg), 8)?,
        fit("mean motion", format!("{:11.8}", rec.mean_motion_rev_per_day), 11)?,
        fit("revolution number", format!("{:5}", rec.rev_number), 5)?,
    );
    debug_assert_eq!(line2.len(), 68);
    line2.push((b'0' + checksum(&line2)?) as char);
    Ok((line1, line2))
}

/// One record from a catalog file, with its optional name line and the
/// one-based file line number of its first TLE line.
#[derive(Debug, Clone)]
pub struct NamedTle {
    pub name: Option<String>,
    pub record: TleRecord,
    pub line_number: usize,
}

/// A skipped record: the file line where the problem starts and the cause.
#[derive(Debug, Clone)]
pub struct TleFileDiagnostic {
    pub line_number: usize,
    pub error: TleError,
}

impl fmt::Display for TleFileDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line_number, self.error)
    }
}

/// Splits a catalog file into records, auto-detecting the 2-line and 3-line
/// (name line of at most 24 characters) variants. Bad records are reported
/// and skipped; parsing never aborts the file.
pub fn parse_tle_file(text: &str) -> (Vec<NamedTle>, Vec<TleFileDiagnostic>) {
    let mut records = Vec::new();
    let mut diagnostics = Vec::new();
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    let mut i = 0;
    while i < lines.len() {
        let (no, line) = lines[i];
        let mut name = None;
        let mut idx = i;
        if !line.starts_with("1 ") {
            // candidate name line for the 3-line variant
            if line.len() <= 24 && idx + 1 < lines.len() && lines[idx + 1].1.starts_with("1 ") {
                name = Some(line.trim().to_string());
                idx += 1;
            } else {
                diagnostics.push(TleFileDiagnostic {
                    line_number: no,
                    error: TleError::BadLineNumber { line: 1, expected: '1' },
                });
                i += 1;
                continue;
            }
        }
        let (no1, line1) = lines[idx];
        let Some(&(_, line2)) = lines.get(idx + 1) else {
            diagnostics.push(TleFileDiagnostic {
                line_number: no1,
                error: TleError::BadLineNumber { line: 2, expected: '2' },
            });
            break;
        };
        match parse_tle_pair(line1, line2) {
            Ok(record) => records.push(NamedTle { name, record, line_number: no1 }),
            Err(error) => diagnostics.push(TleFileDiagnostic { line_number: no1, error }),
        }
        i = idx + 2;
    }
    (records, diagnostics)
}
