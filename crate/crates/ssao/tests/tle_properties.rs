//! Fuzz and property tests for the two-line element set codec: byte-exact
//! round-trips over random valid records, rejection of every single-digit
//! corruption, the checksum flip property, and derived-element sanity
//! against an independent Kepler computation.

mod common;

use common::random_tle;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use ssao::tle::{checksum, derive_orbit, parse_tle_pair, serialize_tle, MU_EARTH_KM3_S2};

const ISS_LINE1: &str =
    "1 25544U 98067A   08264.51782528 -.00002182  00000-0 -11606-4 0  2927";
const ISS_LINE2: &str =
    "2 25544  51.6416 247.4627 0006703 130.5360 325.0288 15.72125391563537";

#[test]
fn random_records_round_trip_byte_identically() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for i in 0..1000 {
        let rec = random_tle(&mut rng);
        let (l1, l2) = serialize_tle(&rec).unwrap_or_else(|e| panic!("record {i}: {e}: {rec:?}"));
        assert_eq!(l1.len(), 69, "record {i}");
        assert_eq!(l2.len(), 69, "record {i}");
        let parsed = parse_tle_pair(&l1, &l2)
            .unwrap_or_else(|e| panic!("record {i}: {e}\n{l1}\n{l2}"));
        assert_eq!(parsed, rec, "record {i}: field round-trip");
        let (r1, r2) = serialize_tle(&parsed).unwrap();
        assert_eq!((r1, r2), (l1, l2), "record {i}: byte round-trip");
    }
}

#[test]
fn flipping_any_digit_changes_the_checksum() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut lines = vec![ISS_LINE1.to_string(), ISS_LINE2.to_string()];
    for _ in 0..20 {
        let rec = random_tle(&mut rng);
        let (l1, l2) = serialize_tle(&rec).unwrap();
        lines.push(l1);
        lines.push(l2);
    }
    for line in &lines {
        let prefix = &line[..68];
        let base = checksum(prefix).unwrap();
        for (i, c) in prefix.char_indices() {
            let Some(d) = c.to_digit(10) else { continue };
            let flipped: String = prefix
                .chars()
                .enumerate()
                .map(|(j, c)| {
                    if j == i {
                        char::from_digit((d + 1) % 10, 10).unwrap()
                    } else {
                        c
                    }
                })
                .collect();
            assert_ne!(
                checksum(&flipped).unwrap(),
                base,
                "digit flip at column {} went undetected in {line}",
                i + 1
            );
        }
    }
}

#[test]
fn every_single_digit_corruption_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut pairs = vec![(ISS_LINE1.to_string(), ISS_LINE2.to_string())];
    for _ in 0..20 {
        let rec = random_tle(&mut rng);
        pairs.push(serialize_tle(&rec).unwrap());
    }
    for (l1, l2) in &pairs {
        for which in 0..2 {
            let target = if which == 0 { l1 } else { l2 };
            for (i, c) in target.char_indices() {
                let Some(d) = c.to_digit(10) else { continue };
                let corrupted: String = target
                    .chars()
                    .enumerate()
                    .map(|(j, c)| {
                        if j == i {
                            char::from_digit((d + 1) % 10, 10).unwrap()
                        } else {
                            c
                        }
                    })
                    .collect();
                let result = if which == 0 {
                    parse_tle_pair(&corrupted, l2)
                } else {
                    parse_tle_pair(l1, &corrupted)
                };
                assert!(
                    result.is_err(),
                    "corruption at line {} column {} was accepted:\n{corrupted}",
                    which + 1,
                    i + 1
                );
            }
        }
    }
}

#[test]
fn derived_elements_match_independent_kepler_computation() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..500 {
        let rec = random_tle(&mut rng);
        let d = derive_orbit(&rec).unwrap();
        // independent oracle: T = 86400/n seconds, a = cbrt(mu (T/2pi)^2)
        let t_sec = 86_400.0 / rec.mean_motion_rev_per_day;
        let a = (MU_EARTH_KM3_S2 * (t_sec / (2.0 * std::f64::consts::PI)).powi(2)).cbrt();
        assert!(
            (d.semi_major_axis_km - a).abs() < 1e-6,
            "sma {} vs oracle {a}",
            d.semi_major_axis_km
        );
        assert!((d.period_min - 1440.0 / rec.mean_motion_rev_per_day).abs() < 1e-9);
        // apogee >= perigee always; both consistent with a and e
        assert!(d.apogee_alt_km >= d.perigee_alt_km - 1e-9);
    }
}

#[test]
fn period_of_exact_mean_motion_is_exact() {
    let mut rec = random_tle(&mut ChaCha8Rng::seed_from_u64(1));
    rec.mean_motion_rev_per_day = 14.4;
    let d = derive_orbit(&rec).unwrap();
    assert_eq!(d.period_min, 100.0);
}

#[test]
fn semi_major_axis_decreases_as_mean_motion_increases() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..200 {
        let mut a = random_tle(&mut rng);
        let mut b = a.clone();
        let (m1, m2) = (rng.gen_range(0.5..16.0), rng.gen_range(0.5..16.0));
        let (lo, hi) = if m1 < m2 { (m1, m2) } else { (m2, m1) };
        if lo == hi {
            continue;
        }
        a.mean_motion_rev_per_day = lo;
        b.mean_motion_rev_per_day = hi;
        let (da, db) = (derive_orbit(&a).unwrap(), derive_orbit(&b).unwrap());
        assert!(
            da.semi_major_axis_km > db.semi_major_axis_km,
            "sma not monotone: n={lo} -> {}, n={hi} -> {}",
            da.semi_major_axis_km,
            db.semi_major_axis_km
        );
    }
}

#[test]
fn three_line_files_with_garbage_produce_diagnostics_and_skip() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let good: Vec<(String, String)> =
        (0..3).map(|_| serialize_tle(&random_tle(&mut rng)).unwrap()).collect();
    let mut text = String::new();
    text.push_str(&format!("OBJECT A\n{}\n{}\n", good[0].0, good[0].1));
    text.push_str("THIS LINE IS GARBAGE THAT IS WAY TOO LONG TO BE A NAME LINE OR A TLE\n");
    text.push_str(&format!("OBJECT B\n{}\n{}\n", good[1].0, good[1].1));
    // corrupt record: bad checksum on line 2
    let mut bad2 = good[2].1.clone();
    let last = bad2.pop().unwrap();
    bad2.push(if last == '0' { '1' } else { '0' });
    text.push_str(&format!("OBJECT C\n{}\n{}\n", good[2].0, bad2));
    let (records, diagnostics) = ssao::tle::parse_tle_file(&text);
    assert_eq!(records.len(), 2, "{diagnostics:?}");
    assert_eq!(records[0].name.as_deref(), Some("OBJECT A"));
    assert_eq!(records[1].name.as_deref(), Some("OBJECT B"));
    assert!(diagnostics.len() >= 2, "{diagnostics:?}");
}
