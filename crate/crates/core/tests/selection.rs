use std::path::Path;

use proptest::prelude::*;
use quboselect::feature_select::{
    build_qubo, correlation_profile, encode_categorical, ingest_csv, normalize, ColumnKind, CorrelationProfile,
    CsvOptions, FeatureSelectionConfig,
};
use quboselect::pipeline::prepare_dataset;
use quboselect::solvers::solve_exhaustive;

fn gcd_bytes() -> Vec<u8> {
    std::fs::read(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/german_credit.csv")).unwrap()
}

#[test]
fn german_credit_ingestion() {
    let raw = ingest_csv(gcd_bytes().as_slice(), "credit", &CsvOptions::default()).unwrap();
    assert_eq!((raw.rows(), raw.n_features()), (1000, 20));
    let report = raw.report();
    assert_eq!(report.target_mapping.get("1"), Some(&0));
    assert_eq!(report.target_mapping.get("2"), Some(&1));
    assert_eq!(report.minority_fraction, 0.3);
    assert_eq!(report.rows_with_unknown, 0);
    let categorical = raw.kinds().iter().filter(|k| **k == ColumnKind::Categorical).count();
    assert_eq!(categorical, 13);

    let ds = normalize(&encode_categorical(&raw)).unwrap();
    assert!(ds.is_numeric());
    assert_eq!(ds.report().encodings.len(), 13);
    assert_eq!(ds, prepare_dataset(gcd_bytes().as_slice(), "credit", &CsvOptions::default()).unwrap());
}

#[test]
fn messy_csv_through_to_a_model() {
    let text = "\
colour;size;weight;label
red;1.5;?;yes
blue;;3.0;no
red;2.5;4.0;yes
NA;0.5;1.0;no
green;3.5;5.0;yes
blue;1.0;2.0;no
";
    let options = CsvOptions { delimiter: b';' };
    let ds = prepare_dataset(text.as_bytes(), "label", &options).unwrap();
    assert_eq!((ds.rows(), ds.n_features()), (6, 3));
    let report = ds.report();
    // "no" < "yes" lexically
    assert_eq!(report.target_mapping.get("no"), Some(&0));
    assert_eq!(report.rows_with_unknown, 3);
    assert_eq!(report.imputations.len(), 3);

    let profile = correlation_profile(&ds).unwrap();
    let model = build_qubo(&profile, &FeatureSelectionConfig::default()).unwrap();
    assert_eq!(model.n(), 3);
    let best = solve_exhaustive(&model).unwrap();
    assert!(best.selected_count >= 1);
}

/// Relevance `Σ|ρ(i, target)|` and redundancy `Σ_{i<j}|ρ(i, j)|` of a subset.
fn relevance_redundancy(p: &CorrelationProfile, bits: &[u8]) -> (f64, f64) {
    let d = bits.len();
    let mut rel = 0.0;
    let mut red = 0.0;
    for i in 0..d {
        if bits[i] == 1 {
            rel += p.target_corr[i].abs();
            for j in (i + 1)..d {
                if bits[j] == 1 {
                    red += p.feature_corr[i][j].abs();
                }
            }
        }
    }
    (rel, red)
}

fn profile_strategy() -> impl Strategy<Value = CorrelationProfile> {
    (2usize..=7).prop_flat_map(|d| {
        (
            prop::collection::vec(-1.0..=1.0f64, d),
            prop::collection::vec(-1.0..=1.0f64, d * (d - 1) / 2),
        )
            .prop_map(move |(target, upper)| {
                let mut m = vec![vec![0.0; d]; d];
                let mut it = upper.into_iter();
                for i in 0..d {
                    m[i][i] = 1.0;
                    for j in (i + 1)..d {
                        let v = it.next().unwrap();
                        m[i][j] = v;
                        m[j][i] = v;
                    }
                }
                let names = (0..d).map(|i| format!("f{i}")).collect();
                CorrelationProfile::new(names, target, m).unwrap()
            })
    })
}

proptest! {
    // For alpha < 1 the objective is a positive multiple of
    // redundancy − λ·relevance with λ = alpha/(1 − alpha) increasing in alpha,
    // so both relevance and redundancy of an optimal subset can only grow.
    // The subset size itself is not monotone in general.
    #[test]
    fn relevance_and_redundancy_grow_with_alpha(
        profile in profile_strategy(),
        a in 0.0..0.99f64,
        b in 0.0..0.99f64,
    ) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let solve = |alpha: f64| {
            let model = build_qubo(&profile, &FeatureSelectionConfig::new(alpha, true).unwrap()).unwrap();
            relevance_redundancy(&profile, solve_exhaustive(&model).unwrap().best.as_slice())
        };
        let (rel_lo, red_lo) = solve(lo);
        let (rel_hi, red_hi) = solve(hi);
        prop_assert!(rel_hi >= rel_lo - 1e-9, "relevance {rel_lo} -> {rel_hi}");
        prop_assert!(red_hi >= red_lo - 1e-9, "redundancy {red_lo} -> {red_hi}");
    }
}

#[test]
fn subset_size_is_not_monotone_in_alpha() {
    // Three mildly relevant, mutually uncorrelated features, and two strongly
    // relevant ones that overlap with each other and with the first three.
    // Low alpha: {a, b, c} (relevance 1.2, redundancy 0).
    // Higher alpha: {h1, h2} (relevance 1.8, redundancy 0.5).
    let names = ["a", "b", "c", "h1", "h2"].map(String::from).to_vec();
    let target = vec![0.4, 0.4, 0.4, 0.9, 0.9];
    let m = vec![
        vec![1.0, 0.0, 0.0, 0.5, 0.5],
        vec![0.0, 1.0, 0.0, 0.5, 0.5],
        vec![0.0, 0.0, 1.0, 0.5, 0.5],
        vec![0.5, 0.5, 0.5, 1.0, 0.5],
        vec![0.5, 0.5, 0.5, 0.5, 1.0],
    ];
    let profile = CorrelationProfile::new(names, target, m).unwrap();
    let size = |alpha: f64| {
        let model = build_qubo(&profile, &FeatureSelectionConfig::new(alpha, true).unwrap()).unwrap();
        solve_exhaustive(&model).unwrap().selected_count
    };
    assert_eq!(size(0.4), 3);
    assert_eq!(size(0.5), 2);
}
