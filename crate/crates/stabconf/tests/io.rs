use proptest::prelude::*;
use stabconf::config::{seed_override, ExperimentConfig};
use stabconf::dataset::{read_dataset, write_dataset};
use stabconf::format::{ext_real, parse_ext_real};
use stabconf::ErrorKind;
use stabconf_core::sim::{generate, GeneratorSpec, Noise};
use stabconf_core::Domain;

#[test]
fn reads_header_and_rows() {
    let d = read_dataset("x1,x2,y\n0.1,0.2,0.5\n-0.3,0,1\n".as_bytes(), Domain::unbounded()).unwrap();
    assert_eq!((d.len(), d.dim()), (2, 2));
    assert_eq!(d.points()[1].x, vec![-0.3, 0.0]);
}

#[test]
fn rejects_malformed_files_as_data_errors() {
    let cases = [
        ("a,b\n1,2\n", "header"),
        ("x1,y\n", "dataset"),
        ("x1,y\n1,nope\n", "row 1"),
        ("x1,y\n1,2\n1\n", "row 2"),
        ("x1,y\n1,inf\n", "row 1"),
        ("x2,y\n1,2\n", "header"),
    ];
    for (text, field) in cases {
        let e = read_dataset(text.as_bytes(), Domain::unbounded()).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Data, "{text}");
        assert_eq!(e.field.as_deref(), Some(field), "{text}: {e}");
    }
}

#[test]
fn domain_violations_name_the_row() {
    let domain = Domain::new(1.0, 1.0).unwrap();
    let e = read_dataset("x1,y\n0.5,0.5\n0.5,1.5\n".as_bytes(), domain).unwrap_err();
    assert_eq!(e.kind, ErrorKind::Data);
    assert_eq!(e.field.as_deref(), Some("row 2"));
}

#[test]
fn written_datasets_read_back_exactly() {
    let spec = GeneratorSpec {
        p: 3,
        feature_radius: 1.0,
        response_bound: 2.0,
        theta_star: vec![0.3, -0.2, 0.1],
        noise: Noise::TruncatedGaussian { sigma: 0.3, cut: 2.5 },
    };
    let d = generate(&spec, 50, 4).unwrap();
    let mut buf = Vec::new();
    write_dataset(&mut buf, &d).unwrap();
    let back = read_dataset(buf.as_slice(), spec.domain()).unwrap();
    assert_eq!(back.points(), d.points());
}

const COVERAGE: &str = r#"{
  "kind": "coverage",
  "method": {"name": "cv+", "folds": 4},
  "generator": {"p": 1, "feature_radius": 1.0, "response_bound": 1.0, "theta_star": [0.5],
                "noise": {"family": "truncated-gaussian", "sigma": 0.2, "cut": 2.0}},
  "n": 20, "alpha": 0.1, "trials": 5,
  "ridge": {"lambda": 1.0, "parameterization": "per-sample"}
}"#;

#[test]
fn config_defaults_and_hash() {
    let cfg = ExperimentConfig::parse(COVERAGE).unwrap();
    let ExperimentConfig::Coverage(c) = &cfg else { panic!("wrong kind") };
    assert_eq!((c.n_test, c.base_seed), (10_000, 0));
    assert_eq!(cfg.hash().len(), 64);
    let mut other = cfg.clone();
    other.set_base_seed(1);
    assert_ne!(cfg.hash(), other.hash());
}

#[test]
fn unknown_keys_are_config_errors() {
    let bad = [
        COVERAGE.replace("\"trials\": 5", "\"trials\": 5, \"extra\": 1"),
        COVERAGE.replace("\"folds\": 4", "\"folds\": 4, \"k\": 2"),
        COVERAGE.replace("\"cut\": 2.0", "\"cut\": 2.0, \"mean\": 0"),
        COVERAGE.replace("\"lambda\": 1.0,", "\"lambda\": 1.0, \"l2\": 1,"),
        COVERAGE.replace("\"coverage\"", "\"bogus\""),
        COVERAGE.replace("\"folds\": 4", "\"folds\": 3"),
        COVERAGE.replace("\"alpha\": 0.1", "\"alpha\": 1.5"),
    ];
    for text in bad {
        let e = ExperimentConfig::parse(&text).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Config, "{text}");
    }
}

#[test]
fn seed_override_parsing() {
    assert_eq!(seed_override(None).unwrap(), None);
    assert_eq!(seed_override(Some(" 17 ")).unwrap(), Some(17));
    assert_eq!(seed_override(Some("x")).unwrap_err().kind, ErrorKind::Config);
}

proptest! {
    #[test]
    fn ext_real_round_trips(v in prop_oneof![any::<f64>().prop_filter("no nan", |v| !v.is_nan()),
                                             Just(f64::INFINITY), Just(f64::NEG_INFINITY)]) {
        let text = serde_json::to_string(&ext_real(v)).unwrap();
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(parse_ext_real(&back), Some(v));
    }
}
