use fce_bench::cases::ScalingChoice;
use fce_bench::config::{
    merge, parse_axis, parse_colloc, parse_elements, parse_kind, parse_relative, parse_scaling, parse_values,
    parse_weights, ConfigFile,
};
use fce_bench::runner::Overrides;
use fce_bench::SweepAxis;
use fce_core::constraints::Enforcement;
use fce_core::field::FceKind;
use fce_core::solver::{CollocationKind, RowWeights};
use fce_core::Error;

#[test]
fn element_counts() {
    assert_eq!(parse_elements("4").unwrap(), (4, None));
    assert_eq!(parse_elements("8x2").unwrap(), (8, Some(2)));
    for bad in ["0", "x3", "4x", "a", "2x0"] {
        assert!(matches!(parse_elements(bad), Err(Error::Config(_))), "{bad}");
    }
}

#[test]
fn scaling_choices() {
    assert_eq!(parse_scaling("auto").unwrap(), ScalingChoice::Auto);
    assert_eq!(parse_scaling("none").unwrap(), ScalingChoice::None);
    match parse_scaling("16, 16, 4").unwrap() {
        ScalingChoice::Custom(s) => assert_eq!((s.sigma, s.sigma0, s.sigma1), (16.0, 16.0, 4.0)),
        other => panic!("{other:?}"),
    }
    assert!(parse_scaling("1,2").is_err());
    assert!(parse_scaling("1,-2,3").is_err());
}

#[test]
fn keyword_values() {
    assert_eq!(parse_kind("C0").unwrap(), FceKind::C0);
    assert_eq!(parse_kind("mixed-x").unwrap(), FceKind::MixedC1x);
    assert!(parse_kind("c2").is_err());
    assert_eq!(parse_colloc("uniform").unwrap(), CollocationKind::Uniform);
    assert!(parse_colloc("chebyshev").is_err());
    assert_eq!(parse_axis("p").unwrap(), SweepAxis::P);
    assert!(parse_axis("q").is_err());
    assert_eq!(parse_relative("approx").unwrap(), Enforcement::LeastSquares);
    assert!(parse_relative("maybe").is_err());
    assert_eq!(parse_weights("unit").unwrap(), RowWeights::Unit);
    assert!(parse_weights("heavy").is_err());
    assert_eq!(parse_values("2, 4,8").unwrap(), vec![2, 4, 8]);
    assert!(parse_values("2,four").is_err());
}

#[test]
fn config_file_overrides() {
    let file = ConfigFile::parse(
        "case = \"helmholtz2d\"\nfce = \"c0\"\nelements = \"8x8\"\norder = 6\ncolloc = \"uniform\"\nvalues = [2, 4]\n",
    )
    .unwrap();
    assert_eq!(file.case.as_deref(), Some("helmholtz2d"));
    assert_eq!(file.values, Some(vec![2, 4]));
    let o = file.overrides().unwrap();
    assert_eq!(o.kind, Some(FceKind::C0));
    assert_eq!((o.nx, o.ny, o.p), (Some(8), Some(8), Some(6)));
    assert_eq!(o.colloc, Some(CollocationKind::Uniform));
}

#[test]
fn config_file_rejects_unknown_keys_and_bad_values() {
    assert!(matches!(ConfigFile::parse("ordr = 3\n"), Err(Error::Config(_))));
    assert!(ConfigFile::parse("fce = \"c9\"\n").unwrap().overrides().is_err());
}

#[test]
fn flags_take_precedence_over_file() {
    let flags = Overrides { p: Some(4), ..Default::default() };
    let file = Overrides { p: Some(9), nx: Some(3), ..Default::default() };
    let m = merge(flags, file);
    assert_eq!((m.p, m.nx), (Some(4), Some(3)));
}
