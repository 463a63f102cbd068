use proptest::prelude::*;
use spqn_core::fock::{gaussian_unitary, GaussianParams};
use spqn_core::measurement::{LocalObservable, OnOffParams};
use spqn_core::optimizer::Bounds;
use spqn_core::reference::printed_optimum;
use spqn_core::scenario::*;
use spqn_core::{Complex64, Error, CLASSICAL_BOUND, TSIRELSON_BOUND};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn all_scenarios() -> Vec<Scenario> {
    ScenarioName::ALL
        .iter()
        .flat_map(|&n| Variant::ALL.iter().map(move |&v| Scenario::new(n, v)))
        .collect()
}

fn diag(a: f64, b: f64) -> LocalObservable {
    LocalObservable::explicit([[c(a, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(b, 0.0)]])
}

fn sigma_x() -> LocalObservable {
    LocalObservable::explicit([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
}

#[test]
fn source_state_is_a_density_matrix() {
    for p in [0.0, 0.3, 1.0] {
        let state = source_state(p).unwrap();
        assert!((state.trace() - c(1.0, 0.0)).norm() < 1e-15);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(state.rho[i][j], state.rho[j][i].conj());
            }
        }
    }
    assert!(source_state(1.5).is_err());
}

#[test]
fn correlation_examples() {
    let pure = source_state(1.0).unwrap();
    let z = diag(-1.0, 1.0);
    // One photon in exactly one mode: sigma_z outcomes always anticorrelate.
    assert!((correlation(&pure, &z, &z) + 1.0).abs() < 1e-15);
    assert!((correlation(&pure, &sigma_x(), &sigma_x()) - 1.0).abs() < 1e-15);
    let id = LocalObservable::identity();
    assert!((correlation(&pure, &id, &id) - 1.0).abs() < 1e-15);
    let vacuum = source_state(0.0).unwrap();
    assert!((correlation(&vacuum, &z, &z) - 1.0).abs() < 1e-15);
    assert!(correlation(&vacuum, &sigma_x(), &sigma_x()).abs() < 1e-15);
}

#[test]
fn chsh_examples() {
    assert_eq!(chsh_value(1.0, 1.0, 1.0, -1.0), 4.0);
    assert_eq!(chsh_value(-1.0, -1.0, -1.0, 1.0), 4.0);
    assert_eq!(chsh_value(0.5, 0.5, 0.5, 0.5), 1.0);
    let t = std::f64::consts::FRAC_1_SQRT_2;
    assert!((chsh_value(t, t, t, -t) - TSIRELSON_BOUND).abs() < 1e-15);
}

#[test]
fn catalog_names_round_trip() {
    for scenario in all_scenarios() {
        let back = Scenario::parse(scenario.name.name(), scenario.variant.name()).unwrap();
        assert_eq!(back, scenario);
    }
    assert!(matches!(
        Scenario::parse("5h", "sdo"),
        Err(Error::UnknownName { .. })
    ));
    assert!(matches!(
        Scenario::parse("0h", "sq"),
        Err(Error::UnknownName { .. })
    ));
}

#[test]
fn layout_lengths() {
    let len = |n, v| Scenario::new(n, v).param_len();
    assert_eq!(len(ScenarioName::TwoHomodyneMixed, Variant::Sdo), 14);
    assert_eq!(len(ScenarioName::ZeroHomodyne, Variant::Sdo), 16);
    assert_eq!(len(ScenarioName::ZeroHomodyne, Variant::Do), 8);
    assert_eq!(len(ScenarioName::ZeroHomodyne, Variant::SqueezeOnly), 8);
    assert_eq!(len(ScenarioName::FourHomodyne, Variant::Sdo), 12);
    for scenario in all_scenarios() {
        assert_eq!(scenario.param_labels().len(), scenario.param_len());
    }
    let labels = Scenario::new(ScenarioName::OneHomodyne, Variant::Do).param_labels();
    assert_eq!(
        labels[..5],
        [
            "A1.re_alpha",
            "A1.im_alpha",
            "A2.theta",
            "A2.center",
            "A2.width"
        ]
    );
}

#[test]
fn layout_errors() {
    let scenario = Scenario::new(ScenarioName::ZeroHomodyne, Variant::Do);
    assert!(matches!(
        scenario_evaluate(&scenario, &ParamVector(vec![0.0; 7]), 1.0, 1.0, 40),
        Err(Error::LayoutMismatch {
            expected: 8,
            found: 7
        })
    ));
    let mut bad = vec![0.1; 8];
    bad[3] = f64::NAN;
    assert!(scenario_evaluate(&scenario, &ParamVector(bad), 1.0, 1.0, 40).is_err());

    let onoff = SlotParams::onoff(c(0.1, 0.0), 0.0, 0.0);
    let hd = SlotParams::homodyne_bin(0.0, 0.0, 1.0);
    let mismatched = StructuredParams::from_slots([onoff, hd, onoff, onoff]);
    assert!(matches!(
        pack_params(&scenario, &mismatched),
        Err(Error::SlotMismatch { slot: "A2", .. })
    ));
    // Squeezing is not representable under displacement-only.
    let squeezed = StructuredParams::from_slots([SlotParams::onoff(c(0.1, 0.0), 0.2, 0.0); 4]);
    assert!(pack_params(&scenario, &squeezed).is_err());
}

#[test]
fn printed_zero_homodyne_optima() {
    for (variant, want) in [(Variant::Sdo, 2.782), (Variant::Do, 2.688)] {
        let scenario = Scenario::new(ScenarioName::ZeroHomodyne, variant);
        let printed = printed_optimum(&scenario).unwrap();
        let start = printed.warm_start().unwrap();
        let s = scenario_evaluate(&scenario, &start, 1.0, 1.0, 40).unwrap();
        assert!((s - want).abs() <= 1e-3, "{variant}: {s}");
    }
}

#[test]
fn vacuum_source_is_local() {
    let scenario = Scenario::new(ScenarioName::ZeroHomodyne, Variant::Sdo);
    let start = printed_optimum(&scenario).unwrap().warm_start().unwrap();
    let s = scenario_evaluate(&scenario, &start, 1.0, 0.0, 40).unwrap();
    assert!(s <= CLASSICAL_BOUND + 1e-12, "{s}");
}

/// Uniform points in the search box of a scenario drawn from the catalog.
fn scenario_and_params() -> impl Strategy<Value = (Scenario, ParamVector)> {
    (0..ScenarioName::ALL.len(), 0..Variant::ALL.len()).prop_flat_map(|(n, v)| {
        let scenario = Scenario::new(ScenarioName::ALL[n], Variant::ALL[v]);
        let intervals = Bounds::for_scenario(&scenario).intervals().to_vec();
        proptest::collection::vec(0.0..=1.0f64, scenario.param_len()).prop_map(move |u| {
            let x = u
                .iter()
                .zip(&intervals)
                .map(|(t, &(lo, hi))| lo + t * (hi - lo))
                .collect();
            (scenario, ParamVector(x))
        })
    })
}

/// `I - 2 U^dag Pi_0 U` as a full `dim x dim` dense matrix, top-left block.
fn dense_onoff_block(params: &OnOffParams, dim: usize) -> [[Complex64; 2]; 2] {
    let u = gaussian_unitary(&params.gauss, dim).unwrap();
    let mut block = [[c(0.0, 0.0); 2]; 2];
    for (m, row) in block.iter_mut().enumerate() {
        for (n, entry) in row.iter_mut().enumerate() {
            let mut weight = 1.0;
            let mut acc = c(0.0, 0.0);
            for k in 0..dim {
                acc += u[(k, m)].conj() * u[(k, n)] * weight;
                weight *= 1.0 - params.eta;
            }
            *entry = if m == n { c(1.0, 0.0) } else { c(0.0, 0.0) } - acc * 2.0;
        }
    }
    block
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn chsh_never_exceeds_tsirelson((scenario, x) in scenario_and_params(), eta in 0.05..=1.0f64, p in 0.0..=1.0f64) {
        let s = scenario_evaluate(&scenario, &x, eta, p, 40).unwrap();
        prop_assert!(s.is_finite());
        prop_assert!(s <= TSIRELSON_BOUND + 1e-9, "{}", s);
    }

    #[test]
    fn correlators_are_linear_in_p((scenario, x) in scenario_and_params(), eta in 0.05..=1.0f64, p in 0.0..=1.0f64) {
        let params = unpack_params(&scenario, &x).unwrap();
        let at = |p| evaluate_structured(&params, eta, p, 40).unwrap().correlations;
        let (mixed, pure, vacuum) = (at(p), at(1.0), at(0.0));
        for k in 0..4 {
            prop_assert!((mixed[k] - (p * pure[k] + (1.0 - p) * vacuum[k])).abs() <= 1e-12);
        }
    }

    #[test]
    fn swapping_parties_preserves_s((scenario, x) in scenario_and_params(), eta in 0.05..=1.0f64, p in 0.0..=1.0f64) {
        let params = unpack_params(&scenario, &x).unwrap();
        let swapped = StructuredParams::from_slots([params.b1, params.b2, params.a1, params.a2]);
        let s = evaluate_structured(&params, eta, p, 40).unwrap().s;
        let t = evaluate_structured(&swapped, eta, p, 40).unwrap().s;
        prop_assert!((s - t).abs() <= 1e-12);
    }

    #[test]
    fn pack_unpack_round_trip((scenario, x) in scenario_and_params()) {
        let structured = unpack_params(&scenario, &x).unwrap();
        prop_assert_eq!(pack_params(&scenario, &structured).unwrap(), x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn two_level_restriction_matches_full_space(
        re in -2.0..=2.0f64,
        im in -2.0..=2.0f64,
        r in -1.0..=1.0f64,
        phi in -3.1..3.1f64,
        eta in 0.05..=1.0f64,
    ) {
        let params = OnOffParams::new(GaussianParams::from_polar_squeezing(c(re, im), r, phi), eta).unwrap();
        let fast = SlotParams::onoff(c(re, im), r, phi).observable(eta, 40).unwrap();
        let full = dense_onoff_block(&params, 96);
        for (m, (a, b)) in fast.matrix.iter().zip(&full).enumerate() {
            for (n, (x, y)) in a.iter().zip(b).enumerate() {
                prop_assert!((x - y).norm() <= 1e-10, "({}, {})", m, n);
            }
        }
    }
}
