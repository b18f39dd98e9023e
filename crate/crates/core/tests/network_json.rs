//! Network descriptions survive JSON and compose to orthogonal matrices.

use cvqec_core::network::{compose, encoder_matrix, NetworkElement, NetworkSpec, Sign};
use proptest::prelude::*;

fn element() -> impl Strategy<Value = NetworkElement> {
    let t = prop::sample::select(vec![0.0, 0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0, 0.75, 1.0]);
    let pair = (1usize..=5, 1usize..=5).prop_filter("distinct modes", |(k, l)| k != l);
    prop_oneof![
        (pair.clone(), t, any::<bool>()).prop_map(|((k, l), t, plus)| {
            NetworkElement::beam_splitter(k, l, t, if plus { Sign::Plus } else { Sign::Minus })
        }),
        pair.prop_map(|(k, l)| NetworkElement::Swap { swap: [k, l] }),
    ]
}

#[test]
fn encoder_document() {
    let text = NetworkSpec::five_mode_encoder().to_json();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["elements"][0], serde_json::json!({"k": 2, "l": 3, "T": 0.25, "sign": "+"}));
    assert_eq!(compose(&NetworkSpec::from_json(&text).unwrap()).unwrap(), encoder_matrix());
    assert!(NetworkSpec::from_json(r#"{"elements": [], "extra": 1}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip_preserves_the_matrix(elements in prop::collection::vec(element(), 0..6)) {
        let spec = NetworkSpec { elements, fourier: vec![] };
        let back = NetworkSpec::from_json(&spec.to_json()).unwrap();
        prop_assert_eq!(&back, &spec);
        let m = compose(&back).unwrap();
        prop_assert!(m.is_orthogonal());
        prop_assert_eq!(m, compose(&spec).unwrap());
    }
}
