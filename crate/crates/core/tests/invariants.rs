use aoi_core::model::{Decision, DeliveryKind, GenerationMode, Network, SourceParams};
use proptest::prelude::*;

fn arb_params() -> impl Strategy<Value = Vec<SourceParams>> {
    prop::collection::vec((0.1f64..10.0, 0.05f64..=1.0, 1u32..=12), 1..6).prop_map(|v| {
        v.into_iter().map(|(a, p, l)| SourceParams::new(a, p, l).unwrap()).collect()
    })
}

fn arb_mode() -> impl Strategy<Value = GenerationMode> {
    prop_oneof![Just(GenerationMode::Refresh), Just(GenerationMode::HoldUntilDelivery)]
}

/// Random decisions and channel draws; `None` is idle.
fn arb_trace() -> impl Strategy<Value = Vec<(Option<usize>, bool)>> {
    prop::collection::vec((prop::option::weighted(0.9, 0usize..6), any::<bool>()), 1..400)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn state_invariants_hold_along_any_trace(params in arb_params(), mode in arb_mode(), trace in arb_trace()) {
        let n = params.len();
        let q_bar = vec![0.1; n];
        let mut net = Network::init_state(&params).unwrap();
        for (slot, (pick, on)) in trace.into_iter().enumerate() {
            let decision = pick.map_or(Decision::Idle, |i| Decision::Transmit(i % n));
            let before = net.states().to_vec();
            let event = net.advance_slot(decision, on, mode, &q_bar).unwrap();
            net.check_invariants().unwrap();
            prop_assert_eq!(net.slot(), slot as u64 + 2);

            for (i, (b, a)) in before.iter().zip(net.states()).enumerate() {
                let len = params[i].len;
                let delivered = event.is_some_and(|e| e.source == i);
                prop_assert!(a.h >= 1);
                let d = if delivered { 1.0 } else { 0.0 };
                prop_assert!((a.x_debt - (b.x_debt + 0.1 - d)).abs() < 1e-9);
                if delivered && b.l_rem == 1 {
                    prop_assert_eq!(a.h, b.z + 1);
                    prop_assert_eq!(a.z, 1);
                    prop_assert_eq!(a.l_rem, len);
                } else if delivered {
                    prop_assert_eq!((a.h, a.z, a.l_rem), (b.h + 1, b.z + 1, b.l_rem - 1));
                } else {
                    prop_assert_eq!(a.h, b.h + 1);
                    prop_assert_eq!(a.l_rem, b.l_rem);
                    let fresh = mode == GenerationMode::Refresh && b.l_rem == len;
                    prop_assert_eq!(a.z, if fresh { 1 } else { b.z + 1 });
                }
            }
        }
    }

    #[test]
    fn at_most_one_delivery_and_only_when_scheduled_and_on(params in arb_params(), trace in arb_trace()) {
        let n = params.len();
        let mut net = Network::init_state(&params).unwrap();
        for (pick, on) in trace {
            let decision = pick.map_or(Decision::Idle, |i| Decision::Transmit(i % n));
            let event = net.advance_slot(decision, on, GenerationMode::Refresh, &vec![0.0; n]).unwrap();
            match (decision, event) {
                (Decision::Transmit(i), Some(e)) => {
                    prop_assert!(on);
                    prop_assert_eq!(e.source, i);
                }
                (Decision::Transmit(_), None) => prop_assert!(!on),
                (Decision::Idle, e) => prop_assert!(e.is_none()),
            }
        }
    }

    #[test]
    fn completions_follow_first_and_mid_packets(len in 1u32..10, k in 1usize..40) {
        let params = vec![SourceParams::new(1.0, 1.0, len).unwrap()];
        let mut net = Network::init_state(&params).unwrap();
        let mut kinds = Vec::new();
        for _ in 0..k {
            let e = net.advance_slot(Decision::Transmit(0), true, GenerationMode::Refresh, &[0.0]).unwrap();
            kinds.push(e.unwrap().kind);
        }
        for (j, kind) in kinds.iter().enumerate() {
            let pos = j as u32 % len;
            let expected = if pos + 1 == len {
                DeliveryKind::UpdateComplete
            } else if pos == 0 {
                DeliveryKind::FirstPacket
            } else {
                DeliveryKind::MidPacket
            };
            prop_assert_eq!(*kind, expected);
        }
    }
}

#[test]
fn out_of_range_source_is_rejected() {
    let params = vec![SourceParams::new(1.0, 0.5, 2).unwrap()];
    let mut net = Network::init_state(&params).unwrap();
    assert!(net.advance_slot(Decision::Transmit(1), true, GenerationMode::Refresh, &[0.0]).is_err());
    assert!(net.advance_slot(Decision::Idle, true, GenerationMode::Refresh, &[]).is_err());
}
