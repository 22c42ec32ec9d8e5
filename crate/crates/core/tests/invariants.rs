use proptest::prelude::*;

use dgmt::harness::{budget_audit, run_trial, MeanMode, PopulationConfig, ProtocolKind};
use dgmt::UserSpec;

fn protocol() -> impl Strategy<Value = ProtocolKind> {
    prop_oneof![
        Just(ProtocolKind::Private),
        Just(ProtocolKind::Limited),
        Just(ProtocolKind::HeteroSamples),
        Just(ProtocolKind::HeteroComm),
        Just(ProtocolKind::MixAndMatch),
    ]
}

fn mode() -> impl Strategy<Value = MeanMode> {
    (0..MeanMode::ALL.len()).prop_map(|i| MeanMode::ALL[i])
}

/// Small populations that every protocol can run: uniform budgets for the
/// protocols that need them, mixed ones otherwise.
fn config() -> impl Strategy<Value = PopulationConfig> {
    (protocol(), 1usize..=20, 0usize..=120, 40usize..=120, 0.2f64..=1.0, any::<bool>()).prop_map(
        |(protocol, d, s, n, epsilon, mixed)| {
            let users = (0..n)
                .map(|k| match protocol {
                    ProtocolKind::Private | ProtocolKind::Limited => UserSpec { m: 1, ell: 4 },
                    ProtocolKind::HeteroSamples => UserSpec { m: [7, 14, 28][k % 3], ell: 28 },
                    ProtocolKind::HeteroComm => UserSpec { m: 1, ell: if mixed { [8, 16, 32][k % 3] } else { 16 } },
                    ProtocolKind::MixAndMatch => UserSpec { m: [7, 14][k % 2], ell: if mixed { [8, 16, 32][k % 3] } else { 16 } },
                })
                .collect();
            PopulationConfig::new(d, epsilon, s, protocol, users)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn runs_respect_budgets_and_replay(c in config(), mode in mode(), seed in any::<u64>(), trial in 0usize..1000) {
        match run_trial(&c, mode, seed, trial) {
            Ok(out) => {
                prop_assert_eq!(budget_audit(&out.transcript, &c), Ok(()));
                prop_assert!(out.transcript.public_bits_used <= c.s);
                prop_assert!(out.transcript.bits_sent.iter().zip(&c.users).all(|(&b, u)| b <= u.ell));
                prop_assert_eq!(run_trial(&c, mode, seed, trial).unwrap(), out);
            }
            Err(e) => prop_assert!(e.is_infeasible(), "{e}"),
        }
    }

    #[test]
    fn transcript_bytes_round_trip(c in config(), seed in any::<u64>()) {
        if let Ok(out) = run_trial(&c, MeanMode::Spread, seed, 0) {
            let bytes = out.transcript.to_bytes();
            prop_assert_eq!(dgmt::Transcript::from_bytes(&bytes).unwrap(), out.transcript);
        }
    }
}
