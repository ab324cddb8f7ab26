//! Alice-side guess of Bob's choice in the combined protocol.

use std::collections::BTreeMap;

use crate::bits::{reconstruct_xor, ChoiceBit};
use crate::classical_ot::{recover_choice, CyclicGroup, OtRequest, PublicKey};
use crate::error::{Error, Result};
use crate::netsim::{AdversaryView, Payload};
use crate::protocols::{COMBINED_SESSION_A, COMBINED_SESSION_B};
use crate::rng::Randomness;

/// Bob's shares of `cA` seen by the coalition, keyed by path.
pub fn visible_choice_shares(view: &AdversaryView) -> BTreeMap<usize, ChoiceBit> {
    view.entries
        .iter()
        .filter(|e| e.session == COMBINED_SESSION_A)
        .filter_map(|e| match e.payload {
            Payload::ChoiceShare { path, share } => Some((path, share)),
            _ => None,
        })
        .collect()
}

pub fn visible_request(view: &AdversaryView) -> Option<OtRequest> {
    view.entries.iter().find_map(|e| match e.payload {
        Payload::DdhRequest { public_key, choice } if e.session == COMBINED_SESSION_B => {
            Some(OtRequest { public_key: PublicKey(public_key), choice })
        }
        _ => None,
    })
}

/// `cA` from the shares (which must all be visible on `n` paths) plus `cB`
/// from breaking DDH. A group too large to brute-force leaves a coin flip
/// for `cB`.
pub fn combined_choice_guess(
    view: &AdversaryView,
    n: usize,
    group: &CyclicGroup,
    rng: &mut dyn Randomness,
) -> Result<ChoiceBit> {
    let shares = visible_choice_shares(view);
    let c_a = if shares.len() == n {
        reconstruct_xor(&shares.into_values().collect::<Vec<_>>())?
    } else {
        ChoiceBit::random(rng)
    };
    let c_b = match visible_request(view) {
        Some(request) => match recover_choice(group, &request) {
            Ok(c) => c,
            Err(Error::RefusesToBruteForce { .. }) => ChoiceBit::random(rng),
            Err(e) => return Err(e),
        },
        None => ChoiceBit::random(rng),
    };
    Ok(c_a.xor(c_b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitString;
    use crate::netsim::{fixtures, Controller, CorruptionSet};
    use crate::protocols::{run_combined, Network, PathOtInstance, Variant};
    use crate::rng::SeededRng;

    fn setup() -> (Network, CorruptionSet) {
        let (t, p) = fixtures::diamond().unwrap();
        let network = Network::new(t, p);
        let m = CorruptionSet::from_names(&network.topology, &["v1", "v2"], Controller::Alice).unwrap();
        (network, m)
    }

    #[test]
    fn broken_group_reveals_choice() {
        let (network, m) = setup();
        let group = CyclicGroup::toy();
        let mut rng = SeededRng::new(8);
        for c in ChoiceBit::both() {
            for _ in 0..10 {
                let inst = PathOtInstance::new(BitString::zeros(3).unwrap(), BitString::zeros(3).unwrap(), c, Variant::Protocol1)
                    .unwrap();
                let run = run_combined(&inst, &network, &m, &group, None, &mut rng).unwrap();
                assert_eq!(combined_choice_guess(&run.view, 2, &group, &mut rng).unwrap(), c);
            }
        }
    }

    #[test]
    fn large_group_refuses() {
        let (network, m) = setup();
        let group = CyclicGroup::large();
        let mut rng = SeededRng::new(8);
        let inst = PathOtInstance::new(BitString::zeros(2).unwrap(), BitString::zeros(2).unwrap(), ChoiceBit::ONE, Variant::Protocol1)
            .unwrap();
        let run = run_combined(&inst, &network, &m, &group, None, &mut rng).unwrap();
        let request = visible_request(&run.view).unwrap();
        assert!(matches!(recover_choice(&group, &request), Err(Error::RefusesToBruteForce { .. })));
        assert!(combined_choice_guess(&run.view, 2, &group, &mut rng).is_ok());
    }
}
