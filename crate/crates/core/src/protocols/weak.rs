//! Four-input, two-choice OT from one run of each protocol.

use crate::bits::{BitString, ChoiceBit};
use crate::error::{Error, Result};
use crate::netsim::{Adversary, AdversaryView, CorruptionSet, Transcript};
use crate::protocols::{run_session, Network, PathOtInstance, Variant};
use crate::rng::Randomness;

pub const WEAK_SESSION_P1: u32 = 0;
pub const WEAK_SESSION_P2: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeakOtInstance {
    /// `s[i][b]` is `s_ib`.
    pub s: [[BitString; 2]; 2],
    pub c: ChoiceBit,
    pub c_prime: ChoiceBit,
}

impl WeakOtInstance {
    pub fn new(s: [[BitString; 2]; 2], c: ChoiceBit, c_prime: ChoiceBit) -> Result<Self> {
        let ell = s[0][0].len();
        if let Some(bad) = s.iter().flatten().find(|x| x.len() != ell) {
            return Err(Error::LengthMismatch { left: ell, right: bad.len() });
        }
        Ok(Self { s, c, c_prime })
    }

    /// `(s_0c, s_1c')`.
    pub fn expected(&self) -> (BitString, BitString) {
        (self.s[0][self.c.as_index()], self.s[1][self.c_prime.as_index()])
    }
}

#[derive(Clone, Debug)]
pub struct WeakOtRun {
    pub outputs: (BitString, BitString),
    pub transcript: Transcript,
    pub view: AdversaryView,
}

/// Protocol 1 on `(s_00, s_01)` with `c` as session 0, then Protocol 2 on
/// `(s_10, s_11)` with `c'` as session 1.
pub fn run_weak_ot(
    instance: &WeakOtInstance,
    network: &Network,
    corruption: &CorruptionSet,
    mut adversary: Option<&mut dyn Adversary>,
    rng: &mut dyn Randomness,
) -> Result<WeakOtRun> {
    let [first, second] = instance.s;
    let p1 = PathOtInstance::new(first[0], first[1], instance.c, Variant::Protocol1)?;
    let p2 = PathOtInstance::new(second[0], second[1], instance.c_prime, Variant::Protocol2)?;
    let adv = adversary.as_mut().map(|a| &mut **a as &mut dyn Adversary);
    let run1 = run_session(&p1, network, corruption, adv, WEAK_SESSION_P1, rng)?;
    let adv = adversary.as_mut().map(|a| &mut **a as &mut dyn Adversary);
    let run2 = run_session(&p2, network, corruption, adv, WEAK_SESSION_P2, rng)?;
    let mut transcript = run1.transcript;
    transcript.append(run2.transcript);
    let view = AdversaryView::observe(&transcript, &corruption.coalition(&network.topology));
    Ok(WeakOtRun { outputs: (run1.bob_output, run2.bob_output), transcript, view })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netsim::fixtures;
    use crate::rng::{enumerate_tapes, ENUMERATION_BOUND};

    #[test]
    fn honest_bob_gets_two_of_four() {
        let (t, p) = fixtures::diamond().unwrap();
        let network = Network::new(t, p);
        let corruption = CorruptionSet::honest(&network.topology);
        let s = [["00".parse().unwrap(), "01".parse().unwrap()], ["10".parse().unwrap(), "11".parse().unwrap()]];
        for c in ChoiceBit::both() {
            for c_prime in ChoiceBit::both() {
                let inst = WeakOtInstance::new(s, c, c_prime).unwrap();
                let outs = enumerate_tapes(ENUMERATION_BOUND, |rng| {
                    run_weak_ot(&inst, &network, &corruption, None, rng).map(|r| r.outputs)
                })
                .unwrap();
                assert!(outs.iter().all(|(o, _)| *o == inst.expected()));
            }
        }
    }

    #[test]
    fn unequal_lengths_rejected() {
        let a: BitString = "0".parse().unwrap();
        let b: BitString = "00".parse().unwrap();
        assert!(WeakOtInstance::new([[a, a], [a, b]], ChoiceBit::ZERO, ChoiceBit::ZERO).is_err());
    }
}
