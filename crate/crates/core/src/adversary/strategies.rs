//! Adversary programs for coalition nodes.

use std::collections::BTreeSet;

use crate::bits::ChoiceBit;
use crate::error::Result;
use crate::netsim::{Action, Adversary, Envelope, Payload, RoundContext};

/// Passive: corrupted nodes follow the protocol and only observe.
#[derive(Clone, Copy, Debug, Default)]
pub struct Passive;

impl Adversary for Passive {
    fn intervene(&mut self, _ctx: &mut RoundContext<'_>) -> Result<()> {
        Ok(())
    }
}

/// Every link-OT choice made by the coalition for `ot = j` becomes `d[j]`.
#[derive(Clone, Debug)]
pub struct ChoiceVector {
    pub d: Vec<ChoiceBit>,
    /// Only this session, if set.
    pub session: Option<u32>,
}

impl ChoiceVector {
    pub fn new(d: Vec<ChoiceBit>) -> Self {
        Self { d, session: None }
    }

    pub fn for_session(d: Vec<ChoiceBit>, session: u32) -> Self {
        Self { d, session: Some(session) }
    }

    /// All `2^n` vectors, in binary counting order.
    pub fn all(n: usize) -> Vec<Vec<ChoiceBit>> {
        (0..1u32 << n).map(|x| (0..n).map(|j| ChoiceBit::new(x >> j & 1 == 1)).collect()).collect()
    }
}

impl Adversary for ChoiceVector {
    fn intervene(&mut self, ctx: &mut RoundContext<'_>) -> Result<()> {
        if self.session.is_some_and(|s| s != ctx.session()) {
            return Ok(());
        }
        for action in ctx.actions_mut() {
            if let Action::OtChoose { ot, choice, .. } = action {
                if let Some(d) = self.d.get(*ot as usize) {
                    *choice = *d;
                }
            }
        }
        Ok(())
    }
}

/// Several adversaries, applied in order.
#[derive(Default)]
pub struct Stacked<'a> {
    pub parts: Vec<Box<dyn Adversary + 'a>>,
}

impl<'a> Stacked<'a> {
    pub fn new(parts: Vec<Box<dyn Adversary + 'a>>) -> Self {
        Self { parts }
    }
}

impl Adversary for Stacked<'_> {
    fn intervene(&mut self, ctx: &mut RoundContext<'_>) -> Result<()> {
        for part in &mut self.parts {
            part.intervene(ctx)?;
        }
        Ok(())
    }
}

fn touch_payload(ctx: &mut RoundContext<'_>, mut f: impl FnMut(&mut Payload) -> bool) -> bool {
    let mut hit = false;
    for env in ctx.relays_mut().iter_mut() {
        hit = hit || f(&mut env.payload);
    }
    if !hit {
        for action in ctx.actions_mut() {
            if let Action::Send(Envelope { payload, .. }) = action {
                if f(payload) {
                    hit = true;
                    break;
                }
            }
        }
    }
    hit
}

/// Flips Bob's share `c_j` once per session, either in transit or as the
/// choice of the link-OT it feeds.
#[derive(Clone, Debug)]
pub struct FlipChoiceShare {
    pub path: usize,
    /// Sessions to attack; `None` attacks all of them.
    pub sessions: Option<BTreeSet<u32>>,
    done: BTreeSet<u32>,
}

impl FlipChoiceShare {
    pub fn always(path: usize) -> Self {
        Self { path, sessions: None, done: BTreeSet::new() }
    }

    pub fn in_sessions(path: usize, sessions: impl IntoIterator<Item = u32>) -> Self {
        Self { path, sessions: Some(sessions.into_iter().collect()), done: BTreeSet::new() }
    }
}

impl Adversary for FlipChoiceShare {
    fn intervene(&mut self, ctx: &mut RoundContext<'_>) -> Result<()> {
        let session = ctx.session();
        if self.done.contains(&session) || self.sessions.as_ref().is_some_and(|s| !s.contains(&session)) {
            return Ok(());
        }
        let path = self.path;
        let mut hit = touch_payload(ctx, |p| match p {
            Payload::ChoiceShare { path: j, share } if *j == path => {
                *share = share.flipped();
                true
            }
            _ => false,
        });
        if !hit {
            for action in ctx.actions_mut() {
                if let Action::OtChoose { ot, choice, .. } = action {
                    if *ot as usize == path {
                        *choice = choice.flipped();
                        hit = true;
                        break;
                    }
                }
            }
        }
        if hit {
            self.done.insert(session);
        }
        Ok(())
    }
}

/// XORs `mask` into the forwarded link-OT output of path `j`, once per session.
#[derive(Clone, Debug)]
pub struct FlipMasked {
    pub path: usize,
    pub mask: u64,
    pub sessions: Option<BTreeSet<u32>>,
    done: BTreeSet<u32>,
}

impl FlipMasked {
    pub fn always(path: usize, mask: u64) -> Self {
        Self { path, mask, sessions: None, done: BTreeSet::new() }
    }

    pub fn in_sessions(path: usize, mask: u64, sessions: impl IntoIterator<Item = u32>) -> Self {
        Self { path, mask, sessions: Some(sessions.into_iter().collect()), done: BTreeSet::new() }
    }
}

impl Adversary for FlipMasked {
    fn intervene(&mut self, ctx: &mut RoundContext<'_>) -> Result<()> {
        let session = ctx.session();
        if self.done.contains(&session) || self.sessions.as_ref().is_some_and(|s| !s.contains(&session)) {
            return Ok(());
        }
        let (path, mask) = (self.path, self.mask);
        let hit = touch_payload(ctx, |p| match p {
            Payload::Masked { path: j, value } if *j == path => {
                *value = value.flip(mask);
                true
            }
            _ => false,
        });
        if hit {
            self.done.insert(session);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitString;
    use crate::netsim::{fixtures, Controller, CorruptionSet};
    use crate::protocols::{run_path_ot, Network, PathOtInstance, Variant};
    use crate::rng::SeededRng;

    #[test]
    fn all_choice_vectors() {
        let all = ChoiceVector::all(2);
        assert_eq!(all.len(), 4);
        assert_eq!(all[1], vec![ChoiceBit::ONE, ChoiceBit::ZERO]);
    }

    #[test]
    fn flip_masked_shifts_output() {
        let (t, p) = fixtures::line().unwrap();
        let network = Network::new(t, p);
        let corruption = CorruptionSet::from_names(&network.topology, &["v"], Controller::Independent).unwrap();
        let inst =
            PathOtInstance::new("101".parse().unwrap(), "110".parse().unwrap(), ChoiceBit::ZERO, Variant::Protocol1)
                .unwrap();
        let mut adv = FlipMasked::always(0, 0b011);
        let run = run_path_ot(&inst, &network, &corruption, Some(&mut adv), &mut SeededRng::new(1)).unwrap();
        assert_eq!(run.bob_output, "110".parse::<BitString>().unwrap());
    }

    #[test]
    fn flip_happens_once_per_session_on_a_long_path() {
        let (t, p) = fixtures::three_path().unwrap();
        let network = Network::new(t, p);
        // both u2 and v2 sit on path 1
        let corruption = CorruptionSet::from_names(&network.topology, &["u2", "v2"], Controller::Independent).unwrap();
        let inst = PathOtInstance::new("0".parse().unwrap(), "1".parse().unwrap(), ChoiceBit::ZERO, Variant::Protocol1)
            .unwrap();
        let mut adv = FlipChoiceShare::always(1);
        let run = run_path_ot(&inst, &network, &corruption, Some(&mut adv), &mut SeededRng::new(4)).unwrap();
        assert_eq!(run.bob_output, "1".parse::<BitString>().unwrap());
    }
}
