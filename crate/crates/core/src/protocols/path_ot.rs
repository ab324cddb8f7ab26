//! Node programs for the two path-OT protocols and their private-link variants.
//!
//! Protocol 1: Bob splits `c` into shares `c_j` and sends `c_j` to Alice's
//! neighbour `v_j` along path `j`. Alice picks keys `r_j` that XOR to zero
//! and runs link-OT with each `v_j` on
//!
//! ```text
//! j = 1:  (s0 + r_1,  s1 + r_1)
//! j > 1:  (r_j,       s0 + s1 + r_j)
//! ```
//!
//! `v_j` forwards its output to Bob, who XORs all of them into `s_c`.
//!
//! Protocol 2: Alice splits `s0` and `s1` into shares and sends the pair
//! `(s0_j, s1_j)` to Bob's neighbour `w_j` along path `j`; Bob runs link-OT
//! with every `w_j` on the same `c` and XORs the outputs.
//!
//! The private-link variants move the same messages over direct private
//! channels between the endpoint and its neighbour on each path.

use std::rc::Rc;

use crate::bits::{reconstruct_xor, share_xor, BitString, ChoiceBit};
use crate::error::Result;
use crate::netsim::{LocalValue, NodeId, NodeProgram, OtId, PathSet, Payload, RoundContext};
use crate::protocols::Variant;

/// Shared, read-only description of a run.
#[derive(Debug)]
pub(crate) struct Layout {
    pub paths: PathSet,
    pub alice: NodeId,
    pub bob: NodeId,
    pub ell: usize,
    pub variant: Variant,
}

impl Layout {
    fn n(&self) -> usize {
        self.paths.len()
    }

    fn private(&self) -> bool {
        matches!(self.variant, Variant::Hybrid1 | Variant::Hybrid2)
    }

    fn shares_choice(&self) -> bool {
        matches!(self.variant, Variant::Protocol1 | Variant::Hybrid1)
    }

    /// Bob to `v_j`, walking path `j` backwards.
    fn bob_to_first_hop(&self, j: usize) -> Vec<NodeId> {
        self.paths.path(j)[1..].iter().rev().cloned().collect()
    }

    /// `v_j` to Bob along path `j`.
    fn first_hop_to_bob(&self, j: usize) -> Vec<NodeId> {
        self.paths.path(j)[1..].to_vec()
    }

    /// Alice to `w_j` along path `j`.
    fn alice_to_last_hop(&self, j: usize) -> Vec<NodeId> {
        let p = self.paths.path(j);
        p[..p.len() - 1].to_vec()
    }

    fn ot_id(j: usize) -> OtId {
        j as OtId
    }

    fn path_of(&self, ot: OtId) -> Option<usize> {
        let j = ot as usize;
        (j < self.n()).then_some(j)
    }
}

pub(crate) struct AliceProgram {
    layout: Rc<Layout>,
    s0: BitString,
    s1: BitString,
}

impl AliceProgram {
    pub fn new(layout: Rc<Layout>, s0: BitString, s1: BitString) -> Self {
        Self { layout, s0, s1 }
    }
}

impl NodeProgram for AliceProgram {
    fn step(&mut self, ctx: &mut RoundContext<'_>) -> Result<()> {
        if ctx.round() != 0 {
            return Ok(());
        }
        let l = &*self.layout;
        ctx.record("s0", LocalValue::Bits(self.s0));
        ctx.record("s1", LocalValue::Bits(self.s1));
        if l.shares_choice() {
            let keys = share_xor(BitString::zeros(l.ell)?, l.n(), ctx.rng())?;
            let sum = self.s0.xor(&self.s1)?;
            for (j, r) in keys.iter().enumerate() {
                let (t0, t1) = if j == 0 { (self.s0.xor(r)?, self.s1.xor(r)?) } else { (*r, sum.xor(r)?) };
                ctx.ot_send(Layout::ot_id(j), l.paths.first_hop(j).clone(), t0, t1);
            }
        } else {
            let shares0 = share_xor(self.s0, l.n(), ctx.rng())?;
            let shares1 = share_xor(self.s1, l.n(), ctx.rng())?;
            for j in 0..l.n() {
                let w = l.paths.last_hop(j).clone();
                let (a, b) = (shares0[j], shares1[j]);
                if w == l.alice {
                    ctx.ot_send(Layout::ot_id(j), l.bob.clone(), a, b);
                } else if l.private() {
                    ctx.send_private(w, Payload::InputShares { path: j, s0: a, s1: b });
                } else {
                    ctx.send(l.alice_to_last_hop(j), Payload::InputShares { path: j, s0: a, s1: b });
                }
            }
        }
        Ok(())
    }
}

pub(crate) struct BobProgram {
    layout: Rc<Layout>,
    choice: ChoiceBit,
    received: Vec<Option<BitString>>,
    output: Option<BitString>,
}

impl BobProgram {
    pub fn new(layout: Rc<Layout>, choice: ChoiceBit) -> Self {
        let n = layout.n();
        Self { layout, choice, received: vec![None; n], output: None }
    }

    fn accept(&mut self, j: usize, value: BitString) {
        if self.received[j].is_none() {
            self.received[j] = Some(value.fit(self.layout.ell));
        }
    }
}

impl NodeProgram for BobProgram {
    fn step(&mut self, ctx: &mut RoundContext<'_>) -> Result<()> {
        let layout = Rc::clone(&self.layout);
        let l = &*layout;
        if ctx.round() == 0 {
            ctx.record("c", LocalValue::Choice(self.choice));
            if l.shares_choice() {
                let shares = share_xor(self.choice, l.n(), ctx.rng())?;
                for (j, share) in shares.into_iter().enumerate() {
                    let v = l.paths.first_hop(j).clone();
                    if v == l.bob {
                        ctx.ot_choose(Layout::ot_id(j), l.alice.clone(), share);
                    } else if l.private() {
                        ctx.send_private(v, Payload::ChoiceShare { path: j, share });
                    } else {
                        ctx.send(l.bob_to_first_hop(j), Payload::ChoiceShare { path: j, share });
                    }
                }
            } else {
                for j in 0..l.n() {
                    ctx.ot_choose(Layout::ot_id(j), l.paths.last_hop(j).clone(), self.choice);
                }
            }
        }
        let masked: Vec<(usize, BitString)> = ctx
            .inbox()
            .iter()
            .filter_map(|env| match env.payload {
                Payload::Masked { path, value } if path < l.n() => Some((path, value)),
                _ => None,
            })
            .collect();
        let from_ot: Vec<(usize, BitString)> =
            ctx.ot_outputs().iter().filter_map(|d| l.path_of(d.ot).map(|j| (j, d.value))).collect();
        for (j, v) in masked.into_iter().chain(from_ot) {
            self.accept(j, v);
        }
        if self.output.is_none() && self.received.iter().all(Option::is_some) {
            let parts: Vec<BitString> = self.received.iter().flatten().copied().collect();
            let out = reconstruct_xor(&parts)?;
            self.output = Some(out);
            ctx.record("output", LocalValue::Bits(out));
            ctx.output(out);
        }
        Ok(())
    }

    fn is_done(&self) -> bool {
        self.output.is_some()
    }
}

/// Any node on some path other than Alice and Bob.
pub(crate) struct IntermediaryProgram {
    layout: Rc<Layout>,
}

impl IntermediaryProgram {
    pub fn new(layout: Rc<Layout>) -> Self {
        Self { layout }
    }
}

impl NodeProgram for IntermediaryProgram {
    fn step(&mut self, ctx: &mut RoundContext<'_>) -> Result<()> {
        let layout = Rc::clone(&self.layout);
        let l = &*layout;
        let me = ctx.me().clone();
        let inbox: Vec<Payload> = ctx.inbox().iter().map(|e| e.payload.clone()).collect();
        for payload in inbox {
            match payload {
                Payload::ChoiceShare { path, share } if path < l.n() && *l.paths.first_hop(path) == me => {
                    ctx.ot_choose(Layout::ot_id(path), l.alice.clone(), share);
                }
                Payload::InputShares { path, s0, s1 } if path < l.n() && *l.paths.last_hop(path) == me => {
                    ctx.ot_send(Layout::ot_id(path), l.bob.clone(), s0.fit(l.ell), s1.fit(l.ell));
                }
                _ => {}
            }
        }
        let outputs: Vec<(usize, BitString)> =
            ctx.ot_outputs().iter().filter_map(|d| l.path_of(d.ot).map(|j| (j, d.value))).collect();
        for (j, value) in outputs {
            if l.shares_choice() && *l.paths.first_hop(j) == me {
                let payload = Payload::Masked { path: j, value };
                if l.private() {
                    ctx.send_private(l.bob.clone(), payload);
                } else {
                    ctx.send(l.first_hop_to_bob(j), payload);
                }
            }
        }
        Ok(())
    }
}
