//! Classical oblivious transfer from additively homomorphic ElGamal.
//!
//! The receiver encrypts its choice `c` under its own key and sends
//! `E = Enc(c)`. For each message chunk the sender answers
//!
//! ```text
//! Z0 = Enc(m0) + r0 * E
//! Z1 = Enc(m1) + r1 * (Enc(1) - E)
//! ```
//!
//! with fresh uniform `r0, r1`. The chosen branch decrypts to `m_c`; the
//! other decrypts to `m + r * x` for some `x != 0`, which is uniform mod `q`
//! whatever `E` was. Sender privacy is therefore unconditional, while the
//! choice is hidden only as long as DDH holds in the group.
//!
//! Messages are split into chunks small enough to recover from the exponent
//! by exhaustive search.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bits::{BitString, ChoiceBit};
use crate::error::{Error, Result};
use crate::rng::Randomness;

/// Largest subgroup order the brute-force DDH solver accepts.
pub const BRUTE_FORCE_LIMIT: u64 = 1 << 20;

/// Widest message chunk carried by one ciphertext.
pub const MAX_CHUNK_BITS: usize = 8;

/// Prime-order subgroup of the integers mod a prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicGroup {
    pub p: u64,
    pub q: u64,
    pub g: u64,
}

impl CyclicGroup {
    pub fn new(p: u64, q: u64, g: u64) -> Result<Self> {
        if p >= 1 << 62 || !is_prime(p) || !is_prime(q) {
            return Err(Error::contract(format!("p={p} and q={q} must be primes below 2^62")));
        }
        if !(p - 1).is_multiple_of(q) {
            return Err(Error::contract(format!("q={q} does not divide p-1")));
        }
        let group = Self { p, q, g: g % p };
        if group.g <= 1 || group.pow(group.g, q) != 1 {
            return Err(Error::contract(format!("g={g} does not generate a subgroup of order {q}")));
        }
        Ok(group)
    }

    /// p = 23, q = 11, g = 2.
    pub fn toy() -> Self {
        Self { p: 23, q: 11, g: 2 }
    }

    /// p = 7, q = 3, g = 2. Small enough to enumerate whole protocol tapes.
    pub fn tiny() -> Self {
        Self { p: 7, q: 3, g: 2 }
    }

    /// Safe-prime group with q near 2^16.
    pub fn medium() -> Self {
        Self { p: 131_267, q: 65_633, g: 4 }
    }

    /// Safe-prime group with q near 2^30, beyond the brute-force limit.
    pub fn large() -> Self {
        Self { p: 2_147_483_783, q: 1_073_741_891, g: 4 }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, base: u64, exp: u64) -> u64 {
        let mut result = 1u64;
        let mut base = base % self.p;
        let mut exp = exp;
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        result
    }

    pub fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }

    pub fn gen_pow(&self, exp: u64) -> u64 {
        self.pow(self.g, exp % self.q)
    }

    pub fn is_element(&self, x: u64) -> bool {
        x != 0 && x < self.p && self.pow(x, self.q) == 1
    }

    /// Bits per message chunk: the widest `w <= 8` with `2^w <= q`.
    pub fn chunk_bits(&self) -> usize {
        let mut w = 0;
        while w < MAX_CHUNK_BITS && (1u64 << (w + 1)) <= self.q {
            w += 1;
        }
        w.max(1)
    }

    /// Discrete log of `x` base `g` by baby-step giant-step, or `None` when `x`
    /// is outside the subgroup.
    pub fn dlog(&self, x: u64) -> Option<u64> {
        if !self.is_element(x) {
            return None;
        }
        let m = (self.q as f64).sqrt().ceil() as u64;
        let mut baby = HashMap::with_capacity(m as usize);
        let mut cur = 1u64;
        for j in 0..m {
            baby.entry(cur).or_insert(j);
            cur = self.mul(cur, self.g);
        }
        let giant = self.inv(self.pow(self.g, m));
        let mut y = x;
        for i in 0..=m {
            if let Some(&j) = baby.get(&y) {
                return Some((i * m + j) % self.q);
            }
            y = self.mul(y, giant);
        }
        None
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// ElGamal ciphertext with the message in the exponent: `(g^y, g^m * h^y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Ciphertext {
    pub a: u64,
    pub b: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SecretKey(pub u64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PublicKey(pub u64);

pub fn keygen(group: &CyclicGroup, rng: &mut dyn Randomness) -> (PublicKey, SecretKey) {
    let sk = 1 + rng.below(group.q - 1);
    (PublicKey(group.gen_pow(sk)), SecretKey(sk))
}

pub fn encrypt_with(group: &CyclicGroup, pk: PublicKey, m: u64, y: u64) -> Ciphertext {
    Ciphertext { a: group.gen_pow(y), b: group.mul(group.gen_pow(m), group.pow(pk.0, y)) }
}

pub fn encrypt(group: &CyclicGroup, pk: PublicKey, m: u64, rng: &mut dyn Randomness) -> Ciphertext {
    let y = rng.below(group.q);
    encrypt_with(group, pk, m, y)
}

/// `g^m` for the plaintext `m`.
pub fn decrypt_element(group: &CyclicGroup, sk: SecretKey, ct: &Ciphertext) -> u64 {
    group.mul(ct.b, group.inv(group.pow(ct.a, sk.0)))
}

/// Recovers a plaintext below `bound` by exhaustive search.
pub fn decrypt(group: &CyclicGroup, sk: SecretKey, ct: &Ciphertext, bound: u64) -> Result<u64> {
    let target = decrypt_element(group, sk, ct);
    let mut cur = 1u64;
    for m in 0..bound.min(group.q) {
        if cur == target {
            return Ok(m);
        }
        cur = group.mul(cur, group.g);
    }
    Err(Error::DecryptionFailed { bound })
}

/// Homomorphic addition of plaintexts.
pub fn combine(group: &CyclicGroup, x: &Ciphertext, y: &Ciphertext) -> Ciphertext {
    Ciphertext { a: group.mul(x.a, y.a), b: group.mul(x.b, y.b) }
}

/// Homomorphic multiplication of the plaintext by `k`.
pub fn scalar(group: &CyclicGroup, x: &Ciphertext, k: u64) -> Ciphertext {
    Ciphertext { a: group.pow(x.a, k), b: group.pow(x.b, k) }
}

pub fn negate(group: &CyclicGroup, x: &Ciphertext) -> Ciphertext {
    Ciphertext { a: group.inv(x.a), b: group.inv(x.b) }
}

/// Receiver's first message.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OtRequest {
    pub public_key: PublicKey,
    pub choice: Ciphertext,
}

/// Sender's reply: one ciphertext per chunk for each branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OtResponse {
    pub z0: Vec<Ciphertext>,
    pub z1: Vec<Ciphertext>,
}

fn split_chunks(m: &BitString, width: usize) -> Vec<u64> {
    let mask = (1u64 << width) - 1;
    (0..m.len().div_ceil(width)).map(|i| (m.as_u64() >> (i * width)) & mask).collect()
}

fn join_chunks(chunks: &[u64], width: usize, len: usize) -> Result<BitString> {
    let value = chunks.iter().enumerate().fold(0u64, |acc, (i, c)| acc | (c << (i * width)));
    let mask = if len >= 64 { u64::MAX } else { (1u64 << len) - 1 };
    BitString::from_u64(value & mask, len)
}

/// Receiver state between its request and the sender's reply.
#[derive(Clone, Copy, Debug)]
pub struct DdhReceiver {
    group: CyclicGroup,
    sk: SecretKey,
    choice: ChoiceBit,
}

impl DdhReceiver {
    pub fn start(group: &CyclicGroup, choice: ChoiceBit, rng: &mut dyn Randomness) -> (Self, OtRequest) {
        let (pk, sk) = keygen(group, rng);
        let e = encrypt(group, pk, choice.value() as u64, rng);
        (Self { group: *group, sk, choice }, OtRequest { public_key: pk, choice: e })
    }

    pub fn finish(&self, response: &OtResponse, len: usize) -> Result<BitString> {
        let width = self.group.chunk_bits();
        let branch = if self.choice.value() { &response.z1 } else { &response.z0 };
        if branch.len() != len.div_ceil(width) {
            return Err(Error::contract("reply has the wrong number of chunks"));
        }
        let chunks = branch
            .iter()
            .map(|ct| decrypt(&self.group, self.sk, ct, 1 << width))
            .collect::<Result<Vec<_>>>()?;
        join_chunks(&chunks, width, len)
    }
}

/// Sender's reply to an arbitrary request. Works for malformed requests too.
pub fn respond(
    group: &CyclicGroup,
    request: &OtRequest,
    m0: &BitString,
    m1: &BitString,
    rng: &mut dyn Randomness,
) -> Result<OtResponse> {
    if m0.len() != m1.len() {
        return Err(Error::LengthMismatch { left: m0.len(), right: m1.len() });
    }
    let width = group.chunk_bits();
    let pk = request.public_key;
    let e = request.choice;
    let one_minus_e = combine(group, &Ciphertext { a: 1, b: group.g }, &negate(group, &e));
    let mut z0 = Vec::new();
    let mut z1 = Vec::new();
    for (c0, c1) in split_chunks(m0, width).into_iter().zip(split_chunks(m1, width)) {
        let enc0 = encrypt(group, pk, c0, rng);
        let r0 = rng.below(group.q);
        z0.push(combine(group, &enc0, &scalar(group, &e, r0)));
        let enc1 = encrypt(group, pk, c1, rng);
        let r1 = rng.below(group.q);
        z1.push(combine(group, &enc1, &scalar(group, &one_minus_e, r1)));
    }
    Ok(OtResponse { z0, z1 })
}

/// Both sides of the classical OT run locally.
pub fn run_ddh_ot(
    m0: &BitString,
    m1: &BitString,
    choice: ChoiceBit,
    group: &CyclicGroup,
    rng: &mut dyn Randomness,
) -> Result<BitString> {
    let (receiver, request) = DdhReceiver::start(group, choice, rng);
    let response = respond(group, &request, m0, m1, rng)?;
    receiver.finish(&response, m0.len())
}

/// Decides whether `(x, y, z) = (g^a, g^b, g^c)` has `c = a*b mod q`, by
/// brute-force discrete logs. Refuses groups above [`BRUTE_FORCE_LIMIT`].
pub fn ddh_solve_toy(group: &CyclicGroup, triple: (u64, u64, u64)) -> Result<bool> {
    if group.q > BRUTE_FORCE_LIMIT {
        return Err(Error::RefusesToBruteForce { order: group.q });
    }
    let (x, y, z) = triple;
    let log = |v: u64| group.dlog(v).ok_or_else(|| Error::contract(format!("{v} is not a group element")));
    let (a, b, c) = (log(x)?, log(y)?, log(z)?);
    Ok((a as u128 * b as u128 % group.q as u128) as u64 == c)
}

/// Dishonest sender's attack: `E = Enc(0)` exactly when `(g^y, h, h^y)` is a
/// Diffie-Hellman triple.
pub fn recover_choice(group: &CyclicGroup, request: &OtRequest) -> Result<ChoiceBit> {
    let e = request.choice;
    let is_zero = ddh_solve_toy(group, (e.a, request.public_key.0, e.b))?;
    Ok(ChoiceBit::new(!is_zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{enumerate_tapes, SeededRng, ENUMERATION_BOUND};
    use num_rational::BigRational;
    use std::collections::BTreeMap;

    #[test]
    fn group_validation() {
        assert!(CyclicGroup::new(23, 11, 2).is_ok());
        assert!(CyclicGroup::new(23, 7, 2).is_err());
        assert!(CyclicGroup::new(22, 11, 2).is_err());
        assert!(CyclicGroup::new(23, 11, 5).is_err());
        for g in [CyclicGroup::toy(), CyclicGroup::tiny(), CyclicGroup::medium(), CyclicGroup::large()] {
            assert_eq!(CyclicGroup::new(g.p, g.q, g.g).unwrap(), g);
        }
    }

    #[test]
    fn keygen_example() {
        let g = CyclicGroup::toy();
        assert_eq!(g.gen_pow(3), 8);
    }

    #[test]
    fn secret_key_is_uniform() {
        let g = CyclicGroup::toy();
        let leaves = enumerate_tapes(ENUMERATION_BOUND, |r| Ok(keygen(&g, r).1 .0)).unwrap();
        let mut dist: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (sk, p) in leaves {
            *dist.entry(sk).or_insert_with(|| BigRational::from_integer(0.into())) += p;
        }
        assert_eq!(dist.keys().copied().collect::<Vec<_>>(), (1..=10).collect::<Vec<_>>());
        assert!(dist.values().all(|p| *p == BigRational::new(1.into(), 10.into())));
    }

    #[test]
    fn encryption_round_trips_exhaustively() {
        let g = CyclicGroup::toy();
        for sk in 1..g.q {
            let pk = PublicKey(g.gen_pow(sk));
            for m in 0..g.q {
                for y in 0..g.q {
                    let ct = encrypt_with(&g, pk, m, y);
                    assert_eq!(decrypt(&g, SecretKey(sk), &ct, g.q).unwrap(), m);
                }
            }
        }
    }

    #[test]
    fn homomorphic_ops() {
        let g = CyclicGroup::toy();
        let (pk, sk) = keygen(&g, &mut SeededRng::new(3));
        let x = encrypt(&g, pk, 4, &mut SeededRng::new(1));
        let y = encrypt(&g, pk, 9, &mut SeededRng::new(2));
        assert_eq!(decrypt(&g, sk, &combine(&g, &x, &y), g.q).unwrap(), 2);
        assert_eq!(decrypt(&g, sk, &scalar(&g, &x, 3), g.q).unwrap(), 1);
        assert_eq!(decrypt(&g, sk, &negate(&g, &x), g.q).unwrap(), 7);
    }

    #[test]
    fn ot_picks_chosen_message() {
        let g = CyclicGroup::medium();
        let m0 = BitString::from_u64(5, 4).unwrap();
        let m1 = BitString::from_u64(9, 4).unwrap();
        let mut rng = SeededRng::new(11);
        assert_eq!(run_ddh_ot(&m0, &m1, ChoiceBit::ZERO, &g, &mut rng).unwrap(), m0);
        assert_eq!(run_ddh_ot(&m0, &m1, ChoiceBit::ONE, &g, &mut rng).unwrap(), m1);
    }

    #[test]
    fn long_messages_are_chunked() {
        let g = CyclicGroup::toy();
        assert_eq!(g.chunk_bits(), 3);
        assert_eq!(CyclicGroup::tiny().chunk_bits(), 1);
        assert_eq!(CyclicGroup::medium().chunk_bits(), 8);
        let m0 = BitString::from_u64(0xdead_beef, 32).unwrap();
        let m1 = BitString::from_u64(0x1234_5678, 32).unwrap();
        let mut rng = SeededRng::new(4);
        assert_eq!(run_ddh_ot(&m0, &m1, ChoiceBit::ONE, &g, &mut rng).unwrap(), m1);
        assert_eq!(run_ddh_ot(&m0, &m1, ChoiceBit::ZERO, &CyclicGroup::large(), &mut rng).unwrap(), m0);
    }

    #[test]
    fn ddh_examples() {
        let g = CyclicGroup::toy();
        let t = |a, b, c| (g.gen_pow(a), g.gen_pow(b), g.gen_pow(c));
        assert!(ddh_solve_toy(&g, t(2, 3, 6)).unwrap());
        assert!(!ddh_solve_toy(&g, t(2, 3, 5)).unwrap());
        assert!(matches!(
            ddh_solve_toy(&CyclicGroup::large(), (4, 4, 4)),
            Err(Error::RefusesToBruteForce { .. })
        ));
    }

    #[test]
    fn ddh_matches_definition_in_order_31_group() {
        // 311 = 10 * 31 + 1; 5^10 mod 311 generates the order-31 subgroup
        let p = 311;
        let g0 = (2..p).map(|h| CyclicGroup { p, q: 31, g: 0 }.pow(h, 10)).find(|&x| x != 1).unwrap();
        let g = CyclicGroup::new(p, 31, g0).unwrap();
        for a in 0..31 {
            for b in 0..31 {
                for c in 0..31 {
                    let triple = (g.gen_pow(a), g.gen_pow(b), g.gen_pow(c));
                    assert_eq!(ddh_solve_toy(&g, triple).unwrap(), (a * b) % 31 == c);
                }
            }
        }
    }

    #[test]
    fn dlog_round_trips() {
        for g in [CyclicGroup::toy(), CyclicGroup::medium()] {
            for e in [0, 1, 2, g.q - 1, g.q / 3] {
                assert_eq!(g.dlog(g.gen_pow(e)), Some(e));
            }
            assert_eq!(g.dlog(0), None);
        }
    }
}
