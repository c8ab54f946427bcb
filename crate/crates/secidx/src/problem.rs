//! Index coding problem instances, key profiles, and rate vectors.
//!
//! Instances are unicast: receiver `i` wants exactly `M_i` and holds a
//! subset of the other messages as side information. Files use 1-based
//! receiver indices (matching the usual `[t]` notation); everything in
//! memory is 0-based.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::field::is_supported_prime;
use crate::{Error, Result};

/// An index coding instance: `t` receivers over GF(p), receiver `i` wants a
/// message of `msg_len[i]` field symbols and knows the messages in
/// `side_info[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    t: usize,
    p: u16,
    side_info: Vec<BTreeSet<usize>>,
    msg_len: Vec<usize>,
}

impl Instance {
    /// Validates and builds an instance from 0-based side information sets.
    pub fn new(p: u16, side_info: Vec<BTreeSet<usize>>, msg_len: Vec<usize>) -> Result<Self> {
        let t = side_info.len();
        if msg_len.len() != t {
            return Err(Error::InvalidInstance(format!(
                "side_info has {t} receivers but msg_len has {}",
                msg_len.len()
            )));
        }
        if !is_supported_prime(p as u32) {
            return Err(Error::InvalidModulus(p as u64));
        }
        for (i, s) in side_info.iter().enumerate() {
            if s.contains(&i) {
                return Err(Error::InvalidInstance(format!(
                    "receiver {} lists its own message as side information",
                    i + 1
                )));
            }
            if let Some(&j) = s.iter().find(|&&j| j >= t) {
                return Err(Error::InvalidInstance(format!(
                    "receiver {} has side information index {} out of range 1..={t}",
                    i + 1,
                    j + 1
                )));
            }
        }
        Ok(Instance {
            t,
            p,
            side_info,
            msg_len,
        })
    }

    pub fn receivers(&self) -> usize {
        self.t
    }

    pub fn modulus(&self) -> u16 {
        self.p
    }

    pub fn side_info(&self, i: usize) -> &BTreeSet<usize> {
        &self.side_info[i]
    }

    pub fn msg_len(&self, i: usize) -> usize {
        self.msg_len[i]
    }

    pub fn msg_lens(&self) -> &[usize] {
        &self.msg_len
    }

    /// Total message symbols across all receivers.
    pub fn total_msg_len(&self) -> usize {
        self.msg_len.iter().sum()
    }

    /// Start offset of `M_i` in the concatenated message coordinate space
    /// `M_1 .. M_t`.
    pub fn msg_offset(&self, i: usize) -> usize {
        self.msg_len[..i].iter().sum()
    }

    /// Same side-information structure with different message lengths.
    pub fn with_msg_lens(&self, msg_len: Vec<usize>) -> Result<Instance> {
        Instance::new(self.p, self.side_info.clone(), msg_len)
    }

    /// Parses the documented JSON instance format.
    pub fn parse(text: &str) -> Result<Instance> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("instance: {e}")))?;
        file.into_instance()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceFile::from(self)).expect("instance serializes")
    }
}

/// Wire format for instances. Side-information indices are 1-based here.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    t: usize,
    p: u16,
    side_info: Vec<Vec<usize>>,
    msg_len: Vec<usize>,
}

impl InstanceFile {
    fn into_instance(self) -> Result<Instance> {
        if self.side_info.len() != self.t {
            return Err(Error::InvalidInstance(format!(
                "t = {} but side_info lists {} receivers",
                self.t,
                self.side_info.len()
            )));
        }
        let mut sets = Vec::with_capacity(self.t);
        for (i, entries) in self.side_info.iter().enumerate() {
            let mut set = BTreeSet::new();
            for &j in entries {
                if j == 0 || j > self.t {
                    return Err(Error::InvalidInstance(format!(
                        "receiver {} has side information index {j} out of range 1..={}",
                        i + 1,
                        self.t
                    )));
                }
                if j == i + 1 {
                    return Err(Error::InvalidInstance(format!(
                        "receiver {} lists its own message as side information",
                        i + 1
                    )));
                }
                set.insert(j - 1);
            }
            sets.push(set);
        }
        Instance::new(self.p, sets, self.msg_len)
    }
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        InstanceFile {
            t: inst.t,
            p: inst.p,
            side_info: inst
                .side_info
                .iter()
                .map(|s| s.iter().map(|&j| j + 1).collect())
                .collect(),
            msg_len: inst.msg_len.clone(),
        }
    }
}

/// Key lengths in field symbols: one common key, one private key per
/// receiver, plus encoder-private randomness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyProfile {
    pub l_k: usize,
    pub l_ki: Vec<usize>,
    pub l_w: usize,
}

impl KeyProfile {
    pub fn new(l_k: usize, l_ki: Vec<usize>, l_w: usize) -> Self {
        KeyProfile { l_k, l_ki, l_w }
    }

    /// All-zero profile for `t` receivers (a conventional code).
    pub fn none(t: usize) -> Self {
        KeyProfile {
            l_k: 0,
            l_ki: vec![0; t],
            l_w: 0,
        }
    }

    pub fn total_key_len(&self) -> usize {
        self.l_k + self.l_ki.iter().sum::<usize>() + self.l_w
    }

    pub fn parse(text: &str) -> Result<KeyProfile> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("key profile: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("key profile serializes")
    }

    fn check_t(&self, t: usize) -> Result<()> {
        if self.l_ki.len() != t {
            return Err(Error::InvalidInstance(format!(
                "key profile has {} private keys for {t} receivers",
                self.l_ki.len()
            )));
        }
        Ok(())
    }
}

/// Exact rational rate vector `(r_1..r_t, r_k, r_{k_1}..r_{k_t})`: message
/// and key sizes normalized by the public code length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateVector {
    pub msg: Vec<BigRational>,
    pub common_key: BigRational,
    pub private_keys: Vec<BigRational>,
}

impl RateVector {
    /// Flattened paper ordering: r_1..r_t, r_k, r_{k_1}..r_{k_t}.
    pub fn components(&self) -> Vec<BigRational> {
        let mut out = self.msg.clone();
        out.push(self.common_key.clone());
        out.extend(self.private_keys.iter().cloned());
        out
    }

    /// Parses a comma-separated list `r_1,..,r_t,r_k,r_k1,..,r_kt` of
    /// integers or `a/b` fractions.
    pub fn parse(text: &str, t: usize) -> Result<RateVector> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != 2 * t + 1 {
            return Err(Error::Parse(format!(
                "rate vector needs {} components (r_1..r_{t}, r_k, r_k1..r_k{t}), got {}",
                2 * t + 1,
                parts.len()
            )));
        }
        let vals = parts
            .iter()
            .map(|s| parse_ratio(s))
            .collect::<Result<Vec<_>>>()?;
        for v in &vals {
            if v.is_negative() {
                return Err(Error::Parse("rates must be nonnegative".into()));
            }
        }
        Ok(RateVector {
            msg: vals[..t].to_vec(),
            common_key: vals[t].clone(),
            private_keys: vals[t + 1..].to_vec(),
        })
    }
}

impl fmt::Display for RateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components().iter().map(ratio_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Rates of a code with the given message/key lengths and public length `l`.
pub fn rate_of(instance: &Instance, keys: &KeyProfile, code_len: usize) -> Result<RateVector> {
    keys.check_t(instance.receivers())?;
    if code_len == 0 {
        return Err(Error::InvalidInstance(
            "rate vector undefined for a zero-length code".into(),
        ));
    }
    let l = BigInt::from(code_len);
    let ratio = |n: usize| BigRational::new(BigInt::from(n), l.clone());
    Ok(RateVector {
        msg: instance.msg_len.iter().map(|&n| ratio(n)).collect(),
        common_key: ratio(keys.l_k),
        private_keys: keys.l_ki.iter().map(|&n| ratio(n)).collect(),
    })
}

/// Formats a rational as `a/b`, or just `a` when the denominator is one.
pub fn ratio_string(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `a` or `a/b` into an exact rational.
pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let mk_err = || Error::Parse(format!("bad rational '{s}'"));
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().map_err(|_| mk_err())?;
            Ok(BigRational::from_integer(n))
        }
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().map_err(|_| mk_err())?;
            let d: BigInt = den.trim().parse().map_err(|_| mk_err())?;
            if d.is_zero() {
                return Err(mk_err());
            }
            Ok(BigRational::new(n, d))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    pub(crate) fn xor_instance() -> Instance {
        Instance::parse(r#"{"t":2,"p":2,"side_info":[[2],[1]],"msg_len":[1,1]}"#).unwrap()
    }

    #[test]
    fn parses_two_receiver_xor_instance() {
        let inst = xor_instance();
        assert_eq!(inst.receivers(), 2);
        assert_eq!(inst.modulus(), 2);
        assert!(inst.side_info(0).contains(&1));
        assert!(inst.side_info(1).contains(&0));
    }

    #[test]
    fn rejects_self_loop() {
        let err = Instance::parse(r#"{"t":1,"p":2,"side_info":[[1]],"msg_len":[1]}"#).unwrap_err();
        assert!(err.to_string().contains("its own message"), "{err}");
    }

    #[test]
    fn rejects_out_of_range_index() {
        let err =
            Instance::parse(r#"{"t":2,"p":2,"side_info":[[3],[1]],"msg_len":[1,1]}"#).unwrap_err();
        assert!(err.to_string().contains("out of range"), "{err}");
    }

    #[test]
    fn rejects_malformed_json_and_unknown_fields() {
        assert!(matches!(Instance::parse("{"), Err(Error::Parse(_))));
        // groupcast-style inputs with demand lists are not representable
        let err = Instance::parse(
            r#"{"t":2,"p":2,"side_info":[[2],[1]],"msg_len":[1,1],"wants":[[1],[2]]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("wants"), "{err}");
    }

    #[test]
    fn rejects_composite_modulus() {
        let err = Instance::parse(r#"{"t":1,"p":4,"side_info":[[]],"msg_len":[1]}"#).unwrap_err();
        assert!(matches!(err, Error::InvalidModulus(4)));
    }

    #[test]
    fn accepts_three_cycle() {
        let inst = Instance::parse(r#"{"t":3,"p":2,"side_info":[[3],[1],[2]],"msg_len":[1,1,1]}"#)
            .unwrap();
        assert_eq!(inst.receivers(), 3);
        assert_eq!(inst.side_info(0).iter().collect::<Vec<_>>(), vec![&2]);
    }

    #[test]
    fn rate_of_shannon_pad_shape() {
        let inst = Instance::parse(r#"{"t":1,"p":2,"side_info":[[]],"msg_len":[3]}"#).unwrap();
        let keys = KeyProfile::new(3, vec![0], 0);
        let r = rate_of(&inst, &keys, 3).unwrap();
        assert!(r.msg[0].is_one());
        assert!(r.common_key.is_one());
        assert!(r.private_keys[0].is_zero());
    }

    #[test]
    fn rate_of_direct_ratios() {
        let inst = xor_instance();
        let keys = KeyProfile::new(1, vec![0, 0], 0);
        let r = rate_of(&inst, &keys, 1).unwrap();
        assert_eq!(r.to_string(), "(1, 1, 1, 0, 0)");

        let inst2 =
            Instance::parse(r#"{"t":2,"p":2,"side_info":[[2],[1]],"msg_len":[2,1]}"#).unwrap();
        let r2 = rate_of(&inst2, &KeyProfile::none(2), 2).unwrap();
        assert_eq!(r2.to_string(), "(1, 1/2, 0, 0, 0)");
    }

    #[test]
    fn rate_of_rejects_zero_length() {
        let inst = xor_instance();
        assert!(rate_of(&inst, &KeyProfile::none(2), 0).is_err());
    }

    #[test]
    fn rate_vector_parsing() {
        let r = RateVector::parse("1, 1/2, 1, 0, 0", 2).unwrap();
        assert_eq!(ratio_string(&r.msg[1]), "1/2");
        assert!(RateVector::parse("1,2", 2).is_err());
        assert!(RateVector::parse("1,1,1,0,-1", 2).is_err());
        assert!(RateVector::parse("1,1,a,0,0", 2).is_err());
    }

    proptest! {
        #[test]
        fn parse_serialize_roundtrip(
            t in 1usize..5,
            seed in 0u64..10_000,
            lens in proptest::collection::vec(0usize..4, 5),
        ) {
            let mut side_info = Vec::new();
            for i in 0..t {
                let mut s = BTreeSet::new();
                for j in 0..t {
                    if j != i && (seed >> ((i * t + j) % 60)) & 1 == 1 {
                        s.insert(j);
                    }
                }
                side_info.push(s);
            }
            let inst = Instance::new(2, side_info, lens[..t].to_vec()).unwrap();
            let reparsed = Instance::parse(&inst.to_json()).unwrap();
            prop_assert_eq!(inst, reparsed);
        }

        #[test]
        fn rates_scale_invariant(l1 in 1usize..6, l2 in 0usize..6, lk in 0usize..6, l in 1usize..6, f in 2usize..4) {
            let inst = Instance::new(2, vec![BTreeSet::new(), BTreeSet::new()], vec![l1, l2]).unwrap();
            let keys = KeyProfile::new(lk, vec![0, 1], 0);
            let doubled = Instance::new(2, vec![BTreeSet::new(), BTreeSet::new()], vec![f * l1, f * l2]).unwrap();
            let dkeys = KeyProfile::new(f * lk, vec![0, f], 0);
            let a = rate_of(&inst, &keys, l).unwrap();
            let b = rate_of(&doubled, &dkeys, f * l).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
