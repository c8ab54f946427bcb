//! The generalized one-time pad construction.
//!
//! Private keys pad a prefix of each message, the leftover message symbols
//! go through a conventional index code, and the common key pads that
//! code's output. The result is perfectly secure with public length
//! `l' + sum(min(l_i, l_ki))` whenever the common key covers the inner code
//! (`l_k >= l'`). The transforms in this module also realize the two
//! constructive directions between key regimes: padding a conventional code
//! with a fresh common key, and expanding messages to absorb new private
//! keys.

use crate::conventional::{find_linear_code, verify_zero_error, LinearCode, ZeroErrorOutcome};
use crate::field::FieldMatrix;
use crate::linreduce::{BlockLayout, CodeMatrix};
use crate::problem::{Instance, KeyProfile};
use crate::secure::{verify_decoding, verify_perfect_secrecy, LinearSecureCode, SecureCode};
use crate::{Error, Result};

/// Leftover message lengths after private-key padding: `[l_i - l_ki]+`.
pub fn reduced_lengths(instance: &Instance, keys: &KeyProfile) -> Vec<usize> {
    instance
        .msg_lens()
        .iter()
        .zip(keys.l_ki.iter())
        .map(|(&l, &k)| l.saturating_sub(k))
        .collect()
}

/// The instance the inner conventional code must serve.
pub fn reduced_instance(instance: &Instance, keys: &KeyProfile) -> Result<Instance> {
    if keys.l_ki.len() != instance.receivers() {
        return Err(Error::Dimension(format!(
            "{} private keys for {} receivers",
            keys.l_ki.len(),
            instance.receivers()
        )));
    }
    instance.with_msg_lens(reduced_lengths(instance, keys))
}

/// Feasibility verdict for the construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    /// A conventional code of this length exists for the reduced messages
    /// and fits under the common key.
    Feasible {
        conv_len: usize,
    },
    Infeasible {
        reason: String,
    },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }
}

/// The construction works exactly when the common key covers the shortest
/// conventional code for the reduced message lengths.
pub fn gotp_feasible(instance: &Instance, keys: &KeyProfile, cap: u64) -> Result<Feasibility> {
    if keys.l_w != 0 {
        return Err(Error::Precondition(
            "the construction uses no encoder randomness; l_w must be 0".into(),
        ));
    }
    let reduced = reduced_instance(instance, keys)?;
    let conv_len = shortest_linear_code_len(&reduced, cap)?;
    if keys.l_k >= conv_len {
        Ok(Feasibility::Feasible { conv_len })
    } else {
        Ok(Feasibility::Infeasible {
            reason: format!(
                "l_k < required code length: reduced messages {:?} need {} symbols, common key has {}",
                reduced.msg_lens(),
                conv_len,
                keys.l_k
            ),
        })
    }
}

/// Smallest `l` for which an exhaustive search finds a zero-error linear
/// code on the instance.
pub fn shortest_linear_code_len(instance: &Instance, cap: u64) -> Result<usize> {
    for l in 0..=instance.total_msg_len() {
        if find_linear_code(instance, l, cap)?.is_some() {
            return Ok(l);
        }
    }
    Err(Error::Internal(
        "the identity encoder is always a zero-error code".into(),
    ))
}

/// Builds the generalized one-time pad code: the first `min(l_i, l_ki)`
/// symbols of each message are padded with the receiver's private key, and
/// the conventional code `conv` on the remaining symbols is padded with the
/// common key. The result is verified to pass both the secrecy and the
/// decoding checks before it is returned.
pub fn construct_gotp(
    instance: &Instance,
    keys: &KeyProfile,
    conv: &LinearCode,
    cap: u64,
) -> Result<SecureCode> {
    if keys.l_w != 0 {
        return Err(Error::Precondition(
            "the construction uses no encoder randomness; l_w must be 0".into(),
        ));
    }
    let reduced = reduced_instance(instance, keys)?;
    let conv_len = conv.len();
    if conv_len > keys.l_k {
        return Err(Error::Infeasible(format!(
            "common key has {} symbols but the inner code needs {}",
            keys.l_k, conv_len
        )));
    }
    if conv.encode_matrix().cols() != reduced.total_msg_len() {
        return Err(Error::Dimension(format!(
            "inner code covers {} message symbols, reduced instance has {}",
            conv.encode_matrix().cols(),
            reduced.total_msg_len()
        )));
    }
    match verify_zero_error(conv, &reduced, cap)? {
        ZeroErrorOutcome::Pass => {}
        ZeroErrorOutcome::Counterexample { msg, receiver } => {
            return Err(Error::Precondition(format!(
                "inner code is not zero-error: receiver {} fails at msg {msg:?}",
                receiver + 1,
            )))
        }
    }
    for (i, (&l_i, &l_ki)) in instance.msg_lens().iter().zip(keys.l_ki.iter()).enumerate() {
        if l_ki > l_i {
            eprintln!(
                "warning: receiver {} has {} private key symbols for a {}-symbol message; \
                 the excess is unused",
                i + 1,
                l_ki,
                l_i
            );
        }
    }

    let t = instance.receivers();
    let p = instance.modulus();
    let layout = BlockLayout::new(keys.l_k, keys.l_ki.clone(), 0, instance.msg_lens().to_vec());
    let pad_lens: Vec<usize> = (0..t)
        .map(|i| instance.msg_len(i).min(keys.l_ki[i]))
        .collect();
    let rows = conv_len + pad_lens.iter().sum::<usize>();
    let mut pi = FieldMatrix::zero(rows, layout.total_cols(), p)?;

    // conventional rows, masked by the first conv_len common key symbols
    for r in 0..conv_len {
        pi.set(r, layout.common_key_range().start + r, 1);
        let mut reduced_col = 0usize;
        for i in 0..t {
            let skip = pad_lens[i];
            for j in 0..reduced.msg_len(i) {
                let coeff = conv.encode_matrix().get(r, reduced_col);
                if coeff != 0 {
                    pi.set(r, layout.message_range(i).start + skip + j, coeff);
                }
                reduced_col += 1;
            }
        }
    }
    // private pad rows: M_i(j) + K_i(j)
    let mut row = conv_len;
    for i in 0..t {
        for j in 0..pad_lens[i] {
            pi.set(row, layout.private_key_range(i).start + j, 1);
            pi.set(row, layout.message_range(i).start + j, 1);
            row += 1;
        }
    }

    let cm = CodeMatrix::new(pi, layout)?;
    let code =
        SecureCode::Linear(LinearSecureCode::new(instance.clone(), cm)?.with_derived_decoders()?);
    ensure_verified(&code, cap, "generalized one-time pad construction")?;
    Ok(code)
}

/// One-time pads a conventional code with a fresh common key of (at least)
/// the code length: `C = conv(M) + K`. Receivers strip the key; the
/// eavesdropper sees uniform noise.
pub fn pad_conventional(
    conv: &LinearCode,
    instance: &Instance,
    l_k: usize,
    cap: u64,
) -> Result<SecureCode> {
    if l_k < conv.len() {
        return Err(Error::Precondition(format!(
            "key of {} symbols is shorter than the code length {}",
            l_k,
            conv.len()
        )));
    }
    let keys = KeyProfile::new(l_k, vec![0; instance.receivers()], 0);
    construct_gotp(instance, &keys, conv, cap)
}

/// Message-expansion transform: adds a private key of `extra[i]` symbols
/// per receiver to a common-key-only code, lengthening each message by the
/// same amount. The new symbols are sent as their one-time pad with the new
/// private key, so the public length grows by `sum(extra)`.
///
/// Returns the expanded code; its instance (available via
/// [`SecureCode::instance`]) carries the new message lengths.
pub fn expand_with_private_keys(
    code: &SecureCode,
    extra: &[usize],
    cap: u64,
) -> Result<SecureCode> {
    let SecureCode::Linear(lin) = code else {
        return Err(Error::Precondition(
            "message expansion is implemented for linear codes".into(),
        ));
    };
    let old = lin.matrix();
    let old_layout = old.layout();
    if old_layout.l_ki.iter().any(|&k| k != 0) {
        return Err(Error::Precondition(
            "expansion starts from a code that uses only a common key".into(),
        ));
    }
    let t = lin.instance().receivers();
    if extra.len() != t {
        return Err(Error::Dimension(format!(
            "{} expansion lengths for {} receivers",
            extra.len(),
            t
        )));
    }
    if extra.iter().all(|&e| e == 0) {
        return Ok(code.clone());
    }

    let p = old.modulus();
    let new_lens: Vec<usize> = lin
        .instance()
        .msg_lens()
        .iter()
        .zip(extra.iter())
        .map(|(&l, &e)| l + e)
        .collect();
    let new_instance = lin.instance().with_msg_lens(new_lens.clone())?;
    let layout = BlockLayout::new(old_layout.l_k, extra.to_vec(), old_layout.l_w, new_lens);

    let old_rows = old.pi().rows();
    let extra_total: usize = extra.iter().sum();
    let mut pi = FieldMatrix::zero(old_rows + extra_total, layout.total_cols(), p)?;

    // old rows, with columns remapped into the widened layout
    let remap = |col: usize| -> usize {
        match old_layout.col_block(col) {
            (crate::linreduce::BlockId::Common, c) => layout.common_key_range().start + c,
            (crate::linreduce::BlockId::Private(i), c) => layout.private_key_range(i).start + c,
            (crate::linreduce::BlockId::Randomness, c) => layout.randomness_range().start + c,
            (crate::linreduce::BlockId::Message(i), c) => layout.message_range(i).start + c,
        }
    };
    for r in 0..old_rows {
        for c in 0..old.pi().cols() {
            let v = old.pi().get(r, c);
            if v != 0 {
                pi.set(r, remap(c), v);
            }
        }
    }
    // pad rows for the appended message symbols
    let mut row = old_rows;
    for i in 0..t {
        let old_len = lin.instance().msg_len(i);
        for j in 0..extra[i] {
            pi.set(row, layout.private_key_range(i).start + j, 1);
            pi.set(row, layout.message_range(i).start + old_len + j, 1);
            row += 1;
        }
    }

    let cm = CodeMatrix::new(pi, layout)?;
    let expanded =
        SecureCode::Linear(LinearSecureCode::new(new_instance, cm)?.with_derived_decoders()?);
    ensure_verified(&expanded, cap, "private-key message expansion")?;
    Ok(expanded)
}

fn ensure_verified(code: &SecureCode, cap: u64, what: &str) -> Result<()> {
    if !verify_perfect_secrecy(code, cap)?.passed() {
        return Err(Error::Internal(format!("{what} produced an insecure code")));
    }
    if !verify_decoding(code, cap)?.passed() {
        return Err(Error::Internal(format!(
            "{what} produced an undecodable code"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    use num_bigint::BigInt;
    use num_rational::BigRational;
    use std::collections::BTreeSet;

    const CAP: u64 = 1 << 22;

    fn single_receiver(len: usize) -> Instance {
        Instance::new(2, vec![BTreeSet::new()], vec![len]).unwrap()
    }

    fn xor_instance() -> Instance {
        Instance::parse(r#"{"t":2,"p":2,"side_info":[[2],[1]],"msg_len":[1,1]}"#).unwrap()
    }

    fn pentagon() -> Instance {
        let side: Vec<BTreeSet<usize>> = (0..5)
            .map(|i| [(i + 4) % 5, (i + 1) % 5].into_iter().collect())
            .collect();
        Instance::new(2, side, vec![1; 5]).unwrap()
    }

    fn ratio(n: usize, d: usize) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn shannon_pad_feasibility() {
        let inst = single_receiver(3);
        // l_k = 3 covers the 3-symbol identity code
        let f = gotp_feasible(&inst, &KeyProfile::new(3, vec![0], 0), CAP).unwrap();
        assert_eq!(f, Feasibility::Feasible { conv_len: 3 });
        // a 1-symbol key cannot cover 2 message symbols
        let inst2 = single_receiver(2);
        let f2 = gotp_feasible(&inst2, &KeyProfile::new(1, vec![0], 0), CAP).unwrap();
        match f2 {
            Feasibility::Infeasible { reason } => {
                assert!(reason.contains("l_k < required code length"), "{reason}");
            }
            Feasibility::Feasible { .. } => panic!("violates the key-length bound"),
        }
    }

    #[test]
    fn xor_instance_is_feasible_with_one_key_symbol() {
        let f = gotp_feasible(&xor_instance(), &KeyProfile::new(1, vec![0, 0], 0), CAP).unwrap();
        assert_eq!(f, Feasibility::Feasible { conv_len: 1 });
    }

    #[test]
    fn construct_shannon_pad() {
        let inst = single_receiver(3);
        let keys = KeyProfile::new(3, vec![0], 0);
        let conv = find_linear_code(&inst, 3, CAP).unwrap().unwrap();
        let code = construct_gotp(&inst, &keys, &conv, CAP).unwrap();
        assert_eq!(code.code_len(), 3);
        let r = code.rate().unwrap();
        assert_eq!(r.msg[0], ratio(1, 1));
        assert_eq!(r.common_key, ratio(1, 1));
    }

    #[test]
    fn construct_xor_gotp() {
        let inst = xor_instance();
        let keys = KeyProfile::new(1, vec![0, 0], 0);
        let conv = find_linear_code(&inst, 1, CAP).unwrap().unwrap();
        let code = construct_gotp(&inst, &keys, &conv, CAP).unwrap();
        assert_eq!(code.code_len(), 1);
        // the single public row is K + M_1 + M_2
        let SecureCode::Linear(lin) = &code else {
            unreachable!()
        };
        assert_eq!(lin.matrix().pi().row(0), vec![1, 1, 1]);
    }

    #[test]
    fn construct_private_pads_only() {
        // no common key, full private keys: C = (M_1 + K_1, M_2 + K_2)
        let inst = xor_instance();
        let keys = KeyProfile::new(0, vec![1, 1], 0);
        let reduced = reduced_instance(&inst, &keys).unwrap();
        assert_eq!(reduced.msg_lens(), &[0, 0]);
        let conv = find_linear_code(&reduced, 0, CAP).unwrap().unwrap();
        let code = construct_gotp(&inst, &keys, &conv, CAP).unwrap();
        assert_eq!(code.code_len(), 2);
        let r = code.rate().unwrap();
        assert_eq!(r.private_keys, vec![ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn pad_conventional_gives_rate_one_common_key() {
        let inst = xor_instance();
        let conv = find_linear_code(&inst, 1, CAP).unwrap().unwrap();
        let code = pad_conventional(&conv, &inst, 1, CAP).unwrap();
        assert_eq!(code.code_len(), 1);
        let r = code.rate().unwrap();
        assert_eq!(r.common_key, ratio(1, 1));
        assert!(r.private_keys.iter().all(|x| x == &ratio(0, 1)));

        // key shorter than the code is rejected
        let id2 = find_linear_code(&single_receiver(2), 2, CAP)
            .unwrap()
            .unwrap();
        assert!(pad_conventional(&id2, &single_receiver(2), 1, CAP).is_err());
    }

    #[test]
    fn pad_conventional_pentagon_witness() {
        let inst = pentagon();
        let conv = find_linear_code(&inst, 3, CAP).unwrap().unwrap();
        // 2^13 joint inputs, exhaustively verified inside the constructor
        let code = pad_conventional(&conv, &inst, 3, CAP).unwrap();
        assert_eq!(code.code_len(), 3);
    }

    #[test]
    fn expansion_with_zeros_is_identity() {
        let inst = single_receiver(1);
        let conv = find_linear_code(&inst, 1, CAP).unwrap().unwrap();
        let code = pad_conventional(&conv, &inst, 1, CAP).unwrap();
        let same = expand_with_private_keys(&code, &[0], CAP).unwrap();
        assert_eq!(same.code_len(), code.code_len());
        assert_eq!(same.rate().unwrap(), code.rate().unwrap());
    }

    #[test]
    fn expansion_of_shannon_pad() {
        let inst = single_receiver(3);
        let conv = find_linear_code(&inst, 3, CAP).unwrap().unwrap();
        let pad = pad_conventional(&conv, &inst, 3, CAP).unwrap();
        let expanded = expand_with_private_keys(&pad, &[2], CAP).unwrap();
        assert_eq!(expanded.code_len(), 5);
        let keys = expanded.keys();
        assert_eq!(keys.l_k, 3);
        assert_eq!(keys.l_ki, vec![2]);
        assert_eq!(expanded.instance().msg_lens(), &[5]);
    }

    #[test]
    fn expansion_of_xor_gotp() {
        let inst = xor_instance();
        let conv = find_linear_code(&inst, 1, CAP).unwrap().unwrap();
        let code = pad_conventional(&conv, &inst, 1, CAP).unwrap();
        let expanded = expand_with_private_keys(&code, &[1, 0], CAP).unwrap();
        assert_eq!(expanded.code_len(), 2);
        assert_eq!(expanded.instance().msg_lens(), &[2, 1]);
    }

    #[test]
    fn expansion_rate_accounting_is_exact() {
        // new rates must equal a' * (r_i + r_ki, .., r_k, r_k1, ..) with
        // a' = l / (l + sum(extra))
        let inst = xor_instance();
        let conv = find_linear_code(&inst, 1, CAP).unwrap().unwrap();
        let code = pad_conventional(&conv, &inst, 1, CAP).unwrap();
        let l = code.code_len();
        let extra = [1usize, 1usize];
        let expanded = expand_with_private_keys(&code, &extra, CAP).unwrap();

        let e_total: usize = extra.iter().sum();
        let alpha_prime = ratio(l, l + e_total);
        let old_rate = code.rate().unwrap();
        let got = expanded.rate().unwrap();
        for i in 0..2 {
            let r_ki = ratio(extra[i], l);
            assert_eq!(got.msg[i], &alpha_prime * (&old_rate.msg[i] + &r_ki));
            assert_eq!(got.private_keys[i], &alpha_prime * &r_ki);
        }
        assert_eq!(got.common_key, &alpha_prime * &old_rate.common_key);
    }

    #[test]
    fn expansion_requires_common_key_only() {
        let inst = xor_instance();
        let keys = KeyProfile::new(0, vec![1, 1], 0);
        let reduced = reduced_instance(&inst, &keys).unwrap();
        let conv = find_linear_code(&reduced, 0, CAP).unwrap().unwrap();
        let code = construct_gotp(&inst, &keys, &conv, CAP).unwrap();
        assert!(matches!(
            expand_with_private_keys(&code, &[1, 0], CAP),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn oversized_keys_are_tolerated() {
        // l_ki greater than l_i: the surplus is ignored (with a warning)
        let inst = xor_instance();
        let keys = KeyProfile::new(0, vec![2, 1], 0);
        let reduced = reduced_instance(&inst, &keys).unwrap();
        assert_eq!(reduced.msg_lens(), &[0, 0]);
        let conv = find_linear_code(&reduced, 0, CAP).unwrap().unwrap();
        let code = construct_gotp(&inst, &keys, &conv, CAP).unwrap();
        // only min(l_i, l_ki) = 1 pad row per receiver
        assert_eq!(code.code_len(), 2);
    }

    #[test]
    fn two_symbol_identity_pad() {
        let inst = single_receiver(2);
        let conv = find_linear_code(&inst, 2, CAP).unwrap().unwrap();
        let code = pad_conventional(&conv, &inst, 2, CAP).unwrap();
        assert_eq!(code.code_len(), 2);
        assert_eq!(code.rate().unwrap().common_key, ratio(1, 1));
    }

    #[test]
    fn construction_works_over_ternary_fields() {
        // XOR-style instance over GF(3): one inner code symbol, one key symbol
        let inst = Instance::new(3, vec![[1usize].into(), [0usize].into()], vec![1, 1]).unwrap();
        let keys = KeyProfile::new(1, vec![0, 0], 0);
        let f = gotp_feasible(&inst, &keys, CAP).unwrap();
        assert_eq!(f, Feasibility::Feasible { conv_len: 1 });
        let conv = find_linear_code(&inst, 1, CAP).unwrap().unwrap();
        let code = construct_gotp(&inst, &keys, &conv, CAP).unwrap();
        assert_eq!(code.code_len(), 1);
        // constructor re-verified secrecy and decoding over all 27 inputs
    }
}
