//! Secure index codes and their exact verifiers.
//!
//! A secure code maps `(M_1..M_t, K, K_1..K_t, W)` to a public codeword `C`;
//! receiver `i` decodes `M_i` from `(C, side info, K, K_i)` and the
//! eavesdropper, who sees only `C`, must learn nothing. The verifiers here
//! enumerate the full input space and decide every property exactly:
//! perfect secrecy and zero-error decoding are yes/no questions with
//! witnesses, total variation and error probability are exact rationals,
//! and mutual information is the one place floating point appears (the
//! logarithm), reported with an error bound.
//!
//! Joint input indices are little-endian mixed radix over the column order
//! of the code matrix: `K, K_1, .., K_t, W, M_1, .., M_t`, column 0 least
//! significant. Message symbols therefore occupy the high digits and
//! `m_index = index / p^(key symbols)`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::field::FieldMatrix;
use crate::linreduce::{BlockLayout, CodeMatrix};
use crate::problem::{rate_of, ratio_string, Instance, KeyProfile, RateVector};
use crate::{check_cap, pow_u128, Error, Result};

/// Threshold below which the exhaustive loops stay sequential.
const PAR_THRESHOLD: u64 = 1 << 14;

/// A linear secure code: the generation matrix plus (optionally) one linear
/// decoder per receiver. Decoder `i` acts on the stacked observation vector
/// `[C; K; K_i; M_j for j in side_info(i)]`.
#[derive(Debug, Clone)]
pub struct LinearSecureCode {
    instance: Instance,
    matrix: CodeMatrix,
    decoders: Option<Vec<FieldMatrix>>,
}

/// A table secure code: an explicit encoder table over the joint input
/// space, plus (optionally) per-receiver decoder tables keyed by the packed
/// observation `(C, side info, K, K_i)`.
#[derive(Debug, Clone)]
pub struct TableSecureCode {
    instance: Instance,
    layout: BlockLayout,
    code_len: usize,
    encoder: Vec<u32>,
    decoders: Option<Vec<HashMap<u64, u32>>>,
}

/// A secure index code in either representation.
#[derive(Debug, Clone)]
pub enum SecureCode {
    Linear(LinearSecureCode),
    Table(TableSecureCode),
}

impl LinearSecureCode {
    /// Builds a linear secure code without decoders. The matrix layout must
    /// agree with the instance.
    pub fn new(instance: Instance, matrix: CodeMatrix) -> Result<Self> {
        if matrix.modulus() != instance.modulus() {
            return Err(Error::ModulusMismatch {
                left: matrix.modulus(),
                right: instance.modulus(),
            });
        }
        if matrix.layout().l_i != instance.msg_lens() {
            return Err(Error::Dimension(format!(
                "matrix message blocks {:?} do not match instance lengths {:?}",
                matrix.layout().l_i,
                instance.msg_lens()
            )));
        }
        if matrix.layout().l_ki.len() != instance.receivers() {
            return Err(Error::Dimension(format!(
                "matrix has {} private key blocks for {} receivers",
                matrix.layout().l_ki.len(),
                instance.receivers()
            )));
        }
        Ok(LinearSecureCode {
            instance,
            matrix,
            decoders: None,
        })
    }

    /// Same code with linear decoders derived from the matrix; fails when
    /// some receiver cannot decode.
    pub fn with_derived_decoders(mut self) -> Result<Self> {
        self.decoders = Some(self.derive_decoders()?);
        Ok(self)
    }

    /// Replaces the decoders wholesale (used to model corrupted decoders).
    pub fn with_decoders(mut self, decoders: Vec<FieldMatrix>) -> Self {
        self.decoders = Some(decoders);
        self
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn matrix(&self) -> &CodeMatrix {
        &self.matrix
    }

    pub fn decoders(&self) -> Option<&[FieldMatrix]> {
        self.decoders.as_deref()
    }

    /// Observation rows of receiver `i` as vectors over the joint input
    /// space: the code rows, then unit rows for K, K_i, and side-information
    /// message coordinates.
    fn observation_matrix(&self, i: usize) -> Result<FieldMatrix> {
        let layout = self.matrix.layout();
        let total = layout.total_cols();
        let p = self.matrix.modulus();
        let mut rows: Vec<Vec<u16>> = Vec::new();
        for r in 0..self.matrix.pi().rows() {
            rows.push(self.matrix.pi().row(r));
        }
        let unit = |col: usize, rows: &mut Vec<Vec<u16>>| {
            let mut v = vec![0u16; total];
            v[col] = 1;
            rows.push(v);
        };
        for c in layout.common_key_range() {
            unit(c, &mut rows);
        }
        for c in layout.private_key_range(i) {
            unit(c, &mut rows);
        }
        for &j in self.instance.side_info(i) {
            for c in layout.message_range(j) {
                unit(c, &mut rows);
            }
        }
        FieldMatrix::from_rows(&rows, total, p)
    }

    /// Solves for one linear decoder per receiver. Receiver `i` can decode
    /// exactly when every coordinate of `M_i` lies in the row space of its
    /// observation matrix.
    pub fn derive_decoders(&self) -> Result<Vec<FieldMatrix>> {
        let layout = self.matrix.layout();
        let total = layout.total_cols();
        let p = self.matrix.modulus();
        let mut out = Vec::with_capacity(self.instance.receivers());
        for i in 0..self.instance.receivers() {
            let obs = self.observation_matrix(i)?;
            let obs_t = obs.transpose();
            let mut rows = Vec::with_capacity(self.instance.msg_len(i));
            for c in layout.message_range(i) {
                let mut target = vec![0u16; total];
                target[c] = 1;
                match obs_t.solve_affine(&target)? {
                    Some(w) => rows.push(w),
                    None => {
                        return Err(Error::Infeasible(format!(
                            "receiver {} cannot decode message symbol {}",
                            i + 1,
                            c - layout.message_range(i).start + 1
                        )))
                    }
                }
            }
            out.push(FieldMatrix::from_rows(&rows, obs.rows(), p)?);
        }
        Ok(out)
    }
}

impl TableSecureCode {
    pub fn new(
        instance: Instance,
        keys: KeyProfile,
        code_len: usize,
        encoder: Vec<u32>,
    ) -> Result<Self> {
        let layout = BlockLayout::from_keys(&keys, instance.msg_lens())?;
        let total = pow_u128(instance.modulus(), layout.total_cols());
        if total > (1 << 40) {
            return Err(Error::CapExceeded {
                needed: total,
                cap: 1 << 40,
            });
        }
        if encoder.len() as u128 != total {
            return Err(Error::Dimension(format!(
                "encoder table has {} entries, input space has {total}",
                encoder.len()
            )));
        }
        let c_card = pow_u128(instance.modulus(), code_len);
        if let Some(&bad) = encoder.iter().find(|&&c| c as u128 >= c_card) {
            return Err(Error::Dimension(format!(
                "encoder output {bad} outside code alphabet of size {c_card}"
            )));
        }
        Ok(TableSecureCode {
            instance,
            layout,
            code_len,
            encoder,
            decoders: None,
        })
    }

    pub fn with_derived_decoders(mut self) -> Result<Self> {
        self.decoders = Some(self.derive_decoders()?);
        Ok(self)
    }

    pub fn with_decoders(mut self, decoders: Vec<HashMap<u64, u32>>) -> Self {
        self.decoders = Some(decoders);
        self
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn encoder(&self) -> &[u32] {
        &self.encoder
    }

    pub fn code_len(&self) -> usize {
        self.code_len
    }

    /// First-seen decoder tables. Fails when two inputs with the same
    /// observation carry different messages, i.e. the code is not zero-error
    /// decodable.
    pub fn derive_decoders(&self) -> Result<Vec<HashMap<u64, u32>>> {
        let space = InputSpace::new(&self.layout, self.instance.modulus());
        let mut out = Vec::with_capacity(self.instance.receivers());
        for i in 0..self.instance.receivers() {
            let mut table: HashMap<u64, u32> = HashMap::new();
            for idx in 0..space.total() {
                let c = self.encoder[idx as usize] as u64;
                let obs = space.observation_key(&self.instance, i, idx, c);
                let m_i = space.message_part(&self.instance, i, idx);
                match table.insert(obs, m_i as u32) {
                    Some(prev) if prev as u64 != m_i => {
                        return Err(Error::Infeasible(format!(
                            "receiver {} sees the same observation for two different messages",
                            i + 1
                        )))
                    }
                    _ => {}
                }
            }
            out.push(table);
        }
        Ok(out)
    }
}

impl SecureCode {
    pub fn instance(&self) -> &Instance {
        match self {
            SecureCode::Linear(c) => c.instance(),
            SecureCode::Table(c) => c.instance(),
        }
    }

    pub fn layout(&self) -> &BlockLayout {
        match self {
            SecureCode::Linear(c) => c.matrix.layout(),
            SecureCode::Table(c) => &c.layout,
        }
    }

    pub fn keys(&self) -> KeyProfile {
        self.layout().key_profile()
    }

    /// Public code length in field symbols.
    pub fn code_len(&self) -> usize {
        match self {
            SecureCode::Linear(c) => c.matrix.pi().rows(),
            SecureCode::Table(c) => c.code_len,
        }
    }

    /// Exact rate vector of this code.
    pub fn rate(&self) -> Result<RateVector> {
        rate_of(self.instance(), &self.keys(), self.code_len())
    }

    fn space(&self) -> InputSpace {
        InputSpace::new(self.layout(), self.instance().modulus())
    }

    /// Serializes to the code file format: linear codes as the code-matrix
    /// JSON with the instance embedded, table codes as an encoder table.
    pub fn to_json(&self) -> String {
        let file = match self {
            SecureCode::Linear(lc) => {
                let base = crate::linreduce::CodeMatrixFile::from(&lc.matrix);
                SecureCodeFile::Linear {
                    p: base.p,
                    blocks: base.blocks,
                    rows: base.rows,
                    instance: serde_json::from_str(&lc.instance.to_json()).expect("instance json"),
                }
            }
            SecureCode::Table(tc) => SecureCodeFile::Table {
                p: tc.instance.modulus(),
                instance: serde_json::from_str(&tc.instance.to_json()).expect("instance json"),
                keys: tc.layout.key_profile(),
                l: tc.code_len,
                encoder: tc.encoder.clone(),
            },
        };
        serde_json::to_string_pretty(&file).expect("code serializes")
    }

    /// Parses either code file format. Decoders are not stored in files;
    /// the verifiers derive canonical ones on demand.
    pub fn parse(text: &str) -> Result<SecureCode> {
        let file: SecureCodeFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("code file: {e}")))?;
        match file {
            SecureCodeFile::Linear {
                p,
                blocks,
                rows,
                instance,
            } => {
                let instance = Instance::parse(&serde_json::to_string(&instance).unwrap())?;
                let cm = crate::linreduce::CodeMatrixFile { p, blocks, rows }.into_code_matrix()?;
                Ok(SecureCode::Linear(LinearSecureCode::new(instance, cm)?))
            }
            SecureCodeFile::Table {
                p,
                instance,
                keys,
                l,
                encoder,
            } => {
                let instance = Instance::parse(&serde_json::to_string(&instance).unwrap())?;
                if p != instance.modulus() {
                    return Err(Error::ModulusMismatch {
                        left: p,
                        right: instance.modulus(),
                    });
                }
                Ok(SecureCode::Table(TableSecureCode::new(
                    instance, keys, l, encoder,
                )?))
            }
        }
    }

    /// Codeword index for a joint input index.
    fn encode_index(&self, space: &InputSpace, idx: u64) -> u64 {
        match self {
            SecureCode::Linear(c) => {
                let pi = c.matrix.pi();
                if space.p == 2 && pi.cols() <= 63 && pi.rows() <= 63 {
                    pi.mul_bits(idx)
                } else {
                    let digits = space.digits(idx);
                    let c_digits = pi.mul_vec(&digits).expect("dims fixed at construction");
                    pack_digits(&c_digits, space.p)
                }
            }
            SecureCode::Table(c) => c.encoder[idx as usize] as u64,
        }
    }
}

/// Wire formats for code files. The linear variant is the code-matrix JSON
/// extended with the instance it serves; the table variant stores the
/// encoder as one output index per joint input index (little-endian mixed
/// radix over the columns `K, K_1..K_t, W, M_1..M_t`).
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SecureCodeFile {
    Linear {
        p: u16,
        blocks: crate::linreduce::BlocksFile,
        rows: Vec<Vec<u16>>,
        instance: serde_json::Value,
    },
    Table {
        p: u16,
        instance: serde_json::Value,
        keys: KeyProfile,
        l: usize,
        encoder: Vec<u32>,
    },
}

/// Mixed-radix bookkeeping over the joint input columns.
#[derive(Debug, Clone)]
pub(crate) struct InputSpace {
    p: u16,
    total_cols: usize,
    key_cols: usize,
    layout: BlockLayout,
}

impl InputSpace {
    pub(crate) fn new(layout: &BlockLayout, p: u16) -> Self {
        InputSpace {
            p,
            total_cols: layout.total_cols(),
            key_cols: layout.key_cols(),
            layout: layout.clone(),
        }
    }

    pub(crate) fn total(&self) -> u64 {
        pow_u128(self.p, self.total_cols) as u64
    }

    pub(crate) fn check_total(&self, cap: u64) -> Result<u64> {
        check_cap(pow_u128(self.p, self.total_cols), cap)?;
        Ok(self.total())
    }

    pub(crate) fn msg_card(&self) -> u64 {
        pow_u128(self.p, self.total_cols - self.key_cols) as u64
    }

    pub(crate) fn key_card(&self) -> u64 {
        pow_u128(self.p, self.key_cols) as u64
    }

    pub(crate) fn digits(&self, idx: u64) -> Vec<u16> {
        unpack_digits(idx, self.p, self.total_cols)
    }

    /// Digits of a message index over the concatenated message symbols.
    pub(crate) fn msg_digits(&self, m_idx: u64) -> Vec<u16> {
        unpack_digits(m_idx, self.p, self.total_cols - self.key_cols)
    }

    /// Packed observation of receiver `i`: codeword, common key, private
    /// key, and side-information message digits.
    fn observation_key(&self, instance: &Instance, i: usize, idx: u64, c_idx: u64) -> u64 {
        let p = self.p as u64;
        let mut key = c_idx;
        let digit = |col: usize| -> u64 { (idx / pow_u128(self.p, col) as u64) % p };
        for col in self.layout.common_key_range() {
            key = key * p + digit(col);
        }
        for col in self.layout.private_key_range(i) {
            key = key * p + digit(col);
        }
        for &j in instance.side_info(i) {
            for col in self.layout.message_range(j) {
                key = key * p + digit(col);
            }
        }
        key
    }

    /// Message `M_i` of an input index, packed little-endian.
    fn message_part(&self, instance: &Instance, i: usize, idx: u64) -> u64 {
        let p = self.p as u64;
        let mut out = 0u64;
        for col in self.layout.message_range(i).rev() {
            out = out * p + ((idx / pow_u128(self.p, col) as u64) % p);
        }
        let _ = instance;
        out
    }
}

pub(crate) fn pack_digits(digits: &[u16], p: u16) -> u64 {
    let mut out = 0u64;
    for &d in digits.iter().rev() {
        out = out * p as u64 + d as u64;
    }
    out
}

pub(crate) fn unpack_digits(mut idx: u64, p: u16, n: usize) -> Vec<u16> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push((idx % p as u64) as u16);
        idx /= p as u64;
    }
    out
}

/// Outcome of the zero-error decoding check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodingOutcome {
    Pass,
    /// First input (lexicographic over the joint index) on which some
    /// receiver fails, together with that receiver.
    Fail {
        receiver: usize,
        input: Vec<u16>,
    },
}

impl DecodingOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, DecodingOutcome::Pass)
    }
}

/// Outcome of the perfect secrecy check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SecrecyOutcome {
    Pass,
    /// Lexicographically first `(m, m', c)` on which the conditional masses
    /// `p(C=c|M=m)` and `p(C=c|M=m')` differ.
    Fail {
        m: Vec<u16>,
        m_prime: Vec<u16>,
        c: Vec<u16>,
    },
}

impl SecrecyOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, SecrecyOutcome::Pass)
    }
}

/// Decoders in a runnable form: either linear witness matrices or lookup
/// tables keyed by the packed observation.
enum ResolvedDecoders {
    Linear(Vec<FieldMatrix>),
    Table(Vec<HashMap<u64, u32>>),
}

/// Materializes decoders for verification. Stored decoders win; otherwise
/// canonical ones are derived. A failed derivation means the code is not
/// zero-error, so the fallback is a first-seen table that lets the caller
/// exhibit a concrete conflicting input.
fn resolve_decoders(code: &SecureCode, space: &InputSpace) -> Result<ResolvedDecoders> {
    match code {
        SecureCode::Linear(lc) => match &lc.decoders {
            Some(d) => Ok(ResolvedDecoders::Linear(d.clone())),
            None => match lc.derive_decoders() {
                Ok(d) => Ok(ResolvedDecoders::Linear(d)),
                Err(_) => Ok(ResolvedDecoders::Table(first_seen_tables(code, space)?)),
            },
        },
        SecureCode::Table(tc) => match &tc.decoders {
            Some(d) => Ok(ResolvedDecoders::Table(d.clone())),
            None => match tc.derive_decoders() {
                Ok(d) => Ok(ResolvedDecoders::Table(d)),
                Err(_) => Ok(ResolvedDecoders::Table(first_seen_tables(code, space)?)),
            },
        },
    }
}

/// Decodes receiver `i` on input `idx`, returning its message guess packed
/// little-endian, or `None` when no decoder entry exists.
fn decode_one(
    code: &SecureCode,
    space: &InputSpace,
    decoders: &ResolvedDecoders,
    i: usize,
    idx: u64,
    c_idx: u64,
) -> Option<u64> {
    match decoders {
        ResolvedDecoders::Table(ds) => {
            let obs = space.observation_key(code.instance(), i, idx, c_idx);
            ds[i].get(&obs).map(|&m| m as u64)
        }
        ResolvedDecoders::Linear(ds) => {
            let SecureCode::Linear(lc) = code else {
                unreachable!("linear decoders only resolve for linear codes")
            };
            let layout = lc.matrix.layout();
            let digits = space.digits(idx);
            let c_digits = unpack_digits(c_idx, space.p, lc.matrix.pi().rows());
            let mut obs = c_digits;
            for col in layout.common_key_range() {
                obs.push(digits[col]);
            }
            for col in layout.private_key_range(i) {
                obs.push(digits[col]);
            }
            for &j in lc.instance.side_info(i) {
                for col in layout.message_range(j) {
                    obs.push(digits[col]);
                }
            }
            let guess = ds[i].mul_vec(&obs).ok()?;
            Some(pack_digits(&guess, space.p))
        }
    }
}

/// Exhaustively checks that every receiver recovers its message on every
/// joint input. Codes without stored decoders get canonical derived ones;
/// when no decoder exists at all the scan reports the first conflicting
/// input.
pub fn verify_decoding(code: &SecureCode, cap: u64) -> Result<DecodingOutcome> {
    let space = code.space();
    let total = space.check_total(cap)?;
    let decoders = resolve_decoders(code, &space)?;
    let t = code.instance().receivers();
    let check = |idx: u64| -> Option<(u64, usize)> {
        let c_idx = code.encode_index(&space, idx);
        for i in 0..t {
            let truth = space.message_part(code.instance(), i, idx);
            match decode_one(code, &space, &decoders, i, idx, c_idx) {
                Some(guess) if guess == truth => {}
                _ => return Some((idx, i)),
            }
        }
        None
    };

    let first_fail = if total < PAR_THRESHOLD {
        (0..total).find_map(check)
    } else {
        (0..total).into_par_iter().find_map_first(check)
    };

    Ok(match first_fail {
        None => DecodingOutcome::Pass,
        Some((idx, receiver)) => DecodingOutcome::Fail {
            receiver,
            input: space.digits(idx),
        },
    })
}

/// First-seen observation-to-message tables (the canonical decoder for a
/// code whose decoders are not stored). Single pass over the input space.
fn first_seen_tables(code: &SecureCode, space: &InputSpace) -> Result<Vec<HashMap<u64, u32>>> {
    let t = code.instance().receivers();
    let mut tables: Vec<HashMap<u64, u32>> = vec![HashMap::new(); t];
    for idx in 0..space.total() {
        let c_idx = code.encode_index(space, idx);
        for (i, table) in tables.iter_mut().enumerate() {
            let obs = space.observation_key(code.instance(), i, idx, c_idx);
            let m_i = space.message_part(code.instance(), i, idx) as u32;
            table.entry(obs).or_insert(m_i);
        }
    }
    Ok(tables)
}

/// Conditional codeword counts per message: `counts[c]` over the uniform
/// keys and randomness, for one message index.
fn conditional_counts(code: &SecureCode, space: &InputSpace, m_idx: u64) -> Vec<u64> {
    let c_card = pow_u128(space.p, code.code_len()) as usize;
    let key_card = space.key_card();
    let base = m_idx * key_card;
    let mut counts = vec![0u64; c_card];
    for k in 0..key_card {
        let c = code.encode_index(space, base + k);
        counts[c as usize] += 1;
    }
    counts
}

/// Exhaustively checks the perfect secrecy condition: for every codeword
/// `c`, the conditional mass `p(C=c|M=m)` is the same for all messages `m`.
/// Keys and encoder randomness are uniform and independent, so comparing
/// counts is exact.
pub fn verify_perfect_secrecy(code: &SecureCode, cap: u64) -> Result<SecrecyOutcome> {
    let space = code.space();
    space.check_total(cap)?;
    check_cap(pow_u128(space.p, code.code_len()), cap)?;
    let m_card = space.msg_card();
    if m_card <= 1 {
        return Ok(SecrecyOutcome::Pass);
    }
    let baseline = conditional_counts(code, &space, 0);

    let check = |m: u64| -> Option<(u64, usize)> {
        let counts = conditional_counts(code, &space, m);
        counts
            .iter()
            .zip(baseline.iter())
            .position(|(a, b)| a != b)
            .map(|c| (m, c))
    };

    let first = if m_card < 1 << 10 {
        (1..m_card).find_map(check)
    } else {
        (1..m_card).into_par_iter().find_map_first(check)
    };

    Ok(match first {
        None => SecrecyOutcome::Pass,
        Some((m_prime, c)) => SecrecyOutcome::Fail {
            m: space.msg_digits(0),
            m_prime: space.msg_digits(m_prime),
            c: unpack_digits(c as u64, space.p, code.code_len()),
        },
    })
}

/// Exact joint distribution of `(M, C)`: messages, keys, and randomness all
/// uniform and independent.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    /// `(m_index, c_index, mass)`, sorted by `(m, c)`, masses summing to 1.
    entries: Vec<(u64, u64, BigRational)>,
}

impl JointDist {
    pub fn new(entries: Vec<(u64, u64, BigRational)>) -> Result<Self> {
        let mut sum = BigRational::zero();
        for (_, _, mass) in &entries {
            if mass.is_negative() {
                return Err(Error::InvalidInstance(
                    "joint distribution has a negative mass".into(),
                ));
            }
            sum += mass;
        }
        if !sum.is_one() {
            return Err(Error::InvalidInstance(format!(
                "joint distribution masses sum to {}, not 1",
                ratio_string(&sum)
            )));
        }
        let mut entries = entries;
        entries.sort_by_key(|&(m, c, _)| (m, c));
        Ok(JointDist { entries })
    }

    pub fn entries(&self) -> &[(u64, u64, BigRational)] {
        &self.entries
    }

    fn marginals(&self) -> (HashMap<u64, BigRational>, HashMap<u64, BigRational>) {
        let mut pm: HashMap<u64, BigRational> = HashMap::new();
        let mut pc: HashMap<u64, BigRational> = HashMap::new();
        for (m, c, mass) in &self.entries {
            *pm.entry(*m).or_insert_with(BigRational::zero) += mass;
            *pc.entry(*c).or_insert_with(BigRational::zero) += mass;
        }
        (pm, pc)
    }
}

/// Exact joint of `(M, C)` under uniform independent messages, keys, and
/// randomness.
pub fn joint_of(code: &SecureCode, cap: u64) -> Result<JointDist> {
    let space = code.space();
    let total = space.check_total(cap)?;
    check_cap(pow_u128(space.p, code.code_len()), cap)?;
    let m_card = space.msg_card();
    let denom = BigInt::from(total);
    let mut entries = Vec::new();
    for m in 0..m_card {
        let counts = conditional_counts(code, &space, m);
        for (c, &n) in counts.iter().enumerate() {
            if n > 0 {
                entries.push((
                    m,
                    c as u64,
                    BigRational::new(BigInt::from(n), denom.clone()),
                ));
            }
        }
    }
    JointDist::new(entries)
}

/// Joint of `(M, C)` under an arbitrary message prior (keys and randomness
/// stay uniform): `p(m, c) = prior(m) * p(c | m)`.
pub fn joint_with_prior(code: &SecureCode, prior: &[BigRational], cap: u64) -> Result<JointDist> {
    let space = code.space();
    space.check_total(cap)?;
    check_cap(pow_u128(space.p, code.code_len()), cap)?;
    let m_card = space.msg_card();
    if prior.len() as u64 != m_card {
        return Err(Error::Dimension(format!(
            "prior has {} entries for {} messages",
            prior.len(),
            m_card
        )));
    }
    let key_denom = BigInt::from(space.key_card());
    let mut entries = Vec::new();
    for m in 0..m_card {
        if prior[m as usize].is_zero() {
            continue;
        }
        let counts = conditional_counts(code, &space, m);
        for (c, &n) in counts.iter().enumerate() {
            if n > 0 {
                let mass =
                    &prior[m as usize] * BigRational::new(BigInt::from(n), key_denom.clone());
                entries.push((m, c as u64, mass));
            }
        }
    }
    JointDist::new(entries)
}

/// I(M;C) in bits with a conservative floating-point error bound.
///
/// Each term is `p(m,c) * log2(p(m,c) / (p(m) p(c)))`: the ratio is computed
/// as an exact rational first, so independent pairs contribute exactly
/// `log2(1) = 0` and a perfectly secure code reports exactly zero with a
/// zero error bound.
pub fn mutual_information(joint: &JointDist) -> (f64, f64) {
    let (pm, pc) = joint.marginals();
    let mut mi = 0.0f64;
    let mut abs_sum = 0.0f64;
    let mut mass_used = 0.0f64;
    let mut terms = 0u64;
    for (m, c, mass) in joint.entries() {
        if mass.is_zero() {
            continue;
        }
        let ratio = mass / (&pm[m] * &pc[c]);
        if ratio.is_one() {
            continue;
        }
        let p = rational_to_f64(mass);
        let log = rational_to_f64(&ratio).log2();
        let term = p * log;
        mi += term;
        abs_sum += term.abs();
        mass_used += p;
        terms += 1;
    }
    // Rounding model: converting the ratio and taking the log costs a few
    // ulps of absolute error in the log (so `mass * eps` per term, even for
    // ratios near one), converting and multiplying by the mass costs ulps
    // relative to the term, and the summation adds one rounding step per
    // accumulation.
    let err = f64::EPSILON * (4.0 * mass_used + (8.0 + terms as f64) * abs_sum);
    (mi, err)
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64()
        .unwrap_or_else(|| r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap())
}

/// Total variation distance between the joint and the product of its
/// marginals, as an exact rational:
/// `(1/2) * sum |p(m,c) - p(m)p(c)|` over all message/codeword pairs.
pub fn total_variation(joint: &JointDist) -> BigRational {
    let (pm, pc) = joint.marginals();
    // Pairs outside the support contribute p(m)p(c); their total is
    // 1 - sum over the support of p(m)p(c).
    let mut on_support = BigRational::zero();
    let mut product_on_support = BigRational::zero();
    for (m, c, mass) in joint.entries() {
        let prod = &pm[m] * &pc[c];
        on_support += (mass - &prod).abs();
        product_on_support += prod;
    }
    let off_support = BigRational::one() - product_on_support;
    (on_support + off_support) / BigRational::from_integer(BigInt::from(2))
}

/// Probability, over uniform inputs, that at least one receiver misdecodes.
pub fn error_probability(code: &SecureCode, cap: u64) -> Result<BigRational> {
    let space = code.space();
    let total = space.check_total(cap)?;
    let decoders = resolve_decoders(code, &space)?;
    let t = code.instance().receivers();
    let mut bad = 0u64;
    for idx in 0..total {
        let c_idx = code.encode_index(&space, idx);
        let wrong = (0..t).any(|i| {
            let truth = space.message_part(code.instance(), i, idx);
            !matches!(decode_one(code, &space, &decoders, i, idx, c_idx), Some(g) if g == truth)
        });
        if wrong {
            bad += 1;
        }
    }
    Ok(BigRational::new(BigInt::from(bad), BigInt::from(total)))
}

/// Monte-Carlo estimate of the decoding error probability; a sampling
/// cross-check for the exact count.
pub fn error_probability_mc(code: &SecureCode, samples: u64, seed: u64) -> Result<f64> {
    let space = code.space();
    let total = space.check_total(1 << 40)?;
    let decoders = resolve_decoders(code, &space)?;
    let t = code.instance().receivers();
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut bad = 0u64;
    for _ in 0..samples {
        let idx = rng.gen_range(0..total);
        let c_idx = code.encode_index(&space, idx);
        let wrong = (0..t).any(|i| {
            let truth = space.message_part(code.instance(), i, idx);
            !matches!(decode_one(code, &space, &decoders, i, idx, c_idx), Some(g) if g == truth)
        });
        if wrong {
            bad += 1;
        }
    }
    Ok(bad as f64 / samples as f64)
}

/// Witness of a perfect-secrecy failure in the serialized report.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SecrecyWitness {
    pub m: Vec<u16>,
    pub m_prime: Vec<u16>,
    pub c: Vec<u16>,
}

/// Combined secrecy report over all metrics. `tv` and `perr` serialize as
/// exact `a/b` strings; only the mutual information passes through floats.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SecrecyReport {
    pub perfect: bool,
    pub witness: Option<SecrecyWitness>,
    pub tv: String,
    pub mi_bits: f64,
    pub mi_err: f64,
    pub perr: String,
}

/// Runs every metric on a code: perfect secrecy, total variation, mutual
/// information, and decoding error probability.
pub fn secrecy_report(code: &SecureCode, cap: u64) -> Result<SecrecyReport> {
    let perfect = verify_perfect_secrecy(code, cap)?;
    let joint = joint_of(code, cap)?;
    let tv = total_variation(&joint);
    let (mi_bits, mi_err) = mutual_information(&joint);
    let perr = error_probability(code, cap)?;
    let (perfect, witness) = match perfect {
        SecrecyOutcome::Pass => (true, None),
        SecrecyOutcome::Fail { m, m_prime, c } => (false, Some(SecrecyWitness { m, m_prime, c })),
    };
    Ok(SecrecyReport {
        perfect,
        witness,
        tv: ratio_string(&tv),
        mi_bits,
        mi_err,
        perr: ratio_string(&perr),
    })
}

/// What the exhaustive table search must guarantee.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchGoal {
    /// Zero-error decodability only (conventional codes).
    ZeroError,
    /// Zero-error decodability plus perfect secrecy.
    PerfectlySecure,
}

/// Exhaustive backtracking search over all deterministic encoder tables
/// with the given key profile and code length, in lexicographic order of
/// the table. Decoding conflicts prune branches as soon as two inputs with
/// the same observation carry different messages; perfect secrecy is
/// checked on complete tables. Returns the first (lexicographically
/// smallest) code meeting the goal, or `None` after exhausting the space.
pub fn search_table_code(
    instance: &Instance,
    keys: &KeyProfile,
    code_len: usize,
    goal: SearchGoal,
    cap: u64,
) -> Result<Option<TableSecureCode>> {
    let layout = BlockLayout::from_keys(keys, instance.msg_lens())?;
    let space = InputSpace::new(&layout, instance.modulus());
    // the search materializes per-receiver tables over every input, so it
    // carries a tighter internal bound than the plain enumeration cap
    let total_inputs = space.check_total(cap.min(1 << 22))? as usize;
    let c_card = pow_u128(instance.modulus(), code_len);
    check_cap(c_card, cap)?;
    let c_card = c_card as u64;

    let t = instance.receivers();
    // Precompute observation keys (without the codeword part) and message
    // parts per receiver per input.
    let mut obs_base = vec![vec![0u64; total_inputs]; t];
    let mut msg_part = vec![vec![0u64; total_inputs]; t];
    for idx in 0..total_inputs as u64 {
        for i in 0..t {
            obs_base[i][idx as usize] = space.observation_key(instance, i, idx, 0);
            msg_part[i][idx as usize] = space.message_part(instance, i, idx);
        }
    }

    let mut assignment = vec![0u32; total_inputs];
    // One decode table per receiver: (c, base observation) -> message, with
    // reference counts so backtracking can unwind.
    type SearchTable = HashMap<(u64, u64), (u64, u32)>;
    let mut tables: Vec<SearchTable> = vec![HashMap::new(); t];
    let mut nodes: u64 = 0;

    fn place(
        idx: usize,
        c: u64,
        t: usize,
        obs_base: &[Vec<u64>],
        msg_part: &[Vec<u64>],
        tables: &mut [SearchTable],
    ) -> bool {
        for i in 0..t {
            let key = (c, obs_base[i][idx]);
            let m = msg_part[i][idx];
            let conflict = match tables[i].get_mut(&key) {
                Some(e) if e.0 != m => true,
                Some(e) => {
                    e.1 += 1;
                    false
                }
                None => {
                    tables[i].insert(key, (m, 1));
                    false
                }
            };
            if conflict {
                // roll back the receivers already updated for this input
                for (j, table) in tables.iter_mut().enumerate().take(i) {
                    let key_j = (c, obs_base[j][idx]);
                    if let Some(e) = table.get_mut(&key_j) {
                        e.1 -= 1;
                        if e.1 == 0 {
                            table.remove(&key_j);
                        }
                    }
                }
                return false;
            }
        }
        true
    }

    fn unplace(idx: usize, c: u64, t: usize, obs_base: &[Vec<u64>], tables: &mut [SearchTable]) {
        for i in 0..t {
            let key = (c, obs_base[i][idx]);
            if let Some(e) = tables[i].get_mut(&key) {
                e.1 -= 1;
                if e.1 == 0 {
                    tables[i].remove(&key);
                }
            }
        }
    }

    // Iterative depth-first walk over table cells.
    let mut depth: usize = 0;
    let mut next_try: Vec<u64> = vec![0; total_inputs + 1];
    loop {
        nodes += 1;
        if nodes > cap {
            return Err(Error::CapExceeded {
                needed: nodes as u128,
                cap,
            });
        }
        if depth == total_inputs {
            // complete table; check the secrecy goal
            let candidate =
                TableSecureCode::new(instance.clone(), keys.clone(), code_len, assignment.clone())?;
            let ok = match goal {
                SearchGoal::ZeroError => true,
                SearchGoal::PerfectlySecure => {
                    verify_perfect_secrecy(&SecureCode::Table(candidate.clone()), cap)?.passed()
                }
            };
            if ok {
                return Ok(Some(candidate));
            }
            // treat as exhausted at this leaf: step back
            depth -= 1;
            let c = assignment[depth] as u64;
            unplace(depth, c, t, &obs_base, &mut tables);
            next_try[depth] = c + 1;
            continue;
        }
        let mut advanced = false;
        let mut c = next_try[depth];
        while c < c_card {
            if place(depth, c, t, &obs_base, &msg_part, &mut tables) {
                assignment[depth] = c as u32;
                depth += 1;
                next_try[depth] = 0;
                advanced = true;
                break;
            }
            c += 1;
        }
        if advanced {
            continue;
        }
        // no value fits at this depth: backtrack
        if depth == 0 {
            return Ok(None);
        }
        depth -= 1;
        let c = assignment[depth] as u64;
        unplace(depth, c, t, &obs_base, &mut tables);
        next_try[depth] = c + 1;
    }
}
