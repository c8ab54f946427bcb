//! Conventional (no-adversary, no-key) index codes: linear witness search,
//! exhaustive min-rank over fitting matrices, zero-error verification, and a
//! nonlinear brute-force oracle over table codes.
//!
//! Min-rank computation is NP-hard, so every search here is an exhaustive
//! desk-scale enumeration with deterministic order and explicit caps.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::field::FieldMatrix;
use crate::problem::{Instance, KeyProfile};
use crate::secure::{search_table_code, unpack_digits, SearchGoal};
use crate::{check_cap, pow_u128, Error, Result};

/// Nonlinear conventional codes reuse the table representation of secure
/// codes with an all-zero key profile.
pub use crate::secure::TableSecureCode as TableCode;

/// A linear conventional code: encode matrix `l x (total message symbols)`
/// plus one linear decode witness per receiver. Decoder `i` maps the stacked
/// vector `[C; M_j for j in side_info(i)]` to `M_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    encode: FieldMatrix,
    decoders: Vec<FieldMatrix>,
}

impl LinearCode {
    /// Wraps an encoder with explicit decoders; nothing is checked beyond
    /// shape, so pair this with [`verify_zero_error`].
    pub fn new(encode: FieldMatrix, decoders: Vec<FieldMatrix>) -> Self {
        LinearCode { encode, decoders }
    }

    /// Builds decode witnesses for `encode` by solving the stacked linear
    /// system per receiver (code rows plus side-information rows), failing
    /// when some receiver cannot decode.
    pub fn derive(instance: &Instance, encode: FieldMatrix) -> Result<LinearCode> {
        let decoders = derive_decoders(instance, &encode)?;
        Ok(LinearCode { encode, decoders })
    }

    pub fn encode_matrix(&self) -> &FieldMatrix {
        &self.encode
    }

    pub fn decoders(&self) -> &[FieldMatrix] {
        &self.decoders
    }

    /// Code length in field symbols.
    pub fn len(&self) -> usize {
        self.encode.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.encode.rows() == 0
    }

    pub fn to_json(&self, instance: &Instance) -> String {
        let file = ConventionalCodeFile {
            p: instance.modulus(),
            instance: serde_json::from_str(&instance.to_json()).expect("instance json"),
            encode: (0..self.encode.rows())
                .map(|r| self.encode.row(r))
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("code serializes")
    }

    /// Parses a conventional code file, re-deriving decode witnesses.
    pub fn parse(text: &str) -> Result<(Instance, LinearCode)> {
        let file: ConventionalCodeFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("code file: {e}")))?;
        let instance = Instance::parse(&serde_json::to_string(&file.instance).unwrap())?;
        if file.p != instance.modulus() {
            return Err(Error::ModulusMismatch {
                left: file.p,
                right: instance.modulus(),
            });
        }
        let n = instance.total_msg_len();
        let encode = FieldMatrix::from_rows(&file.encode, n, file.p)?;
        let code = LinearCode::derive(&instance, encode)?;
        Ok((instance, code))
    }
}

#[derive(Serialize, Deserialize)]
struct ConventionalCodeFile {
    p: u16,
    instance: serde_json::Value,
    encode: Vec<Vec<u16>>,
}

fn derive_decoders(instance: &Instance, encode: &FieldMatrix) -> Result<Vec<FieldMatrix>> {
    let n = instance.total_msg_len();
    if encode.cols() != n {
        return Err(Error::Dimension(format!(
            "encoder has {} columns for {} message symbols",
            encode.cols(),
            n
        )));
    }
    let p = instance.modulus();
    if encode.modulus() != p {
        return Err(Error::ModulusMismatch {
            left: encode.modulus(),
            right: p,
        });
    }
    let mut out = Vec::with_capacity(instance.receivers());
    for i in 0..instance.receivers() {
        // observation rows: the code rows, then a unit row per known symbol
        let mut rows: Vec<Vec<u16>> = (0..encode.rows()).map(|r| encode.row(r)).collect();
        for &j in instance.side_info(i) {
            let off = instance.msg_offset(j);
            for c in off..off + instance.msg_len(j) {
                let mut v = vec![0u16; n];
                v[c] = 1;
                rows.push(v);
            }
        }
        let obs = FieldMatrix::from_rows(&rows, n, p)?;
        let obs_t = obs.transpose();
        let off = instance.msg_offset(i);
        let mut dec_rows = Vec::with_capacity(instance.msg_len(i));
        for c in off..off + instance.msg_len(i) {
            let mut target = vec![0u16; n];
            target[c] = 1;
            match obs_t.solve_affine(&target)? {
                Some(w) => dec_rows.push(w),
                None => {
                    return Err(Error::Infeasible(format!(
                        "receiver {} cannot decode symbol {} of its message",
                        i + 1,
                        c - off + 1
                    )))
                }
            }
        }
        out.push(FieldMatrix::from_rows(&dec_rows, obs.rows(), p)?);
    }
    Ok(out)
}

/// Quick decodability test used inside searches, without materializing
/// decode witnesses.
fn decodable(instance: &Instance, encode: &FieldMatrix) -> bool {
    let n = instance.total_msg_len();
    let p = instance.modulus();
    for i in 0..instance.receivers() {
        if instance.msg_len(i) == 0 {
            continue;
        }
        let mut rows: Vec<Vec<u16>> = (0..encode.rows()).map(|r| encode.row(r)).collect();
        for &j in instance.side_info(i) {
            let off = instance.msg_offset(j);
            for c in off..off + instance.msg_len(j) {
                let mut v = vec![0u16; n];
                v[c] = 1;
                rows.push(v);
            }
        }
        let obs = match FieldMatrix::from_rows(&rows, n, p) {
            Ok(m) => m,
            Err(_) => return false,
        };
        let base_rank = obs.rank();
        let off = instance.msg_offset(i);
        for c in off..off + instance.msg_len(i) {
            let mut target = vec![0u16; n];
            target[c] = 1;
            let stacked = match obs.vstack(&FieldMatrix::from_rows(&[target], n, p).unwrap()) {
                Ok(m) => m,
                Err(_) => return false,
            };
            if stacked.rank() != base_rank {
                return false;
            }
        }
    }
    true
}

/// Outcome of exhaustive zero-error verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZeroErrorOutcome {
    Pass,
    /// First failing pair in lexicographic (message tuple, receiver) order.
    Counterexample {
        msg: Vec<u16>,
        receiver: usize,
    },
}

impl ZeroErrorOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, ZeroErrorOutcome::Pass)
    }
}

/// Checks that every receiver decodes its exact message on every message
/// tuple, by enumeration. Guarded by `cap` on `p^(total message symbols)`;
/// [`crate::DEFAULT_VERIFY_CAP`] is the usual choice.
pub fn verify_zero_error(
    code: &LinearCode,
    instance: &Instance,
    cap: u64,
) -> Result<ZeroErrorOutcome> {
    let n = instance.total_msg_len();
    let p = instance.modulus();
    if code.encode.cols() != n {
        return Err(Error::Dimension(format!(
            "encoder has {} columns for {} message symbols",
            code.encode.cols(),
            n
        )));
    }
    if code.decoders.len() != instance.receivers() {
        return Err(Error::Dimension(format!(
            "{} decoders for {} receivers",
            code.decoders.len(),
            instance.receivers()
        )));
    }
    check_cap(pow_u128(p, n), cap)?;
    let total = pow_u128(p, n) as u64;

    let check = |m_idx: u64| -> Option<(u64, usize)> {
        let m = unpack_digits(m_idx, p, n);
        let c = code.encode.mul_vec(&m).expect("dims checked");
        for i in 0..instance.receivers() {
            let mut obs = c.clone();
            for &j in instance.side_info(i) {
                let off = instance.msg_offset(j);
                obs.extend_from_slice(&m[off..off + instance.msg_len(j)]);
            }
            let guess = match code.decoders[i].mul_vec(&obs) {
                Ok(g) => g,
                Err(_) => return Some((m_idx, i)),
            };
            let off = instance.msg_offset(i);
            if guess != m[off..off + instance.msg_len(i)] {
                return Some((m_idx, i));
            }
        }
        None
    };

    let first = if total < 1 << 14 {
        (0..total).find_map(check)
    } else {
        (0..total).into_par_iter().find_map_first(check)
    };

    Ok(match first {
        None => ZeroErrorOutcome::Pass,
        Some((m_idx, receiver)) => ZeroErrorOutcome::Counterexample {
            msg: unpack_digits(m_idx, p, n),
            receiver,
        },
    })
}

/// Exhaustive search for a zero-error linear code of length exactly `l`:
/// all `l x n` encode matrices over GF(p) in lexicographic order, pruned by
/// the per-receiver rank test. The returned witness re-passes
/// [`verify_zero_error`] before being handed back.
pub fn find_linear_code(instance: &Instance, l: usize, cap: u64) -> Result<Option<LinearCode>> {
    let n = instance.total_msg_len();
    let p = instance.modulus();
    let candidates = pow_u128(p, l * n);
    check_cap(candidates, cap)?;
    check_cap(pow_u128(p, n), cap)?;
    let candidates = candidates as u64;

    let build = |idx: u64| -> FieldMatrix {
        let digits = unpack_digits(idx, p, l * n);
        FieldMatrix::from_fn(l, n, p, |r, c| digits[r * n + c]).expect("valid modulus")
    };

    let found = if candidates < 1 << 12 {
        (0..candidates).find(|&idx| decodable(instance, &build(idx)))
    } else {
        (0..candidates)
            .into_par_iter()
            .find_first(|&idx| decodable(instance, &build(idx)))
    };

    match found {
        None => Ok(None),
        Some(idx) => {
            let code = LinearCode::derive(instance, build(idx))?;
            match verify_zero_error(&code, instance, cap)? {
                ZeroErrorOutcome::Pass => Ok(Some(code)),
                ZeroErrorOutcome::Counterexample { msg, receiver } => {
                    Err(Error::Internal(format!(
                        "search witness failed re-verification at msg {msg:?}, receiver {}",
                        receiver + 1
                    )))
                }
            }
        }
    }
}

/// Result of the exhaustive min-rank search.
#[derive(Debug, Clone)]
pub enum MinRankOutcome {
    Found {
        l_star: usize,
        witness: LinearCode,
        nodes: u64,
    },
    /// No fitting code of length at most `max_l` exists.
    NoneWithin { max_l: usize, nodes: u64 },
}

/// Exhaustive min-rank over fitting matrices for unit-length messages:
/// matrices with ones on the diagonal and free entries only inside the
/// side-information pattern. Depth-first over rows in lexicographic order
/// with rank-based pruning; workers split on first-row candidates and the
/// reduction keeps the minimum rank, then the lexicographically first
/// witness. The optimal scalar-linear code length equals this minimum rank.
pub fn min_rank(instance: &Instance, max_l: usize, cap: u64) -> Result<MinRankOutcome> {
    let t = instance.receivers();
    if instance.msg_lens().iter().any(|&l| l != 1) {
        return Err(Error::Precondition(
            "min_rank needs unit message lengths; use find_linear_code for general lengths".into(),
        ));
    }
    let p = instance.modulus();
    let free: Vec<Vec<usize>> = (0..t)
        .map(|i| instance.side_info(i).iter().copied().collect())
        .collect();
    let leaf_bound: u128 = free.iter().map(|f| pow_u128(p, f.len())).product();
    check_cap(leaf_bound, cap)?;

    // Shared upper bound for pruning. Pruning uses a strict comparison so
    // equal-rank witnesses are never cut, keeping the lexicographically
    // first one reachable.
    let best_hint = AtomicUsize::new(t + 1);

    struct Dfs<'a> {
        p: u16,
        t: usize,
        free: &'a [Vec<usize>],
        best_hint: &'a AtomicUsize,
    }

    #[derive(Clone)]
    struct Basis {
        p: u16,
        rows: Vec<Vec<u16>>,
    }

    impl Basis {
        fn insert(&mut self, mut v: Vec<u16>) -> bool {
            let p = self.p as u32;
            for row in &self.rows {
                let lead = row.iter().position(|&x| x != 0).unwrap();
                if v[lead] != 0 {
                    let inv = crate::field::FieldMatrix::from_rows(&[vec![row[lead]]], 1, self.p);
                    let _ = inv;
                    // factor = v[lead] / row[lead]
                    let f = (v[lead] as u32 * mod_pow(row[lead] as u32, p - 2, p)) % p;
                    for (x, y) in v.iter_mut().zip(row.iter()) {
                        *x = ((*x as u32 + (p - f) * *y as u32) % p) as u16;
                    }
                }
            }
            if v.iter().all(|&x| x == 0) {
                return false;
            }
            self.rows.push(v);
            self.rows.sort_by_key(|r| r.iter().position(|&x| x != 0));
            true
        }
    }

    fn mod_pow(mut b: u32, mut e: u32, p: u32) -> u32 {
        let mut acc = 1u32;
        b %= p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        acc
    }

    impl Dfs<'_> {
        fn row_vec(&self, i: usize, choice: u64) -> Vec<u16> {
            let mut v = vec![0u16; self.t];
            v[i] = 1;
            let digits = unpack_digits(choice, self.p, self.free[i].len());
            for (&col, &d) in self.free[i].iter().zip(digits.iter()) {
                v[col] = d;
            }
            v
        }

        /// Returns the best (rank, choices) in this subtree, plus node count.
        fn run(
            &self,
            row: usize,
            basis: &Basis,
            rank: usize,
            choices: &mut Vec<u64>,
            best: &mut Option<(usize, Vec<u64>)>,
            nodes: &mut u64,
        ) {
            *nodes += 1;
            let hint = self.best_hint.load(Ordering::Relaxed);
            if rank > hint {
                return;
            }
            if row == self.t {
                if best.as_ref().is_none_or(|(r, _)| rank < *r) {
                    *best = Some((rank, choices.clone()));
                    self.best_hint.fetch_min(rank, Ordering::Relaxed);
                }
                return;
            }
            let options = pow_u128(self.p, self.free[row].len()) as u64;
            for choice in 0..options {
                let v = self.row_vec(row, choice);
                let mut b = basis.clone();
                let new_rank = if b.insert(v) { rank + 1 } else { rank };
                choices.push(choice);
                self.run(row + 1, &b, new_rank, choices, best, nodes);
                choices.pop();
            }
        }
    }

    let dfs = Dfs {
        p,
        t,
        free: &free,
        best_hint: &best_hint,
    };

    let first_options = pow_u128(p, free.first().map(|f| f.len()).unwrap_or(0)) as u64;
    // per first-row subtree: best (rank, row choices) if any, plus node count
    type SubtreeResult = (Option<(usize, Vec<u64>)>, u64);
    let results: Vec<SubtreeResult> = if t == 0 {
        vec![(Some((0, Vec::new())), 1)]
    } else {
        (0..first_options)
            .into_par_iter()
            .map(|choice| {
                let mut best = None;
                let mut nodes = 0u64;
                let mut choices = vec![choice];
                let mut basis = Basis {
                    p,
                    rows: Vec::new(),
                };
                let v = dfs.row_vec(0, choice);
                let rank = usize::from(basis.insert(v));
                dfs.run(1, &basis, rank, &mut choices, &mut best, &mut nodes);
                (best, nodes)
            })
            .collect()
    };

    let nodes: u64 = results.iter().map(|(_, n)| n).sum();
    let best = results
        .into_iter()
        .filter_map(|(b, _)| b)
        .min_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));

    let Some((l_star, choices)) = best else {
        return Err(Error::Internal("fitting search found no matrix".into()));
    };
    if l_star > max_l {
        return Ok(MinRankOutcome::NoneWithin { max_l, nodes });
    }

    // Rebuild the fitting matrix and take its reduced row basis as the
    // encoder.
    let rows: Vec<Vec<u16>> = (0..t).map(|i| dfs.row_vec(i, choices[i])).collect();
    let fitting = FieldMatrix::from_rows(&rows, t, p)?;
    let (rref, pivots) = fitting.rref();
    let encode = rref.select_rows(&(0..pivots.len()).collect::<Vec<_>>());
    let witness = LinearCode::derive(instance, encode)?;
    match verify_zero_error(&witness, instance, cap)? {
        ZeroErrorOutcome::Pass => Ok(MinRankOutcome::Found {
            l_star,
            witness,
            nodes,
        }),
        ZeroErrorOutcome::Counterexample { msg, receiver } => Err(Error::Internal(format!(
            "min-rank witness failed re-verification at msg {msg:?}, receiver {}",
            receiver + 1
        ))),
    }
}

/// Minimal code-alphabet exponent over all (possibly nonlinear) table codes:
/// the smallest `l` such that a zero-error deterministic encoder table into
/// `p^l` symbols exists. The oracle for the general, not-necessarily-linear
/// rate region on tiny instances.
pub fn brute_force_optimal(instance: &Instance, cap: u64) -> Result<usize> {
    let n = instance.total_msg_len();
    check_cap(pow_u128(instance.modulus(), n), cap)?;
    for l in 0..=n {
        if search_table_code(
            instance,
            &KeyProfile::none(instance.receivers()),
            l,
            SearchGoal::ZeroError,
            cap,
        )?
        .is_some()
        {
            return Ok(l);
        }
    }
    Err(Error::Internal(
        "sending every message symbol is always a zero-error code".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn xor_instance() -> Instance {
        Instance::parse(r#"{"t":2,"p":2,"side_info":[[2],[1]],"msg_len":[1,1]}"#).unwrap()
    }

    fn directed_cycle(t: usize) -> Instance {
        // receiver i knows its predecessor's message
        let side: Vec<BTreeSet<usize>> = (0..t)
            .map(|i| [(i + t - 1) % t].into_iter().collect())
            .collect();
        Instance::new(2, side, vec![1; t]).unwrap()
    }

    fn pentagon() -> Instance {
        // the 5-cycle with both neighbors as side information
        let side: Vec<BTreeSet<usize>> = (0..5)
            .map(|i| [(i + 4) % 5, (i + 1) % 5].into_iter().collect())
            .collect();
        Instance::new(2, side, vec![1; 5]).unwrap()
    }

    fn no_side_info(t: usize) -> Instance {
        Instance::new(2, vec![BTreeSet::new(); t], vec![1; t]).unwrap()
    }

    #[test]
    fn xor_code_passes_and_projection_fails() {
        let inst = xor_instance();
        let xor = LinearCode::derive(&inst, FieldMatrix::from_rows(&[vec![1, 1]], 2, 2).unwrap())
            .unwrap();
        assert!(verify_zero_error(&xor, &inst, 1 << 20).unwrap().passed());

        // C = M_1 with a zero decoder for receiver 2: fails at m = (0, 1)
        let encode = FieldMatrix::from_rows(&[vec![1, 0]], 2, 2).unwrap();
        let d1 = FieldMatrix::from_rows(&[vec![1, 0]], 2, 2).unwrap();
        let d2 = FieldMatrix::zero(1, 2, 2).unwrap();
        let code = LinearCode::new(encode, vec![d1, d2]);
        match verify_zero_error(&code, &inst, 1 << 20).unwrap() {
            ZeroErrorOutcome::Counterexample { msg, receiver } => {
                assert_eq!(receiver, 1);
                assert_eq!(msg, vec![0, 1]);
            }
            ZeroErrorOutcome::Pass => panic!("projection cannot serve receiver 2"),
        }
    }

    #[test]
    fn find_linear_code_xor() {
        let inst = xor_instance();
        let found = find_linear_code(&inst, 1, 1 << 24).unwrap().unwrap();
        assert_eq!(found.encode_matrix().row(0), vec![1, 1]);
        assert!(find_linear_code(&inst, 0, 1 << 24).unwrap().is_none());
    }

    #[test]
    fn find_linear_code_three_cycle() {
        let inst = directed_cycle(3);
        let code = find_linear_code(&inst, 2, 1 << 24).unwrap().unwrap();
        assert!(verify_zero_error(&code, &inst, 1 << 20).unwrap().passed());
        assert!(find_linear_code(&inst, 1, 1 << 24).unwrap().is_none());
    }

    #[test]
    fn min_rank_xor_is_one_with_xor_witness() {
        let inst = xor_instance();
        let MinRankOutcome::Found {
            l_star, witness, ..
        } = min_rank(&inst, 2, 1 << 24).unwrap()
        else {
            panic!("xor instance has min rank 1");
        };
        assert_eq!(l_star, 1);
        assert_eq!(witness.encode_matrix().row(0), vec![1, 1]);
    }

    #[test]
    fn min_rank_no_side_info_is_t() {
        for t in 1..=4 {
            let inst = no_side_info(t);
            let MinRankOutcome::Found { l_star, .. } = min_rank(&inst, t, 1 << 24).unwrap() else {
                panic!("identity always fits");
            };
            assert_eq!(l_star, t);
        }
    }

    #[test]
    fn min_rank_pentagon_is_three() {
        let inst = pentagon();
        let MinRankOutcome::Found {
            l_star, witness, ..
        } = min_rank(&inst, 5, 1 << 24).unwrap()
        else {
            panic!("pentagon has a fitting matrix");
        };
        assert_eq!(l_star, 3);
        assert!(verify_zero_error(&witness, &inst, 1 << 20)
            .unwrap()
            .passed());

        // independent oracle: encoder search fails at l = 2, succeeds at 3
        assert!(find_linear_code(&inst, 2, 1 << 24).unwrap().is_none());
        assert!(find_linear_code(&inst, 3, 1 << 24).unwrap().is_some());
    }

    #[test]
    fn min_rank_respects_max_l() {
        let inst = no_side_info(3);
        assert!(matches!(
            min_rank(&inst, 2, 1 << 24).unwrap(),
            MinRankOutcome::NoneWithin { max_l: 2, .. }
        ));
    }

    #[test]
    fn min_rank_rejects_vector_messages() {
        let inst = Instance::new(2, vec![BTreeSet::new()], vec![2]).unwrap();
        assert!(matches!(
            min_rank(&inst, 2, 1 << 24),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn min_rank_monotone_under_side_info_removal() {
        let full = pentagon();
        // strip one edge per receiver: keep only the predecessor
        let less = directed_cycle(5);
        let l_full = match min_rank(&full, 5, 1 << 24).unwrap() {
            MinRankOutcome::Found { l_star, .. } => l_star,
            _ => unreachable!(),
        };
        let l_less = match min_rank(&less, 5, 1 << 24).unwrap() {
            MinRankOutcome::Found { l_star, .. } => l_star,
            _ => unreachable!(),
        };
        assert!(l_less >= l_full);
    }

    #[test]
    fn brute_force_basics() {
        assert_eq!(brute_force_optimal(&xor_instance(), 1 << 24).unwrap(), 1);
        // single receiver, no side info, two symbols: lossless coding needs 2
        let inst = Instance::new(2, vec![BTreeSet::new()], vec![2]).unwrap();
        assert_eq!(brute_force_optimal(&inst, 1 << 24).unwrap(), 2);
        // empty messages need nothing
        let empty = Instance::new(2, vec![BTreeSet::new(); 2], vec![0, 0]).unwrap();
        assert_eq!(brute_force_optimal(&empty, 1 << 24).unwrap(), 0);
    }

    #[test]
    fn linear_never_beats_general_oracle() {
        for inst in [xor_instance(), directed_cycle(3), no_side_info(2)] {
            let MinRankOutcome::Found { l_star, .. } = min_rank(&inst, 10, 1 << 24).unwrap() else {
                unreachable!()
            };
            let general = brute_force_optimal(&inst, 1 << 24).unwrap();
            assert!(l_star >= general, "linear {l_star} < general {general}");
        }
    }

    #[test]
    fn code_file_roundtrip() {
        let inst = xor_instance();
        let code = find_linear_code(&inst, 1, 1 << 24).unwrap().unwrap();
        let json = code.to_json(&inst);
        let (inst2, code2) = LinearCode::parse(&json).unwrap();
        assert_eq!(inst, inst2);
        assert_eq!(code.encode_matrix(), code2.encode_matrix());
    }

    #[test]
    fn searches_work_over_ternary_fields() {
        // crossed side information over GF(3): one symbol still suffices
        let inst = Instance::new(3, vec![[1usize].into(), [0usize].into()], vec![1, 1]).unwrap();
        let MinRankOutcome::Found {
            l_star, witness, ..
        } = min_rank(&inst, 2, 1 << 24).unwrap()
        else {
            panic!("identity always fits");
        };
        assert_eq!(l_star, 1);
        assert!(verify_zero_error(&witness, &inst, 1 << 20)
            .unwrap()
            .passed());

        let found = find_linear_code(&inst, 1, 1 << 24).unwrap().unwrap();
        assert!(verify_zero_error(&found, &inst, 1 << 20).unwrap().passed());
        assert!(find_linear_code(&inst, 0, 1 << 24).unwrap().is_none());

        assert_eq!(brute_force_optimal(&inst, 1 << 24).unwrap(), 1);
    }
}
